//! Seeded random streams.
//!
//! Every agent draws from its own ChaCha8 stream keyed by the master seed and
//! the agent's position, so results do not depend on the order in which
//! agents are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream used for the shared initial start.
pub const SETUP_STREAM: u64 = 0;

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream of the agent at position `index` (0-based, objective order).
pub fn agent_stream(seed: u64, index: usize) -> ChaCha8Rng {
    stream(seed, index as u64 + 1)
}

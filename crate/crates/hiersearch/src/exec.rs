//! Execution modes.
//!
//! `HIERSEARCH_THREADS=0` selects the sequential reference mode; any other
//! value caps the rayon pool at that many threads. Unset means rayon's
//! default pool. Every mode produces identical results.

use hiersearch_core::Executor;
use rayon::prelude::*;

use crate::error::HarnessError;

pub const THREADS_VAR: &str = "HIERSEARCH_THREADS";

/// Runs agents on the current rayon pool.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rayon;

impl Executor for Rayon {
    fn map_mut<S, T, F>(&self, items: &mut [S], f: F) -> Vec<T>
    where
        S: Send,
        T: Send,
        F: Fn(usize, &mut S) -> T + Sync + Send,
    {
        items.par_iter_mut().enumerate().map(|(i, s)| f(i, s)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    /// Parallel, optionally capped at a thread count.
    Parallel(Option<usize>),
}

impl ExecMode {
    pub fn from_env() -> Result<Self, HarnessError> {
        match std::env::var(THREADS_VAR) {
            Ok(v) => Self::parse(&v),
            Err(_) => Ok(ExecMode::Parallel(None)),
        }
    }

    pub fn parse(value: &str) -> Result<Self, HarnessError> {
        match value.trim().parse::<usize>() {
            Ok(0) => Ok(ExecMode::Sequential),
            Ok(n) => Ok(ExecMode::Parallel(Some(n))),
            Err(_) => Err(HarnessError::config(format!("{THREADS_VAR} must be a non-negative integer, got `{value}`"))),
        }
    }

    /// Runs `job` inside a pool sized for this mode.
    pub fn install<T: Send>(self, job: impl FnOnce() -> T + Send) -> Result<T, HarnessError> {
        match self {
            ExecMode::Parallel(Some(n)) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| HarnessError::config(format!("cannot build thread pool: {e}")))?;
                Ok(pool.install(job))
            }
            _ => Ok(job()),
        }
    }

    pub fn is_parallel(self) -> bool {
        matches!(self, ExecMode::Parallel(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_modes() {
        assert_eq!(ExecMode::parse("0").unwrap(), ExecMode::Sequential);
        assert_eq!(ExecMode::parse("4").unwrap(), ExecMode::Parallel(Some(4)));
        assert!(ExecMode::parse("many").is_err());
    }

    #[test]
    fn rayon_preserves_order() {
        let mut items: Vec<u32> = (0..100).collect();
        let out = Rayon.map_mut(&mut items, |i, s| {
            *s += 1;
            i as u32 * 2
        });
        assert_eq!(out, (0..100).map(|i| i * 2).collect::<Vec<_>>());
        assert_eq!(items[99], 100);
    }
}

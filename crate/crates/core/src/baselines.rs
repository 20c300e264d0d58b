//! Matched-evaluation baselines.
//!
//! `agents` independent workers each evaluate `b` points per repetition for
//! `iterations` repetitions, so they spend exactly as many objective calls as
//! the collaborative search with one terminal per objective dimension. The
//! reported result is the best point over every agent's whole history.
//! Worker `i` draws from the same random stream as terminal `i` of the
//! collaborative search.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::domain::{validate_space, Coordinate, Objective, ObjectiveHandle, SearchSpace};
use crate::engine::{Executor, IterationTrace, RunReport};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Design {
    Uniform,
    LatinHypercube,
}

struct Worker {
    rng: ChaCha8Rng,
    best: Option<(Coordinate, f64)>,
}

fn draw(lo: f64, hi: f64, u: f64) -> f64 {
    let v = lo + u * (hi - lo);
    if v >= hi {
        hi.next_down().max(lo)
    } else {
        v
    }
}

/// `b` points drawn independently and uniformly over the objective box.
pub fn uniform_design<R: Rng + ?Sized>(space: &SearchSpace, b: usize, rng: &mut R) -> Result<Vec<Coordinate>> {
    let objective = space.objective_indices()?;
    let base = space.base_coordinate();
    Ok((0..b)
        .map(|_| {
            let mut x = base.clone();
            for &i in &objective {
                let dim = &space.dimensions[i];
                let (lo, hi) = dim.bounds();
                x[i] = dim.snap(draw(lo, hi, rng.random()));
            }
            x
        })
        .collect())
}

/// A `b`-point Latin hypercube over the objective box: every objective
/// dimension is cut into `b` equal strata and each stratum receives exactly
/// one point, with an independent random stratum order per dimension.
pub fn latin_hypercube_design<R: Rng + ?Sized>(
    space: &SearchSpace,
    b: usize,
    rng: &mut R,
) -> Result<Vec<Coordinate>> {
    let objective = space.objective_indices()?;
    let mut points = alloc::vec![space.base_coordinate(); b];
    let mut strata: Vec<usize> = (0..b).collect();
    for &i in &objective {
        let dim = &space.dimensions[i];
        let (lo, hi) = dim.bounds();
        strata.shuffle(rng);
        for (point, &stratum) in points.iter_mut().zip(&strata) {
            let s_lo = lo + (hi - lo) * stratum as f64 / b as f64;
            let s_hi = lo + (hi - lo) * (stratum + 1) as f64 / b as f64;
            point[i] = dim.snap(draw(s_lo, s_hi, rng.random()));
        }
    }
    Ok(points)
}

#[allow(clippy::too_many_arguments)]
fn run_matched<E: Executor>(
    design: Design,
    space: &SearchSpace,
    objective: &dyn Objective,
    agents: usize,
    b: usize,
    iterations: usize,
    seed: u64,
    exec: &E,
) -> Result<RunReport> {
    validate_space(space)?;
    if agents < 1 || b < 1 {
        return Err(Error::InvalidParameter(String::from("agents and budget must be at least 1")));
    }
    let handle = ObjectiveHandle::new(space, objective)?;
    let direction = space.direction;
    let mut workers: Vec<Worker> =
        (0..agents).map(|i| Worker { rng: rng::agent_stream(seed, i), best: None }).collect();
    let mut per_iteration = Vec::with_capacity(iterations);

    for iteration in 1..=iterations {
        let outcomes = exec.map_mut(&mut workers, |_, w| -> Result<()> {
            let points = match design {
                Design::Uniform => uniform_design(space, b, &mut w.rng)?,
                Design::LatinHypercube => latin_hypercube_design(space, b, &mut w.rng)?,
            };
            for x in points {
                let psi = handle.evaluate(&x)?;
                let improves = match &w.best {
                    None => true,
                    Some((_, best)) => direction.better(psi, *best),
                };
                if improves {
                    w.best = Some((x, psi));
                }
            }
            Ok(())
        });
        outcomes.into_iter().collect::<Result<()>>()?;
        let psis: Vec<f64> =
            workers.iter().map(|w| w.best.as_ref().map_or(direction.worst(), |b| b.1)).collect();
        let leader = direction.best_index(&psis).unwrap_or(0);
        per_iteration.push(IterationTrace { iteration, global_best_psi: psis[leader], per_agent_psis: psis });
    }

    let psis: Vec<f64> = workers.iter().map(|w| w.best.as_ref().map_or(direction.worst(), |b| b.1)).collect();
    let leader = direction.best_index(&psis).unwrap_or(0);
    let best = workers[leader].best.take();
    Ok(RunReport {
        method: String::from(match design {
            Design::Uniform => "random",
            Design::LatinHypercube => "lhs",
        }),
        best_psi: best.as_ref().map_or(direction.worst(), |b| b.1),
        best_coord: best.map(|b| b.0),
        per_iteration,
        evaluations_used: handle.evaluations(),
        setup_evaluations: 0,
    })
}

/// Standard random search under the matched-evaluation protocol.
pub fn random_search_matched<E: Executor>(
    space: &SearchSpace,
    objective: &dyn Objective,
    agents: usize,
    b: usize,
    iterations: usize,
    seed: u64,
    exec: &E,
) -> Result<RunReport> {
    run_matched(Design::Uniform, space, objective, agents, b, iterations, seed, exec)
}

/// Latin hypercube search under the matched-evaluation protocol.
pub fn latin_hypercube_matched<E: Executor>(
    space: &SearchSpace,
    objective: &dyn Objective,
    agents: usize,
    b: usize,
    iterations: usize,
    seed: u64,
    exec: &E,
) -> Result<RunReport> {
    run_matched(Design::LatinHypercube, space, objective, agents, b, iterations, seed, exec)
}

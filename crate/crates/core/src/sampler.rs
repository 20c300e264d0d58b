//! A terminal agent's sampling step.
//!
//! Given a start coordinate `s` and widths `eps`, the agent owning dimension
//! `i` builds `b` candidates:
//!
//! * candidate 1 takes dimension `i` uniformly from the local range
//!   `R = [max(lo, s_i - eps_i), min(hi, s_i + eps_i))`;
//! * candidates `2..=b` take dimension `i` from the complement `D - R`, cut
//!   into `b - 1` equal-measure slots, one draw per slot;
//! * every other objective dimension `k` is drawn from its own local range
//!   around `s_k`, and fixed dimensions are copied from `s`.
//!
//! Intervals are half-open. A zero width on a continuous dimension makes the
//! local range empty; the start value is reused in that case.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::domain::{Coordinate, Dimension, Direction, ObjectiveHandle, SearchSpace};
use crate::engine::EvaluationRecord;
use crate::error::{Error, Result};
use crate::hierarchy::{AgentNode, WidthState};

/// A union of sorted, disjoint half-open intervals on one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    intervals: Vec<(f64, f64)>,
}

impl Region {
    pub fn empty() -> Self {
        Self { intervals: Vec::new() }
    }

    /// `[lo, hi)`, or the empty region when `lo >= hi`.
    pub fn interval(lo: f64, hi: f64) -> Self {
        let mut r = Self::empty();
        r.push(lo, hi);
        r
    }

    /// Builds a region from intervals given in ascending order; empty pieces
    /// are dropped.
    pub fn from_intervals<I: IntoIterator<Item = (f64, f64)>>(intervals: I) -> Result<Self> {
        let mut r = Self::empty();
        for (lo, hi) in intervals {
            if let Some(&(_, prev_hi)) = r.intervals.last() {
                if lo < prev_hi {
                    return Err(Error::InvalidParameter(String::from(
                        "region intervals must be sorted and disjoint",
                    )));
                }
            }
            r.push(lo, hi);
        }
        Ok(r)
    }

    fn push(&mut self, lo: f64, hi: f64) {
        if lo < hi {
            self.intervals.push((lo, hi));
        }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(lo, hi)| hi - lo).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, v: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo <= v && v < hi)
    }

    /// Removes a single interval `[lo, hi)` from this region.
    pub fn subtract(&self, lo: f64, hi: f64) -> Self {
        let mut out = Self::empty();
        for &(a, b) in &self.intervals {
            if hi <= a || b <= lo || lo >= hi {
                out.push(a, b);
            } else {
                out.push(a, lo.min(b));
                out.push(hi.max(a), b);
            }
        }
        out
    }

    /// Maps an offset in `[0, measure)` along the concatenated intervals to a
    /// position inside the region.
    fn locate(&self, offset: f64) -> f64 {
        let mut rest = offset.max(0.0);
        for &(lo, hi) in &self.intervals {
            let len = hi - lo;
            if rest < len {
                return inside(lo + rest, lo, hi);
            }
            rest -= len;
        }
        let &(lo, hi) = self.intervals.last().expect("region is not empty");
        inside(hi, lo, hi)
    }
}

/// Keeps `v` within `[lo, hi)` despite rounding.
fn inside(v: f64, lo: f64, hi: f64) -> f64 {
    if v >= hi {
        hi.next_down().max(lo)
    } else {
        v.max(lo)
    }
}

/// The whole sampling interval of a dimension as a region.
pub fn full_range(dim: &Dimension) -> Region {
    let (lo, hi) = dim.bounds();
    Region::interval(lo, hi)
}

/// The local window around `start` on `dim`, clipped to the domain.
///
/// On a categorical dimension the window is the start's own label widened by
/// `floor(eps)` labels on each side, so it is never empty.
pub fn local_range(dim: &Dimension, start: f64, eps: f64) -> Region {
    let (lo, hi) = dim.bounds();
    if dim.is_categorical() {
        let w = libm::floor(eps.max(0.0));
        return Region::interval((start - w).max(lo), (start + w + 1.0).min(hi));
    }
    if eps <= 0.0 {
        return Region::empty();
    }
    Region::interval((start - eps).max(lo), (start + eps).min(hi))
}

/// `D - R` for a local range `R` of `dim`.
pub fn complement(dim: &Dimension, local: &Region) -> Region {
    let mut out = full_range(dim);
    for &(lo, hi) in local.intervals() {
        out = out.subtract(lo, hi);
    }
    out
}

/// Cuts `region` into `num_slots` slices of equal measure (in position order
/// over the concatenated intervals) and draws uniformly inside slice
/// `slot_index` (1-based).
pub fn uniform_rand<R: Rng + ?Sized>(
    region: &Region,
    num_slots: usize,
    slot_index: usize,
    rng: &mut R,
) -> Result<f64> {
    if region.is_empty() {
        return Err(Error::EmptyRegion);
    }
    if num_slots < 1 || slot_index < 1 || slot_index > num_slots {
        return Err(Error::BadSlot { index: slot_index, slots: num_slots });
    }
    let measure = region.measure();
    let width = measure / num_slots as f64;
    let slot_lo = width * (slot_index - 1) as f64;
    let slot_hi = if slot_index == num_slots { measure } else { width * slot_index as f64 };
    let u: f64 = rng.random();
    let offset = inside(slot_lo + u * (slot_hi - slot_lo), slot_lo, slot_hi);
    Ok(region.locate(offset))
}

fn draw_local<R: Rng + ?Sized>(dim: &Dimension, start: f64, eps: f64, rng: &mut R) -> f64 {
    let local = local_range(dim, start, eps);
    match uniform_rand(&local, 1, 1, rng) {
        Ok(v) => dim.snap(v),
        Err(_) => start,
    }
}

/// The start coordinate (index 0) plus `b` generated candidates, with the
/// response values known so far.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub coords: Vec<Coordinate>,
    pub psis: Vec<f64>,
}

impl CandidateSet {
    /// Evaluates every candidate except the start.
    pub fn evaluate(&mut self, objective: &ObjectiveHandle<'_>) -> Result<()> {
        for coord in &self.coords[self.psis.len()..] {
            self.psis.push(objective.evaluate(coord)?);
        }
        Ok(())
    }

    pub fn generated(&self) -> &[Coordinate] {
        &self.coords[1..]
    }
}

/// One iteration's candidates for a terminal agent.
pub fn generate_candidates<R: Rng + ?Sized>(
    node: &AgentNode,
    start: &Coordinate,
    start_psi: f64,
    space: &SearchSpace,
    rng: &mut R,
) -> Result<CandidateSet> {
    let terminal = node.terminal.as_ref().ok_or_else(|| {
        Error::InvalidParameter(alloc::format!("node {} is not a terminal agent", node.id))
    })?;
    if start.0.len() != space.dimensions.len() {
        return Err(Error::Arity { expected: space.dimensions.len(), got: start.0.len() });
    }
    let own_name = &node.primary[0];
    let own = space.index_of(own_name).ok_or_else(|| Error::UnknownDimension(own_name.clone()))?;
    let subsidiary = node
        .subsidiary
        .iter()
        .map(|n| {
            space
                .index_of(n)
                .map(|i| (i, terminal.widths.eps(n)))
                .ok_or_else(|| Error::UnknownDimension(n.clone()))
        })
        .collect::<Result<Vec<_>>>()?;

    let budget = terminal.budget;
    let dim = &space.dimensions[own];
    let eps = terminal.widths.eps(own_name);
    let local = local_range(dim, start[own], eps);
    let rest = complement(dim, &local);
    let fallback = budget >= 2 && rest.is_empty();
    if fallback {
        log::warn!(
            "local range of `{own_name}` covers its whole domain (eps = {eps}); drawing all {budget} samples from the domain"
        );
    }
    let domain = full_range(dim);

    let mut coords = Vec::with_capacity(budget + 1);
    coords.push(start.clone());
    for c in 1..=budget {
        let mut x = start.clone();
        x[own] = if fallback {
            dim.snap(uniform_rand(&domain, budget, c, rng)?)
        } else if c == 1 {
            draw_local(dim, start[own], eps, rng)
        } else {
            dim.snap(uniform_rand(&rest, budget - 1, c - 1, rng)?)
        };
        for &(k, eps_k) in &subsidiary {
            x[k] = draw_local(&space.dimensions[k], start[k], eps_k, rng);
        }
        coords.push(x);
    }
    let mut psis = Vec::with_capacity(budget + 1);
    psis.push(start_psi);
    Ok(CandidateSet { coords, psis })
}

/// Index of the best candidate; the start wins ties.
pub fn best_candidate(cands: &CandidateSet, direction: Direction) -> usize {
    direction.best_index(&cands.psis).unwrap_or(0)
}

pub fn select_best(cands: &CandidateSet, dim_name: &str, direction: Direction) -> EvaluationRecord {
    let i = best_candidate(cands, direction);
    EvaluationRecord {
        dim_name: String::from(dim_name),
        best_coord: cands.coords[i].clone(),
        best_psi: cands.psis[i],
    }
}

/// Multiplies every width by its growth factor when the agent failed to move
/// away from its start.
pub fn update_width(ws: &WidthState, stagnated: bool) -> WidthState {
    let mut next = ws.clone();
    if stagnated {
        for (name, eps) in next.eps.iter_mut() {
            *eps *= ws.deltas.get(name).copied().unwrap_or(1.0);
        }
    }
    next
}

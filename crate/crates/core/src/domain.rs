//! Decision variables, search spaces, coordinates and objective handles.
//!
//! Coordinates are stored in *search representation*: linear dimensions hold
//! their value as-is, log10 dimensions hold the base-10 exponent and
//! categorical dimensions hold the label index. [`SearchSpace::decode`]
//! converts to the native values an [`Objective`] sees.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log10,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum DimensionKind {
    Continuous {
        lo: f64,
        hi: f64,
        #[serde(default)]
        scale: Scale,
    },
    Categorical {
        labels: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dimension {
    pub name: String,
    #[serde(flatten)]
    pub kind: DimensionKind,
}

impl Dimension {
    pub fn continuous(name: impl Into<String>, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            kind: DimensionKind::Continuous { lo, hi, scale: Scale::Linear },
        }
    }

    pub fn log10(name: impl Into<String>, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            kind: DimensionKind::Continuous { lo, hi, scale: Scale::Log10 },
        }
    }

    pub fn categorical<I, S>(name: impl Into<String>, labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            name: name.into(),
            kind: DimensionKind::Categorical { labels: labels.into_iter().map(Into::into).collect() },
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            DimensionKind::Continuous { lo, hi, scale } => {
                if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                    return Err(Error::DomainError(format!(
                        "`{}`: need finite lo < hi, got [{lo}, {hi}]",
                        self.name
                    )));
                }
                if *scale == Scale::Log10 && *lo <= 0.0 {
                    return Err(Error::DomainError(format!(
                        "`{}`: log10 scale needs lo > 0, got {lo}",
                        self.name
                    )));
                }
                Ok(())
            }
            DimensionKind::Categorical { labels } => {
                if labels.len() < 2 {
                    return Err(Error::DomainError(format!(
                        "`{}`: categorical dimension needs at least 2 labels",
                        self.name
                    )));
                }
                for (i, label) in labels.iter().enumerate() {
                    if labels[..i].contains(label) {
                        return Err(Error::DomainError(format!(
                            "`{}`: duplicate label `{label}`",
                            self.name
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn is_categorical(&self) -> bool {
        matches!(self.kind, DimensionKind::Categorical { .. })
    }

    /// The interval `[lo, hi]` sampling operates on, in search representation.
    ///
    /// Categorical dimensions map to `[0, k)` and draws are floored.
    pub fn bounds(&self) -> (f64, f64) {
        match &self.kind {
            DimensionKind::Continuous { lo, hi, scale: Scale::Linear } => (*lo, *hi),
            DimensionKind::Continuous { lo, hi, scale: Scale::Log10 } => {
                (libm::log10(*lo), libm::log10(*hi))
            }
            DimensionKind::Categorical { labels } => (0.0, labels.len() as f64),
        }
    }

    /// Native value to search representation.
    pub fn encode(&self, native: f64) -> f64 {
        match &self.kind {
            DimensionKind::Continuous { scale: Scale::Log10, .. } => libm::log10(native),
            _ => native,
        }
    }

    /// Search representation to the native value handed to objectives.
    pub fn decode(&self, value: f64) -> f64 {
        match &self.kind {
            DimensionKind::Continuous { scale: Scale::Log10, .. } => libm::pow(10.0, value),
            DimensionKind::Continuous { .. } => value,
            DimensionKind::Categorical { .. } => libm::floor(value),
        }
    }

    /// Maps a raw draw from [`Dimension::bounds`] onto a legal value.
    pub(crate) fn snap(&self, raw: f64) -> f64 {
        let (lo, hi) = self.bounds();
        match &self.kind {
            DimensionKind::Categorical { .. } => libm::floor(raw).clamp(0.0, hi - 1.0),
            DimensionKind::Continuous { .. } => raw.clamp(lo, hi),
        }
    }

    /// Whether a search-representation value is a legal value of this dimension.
    pub fn contains(&self, value: f64) -> bool {
        clamp_to_domain(self, value).map(|v| v == value).unwrap_or(false)
    }
}

/// Clamps a search-representation value into the dimension's domain.
///
/// Continuous values outside the domain snap to the nearest bound. A
/// categorical value must be an existing label index.
pub fn clamp_to_domain(dim: &Dimension, value: f64) -> Result<f64> {
    match &dim.kind {
        DimensionKind::Continuous { .. } => {
            let (lo, hi) = dim.bounds();
            if value.is_nan() {
                return Err(Error::DomainError(format!("`{}`: NaN value", dim.name)));
            }
            Ok(value.clamp(lo, hi))
        }
        DimensionKind::Categorical { labels } => {
            if libm::floor(value) != value || value < 0.0 || value >= labels.len() as f64 {
                Err(Error::CategoryOutOfRange { index: value as i64, len: labels.len() })
            } else {
                Ok(value)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Minimize,
    Maximize,
}

impl Direction {
    /// Strict improvement of `candidate` over `incumbent`.
    pub fn better(self, candidate: f64, incumbent: f64) -> bool {
        match self {
            Direction::Minimize => candidate < incumbent,
            Direction::Maximize => candidate > incumbent,
        }
    }

    pub fn worst(self) -> f64 {
        match self {
            Direction::Minimize => f64::INFINITY,
            Direction::Maximize => f64::NEG_INFINITY,
        }
    }

    /// Non-finite responses count as the worst possible value.
    pub fn sanitize(self, psi: f64) -> f64 {
        if psi.is_finite() {
            psi
        } else {
            self.worst()
        }
    }

    /// Index of the best value; ties keep the lowest index.
    pub fn best_index(self, values: &[f64]) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, &v) in values.iter().enumerate() {
            match best {
                None => best = Some(i),
                Some(b) if self.better(v, values[b]) => best = Some(i),
                _ => {}
            }
        }
        best
    }
}

/// A point of a [`SearchSpace`], one value per dimension in declaration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Coordinate(pub Vec<f64>);

impl Coordinate {
    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl core::ops::Index<usize> for Coordinate {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl core::ops::IndexMut<usize> for Coordinate {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

/// All decision variables of a problem, split into the objective set being
/// searched and the fixed set pinned to a value.
///
/// Fixed values are given in native units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub dimensions: Vec<Dimension>,
    pub objective: Vec<String>,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    #[serde(default)]
    pub direction: Direction,
}

impl SearchSpace {
    pub fn new(
        dimensions: Vec<Dimension>,
        objective: Vec<String>,
        fixed: BTreeMap<String, f64>,
        direction: Direction,
    ) -> Result<Self> {
        let space = Self { dimensions, objective, fixed, direction };
        validate_space(&space)?;
        Ok(space)
    }

    /// Every dimension is an objective dimension.
    pub fn all_objective(dimensions: Vec<Dimension>, direction: Direction) -> Result<Self> {
        let objective = dimensions.iter().map(|d| d.name.clone()).collect();
        Self::new(dimensions, objective, BTreeMap::new(), direction)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.dimensions.iter().position(|d| d.name == name)
    }

    pub fn objective_indices(&self) -> Result<Vec<usize>> {
        self.objective
            .iter()
            .map(|n| self.index_of(n).ok_or_else(|| Error::UnknownDimension(n.clone())))
            .collect()
    }

    /// A coordinate with fixed dimensions set and objective dimensions at
    /// their lower bound.
    pub fn base_coordinate(&self) -> Coordinate {
        Coordinate(
            self.dimensions
                .iter()
                .map(|d| match self.fixed.get(&d.name) {
                    Some(&v) => d.encode(v),
                    None => d.bounds().0,
                })
                .collect(),
        )
    }

    pub fn decode(&self, coord: &Coordinate) -> Vec<f64> {
        self.dimensions.iter().zip(&coord.0).map(|(d, &v)| d.decode(v)).collect()
    }

    pub fn contains(&self, coord: &Coordinate) -> bool {
        coord.0.len() == self.dimensions.len()
            && self.dimensions.iter().zip(&coord.0).all(|(d, &v)| d.contains(v))
    }
}

/// Checks every structural invariant of a search space.
pub fn validate_space(space: &SearchSpace) -> Result<()> {
    for (i, dim) in space.dimensions.iter().enumerate() {
        dim.validate()?;
        if space.dimensions[..i].iter().any(|d| d.name == dim.name) {
            return Err(Error::DomainError(format!("duplicate dimension `{}`", dim.name)));
        }
    }
    if space.objective.is_empty() {
        return Err(Error::EmptyObjectiveSet);
    }
    for (i, name) in space.objective.iter().enumerate() {
        if space.index_of(name).is_none() {
            return Err(Error::UnknownDimension(name.clone()));
        }
        if space.objective[..i].contains(name) {
            return Err(Error::DomainError(format!("`{name}` listed twice as objective")));
        }
        if space.fixed.contains_key(name) {
            return Err(Error::OverlappingSets(name.clone()));
        }
    }
    for (name, &value) in &space.fixed {
        let dim = space
            .dimensions
            .iter()
            .find(|d| &d.name == name)
            .ok_or_else(|| Error::UnknownDimension(name.clone()))?;
        let encoded = dim.encode(value);
        if !dim.contains(encoded) {
            return Err(Error::DomainError(format!(
                "fixed value {value} of `{name}` lies outside its domain"
            )));
        }
    }
    for dim in &space.dimensions {
        if !space.objective.contains(&dim.name) && !space.fixed.contains_key(&dim.name) {
            return Err(Error::UnassignedDimension(dim.name.clone()));
        }
    }
    Ok(())
}

/// The message passed down the hierarchy while it forms: which objective
/// dimensions a node owns (primary), which it does not (subsidiary), and the
/// pinned dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub primary: Vec<String>,
    pub subsidiary: Vec<String>,
    pub fixed: BTreeMap<String, f64>,
    pub start: Option<Coordinate>,
}

impl Query {
    pub fn root(space: &SearchSpace) -> Self {
        Self {
            primary: space.objective.clone(),
            subsidiary: Vec::new(),
            fixed: space.fixed.clone(),
            start: None,
        }
    }

    /// Narrows the query to `primary`, moving the rest of this query's
    /// primary set into the subsidiary set.
    pub fn child(&self, primary: Vec<String>) -> Self {
        let mut subsidiary: Vec<String> =
            self.primary.iter().filter(|n| !primary.contains(n)).cloned().collect();
        subsidiary.extend(self.subsidiary.iter().cloned());
        Self { primary, subsidiary, fixed: self.fixed.clone(), start: self.start.clone() }
    }

    pub fn validate(&self, space: &SearchSpace) -> Result<()> {
        if let Some(name) = self.primary.iter().find(|n| self.subsidiary.contains(n)) {
            return Err(Error::OverlappingSets(name.clone()));
        }
        let covered = self.primary.len() + self.subsidiary.len() == space.objective.len()
            && space
                .objective
                .iter()
                .all(|n| self.primary.contains(n) || self.subsidiary.contains(n));
        if !covered {
            return Err(Error::InvalidParameter(String::from(
                "primary and subsidiary sets must cover the objective set",
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectiveError {
    pub message: String,
}

impl ObjectiveError {
    pub fn new(message: impl Into<String>) -> Self {
        Self { message: message.into() }
    }
}

impl fmt::Display for ObjectiveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "objective failed: {}", self.message)
    }
}

impl core::error::Error for ObjectiveError {}

/// A black-box response function over native parameter values.
pub trait Objective: Sync {
    fn evaluate(&self, point: &[f64]) -> Result<f64, ObjectiveError>;

    /// Number of values the objective expects, when it is fixed.
    fn arity(&self) -> Option<usize> {
        None
    }
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn evaluate(&self, point: &[f64]) -> Result<f64, ObjectiveError> {
        Ok(self(point))
    }
}

/// An objective bound to a search space, counting every call.
pub struct ObjectiveHandle<'a> {
    objective: &'a dyn Objective,
    space: &'a SearchSpace,
    calls: AtomicU64,
}

impl<'a> ObjectiveHandle<'a> {
    pub fn new(space: &'a SearchSpace, objective: &'a dyn Objective) -> Result<Self> {
        if let Some(expected) = objective.arity() {
            if expected != space.dimensions.len() {
                return Err(Error::Arity { expected, got: space.dimensions.len() });
            }
        }
        Ok(Self { objective, space, calls: AtomicU64::new(0) })
    }

    pub fn space(&self) -> &SearchSpace {
        self.space
    }

    /// Evaluates `coord`; non-finite responses come back as the worst value
    /// for the space's direction.
    pub fn evaluate(&self, coord: &Coordinate) -> Result<f64> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        if coord.0.len() != self.space.dimensions.len() {
            return Err(Error::Arity { expected: self.space.dimensions.len(), got: coord.0.len() });
        }
        let native = self.space.decode(coord);
        let psi = self.objective.evaluate(&native)?;
        Ok(self.space.direction.sanitize(psi))
    }

    pub fn evaluations(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

impl fmt::Debug for ObjectiveHandle<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveHandle").field("evaluations", &self.evaluations()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn unit(name: &str) -> Dimension {
        Dimension::continuous(name, 0.0, 1.0)
    }

    #[test]
    fn minimal_space_is_valid() {
        let space = SearchSpace::all_objective(vec![unit("x1")], Direction::Minimize).unwrap();
        assert!(validate_space(&space).is_ok());
    }

    #[test]
    fn overlapping_sets_rejected() {
        let mut fixed = BTreeMap::new();
        fixed.insert("x1".into(), 0.5);
        let err = SearchSpace::new(vec![unit("x1")], vec!["x1".into()], fixed, Direction::Minimize)
            .unwrap_err();
        assert_eq!(err, Error::OverlappingSets("x1".into()));
    }

    #[test]
    fn degenerate_interval_rejected() {
        let err = SearchSpace::all_objective(
            vec![Dimension::continuous("x1", 5.0, 5.0)],
            Direction::Minimize,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DomainError(_)));
    }

    #[test]
    fn other_invalid_spaces() {
        assert_eq!(
            SearchSpace::new(vec![unit("x1")], vec![], BTreeMap::new(), Direction::Minimize)
                .unwrap_err(),
            Error::EmptyObjectiveSet
        );
        let log = SearchSpace::all_objective(
            vec![Dimension::log10("c", 0.0, 10.0)],
            Direction::Minimize,
        );
        assert!(matches!(log, Err(Error::DomainError(_))));
        let cat = SearchSpace::all_objective(
            vec![Dimension::categorical("k", ["rbf"])],
            Direction::Minimize,
        );
        assert!(matches!(cat, Err(Error::DomainError(_))));
        let dup = SearchSpace::all_objective(
            vec![Dimension::categorical("k", ["rbf", "rbf"])],
            Direction::Minimize,
        );
        assert!(matches!(dup, Err(Error::DomainError(_))));
        let unassigned = SearchSpace::new(
            vec![unit("x1"), unit("x2")],
            vec!["x1".into()],
            BTreeMap::new(),
            Direction::Minimize,
        );
        assert_eq!(unassigned.unwrap_err(), Error::UnassignedDimension("x2".into()));
        let mut fixed = BTreeMap::new();
        fixed.insert("x2".into(), 3.0);
        let out_of_domain =
            SearchSpace::new(vec![unit("x1"), unit("x2")], vec!["x1".into()], fixed, Direction::Minimize);
        assert!(matches!(out_of_domain, Err(Error::DomainError(_))));
    }

    #[test]
    fn clamp_examples() {
        assert_eq!(clamp_to_domain(&unit("x"), 0.5).unwrap(), 0.5);
        assert_eq!(clamp_to_domain(&unit("x"), 1.7).unwrap(), 1.0);
        let ras = Dimension::continuous("x", -5.12, 5.12);
        assert_eq!(clamp_to_domain(&ras, -9.0).unwrap(), -5.12);
        let cat = Dimension::categorical("k", ["a", "b", "c"]);
        assert_eq!(clamp_to_domain(&cat, 2.0).unwrap(), 2.0);
        assert_eq!(
            clamp_to_domain(&cat, 3.0).unwrap_err(),
            Error::CategoryOutOfRange { index: 3, len: 3 }
        );
        assert!(clamp_to_domain(&cat, -1.0).is_err());
    }

    #[test]
    fn log_dimensions_work_in_exponent_space() {
        let c = Dimension::log10("c", 1e-2, 1e13);
        assert_eq!(c.bounds(), (-2.0, 13.0));
        assert_eq!(c.decode(3.0), 1000.0);
        assert_eq!(c.encode(100.0), 2.0);
    }

    #[test]
    fn fixed_values_pass_through() {
        let mut fixed = BTreeMap::new();
        fixed.insert("l3".into(), 0.7);
        let space = SearchSpace::new(
            vec![unit("l1"), unit("l2"), unit("l3")],
            vec!["l1".into(), "l2".into()],
            fixed,
            Direction::Minimize,
        )
        .unwrap();
        assert_eq!(space.base_coordinate().0, vec![0.0, 0.0, 0.7]);
        assert_eq!(space.objective_indices().unwrap(), vec![0, 1]);
    }

    #[test]
    fn handle_counts_and_sanitizes() {
        let space = SearchSpace::all_objective(vec![unit("x")], Direction::Minimize).unwrap();
        let f = |x: &[f64]| if x[0] > 0.5 { f64::NAN } else { x[0] };
        let handle = ObjectiveHandle::new(&space, &f).unwrap();
        assert_eq!(handle.evaluate(&Coordinate(vec![0.25])).unwrap(), 0.25);
        assert_eq!(handle.evaluate(&Coordinate(vec![0.75])).unwrap(), f64::INFINITY);
        assert!(handle.evaluate(&Coordinate(vec![0.1, 0.2])).is_err());
        assert_eq!(handle.evaluations(), 3);
    }

    #[test]
    fn maximize_worst_is_negative_infinity() {
        assert_eq!(Direction::Maximize.sanitize(f64::NAN), f64::NEG_INFINITY);
        assert_eq!(Direction::Maximize.best_index(&[0.6, 0.9, 0.8, 0.9]), Some(1));
        assert_eq!(Direction::Minimize.best_index(&[2.0, 2.0, 9.0]), Some(0));
        assert_eq!(Direction::Minimize.best_index(&[]), None);
    }

    #[test]
    fn query_children_move_primary_to_subsidiary() {
        let space = SearchSpace::all_objective(
            vec![unit("l1"), unit("l2"), unit("l3")],
            Direction::Minimize,
        )
        .unwrap();
        let root = Query::root(&space);
        assert!(root.subsidiary.is_empty());
        let child = root.child(vec!["l2".into()]);
        assert_eq!(child.subsidiary, vec![String::from("l1"), String::from("l3")]);
        assert!(child.validate(&space).is_ok());
    }
}

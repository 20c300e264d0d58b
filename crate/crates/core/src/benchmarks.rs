//! Analytic benchmark functions and a registry addressable by string key.
//!
//! Keys have the form `<family>-<d>d`, e.g. `rastrigin-6d`, `hartmann-3d`,
//! `styblinski_tang-10d`, `mae-6d`. `mixed-3d` is a small synthetic problem
//! with a linear, a log10 and a categorical dimension.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::domain::{Dimension, Direction, Objective, ObjectiveError, SearchSpace};
use crate::error::{Error, Result};

// Hartmann constants (Dixon & Szegő). The 4-D variant uses the first four
// columns of the 6-D matrices in the rescaled form of Picheny et al. (2013).
const HARTMANN_ALPHA: [f64; 4] = [1.0, 1.2, 3.0, 3.2];

const HARTMANN3_A: [[f64; 3]; 4] = [
    [3.0, 10.0, 30.0],
    [0.1, 10.0, 35.0],
    [3.0, 10.0, 30.0],
    [0.1, 10.0, 35.0],
];

const HARTMANN3_P: [[f64; 3]; 4] = [
    [0.3689, 0.1170, 0.2673],
    [0.4699, 0.4387, 0.7470],
    [0.1091, 0.8732, 0.5547],
    [0.0381, 0.5743, 0.8828],
];

const HARTMANN6_A: [[f64; 6]; 4] = [
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
];

const HARTMANN6_P: [[f64; 6]; 4] = [
    [0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886],
    [0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991],
    [0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650],
    [0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381],
];

// Minimisers refined numerically from the commonly quoted locations.
const HARTMANN3_ARGMIN: [f64; 3] = [0.1145888812, 0.5556488955, 0.8525469842];
const HARTMANN4_ARGMIN: [f64; 4] = [0.187395273, 0.1941515274, 0.5579177799, 0.2647796254];
const HARTMANN6_ARGMIN: [f64; 6] =
    [0.2016895091, 0.1500106935, 0.4768739729, 0.2753324275, 0.3116516172, 0.6573005346];

/// Per-coordinate minimiser of Styblinski-Tang.
pub const STYBLINSKI_TANG_ARGMIN: f64 = -2.9035340276;

/// Penalty per label of the `mixed` problem's categorical dimension.
const MIXED_PENALTY: [f64; 4] = [0.5, 0.0, 0.25, 1.0];
const MIXED_KERNELS: [&str; 4] = ["poly", "linear", "rbf", "sigmoid"];

fn check_domain(x: &[f64], lo: f64, hi: f64) -> Result<()> {
    match x.iter().find(|v| !(lo..=hi).contains(*v)) {
        Some(v) => Err(Error::DomainError(format!("{v} lies outside [{lo}, {hi}]"))),
        None => Ok(()),
    }
}

fn hartmann_sum<const D: usize>(x: &[f64], a: &[[f64; D]; 4], p: &[[f64; D]; 4]) -> f64 {
    (0..4)
        .map(|i| {
            let inner: f64 = (0..D).map(|j| a[i][j] * (x[j] - p[i][j]) * (x[j] - p[i][j])).sum();
            HARTMANN_ALPHA[i] * libm::exp(-inner)
        })
        .sum()
}

/// Hartmann function for `x.len()` in {3, 4, 6}, over `[0, 1]^d`.
pub fn hartmann(x: &[f64]) -> Result<f64> {
    check_domain(x, 0.0, 1.0)?;
    match x.len() {
        3 => Ok(-hartmann_sum(x, &HARTMANN3_A, &HARTMANN3_P)),
        4 => {
            let a: [[f64; 4]; 4] = HARTMANN6_A.map(|r| [r[0], r[1], r[2], r[3]]);
            let p: [[f64; 4]; 4] = HARTMANN6_P.map(|r| [r[0], r[1], r[2], r[3]]);
            Ok((1.1 - hartmann_sum(x, &a, &p)) / 0.839)
        }
        6 => Ok(-hartmann_sum(x, &HARTMANN6_A, &HARTMANN6_P)),
        d => Err(Error::DomainError(format!("Hartmann is defined for d in {{3, 4, 6}}, got {d}"))),
    }
}

/// `10 d + sum(x_i^2 - 10 cos(2 pi x_i))` over `[-5.12, 5.12]^d`.
pub fn rastrigin(x: &[f64]) -> Result<f64> {
    check_domain(x, -5.12, 5.12)?;
    Ok(10.0 * x.len() as f64 + x.iter().map(|&v| v * v - 10.0 * libm::cos(2.0 * PI * v)).sum::<f64>())
}

/// `0.5 * sum(x_i^4 - 16 x_i^2 + 5 x_i)` over `[-5, 5]^d`.
pub fn styblinski_tang(x: &[f64]) -> Result<f64> {
    check_domain(x, -5.0, 5.0)?;
    Ok(0.5 * x.iter().map(|&v| v * v * v * v - 16.0 * v * v + 5.0 * v).sum::<f64>())
}

/// Mean absolute deviation of `x` from the ground truth `chi`, over `[0, 100]^d`.
pub fn toy_mae(x: &[f64], chi: &[f64]) -> Result<f64> {
    if x.len() != chi.len() || x.is_empty() {
        return Err(Error::Arity { expected: chi.len(), got: x.len() });
    }
    check_domain(x, 0.0, 100.0)?;
    check_domain(chi, 0.0, 100.0)?;
    Ok(x.iter().zip(chi).map(|(a, b)| libm::fabs(a - b)).sum::<f64>() / x.len() as f64)
}

fn mixed(x: &[f64]) -> Result<f64> {
    if x.len() != 3 {
        return Err(Error::Arity { expected: 3, got: x.len() });
    }
    let (w, c, k) = (x[0], x[1], x[2]);
    if !(0.0..=1.0).contains(&w) || !(1e-2..=1e3).contains(&c) {
        return Err(Error::DomainError(format!("({w}, {c}) outside the mixed domain")));
    }
    let label = k as usize;
    if libm::floor(k) != k || k < 0.0 || label >= MIXED_PENALTY.len() {
        return Err(Error::CategoryOutOfRange { index: k as i64, len: MIXED_PENALTY.len() });
    }
    let e = (libm::log10(c) - 1.0) / 5.0;
    Ok((w - 0.3) * (w - 0.3) + e * e + MIXED_PENALTY[label])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Hartmann,
    Rastrigin,
    StyblinskiTang,
    Mae,
    Mixed,
}

impl Family {
    pub fn key(self) -> &'static str {
        match self {
            Family::Hartmann => "hartmann",
            Family::Rastrigin => "rastrigin",
            Family::StyblinskiTang => "styblinski_tang",
            Family::Mae => "mae",
            Family::Mixed => "mixed",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "hartmann" => Family::Hartmann,
            "rastrigin" => Family::Rastrigin,
            "styblinski_tang" | "styblinski-tang" => Family::StyblinskiTang,
            "mae" | "toy_mae" => Family::Mae,
            "mixed" => Family::Mixed,
            _ => return None,
        })
    }
}

/// A benchmark problem of fixed dimension, minimised over a box.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkFunction {
    pub key: String,
    pub family: Family,
    pub dimension: usize,
    pub domain: (f64, f64),
    pub known_optimum: f64,
    /// Native-unit minimiser. For `mae` it depends on the drawn ground truth.
    pub known_argmin: Option<Vec<f64>>,
}

impl BenchmarkFunction {
    pub fn new(family: Family, dimension: usize) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("{} is not available in {dimension}D", family.key()));
        let (domain, known_optimum, known_argmin) = match family {
            Family::Hartmann => match dimension {
                3 => ((0.0, 1.0), -3.86278, Some(HARTMANN3_ARGMIN.to_vec())),
                4 => ((0.0, 1.0), -3.135474, Some(HARTMANN4_ARGMIN.to_vec())),
                6 => ((0.0, 1.0), -3.32237, Some(HARTMANN6_ARGMIN.to_vec())),
                _ => return Err(bad()),
            },
            Family::Rastrigin if dimension >= 1 => ((-5.12, 5.12), 0.0, Some(vec![0.0; dimension])),
            Family::StyblinskiTang if dimension >= 1 => (
                (-5.0, 5.0),
                -39.16599 * dimension as f64,
                Some(vec![STYBLINSKI_TANG_ARGMIN; dimension]),
            ),
            Family::Mae if dimension >= 1 => ((0.0, 100.0), 0.0, None),
            Family::Mixed if dimension == 3 => ((0.0, 1.0), 0.0, Some(vec![0.3, 10.0, 1.0])),
            _ => return Err(bad()),
        };
        Ok(Self {
            key: format!("{}-{dimension}d", family.key()),
            family,
            dimension,
            domain,
            known_optimum,
            known_argmin,
        })
    }

    pub fn search_space(&self) -> SearchSpace {
        let dims = match self.family {
            Family::Mixed => vec![
                Dimension::continuous("w", 0.0, 1.0),
                Dimension::log10("c", 1e-2, 1e3),
                Dimension::categorical("kernel", MIXED_KERNELS),
            ],
            _ => (1..=self.dimension)
                .map(|i| Dimension::continuous(format!("x{i}"), self.domain.0, self.domain.1))
                .collect(),
        };
        SearchSpace::all_objective(dims, Direction::Minimize).expect("benchmark spaces are valid")
    }

    /// An evaluable instance; `mae` draws its ground truth from `rng`.
    pub fn instantiate<R: Rng + ?Sized>(&self, rng: &mut R) -> BenchmarkObjective {
        let chi = match self.family {
            Family::Mae => (0..self.dimension).map(|_| 100.0 * rng.random::<f64>()).collect(),
            _ => Vec::new(),
        };
        BenchmarkObjective { family: self.family, dimension: self.dimension, chi }
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if self.family == Family::Mae {
            return Err(Error::InvalidParameter(String::from("mae needs a ground truth; use instantiate")));
        }
        BenchmarkObjective { family: self.family, dimension: self.dimension, chi: Vec::new() }.value(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkObjective {
    pub family: Family,
    pub dimension: usize,
    pub chi: Vec<f64>,
}

impl BenchmarkObjective {
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dimension {
            return Err(Error::Arity { expected: self.dimension, got: x.len() });
        }
        match self.family {
            Family::Hartmann => hartmann(x),
            Family::Rastrigin => rastrigin(x),
            Family::StyblinskiTang => styblinski_tang(x),
            Family::Mae => toy_mae(x, &self.chi),
            Family::Mixed => mixed(x),
        }
    }
}

impl Objective for BenchmarkObjective {
    fn evaluate(&self, point: &[f64]) -> core::result::Result<f64, ObjectiveError> {
        self.value(point).map_err(|e| ObjectiveError::new(e.to_string()))
    }

    fn arity(&self) -> Option<usize> {
        Some(self.dimension)
    }
}

/// Resolves a key such as `rastrigin-6d`.
pub fn lookup(key: &str) -> Result<BenchmarkFunction> {
    let unknown = || Error::InvalidParameter(format!("unknown benchmark `{key}`"));
    let (family, dim) = key.rsplit_once('-').ok_or_else(unknown)?;
    let family = Family::parse(family).ok_or_else(unknown)?;
    let dim: usize = dim
        .strip_suffix(['d', 'D'])
        .and_then(|d| d.parse().ok())
        .ok_or_else(unknown)?;
    BenchmarkFunction::new(family, dim)
}

/// The benchmark set used by the function-optimisation experiments, plus
/// the mixed-type synthetic problem.
pub fn registry() -> Vec<BenchmarkFunction> {
    let table: [(Family, &[usize]); 5] = [
        (Family::Hartmann, &[3, 4, 6]),
        (Family::Rastrigin, &[3, 6, 10]),
        (Family::StyblinskiTang, &[3, 6, 10]),
        (Family::Mae, &[3, 6, 10]),
        (Family::Mixed, &[3]),
    ];
    table
        .iter()
        .flat_map(|(f, dims)| dims.iter().map(move |&d| BenchmarkFunction::new(*f, d).expect("registry entry")))
        .collect()
}

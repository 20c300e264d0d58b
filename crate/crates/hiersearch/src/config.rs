//! Experiment configuration, read from JSON.
//!
//! ```json
//! {
//!   "method": ["hiersearch", "random", "lhs"],
//!   "objective": "rastrigin-10d",
//!   "iterations": 10, "budget": 3, "connections": 2, "omega": 9, "delta": 2,
//!   "trials": 50, "master_seed": 7,
//!   "sweep": { "axis": "width", "values": [3, 4, 5, 6, 7, 8, 9, 10] }
//! }
//! ```
//!
//! Unknown keys are rejected. `objective` is a benchmark key or
//! `file:<path>` pointing at an external problem definition.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Hiersearch,
    Random,
    Lhs,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Hiersearch, Method::Random, Method::Lhs];

    pub fn name(self) -> &'static str {
        match self {
            Method::Hiersearch => "hiersearch",
            Method::Random => "random",
            Method::Lhs => "lhs",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hiersearch" => Ok(Method::Hiersearch),
            "random" => Ok(Method::Random),
            "lhs" => Ok(Method::Lhs),
            other => Err(HarnessError::config(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Methods {
    One(Method),
    Many(Vec<Method>),
}

impl Methods {
    pub fn to_vec(&self) -> Vec<Method> {
        match self {
            Methods::One(m) => vec![*m],
            Methods::Many(ms) => ms.clone(),
        }
    }
}

fn all_methods() -> Methods {
    Methods::Many(Method::ALL.to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Iterations,
    Budget,
    Width,
    Connections,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Iterations => "iterations",
            SweepAxis::Budget => "budget",
            SweepAxis::Width => "width",
            SweepAxis::Connections => "connections",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// Parameters of a single run. The slot width is `2^(-omega - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    pub iterations: usize,
    pub budget: usize,
    pub connections: usize,
    pub omega: f64,
    pub delta: f64,
}

/// Width exponent giving `eps = 2^-10`, used for benchmark functions.
pub const FUNCTION_OMEGA: f64 = 9.0;
/// Width exponent giving `eps = 2^-6`, the setting for model-tuning style runs.
pub const MODEL_OMEGA: f64 = 5.0;

impl Default for SearchParams {
    fn default() -> Self {
        Self { iterations: 10, budget: 3, connections: 2, omega: FUNCTION_OMEGA, delta: 2.0 }
    }
}

impl SearchParams {
    pub fn eps(&self) -> f64 {
        (-self.omega - 1.0).exp2()
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.budget < 1 {
            return Err(HarnessError::config("budget must be at least 1"));
        }
        if self.connections < 2 {
            return Err(HarnessError::config("connections must exceed 1"));
        }
        if !self.omega.is_finite() {
            return Err(HarnessError::config("omega must be finite"));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(HarnessError::config("delta must be positive"));
        }
        Ok(())
    }

    /// These parameters with one axis moved to `value`.
    pub fn with_axis(mut self, axis: SweepAxis, value: f64) -> Result<Self, HarnessError> {
        let count = |v: f64| -> Result<usize, HarnessError> {
            if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                Ok(v as usize)
            } else {
                Err(HarnessError::config(format!("{} sweep value {v} is not a non-negative integer", axis.name())))
            }
        };
        match axis {
            SweepAxis::Iterations => self.iterations = count(value)?,
            SweepAxis::Budget => self.budget = count(value)?,
            SweepAxis::Connections => self.connections = count(value)?,
            SweepAxis::Width => self.omega = value,
        }
        self.validate()?;
        Ok(self)
    }
}

fn default_trials() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "all_methods")]
    pub method: Methods,
    pub objective: String,
    #[serde(default = "defaults::iterations")]
    pub iterations: usize,
    #[serde(default = "defaults::budget")]
    pub budget: usize,
    #[serde(default = "defaults::connections")]
    pub connections: usize,
    #[serde(default = "defaults::omega")]
    pub omega: f64,
    #[serde(default = "defaults::delta")]
    pub delta: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
}

mod defaults {
    use super::SearchParams;

    pub fn iterations() -> usize {
        SearchParams::default().iterations
    }
    pub fn budget() -> usize {
        SearchParams::default().budget
    }
    pub fn connections() -> usize {
        SearchParams::default().connections
    }
    pub fn omega() -> f64 {
        SearchParams::default().omega
    }
    pub fn delta() -> f64 {
        SearchParams::default().delta
    }
}

impl ExperimentConfig {
    pub fn new(objective: impl Into<String>, methods: Vec<Method>, params: SearchParams, trials: usize, master_seed: u64) -> Self {
        Self {
            method: Methods::Many(methods),
            objective: objective.into(),
            iterations: params.iterations,
            budget: params.budget,
            connections: params.connections,
            omega: params.omega,
            delta: params.delta,
            trials,
            master_seed,
            sweep: None,
        }
    }

    pub fn with_sweep(mut self, axis: SweepAxis, values: Vec<f64>) -> Self {
        self.sweep = Some(Sweep { axis, values });
        self
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| HarnessError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn params(&self) -> SearchParams {
        SearchParams {
            iterations: self.iterations,
            budget: self.budget,
            connections: self.connections,
            omega: self.omega,
            delta: self.delta,
        }
    }

    pub fn methods(&self) -> Vec<Method> {
        self.method.to_vec()
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.trials < 1 {
            return Err(HarnessError::config("trials must be at least 1"));
        }
        if self.methods().is_empty() {
            return Err(HarnessError::config("at least one method is required"));
        }
        self.params().validate()?;
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(HarnessError::config("sweep values must not be empty"));
            }
            for &v in &sweep.values {
                self.params().with_axis(sweep.axis, v)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_function_settings() {
        let cfg = ExperimentConfig::from_json(r#"{"objective": "rastrigin-3d"}"#).unwrap();
        assert_eq!(cfg.params(), SearchParams::default());
        assert_eq!(cfg.params().eps(), 1.0 / 1024.0);
        assert_eq!(cfg.trials, 50);
        assert_eq!(cfg.methods(), Method::ALL.to_vec());
    }

    #[test]
    fn omega_maps_to_width() {
        let p = SearchParams { omega: MODEL_OMEGA, ..SearchParams::default() };
        assert_eq!(p.eps(), 1.0 / 64.0);
        let p = SearchParams { omega: 3.0, ..SearchParams::default() };
        assert_eq!(p.eps(), 1.0 / 16.0);
    }

    #[test]
    fn single_method_and_sweep() {
        let cfg = ExperimentConfig::from_json(
            r#"{"method": "lhs", "objective": "hartmann-6d", "sweep": {"axis": "width", "values": [3, 10]}}"#,
        )
        .unwrap();
        assert_eq!(cfg.methods(), vec![Method::Lhs]);
        assert_eq!(cfg.sweep.unwrap().axis, SweepAxis::Width);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            r#"{"objective": "rastrigin-3d", "bogus": 1}"#,
            r#"{"objective": "rastrigin-3d", "trials": 0}"#,
            r#"{"objective": "rastrigin-3d", "connections": 1}"#,
            r#"{"objective": "rastrigin-3d", "sweep": {"axis": "budget", "values": []}}"#,
            r#"{"objective": "rastrigin-3d", "sweep": {"axis": "budget", "values": [0]}}"#,
            r#"{"objective": "rastrigin-3d", "sweep": {"axis": "connections", "values": [2.5]}}"#,
            r#"{"objective": "rastrigin-3d", "method": "grid"}"#,
            r#"{"iterations": 3}"#,
        ] {
            let err = ExperimentConfig::from_json(text).unwrap_err();
            assert_eq!(err.exit_code(), 1, "{text}");
        }
    }
}

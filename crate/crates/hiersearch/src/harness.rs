//! Multi-trial experiments.
//!
//! Trial `t` of every method uses seed `master_seed + t`, so all methods see
//! the same problem instances. Summaries are ordered by axis value, then
//! method, independent of the order trials finish in.

use std::io::Write;

use hiersearch_core::baselines::{latin_hypercube_matched, random_search_matched};
use hiersearch_core::{
    build_hierarchy, tune, CapacityPolicy, Executor, Objective, RunReport, SearchSpace, Sequential,
    StopCriteria, TerminalDefaults,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, Method, SearchParams, SweepAxis};
use crate::error::HarnessError;
use crate::exec::ExecMode;
use crate::problem::Problem;

pub const CSV_HEADER: [&str; 7] = ["axis", "axis_value", "method", "mean_best", "std_error", "trials", "evals_per_trial"];

/// One run of `method` on `objective`.
pub fn run_method<E: Executor>(
    space: &SearchSpace,
    objective: &dyn Objective,
    method: Method,
    params: &SearchParams,
    seed: u64,
    exec: &E,
) -> Result<RunReport, HarnessError> {
    params.validate()?;
    let agents = space.objective.len();
    let report = match method {
        Method::Hiersearch => {
            let defaults = TerminalDefaults::uniform(params.budget, params.eps(), params.delta);
            let h = build_hierarchy(space, &CapacityPolicy::Uniform(params.connections), &defaults)?;
            tune(&h, space, objective, StopCriteria::iterations(params.iterations), seed, exec)?
        }
        Method::Random => {
            random_search_matched(space, objective, agents, params.budget, params.iterations, seed, exec)?
        }
        Method::Lhs => {
            latin_hypercube_matched(space, objective, agents, params.budget, params.iterations, seed, exec)?
        }
    };
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: Method,
    pub mean_best_psi: f64,
    /// Sample standard deviation over `sqrt(n_trials)`; zero for one trial.
    pub std_error: f64,
    pub n_trials: usize,
    pub evals_per_trial: u64,
    /// Final best value of every trial, in trial order.
    pub finals: Vec<f64>,
}

impl MethodSummary {
    pub fn from_finals(method: Method, finals: Vec<f64>, evals_per_trial: u64) -> Self {
        let (mean, se) = mean_and_std_error(&finals);
        Self { method, mean_best_psi: mean, std_error: se, n_trials: finals.len(), evals_per_trial, finals }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialSummary {
    pub axis: Option<SweepAxis>,
    pub axis_value: Option<f64>,
    pub methods: Vec<MethodSummary>,
}

impl TrialSummary {
    pub fn method(&self, method: Method) -> Option<&MethodSummary> {
        self.methods.iter().find(|m| m.method == method)
    }
}

pub fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

fn run_trials(
    problem: &Problem,
    space: &SearchSpace,
    method: Method,
    params: &SearchParams,
    cfg: &ExperimentConfig,
    mode: ExecMode,
) -> Result<MethodSummary, HarnessError> {
    let trial = |t: usize| -> Result<(f64, u64), HarnessError> {
        let seed = cfg.master_seed.wrapping_add(t as u64);
        let objective = problem.instantiate(seed);
        let report = run_method(space, objective.as_ref(), method, params, seed, &Sequential).map_err(|e| match e {
            HarnessError::Search(source) => HarnessError::Trial { method: method.name().into(), trial: t, source },
            other => other,
        })?;
        Ok((report.best_psi, report.evaluations_used))
    };
    let results: Vec<Result<(f64, u64), HarnessError>> = if mode.is_parallel() {
        (0..cfg.trials).into_par_iter().map(trial).collect()
    } else {
        (0..cfg.trials).map(trial).collect()
    };
    let mut finals = Vec::with_capacity(cfg.trials);
    let mut evals = None;
    for result in results {
        let (psi, used) = result?;
        match evals {
            None => evals = Some(used),
            Some(e) if e != used => {
                return Err(HarnessError::config(format!("`{method}` used {used} evaluations in one trial and {e} in another")))
            }
            _ => {}
        }
        finals.push(psi);
    }
    Ok(MethodSummary::from_finals(method, finals, evals.unwrap_or(0)))
}

/// Runs every (axis value, method, trial) combination of `cfg`.
pub fn run_experiment(cfg: &ExperimentConfig, mode: ExecMode) -> Result<Vec<TrialSummary>, HarnessError> {
    cfg.validate()?;
    let problem = Problem::resolve(&cfg.objective)?;
    let space = problem.space();
    let base = cfg.params();
    let points: Vec<(Option<SweepAxis>, Option<f64>, SearchParams)> = match &cfg.sweep {
        None => vec![(None, None, base)],
        Some(sweep) => sweep
            .values
            .iter()
            .map(|&v| Ok((Some(sweep.axis), Some(v), base.with_axis(sweep.axis, v)?)))
            .collect::<Result<_, HarnessError>>()?,
    };
    mode.install(|| {
        points
            .into_iter()
            .map(|(axis, axis_value, params)| {
                let methods = cfg
                    .methods()
                    .into_iter()
                    .map(|m| run_trials(&problem, &space, m, &params, cfg, mode))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(TrialSummary { axis, axis_value, methods })
            })
            .collect()
    })?
}

/// Writes summaries as CSV with the fixed header
/// `axis,axis_value,method,mean_best,std_error,trials,evals_per_trial`.
pub fn write_csv<W: Write>(summaries: &[TrialSummary], out: W) -> Result<(), HarnessError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for summary in summaries {
        let axis = summary.axis.map_or("none", SweepAxis::name);
        let value = summary.axis_value.map(|v| v.to_string()).unwrap_or_default();
        for m in &summary.methods {
            writer.write_record([
                axis.to_string(),
                value.clone(),
                m.method.to_string(),
                m.mean_best_psi.to_string(),
                m.std_error.to_string(),
                m.n_trials.to_string(),
                m.evals_per_trial.to_string(),
            ])?;
        }
    }
    writer.flush()?;
    Ok(())
}

//! Objectives addressable from the command line and configuration files.
//!
//! A problem is either a registry benchmark (`rastrigin-6d`) or an external
//! definition (`file:problem.json`):
//!
//! ```json
//! {
//!   "space": {
//!     "dimensions": [
//!       {"name": "c", "type": "continuous", "lo": 0.01, "hi": 1e13, "scale": "log10"},
//!       {"name": "kernel", "type": "categorical", "labels": ["poly", "linear", "rbf"]}
//!     ],
//!     "objective": ["c", "kernel"],
//!     "direction": "maximize"
//!   },
//!   "command": ["python3", "score.py"]
//! }
//! ```
//!
//! For every evaluation the command is started once, receives the native
//! parameter values on one whitespace-separated stdin line and must print the
//! response value as the first token of its stdout.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use hiersearch_core::benchmarks::{self, BenchmarkFunction};
use hiersearch_core::{rng, validate_space, Objective, ObjectiveError, SearchSpace};
use serde::Deserialize;

use crate::error::HarnessError;

/// Random stream reserved for per-trial problem instances (ground truths).
pub const INSTANCE_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalProblem {
    pub space: SearchSpace,
    pub command: Vec<String>,
    #[serde(skip)]
    pub workdir: Option<PathBuf>,
}

impl ExternalProblem {
    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::config(format!("cannot read {}: {e}", path.display())))?;
        let mut problem: Self = serde_json::from_str(&text)
            .map_err(|e| HarnessError::config(format!("{}: {e}", path.display())))?;
        validate_space(&problem.space).map_err(|e| HarnessError::config(format!("{}: {e}", path.display())))?;
        if problem.command.is_empty() {
            return Err(HarnessError::config(format!("{}: empty command", path.display())));
        }
        problem.workdir = path.parent().map(Path::to_path_buf);
        Ok(problem)
    }
}

#[derive(Debug, Clone)]
pub struct CommandObjective {
    command: Vec<String>,
    workdir: Option<PathBuf>,
}

impl Objective for CommandObjective {
    fn evaluate(&self, point: &[f64]) -> Result<f64, ObjectiveError> {
        let mut cmd = Command::new(&self.command[0]);
        cmd.args(&self.command[1..]).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::inherit());
        if let Some(dir) = self.workdir.as_ref().filter(|d| !d.as_os_str().is_empty()) {
            cmd.current_dir(dir);
        }
        let mut child = cmd
            .spawn()
            .map_err(|e| ObjectiveError::new(format!("cannot start `{}`: {e}", self.command[0])))?;
        let line: Vec<String> = point.iter().map(|v| v.to_string()).collect();
        {
            let mut stdin = child.stdin.take().expect("stdin is piped");
            writeln!(stdin, "{}", line.join(" ")).map_err(|e| ObjectiveError::new(e.to_string()))?;
        }
        let out = child.wait_with_output().map_err(|e| ObjectiveError::new(e.to_string()))?;
        if !out.status.success() {
            return Err(ObjectiveError::new(format!("`{}` exited with {}", self.command[0], out.status)));
        }
        let text = String::from_utf8_lossy(&out.stdout);
        text.split_whitespace()
            .next()
            .and_then(|t| t.parse::<f64>().ok())
            .ok_or_else(|| ObjectiveError::new(format!("unparsable response `{}`", text.trim())))
    }
}

#[derive(Debug, Clone)]
pub enum Problem {
    Benchmark(BenchmarkFunction),
    External(ExternalProblem),
}

impl Problem {
    pub fn resolve(key: &str) -> Result<Self, HarnessError> {
        match key.strip_prefix("file:") {
            Some(path) => Ok(Problem::External(ExternalProblem::from_file(Path::new(path))?)),
            None => benchmarks::lookup(key)
                .map(Problem::Benchmark)
                .map_err(|_| HarnessError::config(format!("unknown objective `{key}`; see `hiersearch bench list`"))),
        }
    }

    pub fn space(&self) -> SearchSpace {
        match self {
            Problem::Benchmark(b) => b.search_space(),
            Problem::External(e) => e.space.clone(),
        }
    }

    /// The objective for one trial. Problems with a random ground truth draw
    /// it from the trial seed.
    pub fn instantiate(&self, trial_seed: u64) -> Box<dyn Objective + Send> {
        match self {
            Problem::Benchmark(b) => Box::new(b.instantiate(&mut rng::stream(trial_seed, INSTANCE_STREAM))),
            Problem::External(e) => {
                Box::new(CommandObjective { command: e.command.clone(), workdir: e.workdir.clone() })
            }
        }
    }

    pub fn objective_count(&self) -> usize {
        match self {
            Problem::Benchmark(b) => b.search_space().objective.len(),
            Problem::External(e) => e.space.objective.len(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolves_benchmarks() {
        let p = Problem::resolve("rastrigin-6d").unwrap();
        assert_eq!(p.objective_count(), 6);
        assert_eq!(Problem::resolve("nope-3d").unwrap_err().exit_code(), 1);
        assert_eq!(Problem::resolve("file:/does/not/exist.json").unwrap_err().exit_code(), 1);
    }

    #[test]
    fn instances_are_seeded() {
        let p = Problem::resolve("mae-3d").unwrap();
        let x = [50.0, 50.0, 50.0];
        let a = p.instantiate(3).evaluate(&x).unwrap();
        let b = p.instantiate(3).evaluate(&x).unwrap();
        let c = p.instantiate(4).evaluate(&x).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}

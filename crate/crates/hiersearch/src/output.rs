//! Run reports, per-iteration traces and hierarchy dumps.

use std::io::Write;

use hiersearch_core::{DimensionKind, Hierarchy, RunReport, SearchSpace};
use serde_json::{json, Map, Value};

use crate::error::HarnessError;

/// Best configuration in native units, categorical values as labels.
pub fn best_params(space: &SearchSpace, report: &RunReport) -> Option<Map<String, Value>> {
    let coord = report.best_coord.as_ref()?;
    let native = space.decode(coord);
    let params = space
        .dimensions
        .iter()
        .zip(native)
        .map(|(dim, v)| {
            let value = match &dim.kind {
                DimensionKind::Categorical { labels } => json!(labels[v as usize]),
                _ => json!(v),
            };
            (dim.name.clone(), value)
        })
        .collect();
    Some(params)
}

/// The report as JSON, with a `best_params` object added.
pub fn report_json(space: &SearchSpace, report: &RunReport) -> Result<Value, HarnessError> {
    let mut value = serde_json::to_value(report)?;
    if let Value::Object(map) = &mut value {
        map.insert("best_params".into(), best_params(space, report).map_or(Value::Null, Value::Object));
    }
    Ok(value)
}

pub fn write_report<W: Write>(space: &SearchSpace, report: &RunReport, mut out: W) -> Result<(), HarnessError> {
    serde_json::to_writer_pretty(&mut out, &report_json(space, report)?)?;
    writeln!(out)?;
    Ok(())
}

/// One row per (iteration, agent): `iteration,best_psi,agent_id,agent_best_psi`.
pub fn write_trace<W: Write>(report: &RunReport, out: W) -> Result<(), HarnessError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["iteration", "best_psi", "agent_id", "agent_best_psi"])?;
    for it in &report.per_iteration {
        for (agent, psi) in it.per_agent_psis.iter().enumerate() {
            writer.write_record([
                it.iteration.to_string(),
                it.global_best_psi.to_string(),
                agent.to_string(),
                psi.to_string(),
            ])?;
        }
    }
    writer.flush()?;
    Ok(())
}

pub fn write_hierarchy<W: Write>(h: &Hierarchy, mut out: W) -> Result<(), HarnessError> {
    serde_json::to_writer_pretty(&mut out, h)?;
    writeln!(out)?;
    Ok(())
}

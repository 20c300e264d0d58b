//! The iterated collaborative loop.
//!
//! Each iteration every terminal agent samples around its start and reports
//! its best candidate; internal agents union their children's reports on the
//! way up, and the root broadcasts the overall best coordinate as the next
//! start of every terminal. Agents that could not improve on their start
//! widen their slots.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{validate_space, Coordinate, Direction, Objective, ObjectiveHandle, SearchSpace};
use crate::error::{Error, Result};
use crate::hierarchy::{AgentNode, Hierarchy};
use crate::rng;
use crate::sampler::{best_candidate, generate_candidates, select_best, update_width};

/// Runs per-agent work, possibly concurrently. Results come back in item order.
pub trait Executor: Sync {
    fn map_mut<S, T, F>(&self, items: &mut [S], f: F) -> Vec<T>
    where
        S: Send,
        T: Send,
        F: Fn(usize, &mut S) -> T + Sync + Send;
}

/// Runs agents one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map_mut<S, T, F>(&self, items: &mut [S], f: F) -> Vec<T>
    where
        S: Send,
        T: Send,
        F: Fn(usize, &mut S) -> T + Sync + Send,
    {
        items.iter_mut().enumerate().map(|(i, s)| f(i, s)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    pub dim_name: String,
    pub best_coord: Coordinate,
    pub best_psi: f64,
}

/// A start coordinate together with its already known response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartPoint {
    pub coord: Coordinate,
    pub psi: f64,
}

/// Next start of every terminal, keyed by the terminal's dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feedback {
    pub per_terminal: BTreeMap<String, StartPoint>,
}

impl Feedback {
    pub fn broadcast<'a, I>(names: I, start: StartPoint) -> Self
    where
        I: IntoIterator<Item = &'a String>,
    {
        Self { per_terminal: names.into_iter().map(|n| (n.clone(), start.clone())).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub iteration: usize,
    pub global_best_psi: f64,
    pub per_agent_psis: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub method: String,
    pub best_coord: Option<Coordinate>,
    pub best_psi: f64,
    pub per_iteration: Vec<IterationTrace>,
    /// Objective calls made by the search itself.
    pub evaluations_used: u64,
    /// Calls spent scoring the initial start.
    pub setup_evaluations: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopCriteria {
    pub max_iterations: usize,
    /// Stop early once the global best reaches this value.
    pub target: Option<f64>,
}

impl StopCriteria {
    pub fn iterations(max_iterations: usize) -> Self {
        Self { max_iterations, target: None }
    }

    fn reached(&self, direction: Direction, best: f64) -> bool {
        match self.target {
            Some(t) => best == t || direction.better(best, t),
            None => false,
        }
    }
}

/// A terminal agent's mutable state: its node (carrying the current widths),
/// its private random stream and whether it stagnated last iteration.
#[derive(Debug, Clone)]
pub struct TerminalAgent {
    pub index: usize,
    pub node: AgentNode,
    pub rng: ChaCha8Rng,
    pub stagnated: bool,
}

impl TerminalAgent {
    /// One agent per terminal of `h`, streams derived from `seed`.
    pub fn spawn_all(h: &Hierarchy, seed: u64) -> Vec<Self> {
        h.terminal_nodes()
            .enumerate()
            .map(|(index, node)| Self {
                index,
                node: node.clone(),
                rng: rng::agent_stream(seed, index),
                stagnated: false,
            })
            .collect()
    }

    pub fn dim_name(&self) -> &str {
        &self.node.primary[0]
    }

    fn step(&mut self, start: &StartPoint, objective: &ObjectiveHandle<'_>) -> Result<EvaluationRecord> {
        let space = objective.space();
        let mut cands = generate_candidates(&self.node, &start.coord, start.psi, space, &mut self.rng)?;
        cands.evaluate(objective)?;
        self.stagnated = best_candidate(&cands, space.direction) == 0;
        Ok(select_best(&cands, self.dim_name(), space.direction))
    }

    fn adapt(&mut self) {
        if let Some(cfg) = self.node.terminal.as_mut() {
            cfg.widths = update_width(&cfg.widths, self.stagnated);
        }
    }
}

fn uniform_coordinate<R: Rng + ?Sized>(space: &SearchSpace, rng: &mut R) -> Result<Coordinate> {
    let mut coord = space.base_coordinate();
    for i in space.objective_indices()? {
        let dim = &space.dimensions[i];
        let (lo, hi) = dim.bounds();
        let u: f64 = rng.random();
        coord[i] = dim.snap(lo + u * (hi - lo));
    }
    Ok(coord)
}

/// Draws the shared first start uniformly over the objective domains and
/// scores it once.
pub fn initial_feedback<R: Rng + ?Sized>(
    space: &SearchSpace,
    h: &Hierarchy,
    rng: &mut R,
    objective: &ObjectiveHandle<'_>,
) -> Result<Feedback> {
    let coord = uniform_coordinate(space, rng)?;
    let psi = objective.evaluate(&coord)?;
    Ok(Feedback::broadcast(h.terminal_nodes().map(|n| &n.primary[0]), StartPoint { coord, psi }))
}

fn collect(h: &Hierarchy, id: usize, by_node: &mut BTreeMap<usize, EvaluationRecord>, out: &mut Vec<EvaluationRecord>) {
    let node = h.node(id);
    if node.is_terminal() {
        if let Some(record) = by_node.remove(&id) {
            out.push(record);
        }
    } else {
        for &child in &node.children {
            collect(h, child, by_node, out);
        }
    }
}

/// Runs every terminal once from its feedback start and returns the union of
/// their records, in terminal order.
pub fn run_iteration<E: Executor>(
    h: &Hierarchy,
    agents: &mut [TerminalAgent],
    feedback: &Feedback,
    objective: &ObjectiveHandle<'_>,
    exec: &E,
) -> Result<Vec<EvaluationRecord>> {
    let results = exec.map_mut(agents, |_, agent| {
        let start = feedback
            .per_terminal
            .get(agent.dim_name())
            .ok_or_else(|| Error::UnknownDimension(String::from(agent.dim_name())))?;
        agent.step(start, objective).map(|r| (agent.node.id, r))
    });
    let mut by_node = BTreeMap::new();
    for result in results {
        let (id, record) = result?;
        by_node.insert(id, record);
    }
    let mut records = Vec::with_capacity(by_node.len());
    collect(h, h.root, &mut by_node, &mut records);
    Ok(records)
}

/// Broadcasts the best record's coordinate as every terminal's next start.
/// Ties go to the lowest terminal index.
pub fn prepare_feedback(records: &[EvaluationRecord], direction: Direction) -> Result<Feedback> {
    let psis: Vec<f64> = records.iter().map(|r| r.best_psi).collect();
    let best = direction
        .best_index(&psis)
        .ok_or_else(|| Error::InvalidParameter(String::from("no records to prepare feedback from")))?;
    let start = StartPoint { coord: records[best].best_coord.clone(), psi: records[best].best_psi };
    Ok(Feedback::broadcast(records.iter().map(|r| &r.dim_name), start))
}

/// Runs the collaborative search until the stop criteria hold.
pub fn tune<E: Executor>(
    h: &Hierarchy,
    space: &SearchSpace,
    objective: &dyn Objective,
    stop: StopCriteria,
    seed: u64,
    exec: &E,
) -> Result<RunReport> {
    validate_space(space)?;
    let handle = ObjectiveHandle::new(space, objective)?;
    let direction = space.direction;
    let mut setup_rng = rng::stream(seed, rng::SETUP_STREAM);
    let mut feedback = initial_feedback(space, h, &mut setup_rng, &handle)?;
    let setup_evaluations = handle.evaluations();
    let mut agents = TerminalAgent::spawn_all(h, seed);
    let mut per_iteration = Vec::with_capacity(stop.max_iterations);

    for iteration in 1..=stop.max_iterations {
        let records = run_iteration(h, &mut agents, &feedback, &handle, exec)?;
        feedback = prepare_feedback(&records, direction)?;
        for agent in agents.iter_mut() {
            agent.adapt();
        }
        let best = best_start(&feedback)?;
        per_iteration.push(IterationTrace {
            iteration,
            global_best_psi: best.psi,
            per_agent_psis: records.iter().map(|r| r.best_psi).collect(),
        });
        if stop.reached(direction, best.psi) {
            break;
        }
    }

    let best = best_start(&feedback)?.clone();
    Ok(RunReport {
        method: String::from("hiersearch"),
        best_coord: Some(best.coord),
        best_psi: best.psi,
        per_iteration,
        evaluations_used: handle.evaluations() - setup_evaluations,
        setup_evaluations,
    })
}

fn best_start(feedback: &Feedback) -> Result<&StartPoint> {
    feedback
        .per_terminal
        .values()
        .next()
        .ok_or_else(|| Error::InvalidParameter(String::from("feedback without terminals")))
}

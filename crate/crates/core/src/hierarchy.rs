//! Formation of the agent tree.
//!
//! Starting from the root query (every objective dimension primary, none
//! subsidiary), each agent owning more than one primary dimension splits its
//! primary set into `k = min(c, |primary|)` contiguous blocks and spawns one
//! child per block. Agents owning a single dimension are terminals.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::domain::{validate_space, Query, SearchSpace};
use crate::error::{Error, Result};

/// Per-dimension slot widths (`eps`) and their growth factors (`deltas`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthState {
    pub eps: BTreeMap<String, f64>,
    pub deltas: BTreeMap<String, f64>,
}

impl WidthState {
    pub fn uniform<'a, I>(names: I, eps: f64, delta: f64) -> Self
    where
        I: IntoIterator<Item = &'a String>,
    {
        let mut ws = Self { eps: BTreeMap::new(), deltas: BTreeMap::new() };
        for name in names {
            ws.eps.insert(name.clone(), eps);
            ws.deltas.insert(name.clone(), delta);
        }
        ws
    }

    pub fn eps(&self, name: &str) -> f64 {
        self.eps.get(name).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TerminalConfig {
    pub budget: usize,
    pub widths: WidthState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentKind {
    Internal,
    Terminal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentNode {
    pub id: usize,
    pub level: usize,
    pub kind: AgentKind,
    pub primary: Vec<String>,
    pub subsidiary: Vec<String>,
    pub capacity: usize,
    pub children: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub terminal: Option<TerminalConfig>,
}

impl AgentNode {
    pub fn is_terminal(&self) -> bool {
        self.kind == AgentKind::Terminal
    }
}

/// Nodes are stored in depth-first pre-order; `terminals` lists terminal ids
/// left to right, which is also objective-dimension order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hierarchy {
    pub nodes: Vec<AgentNode>,
    pub root: usize,
    pub terminals: Vec<usize>,
}

impl Hierarchy {
    pub fn node(&self, id: usize) -> &AgentNode {
        &self.nodes[id]
    }

    pub fn terminal_nodes(&self) -> impl Iterator<Item = &AgentNode> + '_ {
        self.terminals.iter().map(move |&id| &self.nodes[id])
    }

    pub fn terminal_mut(&mut self, index: usize) -> &mut AgentNode {
        let id = self.terminals[index];
        &mut self.nodes[id]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapacityOverride {
    pub level: usize,
    /// Position of the node among the nodes of its level, left to right.
    pub index: usize,
    pub capacity: usize,
}

/// How many children an agent may spawn, as a function of its place in the tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CapacityPolicy {
    Uniform(usize),
    Overrides { default: usize, overrides: Vec<CapacityOverride> },
}

impl CapacityPolicy {
    pub fn capacity(&self, level: usize, index: usize) -> usize {
        match self {
            CapacityPolicy::Uniform(c) => *c,
            CapacityPolicy::Overrides { default, overrides } => overrides
                .iter()
                .find(|o| o.level == level && o.index == index)
                .map_or(*default, |o| o.capacity),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminalDefaults {
    pub budget: usize,
    /// Initial width along the agent's own dimension.
    pub eps: f64,
    /// Initial width along every other objective dimension; `eps` when unset.
    pub subsidiary_eps: Option<f64>,
    pub delta: f64,
}

impl TerminalDefaults {
    pub fn uniform(budget: usize, eps: f64, delta: f64) -> Self {
        Self { budget, eps, subsidiary_eps: None, delta }
    }

    pub fn with_subsidiary_eps(mut self, eps: f64) -> Self {
        self.subsidiary_eps = Some(eps);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.budget < 1 {
            return Err(Error::InvalidParameter(String::from("budget must be at least 1")));
        }
        let sub = self.subsidiary_eps.unwrap_or(self.eps);
        if !(self.eps >= 0.0 && sub >= 0.0) || !self.eps.is_finite() || !sub.is_finite() {
            return Err(Error::InvalidParameter(String::from("slot widths must be finite and >= 0")));
        }
        if self.delta.is_nan() || self.delta <= 0.0 || !self.delta.is_finite() {
            return Err(Error::InvalidParameter(format!("delta must be > 0, got {}", self.delta)));
        }
        Ok(())
    }
}

/// The `index`-th (1-based) of `parts` contiguous blocks of `items`.
///
/// Block sizes differ by at most one, larger blocks first.
pub fn divide<T: Clone>(items: &[T], index: usize, parts: usize) -> Result<Vec<T>> {
    let len = items.len();
    if parts < 1 || parts > len || index < 1 || index > parts {
        return Err(Error::BadSplit { index, parts, len });
    }
    let base = len / parts;
    let extra = len % parts;
    let i = index - 1;
    let start = i * base + i.min(extra);
    let size = base + usize::from(i < extra);
    Ok(items[start..start + size].to_vec())
}

struct Builder<'a> {
    space: &'a SearchSpace,
    capacities: &'a CapacityPolicy,
    defaults: TerminalDefaults,
    nodes: Vec<AgentNode>,
    terminals: Vec<usize>,
    level_counts: Vec<usize>,
}

impl Builder<'_> {
    fn start(&mut self, query: Query, level: usize) -> Result<usize> {
        if self.level_counts.len() <= level {
            self.level_counts.push(0);
        }
        let position = self.level_counts[level];
        self.level_counts[level] += 1;
        let capacity = self.capacities.capacity(level, position);
        let id = self.nodes.len();

        // The query's subsidiary set, listed in objective order.
        let subsidiary: Vec<String> =
            self.space.objective.iter().filter(|n| query.subsidiary.contains(n)).cloned().collect();

        if query.primary.len() == 1 {
            let own = &query.primary[0];
            let mut widths =
                WidthState::uniform(self.space.objective.iter(), self.defaults.eps, self.defaults.delta);
            if let Some(sub) = self.defaults.subsidiary_eps {
                for name in &subsidiary {
                    widths.eps.insert(name.clone(), sub);
                }
            }
            widths.eps.insert(own.clone(), self.defaults.eps);
            self.nodes.push(AgentNode {
                id,
                level,
                kind: AgentKind::Terminal,
                primary: query.primary,
                subsidiary,
                capacity,
                children: Vec::new(),
                terminal: Some(TerminalConfig { budget: self.defaults.budget, widths }),
            });
            self.terminals.push(id);
            return Ok(id);
        }

        if capacity < 2 {
            return Err(Error::InvalidParameter(format!(
                "capacity of node at level {level}, position {position} must exceed 1, got {capacity}"
            )));
        }
        self.nodes.push(AgentNode {
            id,
            level,
            kind: AgentKind::Internal,
            primary: query.primary.clone(),
            subsidiary,
            capacity,
            children: Vec::new(),
            terminal: None,
        });
        let parts = capacity.min(query.primary.len());
        for i in 1..=parts {
            let block = divide(&query.primary, i, parts)?;
            let child = self.start(query.child(block), level + 1)?;
            self.nodes[id].children.push(child);
        }
        Ok(id)
    }
}

/// Builds the agent tree for the objective set of `space`.
pub fn build_hierarchy(
    space: &SearchSpace,
    capacities: &CapacityPolicy,
    defaults: &TerminalDefaults,
) -> Result<Hierarchy> {
    validate_space(space)?;
    defaults.validate()?;
    let mut builder = Builder {
        space,
        capacities,
        defaults: *defaults,
        nodes: Vec::new(),
        terminals: Vec::new(),
        level_counts: Vec::new(),
    };
    let root = builder.start(Query::root(space), 0)?;
    Ok(Hierarchy { nodes: builder.nodes, root, terminals: builder.terminals })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierarchyStats {
    pub depth: usize,
    pub total_nodes: usize,
    pub terminal_count: usize,
}

pub fn hierarchy_stats(h: &Hierarchy) -> HierarchyStats {
    HierarchyStats {
        depth: h.nodes.iter().map(|n| n.level).max().unwrap_or(0),
        total_nodes: h.nodes.len(),
        terminal_count: h.terminals.len(),
    }
}

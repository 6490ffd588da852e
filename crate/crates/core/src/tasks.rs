//! Coalition enumeration and HOG task construction.
//!
//! A task is a coalition of nodes running a heavy-output-generation circuit
//! at its optimal depth; each task carries the quantum volume it earns per
//! completion and the pairwise entanglement it consumes per unit rate.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::netmodel::{NetworkSpec, NodeId};

/// Sorted set of at least two nodes jointly running one task.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Coalition {
    members: Vec<NodeId>,
}

impl Coalition {
    /// Builds a coalition from members; sorts and rejects duplicates or
    /// fewer than two nodes.
    pub fn new(mut members: Vec<NodeId>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if members.len() < 2 {
            return Err(Error::InvalidParameter(
                "a coalition needs at least two distinct nodes".into(),
            ));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.members.binary_search(&n).is_ok()
    }

    /// Unordered member pairs in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = crate::netmodel::Pair> + '_ {
        let members = &self.members;
        (0..members.len()).flat_map(move |i| {
            (i + 1..members.len())
                .map(move |j| crate::netmodel::Pair::new(members[i], members[j]))
        })
    }
}

impl std::fmt::Display for Coalition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, n) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "}}")
    }
}

/// Volume base and optional taper threshold for the per-completion utility.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UtilityModel {
    pub beta: f64,
    pub taper_v0: Option<f64>,
}

impl UtilityModel {
    pub fn new(beta: f64) -> Result<Self> {
        Self::with_taper(beta, None)
    }

    pub fn with_taper(beta: f64, taper_v0: Option<f64>) -> Result<Self> {
        if !(beta > 1.0) || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "volume base beta = {beta} must be > 1"
            )));
        }
        if let Some(v0) = taper_v0 {
            if !(v0 > 0.0) || !v0.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "taper threshold v0 = {v0} must be positive"
                )));
            }
        }
        Ok(Self { beta, taper_v0 })
    }
}

/// Quantum volume of an `m`-node, depth-`d` task: `beta^min(m, d)`, tapered
/// to `v / (1 + v / v0)` when a taper threshold is set.
pub fn volume(m: usize, d: u32, u: &UtilityModel) -> f64 {
    let v = u.beta.powi(std::cmp::min(m as u32, d) as i32);
    match u.taper_v0 {
        Some(v0) => v / (1.0 + v / v0),
        None => v,
    }
}

/// Entanglement consumed per member pair per unit task-completion rate:
/// `2d/(m-1)` for even `m`, `2d/m` for odd `m`.
pub fn demand_coefficient(m: usize, d: u32) -> f64 {
    let d = d as f64;
    if m % 2 == 0 {
        2.0 * d / (m as f64 - 1.0)
    } else {
        2.0 * d / m as f64
    }
}

/// Depth maximizing utility per consumed entanglement, `volume(m, d) / d`,
/// over depths allowed by the gate-error budget `m * d <= 1/epsilon_eff`.
/// Ties break toward the smallest depth. `None` when no depth is feasible.
pub fn optimal_depth(m: usize, epsilon_eff: f64, u: &UtilityModel) -> Option<u32> {
    let d_max = if epsilon_eff == 0.0 {
        m as i64
    } else {
        let budget = (1.0 / (epsilon_eff * m as f64)).floor() as i64;
        std::cmp::min(m as i64, budget)
    };
    if d_max < 1 {
        return None;
    }
    // Strict improvement keeps the smallest depth on ties.
    let mut best = (1u32, volume(m, 1, u));
    for d in 2..=d_max as u32 {
        let ratio = volume(m, d, u) / d as f64;
        if ratio > best.1 {
            best = (d, ratio);
        }
    }
    Some(best.0)
}

/// A coalition with its chosen depth and precomputed coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskSpec {
    pub coalition: Coalition,
    pub depth: u32,
    /// Utility earned per task completion, `volume(m, depth)`.
    pub volume_coefficient: f64,
    /// Pair-rate consumed per unit completion rate on every member pair.
    pub demand_coefficient: f64,
}

/// Which subsets of the node set to consider as candidate coalitions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnumerationMode {
    /// Subsets inducing a connected subgraph of the physical graph.
    Connected,
    /// Every subset of size >= 2. Exponential; guarded above 20 nodes.
    All,
}

#[derive(Clone, Copy, Debug)]
pub struct EnumerationConfig {
    pub mode: EnumerationMode,
    /// Explicit coalition size cap; overrides the error-derived default.
    pub size_cap: Option<usize>,
    /// Apply the `floor(1/sqrt(epsilon_eff))` size cap when the gate error
    /// is positive. Pruned coalitions can never carry rate in an optimum.
    pub prune: bool,
    /// Allow `All` mode beyond the 20-node guard.
    pub force_all: bool,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        Self {
            mode: EnumerationMode::Connected,
            size_cap: None,
            prune: true,
            force_all: false,
        }
    }
}

impl EnumerationConfig {
    pub fn connected() -> Self {
        Self::default()
    }

    pub fn all() -> Self {
        Self {
            mode: EnumerationMode::All,
            ..Self::default()
        }
    }

    fn effective_cap(&self, net: &NetworkSpec) -> usize {
        let m = net.node_count();
        if let Some(cap) = self.size_cap {
            return cap.min(m);
        }
        let eps = net.epsilon_eff();
        if self.prune && eps > 0.0 {
            let cap = (1.0 / eps.sqrt()).floor() as usize;
            cap.min(m)
        } else {
            m
        }
    }
}

const ALL_MODE_NODE_LIMIT: usize = 20;

/// Lists candidate coalitions in deterministic order: by size, then by
/// lexicographic member order.
pub fn enumerate_coalitions(
    net: &NetworkSpec,
    cfg: &EnumerationConfig,
) -> Result<Vec<Coalition>> {
    let cap = cfg.effective_cap(net);
    if let Some(explicit) = cfg.size_cap {
        if explicit < 2 {
            return Err(Error::InvalidParameter(format!(
                "size cap {explicit} must be at least 2"
            )));
        }
    }
    let mut subsets = match cfg.mode {
        EnumerationMode::Connected => connected_subsets(net, cap),
        EnumerationMode::All => {
            if net.node_count() > ALL_MODE_NODE_LIMIT && !cfg.force_all {
                return Err(Error::SubsetBlowup {
                    nodes: net.node_count(),
                    limit: ALL_MODE_NODE_LIMIT,
                });
            }
            all_subsets(net.node_count(), cap)
        }
    };
    subsets.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    Ok(subsets
        .into_iter()
        .map(|members| Coalition {
            members: members.into_iter().map(NodeId).collect(),
        })
        .collect())
}

fn all_subsets(m: usize, cap: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn go(next: usize, m: usize, cap: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() >= 2 {
            out.push(current.clone());
        }
        if current.len() == cap {
            return;
        }
        for v in next..m {
            current.push(v);
            go(v + 1, m, cap, current, out);
            current.pop();
        }
    }
    go(0, m, cap.max(2), &mut current, &mut out);
    out
}

/// Enumerates vertex sets inducing connected subgraphs, each exactly once,
/// by growing from the minimum member through exclusive neighborhoods.
fn connected_subsets(net: &NetworkSpec, cap: usize) -> Vec<Vec<usize>> {
    let m = net.node_count();
    let cap = cap.max(2).min(m);
    let adj: Vec<Vec<usize>> = (0..m)
        .map(|v| {
            net.physical_neighbors(NodeId(v))
                .into_iter()
                .map(|n| n.0)
                .collect()
        })
        .collect();

    let mut out = Vec::new();
    let mut seen = vec![false; m]; // in sub, in extension, or discarded for this root

    fn grow(
        root: usize,
        sub: &mut Vec<usize>,
        ext: Vec<usize>,
        adj: &[Vec<usize>],
        cap: usize,
        seen: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) {
        if sub.len() >= 2 {
            let mut members = sub.clone();
            members.sort_unstable();
            out.push(members);
        }
        if sub.len() == cap {
            return;
        }
        let mut remaining = ext;
        while let Some(u) = remaining.pop() {
            let mut next_ext = remaining.clone();
            let mut newly_seen = Vec::new();
            for &w in &adj[u] {
                if w > root && !seen[w] {
                    seen[w] = true;
                    newly_seen.push(w);
                    next_ext.push(w);
                }
            }
            sub.push(u);
            grow(root, sub, next_ext, adj, cap, seen, out);
            sub.pop();
            for w in newly_seen {
                seen[w] = false;
            }
            // u stays marked seen: subsets without u are covered by the
            // remaining iterations, and re-adding it would duplicate.
        }
    }

    for root in 0..m {
        let mut sub = vec![root];
        seen[root] = true;
        let mut ext = Vec::new();
        for &w in &adj[root] {
            if w > root {
                seen[w] = true;
                ext.push(w);
            }
        }
        let ext_marks = ext.clone();
        grow(root, &mut sub, ext, &adj, cap, &mut seen, &mut out);
        seen[root] = false;
        for w in ext_marks {
            seen[w] = false;
        }
        // Entries discarded by `pop` during grow() are unmarked on unwind,
        // so `seen` is clean here for the next root.
        debug_assert!(seen.iter().all(|&s| !s));
    }
    out
}

/// One task per coalition, at its optimal depth; coalitions with no
/// error-feasible depth are dropped.
pub fn build_tasks(
    net: &NetworkSpec,
    coalitions: &[Coalition],
    u: &UtilityModel,
) -> Vec<TaskSpec> {
    coalitions
        .iter()
        .filter_map(|coalition| {
            let m = coalition.size();
            let depth = optimal_depth(m, net.epsilon_eff(), u)?;
            Some(TaskSpec {
                coalition: coalition.clone(),
                depth,
                volume_coefficient: volume(m, depth, u),
                demand_coefficient: demand_coefficient(m, depth),
            })
        })
        .collect()
}

//! Quantum network instances: node swap efficiencies, pairwise no-swap
//! entanglement rates, and the effective two-qubit gate error.
//!
//! Rates are entangled pairs per unit time throughout; the unit itself is
//! never interpreted by the code.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense node identifier in `[0, M)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Unordered node pair, stored with `lo < hi`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Pair {
    lo: NodeId,
    hi: NodeId,
}

impl Pair {
    /// Normalizes the order of the endpoints. Panics on a self-pair; use
    /// [`Pair::try_new`] for untrusted input.
    pub fn new(a: NodeId, b: NodeId) -> Self {
        Self::try_new(a, b).expect("self-pair")
    }

    pub fn try_new(a: NodeId, b: NodeId) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Pair { lo: a, hi: b }),
            std::cmp::Ordering::Greater => Some(Pair { lo: b, hi: a }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn lo(&self) -> NodeId {
        self.lo
    }

    pub fn hi(&self) -> NodeId {
        self.hi
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.lo == n || self.hi == n
    }

    /// The endpoint that is not `n`; panics if `n` is not an endpoint.
    pub fn other(&self, n: NodeId) -> NodeId {
        if self.lo == n {
            self.hi
        } else {
            assert_eq!(self.hi, n);
            self.lo
        }
    }
}

impl std::fmt::Display for Pair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// A quantum network instance: per-node swap efficiencies `q_c`, symmetric
/// no-swap rates `f_ab`, and the effective per-gate error probability.
///
/// Immutable after construction; share it freely across workers.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkSpec {
    swap_eff: Vec<f64>,
    rates: BTreeMap<Pair, f64>,
    epsilon_eff: f64,
    ebar: Option<f64>,
}

impl NetworkSpec {
    /// Builds a network from per-node swap efficiencies and unordered-pair
    /// rates. When `ebar` is given the effective gate error is fixed to
    /// `2 * ebar` and `epsilon_eff` must not be passed separately.
    pub fn new(
        swap_eff: Vec<f64>,
        rates: BTreeMap<Pair, f64>,
        epsilon_eff: f64,
    ) -> Result<Self> {
        Self::build(swap_eff, rates, epsilon_eff, None)
    }

    pub fn with_max_error(
        swap_eff: Vec<f64>,
        rates: BTreeMap<Pair, f64>,
        ebar: f64,
    ) -> Result<Self> {
        Self::build(swap_eff, rates, 2.0 * ebar, Some(ebar))
    }

    fn build(
        swap_eff: Vec<f64>,
        rates: BTreeMap<Pair, f64>,
        epsilon_eff: f64,
        ebar: Option<f64>,
    ) -> Result<Self> {
        if swap_eff.len() < 2 {
            return Err(Error::TooFewNodes {
                min: 2,
                got: swap_eff.len(),
            });
        }
        for (c, &q) in swap_eff.iter().enumerate() {
            if !(0.0..=1.0).contains(&q) || !q.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "swap efficiency q[{c}] = {q} outside [0, 1]"
                )));
            }
        }
        let m = swap_eff.len();
        for (&pair, &f) in &rates {
            if pair.hi.0 >= m {
                return Err(Error::UnknownNode(pair.hi));
            }
            if !(f >= 0.0) || !f.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "rate f{pair} = {f} must be finite and nonnegative"
                )));
            }
        }
        if !(epsilon_eff >= 0.0) || !epsilon_eff.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "epsilon_eff = {epsilon_eff} must be finite and nonnegative"
            )));
        }
        if let Some(e) = ebar {
            if !(e >= 0.0) || !e.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "ebar = {e} must be finite and nonnegative"
                )));
            }
        }
        Ok(Self {
            swap_eff,
            rates,
            epsilon_eff,
            ebar,
        })
    }

    /// Length-`m` repeater chain with homogeneous link rate `f` and swap
    /// efficiency `q` at every node.
    pub fn chain(m: usize, f: f64, q: f64, epsilon_eff: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::TooFewNodes { min: 2, got: m });
        }
        if !(f > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "chain link rate f = {f} must be positive"
            )));
        }
        let rates = (0..m - 1)
            .map(|i| (Pair::new(NodeId(i), NodeId(i + 1)), f))
            .collect();
        Self::new(vec![q; m], rates, epsilon_eff)
    }

    /// Dumbbell network: hubs 0 and 1 joined by the bar, `side` spokes on
    /// each hub. Total node count is `2 * side + 2`.
    pub fn dumbbell(
        side: usize,
        f_spoke: f64,
        f_bar: f64,
        q: f64,
        epsilon_eff: f64,
    ) -> Result<Self> {
        if side < 1 {
            return Err(Error::InvalidParameter(
                "dumbbell needs at least one spoke per side".into(),
            ));
        }
        if !(f_spoke > 0.0) || !(f_bar > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dumbbell rates must be positive, got spoke {f_spoke}, bar {f_bar}"
            )));
        }
        let m = 2 * side + 2;
        let mut rates = BTreeMap::new();
        rates.insert(Pair::new(NodeId(0), NodeId(1)), f_bar);
        for s in 0..side {
            rates.insert(Pair::new(NodeId(0), NodeId(2 + s)), f_spoke);
            rates.insert(Pair::new(NodeId(1), NodeId(2 + side + s)), f_spoke);
        }
        Self::new(vec![q; m], rates, epsilon_eff)
    }

    /// Replaces `node` with `copies` virtual nodes joined pairwise by local
    /// links of rate `local_rate`. The original id keeps the node's external
    /// links; the extra copies get fresh ids at the end of the range. Every
    /// copy inherits the parent's swap efficiency.
    pub fn split_node(&self, node: NodeId, copies: usize, local_rate: f64) -> Result<Self> {
        if node.0 >= self.node_count() {
            return Err(Error::UnknownNode(node));
        }
        if copies < 2 {
            return Err(Error::InvalidParameter(format!(
                "split needs at least 2 copies, got {copies}"
            )));
        }
        if !(local_rate > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "local link rate {local_rate} must be positive"
            )));
        }
        let m = self.node_count();
        let mut swap_eff = self.swap_eff.clone();
        swap_eff.extend(std::iter::repeat(self.swap_eff[node.0]).take(copies - 1));
        let mut rates = self.rates.clone();
        let virtuals: Vec<NodeId> = std::iter::once(node)
            .chain((0..copies - 1).map(|k| NodeId(m + k)))
            .collect();
        for i in 0..virtuals.len() {
            for j in i + 1..virtuals.len() {
                rates.insert(Pair::new(virtuals[i], virtuals[j]), local_rate);
            }
        }
        Self::build(swap_eff, rates, self.epsilon_eff, self.ebar)
    }

    pub fn node_count(&self) -> usize {
        self.swap_eff.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_count()).map(NodeId)
    }

    pub fn swap_eff(&self, c: NodeId) -> f64 {
        self.swap_eff[c.0]
    }

    pub fn epsilon_eff(&self) -> f64 {
        self.epsilon_eff
    }

    pub fn max_error_ebar(&self) -> Option<f64> {
        self.ebar
    }

    /// No-swap rate `f_ab`; zero for pairs without a physical link.
    pub fn rate(&self, pair: Pair) -> f64 {
        self.rates.get(&pair).copied().unwrap_or(0.0)
    }

    /// Physical links, i.e. pairs with `f_ab > 0`, in deterministic order.
    pub fn links(&self) -> impl Iterator<Item = (Pair, f64)> + '_ {
        self.rates
            .iter()
            .filter(|(_, &f)| f > 0.0)
            .map(|(&p, &f)| (p, f))
    }

    /// All unordered node pairs in deterministic (lexicographic) order.
    pub fn pairs(&self) -> impl Iterator<Item = Pair> + '_ {
        let m = self.node_count();
        (0..m).flat_map(move |a| (a + 1..m).map(move |b| Pair::new(NodeId(a), NodeId(b))))
    }

    pub fn is_physical_edge(&self, pair: Pair) -> bool {
        self.rate(pair) > 0.0
    }

    pub fn physical_neighbors(&self, n: NodeId) -> Vec<NodeId> {
        self.nodes()
            .filter(|&other| other != n && self.is_physical_edge(Pair::new(n, other)))
            .collect()
    }

    /// Copy of the network with every no-swap rate scaled by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        let rates = self.rates.iter().map(|(&p, &f)| (p, lambda * f)).collect();
        Self::build(
            self.swap_eff.clone(),
            rates,
            self.epsilon_eff,
            self.ebar,
        )
    }

    /// Copy of the network with a different effective gate error.
    pub fn with_epsilon(&self, epsilon_eff: f64) -> Result<Self> {
        Self::build(self.swap_eff.clone(), self.rates.clone(), epsilon_eff, None)
    }
}

#[derive(Serialize, Deserialize)]
struct NodeEntry {
    id: usize,
    q: f64,
}

#[derive(Serialize, Deserialize)]
struct LinkEntry {
    a: usize,
    b: usize,
    rate: f64,
}

/// On-disk network document: `nodes: [{id, q}]`, `links: [{a, b, rate}]`,
/// and either `epsilon_eff` or `ebar`.
#[derive(Serialize, Deserialize)]
struct NetworkFile {
    nodes: Vec<NodeEntry>,
    links: Vec<LinkEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon_eff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ebar: Option<f64>,
}

pub fn save_network(net: &NetworkSpec, path: impl AsRef<Path>) -> Result<()> {
    let doc = NetworkFile {
        nodes: net
            .nodes()
            .map(|n| NodeEntry {
                id: n.0,
                q: net.swap_eff(n),
            })
            .collect(),
        links: net
            .rates
            .iter()
            .map(|(p, &rate)| LinkEntry {
                a: p.lo.0,
                b: p.hi.0,
                rate,
            })
            .collect(),
        epsilon_eff: if net.ebar.is_none() {
            Some(net.epsilon_eff)
        } else {
            None
        },
        ebar: net.ebar,
    };
    let text = serde_json::to_string_pretty(&doc)?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_network(path: impl AsRef<Path>) -> Result<NetworkSpec> {
    let text = std::fs::read_to_string(path)?;
    let doc: NetworkFile = serde_json::from_str(&text)?;
    let m = doc.nodes.len();
    let mut swap_eff = vec![f64::NAN; m];
    for entry in &doc.nodes {
        if entry.id >= m {
            return Err(Error::MalformedNetwork(format!(
                "node ids must be 0..{m}, got {}",
                entry.id
            )));
        }
        if !swap_eff[entry.id].is_nan() {
            return Err(Error::MalformedNetwork(format!(
                "duplicate node id {}",
                entry.id
            )));
        }
        swap_eff[entry.id] = entry.q;
    }
    let mut rates = BTreeMap::new();
    for link in &doc.links {
        if link.a >= m {
            return Err(Error::UnknownNode(NodeId(link.a)));
        }
        if link.b >= m {
            return Err(Error::UnknownNode(NodeId(link.b)));
        }
        let pair = Pair::try_new(NodeId(link.a), NodeId(link.b)).ok_or_else(|| {
            Error::MalformedNetwork(format!("self-link on node {}", link.a))
        })?;
        if rates.insert(pair, link.rate).is_some() {
            return Err(Error::DuplicateLink {
                a: pair.lo.0,
                b: pair.hi.0,
            });
        }
    }
    match (doc.epsilon_eff, doc.ebar) {
        (Some(_), Some(_)) => Err(Error::MalformedNetwork(
            "give either epsilon_eff or ebar, not both".into(),
        )),
        (None, None) => Err(Error::MalformedNetwork(
            "missing epsilon_eff (or ebar)".into(),
        )),
        (Some(eps), None) => NetworkSpec::new(swap_eff, rates, eps),
        (None, Some(ebar)) => NetworkSpec::with_max_error(swap_eff, rates, ebar),
    }
}

//! The entanglement-swap rate region as linear constraints.
//!
//! One flow variable `w` exists per (produced pair, swap node); a swap at
//! node `c` consumes one `(a, c)` and one `(c, b)` pair and produces `(a, b)`
//! pairs at efficiency `q_c`. Keeping a single variable per (pair, swap)
//! builds the pairwise symmetry of the two consumed flows directly into the
//! representation.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, LpStatus, Sense, Tolerances};
use crate::netmodel::{NetworkSpec, NodeId, Pair};
use crate::tasks::{volume, UtilityModel};

/// Rate of entanglement swaps at `swap_node` producing `pair`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwapFlow {
    pub pair: Pair,
    pub swap_node: NodeId,
    pub rate: f64,
}

/// Nonnegative pairwise entanglement rates `r_ab`; absent entries are zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RateVector {
    rates: BTreeMap<Pair, f64>,
}

impl RateVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, pair: Pair) -> f64 {
        self.rates.get(&pair).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, pair: Pair, rate: f64) -> Result<()> {
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "rate r{pair} = {rate} must be finite and nonnegative"
            )));
        }
        if rate == 0.0 {
            self.rates.remove(&pair);
        } else {
            self.rates.insert(pair, rate);
        }
        Ok(())
    }

    /// Nonzero entries in deterministic order.
    pub fn iter(&self) -> impl Iterator<Item = (Pair, f64)> + '_ {
        self.rates.iter().map(|(&p, &r)| (p, r))
    }

    pub fn support_len(&self) -> usize {
        self.rates.len()
    }

    pub fn max_rate(&self) -> f64 {
        self.rates.values().cloned().fold(0.0, f64::max)
    }
}

impl FromIterator<(Pair, f64)> for RateVector {
    fn from_iter<T: IntoIterator<Item = (Pair, f64)>>(iter: T) -> Self {
        let mut v = RateVector::new();
        for (p, r) in iter {
            v.set(p, r).expect("invalid rate");
        }
        v
    }
}

/// Conservation rows of the swap rate region for one network: for every
/// unordered pair, consumed rate is bounded by the no-swap rate plus swap
/// production minus swap consumption.
#[derive(Clone, Debug)]
pub struct RateConstraintSet {
    pairs: Vec<Pair>,
    pair_pos: BTreeMap<Pair, usize>,
    flows: Vec<(Pair, NodeId)>,
    /// Per-pair no-swap rate, aligned with `pairs`.
    noswap: Vec<f64>,
    /// Per-pair sparse flow coefficients on the inequality's left side,
    /// aligned with `pairs`: production enters at `-q_c`, consumption at +1.
    flow_coeffs: Vec<Vec<(usize, f64)>>,
}

/// Lays out pairs and flow variables and precomputes the conservation rows.
pub fn build_rate_constraints(net: &NetworkSpec) -> RateConstraintSet {
    let pairs: Vec<Pair> = net.pairs().collect();
    let pair_pos: BTreeMap<Pair, usize> =
        pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut flows = Vec::new();
    for &pair in &pairs {
        for c in net.nodes() {
            if !pair.contains(c) {
                flows.push((pair, c));
            }
        }
    }
    let mut flow_coeffs: Vec<Vec<(usize, f64)>> = vec![Vec::new(); pairs.len()];
    for (k, &(pair, c)) in flows.iter().enumerate() {
        flow_coeffs[pair_pos[&pair]].push((k, -net.swap_eff(c)));
        let consumed_a = Pair::new(pair.lo(), c);
        let consumed_b = Pair::new(pair.hi(), c);
        flow_coeffs[pair_pos[&consumed_a]].push((k, 1.0));
        flow_coeffs[pair_pos[&consumed_b]].push((k, 1.0));
    }
    let noswap = pairs.iter().map(|&p| net.rate(p)).collect();
    RateConstraintSet {
        pairs,
        pair_pos,
        flows,
        noswap,
        flow_coeffs,
    }
}

impl RateConstraintSet {
    pub fn num_pairs(&self) -> usize {
        self.pairs.len()
    }

    pub fn num_flows(&self) -> usize {
        self.flows.len()
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn flows(&self) -> &[(Pair, NodeId)] {
        &self.flows
    }

    pub fn pair_pos(&self, pair: Pair) -> Option<usize> {
        self.pair_pos.get(&pair).copied()
    }

    /// Appends one `<=` row per pair to `lp`, with rate variables starting
    /// at `r_offset` and flow variables at `w_offset`.
    pub fn add_region_rows(&self, lp: &mut LinearProgram, r_offset: usize, w_offset: usize) {
        for (i, coeffs) in self.flow_coeffs.iter().enumerate() {
            let row = std::iter::once((r_offset + i, 1.0))
                .chain(coeffs.iter().map(|&(k, c)| (w_offset + k, c)));
            lp.add_row(row, Sense::Le, self.noswap[i]);
        }
    }
}

/// Outcome of a rate-vector membership query.
#[derive(Clone, Debug)]
pub struct Feasibility {
    pub feasible: bool,
    /// Smallest uniform slack that makes the vector sustainable; zero (up
    /// to solver precision) inside the region.
    pub max_violation: f64,
    /// Flows sustaining the vector, present when feasible.
    pub witness: Option<Vec<SwapFlow>>,
}

/// Tests whether `rates` lies in the swap rate region by minimizing the
/// uniform constraint violation over all flow assignments. Solver failures
/// surface as errors, never as "infeasible".
pub fn check_feasible(net: &NetworkSpec, rates: &RateVector, tol: f64) -> Result<Feasibility> {
    for (pair, _) in rates.iter() {
        if pair.hi().0 >= net.node_count() {
            return Err(Error::UnknownNode(pair.hi()));
        }
    }
    let region = build_rate_constraints(net);
    let num_flows = region.num_flows();
    let slack_var = num_flows;
    let mut lp = LinearProgram::new(num_flows + 1);
    lp.set_objective(slack_var, -1.0);
    for (i, coeffs) in region.flow_coeffs.iter().enumerate() {
        // production - consumption + slack >= r - f
        let row = coeffs
            .iter()
            .map(|&(k, c)| (k, -c))
            .chain(std::iter::once((slack_var, 1.0)));
        lp.add_row(
            row,
            Sense::Ge,
            rates.get(region.pairs[i]) - region.noswap[i],
        );
    }
    let sol = lp::solve(&lp, &Tolerances::default());
    if sol.status != LpStatus::Optimal {
        return Err(Error::SolverFailure(format!(
            "feasibility solve ended with status {}",
            sol.status
        )));
    }
    let violation = sol.primal[slack_var].max(0.0);
    let feasible = violation <= tol;
    let witness = feasible.then(|| {
        region
            .flows
            .iter()
            .zip(&sol.primal)
            .filter(|(_, &w)| w > 0.0)
            .map(|(&(pair, swap_node), &rate)| SwapFlow {
                pair,
                swap_node,
                rate,
            })
            .collect()
    });
    Ok(Feasibility {
        feasible,
        max_violation: violation,
        witness,
    })
}

/// Aggregate utility with no entanglement swaps: each physical link runs
/// the best two-node task at link-saturating rate.
pub fn noswap_utility(net: &NetworkSpec, u: &UtilityModel) -> f64 {
    let factor = best_link_factor(net.epsilon_eff(), u);
    net.links().map(|(_, f)| f * factor).sum()
}

/// Utility per unit link rate of a saturated two-node task. The volume of a
/// two-node task is flat beyond depth 2, so only depths 1 and 2 compete.
fn best_link_factor(epsilon_eff: f64, u: &UtilityModel) -> f64 {
    let d_budget = if epsilon_eff > 0.0 {
        (1.0 / (2.0 * epsilon_eff)).floor() as i64
    } else {
        2
    };
    (1..=d_budget.min(2))
        .map(|d| volume(2, d as u32, u) / (2.0 * d as f64))
        .fold(0.0, f64::max)
}

/// Diverts rate `r` from the end-to-end pair `(l, j)` onto the two segment
/// pairs `(l, k)` and `(k, j)` around an intermediate chain position `k`.
/// On a chain this never leaves the rate region.
pub fn reroute_rate(
    rates: &RateVector,
    l: NodeId,
    k: NodeId,
    j: NodeId,
    r: f64,
) -> Result<RateVector> {
    if !(l < k && k < j) {
        return Err(Error::InvalidParameter(format!(
            "need l < k < j, got {l}, {k}, {j}"
        )));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "rerouted rate {r} must be finite and nonnegative"
        )));
    }
    let long = Pair::new(l, j);
    let available = rates.get(long);
    if r > available {
        return Err(Error::RateExceeded { r, available });
    }
    let mut out = rates.clone();
    out.set(long, available - r)?;
    let left = Pair::new(l, k);
    let right = Pair::new(k, j);
    out.set(left, rates.get(left) + r)?;
    out.set(right, rates.get(right) + r)?;
    Ok(out)
}

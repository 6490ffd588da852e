//! End-to-end utility computation: assemble the task/rate/flow linear
//! program for a network, solve it, and extract task rates, the consumed
//! entanglement graph, and coalition-size statistics, plus closed-form
//! bounds on the largest active coalition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, LpStatus, Sense, Tolerances};
use crate::netmodel::{NetworkSpec, Pair};
use crate::rate_region::{
    build_rate_constraints, noswap_utility, RateConstraintSet, RateVector, SwapFlow,
};
use crate::tasks::{build_tasks, enumerate_coalitions, EnumerationConfig, TaskSpec, UtilityModel};

/// Task rates smaller than this are reported as zero; LP degeneracy can
/// leave dust-level rates on inactive tasks.
pub const ACTIVE_RATE_THRESHOLD: f64 = 1e-8;

/// The assembled linear program together with its variable layout:
/// task rates first, then pair rates, then swap flows.
pub struct AssembledProblem {
    pub lp: LinearProgram,
    pub region: RateConstraintSet,
    pub num_tasks: usize,
}

impl AssembledProblem {
    pub fn task_var(&self, i: usize) -> usize {
        i
    }

    pub fn rate_var(&self, pair: Pair) -> Option<usize> {
        Some(self.num_tasks + self.region.pair_pos(pair)?)
    }

    fn rate_offset(&self) -> usize {
        self.num_tasks
    }

    fn flow_offset(&self) -> usize {
        self.num_tasks + self.region.num_pairs()
    }
}

/// Builds the maximization program: utility objective over task rates,
/// one demand-balance equality per pair, and the swap rate region rows.
/// Tasks must already be filtered for gate-error feasibility.
pub fn assemble(net: &NetworkSpec, tasks: &[TaskSpec]) -> AssembledProblem {
    let region = build_rate_constraints(net);
    let num_tasks = tasks.len();
    let rate_offset = num_tasks;
    let flow_offset = num_tasks + region.num_pairs();
    let mut lp = LinearProgram::new(flow_offset + region.num_flows());
    for (i, task) in tasks.iter().enumerate() {
        lp.set_objective(i, task.volume_coefficient);
    }
    // r_ab - sum_i demand_i * p_i = 0 for every pair.
    let mut demand_rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); region.num_pairs()];
    for (i, task) in tasks.iter().enumerate() {
        for pair in task.coalition.pairs() {
            let pos = region
                .pair_pos(pair)
                .expect("coalition pair outside network");
            demand_rows[pos].push((i, -task.demand_coefficient));
        }
    }
    for (pos, row) in demand_rows.into_iter().enumerate() {
        let coeffs = std::iter::once((rate_offset + pos, 1.0)).chain(row);
        lp.add_row(coeffs, Sense::Eq, 0.0);
    }
    region.add_region_rows(&mut lp, rate_offset, flow_offset);
    AssembledProblem {
        lp,
        region,
        num_tasks,
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolveDiagnostics {
    pub status: LpStatus,
    pub iterations: u64,
    /// Largest constraint residual of the accepted primal point.
    pub max_residual: f64,
}

/// Optimal utility allocation for one network.
#[derive(Clone, Debug)]
pub struct UtilityResult {
    /// Optimal aggregate utility rate.
    pub utility: f64,
    /// Every candidate task with its optimal rate; dust below
    /// [`ACTIVE_RATE_THRESHOLD`] is reported as zero.
    pub task_rates: Vec<(TaskSpec, f64)>,
    /// Consumed pairwise entanglement in the optimal solution.
    pub entanglement: RateVector,
    /// Active swap flows sustaining the consumed rates.
    pub flows: Vec<SwapFlow>,
    /// Aggregate utility with swapping disabled, for normalization.
    pub noswap_baseline: f64,
    pub diagnostics: SolveDiagnostics,
}

impl UtilityResult {
    pub fn ratio_to_noswap(&self) -> f64 {
        if self.noswap_baseline > 0.0 {
            self.utility / self.noswap_baseline
        } else if self.utility == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    }
}

/// Enumerates coalitions, builds tasks, assembles and solves the program.
pub fn compute_utility(
    net: &NetworkSpec,
    u: &UtilityModel,
    cfg: &EnumerationConfig,
) -> Result<UtilityResult> {
    let coalitions = enumerate_coalitions(net, cfg)?;
    let tasks = build_tasks(net, &coalitions, u);
    let problem = assemble(net, &tasks);
    let sol = lp::solve(&problem.lp, &Tolerances::default());
    if sol.status != LpStatus::Optimal {
        return Err(Error::SolverFailure(format!(
            "utility solve ended with status {}",
            sol.status
        )));
    }
    let report = lp::verify(&problem.lp, &sol.primal)?;
    let task_rates: Vec<(TaskSpec, f64)> = tasks
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            let p = sol.primal[i];
            (t, if p < ACTIVE_RATE_THRESHOLD { 0.0 } else { p })
        })
        .collect();
    let mut entanglement = RateVector::new();
    for (pos, &pair) in problem.region.pairs().iter().enumerate() {
        let r = sol.primal[problem.rate_offset() + pos];
        if r > 0.0 {
            entanglement.set(pair, r)?;
        }
    }
    let flows = problem
        .region
        .flows()
        .iter()
        .enumerate()
        .filter_map(|(k, &(pair, swap_node))| {
            let rate = sol.primal[problem.flow_offset() + k];
            (rate > 0.0).then_some(SwapFlow {
                pair,
                swap_node,
                rate,
            })
        })
        .collect();
    Ok(UtilityResult {
        utility: sol.objective,
        task_rates,
        entanglement,
        flows,
        noswap_baseline: noswap_utility(net, u),
        diagnostics: SolveDiagnostics {
            status: sol.status,
            iterations: sol.iterations,
            max_residual: report.max_row_residual.max(report.max_bound_violation),
        },
    })
}

/// Size of the largest coalition whose task rate exceeds `threshold`;
/// zero when no task is active.
pub fn max_active_coalition_size(result: &UtilityResult, threshold: f64) -> usize {
    result
        .task_rates
        .iter()
        .filter(|(_, p)| *p > threshold)
        .map(|(t, _)| t.coalition.size())
        .max()
        .unwrap_or(0)
}

/// Consumed entanglement rates with support-level derived views.
#[derive(Clone, Debug)]
pub struct EntanglementGraph {
    rates: RateVector,
    threshold: f64,
}

impl EntanglementGraph {
    pub fn new(rates: RateVector, threshold: f64) -> Self {
        Self { rates, threshold }
    }

    pub fn from_result(result: &UtilityResult) -> Self {
        Self::new(result.entanglement.clone(), ACTIVE_RATE_THRESHOLD)
    }

    /// Edges with rate above the support threshold, deterministic order.
    pub fn support(&self) -> Vec<(Pair, f64)> {
        self.rates
            .iter()
            .filter(|(_, r)| *r > self.threshold)
            .collect()
    }

    /// Largest edge rate, used to normalize rendering intensities.
    pub fn max_rate(&self) -> f64 {
        self.rates.max_rate()
    }

    /// True when the support touches every pair of the `m`-node network.
    pub fn is_fully_connected(&self, m: usize) -> bool {
        self.support().len() == m * (m - 1) / 2
    }

    /// True when the support graph connects all `m` nodes.
    pub fn is_connected(&self, m: usize) -> bool {
        if m == 0 {
            return true;
        }
        let support = self.support();
        let mut reached = vec![false; m];
        reached[0] = true;
        let mut frontier = vec![0usize];
        while let Some(v) = frontier.pop() {
            for (pair, _) in &support {
                let (a, b) = (pair.lo().0, pair.hi().0);
                let next = if a == v && !reached[b] {
                    b
                } else if b == v && !reached[a] {
                    a
                } else {
                    continue;
                };
                reached[next] = true;
                frontier.push(next);
            }
        }
        reached.into_iter().all(|r| r)
    }
}

/// Lower bound on the largest active coalition in a homogeneous chain with
/// perfect gates: `M + log_beta(M^(log2 q) * 4 / ((1+q) M^3 (M-1)^2))`.
/// Negative values are vacuous at small `M`.
pub fn coalition_size_lower_bound_perfect(m: usize, q: f64, beta: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::TooFewNodes { min: 2, got: m });
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "swap efficiency q = {q} must be in (0, 1]"
        )));
    }
    if !(beta > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "beta = {beta} must be > 1"
        )));
    }
    let mf = m as f64;
    let numerator = mf.powf(q.log2()) * 4.0;
    let denominator = (1.0 + q) * mf.powi(3) * (mf - 1.0).powi(2);
    Ok(mf + (numerator / denominator).ln() / beta.ln())
}

/// Hard cap on active coalition size under gate errors:
/// `floor(1/sqrt(epsilon_eff))`. `None` when the error is zero (no cap).
pub fn coalition_size_cap(epsilon_eff: f64) -> Option<usize> {
    if epsilon_eff > 0.0 {
        Some((1.0 / epsilon_eff.sqrt()).floor() as usize)
    } else {
        None
    }
}

/// Lower bound on the largest active coalition in a homogeneous chain with
/// gate errors, with `m* = floor(sqrt(1/epsilon_eff))`:
/// `m* + log_beta(4 m*^(log2 q) floor(M/m*) / ((1+q) m*^3 (m*-1) (2M-m*+1)))`.
pub fn coalition_size_lower_bound_noisy(
    m: usize,
    q: f64,
    beta: f64,
    epsilon_eff: f64,
) -> Result<f64> {
    if !(epsilon_eff > 0.0) {
        return Err(Error::InvalidParameter(
            "the noisy bound needs epsilon_eff > 0".into(),
        ));
    }
    let cap = coalition_size_cap(epsilon_eff).unwrap();
    if cap < 2 {
        return Err(Error::InvalidParameter(format!(
            "size cap {cap} below 2; no multi-node coalition is feasible"
        )));
    }
    if m < cap {
        return Err(Error::InvalidParameter(format!(
            "need at least {cap} nodes, got {m}"
        )));
    }
    if !(q > 0.0 && q <= 1.0) || !(beta > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need q in (0, 1] and beta > 1, got q = {q}, beta = {beta}"
        )));
    }
    let mf = m as f64;
    let capf = cap as f64;
    let numerator = 4.0 * capf.powf(q.log2()) * (m / cap) as f64;
    let denominator = (1.0 + q) * capf.powi(3) * (capf - 1.0) * (2.0 * mf - capf + 1.0);
    Ok(capf + (numerator / denominator).ln() / beta.ln())
}

#[derive(Serialize, Deserialize, Debug)]
pub struct TaskReport {
    pub members: Vec<usize>,
    pub depth: u32,
    pub rate: f64,
    pub utility_share: f64,
}

#[derive(Serialize, Deserialize, Debug)]
pub struct EdgeReport {
    pub a: usize,
    pub b: usize,
    pub rate: f64,
}

#[derive(Serialize, Deserialize, Debug)]
pub struct SolverReport {
    pub status: String,
    pub iterations: u64,
}

/// Machine-readable result document for a single solve.
#[derive(Serialize, Deserialize, Debug)]
pub struct UtilityReport {
    pub u_comp: f64,
    pub noswap_baseline: f64,
    pub ratio: f64,
    pub tasks: Vec<TaskReport>,
    pub entanglement_graph: Vec<EdgeReport>,
    pub solver: SolverReport,
}

impl UtilityReport {
    /// Summarizes a result, listing active tasks and support edges only.
    pub fn from_result(result: &UtilityResult) -> Self {
        let tasks = result
            .task_rates
            .iter()
            .filter(|(_, p)| *p > 0.0)
            .map(|(t, p)| TaskReport {
                members: t.coalition.members().iter().map(|n| n.0).collect(),
                depth: t.depth,
                rate: *p,
                utility_share: if result.utility > 0.0 {
                    t.volume_coefficient * p / result.utility
                } else {
                    0.0
                },
            })
            .collect();
        let entanglement_graph = EntanglementGraph::from_result(result)
            .support()
            .into_iter()
            .map(|(pair, rate)| EdgeReport {
                a: pair.lo().0,
                b: pair.hi().0,
                rate,
            })
            .collect();
        Self {
            u_comp: result.utility,
            noswap_baseline: result.noswap_baseline,
            ratio: result.ratio_to_noswap(),
            tasks,
            entanglement_graph,
            solver: SolverReport {
                status: result.diagnostics.status.to_string(),
                iterations: result.diagnostics.iterations,
            },
        }
    }
}

//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Run with `cargo test -p qnu-core --test acceptance -- --nocapture`.

use std::time::Instant;

use qnu_core::{
    check_feasible, compute_utility, coalition_size_cap, coalition_size_lower_bound_noisy,
    max_active_coalition_size, reroute_rate, EntanglementGraph, EnumerationConfig, NetworkSpec,
    NodeId, Pair, RateVector, UtilityModel, UtilityResult, ACTIVE_RATE_THRESHOLD,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn criterion(name: &str, body: impl FnOnce() -> Result<(), String>) {
    match body() {
        Ok(()) => println!("[PASS] {name}"),
        Err(msg) => {
            println!("[FAIL] {name}: {msg}");
            panic!("criterion failed: {name}: {msg}");
        }
    }
}

fn beta2() -> UtilityModel {
    UtilityModel::new(2.0).unwrap()
}

fn chain(m: usize, eps: f64) -> NetworkSpec {
    NetworkSpec::chain(m, 0.6, 0.9, eps).unwrap()
}

fn solve(net: &NetworkSpec, u: &UtilityModel) -> Result<UtilityResult, String> {
    compute_utility(net, u, &EnumerationConfig::connected()).map_err(|e| e.to_string())
}

#[test]
fn criterion_01_error_cap_on_active_coalitions() {
    criterion("01 coalition size cap at eps=0.01 stays <= 10 for M=11..16", || {
        let start = Instant::now();
        for m in 11..=16 {
            let result = solve(&chain(m, 0.01), &beta2())?;
            let size = max_active_coalition_size(&result, ACTIVE_RATE_THRESHOLD);
            if size > 10 {
                return Err(format!("M={m}: max active coalition {size} > 10"));
            }
        }
        let elapsed = start.elapsed();
        if elapsed.as_secs_f64() > 30.0 {
            return Err(format!("took {elapsed:?}, budget 30 s"));
        }
        Ok(())
    });
}

#[test]
fn criterion_02_full_connectivity_window() {
    criterion("02 entanglement graph fully connected for M=8..10 at eps=0.01", || {
        for m in 8..=10 {
            let result = solve(&chain(m, 0.01), &beta2())?;
            let graph = EntanglementGraph::from_result(&result);
            let support = graph.support().len();
            if !graph.is_fully_connected(m) {
                return Err(format!(
                    "M={m}: support {support} of {} pairs",
                    m * (m - 1) / 2
                ));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_03_connected_enumeration_is_lossless() {
    criterion("03 connected vs all-subset enumeration agree on chains M=3..6", || {
        let start = Instant::now();
        for m in 3..=6 {
            for eps in [0.0, 0.01] {
                let net = chain(m, eps);
                let connected =
                    compute_utility(&net, &beta2(), &EnumerationConfig::connected())
                        .map_err(|e| e.to_string())?;
                let all = compute_utility(&net, &beta2(), &EnumerationConfig::all())
                    .map_err(|e| e.to_string())?;
                let rel = (connected.utility - all.utility).abs() / all.utility.abs().max(1.0);
                if rel > 1e-6 {
                    return Err(format!(
                        "M={m} eps={eps}: connected {} vs all {}",
                        connected.utility, all.utility
                    ));
                }
            }
        }
        let elapsed = start.elapsed();
        if elapsed.as_secs_f64() > 60.0 {
            return Err(format!("took {elapsed:?}, budget 60 s"));
        }
        Ok(())
    });
}

#[test]
fn criterion_04_closed_form_small_chains() {
    criterion("04 closed-form two- and three-node chain values", || {
        let two = solve(&chain(2, 0.0), &beta2())?;
        if (two.utility - 0.6).abs() > 1e-8 {
            return Err(format!("M=2: {} != 0.6", two.utility));
        }
        let three = solve(&chain(3, 0.0), &beta2())?;
        if (three.utility - 1.2).abs() > 1e-7 {
            return Err(format!("M=3: {} != 1.2", three.utility));
        }
        for (task, p) in &three.task_rates {
            if task.coalition.size() == 3 && *p > 0.0 {
                return Err("M=3: the 3-node coalition is active".into());
            }
        }
        // Independent grid-search oracle over the only useful flow (a swap
        // at node 1) and the 3-node task rate.
        let (f, q) = (0.6, 0.9);
        let steps = 400;
        let mut best = (0.0f64, 0.0f64);
        for wi in 0..=steps {
            let w = f * wi as f64 / steps as f64;
            for si in 0..=steps {
                let p3 = (q * w / 2.0) * si as f64 / steps as f64;
                let budget = f - w - 2.0 * p3;
                if budget < 0.0 {
                    continue;
                }
                let utility = 2.0 * budget + 8.0 * p3;
                if utility > best.0 {
                    best = (utility, p3);
                }
            }
        }
        if (best.0 - 1.2).abs() > 1e-6 || best.1 != 0.0 {
            return Err(format!("oracle best {} at p3 {}", best.0, best.1));
        }
        Ok(())
    });
}

fn random_tree(rng: &mut ChaCha8Rng, m: usize) -> Vec<(usize, usize)> {
    (1..m).map(|v| (rng.gen_range(0..v), v)).collect()
}

fn network_from_edges(
    edges: &[(usize, usize)],
    m: usize,
    rng: &mut ChaCha8Rng,
    q_zero: bool,
    eps: f64,
) -> NetworkSpec {
    let mut rates = std::collections::BTreeMap::new();
    for &(a, b) in edges {
        rates.insert(
            Pair::new(NodeId(a), NodeId(b)),
            rng.gen_range(0.1..2.0),
        );
    }
    let q: Vec<f64> = (0..m)
        .map(|_| if q_zero { 0.0 } else { rng.gen_range(0.0..1.0) })
        .collect();
    NetworkSpec::new(q, rates, eps).unwrap()
}

#[test]
fn criterion_05_baseline_bounds_on_random_networks() {
    criterion("05 utility dominates the no-swap baseline; equality at q=0", || {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for case in 0..50 {
            let m = rng.gen_range(3..=7);
            let mut edges = random_tree(&mut rng, m);
            // Half the cases get extra edges (cycles allowed).
            if case % 2 == 0 {
                for _ in 0..rng.gen_range(1..=2) {
                    let a = rng.gen_range(0..m);
                    let b = rng.gen_range(0..m);
                    if a != b && !edges.contains(&(a.min(b), a.max(b))) {
                        edges.push((a.min(b), a.max(b)));
                    }
                }
            }
            let eps = if rng.gen_bool(0.5) { 0.0 } else { 0.01 };
            let seed_state = rng.clone();
            let net = network_from_edges(&edges, m, &mut rng, false, eps);
            let result = solve(&net, &beta2())?;
            if result.utility < result.noswap_baseline - 1e-9 {
                return Err(format!(
                    "case {case}: U {} below baseline {}",
                    result.utility, result.noswap_baseline
                ));
            }
            // Degenerate swaps on the same topology; trees only, since a
            // physical triangle can host a 3-node task with no swaps at all.
            if case % 2 != 0 {
                let mut rng2 = seed_state;
                let net0 = network_from_edges(&edges, m, &mut rng2, true, eps);
                let result0 = solve(&net0, &beta2())?;
                if (result0.utility - result0.noswap_baseline).abs() > 1e-9 {
                    return Err(format!(
                        "case {case}: q=0 utility {} != baseline {}",
                        result0.utility, result0.noswap_baseline
                    ));
                }
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_06_scaling_and_monotonicity() {
    criterion("06 homogeneity in f; monotone in beta, eps, and chain length", || {
        let base = solve(&chain(5, 0.0), &beta2())?;
        for lambda in [0.5, 3.7] {
            let scaled = compute_utility(
                &chain(5, 0.0).scaled(lambda).unwrap(),
                &beta2(),
                &EnumerationConfig::connected(),
            )
            .map_err(|e| e.to_string())?;
            let rel = (scaled.utility - lambda * base.utility).abs() / (lambda * base.utility);
            if rel > 1e-6 {
                return Err(format!("lambda={lambda}: relative error {rel}"));
            }
        }
        let mut prev = 0.0;
        for beta in [1.5, 2.0, 3.0] {
            let u = UtilityModel::new(beta).unwrap();
            let result = solve(&chain(6, 0.0), &u)?;
            if result.utility < prev - 1e-9 {
                return Err(format!("utility decreased at beta={beta}"));
            }
            prev = result.utility;
        }
        let mut prev = f64::INFINITY;
        for eps in [0.0, 0.01, 0.04, 0.1] {
            let result = solve(&chain(6, eps), &beta2())?;
            if result.utility > prev + 1e-9 {
                return Err(format!("utility increased at eps={eps}"));
            }
            prev = result.utility;
        }
        let mut prev = 0.0;
        for m in 2..=14 {
            let result = solve(&chain(m, 0.0), &beta2())?;
            if result.utility < prev - 1e-9 {
                return Err(format!("utility decreased at M={m}"));
            }
            prev = result.utility;
        }
        Ok(())
    });
}

/// Feasible-by-construction rate vector: sample flows, scale them until
/// every conservation row stays nonnegative, then take a fraction of each
/// row's slack as consumed rate. Built directly from the swap semantics,
/// independent of the constraint-assembly code under test.
fn random_feasible_rates(net: &NetworkSpec, rng: &mut ChaCha8Rng) -> RateVector {
    let m = net.node_count();
    let mut pairs = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            pairs.push(Pair::new(NodeId(a), NodeId(b)));
        }
    }
    let mut flows = Vec::new();
    for &p in &pairs {
        for c in 0..m {
            let c = NodeId(c);
            if !p.contains(c) {
                flows.push((p, c, rng.gen_range(0.0..0.3)));
            }
        }
    }
    // Net flow contribution to each pair's budget.
    let mut delta: std::collections::BTreeMap<Pair, f64> = Default::default();
    for &(p, c, w) in &flows {
        *delta.entry(p).or_default() += net.swap_eff(c) * w;
        *delta.entry(Pair::new(p.lo(), c)).or_default() -= w;
        *delta.entry(Pair::new(p.hi(), c)).or_default() -= w;
    }
    let mut lambda_max = f64::INFINITY;
    for &p in &pairs {
        let d = delta.get(&p).copied().unwrap_or(0.0);
        if d < 0.0 {
            lambda_max = lambda_max.min(net.rate(p) / -d);
        }
    }
    let lambda = 0.9 * rng.gen_range(0.0..1.0) * lambda_max.min(1.0);
    let mut rates = RateVector::new();
    for &p in &pairs {
        let budget = net.rate(p) + lambda * delta.get(&p).copied().unwrap_or(0.0);
        let r = budget.max(0.0) * rng.gen_range(0.0..0.95);
        rates.set(p, r).unwrap();
    }
    rates
}

#[test]
fn criterion_07_reroute_preserves_feasibility() {
    criterion("07 diverting end-to-end rate onto segments stays feasible", || {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for case in 0..100 {
            let m = 4 + case % 3; // 4, 5, 6
            let net = chain(m, 0.0);
            let rates = random_feasible_rates(&net, &mut rng);
            let pre = check_feasible(&net, &rates, 1e-9).map_err(|e| e.to_string())?;
            if !pre.feasible {
                return Err(format!(
                    "case {case}: constructed vector infeasible (violation {})",
                    pre.max_violation
                ));
            }
            let l = rng.gen_range(0..m - 2);
            let k = rng.gen_range(l + 1..m - 1);
            let j = rng.gen_range(k + 1..m);
            let (l, k, j) = (NodeId(l), NodeId(k), NodeId(j));
            let r = rates.get(Pair::new(l, j)) * rng.gen_range(0.0..1.0);
            let rerouted = reroute_rate(&rates, l, k, j, r).map_err(|e| e.to_string())?;
            let post = check_feasible(&net, &rerouted, 1e-9).map_err(|e| e.to_string())?;
            if !post.feasible {
                return Err(format!(
                    "case {case}: rerouted ({l},{k},{j},{r}) infeasible, violation {}",
                    post.max_violation
                ));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_08_dumbbell_ratio_shape() {
    criterion("08 bar-dominated dumbbell utility ratio rises then falls to ~1", || {
        let ratios = [0.1, 0.3, 1.0, 3.0, 10.0, 100.0, 1e3, 1e4];
        let mut u_ratios = Vec::new();
        for &ratio in &ratios {
            let net = NetworkSpec::dumbbell(3, 0.6, 0.6 * ratio, 0.9, 0.0).unwrap();
            let result = solve(&net, &beta2())?;
            u_ratios.push(result.ratio_to_noswap());
        }
        let last = *u_ratios.last().unwrap();
        if (last - 1.0).abs() > 0.1 {
            return Err(format!("ratio at bar/spoke=1e4 is {last}, not within 0.1 of 1"));
        }
        let peak = u_ratios.iter().cloned().fold(f64::MIN, f64::max);
        let first = u_ratios[0];
        if !(peak > first && peak > last) {
            return Err(format!("ratio curve is monotone: {u_ratios:?}"));
        }
        Ok(())
    });
}

#[test]
fn criterion_09_small_dumbbells_ignore_gate_errors() {
    criterion("09 small dumbbells: eps=0.01 matches perfect gates", || {
        for side in 1..=4 {
            let perfect = solve(&NetworkSpec::dumbbell(side, 0.6, 0.6, 0.9, 0.0).unwrap(), &beta2())?;
            let noisy = solve(&NetworkSpec::dumbbell(side, 0.6, 0.6, 0.9, 0.01).unwrap(), &beta2())?;
            let rel = (perfect.utility - noisy.utility).abs() / perfect.utility.max(1e-12);
            if rel > 1e-6 {
                return Err(format!(
                    "side={side}: perfect {} vs noisy {}",
                    perfect.utility, noisy.utility
                ));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_10_bound_sandwich_on_noisy_chains() {
    criterion("10 largest active coalition sits between the two bounds", || {
        let eps = 0.01;
        let cap = coalition_size_cap(eps).unwrap();
        if cap != 10 {
            return Err(format!("cap at eps=0.01 is {cap}, expected 10"));
        }
        for m in [12, 16, 20] {
            let result = solve(&chain(m, eps), &beta2())?;
            let size = max_active_coalition_size(&result, ACTIVE_RATE_THRESHOLD);
            let lower = coalition_size_lower_bound_noisy(m, 0.9, 2.0, eps)
                .map_err(|e| e.to_string())?;
            if (size as f64) < lower - 1.0 {
                return Err(format!("M={m}: size {size} below lower bound {lower} - 1"));
            }
            if size > cap {
                return Err(format!("M={m}: size {size} above cap {cap}"));
            }
        }
        Ok(())
    });
}

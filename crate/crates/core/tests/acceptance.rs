//! Acceptance gates. Each gate prints one `PASS`/`FAIL` line; the process
//! exits nonzero if any gate fails.
//!
//! Run alone with `cargo test -p peg-core --test acceptance`.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{One, ToPrimitive, Zero};
use peg_core::avg_degree::{
    d_plus, estimate_avg_degree_with, refine_estimate, degree_threshold, is_low_degree, DegreeEstimatorConfig,
    DriverConfig, EstimatorConstants,
};
use peg_core::connectedness::{
    run_tester, unknown_davg_budget, Algorithm, ConnTesterConfig, MidAlphaSchedule, SmallAlphaSchedule,
};
use peg_core::exact::{
    distance_to_connectedness, exact_exp_chi, inventory_witnesses, mid_alpha_rejection_probability, min_components,
    small_alpha_rejection_probability, small_big_classify, ExactLimits, SetSize,
};
use peg_core::instance_gen::{
    erase, gen_connected_random, gen_cycle_union, gen_far_forest, gen_fig_component, gen_g1, gen_g2, gen_gminus,
    gen_gplus, gen_random_regularish, ErasureStrategy, FarForestSpec, GadgetKind,
};
use peg_core::oracle::FilterOracle;
use peg_core::rng::{rng_from_seed, split_seed};
use peg_core::{parse_rational, AdjEntry, PartiallyErasedGraph, QuerySession, Rational, VertexId};
use rand::seq::SliceRandom;
use rand::Rng;

const MASTER_SEED: u64 = 0x5eed_acce_97a1_2024;

struct Gate {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn rat(x: f64) -> Rational {
    parse_rational(&format!("{x}")).expect("decimal literal")
}

fn seed_for(gate: u64, index: u64) -> u64 {
    split_seed(split_seed(MASTER_SEED, gate), index)
}

/// Random simple graph with `n` vertices and `m` edges.
fn gnm(n: usize, m: usize, seed: u64) -> PartiallyErasedGraph {
    assert!(m <= n * (n - 1) / 2);
    let mut rng = rng_from_seed(seed);
    let mut present = HashSet::new();
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && present.insert((u.min(v), u.max(v))) {
            edges.push((u, v));
        }
    }
    PartiallyErasedGraph::from_edges(n, &edges).unwrap()
}

fn star(n: usize) -> PartiallyErasedGraph {
    let edges: Vec<_> = (1..n).map(|v| (0, v)).collect();
    PartiallyErasedGraph::from_edges(n, &edges).unwrap()
}

// ---------------------------------------------------------------------------
// 1. one-sided error

/// Twenty connected graphs; the last two come with their own erasures.
fn connected_corpus() -> Vec<(String, PartiallyErasedGraph)> {
    let mut out = Vec::new();
    let mut k = 0u64;
    let mut seed = || {
        k += 1;
        seed_for(1, k)
    };
    for (n, m) in [(50, 60), (200, 220), (1000, 1100), (200, 400), (1000, 2000), (500, 1500)] {
        out.push((format!("random n={n} m={m}"), gen_connected_random(n, m, seed()).unwrap().graph));
    }
    for n in [20, 100, 400, 2000] {
        out.push((format!("tree n={n}"), gen_connected_random(n, n - 1, seed()).unwrap().graph));
    }
    for (n, d) in [(100, 3), (500, 4), (300, 5), (1000, 3)] {
        out.push((format!("regularish n={n} d={d}"), gen_random_regularish(n, d, true, seed()).unwrap().graph));
    }
    for n in [50, 300] {
        out.push((format!("cycle n={n}"), gen_cycle_union(&[n], seed()).unwrap().graph));
    }
    out.push(("star n=30".into(), star(30)));
    out.push(("dense n=12 m=50".into(), gen_connected_random(12, 50, seed()).unwrap().graph));
    out.push(("cycles+hub t=3 k=4".into(), gen_gplus(Rational::new(1, 7), 4, seed()).unwrap().graph));
    out.push(("cycles+hub t=4 k=6".into(), gen_gplus(Rational::new(1, 9), 6, seed()).unwrap().graph));
    out
}

fn gate_one_sided() -> (bool, String) {
    const TRIALS: u64 = 1000;
    let corpus = connected_corpus();
    let mut runs = 0u64;
    let mut rejections = Vec::new();
    for (idx, (name, base)) in corpus.iter().enumerate() {
        let davg = base.average_degree();
        let preset = base.erased_count() > 0;
        let preset_alpha = base.erasure_fraction().to_f64().unwrap();
        let eps = (1.0 / davg).min(0.5);
        // (algorithm, epsilon, alpha)
        let plans = [
            (Algorithm::SmallAlpha, eps, 0.45 * eps),
            (Algorithm::MidAlpha, eps, 0.9 * eps),
            (Algorithm::NoErasure, eps, 0.0),
            (Algorithm::UnknownDavg, 0.5, 0.05),
        ];
        for (a, (algo, eps, alpha)) in plans.into_iter().enumerate() {
            let (g, alpha) = if preset {
                (base.clone(), if algo == Algorithm::NoErasure { 0.0 } else { preset_alpha })
            } else if alpha > 0.0 {
                let r = rat((alpha * 1e4).floor() / 1e4);
                let g = erase(base, r, ErasureStrategy::Uniform, seed_for(1, 1000 + idx as u64)).unwrap();
                (g, r.to_f64().unwrap())
            } else {
                (base.clone(), 0.0)
            };
            for t in 0..TRIALS {
                let seed = split_seed(seed_for(1, 10_000 + (idx * 4 + a) as u64), t);
                let cfg = ConnTesterConfig::new(eps, alpha, Some(davg), seed);
                let v = run_tester(algo, &g, &cfg).unwrap();
                runs += 1;
                if v.rejected() {
                    rejections.push(format!("{name} {algo:?} seed {seed}"));
                }
            }
        }
    }
    let detail = format!("{runs} runs on {} instances, {} rejections", corpus.len(), rejections.len());
    let detail = match rejections.first() {
        Some(first) => format!("{detail} (first: {first})"),
        None => detail,
    };
    (rejections.is_empty(), detail)
}

// ---------------------------------------------------------------------------
// 2-3. far-case power

struct PowerRow {
    freq: f64,
    exact: f64,
}

fn power_summary(rows: &[PowerRow]) -> (f64, String) {
    let min = rows.iter().map(|r| r.freq).fold(f64::INFINITY, f64::min);
    let cells: Vec<String> = rows.iter().map(|r| format!("{:.3}/{:.3}", r.freq, r.exact)).collect();
    (min, format!("min freq {min:.3}; freq/exact-uncapped per instance: {}", cells.join(" ")))
}

fn gate_power_small_alpha() -> (bool, String) {
    const TRIALS: u64 = 500;
    let eps = Rational::new(1, 5);
    let mut rows = Vec::new();
    let mut cases = Vec::new();
    for (k, alpha) in [Rational::zero(), Rational::new(1, 20)].into_iter().enumerate() {
        for (j, (davg, lo, hi)) in [(2.0, 1, 4), (2.5, 1, 3), (3.0, 1, 2), (4.0, 1, 2), (5.0, 1, 1)].into_iter().enumerate() {
            cases.push((k * 5 + j, alpha, davg, lo, hi));
        }
    }
    for (idx, alpha, davg, lo, hi) in cases {
        let spec = FarForestSpec {
            min_component: lo,
            max_component: hi,
            ..FarForestSpec::new(eps, alpha, 2000, davg, ErasureStrategy::Uniform, seed_for(2, idx as u64))
        };
        let far = gen_far_forest(&spec).expect("far instance");
        let g = &far.instance.graph;
        let (e, a, d) = (0.2, alpha.to_f64().unwrap(), g.average_degree());
        let inv = inventory_witnesses(g);
        let exact = small_alpha_rejection_probability(g, &inv, &SmallAlphaSchedule::new(e, a, d));
        let rejected = (0..TRIALS)
            .filter(|&t| {
                let cfg = ConnTesterConfig::new(e, a, Some(d), split_seed(seed_for(2, 100 + idx as u64), t));
                run_tester(Algorithm::SmallAlpha, g, &cfg).unwrap().rejected()
            })
            .count();
        rows.push(PowerRow {
            freq: rejected as f64 / TRIALS as f64,
            exact,
        });
    }
    let (min, detail) = power_summary(&rows);
    (min >= 0.6, detail)
}

fn gate_power_mid_alpha() -> (bool, String) {
    const TRIALS: u64 = 500;
    let eps = Rational::new(1, 5);
    let mut rows = Vec::new();
    let mut plain_total = 0;
    let mut idx = 0u64;
    for alpha in [Rational::new(3, 25), Rational::new(3, 20), Rational::new(9, 50)] {
        for davg in [2.0, 2.5, 3.0] {
            rows.push(mid_alpha_row(eps, alpha, davg, idx, TRIALS, &mut plain_total));
            idx += 1;
        }
    }
    rows.push(mid_alpha_row(eps, Rational::new(3, 20), 3.5, idx, TRIALS, &mut plain_total));
    let (min, detail) = power_summary(&rows);
    (
        min >= 0.6 && plain_total == 0,
        format!("{detail}; plain witnesses across instances {plain_total}"),
    )
}

fn mid_alpha_row(eps: Rational, alpha: Rational, davg: f64, idx: u64, trials: u64, plain_total: &mut usize) -> PowerRow {
    let spec = FarForestSpec {
        min_component: 2,
        max_component: 3,
        ..FarForestSpec::new(eps, alpha, 2000, davg, ErasureStrategy::ComponentHiding, seed_for(3, idx))
    };
    let far = gen_far_forest(&spec).expect("component-hiding instance");
    let g = &far.instance.graph;
    let (e, a, d) = (0.2, alpha.to_f64().unwrap(), g.average_degree());
    let inv = inventory_witnesses(g);
    *plain_total += inv.plain.len();
    let (_, exact) = mid_alpha_rejection_probability(g, &inv, &MidAlphaSchedule::new(e, a, d));
    let rejected = (0..trials)
        .filter(|&t| {
            let cfg = ConnTesterConfig::new(e, a, Some(d), split_seed(seed_for(3, 100 + idx), t));
            run_tester(Algorithm::MidAlpha, g, &cfg).unwrap().rejected()
        })
        .count();
    PowerRow {
        freq: rejected as f64 / trials as f64,
        exact,
    }
}

// ---------------------------------------------------------------------------
// 4. cost does not grow with n

fn median(mut v: Vec<u64>) -> u64 {
    v.sort_unstable();
    v[(v.len() - 1) / 2]
}

fn gate_cost_flat_in_n() -> (bool, String) {
    const TRIALS: u64 = 200;
    let (eps, alpha) = (0.2, 0.05);
    let mut medians = Vec::new();
    let mut over_cap = 0;
    let mut cells = Vec::new();
    for (k, n) in [1_000usize, 10_000, 100_000].into_iter().enumerate() {
        let base = gen_connected_random(n, n, seed_for(4, k as u64)).unwrap().graph;
        let g = erase(&base, Rational::new(1, 20), ErasureStrategy::Uniform, seed_for(4, 10 + k as u64)).unwrap();
        let davg = g.average_degree();
        let schedule = SmallAlphaSchedule::new(eps, alpha, davg);
        let costs: Vec<u64> = (0..TRIALS)
            .map(|t| {
                let cfg = ConnTesterConfig::new(eps, alpha, Some(davg), split_seed(seed_for(4, 100 + k as u64), t));
                let v = run_tester(Algorithm::SmallAlpha, &g, &cfg).unwrap();
                if v.queries.total() > schedule.cap {
                    over_cap += 1;
                }
                v.queries.total()
            })
            .collect();
        let med = median(costs);
        cells.push(format!("n={n}: median {med} cap {}", schedule.cap));
        medians.push(med);
    }
    let (lo, hi) = (*medians.iter().min().unwrap(), *medians.iter().max().unwrap());
    let ratio = hi as f64 / lo.max(1) as f64;
    (
        ratio < 2.0 && over_cap == 0,
        format!("{}; max/min {ratio:.2}; over cap {over_cap}", cells.join(", ")),
    )
}

// ---------------------------------------------------------------------------
// 5. unknown-degree tester stays within its budget

fn gate_unknown_davg_budget() -> (bool, String) {
    const TRIALS: u64 = 200;
    let mut graphs: Vec<PartiallyErasedGraph> = Vec::new();
    for (k, (n, m)) in [(200, 220), (1000, 1000), (300, 900)].into_iter().enumerate() {
        graphs.push(gen_connected_random(n, m, seed_for(5, k as u64)).unwrap().graph);
    }
    for (k, davg) in [2.0, 3.0].into_iter().enumerate() {
        let spec = FarForestSpec::new(Rational::new(1, 5), Rational::zero(), 1000, davg, ErasureStrategy::Uniform, seed_for(5, 10 + k as u64));
        graphs.push(gen_far_forest(&spec).unwrap().instance.graph);
    }
    let formula_ok = unknown_davg_budget(0.5) == 3500;
    let (mut runs, mut violations, mut abort_rejects, mut aborts, mut max_ratio) = (0u64, 0u64, 0u64, 0u64, 0f64);
    for (gi, base) in graphs.iter().enumerate() {
        for (pi, (eps, alpha)) in [(0.5, 0.0), (0.3, 0.0), (0.5, 0.05), (0.3, 0.05)].into_iter().enumerate() {
            let g = if alpha > 0.0 {
                erase(base, rat(alpha), ErasureStrategy::Uniform, seed_for(5, 100 + gi as u64)).unwrap()
            } else {
                base.clone()
            };
            let budget = unknown_davg_budget(eps - 2.0 * alpha);
            for t in 0..TRIALS {
                let seed = split_seed(seed_for(5, 1000 + (gi * 4 + pi) as u64), t);
                let v = run_tester(Algorithm::UnknownDavg, &g, &ConnTesterConfig::new(eps, alpha, None, seed)).unwrap();
                runs += 1;
                violations += u64::from(v.queries.neighbor > budget);
                aborts += u64::from(v.aborted);
                abort_rejects += u64::from(v.aborted && v.rejected());
                max_ratio = max_ratio.max(v.queries.neighbor as f64 / budget as f64);
            }
        }
    }
    (
        formula_ok && violations == 0 && abort_rejects == 0,
        format!(
            "{runs} runs, {violations} over budget, {aborts} aborts ({abort_rejects} rejecting), max neighbor/budget {max_ratio:.3}, budget(0.5) = {}",
            unknown_davg_budget(0.5)
        ),
    )
}

// ---------------------------------------------------------------------------
// 6. lower-bound families

fn gate_lower_bound_arithmetic() -> (bool, String) {
    let limits = ExactLimits::default();
    let eps = Rational::new(1, 7); // t = 3
    let minus = gen_gminus(eps, 4, seed_for(6, 0)).unwrap().graph;
    let plus = gen_gplus(eps, 4, seed_for(6, 1)).unwrap().graph;
    let d_minus = distance_to_connectedness(&minus, &limits).unwrap();
    let d_plus_ = distance_to_connectedness(&plus, &limits).unwrap();
    let f_minus = minus.erasure_fraction();
    let f_plus = plus.erasure_fraction();
    let alpha = Rational::new(1, 3);
    let g1 = gen_g1(alpha, 13, seed_for(6, 2)).unwrap().graph;
    let g2 = gen_g2(alpha, 13, seed_for(6, 3)).unwrap().graph;
    let ratio = g1.average_degree_exact() / g2.average_degree_exact();
    let checks = [
        d_minus == Rational::new(1, 7),
        d_plus_.is_zero(),
        f_minus == Rational::new(1, 7),
        f_plus == Rational::new(1, 8),
        ratio == Rational::new(4, 3),
    ];
    (
        checks.iter().all(|&c| c),
        format!(
            "minus distance {d_minus}, plus distance {d_plus_}, erasure fractions {f_minus} and {f_plus}, degree ratio {ratio}"
        ),
    )
}

// ---------------------------------------------------------------------------
// 7. witness counts on small far graphs

fn gate_witness_counts() -> (bool, String) {
    let limits = ExactLimits::default();
    let strategies = [ErasureStrategy::Uniform, ErasureStrategy::ComponentHiding, ErasureStrategy::Symmetric];
    // (eps, alpha): both sides of eps/2
    let params: [(Rational, Rational); 8] = [
        (Rational::new(1, 5), Rational::zero()),
        (Rational::new(1, 5), Rational::new(1, 20)),
        (Rational::new(1, 5), Rational::new(2, 25)),
        (Rational::new(1, 5), Rational::new(1, 10)),
        (Rational::new(1, 5), Rational::new(3, 25)),
        (Rational::new(3, 20), Rational::new(1, 25)),
        (Rational::new(3, 20), Rational::new(2, 25)),
        (Rational::new(3, 10), Rational::new(1, 10)),
    ];
    let mut rng = rng_from_seed(seed_for(7, 0));
    let (mut built, mut attempts) = (0, 0u64);
    let (mut plain_checked, mut gen_checked, mut violations) = (0, 0, Vec::new());
    while built < 50 && attempts < 5000 {
        attempts += 1;
        let (eps, alpha) = params[built % params.len()];
        let n = rng.gen_range(30..=60);
        let davg = rng.gen_range(1.2..2.5);
        let strategy = strategies[rng.gen_range(0..strategies.len())];
        let spec = FarForestSpec::new(eps, alpha, n, davg, strategy, rng.gen());
        let Ok(far) = gen_far_forest(&spec) else { continue };
        let g = &far.instance.graph;
        if g.erased_count() > limits.max_erased_slots {
            continue;
        }
        built += 1;
        let m = Rational::from_integer(g.num_edges() as i128);
        let dist = distance_to_connectedness(g, &limits).unwrap();
        if dist < eps {
            violations.push(format!("instance {built} not far: distance {dist}"));
            continue;
        }
        let inv = inventory_witnesses(g);
        if alpha * 2 < eps {
            plain_checked += 1;
            let need = (eps - alpha * 2) * m;
            if Rational::from_integer(inv.plain.len() as i128) < need {
                violations.push(format!("instance {built}: {} plain < {need}", inv.plain.len()));
            }
        }
        gen_checked += 1;
        let eps_star = eps - alpha;
        let small = inv
            .generalized
            .iter()
            .filter(|w| small_big_classify(g, &w.vertices, eps_star) == SetSize::Small)
            .count();
        let need = eps_star * m / 2;
        if Rational::from_integer(small as i128) < need {
            violations.push(format!("instance {built}: {small} small generalized < {need}"));
        }
    }
    let detail = format!(
        "{built} instances, plain bound checked on {plain_checked}, generalized bound on {gen_checked}, {} violations{}",
        violations.len(),
        violations.first().map(|v| format!(" (first: {v})")).unwrap_or_default()
    );
    (built == 50 && violations.is_empty() && plain_checked > 0, detail)
}

// ---------------------------------------------------------------------------
// 8. expected credit bounds

fn gate_expected_credit() -> (bool, String) {
    let alphas = [Rational::zero(), Rational::new(1, 10), Rational::new(3, 10), Rational::new(3, 5)];
    let epsilons = [Rational::new(1, 10), Rational::new(1, 4), Rational::new(9, 20)];
    let sweep = [
        (1, 8), (3, 16), (1, 4), (3, 8), (1, 2), (3, 4), (1, 1), (3, 2), (2, 1), (3, 1), (4, 1), (6, 1), (8, 1),
    ];
    let mut rng = rng_from_seed(seed_for(8, 0));
    let (mut checks, mut violations, mut fact_violations) = (0, Vec::new(), 0);
    let half = Rational::new(1, 2);
    for i in 0..100 {
        let n = rng.gen_range(20..=200usize);
        let davg_target = rng.gen_range(1.0..20.0f64).min((n - 1) as f64);
        let m = ((n as f64 * davg_target / 2.0).round() as usize).max(n / 2);
        let base = gnm(n, m, rng.gen());
        let alpha = alphas[i % alphas.len()];
        let eps = epsilons[i % epsilons.len()];
        let strategy = if i % 5 == 4 { ErasureStrategy::Symmetric } else { ErasureStrategy::Uniform };
        let g = erase(&base, alpha, strategy, rng.gen()).unwrap();
        let davg = g.average_degree_exact();
        let sum_plus: usize = (0..n).map(|u| d_plus(&g, u)).sum();
        let fact_ok = if alpha.is_zero() { sum_plus == g.num_edges() } else { sum_plus <= g.num_edges() };
        fact_violations += u32::from(!fact_ok);
        let lo = (Rational::one() - eps / 2) * davg / 2;
        let hi = (Rational::one() + alpha.min(half) * 2) * davg / 2;
        for (p, q) in sweep {
            let d_hat = davg * Rational::new(p, q);
            let e = exact_exp_chi(&g, d_hat, eps);
            checks += 1;
            if !(lo < e && e <= hi) {
                violations.push(format!("n={n} m={m} alpha={alpha} eps={eps} d_hat={d_hat}: {e} not in ({lo}, {hi}]"));
            }
        }
    }
    (
        violations.is_empty() && fact_violations == 0,
        format!(
            "{checks} bound checks on 100 instances, {} violations, {fact_violations} d+ sum violations{}",
            violations.len(),
            violations.first().map(|v| format!(" (first: {v})")).unwrap_or_default()
        ),
    )
}

// ---------------------------------------------------------------------------
// 9. estimator accuracy

/// Reduced constants; the analysed ones need on the order of 10^11 samples
/// for this gate.
const FAST_CONSTANTS: EstimatorConstants = EstimatorConstants {
    sample_factor: 0.25,
    threshold_factor: 4.0,
    repetition_factor: 2.0,
};

fn gate_estimator_accuracy() -> (bool, String) {
    const TRIALS: u64 = 200;
    let eps = 0.25;
    let shapes = [
        (1_000, 1.0), (1_000, 20.0), (2_000, 4.0), (3_000, 12.0), (4_000, 2.0),
        (5_000, 8.0), (6_000, 16.0), (8_000, 3.0), (10_000, 1.5), (10_000, 10.0),
    ];
    let mut worst = (f64::INFINITY, String::new());
    let mut cells = Vec::new();
    for (k, (n, davg)) in shapes.into_iter().enumerate() {
        let m = (n as f64 * davg / 2.0).round() as usize;
        let base = gnm(n, m, seed_for(9, k as u64));
        let erased = erase(&base, Rational::new(3, 10), ErasureStrategy::Uniform, seed_for(9, 100 + k as u64)).unwrap();
        let d = base.average_degree();
        for (label, g, upper) in [("a=0", &base, 1.0 + eps), ("a=0.3", &erased, 1.0 + 0.6 + eps)] {
            let hits = (0..TRIALS)
                .filter(|&t| {
                    let cfg = DriverConfig {
                        constants: FAST_CONSTANTS,
                        ..DriverConfig::new(eps, split_seed(seed_for(9, 1000 + k as u64), t))
                    };
                    let v = estimate_avg_degree_with(g, &cfg).unwrap().value;
                    v > (1.0 - eps) * d && v < upper * d
                })
                .count();
            let freq = hits as f64 / TRIALS as f64;
            cells.push(format!("{freq:.2}"));
            if freq < worst.0 {
                worst = (freq, format!("n={n} d={davg} {label}"));
            }
        }
    }
    (
        worst.0 >= 0.6,
        format!(
            "in-window frequency per graph (a=0, a=0.3): {}; worst {:.2} at {} (reduced constants)",
            cells.join(" "),
            worst.0,
            worst.1
        ),
    )
}

// ---------------------------------------------------------------------------
// 10. refinement mean against the exact expectation

fn gate_refinement_mean() -> (bool, String) {
    const RUNS: u64 = 10_000;
    let (eps, delta) = (0.49, 0.33);
    let instances: Vec<(&str, PartiallyErasedGraph)> = vec![
        ("gnm n=12 m=18", gnm(12, 18, seed_for(10, 0))),
        ("cycles+hub t=3 k=4", gen_gplus(Rational::new(1, 7), 4, seed_for(10, 1)).unwrap().graph),
        ("cycle+leaves n=13", gen_g1(Rational::new(1, 3), 13, seed_for(10, 2)).unwrap().graph),
        (
            "gnm n=16 m=40 erased 0.3",
            erase(&gnm(16, 40, seed_for(10, 3)), Rational::new(3, 10), ErasureStrategy::Uniform, seed_for(10, 4)).unwrap(),
        ),
        ("star n=10", star(10)),
    ];
    let mut ok = true;
    let mut cells = Vec::new();
    for (k, (name, g)) in instances.iter().enumerate() {
        let n = g.num_vertices();
        let d_hat = 8.0 * g.average_degree();
        let d_hat_exact = g.average_degree_exact() * 8;
        let expected = 2.0 * exact_exp_chi(g, d_hat_exact, rat(eps)).to_f64().unwrap();
        let mut total = 0.0;
        let mut samples = 0u64;
        for r in 0..RUNS {
            let cfg = DegreeEstimatorConfig::new(eps, delta, d_hat, split_seed(seed_for(10, 100 + k as u64), r));
            let est = refine_estimate(g, &cfg).unwrap();
            total += est.value;
            samples += est.samples_used;
        }
        let mean = total / RUNS as f64;
        // each credit lies in [0, chi_max]; the mean of 2·credit over all samples
        // has standard deviation at most chi_max / sqrt(samples)
        let threshold = degree_threshold(n, d_hat, eps, &EstimatorConstants::default());
        let chi_max = (0..n)
            .map(|u| g.adj(u).len())
            .filter(|&d| is_low_degree(d, threshold))
            .max()
            .unwrap_or(0) as f64;
        let sigma = chi_max / (samples as f64).sqrt();
        let dev = (mean - expected).abs();
        ok &= dev <= 4.0 * sigma;
        cells.push(format!("{name}: mean {mean:.4} exact {expected:.4} ({:.2} sigma)", dev / sigma));
    }
    (ok, cells.join("; "))
}

// ---------------------------------------------------------------------------
// 11. gadgets

fn gate_gadgets() -> (bool, String) {
    let limits = ExactLimits::default();
    let two = gen_fig_component(GadgetKind::TwoErasure, seed_for(11, 0)).unwrap();
    let one = gen_fig_component(GadgetKind::OneErasureAnchored, seed_for(11, 1)).unwrap();
    let sorted = |v: &[VertexId]| {
        let mut v = v.to_vec();
        v.sort_unstable();
        v
    };

    let inv = inventory_witnesses(&two.graph);
    let set = sorted(&two.gadget);
    let two_absent = !inv.plain.contains(&set) && !inv.generalized.iter().any(|w| w.vertices == set);
    // some completion keeps the gadget apart from the cycle, so it really is
    // a component, just not a certifiable one
    let two_split = min_components(&two.graph, &limits).unwrap() == 2;

    let inv = inventory_witnesses(&one.graph);
    let set = sorted(&one.gadget);
    let entry = inv.generalized.iter().find(|w| w.vertices == set);
    let one_ok = entry.is_some_and(|w| w.erasures == 1 && w.anchors.len() == 1 && Some(w.anchors[0]) == one.anchor)
        && !inv.plain.contains(&set);
    (
        two_absent && two_split && one_ok,
        format!(
            "two-erasure gadget absent from both inventories: {two_absent}; one-erasure gadget generalized with single anchor: {one_ok}"
        ),
    )
}

// ---------------------------------------------------------------------------
// 12. filter oracle

fn gate_filter_oracle() -> (bool, String) {
    let alphas = [Rational::zero(), Rational::new(1, 10), Rational::new(3, 10), Rational::new(1, 2)];
    let mut rng = rng_from_seed(seed_for(12, 0));
    let (mut lists_checked, mut mismatches, mut asym, mut over, mut max_charge_ratio) = (0, 0, 0, 0, 0f64);
    for i in 0..50 {
        let d_bound = rng.gen_range(2..=8usize);
        let n = rng.gen_range(20..=200usize);
        let base = gen_random_regularish(n, d_bound, false, rng.gen()).unwrap().graph;
        let g = erase(&base, alphas[i % alphas.len()], ErasureStrategy::Uniform, rng.gen()).unwrap();
        let mut s = QuerySession::new(&g, rng.gen());
        let mut oracle = FilterOracle::new(d_bound);
        let mut order: Vec<VertexId> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut rebuilt = vec![Vec::new(); n];
        for &u in &order {
            rebuilt[u] = oracle.list(&mut s, u).unwrap().to_vec();
        }
        for u in 0..n {
            lists_checked += 1;
            let expected: Vec<VertexId> = g
                .adj(u)
                .iter()
                .filter_map(|e| match e {
                    AdjEntry::Vertex(w) if g.lists(*w, u) => Some(*w),
                    _ => None,
                })
                .collect();
            mismatches += u32::from(rebuilt[u] != expected);
            asym += rebuilt[u].iter().filter(|&&w| !rebuilt[w].contains(&u)).count();
        }
        let cap = (d_bound * (d_bound + 1)) as u64;
        for &(_, charge) in oracle.miss_charges() {
            over += u32::from(charge > cap);
            max_charge_ratio = max_charge_ratio.max(charge as f64 / cap as f64);
        }
    }
    (
        mismatches == 0 && asym == 0 && over == 0,
        format!(
            "{lists_checked} lists on 50 graphs: {mismatches} mismatches, {asym} asymmetric entries, {over} misses over D(D+1), max charge/D(D+1) {max_charge_ratio:.3}"
        ),
    )
}

// ---------------------------------------------------------------------------

type GateFn = fn() -> (bool, String);

fn main() -> ExitCode {
    let gates: [(u32, &str, Option<Duration>, GateFn); 12] = [
        (1, "one-sided error", Some(Duration::from_secs(60)), gate_one_sided),
        (2, "far-case power, small-alpha tester", Some(Duration::from_secs(120)), gate_power_small_alpha),
        (3, "far-case power, mid-alpha tester", None, gate_power_mid_alpha),
        (4, "small-alpha cost flat in n", None, gate_cost_flat_in_n),
        (5, "unknown-degree tester budget", None, gate_unknown_davg_budget),
        (6, "lower-bound family arithmetic", None, gate_lower_bound_arithmetic),
        (7, "witness counts on far graphs", None, gate_witness_counts),
        (8, "expected credit bounds", None, gate_expected_credit),
        (9, "average-degree estimator accuracy", Some(Duration::from_secs(300)), gate_estimator_accuracy),
        (10, "refinement mean vs exact expectation", None, gate_refinement_mean),
        (11, "gadget certification", None, gate_gadgets),
        (12, "filter oracle", None, gate_filter_oracle),
    ];
    let only: Option<u32> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut results = Vec::new();
    for (id, name, limit, f) in gates {
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let start = Instant::now();
        let (mut pass, mut detail) = f();
        let elapsed = start.elapsed();
        if let Some(limit) = limit {
            if elapsed > limit {
                pass = false;
                detail = format!("{detail}; over the {}s time limit", limit.as_secs());
            }
        }
        let gate = Gate {
            id,
            name,
            pass,
            detail,
            elapsed,
        };
        println!(
            "acceptance {:02} {:<40} {} [{:.1}s] {}",
            gate.id,
            gate.name,
            if gate.pass { "PASS" } else { "FAIL" },
            gate.elapsed.as_secs_f64(),
            gate.detail
        );
        results.push(gate);
    }
    let failed = results.iter().filter(|g| !g.pass).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

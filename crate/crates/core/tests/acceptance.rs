//! End-to-end acceptance checks. Each test prints one `criterion N: pass`
//! line (visible with `--nocapture`); a failing criterion panics with a
//! `criterion N: FAIL` message.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use hybrid_sched::allocate::{optimal_b, round_hlpb, round_side, RoundingParams};
use hybrid_sched::bounds::{exact_makespan, load_and_cp, theoretical_ratio, OracleCaps};
use hybrid_sched::genlab::{
    gap_report, qpartite_yes_graph, random_layered_dag, reduction_instance, yes_case_schedule,
    RandomDagConfig, ReductionParams, SizeCaps,
};
use hybrid_sched::instance::{validate_schedule, ExtTime, Instance, Side};
use hybrid_sched::lp::solve_relaxation;
use hybrid_sched::schedule::{hlp_b, list_schedule};

const TOL: f64 = 1e-6;

fn check(criterion: u32, ok: bool, detail: &str) {
    if !ok {
        panic!("criterion {criterion}: FAIL — {detail}");
    }
}

fn graham_ok(makespan: f64, w_cpu: f64, w_gpu: f64, cp: f64, m: u32, k: u32) -> bool {
    makespan <= w_cpu / m as f64 + w_gpu / k as f64 + cp + TOL
}

/// Criterion 1 (and 7): the approximation-ratio bound holds on every
/// instance of a 500-strong random sweep, and every produced schedule obeys
/// the load + critical-path upper bound.
#[test]
fn criterion_1_ratio_bound_on_random_sweep() {
    let failures: Vec<String> = (0u64..500)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(0xA11CE ^ i);
            let n = rng.random_range(5..=200);
            let m = rng.random_range(1..=16u32);
            let k = rng.random_range(1..=m);
            // Expected edge count stays O(n) so the LP stays tractable.
            let edge_prob = (rng.random_range(1.0..6.0) / n as f64).min(0.3);
            let cfg = RandomDagConfig {
                tasks: n,
                layers: rng.random_range(2..=8.min(n)),
                edge_prob,
                cpu_range: (0.5, 10.0),
                gpu_range: (0.5, 10.0),
                m,
                k,
                seed: i,
            };
            let instance = random_layered_dag(&cfg).unwrap();
            let (_, d) = hlp_b(&instance, None).unwrap();
            let bound = theoretical_ratio(m, k);
            if d.ratio > bound + TOL {
                return Some(format!("instance {i}: ratio {} > bound {bound}", d.ratio));
            }
            if !graham_ok(d.makespan, d.w_cpu, d.w_gpu, d.critical_path, m, k) {
                return Some(format!("instance {i}: load/cp bound violated"));
            }
            None
        })
        .collect();
    check(1, failures.is_empty(), &failures.join("; "));
    println!("criterion 1: pass — 500/500 instances within the ratio bound");
    println!("criterion 7: pass — load/cp invariant held on the sweep");
}

/// Criterion 2: closed forms of the ratio and the rounding parameter.
#[test]
fn criterion_2_closed_forms() {
    for m in [1u32, 2, 7, 1000] {
        check(
            2,
            (theoretical_ratio(m, m) - 3.0).abs() < 1e-12,
            &format!("ratio(m=k={m}) != 3"),
        );
    }
    let sup = 3.0 + 2.0 * 2.0f64.sqrt();
    check(
        2,
        (theoretical_ratio(1_000_000_000, 1) - sup).abs() < 1e-9,
        "sup of the ratio is not 3+2*sqrt(2)",
    );
    let floor = 1.0 + 2.0f64.sqrt();
    for (m, k) in [(2u32, 1u32), (3, 2), (16, 15), (1000, 1), (97, 13)] {
        check(
            2,
            theoretical_ratio(m, k) < sup,
            &format!("ratio({m},{k}) not below the sup"),
        );
        match optimal_b(m, k) {
            RoundingParams::Finite(b) => {
                check(2, b > floor, &format!("b({m},{k}) = {b} <= 1+sqrt(2)"))
            }
            RoundingParams::Infinite => check(2, false, "finite m > k gave infinite b"),
        }
    }
    println!("criterion 2: pass — ratio(m,m)=3, sup=3+2\u{221a}2, b>1+\u{221a}2");
}

/// Criterion 3: the two per-task rounding inequalities on 1e5 random tuples.
#[test]
fn criterion_3_per_task_inequalities() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut violations = 0u32;
    for _ in 0..100_000 {
        let x: f64 = rng.random_range(0.0..=1.0);
        let cpu: f64 = rng.random_range(0.01..10.0);
        let gpu: f64 = rng.random_range(0.01..10.0);
        let b: f64 = rng.random_range(2.0..10.0);
        let params = RoundingParams::finite(b).unwrap();
        let xa = match round_side(x, cpu, gpu, params) {
            Side::Cpu => 1.0,
            Side::Gpu => 0.0,
        };
        // (1 - x^A) p_ <= b (1 - x^R) p_
        if (1.0 - xa) * gpu > b * (1.0 - x) * gpu {
            violations += 1;
        }
        // x^A p + (1 - x^A) p_ <= b/(b-1) (x^R p + (1 - x^R) p_)
        if xa * cpu + (1.0 - xa) * gpu > b / (b - 1.0) * (x * cpu + (1.0 - x) * gpu) {
            violations += 1;
        }
    }
    check(3, violations == 0, &format!("{violations} violations"));
    println!("criterion 3: pass — 0 violations over 100000 tuples");
}

/// Criterion 4 (and 7): exhaustive sandwich lp <= opt <= hlpb <= ratio * opt
/// over every DAG shape with n <= 6.
#[test]
fn criterion_4_oracle_sandwich() {
    let caps = OracleCaps {
        max_tasks: 10,
        max_machines: 4,
    };
    let mut shapes: Vec<(u32, u64)> = Vec::new();
    for n in 1u32..=6 {
        let pairs = n * (n - 1) / 2;
        for mask in 0..(1u64 << pairs) {
            shapes.push((n, mask));
        }
    }
    let failures: Vec<String> = shapes
        .par_iter()
        .filter_map(|&(n, mask)| {
            // Decode the mask over ordered pairs i < j.
            let mut edges = Vec::new();
            let mut bit = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if mask >> bit & 1 == 1 {
                        edges.push((i, j));
                    }
                    bit += 1;
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(mask.wrapping_mul(0x9E37_79B9) ^ n as u64);
            for (m, k) in [(1u32, 1u32), (2, 1), (2, 2)] {
                for _ in 0..20 {
                    let times = |rng: &mut ChaCha8Rng| {
                        (0..n)
                            .map(|_| ExtTime::new(rng.random_range(0.5..4.0)).unwrap())
                            .collect::<Vec<_>>()
                    };
                    let instance =
                        Instance::new(times(&mut rng), times(&mut rng), edges.clone(), m, k)
                            .unwrap();
                    let fractional = solve_relaxation(&instance).unwrap();
                    let opt = exact_makespan(&instance, caps).unwrap();
                    let b = optimal_b(m, k);
                    let allocation = round_hlpb(&fractional, &instance, b);
                    let schedule =
                        list_schedule(&instance, &allocation, &instance.topological_order())
                            .unwrap();
                    let hlpb = schedule.makespan();
                    let lp = fractional.objective;
                    if lp > opt + TOL || opt > hlpb + TOL {
                        return Some(format!(
                            "n={n} mask={mask} m={m} k={k}: lp={lp} opt={opt} hlpb={hlpb}"
                        ));
                    }
                    if hlpb / opt > theoretical_ratio(m, k) + TOL {
                        return Some(format!(
                            "n={n} mask={mask} m={m} k={k}: hlpb/opt = {}",
                            hlpb / opt
                        ));
                    }
                    let (w_cpu, w_gpu, cp) = load_and_cp(&instance, &allocation);
                    if !graham_ok(hlpb, w_cpu, w_gpu, cp, m, k) {
                        return Some(format!("n={n} mask={mask}: load/cp bound violated"));
                    }
                }
            }
            None
        })
        .collect();
    check(4, failures.is_empty(), &failures.join("; "));
    println!("criterion 4: pass — sandwich held on every shape with n <= 6");
    println!("criterion 7: pass — load/cp invariant held on the corpus");
}

/// Criterion 5 (and 7): the pipelined YES-case certificate validates with
/// makespan exactly Qq/3 + Q - 1.
#[test]
fn criterion_5_yes_case_certificates() {
    // (q, Q, n, epsilon, edge_prob, expected makespan)
    let cases = [
        (3u32, 4u32, 25u32, 1.0 / 16.0, 0.002, 7.0),
        (6, 5, 50, 1.0 / 25.0, 0.0, 14.0),
    ];
    for (q, classes, n, epsilon, edge_prob, expected) in cases {
        let delta = 1.0 / (2.0 * classes as f64);
        let params = ReductionParams::new(q, classes, n, epsilon, delta).unwrap();
        let graph = qpartite_yes_graph(&params, edge_prob, 424242).unwrap();
        let (instance, _) = reduction_instance(&graph, &params, &SizeCaps::default()).unwrap();
        let (allocation, schedule) = yes_case_schedule(&instance, &graph, &params).unwrap();
        let report = validate_schedule(&instance, &allocation, &schedule);
        check(
            5,
            report.ok,
            &format!(
                "q={q} Q={classes} n={n}: {} violations, first: {:?}",
                report.violations.len(),
                report.violations.first()
            ),
        );
        check(
            5,
            schedule.makespan() == expected,
            &format!("q={q} Q={classes}: makespan {} != {expected}", schedule.makespan()),
        );
        let upper = (q as f64 + 3.0) * classes as f64 / 3.0;
        check(5, expected <= upper, "makespan above (q+3)Q/3");
        let (w_cpu, w_gpu, cp) = load_and_cp(&instance, &allocation);
        check(
            7,
            graham_ok(
                schedule.makespan(),
                w_cpu,
                w_gpu,
                cp,
                instance.cpu_count(),
                instance.gpu_count(),
            ),
            "certificate breaks the load/cp bound",
        );
    }
    println!("criterion 5: pass — certificates validate with makespans 7 and 14");
    println!("criterion 7: pass — load/cp invariant held on the certificates");
}

/// Criterion 6: convergence of the soundness/completeness gap ratio to
/// 3q/(q+3) as Q grows.
#[test]
fn criterion_6_gap_convergence() {
    let q = 3u32;
    let limit = 3.0 * q as f64 / (q as f64 + 3.0);
    let mut previous = f64::NEG_INFINITY;
    let mut final_error = f64::NAN;
    for classes in [10u32, 100, 1000] {
        let eps = 1.0 / (classes as f64 * classes as f64);
        let delta = 1.0 / (2.0 * classes as f64);
        let params = ReductionParams::new(q, classes, 10 * classes, eps, delta).unwrap();
        let report = gap_report(&params);
        let ratio = report.no_lower / report.yes_upper;
        check(
            6,
            ratio > previous,
            &format!("ratio not monotone at Q={classes}"),
        );
        previous = ratio;
        final_error = (ratio - limit).abs();
    }
    check(
        6,
        final_error < 1e-3,
        &format!("|ratio - 3q/(q+3)| = {final_error:.6} at Q=1000, above 1e-3"),
    );
    println!("criterion 6: pass — gap ratio converges to 3q/(q+3)");
}

/// Criterion 8: fixed-seed bench runs are byte-identical.
#[test]
fn criterion_8_bench_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let csv1 = dir.path().join("a.csv");
    let csv2 = dir.path().join("b.csv");
    for csv in [&csv1, &csv2] {
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_hybrid-sched"))
            .args(["bench", "--generate", "10", "--seed", "42", "--csv"])
            .arg(csv)
            .status()
            .unwrap();
        check(8, status.success(), "bench run failed");
    }
    let a = std::fs::read(&csv1).unwrap();
    let b = std::fs::read(&csv2).unwrap();
    check(8, !a.is_empty() && a == b, "CSV outputs differ between runs");
    println!("criterion 8: pass — bench CSV is byte-identical across runs");
}

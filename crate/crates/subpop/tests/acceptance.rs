//! Acceptance suite: one test per release criterion, each verifying an
//! end-to-end guarantee against an independent oracle or a published
//! directional result. Every test prints exactly one pass/fail line in
//! the harness output.

mod common;

use rayon::prelude::*;
use subpop::assess::{epsilon_indicator, hypervolume, mann_whitney_less};
use subpop::de::{crossover, run_de, DeParams, StepObserver};
use subpop::experiment::{
    run_experiment, AlgorithmKind, AlgorithmSettings, ExperimentPlan, ProblemSpec, Profile,
};
use subpop::forces::ForceRecorder;
use subpop::gde3::prune;
use subpop::gsf::run_gsf;
use subpop::novelty::{NoveltyArchive, NoveltyParams, OfferOutcome};
use subpop::problem::{Problem, Sphere};
use subpop::rng::{derive_seed, Purpose, RngStream, StreamKey};
use subpop::solution::Solution;
use subpop::wfg::WfgInstance;

use rand::Rng;
use std::time::Instant;

fn rng(seed: u64) -> RngStream {
    RngStream::new(
        seed,
        StreamKey {
            run: 0,
            subpop: 0,
            purpose: Purpose::Assess,
        },
    )
}

// ---------------------------------------------------------------- 1 ----

/// Bisection oracle for the multiplicative ε-indicator: the smallest
/// factor by which the reference must be inflated so that every
/// reference point is covered by some set point.
fn epsilon_by_bisection(set: &[Vec<f64>], reference: &[Vec<f64>]) -> f64 {
    let covered = |eps: f64| {
        reference.iter().all(|r| {
            set.iter()
                .any(|a| a.iter().zip(r).all(|(&av, &rv)| av <= eps * rv))
        })
    };
    let (mut lo, mut hi) = (1e-9, 1e9);
    assert!(!covered(lo) && covered(hi), "oracle bracket invalid");
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        if covered(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[test]
fn criterion_1_indicator_oracles() {
    let start = Instant::now();

    // ε against bisection on 200 random pairs, 2–5 objectives
    for pair in 0..200u64 {
        let mut r = rng(1000 + pair);
        let m = 2 + (pair % 4) as usize;
        let draw = |r: &mut RngStream, n: usize, m: usize| -> Vec<Vec<f64>> {
            (0..n)
                .map(|_| (0..m).map(|_| r.gen_range(0.05..4.0)).collect())
                .collect()
        };
        let n_set = r.gen_range(1..=20);
        let n_reference = r.gen_range(1..=20);
        let set = draw(&mut r, n_set, m);
        let reference = draw(&mut r, n_reference, m);
        let fast = epsilon_indicator(&set, &reference).unwrap();
        let oracle = epsilon_by_bisection(&set, &reference);
        assert!(
            (fast - oracle).abs() <= 1e-9,
            "pair {pair}: ε {fast} vs oracle {oracle}"
        );
    }

    // 2-D exact hypervolume against a fresh Monte Carlo estimate
    let failures: Vec<String> = (0..100u64)
        .into_par_iter()
        .filter_map(|i| {
            let mut r = rng(7000 + i);
            let n = r.gen_range(2..=20);
            let mut ts: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..1.0)).collect();
            ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            ts.dedup();
            let front: Vec<Vec<f64>> = ts
                .iter()
                .map(|&t| vec![0.1 + 3.2 * t, 0.1 + 2.4 * (1.0 - t).powf(1.3)])
                .collect();
            let reference = [
                front.iter().map(|p| p[0]).fold(f64::MIN, f64::max) + r.gen_range(0.2..1.0),
                front.iter().map(|p| p[1]).fold(f64::MIN, f64::max) + r.gen_range(0.2..1.0),
            ];
            let exact = hypervolume(&front, &reference).unwrap();

            let lo = [
                front.iter().map(|p| p[0]).fold(f64::MAX, f64::min),
                front.iter().map(|p| p[1]).fold(f64::MAX, f64::min),
            ];
            let volume = (reference[0] - lo[0]) * (reference[1] - lo[1]);
            let samples = 1_000_000u64;
            let mut hits = 0u64;
            for _ in 0..samples {
                let z = [
                    r.gen_range(lo[0]..reference[0]),
                    r.gen_range(lo[1]..reference[1]),
                ];
                if front.iter().any(|p| p[0] <= z[0] && p[1] <= z[1]) {
                    hits += 1;
                }
            }
            let p = hits as f64 / samples as f64;
            let estimate = p * volume;
            let se = (p * (1.0 - p) / samples as f64).sqrt() * volume;
            ((exact - estimate).abs() > 4.0 * se).then(|| {
                format!("front {i}: exact {exact} vs MC {estimate} (se {se})")
            })
        })
        .collect();
    assert!(failures.is_empty(), "{failures:?}");
    assert!(
        start.elapsed().as_secs() < 60,
        "criterion 1 exceeded one minute: {:?}",
        start.elapsed()
    );
}

// ---------------------------------------------------------------- 2 ----

#[test]
fn criterion_2_wfg_fidelity() {
    let start = Instant::now();
    for family in 1..=9u8 {
        for m in [2usize, 5] {
            common::check_wfg_golden(family, m, 1e-9);
        }
    }
    // WFG4's front lies on the ellipsoid Σ (f_m / 2m)² = 1
    for m in [2usize, 5] {
        let problem = WfgInstance::standard(4, m).unwrap();
        let mut r = rng(40_000 + m as u64);
        for point in problem.front_sample(1000, &mut r).unwrap() {
            let sum: f64 = point
                .iter()
                .enumerate()
                .map(|(j, &f)| {
                    let radius = 2.0 * (j as f64 + 1.0);
                    (f / radius) * (f / radius)
                })
                .sum();
            assert!(
                (sum - 1.0).abs() <= 1e-6,
                "WFG4 M={m} front point off the ellipsoid: Σ = {sum}"
            );
        }
    }
    assert!(
        start.elapsed().as_secs() < 60,
        "criterion 2 exceeded one minute: {:?}",
        start.elapsed()
    );
}

// ---------------------------------------------------------------- 3 ----

/// Pass-through problem: the first `m` decision components are the
/// objectives; the last component is a unique identity tag.
#[derive(Debug)]
struct Tagged {
    m: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Tagged {
    fn new(m: usize) -> Self {
        Self {
            m,
            lower: vec![-1e9; m + 1],
            upper: vec![1e9; m + 1],
        }
    }
}

impl Problem for Tagged {
    fn id(&self) -> &str {
        "tagged"
    }
    fn num_objectives(&self) -> usize {
        self.m
    }
    fn dim(&self) -> usize {
        self.m + 1
    }
    fn lower(&self) -> &[f64] {
        &self.lower
    }
    fn upper(&self) -> &[f64] {
        &self.upper
    }
    fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        x[..self.m].to_vec()
    }
}

/// Independent dominance check for the rank oracle.
fn dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y)
}

/// Nondominated-sorting ranks by repeated peeling.
fn ranks_by_peeling(points: &[Vec<f64>]) -> Vec<usize> {
    let n = points.len();
    let mut rank = vec![usize::MAX; n];
    let mut assigned = 0;
    let mut level = 0;
    while assigned < n {
        let frontier: Vec<usize> = (0..n)
            .filter(|&i| rank[i] == usize::MAX)
            .filter(|&i| {
                !(0..n).any(|j| {
                    rank[j] == usize::MAX && j != i && dominates(&points[j], &points[i])
                })
            })
            .collect();
        assert!(!frontier.is_empty(), "peeling stalled");
        for i in frontier {
            rank[i] = level;
            assigned += 1;
        }
        level += 1;
    }
    rank
}

#[test]
fn criterion_3_operator_analytics() {
    // crossover always inherits at least one mutant component
    let mut r = rng(31);
    let x = vec![0.0; 10];
    let v = vec![1.0; 10];
    for trial in 0..100_000u32 {
        let cr = [0.0, 0.1, 0.5, 0.9][(trial % 4) as usize];
        let u = crossover(&x, &v, cr, &mut r).unwrap();
        let inherited = u.iter().filter(|&&c| c == 1.0).count();
        assert!(inherited >= 1, "trial {trial}: no mutant component at CR={cr}");
    }

    // prune never drops a better rank while keeping a worse one
    let mut r = rng(32);
    for pop_idx in 0..500u32 {
        let m = if r.gen_range(0..2) == 0 { 2 } else { 3 };
        let problem = Tagged::new(m);
        let n = r.gen_range(6..=40);
        let target = r.gen_range(1..=n);
        let pop: Vec<Solution> = (0..n)
            .map(|i| {
                let mut x: Vec<f64> = (0..m)
                    .map(|_| {
                        if r.gen_range(0..10) < 3 {
                            // grid values provoke duplicates and ties
                            0.5 * r.gen_range(1..=4) as f64
                        } else {
                            r.gen_range(0.0..3.0)
                        }
                    })
                    .collect();
                x.push(i as f64);
                Solution::evaluated(x, &problem)
            })
            .collect();
        let points: Vec<Vec<f64>> = pop.iter().map(|s| s.f().to_vec()).collect();
        let rank = ranks_by_peeling(&points);
        let survivors = prune(pop.clone(), target, 2).unwrap();
        assert_eq!(survivors.len(), target, "population {pop_idx}");
        let kept: Vec<usize> = survivors
            .iter()
            .map(|s| s.x()[m] as usize)
            .collect();
        let mut seen = vec![false; n];
        for &i in &kept {
            assert!(!seen[i], "population {pop_idx}: member {i} kept twice");
            seen[i] = true;
        }
        let cut = kept.iter().map(|&i| rank[i]).max().unwrap();
        for i in 0..n {
            if rank[i] < cut {
                assert!(
                    seen[i],
                    "population {pop_idx}: rank-{} member {i} dropped while a \
                     rank-{cut} member survived",
                    rank[i]
                );
            }
        }
    }

    // archive threshold follows n_min0·n_inc^A·n_dec^R exactly
    let problem = Tagged::new(2);
    let params = NoveltyParams::new(5, 0.4, 1.1, 0.999, 1, 200).unwrap();
    let mut archive = NoveltyArchive::new(params);
    let mut r = rng(33);
    let (mut accepts_since_raise, mut streak) = (0u32, 0u32);
    let (mut raises, mut decays) = (0u32, 0u32);
    for i in 0..100_000u64 {
        let x = vec![r.gen_range(0.0..4.0), r.gen_range(0.0..4.0), i as f64];
        let candidate = Solution::evaluated(x, &problem);
        match archive.offer(&candidate, i).unwrap() {
            OfferOutcome::Accepted => {
                streak = 0;
                accepts_since_raise += 1;
                if accepts_since_raise > 1 {
                    raises += 1;
                    accepts_since_raise = 0;
                }
            }
            OfferOutcome::Rejected => {
                streak += 1;
                if streak >= 200 {
                    decays += 1;
                    streak = 0;
                }
            }
            OfferOutcome::Infeasible => unreachable!("bounds are wide"),
        }
    }
    assert_eq!(archive.offers(), 100_000);
    assert_eq!(archive.threshold_events(), (raises, decays));
    assert!(raises > 0 && decays > 0, "stream must exercise both events");
    let expected = 0.4 * 1.1f64.powi(raises as i32) * 0.999f64.powi(decays as i32);
    assert_eq!(
        archive.n_min(),
        expected,
        "threshold identity must hold to the last bit"
    );
}

// ---------------------------------------------------------------- 4 ----

#[test]
fn criterion_4_desk_scale_epsilon_ordering() {
    let start = Instant::now();
    let (runs, generations, total_size) = (10u32, 2000u64, 100usize);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap();

    // (algorithm, family) cells; MONA only competes on WFG1
    let cells: Vec<(AlgorithmKind, u8)> = vec![
        (AlgorithmKind::San, 1),
        (AlgorithmKind::San, 2),
        (AlgorithmKind::San, 3),
        (AlgorithmKind::Gde3, 1),
        (AlgorithmKind::Gde3, 2),
        (AlgorithmKind::Gde3, 3),
        (AlgorithmKind::Mona, 1),
    ];
    let jobs: Vec<(usize, u32)> = (0..cells.len())
        .flat_map(|c| (0..runs).map(move |r| (c, r)))
        .collect();

    let fronts: Vec<Vec<Vec<f64>>> = [1u8, 2, 3]
        .iter()
        .map(|&family| {
            let problem = WfgInstance::standard(family, 2).unwrap();
            problem
                .front_sample(10_000, &mut rng(4000 + family as u64))
                .unwrap()
        })
        .collect();

    let eps: Vec<f64> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, run)| {
                let (kind, family) = cells[c];
                let problem = WfgInstance::standard(family, 2).unwrap();
                let cfg = AlgorithmSettings::defaults(kind)
                    .build_config(&problem, total_size, generations)
                    .unwrap();
                let seed = derive_seed(0xD15C0, c as u64, family as u64, run as u64);
                let result = run_gsf(&problem, &cfg, seed, &mut subpop::de::NoObserver).unwrap();
                let points: Vec<Vec<f64>> =
                    result.final_set.iter().map(|s| s.f().to_vec()).collect();
                epsilon_indicator(&points, &fronts[family as usize - 1]).unwrap()
            })
            .collect()
    });
    let sample = |c: usize| -> Vec<f64> {
        (0..runs as usize).map(|r| eps[c * runs as usize + r]).collect()
    };

    let median = |mut v: Vec<f64>| -> f64 {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        0.5 * (v[v.len() / 2] + v[(v.len() - 1) / 2])
    };

    // Evaluate every directional claim before failing so a red run still
    // reports the complete picture.
    let mut failures: Vec<String> = Vec::new();
    for family in 0..3usize {
        let san = sample(family);
        let gde3 = sample(3 + family);
        let p = mann_whitney_less(&san, &gde3).unwrap();
        let verdict = if p < 0.05 { "pass" } else { "FAIL" };
        println!(
            "WFG{} ε: SAN median {:.3e} vs GDE3 median {:.3e}, one-sided p = {:.2e} [{verdict}]",
            family + 1,
            median(san),
            median(gde3),
            p
        );
        if !(p < 0.05) {
            failures.push(format!("SAN vs GDE3 on WFG{}: p = {p:.3}", family + 1));
        }
    }
    let san_wfg1 = sample(0);
    let mona_wfg1 = sample(6);
    let p = mann_whitney_less(&san_wfg1, &mona_wfg1).unwrap();
    let verdict = if p < 0.05 { "pass" } else { "FAIL" };
    println!(
        "WFG1 ε: SAN median {:.3e} vs MONA median {:.3e}, one-sided p = {:.2e} [{verdict}]",
        median(san_wfg1),
        median(mona_wfg1),
        p
    );
    if !(p < 0.05) {
        failures.push(format!("SAN vs standalone MONA on WFG1: p = {p:.3}"));
    }
    assert!(
        start.elapsed().as_secs() <= 20 * 60,
        "criterion 4 exceeded twenty minutes: {:?}",
        start.elapsed()
    );
    assert!(
        failures.is_empty(),
        "directional claims not met at this budget: {}",
        failures.join("; ")
    );
}

// ---------------------------------------------------------------- 5 ----

#[test]
fn criterion_5_single_objective_de_on_sphere() {
    let start = Instant::now();
    let problem = Sphere::new(10);
    let params = DeParams::new(0.5, 0.6).unwrap();
    for seed in 0..10u64 {
        let run = run_de(&problem, &params, 50, 1000, seed).unwrap();
        assert!(
            run.best.f()[0] < 1e-6,
            "seed {seed} finished at {:.3e}",
            run.best.f()[0]
        );
    }
    assert!(
        start.elapsed().as_secs() < 10,
        "criterion 5 exceeded ten seconds: {:?}",
        start.elapsed()
    );
}

// ---------------------------------------------------------------- 6 ----

/// Recorder wrapper asserting the conservation identity after every
/// recorded force.
struct Conserving(ForceRecorder);

impl StepObserver for Conserving {
    fn before_selection(&mut self, subpop: usize, parent: &Solution, trial: &Solution) {
        self.0.before_selection(subpop, parent, trial);
        assert!(
            self.0.subpop(subpop).is_conserved(),
            "conservation broken mid-run"
        );
    }
}

#[test]
fn criterion_6_force_histograms_separate_san_from_gde3() {
    let problem = WfgInstance::standard(4, 2).unwrap();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap();
    let mut totals = Vec::new();
    for kind in [AlgorithmKind::San, AlgorithmKind::Gde3] {
        let cfg = AlgorithmSettings::defaults(kind)
            .build_config(&problem, 100, 2000)
            .unwrap();
        let recorders: Vec<ForceRecorder> = pool.install(|| {
            (0..10u64)
                .into_par_iter()
                .map(|run| {
                    let mut observer = Conserving(ForceRecorder::new(cfg.strategies.len()));
                    let seed = derive_seed(0xF0DCE, kind as u64, 4, run);
                    run_gsf(&problem, &cfg, seed, &mut observer).unwrap();
                    observer.0
                })
                .collect()
        });
        let merged = recorders
            .into_iter()
            .reduce(|mut sum, next| {
                sum.merge(&next);
                sum
            })
            .unwrap();
        let total = merged.total();
        assert!(total.is_conserved());
        totals.push(total);
    }
    let (san, gde3) = (&totals[0], &totals[1]);
    let min_share = |h: &subpop::forces::ForceHistogram| {
        h.quadrant_shares().iter().cloned().fold(f64::MAX, f64::min)
    };
    let (san_min, gde3_min) = (min_share(san), min_share(gde3));
    println!(
        "zero-modulus: GDE3 {:.2}% vs SAN {:.2}%; min quadrant share: SAN {:.2}% vs GDE3 {:.2}%",
        100.0 * gde3.zero_modulus_fraction(),
        100.0 * san.zero_modulus_fraction(),
        100.0 * san_min,
        100.0 * gde3_min,
    );
    let mut failures: Vec<String> = Vec::new();
    if gde3.zero_modulus_fraction() <= san.zero_modulus_fraction() {
        failures.push(format!(
            "GDE3 must discard more zero-displacement trials than SAN ({:.4} vs {:.4})",
            gde3.zero_modulus_fraction(),
            san.zero_modulus_fraction()
        ));
    }
    if san_min < 0.05 {
        failures.push(format!(
            "SAN must push in all four quadrants (min share {san_min:.4})"
        ));
    }
    if san_min <= gde3_min {
        failures.push(format!(
            "SAN's weakest direction must still beat GDE3's ({san_min:.4} vs {gde3_min:.4})"
        ));
    }
    assert!(
        failures.is_empty(),
        "force-histogram claims not met at this budget: {}",
        failures.join("; ")
    );
}

// ---------------------------------------------------------------- 7 ----

#[test]
fn criterion_7_rank_sum_calibration() {
    // textbook exact case
    let p = mann_whitney_less(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
    assert_eq!(p, 1.0 / 6.0, "exact enumeration must give 1/6");

    // under H₀ the test rejects at 5% within ±1%
    let mut r = rng(77);
    let sims = 10_000;
    let mut rejections = 0u32;
    for _ in 0..sims {
        let a: Vec<f64> = (0..20).map(|_| r.gen_range(0.0..1.0)).collect();
        let b: Vec<f64> = (0..20).map(|_| r.gen_range(0.0..1.0)).collect();
        if mann_whitney_less(&a, &b).unwrap() < 0.05 {
            rejections += 1;
        }
    }
    let rate = f64::from(rejections) / f64::from(sims);
    println!("H₀ rejection rate over {sims} simulations: {rate:.4}");
    assert!(
        (rate - 0.05).abs() <= 0.01,
        "rejection rate {rate} outside 0.05 ± 0.01"
    );
}

// ---------------------------------------------------------------- 8 ----

#[test]
fn criterion_8_manifest_rerun_is_bitwise_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut plan = ExperimentPlan::preset(
        Profile::Desk,
        vec![
            ProblemSpec { family: 1, m: 2 },
            ProblemSpec { family: 4, m: 5 },
        ],
        &[AlgorithmKind::San, AlgorithmKind::Gde3],
        0xB17,
    );
    plan.runs = 3;
    plan.generations = 40;
    plan.total_size = 24;
    plan.front_size = 500;
    plan.hv_samples = 20_000;

    let first = dir.path().join("first");
    run_experiment(&plan, &first, 3).unwrap();
    let manifest = ExperimentPlan::load(&first.join("manifest.cfg")).unwrap();
    let second = dir.path().join("second");
    run_experiment(&manifest, &second, 1).unwrap();

    let mut compared = 0;
    for problem in ["wfg1_m2", "wfg4_m5"] {
        for alg in ["san", "gde3"] {
            for run in 1..=3 {
                let rel = format!("{problem}/{alg}/run_{run:02}.sol");
                let a = std::fs::read(first.join(&rel)).unwrap();
                let b = std::fs::read(second.join(&rel)).unwrap();
                assert_eq!(a, b, "{rel} differs between manifest reruns");
                compared += 1;
            }
        }
    }
    assert_eq!(compared, 12, "every solution file must be compared");
    assert_eq!(
        std::fs::read(first.join("manifest.cfg")).unwrap(),
        std::fs::read(second.join("manifest.cfg")).unwrap(),
        "manifest must round-trip bitwise"
    );
}

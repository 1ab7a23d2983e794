//! Experiment execution: run every (algorithm, problem, run) cell of the
//! plan on a worker pool and lay the results out on disk.
//!
//! Output tree, with one directory per problem and one per algorithm:
//!
//! ```text
//! out/
//!   manifest.cfg            resolved plan; rerunning it reproduces all runs
//!   summary.txt             indicator means and spreads, best flagged
//!   wfg1_m2/
//!     reference_front.txt   sampled optimal front
//!     mann_whitney.txt      pairwise one-sided p-values per indicator
//!     attainment.txt        median attainment surfaces (two objectives)
//!     san/
//!       run_01.sol …        final solution sets, one per run
//!       run_01.forces …     per-run force histograms (two objectives)
//!       indicators.txt      per-run ε and hypervolume difference
//!       forces.txt          force histograms merged over runs
//! ```

use crate::assess::{
    epsilon_indicator, hypervolume_indicator, median_attainment_surface, summarize,
    mann_whitney_less,
};
use crate::de::{NoObserver, StepObserver};
use crate::error::{Error, Result};
use crate::experiment::files::{
    render_indicator_table, write_front, write_solution_set,
};
use crate::experiment::plan::ExperimentPlan;
use crate::forces::ForceRecorder;
use crate::gsf::run_gsf;
use crate::problem::Problem;
use crate::rng::{derive_seed, Purpose, RngStream, StreamKey};
use crate::solution::Solution;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::Path;

/// Seed namespace for reference-front sampling (outside the algorithm
/// index range).
const FRONT_SALT: u64 = u64::MAX;
/// Seed namespace base for Monte Carlo hypervolume streams.
const HV_SALT: u64 = u64::MAX - 1;

fn assess_rng(seed: u64) -> RngStream {
    RngStream::new(
        seed,
        StreamKey {
            run: 0,
            subpop: 0,
            purpose: Purpose::Assess,
        },
    )
}

/// One finished run.
struct RunOutput {
    seed: u64,
    final_set: Vec<Solution>,
    forces: Option<ForceRecorder>,
}

fn execute_cell(
    plan: &ExperimentPlan,
    pi: usize,
    ai: usize,
    run: u32,
) -> Result<RunOutput> {
    let problem = plan.problems[pi].instance()?;
    let alg = &plan.algorithms[ai];
    let cfg = alg.build_config(&problem, plan.total_size, plan.generations)?;
    let seed = derive_seed(plan.seed, ai as u64, pi as u64, run as u64);
    let two_objectives = problem.num_objectives() == 2;
    let mut recorder = ForceRecorder::new(cfg.strategies.len());
    let mut silent = NoObserver;
    let observer: &mut dyn StepObserver = if two_objectives {
        &mut recorder
    } else {
        &mut silent
    };
    let result = run_gsf(&problem, &cfg, seed, observer)?;
    Ok(RunOutput {
        seed,
        final_set: result.final_set,
        forces: two_objectives.then_some(recorder),
    })
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path.display().to_string(), e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Runs the whole plan on `workers` threads (0 = one per CPU) and writes
/// the result tree under `out`.
pub fn run_experiment(plan: &ExperimentPlan, out: &Path, workers: usize) -> Result<()> {
    plan.validate()?;
    create_dir(out)?;
    write_text(&out.join("manifest.cfg"), &plan.render())?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::BadInstance(format!("cannot build worker pool: {e}")))?;

    let n_alg = plan.algorithms.len();
    let runs = plan.runs as usize;
    let cells: Vec<(usize, usize, u32)> = (0..plan.problems.len())
        .flat_map(|pi| {
            (0..n_alg).flat_map(move |ai| (0..runs as u32).map(move |r| (pi, ai, r)))
        })
        .collect();
    let outputs: Vec<RunOutput> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(pi, ai, r)| execute_cell(plan, pi, ai, r))
            .collect::<Result<Vec<_>>>()
    })?;
    let output = |pi: usize, ai: usize, r: usize| &outputs[(pi * n_alg + ai) * runs + r];

    let mut summary = String::from(
        "# indicator mean(sd) per algorithm; `*` flags means within one\n\
         # standard deviation of the best mean (smaller is better)\n",
    );
    for (pi, spec) in plan.problems.iter().enumerate() {
        let problem = spec.instance()?;
        let m = problem.num_objectives();
        let problem_dir = out.join(spec.dir_name());
        create_dir(&problem_dir)?;

        let front_seed = derive_seed(plan.seed, FRONT_SALT, pi as u64, 0);
        let mut front_rng = assess_rng(front_seed);
        let front = problem.front_sample(plan.front_size, &mut front_rng)?;
        write_front(
            &problem_dir.join("reference_front.txt"),
            &spec.to_string(),
            front_seed,
            &front,
        )?;

        // indicators for every run of every algorithm, in parallel — the
        // Monte Carlo hypervolume above three objectives is the costly part
        let cells: Vec<(usize, usize)> = (0..n_alg)
            .flat_map(|ai| (0..runs).map(move |r| (ai, r)))
            .collect();
        let indicator_rows: Vec<(f64, f64, f64)> = pool.install(|| {
            cells
                .par_iter()
                .map(|&(ai, r)| {
                    let points: Vec<Vec<f64>> = output(pi, ai, r)
                        .final_set
                        .iter()
                        .map(|s| s.f().to_vec())
                        .collect();
                    let eps = epsilon_indicator(&points, &front)?;
                    let mut hv_rng = assess_rng(derive_seed(
                        plan.seed,
                        HV_SALT - ai as u64,
                        pi as u64,
                        r as u64,
                    ));
                    let (hv, se) =
                        hypervolume_indicator(&points, &front, plan.hv_samples, &mut hv_rng)?;
                    Ok((eps, hv, se))
                })
                .collect::<Result<Vec<_>>>()
        })?;
        let indicators = |ai: usize, r: usize| indicator_rows[ai * runs + r];

        for (ai, alg) in plan.algorithms.iter().enumerate() {
            let alg_dir = problem_dir.join(alg.kind.to_string());
            create_dir(&alg_dir)?;
            let mut table = Vec::with_capacity(runs);
            let mut merged: Option<ForceRecorder> = None;
            for r in 0..runs {
                let cell = output(pi, ai, r);
                write_solution_set(
                    &alg_dir.join(format!("run_{:02}.sol", r + 1)),
                    &spec.to_string(),
                    cell.seed,
                    m,
                    &cell.final_set,
                )?;
                let (eps, hv, se) = indicators(ai, r);
                table.push((r as u32 + 1, eps, hv, se));
                if let Some(recorder) = &cell.forces {
                    let labels = alg.subpop_labels(m);
                    let mut text = Vec::new();
                    recorder
                        .write_report(&mut text, &labels)
                        .expect("in-memory write cannot fail");
                    write_text(
                        &alg_dir.join(format!("run_{:02}.forces", r + 1)),
                        &String::from_utf8(text).expect("report is utf-8"),
                    )?;
                    match &mut merged {
                        None => merged = Some(recorder.clone()),
                        Some(total) => total.merge(recorder),
                    }
                }
            }
            write_text(
                &alg_dir.join("indicators.txt"),
                &render_indicator_table(&table),
            )?;
            if let Some(total) = merged {
                let labels = alg.subpop_labels(m);
                let mut text = Vec::new();
                total
                    .write_report(&mut text, &labels)
                    .expect("in-memory write cannot fail");
                write_text(
                    &alg_dir.join("forces.txt"),
                    &String::from_utf8(text).expect("report is utf-8"),
                )?;
            }
        }

        // pairwise rank-sum tables, one block per indicator
        if n_alg >= 2 && runs >= 2 {
            let mut text = String::from(
                "# one-sided p-values that the row algorithm's indicator sample\n\
                 # is smaller (better) than the column algorithm's\n",
            );
            for (label, pick) in [
                ("epsilon", 0usize),
                ("hypervolume_diff", 1usize),
            ] {
                writeln!(text, "[{label}]").unwrap();
                let names: Vec<String> = plan
                    .algorithms
                    .iter()
                    .map(|a| a.kind.to_string())
                    .collect();
                writeln!(text, "# columns: {}", names.join(" ")).unwrap();
                for ai in 0..n_alg {
                    let mut row = vec![names[ai].clone()];
                    for aj in 0..n_alg {
                        if ai == aj {
                            row.push("-".into());
                            continue;
                        }
                        let a: Vec<f64> = (0..runs)
                            .map(|r| {
                                let v = indicators(ai, r);
                                if pick == 0 {
                                    v.0
                                } else {
                                    v.1
                                }
                            })
                            .collect();
                        let b: Vec<f64> = (0..runs)
                            .map(|r| {
                                let v = indicators(aj, r);
                                if pick == 0 {
                                    v.0
                                } else {
                                    v.1
                                }
                            })
                            .collect();
                        row.push(format!("{:.6e}", mann_whitney_less(&a, &b)?));
                    }
                    writeln!(text, "{}", row.join(" ")).unwrap();
                }
            }
            write_text(&problem_dir.join("mann_whitney.txt"), &text)?;
        }

        // median attainment surfaces for two-objective problems
        if m == 2 && runs >= 2 {
            let mut text = String::from(
                "# median attainment surface per algorithm: the staircase\n\
                 # weakly attained by at least half the runs\n",
            );
            for (ai, alg) in plan.algorithms.iter().enumerate() {
                let run_sets: Vec<Vec<Vec<f64>>> = (0..runs)
                    .map(|r| {
                        output(pi, ai, r)
                            .final_set
                            .iter()
                            .map(|s| s.f().to_vec())
                            .collect()
                    })
                    .collect();
                let surface = median_attainment_surface(&run_sets)?;
                writeln!(text, "[{}]", alg.kind).unwrap();
                for p in surface {
                    writeln!(text, "{:.16e} {:.16e}", p[0], p[1]).unwrap();
                }
            }
            write_text(&problem_dir.join("attainment.txt"), &text)?;
        }

        // summary rows: one per algorithm, both indicators
        let eps_samples: Vec<Vec<f64>> = (0..n_alg)
            .map(|ai| (0..runs).map(|r| indicators(ai, r).0).collect())
            .collect();
        let hv_samples: Vec<Vec<f64>> = (0..n_alg)
            .map(|ai| (0..runs).map(|r| indicators(ai, r).1).collect())
            .collect();
        let eps_summary = summarize(&eps_samples)?;
        let hv_summary = summarize(&hv_samples)?;
        writeln!(summary, "\n[{spec}]").unwrap();
        writeln!(summary, "# algorithm epsilon hypervolume_diff").unwrap();
        for (ai, alg) in plan.algorithms.iter().enumerate() {
            let e = &eps_summary[ai];
            let h = &hv_summary[ai];
            writeln!(
                summary,
                "{} {:.6}({:.6}){} {:.6}({:.6}){}",
                alg.kind,
                e.mean,
                e.sd,
                if e.best { "*" } else { "" },
                h.mean,
                h.sd,
                if h.best { "*" } else { "" },
            )
            .unwrap();
        }
    }
    write_text(&out.join("summary.txt"), &summary)?;
    Ok(())
}

/// Computes ε and hypervolume-difference indicators for a solution-set
/// file against a reference-front file. Returns `(epsilon,
/// hypervolume_diff, hypervolume_se)`.
pub fn indicators_for_files(
    solution_set: &Path,
    reference_front: &Path,
    hv_samples: u64,
    seed: u64,
) -> Result<(f64, f64, f64)> {
    use crate::experiment::files::read_points;
    let set = read_points(solution_set)?;
    let front = read_points(reference_front)?;
    let eps = epsilon_indicator(&set, &front)?;
    let mut rng = assess_rng(seed);
    let (hv, se) = hypervolume_indicator(&set, &front, hv_samples, &mut rng)?;
    Ok((eps, hv, se))
}

/// Re-summarizes indicator tables from one or more result directories and
/// renders comparison tables (means, spreads, pairwise rank-sum tests).
///
/// Every directory is scanned for `<problem>/<algorithm>/indicators.txt`;
/// when several directories are given, labels are prefixed with the
/// directory name so the same algorithm from different experiments can be
/// compared.
pub fn compare_results(dirs: &[std::path::PathBuf]) -> Result<String> {
    use crate::experiment::files::read_indicator_table;
    use std::collections::BTreeMap;

    if dirs.is_empty() {
        return Err(Error::EmptyInput("no result directories"));
    }
    // problem name → (label → (ε sample, hv sample))
    let mut problems: BTreeMap<String, Vec<(String, Vec<f64>, Vec<f64>)>> = BTreeMap::new();
    for dir in dirs {
        let prefix = if dirs.len() > 1 {
            let name = dir
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| dir.display().to_string());
            format!("{name}:")
        } else {
            String::new()
        };
        let entries =
            std::fs::read_dir(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(dir.display().to_string(), e))?;
            let problem_dir = entry.path();
            if !problem_dir.is_dir() {
                continue;
            }
            let problem_name = entry.file_name().to_string_lossy().into_owned();
            let inner = std::fs::read_dir(&problem_dir)
                .map_err(|e| Error::io(problem_dir.display().to_string(), e))?;
            for alg_entry in inner {
                let alg_entry =
                    alg_entry.map_err(|e| Error::io(problem_dir.display().to_string(), e))?;
                let table = alg_entry.path().join("indicators.txt");
                if !table.is_file() {
                    continue;
                }
                let rows = read_indicator_table(&table)?;
                let label = format!(
                    "{prefix}{}",
                    alg_entry.file_name().to_string_lossy()
                );
                let eps = rows.iter().map(|r| r.1).collect();
                let hv = rows.iter().map(|r| r.2).collect();
                problems
                    .entry(problem_name.clone())
                    .or_default()
                    .push((label, eps, hv));
            }
        }
    }
    if problems.is_empty() {
        return Err(Error::EmptyInput("no indicator tables found"));
    }
    let mut out = String::from(
        "# indicator comparison; `*` flags means within one standard\n\
         # deviation of the best mean; p(a<b) from one-sided rank-sum tests\n",
    );
    for (problem, mut groups) in problems {
        groups.sort_by(|a, b| a.0.cmp(&b.0));
        writeln!(out, "\n[{problem}]").unwrap();
        for (label, pick) in [("epsilon", 0usize), ("hypervolume_diff", 1usize)] {
            let samples: Vec<Vec<f64>> = groups
                .iter()
                .map(|g| if pick == 0 { g.1.clone() } else { g.2.clone() })
                .collect();
            let stats = summarize(&samples)?;
            writeln!(out, "{label}:").unwrap();
            for (g, s) in groups.iter().zip(&stats) {
                writeln!(
                    out,
                    "  {} {:.6}({:.6}){}",
                    g.0,
                    s.mean,
                    s.sd,
                    if s.best { "*" } else { "" }
                )
                .unwrap();
            }
            if groups.len() >= 2 && samples.iter().all(|s| s.len() >= 2) {
                for i in 0..groups.len() {
                    for j in 0..groups.len() {
                        if i == j {
                            continue;
                        }
                        let p = mann_whitney_less(&samples[i], &samples[j])?;
                        writeln!(
                            out,
                            "  p({} < {}) = {:.6e}",
                            groups[i].0, groups[j].0, p
                        )
                        .unwrap();
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Summarizes the merged force histograms of a result directory: one line
/// per (problem, algorithm) with exclusion percentages and quadrant
/// shares.
pub fn forces_summary(dir: &Path) -> Result<String> {
    use crate::forces::parse_report;

    let mut lines: Vec<String> = Vec::new();
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let mut problem_dirs: Vec<std::path::PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    problem_dirs.sort();
    for problem_dir in problem_dirs {
        let problem = problem_dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let inner = std::fs::read_dir(&problem_dir)
            .map_err(|e| Error::io(problem_dir.display().to_string(), e))?;
        let mut alg_dirs: Vec<std::path::PathBuf> = inner
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.join("forces.txt").is_file())
            .collect();
        alg_dirs.sort();
        for alg_dir in alg_dirs {
            let text = std::fs::read_to_string(alg_dir.join("forces.txt"))
                .map_err(|e| Error::io(alg_dir.display().to_string(), e))?;
            let blocks = parse_report(&text)?;
            let Some((_, total)) = blocks.iter().find(|(label, _)| label == "total") else {
                continue;
            };
            let q = total.quadrant_shares();
            lines.push(format!(
                "{problem} {} offers={} zero_modulus={:.2}% infeasible={:.2}% \
                 quadrant_shares={:.3} {:.3} {:.3} {:.3}",
                alg_dir
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                total.offers(),
                100.0 * total.zero_modulus_fraction(),
                100.0 * total.infeasible() as f64 / total.offers().max(1) as f64,
                q[0],
                q[1],
                q[2],
                q[3],
            ));
        }
    }
    if lines.is_empty() {
        return Err(Error::EmptyInput("no force reports found"));
    }
    Ok(format!(
        "# merged force histograms per problem and algorithm\n{}\n",
        lines.join("\n")
    ))
}

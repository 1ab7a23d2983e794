//! Novelty-driven multi-objective search (MONA).
//!
//! MONA keeps an archive of behaviorally novel solutions, where behavior is
//! the objective vector. A candidate enters the archive when its mean
//! distance to the `k` nearest archived behaviors exceeds an adaptive
//! threshold `n_min`. The population itself carries no fitness pressure: each
//! generation it is resampled uniformly from the archive, and the archive's
//! non-dominated subset is the algorithm's output.

use rand::Rng;

use crate::de::{crossover, distinct_parent_indices, mutate, DeParams, NoObserver, ParentSampler, StepObserver};
use crate::dominance::nondominated_filter;
use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::rng::{Purpose, RngStream, StreamKey};
use crate::solution::Solution;

/// Novelty-archive control parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoveltyParams {
    /// Nearest neighbours averaged in the novelty score.
    pub k: usize,
    /// Initial acceptance threshold.
    pub n_min0: f64,
    /// Threshold multiplier applied after a burst of acceptances (> 1).
    pub n_inc: f64,
    /// Threshold multiplier applied after a drought of rejections (< 1).
    pub n_dec: f64,
    /// Acceptance count that must be exceeded to trigger an increase.
    pub n_a: u32,
    /// Consecutive rejections that trigger a decrease.
    pub n_r: u32,
    /// Hard cap on archive size; exceeding it aborts the run.
    pub max_entries: Option<usize>,
}

impl NoveltyParams {
    /// Paper-style defaults apart from the problem-dependent `n_min0`.
    pub fn new(k: usize, n_min0: f64, n_inc: f64, n_dec: f64, n_a: u32, n_r: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::ParameterRange {
                name: "k",
                value: 0.0,
                range: "[1, ∞)",
            });
        }
        if !(n_min0 > 0.0) {
            return Err(Error::ParameterRange {
                name: "n_min0",
                value: n_min0,
                range: "(0, ∞)",
            });
        }
        if !(n_inc >= 1.0) {
            return Err(Error::ParameterRange {
                name: "n_inc",
                value: n_inc,
                range: "[1, ∞)",
            });
        }
        if !(n_dec > 0.0 && n_dec <= 1.0) {
            return Err(Error::ParameterRange {
                name: "n_dec",
                value: n_dec,
                range: "(0, 1]",
            });
        }
        if n_r == 0 {
            return Err(Error::ParameterRange {
                name: "n_r",
                value: 0.0,
                range: "[1, ∞)",
            });
        }
        Ok(Self {
            k,
            n_min0,
            n_inc,
            n_dec,
            n_a,
            n_r,
            max_entries: None,
        })
    }

    /// Sets the archive-size hard cap.
    pub fn with_cap(mut self, cap: usize) -> Self {
        self.max_entries = Some(cap);
        self
    }
}

/// One archived solution with its acceptance context.
#[derive(Debug, Clone)]
pub struct ArchiveEntry {
    /// The archived solution; its objective vector is the behavior.
    pub solution: Solution,
    /// Generation at which it was accepted.
    pub generation: u64,
    /// Threshold value in force when it was accepted.
    pub n_min_at_acceptance: f64,
}

/// Outcome of offering one candidate to the archive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OfferOutcome {
    /// Candidate was novel enough and is now archived.
    Accepted,
    /// Candidate's novelty did not exceed the threshold.
    Rejected,
    /// Candidate is outside the feasible box and has no valid behavior;
    /// the archive and its threshold dynamics are untouched.
    Infeasible,
}

/// Mean distance from `behavior` to its `k` nearest behaviors in `archive`.
///
/// An empty archive yields `+∞` (the first candidate is always novel); with
/// fewer than `k` entries the mean runs over all of them.
pub fn novelty_score(behavior: &[f64], archive: &[ArchiveEntry], k: usize) -> f64 {
    if archive.is_empty() {
        return f64::INFINITY;
    }
    let mut dists: Vec<f64> = archive
        .iter()
        .map(|e| {
            behavior
                .iter()
                .zip(e.solution.f())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    dists.sort_by(f64::total_cmp);
    let take = k.min(dists.len());
    dists[..take].iter().sum::<f64>() / take as f64
}

/// The adaptive novelty archive.
///
/// The acceptance threshold is maintained through event counters: after more
/// than `n_a` acceptances it is multiplied by `n_inc`, after `n_r`
/// consecutive rejections by `n_dec`. The current value always satisfies
/// `n_min = n_min0 · n_inc^increases · n_dec^decreases` exactly, because it
/// is recomputed from the event exponents rather than accumulated.
#[derive(Debug, Clone)]
pub struct NoveltyArchive {
    params: NoveltyParams,
    entries: Vec<ArchiveEntry>,
    increases: u32,
    decreases: u32,
    accepted_since_increase: u32,
    rejection_streak: u32,
    offers: u64,
}

impl NoveltyArchive {
    /// Empty archive with threshold `n_min0`.
    pub fn new(params: NoveltyParams) -> Self {
        Self {
            params,
            entries: Vec::new(),
            increases: 0,
            decreases: 0,
            accepted_since_increase: 0,
            rejection_streak: 0,
            offers: 0,
        }
    }

    /// Current acceptance threshold.
    pub fn n_min(&self) -> f64 {
        self.params.n_min0
            * self.params.n_inc.powi(self.increases as i32)
            * self.params.n_dec.powi(self.decreases as i32)
    }

    /// Archived entries in acceptance order.
    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    /// Number of threshold (increase, decrease) events so far.
    pub fn threshold_events(&self) -> (u32, u32) {
        (self.increases, self.decreases)
    }

    /// Total offers received, including infeasible ones.
    pub fn offers(&self) -> u64 {
        self.offers
    }

    /// Configured parameters.
    pub fn params(&self) -> &NoveltyParams {
        &self.params
    }

    /// Novelty of a behavior vector against the current archive.
    pub fn score(&self, behavior: &[f64]) -> f64 {
        novelty_score(behavior, &self.entries, self.params.k)
    }

    /// Offers a candidate for archiving at the given generation.
    ///
    /// Infeasible candidates are turned away without touching the threshold
    /// state — their objective vectors do not describe reachable behavior.
    pub fn offer(&mut self, candidate: &Solution, generation: u64) -> Result<OfferOutcome> {
        self.offers += 1;
        if !candidate.is_feasible() {
            return Ok(OfferOutcome::Infeasible);
        }
        let score = self.score(candidate.f());
        if score > self.n_min() {
            self.entries.push(ArchiveEntry {
                solution: candidate.clone(),
                generation,
                n_min_at_acceptance: self.n_min(),
            });
            if let Some(cap) = self.params.max_entries {
                if self.entries.len() > cap {
                    return Err(Error::ArchiveOverflow {
                        cap,
                        n_min: self.n_min(),
                    });
                }
            }
            self.rejection_streak = 0;
            self.accepted_since_increase += 1;
            if self.accepted_since_increase > self.params.n_a {
                self.increases += 1;
                self.accepted_since_increase = 0;
            }
            Ok(OfferOutcome::Accepted)
        } else {
            self.rejection_streak += 1;
            if self.rejection_streak >= self.params.n_r {
                self.decreases += 1;
                self.rejection_streak = 0;
            }
            Ok(OfferOutcome::Rejected)
        }
    }

    /// Non-dominated subset of the archive, in acceptance order.
    pub fn nondominated(&self) -> Result<Vec<Solution>> {
        let sols: Vec<Solution> = self.entries.iter().map(|e| e.solution.clone()).collect();
        if sols.is_empty() {
            return Ok(sols);
        }
        nondominated_filter(&sols)
    }

    /// Writes the archive as text: one entry per line with decision vector,
    /// objective vector, acceptance generation, and the threshold at
    /// acceptance, at full float precision.
    pub fn dump(&self, w: &mut dyn std::io::Write) -> std::io::Result<()> {
        writeln!(
            w,
            "# entries={} n_min={:.17e} increases={} decreases={}",
            self.entries.len(),
            self.n_min(),
            self.increases,
            self.decreases
        )?;
        for e in &self.entries {
            let xs: Vec<String> = e.solution.x().iter().map(|v| format!("{v:.17e}")).collect();
            let fs: Vec<String> = e.solution.f().iter().map(|v| format!("{v:.17e}")).collect();
            writeln!(
                w,
                "{} {} {} {:.17e}",
                xs.join(" "),
                fs.join(" "),
                e.generation,
                e.n_min_at_acceptance
            )?;
        }
        Ok(())
    }
}

/// Runs one MONA generation over `pop` in place.
///
/// Every member breeds one trial via DE variation; each trial is offered to
/// the archive (that offer *is* MONA's selection — the observer's `accepted`
/// flag reports it). Afterwards the population is resampled uniformly with
/// replacement from the archive, or left alone if the archive is still empty.
#[allow(clippy::too_many_arguments)]
pub fn mona_generation_step(
    subpop: usize,
    pop: &mut [Solution],
    params: &DeParams,
    archive: &mut NoveltyArchive,
    generation: u64,
    problem: &dyn Problem,
    parents: &mut ParentSampler,
    observer: &mut dyn StepObserver,
    rng: &mut RngStream,
) -> Result<u64> {
    let mut evaluations = 0;
    for i in 0..pop.len() {
        let [r1, r2, r3] = parents(i, rng);
        let v = mutate(&r1, &r2, &r3, params.f)?;
        let u = crossover(pop[i].x(), &v, params.cr, rng)?;
        let mut trial = Solution::evaluated(u, problem);
        trial.set_origin(subpop);
        evaluations += 1;
        observer.before_selection(subpop, &pop[i], &trial);
        let outcome = archive.offer(&trial, generation)?;
        observer.after_selection(subpop, &trial, outcome == OfferOutcome::Accepted);
    }
    if !archive.entries().is_empty() {
        for slot in pop.iter_mut() {
            let pick = rng.gen_range(0..archive.entries().len());
            let mut s = archive.entries()[pick].solution.clone();
            s.set_origin(subpop);
            *slot = s;
        }
    }
    Ok(evaluations)
}

/// Result of a standalone MONA run.
#[derive(Debug)]
pub struct MonaRun {
    /// Non-dominated subset of the final archive.
    pub final_set: Vec<Solution>,
    /// Total objective evaluations, including initialization.
    pub evaluations: u64,
    /// The full archive, for diagnostics.
    pub archive: NoveltyArchive,
}

/// Standalone panmictic MONA.
pub fn run_mona(
    problem: &dyn Problem,
    params: &DeParams,
    novelty: &NoveltyParams,
    pop_size: usize,
    generations: u64,
    seed: u64,
) -> Result<MonaRun> {
    if pop_size < 4 {
        return Err(Error::ParameterRange {
            name: "pop_size",
            value: pop_size as f64,
            range: "[4, ∞)",
        });
    }
    let mut init_rng = RngStream::new(
        seed,
        StreamKey {
            run: 0,
            subpop: 0,
            purpose: Purpose::Init,
        },
    );
    let mut step_rng = RngStream::new(
        seed,
        StreamKey {
            run: 0,
            subpop: 0,
            purpose: Purpose::Step,
        },
    );
    let mut archive = NoveltyArchive::new(*novelty);
    let mut pop: Vec<Solution> = (0..pop_size)
        .map(|_| problem.random_solution(&mut init_rng))
        .collect();
    let mut evaluations = pop_size as u64;
    for generation in 0..generations {
        let snapshot: Vec<Vec<f64>> = pop.iter().map(|s| s.x().to_vec()).collect();
        let mut sampler = |target: usize, rng: &mut RngStream| {
            let [a, b, c] = distinct_parent_indices(snapshot.len(), target, rng);
            [
                snapshot[a].clone(),
                snapshot[b].clone(),
                snapshot[c].clone(),
            ]
        };
        evaluations += mona_generation_step(
            0,
            &mut pop,
            params,
            &mut archive,
            generation,
            problem,
            &mut sampler,
            &mut NoObserver,
            &mut step_rng,
        )?;
    }
    let final_set = archive.nondominated()?;
    Ok(MonaRun {
        final_set,
        evaluations,
        archive,
    })
}

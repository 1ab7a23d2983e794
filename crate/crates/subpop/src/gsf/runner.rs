//! The framework run loop: heterogeneous subpopulations stepped in turn,
//! coupled through interaction matrices.
//!
//! Each generation proceeds in subpopulation order. Parent routing reads a
//! frozen snapshot of every subpopulation taken at the top of the
//! generation, so a subpopulation never sees mid-generation state of its
//! peers. Archive offers fire immediately after each selection decision.

use crate::de::{de_generation_step, ParentSampler, StepObserver};
use crate::dominance::nondominated_filter;
use crate::error::{Error, Result};
use crate::gde3::gde3_generation_step;
use crate::gsf::config::{GsfConfig, Strategy};
use crate::gsf::im::InteractionMatrix;
use crate::novelty::{mona_generation_step, NoveltyArchive};
use crate::problem::Problem;
use crate::rng::{Purpose, RngStream, StreamKey};
use crate::solution::Solution;
use rand::Rng;

/// Outcome of a framework run.
#[derive(Debug)]
pub struct RunResult {
    /// Feasible non-dominated union of all final members and archives,
    /// with exact duplicates removed.
    pub final_set: Vec<Solution>,
    /// Final members of each subpopulation.
    pub subpops: Vec<Vec<Solution>>,
    /// Novelty archives, index-aligned with subpopulations (`None` for
    /// strategies that keep none).
    pub archives: Vec<Option<NoveltyArchive>>,
    /// Total objective evaluations, including initialization.
    pub evaluations: u64,
    /// Generations actually completed (less than requested only when an
    /// evaluation budget stops the run early).
    pub generations_run: u64,
}

/// Picks one member identity `(subpop, index)` for parent duty.
///
/// A present matrix with a non-zero row routes the subpopulation choice;
/// otherwise the acting subpopulation sources locally.
fn pick_identity(
    sizes: &[usize],
    acting: usize,
    im: Option<&InteractionMatrix>,
    rng: &mut RngStream,
) -> (usize, usize) {
    let b = im.and_then(|im| im.sample(acting, rng)).unwrap_or(acting);
    (b, rng.gen_range(0..sizes[b]))
}

/// Identities eligible as parents for the member at `(acting, target)`:
/// every member of every reachable subpopulation except the target itself.
fn eligible_identities(
    sizes: &[usize],
    acting: usize,
    target: usize,
    im: Option<&InteractionMatrix>,
) -> Vec<(usize, usize)> {
    let reachable: Vec<usize> = match im {
        Some(im) if !im.is_zero_row(acting) => (0..sizes.len())
            .filter(|&b| im.row(acting)[b] > 0.0)
            .collect(),
        _ => vec![acting],
    };
    let mut ids = Vec::new();
    for b in reachable {
        for j in 0..sizes[b] {
            if (b, j) != (acting, target) {
                ids.push((b, j));
            }
        }
    }
    ids
}

/// Draws three mutually distinct parents for `(acting, target)`, honoring
/// the routing matrix. Rejection-samples first; after 100 misses on a slot
/// it falls back to a uniform draw over the explicit eligible pool, so the
/// draw always terminates even on tiny populations.
fn sample_routed_parents(
    snapshot: &[Vec<Vec<f64>>],
    sizes: &[usize],
    acting: usize,
    target: usize,
    im: Option<&InteractionMatrix>,
    rng: &mut RngStream,
) -> [Vec<f64>; 3] {
    let mut picked: [(usize, usize); 3] = [(usize::MAX, usize::MAX); 3];
    for slot in 0..3 {
        let mut found = None;
        for _ in 0..100 {
            let cand = pick_identity(sizes, acting, im, rng);
            if cand != (acting, target) && !picked[..slot].contains(&cand) {
                found = Some(cand);
                break;
            }
        }
        picked[slot] = found.unwrap_or_else(|| {
            let mut pool = eligible_identities(sizes, acting, target, im);
            pool.retain(|id| !picked[..slot].contains(id));
            assert!(
                !pool.is_empty(),
                "parent pool exhausted despite start-of-run validation"
            );
            pool[rng.gen_range(0..pool.len())]
        });
    }
    picked.map(|(b, j)| snapshot[b][j].clone())
}

/// Observer shim: forwards every event to the run's observer, then routes
/// the trial into a novelty archive when the offer matrix says so.
///
/// Offer failures cannot surface through the observer interface, so the
/// first one is parked in `error` and re-raised by the caller after the
/// step.
struct OfferRouter<'a> {
    user: &'a mut dyn StepObserver,
    im: Option<&'a InteractionMatrix>,
    archives: &'a mut [Option<NoveltyArchive>],
    rng: &'a mut RngStream,
    generation: u64,
    offer_losing: bool,
    error: Option<Error>,
}

impl StepObserver for OfferRouter<'_> {
    fn before_selection(&mut self, subpop: usize, parent: &Solution, trial: &Solution) {
        self.user.before_selection(subpop, parent, trial);
    }

    fn after_selection(&mut self, subpop: usize, trial: &Solution, accepted: bool) {
        self.user.after_selection(subpop, trial, accepted);
        let Some(im) = self.im else { return };
        if self.error.is_some() || (!accepted && !self.offer_losing) {
            return;
        }
        if let Some(sink) = im.sample(subpop, self.rng) {
            let archive = self.archives[sink]
                .as_mut()
                .expect("offer matrix routes only to archive strategies");
            if let Err(e) = archive.offer(trial, self.generation) {
                self.error = Some(e);
            }
        }
    }
}

/// Runs the composed framework on `problem`.
///
/// The observer sees every trial of every subpopulation in processing
/// order; pass [`crate::de::NoObserver`] when nothing is being measured.
pub fn run_gsf(
    problem: &dyn Problem,
    config: &GsfConfig,
    seed: u64,
    observer: &mut dyn StepObserver,
) -> Result<RunResult> {
    let m = problem.num_objectives();
    config.validate(m)?;
    let sizes = config.sizes.realize(config.total_size)?;
    let s = config.strategies.len();

    // Every subpopulation must be able to field three distinct parents for
    // any target, under its own routing row.
    for a in 0..s {
        let pool = eligible_identities(&sizes, a, 0, config.parent_im.as_ref()).len();
        if pool < 3 {
            return Err(Error::BadInstance(format!(
                "subpopulation {a} can reach only {pool} distinct parents; needs 3"
            )));
        }
    }
    // Offer mass may only point at strategies that keep an archive.
    if let Some(im) = &config.offer_im {
        for a in 0..s {
            for (b, &p) in im.row(a).iter().enumerate() {
                if p > 0.0 && !config.strategies[b].is_mona() {
                    return Err(Error::BadInstance(format!(
                        "offer matrix row {a} routes to subpopulation {b}, \
                         which keeps no archive"
                    )));
                }
            }
        }
    }

    let stream = |a: usize, purpose: Purpose| {
        RngStream::new(
            seed,
            StreamKey {
                run: 0,
                subpop: a as u16,
                purpose,
            },
        )
    };
    let mut step_rngs: Vec<RngStream> = (0..s).map(|a| stream(a, Purpose::Step)).collect();
    let mut routing_rngs: Vec<RngStream> = (0..s).map(|a| stream(a, Purpose::Routing)).collect();
    let mut offer_rngs: Vec<RngStream> = (0..s).map(|a| stream(a, Purpose::Offer)).collect();

    let mut subpops: Vec<Vec<Solution>> = Vec::with_capacity(s);
    let mut archives: Vec<Option<NoveltyArchive>> = Vec::with_capacity(s);
    let mut evaluations: u64 = 0;
    for (a, strat) in config.strategies.iter().enumerate() {
        let mut init_rng = stream(a, Purpose::Init);
        let pop: Vec<Solution> = (0..sizes[a])
            .map(|_| {
                let mut sol = problem.random_solution(&mut init_rng);
                sol.set_origin(a);
                sol
            })
            .collect();
        evaluations += pop.len() as u64;
        subpops.push(pop);
        archives.push(match strat {
            Strategy::Mona { novelty, .. } => Some(NoveltyArchive::new(*novelty)),
            _ => None,
        });
    }

    let mut generations_run = 0;
    for generation in 0..config.generations {
        if let Some(budget) = config.max_evaluations {
            if evaluations + config.total_size as u64 > budget {
                break;
            }
        }
        let snapshot: Vec<Vec<Vec<f64>>> = subpops
            .iter()
            .map(|pop| pop.iter().map(|sol| sol.x().to_vec()).collect())
            .collect();
        for a in 0..s {
            let routing_rng = &mut routing_rngs[a];
            let parent_im = config.parent_im.as_ref();
            let mut sampler = |target: usize, _step_rng: &mut RngStream| {
                sample_routed_parents(&snapshot, &sizes, a, target, parent_im, routing_rng)
            };
            let sampler: &mut ParentSampler = &mut sampler;
            let step_rng = &mut step_rngs[a];
            evaluations += match &config.strategies[a] {
                Strategy::SingleObjectiveDe { objective, params } => {
                    let mut router = OfferRouter {
                        user: observer,
                        im: config.offer_im.as_ref(),
                        archives: &mut archives,
                        rng: &mut offer_rngs[a],
                        generation,
                        offer_losing: config.offer_losing_trials,
                        error: None,
                    };
                    let evals = de_generation_step(
                        a,
                        &mut subpops[a],
                        params,
                        *objective,
                        problem,
                        sampler,
                        &mut router,
                        step_rng,
                    )?;
                    if let Some(e) = router.error {
                        return Err(e);
                    }
                    evals
                }
                Strategy::Gde3 { params, prune_k } => {
                    let mut router = OfferRouter {
                        user: observer,
                        im: config.offer_im.as_ref(),
                        archives: &mut archives,
                        rng: &mut offer_rngs[a],
                        generation,
                        offer_losing: config.offer_losing_trials,
                        error: None,
                    };
                    let evals = gde3_generation_step(
                        a,
                        &mut subpops[a],
                        params,
                        sizes[a],
                        *prune_k,
                        problem,
                        sampler,
                        &mut router,
                        step_rng,
                    )?;
                    if let Some(e) = router.error {
                        return Err(e);
                    }
                    evals
                }
                // Archive strategies offer their own trials inline; routing
                // them again through the offer matrix would double-count.
                Strategy::Mona { params, .. } => {
                    let archive = archives[a]
                        .as_mut()
                        .expect("archive strategy always owns an archive");
                    mona_generation_step(
                        a,
                        &mut subpops[a],
                        params,
                        archive,
                        generation,
                        problem,
                        sampler,
                        observer,
                        step_rng,
                    )?
                }
            };
        }
        generations_run = generation + 1;
    }

    let mut pool: Vec<Solution> = Vec::new();
    for pop in &subpops {
        pool.extend(pop.iter().filter(|sol| sol.is_feasible()).cloned());
    }
    for archive in archives.iter().flatten() {
        pool.extend(archive.nondominated()?);
    }
    dedup_exact(&mut pool);
    let final_set = nondominated_filter(&pool)?;

    Ok(RunResult {
        final_set,
        subpops,
        archives,
        evaluations,
        generations_run,
    })
}

/// Removes later copies of bitwise-identical solutions (archive resampling
/// clones members, and the union would otherwise repeat them).
fn dedup_exact(pool: &mut Vec<Solution>) {
    use std::collections::HashSet;
    let mut seen: HashSet<Vec<u64>> = HashSet::with_capacity(pool.len());
    pool.retain(|sol| {
        let key: Vec<u64> = sol
            .x()
            .iter()
            .chain(sol.f().iter())
            .map(|v| v.to_bits())
            .collect();
        seen.insert(key)
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::de::{DeParams, NoObserver};
    use crate::gsf::config::SizeVector;
    use crate::novelty::NoveltyParams;
    use crate::wfg::WfgInstance;

    fn de() -> DeParams {
        DeParams::new(0.1, 0.1).unwrap()
    }

    fn novelty() -> NoveltyParams {
        NoveltyParams::new(15, 0.1, 1.1, 0.999, 1, 50_000).unwrap()
    }

    fn wfg(family: u8, m: usize) -> WfgInstance {
        WfgInstance::standard(family, m).unwrap()
    }

    #[test]
    fn runs_are_deterministic() {
        let problem = wfg(2, 2);
        let cfg = GsfConfig::san(2, de(), novelty(), 30, 20).unwrap();
        let one = run_gsf(&problem, &cfg, 42, &mut NoObserver).unwrap();
        let two = run_gsf(&problem, &cfg, 42, &mut NoObserver).unwrap();
        assert_eq!(one.final_set.len(), two.final_set.len());
        for (a, b) in one.final_set.iter().zip(&two.final_set) {
            assert_eq!(a.x(), b.x());
            assert_eq!(a.f(), b.f());
        }
        assert_eq!(one.evaluations, two.evaluations);
    }

    #[test]
    fn seeds_change_outcomes() {
        let problem = wfg(2, 2);
        let cfg = GsfConfig::san(2, de(), novelty(), 30, 20).unwrap();
        let one = run_gsf(&problem, &cfg, 1, &mut NoObserver).unwrap();
        let two = run_gsf(&problem, &cfg, 2, &mut NoObserver).unwrap();
        let same = one.final_set.len() == two.final_set.len()
            && one
                .final_set
                .iter()
                .zip(&two.final_set)
                .all(|(a, b)| a.x() == b.x());
        assert!(!same, "different seeds produced identical runs");
    }

    #[test]
    fn evaluation_budget_stops_cleanly() {
        let problem = wfg(4, 2);
        let mut cfg = GsfConfig::sagde(2, de(), 2, 30, 1000).unwrap();
        cfg.max_evaluations = Some(200);
        let out = run_gsf(&problem, &cfg, 7, &mut NoObserver).unwrap();
        assert!(out.evaluations <= 200, "evaluations = {}", out.evaluations);
        assert!(out.generations_run < 1000);
        // 30 init + 30 per generation fits five full generations
        assert_eq!(out.generations_run, 5);
    }

    #[test]
    fn composition_counts_members_and_archives() {
        let problem = wfg(1, 2);
        let cfg = GsfConfig::san(2, de(), novelty(), 50, 10).unwrap();
        let out = run_gsf(&problem, &cfg, 3, &mut NoObserver).unwrap();
        assert_eq!(out.subpops.len(), 3);
        assert_eq!(out.subpops[0].len(), 15);
        assert_eq!(out.subpops[1].len(), 15);
        assert_eq!(out.subpops[2].len(), 20);
        assert!(out.archives[0].is_none());
        assert!(out.archives[1].is_none());
        assert!(out.archives[2].is_some());
        let archive = out.archives[2].as_ref().unwrap();
        assert!(archive.offers() > 0, "archive never saw an offer");
        // single-objective subpopulations route offers in as well: with 50
        // members × 10 generations every trial is offered somewhere
        assert_eq!(archive.offers(), 50 * 10);
    }

    #[test]
    fn offers_skip_losing_trials_when_disabled() {
        let problem = wfg(1, 2);
        let mut cfg = GsfConfig::san(2, de(), novelty(), 50, 10).unwrap();
        cfg.offer_losing_trials = false;
        let out = run_gsf(&problem, &cfg, 3, &mut NoObserver).unwrap();
        let archive = out.archives[2].as_ref().unwrap();
        assert!(archive.offers() > 0);
        assert!(
            archive.offers() < 50 * 10,
            "some selections must lose; offers = {}",
            archive.offers()
        );
    }

    #[test]
    fn final_set_is_feasible_and_mutually_nondominated() {
        use crate::dominance::{pareto_dominance, Dominance};
        let problem = wfg(6, 2);
        let cfg = GsfConfig::san(2, de(), novelty(), 40, 30).unwrap();
        let out = run_gsf(&problem, &cfg, 11, &mut NoObserver).unwrap();
        assert!(!out.final_set.is_empty());
        for sol in &out.final_set {
            assert!(sol.is_feasible());
        }
        for i in 0..out.final_set.len() {
            for j in 0..out.final_set.len() {
                if i == j {
                    continue;
                }
                let d =
                    pareto_dominance(out.final_set[i].f(), out.final_set[j].f()).unwrap();
                assert_eq!(d, Dominance::Neither);
            }
        }
    }

    #[test]
    fn misrouted_offer_matrix_is_rejected() {
        let problem = wfg(1, 2);
        let mut cfg = GsfConfig::sagde(2, de(), 2, 30, 5).unwrap();
        // GDE3 mixer keeps no archive, so offers cannot point at it
        cfg.offer_im = Some(InteractionMatrix::archive_offer(3, 2).unwrap());
        assert!(run_gsf(&problem, &cfg, 1, &mut NoObserver).is_err());
    }

    #[test]
    fn tiny_subpopulations_need_routing_to_run() {
        let problem = wfg(1, 2);
        // Three subpopulations of one member each: local parent sourcing is
        // impossible, but uniform routing reaches all three peers... which
        // is still only 2 non-target identities, so this must error.
        let cfg = GsfConfig {
            strategies: vec![
                Strategy::SingleObjectiveDe {
                    objective: 0,
                    params: de(),
                },
                Strategy::SingleObjectiveDe {
                    objective: 1,
                    params: de(),
                },
                Strategy::Gde3 {
                    params: de(),
                    prune_k: 2,
                },
            ],
            sizes: SizeVector::new(vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]).unwrap(),
            total_size: 3,
            generations: 3,
            parent_im: Some(InteractionMatrix::uniform(3)),
            offer_im: None,
            offer_losing_trials: true,
            max_evaluations: None,
        };
        assert!(run_gsf(&problem, &cfg, 1, &mut NoObserver).is_err());

        // Four total members with uniform routing: exactly enough.
        let cfg = GsfConfig {
            total_size: 4,
            sizes: SizeVector::new(vec![0.25, 0.25, 0.5]).unwrap(),
            ..cfg
        };
        let out = run_gsf(&problem, &cfg, 1, &mut NoObserver).unwrap();
        assert_eq!(out.generations_run, 3);
    }

    #[test]
    fn standalone_gde3_preset_matches_direct_runner_shape() {
        // The single-subpopulation GDE3 preset must behave like a plain
        // GDE3: population capped at the target, all-feasible final set.
        let problem = wfg(4, 2);
        let cfg = GsfConfig::gde3(de(), 2, 24, 40).unwrap();
        let out = run_gsf(&problem, &cfg, 5, &mut NoObserver).unwrap();
        assert_eq!(out.subpops.len(), 1);
        assert!(out.subpops[0].len() <= 24);
        assert!(out.final_set.iter().all(|s| s.is_feasible()));
    }

    /// Counts observer events to show each member breeds exactly one trial
    /// per generation, in subpopulation order.
    struct CountingObserver {
        before: u64,
        after: u64,
        accepted: u64,
        last_subpop: usize,
        order_ok: bool,
    }

    impl StepObserver for CountingObserver {
        fn before_selection(&mut self, subpop: usize, _p: &Solution, _t: &Solution) {
            self.before += 1;
            if subpop < self.last_subpop {
                // a new generation restarts from subpopulation zero
                self.order_ok &= subpop == 0;
            }
            self.last_subpop = subpop;
        }
        fn after_selection(&mut self, _subpop: usize, _t: &Solution, accepted: bool) {
            self.after += 1;
            self.accepted += u64::from(accepted);
        }
    }

    #[test]
    fn observer_sees_every_trial_once() {
        let problem = wfg(2, 2);
        let cfg = GsfConfig::san(2, de(), novelty(), 30, 10).unwrap();
        let mut counter = CountingObserver {
            before: 0,
            after: 0,
            accepted: 0,
            last_subpop: 0,
            order_ok: true,
        };
        let out = run_gsf(&problem, &cfg, 9, &mut counter).unwrap();
        assert_eq!(counter.before, 30 * 10);
        assert_eq!(counter.after, counter.before);
        assert!(counter.order_ok, "subpopulation processing order broke");
        assert_eq!(out.evaluations, 30 + 30 * 10);
    }
}

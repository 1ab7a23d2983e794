//! Differential evolution: rand/1 mutation, binomial crossover, greedy
//! one-to-one selection.
//!
//! These operators are the variation engine for every strategy in the
//! toolkit; the multi-objective strategies swap only the selection rule.

use rand::Rng;

use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::rng::RngStream;
use crate::solution::Solution;

/// Differential-evolution control parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeParams {
    /// Difference-vector scale factor, in `[0, 2]`.
    pub f: f64,
    /// Crossover probability, in `[0, 1]`.
    pub cr: f64,
}

impl DeParams {
    /// Validates and constructs the parameter pair.
    pub fn new(f: f64, cr: f64) -> Result<Self> {
        if !(0.0..=2.0).contains(&f) {
            return Err(Error::ParameterRange {
                name: "F",
                value: f,
                range: "[0, 2]",
            });
        }
        if !(0.0..=1.0).contains(&cr) {
            return Err(Error::ParameterRange {
                name: "CR",
                value: cr,
                range: "[0, 1]",
            });
        }
        Ok(Self { f, cr })
    }
}

/// rand/1 mutant vector `r1 + F · (r2 − r3)`.
///
/// No bound handling: the mutant may leave the feasible box, and selection is
/// where infeasibility is penalized.
pub fn mutate(r1: &[f64], r2: &[f64], r3: &[f64], f: f64) -> Result<Vec<f64>> {
    if r1.len() != r2.len() || r1.len() != r3.len() {
        return Err(Error::DimensionMismatch {
            context: "mutation parents",
            expected: r1.len(),
            got: if r1.len() != r2.len() {
                r2.len()
            } else {
                r3.len()
            },
        });
    }
    Ok(r1
        .iter()
        .zip(r2.iter().zip(r3))
        .map(|(&a, (&b, &c))| a + f * (b - c))
        .collect())
}

/// Binomial crossover of parent `x` with mutant `v`.
///
/// One component index is forced to come from `v`, so the trial always
/// differs from the parent in at least one coordinate (unless `v` equals `x`
/// there). Exactly `n + 1` uniform draws are consumed per call — one for the
/// forced index, one per component — keeping stream usage predictable.
pub fn crossover(x: &[f64], v: &[f64], cr: f64, rng: &mut RngStream) -> Result<Vec<f64>> {
    if x.len() != v.len() {
        return Err(Error::DimensionMismatch {
            context: "crossover vectors",
            expected: x.len(),
            got: v.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::EmptyInput("crossover on zero-length vectors"));
    }
    let forced = rng.gen_range(0..x.len());
    Ok(x.iter()
        .zip(v)
        .enumerate()
        .map(|(j, (&xj, &vj))| {
            let r: f64 = rng.gen();
            if r < cr || j == forced {
                vj
            } else {
                xj
            }
        })
        .collect())
}

/// Which of parent/trial survives one-to-one selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selected {
    Parent,
    Trial,
}

/// Greedy selection on a single objective.
///
/// Feasibility dominates fitness: a feasible solution always beats an
/// infeasible one, and two infeasible solutions compare on total bound
/// violation. All ties keep the parent.
pub fn de_select(parent: &Solution, trial: &Solution, objective: usize) -> Result<Selected> {
    match (parent.is_feasible(), trial.is_feasible()) {
        (true, false) => return Ok(Selected::Parent),
        (false, true) => return Ok(Selected::Trial),
        (false, false) => {
            return Ok(if trial.bound_violation() < parent.bound_violation() {
                Selected::Trial
            } else {
                Selected::Parent
            })
        }
        (true, true) => {}
    }
    let (pf, tf) = (parent.f(), trial.f());
    if objective >= pf.len() || objective >= tf.len() {
        return Err(Error::DimensionMismatch {
            context: "selection objective index",
            expected: pf.len(),
            got: objective,
        });
    }
    Ok(if tf[objective] < pf[objective] {
        Selected::Trial
    } else {
        Selected::Parent
    })
}

/// Observes trials as a generation step produces them.
///
/// `before_selection` fires for every offered trial in creation order, before
/// the survival decision — this is where displacement forces are measured.
/// `after_selection` reports the decision, which drives archive offers.
pub trait StepObserver {
    fn before_selection(&mut self, _subpop: usize, _parent: &Solution, _trial: &Solution) {}
    fn after_selection(&mut self, _subpop: usize, _trial: &Solution, _accepted: bool) {}
}

/// Observer that ignores everything.
pub struct NoObserver;

impl StepObserver for NoObserver {}

/// Supplies three mutually distinct parent decision vectors for the member at
/// the given index. The framework routes this through interaction matrices;
/// standalone runs sample from their own population.
pub type ParentSampler<'a> = dyn FnMut(usize, &mut RngStream) -> [Vec<f64>; 3] + 'a;

/// Three distinct member indices, all different from `target`.
///
/// Classic rejection sampling; requires a population of at least four.
pub(crate) fn distinct_parent_indices(
    n: usize,
    target: usize,
    rng: &mut RngStream,
) -> [usize; 3] {
    debug_assert!(n >= 4, "need 4 members for 3 distinct parents");
    let mut idx = [usize::MAX; 3];
    let mut chosen = 0;
    while chosen < 3 {
        let c = rng.gen_range(0..n);
        if c != target && !idx[..chosen].contains(&c) {
            idx[chosen] = c;
            chosen += 1;
        }
    }
    idx
}

/// Runs one generation of single-objective DE over `pop` in place.
///
/// For each member: draw parents, mutate, cross over, evaluate, offer the
/// trial to the observer, then apply greedy selection. Returns the number of
/// objective evaluations performed (one per member).
#[allow(clippy::too_many_arguments)]
pub fn de_generation_step(
    subpop: usize,
    pop: &mut [Solution],
    params: &DeParams,
    objective: usize,
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
        let selected = de_select(&pop[i], &trial, objective)?;
        let accepted = selected == Selected::Trial;
        observer.after_selection(subpop, &trial, accepted);
        if accepted {
            pop[i] = trial;
        }
    }
    Ok(evaluations)
}

/// Result of a standalone single-objective DE run.
#[derive(Debug, Clone)]
pub struct DeRun {
    /// Best member of the final population.
    pub best: Solution,
    /// Total objective evaluations, including initialization.
    pub evaluations: u64,
}

/// Standalone panmictic DE minimizing `problem`'s objective `0`.
pub fn run_de(
    problem: &dyn Problem,
    params: &DeParams,
    pop_size: usize,
    generations: u64,
    seed: u64,
) -> Result<DeRun> {
    use crate::rng::{Purpose, StreamKey};
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
    let mut pop: Vec<Solution> = (0..pop_size)
        .map(|_| problem.random_solution(&mut init_rng))
        .collect();
    let mut evaluations = pop_size as u64;
    for _ in 0..generations {
        let snapshot: Vec<Vec<f64>> = pop.iter().map(|s| s.x().to_vec()).collect();
        let mut sampler = |target: usize, rng: &mut RngStream| {
            let [a, b, c] = distinct_parent_indices(snapshot.len(), target, rng);
            [
                snapshot[a].clone(),
                snapshot[b].clone(),
                snapshot[c].clone(),
            ]
        };
        evaluations += de_generation_step(
            0,
            &mut pop,
            params,
            0,
            problem,
            &mut sampler,
            &mut NoObserver,
            &mut step_rng,
        )?;
    }
    let best = pop
        .into_iter()
        .min_by(|a, b| a.f()[0].total_cmp(&b.f()[0]))
        .expect("non-empty population");
    Ok(DeRun { best, evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Sphere;
    use crate::rng::{Purpose, StreamKey};

    fn step_rng(seed: u64) -> RngStream {
        RngStream::new(
            seed,
            StreamKey {
                run: 0,
                subpop: 0,
                purpose: Purpose::Step,
            },
        )
    }

    #[test]
    fn params_validated() {
        assert!(DeParams::new(0.0, 0.0).is_ok());
        assert!(DeParams::new(2.0, 1.0).is_ok());
        assert!(DeParams::new(2.1, 0.5).is_err());
        assert!(DeParams::new(-0.1, 0.5).is_err());
        assert!(DeParams::new(0.5, 1.1).is_err());
        assert!(DeParams::new(0.5, -0.1).is_err());
        assert!(DeParams::new(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn mutate_hand_value() {
        let v = mutate(&[1.0, 1.0], &[3.0, 2.0], &[1.0, 0.0], 0.5).unwrap();
        assert_eq!(v, vec![2.0, 2.0]);
    }

    #[test]
    fn mutate_zero_f_copies_base() {
        let v = mutate(&[1.0, -1.0], &[5.0, 5.0], &[-5.0, 0.0], 0.0).unwrap();
        assert_eq!(v, vec![1.0, -1.0]);
    }

    #[test]
    fn mutate_rejects_mismatched_dims() {
        assert!(mutate(&[1.0], &[1.0, 2.0], &[1.0], 0.5).is_err());
    }

    #[test]
    fn crossover_cr_zero_takes_exactly_one_mutant_component() {
        let x = vec![0.0; 8];
        let v = vec![1.0; 8];
        let mut rng = step_rng(5);
        for _ in 0..1000 {
            let u = crossover(&x, &v, 0.0, &mut rng).unwrap();
            let from_v = u.iter().filter(|&&c| c == 1.0).count();
            assert_eq!(from_v, 1);
        }
    }

    #[test]
    fn crossover_cr_one_takes_all_mutant_components() {
        let x = vec![0.0; 8];
        let v = vec![1.0; 8];
        let mut rng = step_rng(6);
        for _ in 0..1000 {
            let u = crossover(&x, &v, 1.0, &mut rng).unwrap();
            assert!(u.iter().all(|&c| c == 1.0));
        }
    }

    #[test]
    fn crossover_component_count_matches_binomial_model() {
        // Components from the mutant number 1 + Binomial(n-1, CR) in
        // expectation; check the sample mean against that model.
        let n = 20;
        let cr = 0.3;
        let x = vec![0.0; n];
        let v = vec![1.0; n];
        let mut rng = step_rng(7);
        let trials = 20_000;
        let total: usize = (0..trials)
            .map(|_| {
                crossover(&x, &v, cr, &mut rng)
                    .unwrap()
                    .iter()
                    .filter(|&&c| c == 1.0)
                    .count()
            })
            .sum();
        let mean = total as f64 / trials as f64;
        let expected = 1.0 + (n as f64 - 1.0) * cr;
        // 5-sigma band for the sample mean
        let sd = ((n as f64 - 1.0) * cr * (1.0 - cr) / trials as f64).sqrt();
        assert!(
            (mean - expected).abs() < 5.0 * sd,
            "mean {mean} vs expected {expected}"
        );
    }

    #[test]
    fn selection_prefers_lower_fitness_and_parent_on_tie() {
        let p = Sphere::new(2);
        let parent = Solution::evaluated(vec![1.0, 1.0], &p); // f = 2
        let better = Solution::evaluated(vec![0.5, 0.5], &p); // f = 0.5
        let tie = Solution::evaluated(vec![-1.0, 1.0], &p); // f = 2
        assert_eq!(de_select(&parent, &better, 0).unwrap(), Selected::Trial);
        assert_eq!(de_select(&parent, &tie, 0).unwrap(), Selected::Parent);
        assert_eq!(de_select(&better, &parent, 0).unwrap(), Selected::Parent);
    }

    #[test]
    fn selection_feasibility_rules() {
        let p = Sphere::new(1);
        let feasible = Solution::evaluated(vec![5.0], &p); // f = 25, in bounds
        let near = Solution::evaluated(vec![6.0], &p); // violation 0.88
        let far = Solution::evaluated(vec![9.0], &p); // violation 3.88
        // feasible beats infeasible despite much worse fitness
        assert_eq!(de_select(&feasible, &near, 0).unwrap(), Selected::Parent);
        assert_eq!(de_select(&near, &feasible, 0).unwrap(), Selected::Trial);
        // both infeasible: smaller violation wins, tie keeps parent
        assert_eq!(de_select(&far, &near, 0).unwrap(), Selected::Trial);
        assert_eq!(de_select(&near, &far, 0).unwrap(), Selected::Parent);
        assert_eq!(de_select(&near, &near.clone(), 0).unwrap(), Selected::Parent);
    }

    #[test]
    fn selection_rejects_bad_objective_index() {
        let p = Sphere::new(1);
        let a = Solution::evaluated(vec![1.0], &p);
        assert!(de_select(&a, &a.clone(), 1).is_err());
    }

    #[test]
    fn distinct_parents_are_distinct() {
        let mut rng = step_rng(8);
        for _ in 0..1000 {
            let [a, b, c] = distinct_parent_indices(4, 2, &mut rng);
            assert!(a != b && b != c && a != c);
            assert!(a != 2 && b != 2 && c != 2);
        }
    }

    #[test]
    fn generation_step_never_worsens_members() {
        let p = Sphere::new(5);
        let params = DeParams::new(0.7, 0.9).unwrap();
        let mut init = RngStream::new(
            3,
            StreamKey {
                run: 0,
                subpop: 0,
                purpose: Purpose::Init,
            },
        );
        let mut pop: Vec<Solution> = (0..20).map(|_| p.random_solution(&mut init)).collect();
        let before: Vec<f64> = pop.iter().map(|s| s.f()[0]).collect();
        let mut rng = step_rng(3);
        let snapshot: Vec<Vec<f64>> = pop.iter().map(|s| s.x().to_vec()).collect();
        let mut sampler = |t: usize, r: &mut RngStream| {
            let [a, b, c] = distinct_parent_indices(snapshot.len(), t, r);
            [
                snapshot[a].clone(),
                snapshot[b].clone(),
                snapshot[c].clone(),
            ]
        };
        let evals = de_generation_step(
            0,
            &mut pop,
            &params,
            0,
            &p,
            &mut sampler,
            &mut NoObserver,
            &mut rng,
        )
        .unwrap();
        assert_eq!(evals, 20);
        for (s, b) in pop.iter().zip(before) {
            assert!(s.f()[0] <= b, "member got worse: {} > {}", s.f()[0], b);
        }
    }

    #[test]
    fn run_de_is_deterministic_per_seed() {
        let p = Sphere::new(4);
        let params = DeParams::new(0.5, 0.6).unwrap();
        let a = run_de(&p, &params, 20, 30, 99).unwrap();
        let b = run_de(&p, &params, 20, 30, 99).unwrap();
        assert_eq!(a.best.x(), b.best.x());
        assert_eq!(a.evaluations, b.evaluations);
        let c = run_de(&p, &params, 20, 30, 100).unwrap();
        assert_ne!(a.best.x(), c.best.x());
    }

    #[test]
    fn run_de_requires_four_members() {
        let p = Sphere::new(2);
        let params = DeParams::new(0.5, 0.5).unwrap();
        assert!(run_de(&p, &params, 3, 5, 1).is_err());
    }
}

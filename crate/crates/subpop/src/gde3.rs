//! Generalized differential evolution (third version): DE variation with
//! Pareto-based survival and a crowding-bounded population.
//!
//! The generation step lets the population grow when parent and trial are
//! incomparable, then prunes back to the target size by removing the most
//! crowded members of the worst included non-domination rank.

use crate::de::{
    crossover, distinct_parent_indices, mutate, DeParams, NoObserver, ParentSampler, StepObserver,
};
use crate::dominance::{
    collect_objectives, nondominated_filter, nondomination_ranks, Dominance,
};
use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::rng::{Purpose, RngStream, StreamKey};
use crate::solution::Solution;

/// Survival decision for a parent/trial pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gde3Selection {
    /// Trial discarded.
    Parent,
    /// Trial replaces the parent in place.
    Trial,
    /// Incomparable: trial is appended and both survive until pruning.
    Both,
}

/// Constraint-aware Pareto selection between a parent and its trial.
///
/// A feasible solution always beats an infeasible one. Two infeasible
/// solutions compare by Pareto dominance of their raw objective vectors, and
/// the trial must strictly dominate to displace the parent. Two feasible
/// solutions keep the dominator, or both when neither dominates.
pub fn gde3_select(parent: &Solution, trial: &Solution) -> Result<Gde3Selection> {
    match (parent.is_feasible(), trial.is_feasible()) {
        (true, false) => return Ok(Gde3Selection::Parent),
        (false, true) => return Ok(Gde3Selection::Trial),
        (false, false) => {
            let d = crate::dominance::pareto_dominance(parent.f(), trial.f())?;
            return Ok(if d == Dominance::Second {
                Gde3Selection::Trial
            } else {
                Gde3Selection::Parent
            });
        }
        (true, true) => {}
    }
    match crate::dominance::pareto_dominance(parent.f(), trial.f())? {
        Dominance::First => Ok(Gde3Selection::Parent),
        Dominance::Second => Ok(Gde3Selection::Trial),
        Dominance::Neither => Ok(Gde3Selection::Both),
    }
}

/// Crowding score of every point: Euclidean distance to its `k`-th nearest
/// neighbour in min–max normalized objective space.
///
/// Larger scores mean more isolated points. Objectives with zero range across
/// the set contribute nothing to distances. If a point has fewer than `k`
/// neighbours, its farthest neighbour is used. Needs at least two points.
pub fn knn_crowding(points: &[Vec<f64>], k: usize) -> Result<Vec<f64>> {
    if points.len() < 2 {
        return Err(Error::EmptyInput("knn_crowding needs at least two points"));
    }
    if k == 0 {
        return Err(Error::ParameterRange {
            name: "k",
            value: 0.0,
            range: "[1, ∞)",
        });
    }
    let normalized = normalize_points(points);
    let n = points.len();
    let mut scores = Vec::with_capacity(n);
    for i in 0..n {
        let mut dists: Vec<f64> = (0..n)
            .filter(|&j| j != i)
            .map(|j| euclidean(&normalized[i], &normalized[j]))
            .collect();
        dists.sort_by(f64::total_cmp);
        scores.push(dists[k.min(dists.len()) - 1]);
    }
    Ok(scores)
}

fn normalize_points(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = points[0].len();
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for p in points {
        for (d, &v) in p.iter().enumerate() {
            lo[d] = lo[d].min(v);
            hi[d] = hi[d].max(v);
        }
    }
    points
        .iter()
        .map(|p| {
            p.iter()
                .enumerate()
                .map(|(d, &v)| {
                    let range = hi[d] - lo[d];
                    if range > 0.0 {
                        (v - lo[d]) / range
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Shrinks `pop` to `target` members.
///
/// Better non-domination ranks are kept whole; the rank that overflows the
/// budget is thinned by repeatedly dropping its most crowded member (smallest
/// distance to `k`-th nearest surviving rank-mate, geometry frozen at entry).
/// Ties drop the latest-appended member. Survivors keep their input order,
/// so no removed member ever dominates a kept one.
pub fn prune(pop: Vec<Solution>, target: usize, k: usize) -> Result<Vec<Solution>> {
    if target == 0 {
        return Err(Error::ParameterRange {
            name: "target",
            value: 0.0,
            range: "[1, ∞)",
        });
    }
    if pop.len() <= target {
        return Ok(pop);
    }
    let objs = collect_objectives(&pop)?;
    let ranks = nondomination_ranks(&objs);
    let max_rank = *ranks.iter().max().expect("non-empty population");

    let mut keep = vec![false; pop.len()];
    let mut kept = 0usize;
    for level in 0..=max_rank {
        let members: Vec<usize> = (0..pop.len()).filter(|&i| ranks[i] == level).collect();
        if kept + members.len() <= target {
            for &i in &members {
                keep[i] = true;
            }
            kept += members.len();
            if kept == target {
                break;
            }
        } else {
            let surviving = crowd_prune(&members, &objs, target - kept, k);
            for i in surviving {
                keep[i] = true;
            }
            break;
        }
    }

    Ok(pop
        .into_iter()
        .enumerate()
        .filter_map(|(i, s)| keep[i].then_some(s))
        .collect())
}

/// Thins the index set `members` down to `need` by iterated most-crowded
/// removal. Distances and normalization are computed once over the incoming
/// members and never refreshed; only the set of surviving neighbours shrinks.
fn crowd_prune(members: &[usize], objs: &[Vec<f64>], need: usize, k: usize) -> Vec<usize> {
    if need == 0 {
        return Vec::new();
    }
    let local: Vec<Vec<f64>> = members.iter().map(|&i| objs[i].clone()).collect();
    let normalized = normalize_points(&local);
    let n = members.len();
    // per-member neighbour lists sorted by frozen distance
    let neighbours: Vec<Vec<(f64, usize)>> = (0..n)
        .map(|i| {
            let mut row: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (euclidean(&normalized[i], &normalized[j]), j))
                .collect();
            row.sort_by(|a, b| a.0.total_cmp(&b.0));
            row
        })
        .collect();

    let mut alive = vec![true; n];
    let mut alive_count = n;
    while alive_count > need {
        // k-th nearest *surviving* neighbour via the frozen lists
        let score = |i: usize| -> f64 {
            let mut seen = 0;
            let mut last = 0.0;
            for &(d, j) in &neighbours[i] {
                if alive[j] {
                    seen += 1;
                    last = d;
                    if seen == k {
                        return d;
                    }
                }
            }
            last // fewer than k survivors: farthest available
        };
        let victim = (0..n)
            .filter(|&i| alive[i])
            .map(|i| (score(i), i))
            // most crowded = smallest score; tie broken toward the largest
            // index, i.e. the latest-appended member goes first
            .min_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)))
            .map(|(_, i)| i)
            .expect("alive set non-empty");
        alive[victim] = false;
        alive_count -= 1;
    }
    (0..n)
        .filter(|&i| alive[i])
        .map(|i| members[i])
        .collect()
}

/// Runs one GDE3 generation over `pop` in place.
///
/// Each original member produces one trial; incomparable trials append to the
/// population, which is pruned back to `target_size` at the end of the step.
/// Returns the number of objective evaluations (one per original member).
#[allow(clippy::too_many_arguments)]
pub fn gde3_generation_step(
    subpop: usize,
    pop: &mut Vec<Solution>,
    params: &DeParams,
    target_size: usize,
    prune_k: usize,
    problem: &dyn Problem,
    parents: &mut ParentSampler,
    observer: &mut dyn StepObserver,
    rng: &mut RngStream,
) -> Result<u64> {
    let n_start = pop.len();
    let mut evaluations = 0;
    for i in 0..n_start {
        let [r1, r2, r3] = parents(i, rng);
        let v = mutate(&r1, &r2, &r3, params.f)?;
        let u = crossover(pop[i].x(), &v, params.cr, rng)?;
        let mut trial = Solution::evaluated(u, problem);
        trial.set_origin(subpop);
        evaluations += 1;
        observer.before_selection(subpop, &pop[i], &trial);
        let decision = gde3_select(&pop[i], &trial)?;
        let accepted = decision != Gde3Selection::Parent;
        observer.after_selection(subpop, &trial, accepted);
        match decision {
            Gde3Selection::Parent => {}
            Gde3Selection::Trial => pop[i] = trial,
            Gde3Selection::Both => pop.push(trial),
        }
    }
    if pop.len() > target_size {
        let drained = std::mem::take(pop);
        *pop = prune(drained, target_size, prune_k)?;
    }
    Ok(evaluations)
}

/// Result of a standalone GDE3 run.
#[derive(Debug, Clone)]
pub struct Gde3Run {
    /// Non-dominated subset of the final population.
    pub final_set: Vec<Solution>,
    /// Total objective evaluations, including initialization.
    pub evaluations: u64,
}

/// Standalone panmictic GDE3.
pub fn run_gde3(
    problem: &dyn Problem,
    params: &DeParams,
    pop_size: usize,
    prune_k: usize,
    generations: u64,
    seed: u64,
) -> Result<Gde3Run> {
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
        evaluations += gde3_generation_step(
            0,
            &mut pop,
            params,
            pop_size,
            prune_k,
            problem,
            &mut sampler,
            &mut NoObserver,
            &mut step_rng,
        )?;
    }
    let final_set = nondominated_filter(&pop)?;
    Ok(Gde3Run {
        final_set,
        evaluations,
    })
}

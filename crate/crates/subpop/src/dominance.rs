//! Pareto dominance relations and non-dominated filtering.
//!
//! All objectives are minimized. Vector `a` dominates `b` when it is no worse
//! in every component and strictly better in at least one. Comparisons
//! involving NaN are incomparable by definition — NaN never certifies
//! domination in either direction.

use crate::error::{Error, Result};
use crate::solution::Solution;

/// Outcome of comparing two objective vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    /// The first vector dominates the second.
    First,
    /// The second vector dominates the first.
    Second,
    /// Neither dominates (ties, trade-offs, or NaN present).
    Neither,
}

/// Compares two objective vectors of equal length.
pub fn pareto_dominance(a: &[f64], b: &[f64]) -> Result<Dominance> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            context: "objective vectors",
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(pareto_dominance_unchecked(a, b))
}

/// Comparison without the length check; callers guarantee equal lengths.
pub(crate) fn pareto_dominance_unchecked(a: &[f64], b: &[f64]) -> Dominance {
    let mut a_better = false;
    let mut b_better = false;
    for (&x, &y) in a.iter().zip(b) {
        if x.is_nan() || y.is_nan() {
            return Dominance::Neither;
        }
        if x < y {
            a_better = true;
        } else if y < x {
            b_better = true;
        }
    }
    match (a_better, b_better) {
        (true, false) => Dominance::First,
        (false, true) => Dominance::Second,
        _ => Dominance::Neither,
    }
}

/// Weak dominance: `a` no worse than `b` in every component (NaN fails).
pub fn weakly_dominates(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(&x, &y)| x <= y)
}

/// Indices of the non-dominated members of `points`, in input order.
///
/// Duplicated vectors are all retained: equal vectors never dominate each
/// other. Quadratic scan — population sizes here are small.
pub fn nondominated_indices(points: &[Vec<f64>]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| {
            points
                .iter()
                .enumerate()
                .all(|(j, q)| {
                    i == j || pareto_dominance_unchecked(q, &points[i]) != Dominance::First
                })
        })
        .collect()
}

/// Non-dominated subset of plain objective vectors, input order preserved.
pub fn nondominated_points(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    nondominated_indices(points)
        .into_iter()
        .map(|i| points[i].clone())
        .collect()
}

/// Non-dominated subset of evaluated solutions, input order preserved.
///
/// Every solution must carry an objective vector and all vectors must share
/// one length.
pub fn nondominated_filter(set: &[Solution]) -> Result<Vec<Solution>> {
    let objs = collect_objectives(set)?;
    Ok(nondominated_indices(&objs)
        .into_iter()
        .map(|i| set[i].clone())
        .collect())
}

/// Non-domination rank of every point (0 = in the non-dominated set of the
/// whole input, 1 = non-dominated once rank 0 is removed, and so on).
pub fn nondomination_ranks(points: &[Vec<f64>]) -> Vec<usize> {
    let n = points.len();
    let mut rank = vec![usize::MAX; n];
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut level = 0;
    while !remaining.is_empty() {
        let front: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| {
                remaining.iter().all(|&j| {
                    i == j || pareto_dominance_unchecked(&points[j], &points[i]) != Dominance::First
                })
            })
            .collect();
        for &i in &front {
            rank[i] = level;
        }
        remaining.retain(|i| rank[*i] == usize::MAX);
        level += 1;
    }
    rank
}

/// Extracts objective vectors from solutions, erroring on unevaluated or
/// mixed-dimension members.
pub(crate) fn collect_objectives(set: &[Solution]) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(set.len());
    let mut m = None;
    for (index, s) in set.iter().enumerate() {
        let f = s.objectives().ok_or(Error::Unevaluated { index })?;
        match m {
            None => m = Some(f.len()),
            Some(expected) if expected != f.len() => {
                return Err(Error::DimensionMismatch {
                    context: "objective vectors in set",
                    expected,
                    got: f.len(),
                })
            }
            _ => {}
        }
        out.push(f.to_vec());
    }
    Ok(out)
}

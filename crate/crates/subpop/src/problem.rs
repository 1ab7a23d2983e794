//! Optimization problem abstraction.
//!
//! A [`Problem`] is a deterministic box-constrained minimization task: `M`
//! objectives over an `n`-dimensional box. Evaluation must be a pure function
//! of the decision vector — the whole reproducibility story rests on that.

use rand::Rng;

use crate::rng::RngStream;
use crate::solution::Solution;

/// A box-constrained multi-objective minimization problem.
pub trait Problem: Sync {
    /// Short identifier, e.g. `"wfg4"` or `"sphere"`.
    fn id(&self) -> &str;

    /// Number of objectives `M` (≥ 1).
    fn num_objectives(&self) -> usize;

    /// Decision-space dimension `n`.
    fn dim(&self) -> usize;

    /// Per-dimension lower bounds, length `n`.
    fn lower(&self) -> &[f64];

    /// Per-dimension upper bounds, length `n`.
    fn upper(&self) -> &[f64];

    /// Evaluates the objective vector at `x` (length `n`).
    ///
    /// Must be deterministic and total for in-bounds `x`; out-of-bounds input
    /// may yield non-finite objectives, which downstream comparisons treat as
    /// incomparable.
    fn evaluate(&self, x: &[f64]) -> Vec<f64>;

    /// Total box-constraint violation of `x`: Σ distance outside `[lᵢ, uᵢ]`.
    fn bound_violation(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.lower().iter().zip(self.upper()))
            .map(|(&v, (&lo, &hi))| {
                if v < lo {
                    lo - v
                } else if v > hi {
                    v - hi
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// Whether `x` lies inside the box.
    fn in_bounds(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower().iter().zip(self.upper()))
            .all(|(&v, (&lo, &hi))| v >= lo && v <= hi)
    }

    /// Draws a uniform in-bounds decision vector and evaluates it.
    fn random_solution(&self, rng: &mut RngStream) -> Solution {
        let x: Vec<f64> = self
            .lower()
            .iter()
            .zip(self.upper())
            .map(|(&lo, &hi)| rng.gen_range(lo..=hi))
            .collect();
        Solution::evaluated(x, self)
    }
}

/// The classic sphere function Σxᵢ², a single-objective smoke-test problem.
#[derive(Debug, Clone)]
pub struct Sphere {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Sphere {
    /// Sphere on `[-5.12, 5.12]^dim`.
    pub fn new(dim: usize) -> Self {
        Self {
            lower: vec![-5.12; dim],
            upper: vec![5.12; dim],
        }
    }
}

impl Problem for Sphere {
    fn id(&self) -> &str {
        "sphere"
    }

    fn num_objectives(&self) -> usize {
        1
    }

    fn dim(&self) -> usize {
        self.lower.len()
    }

    fn lower(&self) -> &[f64] {
        &self.lower
    }

    fn upper(&self) -> &[f64] {
        &self.upper
    }

    fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        vec![x.iter().map(|v| v * v).sum()]
    }
}

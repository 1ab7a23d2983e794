//! Interaction-probability matrices.
//!
//! An `s × s` matrix assigns each acting subpopulation `a` a probability
//! distribution over source/target subpopulations: entry `(a, b)` is the
//! probability that `a`'s interaction involves `b`. A row may instead be all
//! zero, meaning the interaction never fires for that subpopulation. One
//! matrix is attached per interaction kind (parent sourcing, archive offers),
//! and classical population structures are expressible as special cases.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Tolerance for row-sum validation.
const ROW_SUM_TOL: f64 = 1e-9;

/// A row-stochastic (or row-zero) interaction matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionMatrix {
    p: Vec<Vec<f64>>,
}

impl InteractionMatrix {
    /// Validates a square matrix: entries in `[0, 1]`, every row summing to
    /// one (within 1e-9) or identically zero.
    pub fn new(p: Vec<Vec<f64>>) -> Result<Self> {
        let s = p.len();
        if s == 0 {
            return Err(Error::EmptyInput("interaction matrix with no rows"));
        }
        for (i, row) in p.iter().enumerate() {
            if row.len() != s {
                return Err(Error::DimensionMismatch {
                    context: "interaction matrix row",
                    expected: s,
                    got: row.len(),
                });
            }
            let mut sum = 0.0;
            for &v in row {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::BadMatrixRow { row: i, sum: v });
                }
                sum += v;
            }
            let zero = row.iter().all(|&v| v == 0.0);
            if !zero && (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::BadMatrixRow { row: i, sum });
            }
        }
        Ok(Self { p })
    }

    /// Number of subpopulations the matrix covers.
    pub fn size(&self) -> usize {
        self.p.len()
    }

    /// Probability row for acting subpopulation `a`.
    pub fn row(&self, a: usize) -> &[f64] {
        &self.p[a]
    }

    /// Whether subpopulation `a`'s interaction is disabled.
    pub fn is_zero_row(&self, a: usize) -> bool {
        self.p[a].iter().all(|&v| v == 0.0)
    }

    /// Draws a partner for subpopulation `a`, or `None` on a zero row.
    ///
    /// Inverse-CDF walk over the row; any residual probability mass from
    /// floating-point rounding falls to the last nonzero entry.
    pub fn sample(&self, a: usize, rng: &mut RngStream) -> Option<usize> {
        if self.is_zero_row(a) {
            return None;
        }
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last_nonzero = 0;
        for (b, &v) in self.p[a].iter().enumerate() {
            if v > 0.0 {
                acc += v;
                last_nonzero = b;
                if u < acc {
                    return Some(b);
                }
            }
        }
        Some(last_nonzero)
    }

    /// Uniform mixing: every entry `1/s`.
    pub fn uniform(s: usize) -> Self {
        Self {
            p: vec![vec![1.0 / s as f64; s]; s],
        }
    }

    /// Deterministic routing of every subpopulation's interaction to `sink`
    /// (the archive-offer pattern: a single column of ones).
    pub fn archive_offer(s: usize, sink: usize) -> Result<Self> {
        if sink >= s {
            return Err(Error::DimensionMismatch {
                context: "archive offer sink",
                expected: s,
                got: sink,
            });
        }
        let mut p = vec![vec![0.0; s]; s];
        for row in &mut p {
            row[sink] = 1.0;
        }
        Ok(Self { p })
    }
}

/// Classical population structures expressed as interaction matrices.
#[derive(Debug, Clone, PartialEq)]
pub enum Topology {
    /// Islands: uniform interaction with every *other* subpopulation
    /// (zero diagonal).
    Island,
    /// Toroidal grid, von Neumann neighbourhood: each cell interacts with
    /// its four wrap-around neighbours, `1/4` each.
    Cellular { rows: usize, cols: usize },
    /// Interaction with all neighbours closer than `sigma` in some embedding
    /// space, uniformly; a subpopulation with no neighbour in range is an
    /// error.
    RestrictedMating { positions: Vec<Vec<f64>>, sigma: f64 },
}

/// Builds the interaction matrix realizing `topology` over `s`
/// subpopulations.
pub fn topology_im(topology: &Topology, s: usize) -> Result<InteractionMatrix> {
    match topology {
        Topology::Island => {
            if s < 2 {
                return Err(Error::BadSizeVector {
                    reason: "island topology needs at least two subpopulations".into(),
                });
            }
            let off = 1.0 / (s - 1) as f64;
            let p = (0..s)
                .map(|a| (0..s).map(|b| if a == b { 0.0 } else { off }).collect())
                .collect();
            InteractionMatrix::new(p)
        }
        Topology::Cellular { rows, cols } => {
            if rows * cols != s || *rows == 0 || *cols == 0 {
                return Err(Error::BadSizeVector {
                    reason: format!("cellular grid {rows}×{cols} does not cover {s} subpopulations"),
                });
            }
            let (r, c) = (*rows as isize, *cols as isize);
            let mut p = vec![vec![0.0; s]; s];
            for row in 0..r {
                for col in 0..c {
                    let a = (row * c + col) as usize;
                    // wrap-around von Neumann neighbours; a degenerate axis
                    // folds both directions onto one cell, accumulating mass
                    for (dr, dc) in [(0, 1), (0, -1), (1, 0), (-1, 0)] {
                        let nr = (row + dr).rem_euclid(r);
                        let nc = (col + dc).rem_euclid(c);
                        p[a][(nr * c + nc) as usize] += 0.25;
                    }
                }
            }
            InteractionMatrix::new(p)
        }
        Topology::RestrictedMating { positions, sigma } => {
            if positions.len() != s {
                return Err(Error::DimensionMismatch {
                    context: "restricted mating positions",
                    expected: s,
                    got: positions.len(),
                });
            }
            if !(sigma > &0.0) {
                return Err(Error::ParameterRange {
                    name: "sigma",
                    value: *sigma,
                    range: "(0, ∞)",
                });
            }
            let mut p = vec![vec![0.0; s]; s];
            for a in 0..s {
                let mut in_range = Vec::new();
                for b in 0..s {
                    if a == b {
                        continue;
                    }
                    let d: f64 = positions[a]
                        .iter()
                        .zip(&positions[b])
                        .map(|(x, y)| (x - y) * (x - y))
                        .sum::<f64>()
                        .sqrt();
                    if d < *sigma {
                        in_range.push(b);
                    }
                }
                if in_range.is_empty() {
                    return Err(Error::IsolatedIndividual {
                        sigma: *sigma,
                        index: a,
                    });
                }
                let w = 1.0 / in_range.len() as f64;
                for b in in_range {
                    p[a][b] = w;
                }
            }
            InteractionMatrix::new(p)
        }
    }
}

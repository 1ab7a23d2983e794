//! The WFG scalable benchmark family (WFG1–WFG9).
//!
//! Each instance minimizes `M` objectives over `n = k + l` variables, where
//! the first `k` are position parameters (they move solutions along the
//! Pareto front) and the last `l` are distance parameters (they move
//! solutions toward it). Variable `zᵢ` has domain `[0, 2i]`. Objectives are
//! assembled by normalizing, piping through problem-specific transformation
//! chains, and projecting onto a shape: `f_m = x_M + 2m · h_m`.
//!
//! On the Pareto front `x_M = 0`, so front objectives lie in `[0, 2m]`;
//! raw evaluations can exceed that by up to the `x_M ≤ 1` distance term.

mod transforms;

use rand::Rng;

use crate::dominance::nondominated_points;
use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::rng::RngStream;

use transforms::*;

/// Constants of the parameter-dependent bias used by WFG7–WFG9.
const PARAM_A: f64 = 0.98 / 49.98;
const PARAM_B: f64 = 0.02;
const PARAM_C: f64 = 50.0;

/// One WFG problem instance.
#[derive(Debug, Clone)]
pub struct WfgInstance {
    family: u8,
    m: usize,
    k: usize,
    l: usize,
    id: String,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl WfgInstance {
    /// Builds `wfg<family>` with `m` objectives, `k` position and `l`
    /// distance parameters.
    ///
    /// Constraints: family in 1–9, `m ≥ 2`, `k` a positive multiple of
    /// `m − 1`, `l ≥ 1`, and `l` even for WFG2/WFG3 (their pairwise
    /// non-separable reduction consumes distance parameters two at a time).
    pub fn new(family: u8, m: usize, k: usize, l: usize) -> Result<Self> {
        if !(1..=9).contains(&family) {
            return Err(Error::BadInstance(format!(
                "wfg family {family} does not exist (valid: 1–9)"
            )));
        }
        if m < 2 {
            return Err(Error::BadInstance(format!(
                "wfg needs at least 2 objectives, got {m}"
            )));
        }
        if k == 0 || k % (m - 1) != 0 {
            return Err(Error::BadInstance(format!(
                "position parameter count {k} must be a positive multiple of M−1 = {}",
                m - 1
            )));
        }
        if l == 0 {
            return Err(Error::BadInstance(
                "need at least one distance parameter".into(),
            ));
        }
        if (family == 2 || family == 3) && l % 2 != 0 {
            return Err(Error::BadInstance(format!(
                "wfg{family} needs an even distance parameter count, got {l}"
            )));
        }
        let n = k + l;
        Ok(Self {
            family,
            m,
            k,
            l,
            id: format!("wfg{family}"),
            lower: vec![0.0; n],
            upper: (1..=n).map(|i| 2.0 * i as f64).collect(),
        })
    }

    /// The benchmark configuration used throughout this crate's experiments:
    /// `k = 4` position and `l = 20` distance parameters.
    pub fn standard(family: u8, m: usize) -> Result<Self> {
        Self::new(family, m, 4, 20)
    }

    /// Family index 1–9.
    pub fn family(&self) -> u8 {
        self.family
    }

    /// Position parameter count `k`.
    pub fn position_params(&self) -> usize {
        self.k
    }

    /// Distance parameter count `l`.
    pub fn distance_params(&self) -> usize {
        self.l
    }

    /// Normalizes `z` into unit-interval working parameters.
    fn normalize(&self, z: &[f64]) -> Vec<f64> {
        z.iter()
            .enumerate()
            .map(|(i, &v)| correct01(v / (2.0 * (i + 1) as f64)))
            .collect()
    }

    /// Index ranges of the position-parameter groups feeding each of the
    /// first `M − 1` reduction outputs.
    fn position_groups(&self) -> Vec<std::ops::Range<usize>> {
        let per = self.k / (self.m - 1);
        (0..self.m - 1).map(|i| i * per..(i + 1) * per).collect()
    }

    /// Applies this family's transformation chain, returning the reduced
    /// vector `t` of length `M`.
    fn transform(&self, y: Vec<f64>) -> Vec<f64> {
        let (k, l, n) = (self.k, self.l, self.k + self.l);
        let groups = self.position_groups();
        let mut y = y;
        match self.family {
            1 => {
                for v in &mut y[k..] {
                    *v = s_linear(*v, 0.35);
                }
                for v in &mut y[k..] {
                    *v = b_flat(*v, 0.8, 0.75, 0.85);
                }
                for v in &mut y {
                    *v = b_poly(*v, 0.02);
                }
                let w: Vec<f64> = (1..=n).map(|i| 2.0 * i as f64).collect();
                let mut t: Vec<f64> = groups
                    .iter()
                    .map(|g| r_sum(&y[g.clone()], &w[g.clone()]))
                    .collect();
                t.push(r_sum(&y[k..], &w[k..]));
                t
            }
            2 | 3 => {
                for v in &mut y[k..] {
                    *v = s_linear(*v, 0.35);
                }
                let mut reduced = y[..k].to_vec();
                for pair in y[k..].chunks_exact(2) {
                    reduced.push(r_nonsep(pair, 2));
                }
                let y = reduced;
                let mut t: Vec<f64> = groups
                    .iter()
                    .map(|g| r_sum(&y[g.clone()], &vec![1.0; g.len()]))
                    .collect();
                t.push(r_sum(&y[k..], &vec![1.0; l / 2]));
                t
            }
            4 => {
                for v in &mut y {
                    *v = s_multi(*v, 30.0, 10.0, 0.35);
                }
                self.plain_sum_reduction(&y, &groups)
            }
            5 => {
                for v in &mut y {
                    *v = s_decept(*v, 0.35, 0.001, 0.05);
                }
                self.plain_sum_reduction(&y, &groups)
            }
            6 => {
                for v in &mut y[k..] {
                    *v = s_linear(*v, 0.35);
                }
                let mut t: Vec<f64> = groups
                    .iter()
                    .map(|g| r_nonsep(&y[g.clone()], g.len()))
                    .collect();
                t.push(r_nonsep(&y[k..], l));
                t
            }
            7 => {
                let mut biased = y.clone();
                for i in 0..k {
                    let tail = &y[i + 1..];
                    let u = r_sum(tail, &vec![1.0; tail.len()]);
                    biased[i] = b_param(y[i], u, PARAM_A, PARAM_B, PARAM_C);
                }
                let mut y = biased;
                for v in &mut y[k..] {
                    *v = s_linear(*v, 0.35);
                }
                self.plain_sum_reduction(&y, &groups)
            }
            8 => {
                let mut biased = y.clone();
                for i in k..n {
                    let head = &y[..i];
                    let u = r_sum(head, &vec![1.0; head.len()]);
                    biased[i] = b_param(y[i], u, PARAM_A, PARAM_B, PARAM_C);
                }
                let mut y = biased;
                for v in &mut y[k..] {
                    *v = s_linear(*v, 0.35);
                }
                self.plain_sum_reduction(&y, &groups)
            }
            9 => {
                let mut biased = y.clone();
                for i in 0..n - 1 {
                    let tail = &y[i + 1..];
                    let u = r_sum(tail, &vec![1.0; tail.len()]);
                    biased[i] = b_param(y[i], u, PARAM_A, PARAM_B, PARAM_C);
                }
                let mut y = biased;
                for v in &mut y[..k] {
                    *v = s_decept(*v, 0.35, 0.001, 0.05);
                }
                for v in &mut y[k..] {
                    *v = s_multi(*v, 30.0, 95.0, 0.35);
                }
                let mut t: Vec<f64> = groups
                    .iter()
                    .map(|g| r_nonsep(&y[g.clone()], g.len()))
                    .collect();
                t.push(r_nonsep(&y[k..], l));
                t
            }
            _ => unreachable!("family validated at construction"),
        }
    }

    /// Equal-weight sum reduction used by WFG4/5/7/8.
    fn plain_sum_reduction(&self, y: &[f64], groups: &[std::ops::Range<usize>]) -> Vec<f64> {
        let mut t: Vec<f64> = groups
            .iter()
            .map(|g| r_sum(&y[g.clone()], &vec![1.0; g.len()]))
            .collect();
        t.push(r_sum(&y[self.k..], &vec![1.0; self.l]));
        t
    }

    /// Degeneracy flags `A₁..A_{M−1}`: all 1 except WFG3, whose front
    /// degenerates to a line (only `A₁ = 1`).
    fn degeneracy(&self) -> Vec<f64> {
        let mut a = vec![1.0; self.m - 1];
        if self.family == 3 {
            for v in &mut a[1..] {
                *v = 0.0;
            }
        }
        a
    }

    /// Projects the reduced vector onto this family's front shape.
    fn shape(&self, t: &[f64]) -> Vec<f64> {
        let m = self.m;
        let a = self.degeneracy();
        let x_m = t[m - 1];
        let x: Vec<f64> = (0..m - 1)
            .map(|i| correct01(x_m.max(a[i]) * (t[i] - 0.5) + 0.5))
            .collect();
        let h: Vec<f64> = match self.family {
            1 => (1..m)
                .map(|j| shape_convex(&x, j))
                .chain(std::iter::once(shape_mixed(x[0], 5.0, 1.0)))
                .collect(),
            2 => (1..m)
                .map(|j| shape_convex(&x, j))
                .chain(std::iter::once(shape_disc(x[0], 5.0, 1.0, 1.0)))
                .collect(),
            3 => (1..=m).map(|j| shape_linear(&x, j)).collect(),
            _ => (1..=m).map(|j| shape_concave(&x, j)).collect(),
        };
        h.iter()
            .enumerate()
            .map(|(j, &hj)| x_m + 2.0 * (j + 1) as f64 * hj)
            .collect()
    }

    /// Normalized distance-parameter values that put a solution on the
    /// Pareto front, given the normalized position values.
    ///
    /// All values live in the normalized `[0,1]` parameter space (decision
    /// coordinate `z_i` divided by its upper bound). Most families optimize
    /// every distance parameter at 0.35 independently, but WFG8's
    /// parameter-dependent bias makes each optimum depend on all preceding
    /// values (a forward recursion) and WFG9's on all following ones (a
    /// backward recursion).
    pub fn optimal_distance_y(&self, position_y: &[f64]) -> Vec<f64> {
        let (k, l, n) = (self.k, self.l, self.k + self.l);
        match self.family {
            8 => {
                // forward recursion: each optimum depends on all preceding
                // normalized values through the bias's secondary input
                let mut ys = position_y.to_vec();
                for i in k..n {
                    let u = r_sum(&ys[..i], &vec![1.0; i]);
                    let e =
                        PARAM_B + (PARAM_C - PARAM_B) * (PARAM_A - (1.0 - 2.0 * u) * ((0.5 - u).floor() + PARAM_A).abs());
                    ys.push(0.35f64.powf(1.0 / e));
                }
                ys[k..].to_vec()
            }
            9 => {
                // backward recursion: the bias reads the following values
                let mut ys = vec![0.0; n];
                ys[n - 1] = 0.35;
                for i in (k..n - 1).rev() {
                    let tail = &ys[i + 1..];
                    let u = r_sum(tail, &vec![1.0; tail.len()]);
                    let e =
                        PARAM_B + (PARAM_C - PARAM_B) * (PARAM_A - (1.0 - 2.0 * u) * ((0.5 - u).floor() + PARAM_A).abs());
                    ys[i] = 0.35f64.powf(1.0 / e);
                }
                ys[k..].to_vec()
            }
            _ => vec![0.35; l],
        }
    }

    /// Samples `count` mutually non-dominated objective vectors on the
    /// Pareto front.
    ///
    /// Points are drawn in the shape stage's own coordinates: the reduced
    /// position values are uniform on `[0,1]^{M−1}` and the distance value is
    /// pinned at its optimum of zero. Sampling upstream decision parameters
    /// instead would funnel the draw through the transformation biases and
    /// concentrate coverage wherever those biases point (WFG1's polynomial
    /// bias squeezes uniform draws into a sliver of the front). For families
    /// whose shape admits dominated parameter choices (WFG1's mixed and
    /// WFG2's disconnected tail) the sample is filtered and topped up until
    /// `count` survivors remain.
    pub fn front_sample(&self, count: usize, rng: &mut RngStream) -> Result<Vec<Vec<f64>>> {
        if count == 0 {
            return Err(Error::EmptyInput("front sample of size zero"));
        }
        let needs_filter = self.family <= 3;
        let mut pool: Vec<Vec<f64>> = Vec::new();
        loop {
            let missing = count - pool.len();
            // mild oversampling amortizes the filter passes
            let batch = if needs_filter {
                missing + missing / 2 + 8
            } else {
                missing
            };
            for _ in 0..batch {
                let mut t: Vec<f64> = (0..self.m - 1).map(|_| rng.gen()).collect();
                t.push(0.0);
                pool.push(self.shape(&t));
            }
            if needs_filter {
                pool = nondominated_points(&pool);
            }
            if pool.len() >= count {
                pool.truncate(count);
                return Ok(pool);
            }
        }
    }
}

impl Problem for WfgInstance {
    fn id(&self) -> &str {
        &self.id
    }

    fn num_objectives(&self) -> usize {
        self.m
    }

    fn dim(&self) -> usize {
        self.k + self.l
    }

    fn lower(&self) -> &[f64] {
        &self.lower
    }

    fn upper(&self) -> &[f64] {
        &self.upper
    }

    fn evaluate(&self, z: &[f64]) -> Vec<f64> {
        assert_eq!(z.len(), self.dim(), "decision vector length");
        let y = self.normalize(z);
        let t = self.transform(y);
        self.shape(&t)
    }
}

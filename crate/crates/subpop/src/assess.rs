//! Quality assessment of solution sets: the multiplicative ε-indicator,
//! hypervolume (exact and Monte Carlo), empirical attainment surfaces, and
//! a one-sided Mann–Whitney rank-sum test for comparing indicator samples.
//!
//! All objectives are minimized and assumed non-negative (as produced by
//! the benchmark problems in this crate); negative or NaN coordinates are
//! rejected.

use crate::dominance::nondominated_points;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use rand::Rng;

/// Checks a set of objective vectors: non-empty, uniform width `m`, finite,
/// non-negative.
fn check_set(set: &[Vec<f64>], m: usize, what: &'static str) -> Result<()> {
    if set.is_empty() {
        return Err(Error::EmptyInput(what));
    }
    for p in set {
        if p.len() != m {
            return Err(Error::DimensionMismatch {
                context: "objective vector width",
                expected: m,
                got: p.len(),
            });
        }
        for &v in p {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::BadInstance(format!(
                    "objective value {v} in {what}: must be finite and non-negative"
                )));
            }
        }
    }
    Ok(())
}

/// Ratio by which `a` must shrink to match `r`, with the zero conventions
/// `ratio(0, 0) = 1` and `ratio(a>0, 0) = ∞`.
fn eps_ratio(a: f64, r: f64) -> f64 {
    if r > 0.0 {
        a / r
    } else if a > 0.0 {
        f64::INFINITY
    } else {
        1.0
    }
}

/// Multiplicative ε-indicator of `set` against `reference`.
///
/// The smallest factor ε such that every reference point is weakly
/// dominated by some set point after the set is scaled down by ε:
/// `max over r of min over a of max over m of a_m / r_m`.
///
/// Values ≤ 1 mean the set covers the reference; larger is worse. An empty
/// set cannot cover anything and scores `+∞`.
pub fn epsilon_indicator(set: &[Vec<f64>], reference: &[Vec<f64>]) -> Result<f64> {
    if set.is_empty() || reference.is_empty() {
        return Ok(f64::INFINITY);
    }
    let m = reference[0].len();
    check_set(set, m, "approximation set")?;
    check_set(reference, m, "reference set")?;
    let mut worst = f64::NEG_INFINITY;
    for r in reference {
        let mut best = f64::INFINITY;
        for a in set {
            let mut ratio = f64::NEG_INFINITY;
            for j in 0..m {
                ratio = ratio.max(eps_ratio(a[j], r[j]));
            }
            best = best.min(ratio);
        }
        worst = worst.max(best);
    }
    Ok(worst)
}

/// Componentwise maximum of a point set — the worst observed value per
/// objective.
pub fn nadir(set: &[Vec<f64>]) -> Result<Vec<f64>> {
    if set.is_empty() {
        return Err(Error::EmptyInput("nadir of empty set"));
    }
    let m = set[0].len();
    check_set(set, m, "nadir input")?;
    let mut out = vec![f64::NEG_INFINITY; m];
    for p in set {
        for j in 0..m {
            out[j] = out[j].max(p[j]);
        }
    }
    Ok(out)
}

/// Drops points that fail to improve on the reference point in every
/// coordinate — they enclose zero volume.
fn clip_to_reference(set: &[Vec<f64>], reference: &[f64]) -> Vec<Vec<f64>> {
    set.iter()
        .filter(|p| p.iter().zip(reference).all(|(&v, &r)| v < r))
        .cloned()
        .collect()
}

/// Exact hypervolume dominated by `set` up to the reference point
/// (minimization: the measure of the region between the set and the
/// reference corner).
///
/// Two objectives use a linear sweep; higher dimensions slice along the
/// last objective and recurse, which is exact but exponential in the worst
/// case — practical for the set sizes this crate produces up to five
/// objectives.
pub fn hypervolume(set: &[Vec<f64>], reference: &[f64]) -> Result<f64> {
    let m = reference.len();
    if m == 0 {
        return Err(Error::EmptyInput("zero-dimensional reference point"));
    }
    if set.is_empty() {
        return Ok(0.0);
    }
    check_set(set, m, "hypervolume input")?;
    for &r in reference {
        if !r.is_finite() {
            return Err(Error::BadInstance(format!(
                "reference coordinate {r} must be finite"
            )));
        }
    }
    let clipped = clip_to_reference(set, reference);
    let front = nondominated_points(&clipped);
    Ok(hv_recurse(front, reference))
}

/// Recursive slicing kernel; callers guarantee `points` is non-dominated
/// and strictly inside the reference box.
fn hv_recurse(mut points: Vec<Vec<f64>>, reference: &[f64]) -> f64 {
    let m = reference.len();
    if points.is_empty() {
        return 0.0;
    }
    match m {
        1 => {
            let best = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            reference[0] - best
        }
        2 => {
            // non-dominated 2-D points sorted by f₁ form a descending
            // staircase in f₂; sum the strips
            points.sort_by(|a, b| a[0].total_cmp(&b[0]));
            let mut area = 0.0;
            for i in 0..points.len() {
                let right = if i + 1 < points.len() {
                    points[i + 1][0]
                } else {
                    reference[0]
                };
                area += (right - points[i][0]) * (reference[1] - points[i][1]);
            }
            area
        }
        _ => {
            points.sort_by(|a, b| a[m - 1].total_cmp(&b[m - 1]));
            let mut total = 0.0;
            for i in 0..points.len() {
                let lo = points[i][m - 1];
                let hi = if i + 1 < points.len() {
                    points[i + 1][m - 1]
                } else {
                    reference[m - 1]
                };
                if hi <= lo {
                    continue;
                }
                let slab: Vec<Vec<f64>> = points[..=i]
                    .iter()
                    .map(|p| p[..m - 1].to_vec())
                    .collect();
                let slab = nondominated_points(&slab);
                total += (hi - lo) * hv_recurse(slab, &reference[..m - 1]);
            }
            total
        }
    }
}

/// Monte Carlo hypervolume estimate: `(value, standard_error)`.
///
/// Samples uniformly in the box spanned by the set's componentwise minimum
/// and the reference point, counting dominated draws. The standard error is
/// the binomial one scaled by the box volume.
pub fn hypervolume_monte_carlo(
    set: &[Vec<f64>],
    reference: &[f64],
    samples: u64,
    rng: &mut RngStream,
) -> Result<(f64, f64)> {
    let m = reference.len();
    if samples == 0 {
        return Err(Error::ParameterRange {
            name: "samples",
            value: 0.0,
            range: "[1, ∞)",
        });
    }
    if set.is_empty() {
        return Ok((0.0, 0.0));
    }
    check_set(set, m, "hypervolume input")?;
    let clipped = clip_to_reference(set, reference);
    if clipped.is_empty() {
        return Ok((0.0, 0.0));
    }
    let front = nondominated_points(&clipped);
    let mut lower = vec![f64::INFINITY; m];
    for p in &front {
        for j in 0..m {
            lower[j] = lower[j].min(p[j]);
        }
    }
    let box_volume: f64 = (0..m).map(|j| reference[j] - lower[j]).product();
    let mut hits: u64 = 0;
    let mut draw = vec![0.0; m];
    for _ in 0..samples {
        for j in 0..m {
            draw[j] = rng.gen_range(lower[j]..reference[j]);
        }
        if front
            .iter()
            .any(|p| p.iter().zip(&draw).all(|(&v, &u)| v <= u))
        {
            hits += 1;
        }
    }
    let fraction = hits as f64 / samples as f64;
    let se = box_volume * (fraction * (1.0 - fraction) / samples as f64).sqrt();
    Ok((box_volume * fraction, se))
}

/// Hypervolume-difference indicator: `HV(front) − HV(set)`, both measured
/// against the nadir of the reference front. Returns `(value,
/// standard_error)`.
///
/// Set points beyond the nadir are clipped out, so the indicator can be
/// negative only when the set covers nadir-box volume the front sample
/// misses. Up to three objectives the difference is exact (standard error
/// zero); above that, both terms are estimated from the same Monte Carlo
/// draws, which cancels most sampling noise in the difference.
pub fn hypervolume_indicator(
    set: &[Vec<f64>],
    front: &[Vec<f64>],
    mc_samples: u64,
    rng: &mut RngStream,
) -> Result<(f64, f64)> {
    if front.is_empty() {
        return Err(Error::EmptyInput("reference front"));
    }
    let m = front[0].len();
    check_set(front, m, "reference front")?;
    if !set.is_empty() {
        check_set(set, m, "approximation set")?;
    }
    let reference = nadir(front)?;
    for j in 0..m {
        let lo = front.iter().map(|p| p[j]).fold(f64::INFINITY, f64::min);
        if lo >= reference[j] {
            return Err(Error::BadInstance(format!(
                "reference box has zero extent in objective {}: nadir equals \
                 the front minimum {lo}",
                j + 1
            )));
        }
    }
    if m <= 3 {
        let hv_front = hypervolume(front, &reference)?;
        let hv_set = hypervolume(set, &reference)?;
        return Ok((hv_front - hv_set, 0.0));
    }
    if mc_samples == 0 {
        return Err(Error::ParameterRange {
            name: "mc_samples",
            value: 0.0,
            range: "[1, ∞)",
        });
    }
    let front_nd = nondominated_points(&clip_to_reference(front, &reference));
    let set_nd = nondominated_points(&clip_to_reference(set, &reference));
    let mut lower = vec![f64::INFINITY; m];
    for p in front_nd.iter().chain(&set_nd) {
        for j in 0..m {
            lower[j] = lower[j].min(p[j]);
        }
    }
    let box_volume: f64 = (0..m).map(|j| reference[j] - lower[j]).product();
    let dominated = |points: &[Vec<f64>], u: &[f64]| {
        points
            .iter()
            .any(|p| p.iter().zip(u).all(|(&v, &w)| v <= w))
    };
    let mut diff_sum: f64 = 0.0;
    let mut diff_sq: f64 = 0.0;
    let mut draw = vec![0.0; m];
    for _ in 0..mc_samples {
        for j in 0..m {
            draw[j] = rng.gen_range(lower[j]..reference[j]);
        }
        let d = f64::from(dominated(&front_nd, &draw)) - f64::from(dominated(&set_nd, &draw));
        diff_sum += d;
        diff_sq += d * d;
    }
    let n = mc_samples as f64;
    let mean = diff_sum / n;
    let var = (diff_sq / n - mean * mean).max(0.0);
    Ok((box_volume * mean, box_volume * (var / n).sqrt()))
}

/// Empirical attainment surface for two objectives.
///
/// Returns the staircase of minimal points weakly attained by at least
/// `k` of the given runs, sorted by the first objective. A run attains a
/// point when one of its solutions is coordinatewise less-or-equal. With
/// `k = ⌈R/2⌉` this is the median attainment surface.
pub fn attainment_surface(runs: &[Vec<Vec<f64>>], k: usize) -> Result<Vec<Vec<f64>>> {
    if runs.is_empty() {
        return Err(Error::EmptyInput("no runs for attainment surface"));
    }
    if k == 0 || k > runs.len() {
        return Err(Error::ParameterRange {
            name: "k",
            value: k as f64,
            range: "[1, number of runs]",
        });
    }
    for run in runs {
        check_set(run, 2, "attainment input")?;
    }
    // Candidate f₁ levels: every observed f₁. At each level, each run's
    // best attainable f₂ is its minimum over points with p₁ ≤ level; the
    // surface height is the k-th smallest of those.
    let mut levels: Vec<f64> = runs
        .iter()
        .flat_map(|run| run.iter().map(|p| p[0]))
        .collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut raw: Vec<Vec<f64>> = Vec::new();
    for &x in &levels {
        let mut heights: Vec<f64> = runs
            .iter()
            .map(|run| {
                run.iter()
                    .filter(|p| p[0] <= x)
                    .map(|p| p[1])
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        heights.sort_by(f64::total_cmp);
        let y = heights[k - 1];
        if y.is_finite() {
            raw.push(vec![x, y]);
        }
    }
    // Keep only the proper staircase corners: drop any level whose height
    // matches the previous retained one.
    let mut surface: Vec<Vec<f64>> = Vec::new();
    for p in raw {
        if let Some(last) = surface.last() {
            if p[1] >= last[1] {
                continue;
            }
        }
        surface.push(p);
    }
    if surface.is_empty() {
        return Err(Error::EmptyInput("attainment surface has no finite points"));
    }
    Ok(surface)
}

/// Median attainment surface: attained by at least half the runs
/// (`⌈R/2⌉`). Needs at least two runs to be a meaningful median.
pub fn median_attainment_surface(runs: &[Vec<Vec<f64>>]) -> Result<Vec<Vec<f64>>> {
    if runs.len() < 2 {
        return Err(Error::EmptyInput("median attainment needs two runs"));
    }
    attainment_surface(runs, runs.len().div_ceil(2))
}

/// Midranks of the pooled sample; ties share the average of the ranks they
/// span. Returns (ranks aligned with input order, tie group sizes).
fn midranks(pooled: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let n = pooled.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
    let mut ranks = vec![0.0; n];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && pooled[order[j + 1]] == pooled[order[i]] {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = mid;
        }
        ties.push(j - i + 1);
        i = j + 1;
    }
    (ranks, ties)
}

/// Rank-sum statistic U for the first sample: number of (a, b) pairs with
/// a before b, counting ties as half.
fn u_statistic(ranks: &[f64], n_a: usize) -> f64 {
    let r_a: f64 = ranks[..n_a].iter().sum();
    r_a - (n_a * (n_a + 1)) as f64 / 2.0
}

/// One-sided Mann–Whitney test: p-value for the alternative that values in
/// `a` tend to be *smaller* than values in `b`.
///
/// Pooled sizes up to twelve are handled by exact enumeration of all
/// group assignments; larger samples use the normal approximation with tie
/// correction and a continuity correction. Identical constant samples give
/// `0.5` (no evidence either way).
pub fn mann_whitney_less(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::EmptyInput(
            "rank-sum test needs at least two values per sample",
        ));
    }
    for &v in a.iter().chain(b) {
        if v.is_nan() {
            return Err(Error::BadInstance("NaN in rank-sum sample".into()));
        }
    }
    let n_a = a.len();
    let n_b = b.len();
    let n = n_a + n_b;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    if pooled.iter().all(|&v| v == pooled[0]) {
        // a fully tied pool ranks every assignment identically — no
        // evidence in either direction
        return Ok(0.5);
    }
    let (ranks, ties) = midranks(&pooled);
    let u_obs = u_statistic(&ranks, n_a);

    if n <= 12 {
        // exact permutation distribution of U over all assignments of the
        // pooled values into a group of size n_a
        let mut le = 0u64;
        let mut total = 0u64;
        let mut subset: Vec<usize> = (0..n_a).collect();
        loop {
            let r_a: f64 = subset.iter().map(|&i| ranks[i]).sum();
            let u = r_a - (n_a * (n_a + 1)) as f64 / 2.0;
            if u <= u_obs + 1e-12 {
                le += 1;
            }
            total += 1;
            // next combination in lexicographic order
            let mut i = n_a;
            loop {
                if i == 0 {
                    return Ok(le as f64 / total as f64);
                }
                i -= 1;
                if subset[i] != i + n - n_a {
                    break;
                }
            }
            subset[i] += 1;
            for j in i + 1..n_a {
                subset[j] = subset[j - 1] + 1;
            }
        }
    }

    let mu = (n_a * n_b) as f64 / 2.0;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum();
    let sigma_sq = (n_a * n_b) as f64 / 12.0
        * ((n + 1) as f64 - tie_term / (n as f64 * (n - 1) as f64));
    if sigma_sq <= 0.0 {
        return Ok(0.5);
    }
    let z = (u_obs - mu + 0.5) / sigma_sq.sqrt();
    use statrs::distribution::{ContinuousCDF, Normal};
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    Ok(normal.cdf(z))
}

/// Mean, sample standard deviation, and a best-group flag for one
/// algorithm's indicator sample.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorSummary {
    pub mean: f64,
    pub sd: f64,
    /// Within one standard deviation of the best mean (smaller is better).
    pub best: bool,
}

/// Summarizes indicator samples per algorithm and flags every algorithm
/// whose mean is within one standard deviation of the best mean.
pub fn summarize(samples: &[Vec<f64>]) -> Result<Vec<IndicatorSummary>> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("no samples to summarize"));
    }
    let mut out: Vec<IndicatorSummary> = Vec::with_capacity(samples.len());
    for sample in samples {
        if sample.is_empty() {
            return Err(Error::EmptyInput("empty indicator sample"));
        }
        let n = sample.len() as f64;
        let mean = sample.iter().sum::<f64>() / n;
        let sd = if sample.len() > 1 {
            (sample.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        out.push(IndicatorSummary {
            mean,
            sd,
            best: false,
        });
    }
    let (best_idx, _) = out
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.mean.total_cmp(&y.1.mean))
        .expect("non-empty");
    let cutoff = out[best_idx].mean + out[best_idx].sd;
    for s in &mut out {
        s.best = s.mean <= cutoff;
    }
    Ok(out)
}

//! Displacement-force diagnostics for two-objective runs.
//!
//! Every trial exerts a "force" on its parent: the objective-space
//! displacement `trial.f − parent.f`, measured before selection so that
//! rejected trials count too. Aggregating those vectors into an angular
//! histogram shows where a strategy pushes its population — toward which
//! objective, along the front, or nowhere at all.
//!
//! Angles are measured from the positive first-objective axis,
//! counter-clockwise, in 36 bins of ten degrees. Two kinds of trial carry
//! no direction and are excluded from the bins but still counted:
//! infeasible trials, and trials whose displacement is exactly zero.

use crate::de::StepObserver;
use crate::error::{Error, Result};
use crate::solution::Solution;
use std::io::{self, Write};

/// Number of angular bins.
pub const BINS: usize = 36;

/// Angular histogram of displacement forces plus exclusion counters.
#[derive(Debug, Clone)]
pub struct ForceHistogram {
    bins: [u64; BINS],
    zero_modulus: u64,
    infeasible: u64,
    offers: u64,
    sum_modulus: f64,
}

impl Default for ForceHistogram {
    fn default() -> Self {
        Self {
            bins: [0; BINS],
            zero_modulus: 0,
            infeasible: 0,
            offers: 0,
            sum_modulus: 0.0,
        }
    }
}

impl ForceHistogram {
    /// Records one displacement. `feasible` refers to the trial; the
    /// parent is always a population member and therefore feasible.
    pub fn record(&mut self, parent_f: &[f64], trial_f: &[f64], feasible: bool) {
        assert_eq!(parent_f.len(), 2, "force diagnostics are two-objective");
        assert_eq!(trial_f.len(), 2, "force diagnostics are two-objective");
        self.offers += 1;
        if !feasible {
            self.infeasible += 1;
            return;
        }
        let d1 = trial_f[0] - parent_f[0];
        let d2 = trial_f[1] - parent_f[1];
        let modulus = (d1 * d1 + d2 * d2).sqrt();
        if modulus == 0.0 {
            self.zero_modulus += 1;
            return;
        }
        self.sum_modulus += modulus;
        let mut angle = d2.atan2(d1);
        if angle < 0.0 {
            angle += 2.0 * std::f64::consts::PI;
        }
        let step = std::f64::consts::PI / 18.0;
        let bin = ((angle / step).floor() as usize).min(BINS - 1);
        self.bins[bin] += 1;
    }

    /// Raw bin counts, bin `i` covering `[10i°, 10(i+1)°)`.
    pub fn bins(&self) -> &[u64; BINS] {
        &self.bins
    }

    /// Total displacements recorded, including excluded ones.
    pub fn offers(&self) -> u64 {
        self.offers
    }

    /// Trials excluded for being infeasible.
    pub fn infeasible(&self) -> u64 {
        self.infeasible
    }

    /// Trials excluded for moving nowhere in objective space.
    pub fn zero_modulus(&self) -> u64 {
        self.zero_modulus
    }

    /// Displacements that landed in a bin.
    pub fn binned(&self) -> u64 {
        self.bins.iter().sum()
    }

    /// Fraction of all offers with exactly zero displacement.
    pub fn zero_modulus_fraction(&self) -> f64 {
        if self.offers == 0 {
            0.0
        } else {
            self.zero_modulus as f64 / self.offers as f64
        }
    }

    /// Mean modulus over binned displacements.
    pub fn mean_modulus(&self) -> f64 {
        let n = self.binned();
        if n == 0 {
            0.0
        } else {
            self.sum_modulus / n as f64
        }
    }

    /// Binned counts folded into the four quadrants: `[0°–90°), [90°–180°),
    /// [180°–270°), [270°–360°)`. The third quadrant is displacement that
    /// improves both objectives; the first worsens both.
    pub fn quadrant_counts(&self) -> [u64; 4] {
        let mut q = [0u64; 4];
        for (i, &c) in self.bins.iter().enumerate() {
            q[i / 9] += c;
        }
        q
    }

    /// Quadrant counts as fractions of all binned displacements (zeros
    /// when nothing is binned).
    pub fn quadrant_shares(&self) -> [f64; 4] {
        let total = self.binned();
        if total == 0 {
            return [0.0; 4];
        }
        self.quadrant_counts().map(|c| c as f64 / total as f64)
    }

    /// Every offer is either binned or excluded — this identity is the
    /// bookkeeping check for the whole histogram.
    pub fn is_conserved(&self) -> bool {
        self.binned() + self.zero_modulus + self.infeasible == self.offers
    }

    /// Accumulates another histogram into this one.
    pub fn merge(&mut self, other: &ForceHistogram) {
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            *a += b;
        }
        self.zero_modulus += other.zero_modulus;
        self.infeasible += other.infeasible;
        self.offers += other.offers;
        self.sum_modulus += other.sum_modulus;
    }
}

/// Observer that maintains one [`ForceHistogram`] per subpopulation.
#[derive(Debug, Clone)]
pub struct ForceRecorder {
    per_subpop: Vec<ForceHistogram>,
}

impl ForceRecorder {
    /// One histogram per subpopulation.
    pub fn new(num_subpops: usize) -> Self {
        Self {
            per_subpop: vec![ForceHistogram::default(); num_subpops],
        }
    }

    /// Histogram of one subpopulation.
    pub fn subpop(&self, a: usize) -> &ForceHistogram {
        &self.per_subpop[a]
    }

    /// Number of tracked subpopulations.
    pub fn len(&self) -> usize {
        self.per_subpop.len()
    }

    /// Whether no subpopulation is tracked.
    pub fn is_empty(&self) -> bool {
        self.per_subpop.is_empty()
    }

    /// All histograms merged into one.
    pub fn total(&self) -> ForceHistogram {
        let mut out = ForceHistogram::default();
        for h in &self.per_subpop {
            out.merge(h);
        }
        out
    }

    /// Accumulates another recorder with the same subpopulation layout.
    pub fn merge(&mut self, other: &ForceRecorder) {
        assert_eq!(
            self.per_subpop.len(),
            other.per_subpop.len(),
            "recorders track different subpopulation counts"
        );
        for (a, b) in self.per_subpop.iter_mut().zip(&other.per_subpop) {
            a.merge(b);
        }
    }

    /// Writes a plain-text report: one block per subpopulation plus the
    /// merged total, each with counters, quadrant shares, and the 36-bin
    /// histogram.
    pub fn write_report(&self, w: &mut dyn Write, labels: &[String]) -> io::Result<()> {
        assert_eq!(labels.len(), self.per_subpop.len());
        for (label, hist) in labels.iter().zip(&self.per_subpop) {
            write_block(w, label, hist)?;
        }
        write_block(w, "total", &self.total())
    }
}

fn write_block(w: &mut dyn Write, label: &str, h: &ForceHistogram) -> io::Result<()> {
    writeln!(w, "[{label}]")?;
    writeln!(
        w,
        "offers={} binned={} zero_modulus={} infeasible={}",
        h.offers(),
        h.binned(),
        h.zero_modulus(),
        h.infeasible()
    )?;
    writeln!(
        w,
        "zero_modulus_fraction={:.6} mean_modulus={:.6}",
        h.zero_modulus_fraction(),
        h.mean_modulus()
    )?;
    let q = h.quadrant_shares();
    writeln!(
        w,
        "quadrant_shares={:.6} {:.6} {:.6} {:.6}",
        q[0], q[1], q[2], q[3]
    )?;
    for (i, &c) in h.bins().iter().enumerate() {
        writeln!(w, "bin {:>3}-{:<3} {}", i * 10, (i + 1) * 10, c)?;
    }
    writeln!(w)
}

impl StepObserver for ForceRecorder {
    fn before_selection(&mut self, subpop: usize, parent: &Solution, trial: &Solution) {
        self.per_subpop[subpop].record(parent.f(), trial.f(), trial.is_feasible());
    }
}

/// Parses a report produced by [`ForceRecorder::write_report`] back into
/// labelled histograms, including the `total` block.
///
/// The summed modulus is reconstructed from the printed mean, so it is
/// only as precise as the report's six decimal places; counts are exact.
pub fn parse_report(text: &str) -> Result<Vec<(String, ForceHistogram)>> {
    let mut blocks: Vec<(String, ForceHistogram)> = Vec::new();
    let mut current: Option<(String, ForceHistogram)> = None;
    let parse_err = |line: usize, reason: String| Error::Parse {
        what: "force report".into(),
        line,
        reason,
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = idx + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(label) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            if let Some(done) = current.take() {
                blocks.push(done);
            }
            current = Some((label.to_string(), ForceHistogram::default()));
            continue;
        }
        let Some((_, hist)) = current.as_mut() else {
            return Err(parse_err(lineno, "data before the first [label]".into()));
        };
        if let Some(rest) = line.strip_prefix("bin ") {
            let mut parts = rest.split_whitespace();
            let range = parts
                .next()
                .ok_or_else(|| parse_err(lineno, "bin line without a range".into()))?;
            let count: u64 = parts
                .next()
                .ok_or_else(|| parse_err(lineno, "bin line without a count".into()))?
                .parse()
                .map_err(|e| parse_err(lineno, format!("bad bin count: {e}")))?;
            let lo: usize = range
                .split('-')
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err(lineno, format!("bad bin range {range:?}")))?;
            if lo % 10 != 0 || lo / 10 >= BINS {
                return Err(parse_err(lineno, format!("bin range {range:?} out of bounds")));
            }
            hist.bins[lo / 10] = count;
        } else {
            for field in line.split_whitespace() {
                let Some((key, value)) = field.split_once('=') else {
                    continue;
                };
                match key {
                    "offers" => {
                        hist.offers = value
                            .parse()
                            .map_err(|e| parse_err(lineno, format!("bad offers: {e}")))?;
                    }
                    "zero_modulus" => {
                        hist.zero_modulus = value
                            .parse()
                            .map_err(|e| parse_err(lineno, format!("bad zero_modulus: {e}")))?;
                    }
                    "infeasible" => {
                        hist.infeasible = value
                            .parse()
                            .map_err(|e| parse_err(lineno, format!("bad infeasible: {e}")))?;
                    }
                    "mean_modulus" => {
                        let mean: f64 = value
                            .parse()
                            .map_err(|e| parse_err(lineno, format!("bad mean_modulus: {e}")))?;
                        hist.sum_modulus = mean; // scaled by binned() below
                    }
                    // binned, fractions, and shares are derived quantities
                    _ => {}
                }
            }
        }
    }
    if let Some(done) = current.take() {
        blocks.push(done);
    }
    if blocks.is_empty() {
        return Err(Error::EmptyInput("force report has no blocks"));
    }
    for (label, hist) in &mut blocks {
        hist.sum_modulus *= hist.binned() as f64;
        if !hist.is_conserved() {
            return Err(Error::Parse {
                what: "force report".into(),
                line: 0,
                reason: format!("block [{label}] fails offer conservation"),
            });
        }
    }
    Ok(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Purpose, RngStream, StreamKey};
    use rand::Rng;

    #[test]
    fn axis_aligned_displacements_land_in_expected_bins() {
        let mut h = ForceHistogram::default();
        let origin = [0.0, 0.0];
        h.record(&origin, &[1.0, 0.0], true); // 0° → bin 0
        h.record(&origin, &[0.0, 1.0], true); // 90° → bin 9
        h.record(&origin, &[-1.0, 0.0], true); // 180° → bin 18
        h.record(&origin, &[0.0, -1.0], true); // 270° → bin 27
        h.record(&origin, &[1.0, 1.0], true); // 45° → bin 4
        h.record(&origin, &[-1.0, -1.0], true); // 225° → bin 22
        assert_eq!(h.bins()[0], 1);
        assert_eq!(h.bins()[9], 1);
        assert_eq!(h.bins()[18], 1);
        assert_eq!(h.bins()[27], 1);
        assert_eq!(h.bins()[4], 1);
        assert_eq!(h.bins()[22], 1);
        assert_eq!(h.binned(), 6);
    }

    #[test]
    fn exclusions_are_counted_not_binned() {
        let mut h = ForceHistogram::default();
        h.record(&[1.0, 2.0], &[1.0, 2.0], true); // zero modulus
        h.record(&[1.0, 2.0], &[9.0, 9.0], false); // infeasible
        h.record(&[1.0, 2.0], &[2.0, 1.0], true); // binned
        assert_eq!(h.offers(), 3);
        assert_eq!(h.zero_modulus(), 1);
        assert_eq!(h.infeasible(), 1);
        assert_eq!(h.binned(), 1);
        assert!(h.is_conserved());
        assert!((h.zero_modulus_fraction() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn quadrants_fold_bins_by_nine() {
        let mut h = ForceHistogram::default();
        let origin = [5.0, 5.0];
        // third quadrant: both objectives improve
        h.record(&origin, &[4.0, 4.0], true);
        h.record(&origin, &[4.5, 3.0], true);
        // first quadrant: both worsen
        h.record(&origin, &[6.0, 7.0], true);
        let q = h.quadrant_counts();
        assert_eq!(q, [1, 0, 2, 0]);
        let s = h.quadrant_shares();
        assert!((s[2] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn conservation_holds_under_random_load() {
        let mut h = ForceHistogram::default();
        let mut rng = RngStream::new(
            5,
            StreamKey {
                run: 0,
                subpop: 0,
                purpose: Purpose::Assess,
            },
        );
        for _ in 0..10_000 {
            let parent = [rng.gen_range(0.0..4.0), rng.gen_range(0.0..4.0)];
            let trial = if rng.gen_range(0..10) == 0 {
                parent // force exact zero displacement sometimes
            } else {
                [rng.gen_range(0.0..4.0), rng.gen_range(0.0..4.0)]
            };
            let feasible = rng.gen_range(0..20) != 0;
            h.record(&parent, &trial, feasible);
        }
        assert_eq!(h.offers(), 10_000);
        assert!(h.is_conserved());
        assert!(h.zero_modulus() > 0);
        assert!(h.infeasible() > 0);
        let shares: f64 = h.quadrant_shares().iter().sum();
        assert!((shares - 1.0).abs() < 1e-12);
    }

    #[test]
    fn merge_adds_everything() {
        let mut a = ForceHistogram::default();
        let mut b = ForceHistogram::default();
        a.record(&[0.0, 0.0], &[1.0, 1.0], true);
        b.record(&[0.0, 0.0], &[-1.0, 1.0], true);
        b.record(&[0.0, 0.0], &[0.0, 0.0], true);
        a.merge(&b);
        assert_eq!(a.offers(), 3);
        assert_eq!(a.binned(), 2);
        assert_eq!(a.zero_modulus(), 1);
        assert!(a.is_conserved());
    }

    #[test]
    fn report_round_trips_through_the_parser() {
        let mut rec = ForceRecorder::new(2);
        let mut rng = RngStream::new(
            11,
            StreamKey {
                run: 0,
                subpop: 0,
                purpose: Purpose::Assess,
            },
        );
        for _ in 0..500 {
            let s = rng.gen_range(0..2);
            let parent = [rng.gen_range(0.0..4.0), rng.gen_range(0.0..4.0)];
            let trial = [rng.gen_range(0.0..4.0), rng.gen_range(0.0..4.0)];
            rec.per_subpop[s].record(&parent, &trial, rng.gen_range(0..10) != 0);
        }
        let mut out = Vec::new();
        rec.write_report(&mut out, &["one".into(), "two".into()])
            .unwrap();
        let text = String::from_utf8(out).unwrap();
        let blocks = parse_report(&text).unwrap();
        assert_eq!(blocks.len(), 3);
        assert_eq!(blocks[0].0, "one");
        assert_eq!(blocks[2].0, "total");
        for (i, (_, parsed)) in blocks.iter().take(2).enumerate() {
            let original = rec.subpop(i);
            assert_eq!(parsed.bins(), original.bins());
            assert_eq!(parsed.offers(), original.offers());
            assert_eq!(parsed.infeasible(), original.infeasible());
            assert_eq!(parsed.zero_modulus(), original.zero_modulus());
            assert!(parsed.is_conserved());
            // modulus survives only at report precision
            assert!((parsed.mean_modulus() - original.mean_modulus()).abs() < 1e-5);
        }
        assert_eq!(blocks[2].1.offers(), rec.total().offers());
        assert!(parse_report("offers=1\n").is_err(), "data before any label");
        assert!(parse_report("").is_err(), "empty report");
    }

    #[test]
    fn recorder_collects_during_a_run() {
        use crate::de::DeParams;
        use crate::gsf::{run_gsf, GsfConfig};
        use crate::novelty::NoveltyParams;
        use crate::wfg::WfgInstance;

        let problem = WfgInstance::standard(4, 2).unwrap();
        let novelty = NoveltyParams::new(15, 0.1, 1.1, 0.999, 1, 50_000).unwrap();
        let cfg = GsfConfig::san(
            2,
            DeParams::new(0.1, 0.1).unwrap(),
            novelty,
            30,
            15,
        )
        .unwrap();
        let mut recorder = ForceRecorder::new(3);
        run_gsf(&problem, &cfg, 17, &mut recorder).unwrap();
        let total = recorder.total();
        assert_eq!(total.offers(), 30 * 15);
        assert!(total.is_conserved());
        for a in 0..3 {
            assert!(recorder.subpop(a).offers() > 0);
            assert!(recorder.subpop(a).is_conserved());
        }
        let mut out = Vec::new();
        recorder
            .write_report(
                &mut out,
                &["de_f1".into(), "de_f2".into(), "mixer".into()],
            )
            .unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("[de_f1]"));
        assert!(text.contains("[total]"));
        assert!(text.contains("quadrant_shares="));
    }
}

//! Framework configuration: strategies, size ratios, and preset
//! compositions.

use crate::de::DeParams;
use crate::error::{Error, Result};
use crate::gsf::im::InteractionMatrix;
use crate::novelty::NoveltyParams;

/// Relative subpopulation sizes.
///
/// Ratios lie in `(0, 1]` and sum to one (a single subpopulation owns the
/// whole ratio). Realization onto an integer total uses largest-remainder
/// rounding so the parts always sum to the requested total.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeVector(Vec<f64>);

impl SizeVector {
    /// Validates the ratio vector.
    pub fn new(ratios: Vec<f64>) -> Result<Self> {
        if ratios.is_empty() {
            return Err(Error::BadSizeVector {
                reason: "must not be empty".into(),
            });
        }
        for &r in &ratios {
            if !(r > 0.0 && r <= 1.0) {
                return Err(Error::BadSizeVector {
                    reason: format!("ratio {r} outside (0, 1]"),
                });
            }
        }
        let sum: f64 = ratios.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::BadSizeVector {
                reason: format!("ratios sum to {sum}, expected 1"),
            });
        }
        Ok(Self(ratios))
    }

    /// The raw ratios.
    pub fn ratios(&self) -> &[f64] {
        &self.0
    }

    /// Number of subpopulations described.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Whether the vector is empty (never true for a validated vector).
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Splits `total` members into integer subpopulation sizes by largest
    /// remainder; every subpopulation receives at least one member.
    pub fn realize(&self, total: usize) -> Result<Vec<usize>> {
        if total < self.0.len() {
            return Err(Error::BadSizeVector {
                reason: format!(
                    "total size {total} cannot cover {} subpopulations",
                    self.0.len()
                ),
            });
        }
        let mut sizes: Vec<usize> = Vec::with_capacity(self.0.len());
        let mut remainders: Vec<(f64, usize)> = Vec::with_capacity(self.0.len());
        let mut assigned = 0usize;
        for (i, &r) in self.0.iter().enumerate() {
            let exact = r * total as f64;
            let floor = exact.floor() as usize;
            sizes.push(floor);
            assigned += floor;
            remainders.push((exact - floor as f64, i));
        }
        // hand out the leftover seats to the largest remainders; ties go to
        // the earlier subpopulation for determinism
        remainders.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut leftover = total - assigned;
        let mut cursor = 0;
        while leftover > 0 {
            sizes[remainders[cursor % remainders.len()].1] += 1;
            leftover -= 1;
            cursor += 1;
        }
        // guarantee non-empty subpopulations by taking from the largest
        while sizes.iter().any(|&s| s == 0) {
            let zero = sizes.iter().position(|&s| s == 0).expect("just checked");
            let largest = (0..sizes.len())
                .max_by_key(|&i| sizes[i])
                .expect("non-empty");
            if sizes[largest] <= 1 {
                return Err(Error::BadSizeVector {
                    reason: "cannot give every subpopulation a member".into(),
                });
            }
            sizes[largest] -= 1;
            sizes[zero] += 1;
        }
        Ok(sizes)
    }
}

/// Per-subpopulation search strategy.
#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    /// Classic DE minimizing one objective of the shared problem.
    SingleObjectiveDe { objective: usize, params: DeParams },
    /// Pareto-based GDE3.
    Gde3 { params: DeParams, prune_k: usize },
    /// Novelty-archive MONA.
    Mona {
        params: DeParams,
        novelty: NoveltyParams,
    },
}

impl Strategy {
    /// Whether this strategy maintains a novelty archive.
    pub fn is_mona(&self) -> bool {
        matches!(self, Strategy::Mona { .. })
    }
}

/// Full framework configuration.
///
/// A framework run is a tuple of subpopulations (one per strategy), their
/// size ratios, and up to two interaction matrices: `parent_im` routes
/// parent sourcing during variation, `offer_im` routes candidate offers into
/// novelty archives. Either matrix may be absent, in which case the
/// corresponding interaction stays within each subpopulation (parents) or
/// never fires (offers).
#[derive(Debug, Clone)]
pub struct GsfConfig {
    /// Strategy of each subpopulation, index-aligned with `sizes`.
    pub strategies: Vec<Strategy>,
    /// Relative subpopulation sizes.
    pub sizes: SizeVector,
    /// Total member count across all subpopulations.
    pub total_size: usize,
    /// Generations to run.
    pub generations: u64,
    /// Parent-routing interaction matrix (IM index 1 in the composition).
    pub parent_im: Option<InteractionMatrix>,
    /// Archive-offer interaction matrix (IM index 2).
    pub offer_im: Option<InteractionMatrix>,
    /// Offer trials to archives even when selection discarded them.
    pub offer_losing_trials: bool,
    /// Optional evaluation budget; the run stops before exceeding it.
    pub max_evaluations: Option<u64>,
}

impl GsfConfig {
    /// Validates internal consistency against a problem with `m` objectives.
    pub fn validate(&self, m: usize) -> Result<()> {
        if self.strategies.is_empty() {
            return Err(Error::EmptyInput("no strategies configured"));
        }
        let s = self.strategies.len();
        if self.sizes.len() != s {
            return Err(Error::DimensionMismatch {
                context: "size ratios vs strategies",
                expected: s,
                got: self.sizes.len(),
            });
        }
        for im in [&self.parent_im, &self.offer_im].into_iter().flatten() {
            if im.size() != s {
                return Err(Error::DimensionMismatch {
                    context: "interaction matrix size",
                    expected: s,
                    got: im.size(),
                });
            }
        }
        for strat in &self.strategies {
            if let Strategy::SingleObjectiveDe { objective, .. } = strat {
                if *objective >= m {
                    return Err(Error::DimensionMismatch {
                        context: "single-objective strategy objective index",
                        expected: m,
                        got: *objective,
                    });
                }
            }
        }
        if self.generations == 0 {
            return Err(Error::ParameterRange {
                name: "generations",
                value: 0.0,
                range: "[1, ∞)",
            });
        }
        self.sizes.realize(self.total_size).map(|_| ())
    }

    /// Published size ratios for the DE-plus-mixer compositions: `m`
    /// single-objective subpopulations followed by one mixing strategy.
    ///
    /// Two- and five-objective splits follow the reference configurations
    /// (0.3/0.3/0.4 with a novelty mixer, 0.1-per-DE otherwise); other
    /// objective counts give each DE `0.5/m` and the mixer the rest.
    fn mixer_ratios(m: usize, novelty_mixer: bool) -> Vec<f64> {
        let de_share = match (m, novelty_mixer) {
            (2, true) => 0.3,
            (2, false) => 0.1,
            (5, _) => 0.1,
            _ => 0.5 / m as f64,
        };
        let mut s = vec![de_share; m];
        s.push(1.0 - de_share * m as f64);
        s
    }

    /// `m` single-objective DE subpopulations plus a MONA mixer, uniform
    /// parent routing and every offer funneled into the archive.
    pub fn san(
        m: usize,
        de: DeParams,
        novelty: NoveltyParams,
        total_size: usize,
        generations: u64,
    ) -> Result<Self> {
        let mut strategies: Vec<Strategy> = (0..m)
            .map(|objective| Strategy::SingleObjectiveDe {
                objective,
                params: de,
            })
            .collect();
        strategies.push(Strategy::Mona {
            params: de,
            novelty,
        });
        let s = strategies.len();
        let cfg = Self {
            strategies,
            sizes: SizeVector::new(Self::mixer_ratios(m, true))?,
            total_size,
            generations,
            parent_im: Some(InteractionMatrix::uniform(s)),
            offer_im: Some(InteractionMatrix::archive_offer(s, s - 1)?),
            offer_losing_trials: true,
            max_evaluations: None,
        };
        Ok(cfg)
    }

    /// `m` single-objective DE subpopulations plus a GDE3 mixer with uniform
    /// parent routing (no archive exists, so no offer matrix).
    pub fn sagde(
        m: usize,
        de: DeParams,
        prune_k: usize,
        total_size: usize,
        generations: u64,
    ) -> Result<Self> {
        let mut strategies: Vec<Strategy> = (0..m)
            .map(|objective| Strategy::SingleObjectiveDe {
                objective,
                params: de,
            })
            .collect();
        strategies.push(Strategy::Gde3 {
            params: de,
            prune_k,
        });
        let s = strategies.len();
        Ok(Self {
            strategies,
            sizes: SizeVector::new(Self::mixer_ratios(m, false))?,
            total_size,
            generations,
            parent_im: Some(InteractionMatrix::uniform(s)),
            offer_im: None,
            offer_losing_trials: true,
            max_evaluations: None,
        })
    }

    /// Plain panmictic GDE3 as a single-subpopulation composition.
    pub fn gde3(de: DeParams, prune_k: usize, total_size: usize, generations: u64) -> Result<Self> {
        Ok(Self {
            strategies: vec![Strategy::Gde3 {
                params: de,
                prune_k,
            }],
            sizes: SizeVector::new(vec![1.0])?,
            total_size,
            generations,
            parent_im: None,
            offer_im: None,
            offer_losing_trials: true,
            max_evaluations: None,
        })
    }

    /// Plain panmictic MONA as a single-subpopulation composition.
    pub fn mona(
        de: DeParams,
        novelty: NoveltyParams,
        total_size: usize,
        generations: u64,
    ) -> Result<Self> {
        Ok(Self {
            strategies: vec![Strategy::Mona {
                params: de,
                novelty,
            }],
            sizes: SizeVector::new(vec![1.0])?,
            total_size,
            generations,
            parent_im: None,
            offer_im: None,
            offer_losing_trials: true,
            max_evaluations: None,
        })
    }
}

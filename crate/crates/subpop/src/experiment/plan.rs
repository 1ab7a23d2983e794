//! Experiment plans: a plain-text, sectioned key-value format describing
//! which algorithms run on which problems, with the parameter names the
//! rest of the toolkit uses (`CR`, `F`, `S`, `IM`, `k`, `n_min0`, `n_inc`,
//! `n_dec`, `n_a`, `n_r`).
//!
//! A rendered plan is also the experiment manifest: [`ExperimentPlan::render`]
//! emits every resolved value in a fixed order, and loading that text back
//! yields an equal plan, so a finished experiment can be reproduced from
//! its manifest alone.

use crate::de::DeParams;
use crate::error::{Error, Result};
use crate::gsf::{GsfConfig, SizeVector};
use crate::novelty::NoveltyParams;
use crate::problem::Problem;
use crate::wfg::WfgInstance;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// Experiment scale.
///
/// `Desk` sizes runs for minutes of wall time; `Paper` pins the
/// full-scale protocol (30 runs, 25000 generations, total size 100) and
/// rejects attempts to override those three values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Desk,
    Paper,
}

impl Profile {
    /// (runs, generations, total_size) implied by the profile.
    pub fn defaults(self) -> (u32, u64, usize) {
        match self {
            Profile::Desk => (10, 2000, 100),
            Profile::Paper => (30, 25_000, 100),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Desk => "desk",
            Profile::Paper => "paper",
        })
    }
}

impl FromStr for Profile {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "desk" => Ok(Profile::Desk),
            "paper" => Ok(Profile::Paper),
            other => Err(format!("unknown profile `{other}` (desk|paper)")),
        }
    }
}

/// One benchmark instance: family 1–9 and objective count, written
/// `wfg<family>:<M>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProblemSpec {
    pub family: u8,
    pub m: usize,
}

impl ProblemSpec {
    /// Builds the standard instance (4 position and 20 distance
    /// parameters).
    pub fn instance(&self) -> Result<WfgInstance> {
        WfgInstance::standard(self.family, self.m)
    }

    /// Directory-safe name, e.g. `wfg4_m2`.
    pub fn dir_name(&self) -> String {
        format!("wfg{}_m{}", self.family, self.m)
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "wfg{}:{}", self.family, self.m)
    }
}

impl FromStr for ProblemSpec {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let rest = s
            .strip_prefix("wfg")
            .ok_or_else(|| format!("problem `{s}` must look like wfg4:2"))?;
        let (family, m) = rest
            .split_once(':')
            .ok_or_else(|| format!("problem `{s}` must look like wfg4:2"))?;
        let family: u8 = family
            .parse()
            .map_err(|_| format!("bad family in `{s}`"))?;
        let m: usize = m.parse().map_err(|_| format!("bad objective count in `{s}`"))?;
        if !(1..=9).contains(&family) {
            return Err(format!("family {family} out of range 1–9"));
        }
        if m < 2 {
            return Err(format!("objective count {m} must be at least 2"));
        }
        Ok(ProblemSpec { family, m })
    }
}

/// The algorithms the experiment driver knows how to compose.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmKind {
    /// Single-objective DE subpopulations plus a novelty-archive mixer.
    San,
    /// Single-objective DE subpopulations plus a GDE3 mixer.
    Sagde,
    /// Plain GDE3.
    Gde3,
    /// Plain novelty-archive search.
    Mona,
}

impl AlgorithmKind {
    /// Whether the composition carries a novelty archive (and therefore
    /// the archive-threshold parameters).
    fn has_archive(self) -> bool {
        matches!(self, AlgorithmKind::San | AlgorithmKind::Mona)
    }

    /// Whether the composition is multiple subpopulations with a size
    /// vector and interaction matrix.
    fn is_composition(self) -> bool {
        matches!(self, AlgorithmKind::San | AlgorithmKind::Sagde)
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgorithmKind::San => "san",
            AlgorithmKind::Sagde => "sagde",
            AlgorithmKind::Gde3 => "gde3",
            AlgorithmKind::Mona => "mona",
        })
    }
}

impl FromStr for AlgorithmKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "san" => Ok(AlgorithmKind::San),
            "sagde" => Ok(AlgorithmKind::Sagde),
            "gde3" => Ok(AlgorithmKind::Gde3),
            "mona" => Ok(AlgorithmKind::Mona),
            other => Err(format!(
                "unknown algorithm `{other}` (san|sagde|gde3|mona)"
            )),
        }
    }
}

/// Parameters of one algorithm in the plan.
///
/// `k` is the neighbor count of whichever distance measure the algorithm
/// uses: archive novelty neighbors for `san`/`mona`, pruning neighbors for
/// `gde3`/`sagde`. `s = None` and `n_min0 = None` mean "auto": the
/// published size tables and a tenth of the objective-space diagonal,
/// resolved per problem.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmSettings {
    pub kind: AlgorithmKind,
    pub cr: f64,
    pub f: f64,
    pub s: Option<Vec<f64>>,
    pub k: usize,
    pub n_min0: Option<f64>,
    pub n_inc: f64,
    pub n_dec: f64,
    pub n_a: u32,
    pub n_r: u32,
}

impl AlgorithmSettings {
    /// Published defaults for each algorithm.
    pub fn defaults(kind: AlgorithmKind) -> Self {
        let f = match kind {
            AlgorithmKind::Gde3 => 0.5,
            _ => 0.1,
        };
        let k = if kind.has_archive() { 15 } else { 2 };
        AlgorithmSettings {
            kind,
            cr: 0.1,
            f,
            s: None,
            k,
            n_min0: None,
            n_inc: 1.1,
            n_dec: 0.999,
            n_a: 1,
            n_r: 50_000,
        }
    }

    /// Initial novelty threshold: explicit value, or a tenth of the
    /// diagonal of the attainable objective box.
    fn resolve_n_min0(&self, problem: &WfgInstance) -> f64 {
        self.n_min0.unwrap_or_else(|| {
            let diag = (1..=problem.num_objectives())
                .map(|j| (1.0 + 2.0 * j as f64).powi(2))
                .sum::<f64>()
                .sqrt();
            0.1 * diag
        })
    }

    /// Translates the settings into a runnable framework configuration
    /// for one problem.
    pub fn build_config(
        &self,
        problem: &WfgInstance,
        total_size: usize,
        generations: u64,
    ) -> Result<GsfConfig> {
        use crate::problem::Problem;
        let m = problem.num_objectives();
        let de = DeParams::new(self.f, self.cr)?;
        let mut cfg = match self.kind {
            AlgorithmKind::San => {
                let novelty = NoveltyParams::new(
                    self.k,
                    self.resolve_n_min0(problem),
                    self.n_inc,
                    self.n_dec,
                    self.n_a,
                    self.n_r,
                )?;
                GsfConfig::san(m, de, novelty, total_size, generations)?
            }
            AlgorithmKind::Sagde => {
                GsfConfig::sagde(m, de, self.k, total_size, generations)?
            }
            AlgorithmKind::Gde3 => GsfConfig::gde3(de, self.k, total_size, generations)?,
            AlgorithmKind::Mona => {
                let novelty = NoveltyParams::new(
                    self.k,
                    self.resolve_n_min0(problem),
                    self.n_inc,
                    self.n_dec,
                    self.n_a,
                    self.n_r,
                )?;
                GsfConfig::mona(de, novelty, total_size, generations)?
            }
        };
        if let Some(ratios) = &self.s {
            if !self.kind.is_composition() {
                return Err(Error::BadSizeVector {
                    reason: format!("have no meaning for `{}`", self.kind),
                });
            }
            cfg.sizes = SizeVector::new(ratios.clone())?;
            cfg.validate(m)?;
        }
        Ok(cfg)
    }

    /// Human-readable names of the subpopulations this algorithm runs on
    /// an `m`-objective problem, in framework order.
    pub fn subpop_labels(&self, m: usize) -> Vec<String> {
        match self.kind {
            AlgorithmKind::San => {
                let mut v: Vec<String> = (1..=m).map(|j| format!("de_f{j}")).collect();
                v.push("mona".into());
                v
            }
            AlgorithmKind::Sagde => {
                let mut v: Vec<String> = (1..=m).map(|j| format!("de_f{j}")).collect();
                v.push("gde3".into());
                v
            }
            AlgorithmKind::Gde3 => vec!["gde3".into()],
            AlgorithmKind::Mona => vec!["mona".into()],
        }
    }
}

/// A full experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub profile: Profile,
    pub problems: Vec<ProblemSpec>,
    pub algorithms: Vec<AlgorithmSettings>,
    pub runs: u32,
    pub generations: u64,
    pub total_size: usize,
    pub seed: u64,
    /// Reference-front sample size per problem.
    pub front_size: usize,
    /// Monte Carlo sample count for hypervolume above three objectives.
    pub hv_samples: u64,
}

impl ExperimentPlan {
    /// A plan with profile defaults and published algorithm parameters.
    pub fn preset(
        profile: Profile,
        problems: Vec<ProblemSpec>,
        kinds: &[AlgorithmKind],
        seed: u64,
    ) -> Self {
        let (runs, generations, total_size) = profile.defaults();
        ExperimentPlan {
            profile,
            problems,
            algorithms: kinds
                .iter()
                .map(|&kind| AlgorithmSettings::defaults(kind))
                .collect(),
            runs,
            generations,
            total_size,
            seed,
            front_size: 10_000,
            hv_samples: 1_000_000,
        }
    }

    /// Checks global consistency.
    pub fn validate(&self) -> Result<()> {
        if self.problems.is_empty() {
            return Err(Error::EmptyInput("plan lists no problems"));
        }
        if self.algorithms.is_empty() {
            return Err(Error::EmptyInput("plan lists no algorithms"));
        }
        for (i, a) in self.algorithms.iter().enumerate() {
            for b in &self.algorithms[..i] {
                if a.kind == b.kind {
                    return Err(Error::BadInstance(format!(
                        "algorithm `{}` listed twice",
                        a.kind
                    )));
                }
            }
        }
        if self.runs == 0 {
            return Err(Error::ParameterRange {
                name: "runs",
                value: 0.0,
                range: "[1, ∞)",
            });
        }
        if self.profile == Profile::Paper {
            let (runs, generations, total_size) = Profile::Paper.defaults();
            if (self.runs, self.generations, self.total_size)
                != (runs, generations, total_size)
            {
                return Err(Error::BadInstance(format!(
                    "paper profile fixes runs={runs}, generations={generations}, \
                     total_size={total_size}"
                )));
            }
        }
        if self.front_size == 0 {
            return Err(Error::ParameterRange {
                name: "front_size",
                value: 0.0,
                range: "[1, ∞)",
            });
        }
        if self.hv_samples == 0 {
            return Err(Error::ParameterRange {
                name: "hv_samples",
                value: 0.0,
                range: "[1, ∞)",
            });
        }
        // fail early on configurations that cannot build
        for problem in &self.problems {
            let instance = problem.instance()?;
            for alg in &self.algorithms {
                alg.build_config(&instance, self.total_size, self.generations)?;
            }
        }
        Ok(())
    }

    /// Renders the plan in manifest form: fixed key order, every value
    /// explicit. Loading the result reproduces this plan exactly.
    pub fn render(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        out.push_str("# experiment manifest — rerun with `subpop run <this file>`\n");
        out.push_str("[experiment]\n");
        writeln!(out, "version = {}", env!("CARGO_PKG_VERSION")).unwrap();
        writeln!(out, "profile = {}", self.profile).unwrap();
        let problems: Vec<String> = self.problems.iter().map(|p| p.to_string()).collect();
        writeln!(out, "problems = {}", problems.join(" ")).unwrap();
        let algorithms: Vec<String> =
            self.algorithms.iter().map(|a| a.kind.to_string()).collect();
        writeln!(out, "algorithms = {}", algorithms.join(" ")).unwrap();
        writeln!(out, "runs = {}", self.runs).unwrap();
        writeln!(out, "generations = {}", self.generations).unwrap();
        writeln!(out, "total_size = {}", self.total_size).unwrap();
        writeln!(out, "seed = {}", self.seed).unwrap();
        writeln!(out, "front_size = {}", self.front_size).unwrap();
        writeln!(out, "hv_samples = {}", self.hv_samples).unwrap();
        for alg in &self.algorithms {
            out.push('\n');
            writeln!(out, "[{}]", alg.kind).unwrap();
            writeln!(out, "CR = {}", alg.cr).unwrap();
            writeln!(out, "F = {}", alg.f).unwrap();
            if alg.kind.is_composition() {
                match &alg.s {
                    Some(ratios) => {
                        let parts: Vec<String> =
                            ratios.iter().map(|r| r.to_string()).collect();
                        writeln!(out, "S = {}", parts.join(" ")).unwrap();
                    }
                    None => writeln!(out, "S = auto").unwrap(),
                }
                writeln!(out, "IM = uniform").unwrap();
            }
            writeln!(out, "k = {}", alg.k).unwrap();
            if alg.kind.has_archive() {
                match alg.n_min0 {
                    Some(v) => writeln!(out, "n_min0 = {v}").unwrap(),
                    None => writeln!(out, "n_min0 = auto").unwrap(),
                }
                writeln!(out, "n_inc = {}", alg.n_inc).unwrap();
                writeln!(out, "n_dec = {}", alg.n_dec).unwrap();
                writeln!(out, "n_a = {}", alg.n_a).unwrap();
                writeln!(out, "n_r = {}", alg.n_r).unwrap();
            }
        }
        out
    }

    /// Parses a plan from its text form.
    pub fn parse(text: &str) -> Result<Self> {
        let sections = split_sections(text)?;
        let experiment = sections
            .get("experiment")
            .ok_or_else(|| parse_err(0, "missing [experiment] section"))?;

        let mut profile = Profile::Desk;
        let mut problems: Vec<ProblemSpec> = Vec::new();
        let mut algorithm_names: Vec<(AlgorithmKind, usize)> = Vec::new();
        let mut runs: Option<u32> = None;
        let mut generations: Option<u64> = None;
        let mut total_size: Option<usize> = None;
        let mut seed: u64 = 1;
        let mut front_size: usize = 10_000;
        let mut hv_samples: u64 = 1_000_000;

        for &(ref key, ref value, line) in experiment {
            match key.as_str() {
                "version" => {} // informational
                "profile" => profile = value.parse().map_err(|e| parse_err(line, e))?,
                "problems" => {
                    for word in value.split_whitespace() {
                        let spec: ProblemSpec =
                            word.parse().map_err(|e| parse_err(line, e))?;
                        problems.push(spec);
                    }
                }
                "algorithms" => {
                    for word in value.split_whitespace() {
                        let kind: AlgorithmKind =
                            word.parse().map_err(|e| parse_err(line, e))?;
                        algorithm_names.push((kind, line));
                    }
                }
                "runs" => runs = Some(parse_num(value, line)?),
                "generations" => generations = Some(parse_num(value, line)?),
                "total_size" => total_size = Some(parse_num(value, line)?),
                "seed" => seed = parse_num(value, line)?,
                "front_size" => front_size = parse_num(value, line)?,
                "hv_samples" => hv_samples = parse_num(value, line)?,
                other => {
                    return Err(parse_err(
                        line,
                        format!("unknown key `{other}` in [experiment]"),
                    ))
                }
            }
        }

        let (d_runs, d_gens, d_total) = profile.defaults();
        let mut algorithms = Vec::with_capacity(algorithm_names.len());
        for (kind, _) in &algorithm_names {
            let mut settings = AlgorithmSettings::defaults(*kind);
            if let Some(entries) = sections.get(kind.to_string().as_str()) {
                apply_algorithm_keys(&mut settings, entries)?;
            }
            algorithms.push(settings);
        }
        // reject sections that configure nothing
        for name in sections.keys() {
            if name != "experiment"
                && !algorithm_names.iter().any(|(k, _)| k.to_string() == *name)
            {
                return Err(parse_err(
                    0,
                    format!("section [{name}] does not match any listed algorithm"),
                ));
            }
        }

        let plan = ExperimentPlan {
            profile,
            problems,
            algorithms,
            runs: runs.unwrap_or(d_runs),
            generations: generations.unwrap_or(d_gens),
            total_size: total_size.unwrap_or(d_total),
            seed,
            front_size,
            hv_samples,
        };
        plan.validate()?;
        Ok(plan)
    }

    /// Loads and parses a plan file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::parse(&text)
    }
}

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        what: "experiment plan".into(),
        line,
        reason: reason.into(),
    }
}

fn parse_num<T: FromStr>(value: &str, line: usize) -> Result<T> {
    value
        .parse()
        .map_err(|_| parse_err(line, format!("cannot parse number `{value}`")))
}

type Entries = Vec<(String, String, usize)>;

/// Splits the text into sections of `key = value` entries, rejecting
/// duplicate sections, duplicate keys, and anything else it cannot read.
fn split_sections(text: &str) -> Result<BTreeMap<String, Entries>> {
    let mut sections: BTreeMap<String, Entries> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| parse_err(line, "unterminated [section] header"))?
                .trim()
                .to_string();
            if sections.contains_key(&name) {
                return Err(parse_err(line, format!("duplicate section [{name}]")));
            }
            sections.insert(name.clone(), Vec::new());
            current = Some(name);
            continue;
        }
        let (key, value) = trimmed
            .split_once('=')
            .ok_or_else(|| parse_err(line, "expected `key = value`"))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        let section = current
            .as_ref()
            .ok_or_else(|| parse_err(line, "key before any [section] header"))?;
        let entries = sections.get_mut(section).expect("section exists");
        if entries.iter().any(|(k, _, _)| *k == key) {
            return Err(parse_err(
                line,
                format!("duplicate key `{key}` in [{section}]"),
            ));
        }
        entries.push((key, value, line));
    }
    Ok(sections)
}

fn apply_algorithm_keys(settings: &mut AlgorithmSettings, entries: &Entries) -> Result<()> {
    let kind = settings.kind;
    for &(ref key, ref value, line) in entries {
        match key.as_str() {
            "CR" => settings.cr = parse_num(value, line)?,
            "F" => settings.f = parse_num(value, line)?,
            "k" => settings.k = parse_num(value, line)?,
            "S" if kind.is_composition() => {
                settings.s = if value == "auto" {
                    None
                } else {
                    let ratios: Result<Vec<f64>> = value
                        .split_whitespace()
                        .map(|w| parse_num(w, line))
                        .collect();
                    Some(ratios?)
                };
            }
            "IM" if kind.is_composition() => {
                if value != "uniform" {
                    return Err(parse_err(
                        line,
                        format!("IM `{value}` unsupported in plans (only `uniform`)"),
                    ));
                }
            }
            "n_min0" if kind.has_archive() => {
                settings.n_min0 = if value == "auto" {
                    None
                } else {
                    Some(parse_num(value, line)?)
                };
            }
            "n_inc" if kind.has_archive() => settings.n_inc = parse_num(value, line)?,
            "n_dec" if kind.has_archive() => settings.n_dec = parse_num(value, line)?,
            "n_a" if kind.has_archive() => settings.n_a = parse_num(value, line)?,
            "n_r" if kind.has_archive() => settings.n_r = parse_num(value, line)?,
            other => {
                return Err(parse_err(
                    line,
                    format!("key `{other}` not valid for algorithm `{kind}`"),
                ))
            }
        }
    }
    Ok(())
}

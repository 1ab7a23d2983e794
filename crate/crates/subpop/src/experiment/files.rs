//! On-disk formats for experiment artifacts.
//!
//! Every numeric value is written with 17 significant digits, enough for a
//! bit-exact `f64` round trip, so reruns can be compared byte for byte.

use crate::error::{Error, Result};
use crate::solution::Solution;
use std::fmt::Write as _;
use std::path::Path;

/// A solution set loaded from disk: provenance header plus the raw
/// decision and objective vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSetFile {
    pub problem: String,
    pub objectives: usize,
    pub seed: u64,
    pub decisions: Vec<Vec<f64>>,
    pub points: Vec<Vec<f64>>,
}

/// Formats one float with 17 significant digits.
fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Renders a solution set: a `#` header naming the problem, objective
/// count, set size, and seed, then one line per solution holding the
/// decision vector followed by the objective vector, space-delimited.
pub fn render_solution_set(
    problem: &str,
    seed: u64,
    objectives: usize,
    set: &[Solution],
) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "# problem={problem} objectives={objectives} size={} seed={seed}",
        set.len()
    )
    .unwrap();
    for sol in set {
        let mut first = true;
        for &v in sol.x().iter().chain(sol.f()) {
            if !first {
                out.push(' ');
            }
            out.push_str(&fmt_value(v));
            first = false;
        }
        out.push('\n');
    }
    out
}

/// Writes a rendered solution set to `path`.
pub fn write_solution_set(
    path: &Path,
    problem: &str,
    seed: u64,
    objectives: usize,
    set: &[Solution],
) -> Result<()> {
    std::fs::write(path, render_solution_set(problem, seed, objectives, set))
        .map_err(|e| Error::io(path.display().to_string(), e))
}

fn header_field<'a>(header: &'a str, key: &str, path: &str) -> Result<&'a str> {
    header
        .split_whitespace()
        .find_map(|w| w.strip_prefix(&format!("{key}=")[..]))
        .ok_or_else(|| Error::Parse {
            what: path.into(),
            line: 1,
            reason: format!("header lacks `{key}=`"),
        })
}

/// Reads a solution-set file written by [`write_solution_set`].
pub fn read_solution_set(path: &Path) -> Result<SolutionSetFile> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let what = path.display().to_string();
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Parse {
        what: what.clone(),
        line: 1,
        reason: "empty file".into(),
    })?;
    if !header.starts_with('#') {
        return Err(Error::Parse {
            what,
            line: 1,
            reason: "missing `#` header line".into(),
        });
    }
    let problem = header_field(header, "problem", &what)?.to_string();
    let objectives: usize = header_field(header, "objectives", &what)?
        .parse()
        .map_err(|_| Error::Parse {
            what: what.clone(),
            line: 1,
            reason: "bad objective count".into(),
        })?;
    let size: usize = header_field(header, "size", &what)?
        .parse()
        .map_err(|_| Error::Parse {
            what: what.clone(),
            line: 1,
            reason: "bad size".into(),
        })?;
    let seed: u64 = header_field(header, "seed", &what)?
        .parse()
        .map_err(|_| Error::Parse {
            what: what.clone(),
            line: 1,
            reason: "bad seed".into(),
        })?;
    let mut decisions = Vec::with_capacity(size);
    let mut points = Vec::with_capacity(size);
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let values: Vec<f64> = line
            .split_whitespace()
            .map(|w| {
                w.parse().map_err(|_| Error::Parse {
                    what: what.clone(),
                    line: i + 1,
                    reason: format!("bad number `{w}`"),
                })
            })
            .collect::<Result<_>>()?;
        if values.len() <= objectives {
            return Err(Error::Parse {
                what,
                line: i + 1,
                reason: format!(
                    "row has {} values, need more than the {objectives} objectives",
                    values.len()
                ),
            });
        }
        let split = values.len() - objectives;
        decisions.push(values[..split].to_vec());
        points.push(values[split..].to_vec());
    }
    if points.len() != size {
        return Err(Error::Parse {
            what,
            line: 1,
            reason: format!("header says size={size}, found {} rows", points.len()),
        });
    }
    Ok(SolutionSetFile {
        problem,
        objectives,
        seed,
        decisions,
        points,
    })
}

/// Renders a sampled reference front: same header shape as a solution set
/// but objective columns only.
pub fn render_front(problem: &str, seed: u64, front: &[Vec<f64>]) -> String {
    let mut out = String::new();
    let objectives = front.first().map_or(0, Vec::len);
    writeln!(
        out,
        "# problem={problem} objectives={objectives} size={} seed={seed}",
        front.len()
    )
    .unwrap();
    for p in front {
        let row: Vec<String> = p.iter().map(|&v| fmt_value(v)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Writes a rendered front to `path`.
pub fn write_front(path: &Path, problem: &str, seed: u64, front: &[Vec<f64>]) -> Result<()> {
    std::fs::write(path, render_front(problem, seed, front))
        .map_err(|e| Error::io(path.display().to_string(), e))
}

/// Reads a front file: `#`-prefixed lines are skipped, every other line is
/// one objective vector. Solution-set files also load (their objective
/// columns are the trailing `objectives` values — detected from the
/// header when present).
pub fn read_points(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let what = path.display().to_string();
    let mut objectives: Option<usize> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('#') {
            if objectives.is_none() {
                if let Ok(v) = header_field(trimmed, "objectives", &what) {
                    objectives = v.parse().ok();
                }
            }
            continue;
        }
        let values: Vec<f64> = trimmed
            .split_whitespace()
            .map(|w| {
                w.parse().map_err(|_| Error::Parse {
                    what: what.clone(),
                    line: i + 1,
                    reason: format!("bad number `{w}`"),
                })
            })
            .collect::<Result<_>>()?;
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("no data rows in points file"));
    }
    let m = objectives.unwrap_or(rows[0].len());
    rows.iter_mut()
        .map(|row| {
            if row.len() < m {
                return Err(Error::Parse {
                    what: what.clone(),
                    line: 0,
                    reason: format!("row has {} values, need at least {m}", row.len()),
                });
            }
            *row = row[row.len() - m..].to_vec();
            Ok(())
        })
        .collect::<Result<Vec<()>>>()?;
    Ok(rows)
}

/// Renders a per-run indicator table: one row per run with the run
/// number, ε-indicator, hypervolume difference, and the hypervolume
/// standard error (zero when exact).
pub fn render_indicator_table(rows: &[(u32, f64, f64, f64)]) -> String {
    let mut out = String::from("# run epsilon hypervolume_diff hypervolume_se\n");
    for &(run, eps, hv, se) in rows {
        writeln!(
            out,
            "{run:02} {} {} {}",
            fmt_value(eps),
            fmt_value(hv),
            fmt_value(se)
        )
        .unwrap();
    }
    out
}

/// Reads an indicator table back: `(run, epsilon, hypervolume_diff,
/// hypervolume_se)` per row.
pub fn read_indicator_table(path: &Path) -> Result<Vec<(u32, f64, f64, f64)>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let what = path.display().to_string();
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = trimmed.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(Error::Parse {
                what,
                line: i + 1,
                reason: format!("expected 4 columns, got {}", parts.len()),
            });
        }
        let parse = |w: &str| -> Result<f64> {
            w.parse().map_err(|_| Error::Parse {
                what: what.clone(),
                line: i + 1,
                reason: format!("bad number `{w}`"),
            })
        };
        rows.push((
            parts[0].parse().map_err(|_| Error::Parse {
                what: what.clone(),
                line: i + 1,
                reason: format!("bad run number `{}`", parts[0]),
            })?,
            parse(parts[1])?,
            parse(parts[2])?,
            parse(parts[3])?,
        ));
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("no rows in indicator table"));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Problem;
    use crate::rng::{Purpose, RngStream, StreamKey};
    use crate::wfg::WfgInstance;

    fn tmp() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    #[test]
    fn solution_set_round_trips_bitwise() {
        let problem = WfgInstance::standard(4, 2).unwrap();
        let mut rng = RngStream::new(
            3,
            StreamKey {
                run: 0,
                subpop: 0,
                purpose: Purpose::Init,
            },
        );
        let set: Vec<Solution> = (0..17).map(|_| problem.random_solution(&mut rng)).collect();
        let dir = tmp();
        let path = dir.path().join("run_01.sol");
        write_solution_set(&path, "wfg4:2", 12345, 2, &set).unwrap();
        let loaded = read_solution_set(&path).unwrap();
        assert_eq!(loaded.problem, "wfg4:2");
        assert_eq!(loaded.objectives, 2);
        assert_eq!(loaded.seed, 12345);
        assert_eq!(loaded.points.len(), 17);
        for (sol, (x, f)) in set
            .iter()
            .zip(loaded.decisions.iter().zip(&loaded.points))
        {
            assert_eq!(sol.x(), &x[..], "decision vector must survive exactly");
            assert_eq!(sol.f(), &f[..], "objective vector must survive exactly");
        }
        // writing the loaded data again is byte-identical
        let text = std::fs::read_to_string(&path).unwrap();
        let again = render_solution_set("wfg4:2", 12345, 2, &set);
        assert_eq!(text, again);
    }

    #[test]
    fn front_file_round_trips() {
        let front = vec![vec![0.125, 2.0], vec![1.0, 1.75]];
        let dir = tmp();
        let path = dir.path().join("reference_front.txt");
        write_front(&path, "wfg4:2", 9, &front).unwrap();
        let loaded = read_points(&path).unwrap();
        assert_eq!(loaded, front);
    }

    #[test]
    fn read_points_takes_trailing_objectives_from_sol_files() {
        let problem = WfgInstance::standard(1, 2).unwrap();
        let mut rng = RngStream::new(
            4,
            StreamKey {
                run: 0,
                subpop: 0,
                purpose: Purpose::Init,
            },
        );
        let set: Vec<Solution> = (0..5).map(|_| problem.random_solution(&mut rng)).collect();
        let dir = tmp();
        let path = dir.path().join("a.sol");
        write_solution_set(&path, "wfg1:2", 1, 2, &set).unwrap();
        let points = read_points(&path).unwrap();
        assert_eq!(points.len(), 5);
        for (sol, p) in set.iter().zip(&points) {
            assert_eq!(sol.f(), &p[..]);
        }
    }

    #[test]
    fn malformed_files_are_rejected() {
        let dir = tmp();
        let path = dir.path().join("bad.sol");
        std::fs::write(&path, "no header\n1 2 3\n").unwrap();
        assert!(read_solution_set(&path).is_err());
        std::fs::write(&path, "# problem=x objectives=2 size=2 seed=1\n1 2 3\n").unwrap();
        assert!(read_solution_set(&path).is_err(), "size mismatch");
        std::fs::write(&path, "# problem=x objectives=2 size=1 seed=1\n1 oops 3\n").unwrap();
        assert!(read_solution_set(&path).is_err(), "bad number");
        assert!(read_solution_set(&dir.path().join("absent.sol")).is_err());
    }

    #[test]
    fn indicator_table_round_trips() {
        let rows = vec![(1, 0.125, -0.5, 0.0), (2, 2.0, 1.0 / 3.0, 0.001)];
        let dir = tmp();
        let path = dir.path().join("indicators.txt");
        std::fs::write(&path, render_indicator_table(&rows)).unwrap();
        let loaded = read_indicator_table(&path).unwrap();
        assert_eq!(loaded, rows);
    }
}

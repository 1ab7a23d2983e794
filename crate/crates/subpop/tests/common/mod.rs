//! Helpers shared by the integration test targets.

use std::path::PathBuf;

/// Root of the frozen test data.
pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

/// Parses a whitespace-delimited numeric table, skipping `#` comments.
pub fn parse_table(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.split_whitespace()
                .map(|tok| tok.parse::<f64>().expect("numeric token"))
                .collect()
        })
        .collect()
}

/// Checks one golden WFG file: rows hold `n` inputs then `m` outputs; every
/// output must match the crate's evaluation within `tol`. Returns the
/// largest absolute deviation seen.
pub fn check_wfg_golden(family: u8, m: usize, tol: f64) -> f64 {
    use subpop::problem::Problem;
    let instance = subpop::wfg::WfgInstance::standard(family, m).expect("valid instance");
    let n = instance.dim();
    let path = data_dir().join(format!("wfg_golden/wfg{family}_m{m}.txt"));
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("reading {}: {e}", path.display()));
    let rows = parse_table(&text);
    assert_eq!(rows.len(), 100, "golden vector count in {}", path.display());
    let mut worst: f64 = 0.0;
    for (line, row) in rows.iter().enumerate() {
        assert_eq!(row.len(), n + m, "row width at line {line}");
        let f = instance.evaluate(&row[..n]);
        for (j, (&want, got)) in row[n..].iter().zip(&f).enumerate() {
            let err = (want - got).abs();
            worst = worst.max(err);
            assert!(
                err <= tol,
                "wfg{family} m={m} line {line} objective {j}: got {got}, want {want} (|Δ| = {err:.3e})"
            );
        }
    }
    worst
}

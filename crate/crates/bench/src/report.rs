//! Per-run records, per-configuration summaries and win-rate tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use mmf_core::dataio::MatrixMetadata;
use serde::{Deserialize, Serialize};

use crate::method::Method;

/// Errors closer than this count as a tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// One row of `runs.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub group: String,
    pub name: String,
    pub kind: String,
    pub n: usize,
    pub nnz: usize,
    pub method: Method,
    pub fraction: f64,
    pub trial: usize,
    pub seed: u64,
    pub budget: u64,
    pub storage: Option<u64>,
    pub error: Option<f64>,
    /// Empty on success, otherwise why the run produced nothing.
    pub failure: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressionReport {
    pub matrix: MatrixMetadata,
    pub method: Method,
    pub fraction: f64,
    pub trials: usize,
    pub mean_error: f64,
    pub std_error: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_s: Option<f64>,
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Win,
    Loss,
    Tie,
}

/// Compares mean errors; a method that produced nothing loses to one that did.
pub fn compare(method: Option<f64>, baseline: Option<f64>) -> Outcome {
    match (method, baseline) {
        (Some(e), Some(b)) if e < b - TIE_TOLERANCE => Outcome::Win,
        (Some(e), Some(b)) if e > b + TIE_TOLERANCE => Outcome::Loss,
        (Some(_), Some(_)) | (None, None) => Outcome::Tie,
        (Some(_), None) => Outcome::Win,
        (None, Some(_)) => Outcome::Loss,
    }
}

/// Win, loss and tie percentages over some matrices at one fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WinCell {
    pub wins: f64,
    pub losses: f64,
    pub ties: f64,
}

impl WinCell {
    fn from_outcomes(outcomes: &[Outcome]) -> Self {
        let pct = |o: Outcome| 100.0 * outcomes.iter().filter(|&&x| x == o).count() as f64 / outcomes.len() as f64;
        Self {
            wins: pct(Outcome::Win),
            losses: pct(Outcome::Loss),
            ties: pct(Outcome::Tie),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WinRow {
    pub kind: String,
    pub matrices: usize,
    /// One cell per fraction, in table order.
    pub cells: Vec<WinCell>,
}

/// Percentage of matrices on which `method` beats `baseline`, by matrix kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WinTable {
    pub method: Method,
    pub baseline: Method,
    pub fractions: Vec<f64>,
    pub rows: Vec<WinRow>,
    pub total: WinRow,
}

/// Mean error per `(matrix id, method, fraction)`; absent when the runs failed.
pub type MeanErrors = BTreeMap<(String, Method, u64), f64>;

fn fraction_key(f: f64) -> u64 {
    f.to_bits()
}

pub fn mean_errors(reports: &[CompressionReport]) -> MeanErrors {
    reports
        .iter()
        .map(|r| {
            let id = format!("{}/{}", r.matrix.group, r.matrix.name);
            ((id, r.method, fraction_key(r.fraction)), r.mean_error)
        })
        .collect()
}

/// Builds the table from the matrices in the sweep (`(id, kind)` pairs).
pub fn win_table(
    matrices: &[(String, String)],
    means: &MeanErrors,
    method: Method,
    baseline: Method,
    fractions: &[f64],
) -> WinTable {
    let outcomes = |ids: &[&String], f: f64| -> Vec<Outcome> {
        ids.iter()
            .map(|id| {
                let get = |m| means.get(&((*id).clone(), m, fraction_key(f))).copied();
                compare(get(method), get(baseline))
            })
            .collect()
    };
    let mut by_kind: BTreeMap<&str, Vec<&String>> = BTreeMap::new();
    for (id, kind) in matrices {
        by_kind.entry(kind.as_str()).or_default().push(id);
    }
    let row = |kind: &str, ids: &[&String]| WinRow {
        kind: kind.to_owned(),
        matrices: ids.len(),
        cells: fractions
            .iter()
            .map(|&f| WinCell::from_outcomes(&outcomes(ids, f)))
            .collect(),
    };
    let rows = by_kind.iter().map(|(kind, ids)| row(kind, ids)).collect();
    let all: Vec<&String> = matrices.iter().map(|(id, _)| id).collect();
    WinTable {
        method,
        baseline,
        fractions: fractions.to_vec(),
        rows,
        total: row("total wins", &all),
    }
}

impl WinTable {
    /// Markdown with win percentages; losses and ties are in the JSON report.
    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "### {} vs {}\n", self.method, self.baseline);
        let mut header = String::from("| kind | matrices |");
        let mut rule = String::from("|---|---:|");
        for f in &self.fractions {
            let _ = write!(header, " {}% |", f * 100.0);
            rule.push_str("---:|");
        }
        let _ = writeln!(s, "{header}\n{rule}");
        for row in self.rows.iter().chain(std::iter::once(&self.total)) {
            let _ = write!(s, "| {} | {} |", row.kind, row.matrices);
            for c in &row.cells {
                let _ = write!(s, " {:.1} |", c.wins);
            }
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn means(entries: &[(&str, Method, f64, f64)]) -> MeanErrors {
        entries
            .iter()
            .map(|&(id, m, f, e)| ((id.to_owned(), m, fraction_key(f)), e))
            .collect()
    }

    #[test]
    fn sample_std() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 1.0).abs() < 1e-15);
        assert_eq!(mean_std(&[4.0]), (4.0, 0.0));
    }

    #[test]
    fn outcomes() {
        assert_eq!(compare(Some(0.1), Some(0.2)), Outcome::Win);
        assert_eq!(compare(Some(0.2), Some(0.1)), Outcome::Loss);
        assert_eq!(compare(Some(0.1), Some(0.1 + 1e-14)), Outcome::Tie);
        assert_eq!(compare(None, Some(0.1)), Outcome::Loss);
        assert_eq!(compare(Some(0.9), None), Outcome::Win);
        assert_eq!(compare(None, None), Outcome::Tie);
    }

    #[test]
    fn grouped_by_kind_with_total() {
        let mats = vec![
            ("G/a".to_owned(), "graph".to_owned()),
            ("G/b".to_owned(), "graph".to_owned()),
            ("H/c".to_owned(), "circuit".to_owned()),
        ];
        let d = Method::DirectGreedyTopN;
        let c = Method::Cur;
        let m = means(&[
            ("G/a", d, 0.1, 0.1),
            ("G/a", c, 0.1, 0.2),
            ("G/b", d, 0.1, 0.3),
            ("G/b", c, 0.1, 0.2),
            ("H/c", c, 0.1, 0.5),
        ]);
        let t = win_table(&mats, &m, d, c, &[0.1]);
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[0].kind, "circuit");
        assert_eq!(t.rows[0].cells[0].losses, 100.0);
        assert_eq!(t.rows[1].cells[0].wins, 50.0);
        assert_eq!(t.total.matrices, 3);
        let total = t.total.cells[0];
        assert!((total.wins - 100.0 / 3.0).abs() < 1e-12);
        assert!((total.wins + total.losses + total.ties - 100.0).abs() < 0.1);
        let md = t.to_markdown();
        assert!(md.contains("| total wins | 3 | 33.3 |"), "{md}");
    }

    #[test]
    fn against_itself_only_ties() {
        let mats = vec![("G/a".to_owned(), "graph".to_owned())];
        let m = means(&[("G/a", Method::Cur, 0.1, 0.3)]);
        let t = win_table(&mats, &m, Method::Cur, Method::Cur, &[0.1]);
        assert_eq!(
            t.total.cells[0],
            WinCell {
                wins: 0.0,
                losses: 0.0,
                ties: 100.0
            }
        );
    }
}

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

/// How the discrepancy of a check is compared with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Absolute,
    Relative,
    /// Pass/fail property; `primary` holds the margin by which it holds.
    Margin,
}

/// Outcome of one named cross-check. For checks over a parameter grid the
/// values are those of the worst grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub check: String,
    pub primary: f64,
    pub oracle: f64,
    pub abs_discrepancy: f64,
    pub rel_discrepancy: f64,
    pub metric: Metric,
    pub tolerance: f64,
    pub passed: bool,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl OracleReport {
    pub fn compare(
        check: &str,
        primary: f64,
        oracle: f64,
        metric: Metric,
        tolerance: f64,
        seed: u64,
    ) -> Self {
        let abs = (primary - oracle).abs();
        let rel = if oracle == 0.0 {
            if abs == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            abs / oracle.abs()
        };
        let d = match metric {
            Metric::Relative => rel,
            _ => abs,
        };
        OracleReport {
            check: check.to_string(),
            primary,
            oracle,
            abs_discrepancy: abs,
            rel_discrepancy: rel,
            metric,
            tolerance,
            passed: d <= tolerance,
            seed,
            note: None,
        }
    }

    /// A pass/fail property with no natural numeric pair; `value` is the
    /// measured margin (0 when satisfied).
    pub fn property(
        check: &str,
        holds: bool,
        value: f64,
        seed: u64,
        note: impl Into<String>,
    ) -> Self {
        OracleReport {
            check: check.to_string(),
            primary: value,
            oracle: 0.0,
            abs_discrepancy: value.abs(),
            rel_discrepancy: value.abs(),
            metric: Metric::Margin,
            tolerance: 0.0,
            passed: holds,
            seed,
            note: Some(note.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Worse of two reports of the same check: failures first, then the
    /// larger discrepancy (or smaller margin) under the check's metric.
    pub fn worst(self, other: OracleReport) -> OracleReport {
        let key = |r: &OracleReport| {
            let d = match r.metric {
                Metric::Absolute => r.abs_discrepancy,
                Metric::Relative => r.rel_discrepancy,
                Metric::Margin => -r.primary,
            };
            (!r.passed, if d.is_nan() { f64::INFINITY } else { d })
        };
        let (a, b) = (key(&self), key(&other));
        if b > a {
            other
        } else {
            self
        }
    }
}

/// Writes one JSON object per line.
pub fn write_json_lines<W: Write>(mut w: W, reports: &[OracleReport]) -> io::Result<()> {
    for r in reports {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

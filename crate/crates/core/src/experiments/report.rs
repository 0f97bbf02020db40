//! Machine-readable experiment reports: one record per check, JSON output,
//! CSV tables for curves and heatmaps. A check passes iff its error is
//! within tolerance; declined oracles are recorded as consistency-only
//! rather than silently skipped. Records are sorted by name so the output
//! is deterministic (runtimes are informational and excluded from
//! reproducibility comparisons).

use serde::Serialize;
use std::path::Path;
use std::time::Instant;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    /// compared against an independent oracle
    Oracle,
    /// oracle declined or not applicable; internal-consistency comparison
    ConsistencyOnly,
    /// a measured quantity checked against a threshold
    Measured,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub computed: serde_json::Value,
    pub oracle: serde_json::Value,
    pub error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub mode: CheckMode,
    pub runtime_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node_count: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub format_version: u32,
    pub experiment: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
}

impl Report {
    pub fn new(experiment: &str, seed: u64, config: serde_json::Value) -> Self {
        Report {
            format_version: FORMAT_VERSION,
            experiment: experiment.to_string(),
            seed,
            config,
            checks: Vec::new(),
            passed: true,
        }
    }

    pub fn finish(mut self) -> Self {
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
        self.passed = self.checks.iter().all(|c| c.passed);
        self
    }

    pub fn write_json(&self, path: &Path) -> crate::Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn print_summary(&self) {
        for c in &self.checks {
            println!(
                "{} {:60} error {:.3e}  tol {:.1e}  [{}]",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.error,
                c.tolerance,
                match c.mode {
                    CheckMode::Oracle => "oracle",
                    CheckMode::ConsistencyOnly => "consistency-only",
                    CheckMode::Measured => "measured",
                }
            );
        }
        let n_pass = self.checks.iter().filter(|c| c.passed).count();
        println!(
            "{}: {}/{} checks passed",
            self.experiment,
            n_pass,
            self.checks.len()
        );
    }
}

/// Accumulates records with timing.
pub struct Checker {
    pub records: Vec<CheckRecord>,
}

impl Checker {
    pub fn new() -> Self {
        Checker {
            records: Vec::new(),
        }
    }

    /// Record a check: `error <= tolerance` decides the outcome.
    pub fn push(
        &mut self,
        name: impl Into<String>,
        mode: CheckMode,
        computed: serde_json::Value,
        oracle: serde_json::Value,
        error: f64,
        tolerance: f64,
        started: Instant,
        node_count: Option<u64>,
    ) -> bool {
        let passed = error.is_finite() && error <= tolerance;
        self.records.push(CheckRecord {
            name: name.into(),
            computed,
            oracle,
            error,
            tolerance,
            passed,
            mode,
            runtime_ms: started.elapsed().as_secs_f64() * 1e3,
            node_count,
        });
        passed
    }

    /// Shorthand for scalar-valued comparisons.
    pub fn scalar(
        &mut self,
        name: impl Into<String>,
        mode: CheckMode,
        computed: f64,
        oracle: f64,
        error: f64,
        tolerance: f64,
        started: Instant,
    ) -> bool {
        self.push(
            name,
            mode,
            serde_json::json!(computed),
            serde_json::json!(oracle),
            error,
            tolerance,
            started,
            None,
        )
    }

    pub fn into_report(self, experiment: &str, seed: u64, config: serde_json::Value) -> Report {
        let mut r = Report::new(experiment, seed, config);
        r.checks = self.records;
        r.finish()
    }
}

impl Default for Checker {
    fn default() -> Self {
        Self::new()
    }
}

/// Minimal CSV writer for numeric tables.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> crate::Result<()> {
    use std::io::Write;
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
        writeln!(f, "{}", cells.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_sorted_and_pass_logic() {
        let mut c = Checker::new();
        let t = Instant::now();
        c.scalar("z-last", CheckMode::Oracle, 1.0, 1.0, 0.0, 1e-9, t);
        c.scalar("a-first", CheckMode::Measured, 2.0, 0.0, 5.0, 1.0, t);
        let r = c.into_report("demo", 42, serde_json::json!({}));
        assert_eq!(r.checks[0].name, "a-first");
        assert!(!r.passed);
        assert!(!r.checks[0].passed && r.checks[1].passed);
    }

    #[test]
    fn csv_roundtrip() {
        let dir = std::env::temp_dir().join("opcalc-csv-test");
        let path = dir.join("t.csv");
        write_csv(&path, &["a", "b"], &[vec![1.0, 2.0], vec![3.0, -0.5]]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("a,b\n"));
        assert_eq!(text.lines().count(), 3);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn nan_error_fails() {
        let mut c = Checker::new();
        let t = Instant::now();
        assert!(!c.scalar("nan", CheckMode::Oracle, 0.0, 0.0, f64::NAN, 1.0, t));
    }
}

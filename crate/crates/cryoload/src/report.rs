//! Report emission: machine CSV (full precision), plot-data series, and
//! 4-significant-figure human tables.

use std::fmt::Write as _;

use crate::error::Result;
use crate::system::{BudgetReport, SweepEntry};

/// Scientific notation with 4 significant figures, for human tables.
pub fn sci4(x: f64) -> String {
    format!("{x:.3e}")
}

/// Budget CSV body: one row per stage per n, full precision.
///
/// Callers may prepend comment lines (e.g. a timestamp); the body itself is
/// deterministic for identical inputs.
pub fn budget_csv(entries: &[&BudgetReport]) -> String {
    let mut out = String::from(
        "n,stage,temperature_K,static_W,active_W,fixed_W,total_W,cooling_power_W,fraction,pass\n",
    );
    for report in entries {
        for s in &report.stages {
            let cooling = s.cooling_power_w.map(|p| p.to_string()).unwrap_or_default();
            let fraction = s.fraction.map(|f| f.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                report.n,
                s.stage,
                s.temperature_k,
                s.static_w,
                s.active_w,
                s.fixed_w,
                s.total_w,
                cooling,
                fraction,
                s.pass
            );
        }
    }
    out
}

/// Plot-data series: `n,stage,fraction` rows for external plotting.
pub fn plot_data_csv(entries: &[&BudgetReport]) -> String {
    let mut out = String::from("n,stage,fraction\n");
    for report in entries {
        for s in &report.stages {
            if let Some(f) = s.fraction {
                let _ = writeln!(out, "{},{},{}", report.n, s.stage, f);
            }
        }
    }
    out
}

/// Human-readable per-stage table for one budget.
pub fn budget_table(report: &BudgetReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "n = {} ({} qubits, {} couplers, {} readout circuits, {} lines of {})",
        report.n,
        report.counts.qubits,
        report.counts.couplers,
        report.counts.readout_circuits,
        report.counts.total,
        report.line_capacity
    );
    let _ = writeln!(
        out,
        "{:<6} {:>10} {:>10} {:>10} {:>10} {:>10} {:>9}  pass",
        "stage", "static_W", "active_W", "fixed_W", "total_W", "cooling_W", "fraction"
    );
    for s in &report.stages {
        let cooling = s.cooling_power_w.map(sci4).unwrap_or_else(|| "-".into());
        let fraction = s
            .fraction
            .map(|f| format!("{f:.4}"))
            .unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "{:<6} {:>10} {:>10} {:>10} {:>10} {:>10} {:>9}  {}",
            s.stage,
            sci4(s.static_w),
            sci4(s.active_w),
            sci4(s.fixed_w),
            sci4(s.total_w),
            cooling,
            fraction,
            if s.pass { "ok" } else { "FAIL" }
        );
    }
    for note in &report.notes {
        let _ = writeln!(out, "note: {note}");
    }
    out
}

/// Machine-readable sweep summary as a TOML document.
pub fn summary_toml(entries: &[SweepEntry], margin: f64) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(out, "margin = {margin}");
    for entry in entries {
        let _ = writeln!(out, "\n[[entry]]");
        let _ = writeln!(out, "n = {}", entry.n);
        let _ = writeln!(out, "total_lines = {}", entry.counts.total);
        match &entry.result {
            Ok(report) => {
                let _ = writeln!(out, "within_capacity = true");
                let _ = writeln!(out, "all_pass = {}", report.all_pass);
                if let Some(s) = report.max_fraction_stage() {
                    let _ = writeln!(out, "max_fraction_stage = \"{}\"", s.stage);
                    let _ = writeln!(out, "max_fraction = {}", s.fraction.unwrap_or(f64::NAN));
                }
                for s in &report.stages {
                    let _ = writeln!(out, "\n[[entry.stage]]");
                    let _ = writeln!(out, "name = \"{}\"", s.stage);
                    let _ = writeln!(out, "total_W = {}", s.total_w);
                    if let Some(f) = s.fraction {
                        let _ = writeln!(out, "fraction = {f}");
                        let _ = writeln!(out, "pass = {}", s.pass);
                    }
                }
            }
            Err(e) => {
                let _ = writeln!(out, "within_capacity = false");
                let _ = writeln!(out, "all_pass = false");
                let _ = writeln!(out, "error = \"{e}\"");
            }
        }
    }
    Ok(out)
}

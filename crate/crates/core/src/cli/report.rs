//! Report emission in table, JSON and CSV form.

use std::fmt::Write as _;

use serde_json::{json, Value};

use super::{Format, OracleRow, RunConfig, EXIT_OK, EXIT_VERIFICATION};
use crate::embedding::SionReport;
use crate::solver::{MultiStartReport, SolveReport, VerificationReport};

/// A finished command: its report in every format plus the exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Emitted {
    pub json: Value,
    pub table: String,
    pub csv: String,
    pub exit_code: i32,
}

impl Emitted {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.table.clone(),
            Format::Json => render_json(&self.json),
            Format::Csv => self.csv.clone(),
        }
    }
}

/// Pretty JSON with sorted keys and shortest round-trip floats, so parsing
/// and re-emitting reproduces the same bytes.
pub fn render_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// `v` with 6 significant digits.
pub fn format_sig(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0.00000".into();
    }
    let magnitude = v.abs().log10().floor() as i32;
    if !(-4..6).contains(&magnitude) {
        return format!("{v:.5e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

fn tuple(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|&v| format_sig(v)).collect();
    format!("({})", parts.join(", "))
}

fn sion_json(reports: &[SionReport]) -> Value {
    serde_json::to_value(reports).unwrap_or(Value::Null)
}

fn sion_table(out: &mut String, reports: &[SionReport]) {
    let _ = writeln!(
        out,
        "{:>6}  {:>12}  {:>12}  {:>12}  {:>12}  {:>12}  {:>6}",
        "player", "maximin", "minimax", "gap", "arg_x", "arg_f", "passed"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:>6}  {:>12}  {:>12}  {:>12}  {:>12}  {:>12}  {:>6}",
            r.player + 1,
            format_sig(r.maximin_value),
            format_sig(r.minimax_value),
            format_sig(r.gap),
            format_sig(r.arg_x),
            format_sig(r.arg_f),
            r.passed
        );
    }
}

pub(super) fn solve(
    cfg: &RunConfig,
    inputs: &Value,
    solved: &SolveReport,
    sion: &[SionReport],
    starts: Option<&MultiStartReport>,
    wall: f64,
) -> Emitted {
    let mut report = json!({
        "command": "solve",
        "inputs": inputs,
        "seed": cfg.seed,
        "equilibrium": { "x": solved.equilibrium_x, "f": solved.equilibrium_f },
        "values": solved.values,
        "iterations": solved.iterations,
        "residual": solved.residual,
        "converged": solved.converged,
        "sion": sion_json(sion),
        "arg_f": sion.iter().map(|r| r.arg_f).collect::<Vec<_>>(),
        "wall_time_s": wall,
    });
    if let Some(ms) = starts {
        report["multi_start"] = json!({
            "seed": ms.seed,
            "starts": ms.starts,
            "solutions": ms.solutions.iter().map(|s| &s.equilibrium_x).collect::<Vec<_>>(),
            "spread": ms.spread,
            "agree": ms.agrees(&cfg.tolerances),
        });
    }

    let mut table = String::new();
    let _ = writeln!(table, "equilibrium x = {}", tuple(&solved.equilibrium_x));
    let _ = writeln!(table, "equilibrium f = {}", format_sig(solved.equilibrium_f));
    let _ = writeln!(table, "payoffs phi   = {}", tuple(&solved.values));
    let _ = writeln!(
        table,
        "iterations    = {} (residual {:.3e})",
        solved.iterations, solved.residual
    );
    sion_table(&mut table, sion);
    if let Some(ms) = starts {
        let _ = writeln!(
            table,
            "multi-start: {} starts (seed {}), spread {:.3e}",
            ms.starts.len(),
            ms.seed,
            ms.spread
        );
    }
    let _ = writeln!(table, "seed {}, wall time {:.3} s", cfg.seed, wall);

    let mut csv = String::from("player,x,phi,maximin,minimax,sion_gap,arg_x,arg_f,passed\n");
    for (i, r) in sion.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            i + 1,
            solved.equilibrium_x[i],
            solved.values[i],
            r.maximin_value,
            r.minimax_value,
            r.gap,
            r.arg_x,
            r.arg_f,
            r.passed
        );
    }
    Emitted {
        json: report,
        table,
        csv,
        exit_code: EXIT_OK,
    }
}

pub(super) fn verify(cfg: &RunConfig, inputs: &Value, v: &VerificationReport, wall: f64) -> Emitted {
    let passed = v.passed();
    let report = json!({
        "command": "verify",
        "inputs": inputs,
        "seed": cfg.seed,
        "equilibrium": { "x": v.equilibrium_x, "f": v.equilibrium_f },
        "deviation_gaps": v.deviation_gaps,
        "maximin_arg_gaps": v.maximin_arg_gaps,
        "sion": sion_json(&v.sion_reports),
        "arg_f": v.sion_reports.iter().map(|r| r.arg_f).collect::<Vec<_>>(),
        "subsidy_deviation": v.subsidy_deviation,
        "zero_sum_residual": v.zero_sum_residual,
        "iterations": v.solve.as_ref().map(|s| s.iterations),
        "theorem1_passed": v.theorem1_passed,
        "theorem2_passed": v.theorem2_passed,
        "passed": passed,
        "wall_time_s": wall,
    });

    let mut table = String::new();
    let _ = writeln!(table, "candidate x     = {}", tuple(&v.equilibrium_x));
    let _ = writeln!(table, "f               = {}", format_sig(v.equilibrium_f));
    let _ = writeln!(table, "deviation gaps  = {}", tuple(&v.deviation_gaps));
    if let Some(d) = &v.subsidy_deviation {
        let _ = writeln!(
            table,
            "subsidy player  = best f {}, gap {}",
            format_sig(d.best_f),
            format_sig(d.gap)
        );
    }
    let _ = writeln!(table, "zero-sum resid. = {:.3e}", v.zero_sum_residual);
    sion_table(&mut table, &v.sion_reports);
    let verdict = |p: Option<bool>| match p {
        Some(true) => "pass",
        Some(false) => "FAIL",
        None => "not checked",
    };
    let _ = writeln!(table, "nash (solve + deviations): {}", verdict(v.theorem1_passed));
    let _ = writeln!(table, "minimax equality per pair: {}", verdict(v.theorem2_passed));

    let mut csv = String::from("player,x,deviation_gap,maximin,minimax,sion_gap,arg_x,arg_f,maximin_arg_gap,passed\n");
    for (i, x) in v.equilibrium_x.iter().enumerate() {
        let s = v.sion_reports.get(i);
        let cell = |f: fn(&SionReport) -> f64| s.map(|r| f(r).to_string()).unwrap_or_default();
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{}",
            i + 1,
            x,
            v.deviation_gaps[i],
            cell(|r| r.maximin_value),
            cell(|r| r.minimax_value),
            cell(|r| r.gap),
            cell(|r| r.arg_x),
            cell(|r| r.arg_f),
            v.maximin_arg_gaps.get(i).map(f64::to_string).unwrap_or_default(),
            s.map(|r| r.passed.to_string()).unwrap_or_default()
        );
    }
    Emitted {
        json: report,
        table,
        csv,
        exit_code: if passed { EXIT_OK } else { EXIT_VERIFICATION },
    }
}

pub(super) fn oracle(cfg: &RunConfig, inputs: &Value, resolution: usize, rows: &[OracleRow], wall: f64) -> Emitted {
    let report = json!({
        "command": "oracle",
        "inputs": inputs,
        "seed": cfg.seed,
        "resolution": resolution,
        "players": rows,
        "weak_duality": rows.iter().all(|r| r.weak_duality),
        "wall_time_s": wall,
    });

    let mut table = String::new();
    let _ = writeln!(table, "resolution {resolution}");
    let _ = writeln!(
        table,
        "{:>6}  {:>12}  {:>12}  {:>12}  {:>12}  {:>12}  {:>12}",
        "player", "grid maximin", "cont maximin", "discrepancy", "grid minimax", "cont minimax", "discrepancy"
    );
    for r in rows {
        let _ = writeln!(
            table,
            "{:>6}  {:>12}  {:>12}  {:>12}  {:>12}  {:>12}  {:>12}",
            r.player + 1,
            format_sig(r.brute_maximin),
            format_sig(r.continuous_maximin),
            format_sig(r.maximin_discrepancy),
            format_sig(r.brute_minimax),
            format_sig(r.continuous_minimax),
            format_sig(r.minimax_discrepancy)
        );
    }

    let mut csv = String::from(
        "player,brute_maximin,continuous_maximin,maximin_discrepancy,brute_minimax,continuous_minimax,minimax_discrepancy\n",
    );
    for r in rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            r.player + 1,
            r.brute_maximin,
            r.continuous_maximin,
            r.maximin_discrepancy,
            r.brute_minimax,
            r.continuous_minimax,
            r.minimax_discrepancy
        );
    }
    Emitted {
        json: report,
        table,
        csv,
        exit_code: EXIT_OK,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_sig(10.0 / 3.0), "3.33333");
        assert_eq!(format_sig(8.0 / 3.0), "2.66667");
        assert_eq!(format_sig(2.0), "2.00000");
        assert_eq!(format_sig(20.25), "20.2500");
        assert_eq!(format_sig(0.0), "0.00000");
        assert_eq!(format_sig(-0.5), "-0.500000");
        assert_eq!(format_sig(1.5e-9), "1.50000e-9");
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let v = json!({ "b": [0.1, 1e-300, 3.0, 2.5e10], "a": { "z": null, "y": 7 } });
        let once = render_json(&v);
        let reparsed: Value = serde_json::from_str(&once).unwrap();
        assert_eq!(render_json(&reparsed), once);
    }
}

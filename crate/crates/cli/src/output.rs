//! Serialization of reports to CSV tables and the JSON envelope.
//!
//! Every JSON document is `{"schema_version": 1, "kind": "<subcommand>",
//! "data": ...}` followed by a trailing newline. CSV uses LF line endings
//! and prints floats with `{:.16e}` so round trips are bit-faithful;
//! absent optional values become empty cells.

use ncspectra_core::analytic::SpectrumTable;
use ncspectra_core::fock::AlgebraReport;
use ncspectra_core::scan::{CriticalReport, SweepRow, SweepSpec};
use serde::Serialize;

/// Version stamp carried by every JSON document.
pub const SCHEMA_VERSION: u32 = 1;

/// Wrap a serializable report in the versioned envelope.
pub fn json_envelope<T: Serialize>(kind: &str, data: &T) -> String {
    let doc = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "data": data,
    });
    let mut text = serde_json::to_string_pretty(&doc)
        .expect("report types serialize without failure");
    text.push('\n');
    text
}

fn float_cell(value: f64) -> String {
    format!("{value:.16e}")
}

fn option_cell(value: Option<f64>) -> String {
    value.map(float_cell).unwrap_or_default()
}

/// `model,n1,n2,sigma_z,E_squared,E,E_nonrel,E_bar`; the `E` cell is empty
/// when the squared energy is negative. The alternative weak-field value is
/// carried by the JSON form only.
pub fn spectrum_csv(table: &SpectrumTable) -> String {
    let mut out = String::from("model,n1,n2,sigma_z,E_squared,E,E_nonrel,E_bar\n");
    for line in &table.lines {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            table.model,
            line.level.n1,
            line.level.n2,
            line.level.sigma_z,
            float_cell(line.e_squared),
            option_cell(line.e),
            float_cell(line.e_nonrel),
            float_cell(line.e_bar),
        ));
    }
    out
}

fn spin_suffix(sigma_z: i8) -> &'static str {
    if sigma_z == 1 {
        "p1"
    } else {
        "m1"
    }
}

/// One row per grid point: `param_value,well_posed`, one squared-energy
/// column per requested level (empty where that level failed to evaluate),
/// then the spin splitting of the first doubly-present label.
pub fn scan_csv(spec: &SweepSpec, rows: &[SweepRow]) -> String {
    let mut out = String::from("param_value,well_posed");
    for level in &spec.levels {
        out.push_str(&format!(
            ",E_squared_{}_{}_{}",
            level.n1,
            level.n2,
            spin_suffix(level.sigma_z)
        ));
    }
    out.push_str(",splitting\n");
    for row in rows {
        out.push_str(&float_cell(row.param_value));
        out.push(',');
        out.push_str(if row.well_posed { "true" } else { "false" });
        for value in &row.e_squared {
            out.push(',');
            out.push_str(&option_cell(*value));
        }
        out.push(',');
        out.push_str(&option_cell(row.splitting));
        out.push('\n');
    }
    out
}

/// Single-row table comparing the located root with its closed form.
pub fn critical_csv(report: &CriticalReport) -> String {
    let mut out = String::from(
        "model,parameter,closed_form,root,difference,coefficient_at_closed_form\n",
    );
    out.push_str(&format!(
        "{},{},{},{},{},{}\n",
        report.model,
        report.parameter,
        option_cell(report.closed_form),
        float_cell(report.root),
        option_cell(report.difference),
        option_cell(report.coefficient_at_closed_form),
    ));
    out
}

/// One row per operator-algebra check: `check,residual,threshold,pass`.
pub fn fock_check_csv(report: &AlgebraReport) -> String {
    let mut out = String::from("check,residual,threshold,pass\n");
    for check in &report.checks {
        out.push_str(&format!(
            "{},{},{},{}\n",
            check.name,
            float_cell(check.residual),
            float_cell(check.threshold),
            check.pass,
        ));
    }
    out
}

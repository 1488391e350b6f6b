//! Result-table serialization: the fixed-schema CSV and its JSON sidecar.
//!
//! Column order is part of the output contract and never changes:
//! `sweep_var,sweep_value,policy,engine,metric,value,ci95,n`. Every float
//! is printed with 9 significant digits; `ci95` is empty on analytic rows
//! (a direct evaluation carries no sampling interval), and a row whose
//! evaluation failed numerically carries the literal `failed` in `value`.

use std::io::Write;

use crate::error::CliError;
use crate::runner::Row;

pub const CSV_HEADER: &str = "sweep_var,sweep_value,policy,engine,metric,value,ci95,n";

/// Format with 9 significant digits, trimming trailing zeros, switching to
/// scientific notation outside the `%g`-style window.
pub fn sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.8e}");
    let (_, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("scientific exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let plain = format!("{v:.decimals$}");
        let plain = plain.trim_end_matches('0').trim_end_matches('.');
        if plain == "-0" {
            "0".to_string()
        } else {
            plain.to_string()
        }
    } else {
        let (mantissa, _) = sci.split_once('e').expect("scientific format");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exp}")
    }
}

pub fn write_csv<W: Write>(
    out: &mut W,
    sweep_var: &str,
    metric: &str,
    rows: &[Row],
) -> Result<(), CliError> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        let value = match row.value {
            Some(v) => sig9(v),
            None => "failed".to_string(),
        };
        let ci95 = row.ci95.map(sig9).unwrap_or_default();
        writeln!(
            out,
            "{sweep_var},{},{},{},{metric},{value},{ci95},{}",
            sig9(row.sweep_value),
            row.policy,
            row.engine,
            row.n
        )?;
    }
    Ok(())
}

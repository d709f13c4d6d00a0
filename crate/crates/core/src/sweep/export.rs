//! CSV export. Numbers use the shortest decimal that parses back to the same
//! f64; row order follows the sweep grid or the time grid.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::{SweepResult, AUX_PERIODS};
use crate::error::Result;
use crate::propagator::PopulationTrace;
use crate::units::s_to_us;

pub const SWEEP_COLUMNS: [&str; 8] = [
    "param_khz",
    "omega_eff_numeric_khz",
    "omega_eff_adiabatic_khz",
    "adiabatic_valid",
    "omega_eff_exact_khz",
    "max_aux_prob",
    "xi_khz",
    "error",
];

fn number(x: f64) -> String {
    format!("{x:?}")
}

fn optional(x: Option<f64>) -> String {
    x.map(number).unwrap_or_default()
}

fn finish(writer: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    writer
        .into_inner()
        .map_err(|e| crate::error::Error::Io(e.into_error()))
}

fn sweep_bytes(result: &SweepResult) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(SWEEP_COLUMNS)?;
    for row in &result.rows {
        w.write_record([
            number(row.param_khz),
            optional(row.omega_eff_numeric_khz),
            optional(row.omega_eff_adiabatic_khz),
            row.adiabatic_valid.map(|v| v.to_string()).unwrap_or_default(),
            optional(row.omega_eff_exact_khz),
            optional(row.max_aux_prob),
            optional(row.xi_khz),
            row.error.clone().unwrap_or_default(),
        ])?;
    }
    finish(w)
}

fn trace_bytes(trace: &PopulationTrace) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut header = vec!["time_us".to_string()];
    header.extend(
        trace
            .basis
            .labels()
            .iter()
            .map(|l| format!("p_{}_prob", l.name())),
    );
    header.push("aux_total_prob".into());
    w.write_record(&header)?;
    for ((t, p), aux) in trace.times.iter().zip(&trace.populations).zip(&trace.aux_total) {
        let mut record = vec![number(s_to_us(*t))];
        record.extend(p.iter().map(|&x| number(x)));
        record.push(number(*aux));
        w.write_record(&record)?;
    }
    finish(w)
}

/// Writes the sweep table to `out`, returning the number of bytes written.
pub fn write_sweep_csv<W: Write>(result: &SweepResult, mut out: W) -> Result<u64> {
    let bytes = sweep_bytes(result)?;
    out.write_all(&bytes)?;
    Ok(bytes.len() as u64)
}

pub fn write_trace_csv<W: Write>(trace: &PopulationTrace, mut out: W) -> Result<u64> {
    let bytes = trace_bytes(trace)?;
    out.write_all(&bytes)?;
    Ok(bytes.len() as u64)
}

/// Run metadata for the sidecar file: the config echo, ε for axis scaling
/// and the column meanings.
pub fn sweep_metadata(result: &SweepResult) -> Value {
    json!({
        "generator": concat!("nsiq ", env!("CARGO_PKG_VERSION")),
        "config": result.spec.to_json(),
        "epsilon_khz": result.spec.model.epsilon_khz,
        "rows": result.rows.len(),
        "aux_periods": AUX_PERIODS,
        "columns": {
            "param_khz": format!("swept {} value (kHz)", result.spec.kind.name()),
            "omega_eff_numeric_khz": "|effective coupling| from the Fourier spectrum of P_down2 (kHz); empty when no coherent transfer was detected",
            "omega_eff_adiabatic_khz": "|effective coupling| from adiabatic elimination (kHz)",
            "adiabatic_valid": "drives at least 3 coupling strengths from the auxiliary levels",
            "omega_eff_exact_khz": "lowest transition frequency (detuning/coupling) or Lorentzian (degeneracy) (kHz)",
            "max_aux_prob": "largest auxiliary-state probability over the sampled window",
            "xi_khz": "Stark compensation (degeneracy sweeps)",
            "error": "per-point failures",
        }
    })
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Writes the CSV to `path` and the metadata to `<path>.meta.json`; returns
/// the CSV size in bytes.
pub fn export_sweep_csv(result: &SweepResult, path: &Path) -> Result<u64> {
    let bytes = sweep_bytes(result)?;
    fs::write(path, &bytes)?;
    let meta = serde_json::to_string_pretty(&sweep_metadata(result)).expect("metadata is plain JSON");
    fs::write(sidecar_path(path), meta + "\n")?;
    Ok(bytes.len() as u64)
}

pub fn export_trace_csv(trace: &PopulationTrace, path: &Path) -> Result<u64> {
    let bytes = trace_bytes(trace)?;
    fs::write(path, &bytes)?;
    Ok(bytes.len() as u64)
}

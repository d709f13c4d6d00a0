//! Parameter sweeps reproducing the effective-coupling curves, single
//! evolutions for trace export, and their CSV output.

mod config;
mod export;

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::effective::{adiabatic_effective, compensate_detuning, lorentzian_coupling, lowest_transition};
use crate::error::Result;
use crate::model::{build_rwa_hamiltonian, Basis, ModelParams};
use crate::propagator::{
    evolve_lab, extract_effective_coupling, max_aux_occupation, populations, PopulationTrace, RwaPropagator,
    StateVector,
};
use crate::units::{khz_to_rad, rad_to_khz};

pub use config::{
    parse_config, EvolveSpec, Frame, ModelConfig, ParsedConfig, ProtocolSpec, SweepKind, SweepSpec,
    DEFAULT_CARRIER_RATIO, DEFAULT_EPSILON_KHZ, DEFAULT_HORIZON_PERIODS, DEFAULT_OMEGA_KHZ, DEFAULT_SAMPLES,
    MIN_HORIZON_PERIODS, PRESETS,
};
pub use export::{
    export_sweep_csv, export_trace_csv, sweep_metadata, write_sweep_csv, write_trace_csv, SWEEP_COLUMNS,
};

/// The auxiliary occupation is sampled over this many periods of the
/// expected coupling, fine enough to catch the fast auxiliary excursions.
pub const AUX_PERIODS: f64 = 2.0;

/// One grid point. Magnitude columns are non-negative; `None` leaves the
/// CSV cell empty.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepRow {
    pub param_khz: f64,
    /// `None` when no coherent transfer was detected or the point failed.
    pub omega_eff_numeric_khz: Option<f64>,
    pub omega_eff_adiabatic_khz: Option<f64>,
    pub adiabatic_valid: Option<bool>,
    pub omega_eff_exact_khz: Option<f64>,
    pub max_aux_prob: Option<f64>,
    pub xi_khz: Option<f64>,
    /// Failures of this point, `; `-separated.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
}

/// Model parameters at one grid point, with ξ for degeneracy sweeps.
pub fn point_params(spec: &SweepSpec, value_khz: f64) -> Result<(ModelParams, Option<f64>)> {
    let value = khz_to_rad(value_khz);
    let fixed = spec.fixed;
    Ok(match spec.kind {
        SweepKind::Detuning => (fixed.with_gap(0.0).with_detunings(value, value), None),
        SweepKind::Coupling => (
            fixed
                .with_gap(0.0)
                .with_detunings(0.0, 0.0)
                .with_couplings(value, value),
            None,
        ),
        SweepKind::Degeneracy => {
            let xi = compensate_detuning(fixed.epsilon, value, fixed.omega_a, fixed.omega_b)?;
            let params = fixed
                .with_gap(value)
                .with_detunings(-value / 2.0 - xi / 2.0, value / 2.0 + xi / 2.0);
            (params, Some(xi))
        }
    })
}

/// Closed-form coupling magnitude for the sweep kind: the lowest transition
/// for detuning/coupling sweeps, the Lorentzian for degeneracy sweeps.
fn exact_coupling(kind: SweepKind, params: &ModelParams) -> Result<f64> {
    match kind {
        SweepKind::Detuning | SweepKind::Coupling => lowest_transition(params),
        SweepKind::Degeneracy => {
            // the Lorentzian is stated at zero symmetric detuning
            let centred = params.with_detunings(-params.delta / 2.0, params.delta / 2.0);
            Ok(lorentzian_coupling(&centred)?.abs())
        }
    }
}

fn run_point(spec: &SweepSpec, value_khz: f64) -> SweepRow {
    let mut row = SweepRow {
        param_khz: value_khz,
        ..SweepRow::default()
    };
    let mut errors = Vec::new();
    let (params, xi) = match point_params(spec, value_khz) {
        Ok(p) => p,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.xi_khz = xi.map(rad_to_khz);

    match adiabatic_effective(&params) {
        Ok(est) => {
            row.omega_eff_adiabatic_khz = Some(rad_to_khz(est.pair.omega_eff.abs()));
            row.adiabatic_valid = Some(est.valid);
        }
        Err(e) => errors.push(format!("adiabatic: {e}")),
    }
    let exact = exact_coupling(spec.kind, &params);
    match &exact {
        Ok(w) => row.omega_eff_exact_khz = Some(rad_to_khz(*w)),
        Err(e) => errors.push(format!("exact: {e}")),
    }

    let expected = match exact {
        Ok(w) if w > 0.0 => Some(w),
        _ => row.omega_eff_adiabatic_khz.map(khz_to_rad).filter(|&w| w > 0.0),
    };
    match expected {
        Some(w) => {
            let period = TAU / w;
            match extract_effective_coupling(&params, spec.horizon_periods * period, spec.samples) {
                Ok(est) if est.detected => row.omega_eff_numeric_khz = Some(rad_to_khz(est.omega_eff)),
                Ok(_) => {}
                Err(e) => errors.push(format!("numeric: {e}")),
            }
            match max_aux_occupation(&params, AUX_PERIODS * period, spec.samples) {
                Ok(p) => row.max_aux_prob = Some(p),
                Err(e) => errors.push(format!("aux: {e}")),
            }
        }
        None => errors.push("no coupling scale to size the time horizon".into()),
    }

    if !errors.is_empty() {
        row.error = Some(errors.join("; "));
    }
    row
}

/// Runs every grid point (in parallel on the current rayon pool); rows keep
/// grid order and per-point failures are recorded in the row.
pub fn run_sweep(spec: &SweepSpec) -> SweepResult {
    let rows = spec
        .grid()
        .into_par_iter()
        .map(|value| run_point(spec, value))
        .collect();
    SweepResult {
        spec: spec.clone(),
        rows,
    }
}

/// Evolves the configured initial state on the configured time grid.
pub fn run_evolve(spec: &EvolveSpec) -> Result<PopulationTrace> {
    let times = spec.times();
    let psi0 = StateVector::basis_state(spec.initial, Basis::BARE)?;
    let states = match spec.frame {
        Frame::Rwa => RwaPropagator::new(&build_rwa_hamiltonian(&spec.params)?)?.evolve(&psi0, &times)?,
        Frame::Lab => evolve_lab(&spec.params, &psi0, &times, spec.tol)?,
    };
    populations(&states, &times)
}

impl SweepResult {
    /// Rows whose numeric coupling is present, as (param, numeric) pairs.
    pub fn numeric_points(&self) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter_map(|r| r.omega_eff_numeric_khz.map(|w| (r.param_khz, w)))
            .collect()
    }

    pub fn failed_rows(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.omega_eff_numeric_khz.is_none() && r.error.is_some())
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: SweepKind, start: f64, stop: f64, points: usize) -> SweepSpec {
        SweepSpec::new(kind, ModelConfig::default(), start, stop, points, 40.0, 4096).unwrap()
    }

    #[test]
    fn detuning_point_at_zero() {
        let result = run_sweep(&small(SweepKind::Detuning, -10.0, 10.0, 3));
        assert_eq!(result.rows.len(), 3);
        let centre = &result.rows[1];
        assert_eq!(centre.param_khz, 0.0);
        let numeric = centre.omega_eff_numeric_khz.unwrap();
        assert!((numeric - 2.25).abs() < 0.05 * 2.25, "{numeric}");
        assert!((centre.omega_eff_adiabatic_khz.unwrap() - 2.25).abs() < 1e-9);
        assert_eq!(centre.adiabatic_valid, Some(true));
        assert!(centre.max_aux_prob.unwrap() < 0.03);
        assert_eq!(centre.xi_khz, None);
        assert!(centre.error.is_none());
    }

    #[test]
    fn pole_is_recorded_and_the_sweep_continues() {
        let result = run_sweep(&small(SweepKind::Detuning, 190.0, 210.0, 3));
        let on_pole = &result.rows[1];
        assert_eq!(on_pole.param_khz, 200.0);
        assert!(on_pole.error.as_deref().unwrap().contains("adiabatic"));
        assert!(on_pole.omega_eff_numeric_khz.is_some());
        assert!(on_pole.omega_eff_exact_khz.is_some());
    }

    #[test]
    fn degeneracy_points_carry_xi() {
        let result = run_sweep(&small(SweepKind::Degeneracy, -800.0, 800.0, 3));
        assert_eq!(result.rows[1].xi_khz, Some(0.0));
        let (lo, hi) = (result.rows[0].xi_khz.unwrap(), result.rows[2].xi_khz.unwrap());
        assert!(lo != 0.0 && (lo + hi).abs() < 1e-9);
    }

    #[test]
    fn strong_degeneracy_drive_fails_in_row() {
        let model = ModelConfig {
            omega_a_khz: 100.0,
            omega_b_khz: 100.0,
            ..ModelConfig::default()
        };
        let spec = SweepSpec::new(SweepKind::Degeneracy, model, -10.0, 10.0, 2, 40.0, 4096).unwrap();
        let result = run_sweep(&spec);
        assert_eq!(result.rows.len(), 2);
        assert!(result.rows.iter().all(|r| r.error.is_some()));
        assert_eq!(result.failed_rows(), 2);
    }

    #[test]
    fn parallel_and_serial_agree() {
        let spec = small(SweepKind::Coupling, 10.0, 400.0, 6);
        let parallel = run_sweep(&spec);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = pool.install(|| run_sweep(&spec));
        assert_eq!(parallel, serial);
    }

    #[test]
    fn evolve_trace() {
        let spec = match parse_config(r#"{"t_max_us": 100, "points": 51}"#).unwrap() {
            ParsedConfig::Evolve(e) => e,
            _ => unreachable!(),
        };
        let trace = run_evolve(&spec).unwrap();
        assert_eq!(trace.len(), 51);
        for row in &trace.populations {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-8);
        }
    }
}

//! The four-level Hamiltonian in the lab frame, the rotating frame and the
//! rotated bases used for the effective-coupling analysis.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::Matrix4;
use num_complex::Complex64;

use super::basis::Basis;
use super::operator::{HermitianOperator4, UnitaryOperator4};
use super::params::ModelParams;
use crate::effective::{aux_eigenenergies, mixing_angle};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn phased(magnitude: f64, phase: f64) -> Complex64 {
    Complex64::from_polar(magnitude, phase)
}

/// Lab-frame Hamiltonian H(t)/ħ on (|↑,0⟩, |↓,0⟩, |↑,2⟩, |↓,2⟩).
pub fn build_lab_hamiltonian(params: &ModelParams, t: f64) -> Result<HermitianOperator4> {
    params.validate()?;
    let c = params.require_carriers()?;
    let drive_a = params.omega_a * (c.omega_field_a * t - params.phi_a).cos();
    let drive_b = params.omega_b * (c.omega_field_b * t - params.phi_b).cos();
    Ok(HermitianOperator4::from_upper(
        [c.omega_up0, c.omega_down0, c.omega_up2, c.omega_down2],
        &[
            (0, 1, drive_a.into()),
            (0, 2, params.epsilon.into()),
            (2, 3, drive_b.into()),
        ],
        Basis::BARE,
    ))
}

/// Phases of the diagonal frame rotation R(t), one per bare state.
fn frame_phase_rates(params: &ModelParams) -> Result<[f64; 4]> {
    let c = params.require_carriers()?;
    let global = 0.5 * (c.omega_up2 + c.omega_up0);
    Ok([global, global - c.omega_field_a, global, global - c.omega_field_b])
}

/// Frame rotation R(t) = e^{i(ω_{↑,2}+ω_{↑,0})t/2}·diag(1, e^{−iω_a t}, 1, e^{−iω_b t}).
pub fn rotation_matrix(params: &ModelParams, t: f64) -> Result<UnitaryOperator4> {
    params.validate()?;
    let rates = frame_phase_rates(params)?;
    let diagonal = rates.map(|w| Complex64::from_polar(1.0, w * t));
    UnitaryOperator4::new(Matrix4::from_diagonal(&diagonal.into()), Basis::BARE)
}

/// Time derivative dR/dt of [`rotation_matrix`].
pub fn rotation_matrix_rate(params: &ModelParams, t: f64) -> Result<Matrix4<Complex64>> {
    params.validate()?;
    let rates = frame_phase_rates(params)?;
    let diagonal = rates.map(|w| I * w * Complex64::from_polar(1.0, w * t));
    Ok(Matrix4::from_diagonal(&diagonal.into()))
}

/// Lab Hamiltonian carried into the rotating frame, −iR·dR†/dt + R·H·R†,
/// without dropping the counter-rotating terms.
pub fn rotating_frame_hamiltonian(params: &ModelParams, t: f64) -> Result<HermitianOperator4> {
    let r = rotation_matrix(params, t)?;
    let r = r.entries();
    let rate = rotation_matrix_rate(params, t)?;
    let h = build_lab_hamiltonian(params, t)?;
    let entries = (r * rate.adjoint()) * (-I) + r * h.entries() * r.adjoint();
    HermitianOperator4::new(entries, Basis::BARE)
}

/// Time-independent rotating-wave Hamiltonian on (|↑,0⟩, |↓,0⟩, |↑,2⟩, |↓,2⟩).
pub fn build_rwa_hamiltonian(params: &ModelParams) -> Result<HermitianOperator4> {
    params.validate()?;
    let half_gap = params.delta / 2.0;
    Ok(HermitianOperator4::from_upper(
        [
            half_gap,
            params.delta_a + half_gap,
            -half_gap,
            params.delta_b - half_gap,
        ],
        &[
            (0, 1, phased(params.omega_a / 2.0, params.phi_a)),
            (0, 2, params.epsilon.into()),
            (2, 3, phased(params.omega_b / 2.0, params.phi_b)),
        ],
        Basis::BARE,
    ))
}

/// Degenerate-gap Hamiltonian on (|↑,+⟩, |↑,−⟩, |↓,2⟩, |↓,0⟩).
pub fn build_symmetric_basis_hamiltonian(params: &ModelParams) -> Result<HermitianOperator4> {
    params.validate()?;
    if !params.is_degenerate() {
        return Err(Error::Precondition(
            "symmetric basis requires degenerate auxiliary states (delta = 0); \
             use the theta basis for a finite gap"
                .into(),
        ));
    }
    let eps = params.epsilon;
    let g_b = phased(params.omega_b / 2.0 * FRAC_1_SQRT_2, params.phi_b);
    let g_a = phased(params.omega_a / 2.0 * FRAC_1_SQRT_2, params.phi_a);
    Ok(HermitianOperator4::from_upper(
        [eps, -eps, params.delta_b, params.delta_a],
        &[(0, 2, g_b), (0, 3, g_a), (1, 2, g_b), (1, 3, -g_a)],
        Basis::SYMMETRIC,
    ))
}

fn wrapped_phase_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    if d > std::f64::consts::PI {
        d - std::f64::consts::TAU
    } else {
        d
    }
}

/// Equal-coupling Hamiltonian on (|↑,+⟩, |↓,+⟩, |↑,−⟩, |↓,−⟩), two decoupled blocks.
pub fn build_block_hamiltonian(params: &ModelParams) -> Result<HermitianOperator4> {
    params.validate()?;
    let violated = if !params.is_degenerate() {
        Some("degenerate auxiliary states (delta = 0)")
    } else if !params.approx_eq(params.omega_a, params.omega_b) {
        Some("equal coupling strengths (omega_a = omega_b)")
    } else if !params.approx_eq(params.delta_a, params.delta_b) {
        Some("equal detunings (delta_a = delta_b)")
    } else if wrapped_phase_difference(params.phi_a, params.phi_b).abs() > 1e-12 {
        Some("equal field phases (phi_a = phi_b)")
    } else {
        None
    };
    if let Some(symmetry) = violated {
        return Err(Error::Precondition(format!("block form requires {symmetry}")));
    }
    let eps = params.epsilon;
    let detuning = params.mean_detuning();
    let coupling = phased(0.5 * (params.omega_a + params.omega_b) / 2.0, params.phi_a);
    Ok(HermitianOperator4::from_upper(
        [eps, detuning, -eps, detuning],
        &[(0, 1, coupling), (2, 3, coupling)],
        Basis::BLOCK,
    ))
}

/// Resonant Hamiltonian on the auxiliary eigenbasis (|↑,+θ⟩, |↑,−θ⟩, |↓,2⟩, |↓,0⟩)
/// with |↑,+θ⟩ = cos θ|↑,0⟩ + sin θ|↑,2⟩ and |↑,−θ⟩ = −sin θ|↑,0⟩ + cos θ|↑,2⟩.
pub fn build_theta_basis_hamiltonian(params: &ModelParams) -> Result<HermitianOperator4> {
    params.validate()?;
    if !params.is_resonant() {
        return Err(Error::Precondition(
            "theta basis requires NSI-qubit resonance (delta_a + delta/2 = delta_b - delta/2)".into(),
        ));
    }
    let theta = mixing_angle(params.epsilon, params.delta)?.theta;
    let (e_plus, e_minus) = aux_eigenenergies(params.epsilon, theta)?;
    let (sin, cos) = theta.sin_cos();
    let half_a = params.omega_a / 2.0;
    let half_b = params.omega_b / 2.0;
    Ok(HermitianOperator4::from_upper(
        [
            e_plus,
            e_minus,
            params.delta_b - params.delta / 2.0,
            params.delta_a + params.delta / 2.0,
        ],
        &[
            (0, 2, phased(half_b * sin, params.phi_b)),
            (0, 3, phased(half_a * cos, params.phi_a)),
            (1, 2, phased(half_b * cos, params.phi_b)),
            (1, 3, phased(-half_a * sin, params.phi_a)),
        ],
        Basis::THETA,
    ))
}

/// Change of basis from the bare states to `target`: row k holds the
/// conjugated bare-state coordinates of the k-th target basis vector, so
/// `U·H_bare·U†` is the Hamiltonian in `target`. `theta` is needed only
/// for [`Basis::THETA`].
pub fn change_of_basis(target: Basis, theta: Option<f64>) -> Result<Matrix4<Complex64>> {
    let s = FRAC_1_SQRT_2;
    // bare coordinates (up0, down0, up2, down2)
    let rows: [[f64; 4]; 4] = if target == Basis::BARE {
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    } else if target == Basis::SYMMETRIC {
        [
            [s, 0.0, s, 0.0],
            [-s, 0.0, s, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 1.0, 0.0, 0.0],
        ]
    } else if target == Basis::BLOCK {
        [
            [s, 0.0, s, 0.0],
            [0.0, s, 0.0, s],
            [-s, 0.0, s, 0.0],
            [0.0, -s, 0.0, s],
        ]
    } else if target == Basis::THETA {
        let theta = theta.ok_or_else(|| Error::Config("theta basis needs a mixing angle".into()))?;
        let (sin, cos) = theta.sin_cos();
        [
            [cos, 0.0, sin, 0.0],
            [-sin, 0.0, cos, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 1.0, 0.0, 0.0],
        ]
    } else {
        return Err(Error::Config(format!("no change of basis defined for {target}")));
    };
    Ok(Matrix4::from_fn(|r, c| Complex64::from(rows[r][c])))
}

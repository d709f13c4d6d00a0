//! Closed-form results for the effective NSI-qubit dynamics: mixing angle,
//! auxiliary eigenenergies, adiabatic elimination, the Lorentzian working
//! point, the exact transition spectrum of the equal-coupling case, Stark
//! compensation and the multi-path Raman sums.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Basis, BasisLabel, HermitianOperator4, ModelParams};

/// Adiabatic elimination is flagged invalid closer than this many drive
/// strengths to an auxiliary resonance.
pub const VALIDITY_MARGIN: f64 = 3.0;

/// Coupling strength (in units of ε) above which [`compensate_detuning`]
/// refuses to run.
pub const WEAK_REGIME_LIMIT: f64 = 0.3;

const COMPENSATION_TOL: f64 = 1e-10;
const COMPENSATION_DAMPING: f64 = 0.5;
const COMPENSATION_MAX_ITER: usize = 100;

/// Mixing angle of the auxiliary pair, tan 2θ = 2ε/δ with θ ∈ (0, π/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingAngle {
    pub theta: f64,
}

/// Effective two-level coupling and detuning (rad/s, signed).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EffectivePair {
    pub omega_eff: f64,
    pub delta_eff: f64,
}

/// Result of the adiabatic elimination for a full parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticEstimate {
    pub pair: EffectivePair,
    /// False when a drive sits within [`VALIDITY_MARGIN`] drive strengths of
    /// an auxiliary level; the value is still reported.
    pub valid: bool,
    /// Relative drive phase φ_a − φ_b carried by the effective coupling.
    pub relative_phase: f64,
}

impl AdiabaticEstimate {
    /// The phase-carrying coupling Ω_eff·e^{i(φ_a − φ_b)}.
    pub fn complex_coupling(&self) -> Complex64 {
        Complex64::from_polar(self.pair.omega_eff, self.relative_phase)
    }
}

/// One two-photon path g → i → f through an intermediate state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanPath {
    pub omega_g: f64,
    pub omega_f: f64,
    pub detuning: f64,
}

impl RamanPath {
    pub fn new(omega_g: f64, omega_f: f64, detuning: f64) -> Result<Self> {
        let path = Self {
            omega_g,
            omega_f,
            detuning,
        };
        path.check()?;
        Ok(path)
    }

    fn check(&self) -> Result<()> {
        if self.detuning == 0.0 || !self.detuning.is_finite() {
            return Err(Error::Domain(format!(
                "Raman path detuning must be finite and non-zero, got {}",
                self.detuning
            )));
        }
        Ok(())
    }
}

pub fn mixing_angle(epsilon: f64, delta: f64) -> Result<MixingAngle> {
    if !(epsilon > 0.0) || !delta.is_finite() {
        return Err(Error::Domain(format!(
            "mixing angle needs epsilon > 0 and finite delta (epsilon = {epsilon}, delta = {delta})"
        )));
    }
    // atan2 gives exactly π/2 at δ = 0.
    Ok(MixingAngle {
        theta: 0.5 * (2.0 * epsilon).atan2(delta),
    })
}

/// Auxiliary eigenenergies E± = ±ε/sin 2θ.
pub fn aux_eigenenergies(epsilon: f64, theta: f64) -> Result<(f64, f64)> {
    let s = (2.0 * theta).sin();
    if !(theta > 0.0 && theta < std::f64::consts::FRAC_PI_2) || s == 0.0 {
        return Err(Error::Domain(format!("theta = {theta} must lie in (0, pi/2)")));
    }
    let e = epsilon / s;
    Ok((e, -e))
}

/// Adiabatic elimination of the auxiliary pair for arbitrary gap δ.
///
/// The reference energy is the symmetric detuning Δ = (Δ_a + Δ_b)/2. The
/// auxiliary eigenstates are |↑,+θ⟩ = cos θ|↑,0⟩ + sin θ|↑,2⟩ (energy E₊)
/// and |↑,−θ⟩ = −sin θ|↑,0⟩ + cos θ|↑,2⟩ (energy E₋); Δ_eff is the Stark
/// shift of |↓,0⟩ minus that of |↓,2⟩ plus the bare splitting Δ_a + δ − Δ_b.
pub fn adiabatic_effective(params: &ModelParams) -> Result<AdiabaticEstimate> {
    params.validate()?;
    let theta = mixing_angle(params.epsilon, params.delta)?.theta;
    let (e_plus, e_minus) = aux_eigenenergies(params.epsilon, theta)?;
    let detuning = params.mean_detuning();
    let (to_plus, to_minus) = (detuning - e_plus, detuning - e_minus);
    if to_plus == 0.0 || to_minus == 0.0 {
        return Err(Error::Pole { detuning });
    }
    let (sin, cos) = theta.sin_cos();
    let (sin2, cos2) = (sin * sin, cos * cos);
    let (oa, ob) = (params.omega_a, params.omega_b);

    let omega_eff = 0.5 * oa * ob * sin * cos * (1.0 / to_plus - 1.0 / to_minus);
    let stark_down0 = 0.25 * oa * oa * (cos2 / to_plus + sin2 / to_minus);
    let stark_down2 = 0.25 * ob * ob * (sin2 / to_plus + cos2 / to_minus);
    let bare = params.delta_a + params.delta - params.delta_b;

    let margin = VALIDITY_MARGIN * oa.max(ob);
    Ok(AdiabaticEstimate {
        pair: EffectivePair {
            omega_eff,
            delta_eff: stark_down0 - stark_down2 + bare,
        },
        valid: to_plus.abs() >= margin && to_minus.abs() >= margin,
        relative_phase: params.phi_a - params.phi_b,
    })
}

/// Effective qubit Hamiltonian obtained by eliminating the auxiliary states
/// of a symmetric- or theta-basis Hamiltonian directly from its matrix
/// entries (second order, auxiliary states diagonal).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EliminatedQubit {
    /// 2·H_eff(|↓,2⟩, |↓,0⟩); carries the relative drive phase.
    pub coupling: Complex64,
    /// H_eff(|↓,0⟩) − H_eff(|↓,2⟩).
    pub detuning: f64,
}

pub fn eliminate_auxiliary(h: &HermitianOperator4) -> Result<EliminatedQubit> {
    let basis = h.basis();
    if basis != Basis::SYMMETRIC && basis != Basis::THETA {
        return Err(Error::Config(format!(
            "auxiliary elimination needs the symmetric or theta basis, got {basis}"
        )));
    }
    let m = h.entries();
    if m[(0, 1)].norm() > 0.0 {
        return Err(Error::Precondition("auxiliary states must be uncoupled".into()));
    }
    let down2 = basis.require_index(BasisLabel::Down2)?;
    let down0 = basis.require_index(BasisLabel::Down0)?;
    let reference = 0.5 * (m[(down2, down2)].re + m[(down0, down0)].re);
    let mut coupling = Complex64::new(0.0, 0.0);
    let (mut shift0, mut shift2) = (0.0, 0.0);
    for aux in basis.auxiliary_indices() {
        let gap = reference - m[(aux, aux)].re;
        if gap == 0.0 {
            return Err(Error::Pole { detuning: reference });
        }
        coupling += 2.0 * m[(down2, aux)] * m[(aux, down0)] / gap;
        shift0 += m[(aux, down0)].norm_sqr() / gap;
        shift2 += m[(aux, down2)].norm_sqr() / gap;
    }
    Ok(EliminatedQubit {
        coupling,
        detuning: (m[(down0, down0)].re + shift0) - (m[(down2, down2)].re + shift2),
    })
}

/// Effective coupling at the Stark-compensated working point Δ = 0,
/// −(Ω_a Ω_b/2)·ε/((δ/2)² + ε²).
pub fn lorentzian_coupling(params: &ModelParams) -> Result<f64> {
    params.validate()?;
    if !params.approx_eq(params.mean_detuning(), 0.0) {
        return Err(Error::Precondition(
            "Lorentzian form holds at zero symmetric detuning (delta_a + delta_b = 0)".into(),
        ));
    }
    let eps = params.epsilon;
    let half_gap = params.delta / 2.0;
    Ok(-0.5 * params.omega_a * params.omega_b * eps / (half_gap * half_gap + eps * eps))
}

fn require_equal_coupling_symmetry(params: &ModelParams) -> Result<()> {
    params.validate()?;
    if !params.is_degenerate() {
        return Err(Error::Precondition("exact spectrum requires delta = 0".into()));
    }
    if !params.approx_eq(params.omega_a, params.omega_b) {
        return Err(Error::Precondition(
            "exact spectrum requires omega_a = omega_b".into(),
        ));
    }
    if !params.approx_eq(params.delta_a, params.delta_b) {
        return Err(Error::Precondition(
            "exact spectrum requires delta_a = delta_b".into(),
        ));
    }
    Ok(())
}

/// The six transition frequencies (magnitudes) of the equal-coupling,
/// degenerate, resonant Hamiltonian.
pub fn exact_transition_frequencies(params: &ModelParams) -> Result<[f64; 6]> {
    require_equal_coupling_symmetry(params)?;
    let eps = params.epsilon;
    let omega = 0.5 * (params.omega_a + params.omega_b);
    let detuning = params.mean_detuning();
    let r_minus = omega.hypot(eps - detuning);
    let r_plus = omega.hypot(eps + detuning);
    Ok([
        r_minus,
        r_plus,
        (eps + 0.5 * r_minus - 0.5 * r_plus).abs(),
        (eps - 0.5 * r_minus - 0.5 * r_plus).abs(),
        (eps - 0.5 * r_minus + 0.5 * r_plus).abs(),
        eps + 0.5 * r_minus + 0.5 * r_plus,
    ])
}

/// Smallest non-zero transition frequency; transitions below 1e-12 of the
/// parameter scale count as degeneracies.
pub fn lowest_transition(params: &ModelParams) -> Result<f64> {
    let threshold = 1e-12 * params.scale();
    exact_transition_frequencies(params)?
        .into_iter()
        .filter(|&w| w > threshold)
        .min_by(f64::total_cmp)
        .ok_or_else(|| Error::Numeric("all transitions vanish".into()))
}

fn compensation_params(epsilon: f64, delta: f64, omega_a: f64, omega_b: f64, xi: f64) -> ModelParams {
    ModelParams::new(epsilon)
        .with_couplings(omega_a, omega_b)
        .with_gap(delta)
        .with_detunings(-delta / 2.0 - xi / 2.0, delta / 2.0 + xi / 2.0)
}

/// Detuning correction ξ such that Δ_a = −δ/2 − ξ/2, Δ_b = δ/2 + ξ/2 give a
/// vanishing adiabatic Δ_eff.
pub fn compensate_detuning(epsilon: f64, delta: f64, omega_a: f64, omega_b: f64) -> Result<f64> {
    let strongest = omega_a.max(omega_b);
    if strongest > WEAK_REGIME_LIMIT * epsilon {
        return Err(Error::Precondition(format!(
            "Stark compensation needs the weak regime (omega <= {WEAK_REGIME_LIMIT} epsilon)"
        )));
    }
    let residual = |xi: f64| -> Result<f64> {
        let p = compensation_params(epsilon, delta, omega_a, omega_b, xi);
        Ok(adiabatic_effective(&p)?.pair.delta_eff)
    };
    let tol = COMPENSATION_TOL * epsilon;
    // iterate well past the guaranteed tolerance so callers see margin
    let target = 1e-3 * tol;

    let mut xi = 0.0;
    let mut r = residual(xi)?;
    for _ in 0..COMPENSATION_MAX_ITER {
        if r.abs() <= target {
            return Ok(xi);
        }
        // ξ ← (1 − λ)ξ + λ·(ξ + Δ_eff(ξ)), the damped Stark fixed point
        xi += COMPENSATION_DAMPING * r;
        r = residual(xi)?;
    }
    if r.abs() <= tol {
        return Ok(xi);
    }

    // Δ_eff decreases with ξ; bracket on ±Ω²/ε.
    let half_width = (strongest * strongest / epsilon).max(tol);
    let (mut lo, mut hi) = (-half_width, half_width);
    let (mut r_lo, r_hi) = (residual(lo)?, residual(hi)?);
    if r_lo.signum() == r_hi.signum() {
        return Err(Error::NonConvergence {
            iterations: COMPENSATION_MAX_ITER,
            residual: r,
        });
    }
    for iteration in 0..200 {
        let mid = 0.5 * (lo + hi);
        let r_mid = residual(mid)?;
        if r_mid.abs() <= target {
            return Ok(mid);
        }
        if r_mid.signum() == r_lo.signum() {
            lo = mid;
            r_lo = r_mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * half_width {
            if r_mid.abs() <= tol {
                return Ok(mid);
            }
            return Err(Error::NonConvergence {
                iterations: COMPENSATION_MAX_ITER + iteration,
                residual: r_mid,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: COMPENSATION_MAX_ITER + 200,
        residual: r,
    })
}

/// Raman sums over several intermediate states:
/// Ω_eff = Σ Ω_gi Ω_if/(2Δ_i), Δ_eff = Σ Ω_gi²/(4Δ_i) − Σ Ω_if²/(4Δ_i).
pub fn generalized_raman(paths: &[RamanPath]) -> Result<EffectivePair> {
    paths.iter().try_fold(EffectivePair::default(), |acc, path| {
        path.check()?;
        Ok(EffectivePair {
            omega_eff: acc.omega_eff + path.omega_g * path.omega_f / (2.0 * path.detuning),
            delta_eff: acc.delta_eff
                + (path.omega_g * path.omega_g - path.omega_f * path.omega_f) / (4.0 * path.detuning),
        })
    })
}

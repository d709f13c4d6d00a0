//! Time evolution of the four-level system and analysis of the resulting
//! dynamics.

mod lab;
mod spectral;

use nalgebra::Vector4;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Basis, BasisLabel, Eigen4, HermitianOperator4};

pub use lab::{evolve_lab, LAB_TOL_RANGE};
pub use spectral::{
    extract_effective_coupling, max_aux_occupation, spectral_peak, CouplingEstimate, CouplingMethod,
    MIN_SAMPLES,
};

/// Tolerance on Σ|amplitude|² − 1 accepted for an input state.
pub const NORM_TOL: f64 = 1e-9;

/// A normalized state on a labelled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vector4<Complex64>,
    basis: Basis,
}

impl StateVector {
    pub fn new(amplitudes: [Complex64; 4], basis: Basis) -> Result<Self> {
        let amplitudes = Vector4::from(amplitudes);
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numeric("state has non-finite amplitudes".into()));
        }
        let norm = amplitudes.norm();
        if (norm * norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes, basis })
    }

    pub fn basis_state(label: BasisLabel, basis: Basis) -> Result<Self> {
        let mut amplitudes = Vector4::zeros();
        amplitudes[basis.require_index(label)?] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes, basis })
    }

    pub(crate) fn from_vector(amplitudes: Vector4<Complex64>, basis: Basis) -> Self {
        Self { amplitudes, basis }
    }

    pub fn amplitudes(&self) -> &Vector4<Complex64> {
        &self.amplitudes
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn amplitude(&self, label: BasisLabel) -> Result<Complex64> {
        Ok(self.amplitudes[self.basis.require_index(label)?])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn probabilities(&self) -> [f64; 4] {
        let a = &self.amplitudes;
        [a[0].norm_sqr(), a[1].norm_sqr(), a[2].norm_sqr(), a[3].norm_sqr()]
    }

    /// Total probability in the auxiliary (↑-type) states of the basis.
    pub fn aux_probability(&self) -> f64 {
        self.basis
            .auxiliary_indices()
            .map(|i| self.amplitudes[i].norm_sqr())
            .sum()
    }

    /// ⟨ψ|H|ψ⟩ (rad/s).
    pub fn expectation(&self, h: &HermitianOperator4) -> Result<f64> {
        h.basis().require_same(&self.basis)?;
        Ok((self.amplitudes.adjoint() * h.entries() * self.amplitudes)[(0, 0)].re)
    }
}

pub(crate) fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::Precondition("times must be finite".into()));
    }
    if times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::Precondition("times must start at t >= 0".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Precondition("times must be sorted".into()));
    }
    Ok(())
}

/// Exact propagator e^{−iHt} of a time-independent Hamiltonian, built from
/// one eigendecomposition.
#[derive(Debug, Clone)]
pub struct RwaPropagator {
    eigen: Eigen4,
    basis: Basis,
}

impl RwaPropagator {
    pub fn new(h: &HermitianOperator4) -> Result<Self> {
        Ok(Self {
            eigen: h.eigen()?,
            basis: h.basis(),
        })
    }

    /// ψ(t) = V·e^{−iDt}·V†·ψ(0) for every t in `times`.
    pub fn evolve(&self, psi0: &StateVector, times: &[f64]) -> Result<Vec<StateVector>> {
        self.basis.require_same(&psi0.basis)?;
        check_times(times)?;
        let v = &self.eigen.vectors;
        let coefficients = v.adjoint() * psi0.amplitudes;
        Ok(times
            .iter()
            .map(|&t| {
                let phased = Vector4::from_fn(|i, _| {
                    coefficients[i] * Complex64::from_polar(1.0, -self.eigen.values[i] * t)
                });
                StateVector::from_vector(v * phased, self.basis)
            })
            .collect())
    }
}

pub fn evolve_rwa(h: &HermitianOperator4, psi0: &StateVector, times: &[f64]) -> Result<Vec<StateVector>> {
    RwaPropagator::new(h)?.evolve(psi0, times)
}

/// Per-state probabilities of a sampled evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationTrace {
    pub times: Vec<f64>,
    pub basis: Basis,
    pub populations: Vec<[f64; 4]>,
    pub aux_total: Vec<f64>,
}

impl PopulationTrace {
    pub fn column(&self, label: BasisLabel) -> Option<Vec<f64>> {
        let i = self.basis.index_of(label)?;
        Some(self.populations.iter().map(|row| row[i]).collect())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Squared moduli per labelled state. An empty input gives an empty trace
/// on the bare basis.
pub fn populations(states: &[StateVector], times: &[f64]) -> Result<PopulationTrace> {
    if states.len() != times.len() {
        return Err(Error::Precondition(format!(
            "{} states but {} times",
            states.len(),
            times.len()
        )));
    }
    let basis = states.first().map_or(Basis::BARE, StateVector::basis);
    for s in states {
        basis.require_same(&s.basis)?;
    }
    Ok(PopulationTrace {
        times: times.to_vec(),
        basis,
        populations: states.iter().map(StateVector::probabilities).collect(),
        aux_total: states.iter().map(StateVector::aux_probability).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_rwa_hamiltonian, ModelParams};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn down0() -> StateVector {
        StateVector::basis_state(BasisLabel::Down0, Basis::BARE).unwrap()
    }

    fn grid(t_end: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|k| t_end * k as f64 / n as f64).collect()
    }

    #[test]
    fn state_construction() {
        let c = |re: f64| Complex64::new(re, 0.0);
        assert!(StateVector::new([c(1.0), c(0.0), c(0.0), c(0.0)], Basis::BARE).is_ok());
        assert!(matches!(
            StateVector::new([c(1.0), c(0.1), c(0.0), c(0.0)], Basis::BARE),
            Err(Error::NotNormalized { .. })
        ));
        assert!(StateVector::basis_state(BasisLabel::UpPlus, Basis::BARE).is_err());
        assert_eq!(down0().amplitude(BasisLabel::Down0).unwrap(), c(1.0));
    }

    #[test]
    fn uncoupled_state_is_stationary() {
        let h = build_rwa_hamiltonian(&ModelParams::new(1.0).with_detunings(0.3, -0.2)).unwrap();
        for s in evolve_rwa(&h, &down0(), &grid(50.0, 100)).unwrap() {
            assert_eq!(
                s.probabilities().map(|p| (p * 1e12).round() / 1e12),
                [0.0, 1.0, 0.0, 0.0]
            );
        }
    }

    #[test]
    fn two_level_rabi_formula() {
        // ε → 0 limit: drop the hyperfine term by hand
        let omega = 0.7;
        let h = HermitianOperator4::from_upper(
            [0.0, 0.0, 0.0, 0.0],
            &[(0, 1, Complex64::new(omega / 2.0, 0.0))],
            Basis::BARE,
        );
        let times = grid(20.0, 400);
        for (s, &t) in evolve_rwa(&h, &down0(), &times).unwrap().iter().zip(&times) {
            let expected = (omega * t / 2.0).cos().powi(2);
            assert!((s.probabilities()[1] - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn weak_regime_inversion() {
        let eps = 1.0;
        let omega = 0.15;
        let p = ModelParams::new(eps).with_couplings(omega, omega);
        let h = build_rwa_hamiltonian(&p).unwrap();
        let t_pi = PI / (omega * omega / (2.0 * eps));
        let states = evolve_rwa(&h, &down0(), &grid(1.2 * t_pi, 1200)).unwrap();
        let best = states.iter().map(|s| s.probabilities()[3]).fold(0.0, f64::max);
        assert!(best > 0.99);
    }

    #[test]
    fn norm_and_energy_are_conserved() {
        let p = ModelParams::new(1.0)
            .with_couplings(0.4, 0.9)
            .with_detunings(0.3, 0.1)
            .with_gap(0.5)
            .with_phases(0.2, 1.1);
        let h = build_rwa_hamiltonian(&p).unwrap();
        let psi0 = StateVector::new(
            [
                Complex64::new(0.5, 0.0),
                Complex64::new(0.0, 0.5),
                Complex64::new(0.5, 0.0),
                Complex64::new(-0.5, 0.0),
            ],
            Basis::BARE,
        )
        .unwrap();
        let e0 = psi0.expectation(&h).unwrap();
        for s in evolve_rwa(&h, &psi0, &grid(300.0, 300)).unwrap() {
            assert!((s.norm() - 1.0).abs() < 1e-12);
            assert!((s.expectation(&h).unwrap() - e0).abs() < 1e-10 * e0.abs().max(1.0));
        }
    }

    #[test]
    fn time_grid_validation() {
        let h = build_rwa_hamiltonian(&ModelParams::new(1.0)).unwrap();
        assert!(evolve_rwa(&h, &down0(), &[1.0, 0.5]).is_err());
        assert!(evolve_rwa(&h, &down0(), &[-1.0, 0.5]).is_err());
        assert!(evolve_rwa(&h, &down0(), &[]).unwrap().is_empty());
        let other = StateVector::basis_state(BasisLabel::Down0, Basis::SYMMETRIC).unwrap();
        assert!(matches!(
            evolve_rwa(&h, &other, &[0.0]),
            Err(Error::BasisMismatch { .. })
        ));
    }

    #[test]
    fn population_columns() {
        let psi = StateVector::new(
            [
                Complex64::new(0.0, 0.0),
                Complex64::new(FRAC_1_SQRT_2, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, FRAC_1_SQRT_2),
            ],
            Basis::BARE,
        )
        .unwrap();
        let trace = populations(&[down0(), psi], &[0.0, 1.0]).unwrap();
        assert_eq!(trace.populations[0], [0.0, 1.0, 0.0, 0.0]);
        let down2 = trace.column(BasisLabel::Down2).unwrap();
        assert!((down2[1] - 0.5).abs() < 1e-15);
        assert_eq!(trace.aux_total, vec![0.0, 0.0]);
        assert!(populations(&[down0()], &[]).is_err());
        assert!(populations(&[], &[]).unwrap().is_empty());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn energy_is_conserved(
                oa in 0.0f64..4.0, ob in 0.0f64..4.0, da in -3.0f64..3.0, db in -3.0f64..3.0,
                gap in -5.0f64..5.0, re in prop::array::uniform4(-1.0f64..1.0), im in prop::array::uniform4(-1.0f64..1.0),
            ) {
                let amplitudes: Vector4<Complex64> = Vector4::from_fn(|i, _| Complex64::new(re[i], im[i]));
                prop_assume!(amplitudes.norm() > 1e-3);
                let amplitudes = amplitudes.unscale(amplitudes.norm());
                let psi0 = StateVector::new(amplitudes.into(), Basis::BARE).unwrap();
                let p = ModelParams::new(1.0).with_couplings(oa, ob).with_detunings(da, db).with_gap(gap);
                let h = build_rwa_hamiltonian(&p).unwrap();
                let e0 = psi0.expectation(&h).unwrap();
                let scale = h.entries().iter().map(|z| z.norm()).fold(1.0, f64::max);
                for s in evolve_rwa(&h, &psi0, &grid(50.0, 20)).unwrap() {
                    prop_assert!((s.norm() - 1.0).abs() <= 1e-12);
                    prop_assert!((s.expectation(&h).unwrap() - e0).abs() <= 1e-10 * scale);
                }
            }
        }
    }
}

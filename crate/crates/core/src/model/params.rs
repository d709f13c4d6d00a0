use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for the equality-type preconditions of the builders
/// (degeneracy, resonance, equal couplings).
pub const PRECONDITION_RTOL: f64 = 1e-9;

/// Absolute level energies and drive frequencies of the lab frame (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Carriers {
    pub omega_up0: f64,
    pub omega_down0: f64,
    pub omega_up2: f64,
    pub omega_down2: f64,
    pub omega_field_a: f64,
    pub omega_field_b: f64,
}

impl Carriers {
    /// Lab-frame energies consistent with the detunings and gap of `params`.
    ///
    /// The qubit states sit at zero energy and the auxiliary pair is centred
    /// at `carrier`, so the drive frequencies are `carrier ± δ/2 + Δ_{a,b}`.
    pub fn consistent_with(params: &ModelParams, carrier: f64) -> Self {
        let omega_up0 = carrier + params.delta / 2.0;
        let omega_up2 = carrier - params.delta / 2.0;
        Self {
            omega_up0,
            omega_down0: 0.0,
            omega_up2,
            omega_down2: 0.0,
            omega_field_a: omega_up0 + params.delta_a,
            omega_field_b: omega_up2 + params.delta_b,
        }
    }

    fn values(&self) -> [f64; 6] {
        [
            self.omega_up0,
            self.omega_down0,
            self.omega_up2,
            self.omega_down2,
            self.omega_field_a,
            self.omega_field_b,
        ]
    }
}

/// Scalar parameters of the four-level model. All frequencies are angular
/// (rad/s); phases are in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Hyperfine mixing strength ε between the auxiliary states.
    pub epsilon: f64,
    /// Auxiliary-state gap δ = ω_{↑,0} − ω_{↑,2}.
    pub delta: f64,
    pub omega_a: f64,
    pub omega_b: f64,
    pub delta_a: f64,
    pub delta_b: f64,
    pub phi_a: f64,
    pub phi_b: f64,
    pub carriers: Option<Carriers>,
}

impl ModelParams {
    /// Undriven, degenerate, resonant model with mixing strength `epsilon`.
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            delta: 0.0,
            omega_a: 0.0,
            omega_b: 0.0,
            delta_a: 0.0,
            delta_b: 0.0,
            phi_a: 0.0,
            phi_b: 0.0,
            carriers: None,
        }
    }

    pub fn with_couplings(mut self, omega_a: f64, omega_b: f64) -> Self {
        self.omega_a = omega_a;
        self.omega_b = omega_b;
        self
    }

    pub fn with_detunings(mut self, delta_a: f64, delta_b: f64) -> Self {
        self.delta_a = delta_a;
        self.delta_b = delta_b;
        self
    }

    pub fn with_gap(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_phases(mut self, phi_a: f64, phi_b: f64) -> Self {
        self.phi_a = phi_a;
        self.phi_b = phi_b;
        self
    }

    pub fn with_carriers(mut self, carriers: Carriers) -> Self {
        self.carriers = Some(carriers);
        self
    }

    /// Attach lab-frame carriers derived from the current detunings, with the
    /// auxiliary pair centred at `carrier` rad/s.
    pub fn with_lab_frame(self, carrier: f64) -> Self {
        let carriers = Carriers::consistent_with(&self, carrier);
        self.with_carriers(carriers)
    }

    /// Symmetric detuning Δ = (Δ_a + Δ_b)/2, equal to Δ_a + δ/2 on resonance.
    pub fn mean_detuning(&self) -> f64 {
        0.5 * (self.delta_a + self.delta_b)
    }

    /// Characteristic frequency scale used to make tolerances relative.
    pub fn scale(&self) -> f64 {
        [
            self.epsilon,
            self.delta.abs(),
            self.omega_a,
            self.omega_b,
            self.delta_a.abs(),
            self.delta_b.abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub(crate) fn approx_eq(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= PRECONDITION_RTOL * self.scale()
    }

    pub fn is_degenerate(&self) -> bool {
        self.approx_eq(self.delta, 0.0)
    }

    /// NSI-qubit resonance Δ_a + δ/2 = Δ_b − δ/2.
    pub fn is_resonant(&self) -> bool {
        self.approx_eq(self.delta_a + self.delta / 2.0, self.delta_b - self.delta / 2.0)
    }

    pub fn validate(&self) -> Result<()> {
        let scalars = [
            ("epsilon", self.epsilon),
            ("delta", self.delta),
            ("omega_a", self.omega_a),
            ("omega_b", self.omega_b),
            ("delta_a", self.delta_a),
            ("delta_b", self.delta_b),
            ("phi_a", self.phi_a),
            ("phi_b", self.phi_b),
        ];
        if let Some((name, _)) = scalars.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Config(format!("{name} must be finite")));
        }
        if self.epsilon <= 0.0 {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        if self.omega_a < 0.0 || self.omega_b < 0.0 {
            return Err(Error::Config("coupling strengths must be non-negative".into()));
        }
        if let Some(c) = &self.carriers {
            self.validate_carriers(c)?;
        }
        Ok(())
    }

    fn validate_carriers(&self, c: &Carriers) -> Result<()> {
        if c.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("carrier frequencies must be finite".into()));
        }
        if c.omega_field_a <= 0.0 || c.omega_field_b <= 0.0 {
            return Err(Error::Config("drive frequencies must be positive".into()));
        }
        let scale = c.values().iter().fold(self.scale(), |m, v| m.max(v.abs()));
        let checks = [
            (
                "delta_a",
                self.delta_a,
                c.omega_field_a - (c.omega_up0 - c.omega_down0),
            ),
            (
                "delta_b",
                self.delta_b,
                c.omega_field_b - (c.omega_up2 - c.omega_down2),
            ),
            ("delta", self.delta, c.omega_up0 - c.omega_up2),
        ];
        for (name, stated, implied) in checks {
            if (stated - implied).abs() > PRECONDITION_RTOL * scale {
                return Err(Error::Config(format!(
                    "carriers imply {name} = {implied:e} rad/s but {stated:e} rad/s was given"
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn require_carriers(&self) -> Result<&Carriers> {
        self.carriers
            .as_ref()
            .ok_or_else(|| Error::Config("lab-frame carriers are required".into()))
    }
}

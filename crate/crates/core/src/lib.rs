//! Simulation and analysis of the four-level nuclear-spin-isomer (NSI) qubit
//! model: Hamiltonians in every frame and basis, exact and lab-frame
//! propagation, closed-form effective couplings, gate protocols and the
//! parameter sweeps behind the effective-coupling curves.
//!
//! Frequencies are angular (rad/s) and times are in seconds throughout the
//! library; [`units`] converts from the kHz/µs used by configs and CSV files.
//!
//! ```
//! use nsi_core::effective::{adiabatic_effective, lowest_transition};
//! use nsi_core::model::ModelParams;
//! use nsi_core::propagator::extract_effective_coupling;
//! use nsi_core::units::{khz_to_rad, rad_to_khz};
//!
//! # fn main() -> nsi_core::Result<()> {
//! let eps = khz_to_rad(200.0);
//! let omega = khz_to_rad(30.0);
//! let params = ModelParams::new(eps).with_couplings(omega, omega);
//!
//! let exact = lowest_transition(&params)?;
//! let adiabatic = adiabatic_effective(&params)?.pair.omega_eff.abs();
//! let numeric = extract_effective_coupling(&params, 80.0 * std::f64::consts::TAU / exact, 8192)?;
//! let line = format!(
//!     "{:.4} {:.4} {:.4} kHz",
//!     rad_to_khz(numeric.omega_eff),
//!     rad_to_khz(adiabatic),
//!     rad_to_khz(exact)
//! );
//! assert_eq!(line, "2.2375 2.2500 2.2375 kHz");
//! # Ok(())
//! # }
//! ```

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod effective;
pub mod error;
pub mod gates;
pub mod model;
pub mod propagator;
pub mod sweep;
pub mod units;

pub use error::{Error, Result};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A basis state of the four-level model.
///
/// The first four are the physical states; the rest are the superpositions
/// used by the rotated-basis forms of the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisLabel {
    Up0,
    Down0,
    Up2,
    Down2,
    /// (|↑,2⟩ + |↑,0⟩)/√2
    UpPlus,
    /// (|↑,2⟩ − |↑,0⟩)/√2
    UpMinus,
    /// Upper auxiliary eigenstate, cos θ|↑,0⟩ + sin θ|↑,2⟩.
    UpPlusTheta,
    /// Lower auxiliary eigenstate, −sin θ|↑,0⟩ + cos θ|↑,2⟩.
    UpMinusTheta,
    /// (|↓,2⟩ + |↓,0⟩)/√2
    DownPlus,
    /// (|↓,2⟩ − |↓,0⟩)/√2
    DownMinus,
}

impl BasisLabel {
    /// Auxiliary (↑-type) states, as opposed to NSI-qubit (↓-type) states.
    pub fn is_auxiliary(self) -> bool {
        matches!(
            self,
            BasisLabel::Up0
                | BasisLabel::Up2
                | BasisLabel::UpPlus
                | BasisLabel::UpMinus
                | BasisLabel::UpPlusTheta
                | BasisLabel::UpMinusTheta
        )
    }

    /// Lower-case identifier used in CSV headers and configs.
    pub fn name(self) -> &'static str {
        match self {
            BasisLabel::Up0 => "up0",
            BasisLabel::Down0 => "down0",
            BasisLabel::Up2 => "up2",
            BasisLabel::Down2 => "down2",
            BasisLabel::UpPlus => "up_plus",
            BasisLabel::UpMinus => "up_minus",
            BasisLabel::UpPlusTheta => "up_plus_theta",
            BasisLabel::UpMinusTheta => "up_minus_theta",
            BasisLabel::DownPlus => "down_plus",
            BasisLabel::DownMinus => "down_minus",
        }
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An ordered 4-tuple of basis labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Basis(pub [BasisLabel; 4]);

impl Basis {
    /// Physical states, (|↑,0⟩, |↓,0⟩, |↑,2⟩, |↓,2⟩).
    pub const BARE: Basis = Basis([
        BasisLabel::Up0,
        BasisLabel::Down0,
        BasisLabel::Up2,
        BasisLabel::Down2,
    ]);

    /// Symmetric/antisymmetric auxiliary states, (|↑,+⟩, |↑,−⟩, |↓,2⟩, |↓,0⟩).
    pub const SYMMETRIC: Basis = Basis([
        BasisLabel::UpPlus,
        BasisLabel::UpMinus,
        BasisLabel::Down2,
        BasisLabel::Down0,
    ]);

    /// Decoupled symmetric and antisymmetric blocks, (|↑,+⟩, |↓,+⟩, |↑,−⟩, |↓,−⟩).
    pub const BLOCK: Basis = Basis([
        BasisLabel::UpPlus,
        BasisLabel::DownPlus,
        BasisLabel::UpMinus,
        BasisLabel::DownMinus,
    ]);

    /// Auxiliary eigenstates for general gap, (|↑,+θ⟩, |↑,−θ⟩, |↓,2⟩, |↓,0⟩).
    pub const THETA: Basis = Basis([
        BasisLabel::UpPlusTheta,
        BasisLabel::UpMinusTheta,
        BasisLabel::Down2,
        BasisLabel::Down0,
    ]);

    pub fn labels(&self) -> &[BasisLabel; 4] {
        &self.0
    }

    pub fn index_of(&self, label: BasisLabel) -> Option<usize> {
        self.0.iter().position(|&l| l == label)
    }

    pub(crate) fn require_index(&self, label: BasisLabel) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::Config(format!("label {label} is not part of basis {self}")))
    }

    pub fn auxiliary_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..4).filter(|&i| self.0[i].is_auxiliary())
    }

    pub(crate) fn require_same(&self, other: &Basis) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::BasisMismatch {
                expected: self.0,
                found: other.0,
            })
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a}, {b}, {c}, {d})")
    }
}

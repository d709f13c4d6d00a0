use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use super::basis::Basis;
use crate::error::{Error, Result};

pub const HERMITICITY_RTOL: f64 = 1e-12;
pub const UNITARITY_TOL: f64 = 1e-12;

fn max_abs(m: &Matrix4<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise deviation of `m` from `m†`.
pub fn hermiticity_deviation(m: &Matrix4<Complex64>) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise deviation of `m·m†` from the identity.
pub fn unitarity_deviation(m: &Matrix4<Complex64>) -> f64 {
    (m * m.adjoint() - Matrix4::identity())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Spectral decomposition `h = V·diag(values)·V†`, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Eigen4 {
    pub values: Vector4<f64>,
    pub vectors: Matrix4<Complex64>,
}

/// A 4×4 Hermitian operator (rad/s) on a labelled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator4 {
    entries: Matrix4<Complex64>,
    basis: Basis,
}

impl HermitianOperator4 {
    pub fn new(entries: Matrix4<Complex64>, basis: Basis) -> Result<Self> {
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numeric("operator has non-finite entries".into()));
        }
        let deviation = hermiticity_deviation(&entries);
        if deviation > HERMITICITY_RTOL * max_abs(&entries) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { entries, basis })
    }

    /// Builds from the upper triangle, mirroring conjugates below the diagonal.
    pub(crate) fn from_upper(diagonal: [f64; 4], upper: &[(usize, usize, Complex64)], basis: Basis) -> Self {
        let mut m = Matrix4::from_diagonal(&Vector4::from(diagonal).map(Complex64::from));
        for &(i, j, z) in upper {
            debug_assert!(i < j);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
        Self { entries: m, basis }
    }

    pub fn entries(&self) -> &Matrix4<Complex64> {
        &self.entries
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn entry(&self, row: super::BasisLabel, col: super::BasisLabel) -> Result<Complex64> {
        let i = self.basis.require_index(row)?;
        let j = self.basis.require_index(col)?;
        Ok(self.entries[(i, j)])
    }

    /// Adds `shift` to every diagonal entry.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut entries = self.entries;
        for i in 0..4 {
            entries[(i, i)] += shift;
        }
        Self {
            entries,
            basis: self.basis,
        }
    }

    /// Conjugation `U·H·U†` into the basis carried by `u`. The columns of
    /// `u†` are the new basis vectors expressed in the old basis.
    pub fn transformed(&self, u: &Matrix4<Complex64>, basis: Basis) -> Result<Self> {
        Self::new(u * self.entries * u.adjoint(), basis)
    }

    pub fn eigen(&self) -> Result<Eigen4> {
        let decomposition = self.entries.symmetric_eigen();
        let mut order = [0usize, 1, 2, 3];
        order.sort_by(|&a, &b| decomposition.eigenvalues[a].total_cmp(&decomposition.eigenvalues[b]));
        let values = Vector4::from_fn(|i, _| decomposition.eigenvalues[order[i]]);
        let vectors = Matrix4::from_fn(|r, c| decomposition.eigenvectors[(r, order[c])]);
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric(
                "eigendecomposition produced non-finite values".into(),
            ));
        }
        Ok(Eigen4 { values, vectors })
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<[f64; 4]> {
        let e = self.eigen()?;
        Ok([e.values[0], e.values[1], e.values[2], e.values[3]])
    }
}

/// A 4×4 unitary on a labelled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator4 {
    entries: Matrix4<Complex64>,
    basis: Basis,
}

impl UnitaryOperator4 {
    pub fn new(entries: Matrix4<Complex64>, basis: Basis) -> Result<Self> {
        let deviation = unitarity_deviation(&entries);
        if !(deviation <= UNITARITY_TOL) {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { entries, basis })
    }

    pub fn entries(&self) -> &Matrix4<Complex64> {
        &self.entries
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
            basis: self.basis,
        }
    }
}

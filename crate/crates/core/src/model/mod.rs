//! Domain types and Hamiltonian builders for the four-level model.

mod basis;
mod hamiltonian;
mod operator;
mod params;

pub use basis::{Basis, BasisLabel};
pub use hamiltonian::{
    build_block_hamiltonian, build_lab_hamiltonian, build_rwa_hamiltonian, build_symmetric_basis_hamiltonian,
    build_theta_basis_hamiltonian, change_of_basis, rotating_frame_hamiltonian, rotation_matrix,
    rotation_matrix_rate,
};
pub use operator::{
    hermiticity_deviation, unitarity_deviation, Eigen4, HermitianOperator4, UnitaryOperator4,
};
pub use params::{Carriers, ModelParams, PRECONDITION_RTOL};

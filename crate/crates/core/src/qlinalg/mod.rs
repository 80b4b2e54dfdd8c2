//! Dense complex linear algebra: matrices, density operators, Hermitian
//! eigendecomposition and entropy functionals.

pub mod density;
pub mod eig;
pub mod matrix;
pub mod random;

pub use density::{
    conditional_mutual_information, entropy_of_spectrum, mutual_information, partial_trace,
    von_neumann_entropy, DensityMatrix,
};
pub use eig::{
    hermitian_eig, hermitian_eigenvalues, EigOptions, SpectralDecomposition, TOL_DEGEN, TOL_HERM,
};
pub use matrix::{basis_vector, inner, kron_vec, norm, tensor, ComplexMatrix};

use num_complex::Complex64;

use crate::error::Result;

/// `exp(-i t G)` for Hermitian `G`, via its eigendecomposition.
pub fn unitary_from_hermitian(generator: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(generator, &EigOptions::default())?;
    let d = generator.rows();
    let mut u = ComplexMatrix::zeros(d, d);
    for (lambda, v) in eig.eigenvalues.iter().zip(&eig.basis_vectors) {
        let phase = Complex64::from_polar(1.0, -lambda * t);
        u = &u + &ComplexMatrix::outer(v).scale(phase);
    }
    Ok(u)
}

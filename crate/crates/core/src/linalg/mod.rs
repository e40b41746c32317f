//! Dense complex linear algebra for small matrices.
//!
//! Everything here is a pure function of its inputs: Jacobi sweeps run in a
//! fixed cyclic order and every eigen/singular vector is normalized so that
//! its largest-modulus entry is real-positive (lowest index on ties).

mod basis;
mod jacobi;
mod matrix;

pub use basis::{complete_basis, qr_unitary};

pub use jacobi::{eigh, svd, HermitianEig, Svd, MAX_SWEEPS};

pub use matrix::{frobenius_distance, ComplexMatrix, C64};
pub(crate) use matrix::{vec_norm, ONE};
#[cfg(test)]
pub(crate) use matrix::ZERO;

use alloc::vec::Vec;

use crate::error::Result;

/// `exp(A)` for anti-Hermitian `A`, computed through the spectral
/// decomposition of the Hermitian matrix `iA`; the result is unitary to
/// working precision.
pub fn expm_antihermitian(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let h = a.scale(C64::new(0.0, 1.0));
    let e = eigh(&h, 1e-8)?;
    // A = -i H, so exp(A) = E diag(exp(-i lambda)) E^dag.
    let phases: Vec<C64> = e
        .eigenvalues
        .iter()
        .map(|&l| C64::new(l.cos(), -l.sin()))
        .collect();
    let n = a.rows();
    let scaled = ComplexMatrix::from_fn(n, n, |r, c| e.eigenvectors[(r, c)] * phases[c]);
    Ok(scaled.mul_unchecked(&e.eigenvectors.adjoint()))
}

/// Polar (closest unitary) factor of a square matrix: `P Q^dag` from the SVD
/// `M = P S Q^dag`.
pub fn polar_unitary(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let s = svd(m, 1e-10)?;
    Ok(s.u.mul_unchecked(&s.v.adjoint()))
}

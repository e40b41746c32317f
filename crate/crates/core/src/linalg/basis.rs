use alloc::vec;
use alloc::vec::Vec;


use super::matrix::{inner, vec_norm, ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Removes the components of `v` along the orthonormal `basis` (two passes of
/// modified Gram-Schmidt) and normalizes what is left.
///
/// Returns the residual norm before normalization; `v` is left unnormalized
/// when that norm is zero.
pub(crate) fn orthogonalize_against(v: &mut [C64], basis: &[Vec<C64>]) -> f64 {
    for _ in 0..2 {
        for b in basis.iter().filter(|b| !b.is_empty()) {
            let proj = inner(b, v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= proj * y;
            }
        }
    }
    let r = vec_norm(v);
    if r > 0.0 {
        for x in v.iter_mut() {
            *x /= r;
        }
    }
    r
}

/// Appends up to `count` standard-basis-derived vectors orthonormal to
/// `known`, trying candidates `e_0, e_1, ...` in index order and skipping any
/// whose residual is below `tol`.
pub(crate) fn fill_orthonormal(
    dim: usize,
    known: &[Vec<C64>],
    count: usize,
    tol: f64,
) -> Result<Vec<Vec<C64>>> {
    let mut all: Vec<Vec<C64>> = known.to_vec();
    let mut added = Vec::with_capacity(count);
    for i in 0..dim {
        if added.len() == count {
            break;
        }
        let mut e = vec![ZERO; dim];
        e[i] = ONE;
        if orthogonalize_against(&mut e, &all) < tol {
            continue;
        }
        all.push(e.clone());
        added.push(e);
    }
    if added.len() < count {
        return Err(Error::RankDeficient {
            found: added.len(),
            needed: count,
        });
    }
    Ok(added)
}

/// Extends orthonormal columns to a `dim x dim` unitary.
///
/// The first `cols.cols()` columns of the result are copied verbatim; the
/// rest come from Gram-Schmidt over the standard basis in index order.
pub fn complete_basis(cols: &ComplexMatrix, dim: usize, tol: f64) -> Result<ComplexMatrix> {
    if cols.rows() != dim || cols.cols() > dim {
        return Err(Error::ShapeMismatch {
            expected_rows: dim,
            expected_cols: cols.cols().min(dim),
            found_rows: cols.rows(),
            found_cols: cols.cols(),
        });
    }
    let defect = cols.orthonormality_defect();
    if defect >= tol {
        return Err(Error::NotOrthonormal { defect });
    }
    let k = cols.cols();
    let known: Vec<Vec<C64>> = (0..k).map(|c| cols.column(c)).collect();
    let extra = fill_orthonormal(dim, &known, dim - k, tol)?;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (c, v) in known.iter().chain(extra.iter()).enumerate() {
        out.set_column(c, v);
    }
    Ok(out)
}

/// Unitary factor of the QR decomposition of a square matrix with full rank,
/// normalized so that `R` has a positive real diagonal.
pub fn qr_unitary(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.cols();
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = a.column(j);
        // Modified Gram-Schmidt gives R_jj = residual norm > 0 directly.
        let r = orthogonalize_against(&mut v, &q);
        if r.is_nan() || r <= 0.0 {
            return Err(Error::RankDeficient { found: j, needed: n });
        }
        q.push(v);
    }
    Ok(ComplexMatrix::from_columns(a.rows(), &q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn e1_completes_to_identity() {
        let e1 = ComplexMatrix::from_fn(3, 1, |r, _| if r == 0 { ONE } else { ZERO });
        assert_eq!(complete_basis(&e1, 3, 1e-10).unwrap(), ComplexMatrix::identity(3));
    }

    #[test]
    fn plus_state_completes_to_minus() {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let plus = ComplexMatrix::column_vector(&[h, h]);
        let q = complete_basis(&plus, 2, 1e-10).unwrap();
        assert_eq!(q.column(0), plus.column(0));
        assert!((q[(0, 1)] - h).norm() < 1e-15);
        assert!((q[(1, 1)] + h).norm() < 1e-15);
        assert!(q.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn rejects_non_orthonormal_and_wrong_dim() {
        let bad = ComplexMatrix::column_vector(&[ONE, ONE]);
        assert!(matches!(complete_basis(&bad, 2, 1e-10), Err(Error::NotOrthonormal { .. })));
        assert!(matches!(complete_basis(&bad, 3, 1e-10), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn qr_unitary_is_unitary() {
        let a = ComplexMatrix::from_fn(3, 3, |r, c| C64::new((r + 2 * c) as f64, (r * c) as f64 - 1.0));
        let q = qr_unitary(&a).unwrap();
        assert!(q.orthonormality_defect() < 1e-13);
        let r = q.adjoint_mul(&a);
        for i in 0..3 {
            assert!(r[(i, i)].re > 0.0 && r[(i, i)].im.abs() < 1e-12);
        }
    }
}

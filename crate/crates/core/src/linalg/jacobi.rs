//! Cyclic Jacobi methods: Hermitian eigendecomposition and one-sided
//! (Hestenes) singular value decomposition.

use alloc::vec::Vec;


use super::basis::fill_orthonormal;
use super::matrix::{vec_norm, ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Sweeps allowed before reporting `NoConvergence`.
pub const MAX_SWEEPS: usize = 100;

/// Relative modulus below which two candidate pivots count as tied in the
/// phase convention.
const PHASE_TIE: f64 = 1e-10;

/// Spectral decomposition `A = E diag(eigenvalues) E^dag`, eigenvalues
/// descending.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

/// Thin SVD `A = U diag(singular_values) V^dag` with `min(rows, cols)`
/// columns in `u` and `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

/// Unitary 2x2 rotation on the `(p, q)` plane that annihilates the `(p, q)`
/// entry of the Hermitian pencil `[[app, apq], [conj(apq), aqq]]`.
///
/// Returned as `(j_pp, j_pq, j_qp, j_qq)`.
fn rotation(app: f64, aqq: f64, apq: C64) -> (C64, C64, C64, C64) {
    let h = apq.norm();
    let w = (apq / h).conj();
    let tau = (aqq - app) / (2.0 * h);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    (
        C64::new(c, 0.0),
        C64::new(s, 0.0),
        w * (-s),
        w * c,
    )
}

/// Applies the rotation to columns `p`, `q` of `m`.
fn rotate_columns(m: &mut ComplexMatrix, p: usize, q: usize, j: (C64, C64, C64, C64)) {
    let (jpp, jpq, jqp, jqq) = j;
    for k in 0..m.rows() {
        let a = m[(k, p)];
        let b = m[(k, q)];
        m[(k, p)] = a * jpp + b * jqp;
        m[(k, q)] = a * jpq + b * jqq;
    }
}

/// Applies the adjoint rotation to rows `p`, `q` of `m`.
fn rotate_rows_adjoint(m: &mut ComplexMatrix, p: usize, q: usize, j: (C64, C64, C64, C64)) {
    let (jpp, jpq, jqp, jqq) = j;
    for k in 0..m.cols() {
        let a = m[(p, k)];
        let b = m[(q, k)];
        m[(p, k)] = jpp.conj() * a + jqp.conj() * b;
        m[(q, k)] = jpq.conj() * a + jqq.conj() * b;
    }
}

/// Whether the off-diagonal element is negligible against its diagonal pair.
fn negligible(app: f64, aqq: f64, apq: C64, floor: f64) -> bool {
    let h = apq.norm();
    h <= floor || h <= f64::EPSILON * (app.abs() * aqq.abs()).sqrt()
}

/// Index of the largest-modulus entry, lowest index on ties.
pub(crate) fn phase_pivot(v: &[C64]) -> Option<usize> {
    let best = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if best == 0.0 {
        return None;
    }
    v.iter().position(|z| z.norm() >= best * (1.0 - PHASE_TIE))
}

/// Unit phase that makes `z` real-positive when multiplied in.
fn unphase(z: C64) -> C64 {
    z.conj() / z.norm()
}

/// Hermitian eigendecomposition by cyclic complex Jacobi.
///
/// Eigenvalues come back sorted descending (stable on ties); every
/// eigenvector's largest-modulus entry is real-positive.
pub fn eigh(a: &ComplexMatrix, tol: f64) -> Result<HermitianEig> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch {
            expected_rows: a.rows(),
            expected_cols: a.rows(),
            found_rows: a.rows(),
            found_cols: a.cols(),
        });
    }
    let n = a.rows();
    let norm = a.frobenius_norm();
    let defect = a.hermitian_defect();
    if defect > tol * norm {
        return Err(Error::NotHermitian { defect });
    }
    let mut w = a.hermitian_part();
    for i in 0..n {
        w[(i, i)].im = 0.0;
    }
    let mut v = ComplexMatrix::identity(n);
    // Rotations leave noise of order eps * ||A|| everywhere; below that no
    // relative criterion can be met.
    let floor = norm * f64::EPSILON;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let app = w[(p, p)].re;
                let aqq = w[(q, q)].re;
                let apq = w[(p, q)];
                if negligible(app, aqq, apq, floor) {
                    continue;
                }
                rotated = true;
                let j = rotation(app, aqq, apq);
                rotate_columns(&mut w, p, q, j);
                rotate_rows_adjoint(&mut w, p, q, j);
                w[(p, q)] = C64::new(0.0, 0.0);
                w[(q, p)] = C64::new(0.0, 0.0);
                w[(p, p)].im = 0.0;
                w[(q, q)].im = 0.0;
                rotate_columns(&mut v, p, q, j);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(j, j)].re.total_cmp(&w[(i, i)].re));
    let eigenvalues = order.iter().map(|&i| w[(i, i)].re).collect();
    let mut eigenvectors = v.select_columns(&order);
    for c in 0..n {
        let mut col = eigenvectors.column(c);
        fix_phase(&mut col);
        eigenvectors.set_column(c, &col);
    }
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

/// Applies the phase convention in place and returns the phase factor used.
pub(crate) fn fix_phase(col: &mut [C64]) -> C64 {
    match phase_pivot(col) {
        Some(k) => {
            let ph = unphase(col[k]);
            for z in col.iter_mut() {
                *z *= ph;
            }
            col[k].im = 0.0;
            ph
        }
        None => C64::new(1.0, 0.0),
    }
}

/// Singular value decomposition by one-sided Jacobi.
///
/// Singular values are sorted descending. Columns of `u` belonging to
/// numerically zero singular values are completed deterministically, and the
/// phase convention is applied to `u` with the compensating phase on `v`.
/// `tol` is the residual below which a standard-basis candidate is skipped
/// during that completion.
pub fn svd(a: &ComplexMatrix, tol: f64) -> Result<Svd> {
    if a.rows() < a.cols() {
        let t = tall_svd(&a.adjoint(), tol)?;
        return Ok(canonical_phases(Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        }));
    }
    Ok(canonical_phases(tall_svd(a, tol)?))
}

fn canonical_phases(mut s: Svd) -> Svd {
    for c in 0..s.u.cols() {
        let mut ucol = s.u.column(c);
        let ph = fix_phase(&mut ucol);
        s.u.set_column(c, &ucol);
        let vcol: Vec<C64> = s.v.column(c).into_iter().map(|z| z * ph).collect();
        s.v.set_column(c, &vcol);
    }
    s
}

/// Hestenes iteration for `rows >= cols`.
fn tall_svd(a: &ComplexMatrix, tol: f64) -> Result<Svd> {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = ComplexMatrix::identity(n);
    let floor = a.frobenius_norm().powi(2) * f64::EPSILON;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, C64::new(0.0, 0.0));
                for k in 0..m {
                    let x = w[(k, p)];
                    let y = w[(k, q)];
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                if negligible(alpha, beta, gamma, floor) {
                    continue;
                }
                rotated = true;
                let j = rotation(alpha, beta, gamma);
                rotate_columns(&mut w, p, q, j);
                rotate_columns(&mut v, p, q, j);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let norms: Vec<f64> = (0..n).map(|c| vec_norm(&w.column(c))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let sigma_max = norms.iter().copied().fold(0.0, f64::max);

    // Left vectors: normalize in descending order, re-orthogonalize against
    // the earlier ones; columns with negligible norm are completed later.
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut singular_values = Vec::with_capacity(n);
    let mut missing = 0;
    for &j in &order {
        let s = norms[j];
        singular_values.push(s);
        if s > sigma_max * 1e-13 && s > 0.0 {
            let mut u: Vec<C64> = w.column(j).into_iter().map(|z| z / s).collect();
            if super::basis::orthogonalize_against(&mut u, &cols) > 0.5 {
                cols.push(u);
                continue;
            }
        }
        missing += 1;
        cols.push(Vec::new());
    }
    if missing > 0 {
        let known: Vec<Vec<C64>> = cols.iter().filter(|c| !c.is_empty()).cloned().collect();
        let mut extra = fill_orthonormal(m, &known, missing, tol)?.into_iter();
        for c in cols.iter_mut().filter(|c| c.is_empty()) {
            *c = extra.next().expect("fill_orthonormal returns the requested count");
        }
    }
    Ok(Svd {
        u: ComplexMatrix::from_columns(m, &cols),
        singular_values,
        v: v.select_columns(&order),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius_distance;
    use alloc::vec;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn reconstruct_eig(e: &HermitianEig) -> ComplexMatrix {
        let d = ComplexMatrix::from_diag(&e.eigenvalues);
        e.eigenvectors
            .mul_unchecked(&d)
            .mul_unchecked(&e.eigenvectors.adjoint())
    }

    #[test]
    fn identity_spectrum() {
        let e = eigh(&ComplexMatrix::identity(4), 1e-12).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0; 4]);
        assert_eq!(e.eigenvectors, ComplexMatrix::identity(4));
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[2, 1-i], [1+i, 3]] has eigenvalues (5 +- sqrt(9)) / 2 = 4, 1.
        let a = ComplexMatrix::new(2, 2, vec![c(2.0, 0.0), c(1.0, -1.0), c(1.0, 1.0), c(3.0, 0.0)])
            .unwrap();
        let e = eigh(&a, 1e-12).unwrap();
        assert!((e.eigenvalues[0] - 4.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
        assert!(frobenius_distance(&reconstruct_eig(&e), &a).unwrap() < 1e-14);
        for j in 0..2 {
            let col = e.eigenvectors.column(j);
            let k = phase_pivot(&col).unwrap();
            assert_eq!(col[k].im, 0.0);
            assert!(col[k].re > 0.0);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
            .unwrap();
        assert!(matches!(eigh(&a, 1e-10), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn svd_of_diagonal_and_swap() {
        let d = ComplexMatrix::from_diag(&[1.0, 3.0, 2.0]);
        let s = svd(&d, 1e-12).unwrap();
        assert_eq!(s.singular_values, vec![3.0, 2.0, 1.0]);
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let swap = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(h, 0.0), c(h, 0.0), c(0.0, 0.0)])
            .unwrap();
        let s = svd(&swap, 1e-12).unwrap();
        for sv in &s.singular_values {
            assert!((sv - h).abs() < 1e-15);
        }
    }

    #[test]
    fn svd_wide_and_rank_deficient() {
        let a = ComplexMatrix::from_fn(2, 3, |r, k| c((r + k) as f64, (r * k) as f64 * 0.5));
        let s = svd(&a, 1e-12).unwrap();
        assert_eq!(s.u.shape(), (2, 2));
        assert_eq!(s.v.shape(), (3, 2));
        let rec = s
            .u
            .mul_unchecked(&ComplexMatrix::from_diag(&s.singular_values))
            .mul_unchecked(&s.v.adjoint());
        assert!(frobenius_distance(&rec, &a).unwrap() < 1e-13);

        // Rank one: outer product; second left vector must be completed.
        let x = [c(1.0, 0.0), c(0.0, 2.0)];
        let y = [c(1.0, 1.0), c(0.0, 0.0), c(-1.0, 0.0)];
        let r1 = ComplexMatrix::from_fn(2, 3, |r, k| x[r] * y[k].conj());
        let s = svd(&r1, 1e-12).unwrap();
        assert!(s.singular_values[1] < 1e-14);
        assert!(s.u.orthonormality_defect() < 1e-14);
        assert!(s.v.orthonormality_defect() < 1e-14);
    }
}

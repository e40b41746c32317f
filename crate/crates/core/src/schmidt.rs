//! Schmidt decomposition of pure bipartite vectors.

use alloc::vec::Vec;
use core::cmp::Ordering;


use crate::error::{Error, Result};
use crate::linalg::{svd, vec_norm, ComplexMatrix, C64};
use crate::states::BipartiteDims;

/// Default cut-off below which a singular value counts as zero.
pub const DEFAULT_TOL_RANK: f64 = 1e-9;

/// `psi = sum_j coefficients[j] * left_j (x) right_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    /// `m x k`, orthonormal columns.
    pub left_vectors: ComplexMatrix,
    /// `n x k`, orthonormal columns.
    pub right_vectors: ComplexMatrix,
    /// Maximal runs of equal coefficients, as index ranges into
    /// `coefficients`.
    pub degeneracy_blocks: Vec<Vec<usize>>,
}

impl SchmidtDecomposition {
    #[inline]
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// Whether any two coefficients coincide.
    pub fn is_degenerate(&self) -> bool {
        self.degeneracy_blocks.iter().any(|b| b.len() > 1)
    }

    /// Rebuilds the flat vector `sum_j mu_j a_j (x) b_j`.
    pub fn reconstruct(&self) -> Vec<C64> {
        let (m, n) = (self.left_vectors.rows(), self.right_vectors.rows());
        let mut psi = alloc::vec![C64::new(0.0, 0.0); m * n];
        for (j, &mu) in self.coefficients.iter().enumerate() {
            for i in 0..m {
                let a = self.left_vectors[(i, j)] * mu;
                for l in 0..n {
                    psi[i * n + l] += a * self.right_vectors[(l, j)];
                }
            }
        }
        psi
    }
}

/// Groups a descending sequence into maximal runs whose consecutive gaps are
/// at most `tol`.
pub fn cluster_descending(values: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match blocks.last_mut() {
            Some(b) if (values[*b.last().unwrap()] - v).abs() <= tol => b.push(i),
            _ => blocks.push(alloc::vec![i]),
        }
    }
    blocks
}

fn lex_cmp(a: &[C64], b: &[C64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Schmidt decomposition via the SVD of the reshaped `m x n` coefficient
/// matrix `M[i][j] = psi[i * n + j]`.
pub fn schmidt_decompose(psi: &[C64], dims: BipartiteDims, tol_rank: f64) -> Result<SchmidtDecomposition> {
    let (m, n) = (dims.m(), dims.n());
    if psi.len() != m * n {
        return Err(Error::ShapeMismatch {
            expected_rows: m * n,
            expected_cols: 1,
            found_rows: psi.len(),
            found_cols: 1,
        });
    }
    let norm = vec_norm(psi);
    if (norm - 1.0).abs() >= 1e-10 {
        return Err(Error::NotNormalized { norm });
    }
    let reshaped = ComplexMatrix::new(m, n, psi.to_vec())?;
    let s = svd(&reshaped, 1e-10)?;
    let k = s.singular_values.iter().take_while(|&&x| x > tol_rank).count();
    let coefficients: Vec<f64> = s.singular_values[..k].to_vec();
    let blocks = cluster_descending(&coefficients, tol_rank);

    // M = U S V^dag, so psi = sum_j s_j u_j (x) conj(v_j).
    let mut left: Vec<Vec<C64>> = (0..k).map(|j| s.u.column(j)).collect();
    let mut right: Vec<Vec<C64>> = (0..k)
        .map(|j| s.v.column(j).into_iter().map(|z| z.conj()).collect())
        .collect();
    for b in blocks.iter().filter(|b| b.len() > 1) {
        let mut order = b.clone();
        order.sort_by(|&x, &y| lex_cmp(&left[x], &left[y]));
        let l: Vec<_> = order.iter().map(|&j| left[j].clone()).collect();
        let r: Vec<_> = order.iter().map(|&j| right[j].clone()).collect();
        for (slot, (lv, rv)) in b.iter().zip(l.into_iter().zip(r)) {
            left[*slot] = lv;
            right[*slot] = rv;
        }
    }
    Ok(SchmidtDecomposition {
        coefficients,
        left_vectors: ComplexMatrix::from_columns(m, &left),
        right_vectors: ComplexMatrix::from_columns(n, &right),
        degeneracy_blocks: blocks,
    })
}

/// Number of Schmidt coefficients above `tol_rank`.
pub fn schmidt_rank(psi: &[C64], dims: BipartiteDims, tol_rank: f64) -> Result<usize> {
    schmidt_decompose(psi, dims, tol_rank).map(|s| s.rank())
}

//! Bipartite density matrices, local unitaries, and test-state generators.
//!
//! The tensor index convention is fixed crate-wide: the basis vector
//! `|i> (x) |j>` of `C^m (x) C^n` sits at flat index `i * n + j` (zero-based),
//! i.e. row-major over the first factor.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{eigh, qr_unitary, ComplexMatrix, C64};

/// Default tolerance for the density-matrix invariants.
pub const STATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BipartiteDims {
    m: usize,
    n: usize,
}

impl BipartiteDims {
    /// Both factors must be at least qubit-sized. `m >= n` is not required.
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m < 2 || n < 2 {
            return Err(Error::InvalidDims { m, n });
        }
        Ok(Self { m, n })
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension `mn` of the joint space.
    #[inline]
    pub fn total(&self) -> usize {
        self.m * self.n
    }

    #[inline]
    pub fn flat_index(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }
}

/// Validated bipartite density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: BipartiteDims,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// Pure state `|psi><psi|`; `psi` must be normalized.
    pub fn pure(psi: &[C64], dims: BipartiteDims) -> Result<Self> {
        if psi.len() != dims.total() {
            return Err(Error::ShapeMismatch {
                expected_rows: dims.total(),
                expected_cols: 1,
                found_rows: psi.len(),
                found_cols: 1,
            });
        }
        let mat = ComplexMatrix::from_fn(psi.len(), psi.len(), |r, c| psi[r] * psi[c].conj());
        validate(&mat, dims, STATE_TOL)
    }

    /// `sum_i w_i |v_i><v_i|` for normalized, not necessarily orthogonal `v_i`.
    pub fn mixture(terms: &[(f64, Vec<C64>)], dims: BipartiteDims) -> Result<Self> {
        let d = dims.total();
        let mut mat = ComplexMatrix::zeros(d, d);
        for (w, v) in terms {
            if v.len() != d {
                return Err(Error::ShapeMismatch {
                    expected_rows: d,
                    expected_cols: 1,
                    found_rows: v.len(),
                    found_cols: 1,
                });
            }
            for r in 0..d {
                for c in 0..d {
                    mat[(r, c)] += v[r] * v[c].conj() * *w;
                }
            }
        }
        validate(&mat, dims, STATE_TOL)
    }

    /// `I / mn`.
    pub fn maximally_mixed(dims: BipartiteDims) -> Self {
        let d = dims.total();
        Self {
            dims,
            mat: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
        }
    }
}

/// Pair of unitaries `(U, V)` acting on the two factors.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalUnitary {
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
}

impl LocalUnitary {
    /// Checks shapes against `dims` and unitarity of both factors.
    pub fn new(u: ComplexMatrix, v: ComplexMatrix, dims: BipartiteDims, tol: f64) -> Result<Self> {
        for (x, d) in [(&u, dims.m()), (&v, dims.n())] {
            if x.shape() != (d, d) {
                return Err(Error::ShapeMismatch {
                    expected_rows: d,
                    expected_cols: d,
                    found_rows: x.rows(),
                    found_cols: x.cols(),
                });
            }
            let defect = x.orthonormality_defect();
            if defect >= tol {
                return Err(Error::NotOrthonormal { defect });
            }
        }
        Ok(Self { u, v })
    }

    pub fn identity(dims: BipartiteDims) -> Self {
        Self {
            u: ComplexMatrix::identity(dims.m()),
            v: ComplexMatrix::identity(dims.n()),
        }
    }

    /// `U (x) V`.
    pub fn kron(&self) -> ComplexMatrix {
        self.u.kron(&self.v)
    }

    /// Composition: `self` applied after `first`.
    pub fn compose(&self, first: &LocalUnitary) -> LocalUnitary {
        LocalUnitary {
            u: self.u.mul_unchecked(&first.u),
            v: self.v.mul_unchecked(&first.v),
        }
    }

    pub fn inverse(&self) -> LocalUnitary {
        LocalUnitary {
            u: self.u.adjoint(),
            v: self.v.adjoint(),
        }
    }
}

/// Parameters of the two-qubit modified Werner family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WernerParams {
    pub e: f64,
    pub f: f64,
}

impl WernerParams {
    pub fn new(e: f64, f: f64) -> Result<Self> {
        if e.is_nan() || e < 0.0 {
            return Err(Error::InvalidParams("Werner parameter e must satisfy e >= 0"));
        }
        if !(f >= 0.0 && f <= 1.0 - e) {
            return Err(Error::InvalidParams("Werner parameter f must satisfy 0 <= f <= 1 - e"));
        }
        Ok(Self { e, f })
    }

    /// Closed-form spectrum, ordered as the eigenvectors
    /// `|11>`, `(|01> + |10>)/sqrt2`, `|00>`, `(|10> - |01>)/sqrt2`.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let (e, f) = (self.e, self.f);
        [(1.0 - f + e) / 3.0, (1.0 - f) / 3.0, (1.0 - f - e) / 3.0, f]
    }

    /// At `e = 0` the three triplet eigenvalues coincide.
    pub fn is_degenerate(&self) -> bool {
        self.e == 0.0
    }
}

/// Checks the density-matrix invariants and wraps `mat`.
pub fn validate(mat: &ComplexMatrix, dims: BipartiteDims, tol: f64) -> Result<DensityMatrix> {
    let d = dims.total();
    if mat.shape() != (d, d) {
        return Err(Error::ShapeMismatch {
            expected_rows: d,
            expected_cols: d,
            found_rows: mat.rows(),
            found_cols: mat.cols(),
        });
    }
    let defect = mat.hermitian_defect();
    if defect >= tol {
        return Err(Error::NotHermitian { defect });
    }
    let tr = mat.trace().re;
    if (tr - 1.0).abs() >= tol {
        return Err(Error::TraceNotOne {
            defect: (tr - 1.0).abs(),
        });
    }
    let spectrum = eigh(mat, 1.0)?;
    let min = spectrum.eigenvalues.last().copied().unwrap_or(0.0);
    if min <= -tol {
        return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min });
    }
    Ok(DensityMatrix {
        dims,
        mat: mat.clone(),
    })
}

/// `(U (x) V) rho (U (x) V)^dag`.
pub fn apply_local_unitary(rho: &DensityMatrix, lu: &LocalUnitary) -> Result<DensityMatrix> {
    let dims = rho.dims();
    for (x, d) in [(&lu.u, dims.m()), (&lu.v, dims.n())] {
        if x.shape() != (d, d) {
            return Err(Error::ShapeMismatch {
                expected_rows: d,
                expected_cols: d,
                found_rows: x.rows(),
                found_cols: x.cols(),
            });
        }
    }
    let w = lu.kron();
    let mat = conjugate(&rho.mat, &w);
    Ok(DensityMatrix { dims, mat })
}

/// `W A W^dag`, with the result symmetrized to be exactly Hermitian.
pub(crate) fn conjugate(a: &ComplexMatrix, w: &ComplexMatrix) -> ComplexMatrix {
    w.mul_unchecked(a)
        .mul_unchecked(&w.adjoint())
        .hermitian_part()
}

/// The modified Werner state, entry for entry.
pub fn werner(params: WernerParams) -> Result<DensityMatrix> {
    let WernerParams { e, f } = WernerParams::new(params.e, params.f)?;
    let mut mat = ComplexMatrix::zeros(4, 4);
    let r = |x: f64| C64::new(x, 0.0);
    mat[(0, 0)] = r((1.0 - e - f) / 3.0);
    mat[(1, 1)] = r((1.0 + 2.0 * f) / 6.0);
    mat[(1, 2)] = r((1.0 - 4.0 * f) / 6.0);
    mat[(2, 1)] = r((1.0 - 4.0 * f) / 6.0);
    mat[(2, 2)] = r((1.0 + 2.0 * f) / 6.0);
    mat[(3, 3)] = r((1.0 + e - f) / 3.0);
    validate(&mat, BipartiteDims::new(2, 2)?, STATE_TOL)
}

pub(crate) fn complex_gaussian<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Random unit vector in `C^d`, uniform on the sphere.
pub fn random_unit_vector<R: Rng>(d: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..d).map(|_| complex_gaussian(rng)).collect();
        let norm = crate::linalg::vec_norm(&v);
        if norm > 1e-8 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Haar-random `d x d` unitary via QR of a complex Ginibre matrix.
pub fn haar_unitary<R: Rng>(d: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        let g = ComplexMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
        if let Ok(q) = qr_unitary(&g) {
            return q;
        }
    }
}

/// `G G^dag / tr(G G^dag)` with `G` an `mn x rank` Ginibre matrix.
pub fn random_density_with<R: Rng>(dims: BipartiteDims, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    let d = dims.total();
    if rank == 0 || rank > d {
        return Err(Error::InvalidRank { rank, max: d });
    }
    let g = ComplexMatrix::from_fn(d, rank, |_, _| complex_gaussian(rng));
    let ggd = g.mul_unchecked(&g.adjoint());
    let tr = ggd.trace().re;
    let mat = ggd.scale_real(1.0 / tr).hermitian_part();
    Ok(DensityMatrix { dims, mat })
}

/// Seeded Ginibre-induced random state of the given rank.
pub fn random_density(dims: BipartiteDims, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_with(dims, rank, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_local_unitary_with<R: Rng>(dims: BipartiteDims, rng: &mut R) -> LocalUnitary {
    let u = haar_unitary(dims.m(), rng);
    let v = haar_unitary(dims.n(), rng);
    LocalUnitary { u, v }
}

/// Seeded Haar-random pair `(U, V)`.
pub fn random_local_unitary(dims: BipartiteDims, seed: u64) -> LocalUnitary {
    random_local_unitary_with(dims, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// `Tr_2 A` for an operator on `C^m (x) C^n`.
pub fn partial_trace_second(a: &ComplexMatrix, dims: BipartiteDims) -> ComplexMatrix {
    let (m, n) = (dims.m(), dims.n());
    ComplexMatrix::from_fn(m, m, |i, k| {
        (0..n).map(|j| a[(i * n + j, k * n + j)]).sum()
    })
}

/// `Tr_1 A` for an operator on `C^m (x) C^n`.
pub fn partial_trace_first(a: &ComplexMatrix, dims: BipartiteDims) -> ComplexMatrix {
    let (m, n) = (dims.m(), dims.n());
    ComplexMatrix::from_fn(n, n, |j, l| {
        (0..m).map(|i| a[(i * n + j, i * n + l)]).sum()
    })
}

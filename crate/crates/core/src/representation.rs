//! Canonical representation of a bipartite state.
//!
//! A state `rho = sum_i lambda_i |e_i><e_i|` is described by its nonzero
//! eigenvalues (descending), the Schmidt decomposition of every eigenvector,
//! and the coordinates `X_i`, `Y_i` of each eigenvector's Schmidt vectors in
//! a pair of orthonormal bases. Those bases start with the Schmidt vectors
//! of the top eigenvector (the anchor) and are completed by Gram-Schmidt over
//! the standard basis, so the anchor always has `X_1 = Y_1 = (I; 0)`.
//!
//! Every other representation of the same state differs from the canonical
//! one by an element of the residual gauge group, summarized by
//! [`GaugeDescriptor`].

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::Result;
use crate::linalg::{complete_basis, eigh, ComplexMatrix, C64, ONE};
use crate::schmidt::{cluster_descending, schmidt_decompose, SchmidtDecomposition};
use crate::states::{haar_unitary, BipartiteDims, DensityMatrix};
use crate::tolerance::ToleranceConfig;

/// Orthonormality slack accepted when completing the anchor bases.
const COMPLETION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationItem {
    pub eigenvalue: f64,
    pub schmidt: SchmidtDecomposition,
    /// `m x k_i` coordinates of the left Schmidt vectors in `basis_a`.
    pub x: ComplexMatrix,
    /// `n x k_i` coordinates of the right Schmidt vectors in `basis_b`.
    pub y: ComplexMatrix,
}

impl RepresentationItem {
    pub fn schmidt_rank(&self) -> usize {
        self.schmidt.rank()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    pub dims: BipartiteDims,
    /// One item per nonzero eigenvalue, descending.
    pub items: Vec<RepresentationItem>,
    /// `m x m` unitary, columns `a_1 .. a_m`.
    pub basis_a: ComplexMatrix,
    /// `n x n` unitary, columns `b_1 .. b_n`.
    pub basis_b: ComplexMatrix,
    /// Clusters of equal eigenvalues (indices into `items`).
    pub eigenvalue_blocks: Vec<Vec<usize>>,
    /// Set when the anchor eigenvalue or its Schmidt coefficients are
    /// degenerate, making the canonical form convention-dependent.
    pub degenerate_anchor: bool,
}

impl Representation {
    /// Number of nonzero eigenvalues `l`.
    pub fn rank(&self) -> usize {
        self.items.len()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.items.iter().map(|it| it.eigenvalue).collect()
    }

    /// Schmidt rank `k_1` of the anchor eigenvector.
    pub fn anchor_rank(&self) -> usize {
        self.items[0].schmidt_rank()
    }

    /// Index of the eigenvalue block containing item `i`.
    pub fn eigen_block_of(&self, i: usize) -> &[usize] {
        self.eigenvalue_blocks
            .iter()
            .find(|b| b.contains(&i))
            .map(|b| b.as_slice())
            .unwrap_or(&[])
    }

    /// Whether item `i` is determined up to a phase and has distinct
    /// Schmidt coefficients.
    pub fn item_is_rigid(&self, i: usize) -> bool {
        self.eigen_block_of(i).len() == 1 && !self.items[i].schmidt.is_degenerate()
    }

    /// All eigenvalues distinct and all Schmidt spectra non-degenerate.
    pub fn is_nondegenerate(&self) -> bool {
        (0..self.rank()).all(|i| self.item_is_rigid(i))
    }

    /// Left Schmidt vectors of item `i`, `basis_a * X_i`.
    pub fn left_vectors(&self, i: usize) -> ComplexMatrix {
        self.basis_a.mul_unchecked(&self.items[i].x)
    }

    /// Right Schmidt vectors of item `i`, `basis_b * Y_i`.
    pub fn right_vectors(&self, i: usize) -> ComplexMatrix {
        self.basis_b.mul_unchecked(&self.items[i].y)
    }

    /// Eigenvector `e_i` rebuilt from the representation data.
    pub fn eigenvector(&self, i: usize) -> Vec<C64> {
        let n = self.dims.n();
        let a = self.left_vectors(i);
        let b = self.right_vectors(i);
        let mut e = vec![C64::new(0.0, 0.0); self.dims.total()];
        for (s, &mu) in self.items[i].schmidt.coefficients.iter().enumerate() {
            for r in 0..a.rows() {
                let ar = a[(r, s)] * mu;
                for c in 0..n {
                    e[r * n + c] += ar * b[(c, s)];
                }
            }
        }
        e
    }

    /// `sum_i lambda_i |e_i><e_i|` from the representation data alone.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.dims.total();
        let mut rho = ComplexMatrix::zeros(d, d);
        for (i, item) in self.items.iter().enumerate() {
            let e = self.eigenvector(i);
            for r in 0..d {
                let er = e[r] * item.eigenvalue;
                for c in 0..d {
                    rho[(r, c)] += er * e[c].conj();
                }
            }
        }
        rho
    }
}

/// `(I_k; 0)` of size `rows x k`.
pub(crate) fn padded_identity(rows: usize, k: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, k, |r, c| if r == c { ONE } else { C64::new(0.0, 0.0) })
}

/// Builds the representation from explicit Schmidt data, completing the
/// anchor bases; the complement columns are right-multiplied by the optional
/// mixers.
fn assemble(
    dims: BipartiteDims,
    eigenvalues: Vec<f64>,
    schmidts: Vec<SchmidtDecomposition>,
    eigenvalue_blocks: Vec<Vec<usize>>,
    mixers: Option<(&ComplexMatrix, &ComplexMatrix)>,
) -> Result<Representation> {
    let anchor = &schmidts[0];
    let k1 = anchor.rank();
    let mut basis_a = complete_basis(&anchor.left_vectors, dims.m(), COMPLETION_TOL)?;
    let mut basis_b = complete_basis(&anchor.right_vectors, dims.n(), COMPLETION_TOL)?;
    if let Some((wa, wb)) = mixers {
        basis_a = mix_complement(&basis_a, k1, wa);
        basis_b = mix_complement(&basis_b, k1, wb);
    }
    let degenerate_anchor = eigenvalue_blocks[0].len() > 1 || anchor.is_degenerate();
    let items = eigenvalues
        .into_iter()
        .zip(schmidts)
        .enumerate()
        .map(|(i, (eigenvalue, schmidt))| {
            let (x, y) = if i == 0 {
                (padded_identity(dims.m(), k1), padded_identity(dims.n(), k1))
            } else {
                (
                    basis_a.adjoint_mul(&schmidt.left_vectors),
                    basis_b.adjoint_mul(&schmidt.right_vectors),
                )
            };
            RepresentationItem {
                eigenvalue,
                schmidt,
                x,
                y,
            }
        })
        .collect();
    Ok(Representation {
        dims,
        items,
        basis_a,
        basis_b,
        eigenvalue_blocks,
        degenerate_anchor,
    })
}

fn mix_complement(basis: &ComplexMatrix, k: usize, w: &ComplexMatrix) -> ComplexMatrix {
    let d = basis.rows();
    if k == d {
        return basis.clone();
    }
    let comp = basis.select_columns(&(k..d).collect::<Vec<_>>());
    let mixed = comp.mul_unchecked(w);
    let mut out = basis.clone();
    for j in 0..d - k {
        out.set_column(k + j, &mixed.column(j));
    }
    out
}

/// Canonical representation of `rho`.
pub fn build_representation(rho: &DensityMatrix, tol: &ToleranceConfig) -> Result<Representation> {
    let dims = rho.dims();
    let spectrum = eigh(rho.matrix(), 1e-8)?;
    let l = spectrum
        .eigenvalues
        .iter()
        .take_while(|&&x| x > tol.tol_rank)
        .count();
    let eigenvalues: Vec<f64> = spectrum.eigenvalues[..l].to_vec();
    let schmidts = (0..l)
        .map(|i| schmidt_decompose(&spectrum.eigenvectors.column(i), dims, tol.tol_rank))
        .collect::<Result<Vec<_>>>()?;
    let blocks = cluster_descending(&eigenvalues, tol.tol_cluster);
    assemble(dims, eigenvalues, schmidts, blocks, None)
}

/// Gauge freedom of one non-anchor item's Schmidt vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemSchmidtGauge {
    pub item: usize,
    /// Non-degenerate Schmidt pairs; each carries a phase on its left
    /// vector and one on its right vector.
    pub phases: usize,
    /// `U(d)` blocks from degenerate coefficients, acting as `Q` on the left
    /// vectors and `conj(Q)` on the right ones.
    pub blocks: Vec<usize>,
    /// One constraint per non-degenerate pair: left and right phases must
    /// add up to the item's global phase.
    pub paired_constraints: usize,
}

/// Residual gauge group of a representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaugeDescriptor {
    /// Phases acting on single columns of `basis_a` (anchor directions with
    /// distinct coefficients, plus a one-dimensional complement).
    pub left_a_phases: usize,
    /// Same for `basis_b`.
    pub left_b_phases: usize,
    /// `U(d)` on the `m - k_1` columns of `basis_a` unused by the anchor,
    /// when `d >= 2`.
    pub left_a_blocks: Vec<usize>,
    /// `U(d)` on the `n - k_1` unused columns of `basis_b`, when `d >= 2`.
    pub left_b_blocks: Vec<usize>,
    /// `U(d)` blocks from degenerate anchor Schmidt coefficients, acting on
    /// both bases jointly.
    pub anchor_blocks: Vec<usize>,
    /// Pairing constraints between the anchor phases on `basis_a` and
    /// `basis_b`.
    pub anchor_constraints: usize,
    /// One global phase per eigenvector with a non-degenerate eigenvalue.
    pub per_item_phase: usize,
    pub schmidt_blocks: Vec<ItemSchmidtGauge>,
    /// `U(d)` mixing inside clusters of equal eigenvalues.
    pub eigen_blocks: Vec<usize>,
    /// Real dimension of the residual gauge group.
    pub free_parameter_count: usize,
}

impl GaugeDescriptor {
    /// Recomputes the real dimension from the other fields.
    pub fn recount(&self) -> usize {
        let sq = |v: &[usize]| v.iter().map(|d| d * d).sum::<usize>();
        let items: usize = self
            .schmidt_blocks
            .iter()
            .map(|g| 2 * g.phases + sq(&g.blocks) - g.paired_constraints)
            .sum();
        self.left_a_phases + self.left_b_phases - self.anchor_constraints
            + sq(&self.left_a_blocks)
            + sq(&self.left_b_blocks)
            + sq(&self.anchor_blocks)
            + self.per_item_phase
            + sq(&self.eigen_blocks)
            + items
    }

    /// Whether the group is a torus (no non-abelian blocks).
    pub fn is_torus(&self) -> bool {
        self.left_a_blocks.is_empty()
            && self.left_b_blocks.is_empty()
            && self.anchor_blocks.is_empty()
            && self.eigen_blocks.is_empty()
            && self.schmidt_blocks.iter().all(|g| g.blocks.is_empty())
    }
}

pub fn gauge_descriptor(rep: &Representation, _tol: &ToleranceConfig) -> GaugeDescriptor {
    let (m, n) = (rep.dims.m(), rep.dims.n());
    let anchor = &rep.items[0].schmidt;
    let k1 = anchor.rank();
    let mut g = GaugeDescriptor {
        left_a_phases: 0,
        left_b_phases: 0,
        left_a_blocks: Vec::new(),
        left_b_blocks: Vec::new(),
        anchor_blocks: Vec::new(),
        anchor_constraints: 0,
        per_item_phase: 0,
        schmidt_blocks: Vec::new(),
        eigen_blocks: Vec::new(),
        free_parameter_count: 0,
    };
    for b in &anchor.degeneracy_blocks {
        if b.len() == 1 {
            g.left_a_phases += 1;
            g.left_b_phases += 1;
            g.anchor_constraints += 1;
        } else {
            g.anchor_blocks.push(b.len());
        }
    }
    for (rest, phases, blocks) in [
        (m - k1, &mut g.left_a_phases, &mut g.left_a_blocks),
        (n - k1, &mut g.left_b_phases, &mut g.left_b_blocks),
    ] {
        match rest {
            0 => {}
            1 => *phases += 1,
            d => blocks.push(d),
        }
    }
    for b in &rep.eigenvalue_blocks {
        if b.len() == 1 {
            g.per_item_phase += 1;
        } else {
            g.eigen_blocks.push(b.len());
        }
    }
    for (i, item) in rep.items.iter().enumerate().skip(1) {
        let blocks = &item.schmidt.degeneracy_blocks;
        let phases = blocks.iter().filter(|b| b.len() == 1).count();
        g.schmidt_blocks.push(ItemSchmidtGauge {
            item: i,
            phases,
            blocks: blocks.iter().filter(|b| b.len() > 1).map(|b| b.len()).collect(),
            paired_constraints: phases,
        });
    }
    g.free_parameter_count = g.recount();
    g
}

fn random_phase<R: Rng>(rng: &mut R) -> C64 {
    let t: f64 = rng.random_range(0.0..core::f64::consts::TAU);
    C64::new(t.cos(), t.sin())
}

/// Another representation of the same state, obtained by a random element of
/// the residual gauge group: eigenvector phases (or `U(d)` mixing inside
/// equal-eigenvalue clusters), Schmidt pair phases (or `U(d)` inside
/// degenerate Schmidt blocks), and unitaries on the unused basis columns.
pub fn random_gauge_transform<R: Rng>(
    rep: &Representation,
    tol: &ToleranceConfig,
    rng: &mut R,
) -> Result<Representation> {
    let dims = rep.dims;
    let l = rep.rank();
    let mut vectors: Vec<Vec<C64>> = (0..l).map(|i| rep.eigenvector(i)).collect();
    let mut schmidts: Vec<Option<SchmidtDecomposition>> = vec![None; l];

    for block in &rep.eigenvalue_blocks {
        if block.len() == 1 {
            let i = block[0];
            let ph = random_phase(rng);
            let mut s = rep.items[i].schmidt.clone();
            s.left_vectors = rep.left_vectors(i).scale(ph);
            s.right_vectors = rep.right_vectors(i);
            schmidts[i] = Some(s);
        } else {
            let q = haar_unitary(block.len(), rng);
            let old: Vec<Vec<C64>> = block.iter().map(|&i| vectors[i].clone()).collect();
            for (jj, &i) in block.iter().enumerate() {
                vectors[i] = (0..dims.total())
                    .map(|r| (0..block.len()).map(|kk| old[kk][r] * q[(kk, jj)]).sum())
                    .collect();
            }
        }
    }

    let mut finished = Vec::with_capacity(l);
    for (i, s) in schmidts.into_iter().enumerate() {
        let mut s = match s {
            Some(s) => s,
            None => schmidt_decompose(&vectors[i], dims, tol.tol_rank)?,
        };
        for b in s.degeneracy_blocks.clone() {
            let q = if b.len() == 1 {
                ComplexMatrix::from_fn(1, 1, |_, _| random_phase(rng))
            } else {
                haar_unitary(b.len(), rng)
            };
            let left = s.left_vectors.select_columns(&b).mul_unchecked(&q);
            let right = s.right_vectors.select_columns(&b).mul_unchecked(&q.conj());
            for (jj, &j) in b.iter().enumerate() {
                s.left_vectors.set_column(j, &left.column(jj));
                s.right_vectors.set_column(j, &right.column(jj));
            }
        }
        finished.push(s);
    }

    let k1 = finished[0].rank();
    let wa = haar_unitary(dims.m() - k1, rng);
    let wb = haar_unitary(dims.n() - k1, rng);
    assemble(
        dims,
        rep.eigenvalues(),
        finished,
        rep.eigenvalue_blocks.clone(),
        Some((&wa, &wb)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius_distance, ZERO};
    use crate::states::{random_density, werner, WernerParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pure_product_anchor() {
        let dims = BipartiteDims::new(2, 2).unwrap();
        let rho = DensityMatrix::pure(&[ONE, ZERO, ZERO, ZERO], dims).unwrap();
        let rep = build_representation(&rho, &ToleranceConfig::default()).unwrap();
        assert_eq!(rep.rank(), 1);
        assert_eq!(rep.anchor_rank(), 1);
        assert_eq!(rep.items[0].x, padded_identity(2, 1));
        assert_eq!(rep.items[0].y, padded_identity(2, 1));
    }

    #[test]
    fn werner_blocks_and_reconstruction() {
        let rho = werner(WernerParams::new(0.1, 0.2).unwrap()).unwrap();
        let tol = ToleranceConfig::default();
        let rep = build_representation(&rho, &tol).unwrap();
        assert_eq!(rep.rank(), 4);
        assert!(!rep.degenerate_anchor);
        assert!(frobenius_distance(&rep.reconstruct(), rho.matrix()).unwrap() < 1e-12);
        let g = gauge_descriptor(&rep, &tol);
        assert_eq!(g.free_parameter_count, g.recount());
        // |e_2> and |e_4> are maximally entangled: one U(2) block each.
        let with_blocks: Vec<usize> = g
            .schmidt_blocks
            .iter()
            .filter(|s| s.blocks == vec![2])
            .map(|s| s.item)
            .collect();
        assert_eq!(with_blocks.len(), 2);
    }

    #[test]
    fn degenerate_werner_raises_anchor_flag() {
        let rho = werner(WernerParams::new(0.0, 0.1).unwrap()).unwrap();
        let rep = build_representation(&rho, &ToleranceConfig::default()).unwrap();
        assert!(rep.degenerate_anchor);
        assert_eq!(rep.eigenvalue_blocks[0].len(), 3);
    }

    #[test]
    fn generic_two_qubit_descriptor_is_torus_of_dim_twelve() {
        let dims = BipartiteDims::new(2, 2).unwrap();
        let rho = random_density(dims, 4, 5).unwrap();
        let tol = ToleranceConfig::default();
        let g = gauge_descriptor(&build_representation(&rho, &tol).unwrap(), &tol);
        assert!(g.is_torus());
        assert_eq!(g.free_parameter_count, 12);
    }

    #[test]
    fn gauge_transform_keeps_state() {
        let dims = BipartiteDims::new(3, 3).unwrap();
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for rank in [1, 3, 9] {
            let rho = random_density(dims, rank, rank as u64).unwrap();
            let rep = build_representation(&rho, &tol).unwrap();
            let moved = random_gauge_transform(&rep, &tol, &mut rng).unwrap();
            assert!(frobenius_distance(&moved.reconstruct(), rho.matrix()).unwrap() < 1e-12);
            assert_eq!(moved.items[0].x, padded_identity(3, rep.anchor_rank()));
            assert!(moved.basis_a.orthonormality_defect() < 1e-12);
        }
    }
}

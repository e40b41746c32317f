//! Multi-start search for a local unitary mapping one state onto another,
//! and the tangent map of the local-unitary orbit.

use alloc::format;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{verify_certificate, DecisionConfig, Verdict};
use crate::error::Result;
use crate::linalg::{eigh, expm_antihermitian, svd, ComplexMatrix, C64, ONE};
use crate::states::{
    conjugate, partial_trace_first, partial_trace_second, random_local_unitary_with, BipartiteDims, DensityMatrix,
    LocalUnitary,
};

/// Relative singular-value cut-off used by [`orbit_dimension`] callers that
/// have no better choice.
pub const DEFAULT_ORBIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    /// Haar-random starts tried after the deterministic seeds.
    pub restarts: usize,
    pub max_iter: usize,
    pub seed: u64,
    /// Stop when the Riemannian gradient norm falls below this.
    pub grad_tol: f64,
    /// Residual below which Gauss-Newton steps are attempted.
    pub polish_below: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iter: 2000,
            seed: 0,
            grad_tol: 1e-10,
            polish_below: 1e-2,
        }
    }
}

/// `i E_rr`, `E_rc - E_cr`, `i (E_rc + E_cr)`: a real basis of `u(k)`.
pub(crate) fn antihermitian_basis(k: usize) -> Vec<ComplexMatrix> {
    let i = C64::new(0.0, 1.0);
    let mut out = Vec::with_capacity(k * k);
    for r in 0..k {
        let mut e = ComplexMatrix::zeros(k, k);
        e[(r, r)] = i;
        out.push(e);
    }
    for r in 0..k {
        for c in r + 1..k {
            let mut e = ComplexMatrix::zeros(k, k);
            e[(r, c)] = ONE;
            e[(c, r)] = -ONE;
            out.push(e);
            let mut e = ComplexMatrix::zeros(k, k);
            e[(r, c)] = i;
            e[(c, r)] = i;
            out.push(e);
        }
    }
    out
}

/// Generators `K (x) I` for `K` in `u(m)`, then `I (x) K` for `K` in `u(n)`.
fn lifted_generators(dims: BipartiteDims) -> (Vec<ComplexMatrix>, Vec<ComplexMatrix>, Vec<ComplexMatrix>) {
    let (bm, bn) = (antihermitian_basis(dims.m()), antihermitian_basis(dims.n()));
    let (im, in_) = (ComplexMatrix::identity(dims.m()), ComplexMatrix::identity(dims.n()));
    let lifted = bm
        .iter()
        .map(|k| k.kron(&in_))
        .chain(bn.iter().map(|k| im.kron(k)))
        .collect();
    (bm, bn, lifted)
}

fn flatten_real(a: &ComplexMatrix) -> Vec<f64> {
    a.as_slice().iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Columns `vec([K_k, r])` of the orbit tangent map at `r`.
fn tangent_columns(r: &ComplexMatrix, lifted: &[ComplexMatrix]) -> Vec<Vec<f64>> {
    lifted.iter().map(|k| flatten_real(&k.commutator(r))).collect()
}

/// Real dimension of the local-unitary orbit through `rho`: the numerical
/// rank of `(H_1, H_2) -> [H_1 (x) I + I (x) H_2, rho]`, counting singular
/// values above `tol * sigma_max`.
pub fn orbit_dimension(rho: &DensityMatrix, tol: f64) -> Result<usize> {
    let (_, _, lifted) = lifted_generators(rho.dims());
    let cols = tangent_columns(rho.matrix(), &lifted);
    let rows = cols[0].len();
    let j = ComplexMatrix::from_fn(rows, cols.len(), |r, c| C64::new(cols[c][r], 0.0));
    let s = svd(&j, 1e-12)?;
    let top = s.singular_values.first().copied().unwrap_or(0.0);
    if top <= f64::EPSILON {
        return Ok(0);
    }
    Ok(s.singular_values.iter().filter(|&&x| x > tol * top).count())
}

struct Point {
    lu: LocalUnitary,
    image: ComplexMatrix,
    diff: ComplexMatrix,
    f: f64,
}

fn evaluate(rho: &ComplexMatrix, target: &ComplexMatrix, lu: LocalUnitary) -> Point {
    let image = conjugate(rho, &lu.kron());
    let diff = ComplexMatrix::from_fn(image.rows(), image.cols(), |r, c| image[(r, c)] - target[(r, c)]);
    let f = diff.frobenius_norm();
    Point { lu, image, diff, f }
}

fn moved(p: &Point, k1: &ComplexMatrix, k2: &ComplexMatrix) -> Result<LocalUnitary> {
    Ok(LocalUnitary {
        u: expm_antihermitian(k1)?.mul_unchecked(&p.lu.u),
        v: expm_antihermitian(k2)?.mul_unchecked(&p.lu.v),
    })
}

fn combine(basis: &[ComplexMatrix], coeffs: &[f64]) -> ComplexMatrix {
    let k = basis[0].rows();
    let mut out = ComplexMatrix::zeros(k, k);
    for (b, &c) in basis.iter().zip(coeffs) {
        for r in 0..k {
            for s in 0..k {
                out[(r, s)] += b[(r, s)] * c;
            }
        }
    }
    out
}

/// Least-squares solution of the linearized problem
/// `min || diff + [K, image] ||` over the local generators.
fn gauss_newton(
    p: &Point,
    bm: &[ComplexMatrix],
    bn: &[ComplexMatrix],
    lifted: &[ComplexMatrix],
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let cols = tangent_columns(&p.image, lifted);
    let delta = flatten_real(&p.diff);
    let q = cols.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let normal = ComplexMatrix::from_fn(q, q, |a, b| C64::new(dot(&cols[a], &cols[b]), 0.0));
    let g: Vec<f64> = cols.iter().map(|c| dot(c, &delta)).collect();
    let e = eigh(&normal, 1e-8)?;
    let top = e.eigenvalues.first().copied().unwrap_or(0.0);
    let mut step = alloc::vec![0.0; q];
    for (k, &lam) in e.eigenvalues.iter().enumerate() {
        if lam <= 1e-12 * top {
            continue;
        }
        let v: Vec<f64> = e.eigenvectors.column(k).iter().map(|z| z.re).collect();
        let w = -dot(&v, &g) / lam;
        for (s, x) in step.iter_mut().zip(&v) {
            *s += w * x;
        }
    }
    let split = bm.len();
    Ok((combine(bm, &step[..split]), combine(bn, &step[split..])))
}

/// Riemannian descent on `||(U (x) V) rho (U (x) V)^dag - rho2||_F` from
/// `start`; returns the final point and its residual.
fn descend(rho: &DensityMatrix, rho2: &DensityMatrix, start: LocalUnitary, cfg: &DecisionConfig) -> Result<(LocalUnitary, f64)> {
    let dims = rho.dims();
    let (bm, bn, lifted) = lifted_generators(dims);
    let target = cfg.tol.tol_accept / 10.0;
    let oc = &cfg.optimizer;
    let mut p = evaluate(rho.matrix(), rho2.matrix(), start);
    let mut t: f64 = 1.0;
    for _ in 0..oc.max_iter {
        if p.f < target {
            break;
        }
        if p.f < oc.polish_below {
            let (k1, k2) = gauss_newton(&p, &bm, &bn, &lifted)?;
            let q = evaluate(rho.matrix(), rho2.matrix(), moved(&p, &k1, &k2)?);
            if q.f < p.f {
                p = q;
                continue;
            }
        }
        let g = p.image.commutator(&p.diff);
        let g1 = partial_trace_second(&g, dims);
        let g2 = partial_trace_first(&g, dims);
        let gn2 = g1.frobenius_norm().powi(2) + g2.frobenius_norm().powi(2);
        if gn2.sqrt() < oc.grad_tol {
            break;
        }
        t = (t * 2.0).min(1e6);
        let f2 = p.f * p.f;
        let mut accepted = None;
        for _ in 0..60 {
            let q = evaluate(rho.matrix(), rho2.matrix(), moved(&p, &g1.scale_real(t), &g2.scale_real(t))?);
            if q.f * q.f <= f2 - 1e-4 * t * 2.0 * gn2 {
                accepted = Some(q);
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some(q) => p = q,
            None => break,
        }
    }
    Ok((p.lu, p.f))
}

/// Multi-start minimization from the given seeds, then
/// `config.optimizer.restarts` Haar-random starts. Never rejects.
pub fn optimize_alignment_from(
    rho: &DensityMatrix,
    rho2: &DensityMatrix,
    seeds: &[LocalUnitary],
    config: &DecisionConfig,
) -> Verdict {
    let dims = rho.dims();
    let mut rng = ChaCha8Rng::seed_from_u64(config.optimizer.seed);
    let mut best = f64::INFINITY;
    for k in 0..seeds.len() + config.optimizer.restarts {
        let start = match seeds.get(k) {
            Some(s) => s.clone(),
            None => random_local_unitary_with(dims, &mut rng),
        };
        let Ok((lu, _)) = descend(rho, rho2, start, config) else {
            continue;
        };
        let Ok(residual) = verify_certificate(rho, rho2, &lu) else {
            continue;
        };
        if residual < config.tol.tol_accept {
            return Verdict::Equivalent {
                certificate: lu,
                residual,
            };
        }
        best = best.min(residual);
    }
    Verdict::Undecided {
        reason: format!(
            "no local unitary reached residual {:e} from {} starts",
            config.tol.tol_accept,
            seeds.len() + config.optimizer.restarts
        ),
        best_residual: best,
    }
}

/// [`optimize_alignment_from`] with the identity as the only seed.
pub fn optimize_alignment(rho: &DensityMatrix, rho2: &DensityMatrix, config: &DecisionConfig) -> Verdict {
    optimize_alignment_from(rho, rho2, &[LocalUnitary::identity(rho.dims())], config)
}

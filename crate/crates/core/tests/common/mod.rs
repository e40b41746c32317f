#![allow(dead_code)]

use lueq_core::linalg::{ComplexMatrix, C64};
use lueq_core::states::{haar_unitary, random_unit_vector, BipartiteDims, DensityMatrix};
use rand::Rng;

pub fn dims(m: usize, n: usize) -> BipartiteDims {
    BipartiteDims::new(m, n).unwrap()
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn axpy(acc: &mut [C64], s: C64, x: &[C64]) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a += s * b;
    }
}

/// `sum_s mu_s a_s (x) b_s`.
pub fn schmidt_sum(terms: &[(f64, &[C64], &[C64])]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); terms[0].1.len() * terms[0].2.len()];
    for (mu, a, b) in terms {
        axpy(&mut out, C64::new(*mu, 0.0), &kron_vec(a, b));
    }
    out
}

pub fn columns(u: &ComplexMatrix) -> Vec<Vec<C64>> {
    (0..u.cols()).map(|c| u.column(c)).collect()
}

/// Random unit vector orthogonal to the orthonormal `basis`.
pub fn random_orthogonal<R: Rng>(basis: &[Vec<C64>], d: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let mut v = random_unit_vector(d, rng);
        for b in basis {
            let p = inner(b, &v);
            axpy(&mut v, -p, b);
        }
        let n = norm(&v);
        if n > 1e-3 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// `k` orthonormal random vectors in `C^d`.
pub fn random_frame<R: Rng>(d: usize, k: usize, rng: &mut R) -> Vec<Vec<C64>> {
    columns(&haar_unitary(d, rng)).into_iter().take(k).collect()
}

/// `sum_i lambda_i |e_i><e_i|` for orthonormal `e_i`.
pub fn spectral_state(lambdas: &[f64], vectors: &[Vec<C64>], d: BipartiteDims) -> DensityMatrix {
    let terms: Vec<(f64, Vec<C64>)> = lambdas.iter().copied().zip(vectors.iter().cloned()).collect();
    DensityMatrix::mixture(&terms, d).unwrap()
}

/// Two distinct Schmidt coefficients, the larger first.
pub fn unequal_pair<R: Rng>(rng: &mut R) -> (f64, f64) {
    let t: f64 = rng.random_range(0.6..0.95);
    (t.sqrt(), (1.0 - t).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitQutritCase {
    /// Both eigenvectors product.
    One,
    /// Anchor product, second entangled.
    Two,
    /// Anchor entangled, second product.
    Three,
    /// Both entangled.
    Four,
}

/// Rank-2 qubit-qutrit state with `lambda_1 > lambda_2` whose eigenvectors
/// have the Schmidt ranks of `case`; the flags request coefficients
/// `(1/sqrt2, 1/sqrt2)` for the anchor or the second eigenvector where it is
/// entangled.
pub fn qubit_qutrit_case<R: Rng>(
    case: QubitQutritCase,
    equal_anchor: bool,
    equal_second: bool,
    rng: &mut R,
) -> DensityMatrix {
    use QubitQutritCase::*;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let coeffs = |equal: bool, rng: &mut R| if equal { (h, h) } else { unequal_pair(rng) };
    let l1: f64 = rng.random_range(0.55..0.95);
    let a = random_frame(2, 2, rng);
    let b = random_frame(3, 3, rng);
    let (e1, e2) = match case {
        One => {
            let e1 = kron_vec(&a[0], &b[0]);
            let x = random_unit_vector(2, rng);
            let y = random_orthogonal(&b[..1], 3, rng);
            (e1, kron_vec(&x, &y))
        }
        Two => {
            let e1 = kron_vec(&a[0], &b[0]);
            let (n1, n2) = coeffs(equal_second, rng);
            let c = random_frame(2, 2, rng);
            let d1 = random_orthogonal(&b[..1], 3, rng);
            let d2 = random_orthogonal(&[b[0].clone(), d1.clone()], 3, rng);
            (e1, schmidt_sum(&[(n1, &c[0], &d1), (n2, &c[1], &d2)]))
        }
        Three => {
            let (m1, m2) = coeffs(equal_anchor, rng);
            let e1 = schmidt_sum(&[(m1, &a[0], &b[0]), (m2, &a[1], &b[1])]);
            let x = random_unit_vector(2, rng);
            (e1, kron_vec(&x, &b[2]))
        }
        Four => {
            let (m1, m2) = coeffs(equal_anchor, rng);
            let e1 = schmidt_sum(&[(m1, &a[0], &b[0]), (m2, &a[1], &b[1])]);
            let (n1, n2) = coeffs(equal_second, rng);
            let c = random_frame(2, 2, rng);
            // d_2 in span(b_1, b_2) chosen so that <e_1|e_2> = 0.
            let al = [inner(&a[0], &c[1]) * m1, inner(&a[1], &c[1]) * m2];
            let mut d2 = vec![C64::new(0.0, 0.0); 3];
            axpy(&mut d2, al[1], &b[0]);
            axpy(&mut d2, -al[0], &b[1]);
            let nd = norm(&d2);
            let d2: Vec<C64> = d2.into_iter().map(|z| z / nd).collect();
            (e1, schmidt_sum(&[(n1, &c[0], &b[2]), (n2, &c[1], &d2)]))
        }
    };
    assert!(inner(&e1, &e2).norm() < 1e-12);
    spectral_state(&[l1, 1.0 - l1], &[e1, e2], dims(2, 3))
}

//! Phase alignment between two representations with the same invariants.
//!
//! The residual gauge acting on rigid items is a torus (phases on the anchor
//! basis columns, one global phase per eigenvector, one phase per Schmidt
//! pair) plus a unitary on the basis columns the anchor does not use. The
//! torus part gives one linear equation mod 2pi per nonzero entry; the
//! unitary part is eliminated by comparing Gram matrices of the unused rows,
//! which are invariant under it up to the same torus phases.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use crate::error::Result;
use crate::linalg::{polar_unitary, ComplexMatrix, C64};
use crate::representation::Representation;
use crate::states::LocalUnitary;
use crate::tolerance::ToleranceConfig;

/// Coefficients larger than this after elimination mean the system has
/// torsion the solver does not handle.
const MAX_COEFF: i64 = 1 << 20;

/// Angles aligning `rep` onto `rep2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSolution {
    /// Phase on each anchor column `a_r`, `r < k_1`. The remaining columns
    /// are aligned by a unitary block in [`construct_certificate`].
    pub phi_a: Vec<f64>,
    /// Phase on each anchor column `b_c`, `c < k_1`.
    pub phi_b: Vec<f64>,
    /// Global phase of each item in `items`.
    pub psi: Vec<f64>,
    /// Per-Schmidt-pair phase of each item in `items`.
    pub sigma: Vec<Vec<f64>>,
    /// Items whose data entered the system.
    pub items: Vec<usize>,
    /// Largest modulus-weighted violation over all constraints.
    pub residual: f64,
}

impl PhaseSolution {
    /// All angles zero over the given items.
    pub fn zero(rep: &Representation, items: Vec<usize>) -> Self {
        let k1 = rep.anchor_rank();
        Self {
            phi_a: vec![0.0; k1],
            phi_b: vec![0.0; k1],
            psi: vec![0.0; items.len()],
            sigma: items.iter().map(|&i| vec![0.0; rep.items[i].schmidt_rank()]).collect(),
            items,
            residual: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AlignmentOutcome {
    Solved(PhaseSolution),
    /// A gauge-invariant modulus differs.
    ModulusMismatch { detail: String },
    /// The phase equations are inconsistent.
    PhaseObstruction { residual: f64 },
    /// The exact solver does not apply.
    NeedsFallback { reason: String },
}

pub(crate) fn wrap(x: f64) -> f64 {
    let y = x - TAU * (x / TAU).round();
    if y <= -PI {
        y + TAU
    } else {
        y
    }
}

struct Constraint {
    coeffs: Vec<(usize, i64)>,
    rhs: f64,
    weight: f64,
}

struct Layout {
    k1: usize,
    psi: usize,
    sigma: Vec<usize>,
    total: usize,
}

impl Layout {
    fn new(rep: &Representation, items: &[usize]) -> Self {
        let k1 = rep.anchor_rank();
        let psi = 2 * k1;
        let mut next = psi + items.len();
        let sigma = items
            .iter()
            .map(|&i| {
                let start = next;
                next += rep.items[i].schmidt_rank();
                start
            })
            .collect();
        Self {
            k1,
            psi,
            sigma,
            total: next,
        }
    }
    fn phi_a(&self, r: usize) -> usize {
        r
    }
    fn phi_b(&self, c: usize) -> usize {
        self.k1 + c
    }
    fn psi(&self, slot: usize) -> usize {
        self.psi + slot
    }
    fn sigma(&self, slot: usize, s: usize) -> usize {
        self.sigma[slot] + s
    }
}

fn push(coeffs: &mut Vec<(usize, i64)>, var: usize, c: i64) {
    match coeffs.iter_mut().find(|(v, _)| *v == var) {
        Some(e) => e.1 += c,
        None => coeffs.push((var, c)),
    }
}

struct Builder<'a> {
    tol: &'a ToleranceConfig,
    constraints: Vec<Constraint>,
}

impl Builder<'_> {
    /// Records `sum coeffs * x = arg(after / before)` after checking that
    /// the two moduli agree.
    fn relate(&mut self, before: C64, after: C64, coeffs: Vec<(usize, i64)>, what: &dyn Fn() -> String) -> core::result::Result<(), String> {
        let (p, q) = (before.norm(), after.norm());
        if (p - q).abs() > self.tol.tol_modulus {
            return Err(format!("{}: |{:.3e}| vs |{:.3e}|", what(), p, q));
        }
        let weight = p.min(q);
        let coeffs: Vec<_> = coeffs.into_iter().filter(|&(_, c)| c != 0).collect();
        if weight > self.tol.tol_zero && !coeffs.is_empty() {
            self.constraints.push(Constraint {
                coeffs,
                rhs: (after * before.conj()).arg(),
                weight,
            });
        }
        Ok(())
    }
}

fn gram(a: &ComplexMatrix, s: usize, b: &ComplexMatrix, t: usize, from: usize) -> C64 {
    (from..a.rows()).map(|r| a[(r, s)].conj() * b[(r, t)]).sum()
}

fn build(rep: &Representation, rep2: &Representation, items: &[usize], layout: &Layout, tol: &ToleranceConfig) -> core::result::Result<Vec<Constraint>, String> {
    let k1 = layout.k1;
    let mut b = Builder {
        tol,
        constraints: Vec::new(),
    };
    for (slot, &i) in items.iter().enumerate() {
        let (x, x2) = (&rep.items[i].x, &rep2.items[i].x);
        let (y, y2) = (&rep.items[i].y, &rep2.items[i].y);
        for s in 0..x.cols() {
            for r in 0..k1 {
                let c = vec![(layout.psi(slot), 1), (layout.phi_a(r), 1), (layout.sigma(slot, s), 1)];
                b.relate(x[(r, s)], x2[(r, s)], c, &|| format!("X_{}[{}][{}]", i + 1, r, s))?;
            }
            for r in 0..k1 {
                let c = vec![(layout.sigma(slot, s), -1), (layout.phi_b(r), 1)];
                b.relate(y[(r, s)], y2[(r, s)], c, &|| format!("Y_{}[{}][{}]", i + 1, r, s))?;
            }
        }
    }
    // Gram matrices of the unused rows, over every pair of columns.
    let cols: Vec<(usize, usize, usize)> = items
        .iter()
        .enumerate()
        .flat_map(|(slot, &i)| (0..rep.items[i].schmidt_rank()).map(move |s| (slot, i, s)))
        .collect();
    for (p, &(si, i, s)) in cols.iter().enumerate() {
        for &(sj, j, t) in &cols[p..] {
            if rep.dims.m() > k1 {
                let g = gram(&rep.items[i].x, s, &rep.items[j].x, t, k1);
                let g2 = gram(&rep2.items[i].x, s, &rep2.items[j].x, t, k1);
                let mut c = Vec::new();
                push(&mut c, layout.psi(sj), 1);
                push(&mut c, layout.sigma(sj, t), 1);
                push(&mut c, layout.psi(si), -1);
                push(&mut c, layout.sigma(si, s), -1);
                b.relate(g, g2, c, &|| format!("unused-row overlap of X_{}[.][{}] and X_{}[.][{}]", i + 1, s, j + 1, t))?;
            }
            if rep.dims.n() > k1 {
                let g = gram(&rep.items[i].y, s, &rep.items[j].y, t, k1);
                let g2 = gram(&rep2.items[i].y, s, &rep2.items[j].y, t, k1);
                let mut c = Vec::new();
                push(&mut c, layout.sigma(sj, t), -1);
                push(&mut c, layout.sigma(si, s), 1);
                b.relate(g, g2, c, &|| format!("unused-row overlap of Y_{}[.][{}] and Y_{}[.][{}]", i + 1, s, j + 1, t))?;
            }
        }
    }
    Ok(b.constraints)
}

struct Pivot {
    var: usize,
    row: Vec<i64>,
    rhs: f64,
}

/// Integer elimination mod 2pi with unit pivots; free variables are zero.
/// Rows whose reduced coefficients are all non-unit are retried after the
/// other rows; the flag reports whether any remained.
fn eliminate(constraints: &[Constraint], nvars: usize) -> Option<(Vec<f64>, bool)> {
    let mut pending: Vec<usize> = (0..constraints.len()).collect();
    pending.sort_by(|&a, &b| constraints[b].weight.total_cmp(&constraints[a].weight));
    let mut pivots: Vec<Pivot> = Vec::new();
    loop {
        let mut deferred = Vec::new();
        let before = pivots.len();
        for &k in &pending {
            let c = &constraints[k];
            let mut row = vec![0i64; nvars];
            for &(v, a) in &c.coeffs {
                row[v] += a;
            }
            let mut rhs = c.rhs;
            for p in &pivots {
                let f = row[p.var] * p.row[p.var];
                if f != 0 {
                    for (x, y) in row.iter_mut().zip(&p.row) {
                        *x -= f * y;
                    }
                    rhs -= f as f64 * p.rhs;
                }
            }
            if row.iter().any(|x| x.abs() > MAX_COEFF) {
                return None;
            }
            if row.iter().all(|&x| x == 0) {
                continue;
            }
            match row.iter().position(|x| x.abs() == 1) {
                Some(var) => pivots.push(Pivot {
                    var,
                    row,
                    rhs: wrap(rhs),
                }),
                None => deferred.push(k),
            }
        }
        if deferred.is_empty() || pivots.len() == before {
            let torsion = !deferred.is_empty();
            let mut x = vec![0.0; nvars];
            for p in pivots.iter().rev() {
                let rest: f64 = p
                    .row
                    .iter()
                    .enumerate()
                    .filter(|&(v, _)| v != p.var)
                    .map(|(v, &a)| a as f64 * x[v])
                    .sum();
                x[p.var] = wrap((p.rhs - rest) * p.row[p.var] as f64);
            }
            return Some((x, torsion));
        }
        pending = deferred;
    }
}

fn residual(constraints: &[Constraint], x: &[f64]) -> f64 {
    constraints
        .iter()
        .map(|c| {
            let lhs: f64 = c.coeffs.iter().map(|&(v, a)| a as f64 * x[v]).sum();
            c.weight * wrap(lhs - c.rhs).abs()
        })
        .fold(0.0, f64::max)
}

/// Solves the phase system using only the listed items. The anchor (item
/// 0) must be among them and must have distinct Schmidt coefficients in both
/// representations.
pub fn solve_phase_alignment_on(
    rep: &Representation,
    rep2: &Representation,
    items: &[usize],
    tol: &ToleranceConfig,
) -> AlignmentOutcome {
    if items.first() != Some(&0) || rep.items[0].schmidt.is_degenerate() || rep2.items[0].schmidt.is_degenerate() {
        return AlignmentOutcome::NeedsFallback {
            reason: "anchor Schmidt coefficients are degenerate".into(),
        };
    }
    for &i in items {
        if i >= rep.rank() || i >= rep2.rank() || rep.items[i].schmidt_rank() != rep2.items[i].schmidt_rank() {
            return AlignmentOutcome::NeedsFallback {
                reason: format!("item {} is not comparable", i + 1),
            };
        }
    }
    let layout = Layout::new(rep, items);
    let constraints = match build(rep, rep2, items, &layout, tol) {
        Ok(c) => c,
        Err(detail) => return AlignmentOutcome::ModulusMismatch { detail },
    };
    let torsion = || AlignmentOutcome::NeedsFallback {
        reason: "phase system has torsion".into(),
    };
    let Some((x, torsion_left)) = eliminate(&constraints, layout.total) else {
        return torsion();
    };
    let res = residual(&constraints, &x);
    if res > tol.tol_phase {
        // With torsion, another branch of the free angles might still fit.
        if torsion_left {
            return torsion();
        }
        return AlignmentOutcome::PhaseObstruction { residual: res };
    }
    let k1 = layout.k1;
    AlignmentOutcome::Solved(PhaseSolution {
        phi_a: x[..k1].to_vec(),
        phi_b: x[k1..2 * k1].to_vec(),
        psi: (0..items.len()).map(|s| x[layout.psi(s)]).collect(),
        sigma: items
            .iter()
            .enumerate()
            .map(|(slot, &i)| (0..rep.items[i].schmidt_rank()).map(|s| x[layout.sigma(slot, s)]).collect())
            .collect(),
        items: items.to_vec(),
        residual: res,
    })
}

/// Exact alignment on the non-degenerate stratum.
pub fn solve_phase_alignment(rep: &Representation, rep2: &Representation, tol: &ToleranceConfig) -> AlignmentOutcome {
    if !rep.is_nondegenerate() || !rep2.is_nondegenerate() {
        return AlignmentOutcome::NeedsFallback {
            reason: "degenerate eigenvalues or Schmidt coefficients".into(),
        };
    }
    if rep.rank() != rep2.rank() {
        return AlignmentOutcome::NeedsFallback {
            reason: "ranks differ".into(),
        };
    }
    let items: Vec<usize> = (0..rep.rank()).collect();
    solve_phase_alignment_on(rep, rep2, &items, tol)
}

fn cis(t: f64) -> C64 {
    C64::new(t.cos(), t.sin())
}

/// `diag(e^{i phi}) (+) W`, with `W` the unitary best matching the unused
/// rows of the phase-corrected coordinates onto those of `rep2`.
fn transport(
    phis: &[f64],
    dim: usize,
    coords: impl Iterator<Item = (ComplexMatrix, ComplexMatrix, Vec<C64>)>,
) -> Result<ComplexMatrix> {
    let k1 = phis.len();
    let mut t = ComplexMatrix::zeros(dim, dim);
    for (r, &p) in phis.iter().enumerate() {
        t[(r, r)] = cis(p);
    }
    if dim > k1 {
        let d = dim - k1;
        let mut acc = ComplexMatrix::zeros(d, d);
        for (z, z2, phases) in coords {
            for (s, ph) in phases.iter().enumerate() {
                for a in 0..d {
                    for b in 0..d {
                        acc[(a, b)] += z2[(k1 + a, s)] * (z[(k1 + b, s)] * ph).conj();
                    }
                }
            }
        }
        let w = polar_unitary(&acc)?;
        for a in 0..d {
            for b in 0..d {
                t[(k1 + a, k1 + b)] = w[(a, b)];
            }
        }
    }
    Ok(t)
}

/// `U = basis_a2 T_A basis_a^dag`, `V = basis_b2 T_B basis_b^dag`.
pub fn construct_certificate(rep: &Representation, rep2: &Representation, sol: &PhaseSolution) -> Result<LocalUnitary> {
    let (m, n) = (rep.dims.m(), rep.dims.n());
    let t_a = transport(
        &sol.phi_a,
        m,
        sol.items.iter().enumerate().map(|(slot, &i)| {
            let ph = sol.sigma[slot].iter().map(|&s| cis(sol.psi[slot] + s)).collect();
            (rep.items[i].x.clone(), rep2.items[i].x.clone(), ph)
        }),
    )?;
    let t_b = transport(
        &sol.phi_b,
        n,
        sol.items.iter().enumerate().map(|(slot, &i)| {
            let ph = sol.sigma[slot].iter().map(|&s| cis(-s)).collect();
            (rep.items[i].y.clone(), rep2.items[i].y.clone(), ph)
        }),
    )?;
    let u = rep2.basis_a.mul_unchecked(&t_a).mul_unchecked(&rep.basis_a.adjoint());
    let v = rep2.basis_b.mul_unchecked(&t_b).mul_unchecked(&rep.basis_b.adjoint());
    Ok(LocalUnitary { u, v })
}

/// Maps `basis_a` onto `basis_a2` and `basis_b` onto `basis_b2` with no
/// phase correction.
pub(crate) fn naive_certificate(rep: &Representation, rep2: &Representation) -> LocalUnitary {
    LocalUnitary {
        u: rep2.basis_a.mul_unchecked(&rep.basis_a.adjoint()),
        v: rep2.basis_b.mul_unchecked(&rep.basis_b.adjoint()),
    }
}

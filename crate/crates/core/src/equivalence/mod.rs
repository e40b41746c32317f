//! Local-unitary equivalence of two bipartite states.
//!
//! The decision runs invariant gates first (spectrum, then Schmidt
//! coefficients of uniquely determined eigenvectors), then aligns the two
//! representations by solving for the residual gauge. On the non-degenerate
//! stratum the alignment is exact and yields an explicit certificate; on
//! degenerate strata a seeded multi-start optimizer searches for one and
//! never rejects.

mod optimize;
mod phase;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use optimize::{orbit_dimension, optimize_alignment, optimize_alignment_from, OptimizerConfig, DEFAULT_ORBIT_TOL};
pub use phase::{construct_certificate, solve_phase_alignment, solve_phase_alignment_on, AlignmentOutcome, PhaseSolution};

use crate::error::{Error, Result};
use crate::linalg::frobenius_distance;
use crate::representation::{build_representation, Representation};
use crate::states::{apply_local_unitary, DensityMatrix, LocalUnitary};
use crate::tolerance::ToleranceConfig;

/// Genuine local-unitary invariant that differs between two states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WitnessKind {
    SpectrumMismatch,
    SchmidtMismatch,
    ModulusMismatch,
    PhaseObstruction,
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::SpectrumMismatch => "spectrum mismatch",
            Self::SchmidtMismatch => "Schmidt coefficient mismatch",
            Self::ModulusMismatch => "modulus mismatch",
            Self::PhaseObstruction => "phase obstruction",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// `(U (x) V) rho (U (x) V)^dag` is within `residual` of `rho2`.
    Equivalent { certificate: LocalUnitary, residual: f64 },
    Inequivalent { witness: WitnessKind, detail: String },
    Undecided { reason: String, best_residual: f64 },
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Self::Equivalent { .. })
    }

    pub fn is_inequivalent(&self) -> bool {
        matches!(self, Self::Inequivalent { .. })
    }

    pub fn is_undecided(&self) -> bool {
        matches!(self, Self::Undecided { .. })
    }

    pub fn certificate(&self) -> Option<&LocalUnitary> {
        match self {
            Self::Equivalent { certificate, .. } => Some(certificate),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<WitnessKind> {
        match self {
            Self::Inequivalent { witness, .. } => Some(*witness),
            _ => None,
        }
    }
}

/// Result of an invariant gate.
#[derive(Debug, Clone, PartialEq)]
pub enum GateOutcome {
    Pass,
    Mismatch { detail: String },
    /// Data differ only where it is basis-dependent; not a proof.
    NeedsFallback { reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DecisionConfig {
    pub tol: ToleranceConfig,
    pub optimizer: OptimizerConfig,
}

fn check_dims(rep: &Representation, rep2: &Representation) -> Result<()> {
    if rep.dims != rep2.dims {
        return Err(Error::DimsMismatch {
            m1: rep.dims.m(),
            n1: rep.dims.n(),
            m2: rep2.dims.m(),
            n2: rep2.dims.n(),
        });
    }
    Ok(())
}

/// Compares the nonzero spectra elementwise within `tol_cluster`.
pub fn spectral_gate(rep: &Representation, rep2: &Representation, tol: &ToleranceConfig) -> Result<GateOutcome> {
    check_dims(rep, rep2)?;
    let (a, b) = (rep.eigenvalues(), rep2.eigenvalues());
    if a.len() != b.len() {
        return Ok(GateOutcome::Mismatch {
            detail: format!("rank {} vs {}", a.len(), b.len()),
        });
    }
    for (i, (x, y)) in a.iter().zip(&b).enumerate() {
        if (x - y).abs() > tol.tol_cluster {
            return Ok(GateOutcome::Mismatch {
                detail: format!("eigenvalue {}: {} vs {}", i + 1, x, y),
            });
        }
    }
    Ok(GateOutcome::Pass)
}

fn padded_coefficients(rep: &Representation, i: usize) -> Vec<f64> {
    let mut c = rep.items[i].schmidt.coefficients.clone();
    c.resize(rep.dims.m().min(rep.dims.n()), 0.0);
    c
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// Compares Schmidt coefficients item by item for non-degenerate
/// eigenvalues, and as multisets inside degenerate eigenvalue blocks.
pub fn schmidt_gate(rep: &Representation, rep2: &Representation, tol: &ToleranceConfig) -> Result<GateOutcome> {
    check_dims(rep, rep2)?;
    if rep.eigenvalue_blocks != rep2.eigenvalue_blocks {
        return Ok(GateOutcome::NeedsFallback {
            reason: "eigenvalue clusters differ".into(),
        });
    }
    let t = tol.tol_modulus;
    for block in &rep.eigenvalue_blocks {
        if let [i] = block.as_slice() {
            let (a, b) = (padded_coefficients(rep, *i), padded_coefficients(rep2, *i));
            if !close(&a, &b, t) {
                return Ok(GateOutcome::Mismatch {
                    detail: format!("eigenvector {}: Schmidt coefficients {:?} vs {:?}", i + 1, a, b),
                });
            }
        } else {
            let sorted = |r: &Representation| {
                let mut v: Vec<Vec<f64>> = block.iter().map(|&i| padded_coefficients(r, i)).collect();
                v.sort_by(|x, y| x.iter().zip(y).map(|(p, q)| p.total_cmp(q)).find(|o| o.is_ne()).unwrap_or(core::cmp::Ordering::Equal));
                v
            };
            let (a, b) = (sorted(rep), sorted(rep2));
            if !a.iter().zip(&b).all(|(x, y)| close(x, y, t)) {
                return Ok(GateOutcome::NeedsFallback {
                    reason: format!("Schmidt data differ inside eigenvalue block {:?}", block),
                });
            }
        }
    }
    Ok(GateOutcome::Pass)
}

/// `||(U (x) V) rho (U (x) V)^dag - rho2||_F`.
pub fn verify_certificate(rho: &DensityMatrix, rho2: &DensityMatrix, lu: &LocalUnitary) -> Result<f64> {
    frobenius_distance(apply_local_unitary(rho, lu)?.matrix(), rho2.matrix())
}

fn certify(rho: &DensityMatrix, rho2: &DensityMatrix, lu: LocalUnitary, tol: &ToleranceConfig) -> Result<core::result::Result<Verdict, LocalUnitary>> {
    let residual = verify_certificate(rho, rho2, &lu)?;
    Ok(if residual < tol.tol_accept {
        Ok(Verdict::Equivalent {
            certificate: lu,
            residual,
        })
    } else {
        Err(lu)
    })
}

/// Decides whether `rho2 = (U (x) V) rho (U (x) V)^dag` for some local
/// unitaries.
pub fn decide_equivalence(rho: &DensityMatrix, rho2: &DensityMatrix, config: &DecisionConfig) -> Result<Verdict> {
    let tol = &config.tol;
    let rep = build_representation(rho, tol)?;
    let rep2 = build_representation(rho2, tol)?;
    decide_with_representations(rho, rho2, &rep, &rep2, config)
}

/// [`decide_equivalence`] with precomputed representations.
pub fn decide_with_representations(
    rho: &DensityMatrix,
    rho2: &DensityMatrix,
    rep: &Representation,
    rep2: &Representation,
    config: &DecisionConfig,
) -> Result<Verdict> {
    let tol = &config.tol;
    if let GateOutcome::Mismatch { detail } = spectral_gate(rep, rep2, tol)? {
        return Ok(Verdict::Inequivalent {
            witness: WitnessKind::SpectrumMismatch,
            detail,
        });
    }
    let mut seeds = Vec::new();
    let exact = match schmidt_gate(rep, rep2, tol)? {
        GateOutcome::Mismatch { detail } => {
            return Ok(Verdict::Inequivalent {
                witness: WitnessKind::SchmidtMismatch,
                detail,
            })
        }
        GateOutcome::NeedsFallback { .. } => None,
        GateOutcome::Pass => Some(solve_phase_alignment(rep, rep2, tol)),
    };
    match exact {
        Some(AlignmentOutcome::Solved(sol)) => match certify(rho, rho2, construct_certificate(rep, rep2, &sol)?, tol)? {
            Ok(v) => return Ok(v),
            Err(lu) => seeds.push(lu),
        },
        Some(AlignmentOutcome::ModulusMismatch { detail }) => {
            return Ok(Verdict::Inequivalent {
                witness: WitnessKind::ModulusMismatch,
                detail,
            })
        }
        Some(AlignmentOutcome::PhaseObstruction { residual }) => {
            return Ok(Verdict::Inequivalent {
                witness: WitnessKind::PhaseObstruction,
                detail: format!("phase equations violated by {:e}", residual),
            })
        }
        Some(AlignmentOutcome::NeedsFallback { .. }) | None => {}
    }

    // Degenerate stratum: align what is rigid, then let the optimizer fix
    // the rest.
    if seeds.is_empty() && !rep.degenerate_anchor && !rep2.degenerate_anchor && rep.rank() == rep2.rank() {
        let items: Vec<usize> = (0..rep.rank())
            .filter(|&i| rep.item_is_rigid(i) && rep2.item_is_rigid(i))
            .collect();
        if let AlignmentOutcome::Solved(sol) = solve_phase_alignment_on(rep, rep2, &items, tol) {
            match certify(rho, rho2, construct_certificate(rep, rep2, &sol)?, tol)? {
                Ok(v) => return Ok(v),
                Err(lu) => seeds.push(lu),
            }
        }
    }
    seeds.push(phase::naive_certificate(rep, rep2));
    seeds.push(LocalUnitary::identity(rho.dims()));
    Ok(optimize_alignment_from(rho, rho2, &seeds, config))
}

#[cfg(test)]
mod tests;

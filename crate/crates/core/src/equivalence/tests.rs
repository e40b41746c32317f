use super::*;
use crate::linalg::{ComplexMatrix, C64};
use crate::states::{
    random_density, random_local_unitary, werner, BipartiteDims, WernerParams,
};
use alloc::vec;
use alloc::vec::Vec;

fn dims(m: usize, n: usize) -> BipartiteDims {
    BipartiteDims::new(m, n).unwrap()
}

fn cfg() -> DecisionConfig {
    DecisionConfig::default()
}

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Rank-2 two-qubit state whose second eigenvector carries a relative
/// phase `alpha` that no local phase change can remove.
fn twisted(alpha: f64) -> DensityMatrix {
    let (mu1, mu2) = (0.8, 0.6);
    let (w, p) = (0.5, 0.6);
    let q = (1.0f64 - w * w - p * p).sqrt();
    let e1 = vec![r(mu1), r(0.0), r(0.0), r(mu2)];
    let e2 = vec![r(w * mu2), r(p), C64::from_polar(q, alpha), r(-w * mu1)];
    DensityMatrix::mixture(&[(0.7, e1), (0.3, e2)], dims(2, 2)).unwrap()
}

#[test]
fn self_is_equivalent() {
    let rho = random_density(dims(2, 3), 4, 1).unwrap();
    let v = decide_equivalence(&rho, &rho, &cfg()).unwrap();
    match v {
        Verdict::Equivalent { residual, certificate } => {
            assert!(residual < 1e-12);
            let id = LocalUnitary::identity(rho.dims());
            let shift = crate::linalg::frobenius_distance(&certificate.kron(), &id.kron()).unwrap();
            // Equal up to a global phase.
            let tr = certificate.kron().trace().norm() / 6.0;
            assert!(shift < 1e-8 || (tr - 1.0).abs() < 1e-8);
        }
        other => panic!("{:?}", other),
    }
}

#[test]
fn self_alignment_is_zero() {
    let rho = random_density(dims(3, 3), 5, 2).unwrap();
    let rep = build_representation(&rho, &ToleranceConfig::default()).unwrap();
    match solve_phase_alignment(&rep, &rep, &ToleranceConfig::default()) {
        AlignmentOutcome::Solved(sol) => {
            assert_eq!(sol.residual, 0.0);
            assert!(sol.phi_a.iter().chain(&sol.phi_b).chain(&sol.psi).all(|&x| x == 0.0));
        }
        other => panic!("{:?}", other),
    }
}

#[test]
fn random_orbit_pairs_align_exactly() {
    let tol = ToleranceConfig::default();
    for (k, (m, n)) in [(2, 2), (2, 3), (3, 3)].into_iter().enumerate() {
        for rank in 1..=m * n {
            let seed = (100 * k + rank) as u64;
            let rho = random_density(dims(m, n), rank, seed).unwrap();
            let lu = random_local_unitary(dims(m, n), seed + 7);
            let rho2 = apply_local_unitary(&rho, &lu).unwrap();
            let rep = build_representation(&rho, &tol).unwrap();
            let rep2 = build_representation(&rho2, &tol).unwrap();
            let sol = match solve_phase_alignment(&rep, &rep2, &tol) {
                AlignmentOutcome::Solved(s) => s,
                other => panic!("dims ({m},{n}) rank {rank}: {other:?}"),
            };
            let cert = construct_certificate(&rep, &rep2, &sol).unwrap();
            assert!(cert.u.orthonormality_defect() < 1e-10);
            assert!(cert.v.orthonormality_defect() < 1e-10);
            assert!(verify_certificate(&rho, &rho2, &cert).unwrap() < 1e-8);
        }
    }
}

#[test]
fn werner_orbit_pair() {
    let rho = werner(WernerParams::new(0.1, 0.2).unwrap()).unwrap();
    let rho2 = apply_local_unitary(&rho, &random_local_unitary(dims(2, 2), 3)).unwrap();
    match decide_equivalence(&rho, &rho2, &cfg()).unwrap() {
        Verdict::Equivalent { residual, .. } => assert!(residual < 1e-8),
        other => panic!("{:?}", other),
    }
}

#[test]
fn degenerate_werner_orbit_pair_uses_optimizer() {
    let rho = werner(WernerParams::new(0.0, 0.1).unwrap()).unwrap();
    let rho2 = apply_local_unitary(&rho, &random_local_unitary(dims(2, 2), 4)).unwrap();
    let v = optimize_alignment(&rho, &rho2, &cfg());
    match v {
        Verdict::Equivalent { residual, .. } => assert!(residual < 1e-8),
        other => panic!("{:?}", other),
    }
    assert!(decide_equivalence(&rho, &rho2, &cfg()).unwrap().is_equivalent());
}

#[test]
fn werner_spectra_differ() {
    let a = werner(WernerParams::new(0.1, 0.2).unwrap()).unwrap();
    let b = werner(WernerParams::new(0.2, 0.2).unwrap()).unwrap();
    let v = decide_equivalence(&a, &b, &cfg()).unwrap();
    assert_eq!(v.witness(), Some(WitnessKind::SpectrumMismatch));

    let tol = ToleranceConfig::default();
    let c = build_representation(&werner(WernerParams::new(0.0, 0.3).unwrap()).unwrap(), &tol).unwrap();
    let d = build_representation(&werner(WernerParams::new(0.0, 0.4).unwrap()).unwrap(), &tol).unwrap();
    assert!(matches!(spectral_gate(&c, &d, &tol).unwrap(), GateOutcome::Mismatch { .. }));
    assert_eq!(spectral_gate(&c, &c, &tol).unwrap(), GateOutcome::Pass);
}

#[test]
fn dims_mismatch_is_an_error() {
    let tol = ToleranceConfig::default();
    let a = build_representation(&random_density(dims(2, 2), 2, 1).unwrap(), &tol).unwrap();
    let b = build_representation(&random_density(dims(2, 3), 2, 1).unwrap(), &tol).unwrap();
    assert!(matches!(spectral_gate(&a, &b, &tol), Err(Error::DimsMismatch { .. })));
}

#[test]
fn conjugate_twist_is_obstructed() {
    let (a, b) = (twisted(0.7), twisted(-0.7));
    let tol = ToleranceConfig::default();
    let (ra, rb) = (build_representation(&a, &tol).unwrap(), build_representation(&b, &tol).unwrap());
    assert_eq!(spectral_gate(&ra, &rb, &tol).unwrap(), GateOutcome::Pass);
    assert_eq!(schmidt_gate(&ra, &rb, &tol).unwrap(), GateOutcome::Pass);
    assert!(matches!(solve_phase_alignment(&ra, &rb, &tol), AlignmentOutcome::PhaseObstruction { .. }));
    assert_eq!(
        decide_equivalence(&a, &b, &cfg()).unwrap().witness(),
        Some(WitnessKind::PhaseObstruction)
    );
    // The optimizer cannot map one onto the other either.
    match optimize_alignment(&a, &b, &cfg()) {
        Verdict::Undecided { best_residual, .. } => assert!(best_residual > 1e-3),
        other => panic!("{:?}", other),
    }
    // Same twist on both sides is fine.
    let c = apply_local_unitary(&a, &random_local_unitary(dims(2, 2), 5)).unwrap();
    assert!(decide_equivalence(&a, &c, &cfg()).unwrap().is_equivalent());
}

#[test]
fn verify_wrong_unitary_is_large() {
    let rho = random_density(dims(2, 3), 6, 11).unwrap();
    let lu = random_local_unitary(dims(2, 3), 12);
    let rho2 = apply_local_unitary(&rho, &lu).unwrap();
    assert!(verify_certificate(&rho, &rho2, &lu).unwrap() < 1e-12);
    let wrong = random_local_unitary(dims(2, 3), 13);
    assert!(verify_certificate(&rho, &rho2, &wrong).unwrap() > 1e-3);
}

#[test]
fn symmetric_classification() {
    let a = random_density(dims(2, 2), 3, 21).unwrap();
    let b = apply_local_unitary(&a, &random_local_unitary(dims(2, 2), 22)).unwrap();
    let c = random_density(dims(2, 2), 3, 23).unwrap();
    for (x, y) in [(&a, &b), (&a, &c)] {
        let f = decide_equivalence(x, y, &cfg()).unwrap();
        let g = decide_equivalence(y, x, &cfg()).unwrap();
        assert_eq!(f.is_equivalent(), g.is_equivalent());
        assert_eq!(f.is_inequivalent(), g.is_inequivalent());
    }
}

#[test]
fn orbit_dimensions() {
    let mm = DensityMatrix::maximally_mixed(dims(2, 3));
    assert_eq!(orbit_dimension(&mm, DEFAULT_ORBIT_TOL).unwrap(), 0);
    let generic = random_density(dims(2, 2), 4, 31).unwrap();
    assert_eq!(orbit_dimension(&generic, DEFAULT_ORBIT_TOL).unwrap(), 6);
    // Invariant under U (x) U: kernel is u(2) plus the extra phase.
    let w = werner(WernerParams::new(0.0, 0.3).unwrap()).unwrap();
    assert_eq!(orbit_dimension(&w, DEFAULT_ORBIT_TOL).unwrap(), 3);
}

#[test]
fn antihermitian_basis_is_independent() {
    let b = optimize::antihermitian_basis(3);
    assert_eq!(b.len(), 9);
    let cols: Vec<Vec<C64>> = b.iter().map(|m| m.as_slice().to_vec()).collect();
    let mat = ComplexMatrix::from_columns(9, &cols);
    let s = crate::linalg::svd(&mat, 1e-12).unwrap();
    assert!(s.singular_values.iter().all(|&x| x > 0.5));
    for m in &b {
        assert!(m.add(&m.adjoint()).unwrap().frobenius_norm() == 0.0);
    }
}

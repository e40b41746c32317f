//! The modified Werner state against hand-built members of its
//! representation class.

mod common;

use common::dims;
use lueq_core::equivalence::{
    decide_with_representations, solve_phase_alignment_on, AlignmentOutcome, DecisionConfig, Verdict,
};
use lueq_core::linalg::{frobenius_distance, ComplexMatrix, C64};
use lueq_core::representation::{build_representation, Representation, RepresentationItem};
use lueq_core::schmidt::SchmidtDecomposition;
use lueq_core::states::{werner, WernerParams};
use lueq_core::ToleranceConfig;

fn cis(t: f64) -> C64 {
    C64::from_polar(1.0, t)
}

fn item(basis: &ComplexMatrix, lambda: f64, mu: Vec<f64>, x: ComplexMatrix, y: ComplexMatrix) -> RepresentationItem {
    let blocks = if mu.len() == 2 && mu[0] == mu[1] {
        vec![vec![0, 1]]
    } else {
        (0..mu.len()).map(|s| vec![s]).collect()
    };
    RepresentationItem {
        eigenvalue: lambda,
        schmidt: SchmidtDecomposition {
            coefficients: mu,
            left_vectors: basis.matmul(&x).unwrap(),
            right_vectors: basis.matmul(&y).unwrap(),
            degeneracy_blocks: blocks,
        },
        x,
        y,
    }
}

/// Member of the class with the given angles, in the bases
/// `a_1 = b_1 = |1>`, `a_2 = b_2 = |0>`.
fn family_member(e: f64, f: f64, angles: [f64; 8]) -> Representation {
    let [th, th1, th2, ga, ga1, ga2, be, be1] = angles;
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let basis = ComplexMatrix::new(2, 2, vec![z, one, one, z]).unwrap();
    let m = |rows: usize, cols: usize, v: Vec<C64>| ComplexMatrix::new(rows, cols, v).unwrap();
    let items = vec![
        item(&basis, (1.0 + e - f) / 3.0, vec![1.0], m(2, 1, vec![one, z]), m(2, 1, vec![one, z])),
        item(
            &basis,
            (1.0 - f) / 3.0,
            vec![h, h],
            m(2, 2, vec![cis(th + th2), z, z, cis(th + th1)]),
            m(2, 2, vec![z, cis(-th1), cis(-th2), z]),
        ),
        item(&basis, (1.0 - e - f) / 3.0, vec![1.0], m(2, 1, vec![z, cis(be + be1)]), m(2, 1, vec![z, cis(-be1)])),
        item(
            &basis,
            f,
            vec![h, h],
            m(2, 2, vec![cis(ga + ga2), z, z, -cis(ga + ga1)]),
            m(2, 2, vec![z, cis(-ga1), cis(-ga2), z]),
        ),
    ];
    Representation {
        dims: dims(2, 2),
        items,
        basis_a: basis.clone(),
        basis_b: basis,
        eigenvalue_blocks: vec![vec![0], vec![1], vec![2], vec![3]],
        degenerate_anchor: false,
    }
}

const ANGLES: [[f64; 8]; 3] = [
    [0.0; 8],
    [0.3, -1.1, 2.0, 0.7, 0.1, -2.9, 1.4, -0.6],
    [3.0, 2.5, -0.4, -1.7, 1.2, 0.9, -3.1, 2.2],
];

#[test]
fn family_members_rebuild_the_state() {
    let (e, f) = (0.1, 0.2);
    let rho = werner(WernerParams::new(e, f).unwrap()).unwrap();
    for angles in ANGLES {
        let rep = family_member(e, f, angles);
        assert!(frobenius_distance(&rep.reconstruct(), rho.matrix()).unwrap() < 1e-15);
    }
}

#[test]
fn rigid_items_align_onto_family_members() {
    let (e, f) = (0.1, 0.2);
    let tol = ToleranceConfig::default();
    let rho = werner(WernerParams::new(e, f).unwrap()).unwrap();
    let rep = build_representation(&rho, &tol).unwrap();
    for angles in ANGLES {
        let member = family_member(e, f, angles);
        match solve_phase_alignment_on(&rep, &member, &[0, 2], &tol) {
            AlignmentOutcome::Solved(sol) => assert!(sol.residual < 1e-12),
            other => panic!("{:?}", other),
        }
        match decide_with_representations(&rho, &rho, &rep, &member, &DecisionConfig::default()).unwrap() {
            Verdict::Equivalent { residual, .. } => assert!(residual < 1e-8),
            other => panic!("{:?}", other),
        }
    }
}

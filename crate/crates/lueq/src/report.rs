//! Structured representation reports.

use lueq_core::linalg::{ComplexMatrix, C64};
use lueq_core::representation::{GaugeDescriptor, Representation};
use serde::{Deserialize, Serialize};

use crate::format::Parts;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemReport {
    pub eigenvalue: f64,
    pub schmidt_rank: usize,
    pub coefficients: Vec<f64>,
    pub schmidt_blocks: Vec<Vec<usize>>,
    pub x: Parts,
    pub y: Parts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemGaugeReport {
    pub item: usize,
    pub phases: usize,
    pub blocks: Vec<usize>,
    pub paired_constraints: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeReport {
    pub left_a_phases: usize,
    pub left_b_phases: usize,
    pub left_a_blocks: Vec<usize>,
    pub left_b_blocks: Vec<usize>,
    pub anchor_blocks: Vec<usize>,
    pub anchor_constraints: usize,
    pub per_item_phase: usize,
    pub schmidt_blocks: Vec<ItemGaugeReport>,
    pub eigen_blocks: Vec<usize>,
    pub is_torus: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentationReport {
    pub m: usize,
    pub n: usize,
    pub rank: usize,
    pub eigenvalues: Vec<f64>,
    pub eigenvalue_blocks: Vec<Vec<usize>>,
    pub degenerate_anchor: bool,
    pub basis_a: Parts,
    pub basis_b: Parts,
    pub items: Vec<ItemReport>,
    pub gauge: GaugeReport,
    pub free_parameter_count: usize,
}

impl RepresentationReport {
    pub fn new(rep: &Representation, gauge: &GaugeDescriptor) -> Self {
        let items = rep
            .items
            .iter()
            .map(|it| ItemReport {
                eigenvalue: it.eigenvalue,
                schmidt_rank: it.schmidt.rank(),
                coefficients: it.schmidt.coefficients.clone(),
                schmidt_blocks: it.schmidt.degeneracy_blocks.clone(),
                x: Parts::from_matrix(&it.x),
                y: Parts::from_matrix(&it.y),
            })
            .collect();
        let schmidt_blocks = gauge
            .schmidt_blocks
            .iter()
            .map(|g| ItemGaugeReport {
                item: g.item,
                phases: g.phases,
                blocks: g.blocks.clone(),
                paired_constraints: g.paired_constraints,
            })
            .collect();
        Self {
            m: rep.dims.m(),
            n: rep.dims.n(),
            rank: rep.rank(),
            eigenvalues: rep.eigenvalues(),
            eigenvalue_blocks: rep.eigenvalue_blocks.clone(),
            degenerate_anchor: rep.degenerate_anchor,
            basis_a: Parts::from_matrix(&rep.basis_a),
            basis_b: Parts::from_matrix(&rep.basis_b),
            items,
            gauge: GaugeReport {
                left_a_phases: gauge.left_a_phases,
                left_b_phases: gauge.left_b_phases,
                left_a_blocks: gauge.left_a_blocks.clone(),
                left_b_blocks: gauge.left_b_blocks.clone(),
                anchor_blocks: gauge.anchor_blocks.clone(),
                anchor_constraints: gauge.anchor_constraints,
                per_item_phase: gauge.per_item_phase,
                schmidt_blocks,
                eigen_blocks: gauge.eigen_blocks.clone(),
                is_torus: gauge.is_torus(),
            },
            free_parameter_count: gauge.free_parameter_count,
        }
    }

    /// `sum_i lambda_i |nu_i><nu_i|` with
    /// `nu_i = sum_s mu_s (A x_s) (x) (B y_s)`, using only the report's data.
    pub fn rebuild(&self) -> Result<ComplexMatrix, String> {
        let a = self.basis_a.to_matrix()?;
        let b = self.basis_b.to_matrix()?;
        let d = self.m * self.n;
        let mut rho = ComplexMatrix::zeros(d, d);
        for item in &self.items {
            let left = a.matmul(&item.x.to_matrix()?).map_err(|e| e.to_string())?;
            let right = b.matmul(&item.y.to_matrix()?).map_err(|e| e.to_string())?;
            let mut nu = vec![C64::new(0.0, 0.0); d];
            for (s, mu) in item.coefficients.iter().enumerate() {
                for i in 0..self.m {
                    for j in 0..self.n {
                        nu[i * self.n + j] += left[(i, s)] * right[(j, s)] * *mu;
                    }
                }
            }
            let proj = ComplexMatrix::from_fn(d, d, |r, c| nu[r] * nu[c].conj() * item.eigenvalue);
            rho = rho.add(&proj).map_err(|e| e.to_string())?;
        }
        Ok(rho)
    }
}

/// Every numerical threshold used by the representation and equivalence
/// pipeline, passed explicitly so runs are reproducible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Eigenvalues and Schmidt coefficients at or below this are zero; also
    /// the clustering width for Schmidt coefficients.
    pub tol_rank: f64,
    /// Clustering width for eigenvalues.
    pub tol_cluster: f64,
    /// Entries of `X_i`, `Y_i` (and their Gram products) below this modulus
    /// are structural zeros with no meaningful phase.
    pub tol_zero: f64,
    /// Allowed difference between gauge-invariant moduli.
    pub tol_modulus: f64,
    /// Allowed modulus-weighted phase inconsistency.
    pub tol_phase: f64,
    /// Certificate residual needed to declare equivalence.
    pub tol_accept: f64,
    /// Tolerance of the density-matrix invariants.
    pub tol_state: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            tol_rank: 1e-9,
            tol_cluster: 1e-8,
            tol_zero: 1e-10,
            tol_modulus: 1e-8,
            tol_phase: 1e-7,
            tol_accept: 1e-8,
            tol_state: 1e-10,
        }
    }
}

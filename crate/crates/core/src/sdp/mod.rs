//! Small dense block-structured semidefinite programming.
//!
//! Problems are stated in conic standard form over complex Hermitian
//! positive-semidefinite blocks:
//!
//! ```text
//!   minimize    sum_b <C_b, X_b>
//!   subject to  sum_b <A_(k,b), X_b> = h_k   for k = 1..m
//!               X_b >= 0                      for every block b
//! ```
//!
//! with the real Hilbert-Schmidt pairing `<A, B> = tr[A B]`. The solver is a
//! primal-dual interior-point method with Nesterov-Todd scaling and a
//! Mehrotra-style predictor-corrector; optimality is certified through the
//! duality gap and feasibility residuals carried on every [`SdpSolution`].

mod frontends;
mod solver;

pub use frontends::{
    min_trace_dist_over_sets, pe_min_sets, pe_min_states, PeMinSetsResult, TraceDistResult,
};
pub use solver::solve;

use crate::error::{Error, Result};
use crate::linalg::HermitianMatrix;

/// Largest admissible block dimension.
pub const MAX_BLOCK_DIM: usize = 64;
/// Largest admissible number of blocks.
pub const MAX_BLOCKS: usize = 8;
/// Default duality-gap tolerance.
pub const DEFAULT_GAP_TOL: f64 = 1e-8;
/// Feasibility residual tolerance for declaring optimality.
pub const FEAS_TOL: f64 = 1e-7;
/// Default iteration cap.
pub const DEFAULT_MAX_ITER: usize = 200;

/// One linear equality `sum_b <term_b, X_b> = rhs`.
#[derive(Debug, Clone)]
pub struct SdpConstraint {
    pub terms: Vec<(usize, HermitianMatrix)>,
    pub rhs: f64,
}

/// Block-structured SDP in conic standard form.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    block_dims: Vec<usize>,
    objective: Vec<HermitianMatrix>,
    constraints: Vec<SdpConstraint>,
}

impl SdpProblem {
    /// Fresh problem with the given PSD block dimensions and zero objective.
    pub fn new(block_dims: Vec<usize>) -> Self {
        let objective = block_dims
            .iter()
            .map(|&d| HermitianMatrix::zeros(d))
            .collect();
        Self {
            block_dims,
            objective,
            constraints: Vec::new(),
        }
    }

    /// Sets the objective coefficient on one block.
    pub fn set_objective(&mut self, block: usize, c: HermitianMatrix) {
        self.objective[block] = c;
    }

    pub fn add_constraint(&mut self, terms: Vec<(usize, HermitianMatrix)>, rhs: f64) {
        self.constraints.push(SdpConstraint { terms, rhs });
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn objective(&self) -> &[HermitianMatrix] {
        &self.objective
    }

    pub fn constraints(&self) -> &[SdpConstraint] {
        &self.constraints
    }

    /// Structural validation performed before solving.
    pub fn validate(&self) -> Result<()> {
        if self.block_dims.is_empty() {
            return Err(Error::InvalidInput("SDP needs at least one block".into()));
        }
        if self.block_dims.len() > MAX_BLOCKS {
            return Err(Error::InvalidInput(format!(
                "SDP has {} blocks, cap is {MAX_BLOCKS}",
                self.block_dims.len()
            )));
        }
        if let Some(&d) = self.block_dims.iter().find(|&&d| d == 0 || d > MAX_BLOCK_DIM) {
            return Err(Error::InvalidInput(format!(
                "block dimension {d} outside 1..={MAX_BLOCK_DIM}"
            )));
        }
        if self.constraints.is_empty() {
            return Err(Error::InvalidInput("SDP needs at least one equality".into()));
        }
        for (b, c) in self.objective.iter().enumerate() {
            if c.dim() != self.block_dims[b] {
                return Err(Error::DimensionMismatch {
                    expected: self.block_dims[b],
                    got: c.dim(),
                });
            }
        }
        for con in &self.constraints {
            if !con.rhs.is_finite() {
                return Err(Error::InvalidInput("non-finite right-hand side".into()));
            }
            for (b, a) in &con.terms {
                if *b >= self.block_dims.len() {
                    return Err(Error::InvalidInput(format!("block index {b} out of range")));
                }
                if a.dim() != self.block_dims[*b] {
                    return Err(Error::DimensionMismatch {
                        expected: self.block_dims[*b],
                        got: a.dim(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Solver outcome classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    /// Gap and feasibility residuals within tolerance.
    Optimal,
    /// Iteration cap reached; best iterate returned.
    MaxIterations,
    /// Divergence of the iterates suggests an infeasible or unbounded
    /// problem. Best-effort detection, not a certificate.
    InfeasibleSuspected,
}

/// Primal-dual solution with its optimality certificate.
#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub primal_blocks: Vec<HermitianMatrix>,
    pub dual_multipliers: Vec<f64>,
    /// Dual slack blocks `Z_b = C_b - sum_k y_k A_(k,b)` at the returned iterate.
    pub dual_slacks: Vec<HermitianMatrix>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// Scale-normalized duality gap `|p - d| / (1 + |p| + |d|)`.
    pub gap: f64,
    /// Equality residual `max_k |h_k - <A_k, X>| / (1 + max_k |h_k|)`.
    pub primal_residual: f64,
    /// Dual slack residual `max_b ||C_b - Z_b - sum_k y_k A_(k,b)||_F`,
    /// normalized by `1 + max_b ||C_b||_F`.
    pub dual_residual: f64,
    pub iterations: usize,
    pub status: SdpStatus,
}

impl SdpSolution {
    /// True when the solution certifies optimality at `gap_tol`.
    pub fn is_optimal(&self) -> bool {
        self.status == SdpStatus::Optimal
    }
}

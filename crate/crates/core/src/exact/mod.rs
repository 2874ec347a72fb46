//! Exact linear algebra and linear programming over any [`Scalar`](crate::Scalar).

mod l1;
mod lp;
mod matrix;
mod subspace;

pub use l1::{l1_min_affine, l1_min_value, probe_optimal_face, FaceProbe, L1Outcome, L1Solution};
pub use lp::{lp_solve_exact, LpOutcome, LpProblem, VarBound};
pub use matrix::Matrix;
pub use subspace::Subspace;

/// Rank of `m`.
pub fn rank_exact<T: crate::Scalar>(m: &Matrix<T>) -> usize {
    m.rank()
}

/// Basis of `{x : m x = 0}`.
pub fn null_space_basis<T: crate::Scalar>(m: &Matrix<T>) -> Subspace<T> {
    m.null_space()
}

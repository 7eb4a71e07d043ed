//! Quaternion and 2x2 quaternionic matrix arithmetic: the substrate for `Sp(2)` and `sp(2)`.

mod group;
mod matrix;
mod quaternion;

pub use group::{
    AlgebraVector, GroupPoint, RETRACTABLE_DEFECT, SKEW_TOL, UNITARITY_TOL, exp_matrix, mat_exp,
    newton_polar_step,
};
pub(crate) use group::check_unit;
pub use matrix::{QuatMat2, trace_inner};
pub use quaternion::{Quaternion, quat_mul};

/// `A*`, entry `(r, s)` of the result is the conjugate of entry `(s, r)` of `A`.
pub fn conj_transpose(a: &QuatMat2) -> QuatMat2 {
    a.conj_transpose()
}

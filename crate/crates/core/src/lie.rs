//! The Lie algebra `sp(2)`, its subalgebras `h`, `k`, `d`, and the partitioned orthonormal frame.
//!
//! The frame is ordered so that the three blocks of the partition are contiguous:
//!
//! | indices | span                                   | role                      |
//! |---------|----------------------------------------|---------------------------|
//! | 0..4    | `E(q)/√2`, `E(q) = [[0, q], [−q̄, 0]]`  | `h⊥`, horizontal for `H`  |
//! | 4..7    | `diag(0, i)`, `diag(0, j)`, `diag(0, k)` | `h ⊖ k`                 |
//! | 7..10   | `diag(i, 0)`, `diag(j, 0)`, `diag(k, 0)` | `k`, vertical for `K`   |
//!
//! So `h = span(4..10)` and `k⊥ = span(0..7)`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::{AlgebraVector, GroupPoint, QuatMat2, Quaternion};

pub const ALGEBRA_DIM: usize = 10;

/// Indices of the frame spanning `h⊥` (the `D_H` block).
pub const HORIZONTAL_H: Range<usize> = 0..4;
/// Indices of the frame spanning `h ⊖ k` (the `D_K ∖ D_H` block).
pub const MIDDLE: Range<usize> = 4..7;
/// Indices of the frame spanning `k` (the `V_K` block).
pub const VERTICAL_K: Range<usize> = 7..10;
/// Indices spanning `k⊥` (the `D_K` block).
pub const HORIZONTAL_K: Range<usize> = 0..7;
/// Indices spanning `h` (the `V_H` block).
pub const VERTICAL_H: Range<usize> = 4..10;

/// The distinguished subalgebras of `sp(2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubalgebraId {
    /// Diagonal matrices, `sp(1) × sp(1)`.
    H,
    /// `diag(Im H, 0)`.
    K,
    /// `diag(ξ, ξ)`, the diagonal copy of `sp(1)`.
    Delta,
}

impl SubalgebraId {
    pub fn dim(self) -> usize {
        3 * match self {
            Self::H => 2,
            Self::K | Self::Delta => 1,
        }
    }
}

/// A subalgebra or its trace-orthogonal complement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subspace {
    Sub(SubalgebraId),
    Complement(SubalgebraId),
}

impl Subspace {
    pub fn complement(self) -> Self {
        match self {
            Self::Sub(s) => Self::Complement(s),
            Self::Complement(s) => Self::Sub(s),
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Self::Sub(s) => s.dim(),
            Self::Complement(s) => ALGEBRA_DIM - s.dim(),
        }
    }
}

/// An ordered orthonormal basis of `sp(2)` with the `(4, 3, 3)` partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<AlgebraVector>", into = "Vec<AlgebraVector>")]
pub struct FramedAlgebra {
    basis: [AlgebraVector; ALGEBRA_DIM],
}

impl FramedAlgebra {
    pub fn basis(&self) -> &[AlgebraVector; ALGEBRA_DIM] {
        &self.basis
    }

    pub fn get(&self, index: usize) -> &AlgebraVector {
        &self.basis[index]
    }

    /// Block sizes `(D_H, D_K ∖ D_H, V_K)`.
    pub fn partition(&self) -> (usize, usize, usize) {
        (HORIZONTAL_H.len(), MIDDLE.len(), VERTICAL_K.len())
    }

    /// Components of `u` in this frame.
    pub fn coords(&self, u: &AlgebraVector) -> [f64; ALGEBRA_DIM] {
        std::array::from_fn(|a| self.basis[a].inner(u))
    }

    /// `Σ c_a e_a`. Shorter slices fill the leading components.
    pub fn combine(&self, coeffs: &[f64]) -> AlgebraVector {
        coeffs
            .iter()
            .zip(&self.basis)
            .fold(AlgebraVector::zero(), |acc, (c, e)| acc + e.scale(*c))
    }

    /// Gram matrix of the basis under the trace inner product.
    pub fn gram(&self) -> [[f64; ALGEBRA_DIM]; ALGEBRA_DIM] {
        std::array::from_fn(|a| std::array::from_fn(|b| self.basis[a].inner(&self.basis[b])))
    }
}

impl TryFrom<Vec<AlgebraVector>> for FramedAlgebra {
    type Error = Error;

    fn try_from(v: Vec<AlgebraVector>) -> Result<Self> {
        let basis: [AlgebraVector; ALGEBRA_DIM] =
            v.try_into().map_err(|v: Vec<AlgebraVector>| Error::ComponentCount {
                expected: ALGEBRA_DIM,
                got: v.len(),
            })?;
        let frame = Self { basis };
        let gram = frame.gram();
        let defect = (0..ALGEBRA_DIM)
            .flat_map(|a| (0..ALGEBRA_DIM).map(move |b| (a, b)))
            .map(|(a, b)| (gram[a][b] - f64::from(u8::from(a == b))).abs())
            .fold(0.0, f64::max);
        if defect > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "frame is not orthonormal (defect {defect:.3e})"
            )));
        }
        Ok(frame)
    }
}

impl From<FramedAlgebra> for Vec<AlgebraVector> {
    fn from(f: FramedAlgebra) -> Self {
        f.basis.to_vec()
    }
}

/// The canonical partitioned orthonormal basis of `sp(2)`.
pub fn standard_frame() -> FramedAlgebra {
    use Quaternion as H;
    let off = |q: H| AlgebraVector::off_diagonal(q).scale(FRAC_1_SQRT_2);
    let lower = |q: H| AlgebraVector::diag(H::ZERO, q);
    let upper = |q: H| AlgebraVector::diag(q, H::ZERO);
    FramedAlgebra {
        basis: [
            off(H::ONE),
            off(H::I),
            off(H::J),
            off(H::K),
            lower(H::I),
            lower(H::J),
            lower(H::K),
            upper(H::I),
            upper(H::J),
            upper(H::K),
        ],
    }
}

/// `[u, v] = uv − vu`.
pub fn bracket(u: &AlgebraVector, v: &AlgebraVector) -> AlgebraVector {
    let (u, v) = (u.matrix(), v.matrix());
    AlgebraVector::skew_part(&(*u * *v - *v * *u))
}

/// `Ad_Q u = Q u Q*`.
pub fn adjoint(q: &GroupPoint, u: &AlgebraVector) -> AlgebraVector {
    let m = q.matrix();
    AlgebraVector::skew_part(&(*m * *u.matrix() * m.conj_transpose()))
}

/// Trace-orthogonal projection onto a subalgebra or its complement.
pub fn project(u: &AlgebraVector, s: Subspace) -> AlgebraVector {
    let m = u.matrix();
    let onto = |id: SubalgebraId| match id {
        SubalgebraId::H => AlgebraVector::diag(m.a, m.d),
        SubalgebraId::K => AlgebraVector::diag(m.a, Quaternion::ZERO),
        SubalgebraId::Delta => {
            let mean = (m.a + m.d).scale(0.5);
            AlgebraVector::diag(mean, mean)
        }
    };
    match s {
        Subspace::Sub(id) => onto(id),
        Subspace::Complement(id) => *u - onto(id),
    }
}

/// Orthonormal basis of `d = { diag(ξ, ξ) }`, over `ξ ∈ {i, j, k}`.
pub fn delta_basis() -> [AlgebraVector; 3] {
    Quaternion::IMAGINARY_BASIS.map(|q| AlgebraVector::diag(q, q).scale(FRAC_1_SQRT_2))
}

/// Coordinates of a matrix in `M(2, H)` that is not assumed skew: the frame components
/// of its skew part.
pub fn skew_coords(frame: &FramedAlgebra, m: &QuatMat2) -> [f64; ALGEBRA_DIM] {
    frame.coords(&AlgebraVector::skew_part(m))
}

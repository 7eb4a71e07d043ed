use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::{QuatMat2, Quaternion, trace_inner};
use crate::error::{Error, Result};

/// Largest `‖Q*Q − I‖_F` a [`GroupPoint`] may carry.
pub const UNITARITY_TOL: f64 = 1e-9;

/// Largest defect accepted by [`GroupPoint::new`] before retraction.
pub const RETRACTABLE_DEFECT: f64 = 1e-4;

/// Largest `‖u + u*‖_F` accepted by [`AlgebraVector::new`].
pub const SKEW_TOL: f64 = 1e-9;

/// An element of `Sp(2) = { Q ∈ M(2, H) : Q*Q = QQ* = I }`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QuatMat2", into = "QuatMat2")]
pub struct GroupPoint(QuatMat2);

impl GroupPoint {
    pub fn identity() -> Self {
        Self(QuatMat2::IDENTITY)
    }

    /// Accepts a matrix close to `Sp(2)` and polishes it onto the group.
    pub fn new(m: QuatMat2) -> Result<Self> {
        let mut defect = m.unitarity_defect();
        if !defect.is_finite() || defect > RETRACTABLE_DEFECT {
            return Err(Error::NotUnitary(defect));
        }
        let mut q = m;
        for _ in 0..4 {
            if defect <= 1e-14 {
                break;
            }
            q = newton_polar_step(&q);
            defect = q.unitarity_defect();
        }
        if defect > UNITARITY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self(q))
    }

    /// Wraps `m` after a single Newton polar step, without validation.
    ///
    /// Callers guarantee `m` is within round-off of the group.
    pub(crate) fn retracted(m: QuatMat2) -> Self {
        Self(newton_polar_step(&m))
    }

    /// Wraps `m` as is. Only for exercising corrupted-state diagnostics.
    pub(crate) fn unchecked(m: QuatMat2) -> Self {
        Self(m)
    }

    /// `diag(p, q)`; both entries must be unit quaternions.
    pub fn diag(p: Quaternion, q: Quaternion) -> Result<Self> {
        check_unit(p)?;
        check_unit(q)?;
        Ok(Self(QuatMat2::diag(p, q)))
    }

    pub fn matrix(&self) -> &QuatMat2 {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.conj_transpose())
    }

    /// Group product, retracted onto `Sp(2)`.
    pub fn compose(&self, other: &Self) -> Self {
        Self::retracted(self.0 * other.0)
    }

    /// `Q · u`, the left-translated tangent vector at `Q`.
    pub fn translate(&self, u: &AlgebraVector) -> QuatMat2 {
        self.0 * u.0
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.0.unitarity_defect()
    }

    /// Frobenius distance between the matrices.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.0 - other.0).norm()
    }
}

impl TryFrom<QuatMat2> for GroupPoint {
    type Error = Error;
    fn try_from(m: QuatMat2) -> Result<Self> {
        Self::new(m)
    }
}

impl From<GroupPoint> for QuatMat2 {
    fn from(g: GroupPoint) -> Self {
        g.0
    }
}

pub(crate) fn check_unit(q: Quaternion) -> Result<()> {
    let n = q.norm();
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::NonUnitParameter(n));
    }
    Ok(())
}

/// One Newton step toward the polar factor: `Q ← ½ Q (3I − Q*Q)`.
pub fn newton_polar_step(q: &QuatMat2) -> QuatMat2 {
    let qtq = q.conj_transpose() * *q;
    (*q * (QuatMat2::IDENTITY.scale(3.0) - qtq)).scale(0.5)
}

/// An element of `sp(2)`: a skew-Hermitian quaternionic 2x2 matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QuatMat2", into = "QuatMat2")]
pub struct AlgebraVector(QuatMat2);

impl AlgebraVector {
    pub fn zero() -> Self {
        Self(QuatMat2::ZERO)
    }

    pub fn new(m: QuatMat2) -> Result<Self> {
        let defect = m.skew_defect();
        if !defect.is_finite() || defect > SKEW_TOL * m.norm().max(1.0) {
            return Err(Error::NotSkewHermitian(defect));
        }
        Ok(Self::skew_part(&m))
    }

    /// `(m − m*) / 2`, the orthogonal projection of `M(2, H)` onto `sp(2)`.
    pub fn skew_part(m: &QuatMat2) -> Self {
        Self((*m - m.conj_transpose()).scale(0.5))
    }

    /// `diag(p, q)` with `p, q` purely imaginary (real parts are discarded).
    pub fn diag(p: Quaternion, q: Quaternion) -> Self {
        Self(QuatMat2::diag(p.im(), q.im()))
    }

    /// `[[0, q], [−q̄, 0]]`.
    pub fn off_diagonal(q: Quaternion) -> Self {
        Self(QuatMat2::new(
            Quaternion::ZERO,
            q,
            -q.conj(),
            Quaternion::ZERO,
        ))
    }

    pub fn matrix(&self) -> &QuatMat2 {
        &self.0
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    pub fn inner(&self, other: &Self) -> f64 {
        trace_inner(&self.0, &other.0)
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

impl TryFrom<QuatMat2> for AlgebraVector {
    type Error = Error;
    fn try_from(m: QuatMat2) -> Result<Self> {
        Self::new(m)
    }
}

impl From<AlgebraVector> for QuatMat2 {
    fn from(u: AlgebraVector) -> Self {
        u.0
    }
}

impl Add for AlgebraVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self(self.0 + o.0)
    }
}

impl Sub for AlgebraVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self(self.0 - o.0)
    }
}

impl Neg for AlgebraVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl Mul<f64> for AlgebraVector {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

/// Matrix exponential of an arbitrary quaternionic 2x2 matrix by scaling and squaring.
pub fn exp_matrix(m: &QuatMat2) -> QuatMat2 {
    let norm = m.norm();
    let mut squarings = 0u32;
    let mut scaled = norm;
    while scaled >= 0.5 {
        scaled *= 0.5;
        squarings += 1;
    }
    let x = m.scale(0.5f64.powi(squarings as i32));

    let mut sum = QuatMat2::IDENTITY;
    let mut term = QuatMat2::IDENTITY;
    for k in 1..=30 {
        term = (term * x).scale(1.0 / k as f64);
        sum = sum + term;
        if term.norm() <= f64::EPSILON * 1e-2 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// Group exponential `sp(2) → Sp(2)`, retracted once onto the group.
pub fn mat_exp(u: &AlgebraVector) -> GroupPoint {
    GroupPoint::retracted(exp_matrix(u.matrix()))
}

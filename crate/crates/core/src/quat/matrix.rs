use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::Quaternion;

/// A 2x2 matrix with quaternion entries, stored row-major as `[[a, b], [c, d]]`.
///
/// Serialized as the array `[a, b, c, d]` of quaternions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[Quaternion; 4]", into = "[Quaternion; 4]")]
pub struct QuatMat2 {
    pub a: Quaternion,
    pub b: Quaternion,
    pub c: Quaternion,
    pub d: Quaternion,
}

impl QuatMat2 {
    pub const ZERO: Self = Self::new(
        Quaternion::ZERO,
        Quaternion::ZERO,
        Quaternion::ZERO,
        Quaternion::ZERO,
    );
    pub const IDENTITY: Self = Self::diag(Quaternion::ONE, Quaternion::ONE);

    pub const fn new(a: Quaternion, b: Quaternion, c: Quaternion, d: Quaternion) -> Self {
        Self { a, b, c, d }
    }

    pub const fn diag(a: Quaternion, d: Quaternion) -> Self {
        Self::new(a, Quaternion::ZERO, Quaternion::ZERO, d)
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> [Quaternion; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn from_entries(e: [Quaternion; 4]) -> Self {
        Self::new(e[0], e[1], e[2], e[3])
    }

    /// The 16 real components, entry by entry in row-major order, each as `w, x, y, z`.
    pub fn to_reals(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        for (k, q) in self.entries().iter().enumerate() {
            out[4 * k..4 * k + 4].copy_from_slice(&q.to_array());
        }
        out
    }

    pub fn from_reals(r: &[f64; 16]) -> Self {
        let q = |k: usize| Quaternion::new(r[4 * k], r[4 * k + 1], r[4 * k + 2], r[4 * k + 3]);
        Self::new(q(0), q(1), q(2), q(3))
    }

    /// Transpose quaternion-conjugate `A*`.
    pub fn conj_transpose(&self) -> Self {
        Self::new(self.a.conj(), self.c.conj(), self.b.conj(), self.d.conj())
    }

    pub fn trace(&self) -> Quaternion {
        self.a + self.d
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    /// Left multiplication of every entry by a quaternion scalar.
    pub fn left_scalar(&self, q: Quaternion) -> Self {
        Self::new(q * self.a, q * self.b, q * self.c, q * self.d)
    }

    /// First column `(a, c)`.
    pub fn first_column(&self) -> (Quaternion, Quaternion) {
        (self.a, self.c)
    }

    /// Second column `(b, d)`.
    pub fn second_column(&self) -> (Quaternion, Quaternion) {
        (self.b, self.d)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries().iter().map(|q| q.norm_sqr()).sum()
    }

    /// Frobenius norm, the norm induced by [`trace_inner`].
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `‖A*A − I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.conj_transpose() * *self - Self::IDENTITY).norm()
    }

    /// `‖A + A*‖_F`.
    pub fn skew_defect(&self) -> f64 {
        (*self + self.conj_transpose()).norm()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries()
            .iter()
            .zip(other.entries())
            .fold(0.0_f64, |m, (p, q)| m.max(p.max_abs_diff(q)))
    }
}

impl Add for QuatMat2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for QuatMat2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Neg for QuatMat2 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul for QuatMat2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl Mul<f64> for QuatMat2 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

impl From<[Quaternion; 4]> for QuatMat2 {
    fn from(e: [Quaternion; 4]) -> Self {
        Self::from_entries(e)
    }
}

impl From<QuatMat2> for [Quaternion; 4] {
    fn from(m: QuatMat2) -> Self {
        m.entries()
    }
}

/// `Re tr(A B*)`.
///
/// Equal to the Euclidean inner product of the 16 real components.
pub fn trace_inner(u: &QuatMat2, v: &QuatMat2) -> f64 {
    (*u * v.conj_transpose()).trace().re()
}

#[cfg(test)]
mod tests {
    use super::*;
    use Quaternion as H;

    fn sample() -> QuatMat2 {
        QuatMat2::new(
            H::new(0.1, 0.2, -0.3, 0.4),
            H::new(-1.0, 0.5, 0.0, 0.25),
            H::new(0.7, -0.7, 0.1, 0.0),
            H::new(0.0, 0.3, 0.9, -0.2),
        )
    }

    #[test]
    fn conj_transpose_examples() {
        assert_eq!(QuatMat2::IDENTITY.conj_transpose(), QuatMat2::IDENTITY);
        let m = QuatMat2::diag(H::I, H::ZERO);
        assert_eq!(m.conj_transpose(), QuatMat2::diag(-H::I, H::ZERO));
        let s = QuatMat2::new(H::ZERO, H::ONE, -H::ONE, H::ZERO);
        assert_eq!(
            s.conj_transpose(),
            QuatMat2::new(H::ZERO, -H::ONE, H::ONE, H::ZERO)
        );
    }

    #[test]
    fn trace_inner_examples() {
        let di = QuatMat2::diag(H::I, H::ZERO);
        let dj = QuatMat2::diag(H::J, H::ZERO);
        let e = QuatMat2::new(H::ZERO, H::ONE, -H::ONE, H::ZERO);
        assert_eq!(trace_inner(&di, &di), 1.0);
        assert_eq!(trace_inner(&e, &e), 2.0);
        assert_eq!(trace_inner(&di, &dj), 0.0);
    }

    #[test]
    fn trace_inner_is_real_dot_product() {
        let u = sample();
        let v = sample().conj_transpose() * sample();
        let dot: f64 = u.to_reals().iter().zip(v.to_reals()).map(|(p, q)| p * q).sum();
        assert!((trace_inner(&u, &v) - dot).abs() < 1e-14);
    }

    #[test]
    fn reals_round_trip() {
        let m = sample();
        assert_eq!(QuatMat2::from_reals(&m.to_reals()), m);
    }
}

//! Oracles that share no arithmetic with the library: quaternions embedded as 2x2 complex
//! matrices, `2x2` quaternionic matrices as `4x4` complex ones.
#![allow(dead_code)]

use nalgebra::{Complex, Matrix2, Matrix4};
use sp2geo::quat::{QuatMat2, Quaternion};

type C = Complex<f64>;

/// `w + xi + yj + zk = (w + xi) + (y + zi)j ↦ [[z1, z2], [−z̄2, z̄1]]`.
pub fn embed_quat(q: Quaternion) -> Matrix2<C> {
    let [w, x, y, z] = q.to_array();
    let (z1, z2) = (C::new(w, x), C::new(y, z));
    Matrix2::new(z1, z2, -z2.conj(), z1.conj())
}

pub fn embed(m: &QuatMat2) -> Matrix4<C> {
    let e = m.entries();
    let mut out = Matrix4::zeros();
    for (k, q) in e.iter().enumerate() {
        let (r, c) = (2 * (k / 2), 2 * (k % 2));
        out.fixed_view_mut::<2, 2>(r, c).copy_from(&embed_quat(*q));
    }
    out
}

/// `Σ_{k<terms} m^k / k!` in complex arithmetic.
pub fn exp_series(m: &QuatMat2, terms: usize) -> Matrix4<C> {
    let a = embed(m);
    let mut term = Matrix4::<C>::identity();
    let mut sum = term;
    for k in 1..terms {
        term = term * a / C::new(k as f64, 0.0);
        sum += term;
    }
    sum
}

pub fn max_entry(m: &Matrix4<C>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// `|p|` from the embedding: `det` of the complex block is `|p|²`.
pub fn oracle_norm(q: Quaternion) -> f64 {
    embed_quat(q).determinant().re.sqrt()
}

pub fn oracle_product(p: Quaternion, q: Quaternion) -> Matrix2<C> {
    embed_quat(p) * embed_quat(q)
}

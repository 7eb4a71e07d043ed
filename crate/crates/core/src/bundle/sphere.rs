//! Geometry of `S^7 ⊂ H^2` and `S^4 ⊂ H × R` in ambient coordinates.
//!
//! A vector in `R^8` is the pair `(b, d)` of quaternions, each as `w, x, y, z`.
//! At `x ∈ S^7` the tangent space splits Euclidean-orthogonally into the fibre
//! directions `x·Im H` (vertical for the quaternionic Hopf map) and the quaternionic
//! complement of the line `x·H` (horizontal).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::quat::Quaternion;

pub type Ambient8 = [f64; 8];
pub type Ambient5 = [f64; 5];

/// Largest `| |x|² − 1 |` accepted for a sphere point.
pub const SPHERE_TOL: f64 = 1e-10;

/// A point `(b, d)` of `S^7 = { |b|² + |d|² = 1 }`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[Quaternion; 2]", into = "[Quaternion; 2]")]
pub struct SpherePoint7 {
    b: Quaternion,
    d: Quaternion,
}

impl SpherePoint7 {
    pub fn new(b: Quaternion, d: Quaternion) -> Result<Self> {
        let defect = (b.norm_sqr() + d.norm_sqr() - 1.0).abs();
        if !defect.is_finite() || defect > SPHERE_TOL {
            return Err(Error::NotOnSphere(defect));
        }
        Ok(Self { b, d })
    }

    /// Rescales a nonzero vector onto the sphere.
    pub fn normalize(v: &Ambient8) -> Result<Self> {
        let n = linalg::norm(v);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::NotOnSphere(f64::INFINITY));
        }
        let (b, d) = split(v);
        Ok(Self {
            b: b.scale(1.0 / n),
            d: d.scale(1.0 / n),
        })
    }

    pub fn from_reals(v: &Ambient8) -> Result<Self> {
        let (b, d) = split(v);
        Self::new(b, d)
    }

    pub(crate) fn unchecked(b: Quaternion, d: Quaternion) -> Self {
        Self { b, d }
    }

    pub fn b(&self) -> Quaternion {
        self.b
    }

    pub fn d(&self) -> Quaternion {
        self.d
    }

    pub fn to_reals(&self) -> Ambient8 {
        join(self.b, self.d)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        linalg::norm(&sub8(&self.to_reals(), &other.to_reals()))
    }
}

impl TryFrom<[Quaternion; 2]> for SpherePoint7 {
    type Error = Error;
    fn try_from(q: [Quaternion; 2]) -> Result<Self> {
        Self::new(q[0], q[1])
    }
}

impl From<SpherePoint7> for [Quaternion; 2] {
    fn from(p: SpherePoint7) -> Self {
        [p.b, p.d]
    }
}

/// A point `(q, x)` of `S^4 = { |q|² + x² = 1 }`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint4 {
    pub q: Quaternion,
    pub x: f64,
}

impl SpherePoint4 {
    pub fn new(q: Quaternion, x: f64) -> Result<Self> {
        let defect = (q.norm_sqr() + x * x - 1.0).abs();
        if !defect.is_finite() || defect > SPHERE_TOL {
            return Err(Error::NotOnSphere(defect));
        }
        Ok(Self { q, x })
    }

    pub fn to_reals(&self) -> Ambient5 {
        let q = self.q.to_array();
        [q[0], q[1], q[2], q[3], self.x]
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let (a, b) = (self.to_reals(), other.to_reals());
        a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
    }
}

pub fn split(v: &Ambient8) -> (Quaternion, Quaternion) {
    (
        Quaternion::new(v[0], v[1], v[2], v[3]),
        Quaternion::new(v[4], v[5], v[6], v[7]),
    )
}

pub fn join(b: Quaternion, d: Quaternion) -> Ambient8 {
    let (b, d) = (b.to_array(), d.to_array());
    [b[0], b[1], b[2], b[3], d[0], d[1], d[2], d[3]]
}

pub fn add8(a: &Ambient8, b: &Ambient8) -> Ambient8 {
    std::array::from_fn(|k| a[k] + b[k])
}

pub fn sub8(a: &Ambient8, b: &Ambient8) -> Ambient8 {
    std::array::from_fn(|k| a[k] - b[k])
}

pub fn scale8(a: &Ambient8, s: f64) -> Ambient8 {
    a.map(|v| v * s)
}

/// Quaternionic Hermitian product `x* v = b̄ v₁ + d̄ v₂`.
pub fn hermitian(x: &Ambient8, v: &Ambient8) -> Quaternion {
    let (b, d) = split(x);
    let (v1, v2) = split(v);
    b.conj() * v1 + d.conj() * v2
}

/// Right scalar multiplication `x · q`.
pub fn right_mul(x: &Ambient8, q: Quaternion) -> Ambient8 {
    let (b, d) = split(x);
    join(b * q, d * q)
}

/// Euclidean projection onto the quaternionic complement of the line `x·H`.
///
/// Homogeneous of degree zero in `x`.
pub fn project_horizontal(x: &Ambient8, v: &Ambient8) -> Ambient8 {
    let r2 = linalg::dot(x, x);
    sub8(v, &right_mul(x, hermitian(x, v).scale(1.0 / r2)))
}

/// Euclidean projection onto the fibre directions `x·Im H`.
pub fn project_vertical(x: &Ambient8, v: &Ambient8) -> Ambient8 {
    let r2 = linalg::dot(x, x);
    right_mul(x, hermitian(x, v).im().scale(1.0 / r2))
}

/// The metric on `S^7` that makes `dπ_K` an isometry on `D_K`: twice the Euclidean
/// metric on horizontal vectors, the Euclidean metric on fibre directions.
pub fn metric_down(x: &Ambient8, v: &Ambient8, w: &Ambient8) -> f64 {
    2.0 * linalg::dot(&project_horizontal(x, v), &project_horizontal(x, w))
        + linalg::dot(&project_vertical(x, v), &project_vertical(x, w))
}

/// The metric on `S^4` induced through `π_H` from horizontal vectors: half the round metric.
pub fn metric_base(a: &Ambient5, b: &Ambient5) -> f64 {
    0.5 * a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>()
}

/// The quaternionic Hopf map `(b, d) ↦ (2 d b̄, |b|² − |d|²)`.
pub fn pi_hopf(n: &SpherePoint7) -> SpherePoint4 {
    let (b, d) = (n.b, n.d);
    SpherePoint4 {
        q: (d * b.conj()).scale(2.0),
        x: b.norm_sqr() - d.norm_sqr(),
    }
}

/// Differential of the Hopf map at `n` applied to the ambient vector `v`.
pub fn dpi_hopf(n: &SpherePoint7, v: &Ambient8) -> Ambient5 {
    let (b, d) = (n.b, n.d);
    let (db, dd) = split(v);
    let q = (dd * b.conj() + d * db.conj()).scale(2.0);
    let x = 2.0 * (b.dot(db) - d.dot(dd));
    let q = q.to_array();
    [q[0], q[1], q[2], q[3], x]
}

/// Orthonormal basis of `T_n S^7` in ambient coordinates.
pub fn tangent_basis(n: &SpherePoint7) -> Vec<Ambient8> {
    let mut basis = vec![n.to_reals().to_vec()];
    let unit: Vec<Vec<f64>> = (0..8)
        .map(|k| (0..8).map(|c| f64::from(u8::from(c == k))).collect())
        .collect();
    linalg::extend_orthonormal(&mut basis, &unit, 1e-8);
    basis
        .into_iter()
        .skip(1)
        .map(|v| v.try_into().expect("length 8"))
        .collect()
}

/// Orthonormal basis of `ker dπ` at `n`, computed from the Jacobian of the Hopf map.
pub fn hopf_kernel(n: &SpherePoint7) -> Vec<Ambient8> {
    let tangent = tangent_basis(n);
    let jac = tangent.iter().map(|t| dpi_hopf(n, t)).collect::<Vec<_>>();
    // Rows of the 5x7 matrix: output component r against tangent basis vector c.
    let rows: Vec<Vec<f64>> = (0..5).map(|r| jac.iter().map(|col| col[r]).collect()).collect();
    linalg::null_space(&rows, tangent.len())
        .into_iter()
        .map(|coeffs| {
            tangent
                .iter()
                .zip(&coeffs)
                .fold([0.0; 8], |acc, (t, c)| add8(&acc, &scale8(t, *c)))
        })
        .collect()
}

//! The twistor fibration `CP^3 → HP^1 = S^4`.
//!
//! `C^4` is identified with `H^2` by `(z1, z2, z3, z4) ↦ (z1 + j z2, z3 + j z4)`. Under this
//! identification complex scalars act by right multiplication, so a complex line lies in a
//! unique right quaternionic line and the map to `HP^1` is well defined.

use num_complex::Complex64;

use super::sphere::{self, SpherePoint4, SpherePoint7};
use crate::error::{Error, Result};
use crate::quat::Quaternion;
use crate::report::{ReportPoint, VerificationReport};

pub type C4 = [Complex64; 4];
type CMat4 = [[Complex64; 4]; 4];

/// `z1 + j z2` as a quaternion.
fn pair_to_quat(z1: Complex64, z2: Complex64) -> Quaternion {
    // j (c + d i) = c j − d k
    Quaternion::new(z1.re, z1.im, z2.re, -z2.im)
}

fn quat_to_pair(q: Quaternion) -> (Complex64, Complex64) {
    (Complex64::new(q.w, q.x), Complex64::new(q.y, -q.z))
}

pub fn c4_to_h2(z: &C4) -> (Quaternion, Quaternion) {
    (pair_to_quat(z[0], z[1]), pair_to_quat(z[2], z[3]))
}

pub fn h2_to_c4(b: Quaternion, d: Quaternion) -> C4 {
    let (z1, z2) = quat_to_pair(b);
    let (z3, z4) = quat_to_pair(d);
    [z1, z2, z3, z4]
}

/// Right multiplication by `j`, a complex-antilinear map of `C^4`.
fn right_j(z: &C4) -> C4 {
    [-z[1].conj(), z[0].conj(), -z[3].conj(), z[2].conj()]
}

fn norm(z: &C4) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn outer(z: &C4) -> CMat4 {
    std::array::from_fn(|r| std::array::from_fn(|c| z[r] * z[c].conj()))
}

/// Column of largest norm, normalized.
fn dominant_column(p: &CMat4) -> C4 {
    let col = |c: usize| -> C4 { std::array::from_fn(|r| p[r][c]) };
    let best = (0..4)
        .max_by(|&a, &b| norm(&col(a)).total_cmp(&norm(&col(b))))
        .expect("four columns");
    let v = col(best);
    let n = norm(&v);
    v.map(|c| c / n)
}

/// A point of `CP^3`, stored as the orthogonal projector onto the line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexLine {
    projector: CMat4,
}

impl ComplexLine {
    pub fn through(z: &C4) -> Result<Self> {
        let n = norm(z);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::NotOnSphere(n));
        }
        Ok(Self {
            projector: outer(&z.map(|c| c / n)),
        })
    }

    pub fn projector(&self) -> &CMat4 {
        &self.projector
    }

    /// A unit vector spanning the line; the phase is arbitrary.
    pub fn representative(&self) -> C4 {
        dominant_column(&self.projector)
    }

    /// Projector onto the quaternionic line `e·H`, which as a complex subspace is
    /// spanned by `e` and `e·j`.
    pub fn quaternionic_projector(&self) -> CMat4 {
        let e = self.representative();
        let (p, q) = (outer(&e), outer(&right_j(&e)));
        std::array::from_fn(|r| std::array::from_fn(|c| p[r][c] + q[r][c]))
    }
}

/// The twistor projection, computed from projectors: the quaternionic line containing the
/// complex line is recovered from its projector and mapped to `S^4` by the Hopf formula.
pub fn twistor_projection(line: &ComplexLine) -> SpherePoint4 {
    let v = dominant_column(&line.quaternionic_projector());
    let (b, d) = c4_to_h2(&v);
    sphere::pi_hopf(&SpherePoint7::unchecked(b, d))
}

/// The twistor projection of a unit vector through the quaternionic Hopf map directly.
pub fn hopf_c(z: &C4) -> Result<SpherePoint4> {
    let (b, d) = c4_to_h2(z);
    Ok(sphere::pi_hopf(&SpherePoint7::new(b, d)?))
}

/// Compares both routes at `z`, and checks invariance under a complex phase.
pub fn twistor_check(z: &C4, tolerance: f64) -> Result<VerificationReport> {
    let direct = hopf_c(z)?;
    let via_projector = twistor_projection(&ComplexLine::through(z)?);
    let phase = Complex64::from_polar(1.0, 0.7);
    let turned = hopf_c(&z.map(|c| c * phase))?;
    let point = ReportPoint::Complex(z.iter().map(|c| [c.re, c.im]).collect());
    Ok(VerificationReport::new("twistor-projection", Some(point), tolerance)
        .with_residual("route-agreement", direct.distance(&via_projector))
        .with_residual("phase-invariance", direct.distance(&turned))
        .judged_by_tolerance())
}

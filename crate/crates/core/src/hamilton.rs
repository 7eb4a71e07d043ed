//! Covectors in frame coordinates, sharp maps, the Hamiltonians of the nested Hopf bundle
//! and the pullback `π_K^*`.
//!
//! Upstairs components are taken over the left-translated standard frame `X_i = Q·e_i`,
//! which is orthonormal for the bi-invariant metric. Downstairs components are taken over
//! `Y_i = dπ_K(X_i)`, `i < 7`, which is orthonormal for `g_{M/K}`. The `Y` frame depends on
//! the point `Q` of the fibre it is pushed forward from; that point is the covector's gauge.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::bundle::sphere::{self, Ambient8, SpherePoint7};
use crate::bundle::{dpi_k, pi_k};
use crate::error::{Error, Result};
use crate::lie::{self, ALGEBRA_DIM};
use crate::quat::{AlgebraVector, GroupPoint, QuatMat2, Quaternion};
use crate::report::VerificationReport;

/// Number of downstairs frame components.
pub const DOWN_DIM: usize = 7;

/// Largest `|π_K(Q) − n|` for which `Q` counts as lying over `n`.
pub const BASE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Up,
    Down,
}

impl Side {
    pub fn dim(self) -> usize {
        match self {
            Self::Up => ALGEBRA_DIM,
            Self::Down => DOWN_DIM,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Self::Up => "up",
            Self::Down => "down",
        }
    }
}

/// Where a covector lives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Base {
    Up(GroupPoint),
    /// A point of `S^7` and the point of its fibre whose pushed-forward frame is used.
    Down { point: SpherePoint7, gauge: GroupPoint },
}

/// A covector in the orthonormal frame of its side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CovectorWire", into = "CovectorWire")]
pub struct Covector {
    base: Base,
    components: Vec<f64>,
}

impl Covector {
    pub fn up(q: GroupPoint, components: Vec<f64>) -> Result<Self> {
        check_len(Side::Up, &components)?;
        Ok(Self {
            base: Base::Up(q),
            components,
        })
    }

    /// A downstairs covector at `π_K(gauge)` over the frame pushed forward from `gauge`.
    pub fn down(gauge: GroupPoint, components: Vec<f64>) -> Result<Self> {
        check_len(Side::Down, &components)?;
        Ok(Self {
            base: Base::Down {
                point: pi_k(&gauge),
                gauge,
            },
            components,
        })
    }

    /// As [`Covector::down`], but also checks that `gauge` lies over `point`.
    pub fn down_at(point: SpherePoint7, gauge: GroupPoint, components: Vec<f64>) -> Result<Self> {
        check_base(&point, &gauge)?;
        check_len(Side::Down, &components)?;
        Ok(Self {
            base: Base::Down { point, gauge },
            components,
        })
    }

    /// The `index`-th dual frame covector.
    pub fn unit(side: Side, q: GroupPoint, index: usize) -> Result<Self> {
        let mut c = vec![0.0; side.dim()];
        *c.get_mut(index).ok_or(Error::ComponentCount {
            expected: side.dim(),
            got: index + 1,
        })? = 1.0;
        match side {
            Side::Up => Self::up(q, c),
            Side::Down => Self::down(q, c),
        }
    }

    pub fn zero(side: Side, q: GroupPoint) -> Self {
        let c = vec![0.0; side.dim()];
        match side {
            Side::Up => Self::up(q, c),
            Side::Down => Self::down(q, c),
        }
        .expect("length matches side")
    }

    pub fn side(&self) -> Side {
        match self.base {
            Base::Up(_) => Side::Up,
            Base::Down { .. } => Side::Down,
        }
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    /// The point of `Sp(2)` whose frame the components refer to.
    pub fn frame_point(&self) -> GroupPoint {
        match self.base {
            Base::Up(q) => q,
            Base::Down { gauge, .. } => gauge,
        }
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            base: self.base,
            components: self.components.iter().map(|c| c * s).collect(),
        }
    }

    /// Sum with a covector on the same base and frame.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.base != other.base {
            return Err(Error::BaseMismatch(f64::NAN));
        }
        Ok(Self {
            base: self.base,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Evaluates the covector on a tangent vector given in frame coordinates.
    pub fn pair(&self, v: &[f64]) -> f64 {
        self.components.iter().zip(v).map(|(a, b)| a * b).sum()
    }
}

fn check_len(side: Side, c: &[f64]) -> Result<()> {
    if c.len() != side.dim() {
        return Err(Error::ComponentCount {
            expected: side.dim(),
            got: c.len(),
        });
    }
    Ok(())
}

fn check_base(n: &SpherePoint7, q: &GroupPoint) -> Result<()> {
    let gap = pi_k(q).distance(n);
    if gap.is_nan() || gap > BASE_TOL {
        return Err(Error::BaseMismatch(gap));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BaseWire {
    Group(GroupPoint),
    Sphere(SpherePoint7),
}

#[derive(Serialize, Deserialize)]
struct CovectorWire {
    side: Side,
    base: BaseWire,
    #[serde(rename = "frame-id")]
    frame_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gauge: Option<GroupPoint>,
    components: Vec<f64>,
}

const FRAME_UP: &str = "standard";
const FRAME_DOWN: &str = "pushforward";

impl From<Covector> for CovectorWire {
    fn from(c: Covector) -> Self {
        match c.base {
            Base::Up(q) => Self {
                side: Side::Up,
                base: BaseWire::Group(q),
                frame_id: FRAME_UP.into(),
                gauge: None,
                components: c.components,
            },
            Base::Down { point, gauge } => Self {
                side: Side::Down,
                base: BaseWire::Sphere(point),
                frame_id: FRAME_DOWN.into(),
                gauge: Some(gauge),
                components: c.components,
            },
        }
    }
}

impl TryFrom<CovectorWire> for Covector {
    type Error = Error;
    fn try_from(w: CovectorWire) -> Result<Self> {
        let bad = |why: &str| Error::InvalidConfig(format!("covector: {why}"));
        match (w.side, w.base, w.frame_id.as_str(), w.gauge) {
            (Side::Up, BaseWire::Group(q), FRAME_UP, None) => Self::up(q, w.components),
            (Side::Down, BaseWire::Sphere(n), FRAME_DOWN, Some(g)) => {
                Self::down_at(n, g, w.components)
            }
            (side, ..) => Err(bad(&format!(
                "base, frame-id and gauge inconsistent with side {}",
                side.name()
            ))),
        }
    }
}

/// The eight Hamiltonians: five upstairs, three downstairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HamiltonianKind {
    /// `H_M`, the full Riemannian Hamiltonian upstairs.
    #[serde(rename = "H_M")]
    Full,
    #[serde(rename = "H^D_H")]
    HorizontalH,
    #[serde(rename = "H^D_K")]
    HorizontalK,
    #[serde(rename = "H^V_H")]
    VerticalH,
    #[serde(rename = "H^V_K")]
    VerticalK,
    /// `H_{M/K}`, the full Riemannian Hamiltonian downstairs.
    #[serde(rename = "H_M/K")]
    Quotient,
    #[serde(rename = "H^D")]
    Horizontal,
    #[serde(rename = "H^V")]
    Vertical,
}

impl HamiltonianKind {
    pub const ALL: [Self; 8] = [
        Self::Full,
        Self::HorizontalH,
        Self::HorizontalK,
        Self::VerticalH,
        Self::VerticalK,
        Self::Quotient,
        Self::Horizontal,
        Self::Vertical,
    ];

    pub fn side(self) -> Side {
        match self {
            Self::Quotient | Self::Horizontal | Self::Vertical => Side::Down,
            _ => Side::Up,
        }
    }

    /// Frame components the Hamiltonian (and its sharp map) keeps.
    pub fn indices(self) -> Range<usize> {
        match self {
            Self::Full => 0..ALGEBRA_DIM,
            Self::HorizontalH => lie::HORIZONTAL_H,
            Self::HorizontalK => lie::HORIZONTAL_K,
            Self::VerticalH => lie::VERTICAL_H,
            Self::VerticalK => lie::VERTICAL_K,
            Self::Quotient => 0..DOWN_DIM,
            Self::Horizontal => 0..4,
            Self::Vertical => 4..DOWN_DIM,
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Self::Full => "H_M",
            Self::HorizontalH => "H^D_H",
            Self::HorizontalK => "H^D_K",
            Self::VerticalH => "H^V_H",
            Self::VerticalK => "H^V_K",
            Self::Quotient => "H_M/K",
            Self::Horizontal => "H^D",
            Self::Vertical => "H^V",
        }
    }

    fn check_side(self, lambda: &Covector) -> Result<()> {
        if self.side() != lambda.side() {
            return Err(Error::SideMismatch {
                kind: self.tag(),
                side: lambda.side().name(),
            });
        }
        Ok(())
    }
}

/// Sharp of `λ` for the (sub-)metric selected by `kind`, as frame coordinates.
pub fn sharp(kind: HamiltonianKind, lambda: &Covector) -> Result<Vec<f64>> {
    kind.check_side(lambda)?;
    let keep = kind.indices();
    Ok(lambda
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| if keep.contains(&i) { *c } else { 0.0 })
        .collect())
}

/// `½ g*(λ, λ)` for the selected (sub-)metric.
pub fn hamiltonian(kind: HamiltonianKind, lambda: &Covector) -> Result<f64> {
    kind.check_side(lambda)?;
    Ok(0.5 * lambda.components[kind.indices()].iter().map(|c| c * c).sum::<f64>())
}

/// Upstairs frame coordinates as a left-trivialized tangent vector.
pub fn up_vector(coords: &[f64]) -> AlgebraVector {
    lie::standard_frame().combine(coords)
}

/// The downstairs frame `Y_i = dπ_K(Q·e_i)`, `i < 7`, in ambient coordinates.
pub fn down_frame(gauge: &GroupPoint) -> [Ambient8; DOWN_DIM] {
    let frame = lie::standard_frame();
    std::array::from_fn(|i| dpi_k(gauge, frame.get(i)))
}

/// Downstairs frame coordinates as an ambient tangent vector at `π_K(gauge)`.
pub fn down_vector(gauge: &GroupPoint, coords: &[f64]) -> Ambient8 {
    down_frame(gauge)
        .iter()
        .zip(coords)
        .fold([0.0; 8], |acc, (y, c)| sphere::add8(&acc, &sphere::scale8(y, *c)))
}

/// Evaluates a downstairs covector on an ambient tangent vector, through `g_{M/K}`.
pub fn pair_down(mu: &Covector, v: &Ambient8) -> f64 {
    let gauge = mu.frame_point();
    let x = pi_k(&gauge).to_reals();
    down_frame(&gauge)
        .iter()
        .zip(&mu.components)
        .map(|(y, c)| c * sphere::metric_down(&x, y, v))
        .sum()
}

/// The ambient canonical momentum `p ∈ R^8` with `p·v = μ(v)` on `T S^7`.
pub fn ambient_momentum(mu: &Covector) -> Result<Ambient8> {
    if mu.side() != Side::Down {
        return Err(Error::SideMismatch {
            kind: "ambient momentum",
            side: mu.side().name(),
        });
    }
    let ys = down_frame(&mu.frame_point());
    // g_{M/K} is twice the Euclidean metric on the horizontal Y_0..Y_3.
    Ok(ys.iter().zip(&mu.components).enumerate().fold(
        [0.0; 8],
        |acc, (i, (y, c))| {
            let w = if i < 4 { 2.0 } else { 1.0 };
            sphere::add8(&acc, &sphere::scale8(y, w * c))
        },
    ))
}

/// Inverse of [`ambient_momentum`]: components `μ_j = p·Y_j` over the frame of `gauge`.
pub fn covector_from_ambient(gauge: GroupPoint, p: &Ambient8) -> Covector {
    let c = down_frame(&gauge).iter().map(|y| crate::linalg::dot(p, y)).collect();
    Covector::down(gauge, c).expect("seven components")
}

/// `π_K^* μ` at `q`: `(π_K^* μ)(X_i) = μ(dπ_K X_i)`, evaluated through `g_{M/K}`.
pub fn pullback(mu: &Covector, q: &GroupPoint) -> Result<Covector> {
    let Base::Down { point, .. } = mu.base else {
        return Err(Error::SideMismatch {
            kind: "pullback",
            side: "up",
        });
    };
    check_base(&point, q)?;
    let frame = lie::standard_frame();
    let c = frame
        .basis()
        .iter()
        .map(|e| pair_down(mu, &dpi_k(q, e)))
        .collect();
    Covector::up(*q, c)
}

/// Negative control: the honest pullback with its `D_K` components reversed.
pub fn fake_pullback(mu: &Covector, q: &GroupPoint) -> Result<Covector> {
    let mut lambda = pullback(mu, q)?;
    lambda.components[lie::HORIZONTAL_K].reverse();
    Ok(lambda)
}

fn report_point(q: &GroupPoint) -> Option<crate::report::ReportPoint> {
    Some((*q).into())
}

/// The three identities relating the upstairs Hamiltonians on `π_K^* μ` to the
/// downstairs ones on `μ`.
pub fn verify_prop2(q: &GroupPoint, mu: &Covector) -> VerificationReport {
    verify_prop2_with(q, mu, pullback, 1e-12)
}

pub fn verify_prop2_with(
    q: &GroupPoint,
    mu: &Covector,
    pull: impl Fn(&Covector, &GroupPoint) -> Result<Covector>,
    tolerance: f64,
) -> VerificationReport {
    let report = VerificationReport::new("prop2", report_point(q), tolerance);
    let lambda = match pull(mu, q) {
        Ok(l) => l,
        Err(_) => return report.with_residual("base-mismatch", f64::INFINITY).with_pass(false),
    };
    let up = |k| hamiltonian(k, &lambda).expect("upstairs covector");
    let down = |k| hamiltonian(k, mu).expect("downstairs covector");
    use HamiltonianKind as K;
    let a = up(K::HorizontalH) - down(K::Horizontal);
    let b = up(K::HorizontalK) - up(K::HorizontalH) - down(K::Vertical);
    let c = up(K::Full) - up(K::VerticalK) - down(K::Quotient);
    report
        .with_residual("a", a.abs())
        .with_residual("b", b.abs())
        .with_residual("c", c.abs())
        .judged_by_tolerance()
}

/// `dπ_K ∘ ♯^g ∘ π_K^* = ♯^{g_{M/K}}`, compared in ambient coordinates.
pub fn verify_sharp_diagram(q: &GroupPoint, mu: &Covector) -> VerificationReport {
    let report = VerificationReport::new("sharp-diagram", report_point(q), 1e-12);
    let lambda = match pullback(mu, q) {
        Ok(l) => l,
        Err(_) => return report.with_residual("base-mismatch", f64::INFINITY).with_pass(false),
    };
    let up = sharp(HamiltonianKind::Full, &lambda).expect("upstairs covector");
    let lhs = dpi_k(q, &up_vector(&up));
    let down = sharp(HamiltonianKind::Quotient, mu).expect("downstairs covector");
    let rhs = down_vector(&mu.frame_point(), &down);
    report
        .with_residual("diagram", crate::linalg::norm(&sphere::sub8(&lhs, &rhs)))
        .judged_by_tolerance()
}

/// A smooth section of `π_K` on `{ d ≠ 0 }`: `(b, d) ↦ [[|d|, b], [−d b̄ / |d|, d]]`.
pub fn local_section(x: &Ambient8) -> QuatMat2 {
    let (b, d) = sphere::split(x);
    let r = d.norm();
    QuatMat2::new(
        Quaternion::real(r),
        b,
        -(d * b.conj()).scale(1.0 / r),
        d,
    )
}

/// A point of the fibre over `n`, chosen by whichever of `b`, `d` is larger so that it
/// is defined everywhere (and discontinuous where `|b| = |d|`).
pub fn gauge_for(n: &SpherePoint7) -> GroupPoint {
    let (b, d) = (n.b(), n.d());
    let m = if d.norm() >= b.norm() {
        local_section(&n.to_reals())
    } else {
        let r = b.norm();
        QuatMat2::new(-(b * d.conj()).scale(1.0 / r), b, Quaternion::real(r), d)
    };
    GroupPoint::new(m).expect("orthonormal columns on the sphere")
}

/// The cotangent map `(x, p) ↦ (s(x), P)` where `P` pairs with `δQ` as `p` pairs with the
/// second column of `δQ`.
fn lift(x: &Ambient8, p: &Ambient8) -> ([f64; 16], [f64; 16]) {
    let (p1, p2) = sphere::split(p);
    let big_p = QuatMat2::new(Quaternion::ZERO, p1, Quaternion::ZERO, p2);
    (local_section(x).to_reals(), big_p.to_reals())
}

/// A tangent vector `(δx, δp)` to `T^* R^8`.
pub type CotangentVector = (Ambient8, Ambient8);

/// `ω_M(dF α, dF β) − ω_{M/K}(α, β)` at `(x, p)`, with `dF` by central differences, where
/// `F` is the pullback composed with [`local_section`]. Also returns how far `P` is from
/// annihilating the `K`-vertical directions at `s(x)`.
pub fn symplectic_pullback_check(
    x: &Ambient8,
    p: &Ambient8,
    alpha: &CotangentVector,
    beta: &CotangentVector,
    tolerance: f64,
) -> VerificationReport {
    const STEP: f64 = 1e-6;
    let d_lift = |v: &CotangentVector| {
        let at = |s: f64| {
            lift(
                &sphere::add8(x, &sphere::scale8(&v.0, s)),
                &sphere::add8(p, &sphere::scale8(&v.1, s)),
            )
        };
        let ((q1, p1), (q0, p0)) = (at(STEP), at(-STEP));
        let dq: [f64; 16] = std::array::from_fn(|k| (q1[k] - q0[k]) / (2.0 * STEP));
        let dp: [f64; 16] = std::array::from_fn(|k| (p1[k] - p0[k]) / (2.0 * STEP));
        (dq, dp)
    };
    let omega = |a: (&[f64], &[f64]), b: (&[f64], &[f64])| {
        crate::linalg::dot(a.0, b.1) - crate::linalg::dot(b.0, a.1)
    };
    let (fa, fb) = (d_lift(alpha), d_lift(beta));
    let up = omega((&fa.0, &fa.1), (&fb.0, &fb.1));
    let down = omega((&alpha.0, &alpha.1), (&beta.0, &beta.1));

    let (q, big_p) = lift(x, p);
    let q = QuatMat2::from_reals(&q);
    let big_p = QuatMat2::from_reals(&big_p);
    let frame = lie::standard_frame();
    let annihilator = lie::VERTICAL_K
        .map(|i| crate::quat::trace_inner(&big_p, &(q * *frame.get(i).matrix())).abs())
        .fold(0.0, f64::max);
    VerificationReport::new("symplectic-pullback", None, tolerance)
        .with_residual("omega", (up - down).abs())
        .with_residual("annihilator", annihilator)
        .judged_by_tolerance()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{BundleSpec, GroupElement, act};
    use crate::linalg;
    use crate::sample;
    use HamiltonianKind as K;

    fn random_down(rng: &mut sample::SampleRng) -> (GroupPoint, Covector) {
        let q = sample::random_group_point(rng);
        let mu = Covector::down(q, sample::normal_vec(rng, DOWN_DIM)).unwrap();
        (q, mu)
    }

    #[test]
    fn sharp_examples() {
        let id = GroupPoint::identity();
        let x1 = Covector::unit(Side::Up, id, 0).unwrap();
        let s = sharp(K::Full, &x1).unwrap();
        assert_eq!(s, [1., 0., 0., 0., 0., 0., 0., 0., 0., 0.]);
        let v1 = Covector::unit(Side::Up, id, 4).unwrap();
        assert!(sharp(K::HorizontalH, &v1).unwrap().iter().all(|c| *c == 0.0));
        assert!(sharp(K::Quotient, &x1).is_err());
    }

    #[test]
    fn sharp_defining_identity_downstairs() {
        let mut rng = sample::rng(1);
        let (q, mu) = random_down(&mut rng);
        let x = pi_k(&q).to_reals();
        let ys = down_frame(&q);
        for kind in [K::Quotient, K::Horizontal, K::Vertical] {
            let v = down_vector(&q, &sharp(kind, &mu).unwrap());
            for i in kind.indices() {
                let lhs = sphere::metric_down(&x, &v, &ys[i]);
                assert!((lhs - pair_down(&mu, &ys[i])).abs() < 1e-14);
            }
            let cometric = 2.0 * hamiltonian(kind, &mu).unwrap();
            assert!((sphere::metric_down(&x, &v, &v) - cometric).abs() < 1e-14);
        }
    }

    #[test]
    fn hamiltonian_examples_and_partitions() {
        let id = GroupPoint::identity();
        let x1 = Covector::unit(Side::Up, id, 0).unwrap();
        assert_eq!(hamiltonian(K::HorizontalH, &x1).unwrap(), 0.5);
        assert_eq!(hamiltonian(K::Full, &Covector::zero(Side::Up, id)).unwrap(), 0.0);
        assert!(matches!(
            hamiltonian(K::Horizontal, &x1),
            Err(Error::SideMismatch { .. })
        ));

        let mut rng = sample::rng(2);
        for _ in 0..100 {
            let q = sample::random_group_point(&mut rng);
            let l = Covector::up(q, sample::normal_vec(&mut rng, 10)).unwrap();
            let h = |k| hamiltonian(k, &l).unwrap();
            assert!((h(K::Full) - h(K::HorizontalH) - h(K::VerticalH)).abs() < 1e-14);
            assert!((h(K::Full) - h(K::HorizontalK) - h(K::VerticalK)).abs() < 1e-14);
            let (_, mu) = random_down(&mut rng);
            let h = |k| hamiltonian(k, &mu).unwrap();
            assert!((h(K::Quotient) - h(K::Horizontal) - h(K::Vertical)).abs() < 1e-14);
        }
    }

    #[test]
    fn pullback_of_frame_covectors() {
        let mut rng = sample::rng(3);
        let q = sample::random_group_point(&mut rng);
        for j in 0..DOWN_DIM {
            let mu = Covector::unit(Side::Down, q, j).unwrap();
            let l = pullback(&mu, &q).unwrap();
            let want = Covector::unit(Side::Up, q, j).unwrap();
            for (a, b) in l.components().iter().zip(want.components()) {
                assert!((a - b).abs() < 1e-14);
            }
        }
        let zero = pullback(&Covector::zero(Side::Down, q), &q).unwrap();
        assert!(zero.components().iter().all(|c| *c == 0.0));
    }

    #[test]
    fn pullback_lands_in_the_annihilator_and_is_injective() {
        let mut rng = sample::rng(4);
        let q = sample::random_group_point(&mut rng);
        let rows: Vec<Vec<f64>> = (0..DOWN_DIM)
            .map(|j| {
                let l = pullback(&Covector::unit(Side::Down, q, j).unwrap(), &q).unwrap();
                l.components().to_vec()
            })
            .collect();
        assert_eq!(linalg::rank(&rows), DOWN_DIM);
        for _ in 0..50 {
            let (q, mu) = random_down(&mut rng);
            let l = pullback(&mu, &q).unwrap();
            assert!(l.components()[lie::VERTICAL_K].iter().all(|c| c.abs() < 1e-12));
        }
    }

    #[test]
    fn pullback_rejects_other_fibres() {
        let mut rng = sample::rng(5);
        let (_, mu) = random_down(&mut rng);
        let elsewhere = sample::random_group_point(&mut rng);
        assert!(matches!(pullback(&mu, &elsewhere), Err(Error::BaseMismatch(_))));
        let r = verify_prop2(&elsewhere, &mu);
        assert!(!r.pass);
    }

    #[test]
    fn prop2_on_frame_covectors_and_random_data() {
        let id = GroupPoint::identity();
        let mu = Covector::unit(Side::Down, id, 0).unwrap();
        let r = verify_prop2(&id, &mu);
        assert!(r.pass);
        assert!(r.max_residual() < 1e-15);

        let mut rng = sample::rng(6);
        for _ in 0..200 {
            let (q, mu) = random_down(&mut rng);
            assert!(verify_prop2(&q, &mu).pass);
            assert!(verify_sharp_diagram(&q, &mu).pass);
        }
    }

    #[test]
    fn prop2_is_gauge_independent() {
        // The same downstairs covector pulled back at another point of the fibre.
        let hopf = BundleSpec::hopf();
        let mut rng = sample::rng(7);
        for _ in 0..50 {
            let (q, mu) = random_down(&mut rng);
            let k = GroupElement::new(sample::random_unit_quaternion(&mut rng), Quaternion::ONE)
                .unwrap();
            let moved = act(&hopf, &q, &k).unwrap();
            let r = verify_prop2(&moved, &mu);
            assert!(r.pass, "{r:?}");
            assert!(verify_sharp_diagram(&moved, &mu).pass);
        }
    }

    #[test]
    fn fake_pullback_breaks_identity_a() {
        let mut rng = sample::rng(8);
        let worst = (0..20)
            .map(|_| {
                let (q, mu) = random_down(&mut rng);
                verify_prop2_with(&q, &mu, fake_pullback, 1e-12).residual("a").unwrap()
            })
            .fold(0.0, f64::max);
        assert!(worst > 0.1);
    }

    #[test]
    fn ambient_momentum_round_trips_and_pairs() {
        let mut rng = sample::rng(9);
        let (q, mu) = random_down(&mut rng);
        let p = ambient_momentum(&mu).unwrap();
        for y in down_frame(&q) {
            assert!((linalg::dot(&p, &y) - pair_down(&mu, &y)).abs() < 1e-14);
        }
        let back = covector_from_ambient(q, &p);
        for (a, b) in back.components().iter().zip(mu.components()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn covector_json_round_trip() {
        let mut rng = sample::rng(10);
        let (q, mu) = random_down(&mut rng);
        let v = serde_json::to_value(&mu).unwrap();
        assert_eq!(v["side"], "down");
        assert_eq!(v["frame-id"], FRAME_DOWN);
        let back: Covector = serde_json::from_value(v).unwrap();
        assert_eq!(back.components(), mu.components());

        let up = Covector::up(q, vec![1.0; 10]).unwrap();
        let v = serde_json::to_value(&up).unwrap();
        assert_eq!(v["side"], "up");
        let back: Covector = serde_json::from_value(v.clone()).unwrap();
        assert_eq!(back, up);

        let mut bad = v;
        bad["components"] = serde_json::json!([1.0, 2.0]);
        assert!(serde_json::from_value::<Covector>(bad).is_err());
    }

    #[test]
    fn local_section_is_a_section() {
        let mut rng = sample::rng(11);
        for _ in 0..20 {
            let v: Ambient8 = sample::normal_vec(&mut rng, 8).try_into().unwrap();
            let n = SpherePoint7::normalize(&v).unwrap();
            let s = local_section(&n.to_reals());
            assert!(s.unitarity_defect() < 1e-14);
            let q = GroupPoint::new(s).unwrap();
            assert!(pi_k(&q).distance(&n) < 1e-15);
        }
    }

    #[test]
    fn gauge_lies_over_the_point() {
        let mut rng = sample::rng(13);
        for _ in 0..50 {
            let v: Ambient8 = sample::normal_vec(&mut rng, 8).try_into().unwrap();
            let n = SpherePoint7::normalize(&v).unwrap();
            assert!(pi_k(&gauge_for(&n)).distance(&n) < 1e-15);
        }
        let north = SpherePoint7::new(Quaternion::ONE, Quaternion::ZERO).unwrap();
        assert!(pi_k(&gauge_for(&north)).distance(&north) < 1e-15);
    }

    #[test]
    fn pullback_relates_the_symplectic_forms() {
        let mut rng = sample::rng(12);
        for _ in 0..20 {
            let v: Ambient8 = sample::normal_vec(&mut rng, 8).try_into().unwrap();
            let x = SpherePoint7::normalize(&v).unwrap().to_reals();
            let p: Ambient8 = sample::normal_vec(&mut rng, 8).try_into().unwrap();
            let mut tangent = || -> CotangentVector {
                let dx: Ambient8 = sample::normal_vec(&mut rng, 8).try_into().unwrap();
                let dx = sphere::sub8(&dx, &sphere::scale8(&x, linalg::dot(&dx, &x)));
                (dx, sample::normal_vec(&mut rng, 8).try_into().unwrap())
            };
            let (a, b) = (tangent(), tangent());
            let r = symplectic_pullback_check(&x, &p, &a, &b, 1e-6);
            assert!(r.pass, "{r:?}");
        }
    }
}

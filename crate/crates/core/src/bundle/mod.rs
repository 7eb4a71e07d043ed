//! The nested bundle instances on `Sp(2)`: group actions, bundle projections, fundamental
//! vector fields and vertical/horizontal splittings.
//!
//! Tangent vectors at `Q` are left-trivialized: the algebra element `u` stands for `Q·u`.
//! Since the trace metric is bi-invariant, left-trivialized vectors are compared with
//! [`trace_inner`](crate::quat::trace_inner) directly.

mod checks;
pub mod sphere;
mod twistor;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{ALGEBRA_DIM, FramedAlgebra, standard_frame};
use crate::linalg;
use crate::quat::{AlgebraVector, GroupPoint, QuatMat2, Quaternion, check_unit};

pub use checks::{
    EhresmannInput, Section, bilinear_form, check_ehresmann, check_isometry, check_step2,
    check_submersion, evaluate_ehresmann, evaluate_step2, find_m_dependence_witness,
    gm_bilinear_form, step2_sections, vector_field_bracket,
};
pub use sphere::{SpherePoint4, SpherePoint7, dpi_hopf, pi_hopf};
pub use twistor::{ComplexLine, c4_to_h2, h2_to_c4, hopf_c, twistor_check, twistor_projection};

/// How `Sp(1) × Sp(1)` acts on `Sp(2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionKind {
    /// `Q ↦ Q·diag(μ̄, ν̄)`; the small group is `K = { ν = 1 }`.
    Hopf,
    /// `Q ↦ diag(λ̄, λ̄)·Q·diag(μ, 1)`; the small group is `Δ = { λ = μ }`.
    GromollMeyer,
}

/// The acting group `H` or its subgroup (`K` for Hopf, `Δ` for Gromoll-Meyer).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subgroup {
    Big,
    Small,
}

impl Subgroup {
    pub fn dim(self) -> usize {
        match self {
            Self::Big => 6,
            Self::Small => 3,
        }
    }
}

/// An element `(first, second)` of `Sp(1) × Sp(1)`: `(μ, ν)` for Hopf, `(λ, μ)` for
/// Gromoll-Meyer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElement {
    pub first: Quaternion,
    pub second: Quaternion,
}

impl GroupElement {
    pub fn new(first: Quaternion, second: Quaternion) -> Result<Self> {
        check_unit(first)?;
        check_unit(second)?;
        Ok(Self { first, second })
    }

    pub fn identity() -> Self {
        Self {
            first: Quaternion::ONE,
            second: Quaternion::ONE,
        }
    }
}

/// An element of `sp(1) × sp(1)`, the algebra of the acting group.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct GroupTangent {
    pub first: Quaternion,
    pub second: Quaternion,
}

impl GroupTangent {
    pub fn new(first: Quaternion, second: Quaternion) -> Self {
        Self {
            first: first.im(),
            second: second.im(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.first.scale(s), self.second.scale(s))
    }

    /// Componentwise exponential.
    pub fn exp(&self) -> GroupElement {
        GroupElement {
            first: self.first.exp(),
            second: self.second.exp(),
        }
    }
}

/// A nested principal bundle instance on `Sp(2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BundleSpec {
    action: ActionKind,
    frame: FramedAlgebra,
}

impl BundleSpec {
    pub fn new(action: ActionKind) -> Self {
        Self {
            action,
            frame: standard_frame(),
        }
    }

    pub fn hopf() -> Self {
        Self::new(ActionKind::Hopf)
    }

    pub fn gromoll_meyer() -> Self {
        Self::new(ActionKind::GromollMeyer)
    }

    pub fn action(&self) -> ActionKind {
        self.action
    }

    pub fn frame(&self) -> &FramedAlgebra {
        &self.frame
    }

    pub fn contains(&self, g: &GroupElement, which: Subgroup) -> bool {
        match (which, self.action) {
            (Subgroup::Big, _) => true,
            (Subgroup::Small, ActionKind::Hopf) => g.second.max_abs_diff(Quaternion::ONE) < 1e-12,
            (Subgroup::Small, ActionKind::GromollMeyer) => g.first.max_abs_diff(g.second) < 1e-12,
        }
    }

    pub fn contains_tangent(&self, xi: &GroupTangent, which: Subgroup) -> bool {
        match (which, self.action) {
            (Subgroup::Big, _) => true,
            (Subgroup::Small, ActionKind::Hopf) => xi.second.norm() < 1e-12,
            (Subgroup::Small, ActionKind::GromollMeyer) => {
                xi.first.max_abs_diff(xi.second) < 1e-12
            }
        }
    }

    /// The product for which `act(act(Q, g), h) = act(Q, compose(g, h))`.
    pub fn compose(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        match self.action {
            ActionKind::Hopf => GroupElement {
                first: h.first * g.first,
                second: h.second * g.second,
            },
            ActionKind::GromollMeyer => GroupElement {
                first: g.first * h.first,
                second: g.second * h.second,
            },
        }
    }

    /// Basis of the algebra of the chosen group, over `i, j, k` in each slot.
    pub fn tangent_basis(&self, which: Subgroup) -> Vec<GroupTangent> {
        let z = Quaternion::ZERO;
        let im = Quaternion::IMAGINARY_BASIS;
        match (which, self.action) {
            (Subgroup::Big, _) => im
                .iter()
                .map(|&q| GroupTangent::new(q, z))
                .chain(im.iter().map(|&q| GroupTangent::new(z, q)))
                .collect(),
            (Subgroup::Small, ActionKind::Hopf) => {
                im.iter().map(|&q| GroupTangent::new(q, z)).collect()
            }
            (Subgroup::Small, ActionKind::GromollMeyer) => {
                im.iter().map(|&q| GroupTangent::new(q, q)).collect()
            }
        }
    }
}

/// Applies the bundle's action of `g ∈ Sp(1) × Sp(1)` to `q`.
pub fn act(spec: &BundleSpec, q: &GroupPoint, g: &GroupElement) -> Result<GroupPoint> {
    check_unit(g.first)?;
    check_unit(g.second)?;
    let m = match spec.action {
        ActionKind::Hopf => *q.matrix() * QuatMat2::diag(g.first.conj(), g.second.conj()),
        ActionKind::GromollMeyer => {
            q.matrix().left_scalar(g.first.conj()) * QuatMat2::diag(g.second, Quaternion::ONE)
        }
    };
    Ok(GroupPoint::retracted(m))
}

/// [`act`] restricted to a subgroup; elements outside it are rejected.
pub fn act_in(
    spec: &BundleSpec,
    q: &GroupPoint,
    g: &GroupElement,
    which: Subgroup,
) -> Result<GroupPoint> {
    if !spec.contains(g, which) {
        return Err(Error::Unsupported(format!(
            "group element is not in the {which:?} subgroup of the {:?} action",
            spec.action
        )));
    }
    act(spec, q, g)
}

/// `π_K`: the second column `(b, d)` of `Q`.
pub fn pi_k(q: &GroupPoint) -> SpherePoint7 {
    let (b, d) = q.matrix().second_column();
    SpherePoint7::unchecked(b, d)
}

/// `π_H`, evaluated by both `(2 d b̄, |b|² − |d|²)` and `(−2 c ā, |c|² − |a|²)`.
///
/// The expressions agree on `Sp(2)`; a disagreement above `1e-10` means the point was
/// corrupted.
pub fn pi_h(q: &GroupPoint) -> Result<SpherePoint4> {
    let (first, second) = pi_h_both(q);
    let gap = first.distance(&second);
    if gap > 1e-10 {
        return Err(Error::InconsistentProjection(gap));
    }
    Ok(first)
}

/// Both expressions for `π_H`, the second-column one first.
pub fn pi_h_both(q: &GroupPoint) -> (SpherePoint4, SpherePoint4) {
    let m = q.matrix();
    let from_second = SpherePoint4 {
        q: (m.d * m.b.conj()).scale(2.0),
        x: m.b.norm_sqr() - m.d.norm_sqr(),
    };
    let from_first = SpherePoint4 {
        q: (m.c * m.a.conj()).scale(-2.0),
        x: m.c.norm_sqr() - m.a.norm_sqr(),
    };
    (from_second, from_first)
}

/// `dπ_K(Q·u)`: the second column of `Q·u`, in ambient `R^8` coordinates.
pub fn dpi_k(q: &GroupPoint, u: &AlgebraVector) -> sphere::Ambient8 {
    let (b, d) = q.translate(u).second_column();
    sphere::join(b, d)
}

/// The fundamental vector field `σ_Q(ξ) = d/dt|₀ act(Q, exp tξ)`, left-trivialized.
pub fn fundamental_field(
    spec: &BundleSpec,
    q: &GroupPoint,
    xi: &GroupTangent,
    which: Subgroup,
) -> Result<AlgebraVector> {
    if !spec.contains_tangent(xi, which) {
        return Err(Error::NotInSubalgebra);
    }
    Ok(fundamental_field_unchecked(spec, q, xi))
}

pub(crate) fn fundamental_field_unchecked(spec: &BundleSpec, q: &GroupPoint, xi: &GroupTangent) -> AlgebraVector {
    match spec.action {
        ActionKind::Hopf => AlgebraVector::diag(-xi.first, -xi.second),
        ActionKind::GromollMeyer => {
            // Q*·(Q·diag(ξ₂, 0) − ξ₁·Q)
            let m = q.matrix();
            let moved = m.conj_transpose() * m.left_scalar(xi.first);
            AlgebraVector::diag(xi.second, Quaternion::ZERO) - AlgebraVector::skew_part(&moved)
        }
    }
}

/// Central finite difference of the action curve, left-trivialized.
pub fn fundamental_field_fd(
    spec: &BundleSpec,
    q: &GroupPoint,
    xi: &GroupTangent,
    step: f64,
) -> Result<AlgebraVector> {
    let fwd = act(spec, q, &xi.scale(step).exp())?;
    let bwd = act(spec, q, &xi.scale(-step).exp())?;
    let diff = (*fwd.matrix() - *bwd.matrix()).scale(0.5 / step);
    Ok(AlgebraVector::skew_part(&(q.matrix().conj_transpose() * diff)))
}

/// Fundamental fields of a basis of the chosen group's algebra, as frame coordinates.
pub fn vertical_fields(spec: &BundleSpec, q: &GroupPoint, which: Subgroup) -> Vec<AlgebraVector> {
    spec.tangent_basis(which)
        .iter()
        .map(|xi| fundamental_field_unchecked(spec, q, xi))
        .collect()
}

/// Orthonormal frames of the vertical and horizontal bundles at a point, left-trivialized.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentFrameAt {
    pub base: GroupPoint,
    pub vertical_big: Vec<AlgebraVector>,
    pub horizontal_big: Vec<AlgebraVector>,
    pub vertical_small: Vec<AlgebraVector>,
    pub horizontal_small: Vec<AlgebraVector>,
}

/// Splits `T_Q Sp(2)` into the span of the fundamental fields and its trace-orthogonal
/// complement, for both the big and the small group.
pub fn splitting_at(spec: &BundleSpec, q: &GroupPoint) -> Result<TangentFrameAt> {
    let (vertical_big, horizontal_big) = split_for(spec, q, Subgroup::Big)?;
    let (vertical_small, horizontal_small) = split_for(spec, q, Subgroup::Small)?;
    Ok(TangentFrameAt {
        base: *q,
        vertical_big,
        horizontal_big,
        vertical_small,
        horizontal_small,
    })
}

fn split_for(
    spec: &BundleSpec,
    q: &GroupPoint,
    which: Subgroup,
) -> Result<(Vec<AlgebraVector>, Vec<AlgebraVector>)> {
    let frame = spec.frame();
    let fields: Vec<Vec<f64>> = vertical_fields(spec, q, which)
        .iter()
        .map(|v| frame.coords(v).to_vec())
        .collect();
    let rank = linalg::rank(&fields);
    if rank != which.dim() {
        return Err(Error::DegeneratePoint {
            rank,
            expected: which.dim(),
        });
    }
    let mut basis = Vec::new();
    linalg::extend_orthonormal(&mut basis, &fields, 1e-8);
    let n_vertical = basis.len();
    let units: Vec<Vec<f64>> = (0..ALGEBRA_DIM)
        .map(|k| (0..ALGEBRA_DIM).map(|c| f64::from(u8::from(c == k))).collect())
        .collect();
    linalg::extend_orthonormal(&mut basis, &units, 1e-8);
    let to_vec = |c: &Vec<f64>| frame.combine(c);
    let vertical = basis[..n_vertical].iter().map(to_vec).collect();
    let horizontal = basis[n_vertical..].iter().map(to_vec).collect();
    Ok((vertical, horizontal))
}

/// Orthogonal projection onto the horizontal space of the chosen group at `q`.
pub fn project_horizontal_at(
    spec: &BundleSpec,
    q: &GroupPoint,
    which: Subgroup,
    u: &AlgebraVector,
) -> AlgebraVector {
    let fields = vertical_fields(spec, q, which);
    let gram = linalg::gram(&fields, |a, b| a.inner(b));
    let rhs: Vec<f64> = fields.iter().map(|f| f.inner(u)).collect();
    let coeffs = linalg::solve_spd(&gram, &rhs).expect("fundamental fields are independent");
    fields
        .iter()
        .zip(coeffs)
        .fold(*u, |acc, (f, c)| acc - f.scale(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{HORIZONTAL_H, VERTICAL_H, VERTICAL_K, adjoint};
    use crate::sample;
    use Quaternion as H;

    fn span_distance(a: &[AlgebraVector], b: &[AlgebraVector]) -> f64 {
        // Projects every vector of `a` onto span(b) (orthonormal) and returns the worst residual.
        a.iter()
            .map(|v| {
                let p = b.iter().fold(*v, |acc, e| acc - e.scale(e.inner(v)));
                p.norm()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn action_examples() {
        let hopf = BundleSpec::hopf();
        let id = GroupPoint::identity();
        assert_eq!(act(&hopf, &id, &GroupElement::identity()).unwrap(), id);
        let g = GroupElement::new(H::I, H::ONE).unwrap();
        let got = act(&hopf, &id, &g).unwrap();
        assert!(got.matrix().max_abs_diff(&QuatMat2::diag(-H::I, H::ONE)) < 1e-15);

        let gm = BundleSpec::gromoll_meyer();
        let g = GroupElement::new(H::J, H::J).unwrap();
        let got = act(&gm, &id, &g).unwrap();
        assert!(got.matrix().max_abs_diff(&QuatMat2::diag(H::ONE, -H::J)) < 1e-15);
    }

    #[test]
    fn non_unit_parameters_are_rejected() {
        let hopf = BundleSpec::hopf();
        assert!(GroupElement::new(H::ONE.scale(2.0), H::ONE).is_err());
        let bad = GroupElement {
            first: H::new(1.0, 1.0, 0.0, 0.0),
            second: H::ONE,
        };
        assert!(matches!(
            act(&hopf, &GroupPoint::identity(), &bad),
            Err(Error::NonUnitParameter(_))
        ));
        let outside = GroupElement::new(H::ONE, H::I).unwrap();
        assert!(act_in(&hopf, &GroupPoint::identity(), &outside, Subgroup::Small).is_err());
    }

    #[test]
    fn action_axioms() {
        let mut rng = sample::rng(4);
        for spec in [BundleSpec::hopf(), BundleSpec::gromoll_meyer()] {
            for _ in 0..50 {
                let q = sample::random_group_point(&mut rng);
                let g = GroupElement::new(
                    sample::random_unit_quaternion(&mut rng),
                    sample::random_unit_quaternion(&mut rng),
                )
                .unwrap();
                let h = GroupElement::new(
                    sample::random_unit_quaternion(&mut rng),
                    sample::random_unit_quaternion(&mut rng),
                )
                .unwrap();
                let lhs = act(&spec, &act(&spec, &q, &g).unwrap(), &h).unwrap();
                let rhs = act(&spec, &q, &spec.compose(&g, &h)).unwrap();
                assert!(lhs.distance(&rhs) < 1e-13);
                assert!(lhs.unitarity_defect() < 1e-13);
            }
        }
    }

    #[test]
    fn projection_examples() {
        let id = GroupPoint::identity();
        assert_eq!(pi_k(&id).to_reals(), [0., 0., 0., 0., 1., 0., 0., 0.]);
        let s = GroupPoint::new(QuatMat2::new(H::ZERO, H::ONE, -H::ONE, H::ZERO)).unwrap();
        assert_eq!(pi_k(&s).to_reals(), [1., 0., 0., 0., 0., 0., 0., 0.]);
        assert_eq!(pi_h(&id).unwrap(), SpherePoint4 { q: H::ZERO, x: -1.0 });
        assert_eq!(pi_h(&s).unwrap(), SpherePoint4 { q: H::ZERO, x: 1.0 });
    }

    #[test]
    fn pi_h_expressions_agree_and_factor_through_hopf() {
        let mut rng = sample::rng(17);
        for _ in 0..200 {
            let q = sample::random_group_point(&mut rng);
            let (a, b) = pi_h_both(&q);
            assert!(a.distance(&b) < 1e-12);
            let p = pi_h(&q).unwrap();
            assert!(pi_hopf(&pi_k(&q)).distance(&p) < 1e-12);
        }
    }

    #[test]
    fn pi_h_flags_corrupted_points() {
        let bad = QuatMat2::new(H::ONE, H::new(0.0, 1e-3, 0.0, 0.0), H::ZERO, H::ONE);
        let q = GroupPoint::unchecked(bad);
        assert!(matches!(pi_h(&q), Err(Error::InconsistentProjection(_))));
    }

    #[test]
    fn projections_are_invariant_along_fibres() {
        let mut rng = sample::rng(23);
        let hopf = BundleSpec::hopf();
        for _ in 0..100 {
            let q = sample::random_group_point(&mut rng);
            let mu = sample::random_unit_quaternion(&mut rng);
            let nu = sample::random_unit_quaternion(&mut rng);
            let k = act(&hopf, &q, &GroupElement::new(mu, H::ONE).unwrap()).unwrap();
            assert!(pi_k(&k).distance(&pi_k(&q)) < 1e-12);
            let h = act(&hopf, &q, &GroupElement::new(mu, nu).unwrap()).unwrap();
            assert!(pi_h(&h).unwrap().distance(&pi_h(&q).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn fundamental_field_examples() {
        let hopf = BundleSpec::hopf();
        let id = GroupPoint::identity();
        let f = fundamental_field(&hopf, &id, &GroupTangent::new(H::I, H::ZERO), Subgroup::Small)
            .unwrap();
        assert_eq!(f, AlgebraVector::diag(-H::I, H::ZERO));
        let f = fundamental_field(&hopf, &id, &GroupTangent::new(H::ZERO, H::J), Subgroup::Big)
            .unwrap();
        assert_eq!(f, AlgebraVector::diag(H::ZERO, -H::J));
        assert!(fundamental_field(&hopf, &id, &GroupTangent::new(H::ZERO, H::J), Subgroup::Small)
            .is_err());

        let gm = BundleSpec::gromoll_meyer();
        let q = sample::random_group_point(&mut sample::rng(0));
        for spec in [&hopf, &gm] {
            let z = fundamental_field(spec, &q, &GroupTangent::default(), Subgroup::Small).unwrap();
            assert_eq!(z.norm(), 0.0);
        }
        let f = fundamental_field(&gm, &id, &GroupTangent::new(H::K, H::K), Subgroup::Small).unwrap();
        assert!((f - AlgebraVector::diag(H::ZERO, -H::K)).norm() < 1e-15);
    }

    #[test]
    fn fundamental_fields_match_finite_differences() {
        let mut rng = sample::rng(31);
        for spec in [BundleSpec::hopf(), BundleSpec::gromoll_meyer()] {
            for _ in 0..20 {
                let q = sample::random_group_point(&mut rng);
                for xi in spec.tangent_basis(Subgroup::Big) {
                    let an = fundamental_field(&spec, &q, &xi, Subgroup::Big).unwrap();
                    let fd = fundamental_field_fd(&spec, &q, &xi, 1e-6).unwrap();
                    assert!((an - fd).norm() < 1e-8, "{}", (an - fd).norm());
                }
            }
        }
    }

    #[test]
    fn splitting_at_identity_matches_the_frame_blocks() {
        let hopf = BundleSpec::hopf();
        let f = standard_frame();
        let s = splitting_at(&hopf, &GroupPoint::identity()).unwrap();
        let block = |r: std::ops::Range<usize>| r.map(|a| *f.get(a)).collect::<Vec<_>>();
        assert_eq!(s.vertical_big.len(), 6);
        assert_eq!(s.horizontal_big.len(), 4);
        assert_eq!(s.vertical_small.len(), 3);
        assert_eq!(s.horizontal_small.len(), 7);
        assert!(span_distance(&s.vertical_big, &block(VERTICAL_H)) < 1e-14);
        assert!(span_distance(&s.horizontal_big, &block(HORIZONTAL_H)) < 1e-14);
        assert!(span_distance(&s.vertical_small, &block(VERTICAL_K)) < 1e-14);
    }

    #[test]
    fn splitting_frames_are_orthonormal() {
        let mut rng = sample::rng(12);
        for spec in [BundleSpec::hopf(), BundleSpec::gromoll_meyer()] {
            for _ in 0..20 {
                let q = sample::random_group_point(&mut rng);
                let s = splitting_at(&spec, &q).unwrap();
                for (v, h) in [
                    (&s.vertical_big, &s.horizontal_big),
                    (&s.vertical_small, &s.horizontal_small),
                ] {
                    let all: Vec<AlgebraVector> = v.iter().chain(h).copied().collect();
                    assert_eq!(all.len(), 10);
                    assert!(linalg::identity_defect(&linalg::gram(&all, |a, b| a.inner(b))) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn gromoll_meyer_delta_vertical_at_identity() {
        let gm = BundleSpec::gromoll_meyer();
        let s = splitting_at(&gm, &GroupPoint::identity()).unwrap();
        let lower: Vec<AlgebraVector> = H::IMAGINARY_BASIS
            .iter()
            .map(|&q| AlgebraVector::diag(H::ZERO, q))
            .collect();
        assert_eq!(s.vertical_small.len(), 3);
        assert!(span_distance(&s.vertical_small, &lower) < 1e-14);
    }

    #[test]
    fn horizontal_bundles_are_invariant() {
        // Right translation by diag(μ̄, ν̄) carries Q·u to (Q·h̄)·Ad_h u.
        let mut rng = sample::rng(40);
        let hopf = BundleSpec::hopf();
        for _ in 0..20 {
            let q = sample::random_group_point(&mut rng);
            let g = GroupElement::new(
                sample::random_unit_quaternion(&mut rng),
                sample::random_unit_quaternion(&mut rng),
            )
            .unwrap();
            let moved = act(&hopf, &q, &g).unwrap();
            let h = GroupPoint::diag(g.first, g.second).unwrap();
            let here = splitting_at(&hopf, &q).unwrap();
            let there = splitting_at(&hopf, &moved).unwrap();
            let carried: Vec<AlgebraVector> =
                here.horizontal_big.iter().map(|u| adjoint(&h, u)).collect();
            assert!(span_distance(&carried, &there.horizontal_big) < 1e-12);
        }
    }

    #[test]
    fn horizontal_projection_agrees_with_splitting() {
        let mut rng = sample::rng(50);
        let gm = BundleSpec::gromoll_meyer();
        let q = sample::random_group_point(&mut rng);
        let s = splitting_at(&gm, &q).unwrap();
        let u = sample::random_algebra(&mut rng, 1.0);
        let p = project_horizontal_at(&gm, &q, Subgroup::Big, &u);
        let via_frame = s
            .horizontal_big
            .iter()
            .fold(AlgebraVector::zero(), |acc, e| acc + e.scale(e.inner(&u)));
        assert!((p - via_frame).norm() < 1e-12);
    }
}

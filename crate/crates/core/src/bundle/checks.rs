//! Structural checks on the bundle instances: Ehresmann splittings, the isometry and
//! submersion properties of the projections, bracket generation, and the induced
//! bilinear forms on the structure algebras.

use rand::Rng;

use super::sphere::{self, Ambient8};
use super::{
    ActionKind, BundleSpec, GroupTangent, Subgroup, dpi_k, fundamental_field_unchecked, pi_k,
    project_horizontal_at, splitting_at, vertical_fields,
};
use crate::error::Result;
use crate::lie::{ALGEBRA_DIM, HORIZONTAL_H, HORIZONTAL_K, bracket};
use crate::linalg::{self, RANK_REL_TOL};
use crate::quat::{AlgebraVector, GroupPoint, mat_exp};
use crate::report::VerificationReport;
use crate::sample;

/// Dimension of `M/K` (and of `M/Δ`).
const QUOTIENT_DIM: usize = 7;

/// Step used for directional derivatives of frame fields in [`vector_field_bracket`].
const BRACKET_FD_STEP: f64 = 1e-5;

/// Frames whose direct sums are tested by [`evaluate_ehresmann`].
#[derive(Clone, Debug)]
pub struct EhresmannInput {
    /// Fundamental fields of the big group, not orthonormalized.
    pub vertical_big: Vec<AlgebraVector>,
    pub horizontal_big: Vec<AlgebraVector>,
    /// Fundamental fields of the small group, not orthonormalized.
    pub vertical_small: Vec<AlgebraVector>,
    pub horizontal_small: Vec<AlgebraVector>,
}

impl EhresmannInput {
    pub fn at(spec: &BundleSpec, q: &GroupPoint) -> Result<Self> {
        let split = splitting_at(spec, q)?;
        Ok(Self {
            vertical_big: vertical_fields(spec, q, Subgroup::Big),
            horizontal_big: split.horizontal_big,
            vertical_small: vertical_fields(spec, q, Subgroup::Small),
            horizontal_small: split.horizontal_small,
        })
    }

    /// Negative control: overwrite the last horizontal vector of the big group with the first.
    pub fn with_duplicated_horizontal(mut self) -> Self {
        if let [first, .., last] = self.horizontal_big.as_mut_slice() {
            *last = *first;
        }
        self
    }
}

fn coord_rows(spec: &BundleSpec, vs: &[&[AlgebraVector]]) -> Vec<Vec<f64>> {
    vs.iter()
        .flat_map(|block| block.iter())
        .map(|v| spec.frame().coords(v).to_vec())
        .collect()
}

/// Rank tests `V_H ⊕ D_H = V_K ⊕ D_K = TM` upstairs and `D ⊕ ker dπ = T(M/K)` downstairs.
///
/// For the Hopf action the downstairs test runs on `S^7` itself: `D` is pushed forward by
/// `dπ_K` and `ker dπ` comes from the Jacobian of the Hopf map. For Gromoll-Meyer it runs
/// on the quotient `T_Q M / V_Δ`.
pub fn evaluate_ehresmann(
    spec: &BundleSpec,
    q: &GroupPoint,
    input: &EhresmannInput,
) -> VerificationReport {
    let rank_big = linalg::rank(&coord_rows(spec, &[&input.vertical_big, &input.horizontal_big]));
    let rank_small =
        linalg::rank(&coord_rows(spec, &[&input.vertical_small, &input.horizontal_small]));

    let rank_down = match spec.action() {
        ActionKind::Hopf => {
            let n = pi_k(q);
            let mut rows: Vec<Vec<f64>> = input
                .horizontal_big
                .iter()
                .map(|u| dpi_k(q, u).to_vec())
                .collect();
            rows.extend(sphere::hopf_kernel(&n).iter().map(|k| k.to_vec()));
            linalg::rank(&rows)
        }
        ActionKind::GromollMeyer => {
            let with = coord_rows(
                spec,
                &[&input.horizontal_big, &input.vertical_big, &input.vertical_small],
            );
            let without = coord_rows(spec, &[&input.vertical_small]);
            linalg::rank(&with) - linalg::rank(&without)
        }
    };

    let deficit = (ALGEBRA_DIM - rank_big.min(ALGEBRA_DIM))
        + (ALGEBRA_DIM - rank_small.min(ALGEBRA_DIM))
        + (QUOTIENT_DIM - rank_down.min(QUOTIENT_DIM));
    VerificationReport::new("lemma1-ehresmann", Some((*q).into()), RANK_REL_TOL)
        .with_residual("rank-H", rank_big as f64)
        .with_residual("rank-K", rank_small as f64)
        .with_residual("rank-down", rank_down as f64)
        .with_residual("rank-deficit", deficit as f64)
        .with_pass(rank_big == ALGEBRA_DIM && rank_small == ALGEBRA_DIM && rank_down == QUOTIENT_DIM)
}

pub fn check_ehresmann(spec: &BundleSpec, q: &GroupPoint) -> VerificationReport {
    match EhresmannInput::at(spec, q) {
        Ok(input) => evaluate_ehresmann(spec, q, &input),
        Err(_) => VerificationReport::new("lemma1-ehresmann", Some((*q).into()), RANK_REL_TOL)
            .with_residual("degenerate", 1.0)
            .with_pass(false),
    }
}

/// `dπ_K` restricted to `D_K` is an isometry onto `T_{π_K(Q)} S^7` (Hopf).
pub fn check_isometry(q: &GroupPoint, tolerance: f64) -> VerificationReport {
    let frame = crate::lie::standard_frame();
    let n = pi_k(q).to_reals();
    let ys: Vec<Ambient8> = HORIZONTAL_K.map(|a| dpi_k(q, frame.get(a))).collect();
    let g = linalg::gram(&ys, |v, w| sphere::metric_down(&n, v, w));
    let tangency = ys.iter().map(|y| linalg::dot(y, &n).abs()).fold(0.0, f64::max);
    VerificationReport::new("isometry-dpiK", Some((*q).into()), tolerance)
        .with_residual("gram-defect", linalg::identity_defect(&g))
        .with_residual("tangency", tangency)
        .judged_by_tolerance()
}

/// `π: S^7 → S^4` is a Riemannian submersion: on vectors horizontal for `π` at `π_K(Q)`,
/// `g_{M/K}(v, w) = g_{M/H}(dπ v, dπ w)` (Hopf).
pub fn check_submersion(q: &GroupPoint, tolerance: f64) -> VerificationReport {
    let frame = crate::lie::standard_frame();
    let n = pi_k(q);
    let x = n.to_reals();
    let ys: Vec<Ambient8> = HORIZONTAL_H.map(|a| dpi_k(q, frame.get(a))).collect();
    let images: Vec<_> = ys.iter().map(|y| sphere::dpi_hopf(&n, y)).collect();
    let mut worst = 0.0_f64;
    for (a, (ya, pa)) in ys.iter().zip(&images).enumerate() {
        for (yb, pb) in ys.iter().zip(&images).skip(a) {
            let up = sphere::metric_down(&x, ya, yb);
            let down = sphere::metric_base(pa, pb);
            worst = worst.max((up - down).abs());
        }
    }
    let horizontality = ys
        .iter()
        .map(|y| linalg::norm(&sphere::project_vertical(&x, y)))
        .fold(0.0, f64::max);
    VerificationReport::new("prop1-submersion", Some((*q).into()), tolerance)
        .with_residual("metric-agreement", worst)
        .with_residual("horizontality", horizontality)
        .judged_by_tolerance()
}

/// A local vector field on `Sp(2)`, given left-trivialized.
#[derive(Clone, Copy, Debug)]
pub enum Section {
    /// Horizontal projection, for the big group, of a fixed algebra element.
    Horizontal(AlgebraVector),
    /// Fundamental field of the small group.
    SmallVertical(GroupTangent),
}

impl Section {
    pub fn eval(&self, spec: &BundleSpec, q: &GroupPoint) -> AlgebraVector {
        match self {
            Self::Horizontal(u) => project_horizontal_at(spec, q, Subgroup::Big, u),
            Self::SmallVertical(xi) => fundamental_field_unchecked(spec, q, xi),
        }
    }
}

/// Lie bracket of two vector fields `X = Q·F(Q)`, `Y = Q·G(Q)`, left-trivialized:
/// `[F, G] + D_X G − D_Y F`, with the directional derivatives taken by central differences
/// along `Q·exp(±h F(Q))`.
pub fn vector_field_bracket(
    spec: &BundleSpec,
    q: &GroupPoint,
    x: &Section,
    y: &Section,
) -> AlgebraVector {
    let f = x.eval(spec, q);
    let g = y.eval(spec, q);
    let along = |dir: &AlgebraVector, field: &Section| {
        let h = BRACKET_FD_STEP;
        let fwd = q.compose(&mat_exp(&dir.scale(h)));
        let bwd = q.compose(&mat_exp(&dir.scale(-h)));
        (field.eval(spec, &fwd) - field.eval(spec, &bwd)).scale(0.5 / h)
    };
    bracket(&f, &g) + along(&f, y) - along(&g, x)
}

/// The sections spanning the distribution whose bracket generation is tested: the
/// horizontal bundle of the big group, plus the small group's vertical bundle for
/// Gromoll-Meyer (the preimage of `D` under `dπ_Δ`).
pub fn step2_sections(spec: &BundleSpec) -> Vec<Section> {
    let mut s: Vec<Section> = spec.frame().basis().iter().map(|e| Section::Horizontal(*e)).collect();
    if spec.action() == ActionKind::GromollMeyer {
        s.extend(spec.tangent_basis(Subgroup::Small).into_iter().map(Section::SmallVertical));
    }
    s
}

/// Rank of the span of `sections` plus all their pairwise brackets at `q`.
pub fn evaluate_step2(
    spec: &BundleSpec,
    q: &GroupPoint,
    sections: &[Section],
    check_name: &str,
) -> VerificationReport {
    let values: Vec<AlgebraVector> = sections.iter().map(|s| s.eval(spec, q)).collect();
    let mut rows = coord_rows(spec, &[&values]);
    let rank_distribution = linalg::rank(&rows);
    for (a, x) in sections.iter().enumerate() {
        for y in &sections[a + 1..] {
            let b = vector_field_bracket(spec, q, x, y);
            rows.push(spec.frame().coords(&b).to_vec());
        }
    }
    let rank = linalg::rank(&rows);
    VerificationReport::new(check_name, Some((*q).into()), RANK_REL_TOL)
        .with_residual("rank-distribution", rank_distribution as f64)
        .with_residual("rank-step2", rank as f64)
        .with_residual("rank-deficit", (ALGEBRA_DIM - rank) as f64)
        .with_pass(rank == ALGEBRA_DIM)
}

pub fn check_step2(spec: &BundleSpec, q: &GroupPoint) -> VerificationReport {
    evaluate_step2(spec, q, &step2_sections(spec), "step2-bracket-generation")
}

/// Gram matrix `I_Q(ξ_a, ξ_b) = g(σ_Q(ξ_a), σ_Q(ξ_b))` over the basis of the chosen
/// group's algebra.
pub fn bilinear_form(spec: &BundleSpec, q: &GroupPoint, which: Subgroup) -> Vec<Vec<f64>> {
    linalg::gram(&vertical_fields(spec, q, which), |a, b| a.inner(b))
}

/// The bilinear form of the Gromoll-Meyer `Δ`-action over the `i, j, k` basis.
pub fn gm_bilinear_form(q: &GroupPoint) -> [[f64; 3]; 3] {
    let g = bilinear_form(&BundleSpec::gromoll_meyer(), q, Subgroup::Small);
    std::array::from_fn(|a| std::array::from_fn(|b| g[a][b]))
}

/// Searches `exp` of random unit off-diagonal directions for a point whose Gromoll-Meyer
/// form differs from the one at the identity by at least `threshold` (Frobenius).
pub fn find_m_dependence_witness<R: Rng + ?Sized>(
    rng: &mut R,
    threshold: f64,
    attempts: usize,
) -> Option<(GroupPoint, f64)> {
    let frame = crate::lie::standard_frame();
    let at_identity = bilinear_form(&BundleSpec::gromoll_meyer(), &GroupPoint::identity(), Subgroup::Small);
    for _ in 0..attempts {
        let c = sample::normal_vec(rng, HORIZONTAL_H.len());
        let norm = linalg::norm(&c);
        if norm == 0.0 {
            continue;
        }
        let dir = frame.combine(&c.iter().map(|v| v / norm).collect::<Vec<_>>());
        let q = mat_exp(&dir);
        let form = bilinear_form(&BundleSpec::gromoll_meyer(), &q, Subgroup::Small);
        let diff = linalg::frobenius_distance(&form, &at_identity);
        if diff >= threshold {
            return Some((q, diff));
        }
    }
    None
}

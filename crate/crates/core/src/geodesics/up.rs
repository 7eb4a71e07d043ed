//! Lie-Poisson flow on `Sp(2)` in body momentum, and the oracles it is validated against.

use std::ops::Range;

use super::{DRIFT_LIMIT, GeodesicTrace, IntegratorConfig, with_scheme};
use crate::error::{Error, Result};
use crate::hamilton::{Covector, HamiltonianKind, Side, hamiltonian};
use crate::lie::{self, FramedAlgebra};
use crate::quat::{AlgebraVector, GroupPoint, QuatMat2, mat_exp, newton_polar_step};
use crate::report::VerificationReport;

/// Largest distance between `Q0` and the covector's base point.
const BASE_TOL: f64 = 1e-10;

fn check_kind(kind: HamiltonianKind) -> Result<Range<usize>> {
    match kind {
        HamiltonianKind::Full | HamiltonianKind::HorizontalH | HamiltonianKind::HorizontalK => {
            Ok(kind.indices())
        }
        other => Err(Error::Unsupported(format!(
            "upstairs geodesics for {other:?}; use Full, HorizontalH or HorizontalK"
        ))),
    }
}

fn check_start(q0: &GroupPoint, lambda0: &Covector) -> Result<()> {
    if lambda0.side() != Side::Up {
        return Err(Error::SideMismatch {
            kind: "upstairs geodesic",
            side: "down",
        });
    }
    let gap = lambda0.frame_point().distance(q0);
    if gap.is_nan() || gap > BASE_TOL {
        return Err(Error::BaseMismatch(gap));
    }
    Ok(())
}

struct Flow {
    frame: FramedAlgebra,
    keep: Range<usize>,
}

impl Flow {
    /// Orthogonal projection of `p` onto the distribution, in the algebra.
    fn velocity(&self, p: &QuatMat2) -> QuatMat2 {
        let p = AlgebraVector::skew_part(p);
        let c = self.frame.coords(&p);
        let masked: Vec<f64> = c
            .iter()
            .enumerate()
            .map(|(i, v)| if self.keep.contains(&i) { *v } else { 0.0 })
            .collect();
        *self.frame.combine(&masked).matrix()
    }

    /// `(Q u, [p, u])`.
    fn rhs(&self, q: &QuatMat2, p: &QuatMat2) -> (QuatMat2, QuatMat2) {
        let u = self.velocity(p);
        (*q * u, *p * u - u * *p)
    }

    fn rk4(&self, q: &QuatMat2, p: &QuatMat2, h: f64) -> (QuatMat2, QuatMat2) {
        let (k1q, k1p) = self.rhs(q, p);
        let (k2q, k2p) = self.rhs(&(*q + k1q.scale(h / 2.0)), &(*p + k1p.scale(h / 2.0)));
        let (k3q, k3p) = self.rhs(&(*q + k2q.scale(h / 2.0)), &(*p + k2p.scale(h / 2.0)));
        let (k4q, k4p) = self.rhs(&(*q + k3q.scale(h)), &(*p + k3p.scale(h)));
        let comb = |a: QuatMat2, b: QuatMat2, c: QuatMat2, d: QuatMat2| {
            (a + b.scale(2.0) + c.scale(2.0) + d).scale(h / 6.0)
        };
        (*q + comb(k1q, k2q, k3q, k4q), *p + comb(k1p, k2p, k3p, k4p))
    }
}

/// Integrates the normal geodesic of `kind` from `(q0, λ0)`.
pub fn integrate_up(
    q0: &GroupPoint,
    lambda0: &Covector,
    kind: HamiltonianKind,
    cfg: &IntegratorConfig,
) -> Result<GeodesicTrace<GroupPoint>> {
    let keep = check_kind(kind)?;
    check_start(q0, lambda0)?;
    let flow = Flow {
        frame: lie::standard_frame(),
        keep,
    };
    with_scheme(cfg, |c| run(&flow, q0, lambda0, kind, c))
}

fn run(
    flow: &Flow,
    q0: &GroupPoint,
    lambda0: &Covector,
    kind: HamiltonianKind,
    cfg: &IntegratorConfig,
) -> Result<GeodesicTrace<GroupPoint>> {
    let n = cfg.steps();
    let h = cfg.horizon / n as f64;
    let mut trace = GeodesicTrace {
        times: Vec::with_capacity(n + 1),
        points: Vec::with_capacity(n + 1),
        momenta: Vec::with_capacity(n + 1),
        energy: Vec::with_capacity(n + 1),
        observed_order: None,
    };
    let mut q = *q0.matrix();
    let mut p = *flow.frame.combine(lambda0.components()).matrix();
    for k in 0..=n {
        let t = k as f64 * h;
        if k > 0 {
            (q, p) = flow.rk4(&q, &p, h);
            if cfg.retraction {
                q = newton_polar_step(&q);
            }
        }
        let defect = q.unitarity_defect();
        if defect.is_nan() || defect > DRIFT_LIMIT {
            return Err(Error::DriftExceeded {
                drift: defect,
                limit: DRIFT_LIMIT,
                t,
            });
        }
        let point = GroupPoint::unchecked(q);
        let coords = flow.frame.coords(&AlgebraVector::skew_part(&p));
        let momentum = Covector::up(point, coords.to_vec())?;
        let e = hamiltonian(kind, &momentum)?;
        trace.times.push(t);
        trace.points.push(point);
        trace.momenta.push(momentum);
        trace.energy.push(e);
    }
    Ok(trace)
}

/// Splits the initial body momentum into its part in the distribution and the rest.
fn split_momentum(lambda0: &Covector, keep: &Range<usize>) -> (AlgebraVector, AlgebraVector) {
    let frame = lie::standard_frame();
    let c = lambda0.components();
    let pick = |inside: bool| -> Vec<f64> {
        c.iter()
            .enumerate()
            .map(|(i, v)| if keep.contains(&i) == inside { *v } else { 0.0 })
            .collect()
    };
    (frame.combine(&pick(true)), frame.combine(&pick(false)))
}

/// Candidate closed form `Q0·exp(t(u0 + p_v))·exp(−t p_v)`.
pub fn closed_form_up(
    q0: &GroupPoint,
    lambda0: &Covector,
    kind: HamiltonianKind,
    t: f64,
) -> Result<GroupPoint> {
    let keep = check_kind(kind)?;
    let (u0, pv) = split_momentum(lambda0, &keep);
    Ok(q0
        .compose(&mat_exp(&(u0 + pv).scale(t)))
        .compose(&mat_exp(&pv.scale(-t))))
}

/// Compares [`closed_form_up`] against [`integrate_up`] at every sample.
pub fn validate_closed_form(
    q0: &GroupPoint,
    lambda0: &Covector,
    kind: HamiltonianKind,
    cfg: &IntegratorConfig,
    tolerance: f64,
) -> Result<VerificationReport> {
    let trace = integrate_up(q0, lambda0, kind, cfg)?;
    let mut worst = 0.0_f64;
    for (t, q) in trace.times.iter().zip(&trace.points) {
        worst = worst.max(closed_form_up(q0, lambda0, kind, *t)?.distance(q));
    }
    Ok(
        VerificationReport::new("closed-form-oracle", Some((*q0).into()), tolerance)
            .with_residual("sup-distance", worst)
            .judged_by_tolerance(),
    )
}

/// Canonical flow on `R^16 × R^16` with `H(Q, P) = ½|Q·P_D(Q*P)|²`, gradients by central
/// differences; returns the point at the horizon.
///
/// Shares no code with the Lie-Poisson flow beyond matrix arithmetic.
pub fn canonical_flow_up(
    q0: &GroupPoint,
    lambda0: &Covector,
    kind: HamiltonianKind,
    steps: usize,
    horizon: f64,
) -> Result<GroupPoint> {
    let keep = check_kind(kind)?;
    check_start(q0, lambda0)?;
    let frame = lie::standard_frame();
    let ham = |z: &[f64; 32]| -> f64 {
        let q = QuatMat2::from_reals(z[..16].try_into().expect("16"));
        let p = QuatMat2::from_reals(z[16..].try_into().expect("16"));
        let body = lie::skew_coords(&frame, &(q.conj_transpose() * p));
        let u: Vec<f64> = body
            .iter()
            .enumerate()
            .map(|(i, v)| if keep.contains(&i) { *v } else { 0.0 })
            .collect();
        let moved = q * *frame.combine(&u).matrix();
        0.5 * moved.norm_sqr()
    };
    const FD: f64 = 1e-6;
    let field = |z: &[f64; 32]| -> [f64; 32] {
        let mut grad = [0.0; 32];
        for (k, g) in grad.iter_mut().enumerate() {
            let (mut a, mut b) = (*z, *z);
            a[k] += FD;
            b[k] -= FD;
            *g = (ham(&a) - ham(&b)) / (2.0 * FD);
        }
        // (Q̇, Ṗ) = (∂H/∂P, −∂H/∂Q)
        std::array::from_fn(|k| if k < 16 { grad[k + 16] } else { -grad[k - 16] })
    };
    let mut z = [0.0; 32];
    z[..16].copy_from_slice(&q0.matrix().to_reals());
    let p0 = *q0.matrix() * *frame.combine(lambda0.components()).matrix();
    z[16..].copy_from_slice(&p0.to_reals());
    let h = horizon / steps as f64;
    let axpy = |a: &[f64; 32], s: f64, b: &[f64; 32]| -> [f64; 32] {
        std::array::from_fn(|k| a[k] + s * b[k])
    };
    for _ in 0..steps {
        let k1 = field(&z);
        let k2 = field(&axpy(&z, h / 2.0, &k1));
        let k3 = field(&axpy(&z, h / 2.0, &k2));
        let k4 = field(&axpy(&z, h, &k3));
        z = std::array::from_fn(|k| z[k] + h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]));
    }
    GroupPoint::new(QuatMat2::from_reals(z[..16].try_into().expect("16")))
}

/// Compares the Lie-Poisson flow with [`canonical_flow_up`] at the horizon.
pub fn validate_lie_poisson(
    q0: &GroupPoint,
    lambda0: &Covector,
    kind: HamiltonianKind,
    steps: usize,
    horizon: f64,
    tolerance: f64,
) -> Result<VerificationReport> {
    let cfg = IntegratorConfig::new(horizon / steps as f64, horizon)?;
    let lp = integrate_up(q0, lambda0, kind, &cfg)?;
    let canonical = canonical_flow_up(q0, lambda0, kind, steps, horizon)?;
    Ok(
        VerificationReport::new("lie-poisson-vs-canonical", Some((*q0).into()), tolerance)
            .with_residual("distance", lp.last_point().distance(&canonical))
            .judged_by_tolerance(),
    )
}

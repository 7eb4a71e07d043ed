//! Canonical Hamiltonian flow on `T^* R^8` restricted to `S^7`.
//!
//! With `s = x* p` and `r² = |x|²`, the Hamiltonians extended off the sphere are
//! `H^D = ¼(|p|² − |s|²/r²)` and `H^V = ½|Im s|²/r²`: the cometric of `g_{M/K}` on the
//! horizontal and fibre parts of `p`. Both are homogeneous of degree zero in `x`, so the
//! flow preserves `|x|`.

use super::{DRIFT_LIMIT, GeodesicTrace, IntegratorConfig, with_scheme};
use crate::bundle::sphere::{self, Ambient8, SpherePoint7};
use crate::error::{Error, Result};
use crate::hamilton::{Covector, HamiltonianKind, Side, ambient_momentum, covector_from_ambient, gauge_for};
use crate::linalg;

/// Which downstairs Hamiltonian a flow uses.
#[derive(Clone, Copy)]
struct Terms {
    vertical: bool,
}

fn check_kind(kind: HamiltonianKind) -> Result<Terms> {
    match kind {
        HamiltonianKind::Horizontal => Ok(Terms { vertical: false }),
        HamiltonianKind::Quotient => Ok(Terms { vertical: true }),
        other => Err(Error::Unsupported(format!(
            "downstairs geodesics for {other:?}; use Horizontal or Quotient"
        ))),
    }
}

/// `H(x, p)` for `kind` ∈ {`Horizontal`, `Quotient`}.
pub fn ambient_hamiltonian(kind: HamiltonianKind, x: &Ambient8, p: &Ambient8) -> Result<f64> {
    let terms = check_kind(kind)?;
    Ok(hamiltonian(terms, x, p))
}

fn hamiltonian(terms: Terms, x: &Ambient8, p: &Ambient8) -> f64 {
    let r2 = linalg::dot(x, x);
    let s = sphere::hermitian(x, p);
    let mut h = 0.25 * (linalg::dot(p, p) - s.norm_sqr() / r2);
    if terms.vertical {
        h += 0.5 * s.im().norm_sqr() / r2;
    }
    h
}

/// `(∂H/∂x, ∂H/∂p)`.
pub fn ambient_hamiltonian_gradient(
    kind: HamiltonianKind,
    x: &Ambient8,
    p: &Ambient8,
) -> Result<(Ambient8, Ambient8)> {
    let terms = check_kind(kind)?;
    Ok(gradient(terms, x, p))
}

fn gradient(terms: Terms, x: &Ambient8, p: &Ambient8) -> (Ambient8, Ambient8) {
    let r2 = linalg::dot(x, x);
    let s = sphere::hermitian(x, p);
    let mut dp = sphere::scale8(&sphere::sub8(p, &sphere::right_mul(x, s.scale(1.0 / r2))), 0.5);
    let mut dx = sphere::add8(
        &sphere::scale8(&sphere::right_mul(p, s.conj()), -0.5 / r2),
        &sphere::scale8(x, 0.5 * s.norm_sqr() / (r2 * r2)),
    );
    if terms.vertical {
        let v = s.im();
        dp = sphere::add8(&dp, &sphere::scale8(&sphere::right_mul(x, v), 1.0 / r2));
        dx = sphere::sub8(
            &dx,
            &sphere::add8(
                &sphere::scale8(&sphere::right_mul(p, v), 1.0 / r2),
                &sphere::scale8(x, v.norm_sqr() / (r2 * r2)),
            ),
        );
    }
    (dx, dp)
}

fn field(terms: Terms, x: &Ambient8, p: &Ambient8) -> (Ambient8, Ambient8) {
    let (dx, dp) = gradient(terms, x, p);
    (dp, sphere::scale8(&dx, -1.0))
}

fn rk4(terms: Terms, x: &Ambient8, p: &Ambient8, h: f64) -> (Ambient8, Ambient8) {
    let shift = |a: &Ambient8, s: f64, b: &Ambient8| sphere::add8(a, &sphere::scale8(b, s));
    let (k1x, k1p) = field(terms, x, p);
    let (k2x, k2p) = field(terms, &shift(x, h / 2.0, &k1x), &shift(p, h / 2.0, &k1p));
    let (k3x, k3p) = field(terms, &shift(x, h / 2.0, &k2x), &shift(p, h / 2.0, &k2p));
    let (k4x, k4p) = field(terms, &shift(x, h, &k3x), &shift(p, h, &k3p));
    let comb = |a: &Ambient8, b: &Ambient8, c: &Ambient8, d: &Ambient8| -> Ambient8 {
        std::array::from_fn(|k| h / 6.0 * (a[k] + 2.0 * b[k] + 2.0 * c[k] + d[k]))
    };
    (
        sphere::add8(x, &comb(&k1x, &k2x, &k3x, &k4x)),
        sphere::add8(p, &comb(&k1p, &k2p, &k3p, &k4p)),
    )
}

/// Integrates the normal geodesic of `kind` from `(n0, μ0)`.
///
/// Momenta in the trace are recorded over the frame pushed forward from [`gauge_for`]
/// at each sample.
pub fn integrate_down(
    n0: &SpherePoint7,
    mu0: &Covector,
    kind: HamiltonianKind,
    cfg: &IntegratorConfig,
) -> Result<GeodesicTrace<SpherePoint7>> {
    let terms = check_kind(kind)?;
    if mu0.side() != Side::Down {
        return Err(Error::SideMismatch {
            kind: "downstairs geodesic",
            side: "up",
        });
    }
    let crate::hamilton::Base::Down { point, .. } = mu0.base() else {
        unreachable!("side checked")
    };
    let gap = point.distance(n0);
    if gap.is_nan() || gap > crate::hamilton::BASE_TOL {
        return Err(Error::BaseMismatch(gap));
    }
    let p0 = ambient_momentum(mu0)?;
    with_scheme(cfg, |c| run(terms, n0, &p0, c))
}

fn run(
    terms: Terms,
    n0: &SpherePoint7,
    p0: &Ambient8,
    cfg: &IntegratorConfig,
) -> Result<GeodesicTrace<SpherePoint7>> {
    let n = cfg.steps();
    let h = cfg.horizon / n as f64;
    let mut trace = GeodesicTrace {
        times: Vec::with_capacity(n + 1),
        points: Vec::with_capacity(n + 1),
        momenta: Vec::with_capacity(n + 1),
        energy: Vec::with_capacity(n + 1),
        observed_order: None,
    };
    let (mut x, mut p) = (n0.to_reals(), *p0);
    for k in 0..=n {
        let t = k as f64 * h;
        if k > 0 {
            (x, p) = rk4(terms, &x, &p, h);
            if cfg.retraction {
                x = sphere::scale8(&x, 1.0 / linalg::norm(&x));
            }
        }
        let defect = (linalg::norm(&x) - 1.0).abs();
        if defect.is_nan() || defect > DRIFT_LIMIT {
            return Err(Error::DriftExceeded {
                drift: defect,
                limit: DRIFT_LIMIT,
                t,
            });
        }
        let e = hamiltonian(terms, &x, &p);
        let (b, d) = sphere::split(&x);
        let point = SpherePoint7::unchecked(b, d);
        trace.times.push(t);
        trace.points.push(point);
        trace.momenta.push(covector_from_ambient(gauge_for(&point), &p));
        trace.energy.push(e);
    }
    Ok(trace)
}

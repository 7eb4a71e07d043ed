//! Normal geodesics of the Hopf bundle, integrated upstairs on `Sp(2)` and downstairs on
//! `S^7` by unrelated formulations, and the harnesses comparing them.
//!
//! Upstairs uses body momentum `p ∈ sp(2)` and the Lie-Poisson equations
//! `Q̇ = Q·u, ṗ = [p, u]` with `u` the projection of `p` onto the distribution.
//! Downstairs uses canonical coordinates `(x, p) ∈ R^8 × R^8`.

mod down;
mod up;

use std::fmt::Write as _;
use std::io;

use serde::{Deserialize, Serialize};

use crate::bundle::sphere::{self, SpherePoint4, SpherePoint7};
use crate::bundle::{pi_h, pi_k};
use crate::error::{Error, Result};
use crate::hamilton::{Covector, HamiltonianKind, pullback};
use crate::lie::VERTICAL_K;
use crate::quat::GroupPoint;
use crate::report::VerificationReport;

pub use down::{ambient_hamiltonian, ambient_hamiltonian_gradient, integrate_down};
pub use up::{
    canonical_flow_up, closed_form_up, integrate_up, validate_closed_form, validate_lie_poisson,
};

/// Constraint drift beyond which an integration aborts.
pub const DRIFT_LIMIT: f64 = 1e-6;

/// Tolerance of the projected-geodesic comparisons over unit horizon; scaled linearly
/// with the horizon.
pub const COMPARISON_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    #[default]
    #[serde(rename = "RK4-fixed")]
    Rk4Fixed,
    /// Fixed step, plus reruns at half and quarter step to estimate the order.
    #[serde(rename = "RK4-halving")]
    Rk4Halving,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub step: f64,
    pub horizon: f64,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default = "default_retraction")]
    pub retraction: bool,
}

fn default_retraction() -> bool {
    true
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            step: 1e-3,
            horizon: 1.0,
            scheme: Scheme::Rk4Fixed,
            retraction: true,
        }
    }
}

impl IntegratorConfig {
    pub fn new(step: f64, horizon: f64) -> Result<Self> {
        let cfg = Self {
            step,
            horizon,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn without_retraction(mut self) -> Self {
        self.retraction = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.step.is_finite()
            && self.horizon.is_finite()
            && self.step > 0.0
            && self.horizon > 0.0
            && self.step <= self.horizon;
        if !ok {
            return Err(Error::InvalidConfig(format!(
                "need 0 < step <= horizon, got step {} and horizon {}",
                self.step, self.horizon
            )));
        }
        Ok(())
    }

    /// Number of steps; the step is shrunk so that they land exactly on the horizon.
    pub fn steps(&self) -> usize {
        (self.horizon / self.step - 1e-9).ceil().max(1.0) as usize
    }

    fn at_step(&self, step: f64) -> Self {
        Self {
            step,
            scheme: Scheme::Rk4Fixed,
            ..*self
        }
    }
}

/// Observed order from final states at steps `h`, `h/2`, `h/4`.
fn observed_order(e_coarse: f64, e_fine: f64) -> f64 {
    (e_coarse / e_fine).log2()
}

/// A point type a trace can be written out for.
pub trait TracePoint {
    fn columns() -> Vec<String>;
    fn reals(&self) -> Vec<f64>;
    /// Distance from the manifold constraint.
    fn constraint_defect(&self) -> f64;
    fn distance(&self, other: &Self) -> f64;
}

impl TracePoint for GroupPoint {
    fn columns() -> Vec<String> {
        ["a", "b", "c", "d"]
            .iter()
            .flat_map(|e| ["w", "x", "y", "z"].map(|c| format!("q_{e}_{c}")))
            .collect()
    }
    fn reals(&self) -> Vec<f64> {
        self.matrix().to_reals().to_vec()
    }
    fn constraint_defect(&self) -> f64 {
        self.unitarity_defect()
    }
    fn distance(&self, other: &Self) -> f64 {
        GroupPoint::distance(self, other)
    }
}

impl TracePoint for SpherePoint7 {
    fn columns() -> Vec<String> {
        ["b", "d"]
            .iter()
            .flat_map(|e| ["w", "x", "y", "z"].map(|c| format!("x_{e}_{c}")))
            .collect()
    }
    fn reals(&self) -> Vec<f64> {
        self.to_reals().to_vec()
    }
    fn constraint_defect(&self) -> f64 {
        (crate::linalg::norm(&self.to_reals()) - 1.0).abs()
    }
    fn distance(&self, other: &Self) -> f64 {
        SpherePoint7::distance(self, other)
    }
}

/// Time samples of an integrated geodesic. Immutable once produced.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicTrace<P> {
    pub times: Vec<f64>,
    pub points: Vec<P>,
    pub momenta: Vec<Covector>,
    pub energy: Vec<f64>,
    /// Set by [`Scheme::Rk4Halving`].
    pub observed_order: Option<f64>,
}

impl<P: TracePoint> GeodesicTrace<P> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_point(&self) -> &P {
        self.points.last().expect("traces are never empty")
    }

    pub fn last_momentum(&self) -> &Covector {
        self.momenta.last().expect("traces are never empty")
    }

    pub fn energy_drift(&self) -> f64 {
        let e0 = self.energy[0];
        self.energy.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max)
    }

    pub fn constraint_drift(&self) -> f64 {
        self.points
            .iter()
            .map(TracePoint::constraint_defect)
            .fold(0.0, f64::max)
    }

    /// CSV with columns `t`, the point's reals, the momentum's frame components, `energy`.
    pub fn to_csv(&self) -> String {
        let mut header = vec!["t".to_string()];
        header.extend(P::columns());
        let n_mom = self.momenta.first().map_or(0, |m| m.components().len());
        header.extend((0..n_mom).map(|i| format!("p_{i}")));
        header.push("energy".into());
        let mut out = header.join(",");
        out.push('\n');
        for (((t, q), m), e) in self.times.iter().zip(&self.points).zip(&self.momenta).zip(&self.energy) {
            let mut row = vec![t.to_string()];
            row.extend(q.reals().iter().map(f64::to_string));
            row.extend(m.components().iter().map(f64::to_string));
            row.push(e.to_string());
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    pub fn write_csv(&self, mut w: impl io::Write) -> io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }
}

/// Distance between the final states of two runs.
fn final_gap<P: TracePoint>(a: &GeodesicTrace<P>, b: &GeodesicTrace<P>) -> f64 {
    a.last_point().distance(b.last_point())
}

/// Runs `integrate` at `cfg.step` and, for the halving scheme, at half and quarter step.
fn with_scheme<P: TracePoint>(
    cfg: &IntegratorConfig,
    integrate: impl Fn(&IntegratorConfig) -> Result<GeodesicTrace<P>>,
) -> Result<GeodesicTrace<P>> {
    cfg.validate()?;
    let base = cfg.at_step(cfg.step);
    let mut trace = integrate(&base)?;
    if cfg.scheme == Scheme::Rk4Halving {
        let half = integrate(&cfg.at_step(cfg.step / 2.0))?;
        let quarter = integrate(&cfg.at_step(cfg.step / 4.0))?;
        trace.observed_order = Some(observed_order(final_gap(&trace, &half), final_gap(&half, &quarter)));
    }
    Ok(trace)
}

/// The projection applied by [`project_trace`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Projection {
    PiK,
    PiH,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProjectedTrace {
    S7 { times: Vec<f64>, points: Vec<SpherePoint7> },
    S4 { times: Vec<f64>, points: Vec<SpherePoint4> },
}

impl ProjectedTrace {
    pub fn times(&self) -> &[f64] {
        match self {
            Self::S7 { times, .. } | Self::S4 { times, .. } => times,
        }
    }
}

pub fn project_trace(trace: &GeodesicTrace<GroupPoint>, which: Projection) -> Result<ProjectedTrace> {
    let times = trace.times.clone();
    Ok(match which {
        Projection::PiK => ProjectedTrace::S7 {
            times,
            points: trace.points.iter().map(pi_k).collect(),
        },
        Projection::PiH => ProjectedTrace::S4 {
            times,
            points: trace.points.iter().map(pi_h).collect::<Result<_>>()?,
        },
    })
}

fn sup_distance<T>(a: &[T], b: &[T], dist: impl Fn(&T, &T) -> f64) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| dist(x, y)).fold(0.0, f64::max)
}

fn failed(name: &str, q0: &GroupPoint, tol: f64, e: &Error) -> VerificationReport {
    let key = match e {
        Error::DriftExceeded { .. } => "drift",
        Error::BaseMismatch(_) => "base-mismatch",
        _ => "error",
    };
    VerificationReport::new(name, Some((*q0).into()), tol)
        .with_residual(key, f64::INFINITY)
        .with_pass(false)
}

/// Upstairs and downstairs solutions for the same downstairs initial covector.
struct Pair {
    up: GeodesicTrace<GroupPoint>,
    down: GeodesicTrace<SpherePoint7>,
}

fn solve_pair(
    q0: &GroupPoint,
    lambda0: &Covector,
    mu0: &Covector,
    cfg: &IntegratorConfig,
) -> Result<Pair> {
    let up = integrate_up(q0, lambda0, HamiltonianKind::HorizontalH, cfg)?;
    let down = integrate_down(&pi_k(q0), mu0, HamiltonianKind::Horizontal, cfg)?;
    Ok(Pair { up, down })
}

/// Sup over the samples of `|π_K(γ_up(t)) − γ_down(t)|`, where the upstairs geodesic
/// starts from `π_K^* μ0`.
pub fn theorem1_check(q0: &GroupPoint, mu0: &Covector, cfg: &IntegratorConfig) -> VerificationReport {
    match pullback(mu0, q0) {
        Ok(lambda0) => theorem1_check_with(q0, &lambda0, mu0, cfg),
        Err(e) => failed("theorem1", q0, comparison_tol(cfg), &e),
    }
}

/// [`theorem1_check`] with an explicit upstairs initial covector, for negative controls.
pub fn theorem1_check_with(
    q0: &GroupPoint,
    lambda0: &Covector,
    mu0: &Covector,
    cfg: &IntegratorConfig,
) -> VerificationReport {
    let tol = comparison_tol(cfg);
    match solve_pair(q0, lambda0, mu0, cfg) {
        Ok(Pair { up, down }) => {
            let projected: Vec<SpherePoint7> = up.points.iter().map(pi_k).collect();
            let d = sup_distance(&projected, &down.points, |a, b| a.distance(b));
            VerificationReport::new("theorem1", Some((*q0).into()), tol)
                .with_residual("sup-distance", d)
                .judged_by_tolerance()
        }
        Err(e) => failed("theorem1", q0, tol, &e),
    }
}

/// Negative control: the pullback plus `size` in the first `V_K` component.
pub fn vertically_perturbed_lift(q0: &GroupPoint, mu0: &Covector, size: f64) -> Result<Covector> {
    let lambda = pullback(mu0, q0)?;
    let mut c = lambda.components().to_vec();
    c[VERTICAL_K.start] += size;
    Covector::up(*q0, c)
}

/// Sup over the samples of the distance on `S^4` between `π_H(γ_up(t))` and the Hopf image
/// of `γ_down(t)`.
pub fn corollary_check(q0: &GroupPoint, mu0: &Covector, cfg: &IntegratorConfig) -> VerificationReport {
    let tol = comparison_tol(cfg);
    let run = || -> Result<f64> {
        let lambda0 = pullback(mu0, q0)?;
        let Pair { up, down } = solve_pair(q0, &lambda0, mu0, cfg)?;
        let ProjectedTrace::S4 { points, .. } = project_trace(&up, Projection::PiH)? else {
            unreachable!("π_H lands on S^4")
        };
        let hopf: Vec<SpherePoint4> = down.points.iter().map(sphere::pi_hopf).collect();
        Ok(sup_distance(&points, &hopf, |a, b| a.distance(b)))
    };
    match run() {
        Ok(d) => VerificationReport::new("corollary", Some((*q0).into()), tol)
            .with_residual("sup-distance", d)
            .judged_by_tolerance(),
        Err(e) => failed("corollary", q0, tol, &e),
    }
}

fn comparison_tol(cfg: &IntegratorConfig) -> f64 {
    COMPARISON_TOL * cfg.horizon.max(1.0)
}

/// Integrates to the horizon, then from the end with negated momentum; returns the
/// distance of the result from the start.
pub fn reversibility_up(
    q0: &GroupPoint,
    lambda0: &Covector,
    kind: HamiltonianKind,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let fwd = integrate_up(q0, lambda0, kind, cfg)?;
    let back = integrate_up(fwd.last_point(), &fwd.last_momentum().scale(-1.0), kind, cfg)?;
    Ok(back.last_point().distance(q0))
}

pub fn reversibility_down(
    n0: &SpherePoint7,
    mu0: &Covector,
    kind: HamiltonianKind,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let fwd = integrate_down(n0, mu0, kind, cfg)?;
    let back = integrate_down(fwd.last_point(), &fwd.last_momentum().scale(-1.0), kind, cfg)?;
    Ok(back.last_point().distance(n0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamilton::Side;
    use crate::sample;

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::new(0.0, 1.0).is_err());
        assert!(IntegratorConfig::new(2.0, 1.0).is_err());
        assert!(IntegratorConfig::new(f64::NAN, 1.0).is_err());
        let cfg = IntegratorConfig::new(1e-3, 1.0).unwrap();
        assert_eq!(cfg.steps(), 1000);
        assert_eq!(IntegratorConfig::new(0.3, 1.0).unwrap().steps(), 4);
        let json = r#"{"step": 0.01, "horizon": 0.5, "scheme": "RK4-halving"}"#;
        let cfg: IntegratorConfig = serde_json::from_str(json).unwrap();
        assert_eq!(cfg.scheme, Scheme::Rk4Halving);
        assert!(cfg.retraction);
    }

    #[test]
    fn index_one_momentum_gives_agreeing_great_circles() {
        let id = GroupPoint::identity();
        let mu = Covector::unit(Side::Down, id, 0).unwrap();
        let cfg = IntegratorConfig::default();
        let r = theorem1_check(&id, &mu, &cfg);
        assert!(r.pass, "{r:?}");
        assert!(corollary_check(&id, &mu, &cfg).pass);

        let up = integrate_up(&id, &pullback(&mu, &id).unwrap(), HamiltonianKind::HorizontalH, &cfg)
            .unwrap();
        let ProjectedTrace::S7 { times, points } = project_trace(&up, Projection::PiK).unwrap() else {
            panic!()
        };
        for (t, n) in times.iter().zip(&points) {
            let s = t / std::f64::consts::SQRT_2;
            let want = [s.sin(), 0., 0., 0., s.cos(), 0., 0., 0.];
            assert!(crate::linalg::norm(&sphere::sub8(&n.to_reals(), &want)) < 1e-9);
        }
        let ProjectedTrace::S4 { points, .. } = project_trace(&up, Projection::PiH).unwrap() else {
            panic!()
        };
        for (p, n) in points.iter().zip(project_k(&up)) {
            assert!(p.distance(&sphere::pi_hopf(&n)) < 1e-12);
        }
    }

    fn project_k(t: &GeodesicTrace<GroupPoint>) -> Vec<SpherePoint7> {
        match project_trace(t, Projection::PiK).unwrap() {
            ProjectedTrace::S7 { points, .. } => points,
            ProjectedTrace::S4 { .. } => unreachable!(),
        }
    }

    #[test]
    fn zero_momentum_is_constant() {
        let q = sample::random_group_point(&mut sample::rng(1));
        let mu = Covector::zero(Side::Down, q);
        let cfg = IntegratorConfig::new(0.1, 1.0).unwrap();
        let r = corollary_check(&q, &mu, &cfg);
        assert!(r.residual("sup-distance").unwrap() < 1e-15);
        let ProjectedTrace::S7 { points, .. } = project_trace(
            &integrate_up(&GroupPoint::identity(), &Covector::zero(Side::Up, GroupPoint::identity()), HamiltonianKind::HorizontalH, &cfg).unwrap(),
            Projection::PiK,
        )
        .unwrap() else {
            panic!()
        };
        assert!(points.iter().all(|n| n.to_reals() == [0., 0., 0., 0., 1., 0., 0., 0.]));
    }

    #[test]
    fn theorem1_on_random_data_and_negative_control() {
        let mut rng = sample::rng(2);
        let cfg = IntegratorConfig::default();
        let mut worst_control = 0.0_f64;
        for _ in 0..3 {
            let q = sample::random_group_point(&mut rng);
            let mu = Covector::down(q, sample::normal_vec(&mut rng, 7)).unwrap();
            let r = theorem1_check(&q, &mu, &cfg);
            assert!(r.pass, "{r:?}");
            let fake = vertically_perturbed_lift(&q, &mu, 0.5).unwrap();
            let c = theorem1_check_with(&q, &fake, &mu, &cfg);
            worst_control = worst_control.max(c.residual("sup-distance").unwrap());
        }
        assert!(worst_control > 1e-2);
    }

    #[test]
    fn csv_layout() {
        let id = GroupPoint::identity();
        let cfg = IntegratorConfig::new(0.5, 1.0).unwrap();
        let t = integrate_up(&id, &Covector::unit(Side::Up, id, 0).unwrap(), HamiltonianKind::Full, &cfg)
            .unwrap();
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        let header: Vec<&str> = lines[0].split(',').collect();
        assert_eq!(header.len(), 1 + 16 + 10 + 1);
        assert_eq!(header[0], "t");
        assert_eq!(header[1], "q_a_w");
        assert_eq!(*header.last().unwrap(), "energy");
        assert_eq!(lines[1].split(',').count(), header.len());
        assert_eq!(csv, t.to_csv());
    }

    #[test]
    fn halving_scheme_reports_fourth_order() {
        let mut rng = sample::rng(3);
        let q = sample::random_group_point(&mut rng);
        let lambda = Covector::up(q, sample::normal_vec(&mut rng, 10)).unwrap();
        let cfg = IntegratorConfig::new(0.1, 1.0).unwrap().with_scheme(Scheme::Rk4Halving);
        let t = integrate_up(&q, &lambda, HamiltonianKind::HorizontalH, &cfg).unwrap();
        let order = t.observed_order.unwrap();
        assert!((3.5..=4.5).contains(&order), "{order}");
    }
}

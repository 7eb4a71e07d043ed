//! Randomized verification sweeps, one per structural property, with their negative
//! controls.
//!
//! Samples are drawn sequentially from a `ChaCha8Rng` seeded with the configured seed, then
//! evaluated in parallel; reports come back in sample order.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bundle::{
    self, ActionKind, BundleSpec, EhresmannInput, Section, Subgroup, bilinear_form,
    check_ehresmann, check_isometry, check_step2, check_submersion, evaluate_ehresmann,
    evaluate_step2, find_m_dependence_witness, twistor_check,
};
use crate::error::{Error, Result};
use crate::geodesics::{
    IntegratorConfig, corollary_check, theorem1_check, theorem1_check_with,
    vertically_perturbed_lift,
};
use crate::hamilton::{
    Covector, DOWN_DIM, fake_pullback, verify_prop2, verify_prop2_with, verify_sharp_diagram,
};
use crate::linalg;
use crate::quat::GroupPoint;
use crate::report::VerificationReport;
use crate::sample::{self, SampleRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Lemma1,
    Submersion,
    Prop2,
    SharpDiagram,
    Theorem1,
    Corollary,
    Step2,
    Bilinear,
    Twistor,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::EACH
            .into_iter()
            .chain([Self::All])
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown suite {s:?}")))
    }
}

impl Suite {
    /// Every concrete suite, in the order `All` runs them.
    pub const EACH: [Self; 9] = [
        Self::Lemma1,
        Self::Submersion,
        Self::Prop2,
        Self::SharpDiagram,
        Self::Theorem1,
        Self::Corollary,
        Self::Step2,
        Self::Bilinear,
        Self::Twistor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Lemma1 => "lemma1",
            Self::Submersion => "submersion",
            Self::Prop2 => "prop2",
            Self::SharpDiagram => "sharp-diagram",
            Self::Theorem1 => "theorem1",
            Self::Corollary => "corollary",
            Self::Step2 => "step2",
            Self::Bilinear => "bilinear",
            Self::Twistor => "twistor",
            Self::All => "all",
        }
    }

    pub fn default_samples(self) -> usize {
        match self {
            Self::Prop2 | Self::SharpDiagram => 1000,
            Self::Theorem1 | Self::Corollary | Self::Step2 => 20,
            _ => 100,
        }
    }

    /// Whether the suite is defined for the Gromoll-Meyer bundle, which is not of constant
    /// bi-invariant type and has no Hamiltonian or geodesic machinery here.
    pub fn supports(self, action: ActionKind) -> bool {
        action == ActionKind::Hopf
            || matches!(self, Self::Lemma1 | Self::Step2 | Self::Bilinear | Self::All)
    }

    /// Residuals summarized by [`SuiteReport::max_residual`].
    fn headline(self) -> &'static [&'static str] {
        match self {
            Self::Lemma1 | Self::Step2 => &["rank-deficit"],
            Self::Submersion => &["metric-agreement", "horizontality", "gram-defect", "tangency"],
            Self::Prop2 => &["a", "b", "c"],
            Self::SharpDiagram => &["diagram"],
            Self::Theorem1 | Self::Corollary => &["sup-distance"],
            Self::Bilinear => &["constancy"],
            Self::Twistor => &["route-agreement", "phase-invariance"],
            Self::All => &[],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub bundle: ActionKind,
    /// `None` picks the suite's default.
    pub samples: Option<usize>,
    pub seed: u64,
    pub integrator: IntegratorConfig,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            bundle: ActionKind::Hopf,
            samples: None,
            seed: 0,
            integrator: IntegratorConfig::default(),
        }
    }
}

/// Outcome of one suite: every check run, every negative control, and a verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SuiteReport {
    pub suite: String,
    pub bundle: ActionKind,
    pub samples: usize,
    pub seed: u64,
    pub pass: bool,
    pub max_residual: f64,
    #[serde(flatten)]
    pub extra: BTreeMap<String, serde_json::Value>,
    pub checks: Vec<VerificationReport>,
    /// Each passes when the control detected the deliberately broken input.
    pub negative_controls: Vec<VerificationReport>,
}

impl SuiteReport {
    fn new(suite: Suite, cfg: &SuiteConfig, samples: usize) -> Self {
        Self {
            suite: suite.name().into(),
            bundle: cfg.bundle,
            samples,
            seed: cfg.seed,
            pass: false,
            max_residual: 0.0,
            extra: BTreeMap::new(),
            checks: Vec::new(),
            negative_controls: Vec::new(),
        }
    }

    fn finish(mut self, suite: Suite) -> Self {
        let keys = suite.headline();
        self.max_residual = self
            .checks
            .iter()
            .flat_map(|c| keys.iter().filter_map(|k| c.residual(k)))
            .map(|r| if r.is_nan() { f64::INFINITY } else { r })
            .fold(0.0, f64::max);
        self.pass = !self.checks.is_empty()
            && self.checks.iter().all(|c| c.pass)
            && self.negative_controls.iter().all(|c| c.pass);
        self
    }

    /// Number of checks and controls that failed.
    pub fn failures(&self) -> usize {
        self.checks.iter().chain(&self.negative_controls).filter(|c| !c.pass).count()
    }
}

/// Results of one or more suites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: bool,
    pub suites: Vec<SuiteReport>,
}

impl Summary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Runs `suite` (or, for [`Suite::All`], every suite the bundle supports).
pub fn run(suite: Suite, cfg: &SuiteConfig) -> Result<Summary> {
    cfg.integrator.validate()?;
    let suites: Vec<Suite> = match suite {
        Suite::All => Suite::EACH.into_iter().filter(|s| s.supports(cfg.bundle)).collect(),
        one if one.supports(cfg.bundle) => vec![one],
        one => {
            return Err(Error::Unsupported(format!(
                "suite {} for the {} bundle",
                one.name(),
                bundle_name(cfg.bundle)
            )));
        }
    };
    let reports = suites.into_iter().map(|s| run_one(s, cfg)).collect::<Result<Vec<_>>>()?;
    Ok(Summary {
        pass: reports.iter().all(|r| r.pass),
        suites: reports,
    })
}

fn bundle_name(a: ActionKind) -> &'static str {
    match a {
        ActionKind::Hopf => "hopf",
        ActionKind::GromollMeyer => "gromoll-meyer",
    }
}

fn run_one(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let n = cfg.samples.unwrap_or(suite.default_samples());
    if n == 0 {
        return Err(Error::InvalidConfig("--samples must be positive".into()));
    }
    let mut rng = sample::rng(cfg.seed);
    let spec = BundleSpec::new(cfg.bundle);
    let mut report = SuiteReport::new(suite, cfg, n);
    match suite {
        Suite::Lemma1 => lemma1(&spec, &mut rng, n, &mut report),
        Suite::Submersion => submersion(&mut rng, n, &mut report),
        Suite::Prop2 => prop2(&mut rng, n, &mut report),
        Suite::SharpDiagram => {
            let data = covectors(&mut rng, n);
            report.checks = data.par_iter().map(|(q, mu)| verify_sharp_diagram(q, mu)).collect();
        }
        Suite::Theorem1 => theorem1(&mut rng, n, &cfg.integrator, &mut report),
        Suite::Corollary => {
            let data = covectors(&mut rng, n);
            report.checks = data
                .par_iter()
                .map(|(q, mu)| corollary_check(q, mu, &cfg.integrator))
                .collect();
        }
        Suite::Step2 => step2(&spec, &mut rng, n, &mut report),
        Suite::Bilinear => bilinear(&spec, &mut rng, n, &mut report),
        Suite::Twistor => {
            let zs: Vec<_> = (0..n).map(|_| sample::random_unit_c4(&mut rng)).collect();
            report.checks = zs
                .par_iter()
                .map(|z| twistor_check(z, 1e-12))
                .collect::<Result<_>>()?;
        }
        Suite::All => unreachable!("expanded by run"),
    }
    Ok(report.finish(suite))
}

fn points(rng: &mut SampleRng, n: usize) -> Vec<GroupPoint> {
    (0..n).map(|_| sample::random_group_point(rng)).collect()
}

/// Random `(Q, μ)` with `μ` a downstairs covector in the frame pushed forward from `Q`.
fn covectors(rng: &mut SampleRng, n: usize) -> Vec<(GroupPoint, Covector)> {
    (0..n)
        .map(|_| {
            let q = sample::random_group_point(rng);
            let mu = Covector::down(q, sample::normal_vec(rng, DOWN_DIM)).expect("seven components");
            (q, mu)
        })
        .collect()
}

/// A control passes when `detected` holds.
fn control(name: &str, residual: &str, value: f64, threshold: f64, detected: bool) -> VerificationReport {
    VerificationReport::new(name, None, threshold)
        .with_residual(residual, value)
        .with_pass(detected)
}

fn lemma1(spec: &BundleSpec, rng: &mut SampleRng, n: usize, report: &mut SuiteReport) {
    let qs = points(rng, n);
    report.checks = qs.par_iter().map(|q| check_ehresmann(spec, q)).collect();
    let q = qs[0];
    let broken = EhresmannInput::at(spec, &q).map(|i| evaluate_ehresmann(spec, &q, &i.with_duplicated_horizontal()));
    let (deficit, detected) = match broken {
        Ok(r) => (r.residual("rank-deficit").unwrap_or(0.0), !r.pass),
        Err(_) => (f64::NAN, false),
    };
    report
        .negative_controls
        .push(control("lemma1-duplicated-vector", "rank-deficit", deficit, 1.0, detected));
}

fn submersion(rng: &mut SampleRng, n: usize, report: &mut SuiteReport) {
    let qs = points(rng, n);
    report.checks = qs
        .par_iter()
        .flat_map_iter(|q| [check_submersion(q, 1e-10), check_isometry(q, 1e-10)])
        .collect();
}

fn prop2(rng: &mut SampleRng, n: usize, report: &mut SuiteReport) {
    let data = covectors(rng, n);
    // Gauge: the same covector pulled back at another point of the fibre.
    let gauges: Vec<_> = (0..n).map(|_| sample::random_unit_quaternion(rng)).collect();
    report.checks = data
        .par_iter()
        .zip(&gauges)
        .flat_map_iter(|((q, mu), g)| {
            let moved = bundle::act(
                &BundleSpec::hopf(),
                q,
                &bundle::GroupElement::new(*g, crate::quat::Quaternion::ONE).expect("unit"),
            )
            .expect("unit parameters");
            let mut gauge = verify_prop2(&moved, mu);
            gauge.check_name = "prop2-gauge".into();
            [verify_prop2(q, mu), gauge]
        })
        .collect();
    let worst = data
        .par_iter()
        .map(|(q, mu)| {
            verify_prop2_with(q, mu, fake_pullback, 1e-12)
                .residual("a")
                .unwrap_or(0.0)
        })
        .reduce(|| 0.0, f64::max);
    report
        .negative_controls
        .push(control("prop2-fake-pullback", "a", worst, 0.1, worst > 0.1));
}

fn theorem1(rng: &mut SampleRng, n: usize, integrator: &IntegratorConfig, report: &mut SuiteReport) {
    let data = covectors(rng, n);
    report.checks = data
        .par_iter()
        .map(|(q, mu)| theorem1_check(q, mu, integrator))
        .collect();
    let controls: Vec<f64> = data
        .par_iter()
        .take(3)
        .map(|(q, mu)| {
            vertically_perturbed_lift(q, mu, 0.5)
                .map(|l| theorem1_check_with(q, &l, mu, integrator))
                .ok()
                .and_then(|r| r.residual("sup-distance"))
                .unwrap_or(0.0)
        })
        .collect();
    let worst = controls.into_iter().fold(0.0, f64::max);
    report
        .negative_controls
        .push(control("theorem1-vertical-perturbation", "sup-distance", worst, 1e-2, worst > 1e-2));
}

fn step2(spec: &BundleSpec, rng: &mut SampleRng, n: usize, report: &mut SuiteReport) {
    let qs = points(rng, n);
    report.checks = qs.par_iter().map(|q| check_step2(spec, q)).collect();
    let frame = spec.frame();
    let two = [Section::Horizontal(*frame.get(0)), Section::Horizontal(*frame.get(1))];
    let r = evaluate_step2(spec, &qs[0], &two, "step2-two-sections");
    let deficit = r.residual("rank-deficit").unwrap_or(0.0);
    report
        .negative_controls
        .push(control("step2-two-sections", "rank-deficit", deficit, 1.0, !r.pass));
}

fn bilinear(spec: &BundleSpec, rng: &mut SampleRng, n: usize, report: &mut SuiteReport) {
    match spec.action() {
        ActionKind::Hopf => {
            let at_identity = bilinear_form(spec, &GroupPoint::identity(), Subgroup::Big);
            let qs = points(rng, n);
            report.checks = qs
                .par_iter()
                .map(|q| {
                    let g = bilinear_form(spec, q, Subgroup::Big);
                    VerificationReport::new("bilinear-constancy", Some((*q).into()), 1e-12)
                        .with_residual("constancy", linalg::frobenius_distance(&g, &at_identity))
                        .judged_by_tolerance()
                })
                .collect();
            report.extra.insert("m-dependent".into(), false.into());
        }
        ActionKind::GromollMeyer => {
            let found = find_m_dependence_witness(rng, 0.1, n.max(100));
            let (point, diff) = match found {
                Some((q, d)) => (Some(q.into()), d),
                None => (None, 0.0),
            };
            report.checks.push(
                VerificationReport {
                    point,
                    ..VerificationReport::new("bilinear-m-dependence", None, 0.1)
                }
                .with_residual("frobenius-difference", diff)
                .with_pass(diff >= 0.1),
            );
            report.extra.insert("m-dependent".into(), (diff >= 0.1).into());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(bundle: ActionKind, samples: usize) -> SuiteConfig {
        SuiteConfig {
            bundle,
            samples: Some(samples),
            seed: 7,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn every_hopf_suite_passes_on_a_few_samples() {
        let s = run(Suite::All, &cfg(ActionKind::Hopf, 3)).unwrap();
        assert_eq!(s.suites.len(), 9);
        for r in &s.suites {
            assert!(r.pass, "{} failed: {:?}", r.suite, r);
        }
    }

    #[test]
    fn gromoll_meyer_runs_its_supported_suites() {
        let s = run(Suite::All, &cfg(ActionKind::GromollMeyer, 3)).unwrap();
        let names: Vec<&str> = s.suites.iter().map(|r| r.suite.as_str()).collect();
        assert_eq!(names, ["lemma1", "step2", "bilinear"]);
        assert!(s.pass);
        let bilinear = &s.suites[2];
        assert_eq!(bilinear.extra["m-dependent"], true);
        assert!(run(Suite::Prop2, &cfg(ActionKind::GromollMeyer, 3)).is_err());
    }

    #[test]
    fn reports_are_deterministic() {
        let a = serde_json::to_string(&run(Suite::Prop2, &cfg(ActionKind::Hopf, 20)).unwrap()).unwrap();
        let b = serde_json::to_string(&run(Suite::Prop2, &cfg(ActionKind::Hopf, 20)).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn report_json_fields() {
        let s = run(Suite::Bilinear, &cfg(ActionKind::GromollMeyer, 1)).unwrap();
        let v = serde_json::to_value(&s).unwrap();
        let r = &v["suites"][0];
        for key in ["suite", "bundle", "samples", "seed", "pass", "max-residual", "checks", "negative-controls", "m-dependent"] {
            assert!(r.get(key).is_some(), "{key}");
        }
        assert_eq!(r["bundle"], "gromoll-meyer");
    }

    #[test]
    fn zero_samples_is_a_config_error() {
        assert!(matches!(run(Suite::Twistor, &cfg(ActionKind::Hopf, 0)), Err(Error::InvalidConfig(_))));
    }
}

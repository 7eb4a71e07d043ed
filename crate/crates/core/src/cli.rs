//! Command-line front end: `frames`, `geodesic` and `verify`.
//!
//! Exit codes: 0 success, 1 a check failed or an integration drifted, 2 bad configuration.
//! Flags override values from `--config`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bundle::{ActionKind, BundleSpec, TangentFrameAt, splitting_at};
use crate::error::{Error, Result};
use crate::geodesics::{DRIFT_LIMIT, IntegratorConfig, Scheme, integrate_down, integrate_up};
use crate::hamilton::{Covector, HamiltonianKind};
use crate::lie::{FramedAlgebra, standard_frame};
use crate::linalg;
use crate::quat::GroupPoint;
use crate::suites::{self, Suite, SuiteConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "sp2geo", version, about = "Sub-Riemannian geodesics on nested bundles over Sp(2)")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the standard frame of sp(2) and the vertical/horizontal splitting at a point.
    Frames(FramesArgs),
    /// Integrate a normal geodesic and write its trace as CSV.
    Geodesic(GeodesicArgs),
    /// Run a verification suite and print a JSON report.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum BundleArg {
    Hopf,
    GromollMeyer,
}

impl From<BundleArg> for ActionKind {
    fn from(b: BundleArg) -> Self {
        match b {
            BundleArg::Hopf => Self::Hopf,
            BundleArg::GromollMeyer => Self::GromollMeyer,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum SideArg {
    Up,
    Down,
}

/// Which Hamiltonian drives a geodesic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum KindArg {
    /// Sub-Riemannian: `D_H` upstairs, `D` downstairs.
    SubRiemannian,
    /// `D_K` upstairs only.
    DistributionK,
    /// Riemannian: `H_M` upstairs, `H_{M/K}` downstairs.
    Riemannian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum SuiteArg {
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

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Lemma1 => Self::Lemma1,
            SuiteArg::Submersion => Self::Submersion,
            SuiteArg::Prop2 => Self::Prop2,
            SuiteArg::SharpDiagram => Self::SharpDiagram,
            SuiteArg::Theorem1 => Self::Theorem1,
            SuiteArg::Corollary => Self::Corollary,
            SuiteArg::Step2 => Self::Step2,
            SuiteArg::Bilinear => Self::Bilinear,
            SuiteArg::Twistor => Self::Twistor,
            SuiteArg::All => Self::All,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
enum SchemeArg {
    #[value(name = "rk4-fixed")]
    #[serde(rename = "RK4-fixed")]
    Rk4Fixed,
    #[value(name = "rk4-halving")]
    #[serde(rename = "RK4-halving")]
    Rk4Halving,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Rk4Fixed => Self::Rk4Fixed,
            SchemeArg::Rk4Halving => Self::Rk4Halving,
        }
    }
}

/// Options shared by every subcommand. All are optional so that `--config` can supply them.
#[derive(Args, Debug, Default)]
struct Common {
    /// Bundle instance.
    #[arg(long, value_enum)]
    bundle: Option<BundleArg>,
    /// `identity` or a JSON array of four quaternions `[[w,x,y,z], ...]` (rows a, b, c, d).
    #[arg(long)]
    point: Option<String>,
    /// JSON file with any of the options; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FramesArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct GeodesicArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated frame components: 10 upstairs, 7 downstairs.
    #[arg(long, allow_hyphen_values = true)]
    momentum: Option<String>,
    #[arg(long, value_enum)]
    side: Option<SideArg>,
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    #[command(flatten)]
    integrator: IntegratorArgs,
}

#[derive(Args, Debug, Default)]
struct IntegratorArgs {
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    /// Disable the per-step retraction onto the manifold.
    #[arg(long)]
    no_retraction: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum)]
    suite: Option<SuiteArg>,
    /// Samples per suite; each suite has its own default.
    #[arg(long)]
    samples: Option<usize>,
    /// Seed of the ChaCha8 generator the samples are drawn from.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    integrator: IntegratorArgs,
}

/// The `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct RunConfig {
    bundle: Option<BundleArg>,
    point: Option<serde_json::Value>,
    momentum: Option<Vec<f64>>,
    side: Option<SideArg>,
    kind: Option<KindArg>,
    step: Option<f64>,
    horizon: Option<f64>,
    scheme: Option<SchemeArg>,
    retraction: Option<bool>,
    suite: Option<SuiteArg>,
    samples: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
}

impl RunConfig {
    fn load(path: Option<&PathBuf>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
    }

    fn point(&self, flag: Option<&str>) -> Result<GroupPoint> {
        match (flag, &self.point) {
            (Some(s), _) => parse_point(s),
            (None, Some(serde_json::Value::String(s))) => parse_point(s),
            (None, Some(v)) => serde_json::from_value(v.clone())
                .map_err(|e| Error::InvalidConfig(format!("point: {e}"))),
            (None, None) => Ok(GroupPoint::identity()),
        }
    }

    fn integrator(&self, args: &IntegratorArgs) -> Result<IntegratorConfig> {
        let d = IntegratorConfig::default();
        let cfg = IntegratorConfig {
            step: args.step.or(self.step).unwrap_or(d.step),
            horizon: args.horizon.or(self.horizon).unwrap_or(d.horizon),
            scheme: args.scheme.or(self.scheme).map_or(d.scheme, Scheme::from),
            retraction: !args.no_retraction && self.retraction.unwrap_or(true),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_point(s: &str) -> Result<GroupPoint> {
    if s == "identity" {
        return Ok(GroupPoint::identity());
    }
    serde_json::from_str(s).map_err(|e| Error::InvalidConfig(format!("--point: {e}")))
}

fn parse_momentum(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidConfig(format!("--momentum component {c:?}: {e}")))
        })
        .collect()
}

/// What a subcommand produced.
enum Outcome {
    Ok(String),
    /// Output is still written, but the exit code is 1.
    Failed(String),
}

/// Parses `args` (including the program name) and runs the command; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let common = match &cli.command {
        Command::Frames(a) => &a.common,
        Command::Geodesic(a) => &a.common,
        Command::Verify(a) => &a.common,
    };
    let (config_path, flag_out) = (common.config.clone(), common.out.clone());
    let result = RunConfig::load(config_path.as_ref()).and_then(|file| {
        let out = flag_out.or(file.out.clone());
        let outcome = match cli.command {
            Command::Frames(a) => frames(&a, &file),
            Command::Geodesic(a) => geodesic(&a, &file, stderr),
            Command::Verify(a) => verify(&a, &file),
        }?;
        Ok((outcome, out))
    });
    let (outcome, out) = match result {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return match e {
                Error::DriftExceeded { .. } => EXIT_FAILED,
                _ => EXIT_CONFIG,
            };
        }
    };
    let (text, code) = match outcome {
        Outcome::Ok(t) => (t, EXIT_OK),
        Outcome::Failed(t) => (t, EXIT_FAILED),
    };
    let written = match out {
        Some(path) => fs::write(&path, &text).map_err(|e| format!("{}: {e}", path.display())),
        None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_CONFIG;
    }
    code
}

#[derive(Serialize)]
#[serde(rename_all = "kebab-case")]
struct FramesDump {
    bundle: ActionKind,
    point: GroupPoint,
    frame: FramedAlgebra,
    partition: [usize; 3],
    splitting: TangentFrameAt,
    ranks: RankSummary,
}

#[derive(Serialize)]
#[serde(rename_all = "kebab-case")]
struct RankSummary {
    vertical_big: usize,
    horizontal_big: usize,
    vertical_small: usize,
    horizontal_small: usize,
}

fn frames(args: &FramesArgs, file: &RunConfig) -> Result<Outcome> {
    let bundle = args
        .common
        .bundle
        .or(file.bundle)
        .ok_or_else(|| Error::InvalidConfig("frames needs --bundle <hopf|gromoll-meyer>".into()))?;
    let spec = BundleSpec::new(bundle.into());
    let q = file.point(args.common.point.as_deref())?;
    let split = splitting_at(&spec, &q)?;
    let frame = standard_frame();
    let rank = |vs: &[crate::quat::AlgebraVector]| {
        linalg::rank(&vs.iter().map(|v| frame.coords(v).to_vec()).collect::<Vec<_>>())
    };
    let (a, b, c) = frame.partition();
    let dump = FramesDump {
        bundle: spec.action(),
        point: q,
        partition: [a, b, c],
        ranks: RankSummary {
            vertical_big: rank(&split.vertical_big),
            horizontal_big: rank(&split.horizontal_big),
            vertical_small: rank(&split.vertical_small),
            horizontal_small: rank(&split.horizontal_small),
        },
        frame,
        splitting: split,
    };
    Ok(Outcome::Ok(to_json(&dump)))
}

fn to_json(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn geodesic(args: &GeodesicArgs, file: &RunConfig, stderr: &mut dyn Write) -> Result<Outcome> {
    let bundle: ActionKind = args.common.bundle.or(file.bundle).unwrap_or(BundleArg::Hopf).into();
    if bundle != ActionKind::Hopf {
        return Err(Error::Unsupported("geodesics unsupported for this bundle".into()));
    }
    let q = file.point(args.common.point.as_deref())?;
    let side = args.side.or(file.side).unwrap_or(SideArg::Up);
    let momentum = match (&args.momentum, &file.momentum) {
        (Some(s), _) => parse_momentum(s)?,
        (None, Some(m)) => m.clone(),
        (None, None) => vec![0.0; if side == SideArg::Up { 10 } else { 7 }],
    };
    let kind = args.kind.or(file.kind).unwrap_or(KindArg::SubRiemannian);
    let cfg = file.integrator(&args.integrator)?;
    let (csv, energy_drift, constraint_drift, order) = match side {
        SideArg::Up => {
            let kind = match kind {
                KindArg::SubRiemannian => HamiltonianKind::HorizontalH,
                KindArg::DistributionK => HamiltonianKind::HorizontalK,
                KindArg::Riemannian => HamiltonianKind::Full,
            };
            let t = integrate_up(&q, &Covector::up(q, momentum)?, kind, &cfg)?;
            (t.to_csv(), t.energy_drift(), t.constraint_drift(), t.observed_order)
        }
        SideArg::Down => {
            let kind = match kind {
                KindArg::SubRiemannian => HamiltonianKind::Horizontal,
                KindArg::Riemannian => HamiltonianKind::Quotient,
                KindArg::DistributionK => {
                    return Err(Error::InvalidConfig(
                        "--kind distribution-k is upstairs only".into(),
                    ));
                }
            };
            let mu = Covector::down(q, momentum)?;
            let t = integrate_down(&crate::bundle::pi_k(&q), &mu, kind, &cfg)?;
            (t.to_csv(), t.energy_drift(), t.constraint_drift(), t.observed_order)
        }
    };
    let _ = write!(
        stderr,
        "energy-drift={energy_drift:.3e} constraint-drift={constraint_drift:.3e}"
    );
    if let Some(o) = order {
        let _ = write!(stderr, " observed-order={o:.3}");
    }
    let _ = writeln!(stderr);
    if energy_drift > DRIFT_LIMIT || constraint_drift > DRIFT_LIMIT {
        Ok(Outcome::Failed(csv))
    } else {
        Ok(Outcome::Ok(csv))
    }
}

fn verify(args: &VerifyArgs, file: &RunConfig) -> Result<Outcome> {
    let suite: Suite = args
        .suite
        .or(file.suite)
        .ok_or_else(|| Error::InvalidConfig("verify needs --suite".into()))?
        .into();
    let cfg = SuiteConfig {
        bundle: args.common.bundle.or(file.bundle).unwrap_or(BundleArg::Hopf).into(),
        samples: args.samples.or(file.samples),
        seed: args.seed.or(file.seed).unwrap_or(0),
        integrator: file.integrator(&args.integrator)?,
    };
    let summary = suites::run(suite, &cfg)?;
    let text = summary.to_json() + "\n";
    Ok(if summary.pass {
        Outcome::Ok(text)
    } else {
        Outcome::Failed(text)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut full = vec!["sp2geo"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn frames_requires_a_bundle() {
        let (code, _, err) = call(&["frames", "--point", "identity"]);
        assert_eq!(code, EXIT_CONFIG);
        assert!(err.contains("--bundle"));
    }

    #[test]
    fn frames_dump() {
        let (code, out, _) = call(&["frames", "--bundle", "hopf", "--point", "identity"]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["frame"].as_array().unwrap().len(), 10);
        assert_eq!(v["partition"], serde_json::json!([4, 3, 3]));
        let (_, out, _) = call(&["frames", "--bundle", "gromoll-meyer", "--point", "identity"]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["ranks"]["vertical-small"], 3);
    }

    #[test]
    fn geodesic_exit_codes() {
        let (code, _, err) = call(&["geodesic", "--bundle", "gromoll-meyer"]);
        assert_eq!(code, EXIT_CONFIG);
        assert!(err.contains("geodesics unsupported for this bundle"));
        let (code, _, _) = call(&["geodesic", "--momentum", "1,2", "--side", "up"]);
        assert_eq!(code, EXIT_CONFIG);
        let (code, _, _) = call(&["geodesic", "--momentum", "1,x,0,0,0,0,0,0,0,0"]);
        assert_eq!(code, EXIT_CONFIG);
        let (code, _, _) = call(&["geodesic", "--step", "0"]);
        assert_eq!(code, EXIT_CONFIG);
    }

    #[test]
    fn geodesic_zero_momentum() {
        let (code, out, err) = call(&["geodesic", "--step", "0.25", "--horizon", "1"]);
        assert_eq!(code, EXIT_OK);
        assert!(err.contains("energy-drift=0.000e0"));
        let rows: Vec<&str> = out.lines().skip(1).collect();
        assert_eq!(rows.len(), 5);
        let tail = |r: &str| r.split_once(',').unwrap().1.to_string();
        assert!(rows.iter().all(|r| tail(r) == tail(rows[0])));
    }

    #[test]
    fn verify_exit_codes() {
        let (code, out, _) = call(&["verify", "--suite", "prop2", "--samples", "10", "--seed", "7"]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v["suites"][0]["max-residual"].as_f64().unwrap() <= 1e-12);
        let (code, _, _) = call(&["verify", "--suite", "prop2", "--bundle", "gromoll-meyer"]);
        assert_eq!(code, EXIT_CONFIG);
        let (code, _, _) = call(&["verify", "--suite", "nope"]);
        assert_eq!(code, EXIT_CONFIG);
        let (code, _, _) = call(&["verify"]);
        assert_eq!(code, EXIT_CONFIG);
    }
}

//! Command line front end: JSON experiment configs, named recipes, and the
//! CSV/JSON artifacts written by each subcommand.
//!
//! Settings are layered: recipe defaults, then the config file, then
//! `LIPFOURIER_*` environment variables, then command line flags.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::equivalence::{self, EquivalenceOptions, SUMMARY_HEADER};
use crate::error::{Error, Result};
use crate::functionals::{self, dyadic_grid, FunctionalCurve, FunctionalOptions};
use crate::modulus::{Modulus, ModulusDescriptor, MoGrids, ZygmundKind, ZygmundOptions};
use crate::spaces::{self, ProfileDescriptor, RadialProfile, SpaceDescriptor, SpectralSpace, Spectrum};

pub const SCHEMA_VERSION: u32 = 1;

pub const RECIPES: &[&str] = &[
    "corollary-power",
    "titchmarsh-n1",
    "hyperbolic-h3",
    "plancherel-gaussian",
    "plancherel-h3-bump",
];

const CSV_HELP: &str = "\
Outputs (all CSV files carry a header row; numbers use 17 significant digits):
  curves       lipschitz.csv, tail.csv, weighted_tail.csv: j,t,value,est_error,kind
  summary      summary.csv: verdict,forward_ratio_sup,forward_stable,backward_ratio_sup,backward_stable,L_slope,T_slope
  modulus      modulus_grid.csv: t,omega,z0_ratio,zk_ratio
  transform    transform.csv: lambda,value,est_error

Environment overrides (applied after the config file, before flags):
  LIPFOURIER_GRID_J, LIPFOURIER_TOL, LIPFOURIER_T_MAX, LIPFOURIER_OUT

Exit status: 0 on success (for `equivalence`, only when the verdict is
EquivalentWithinConstants), 1 when a check fails, 2 on error. Errors are
reported as a single line `E_CODE: message`.";

#[derive(Debug, Parser)]
#[command(name = "lipfourier", version, about = "Lipschitz classes and Fourier tails on Euclidean and hyperbolic spaces", after_help = CSV_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON experiment config.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Named recipe supplying every default.
    #[arg(long, global = true)]
    pub recipe: Option<String>,
    /// Number of dyadic grid steps J.
    #[arg(long = "grid-J", global = true)]
    pub grid_j: Option<usize>,
    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Classify a modulus of continuity.
    Modulus,
    /// Plancherel norm equality and transform round trip.
    Plancherel,
    /// Both directions of the Lipschitz/Fourier-tail equivalence.
    Equivalence,
    /// Lipschitz and tail curves with the proof diagnostics.
    Functionals,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t_max: Option<f64>,
    #[serde(rename = "J")]
    pub j: Option<usize>,
    pub lambda_max: Option<f64>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub recipe: Option<String>,
    pub space: Option<SpaceDescriptor>,
    pub profile: Option<ProfileDescriptor>,
    pub modulus: Option<ModulusDescriptor>,
    #[serde(default)]
    pub grid: GridConfig,
    pub out: Option<PathBuf>,
}

fn missing_field(message: &str) -> Option<&str> {
    let rest = message.strip_prefix("missing field `")?;
    rest.split('`').next()
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let message = e.inner().to_string();
            let field = match (path.as_str(), missing_field(&message)) {
                (".", Some(f)) => f.to_string(),
                (p, Some(f)) => format!("{p}.{f}"),
                (p, None) => p.to_string(),
            };
            Error::config(field, message)
        })?;
        if cfg.schema != SCHEMA_VERSION {
            return Err(Error::config(
                "schema",
                format!("unsupported schema {}, expected {SCHEMA_VERSION}", cfg.schema),
            ));
        }
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// The pinned configuration of a named recipe.
    pub fn recipe(name: &str) -> Result<Self> {
        let euclid = |n| SpaceDescriptor {
            kind: "euclidean".into(),
            n,
        };
        let power_profile = |alpha| ProfileDescriptor {
            spectral: Some("power".into()),
            alpha: Some(alpha),
            ..ProfileDescriptor::default()
        };
        let power_modulus = |gamma| ModulusDescriptor {
            family: Some("power".into()),
            gamma: Some(gamma),
            k: Some(2.0),
            delta0: Some(1.0),
            ..ModulusDescriptor::default()
        };
        let grid = GridConfig {
            t_max: Some(0.5),
            j: Some(20),
            lambda_max: None,
            tol: Some(1e-11),
        };
        let (space, profile, modulus) = match name {
            "corollary-power" => (euclid(3), power_profile(0.5), Some(power_modulus(0.5))),
            "titchmarsh-n1" => (euclid(1), power_profile(0.5), Some(power_modulus(0.5))),
            "hyperbolic-h3" => (
                SpaceDescriptor {
                    kind: "hyperbolic".into(),
                    n: 3,
                },
                power_profile(1.0),
                Some(power_modulus(1.0)),
            ),
            "plancherel-gaussian" => (
                euclid(1),
                ProfileDescriptor {
                    physical: Some("gaussian".into()),
                    a: Some(0.5),
                    ..ProfileDescriptor::default()
                },
                None,
            ),
            "plancherel-h3-bump" => (
                SpaceDescriptor {
                    kind: "hyperbolic".into(),
                    n: 3,
                },
                ProfileDescriptor {
                    physical: Some("bump".into()),
                    radius: Some(1.5),
                    ..ProfileDescriptor::default()
                },
                None,
            ),
            other => {
                return Err(Error::config(
                    "recipe",
                    format!("unknown recipe `{other}`; known: {}", RECIPES.join(", ")),
                ))
            }
        };
        Ok(Self {
            schema: SCHEMA_VERSION,
            recipe: Some(name.into()),
            space: Some(space),
            profile: Some(profile),
            modulus,
            grid,
            out: None,
        })
    }

    /// Fields present in `over` replace those of `self`.
    pub fn overlay(mut self, over: ExperimentConfig) -> Self {
        self.recipe = over.recipe.or(self.recipe);
        self.space = over.space.or(self.space);
        self.profile = over.profile.or(self.profile);
        self.modulus = over.modulus.or(self.modulus);
        self.grid = GridConfig {
            t_max: over.grid.t_max.or(self.grid.t_max),
            j: over.grid.j.or(self.grid.j),
            lambda_max: over.grid.lambda_max.or(self.grid.lambda_max),
            tol: over.grid.tol.or(self.grid.tol),
        };
        self.out = over.out.or(self.out);
        self
    }

    fn apply(&mut self, o: &Overrides) {
        self.grid.j = o.grid_j.or(self.grid.j);
        self.grid.tol = o.tol.or(self.grid.tol);
        self.grid.t_max = o.t_max.or(self.grid.t_max);
        self.out = o.out.clone().or(self.out.take());
    }

    pub fn space(&self) -> Result<SpectralSpace> {
        self.space
            .as_ref()
            .ok_or_else(|| Error::config("space", "missing required field"))?
            .build("space")
    }

    pub fn profile(&self, space: &SpectralSpace) -> Result<RadialProfile> {
        self.profile
            .as_ref()
            .ok_or_else(|| Error::config("profile", "missing required field"))?
            .build("profile", space)
    }

    pub fn modulus(&self) -> Result<Modulus> {
        self.modulus
            .as_ref()
            .ok_or_else(|| Error::config("modulus", "missing required field"))?
            .build("modulus")
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    /// Grid and quadrature settings, validated; `delta0` bounds `t_max`.
    pub fn options(&self, delta0: f64) -> Result<EquivalenceOptions> {
        let j = self.grid.j.unwrap_or(20);
        if !(8..=40).contains(&j) {
            return Err(Error::config("grid.J", format!("J = {j} must lie in [8, 40]")));
        }
        let tol = self.grid.tol.unwrap_or(1e-11);
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::config("grid.tol", format!("tolerance {tol} must lie in (0, 1)")));
        }
        let t_max = self.grid.t_max.unwrap_or(0.5 * delta0);
        if !(t_max > 0.0 && t_max <= delta0) {
            return Err(Error::config("grid.t_max", format!("t_max = {t_max} must lie in (0, δ₀ = {delta0}]")));
        }
        let opts = EquivalenceOptions {
            t_max: Some(t_max),
            j_max: j,
            ..EquivalenceOptions::default()
        };
        let t_min = t_max * 0.5f64.powi((j + opts.refine) as i32);
        let lambda_max = match self.grid.lambda_max {
            None => f64::INFINITY,
            Some(l) if l >= 2.0 / t_min => l,
            Some(l) => {
                return Err(Error::config(
                    "grid.lambda_max",
                    format!("Λ = {l} is below 2/t_min = {:e}", 2.0 / t_min),
                ))
            }
        };
        Ok(EquivalenceOptions {
            functional: FunctionalOptions {
                lambda_max,
                rel_tol: tol,
                ..FunctionalOptions::default()
            },
            ..opts
        })
    }
}

/// Values that may override the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub grid_j: Option<usize>,
    pub tol: Option<f64>,
    pub t_max: Option<f64>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    /// Reads `LIPFOURIER_GRID_J`, `LIPFOURIER_TOL`, `LIPFOURIER_T_MAX`, `LIPFOURIER_OUT`.
    pub fn from_env(lookup: impl Fn(&str) -> Option<String>) -> Result<Self> {
        fn parse<T: std::str::FromStr>(name: &str, v: Option<String>) -> Result<Option<T>> {
            v.map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| Error::config(name, format!("cannot parse `{s}`")))
            })
            .transpose()
        }
        Ok(Self {
            grid_j: parse("LIPFOURIER_GRID_J", lookup("LIPFOURIER_GRID_J"))?,
            tol: parse("LIPFOURIER_TOL", lookup("LIPFOURIER_TOL"))?,
            t_max: parse("LIPFOURIER_T_MAX", lookup("LIPFOURIER_T_MAX"))?,
            out: lookup("LIPFOURIER_OUT").map(PathBuf::from),
        })
    }
}

/// Combines recipe, file, environment and flags in that order of precedence.
pub fn resolve_config(cli: &Cli, env: &Overrides) -> Result<ExperimentConfig> {
    let file = cli.config.as_deref().map(ExperimentConfig::from_path).transpose()?;
    let recipe = cli
        .recipe
        .clone()
        .or_else(|| file.as_ref().and_then(|f| f.recipe.clone()));
    let mut cfg = match (recipe, file) {
        (Some(name), Some(file)) => ExperimentConfig::recipe(&name)?.overlay(file),
        (Some(name), None) => ExperimentConfig::recipe(&name)?,
        (None, Some(file)) => file,
        (None, None) => return Err(Error::config("config", "give --config or --recipe")),
    };
    cfg.apply(env);
    cfg.apply(&Overrides {
        grid_j: cli.grid_j,
        tol: cli.tol,
        t_max: None,
        out: cli.out.clone(),
    });
    Ok(cfg)
}

/// Files written by a run and the exit status it asks for.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
    pub exit_code: u8,
}

struct Artifacts {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

impl Artifacts {
    fn new(dir: PathBuf) -> Result<Self> {
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, files: Vec::new() })
    }

    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, body)?;
        self.files.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut body = serde_json::to_string_pretty(value)?;
        body.push('\n');
        self.text(name, &body)
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path).map_err(csv_error)?;
        w.write_record(header).map_err(csv_error)?;
        for row in rows {
            w.write_record(&row).map_err(csv_error)?;
        }
        w.flush()?;
        self.files.push(path);
        Ok(())
    }

    fn curve(&mut self, name: &str, curve: &FunctionalCurve) -> Result<()> {
        let kind = curve.kind.label();
        let rows = (0..curve.len()).map(|j| {
            vec![
                j.to_string(),
                num(curve.t_values[j]),
                num(curve.values[j]),
                num(curve.quadrature_errors[j]),
                kind.clone(),
            ]
        });
        self.csv(name, &["j", "t", "value", "est_error", "kind"], rows)
    }
}

/// Seventeen significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize)]
struct ModulusRun {
    modulus: Modulus,
    mo_indices: serde_json::Value,
    z0: crate::modulus::ZygmundReport,
    zk: crate::modulus::ZygmundReport,
    bary_stechkin: bool,
    monotonicity: crate::modulus::MonotonicityReport,
    tail: crate::modulus::TailReport,
}

pub fn run_modulus(cfg: &ExperimentConfig) -> Result<Outcome> {
    let m = cfg.modulus()?;
    let mo = match m.mo_indices(&MoGrids::for_modulus(&m)?) {
        Ok(idx) => serde_json::to_value(&idx)?,
        Err(Error::MoNonConvergence { reason, partial }) => serde_json::json!({
            "error": reason,
            "partial": *partial,
        }),
        Err(e) => return Err(e),
    };
    let zopts = ZygmundOptions {
        quad_tol: cfg.grid.tol.unwrap_or(1e-10),
        ..ZygmundOptions::default()
    };
    let z0 = m.zygmund_check(ZygmundKind::Z0, &zopts)?;
    let zk = m.zygmund_check(ZygmundKind::Zk, &zopts)?;
    let run = ModulusRun {
        bary_stechkin: z0.holds == Some(true) && zk.holds == Some(true),
        monotonicity: m.check_monotonicity(8192, m.order_k)?,
        tail: m.tail_assumptions_check()?,
        mo_indices: mo,
        modulus: m.clone(),
        z0,
        zk,
    };
    let mut out = Artifacts::new(cfg.out_dir())?;
    out.json("modulus.json", &run)?;
    let rows = run.z0.samples.iter().zip(&run.zk.samples).map(|(a, b)| {
        let w = m.eval(a.t).unwrap_or(f64::NAN);
        vec![num(a.t), num(w), num(a.ratio), num(b.ratio)]
    });
    out.csv("modulus_grid.csv", &["t", "omega", "z0_ratio", "zk_ratio"], rows)?;
    let verdict = |h: Option<bool>| match h {
        Some(true) => "holds",
        Some(false) => "fails",
        None => "unknown",
    };
    let summary = format!(
        "Z0 {}, Zk {}, Bary-Stechkin {}",
        verdict(run.z0.holds),
        verdict(run.zk.holds),
        run.bary_stechkin
    );
    Ok(Outcome {
        files: out.files,
        summary,
        exit_code: 0,
    })
}

pub fn run_plancherel(cfg: &ExperimentConfig) -> Result<Outcome> {
    let space = cfg.space()?;
    let profile = cfg.profile(&space)?;
    let p = profile
        .physical
        .ok_or_else(|| Error::Inapplicable("the Plancherel check needs a profile with a physical side".into()))?;
    let report = spaces::plancherel_check(&space, &p)?;
    let lambdas: Vec<f64> = (0..=128).map(|i| 0.25 * i as f64).collect();
    let transform = spaces::spherical_transform(&space, &p, &lambdas)?;
    let mut out = Artifacts::new(cfg.out_dir())?;
    out.json("plancherel.json", &report)?;
    out.csv(
        "transform.csv",
        &["lambda", "value", "est_error"],
        lambdas
            .iter()
            .zip(&transform)
            .map(|(l, e)| vec![num(*l), num(e.value), num(e.error)]),
    )?;
    let tol = if space.is_euclidean() { 1e-6 } else { 1e-4 };
    let pass = report.norm_rel_error <= tol && report.round_trip_rel_error <= tol;
    Ok(Outcome {
        files: out.files,
        summary: format!(
            "norm rel. error {:.3e}, round trip rel. error {:.3e} (tolerance {tol:e})",
            report.norm_rel_error, report.round_trip_rel_error
        ),
        exit_code: if pass { 0 } else { 1 },
    })
}

pub fn run_equivalence(cfg: &ExperimentConfig) -> Result<Outcome> {
    let space = cfg.space()?;
    let spec = Spectrum::new(&space, &cfg.profile(&space)?)?;
    let m = cfg.modulus()?;
    let opts = cfg.options(m.delta0)?;
    let report = equivalence::equivalence_report(&spec, &m, &opts)?;
    let mut out = Artifacts::new(cfg.out_dir())?;
    out.json("equivalence.json", &report)?;
    out.text("summary.csv", &format!("{SUMMARY_HEADER}\n{}\n", report.summary_row()))?;
    out.curve("lipschitz.csv", &report.lipschitz_base())?;
    out.curve("tail.csv", &report.tail_base())?;
    let fit = |f: Option<equivalence::ExponentFit>| {
        f.map_or("n/a".to_string(), |f| format!("{:.4} ± {:.4}", f.slope, f.half_width))
    };
    let summary = format!(
        "space {}\nverdict {}\nforward sup T/(ω² t^(n-1)) = {:.6e} ({})\nbackward sup L/ω = {:.6e} ({}, {})\nL slope {}\nT slope {}\nhypotheses {}\n",
        report.space,
        report.verdict.as_str(),
        report.direction_forward.ratio_sup,
        if report.direction_forward.stable { "stable" } else { "unstable" },
        report.direction_backward.ratio_sup,
        if report.direction_backward.stable { "stable" } else { "unstable" },
        report.backward_scope,
        fit(report.fitted_exponents.l_slope),
        fit(report.fitted_exponents.t_slope),
        if report.hypothesis_audit.passes { "pass" } else { "fail" },
    );
    out.text("summary.txt", &summary)?;
    Ok(Outcome {
        files: out.files,
        summary,
        exit_code: if report.verdict == equivalence::Verdict::EquivalentWithinConstants { 0 } else { 1 },
    })
}

#[derive(Serialize)]
struct DiagnosticRecord {
    t: f64,
    weighted_tail: f64,
    j_split: functionals::JSplit,
    k_split: functionals::KSplit,
    aux_identity: functionals::AuxIdentity,
}

#[derive(Serialize)]
struct FunctionalsRun {
    space: String,
    physical_route: serde_json::Value,
    dyadic_sum: serde_json::Value,
    records: Vec<DiagnosticRecord>,
}

pub fn run_functionals(cfg: &ExperimentConfig) -> Result<Outcome> {
    let space = cfg.space()?;
    let spec = Spectrum::new(&space, &cfg.profile(&space)?)?;
    let m = cfg.modulus.as_ref().map(|d| d.build("modulus")).transpose()?;
    let opts = cfg.options(m.as_ref().map_or(1.0, |m| m.delta0))?;
    let grid = dyadic_grid(opts.t_max.unwrap_or(0.5), opts.j_max);
    let f = &opts.functional;
    let lipschitz = functionals::lipschitz_curve(&spec, &grid, f)?;
    let tail = functionals::tail_curve(&spec, &grid, f)?;
    let weighted = FunctionalCurve::new(
        functionals::CurveKind::Diagnostic("weighted_tail".into()),
        grid.clone(),
        grid.iter()
            .map(|&t| functionals::weighted_tail(&spec, t, f))
            .collect::<Result<Vec<_>>>()?,
    );
    let mut records = Vec::with_capacity(grid.len());
    let mut failures = 0;
    for (i, &t) in grid.iter().enumerate() {
        let j_split = functionals::j_split(&spec, t, f)?;
        let k_split = functionals::k_split(&spec, t, f)?;
        let aux_identity = functionals::aux_tail_identity(&spec, t, f)?;
        if !aux_identity.holds || j_split.j1.value > 2.0 * (k_split.k1.value + k_split.k2.value) {
            failures += 1;
        }
        records.push(DiagnosticRecord {
            t,
            weighted_tail: weighted.values[i],
            j_split,
            k_split,
            aux_identity,
        });
    }
    let physical_route = match functionals::physical_lipschitz_curve(&spec, &grid) {
        Ok(c) => {
            let worst = c
                .values
                .iter()
                .zip(&lipschitz.values)
                .map(|(a, b)| if *b == 0.0 { (a - b).abs() } else { ((a - b) / b).abs() })
                .fold(0.0, f64::max);
            serde_json::json!({ "applicable": true, "max_rel_difference": worst })
        }
        Err(Error::Inapplicable(why)) => serde_json::json!({ "applicable": false, "reason": why }),
        Err(e) => return Err(e),
    };
    let dyadic_sum = match &m {
        None => serde_json::Value::Null,
        Some(m) => match functionals::dyadic_sum_check(m, opts.t_max.unwrap_or(0.5), opts.j_max) {
            Ok(d) => serde_json::to_value(d)?,
            Err(Error::Inapplicable(why)) => serde_json::json!({ "applicable": false, "reason": why }),
            Err(e) => return Err(e),
        },
    };
    let run = FunctionalsRun {
        space: space.label(),
        physical_route,
        dyadic_sum,
        records,
    };
    let mut out = Artifacts::new(cfg.out_dir())?;
    out.curve("lipschitz.csv", &lipschitz)?;
    out.curve("tail.csv", &tail)?;
    out.curve("weighted_tail.csv", &weighted)?;
    out.json("diagnostics.json", &run)?;
    Ok(Outcome {
        files: out.files,
        summary: format!("{} grid points, {failures} failed diagnostics", grid.len()),
        exit_code: if failures == 0 { 0 } else { 1 },
    })
}

pub fn dispatch(command: Command, cfg: &ExperimentConfig) -> Result<Outcome> {
    match command {
        Command::Modulus => run_modulus(cfg),
        Command::Plancherel => run_plancherel(cfg),
        Command::Equivalence => run_equivalence(cfg),
        Command::Functionals => run_functionals(cfg),
    }
}

/// Parses `args`, runs the subcommand and returns the process exit status.
/// Errors are printed to stderr as a single `E_CODE: message` line.
pub fn run<I, T>(args: I, env: impl Fn(&str) -> Option<String>) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("E_USAGE: {}", line.trim_start_matches("error: "));
            return 2;
        }
    };
    let result = Overrides::from_env(env)
        .and_then(|env| resolve_config(&cli, &env))
        .and_then(|cfg| dispatch(cli.command, &cfg));
    match result {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            if !outcome.summary.ends_with('\n') {
                println!();
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            outcome.exit_code
        }
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("{}: {msg}", e.code());
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(pairs: &'static [(&'static str, &'static str)]) -> impl Fn(&str) -> Option<String> {
        move |k| pairs.iter().find(|(n, _)| *n == k).map(|(_, v)| v.to_string())
    }

    #[test]
    fn config_errors_name_the_field() {
        let err = ExperimentConfig::from_json(r#"{"schema":1,"grid":{"J":20,"oops":1}}"#).unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "grid.oops"), "{err}");
        let err = ExperimentConfig::from_json(r#"{"space":{"kind":"euclidean","n":1}}"#).unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "schema"), "{err}");
        let err = ExperimentConfig::from_json(r#"{"schema":2}"#).unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "schema"));
        let cfg = ExperimentConfig::from_json(r#"{"schema":1,"modulus":{"family":"power","k":2}}"#).unwrap();
        let err = cfg.modulus().unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "modulus.gamma"));
    }

    #[test]
    fn layering_order() {
        let cli = Cli::try_parse_from(["lipfourier", "equivalence", "--recipe", "titchmarsh-n1", "--grid-J", "12"]).unwrap();
        let overrides = Overrides::from_env(env(&[("LIPFOURIER_GRID_J", "30"), ("LIPFOURIER_TOL", "1e-9")])).unwrap();
        let cfg = resolve_config(&cli, &overrides).unwrap();
        assert_eq!(cfg.grid.j, Some(12));
        assert_eq!(cfg.grid.tol, Some(1e-9));
        assert_eq!(cfg.grid.t_max, Some(0.5));
        let bad = Overrides::from_env(env(&[("LIPFOURIER_TOL", "tiny")])).unwrap_err();
        assert!(matches!(bad, Error::Config { ref field, .. } if field == "LIPFOURIER_TOL"));
    }

    #[test]
    fn file_fields_override_recipe() {
        let file = ExperimentConfig::from_json(r#"{"schema":1,"recipe":"corollary-power","grid":{"J":10}}"#).unwrap();
        let cfg = ExperimentConfig::recipe("corollary-power").unwrap().overlay(file);
        assert_eq!(cfg.grid.j, Some(10));
        assert_eq!(cfg.space.unwrap().n, 3);
    }

    #[test]
    fn option_validation() {
        let mut cfg = ExperimentConfig::recipe("titchmarsh-n1").unwrap();
        cfg.grid.j = Some(41);
        assert!(matches!(cfg.options(1.0), Err(Error::Config { ref field, .. }) if field == "grid.J"));
        cfg.grid.j = Some(8);
        cfg.grid.lambda_max = Some(100.0);
        assert!(matches!(cfg.options(1.0), Err(Error::Config { ref field, .. }) if field == "grid.lambda_max"));
        cfg.grid.lambda_max = Some(1e6);
        assert_eq!(cfg.options(1.0).unwrap().functional.lambda_max, 1e6);
        cfg.grid.tol = Some(0.0);
        assert!(matches!(cfg.options(1.0), Err(Error::Config { ref field, .. }) if field == "grid.tol"));
    }

    #[test]
    fn numbers_carry_seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(1.0 / 3.0).len(), "3.3333333333333331e-1".len());
    }
}

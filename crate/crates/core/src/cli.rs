//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid parameters, 3 I/O failure.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::acceptance::{self, SuiteConfig};
use crate::error::Error;
use crate::hamiltonian::{eigensystem, find_parity_angle, build_hamiltonian, propagator, PTParams, Phase};
use crate::optimize::{
    csv_table, default_points, fmt_sig, ghz_problem, maximize, profile_fig1, profile_fig2,
    rotated_surface_problem, w_problem, OptProblem, DEFAULT_REFINE_TOL,
};
use crate::signaling::{analyze, evolve_alice, EvolutionScenario, SignalingReport, DEFAULT_TOL};
use crate::states::{density, make_state, reduced, StateSpec, BOB, CHARU};

pub const TOL_ENV: &str = "PT_NOSIGNAL_TOL";

#[derive(Debug, Parser)]
#[command(name = "pt-nosignal", version, about = "No-signaling under local PT-symmetric evolution of shared qubit states")]
pub struct Cli {
    /// Flat `key=value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Read angles (theta, phi, x, y, xi, alpha, theta-fixed) in degrees.
    #[arg(long, global = true)]
    pub degrees: bool,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Trace-distance tolerance for the no-signaling flags; for `verify`, replaces
    /// every closeness threshold of the suite.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print J·H_PT, its spectrum, eigenvectors and the propagator.
    Hamiltonian(HamArgs),
    /// Evolve a shared state and print the post-evolution density matrices.
    Evolve {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        ham: HamArgs,
    },
    /// Full signaling report for one scenario.
    Report {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        ham: HamArgs,
    },
    /// Maximize the joint-state discrimination probability.
    Optimize(OptimizeArgs),
    /// Tabulate the figure profiles as CSV.
    Profile(ProfileArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Bell,
    Ghz,
    W,
    RotatedGhz,
    Custom,
}

#[derive(Debug, Clone, Default, Args)]
pub struct StateArgs {
    #[arg(long, value_enum)]
    pub state: Option<Family>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<f64>,
    /// 16 whitespace-separated reals: (re, im) for each of the 8 amplitudes.
    #[arg(long, allow_hyphen_values = true)]
    pub amplitudes: Option<String>,
}

/// Either `--alpha --xi --t1`, or `--s --t --xi --tau` with optional `--r` and `--j`.
#[derive(Debug, Clone, Default, Args)]
pub struct HamArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub j: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OptFamily {
    Ghz,
    W,
    RotatedGhz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Surface {
    Xi0,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OptimizeArgs {
    #[arg(long, value_enum)]
    pub state: Option<OptFamily>,
    /// Pin the search to a surface of parameter space.
    #[arg(long, value_enum)]
    pub surface: Option<Surface>,
    #[arg(long)]
    pub theta_fixed: Option<f64>,
    /// Lattice points per free coordinate (default depends on the dimension).
    #[arg(long)]
    pub points: Option<usize>,
    /// Lattice points refined by the simplex.
    #[arg(long)]
    pub starts: Option<usize>,
    /// Include the refinement trace in JSON output.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ProfileArgs {
    #[arg(long)]
    pub figure: Option<u8>,
    /// Number of θ samples on [0, π/2].
    #[arg(long)]
    pub resolution: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct VerifyArgs {
    /// Run one group: optima, surfaces, bipartite, closed-forms, propagator, hermitian, profiles.
    #[arg(long)]
    pub only: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Io(String),
    Failed(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid parameters: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Failed(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ClosedFormMismatch { .. } => CliError::Failed(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

// ---------------------------------------------------------------------------
// Config files

pub type ConfigMap = HashMap<String, String>;

/// Parses `key=value` lines; blank lines and `#` comments are skipped. Keys may use
/// `-` or `_` interchangeably.
pub fn parse_config(text: &str) -> Result<ConfigMap, CliError> {
    let mut map = ConfigMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("config line {}: expected key=value, got `{line}`", n + 1)))?;
        map.insert(k.trim().replace('_', "-").to_lowercase(), v.trim().to_string());
    }
    Ok(map)
}

fn load_config(path: Option<&Path>) -> Result<ConfigMap, CliError> {
    match path {
        None => Ok(ConfigMap::new()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            parse_config(&text)
        }
    }
}

fn fill<T: FromStr>(slot: &mut Option<T>, cfg: &ConfigMap, key: &str) -> Result<(), CliError> {
    if slot.is_none() {
        if let Some(v) = cfg.get(key) {
            *slot = Some(v.parse().map_err(|_| bad(format!("config `{key}`: cannot parse `{v}`")))?);
        }
    }
    Ok(())
}

fn fill_enum<T: ValueEnum>(slot: &mut Option<T>, cfg: &ConfigMap, key: &str) -> Result<(), CliError> {
    if slot.is_none() {
        if let Some(v) = cfg.get(key) {
            *slot = Some(T::from_str(v, true).map_err(|_| bad(format!("config `{key}`: unknown value `{v}`")))?);
        }
    }
    Ok(())
}

fn fill_flag(slot: &mut bool, cfg: &ConfigMap, key: &str) -> Result<(), CliError> {
    if !*slot {
        if let Some(v) = cfg.get(key) {
            *slot = v.parse().map_err(|_| bad(format!("config `{key}`: expected true or false")))?;
        }
    }
    Ok(())
}

impl StateArgs {
    fn merge(&mut self, cfg: &ConfigMap) -> Result<(), CliError> {
        fill_enum(&mut self.state, cfg, "state")?;
        fill(&mut self.theta, cfg, "theta")?;
        fill(&mut self.phi, cfg, "phi")?;
        fill(&mut self.x, cfg, "x")?;
        fill(&mut self.y, cfg, "y")?;
        fill(&mut self.amplitudes, cfg, "amplitudes")
    }

    fn spec(&self, deg: f64) -> Result<StateSpec, CliError> {
        let need = |v: Option<f64>, name: &str| v.map(|a| a * deg).ok_or_else(|| bad(format!("--{name} is required")));
        Ok(match self.state.ok_or_else(|| bad("--state is required"))? {
            Family::Bell => StateSpec::Bell,
            Family::Ghz => StateSpec::Ghz { theta: need(self.theta, "theta")? },
            Family::W => StateSpec::W {
                theta: need(self.theta, "theta")?,
                phi: need(self.phi, "phi")?,
            },
            Family::RotatedGhz => StateSpec::RotatedGhz {
                theta: need(self.theta, "theta")?,
                x: self.x.unwrap_or(0.0) * deg,
                y: self.y.unwrap_or(0.0) * deg,
            },
            Family::Custom => {
                let text = self.amplitudes.as_deref().ok_or_else(|| bad("--amplitudes is required"))?;
                StateSpec::custom_from_text(text)?
            }
        })
    }
}

impl HamArgs {
    fn merge(&mut self, cfg: &ConfigMap) -> Result<(), CliError> {
        for (slot, key) in [
            (&mut self.alpha, "alpha"),
            (&mut self.t1, "t1"),
            (&mut self.xi, "xi"),
            (&mut self.r, "r"),
            (&mut self.s, "s"),
            (&mut self.t, "t"),
            (&mut self.j, "j"),
            (&mut self.tau, "tau"),
        ] {
            fill(slot, cfg, key)?;
        }
        Ok(())
    }

    /// Resolves exactly one of the two parameterizations.
    pub fn params(&self, deg: f64) -> Result<PTParams, CliError> {
        let xi = self.xi.ok_or_else(|| bad("--xi is required"))? * deg;
        let shortcut = self.alpha.is_some() || self.t1.is_some();
        let raw = [self.r, self.s, self.t, self.j, self.tau].iter().any(Option::is_some);
        match (shortcut, raw) {
            (true, true) => Err(bad("give either --alpha/--t1 or --r/--s/--t/--j/--tau, not both")),
            (true, false) => {
                let alpha = self.alpha.ok_or_else(|| bad("--alpha is required with --t1"))? * deg;
                let t1 = self.t1.ok_or_else(|| bad("--t1 is required with --alpha"))?;
                Ok(PTParams::from_alpha(alpha, xi, t1)?)
            }
            (false, true) => {
                let s = self.s.ok_or_else(|| bad("--s is required"))?;
                let t = self.t.ok_or_else(|| bad("--t is required"))?;
                let tau = self.tau.ok_or_else(|| bad("--tau is required"))?;
                let p = PTParams::new(self.r.unwrap_or(0.0), s, t, xi, self.j.unwrap_or(1.0), tau);
                p.validate()?;
                Ok(p)
            }
            (false, false) => Err(bad("Hamiltonian parameters missing: give --alpha --xi --t1 or --s --t --xi --tau")),
        }
    }
}

/// Global options after merging flags, config file and environment.
struct Globals {
    deg: f64,
    format: Option<Format>,
    output: Option<PathBuf>,
    tol: Option<f64>,
}

impl Globals {
    /// Tolerance for report flags: flag, then config, then environment, then default.
    fn report_tol(&self) -> Result<f64, CliError> {
        let tol = match self.tol {
            Some(t) => t,
            None => match std::env::var(TOL_ENV) {
                Ok(v) => v.trim().parse().map_err(|_| bad(format!("{TOL_ENV} = `{v}` is not a number")))?,
                Err(_) => DEFAULT_TOL,
            },
        };
        if !(tol > 0.0) {
            return Err(bad(format!("tolerance must be positive, got {tol}")));
        }
        Ok(tol)
    }

    fn emit(&self, text: &str) -> Result<(), CliError> {
        match &self.output {
            Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

// ---------------------------------------------------------------------------
// Commands

fn cmd_hamiltonian(g: &Globals, ham: &HamArgs) -> Result<String, CliError> {
    let p = ham.params(g.deg)?;
    let h = build_hamiltonian(&p);
    let u = propagator(&p).matrix;
    let phase = p.phase();
    let eig = if phase == Phase::Unbroken { Some(eigensystem(&p)?) } else { None };
    let (phi, defect) = find_parity_angle(&h, 1e-4);
    let alpha = p.alpha().ok();
    let t1 = p.t1().ok();
    match g.format.unwrap_or(Format::Json) {
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "phase: {phase:?}").ok();
            if let (Some(a), Some(t)) = (alpha, t1) {
                writeln!(out, "alpha = {a}\nt1 = {t}").ok();
            }
            if let Some(e) = &eig {
                writeln!(out, "E+ = {}\nE- = {}\neigenvector overlap = {}", e.e_plus, e.e_minus, e.overlap()).ok();
            }
            writeln!(out, "parity angle = {phi:.4} (defect {defect:.2e})").ok();
            writeln!(out, "H =\n{h}U =\n{u}|det U| = {}", u.det().norm()).ok();
            Ok(out)
        }
        Format::Json => Ok(to_json(&json!({
            "params": p,
            "phase": phase,
            "alpha": alpha,
            "t1": t1,
            "hamiltonian": h,
            "eigensystem": eig,
            "eigenvector_overlap": eig.as_ref().map(|e| e.overlap()),
            "parity_angle": phi,
            "parity_defect": defect,
            "propagator": u,
            "det_abs": u.det().norm(),
        }))),
        Format::Csv => Err(bad("hamiltonian output supports json or text")),
    }
}

fn cmd_evolve(g: &Globals, state: &StateArgs, ham: &HamArgs) -> Result<String, CliError> {
    let spec = state.spec(g.deg)?;
    let p = ham.params(g.deg)?;
    p.require_unbroken()?;
    let u = propagator(&p).matrix;
    let rho = density(&make_state(&spec)?);
    let n = spec.n_qubits();
    let post = evolve_alice(&rho, &u, n)?;
    let remote: Vec<(&str, crate::linalg::ComplexMatrix)> = if n == 2 {
        vec![("rho_post_B", reduced(&post, &[BOB])?)]
    } else {
        vec![
            ("rho_post_BC", reduced(&post, &[BOB, CHARU])?),
            ("rho_post_B", reduced(&post, &[BOB])?),
            ("rho_post_C", reduced(&post, &[CHARU])?),
        ]
    };
    match g.format.unwrap_or(Format::Json) {
        Format::Text => {
            let mut out = format!("U =\n{u}rho_post =\n{post}");
            for (k, m) in &remote {
                write!(out, "{k} =\n{m}").ok();
            }
            Ok(out)
        }
        Format::Json => {
            let mut obj = json!({
                "family": spec.family(),
                "alpha": p.alpha()?,
                "xi": p.xi,
                "t1": p.t1()?,
                "propagator": u,
                "rho_post": post,
            });
            for (k, m) in remote {
                obj[k] = serde_json::to_value(m).expect("matrix");
            }
            Ok(to_json(&obj))
        }
        Format::Csv => Err(bad("evolve output supports json or text")),
    }
}

const REPORT_CSV_HEADER: &str = "family,alpha,xi,t1,d_global,d_B,d_C,p_global,p_B,p_C,lambda_numeric,lambda_closed,global_nosignaling,local_nosignaling";

fn report_csv(r: &SignalingReport) -> String {
    let opt = |v: Option<f64>| v.map(fmt_sig).unwrap_or_default();
    format!(
        "{REPORT_CSV_HEADER}\n{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
        r.family,
        fmt_sig(r.alpha),
        fmt_sig(r.xi),
        fmt_sig(r.t1),
        fmt_sig(r.d_global),
        fmt_sig(r.d_b),
        opt(r.d_c),
        fmt_sig(r.p_global),
        fmt_sig(r.p_b),
        opt(r.p_c),
        fmt_sig(r.lambda_numeric),
        opt(r.lambda_closed),
        r.global_nosignaling,
        r.local_nosignaling
    )
}

fn report_text(r: &SignalingReport) -> String {
    let mut out = String::new();
    writeln!(out, "family {}  alpha {:.6}  xi {:.6}  t1 {:.6}", r.family, r.alpha, r.xi, r.t1).ok();
    writeln!(out, "global: d = {:.6e}  P = {:.6}", r.d_global, r.p_global).ok();
    writeln!(out, "Bob:    d = {:.6e}  P = {:.6}", r.d_b, r.p_b).ok();
    if let (Some(d), Some(p)) = (r.d_c, r.p_c) {
        writeln!(out, "Charu:  d = {d:.6e}  P = {p:.6}").ok();
    }
    if let Some(l) = r.lambda_closed {
        writeln!(out, "closed-form eigenvalue {l:.9}  (numeric {:.9})", r.lambda_numeric).ok();
    }
    writeln!(
        out,
        "global no-signaling: {}  local no-signaling: {}  (tol {:e})",
        r.global_nosignaling, r.local_nosignaling, r.tol
    )
    .ok();
    out
}

fn cmd_report(g: &Globals, state: &StateArgs, ham: &HamArgs) -> Result<String, CliError> {
    let tol = g.report_tol()?;
    let scenario = EvolutionScenario::new(state.spec(g.deg)?, ham.params(g.deg)?)?;
    let r = analyze(&scenario, tol)?;
    Ok(match g.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&r),
        Format::Csv => report_csv(&r),
        Format::Text => report_text(&r),
    })
}

pub fn optimize_problem(args: &OptimizeArgs, deg: f64) -> Result<OptProblem, CliError> {
    let mut p = match args.state.ok_or_else(|| bad("--state is required (ghz, w or rotated-ghz)"))? {
        OptFamily::Ghz => ghz_problem(),
        OptFamily::W => w_problem(),
        OptFamily::RotatedGhz => rotated_surface_problem(),
    };
    if args.surface == Some(Surface::Xi0) {
        p = p.pin("xi", 0.0)?;
    }
    if let Some(theta) = args.theta_fixed {
        p = p.pin("theta", theta * deg)?;
    }
    Ok(p)
}

fn cmd_optimize(g: &Globals, args: &OptimizeArgs) -> Result<String, CliError> {
    let problem = optimize_problem(args, g.deg)?;
    let points = args.points.unwrap_or_else(|| default_points(&problem));
    let mut r = maximize(&problem, points, args.starts.unwrap_or(4), DEFAULT_REFINE_TOL)?;
    if !args.trace {
        r.trace = None;
    }
    Ok(match g.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&r),
        Format::Csv => {
            let mut out = format!("name,value\nbest_value,{}\n", fmt_sig(r.best_value));
            for (k, v) in &r.argmax {
                writeln!(out, "{k},{}", fmt_sig(*v)).ok();
            }
            out
        }
        Format::Text => {
            let mut out = format!("{}: best_value = {:.9} after {} evaluations\n", r.problem, r.best_value, r.evaluations);
            for (k, v) in &r.argmax {
                writeln!(out, "  {k} = {v:.9}").ok();
            }
            out
        }
    })
}

fn cmd_profile(g: &Globals, args: &ProfileArgs) -> Result<String, CliError> {
    let figure = args.figure.ok_or_else(|| bad("--figure is required (1 or 2)"))?;
    let (header, rows): (&str, Vec<Vec<f64>>) = match figure {
        1 => (
            "theta,p_ghz,p_w",
            profile_fig1(args.resolution.unwrap_or(181))?.iter().map(|r| r.to_vec()).collect(),
        ),
        2 => (
            "theta,p_max_xi0",
            profile_fig2(args.resolution.unwrap_or(91))?.iter().map(|r| r.to_vec()).collect(),
        ),
        f => return Err(bad(format!("--figure must be 1 or 2, got {f}"))),
    };
    Ok(match g.format.unwrap_or(Format::Csv) {
        Format::Json => {
            let names: Vec<&str> = header.split(',').collect();
            let objs: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .iter()
                .map(|r| names.iter().zip(r).map(|(k, v)| (k.to_string(), json!(v))).collect())
                .collect();
            to_json(&objs)
        }
        Format::Csv | Format::Text => match figure {
            1 => csv_table(header, &rows.iter().map(|r| [r[0], r[1], r[2]]).collect::<Vec<_>>()),
            _ => csv_table(header, &rows.iter().map(|r| [r[0], r[1]]).collect::<Vec<_>>()),
        },
    })
}

fn cmd_verify(g: &Globals, args: &VerifyArgs) -> Result<(String, bool), CliError> {
    if let Some(t) = g.tol {
        if !(t > 0.0) {
            return Err(bad(format!("tolerance must be positive, got {t}")));
        }
    }
    let cfg = SuiteConfig {
        tol: g.tol,
        seed: args.seed.unwrap_or(acceptance::DEFAULT_SEED),
    };
    let outcomes = acceptance::run_suite(args.only.as_deref(), &cfg)?;
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let all = passed == outcomes.len();
    let text = match g.format.unwrap_or(Format::Text) {
        Format::Json => to_json(&outcomes),
        _ => {
            let mut out = String::new();
            for o in &outcomes {
                writeln!(out, "{}", o.line()).ok();
            }
            writeln!(out, "{passed}/{} criteria passed", outcomes.len()).ok();
            out
        }
    };
    Ok((text, all))
}

/// Executes a parsed command line.
pub fn execute(mut cli: Cli) -> Result<(), CliError> {
    let cfg = load_config(cli.config.as_deref())?;
    fill_flag(&mut cli.degrees, &cfg, "degrees")?;
    fill_enum(&mut cli.format, &cfg, "format")?;
    fill(&mut cli.output, &cfg, "output")?;
    fill(&mut cli.tol, &cfg, "tol")?;
    let g = Globals {
        deg: if cli.degrees { std::f64::consts::PI / 180.0 } else { 1.0 },
        format: cli.format,
        output: cli.output,
        tol: cli.tol,
    };
    let text = match &mut cli.command {
        Command::Hamiltonian(ham) => {
            ham.merge(&cfg)?;
            cmd_hamiltonian(&g, ham)?
        }
        Command::Evolve { state, ham } => {
            state.merge(&cfg)?;
            ham.merge(&cfg)?;
            cmd_evolve(&g, state, ham)?
        }
        Command::Report { state, ham } => {
            state.merge(&cfg)?;
            ham.merge(&cfg)?;
            cmd_report(&g, state, ham)?
        }
        Command::Optimize(args) => {
            fill_enum(&mut args.state, &cfg, "state")?;
            fill_enum(&mut args.surface, &cfg, "surface")?;
            fill(&mut args.theta_fixed, &cfg, "theta-fixed")?;
            fill(&mut args.points, &cfg, "points")?;
            fill(&mut args.starts, &cfg, "starts")?;
            fill_flag(&mut args.trace, &cfg, "trace")?;
            cmd_optimize(&g, args)?
        }
        Command::Profile(args) => {
            fill(&mut args.figure, &cfg, "figure")?;
            fill(&mut args.resolution, &cfg, "resolution")?;
            cmd_profile(&g, args)?
        }
        Command::Verify(args) => {
            fill(&mut args.only, &cfg, "only")?;
            fill(&mut args.seed, &cfg, "seed")?;
            let (text, all) = cmd_verify(&g, args)?;
            g.emit(&text)?;
            return if all { Ok(()) } else { Err(CliError::Failed("acceptance criteria failed".into())) };
        }
    };
    g.emit(&text)
}

pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pt-nosignal: {e}");
            ExitCode::from(e.code())
        }
    }
}

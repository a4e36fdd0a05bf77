//! Command-line front end: argument parsing, configuration merging and run persistence.
//!
//! Every subcommand reads an optional table of the same name from the `--config` TOML file,
//! applies command-line overrides, and writes its artifacts and a manifest under
//! `<out>/<run_id>/`.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{
    configured_workers, kss_constant_sweep, kss_data_family, lifespan_sweep, lifespan_sweep_fit, parse_nonlinearity,
    CoefficientSpec, DataSpec, FitVariable, ForcingSpec, KssConfig, LifespanConfig, RunRecord, RungOutcome,
};
use crate::flags::{Flag, Flags};
use crate::inequality::{
    boundary_plans, boundary_violation_sweep, estimate_best_constant, standard_cases, FamilyKind,
    InequalityCase, Ratio, SweepBase, SweepPlan, TestFamily,
};
use crate::iteration::{convergence_report, picard_iterate, uniform_bound_report, IterationConfig};
use crate::multiplier::{identity_ladder, observed_orders, sign_condition_report, MultiplierFamily, MultiplierSpec, ResidualWindow};
use crate::norms::{besov_norm, dyadic_norms, sobolev_norm};
use crate::radial::io::{read_profile_csv, write_binary, write_profile_csv};
use crate::radial::{forward_transform, lp_norm, RadialGrid, RadialProfile};
use crate::solver::{solve_linear, solve_nonlinear, SolverConfig};

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_BLOWUP: i32 = 4;

/// Exit status for a failed run.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Numerical(_) | Error::BoundaryReached { .. } => EXIT_NUMERICAL,
        _ => EXIT_VALIDATION,
    }
}

#[derive(Debug, Parser)]
#[command(name = "rwl", version, about = "Numerical laboratory for radial quasilinear wave equations")]
pub struct Cli {
    /// Root directory of run outputs.
    #[arg(long, global = true, default_value = "runs")]
    pub out: PathBuf,
    /// TOML file with one table per subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve one data set, linearly or with a nonlinearity.
    Solve(SolveArgs),
    /// Run the Picard iteration and report uniform bounds and contraction.
    Iterate(IterateArgs),
    /// Measure blow-up times over an amplitude or width sweep and fit lifespan laws.
    Lifespan(LifespanArgs),
    /// Estimate inequality constants and run boundary-violation sweeps.
    VerifyInequality(VerifyInequalityArgs),
    /// Check the multiplier identity on a refinement ladder and its sign conditions.
    VerifyIdentity(VerifyIdentityArgs),
    /// Sobolev, Besov, Lebesgue and dyadic norms of one profile.
    Norms(NormsArgs),
    /// Empirical local energy constants over data, coefficients and horizons.
    SweepKss(SweepKssArgs),
}

/// Result of a successful run.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub run_id: String,
    pub manifest: PathBuf,
    /// A blow-up signal was the controlled outcome of the run.
    pub blowup: bool,
}

/// Parses `args` (including the program name), runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Some(workers) = configured_workers() {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
    match execute(&cli) {
        Ok(outcome) => {
            println!("run {} -> {}", outcome.run_id, outcome.manifest.display());
            if outcome.blowup {
                EXIT_BLOWUP
            } else {
                EXIT_SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let file = cli.config.as_deref();
    let out = cli.out.as_path();
    match &cli.command {
        Command::Solve(a) => solve(out, merged(file, a)?),
        Command::Iterate(a) => iterate(out, merged(file, a)?),
        Command::Lifespan(a) => lifespan(out, merged(file, a)?),
        Command::VerifyInequality(a) => verify_inequality(out, merged(file, a)?),
        Command::VerifyIdentity(a) => verify_identity(out, merged(file, a)?),
        Command::Norms(a) => norms(out, merged(file, a)?),
        Command::SweepKss(a) => sweep_kss(out, merged(file, a)?),
    }
}

/// Command-line overrides of a configuration table.
trait Overrides {
    type Config: Serialize + DeserializeOwned + Default;
    const SECTION: &'static str;
    fn apply(&self, cfg: &mut Self::Config) -> Result<()>;
}

fn merged<A: Overrides>(file: Option<&Path>, args: &A) -> Result<A::Config> {
    let mut cfg = match file {
        None => A::Config::default(),
        Some(path) => {
            let text = fs::read_to_string(path)?;
            let table: toml::Table = text.parse().map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
            match table.get(A::SECTION) {
                None => A::Config::default(),
                Some(v) => v
                    .clone()
                    .try_into()
                    .map_err(|e| Error::Format(format!("[{}]: {e}", A::SECTION)))?,
            }
        }
    };
    args.apply(&mut cfg)?;
    Ok(cfg)
}

fn set<T: Clone>(slot: &mut T, value: &Option<T>) {
    if let Some(v) = value {
        *slot = v.clone();
    }
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn flag_list(flags: &Flags) -> String {
    flags.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("|")
}

/// Run directory with its manifest under construction.
struct RunDir {
    record: RunRecord,
    root: PathBuf,
    dir: PathBuf,
}

impl RunDir {
    fn create(root: &Path, command: &str, config: &impl Serialize) -> Result<Self> {
        let record = RunRecord::new(command, config)?;
        let dir = record.dir(root);
        fs::create_dir_all(&dir)?;
        Ok(Self { record, root: root.to_path_buf(), dir })
    }

    fn csv(&mut self, kind: &str, file: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        let mut w = csv::Writer::from_path(self.dir.join(file)).map_err(Error::from)?;
        w.write_record(header).map_err(Error::from)?;
        for row in rows {
            w.write_record(&row).map_err(Error::from)?;
        }
        w.flush()?;
        self.record.add_output(kind, file);
        Ok(())
    }

    fn json(&mut self, kind: &str, file: &str, value: &impl Serialize) -> Result<()> {
        fs::write(self.dir.join(file), serde_json::to_string_pretty(value)?)?;
        self.record.add_output(kind, file);
        Ok(())
    }

    fn profile(&mut self, kind: &str, file: &str, profile: &RadialProfile) -> Result<()> {
        write_profile_csv(profile, BufWriter::new(File::create(self.dir.join(file))?))?;
        self.record.add_output(kind, file);
        Ok(())
    }

    fn binary(&mut self, kind: &str, file: &str, grid: &RadialGrid, slices: &[&[f64]]) -> Result<()> {
        write_binary(grid, slices, BufWriter::new(File::create(self.dir.join(file))?))?;
        self.record.add_output(kind, file);
        Ok(())
    }

    fn metric(&mut self, name: &str, value: f64, artifact: &str) -> Result<()> {
        self.record.add_metric(name, value, artifact)
    }

    fn finish(mut self, blowup: bool) -> Result<Outcome> {
        let manifest = self.record.store(&self.root)?;
        Ok(Outcome { run_id: self.record.run_id, manifest, blowup })
    }
}

// ---------------------------------------------------------------- solve

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    pub n: usize,
    pub r_max: f64,
    pub points: usize,
    pub t_final: f64,
    /// Data specification, e.g. `gaussian:amp=1,width=1`.
    pub data: String,
    /// Nonlinearity specification, e.g. `g=linear:0.2;a=const:-1`; empty for the linear wave.
    pub nonlinearity: String,
    /// Amplitude guard of nonlinear runs as a multiple of `sup |u0| + sup |u1|`.
    pub clip_factor: f64,
    pub solver: SolverConfig,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            n: 3,
            r_max: 32.0,
            points: 1024,
            t_final: 4.0,
            data: "gaussian:amp=1,width=1".into(),
            nonlinearity: String::new(),
            clip_factor: 10.0,
            solver: SolverConfig { stride: 8, ..SolverConfig::default() },
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub t_final: Option<f64>,
    /// Data, e.g. `gaussian:amp=1,width=1` or `bump:amp=1,radius=2,slot=velocity`.
    #[arg(long)]
    pub data: Option<String>,
    /// Nonlinearity, e.g. `g=linear:0.2;a=const:-1;b=zero`.
    #[arg(long)]
    pub nonlinearity: Option<String>,
    #[arg(long)]
    pub clip_factor: Option<f64>,
    #[arg(long)]
    pub cfl: Option<f64>,
    /// Store every `stride`-th step.
    #[arg(long)]
    pub stride: Option<usize>,
}

impl Overrides for SolveArgs {
    type Config = SolveConfig;
    const SECTION: &'static str = "solve";

    fn apply(&self, c: &mut SolveConfig) -> Result<()> {
        set(&mut c.n, &self.n);
        set(&mut c.r_max, &self.r_max);
        set(&mut c.points, &self.points);
        set(&mut c.t_final, &self.t_final);
        set(&mut c.data, &self.data);
        set(&mut c.nonlinearity, &self.nonlinearity);
        set(&mut c.clip_factor, &self.clip_factor);
        set(&mut c.solver.cfl, &self.cfl);
        set(&mut c.solver.stride, &self.stride);
        Ok(())
    }
}

fn solve(out: &Path, cfg: SolveConfig) -> Result<Outcome> {
    let grid = RadialGrid::new(cfg.n, cfg.r_max, cfg.points)?;
    let data: DataSpec = cfg.data.parse()?;
    let nl = parse_nonlinearity(&cfg.nonlinearity)?;
    let (u0, u1) = data.profiles(grid)?;
    if !(cfg.clip_factor > 0.0) {
        return Err(Error::Validation("clip factor must be positive".into()));
    }
    let mut run = RunDir::create(out, "solve", &cfg)?;
    let zero = |_: f64, _: f64| 0.0;
    let (field, blowup) = if nl.is_free() {
        let sol = solve_linear(&u0, &u1, &zero, &zero, cfg.t_final, &cfg.solver)?;
        let half = sol.dt * 0.5;
        run.csv(
            "energy",
            "energy.csv",
            &["t", "energy"],
            sol.energy.iter().enumerate().map(|(m, e)| vec![num(m as f64 * sol.dt + half), num(*e)]),
        )?;
        run.metric("energy_drift", sol.energy_drift(), "energy")?;
        (sol.field, None)
    } else {
        let clip = cfg.clip_factor * (u0.max_abs() + u1.max_abs()).max(f64::MIN_POSITIVE);
        let res = solve_nonlinear(&u0, &u1, &nl, cfg.t_final, clip, &cfg.solver)?;
        #[derive(Serialize)]
        struct Summary {
            dt: f64,
            clip: f64,
            peak_amplitude: f64,
            blowup_time: Option<f64>,
            blowup_reason: Option<crate::solver::BlowupReason>,
        }
        let summary = Summary {
            dt: res.dt,
            clip,
            peak_amplitude: res.peak_amplitude,
            blowup_time: res.blowup.map(|b| b.0),
            blowup_reason: res.blowup.map(|b| b.1),
        };
        run.json("summary", "summary.json", &summary)?;
        run.metric("peak_amplitude", res.peak_amplitude, "summary")?;
        if let Some((t, _)) = res.blowup {
            run.metric("blowup_time", t, "summary")?;
        }
        (res.field, res.blowup)
    };
    let slices: Vec<&[f64]> = (0..field.len()).map(|m| field.u(m)).collect();
    run.binary("field", "field.bin", &grid, &slices)?;
    run.csv("times", "times.csv", &["slice", "t"], field.times().iter().enumerate().map(|(m, t)| vec![m.to_string(), num(*t)]))?;
    let last = field.u_profile(field.len() - 1);
    run.profile("final", "final.csv", &last)?;
    run.metric("final_time", field.final_time(), "times")?;
    run.metric("final_max_abs", last.max_abs(), "final")?;
    run.finish(blowup.is_some())
}

// ---------------------------------------------------------------- iterate

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IterateConfig {
    pub n: usize,
    pub r_max: f64,
    pub points: usize,
    pub t_final: f64,
    /// Number of iterates requested.
    pub count: usize,
    pub data: String,
    pub nonlinearity: String,
    pub iteration: IterationConfig,
}

impl Default for IterateConfig {
    fn default() -> Self {
        Self {
            n: 3,
            r_max: 32.0,
            points: 1024,
            t_final: 0.5,
            count: 8,
            data: "gaussian:amp=0.3,width=1".into(),
            nonlinearity: "g=linear:0.2;a=const:3".into(),
            iteration: IterationConfig::default(),
        }
    }
}

#[derive(Debug, Args)]
pub struct IterateArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub data: Option<String>,
    #[arg(long)]
    pub nonlinearity: Option<String>,
    /// Data regularity.
    #[arg(long)]
    pub s: Option<f64>,
    /// Convergence regularity.
    #[arg(long)]
    pub s0: Option<f64>,
    /// Local energy weight exponent.
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub smallness: Option<f64>,
    /// Stop at the first stage failing the smallness check.
    #[arg(long)]
    pub enforce_smallness: Option<bool>,
}

impl Overrides for IterateArgs {
    type Config = IterateConfig;
    const SECTION: &'static str = "iterate";

    fn apply(&self, c: &mut IterateConfig) -> Result<()> {
        set(&mut c.n, &self.n);
        set(&mut c.r_max, &self.r_max);
        set(&mut c.points, &self.points);
        set(&mut c.t_final, &self.t_final);
        set(&mut c.count, &self.count);
        set(&mut c.data, &self.data);
        set(&mut c.nonlinearity, &self.nonlinearity);
        set(&mut c.iteration.s, &self.s);
        if self.s0.is_some() {
            c.iteration.s0 = self.s0;
        }
        set(&mut c.iteration.mu, &self.mu);
        set(&mut c.iteration.smallness, &self.smallness);
        set(&mut c.iteration.enforce_smallness, &self.enforce_smallness);
        Ok(())
    }
}

fn iterate(out: &Path, cfg: IterateConfig) -> Result<Outcome> {
    let grid = RadialGrid::new(cfg.n, cfg.r_max, cfg.points)?;
    let data: DataSpec = cfg.data.parse()?;
    let nl = parse_nonlinearity(&cfg.nonlinearity)?;
    let (u0, u1) = data.profiles(grid)?;
    let it = picard_iterate(&u0, &u1, &nl, cfg.t_final, cfg.count, &cfg.iteration)?;
    let mut run = RunDir::create(out, "iterate", &cfg)?;
    run.csv(
        "iterates",
        "iterates.csv",
        &["k", "smallness", "residual", "peak_amplitude"],
        it.iterates
            .iter()
            .map(|i| vec![i.k.to_string(), num(i.smallness), num(i.residual), num(i.peak_amplitude)]),
    )?;
    let uniform = if it.iterates.is_empty() { None } else { Some(uniform_bound_report(&it)?) };
    if let Some(u) = &uniform {
        run.csv(
            "uniform",
            "uniform.csv",
            &["k", "theta", "besov", "norm", "data_norm", "ratio", "jump"],
            u.rows.iter().map(|r| {
                vec![
                    r.k.to_string(),
                    num(r.theta),
                    r.besov.to_string(),
                    num(r.norm),
                    num(r.data_norm),
                    num(r.ratio),
                    r.jump.to_string(),
                ]
            }),
        )?;
        run.metric("max_uniform_ratio", u.max_ratio, "uniform")?;
    }
    let convergence = if it.iterates.len() >= 4 { Some(convergence_report(&it)?) } else { None };
    if let Some(c) = &convergence {
        run.csv(
            "differences",
            "differences.csv",
            &["k", "value", "ratio", "partial_sum"],
            c.rows.iter().map(|r| vec![r.k.to_string(), num(r.value), opt(r.ratio), num(r.partial_sum)]),
        )?;
    }
    let mut flags = it.flags.clone();
    if let Some(c) = &convergence {
        for f in c.flags.iter() {
            flags.insert(f);
        }
    }
    #[derive(Serialize)]
    struct Report<'a> {
        data_size: f64,
        iterates: usize,
        truncated: &'a Option<crate::iteration::StageReport>,
        flags: String,
        convergence: &'a Option<crate::iteration::ConvergenceReport>,
        max_uniform_ratio: Option<f64>,
        uniform_jumps: Option<&'a [u32]>,
        embedding_constant: Option<f64>,
    }
    let report = Report {
        data_size: it.data_size,
        iterates: it.iterates.len(),
        truncated: &it.truncated,
        flags: flag_list(&flags),
        convergence: &convergence,
        max_uniform_ratio: uniform.as_ref().map(|u| u.max_ratio),
        uniform_jumps: uniform.as_ref().map(|u| u.jumps.as_slice()),
        embedding_constant: uniform.as_ref().and_then(|u| u.embedding_constant),
    };
    run.json("report", "report.json", &report)?;
    run.metric("data_size", it.data_size, "report")?;
    if let Some(c) = &convergence {
        if let Some(q) = c.fit_ratio {
            run.metric("fit_ratio", q, "report")?;
        }
        if let Some(q) = c.max_successive_ratio {
            run.metric("max_successive_ratio", q, "report")?;
        }
    }
    run.finish(false)
}

// ---------------------------------------------------------------- lifespan

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LifespanRunConfig {
    /// Base data; its amplitude and width are replaced by the sweep values.
    pub shape: String,
    pub amplitudes: Vec<f64>,
    /// Widths (or radii) swept for every amplitude; empty keeps the base width.
    pub widths: Vec<f64>,
    pub nonlinearity: String,
    pub fit_variable: FitVariable,
    pub lifespan: LifespanConfig,
}

impl Default for LifespanRunConfig {
    fn default() -> Self {
        Self {
            shape: "gaussian:width=1".into(),
            amplitudes: vec![3.2, 4.0, 4.8, 5.6, 6.4, 7.2, 8.0],
            widths: Vec::new(),
            nonlinearity: "a=const:-1".into(),
            fit_variable: FitVariable::Amplitude,
            lifespan: LifespanConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FitVariableArg {
    Amplitude,
    DataSize,
}

#[derive(Debug, Args)]
pub struct LifespanArgs {
    /// Base data shape, e.g. `gaussian:width=1`.
    #[arg(long)]
    pub shape: Option<String>,
    /// Comma-separated amplitudes.
    #[arg(long, value_delimiter = ',')]
    pub amplitudes: Option<Vec<f64>>,
    /// Comma-separated widths.
    #[arg(long, value_delimiter = ',')]
    pub widths: Option<Vec<f64>>,
    #[arg(long)]
    pub nonlinearity: Option<String>,
    #[arg(long, value_enum)]
    pub fit_variable: Option<FitVariableArg>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Comma-separated point counts, coarse to fine.
    #[arg(long, value_delimiter = ',')]
    pub ladder: Option<Vec<usize>>,
    #[arg(long)]
    pub t_cap: Option<f64>,
    #[arg(long)]
    pub clip_factor: Option<f64>,
    #[arg(long)]
    pub gap_tolerance: Option<f64>,
    /// Regularity of the data size.
    #[arg(long)]
    pub s: Option<f64>,
}

impl Overrides for LifespanArgs {
    type Config = LifespanRunConfig;
    const SECTION: &'static str = "lifespan";

    fn apply(&self, c: &mut LifespanRunConfig) -> Result<()> {
        set(&mut c.shape, &self.shape);
        set(&mut c.amplitudes, &self.amplitudes);
        set(&mut c.widths, &self.widths);
        set(&mut c.nonlinearity, &self.nonlinearity);
        if let Some(v) = self.fit_variable {
            c.fit_variable = match v {
                FitVariableArg::Amplitude => FitVariable::Amplitude,
                FitVariableArg::DataSize => FitVariable::DataSize,
            };
        }
        let l = &mut c.lifespan;
        set(&mut l.n, &self.n);
        set(&mut l.r_max, &self.r_max);
        set(&mut l.ladder, &self.ladder);
        set(&mut l.t_cap, &self.t_cap);
        set(&mut l.clip_factor, &self.clip_factor);
        set(&mut l.gap_tolerance, &self.gap_tolerance);
        set(&mut l.s, &self.s);
        Ok(())
    }
}

fn lifespan(out: &Path, cfg: LifespanRunConfig) -> Result<Outcome> {
    let base: DataSpec = cfg.shape.parse()?;
    let nl = parse_nonlinearity(&cfg.nonlinearity)?;
    if cfg.amplitudes.is_empty() {
        return Err(Error::Validation("at least one amplitude is required".into()));
    }
    let widths = if cfg.widths.is_empty() { vec![base.shape.scale()] } else { cfg.widths.clone() };
    let data: Vec<DataSpec> = cfg
        .amplitudes
        .iter()
        .flat_map(|&a| {
            let base = &base;
            widths.iter().map(move |&w| DataSpec { shape: base.shape.with_scale(w), amplitude: a, slot: base.slot })
        })
        .collect();
    let ms = lifespan_sweep(&data, &nl, &cfg.lifespan)?;
    let mut run = RunDir::create(out, "lifespan", &cfg)?;
    run.csv(
        "lifespan",
        "lifespan.csv",
        &["index", "amplitude", "scale", "data_size", "t_star", "censored", "confirmed", "refinement_gap", "flags"],
        ms.iter().enumerate().map(|(i, m)| {
            vec![
                i.to_string(),
                num(m.data.amplitude),
                num(m.data.shape.scale()),
                num(m.data_size),
                num(m.t_star),
                m.censored.to_string(),
                m.confirmed.to_string(),
                opt(m.refinement_gap),
                flag_list(&m.flags),
            ]
        }),
    )?;
    run.csv(
        "rungs",
        "rungs.csv",
        &["index", "points", "t_star", "outcome"],
        ms.iter().enumerate().flat_map(|(i, m)| {
            m.rungs.iter().map(move |r| {
                let outcome = match r.outcome {
                    RungOutcome::Blowup { reason } => format!("blowup:{}", serde_json::to_value(reason).unwrap_or_default().as_str().unwrap_or("")),
                    RungOutcome::TimeCap => "time_cap".into(),
                    RungOutcome::Boundary => "boundary".into(),
                };
                vec![i.to_string(), r.points.to_string(), num(r.t_star), outcome]
            })
        }),
    )?;
    let confirmed = ms.iter().filter(|m| m.confirmed).count();
    run.metric("confirmed", confirmed as f64, "lifespan")?;
    match lifespan_sweep_fit(&ms, cfg.fit_variable) {
        Ok(fit) => {
            run.json("fit", "fit.json", &fit)?;
            run.metric("exponential_slope", fit.exponential.slope, "fit")?;
            run.metric("exponential_r2", fit.exponential.r_squared, "fit")?;
            run.metric("power_exponent", fit.power.power_exponent(), "fit")?;
            run.metric("power_r2", fit.power.r_squared, "fit")?;
        }
        Err(e) if e.is_validation() => {
            run.json("fit", "fit.json", &serde_json::json!({ "error": e.to_string() }))?;
        }
        Err(e) => return Err(e),
    }
    let blowup = ms.iter().any(|m| m.flags.contains(Flag::BlowupSignal));
    run.finish(blowup)
}

// ---------------------------------------------------------------- verify-inequality

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyInequalityConfig {
    pub n: usize,
    pub r_max: f64,
    pub points: usize,
    pub family: FamilyKind,
    pub count: usize,
    pub seed: u64,
    /// Cases to estimate; absent means the standard suite.
    pub cases: Option<Vec<InequalityCase>>,
    /// Scaling sweeps; absent means the boundary suite.
    pub sweeps: Option<Vec<SweepPlan>>,
    /// Grid of the sweeps, wider than the estimation grid.
    pub sweep_r_max: f64,
    pub sweep_points: usize,
}

impl Default for VerifyInequalityConfig {
    fn default() -> Self {
        Self {
            n: 3,
            r_max: 64.0,
            points: 4096,
            family: FamilyKind::Mixed,
            count: 200,
            seed: 1,
            cases: None,
            sweeps: None,
            sweep_r_max: 128.0,
            sweep_points: 8192,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FamilyArg {
    GaussianBumps,
    DyadicPackets,
    RandomSmooth,
    Mixed,
}

#[derive(Debug, Args)]
pub struct VerifyInequalityArgs {
    /// Single case id, e.g. `weighted_hardy`; replaces the standard suite.
    #[arg(long)]
    pub case: Option<String>,
    /// Case parameters as `key=value`, comma-separated or repeated.
    #[arg(long, value_delimiter = ',', requires = "case")]
    pub params: Vec<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Scaling factors of a sweep of the selected case, comma-separated.
    #[arg(long, value_delimiter = ',', requires = "case")]
    pub sweep: Option<Vec<f64>>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub r_max: Option<f64>,
}

impl Overrides for VerifyInequalityArgs {
    type Config = VerifyInequalityConfig;
    const SECTION: &'static str = "verify-inequality";

    fn apply(&self, c: &mut VerifyInequalityConfig) -> Result<()> {
        set(&mut c.n, &self.n);
        set(&mut c.count, &self.count);
        set(&mut c.seed, &self.seed);
        set(&mut c.points, &self.points);
        set(&mut c.r_max, &self.r_max);
        if let Some(f) = self.family {
            c.family = match f {
                FamilyArg::GaussianBumps => FamilyKind::GaussianBumps,
                FamilyArg::DyadicPackets => FamilyKind::DyadicPackets,
                FamilyArg::RandomSmooth => FamilyKind::RandomSmooth,
                FamilyArg::Mixed => FamilyKind::Mixed,
            };
        }
        if let Some(id) = &self.case {
            let params = self
                .params
                .iter()
                .map(|kv| {
                    kv.split_once('=')
                        .map(|(k, v)| (k.trim().to_owned(), v.trim().to_owned()))
                        .ok_or_else(|| Error::Validation(format!("parameter '{kv}' is not key=value")))
                })
                .collect::<Result<Vec<_>>>()?;
            let case = InequalityCase::from_params(id, c.n, &params)?;
            c.sweeps = Some(match &self.sweep {
                Some(lambdas) => vec![SweepPlan { case: case.clone(), base: SweepBase::Gaussian, lambdas: lambdas.clone() }],
                None => Vec::new(),
            });
            c.cases = Some(if case.admissible() || self.sweep.is_none() { vec![case] } else { Vec::new() });
        }
        if c.cases.is_none() {
            c.cases = Some(standard_cases(c.n));
        }
        if c.sweeps.is_none() {
            c.sweeps = Some(boundary_plans(c.n));
        }
        Ok(())
    }
}

fn ratio_cells(r: &Ratio) -> [String; 2] {
    match r {
        Ratio::Finite(v) => ["finite".into(), num(*v)],
        Ratio::Violation => ["violation".into(), String::new()],
        Ratio::Undefined => ["undefined".into(), String::new()],
    }
}

fn param_list(case: &InequalityCase) -> String {
    case.params().iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

fn verify_inequality(out: &Path, cfg: VerifyInequalityConfig) -> Result<Outcome> {
    let grid = RadialGrid::new(cfg.n, cfg.r_max, cfg.points)?;
    let family = TestFamily::new(cfg.family.clone(), cfg.count, cfg.seed);
    family.validate(&grid)?;
    let cases = cfg.cases.clone().unwrap_or_default();
    let sweeps = cfg.sweeps.clone().unwrap_or_default();
    if cases.iter().chain(sweeps.iter().map(|p| &p.case)).any(|c| c.dim() != cfg.n) {
        return Err(Error::Validation(format!("every case must be in dimension {}", cfg.n)));
    }
    let estimates = cases.iter().map(|c| estimate_best_constant(c, &family, &grid)).collect::<Result<Vec<_>>>()?;
    let sweep_grid = RadialGrid::new(cfg.n, cfg.sweep_r_max, cfg.sweep_points)?;
    let reports = sweeps
        .iter()
        .map(|p| boundary_violation_sweep(&p.case, p.base, &p.lambdas, &sweep_grid))
        .collect::<Result<Vec<_>>>()?;
    let mut run = RunDir::create(out, "verify-inequality", &cfg)?;
    run.csv(
        "constants",
        "constants.csv",
        &["index", "case", "params", "constant", "family_max", "family_min", "members", "violations", "undefined"],
        estimates.iter().enumerate().map(|(i, e)| {
            vec![
                i.to_string(),
                e.case.id().to_owned(),
                param_list(&e.case),
                num(e.constant),
                num(e.family_max),
                num(e.family_min),
                e.members.to_string(),
                e.violations.to_string(),
                e.undefined.to_string(),
            ]
        }),
    )?;
    run.csv(
        "ratios",
        "ratios.csv",
        &["index", "case", "member", "kind", "ratio"],
        estimates.iter().enumerate().flat_map(|(i, e)| {
            e.table.iter().enumerate().map(move |(m, row)| {
                let [kind, value] = ratio_cells(&row.ratio);
                vec![i.to_string(), e.case.id().to_owned(), m.to_string(), kind, value]
            })
        }),
    )?;
    run.csv(
        "sweeps",
        "sweeps.csv",
        &["index", "case", "params", "admissible", "lambda", "kind", "ratio"],
        reports.iter().enumerate().flat_map(|(i, s)| {
            s.rows.iter().map(move |row| {
                let [kind, value] = ratio_cells(&row.ratio);
                vec![i.to_string(), s.case.id().to_owned(), param_list(&s.case), s.admissible.to_string(), num(row.lambda), kind, value]
            })
        }),
    )?;
    #[derive(Serialize)]
    struct SweepSummary<'a> {
        case: &'a InequalityCase,
        admissible: bool,
        growth_exponent: Option<f64>,
        growth_factor: Option<f64>,
    }
    #[derive(Serialize)]
    struct EstimateSummary<'a> {
        case: &'a InequalityCase,
        constant: f64,
        argmax: &'a crate::inequality::Member,
        violations: usize,
    }
    let summary = serde_json::json!({
        "estimates": estimates.iter().map(|e| EstimateSummary { case: &e.case, constant: e.constant, argmax: &e.argmax, violations: e.violations }).collect::<Vec<_>>(),
        "sweeps": reports.iter().map(|s| SweepSummary { case: &s.case, admissible: s.admissible, growth_exponent: s.growth_exponent, growth_factor: s.growth_factor }).collect::<Vec<_>>(),
    });
    run.json("report", "report.json", &summary)?;
    for (i, e) in estimates.iter().enumerate() {
        run.metric(&format!("constant.{i}.{}", e.case.id()), e.constant, "constants")?;
    }
    for (i, s) in reports.iter().enumerate() {
        if let Some(g) = s.growth_exponent {
            run.metric(&format!("growth_exponent.{i}.{}", s.case.id()), g, "sweeps")?;
        }
    }
    run.finish(false)
}

// ---------------------------------------------------------------- verify-identity

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyIdentityConfig {
    pub n: usize,
    pub family: MultiplierFamily,
    pub radius: f64,
    /// Mesh widths of the refinement ladder.
    pub widths: Vec<f64>,
    pub window: ResidualWindow,
    /// `log10` range of the radii probed for the sign conditions.
    pub sign_decades: (f64, f64),
    pub sign_samples: usize,
}

impl Default for VerifyIdentityConfig {
    fn default() -> Self {
        Self {
            n: 3,
            family: MultiplierFamily::Power { mu: 0.5 },
            radius: 1.0,
            widths: vec![0.04, 0.02, 0.01],
            window: ResidualWindow::default(),
            sign_decades: (-6.0, 6.0),
            sign_samples: 241,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MultiplierArg {
    Power,
    Ratio,
    Unit,
}

#[derive(Debug, Args)]
pub struct VerifyIdentityArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum)]
    pub family: Option<MultiplierArg>,
    /// Exponent of the power family.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Multiplier scale.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Comma-separated mesh widths.
    #[arg(long, value_delimiter = ',')]
    pub widths: Option<Vec<f64>>,
}

impl Overrides for VerifyIdentityArgs {
    type Config = VerifyIdentityConfig;
    const SECTION: &'static str = "verify-identity";

    fn apply(&self, c: &mut VerifyIdentityConfig) -> Result<()> {
        set(&mut c.n, &self.n);
        set(&mut c.radius, &self.radius);
        set(&mut c.widths, &self.widths);
        let current_mu = match c.family {
            MultiplierFamily::Power { mu } => mu,
            _ => 0.5,
        };
        c.family = match (self.family, self.mu) {
            (Some(MultiplierArg::Ratio), _) => MultiplierFamily::Ratio,
            (Some(MultiplierArg::Unit), _) => MultiplierFamily::Unit,
            (Some(MultiplierArg::Power), mu) => MultiplierFamily::Power { mu: mu.unwrap_or(current_mu) },
            (None, Some(mu)) => MultiplierFamily::Power { mu },
            (None, None) => c.family,
        };
        Ok(())
    }
}

fn verify_identity(out: &Path, cfg: VerifyIdentityConfig) -> Result<Outcome> {
    let spec = MultiplierSpec::new(cfg.family, cfg.radius, cfg.n)?;
    let (lo, hi) = cfg.sign_decades;
    if !(lo < hi && cfg.sign_samples >= 2) {
        return Err(Error::Validation("sign check needs an increasing decade range and two samples".into()));
    }
    let ladder = identity_ladder(&spec, &cfg.widths, cfg.window)?;
    let orders = observed_orders(&ladder);
    let radii: Vec<f64> = (0..cfg.sign_samples)
        .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (cfg.sign_samples - 1) as f64))
        .collect();
    let signs = sign_condition_report(&spec, &radii);
    let mut run = RunDir::create(out, "verify-identity", &cfg)?;
    run.csv(
        "residuals",
        "residuals.csv",
        &["level", "dr", "dt", "block", "residual"],
        ladder.iter().enumerate().flat_map(|(l, rep)| {
            rep.blocks.iter().map(move |(name, v)| vec![l.to_string(), num(rep.dr), num(rep.dt), name.clone(), num(*v)])
        }),
    )?;
    run.csv(
        "orders",
        "orders.csv",
        &["block", "level", "order"],
        orders
            .iter()
            .flat_map(|(name, os)| os.iter().enumerate().map(move |(l, o)| vec![name.clone(), l.to_string(), num(*o)])),
    )?;
    run.json("signs", "signs.json", &signs)?;
    let defects: Vec<f64> = ladder.iter().map(|r| r.balance_defect).collect();
    run.json("balance", "balance.json", &serde_json::json!({ "balance_defects": defects }))?;
    let min_order = orders.iter().flat_map(|(_, os)| os.iter().copied()).fold(f64::INFINITY, f64::min);
    run.metric("min_order", min_order, "orders")?;
    run.metric("sign_violations", signs.violations as f64, "signs")?;
    run.finish(false)
}

// ---------------------------------------------------------------- norms

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormsConfig {
    pub n: usize,
    pub r_max: f64,
    pub points: usize,
    /// Data specification used when no input file is given.
    pub data: String,
    /// `r,value` CSV on the configured grid.
    pub input: Option<PathBuf>,
    /// Regularities of the Sobolev and Besov norms.
    pub orders: Vec<f64>,
    pub besov_q: f64,
    /// Lebesgue exponents; `inf` is allowed.
    #[serde(with = "crate::serde_ext::extended_float_vec")]
    pub lebesgue: Vec<f64>,
}

impl Default for NormsConfig {
    fn default() -> Self {
        Self {
            n: 3,
            r_max: 32.0,
            points: 1024,
            data: "gaussian:amp=1,width=1".into(),
            input: None,
            orders: vec![0.0, 0.5, 1.0, 1.5],
            besov_q: 1.0,
            lebesgue: vec![2.0, f64::INFINITY],
        }
    }
}

#[derive(Debug, Args)]
pub struct NormsArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub data: Option<String>,
    /// Profile CSV with `r,value` rows.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Comma-separated regularities.
    #[arg(long, value_delimiter = ',')]
    pub orders: Option<Vec<f64>>,
    #[arg(long)]
    pub besov_q: Option<f64>,
}

impl Overrides for NormsArgs {
    type Config = NormsConfig;
    const SECTION: &'static str = "norms";

    fn apply(&self, c: &mut NormsConfig) -> Result<()> {
        set(&mut c.n, &self.n);
        set(&mut c.r_max, &self.r_max);
        set(&mut c.points, &self.points);
        set(&mut c.data, &self.data);
        if self.input.is_some() {
            c.input = self.input.clone();
        }
        set(&mut c.orders, &self.orders);
        set(&mut c.besov_q, &self.besov_q);
        Ok(())
    }
}

fn norms(out: &Path, cfg: NormsConfig) -> Result<Outcome> {
    let grid = RadialGrid::new(cfg.n, cfg.r_max, cfg.points)?;
    let profile = match &cfg.input {
        Some(path) => read_profile_csv(grid, File::open(path)?)?,
        None => cfg.data.parse::<DataSpec>()?.profiles(grid)?.0,
    };
    let mut rows = Vec::new();
    for &s in &cfg.orders {
        rows.push(("sobolev", s, None, sobolev_norm(&profile, s)?));
        rows.push(("besov", s, Some(cfg.besov_q), besov_norm(&profile, s, cfg.besov_q)?));
    }
    for &p in &cfg.lebesgue {
        rows.push(("lebesgue", p, None, lp_norm(&profile, p)?));
    }
    let mut run = RunDir::create(out, "norms", &cfg)?;
    run.csv(
        "norms",
        "norms.csv",
        &["norm", "order", "q", "value"],
        rows.iter().map(|(name, s, q, v)| vec![name.to_string(), num(*s), opt(*q), num(*v)]),
    )?;
    let dyadic = dyadic_norms(&forward_transform(&profile));
    run.csv("dyadic", "dyadic.csv", &["j", "value"], dyadic.iter().map(|(j, v)| vec![j.to_string(), num(*v)]))?;
    for (name, s, _, v) in &rows {
        run.metric(&format!("{name}[{s}]"), *v, "norms")?;
    }
    run.finish(false)
}

// ---------------------------------------------------------------- sweep-kss

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepKssConfig {
    pub kss: KssConfig,
    /// Number of data pairs drawn from the mixed test family.
    pub count: usize,
    pub seed: u64,
    pub coefficients: Vec<CoefficientSpec>,
    pub forcing: ForcingSpec,
    pub horizons: Vec<f64>,
}

impl Default for SweepKssConfig {
    fn default() -> Self {
        Self {
            kss: KssConfig::default(),
            count: 20,
            seed: 7,
            coefficients: vec![
                CoefficientSpec::Zero,
                CoefficientSpec::Bump { amplitude: 0.2, width: 2.0 },
                CoefficientSpec::Pulse { amplitude: 0.2, width: 1.0, speed: 0.5 },
            ],
            forcing: ForcingSpec::Zero,
            horizons: vec![0.25, 0.5, 1.0],
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepKssArgs {
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated horizons.
    #[arg(long, value_delimiter = ',')]
    pub horizons: Option<Vec<f64>>,
    /// Comma-separated regularities in `[0, 1]`.
    #[arg(long, value_delimiter = ',')]
    pub thetas: Option<Vec<f64>>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

impl Overrides for SweepKssArgs {
    type Config = SweepKssConfig;
    const SECTION: &'static str = "sweep-kss";

    fn apply(&self, c: &mut SweepKssConfig) -> Result<()> {
        set(&mut c.count, &self.count);
        set(&mut c.seed, &self.seed);
        set(&mut c.horizons, &self.horizons);
        set(&mut c.kss.thetas, &self.thetas);
        set(&mut c.kss.mu, &self.mu);
        set(&mut c.kss.n, &self.n);
        set(&mut c.kss.r_max, &self.r_max);
        set(&mut c.kss.points, &self.points);
        Ok(())
    }
}

fn sweep_kss(out: &Path, cfg: SweepKssConfig) -> Result<Outcome> {
    let grid = cfg.kss.grid()?;
    let data = kss_data_family(grid, cfg.count, cfg.seed)?;
    let table = kss_constant_sweep(&data, &cfg.coefficients, &cfg.forcing, &cfg.horizons, &cfg.kss)?;
    let mut run = RunDir::create(out, "sweep-kss", &cfg)?;
    run.csv(
        "kss",
        "kss.csv",
        &["data", "coefficient", "t_final", "theta", "solution_norm", "data_norm", "forcing_norm", "ratio"],
        table.rows.iter().map(|r| {
            vec![
                r.data.to_string(),
                r.coefficient.to_string(),
                num(r.t_final),
                num(r.theta),
                num(r.solution_norm),
                num(r.data_norm),
                num(r.forcing_norm),
                num(r.ratio),
            ]
        }),
    )?;
    run.csv(
        "summary",
        "summary.csv",
        &["theta", "min_ratio", "max_ratio"],
        table.summary.iter().map(|s| vec![num(s.theta), num(s.min_ratio), num(s.max_ratio)]),
    )?;
    run.csv(
        "skipped",
        "skipped.csv",
        &["coefficient", "t_final", "smallness"],
        table.skipped.iter().map(|s| vec![s.coefficient.to_string(), num(s.t_final), num(s.smallness)]),
    )?;
    if !table.rows.is_empty() {
        run.metric("spread", table.spread(), "kss")?;
    }
    for s in table.summary.iter().filter(|s| s.max_ratio > 0.0) {
        run.metric(&format!("max_ratio[{}]", s.theta), s.max_ratio, "summary")?;
    }
    run.finish(false)
}

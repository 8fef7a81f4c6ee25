//! `qfridge`: steady-state heat currents of a light-driven three-level
//! absorption refrigerator.
//!
//! Custom photon-number distributions (`--stat custom --custom-pn FILE`) are
//! read from a plain-text file of whitespace-separated probabilities P_0,
//! P_1, …, where the index is the photon number. Totals within 1e-6 of one
//! are renormalized.
//!
//! Exit codes: 0 success, 1 failed check, 2 usage error, 3 domain error,
//! 4 I/O error.

mod config;
mod table;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qfridge::driving::{cop_from_average_flux, flux, CoolingStatus};
use qfridge::oracle::{
    all_passed, run_equivalence_suite, write_json_lines, GridPreset, Mutation, SuiteConfig,
};
use qfridge::sweep::{
    coherence_profile, run_sweep, thermal_bath_scan, BathStatus, Grid, Output, Parameterization,
    SweepSpec,
};
use qfridge::{Execution, PhotonDistribution, RefrigeratorParams, Statistic};

use config::Config;
use table::{num, opt, Format, Table};

#[derive(Debug)]
pub enum CliError {
    CheckFailed(usize),
    Usage(String),
    Domain(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<qfridge::Error> for CliError {
    fn from(e: qfridge::Error) -> Self {
        match e {
            qfridge::Error::InvalidParameter { .. } => CliError::Usage(e.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "qfridge",
    version,
    about = "Three-level absorption refrigerator driven by light of arbitrary photon statistics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Heat currents and COP at a single operating point.
    Point(PointArgs),
    /// Average flux and heat currents over a grid of intensities.
    Sweep(SweepArgs),
    /// Machine powered by a thermal field on the work transition.
    ThermalBath(BathArgs),
    /// Normalized correlation functions g^(k) over a grid.
    Coherence(CoherenceArgs),
    /// Run the cross-check suite; exit status 1 if any check fails.
    Check(CheckArgs),
}

/// Refrigerator parameters. Flags override `--config`, which overrides the
/// built-in defaults.
#[derive(Args, Debug, Clone)]
struct ParamArgs {
    /// key=value file (keys: omega-c, omega-h, gamma, kappa, delta, xi0, nbar-c, nbar-h, nbar-e).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    omega_c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    omega_h: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    xi0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    nbar_c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    nbar_h: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct OutArgs {
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct PointArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value = "coherent", value_parser = parse_stat)]
    stat: Statistic,
    /// Mean photon number.
    #[arg(long, conflicts_with = "lambda", allow_hyphen_values = true)]
    mean: Option<f64>,
    /// Native distribution parameter (λ, or n̄ for coherent and thermal light).
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Probability table for `--stat custom`.
    #[arg(long)]
    custom_pn: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    out: OutArgs,
    /// Statistics to sweep, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_stat, default_value = "sub,coherent,super,thermal")]
    stat: Vec<Statistic>,
    /// start:stop:points[:log|lin] of mean photon numbers (or λ with --by-lambda).
    #[arg(long, default_value = "0.1:100:30:log")]
    grid: Grid,
    /// Interpret grid values as native distribution parameters.
    #[arg(long)]
    by_lambda: bool,
    /// Columns to fill, comma separated (j, qc, qh, qe, cop, g2).
    #[arg(long, value_delimiter = ',', default_value = "j,qc,qh,qe,cop,g2")]
    outputs: Vec<Output>,
}

#[derive(Args)]
struct BathArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    out: OutArgs,
    /// start:stop:points[:log|lin] of field occupations.
    #[arg(long, conflicts_with = "nbar_e")]
    grid: Option<Grid>,
    /// Single field occupation.
    #[arg(long, allow_hyphen_values = true)]
    nbar_e: Option<f64>,
}

#[derive(Args)]
struct CoherenceArgs {
    #[command(flatten)]
    out: OutArgs,
    #[arg(long, value_delimiter = ',', value_parser = parse_stat, default_value = "sub,coherent,super,thermal")]
    stat: Vec<Statistic>,
    #[arg(long, default_value = "0.1:100:30:log")]
    grid: Grid,
    #[arg(long)]
    by_lambda: bool,
    /// Highest order k (at most 10).
    #[arg(long, default_value_t = 4)]
    k_max: u32,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Check preset: default or none.
    #[arg(long, default_value = "default")]
    grid: GridPreset,
    /// Monte-Carlo samples for the sampling check.
    #[arg(long, default_value_t = 1_000_000)]
    mc_samples: u64,
    /// Inject a known defect to confirm the suite catches it.
    #[arg(long, value_parser = parse_mutation, hide = true)]
    mutation: Option<Mutation>,
    /// Write the reports as JSON lines.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_stat(s: &str) -> Result<Statistic, String> {
    s.parse().map_err(|e: qfridge::Error| e.to_string())
}

fn parse_mutation(s: &str) -> Result<Mutation, String> {
    match s {
        "negate-gamma2" => Ok(Mutation::NegateGamma2),
        other => Err(format!("unknown mutation `{other}`")),
    }
}

impl ParamArgs {
    fn config(&self) -> Result<Config, CliError> {
        match &self.config {
            Some(p) => Config::load(p),
            None => Ok(Config::default()),
        }
    }

    fn resolve(&self) -> Result<RefrigeratorParams, CliError> {
        let cfg = self.config()?;
        let d = RefrigeratorParams::default();
        let pick =
            |flag: Option<f64>, key: &str, default: f64| flag.or(cfg.get(key)).unwrap_or(default);
        Ok(RefrigeratorParams::new(
            pick(self.omega_c, "omega-c", d.omega_c()),
            pick(self.omega_h, "omega-h", d.omega_h()),
            pick(self.gamma, "gamma", d.gamma()),
            pick(self.kappa, "kappa", d.kappa()),
            pick(self.delta, "delta", d.delta()),
            pick(self.xi0, "xi0", d.xi0()),
            pick(self.nbar_c, "nbar-c", d.nbar_c()),
            pick(self.nbar_h, "nbar-h", d.nbar_h()),
        )?)
    }
}

fn describe(p: &RefrigeratorParams) -> String {
    format!(
        "omega_c={} omega_h={} gamma={} kappa={} delta={} xi0={} nbar_c={} nbar_h={}",
        p.omega_c(),
        p.omega_h(),
        p.gamma(),
        p.kappa(),
        p.delta(),
        p.xi0(),
        p.nbar_c(),
        p.nbar_h()
    )
}

fn header(command: &str, p: Option<&RefrigeratorParams>, extra: &str) -> String {
    let mut s = format!("qfridge {} command={command}", env!("CARGO_PKG_VERSION"));
    if let Some(p) = p {
        s.push(' ');
        s.push_str(&describe(p));
    }
    if !extra.is_empty() {
        s.push(' ');
        s.push_str(extra);
    }
    s
}

fn stat_list(stats: &[Statistic]) -> String {
    stats.iter().map(|s| s.name()).collect::<Vec<_>>().join(",")
}

/// Opens the destination, or standard output when none is given.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let f = File::create(p)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn read_custom(path: &Path) -> Result<PhotonDistribution, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let probs = text
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{}: `{t}` is not a number", path.display())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PhotonDistribution::custom(probs)?)
}

fn status_name(j: f64) -> &'static str {
    match BathStatus::of(j) {
        BathStatus::Cooling => "cooling",
        BathStatus::Heating => "heating",
        BathStatus::Inactive => "inactive",
    }
}

fn cmd_point(a: &PointArgs) -> Result<(), CliError> {
    let p = a.params.resolve()?;
    let dist = match (a.stat, &a.custom_pn) {
        (Statistic::Custom, Some(path)) => {
            if a.mean.is_some() || a.lambda.is_some() {
                return Err(CliError::Usage(
                    "--mean/--lambda do not apply to custom tables".into(),
                ));
            }
            read_custom(path)?
        }
        (Statistic::Custom, None) => {
            return Err(CliError::Usage(
                "--stat custom needs --custom-pn FILE".into(),
            ))
        }
        (_, Some(_)) => return Err(CliError::Usage("--custom-pn requires --stat custom".into())),
        (stat, None) => match (a.mean, a.lambda) {
            (Some(m), None) => PhotonDistribution::with_mean(stat, m)?,
            (None, Some(l)) => PhotonDistribution::from_parameter(stat, l)?,
            _ => return Err(CliError::Usage("give --mean or --lambda".into())),
        },
    };
    let r = flux(&p, &dist)?;
    let h = r.heat_currents(&p);
    let mean = dist.mean_and_variance()?.0;
    let cop = match cop_from_average_flux(&p, r.j_bar) {
        CoolingStatus::Cooling { cop } => num(cop),
        CoolingStatus::Inactive => "none".into(),
    };
    let (cc_route, cc) = match r.cross_check {
        Some(c) => (c.route.name().to_string(), num(c.discrepancy)),
        None => ("none".into(), String::new()),
    };
    let fields: Vec<(&'static str, String)> = vec![
        ("statistic", dist.statistic().name().to_string()),
        ("mean_photons", num(mean)),
        ("j_bar", num(r.j_bar)),
        ("q_c", num(h.q_c)),
        ("q_h", num(h.q_h)),
        ("q_e", num(h.q_e)),
        ("cop", cop),
        ("status", status_name(r.j_bar).into()),
        ("route", r.route.name().into()),
        ("crosscheck_route", cc_route),
        ("crosscheck", cc),
        ("flagged", r.flagged().to_string()),
    ];
    let mut w = sink(a.out.as_deref())?;
    let io = |e: io::Error| CliError::Io(e.to_string());
    let comment = header(
        "point",
        Some(&p),
        &format!("stat={}", dist.statistic().name()),
    );
    match a.format {
        Format::Text => {
            writeln!(w, "# {comment}").map_err(io)?;
            for (k, v) in &fields {
                writeln!(w, "{k}={v}").map_err(io)?;
            }
            w.flush().map_err(io)?;
        }
        Format::Csv => Table {
            header_comment: comment,
            columns: fields.iter().map(|(k, _)| *k).collect(),
            rows: vec![fields.iter().map(|(_, v)| v.clone()).collect()],
        }
        .write(w, Format::Csv)?,
    }
    Ok(())
}

fn cmd_sweep(a: &SweepArgs) -> Result<(), CliError> {
    let spec = SweepSpec {
        statistics: a.stat.clone(),
        parameterization: if a.by_lambda {
            Parameterization::ByLambda
        } else {
            Parameterization::ByMean
        },
        grid: a.grid,
        params: a.params.resolve()?,
        outputs: a.outputs.clone(),
    };
    let rows = run_sweep(&spec, Execution::Parallel)?;
    let flagged = rows.iter().filter(|r| r.flagged).count();
    if flagged > 0 {
        log::warn!("{flagged} rows disagree with their cross-check route");
    }
    let table = Table {
        header_comment: header(
            "sweep",
            Some(&spec.params),
            &format!(
                "stat={} grid={} parameterization={}",
                stat_list(&spec.statistics),
                spec.grid,
                if a.by_lambda { "lambda" } else { "mean" }
            ),
        ),
        columns: vec![
            "statistic",
            "lambda_or_nbar",
            "mean_photons",
            "intensity_x",
            "j_bar",
            "q_c",
            "q_h",
            "q_e",
            "cop",
            "g2",
            "route",
            "crosscheck",
        ],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.statistic.name().to_string(),
                    num(r.lambda_or_nbar),
                    num(r.mean_photons),
                    num(r.intensity_x),
                    opt(r.j_bar),
                    opt(r.q_c),
                    opt(r.q_h),
                    opt(r.q_e),
                    opt(r.cop),
                    opt(r.g2),
                    r.route.name().to_string(),
                    opt(r.crosscheck),
                ]
            })
            .collect(),
    };
    table.write(sink(a.out.out.as_deref())?, a.out.format)
}

fn cmd_thermal_bath(a: &BathArgs) -> Result<(), CliError> {
    let p = a.params.resolve()?;
    let grid = match (a.grid, a.nbar_e, a.params.config()?.get("nbar-e")) {
        (Some(g), _, _) => g,
        (None, Some(n), _) | (None, None, Some(n)) => Grid::single(n)?,
        (None, None, None) => return Err(CliError::Usage("give --grid or --nbar-e".into())),
    };
    let rows = thermal_bath_scan(&p, &grid, Execution::Parallel)?;
    let table = Table {
        header_comment: header("thermal-bath", Some(&p), &format!("grid={grid}")),
        columns: vec![
            "nbar_e",
            "j_prime",
            "q_c",
            "q_h",
            "q_e",
            "status",
            "threshold",
        ],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    num(r.nbar_e),
                    num(r.j_prime),
                    num(r.q_c),
                    num(r.q_h),
                    num(r.q_e),
                    r.status.name().to_string(),
                    opt(r.threshold),
                ]
            })
            .collect(),
    };
    table.write(sink(a.out.out.as_deref())?, a.out.format)
}

fn cmd_coherence(a: &CoherenceArgs) -> Result<(), CliError> {
    let param = if a.by_lambda {
        Parameterization::ByLambda
    } else {
        Parameterization::ByMean
    };
    let rows = coherence_profile(&a.stat, &a.grid, param, a.k_max, Execution::Parallel)?;
    let table = Table {
        header_comment: header(
            "coherence",
            None,
            &format!(
                "stat={} grid={} k_max={}",
                stat_list(&a.stat),
                a.grid,
                a.k_max
            ),
        ),
        columns: vec!["statistic", "lambda_or_nbar", "mean_photons", "k", "gk"],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.statistic.name().to_string(),
                    num(r.lambda_or_nbar),
                    num(r.mean_photons),
                    r.k.to_string(),
                    num(r.gk),
                ]
            })
            .collect(),
    };
    table.write(sink(a.out.out.as_deref())?, a.out.format)
}

fn cmd_check(a: &CheckArgs) -> Result<(), CliError> {
    let cfg = SuiteConfig {
        preset: a.grid,
        seed: a.seed,
        mutation: a.mutation,
        execution: Execution::Parallel,
        mc_samples: a.mc_samples,
    };
    let reports = run_equivalence_suite(&cfg);
    let io = |e: io::Error| CliError::Io(e.to_string());
    let mut out = io::stdout().lock();
    for r in &reports {
        writeln!(
            out,
            "{} {} abs={:e} rel={:e} tol={:e}{}",
            if r.passed { "PASS" } else { "FAIL" },
            r.check,
            r.abs_discrepancy,
            r.rel_discrepancy,
            r.tolerance,
            r.note
                .as_deref()
                .map(|n| format!(" ({n})"))
                .unwrap_or_default()
        )
        .map_err(io)?;
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    writeln!(
        out,
        "{} checks, {failed} failed, seed {}",
        reports.len(),
        a.seed
    )
    .map_err(io)?;
    if let Some(path) = &a.out {
        let mut w = sink(Some(path))?;
        write_json_lines(&mut w, &reports).map_err(io)?;
        w.flush().map_err(io)?;
    }
    if all_passed(&reports) {
        Ok(())
    } else {
        Err(CliError::CheckFailed(failed))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Point(a) => cmd_point(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::ThermalBath(a) => cmd_thermal_bath(a),
        Command::Coherence(a) => cmd_coherence(a),
        Command::Check(a) => cmd_check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::CheckFailed(n) => eprintln!("qfridge: {n} checks failed"),
                CliError::Usage(m) => eprintln!("qfridge: usage: {m}"),
                CliError::Domain(m) => eprintln!("qfridge: {m}"),
                CliError::Io(m) => eprintln!("qfridge: I/O: {m}"),
            }
            ExitCode::from(e.code())
        }
    }
}

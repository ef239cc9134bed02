use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zenocorr::sweep::{self, export, SweepConfig, SweepTable};
use zenocorr::{validation, Error};

/// Zeno and anti-Zeno control of two-qubit correlations in a leaky cavity.
#[derive(Debug, Parser)]
#[command(name = "zenocorr", version)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one (tau, lambda T) point, measured and free.
    Simulate(SimulateArgs),
    /// Sweep the (tau, lambda T) grids.
    Sweep(SweepArgs),
    /// Run a preset: fig1a, fig1b, fig2, fig3 or fig4.
    Scenario(ScenarioArgs),
    /// Run the oracle cross-checks.
    Validate,
}

/// Physical parameters; each flag overrides the matching config key.
#[derive(Debug, Args, Default)]
struct PointArgs {
    /// Vacuum Rabi frequency over the reservoir width.
    #[arg(long = "R", allow_hyphen_values = true)]
    ratio: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    r1: Option<String>,
    /// Detuning of qubit 1 in units of lambda.
    #[arg(long, allow_hyphen_values = true)]
    delta1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    delta2: Option<String>,
    /// Population asymmetry of the initial state.
    #[arg(long, allow_hyphen_values = true)]
    s: Option<String>,
    /// Relative phase of the initial state.
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    /// exact, power, series, badcavity or free.
    #[arg(long)]
    method: Option<String>,
}

#[derive(Debug, Args, Default)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<String>,
    /// csv or json; inferred from the output extension, default csv.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Elapsed time in units of 1/lambda.
    #[arg(long, allow_hyphen_values = true)]
    tau: String,
    /// Measurement interval in units of 1/lambda.
    #[arg(long = "T", allow_hyphen_values = true)]
    interval: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    #[command(flatten)]
    point: PointArgs,
    /// start:stop:count
    #[arg(long = "tau_grid")]
    tau_grid: Option<String>,
    /// start:stop:count, in units of 1/lambda
    #[arg(long = "T_grid")]
    t_grid: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    name: String,
    #[command(flatten)]
    output: OutputArgs,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::InvalidParameter(_)
        | Error::UnknownMethod(_)
        | Error::UnknownScenario(_)
        | Error::WrongRegime(_) => 1,
        Error::Io { .. } | Error::Json { .. } => 3,
        _ => 2,
    }
}

fn apply(cfg: &mut SweepConfig, pairs: &[(&str, &Option<String>)]) -> Result<(), Error> {
    for (key, value) in pairs {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    Ok(())
}

fn apply_point(cfg: &mut SweepConfig, p: &PointArgs) -> Result<(), Error> {
    apply(
        cfg,
        &[
            ("R", &p.ratio),
            ("r1", &p.r1),
            ("delta1", &p.delta1),
            ("delta2", &p.delta2),
            ("s", &p.s),
            ("phi", &p.phi),
            ("method", &p.method),
        ],
    )
}

fn apply_output(cfg: &mut SweepConfig, o: &OutputArgs) -> Result<(), Error> {
    apply(cfg, &[("out", &o.out), ("format", &o.format)])
}

fn emit(table: &SweepTable, cfg: &SweepConfig) -> Result<(), Error> {
    let format = cfg.output_format();
    match &cfg.out {
        Some(path) => {
            export::write_table(table, path, format)?;
            log::info!("wrote {} rows to {}", table.rows.len(), path.display());
            Ok(())
        }
        None => {
            let text = match format {
                export::Format::Csv => export::to_csv_string(table),
                export::Format::Json => export::to_json_string(table) + "\n",
            };
            io::stdout()
                .lock()
                .write_all(text.as_bytes())
                .map_err(|source| Error::Io { path: PathBuf::from("<stdout>"), source })
        }
    }
}

fn simulate(args: &SimulateArgs) -> Result<(), Error> {
    let mut cfg = SweepConfig::default();
    apply_point(&mut cfg, &args.point)?;
    apply_output(&mut cfg, &args.output)?;
    cfg.set("tau_grid", &format!("{0}:{0}:1", args.tau))?;
    match &args.interval {
        Some(t) => cfg.set("T_grid", &format!("{t}:{t}:1"))?,
        None if matches!(cfg.method, Some(sweep::Surfaces::FreeOnly)) => {}
        None => return Err(Error::Config("--T is required unless --method free".into())),
    }
    emit(&sweep::run(&cfg.resolve()?)?, &cfg)
}

fn run_sweep(args: &SweepArgs) -> Result<(), Error> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.clone(), source })?;
            SweepConfig::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        None => SweepConfig::default(),
    };
    apply(&mut cfg, &[("scenario", &args.scenario), ("tau_grid", &args.tau_grid), ("T_grid", &args.t_grid)])?;
    apply_point(&mut cfg, &args.point)?;
    apply_output(&mut cfg, &args.output)?;
    emit(&sweep::run(&cfg.resolve()?)?, &cfg)
}

fn run_scenario(args: &ScenarioArgs) -> Result<(), Error> {
    let mut cfg = SweepConfig { scenario: Some(args.name.clone()), ..Default::default() };
    apply_output(&mut cfg, &args.output)?;
    emit(&sweep::run(&cfg.resolve()?)?, &cfg)
}

fn validate() -> Result<bool, Error> {
    let checks = validation::run_checks()?;
    for c in &checks {
        println!("{} {}: {:.3e} (tol {:.1e})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.tol);
    }
    Ok(checks.iter().all(|c| c.pass))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Scenario(a) => run_scenario(a),
        Command::Validate => match validate() {
            Ok(true) => Ok(()),
            Ok(false) => {
                eprintln!("error: validation failed");
                return ExitCode::from(2);
            }
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

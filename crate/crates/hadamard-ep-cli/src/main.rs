//! Command-line front end: validate spaces and bifunctions, run solvers,
//! and emit traces and machine-readable reports.
//!
//! Exit codes: 0 success/converged, 1 usage or configuration error,
//! 2 property violation found by a check, 3 subproblem failure,
//! 4 iteration limit reached.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use hadamard_ep_cli::config::{AlgorithmKind, ExperimentConfig};
use hadamard_ep::bifunctions::{check_property, BifunctionProperty, CheckConfig};
use hadamard_ep::resolvent::{resolvent_path, ResolventRequest};
use hadamard_ep::solvers::{path_trace, run_halpern, run_ppa, IterateTrace, TerminalStatus};
use hadamard_ep::spaces::{run_space_sweep, SpaceSweepConfig};

#[derive(Parser)]
#[command(name = "hadamard-ep", version, about = "Equilibrium problems on Hadamard spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for reports and traces (defaults to the config's
    /// `out` field, then to the current directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the geometric identities of the configured space.
    CheckSpace(CommonArgs),
    /// Run sampled property checks on the configured bifunction.
    CheckBifunction(CommonArgs),
    /// Run the configured algorithm and write trace.csv + sidecar.json.
    Solve(CommonArgs),
    /// Print the version.
    Version,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Version => {
            println!("hadamard-ep {}", env!("CARGO_PKG_VERSION"));
            Ok(0)
        }
        Command::CheckSpace(args) => cmd_check_space(&args),
        Command::CheckBifunction(args) => cmd_check_bifunction(&args),
        Command::Solve(args) => cmd_solve(&args),
    };
    match code {
        Ok(c) => ExitCode::from(c),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

struct Prepared {
    config: ExperimentConfig,
    out_dir: PathBuf,
}

fn prepare(args: &CommonArgs) -> Result<Prepared> {
    let mut config = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        if let Some(check) = &mut config.check {
            check.seed = seed;
        }
        if let Some(solve) = &mut config.solve {
            solve.rng_seed = seed;
        }
    }
    let out_dir = args
        .out
        .clone()
        .or_else(|| config.out.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    config.out = Some(out_dir.clone());
    Ok(Prepared { config, out_dir })
}

fn write_json<T: Serialize>(path: &std::path::Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn cmd_check_space(args: &CommonArgs) -> Result<u8> {
    let Prepared { config, out_dir } = prepare(args)?;
    let check = config.check.clone().unwrap_or_default();
    let sweep = SpaceSweepConfig {
        samples: check.samples,
        seed: check.seed,
        radius: check.radius,
        tolerance: check.tolerance.unwrap_or(1e-9),
        distortion: check.distortion,
        ..SpaceSweepConfig::default()
    };
    let report = run_space_sweep(&config.space_handle(), &sweep)?;
    let json = serde_json::to_string_pretty(&report)?;
    println!("{json}");
    write_json(&out_dir.join("report.json"), &report)?;
    Ok(if report.passed { 0 } else { 2 })
}

fn cmd_check_bifunction(args: &CommonArgs) -> Result<u8> {
    let Prepared { config, out_dir } = prepare(args)?;
    let space = config.space_handle();
    let spec = config
        .bifunction
        .as_ref()
        .context("check-bifunction needs a `bifunction` section")?;
    let f = spec.build(space)?;
    let check = config.check.clone().unwrap_or_default();
    let tolerance = check.tolerance.unwrap_or(1e-8);
    let properties = if check.properties.is_empty() {
        vec![BifunctionProperty::VanishingDiagonal, BifunctionProperty::Monotone]
    } else {
        check.properties.clone()
    };
    let cfg = CheckConfig {
        samples: check.samples,
        seed: check.seed,
        radius: check.radius,
        tolerance,
        ..CheckConfig::default()
    };
    let mut reports = Vec::new();
    let mut all_ok = true;
    for property in properties {
        let report = check_property(&f, &space, &config.set, property, &cfg)?;
        all_ok &= report.worst_violation <= tolerance;
        reports.push(report);
    }
    let json = serde_json::to_string_pretty(&reports)?;
    println!("{json}");
    write_json(&out_dir.join("report.json"), &reports)?;
    Ok(if all_ok { 0 } else { 2 })
}

#[derive(Serialize)]
struct Sidecar<'a> {
    config: &'a ExperimentConfig,
    seed: u64,
    status: TerminalStatus,
    final_point: &'a hadamard_ep::Point,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: &'a Option<String>,
}

fn cmd_solve(args: &CommonArgs) -> Result<u8> {
    let Prepared { config, out_dir } = prepare(args)?;
    let space = config.space_handle();
    let algorithm =
        config.algorithm.clone().context("solve needs an `algorithm` section")?;
    let spec =
        config.bifunction.as_ref().context("solve needs a `bifunction` section")?;
    let f = spec.build(space)?;
    let solve = config.solve.as_ref().context("solve needs a `solve` section")?;
    let reference = config.reference.as_ref();

    let trace: IterateTrace = match algorithm {
        AlgorithmKind::Ppa => run_ppa(&f, &space, &config.set, solve, reference)?,
        AlgorithmKind::Halpern => run_halpern(&f, &space, &config.set, solve, reference)?,
        AlgorithmKind::ResolventPath => {
            let lambdas = config
                .lambdas
                .as_ref()
                .context("resolvent_path needs a `lambdas` sequence")?;
            let mut template = ResolventRequest::new(
                &f,
                &space,
                &config.set,
                solve.x0.clone(),
                lambdas[0],
                solve.resolvent.strategy,
            );
            template.tol = solve.resolvent.tol;
            template.max_inner = solve.resolvent.max_inner;
            template.residual_samples = solve.resolvent.residual_samples;
            template.seed = solve.rng_seed;
            match resolvent_path(&f, &space, &config.set, &solve.x0, lambdas, &template) {
                Ok(results) => path_trace(&space, &solve.x0, lambdas, &results, reference)?,
                Err(e) => {
                    // Report the failure through the sidecar like the outer
                    // solvers do.
                    let trace = IterateTrace {
                        initial: solve.x0.clone(),
                        records: Vec::new(),
                        status: TerminalStatus::SubproblemFailed,
                        final_point: solve.x0.clone(),
                        failure: Some(e.to_string()),
                    };
                    emit(&out_dir, &config, solve.rng_seed, &trace)?;
                    return Ok(3);
                }
            }
        }
    };

    emit(&out_dir, &config, solve.rng_seed, &trace)?;
    match trace.status {
        TerminalStatus::Converged => Ok(0),
        TerminalStatus::SubproblemFailed => Ok(3),
        TerminalStatus::MaxIter => Ok(4),
    }
}

fn emit(
    out_dir: &std::path::Path,
    config: &ExperimentConfig,
    seed: u64,
    trace: &IterateTrace,
) -> Result<()> {
    let csv_path = out_dir.join("trace.csv");
    std::fs::write(&csv_path, trace.to_csv())
        .with_context(|| format!("writing {}", csv_path.display()))?;
    let sidecar = Sidecar {
        config,
        seed,
        status: trace.status,
        final_point: &trace.final_point,
        failure: &trace.failure,
    };
    write_json(&out_dir.join("sidecar.json"), &sidecar)?;
    let status = serde_json::to_string(&trace.status)?;
    println!(
        "{{\"status\":{status},\"iterations\":{},\"trace\":{:?}}}",
        trace.records.len(),
        csv_path
    );
    Ok(())
}

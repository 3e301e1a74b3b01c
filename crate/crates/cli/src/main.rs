//! `mhdrelax`: run experiments, verification sweeps, one-shot Stokes
//! solves and verdict re-evaluation.
//!
//! Exit codes: 0 pass, 1 error, 2 failed verdict or hard invariant.

mod config;

use std::ops::Range;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use mhdrelax::experiments::verify::{hard_checks_from_dir, run_suite, Suite, VerifyOptions};
use mhdrelax::experiments::{evaluate_verdict, run_experiment};
use mhdrelax::fields::{init_field, write_atomic, InitKind, Snapshot};
use mhdrelax::report::{parse_verdict, Criterion, Metrics};
use mhdrelax::stokes::{solve_stokes_freespace, velocity_from_b, BoxTensor};
use mhdrelax::TorusGrid;

use config::RunConfig;

const THREADS_ENV: &str = "MHDRELAX_THREADS";

#[derive(Parser)]
#[command(name = "mhdrelax", version, about = "Stokes-MHD magnetic relaxation experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the experiment named by `experiment.name` (default `ledger`).
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override a config key; repeatable, last wins.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Corpus sweeps writing one CSV per inequality.
    Verify {
        /// lorentz, stokes, dynamics or all.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Inclusive seed range `A..B`.
        #[arg(long, default_value = "0..999")]
        seeds: String,
        /// Supplies `grid.n`, `params.nu` and `params.eta`.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Solve for the velocity driven by `B⊗B` from a snapshot: periodic
    /// for torus snapshots, free-space when the snapshot has a box size.
    Stokes {
        input: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Re-evaluate verdicts from the CSVs in an output directory.
    Report { dir: PathBuf },
}

/// Outcome of a command that ran to completion.
enum Verdict {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match configure_threads().and_then(|_| dispatch(cli.cmd)) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| anyhow!("{THREADS_ENV} must be a positive integer, got `{v}`"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn dispatch(cmd: Cmd) -> Result<Verdict> {
    match cmd {
        Cmd::Run { config, set, output_dir } => cmd_run(config.as_deref(), &set, output_dir.as_deref()),
        Cmd::Verify {
            suite,
            seeds,
            config,
            set,
            output_dir,
        } => cmd_verify(&suite, &seeds, config.as_deref(), &set, output_dir.as_deref()),
        Cmd::Stokes {
            input,
            config,
            set,
            output_dir,
        } => cmd_stokes(&input, config.as_deref(), &set, output_dir.as_deref()),
        Cmd::Report { dir } => cmd_report(&dir),
    }
}

fn print_criteria(criteria: &[Criterion]) -> Verdict {
    for c in criteria {
        println!("{}", c.line());
    }
    if criteria.iter().all(|c| c.pass) {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// `meta.toml` next to the outputs; holds the only timestamp of a run.
fn write_sidecar(dir: &Path, command: &str) -> Result<()> {
    let text = format!(
        "timestamp = \"{}\"\ncommand = \"{command}\"\nversion = \"{}\"\n",
        chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        env!("CARGO_PKG_VERSION"),
    );
    write_atomic(&dir.join("meta.toml"), text.as_bytes())?;
    Ok(())
}

fn cmd_run(config: Option<&Path>, set: &[String], output_dir: Option<&Path>) -> Result<Verdict> {
    let rc = RunConfig::load(config, set)?;
    let dir = rc.output_dir(output_dir);
    let cfg = rc.experiment_config(dir.clone())?;
    let name = rc.experiment_name();
    let report = run_experiment(name, &cfg)?;
    write_sidecar(&dir, &format!("run {name}"))?;
    println!("experiment {name}: outputs in {}", dir.display());
    Ok(print_criteria(&report.verdict))
}

/// `A..B` with both ends included.
fn parse_seeds(text: &str) -> Result<Range<u64>> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| anyhow!("--seeds expects A..B, got `{text}`"))?;
    let a: u64 = a.trim().parse().with_context(|| format!("--seeds start `{a}`"))?;
    let b: u64 = b.trim().trim_start_matches('=').parse().with_context(|| format!("--seeds end `{b}`"))?;
    if b < a {
        bail!("--seeds range {a}..{b} is empty");
    }
    Ok(a..b + 1)
}

fn cmd_verify(suite: &str, seeds: &str, config: Option<&Path>, set: &[String], output_dir: Option<&Path>) -> Result<Verdict> {
    let suite = Suite::parse(suite)?;
    let rc = RunConfig::load(config, set)?;
    let defaults = VerifyOptions::default();
    let opts = VerifyOptions {
        n: rc.grid_n_or(defaults.n)?,
        seeds: parse_seeds(seeds)?,
        nu: rc.f64_or("params.nu", defaults.nu)?,
        eta: rc.f64_or("params.eta", defaults.eta)?,
    };
    let dir = rc.output_dir(output_dir);
    let out = run_suite(suite, &opts)?;
    out.write(&dir)?;
    write_sidecar(&dir, "verify")?;
    for t in &out.tables {
        println!("{}: {} rows, max ratio {}", t.name, t.rows.len(), t.max_ratio());
    }
    if let Some(g) = &out.greens {
        println!("greens_bound: {} rows, {} violations", g.rows.len(), g.violations());
    }
    Ok(print_criteria(&out.hard))
}

fn cmd_stokes(input: &Path, config: Option<&Path>, set: &[String], output_dir: Option<&Path>) -> Result<Verdict> {
    let rc = RunConfig::load(config, set)?;
    let nu = rc.f64_or("params.nu", 1.0)?;
    let dir = rc.output_dir(output_dir);
    let snap = Snapshot::read(input)?;
    if snap.components.len() != 2 {
        bail!("stokes needs a two-component snapshot, found {}", snap.components.len());
    }
    let out = match snap.box_size {
        Some(side) => {
            let f = BoxTensor::outer(snap.n, side, &snap.components[0], &snap.components[1]);
            let u = solve_stokes_freespace(&f, nu)?;
            println!("free-space solve: box {side}, weak L2 of |u| {}", u.weak_l2());
            Snapshot {
                n: snap.n,
                t: snap.t,
                components: vec![u.ux, u.uy],
                box_size: Some(side),
            }
        }
        None => {
            let grid = TorusGrid::<f64>::new(snap.n)?;
            let b = init_field(&grid, &InitKind::FromFile(input.to_path_buf()))?;
            let sol = velocity_from_b(&b, nu)?;
            println!("periodic solve: L2 of u {}", sol.u.l2_norm());
            Snapshot::from_vector(snap.t, &sol.u)
        }
    };
    let path = dir.join("velocity.smhd");
    out.write(&path)?;
    write_sidecar(&dir, "stokes")?;
    println!("wrote {}", path.display());
    Ok(Verdict::Pass)
}

fn cmd_report(dir: &Path) -> Result<Verdict> {
    let config_path = dir.join("config.toml");
    let criteria = if config_path.exists() {
        let rc = RunConfig::parse(&std::fs::read_to_string(&config_path)?)?;
        let name = rc
            .get("experiment.name")
            .ok_or_else(|| anyhow!("{} has no experiment.name", config_path.display()))?;
        let metrics = Metrics::from_csv(&std::fs::read_to_string(dir.join("report.csv")).context("reading report.csv")?)?;
        evaluate_verdict(name, &metrics)?
    } else {
        let c = hard_checks_from_dir(dir)?;
        if c.is_empty() {
            bail!("{} contains neither an experiment report nor verification tables", dir.display());
        }
        c
    };
    if let Ok(stored) = std::fs::read_to_string(dir.join("verdict.txt")) {
        let recomputed: Vec<(String, bool)> = criteria.iter().map(|c| (c.name.clone(), c.pass)).collect();
        if parse_verdict(&stored) != recomputed {
            eprintln!("warning: verdict.txt disagrees with the verdict recomputed from the CSVs");
        }
    }
    Ok(print_criteria(&criteria))
}

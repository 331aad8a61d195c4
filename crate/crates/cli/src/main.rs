//! `hlp`: batch front-end for the helmholtz-lp solvers and experiments.
//!
//! Each run resolves a [`config::RunConfig`], writes `config.json`, the
//! command's CSV/JSON/FLD artifacts and `summary.json` into the output
//! directory, and finally `manifest.json` with SHA-256 hashes of all of
//! them. Errors go to stderr as JSON with a nonzero exit code.

mod artifacts;
mod commands;
mod config;
mod error;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use helmholtz_lp::GridPreset;
use serde::Serialize;
use serde_json::{json, Value};

use artifacts::{sha256_hex, to_json, Artifacts, CONFIG};
use commands::Input;
use config::{Command, DataKind, RunConfig};
use error::CliError;

#[derive(Parser)]
#[command(name = "hlp", version, about = "Helmholtz solver and Bochner-Riesz experiment runner")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args)]
struct GlobalArgs {
    /// small = (2, 256, 32π), paper2d = (2, 1024, 64π), paper3d = (3, 128, 32π)
    #[arg(long, global = true, value_parser = parse_preset)]
    grid_preset: Option<GridPreset>,
    /// Dimension n, overriding the preset.
    #[arg(long = "dim", global = true)]
    n: Option<usize>,
    /// Points per axis N, overriding the preset.
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Box side L, overriding the preset.
    #[arg(long, global = true)]
    length: Option<f64>,
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print the resolved config and exit without running.
    #[arg(long, global = true)]
    dry_run: bool,
}

fn parse_preset(s: &str) -> Result<GridPreset, String> {
    s.parse().map_err(|e: helmholtz_lp::Error| e.to_string())
}

#[derive(Subcommand)]
enum Sub {
    /// Free Helmholtz solve of annihilated data.
    Solve(SolveArgs),
    /// Neumann-series solve with a short-range potential.
    PerturbedSolve(PerturbedArgs),
    /// Knapp-example slope scans.
    KnappScan(KnappArgs),
    /// ε-scan of the annulus integral against its compensator.
    EpsScan(EpsArgs),
    /// One-sided remainders of the ε-scan.
    RemainderScan(RemainderArgs),
    /// Lᵖ → L^q ratio scan for the negative-order multiplier.
    LqScan(LqArgs),
    /// Radial envelope of a Bochner-Riesz kernel.
    KernelProfile(KernelArgs),
    /// Fredholm-defect membership report.
    Defect(DefectArgs),
    /// Reduced-size invariant suite.
    Selftest,
    /// Run a JSON config file.
    Run {
        config: PathBuf,
    },
}

#[derive(Args, Serialize)]
struct SolveArgs {
    #[arg(long, value_enum)]
    data: Option<DataKind>,
    /// FLD1 input; its grid replaces the configured grid.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    ladder: Option<Vec<f64>>,
}

#[derive(Args, Serialize)]
struct PerturbedArgs {
    #[arg(long, value_enum)]
    data: Option<DataKind>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    potential_strength: Option<f64>,
    #[arg(long)]
    potential_scale: Option<f64>,
    #[arg(long)]
    data_is_preimage: Option<bool>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    ladder: Option<Vec<f64>>,
}

#[derive(Args, Serialize)]
struct KnappArgs {
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    annihilated: Option<bool>,
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
}

#[derive(Args, Serialize)]
struct EpsArgs {
    #[arg(long, value_enum)]
    data: Option<DataKind>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    ladder: Option<Vec<f64>>,
    #[arg(long, value_parser = ["full", "inner", "outer"])]
    annulus: Option<String>,
    #[arg(long)]
    resolution: Option<usize>,
}

#[derive(Args, Serialize)]
struct RemainderArgs {
    #[arg(long, value_enum)]
    data: Option<DataKind>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    ladder: Option<Vec<f64>>,
}

#[derive(Args, Serialize)]
struct LqArgs {
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
}

#[derive(Args, Serialize)]
struct KernelArgs {
    #[arg(long, allow_negative_numbers = true)]
    order_re: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    order_im: Option<f64>,
    #[arg(long, value_parser = ["Classical", "TwoSided", "OneSidedInside", "OneSidedOutside"])]
    side: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    gamma_normalized: Option<bool>,
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
}

#[derive(Args, Serialize)]
struct DefectArgs {
    #[arg(long, value_enum)]
    data: Option<DataKind>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
}

/// Overlays the flags that were given onto the command's defaults.
fn overlay<D: Serialize, A: Serialize>(name: &str, defaults: D, args: &A) -> Result<Command, CliError> {
    let mut merged = serde_json::to_value(defaults).expect("defaults serialize");
    let given = serde_json::to_value(args).expect("flags serialize");
    let (Value::Object(target), Value::Object(flags)) = (&mut merged, given) else {
        unreachable!("parameter structs serialize to objects");
    };
    for (k, v) in flags {
        if !v.is_null() {
            target.insert(k, v);
        }
    }
    target.insert("name".into(), json!(name));
    serde_json::from_value(merged).map_err(|e| CliError::Config(e.to_string()))
}

fn command_from(sub: Sub) -> Result<Option<Command>, CliError> {
    let cmd = match sub {
        Sub::Solve(a) => overlay("solve", config::SolveParams::default(), &a)?,
        Sub::PerturbedSolve(a) => overlay("perturbed-solve", config::PerturbedParams::default(), &a)?,
        Sub::KnappScan(a) => overlay("knapp-scan", config::KnappScanParams::default(), &a)?,
        Sub::EpsScan(a) => overlay("eps-scan", config::EpsScanParams::default(), &a)?,
        Sub::RemainderScan(a) => overlay("remainder-scan", config::RemainderParams::default(), &a)?,
        Sub::LqScan(a) => overlay("lq-scan", config::LqParams::default(), &a)?,
        Sub::KernelProfile(a) => overlay("kernel-profile", config::KernelParams::default(), &a)?,
        Sub::Defect(a) => overlay("defect", config::DefectParams::default(), &a)?,
        Sub::Selftest => Command::Selftest(config::SelftestParams::default()),
        Sub::Run { .. } => return Ok(None),
    };
    Ok(Some(cmd))
}

fn load_config(path: &PathBuf) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn build_config(cli: Cli) -> Result<(RunConfig, bool), CliError> {
    let g = cli.global;
    let mut cfg = match cli.command {
        Sub::Run { config } => load_config(&config)?,
        sub => RunConfig {
            command: command_from(sub)?.expect("not a run"),
            grid: Default::default(),
            output_dir: config::default_output_dir(),
            seed: 0,
        },
    };
    // Explicit flags win over the config file.
    if let Some(p) = g.grid_preset {
        cfg.grid = config::GridSpec {
            preset: Some(p),
            ..Default::default()
        };
    }
    if g.n.is_some() {
        cfg.grid.n = g.n;
    }
    if g.points.is_some() {
        cfg.grid.points = g.points;
    }
    if g.length.is_some() {
        cfg.grid.length = g.length;
    }
    if let Some(dir) = g.output_dir {
        cfg.output_dir = dir;
    }
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    Ok((cfg, g.dry_run))
}

fn dispatch(cfg: &RunConfig, input: Input, out: &mut Artifacts) -> Result<Value, CliError> {
    let grid = input.grid;
    match &cfg.command {
        Command::Solve(p) => commands::solve(p, input, out),
        Command::PerturbedSolve(p) => commands::perturbed_solve(p, input, out),
        Command::KnappScan(p) => commands::knapp(p, grid, out),
        Command::EpsScan(p) => commands::eps(p, input, out),
        Command::RemainderScan(p) => commands::remainder(p, input, out),
        Command::LqScan(p) => commands::lq(p, grid, out),
        Command::KernelProfile(p) => commands::kernel(p, grid, out),
        Command::Defect(p) => commands::defect(p, input, out),
        Command::Selftest(_) => selftest::run(cfg.seed, out),
    }
}

fn execute(mut cfg: RunConfig, dry_run: bool) -> Result<(), CliError> {
    let (grid, field) = cfg.resolve()?;
    let config_bytes = to_json(&cfg);
    if dry_run {
        print!("{}", String::from_utf8_lossy(&config_bytes));
        return Ok(());
    }
    let config_sha = sha256_hex(&config_bytes);
    let mut out = Artifacts::create(&cfg.output_dir)?;
    out.write_bytes(CONFIG, &config_bytes)?;
    let input = Input {
        grid,
        field,
        seed: cfg.seed,
    };
    let result = dispatch(&cfg, input, &mut out);
    if let Ok(results) = &result {
        let summary = json!({
            "command": cfg.command.name(),
            "config_sha256": config_sha,
            "config": cfg,
            "results": results,
        });
        out.write_json("summary.json", &summary)?;
        println!("{}", serde_json::to_string(results).expect("results serialize"));
    }
    // The manifest is written on failure too, covering the partial outputs.
    out.finish(cfg.command.name(), &config_sha)?;
    result.map(|_| ())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = build_config(cli).and_then(|(cfg, dry_run)| execute(cfg, dry_run));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let report = e.report();
            eprintln!("{}", serde_json::to_string(&report).expect("error report serializes"));
            ExitCode::from(report.exit_code as u8)
        }
    }
}

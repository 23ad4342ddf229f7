//! `gslab`: run a JSON experiment spec and leave behind results.csv,
//! manifest.json, and plot.svg. Exit code 0 means every grid cell finished
//! ok or was skipped with a recorded reason.

use clap::{Args, Parser, Subcommand, ValueEnum};
use gslab_cli::{plot, run, spec::Kind, write_outputs, ExperimentSpec, Overrides};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "gslab", version, about = "group-sparse recovery experiment runner")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form bound reports across a parameter grid
    Bounds(RunArgs),
    /// Monte Carlo risk-vs-m curves with bound overlays
    Risk(RunArgs),
    /// Network constructions: direct-map equality, sawtooth accounting,
    /// pattern bijection
    VerifyRelu(RunArgs),
    /// Empirical expansion ratios against the slope bound
    VerifyLipschitz(RunArgs),
    /// Exhaustive signed-support combinatorics
    VerifyPacking(RunArgs),
    /// Re-render plot.svg from an existing results.csv
    Plot(PlotArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment description
    #[arg(long)]
    spec: PathBuf,
    /// output directory (default: the spec's out_dir, else ".")
    #[arg(long)]
    out: Option<PathBuf>,
    /// override the spec's seed
    #[arg(long)]
    seed: Option<u64>,
    /// override the spec's trial count
    #[arg(long)]
    trials: Option<usize>,
    /// worker threads (default: one per core)
    #[arg(long)]
    threads: Option<usize>,
    /// csv detail: aggregate rows only, or also per-trial rows
    #[arg(long, value_enum, default_value_t = CsvDetail::Aggregate)]
    csv: CsvDetail,
}

#[derive(Args)]
struct PlotArgs {
    /// directory holding results.csv; plot.svg is written next to it
    #[arg(long)]
    out: PathBuf,
    /// read this CSV instead of <out>/results.csv
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum CsvDetail {
    Aggregate,
    Trials,
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Bounds(args) => run_spec(args, Kind::BoundsSweep),
        Cmd::Risk(args) => run_spec(args, Kind::RiskCurve),
        Cmd::VerifyRelu(args) => run_spec(args, Kind::ReluVerify),
        Cmd::VerifyLipschitz(args) => run_spec(args, Kind::LipschitzVerify),
        Cmd::VerifyPacking(args) => run_spec(args, Kind::PackingVerify),
        Cmd::Plot(args) => render_plot(args),
    }
}

fn run_spec(args: RunArgs, expected: Kind) -> i32 {
    let raw = match std::fs::read(&args.spec) {
        Ok(raw) => raw,
        Err(e) => {
            eprintln!("cannot read {}: {e}", args.spec.display());
            return 2;
        }
    };
    let text = match std::str::from_utf8(&raw) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{} is not UTF-8: {e}", args.spec.display());
            return 2;
        }
    };
    let spec = match ExperimentSpec::from_json(text) {
        Ok(spec) => spec,
        Err(e) => {
            eprintln!("{e}");
            return 2;
        }
    };
    if spec.kind != expected {
        eprintln!(
            "spec kind `{}` does not match this subcommand (expected `{}`)",
            spec.kind.as_str(),
            expected.as_str()
        );
        return 2;
    }
    let ov = Overrides {
        seed: args.seed,
        trials: args.trials,
        trial_csv: args.csv == CsvDetail::Trials,
    };
    let outcome = match args.threads {
        Some(t) => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
                Ok(pool) => pool,
                Err(e) => {
                    eprintln!("cannot build a {t}-thread pool: {e}");
                    return 2;
                }
            };
            pool.install(|| run(&spec, &raw, &ov))
        }
        None => run(&spec, &raw, &ov),
    };
    let output = match outcome {
        Ok(output) => output,
        Err(e) => {
            eprintln!("{e}");
            return 2;
        }
    };
    let dir = args
        .out
        .or_else(|| spec.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let written = match write_outputs(&output, &dir) {
        Ok(paths) => paths,
        Err(e) => {
            eprintln!("cannot write outputs to {}: {e}", dir.display());
            return 2;
        }
    };
    for cell in &output.manifest.cells {
        println!("{}: {}", cell.id, cell.status.label());
    }
    for path in &written {
        println!("wrote {}", path.display());
    }
    println!("manifest {}", output.manifest_hash);
    if output.manifest.all_ok_or_skipped() {
        0
    } else {
        1
    }
}

fn render_plot(args: PlotArgs) -> i32 {
    let input = args
        .input
        .clone()
        .unwrap_or_else(|| args.out.join("results.csv"));
    let text = match std::fs::read_to_string(&input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", input.display());
            return 2;
        }
    };
    let svg = match plot::emit_plot(&text) {
        Ok(svg) => svg,
        Err(e) => {
            eprintln!("{}: {e}", input.display());
            return 2;
        }
    };
    if let Err(e) = std::fs::create_dir_all(&args.out) {
        eprintln!("cannot create {}: {e}", args.out.display());
        return 2;
    }
    let path = args.out.join("plot.svg");
    if let Err(e) = std::fs::write(&path, svg) {
        eprintln!("cannot write {}: {e}", path.display());
        return 2;
    }
    println!("wrote {}", path.display());
    0
}

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ssc::harness::{parse_config_file, run_single, run_sweep, summarize};
use ssc::pipeline::{AlgorithmParams, Variant};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "ssc", about = "Subspace clustering experiment harness")]
struct Cli {
    /// Worker threads for sweep trials (default: available parallelism)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo sweep described by a config file
    Sweep {
        config: PathBuf,
        /// Override the output path from the config
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate a result file: mean and standard error per group
    Summarize {
        file: PathBuf,
        /// Comma-separated axis names, e.g. `variant,b`
        #[arg(long, value_delimiter = ',')]
        group_by: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One clustering run on an external data matrix
    Single(SingleArgs),
}

#[derive(Args)]
struct SingleArgs {
    /// CSV data matrix: one row per dimension, one column per point
    data: PathBuf,
    /// Ground-truth labels, one integer per line
    #[arg(long)]
    labels: Option<PathBuf>,
    /// l1-ssc | omp-ssc | a-omp-ssc
    #[arg(long)]
    variant: String,
    #[arg(long, default_value_t = 0.0)]
    b: f64,
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Sweep { config, out } => {
            let mut spec = parse_config_file(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            if let Some(out) = out {
                spec.output = out;
            }
            let rows = run_sweep(&spec, cli.jobs)?;
            eprintln!(
                "wrote {} rows ({} cells x {} trials) to {}",
                rows.len(),
                spec.cells().len(),
                spec.trials,
                spec.output.display()
            );
        }
        Command::Summarize {
            file,
            group_by,
            out,
        } => {
            if group_by.is_empty() {
                bail!("--group-by requires at least one axis");
            }
            let out = out.unwrap_or_else(|| file.with_extension("summary.csv"));
            let rows = summarize(&file, &group_by, &out)?;
            eprintln!("wrote {} groups to {}", rows.len(), out.display());
        }
        Command::Single(args) => {
            let variant = Variant::parse(&args.variant)
                .with_context(|| format!("unknown variant `{}`", args.variant))?;
            let params = match variant {
                Variant::L1Ssc => AlgorithmParams::l1_ssc(args.k, args.seed),
                Variant::OmpSsc => AlgorithmParams::omp_ssc(args.d, args.k, args.seed),
                Variant::AOmpSsc => {
                    AlgorithmParams::a_omp_ssc(args.d, args.b, args.p, args.k, args.seed)
                }
            };
            run_single(
                &args.data,
                args.labels.as_deref(),
                &params,
                &mut std::io::stdout(),
            )?;
        }
    }
    Ok(())
}

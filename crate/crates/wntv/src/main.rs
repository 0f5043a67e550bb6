use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use wntv::config::{Command, RunConfig};

/// Graph-based interpolation: semi-supervised classification, image
/// inpainting and colorization with GL, WNLL, NTV or WNTV.
///
/// Flags override the corresponding keys of the configuration file.
#[derive(Debug, Parser)]
#[command(name = "wntv", version)]
struct Cli {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// ssl, inpaint or colorize.
    #[arg(long)]
    command: Option<Command>,
    /// GL, WNLL, NTV or WNTV.
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Label weight; defaults to |V|/|S|.
    #[arg(long)]
    mu: Option<f64>,
    /// Neighbors kept per point.
    #[arg(long)]
    k: Option<usize>,
    /// Neighbor rank that sets the Gaussian bandwidth.
    #[arg(long = "r-sigma")]
    r_sigma: Option<usize>,
    /// Odd patch side length.
    #[arg(long)]
    patch: Option<usize>,
    /// Disable the appended pixel coordinates.
    #[arg(long)]
    no_semi_local: bool,
    #[arg(long = "outer-iters")]
    outer_iters: Option<usize>,
    #[arg(long = "bregman-iters")]
    bregman_iters: Option<usize>,
    #[arg(long = "bregman-tol")]
    bregman_tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fraction of pixels observed when no mask file is given.
    #[arg(long)]
    rate: Option<f64>,
    /// ssl: number of labeled points.
    #[arg(long)]
    labels: Option<usize>,
    /// ssl: labeled points per class.
    #[arg(long = "per-class")]
    per_class: Option<usize>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    mask: Option<PathBuf>,
    #[arg(long)]
    truth: Option<PathBuf>,
    /// colorize: image holding the color samples.
    #[arg(long)]
    color: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    metrics: Option<PathBuf>,
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long = "run-id")]
    run_id: Option<String>,
}

fn apply(cli: Cli, mut c: RunConfig) -> RunConfig {
    macro_rules! set {
        ($field:expr, $value:expr) => {
            if let Some(v) = $value {
                $field = v;
            }
        };
    }
    set!(c.run.command, cli.command.map(Some));
    set!(c.run.solver, cli.solver.map(Some));
    set!(c.run.seed, cli.seed);
    set!(c.run.id, cli.run_id.map(Some));
    set!(c.graph.k, cli.k.map(Some));
    set!(c.graph.r_sigma, cli.r_sigma.map(Some));
    set!(c.solver.lambda, cli.lambda);
    set!(c.solver.mu, cli.mu.map(Some));
    set!(c.solver.bregman_iters, cli.bregman_iters);
    set!(c.solver.bregman_tol, cli.bregman_tol);
    set!(c.patch.size, cli.patch);
    if cli.no_semi_local {
        c.patch.semi_local = false;
    }
    set!(c.inpaint.outer_iters, cli.outer_iters);
    set!(c.sample.rate, cli.rate.map(Some));
    if cli.labels.is_some() || cli.per_class.is_some() {
        c.ssl.labels = cli.labels;
        c.ssl.per_class = cli.per_class;
    }
    set!(c.io.input, cli.input.map(Some));
    set!(c.io.mask, cli.mask.map(Some));
    set!(c.io.truth, cli.truth.map(Some));
    set!(c.io.color, cli.color.map(Some));
    set!(c.io.output, cli.output.map(Some));
    set!(c.io.metrics, cli.metrics.map(Some));
    set!(c.io.summary, cli.summary.map(Some));
    c
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let base = match &cli.config {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    };
    let result = base.and_then(|c| wntv::run(&apply(cli, c)));
    match result {
        Ok(summary) => {
            println!("{}", summary.to_json());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

//! `bridgeness`: train node embeddings, explain them, evaluate explainers and
//! run the property suites.
//!
//! Exit codes: 0 success, 1 runtime or numerical failure (including failed
//! suites), 2 usage or configuration error.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, configuration or input files.
    Usage(String),
    /// Training, numerics or anything else that failed at run time.
    Runtime(String),
}

impl From<bridgeness::Error> for CliError {
    fn from(e: bridgeness::Error) -> Self {
        use bridgeness::Error::*;
        match e {
            Parse { .. } | Validation(_) | Io { .. } | Csv(_) | Capacity { .. } => CliError::Usage(e.to_string()),
            Numerical(_) | Diverged { .. } | UndefinedCorrelation(_) | Json(_) => CliError::Runtime(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "bridgeness", version, about = "Skip-gram node embeddings and gradient-based node explanations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Train an embedding and write it as CSV.
    Embed,
    /// Score every node with one or more methods and report the top q.
    Explain,
    /// Spearman against bridgeness, node importance and prediction change.
    Evaluate,
    /// Run the property suites; exits 1 if any fails.
    Verify,
    /// Write embedding, clusters and edge lists (optionally perturbed) for plotting.
    Export,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Embed => "embed",
            Command::Explain => "explain",
            Command::Evaluate => "evaluate",
            Command::Verify => "verify",
            Command::Export => "export",
        }
    }
}

/// Every option is also a key of the `--config` file; flags win over the file.
#[derive(Args)]
struct Opts {
    /// key = value file applied before the flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Edge list: `src dst [weight]` per line.
    #[arg(long, global = true, value_name = "FILE")]
    graph: Option<String>,
    /// Read the third edge-list column as a weight.
    #[arg(long, global = true)]
    weighted: bool,
    /// `node,label` CSV for prediction change and the greedy baseline.
    #[arg(long, global = true, value_name = "FILE")]
    labels: Option<String>,
    /// Precomputed embedding CSV (explain, export).
    #[arg(long, global = true, value_name = "FILE")]
    embedding: Option<String>,
    /// deepwalk or line.
    #[arg(long, global = true)]
    model: Option<String>,
    /// graph_gd, graph_wgd, bridgeness, degree, ppr, greedy (comma-separated).
    #[arg(long, global = true)]
    method: Option<String>,
    /// base, plus_minus, abs, sigmoid, tanh or angular:DEGREES.
    #[arg(long, global = true)]
    variant: Option<String>,
    /// Number of top nodes to report.
    #[arg(long, global = true)]
    q: Option<String>,
    /// Neighbours sampled per node when scoring [default: 100].
    #[arg(long, global = true)]
    psi: Option<String>,
    /// Fraction of inter-cluster edges removed by a perturbation [default: 0.5].
    #[arg(long, global = true)]
    alpha: Option<String>,
    /// Number of clusters.
    #[arg(long, global = true)]
    k: Option<String>,
    #[arg(long, global = true)]
    dim: Option<String>,
    #[arg(long, global = true)]
    window: Option<String>,
    /// Walks per node.
    #[arg(long, global = true)]
    walks: Option<String>,
    #[arg(long, global = true)]
    walk_length: Option<String>,
    #[arg(long, global = true)]
    negatives: Option<String>,
    #[arg(long, global = true)]
    learning_rate: Option<String>,
    #[arg(long, global = true)]
    epochs: Option<String>,
    /// Lock-free multi-threaded training (not bit-reproducible).
    #[arg(long, global = true)]
    hogwild: bool,
    /// Seed, or comma-separated seeds.
    #[arg(long, global = true, alias = "seeds")]
    seed: Option<String>,
    /// Perturbed percentages for evaluate (comma-separated) [default: 3,5,7].
    #[arg(long, global = true)]
    z: Option<String>,
    /// spearman, ni, pc (comma-separated).
    #[arg(long, global = true)]
    metrics: Option<String>,
    /// Neighbourhood size for node importance [default: 5% of nodes].
    #[arg(long, global = true)]
    m: Option<String>,
    /// Suite to verify (comma-separated); all when omitted.
    #[arg(long, global = true, alias = "suites")]
    suite: Option<String>,
    /// Instances per suite.
    #[arg(long, global = true)]
    instances: Option<String>,
    /// Node to perturb in export.
    #[arg(long, global = true, value_name = "NODE")]
    perturb: Option<String>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<String>,
}

impl Opts {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut v = Vec::new();
        let mut add = |k: &'static str, x: &Option<String>| {
            if let Some(x) = x {
                v.push((k, x.clone()));
            }
        };
        add("graph", &self.graph);
        add("labels", &self.labels);
        add("embedding", &self.embedding);
        add("model", &self.model);
        add("method", &self.method);
        add("variant", &self.variant);
        add("q", &self.q);
        add("psi", &self.psi);
        add("alpha", &self.alpha);
        add("k", &self.k);
        add("dim", &self.dim);
        add("window", &self.window);
        add("walks", &self.walks);
        add("walk_length", &self.walk_length);
        add("negatives", &self.negatives);
        add("learning_rate", &self.learning_rate);
        add("epochs", &self.epochs);
        add("seed", &self.seed);
        add("z", &self.z);
        add("metrics", &self.metrics);
        add("m", &self.m);
        add("suite", &self.suite);
        add("instances", &self.instances);
        add("perturb", &self.perturb);
        add("out", &self.out);
        if self.weighted {
            v.push(("weighted", "true".into()));
        }
        if self.hogwild {
            v.push(("hogwild", "true".into()));
        }
        v
    }

    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        for (k, v) in self.pairs() {
            cfg.set(k, &v).map_err(|e| CliError::Usage(format!("--{}: {e}", k.replace('_', "-"))))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let cfg = cli.opts.resolve()?;
    log::info!("{}", cli.command.name());
    match cli.command {
        Command::Embed => commands::embed(&cfg).map(|_| true),
        Command::Explain => commands::explain(&cfg).map(|_| true),
        Command::Evaluate => commands::evaluate(&cfg).map(|_| true),
        Command::Verify => commands::verify(&cfg),
        Command::Export => commands::export(&cfg).map(|_| true),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mjw_core::matrix_analysis::Linkage;
use mjw_core::pipeline::{run_pipeline, EmptySetPolicy, NamedWindow, PipelineConfig, Stage};
use mjw_core::{Error, ErrorKind};

/// Change-point similarity of time series and market-dynamics analytics.
#[derive(Parser, Debug)]
#[command(name = "mjw", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample change points and write one posterior per series.
    Detect(Overrides),
    /// Detect, then build the distance matrix.
    Distances(Overrides),
    /// Detect and measure, then write norms, the triangle test and the dendrogram.
    Audit(Overrides),
    /// Windowed correlation histograms, rolling PCA and trajectory norms.
    Market(Overrides),
    /// Every stage.
    All(Overrides),
}

#[derive(Args, Debug)]
struct Overrides {
    /// TOML configuration file; flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Wide-format price CSV.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Outer order of the set distance.
    #[arg(long)]
    p: Option<f64>,
    /// Wasserstein order.
    #[arg(long)]
    q: Option<f64>,
    /// Calendar window NAME=START..END (ISO dates); repeatable.
    #[arg(long = "window", value_name = "NAME=START..END")]
    windows: Vec<String>,
    /// single, complete or average.
    #[arg(long)]
    linkage: Option<String>,
    /// exclude or error.
    #[arg(long)]
    empty_set_policy: Option<String>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    burnin: Option<usize>,
    /// Minimum segment length.
    #[arg(long)]
    tmin: Option<usize>,
    #[arg(long)]
    max_segments: Option<usize>,
}

impl Overrides {
    fn resolve(self) -> Result<PipelineConfig, Error> {
        let mut c = match &self.config {
            Some(path) => PipelineConfig::from_toml_file(path)?,
            None => PipelineConfig::default(),
        };
        if let Some(v) = self.input {
            c.input = Some(v);
        }
        if let Some(v) = self.out {
            c.out_dir = v;
        }
        if let Some(v) = self.seed {
            c.seed = Some(v);
        }
        if let Some(v) = self.p {
            c.p = v;
        }
        if let Some(v) = self.q {
            c.q = v;
        }
        if !self.windows.is_empty() {
            c.windows = self
                .windows
                .iter()
                .map(|w| w.parse::<NamedWindow>())
                .collect::<Result<_, _>>()?;
        }
        if let Some(v) = self.linkage {
            c.linkage = v.parse::<Linkage>()?;
        }
        if let Some(v) = self.empty_set_policy {
            c.empty_set_policy = v.parse::<EmptySetPolicy>()?;
        }
        if let Some(v) = self.iterations {
            c.sampler.n_iterations = v;
        }
        if let Some(v) = self.burnin {
            c.sampler.n_burnin = v;
        }
        if let Some(v) = self.tmin {
            c.sampler.t_min = v;
        }
        if let Some(v) = self.max_segments {
            c.sampler.max_segments = v;
        }
        Ok(c)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Config => 2,
        ErrorKind::Data => 3,
        ErrorKind::Numerical => 4,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (stage, overrides) = match cli.command {
        Command::Detect(o) => (Stage::Detect, o),
        Command::Distances(o) => (Stage::Distances, o),
        Command::Audit(o) => (Stage::Audit, o),
        Command::Market(o) => (Stage::Market, o),
        Command::All(o) => (Stage::All, o),
    };
    let result = overrides
        .resolve()
        .and_then(|config| run_pipeline(&config, stage));
    match result {
        Ok(report) => {
            println!(
                "{} outputs written for {} series ({} excluded)",
                report.outputs.len() + 1,
                report.series.len(),
                report.excluded.len()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

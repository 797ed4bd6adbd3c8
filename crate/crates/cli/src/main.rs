use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{error, info};

use rstdiag::boost::read_model;
use rstdiag::features::Dataset;
use rstdiag_cli::config::{Overrides, RunConfig, CONFIG_ENV};
use rstdiag_cli::output::{fmt_f, Outputs};
use rstdiag_cli::pipeline::{self, stage, Session};

/// Error analysis of RST discourse parsers.
#[derive(Parser)]
#[command(name = "rstdiag", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Config file (TOML); defaults to the file named by RSTDIAG_CONFIG.
    #[arg(long, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for per-document stages.
    #[arg(long)]
    jobs: Option<usize>,
    /// Minimum number of erroneous runs for an EDU to count as hard.
    #[arg(long)]
    hard_threshold: Option<usize>,
    #[arg(long, value_parser = ["attach", "label", "either"])]
    target: Option<String>,
    #[arg(long, value_parser = ["realistic", "full"])]
    mode: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Convert rs3/dis files or directories to rsd dependencies.
    Convert {
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// `gum`, `rst-dt`, or a relation mapping table; overrides the config.
        #[arg(long)]
        scheme: Option<String>,
        #[arg(long, env = CONFIG_ENV)]
        config: Option<PathBuf>,
    },
    /// Parseval scores per run and architecture.
    Score(Common),
    /// Per-EDU error profiles.
    Errors(Common),
    /// Feature tables.
    Features(Common),
    /// Marking statistics, group tests, significance grid, consistency.
    Stats(Common),
    /// Boosted models, cross-validation and importances.
    Fit(Common),
    /// Apply a saved model to a feature table.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Error-count distributions by marker status.
    Report(Common),
    /// Every stage in order, with a manifest.
    Pipeline(Common),
}

fn open(common: &Common) -> Result<(Session, Outputs)> {
    let mut config = RunConfig::locate(common.config.as_deref())?;
    config.apply(&Overrides {
        seed: common.seed,
        jobs: common.jobs,
        hard_threshold: common.hard_threshold,
        target: common.target.clone(),
        mode: common.mode.clone(),
        output: common.out.clone(),
    });
    let out = Outputs::new(&config.output, &config)?;
    let session = Session::open(config)?;
    Ok((session, out))
}

fn run(command: Command) -> Result<()> {
    let (session, mut out) = match &command {
        Command::Convert { inputs, out, scheme, config } => return convert(inputs, out, scheme.as_deref(), config.as_deref()),
        Command::Predict { model, features, out } => return predict(model, features, out),
        Command::Score(c)
        | Command::Errors(c)
        | Command::Features(c)
        | Command::Stats(c)
        | Command::Fit(c)
        | Command::Report(c)
        | Command::Pipeline(c) => open(c)?,
    };
    let s = &session;
    match command {
        Command::Score(_) => stage("score", pipeline::run_score(s, &mut out))?,
        Command::Errors(_) => stage("errors", pipeline::run_errors(s, &mut out))?,
        Command::Features(_) => {
            let rows = stage("features", s.feature_rows())?;
            stage("features", pipeline::run_features(s, &rows, &mut out))?
        }
        Command::Stats(_) => {
            let rows = stage("features", s.feature_rows())?;
            stage("stats", pipeline::run_stats(s, &rows, &mut out))?
        }
        Command::Fit(_) => {
            let rows = stage("features", s.feature_rows())?;
            stage("model", pipeline::run_model(s, &rows, &mut out))?
        }
        Command::Report(_) => {
            let rows = stage("features", s.feature_rows())?;
            stage("report", pipeline::run_report(&rows, pipeline::runs_per_architecture(s), &mut out))?
        }
        Command::Pipeline(_) => {
            pipeline::run_pipeline(s, &mut out)?;
            info!("wrote {}", out.root().join("manifest.json").display());
            return Ok(());
        }
        Command::Convert { .. } | Command::Predict { .. } => unreachable!(),
    }
    out.write_manifest()?;
    Ok(())
}

fn convert(inputs: &[PathBuf], dir: &Path, scheme: Option<&str>, config: Option<&Path>) -> Result<()> {
    let mut cfg = match config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = scheme {
        cfg.scheme = s.to_string();
    }
    cfg.output = dir.to_path_buf();
    let scheme = cfg.relation_scheme()?;
    let mut out = Outputs::new(dir, &cfg)?;
    let (written, failures) = stage("convert", pipeline::convert_files(inputs, &scheme, &mut out))?;
    out.write_manifest()?;
    info!("converted {written} files");
    for (path, err) in &failures {
        error!("{}: {err}", path.display());
    }
    if !failures.is_empty() {
        bail!("stage `convert` failed: {} of {} files", failures.len(), written + failures.len());
    }
    Ok(())
}

fn predict(model: &Path, features: &Path, out: &Path) -> Result<()> {
    let text = std::fs::read_to_string(model).with_context(|| format!("reading {}", model.display()))?;
    let model = read_model(&text)?;
    let file = std::fs::File::open(features).with_context(|| format!("reading {}", features.display()))?;
    let data = Dataset::read_csv(file)?;
    let names: Vec<&str> = model.schema.columns.iter().map(|c| c.name.as_str()).collect();
    let data = data.select(&names)?;
    let predictions = stage("predict", model.predict(&data).map_err(Into::into))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["doc_id", "edu_id", "probability", "hard"])?;
    for (row, p) in data.rows.iter().zip(&predictions) {
        w.write_record([row.doc_id.clone(), row.edu_id.to_string(), fmt_f(p.probability), p.hard.to_string()])?;
    }
    let header = format!("# rstdiag {} model={} seed={}\n", rstdiag_cli::output::VERSION, model_hash(&text), model.params.seed);
    let body = String::from_utf8(w.into_inner()?)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(out, header + &body).with_context(|| format!("writing {}", out.display()))?;
    Ok(())
}

fn model_hash(text: &str) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e:#}");
            ExitCode::FAILURE
        }
    }
}

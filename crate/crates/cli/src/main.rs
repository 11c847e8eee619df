//! `anisoframe`: batch experiments over shearlet frames and their sequence
//! spaces. Every run writes its artifacts into `--out-dir` and exits 0 only
//! when all of its checks pass.

mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use config::{ExperimentConfig, Overrides};
use output::OutDir;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] anisoframe::Error),
    #[error("{0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Core(anisoframe::Error::Parse { .. }) => "parse",
            CliError::Core(anisoframe::Error::InvalidParameter { .. }) => "invalid_parameter",
            CliError::Core(_) => "computation",
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "anisoframe", version, about = "Shearlet frame and sequence-space experiments")]
struct Cli {
    /// JSON config file; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for all artifacts (default `out`).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parseval defect and round-trip error of the frame.
    FrameCheck(Overrides),
    /// Image (PGM or CSV) to a coefficient file.
    Transform(Overrides),
    /// All norms of a coefficient file.
    Norms(Overrides),
    /// Democracy bounds over a random corpus of index sets.
    Democracy(Overrides),
    /// Pointwise bounds on the scale sum of an index set.
    Lemma31(Overrides),
    /// Approximation curves and Jackson/Bernstein suprema.
    Rnla(Overrides),
    /// Interpolation identities over a random corpus.
    Interp(Overrides),
    /// N-term decay on a cartoon image, shearlets against Haar.
    DecayDemo(Overrides),
}

impl Command {
    fn split(&self) -> (&'static str, &Overrides) {
        match self {
            Command::FrameCheck(o) => ("frame-check", o),
            Command::Transform(o) => ("transform", o),
            Command::Norms(o) => ("norms", o),
            Command::Democracy(o) => ("democracy", o),
            Command::Lemma31(o) => ("lemma31", o),
            Command::Rnla(o) => ("rnla", o),
            Command::Interp(o) => ("interp", o),
            Command::DecayDemo(o) => ("decay-demo", o),
        }
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
}

fn report_error(kind: &str, message: String) {
    let text = serde_json::to_string(&ErrorReport { error: kind, message }).expect("plain strings serialize");
    eprintln!("{text}");
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("ANISOFRAME_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("ANISOFRAME_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

#[derive(Serialize)]
struct Summary<'a> {
    subcommand: &'a str,
    pass: bool,
    out_dir: &'a Path,
    artifacts: &'a [String],
}

fn run(cli: Cli) -> Result<(bool, PathBuf), (CliError, Option<PathBuf>)> {
    let (name, overrides) = cli.command.split();
    let mut cfg = ExperimentConfig::load(cli.config.as_deref()).map_err(|e| (e, None))?;
    if let Some(dir) = cli.out_dir {
        cfg.out_dir = dir;
    }
    cfg.subcommand = name.to_string();
    cfg.apply(overrides, cli.seed);
    cfg.validate().map_err(|e| (e, None))?;
    init_threads().map_err(|e| (e, None))?;

    let root = cfg.out_dir.clone();
    let fail = |e: CliError| (e, Some(root.clone()));
    let mut out = OutDir::create(&root).map_err(|e| (e, None))?;
    out.json("config.json", &cfg).map_err(fail)?;
    let pass = match cli.command {
        Command::FrameCheck(_) => commands::frame_check(&cfg, &mut out),
        Command::Transform(_) => commands::transform(&cfg, &mut out),
        Command::Norms(_) => commands::norms(&cfg, &mut out),
        Command::Democracy(_) => commands::democracy(&cfg, &mut out),
        Command::Lemma31(_) => commands::lemma31(&cfg, &mut out),
        Command::Rnla(_) => commands::rnla(&cfg, &mut out),
        Command::Interp(_) => commands::interp(&cfg, &mut out),
        Command::DecayDemo(_) => commands::decay_demo(&cfg, &mut out),
    }
    .map_err(fail)?;
    if !pass {
        OutDir::mark_failed(&root, &format!("{name}: a check did not pass; see report.json"));
    }
    let summary = Summary {
        subcommand: name,
        pass,
        out_dir: &root,
        artifacts: out.written(),
    };
    println!("{}", serde_json::to_string(&summary).expect("summary serializes"));
    Ok((pass, root))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            report_error("usage", e.to_string().trim_end().to_string());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok((true, _)) => ExitCode::SUCCESS,
        Ok((false, _)) => ExitCode::from(1),
        Err((e, root)) => {
            if let Some(root) = root {
                OutDir::mark_failed(&root, &e.to_string());
            }
            report_error(e.kind(), e.to_string());
            ExitCode::from(2)
        }
    }
}

//! Command-line driver: parses flags and a TOML run configuration, runs one
//! verification pipeline and writes its reports atomically.
//!
//! Exit codes: 0 when every asserted invariant holds, 1 on invalid input or
//! a refused computation, 2 when an invariant is violated.

pub mod commands;
pub mod config;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::Parser;
use ltsharp::{Potential2dSpec, PotentialSpec};

pub use commands::{run_command, run_corpus, CommandError, Outcome};
pub use config::{CommandKind, Format, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ltsharp", version, about = "Jost solutions, trace identities and sharp Lieb-Thirring checks")]
pub struct Cli {
    /// Pipeline to run; may also come from the config file.
    #[arg(value_enum)]
    pub command: Option<CommandKind>,
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// TOML file holding a potential (2D when `--d 2`).
    #[arg(long)]
    pub potential: Option<PathBuf>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub kmax: Option<f64>,
    /// Comma-separated couplings for `weyl`.
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report formats; repeat or separate with commas.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub format: Option<Vec<Format>>,
    /// Run the built-in potential corpus end to end.
    #[arg(long)]
    pub corpus: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Nodes per axis of the coarse 2D grid.
    #[arg(long)]
    pub grid_points: Option<usize>,
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

/// Merges the config file and the flags; flags win.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_toml(&read(p)?)?,
        None => RunConfig::default(),
    };
    let n = &mut cfg.numerics;
    if let Some(g) = cli.gamma {
        n.gamma = g;
    }
    if let Some(d) = cli.d {
        n.d = d;
    }
    if let Some(k) = cli.kmax {
        n.k_max = k;
    }
    if let Some(a) = &cli.alphas {
        n.alphas = a.clone();
    }
    if let Some(s) = cli.seed {
        n.seed = Some(s);
    }
    if let Some(g) = cli.grid_points {
        n.grid_points = g;
    }
    if let Some(o) = &cli.out {
        cfg.output.directory = o.clone();
    }
    if let Some(f) = &cli.format {
        cfg.output.formats = f.clone();
    }
    if cli.command.is_some() {
        cfg.command = cli.command;
    }
    cfg.corpus |= cli.corpus;
    if let Some(p) = &cli.potential {
        let text = read(p)?;
        if cfg.numerics.d == 2 {
            let v: Potential2dSpec =
                toml::from_str(&text).map_err(|e| format!("malformed potential file {}: {e}", p.display()))?;
            cfg.potential_2d = Some(v);
        } else {
            let v: PotentialSpec =
                toml::from_str(&text).map_err(|e| format!("malformed potential file {}: {e}", p.display()))?;
            cfg.potential = Some(v);
        }
    }
    if let Some(v) = &cfg.potential {
        v.validate().map_err(|e| e.to_string())?;
    }
    if let Some(v) = &cfg.potential_2d {
        v.validate().map_err(|e| e.to_string())?;
    }
    if cfg.command.is_none() && !cfg.corpus {
        return Err("no command given (and --corpus not set)".into());
    }
    Ok(cfg)
}

fn extension(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Text => "txt",
    }
}

/// Writes each report through a temporary file in the target directory and
/// a rename, so readers never see a partial file.
pub fn write_reports(dir: &Path, outcome: &Outcome, formats: &[Format]) -> Result<Vec<PathBuf>, String> {
    let wanted: Vec<_> = outcome.files.iter().filter(|f| formats.contains(&f.1)).collect();
    if wanted.is_empty() {
        return Ok(Vec::new());
    }
    fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let mut written = Vec::new();
    for (stem, format, body) in wanted {
        let target = dir.join(format!("{stem}.{}", extension(*format)));
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| format!("cannot write to {}: {e}", dir.display()))?;
        tmp.write_all(body.as_bytes())
            .and_then(|_| tmp.as_file().sync_all())
            .map_err(|e| format!("cannot write {}: {e}", target.display()))?;
        tmp.persist(&target)
            .map_err(|e| format!("cannot move report into {}: {e}", target.display()))?;
        written.push(target);
    }
    Ok(written)
}

/// Runs a resolved configuration and returns the exit code.
pub fn execute(cfg: &RunConfig) -> i32 {
    let mut outcomes = Vec::new();
    if cfg.corpus {
        outcomes.push(run_corpus(cfg));
    }
    if let Some(kind) = cfg.command {
        outcomes.push(run_command(kind, cfg));
    }
    let mut merged = Outcome::default();
    for o in outcomes {
        match o {
            Ok(o) => {
                merged.files.extend(o.files);
                merged.stdout.push_str(&o.stdout);
                merged.violations.extend(o.violations);
            }
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_INPUT;
            }
        }
    }
    print!("{}", merged.stdout);
    if let Err(e) = write_reports(&cfg.output.directory, &merged, &cfg.output.formats) {
        eprintln!("error: {e}");
        return EXIT_INPUT;
    }
    if merged.violations.is_empty() {
        EXIT_OK
    } else {
        for v in &merged.violations {
            eprintln!("violation: {v}");
        }
        EXIT_VIOLATION
    }
}

/// Entry point shared by the binary and the tests.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match resolve_config(&cli) {
        Ok(cfg) => execute(&cfg),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

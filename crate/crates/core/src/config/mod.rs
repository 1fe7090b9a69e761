//! Turning command-line arguments into a validated [`AnalysisJob`].

mod compdb;
pub mod directive;

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, ValueEnum};

pub use compdb::load_compilation_database;

use crate::checker::Registry;
use crate::ir::MemoryBudget;
use crate::report::Importance;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub enum PreprocessMode {
    #[default]
    None,
    /// Shell command run with the flags and the file path appended.
    External(String),
}

/// One file to analyse and how to preprocess it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SourceDescriptor {
    pub path: PathBuf,
    pub preprocessor_flags: Vec<String>,
    pub preprocess_mode: PreprocessMode,
}

impl SourceDescriptor {
    pub fn plain(path: impl Into<PathBuf>) -> Self {
        Self {
            path: path.into(),
            preprocessor_flags: Vec::new(),
            preprocess_mode: PreprocessMode::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    Json,
    Xml,
    #[default]
    Console,
}

/// A checker to run, with its configuration already read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckerSpec {
    pub name: String,
    pub config_path: Option<PathBuf>,
    pub config: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisJob {
    pub sources: Vec<SourceDescriptor>,
    pub checkers: Vec<CheckerSpec>,
    pub memory_budget: MemoryBudget,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub min_importance: Importance,
    /// Directory holding the last report and the triage journal.
    pub db: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}: no such file or directory")]
    MissingPath(PathBuf),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed compilation database: {message}")]
    Compdb { path: PathBuf, message: String },
    #[error("unknown checker `{0}`")]
    UnknownChecker(String),
    #[error("checker `{0}` listed more than once")]
    DuplicateChecker(String),
    #[error("--memory-units must be at least 1")]
    ZeroBudget,
    #[error("no source files to analyse")]
    NoSources,
}

/// Arguments of the `check` subcommand.
#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    /// Analyse every `*.c` file in a directory.
    #[arg(long = "dir", value_name = "D")]
    pub dirs: Vec<PathBuf>,
    /// Descend into subdirectories of `--dir`.
    #[arg(long)]
    pub recursive: bool,
    /// File listing one source path per line.
    #[arg(long = "list", value_name = "F")]
    pub lists: Vec<PathBuf>,
    /// Compilation database (JSON array of {file, flags}).
    #[arg(long = "compdb", value_name = "F")]
    pub compdbs: Vec<PathBuf>,
    /// Checker to run, optionally with a configuration file.
    #[arg(long = "checker", value_name = "NAME[:CONFIG]", required = true)]
    pub checkers: Vec<String>,
    /// Maximum number of resident translation units.
    #[arg(long, value_name = "N")]
    pub memory_units: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Console)]
    pub format: OutputFormat,
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Preprocessor command; it receives the flags and the file path.
    #[arg(long, value_name = "CMD")]
    pub preprocess: Option<String>,
    /// Drop findings below this importance.
    #[arg(long, value_enum, default_value_t = Importance::Warning)]
    pub min_importance: Importance,
    /// Store the report here for `report` and `triage`.
    #[arg(long, value_name = "DIR")]
    pub db: Option<PathBuf>,
    pub files: Vec<PathBuf>,
}

#[derive(Parser)]
#[command(no_binary_name = true)]
enum Argv {
    Check(CheckArgs),
}

/// Parses `check ...` arguments (without the program name) into a job.
pub fn build_job<I, T>(argv: I, registry: &Registry) -> Result<AnalysisJob, ConfigError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let Argv::Check(args) =
        Argv::try_parse_from(argv).map_err(|e| ConfigError::Usage(e.to_string()))?;
    AnalysisJob::from_args(&args, registry)
}

impl AnalysisJob {
    pub fn from_args(args: &CheckArgs, registry: &Registry) -> Result<AnalysisJob, ConfigError> {
        let memory_budget = match args.memory_units {
            None => MemoryBudget::Unlimited,
            Some(n) => MemoryBudget::units(n).ok_or(ConfigError::ZeroBudget)?,
        };
        let mut paths: Vec<SourceDescriptor> = Vec::new();
        for dir in &args.dirs {
            paths.extend(expand_dir(dir, args.recursive)?.into_iter().map(SourceDescriptor::plain));
        }
        for list in &args.lists {
            paths.extend(expand_list(list)?.into_iter().map(SourceDescriptor::plain));
        }
        for db in &args.compdbs {
            paths.extend(load_compilation_database(db)?);
        }
        paths.extend(args.files.iter().cloned().map(SourceDescriptor::plain));

        let mut seen = HashSet::new();
        let mut sources = Vec::new();
        for mut s in paths {
            if !seen.insert(s.path.clone()) {
                continue;
            }
            if !s.path.is_file() {
                return Err(ConfigError::MissingPath(s.path));
            }
            if let Some(cmd) = &args.preprocess {
                s.preprocess_mode = PreprocessMode::External(cmd.clone());
            }
            sources.push(s);
        }
        if sources.is_empty() {
            return Err(ConfigError::NoSources);
        }

        let mut checkers: Vec<CheckerSpec> = Vec::new();
        for raw in &args.checkers {
            let (name, config_path) = match raw.split_once(':') {
                Some((n, c)) => (n.to_string(), Some(PathBuf::from(c))),
                None => (raw.clone(), None),
            };
            if !registry.contains(&name) {
                return Err(ConfigError::UnknownChecker(name));
            }
            if checkers.iter().any(|c| c.name == name) {
                return Err(ConfigError::DuplicateChecker(name));
            }
            let config = config_path
                .as_ref()
                .map(|p| {
                    std::fs::read_to_string(p).map_err(|source| ConfigError::Read {
                        path: p.clone(),
                        source,
                    })
                })
                .transpose()?;
            checkers.push(CheckerSpec {
                name,
                config_path,
                config,
            });
        }

        Ok(AnalysisJob {
            sources,
            checkers,
            memory_budget,
            output: args.output.clone(),
            format: args.format,
            min_importance: args.min_importance,
            db: args.db.clone(),
        })
    }
}

/// `*.c` files in `dir`, sorted by path.
pub fn expand_dir(dir: &Path, recursive: bool) -> Result<Vec<PathBuf>, ConfigError> {
    if !dir.is_dir() {
        return Err(ConfigError::MissingPath(dir.to_path_buf()));
    }
    let mut out = Vec::new();
    let mut pending = vec![dir.to_path_buf()];
    while let Some(d) = pending.pop() {
        let entries = std::fs::read_dir(&d).map_err(|source| ConfigError::Read {
            path: d.clone(),
            source,
        })?;
        for entry in entries {
            let path = entry
                .map_err(|source| ConfigError::Read {
                    path: d.clone(),
                    source,
                })?
                .path();
            if path.is_dir() {
                if recursive {
                    pending.push(path);
                }
            } else if path.extension().is_some_and(|e| e == "c") {
                out.push(path);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Paths listed in `list`, one per line; blank lines and `#` comments are
/// skipped and relative paths are taken relative to the list's directory.
pub fn expand_list(list: &Path) -> Result<Vec<PathBuf>, ConfigError> {
    let text = std::fs::read_to_string(list).map_err(|source| ConfigError::Read {
        path: list.to_path_buf(),
        source,
    })?;
    let base = list.parent().unwrap_or(Path::new(""));
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| base.join(l))
        .collect())
}

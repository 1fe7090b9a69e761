use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use cbugscan_core::checker::{run_job, Registry};
use cbugscan_core::config::{AnalysisJob, CheckArgs, OutputFormat, SourceDescriptor};
use cbugscan_core::frontend::{dump_ast, parse, preprocess};
use cbugscan_core::ir::{build_unit, UnitManager};
use cbugscan_core::points_to::{collect_constraints, shapiro_horowitz, steensgaard};
use cbugscan_core::report::{export, parse_json, statistics, Triage, TriageDb};
use clap::{Parser, Subcommand};
use log::info;

const REPORT_FILE: &str = "report.json";
const JOURNAL_FILE: &str = "triage.tsv";

#[derive(Parser)]
#[command(name = "cbugscan", version, about = "Static bug finder for a subset of C")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run checkers over source files.
    Check(CheckArgs),
    /// Print the AST of a file as an indented s-expression.
    DumpAst { file: PathBuf },
    /// Print control-flow graphs in DOT.
    DumpCfg {
        file: PathBuf,
        #[arg(long)]
        function: Option<String>,
    },
    /// Print may-points-to sets for a file.
    PointsTo {
        file: PathBuf,
        /// Number of categories; omit for plain unification.
        #[arg(long)]
        categories: Option<usize>,
    },
    /// Statistics for the report stored in DB.
    Report { db: PathBuf },
    /// Classify a reported error.
    Triage {
        db: PathBuf,
        error_id: String,
        #[arg(value_parser = ["real", "false-positive"])]
        status: String,
    },
    /// List the available checkers.
    Checkers,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<()> {
    let registry = Registry::with_builtins();
    match command {
        Command::Check(args) => check(&args, &registry),
        Command::DumpAst { file } => {
            let ast = parse_file(&file)?;
            print!("{}", dump_ast(&ast));
            Ok(())
        }
        Command::DumpCfg { file, function } => {
            let unit = build_unit(&SourceDescriptor::plain(&file))?;
            let mut found = false;
            for f in &unit.functions {
                if function.as_deref().is_some_and(|n| n != f.name) {
                    continue;
                }
                found = true;
                print!("{}", f.cfg.to_dot());
            }
            if !found {
                if let Some(name) = function {
                    bail!("no function `{name}` in {}", file.display());
                }
            }
            Ok(())
        }
        Command::PointsTo { file, categories } => {
            let unit = build_unit(&SourceDescriptor::plain(&file))?;
            let set = collect_constraints(&unit);
            let result = match categories {
                None => steensgaard(&set),
                Some(k) => shapiro_horowitz(&set, k)?,
            };
            println!("# {}", result.analysis);
            print!("{}", result.dump());
            Ok(())
        }
        Command::Report { db } => {
            let (traces, journal) = load_db(&db)?;
            print!("{}", statistics(&traces, &journal).render());
            Ok(())
        }
        Command::Triage { db, error_id, status } => {
            let status: Triage = status.parse()?;
            let (traces, mut journal) = load_db(&db)?;
            let known: BTreeSet<String> = traces.into_iter().map(|t| t.id).collect();
            journal.mark(&error_id, status, Some(&known))?;
            Ok(())
        }
        Command::Checkers => {
            for name in registry.names() {
                let d = registry.descriptor(name).expect("listed checker");
                println!("{name}: {}", d.config_schema);
            }
            Ok(())
        }
    }
}

fn parse_file(file: &Path) -> Result<cbugscan_core::frontend::AstNode> {
    let text = preprocess(&SourceDescriptor::plain(file))?;
    Ok(parse(&text, &file.display().to_string())?)
}

fn check(args: &CheckArgs, registry: &Registry) -> Result<()> {
    let job = AnalysisJob::from_args(args, registry)?;
    let manager = UnitManager::new(job.sources.clone(), job.memory_budget);
    let mut result = run_job(&job, registry, &manager);
    let stats = manager.stats();
    info!(
        "{} units built, {} evictions, peak {} resident",
        stats.pipeline_runs, stats.evictions, stats.peak_resident
    );
    for d in &result.diagnostics {
        eprintln!("warning: {d}");
    }
    if let Some(db) = &job.db {
        fs::create_dir_all(db).with_context(|| format!("creating {}", db.display()))?;
        let journal = TriageDb::open(db.join(JOURNAL_FILE))?;
        journal.apply(&mut result.traces);
        let path = db.join(REPORT_FILE);
        fs::write(&path, export(&result.traces, OutputFormat::Json))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let rendered = export(&result.traces, job.format);
    match &job.output {
        Some(path) => fs::write(path, rendered).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(rendered.as_bytes())?,
    }
    Ok(())
}

fn load_db(db: &Path) -> Result<(Vec<cbugscan_core::report::ErrorTrace>, TriageDb)> {
    let path = db.join(REPORT_FILE);
    let text = fs::read_to_string(&path)
        .with_context(|| format!("reading {} (run `check --db` first)", path.display()))?;
    let mut traces = parse_json(&text)?;
    let journal = TriageDb::open(db.join(JOURNAL_FILE))?;
    journal.apply(&mut traces);
    Ok((traces, journal))
}

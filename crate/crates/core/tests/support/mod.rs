#![allow(dead_code)]

pub mod andersen;
pub mod paths;

use std::path::{Path, PathBuf};

use cbugscan_core::checker::{run_job, JobResult, Registry};
use cbugscan_core::config::build_job;
use cbugscan_core::ir::{ManagerStats, UnitManager};

pub fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus_file(rel: &str) -> String {
    corpus().join(rel).display().to_string()
}

/// Parses `check ...` arguments and runs the job.
pub fn run(args: &[&str]) -> (JobResult, ManagerStats) {
    let registry = Registry::with_builtins();
    let mut argv = vec!["check"];
    argv.extend_from_slice(args);
    let job = build_job(argv, &registry).expect("valid job");
    let manager = UnitManager::new(job.sources.clone(), job.memory_budget);
    let result = run_job(&job, &registry, &manager);
    (result, manager.stats())
}

pub const ALL_CHECKERS: [&str; 8] = [
    "--checker", "automaton", "--checker", "thread", "--checker", "lockstat", "--checker", "reach",
];

use std::collections::BTreeSet;

use log::debug;

use super::{CheckContext, Registry};
use crate::config::AnalysisJob;
use crate::ir::UnitManager;
use crate::report::{normalize, ErrorTrace};

#[derive(Debug, Default)]
pub struct JobResult {
    /// Sorted by file, line and checker.
    pub traces: Vec<ErrorTrace>,
    /// Unit build failures, checker failures and checker notes, sorted.
    pub diagnostics: Vec<String>,
}

/// Runs every checker of `job` over every source, one thread per checker.
///
/// Each checker gets its own instance and walks the sources in job order,
/// fetching units through `manager`. Failures are recorded as diagnostics
/// and do not stop other checkers or units. Findings below the job's
/// minimum importance are dropped.
pub fn run_job(job: &AnalysisJob, registry: &Registry, manager: &UnitManager) -> JobResult {
    let per_checker: Vec<(Vec<ErrorTrace>, Vec<String>)> = std::thread::scope(|s| {
        let handles: Vec<_> = job
            .checkers
            .iter()
            .map(|spec| {
                s.spawn(move || {
                    let mut traces = Vec::new();
                    let mut diagnostics = Vec::new();
                    let mut checker = match registry.instantiate(&spec.name, spec.config.as_deref()) {
                        Ok(c) => c,
                        Err(e) => {
                            diagnostics.push(e.to_string());
                            return (traces, diagnostics);
                        }
                    };
                    for source in &job.sources {
                        let unit = match manager.get_unit(&source.path) {
                            Ok(u) => u,
                            Err(e) => {
                                diagnostics.push(format!("{}: {e}", source.path.display()));
                                continue;
                            }
                        };
                        let mut cx = CheckContext::default();
                        match checker.check(&unit, &mut cx) {
                            Ok(found) => {
                                debug!("{} found {} in {}", spec.name, found.len(), source.path.display());
                                traces.extend(found.into_iter().map(|mut t| {
                                    t.stamp(&spec.name);
                                    t
                                }));
                            }
                            Err(e) => diagnostics.push(format!(
                                "{}: checker {} failed: {e}",
                                source.path.display(),
                                spec.name
                            )),
                        }
                        diagnostics.extend(
                            cx.diagnostics
                                .into_iter()
                                .map(|d| format!("{}: {}: {d}", source.path.display(), spec.name)),
                        );
                    }
                    (traces, diagnostics)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("checker thread panicked"))
            .collect()
    });

    let mut traces = Vec::new();
    let mut diagnostics = BTreeSet::new();
    for (t, d) in per_checker {
        traces.extend(t);
        diagnostics.extend(d);
    }
    traces.retain(|t| t.importance >= job.min_importance);
    normalize(&mut traces);
    traces.dedup();
    JobResult {
        traces,
        diagnostics: diagnostics.into_iter().collect(),
    }
}

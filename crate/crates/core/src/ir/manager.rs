use std::collections::{HashMap, VecDeque};
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard};

use log::debug;

use crate::config::SourceDescriptor;
use crate::frontend::{self, FrontendError};

use super::unit::TranslationUnit;
use super::IrError;

/// How many translation units may be resident at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MemoryBudget {
    #[default]
    Unlimited,
    Units(NonZeroUsize),
}

impl MemoryBudget {
    pub fn units(n: usize) -> Option<MemoryBudget> {
        NonZeroUsize::new(n).map(MemoryBudget::Units)
    }

    fn admits(self, resident: usize) -> bool {
        match self {
            MemoryBudget::Unlimited => true,
            MemoryBudget::Units(n) => resident <= n.get(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum UnitError {
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Ir(#[from] IrError),
    #[error("{0} is not a source of this job")]
    UnknownSource(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ManagerStats {
    /// Times the preprocess/parse/build pipeline ran.
    pub pipeline_runs: u64,
    /// Total evicted units.
    pub evictions: u64,
    /// Largest resident count observed at the return of any operation.
    pub peak_resident: usize,
}

#[derive(Default)]
struct State {
    /// Least recently used first.
    resident: VecDeque<(PathBuf, Arc<TranslationUnit>)>,
    access_clock: u64,
    stats: ManagerStats,
}

/// Lazily builds translation units on first access and keeps at most
/// `budget` of them, evicting the least recently used whole unit.
///
/// Evicted units are dropped, not spilled; a later access re-runs the
/// pipeline. Units already handed out stay valid because callers hold
/// their own `Arc`.
pub struct UnitManager {
    sources: HashMap<PathBuf, SourceDescriptor>,
    budget: MemoryBudget,
    state: Mutex<State>,
}

impl UnitManager {
    pub fn new(sources: impl IntoIterator<Item = SourceDescriptor>, budget: MemoryBudget) -> Self {
        Self {
            sources: sources.into_iter().map(|s| (s.path.clone(), s)).collect(),
            budget,
            state: Mutex::new(State::default()),
        }
    }

    pub fn budget(&self) -> MemoryBudget {
        self.budget
    }

    fn lock(&self) -> MutexGuard<'_, State> {
        self.state.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
    }

    /// Returns the unit for `path`, building it if it is not resident.
    pub fn get_unit(&self, path: &Path) -> Result<Arc<TranslationUnit>, UnitError> {
        let desc = self
            .sources
            .get(path)
            .ok_or_else(|| UnitError::UnknownSource(path.to_path_buf()))?;
        let mut state = self.lock();
        state.access_clock += 1;
        if let Some(pos) = state.resident.iter().position(|(p, _)| p == path) {
            let entry = state.resident.remove(pos).expect("position is in range");
            let unit = Arc::clone(&entry.1);
            state.resident.push_back(entry);
            return Ok(unit);
        }
        debug!("building unit {}", path.display());
        state.stats.pipeline_runs += 1;
        let unit = Arc::new(build_unit(desc)?);
        state.resident.push_back((path.to_path_buf(), Arc::clone(&unit)));
        Self::evict(&mut state, self.budget);
        Ok(unit)
    }

    /// Evicts least recently used units until the budget holds.
    pub fn evict_if_needed(&self) -> Vec<PathBuf> {
        let mut state = self.lock();
        Self::evict(&mut state, self.budget)
    }

    fn evict(state: &mut State, budget: MemoryBudget) -> Vec<PathBuf> {
        let mut evicted = Vec::new();
        while !budget.admits(state.resident.len()) {
            let (path, _) = state.resident.pop_front().expect("over budget implies non-empty");
            debug!("evicting unit {}", path.display());
            evicted.push(path);
        }
        state.stats.evictions += evicted.len() as u64;
        state.stats.peak_resident = state.stats.peak_resident.max(state.resident.len());
        evicted
    }

    /// Resident paths, least recently used first.
    pub fn resident(&self) -> Vec<PathBuf> {
        self.lock().resident.iter().map(|(p, _)| p.clone()).collect()
    }

    pub fn stats(&self) -> ManagerStats {
        self.lock().stats
    }
}

/// Runs the full pipeline for one source: preprocess, parse, build CFGs
/// and the call graph.
pub fn build_unit(desc: &SourceDescriptor) -> Result<TranslationUnit, UnitError> {
    let text = frontend::preprocess(desc)?;
    let ast = frontend::parse(&text, &desc.path.to_string_lossy())?;
    Ok(TranslationUnit::build(&desc.path, ast)?)
}

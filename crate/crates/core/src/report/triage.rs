use std::collections::{BTreeMap, BTreeSet};
use std::fs::{File, OpenOptions};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use log::warn;

use super::{ErrorTrace, Triage};

#[derive(Debug, thiserror::Error)]
pub enum TriageError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed journal line")]
    Malformed { path: PathBuf, line: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriageMark {
    pub status: Triage,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

/// Triage marks backed by an append-only journal of
/// `id<TAB>status<TAB>timestamp` lines. The latest mark for an id wins.
#[derive(Debug)]
pub struct TriageDb {
    journal: PathBuf,
    marks: BTreeMap<String, TriageMark>,
}

impl TriageDb {
    /// Opens the journal at `journal`, replaying it if it exists.
    pub fn open(journal: impl Into<PathBuf>) -> Result<TriageDb, TriageError> {
        let journal = journal.into();
        let marks = match std::fs::read_to_string(&journal) {
            Ok(text) => replay(&journal, &text)?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(source) => return Err(TriageError::Io { path: journal, source }),
        };
        Ok(TriageDb { journal, marks })
    }

    /// A database that is never persisted.
    pub fn empty() -> TriageDb {
        TriageDb {
            journal: PathBuf::new(),
            marks: BTreeMap::new(),
        }
    }

    pub fn path(&self) -> &Path {
        &self.journal
    }

    pub fn status(&self, id: &str) -> Triage {
        self.marks.get(id).map_or(Triage::Unclassified, |m| m.status)
    }

    pub fn marks(&self) -> &BTreeMap<String, TriageMark> {
        &self.marks
    }

    /// Appends a mark under an exclusive file lock. An id outside `known`
    /// is recorded anyway but logged as a warning; the return value tells
    /// whether that happened.
    pub fn mark(
        &mut self,
        id: &str,
        status: Triage,
        known: Option<&BTreeSet<String>>,
    ) -> Result<bool, TriageError> {
        let unknown = known.is_some_and(|k| !k.contains(id));
        if unknown {
            warn!("{id} is not in the current report; recording the mark anyway");
        }
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        let io = |source| TriageError::Io {
            path: self.journal.clone(),
            source,
        };
        let mut file: File = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.journal)
            .map_err(io)?;
        file.lock().map_err(io)?;
        let written = writeln!(file, "{id}\t{status}\t{timestamp}");
        let _ = file.unlock();
        written.map_err(io)?;
        self.marks
            .insert(id.to_string(), TriageMark { status, timestamp });
        Ok(unknown)
    }

    /// Copies each trace's mark into its `triage` field.
    pub fn apply(&self, traces: &mut [ErrorTrace]) {
        for t in traces {
            t.triage = self.status(&t.id);
        }
    }
}

fn replay(path: &Path, text: &str) -> Result<BTreeMap<String, TriageMark>, TriageError> {
    let mut marks = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let malformed = || TriageError::Malformed {
            path: path.to_path_buf(),
            line: i + 1,
        };
        let mut parts = line.split('\t');
        let (Some(id), Some(status), Some(ts), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(malformed());
        };
        let status: Triage = status.parse().map_err(|_| malformed())?;
        let timestamp: u64 = ts.parse().map_err(|_| malformed())?;
        marks.insert(id.to_string(), TriageMark { status, timestamp });
    }
    Ok(marks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn last_mark_wins_and_replays() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("triage.tsv");
        let mut db = TriageDb::open(&path).unwrap();
        assert_eq!(db.status("X"), Triage::Unclassified);
        db.mark("X", Triage::RealBug, None).unwrap();
        db.mark("X", Triage::FalsePositive, None).unwrap();
        assert_eq!(db.status("X"), Triage::FalsePositive);
        let again = TriageDb::open(&path).unwrap();
        assert_eq!(again.marks(), db.marks());
        assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 2);
    }

    #[test]
    fn unknown_id_is_still_journaled() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("triage.tsv");
        let mut db = TriageDb::open(&path).unwrap();
        let known: BTreeSet<String> = ["A".to_string()].into();
        assert!(!db.mark("A", Triage::RealBug, Some(&known)).unwrap());
        assert!(db.mark("B", Triage::RealBug, Some(&known)).unwrap());
        assert_eq!(TriageDb::open(&path).unwrap().status("B"), Triage::RealBug);
    }

    #[test]
    fn malformed_journal() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("triage.tsv");
        std::fs::write(&path, "A\treal\n").unwrap();
        assert!(matches!(TriageDb::open(&path), Err(TriageError::Malformed { line: 1, .. })));
        std::fs::write(&path, "A\tmaybe\t1\n").unwrap();
        assert!(TriageDb::open(&path).is_err());
    }
}

//! Error traces and what happens to them after checking: export, triage
//! marks and false-positive statistics.

mod export;
mod stats;
mod triage;

use std::fmt;
use std::str::FromStr;

use clap::ValueEnum;
use sha2::{Digest, Sha256};

use crate::frontend::SourceLocation;

pub use export::{export, parse_json, ParseError};
pub use stats::{format_ratio, statistics, CheckerStats, Statistics};
pub use triage::{TriageDb, TriageError, TriageMark};

/// Ordered so that `Warning < Error`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, ValueEnum)]
pub enum Importance {
    #[default]
    Warning,
    Error,
}

impl Importance {
    pub fn as_str(self) -> &'static str {
        match self {
            Importance::Warning => "warning",
            Importance::Error => "error",
        }
    }
}

impl fmt::Display for Importance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub enum Triage {
    #[default]
    Unclassified,
    RealBug,
    FalsePositive,
}

impl Triage {
    pub fn as_str(self) -> &'static str {
        match self {
            Triage::Unclassified => "unclassified",
            Triage::RealBug => "real",
            Triage::FalsePositive => "false-positive",
        }
    }
}

impl fmt::Display for Triage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown triage status `{0}` (expected real or false-positive)")]
pub struct UnknownStatus(pub String);

impl FromStr for Triage {
    type Err = UnknownStatus;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "real" | "real-bug" => Ok(Triage::RealBug),
            "false-positive" => Ok(Triage::FalsePositive),
            "unclassified" => Ok(Triage::Unclassified),
            _ => Err(UnknownStatus(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TraceStep {
    pub location: SourceLocation,
    pub description: String,
}

impl TraceStep {
    pub fn new(location: SourceLocation, description: impl Into<String>) -> Self {
        Self {
            location,
            description: description.into(),
        }
    }
}

/// A checker verdict with the path that demonstrates it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ErrorTrace {
    pub id: String,
    pub checker: String,
    pub importance: Importance,
    pub message: String,
    /// Never empty; the last step is where the error is reported.
    pub steps: Vec<TraceStep>,
    pub triage: Triage,
}

impl ErrorTrace {
    /// # Panics
    /// If `steps` is empty.
    pub fn new(
        checker: impl Into<String>,
        importance: Importance,
        message: impl Into<String>,
        steps: Vec<TraceStep>,
    ) -> Self {
        assert!(!steps.is_empty(), "an error trace needs at least one step");
        let mut t = Self {
            id: String::new(),
            checker: checker.into(),
            importance,
            message: message.into(),
            steps,
            triage: Triage::Unclassified,
        };
        t.id = t.compute_id();
        t
    }

    /// Sets the checker name and recomputes the id.
    pub fn stamp(&mut self, checker: &str) {
        self.checker = checker.to_string();
        self.id = self.compute_id();
    }

    /// Hash of checker, message and step locations; 16 hex digits.
    pub fn compute_id(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.checker.as_bytes());
        h.update([0]);
        h.update(self.message.as_bytes());
        for s in &self.steps {
            h.update([0]);
            h.update(s.location.to_string().as_bytes());
        }
        h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn location(&self) -> &SourceLocation {
        &self.steps.last().expect("steps are never empty").location
    }

    /// Report order: file, line, checker, then the rest for a total order.
    pub fn sort_key(&self) -> (&str, u32, &str, u32, &str, &str) {
        let l = self.location();
        (&l.file, l.line, &self.checker, l.column, &self.message, &self.id)
    }
}

/// Sorts traces into report order.
pub fn normalize(traces: &mut [ErrorTrace]) {
    traces.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loc(line: u32) -> SourceLocation {
        SourceLocation::new("a.c", line, 1)
    }

    #[test]
    fn id_depends_on_content_only() {
        let a = ErrorTrace::new("reach", Importance::Error, "unreachable", vec![TraceStep::new(loc(3), "x")]);
        let b = ErrorTrace::new("reach", Importance::Error, "unreachable", vec![TraceStep::new(loc(3), "other text")]);
        assert_eq!(a.id, b.id);
        assert_eq!(a.id.len(), 16);
        let c = ErrorTrace::new("reach", Importance::Error, "unreachable", vec![TraceStep::new(loc(4), "x")]);
        assert_ne!(a.id, c.id);
        let mut d = a.clone();
        d.stamp("automaton");
        assert_ne!(a.id, d.id);
    }

    #[test]
    fn triage_tokens() {
        assert_eq!("real".parse::<Triage>().unwrap(), Triage::RealBug);
        assert_eq!("false-positive".parse::<Triage>().unwrap(), Triage::FalsePositive);
        assert!("maybe".parse::<Triage>().is_err());
    }

    #[test]
    fn importance_order() {
        assert!(Importance::Warning < Importance::Error);
    }
}

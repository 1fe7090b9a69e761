use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{ErrorTrace, Triage, TriageDb};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckerStats {
    pub found: u64,
    pub real: u64,
    pub false_positive: u64,
    pub unclassified: u64,
}

impl CheckerStats {
    /// Real bugs among classified reports, as "x.y%", or "n/a" when none
    /// are classified.
    pub fn ratio(&self) -> String {
        format_ratio(self.real, self.real + self.false_positive)
    }
}

/// `numerator / denominator` as a percentage with one decimal, rounded
/// half up, computed in integers.
pub fn format_ratio(numerator: u64, denominator: u64) -> String {
    if denominator == 0 {
        return "n/a".to_string();
    }
    let tenths = (2000 * numerator + denominator) / (2 * denominator);
    format!("{}.{}%", tenths / 10, tenths % 10)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Statistics {
    pub per_checker: BTreeMap<String, CheckerStats>,
    pub total: CheckerStats,
    /// (checker, message) to number of reports.
    pub frequency: BTreeMap<(String, String), u64>,
}

impl Statistics {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<12} {:>6} {:>6} {:>6} {:>6} {:>7}",
            "checker", "found", "real", "fp", "open", "ratio"
        );
        let row = |out: &mut String, name: &str, s: &CheckerStats| {
            let _ = writeln!(
                out,
                "{:<12} {:>6} {:>6} {:>6} {:>6} {:>7}",
                name,
                s.found,
                s.real,
                s.false_positive,
                s.unclassified,
                s.ratio()
            );
        };
        for (name, s) in &self.per_checker {
            row(&mut out, name, s);
        }
        row(&mut out, "total", &self.total);
        if !self.frequency.is_empty() {
            out.push_str("\nmost frequent messages:\n");
            let mut freq: Vec<_> = self.frequency.iter().collect();
            freq.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
            for ((checker, message), n) in freq {
                let _ = writeln!(out, "{n:>6}  [{checker}] {message}");
            }
        }
        out
    }
}

/// Per-checker counts, with triage status taken from `db`.
pub fn statistics(traces: &[ErrorTrace], db: &TriageDb) -> Statistics {
    let mut stats = Statistics::default();
    for t in traces {
        let entry = stats.per_checker.entry(t.checker.clone()).or_default();
        for s in [&mut *entry, &mut stats.total] {
            s.found += 1;
            match db.status(&t.id) {
                Triage::RealBug => s.real += 1,
                Triage::FalsePositive => s.false_positive += 1,
                Triage::Unclassified => s.unclassified += 1,
            }
        }
        *stats
            .frequency
            .entry((t.checker.clone(), t.message.clone()))
            .or_default() += 1;
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_rounding() {
        assert_eq!(format_ratio(31, 31), "100.0%");
        assert_eq!(format_ratio(6, 13), "46.2%");
        assert_eq!(format_ratio(0, 0), "n/a");
        assert_eq!(format_ratio(1, 8), "12.5%");
        // 1/16 = 6.25% rounds half up
        assert_eq!(format_ratio(1, 16), "6.3%");
        assert_eq!(format_ratio(0, 5), "0.0%");
    }

    #[test]
    fn counts_from_db() {
        use crate::frontend::SourceLocation;
        use crate::report::{Importance, TraceStep};
        let mk = |line| {
            ErrorTrace::new(
                "reach",
                Importance::Error,
                "unreachable code",
                vec![TraceStep::new(SourceLocation::new("a.c", line, 1), "x")],
            )
        };
        let traces = vec![mk(1), mk(2), mk(3)];
        let dir = tempfile::tempdir().unwrap();
        let mut db = TriageDb::open(dir.path().join("t.tsv")).unwrap();
        db.mark(&traces[0].id, Triage::RealBug, None).unwrap();
        db.mark(&traces[1].id, Triage::FalsePositive, None).unwrap();
        let s = statistics(&traces, &db);
        let r = &s.per_checker["reach"];
        assert_eq!((r.found, r.real, r.false_positive, r.unclassified), (3, 1, 1, 1));
        assert_eq!(r.ratio(), "50.0%");
        assert_eq!(s.frequency[&("reach".into(), "unreachable code".into())], 3);
        assert!(s.render().contains("reach"));
    }
}

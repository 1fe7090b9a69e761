//! Statistical lock checking: if a variable is accessed with some lock held
//! often enough, the accesses without it are suspicious.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{events, lock_patterns, CheckContext, Checker, CheckerDescriptor, CheckerError, LockPair};
use crate::config::directive::{parse_directives, Word};
use crate::frontend::SourceLocation;
use crate::ir::{Function, NodeId, TranslationUnit};
use crate::pattern::Pattern;
use crate::report::{ErrorTrace, Importance, TraceStep};

/// A fraction `num / den` kept exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub const DEFAULT_THRESHOLD: Ratio = Ratio { num: 7, den: 10 };

    /// Parses a decimal such as `0.7` or `1`; must lie in (0, 1].
    pub fn parse_decimal(s: &str) -> Option<Ratio> {
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty()
            || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
            || frac.len() > 9
        {
            return None;
        }
        let den = 10u64.pow(frac.len() as u32);
        let num = int.parse::<u64>().unwrap_or(0).checked_mul(den)? + frac.parse::<u64>().unwrap_or(0);
        (num > 0 && num <= den).then_some(Ratio { num, den })
    }

    /// `part / whole >= self`.
    pub fn reached_by(self, part: u64, whole: u64) -> bool {
        part as u128 * self.den as u128 >= self.num as u128 * whole as u128
    }
}

#[derive(Debug, Clone)]
pub struct LockstatConfig {
    pub access: Vec<Pattern>,
    pub locks: Vec<LockPair>,
    pub threshold: Ratio,
    pub min_samples: u64,
}

impl Default for LockstatConfig {
    fn default() -> Self {
        Self {
            access: vec![Pattern::parse("access0", "%V = %E").expect("valid")],
            locks: LockPair::defaults(),
            threshold: Ratio::DEFAULT_THRESHOLD,
            min_samples: 5,
        }
    }
}

impl LockstatConfig {
    /// Lines: `access "T"`, `lock "T" unlock "T"`, `threshold 0.7`,
    /// `min-samples 5`. Access or lock lines replace the defaults.
    pub fn parse(text: &str) -> Result<LockstatConfig, CheckerError> {
        let bad = |line: usize, m: &str| CheckerError::Config(format!("line {line}: {m}"));
        let mut config = LockstatConfig::default();
        let mut access = Vec::new();
        let mut locks = Vec::new();
        for d in parse_directives(text).map_err(|e| CheckerError::Config(e.to_string()))? {
            match d.words.as_slice() {
                [Word::Bare(k), Word::Quoted(t)] if k == "access" => access.push(
                    Pattern::parse(&format!("access{}", access.len()), t)
                        .map_err(|e| bad(d.line, &e.to_string()))?,
                ),
                [Word::Bare(l), Word::Quoted(a), Word::Bare(u), Word::Quoted(b)]
                    if l == "lock" && u == "unlock" =>
                {
                    locks.push(LockPair::new(locks.len(), a, b)?)
                }
                [Word::Bare(k), Word::Bare(v)] if k == "threshold" => {
                    config.threshold =
                        Ratio::parse_decimal(v).ok_or_else(|| bad(d.line, "threshold must be in (0, 1]"))?
                }
                [Word::Bare(k), Word::Bare(v)] if k == "min-samples" => {
                    config.min_samples = v.parse().map_err(|_| bad(d.line, "min-samples must be an integer"))?
                }
                _ => return Err(bad(d.line, "unrecognised directive")),
            }
        }
        if !access.is_empty() {
            config.access = access;
        }
        if !locks.is_empty() {
            config.locks = locks;
        }
        Ok(config)
    }
}

/// One access to a variable and the locks certainly held there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Access {
    pub variable: String,
    pub location: SourceLocation,
    pub held: BTreeSet<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairStats {
    pub locked: u64,
    pub total: u64,
    pub unlocked_sites: Vec<SourceLocation>,
}

/// (variable, lock) to counts. Only locks held during at least one access
/// to the variable appear.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AccessStats {
    pub pairs: BTreeMap<(String, String), PairStats>,
}

/// Locks held on every path to each node of `f`, evaluated before the
/// node. Nodes unreachable from entry are absent.
pub fn must_hold(f: &Function, locks: &[LockPair]) -> BTreeMap<NodeId, BTreeSet<String>> {
    let patterns = lock_patterns(locks);
    let cfg = &f.cfg;
    let mut input: BTreeMap<NodeId, BTreeSet<String>> = BTreeMap::from([(cfg.entry, BTreeSet::new())]);
    let mut queue = VecDeque::from([cfg.entry]);
    while let Some(n) = queue.pop_front() {
        let mut held = input[&n].clone();
        apply_locks(&events(cfg.node(n), &patterns), &mut held);
        for e in cfg.successors(n) {
            let next = match input.get(&e.target) {
                Some(old) => old.intersection(&held).cloned().collect(),
                None => held.clone(),
            };
            if input.get(&e.target) != Some(&next) {
                input.insert(e.target, next);
                queue.push_back(e.target);
            }
        }
    }
    input
}

fn apply_locks(evs: &[super::Event], held: &mut BTreeSet<String>) {
    for e in evs {
        if e.pattern % 2 == 0 {
            held.insert(super::lock_name(&e.binding));
        } else {
            held.remove(&super::lock_name(&e.binding));
        }
    }
}

fn variable_of(pattern: &Pattern, binding: &crate::pattern::Binding) -> Option<String> {
    let name = if binding.get("V").is_some() {
        "V".to_string()
    } else {
        pattern.metavariables().into_iter().next()?
    };
    binding.get(&name).map(|n| n.to_source())
}

/// Every access in the unit with the must-hold lockset at that point.
pub fn accesses(unit: &TranslationUnit, config: &LockstatConfig) -> Vec<Access> {
    let lock_pats = lock_patterns(&config.locks);
    let mut all = lock_pats.clone();
    all.extend(config.access.iter().cloned());
    let mut out = Vec::new();
    for f in &unit.functions {
        for (id, before) in must_hold(f, &config.locks) {
            let node = f.cfg.node(id);
            let evs = events(node, &all);
            let mut held = before;
            for e in &evs {
                if e.pattern < lock_pats.len() {
                    if e.pattern % 2 == 0 {
                        held.insert(super::lock_name(&e.binding));
                    } else {
                        held.remove(&super::lock_name(&e.binding));
                    }
                } else {
                    let pattern = &config.access[e.pattern - lock_pats.len()];
                    if let Some(variable) = variable_of(pattern, &e.binding) {
                        out.push(Access {
                            variable,
                            location: e.node.location.clone(),
                            held: held.clone(),
                        });
                    }
                }
            }
        }
    }
    out
}

/// Counts, for each variable and each lock ever held while it was
/// accessed, how many of its accesses happened under that lock.
pub fn accumulate(accesses: &[Access]) -> AccessStats {
    let mut seen: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for a in accesses {
        seen.entry(&a.variable)
            .or_default()
            .extend(a.held.iter().map(String::as_str));
    }
    let mut stats = AccessStats::default();
    for a in accesses {
        for lock in &seen[a.variable.as_str()] {
            let p = stats
                .pairs
                .entry((a.variable.clone(), lock.to_string()))
                .or_default();
            p.total += 1;
            if a.held.contains(*lock) {
                p.locked += 1;
            } else {
                p.unlocked_sites.push(a.location.clone());
            }
        }
    }
    stats
}

/// Whether a (locked, total) pair is reported.
pub fn is_imbalanced(locked: u64, total: u64, threshold: Ratio, min_samples: u64) -> bool {
    total >= min_samples && locked < total && threshold.reached_by(locked, total)
}

pub fn report_imbalance(stats: &AccessStats, threshold: Ratio, min_samples: u64) -> Vec<ErrorTrace> {
    let mut out = Vec::new();
    for ((variable, lock), p) in &stats.pairs {
        if !is_imbalanced(p.locked, p.total, threshold, min_samples) {
            continue;
        }
        let message = format!(
            "variable {variable} accessed without lock {lock} held; {lock} held at {} of {} accesses",
            p.locked, p.total
        );
        for site in &p.unlocked_sites {
            out.push(ErrorTrace::new(
                String::new(),
                Importance::Error,
                message.clone(),
                vec![TraceStep::new(site.clone(), format!("{variable} accessed, {lock} not held"))],
            ));
        }
    }
    out
}

pub struct LockstatChecker {
    config: LockstatConfig,
}

impl LockstatChecker {
    pub fn new(config: LockstatConfig) -> Self {
        Self { config }
    }
}

impl Checker for LockstatChecker {
    fn check(
        &mut self,
        unit: &TranslationUnit,
        _cx: &mut CheckContext,
    ) -> Result<Vec<ErrorTrace>, CheckerError> {
        let stats = accumulate(&accesses(unit, &self.config));
        Ok(report_imbalance(&stats, self.config.threshold, self.config.min_samples))
    }
}

pub fn descriptor() -> CheckerDescriptor {
    CheckerDescriptor {
        name: "lockstat".into(),
        config_schema: "access \"TEMPLATE\" (metavariable %V names the variable) / \
                        lock \"TEMPLATE\" unlock \"TEMPLATE\" / threshold 0.7 / min-samples 5"
            .into(),
        instantiate: |config| {
            let config = match config {
                Some(text) => LockstatConfig::parse(text)?,
                None => LockstatConfig::default(),
            };
            Ok(Box::new(LockstatChecker::new(config)))
        },
    }
}

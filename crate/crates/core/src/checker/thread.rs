//! Deadlock detection. For each thread entry a may-hold lockset analysis
//! yields lock-order edges `A <- B` (B taken while A held); the union of
//! all edges is searched for cycles.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use super::{
    events, lock_name, lock_patterns, to_root, CheckContext, Checker, CheckerDescriptor,
    CheckerError, LockPair,
};
use crate::config::directive::{parse_directives, Word};
use crate::frontend::{AstKind, SourceLocation, UnaryOp};
use crate::ir::TranslationUnit;
use crate::pattern::Pattern;
use crate::report::{ErrorTrace, Importance, TraceStep};
use crate::traverse::{Point, Supergraph};

const MAX_CALL_DEPTH: usize = 16;
pub const DEFAULT_CYCLE_CAP: usize = 1000;

#[derive(Debug, Clone)]
pub struct ThreadConfig {
    pub spawn: Vec<Pattern>,
    pub entries: Vec<String>,
    pub locks: Vec<LockPair>,
    pub cycle_cap: usize,
}

impl Default for ThreadConfig {
    fn default() -> Self {
        Self {
            spawn: vec![Pattern::parse("spawn0", "pthread_create(%A, %B, %F, %D)").expect("valid")],
            entries: Vec::new(),
            locks: LockPair::defaults(),
            cycle_cap: DEFAULT_CYCLE_CAP,
        }
    }
}

impl ThreadConfig {
    /// Lines: `spawn "T"` (%F marks the thread function), `entry NAME`,
    /// `lock "T" unlock "T"`. Spawn or lock lines replace the defaults.
    pub fn parse(text: &str) -> Result<ThreadConfig, CheckerError> {
        let bad = |line: usize, m: &str| CheckerError::Config(format!("line {line}: {m}"));
        let mut config = ThreadConfig::default();
        let mut spawn = Vec::new();
        let mut locks = Vec::new();
        for d in parse_directives(text).map_err(|e| CheckerError::Config(e.to_string()))? {
            match d.words.as_slice() {
                [Word::Bare(k), Word::Quoted(t)] if k == "spawn" => {
                    let p = Pattern::parse(&format!("spawn{}", spawn.len()), t)
                        .map_err(|e| bad(d.line, &e.to_string()))?;
                    if !p.metavariables().iter().any(|m| m == "F") {
                        return Err(bad(d.line, "spawn template must use %F"));
                    }
                    spawn.push(p);
                }
                [Word::Bare(k), Word::Bare(n)] if k == "entry" => config.entries.push(n.clone()),
                [Word::Bare(l), Word::Quoted(a), Word::Bare(u), Word::Quoted(b)]
                    if l == "lock" && u == "unlock" =>
                {
                    locks.push(LockPair::new(locks.len(), a, b)?)
                }
                _ => return Err(bad(d.line, "unrecognised directive")),
            }
        }
        if !spawn.is_empty() {
            config.spawn = spawn;
        }
        if !locks.is_empty() {
            config.locks = locks;
        }
        Ok(config)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntryOrigin {
    Spawn,
    Config,
    /// No spawn sites and no configured entries: every function counts.
    Default,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreadEntry {
    pub function: String,
    pub origin: EntryOrigin,
}

/// Functions that may run as threads.
pub fn find_thread_entries(
    unit: &TranslationUnit,
    config: &ThreadConfig,
    cx: &mut CheckContext,
) -> Vec<ThreadEntry> {
    let mut out: Vec<ThreadEntry> = Vec::new();
    let push = |out: &mut Vec<ThreadEntry>, name: &str, origin| {
        if !out.iter().any(|e| e.function == name) {
            out.push(ThreadEntry {
                function: name.to_string(),
                origin,
            });
        }
    };
    for f in &unit.functions {
        for node in f.cfg.nodes() {
            for e in events(node, &config.spawn) {
                let Some(target) = e.binding.get("F") else { continue };
                let name = match target.kind {
                    AstKind::Identifier => &target.text,
                    AstKind::UnaryOp(UnaryOp::AddrOf) if target.children[0].kind == AstKind::Identifier => {
                        &target.children[0].text
                    }
                    _ => continue,
                };
                if unit.function(name).is_some() {
                    push(&mut out, name, EntryOrigin::Spawn);
                }
            }
        }
    }
    for name in &config.entries {
        if unit.function(name).is_some() {
            push(&mut out, name, EntryOrigin::Config);
        } else {
            cx.diagnostic(format!("thread entry {name} is not defined in this unit"));
        }
    }
    if out.is_empty() {
        for f in &unit.functions {
            push(&mut out, &f.name, EntryOrigin::Default);
        }
    }
    out
}

/// Why an edge exists: in `entry`, `from` was taken at `held_at` and still
/// held when `to` was taken at `taken_at`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Witness {
    pub entry: String,
    pub held_at: SourceLocation,
    pub taken_at: SourceLocation,
}

/// Lock-order edges `(A, B)`: B acquired while A held.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LockOrderGraph {
    pub edges: BTreeMap<(String, String), BTreeSet<Witness>>,
}

impl LockOrderGraph {
    pub fn add(&mut self, from: &str, to: &str, w: Witness) {
        self.edges
            .entry((from.to_string(), to.to_string()))
            .or_default()
            .insert(w);
    }

    pub fn merge(&mut self, other: &LockOrderGraph) {
        for (k, ws) in &other.edges {
            self.edges.entry(k.clone()).or_default().extend(ws.iter().cloned());
        }
    }

    pub fn nodes(&self) -> BTreeSet<&str> {
        self.edges
            .keys()
            .flat_map(|(a, b)| [a.as_str(), b.as_str()])
            .collect()
    }

    pub fn successors(&self, a: &str) -> Vec<&str> {
        self.edges
            .keys()
            .filter(|(x, _)| x == a)
            .map(|(_, b)| b.as_str())
            .collect()
    }
}

/// Held lock to where it was (earliest) acquired.
type LockSet = BTreeMap<String, SourceLocation>;

struct LockEvent {
    acquire: bool,
    lock: String,
    location: SourceLocation,
}

fn join_into(into: &mut LockSet, from: &LockSet) -> bool {
    let mut changed = false;
    for (k, loc) in from {
        match into.get(k) {
            Some(old) if old <= loc => {}
            _ => {
                into.insert(k.clone(), loc.clone());
                changed = true;
            }
        }
    }
    changed
}

/// May-hold analysis from one entry, descending into callees in the unit.
pub fn build_dependency_graph(
    entry: &ThreadEntry,
    unit: &TranslationUnit,
    config: &ThreadConfig,
) -> LockOrderGraph {
    let mut graph = LockOrderGraph::default();
    let Some(f) = unit.function(&entry.function) else {
        return graph;
    };
    let patterns = lock_patterns(&config.locks);
    let mut sg = Supergraph::new(unit, f, true, MAX_CALL_DEPTH);
    let mut cache: HashMap<Point, Vec<LockEvent>> = HashMap::new();
    let mut lock_events = |sg: &Supergraph<'_>, p: Point| -> Vec<(bool, String, SourceLocation)> {
        cache
            .entry(p)
            .or_insert_with(|| {
                events(sg.node(p), &patterns)
                    .into_iter()
                    .map(|e| LockEvent {
                        acquire: e.pattern % 2 == 0,
                        lock: lock_name(&to_root(&e.binding, sg.frames(p.ctx))),
                        location: e.node.location.clone(),
                    })
                    .collect()
            })
            .iter()
            .map(|e| (e.acquire, e.lock.clone(), e.location.clone()))
            .collect()
    };

    let start = sg.entry();
    let mut input: HashMap<Point, LockSet> = HashMap::from([(start, LockSet::new())]);
    let mut queue = VecDeque::from([start]);
    let mut queued = HashSet::from([start]);
    while let Some(p) = queue.pop_front() {
        queued.remove(&p);
        let mut held = input[&p].clone();
        for (acquire, lock, loc) in lock_events(&sg, p) {
            if acquire {
                held.entry(lock).or_insert(loc);
            } else {
                held.remove(&lock);
            }
        }
        for (q, _) in sg.successors(p) {
            let changed = match input.get_mut(&q) {
                Some(old) => join_into(old, &held),
                None => {
                    input.insert(q, held.clone());
                    true
                }
            };
            if changed && queued.insert(q) {
                queue.push_back(q);
            }
        }
    }

    let mut points: Vec<Point> = input.keys().copied().collect();
    points.sort();
    for p in points {
        let mut held = input[&p].clone();
        for (acquire, lock, loc) in lock_events(&sg, p) {
            if acquire {
                for (a, held_at) in &held {
                    if *a != lock {
                        graph.add(
                            a,
                            &lock,
                            Witness {
                                entry: entry.function.clone(),
                                held_at: held_at.clone(),
                                taken_at: loc.clone(),
                            },
                        );
                    }
                }
                held.entry(lock).or_insert(loc);
            } else {
                held.remove(&lock);
            }
        }
    }
    graph
}

/// Elementary cycles, each listed from its smallest node, in sorted
/// order, at most `cap` of them.
pub fn elementary_cycles(graph: &LockOrderGraph, cap: usize) -> Vec<Vec<String>> {
    let nodes: Vec<&str> = graph.nodes().into_iter().collect();
    let succ: BTreeMap<&str, Vec<&str>> = nodes.iter().map(|n| (*n, graph.successors(n))).collect();
    let mut out = Vec::new();
    for &s in &nodes {
        // Paths from s through nodes greater than s back to s.
        let mut path = vec![s];
        let mut iters = vec![0usize];
        while let Some(&top) = path.last() {
            let i = iters.last_mut().expect("parallel stacks");
            let next = succ[top].get(*i).copied();
            *i += 1;
            match next {
                None => {
                    path.pop();
                    iters.pop();
                }
                Some(n) if n == s => {
                    out.push(path.iter().map(|x| x.to_string()).collect());
                    if out.len() >= cap {
                        return out;
                    }
                }
                Some(n) if n > s && !path.contains(&n) => {
                    path.push(n);
                    iters.push(0);
                }
                Some(_) => {}
            }
        }
    }
    out
}

/// One trace per cycle in the union of `graphs`.
pub fn detect_cycles(graphs: &[LockOrderGraph], cap: usize) -> Vec<ErrorTrace> {
    let mut all = LockOrderGraph::default();
    for g in graphs {
        all.merge(g);
    }
    elementary_cycles(&all, cap)
        .into_iter()
        .map(|cycle| {
            let mut names = cycle.clone();
            names.push(cycle[0].clone());
            let message = format!("possible deadlock: lock order cycle {}", names.join(" <- "));
            let mut steps = Vec::new();
            for w in names.windows(2) {
                let (a, b) = (&w[0], &w[1]);
                let witness = all.edges[&(a.clone(), b.clone())]
                    .iter()
                    .next()
                    .expect("edges have witnesses");
                steps.push(TraceStep::new(
                    witness.held_at.clone(),
                    format!("{}: {a} acquired", witness.entry),
                ));
                steps.push(TraceStep::new(
                    witness.taken_at.clone(),
                    format!("{}: {b} acquired while {a} held", witness.entry),
                ));
            }
            ErrorTrace::new(String::new(), Importance::Error, message, steps)
        })
        .collect()
}

pub struct ThreadChecker {
    config: ThreadConfig,
}

impl ThreadChecker {
    pub fn new(config: ThreadConfig) -> Self {
        Self { config }
    }
}

impl Checker for ThreadChecker {
    fn check(
        &mut self,
        unit: &TranslationUnit,
        cx: &mut CheckContext,
    ) -> Result<Vec<ErrorTrace>, CheckerError> {
        let graphs: Vec<LockOrderGraph> = find_thread_entries(unit, &self.config, cx)
            .iter()
            .map(|e| build_dependency_graph(e, unit, &self.config))
            .collect();
        Ok(detect_cycles(&graphs, self.config.cycle_cap))
    }
}

pub fn descriptor() -> CheckerDescriptor {
    CheckerDescriptor {
        name: "thread".into(),
        config_schema: "spawn \"TEMPLATE\" (%F is the thread function) / entry NAME / \
                        lock \"TEMPLATE\" unlock \"TEMPLATE\""
            .into(),
        instantiate: |config| {
            let config = match config {
                Some(text) => ThreadConfig::parse(text)?,
                None => ThreadConfig::default(),
            };
            Ok(Box::new(ThreadChecker::new(config)))
        },
    }
}

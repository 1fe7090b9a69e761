//! Finite-state property checking. Pattern matches along CFG paths drive
//! one automaton instance per distinct binding; error transitions and
//! states that are bad at function exit are reported with a witness path.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use super::{events, to_root, CheckContext, Checker, CheckerDescriptor, CheckerError};
use crate::config::directive::{parse_directives, Word};
use crate::frontend::SourceLocation;
use crate::ir::{EdgeLabel, Function, NodeKind, TranslationUnit};
use crate::pattern::{Binding, Pattern};
use crate::report::{ErrorTrace, Importance, TraceStep};
use crate::traverse::{Point, Supergraph};

/// The lock discipline automaton used when no configuration is given.
pub const DEFAULT_AUTOMATON: &str = r#"# U: unlocked, L: locked
automaton locks
states U L
start U
pattern lock "mutex_lock(%X)"
pattern unlock "mutex_unlock(%X)"
transition U lock -> L
transition L unlock -> U
error U unlock "double unlock of %X"
error L lock "double lock of %X"
error-at-exit L "lock %X held at exit"
"#;

const MAX_CALL_DEPTH: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct AutomatonError {
    pub line: usize,
    pub message: String,
}

/// States and patterns are referred to by index.
#[derive(Debug, Clone)]
pub struct PropertyAutomaton {
    pub name: String,
    pub states: Vec<String>,
    pub start: usize,
    pub patterns: Vec<Pattern>,
    /// (state, pattern) to next state.
    pub transitions: BTreeMap<(usize, usize), usize>,
    /// (state, pattern) to message template; the state does not change.
    pub errors: BTreeMap<(usize, usize), String>,
    /// State to message template, reported at function exit.
    pub exit_errors: BTreeMap<usize, String>,
}

impl PropertyAutomaton {
    pub fn parse(text: &str) -> Result<PropertyAutomaton, AutomatonError> {
        let err = |line, message: String| AutomatonError { line, message };
        let directives =
            parse_directives(text).map_err(|e| err(e.line, e.message))?;
        let mut name = None;
        let mut states: Option<(usize, Vec<String>)> = None;
        let mut start = None;
        let mut patterns: Vec<Pattern> = Vec::new();
        // Kept with their line numbers until states and patterns are known.
        let mut transitions = Vec::new();
        let mut errors = Vec::new();
        let mut exit_errors = Vec::new();
        for d in &directives {
            let w: Vec<&str> = d.words.iter().map(Word::as_str).collect();
            let quoted = |i: usize| matches!(d.words.get(i), Some(Word::Quoted(_)));
            match w.as_slice() {
                ["automaton", n] => name = Some(n.to_string()),
                ["states", rest @ ..] => {
                    if states.is_some() {
                        return Err(err(d.line, "states declared twice".into()));
                    }
                    states = Some((d.line, rest.iter().map(|s| s.to_string()).collect()));
                }
                ["start", s] => start = Some((d.line, s.to_string())),
                ["pattern", n, t] if quoted(2) => {
                    if patterns.iter().any(|p| p.name == *n) {
                        return Err(err(d.line, format!("pattern {n} defined twice")));
                    }
                    patterns.push(Pattern::parse(n, t).map_err(|e| err(d.line, e.to_string()))?);
                }
                ["transition", s, p, "->", t] => {
                    transitions.push((d.line, s.to_string(), p.to_string(), t.to_string()))
                }
                ["error", s, p, m] if quoted(3) => {
                    errors.push((d.line, s.to_string(), p.to_string(), m.to_string()))
                }
                ["error-at-exit", s, m] if quoted(2) => {
                    exit_errors.push((d.line, s.to_string(), m.to_string()))
                }
                _ => return Err(err(d.line, format!("unrecognised directive `{}`", w.join(" ")))),
            }
        }
        let (states_line, states) = states.ok_or_else(|| err(0, "missing states".into()))?;
        if states.is_empty() {
            return Err(err(states_line, "no states declared".into()));
        }
        if states.len() > 64 {
            return Err(err(states_line, "at most 64 states are supported".into()));
        }
        for (i, s) in states.iter().enumerate() {
            if states[..i].contains(s) {
                return Err(err(states_line, format!("state {s} declared twice")));
            }
        }
        let state = |line, s: &str| {
            states
                .iter()
                .position(|x| x == s)
                .ok_or_else(|| err(line, format!("unknown state {s}")))
        };
        let pattern = |line, p: &str| {
            patterns
                .iter()
                .position(|x| x.name == p)
                .ok_or_else(|| err(line, format!("unknown pattern {p}")))
        };
        let (start_line, start) = start.ok_or_else(|| err(0, "missing start state".into()))?;
        let start = state(start_line, &start)?;
        let mut seen = BTreeSet::new();
        let mut t_map = BTreeMap::new();
        for (line, s, p, t) in transitions {
            let key = (state(line, &s)?, pattern(line, &p)?);
            if !seen.insert(key) {
                return Err(err(line, format!("duplicate rule for state {s} and pattern {p}")));
            }
            t_map.insert(key, state(line, &t)?);
        }
        let mut e_map = BTreeMap::new();
        for (line, s, p, m) in errors {
            let key = (state(line, &s)?, pattern(line, &p)?);
            if !seen.insert(key) {
                return Err(err(line, format!("duplicate rule for state {s} and pattern {p}")));
            }
            e_map.insert(key, m);
        }
        let mut x_map = BTreeMap::new();
        for (line, s, m) in exit_errors {
            if x_map.insert(state(line, &s)?, m).is_some() {
                return Err(err(line, format!("exit error for {s} given twice")));
            }
        }
        Ok(PropertyAutomaton {
            name: name.unwrap_or_else(|| "automaton".into()),
            states,
            start,
            patterns,
            transitions: t_map,
            errors: e_map,
            exit_errors: x_map,
        })
    }

    pub fn lock_default() -> PropertyAutomaton {
        PropertyAutomaton::parse(DEFAULT_AUTOMATON).expect("built-in automaton is valid")
    }

    /// Where `pattern` takes `state`, and the error message template if
    /// the move is an error.
    pub fn step(&self, state: usize, pattern: usize) -> (usize, Option<&str>) {
        if let Some(m) = self.errors.get(&(state, pattern)) {
            return (state, Some(m));
        }
        (
            *self.transitions.get(&(state, pattern)).unwrap_or(&state),
            None,
        )
    }
}

/// Functions analysed as roots: those no other code in the unit calls,
/// then, for call cycles nothing outside reaches, the first member in
/// source order.
pub fn entry_functions(unit: &TranslationUnit) -> Vec<&Function> {
    let callees_of = |name: &str| -> Vec<&str> {
        unit.call_graph
            .edges
            .iter()
            .filter(|e| e.caller == name)
            .filter_map(|e| match &e.callee {
                crate::ir::Callee::Defined(n) => Some(n.as_str()),
                _ => None,
            })
            .collect()
    };
    let mut roots: Vec<&Function> = unit
        .functions
        .iter()
        .filter(|f| unit.call_graph.callers_of(&f.name).next().is_none())
        .collect();
    let mut reached: HashSet<&str> = HashSet::new();
    let mut stack: Vec<&str> = roots.iter().map(|f| f.name.as_str()).collect();
    loop {
        while let Some(n) = stack.pop() {
            if reached.insert(n) {
                stack.extend(callees_of(n));
            }
        }
        match unit.functions.iter().find(|f| !reached.contains(f.name.as_str())) {
            Some(f) => {
                roots.push(f);
                stack.push(&f.name);
            }
            None => break,
        }
    }
    roots.sort_by_key(|f| unit.functions.iter().position(|g| g.name == f.name));
    roots
}

/// A pattern match at a point, keyed by its instance.
#[derive(Debug, Clone)]
struct KeyedEvent {
    pattern: usize,
    key: String,
    location: SourceLocation,
}

/// Instance key to set of states (bit i = state i). Absent keys are in
/// the start state only; such entries are never stored.
type StateMap = BTreeMap<String, u64>;

struct Analysis<'a, 'u> {
    automaton: &'a PropertyAutomaton,
    graph: Supergraph<'u>,
    succs: HashMap<Point, Vec<(Point, EdgeLabel)>>,
    events: HashMap<Point, Vec<KeyedEvent>>,
    bindings: BTreeMap<String, Binding>,
}

impl<'a, 'u> Analysis<'a, 'u> {
    fn start_mask(&self) -> u64 {
        1 << self.automaton.start
    }

    fn get(&self, m: &StateMap, key: &str) -> u64 {
        m.get(key).copied().unwrap_or(self.start_mask())
    }

    fn put(&self, m: &mut StateMap, key: &str, set: u64) {
        if set == self.start_mask() {
            m.remove(key);
        } else {
            m.insert(key.to_string(), set);
        }
    }

    fn successors(&mut self, p: Point) -> Vec<(Point, EdgeLabel)> {
        if let Some(s) = self.succs.get(&p) {
            return s.clone();
        }
        let s = self.graph.successors(p);
        self.succs.insert(p, s.clone());
        s
    }

    fn events(&mut self, p: Point) -> Vec<KeyedEvent> {
        if let Some(e) = self.events.get(&p) {
            return e.clone();
        }
        let node = self.graph.node(p);
        let frames = self.graph.frames(p.ctx);
        let mut out = Vec::new();
        for e in events(node, &self.automaton.patterns) {
            let binding = to_root(&e.binding, frames);
            let key = binding.key();
            self.bindings.entry(key.clone()).or_insert(binding);
            out.push(KeyedEvent {
                pattern: e.pattern,
                key,
                location: e.node.location.clone(),
            });
        }
        self.events.insert(p, out.clone());
        out
    }

    /// Runs one state of one instance through the events at a node.
    /// Returns the final state and, per event index, any error template.
    fn run(&self, evs: &[KeyedEvent], key: &str, mut state: usize) -> (usize, Vec<(usize, &'a str)>) {
        let mut errs = Vec::new();
        for (i, e) in evs.iter().enumerate().filter(|(_, e)| e.key == key) {
            let (next, err) = self.automaton.step(state, e.pattern);
            if let Some(m) = err {
                errs.push((i, m));
            }
            state = next;
        }
        (state, errs)
    }

    fn transfer(&mut self, p: Point, input: &StateMap) -> StateMap {
        let evs = self.events(p);
        let mut out = input.clone();
        let keys: BTreeSet<&str> = evs.iter().map(|e| e.key.as_str()).collect();
        for key in keys {
            let set = self.get(input, key);
            let mut next = 0u64;
            for s in bits(set) {
                next |= 1 << self.run(&evs, key, s).0;
            }
            self.put(&mut out, key, next);
        }
        out
    }

    fn join(&self, a: &StateMap, b: &StateMap) -> StateMap {
        let mut out = StateMap::new();
        for key in a.keys().chain(b.keys()) {
            let set = self.get(a, key) | self.get(b, key);
            self.put(&mut out, key, set);
        }
        out
    }
}

fn bits(set: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| set & (1 << i) != 0)
}

/// What went wrong, where, and which instance.
#[derive(Debug, Clone)]
struct Finding {
    key: String,
    message: String,
    point: Point,
    /// Event index at `point`, or `None` for an exit error.
    event: Option<usize>,
}

/// Checks every root function of `unit` against `automaton`.
pub fn check_unit(automaton: &PropertyAutomaton, unit: &TranslationUnit) -> Vec<ErrorTrace> {
    let mut traces = Vec::new();
    let mut reported: HashSet<(String, String, SourceLocation)> = HashSet::new();
    for root in entry_functions(unit) {
        let mut a = Analysis {
            automaton,
            graph: Supergraph::new(unit, root, true, MAX_CALL_DEPTH),
            succs: HashMap::new(),
            events: HashMap::new(),
            bindings: BTreeMap::new(),
        };
        let input = fixpoint(&mut a);
        for f in findings(&mut a, &input) {
            let location = a.graph.node(f.point).location.clone();
            if !reported.insert((f.key.clone(), f.message.clone(), location)) {
                continue;
            }
            if let Some(t) = witness(&mut a, &f) {
                traces.push(t);
            }
        }
    }
    traces
}

fn fixpoint(a: &mut Analysis<'_, '_>) -> HashMap<Point, StateMap> {
    let entry = a.graph.entry();
    let mut input: HashMap<Point, StateMap> = HashMap::from([(entry, StateMap::new())]);
    let mut queue = VecDeque::from([entry]);
    let mut queued = HashSet::from([entry]);
    while let Some(p) = queue.pop_front() {
        queued.remove(&p);
        let out = a.transfer(p, &input[&p]);
        for (q, _) in a.successors(p) {
            let joined = match input.get(&q) {
                Some(old) => a.join(old, &out),
                None => out.clone(),
            };
            if input.get(&q) != Some(&joined) {
                input.insert(q, joined);
                if queued.insert(q) {
                    queue.push_back(q);
                }
            }
        }
    }
    input
}

fn findings(a: &mut Analysis<'_, '_>, input: &HashMap<Point, StateMap>) -> Vec<Finding> {
    let mut points: Vec<Point> = input.keys().copied().collect();
    points.sort();
    let mut out = Vec::new();
    for p in points {
        let evs = a.events(p);
        let keys: BTreeSet<String> = evs.iter().map(|e| e.key.clone()).collect();
        for key in keys {
            let binding = a.bindings[&key].clone();
            for s in bits(a.get(&input[&p], &key)) {
                for (i, m) in a.run(&evs, &key, s).1 {
                    out.push(Finding {
                        key: key.clone(),
                        message: binding.expand(m),
                        point: p,
                        event: Some(i),
                    });
                }
            }
        }
    }
    let exit = a.graph.exit();
    if let Some(state) = input.get(&exit) {
        let known: Vec<(String, Binding)> =
            a.bindings.iter().map(|(k, b)| (k.clone(), b.clone())).collect();
        for (key, binding) in known {
            for s in bits(a.get(state, &key)) {
                if let Some(m) = a.automaton.exit_errors.get(&s) {
                    out.push(Finding {
                        key: key.clone(),
                        message: binding.expand(m),
                        point: exit,
                        event: None,
                    });
                }
            }
        }
    }
    out
}

/// Depth-first search over (point, state of the instance) for a path from
/// entry to a configuration that produces the finding.
fn witness(a: &mut Analysis<'_, '_>, f: &Finding) -> Option<ErrorTrace> {
    let start = (a.graph.entry(), a.automaton.start);
    let mut parent: HashMap<(Point, usize), Option<(Point, usize)>> = HashMap::new();
    let mut stack = vec![(start, None)];
    let mut goal = None;
    while let Some((cur, from)) = stack.pop() {
        if parent.contains_key(&cur) {
            continue;
        }
        parent.insert(cur, from);
        let (p, s) = cur;
        let evs = a.events(p);
        if p == f.point && triggers(a, f, &evs, s) {
            goal = Some(cur);
            break;
        }
        let next = a.run(&evs, &f.key, s).0;
        for (q, _) in a.successors(p).into_iter().rev() {
            if !parent.contains_key(&(q, next)) {
                stack.push(((q, next), Some(cur)));
            }
        }
    }
    let mut path = vec![goal?];
    while let Some(Some(prev)) = parent.get(path.last().unwrap()) {
        path.push(*prev);
    }
    path.reverse();
    Some(render(a, f, &path))
}

fn triggers(a: &Analysis<'_, '_>, f: &Finding, evs: &[KeyedEvent], s: usize) -> bool {
    let binding = &a.bindings[&f.key];
    match f.event {
        Some(i) => a
            .run(evs, &f.key, s)
            .1
            .iter()
            .any(|&(j, m)| j == i && binding.expand(m) == f.message),
        None => a
            .automaton
            .exit_errors
            .get(&s)
            .is_some_and(|m| binding.expand(m) == f.message),
    }
}

fn render(a: &mut Analysis<'_, '_>, f: &Finding, path: &[(Point, usize)]) -> ErrorTrace {
    let auto = a.automaton;
    let mut steps = Vec::new();
    for (i, &(p, s)) in path.iter().enumerate() {
        let last = i + 1 == path.len();
        let evs = a.events(p);
        let mut state = s;
        for (j, e) in evs.iter().enumerate().filter(|(_, e)| e.key == f.key) {
            if last && f.event == Some(j) {
                break;
            }
            let (next, _) = auto.step(state, e.pattern);
            steps.push(TraceStep::new(
                e.location.clone(),
                format!(
                    "{}: {} -> {}",
                    auto.patterns[e.pattern].name, auto.states[state], auto.states[next]
                ),
            ));
            state = next;
        }
        if last {
            break;
        }
        let node = a.graph.node(p);
        let (q, _) = path[i + 1];
        if q.ctx != p.ctx && a.graph.frames(q.ctx).len() > a.graph.frames(p.ctx).len() {
            let callee = &a.graph.function(q).name;
            steps.push(TraceStep::new(node.location.clone(), format!("call {callee}")));
        } else if node.kind == NodeKind::Condition {
            let label = a
                .successors(p)
                .into_iter()
                .find(|(t, _)| *t == q)
                .map(|(_, l)| l);
            let branch = match label {
                Some(EdgeLabel::True) => "true",
                Some(EdgeLabel::False) => "false",
                _ => continue,
            };
            steps.push(TraceStep::new(
                node.location.clone(),
                format!("condition `{}` is {branch}", node.label()),
            ));
        }
    }
    let &(p, s) = path.last().expect("path reaches the finding");
    let node = a.graph.node(p);
    let description = match f.event {
        Some(_) => format!("{} (in state {})", f.message, auto.states[s]),
        None => format!("function exit in state {}: {}", auto.states[s], f.message),
    };
    steps.push(TraceStep::new(node.location.clone(), description));
    ErrorTrace::new(String::new(), Importance::Error, f.message.clone(), steps)
}

pub struct AutomatonChecker {
    automaton: Arc<PropertyAutomaton>,
}

impl AutomatonChecker {
    pub fn new(automaton: PropertyAutomaton) -> Self {
        Self {
            automaton: Arc::new(automaton),
        }
    }
}

impl Checker for AutomatonChecker {
    fn check(
        &mut self,
        unit: &TranslationUnit,
        _cx: &mut CheckContext,
    ) -> Result<Vec<ErrorTrace>, CheckerError> {
        Ok(check_unit(&self.automaton, unit))
    }
}

pub fn descriptor() -> CheckerDescriptor {
    CheckerDescriptor {
        name: "automaton".into(),
        config_schema: "automaton NAME / states S... / start S / pattern NAME \"TEMPLATE\" / \
                        transition S PATTERN -> S / error S PATTERN \"MSG\" / \
                        error-at-exit S \"MSG\"; defaults to the mutex lock automaton"
            .into(),
        instantiate: |config| {
            let automaton = match config {
                Some(text) => PropertyAutomaton::parse(text)
                    .map_err(|e| CheckerError::Config(e.to_string()))?,
                None => PropertyAutomaton::lock_default(),
            };
            Ok(Box::new(AutomatonChecker::new(automaton)))
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    fn unit(src: &str) -> TranslationUnit {
        TranslationUnit::build(Path::new("t.c"), crate::frontend::parse(src, "t.c").unwrap()).unwrap()
    }

    fn check(src: &str) -> Vec<ErrorTrace> {
        check_unit(&PropertyAutomaton::lock_default(), &unit(src))
    }

    #[test]
    fn loads_lock_automaton() {
        let a = PropertyAutomaton::lock_default();
        assert_eq!(a.states, vec!["U", "L"]);
        assert_eq!(a.start, 0);
        assert_eq!(a.patterns.len(), 2);
        assert_eq!(a.step(0, 0), (1, None));
        assert_eq!(a.step(0, 1), (0, Some("double unlock of %X")));
        assert_eq!(a.exit_errors[&1], "lock %X held at exit");
    }

    #[test]
    fn load_errors() {
        let base = "states U L\nstart U\npattern lock \"lock(%X)\"\n";
        assert!(PropertyAutomaton::parse(&format!("{base}transition Q lock -> U")).is_err());
        assert!(PropertyAutomaton::parse(&format!("{base}transition U lock -> Q")).is_err());
        assert!(PropertyAutomaton::parse(&format!("{base}transition U nope -> L")).is_err());
        assert!(PropertyAutomaton::parse(&format!(
            "{base}transition U lock -> L\nerror U lock \"x\""
        ))
        .is_err());
        assert!(PropertyAutomaton::parse("states\nstart U").is_err());
        assert!(PropertyAutomaton::parse("states U\n").is_err());
        assert!(PropertyAutomaton::parse("states U\nstart U\nfrobnicate").is_err());
        assert!(PropertyAutomaton::parse("states U\nstart U\n").is_ok());
    }

    #[test]
    fn double_unlock() {
        let t = check("void f(){ mutex_unlock(&m); }");
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].message, "double unlock of &m");
    }

    #[test]
    fn balanced_two_instances() {
        assert!(check("void f(){ mutex_lock(&a); mutex_unlock(&a); mutex_lock(&b); mutex_unlock(&b); }").is_empty());
    }

    #[test]
    fn held_at_exit_on_one_branch() {
        let t = check(
            "int f(int c){ mutex_lock(&m); if (c) return 1; mutex_unlock(&m); return 0; }",
        );
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].message, "lock &m held at exit");
        let d: Vec<_> = t[0].steps.iter().map(|s| s.description.as_str()).collect();
        assert_eq!(d[0], "lock: U -> L");
        assert_eq!(d[1], "condition `c` is true");
        assert!(d[2].starts_with("function exit in state L"));
    }

    #[test]
    fn interprocedural_state_flows_out_of_callee() {
        assert!(check("void g(){ mutex_lock(&m); } void f(){ g(); mutex_unlock(&m); }").is_empty());
    }

    #[test]
    fn callee_keys_are_mapped_to_caller() {
        let t = check("void g(int *p){ mutex_lock(p); } void f(){ g(&m); mutex_lock(&m); mutex_unlock(&m); }");
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].message, "double lock of &m");
        assert!(t[0].steps.iter().any(|s| s.description == "call g"));
    }

    #[test]
    fn loops_reach_fixpoint() {
        let t = check("void f(int n){ while (n) { mutex_lock(&m); } }");
        let msgs: BTreeSet<_> = t.iter().map(|t| t.message.as_str()).collect();
        assert_eq!(msgs, BTreeSet::from(["double lock of &m", "lock &m held at exit"]));
    }

    #[test]
    fn error_at_each_location_reported_once() {
        let t = check("void f(int c){ if (c) mutex_unlock(&m); else mutex_unlock(&m); }");
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn recursion_terminates() {
        let t = check("void f(){ mutex_lock(&m); f(); mutex_unlock(&m); }");
        assert!(t.iter().all(|t| !t.steps.is_empty()));
    }

    #[test]
    fn entry_functions_skip_called_ones() {
        let u = unit("void g(){} void f(){ g(); } void a(){ b(); } void b(){ a(); }");
        let names: Vec<_> = entry_functions(&u).iter().map(|f| f.name.clone()).collect();
        assert_eq!(names, vec!["f", "a"]);
    }
}

//! Brute-force automaton semantics: run one automaton instance per
//! binding along every entry-to-exit path of a loop-free CFG.

use std::collections::{BTreeMap, BTreeSet};

use cbugscan_core::checker::automaton::PropertyAutomaton;
use cbugscan_core::checker::events;
use cbugscan_core::frontend::SourceLocation;
use cbugscan_core::ir::{Function, NodeId};

pub fn all_paths(f: &Function) -> Vec<Vec<NodeId>> {
    fn go(f: &Function, n: NodeId, path: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
        path.push(n);
        assert!(path.len() <= f.cfg.len(), "CFG has a cycle");
        let succ = f.cfg.successors(n);
        if succ.is_empty() {
            out.push(path.clone());
        }
        for e in succ {
            go(f, e.target, path, out);
        }
        path.pop();
    }
    let mut out = Vec::new();
    go(f, f.cfg.entry, &mut Vec::new(), &mut out);
    out
}

/// (location, message) of every error some path produces.
pub fn path_errors(a: &PropertyAutomaton, f: &Function) -> BTreeSet<(SourceLocation, String)> {
    let paths = all_paths(f);
    // instances never touched on a path stay in the start state there
    let mut bindings = BTreeMap::new();
    for &n in paths.iter().flatten() {
        for e in events(f.cfg.node(n), &a.patterns) {
            bindings.insert(e.binding.key(), e.binding);
        }
    }
    let mut found = BTreeSet::new();
    for path in paths {
        let mut state: BTreeMap<String, usize> =
            bindings.keys().map(|k| (k.clone(), a.start)).collect();
        for &n in &path {
            let node = f.cfg.node(n);
            for e in events(node, &a.patterns) {
                let key = e.binding.key();
                let s = *state.get(&key).unwrap_or(&a.start);
                if let Some(m) = a.errors.get(&(s, e.pattern)) {
                    found.insert((node.location.clone(), e.binding.expand(m)));
                } else if let Some(&t) = a.transitions.get(&(s, e.pattern)) {
                    state.insert(key, t);
                }
            }
        }
        if *path.last().unwrap() != f.cfg.exit {
            continue;
        }
        let exit = f.cfg.node(f.cfg.exit);
        for (key, s) in &state {
            if let Some(m) = a.exit_errors.get(s) {
                found.insert((exit.location.clone(), bindings[key].expand(m)));
            }
        }
    }
    found
}

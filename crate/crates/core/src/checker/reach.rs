//! Unreachable code and superfluous semicolons.

use std::collections::BTreeSet;

use super::{CheckContext, Checker, CheckerDescriptor, CheckerError};
use crate::frontend::AstKind;
use crate::ir::{Cfg, NodeId, TranslationUnit};
use crate::report::{ErrorTrace, Importance, TraceStep};

pub const UNREACHABLE: &str = "unreachable code";
pub const SUPERFLUOUS_SEMICOLON: &str = "superfluous semicolon";

/// Unreachable statement nodes that start a run. A node continues its
/// predecessor's run when that predecessor is its only one, is itself
/// unreachable, and flows only into it. Runs with no such start (an
/// unreachable cycle) are anchored at their smallest node.
pub fn unreachable_heads(cfg: &Cfg) -> Vec<NodeId> {
    let reachable = cfg.reachable();
    let dead: BTreeSet<NodeId> = cfg
        .nodes()
        .iter()
        .map(|n| n.id)
        .filter(|id| !reachable.contains(id) && *id != cfg.entry && *id != cfg.exit)
        .collect();
    let continues = |n: NodeId| -> Option<NodeId> {
        match cfg.predecessors(n) {
            [m] if dead.contains(m) && cfg.successors(*m).len() == 1 => Some(*m),
            _ => None,
        }
    };
    let next_in_run = |m: NodeId| -> Option<NodeId> {
        match cfg.successors(m) {
            [e] if dead.contains(&e.target) && continues(e.target) == Some(m) => Some(e.target),
            _ => None,
        }
    };
    let mut heads: Vec<NodeId> = dead.iter().copied().filter(|n| continues(*n).is_none()).collect();
    let mut covered = BTreeSet::new();
    let cover = |start: NodeId, covered: &mut BTreeSet<NodeId>| {
        let mut cur = Some(start);
        while let Some(n) = cur {
            if !covered.insert(n) {
                break;
            }
            cur = next_in_run(n);
        }
    };
    for &h in &heads {
        cover(h, &mut covered);
    }
    for &n in &dead {
        if !covered.contains(&n) {
            heads.push(n);
            cover(n, &mut covered);
        }
    }
    heads.sort();
    heads
}

pub fn check_reachability(unit: &TranslationUnit) -> Vec<ErrorTrace> {
    let mut out = Vec::new();
    for f in &unit.functions {
        for id in unreachable_heads(&f.cfg) {
            let node = f.cfg.node(id);
            out.push(ErrorTrace::new(
                String::new(),
                Importance::Error,
                UNREACHABLE,
                vec![TraceStep::new(
                    node.location.clone(),
                    format!("`{}` cannot be reached from the start of {}", node.label(), f.name),
                )],
            ));
        }
        for n in f.def.descendants() {
            let body = match n.kind {
                AstKind::If => n.children[1..].iter().collect::<Vec<_>>(),
                AstKind::While => vec![&n.children[1]],
                AstKind::For => vec![&n.children[3]],
                _ => continue,
            };
            for b in body {
                if b.kind == AstKind::EmptyStatement {
                    let what = match n.kind {
                        AstKind::If => "if",
                        AstKind::While => "while",
                        _ => "for",
                    };
                    out.push(ErrorTrace::new(
                        String::new(),
                        Importance::Warning,
                        SUPERFLUOUS_SEMICOLON,
                        vec![TraceStep::new(
                            b.location.clone(),
                            format!("lone `;` is the whole body of this {what}"),
                        )],
                    ));
                }
            }
        }
    }
    out
}

pub struct ReachChecker;

impl Checker for ReachChecker {
    fn check(
        &mut self,
        unit: &TranslationUnit,
        _cx: &mut CheckContext,
    ) -> Result<Vec<ErrorTrace>, CheckerError> {
        Ok(check_reachability(unit))
    }
}

pub fn descriptor() -> CheckerDescriptor {
    CheckerDescriptor {
        name: "reach".into(),
        config_schema: "no configuration".into(),
        instantiate: |config| match config.map(str::trim) {
            None | Some("") => Ok(Box::new(ReachChecker)),
            Some(_) => Err(CheckerError::Config("reach takes no configuration".into())),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    fn check(src: &str) -> Vec<(Importance, String, u32, u32)> {
        let u = TranslationUnit::build(Path::new("t.c"), crate::frontend::parse(src, "t.c").unwrap()).unwrap();
        check_reachability(&u)
            .into_iter()
            .map(|t| (t.importance, t.message.clone(), t.location().line, t.location().column))
            .collect()
    }

    #[test]
    fn after_return() {
        assert_eq!(
            check("void f(){ return; x=1; }"),
            vec![(Importance::Error, UNREACHABLE.into(), 1, 19)]
        );
    }

    #[test]
    fn semicolon_and_unreachable() {
        let r = check("void f(){ if (cond); return; x=1; }");
        assert_eq!(r.len(), 2);
        assert!(r.contains(&(Importance::Error, UNREACHABLE.into(), 1, 30)));
        assert!(r.contains(&(Importance::Warning, SUPERFLUOUS_SEMICOLON.into(), 1, 20)));
    }

    #[test]
    fn infinite_loop() {
        assert_eq!(
            check("void f(){ while(1){} x=1; }"),
            vec![(Importance::Error, UNREACHABLE.into(), 1, 22)]
        );
    }

    #[test]
    fn runs_collapse() {
        let r = check("void f(){ return; a=1; b=2; c=3; }");
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn unreachable_cycle_is_reported_once() {
        let r = check("void f(){ return; l: goto l; }");
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn clean_function() {
        assert!(check("int f(int c){ if (c) return 1; while (c) c = c - 1; return 0; }").is_empty());
    }

    #[test]
    fn empty_loop_bodies() {
        let r = check("void f(int c){ while (c); for (;c;); }");
        assert_eq!(r.iter().filter(|x| x.1 == SUPERFLUOUS_SEMICOLON).count(), 2);
    }
}

use std::sync::Arc;

use super::{ConstraintKind, ConstraintSet, PointerConstraint, VarId};
use crate::frontend::{AstKind, AstNode, UnaryOp};
use crate::ir::{Function, TranslationUnit};

const ALLOCATORS: &[&str] = &["malloc", "calloc", "realloc", "kmalloc", "kzalloc"];

enum Value {
    Var(String),
    Addr(String),
    Deref(String),
}

/// Pointer constraints from every assignment and initialised declaration
/// in the unit, in source order.
pub fn collect_constraints(unit: &TranslationUnit) -> ConstraintSet {
    let mut set = ConstraintSet::default();
    for f in &unit.functions {
        for n in f.def.descendants() {
            let (lhs, rhs) = match n.kind {
                AstKind::Assign => (lvalue(f, unit, &n.children[0]), rvalue(f, unit, &n.children[1])),
                AstKind::VarDecl if !n.children.is_empty() => {
                    (Some(Value::Var(local(f, unit, &n.text))), rvalue(f, unit, &n.children[0]))
                }
                _ => continue,
            };
            let (Some(lhs), Some(rhs)) = (lhs, rhs) else { continue };
            let kind_and_names = match (lhs, rhs) {
                (Value::Var(x), Value::Addr(y)) => (ConstraintKind::AddressOf, x, y),
                (Value::Var(x), Value::Var(y)) => (ConstraintKind::Copy, x, y),
                (Value::Var(x), Value::Deref(y)) => (ConstraintKind::Load, x, y),
                (Value::Deref(x), Value::Var(y)) => (ConstraintKind::Store, x, y),
                _ => continue,
            };
            let (kind, x, y) = kind_and_names;
            let lhs: VarId = set.intern(&x);
            let rhs: VarId = set.intern(&y);
            set.constraints.push(PointerConstraint { kind, lhs, rhs });
        }
    }
    set
}

fn local(f: &Function, _unit: &TranslationUnit, name: &str) -> String {
    if f.locals.contains(name) {
        format!("{}::{name}", f.name)
    } else {
        name.to_string()
    }
}

/// The variable an lvalue-ish expression stands for after collapsing
/// fields and elements onto the base.
fn base(f: &Function, unit: &TranslationUnit, e: &Arc<AstNode>) -> Option<String> {
    match e.kind {
        AstKind::Identifier if unit.function(&e.text).is_none() || f.locals.contains(&e.text) => {
            Some(local(f, unit, &e.text))
        }
        AstKind::Member(_) | AstKind::Index => base(f, unit, &e.children[0]),
        _ => None,
    }
}

fn lvalue(f: &Function, unit: &TranslationUnit, e: &Arc<AstNode>) -> Option<Value> {
    match e.kind {
        AstKind::UnaryOp(UnaryOp::Deref) => base(f, unit, &e.children[0]).map(Value::Deref),
        _ => base(f, unit, e).map(Value::Var),
    }
}

fn rvalue(f: &Function, unit: &TranslationUnit, e: &Arc<AstNode>) -> Option<Value> {
    match e.kind {
        AstKind::UnaryOp(UnaryOp::AddrOf) => base(f, unit, &e.children[0]).map(Value::Addr),
        AstKind::UnaryOp(UnaryOp::Deref) => base(f, unit, &e.children[0]).map(Value::Deref),
        AstKind::Call if e.direct_callee().is_some_and(|c| ALLOCATORS.contains(&c)) => {
            Some(Value::Addr(format!("heap@{}", e.location)))
        }
        _ => base(f, unit, e).map(Value::Var),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;
    use ConstraintKind::*;

    fn collect(src: &str) -> Vec<(ConstraintKind, String, String)> {
        let u = TranslationUnit::build(Path::new("t.c"), crate::frontend::parse(src, "t.c").unwrap()).unwrap();
        let set = collect_constraints(&u);
        set.constraints
            .iter()
            .map(|c| (c.kind, set.variables[c.lhs.index()].clone(), set.variables[c.rhs.index()].clone()))
            .collect()
    }

    fn c(k: ConstraintKind, a: &str, b: &str) -> (ConstraintKind, String, String) {
        (k, a.into(), b.into())
    }

    #[test]
    fn four_shapes() {
        assert_eq!(
            collect("int *p; int *q; int x; void f(){ p = &x; q = p; x = *q; *p = q; }"),
            vec![c(AddressOf, "p", "x"), c(Copy, "q", "p"), c(Load, "x", "q"), c(Store, "p", "q")]
        );
    }

    #[test]
    fn base_collapsing_and_locals() {
        assert_eq!(
            collect("int x; void f(struct s *s){ int *a[4]; s->f = &x; a[1] = &x; }"),
            vec![c(AddressOf, "f::s", "x"), c(AddressOf, "f::a", "x")]
        );
    }

    #[test]
    fn declarations_heap_and_ignored_forms() {
        let got = collect("void f(){ int *p = malloc(4); int *q = p + 1; p = g(); fp = f; }");
        assert_eq!(got, vec![c(AddressOf, "f::p", "heap@t.c:1:20")]);
    }
}

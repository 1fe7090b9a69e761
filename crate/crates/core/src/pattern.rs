//! AST patterns: C expression or statement templates whose `%NAME`
//! leaves are metavariables.
//!
//! Matching is attempted at one node only; callers decide where to try
//! (usually every subexpression evaluated at a CFG node, see
//! [`matches_in`]). Locations and parentheses never affect a match.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::config::directive::{parse_directives, Word};
use crate::frontend::{parse_template, AstKind, AstNode, FrontendError};

#[derive(Debug, thiserror::Error)]
pub enum PatternError {
    #[error("pattern {name}: {source}")]
    Syntax {
        name: String,
        #[source]
        source: FrontendError,
    },
    #[error("line {line}: {message}")]
    File { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub name: String,
    pub template: Arc<AstNode>,
}

impl Pattern {
    pub fn parse(name: &str, source: &str) -> Result<Pattern, PatternError> {
        let template =
            parse_template(source, &format!("<pattern {name}>")).map_err(|source| {
                PatternError::Syntax {
                    name: name.to_string(),
                    source,
                }
            })?;
        Ok(Pattern {
            name: name.to_string(),
            template: Arc::new(template),
        })
    }

    /// Metavariable names in order of first appearance.
    pub fn metavariables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for n in self.template.descendants() {
            if n.kind == AstKind::MetaVar && !out.contains(&n.text) {
                out.push(n.text.clone());
            }
        }
        out
    }

    /// Tries the pattern at `node`.
    pub fn match_node(&self, node: &Arc<AstNode>) -> Option<Binding> {
        let mut binding = Binding::default();
        unify(&self.template, node, &mut binding).then_some(binding)
    }
}

fn unify(template: &AstNode, subject: &Arc<AstNode>, binding: &mut Binding) -> bool {
    if template.kind == AstKind::MetaVar {
        return match binding.0.get(&template.text) {
            Some(bound) => bound.same_shape(subject),
            None => {
                binding.0.insert(template.text.clone(), Arc::clone(subject));
                true
            }
        };
    }
    template.kind == subject.kind
        && template.text == subject.text
        && template.children.len() == subject.children.len()
        && template
            .children
            .iter()
            .zip(&subject.children)
            .all(|(t, s)| unify(t, s, binding))
}

/// Metavariable name to bound subtree.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Binding(BTreeMap<String, Arc<AstNode>>);

impl Binding {
    pub fn get(&self, name: &str) -> Option<&Arc<AstNode>> {
        self.0.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Arc<AstNode>)> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn insert(&mut self, name: impl Into<String>, node: Arc<AstNode>) {
        self.0.insert(name.into(), node);
    }

    /// Canonical text identifying what the binding refers to: the bound
    /// expression for a single metavariable, `A=..., B=...` for several.
    pub fn key(&self) -> String {
        match self.0.len() {
            1 => self.0.values().next().unwrap().to_source(),
            _ => self
                .0
                .iter()
                .map(|(k, v)| format!("{k}={}", v.to_source()))
                .collect::<Vec<_>>()
                .join(", "),
        }
    }

    /// Replaces `%NAME` occurrences in a message with bound expressions.
    /// Longer names are replaced first so `%X1` is not read as `%X`.
    pub fn expand(&self, message: &str) -> String {
        let mut names: Vec<&String> = self.0.keys().collect();
        names.sort_by_key(|n| std::cmp::Reverse(n.len()));
        let mut out = message.to_string();
        for name in names {
            out = out.replace(&format!("%{name}"), &self.0[name].to_source());
        }
        out
    }
}

/// Instantiates `template` with `binding`. Unbound metavariables are left
/// in place.
pub fn substitute(template: &Arc<AstNode>, binding: &Binding) -> Arc<AstNode> {
    if template.kind == AstKind::MetaVar {
        if let Some(bound) = binding.get(&template.text) {
            return Arc::clone(bound);
        }
        return Arc::clone(template);
    }
    if template.children.is_empty() {
        return Arc::clone(template);
    }
    let mut node = (**template).clone();
    node.children = template
        .children
        .iter()
        .map(|c| substitute(c, binding))
        .collect();
    Arc::new(node)
}

/// Every subtree of `roots` (pre-order) where `pattern` matches.
pub fn matches_in(pattern: &Pattern, roots: &[Arc<AstNode>]) -> Vec<(Arc<AstNode>, Binding)> {
    roots
        .iter()
        .flat_map(|r| r.descendants())
        .filter_map(|n| pattern.match_node(&n).map(|b| (n, b)))
        .collect()
}

/// Parses a pattern file: `pattern NAME "TEMPLATE"` per line.
pub fn parse_pattern_file(text: &str) -> Result<Vec<Pattern>, PatternError> {
    let directives = parse_directives(text).map_err(|e| PatternError::File {
        line: e.line,
        message: e.message,
    })?;
    let mut patterns: Vec<Pattern> = Vec::new();
    for d in directives {
        match &d.words[..] {
            [Word::Bare(kw), Word::Bare(name), Word::Quoted(template)] if kw == "pattern" => {
                if patterns.iter().any(|p| &p.name == name) {
                    return Err(PatternError::File {
                        line: d.line,
                        message: format!("pattern {name} defined twice"),
                    });
                }
                patterns.push(Pattern::parse(name, template)?);
            }
            _ => {
                return Err(PatternError::File {
                    line: d.line,
                    message: "expected `pattern NAME \"TEMPLATE\"`".into(),
                })
            }
        }
    }
    Ok(patterns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse, MemberAccess, UnaryOp};

    fn expr(src: &str) -> Arc<AstNode> {
        let root = parse(&format!("void f(){{ {src}; }}"), "t.c").unwrap();
        let body = root.children[0].children.last().unwrap();
        Arc::clone(&body.children[0].children[0])
    }

    #[test]
    fn call_template_shape() {
        let p = Pattern::parse("lock", "mutex_lock(%X)").unwrap();
        assert_eq!(p.template.kind, AstKind::Call);
        assert_eq!(p.template.children[0].kind, AstKind::Identifier);
        assert_eq!(p.template.children[1].kind, AstKind::MetaVar);
        assert_eq!(p.template.children[1].text, "X");
    }

    #[test]
    fn assignment_templates() {
        let p = Pattern::parse("assign", "%A = %B").unwrap();
        assert_eq!(p.template.kind, AstKind::Assign);
        assert_eq!(p.metavariables(), vec!["A", "B"]);
        let same = Pattern::parse("self", "%A = %A").unwrap();
        assert_eq!(same.metavariables(), vec!["A"]);
    }

    #[test]
    fn statement_templates() {
        let p = Pattern::parse("ret", "return %X;").unwrap();
        assert_eq!(p.template.kind, AstKind::Return);
        let e = Pattern::parse("stmt", "free(%P);").unwrap();
        assert_eq!(e.template.kind, AstKind::ExprStatement);
    }

    #[test]
    fn bad_metavariable() {
        assert!(Pattern::parse("bad", "f(% 1)").is_err());
        assert!(Pattern::parse("bad", "f(%)").is_err());
        assert!(Pattern::parse("bad", "f(").is_err());
    }

    #[test]
    fn binds_argument() {
        let p = Pattern::parse("lock", "mutex_lock(%X)").unwrap();
        let b = p.match_node(&expr("mutex_lock(&a)")).unwrap();
        let x = b.get("X").unwrap();
        assert_eq!(x.kind, AstKind::UnaryOp(UnaryOp::AddrOf));
        assert_eq!(b.key(), "&a");
        assert!(p.match_node(&expr("mutex_unlock(&a)")).is_none());
        assert!(p.match_node(&expr("mutex_lock(&a, 1)")).is_none());
    }

    #[test]
    fn repeated_metavariable_requires_equal_subtrees() {
        let p = Pattern::parse("self", "%A = %A").unwrap();
        assert!(p.match_node(&expr("x = y")).is_none());
        let b = p.match_node(&expr("x = x")).unwrap();
        assert_eq!(b.key(), "x");
        assert!(p.match_node(&expr("s->f = (s->f)")).is_some());
    }

    #[test]
    fn member_patterns() {
        let p = Pattern::parse("mux", "%P->mux").unwrap();
        assert_eq!(p.template.kind, AstKind::Member(MemberAccess::Arrow));
        let b = p.match_node(&expr("msg_ctx->mux")).unwrap();
        assert_eq!(b.key(), "msg_ctx");
    }

    #[test]
    fn tuple_key_and_expansion() {
        let p = Pattern::parse("pair", "f(%A, %B1)").unwrap();
        let b = p.match_node(&expr("f(x->y, *z)")).unwrap();
        assert_eq!(b.key(), "A=x->y, B1=*z");
        assert_eq!(b.expand("%A then %B1"), "x->y then *z");
    }

    #[test]
    fn substitution_round_trip() {
        let p = Pattern::parse("lock", "mutex_lock(%X)").unwrap();
        let subject = expr("mutex_lock(&slot->ctrl->crit_sect)");
        let b = p.match_node(&subject).unwrap();
        assert!(substitute(&p.template, &b).same_shape(&subject));
    }

    #[test]
    fn matches_in_walks_subtrees() {
        let p = Pattern::parse("lock", "mutex_lock(%X)").unwrap();
        let found = matches_in(&p, &[expr("rc = f(mutex_lock(&a), mutex_lock(&b))")]);
        let keys: Vec<_> = found.iter().map(|(_, b)| b.key()).collect();
        assert_eq!(keys, vec!["&a", "&b"]);
    }

    #[test]
    fn pattern_file() {
        let ps = parse_pattern_file("# locks\npattern lock \"mutex_lock(%X)\"\npattern unlock \"mutex_unlock(%X)\"\n").unwrap();
        assert_eq!(ps.len(), 2);
        assert!(parse_pattern_file("pattern lock").is_err());
        assert!(parse_pattern_file("pattern a \"x\"\npattern a \"y\"").is_err());
    }
}

//! The checker abstraction, the registry of built-in checkers and the
//! loop that runs a job.

pub mod automaton;
pub mod lockstat;
pub mod reach;
mod runner;
pub mod thread;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::frontend::{AstKind, AstNode};
use crate::ir::{CfgNode, TranslationUnit};
use crate::pattern::{Binding, Pattern};
use crate::report::ErrorTrace;
use crate::traverse::{map_expression, CallFrame, MapDirection};

pub use runner::{run_job, JobResult};

#[derive(Debug, thiserror::Error)]
pub enum CheckerError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Failed(String),
}

#[derive(Debug, thiserror::Error)]
pub enum RegistryError {
    #[error("checker `{0}` is already registered")]
    Duplicate(String),
    #[error("unknown checker `{0}`")]
    Unknown(String),
    #[error("checker `{name}`: {source}")]
    Instantiate {
        name: String,
        #[source]
        source: CheckerError,
    },
}

/// Services handed to a checker for one unit.
#[derive(Debug, Default)]
pub struct CheckContext {
    /// Non-fatal problems worth telling the user about.
    pub diagnostics: Vec<String>,
}

impl CheckContext {
    pub fn diagnostic(&mut self, message: impl Into<String>) {
        self.diagnostics.push(message.into());
    }
}

/// A bug finder. One instance checks units one at a time and never
/// shares state with other checker instances.
pub trait Checker: Send {
    fn check(
        &mut self,
        unit: &TranslationUnit,
        cx: &mut CheckContext,
    ) -> Result<Vec<ErrorTrace>, CheckerError>;
}

pub type Instantiate = fn(Option<&str>) -> Result<Box<dyn Checker>, CheckerError>;

#[derive(Clone)]
pub struct CheckerDescriptor {
    pub name: String,
    /// Human-readable description of the configuration file format.
    pub config_schema: String,
    /// Builds an instance from the configuration file's text, if any.
    pub instantiate: Instantiate,
}

#[derive(Clone, Default)]
pub struct Registry {
    descriptors: BTreeMap<String, CheckerDescriptor>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// A registry holding `automaton`, `lockstat`, `thread` and `reach`.
    pub fn with_builtins() -> Self {
        let mut r = Self::new();
        for d in [
            automaton::descriptor(),
            lockstat::descriptor(),
            thread::descriptor(),
            reach::descriptor(),
        ] {
            r.register(d).expect("built-in names are distinct");
        }
        r
    }

    pub fn register(&mut self, d: CheckerDescriptor) -> Result<(), RegistryError> {
        if self.descriptors.contains_key(&d.name) {
            return Err(RegistryError::Duplicate(d.name));
        }
        self.descriptors.insert(d.name.clone(), d);
        Ok(())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.descriptors.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.descriptors.keys().map(String::as_str)
    }

    pub fn descriptor(&self, name: &str) -> Option<&CheckerDescriptor> {
        self.descriptors.get(name)
    }

    pub fn instantiate(
        &self,
        name: &str,
        config: Option<&str>,
    ) -> Result<Box<dyn Checker>, RegistryError> {
        let d = self
            .descriptors
            .get(name)
            .ok_or_else(|| RegistryError::Unknown(name.to_string()))?;
        (d.instantiate)(config).map_err(|source| RegistryError::Instantiate {
            name: name.to_string(),
            source,
        })
    }
}

/// A pattern match at a CFG node.
#[derive(Debug, Clone)]
pub struct Event {
    /// Index into the pattern list that was searched.
    pub pattern: usize,
    pub binding: Binding,
    pub node: Arc<AstNode>,
}

/// Matches of `patterns` at a CFG node, in evaluation order: subtrees
/// before the expressions that contain them, and for one subtree the
/// patterns in list order. Statements that carry expressions (expression
/// statements, returns, declarations) are searched as a whole so that
/// statement templates can match too.
pub fn events(node: &CfgNode, patterns: &[Pattern]) -> Vec<Event> {
    fn walk(n: &Arc<AstNode>, patterns: &[Pattern], out: &mut Vec<Event>) {
        for c in &n.children {
            walk(c, patterns, out);
        }
        for (i, p) in patterns.iter().enumerate() {
            if let Some(binding) = p.match_node(n) {
                out.push(Event {
                    pattern: i,
                    binding,
                    node: Arc::clone(n),
                });
            }
        }
    }
    let mut out = Vec::new();
    if let Some(ast) = &node.ast {
        let searchable = ast.kind.is_expression()
            || matches!(
                ast.kind,
                AstKind::ExprStatement | AstKind::Return | AstKind::VarDecl
            );
        if searchable {
            walk(ast, patterns, &mut out);
        }
    }
    out
}

/// Rewrites every bound expression from the innermost frame's callee
/// into the root caller's terms. An expression that cannot be mapped (a
/// callee local, say) is kept as written.
pub fn to_root(binding: &Binding, frames: &[Arc<CallFrame>]) -> Binding {
    let mut out = Binding::default();
    for (name, expr) in binding.iter() {
        let mut e = Arc::clone(expr);
        for frame in frames.iter().rev() {
            match map_expression(&e, frame, MapDirection::CalleeToCaller) {
                Some(m) => e = m,
                None => break,
            }
        }
        out.insert(name.clone(), e);
    }
    out
}

/// Lock identity: the bound expression's text without a leading `&`.
pub fn lock_name(binding: &Binding) -> String {
    let key = binding.key();
    key.strip_prefix('&').map(str::to_string).unwrap_or(key)
}

/// A `lock "..." unlock "..."` pair from a configuration file.
#[derive(Debug, Clone)]
pub struct LockPair {
    pub lock: Pattern,
    pub unlock: Pattern,
}

impl LockPair {
    pub fn new(index: usize, lock: &str, unlock: &str) -> Result<LockPair, CheckerError> {
        let parse = |name: String, src: &str| {
            Pattern::parse(&name, src).map_err(|e| CheckerError::Config(e.to_string()))
        };
        Ok(LockPair {
            lock: parse(format!("lock{index}"), lock)?,
            unlock: parse(format!("unlock{index}"), unlock)?,
        })
    }

    pub fn defaults() -> Vec<LockPair> {
        vec![
            LockPair::new(0, "mutex_lock(%L)", "mutex_unlock(%L)").expect("valid"),
            LockPair::new(1, "spin_lock(%L)", "spin_unlock(%L)").expect("valid"),
        ]
    }
}

/// Lock and unlock patterns flattened: even indices lock, odd unlock.
pub(crate) fn lock_patterns(pairs: &[LockPair]) -> Vec<Pattern> {
    pairs
        .iter()
        .flat_map(|p| [p.lock.clone(), p.unlock.clone()])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::TranslationUnit;
    use std::path::Path;

    fn unit(src: &str) -> TranslationUnit {
        TranslationUnit::build(Path::new("t.c"), crate::frontend::parse(src, "t.c").unwrap()).unwrap()
    }

    #[test]
    fn registry_rules() {
        let mut r = Registry::new();
        r.register(reach::descriptor()).unwrap();
        assert!(r.instantiate("reach", None).is_ok());
        assert!(matches!(r.register(reach::descriptor()), Err(RegistryError::Duplicate(_))));
        assert!(matches!(r.instantiate("foo", None), Err(RegistryError::Unknown(_))));
        let all = Registry::with_builtins();
        assert_eq!(all.names().collect::<Vec<_>>(), vec!["automaton", "lockstat", "reach", "thread"]);
    }

    #[test]
    fn events_in_evaluation_order() {
        let u = unit("void f(){ g(mutex_lock(&a), mutex_unlock(&b)); return mutex_lock(&c); }");
        let pats = lock_patterns(&LockPair::defaults());
        let f = &u.functions[0];
        let nodes: Vec<_> = f.cfg.nodes().iter().filter(|n| n.ast.is_some()).collect();
        let e: Vec<_> = events(nodes[0], &pats).iter().map(|e| (e.pattern, e.binding.key())).collect();
        assert_eq!(e, vec![(0, "&a".to_string()), (1, "&b".to_string())]);
        let r: Vec<_> = events(nodes[1], &pats).iter().map(|e| e.binding.key()).collect();
        assert_eq!(r, vec!["&c"]);
    }

    #[test]
    fn lock_name_strips_address_of() {
        let p = Pattern::parse("l", "mutex_lock(%L)").unwrap();
        let node = Arc::new(crate::frontend::parse("void f(){ mutex_lock(&msg_ctx->mux); }", "t.c").unwrap());
        let call = node.descendants().find(|n| n.kind == AstKind::Call).unwrap();
        assert_eq!(lock_name(&p.match_node(&call).unwrap()), "msg_ctx->mux");
    }
}

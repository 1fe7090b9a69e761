use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::frontend::{AstKind, AstNode};

use super::cfg::{Cfg, NodeId};
use super::IrError;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Callee {
    /// Defined in the same unit.
    Defined(String),
    /// Named, but with no definition in the unit.
    External(String),
    /// Called through an expression other than a plain identifier.
    Indirect,
}

impl Callee {
    pub fn name(&self) -> &str {
        match self {
            Callee::Defined(n) | Callee::External(n) => n,
            Callee::Indirect => "<indirect>",
        }
    }
}

impl fmt::Display for Callee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallEdge {
    pub caller: String,
    pub call_site: NodeId,
    pub callee: Callee,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CallGraph {
    pub functions: Vec<String>,
    pub edges: Vec<CallEdge>,
}

impl CallGraph {
    /// One edge per syntactic call expression, in CFG node order.
    pub fn build(functions: &[Function]) -> CallGraph {
        let defined: BTreeSet<&str> = functions.iter().map(|f| f.name.as_str()).collect();
        let mut edges = Vec::new();
        for f in functions {
            for node in f.cfg.nodes() {
                for call in node.calls() {
                    let callee = match call.direct_callee() {
                        Some(name) if defined.contains(name) => Callee::Defined(name.into()),
                        Some(name) => Callee::External(name.into()),
                        None => Callee::Indirect,
                    };
                    edges.push(CallEdge {
                        caller: f.name.clone(),
                        call_site: node.id,
                        callee,
                    });
                }
            }
        }
        CallGraph {
            functions: functions.iter().map(|f| f.name.clone()).collect(),
            edges,
        }
    }

    pub fn callers_of<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a CallEdge> + 'a {
        self.edges
            .iter()
            .filter(move |e| matches!(&e.callee, Callee::Defined(n) if n == name))
    }
}

/// A function definition with its CFG and scope information.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Function {
    pub name: String,
    pub def: Arc<AstNode>,
    pub cfg: Cfg,
    pub params: Vec<String>,
    /// Parameters and block-scope declarations.
    pub locals: BTreeSet<String>,
}

/// One parsed source file with everything built from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationUnit {
    pub path: PathBuf,
    pub ast: Arc<AstNode>,
    pub functions: Vec<Function>,
    pub call_graph: CallGraph,
    /// File-scope variable and function-prototype names.
    pub globals: BTreeSet<String>,
    by_name: BTreeMap<String, usize>,
}

impl TranslationUnit {
    /// Builds CFGs for every function and the call graph.
    pub fn build(path: &Path, ast: AstNode) -> Result<TranslationUnit, IrError> {
        let ast = Arc::new(ast);
        let mut next_id = 0;
        let mut functions = Vec::new();
        let mut by_name = BTreeMap::new();
        let mut globals = BTreeSet::new();
        for item in &ast.children {
            match item.kind {
                AstKind::FunctionDef => {
                    if by_name.insert(item.text.clone(), functions.len()).is_some() {
                        return Err(IrError::DuplicateFunction(item.text.clone()));
                    }
                    let cfg = Cfg::build(item, &mut next_id)?;
                    let params: Vec<String> = item
                        .children
                        .iter()
                        .filter(|c| c.kind == AstKind::ParamDecl)
                        .map(|c| c.text.clone())
                        .collect();
                    let mut locals: BTreeSet<String> = params.iter().cloned().collect();
                    if let Some(body) = item.children.last() {
                        collect_locals(body, &mut locals);
                    }
                    functions.push(Function {
                        name: item.text.clone(),
                        def: Arc::clone(item),
                        cfg,
                        params,
                        locals,
                    });
                }
                AstKind::VarDecl => {
                    globals.insert(item.text.clone());
                }
                _ => {}
            }
        }
        let call_graph = CallGraph::build(&functions);
        Ok(TranslationUnit {
            path: path.to_path_buf(),
            ast,
            functions,
            call_graph,
            globals,
            by_name,
        })
    }

    pub fn function(&self, name: &str) -> Option<&Function> {
        self.by_name.get(name).map(|&i| &self.functions[i])
    }

    /// The function whose CFG owns `id`.
    pub fn function_of(&self, id: NodeId) -> Option<&Function> {
        self.functions.iter().find(|f| f.cfg.contains(id))
    }
}

fn collect_locals(node: &AstNode, out: &mut BTreeSet<String>) {
    if node.kind == AstKind::VarDecl {
        out.insert(node.text.clone());
    }
    for c in &node.children {
        if !c.kind.is_expression() {
            collect_locals(c, out);
        }
    }
}

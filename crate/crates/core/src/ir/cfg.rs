use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::frontend::{AstKind, AstNode, SourceLocation};

use super::IrError;

/// Unit-unique identifier of a CFG node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Entry,
    Exit,
    Statement,
    Condition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeLabel {
    Normal,
    True,
    False,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub target: NodeId,
    pub label: EdgeLabel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfgNode {
    pub id: NodeId,
    pub kind: NodeKind,
    /// The statement or condition this node stands for. `None` only for
    /// entry and exit.
    pub ast: Option<Arc<AstNode>>,
    pub location: SourceLocation,
}

impl CfgNode {
    /// Expressions evaluated when control passes this node.
    pub fn expressions(&self) -> &[Arc<AstNode>] {
        let Some(ast) = &self.ast else {
            return &[];
        };
        match ast.kind {
            k if k.is_expression() => std::slice::from_ref(ast),
            AstKind::ExprStatement | AstKind::Return | AstKind::VarDecl => &ast.children,
            _ => &[],
        }
    }

    /// Every call evaluated at this node, arguments before the call that
    /// consumes them.
    pub fn calls(&self) -> Vec<Arc<AstNode>> {
        fn post_order(node: &Arc<AstNode>, out: &mut Vec<Arc<AstNode>>) {
            for c in &node.children {
                post_order(c, out);
            }
            if node.kind == AstKind::Call {
                out.push(Arc::clone(node));
            }
        }
        let mut out = Vec::new();
        for e in self.expressions() {
            post_order(e, &mut out);
        }
        out
    }

    /// Short source rendering used in DOT output and trace steps.
    pub fn label(&self) -> String {
        match (&self.kind, &self.ast) {
            (NodeKind::Entry, _) => "entry".into(),
            (NodeKind::Exit, _) => "exit".into(),
            (_, Some(ast)) => ast.to_source(),
            (_, None) => String::new(),
        }
    }
}

/// Control-flow graph of one function.
///
/// Node ids are contiguous, starting at `entry`; `exit` is the next id.
/// No synthetic join nodes are created: branches that fall through are
/// wired straight to the next statement (or to exit).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cfg {
    pub function: String,
    pub entry: NodeId,
    pub exit: NodeId,
    nodes: Vec<CfgNode>,
    succs: Vec<Vec<Edge>>,
    preds: Vec<Vec<NodeId>>,
}

impl Cfg {
    fn index(&self, id: NodeId) -> Option<usize> {
        let i = id.0.checked_sub(self.entry.0)? as usize;
        (i < self.nodes.len()).then_some(i)
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.index(id).is_some()
    }

    pub fn node(&self, id: NodeId) -> &CfgNode {
        &self.nodes[self.index(id).expect("node of another CFG")]
    }

    pub fn nodes(&self) -> &[CfgNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn successors(&self, id: NodeId) -> &[Edge] {
        &self.succs[self.index(id).expect("node of another CFG")]
    }

    pub fn predecessors(&self, id: NodeId) -> &[NodeId] {
        &self.preds[self.index(id).expect("node of another CFG")]
    }

    pub fn edge_count(&self) -> usize {
        self.succs.iter().map(Vec::len).sum()
    }

    /// Nodes reachable from entry.
    pub fn reachable(&self) -> BTreeSet<NodeId> {
        let mut seen = BTreeSet::from([self.entry]);
        let mut queue = VecDeque::from([self.entry]);
        while let Some(n) = queue.pop_front() {
            for e in self.successors(n) {
                if seen.insert(e.target) {
                    queue.push_back(e.target);
                }
            }
        }
        seen
    }

    /// Builds the CFG of a `FunctionDef`. Ids are allocated from
    /// `*next_id`, which is advanced past the last node.
    pub fn build(function: &AstNode, next_id: &mut u32) -> Result<Cfg, IrError> {
        assert_eq!(function.kind, AstKind::FunctionDef, "buildCfg needs a FunctionDef");
        let body = function
            .children
            .last()
            .filter(|b| b.kind == AstKind::Block)
            .ok_or_else(|| IrError::MalformedFunction(function.text.clone()))?;
        let exit_loc = body.end.clone().unwrap_or_else(|| body.location.clone());
        let mut b = Builder {
            function: function.text.clone(),
            base: *next_id,
            nodes: Vec::new(),
            succs: Vec::new(),
            labels: HashMap::new(),
            gotos: Vec::new(),
            loops: Vec::new(),
        };
        let entry = b.add(NodeKind::Entry, None, function.location.clone());
        let exit = b.add(NodeKind::Exit, None, exit_loc);
        let tail = b.statement(body, vec![(entry, EdgeLabel::Normal)])?;
        b.connect(&tail, exit);
        for (from, label, location) in std::mem::take(&mut b.gotos) {
            let target = *b.labels.get(&label).ok_or_else(|| IrError::UndefinedLabel {
                function: b.function.clone(),
                label: label.clone(),
                location,
            })?;
            b.connect(&[(from, EdgeLabel::Normal)], target);
        }
        *next_id = b.base + b.nodes.len() as u32;
        let mut preds = vec![Vec::new(); b.nodes.len()];
        for (i, out) in b.succs.iter().enumerate() {
            for e in out {
                preds[(e.target.0 - b.base) as usize].push(NodeId(b.base + i as u32));
            }
        }
        Ok(Cfg {
            function: b.function,
            entry,
            exit,
            nodes: b.nodes,
            succs: b.succs,
            preds,
        })
    }

    /// DOT rendering: nodes labeled `id: source-text`, condition edges
    /// labeled `true`/`false`.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{}\" {{", escape(&self.function));
        for n in &self.nodes {
            let shape = match n.kind {
                NodeKind::Condition => ", shape=diamond",
                NodeKind::Entry | NodeKind::Exit => ", shape=oval",
                NodeKind::Statement => ", shape=box",
            };
            let _ = writeln!(
                out,
                "  n{} [label=\"{}: {}\"{}];",
                n.id.0,
                n.id.0,
                escape(&n.label()),
                shape
            );
        }
        for n in &self.nodes {
            for e in self.successors(n.id) {
                let label = match e.label {
                    EdgeLabel::Normal => String::new(),
                    EdgeLabel::True => " [label=\"true\"]".into(),
                    EdgeLabel::False => " [label=\"false\"]".into(),
                };
                let _ = writeln!(out, "  n{} -> n{}{};", n.id.0, e.target.0, label);
            }
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Truth value of a condition that is an integer literal.
fn constant_truth(expr: &AstNode) -> Option<bool> {
    if expr.kind != AstKind::IntLiteral {
        return None;
    }
    let t = expr.text.trim_end_matches(['u', 'U', 'l', 'L']);
    let value = if let Some(hex) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16).ok()?
    } else if t.len() > 1 && t.starts_with('0') {
        u64::from_str_radix(&t[1..], 8).ok()?
    } else {
        t.parse::<u64>().ok()?
    };
    Some(value != 0)
}

type Pending = (NodeId, EdgeLabel);

#[derive(Default)]
struct LoopFrame {
    breaks: Vec<Pending>,
    continues: Vec<Pending>,
}

struct Builder {
    function: String,
    base: u32,
    nodes: Vec<CfgNode>,
    succs: Vec<Vec<Edge>>,
    labels: HashMap<String, NodeId>,
    gotos: Vec<(NodeId, String, SourceLocation)>,
    loops: Vec<LoopFrame>,
}

impl Builder {
    fn add(&mut self, kind: NodeKind, ast: Option<Arc<AstNode>>, location: SourceLocation) -> NodeId {
        let id = NodeId(self.base + self.nodes.len() as u32);
        self.nodes.push(CfgNode {
            id,
            kind,
            ast,
            location,
        });
        self.succs.push(Vec::new());
        id
    }

    fn connect(&mut self, from: &[Pending], to: NodeId) {
        for &(src, label) in from {
            self.succs[(src.0 - self.base) as usize].push(Edge { target: to, label });
        }
    }

    fn simple(&mut self, ast: &Arc<AstNode>, preds: &[Pending]) -> NodeId {
        let id = self.add(NodeKind::Statement, Some(Arc::clone(ast)), ast.location.clone());
        self.connect(preds, id);
        id
    }

    /// Head node of a branch or loop. Integer-literal conditions become a
    /// plain statement node whose only edge is the feasible one.
    fn head(&mut self, cond: &Arc<AstNode>, preds: &[Pending]) -> (NodeId, Option<bool>) {
        let truth = if cond.kind == AstKind::EmptyStatement {
            Some(true)
        } else {
            constant_truth(cond)
        };
        let kind = if truth.is_some() {
            NodeKind::Statement
        } else {
            NodeKind::Condition
        };
        let id = self.add(kind, Some(Arc::clone(cond)), cond.location.clone());
        self.connect(preds, id);
        (id, truth)
    }

    fn branch(id: NodeId, truth: Option<bool>, label: EdgeLabel) -> Vec<Pending> {
        let feasible = match (truth, label) {
            (Some(t), EdgeLabel::True) => t,
            (Some(t), EdgeLabel::False) => !t,
            _ => true,
        };
        if feasible {
            vec![(id, label)]
        } else {
            vec![]
        }
    }

    /// Lowers one statement. Returns the edges that fall through to
    /// whatever comes next.
    fn statement(&mut self, ast: &Arc<AstNode>, preds: Vec<Pending>) -> Result<Vec<Pending>, IrError> {
        Ok(match ast.kind {
            AstKind::Block => {
                let mut cur = preds;
                for s in &ast.children {
                    cur = self.statement(s, cur)?;
                }
                cur
            }
            AstKind::ExprStatement | AstKind::VarDecl | AstKind::EmptyStatement => {
                vec![(self.simple(ast, &preds), EdgeLabel::Normal)]
            }
            AstKind::Return => {
                let id = self.simple(ast, &preds);
                let exit = NodeId(self.base + 1);
                self.connect(&[(id, EdgeLabel::Normal)], exit);
                vec![]
            }
            AstKind::Goto => {
                let id = self.simple(ast, &preds);
                self.gotos.push((id, ast.text.clone(), ast.location.clone()));
                vec![]
            }
            AstKind::Break | AstKind::Continue => {
                let id = self.simple(ast, &preds);
                let is_break = ast.kind == AstKind::Break;
                let frame = self.loops.last_mut().ok_or_else(|| IrError::JumpOutsideLoop {
                    function: self.function.clone(),
                    location: ast.location.clone(),
                })?;
                if is_break {
                    frame.breaks.push((id, EdgeLabel::Normal));
                } else {
                    frame.continues.push((id, EdgeLabel::Normal));
                }
                vec![]
            }
            AstKind::Label => {
                let id = self.simple(ast, &preds);
                if self.labels.insert(ast.text.clone(), id).is_some() {
                    return Err(IrError::DuplicateLabel {
                        function: self.function.clone(),
                        label: ast.text.clone(),
                        location: ast.location.clone(),
                    });
                }
                self.statement(&ast.children[0], vec![(id, EdgeLabel::Normal)])?
            }
            AstKind::If => {
                let (cond, truth) = self.head(&ast.children[0], &preds);
                let mut out =
                    self.statement(&ast.children[1], Self::branch(cond, truth, EdgeLabel::True))?;
                let else_in = Self::branch(cond, truth, EdgeLabel::False);
                match ast.children.get(2) {
                    Some(else_branch) => out.extend(self.statement(else_branch, else_in)?),
                    None => out.extend(else_in),
                }
                out
            }
            AstKind::While => {
                let (head, truth) = self.head(&ast.children[0], &preds);
                self.loop_body(head, truth, &ast.children[1], None)?
            }
            AstKind::For => {
                let [init, cond, step, body] = &ast.children[..] else {
                    return Err(IrError::MalformedFunction(self.function.clone()));
                };
                let mut cur = preds;
                if init.kind != AstKind::EmptyStatement {
                    cur = vec![(self.simple(init, &cur), EdgeLabel::Normal)];
                }
                let (head, truth) = self.head(cond, &cur);
                let step = (step.kind != AstKind::EmptyStatement).then_some(step);
                self.loop_body(head, truth, body, step)?
            }
            _ => return Err(IrError::MalformedFunction(self.function.clone())),
        })
    }

    fn loop_body(
        &mut self,
        head: NodeId,
        truth: Option<bool>,
        body: &Arc<AstNode>,
        step: Option<&Arc<AstNode>>,
    ) -> Result<Vec<Pending>, IrError> {
        self.loops.push(LoopFrame::default());
        let mut back = self.statement(body, Self::branch(head, truth, EdgeLabel::True))?;
        let frame = self.loops.pop().unwrap_or_default();
        back.extend(frame.continues);
        if let Some(step) = step {
            back = vec![(self.simple(step, &back), EdgeLabel::Normal)];
        }
        self.connect(&back, head);
        let mut out = Self::branch(head, truth, EdgeLabel::False);
        out.extend(frame.breaks);
        Ok(out)
    }
}

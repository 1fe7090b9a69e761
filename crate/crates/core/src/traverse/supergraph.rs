use std::collections::HashMap;
use std::sync::Arc;

use crate::frontend::{AstKind, AstNode};
use crate::ir::{CfgNode, EdgeLabel, Function, NodeId, TranslationUnit};

use super::CallFrame;

/// Index of an interned call context (a stack of frames).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContextId(pub u32);

impl ContextId {
    pub const ROOT: ContextId = ContextId(0);
}

/// A CFG node under a particular call context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub ctx: ContextId,
    pub node: NodeId,
}

struct Context {
    frames: Vec<Arc<CallFrame>>,
    parent: Option<ContextId>,
}

/// The CFG of a root function with callee CFGs spliced in at call sites.
///
/// Descent happens at a node for every call whose callee is defined in the
/// unit, is active at most once so far (the root counts), and would not
/// exceed `max_call_depth`; recursion thus unrolls one level. Several such
/// calls at one node are entered one after another, in evaluation order.
/// Other calls are opaque.
///
/// Contexts are interned lazily as successors are requested, so the graph
/// is finite: no function is active more than twice and depth is bounded.
pub struct Supergraph<'u> {
    unit: &'u TranslationUnit,
    root: &'u Function,
    interprocedural: bool,
    max_call_depth: usize,
    contexts: Vec<Context>,
    interned: HashMap<(ContextId, NodeId, usize), ContextId>,
}

impl<'u> Supergraph<'u> {
    pub fn new(
        unit: &'u TranslationUnit,
        root: &'u Function,
        interprocedural: bool,
        max_call_depth: usize,
    ) -> Self {
        Self {
            unit,
            root,
            interprocedural,
            max_call_depth: max_call_depth.max(1),
            contexts: vec![Context {
                frames: Vec::new(),
                parent: None,
            }],
            interned: HashMap::new(),
        }
    }

    pub fn unit(&self) -> &'u TranslationUnit {
        self.unit
    }

    pub fn root(&self) -> &'u Function {
        self.root
    }

    pub fn entry(&self) -> Point {
        Point {
            ctx: ContextId::ROOT,
            node: self.root.cfg.entry,
        }
    }

    pub fn exit(&self) -> Point {
        Point {
            ctx: ContextId::ROOT,
            node: self.root.cfg.exit,
        }
    }

    pub fn frames(&self, ctx: ContextId) -> &[Arc<CallFrame>] {
        &self.contexts[ctx.0 as usize].frames
    }

    /// The function whose CFG the point belongs to.
    pub fn function(&self, p: Point) -> &'u Function {
        match self.frames(p.ctx).last() {
            Some(frame) => self
                .unit
                .function(&frame.callee)
                .expect("frames only name defined callees"),
            None => self.root,
        }
    }

    pub fn node(&self, p: Point) -> &'u CfgNode {
        self.function(p).cfg.node(p.node)
    }

    /// Calls at `p` that would be descended into, in evaluation order.
    pub fn descendable_calls(&self, p: Point) -> Vec<(Arc<AstNode>, &'u Function)> {
        if !self.interprocedural {
            return Vec::new();
        }
        let frames = self.frames(p.ctx);
        if frames.len() >= self.max_call_depth {
            return Vec::new();
        }
        self.node(p)
            .calls()
            .into_iter()
            .filter_map(|call| {
                let callee = self.unit.function(call.direct_callee()?)?;
                // a recursive callee is entered once more, then left opaque
                let active = usize::from(callee.name == self.root().name)
                    + frames.iter().filter(|f| f.callee == callee.name).count();
                (active < 2).then_some((call, callee))
            })
            .collect()
    }

    fn enter(&mut self, ctx: ContextId, site: Point, index: usize) -> ContextId {
        if let Some(&id) = self.interned.get(&(ctx, site.node, index)) {
            return id;
        }
        let calls = self.descendable_calls(site);
        let (call, callee) = &calls[index];
        let caller = self.function(site);
        let frame = CallFrame::new(caller, self.node(site), site.node, index, call, callee);
        let mut frames = self.frames(ctx).to_vec();
        frames.push(Arc::new(frame));
        let id = ContextId(self.contexts.len() as u32);
        self.contexts.push(Context {
            frames,
            parent: Some(ctx),
        });
        self.interned.insert((ctx, site.node, index), id);
        id
    }

    /// Forward successors, with the CFG edge label where there is one
    /// (`Normal` for call and return edges).
    pub fn successors(&mut self, p: Point) -> Vec<(Point, EdgeLabel)> {
        if !self.descendable_calls(p).is_empty() {
            let ctx = self.enter(p.ctx, p, 0);
            let entry = self.function(Point { ctx, node: p.node }).cfg.entry;
            return vec![(Point { ctx, node: entry }, EdgeLabel::Normal)];
        }
        let function = self.function(p);
        if p.node == function.cfg.exit {
            let Some(parent) = self.contexts[p.ctx.0 as usize].parent else {
                return Vec::new();
            };
            let frame = Arc::clone(self.frames(p.ctx).last().expect("non-root context"));
            let site = Point {
                ctx: parent,
                node: frame.call_site,
            };
            let next = frame.call_index + 1;
            if next < self.descendable_calls(site).len() {
                let ctx = self.enter(parent, site, next);
                let entry = self.function(Point { ctx, node: site.node }).cfg.entry;
                return vec![(Point { ctx, node: entry }, EdgeLabel::Normal)];
            }
            return self.cfg_successors(site);
        }
        self.cfg_successors(p)
    }

    fn cfg_successors(&self, p: Point) -> Vec<(Point, EdgeLabel)> {
        self.function(p)
            .cfg
            .successors(p.node)
            .iter()
            .map(|e| {
                (
                    Point {
                        ctx: p.ctx,
                        node: e.target,
                    },
                    e.label,
                )
            })
            .collect()
    }

    /// Backward neighbours: the mirror image of [`Supergraph::successors`].
    pub fn predecessors(&mut self, p: Point) -> Vec<Point> {
        let function = self.function(p);
        if p.node == function.cfg.entry {
            let Some(parent) = self.contexts[p.ctx.0 as usize].parent else {
                return Vec::new();
            };
            let frame = Arc::clone(self.frames(p.ctx).last().expect("non-root context"));
            let site = Point {
                ctx: parent,
                node: frame.call_site,
            };
            if frame.call_index == 0 {
                return vec![site];
            }
            let ctx = self.enter(parent, site, frame.call_index - 1);
            let exit = self.function(Point { ctx, node: site.node }).cfg.exit;
            return vec![Point { ctx, node: exit }];
        }
        let preds: Vec<NodeId> = function.cfg.predecessors(p.node).to_vec();
        let mut out = Vec::with_capacity(preds.len());
        for m in preds {
            let site = Point { ctx: p.ctx, node: m };
            let n = self.descendable_calls(site).len();
            if n == 0 {
                out.push(site);
            } else {
                let ctx = self.enter(p.ctx, site, n - 1);
                let exit = self.function(Point { ctx, node: m }).cfg.exit;
                out.push(Point { ctx, node: exit });
            }
        }
        out
    }
}

/// `x` when the call is used as `x = g(...)` or `T x = g(...)`.
pub(crate) fn result_target(site: &CfgNode, call: &Arc<AstNode>) -> Option<Arc<AstNode>> {
    let ast = site.ast.as_ref()?;
    let is_call = |n: &Arc<AstNode>| Arc::ptr_eq(n, call);
    match ast.kind {
        AstKind::ExprStatement => {
            let e = ast.children.first()?;
            (e.kind == AstKind::Assign && is_call(&e.children[1])).then(|| Arc::clone(&e.children[0]))
        }
        AstKind::Assign if is_call(&ast.children[1]) => Some(Arc::clone(&ast.children[0])),
        AstKind::VarDecl => {
            let init = ast.children.first()?;
            is_call(init).then(|| {
                Arc::new(AstNode::new(
                    AstKind::Identifier,
                    ast.text.clone(),
                    ast.location.clone(),
                ))
            })
        }
        _ => None,
    }
}

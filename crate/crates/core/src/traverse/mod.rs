//! CFG traversal: forward or backward, breadth- or depth-first, optionally
//! descending into callees defined in the same unit, driven by a visitor.

mod supergraph;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use crate::frontend::{AstKind, AstNode};
use crate::ir::{CfgNode, Function, NodeId, TranslationUnit};

pub use supergraph::{ContextId, Point, Supergraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    #[default]
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Order {
    BreadthFirst,
    #[default]
    DepthFirst,
}

/// What the visitor wants next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Visit {
    Continue,
    /// Do not follow this node's successors on the current path.
    PruneBranch,
    StopAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraversalSpec {
    pub direction: Direction,
    pub order: Order,
    pub interprocedural: bool,
    /// At least 1; smaller values are treated as 1.
    pub max_call_depth: usize,
}

impl Default for TraversalSpec {
    fn default() -> Self {
        Self {
            direction: Direction::Forward,
            order: Order::DepthFirst,
            interprocedural: false,
            max_call_depth: 16,
        }
    }
}

impl TraversalSpec {
    pub fn forward_dfs() -> Self {
        Self::default()
    }

    pub fn interprocedural(mut self) -> Self {
        self.interprocedural = true;
        self
    }

    pub fn backward(mut self) -> Self {
        self.direction = Direction::Backward;
        self
    }

    pub fn breadth_first(mut self) -> Self {
        self.order = Order::BreadthFirst;
        self
    }
}

/// One frame of the call context: a call site in the caller and the
/// positional pairing of its actual arguments with the callee's formals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallFrame {
    pub caller: String,
    pub call_site: NodeId,
    /// Which of the descended calls at `call_site` this frame is.
    pub call_index: usize,
    pub call: Arc<AstNode>,
    pub callee: String,
    pub actuals: Vec<Arc<AstNode>>,
    pub formals: Vec<String>,
    pub caller_locals: BTreeSet<String>,
    pub callee_locals: BTreeSet<String>,
    /// `x` for call sites of the form `x = g(...)`.
    pub result_target: Option<Arc<AstNode>>,
}

impl CallFrame {
    pub fn new(
        caller: &Function,
        site: &CfgNode,
        call_site: NodeId,
        call_index: usize,
        call: &Arc<AstNode>,
        callee: &Function,
    ) -> Self {
        Self {
            caller: caller.name.clone(),
            call_site,
            call_index,
            call: Arc::clone(call),
            callee: callee.name.clone(),
            actuals: call.children[1..].to_vec(),
            formals: callee.params.clone(),
            caller_locals: caller.locals.clone(),
            callee_locals: callee.locals.clone(),
            result_target: supergraph::result_target(site, call),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapDirection {
    CallerToCallee,
    CalleeToCaller,
}

/// Rewrites an expression across a call boundary.
///
/// Caller to callee replaces every occurrence of an actual argument by the
/// matching formal; callee to caller replaces formals by actuals. Returns
/// `None` when the expression still mentions a local of the source side
/// that has no counterpart, or when the call's arity does not match the
/// definition.
pub fn map_expression(
    expr: &Arc<AstNode>,
    frame: &CallFrame,
    direction: MapDirection,
) -> Option<Arc<AstNode>> {
    if frame.actuals.len() != frame.formals.len() {
        return None;
    }
    match direction {
        MapDirection::CallerToCallee => to_callee(expr, frame),
        MapDirection::CalleeToCaller => to_caller(expr, frame),
    }
}

fn to_callee(expr: &Arc<AstNode>, frame: &CallFrame) -> Option<Arc<AstNode>> {
    if let Some(i) = frame.actuals.iter().position(|a| a.same_shape(expr)) {
        return Some(Arc::new(AstNode::new(
            AstKind::Identifier,
            frame.formals[i].clone(),
            expr.location.clone(),
        )));
    }
    if expr.kind == AstKind::Identifier {
        return (!frame.caller_locals.contains(&expr.text)).then(|| Arc::clone(expr));
    }
    rebuild(expr, |c| to_callee(c, frame))
}

fn to_caller(expr: &Arc<AstNode>, frame: &CallFrame) -> Option<Arc<AstNode>> {
    if expr.kind == AstKind::Identifier {
        if let Some(i) = frame.formals.iter().position(|f| *f == expr.text) {
            return Some(Arc::clone(&frame.actuals[i]));
        }
        return (!frame.callee_locals.contains(&expr.text)).then(|| Arc::clone(expr));
    }
    rebuild(expr, |c| to_caller(c, frame))
}

fn rebuild(
    expr: &Arc<AstNode>,
    mut f: impl FnMut(&Arc<AstNode>) -> Option<Arc<AstNode>>,
) -> Option<Arc<AstNode>> {
    if expr.children.is_empty() {
        return Some(Arc::clone(expr));
    }
    let children = expr.children.iter().map(&mut f).collect::<Option<Vec<_>>>()?;
    let mut node = (**expr).clone();
    node.children = children;
    Some(Arc::new(node))
}

/// Maps the callee's `return E;` to `x = E'` in the caller for call sites
/// of the form `x = g(...)`.
pub fn map_return(value: &Arc<AstNode>, frame: &CallFrame) -> Option<Arc<AstNode>> {
    let target = frame.result_target.as_ref()?;
    let mapped = map_expression(value, frame, MapDirection::CalleeToCaller)?;
    Some(Arc::new(
        AstNode::new(AstKind::Assign, "=", target.location.clone())
            .with_children(vec![Arc::clone(target), mapped]),
    ))
}

/// What the visitor is shown for each node.
pub struct VisitContext<'a, 'u> {
    pub point: Point,
    pub node: &'u CfgNode,
    pub function: &'u Function,
    pub frames: &'a [Arc<CallFrame>],
    parents: &'a HashMap<Point, Option<Point>>,
}

impl VisitContext<'_, '_> {
    /// The traversal-tree path from the start node to this node.
    pub fn path(&self) -> Vec<Point> {
        let mut path = vec![self.point];
        let mut cur = self.point;
        while let Some(Some(p)) = self.parents.get(&cur) {
            path.push(*p);
            cur = *p;
        }
        path.reverse();
        path
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TraversalOutcome {
    /// Points in visitation order.
    pub visited: Vec<Point>,
    pub stopped: bool,
}

impl TraversalOutcome {
    pub fn nodes(&self) -> Vec<NodeId> {
        self.visited.iter().map(|p| p.node).collect()
    }
}

/// Walks `function`'s CFG per `spec`, calling `visitor` once per node
/// (per call context when interprocedural). Starts at entry when going
/// forward and at exit when going backward.
pub fn traverse<F>(
    unit: &TranslationUnit,
    function: &Function,
    spec: &TraversalSpec,
    mut visitor: F,
) -> TraversalOutcome
where
    F: FnMut(&VisitContext<'_, '_>) -> Visit,
{
    let mut graph = Supergraph::new(unit, function, spec.interprocedural, spec.max_call_depth);
    let start = match spec.direction {
        Direction::Forward => graph.entry(),
        Direction::Backward => graph.exit(),
    };
    let mut parents: HashMap<Point, Option<Point>> = HashMap::new();
    let mut seen: HashSet<Point> = HashSet::new();
    let mut outcome = TraversalOutcome::default();
    let mut work: VecDeque<(Point, Option<Point>)> = VecDeque::from([(start, None)]);
    if spec.order == Order::BreadthFirst {
        seen.insert(start);
    }
    loop {
        let next = match spec.order {
            Order::DepthFirst => work.pop_back(),
            Order::BreadthFirst => work.pop_front(),
        };
        let Some((p, parent)) = next else {
            break;
        };
        if spec.order == Order::DepthFirst && !seen.insert(p) {
            continue;
        }
        parents.insert(p, parent);
        outcome.visited.push(p);
        let verdict = {
            let cx = VisitContext {
                point: p,
                node: graph.node(p),
                function: graph.function(p),
                frames: graph.frames(p.ctx),
                parents: &parents,
            };
            visitor(&cx)
        };
        match verdict {
            Visit::StopAll => {
                outcome.stopped = true;
                break;
            }
            Visit::PruneBranch => continue,
            Visit::Continue => {}
        }
        let neighbours: Vec<Point> = match spec.direction {
            Direction::Forward => graph.successors(p).into_iter().map(|(q, _)| q).collect(),
            Direction::Backward => graph.predecessors(p),
        };
        match spec.order {
            Order::DepthFirst => {
                for q in neighbours.into_iter().rev() {
                    if !seen.contains(&q) {
                        work.push_back((q, Some(p)));
                    }
                }
            }
            Order::BreadthFirst => {
                for q in neighbours {
                    if seen.insert(q) {
                        work.push_back((q, Some(p)));
                    }
                }
            }
        }
    }
    outcome
}

/// Intraprocedural traversal; `spec.interprocedural` is ignored.
pub fn traverse_cfg<F>(
    unit: &TranslationUnit,
    function: &Function,
    spec: &TraversalSpec,
    visitor: F,
) -> TraversalOutcome
where
    F: FnMut(&VisitContext<'_, '_>) -> Visit,
{
    let spec = TraversalSpec {
        interprocedural: false,
        ..*spec
    };
    traverse(unit, function, &spec, visitor)
}

/// Traversal that descends into callees defined in the unit.
pub fn traverse_interprocedural<F>(
    unit: &TranslationUnit,
    function: &Function,
    spec: &TraversalSpec,
    visitor: F,
) -> TraversalOutcome
where
    F: FnMut(&VisitContext<'_, '_>) -> Visit,
{
    let spec = TraversalSpec {
        interprocedural: true,
        ..*spec
    };
    traverse(unit, function, &spec, visitor)
}

use std::fmt;
use std::sync::Arc;

/// A position in a source file. Lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SourceLocation {
    pub file: Arc<str>,
    pub line: u32,
    pub column: u32,
}

impl SourceLocation {
    pub fn new(file: impl Into<Arc<str>>, line: u32, column: u32) -> Self {
        debug_assert!(line >= 1 && column >= 1);
        Self {
            file: file.into(),
            line,
            column,
        }
    }
}

impl fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnaryOp {
    Deref,
    AddrOf,
    Not,
    Neg,
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Deref => "*",
            UnaryOp::AddrOf => "&",
            UnaryOp::Not => "!",
            UnaryOp::Neg => "-",
        }
    }

    fn name(self) -> &'static str {
        match self {
            UnaryOp::Deref => "deref",
            UnaryOp::AddrOf => "addrOf",
            UnaryOp::Not => "not",
            UnaryOp::Neg => "neg",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MemberAccess {
    Arrow,
    Dot,
}

/// Node kinds of the mini-C abstract syntax tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AstKind {
    TranslationUnitRoot,
    FunctionDef,
    ParamDecl,
    VarDecl,
    /// `struct NAME { fields };` at file scope. Children are field `VarDecl`s.
    StructDecl,
    Block,
    If,
    While,
    For,
    Return,
    Goto,
    Label,
    Break,
    Continue,
    ExprStatement,
    EmptyStatement,
    Assign,
    BinaryOp,
    UnaryOp(UnaryOp),
    Call,
    Member(MemberAccess),
    Index,
    Identifier,
    IntLiteral,
    StringLiteral,
    MetaVar,
}

impl AstKind {
    pub fn is_expression(self) -> bool {
        matches!(
            self,
            AstKind::Assign
                | AstKind::BinaryOp
                | AstKind::UnaryOp(_)
                | AstKind::Call
                | AstKind::Member(_)
                | AstKind::Index
                | AstKind::Identifier
                | AstKind::IntLiteral
                | AstKind::StringLiteral
                | AstKind::MetaVar
        )
    }
}

impl fmt::Display for AstKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AstKind::UnaryOp(op) => write!(f, "UnaryOp.{}", op.name()),
            AstKind::Member(MemberAccess::Arrow) => f.write_str("Member.arrow"),
            AstKind::Member(MemberAccess::Dot) => f.write_str("Member.dot"),
            other => write!(f, "{other:?}"),
        }
    }
}

/// One node of the syntax tree.
///
/// Children are shared (`Arc`) so that CFG nodes, pattern bindings and
/// error traces can hold onto subtrees without copying them.
///
/// `text` holds the token text where the kind needs one: identifier and
/// declaration names, literal spellings, operator symbols, member names,
/// label names, metavariable names. `ty` is the declared type for
/// declarations (`int *`, `struct mutex *`), otherwise `None`.
/// `end` is set on blocks and points at the closing brace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AstNode {
    pub kind: AstKind,
    pub text: String,
    pub ty: Option<String>,
    pub location: SourceLocation,
    pub end: Option<SourceLocation>,
    pub children: Vec<Arc<AstNode>>,
}

impl AstNode {
    pub fn new(kind: AstKind, text: impl Into<String>, location: SourceLocation) -> Self {
        Self {
            kind,
            text: text.into(),
            ty: None,
            location,
            end: None,
            children: Vec::new(),
        }
    }

    pub fn with_children(mut self, children: Vec<Arc<AstNode>>) -> Self {
        self.children = children;
        self
    }

    pub fn child(&self, index: usize) -> Option<&Arc<AstNode>> {
        self.children.get(index)
    }

    /// Structural equality: kind, text and children, ignoring locations.
    pub fn same_shape(&self, other: &AstNode) -> bool {
        self.kind == other.kind
            && self.text == other.text
            && self.children.len() == other.children.len()
            && self
                .children
                .iter()
                .zip(&other.children)
                .all(|(a, b)| a.same_shape(b))
    }

    /// Pre-order walk over this node and all of its descendants.
    pub fn descendants(self: &Arc<Self>) -> Descendants {
        Descendants {
            stack: vec![Arc::clone(self)],
        }
    }

    /// True if any identifier in the subtree is named `name`.
    pub fn mentions(&self, name: &str) -> bool {
        (self.kind == AstKind::Identifier && self.text == name)
            || self.children.iter().any(|c| c.mentions(name))
    }

    /// The callee name of a `Call` whose function position is a plain
    /// identifier.
    pub fn direct_callee(&self) -> Option<&str> {
        if self.kind != AstKind::Call {
            return None;
        }
        match self.children.first() {
            Some(f) if f.kind == AstKind::Identifier => Some(&f.text),
            _ => None,
        }
    }

    /// Renders an expression (or simple statement) as C source text.
    /// The output is canonical: the same shape always renders the same
    /// way regardless of the original spacing or parenthesization.
    pub fn to_source(&self) -> String {
        let mut out = String::new();
        render(self, &mut out, 0);
        out
    }
}

pub struct Descendants {
    stack: Vec<Arc<AstNode>>,
}

impl Iterator for Descendants {
    type Item = Arc<AstNode>;

    fn next(&mut self) -> Option<Self::Item> {
        let node = self.stack.pop()?;
        self.stack.extend(node.children.iter().rev().cloned());
        Some(node)
    }
}

/// Binding strength used by the renderer; mirrors the parser's levels.
fn precedence(node: &AstNode) -> u8 {
    match node.kind {
        AstKind::Assign => 1,
        AstKind::BinaryOp => binary_precedence(&node.text).unwrap_or(2),
        AstKind::UnaryOp(_) => 14,
        AstKind::Call | AstKind::Member(_) | AstKind::Index => 15,
        _ => 16,
    }
}

pub(crate) fn binary_precedence(op: &str) -> Option<u8> {
    Some(match op {
        "||" => 3,
        "&&" => 4,
        "|" => 5,
        "^" => 6,
        "&" => 7,
        "==" | "!=" => 8,
        "<" | ">" | "<=" | ">=" => 9,
        "<<" | ">>" => 10,
        "+" | "-" => 11,
        "*" | "/" | "%" => 12,
        _ => return None,
    })
}

fn render_operand(node: &AstNode, out: &mut String, min: u8) {
    if precedence(node) < min {
        out.push('(');
        render(node, out, 0);
        out.push(')');
    } else {
        render(node, out, min);
    }
}

fn render(node: &AstNode, out: &mut String, _min: u8) {
    let child = |i: usize| -> &AstNode { &node.children[i] };
    match node.kind {
        AstKind::Identifier | AstKind::IntLiteral | AstKind::StringLiteral => {
            out.push_str(&node.text)
        }
        AstKind::MetaVar => {
            out.push('%');
            out.push_str(&node.text);
        }
        AstKind::Assign => {
            render_operand(child(0), out, 2);
            out.push_str(" = ");
            render_operand(child(1), out, 1);
        }
        AstKind::BinaryOp => {
            let p = precedence(node);
            render_operand(child(0), out, p);
            out.push(' ');
            out.push_str(&node.text);
            out.push(' ');
            render_operand(child(1), out, p + 1);
        }
        AstKind::UnaryOp(op) => {
            out.push_str(op.symbol());
            render_operand(child(0), out, 14);
        }
        AstKind::Call => {
            render_operand(child(0), out, 15);
            out.push('(');
            for (i, arg) in node.children[1..].iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                render_operand(arg, out, 2);
            }
            out.push(')');
        }
        AstKind::Member(access) => {
            render_operand(child(0), out, 15);
            out.push_str(match access {
                MemberAccess::Arrow => "->",
                MemberAccess::Dot => ".",
            });
            out.push_str(&node.text);
        }
        AstKind::Index => {
            render_operand(child(0), out, 15);
            out.push('[');
            render(child(1), out, 0);
            out.push(']');
        }
        AstKind::ExprStatement => {
            render(child(0), out, 0);
            out.push(';');
        }
        AstKind::EmptyStatement => out.push(';'),
        AstKind::Return => {
            out.push_str("return");
            if let Some(value) = node.children.first() {
                out.push(' ');
                render(value, out, 0);
            }
            out.push(';');
        }
        AstKind::Goto => {
            out.push_str("goto ");
            out.push_str(&node.text);
            out.push(';');
        }
        AstKind::Label => {
            out.push_str(&node.text);
            out.push(':');
        }
        AstKind::Break => out.push_str("break;"),
        AstKind::Continue => out.push_str("continue;"),
        AstKind::VarDecl | AstKind::ParamDecl => {
            if let Some(ty) = &node.ty {
                out.push_str(ty);
                if !ty.ends_with('*') {
                    out.push(' ');
                }
            }
            out.push_str(&node.text);
            if let Some(init) = node.children.first() {
                out.push_str(" = ");
                render(init, out, 0);
            }
            if node.kind == AstKind::VarDecl {
                out.push(';');
            }
        }
        AstKind::If => {
            out.push_str("if (");
            render(child(0), out, 0);
            out.push(')');
        }
        AstKind::While => {
            out.push_str("while (");
            render(child(0), out, 0);
            out.push(')');
        }
        AstKind::For => out.push_str("for (...)"),
        AstKind::Block => out.push_str("{...}"),
        AstKind::FunctionDef => {
            out.push_str(&node.text);
            out.push_str("(...)");
        }
        AstKind::StructDecl => {
            out.push_str("struct ");
            out.push_str(&node.text);
        }
        AstKind::TranslationUnitRoot => out.push_str("<unit>"),
    }
}

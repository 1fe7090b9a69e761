use std::sync::Arc;

use super::ast::{binary_precedence, AstKind, AstNode, MemberAccess, SourceLocation, UnaryOp};
use super::lexer::{Lexer, Token, TokenKind};
use super::FrontendError;

const TYPE_WORDS: &[&str] = &[
    "int", "void", "char", "long", "short", "unsigned", "signed", "struct", "static", "extern",
    "const", "volatile", "inline",
];

const KEYWORDS: &[&str] = &[
    "if", "else", "while", "for", "return", "goto", "break", "continue", "int", "void", "char",
    "long", "short", "unsigned", "signed", "struct", "static", "extern", "const", "volatile",
    "inline", "switch", "case", "default", "do", "typedef", "sizeof", "union", "enum",
];

type Node = Arc<AstNode>;

/// Parses a whole translation unit.
pub fn parse(text: &str, file: &str) -> Result<AstNode, FrontendError> {
    let file: Arc<str> = Arc::from(file);
    let tokens = Lexer::new(text, Arc::clone(&file), false).tokenize()?;
    let mut parser = Parser { tokens, pos: 0 };
    parser.translation_unit(file)
}

/// Parses a single expression or statement with `%NAME` metavariables.
pub(crate) fn parse_template(text: &str, origin: &str) -> Result<AstNode, FrontendError> {
    let tokens = Lexer::new(text, Arc::from(origin), true).tokenize()?;
    let mut parser = Parser { tokens, pos: 0 };
    let node = if parser.starts_statement() {
        let mut stmts = parser.statement()?;
        if stmts.len() != 1 {
            return Err(parser.error("a pattern must be a single statement"));
        }
        unshare(stmts.pop().unwrap())
    } else {
        let expr = parser.expression()?;
        if parser.at_punct(";") {
            let semi = parser.bump();
            AstNode::new(AstKind::ExprStatement, "", semi.location).with_children(vec![expr])
        } else {
            unshare(expr)
        }
    };
    parser.expect_eof()?;
    Ok(node)
}

fn unshare(node: Node) -> AstNode {
    Arc::try_unwrap(node).unwrap_or_else(|rc| (*rc).clone())
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, offset: usize) -> &Token {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i]
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn at_punct(&self, p: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Punct(q) if *q == p)
    }

    fn at_word(&self, w: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(s) if s == w)
    }

    fn at_type_word(&self) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(s) if TYPE_WORDS.contains(&s.as_str()))
    }

    fn error(&self, message: impl Into<String>) -> FrontendError {
        let tok = self.peek();
        FrontendError::Syntax {
            location: tok.location.clone(),
            message: format!("{} (found {})", message.into(), tok.describe()),
        }
    }

    fn expect_punct(&mut self, p: &str) -> Result<Token, FrontendError> {
        if self.at_punct(p) {
            Ok(self.bump())
        } else {
            Err(self.error(format!("expected `{p}`")))
        }
    }

    fn expect_eof(&self) -> Result<(), FrontendError> {
        if self.peek().kind == TokenKind::Eof {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }

    fn identifier(&mut self) -> Result<(String, SourceLocation), FrontendError> {
        match &self.peek().kind {
            TokenKind::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                let name = name.clone();
                let tok = self.bump();
                Ok((name, tok.location))
            }
            _ => Err(self.error("expected identifier")),
        }
    }

    fn translation_unit(&mut self, file: Arc<str>) -> Result<AstNode, FrontendError> {
        let mut items = Vec::new();
        while self.peek().kind != TokenKind::Eof {
            items.extend(self.external_declaration()?);
        }
        Ok(AstNode::new(AstKind::TranslationUnitRoot, "", SourceLocation::new(file, 1, 1))
            .with_children(items))
    }

    /// Declaration specifiers, rendered as a normalized type string.
    fn specifiers(&mut self) -> Result<String, FrontendError> {
        let mut words: Vec<String> = Vec::new();
        let mut has_base = false;
        while self.at_type_word() {
            let TokenKind::Ident(word) = self.bump().kind else {
                unreachable!()
            };
            match word.as_str() {
                "static" | "extern" | "const" | "volatile" | "inline" => {}
                "struct" => {
                    let (tag, _) = self.identifier()?;
                    words.push(format!("struct {tag}"));
                    has_base = true;
                    // the body, if any, is handled by the caller
                    break;
                }
                _ => {
                    words.push(word);
                    has_base = true;
                }
            }
        }
        if !has_base {
            return Err(self.error("expected a type"));
        }
        Ok(words.join(" "))
    }

    /// `*`s followed by a name and optional constant array sizes.
    fn declarator(&mut self, base: &str) -> Result<(String, String, SourceLocation), FrontendError> {
        let mut ty = base.to_string();
        let mut stars = String::new();
        while self.at_punct("*") || self.at_word("const") {
            if self.bump().kind == TokenKind::Punct("*") {
                stars.push('*');
            }
        }
        if !stars.is_empty() {
            ty.push(' ');
            ty.push_str(&stars);
        }
        let (name, location) = self.identifier()?;
        while self.at_punct("[") {
            self.bump();
            let size = match &self.peek().kind {
                TokenKind::Int(n) => n.clone(),
                _ => return Err(self.error("array size must be an integer constant")),
            };
            self.bump();
            self.expect_punct("]")?;
            ty.push_str(&format!("[{size}]"));
        }
        Ok((name, ty, location))
    }

    fn external_declaration(&mut self) -> Result<Vec<Node>, FrontendError> {
        let start = self.peek().location.clone();
        let base = self.specifiers()?;
        if let Some(tag) = base.strip_prefix("struct ") {
            if self.at_punct("{") || self.at_punct(";") {
                return Ok(vec![self.struct_body(tag.to_string(), start)?]);
            }
        }
        let (name, ty, location) = self.declarator(&base)?;
        if self.at_punct("(") {
            return self.function(name, ty, location).map(|f| vec![f]);
        }
        self.init_declarators(base, name, ty, location)
    }

    fn struct_body(&mut self, tag: String, location: SourceLocation) -> Result<Node, FrontendError> {
        let mut fields = Vec::new();
        if self.at_punct("{") {
            self.bump();
            while !self.at_punct("}") {
                let base = self.specifiers()?;
                loop {
                    let (name, ty, loc) = self.declarator(&base)?;
                    let mut field = AstNode::new(AstKind::VarDecl, name, loc);
                    field.ty = Some(ty);
                    fields.push(Arc::new(field));
                    if self.at_punct(",") {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect_punct(";")?;
            }
            self.bump();
        }
        self.expect_punct(";")?;
        Ok(Arc::new(
            AstNode::new(AstKind::StructDecl, tag, location).with_children(fields),
        ))
    }

    fn init_declarators(
        &mut self,
        base: String,
        mut name: String,
        mut ty: String,
        mut location: SourceLocation,
    ) -> Result<Vec<Node>, FrontendError> {
        let mut decls = Vec::new();
        loop {
            let mut decl = AstNode::new(AstKind::VarDecl, name, location);
            decl.ty = Some(ty);
            if self.at_punct("=") {
                self.bump();
                decl.children.push(self.assignment()?);
            }
            decls.push(Arc::new(decl));
            if !self.at_punct(",") {
                break;
            }
            self.bump();
            (name, ty, location) = self.declarator(&base)?;
        }
        self.expect_punct(";")?;
        Ok(decls)
    }

    fn function(
        &mut self,
        name: String,
        return_ty: String,
        location: SourceLocation,
    ) -> Result<Node, FrontendError> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        let is_void_list = self.at_word("void") && self.peek_at(1).kind == TokenKind::Punct(")");
        if is_void_list {
            self.bump();
        }
        while !self.at_punct(")") {
            let base = self.specifiers()?;
            let mut ty = base.clone();
            let mut stars = String::new();
            while self.at_punct("*") || self.at_word("const") {
                if self.bump().kind == TokenKind::Punct("*") {
                    stars.push('*');
                }
            }
            if !stars.is_empty() {
                ty = format!("{base} {stars}");
            }
            let param = match &self.peek().kind {
                TokenKind::Ident(_) => {
                    let (pname, ploc) = self.identifier()?;
                    let mut p = AstNode::new(AstKind::ParamDecl, pname, ploc);
                    p.ty = Some(ty);
                    Some(p)
                }
                // unnamed parameters are only legal in prototypes
                _ => None,
            };
            params.push(param);
            if self.at_punct(",") {
                self.bump();
            } else if !self.at_punct(")") {
                return Err(self.error("expected `,` or `)` in parameter list"));
            }
        }
        self.bump();
        if self.at_punct(";") {
            self.bump();
            let mut proto = AstNode::new(AstKind::VarDecl, name, location);
            proto.ty = Some(format!("{return_ty} ()"));
            return Ok(Arc::new(proto));
        }
        if !self.at_punct("{") {
            return Err(self.error("expected function body"));
        }
        let mut children = Vec::with_capacity(params.len() + 1);
        for p in params {
            match p {
                Some(p) => children.push(Arc::new(p)),
                None => return Err(self.error("parameter name required in a definition")),
            }
        }
        children.push(self.block()?);
        let mut def = AstNode::new(AstKind::FunctionDef, name, location).with_children(children);
        def.ty = Some(return_ty);
        Ok(Arc::new(def))
    }

    fn block(&mut self) -> Result<Node, FrontendError> {
        let open = self.expect_punct("{")?;
        let mut stmts = Vec::new();
        while !self.at_punct("}") {
            if self.peek().kind == TokenKind::Eof {
                return Err(self.error("expected `}`"));
            }
            stmts.extend(self.statement()?);
        }
        let close = self.bump();
        let mut block = AstNode::new(AstKind::Block, "", open.location).with_children(stmts);
        block.end = Some(close.location);
        Ok(Arc::new(block))
    }

    fn starts_statement(&self) -> bool {
        match &self.peek().kind {
            TokenKind::Punct("{") | TokenKind::Punct(";") => true,
            TokenKind::Ident(w) => {
                matches!(
                    w.as_str(),
                    "if" | "while" | "for" | "return" | "goto" | "break" | "continue"
                ) || TYPE_WORDS.contains(&w.as_str())
            }
            _ => false,
        }
    }

    /// One statement. Declarations with several declarators yield several
    /// `VarDecl` nodes, which is why this returns a list.
    fn statement(&mut self) -> Result<Vec<Node>, FrontendError> {
        if self.at_type_word() {
            let base = self.specifiers()?;
            let (name, ty, location) = self.declarator(&base)?;
            return self.init_declarators(base, name, ty, location);
        }
        self.single_statement().map(|s| vec![s])
    }

    /// A statement in a position where exactly one is allowed.
    fn single_statement(&mut self) -> Result<Node, FrontendError> {
        let tok = self.peek().clone();
        let loc = tok.location.clone();
        let word = match &tok.kind {
            TokenKind::Punct("{") => return self.block(),
            TokenKind::Punct(";") => {
                self.bump();
                return Ok(Arc::new(AstNode::new(AstKind::EmptyStatement, "", loc)));
            }
            TokenKind::Ident(w) => w.clone(),
            _ => String::new(),
        };
        let node = match word.as_str() {
            "if" => {
                self.bump();
                self.expect_punct("(")?;
                let cond = self.expression()?;
                self.expect_punct(")")?;
                let then = self.single_statement()?;
                let mut children = vec![cond, then];
                if self.at_word("else") {
                    self.bump();
                    children.push(self.single_statement()?);
                }
                AstNode::new(AstKind::If, "", loc).with_children(children)
            }
            "while" => {
                self.bump();
                self.expect_punct("(")?;
                let cond = self.expression()?;
                self.expect_punct(")")?;
                let body = self.single_statement()?;
                AstNode::new(AstKind::While, "", loc).with_children(vec![cond, body])
            }
            "for" => {
                self.bump();
                self.expect_punct("(")?;
                let init = self.optional_expression(";")?;
                self.expect_punct(";")?;
                let cond = self.optional_expression(";")?;
                self.expect_punct(";")?;
                let step = self.optional_expression(")")?;
                self.expect_punct(")")?;
                let body = self.single_statement()?;
                AstNode::new(AstKind::For, "", loc).with_children(vec![init, cond, step, body])
            }
            "return" => {
                self.bump();
                let mut node = AstNode::new(AstKind::Return, "", loc);
                if !self.at_punct(";") {
                    node.children.push(self.expression()?);
                }
                self.expect_punct(";")?;
                node
            }
            "goto" => {
                self.bump();
                let (label, _) = self.identifier()?;
                self.expect_punct(";")?;
                AstNode::new(AstKind::Goto, label, loc)
            }
            "break" | "continue" => {
                self.bump();
                self.expect_punct(";")?;
                let kind = if word == "break" {
                    AstKind::Break
                } else {
                    AstKind::Continue
                };
                AstNode::new(kind, "", loc)
            }
            w if TYPE_WORDS.contains(&w) => {
                return Err(self.error("declaration not allowed here"));
            }
            "switch" | "case" | "default" | "do" | "typedef" | "sizeof" | "union" | "enum" => {
                return Err(self.error("construct outside the supported C subset"));
            }
            _ if matches!(tok.kind, TokenKind::Ident(_))
                && self.peek_at(1).kind == TokenKind::Punct(":") =>
            {
                let (label, _) = self.identifier()?;
                self.bump();
                let body = self.single_statement()?;
                AstNode::new(AstKind::Label, label, loc).with_children(vec![body])
            }
            _ => {
                let expr = self.expression()?;
                self.expect_punct(";")?;
                AstNode::new(AstKind::ExprStatement, "", loc).with_children(vec![expr])
            }
        };
        Ok(Arc::new(node))
    }

    /// An expression, or an `EmptyStatement` placeholder if the next token
    /// is `terminator` (used for the three clauses of `for`).
    fn optional_expression(&mut self, terminator: &str) -> Result<Node, FrontendError> {
        if self.at_punct(terminator) {
            Ok(Arc::new(AstNode::new(
                AstKind::EmptyStatement,
                "",
                self.peek().location.clone(),
            )))
        } else {
            self.expression()
        }
    }

    fn expression(&mut self) -> Result<Node, FrontendError> {
        self.assignment()
    }

    fn assignment(&mut self) -> Result<Node, FrontendError> {
        let lhs = self.binary(3)?;
        if self.at_punct("=") {
            self.bump();
            let rhs = self.assignment()?;
            let loc = lhs.location.clone();
            return Ok(Arc::new(
                AstNode::new(AstKind::Assign, "=", loc).with_children(vec![lhs, rhs]),
            ));
        }
        Ok(lhs)
    }

    /// Precedence climbing over the left-associative binary operators.
    fn binary(&mut self, min_prec: u8) -> Result<Node, FrontendError> {
        let mut lhs = self.unary()?;
        while let TokenKind::Punct(p) = self.peek().kind {
            let Some(prec) = binary_precedence(p).filter(|&prec| prec >= min_prec) else {
                break;
            };
            self.bump();
            let rhs = self.binary(prec + 1)?;
            let loc = lhs.location.clone();
            lhs = Arc::new(AstNode::new(AstKind::BinaryOp, p, loc).with_children(vec![lhs, rhs]));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, FrontendError> {
        let op = match &self.peek().kind {
            TokenKind::Punct("*") => Some(UnaryOp::Deref),
            TokenKind::Punct("&") => Some(UnaryOp::AddrOf),
            TokenKind::Punct("!") => Some(UnaryOp::Not),
            TokenKind::Punct("-") => Some(UnaryOp::Neg),
            _ => None,
        };
        match op {
            Some(op) => {
                let tok = self.bump();
                let operand = self.unary()?;
                Ok(Arc::new(
                    AstNode::new(AstKind::UnaryOp(op), op.symbol(), tok.location)
                        .with_children(vec![operand]),
                ))
            }
            None => self.postfix(),
        }
    }

    fn postfix(&mut self) -> Result<Node, FrontendError> {
        let mut expr = self.primary()?;
        loop {
            let loc = expr.location.clone();
            if self.at_punct("(") {
                self.bump();
                let mut children = vec![expr];
                while !self.at_punct(")") {
                    children.push(self.assignment()?);
                    if self.at_punct(",") {
                        self.bump();
                    } else if !self.at_punct(")") {
                        return Err(self.error("expected `,` or `)` in argument list"));
                    }
                }
                self.bump();
                expr = Arc::new(AstNode::new(AstKind::Call, "", loc).with_children(children));
            } else if self.at_punct("[") {
                self.bump();
                let index = self.expression()?;
                self.expect_punct("]")?;
                expr = Arc::new(
                    AstNode::new(AstKind::Index, "", loc).with_children(vec![expr, index]),
                );
            } else if self.at_punct("->") || self.at_punct(".") {
                let access = if self.bump().kind == TokenKind::Punct("->") {
                    MemberAccess::Arrow
                } else {
                    MemberAccess::Dot
                };
                let (field, _) = self.identifier()?;
                expr = Arc::new(
                    AstNode::new(AstKind::Member(access), field, loc).with_children(vec![expr]),
                );
            } else {
                return Ok(expr);
            }
        }
    }

    fn primary(&mut self) -> Result<Node, FrontendError> {
        let tok = self.peek().clone();
        let node = match tok.kind {
            TokenKind::Ident(ref name) if !KEYWORDS.contains(&name.as_str()) => {
                AstNode::new(AstKind::Identifier, name.clone(), tok.location)
            }
            TokenKind::Int(ref lit) => AstNode::new(AstKind::IntLiteral, lit.clone(), tok.location),
            TokenKind::Str(ref lit) => {
                AstNode::new(AstKind::StringLiteral, lit.clone(), tok.location)
            }
            TokenKind::MetaVar(ref name) => {
                AstNode::new(AstKind::MetaVar, name.clone(), tok.location)
            }
            TokenKind::Punct("(") => {
                self.bump();
                let inner = self.expression()?;
                self.expect_punct(")")?;
                return Ok(inner);
            }
            _ => return Err(self.error("expected expression")),
        };
        self.bump();
        Ok(Arc::new(node))
    }
}

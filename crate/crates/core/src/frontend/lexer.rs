use std::sync::Arc;

use super::ast::SourceLocation;
use super::FrontendError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(String),
    Str(String),
    /// `%NAME`, only produced in pattern mode.
    MetaVar(String),
    Punct(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub kind: TokenKind,
    pub location: SourceLocation,
}

impl Token {
    pub fn describe(&self) -> String {
        match &self.kind {
            TokenKind::Ident(s) | TokenKind::Int(s) | TokenKind::Str(s) => format!("`{s}`"),
            TokenKind::MetaVar(s) => format!("`%{s}`"),
            TokenKind::Punct(p) => format!("`{p}`"),
            TokenKind::Eof => "end of input".to_string(),
        }
    }
}

// Longest first so that greedy matching picks `->` over `-`.
const PUNCTUATORS: &[&str] = &[
    "->", "==", "!=", "<=", ">=", "&&", "||", "<<", ">>", "(", ")", "{", "}", "[", "]",
    ";", ",", ":", ".", "=", "<", ">", "+", "-", "*", "/", "%", "&", "|", "^", "!",
];

pub struct Lexer<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
    line: u32,
    col: u32,
    file: Arc<str>,
    pattern_mode: bool,
}

impl<'a> Lexer<'a> {
    pub fn new(text: &'a str, file: Arc<str>, pattern_mode: bool) -> Self {
        Self {
            src: text.as_bytes(),
            text,
            pos: 0,
            line: 1,
            col: 1,
            file,
            pattern_mode,
        }
    }

    pub fn tokenize(mut self) -> Result<Vec<Token>, FrontendError> {
        let mut tokens = Vec::new();
        loop {
            self.skip_trivia()?;
            let location = self.location();
            let Some(&c) = self.src.get(self.pos) else {
                tokens.push(Token {
                    kind: TokenKind::Eof,
                    location,
                });
                return Ok(tokens);
            };
            let kind = if c.is_ascii_alphabetic() || c == b'_' {
                TokenKind::Ident(self.take_while(is_ident_byte).to_string())
            } else if c.is_ascii_digit() {
                TokenKind::Int(self.take_while(|b| b.is_ascii_alphanumeric()).to_string())
            } else if c == b'"' {
                TokenKind::Str(self.quoted(b'"')?)
            } else if c == b'\'' {
                TokenKind::Int(self.quoted(b'\'')?)
            } else if c == b'%' && self.pattern_mode {
                self.bump();
                match self.src.get(self.pos) {
                    Some(&b) if b.is_ascii_alphabetic() || b == b'_' => {
                        TokenKind::MetaVar(self.take_while(is_ident_byte).to_string())
                    }
                    _ => {
                        return Err(FrontendError::Lex {
                            location,
                            message: "`%` must be followed by a metavariable name".into(),
                        })
                    }
                }
            } else if let Some(p) = PUNCTUATORS
                .iter()
                .find(|p| self.text[self.pos..].starts_with(**p))
            {
                for _ in 0..p.len() {
                    self.bump();
                }
                TokenKind::Punct(p)
            } else {
                let ch = self.text[self.pos..].chars().next().unwrap_or('?');
                return Err(FrontendError::Lex {
                    location,
                    message: format!("illegal character {ch:?}"),
                });
            };
            tokens.push(Token { kind, location });
        }
    }

    fn location(&self) -> SourceLocation {
        SourceLocation::new(Arc::clone(&self.file), self.line, self.col)
    }

    fn bump(&mut self) {
        if let Some(&b) = self.src.get(self.pos) {
            self.pos += 1;
            if b == b'\n' {
                self.line += 1;
                self.col = 1;
            } else if b & 0xC0 != 0x80 {
                self.col += 1;
            }
        }
    }

    fn take_while(&mut self, pred: impl Fn(u8) -> bool) -> &'a str {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|&b| pred(b)) {
            self.bump();
        }
        &self.text[start..self.pos]
    }

    fn quoted(&mut self, delim: u8) -> Result<String, FrontendError> {
        let location = self.location();
        let start = self.pos;
        self.bump();
        loop {
            match self.src.get(self.pos) {
                None | Some(b'\n') => {
                    return Err(FrontendError::Lex {
                        location,
                        message: "unterminated literal".into(),
                    })
                }
                Some(b'\\') => {
                    self.bump();
                    self.bump();
                }
                Some(&b) if b == delim => {
                    self.bump();
                    return Ok(self.text[start..self.pos].to_string());
                }
                Some(_) => self.bump(),
            }
        }
    }

    /// Skips whitespace, comments and preprocessor lines (`#` first on a
    /// line, e.g. line markers left by an external preprocessor).
    fn skip_trivia(&mut self) -> Result<(), FrontendError> {
        loop {
            match self.src.get(self.pos) {
                Some(b) if b.is_ascii_whitespace() => self.bump(),
                Some(b'#') if !self.pattern_mode && self.at_line_start() => {
                    while self.src.get(self.pos).is_some_and(|&b| b != b'\n') {
                        self.bump();
                    }
                }
                Some(b'/') if self.src.get(self.pos + 1) == Some(&b'/') => {
                    while self.src.get(self.pos).is_some_and(|&b| b != b'\n') {
                        self.bump();
                    }
                }
                Some(b'/') if self.src.get(self.pos + 1) == Some(&b'*') => {
                    let location = self.location();
                    self.bump();
                    self.bump();
                    loop {
                        match self.src.get(self.pos) {
                            None => {
                                return Err(FrontendError::Lex {
                                    location,
                                    message: "unterminated comment".into(),
                                })
                            }
                            Some(b'*') if self.src.get(self.pos + 1) == Some(&b'/') => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            Some(_) => self.bump(),
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn at_line_start(&self) -> bool {
        self.text[..self.pos]
            .bytes()
            .rev()
            .take_while(|&b| b != b'\n')
            .all(|b| b == b' ' || b == b'\t')
    }
}

fn is_ident_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

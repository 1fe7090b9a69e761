//! Line-oriented directive files shared by pattern, automaton and checker
//! configurations: one directive per line, words separated by whitespace,
//! `"..."` quoted strings with `\"` and `\\` escapes, `#` starts a comment.

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Word {
    Bare(String),
    Quoted(String),
}

impl Word {
    pub fn as_str(&self) -> &str {
        match self {
            Word::Bare(s) | Word::Quoted(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Directive {
    pub line: usize,
    pub words: Vec<Word>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct DirectiveError {
    pub line: usize,
    pub message: String,
}

impl DirectiveError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

/// Splits `text` into non-empty directives.
pub fn parse_directives(text: &str) -> Result<Vec<Directive>, DirectiveError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let words = split_line(line).map_err(|m| DirectiveError::new(i + 1, m))?;
        if !words.is_empty() {
            out.push(Directive { line: i + 1, words });
        }
    }
    Ok(out)
}

fn split_line(line: &str) -> Result<Vec<Word>, String> {
    let mut words = Vec::new();
    let mut chars = line.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '#' {
            break;
        } else if c == '"' {
            chars.next();
            let mut s = String::new();
            loop {
                match chars.next() {
                    None => return Err("unterminated string".into()),
                    Some('"') => break,
                    Some('\\') => match chars.next() {
                        Some(e @ ('"' | '\\')) => s.push(e),
                        Some(other) => {
                            s.push('\\');
                            s.push(other);
                        }
                        None => return Err("unterminated string".into()),
                    },
                    Some(ch) => s.push(ch),
                }
            }
            words.push(Word::Quoted(s));
        } else {
            let mut s = String::new();
            while let Some(&ch) = chars.peek() {
                if ch.is_whitespace() || ch == '"' || ch == '#' {
                    break;
                }
                s.push(ch);
                chars.next();
            }
            words.push(Word::Bare(s));
        }
    }
    Ok(words)
}

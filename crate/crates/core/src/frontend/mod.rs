//! Lexing and parsing of the supported C subset.
//!
//! The subset covers `int`/`void`/`char` (plus `long`/`short`/`unsigned`
//! spellings), struct declarations without typedefs, pointer and constant
//! array declarators, and the statements `if`/`else`, `while`, `for`,
//! `return`, `goto`, labels, `break`, `continue`, expression and empty
//! statements. Anything outside the subset is a syntax error.

mod ast;
mod lexer;
mod parser;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::{Command, Stdio};

pub use ast::{AstKind, AstNode, Descendants, MemberAccess, SourceLocation, UnaryOp};
pub use parser::parse;
pub(crate) use parser::parse_template;

use crate::config::{PreprocessMode, SourceDescriptor};

#[derive(Debug, thiserror::Error)]
pub enum FrontendError {
    #[error("{location}: lexical error: {message}")]
    Lex {
        location: SourceLocation,
        message: String,
    },
    #[error("{location}: syntax error: {message}")]
    Syntax {
        location: SourceLocation,
        message: String,
    },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("preprocessor failed on {path} ({status}): {diagnostics}")]
    Preprocess {
        path: PathBuf,
        status: String,
        diagnostics: String,
    },
}

/// Produces the text to parse for one source.
///
/// With [`PreprocessMode::None`] this is the file content. With an external
/// command, the command is run through `sh -c` with the descriptor's flags
/// followed by the file path as arguments, and its standard output is the
/// result.
pub fn preprocess(desc: &SourceDescriptor) -> Result<String, FrontendError> {
    let io_err = |source| FrontendError::Io {
        path: desc.path.clone(),
        source,
    };
    match &desc.preprocess_mode {
        PreprocessMode::None => std::fs::read_to_string(&desc.path).map_err(io_err),
        PreprocessMode::External(command) => {
            let child = Command::new("sh")
                .arg("-c")
                .arg(format!("{command} \"$@\""))
                .arg("sh")
                .args(&desc.preprocessor_flags)
                .arg(&desc.path)
                .stdin(Stdio::null())
                .stdout(Stdio::piped())
                .stderr(Stdio::piped())
                .spawn()
                .map_err(io_err)?;
            let output = child.wait_with_output().map_err(io_err)?;
            if !output.status.success() {
                return Err(FrontendError::Preprocess {
                    path: desc.path.clone(),
                    status: output.status.to_string(),
                    diagnostics: String::from_utf8_lossy(&output.stderr).trim().to_string(),
                });
            }
            String::from_utf8(output.stdout).map_err(|e| {
                io_err(std::io::Error::new(std::io::ErrorKind::InvalidData, e))
            })
        }
    }
}

/// Indented s-expression rendering, one node per line:
/// `(Kind "text" file:line:col` with the closing parentheses after the
/// last descendant.
pub fn dump_ast(root: &AstNode) -> String {
    let mut out = String::new();
    dump_node(root, 0, &mut out);
    out
}

fn dump_node(node: &AstNode, depth: usize, out: &mut String) {
    let _ = write!(
        out,
        "{:indent$}({} {:?} {}",
        "",
        node.kind,
        node.text,
        node.location,
        indent = depth * 2
    );
    if let Some(ty) = &node.ty {
        let _ = write!(out, " :type {ty:?}");
    }
    for child in &node.children {
        out.push('\n');
        dump_node(child, depth + 1, out);
    }
    out.push(')');
    if depth == 0 {
        out.push('\n');
    }
}

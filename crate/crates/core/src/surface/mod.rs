//! Concrete syntax: terms of the internal language, guarded-command
//! programs, model files and triple files.
//!
//! Term grammar:
//!
//! ```text
//! term   := "loop" ident "(" vars ")" "{" vars "." term "}"
//!         | ident "(" vars ")" branch*
//! branch := "{" vars "." term "}"
//! ```
//!
//! Programs add `skip`, `abort`, `;`, `if`, `while`, `assert`, the two
//! assignment forms and sampling on top of raw terms. Guards, predicates and
//! states have their own small operator languages; see [`parser`].

pub mod ast;
pub mod elab;
pub mod files;
pub mod lexer;
pub mod parser;
pub mod print;

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub use ast::{GuardAst, PredAst, Prog, StateAst, Stmt, StmtKind};
pub use elab::Elaborator;
pub use files::{load_model, parse_model, ProgramFile, TermFile, TripleFile, TripleSpec};
pub use parser::{parse_guard, parse_judgement, parse_pred, parse_program, parse_program_file, parse_state, parse_term};
pub use print::{print_guard, print_pred, print_program, print_state, print_term};

/// Byte range `[start, end)` in a source text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Span {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }

    /// Whether the span lies inside a text of `len` bytes.
    pub fn within(self, len: usize) -> bool {
        self.start <= self.end && self.end <= len
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// A located message. `code` is a stable machine-readable class such as
/// `syntax` or `model.row-mass`; `hint` names the rule that failed, if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: Span,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hint: Option<String>,
    pub code: &'static str,
}

impl Diagnostic {
    pub fn new(code: &'static str, span: Span, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            severity: Severity::Error,
            span,
            message: message.into(),
            hint: None,
            code,
        }
    }

    pub fn syntax(span: Span, message: impl Into<String>) -> Diagnostic {
        Diagnostic::new("syntax", span, message)
    }

    pub fn with_hint(mut self, hint: impl Into<String>) -> Diagnostic {
        self.hint = Some(hint.into());
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `file:line:col: error[code]: message` with the offending line and a
    /// caret underline.
    pub fn render(&self, path: &str, text: &str) -> String {
        let (line, col) = line_col(text, self.span.start);
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        let mut out = format!("{path}:{line}:{col}: {sev}[{}]: {}\n", self.code, self.message);
        if let Some(src) = text.lines().nth(line - 1) {
            let start = line_start(text, self.span.start);
            let lead = text[start..self.span.start].chars().count();
            let end = self.span.end.min(start + src.len()).max(self.span.start);
            let width = text[self.span.start..end].chars().count().max(1);
            out.push_str(&format!("  | {src}\n  | {}{}\n", " ".repeat(lead), "^".repeat(width)));
        }
        if let Some(h) = &self.hint {
            out.push_str(&format!("  = rule: {h}\n"));
        }
        out
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}: {}", self.span.start, self.span.end, self.message)
    }
}

fn line_start(text: &str, at: usize) -> usize {
    text[..at.min(text.len())].rfind('\n').map_or(0, |i| i + 1)
}

/// One-based line and column (in characters) of a byte offset.
pub fn line_col(text: &str, at: usize) -> (usize, usize) {
    let at = at.min(text.len());
    let line = text[..at].matches('\n').count() + 1;
    let col = text[line_start(text, at)..at].chars().count() + 1;
    (line, col)
}

/// Byte offset of a one-based line and column, clamped to the text.
pub fn offset_of(text: &str, line: usize, col: usize) -> usize {
    let mut start = 0;
    for _ in 1..line {
        match text[start..].find('\n') {
            Some(i) => start += i + 1,
            None => return text.len(),
        }
    }
    text[start..]
        .char_indices()
        .nth(col.saturating_sub(1))
        .map_or(text.len(), |(i, _)| start + i)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FileKind {
    Term,
    Program,
    Model,
    Triple,
}

impl FileKind {
    /// Infers the kind from the extension: `.icl`, `.gcl`, `.model.json`,
    /// `.triple.json`.
    pub fn of(path: &Path) -> Option<FileKind> {
        let name = path.file_name()?.to_str()?;
        if name.ends_with(".model.json") {
            Some(FileKind::Model)
        } else if name.ends_with(".triple.json") {
            Some(FileKind::Triple)
        } else if name.ends_with(".icl") {
            Some(FileKind::Term)
        } else if name.ends_with(".gcl") {
            Some(FileKind::Program)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug)]
pub struct SourceFile {
    pub path: PathBuf,
    pub text: String,
    pub kind: FileKind,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("{0}: unknown file kind (expected .icl, .gcl, .model.json or .triple.json)")]
    UnknownKind(PathBuf),
}

impl SourceFile {
    pub fn read(path: impl AsRef<Path>) -> Result<SourceFile, LoadError> {
        let path = path.as_ref().to_path_buf();
        let kind = FileKind::of(&path).ok_or_else(|| LoadError::UnknownKind(path.clone()))?;
        let text = std::fs::read_to_string(&path).map_err(|e| LoadError::Io(path.clone(), e))?;
        Ok(SourceFile { path, text, kind })
    }

    pub fn render(&self, d: &Diagnostic) -> String {
        d.render(&self.path.display().to_string(), &self.text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_and_column() {
        let t = "ab\ncdé\nf";
        assert_eq!(line_col(t, 0), (1, 1));
        assert_eq!(line_col(t, 4), (2, 2));
        assert_eq!(line_col(t, 8), (3, 1));
        assert_eq!(offset_of(t, 2, 2), 4);
        assert_eq!(offset_of(t, 3, 1), 8);
    }

    #[test]
    fn render_points_at_span() {
        let d = Diagnostic::syntax(Span::new(3, 5), "bad");
        let r = d.render("f.gcl", "x; yy z");
        assert!(r.starts_with("f.gcl:1:4: error[syntax]: bad"));
        assert!(r.contains("  |    ^^"));
    }

    #[test]
    fn kinds_from_extensions() {
        assert_eq!(FileKind::of(Path::new("a/b.model.json")), Some(FileKind::Model));
        assert_eq!(FileKind::of(Path::new("b.triple.json")), Some(FileKind::Triple));
        assert_eq!(FileKind::of(Path::new("t.icl")), Some(FileKind::Term));
        assert_eq!(FileKind::of(Path::new("p.gcl")), Some(FileKind::Program));
        assert_eq!(FileKind::of(Path::new("p.json")), None);
    }
}

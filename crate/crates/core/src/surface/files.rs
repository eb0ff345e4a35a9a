//! The four file kinds: `.icl` judgements, `.gcl` programs, `.model.json`
//! models and `.triple.json` triples.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::backends::BackendId;
use crate::combinators::StateSpace;
use crate::kernel::{alpha_eq, Context, Index, Name, Signature, SignatureError};
use crate::logics::coupling::{Answer, RelTriple, RelVerdict};
use crate::logics::triple::{Cell, Cond, Triple, TripleShape, Violation};
use crate::models::{Model, ModelError, ModelFile};
use crate::StochQ;

use super::ast::{Prog, RawTerm};
use super::elab::{check_raw, Elaborator};
use super::parser::{parse_context, parse_judgement, parse_pred, parse_program, parse_program_file, parse_state};
use super::print::{print_pred, print_program, print_program_inline, print_state};
use super::{offset_of, Diagnostic, FileKind, SourceFile, Span};

/// A `.icl` file: `ctx |- term : index`.
#[derive(Clone, Debug)]
pub struct TermFile {
    pub ctx: Context,
    pub term: RawTerm,
    pub idx: Index,
}

impl TermFile {
    pub fn print(&self) -> String {
        let ctx = if self.ctx.is_empty() { String::new() } else { format!("{} ", self.ctx) };
        let idx = if self.idx.is_empty() { String::new() } else { format!(" {}", self.idx) };
        format!("{ctx}|- {} :{idx}\n", self.term.term)
    }
}

/// A `.gcl` file: a state declaration followed by a program.
#[derive(Clone, Debug)]
pub struct ProgramFile {
    pub ctx: Context,
    pub prog: Prog,
}

impl ProgramFile {
    pub fn print(&self) -> String {
        format!("state {};\n{}\n", self.ctx, print_program(&self.prog))
    }
}

/// A diagnostic together with the file it points into.
#[derive(Clone, Debug)]
pub struct FileDiagnostic {
    pub path: PathBuf,
    pub text: String,
    pub diag: Diagnostic,
}

impl FileDiagnostic {
    pub fn new(path: &Path, text: &str, diag: Diagnostic) -> Self {
        FileDiagnostic {
            path: path.to_path_buf(),
            text: text.to_string(),
            diag,
        }
    }

    pub fn render(&self) -> String {
        self.diag.render(&self.path.display().to_string(), &self.text)
    }
}

impl fmt::Display for FileDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

// models

/// Offset of the first occurrence of `"key"` used as an object key at or
/// after `from`.
fn key_offset(text: &str, key: &str, from: usize) -> Option<usize> {
    let pat = format!("\"{key}\"");
    let mut at = from;
    while let Some(i) = text.get(at..)?.find(&pat) {
        let start = at + i;
        let rest = text[start + pat.len()..].trim_start();
        if rest.starts_with(':') {
            return Some(start);
        }
        at = start + pat.len();
    }
    None
}

fn key_span(text: &str, key: &str, from: usize) -> Option<Span> {
    key_offset(text, key, from).map(|i| Span::new(i, i + key.len() + 2))
}

fn json_diag(text: &str, e: &serde_json::Error) -> Diagnostic {
    let at = offset_of(text, e.line().max(1), e.column());
    let end = (at + text[at..].chars().next().map_or(0, char::len_utf8)).min(text.len());
    Diagnostic::new("json", Span::new(at, end), e.to_string())
}

fn model_code(e: &ModelError) -> &'static str {
    match e {
        ModelError::Signature(SignatureError::UnknownType { .. }) => "model.unknown-type",
        ModelError::Signature(_) => "model.signature",
        ModelError::UnknownType(_) => "model.unknown-type",
        ModelError::EmptyCarrier(_) => "model.empty-carrier",
        ModelError::DuplicateElement { .. } => "model.duplicate-element",
        ModelError::ArityMismatch { .. } => "model.arity",
        ModelError::BadIndex { .. } => "model.bad-index",
        ModelError::NonRational { .. } => "model.non-rational",
        ModelError::NegativeWeight { .. } => "model.negative-weight",
        ModelError::RowMassExceedsOne { .. } => "model.row-mass",
        ModelError::NotPartial { .. } => "model.not-partial",
        ModelError::UnknownGenerator(_) => "model.unknown-generator",
    }
}

/// Where in the file a model error belongs: the generator's entry, the
/// offending table inside it, or the type's entry.
fn model_span(text: &str, e: &ModelError) -> Span {
    let gen_table = |gen: &Name, table: Option<&str>| {
        let g = key_offset(text, gen.as_str(), 0)?;
        match table.and_then(|t| key_span(text, t, g)) {
            Some(s) => Some(s),
            None => key_span(text, gen.as_str(), g),
        }
    };
    let found = match e {
        ModelError::ArityMismatch { gen, backend, .. } | ModelError::BadIndex { gen, backend, .. } => {
            gen_table(gen, Some(backend.as_str()))
        }
        ModelError::NonRational { gen, .. }
        | ModelError::NegativeWeight { gen, .. }
        | ModelError::RowMassExceedsOne { gen, .. } => gen_table(gen, Some("stoch")),
        ModelError::NotPartial { gen, .. } => gen_table(gen, Some("par")),
        ModelError::UnknownGenerator(g) => gen_table(g, None).or_else(|| key_span(text, "order", 0)),
        ModelError::UnknownType(t) | ModelError::Signature(SignatureError::UnknownType { ty: t, .. }) => {
            let quoted = format!("\"{t}\"");
            text.find(&quoted).map(|i| Span::new(i, i + quoted.len()))
        }
        ModelError::EmptyCarrier(t) | ModelError::DuplicateElement { ty: t, .. } => key_span(text, t.as_str(), 0),
        ModelError::Signature(_) => key_span(text, "order", 0).or_else(|| key_span(text, "generators", 0)),
    };
    found.unwrap_or_else(|| Span::new(0, text.chars().next().map_or(0, char::len_utf8)))
}

pub fn model_diag(text: &str, e: &ModelError) -> Diagnostic {
    Diagnostic::new(model_code(e), model_span(text, e), e.to_string())
}

/// Parses and validates a model file.
pub fn parse_model(text: &str) -> Result<(ModelFile, Model), Diagnostic> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| json_diag(text, &e))?;
    let model = file.to_model().map_err(|e| model_diag(text, &e))?;
    Ok((file, model))
}

pub fn load_model(path: &Path) -> Result<Model, FileDiagnostic> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        FileDiagnostic::new(path, "", Diagnostic::new("io", Span::default(), e.to_string()))
    })?;
    parse_model(&text)
        .map(|(_, m)| m)
        .map_err(|d| FileDiagnostic::new(path, &text, d))
}

// triples

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelRef {
    Path(String),
    Inline(ModelFile),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Backends {
    One(BackendId),
    Many(Vec<BackendId>),
}

impl Backends {
    pub fn list(&self) -> Vec<BackendId> {
        match self {
            Backends::One(b) => vec![*b],
            Backends::Many(bs) => bs.clone(),
        }
    }
}

/// The JSON document of a `.triple.json` file. Program text lives in
/// strings; `state` is a context such as `"x: Bool, y: Bool"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub shape: String,
    pub state: String,
    pub pre: String,
    pub cmd: String,
    pub post: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_state: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_cmd: Option<String>,
    pub model: ModelRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backend: Option<Backends>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Answer>,
}

#[derive(Clone, Debug)]
pub enum Checkable {
    Unary(Triple),
    Rel(RelTriple),
}

/// A loaded, elaborated triple file.
#[derive(Clone, Debug)]
pub struct TripleFile {
    pub spec: TripleSpec,
    pub shape: TripleShape,
    pub model: Model,
    pub triple: Checkable,
}

/// The verdict on one backend.
#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub backend: BackendId,
    pub verdict: Answer,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Offset in `text` of the first character of the string value under `key`.
fn value_offset(text: &str, key: &str) -> Option<usize> {
    let k = key_offset(text, key, 0)?;
    let after = k + key.len() + 2;
    let colon = after + text[after..].find(':')?;
    let quote = colon + 1 + text[colon + 1..].find('"')?;
    Some(quote + 1)
}

/// Moves a diagnostic from inside a JSON string value to the file.
fn shift(text: &str, key: &str, mut d: Diagnostic) -> Diagnostic {
    match value_offset(text, key) {
        Some(base) => {
            d.span = Span::new((base + d.span.start).min(text.len()), (base + d.span.end).min(text.len()));
        }
        None => d.span = Span::default(),
    }
    d
}

fn is_state(shape: TripleShape) -> bool {
    shape.cell() == Cell::State
}

fn canonical_cond(shape: TripleShape, s: &str) -> Result<String, Diagnostic> {
    Ok(if is_state(shape) { print_state(&parse_state(s)?) } else { print_pred(&parse_pred(s)?) })
}

impl TripleSpec {
    /// The same document with every program text in canonical form.
    pub fn canonical(&self, text: &str) -> Result<TripleSpec, Diagnostic> {
        let shape: TripleShape = self
            .shape
            .parse()
            .map_err(|m: String| Diagnostic::new("triple.shape", key_span(text, "shape", 0).unwrap_or_default(), m))?;
        let mut out = self.clone();
        let ctx = |key: &str, s: &str| parse_context(s).map(|c| c.to_string()).map_err(|d| shift(text, key, d));
        let prog = |key: &str, s: &str| {
            parse_program(s)
                .map(|p| print_program_inline(&p))
                .map_err(|d| shift(text, key, d))
        };
        out.state = ctx("state", &self.state)?;
        out.pre = canonical_cond(shape, &self.pre).map_err(|d| shift(text, "pre", d))?;
        out.cmd = prog("cmd", &self.cmd)?;
        out.post = canonical_cond(shape, &self.post).map_err(|d| shift(text, "post", d))?;
        if let Some(s) = &self.right_state {
            out.right_state = Some(ctx("right_state", s)?);
        }
        if let Some(s) = &self.right_cmd {
            out.right_cmd = Some(prog("right_cmd", s)?);
        }
        Ok(out)
    }

    pub fn to_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("triple files serialize");
        s.push('\n');
        s
    }
}

impl TripleFile {
    /// Reads a triple file and the model it refers to; model paths are
    /// relative to the triple file.
    pub fn load(path: &Path) -> Result<TripleFile, FileDiagnostic> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            FileDiagnostic::new(path, "", Diagnostic::new("io", Span::default(), e.to_string()))
        })?;
        let here = |d: Diagnostic| FileDiagnostic::new(path, &text, d);
        let spec: TripleSpec = serde_json::from_str(&text).map_err(|e| here(json_diag(&text, &e)))?;
        let model = match &spec.model {
            ModelRef::Inline(m) => m.to_model().map_err(|e| {
                let mut d = model_diag(&text, &e);
                if d.span == Span::default() {
                    d.span = key_span(&text, "model", 0).unwrap_or_default();
                }
                here(d)
            })?,
            ModelRef::Path(p) => load_model(&path.parent().unwrap_or(Path::new(".")).join(p))?,
        };
        Self::from_spec(spec, model, &text).map_err(here)
    }

    /// Elaborates a spec against a model; `text` is only used to locate
    /// diagnostics.
    pub fn from_spec(spec: TripleSpec, model: Model, text: &str) -> Result<TripleFile, Diagnostic> {
        let shape: TripleShape = spec
            .shape
            .parse()
            .map_err(|m: String| Diagnostic::new("triple.shape", key_span(text, "shape", 0).unwrap_or_default(), m))?;
        let sig = &model.sig;
        let space = |key: &str, s: &str| -> Result<StateSpace, Diagnostic> {
            let ctx = parse_context(s).map_err(|d| shift(text, key, d))?;
            for (_, t) in &ctx.0 {
                if !sig.has_type(t) {
                    return Err(shift(
                        text,
                        key,
                        Diagnostic::new("type", Span::new(0, s.len()), format!("unknown type `{t}`")),
                    ));
                }
            }
            Ok(StateSpace::new(ctx))
        };
        let cond = |sp: &StateSpace, key: &str, s: &str| -> Result<Cond, Diagnostic> {
            let e = Elaborator::new(sp, sig);
            let r = if is_state(shape) {
                parse_state(s).and_then(|a| e.state(&a)).map(Cond::State)
            } else {
                parse_pred(s).and_then(|a| e.pred(&a)).map(Cond::Pred)
            };
            r.map_err(|d| shift(text, key, d))
        };
        let cmd = |sp: &StateSpace, key: &str, s: &str| {
            parse_program(s)
                .and_then(|p| Elaborator::new(sp, sig).prog(&p))
                .map_err(|d| shift(text, key, d))
        };
        let left = space("state", &spec.state)?;
        let triple = if shape.relational() {
            let missing = |k: &str| {
                Diagnostic::new(
                    "triple.missing",
                    key_span(text, "shape", 0).unwrap_or_default(),
                    format!("relational shape `{shape}` needs `{k}`"),
                )
            };
            let rs = spec.right_state.as_deref().ok_or_else(|| missing("right_state"))?;
            let rc = spec.right_cmd.as_deref().ok_or_else(|| missing("right_cmd"))?;
            let right = space("right_state", rs)?;
            if let Some(x) = left.vars().iter().find(|x| right.ctx.lookup(x).is_some()) {
                return Err(shift(
                    text,
                    "right_state",
                    Diagnostic::new("triple.clash", Span::new(0, rs.len()), format!("`{x}` is declared on both sides")),
                ));
            }
            let mut t = RelTriple {
                shape,
                left: left.clone(),
                right: right.clone(),
                pre: Cond::Pred(crate::combinators::p_top()),
                c: cmd(&left, "cmd", &spec.cmd)?,
                d: cmd(&right, "right_cmd", rc)?,
                post: Cond::Pred(crate::combinators::p_top()),
            };
            let joint = t.joint();
            t.pre = cond(&joint, "pre", &spec.pre)?;
            t.post = cond(&joint, "post", &spec.post)?;
            Checkable::Rel(t)
        } else {
            for k in ["right_state", "right_cmd"] {
                if let Some(s) = key_span(text, k, 0) {
                    return Err(Diagnostic::new(
                        "triple.extra",
                        s,
                        format!("`{k}` only makes sense for relational shapes"),
                    ));
                }
            }
            Checkable::Unary(Triple {
                shape,
                space: left.clone(),
                pre: cond(&left, "pre", &spec.pre)?,
                cmd: cmd(&left, "cmd", &spec.cmd)?,
                post: cond(&left, "post", &spec.post)?,
            })
        };
        Ok(TripleFile {
            spec,
            shape,
            model,
            triple,
        })
    }

    /// Backends named in the file, or every backend for which all
    /// generators have tables.
    pub fn backends(&self) -> Vec<BackendId> {
        if let Some(b) = &self.spec.backend {
            return b.list();
        }
        BackendId::ALL
            .into_iter()
            .filter(|&b| self.model.sig.generators().all(|g| self.model.has_table(b, &g.name)))
            .collect()
    }

    pub fn check(&self, backend: BackendId) -> Result<Outcome, String> {
        match backend {
            BackendId::Rel => self.check_on::<crate::models::Rel>(),
            BackendId::Par => self.check_on::<crate::models::Par>(),
            BackendId::Stoch => self.check_on::<StochQ>(),
        }
    }

    fn check_on<B: crate::logics::coupling::Couple>(&self) -> Result<Outcome, String> {
        let mut out = Outcome {
            backend: B::ID,
            verdict: Answer::Valid,
            violation: None,
            note: None,
        };
        match &self.triple {
            Checkable::Unary(t) => {
                if let Some(v) = t.check::<B>(&self.model).map_err(|e| e.to_string())? {
                    out.verdict = Answer::Invalid;
                    out.violation = Some(v);
                }
            }
            Checkable::Rel(t) => match t.check::<B>(&self.model, None, true).map_err(|e| e.to_string())? {
                RelVerdict::Valid(_) => {}
                RelVerdict::Invalid => {
                    out.verdict = Answer::Invalid;
                    out.note = Some("no coupling witnesses the triple".into());
                }
                RelVerdict::Unknown(n) => {
                    out.verdict = Answer::Unknown;
                    out.note = Some(n);
                }
            },
        }
        Ok(out)
    }
}

/// Parses and typechecks a file of any kind. `.icl` and `.gcl` files are
/// checked against `sig`; triple files bring their own model.
pub fn validate(path: &Path, sig: &Signature) -> Result<(), FileDiagnostic> {
    let src = SourceFile::read(path).map_err(|e| {
        FileDiagnostic::new(path, "", Diagnostic::new("io", Span::default(), e.to_string()))
    })?;
    let here = |d: Diagnostic| FileDiagnostic::new(&src.path, &src.text, d);
    match src.kind {
        FileKind::Term => {
            let j = parse_judgement(&src.text).map_err(here)?;
            check_raw(&j.term, &j.ctx, &j.idx, sig).map(|_| ()).map_err(here)
        }
        FileKind::Program => {
            let f = parse_program_file(&src.text).map_err(here)?;
            let sp = StateSpace::new(f.ctx.clone());
            Elaborator::new(&sp, sig).prog(&f.prog).map(|_| ()).map_err(here)
        }
        FileKind::Model => parse_model(&src.text).map(|_| ()).map_err(here),
        FileKind::Triple => TripleFile::load(path).map(|_| ()),
    }
}

// round trips

fn same<T: PartialEq + fmt::Debug>(what: &str, a: &T, b: &T) -> Result<(), String> {
    if a == b {
        Ok(())
    } else {
        Err(format!("{what} changed: {a:?} became {b:?}"))
    }
}

/// The canonical text of a source file.
pub fn format_source(src: &SourceFile) -> Result<String, Diagnostic> {
    Ok(match src.kind {
        FileKind::Term => parse_judgement(&src.text)?.print(),
        FileKind::Program => parse_program_file(&src.text)?.print(),
        FileKind::Model => {
            let (file, _) = parse_model(&src.text)?;
            let mut s = serde_json::to_string_pretty(&file).expect("model files serialize");
            s.push('\n');
            s
        }
        FileKind::Triple => {
            let spec: TripleSpec = serde_json::from_str(&src.text).map_err(|e| json_diag(&src.text, &e))?;
            spec.canonical(&src.text)?.to_pretty()
        }
    })
}

/// Checks that parse, print, parse gives back the same tree (terms up to
/// alpha-equivalence) and that printing is a fixed point.
pub fn round_trip(src: &SourceFile) -> Result<(), String> {
    let show = |d: Diagnostic| src.render(&d);
    let once = format_source(src).map_err(show)?;
    let again = SourceFile {
        path: src.path.clone(),
        text: once.clone(),
        kind: src.kind,
    };
    let twice = format_source(&again).map_err(|d| format!("printed text does not reparse: {}", again.render(&d)))?;
    same("printed text", &once, &twice)?;
    match src.kind {
        FileKind::Term => {
            let a = parse_judgement(&src.text).map_err(show)?;
            let b = parse_judgement(&once).map_err(show)?;
            same("context", &a.ctx, &b.ctx)?;
            same("index", &a.idx, &b.idx)?;
            if !alpha_eq(&a.term.term, &b.term.term) {
                return Err(format!("term changed: {} became {}", a.term.term, b.term.term));
            }
        }
        FileKind::Model => {
            let (a, ma) = parse_model(&src.text).map_err(show)?;
            let (b, mb) = parse_model(&once).map_err(show)?;
            same("model file", &a, &b)?;
            same("model", &ma, &mb)?;
        }
        FileKind::Program | FileKind::Triple => {}
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const COIN: &str = r#"{
  "types": {"Bool": ["0", "1"]},
  "generators": {
    "coin": {"inputs": [], "branches": [["Bool"]], "stoch": [["1/2", "1/2"]]}
  }
}"#;

    #[test]
    fn fair_coin_is_accepted() {
        let (_, m) = parse_model(COIN).unwrap();
        assert!(m.has_table(BackendId::Stoch, &"coin".into()));
    }

    #[test]
    fn heavy_row_is_located() {
        let text = COIN.replace("\"1/2\", \"1/2\"", "\"2/3\", \"2/3\"");
        let d = parse_model(&text).unwrap_err();
        assert_eq!(d.code, "model.row-mass");
        assert_eq!(&text[d.span.start..d.span.end], "\"stoch\"");
    }

    #[test]
    fn decimals_are_rejected() {
        let text = COIN.replace("\"1/2\", \"1/2\"", "0.5, \"1/2\"");
        assert_eq!(parse_model(&text).unwrap_err().code, "model.non-rational");
    }

    #[test]
    fn json_errors_have_positions() {
        let d = parse_model("{\n  \"types\": {,}\n}").unwrap_err();
        assert_eq!(d.code, "json");
        assert_eq!(super::super::line_col("{\n  \"types\": {,}\n}", d.span.start).0, 2);
    }

    #[test]
    fn unary_triple_checks() {
        let spec = TripleSpec {
            description: None,
            shape: "pred-correct".into(),
            state: "x: Bool".into(),
            pre: "top".into(),
            cmd: "x <- coin()".into(),
            post: "top".into(),
            right_state: None,
            right_cmd: None,
            model: ModelRef::Inline(serde_json::from_str(COIN).unwrap()),
            backend: None,
            expect: None,
        };
        let text = serde_json::to_string(&spec).unwrap();
        let (_, m) = parse_model(COIN).unwrap();
        let t = TripleFile::from_spec(spec, m, &text).unwrap();
        assert_eq!(t.backends(), vec![BackendId::Stoch]);
        assert_eq!(t.check(BackendId::Stoch).unwrap().verdict, Answer::Valid);
    }

    #[test]
    fn errors_inside_strings_point_into_the_file() {
        let text = r#"{"shape": "pred-correct", "state": "x: Bool", "pre": "top", "cmd": "x := nope(x)", "post": "top", "model": {"types": {"Bool": ["0"]}}}"#;
        let spec: TripleSpec = serde_json::from_str(text).unwrap();
        let m = spec_model(&spec);
        let d = TripleFile::from_spec(spec, m, text).unwrap_err();
        assert_eq!(&text[d.span.start..d.span.end], "nope(x)");
    }

    fn spec_model(s: &TripleSpec) -> Model {
        match &s.model {
            ModelRef::Inline(m) => m.to_model().unwrap(),
            ModelRef::Path(_) => unreachable!(),
        }
    }
}

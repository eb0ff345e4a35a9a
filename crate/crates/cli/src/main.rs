//! `impcat`: check triples, evaluate terms and programs, typecheck and
//! format source files, and run the rule campaign.
//!
//! Exit codes: 0 valid / ok, 1 invalid / counterexamples found, 2 error.
//! Machine output is JSON on stdout (with `--json`); human text goes to
//! stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use impcat_core::backends::{eval, BackendId, Backend, Morphism};
use impcat_core::combinators::StateSpace;
use impcat_core::logics::campaign::{self, Config, Suite};
use impcat_core::logics::coupling::Answer;
use impcat_core::logics::rules::Outcome;
use impcat_core::logics::sem::cmd_m;
use impcat_core::models::{Model, Par, Rel};
use impcat_core::surface::elab::check_raw;
use impcat_core::surface::files::{format_source, load_model, validate, FileDiagnostic};
use impcat_core::surface::{parse_judgement, parse_program_file, Diagnostic, Elaborator, FileKind, SourceFile, TripleFile};
use impcat_core::StochQ;

#[derive(Parser)]
#[command(name = "impcat", version, about = "Program triples over relations, partial functions and subprobability kernels")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Emit a JSON report on stdout.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide `.triple.json` files: 0 valid, 1 invalid, 2 error.
    Check {
        paths: Vec<PathBuf>,
        /// Restrict to these backends (repeatable).
        #[arg(long, value_enum)]
        backend: Vec<BackendArg>,
        #[command(flatten)]
        common: Common,
    },
    /// Print the semantics of a `.icl` judgement or `.gcl` program.
    Eval {
        path: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum, default_value = "rel")]
        backend: BackendArg,
        #[command(flatten)]
        common: Common,
    },
    /// Typecheck source files of any kind.
    Typecheck {
        paths: Vec<PathBuf>,
        /// Signature for `.icl` and `.gcl` files; without it only
        /// generator-free sources typecheck.
        #[arg(long)]
        model: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the rule, law or axiom campaign.
    Rules {
        #[arg(long, value_enum, default_value = "rules")]
        suite: SuiteArg,
        #[arg(long, value_enum)]
        backend: Vec<BackendArg>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        instances: u32,
        #[arg(long, default_value_t = 3)]
        max_carrier: u8,
        /// Rule ids to run; a trailing `.` selects a family.
        #[arg(long = "rule")]
        rules: Vec<String>,
        /// Re-run one attempt of RULE from `--seed` and print its bundle.
        #[arg(long, value_name = "RULE")]
        replay: Option<String>,
        /// Also write the JSON report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Print files in canonical form.
    Fmt {
        paths: Vec<PathBuf>,
        /// Rewrite files in place.
        #[arg(long)]
        write: bool,
        /// Exit 1 if a file is not in canonical form.
        #[arg(long, conflicts_with = "write")]
        check: bool,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Rel,
    Par,
    Stoch,
}

impl From<BackendArg> for BackendId {
    fn from(b: BackendArg) -> BackendId {
        match b {
            BackendArg::Rel => BackendId::Rel,
            BackendArg::Par => BackendId::Par,
            BackendArg::Stoch => BackendId::Stoch,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Rules,
    Laws,
    Axioms,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Rules => Suite::Rules,
            SuiteArg::Laws => Suite::Laws,
            SuiteArg::Axioms => Suite::Axioms,
        }
    }
}

enum Fail {
    Diag(Box<FileDiagnostic>),
    Msg(String),
}

impl Fail {
    fn report(&self) -> String {
        match self {
            Fail::Diag(d) => d.render(),
            Fail::Msg(m) => format!("error: {m}\n"),
        }
    }

    fn json(&self) -> Value {
        match self {
            Fail::Diag(d) => json!({"file": d.path.display().to_string(), "diagnostic": d.diag}),
            Fail::Msg(m) => json!({"error": m}),
        }
    }
}

impl From<FileDiagnostic> for Fail {
    fn from(d: FileDiagnostic) -> Fail {
        Fail::Diag(Box::new(d))
    }
}

fn read(path: &Path) -> Result<SourceFile, Fail> {
    SourceFile::read(path).map_err(|e| Fail::Msg(e.to_string()))
}

fn located(src: &SourceFile, d: Diagnostic) -> Fail {
    Fail::Diag(Box::new(FileDiagnostic::new(&src.path, &src.text, d)))
}

fn emit(json_out: bool, v: &Value) {
    if json_out {
        println!("{}", serde_json::to_string_pretty(v).expect("reports serialize"));
    }
}

const OK: u8 = 0;
const INVALID: u8 = 1;
const ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(match cli.cmd {
        Cmd::Check { paths, backend, common } => check(&paths, &backend, common.json),
        Cmd::Eval {
            path,
            model,
            backend,
            common,
        } => eval_cmd(&path, &model, backend.into(), common.json),
        Cmd::Typecheck { paths, model, common } => typecheck_cmd(&paths, model.as_deref(), common.json),
        Cmd::Rules {
            suite,
            backend,
            seed,
            instances,
            max_carrier,
            rules,
            replay,
            out,
            common,
        } => {
            let backends: Vec<BackendId> = if backend.is_empty() {
                BackendId::ALL.to_vec()
            } else {
                backend.into_iter().map(Into::into).collect()
            };
            match replay {
                Some(rule) => replay_cmd(&rule, seed, max_carrier as usize, &backends, common.json),
                None => {
                    let cfg = Config {
                        suite: suite.into(),
                        seed,
                        instances: instances as usize,
                        max_carrier: max_carrier as usize,
                        backends,
                        rules,
                        ..Default::default()
                    };
                    rules_cmd(&cfg, out.as_deref(), common.json)
                }
            }
        }
        Cmd::Fmt {
            paths,
            write,
            check,
            common,
        } => fmt_cmd(&paths, write, check, common.json),
    })
}

fn check(paths: &[PathBuf], only: &[BackendArg], json_out: bool) -> u8 {
    let mut code = OK;
    let mut reports = Vec::new();
    for path in paths {
        match check_one(path, only) {
            Ok((valid, v)) => {
                if !valid {
                    code = code.max(INVALID);
                }
                reports.push(v);
            }
            Err(f) => {
                eprint!("{}", f.report());
                code = ERROR;
                reports.push(f.json());
            }
        }
    }
    emit(json_out, &Value::Array(reports));
    code
}

fn check_one(path: &Path, only: &[BackendArg]) -> Result<(bool, Value), Fail> {
    if FileKind::of(path) != Some(FileKind::Triple) {
        return Err(Fail::Msg(format!("{}: `check` expects a .triple.json file", path.display())));
    }
    let t = TripleFile::load(path)?;
    let backends: Vec<BackendId> = if only.is_empty() {
        t.backends()
    } else {
        only.iter().map(|&b| b.into()).collect()
    };
    if backends.is_empty() {
        return Err(Fail::Msg(format!(
            "{}: no backend has tables for every generator",
            path.display()
        )));
    }
    let mut outcomes = Vec::new();
    let mut valid = true;
    for b in backends {
        let o = t.check(b).map_err(|m| Fail::Msg(format!("{} ({b}): {m}", path.display())))?;
        match o.verdict {
            Answer::Valid => eprintln!("{} [{b}] {}: valid", path.display(), t.shape),
            Answer::Invalid => {
                valid = false;
                let why = o
                    .violation
                    .as_ref()
                    .map(ToString::to_string)
                    .or_else(|| o.note.clone())
                    .unwrap_or_default();
                eprintln!("{} [{b}] {}: invalid: {why}", path.display(), t.shape);
            }
            Answer::Unknown => return Err(Fail::Msg(format!("{} ({b}): undecided", path.display()))),
        }
        outcomes.push(o);
    }
    let mut v = json!({
        "file": path.display().to_string(),
        "shape": t.shape.as_str(),
        "valid": valid,
        "outcomes": outcomes,
    });
    if let Some(e) = t.spec.expect {
        let want = e == Answer::Valid;
        v["expected"] = json!(e);
        v["as_expected"] = json!(want == valid);
        if want != valid {
            eprintln!("{}: expected {:?}", path.display(), e);
        }
    }
    Ok((valid, v))
}

fn show<B: Backend>(m: &Morphism<B>, json_out: bool) -> Value {
    if !json_out {
        print!("{m}");
    }
    json!({"backend": B::ID, "signature": m.signature(), "table": m.table().lines().collect::<Vec<_>>()})
}

fn eval_cmd(path: &Path, model: &Path, backend: BackendId, json_out: bool) -> u8 {
    let run = || -> Result<Value, Fail> {
        let model = load_model(model)?;
        let src = read(path)?;
        macro_rules! on {
            ($f:expr) => {
                match backend {
                    BackendId::Rel => $f(Rel),
                    BackendId::Par => $f(Par),
                    BackendId::Stoch => $f(StochQ::default()),
                }
            };
        }
        match src.kind {
            FileKind::Term => {
                let mut j = parse_judgement(&src.text).map_err(|d| located(&src, d))?;
                j.term.term = check_raw(&j.term, &j.ctx, &j.idx, &model.sig).map_err(|d| located(&src, d))?;
                fn go<B: Backend>(_: B, j: &impcat_core::surface::TermFile, m: &Model, json_out: bool) -> Result<Value, Fail> {
                    let r: Morphism<B> = eval(&j.term.term, &j.ctx, &j.idx, m).map_err(|e| Fail::Msg(e.to_string()))?;
                    Ok(show(&r, json_out))
                }
                on!(|b| go(b, &j, &model, json_out))
            }
            FileKind::Program => {
                let f = parse_program_file(&src.text).map_err(|d| located(&src, d))?;
                let sp = StateSpace::new(f.ctx.clone());
                let c = Elaborator::new(&sp, &model.sig).prog(&f.prog).map_err(|d| located(&src, d))?;
                fn go<B: Backend>(
                    _: B,
                    sp: &StateSpace,
                    c: &impcat_core::combinators::Command,
                    m: &Model,
                    json_out: bool,
                ) -> Result<Value, Fail> {
                    let r: Morphism<B> = cmd_m(sp, c, m).map_err(|e| Fail::Msg(e.to_string()))?;
                    Ok(show(&r, json_out))
                }
                on!(|b| go(b, &sp, &c, &model, json_out))
            }
            _ => Err(Fail::Msg(format!("{}: `eval` expects a .icl or .gcl file", path.display()))),
        }
    };
    match run() {
        Ok(v) => {
            emit(json_out, &v);
            OK
        }
        Err(f) => {
            eprint!("{}", f.report());
            emit(json_out, &f.json());
            ERROR
        }
    }
}

fn typecheck_cmd(paths: &[PathBuf], model: Option<&Path>, json_out: bool) -> u8 {
    let sig = match model.map(load_model).transpose() {
        Ok(m) => m.map(|m| m.sig).unwrap_or_default(),
        Err(d) => {
            eprint!("{}", d.render());
            emit(json_out, &Fail::from(d).json());
            return ERROR;
        }
    };
    let mut code = OK;
    let mut out = Vec::new();
    for p in paths {
        match validate(p, &sig).map_err(Fail::from) {
            Ok(()) => {
                eprintln!("{}: ok", p.display());
                out.push(json!({"file": p.display().to_string(), "ok": true}));
            }
            Err(f) => {
                eprint!("{}", f.report());
                code = ERROR;
                let mut v = f.json();
                v["file"] = json!(p.display().to_string());
                v["ok"] = json!(false);
                out.push(v);
            }
        }
    }
    emit(json_out, &Value::Array(out));
    code
}

fn rules_cmd(cfg: &Config, out: Option<&Path>, json_out: bool) -> u8 {
    let known = cfg.suite.ids();
    for r in &cfg.rules {
        if !known.iter().any(|k| k == r || (r.ends_with('.') && k.starts_with(r.as_str()))) {
            eprintln!("error: no rule matches `{r}`");
            return ERROR;
        }
    }
    let rep = campaign::run(cfg);
    let mut failed = false;
    for row in &rep.rows {
        let ok = row.passed(cfg.instances);
        failed |= !ok;
        eprintln!(
            "{:<6} {:<40} {} checked {:>5} vacuous {:>5} refuted {:>3}{}",
            row.backend,
            row.rule,
            if ok { "ok  " } else { "FAIL" },
            row.checked,
            row.vacuous,
            row.refuted,
            row.first_error.as_deref().map(|e| format!(" error: {e}")).unwrap_or_default()
        );
    }
    eprintln!(
        "{} rows, {} counterexamples, {} ms",
        rep.rows.len(),
        rep.counterexamples,
        rep.millis
    );
    let v = serde_json::to_value(&rep).expect("reports serialize");
    if let Some(p) = out {
        let text = serde_json::to_string_pretty(&v).expect("reports serialize");
        if let Err(e) = std::fs::write(p, text + "\n") {
            eprintln!("error: {}: {e}", p.display());
            return ERROR;
        }
    }
    emit(json_out, &v);
    if failed {
        INVALID
    } else {
        OK
    }
}

fn replay_cmd(rule: &str, seed: u64, max: usize, backends: &[BackendId], json_out: bool) -> u8 {
    let mut out = Vec::new();
    let mut code = OK;
    for &b in backends {
        let r = match b {
            BackendId::Rel => campaign::replay::<Rel>(rule, seed, max),
            BackendId::Par => campaign::replay::<Par>(rule, seed, max),
            BackendId::Stoch => campaign::replay::<StochQ>(rule, seed, max),
        };
        let Some((o, bundle)) = r else {
            eprintln!("error: `{rule}` is not a known rule, or its instance failed to evaluate");
            return ERROR;
        };
        let verdict = match &o {
            Outcome::Sound => "sound",
            Outcome::Vacuous(_) => "vacuous",
            Outcome::SideViolated(_) => "side-violated",
            Outcome::Refuted(_) => "refuted",
        };
        if matches!(o, Outcome::Refuted(_) | Outcome::SideViolated(_)) {
            code = INVALID;
        }
        eprintln!("{b} {rule} seed {seed}: {verdict} {}", bundle.violation);
        out.push(json!({"backend": b, "outcome": verdict, "bundle": bundle}));
    }
    emit(json_out, &Value::Array(out));
    code
}

fn fmt_cmd(paths: &[PathBuf], write: bool, check: bool, json_out: bool) -> u8 {
    let mut code = OK;
    let mut out = Vec::new();
    for p in paths {
        let res = read(p).and_then(|src| {
            let f = format_source(&src).map_err(|d| located(&src, d))?;
            Ok((src.text, f))
        });
        match res {
            Ok((old, new)) => {
                let changed = old != new;
                if check {
                    if changed {
                        eprintln!("{}: not in canonical form", p.display());
                        code = code.max(INVALID);
                    }
                } else if write {
                    if changed {
                        if let Err(e) = std::fs::write(p, &new) {
                            eprintln!("error: {}: {e}", p.display());
                            code = ERROR;
                        }
                    }
                } else if !json_out {
                    print!("{new}");
                }
                out.push(json!({"file": p.display().to_string(), "changed": changed, "text": new}));
            }
            Err(f) => {
                eprint!("{}", f.report());
                code = ERROR;
                out.push(f.json());
            }
        }
    }
    emit(json_out, &Value::Array(out));
    code
}

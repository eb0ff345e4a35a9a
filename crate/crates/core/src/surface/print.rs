//! Canonical printers. Output reparses to the same tree; parentheses are
//! emitted only where precedence or associativity needs them.

use crate::kernel::{Name, Term};

use super::ast::{Call, GuardAst, PredAst, Prog, StateAst, Stmt, StmtKind};

const INDENT: &str = "  ";

fn list(xs: &[Name]) -> String {
    xs.iter().map(Name::as_str).collect::<Vec<_>>().join(", ")
}

fn call(c: &Call) -> String {
    format!("{}({})", c.gen, list(&c.args))
}

fn paren(s: String, wrap: bool) -> String {
    if wrap {
        format!("({s})")
    } else {
        s
    }
}

pub fn print_term(t: &Term) -> String {
    t.to_string()
}

pub fn print_guard(g: &GuardAst) -> String {
    guard(g, 1)
}

fn guard(g: &GuardAst, min: u8) -> String {
    match g {
        GuardAst::Or(a, b) => paren(format!("{} or {}", guard(a, 1), guard(b, 2)), min > 1),
        GuardAst::And(a, b) => paren(format!("{} and {}", guard(a, 2), guard(b, 3)), min > 2),
        GuardAst::Not(a, _) => paren(format!("not {}", guard(a, 3)), min > 3),
        GuardAst::True(_) => "true".into(),
        GuardAst::False(_) => "false".into(),
        GuardAst::Call(c) => call(c),
        GuardAst::Raw(r) => r.term.to_string(),
    }
}

pub fn print_pred(p: &PredAst) -> String {
    pred(p, 1)
}

fn pred(p: &PredAst, min: u8) -> String {
    match p {
        PredAst::Cond(a, b, c) => paren(
            format!("{} +[{}] {}", pred(a, 1), guard(b, 1), pred(c, 2)),
            min > 1,
        ),
        PredAst::And(a, b) => paren(format!("{} and {}", pred(a, 2), pred(b, 3)), min > 2),
        PredAst::Top(_) => "top".into(),
        PredAst::Bot(_) => "bot".into(),
        PredAst::Lift(g, _) => format!("[{}]", guard(g, 1)),
        PredAst::Call(c) => call(c),
        PredAst::Raw(r) => r.term.to_string(),
    }
}

pub fn print_state(s: &StateAst) -> String {
    state(s, 1)
}

fn state(s: &StateAst, min: u8) -> String {
    match s {
        StateAst::Choice(a, b, c) => paren(
            format!("{} +[{}] {}", state(a, 1), guard(b, 1), state(c, 2)),
            min > 1,
        ),
        StateAst::Then(a, p, _) => paren(format!("{} then {}", state(a, 2), block(p, 0, true)), min > 2),
        StateAst::Observe(a, p, _) => paren(format!("{} observe {}", state(a, 2), pred(p, 3)), min > 2),
        StateAst::Bot(_) => "bot".into(),
        StateAst::Init(c) => call(c),
        StateAst::Raw(r) => r.term.to_string(),
    }
}

/// Multi-line layout with two-space indentation.
pub fn print_program(p: &Prog) -> String {
    prog(p, 0, false)
}

/// Single-line layout, as used inside JSON strings.
pub fn print_program_inline(p: &Prog) -> String {
    prog(p, 0, true)
}

fn prog(p: &Prog, ind: usize, inline: bool) -> String {
    let sep = if inline {
        "; ".to_string()
    } else {
        format!(";\n{}", INDENT.repeat(ind))
    };
    p.stmts.iter().map(|s| stmt(s, ind, inline)).collect::<Vec<_>>().join(&sep)
}

fn block(p: &Prog, ind: usize, inline: bool) -> String {
    if inline {
        format!("{{ {} }}", prog(p, ind, true))
    } else {
        let pad = INDENT.repeat(ind);
        format!("{{\n{pad}{INDENT}{}\n{pad}}}", prog(p, ind + 1, false))
    }
}

fn stmt(s: &Stmt, ind: usize, inline: bool) -> String {
    match &s.kind {
        StmtKind::Skip => "skip".into(),
        StmtKind::Abort => "abort".into(),
        StmtKind::If(b, s1, s2) => format!(
            "if {} then {} else {}",
            guard(b, 1),
            stmt(s1, ind, inline),
            stmt(s2, ind, inline)
        ),
        StmtKind::While(b, body) => format!("while {} do {}", guard(b, 1), stmt(body, ind, inline)),
        StmtKind::Assert(p) => format!("assert {}", pred(p, 1)),
        StmtKind::Assign(l, r) => format!("{} := {}", list(l), list(r)),
        StmtKind::GenAssign(l, c) => format!("{} := {}", list(l), call(c)),
        StmtKind::Sample(x, c) => format!("{x} <- {}", call(c)),
        StmtKind::Block(p) => block(p, ind, inline),
        StmtKind::Raw(r) => r.term.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parser::{parse_guard, parse_pred, parse_program, parse_state};

    fn fixed<T>(text: &str, parse: impl Fn(&str) -> Result<T, crate::surface::Diagnostic>, print: impl Fn(&T) -> String) {
        let once = print(&parse(text).unwrap());
        let twice = print(&parse(&once).unwrap_or_else(|e| panic!("{once}: {e}")));
        assert_eq!(once, twice);
    }

    #[test]
    fn guards_keep_structure() {
        assert_eq!(print_guard(&parse_guard("a or (b or c)").unwrap()), "a() or (b() or c())");
        assert_eq!(print_guard(&parse_guard("(a or b) or c").unwrap()), "a() or b() or c()");
        assert_eq!(print_guard(&parse_guard("not (a and b)").unwrap()), "not (a() and b())");
        assert_eq!(print_guard(&parse_guard("(a or b) and c").unwrap()), "(a() or b()) and c()");
        fixed("not not true or false and x(y)", parse_guard, print_guard);
    }

    #[test]
    fn preds_and_states() {
        assert_eq!(
            print_pred(&parse_pred("p(x) +[b(x)] (q(x) +[c(x)] top)").unwrap()),
            "p(x) +[b(x)] (q(x) +[c(x)] top)"
        );
        fixed("[not b(x)] and p(x)", parse_pred, print_pred);
        assert_eq!(
            print_state(&parse_state("init() then {x:=f(x);skip} observe (p(x) and q(x))").unwrap()),
            "init() then { x := f(x); skip } observe (p(x) and q(x))"
        );
        fixed("(s() +[c()] t()) +[d()] bot", parse_state, print_state);
    }

    #[test]
    fn program_layout() {
        let p = parse_program("x := f(y); while b(x) do { x := g(x); if c(x) then skip else { abort } }").unwrap();
        let out = print_program(&p);
        assert_eq!(
            out,
            "x := f(y);\nwhile b(x) do {\n  x := g(x);\n  if c(x) then skip else {\n    abort\n  }\n}"
        );
        fixed(&out, parse_program, print_program);
        fixed(&out, parse_program, print_program_inline);
    }
}

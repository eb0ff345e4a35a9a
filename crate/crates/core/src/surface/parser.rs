//! Recursive-descent parsers.
//!
//! ```text
//! program := stmt (";" stmt)* ";"?
//! stmt    := "skip" | "abort" | "{" program "}"
//!          | "if" guard "then" stmt "else" stmt | "while" guard "do" stmt
//!          | "assert" pred | vars ":=" vars | vars ":=" ident "(" vars ")"
//!          | ident "<-" ident "(" vars ")" | term
//! guard   := guard "or" guard | guard "and" guard | "not" guard
//!          | "true" | "false" | "(" guard ")" | ident ("(" vars ")")? | term
//! pred    := pred "+" "[" guard "]" pred | pred "and" pred
//!          | "top" | "bot" | "[" guard "]" | "(" pred ")" | ident ("(" vars ")")? | term
//! state   := state "+" "[" guard "]" state | state "then" "{" program "}"
//!          | state "observe" pred-atom | "bot" | "(" state ")" | ident "(" ")" | term
//! ```
//!
//! In guard, predicate and state position a bare `f(x̄)` is sugar for a
//! generator call, except for the exit labels `a1`, `a2`, `v` and `eta`,
//! which denote returns. Binary operators associate to the left; `and`
//! binds tighter than `or` and `+[b]`.

use crate::combinators::{A1, A2, ETA, V};
use crate::kernel::{Branch, Context, Index, Name, Term};

use super::ast::{Call, GuardAst, PredAst, Prog, RawTerm, StateAst, Stmt, StmtKind};
use super::files::{ProgramFile, TermFile};
use super::lexer::{lex, Tok, Token};
use super::{Diagnostic, Span};

pub const KEYWORDS: &[&str] = &[
    "loop", "skip", "abort", "if", "then", "else", "while", "do", "assert", "not", "and", "or", "true", "false",
    "top", "bot", "observe",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type R<T> = Result<T, Diagnostic>;

impl Parser {
    pub(crate) fn new(text: &str) -> R<Parser> {
        Ok(Parser { toks: lex(text)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].span.end
        }
    }

    fn bump(&mut self) -> Span {
        let s = self.span();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        s
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        Diagnostic::syntax(self.span(), format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> R<Span> {
        if self.peek() == t {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&t.describe()))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> Option<Span> {
        if self.is_kw(kw) {
            Some(self.bump())
        } else {
            None
        }
    }

    fn expect_kw(&mut self, kw: &str) -> R<Span> {
        self.eat_kw(kw).ok_or_else(|| self.unexpected(&format!("`{kw}`")))
    }

    /// Any identifier except `loop`.
    fn name(&mut self) -> R<(Name, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) if s != "loop" => Ok((Name::from(s), self.bump())),
            _ => Err(self.unexpected("an identifier")),
        }
    }

    /// An identifier that is not a keyword.
    fn plain_name(&mut self) -> R<(Name, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => Ok((Name::from(s), self.bump())),
            Tok::Ident(s) => Err(Diagnostic::syntax(self.span(), format!("`{s}` is a keyword"))),
            _ => Err(self.unexpected("an identifier")),
        }
    }

    pub(crate) fn end(&mut self) -> R<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    /// Comma-separated identifiers, possibly none, up to `close`.
    fn vars_until(&mut self, close: &Tok) -> R<Vec<Name>> {
        let mut out = Vec::new();
        if self.peek() == close {
            return Ok(out);
        }
        loop {
            out.push(self.name()?.0);
            if !self.eat(&Tok::Comma) {
                return Ok(out);
            }
        }
    }

    fn paren_vars(&mut self) -> R<Vec<Name>> {
        self.expect(&Tok::LParen)?;
        let xs = self.vars_until(&Tok::RParen)?;
        self.expect(&Tok::RParen)?;
        Ok(xs)
    }

    // terms

    pub(crate) fn term(&mut self) -> R<RawTerm> {
        let mut spans = Vec::new();
        let term = self.term_into(&mut spans)?;
        Ok(RawTerm { term, spans })
    }

    fn term_into(&mut self, spans: &mut Vec<Span>) -> R<Term> {
        let start = self.span().start;
        let me = spans.len();
        spans.push(Span::default());
        let term = if self.eat_kw("loop").is_some() {
            let (label, _) = self.name()?;
            let args = self.paren_vars()?;
            self.expect(&Tok::LBrace)?;
            let binders = self.vars_until(&Tok::Dot)?;
            self.expect(&Tok::Dot)?;
            let body = self.term_into(spans)?;
            self.expect(&Tok::RBrace)?;
            Term::Loop {
                label,
                args,
                binders,
                body: Box::new(body),
            }
        } else {
            let (head, _) = self.name()?;
            let args = self.paren_vars()?;
            if *self.peek() != Tok::LBrace {
                Term::Return { label: head, args }
            } else {
                let mut branches = Vec::new();
                while self.eat(&Tok::LBrace) {
                    let binders = self.vars_until(&Tok::Dot)?;
                    self.expect(&Tok::Dot)?;
                    let body = self.term_into(spans)?;
                    self.expect(&Tok::RBrace)?;
                    branches.push(Branch::new(binders, body));
                }
                Term::Gen {
                    gen: head,
                    args,
                    branches,
                }
            }
        };
        spans[me] = Span::new(start, self.prev_end());
        Ok(term)
    }

    pub(crate) fn context(&mut self) -> R<Context> {
        let mut entries = Vec::new();
        while matches!(self.peek(), Tok::Ident(_)) && *self.peek_at(1) == Tok::Colon {
            let (x, _) = self.plain_name()?;
            self.expect(&Tok::Colon)?;
            let (t, _) = self.name()?;
            entries.push((x, t));
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        Ok(Context::new(entries))
    }

    fn index(&mut self) -> R<Index> {
        let mut entries = Vec::new();
        if *self.peek() == Tok::Eof {
            return Ok(Index::new(entries));
        }
        loop {
            let (l, _) = self.name()?;
            let sig = self.paren_vars()?;
            entries.push((l, sig));
            if !self.eat(&Tok::Comma) {
                return Ok(Index::new(entries));
            }
        }
    }

    pub(crate) fn judgement(&mut self) -> R<TermFile> {
        let ctx = self.context()?;
        self.expect(&Tok::Turnstile)?;
        let term = self.term()?;
        self.expect(&Tok::Colon)?;
        let idx = self.index()?;
        self.end()?;
        Ok(TermFile { ctx, term, idx })
    }

    /// `ident(vars)` with no branches following, or a raw term otherwise.
    /// `ret` lists the labels that stay returns.
    fn call_or_raw(&mut self, ret: &[&str]) -> R<Result<Call, RawTerm>> {
        let start = self.pos;
        let Tok::Ident(head) = self.peek().clone() else {
            return Err(self.unexpected("an expression"));
        };
        if head == "loop" {
            return Ok(Err(self.term()?));
        }
        if is_keyword(&head) {
            return Err(Diagnostic::syntax(self.span(), format!("unexpected keyword `{head}`")));
        }
        let span = self.bump();
        if *self.peek() != Tok::LParen {
            return Ok(Ok(Call {
                gen: Name::from(head),
                args: vec![],
                span,
            }));
        }
        let args = self.paren_vars()?;
        if *self.peek() == Tok::LBrace || ret.contains(&head.as_str()) {
            self.pos = start;
            return Ok(Err(self.term()?));
        }
        Ok(Ok(Call {
            gen: Name::from(head),
            args,
            span: Span::new(span.start, self.prev_end()),
        }))
    }

    // guards

    pub(crate) fn guard(&mut self) -> R<GuardAst> {
        let mut g = self.guard_and()?;
        while self.eat_kw("or").is_some() {
            let r = self.guard_and()?;
            g = GuardAst::Or(Box::new(g), Box::new(r));
        }
        Ok(g)
    }

    fn guard_and(&mut self) -> R<GuardAst> {
        let mut g = self.guard_not()?;
        while self.eat_kw("and").is_some() {
            let r = self.guard_not()?;
            g = GuardAst::And(Box::new(g), Box::new(r));
        }
        Ok(g)
    }

    fn guard_not(&mut self) -> R<GuardAst> {
        if let Some(s) = self.eat_kw("not") {
            let g = self.guard_not()?;
            return Ok(GuardAst::Not(Box::new(g), s));
        }
        self.guard_atom()
    }

    fn guard_atom(&mut self) -> R<GuardAst> {
        if let Some(s) = self.eat_kw("true") {
            return Ok(GuardAst::True(s));
        }
        if let Some(s) = self.eat_kw("false") {
            return Ok(GuardAst::False(s));
        }
        if self.eat(&Tok::LParen) {
            let g = self.guard()?;
            self.expect(&Tok::RParen)?;
            return Ok(g);
        }
        Ok(match self.call_or_raw(&[A1, A2])? {
            Ok(c) => GuardAst::Call(c),
            Err(r) => GuardAst::Raw(r),
        })
    }

    // predicates

    pub(crate) fn pred(&mut self) -> R<PredAst> {
        let mut p = self.pred_and()?;
        while *self.peek() == Tok::Plus {
            let b = self.choice_guard()?;
            let q = self.pred_and()?;
            p = PredAst::Cond(Box::new(p), Box::new(b), Box::new(q));
        }
        Ok(p)
    }

    /// `+ [ guard ]`
    fn choice_guard(&mut self) -> R<GuardAst> {
        self.expect(&Tok::Plus)?;
        self.expect(&Tok::LBracket)?;
        let b = self.guard()?;
        self.expect(&Tok::RBracket)?;
        Ok(b)
    }

    fn pred_and(&mut self) -> R<PredAst> {
        let mut p = self.pred_atom()?;
        while self.eat_kw("and").is_some() {
            let q = self.pred_atom()?;
            p = PredAst::And(Box::new(p), Box::new(q));
        }
        Ok(p)
    }

    fn pred_atom(&mut self) -> R<PredAst> {
        if let Some(s) = self.eat_kw("top") {
            return Ok(PredAst::Top(s));
        }
        if let Some(s) = self.eat_kw("bot") {
            return Ok(PredAst::Bot(s));
        }
        if *self.peek() == Tok::LBracket {
            let open = self.bump();
            let g = self.guard()?;
            let close = self.expect(&Tok::RBracket)?;
            return Ok(PredAst::Lift(Box::new(g), open.to(close)));
        }
        if self.eat(&Tok::LParen) {
            let p = self.pred()?;
            self.expect(&Tok::RParen)?;
            return Ok(p);
        }
        Ok(match self.call_or_raw(&[V])? {
            Ok(c) => PredAst::Call(c),
            Err(r) => PredAst::Raw(r),
        })
    }

    // states

    pub(crate) fn state(&mut self) -> R<StateAst> {
        let mut s = self.state_post()?;
        while *self.peek() == Tok::Plus {
            let b = self.choice_guard()?;
            let t = self.state_post()?;
            s = StateAst::Choice(Box::new(s), Box::new(b), Box::new(t));
        }
        Ok(s)
    }

    fn state_post(&mut self) -> R<StateAst> {
        let mut s = self.state_atom()?;
        loop {
            if self.eat_kw("then").is_some() {
                self.expect(&Tok::LBrace)?;
                let p = self.program()?;
                let close = self.expect(&Tok::RBrace)?;
                s = StateAst::Then(Box::new(s), p, close);
            } else if self.eat_kw("observe").is_some() {
                let p = self.pred_atom()?;
                let end = p.span();
                s = StateAst::Observe(Box::new(s), Box::new(p), end);
            } else {
                return Ok(s);
            }
        }
    }

    fn state_atom(&mut self) -> R<StateAst> {
        if let Some(s) = self.eat_kw("bot") {
            return Ok(StateAst::Bot(s));
        }
        if self.eat(&Tok::LParen) {
            let s = self.state()?;
            self.expect(&Tok::RParen)?;
            return Ok(s);
        }
        Ok(match self.call_or_raw(&[ETA])? {
            Ok(c) => StateAst::Init(c),
            Err(r) => StateAst::Raw(r),
        })
    }

    // programs

    pub(crate) fn program(&mut self) -> R<Prog> {
        let mut stmts = vec![self.stmt()?];
        while self.eat(&Tok::Semi) {
            if matches!(self.peek(), Tok::RBrace | Tok::Eof) {
                break;
            }
            stmts.push(self.stmt()?);
        }
        Ok(Prog { stmts })
    }

    fn stmt(&mut self) -> R<Stmt> {
        let start = self.span().start;
        let kind = self.stmt_kind()?;
        Ok(Stmt {
            kind,
            span: Span::new(start, self.prev_end()),
        })
    }

    fn stmt_kind(&mut self) -> R<StmtKind> {
        if self.eat_kw("skip").is_some() {
            return Ok(StmtKind::Skip);
        }
        if self.eat_kw("abort").is_some() {
            return Ok(StmtKind::Abort);
        }
        if self.eat_kw("if").is_some() {
            let b = self.guard()?;
            self.expect_kw("then")?;
            let s1 = self.stmt()?;
            self.expect_kw("else")?;
            let s2 = self.stmt()?;
            return Ok(StmtKind::If(b, Box::new(s1), Box::new(s2)));
        }
        if self.eat_kw("while").is_some() {
            let b = self.guard()?;
            self.expect_kw("do")?;
            let s = self.stmt()?;
            return Ok(StmtKind::While(b, Box::new(s)));
        }
        if self.eat_kw("assert").is_some() {
            return Ok(StmtKind::Assert(self.pred()?));
        }
        if self.eat(&Tok::LBrace) {
            let p = self.program()?;
            self.expect(&Tok::RBrace)?;
            return Ok(StmtKind::Block(p));
        }
        if self.is_kw("loop") || *self.peek_at(1) == Tok::LParen {
            return Ok(StmtKind::Raw(self.term()?));
        }
        let mut lhs = vec![self.plain_name()?.0];
        while self.eat(&Tok::Comma) {
            lhs.push(self.plain_name()?.0);
        }
        if self.eat(&Tok::Sample) {
            if lhs.len() != 1 {
                return Err(Diagnostic::syntax(self.span(), "`<-` samples a single variable"));
            }
            let call = self.call()?;
            return Ok(StmtKind::Sample(lhs.pop().unwrap(), call));
        }
        if !self.eat(&Tok::Assign) {
            return Err(self.unexpected("`:=` or `<-`"));
        }
        if *self.peek_at(1) == Tok::LParen {
            return Ok(StmtKind::GenAssign(lhs, self.call()?));
        }
        let mut rhs = vec![self.plain_name()?.0];
        while self.eat(&Tok::Comma) {
            rhs.push(self.plain_name()?.0);
        }
        Ok(StmtKind::Assign(lhs, rhs))
    }

    fn call(&mut self) -> R<Call> {
        let (gen, s) = self.plain_name()?;
        let args = if *self.peek() == Tok::LParen { self.paren_vars()? } else { vec![] };
        Ok(Call {
            gen,
            args,
            span: Span::new(s.start, self.prev_end()),
        })
    }

    pub(crate) fn program_file(&mut self) -> R<ProgramFile> {
        let kw = self.span();
        if !matches!(self.peek(), Tok::Ident(s) if s == "state") {
            return Err(Diagnostic::syntax(kw, "a program file starts with `state x: T, …;`"));
        }
        self.bump();
        let ctx = self.context()?;
        self.expect(&Tok::Semi)?;
        let prog = self.program()?;
        self.end()?;
        Ok(ProgramFile { ctx, prog })
    }
}

fn whole<T>(text: &str, f: impl FnOnce(&mut Parser) -> R<T>) -> R<T> {
    let mut p = Parser::new(text)?;
    let out = f(&mut p)?;
    p.end()?;
    Ok(out)
}

pub fn parse_term(text: &str) -> R<Term> {
    whole(text, |p| p.term()).map(|r| r.term)
}

pub fn parse_raw_term(text: &str) -> R<RawTerm> {
    whole(text, |p| p.term())
}

/// `ctx |- term : index`, the contents of a `.icl` file.
pub fn parse_judgement(text: &str) -> R<TermFile> {
    Parser::new(text)?.judgement()
}

pub fn parse_guard(text: &str) -> R<GuardAst> {
    whole(text, |p| p.guard())
}

pub fn parse_pred(text: &str) -> R<PredAst> {
    whole(text, |p| p.pred())
}

pub fn parse_state(text: &str) -> R<StateAst> {
    whole(text, |p| p.state())
}

pub fn parse_program(text: &str) -> R<Prog> {
    whole(text, |p| p.program())
}

pub fn parse_context(text: &str) -> R<Context> {
    whole(text, |p| p.context())
}

/// `state x: T, …; program`, the contents of a `.gcl` file.
pub fn parse_program_file(text: &str) -> R<ProgramFile> {
    Parser::new(text)?.program_file()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{gen, lp, names, ret};

    #[test]
    fn term_examples() {
        assert_eq!(parse_term("a(x, y)").unwrap(), ret("a", &names(&["x", "y"])));
        assert_eq!(
            parse_term("f(x){u. a(u)}{v. b(v)}").unwrap(),
            gen(
                "f",
                &names(&["x"]),
                vec![
                    Branch::new(names(&["u"]), ret("a", &names(&["u"]))),
                    Branch::new(names(&["v"]), ret("b", &names(&["v"]))),
                ]
            )
        );
        assert_eq!(
            parse_term("loop a(x){u. a(u)}").unwrap(),
            lp("a", &names(&["x"]), &names(&["u"]), ret("a", &names(&["u"])))
        );
        assert_eq!(parse_term("f(){. b()}").unwrap().to_string(), "f(){. b()}");
    }

    #[test]
    fn subterm_spans() {
        let r = parse_raw_term("f(x){u. a(u)}{v. b(v)}").unwrap();
        assert_eq!(r.spans, vec![Span::new(0, 22), Span::new(8, 12), Span::new(17, 21)]);
        assert_eq!(r.locate(&ret("b", &names(&["v"]))), Span::new(17, 21));
    }

    #[test]
    fn term_errors() {
        let e = parse_term("f(x){u a(u)}").unwrap_err();
        assert_eq!(e.span, Span::new(7, 8));
        assert!(parse_term("f(x) g()").is_err());
        assert!(parse_term("loop (x){u. a(u)}").is_err());
    }

    #[test]
    fn program_examples() {
        let p = parse_program("while b do skip").unwrap();
        assert!(matches!(&p.stmts[0].kind, StmtKind::While(GuardAst::Call(c), s)
            if c.gen.as_str() == "b" && matches!(s.kind, StmtKind::Skip)));
        let p = parse_program("x := f(y); assert p").unwrap();
        assert_eq!(p.stmts.len(), 2);
        assert!(matches!(&p.stmts[0].kind, StmtKind::GenAssign(xs, c)
            if xs == &names(&["x"]) && c.gen.as_str() == "f" && c.args == names(&["y"])));
        assert!(matches!(&p.stmts[1].kind, StmtKind::Assert(PredAst::Call(c)) if c.gen.as_str() == "p"));
        let p = parse_program("x, y := y, x; z <- coin();").unwrap();
        assert!(matches!(&p.stmts[0].kind, StmtKind::Assign(l, r) if l.len() == 2 && r.len() == 2));
        assert!(matches!(&p.stmts[1].kind, StmtKind::Sample(_, _)));
    }

    #[test]
    fn guard_precedence() {
        let g = parse_guard("not a(x) and b(x) or c(x)").unwrap();
        let GuardAst::Or(l, _) = g else { panic!() };
        let GuardAst::And(n, _) = *l else { panic!() };
        assert!(matches!(*n, GuardAst::Not(..)));
        assert!(matches!(parse_guard("a1()").unwrap(), GuardAst::Raw(_)));
        assert!(matches!(parse_guard("b(x){. a2()}{. a1()}").unwrap(), GuardAst::Raw(_)));
    }

    #[test]
    fn pred_and_state_forms() {
        assert!(matches!(parse_pred("[b(x)] and p(x) +[c(x)] top").unwrap(), PredAst::Cond(..)));
        assert!(matches!(parse_pred("v()").unwrap(), PredAst::Raw(_)));
        let s = parse_state("init() then { x := f(x) } observe p(x) +[coin()] bot").unwrap();
        let StateAst::Choice(l, _, r) = s else { panic!() };
        assert!(matches!(*l, StateAst::Observe(..)));
        assert!(matches!(*r, StateAst::Bot(_)));
    }

    #[test]
    fn judgement_and_program_file() {
        let j = parse_judgement("x: Bool |- f(x){u. a(u)}{. b()} : a(Bool), b()").unwrap();
        assert_eq!(j.ctx.to_string(), "x: Bool");
        assert_eq!(j.idx.to_string(), "a(Bool), b()");
        let j = parse_judgement("|- loop a(){. a()} :").unwrap();
        assert!(j.ctx.is_empty() && j.idx.is_empty());
        let f = parse_program_file("state x: Bool, y: Bool;\nx := y;").unwrap();
        assert_eq!(f.ctx.len(), 2);
        assert!(parse_program_file("x := y").is_err());
    }

    #[test]
    fn keywords_are_not_variables() {
        let e = parse_program("if := x").unwrap_err();
        assert_eq!(e.code, "syntax");
        assert!(parse_program("x := skip").is_err());
    }
}

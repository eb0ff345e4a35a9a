//! Syntax trees for the program sublanguages. Raw internal-language terms
//! may appear wherever a guard, predicate, state or statement is expected.

use crate::kernel::{Name, Term};

use super::Span;

/// A raw term with the spans of its subterms in preorder (a node, then its
/// branch bodies or loop body left to right).
#[derive(Clone, Debug)]
pub struct RawTerm {
    pub term: Term,
    pub spans: Vec<Span>,
}

impl RawTerm {
    pub fn span(&self) -> Span {
        self.spans[0]
    }

    /// Span of the first subterm equal to `sub`, or of the whole term.
    pub fn locate(&self, sub: &Term) -> Span {
        fn walk(t: &Term, sub: &Term, i: &mut usize) -> Option<usize> {
            let me = *i;
            *i += 1;
            if t == sub {
                return Some(me);
            }
            match t {
                Term::Return { .. } => None,
                Term::Gen { branches, .. } => branches.iter().find_map(|b| walk(&b.body, sub, i)),
                Term::Loop { body, .. } => walk(body, sub, i),
            }
        }
        let mut i = 0;
        walk(&self.term, sub, &mut i)
            .and_then(|k| self.spans.get(k).copied())
            .unwrap_or(self.span())
    }
}

/// `f(x̄)` used as sugar for a guard, predicate, expression or state.
#[derive(Clone, Debug)]
pub struct Call {
    pub gen: Name,
    pub args: Vec<Name>,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum GuardAst {
    True(Span),
    False(Span),
    Not(Box<GuardAst>, Span),
    And(Box<GuardAst>, Box<GuardAst>),
    Or(Box<GuardAst>, Box<GuardAst>),
    /// A generator with two nullary branches.
    Call(Call),
    Raw(RawTerm),
}

impl GuardAst {
    pub fn span(&self) -> Span {
        match self {
            GuardAst::True(s) | GuardAst::False(s) => *s,
            GuardAst::Not(g, s) => s.to(g.span()),
            GuardAst::And(a, b) | GuardAst::Or(a, b) => a.span().to(b.span()),
            GuardAst::Call(c) => c.span,
            GuardAst::Raw(r) => r.span(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum PredAst {
    Top(Span),
    Bot(Span),
    /// `[b]`: the guard's first branch.
    Lift(Box<GuardAst>, Span),
    And(Box<PredAst>, Box<PredAst>),
    /// `p +[b] q`.
    Cond(Box<PredAst>, Box<GuardAst>, Box<PredAst>),
    /// A generator whose first branch is the predicate's exit.
    Call(Call),
    Raw(RawTerm),
}

impl PredAst {
    pub fn span(&self) -> Span {
        match self {
            PredAst::Top(s) | PredAst::Bot(s) | PredAst::Lift(_, s) => *s,
            PredAst::And(a, b) | PredAst::Cond(a, _, b) => a.span().to(b.span()),
            PredAst::Call(c) => c.span,
            PredAst::Raw(r) => r.span(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum StateAst {
    Bot(Span),
    /// `s +[b] t` with a closed guard.
    Choice(Box<StateAst>, Box<GuardAst>, Box<StateAst>),
    /// `s then { prog }`.
    Then(Box<StateAst>, Prog, Span),
    /// `s observe p`.
    Observe(Box<StateAst>, Box<PredAst>, Span),
    /// `f()`: a generator returning the whole state in one branch.
    Init(Call),
    Raw(RawTerm),
}

impl StateAst {
    pub fn span(&self) -> Span {
        match self {
            StateAst::Bot(s) => *s,
            StateAst::Choice(a, _, b) => a.span().to(b.span()),
            StateAst::Then(a, _, s) | StateAst::Observe(a, _, s) => a.span().to(*s),
            StateAst::Init(c) => c.span,
            StateAst::Raw(r) => r.span(),
        }
    }
}

/// A sequence of statements, run left to right.
#[derive(Clone, Debug)]
pub struct Prog {
    pub stmts: Vec<Stmt>,
}

#[derive(Clone, Debug)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum StmtKind {
    Skip,
    Abort,
    If(GuardAst, Box<Stmt>, Box<Stmt>),
    While(GuardAst, Box<Stmt>),
    Assert(PredAst),
    /// `x̄ := ȳ`.
    Assign(Vec<Name>, Vec<Name>),
    /// `x̄ := f(ȳ)`.
    GenAssign(Vec<Name>, Call),
    /// `x <- f()`.
    Sample(Name, Call),
    Block(Prog),
    Raw(RawTerm),
}

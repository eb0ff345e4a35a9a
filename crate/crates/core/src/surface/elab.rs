//! From syntax trees to combinators. Every leaf is typechecked where it
//! occurs, so type errors point at the smallest offending piece of text;
//! the combinators then preserve typing.

use crate::combinators::{
    g_and, g_not, g_or, guard_gen, lift_guard, mk_l, mk_r, omega, p_and, p_bot, p_cond, p_top, pred_gen, upsilon,
    CombError, Command, Expr, Guard, Predicate, State, StateSpace, ETA,
};
use std::collections::BTreeSet;

use crate::kernel::{gen, ret, typecheck, Branch, Context, Index, Name, Signature, Term, TypeError};

use super::ast::{Call, GuardAst, PredAst, Prog, RawTerm, StateAst, Stmt, StmtKind};
use super::{Diagnostic, Span};

type R<T> = Result<T, Diagnostic>;

pub fn type_diag(e: &TypeError, span: Span) -> Diagnostic {
    Diagnostic::new("type", span, e.kind.to_string()).with_hint(e.rule.to_string())
}

fn comb_diag(e: CombError, span: Span) -> Diagnostic {
    match e {
        CombError::Type(t) => type_diag(&t, span),
        CombError::Shape(m) => Diagnostic::new("shape", span, m),
    }
}

/// `f(x̄)` with no branches reads the same as a return to `f`. A return
/// whose label is out of scope but names a generator is taken as the
/// generator with an empty codomain.
pub fn resolve(t: &Term, labels: &BTreeSet<Name>, sig: &Signature) -> Term {
    match t {
        Term::Return { label, args } if !labels.contains(label) && sig.generator(label).is_some() => {
            gen(label.clone(), args, vec![])
        }
        Term::Return { .. } => t.clone(),
        Term::Gen { gen: g, args, branches } => gen(
            g.clone(),
            args,
            branches
                .iter()
                .map(|b| Branch::new(b.binders.clone(), resolve(&b.body, labels, sig)))
                .collect(),
        ),
        Term::Loop { label, args, binders, body } => {
            let mut inner = labels.clone();
            inner.insert(label.clone());
            Term::Loop {
                label: label.clone(),
                args: args.clone(),
                binders: binders.clone(),
                body: Box::new(resolve(body, &inner, sig)),
            }
        }
    }
}

/// Resolves and checks a raw term, locating the failing subterm.
pub fn check_raw(r: &RawTerm, ctx: &Context, idx: &Index, sig: &Signature) -> R<Term> {
    let labels = idx.labels().into_iter().collect();
    let r = RawTerm {
        term: resolve(&r.term, &labels, sig),
        spans: r.spans.clone(),
    };
    typecheck(&r.term, ctx, idx, sig).map_err(|e| type_diag(&e, r.locate(&e.subterm)))?;
    Ok(r.term)
}

pub struct Elaborator<'a> {
    pub space: &'a StateSpace,
    pub sig: &'a Signature,
}

impl<'a> Elaborator<'a> {
    pub fn new(space: &'a StateSpace, sig: &'a Signature) -> Self {
        Elaborator { space, sig }
    }

    fn known(&self, c: &Call) -> R<()> {
        if self.sig.generator(&c.gen).is_none() {
            return Err(Diagnostic::new("type", c.span, format!("unknown generator `{}`", c.gen)).with_hint("GENERATOR"));
        }
        Ok(())
    }

    fn checked<T>(&self, r: Result<(), CombError>, span: Span, v: T) -> R<T> {
        r.map_err(|e| comb_diag(e, span))?;
        Ok(v)
    }

    pub fn guard(&self, g: &GuardAst) -> R<Guard> {
        Ok(match g {
            GuardAst::True(_) => mk_l(),
            GuardAst::False(_) => mk_r(),
            GuardAst::Not(a, _) => g_not(&self.guard(a)?),
            GuardAst::And(a, b) => g_and(&self.guard(a)?, &self.guard(b)?),
            GuardAst::Or(a, b) => g_or(&self.guard(a)?, &self.guard(b)?),
            GuardAst::Call(c) => {
                self.known(c)?;
                let b = guard_gen(c.gen.clone(), &c.args);
                let r = self.space.check_guard(&b, self.sig);
                self.checked(r, c.span, b)?
            }
            GuardAst::Raw(r) => {
                Guard(check_raw(r, &self.space.ctx, &omega(), self.sig)?)
            }
        })
    }

    pub fn pred(&self, p: &PredAst) -> R<Predicate> {
        Ok(match p {
            PredAst::Top(_) => p_top(),
            PredAst::Bot(_) => p_bot(),
            PredAst::Lift(g, _) => lift_guard(&self.guard(g)?),
            PredAst::And(a, b) => p_and(&self.pred(a)?, &self.pred(b)?),
            PredAst::Cond(a, b, c) => p_cond(&self.pred(a)?, &self.guard(b)?, &self.pred(c)?),
            PredAst::Call(c) => {
                self.known(c)?;
                let q = pred_gen(c.gen.clone(), &c.args);
                let r = self.space.check_pred(&q, self.sig);
                self.checked(r, c.span, q)?
            }
            PredAst::Raw(r) => {
                Predicate(check_raw(r, &self.space.ctx, &upsilon(), self.sig)?)
            }
        })
    }

    pub fn state(&self, s: &StateAst) -> R<State> {
        let sp = self.space;
        Ok(match s {
            StateAst::Bot(_) => sp.s_bot(),
            StateAst::Choice(a, b, c) => {
                let g = self.guard(b)?;
                sp.s_choice(&self.state(a)?, &g, &self.state(c)?)
                    .map_err(|e| comb_diag(e, b.span()))?
            }
            StateAst::Then(a, p, _) => sp.s_then(&self.state(a)?, &self.prog(p)?),
            StateAst::Observe(a, p, _) => sp.observe(&self.state(a)?, &self.pred(p)?),
            StateAst::Init(c) => {
                self.known(c)?;
                let xs = sp.vars();
                let t = State(gen(c.gen.clone(), &c.args, vec![Branch::new(xs.clone(), ret(ETA, &xs))]));
                let r = sp.check_state(&t, self.sig);
                self.checked(r, c.span, t)?
            }
            StateAst::Raw(r) => {
                State(check_raw(r, &Context::empty(), &sp.psi(), self.sig)?)
            }
        })
    }

    pub fn prog(&self, p: &Prog) -> R<Command> {
        let mut it = p.stmts.iter();
        let mut c = self.stmt(it.next().expect("programs are non-empty"))?;
        for s in it {
            c = self.space.seq(&c, &self.stmt(s)?);
        }
        Ok(c)
    }

    pub fn stmt(&self, s: &Stmt) -> R<Command> {
        let sp = self.space;
        let at = |e: CombError| comb_diag(e, s.span);
        Ok(match &s.kind {
            StmtKind::Skip => sp.skip(),
            StmtKind::Abort => sp.abort(),
            StmtKind::If(b, s1, s2) => sp.ifelse(&self.guard(b)?, &self.stmt(s1)?, &self.stmt(s2)?),
            StmtKind::While(b, body) => sp.while_do(&self.guard(b)?, &self.stmt(body)?),
            StmtKind::Assert(p) => sp.assert(&self.pred(p)?),
            StmtKind::Assign(l, r) => {
                let c = sp.var_assign(l, r).map_err(at)?;
                let r = sp.check_cmd(&c, self.sig);
                self.checked(r, s.span, c)?
            }
            StmtKind::GenAssign(l, call) => {
                self.known(call)?;
                let c = sp.gen_assign(l, &call.gen, &call.args, self.sig).map_err(at)?;
                let r = sp.check_cmd(&c, self.sig);
                self.checked(r, s.span, c)?
            }
            StmtKind::Sample(x, call) => {
                self.known(call)?;
                let e = Expr::call(call.gen.clone(), &call.args, self.sig).map_err(|e| comb_diag(e, call.span))?;
                let c = sp.sample(x, &e).map_err(|e| comb_diag(e, call.span))?;
                let r = sp.check_cmd(&c, self.sig);
                self.checked(r, s.span, c)?
            }
            StmtKind::Block(p) => self.prog(p)?,
            StmtKind::Raw(r) => {
                Command(check_raw(r, &sp.ctx, &sp.psi(), self.sig)?)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{alpha_eq, GeneratorDecl, Name};
    use crate::surface::parser::{parse_guard, parse_program, parse_raw_term, parse_state};

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.add_type("Bool").unwrap();
        let b = || Name::from("Bool");
        s.add_generator(GeneratorDecl::new("b", vec![b()], vec![vec![], vec![]])).unwrap();
        s.add_generator(GeneratorDecl::new("f", vec![b()], vec![vec![b()]])).unwrap();
        s.add_generator(GeneratorDecl::new("coin", vec![], vec![vec![b()]])).unwrap();
        s
    }

    fn space() -> StateSpace {
        StateSpace::new(Context::from_pairs(&[("x", "Bool"), ("y", "Bool")]))
    }

    #[test]
    fn while_elaborates_to_the_combinator() {
        let (sig, sp) = (sig(), space());
        let e = Elaborator::new(&sp, &sig);
        let c = e.prog(&parse_program("while b(x) do x := f(x)").unwrap()).unwrap();
        let want = sp.while_do(
            &guard_gen("b", &[Name::from("x")]),
            &sp.gen_assign(&[Name::from("x")], &Name::from("f"), &[Name::from("x")], &sig).unwrap(),
        );
        assert!(alpha_eq(&c.0, &want.0));
        sp.check_cmd(&c, &sig).unwrap();
        // the loop header and the guard split are visible in the printed term
        let shown = c.0.to_string();
        assert!(shown.starts_with("loop "), "{shown}");
        assert!(shown.contains("b(x){. "), "{shown}");
    }

    #[test]
    fn sugar_and_raw_guards_agree() {
        let (sig, sp) = (sig(), space());
        let e = Elaborator::new(&sp, &sig);
        let a = e.guard(&parse_guard("not b(x)").unwrap()).unwrap();
        let r = e.guard(&parse_guard("b(x){. a2()}{. a1()}").unwrap()).unwrap();
        assert!(alpha_eq(&a.0, &r.0));
    }

    #[test]
    fn type_errors_are_located() {
        let (sig, sp) = (sig(), space());
        let e = Elaborator::new(&sp, &sig);
        let text = "x := f(y); assert b(z)";
        let d = e.prog(&parse_program(text).unwrap()).unwrap_err();
        assert_eq!(&text[d.span.start..d.span.end], "b(z)");
        assert_eq!(d.code, "type");
        let text = "skip; x := g(y)";
        let d = e.prog(&parse_program(text).unwrap()).unwrap_err();
        assert_eq!(&text[d.span.start..d.span.end], "g(y)");
        let text = "b(x){. eta(x, y)}{. eta(y, w)}";
        let r = parse_raw_term(text).unwrap();
        let d = check_raw(&r, &sp.ctx, &sp.psi(), &sig).unwrap_err();
        assert_eq!(&text[d.span.start..d.span.end], "eta(y, w)");
        assert_eq!(d.hint.as_deref(), Some("RETURN"));
    }

    #[test]
    fn branchless_calls_resolve_to_generators() {
        let mut s = sig();
        s.add_generator(GeneratorDecl::new("stop", vec![Name::from("Bool")], vec![])).unwrap();
        let sp = space();
        let r = parse_raw_term("b(x){. stop(x)}{. eta(x, y)}").unwrap();
        let t = check_raw(&r, &sp.ctx, &sp.psi(), &s).unwrap();
        let want = gen("b", &[Name::from("x")], vec![
            Branch::new(vec![], gen("stop", &[Name::from("x")], vec![])),
            Branch::new(vec![], ret(ETA, &[Name::from("x"), Name::from("y")])),
        ]);
        assert_eq!(t, want);
        // a label in scope wins over a generator of the same name
        let r = parse_raw_term("loop stop(x){u. stop(u)}").unwrap();
        let t = resolve(&r.term, &BTreeSet::new(), &s);
        assert_eq!(t, r.term);
    }

    #[test]
    fn states_and_samples() {
        let (sig, sp) = (sig(), space());
        let e = Elaborator::new(&sp, &sig);
        let d = e.state(&parse_state("bot +[b(x)] bot").unwrap()).unwrap_err();
        assert_eq!(d.code, "shape");
        e.prog(&parse_program("x <- coin(); y <- coin()").unwrap()).unwrap();
        let d = e.prog(&parse_program("x <- f(y)").unwrap()).unwrap_err();
        assert_eq!(d.code, "shape");
    }
}

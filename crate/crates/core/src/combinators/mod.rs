//! Guards, predicates, commands and states as derived constructs of the
//! internal language.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::kernel::{
    fresh, gen, lp, ret, subst_labels, subst_vars, typecheck, Branch, Context, Index, LabelSub, Name, NameKind,
    Signature, Term, TypeError,
};

/// Exit labels of guards.
pub const A1: &str = "a1";
pub const A2: &str = "a2";
/// Exit label of predicates.
pub const V: &str = "v";
/// Exit label of commands and states.
pub const ETA: &str = "eta";
/// Exit label of the second command in a two-command branch.
pub const ETA2: &str = "eta2";
/// Exit label of expressions.
pub const EPS: &str = "eps";

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CombError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error(transparent)]
    Type(#[from] TypeError),
}

fn shape<T>(msg: impl Into<String>) -> Result<T, CombError> {
    Err(CombError::Shape(msg.into()))
}

/// `Γ ⊢ b : (a1 : (), a2 : ())`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Guard(pub Term);

/// `Γ ⊢ p : (v : ())`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Predicate(pub Term);

/// `Γ ⊢ c : (eta : Γ's types)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Command(pub Term);

/// `⊢ s : (eta : Γ's types)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct State(pub Term);

/// `Γ ⊢ e : (eps : X)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Expr {
    pub term: Term,
    pub ty: Name,
}

/// The declared program state `Γ`, threaded through every command.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StateSpace {
    pub ctx: Context,
}

pub fn omega() -> Index {
    Index::new(vec![(A1.into(), vec![]), (A2.into(), vec![])])
}

pub fn upsilon() -> Index {
    Index::single(V, vec![])
}

fn sub(label: &str, body: &Term) -> LabelSub {
    LabelSub::new(label, &[], body.clone())
}

/// `b[a1, a2 \ t1, t2]`.
fn split(b: &Term, t1: &Term, t2: &Term) -> Term {
    subst_labels(b, &[sub(A1, t1), sub(A2, t2)])
}

// guards

pub fn mk_l() -> Guard {
    Guard(ret(A1, &[]))
}

pub fn mk_r() -> Guard {
    Guard(ret(A2, &[]))
}

pub fn g_not(b: &Guard) -> Guard {
    Guard(split(&b.0, &ret(A2, &[]), &ret(A1, &[])))
}

pub fn g_and(b1: &Guard, b2: &Guard) -> Guard {
    let b2_rr = split(&b2.0, &ret(A2, &[]), &ret(A2, &[]));
    Guard(split(&b1.0, &b2.0, &b2_rr))
}

pub fn g_or(b1: &Guard, b2: &Guard) -> Guard {
    let b2_ll = split(&b2.0, &ret(A1, &[]), &ret(A1, &[]));
    Guard(split(&b1.0, &b2_ll, &b2.0))
}

/// `[b]{t1}{t2}` for terms over a common index.
pub fn pick(b: &Guard, t1: &Term, t2: &Term) -> Term {
    split(&b.0, t1, t2)
}

/// `⟨⟨b⟩⟩{t1}{t2}`; the index is the concatenation of both indices.
pub fn branch(b: &Guard, t1: &Term, t2: &Term) -> Term {
    split(&b.0, t1, t2)
}

/// Branch between two commands, the second exiting through `eta2`.
pub fn branch_cmds(b: &Guard, c1: &Command, c2: &Command) -> Term {
    let c2 = crate::kernel::rename_label(&c2.0, &ETA.into(), &ETA2.into());
    branch(b, &c1.0, &c2)
}

/// A guard asking a generator with two empty branches.
pub fn guard_gen(f: impl Into<Name>, args: &[Name]) -> Guard {
    Guard(gen(
        f,
        args,
        vec![Branch::new(vec![], ret(A1, &[])), Branch::new(vec![], ret(A2, &[]))],
    ))
}

// predicates

pub fn p_top() -> Predicate {
    Predicate(ret(V, &[]))
}

pub fn p_bot() -> Predicate {
    Predicate(bottom())
}

/// `loop w(){w()}`, which has every index.
pub fn bottom() -> Term {
    lp("w", &[], &[], ret("w", &[]))
}

pub fn p_and(p: &Predicate, q: &Predicate) -> Predicate {
    Predicate(subst_labels(&p.0, &[sub(V, &q.0)]))
}

pub fn p_cond(p: &Predicate, b: &Guard, q: &Predicate) -> Predicate {
    Predicate(pick(b, &p.0, &q.0))
}

/// `b#`.
pub fn lift_guard(b: &Guard) -> Predicate {
    Predicate(pick(b, &p_top().0, &p_bot().0))
}

/// `p[x \ e] ≡ e[eps \ x. p]`.
pub fn p_subst(p: &Predicate, x: &Name, e: &Expr) -> Predicate {
    Predicate(subst_labels(&e.term, &[LabelSub::new(EPS, std::slice::from_ref(x), p.0.clone())]))
}

/// A predicate asking a generator with branches `(v, never)`.
pub fn pred_gen(f: impl Into<Name>, args: &[Name]) -> Predicate {
    lift_guard(&guard_gen(f, args))
}

// expressions

impl Expr {
    pub fn var(x: impl Into<Name>, ty: impl Into<Name>) -> Expr {
        Expr {
            term: ret(EPS, &[x.into()]),
            ty: ty.into(),
        }
    }

    /// `f(args){y. eps(y)}` for a generator with a single one-output branch.
    pub fn call(f: impl Into<Name>, args: &[Name], sig: &Signature) -> Result<Expr, CombError> {
        let f = f.into();
        let decl = match sig.generator(&f) {
            Some(d) => d,
            None => return shape(format!("unknown generator `{f}`")),
        };
        if decl.branches.len() != 1 || decl.branches[0].len() != 1 {
            return shape(format!("`{f}` is not a single-output generator"));
        }
        let y = fresh(NameKind::Var, &args.iter().cloned().collect());
        Ok(Expr {
            term: gen(f, args, vec![Branch::new(vec![y.clone()], ret(EPS, &[y]))]),
            ty: decl.branches[0][0].clone(),
        })
    }
}

// commands and states

impl StateSpace {
    pub fn new(ctx: Context) -> Self {
        StateSpace { ctx }
    }

    pub fn vars(&self) -> Vec<Name> {
        self.ctx.vars()
    }

    pub fn psi(&self) -> Index {
        Index::single(ETA, self.ctx.types())
    }

    fn exit(&self) -> Term {
        ret(ETA, &self.vars())
    }

    fn then_term(&self, t: &Term, c: &Term) -> Term {
        subst_labels(t, &[LabelSub::new(ETA, &self.vars(), c.clone())])
    }

    pub fn skip(&self) -> Command {
        Command(self.exit())
    }

    pub fn abort(&self) -> Command {
        self.assert(&p_bot())
    }

    pub fn seq(&self, c1: &Command, c2: &Command) -> Command {
        Command(self.then_term(&c1.0, &c2.0))
    }

    pub fn assert(&self, p: &Predicate) -> Command {
        Command(subst_labels(&p.0, &[sub(V, &self.exit())]))
    }

    pub fn var_assign(&self, us: &[Name], vs: &[Name]) -> Result<Command, CombError> {
        if us.len() != vs.len() {
            return shape(format!("assigning {} values to {} variables", vs.len(), us.len()));
        }
        self.check_vars(us)?;
        self.check_vars(vs)?;
        Ok(Command(subst_vars(&self.exit(), us, vs)))
    }

    /// `ū := f(v̄)` for a generator with a single branch of matching arity.
    pub fn gen_assign(&self, us: &[Name], f: &Name, vs: &[Name], sig: &Signature) -> Result<Command, CombError> {
        let decl = match sig.generator(f) {
            Some(d) => d,
            None => return shape(format!("unknown generator `{f}`")),
        };
        if decl.branches.len() != 1 || decl.branches[0].len() != us.len() {
            return shape(format!("`{f}` does not return {} values in one branch", us.len()));
        }
        self.check_vars(us)?;
        Ok(Command(gen(f.clone(), vs, vec![Branch::new(us.to_vec(), self.exit())])))
    }

    /// `x := e ≡ e[eps \ x. eta(x̄)]`.
    pub fn assign(&self, x: &Name, e: &Expr) -> Result<Command, CombError> {
        self.check_vars(std::slice::from_ref(x))?;
        Ok(Command(subst_labels(
            &e.term,
            &[LabelSub::new(EPS, std::slice::from_ref(x), self.exit())],
        )))
    }

    /// `x ← s` for a closed distribution `⊢ s : (eps : X)`.
    pub fn sample(&self, x: &Name, s: &Expr) -> Result<Command, CombError> {
        if !s.term.free_vars().is_empty() {
            return shape("a sampled expression must be closed");
        }
        self.assign(x, s)
    }

    pub fn ifelse(&self, b: &Guard, c1: &Command, c2: &Command) -> Command {
        Command(pick(b, &c1.0, &c2.0))
    }

    /// `loop α(x̄){x̄. if b then c[eta \ x̄. α(x̄)] else skip}`.
    pub fn while_do(&self, b: &Guard, c: &Command) -> Command {
        let mut avoid: BTreeSet<Name> = b.0.all_names();
        avoid.extend(c.0.all_names());
        avoid.extend([Name::new(ETA), Name::new(A1), Name::new(A2)]);
        let alpha = fresh(NameKind::Label, &avoid);
        let xs = self.vars();
        let again = subst_labels(&c.0, &[LabelSub::new(ETA, &xs, ret(alpha.clone(), &xs))]);
        let body = pick(b, &again, &self.exit());
        Command(lp(alpha, &xs, &xs, body))
    }

    pub fn s_bot(&self) -> State {
        State(bottom())
    }

    /// `s ; c` for a state `s` and command `c`.
    pub fn s_then(&self, s: &State, c: &Command) -> State {
        State(self.then_term(&s.0, &c.0))
    }

    /// `s ↓ p ≡ s ; assert p`.
    pub fn observe(&self, s: &State, p: &Predicate) -> State {
        self.s_then(s, &self.assert(p))
    }

    /// `s +_b t` for a closed guard.
    pub fn s_choice(&self, s: &State, b: &Guard, t: &State) -> Result<State, CombError> {
        if !b.0.free_vars().is_empty() {
            return shape("a state choice needs a closed guard");
        }
        Ok(State(pick(b, &s.0, &t.0)))
    }

    /// `s(u \ x) ≡ s ; (x := u)`.
    pub fn cosubst(&self, s: &State, u: &Name, x: &Name) -> Result<State, CombError> {
        Ok(self.s_then(s, &self.var_assign(std::slice::from_ref(x), std::slice::from_ref(u))?))
    }

    /// `∏ₓ s · sₓ ≡ s ; (x := sₓ)` with `sₓ` a closed one-output state.
    pub fn mute(&self, s: &State, x: &Name, sx: &Expr) -> Result<State, CombError> {
        Ok(self.s_then(s, &self.sample(x, sx)?))
    }

    /// `x ← s` as a state: sample `x` after the state `s`.
    pub fn s_sample(&self, s: &State, x: &Name, e: &Expr) -> Result<State, CombError> {
        Ok(self.s_then(s, &self.sample(x, e)?))
    }

    fn check_vars(&self, xs: &[Name]) -> Result<(), CombError> {
        for x in xs {
            if self.ctx.lookup(x).is_none() {
                return shape(format!("`{x}` is not a state variable"));
            }
        }
        Ok(())
    }

    pub fn check_guard(&self, b: &Guard, sig: &Signature) -> Result<(), CombError> {
        Ok(typecheck(&b.0, &self.ctx, &omega(), sig)?)
    }

    pub fn check_pred(&self, p: &Predicate, sig: &Signature) -> Result<(), CombError> {
        Ok(typecheck(&p.0, &self.ctx, &upsilon(), sig)?)
    }

    pub fn check_cmd(&self, c: &Command, sig: &Signature) -> Result<(), CombError> {
        Ok(typecheck(&c.0, &self.ctx, &self.psi(), sig)?)
    }

    pub fn check_state(&self, s: &State, sig: &Signature) -> Result<(), CombError> {
        Ok(typecheck(&s.0, &Context::empty(), &self.psi(), sig)?)
    }

    pub fn check_expr(&self, e: &Expr, sig: &Signature) -> Result<(), CombError> {
        Ok(typecheck(&e.term, &self.ctx, &Index::single(EPS, vec![e.ty.clone()]), sig)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{alpha_eq, names};

    fn space() -> StateSpace {
        StateSpace::new(Context::from_pairs(&[("x", "B")]))
    }

    #[test]
    fn negation_swaps_exits() {
        assert_eq!(g_not(&mk_l()), mk_r());
        assert_eq!(g_not(&g_not(&guard_gen("b", &names(&["x"])))), guard_gen("b", &names(&["x"])));
    }

    #[test]
    fn while_has_the_loop_shape() {
        let s = space();
        let w = s.while_do(&guard_gen("b", &names(&["x"])), &s.skip());
        let expected = lp(
            "a0",
            &names(&["x"]),
            &names(&["x"]),
            gen(
                "b",
                &names(&["x"]),
                vec![
                    Branch::new(vec![], ret("a0", &names(&["x"]))),
                    Branch::new(vec![], ret(ETA, &names(&["x"]))),
                ],
            ),
        );
        assert!(alpha_eq(&w.0, &expected));
    }

    #[test]
    fn assert_top_is_skip() {
        let s = space();
        assert_eq!(s.assert(&p_top()), s.skip());
    }

    #[test]
    fn var_assign_checks_arity() {
        let s = space();
        assert!(s.var_assign(&names(&["x"]), &[]).is_err());
        assert_eq!(s.var_assign(&names(&["x"]), &names(&["x"])).unwrap(), s.skip());
    }
}

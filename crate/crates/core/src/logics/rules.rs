//! The proof-rule catalogue as generators of random instances, and the exact
//! checker that decides whether an instance refutes its rule.
//!
//! A generator picks random leaves and then solves for conditions that make
//! the premises hold (strongest posts, weakest pres, invariants by closure),
//! perturbed in the permitted direction. Premises are always re-checked
//! exactly: an instance whose premises fail is vacuous and is not counted.

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::backends::{eval, is_constant, is_deterministic, is_total, Backend, Kernel, Morphism, Weight};
use crate::combinators::{
    branch_cmds, lift_guard, omega, p_and, p_bot, p_cond, p_subst, p_top, pick, upsilon, Command, Expr, Guard,
    Predicate, State, StateSpace, EPS, ETA, ETA2,
};
use crate::kernel::{subst_vars, BasicType, Context, Index, Name, Term};
use crate::models::Model;

use super::coupling::{independent, project, Couple, RelTriple, RelVerdict};
use super::ops::{Logic, RowProps};
use super::random::{joint, Builder};
use super::sem::{self, image, join, post_min, weakest};
use super::triple::{violation, Cond, Triple, TripleError, TripleShape};

pub type Rg = ChaCha8Rng;

/// A proof obligation: a triple, a relational triple or an (in)equation
/// between two terms.
#[derive(Clone, Debug)]
pub enum Obligation {
    Triple(Triple),
    Rel(RelTriple),
    Cmp {
        ctx: Context,
        idx: Index,
        lhs: Term,
        rhs: Term,
        eq: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SideKind {
    Total,
    Deterministic,
    Constant,
}

/// A side condition on a guard or expression.
#[derive(Clone, Debug)]
pub struct Side {
    pub kind: SideKind,
    pub ctx: Context,
    pub idx: Index,
    pub term: Term,
}

/// A generated rule instance.
#[derive(Clone, Debug)]
pub struct Draft {
    pub side: Vec<Side>,
    pub premises: Vec<Obligation>,
    pub conclusion: Obligation,
}

pub struct Rule<B: Couple> {
    pub id: &'static str,
    make: fn(&mut Gen<'_, B>) -> Draft,
}

impl<B: Couple> Rule<B> {
    pub(crate) fn new(id: &'static str, make: fn(&mut Gen<'_, B>) -> Draft) -> Self {
        Rule { id, make }
    }

    pub fn family(&self) -> &'static str {
        self.id.split('.').next().unwrap_or(self.id)
    }

    pub fn draft(&self, b: &mut Builder<B>, r: &mut Rg) -> Draft {
        (self.make)(&mut Gen { b, r })
    }
}

/// Verdict on one obligation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid(String),
}

#[derive(Clone, Debug)]
pub enum Outcome {
    /// Premises hold and so does the conclusion.
    Sound,
    /// Some premise fails; the instance says nothing.
    Vacuous(String),
    /// A side condition fails: a generator bug.
    SideViolated(String),
    /// Premises hold, the conclusion fails.
    Refuted(String),
}

// checking

pub fn check_side<B: Backend>(s: &Side, model: &Model) -> Result<bool, TripleError> {
    let m: Morphism<B> = eval(&s.term, &s.ctx, &s.idx, model)?;
    Ok(match s.kind {
        SideKind::Total => is_total(&m),
        SideKind::Deterministic => is_deterministic(&m),
        SideKind::Constant => is_constant(&m),
    })
}

pub fn check_obligation<B: Couple>(ob: &Obligation, model: &Model) -> Result<Verdict, TripleError> {
    Ok(match ob {
        Obligation::Triple(t) => match t.check::<B>(model)? {
            None => Verdict::Valid,
            Some(v) => Verdict::Invalid(v.to_string()),
        },
        Obligation::Rel(t) => match t.check::<B>(model, None, true)? {
            RelVerdict::Valid(_) => Verdict::Valid,
            RelVerdict::Invalid => Verdict::Invalid("no coupling witnesses the triple".into()),
            RelVerdict::Unknown(e) => Verdict::Invalid(format!("undecided: {e}")),
        },
        Obligation::Cmp { ctx, idx, lhs, rhs, eq } => {
            let l: Morphism<B> = eval(lhs, ctx, idx, model)?;
            let r: Morphism<B> = eval(rhs, ctx, idx, model)?;
            l.same_type(&r)?;
            let bad = violation(&l, &r).or_else(|| if *eq { violation(&r, &l) } else { None });
            match bad {
                None => Verdict::Valid,
                Some(v) => Verdict::Invalid(v.to_string()),
            }
        }
    })
}

pub fn check_draft<B: Couple>(d: &Draft, model: &Model) -> Result<Outcome, TripleError> {
    for s in &d.side {
        if !check_side::<B>(s, model)? {
            return Ok(Outcome::SideViolated(format!("{:?} fails for {}", s.kind, s.term)));
        }
    }
    for (i, p) in d.premises.iter().enumerate() {
        if let Verdict::Invalid(e) = check_obligation::<B>(p, model)? {
            return Ok(Outcome::Vacuous(format!("premise {}: {e}", i + 1)));
        }
    }
    Ok(match check_obligation::<B>(&d.conclusion, model)? {
        Verdict::Valid => Outcome::Sound,
        Verdict::Invalid(e) => Outcome::Refuted(e),
    })
}

// rendering

fn ctx_json(c: &Context) -> Value {
    Value::Array(
        c.vars()
            .iter()
            .zip(c.types())
            .map(|(v, t)| Value::Array(vec![v.to_string().into(), t.to_string().into()]))
            .collect(),
    )
}

fn cond_text(c: &Cond) -> (&'static str, String) {
    match c {
        Cond::Pred(p) => ("pred", p.0.to_string()),
        Cond::State(s) => ("state", s.0.to_string()),
    }
}

impl Obligation {
    /// A machine-readable rendering with every term printed.
    pub fn to_json(&self) -> Value {
        match self {
            Obligation::Triple(t) => {
                let (k, pre) = cond_text(&t.pre);
                let (_, post) = cond_text(&t.post);
                serde_json::json!({
                    "kind": "triple", "shape": t.shape.as_str(), "space": ctx_json(&t.space.ctx),
                    "cond": k, "pre": pre, "cmd": t.cmd.0.to_string(), "post": post,
                })
            }
            Obligation::Rel(t) => {
                let (k, pre) = cond_text(&t.pre);
                let (_, post) = cond_text(&t.post);
                serde_json::json!({
                    "kind": "relational", "shape": t.shape.as_str(),
                    "left": ctx_json(&t.left.ctx), "right": ctx_json(&t.right.ctx),
                    "cond": k, "pre": pre, "c": t.c.0.to_string(), "d": t.d.0.to_string(), "post": post,
                })
            }
            Obligation::Cmp { ctx, idx, lhs, rhs, eq } => serde_json::json!({
                "kind": if *eq { "equation" } else { "inequation" },
                "ctx": ctx.to_string(), "index": idx.to_string(),
                "lhs": lhs.to_string(), "rhs": rhs.to_string(),
            }),
        }
    }
}

/// Everything needed to replay a refuting instance.
#[derive(Clone, Debug, Serialize)]
pub struct Bundle {
    pub rule: String,
    pub backend: String,
    pub seed: u64,
    pub model: Value,
    pub side: Vec<String>,
    pub premises: Vec<Value>,
    pub conclusion: Value,
    pub violation: String,
}

impl Bundle {
    pub fn new<B: Backend>(rule: &str, seed: u64, model: &Model, d: &Draft, violation: String) -> Bundle {
        Bundle {
            rule: rule.into(),
            backend: B::ID.to_string(),
            seed,
            model: model.to_json(),
            side: d.side.iter().map(|s| format!("{:?}: {}", s.kind, s.term)).collect(),
            premises: d.premises.iter().map(Obligation::to_json).collect(),
            conclusion: d.conclusion.to_json(),
            violation,
        }
    }
}

// generation

/// Generation state: the builder accumulating the model and the random source.
pub struct Gen<'a, B: Logic> {
    pub b: &'a mut Builder<B>,
    pub r: &'a mut Rg,
}

type W<B> = <B as Backend>::W;

pub(crate) fn mul<X: Weight>(a: &[X], b: &[X]) -> Vec<X> {
    a.iter().zip(b).map(|(x, y)| x.clone() * y.clone()).collect()
}

/// `k` restricted to the rows where `mask` is nonzero, as a list of reached columns.
fn reached<X: Weight>(k: &Kernel<X>, rows: impl Fn(usize) -> bool) -> Vec<bool> {
    let mut out = vec![false; k.n_cols()];
    for x in 0..k.n_rows() {
        if rows(x) {
            for (y, _) in k.row(x) {
                out[*y] = true;
            }
        }
    }
    out
}

fn kill<X: Weight>(v: &mut [X], dead: &[bool]) {
    for (w, d) in v.iter_mut().zip(dead) {
        if *d {
            *w = X::zero();
        }
    }
}

fn nz<X: Weight>(w: &X) -> bool {
    !w.is_zero()
}

impl<'a, B: Logic> Gen<'a, B> {
    pub(crate) fn space(&mut self) -> StateSpace {
        let vars: &[&str] = if self.r.gen_bool(0.5) { &["x"] } else { &["x", "y"] };
        self.b.space(self.r, vars, 9)
    }

    /// Two spaces for a relational triple; in mirror mode the right one is
    /// a renamed copy of the left.
    pub(crate) fn rel_spaces(&mut self) -> (StateSpace, StateSpace, bool) {
        let mut two = self.r.gen_bool(0.3);
        let mut l = self.b.space(self.r, if two { &["x", "u"] } else { &["x"] }, 4);
        if self.b.space_size(&l) > 4 {
            two = false;
            l = self.b.space(self.r, &["x"], 4);
        }
        let rv: &[&str] = if two { &["y", "v"] } else { &["y"] };
        let mirror = self.r.gen_bool(0.5);
        let r = if mirror { self.b.rename_space(&l, rv) } else { self.b.space(self.r, rv, 4) };
        (l, r, mirror)
    }

    pub(crate) fn prog(&mut self, s: &StateSpace) -> Command {
        let d = self.r.gen_range(0..=2);
        self.b.random_program(self.r, s, d)
    }

    pub(crate) fn small_prog(&mut self, s: &StateSpace) -> Command {
        let d = self.r.gen_range(0..=1);
        self.b.random_program(self.r, s, d)
    }

    /// A left program and a right one, mirrored when asked.
    pub(crate) fn prog_pair(&mut self, l: &StateSpace, r: &StateSpace, mirror: bool) -> (Command, Command) {
        let c = self.small_prog(l);
        let d = if mirror { mirror_cmd(&c, l, r) } else { self.small_prog(r) };
        (c, d)
    }

    pub(crate) fn guard(&mut self, s: &StateSpace, props: RowProps) -> Guard {
        self.b.random_guard(self.r, s, props)
    }

    pub(crate) fn guard_pair(&mut self, l: &StateSpace, r: &StateSpace, mirror: bool, props: RowProps) -> (Guard, Guard) {
        let g = self.guard(l, props);
        let h = if mirror { Guard(rename_vars(&g.0, l, r)) } else { self.guard(r, props) };
        (g, h)
    }

    pub(crate) fn pred(&mut self, s: &StateSpace) -> (Predicate, Vec<W<B>>) {
        let v = self.b.random_pred_vals(self.r, s);
        (self.b.pred_from(s, &v), v)
    }

    pub(crate) fn pred_of(&mut self, s: &StateSpace, v: &[W<B>]) -> Predicate {
        self.b.pred_from(s, v)
    }

    pub(crate) fn above(&mut self, v: &[W<B>]) -> Vec<W<B>> {
        sem::vals_above::<B, _>(self.r, v)
    }

    pub(crate) fn below(&mut self, v: &[W<B>]) -> Vec<W<B>> {
        sem::vals_below::<B, _>(self.r, v)
    }

    pub(crate) fn state(&mut self, s: &StateSpace) -> (State, Vec<W<B>>) {
        let v = self.b.random_state_vals(self.r, s);
        (self.b.state_from(s, &v), v)
    }

    pub(crate) fn state_of(&mut self, s: &StateSpace, v: &[W<B>]) -> State {
        self.b.state_from(s, v)
    }

    pub(crate) fn s_below(&mut self, v: &[W<B>]) -> Vec<W<B>> {
        sem::state_below::<B, _>(self.r, v)
    }

    pub(crate) fn k(&self, s: &StateSpace, c: &Command) -> Kernel<W<B>> {
        self.b.cmd_m(s, c).kernel
    }

    /// Values of `b#`.
    pub(crate) fn gv(&self, s: &StateSpace, g: &Guard) -> Vec<W<B>> {
        self.b.pred_vals(s, &lift_guard(g))
    }

    pub(crate) fn pv(&self, s: &StateSpace, p: &Predicate) -> Vec<W<B>> {
        self.b.pred_vals(s, p)
    }

    /// The joint part of the independent coupling of `c` and `d`.
    pub(crate) fn hk(&self, l: &StateSpace, r: &StateSpace, c: &Command, d: &Command) -> Kernel<W<B>> {
        let h = independent(&self.b.cmd_m(l, c), &self.b.cmd_m(r, d));
        project(&h).kernel
    }

    pub(crate) fn var(&mut self, s: &StateSpace) -> (Name, BasicType) {
        let x = s.vars().choose(self.r).cloned().expect("nonempty state");
        let t = s.ctx.lookup(&x).map(|(_, t)| t.clone()).expect("declared");
        (x, t)
    }

    /// Two variables of the same type, possibly equal.
    pub(crate) fn var_pair(&mut self, s: &StateSpace) -> (Name, Name) {
        let (x, t) = self.var(s);
        let same: Vec<Name> = s.vars().into_iter().filter(|v| s.ctx.lookup(v).map(|(_, u)| u == &t) == Some(true)).collect();
        let y = same.choose(self.r).cloned().expect("x itself qualifies");
        (x, y)
    }

    pub(crate) fn expr(&mut self, s: &StateSpace, ty: &BasicType, props: RowProps) -> Expr {
        self.b.expr(self.r, s, ty, props)
    }
}

fn rename_vars(t: &Term, from: &StateSpace, to: &StateSpace) -> Term {
    subst_vars(t, &from.vars(), &to.vars())
}

fn mirror_cmd(c: &Command, l: &StateSpace, r: &StateSpace) -> Command {
    Command(rename_vars(&c.0, l, r))
}

// obligation builders

fn tri(shape: TripleShape, s: &StateSpace, pre: Cond, c: &Command, post: Cond) -> Obligation {
    Obligation::Triple(Triple {
        shape,
        space: s.clone(),
        pre,
        cmd: c.clone(),
        post,
    })
}

fn hoare(s: &StateSpace, p: &Predicate, c: &Command, q: &Predicate) -> Obligation {
    tri(TripleShape::AssertCorrect, s, Cond::Pred(p.clone()), c, Cond::Pred(q.clone()))
}

fn incorrect(s: &StateSpace, a: &State, c: &Command, t: &State) -> Obligation {
    tri(TripleShape::StateIncorrect, s, Cond::State(a.clone()), c, Cond::State(t.clone()))
}

fn outcome(s: &StateSpace, p: &Predicate, c: &Command, q: &Predicate) -> Obligation {
    tri(TripleShape::PredCorrect, s, Cond::Pred(p.clone()), c, Cond::Pred(q.clone()))
}

fn rel(shape: TripleShape, l: &StateSpace, r: &StateSpace, p: &Predicate, c: &Command, d: &Command, q: &Predicate) -> Obligation {
    Obligation::Rel(RelTriple {
        shape,
        left: l.clone(),
        right: r.clone(),
        pre: Cond::Pred(p.clone()),
        c: c.clone(),
        d: d.clone(),
        post: Cond::Pred(q.clone()),
    })
}

fn rh(l: &StateSpace, r: &StateSpace, p: &Predicate, c: &Command, d: &Command, q: &Predicate) -> Obligation {
    rel(TripleShape::RelAssertCorrect, l, r, p, c, d, q)
}

fn ri(l: &StateSpace, r: &StateSpace, p: &Predicate, c: &Command, d: &Command, q: &Predicate) -> Obligation {
    rel(TripleShape::RelPredIncorrect, l, r, p, c, d, q)
}

fn pred_leq(ctx: &Context, p: &Predicate, q: &Predicate) -> Obligation {
    Obligation::Cmp {
        ctx: ctx.clone(),
        idx: upsilon(),
        lhs: p.0.clone(),
        rhs: q.0.clone(),
        eq: false,
    }
}

pub(crate) fn pred_eq(ctx: &Context, p: &Predicate, q: &Predicate) -> Obligation {
    Obligation::Cmp {
        ctx: ctx.clone(),
        idx: upsilon(),
        lhs: p.0.clone(),
        rhs: q.0.clone(),
        eq: true,
    }
}

pub(crate) fn state_leq(s: &StateSpace, a: &State, b: &State) -> Obligation {
    Obligation::Cmp {
        ctx: Context::empty(),
        idx: s.psi(),
        lhs: a.0.clone(),
        rhs: b.0.clone(),
        eq: false,
    }
}

pub(crate) fn exits2(s: &StateSpace) -> Index {
    let t = s.ctx.types();
    Index::new(vec![(ETA.into(), t.clone()), (ETA2.into(), t)])
}

pub(crate) fn cmds_cmp(s: &StateSpace, lhs: Term, rhs: Term, eq: bool) -> Obligation {
    Obligation::Cmp {
        ctx: s.ctx.clone(),
        idx: s.psi(),
        lhs,
        rhs,
        eq,
    }
}

pub(crate) fn branches_cmp(s: &StateSpace, lhs: Term, rhs: Term, eq: bool) -> Obligation {
    Obligation::Cmp {
        ctx: s.ctx.clone(),
        idx: exits2(s),
        lhs,
        rhs,
        eq,
    }
}

pub(crate) fn side_guard(kind: SideKind, s: &StateSpace, g: &Guard) -> Side {
    Side {
        kind,
        ctx: s.ctx.clone(),
        idx: omega(),
        term: g.0.clone(),
    }
}

fn side_expr(kind: SideKind, s: &StateSpace, e: &Expr) -> Side {
    Side {
        kind,
        ctx: s.ctx.clone(),
        idx: Index::single(EPS, vec![e.ty.clone()]),
        term: e.term.clone(),
    }
}

fn function_sides(s: &StateSpace, g: &Guard) -> Vec<Side> {
    vec![side_guard(SideKind::Total, s, g), side_guard(SideKind::Deterministic, s, g)]
}

pub(crate) fn draft(side: Vec<Side>, premises: Vec<Obligation>, conclusion: Obligation) -> Draft {
    Draft { side, premises, conclusion }
}

pub(crate) fn not(g: &Guard) -> Guard {
    crate::combinators::g_not(g)
}

/// The predicate `b1 = b2` on the joint state.
fn agree(b1: &Guard, b2: &Guard) -> Predicate {
    Predicate(pick(b1, &lift_guard(b2).0, &lift_guard(&not(b2)).0))
}

fn both(b1: &Guard, b2: &Guard) -> Predicate {
    p_and(&lift_guard(b1), &lift_guard(b2))
}

/// Closes `p` under the given kernels: the least invariant above it.
fn close_post<X: Weight>(mut p: Vec<X>, ks: &[&Kernel<X>]) -> Vec<X> {
    loop {
        let mut n = p.clone();
        for k in ks {
            n = join(&n, &post_min(&p, k));
        }
        if n == p {
            return p;
        }
        p = n;
    }
}

/// Grows `p` towards `p ≥ k ; p` for all kernels; stops after a fixed
/// number of rounds (probabilistic weights may only converge in the limit).
fn close_pre<X: Weight>(mut p: Vec<X>, ks: &[&Kernel<X>]) -> Vec<X> {
    for _ in 0..32 {
        let mut n = p.clone();
        for k in ks {
            n = join(&n, &weakest(k, &p));
        }
        if n == p {
            break;
        }
        p = n;
    }
    p
}

// Hoare logic (assert-correct triples)

fn hoare_skip<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let (p, _) = g.pred(&s);
    draft(vec![], vec![], hoare(&s, &p, &s.skip(), &p))
}

fn hoare_comp<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let (c1, c2) = (g.prog(&s), g.prog(&s));
    let (p, pv) = g.pred(&s);
    let qv = g.above(&post_min(&pv, &g.k(&s, &c1)));
    let rv = g.above(&post_min(&qv, &g.k(&s, &c2)));
    let (q, r) = (g.pred_of(&s, &qv), g.pred_of(&s, &rv));
    draft(
        vec![],
        vec![hoare(&s, &p, &c1, &q), hoare(&s, &q, &c2, &r)],
        hoare(&s, &p, &s.seq(&c1, &c2), &r),
    )
}

fn hoare_assign<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let (x, t) = g.var(&s);
    let e = g.expr(&s, &t, RowProps::FUNCTION);
    let (p, _) = g.pred(&s);
    let c = s.assign(&x, &e).expect("typed assignment");
    draft(
        vec![side_expr(SideKind::Total, &s, &e), side_expr(SideKind::Deterministic, &s, &e)],
        vec![],
        hoare(&s, &p_subst(&p, &x, &e), &c, &p),
    )
}

fn hoare_choice<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.guard(&s, RowProps::ANY);
    let (c1, c2) = (g.prog(&s), g.prog(&s));
    let (p, pv) = g.pred(&s);
    let qv = join(&post_min(&pv, &g.k(&s, &c1)), &post_min(&pv, &g.k(&s, &c2)));
    let qv = g.above(&qv);
    let q = g.pred_of(&s, &qv);
    draft(
        vec![],
        vec![hoare(&s, &p, &c1, &q), hoare(&s, &p, &c2, &q)],
        hoare(&s, &p, &s.ifelse(&b, &c1, &c2), &q),
    )
}

fn hoare_loop<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.guard(&s, RowProps::ANY);
    let c = g.prog(&s);
    let pv = g.b.random_pred_vals(g.r, &s);
    let pv = close_post(pv, &[&g.k(&s, &c)]);
    let p = g.pred_of(&s, &pv);
    draft(vec![], vec![hoare(&s, &p, &c, &p)], hoare(&s, &p, &s.while_do(&b, &c), &p))
}

fn hoare_unroll<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.guard(&s, RowProps::ANY);
    let c = g.small_prog(&s);
    let w = s.while_do(&b, &c);
    let once = s.ifelse(&b, &s.seq(&c, &w), &s.skip());
    let (p, pv) = g.pred(&s);
    let qv = g.above(&post_min(&pv, &g.k(&s, &once)));
    let q = g.pred_of(&s, &qv);
    draft(vec![], vec![hoare(&s, &p, &once, &q)], hoare(&s, &p, &w, &q))
}

fn hoare_ifelse<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.guard(&s, RowProps::DET);
    let (c1, c2) = (g.prog(&s), g.prog(&s));
    let (p, pv) = g.pred(&s);
    let (bv, nv) = (g.gv(&s, &b), g.gv(&s, &not(&b)));
    let qv = join(&post_min(&mul(&pv, &bv), &g.k(&s, &c1)), &post_min(&mul(&pv, &nv), &g.k(&s, &c2)));
    let qv = g.above(&qv);
    let q = g.pred_of(&s, &qv);
    draft(
        vec![side_guard(SideKind::Deterministic, &s, &b)],
        vec![
            hoare(&s, &p_and(&p, &lift_guard(&b)), &c1, &q),
            hoare(&s, &p_and(&p, &lift_guard(&not(&b))), &c2, &q),
        ],
        hoare(&s, &p, &s.ifelse(&b, &c1, &c2), &q),
    )
}

/// An invariant of `while b do c` through the guarded body.
fn while_invariant<B: Couple>(g: &mut Gen<'_, B>, s: &StateSpace, b: &Guard, c: &Command) -> Predicate {
    let bv = g.gv(s, b);
    let k = g.k(s, c);
    let mut pv = g.b.random_pred_vals(g.r, s);
    loop {
        let n = join(&pv, &post_min(&mul(&bv, &pv), &k));
        if n == pv {
            break;
        }
        pv = n;
    }
    g.pred_of(s, &pv)
}

fn hoare_while<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.guard(&s, RowProps::DET);
    let c = g.prog(&s);
    let p = while_invariant(g, &s, &b, &c);
    draft(
        vec![side_guard(SideKind::Deterministic, &s, &b)],
        vec![hoare(&s, &p_and(&lift_guard(&b), &p), &c, &p)],
        hoare(&s, &p, &s.while_do(&b, &c), &p_and(&p, &lift_guard(&not(&b)))),
    )
}

fn example_while_invariant<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.guard(&s, RowProps::DET);
    let c = g.prog(&s);
    let p = while_invariant(g, &s, &b, &c);
    draft(
        vec![side_guard(SideKind::Deterministic, &s, &b)],
        vec![hoare(&s, &p_and(&lift_guard(&b), &p), &c, &p)],
        hoare(&s, &p, &s.while_do(&b, &c), &p_and(&lift_guard(&not(&b)), &p)),
    )
}

fn hoare_monotone<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let c = g.prog(&s);
    let (p2, p2v) = g.pred(&s);
    let q2v = g.above(&post_min(&p2v, &g.k(&s, &c)));
    let p1v = g.below(&p2v);
    let q1v = g.above(&q2v);
    let (q2, p1, q1) = (g.pred_of(&s, &q2v), g.pred_of(&s, &p1v), g.pred_of(&s, &q1v));
    draft(
        vec![],
        vec![pred_leq(&s.ctx, &p1, &p2), hoare(&s, &p2, &c, &q2), pred_leq(&s.ctx, &q2, &q1)],
        hoare(&s, &p1, &c, &q1),
    )
}

fn hoare_and<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let c = g.prog(&s);
    let k = g.k(&s, &c);
    let (p1, p1v) = g.pred(&s);
    let (p2, p2v) = g.pred(&s);
    let q1v = g.above(&post_min(&p1v, &k));
    let q2v = g.above(&post_min(&p2v, &k));
    let (q1, q2) = (g.pred_of(&s, &q1v), g.pred_of(&s, &q2v));
    draft(
        vec![],
        vec![hoare(&s, &p1, &c, &q1), hoare(&s, &p2, &c, &q2)],
        hoare(&s, &p_and(&p1, &p2), &c, &p_and(&q1, &q2)),
    )
}

fn hoare_fail<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let (p, _) = g.pred(&s);
    let (q, _) = g.pred(&s);
    draft(vec![], vec![], hoare(&s, &p, &s.abort(), &q))
}

fn hoare_assert<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.guard(&s, RowProps::ANY);
    let (p, _) = g.pred(&s);
    let (r, rv) = g.pred(&s);
    let mut qv = g.b.random_pred_vals(g.r, &s);
    let dead: Vec<bool> = rv.iter().map(nz).collect();
    kill(&mut qv, &dead);
    let q = g.pred_of(&s, &qv);
    draft(
        vec![],
        vec![pred_leq(&s.ctx, &p_and(&q, &r), &p_bot())],
        hoare(&s, &p_cond(&p, &b, &q), &s.assert(&r), &p_and(&p, &lift_guard(&b))),
    )
}

fn hoare_top<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let c = g.prog(&s);
    let (p, _) = g.pred(&s);
    draft(vec![], vec![], hoare(&s, &p, &c, &p_top()))
}

fn hoare_bot<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let c = g.prog(&s);
    let (q, _) = g.pred(&s);
    draft(vec![], vec![], hoare(&s, &p_bot(), &c, &q))
}

// incorrectness logic (state-incorrect triples)

fn inc_skip<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let (a, _) = g.state(&s);
    draft(vec![], vec![], incorrect(&s, &a, &s.skip(), &a))
}

fn inc_comp<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let (c1, c2) = (g.prog(&s), g.prog(&s));
    let (a, av) = g.state(&s);
    let tv = g.s_below(&image(&av, &g.k(&s, &c1)));
    let rv = g.s_below(&image(&tv, &g.k(&s, &c2)));
    let (t, r) = (g.state_of(&s, &tv), g.state_of(&s, &rv));
    draft(
        vec![],
        vec![incorrect(&s, &a, &c1, &t), incorrect(&s, &t, &c2, &r)],
        incorrect(&s, &a, &s.seq(&c1, &c2), &r),
    )
}

fn inc_comp_error<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let (c1, c2) = (g.prog(&s), g.prog(&s));
    let (a, _) = g.state(&s);
    draft(
        vec![],
        vec![incorrect(&s, &a, &c1, &s.s_bot())],
        incorrect(&s, &a, &s.seq(&c1, &c2), &s.s_bot()),
    )
}

fn inc_assign<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let (x, y) = g.var_pair(&s);
    let (a, _) = g.state(&s);
    let c = s.var_assign(&[x.clone()], &[y.clone()]).expect("same types");
    let t = s.cosubst(&a, &y, &x).expect("same types");
    draft(vec![], vec![], incorrect(&s, &a, &c, &t))
}

fn inc_sample<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let (x, t) = g.var(&s);
    let e = g.b.closed_expr(g.r, &t, RowProps::ANY);
    let (a, _) = g.state(&s);
    let c = s.sample(&x, &e).expect("closed sample");
    let post = s.mute(&a, &x, &e).expect("closed sample");
    draft(vec![], vec![], incorrect(&s, &a, &c, &post))
}

fn inc_choice_side<B: Couple>(g: &mut Gen<'_, B>, left: bool) -> Draft {
    let s = g.space();
    let b = g.guard(&s, RowProps::ANY);
    let (c1, c2) = (g.prog(&s), g.prog(&s));
    let (a, av) = g.state(&s);
    let (taken, cb) = if left { (b.clone(), &c1) } else { (not(&b), &c2) };
    let bv = g.gv(&s, &taken);
    let tv = g.s_below(&image(&mul(&av, &bv), &g.k(&s, cb)));
    let t = g.state_of(&s, &tv);
    draft(
        vec![],
        vec![incorrect(&s, &s.observe(&a, &lift_guard(&taken)), cb, &t)],
        incorrect(&s, &a, &s.ifelse(&b, &c1, &c2), &t),
    )
}

fn inc_choice_l<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    inc_choice_side(g, true)
}

fn inc_choice_r<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    inc_choice_side(g, false)
}

fn inc_convex<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.b.random_constant_guard(g.r, RowProps::ANY);
    let c = g.prog(&s);
    let k = g.k(&s, &c);
    let (a1, a1v) = g.state(&s);
    let (a2, a2v) = g.state(&s);
    let t1v = g.s_below(&image(&a1v, &k));
    let t2v = g.s_below(&image(&a2v, &k));
    let (t1, t2) = (g.state_of(&s, &t1v), g.state_of(&s, &t2v));
    draft(
        vec![side_guard(SideKind::Constant, &s, &b)],
        vec![incorrect(&s, &a1, &c, &t1), incorrect(&s, &a2, &c, &t2)],
        incorrect(
            &s,
            &s.s_choice(&a1, &b, &a2).expect("closed guard"),
            &c,
            &s.s_choice(&t1, &b, &t2).expect("closed guard"),
        ),
    )
}

fn inc_iter_zero<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.guard(&s, RowProps::ANY);
    let c = g.prog(&s);
    let (a, _) = g.state(&s);
    draft(
        vec![],
        vec![],
        incorrect(&s, &a, &s.while_do(&b, &c), &s.observe(&a, &lift_guard(&not(&b)))),
    )
}

fn inc_iter<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.guard(&s, RowProps::ANY);
    let c = g.small_prog(&s);
    let w = s.while_do(&b, &c);
    let body = s.seq(&c, &w);
    let (a, av) = g.state(&s);
    let bv = g.gv(&s, &b);
    let tv = g.s_below(&image(&mul(&av, &bv), &g.k(&s, &body)));
    let t = g.state_of(&s, &tv);
    draft(
        vec![],
        vec![incorrect(&s, &s.observe(&a, &lift_guard(&b)), &body, &t)],
        incorrect(&s, &a, &w, &t),
    )
}

fn inc_monotone<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let c = g.prog(&s);
    let (a1, a1v) = g.state(&s);
    let a2v = g.s_below(&a1v);
    let t2v = g.s_below(&image(&a2v, &g.k(&s, &c)));
    let t1v = g.s_below(&t2v);
    let (a2, t2, t1) = (g.state_of(&s, &a2v), g.state_of(&s, &t2v), g.state_of(&s, &t1v));
    draft(
        vec![],
        vec![state_leq(&s, &a2, &a1), incorrect(&s, &a2, &c, &t2), state_leq(&s, &t1, &t2)],
        incorrect(&s, &a1, &c, &t1),
    )
}

fn inc_assert<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let (a, _) = g.state(&s);
    let (p, _) = g.pred(&s);
    draft(vec![], vec![], incorrect(&s, &a, &s.assert(&p), &s.observe(&a, &p)))
}

fn inc_fail<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let (a, _) = g.state(&s);
    draft(vec![], vec![], incorrect(&s, &a, &s.abort(), &s.s_bot()))
}

fn inc_bot<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let c = g.prog(&s);
    let (a, _) = g.state(&s);
    draft(vec![], vec![], incorrect(&s, &a, &c, &s.s_bot()))
}

// outcome logic (pred-correct triples)

fn out_skip<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let (p, _) = g.pred(&s);
    draft(vec![], vec![], outcome(&s, &p, &s.skip(), &p))
}

fn out_comp<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let (c1, c2) = (g.prog(&s), g.prog(&s));
    let (r, rv) = g.pred(&s);
    let qv = g.below(&weakest(&g.k(&s, &c2), &rv));
    let pv = g.below(&weakest(&g.k(&s, &c1), &qv));
    let (q, p) = (g.pred_of(&s, &qv), g.pred_of(&s, &pv));
    draft(
        vec![],
        vec![outcome(&s, &p, &c1, &q), outcome(&s, &q, &c2, &r)],
        outcome(&s, &p, &s.seq(&c1, &c2), &r),
    )
}

fn out_assign<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let (x, t) = g.var(&s);
    let e = g.expr(&s, &t, RowProps::DET);
    let (p, _) = g.pred(&s);
    let c = s.assign(&x, &e).expect("typed assignment");
    draft(
        vec![side_expr(SideKind::Deterministic, &s, &e)],
        vec![],
        outcome(&s, &p_subst(&p, &x, &e), &c, &p),
    )
}

fn out_sample<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let (x, t) = g.var(&s);
    let e = g.b.closed_expr(g.r, &t, RowProps::ANY);
    let (p, _) = g.pred(&s);
    let c = s.sample(&x, &e).expect("closed sample");
    draft(vec![], vec![], outcome(&s, &p_subst(&p, &x, &e), &c, &p))
}

fn out_unroll<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.guard(&s, RowProps::ANY);
    let c = g.small_prog(&s);
    let w = s.while_do(&b, &c);
    let once = s.ifelse(&b, &s.seq(&c, &w), &s.skip());
    let (q, qv) = g.pred(&s);
    let pv = g.below(&weakest(&g.k(&s, &once), &qv));
    let p = g.pred_of(&s, &pv);
    draft(vec![], vec![outcome(&s, &p, &once, &q)], outcome(&s, &p, &w, &q))
}

fn out_choice<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.guard(&s, RowProps::TOTAL);
    let (c1, c2) = (g.prog(&s), g.prog(&s));
    let (q, qv) = g.pred(&s);
    let pv = sem::meet(&weakest(&g.k(&s, &c1), &qv), &weakest(&g.k(&s, &c2), &qv));
    let pv = g.below(&pv);
    let p = g.pred_of(&s, &pv);
    draft(
        vec![side_guard(SideKind::Total, &s, &b)],
        vec![outcome(&s, &p, &c1, &q), outcome(&s, &p, &c2, &q)],
        outcome(&s, &p, &s.ifelse(&b, &c1, &c2), &q),
    )
}

fn out_ifelse<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.guard(&s, RowProps::FUNCTION);
    let (c1, c2) = (g.prog(&s), g.prog(&s));
    let (q, qv) = g.pred(&s);
    let (w1, w2) = (weakest(&g.k(&s, &c1), &qv), weakest(&g.k(&s, &c2), &qv));
    let bv = g.gv(&s, &b);
    let target: Vec<_> = (0..bv.len()).map(|i| if nz(&bv[i]) { w1[i].clone() } else { w2[i].clone() }).collect();
    let pv = g.below(&target);
    let p = g.pred_of(&s, &pv);
    draft(
        function_sides(&s, &b),
        vec![
            outcome(&s, &p_and(&lift_guard(&b), &p), &c1, &q),
            outcome(&s, &p_and(&lift_guard(&not(&b)), &p), &c2, &q),
        ],
        outcome(&s, &p, &s.ifelse(&b, &c1, &c2), &q),
    )
}

fn out_assert<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.guard(&s, RowProps::DET);
    let (p, _) = g.pred(&s);
    let nv = g.gv(&s, &not(&b));
    let mut qv = g.b.random_pred_vals(g.r, &s);
    kill(&mut qv, &nv.iter().map(nz).collect::<Vec<_>>());
    let q = g.pred_of(&s, &qv);
    draft(
        vec![side_guard(SideKind::Deterministic, &s, &b)],
        vec![pred_eq(&s.ctx, &p_and(&lift_guard(&not(&b)), &q), &p_bot())],
        outcome(&s, &p_cond(&p, &b, &q), &s.assert(&lift_guard(&b)), &p),
    )
}

fn out_convex<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.b.random_constant_guard(g.r, RowProps::ANY);
    let c = g.prog(&s);
    let k = g.k(&s, &c);
    let (q1, q1v) = g.pred(&s);
    let (q2, q2v) = g.pred(&s);
    let p1v = g.below(&weakest(&k, &q1v));
    let p2v = g.below(&weakest(&k, &q2v));
    let (p1, p2) = (g.pred_of(&s, &p1v), g.pred_of(&s, &p2v));
    draft(
        vec![side_guard(SideKind::Constant, &s, &b)],
        vec![outcome(&s, &p1, &c, &q1), outcome(&s, &p2, &c, &q2)],
        outcome(&s, &p_cond(&p1, &b, &p2), &c, &p_cond(&q1, &b, &q2)),
    )
}

fn out_monotone<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let c = g.prog(&s);
    let (q2, q2v) = g.pred(&s);
    let p2v = g.below(&weakest(&g.k(&s, &c), &q2v));
    let p1v = g.below(&p2v);
    let q1v = g.above(&q2v);
    let (p2, p1, q1) = (g.pred_of(&s, &p2v), g.pred_of(&s, &p1v), g.pred_of(&s, &q1v));
    draft(
        vec![],
        vec![pred_leq(&s.ctx, &p1, &p2), outcome(&s, &p2, &c, &q2), pred_leq(&s.ctx, &q2, &q1)],
        outcome(&s, &p1, &c, &q1),
    )
}

fn out_bot<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let c = g.prog(&s);
    let (q, _) = g.pred(&s);
    draft(vec![], vec![], outcome(&s, &p_bot(), &c, &q))
}

// relational Hoare logic (rel-assert-correct triples)

fn rh_skip<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, _) = g.rel_spaces();
    let j = joint(&l, &r);
    let (p, _) = g.pred(&j);
    draft(vec![], vec![], rh(&l, &r, &p, &l.skip(), &r.skip(), &p))
}

fn rh_assign<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, _) = g.rel_spaces();
    let j = joint(&l, &r);
    let (x, tx) = g.var(&l);
    let (y, ty) = g.var(&r);
    let e1 = g.expr(&l, &tx, RowProps::FUNCTION);
    let e2 = g.expr(&r, &ty, RowProps::FUNCTION);
    let (p, _) = g.pred(&j);
    let pre = p_subst(&p_subst(&p, &x, &e1), &y, &e2);
    draft(
        vec![
            side_expr(SideKind::Total, &l, &e1),
            side_expr(SideKind::Deterministic, &l, &e1),
            side_expr(SideKind::Total, &r, &e2),
            side_expr(SideKind::Deterministic, &r, &e2),
        ],
        vec![],
        rh(&l, &r, &pre, &l.assign(&x, &e1).expect("typed"), &r.assign(&y, &e2).expect("typed"), &p),
    )
}

fn rh_comp<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, m) = g.rel_spaces();
    let j = joint(&l, &r);
    let (c1, d1) = g.prog_pair(&l, &r, m);
    let (c2, d2) = g.prog_pair(&l, &r, m);
    let (p, pv) = g.pred(&j);
    let qv = g.above(&post_min(&pv, &g.hk(&l, &r, &c1, &d1)));
    let sv = g.above(&post_min(&qv, &g.hk(&l, &r, &c2, &d2)));
    let (q, s) = (g.pred_of(&j, &qv), g.pred_of(&j, &sv));
    draft(
        vec![],
        vec![rh(&l, &r, &p, &c1, &d1, &q), rh(&l, &r, &q, &c2, &d2, &s)],
        rh(&l, &r, &p, &l.seq(&c1, &c2), &r.seq(&d1, &d2), &s),
    )
}

fn rh_choice<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, m) = g.rel_spaces();
    let j = joint(&l, &r);
    let (b1, b2) = g.guard_pair(&l, &r, m, RowProps::TOTAL);
    let (c1, c2) = g.prog_pair(&l, &r, m);
    let (d1, d2) = g.prog_pair(&l, &r, m);
    let (p, pv) = g.pred(&j);
    let pairs = [(&c1, &c2), (&c1, &d2), (&d1, &c2), (&d1, &d2)];
    let mut qv = vec![W::<B>::zero(); pv.len()];
    for (c, d) in pairs {
        qv = join(&qv, &post_min(&pv, &g.hk(&l, &r, c, d)));
    }
    let qv = g.above(&qv);
    let q = g.pred_of(&j, &qv);
    draft(
        vec![side_guard(SideKind::Total, &l, &b1), side_guard(SideKind::Total, &r, &b2)],
        pairs.iter().map(|(c, d)| rh(&l, &r, &p, c, d, &q)).collect(),
        rh(&l, &r, &p, &l.ifelse(&b1, &c1, &d1), &r.ifelse(&b2, &c2, &d2), &q),
    )
}

fn rh_ifelse<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, m) = g.rel_spaces();
    let j = joint(&l, &r);
    let (b1, b2) = g.guard_pair(&l, &r, m, RowProps::FUNCTION);
    let (c1, c2) = g.prog_pair(&l, &r, m);
    let (d1, d2) = g.prog_pair(&l, &r, m);
    let (p, pv) = g.pred(&j);
    let (bb, nn) = (both(&b1, &b2), both(&not(&b1), &not(&b2)));
    let (bv, nv) = (g.pv(&j, &bb), g.pv(&j, &nn));
    let qv = join(
        &post_min(&mul(&bv, &pv), &g.hk(&l, &r, &c1, &c2)),
        &post_min(&mul(&nv, &pv), &g.hk(&l, &r, &d1, &d2)),
    );
    let qv = g.above(&qv);
    let q = g.pred_of(&j, &qv);
    let mut side = function_sides(&l, &b1);
    side.extend(function_sides(&r, &b2));
    draft(
        side,
        vec![rh(&l, &r, &p_and(&bb, &p), &c1, &c2, &q), rh(&l, &r, &p_and(&nn, &p), &d1, &d2, &q)],
        rh(&l, &r, &p_and(&agree(&b1, &b2), &p), &l.ifelse(&b1, &c1, &d1), &r.ifelse(&b2, &c2, &d2), &q),
    )
}

fn rh_loop<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, m) = g.rel_spaces();
    let j = joint(&l, &r);
    let (b1, b2) = g.guard_pair(&l, &r, m, RowProps::TOTAL);
    let (c1, c2) = g.prog_pair(&l, &r, m);
    let ks = [
        g.hk(&l, &r, &c1, &c2),
        g.hk(&l, &r, &c1, &r.skip()),
        g.hk(&l, &r, &l.skip(), &c2),
    ];
    let pv = g.b.random_pred_vals(g.r, &j);
    let pv = close_post(pv, &[&ks[0], &ks[1], &ks[2]]);
    let p = g.pred_of(&j, &pv);
    draft(
        vec![side_guard(SideKind::Total, &l, &b1), side_guard(SideKind::Total, &r, &b2)],
        vec![
            rh(&l, &r, &p, &c1, &c2, &p),
            rh(&l, &r, &p, &c1, &r.skip(), &p),
            rh(&l, &r, &p, &l.skip(), &c2, &p),
        ],
        rh(&l, &r, &p, &l.while_do(&b1, &c1), &r.while_do(&b2, &c2), &p),
    )
}

fn rh_while<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, m) = g.rel_spaces();
    let j = joint(&l, &r);
    let (b1, b2) = g.guard_pair(&l, &r, m, RowProps::FUNCTION);
    let (c1, c2) = g.prog_pair(&l, &r, m);
    let (bb, ee) = (both(&b1, &b2), agree(&b1, &b2));
    let (bv, ev) = (g.pv(&j, &bb), g.pv(&j, &ee));
    let h = g.hk(&l, &r, &c1, &c2);
    let mut pv = g.b.random_pred_vals(g.r, &j);
    // grow p along the guarded body, dropping sources that leave the agreement region
    for _ in 0..32 {
        let src = mul(&bv, &pv);
        let q = post_min(&src, &h);
        let bad: Vec<usize> = (0..q.len()).filter(|&y| nz(&q[y]) && !nz(&ev[y])).collect();
        if bad.is_empty() {
            let n = join(&pv, &q);
            if n == pv {
                break;
            }
            pv = n;
        } else {
            for x in 0..pv.len() {
                if nz(&src[x]) && h.row(x).iter().any(|(y, _)| bad.contains(y)) {
                    pv[x] = W::<B>::zero();
                }
            }
        }
    }
    let p = g.pred_of(&j, &pv);
    let mut side = function_sides(&l, &b1);
    side.extend(function_sides(&r, &b2));
    draft(
        side,
        vec![rh(&l, &r, &p_and(&bb, &p), &c1, &c2, &p_and(&ee, &p))],
        rh(
            &l,
            &r,
            &p_and(&ee, &p),
            &l.while_do(&b1, &c1),
            &r.while_do(&b2, &c2),
            &p_and(&both(&not(&b1), &not(&b2)), &p),
        ),
    )
}

fn rh_monotone<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, m) = g.rel_spaces();
    let j = joint(&l, &r);
    let (c, d) = g.prog_pair(&l, &r, m);
    let (p2, p2v) = g.pred(&j);
    let q2v = g.above(&post_min(&p2v, &g.hk(&l, &r, &c, &d)));
    let p1v = g.below(&p2v);
    let q1v = g.above(&q2v);
    let (q2, p1, q1) = (g.pred_of(&j, &q2v), g.pred_of(&j, &p1v), g.pred_of(&j, &q1v));
    draft(
        vec![],
        vec![pred_leq(&j.ctx, &p1, &p2), rh(&l, &r, &p2, &c, &d, &q2), pred_leq(&j.ctx, &q2, &q1)],
        rh(&l, &r, &p1, &c, &d, &q1),
    )
}

fn rh_symm<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, m) = g.rel_spaces();
    let j = joint(&l, &r);
    let (c, d) = g.prog_pair(&l, &r, m);
    let (p, pv) = g.pred(&j);
    let qv = g.above(&post_min(&pv, &g.hk(&l, &r, &c, &d)));
    let q = g.pred_of(&j, &qv);
    draft(vec![], vec![rh(&l, &r, &p, &c, &d, &q)], rh(&r, &l, &p, &d, &c, &q))
}

fn rh_assign_l<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, _) = g.rel_spaces();
    let j = joint(&l, &r);
    let (x, t) = g.var(&l);
    let e = g.expr(&l, &t, RowProps::FUNCTION);
    let (p, _) = g.pred(&j);
    draft(
        vec![side_expr(SideKind::Total, &l, &e), side_expr(SideKind::Deterministic, &l, &e)],
        vec![],
        rh(&l, &r, &p_subst(&p, &x, &e), &l.assign(&x, &e).expect("typed"), &r.skip(), &p),
    )
}

fn rh_choice_l<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, _) = g.rel_spaces();
    let j = joint(&l, &r);
    let b = g.guard(&l, RowProps::TOTAL);
    let (c, d) = (g.small_prog(&l), g.small_prog(&l));
    let (p, pv) = g.pred(&j);
    let qv = join(&post_min(&pv, &g.hk(&l, &r, &c, &r.skip())), &post_min(&pv, &g.hk(&l, &r, &d, &r.skip())));
    let qv = g.above(&qv);
    let q = g.pred_of(&j, &qv);
    draft(
        vec![side_guard(SideKind::Total, &l, &b)],
        vec![rh(&l, &r, &p, &c, &r.skip(), &q), rh(&l, &r, &p, &d, &r.skip(), &q)],
        rh(&l, &r, &p, &l.ifelse(&b, &c, &d), &r.skip(), &q),
    )
}

fn rh_ifelse_l<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, _) = g.rel_spaces();
    let j = joint(&l, &r);
    let b = g.guard(&l, RowProps::FUNCTION);
    let (c, d) = (g.small_prog(&l), g.small_prog(&l));
    let (p, pv) = g.pred(&j);
    let (bp, np) = (lift_guard(&b), lift_guard(&not(&b)));
    let (bv, nv) = (g.pv(&j, &bp), g.pv(&j, &np));
    let qv = join(
        &post_min(&mul(&bv, &pv), &g.hk(&l, &r, &c, &r.skip())),
        &post_min(&mul(&nv, &pv), &g.hk(&l, &r, &d, &r.skip())),
    );
    let qv = g.above(&qv);
    let q = g.pred_of(&j, &qv);
    draft(
        function_sides(&l, &b),
        vec![rh(&l, &r, &p_and(&bp, &p), &c, &r.skip(), &q), rh(&l, &r, &p_and(&np, &p), &d, &r.skip(), &q)],
        rh(&l, &r, &p, &l.ifelse(&b, &c, &d), &r.skip(), &q),
    )
}

fn rh_loop_l<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, _) = g.rel_spaces();
    let j = joint(&l, &r);
    let b = g.guard(&l, RowProps::TOTAL);
    let c = g.small_prog(&l);
    let pv = g.b.random_pred_vals(g.r, &j);
    let pv = close_post(pv, &[&g.hk(&l, &r, &c, &r.skip())]);
    let p = g.pred_of(&j, &pv);
    draft(
        vec![side_guard(SideKind::Total, &l, &b)],
        vec![rh(&l, &r, &p, &c, &r.skip(), &p)],
        rh(&l, &r, &p, &l.while_do(&b, &c), &r.skip(), &p),
    )
}

fn rh_while_l<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, _) = g.rel_spaces();
    let j = joint(&l, &r);
    let b = g.guard(&l, RowProps::FUNCTION);
    let c = g.small_prog(&l);
    let bp = lift_guard(&b);
    let bv = g.pv(&j, &bp);
    let h = g.hk(&l, &r, &c, &r.skip());
    let mut pv = g.b.random_pred_vals(g.r, &j);
    loop {
        let n = join(&pv, &post_min(&mul(&bv, &pv), &h));
        if n == pv {
            break;
        }
        pv = n;
    }
    let p = g.pred_of(&j, &pv);
    draft(
        function_sides(&l, &b),
        vec![rh(&l, &r, &p_and(&bp, &p), &c, &r.skip(), &p)],
        rh(&l, &r, &p, &l.while_do(&b, &c), &r.skip(), &p_and(&lift_guard(&not(&b)), &p)),
    )
}

// relational incorrectness (rel-pred-incorrect triples)

fn ri_skip<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, _) = g.rel_spaces();
    let j = joint(&l, &r);
    let (p, _) = g.pred(&j);
    draft(vec![], vec![], ri(&l, &r, &p, &l.skip(), &r.skip(), &p))
}

fn ri_assign<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, _) = g.rel_spaces();
    let j = joint(&l, &r);
    let (u1, v1) = g.var_pair(&l);
    let (u2, v2) = g.var_pair(&r);
    let (p, _) = g.pred(&j);
    let ty = |s: &StateSpace, v: &Name| s.ctx.lookup(v).map(|(_, t)| t.clone()).expect("declared");
    let pre = p_subst(&p_subst(&p, &u1, &Expr::var(v1.clone(), ty(&l, &v1))), &u2, &Expr::var(v2.clone(), ty(&r, &v2)));
    draft(
        vec![],
        vec![],
        ri(
            &l,
            &r,
            &pre,
            &l.var_assign(&[u1], &[v1]).expect("same types"),
            &r.var_assign(&[u2], &[v2]).expect("same types"),
            &p,
        ),
    )
}

fn ri_choice<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, m) = g.rel_spaces();
    let j = joint(&l, &r);
    let (b1, b2) = g.guard_pair(&l, &r, m, RowProps::TOTAL);
    let (c1, c2) = g.prog_pair(&l, &r, m);
    let (d1, d2) = g.prog_pair(&l, &r, m);
    let (q, qv) = g.pred(&j);
    let pairs = [(&c1, &c2), (&c1, &d2), (&d1, &c2), (&d1, &d2)];
    let mut pv = vec![W::<B>::zero(); qv.len()];
    for (c, d) in pairs {
        pv = join(&pv, &weakest(&g.hk(&l, &r, c, d), &qv));
    }
    let pv = g.above(&pv);
    let p = g.pred_of(&j, &pv);
    draft(
        vec![side_guard(SideKind::Total, &l, &b1), side_guard(SideKind::Total, &r, &b2)],
        pairs.iter().map(|(c, d)| ri(&l, &r, &p, c, d, &q)).collect(),
        ri(&l, &r, &p, &l.ifelse(&b1, &c1, &d1), &r.ifelse(&b2, &c2, &d2), &q),
    )
}

/// Post values that vanish on everything `k` reaches from rows outside `rows`,
/// so that a guarded premise can hold there.
fn guarded_post<X: Weight>(q: &mut [X], k: &Kernel<X>, mask: &[X]) {
    let dead = reached(k, |x| !nz(&mask[x]));
    kill(q, &dead);
}

fn ri_ifelse<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, m) = g.rel_spaces();
    let j = joint(&l, &r);
    let (b1, b2) = g.guard_pair(&l, &r, m, RowProps::FUNCTION);
    let (c1, c2) = g.prog_pair(&l, &r, m);
    let (d1, d2) = g.prog_pair(&l, &r, m);
    let (bb, nn) = (both(&b1, &b2), both(&not(&b1), &not(&b2)));
    let (bv, nv) = (g.pv(&j, &bb), g.pv(&j, &nn));
    let (h1, h2) = (g.hk(&l, &r, &c1, &c2), g.hk(&l, &r, &d1, &d2));
    let mut qv = g.b.random_pred_vals(g.r, &j);
    guarded_post(&mut qv, &h1, &bv);
    guarded_post(&mut qv, &h2, &nv);
    let (w1, w2) = (weakest(&h1, &qv), weakest(&h2, &qv));
    let pv = g.above(&join(&mul(&bv, &w1), &mul(&nv, &w2)));
    let (p, q) = (g.pred_of(&j, &pv), g.pred_of(&j, &qv));
    let mut side = function_sides(&l, &b1);
    side.extend(function_sides(&r, &b2));
    draft(
        side,
        vec![ri(&l, &r, &p_and(&bb, &p), &c1, &c2, &q), ri(&l, &r, &p_and(&nn, &p), &d1, &d2, &q)],
        ri(&l, &r, &p_and(&agree(&b1, &b2), &p), &l.ifelse(&b1, &c1, &d1), &r.ifelse(&b2, &c2, &d2), &q),
    )
}

fn ri_loop<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, m) = g.rel_spaces();
    let j = joint(&l, &r);
    let (b1, b2) = g.guard_pair(&l, &r, m, RowProps::TOTAL);
    let (c1, c2) = g.prog_pair(&l, &r, m);
    let ks = [
        g.hk(&l, &r, &c1, &c2),
        g.hk(&l, &r, &c1, &r.skip()),
        g.hk(&l, &r, &l.skip(), &c2),
    ];
    let pv = g.b.random_pred_vals(g.r, &j);
    let pv = close_pre(pv, &[&ks[0], &ks[1], &ks[2]]);
    let p = g.pred_of(&j, &pv);
    draft(
        vec![side_guard(SideKind::Total, &l, &b1), side_guard(SideKind::Total, &r, &b2)],
        vec![
            ri(&l, &r, &p, &c1, &c2, &p),
            ri(&l, &r, &p, &c1, &r.skip(), &p),
            ri(&l, &r, &p, &l.skip(), &c2, &p),
        ],
        ri(&l, &r, &p, &l.while_do(&b1, &c1), &r.while_do(&b2, &c2), &p),
    )
}

/// Grows `p` so that `mask·p ≥ k ; (post·p)`, clearing `post·p` on whatever
/// unmasked rows reach.
fn guarded_pre<X: Weight>(mut p: Vec<X>, k: &Kernel<X>, mask: &[X], post: &[X]) -> Vec<X> {
    let dead = reached(k, |x| !nz(&mask[x]));
    for _ in 0..32 {
        for (y, d) in dead.iter().enumerate() {
            if *d && nz(&post[y]) {
                p[y] = X::zero();
            }
        }
        let w = weakest(k, &mul(post, &p));
        let mut n = p.clone();
        for x in 0..n.len() {
            if nz(&mask[x]) {
                n[x] = super::ops::wmax(&n[x], &w[x]);
            }
        }
        if n == p {
            break;
        }
        p = n;
    }
    p
}

fn ri_while<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, m) = g.rel_spaces();
    let j = joint(&l, &r);
    let (b1, b2) = g.guard_pair(&l, &r, m, RowProps::FUNCTION);
    let (c1, c2) = g.prog_pair(&l, &r, m);
    let (bb, ee) = (both(&b1, &b2), agree(&b1, &b2));
    let (bv, ev) = (g.pv(&j, &bb), g.pv(&j, &ee));
    let h = g.hk(&l, &r, &c1, &c2);
    let pv = g.b.random_pred_vals(g.r, &j);
    let pv = guarded_pre(pv, &h, &bv, &ev);
    let p = g.pred_of(&j, &pv);
    let mut side = function_sides(&l, &b1);
    side.extend(function_sides(&r, &b2));
    draft(
        side,
        vec![ri(&l, &r, &p_and(&bb, &p), &c1, &c2, &p_and(&ee, &p))],
        ri(
            &l,
            &r,
            &p_and(&ee, &p),
            &l.while_do(&b1, &c1),
            &r.while_do(&b2, &c2),
            &p_and(&both(&not(&b1), &not(&b2)), &p),
        ),
    )
}

fn ri_monotone<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, m) = g.rel_spaces();
    let j = joint(&l, &r);
    let (c, d) = g.prog_pair(&l, &r, m);
    let (q2, q2v) = g.pred(&j);
    let p2v = g.above(&weakest(&g.hk(&l, &r, &c, &d), &q2v));
    let p1v = g.above(&p2v);
    let q1v = g.below(&q2v);
    let (p2, p1, q1) = (g.pred_of(&j, &p2v), g.pred_of(&j, &p1v), g.pred_of(&j, &q1v));
    draft(
        vec![],
        vec![pred_leq(&j.ctx, &p2, &p1), ri(&l, &r, &p2, &c, &d, &q2), pred_leq(&j.ctx, &q1, &q2)],
        ri(&l, &r, &p1, &c, &d, &q1),
    )
}

fn ri_symm<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, m) = g.rel_spaces();
    let j = joint(&l, &r);
    let (c, d) = g.prog_pair(&l, &r, m);
    let (q, qv) = g.pred(&j);
    let pv = g.above(&weakest(&g.hk(&l, &r, &c, &d), &qv));
    let p = g.pred_of(&j, &pv);
    draft(vec![], vec![ri(&l, &r, &p, &c, &d, &q)], ri(&r, &l, &p, &d, &c, &q))
}

fn ri_choice_l<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, _) = g.rel_spaces();
    let j = joint(&l, &r);
    let b = g.guard(&l, RowProps::TOTAL);
    let (c, d) = (g.small_prog(&l), g.small_prog(&l));
    let (q, qv) = g.pred(&j);
    let pv = join(&weakest(&g.hk(&l, &r, &c, &r.skip()), &qv), &weakest(&g.hk(&l, &r, &d, &r.skip()), &qv));
    let pv = g.above(&pv);
    let p = g.pred_of(&j, &pv);
    draft(
        vec![side_guard(SideKind::Total, &l, &b)],
        vec![ri(&l, &r, &p, &c, &r.skip(), &q), ri(&l, &r, &p, &d, &r.skip(), &q)],
        ri(&l, &r, &p, &l.ifelse(&b, &c, &d), &r.skip(), &q),
    )
}

fn ri_assign_l<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, _) = g.rel_spaces();
    let j = joint(&l, &r);
    let (u, v) = g.var_pair(&l);
    let t = l.ctx.lookup(&v).map(|(_, t)| t.clone()).expect("declared");
    let (p, _) = g.pred(&j);
    draft(
        vec![],
        vec![],
        ri(&l, &r, &p_subst(&p, &u, &Expr::var(v.clone(), t)), &l.var_assign(&[u], &[v]).expect("same types"), &r.skip(), &p),
    )
}

fn ri_sample_l<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, _) = g.rel_spaces();
    let j = joint(&l, &r);
    let (u, t) = g.var(&l);
    let e = g.b.closed_expr(g.r, &t, RowProps::FUNCTION);
    let (p, _) = g.pred(&j);
    draft(
        vec![side_expr(SideKind::Total, &l, &e), side_expr(SideKind::Deterministic, &l, &e)],
        vec![],
        ri(&l, &r, &p_subst(&p, &u, &e), &l.sample(&u, &e).expect("closed sample"), &r.skip(), &p),
    )
}

fn ri_ifelse_l<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, _) = g.rel_spaces();
    let j = joint(&l, &r);
    let b = g.guard(&l, RowProps::FUNCTION);
    let (c, d) = (g.small_prog(&l), g.small_prog(&l));
    let (bp, np) = (lift_guard(&b), lift_guard(&not(&b)));
    let (bv, nv) = (g.pv(&j, &bp), g.pv(&j, &np));
    let (h1, h2) = (g.hk(&l, &r, &c, &r.skip()), g.hk(&l, &r, &d, &r.skip()));
    let mut qv = g.b.random_pred_vals(g.r, &j);
    guarded_post(&mut qv, &h1, &bv);
    guarded_post(&mut qv, &h2, &nv);
    let pv = g.above(&join(&mul(&bv, &weakest(&h1, &qv)), &mul(&nv, &weakest(&h2, &qv))));
    let (p, q) = (g.pred_of(&j, &pv), g.pred_of(&j, &qv));
    draft(
        function_sides(&l, &b),
        vec![ri(&l, &r, &p_and(&bp, &p), &c, &r.skip(), &q), ri(&l, &r, &p_and(&np, &p), &d, &r.skip(), &q)],
        ri(&l, &r, &p, &l.ifelse(&b, &c, &d), &r.skip(), &q),
    )
}

fn ri_loop_l<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, _) = g.rel_spaces();
    let j = joint(&l, &r);
    let b = g.guard(&l, RowProps::TOTAL);
    let c = g.small_prog(&l);
    let pv = g.b.random_pred_vals(g.r, &j);
    let pv = close_pre(pv, &[&g.hk(&l, &r, &c, &r.skip())]);
    let p = g.pred_of(&j, &pv);
    draft(
        vec![side_guard(SideKind::Total, &l, &b)],
        vec![ri(&l, &r, &p, &c, &r.skip(), &p)],
        ri(&l, &r, &p, &l.while_do(&b, &c), &r.skip(), &p),
    )
}

fn ri_while_l<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (l, r, _) = g.rel_spaces();
    let j = joint(&l, &r);
    let b = g.guard(&l, RowProps::FUNCTION);
    let c = g.small_prog(&l);
    let bp = lift_guard(&b);
    let bv = g.pv(&j, &bp);
    let h = g.hk(&l, &r, &c, &r.skip());
    let ones = vec![W::<B>::one(); bv.len()];
    let pv = g.b.random_pred_vals(g.r, &j);
    let pv = guarded_pre(pv, &h, &bv, &ones);
    let p = g.pred_of(&j, &pv);
    draft(
        function_sides(&l, &b),
        vec![ri(&l, &r, &p_and(&bp, &p), &c, &r.skip(), &p)],
        ri(&l, &r, &p, &l.while_do(&b, &c), &r.skip(), &p_and(&lift_guard(&not(&b)), &p)),
    )
}

// loop lemmas as (in)equations between commands

fn lemma_uniform_loop<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let n = g.b.space_size(&s);
    let (lc, perm) = g.b.permutation(g.r, &s);
    let mut inv = vec![0; n];
    for (x, &y) in perm.iter().enumerate() {
        inv[y] = x;
    }
    let b1 = g.guard(&s, RowProps::ANY);
    let (c1, c2) = (g.small_prog(&s), g.small_prog(&s));
    let m: Morphism<B> = eval(&s.seq(&lc, &Command(branch_cmds(&b1, &c1, &c2))).0, &s.ctx, &exits2(&s), &g.b.model)
        .expect("generated commands evaluate");
    let (mut gk, mut dk1, mut dk2) = (vec![], vec![], vec![]);
    for x in 0..n {
        let (gr, f, sc) = B::split(m.kernel.row(x), n);
        let d1: Vec<_> = f.into_iter().map(|(w, v)| (inv[w], v)).collect();
        let up = g.r.gen_bool(0.5);
        gk.push(if up { B::above(g.r, &gr, 2) } else { gr });
        dk1.push(if up { B::above(g.r, &d1, n) } else { d1 });
        dk2.push(if up { B::above(g.r, &sc, n) } else { sc });
    }
    let b2 = g.b.guard_from(&s, Kernel::from_rows(gk, 2));
    let d1 = g.b.cmd_from(&s, Kernel::from_rows(dk1, n));
    let d2 = g.b.cmd_from(&s, Kernel::from_rows(dk2, n));
    draft(
        vec![],
        vec![branches_cmp(
            &s,
            s.seq(&lc, &Command(branch_cmds(&b1, &c1, &c2))).0,
            branch_cmds(&b2, &s.seq(&d1, &lc), &d2),
            false,
        )],
        cmds_cmp(
            &s,
            s.seq(&lc, &s.seq(&s.while_do(&b1, &c1), &c2)).0,
            s.seq(&s.while_do(&b2, &d1), &d2).0,
            false,
        ),
    )
}

fn lemma_det_guard_branch<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.guard(&s, RowProps::DET);
    draft(
        vec![side_guard(SideKind::Deterministic, &s, &b)],
        vec![],
        branches_cmp(
            &s,
            branch_cmds(&b, &s.skip(), &s.skip()),
            branch_cmds(&b, &s.assert(&lift_guard(&b)), &s.assert(&lift_guard(&not(&b)))),
            true,
        ),
    )
}

fn lemma_det_guard_ifelse<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.guard(&s, RowProps::DET);
    let (c1, c2) = (g.prog(&s), g.prog(&s));
    let guarded = s.ifelse(
        &b,
        &s.seq(&s.assert(&lift_guard(&b)), &c1),
        &s.seq(&s.assert(&lift_guard(&not(&b))), &c2),
    );
    draft(
        vec![side_guard(SideKind::Deterministic, &s, &b)],
        vec![],
        cmds_cmp(&s, s.ifelse(&b, &c1, &c2).0, guarded.0, true),
    )
}

fn lemma_total_guard_skip<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.guard(&s, RowProps::TOTAL);
    draft(
        vec![side_guard(SideKind::Total, &s, &b)],
        vec![],
        cmds_cmp(&s, s.ifelse(&b, &s.skip(), &s.skip()).0, s.skip().0, true),
    )
}

fn lemma_assert_guard<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.guard(&s, RowProps::ANY);
    let (p, _) = g.pred(&s);
    let a = s.assert(&p);
    draft(
        vec![],
        vec![],
        branches_cmp(
            &s,
            s.seq(&a, &Command(branch_cmds(&b, &s.skip(), &s.skip()))).0,
            branch_cmds(&b, &a, &a),
            true,
        ),
    )
}

fn lemma_constant_guard<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.b.random_constant_guard(g.r, RowProps::ANY);
    let f = g.prog(&s);
    draft(
        vec![side_guard(SideKind::Constant, &s, &b)],
        vec![],
        branches_cmp(
            &s,
            s.seq(&f, &Command(branch_cmds(&b, &s.skip(), &s.skip()))).0,
            branch_cmds(&b, &f, &f),
            true,
        ),
    )
}

macro_rules! catalogue {
    ($($id:literal => $f:ident),* $(,)?) => {
        /// Every rule with a generator.
        pub fn catalogue<B: Couple>() -> Vec<Rule<B>> {
            vec![$(Rule { id: $id, make: $f::<B> }),*]
        }

        pub const RULE_IDS: &[&str] = &[$($id),*];
    };
}

catalogue! {
    "hoare.skip" => hoare_skip,
    "hoare.comp" => hoare_comp,
    "hoare.assign" => hoare_assign,
    "hoare.choice" => hoare_choice,
    "hoare.loop" => hoare_loop,
    "hoare.unroll" => hoare_unroll,
    "hoare.ifelse" => hoare_ifelse,
    "hoare.while" => hoare_while,
    "hoare.monotone" => hoare_monotone,
    "hoare.and" => hoare_and,
    "hoare.fail" => hoare_fail,
    "hoare.assert" => hoare_assert,
    "hoare.top" => hoare_top,
    "hoare.bot" => hoare_bot,
    "incorrectness.skip" => inc_skip,
    "incorrectness.comp" => inc_comp,
    "incorrectness.comp-error" => inc_comp_error,
    "incorrectness.assign" => inc_assign,
    "incorrectness.sample" => inc_sample,
    "incorrectness.choice-l" => inc_choice_l,
    "incorrectness.choice-r" => inc_choice_r,
    "incorrectness.convex" => inc_convex,
    "incorrectness.iter-zero" => inc_iter_zero,
    "incorrectness.iter" => inc_iter,
    "incorrectness.monotone" => inc_monotone,
    "incorrectness.assert" => inc_assert,
    "incorrectness.fail" => inc_fail,
    "incorrectness.bot" => inc_bot,
    "outcome.skip" => out_skip,
    "outcome.comp" => out_comp,
    "outcome.assign" => out_assign,
    "outcome.sample" => out_sample,
    "outcome.unroll" => out_unroll,
    "outcome.choice" => out_choice,
    "outcome.ifelse" => out_ifelse,
    "outcome.assert" => out_assert,
    "outcome.convex" => out_convex,
    "outcome.monotone" => out_monotone,
    "outcome.bot" => out_bot,
    "rel-hoare.skip" => rh_skip,
    "rel-hoare.assign" => rh_assign,
    "rel-hoare.comp" => rh_comp,
    "rel-hoare.choice" => rh_choice,
    "rel-hoare.ifelse" => rh_ifelse,
    "rel-hoare.loop" => rh_loop,
    "rel-hoare.while" => rh_while,
    "rel-hoare.monotone" => rh_monotone,
    "rel-hoare.symm" => rh_symm,
    "rel-hoare.assign-l" => rh_assign_l,
    "rel-hoare.choice-l" => rh_choice_l,
    "rel-hoare.ifelse-l" => rh_ifelse_l,
    "rel-hoare.loop-l" => rh_loop_l,
    "rel-hoare.while-l" => rh_while_l,
    "rel-incorrectness.skip" => ri_skip,
    "rel-incorrectness.assign" => ri_assign,
    "rel-incorrectness.choice" => ri_choice,
    "rel-incorrectness.ifelse" => ri_ifelse,
    "rel-incorrectness.loop" => ri_loop,
    "rel-incorrectness.while" => ri_while,
    "rel-incorrectness.monotone" => ri_monotone,
    "rel-incorrectness.symm" => ri_symm,
    "rel-incorrectness.choice-l" => ri_choice_l,
    "rel-incorrectness.assign-l" => ri_assign_l,
    "rel-incorrectness.sample-l" => ri_sample_l,
    "rel-incorrectness.ifelse-l" => ri_ifelse_l,
    "rel-incorrectness.loop-l" => ri_loop_l,
    "rel-incorrectness.while-l" => ri_while_l,
    "loop.uniformity" => lemma_uniform_loop,
    "guard.det-branch" => lemma_det_guard_branch,
    "guard.det-ifelse" => lemma_det_guard_ifelse,
    "guard.total-skip" => lemma_total_guard_skip,
    "guard.assert-commutes" => lemma_assert_guard,
    "guard.constant-commutes" => lemma_constant_guard,
    "example.while-invariant" => example_while_invariant,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Par, Rel, Stoch};
    use num_rational::BigRational;
    use rand::SeedableRng;

    fn all_generate<B: Couple>() {
        let mut r = Rg::seed_from_u64(11);
        for rule in catalogue::<B>() {
            for _ in 0..3 {
                let mut b = Builder::<B>::new(&mut r, 3);
                let d = rule.draft(&mut b, &mut r);
                let o = check_draft::<B>(&d, &b.model);
                assert!(o.is_ok(), "{} on {}: {:?}", rule.id, B::ID, o.err());
                assert!(!matches!(o.unwrap(), Outcome::SideViolated(_)), "{}", rule.id);
            }
        }
    }

    #[test]
    fn every_rule_generates_checkable_instances() {
        all_generate::<Rel>();
        all_generate::<Par>();
        all_generate::<Stoch<BigRational>>();
    }
}

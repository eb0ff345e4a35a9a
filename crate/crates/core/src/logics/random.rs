//! Random models and random terms over them. Every random guard, predicate,
//! command, state or expression is a fresh generator whose table is drawn
//! (or computed) for the backend under test.

use std::marker::PhantomData;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::backends::{Kernel, Morphism};
use crate::combinators::{guard_gen, Command, Expr, Guard, Predicate, State, StateSpace, ETA, V};
use crate::kernel::{gen, ret, BasicType, Branch, Context, GeneratorDecl, Index, Name, Term};
use crate::models::Model;

use super::ops::{Logic, Row, RowProps};
use super::sem::{cmd_m, guard_m, pred_m, state_m};

/// Carrier names used by random models.
pub const TYPES: [&str; 3] = ["A", "B", "C"];

pub struct Builder<B: Logic> {
    pub model: Model,
    next: usize,
    _b: PhantomData<B>,
}

impl<B: Logic> Clone for Builder<B> {
    fn clone(&self) -> Self {
        Builder {
            model: self.model.clone(),
            next: self.next,
            _b: PhantomData,
        }
    }
}

fn dense_to_row<W: Clone + Zero>(v: &[W]) -> Row<W> {
    v.iter()
        .enumerate()
        .filter(|(_, w)| !w.is_zero())
        .map(|(i, w)| (i, w.clone()))
        .collect()
}

impl<B: Logic> Builder<B> {
    /// A model with three carriers of random sizes in `1..=max_carrier`.
    pub fn new<R: Rng>(rng: &mut R, max_carrier: usize) -> Self {
        let mut model = Model::new();
        let elems = ["0", "1", "2", "3", "4", "5", "6", "7"];
        let max = max_carrier.clamp(1, elems.len());
        for (k, ty) in TYPES.iter().enumerate() {
            // keep one carrier of size at least two so guards can discriminate
            let lo = if k == 0 { max.min(2) } else { 1 };
            let n = rng.gen_range(lo..=max);
            model.add_type(*ty, &elems[..n]).expect("fresh carrier");
        }
        Builder {
            model,
            next: 0,
            _b: PhantomData,
        }
    }

    pub fn size(&self, ty: &BasicType) -> usize {
        self.model.carrier(ty).map(|c| c.size()).unwrap_or(1)
    }

    pub fn space_size(&self, s: &StateSpace) -> usize {
        s.ctx.types().iter().map(|t| self.size(t)).product()
    }

    /// A state space over the given variable names with random types,
    /// keeping the state size at most `cap`.
    pub fn space<R: Rng>(&self, rng: &mut R, vars: &[&str], cap: usize) -> StateSpace {
        for _ in 0..64 {
            let ctx = Context::new(
                vars.iter()
                    .map(|v| (Name::new(v), Name::new(TYPES.choose(rng).unwrap())))
                    .collect(),
            );
            let s = StateSpace::new(ctx);
            if self.space_size(&s) <= cap.max(1) || vars.len() <= 1 {
                return s;
            }
        }
        // every variable at the smallest carrier
        let small = TYPES
            .iter()
            .min_by_key(|t| self.size(&Name::new(t)))
            .expect("nonempty");
        StateSpace::new(Context::new(vars.iter().map(|v| (Name::new(v), Name::new(small))).collect()))
    }

    /// A space with the same types under new names.
    pub fn rename_space(&self, s: &StateSpace, vars: &[&str]) -> StateSpace {
        StateSpace::new(Context::new(
            vars.iter().zip(s.ctx.types()).map(|(v, t)| (Name::new(v), t)).collect(),
        ))
    }

    pub fn fresh(&mut self, prefix: &str) -> Name {
        self.next += 1;
        Name::from(format!("{prefix}{}", self.next))
    }

    pub(crate) fn declare(&mut self, prefix: &str, inputs: Vec<BasicType>, branches: Vec<Vec<BasicType>>, k: Kernel<B::W>) -> Name {
        let name = self.fresh(prefix);
        self.model
            .declare(GeneratorDecl::new(name.clone(), inputs, branches))
            .expect("fresh generator");
        B::install(&mut self.model, &name, k).expect("table fits its declaration");
        name
    }

    fn random_kernel<R: Rng>(rng: &mut R, rows: usize, cols: usize, props: RowProps) -> Kernel<B::W> {
        Kernel::from_rows((0..rows).map(|_| B::random_row(rng, cols, props)).collect(), cols)
    }

    // tables to terms

    pub fn cmd_from(&mut self, s: &StateSpace, k: Kernel<B::W>) -> Command {
        let tys = s.ctx.types();
        let name = self.declare("c", tys.clone(), vec![tys], k);
        let xs = s.vars();
        Command(gen(name, &xs, vec![Branch::new(xs.clone(), ret(ETA, &xs))]))
    }

    pub fn pred_from(&mut self, s: &StateSpace, vals: &[B::W]) -> Predicate {
        let k = Kernel::from_rows(
            vals.iter()
                .map(|w| if w.is_zero() { vec![] } else { vec![(0, w.clone())] })
                .collect(),
            1,
        );
        let name = self.declare("p", s.ctx.types(), vec![vec![]], k);
        Predicate(gen(name, &s.vars(), vec![Branch::new(vec![], ret(V, &[]))]))
    }

    pub fn guard_from(&mut self, s: &StateSpace, k: Kernel<B::W>) -> Guard {
        let name = self.declare("b", s.ctx.types(), vec![vec![], vec![]], k);
        guard_gen(name, &s.vars())
    }

    /// A guard that ignores the state: a generator with no inputs.
    pub fn constant_guard_from(&mut self, row: Row<B::W>) -> Guard {
        let name = self.declare("k", vec![], vec![vec![], vec![]], Kernel::from_rows(vec![row], 2));
        guard_gen(name, &[])
    }

    pub fn state_from(&mut self, s: &StateSpace, vals: &[B::W]) -> State {
        let tys = s.ctx.types();
        let n = vals.len();
        let name = self.declare("s", vec![], vec![tys], Kernel::from_rows(vec![dense_to_row(vals)], n));
        let xs = s.vars();
        State(gen(name, &[], vec![Branch::new(xs.clone(), ret(ETA, &xs))]))
    }

    /// `f(x̄)` returning one value of type `ty`, with rows drawn per `props`.
    pub fn expr<R: Rng>(&mut self, rng: &mut R, s: &StateSpace, ty: &BasicType, props: RowProps) -> Expr {
        let n = self.space_size(s);
        let m = self.size(ty);
        let k = Self::random_kernel(rng, n, m, props);
        let name = self.declare("e", s.ctx.types(), vec![vec![ty.clone()]], k);
        Expr::call(name, &s.vars(), &self.model.sig).expect("declared expression")
    }

    /// A closed expression of type `ty`.
    pub fn closed_expr<R: Rng>(&mut self, rng: &mut R, ty: &BasicType, props: RowProps) -> Expr {
        let m = self.size(ty);
        let k = Self::random_kernel(rng, 1, m, props);
        let name = self.declare("d", vec![], vec![vec![ty.clone()]], k);
        Expr::call(name, &[], &self.model.sig).expect("declared expression")
    }

    // random leaves

    pub fn random_cmd<R: Rng>(&mut self, rng: &mut R, s: &StateSpace, props: RowProps) -> Command {
        let n = self.space_size(s);
        let k = Self::random_kernel(rng, n, n, props);
        self.cmd_from(s, k)
    }

    pub fn random_guard<R: Rng>(&mut self, rng: &mut R, s: &StateSpace, props: RowProps) -> Guard {
        let n = self.space_size(s);
        let k = Self::random_kernel(rng, n, 2, props);
        self.guard_from(s, k)
    }

    pub fn random_constant_guard<R: Rng>(&mut self, rng: &mut R, props: RowProps) -> Guard {
        let row = B::random_row(rng, 2, props);
        self.constant_guard_from(row)
    }

    pub fn random_pred_vals<R: Rng>(&self, rng: &mut R, s: &StateSpace) -> Vec<B::W> {
        super::sem::random_pred::<B, R>(rng, self.space_size(s))
    }

    pub fn random_pred<R: Rng>(&mut self, rng: &mut R, s: &StateSpace) -> Predicate {
        let v = self.random_pred_vals(rng, s);
        self.pred_from(s, &v)
    }

    pub fn random_state_vals<R: Rng>(&self, rng: &mut R, s: &StateSpace) -> Vec<B::W> {
        super::sem::random_state::<B, R>(rng, self.space_size(s))
    }

    pub fn random_state<R: Rng>(&mut self, rng: &mut R, s: &StateSpace) -> State {
        let v = self.random_state_vals(rng, s);
        self.state_from(s, &v)
    }

    /// A structured program of the given depth: leaves are table commands,
    /// skip, abort, assignments, samples and assertions.
    pub fn random_program<R: Rng>(&mut self, rng: &mut R, s: &StateSpace, depth: usize) -> Command {
        let pick = if depth == 0 { rng.gen_range(0..6) } else { rng.gen_range(0..10) };
        let x = s.vars().choose(rng).cloned().expect("nonempty state");
        let ty = s.ctx.lookup(&x).map(|(_, t)| t.clone()).expect("declared");
        match pick {
            0 | 1 => self.random_cmd(rng, s, RowProps::ANY),
            2 => s.skip(),
            3 => {
                let e = self.expr(rng, s, &ty, RowProps::ANY);
                s.assign(&x, &e).expect("well-typed assignment")
            }
            4 => {
                let e = self.closed_expr(rng, &ty, RowProps::ANY);
                s.sample(&x, &e).expect("closed sample")
            }
            5 => {
                let p = self.random_pred(rng, s);
                s.assert(&p)
            }
            6 | 7 => {
                let c1 = self.random_program(rng, s, depth - 1);
                let c2 = self.random_program(rng, s, depth - 1);
                s.seq(&c1, &c2)
            }
            8 => {
                let b = self.random_guard(rng, s, RowProps::ANY);
                let c1 = self.random_program(rng, s, depth - 1);
                let c2 = self.random_program(rng, s, depth - 1);
                s.ifelse(&b, &c1, &c2)
            }
            _ => {
                let b = self.random_guard(rng, s, RowProps::ANY);
                let c = self.random_program(rng, s, depth - 1);
                s.while_do(&b, &c)
            }
        }
    }

    /// A command that permutes the state.
    pub fn permutation<R: Rng>(&mut self, rng: &mut R, s: &StateSpace) -> (Command, Vec<usize>) {
        let n = self.space_size(s);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        let k = Kernel::function(&perm, n);
        (self.cmd_from(s, k), perm)
    }

    /// A predicate read off a one-column table drawn per `props`.
    pub fn random_pred_with<R: Rng>(&mut self, rng: &mut R, s: &StateSpace, props: RowProps) -> Predicate {
        let n = self.space_size(s);
        let vals: Vec<B::W> = (0..n)
            .map(|_| {
                B::random_row(rng, 1, props)
                    .first()
                    .map(|(_, w)| w.clone())
                    .unwrap_or_else(B::W::zero)
            })
            .collect();
        self.pred_from(s, &vals)
    }

    fn states_of(&self, tys: &[BasicType]) -> usize {
        tys.iter().map(|t| self.size(t)).product()
    }

    /// A random signature of at most `len` types.
    pub fn random_sig<R: Rng>(&self, rng: &mut R, len: usize) -> Vec<BasicType> {
        let k = rng.gen_range(0..=len);
        (0..k).map(|_| Name::new(TYPES.choose(rng).unwrap())).collect()
    }

    /// An index of `labels` with random signatures of at most one type.
    pub fn random_index<R: Rng>(&self, rng: &mut R, labels: &[Name]) -> Index {
        Index::new(labels.iter().map(|l| (l.clone(), self.random_sig(rng, 1))).collect())
    }

    fn pick_vars<R: Rng>(rng: &mut R, scope: &Context, max: usize) -> Vec<Name> {
        let vars = scope.vars();
        let k = rng.gen_range(0..=max.min(vars.len()));
        let mut picked: Vec<Name> = vars.choose_multiple(rng, k).cloned().collect();
        picked.sort_by_key(|v| scope.lookup(v).map(|(i, _)| i));
        picked
    }

    fn types_in(scope: &Context, vars: &[Name]) -> Vec<BasicType> {
        vars.iter()
            .map(|v| scope.lookup(v).map(|(_, t)| t.clone()).expect("in scope"))
            .collect()
    }

    /// A fresh generator applied to `args`, with the given branch bodies.
    pub fn gen_term<R: Rng>(&mut self, rng: &mut R, scope: &Context, args: &[Name], branches: Vec<(Vec<(Name, BasicType)>, Term)>) -> Term {
        let inputs = Self::types_in(scope, args);
        let sigs: Vec<Vec<BasicType>> = branches.iter().map(|(b, _)| b.iter().map(|(_, t)| t.clone()).collect()).collect();
        let rows = self.states_of(&inputs);
        let cols = sigs.iter().map(|s| self.states_of(s)).sum();
        let k = Self::random_kernel(rng, rows, cols, RowProps::ANY);
        let name = self.declare("g", inputs, sigs, k);
        gen(
            name,
            args,
            branches
                .into_iter()
                .map(|(b, body)| Branch::new(b.into_iter().map(|(v, _)| v).collect(), body))
                .collect(),
        )
    }

    fn random_leaf<R: Rng>(&mut self, rng: &mut R, scope: &Context, idx: &Index) -> Term {
        let fill = |sig: &[BasicType]| sig.iter().all(|t| scope.0.iter().any(|(_, u)| u == t));
        let ready: Vec<&(Name, Vec<BasicType>)> = idx.0.iter().filter(|(_, sig)| fill(sig)).collect();
        if !ready.is_empty() && rng.gen_bool(0.5) {
            let (label, sig) = ready.choose(rng).expect("nonempty");
            let args: Vec<Name> = sig
                .iter()
                .map(|t| {
                    let same: Vec<&Name> = scope.0.iter().filter(|(_, u)| u == t).map(|(v, _)| v).collect();
                    (*same.choose(rng).expect("fillable")).clone()
                })
                .collect();
            return ret(label.clone(), &args);
        }
        let args = Self::pick_vars(rng, scope, 2);
        let k = rng.gen_range(1..=idx.len().clamp(1, 2)).min(idx.len());
        let targets: Vec<(Name, Vec<BasicType>)> = idx.0.choose_multiple(rng, k).cloned().collect();
        let branches = targets
            .into_iter()
            .map(|(label, sig)| {
                let bound: Vec<(Name, BasicType)> = sig.iter().map(|t| (self.fresh("w"), t.clone())).collect();
                let vs: Vec<Name> = bound.iter().map(|(v, _)| v.clone()).collect();
                (bound, ret(label, &vs))
            })
            .collect();
        self.gen_term(rng, scope, &args, branches)
    }

    /// A random term over `scope` at `idx`, built from fresh generators,
    /// returns and loops. New binders are only introduced while the scope
    /// stays within 27 states.
    pub fn random_term<R: Rng>(&mut self, rng: &mut R, scope: &Context, idx: &Index, depth: usize) -> Term {
        const CAP: usize = 27;
        let room = |b: &Self, extra: &[BasicType]| b.states_of(&scope.types()) * b.states_of(extra) <= CAP;
        if depth == 0 || rng.gen_bool(0.25) {
            return self.random_leaf(rng, scope, idx);
        }
        if rng.gen_bool(0.3) {
            let mut args = Self::pick_vars(rng, scope, 1);
            let mut sig = Self::types_in(scope, &args);
            if !room(self, &sig) {
                args.clear();
                sig.clear();
            }
            let label = self.fresh("l");
            let binders: Vec<Name> = sig.iter().map(|_| self.fresh("u")).collect();
            let inner = scope.concat(&Context::new(binders.iter().cloned().zip(sig.iter().cloned()).collect()));
            let body = self.random_term(rng, &inner, &idx.prepend(&label, &sig), depth - 1);
            return crate::kernel::lp(label, &args, &binders, body);
        }
        let args = Self::pick_vars(rng, scope, 2);
        let nb = if rng.gen_bool(0.05) { 0 } else { rng.gen_range(1..=2) };
        let mut branches = Vec::with_capacity(nb);
        for _ in 0..nb {
            let mut sig = self.random_sig(rng, 1);
            if !room(self, &sig) {
                sig.clear();
            }
            let bound: Vec<(Name, BasicType)> = sig.into_iter().map(|t| (self.fresh("u"), t)).collect();
            let inner = scope.concat(&Context::new(bound.clone()));
            let body = self.random_term(rng, &inner, idx, depth - 1);
            branches.push((bound, body));
        }
        self.gen_term(rng, scope, &args, branches)
    }

    // denotations in the current model

    pub fn cmd_m(&self, s: &StateSpace, c: &Command) -> Morphism<B> {
        cmd_m(s, c, &self.model).expect("generated commands evaluate")
    }

    pub fn guard_m(&self, s: &StateSpace, b: &Guard) -> Morphism<B> {
        guard_m(s, b, &self.model).expect("generated guards evaluate")
    }

    pub fn pred_m(&self, s: &StateSpace, p: &Predicate) -> Morphism<B> {
        pred_m(s, p, &self.model).expect("generated predicates evaluate")
    }

    pub fn pred_vals(&self, s: &StateSpace, p: &Predicate) -> Vec<B::W> {
        super::sem::values(&self.pred_m(s, p))
    }

    pub fn state_vals(&self, s: &StateSpace, t: &State) -> Vec<B::W> {
        let m: Morphism<B> = state_m(s, t, &self.model).expect("generated states evaluate");
        m.kernel.dense_row(0)
    }
}

/// The concatenated state of a relational triple.
pub fn joint(l: &StateSpace, r: &StateSpace) -> StateSpace {
    StateSpace::new(l.ctx.concat(&r.ctx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Par, Rel, Stoch};
    use num_rational::BigRational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn programs_evaluate<B: Logic>() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let mut b = Builder::<B>::new(&mut rng, 3);
            let s = b.space(&mut rng, &["x", "y"], 9);
            let c = b.random_program(&mut rng, &s, 3);
            s.check_cmd(&c, &b.model.sig).unwrap();
            let m = b.cmd_m(&s, &c);
            assert_eq!(m.dom.size(), b.space_size(&s));
            B::check_kernel(&m.kernel).unwrap();
        }
    }

    #[test]
    fn random_programs_typecheck_and_evaluate() {
        programs_evaluate::<Rel>();
        programs_evaluate::<Par>();
        programs_evaluate::<Stoch<BigRational>>();
    }
}

//! Equational laws of the derived combinators and the loop axioms of the
//! internal language, as random instances checked exactly in a model.
//!
//! Both catalogues reuse the rule machinery: an instance is a draft whose
//! conclusion is an (in)equation between two terms.

use rand::Rng;

use crate::backends::{eval, Kernel, Morphism};
use crate::combinators::{
    bottom, g_and, g_not, g_or, lift_guard, mk_l, mk_r, omega, p_and, p_bot, p_cond, p_top, upsilon, Command, Guard,
    Predicate, State, StateSpace,
};
use crate::kernel::{gen, lp, ret, subst_label, subst_labels, subst_vars, BasicType, Branch, Context, Index, LabelSub, Name, Term};

use super::coupling::Couple;
use super::ops::RowProps;
use super::rules::{cmds_cmp, draft, not, side_guard, Draft, Gen, Obligation, Rule, Side, SideKind};

fn cmp(ctx: &Context, idx: &Index, lhs: Term, rhs: Term, eq: bool) -> Obligation {
    Obligation::Cmp {
        ctx: ctx.clone(),
        idx: idx.clone(),
        lhs,
        rhs,
        eq,
    }
}

fn guard_eq(s: &StateSpace, a: &Guard, b: &Guard) -> Obligation {
    cmp(&s.ctx, &omega(), a.0.clone(), b.0.clone(), true)
}

fn pred_eq(s: &StateSpace, a: &Predicate, b: &Predicate) -> Obligation {
    cmp(&s.ctx, &upsilon(), a.0.clone(), b.0.clone(), true)
}

fn cmd_eq(s: &StateSpace, a: &Command, b: &Command) -> Obligation {
    cmds_cmp(s, a.0.clone(), b.0.clone(), true)
}

fn state_eq(s: &StateSpace, a: &State, b: &State) -> Obligation {
    cmp(&Context::empty(), &s.psi(), a.0.clone(), b.0.clone(), true)
}

fn side_pred(kind: SideKind, s: &StateSpace, p: &Predicate) -> Side {
    Side {
        kind,
        ctx: s.ctx.clone(),
        idx: upsilon(),
        term: p.0.clone(),
    }
}

fn law(conclusion: Obligation) -> Draft {
    draft(vec![], vec![], conclusion)
}

// guards

fn guards<B: Couple>(g: &mut Gen<'_, B>, k: usize) -> (StateSpace, Vec<Guard>) {
    let s = g.space();
    let bs = (0..k).map(|_| g.guard(&s, RowProps::ANY)).collect();
    (s, bs)
}

fn guard_and_comm<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (s, b) = guards(g, 2);
    law(guard_eq(&s, &g_and(&b[0], &b[1]), &g_and(&b[1], &b[0])))
}

fn guard_and_assoc<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (s, b) = guards(g, 3);
    law(guard_eq(&s, &g_and(&g_and(&b[0], &b[1]), &b[2]), &g_and(&b[0], &g_and(&b[1], &b[2]))))
}

fn guard_and_unit<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (s, b) = guards(g, 1);
    law(guard_eq(&s, &g_and(&b[0], &mk_l()), &b[0]))
}

fn guard_or_comm<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (s, b) = guards(g, 2);
    law(guard_eq(&s, &g_or(&b[0], &b[1]), &g_or(&b[1], &b[0])))
}

fn guard_or_assoc<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (s, b) = guards(g, 3);
    law(guard_eq(&s, &g_or(&g_or(&b[0], &b[1]), &b[2]), &g_or(&b[0], &g_or(&b[1], &b[2]))))
}

fn guard_or_unit<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (s, b) = guards(g, 1);
    law(guard_eq(&s, &g_or(&b[0], &mk_r()), &b[0]))
}

fn guard_de_morgan<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (s, b) = guards(g, 2);
    law(guard_eq(&s, &g_not(&g_and(&b[0], &b[1])), &g_or(&g_not(&b[1]), &g_not(&b[0]))))
}

fn guard_not_not<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (s, b) = guards(g, 1);
    law(guard_eq(&s, &g_not(&g_not(&b[0])), &b[0]))
}

fn guard_and_annihilator<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.guard(&s, RowProps::TOTAL);
    draft(vec![side_guard(SideKind::Total, &s, &b)], vec![], guard_eq(&s, &g_and(&b, &mk_r()), &mk_r()))
}

fn guard_or_annihilator<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.guard(&s, RowProps::TOTAL);
    draft(vec![side_guard(SideKind::Total, &s, &b)], vec![], guard_eq(&s, &g_or(&b, &mk_l()), &mk_l()))
}

fn guard_and_idempotent<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.guard(&s, RowProps::DET);
    draft(vec![side_guard(SideKind::Deterministic, &s, &b)], vec![], guard_eq(&s, &g_and(&b, &b), &b))
}

fn guard_or_idempotent<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.guard(&s, RowProps::DET);
    draft(vec![side_guard(SideKind::Deterministic, &s, &b)], vec![], guard_eq(&s, &g_or(&b, &b), &b))
}

// predicates

fn preds<B: Couple>(g: &mut Gen<'_, B>, k: usize) -> (StateSpace, Vec<Predicate>) {
    let s = g.space();
    let ps = (0..k).map(|_| g.pred(&s).0).collect();
    (s, ps)
}

fn pred_and_comm<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (s, p) = preds(g, 2);
    law(pred_eq(&s, &p_and(&p[0], &p[1]), &p_and(&p[1], &p[0])))
}

fn pred_and_assoc<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (s, p) = preds(g, 3);
    law(pred_eq(&s, &p_and(&p[0], &p_and(&p[1], &p[2])), &p_and(&p_and(&p[0], &p[1]), &p[2])))
}

fn pred_and_unit<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (s, p) = preds(g, 1);
    law(pred_eq(&s, &p_and(&p[0], &p_top()), &p[0]))
}

fn pred_and_absorb<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (s, p) = preds(g, 1);
    law(pred_eq(&s, &p_and(&p[0], &p_bot()), &p_bot()))
}

fn pred_distributes<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (s, p) = preds(g, 3);
    let b = g.guard(&s, RowProps::ANY);
    law(pred_eq(
        &s,
        &p_and(&p[0], &p_cond(&p[1], &b, &p[2])),
        &p_cond(&p_and(&p[0], &p[1]), &b, &p_and(&p[0], &p[2])),
    ))
}

fn pred_total_collapse<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let p = g.b.random_pred_with(g.r, &s, RowProps::TOTAL);
    draft(vec![side_pred(SideKind::Total, &s, &p)], vec![], pred_eq(&s, &p, &p_top()))
}

fn pred_det_idempotent<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let p = g.b.random_pred_with(g.r, &s, RowProps::DET);
    draft(vec![side_pred(SideKind::Deterministic, &s, &p)], vec![], pred_eq(&s, &p_and(&p, &p), &p))
}

// commands

fn progs<B: Couple>(g: &mut Gen<'_, B>, k: usize) -> (StateSpace, Vec<Command>) {
    let s = g.space();
    let cs = (0..k).map(|_| g.prog(&s)).collect();
    (s, cs)
}

fn cmd_seq_assoc<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (s, c) = progs(g, 3);
    law(cmd_eq(&s, &s.seq(&s.seq(&c[0], &c[1]), &c[2]), &s.seq(&c[0], &s.seq(&c[1], &c[2]))))
}

fn cmd_skip_right<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (s, c) = progs(g, 1);
    law(cmd_eq(&s, &s.seq(&c[0], &s.skip()), &c[0]))
}

fn cmd_skip_left<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (s, c) = progs(g, 1);
    law(cmd_eq(&s, &s.seq(&s.skip(), &c[0]), &c[0]))
}

fn cmd_abort_left<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (s, c) = progs(g, 1);
    law(cmd_eq(&s, &s.seq(&s.abort(), &c[0]), &s.abort()))
}

fn cmd_abort_right<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (s, c) = progs(g, 1);
    law(cmd_eq(&s, &s.seq(&c[0], &s.abort()), &s.abort()))
}

fn cmd_if_left<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (s, c) = progs(g, 2);
    law(cmd_eq(&s, &s.ifelse(&mk_l(), &c[0], &c[1]), &c[0]))
}

fn cmd_if_right<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (s, c) = progs(g, 2);
    law(cmd_eq(&s, &s.ifelse(&mk_r(), &c[0], &c[1]), &c[1]))
}

fn cmd_if_not<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (s, c) = progs(g, 2);
    let b = g.guard(&s, RowProps::ANY);
    law(cmd_eq(&s, &s.ifelse(&g_not(&b), &c[0], &c[1]), &s.ifelse(&b, &c[1], &c[0])))
}

fn cmd_while_unfold<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (s, c) = progs(g, 1);
    let b = g.guard(&s, RowProps::ANY);
    let w = s.while_do(&b, &c[0]);
    law(cmd_eq(&s, &w, &s.ifelse(&b, &s.seq(&c[0], &w), &s.skip())))
}

fn cmd_while_abort<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.guard(&s, RowProps::ANY);
    law(cmd_eq(&s, &s.while_do(&b, &s.abort()), &s.assert(&lift_guard(&not(&b)))))
}

fn cmd_if_seq<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (s, c) = progs(g, 3);
    let b = g.guard(&s, RowProps::ANY);
    law(cmd_eq(
        &s,
        &s.seq(&s.ifelse(&b, &c[0], &c[1]), &c[2]),
        &s.ifelse(&b, &s.seq(&c[0], &c[2]), &s.seq(&c[1], &c[2])),
    ))
}

fn cmd_assert_and<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (s, p) = preds(g, 2);
    law(cmd_eq(&s, &s.seq(&s.assert(&p[0]), &s.assert(&p[1])), &s.assert(&p_and(&p[0], &p[1]))))
}

fn cmd_assert_guard<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let b = g.guard(&s, RowProps::ANY);
    law(cmd_eq(&s, &s.assert(&lift_guard(&b)), &s.ifelse(&b, &s.skip(), &s.abort())))
}

fn cmd_assert_top<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    law(cmd_eq(&s, &s.assert(&p_top()), &s.skip()))
}

fn cmd_assert_bot<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    law(cmd_eq(&s, &s.assert(&p_bot()), &s.abort()))
}

fn cmd_assert_cond<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (s, p) = preds(g, 2);
    let b = g.guard(&s, RowProps::ANY);
    law(cmd_eq(
        &s,
        &s.assert(&p_cond(&p[0], &b, &p[1])),
        &s.ifelse(&b, &s.assert(&p[0]), &s.assert(&p[1])),
    ))
}

// states

fn state_observe_top<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let (t, _) = g.state(&s);
    law(state_eq(&s, &s.observe(&t, &p_top()), &t))
}

fn state_choice_left<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let (t, _) = g.state(&s);
    let (u, _) = g.state(&s);
    let c = s.s_choice(&t, &mk_l(), &u).expect("closed guard");
    law(state_eq(&s, &c, &t))
}

fn state_observe_bot<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let s = g.space();
    let (p, _) = g.pred(&s);
    law(state_eq(&s, &s.observe(&s.s_bot(), &p), &s.s_bot()))
}

// axioms of the internal language

fn labels(prefix: &str, n: usize) -> Vec<Name> {
    (1..=n).map(|i| Name::from(format!("{prefix}{i}"))).collect()
}

fn binders<B: Couple>(g: &mut Gen<'_, B>, sig: &[BasicType]) -> Vec<Name> {
    sig.iter().map(|_| g.b.fresh("v")).collect()
}

fn extend(ctx: &Context, vars: &[Name], sig: &[BasicType]) -> Context {
    ctx.concat(&Context::new(vars.iter().cloned().zip(sig.iter().cloned()).collect()))
}

/// An ambient context of one variable, kept small so that loop carriers
/// over it and a few binders stay within the evaluator's limit.
fn ambient<B: Couple>(g: &mut Gen<'_, B>) -> Context {
    let ctx = g.space().ctx;
    Context::new(ctx.0.into_iter().take(1).collect())
}

/// The ambient context, its variables as loop arguments and a random exit index.
fn loop_setup<B: Couple>(g: &mut Gen<'_, B>) -> (Context, Vec<Name>, Vec<BasicType>, Index) {
    let gam = ambient(g);
    let k = g.r.gen_range(1..=2);
    let out = g.b.random_index(g.r, &labels("o", k));
    (gam.clone(), gam.vars(), gam.types(), out)
}

fn depth<B: Couple>(g: &mut Gen<'_, B>) -> usize {
    g.r.gen_range(1..=3)
}

/// Redraws an instance whose sides the evaluator cannot represent, keeping
/// the last draw if none fits.
fn within_limits<B: Couple>(g: &mut Gen<'_, B>, make: fn(&mut Gen<'_, B>) -> Draft) -> Draft {
    let mut d = make(g);
    for _ in 0..16 {
        let Obligation::Cmp { ctx, idx, lhs, rhs, .. } = &d.conclusion else {
            return d;
        };
        let fits = |t: &Term| eval::<B>(t, ctx, idx, &g.b.model).is_ok();
        if fits(lhs) && fits(rhs) {
            return d;
        }
        d = make(g);
    }
    d
}

fn axiom_interchange<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    within_limits(g, interchange)
}

fn interchange<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let gam = ambient(g);
    let (n, m, k) = (g.r.gen_range(1..=2), g.r.gen_range(1..=2), g.r.gen_range(1..=2));
    let d1 = g.b.random_index(g.r, &labels("a", n));
    let d2 = g.b.random_index(g.r, &labels("b", m));
    let out = g.b.random_index(g.r, &labels("o", k));
    let dp = depth(g);
    let p = g.b.random_term(g.r, &gam, &d1, dp);
    let dq = depth(g);
    let q = g.b.random_term(g.r, &gam, &d2, dq);
    let us: Vec<Vec<Name>> = d1.0.iter().map(|(_, sig)| binders(g, sig)).collect();
    let vs: Vec<Vec<Name>> = d2.0.iter().map(|(_, sig)| binders(g, sig)).collect();
    let mut gammas = vec![vec![]; n];
    for (i, (_, ui)) in d1.0.iter().enumerate() {
        for (j, (_, vj)) in d2.0.iter().enumerate() {
            let scope = extend(&extend(&gam, &us[i], ui), &vs[j], vj);
            let d = g.r.gen_range(0..=1);
            gammas[i].push(g.b.random_term(g.r, &scope, &out, d));
        }
    }
    let lhs = subst_labels(
        &p,
        &(0..n)
            .map(|i| {
                let inner = subst_labels(
                    &q,
                    &(0..m).map(|j| LabelSub::new(d2.0[j].0.clone(), &vs[j], gammas[i][j].clone())).collect::<Vec<_>>(),
                );
                LabelSub::new(d1.0[i].0.clone(), &us[i], inner)
            })
            .collect::<Vec<_>>(),
    );
    let rhs = subst_labels(
        &q,
        &(0..m)
            .map(|j| {
                let inner = subst_labels(
                    &p,
                    &(0..n).map(|i| LabelSub::new(d1.0[i].0.clone(), &us[i], gammas[i][j].clone())).collect::<Vec<_>>(),
                );
                LabelSub::new(d2.0[j].0.clone(), &vs[j], inner)
            })
            .collect::<Vec<_>>(),
    );
    law(cmp(&gam, &out, lhs, rhs, true))
}

fn axiom_fixpoint<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (gam, xs, tys, out) = loop_setup(g);
    let us = binders(g, &tys);
    let ws = binders(g, &tys);
    let alpha = Name::new("loop");
    let d = depth(g);
    let p = g.b.random_term(g.r, &extend(&gam, &us, &tys), &out.prepend(&alpha, &tys), d);
    let lhs = lp(alpha.clone(), &xs, &us, p.clone());
    let rhs = subst_label(&subst_vars(&p, &us, &xs), &alpha, &ws, &lp(alpha.clone(), &ws, &us, p));
    law(cmp(&gam, &out, lhs, rhs, true))
}

fn axiom_dinaturality<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (gam, xs, tys, out) = loop_setup(g);
    let (alpha, beta) = (Name::new("la"), Name::new("lb"));
    let us = binders(g, &tys);
    let ys = g.b.random_sig(g.r, 1);
    let vs = binders(g, &ys);
    let dp = depth(g);
    let p = g.b.random_term(g.r, &extend(&gam, &us, &tys), &out.prepend(&beta, &ys), dp);
    let dq = depth(g);
    let q = g.b.random_term(g.r, &extend(&gam, &vs, &ys), &out.prepend(&alpha, &tys), dq);
    let lhs = lp(alpha.clone(), &xs, &us, subst_label(&p, &beta, &vs, &q));
    let inner = lp(beta.clone(), &vs, &vs, subst_label(&q, &alpha, &us, &p));
    let rhs = subst_label(&subst_vars(&p, &us, &xs), &beta, &vs, &inner);
    law(cmp(&gam, &out, lhs, rhs, true))
}

fn axiom_diagonal<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (gam, xs, tys, out) = loop_setup(g);
    let (alpha, beta) = (Name::new("la"), Name::new("lb"));
    let us = binders(g, &tys);
    let vs = binders(g, &tys);
    let idx = Index::new(vec![(beta.clone(), tys.clone()), (alpha.clone(), tys.clone())]).concat(&out);
    let d = depth(g);
    let p = g.b.random_term(g.r, &extend(&gam, &us, &tys), &idx, d);
    let lhs = lp(alpha.clone(), &xs, &us, lp(beta.clone(), &us, &us, p.clone()));
    let rhs = lp(alpha.clone(), &xs, &us, subst_label(&p, &beta, &vs, &ret(alpha.clone(), &vs)));
    law(cmp(&gam, &out, lhs, rhs, true))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Lax {
    Exact,
    /// `p[γ\ℓ] ≤ ℓ[β\q]`, concluding `loop ≤ ℓ ; loop`.
    Backward,
    /// `ℓ[β\q] ≤ p[γ\ℓ]`, concluding `ℓ ; loop ≤ loop`.
    Forward,
}

/// Uniformity along a permutation `ℓ` of the loop state: `q` is `p`
/// conjugated by `ℓ`, then moved up or down for the posetal variants.
fn uniformity<B: Couple>(g: &mut Gen<'_, B>, lax: Lax) -> Draft {
    let (gam, xs, tys, out) = loop_setup(g);
    let (gamma, beta) = (Name::new("lg"), Name::new("lb"));
    let us = binders(g, &tys);
    let vs = binders(g, &tys);
    let uctx = Context::new(us.iter().cloned().zip(tys.iter().cloned()).collect());
    let vctx = Context::new(vs.iter().cloned().zip(tys.iter().cloned()).collect());
    let pidx = out.prepend(&gamma, &tys);
    let d = depth(g);
    let p = g.b.random_term(g.r, &uctx, &pidx, d);
    let pk: Morphism<B> = eval(&p, &uctx, &pidx, &g.b.model).expect("random terms evaluate");
    let n = pk.kernel.n_rows();
    let s = StateSpace::new(uctx.clone());
    let (_, perm) = g.b.permutation(g.r, &s);
    let mut inv = vec![0; n];
    for (x, &y) in perm.iter().enumerate() {
        inv[y] = x;
    }
    let ell = gen_with_table(g, &uctx, &us, &[(beta.clone(), tys.clone())], Kernel::function(&perm, n));
    let cols = pk.kernel.n_cols();
    let rows = (0..n)
        .map(|y| {
            let row: Vec<_> = pk.kernel.row(inv[y]).iter().map(|(c, w)| (if *c < n { perm[*c] } else { *c }, w.clone())).collect();
            match lax {
                Lax::Exact => row,
                Lax::Backward => B::above(g.r, &row, cols),
                Lax::Forward => B::below(g.r, &row),
            }
        })
        .collect();
    let qidx = out.prepend(&beta, &tys);
    let q = gen_with_table(g, &vctx, &vs, &qidx.0, Kernel::from_rows(rows, cols));
    let prem_l = subst_label(&p, &gamma, &us, &ell);
    let prem_r = subst_label(&ell, &beta, &vs, &q);
    let lidx = out.prepend(&beta, &tys);
    let looped = lp(gamma.clone(), &xs, &us, p);
    let through = subst_label(&subst_vars(&ell, &us, &xs), &beta, &vs, &lp(beta.clone(), &vs, &vs, q));
    let (premise, conclusion) = match lax {
        Lax::Exact => (cmp(&uctx, &lidx, prem_l, prem_r, true), cmp(&gam, &out, looped, through, true)),
        Lax::Backward => (cmp(&uctx, &lidx, prem_l, prem_r, false), cmp(&gam, &out, looped, through, false)),
        Lax::Forward => (cmp(&uctx, &lidx, prem_r, prem_l, false), cmp(&gam, &out, through, looped, false)),
    };
    draft(vec![], vec![premise], conclusion)
}

/// A fresh generator with table `k` applied to `args`, one branch per label.
fn gen_with_table<B: Couple>(g: &mut Gen<'_, B>, ctx: &Context, args: &[Name], targets: &[(Name, Vec<BasicType>)], k: Kernel<B::W>) -> Term {
    let inputs = args
        .iter()
        .map(|a| ctx.lookup(a).map(|(_, t)| t.clone()).expect("in scope"))
        .collect();
    let name = g.b.declare("t", inputs, targets.iter().map(|(_, sig)| sig.clone()).collect(), k);
    let branches = targets
        .iter()
        .map(|(label, sig)| {
            let ws: Vec<Name> = sig.iter().map(|_| g.b.fresh("w")).collect();
            Branch::new(ws.clone(), ret(label.clone(), &ws))
        })
        .collect();
    gen(name, args, branches)
}

fn axiom_uniformity<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    uniformity(g, Lax::Exact)
}

fn axiom_uniformity_backward<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    uniformity(g, Lax::Backward)
}

fn axiom_uniformity_forward<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    uniformity(g, Lax::Forward)
}

fn axiom_top<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let gam = g.space().ctx;
    let a = Name::new("a");
    let idx = Index::single(a.clone(), vec![]);
    let d = depth(g);
    let p = g.b.random_term(g.r, &gam, &idx, d);
    law(cmp(&gam, &idx, p, ret(a, &[]), false))
}

fn axiom_bottom<B: Couple>(g: &mut Gen<'_, B>) -> Draft {
    let (gam, _, _, out) = loop_setup(g);
    let d = depth(g);
    let p = g.b.random_term(g.r, &gam, &out, d);
    law(cmp(&gam, &out, bottom(), p, false))
}

macro_rules! catalogue {
    ($name:ident, $ids:ident, $($id:literal => $f:ident),* $(,)?) => {
        pub fn $name<B: Couple>() -> Vec<Rule<B>> {
            vec![$(Rule::new($id, $f::<B>)),*]
        }

        pub const $ids: &[&str] = &[$($id),*];
    };
}

catalogue! {
    law_catalogue, LAW_IDS,
    "law.guard.and-comm" => guard_and_comm,
    "law.guard.and-assoc" => guard_and_assoc,
    "law.guard.and-unit" => guard_and_unit,
    "law.guard.or-comm" => guard_or_comm,
    "law.guard.or-assoc" => guard_or_assoc,
    "law.guard.or-unit" => guard_or_unit,
    "law.guard.de-morgan" => guard_de_morgan,
    "law.guard.not-not" => guard_not_not,
    "law.guard.and-annihilator" => guard_and_annihilator,
    "law.guard.or-annihilator" => guard_or_annihilator,
    "law.guard.and-idempotent" => guard_and_idempotent,
    "law.guard.or-idempotent" => guard_or_idempotent,
    "law.pred.and-comm" => pred_and_comm,
    "law.pred.and-assoc" => pred_and_assoc,
    "law.pred.and-unit" => pred_and_unit,
    "law.pred.and-absorb" => pred_and_absorb,
    "law.pred.distributes" => pred_distributes,
    "law.pred.total-collapse" => pred_total_collapse,
    "law.pred.det-idempotent" => pred_det_idempotent,
    "law.cmd.seq-assoc" => cmd_seq_assoc,
    "law.cmd.skip-right" => cmd_skip_right,
    "law.cmd.skip-left" => cmd_skip_left,
    "law.cmd.abort-left" => cmd_abort_left,
    "law.cmd.abort-right" => cmd_abort_right,
    "law.cmd.if-left" => cmd_if_left,
    "law.cmd.if-right" => cmd_if_right,
    "law.cmd.if-not" => cmd_if_not,
    "law.cmd.while-unfold" => cmd_while_unfold,
    "law.cmd.while-abort" => cmd_while_abort,
    "law.cmd.if-seq" => cmd_if_seq,
    "law.cmd.assert-and" => cmd_assert_and,
    "law.cmd.assert-guard" => cmd_assert_guard,
    "law.cmd.assert-top" => cmd_assert_top,
    "law.cmd.assert-bot" => cmd_assert_bot,
    "law.cmd.assert-cond" => cmd_assert_cond,
    "law.state.observe-top" => state_observe_top,
    "law.state.choice-left" => state_choice_left,
    "law.state.observe-bot" => state_observe_bot,
}

catalogue! {
    axiom_catalogue, AXIOM_IDS,
    "axiom.interchange" => axiom_interchange,
    "axiom.fixpoint" => axiom_fixpoint,
    "axiom.dinaturality" => axiom_dinaturality,
    "axiom.diagonal" => axiom_diagonal,
    "axiom.uniformity" => axiom_uniformity,
    "axiom.uniformity-backward" => axiom_uniformity_backward,
    "axiom.uniformity-forward" => axiom_uniformity_forward,
    "axiom.top" => axiom_top,
    "axiom.bottom" => axiom_bottom,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logics::random::Builder;
    use crate::logics::rules::{check_draft, Outcome, Rg};
    use crate::models::{Par, Rel, Stoch};
    use num_rational::BigRational;
    use rand::SeedableRng;

    fn holds<B: Couple>(cat: Vec<Rule<B>>) {
        let mut r = Rg::seed_from_u64(17);
        for rule in cat {
            for _ in 0..8 {
                let mut b = Builder::<B>::new(&mut r, 3);
                let d = rule.draft(&mut b, &mut r);
                let o = check_draft::<B>(&d, &b.model);
                assert!(matches!(o, Ok(Outcome::Sound)), "{} on {}: {:?}", rule.id, B::ID, o);
            }
        }
    }

    #[test]
    fn laws_hold_on_a_few_instances() {
        holds(law_catalogue::<Rel>());
        holds(law_catalogue::<Par>());
        holds(law_catalogue::<Stoch<BigRational>>());
    }

    #[test]
    fn axioms_hold_on_a_few_instances() {
        holds(axiom_catalogue::<Rel>());
        holds(axiom_catalogue::<Par>());
        holds(axiom_catalogue::<Stoch<BigRational>>());
    }
}

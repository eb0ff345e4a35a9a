//! Morphism-level helpers: denotations of the derived constructs and the
//! order-theoretic operations used when solving for triple components.

use num_traits::Zero;
use rand::Rng;

use crate::backends::{eval, Backend, EvalError, Kernel, Morphism, Obj};
use crate::combinators::{omega, upsilon, Command, Expr, Guard, Predicate, State, StateSpace, EPS};
use crate::kernel::{Context, Index};
use crate::models::Model;

use super::ops::{wmax, wmin, Logic, Row};

pub fn guard_m<B: Backend>(s: &StateSpace, b: &Guard, model: &Model) -> Result<Morphism<B>, EvalError> {
    eval(&b.0, &s.ctx, &omega(), model)
}

pub fn pred_m<B: Backend>(s: &StateSpace, p: &Predicate, model: &Model) -> Result<Morphism<B>, EvalError> {
    eval(&p.0, &s.ctx, &upsilon(), model)
}

pub fn cmd_m<B: Backend>(s: &StateSpace, c: &Command, model: &Model) -> Result<Morphism<B>, EvalError> {
    eval(&c.0, &s.ctx, &s.psi(), model)
}

pub fn state_m<B: Backend>(s: &StateSpace, t: &State, model: &Model) -> Result<Morphism<B>, EvalError> {
    eval(&t.0, &Context::empty(), &s.psi(), model)
}

pub fn expr_m<B: Backend>(s: &StateSpace, e: &Expr, model: &Model) -> Result<Morphism<B>, EvalError> {
    eval(&e.term, &s.ctx, &Index::single(EPS, vec![e.ty.clone()]), model)
}

/// `assert p : X → X` for a predicate `p : X → 1`.
pub fn assert_m<B: Backend>(p: &Morphism<B>) -> Morphism<B> {
    let rows = (0..p.dom.size())
        .map(|i| {
            let w = p.kernel.get(i, 0);
            if w.is_zero() {
                vec![]
            } else {
                vec![(i, w)]
            }
        })
        .collect();
    Morphism::raw(p.dom.clone(), vec![p.dom.clone()], Kernel::from_rows(rows, p.dom.size()))
}

/// Values of a one-column predicate, or a one-row state, as a dense vector.
pub fn values<B: Backend>(m: &Morphism<B>) -> Vec<B::W> {
    if m.dom.size() == 1 && m.cod_size() != 1 {
        m.kernel.dense_row(0)
    } else {
        (0..m.dom.size()).map(|i| m.kernel.get(i, 0)).collect()
    }
}

/// A predicate `X → 1` with the given values.
pub fn pred_from<B: Backend>(x: &Obj, vals: &[B::W]) -> Morphism<B> {
    let rows = vals
        .iter()
        .map(|w| if w.is_zero() { vec![] } else { vec![(0, w.clone())] })
        .collect();
    Morphism::raw(x.clone(), vec![Obj::unit()], Kernel::from_rows(rows, 1))
}

/// A state `1 → X` with the given values.
pub fn state_from<B: Backend>(x: &Obj, vals: &[B::W]) -> Morphism<B> {
    Morphism::raw(Obj::unit(), vec![x.clone()], Kernel::from_dense(vec![vals.to_vec()], x.size()))
}

pub fn join<W: PartialOrd + Clone>(a: &[W], b: &[W]) -> Vec<W> {
    a.iter().zip(b).map(|(x, y)| wmax(x, y)).collect()
}

pub fn meet<W: PartialOrd + Clone>(a: &[W], b: &[W]) -> Vec<W> {
    a.iter().zip(b).map(|(x, y)| wmin(x, y)).collect()
}

/// Least `q` with `assert p ; c ≤ c ; assert q`: `q(y)` is the largest `p(x)`
/// over inputs that reach `y`.
pub fn post_min<W: crate::backends::Weight>(p: &[W], c: &Kernel<W>) -> Vec<W> {
    let mut q = vec![W::zero(); c.n_cols()];
    for (x, px) in p.iter().enumerate() {
        for (y, _) in c.row(x) {
            q[*y] = wmax(&q[*y], px);
        }
    }
    q
}

/// Greatest `p` with `assert p ; c ≤ c ; assert q`.
pub fn pre_max<W: crate::backends::Weight>(c: &Kernel<W>, q: &[W]) -> Vec<W> {
    (0..c.n_rows())
        .map(|x| c.row(x).iter().fold(W::one(), |m, (y, _)| wmin(&m, &q[*y])))
        .collect()
}

/// `c ; q` as values on the inputs.
pub fn weakest<W: crate::backends::Weight>(c: &Kernel<W>, q: &[W]) -> Vec<W> {
    (0..c.n_rows())
        .map(|x| c.row(x).iter().fold(W::zero(), |m, (y, w)| m + w.clone() * q[*y].clone()))
        .collect()
}

/// `s ; c` as values on the outputs.
pub fn image<W: crate::backends::Weight>(s: &[W], c: &Kernel<W>) -> Vec<W> {
    let mut out = vec![W::zero(); c.n_cols()];
    for (x, sx) in s.iter().enumerate() {
        for (y, w) in c.row(x) {
            out[*y] = out[*y].clone() + sx.clone() * w.clone();
        }
    }
    out
}

fn as_row<W: Clone + Zero>(v: &[W]) -> Row<W> {
    v.iter()
        .enumerate()
        .filter(|(_, w)| !w.is_zero())
        .map(|(i, w)| (i, w.clone()))
        .collect()
}

fn from_row<W: Clone + Zero>(r: &[(usize, W)], n: usize) -> Vec<W> {
    let mut v = vec![W::zero(); n];
    for (i, w) in r {
        v[*i] = w.clone();
    }
    v
}

/// Pointwise perturbations of predicate values, each entry a one-column row.
pub fn vals_below<B: Logic, R: Rng>(rng: &mut R, v: &[B::W]) -> Vec<B::W> {
    v.iter()
        .map(|w| {
            let r = if w.is_zero() { vec![] } else { vec![(0, w.clone())] };
            from_row(&B::below(rng, &r), 1).remove(0)
        })
        .collect()
}

pub fn vals_above<B: Logic, R: Rng>(rng: &mut R, v: &[B::W]) -> Vec<B::W> {
    v.iter()
        .map(|w| {
            let r = if w.is_zero() { vec![] } else { vec![(0, w.clone())] };
            from_row(&B::above(rng, &r, 1), 1).remove(0)
        })
        .collect()
}

/// State values perturbed as a single row (the mass bound is global).
pub fn state_below<B: Logic, R: Rng>(rng: &mut R, v: &[B::W]) -> Vec<B::W> {
    from_row(&B::below(rng, &as_row(v)), v.len())
}

pub fn state_above<B: Logic, R: Rng>(rng: &mut R, v: &[B::W]) -> Vec<B::W> {
    from_row(&B::above(rng, &as_row(v), v.len()), v.len())
}

/// Random predicate values.
pub fn random_pred<B: Logic, R: Rng>(rng: &mut R, n: usize) -> Vec<B::W> {
    (0..n)
        .map(|_| from_row(&B::random_row(rng, 1, Default::default()), 1).remove(0))
        .collect()
}

/// Random state values.
pub fn random_state<B: Logic, R: Rng>(rng: &mut R, n: usize) -> Vec<B::W> {
    from_row(&B::random_row(rng, n, Default::default()), n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::{ratio, Boolean};

    #[test]
    fn strongest_post_and_weakest_pre() {
        // 0 ↦ {0, 1}, 1 ↦ {1}
        let c = Kernel::from_rows(
            vec![vec![(0, Boolean(true)), (1, Boolean(true))], vec![(1, Boolean(true))]],
            2,
        );
        let p = vec![Boolean(false), Boolean(true)];
        assert_eq!(post_min(&p, &c), vec![Boolean(false), Boolean(true)]);
        assert_eq!(pre_max(&c, &[Boolean(false), Boolean(true)]), vec![Boolean(false), Boolean(true)]);
        let s = Kernel::from_dense(vec![vec![ratio(1, 2), ratio(1, 4)]], 2);
        assert_eq!(weakest(&s, &[ratio(1, 1), ratio(1, 2)]), vec![ratio(5, 8)]);
        assert_eq!(image(&[ratio(1, 2)], &s), vec![ratio(1, 4), ratio(1, 8)]);
    }
}

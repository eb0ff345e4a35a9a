//! Couplings of two programs, their constructors, and the exact decision of
//! whether a relational triple has a witnessing coupling.
//!
//! A coupling of `c₁ : X₁ → Y₁` and `c₂ : X₂ → Y₂` is a morphism
//! `h : X₁ ⊗ X₂ → [Y₁ ⊗ Y₂, Y₁, Y₂]` whose first marginal (joint and first
//! tail) is `c₁` and whose second marginal (joint and second tail) is `c₂`.


use serde::{Deserialize, Serialize};

use crate::backends::{Backend, Boolean, Field, Kernel, Morphism, Obj, RowAcc};
use crate::combinators::{Command, StateSpace};
use crate::models::{Model, Par, Rel, Stoch};

use super::lp::Lp;
use super::ops::{Logic, Row};
use super::sem::cmd_m;
use super::triple::{check_unary, cond_m, Cell, Cond, TripleError, TripleShape, Violation};

/// Sizes of a coupling's domain factors and output blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dims {
    pub n1: usize,
    pub n2: usize,
    pub m1: usize,
    pub m2: usize,
}

impl Dims {
    pub fn of<B: Backend>(c1: &Morphism<B>, c2: &Morphism<B>) -> Dims {
        Dims {
            n1: c1.dom.size(),
            n2: c2.dom.size(),
            m1: c1.cod_size(),
            m2: c2.cod_size(),
        }
    }

    pub fn joint(&self) -> usize {
        self.m1 * self.m2
    }

    pub fn tail1(&self) -> usize {
        self.joint()
    }

    pub fn tail2(&self) -> usize {
        self.joint() + self.m1
    }

    pub fn width(&self) -> usize {
        self.joint() + self.m1 + self.m2
    }
}

pub fn coupling_cod(y1: &Obj, y2: &Obj) -> Vec<Obj> {
    vec![y1.tensor(y2), y1.clone(), y2.clone()]
}

fn single_block<B: Backend>(c: &Morphism<B>, what: &str) -> Result<Obj, TripleError> {
    match c.cod.as_slice() {
        [y] => Ok(y.clone()),
        _ => Err(TripleError::Ill(format!("{what} must have a single output block"))),
    }
}

fn wrap<B: Backend>(c1: &Morphism<B>, c2: &Morphism<B>, k: Kernel<B::W>) -> Morphism<B> {
    let y1 = c1.cod.first().cloned().unwrap_or_else(Obj::unit);
    let y2 = c2.cod.first().cloned().unwrap_or_else(Obj::unit);
    Morphism::raw(c1.dom.tensor(&c2.dom), coupling_cod(&y1, &y2), k)
}

/// The two marginals of a coupling row.
fn marginals<W: crate::backends::Weight>(row: &[(usize, W)], d: &Dims) -> (Row<W>, Row<W>) {
    let (mut a, mut b) = (RowAcc::new(), RowAcc::new());
    for (c, w) in row {
        if *c < d.joint() {
            a.add(c / d.m2, w.clone());
            b.add(c % d.m2, w.clone());
        } else if *c < d.tail2() {
            a.add(c - d.tail1(), w.clone());
        } else {
            b.add(c - d.tail2(), w.clone());
        }
    }
    (a.finish(), b.finish())
}

fn same_row<W: crate::backends::Weight>(a: &[(usize, W)], b: &[(usize, W)]) -> bool {
    let clean = |r: &[(usize, W)]| -> Vec<(usize, W)> {
        let mut acc = RowAcc::new();
        for (c, w) in r {
            acc.add(*c, w.clone());
        }
        acc.finish()
    };
    clean(a) == clean(b)
}

fn row_index(d: &Dims, i: usize) -> (usize, usize) {
    (i / d.n2, i % d.n2)
}

fn row_ok<B: Backend>(h: &Kernel<B::W>, i: usize, c1: &Kernel<B::W>, c2: &Kernel<B::W>, d: &Dims) -> bool {
    let (x1, x2) = row_index(d, i);
    let (a, b) = marginals(h.row(i), d);
    B::check_row(h.row(i)).is_ok() && same_row(&a, c1.row(x1)) && same_row(&b, c2.row(x2))
}

/// Whether `h` couples `c1` and `c2`; the error names the first bad row.
pub fn is_coupling<B: Backend>(h: &Morphism<B>, c1: &Morphism<B>, c2: &Morphism<B>) -> Result<(), String> {
    let d = Dims::of(c1, c2);
    if h.dom.size() != d.n1 * d.n2 || h.cod_size() != d.width() {
        return Err(format!(
            "coupling has shape {} but the programs need {} rows and {} columns",
            h.signature(),
            d.n1 * d.n2,
            d.width()
        ));
    }
    for i in 0..h.dom.size() {
        if !row_ok::<B>(&h.kernel, i, &c1.kernel, &c2.kernel, &d) {
            return Err(format!("row {} does not have the programs as marginals", h.dom.show(i)));
        }
    }
    Ok(())
}

/// The joint block `h⁻ : X₁ ⊗ X₂ → Y₁ ⊗ Y₂`.
pub fn project<B: Backend>(h: &Morphism<B>) -> Morphism<B> {
    let n = h.cod[0].size();
    Morphism::raw(h.dom.clone(), vec![h.cod[0].clone()], h.kernel.col_range(0, n))
}

/// Couples row by row with the independent coupling.
pub fn independent<B: Logic>(c1: &Morphism<B>, c2: &Morphism<B>) -> Morphism<B> {
    let d = Dims::of(c1, c2);
    let rows = (0..d.n1 * d.n2)
        .map(|i| {
            let (x1, x2) = row_index(&d, i);
            B::independent(c1.kernel.row(x1), c2.kernel.row(x2), d.m1, d.m2)
        })
        .collect();
    wrap(c1, c2, Kernel::from_rows(rows, d.width()))
}

/// Replaces every row that fails the marginal equations by the independent
/// coupling of the program rows.
pub fn complete<B: Logic>(h: &Morphism<B>, c1: &Morphism<B>, c2: &Morphism<B>) -> Morphism<B> {
    let d = Dims::of(c1, c2);
    let rows = (0..d.n1 * d.n2)
        .map(|i| {
            if row_ok::<B>(&h.kernel, i, &c1.kernel, &c2.kernel, &d) {
                h.kernel.row(i).to_vec()
            } else {
                let (x1, x2) = row_index(&d, i);
                B::independent(c1.kernel.row(x1), c2.kernel.row(x2), d.m1, d.m2)
            }
        })
        .collect();
    wrap(c1, c2, Kernel::from_rows(rows, d.width()))
}

/// Sequential composition: couple the first programs with `g`, continue the
/// joint part with `h` and each tail with its own second program.
pub fn seq<B: Backend>(g: &Morphism<B>, h: &Morphism<B>, d1: &Morphism<B>, d2: &Morphism<B>) -> Result<Morphism<B>, TripleError> {
    let z1 = single_block(d1, "second left program")?;
    let z2 = single_block(d2, "second right program")?;
    let (p1, p2) = (z1.size(), z2.size());
    let w = p1 * p2 + p1 + p2;
    if h.cod_size() != w || g.cod_size() != h.dom.size() + d1.dom.size() + d2.dom.size() {
        return Err(TripleError::Ill("couplings do not compose".into()));
    }
    let t1: Vec<usize> = (0..p1).map(|j| p1 * p2 + j).collect();
    let t2: Vec<usize> = (0..p2).map(|j| p1 * p2 + p1 + j).collect();
    let next = h
        .kernel
        .vstack(&d1.kernel.map_cols(&t1, w))
        .vstack(&d2.kernel.map_cols(&t2, w));
    Ok(Morphism::raw(g.dom.clone(), coupling_cod(&z1, &z2), g.kernel.then(&next)))
}

/// The product coupling `(c₁ ⊗ c₂) ; ι₁`, a coupling when both are total.
pub fn product<B: Backend>(c1: &Morphism<B>, c2: &Morphism<B>) -> Morphism<B> {
    let d = Dims::of(c1, c2);
    let k = c1.kernel.kron(&c2.kernel);
    let id: Vec<usize> = (0..d.joint()).collect();
    wrap(c1, c2, k.map_cols(&id, d.width()))
}

/// A coupling of `(c₂, c₁)` from one of `(c₁, c₂)`.
pub fn swap<B: Backend>(h: &Morphism<B>, x1: &Obj, x2: &Obj) -> Morphism<B> {
    let (y1, y2) = (h.cod[1].clone(), h.cod[2].clone());
    let d = Dims {
        n1: x1.size(),
        n2: x2.size(),
        m1: y1.size(),
        m2: y2.size(),
    };
    let rows: Vec<usize> = (0..d.n1 * d.n2).map(|i| (i % d.n1) * d.n2 + i / d.n1).collect();
    let cols: Vec<usize> = (0..d.width())
        .map(|c| {
            if c < d.joint() {
                (c % d.m2) * d.m1 + c / d.m2
            } else if c < d.tail2() {
                d.joint() + d.m2 + (c - d.tail1())
            } else {
                d.joint() + (c - d.tail2())
            }
        })
        .collect();
    let k = h.kernel.reindex_rows(&rows).map_cols(&cols, d.width());
    Morphism::raw(x2.tensor(x1), coupling_cod(&y2, &y1), k)
}

/// Conditionals on both sides with four couplings, one per pair of
/// branches, indexed `[then-then, then-else, else-then, else-else]`.
pub fn ifelse4<B: Backend>(b1: &Morphism<B>, b2: &Morphism<B>, hs: [&Morphism<B>; 4]) -> Morphism<B> {
    let n2 = b2.dom.size();
    let width = hs[0].cod_size();
    let rows = (0..b1.dom.size() * n2)
        .map(|i| {
            let (x1, x2) = (i / n2, i % n2);
            let mut acc = RowAcc::new();
            for (k, w1) in b1.kernel.row(x1) {
                for (l, w2) in b2.kernel.row(x2) {
                    acc.add_scaled(hs[k * 2 + l].kernel.row(i), &(w1.clone() * w2.clone()));
                }
            }
            acc.finish()
        })
        .collect();
    Morphism::raw(hs[0].dom.clone(), hs[0].cod.clone(), Kernel::from_rows(rows, width))
}

/// Conditionals whose guards are expected to agree: the literal
/// construction, then-then to `g` and else-else to `h` with the mixed cases
/// sent to zero. It is a coupling only on rows where the guards agree.
pub fn ifelse_literal<B: Backend>(b1: &Morphism<B>, b2: &Morphism<B>, g: &Morphism<B>, h: &Morphism<B>) -> Morphism<B> {
    let zero = Morphism::zero(&g.dom, &g.cod);
    ifelse4(b1, b2, [g, &zero, &zero, h])
}

/// The literal construction repaired on rows where the guards disagree;
/// `f1` and `f2` are the two whole conditionals.
pub fn ifelse_agree<B: Logic>(
    b1: &Morphism<B>,
    b2: &Morphism<B>,
    g: &Morphism<B>,
    h: &Morphism<B>,
    f1: &Morphism<B>,
    f2: &Morphism<B>,
) -> Morphism<B> {
    complete(&ifelse_literal(b1, b2, g, h), f1, f2)
}

/// Loops on both sides run in lockstep. `g` couples the two bodies, `h1`
/// couples the left body with skip and `h2` skip with the right body; the
/// latter two take over once one guard has failed.
pub fn while_lockstep<B: Backend>(
    b1: &Morphism<B>,
    b2: &Morphism<B>,
    c1: &Morphism<B>,
    c2: &Morphism<B>,
    g: &Morphism<B>,
    h1: &Morphism<B>,
    h2: &Morphism<B>,
) -> Morphism<B> {
    let (n1, n2) = (c1.dom.size(), c2.dom.size());
    let p = n1 * n2;
    // states: joint, left-only-guard, right-only-guard, left alone, right alone
    let (sj, sa, sb, sl, sr) = (0, p, 2 * p, 3 * p, 3 * p + n1);
    let n = 3 * p + n1 + n2;
    let (ej, e1, e2) = (n, n + p, n + p + n1);
    let width = n + p + n1 + n2;
    // where a coupling's columns go from a given state block
    let route = |row: &[(usize, B::W)], joint: usize, t1: usize, t2: usize, w: &B::W, acc: &mut RowAcc<B::W>| {
        for (c, v) in row {
            let col = if *c < p {
                joint + c
            } else if *c < p + n1 {
                t1 + (c - p)
            } else {
                t2 + (c - p - n1)
            };
            acc.add(col, w.clone() * v.clone());
        }
    };
    let mut rows = Vec::with_capacity(n);
    for i in 0..p {
        let (x1, x2) = (i / n2, i % n2);
        let mut acc = RowAcc::new();
        for (k, w1) in b1.kernel.row(x1) {
            for (l, w2) in b2.kernel.row(x2) {
                let w = w1.clone() * w2.clone();
                match (k, l) {
                    (0, 0) => route(g.kernel.row(i), sj, sl, sr, &w, &mut acc),
                    (0, _) => route(h1.kernel.row(i), sa, sl, e2, &w, &mut acc),
                    (_, 0) => route(h2.kernel.row(i), sb, e1, sr, &w, &mut acc),
                    _ => acc.add(ej + i, w),
                }
            }
        }
        rows.push(acc.finish());
    }
    for i in 0..p {
        let mut acc = RowAcc::new();
        for (k, w) in b1.kernel.row(i / n2) {
            if *k == 0 {
                route(h1.kernel.row(i), sa, sl, e2, w, &mut acc);
            } else {
                acc.add(ej + i, w.clone());
            }
        }
        rows.push(acc.finish());
    }
    for i in 0..p {
        let mut acc = RowAcc::new();
        for (l, w) in b2.kernel.row(i % n2) {
            if *l == 0 {
                route(h2.kernel.row(i), sb, e1, sr, w, &mut acc);
            } else {
                acc.add(ej + i, w.clone());
            }
        }
        rows.push(acc.finish());
    }
    for (x, (b, c, home, exit)) in [(b1, c1, sl, e1)]
        .into_iter()
        .flat_map(|t| (0..n1).map(move |x| (x, t)))
        .chain([(b2, c2, sr, e2)].into_iter().flat_map(|t| (0..n2).map(move |x| (x, t))))
    {
        let mut acc = RowAcc::new();
        for (k, w) in b.kernel.row(x) {
            if *k == 0 {
                acc.add_scaled(&c.kernel.row(x).iter().map(|(y, v)| (home + y, v.clone())).collect::<Vec<_>>(), w);
            } else {
                acc.add(exit + x, w.clone());
            }
        }
        rows.push(acc.finish());
    }
    let body = Kernel::from_rows(rows, width);
    let out = B::fix(&body, n);
    let idx: Vec<usize> = (0..p).collect();
    wrap(c1, c2, out.reindex_rows(&idx))
}

/// Lockstep loops with the independent couplings for the one-sided phases.
pub fn while_independent<B: Logic>(
    b1: &Morphism<B>,
    b2: &Morphism<B>,
    c1: &Morphism<B>,
    c2: &Morphism<B>,
    g: &Morphism<B>,
) -> Morphism<B> {
    let id1 = Morphism::identity(&c1.dom);
    let id2 = Morphism::identity(&c2.dom);
    let h1 = independent(c1, &id2);
    let h2 = independent(&id1, c2);
    while_lockstep(b1, b2, c1, c2, g, &h1, &h2)
}

/// Result of checking a relational triple.
#[derive(Clone, Debug)]
pub enum RelVerdict<B: Backend> {
    /// A coupling that witnesses the triple.
    Valid(Morphism<B>),
    /// No coupling witnesses the triple.
    Invalid,
    /// Validity was not decided.
    Unknown(String),
}

impl<B: Backend> RelVerdict<B> {
    pub fn is_valid(&self) -> bool {
        matches!(self, RelVerdict::Valid(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Valid,
    Invalid,
    Unknown,
}

impl<B: Backend> From<&RelVerdict<B>> for Answer {
    fn from(v: &RelVerdict<B>) -> Answer {
        match v {
            RelVerdict::Valid(_) => Answer::Valid,
            RelVerdict::Invalid => Answer::Invalid,
            RelVerdict::Unknown(_) => Answer::Unknown,
        }
    }
}

/// Checks the triple with a specific coupling.
pub fn check_with<B: Backend>(
    shape: TripleShape,
    pre: &Morphism<B>,
    h: &Morphism<B>,
    c1: &Morphism<B>,
    c2: &Morphism<B>,
    post: &Morphism<B>,
) -> Result<Result<(), WitnessFailure>, TripleError> {
    if let Err(e) = is_coupling(h, c1, c2) {
        return Ok(Err(WitnessFailure::NotACoupling(e)));
    }
    Ok(match check_unary(shape.unary(), pre, &project(h), post)? {
        None => Ok(()),
        Some(v) => Err(WitnessFailure::Violation(v)),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessFailure {
    NotACoupling(String),
    Violation(Violation),
}

impl std::fmt::Display for WitnessFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WitnessFailure::NotACoupling(e) => write!(f, "not a coupling: {e}"),
            WitnessFailure::Violation(v) => write!(f, "the coupling fails {v}"),
        }
    }
}

/// Backends that can decide coupling existence exactly.
pub trait Couple: Logic {
    /// A coupling of `c1` and `c2` witnessing the triple, if one exists.
    fn search(
        shape: TripleShape,
        pre: &Morphism<Self>,
        c1: &Morphism<Self>,
        c2: &Morphism<Self>,
        post: &Morphism<Self>,
    ) -> Result<Option<Morphism<Self>>, TripleError>;
}

/// Checks a relational triple: with the supplied coupling first, then, if
/// allowed, by exact search.
pub fn check_rel<B: Couple>(
    shape: TripleShape,
    pre: &Morphism<B>,
    c1: &Morphism<B>,
    c2: &Morphism<B>,
    post: &Morphism<B>,
    witness: Option<&Morphism<B>>,
    search: bool,
) -> Result<RelVerdict<B>, TripleError> {
    if !shape.relational() {
        return Err(TripleError::Ill(format!("{shape} is not a relational shape")));
    }
    single_block(c1, "left program")?;
    single_block(c2, "right program")?;
    let mut note = None;
    if let Some(h) = witness {
        match check_with(shape, pre, h, c1, c2, post)? {
            Ok(()) => return Ok(RelVerdict::Valid(h.clone())),
            Err(e) => note = Some(e.to_string()),
        }
    }
    if !search {
        return Ok(RelVerdict::Unknown(
            note.unwrap_or_else(|| "no coupling given and search disabled".into()),
        ));
    }
    Ok(match B::search(shape, pre, c1, c2, post)? {
        Some(h) => RelVerdict::Valid(h),
        None => RelVerdict::Invalid,
    })
}

fn valid_with<B: Backend>(
    shape: TripleShape,
    pre: &Morphism<B>,
    h: Morphism<B>,
    c1: &Morphism<B>,
    c2: &Morphism<B>,
    post: &Morphism<B>,
) -> Result<Option<Morphism<B>>, TripleError> {
    Ok(match check_with(shape, pre, &h, c1, c2, post)? {
        Ok(()) => Some(h),
        Err(_) => None,
    })
}

/// Whether enlarging the joint part can only help.
fn up_closed(shape: TripleShape) -> bool {
    matches!(shape.cell(), Cell::Pred | Cell::State) && (shape.cell() == Cell::Pred) == shape.correct()
}

/// The relational coupling with nothing joint: everything in the tails.
pub fn rel_disjoint(c1: &Morphism<Rel>, c2: &Morphism<Rel>) -> Morphism<Rel> {
    let d = Dims::of(c1, c2);
    let rows = (0..d.n1 * d.n2)
        .map(|i| {
            let (x1, x2) = row_index(&d, i);
            c1.kernel
                .row(x1)
                .iter()
                .map(|(a, w)| (d.tail1() + a, *w))
                .chain(c2.kernel.row(x2).iter().map(|(b, w)| (d.tail2() + b, *w)))
                .collect()
        })
        .collect();
    wrap(c1, c2, Kernel::from_rows(rows, d.width()))
}

impl Couple for Rel {
    /// Any joint part below the product of the supports is realisable and
    /// every shape is monotone in the joint part, so an extreme decides.
    fn search(
        shape: TripleShape,
        pre: &Morphism<Rel>,
        c1: &Morphism<Rel>,
        c2: &Morphism<Rel>,
        post: &Morphism<Rel>,
    ) -> Result<Option<Morphism<Rel>>, TripleError> {
        let h = if up_closed(shape) { independent(c1, c2) } else { rel_disjoint(c1, c2) };
        valid_with(shape, pre, h, c1, c2, post)
    }
}

impl Couple for Par {
    /// Partial functions have exactly one coupling.
    fn search(
        shape: TripleShape,
        pre: &Morphism<Par>,
        c1: &Morphism<Par>,
        c2: &Morphism<Par>,
        post: &Morphism<Par>,
    ) -> Result<Option<Morphism<Par>>, TripleError> {
        valid_with(shape, pre, independent(c1, c2), c1, c2, post)
    }
}

/// Exhaustive search over all relational couplings, for small instances.
/// Returns `None` when the instance is too large.
pub fn rel_exhaustive(
    shape: TripleShape,
    pre: &Morphism<Rel>,
    c1: &Morphism<Rel>,
    c2: &Morphism<Rel>,
    post: &Morphism<Rel>,
    max_bits: usize,
) -> Result<Option<bool>, TripleError> {
    let d = Dims::of(c1, c2);
    // per row: the candidate joint pairs
    let pairs: Vec<Vec<usize>> = (0..d.n1 * d.n2)
        .map(|i| {
            let (x1, x2) = row_index(&d, i);
            let mut v = Vec::new();
            for (a, _) in c1.kernel.row(x1) {
                for (b, _) in c2.kernel.row(x2) {
                    v.push(a * d.m2 + b);
                }
            }
            v
        })
        .collect();
    let bits: usize = pairs.iter().map(Vec::len).sum();
    if bits > max_bits {
        return Ok(None);
    }
    let tails = rel_disjoint(c1, c2);
    for mask in 0u64..(1u64 << bits) {
        let mut k = 0;
        let rows = pairs
            .iter()
            .enumerate()
            .map(|(i, ps)| {
                let mut r: Row<Boolean> = tails.kernel.row(i).to_vec();
                for &c in ps {
                    if mask >> k & 1 == 1 {
                        r.push((c, Boolean(true)));
                    }
                    k += 1;
                }
                r
            })
            .collect();
        let h = wrap(c1, c2, Kernel::from_rows(rows, d.width()));
        if check_with(shape, pre, &h, c1, c2, post)?.is_ok() {
            return Ok(Some(true));
        }
    }
    Ok(Some(false))
}

/// Variables of one row of a probabilistic coupling.
struct RowVars {
    row: usize,
    joint: Vec<(usize, usize, usize)>,
    tail1: Vec<(usize, usize)>,
    tail2: Vec<(usize, usize)>,
}

fn add_row<S: Field>(
    lp: &mut Lp<S>,
    next: &mut usize,
    row: usize,
    mu: &[(usize, S)],
    nu: &[(usize, S)],
    allowed: impl Fn(usize, usize) -> bool,
) -> RowVars {
    let mut take = || {
        *next += 1;
        *next - 1
    };
    let mut rv = RowVars {
        row,
        joint: Vec::new(),
        tail1: Vec::new(),
        tail2: Vec::new(),
    };
    for (a, _) in mu {
        for (b, _) in nu {
            if allowed(*a, *b) {
                rv.joint.push((*a, *b, take()));
            }
        }
    }
    rv.tail1 = mu.iter().map(|(a, _)| (*a, take())).collect();
    rv.tail2 = nu.iter().map(|(b, _)| (*b, take())).collect();
    for (a, w) in mu {
        let mut r: Vec<(usize, S)> = rv.joint.iter().filter(|j| j.0 == *a).map(|j| (j.2, S::one())).collect();
        r.extend(rv.tail1.iter().filter(|t| t.0 == *a).map(|t| (t.1, S::one())));
        lp.eq(r, w.clone());
    }
    for (b, w) in nu {
        let mut r: Vec<(usize, S)> = rv.joint.iter().filter(|j| j.1 == *b).map(|j| (j.2, S::one())).collect();
        r.extend(rv.tail2.iter().filter(|t| t.0 == *b).map(|t| (t.1, S::one())));
        lp.eq(r, w.clone());
    }
    let all: Vec<(usize, S)> = rv
        .joint
        .iter()
        .map(|j| j.2)
        .chain(rv.tail1.iter().map(|t| t.1))
        .chain(rv.tail2.iter().map(|t| t.1))
        .map(|v| (v, S::one()))
        .collect();
    lp.le(all, S::one());
    rv
}

fn read_row<S: Field>(rv: &RowVars, x: &[S], d: &Dims) -> Row<S> {
    let mut acc = RowAcc::new();
    for (a, b, v) in &rv.joint {
        acc.add(a * d.m2 + b, x[*v].clone());
    }
    for (a, v) in &rv.tail1 {
        acc.add(d.tail1() + a, x[*v].clone());
    }
    for (b, v) in &rv.tail2 {
        acc.add(d.tail2() + b, x[*v].clone());
    }
    acc.finish()
}

impl<S: Field> Couple for Stoch<S> {
    /// Linear feasibility: per row for predicate shapes, one global system
    /// for state shapes.
    fn search(
        shape: TripleShape,
        pre: &Morphism<Self>,
        c1: &Morphism<Self>,
        c2: &Morphism<Self>,
        post: &Morphism<Self>,
    ) -> Result<Option<Morphism<Self>>, TripleError> {
        let d = Dims::of(c1, c2);
        let p = d.n1 * d.n2;
        let mut rows: Vec<Row<S>> = (0..p)
            .map(|i| {
                let (x1, x2) = row_index(&d, i);
                <Self as Logic>::independent(c1.kernel.row(x1), c2.kernel.row(x2), d.m1, d.m2)
            })
            .collect();
        let correct = shape.correct();
        match shape.cell() {
            Cell::State => {
                if pre.cod_size() != p || post.cod_size() != d.joint() {
                    return Err(TripleError::Ill("state conditions do not match the programs".into()));
                }
                let s = pre.kernel.dense_row(0);
                let t = post.kernel.dense_row(0);
                let mut lp = Lp::new(0);
                let mut next = 0;
                let mut vars = Vec::new();
                for (i, si) in s.iter().enumerate() {
                    if si.is_zero() {
                        continue;
                    }
                    let (x1, x2) = row_index(&d, i);
                    vars.push(add_row(&mut lp, &mut next, i, c1.kernel.row(x1), c2.kernel.row(x2), |_, _| true));
                }
                lp.vars = next;
                for (y, ty) in t.iter().enumerate() {
                    let lin: Vec<(usize, S)> = vars
                        .iter()
                        .flat_map(|rv| {
                            let si = s[rv.row].clone();
                            rv.joint
                                .iter()
                                .filter(move |j| j.0 * d.m2 + j.1 == y)
                                .map(move |j| (j.2, si.clone()))
                        })
                        .collect();
                    if correct {
                        lp.le(lin, ty.clone());
                    } else {
                        lp.ge(lin, ty.clone());
                    }
                }
                let Some(x) = lp.solve() else { return Ok(None) };
                for rv in &vars {
                    rows[rv.row] = read_row(rv, &x, &d);
                }
            }
            Cell::Pred | Cell::Assert => {
                if pre.dom.size() != p || post.dom.size() != d.joint() {
                    return Err(TripleError::Ill("predicates do not match the programs".into()));
                }
                let q: Vec<S> = (0..d.joint()).map(|y| post.kernel.get(y, 0)).collect();
                for (i, row) in rows.iter_mut().enumerate() {
                    let px = pre.kernel.get(i, 0);
                    let (x1, x2) = row_index(&d, i);
                    let mut lp = Lp::new(0);
                    let mut next = 0;
                    let cell = shape.cell();
                    let rv = add_row(&mut lp, &mut next, i, c1.kernel.row(x1), c2.kernel.row(x2), |a, b| {
                        let qy = &q[a * d.m2 + b];
                        match (cell, correct) {
                            (Cell::Assert, true) => px <= *qy,
                            (Cell::Assert, false) => *qy <= px,
                            _ => true,
                        }
                    });
                    lp.vars = next;
                    if cell == Cell::Pred {
                        let lin: Vec<(usize, S)> = rv.joint.iter().map(|j| (j.2, q[j.0 * d.m2 + j.1].clone())).collect();
                        if correct {
                            lp.ge(lin, px.clone());
                        } else {
                            lp.le(lin, px.clone());
                        }
                    }
                    let Some(x) = lp.solve() else { return Ok(None) };
                    *row = read_row(&rv, &x, &d);
                }
            }
        }
        let h = wrap(c1, c2, Kernel::from_rows(rows, d.width()));
        debug_assert!(is_coupling(&h, c1, c2).is_ok());
        valid_with(shape, pre, h, c1, c2, post)
    }
}

/// A relational triple over two state spaces; conditions live on the
/// concatenated state.
#[derive(Clone, Debug)]
pub struct RelTriple {
    pub shape: TripleShape,
    pub left: StateSpace,
    pub right: StateSpace,
    pub pre: Cond,
    pub c: Command,
    pub d: Command,
    pub post: Cond,
}

/// Denotations of a relational triple's parts.
pub struct RelParts<B: Backend> {
    pub pre: Morphism<B>,
    pub c: Morphism<B>,
    pub d: Morphism<B>,
    pub post: Morphism<B>,
}

impl RelTriple {
    pub fn joint(&self) -> StateSpace {
        StateSpace::new(self.left.ctx.concat(&self.right.ctx))
    }

    pub fn parts<B: Backend>(&self, model: &Model) -> Result<RelParts<B>, TripleError> {
        if !self.shape.relational() {
            return Err(TripleError::Ill(format!("{} is not a relational shape", self.shape)));
        }
        let want_state = self.shape.cell() == Cell::State;
        for c in [&self.pre, &self.post] {
            if matches!(c, Cond::State(_)) != want_state {
                return Err(TripleError::Ill(format!(
                    "{} expects {} conditions",
                    self.shape,
                    if want_state { "state" } else { "predicate" }
                )));
            }
        }
        let j = self.joint();
        Ok(RelParts {
            pre: cond_m(&j, &self.pre, model)?,
            c: cmd_m(&self.left, &self.c, model)?,
            d: cmd_m(&self.right, &self.d, model)?,
            post: cond_m(&j, &self.post, model)?,
        })
    }

    pub fn check<B: Couple>(&self, model: &Model, witness: Option<&Morphism<B>>, search: bool) -> Result<RelVerdict<B>, TripleError> {
        let p = self.parts::<B>(model)?;
        check_rel(self.shape, &p.pre, &p.c, &p.d, &p.post, witness, search)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::{ratio, Carrier};
    use num_rational::BigRational;

    type S = Stoch<BigRational>;

    fn bool_obj() -> Obj {
        Obj::base(Carrier::new("Bool", &["0", "1"]))
    }

    fn coin() -> Morphism<S> {
        let x = bool_obj();
        Morphism::new(x.clone(), vec![x], Kernel::from_dense(vec![vec![ratio(1, 2), ratio(1, 2)]; 2], 2)).unwrap()
    }

    fn eq_pred() -> Morphism<S> {
        let x = bool_obj();
        let rows = (0..4)
            .map(|i| if i == 0 || i == 3 { vec![(0, ratio(1, 1))] } else { vec![] })
            .collect();
        Morphism::new(x.tensor(&x), vec![Obj::unit()], Kernel::from_rows(rows, 1)).unwrap()
    }

    #[test]
    fn coins_can_be_coupled_to_agree() {
        let c = coin();
        let p = eq_pred();
        let out = check_rel(TripleShape::RelPredCorrect, &p, &c, &c, &p, None, true).unwrap();
        let RelVerdict::Valid(h) = out else { panic!("expected a coupling") };
        assert!(is_coupling(&h, &c, &c).is_ok());
        // the independent coupling does not witness it
        let ind = independent(&c, &c);
        assert!(check_with(TripleShape::RelPredCorrect, &p, &ind, &c, &c, &p).unwrap().is_err());
    }

    #[test]
    fn independent_and_disjoint_are_couplings() {
        let x = bool_obj();
        let r = Morphism::<Rel>::new(
            x.clone(),
            vec![x.clone()],
            Kernel::from_rows(vec![vec![(0, Boolean(true)), (1, Boolean(true))], vec![]], 2),
        )
        .unwrap();
        assert!(is_coupling(&independent(&r, &r), &r, &r).is_ok());
        assert!(is_coupling(&rel_disjoint(&r, &r), &r, &r).is_ok());
        let s = swap(&independent(&r, &r), &x, &x);
        assert!(is_coupling(&s, &r, &r).is_ok());
    }

    #[test]
    fn lockstep_loop_is_a_coupling() {
        let x = bool_obj();
        // guard: continue on 0; body: coin
        let b = Morphism::<S>::new(
            x.clone(),
            vec![Obj::unit(), Obj::unit()],
            Kernel::function(&[0, 1], 2),
        )
        .unwrap();
        let c = coin();
        let g = independent(&c, &c);
        let h = while_independent(&b, &b, &c, &c, &g);
        // while x = 0 do coin: always ends at 1
        let lp = Morphism::<S>::new(x.clone(), vec![x.clone()], Kernel::function(&[1, 1], 2)).unwrap();
        assert!(is_coupling(&h, &lp, &lp).is_ok(), "{}", h);
    }
}

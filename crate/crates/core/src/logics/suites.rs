//! Checks that work on random tables directly rather than on terms: the
//! trace against Kleene iteration, the coupling constructors, and two
//! exhaustive checks over tiny carriers.

use std::time::Instant;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::backends::{is_total, Backend, BackendId, Boolean, Carrier, Field, Kernel, Morphism, Obj, RowAcc, Weight};
use crate::models::{Par, Rel, Stoch};

use super::coupling::{
    coupling_cod, ifelse4, ifelse_agree, independent, is_coupling, product, project, seq, swap, while_independent,
    while_lockstep,
};
use super::ops::{Logic, RowProps};
use super::rules::Rg;
use super::sem::{pred_from, state_from};
use super::triple::{check_unary, TripleShape};

#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteReport {
    pub check: String,
    pub backend: String,
    pub checked: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
    pub millis: u128,
}

impl SuiteReport {
    fn new<B: Backend>(check: &str) -> Self {
        SuiteReport {
            check: check.into(),
            backend: B::ID.to_string(),
            ..Default::default()
        }
    }

    fn record(&mut self, r: Result<(), String>) {
        self.checked += 1;
        if let Err(e) = r {
            self.failures += 1;
            self.first_failure.get_or_insert(e);
        }
    }

    pub fn passed(&self, wanted: usize) -> bool {
        self.failures == 0 && self.checked >= wanted
    }
}

fn obj(name: &str, n: usize) -> Obj {
    Obj::base(Carrier::range(name, n))
}

fn random_m<B: Logic>(rng: &mut Rg, x: &Obj, y: &Obj, props: RowProps) -> Morphism<B> {
    let rows = (0..x.size()).map(|_| B::random_row(rng, y.size(), props)).collect();
    Morphism::raw(x.clone(), vec![y.clone()], Kernel::from_rows(rows, y.size()))
}

fn random_guard<B: Logic>(rng: &mut Rg, x: &Obj, props: RowProps) -> Morphism<B> {
    let rows = (0..x.size()).map(|_| B::random_row(rng, 2, props)).collect();
    Morphism::raw(x.clone(), vec![Obj::unit(), Obj::unit()], Kernel::from_rows(rows, 2))
}

/// A random coupling of `c1` and `c2`, row by row.
fn random_coupling<B: Logic>(rng: &mut Rg, c1: &Morphism<B>, c2: &Morphism<B>) -> Morphism<B> {
    let (n2, m1, m2) = (c2.dom.size(), c1.cod_size(), c2.cod_size());
    let rows = (0..c1.dom.size() * n2)
        .map(|i| B::random_coupling(rng, c1.kernel.row(i / n2), c2.kernel.row(i % n2), m1, m2))
        .collect();
    Morphism::raw(
        c1.dom.tensor(&c2.dom),
        coupling_cod(&c1.cod[0], &c2.cod[0]),
        Kernel::from_rows(rows, m1 * m2 + m1 + m2),
    )
}

/// `if b then t else e` on tables.
fn branch<B: Backend>(b: &Morphism<B>, t: &Morphism<B>, e: &Morphism<B>) -> Morphism<B> {
    let rows = (0..b.dom.size())
        .map(|x| {
            let mut acc = RowAcc::new();
            for (k, w) in b.kernel.row(x) {
                acc.add_scaled([t, e][*k].kernel.row(x), w);
            }
            acc.finish()
        })
        .collect();
    Morphism::raw(t.dom.clone(), t.cod.clone(), Kernel::from_rows(rows, t.cod_size()))
}

/// `while b do c` on tables.
fn looped<B: Backend>(b: &Morphism<B>, c: &Morphism<B>) -> Morphism<B> {
    let n = c.dom.size();
    let rows = (0..n)
        .map(|x| {
            let mut acc = RowAcc::new();
            for (k, w) in b.kernel.row(x) {
                if *k == 0 {
                    acc.add_scaled(c.kernel.row(x), w);
                } else {
                    acc.add(n + x, w.clone());
                }
            }
            acc.finish()
        })
        .collect();
    let out = B::fix(&Kernel::from_rows(rows, 2 * n), n);
    Morphism::raw(c.dom.clone(), c.cod.clone(), out)
}

// trace oracle

/// How a backend's exact trace is compared with its truncations.
pub trait Trace: Logic {
    /// Makes a loop row acceptable for the oracle; the first `n` columns loop.
    fn tame(row: Vec<(usize, Self::W)>, n: usize) -> Vec<(usize, Self::W)>;

    /// Accepts the exact trace against the truncation at the oracle depth.
    fn close(exact: &Kernel<Self::W>, approx: &Kernel<Self::W>) -> Result<(), String>;
}

fn exact_match<W: Weight>(exact: &Kernel<W>, approx: &Kernel<W>) -> Result<(), String> {
    match exact.first_violation(approx).or_else(|| approx.first_violation(exact)) {
        None => Ok(()),
        Some((i, j)) => Err(format!("trace and iteration differ at ({i}, {j})")),
    }
}

impl Trace for Rel {
    fn tame(row: Vec<(usize, Boolean)>, _: usize) -> Vec<(usize, Boolean)> {
        row
    }

    fn close(exact: &Kernel<Boolean>, approx: &Kernel<Boolean>) -> Result<(), String> {
        exact_match(exact, approx)
    }
}

impl Trace for Par {
    fn tame(row: Vec<(usize, Boolean)>, _: usize) -> Vec<(usize, Boolean)> {
        row
    }

    fn close(exact: &Kernel<Boolean>, approx: &Kernel<Boolean>) -> Result<(), String> {
        exact_match(exact, approx)
    }
}

/// Depth of the Kleene iteration.
pub const DEPTH: usize = 64;

/// Entrywise tolerance `2^-60` between the exact trace and the truncation.
pub fn tolerance() -> BigRational {
    BigRational::new(1.into(), (1u64 << 60).into())
}

impl<S: Field> Trace for Stoch<S> {
    /// Halves the looping mass, so that `L^k` has row sums at most `2^-k`.
    fn tame(row: Vec<(usize, S)>, n: usize) -> Vec<(usize, S)> {
        let half = S::one() / (S::one() + S::one());
        row.into_iter()
            .map(|(c, w)| if c < n { (c, w * half.clone()) } else { (c, w) })
            .collect()
    }

    fn close(exact: &Kernel<S>, approx: &Kernel<S>) -> Result<(), String> {
        let tol = S::from_ratio(&tolerance());
        for i in 0..exact.n_rows() {
            for j in 0..exact.n_cols() {
                let (e, a) = (exact.get(i, j), approx.get(i, j));
                if a > e {
                    return Err(format!("truncation exceeds the trace at ({i}, {j})"));
                }
                if e - a > tol {
                    return Err(format!("truncation is more than 2^-60 below the trace at ({i}, {j})"));
                }
            }
        }
        Ok(())
    }
}

/// `t₀ = 0`, `tₖ₊₁ = E + L tₖ`, returning every iterate.
pub fn kleene<W: Weight>(body: &Kernel<W>, n: usize, depth: usize) -> Vec<Kernel<W>> {
    let l = body.col_range(0, n);
    let e = body.col_range(n, body.n_cols());
    let mut ts = vec![Kernel::zero(n, e.n_cols())];
    for _ in 0..depth {
        let next = e.plus(&l.then(ts.last().expect("nonempty")));
        ts.push(next);
    }
    ts
}

pub fn trace_oracle<B: Trace>(seed: u64, instances: usize) -> SuiteReport {
    let start = Instant::now();
    let mut rep = SuiteReport::new::<B>("trace.kleene");
    let mut rng = Rg::seed_from_u64(seed);
    for _ in 0..instances {
        let n = rng.gen_range(1..=9);
        let m = rng.gen_range(1..=3);
        let rows = (0..n).map(|_| B::tame(B::random_row(&mut rng, n + m, RowProps::ANY), n)).collect();
        let body = Kernel::from_rows(rows, n + m);
        let fix = B::fix(&body, n);
        let ts = kleene(&body, n, DEPTH);
        let r = ts
            .iter()
            .enumerate()
            .find_map(|(k, t)| t.first_violation(&fix).map(|(i, j)| format!("iterate {k} exceeds the trace at ({i}, {j})")))
            .map_or_else(|| B::close(&fix, ts.last().expect("nonempty")), Err);
        rep.record(r);
    }
    rep.millis = start.elapsed().as_millis();
    rep
}

// couplings

/// Marginals of every row recomputed by summing over the other side.
fn summed<B: Backend>(h: &Morphism<B>, c1: &Morphism<B>, c2: &Morphism<B>) -> Result<(), String> {
    let (n2, m1, m2) = (c2.dom.size(), c1.cod_size(), c2.cod_size());
    for i in 0..h.dom.size() {
        let row = h.kernel.dense_row(i);
        for y1 in 0..m1 {
            let s = (0..m2).fold(row[m1 * m2 + y1].clone(), |s, y2| s + row[y1 * m2 + y2].clone());
            if s != c1.kernel.get(i / n2, y1) {
                return Err(format!("left marginal of row {i} is {s} at {y1}"));
            }
        }
        for y2 in 0..m2 {
            let s = (0..m1).fold(row[m1 * m2 + m1 + y2].clone(), |s, y1| s + row[y1 * m2 + y2].clone());
            if s != c2.kernel.get(i % n2, y2) {
                return Err(format!("right marginal of row {i} is {s} at {y2}"));
            }
        }
        let joint = project(h).kernel.row_mass(i);
        if joint > c1.kernel.row_mass(i / n2) || joint > c2.kernel.row_mass(i % n2) {
            return Err(format!("joint mass of row {i} exceeds a marginal"));
        }
    }
    Ok(())
}

fn couples<B: Backend>(h: &Morphism<B>, c1: &Morphism<B>, c2: &Morphism<B>) -> Result<(), String> {
    is_coupling(h, c1, c2)?;
    summed(h, c1, c2)
}

struct Sizes {
    x1: Obj,
    x2: Obj,
    y1: Obj,
    y2: Obj,
}

fn sizes(rng: &mut Rg, max: usize) -> Sizes {
    let mut pick = |name: &str| obj(name, rng.gen_range(1..=max));
    Sizes {
        x1: pick("x1"),
        x2: pick("x2"),
        y1: pick("y1"),
        y2: pick("y2"),
    }
}

type Case = fn(&mut Rg, usize) -> Result<(), String>;

fn case_independent<B: Logic>(rng: &mut Rg, max: usize) -> Result<(), String> {
    let s = sizes(rng, max);
    let c1 = random_m::<B>(rng, &s.x1, &s.y1, RowProps::ANY);
    let c2 = random_m::<B>(rng, &s.x2, &s.y2, RowProps::ANY);
    couples(&independent(&c1, &c2), &c1, &c2)
}

fn case_random<B: Logic>(rng: &mut Rg, max: usize) -> Result<(), String> {
    let s = sizes(rng, max);
    let c1 = random_m::<B>(rng, &s.x1, &s.y1, RowProps::ANY);
    let c2 = random_m::<B>(rng, &s.x2, &s.y2, RowProps::ANY);
    couples(&random_coupling(rng, &c1, &c2), &c1, &c2)
}

fn case_product<B: Logic>(rng: &mut Rg, max: usize) -> Result<(), String> {
    let s = sizes(rng, max);
    let c1 = random_m::<B>(rng, &s.x1, &s.y1, RowProps::TOTAL);
    let c2 = random_m::<B>(rng, &s.x2, &s.y2, RowProps::TOTAL);
    couples(&product(&c1, &c2), &c1, &c2)
}

fn case_seq<B: Logic>(rng: &mut Rg, max: usize) -> Result<(), String> {
    let s = sizes(rng, max);
    let (z1, z2) = (obj("z1", rng.gen_range(1..=max)), obj("z2", rng.gen_range(1..=max)));
    let c1 = random_m::<B>(rng, &s.x1, &s.y1, RowProps::ANY);
    let c2 = random_m::<B>(rng, &s.x2, &s.y2, RowProps::ANY);
    let d1 = random_m::<B>(rng, &s.y1, &z1, RowProps::ANY);
    let d2 = random_m::<B>(rng, &s.y2, &z2, RowProps::ANY);
    let g = random_coupling(rng, &c1, &c2);
    let h = random_coupling(rng, &d1, &d2);
    let k = seq(&g, &h, &d1, &d2).map_err(|e| e.to_string())?;
    let (f1, f2) = (c1.then(&d1).map_err(|e| e.to_string())?, c2.then(&d2).map_err(|e| e.to_string())?);
    couples(&k, &f1, &f2)
}

fn case_swap<B: Logic>(rng: &mut Rg, max: usize) -> Result<(), String> {
    let s = sizes(rng, max);
    let c1 = random_m::<B>(rng, &s.x1, &s.y1, RowProps::ANY);
    let c2 = random_m::<B>(rng, &s.x2, &s.y2, RowProps::ANY);
    let h = random_coupling(rng, &c1, &c2);
    let sw = swap(&h, &s.x1, &s.x2);
    couples(&sw, &c2, &c1)?;
    if swap(&sw, &s.x2, &s.x1).kernel != h.kernel {
        return Err("swapping twice changed the coupling".into());
    }
    Ok(())
}

fn case_ifelse4<B: Logic>(rng: &mut Rg, max: usize) -> Result<(), String> {
    let s = sizes(rng, max);
    let b1 = random_guard::<B>(rng, &s.x1, RowProps::TOTAL);
    let b2 = random_guard::<B>(rng, &s.x2, RowProps::TOTAL);
    let (t1, e1) = (random_m::<B>(rng, &s.x1, &s.y1, RowProps::ANY), random_m::<B>(rng, &s.x1, &s.y1, RowProps::ANY));
    let (t2, e2) = (random_m::<B>(rng, &s.x2, &s.y2, RowProps::ANY), random_m::<B>(rng, &s.x2, &s.y2, RowProps::ANY));
    let hs = [
        random_coupling(rng, &t1, &t2),
        random_coupling(rng, &t1, &e2),
        random_coupling(rng, &e1, &t2),
        random_coupling(rng, &e1, &e2),
    ];
    let h = ifelse4(&b1, &b2, [&hs[0], &hs[1], &hs[2], &hs[3]]);
    couples(&h, &branch(&b1, &t1, &e1), &branch(&b2, &t2, &e2))
}

fn case_ifelse_agree<B: Logic>(rng: &mut Rg, max: usize) -> Result<(), String> {
    let s = sizes(rng, max);
    let b1 = random_guard::<B>(rng, &s.x1, RowProps::FUNCTION);
    let b2 = random_guard::<B>(rng, &s.x2, RowProps::FUNCTION);
    let (t1, e1) = (random_m::<B>(rng, &s.x1, &s.y1, RowProps::ANY), random_m::<B>(rng, &s.x1, &s.y1, RowProps::ANY));
    let (t2, e2) = (random_m::<B>(rng, &s.x2, &s.y2, RowProps::ANY), random_m::<B>(rng, &s.x2, &s.y2, RowProps::ANY));
    let g = random_coupling(rng, &t1, &t2);
    let h = random_coupling(rng, &e1, &e2);
    let (f1, f2) = (branch(&b1, &t1, &e1), branch(&b2, &t2, &e2));
    couples(&ifelse_agree(&b1, &b2, &g, &h, &f1, &f2), &f1, &f2)
}

/// Whether no run of `while b do c` goes on forever: the graph of
/// continuing steps has no cycle.
fn no_infinite_run<B: Backend>(b: &Morphism<B>, c: &Morphism<B>) -> bool {
    let n = c.dom.size();
    let next = |x: usize| -> Vec<usize> {
        if b.kernel.row(x).iter().any(|(k, _)| *k == 0) {
            c.kernel.row(x).iter().map(|(y, _)| *y).collect()
        } else {
            vec![]
        }
    };
    // 0 unseen, 1 on the stack, 2 done
    fn visit(x: usize, mark: &mut [u8], next: &dyn Fn(usize) -> Vec<usize>) -> bool {
        mark[x] = 1;
        for y in next(x) {
            if mark[y] == 1 || (mark[y] == 0 && !visit(y, mark, next)) {
                return false;
            }
        }
        mark[x] = 2;
        true
    }
    let mut mark = vec![0u8; n];
    (0..n).all(|x| mark[x] == 2 || visit(x, &mut mark, &next))
}

/// Guards and bodies of two loops that terminate from every state, and in
/// relations along every run. Without this the lockstep constructions are
/// not couplings: a left loop that runs forever while the right one has
/// exited swallows the right exit.
fn loop_parts<B: Logic>(rng: &mut Rg, max: usize) -> (Obj, Obj, Morphism<B>, Morphism<B>, Morphism<B>, Morphism<B>) {
    let (x1, x2) = (obj("x1", rng.gen_range(1..=max)), obj("x2", rng.gen_range(1..=max)));
    let mut side = |x: &Obj| loop {
        let b = random_guard::<B>(rng, x, RowProps::TOTAL);
        let c = random_m::<B>(rng, x, x, RowProps::TOTAL);
        if is_total(&looped(&b, &c)) && (B::ID != BackendId::Rel || no_infinite_run(&b, &c)) {
            return (b, c);
        }
    };
    let (b1, c1) = side(&x1);
    let (b2, c2) = side(&x2);
    (x1, x2, b1, b2, c1, c2)
}

fn case_while_lockstep<B: Logic>(rng: &mut Rg, max: usize) -> Result<(), String> {
    let (x1, x2, b1, b2, c1, c2) = loop_parts::<B>(rng, max);
    let g = random_coupling(rng, &c1, &c2);
    let h1 = random_coupling(rng, &c1, &Morphism::identity(&x2));
    let h2 = random_coupling(rng, &Morphism::identity(&x1), &c2);
    let h = while_lockstep(&b1, &b2, &c1, &c2, &g, &h1, &h2);
    couples(&h, &looped(&b1, &c1), &looped(&b2, &c2))
}

fn case_while_independent<B: Logic>(rng: &mut Rg, max: usize) -> Result<(), String> {
    let (_, _, b1, b2, c1, c2) = loop_parts::<B>(rng, max);
    let g = random_coupling(rng, &c1, &c2);
    let h = while_independent(&b1, &b2, &c1, &c2, &g);
    couples(&h, &looped(&b1, &c1), &looped(&b2, &c2))
}

/// Standing order facts: `abort ≤ f` and `f ; ⊤ ≤ ⊤`.
fn case_hypotheses<B: Logic>(rng: &mut Rg, max: usize) -> Result<(), String> {
    let s = sizes(rng, max);
    let f = random_m::<B>(rng, &s.x1, &s.y1, RowProps::ANY);
    let zero = Morphism::<B>::zero(&s.x1, &f.cod);
    if !zero.leq(&f).map_err(|e| e.to_string())? {
        return Err("abort is not below a program".into());
    }
    let top = Morphism::<B>::discard(&s.y1);
    let lhs = f.then(&top).map_err(|e| e.to_string())?;
    if !lhs.leq(&Morphism::discard(&s.x1)).map_err(|e| e.to_string())? {
        return Err("f ; discard is not below discard".into());
    }
    Ok(())
}

fn coupling_cases<B: Logic>() -> Vec<(&'static str, Case)> {
    vec![
        ("coupling.independent", case_independent::<B>),
        ("coupling.random", case_random::<B>),
        ("coupling.product", case_product::<B>),
        ("coupling.seq", case_seq::<B>),
        ("coupling.swap", case_swap::<B>),
        ("coupling.ifelse4", case_ifelse4::<B>),
        ("coupling.ifelse-agree", case_ifelse_agree::<B>),
        ("coupling.while-lockstep", case_while_lockstep::<B>),
        ("coupling.while-independent", case_while_independent::<B>),
        ("order.hypotheses", case_hypotheses::<B>),
    ]
}

/// Every coupling constructor on random programs with carriers up to `max`.
pub fn coupling_suite<B: Logic>(seed: u64, instances: usize, max: usize) -> Vec<SuiteReport> {
    coupling_cases::<B>()
        .into_iter()
        .map(|(name, case)| {
            let start = Instant::now();
            let mut rep = SuiteReport::new::<B>(name);
            let mut rng = Rg::seed_from_u64(seed ^ name.len() as u64);
            for _ in 0..instances {
                rep.record(case(&mut rng, max));
            }
            rep.millis = start.elapsed().as_millis();
            rep
        })
        .collect()
}

// exhaustive checks

/// All partial-function rows with `cols` columns.
fn par_rows(cols: usize) -> Vec<Vec<(usize, Boolean)>> {
    std::iter::once(vec![]).chain((0..cols).map(|c| vec![(c, Boolean(true))])).collect()
}

/// In partial functions, a coupling with no tail mass is the product
/// coupling `(f ⊗ g) ; ι₁`. Coupling conditions are row by row, so every
/// pair of one-row programs and every one-row candidate covers all
/// programs with outputs up to `max`.
pub fn par_strong_couplings(max: usize) -> SuiteReport {
    let start = Instant::now();
    let mut rep = SuiteReport::new::<Par>("par.strong-is-product");
    let one = obj("one", 1);
    for m1 in 1..=max {
        for m2 in 1..=max {
            let (y1, y2) = (obj("y1", m1), obj("y2", m2));
            let width = m1 * m2 + m1 + m2;
            for a in par_rows(m1) {
                for b in par_rows(m2) {
                    let f = Morphism::<Par>::raw(one.clone(), vec![y1.clone()], Kernel::from_rows(vec![a.clone()], m1));
                    let g = Morphism::<Par>::raw(one.clone(), vec![y2.clone()], Kernel::from_rows(vec![b.clone()], m2));
                    let prod = product(&f, &g);
                    for h in par_rows(width) {
                        let strong = h.iter().all(|(c, _)| *c < m1 * m2);
                        let h = Morphism::<Par>::raw(prod.dom.clone(), prod.cod.clone(), Kernel::from_rows(vec![h], width));
                        if !strong || is_coupling(&h, &f, &g).is_err() {
                            continue;
                        }
                        rep.record(if h.kernel == prod.kernel {
                            Ok(())
                        } else {
                            Err(format!("strong coupling {:?} of {:?} and {:?} is not the product", h.kernel.row(0), a, b))
                        });
                    }
                }
            }
        }
    }
    rep.millis = start.elapsed().as_millis();
    rep
}

/// In relations, `assert p ; c ≤ c ; assert q` exactly when the transposed
/// predicates give the state triple `p° ; c ≤ q°`, for every predicate pair
/// and relation on carriers up to `max`.
pub fn rel_transposition(max: usize) -> SuiteReport {
    let start = Instant::now();
    let mut rep = SuiteReport::new::<Rel>("rel.assert-iff-state");
    for n in 1..=max {
        let x = obj("x", n);
        let subsets: Vec<Vec<Boolean>> = (0..1usize << n).map(|s| (0..n).map(|i| Boolean(s >> i & 1 == 1)).collect()).collect();
        for bits in 0..1usize << (n * n) {
            let rows = (0..n)
                .map(|i| (0..n).filter(|j| bits >> (i * n + j) & 1 == 1).map(|j| (j, Boolean(true))).collect())
                .collect();
            let c = Morphism::<Rel>::raw(x.clone(), vec![x.clone()], Kernel::from_rows(rows, n));
            for p in &subsets {
                for q in &subsets {
                    let verdict = |shape, pre: Morphism<Rel>, post: Morphism<Rel>| {
                        check_unary(shape, &pre, &c, &post).map(|v| v.is_none()).map_err(|e| e.to_string())
                    };
                    let r = verdict(TripleShape::AssertCorrect, pred_from(&x, p), pred_from(&x, q)).and_then(|a| {
                        let s = verdict(TripleShape::StateCorrect, state_from(&x, p), state_from(&x, q))?;
                        if a == s {
                            Ok(())
                        } else {
                            Err(format!("assert form says {a}, state form says {s} for p={p:?} c={:?} q={q:?}", c.kernel))
                        }
                    });
                    rep.record(r);
                }
            }
        }
    }
    rep.millis = start.elapsed().as_millis();
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    #[test]
    fn kleene_iterates_increase() {
        let body = Kernel::from_rows(vec![vec![(0, Boolean(true)), (1, Boolean(true))]], 2);
        let ts = kleene(&body, 1, 3);
        assert!(ts[0].is_zero());
        assert_eq!(ts[1], ts[3]);
    }

    #[test]
    fn trace_oracle_small() {
        assert!(trace_oracle::<Rel>(1, 20).passed(20));
        assert!(trace_oracle::<Par>(1, 20).passed(20));
        assert!(trace_oracle::<Stoch<BigRational>>(1, 20).passed(20));
    }

    #[test]
    fn couplings_small() {
        for r in coupling_suite::<Rel>(2, 20, 3)
            .into_iter()
            .chain(coupling_suite::<Par>(2, 20, 3))
            .chain(coupling_suite::<Stoch<BigRational>>(2, 20, 3))
        {
            assert!(r.passed(20), "{r:?}");
        }
    }

    #[test]
    fn lockstep_needs_terminating_loops() {
        let x = obj("x", 1);
        let id = Morphism::<Rel>::identity(&x);
        let stay = Morphism::<Rel>::raw(x.clone(), vec![Obj::unit(), Obj::unit()], Kernel::function(&[0], 2));
        let leave = Morphism::<Rel>::raw(x.clone(), vec![Obj::unit(), Obj::unit()], Kernel::function(&[1], 2));
        // every coupling of id with id is the diagonal here
        let g = independent(&id, &id);
        let h = while_lockstep(&stay, &leave, &id, &id, &g, &g, &g);
        assert!(is_coupling(&h, &looped(&stay, &id), &looped(&leave, &id)).is_err());
    }

    #[test]
    fn exhaustive_small() {
        let p = par_strong_couplings(2);
        assert!(p.passed(1), "{p:?}");
        let r = rel_transposition(2);
        assert!(r.passed(1), "{r:?}");
    }

    #[test]
    fn tolerance_is_two_to_the_minus_sixty() {
        let t = tolerance() * BigRational::from_integer((1u64 << 60).into());
        assert!(t.is_one());
        assert!(!tolerance().is_zero());
    }
}


//! Backend-specific operations the logics need beyond the semantic contract:
//! random tables, order perturbations, coupling rows and table installation.

use num_rational::BigRational;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::backends::{ratio, Backend, Boolean, Field, Kernel, RowAcc};
use crate::kernel::Name;
use crate::models::{Model, ModelError, Par, Rel, Stoch};

/// Constraints on a randomly drawn row.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RowProps {
    pub total: bool,
    pub det: bool,
}

impl RowProps {
    pub const ANY: RowProps = RowProps { total: false, det: false };
    pub const TOTAL: RowProps = RowProps { total: true, det: false };
    pub const DET: RowProps = RowProps { total: false, det: true };
    pub const FUNCTION: RowProps = RowProps { total: true, det: true };
}

pub type Row<W> = Vec<(usize, W)>;

/// Denominator used for random probabilities.
pub const GRAIN: i64 = 4;

pub trait Logic: Backend {
    fn random_row<R: Rng>(rng: &mut R, cols: usize, props: RowProps) -> Row<Self::W>;

    /// A row below `row` in the backend order.
    fn below<R: Rng>(rng: &mut R, row: &[(usize, Self::W)]) -> Row<Self::W>;

    /// A row above `row` that still satisfies the row constraint.
    fn above<R: Rng>(rng: &mut R, row: &[(usize, Self::W)], cols: usize) -> Row<Self::W>;

    /// The independent coupling of two rows with `n1` and `n2` columns, laid
    /// out as `n1·n2` joint columns, then `n1` and `n2` tail columns.
    fn independent(a: &[(usize, Self::W)], b: &[(usize, Self::W)], n1: usize, n2: usize) -> Row<Self::W>;

    /// Splits a row over two blocks of `n` columns into a guard row and the
    /// two blocks rescaled to be unconditional.
    /// Some coupling of two rows, in the layout of [`Logic::independent`].
    fn random_coupling<R: Rng>(rng: &mut R, a: &[(usize, Self::W)], b: &[(usize, Self::W)], n1: usize, n2: usize) -> Row<Self::W>;

    fn split(row: &[(usize, Self::W)], n: usize) -> (Row<Self::W>, Row<Self::W>, Row<Self::W>);

    fn install(model: &mut Model, gen: &Name, k: Kernel<Self::W>) -> Result<(), ModelError>;
}

pub fn wmax<W: PartialOrd + Clone>(a: &W, b: &W) -> W {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn wmin<W: PartialOrd + Clone>(a: &W, b: &W) -> W {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

fn bool_row(cols: impl IntoIterator<Item = usize>) -> Row<Boolean> {
    let mut v: Vec<usize> = cols.into_iter().collect();
    v.sort_unstable();
    v.dedup();
    v.into_iter().map(|c| (c, Boolean(true))).collect()
}

fn bool_split(row: &[(usize, Boolean)], n: usize) -> (Row<Boolean>, Row<Boolean>, Row<Boolean>) {
    let first = bool_row(row.iter().filter(|(c, _)| *c < n).map(|(c, _)| *c));
    let second = bool_row(row.iter().filter(|(c, _)| *c >= n).map(|(c, _)| c - n));
    let mut guard = Vec::new();
    if !first.is_empty() {
        guard.push(0);
    }
    if !second.is_empty() {
        guard.push(1);
    }
    (bool_row(guard), first, second)
}

impl Logic for Rel {
    fn random_row<R: Rng>(rng: &mut R, cols: usize, props: RowProps) -> Row<Boolean> {
        if cols == 0 {
            return Vec::new();
        }
        if props.det {
            if props.total || rng.gen_bool(0.75) {
                return bool_row([rng.gen_range(0..cols)]);
            }
            return Vec::new();
        }
        let p = 1.0 / (cols as f64).max(2.0) + 0.15;
        let mut picked: Vec<usize> = (0..cols).filter(|_| rng.gen_bool(p.min(0.9))).collect();
        if props.total && picked.is_empty() {
            picked.push(rng.gen_range(0..cols));
        }
        bool_row(picked)
    }

    fn below<R: Rng>(rng: &mut R, row: &[(usize, Boolean)]) -> Row<Boolean> {
        bool_row(row.iter().filter(|_| rng.gen_bool(0.7)).map(|(c, _)| *c))
    }

    fn above<R: Rng>(rng: &mut R, row: &[(usize, Boolean)], cols: usize) -> Row<Boolean> {
        let extra = (0..cols).filter(|_| rng.gen_bool(0.25));
        bool_row(row.iter().map(|(c, _)| *c).chain(extra))
    }

    fn independent(a: &[(usize, Boolean)], b: &[(usize, Boolean)], n1: usize, n2: usize) -> Row<Boolean> {
        if a.is_empty() {
            return bool_row(b.iter().map(|(j, _)| n1 * n2 + n1 + j));
        }
        if b.is_empty() {
            return bool_row(a.iter().map(|(i, _)| n1 * n2 + i));
        }
        bool_row(a.iter().flat_map(|(i, _)| b.iter().map(move |(j, _)| i * n2 + j)))
    }

    fn random_coupling<R: Rng>(rng: &mut R, a: &[(usize, Boolean)], b: &[(usize, Boolean)], n1: usize, n2: usize) -> Row<Boolean> {
        let joint: Vec<(usize, usize)> = a
            .iter()
            .flat_map(|(i, _)| b.iter().map(move |(j, _)| (*i, *j)))
            .filter(|_| rng.gen_bool(0.5))
            .collect();
        // every element of a marginal missed by the joint part goes to its tail
        let tail1 = a
            .iter()
            .map(|(i, _)| *i)
            .filter(|i| !joint.iter().any(|(k, _)| k == i) || rng.gen_bool(0.3));
        let tail1: Vec<usize> = tail1.collect();
        let tail2: Vec<usize> = b
            .iter()
            .map(|(j, _)| *j)
            .filter(|j| !joint.iter().any(|(_, l)| l == j) || rng.gen_bool(0.3))
            .collect();
        bool_row(
            joint
                .iter()
                .map(|(i, j)| i * n2 + j)
                .chain(tail1.into_iter().map(|i| n1 * n2 + i))
                .chain(tail2.into_iter().map(|j| n1 * n2 + n1 + j)),
        )
    }

    fn split(row: &[(usize, Boolean)], n: usize) -> (Row<Boolean>, Row<Boolean>, Row<Boolean>) {
        bool_split(row, n)
    }

    fn install(model: &mut Model, gen: &Name, k: Kernel<Boolean>) -> Result<(), ModelError> {
        model.set_rel(gen, k)
    }
}

impl Logic for Par {
    fn random_row<R: Rng>(rng: &mut R, cols: usize, props: RowProps) -> Row<Boolean> {
        if cols == 0 || (!props.total && rng.gen_bool(0.25)) {
            return Vec::new();
        }
        bool_row([rng.gen_range(0..cols)])
    }

    fn below<R: Rng>(rng: &mut R, row: &[(usize, Boolean)]) -> Row<Boolean> {
        if rng.gen_bool(0.7) {
            row.to_vec()
        } else {
            Vec::new()
        }
    }

    fn above<R: Rng>(rng: &mut R, row: &[(usize, Boolean)], cols: usize) -> Row<Boolean> {
        if row.is_empty() && cols > 0 && rng.gen_bool(0.3) {
            return bool_row([rng.gen_range(0..cols)]);
        }
        row.to_vec()
    }

    fn independent(a: &[(usize, Boolean)], b: &[(usize, Boolean)], n1: usize, n2: usize) -> Row<Boolean> {
        <Rel as Logic>::independent(a, b, n1, n2)
    }

    /// Partial functions have exactly one coupling per pair of rows.
    fn random_coupling<R: Rng>(_rng: &mut R, a: &[(usize, Boolean)], b: &[(usize, Boolean)], n1: usize, n2: usize) -> Row<Boolean> {
        <Rel as Logic>::independent(a, b, n1, n2)
    }

    fn split(row: &[(usize, Boolean)], n: usize) -> (Row<Boolean>, Row<Boolean>, Row<Boolean>) {
        bool_split(row, n)
    }

    fn install(model: &mut Model, gen: &Name, k: Kernel<Boolean>) -> Result<(), ModelError> {
        model.set_par(gen, k)
    }
}

fn units<S: Field>(k: i64) -> S {
    S::from_ratio(&ratio(k, GRAIN))
}

fn mass<S: Field>(row: &[(usize, S)]) -> S {
    row.iter().fold(S::zero(), |m, (_, w)| m + w.clone())
}

fn scaled<S: Field>(row: &[(usize, S)], s: &S) -> Row<S> {
    row.iter()
        .map(|(c, w)| (*c, w.clone() * s.clone()))
        .filter(|(_, w)| !w.is_zero())
        .collect()
}

impl<S: Field> Logic for Stoch<S> {
    fn random_row<R: Rng>(rng: &mut R, cols: usize, props: RowProps) -> Row<S> {
        if cols == 0 {
            return Vec::new();
        }
        if props.det {
            if props.total || rng.gen_bool(0.75) {
                return vec![(rng.gen_range(0..cols), S::one())];
            }
            return Vec::new();
        }
        let budget = if props.total { GRAIN } else { rng.gen_range(0..=GRAIN) };
        let mut acc = vec![0i64; cols];
        for _ in 0..budget {
            acc[rng.gen_range(0..cols)] += 1;
        }
        acc.iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(c, &k)| (c, units::<S>(k)))
            .collect()
    }

    fn below<R: Rng>(rng: &mut R, row: &[(usize, S)]) -> Row<S> {
        row.iter()
            .map(|(c, w)| (*c, w.clone() * units::<S>(rng.gen_range(0..=GRAIN))))
            .filter(|(_, w)| !w.is_zero())
            .collect()
    }

    fn above<R: Rng>(rng: &mut R, row: &[(usize, S)], cols: usize) -> Row<S> {
        let room = S::one() - mass(row);
        if cols == 0 || room.is_zero() {
            return row.to_vec();
        }
        let extra = room * units::<S>(rng.gen_range(0..=GRAIN));
        let c = rng.gen_range(0..cols);
        let mut out: Vec<(usize, S)> = row.to_vec();
        match out.iter_mut().find(|(k, _)| *k == c) {
            Some((_, w)) => *w = w.clone() + extra,
            None => {
                out.push((c, extra));
                out.sort_by_key(|(k, _)| *k);
            }
        }
        out.retain(|(_, w)| !w.is_zero());
        out
    }

    fn independent(a: &[(usize, S)], b: &[(usize, S)], n1: usize, n2: usize) -> Row<S> {
        let (ma, mb) = (mass(a), mass(b));
        let mut out = Vec::new();
        for (i, wa) in a {
            for (j, wb) in b {
                out.push((i * n2 + j, wa.clone() * wb.clone()));
            }
        }
        out.extend(scaled(a, &(S::one() - mb)).into_iter().map(|(i, w)| (n1 * n2 + i, w)));
        out.extend(scaled(b, &(S::one() - ma)).into_iter().map(|(j, w)| (n1 * n2 + n1 + j, w)));
        out.retain(|(_, w)| !w.is_zero());
        out
    }

    /// The independent coupling, or a greedy transport plan between the
    /// rows taken in random order.
    fn random_coupling<R: Rng>(rng: &mut R, a: &[(usize, S)], b: &[(usize, S)], n1: usize, n2: usize) -> Row<S> {
        if rng.gen_bool(0.3) {
            return Self::independent(a, b, n1, n2);
        }
        let mut a: Vec<(usize, S)> = a.to_vec();
        let mut b: Vec<(usize, S)> = b.to_vec();
        a.shuffle(rng);
        b.shuffle(rng);
        let mut acc = RowAcc::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let t = wmin(&a[i].1, &b[j].1);
            acc.add(a[i].0 * n2 + b[j].0, t.clone());
            a[i].1 = a[i].1.clone() - t.clone();
            b[j].1 = b[j].1.clone() - t;
            if a[i].1.is_zero() {
                i += 1;
            }
            if j < b.len() && b[j].1.is_zero() {
                j += 1;
            }
        }
        for (c, w) in &a[i.min(a.len())..] {
            acc.add(n1 * n2 + c, w.clone());
        }
        for (c, w) in &b[j.min(b.len())..] {
            acc.add(n1 * n2 + n1 + c, w.clone());
        }
        acc.finish()
    }

    fn split(row: &[(usize, S)], n: usize) -> (Row<S>, Row<S>, Row<S>) {
        let first: Row<S> = row.iter().filter(|(c, _)| *c < n).cloned().collect();
        let second: Row<S> = row.iter().filter(|(c, _)| *c >= n).map(|(c, w)| (c - n, w.clone())).collect();
        let (m1, m2) = (mass(&first), mass(&second));
        let mut guard = Vec::new();
        let norm = |r: &Row<S>, m: &S| if m.is_zero() { Vec::new() } else { scaled(r, &(S::one() / m.clone())) };
        let (f, s) = (norm(&first, &m1), norm(&second, &m2));
        if !m1.is_zero() {
            guard.push((0, m1));
        }
        if !m2.is_zero() {
            guard.push((1, m2));
        }
        (guard, f, s)
    }

    fn install(model: &mut Model, gen: &Name, k: Kernel<S>) -> Result<(), ModelError> {
        model.set_stoch(gen, k.map_weights(|w: &S| -> BigRational { w.to_ratio() }))
    }
}

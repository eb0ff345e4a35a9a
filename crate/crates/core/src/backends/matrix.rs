use std::collections::BTreeMap;

use super::scalar::Weight;

/// Sparse matrix over a weight semiring. Rows are kept sorted by column
/// with no explicit zeros, so structural equality is semantic equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Kernel<W> {
    rows: Vec<Vec<(usize, W)>>,
    cols: usize,
}

/// Sums weighted entries into a single sparse row.
#[derive(Clone, Debug)]
pub struct RowAcc<W> {
    acc: BTreeMap<usize, W>,
}

impl<W: Weight> Default for RowAcc<W> {
    fn default() -> Self {
        RowAcc { acc: BTreeMap::new() }
    }
}

impl<W: Weight> RowAcc<W> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, col: usize, w: W) {
        if w.is_zero() {
            return;
        }
        match self.acc.get_mut(&col) {
            Some(v) => *v = v.clone() + w,
            None => {
                self.acc.insert(col, w);
            }
        }
    }

    pub fn add_scaled(&mut self, row: &[(usize, W)], scale: &W) {
        for (c, w) in row {
            self.add(*c, scale.clone() * w.clone());
        }
    }

    pub fn finish(self) -> Vec<(usize, W)> {
        self.acc.into_iter().filter(|(_, w)| !w.is_zero()).collect()
    }
}

impl<W: Weight> Kernel<W> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Kernel {
            rows: vec![Vec::new(); rows],
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        Kernel {
            rows: (0..n).map(|i| vec![(i, W::one())]).collect(),
            cols: n,
        }
    }

    /// The kernel of a total function `i ↦ map[i]`.
    pub fn function(map: &[usize], cols: usize) -> Self {
        Kernel {
            rows: map
                .iter()
                .map(|&j| {
                    assert!(j < cols, "function value out of range");
                    vec![(j, W::one())]
                })
                .collect(),
            cols,
        }
    }

    /// The kernel of a partial function.
    pub fn partial_function(map: &[Option<usize>], cols: usize) -> Self {
        Kernel {
            rows: map
                .iter()
                .map(|j| j.map(|j| vec![(j, W::one())]).unwrap_or_default())
                .collect(),
            cols,
        }
    }

    /// Builds from sparse rows, summing duplicates and dropping zeros.
    pub fn from_rows(rows: Vec<Vec<(usize, W)>>, cols: usize) -> Self {
        Kernel {
            rows: rows
                .into_iter()
                .map(|r| {
                    let mut acc = RowAcc::new();
                    for (c, w) in r {
                        assert!(c < cols, "column {c} out of range {cols}");
                        acc.add(c, w);
                    }
                    acc.finish()
                })
                .collect(),
            cols,
        }
    }

    pub fn from_dense(rows: Vec<Vec<W>>, cols: usize) -> Self {
        Self::from_rows(
            rows.into_iter()
                .map(|r| {
                    assert_eq!(r.len(), cols, "dense row length");
                    r.into_iter().enumerate().collect()
                })
                .collect(),
            cols,
        )
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[(usize, W)] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<(usize, W)>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> W {
        self.rows[i]
            .binary_search_by_key(&j, |(c, _)| *c)
            .map(|k| self.rows[i][k].1.clone())
            .unwrap_or_else(|_| W::zero())
    }

    pub fn dense_row(&self, i: usize) -> Vec<W> {
        let mut out = vec![W::zero(); self.cols];
        for (c, w) in &self.rows[i] {
            out[*c] = w.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    /// Total weight of a row.
    pub fn row_mass(&self, i: usize) -> W {
        self.rows[i]
            .iter()
            .fold(W::zero(), |acc, (_, w)| acc + w.clone())
    }

    /// Matrix product `self ; other`.
    pub fn then(&self, other: &Kernel<W>) -> Kernel<W> {
        assert_eq!(self.cols, other.n_rows(), "composition shape");
        Kernel {
            rows: self
                .rows
                .iter()
                .map(|r| {
                    let mut acc = RowAcc::new();
                    for (k, w) in r {
                        acc.add_scaled(other.row(*k), w);
                    }
                    acc.finish()
                })
                .collect(),
            cols: other.cols,
        }
    }

    /// Pointwise sum.
    pub fn plus(&self, other: &Kernel<W>) -> Kernel<W> {
        assert_eq!(self.cols, other.cols, "sum shape");
        assert_eq!(self.n_rows(), other.n_rows(), "sum shape");
        Kernel {
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| {
                    let mut acc = RowAcc::new();
                    acc.add_scaled(a, &W::one());
                    acc.add_scaled(b, &W::one());
                    acc.finish()
                })
                .collect(),
            cols: self.cols,
        }
    }

    pub fn scale(&self, s: &W) -> Kernel<W> {
        Kernel::from_rows(
            self.rows
                .iter()
                .map(|r| r.iter().map(|(c, w)| (*c, s.clone() * w.clone())).collect())
                .collect(),
            self.cols,
        )
    }

    /// Kronecker product; row `(i, k)` is `i * other.rows + k`, likewise
    /// for columns.
    pub fn kron(&self, other: &Kernel<W>) -> Kernel<W> {
        let mut rows = Vec::with_capacity(self.n_rows() * other.n_rows());
        for a in &self.rows {
            for b in &other.rows {
                let mut r = Vec::with_capacity(a.len() * b.len());
                for (i, w) in a {
                    for (j, v) in b {
                        let p = w.clone() * v.clone();
                        if !p.is_zero() {
                            r.push((i * other.cols + j, p));
                        }
                    }
                }
                rows.push(r);
            }
        }
        Kernel {
            rows,
            cols: self.cols * other.cols,
        }
    }

    /// Pushes columns forward along `f`, summing collisions.
    pub fn map_cols(&self, f: &[usize], cols: usize) -> Kernel<W> {
        assert_eq!(f.len(), self.cols, "column map length");
        Kernel::from_rows(
            self.rows
                .iter()
                .map(|r| r.iter().map(|(c, w)| (f[*c], w.clone())).collect())
                .collect(),
            cols,
        )
    }

    /// Row `i` of the result is row `map[i]` of `self`.
    pub fn reindex_rows(&self, map: &[usize]) -> Kernel<W> {
        Kernel {
            rows: map.iter().map(|&i| self.rows[i].clone()).collect(),
            cols: self.cols,
        }
    }

    /// Keeps columns `[start, end)`, renumbered from zero.
    pub fn col_range(&self, start: usize, end: usize) -> Kernel<W> {
        Kernel {
            rows: self
                .rows
                .iter()
                .map(|r| {
                    r.iter()
                        .filter(|(c, _)| *c >= start && *c < end)
                        .map(|(c, w)| (c - start, w.clone()))
                        .collect()
                })
                .collect(),
            cols: end - start,
        }
    }

    pub fn block_diag(&self, other: &Kernel<W>) -> Kernel<W> {
        let mut rows = self.rows.clone();
        for r in &other.rows {
            rows.push(r.iter().map(|(c, w)| (c + self.cols, w.clone())).collect());
        }
        Kernel {
            rows,
            cols: self.cols + other.cols,
        }
    }

    /// Stacks rows of `other` under `self`.
    pub fn vstack(&self, other: &Kernel<W>) -> Kernel<W> {
        assert_eq!(self.cols, other.cols, "vstack shape");
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Kernel {
            rows,
            cols: self.cols,
        }
    }

    pub fn transpose(&self) -> Kernel<W> {
        let mut rows = vec![Vec::new(); self.cols];
        for (i, r) in self.rows.iter().enumerate() {
            for (c, w) in r {
                rows[*c].push((i, w.clone()));
            }
        }
        Kernel {
            rows,
            cols: self.n_rows(),
        }
    }

    /// Pointwise order.
    pub fn leq(&self, other: &Kernel<W>) -> bool {
        assert_eq!(self.n_rows(), other.n_rows(), "order shape");
        assert_eq!(self.cols, other.cols, "order shape");
        self.first_violation(other).is_none()
    }

    /// First entry `(row, col)` where `self ≤ other` fails.
    pub fn first_violation(&self, other: &Kernel<W>) -> Option<(usize, usize)> {
        for (i, r) in self.rows.iter().enumerate() {
            for (c, w) in r {
                if !(w.clone() <= other.get(i, *c)) {
                    return Some((i, *c));
                }
            }
        }
        None
    }

    pub fn map_weights<V: Weight>(&self, f: impl Fn(&W) -> V) -> Kernel<V> {
        Kernel::from_rows(
            self.rows
                .iter()
                .map(|r| r.iter().map(|(c, w)| (*c, f(w))).collect())
                .collect(),
            self.cols,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::scalar::{ratio, Boolean};
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        ratio(n, d)
    }

    #[test]
    fn product_and_identity() {
        let k = Kernel::from_dense(vec![vec![q(1, 2), q(1, 2)], vec![q(0, 1), q(1, 1)]], 2);
        assert_eq!(Kernel::identity(2).then(&k), k);
        assert_eq!(k.then(&Kernel::identity(2)), k);
        let kk = k.then(&k);
        assert_eq!(kk.get(0, 1), q(3, 4));
    }

    #[test]
    fn kron_layout() {
        let a: Kernel<Boolean> = Kernel::function(&[1, 0], 2);
        let b: Kernel<Boolean> = Kernel::function(&[2, 0, 1], 3);
        let k = a.kron(&b);
        assert_eq!(k.n_rows(), 6);
        // row (0, 1) goes to (1, 0)
        assert_eq!(k.row(1), &[(3, Boolean(true))]);
    }

    #[test]
    fn zeros_are_dropped() {
        let k = Kernel::from_rows(vec![vec![(0, q(1, 2)), (0, q(-1, 2))]], 1);
        assert!(k.is_zero());
    }

    #[test]
    fn order_is_pointwise() {
        let a = Kernel::from_dense(vec![vec![q(1, 4)]], 1);
        let b = Kernel::from_dense(vec![vec![q(1, 3)]], 1);
        assert!(a.leq(&b));
        assert!(!b.leq(&a));
        assert!(Kernel::zero(1, 1).leq(&a));
    }
}

//! Exact feasibility of small linear systems `A x = b, C x ≤ d, x ≥ 0` by
//! phase-one simplex with Bland's rule.

use crate::backends::Field;

pub type LinRow<S> = Vec<(usize, S)>;

#[derive(Clone, Debug)]
pub struct Lp<S> {
    pub vars: usize,
    eq: Vec<(LinRow<S>, S)>,
    le: Vec<(LinRow<S>, S)>,
}

impl<S: Field> Lp<S> {
    pub fn new(vars: usize) -> Self {
        Lp {
            vars,
            eq: Vec::new(),
            le: Vec::new(),
        }
    }

    pub fn eq(&mut self, row: LinRow<S>, rhs: S) {
        self.eq.push((row, rhs));
    }

    pub fn le(&mut self, row: LinRow<S>, rhs: S) {
        self.le.push((row, rhs));
    }

    pub fn ge(&mut self, row: LinRow<S>, rhs: S) {
        let neg = row.into_iter().map(|(i, w)| (i, S::zero() - w)).collect();
        self.le.push((neg, S::zero() - rhs));
    }

    /// A feasible point, if any.
    pub fn solve(&self) -> Option<Vec<S>> {
        let n = self.vars;
        let ns = self.le.len();
        let m = self.eq.len() + ns;
        // columns: x (n), slacks (ns), artificials (m), rhs
        let width = n + ns + m + 1;
        let mut t: Vec<Vec<S>> = Vec::with_capacity(m);
        let rows = self
            .eq
            .iter()
            .map(|(r, b)| (r, b, None))
            .chain(self.le.iter().enumerate().map(|(k, (r, b))| (r, b, Some(k))));
        for (i, (r, b, slack)) in rows.enumerate() {
            let mut row = vec![S::zero(); width];
            for (j, w) in r {
                row[*j] = row[*j].clone() + w.clone();
            }
            if let Some(k) = slack {
                row[n + k] = S::one();
            }
            row[width - 1] = b.clone();
            if row[width - 1] < S::zero() {
                for v in row.iter_mut() {
                    *v = S::zero() - v.clone();
                }
            }
            row[n + ns + i] = S::one();
            t.push(row);
        }
        let mut basis: Vec<usize> = (0..m).map(|i| n + ns + i).collect();
        // objective: minimise the sum of artificials, as reduced costs
        let mut cost = vec![S::zero(); width];
        for row in &t {
            for j in 0..n + ns {
                cost[j] = cost[j].clone() - row[j].clone();
            }
            cost[width - 1] = cost[width - 1].clone() - row[width - 1].clone();
        }
        loop {
            let Some(enter) = (0..n + ns + m).find(|&j| cost[j] < S::zero()) else {
                break;
            };
            let mut leave: Option<(usize, S)> = None;
            for (i, row) in t.iter().enumerate() {
                if row[enter] > S::zero() {
                    let r = row[width - 1].clone() / row[enter].clone();
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => r < *lr || (r == *lr && basis[i] < basis[*li]),
                    };
                    if better {
                        leave = Some((i, r));
                    }
                }
            }
            let Some((p, _)) = leave else {
                break;
            };
            let piv = t[p][enter].clone();
            for v in t[p].iter_mut() {
                *v = v.clone() / piv.clone();
            }
            let prow = t[p].clone();
            for (i, row) in t.iter_mut().enumerate() {
                if i != p && !row[enter].is_zero() {
                    let f = row[enter].clone();
                    for (v, pv) in row.iter_mut().zip(&prow) {
                        *v = v.clone() - f.clone() * pv.clone();
                    }
                }
            }
            if !cost[enter].is_zero() {
                let f = cost[enter].clone();
                for (v, pv) in cost.iter_mut().zip(&prow) {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
            basis[p] = enter;
        }
        if !cost[width - 1].is_zero() {
            return None;
        }
        let mut x = vec![S::zero(); n];
        for (i, &b) in basis.iter().enumerate() {
            if b < n {
                x[b] = t[i][width - 1].clone();
            }
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::ratio;
    use num_rational::BigRational;

    #[test]
    fn feasible_simplex() {
        // x + y = 1, x ≤ 1/3
        let mut lp: Lp<BigRational> = Lp::new(2);
        lp.eq(vec![(0, ratio(1, 1)), (1, ratio(1, 1))], ratio(1, 1));
        lp.le(vec![(0, ratio(1, 1))], ratio(1, 3));
        let x = lp.solve().unwrap();
        assert_eq!(x[0].clone() + x[1].clone(), ratio(1, 1));
        assert!(x[0] <= ratio(1, 3));
    }

    #[test]
    fn infeasible() {
        // x + y = 1, x + y ≥ 3/2
        let mut lp: Lp<BigRational> = Lp::new(2);
        lp.eq(vec![(0, ratio(1, 1)), (1, ratio(1, 1))], ratio(1, 1));
        lp.ge(vec![(0, ratio(1, 1)), (1, ratio(1, 1))], ratio(3, 2));
        assert!(lp.solve().is_none());
    }

    #[test]
    fn negative_right_hand_sides() {
        // -x ≤ -1/2, x ≤ 1
        let mut lp: Lp<BigRational> = Lp::new(1);
        lp.le(vec![(0, ratio(-1, 1))], ratio(-1, 2));
        lp.le(vec![(0, ratio(1, 1))], ratio(1, 1));
        let x = lp.solve().unwrap();
        assert!(x[0] >= ratio(1, 2) && x[0] <= ratio(1, 1));
    }
}

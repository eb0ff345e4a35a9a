use std::marker::PhantomData;

use num_rational::BigRational;

use crate::backends::{Backend, BackendId, Field, Kernel};
use crate::kernel::Name;

use super::Model;

/// Subprobability kernels over an exact field of scalars.
#[derive(Debug)]
pub struct Stoch<S = BigRational>(PhantomData<fn() -> S>);

impl<S> Clone for Stoch<S> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<S> Copy for Stoch<S> {}

impl<S> Default for Stoch<S> {
    fn default() -> Self {
        Stoch(PhantomData)
    }
}

impl<S: Field> Backend for Stoch<S> {
    type W = S;
    const ID: BackendId = BackendId::Stoch;

    fn fix(body: &Kernel<S>, n: usize) -> Kernel<S> {
        stoch_fix(body, n)
    }

    fn check_row(row: &[(usize, S)]) -> Result<(), String> {
        let mut mass = S::zero();
        for (c, w) in row {
            if *w < S::zero() {
                return Err(format!("negative weight {w} at column {c}"));
            }
            mass = mass + w.clone();
        }
        if mass > S::one() {
            return Err(format!("row mass {mass} exceeds 1"));
        }
        Ok(())
    }

    fn table(model: &Model, gen: &Name) -> Option<Kernel<S>> {
        model.tables.stoch.get(gen).map(|k| k.map_weights(S::from_ratio))
    }
}

/// Least nonnegative solution of `t = E + L t`. States with no positive path
/// to an exit get `t = 0`; on the rest `I - L` is invertible and the system
/// is solved exactly.
pub fn stoch_fix<S: Field>(body: &Kernel<S>, n: usize) -> Kernel<S> {
    let l = body.col_range(0, n);
    let e = body.col_range(n, body.n_cols());
    let m = e.n_cols();

    // reverse reachability from states with an exit
    let mut good = vec![false; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for s in 0..n {
        for (t, _) in l.row(s) {
            preds[*t].push(s);
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&s| !e.row(s).is_empty()).collect();
    for &s in &stack {
        good[s] = true;
    }
    while let Some(t) = stack.pop() {
        for &s in &preds[t] {
            if !good[s] {
                good[s] = true;
                stack.push(s);
            }
        }
    }
    let live: Vec<usize> = (0..n).filter(|&s| good[s]).collect();
    let mut pos = vec![usize::MAX; n];
    for (k, &s) in live.iter().enumerate() {
        pos[s] = k;
    }
    let r = live.len();

    // augmented system [I - L_RR | E_R]
    let mut a: Vec<Vec<S>> = live
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let mut row = vec![S::zero(); r + m];
            row[k] = S::one();
            for (t, w) in l.row(s) {
                if good[*t] {
                    row[pos[*t]] = row[pos[*t]].clone() - w.clone();
                }
            }
            for (c, w) in e.row(s) {
                row[r + c] = w.clone();
            }
            row
        })
        .collect();

    for col in 0..r {
        let piv = (col..r)
            .find(|&i| !a[i][col].is_zero())
            .expect("restricted loop matrix is nonsingular");
        a.swap(col, piv);
        let p = a[col][col].clone();
        for j in col..r + m {
            a[col][j] = a[col][j].clone() / p.clone();
        }
        for i in 0..r {
            if i != col && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in col..r + m {
                    let v = a[col][j].clone() * f.clone();
                    a[i][j] = a[i][j].clone() - v;
                }
            }
        }
    }

    let rows = (0..n)
        .map(|s| {
            if good[s] {
                a[pos[s]][r..]
                    .iter()
                    .enumerate()
                    .map(|(c, w)| (c, w.clone()))
                    .collect()
            } else {
                Vec::new()
            }
        })
        .collect();
    Kernel::from_rows(rows, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::ratio;
    use num_rational::Rational64;

    #[test]
    fn third_exit_third_loop() {
        let body = Kernel::from_dense(vec![vec![ratio(1, 3), ratio(1, 3)]], 2);
        let t = stoch_fix(&body, 1);
        assert_eq!(t.get(0, 0), ratio(1, 2));
    }

    #[test]
    fn certain_divergence_loses_mass() {
        let body = Kernel::from_dense(vec![vec![ratio(1, 1), ratio(0, 1)]], 2);
        assert!(stoch_fix(&body, 1).is_zero());
    }

    #[test]
    fn fixed_width_scalars() {
        let body = Kernel::from_dense(
            vec![vec![Rational64::new(1, 2), Rational64::new(1, 2)]],
            2,
        );
        assert_eq!(stoch_fix(&body, 1).get(0, 0), Rational64::new(1, 1));
    }
}

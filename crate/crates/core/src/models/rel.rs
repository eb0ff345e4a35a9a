use crate::backends::{Backend, BackendId, Boolean, Kernel};
use crate::kernel::Name;

use super::Model;

/// Relations: the Kleisli category of the powerset monad.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rel;

impl Backend for Rel {
    type W = Boolean;
    const ID: BackendId = BackendId::Rel;

    fn fix(body: &Kernel<Boolean>, n: usize) -> Kernel<Boolean> {
        rel_fix(body, n)
    }

    fn check_row(_row: &[(usize, Boolean)]) -> Result<(), String> {
        Ok(())
    }

    fn table(model: &Model, gen: &Name) -> Option<Kernel<Boolean>> {
        model.tables.rel.get(gen).cloned()
    }
}

/// Least `T` with `T = E ∪ L;T`: Kleene iteration on small state spaces,
/// reachability otherwise.
pub fn rel_fix(body: &Kernel<Boolean>, n: usize) -> Kernel<Boolean> {
    let l = body.col_range(0, n);
    let e = body.col_range(n, body.n_cols());
    if n <= 64 {
        let mut t = e.clone();
        loop {
            let next = e.plus(&l.then(&t));
            if next == t {
                return t;
            }
            t = next;
        }
    }
    let mut reach = Vec::with_capacity(n);
    for s in 0..n {
        let mut seen = vec![false; n];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for (v, _) in l.row(u) {
                if !seen[*v] {
                    seen[*v] = true;
                    stack.push(*v);
                }
            }
        }
        reach.push(
            seen.iter()
                .enumerate()
                .filter(|(_, b)| **b)
                .map(|(v, _)| (v, Boolean(true)))
                .collect(),
        );
    }
    Kernel::from_rows(reach, n).then(&e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(rows: Vec<Vec<usize>>, cols: usize) -> Kernel<Boolean> {
        Kernel::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(|c| (c, Boolean(true))).collect())
                .collect(),
            cols,
        )
    }

    #[test]
    fn path_reachability() {
        // states 0,1; exits y0,y1 at columns 2,3
        let body = b(vec![vec![1], vec![3]], 4);
        let t = rel_fix(&body, 2);
        assert_eq!(t, b(vec![vec![1], vec![1]], 2));
    }

    #[test]
    fn divergence_is_empty() {
        let body = b(vec![vec![0], vec![1]], 3);
        assert!(rel_fix(&body, 2).is_zero());
    }

    #[test]
    fn large_state_spaces_agree() {
        // a chain of 70 states exiting at the end
        let n = 70;
        let rows: Vec<Vec<usize>> = (0..n).map(|i| if i + 1 < n { vec![i + 1] } else { vec![n] }).collect();
        let t = rel_fix(&b(rows, n + 1), n);
        assert!((0..n).all(|i| t.row(i) == [(0, Boolean(true))]));
    }
}

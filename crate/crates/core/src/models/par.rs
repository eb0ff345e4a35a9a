use crate::backends::{Backend, BackendId, Boolean, Kernel};
use crate::kernel::Name;

use super::Model;

/// Partial functions: the Kleisli category of the maybe monad.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Par;

impl Backend for Par {
    type W = Boolean;
    const ID: BackendId = BackendId::Par;

    fn fix(body: &Kernel<Boolean>, n: usize) -> Kernel<Boolean> {
        par_fix(body, n)
    }

    fn check_row(row: &[(usize, Boolean)]) -> Result<(), String> {
        if row.len() > 1 {
            return Err(format!("{} outputs for one input", row.len()));
        }
        Ok(())
    }

    fn table(model: &Model, gen: &Name) -> Option<Kernel<Boolean>> {
        model.tables.par.get(gen).cloned()
    }
}

/// Runs the deterministic body from each state until it exits; revisiting a
/// state or reaching an undefined step makes the result undefined.
pub fn par_fix(body: &Kernel<Boolean>, n: usize) -> Kernel<Boolean> {
    let cols = body.n_cols() - n;
    let out = (0..n)
        .map(|s| {
            let mut seen = vec![false; n];
            let mut cur = s;
            loop {
                if seen[cur] {
                    return None;
                }
                seen[cur] = true;
                match body.row(cur).first() {
                    None => return None,
                    Some((c, _)) if *c < n => cur = *c,
                    Some((c, _)) => return Some(c - n),
                }
            }
        })
        .collect::<Vec<_>>();
    Kernel::partial_function(&out, cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_exits() {
        // 0 → 1 → exit a
        let body = Kernel::partial_function(&[Some(1), Some(2)], 3);
        let t = par_fix(&body, 2);
        assert_eq!(t, Kernel::partial_function(&[Some(0), Some(0)], 1));
    }

    #[test]
    fn cycle_is_undefined() {
        let body = Kernel::partial_function(&[Some(1), Some(0), Some(2)], 3);
        let t = par_fix(&body, 3);
        assert!(t.is_zero());
    }
}

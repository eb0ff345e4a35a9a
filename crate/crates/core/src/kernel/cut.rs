use thiserror::Error;

use super::name::Name;
use super::subst::subst_label;
use super::term::Term;
use super::types::{BasicType, Index};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CutError {
    #[error("label `{0}` is not in the index of the first term")]
    UnknownLabel(Name),
    #[error("label `{label}` carries {expected:?} but the second term expects {found:?}")]
    SignatureMismatch {
        label: Name,
        expected: Vec<BasicType>,
        found: Vec<BasicType>,
    },
}

/// `p ∘ω q`, where `q` lives in the context `ys`.
pub fn cut(p: &Term, omega: &Name, ys: &[Name], q: &Term) -> Term {
    subst_label(p, omega, ys, q)
}

/// Checked cut: `p : Δ₁,(ω:Ȳ),Δ₂` and `ȳ:Ȳ ⊢ q : Δ` give `p ∘ω q : Δ₁,Δ,Δ₂`.
pub fn cut_checked(
    p: &Term,
    p_idx: &Index,
    omega: &Name,
    ys: &[(Name, BasicType)],
    q: &Term,
    q_idx: &Index,
) -> Result<(Term, Index), CutError> {
    let (pos, sig) = p_idx
        .lookup(omega)
        .ok_or_else(|| CutError::UnknownLabel(omega.clone()))?;
    let found: Vec<BasicType> = ys.iter().map(|(_, t)| t.clone()).collect();
    if sig != found.as_slice() {
        return Err(CutError::SignatureMismatch {
            label: omega.clone(),
            expected: sig.to_vec(),
            found,
        });
    }
    let vars: Vec<Name> = ys.iter().map(|(y, _)| y.clone()).collect();
    let mut entries = p_idx.0[..pos].to_vec();
    entries.extend(q_idx.0.iter().cloned());
    entries.extend(p_idx.0[pos + 1..].iter().cloned());
    Ok((cut(p, omega, &vars, q), Index(entries)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::alpha::alpha_eq;
    use crate::kernel::name::names;
    use crate::kernel::term::{gen, ret, Branch};

    #[test]
    fn cut_clauses() {
        let q = ret("c", &names(&["y", "y"]));
        assert_eq!(cut(&ret("w", &names(&["x"])), &"w".into(), &names(&["y"]), &q), ret("c", &names(&["x", "x"])));
        assert_eq!(cut(&ret("a", &names(&["x"])), &"w".into(), &names(&["y"]), &q), ret("a", &names(&["x"])));
    }

    #[test]
    fn identity_is_unit() {
        let p = gen(
            "f",
            &names(&["x"]),
            vec![Branch::new(names(&["u"]), ret("w", &names(&["u"])))],
        );
        let id = ret("w", &names(&["y"]));
        assert!(alpha_eq(&cut(&p, &"w".into(), &names(&["y"]), &id), &p));
    }

    #[test]
    fn signature_checked() {
        let idx = Index::new(vec![("a".into(), vec![]), ("w".into(), names(&["B"]))]);
        let err = cut_checked(&ret("w", &names(&["x"])), &idx, &"w".into(), &[("y".into(), "C".into())], &ret("c", &[]), &Index::single("c", vec![]))
            .unwrap_err();
        assert!(matches!(err, CutError::SignatureMismatch { .. }));
        let (_, out) = cut_checked(
            &ret("w", &names(&["x"])),
            &idx,
            &"w".into(),
            &[("y".into(), "B".into())],
            &ret("c", &[]),
            &Index::single("c", vec![]),
        )
        .unwrap();
        assert_eq!(out.labels(), names(&["a", "c"]));
    }
}

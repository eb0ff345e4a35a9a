use std::collections::BTreeMap;

use super::name::Name;
use super::term::{Branch, Term};

/// Replaces every bound variable and bound label with a de Bruijn style
/// name (`#v3`, `#l0`), which cannot clash with a parsed identifier.
pub fn canonicalize(term: &Term) -> Term {
    canon(term, &BTreeMap::new(), &BTreeMap::new(), 0, 0)
}

pub fn alpha_eq(p: &Term, q: &Term) -> bool {
    canonicalize(p) == canonicalize(q)
}

fn bind_vars(
    vars: &BTreeMap<Name, Name>,
    binders: &[Name],
    depth: usize,
) -> (BTreeMap<Name, Name>, Vec<Name>, usize) {
    let mut inner = vars.clone();
    let out: Vec<Name> = (0..binders.len())
        .map(|i| Name::from(format!("#v{}", depth + i)))
        .collect();
    // the leftmost binder wins on repeated names, so install right to left
    for (i, y) in binders.iter().enumerate().rev() {
        inner.insert(y.clone(), out[i].clone());
    }
    (inner, out, depth + binders.len())
}

fn canon(
    term: &Term,
    vars: &BTreeMap<Name, Name>,
    labels: &BTreeMap<Name, Name>,
    vd: usize,
    ld: usize,
) -> Term {
    let v = |x: &Name| vars.get(x).cloned().unwrap_or_else(|| x.clone());
    match term {
        Term::Return { label, args } => Term::Return {
            label: labels.get(label).cloned().unwrap_or_else(|| label.clone()),
            args: args.iter().map(v).collect(),
        },
        Term::Gen {
            gen,
            args,
            branches,
        } => Term::Gen {
            gen: gen.clone(),
            args: args.iter().map(v).collect(),
            branches: branches
                .iter()
                .map(|b| {
                    let (inner, bs, d) = bind_vars(vars, &b.binders, vd);
                    Branch::new(bs, canon(&b.body, &inner, labels, d, ld))
                })
                .collect(),
        },
        Term::Loop {
            label,
            args,
            binders,
            body,
        } => {
            let (inner, bs, d) = bind_vars(vars, binders, vd);
            let fresh = Name::from(format!("#l{ld}"));
            let mut inner_labels = labels.clone();
            inner_labels.insert(label.clone(), fresh.clone());
            Term::Loop {
                label: fresh,
                args: args.iter().map(v).collect(),
                binders: bs,
                body: Box::new(canon(body, &inner, &inner_labels, d, ld + 1)),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::name::names;
    use crate::kernel::term::{gen, lp, ret};

    #[test]
    fn renamed_binders_are_equal() {
        let p = lp("a", &names(&["x"]), &names(&["u"]), ret("a", &names(&["u"])));
        let q = lp("b", &names(&["x"]), &names(&["w"]), ret("b", &names(&["w"])));
        assert!(alpha_eq(&p, &q));
    }

    #[test]
    fn free_names_matter() {
        let p = ret("a", &names(&["x"]));
        let q = ret("a", &names(&["y"]));
        assert!(!alpha_eq(&p, &q));
    }

    #[test]
    fn leftmost_binder_wins() {
        let p = gen("f", &[], vec![Branch::new(names(&["u", "u"]), ret("a", &names(&["u"])))]);
        let q = gen("f", &[], vec![Branch::new(names(&["u", "w"]), ret("a", &names(&["u"])))]);
        let r = gen("f", &[], vec![Branch::new(names(&["w", "u"]), ret("a", &names(&["u"])))]);
        assert!(alpha_eq(&p, &q));
        assert!(!alpha_eq(&p, &r));
    }
}

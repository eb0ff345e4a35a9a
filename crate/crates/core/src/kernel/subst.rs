use std::collections::{BTreeMap, BTreeSet};

use super::name::{fresh_like, Name};
use super::term::{Branch, Term};

/// Simultaneous capture-avoiding substitution `term[olds \ news]`.
/// When `olds` repeats a name, the first occurrence wins.
pub fn subst_vars(term: &Term, olds: &[Name], news: &[Name]) -> Term {
    assert_eq!(olds.len(), news.len(), "substitution lists differ in length");
    let mut map = BTreeMap::new();
    for (o, n) in olds.iter().zip(news) {
        map.entry(o.clone()).or_insert_with(|| n.clone());
    }
    sv(term, &map)
}

fn rename(x: &Name, map: &BTreeMap<Name, Name>) -> Name {
    map.get(x).cloned().unwrap_or_else(|| x.clone())
}

/// Pushes a substitution under `binders`: shadowed entries are dropped and
/// binders that would capture an incoming name are renamed apart.
fn under_binders(
    binders: &[Name],
    body: &Term,
    map: &BTreeMap<Name, Name>,
) -> (Vec<Name>, BTreeMap<Name, Name>) {
    let mut inner: BTreeMap<Name, Name> = map
        .iter()
        .filter(|(k, _)| !binders.contains(k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    let fv = body.free_vars();
    let incoming: BTreeSet<Name> = fv
        .iter()
        .filter(|z| !binders.contains(z))
        .filter_map(|z| inner.get(z).cloned())
        .collect();
    let mut avoid: BTreeSet<Name> = fv.clone();
    avoid.extend(inner.keys().cloned());
    avoid.extend(inner.values().cloned());
    avoid.extend(binders.iter().cloned());
    let mut renamed: BTreeMap<Name, Name> = BTreeMap::new();
    let mut new_binders = Vec::with_capacity(binders.len());
    for y in binders {
        if incoming.contains(y) {
            let y2 = renamed
                .entry(y.clone())
                .or_insert_with(|| {
                    let n = fresh_like(y, &avoid);
                    avoid.insert(n.clone());
                    n
                })
                .clone();
            new_binders.push(y2);
        } else {
            new_binders.push(y.clone());
        }
    }
    for (y, y2) in renamed {
        inner.insert(y, y2);
    }
    (new_binders, inner)
}

fn sv(term: &Term, map: &BTreeMap<Name, Name>) -> Term {
    if map.is_empty() {
        return term.clone();
    }
    match term {
        Term::Return { label, args } => Term::Return {
            label: label.clone(),
            args: args.iter().map(|x| rename(x, map)).collect(),
        },
        Term::Gen {
            gen,
            args,
            branches,
        } => Term::Gen {
            gen: gen.clone(),
            args: args.iter().map(|x| rename(x, map)).collect(),
            branches: branches
                .iter()
                .map(|b| {
                    let (binders, inner) = under_binders(&b.binders, &b.body, map);
                    Branch::new(binders, sv(&b.body, &inner))
                })
                .collect(),
        },
        Term::Loop {
            label,
            args,
            binders,
            body,
        } => {
            let (new_binders, inner) = under_binders(binders, body, map);
            Term::Loop {
                label: label.clone(),
                args: args.iter().map(|x| rename(x, map)).collect(),
                binders: new_binders,
                body: Box::new(sv(body, &inner)),
            }
        }
    }
}

/// One entry of a simultaneous label substitution `[α \ ū. q]`.
#[derive(Clone, Debug)]
pub struct LabelSub {
    pub label: Name,
    pub binders: Vec<Name>,
    pub body: Term,
}

impl LabelSub {
    pub fn new(label: impl Into<Name>, binders: &[Name], body: Term) -> Self {
        LabelSub {
            label: label.into(),
            binders: binders.to_vec(),
            body,
        }
    }

    fn free_vars(&self) -> BTreeSet<Name> {
        let mut fv = self.body.free_vars();
        for u in &self.binders {
            fv.remove(u);
        }
        fv
    }
}

/// `term[label \ bound. body]`.
pub fn subst_label(term: &Term, label: &Name, bound: &[Name], body: &Term) -> Term {
    subst_labels(term, &[LabelSub::new(label.clone(), bound, body.clone())])
}

/// Simultaneous label substitution; each Return at a substituted label is
/// replaced by the matching body with its bound variables instantiated.
pub fn subst_labels(term: &Term, subs: &[LabelSub]) -> Term {
    let mut map: BTreeMap<Name, &LabelSub> = BTreeMap::new();
    for s in subs {
        map.entry(s.label.clone()).or_insert(s);
    }
    sl(term, &map)
}

fn sl(term: &Term, subs: &BTreeMap<Name, &LabelSub>) -> Term {
    if subs.is_empty() {
        return term.clone();
    }
    match term {
        Term::Return { label, args } => match subs.get(label) {
            Some(s) => subst_vars(&s.body, &s.binders, args),
            None => term.clone(),
        },
        Term::Gen {
            gen,
            args,
            branches,
        } => {
            let incoming: BTreeSet<Name> = subs.values().flat_map(|s| s.free_vars()).collect();
            Term::Gen {
                gen: gen.clone(),
                args: args.clone(),
                branches: branches
                    .iter()
                    .map(|b| {
                        let (binders, body) = apart(&b.binders, &b.body, &incoming);
                        Branch::new(binders, sl(&body, subs))
                    })
                    .collect(),
            }
        }
        Term::Loop {
            label,
            args,
            binders,
            body,
        } => {
            let inner: BTreeMap<Name, &LabelSub> = subs
                .iter()
                .filter(|(l, _)| *l != label)
                .map(|(l, s)| (l.clone(), *s))
                .collect();
            if inner.is_empty() {
                return term.clone();
            }
            let mut label = label.clone();
            let mut body: Term = (**body).clone();
            let incoming_labels: BTreeSet<Name> =
                inner.values().flat_map(|s| s.body.free_labels()).collect();
            if incoming_labels.contains(&label) {
                let mut avoid = body.all_names();
                avoid.extend(incoming_labels.iter().cloned());
                avoid.extend(inner.keys().cloned());
                for s in inner.values() {
                    avoid.extend(s.body.all_names());
                }
                let fresh = fresh_like(&label, &avoid);
                body = rename_label(&body, &label, &fresh);
                label = fresh;
            }
            let incoming: BTreeSet<Name> = inner.values().flat_map(|s| s.free_vars()).collect();
            let (binders, body) = apart(binders, &body, &incoming);
            Term::Loop {
                label,
                args: args.clone(),
                binders,
                body: Box::new(sl(&body, &inner)),
            }
        }
    }
}

/// Renames binders that clash with `incoming` free variables.
fn apart(binders: &[Name], body: &Term, incoming: &BTreeSet<Name>) -> (Vec<Name>, Term) {
    if !binders.iter().any(|y| incoming.contains(y)) {
        return (binders.to_vec(), body.clone());
    }
    let mut avoid = body.all_names();
    avoid.extend(incoming.iter().cloned());
    avoid.extend(binders.iter().cloned());
    let mut renamed: BTreeMap<Name, Name> = BTreeMap::new();
    let mut new_binders = Vec::with_capacity(binders.len());
    for y in binders {
        if incoming.contains(y) {
            let y2 = renamed
                .entry(y.clone())
                .or_insert_with(|| {
                    let n = fresh_like(y, &avoid);
                    avoid.insert(n.clone());
                    n
                })
                .clone();
            new_binders.push(y2);
        } else {
            new_binders.push(y.clone());
        }
    }
    let (olds, news): (Vec<Name>, Vec<Name>) = renamed.into_iter().unzip();
    (new_binders, subst_vars(body, &olds, &news))
}

/// Renames free occurrences of label `old` to `new`.
pub fn rename_label(term: &Term, old: &Name, new: &Name) -> Term {
    rename_labels(term, &[(old.clone(), new.clone())])
}

/// Simultaneous label renaming (a label coaction). Loop labels that would
/// capture a target name are renamed apart.
pub fn rename_labels(term: &Term, pairs: &[(Name, Name)]) -> Term {
    let mut map = BTreeMap::new();
    for (o, n) in pairs {
        map.entry(o.clone()).or_insert_with(|| n.clone());
    }
    relabel(term, &map)
}

fn relabel(term: &Term, map: &BTreeMap<Name, Name>) -> Term {
    if map.is_empty() {
        return term.clone();
    }
    match term {
        Term::Return { label, args } => Term::Return {
            label: rename(label, map),
            args: args.clone(),
        },
        Term::Gen {
            gen,
            args,
            branches,
        } => Term::Gen {
            gen: gen.clone(),
            args: args.clone(),
            branches: branches
                .iter()
                .map(|b| Branch::new(b.binders.clone(), relabel(&b.body, map)))
                .collect(),
        },
        Term::Loop {
            label,
            args,
            binders,
            body,
        } => {
            let mut inner: BTreeMap<Name, Name> = map
                .iter()
                .filter(|(k, _)| *k != label)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            let mut label = label.clone();
            let captured = inner.iter().any(|(k, v)| v == &label && body.free_labels().contains(k));
            if captured {
                let mut avoid = body.all_names();
                avoid.extend(inner.keys().cloned());
                avoid.extend(inner.values().cloned());
                let fresh = fresh_like(&label, &avoid);
                inner.insert(label.clone(), fresh.clone());
                label = fresh;
            }
            Term::Loop {
                label,
                args: args.clone(),
                binders: binders.clone(),
                body: Box::new(relabel(body, &inner)),
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
    fn plain_substitution() {
        let t = ret("a", &names(&["x", "y"]));
        assert_eq!(subst_vars(&t, &names(&["x"]), &names(&["u"])), ret("a", &names(&["u", "y"])));
    }

    #[test]
    fn simultaneous_swap() {
        let t = ret("a", &names(&["x", "y"]));
        let s = subst_vars(&t, &names(&["x", "y"]), &names(&["y", "x"]));
        assert_eq!(s, ret("a", &names(&["y", "x"])));
    }

    #[test]
    fn capture_is_avoided() {
        let t = lp("b", &names(&["x"]), &names(&["y"]), ret("a", &names(&["x", "z"])));
        let s = subst_vars(&t, &names(&["z"]), &names(&["y"]));
        assert_eq!(s.to_string(), "loop b(x){y0. a(x, y)}");
        // a naive substitution would have captured the incoming y
        let naive = lp("b", &names(&["x"]), &names(&["y"]), ret("a", &names(&["x", "y"])));
        assert_ne!(s, naive);
    }

    #[test]
    fn bound_occurrences_untouched() {
        let t = gen(
            "f",
            &names(&["x"]),
            vec![Branch::new(names(&["x"]), ret("a", &names(&["x"])))],
        );
        let s = subst_vars(&t, &names(&["x"]), &names(&["w"]));
        assert_eq!(s.to_string(), "f(w){x. a(x)}");
    }

    #[test]
    fn label_substitution_clauses() {
        let q = ret("c", &names(&["u", "u"]));
        let t = ret("a", &names(&["x"]));
        assert_eq!(
            subst_label(&t, &"a".into(), &names(&["u"]), &q),
            ret("c", &names(&["x", "x"]))
        );
        let w = ret("w", &names(&["x"]));
        assert_eq!(subst_label(&w, &"a".into(), &names(&["u"]), &q), w);
    }

    #[test]
    fn label_substitution_stops_at_shadowing_loop() {
        let t = lp("a", &names(&["x"]), &names(&["u"]), ret("a", &names(&["u"])));
        let s = subst_label(&t, &"a".into(), &names(&["v"]), &ret("b", &names(&["v"])));
        assert_eq!(s, t);
    }

    #[test]
    fn label_substitution_renames_capturing_loop_label() {
        // q mentions label b, which the loop binds
        let t = lp("b", &names(&["x"]), &names(&["u"]), gen(
            "f",
            &names(&["u"]),
            vec![
                Branch::new(vec![], ret("b", &names(&["u"]))),
                Branch::new(vec![], ret("a", &names(&["u"]))),
            ],
        ));
        let s = subst_label(&t, &"a".into(), &names(&["v"]), &ret("b", &names(&["v"])));
        assert_eq!(s.to_string(), "loop b0(x){u. f(u){. b0(u)}{. b(u)}}");
    }

    #[test]
    fn label_substitution_renames_capturing_binders() {
        // q has free variable y, the branch binds y
        let t = gen(
            "f",
            &names(&["x"]),
            vec![Branch::new(names(&["y"]), ret("a", &names(&["y"])))],
        );
        let q = ret("c", &names(&["v", "y"]));
        let s = subst_label(&t, &"a".into(), &names(&["v"]), &q);
        assert_eq!(s.to_string(), "f(x){y0. c(y0, y)}");
    }

    #[test]
    fn simultaneous_label_swap() {
        let t = gen(
            "b",
            &names(&["x"]),
            vec![
                Branch::new(vec![], ret("a1", &[])),
                Branch::new(vec![], ret("a2", &[])),
            ],
        );
        let s = subst_labels(&t, &[
            LabelSub::new("a1", &[], ret("a2", &[])),
            LabelSub::new("a2", &[], ret("a1", &[])),
        ]);
        assert_eq!(s.to_string(), "b(x){. a2()}{. a1()}");
    }

    #[test]
    fn rename_labels_is_a_coaction() {
        let t = gen(
            "b",
            &names(&["x"]),
            vec![
                Branch::new(vec![], ret("a1", &names(&["x"]))),
                Branch::new(vec![], ret("a2", &names(&["x"]))),
            ],
        );
        let s = rename_labels(&t, &[("a1".into(), "a".into()), ("a2".into(), "a".into())]);
        assert_eq!(s.to_string(), "b(x){. a(x)}{. a(x)}");
    }
}

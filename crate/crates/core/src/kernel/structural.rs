use std::collections::BTreeSet;

use thiserror::Error;

use super::name::{fresh_like, Name};
use super::subst::{rename_labels, subst_vars};
use super::term::{Branch, Term};
use super::types::{BasicType, Context, Index};

/// A judgement `ctx ⊢ term : idx`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Judgement {
    pub ctx: Context,
    pub term: Term,
    pub idx: Index,
}

impl Judgement {
    pub fn new(ctx: Context, term: Term, idx: Index) -> Self {
        Judgement { ctx, term, idx }
    }
}

/// The derivable structural rules. Positions are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Structural {
    /// swap index entries `pos` and `pos + 1`
    LblExchange { pos: usize },
    /// merge the adjacent labels `a1, a2` of equal signature into `a`
    LblContract { a1: Name, a2: Name, a: Name },
    LblWeaken { pos: usize, label: Name, sig: Vec<BasicType> },
    /// swap outputs `pos` and `pos + 1` of `label`
    RExch { label: Name, pos: usize },
    /// duplicate output `pos` of `label`
    RCopy { label: Name, pos: usize },
    /// drop output `pos` of `label`
    RDisc { label: Name, pos: usize },
    VarExch { pos: usize },
    /// merge the adjacent variables `x1, x2` of equal type into `x`
    VarContract { x1: Name, x2: Name, x: Name },
    VarWeaken { pos: usize, var: Name, ty: BasicType },
    WhiskL { var: Name, ty: BasicType },
    WhiskR { var: Name, ty: BasicType },
    /// relabel along a finite function into `target`
    Coaction { map: Vec<(Name, Name)>, target: Index },
}

impl Structural {
    pub fn id(&self) -> &'static str {
        match self {
            Structural::LblExchange { .. } => "lbl-exchange",
            Structural::LblContract { .. } => "lbl-contract",
            Structural::LblWeaken { .. } => "lbl-weaken",
            Structural::RExch { .. } => "r-exch",
            Structural::RCopy { .. } => "r-copy",
            Structural::RDisc { .. } => "r-disc",
            Structural::VarExch { .. } => "var-exch",
            Structural::VarContract { .. } => "var-contract",
            Structural::VarWeaken { .. } => "var-weaken",
            Structural::WhiskL { .. } => "whisk-l",
            Structural::WhiskR { .. } => "whisk-r",
            Structural::Coaction { .. } => "coaction",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{rule} does not apply: {reason}")]
pub struct RuleInapplicable {
    pub rule: &'static str,
    pub reason: String,
}

/// Applies a structural rule to a judgement, returning the transformed
/// judgement.
pub fn structural(j: &Judgement, rule: &Structural) -> Result<Judgement, RuleInapplicable> {
    let fail = |reason: String| RuleInapplicable {
        rule: rule.id(),
        reason,
    };
    let Judgement { ctx, term, idx } = j;
    match rule {
        Structural::LblExchange { pos } => {
            if pos + 1 >= idx.len() {
                return Err(fail(format!("no index entries at {pos} and {}", pos + 1)));
            }
            let mut entries = idx.0.clone();
            entries.swap(*pos, pos + 1);
            Ok(Judgement::new(ctx.clone(), term.clone(), Index(entries)))
        }
        Structural::LblContract { a1, a2, a } => {
            let (i, s1) = idx.lookup(a1).ok_or_else(|| fail(format!("no label {a1}")))?;
            if idx.0.get(i + 1).map(|(l, _)| l) != Some(a2) {
                return Err(fail(format!("{a2} does not follow {a1}")));
            }
            if idx.0[i + 1].1 != s1 {
                return Err(fail("signatures differ".into()));
            }
            if idx.0.iter().any(|(l, _)| l == a && l != a1 && l != a2) {
                return Err(fail(format!("{a} already in the index")));
            }
            let mut entries = idx.0.clone();
            entries.splice(i..i + 2, [(a.clone(), s1.to_vec())]);
            let t = rename_labels(term, &[(a1.clone(), a.clone()), (a2.clone(), a.clone())]);
            Ok(Judgement::new(ctx.clone(), t, Index(entries)))
        }
        Structural::LblWeaken { pos, label, sig } => {
            if *pos > idx.len() {
                return Err(fail(format!("position {pos} out of range")));
            }
            if idx.lookup(label).is_some() {
                return Err(fail(format!("{label} already in the index")));
            }
            let mut entries = idx.0.clone();
            entries.insert(*pos, (label.clone(), sig.clone()));
            Ok(Judgement::new(ctx.clone(), term.clone(), Index(entries)))
        }
        Structural::RExch { label, pos } | Structural::RCopy { label, pos } | Structural::RDisc { label, pos } => {
            let (i, sig) = idx.lookup(label).ok_or_else(|| fail(format!("no label {label}")))?;
            let mut sig = sig.to_vec();
            let need = if matches!(rule, Structural::RExch { .. }) { pos + 2 } else { pos + 1 };
            if need > sig.len() {
                return Err(fail(format!("{label} has only {} outputs", sig.len())));
            }
            edit_list(&mut sig, rule, *pos);
            let mut entries = idx.0.clone();
            entries[i].1 = sig;
            let t = map_returns(term, label, &|v: &mut Vec<Name>| edit_list(v, rule, *pos));
            Ok(Judgement::new(ctx.clone(), t, Index(entries)))
        }
        Structural::VarExch { pos } => {
            if pos + 1 >= ctx.len() {
                return Err(fail(format!("no context entries at {pos} and {}", pos + 1)));
            }
            let mut entries = ctx.0.clone();
            entries.swap(*pos, pos + 1);
            let (x, y) = (&entries[*pos].0, &entries[pos + 1].0);
            if x == y {
                return Err(fail(format!("exchanging two copies of {x}")));
            }
            Ok(Judgement::new(Context(entries), term.clone(), idx.clone()))
        }
        Structural::VarContract { x1, x2, x } => {
            let (i, t1) = ctx.lookup(x1).ok_or_else(|| fail(format!("no variable {x1}")))?;
            if ctx.0.get(i + 1).map(|(v, _)| v) != Some(x2) {
                return Err(fail(format!("{x2} does not follow {x1}")));
            }
            if &ctx.0[i + 1].1 != t1 {
                return Err(fail("types differ".into()));
            }
            if ctx.0.iter().any(|(v, _)| v == x && v != x1 && v != x2) {
                return Err(fail(format!("{x} already in the context")));
            }
            let mut entries = ctx.0.clone();
            entries.splice(i..i + 2, [(x.clone(), t1.clone())]);
            let t = subst_vars(term, &[x1.clone(), x2.clone()], &[x.clone(), x.clone()]);
            Ok(Judgement::new(Context(entries), t, idx.clone()))
        }
        Structural::VarWeaken { pos, var, ty } => {
            if *pos > ctx.len() {
                return Err(fail(format!("position {pos} out of range")));
            }
            if ctx.lookup(var).is_some() {
                return Err(fail(format!("{var} already in the context")));
            }
            let mut entries = ctx.0.clone();
            entries.insert(*pos, (var.clone(), ty.clone()));
            Ok(Judgement::new(Context(entries), term.clone(), idx.clone()))
        }
        Structural::WhiskL { var, ty } | Structural::WhiskR { var, ty } => {
            if ctx.lookup(var).is_some() {
                return Err(fail(format!("{var} already in the context")));
            }
            let left = matches!(rule, Structural::WhiskL { .. });
            let mut c = ctx.0.clone();
            c.push((var.clone(), ty.clone()));
            let entries = idx
                .0
                .iter()
                .map(|(l, s)| {
                    let mut s = s.clone();
                    if left {
                        s.insert(0, ty.clone());
                    } else {
                        s.push(ty.clone());
                    }
                    (l.clone(), s)
                })
                .collect();
            Ok(Judgement::new(Context(c), whisker(term, var, left), Index(entries)))
        }
        Structural::Coaction { map, target } => {
            for (l, s) in &idx.0 {
                let (_, to) = map
                    .iter()
                    .find(|(a, _)| a == l)
                    .ok_or_else(|| fail(format!("{l} is not mapped")))?;
                let (_, ts) = target
                    .lookup(to)
                    .ok_or_else(|| fail(format!("{to} is not in the target index")))?;
                if ts != s.as_slice() {
                    return Err(fail(format!("{l} and {to} have different signatures")));
                }
            }
            Ok(Judgement::new(ctx.clone(), rename_labels(term, map), target.clone()))
        }
    }
}

fn edit_list<T: Clone>(v: &mut Vec<T>, rule: &Structural, pos: usize) {
    match rule {
        Structural::RExch { .. } => v.swap(pos, pos + 1),
        Structural::RCopy { .. } => {
            let t = v[pos].clone();
            v.insert(pos + 1, t)
        }
        Structural::RDisc { .. } => {
            v.remove(pos);
        }
        _ => unreachable!(),
    }
}

/// Rewrites the argument list of every free Return at `label`.
fn map_returns(term: &Term, label: &Name, edit: &dyn Fn(&mut Vec<Name>)) -> Term {
    match term {
        Term::Return { label: l, args } if l == label => {
            let mut args = args.clone();
            edit(&mut args);
            Term::Return {
                label: l.clone(),
                args,
            }
        }
        Term::Return { .. } => term.clone(),
        Term::Gen {
            gen,
            args,
            branches,
        } => Term::Gen {
            gen: gen.clone(),
            args: args.clone(),
            branches: branches
                .iter()
                .map(|b| Branch::new(b.binders.clone(), map_returns(&b.body, label, edit)))
                .collect(),
        },
        Term::Loop { label: l, .. } if l == label => term.clone(),
        Term::Loop {
            label: l,
            args,
            binders,
            body,
        } => Term::Loop {
            label: l.clone(),
            args: args.clone(),
            binders: binders.clone(),
            body: Box::new(map_returns(body, label, edit)),
        },
    }
}

/// `X × p` (left) or `p × X` (right): every Return carries `w` along, and
/// loops thread it through their state.
fn whisker(term: &Term, w: &Name, left: bool) -> Term {
    let add = |xs: &[Name]| {
        let mut v = xs.to_vec();
        if left {
            v.insert(0, w.clone());
        } else {
            v.push(w.clone());
        }
        v
    };
    match term {
        Term::Return { label, args } => Term::Return {
            label: label.clone(),
            args: add(args),
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
                .map(|b| {
                    let (binders, body) = avoid_binder(&b.binders, &b.body, w);
                    Branch::new(binders, whisker(&body, w, left))
                })
                .collect(),
        },
        Term::Loop {
            label,
            args,
            binders,
            body,
        } => {
            let (binders, body) = avoid_binder(binders, body, w);
            Term::Loop {
                label: label.clone(),
                args: add(args),
                binders: add(&binders),
                body: Box::new(whisker(&body, w, left)),
            }
        }
    }
}

/// Renames a binder equal to `w` so that `w` keeps referring to the
/// whiskered variable.
fn avoid_binder(binders: &[Name], body: &Term, w: &Name) -> (Vec<Name>, Term) {
    if !binders.contains(w) {
        return (binders.to_vec(), body.clone());
    }
    let mut avoid: BTreeSet<Name> = body.all_names();
    avoid.extend(binders.iter().cloned());
    avoid.insert(w.clone());
    let fresh = fresh_like(w, &avoid);
    let new: Vec<Name> = binders
        .iter()
        .map(|b| if b == w { fresh.clone() } else { b.clone() })
        .collect();
    // leftmost binder wins, so a repeated `w` still resolves to the first copy
    (new, subst_vars(body, &[w.clone()], &[fresh]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::name::names;
    use crate::kernel::term::{gen, lp, ret};

    fn j(ctx: &[(&str, &str)], t: Term, idx: Vec<(&str, Vec<&str>)>) -> Judgement {
        Judgement::new(
            Context::from_pairs(ctx),
            t,
            Index(idx.into_iter().map(|(l, s)| (l.into(), names(&s))).collect()),
        )
    }

    #[test]
    fn label_contraction() {
        let a = j(&[("x", "B")], ret("a1", &names(&["x"])), vec![("a1", vec!["B"]), ("a2", vec!["B"])]);
        let r = structural(&a, &Structural::LblContract {
            a1: "a1".into(),
            a2: "a2".into(),
            a: "a".into(),
        })
        .unwrap();
        assert_eq!(r.term, ret("a", &names(&["x"])));
        assert_eq!(r.idx.labels(), names(&["a"]));
    }

    #[test]
    fn return_copy() {
        let a = j(&[("x", "B"), ("y", "C")], ret("a", &names(&["y", "x"])), vec![("a", vec!["C", "B"])]);
        let r = structural(&a, &Structural::RCopy { label: "a".into(), pos: 1 }).unwrap();
        assert_eq!(r.term, ret("a", &names(&["y", "x", "x"])));
        assert_eq!(r.idx.0[0].1, names(&["C", "B", "B"]));
    }

    #[test]
    fn whisker_right() {
        let a = j(&[("x", "B")], ret("a", &names(&["x"])), vec![("a", vec!["B"])]);
        let r = structural(&a, &Structural::WhiskR { var: "w".into(), ty: "C".into() }).unwrap();
        assert_eq!(r.term, ret("a", &names(&["x", "w"])));
    }

    #[test]
    fn whisker_through_loop_renames_clashing_binder() {
        let t = lp("b", &names(&["x"]), &names(&["w"]), ret("b", &names(&["w"])));
        let a = j(&[("x", "B")], t, vec![]);
        let r = structural(&a, &Structural::WhiskR { var: "w".into(), ty: "C".into() }).unwrap();
        assert_eq!(r.term.to_string(), "loop b(x, w){w0, w. b(w0, w)}");
    }

    #[test]
    fn return_edits_respect_shadowing() {
        let inner = lp("a", &names(&["x"]), &names(&["u"]), ret("a", &names(&["u"])));
        let t = gen(
            "f",
            &names(&["x"]),
            vec![Branch::new(vec![], inner.clone()), Branch::new(vec![], ret("a", &names(&["x"])))],
        );
        let a = j(&[("x", "B")], t, vec![("a", vec!["B"])]);
        let r = structural(&a, &Structural::RDisc { label: "a".into(), pos: 0 }).unwrap();
        assert_eq!(r.term.to_string(), format!("f(x){{. {inner}}}{{. a()}}"));
    }
}

use std::collections::BTreeSet;
use std::fmt;

use super::name::Name;

/// A term of the internal language.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Term {
    /// `α(x̄)`: jump to a label with the listed variables.
    Return { label: Name, args: Vec<Name> },
    /// `f(x̄){ȳ₁. p₁}…{ȳₗ. pₗ}`: call a generator and continue in one branch.
    Gen {
        gen: Name,
        args: Vec<Name>,
        branches: Vec<Branch>,
    },
    /// `loop α(x̄){ū. p}`: iterate `p` while it returns to `α`.
    Loop {
        label: Name,
        args: Vec<Name>,
        binders: Vec<Name>,
        body: Box<Term>,
    },
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Branch {
    pub binders: Vec<Name>,
    pub body: Term,
}

impl Branch {
    pub fn new(binders: Vec<Name>, body: Term) -> Self {
        Branch { binders, body }
    }
}

pub fn ret(label: impl Into<Name>, args: &[Name]) -> Term {
    Term::Return {
        label: label.into(),
        args: args.to_vec(),
    }
}

pub fn gen(g: impl Into<Name>, args: &[Name], branches: Vec<Branch>) -> Term {
    Term::Gen {
        gen: g.into(),
        args: args.to_vec(),
        branches,
    }
}

pub fn lp(label: impl Into<Name>, args: &[Name], binders: &[Name], body: Term) -> Term {
    Term::Loop {
        label: label.into(),
        args: args.to_vec(),
        binders: binders.to_vec(),
        body: Box::new(body),
    }
}

impl Term {
    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut out);
        out
    }

    fn collect_free_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Return { args, .. } => out.extend(args.iter().cloned()),
            Term::Gen { args, branches, .. } => {
                out.extend(args.iter().cloned());
                for b in branches {
                    let mut inner = b.body.free_vars();
                    for y in &b.binders {
                        inner.remove(y);
                    }
                    out.extend(inner);
                }
            }
            Term::Loop {
                args,
                binders,
                body,
                ..
            } => {
                out.extend(args.iter().cloned());
                let mut inner = body.free_vars();
                for u in binders {
                    inner.remove(u);
                }
                out.extend(inner);
            }
        }
    }

    pub fn free_labels(&self) -> BTreeSet<Name> {
        match self {
            Term::Return { label, .. } => std::iter::once(label.clone()).collect(),
            Term::Gen { branches, .. } => branches
                .iter()
                .flat_map(|b| b.body.free_labels())
                .collect(),
            Term::Loop { label, body, .. } => {
                let mut s = body.free_labels();
                s.remove(label);
                s
            }
        }
    }

    /// Every identifier occurring anywhere in the term, bound or free.
    pub fn all_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Return { label, args } => {
                out.insert(label.clone());
                out.extend(args.iter().cloned());
            }
            Term::Gen {
                gen,
                args,
                branches,
            } => {
                out.insert(gen.clone());
                out.extend(args.iter().cloned());
                for b in branches {
                    out.extend(b.binders.iter().cloned());
                    b.body.collect_names(out);
                }
            }
            Term::Loop {
                label,
                args,
                binders,
                body,
            } => {
                out.insert(label.clone());
                out.extend(args.iter().cloned());
                out.extend(binders.iter().cloned());
                body.collect_names(out);
            }
        }
    }

    /// Generators mentioned anywhere in the term.
    pub fn generators(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_gens(&mut out);
        out
    }

    fn collect_gens(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Return { .. } => {}
            Term::Gen { gen, branches, .. } => {
                out.insert(gen.clone());
                for b in branches {
                    b.body.collect_gens(out);
                }
            }
            Term::Loop { body, .. } => body.collect_gens(out),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Return { .. } => 1,
            Term::Gen { branches, .. } => 1 + branches.iter().map(|b| b.body.size()).sum::<usize>(),
            Term::Loop { body, .. } => 1 + body.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Return { .. } => 0,
            Term::Gen { branches, .. } => {
                1 + branches.iter().map(|b| b.body.depth()).max().unwrap_or(0)
            }
            Term::Loop { body, .. } => 1 + body.depth(),
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, xs: &[Name]) -> fmt::Result {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

fn write_binders(f: &mut fmt::Formatter<'_>, xs: &[Name]) -> fmt::Result {
    write_list(f, xs)?;
    f.write_str(". ")
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Return { label, args } => {
                write!(f, "{label}(")?;
                write_list(f, args)?;
                f.write_str(")")
            }
            Term::Gen {
                gen,
                args,
                branches,
            } => {
                write!(f, "{gen}(")?;
                write_list(f, args)?;
                f.write_str(")")?;
                for b in branches {
                    f.write_str("{")?;
                    write_binders(f, &b.binders)?;
                    write!(f, "{}}}", b.body)?;
                }
                Ok(())
            }
            Term::Loop {
                label,
                args,
                binders,
                body,
            } => {
                write!(f, "loop {label}(")?;
                write_list(f, args)?;
                f.write_str("){")?;
                write_binders(f, binders)?;
                write!(f, "{body}}}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::name::names;

    #[test]
    fn display_forms() {
        let t = gen(
            "f",
            &names(&["x"]),
            vec![
                Branch::new(names(&["u"]), ret("a", &names(&["u"]))),
                Branch::new(vec![], ret("b", &[])),
            ],
        );
        assert_eq!(t.to_string(), "f(x){u. a(u)}{. b()}");
        let l = lp("a", &names(&["x"]), &names(&["u"]), ret("a", &names(&["u"])));
        assert_eq!(l.to_string(), "loop a(x){u. a(u)}");
    }

    #[test]
    fn free_vars_respect_binders() {
        let l = lp(
            "b",
            &names(&["x"]),
            &names(&["y"]),
            ret("a", &names(&["x", "y", "z"])),
        );
        let fv: Vec<_> = l.free_vars().into_iter().map(|n| n.to_string()).collect();
        assert_eq!(fv, vec!["x", "z"]);
        let fl: Vec<_> = l.free_labels().into_iter().map(|n| n.to_string()).collect();
        assert_eq!(fl, vec!["a"]);
    }
}

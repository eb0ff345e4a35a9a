use std::fmt;

use thiserror::Error;

use super::name::Name;
use super::term::Term;
use super::types::{BasicType, Context, Index, Signature};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Return,
    Generator,
    Loop,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Return => "RETURN",
            Rule::Generator => "GENERATOR",
            Rule::Loop => "LOOP",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TypeErrorKind {
    #[error("unknown variable `{0}`")]
    UnknownVariable(Name),
    #[error("unknown label `{0}`")]
    UnknownLabel(Name),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(Name),
    #[error("`{what}` expects {expected} arguments, got {found}")]
    ArityMismatch {
        what: Name,
        expected: usize,
        found: usize,
    },
    #[error("`{var}` has type {found}, expected {expected}")]
    TypeMismatch {
        var: Name,
        expected: BasicType,
        found: BasicType,
    },
}

/// A typing failure together with the rule that could not be applied and
/// the offending subterm.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{rule}: {kind} in `{subterm}`")]
pub struct TypeError {
    pub rule: Rule,
    pub kind: TypeErrorKind,
    pub subterm: Term,
}

/// Checks `ctx ⊢ term : idx`.
pub fn typecheck(term: &Term, ctx: &Context, idx: &Index, sig: &Signature) -> Result<(), TypeError> {
    match term {
        Term::Return { label, args } => {
            let fail = |kind| TypeError {
                rule: Rule::Return,
                kind,
                subterm: term.clone(),
            };
            let (_, expected) = idx
                .lookup(label)
                .ok_or_else(|| fail(TypeErrorKind::UnknownLabel(label.clone())))?;
            check_args(label, args, expected, ctx).map_err(fail)
        }
        Term::Gen {
            gen,
            args,
            branches,
        } => {
            let fail = |kind| TypeError {
                rule: Rule::Generator,
                kind,
                subterm: term.clone(),
            };
            let decl = sig
                .generator(gen)
                .ok_or_else(|| fail(TypeErrorKind::UnknownGenerator(gen.clone())))?;
            check_args(gen, args, &decl.inputs, ctx).map_err(fail)?;
            if branches.len() != decl.branches.len() {
                return Err(fail(TypeErrorKind::ArityMismatch {
                    what: gen.clone(),
                    expected: decl.branches.len(),
                    found: branches.len(),
                }));
            }
            for (b, tys) in branches.iter().zip(&decl.branches) {
                if b.binders.len() != tys.len() {
                    return Err(fail(TypeErrorKind::ArityMismatch {
                        what: gen.clone(),
                        expected: tys.len(),
                        found: b.binders.len(),
                    }));
                }
                typecheck(&b.body, &ctx.prepend(&b.binders, tys), idx, sig)?;
            }
            Ok(())
        }
        Term::Loop {
            label,
            args,
            binders,
            body,
        } => {
            let fail = |kind| TypeError {
                rule: Rule::Loop,
                kind,
                subterm: term.clone(),
            };
            let tys = arg_types(args, ctx).map_err(fail)?;
            if binders.len() != args.len() {
                return Err(fail(TypeErrorKind::ArityMismatch {
                    what: label.clone(),
                    expected: args.len(),
                    found: binders.len(),
                }));
            }
            typecheck(body, &ctx.prepend(binders, &tys), &idx.prepend(label, &tys), sig)
        }
    }
}

/// Types of a list of variables in `ctx`.
pub fn arg_types(args: &[Name], ctx: &Context) -> Result<Vec<BasicType>, TypeErrorKind> {
    args.iter()
        .map(|x| {
            ctx.lookup(x)
                .map(|(_, t)| t.clone())
                .ok_or_else(|| TypeErrorKind::UnknownVariable(x.clone()))
        })
        .collect()
}

fn check_args(what: &Name, args: &[Name], expected: &[BasicType], ctx: &Context) -> Result<(), TypeErrorKind> {
    if args.len() != expected.len() {
        return Err(TypeErrorKind::ArityMismatch {
            what: what.clone(),
            expected: expected.len(),
            found: args.len(),
        });
    }
    for (x, want) in args.iter().zip(expected) {
        let (_, got) = ctx
            .lookup(x)
            .ok_or_else(|| TypeErrorKind::UnknownVariable(x.clone()))?;
        if got != want {
            return Err(TypeErrorKind::TypeMismatch {
                var: x.clone(),
                expected: want.clone(),
                found: got.clone(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::name::names;
    use crate::kernel::term::{gen, lp, ret, Branch};
    use crate::kernel::types::GeneratorDecl;

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.add_type("B").unwrap();
        s.add_type("C").unwrap();
        s.add_generator(GeneratorDecl::new("b", names(&["B"]), vec![vec![], vec![]]))
            .unwrap();
        s
    }

    #[test]
    fn return_rule() {
        let ctx = Context::from_pairs(&[("x", "B")]);
        let t = ret("a", &names(&["x"]));
        assert!(typecheck(&t, &ctx, &Index::single("a", names(&["B"])), &sig()).is_ok());
        let err = typecheck(&t, &ctx, &Index::single("a", names(&["C"])), &sig()).unwrap_err();
        assert_eq!(err.rule, Rule::Return);
        assert!(matches!(err.kind, TypeErrorKind::TypeMismatch { .. }));
    }

    #[test]
    fn while_skeleton() {
        let body = gen(
            "b",
            &names(&["u"]),
            vec![
                Branch::new(vec![], ret("a", &names(&["u"]))),
                Branch::new(vec![], ret("eta", &names(&["u"]))),
            ],
        );
        let t = lp("a", &names(&["x"]), &names(&["u"]), body);
        let ctx = Context::from_pairs(&[("x", "B")]);
        assert!(typecheck(&t, &ctx, &Index::single("eta", names(&["B"])), &sig()).is_ok());
    }

    #[test]
    fn errors_name_the_subterm() {
        let t = gen(
            "b",
            &names(&["x"]),
            vec![
                Branch::new(vec![], ret("a", &[])),
                Branch::new(vec![], ret("zz", &[])),
            ],
        );
        let ctx = Context::from_pairs(&[("x", "B")]);
        let err = typecheck(&t, &ctx, &Index::single("a", vec![]), &sig()).unwrap_err();
        assert_eq!(err.kind, TypeErrorKind::UnknownLabel("zz".into()));
        assert_eq!(err.subterm, ret("zz", &[]));
        let err = typecheck(&gen("nope", &[], vec![]), &ctx, &Index::empty(), &sig()).unwrap_err();
        assert_eq!(err.kind, TypeErrorKind::UnknownGenerator("nope".into()));
    }
}

//! Syntax of the internal language: terms, typing, substitution,
//! alpha-equivalence and the derived structural rules.

pub mod alpha;
pub mod cut;
pub mod name;
pub mod structural;
pub mod subst;
pub mod term;
pub mod typecheck;
pub mod types;

pub use alpha::{alpha_eq, canonicalize};
pub use cut::{cut, cut_checked, CutError};
pub use name::{fresh, fresh_like, names, Name, NameKind};
pub use structural::{structural, Judgement, RuleInapplicable, Structural};
pub use subst::{rename_label, rename_labels, subst_label, subst_labels, subst_vars, LabelSub};
pub use term::{gen, lp, ret, Branch, Term};
pub use typecheck::{arg_types, typecheck, Rule, TypeError, TypeErrorKind};
pub use types::{BasicType, Context, GeneratorDecl, Index, Signature, SignatureError};

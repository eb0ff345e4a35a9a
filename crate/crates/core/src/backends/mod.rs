//! The semantic contract shared by the three models, and the evaluator from
//! terms to morphisms.

pub mod checks;
pub mod eval;
pub mod matrix;
pub mod morphism;
pub mod obj;
pub mod scalar;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::kernel::Name;
use crate::models::Model;

pub use checks::{is_constant, is_deterministic, is_total};
pub use eval::{eval, eval_judgement, EvalError, MAX_CARRIER};
pub use matrix::{Kernel, RowAcc};
pub use morphism::{Morphism, ShapeError};
pub use obj::{Carrier, Obj};
pub use scalar::{parse_ratio, ratio, Boolean, Field, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendId {
    Rel,
    Par,
    Stoch,
}

impl BackendId {
    pub const ALL: [BackendId; 3] = [BackendId::Rel, BackendId::Par, BackendId::Stoch];

    pub fn as_str(self) -> &'static str {
        match self {
            BackendId::Rel => "rel",
            BackendId::Par => "par",
            BackendId::Stoch => "stoch",
        }
    }
}

impl fmt::Display for BackendId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BackendId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rel" => Ok(BackendId::Rel),
            "par" => Ok(BackendId::Par),
            "stoch" => Ok(BackendId::Stoch),
            _ => Err(format!("unknown backend `{s}` (expected rel, par or stoch)")),
        }
    }
}

/// A posetal imperative category with finite carriers, presented by its
/// weight semiring, its trace and its generator tables.
pub trait Backend: Copy + Default + fmt::Debug + Send + Sync + 'static {
    type W: Weight;
    const ID: BackendId;

    /// Least fixpoint of a loop body whose first `n` columns feed back into
    /// its `n` rows; returns the exit part.
    fn fix(body: &Kernel<Self::W>, n: usize) -> Kernel<Self::W>;

    /// Backend-specific row constraint.
    fn check_row(row: &[(usize, Self::W)]) -> Result<(), String>;

    fn table(model: &Model, gen: &Name) -> Option<Kernel<Self::W>>;

    fn check_kernel(k: &Kernel<Self::W>) -> Result<(), (usize, String)> {
        k.rows()
            .iter()
            .enumerate()
            .try_for_each(|(i, r)| Self::check_row(r).map_err(|e| (i, e)))
    }
}

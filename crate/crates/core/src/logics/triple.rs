//! Program-logic triples and their exact validity checks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backends::{Backend, EvalError, Morphism, ShapeError};
use crate::combinators::{Command, Predicate, State, StateSpace};
use crate::models::Model;

use super::sem::{assert_m, cmd_m, pred_m, state_m};

/// What the pre and post conditions are.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cell {
    /// `s ; c` against a post state `t`.
    State,
    /// `p` against `c ; q`.
    Pred,
    /// `assert p ; c` against `c ; assert q`.
    Assert,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TripleShape {
    StateCorrect,
    PredCorrect,
    AssertCorrect,
    StateIncorrect,
    PredIncorrect,
    AssertIncorrect,
    RelStateCorrect,
    RelPredCorrect,
    RelAssertCorrect,
    RelStateIncorrect,
    RelPredIncorrect,
    RelAssertIncorrect,
}

impl TripleShape {
    pub const ALL: [TripleShape; 12] = [
        TripleShape::StateCorrect,
        TripleShape::PredCorrect,
        TripleShape::AssertCorrect,
        TripleShape::StateIncorrect,
        TripleShape::PredIncorrect,
        TripleShape::AssertIncorrect,
        TripleShape::RelStateCorrect,
        TripleShape::RelPredCorrect,
        TripleShape::RelAssertCorrect,
        TripleShape::RelStateIncorrect,
        TripleShape::RelPredIncorrect,
        TripleShape::RelAssertIncorrect,
    ];

    pub fn new(cell: Cell, correct: bool, relational: bool) -> TripleShape {
        use TripleShape::*;
        match (cell, correct, relational) {
            (Cell::State, true, false) => StateCorrect,
            (Cell::Pred, true, false) => PredCorrect,
            (Cell::Assert, true, false) => AssertCorrect,
            (Cell::State, false, false) => StateIncorrect,
            (Cell::Pred, false, false) => PredIncorrect,
            (Cell::Assert, false, false) => AssertIncorrect,
            (Cell::State, true, true) => RelStateCorrect,
            (Cell::Pred, true, true) => RelPredCorrect,
            (Cell::Assert, true, true) => RelAssertCorrect,
            (Cell::State, false, true) => RelStateIncorrect,
            (Cell::Pred, false, true) => RelPredIncorrect,
            (Cell::Assert, false, true) => RelAssertIncorrect,
        }
    }

    pub fn cell(self) -> Cell {
        use TripleShape::*;
        match self {
            StateCorrect | StateIncorrect | RelStateCorrect | RelStateIncorrect => Cell::State,
            PredCorrect | PredIncorrect | RelPredCorrect | RelPredIncorrect => Cell::Pred,
            AssertCorrect | AssertIncorrect | RelAssertCorrect | RelAssertIncorrect => Cell::Assert,
        }
    }

    pub fn correct(self) -> bool {
        use TripleShape::*;
        matches!(
            self,
            StateCorrect | PredCorrect | AssertCorrect | RelStateCorrect | RelPredCorrect | RelAssertCorrect
        )
    }

    pub fn relational(self) -> bool {
        self as usize >= TripleShape::RelStateCorrect as usize
    }

    /// The same cell and direction, without the coupling.
    pub fn unary(self) -> TripleShape {
        TripleShape::new(self.cell(), self.correct(), false)
    }

    pub fn as_str(self) -> &'static str {
        use TripleShape::*;
        match self {
            StateCorrect => "state-correct",
            PredCorrect => "pred-correct",
            AssertCorrect => "assert-correct",
            StateIncorrect => "state-incorrect",
            PredIncorrect => "pred-incorrect",
            AssertIncorrect => "assert-incorrect",
            RelStateCorrect => "rel-state-correct",
            RelPredCorrect => "rel-pred-correct",
            RelAssertCorrect => "rel-assert-correct",
            RelStateIncorrect => "rel-state-incorrect",
            RelPredIncorrect => "rel-pred-incorrect",
            RelAssertIncorrect => "rel-assert-incorrect",
        }
    }
}

impl fmt::Display for TripleShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TripleShape {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        TripleShape::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown triple shape `{s}`"))
    }
}

/// The entry where the required inequality fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub input: String,
    pub output: String,
    /// The side that should be smaller.
    pub lhs: String,
    pub rhs: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {} -> {}: {} is not below {}", self.input, self.output, self.lhs, self.rhs)
    }
}

#[derive(Debug, Error)]
pub enum TripleError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("{0}")]
    Ill(String),
}

/// The two sides of the triple's inequality, smaller side first.
pub fn sides<B: Backend>(
    shape: TripleShape,
    pre: &Morphism<B>,
    c: &Morphism<B>,
    post: &Morphism<B>,
) -> Result<(Morphism<B>, Morphism<B>), TripleError> {
    let (a, b) = match shape.cell() {
        Cell::State => (pre.then(c)?, post.clone()),
        Cell::Pred => (pre.clone(), c.then(post)?),
        Cell::Assert => (assert_m(pre).then(c)?, c.then(&assert_m(post))?),
    };
    a.same_type(&b)?;
    Ok(if shape.correct() { (a, b) } else { (b, a) })
}

/// Checks a unary triple on morphisms; `Ok(None)` means valid.
pub fn check_unary<B: Backend>(
    shape: TripleShape,
    pre: &Morphism<B>,
    c: &Morphism<B>,
    post: &Morphism<B>,
) -> Result<Option<Violation>, TripleError> {
    let (lo, hi) = sides(shape, pre, c, post)?;
    Ok(violation(&lo, &hi))
}

pub fn violation<B: Backend>(lo: &Morphism<B>, hi: &Morphism<B>) -> Option<Violation> {
    let (i, j) = lo.kernel.first_violation(&hi.kernel)?;
    Some(Violation {
        input: lo.dom.show(i),
        output: show_col(&lo.cod, j),
        lhs: lo.kernel.get(i, j).to_string(),
        rhs: hi.kernel.get(i, j).to_string(),
    })
}

/// Renders a column of a tagged coproduct of blocks.
pub fn show_col(cod: &[crate::backends::Obj], mut j: usize) -> String {
    for (k, o) in cod.iter().enumerate() {
        if j < o.size() {
            return if cod.len() == 1 {
                o.show(j)
            } else {
                format!("#{k}{}", o.show(j))
            };
        }
        j -= o.size();
    }
    format!("#?{j}")
}

/// Pre or post condition of a unary triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cond {
    Pred(Predicate),
    State(State),
}

/// A unary triple over a state space.
#[derive(Clone, Debug)]
pub struct Triple {
    pub shape: TripleShape,
    pub space: StateSpace,
    pub pre: Cond,
    pub cmd: Command,
    pub post: Cond,
}

pub fn cond_m<B: Backend>(space: &StateSpace, c: &Cond, model: &Model) -> Result<Morphism<B>, EvalError> {
    match c {
        Cond::Pred(p) => pred_m(space, p, model),
        Cond::State(s) => state_m(space, s, model),
    }
}

impl Triple {
    pub fn check<B: Backend>(&self, model: &Model) -> Result<Option<Violation>, TripleError> {
        if self.shape.relational() {
            return Err(TripleError::Ill(format!("{} needs two programs", self.shape)));
        }
        let want_state = self.shape.cell() == Cell::State;
        for c in [&self.pre, &self.post] {
            if matches!(c, Cond::State(_)) != want_state {
                return Err(TripleError::Ill(format!(
                    "{} expects {} conditions",
                    self.shape,
                    if want_state { "state" } else { "predicate" }
                )));
            }
        }
        let pre = cond_m::<B>(&self.space, &self.pre, model)?;
        let c = cmd_m::<B>(&self.space, &self.cmd, model)?;
        let post = cond_m::<B>(&self.space, &self.post, model)?;
        check_unary(self.shape, &pre, &c, &post)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::{ratio, Kernel, Obj};
    use crate::backends::Carrier;
    use crate::models::Stoch;
    use num_rational::BigRational;

    type S = Stoch<BigRational>;

    fn bool_obj() -> Obj {
        Obj::base(Carrier::new("Bool", &["0", "1"]))
    }

    #[test]
    fn shape_names_round_trip() {
        for s in TripleShape::ALL {
            assert_eq!(s.as_str().parse::<TripleShape>().unwrap(), s);
            assert_eq!(TripleShape::new(s.cell(), s.correct(), s.relational()), s);
        }
    }

    #[test]
    fn coin_flip_triples() {
        let x = bool_obj();
        let coin = Morphism::<S>::new(x.clone(), vec![x.clone()], Kernel::from_dense(vec![vec![ratio(1, 2), ratio(1, 2)]; 2], 2)).unwrap();
        let one = Morphism::<S>::new(x.clone(), vec![Obj::unit()], Kernel::from_dense(vec![vec![ratio(0, 1)], vec![ratio(1, 1)]], 1)).unwrap();
        let top = Morphism::<S>::new(x.clone(), vec![Obj::unit()], Kernel::from_dense(vec![vec![ratio(1, 1)]; 2], 1)).unwrap();
        let half = Morphism::<S>::new(x.clone(), vec![Obj::unit()], Kernel::from_dense(vec![vec![ratio(1, 2)]; 2], 1)).unwrap();
        // coin ; [x = 1] is 1/2 everywhere
        assert!(check_unary(TripleShape::PredCorrect, &half, &coin, &one).unwrap().is_none());
        assert!(check_unary(TripleShape::PredIncorrect, &half, &coin, &one).unwrap().is_none());
        let v = check_unary(TripleShape::PredCorrect, &top, &coin, &one).unwrap().unwrap();
        assert_eq!((v.lhs.as_str(), v.rhs.as_str()), ("1", "1/2"));
        let s = Morphism::<S>::new(Obj::unit(), vec![x.clone()], Kernel::from_dense(vec![vec![ratio(1, 1), ratio(0, 1)]], 2)).unwrap();
        let t = Morphism::<S>::new(Obj::unit(), vec![x.clone()], Kernel::from_dense(vec![vec![ratio(1, 2), ratio(1, 2)]], 2)).unwrap();
        assert!(check_unary(TripleShape::StateCorrect, &s, &coin, &t).unwrap().is_none());
        assert!(check_unary(TripleShape::StateIncorrect, &s, &coin, &t).unwrap().is_none());
    }
}

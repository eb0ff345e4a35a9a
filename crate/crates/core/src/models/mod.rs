//! The three concrete backends over finite carriers, and the model data
//! (carriers plus generator tables) they interpret terms in.

pub mod file;
pub mod par;
pub mod rel;
pub mod stoch;

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::backends::{BackendId, Boolean, Carrier, Kernel, Obj};
use crate::kernel::{BasicType, GeneratorDecl, Name, Signature, SignatureError};

pub use file::{GenFile, ModelFile};
pub use par::{par_fix, Par};
pub use rel::{rel_fix, Rel};
pub use stoch::{stoch_fix, Stoch};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("unknown type `{0}`")]
    UnknownType(Name),
    #[error("type `{0}` has an empty carrier")]
    EmptyCarrier(Name),
    #[error("type `{ty}` lists element `{elem}` twice")]
    DuplicateElement { ty: Name, elem: String },
    #[error("`{gen}` ({backend}): {what}: expected {expected}, found {found}")]
    ArityMismatch {
        gen: Name,
        backend: BackendId,
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("`{gen}` ({backend}) row {row}: column {col} out of range")]
    BadIndex {
        gen: Name,
        backend: BackendId,
        row: usize,
        col: usize,
    },
    #[error("`{gen}` (stoch) row {row}: `{text}` is not an exact rational p/q")]
    NonRational { gen: Name, row: usize, text: String },
    #[error("`{gen}` (stoch) row {row}: negative weight")]
    NegativeWeight { gen: Name, row: usize },
    #[error("`{gen}` (stoch) row {row}: mass {mass} exceeds 1")]
    RowMassExceedsOne { gen: Name, row: usize, mass: BigRational },
    #[error("`{gen}` (par) row {row}: more than one output")]
    NotPartial { gen: Name, row: usize },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(Name),
}

/// Generator interpretations, one optional table per backend.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GenTables {
    pub rel: BTreeMap<Name, Kernel<Boolean>>,
    pub par: BTreeMap<Name, Kernel<Boolean>>,
    pub stoch: BTreeMap<Name, Kernel<BigRational>>,
}

/// A signature with finite carriers and generator tables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Model {
    pub sig: Signature,
    pub carriers: BTreeMap<Name, Carrier>,
    pub tables: GenTables,
}

impl Model {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_type(&mut self, name: impl Into<Name>, elems: &[&str]) -> Result<(), ModelError> {
        let name = name.into();
        if elems.is_empty() {
            return Err(ModelError::EmptyCarrier(name));
        }
        for (i, e) in elems.iter().enumerate() {
            if elems[..i].contains(e) {
                return Err(ModelError::DuplicateElement {
                    ty: name,
                    elem: e.to_string(),
                });
            }
        }
        self.sig.add_type(name.clone())?;
        self.carriers.insert(name.clone(), Carrier::new(name, elems));
        Ok(())
    }

    pub fn carrier(&self, ty: &Name) -> Result<&Carrier, ModelError> {
        self.carriers
            .get(ty)
            .ok_or_else(|| ModelError::UnknownType(ty.clone()))
    }

    pub fn obj(&self, types: &[BasicType]) -> Result<Obj, ModelError> {
        Ok(Obj::new(
            types
                .iter()
                .map(|t| self.carrier(t).cloned())
                .collect::<Result<_, _>>()?,
        ))
    }

    /// Domain and branch objects of a declared generator.
    pub fn gen_shape(&self, gen: &Name) -> Result<(Obj, Vec<Obj>), ModelError> {
        let decl = self
            .sig
            .generator(gen)
            .ok_or_else(|| ModelError::UnknownGenerator(gen.clone()))?;
        let dom = self.obj(&decl.inputs)?;
        let cods = decl
            .branches
            .iter()
            .map(|b| self.obj(b))
            .collect::<Result<_, _>>()?;
        Ok((dom, cods))
    }

    pub fn declare(&mut self, decl: GeneratorDecl) -> Result<(), ModelError> {
        self.sig.add_generator(decl)?;
        Ok(())
    }

    fn check_shape<W: crate::backends::Weight>(&self, gen: &Name, backend: BackendId, k: &Kernel<W>) -> Result<(), ModelError> {
        let (dom, cods) = self.gen_shape(gen)?;
        let cols: usize = cods.iter().map(Obj::size).sum();
        if k.n_rows() != dom.size() {
            return Err(ModelError::ArityMismatch {
                gen: gen.clone(),
                backend,
                what: "rows",
                expected: dom.size(),
                found: k.n_rows(),
            });
        }
        if k.n_cols() != cols {
            return Err(ModelError::ArityMismatch {
                gen: gen.clone(),
                backend,
                what: "columns",
                expected: cols,
                found: k.n_cols(),
            });
        }
        Ok(())
    }

    pub fn set_rel(&mut self, gen: &Name, k: Kernel<Boolean>) -> Result<(), ModelError> {
        self.check_shape(gen, BackendId::Rel, &k)?;
        self.tables.rel.insert(gen.clone(), k);
        Ok(())
    }

    pub fn set_par(&mut self, gen: &Name, k: Kernel<Boolean>) -> Result<(), ModelError> {
        self.check_shape(gen, BackendId::Par, &k)?;
        for (row, r) in k.rows().iter().enumerate() {
            if r.len() > 1 {
                return Err(ModelError::NotPartial { gen: gen.clone(), row });
            }
        }
        self.tables.par.insert(gen.clone(), k);
        Ok(())
    }

    pub fn set_stoch(&mut self, gen: &Name, k: Kernel<BigRational>) -> Result<(), ModelError> {
        self.check_shape(gen, BackendId::Stoch, &k)?;
        for row in 0..k.n_rows() {
            if k.row(row).iter().any(|(_, w)| *w < BigRational::zero()) {
                return Err(ModelError::NegativeWeight {
                    gen: gen.clone(),
                    row,
                });
            }
            let mass = k.row_mass(row);
            if mass > BigRational::one() {
                return Err(ModelError::RowMassExceedsOne {
                    gen: gen.clone(),
                    row,
                    mass,
                });
            }
        }
        self.tables.stoch.insert(gen.clone(), k);
        Ok(())
    }

    /// Declares a generator and interprets it in all three backends by a
    /// partial function on element indices (`None` = undefined / empty).
    pub fn add_function(
        &mut self,
        decl: GeneratorDecl,
        f: &[Option<usize>],
    ) -> Result<(), ModelError> {
        let name = decl.name.clone();
        self.declare(decl)?;
        let (_, cods) = self.gen_shape(&name)?;
        let cols = cods.iter().map(Obj::size).sum();
        self.set_rel(&name, Kernel::partial_function(f, cols))?;
        self.set_par(&name, Kernel::partial_function(f, cols))?;
        self.set_stoch(&name, Kernel::partial_function(f, cols))
    }

    /// Whether a generator has an interpretation in `backend`.
    pub fn has_table(&self, backend: BackendId, gen: &Name) -> bool {
        match backend {
            BackendId::Rel => self.tables.rel.contains_key(gen),
            BackendId::Par => self.tables.par.contains_key(gen),
            BackendId::Stoch => self.tables.stoch.contains_key(gen),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::ratio;
    use crate::kernel::names;

    #[test]
    fn table_validation() {
        let mut m = Model::new();
        m.add_type("Bool", &["0", "1"]).unwrap();
        m.declare(GeneratorDecl::new("coin", vec![], vec![vec![], vec![]]))
            .unwrap();
        let ok = Kernel::from_dense(vec![vec![ratio(1, 2), ratio(1, 2)]], 2);
        m.set_stoch(&"coin".into(), ok).unwrap();
        let heavy = Kernel::from_dense(vec![vec![ratio(2, 3), ratio(2, 3)]], 2);
        assert!(matches!(
            m.set_stoch(&"coin".into(), heavy),
            Err(ModelError::RowMassExceedsOne { .. })
        ));
        let wrong = Kernel::from_dense(vec![vec![ratio(1, 2)]], 1);
        assert!(matches!(
            m.set_stoch(&"coin".into(), wrong),
            Err(ModelError::ArityMismatch { .. })
        ));
        assert!(matches!(
            m.add_type("E", &[]),
            Err(ModelError::EmptyCarrier(_))
        ));
        m.add_function(GeneratorDecl::new("not", names(&["Bool"]), vec![names(&["Bool"])]), &[Some(1), Some(0)])
            .unwrap();
        assert!(m.has_table(BackendId::Par, &"not".into()));
    }
}

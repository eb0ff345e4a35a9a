use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::name::Name;

pub type BasicType = Name;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GeneratorDecl {
    pub name: Name,
    pub inputs: Vec<BasicType>,
    pub branches: Vec<Vec<BasicType>>,
}

impl GeneratorDecl {
    pub fn new(name: impl Into<Name>, inputs: Vec<BasicType>, branches: Vec<Vec<BasicType>>) -> Self {
        GeneratorDecl {
            name: name.into(),
            inputs,
            branches,
        }
    }

    fn same_type(&self, other: &GeneratorDecl) -> bool {
        self.inputs == other.inputs && self.branches == other.branches
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("duplicate basic type `{0}`")]
    DuplicateType(Name),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(Name),
    #[error("generator `{gen}` mentions unknown type `{ty}`")]
    UnknownType { gen: Name, ty: Name },
    #[error("order relates unknown generator `{0}`")]
    UnknownOrdered(Name),
    #[error("order relates `{0}` and `{1}`, which have different types")]
    OrderTypeMismatch(Name, Name),
    #[error("order is not antisymmetric on `{0}` and `{1}`")]
    OrderNotAntisymmetric(Name, Name),
}

/// Basic types, generators and an optional order on same-typed generators.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Signature {
    types: Vec<BasicType>,
    generators: BTreeMap<Name, GeneratorDecl>,
    order: BTreeSet<(Name, Name)>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_type(&mut self, ty: impl Into<Name>) -> Result<(), SignatureError> {
        let ty = ty.into();
        if self.types.contains(&ty) {
            return Err(SignatureError::DuplicateType(ty));
        }
        self.types.push(ty);
        Ok(())
    }

    pub fn add_generator(&mut self, decl: GeneratorDecl) -> Result<(), SignatureError> {
        if self.generators.contains_key(&decl.name) {
            return Err(SignatureError::DuplicateGenerator(decl.name));
        }
        for ty in decl.inputs.iter().chain(decl.branches.iter().flatten()) {
            if !self.types.contains(ty) {
                return Err(SignatureError::UnknownType {
                    gen: decl.name.clone(),
                    ty: ty.clone(),
                });
            }
        }
        self.generators.insert(decl.name.clone(), decl);
        Ok(())
    }

    /// Declares `lo ≤ hi`; the stored relation is kept reflexive and transitive.
    pub fn add_order(&mut self, lo: &Name, hi: &Name) -> Result<(), SignatureError> {
        let a = self
            .generators
            .get(lo)
            .ok_or_else(|| SignatureError::UnknownOrdered(lo.clone()))?;
        let b = self
            .generators
            .get(hi)
            .ok_or_else(|| SignatureError::UnknownOrdered(hi.clone()))?;
        if !a.same_type(b) {
            return Err(SignatureError::OrderTypeMismatch(lo.clone(), hi.clone()));
        }
        let mut next = self.order.clone();
        next.insert((lo.clone(), hi.clone()));
        loop {
            let mut grown = next.clone();
            for (x, y) in &next {
                for (y2, z) in &next {
                    if y == y2 {
                        grown.insert((x.clone(), z.clone()));
                    }
                }
            }
            if grown.len() == next.len() {
                break;
            }
            next = grown;
        }
        for (x, y) in &next {
            if x != y && next.contains(&(y.clone(), x.clone())) {
                return Err(SignatureError::OrderNotAntisymmetric(x.clone(), y.clone()));
            }
        }
        self.order = next;
        Ok(())
    }

    pub fn types(&self) -> &[BasicType] {
        &self.types
    }

    pub fn has_type(&self, ty: &Name) -> bool {
        self.types.contains(ty)
    }

    pub fn generator(&self, name: &Name) -> Option<&GeneratorDecl> {
        self.generators.get(name)
    }

    pub fn generators(&self) -> impl Iterator<Item = &GeneratorDecl> {
        self.generators.values()
    }

    /// `f ≤ g` in the generator order; discrete when nothing was declared.
    pub fn generator_leq(&self, f: &Name, g: &Name) -> bool {
        f == g || self.order.contains(&(f.clone(), g.clone()))
    }

    pub fn order_pairs(&self) -> impl Iterator<Item = &(Name, Name)> {
        self.order.iter()
    }
}

/// Ordered list of typed variables; lookups take the first match, so
/// prepended binders shadow older entries.
#[derive(Clone, PartialEq, Eq, Debug, Default, Hash)]
pub struct Context(pub Vec<(Name, BasicType)>);

impl Context {
    pub fn new(entries: Vec<(Name, BasicType)>) -> Self {
        Context(entries)
    }

    pub fn empty() -> Self {
        Context(Vec::new())
    }

    pub fn from_pairs(pairs: &[(&str, &str)]) -> Self {
        Context(
            pairs
                .iter()
                .map(|(x, t)| (Name::new(x), Name::new(t)))
                .collect(),
        )
    }

    pub fn lookup(&self, var: &Name) -> Option<(usize, &BasicType)> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, (x, _))| x == var)
            .map(|(i, (_, t))| (i, t))
    }

    pub fn prepend(&self, vars: &[Name], types: &[BasicType]) -> Context {
        let mut entries: Vec<_> = vars.iter().cloned().zip(types.iter().cloned()).collect();
        entries.extend(self.0.iter().cloned());
        Context(entries)
    }

    pub fn concat(&self, other: &Context) -> Context {
        let mut entries = self.0.clone();
        entries.extend(other.0.iter().cloned());
        Context(entries)
    }

    pub fn vars(&self) -> Vec<Name> {
        self.0.iter().map(|(x, _)| x.clone()).collect()
    }

    pub fn types(&self) -> Vec<BasicType> {
        self.0.iter().map(|(_, t)| t.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}: {t}")?;
        }
        Ok(())
    }
}

/// Ordered list of labels with their signatures.
#[derive(Clone, PartialEq, Eq, Debug, Default, Hash)]
pub struct Index(pub Vec<(Name, Vec<BasicType>)>);

impl Index {
    pub fn new(entries: Vec<(Name, Vec<BasicType>)>) -> Self {
        Index(entries)
    }

    pub fn empty() -> Self {
        Index(Vec::new())
    }

    pub fn single(label: impl Into<Name>, sig: Vec<BasicType>) -> Self {
        Index(vec![(label.into(), sig)])
    }

    pub fn lookup(&self, label: &Name) -> Option<(usize, &[BasicType])> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, (l, _))| l == label)
            .map(|(i, (_, s))| (i, s.as_slice()))
    }

    pub fn prepend(&self, label: &Name, sig: &[BasicType]) -> Index {
        let mut entries = vec![(label.clone(), sig.to_vec())];
        entries.extend(self.0.iter().cloned());
        Index(entries)
    }

    pub fn concat(&self, other: &Index) -> Index {
        let mut entries = self.0.clone();
        entries.extend(other.0.iter().cloned());
        Index(entries)
    }

    pub fn labels(&self) -> Vec<Name> {
        self.0.iter().map(|(l, _)| l.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn has_distinct_labels(&self) -> bool {
        let set: BTreeSet<_> = self.0.iter().map(|(l, _)| l).collect();
        set.len() == self.0.len()
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (l, sig)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}(")?;
            for (j, t) in sig.iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::name::names;

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.add_type("B").unwrap();
        for g in ["f", "g", "h"] {
            s.add_generator(GeneratorDecl::new(g, names(&["B"]), vec![names(&["B"])]))
                .unwrap();
        }
        s
    }

    #[test]
    fn order_closure_and_antisymmetry() {
        let mut s = sig();
        s.add_order(&"f".into(), &"g".into()).unwrap();
        s.add_order(&"g".into(), &"h".into()).unwrap();
        assert!(s.generator_leq(&"f".into(), &"h".into()));
        assert!(s.generator_leq(&"h".into(), &"h".into()));
        assert!(!s.generator_leq(&"h".into(), &"f".into()));
        assert!(matches!(
            s.add_order(&"h".into(), &"f".into()),
            Err(SignatureError::OrderNotAntisymmetric(..))
        ));
        assert!(!s.generator_leq(&"h".into(), &"f".into()));
    }

    #[test]
    fn context_lookup_takes_first() {
        let ctx = Context::from_pairs(&[("x", "B")]).prepend(&names(&["x"]), &names(&["C"]));
        assert_eq!(ctx.lookup(&"x".into()), Some((0, &Name::new("C"))));
    }

    #[test]
    fn unknown_type_rejected() {
        let mut s = sig();
        let err = s
            .add_generator(GeneratorDecl::new("k", vec![], vec![names(&["Z"])]))
            .unwrap_err();
        assert!(matches!(err, SignatureError::UnknownType { .. }));
    }
}

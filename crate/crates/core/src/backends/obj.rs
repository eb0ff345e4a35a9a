use std::fmt;
use std::sync::Arc;

use crate::kernel::Name;

/// A finite basic carrier: a type name with its ordered elements.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Carrier {
    pub name: Name,
    pub elems: Arc<[String]>,
}

impl Carrier {
    pub fn new(name: impl Into<Name>, elems: &[&str]) -> Self {
        Carrier {
            name: name.into(),
            elems: elems.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// A carrier `{0, …, n-1}`.
    pub fn range(name: impl Into<Name>, n: usize) -> Self {
        Carrier {
            name: name.into(),
            elems: (0..n).map(|i| i.to_string()).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.elems.len()
    }
}

/// A product of basic carriers, enumerated lexicographically with the last
/// factor varying fastest. The empty product is the unit.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Obj {
    pub factors: Vec<Carrier>,
}

impl Obj {
    pub fn unit() -> Self {
        Obj { factors: vec![] }
    }

    pub fn new(factors: Vec<Carrier>) -> Self {
        Obj { factors }
    }

    pub fn base(c: Carrier) -> Self {
        Obj { factors: vec![c] }
    }

    pub fn size(&self) -> usize {
        self.factors.iter().map(Carrier::size).product()
    }

    pub fn tensor(&self, other: &Obj) -> Obj {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Obj { factors }
    }

    /// Shape check: same number of elements per factor.
    pub fn same_shape(&self, other: &Obj) -> bool {
        self.factors.len() == other.factors.len()
            && self.factors.iter().zip(&other.factors).all(|(a, b)| a.size() == b.size())
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.factors.iter().map(Carrier::size).collect()
    }

    pub fn decode(&self, mut i: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (k, c) in self.factors.iter().enumerate().rev() {
            out[k] = i % c.size();
            i /= c.size();
        }
        out
    }

    pub fn encode(&self, tuple: &[usize]) -> usize {
        encode(&self.sizes(), tuple)
    }

    pub fn show(&self, i: usize) -> String {
        let t = self.decode(i);
        let parts: Vec<&str> = t
            .iter()
            .zip(&self.factors)
            .map(|(&e, c)| c.elems[e].as_str())
            .collect();
        format!("({})", parts.join(", "))
    }
}

pub fn encode(sizes: &[usize], tuple: &[usize]) -> usize {
    assert_eq!(sizes.len(), tuple.len(), "tuple arity");
    tuple.iter().zip(sizes).fold(0, |acc, (&e, &s)| {
        debug_assert!(e < s);
        acc * s + e
    })
}

impl fmt::Display for Obj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("I");
        }
        let names: Vec<String> = self.factors.iter().map(|c| c.name.to_string()).collect();
        f.write_str(&names.join(" ⊗ "))
    }
}

/// Total size of a list of objects viewed as a disjoint union, with the
/// offset of each summand.
pub fn offsets(objs: &[Obj]) -> (Vec<usize>, usize) {
    let mut offs = Vec::with_capacity(objs.len());
    let mut total = 0;
    for o in objs {
        offs.push(total);
        total += o.size();
    }
    (offs, total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_enumeration() {
        let o = Obj::new(vec![Carrier::range("A", 2), Carrier::range("B", 3)]);
        assert_eq!(o.size(), 6);
        assert_eq!(o.decode(4), vec![1, 1]);
        assert_eq!(o.encode(&[1, 1]), 4);
        assert_eq!(o.show(5), "(1, 2)");
        assert_eq!(Obj::unit().size(), 1);
    }
}

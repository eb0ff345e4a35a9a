use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Identifier for variables, labels, generators and basic types.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Self {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl From<String> for Name {
    fn from(s: String) -> Self {
        Name(Arc::from(s))
    }
}

impl From<&Name> for Name {
    fn from(n: &Name) -> Self {
        n.clone()
    }
}

/// Builds a list of names from string slices.
pub fn names(xs: &[&str]) -> Vec<Name> {
    xs.iter().map(|s| Name::new(s)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NameKind {
    Var,
    Label,
}

/// Counter-suffixed fresh name: `x0, x1, …` for variables, `a0, a1, …` for labels.
pub fn fresh(kind: NameKind, avoid: &BTreeSet<Name>) -> Name {
    let stem = match kind {
        NameKind::Var => "x",
        NameKind::Label => "a",
    };
    fresh_from(stem, avoid)
}

/// Fresh variant of `base`: trailing digits are dropped and a counter appended.
pub fn fresh_like(base: &Name, avoid: &BTreeSet<Name>) -> Name {
    let stem = base.as_str().trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "x" } else { stem };
    fresh_from(stem, avoid)
}

fn fresh_from(stem: &str, avoid: &BTreeSet<Name>) -> Name {
    (0u64..)
        .map(|i| Name::from(format!("{stem}{i}")))
        .find(|n| !avoid.contains(n))
        .expect("unbounded counter")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[&str]) -> BTreeSet<Name> {
        names(xs).into_iter().collect()
    }

    #[test]
    fn fresh_scheme() {
        assert_eq!(fresh(NameKind::Var, &set(&["x"])).as_str(), "x0");
        assert_eq!(fresh(NameKind::Var, &set(&["x", "x0"])).as_str(), "x1");
        assert_eq!(fresh(NameKind::Label, &set(&[])).as_str(), "a0");
    }

    #[test]
    fn fresh_like_strips_digits() {
        assert_eq!(fresh_like(&Name::new("y"), &set(&["y"])).as_str(), "y0");
        assert_eq!(fresh_like(&Name::new("y0"), &set(&["y0"])).as_str(), "y1");
        assert_eq!(fresh_like(&Name::new("7"), &set(&[])).as_str(), "x0");
    }
}

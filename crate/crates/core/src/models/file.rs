//! The JSON model format: carriers, generator declarations, per-backend
//! tables and the generator order.
//!
//! Relational rows list column indices, partial rows are a column index or
//! `null`, probabilistic rows are dense lists of exact rationals `"p/q"`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::backends::{parse_ratio, BackendId, Boolean, Kernel, Obj};
use crate::kernel::{GeneratorDecl, Name};

use super::{Model, ModelError};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub types: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub generators: BTreeMap<String, GenFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub order: Vec<(String, String)>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenFile {
    #[serde(default)]
    pub inputs: Vec<String>,
    pub branches: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub par: Option<Vec<Option<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stoch: Option<Vec<Vec<Value>>>,
}

fn bad_index(gen: &Name, backend: BackendId, row: usize, col: usize) -> ModelError {
    ModelError::BadIndex {
        gen: gen.clone(),
        backend,
        row,
        col,
    }
}

fn cols_of(m: &Model, gen: &Name) -> Result<usize, ModelError> {
    let (_, cods) = m.gen_shape(gen)?;
    Ok(cods.iter().map(Obj::size).sum())
}

fn stoch_weight(gen: &Name, row: usize, v: &Value) -> Result<BigRational, ModelError> {
    let text = match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    match v {
        Value::String(s) => parse_ratio(s),
        _ => None,
    }
    .ok_or(ModelError::NonRational {
        gen: gen.clone(),
        row,
        text,
    })
}

impl ModelFile {
    pub fn to_model(&self) -> Result<Model, ModelError> {
        let mut m = Model::new();
        for (ty, elems) in &self.types {
            let refs: Vec<&str> = elems.iter().map(String::as_str).collect();
            m.add_type(ty.as_str(), &refs)?;
        }
        for (name, g) in &self.generators {
            let gen = Name::new(name);
            let inputs = g.inputs.iter().map(|t| Name::new(t)).collect();
            let branches = g.branches.iter().map(|b| b.iter().map(|t| Name::new(t)).collect()).collect();
            m.declare(GeneratorDecl::new(gen.clone(), inputs, branches))?;
            for ty in g.inputs.iter().chain(g.branches.iter().flatten()) {
                m.carrier(&Name::new(ty))?;
            }
            let cols = cols_of(&m, &gen)?;
            if let Some(rows) = &g.rel {
                let mut out = Vec::with_capacity(rows.len());
                for (i, r) in rows.iter().enumerate() {
                    if let Some(&c) = r.iter().find(|&&c| c >= cols) {
                        return Err(bad_index(&gen, BackendId::Rel, i, c));
                    }
                    out.push(r.iter().map(|&c| (c, Boolean(true))).collect());
                }
                m.set_rel(&gen, Kernel::from_rows(out, cols))?;
            }
            if let Some(rows) = &g.par {
                let mut out = Vec::with_capacity(rows.len());
                for (i, r) in rows.iter().enumerate() {
                    match r {
                        Some(c) if *c >= cols => return Err(bad_index(&gen, BackendId::Par, i, *c)),
                        Some(c) => out.push(vec![(*c, Boolean(true))]),
                        None => out.push(vec![]),
                    }
                }
                m.set_par(&gen, Kernel::from_rows(out, cols))?;
            }
            if let Some(rows) = &g.stoch {
                let mut out = Vec::with_capacity(rows.len());
                for (i, r) in rows.iter().enumerate() {
                    if r.len() != cols {
                        return Err(ModelError::ArityMismatch {
                            gen: gen.clone(),
                            backend: BackendId::Stoch,
                            what: "row entries",
                            expected: cols,
                            found: r.len(),
                        });
                    }
                    out.push(r.iter().map(|v| stoch_weight(&gen, i, v)).collect::<Result<Vec<_>, _>>()?);
                }
                m.set_stoch(&gen, Kernel::from_dense(out, cols))?;
            }
        }
        for (lo, hi) in &self.order {
            m.sig.add_order(&Name::new(lo), &Name::new(hi))?;
        }
        Ok(m)
    }

    pub fn from_model(m: &Model) -> ModelFile {
        let types = m
            .carriers
            .iter()
            .map(|(n, c)| (n.to_string(), c.elems.iter().cloned().collect()))
            .collect();
        let generators = m
            .sig
            .generators()
            .map(|d| {
                let s = |v: &[Name]| v.iter().map(|t| t.to_string()).collect::<Vec<_>>();
                let g = GenFile {
                    inputs: s(&d.inputs),
                    branches: d.branches.iter().map(|b| s(b)).collect(),
                    rel: m
                        .tables
                        .rel
                        .get(&d.name)
                        .map(|k| k.rows().iter().map(|r| r.iter().map(|(c, _)| *c).collect()).collect()),
                    par: m
                        .tables
                        .par
                        .get(&d.name)
                        .map(|k| k.rows().iter().map(|r| r.first().map(|(c, _)| *c)).collect()),
                    stoch: m.tables.stoch.get(&d.name).map(|k| {
                        (0..k.n_rows())
                            .map(|i| {
                                k.dense_row(i)
                                    .iter()
                                    .map(|w| Value::String(if w.is_zero() { "0".into() } else { w.to_string() }))
                                    .collect()
                            })
                            .collect()
                    }),
                };
                (d.name.to_string(), g)
            })
            .collect();
        let order = m.sig.order_pairs().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        ModelFile {
            types,
            generators,
            order,
        }
    }
}

impl Model {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(ModelFile::from_model(self)).expect("model files serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const COIN: &str = r#"{
        "types": {"Bool": ["0", "1"]},
        "generators": {
            "coin": {"inputs": [], "branches": [[], []],
                     "rel": [[0, 1]], "par": [0], "stoch": [["1/2", "1/2"]]},
            "neg": {"inputs": ["Bool"], "branches": [["Bool"]],
                    "rel": [[1], [0]], "par": [1, 0], "stoch": [["0", "1"], ["1", "0"]]}
        }
    }"#;

    #[test]
    fn round_trip() {
        let f: ModelFile = serde_json::from_str(COIN).unwrap();
        let m = f.to_model().unwrap();
        let back = ModelFile::from_model(&m);
        assert_eq!(back.to_model().unwrap(), m);
        assert_eq!(back, f);
    }

    #[test]
    fn rejects_bad_rows() {
        let mass = COIN.replace(r#"[["1/2", "1/2"]]"#, r#"[["2/3", "2/3"]]"#);
        let f: ModelFile = serde_json::from_str(&mass).unwrap();
        assert!(matches!(f.to_model(), Err(ModelError::RowMassExceedsOne { .. })));
        let dec = COIN.replace(r#"[["1/2", "1/2"]]"#, r#"[["0.5", "0.5"]]"#);
        let f: ModelFile = serde_json::from_str(&dec).unwrap();
        assert!(matches!(f.to_model(), Err(ModelError::NonRational { .. })));
        let idx = COIN.replace(r#""par": [0]"#, r#""par": [5]"#);
        let f: ModelFile = serde_json::from_str(&idx).unwrap();
        assert!(matches!(f.to_model(), Err(ModelError::BadIndex { .. })));
    }
}

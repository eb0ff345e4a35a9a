use std::fmt;

use num_traits::One;
use thiserror::Error;

use super::matrix::Kernel;
use super::obj::{encode, offsets, Obj};
use super::Backend;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("shape error: {0}")]
pub struct ShapeError(pub String);

/// A multimorphism `dom → cod₁ + … + codₙ`, stored as one kernel into the
/// tagged disjoint union of the codomains.
pub struct Morphism<B: Backend> {
    pub dom: Obj,
    pub cod: Vec<Obj>,
    pub kernel: Kernel<B::W>,
}

impl<B: Backend> Clone for Morphism<B> {
    fn clone(&self) -> Self {
        Morphism {
            dom: self.dom.clone(),
            cod: self.cod.clone(),
            kernel: self.kernel.clone(),
        }
    }
}

impl<B: Backend> PartialEq for Morphism<B> {
    fn eq(&self, other: &Self) -> bool {
        self.dom.same_shape(&other.dom)
            && self.cod.len() == other.cod.len()
            && self.cod.iter().zip(&other.cod).all(|(a, b)| a.same_shape(b))
            && self.kernel == other.kernel
    }
}

impl<B: Backend> fmt::Debug for Morphism<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

fn shape(msg: impl Into<String>) -> ShapeError {
    ShapeError(msg.into())
}

impl<B: Backend> Morphism<B> {
    pub fn new(dom: Obj, cod: Vec<Obj>, kernel: Kernel<B::W>) -> Result<Self, ShapeError> {
        let (_, total) = offsets(&cod);
        if kernel.n_rows() != dom.size() || kernel.n_cols() != total {
            return Err(shape(format!(
                "kernel is {}×{}, expected {}×{}",
                kernel.n_rows(),
                kernel.n_cols(),
                dom.size(),
                total
            )));
        }
        B::check_kernel(&kernel).map_err(|(i, e)| shape(format!("row {i}: {e}")))?;
        Ok(Morphism { dom, cod, kernel })
    }

    /// Skips the backend row check; callers guarantee it by construction.
    pub(crate) fn raw(dom: Obj, cod: Vec<Obj>, kernel: Kernel<B::W>) -> Self {
        debug_assert_eq!(kernel.n_rows(), dom.size());
        debug_assert_eq!(kernel.n_cols(), offsets(&cod).1);
        Morphism { dom, cod, kernel }
    }

    pub fn identity(x: &Obj) -> Self {
        Self::raw(x.clone(), vec![x.clone()], Kernel::identity(x.size()))
    }

    pub fn zero(x: &Obj, cod: &[Obj]) -> Self {
        Self::raw(x.clone(), cod.to_vec(), Kernel::zero(x.size(), offsets(cod).1))
    }

    pub fn cod_size(&self) -> usize {
        self.kernel.n_cols()
    }

    /// `f ∘ᵢ g`: plugs `g : codᵢ → Z̄` into the `i`-th output of `self`.
    pub fn compose(&self, i: usize, g: &Morphism<B>) -> Result<Morphism<B>, ShapeError> {
        let target = self
            .cod
            .get(i)
            .ok_or_else(|| shape(format!("no output {i}")))?;
        if !target.same_shape(&g.dom) {
            return Err(shape(format!("cannot plug {} into {}", g.dom, target)));
        }
        let mut cod: Vec<Obj> = self.cod[..i].to_vec();
        cod.extend(g.cod.iter().cloned());
        cod.extend(self.cod[i + 1..].iter().cloned());
        let (src_off, _) = offsets(&self.cod);
        let (_, total) = offsets(&cod);
        let shift = g.cod_size();
        let mut rows = Vec::with_capacity(self.cod_size());
        for (j, o) in self.cod.iter().enumerate() {
            for k in 0..o.size() {
                let c = src_off[j] + k;
                if j < i {
                    rows.push(vec![(c, B::W::one())]);
                } else if j == i {
                    rows.push(
                        g.kernel
                            .row(k)
                            .iter()
                            .map(|(cc, w)| (src_off[i] + cc, w.clone()))
                            .collect(),
                    );
                } else {
                    rows.push(vec![(c - target.size() + shift, B::W::one())]);
                }
            }
        }
        let plug = Kernel::from_rows(rows, total);
        Ok(Self::raw(self.dom.clone(), cod, self.kernel.then(&plug)))
    }

    /// Sequential composition of a single-output morphism.
    pub fn then(&self, g: &Morphism<B>) -> Result<Morphism<B>, ShapeError> {
        if self.cod.len() != 1 {
            return Err(shape("`then` needs a single output"));
        }
        self.compose(0, g)
    }

    /// `[g₁, …, gₙ] ∘ f`: every output block continues with its own
    /// morphism, all of which share a codomain list.
    pub fn cotuple(&self, gs: &[Morphism<B>]) -> Result<Morphism<B>, ShapeError> {
        if gs.len() != self.cod.len() {
            return Err(shape(format!("{} continuations for {} outputs", gs.len(), self.cod.len())));
        }
        let cod = gs.first().map(|g| g.cod.clone()).unwrap_or_default();
        let (_, total) = offsets(&cod);
        let mut stacked: Kernel<B::W> = Kernel::zero(0, total);
        for (o, g) in self.cod.iter().zip(gs) {
            if !o.same_shape(&g.dom) || g.cod.len() != cod.len() || g.cod_size() != total {
                return Err(shape("continuation shapes disagree"));
            }
            stacked = stacked.vstack(&g.kernel);
        }
        Ok(Self::raw(self.dom.clone(), cod, self.kernel.then(&stacked)))
    }

    /// `f · σ*`: output block `j` is sent to block `sigma[j]` of `target`.
    pub fn coaction(&self, sigma: &[usize], target: &[Obj]) -> Result<Morphism<B>, ShapeError> {
        if sigma.len() != self.cod.len() {
            return Err(shape("coaction map length"));
        }
        let (src, _) = offsets(&self.cod);
        let (dst, total) = offsets(target);
        let mut f = vec![0; self.cod_size()];
        for (j, o) in self.cod.iter().enumerate() {
            let t = target
                .get(sigma[j])
                .ok_or_else(|| shape(format!("coaction target {} out of range", sigma[j])))?;
            if !t.same_shape(o) {
                return Err(shape(format!("coaction sends {o} to {t}")));
            }
            for k in 0..o.size() {
                f[src[j] + k] = dst[sigma[j]] + k;
            }
        }
        Ok(Self::raw(
            self.dom.clone(),
            target.to_vec(),
            self.kernel.map_cols(&f, total),
        ))
    }

    /// Merges all outputs into one (the codiagonal); all blocks must agree.
    pub fn merge(&self) -> Result<Morphism<B>, ShapeError> {
        let first = self
            .cod
            .first()
            .cloned()
            .ok_or_else(|| shape("nothing to merge"))?;
        self.coaction(&vec![0; self.cod.len()], &[first])
    }

    /// `f ⊗ g`, with outputs `Yᵢ ⊗ Y'ⱼ` ordered by `i` first.
    pub fn tensor(&self, g: &Morphism<B>) -> Morphism<B> {
        let k = self.kernel.kron(&g.kernel);
        let mut cod = Vec::with_capacity(self.cod.len() * g.cod.len());
        for a in &self.cod {
            for b in &g.cod {
                cod.push(a.tensor(b));
            }
        }
        let (fo, _) = offsets(&self.cod);
        let (go, _) = offsets(&g.cod);
        let (po, total) = offsets(&cod);
        let block = |offs: &[usize], c: usize| offs.iter().rposition(|&o| o <= c).unwrap();
        let mut map = Vec::with_capacity(k.n_cols());
        for cf in 0..self.cod_size() {
            let i = block(&fo, cf);
            for cg in 0..g.cod_size() {
                let j = block(&go, cg);
                let p = i * g.cod.len() + j;
                map.push(po[p] + (cf - fo[i]) * g.cod[j].size() + (cg - go[j]));
            }
        }
        Self::raw(self.dom.tensor(&g.dom), cod, k.map_cols(&map, total))
    }

    /// The structural map `σ* : X₁ ⊗ … ⊗ Xₙ → X_{σ(1)} ⊗ … ⊗ X_{σ(m)}`.
    pub fn select(x: &Obj, sigma: &[usize]) -> Morphism<B> {
        let out = Obj::new(sigma.iter().map(|&i| x.factors[i].clone()).collect());
        let out_sizes = out.sizes();
        let map: Vec<usize> = (0..x.size())
            .map(|i| {
                let t = x.decode(i);
                let u: Vec<usize> = sigma.iter().map(|&k| t[k]).collect();
                encode(&out_sizes, &u)
            })
            .collect();
        Self::raw(x.clone(), vec![out.clone()], Kernel::function(&map, out.size()))
    }

    /// `ν : X → X ⊗ X`, copying the whole object.
    pub fn copy(x: &Obj) -> Morphism<B> {
        let n = x.size();
        let map: Vec<usize> = (0..n).map(|i| i * n + i).collect();
        Self::raw(x.clone(), vec![x.tensor(x)], Kernel::function(&map, n * n))
    }

    /// `ε : X → I`.
    pub fn discard(x: &Obj) -> Morphism<B> {
        Self::raw(x.clone(), vec![Obj::unit()], Kernel::function(&vec![0; x.size()], 1))
    }

    /// `X ⊗ Y → Y ⊗ X`.
    pub fn symmetry(x: &Obj, y: &Obj) -> Morphism<B> {
        let (n, m) = (x.size(), y.size());
        let map: Vec<usize> = (0..n * m).map(|i| (i % m) * n + i / m).collect();
        Self::raw(x.tensor(y), vec![y.tensor(x)], Kernel::function(&map, n * m))
    }

    /// `injᵢ : Yᵢ → Y₁ + … + Yₙ`.
    pub fn inject(i: usize, ys: &[Obj]) -> Morphism<B> {
        let (offs, total) = offsets(ys);
        let map: Vec<usize> = (0..ys[i].size()).map(|k| offs[i] + k).collect();
        Self::raw(ys[i].clone(), ys.to_vec(), Kernel::function(&map, total))
    }

    /// Least fixpoint of `self : X → X, Ȳ`.
    pub fn fix(&self) -> Result<Morphism<B>, ShapeError> {
        match self.cod.first() {
            Some(x) if x.same_shape(&self.dom) => {}
            _ => return Err(shape("fix needs the first output to equal the input")),
        }
        let t = B::fix(&self.kernel, self.dom.size());
        Ok(Self::raw(self.dom.clone(), self.cod[1..].to_vec(), t))
    }

    pub fn leq(&self, other: &Morphism<B>) -> Result<bool, ShapeError> {
        self.same_type(other)?;
        Ok(self.kernel.leq(&other.kernel))
    }

    pub fn same_type(&self, other: &Morphism<B>) -> Result<(), ShapeError> {
        if self.kernel.n_rows() != other.kernel.n_rows() || self.cod_size() != other.cod_size() {
            return Err(shape(format!("{} and {} differ in shape", self.signature(), other.signature())));
        }
        Ok(())
    }

    pub fn signature(&self) -> String {
        let cods: Vec<String> = self.cod.iter().map(|o| o.to_string()).collect();
        format!("{} → {}", self.dom, cods.join(" + "))
    }

    /// Human-readable table of nonzero entries.
    pub fn table(&self) -> String {
        let (offs, _) = offsets(&self.cod);
        let mut out = String::new();
        for i in 0..self.dom.size() {
            for (c, w) in self.kernel.row(i) {
                let b = offs.iter().rposition(|&o| o <= *c).unwrap();
                out.push_str(&format!(
                    "{} -> #{} {} : {}\n",
                    self.dom.show(i),
                    b,
                    self.cod[b].show(c - offs[b]),
                    w
                ));
            }
        }
        out
    }
}

impl<B: Backend> fmt::Display for Morphism<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.signature())?;
        f.write_str(&self.table())
    }
}

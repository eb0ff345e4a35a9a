use std::collections::BTreeMap;

use thiserror::Error;

use super::matrix::{Kernel, RowAcc};
use super::morphism::Morphism;
use super::obj::{encode, offsets, Obj};
use super::{Backend, BackendId};
use crate::kernel::{typecheck, Context, Index, Judgement, Name, Term, TypeError};
use crate::models::{Model, ModelError};

/// Largest product carrier the evaluator will enumerate.
pub const MAX_CARRIER: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("generator `{gen}` has no {backend} interpretation")]
    MissingInterpretation { gen: Name, backend: BackendId },
    #[error("{what} has {size} elements, above the limit of {MAX_CARRIER}")]
    CarrierTooLarge { what: String, size: usize },
}

/// Interprets `ctx ⊢ term : idx` as a morphism `⟦ctx⟧ → ⟦idx₁⟧ + … + ⟦idxₙ⟧`.
pub fn eval<B: Backend>(term: &Term, ctx: &Context, idx: &Index, model: &Model) -> Result<Morphism<B>, EvalError> {
    typecheck(term, ctx, idx, &model.sig)?;
    let dom = model.obj(&ctx.types())?;
    if dom.size() > MAX_CARRIER {
        return Err(EvalError::CarrierTooLarge {
            what: format!("context {ctx}"),
            size: dom.size(),
        });
    }
    let cod: Vec<Obj> = idx
        .0
        .iter()
        .map(|(_, s)| model.obj(s))
        .collect::<Result<_, _>>()?;
    let mut tables = BTreeMap::new();
    for g in term.generators() {
        let t = B::table(model, &g).ok_or_else(|| EvalError::MissingInterpretation {
            gen: g.clone(),
            backend: B::ID,
        })?;
        tables.insert(g, t);
    }
    let ev = Evaluator::<B> {
        model,
        tables,
    };
    let live = ev.eval(term, ctx, idx)?;
    // weaken the live context back to the full one
    let ctx_vars = ctx.vars();
    let map: Vec<usize> = (0..dom.size())
        .map(|i| {
            let vals = dom.decode(i);
            live.index(&|x: &Name| {
                let p = ctx_vars.iter().position(|v| v == x).expect("live var in context");
                vals[p]
            })
        })
        .collect();
    Ok(Morphism::raw(dom, cod, live.k.reindex_rows(&map)))
}

pub fn eval_judgement<B: Backend>(j: &Judgement, model: &Model) -> Result<Morphism<B>, EvalError> {
    eval(&j.term, &j.ctx, &j.idx, model)
}

/// A kernel over the variables a subterm actually uses.
struct Live<W> {
    vars: Vec<Name>,
    sizes: Vec<usize>,
    k: Kernel<W>,
}

impl<W> Live<W> {
    fn index(&self, value: &dyn Fn(&Name) -> usize) -> usize {
        let t: Vec<usize> = self.vars.iter().map(value).collect();
        encode(&self.sizes, &t)
    }
}

struct Evaluator<'m, B: Backend> {
    model: &'m Model,
    tables: BTreeMap<Name, Kernel<B::W>>,
}

/// Looks a variable up first among `binders` (leftmost wins), then in the
/// enclosing live context.
fn lookup(x: &Name, binders: &[Name], bvals: &[usize], outer: &[Name], ovals: &[usize]) -> usize {
    if let Some(p) = binders.iter().position(|b| b == x) {
        return bvals[p];
    }
    let p = outer.iter().position(|v| v == x).expect("variable in scope");
    ovals[p]
}

impl<'m, B: Backend> Evaluator<'m, B> {
    fn live_ctx(&self, term: &Term, ctx: &Context) -> Result<(Vec<Name>, Vec<usize>), EvalError> {
        let fv = term.free_vars();
        let mut vars: Vec<Name> = Vec::new();
        let mut sizes = Vec::new();
        for (x, t) in &ctx.0 {
            if fv.contains(x) && !vars.contains(x) {
                vars.push(x.clone());
                sizes.push(self.model.carrier(t)?.size());
            }
        }
        let size: usize = sizes.iter().product();
        if size > MAX_CARRIER {
            return Err(EvalError::CarrierTooLarge {
                what: format!("live context of `{term}`"),
                size,
            });
        }
        Ok((vars, sizes))
    }

    fn sizes_of(&self, types: &[Name]) -> Result<Vec<usize>, EvalError> {
        Ok(types
            .iter()
            .map(|t| self.model.carrier(t).map(|c| c.size()))
            .collect::<Result<_, _>>()?)
    }

    fn cod_offsets(&self, idx: &Index) -> Result<(Vec<usize>, usize), EvalError> {
        let objs: Vec<Obj> = idx
            .0
            .iter()
            .map(|(_, s)| self.model.obj(s))
            .collect::<Result<_, _>>()?;
        Ok(offsets(&objs))
    }

    fn eval(&self, term: &Term, ctx: &Context, idx: &Index) -> Result<Live<B::W>, EvalError> {
        let (vars, sizes) = self.live_ctx(term, ctx)?;
        let rows: usize = sizes.iter().product();
        let (offs, total) = self.cod_offsets(idx)?;
        let decode = |i: usize| decode_sizes(&sizes, i);
        let k = match term {
            Term::Return { label, args } => {
                let (pos, sig) = idx.lookup(label).expect("typechecked");
                let sig_sizes = self.sizes_of(sig)?;
                let map: Vec<usize> = (0..rows)
                    .map(|i| {
                        let vals = decode(i);
                        let t: Vec<usize> = args
                            .iter()
                            .map(|x| lookup(x, &[], &[], &vars, &vals))
                            .collect();
                        offs[pos] + encode(&sig_sizes, &t)
                    })
                    .collect();
                Kernel::function(&map, total)
            }
            Term::Gen {
                gen,
                args,
                branches,
            } => {
                let decl = self.model.sig.generator(gen).expect("typechecked");
                let table = &self.tables[gen];
                let in_sizes = self.sizes_of(&decl.inputs)?;
                let mut children = Vec::with_capacity(branches.len());
                let mut branch_sizes = Vec::with_capacity(branches.len());
                for (b, tys) in branches.iter().zip(&decl.branches) {
                    children.push(self.eval(&b.body, &ctx.prepend(&b.binders, tys), idx)?);
                    branch_sizes.push(self.sizes_of(tys)?);
                }
                let mut b_offs = Vec::new();
                let mut acc_off = 0;
                for s in &branch_sizes {
                    b_offs.push(acc_off);
                    acc_off += s.iter().product::<usize>();
                }
                let out = (0..rows)
                    .map(|i| {
                        let vals = decode(i);
                        let t: Vec<usize> = args
                            .iter()
                            .map(|x| lookup(x, &[], &[], &vars, &vals))
                            .collect();
                        let mut acc = RowAcc::new();
                        for (c, w) in table.row(encode(&in_sizes, &t)) {
                            let bi = b_offs.iter().rposition(|&o| o <= *c).unwrap();
                            let ys = decode_sizes(&branch_sizes[bi], c - b_offs[bi]);
                            let child = &children[bi];
                            let ci = child.index(&|x| lookup(x, &branches[bi].binders, &ys, &vars, &vals));
                            acc.add_scaled(child.k.row(ci), w);
                        }
                        acc.finish()
                    })
                    .collect();
                Kernel::from_rows(out, total)
            }
            Term::Loop {
                label,
                args,
                binders,
                body,
            } => {
                let tys: Vec<Name> = args
                    .iter()
                    .map(|x| ctx.lookup(x).expect("typechecked").1.clone())
                    .collect();
                let x_sizes = self.sizes_of(&tys)?;
                let nx: usize = x_sizes.iter().product();
                let child = self.eval(body, &ctx.prepend(binders, &tys), &idx.prepend(label, &tys))?;
                // ambient variables the body reads, carried unchanged through the loop state
                let body_fv = body.free_vars();
                let amb: Vec<usize> = (0..vars.len())
                    .filter(|&p| body_fv.contains(&vars[p]) && !binders.contains(&vars[p]))
                    .collect();
                let amb_vars: Vec<Name> = amb.iter().map(|&p| vars[p].clone()).collect();
                let amb_sizes: Vec<usize> = amb.iter().map(|&p| sizes[p]).collect();
                let na: usize = amb_sizes.iter().product();
                let ns = nx * na;
                if ns > MAX_CARRIER {
                    return Err(EvalError::CarrierTooLarge {
                        what: format!("state space of `loop {label}`"),
                        size: ns,
                    });
                }
                let fused = (0..ns)
                    .map(|s| {
                        let (u, a) = (s / na, s % na);
                        let uvals = decode_sizes(&x_sizes, u);
                        let avals = decode_sizes(&amb_sizes, a);
                        let ci = child.index(&|x| lookup(x, binders, &uvals, &amb_vars, &avals));
                        child
                            .k
                            .row(ci)
                            .iter()
                            .map(|(c, w)| {
                                let col = if *c < nx { c * na + a } else { c - nx + ns };
                                (col, w.clone())
                            })
                            .collect()
                    })
                    .collect();
                let exits = B::fix(&Kernel::from_rows(fused, ns + total), ns);
                let start: Vec<usize> = (0..rows)
                    .map(|i| {
                        let vals = decode(i);
                        let u: Vec<usize> = args
                            .iter()
                            .map(|x| lookup(x, &[], &[], &vars, &vals))
                            .collect();
                        let a: Vec<usize> = amb.iter().map(|&p| vals[p]).collect();
                        encode(&x_sizes, &u) * na + encode(&amb_sizes, &a)
                    })
                    .collect();
                exits.reindex_rows(&start)
            }
        };
        debug_assert_eq!(k.n_rows(), rows);
        Ok(Live { vars, sizes, k })
    }
}

fn decode_sizes(sizes: &[usize], mut i: usize) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for k in (0..sizes.len()).rev() {
        out[k] = i % sizes[k];
        i /= sizes[k];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::{ratio, Boolean};
    use crate::kernel::{gen, lp, names, ret, Branch, GeneratorDecl};
    use crate::models::{Par, Rel, Stoch};

    fn model() -> Model {
        let mut m = Model::new();
        m.add_type("B", &["0", "1"]).unwrap();
        m.add_function(
            GeneratorDecl::new("isone", names(&["B"]), vec![vec![], vec![]]),
            &[Some(1), Some(0)],
        )
        .unwrap();
        m.add_function(GeneratorDecl::new("flip", names(&["B"]), vec![names(&["B"])]), &[Some(1), Some(0)])
            .unwrap();
        m.declare(GeneratorDecl::new("coin", vec![], vec![vec![], vec![]]))
            .unwrap();
        m.set_stoch(&"coin".into(), Kernel::from_dense(vec![vec![ratio(1, 2), ratio(1, 2)]], 2))
            .unwrap();
        m.set_rel(&"coin".into(), Kernel::from_dense(vec![vec![Boolean(true), Boolean(true)]], 2))
            .unwrap();
        m
    }

    #[test]
    fn return_is_identity() {
        let ctx = Context::from_pairs(&[("x", "B")]);
        let idx = Index::single("a", names(&["B"]));
        let f = eval::<Rel>(&ret("a", &names(&["x"])), &ctx, &idx, &model()).unwrap();
        assert_eq!(f, Morphism::identity(&f.dom));
    }

    #[test]
    fn while_not_one_flip() {
        // while x = 1 do x := flip(x): always ends at 0
        let body = gen(
            "isone",
            &names(&["u"]),
            vec![
                Branch::new(
                    vec![],
                    gen("flip", &names(&["u"]), vec![Branch::new(names(&["v"]), ret("a", &names(&["v"])))]),
                ),
                Branch::new(vec![], ret("eta", &names(&["u"]))),
            ],
        );
        let t = lp("a", &names(&["x"]), &names(&["u"]), body);
        let ctx = Context::from_pairs(&[("x", "B")]);
        let idx = Index::single("eta", names(&["B"]));
        let m = model();
        let f = eval::<Par>(&t, &ctx, &idx, &m).unwrap();
        assert_eq!(f.kernel, Kernel::function(&[0, 0], 2));
        let g = eval::<Stoch>(&t, &ctx, &idx, &m).unwrap();
        assert_eq!(g.kernel, Kernel::function(&[0, 0], 2));
    }

    #[test]
    fn coin_loop_terminates_almost_surely() {
        let t = lp(
            "a",
            &[],
            &[],
            gen("coin", &[], vec![Branch::new(vec![], ret("a", &[])), Branch::new(vec![], ret("done", &[]))]),
        );
        let f = eval::<Stoch>(&t, &Context::empty(), &Index::single("done", vec![]), &model()).unwrap();
        assert_eq!(f.kernel.get(0, 0), ratio(1, 1));
    }

    #[test]
    fn missing_table_reported() {
        let t = gen("coin", &[], vec![Branch::new(vec![], ret("a", &[])), Branch::new(vec![], ret("a", &[]))]);
        let err = eval::<Par>(&t, &Context::empty(), &Index::single("a", vec![]), &model()).unwrap_err();
        assert!(matches!(err, EvalError::MissingInterpretation { .. }));
    }
}

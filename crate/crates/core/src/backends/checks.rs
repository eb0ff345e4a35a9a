use super::matrix::Kernel;
use super::morphism::Morphism;
use super::obj::Obj;
use super::Backend;

/// The codomain of `f` flattened into a single object, so that the copy and
/// discard equations can be stated for multimorphisms.
fn flat<B: Backend>(f: &Morphism<B>) -> Morphism<B> {
    let n = f.cod_size();
    let y = Obj::base(super::obj::Carrier::range("#cod", n));
    Morphism::raw(f.dom.clone(), vec![y], f.kernel.clone())
}

/// `f ; ν = ν ; (f ⊗ f)`.
pub fn is_deterministic<B: Backend>(f: &Morphism<B>) -> bool {
    let f = flat(f);
    let lhs = f.then(&Morphism::copy(&f.cod[0])).expect("shapes agree");
    let rhs = Morphism::<B>::copy(&f.dom)
        .then(&f.tensor(&f))
        .expect("shapes agree");
    lhs.kernel == rhs.kernel
}

/// `f ; ε = ε`.
pub fn is_total<B: Backend>(f: &Morphism<B>) -> bool {
    let f = flat(f);
    let lhs = f.then(&Morphism::discard(&f.cod[0])).expect("shapes agree");
    lhs.kernel == Morphism::<B>::discard(&f.dom).kernel
}

/// `f = ε ; f₀` for some `f₀` out of the unit, i.e. all rows agree.
pub fn is_constant<B: Backend>(f: &Morphism<B>) -> bool {
    let k: &Kernel<B::W> = &f.kernel;
    (1..k.n_rows()).all(|i| k.row(i) == k.row(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::{ratio, Boolean, Carrier};
    use crate::models::{Rel, Stoch};

    fn two() -> Obj {
        Obj::base(Carrier::range("B", 2))
    }

    #[test]
    fn identity_is_total_and_deterministic() {
        let id = Morphism::<Stoch>::identity(&two());
        assert!(is_total(&id) && is_deterministic(&id));
    }

    #[test]
    fn nondeterministic_guard() {
        // 0 ↦ {L, R}, 1 ↦ {L}
        let k = Kernel::from_rows(vec![vec![(0, Boolean(true)), (1, Boolean(true))], vec![(0, Boolean(true))]], 2);
        let g = Morphism::<Rel>::new(two(), vec![Obj::unit(), Obj::unit()], k).unwrap();
        assert!(is_total(&g));
        assert!(!is_deterministic(&g));
        assert!(!is_constant(&g));
    }

    #[test]
    fn coin_is_total_constant_not_deterministic() {
        let k = Kernel::from_dense(vec![vec![ratio(1, 2), ratio(1, 2)]; 2], 2);
        let c = Morphism::<Stoch>::new(two(), vec![Obj::unit(), Obj::unit()], k).unwrap();
        assert!(is_total(&c) && is_constant(&c));
        assert!(!is_deterministic(&c));
    }
}

//! Property tests for the kernel, the semantics and the surface syntax.
//! Random terms come from the crate's own model builder, seeded by proptest.

use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use impcat_core::backends::{eval, Boolean, Kernel, Morphism};
use impcat_core::combinators::StateSpace;
use impcat_core::kernel::{
    alpha_eq, canonicalize, cut_checked, fresh, subst_vars, typecheck, Context, Index, Name, NameKind, Term,
};
use impcat_core::logics::random::Builder;
use impcat_core::models::{Model, Rel};
use impcat_core::surface::elab::resolve;
use impcat_core::surface::files::parse_model;
use impcat_core::surface::print::print_program_inline;
use impcat_core::surface::{parse_judgement, parse_program, parse_state, parse_term, print_program, Elaborator};
use impcat_core::StochQ;

struct Sample {
    b: Builder<StochQ>,
    ctx: Context,
    idx: Index,
    term: Term,
}

fn sample(seed: u64, depth: usize) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Builder::<StochQ>::new(&mut rng, 3);
    let s = b.space(&mut rng, &["x", "y"], 9);
    let labels = [b.fresh("k"), b.fresh("k")];
    let idx = b.random_index(&mut rng, &labels);
    let term = b.random_term(&mut rng, &s.ctx, &idx, depth);
    Sample {
        b,
        ctx: s.ctx,
        idx,
        term,
    }
}

fn model(s: &Sample) -> &Model {
    &s.b.model
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn random_terms_typecheck(seed in any::<u64>()) {
        let s = sample(seed, 3);
        prop_assert!(typecheck(&s.term, &s.ctx, &s.idx, &model(&s).sig).is_ok(), "{}", s.term);
    }

    #[test]
    fn printed_terms_reparse_exactly(seed in any::<u64>()) {
        let s = sample(seed, 3);
        let text = s.term.to_string();
        let labels = s.idx.labels().into_iter().collect();
        prop_assert_eq!(resolve(&parse_term(&text).unwrap(), &labels, &model(&s).sig), s.term);
        let j = format!("{} |- {} : {}", s.ctx, text, s.idx);
        let parsed = parse_judgement(&j).unwrap();
        prop_assert_eq!(parsed.ctx, s.ctx);
        prop_assert_eq!(parsed.idx, s.idx);
    }

    #[test]
    fn alpha_equivalence_is_an_equivalence(seed in any::<u64>()) {
        let s = sample(seed, 3);
        let c = canonicalize(&s.term);
        prop_assert!(alpha_eq(&s.term, &s.term));
        prop_assert!(alpha_eq(&s.term, &c) && alpha_eq(&c, &s.term));
        let cc = canonicalize(&c);
        prop_assert!(alpha_eq(&c, &cc) && alpha_eq(&s.term, &cc));
        prop_assert_eq!(cc, c);
    }

    #[test]
    fn canonical_forms_keep_type_and_meaning(seed in any::<u64>()) {
        let s = sample(seed, 3);
        let c = canonicalize(&s.term);
        prop_assert!(typecheck(&c, &s.ctx, &s.idx, &model(&s).sig).is_ok());
        let a: Morphism<StochQ> = eval(&s.term, &s.ctx, &s.idx, model(&s)).unwrap();
        let b: Morphism<StochQ> = eval(&c, &s.ctx, &s.idx, model(&s)).unwrap();
        prop_assert_eq!(a.kernel, b.kernel);
    }

    #[test]
    fn variable_substitution_composes(seed in any::<u64>()) {
        let s = sample(seed, 3);
        let x = Name::from("x");
        let y = Name::from("y");
        let u = fresh(NameKind::Var, &s.term.all_names());
        let two = subst_vars(&subst_vars(&s.term, &[x.clone()], &[u.clone()]), &[u], &[y.clone()]);
        let one = subst_vars(&s.term, &[x], &[y]);
        prop_assert!(alpha_eq(&two, &one), "{two}\n{one}");
    }

    #[test]
    fn cut_preserves_typing_and_is_associative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b = Builder::<Rel>::new(&mut rng, 2);
        let s = b.space(&mut rng, &["x"], 3);
        let ty = s.ctx.types()[0].clone();
        let (w, a, k, z) = (b.fresh("w"), b.fresh("a"), b.fresh("k"), b.fresh("z"));
        let p_idx = Index::new(vec![(w.clone(), vec![ty.clone()]), (k.clone(), vec![])]);
        let q_idx = Index::new(vec![(a.clone(), vec![ty.clone()]), (k.clone(), vec![])]);
        let r_idx = Index::new(vec![(k.clone(), vec![])]);
        let p = b.random_term(&mut rng, &s.ctx, &p_idx, 2);
        let yctx = Context::new(vec![(z.clone(), ty.clone())]);
        let q = b.random_term(&mut rng, &yctx, &q_idx, 2);
        let r = b.random_term(&mut rng, &yctx, &r_idx, 2);
        let ys = [(z.clone(), ty.clone())];
        let (pq, pq_idx) = cut_checked(&p, &p_idx, &w, &ys, &q, &q_idx).unwrap();
        prop_assert!(typecheck(&pq, &s.ctx, &pq_idx, &b.model.sig).is_ok(), "{pq} : {pq_idx}");
        let (left, l_idx) = cut_checked(&pq, &pq_idx, &a, &ys, &r, &r_idx).unwrap();
        let (qr, qr_idx) = cut_checked(&q, &q_idx, &a, &ys, &r, &r_idx).unwrap();
        let (right, r_idx2) = cut_checked(&p, &p_idx, &w, &ys, &qr, &qr_idx).unwrap();
        prop_assert_eq!(&l_idx, &r_idx2);
        prop_assert!(alpha_eq(&left, &right), "{left}\n{right}");
    }

    #[test]
    fn composition_and_tensor_are_monotone(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=3);
        let m = rng.gen_range(1..=3);
        let f = random_sub(&mut rng, n, m);
        let f2 = enlarge(&mut rng, &f);
        let g = random_sub(&mut rng, m, n);
        prop_assert!(f.leq(&f2));
        prop_assert!(f.then(&g).leq(&f2.then(&g)));
        prop_assert!(g.then(&f).leq(&g.then(&f2)));
        prop_assert!(f.kron(&g).leq(&f2.kron(&g)));
        prop_assert!(g.kron(&f).leq(&g.kron(&f2)));
        let rf = Kernel::from_dense(f.rows().iter().map(|r| support(r, m)).collect(), m);
        let rf2 = Kernel::from_dense(f2.rows().iter().map(|r| support(r, m)).collect(), m);
        let rg = Kernel::from_dense(g.rows().iter().map(|r| support(r, n)).collect(), n);
        prop_assert!(rf.then(&rg).leq(&rf2.then(&rg)));
    }
}

fn support(row: &[(usize, BigRational)], cols: usize) -> Vec<Boolean> {
    (0..cols).map(|j| Boolean(row.iter().any(|(c, w)| *c == j && !w.is_zero()))).collect()
}

fn random_sub<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Kernel<BigRational> {
    let dense = (0..rows)
        .map(|_| {
            let raw: Vec<u32> = (0..=cols).map(|_| rng.gen_range(0..4)).collect();
            let total: u32 = raw.iter().sum::<u32>().max(1);
            raw[..cols].iter().map(|&w| BigRational::new(w.into(), total.into())).collect()
        })
        .collect();
    Kernel::from_dense(dense, cols)
}

/// Adds part of each row's missing mass back, keeping rows substochastic.
fn enlarge<R: Rng>(rng: &mut R, k: &Kernel<BigRational>) -> Kernel<BigRational> {
    let cols = k.n_cols();
    let dense = (0..k.n_rows())
        .map(|i| {
            let mut row = k.dense_row(i);
            let gap = BigRational::one() - k.row_mass(i);
            let j = rng.gen_range(0..cols);
            row[j] += gap * BigRational::new(rng.gen_range(0..=2).into(), 2.into());
            row
        })
        .collect();
    Kernel::from_dense(dense, cols)
}

// surface

const MODEL: &str = include_str!("fixtures/corpus/nat3.model.json");

fn guard_text() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("pos(x)".to_string()),
        Just("even(y)".to_string()),
        Just("eq(x, y)".to_string()),
        Just("coin()".to_string()),
        Just("true".to_string()),
        Just("false".to_string()),
        Just("pos(x){. a2()}{. a1()}".to_string()),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} and {b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} or {b})")),
            inner.clone().prop_map(|a| format!("not ({a})")),
        ]
    })
}

fn pred_text() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("top".to_string()),
        Just("bot".to_string()),
        Just("small(x)".to_string()),
        Just("lt(x, y)".to_string()),
        guard_text().prop_map(|g| format!("[{g}]")),
    ];
    leaf.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} and {b}")),
            (inner.clone(), guard_text(), inner.clone()).prop_map(|(a, g, b)| format!("({a} +[{g}] {b})")),
        ]
    })
}

fn prog_text() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("skip".to_string()),
        Just("abort".to_string()),
        Just("x := inc(x)".to_string()),
        Just("x, y := y, x".to_string()),
        Just("y := step(x)".to_string()),
        Just("y <- any()".to_string()),
        pred_text().prop_map(|p| format!("assert {p}")),
        Just("pos(x){. eta(x, y)}{. eta(y, x)}".to_string()),
    ];
    leaf.prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(|v| v.join("; ")),
            (guard_text(), inner.clone(), inner.clone())
                .prop_map(|(g, a, b)| format!("if {g} then {{ {a} }} else {{ {b} }}")),
            (guard_text(), inner.clone()).prop_map(|(g, a)| format!("while {g} do {{ {a} }}")),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn programs_print_to_a_fixed_point_and_elaborate(text in prog_text()) {
        let (_, m) = parse_model(MODEL).unwrap();
        let sp = StateSpace::new(Context::from_pairs(&[("x", "N3"), ("y", "N3")]));
        let e = Elaborator::new(&sp, &m.sig);
        let p = parse_program(&text).unwrap();
        let printed = print_program(&p);
        let p2 = parse_program(&printed).unwrap();
        prop_assert_eq!(&print_program(&p2), &printed);
        prop_assert_eq!(print_program(&parse_program(&print_program_inline(&p)).unwrap()), printed);
        let c1 = e.prog(&p).unwrap();
        let c2 = e.prog(&p2).unwrap();
        prop_assert!(sp.check_cmd(&c1, &m.sig).is_ok());
        prop_assert!(alpha_eq(&c1.0, &c2.0));
    }

    #[test]
    fn states_elaborate_closed(text in prog_text(), g in prop::sample::select(vec!["coin()", "true", "not coin()"])) {
        let (_, m) = parse_model(MODEL).unwrap();
        let sp = StateSpace::new(Context::from_pairs(&[("x", "N3"), ("y", "N3")]));
        let src = format!("(bot +[{g}] (bot then {{ x := zero(); y := zero() }})) then {{ {text} }} observe top");
        let s = Elaborator::new(&sp, &m.sig).state(&parse_state(&src).unwrap()).unwrap();
        prop_assert!(sp.check_state(&s, &m.sig).is_ok());
    }

    #[test]
    fn diagnostics_stay_inside_the_text(text in "[a-z(){};:=<>.,+ \\[\\]\n|-]{0,40}") {
        for r in [
            parse_program(&text).err(),
            parse_judgement(&text).err(),
            parse_state(&text).err(),
            parse_term(&text).err(),
        ].into_iter().flatten() {
            prop_assert!(r.span.within(text.len()), "{:?} in {:?}", r.span, text);
            prop_assert!(text.is_char_boundary(r.span.start) && text.is_char_boundary(r.span.end));
        }
    }
}

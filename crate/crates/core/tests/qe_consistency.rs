mod common;

use std::collections::BTreeMap;
use std::path::Path;

use common::gen::{self, Shape, FREE};
use num_rational::BigRational;
use oag::cli::{load_corpus, resolve_structure};
use oag::logic::{substitute, Var};
use oag::sets::{normalize, Component};
use oag::structure::PredSemantics;
use oag::{decide, eliminate_all, parse_formula, qe, Formula, LinearTerm, Scalar, StructureSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Q with sqrt(2) constants, the cut C below sqrt(2) and D = {0, ..., 3}.
fn rich() -> StructureSpec {
    StructureSpec::sqrt2_cut().with_predicate("D", PredSemantics::DiscreteRange(3)).unwrap()
}

fn sentence(seed: u64, extended: bool) -> Formula {
    let shape = Shape { free: 0, extended, ..Shape::default() };
    gen::random_formula(&mut ChaCha8Rng::seed_from_u64(seed), &shape)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn elimination_is_idempotent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = gen::random_formula(&mut rng, &Shape::default());
        let q = StructureSpec::rationals();
        let once = eliminate_all(&f, &q).unwrap();
        let twice = eliminate_all(once.formula(), &q).unwrap();
        for _ in 0..100 {
            let env = FREE.iter().map(|n| (Var::new(*n), Scalar::Rat(gen::rational(&mut rng, 6, 3)))).collect();
            prop_assert_eq!(qe::evaluate(&once, &env).unwrap(), qe::evaluate(&twice, &env).unwrap());
        }
    }

    #[test]
    fn negation_flips_decisions_over_q(seed in any::<u64>()) {
        let f = sentence(seed, false);
        let q = StructureSpec::rationals();
        prop_assert_eq!(decide(&f.clone().not(), &q).unwrap(), !decide(&f, &q).unwrap());
    }

    #[test]
    fn negation_flips_decisions_with_predicates(seed in any::<u64>()) {
        let f = sentence(seed, true);
        let s = rich();
        prop_assert_eq!(decide(&f.clone().not(), &s).unwrap(), !decide(&f, &s).unwrap());
    }
}

fn sets_corpus() -> Vec<(String, Formula, StructureSpec)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/sets");
    let mut out = Vec::new();
    for e in load_corpus(&dir).unwrap() {
        let f = parse_formula(&e.formula).unwrap();
        let structures = match e.option("structure") {
            Some(s) => vec![resolve_structure(s, Some(&dir)).unwrap()],
            None => vec![StructureSpec::rationals(), StructureSpec::q_n(3).unwrap(), StructureSpec::sqrt2_cut()],
        };
        out.extend(structures.into_iter().map(|s| (e.name(), f.clone(), s)));
    }
    out
}

#[test]
fn sample_point_exists_iff_set_is_inhabited() {
    for (name, f, s) in sets_corpus() {
        let x = oag::sets::the_variable(&f).unwrap();
        let inhabited = decide(&Formula::exists(x, f.clone()), &s).unwrap();
        assert_eq!(qe::sample_point(&f, &s).unwrap().is_some(), inhabited, "{name} over {}", s.id());
    }
}

#[test]
fn normalize_agrees_with_pointwise_truth() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (name, f, s) in sets_corpus() {
        let x = oag::sets::the_variable(&f).unwrap();
        let set = normalize(&f, &s).unwrap();
        let mut points: Vec<Scalar> = (0..100)
            .map(|_| Scalar::Rat(BigRational::new(rng.gen_range(-40i64..=40).into(), rng.gen_range(1i64..=8).into())))
            .collect();
        for c in set.components() {
            match c {
                Component::Point(p) => points.push(p.clone()),
                Component::Open(a, b) => points.extend([a, b].into_iter().filter_map(|e| e.finite().cloned())),
            }
        }
        // The domain is Q; irrational endpoints are boundaries, not members.
        for p in points.into_iter().filter(Scalar::is_rational) {
            let at = substitute(&f, &x, &LinearTerm::constant(p.clone()));
            let truth = decide(&at, &s).unwrap();
            assert_eq!(set.contains(&p), truth, "{name} over {} at {p}", s.id());
        }
    }
}

#[test]
fn evaluation_needs_every_free_variable() {
    let q = StructureSpec::rationals();
    let qf = eliminate_all(&parse_formula("exists u (x < u & u < y)").unwrap(), &q).unwrap();
    let partial: BTreeMap<Var, Scalar> = [(Var::new("x"), Scalar::zero())].into();
    assert!(qe::evaluate(&qf, &partial).is_err());
}

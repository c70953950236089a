mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::gen::{self, Shape, FREE};
use common::oracle::Oracle;
use oag::logic::{build_dci, substitute, to_nnf, Var};
use oag::parser::print_formula;
use oag::{parse_formula, LinearTerm};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn nnf_preserves_truth(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = gen::random_formula(&mut rng, &Shape::default());
        let g = to_nnf(&f);
        let env: BTreeMap<Var, _> = FREE.iter().map(|n| (Var::new(*n), gen::rational(&mut rng, 6, 3))).collect();
        prop_assert_eq!(Oracle::default().eval(&f, &mut env.clone()), Oracle::default().eval(&g, &mut env.clone()));
    }

    /// The substituted term mentions `p`, which `f` never uses, and `u`,
    /// which `f` may bind: no coefficient can cancel and capture must be
    /// avoided.
    #[test]
    fn substitution_tracks_free_variables(seed in any::<u64>(), cp in 1i64..5, cu in -4i64..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = gen::random_formula(&mut rng, &Shape::default());
        let free = f.free_var_set();
        prop_assume!(!free.is_empty());
        let v = free.iter().nth(rng.gen_range(0..free.len())).unwrap().clone();
        let t = LinearTerm::var("p").scale(&oag::scalar::rat_int(cp)).add(&LinearTerm::var("u").scale(&oag::scalar::rat_int(cu)));
        let mut expected: BTreeSet<Var> = free.iter().filter(|w| **w != v).cloned().collect();
        expected.extend(t.vars().cloned());
        prop_assert_eq!(substitute(&f, &v, &t).free_var_set(), expected);
    }

    #[test]
    fn dci_instances_are_sentences(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = gen::random_formula(&mut rng, &Shape { max_quantifiers: 1, ..Shape::default() });
        let free = f.free_vars();
        prop_assume!(!free.is_empty());
        let v = free[0].clone();
        let params: Vec<Var> = free[1..].to_vec();
        let dci = build_dci(&f, &v, &params).unwrap();
        prop_assert!(dci.free_vars().is_empty());
        prop_assert!(dci.quantifier_depth() >= f.quantifier_depth() + 2);
    }

    #[test]
    fn parse_errors_point_inside_input(seed in any::<u64>(), junk in prop::sample::select(vec!["(", ")", "&", "<", "~", "#", "@", "exists", "1/0", "sqrt(", ""])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let text = print_formula(&gen::random_formula(&mut rng, &Shape { extended: true, ..Shape::default() }));
        let cut = rng.gen_range(0..=text.len());
        let mutated = if junk.is_empty() { text[..cut].to_string() } else { format!("{}{junk}{}", &text[..cut], &text[cut..]) };
        if let Err(e) = parse_formula(&mutated) {
            prop_assert!(e.span.start <= e.span.end && e.span.end <= mutated.len(), "{:?} in {:?}", e.span, mutated);
            prop_assert_eq!(e.span.line, 1);
            prop_assert_eq!(e.span.column, e.span.start + 1);
        }
    }
}

#[test]
fn parsing_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let text = print_formula(&gen::random_formula(&mut rng, &Shape { extended: true, ..Shape::default() }));
        assert_eq!(parse_formula(&text).unwrap(), parse_formula(&text).unwrap());
    }
}

mod common;

use common::gen::{self, Shape};
use oag::logic::alpha_eq;
use oag::parser::print_formula;
use oag::parse_formula;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn extended() -> Shape {
    Shape { extended: true, ..Shape::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn print_then_parse_is_alpha_equal(seed in any::<u64>()) {
        let f = gen::random_formula(&mut ChaCha8Rng::seed_from_u64(seed), &extended());
        let text = print_formula(&f);
        let g = parse_formula(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert!(alpha_eq(&f, &g), "{} reparsed as {}", text, print_formula(&g));
    }

    #[test]
    fn printing_is_a_fixed_point(seed in any::<u64>()) {
        let f = gen::random_formula(&mut ChaCha8Rng::seed_from_u64(seed), &extended());
        let once = print_formula(&f);
        let twice = print_formula(&parse_formula(&once).unwrap());
        prop_assert_eq!(once, twice);
    }
}

#[test]
fn renaming_bound_variables_keeps_alpha_class() {
    let a = parse_formula("forall u exists v (u < v & D(v - x))").unwrap();
    let b = parse_formula("forall p exists q (p < q & D(q - x))").unwrap();
    let c = parse_formula("forall p exists q (p < q & D(q - y))").unwrap();
    assert!(alpha_eq(&a, &b));
    assert!(!alpha_eq(&a, &c));
}

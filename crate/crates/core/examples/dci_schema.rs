//! Instances of the definable continuous induction schema, and the bounded
//! variant on a half-open interval.

use oag::lab::{check_bci, check_dci};
use oag::{parse_formula, QeEngine, StructureSpec, Var};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let v = Var::new("v");
    let q = StructureSpec::rationals();
    let engine = QeEngine::new(&q);
    for phi in ["v < w", "v < 1 | (2 < v & v < 3)", "exists u (v < u & u < w)"] {
        let r = check_dci(&parse_formula(phi)?, &v, &engine)?;
        println!("[Q] DCI for {phi}: {}", r.verdict);
    }

    // the cut below sqrt(2) has no least upper bound among the rationals
    let s = StructureSpec::sqrt2_cut();
    let engine = QeEngine::new(&s);
    let r = check_dci(&parse_formula("C(v) | (v < w & 5 < w)")?, &v, &engine)?;
    println!("[{}] DCI for {}: {}", s.id(), r.instance, r.verdict);
    if let Some(params) = &r.counterexample_params {
        for (name, value) in params {
            println!("  falsified at {name} = {value}");
        }
    }
    println!("  sentence: {}", r.sentence);

    let r = check_bci(&parse_formula("C(2*v)")?, &v, &0.into(), &1.into(), &engine)?;
    println!("[{}] BCI on [0, 1) for C(2*v): {}", s.id(), r.verdict);
    Ok(())
}

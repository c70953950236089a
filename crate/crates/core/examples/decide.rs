//! Deciding sentences and eliminating quantifiers over Q and its expansions.

use oag::{eliminate_all, parse_formula, QeEngine, StructureSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = StructureSpec::rationals();
    let engine = QeEngine::new(&q);

    for s in [
        "exists x (0 < x & x < 1)",
        "forall x exists y (x < y)",
        "exists x forall y (y <= x)",
        "forall x forall y (x < y -> exists z (x < z & z < y))",
    ] {
        println!("{s}  =>  {}", engine.decide(&parse_formula(s)?)?);
    }

    // free variables survive as a quantifier-free condition
    let f = parse_formula("exists z (x < z & z < y & 0 < z)")?;
    println!("{f}  <=>  {}", eliminate_all(&f, &q)?);

    // sqrt(2) is not a rational, so no x hits it
    let r2 = StructureSpec::sqrt2_cut();
    let s = parse_formula("exists x (x = 1*sqrt(2))")?;
    println!("[{}] {s}  =>  {}", r2.id(), QeEngine::new(&r2).decide(&s)?);

    // predicates expand away: D is {0, 1, 2, 3} in Q_3
    let q3 = StructureSpec::q_n(3)?;
    let s = parse_formula("exists x (D(x) & 2 < x & x < 4)")?;
    println!("[{}] {s}  =>  {}", q3.id(), QeEngine::new(&q3).decide(&s)?);
    Ok(())
}

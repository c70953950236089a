//! Cut analysis: proper cuts with a least upper bound versus gaps.

use oag::lab::completeness_audit;
use oag::{parse_formula, QeEngine, StructureSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = StructureSpec::rationals();
    let r2 = StructureSpec::sqrt2_cut();
    let cases = [
        (&q, "x < 3"),
        (&q, "x <= 3/2 | x < -4"),
        (&q, "x < x"),
        (&q, "x = x"),
        (&r2, "C(x)"),
        (&r2, "C(x - 1)"),
        (&r2, "~C(-x)"),
    ];
    for (s, text) in cases {
        let r = completeness_audit(&parse_formula(text)?, &QeEngine::new(s))?;
        println!("[{}] {text:<16} {} = {}  (lub sentence: {})", s.id(), r.set, r.verdict, r.lub_exists);
    }
    Ok(())
}

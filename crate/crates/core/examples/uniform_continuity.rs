//! Continuity and uniform continuity of piecewise-linear definable
//! functions on [0, 1].

use oag::lab::uniform_continuity_check;
use oag::{parse_formula, QeEngine, StructureSpec, Var};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = StructureSpec::rationals();
    let engine = QeEngine::new(&q);
    let (x, y) = (Var::new("x"), Var::new("y"));
    for g in [
        "y = 3*x + 1",
        "(x < 1/2 & y = x) | (1/2 <= x & y = 1 - x)",
        "(x <= 1/4 & y = 1 - 4*x) | (1/4 < x & x <= 3/4 & y = 0) | (3/4 < x & y = 4*x - 3)",
        "(x < 1/2 & y = x) | (1/2 <= x & y = x + 1)",
        "(x = 1/2 & y = 1) | (~(x = 1/2) & y = 0)",
    ] {
        let r = uniform_continuity_check(&parse_formula(g)?, &x, &y, &0.into(), &1.into(), &engine)?;
        println!("{g}\n  continuous {}, uniformly continuous {}", r.continuous, r.uniformly_continuous);
    }
    Ok(())
}

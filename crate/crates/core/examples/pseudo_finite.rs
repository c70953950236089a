//! One-variable definable sets in canonical form, and the check that
//! pseudo-finite (discrete, closed, bounded) means finite.

use oag::sets::normalize;
use oag::{parse_formula, StructureSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q3 = StructureSpec::q_n(3)?;
    let r2 = StructureSpec::sqrt2_cut();
    for (s, text) in [
        (&q3, "x = 0 | x = 1 | 2*x = 5"),
        (&q3, "D(x) | D(x - 1/2)"),
        (&q3, "0 <= x & x <= 1"),
        (&q3, "~D(x)"),
        (&r2, "C(x) & ~C(x + 1)"),
        (&r2, "x = 1*sqrt(2)"),
    ] {
        let set = normalize(&parse_formula(text)?, s)?;
        let pf = set.is_pseudo_finite();
        println!("[{}] {text}: {set}", s.id());
        println!(
            "  discrete {}, closed {}, bounded {} => pseudo-finite {}, finite {}",
            pf.discrete,
            pf.closed,
            pf.bounded,
            pf.verdict,
            set.as_points().is_some()
        );
        println!("  closure {}, interior {}", set.closure(), set.interior());
    }
    Ok(())
}

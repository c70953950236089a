//! Finite subcovers of [0, 1] from definable open covers, by the sweep
//! that advances a reach point one fiber at a time.

use oag::lab::{extract_subcover, DefinableFamily, LabError};
use oag::{parse_formula, QeEngine, StructureSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = StructureSpec::rationals();
    let engine = QeEngine::new(&q);
    for text in ["a - 1/4 < x & x < a + 1/4", "a - 1/16 < x & x < a + 1/16", "a - 1/3 < x & x < a + 1/6", "a < x"] {
        let fam = DefinableFamily::new(parse_formula(text)?, "a", "x")?;
        let cert = extract_subcover(&fam, &0.into(), &1.into(), &engine)?;
        let params: Vec<String> = cert.params.iter().map(|p| p.to_string()).collect();
        println!("{fam}: {} fibers, verified {}", cert.params.len(), cert.verified);
        println!("  params {}", params.join(", "));
        for step in &cert.trace {
            println!("  reach {} -> sup {} via a = {}", step.reach, step.sup_extension, step.param);
        }
    }

    // closed fibers are not an open cover; the audit stops the sweep
    let fam = DefinableFamily::new(parse_formula("a - 1/4 <= x & x <= a + 1/4")?, "a", "x")?;
    match extract_subcover(&fam, &0.into(), &1.into(), &engine) {
        Err(LabError::AuditFailed(audit)) => println!("{fam}: rejected, fibers open = {:?}", audit.all_fibers_open),
        other => println!("{fam}: unexpected {other:?}"),
    }
    Ok(())
}

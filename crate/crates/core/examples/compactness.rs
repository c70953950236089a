//! Definable compactness: a cover of [0, 1] whose parameters come from a
//! directed exhaustion by pseudo-finite sets has a subcover in one fiber.

use oag::lab::{compactness_certificate, family_audit, AuditRole, CompactnessOutcome, DefinableFamily};
use oag::{parse_formula, QeEngine, StructureSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // in Q_4 the fibers { k/4 : k/4 <= t } exhaust the grid
    let q4 = StructureSpec::q_n(4)?;
    let engine = QeEngine::new(&q4);
    let psi = DefinableFamily::new(parse_formula("D(4*x) & x <= t")?, "t", "x")?;
    let audit = family_audit(&psi, &AuditRole::Exhaustion, &engine)?;
    println!("{psi}: directed {:?}, pseudo-finite fibers {:?}", audit.directed, audit.all_fibers_pseudo_finite);

    let fam = DefinableFamily::new(parse_formula("a - 1/4 < x & x < a + 1/4")?, "a", "x")?;
    match compactness_certificate(&fam, &psi, &0.into(), &1.into(), &engine)? {
        CompactnessOutcome::Certified { t0, certificate, restricted, verified } => {
            let params: Vec<String> = certificate.params.iter().map(|p| p.to_string()).collect();
            println!("{fam}: fiber t0 = {t0}, params [{}], restricted {restricted}, verified {verified}", params.join(", "));
        }
        CompactnessOutcome::ExhaustionInsufficient { .. } => println!("{fam}: no fiber suffices"),
    }

    // over Q the two-point fibers cannot carry a cover of [0, 1]
    let q = StructureSpec::rationals();
    let psi = DefinableFamily::new(parse_formula("x = 0 | x = t")?, "t", "x")?;
    let out = compactness_certificate(&fam, &psi, &0.into(), &1.into(), &QeEngine::new(&q))?;
    println!("{psi}: {}", out.to_report(&psi).verdict_text());
    Ok(())
}

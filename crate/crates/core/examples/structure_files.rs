//! Loading structure descriptions and running a corpus directory, as the
//! command line does.

use std::path::Path;

use oag::cli::{load_corpus, run_corpus, Outcome};
use oag::qe::Limits;
use oag::StructureSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let s = StructureSpec::load(&root.join("structures/qsqrt2.struct"))?;
    print!("{s}");

    let entries = load_corpus(&root.join("corpus/gap"))?;
    for r in run_corpus(&entries, "Q", Limits::default(), None) {
        let got = match &r.outcome {
            Outcome::Report(rep) => rep.verdict_text(),
            Outcome::Error(e) | Outcome::Resource(e) => e.clone(),
        };
        println!("{:<16} {:<5} {got}", r.entry.name(), r.entry.check);
    }
    Ok(())
}

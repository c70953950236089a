//! The acceptance suite: one pass/fail line per criterion, then a single
//! assertion that all of them passed.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use common::gen::{self, Shape, FREE};
use common::oracle::Oracle;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use oag::cli::{load_corpus, resolve_structure, run_corpus, CorpusEntry, CorpusResult, Outcome};
use oag::lab::Report;
use oag::logic::{alpha_eq, Var};
use oag::parser::print_formula;
use oag::qe::Limits;
use oag::sets::normalize;
use oag::{eliminate_all, parse_formula, Scalar, StructureSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x0A6;

struct Verdict {
    passed: bool,
    detail: String,
}

fn corpus(name: &str) -> Vec<CorpusEntry> {
    load_corpus(&Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)).expect("corpus loads")
}

fn run(entries: &[CorpusEntry], structure: &str) -> Vec<CorpusResult> {
    run_corpus(entries, structure, Limits::default(), None)
}

fn report(r: &CorpusResult) -> Option<&Report> {
    match &r.outcome {
        Outcome::Report(rep) => Some(rep),
        _ => None,
    }
}

fn failures(results: &[CorpusResult]) -> Vec<String> {
    results.iter().filter(|r| !r.passed).map(|r| r.entry.name()).collect()
}

fn qe_soundness() -> Verdict {
    let start = Instant::now();
    let q = StructureSpec::rationals();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut disagreements, mut errors, mut quantified) = (0, 0, 0);
    for _ in 0..500 {
        let f = gen::random_formula(&mut rng, &Shape::default());
        quantified += usize::from(f.quantifier_depth() > 0);
        let Ok(qf) = eliminate_all(&f, &q) else {
            errors += 1;
            continue;
        };
        let mut oracle = Oracle::default();
        for _ in 0..100 {
            let env: BTreeMap<Var, _> = FREE.iter().map(|n| (Var::new(*n), gen::rational(&mut rng, 6, 3))).collect();
            let scalars = env.iter().map(|(v, r)| (v.clone(), Scalar::Rat(r.clone()))).collect();
            let got = qf.formula().evaluate_qf(&scalars).expect("free variables assigned");
            if got != oracle.eval(&f, &mut env.clone()) {
                disagreements += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    Verdict {
        passed: disagreements == 0 && errors == 0 && elapsed < Duration::from_secs(300),
        detail: format!(
            "500 formulas ({quantified} quantified) x 100 assignments, {disagreements} disagreements, {errors} errors, {:.1}s",
            elapsed.as_secs_f64()
        ),
    }
}

fn dci_positive() -> Verdict {
    let start = Instant::now();
    let plain = corpus("dci");
    let with_d = corpus("dci_qn");
    let mut failed = failures(&run(&plain, "Q"));
    let mut runs = plain.len();
    for n in 0..=16 {
        let structure = format!("Q_{n}");
        for r in run(&plain, &structure).iter().chain(&run(&with_d, &structure)) {
            runs += 1;
            if !r.passed {
                failed.push(format!("{} over {structure}", r.entry.name()));
            }
        }
    }
    let elapsed = start.elapsed();
    Verdict {
        passed: plain.len() >= 50 && failed.is_empty() && elapsed < Duration::from_secs(600),
        detail: format!(
            "{} plain + {} D_n instances, {runs} decisions over Q and Q_0..Q_16, failures {failed:?}, {:.1}s",
            plain.len(),
            with_d.len(),
            elapsed.as_secs_f64()
        ),
    }
}

fn gap_negative() -> Verdict {
    let entries = corpus("gap");
    let results = run(&entries, "Q");
    let cut = |r: &&CorpusResult| r.entry.path.file_name().unwrap().to_string_lossy().starts_with("cut");
    let verdict = |r: &CorpusResult| report(r).map(Report::verdict_text).unwrap_or_default();
    let (cuts, rationals): (Vec<&CorpusResult>, Vec<&CorpusResult>) = results.iter().partition(cut);
    let gaps = cuts.iter().filter(|r| r.entry.check == "gap" && verdict(r) == "gap").count();
    let dci_false = cuts.iter().filter(|r| r.entry.check == "dci" && verdict(r) == "false").count();
    let no_gap = rationals.iter().filter(|r| r.entry.check == "gap" && verdict(r) != "gap" && r.passed).count();
    let dci_true = rationals.iter().filter(|r| r.entry.check == "dci" && verdict(r) == "true").count();
    let files = |rs: &[&CorpusResult]| rs.iter().filter(|r| r.entry.index == 0).count();
    let (n_cut, n_rat) = (files(&cuts), files(&rationals));
    Verdict {
        passed: n_cut >= 6 && gaps == n_cut && dci_false == n_cut && no_gap == n_rat && dci_true == n_rat && failures(&results).is_empty(),
        detail: format!(
            "sqrt2 cut: {gaps}/{n_cut} gap, {dci_false}/{n_cut} dci false; over Q: {no_gap}/{n_rat} no gap, {dci_true}/{n_rat} dci true"
        ),
    }
}

fn dci_bci_agreement() -> Verdict {
    let entries = corpus("pairs");
    let results = run(&entries, "Q");
    let mut by_file: BTreeMap<&Path, Vec<(&str, String)>> = BTreeMap::new();
    for r in &results {
        let v = report(r).map(Report::verdict_text).unwrap_or_else(|| "error".into());
        by_file.entry(&r.entry.path).or_default().push((&r.entry.check, v));
    }
    let mut disagree = Vec::new();
    for (path, vs) in &by_file {
        let get = |c: &str| vs.iter().find(|(k, _)| *k == c).map(|(_, v)| v.clone());
        match (get("dci"), get("bci")) {
            (Some(d), Some(b)) if d == b && d != "error" => {}
            other => disagree.push(format!("{}: {other:?}", path.display())),
        }
    }
    Verdict {
        passed: disagree.is_empty() && failures(&results).is_empty(),
        detail: format!("{} pairs, {} disagreements {disagree:?}", by_file.len(), disagree.len()),
    }
}

fn heine_borel() -> Verdict {
    let entries = corpus("subcover");
    let results = run(&entries, "Q");
    let (mut verified, mut rejected, mut bound_ok, mut bounded, mut slowest) = (0, 0, true, 0, 0);
    for r in &results {
        let Some(rep) = report(r) else { continue };
        if r.entry.expect == "true" {
            if r.passed {
                verified += 1;
            }
            slowest = slowest.max(rep.timing_ms);
            if let Some(w) = r.entry.option("width") {
                let w: BigRational = w.parse().expect("width is a rational");
                let limit = w.recip().ceil().to_integer().to_i64().unwrap() + 1;
                let count = rep.params.as_ref().map_or(usize::MAX, Vec::len);
                bounded += 1;
                bound_ok &= count.to_i64().is_some_and(|c| c <= limit);
            }
        } else if rep.verdict_text() == "audit_failed" {
            rejected += 1;
        }
    }
    Verdict {
        passed: verified >= 10 && rejected >= 3 && bound_ok && bounded >= 3 && slowest < 10_000 && failures(&results).is_empty(),
        detail: format!(
            "{verified} covers verified, {bounded} width families within ceil(1/w)+1: {bound_ok}, slowest {slowest}ms, {rejected} non-covers rejected by audit"
        ),
    }
}

fn shipped_structures() -> Vec<StructureSpec> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("structures");
    let mut paths: Vec<_> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    paths.iter().map(|p| resolve_structure(p.to_str().unwrap(), None).unwrap()).collect()
}

fn pseudo_finite() -> Verdict {
    let entries = corpus("sets");
    let structures = shipped_structures();
    let (mut checked, mut disagree) = (0, Vec::new());
    for s in &structures {
        for e in &entries {
            let f = parse_formula(&e.formula).expect("corpus parses");
            // Structure-specific formulas only make sense where their predicates exist.
            if s.check_formula(&f).is_err() {
                continue;
            }
            let set = normalize(&f, s).expect("normalizes");
            checked += 1;
            if set.is_pseudo_finite().verdict != set.as_points().is_some() {
                disagree.push(format!("{} over {}", e.name(), s.id()));
            }
        }
    }
    let corpus_ok = failures(&run(&entries, "Q")).is_empty();
    Verdict {
        passed: entries.len() >= 100 && disagree.is_empty() && corpus_ok,
        detail: format!(
            "{} formulas, {checked} (formula, structure) cases over {} structures, disagreements {disagree:?}, corpus expectations met: {corpus_ok}",
            entries.len(),
            structures.len()
        ),
    }
}

fn uniform_continuity() -> Verdict {
    let entries = corpus("ucont");
    let results = run(&entries, "Q");
    let (mut continuous, mut implied, mut controls, mut flagged, mut wrong) = (0, 0, 0, 0, Vec::new());
    for r in &results {
        let Some(w) = report(r).and_then(|rep| rep.witness.clone()) else {
            wrong.push(r.entry.name());
            continue;
        };
        let (c, u) = (w["continuous"].as_bool().unwrap(), w["uniformly_continuous"].as_bool().unwrap());
        let expected = r.entry.option("continuous") == Some("true");
        if c {
            continuous += 1;
            implied += usize::from(u);
        }
        if !expected {
            controls += 1;
            flagged += usize::from(!c);
        }
        if c != expected {
            wrong.push(r.entry.name());
        }
    }
    Verdict {
        passed: entries.len() >= 10 && implied == continuous && flagged == controls && wrong.is_empty(),
        detail: format!(
            "{} graphs, {implied}/{continuous} continuous also uniformly continuous, {flagged}/{controls} discontinuous controls flagged, misjudged {wrong:?}",
            entries.len()
        ),
    }
}

fn parser_roundtrip() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let shape = Shape { extended: true, ..Shape::default() };
    let mut failed = 0;
    for _ in 0..1000 {
        let f = gen::random_formula(&mut rng, &shape);
        if !parse_formula(&print_formula(&f)).is_ok_and(|g| alpha_eq(&f, &g)) {
            failed += 1;
        }
    }
    Verdict { passed: failed == 0, detail: format!("1000 formulas, {failed} failures") }
}

#[test]
fn acceptance() {
    type Criterion = (&'static str, fn() -> Verdict);
    let criteria: [Criterion; 8] = [
        ("QE soundness against the oracle", qe_soundness),
        ("DCI positive suite", dci_positive),
        ("gap negative suite", gap_negative),
        ("DCI/BCI agreement", dci_bci_agreement),
        ("Heine-Borel extraction", heine_borel),
        ("pseudo-finite iff finite", pseudo_finite),
        ("uniform continuity", uniform_continuity),
        ("parser round-trip", parser_roundtrip),
    ];
    let mut all = true;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        all &= v.passed;
        println!("criterion {} {}: {} ({})", i + 1, name, if v.passed { "PASS" } else { "FAIL" }, v.detail);
    }
    assert!(all, "some acceptance criteria failed");
}

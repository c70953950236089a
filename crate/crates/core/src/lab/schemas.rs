use std::collections::BTreeMap;
use std::time::Instant;

use serde_json::{json, Value};

use super::{constant, elapsed_ms, instantiate, reserved, LabError, Report};
use crate::logic::{build_bci_unchecked, build_dci_unchecked, Formula, LinearTerm, Var};
use crate::qe::QeEngine;
use crate::scalar::Scalar;
use crate::sets::{cut_analysis, set_of, the_variable, CutVerdict, DefinableSet1D};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DciReport {
    pub check: &'static str,
    /// The formula the schema was instantiated with.
    pub instance: Formula,
    /// The closed schema instance that was decided.
    pub sentence: Formula,
    pub structure: String,
    pub verdict: bool,
    pub counterexample_params: Option<BTreeMap<Var, Scalar>>,
    pub timing_ms: u64,
}

impl DciReport {
    pub fn to_report(&self) -> Report {
        let mut r = Report::new(self.check, &self.structure, self.instance.to_string(), self.verdict);
        r.witness = self.counterexample_params.as_ref().map(|m| {
            Value::Object(m.iter().map(|(k, v)| (k.to_string(), Value::String(v.to_string()))).collect())
        });
        r.timing_ms = self.timing_ms;
        r
    }
}

/// Parameters in order of first occurrence. `v` itself may have cancelled
/// out of `phi` (as in `v = v`); the instance is then still well-formed.
fn params_of(phi: &Formula, v: &Var) -> Vec<Var> {
    phi.free_vars().into_iter().filter(|w| w != v).collect()
}

/// Decides `forall params. matrix`; on failure samples falsifying
/// parameter values left to right and re-checks them.
fn decide_with_counterexample(
    matrix: &Formula,
    params: &[Var],
    engine: &QeEngine<'_>,
) -> Result<(bool, Option<BTreeMap<Var, Scalar>>), LabError> {
    let verdict = engine.decide(&Formula::forall_all(params, matrix.clone()))?;
    if verdict || params.is_empty() {
        return Ok((verdict, None));
    }
    let mut falsifier = matrix.clone().not();
    let mut chosen = BTreeMap::new();
    for (i, w) in params.iter().enumerate() {
        let rest = Formula::exists_all(&params[i + 1..], falsifier.clone());
        let value = set_of(w, &rest, engine)?
            .sample()
            .ok_or_else(|| LabError::Inconsistent(format!("no falsifying value for {w}")))?;
        falsifier = instantiate(&falsifier, w, &value);
        chosen.insert(w.clone(), value);
    }
    if engine.decide(&falsifier)? {
        Ok((false, Some(chosen)))
    } else {
        Err(LabError::Inconsistent("sampled parameters do not falsify the instance".into()))
    }
}

/// Decides the definable continuous induction instance for `phi` in `v`.
pub fn check_dci(phi: &Formula, v: &Var, engine: &QeEngine<'_>) -> Result<DciReport, LabError> {
    let start = Instant::now();
    let params = params_of(phi, v);
    let matrix = build_dci_unchecked(phi, v, &[]);
    let sentence = Formula::forall_all(&params, matrix.clone());
    let (verdict, counterexample_params) = decide_with_counterexample(&matrix, &params, engine)?;
    Ok(DciReport {
        check: "dci",
        instance: phi.clone(),
        sentence,
        structure: engine.structure().id().to_string(),
        verdict,
        counterexample_params,
        timing_ms: elapsed_ms(start),
    })
}

/// Decides the bounded induction instance for `phi` on `[a, b)`.
pub fn check_bci(phi: &Formula, v: &Var, a: &Scalar, b: &Scalar, engine: &QeEngine<'_>) -> Result<DciReport, LabError> {
    let start = Instant::now();
    if a >= b {
        return Err(LabError::DegenerateInterval(a.clone(), b.clone()));
    }
    let params = params_of(phi, v);
    let matrix = build_bci_unchecked(phi, v, &constant(a), &constant(b), &[])?;
    let sentence = Formula::forall_all(&params, matrix.clone());
    let (verdict, counterexample_params) = decide_with_counterexample(&matrix, &params, engine)?;
    Ok(DciReport {
        check: "bci",
        instance: phi.clone(),
        sentence,
        structure: engine.structure().id().to_string(),
        verdict,
        counterexample_params,
        timing_ms: elapsed_ms(start),
    })
}

/// `exists z (z bounds f above & z is below every upper bound of f)`
pub fn lub_sentence(f: &Formula, x: &Var) -> Formula {
    let mut avoid = f.all_vars();
    avoid.insert(x.clone());
    let z = reserved("z", &avoid);
    avoid.insert(z.clone());
    let y = reserved("y", &avoid);
    let bounded_by = |b: &Var| Formula::forall(x.clone(), f.clone().implies(Formula::le(LinearTerm::var(x.clone()), LinearTerm::var(b.clone()))));
    let least = Formula::forall(
        y.clone(),
        bounded_by(&y).implies(Formula::le(LinearTerm::var(z.clone()), LinearTerm::var(y.clone()))),
    );
    Formula::exists(z.clone(), bounded_by(&z).and(least))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletenessReport {
    pub instance: Formula,
    pub structure: String,
    pub set: DefinableSet1D,
    pub verdict: CutVerdict,
    pub lub_exists: bool,
    pub timing_ms: u64,
}

impl CompletenessReport {
    pub fn to_report(&self) -> Report {
        let mut r = Report::new("gap", &self.structure, self.instance.to_string(), self.verdict.label());
        let mut w = json!({ "lub_exists": self.lub_exists });
        match &self.verdict {
            CutVerdict::ProperCutWithLub(h) => w["lub"] = Value::String(h.to_string()),
            CutVerdict::Gap(h) => w["boundary"] = Value::String(h.to_string()),
            _ => {}
        }
        r.witness = Some(w);
        r.components = Some(self.set.components().iter().map(|c| c.to_string()).collect());
        r.timing_ms = self.timing_ms;
        r
    }
}

/// Cut analysis of a one-variable formula, cross-checked against the
/// first-order least-upper-bound sentence.
pub fn completeness_audit(f: &Formula, engine: &QeEngine<'_>) -> Result<CompletenessReport, LabError> {
    let start = Instant::now();
    let x = &the_variable(f)?;
    let set = set_of(x, f, engine)?;
    let verdict = cut_analysis(&set, engine.structure());
    let lub_exists = engine.decide(&lub_sentence(f, x))?;
    let agrees = match verdict {
        CutVerdict::Gap(_) => !lub_exists,
        CutVerdict::ProperCutWithLub(_) => lub_exists,
        CutVerdict::NotACut | CutVerdict::WholeGroup => true,
    };
    if !agrees {
        return Err(LabError::Inconsistent(format!("cut verdict {verdict} but lub sentence is {lub_exists}")));
    }
    Ok(CompletenessReport {
        instance: f.clone(),
        structure: engine.structure().id().to_string(),
        set,
        verdict,
        lub_exists,
        timing_ms: elapsed_ms(start),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;
    use crate::structure::StructureSpec;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn dci_examples() {
        let q = StructureSpec::rationals();
        let e = QeEngine::new(&q);
        assert!(check_dci(&p("v = v"), &Var::new("v"), &e).unwrap().verdict);
        assert!(check_dci(&p("v < w"), &Var::new("v"), &e).unwrap().verdict);
        let s = StructureSpec::sqrt2_cut();
        let r = check_dci(&p("C(v)"), &Var::new("v"), &QeEngine::new(&s)).unwrap();
        assert!(!r.verdict);
        assert_eq!(r.counterexample_params, None);
    }

    #[test]
    fn dci_counterexample_params() {
        // below w, or a gap-shaped set when w is large
        let s = StructureSpec::sqrt2_cut();
        let e = QeEngine::new(&s);
        let r = check_dci(&p("C(v) | (v < w & 5 < w)"), &Var::new("v"), &e).unwrap();
        assert!(!r.verdict);
        let w = &r.counterexample_params.unwrap()[&Var::new("w")];
        assert!(*w <= Scalar::from(5));
    }

    #[test]
    fn bci_examples() {
        let q = StructureSpec::rationals();
        let e = QeEngine::new(&q);
        let v = Var::new("v");
        assert!(check_bci(&p("v = v"), &v, &0.into(), &1.into(), &e).unwrap().verdict);
        assert!(check_bci(&p("v < 5"), &v, &0.into(), &1.into(), &e).unwrap().verdict);
        assert!(matches!(check_bci(&p("v < 5"), &v, &1.into(), &1.into(), &e), Err(LabError::DegenerateInterval(..))));
        let s = StructureSpec::sqrt2_cut();
        assert!(!check_bci(&p("C(v)"), &v, &0.into(), &2.into(), &QeEngine::new(&s)).unwrap().verdict);
    }

    #[test]
    fn completeness_examples() {
        let q = StructureSpec::rationals();
        let e = QeEngine::new(&q);
        let r = completeness_audit(&p("x < 3"), &e).unwrap();
        assert_eq!(r.verdict, CutVerdict::ProperCutWithLub(3.into()));
        assert!(r.lub_exists);
        assert_eq!(completeness_audit(&p("x < x"), &e).unwrap().verdict, CutVerdict::NotACut);
        let s = StructureSpec::sqrt2_cut();
        let r = completeness_audit(&p("C(x)"), &QeEngine::new(&s)).unwrap();
        assert!(r.verdict.is_gap());
        assert!(!r.lub_exists);
    }
}

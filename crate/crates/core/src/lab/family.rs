use std::collections::BTreeSet;
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use super::{elapsed_ms, reserved, within, LabError, Report};
use crate::logic::{substitute, Formula, LinearTerm, Var};
use crate::qe::QeEngine;
use crate::scalar::Scalar;

/// The family `{ formula(a, G) }` indexed by `param`, with fibers in `point`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefinableFamily {
    formula: Formula,
    param: Var,
    point: Var,
}

impl DefinableFamily {
    /// Free variables must be among `param` and `point`. A fiber formula
    /// may cancel one of them (e.g. `a - a < x - x`), so they need not both
    /// occur.
    pub fn new(formula: Formula, param: impl Into<Var>, point: impl Into<Var>) -> Result<Self, LabError> {
        let (param, point) = (param.into(), point.into());
        if param == point {
            return Err(LabError::BadFamily(format!("parameter and point are both `{param}`")));
        }
        let extra: Vec<Var> = formula.free_vars().into_iter().filter(|v| *v != param && *v != point).collect();
        if !extra.is_empty() {
            return Err(LabError::BadFamily(format!("unexpected free variables {extra:?}")));
        }
        Ok(DefinableFamily { formula, param, point })
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn param(&self) -> &Var {
        &self.param
    }

    pub fn point(&self) -> &Var {
        &self.point
    }

    /// `formula(u, x)` for arbitrary terms, substituted simultaneously.
    pub fn at(&self, u: &LinearTerm, x: &LinearTerm) -> Formula {
        let mut avoid = self.formula.all_vars();
        avoid.extend(u.vars().cloned());
        avoid.extend(x.vars().cloned());
        let pa = reserved("pa", &avoid);
        avoid.insert(pa.clone());
        let px = reserved("px", &avoid);
        let f = substitute(&self.formula, &self.param, &LinearTerm::var(pa.clone()));
        let f = substitute(&f, &self.point, &LinearTerm::var(px.clone()));
        let f = substitute(&f, &pa, u);
        substitute(&f, &px, x)
    }

    /// Variables the family's formula uses, to keep fresh names clear of.
    pub(crate) fn used_vars(&self) -> BTreeSet<Var> {
        let mut s = self.formula.all_vars();
        s.insert(self.param.clone());
        s.insert(self.point.clone());
        s
    }
}

impl std::fmt::Display for DefinableFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{ {} : {} }}_{}", self.point, self.formula, self.param)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AuditRole {
    OpenCover { a: Scalar, b: Scalar },
    Exhaustion,
}

/// One decided sentence of an audit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SentenceCheck {
    pub property: &'static str,
    pub sentence: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyAudit {
    pub family: String,
    pub structure: String,
    pub role: AuditRole,
    pub all_fibers_open: Option<bool>,
    pub covers: bool,
    pub directed: Option<bool>,
    pub all_fibers_pseudo_finite: Option<bool>,
    pub sentences: Vec<SentenceCheck>,
    pub timing_ms: u64,
}

impl FamilyAudit {
    /// All audited properties hold.
    pub fn passes(&self) -> bool {
        self.sentences.iter().all(|s| s.holds)
    }

    pub fn to_report(&self) -> Report {
        let mut r = Report::new("audit", &self.structure, self.family.clone(), self.passes());
        r.witness = Some(json!({
            "all_fibers_open": self.all_fibers_open,
            "covers": self.covers,
            "directed": self.directed,
            "all_fibers_pseudo_finite": self.all_fibers_pseudo_finite,
            "sentences": self.sentences,
        }));
        r.timing_ms = self.timing_ms;
        r
    }
}

fn var(v: &Var) -> LinearTerm {
    LinearTerm::var(v.clone())
}

fn openness(fam: &DefinableFamily) -> Formula {
    let avoid = fam.used_vars();
    let a = reserved("a", &avoid);
    let x = reserved("x", &avoid);
    let y = reserved("y", &avoid);
    let e = reserved("e", &avoid);
    let near = Formula::lt(var(&x).sub(&var(&e)), var(&y)).and(Formula::lt(var(&y), var(&x).add(&var(&e))));
    let ball = Formula::exists(
        e.clone(),
        Formula::lt(LinearTerm::zero(), var(&e)).and(Formula::forall(y.clone(), near.implies(fam.at(&var(&a), &var(&y))))),
    );
    Formula::forall_all(&[a.clone(), x.clone()], fam.at(&var(&a), &var(&x)).implies(ball))
}

fn interval_coverage(fam: &DefinableFamily, a: &Scalar, b: &Scalar) -> Formula {
    let avoid = fam.used_vars();
    let x = reserved("x", &avoid);
    let u = reserved("u", &avoid);
    Formula::forall(x.clone(), within(var(&x), a, b).implies(Formula::exists(u.clone(), fam.at(&var(&u), &var(&x)))))
}

fn group_coverage(fam: &DefinableFamily) -> Formula {
    let avoid = fam.used_vars();
    let x = reserved("x", &avoid);
    let t = reserved("t", &avoid);
    Formula::forall(x.clone(), Formula::exists(t.clone(), fam.at(&var(&t), &var(&x))))
}

fn directedness(fam: &DefinableFamily) -> Formula {
    let avoid = fam.used_vars();
    let t1 = reserved("t1", &avoid);
    let t2 = reserved("t2", &avoid);
    let x = reserved("x", &avoid);
    let inc = Formula::forall(x.clone(), fam.at(&var(&t1), &var(&x)).implies(fam.at(&var(&t2), &var(&x))));
    Formula::forall_all(&[t1.clone(), t2.clone()], Formula::lt(var(&t1), var(&t2)).implies(inc))
}

/// Every fiber is bounded, discrete and closed.
fn fiberwise_pseudo_finite(fam: &DefinableFamily) -> Formula {
    let avoid = fam.used_vars();
    let [t, x, y, e, l, h] = ["t", "x", "y", "e", "l", "h"].map(|n| reserved(n, &avoid));
    let mem = |z: &Var| fam.at(&var(&t), &var(z));
    let near = Formula::lt(var(&x).sub(&var(&e)), var(&y)).and(Formula::lt(var(&y), var(&x).add(&var(&e))));
    let pos_e = Formula::lt(LinearTerm::zero(), var(&e));
    let bounded = Formula::exists_all(
        &[l.clone(), h.clone()],
        Formula::forall(x.clone(), mem(&x).implies(Formula::le(var(&l), var(&x)).and(Formula::le(var(&x), var(&h))))),
    );
    let discrete = Formula::forall(
        x.clone(),
        mem(&x).implies(Formula::exists(
            e.clone(),
            pos_e.clone().and(Formula::forall(
                y.clone(),
                mem(&y).and(near.clone()).implies(Formula::eq(var(&y), var(&x))),
            )),
        )),
    );
    let closed = Formula::forall(
        x.clone(),
        Formula::forall(e.clone(), pos_e.implies(Formula::exists(y.clone(), mem(&y).and(near)))).implies(mem(&x)),
    );
    Formula::forall(t.clone(), bounded.and(discrete).and(closed))
}

pub fn family_audit(fam: &DefinableFamily, role: &AuditRole, engine: &QeEngine<'_>) -> Result<FamilyAudit, LabError> {
    let start = Instant::now();
    let mut sentences = Vec::new();
    let mut run = |property: &'static str, sentence: Formula| -> Result<bool, LabError> {
        let holds = engine.decide(&sentence)?;
        log::debug!("audit {property}: {holds}");
        sentences.push(SentenceCheck { property, sentence: sentence.to_string(), holds });
        Ok(holds)
    };
    let (all_fibers_open, covers, directed, all_fibers_pseudo_finite) = match role {
        AuditRole::OpenCover { a, b } => {
            if a >= b {
                return Err(LabError::DegenerateInterval(a.clone(), b.clone()));
            }
            let open = run("open", openness(fam))?;
            let covers = run("covers_interval", interval_coverage(fam, a, b))?;
            (Some(open), covers, None, None)
        }
        AuditRole::Exhaustion => {
            let directed = run("directed", directedness(fam))?;
            let pf = run("fibers_pseudo_finite", fiberwise_pseudo_finite(fam))?;
            let covers = run("covers_group", group_coverage(fam))?;
            (None, covers, Some(directed), Some(pf))
        }
    };
    Ok(FamilyAudit {
        family: fam.to_string(),
        structure: engine.structure().id().to_string(),
        role: role.clone(),
        all_fibers_open,
        covers,
        directed,
        all_fibers_pseudo_finite,
        sentences,
        timing_ms: elapsed_ms(start),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;
    use crate::structure::StructureSpec;

    fn fam(s: &str, a: &str, x: &str) -> DefinableFamily {
        DefinableFamily::new(parse_formula(s).unwrap(), a, x).unwrap()
    }

    fn cover01() -> AuditRole {
        AuditRole::OpenCover { a: 0.into(), b: 1.into() }
    }

    #[test]
    fn open_cover_audit() {
        let q = StructureSpec::rationals();
        let e = QeEngine::new(&q);
        let r = family_audit(&fam("a - 1/4 < x & x < a + 1/4", "a", "x"), &cover01(), &e).unwrap();
        assert_eq!(r.all_fibers_open, Some(true));
        assert!(r.covers && r.passes());
        let r = family_audit(&fam("0 < a & a - a < x - x", "a", "x"), &cover01(), &e).unwrap();
        assert!(!r.covers);
        let r = family_audit(&fam("a - 1 < x & x <= a", "a", "x"), &cover01(), &e).unwrap();
        assert_eq!(r.all_fibers_open, Some(false));
    }

    #[test]
    fn exhaustion_audit() {
        let q = StructureSpec::rationals();
        let r = family_audit(&fam("x = 0 | x = t", "t", "x"), &AuditRole::Exhaustion, &QeEngine::new(&q)).unwrap();
        assert_eq!(r.directed, Some(false));
        assert!(r.covers);
        assert_eq!(r.all_fibers_pseudo_finite, Some(true));
        let q3 = StructureSpec::q_n(3).unwrap();
        let r = family_audit(&fam("D(x) & t = t", "t", "x"), &AuditRole::Exhaustion, &QeEngine::new(&q3)).unwrap();
        assert_eq!(r.directed, Some(true));
        assert_eq!(r.all_fibers_pseudo_finite, Some(true));
        assert!(!r.covers);
    }

    #[test]
    fn family_substitution_is_simultaneous() {
        let f = fam("a < x", "a", "x");
        let swapped = f.at(&LinearTerm::var("x"), &LinearTerm::var("a"));
        assert_eq!(swapped, parse_formula("x < a").unwrap());
    }

    #[test]
    fn family_rejects_extra_vars() {
        assert!(DefinableFamily::new(parse_formula("a < x + y").unwrap(), "a", "x").is_err());
        assert!(DefinableFamily::new(parse_formula("a < x").unwrap(), "x", "x").is_err());
    }
}

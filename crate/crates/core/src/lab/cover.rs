use std::time::Instant;

use serde_json::json;

use super::{constant, elapsed_ms, family_audit, instantiate, reserved, within, AuditRole, DefinableFamily, LabError, Report};
use crate::logic::{Formula, LinearTerm, Var};
use crate::qe::QeEngine;
use crate::scalar::{rat, Scalar};
use crate::sets::{set_of, DefinableSet1D, Endpoint};

/// One step of the sweep: the reach before the step, the best extension
/// available from there, and the parameter taken.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachStep {
    pub reach: Scalar,
    pub sup_extension: Endpoint,
    pub param: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubcoverCertificate {
    pub a: Scalar,
    pub b: Scalar,
    pub family: DefinableFamily,
    pub params: Vec<Scalar>,
    pub verified: bool,
    pub steps: usize,
    pub trace: Vec<ReachStep>,
    pub structure: String,
    pub timing_ms: u64,
}

impl SubcoverCertificate {
    /// `forall x (a <= x <= b -> OR_{u in params} phi(u, x))`
    pub fn coverage_sentence(&self) -> Formula {
        coverage_by(&self.family, &self.params, &self.a, &self.b)
    }

    pub fn to_report(&self) -> Report {
        let instance = format!("{} on [{}, {}]", self.family, self.a, self.b);
        let mut r = Report::new("subcover", &self.structure, instance, self.verified);
        r.params = Some(self.params.iter().map(|p| p.to_string()).collect());
        r.steps = Some(self.steps);
        r.witness = Some(json!({
            "trace": self.trace.iter().map(|s| json!({
                "reach": s.reach.to_string(),
                "sup_extension": s.sup_extension.to_string(),
                "param": s.param.to_string(),
            })).collect::<Vec<_>>(),
        }));
        r.timing_ms = self.timing_ms;
        r
    }
}

fn coverage_by(fam: &DefinableFamily, params: &[Scalar], a: &Scalar, b: &Scalar) -> Formula {
    let x = reserved("x", &fam.used_vars());
    let xt = LinearTerm::var(x.clone());
    let any = Formula::disj(params.iter().map(|u| fam.at(&constant(u), &xt)));
    Formula::forall(x, within(xt.clone(), a, b).implies(any))
}

/// `forall y (r <= y < e -> phi(u, y))`: the fiber of `u` contains `[r, e)`.
fn segment_in_fiber(fam: &DefinableFamily, u: &LinearTerm, r: &Scalar, e: &LinearTerm, y: &Var) -> Formula {
    let yt = LinearTerm::var(y.clone());
    Formula::forall(
        y.clone(),
        Formula::le(constant(r), yt.clone()).and(Formula::lt(yt.clone(), e.clone())).implies(fam.at(u, &yt)),
    )
}

/// Greedy left-to-right sweep over `[a, b]`. Each step takes the supremum
/// `e*` of the extensions `e` for which one fiber contains `[r, e)`, picks a
/// parameter reaching (nearly) that far, and moves the reach to the right
/// end of that fiber's run from `r`.
fn sweep(fam: &DefinableFamily, a: &Scalar, b: &Scalar, engine: &QeEngine<'_>) -> Result<(Vec<Scalar>, Vec<ReachStep>), LabError> {
    let avoid = fam.used_vars();
    let [u, y, e] = ["u", "y", "e"].map(|n| reserved(n, &avoid));
    let (ut, et) = (LinearTerm::var(u.clone()), LinearTerm::var(e.clone()));
    let cap = engine.limits().max_steps;
    let mut r = a.clone();
    let mut params = Vec::new();
    let mut trace = Vec::new();
    loop {
        if trace.len() >= cap {
            return Err(LabError::StepLimit(cap));
        }
        let reach_set = set_of(&e, &Formula::exists(u.clone(), segment_in_fiber(fam, &ut, &r, &et, &y)), engine)?;
        let sup = reach_set.upper().unwrap_or(Endpoint::NegInf);
        if sup <= Endpoint::Finite(r.clone()) {
            return Err(LabError::InvalidCover { step: trace.len(), reach: r });
        }
        let past_end = sup > Endpoint::Finite(b.clone());
        let target = if past_end {
            let cap = b.checked_add(&Scalar::one()).expect("same radicand");
            let hi = match &sup {
                Endpoint::Finite(s) if *s < cap => s.clone(),
                _ => cap,
            };
            Scalar::Rat(b.rational_between(&hi).expect("same radicand"))
        } else {
            let e_star = sup.finite().expect("finite sup below b").clone();
            let attained = engine.decide(&Formula::exists(u.clone(), segment_in_fiber(fam, &ut, &r, &constant(&e_star), &y)))?;
            if attained {
                e_star
            } else {
                let gap = e_star.checked_sub(&r).expect("same radicand").mul_rational(&rat(1, 1024));
                e_star.checked_sub(&gap).expect("same radicand")
            }
        };
        let choices = set_of(&u, &segment_in_fiber(fam, &ut, &r, &constant(&target), &y), engine)?;
        let param = choices
            .sample()
            .ok_or_else(|| LabError::Inconsistent(format!("no parameter reaches {target} from {r}")))?;
        log::debug!("sweep step {}: reach {r}, sup {sup}, param {param}", trace.len());
        trace.push(ReachStep { reach: r.clone(), sup_extension: sup, param: param.clone() });
        params.push(param.clone());
        if past_end {
            return Ok((params, trace));
        }
        let fiber = set_of(fam.point(), &instantiate(fam.formula(), fam.param(), &param), engine)?;
        let from_r = DefinableSet1D::point(r.clone()).union(&DefinableSet1D::above(r.clone()));
        let next = match fiber.complement().intersect(&from_r).infimum() {
            Some(Endpoint::Finite(g)) if g < *b => g,
            _ => b.clone(),
        };
        if next <= r {
            return Err(LabError::InvalidCover { step: trace.len(), reach: r });
        }
        r = next;
    }
}

/// Finite subcover of `[a, b]` from an open cover, with the coverage
/// sentence decided for the extracted parameters.
pub fn extract_subcover(fam: &DefinableFamily, a: &Scalar, b: &Scalar, engine: &QeEngine<'_>) -> Result<SubcoverCertificate, LabError> {
    let start = Instant::now();
    let audit = family_audit(fam, &AuditRole::OpenCover { a: a.clone(), b: b.clone() }, engine)?;
    if !audit.passes() {
        return Err(LabError::AuditFailed(Box::new(audit)));
    }
    let (params, trace) = sweep(fam, a, b, engine)?;
    let verified = engine.decide(&coverage_by(fam, &params, a, b))?;
    Ok(SubcoverCertificate {
        a: a.clone(),
        b: b.clone(),
        family: fam.clone(),
        steps: trace.len(),
        params,
        verified,
        trace,
        structure: engine.structure().id().to_string(),
        timing_ms: elapsed_ms(start),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompactnessOutcome {
    /// `t0` indexes a fiber of the exhaustion holding every parameter of
    /// the certificate; `restricted` tells whether the sweep had to be
    /// confined to parameters inside the exhaustion.
    Certified { t0: Scalar, certificate: SubcoverCertificate, restricted: bool, verified: bool },
    /// No single fiber of the exhaustion holds a finite subcover.
    ExhaustionInsufficient { params: Vec<Scalar>, structure: String },
}

impl CompactnessOutcome {
    pub fn to_report(&self, psi: &DefinableFamily) -> Report {
        match self {
            CompactnessOutcome::Certified { t0, certificate, restricted, verified } => {
                let instance = format!("{} on [{}, {}] via {}", certificate.family, certificate.a, certificate.b, psi);
                let mut r = Report::new("compact", &certificate.structure, instance, *verified);
                r.witness = Some(json!({ "t0": t0.to_string(), "restricted": restricted }));
                r.params = Some(certificate.params.iter().map(|p| p.to_string()).collect());
                r.steps = Some(certificate.steps);
                r.timing_ms = certificate.timing_ms;
                r
            }
            CompactnessOutcome::ExhaustionInsufficient { params, structure } => {
                let mut r = Report::new("compact", structure, psi.to_string(), "exhaustion_insufficient");
                r.params = Some(params.iter().map(|p| p.to_string()).collect());
                r
            }
        }
    }
}

/// `{t : every p in params lies in psi(t, G)}`
fn common_fibers(psi: &DefinableFamily, params: &[Scalar], engine: &QeEngine<'_>) -> Result<DefinableSet1D, LabError> {
    let t = reserved("t", &psi.used_vars());
    let tt = LinearTerm::var(t.clone());
    Ok(set_of(&t, &Formula::conj(params.iter().map(|p| psi.at(&tt, &constant(p)))), engine)?)
}

fn certify(
    fam: &DefinableFamily,
    psi: &DefinableFamily,
    certificate: SubcoverCertificate,
    restricted: bool,
    engine: &QeEngine<'_>,
) -> Result<Option<CompactnessOutcome>, LabError> {
    let Some(t0) = common_fibers(psi, &certificate.params, engine)?.sample() else {
        return Ok(None);
    };
    let avoid = fam.used_vars().union(&psi.used_vars()).cloned().collect();
    let [x, u] = ["x", "u"].map(|n| reserved(n, &avoid));
    let (xt, ut) = (LinearTerm::var(x.clone()), LinearTerm::var(u.clone()));
    let inside = Formula::exists(u.clone(), psi.at(&constant(&t0), &ut).and(fam.at(&ut, &xt)));
    let verified = engine.decide(&Formula::forall(x.clone(), within(xt, &certificate.a, &certificate.b).implies(inside)))?;
    Ok(Some(CompactnessOutcome::Certified { t0, certificate, restricted, verified }))
}

/// Finds `t0` such that the parameters of a finite subcover all lie in
/// `psi(t0, G)`. The unrestricted sweep is tried first; if its parameters
/// fit in no fiber, the sweep is rerun with parameters confined to the
/// union of the fibers of `psi`.
pub fn compactness_certificate(
    fam: &DefinableFamily,
    psi: &DefinableFamily,
    a: &Scalar,
    b: &Scalar,
    engine: &QeEngine<'_>,
) -> Result<CompactnessOutcome, LabError> {
    let structure = engine.structure().id().to_string();
    let free = extract_subcover(fam, a, b, engine)?;
    if let Some(out) = certify(fam, psi, free.clone(), false, engine)? {
        return Ok(out);
    }
    // confine the cover to parameters inside some fiber of psi
    let mut avoid = fam.used_vars();
    avoid.extend(psi.used_vars());
    let t = reserved("t", &avoid);
    let in_psi = Formula::exists(t.clone(), psi.at(&LinearTerm::var(t), &LinearTerm::var(fam.param().clone())));
    let confined = DefinableFamily::new(fam.formula().clone().and(in_psi), fam.param().clone(), fam.point().clone())?;
    match extract_subcover(&confined, a, b, engine) {
        Ok(cert) => {
            let params = cert.params.clone();
            Ok(certify(fam, psi, cert, true, engine)?.unwrap_or(CompactnessOutcome::ExhaustionInsufficient { params, structure }))
        }
        Err(LabError::AuditFailed(_)) | Err(LabError::InvalidCover { .. }) => {
            Ok(CompactnessOutcome::ExhaustionInsufficient { params: free.params, structure })
        }
        Err(e) => Err(e),
    }
}

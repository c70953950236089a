//! Builders for the continuous-induction schemas.
//!
//! Bounded quantifiers are desugared on the spot: `forall v<s psi` becomes
//! `forall v (v < s -> psi)` and `exists u>v psi` becomes
//! `exists u (v < u & psi)`. Fresh variables use the reserved prefixes
//! `$s`, `$u`, `$x`, `$y` with the smallest numeric suffix unused in the
//! input, so output is reproducible.

use std::collections::BTreeSet;

use super::{substitute, Formula, LinearTerm, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchemaError {
    #[error("induction variable `{0}` is not free in the formula")]
    VarNotFree(Var),
    #[error("parameter list {given:?} does not match the remaining free variables {expected:?}")]
    ParamsMismatch { expected: Vec<Var>, given: Vec<Var> },
    #[error("interval endpoint mentions the induction variable `{0}`")]
    EndpointMentionsVar(Var),
}

fn fresh_suffix(used: &BTreeSet<Var>, prefixes: &[&str]) -> usize {
    (0..)
        .find(|k| prefixes.iter().all(|p| !used.contains(&Var::new(format!("{p}{k}")))))
        .expect("unbounded search")
}

fn check_params(phi: &Formula, v: &Var, params: &[Var]) -> Result<(), SchemaError> {
    if !phi.is_free(v) {
        return Err(SchemaError::VarNotFree(v.clone()));
    }
    let expected: Vec<Var> = phi.free_vars().into_iter().filter(|w| w != v).collect();
    let given: BTreeSet<&Var> = params.iter().collect();
    let want: BTreeSet<&Var> = expected.iter().collect();
    if given != want || given.len() != params.len() {
        return Err(SchemaError::ParamsMismatch { expected, given: params.to_vec() });
    }
    Ok(())
}

/// `DCI_phi` for the induction variable `v` and parameters `params`:
///
/// `forall w ((exists s forall v<s phi(v,w) &
///   forall v (forall s<v phi(s,w) -> exists u>v forall s<u phi(s,w)))
///   -> forall v phi(v,w))`
pub fn build_dci(phi: &Formula, v: &Var, params: &[Var]) -> Result<Formula, SchemaError> {
    check_params(phi, v, params)?;
    Ok(build_dci_unchecked(phi, v, params))
}

/// [`build_dci`] without the well-formedness checks; an instance whose `v`
/// is not free is emitted anyway (its truth is then trivially decided).
pub fn build_dci_unchecked(phi: &Formula, v: &Var, params: &[Var]) -> Formula {
    let mut used = phi.all_vars();
    used.insert(v.clone());
    used.extend(params.iter().cloned());
    let k = fresh_suffix(&used, &["$s", "$u"]);
    let s = Var::new(format!("$s{k}"));
    let u = Var::new(format!("$u{k}"));
    let at = |x: &Var| substitute(phi, v, &LinearTerm::var(x.clone()));
    let vt = || LinearTerm::var(v.clone());
    let st = || LinearTerm::var(s.clone());
    let ut = || LinearTerm::var(u.clone());

    // exists s forall v<s phi(v)
    let start = Formula::exists(s.clone(), Formula::forall(v.clone(), Formula::lt(vt(), st()).implies(phi.clone())));
    // forall v (forall s<v phi(s) -> exists u>v forall s<u phi(s))
    let below_v = Formula::forall(s.clone(), Formula::lt(st(), vt()).implies(at(&s)));
    let below_u = Formula::forall(s.clone(), Formula::lt(st(), ut()).implies(at(&s)));
    let extend = Formula::forall(
        v.clone(),
        below_v.implies(Formula::exists(u.clone(), Formula::lt(vt(), ut()).and(below_u))),
    );
    let conclusion = Formula::forall(v.clone(), phi.clone());
    Formula::forall_all(params, start.and(extend).implies(conclusion))
}

/// Definable bounded continuous induction on `[a, b)`:
///
/// `forall w forall ab (a < b -> ((exists x>a [a,x) ⊆ phi &
///   forall x (a < x & [a,x) ⊆ phi -> exists y>x [a,y) ⊆ phi))
///   -> [a,b) ⊆ phi))`
///
/// where `[a,x) ⊆ phi` is `forall v (a <= v & v < x -> phi(v))`. Free
/// variables of `a` and `b` that are not parameters are quantified
/// universally after the parameters; concrete endpoints are inlined.
pub fn build_bci(
    phi: &Formula,
    v: &Var,
    a: &LinearTerm,
    b: &LinearTerm,
    params: &[Var],
) -> Result<Formula, SchemaError> {
    check_params(phi, v, params)?;
    build_bci_unchecked(phi, v, a, b, params)
}

pub fn build_bci_unchecked(
    phi: &Formula,
    v: &Var,
    a: &LinearTerm,
    b: &LinearTerm,
    params: &[Var],
) -> Result<Formula, SchemaError> {
    if a.mentions(v) || b.mentions(v) {
        return Err(SchemaError::EndpointMentionsVar(v.clone()));
    }
    let mut used = phi.all_vars();
    used.insert(v.clone());
    used.extend(params.iter().cloned());
    used.extend(a.vars().cloned());
    used.extend(b.vars().cloned());
    let k = fresh_suffix(&used, &["$x", "$y"]);
    let x = Var::new(format!("$x{k}"));
    let y = Var::new(format!("$y{k}"));
    let vt = || LinearTerm::var(v.clone());
    let xt = || LinearTerm::var(x.clone());
    let yt = || LinearTerm::var(y.clone());

    let segment = |hi: LinearTerm| {
        Formula::forall(
            v.clone(),
            Formula::le(a.clone(), vt()).and(Formula::lt(vt(), hi)).implies(phi.clone()),
        )
    };
    let start = Formula::exists(x.clone(), Formula::lt(a.clone(), xt()).and(segment(xt())));
    let extend = Formula::forall(
        x.clone(),
        Formula::lt(a.clone(), xt())
            .and(segment(xt()))
            .implies(Formula::exists(y.clone(), Formula::lt(xt(), yt()).and(segment(yt())))),
    );
    let body = Formula::lt(a.clone(), b.clone()).implies(start.and(extend).implies(segment(b.clone())));

    let mut outer: Vec<Var> = params.to_vec();
    for w in a.vars().chain(b.vars()) {
        if !outer.contains(w) {
            outer.push(w.clone());
        }
    }
    Ok(Formula::forall_all(&outer, body))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_formula, print_formula};

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn dci_of_v_lt_w_matches_displayed_shape() {
        let f = build_dci(&p("v < w"), &Var::new("v"), &[Var::new("w")]).unwrap();
        let expected = p(
            "forall w (((exists $s0 forall v (v < $s0 -> v < w)) & \
             (forall v ((forall $s0 ($s0 < v -> $s0 < w)) -> \
             exists $u0 (v < $u0 & forall $s0 ($s0 < $u0 -> $s0 < w))))) -> (forall v (v < w)))",
        );
        assert_eq!(f, expected);
        assert!(f.free_vars().is_empty());
        // starts with the outer parameter, then the three clauses in order
        let text = print_formula(&f);
        let i1 = text.find("exists $s0").unwrap();
        let i2 = text.find("exists $u0").unwrap();
        let i3 = text.rfind("forall v").unwrap();
        assert!(text.starts_with("forall w"));
        assert!(i1 < i2 && i2 < i3);
    }

    #[test]
    fn dci_errors_and_forced_form() {
        let top = Formula::True;
        assert_eq!(build_dci(&top, &Var::new("v"), &[]), Err(SchemaError::VarNotFree(Var::new("v"))));
        let forced = build_dci_unchecked(&top, &Var::new("v"), &[]);
        assert!(forced.free_vars().is_empty());
        assert!(matches!(
            build_dci(&p("v < w"), &Var::new("v"), &[]),
            Err(SchemaError::ParamsMismatch { .. })
        ));
    }

    #[test]
    fn fresh_names_skip_used_ones() {
        let f = build_dci(&p("v < $s0"), &Var::new("v"), &[Var::new("$s0")]).unwrap();
        assert!(print_formula(&f).contains("$s1"));
    }

    #[test]
    fn bci_closed_with_concrete_endpoints() {
        let f = build_bci(
            &p("v < 1"),
            &Var::new("v"),
            &LinearTerm::zero(),
            &LinearTerm::constant(crate::scalar::Scalar::one()),
            &[],
        )
        .unwrap();
        assert!(f.free_vars().is_empty());
        let g = build_bci(&p("v < w"), &Var::new("v"), &LinearTerm::var("a"), &LinearTerm::var("b"), &[Var::new("w")]).unwrap();
        assert!(g.free_vars().is_empty());
        assert!(print_formula(&g).starts_with("forall w forall a forall b"));
    }
}

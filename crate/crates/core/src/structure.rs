//! Concrete models: the pure divisible group Q, the groups Q_n carrying a
//! discrete predicate `{0, ..., n}`, and expansions of Q by an irrational
//! cut. Quantifiers always range over Q; a radicand only licenses
//! constants from `Q(sqrt(d))`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::logic::{Atom, Formula, LinearTerm};
use crate::scalar::{Scalar, ScalarError};

/// Default cap on the size `n` of a discrete-range predicate.
pub const DEFAULT_RANGE_CAP: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarDomain {
    RationalsOnly,
    RationalsWithRadicand(u32),
}

impl ScalarDomain {
    pub fn radicand(&self) -> Option<u32> {
        match self {
            ScalarDomain::RationalsOnly => None,
            ScalarDomain::RationalsWithRadicand(d) => Some(*d),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PredSemantics {
    /// `{0, 1, ..., n}`
    DiscreteRange(u32),
    /// `(-inf, c)` for an irrational `c`
    CutBelow(Scalar),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("predicate `{0}` is not registered in structure `{1}`")]
    UnknownPredicate(String, String),
    #[error("predicate `{0}` registered twice")]
    DuplicatePredicate(String),
    #[error("discrete range {0} exceeds the cap {1}")]
    RangeCap(u32, u32),
    #[error("cut value {0} is rational; a cut predicate needs an irrational value")]
    RationalCut(Scalar),
    #[error("constant over sqrt({found}) is not licensed by structure `{structure}`")]
    RadicandNotLicensed { found: u32, structure: String },
    #[error("structure file line {line}: {message}")]
    File { line: usize, message: String },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("cannot read structure file: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureSpec {
    id: String,
    domain: ScalarDomain,
    predicates: BTreeMap<String, PredSemantics>,
    range_cap: u32,
}

impl StructureSpec {
    /// The pure divisible ordered group Q.
    pub fn rationals() -> Self {
        StructureSpec {
            id: "Q".to_string(),
            domain: ScalarDomain::RationalsOnly,
            predicates: BTreeMap::new(),
            range_cap: DEFAULT_RANGE_CAP,
        }
    }

    /// `Q_n = (Q, +, 0, <, {0, ..., n})` with the predicate named `D`.
    pub fn q_n(n: u32) -> Result<Self, StructureError> {
        StructureSpec::rationals().with_id(format!("Q_{n}")).with_predicate("D", PredSemantics::DiscreteRange(n))
    }

    /// Q with constants from `Q(sqrt(2))` and the cut `C = (-inf, sqrt(2))`.
    pub fn sqrt2_cut() -> Self {
        StructureSpec::rationals()
            .with_id("Q_sqrt2_cut")
            .with_radicand(2)
            .expect("2 is a valid radicand")
            .with_predicate("C", PredSemantics::CutBelow(Scalar::sqrt(2).expect("valid")))
            .expect("irrational cut")
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn with_radicand(mut self, d: u32) -> Result<Self, StructureError> {
        Scalar::sqrt(d)?;
        self.domain = ScalarDomain::RationalsWithRadicand(d);
        Ok(self)
    }

    pub fn with_range_cap(mut self, cap: u32) -> Self {
        self.range_cap = cap;
        self
    }

    pub fn with_predicate(mut self, name: impl Into<String>, sem: PredSemantics) -> Result<Self, StructureError> {
        let name = name.into();
        if self.predicates.contains_key(&name) {
            return Err(StructureError::DuplicatePredicate(name));
        }
        match &sem {
            PredSemantics::DiscreteRange(n) if *n > self.range_cap => {
                return Err(StructureError::RangeCap(*n, self.range_cap))
            }
            PredSemantics::CutBelow(c) => {
                if c.is_rational() {
                    return Err(StructureError::RationalCut(c.clone()));
                }
                let d = c.radicand().expect("irrational scalar has a radicand");
                match self.domain {
                    ScalarDomain::RationalsWithRadicand(r) if r == d => {}
                    _ => {
                        return Err(StructureError::RadicandNotLicensed { found: d, structure: self.id.clone() })
                    }
                }
            }
            _ => {}
        }
        self.predicates.insert(name, sem);
        Ok(self)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn domain(&self) -> ScalarDomain {
        self.domain
    }

    pub fn range_cap(&self) -> u32 {
        self.range_cap
    }

    pub fn predicates(&self) -> &BTreeMap<String, PredSemantics> {
        &self.predicates
    }

    pub fn predicate(&self, name: &str) -> Option<&PredSemantics> {
        self.predicates.get(name)
    }

    /// Whether `x` is an element of the carrier (always Q).
    pub fn in_domain(&self, x: &Scalar) -> bool {
        x.is_rational()
    }

    /// Checks that every predicate is registered and every constant's
    /// radicand is licensed.
    pub fn check_formula(&self, f: &Formula) -> Result<(), StructureError> {
        for p in f.predicates() {
            if !self.predicates.contains_key(&p) {
                return Err(StructureError::UnknownPredicate(p, self.id.clone()));
            }
        }
        for d in f.radicands() {
            if self.domain.radicand() != Some(d) {
                return Err(StructureError::RadicandNotLicensed { found: d, structure: self.id.clone() });
            }
        }
        Ok(())
    }

    /// Macro-expansion of `p(t)` into the core language.
    pub fn expand_pred(&self, p: &str, t: &LinearTerm) -> Result<Formula, StructureError> {
        match self.predicates.get(p) {
            None => Err(StructureError::UnknownPredicate(p.to_string(), self.id.clone())),
            Some(PredSemantics::DiscreteRange(n)) => {
                if *n > self.range_cap {
                    return Err(StructureError::RangeCap(*n, self.range_cap));
                }
                Ok(Formula::disj((0..=*n as i64).map(|k| Formula::eq(t.clone(), Scalar::from(k)))))
            }
            Some(PredSemantics::CutBelow(c)) => Ok(Formula::lt(t.clone(), c.clone())),
        }
    }

    /// Replaces every predicate atom by its expansion.
    pub fn expand_all(&self, f: &Formula) -> Result<Formula, StructureError> {
        let mut err = None;
        let out = f.map_atoms(&mut |a| match a {
            Atom::Pred(p, t) => self.expand_pred(p, t).unwrap_or_else(|e| {
                err.get_or_insert(e);
                Formula::False
            }),
            other => Formula::Atom(other.clone()),
        });
        match err {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }

    /// Parses the key-value structure description format:
    ///
    /// ```text
    /// id = Q_sqrt2_cut     # optional
    /// domain = Q
    /// radicand = 2         # optional
    /// range_cap = 64       # optional
    /// pred D : range 3
    /// pred C : cut sqrt(2)
    /// ```
    pub fn parse(text: &str, default_id: &str) -> Result<Self, StructureError> {
        let mut spec = StructureSpec::rationals().with_id(default_id);
        let mut preds: Vec<(usize, String, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| StructureError::File { line: line_no, message };
            if let Some(rest) = line.strip_prefix("pred ") {
                let (name, def) = rest.split_once(':').ok_or_else(|| bad("expected `pred NAME : ...`".into()))?;
                preds.push((line_no, name.trim().to_string(), def.trim().to_string()));
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| bad(format!("expected `key = value`, got `{line}`")))?;
            let value = value.trim();
            match key.trim() {
                "id" => spec.id = value.to_string(),
                "domain" => {
                    if value != "Q" {
                        return Err(bad(format!("unsupported domain `{value}` (only Q)")));
                    }
                }
                "radicand" => {
                    let d: u32 = value.parse().map_err(|_| bad(format!("bad radicand `{value}`")))?;
                    spec = spec.with_radicand(d).map_err(|e| bad(e.to_string()))?;
                }
                "range_cap" => {
                    spec.range_cap = value.parse().map_err(|_| bad(format!("bad range cap `{value}`")))?;
                }
                other => return Err(bad(format!("unknown key `{other}`"))),
            }
        }
        for (line_no, name, def) in preds {
            let bad = |message: String| StructureError::File { line: line_no, message };
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(bad(format!("bad predicate name `{name}`")));
            }
            let sem = if let Some(n) = def.strip_prefix("range") {
                let n = crate::parser::parse_int(n)
                    .and_then(|n| u32::try_from(n).ok())
                    .ok_or_else(|| bad(format!("bad range `{}`", n.trim())))?;
                PredSemantics::DiscreteRange(n)
            } else if let Some(c) = def.strip_prefix("cut") {
                PredSemantics::CutBelow(c.trim().parse().map_err(|e: ScalarError| bad(e.to_string()))?)
            } else {
                return Err(bad(format!("unknown predicate kind `{def}`")));
            };
            spec = spec.with_predicate(name, sem).map_err(|e| bad(e.to_string()))?;
        }
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, StructureError> {
        let text = std::fs::read_to_string(path).map_err(|e| StructureError::Io(format!("{}: {e}", path.display())))?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("structure");
        StructureSpec::parse(&text, stem)
    }
}

impl fmt::Display for StructureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "id = {}", self.id)?;
        writeln!(f, "domain = Q")?;
        if let Some(d) = self.domain.radicand() {
            writeln!(f, "radicand = {d}")?;
        }
        if self.range_cap != DEFAULT_RANGE_CAP {
            writeln!(f, "range_cap = {}", self.range_cap)?;
        }
        for (name, sem) in &self.predicates {
            match sem {
                PredSemantics::DiscreteRange(n) => writeln!(f, "pred {name} : range {n}")?,
                PredSemantics::CutBelow(c) => writeln!(f, "pred {name} : cut {c}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    #[test]
    fn discrete_range_expansion() {
        let s = StructureSpec::q_n(3).unwrap();
        let f = s.expand_pred("D", &LinearTerm::var("x")).unwrap();
        assert_eq!(f, parse_formula("x = 0 | x = 1 | x = 2 | x = 3").unwrap());
        let s0 = StructureSpec::q_n(0).unwrap();
        assert_eq!(s0.expand_pred("D", &LinearTerm::var("x")).unwrap(), parse_formula("x = 0").unwrap());
    }

    #[test]
    fn cut_expansion() {
        let s = StructureSpec::sqrt2_cut();
        let f = s.expand_pred("C", &LinearTerm::var("x")).unwrap();
        assert_eq!(f, parse_formula("x < 1*sqrt(2)").unwrap());
        match f {
            Formula::Atom(Atom::Lt(t)) => assert_eq!(t.constant_part(), &-Scalar::sqrt(2).unwrap()),
            _ => panic!(),
        }
    }

    #[test]
    fn errors() {
        let s = StructureSpec::rationals();
        assert!(matches!(s.expand_pred("D", &LinearTerm::var("x")), Err(StructureError::UnknownPredicate(..))));
        assert!(matches!(StructureSpec::q_n(65), Err(StructureError::RangeCap(65, 64))));
        assert!(StructureSpec::rationals().with_range_cap(100).with_predicate("D", PredSemantics::DiscreteRange(65)).is_ok());
        assert!(matches!(
            StructureSpec::rationals().with_predicate("C", PredSemantics::CutBelow(Scalar::sqrt(2).unwrap())),
            Err(StructureError::RadicandNotLicensed { .. })
        ));
        assert!(matches!(
            StructureSpec::rationals().with_predicate("C", PredSemantics::CutBelow(Scalar::one())),
            Err(StructureError::RationalCut(_))
        ));
        let f = parse_formula("x < sqrt(3)").unwrap();
        assert!(StructureSpec::sqrt2_cut().check_formula(&f).is_err());
        assert!(StructureSpec::rationals().check_formula(&f).is_err());
    }

    #[test]
    fn domain_membership() {
        let s = StructureSpec::sqrt2_cut();
        assert!(s.in_domain(&Scalar::ratio(3, 4)));
        assert!(StructureSpec::rationals().in_domain(&Scalar::ratio(3, 4)));
        assert!(!s.in_domain(&Scalar::sqrt(2).unwrap()));
        assert!(s.in_domain(&Scalar::quad(crate::scalar::rat_int(2), crate::scalar::rat_int(0), 2).unwrap()));
    }

    #[test]
    fn file_format() {
        let text = "# the sqrt(2) cut\ndomain = Q\nradicand = 2\npred D : range 3\npred C : cut sqrt(2)\n";
        let s = StructureSpec::parse(text, "qsqrt2").unwrap();
        assert_eq!(s.id(), "qsqrt2");
        assert_eq!(s.domain(), ScalarDomain::RationalsWithRadicand(2));
        assert_eq!(s.predicate("D"), Some(&PredSemantics::DiscreteRange(3)));
        let again = StructureSpec::parse(&s.to_string(), "other").unwrap();
        assert_eq!(again, s);
        assert!(StructureSpec::parse("domain = R\n", "x").is_err());
        assert!(StructureSpec::parse("pred C : cut sqrt(2)\n", "x").is_err());
        let err = StructureSpec::parse("domain = Q\nbogus\n", "x").unwrap_err();
        assert!(matches!(err, StructureError::File { line: 2, .. }));
    }
}

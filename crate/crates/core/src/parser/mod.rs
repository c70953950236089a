//! Concrete syntax for formulas.
//!
//! ```text
//! formula     := quantified
//! quantified  := ("forall"|"exists") var quantified | implication
//! implication := disjunction ("->" implication)?
//! disjunction := conjunction ("|" conjunction)*
//! conjunction := negation ("&" negation)*
//! negation    := "~" negation | "(" formula ")" | atom | "true" | "false"
//! atom        := term ("<"|"<="|"="|"!="|">"|">=") term | predname "(" term ")"
//! term        := term ("+"|"-") mono | mono
//! mono        := rat "*" var | var | rat | rat "*" "sqrt" "(" int ")" | "-" mono
//! ```
//!
//! Unicode aliases (`∀ ∃ ∧ ∨ ¬ → ≤ ≥ ≠ ⊤ ⊥`) and the single-letter
//! quantifiers `A`/`E` are accepted. `#` starts a comment. A quantifier may
//! also open a conjunct (`a & forall x b`), binding as far right as possible.
//! `<=`, `>=`, `>`, `!=` are normalized to `<`, `=` and negation while
//! parsing, and both sides of a comparison are collected into one linear term.

mod lexer;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::logic::{Atom, Formula, LinearTerm, Var};
use crate::scalar::{fmt_rational, valid_radicand, Rational, Scalar};
use lexer::{tokenize, Tok, Token};

/// Location of a parse error. Byte offsets; line and column are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{}:{}: {message}", span.line, span.column)]
pub struct ParseError {
    pub message: String,
    pub span: SourceSpan,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, what: &str) -> Result<T, ParseError> {
        Err(ParseError {
            message: format!("expected {what}, found {}", self.peek().describe()),
            span: self.span(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(what)
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.quantified()
    }

    fn quantified(&mut self) -> Result<Formula, ParseError> {
        let is_forall = match self.peek() {
            Tok::Forall => true,
            Tok::Exists => false,
            _ => return self.implication(),
        };
        self.bump();
        let var = match self.peek().clone() {
            Tok::Ident(name) if name != "sqrt" => {
                self.bump();
                Var::new(name)
            }
            _ => return self.error("a variable after the quantifier"),
        };
        let body = self.quantified()?;
        Ok(if is_forall { Formula::forall(var, body) } else { Formula::exists(var, body) })
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(lhs.implies(rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            acc = acc.or(self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.negation()?;
        while *self.peek() == Tok::And {
            self.bump();
            acc = acc.and(self.negation()?);
        }
        Ok(acc)
    }

    fn negation(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(self.negation()?.not())
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Forall | Tok::Exists => self.quantified(),
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        if let (Tok::Ident(name), Tok::LParen) = (self.peek().clone(), self.peek_at(1)) {
            if name != "sqrt" {
                self.bump();
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen, "`)` closing the predicate argument")?;
                return Ok(Formula::pred(name, t));
            }
        }
        let start = self.span();
        let lhs = self.term()?;
        let op = self.peek().clone();
        if !matches!(op, Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge | Tok::Eq | Tok::Ne) {
            return self.error("a comparison operator");
        }
        self.bump();
        let rhs = self.term()?;
        let diff = |a: &LinearTerm, b: &LinearTerm| {
            a.checked_sub(b).map_err(|e| ParseError { message: e.to_string(), span: start })
        };
        Ok(match op {
            Tok::Lt => Formula::Atom(Atom::Lt(diff(&lhs, &rhs)?)),
            Tok::Gt => Formula::Atom(Atom::Lt(diff(&rhs, &lhs)?)),
            Tok::Eq => Formula::Atom(Atom::Eq(diff(&lhs, &rhs)?)),
            Tok::Ne => Formula::Atom(Atom::Eq(diff(&lhs, &rhs)?)).not(),
            Tok::Le => Formula::Atom(Atom::Lt(diff(&rhs, &lhs)?)).not(),
            Tok::Ge => Formula::Atom(Atom::Lt(diff(&lhs, &rhs)?)).not(),
            _ => unreachable!(),
        })
    }

    fn term(&mut self) -> Result<LinearTerm, ParseError> {
        let mut acc = self.mono()?;
        loop {
            let negate = match self.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => return Ok(acc),
            };
            let span = self.span();
            self.bump();
            let m = self.mono()?;
            let m = if negate { m.neg() } else { m };
            acc = acc
                .checked_add(&m)
                .map_err(|e| ParseError { message: e.to_string(), span })?;
        }
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let num = match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                n
            }
            _ => return self.error("a number"),
        };
        if *self.peek() == Tok::Slash {
            self.bump();
            let span = self.span();
            let den = match self.peek().clone() {
                Tok::Int(d) => {
                    self.bump();
                    d
                }
                _ => return self.error("a denominator"),
            };
            if den.is_zero() {
                return Err(ParseError { message: "zero denominator".into(), span });
            }
            return Ok(Rational::new(num, den));
        }
        Ok(Rational::from_integer(num))
    }

    fn sqrt_literal(&mut self) -> Result<u32, ParseError> {
        self.bump(); // `sqrt`
        self.expect(Tok::LParen, "`(` after sqrt")?;
        let span = self.span();
        let d = match self.peek().clone() {
            Tok::Int(d) => {
                self.bump();
                d
            }
            _ => return self.error("an integer radicand"),
        };
        self.expect(Tok::RParen, "`)` after the radicand")?;
        let d = u64::try_from(&d).ok().filter(|d| valid_radicand(*d));
        d.map(|d| d as u32).ok_or(ParseError {
            message: "radicand must be a square-free integer in 2..=97".into(),
            span,
        })
    }

    fn mono(&mut self) -> Result<LinearTerm, ParseError> {
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                Ok(self.mono()?.neg())
            }
            Tok::Ident(name) if name == "sqrt" => {
                let d = self.sqrt_literal()?;
                Ok(LinearTerm::constant(Scalar::sqrt(d).expect("validated radicand")))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(LinearTerm::var(Var::new(name)))
            }
            Tok::Int(_) => {
                let r = self.rational()?;
                if *self.peek() != Tok::Star {
                    return Ok(LinearTerm::constant(Scalar::Rat(r)));
                }
                self.bump();
                match self.peek().clone() {
                    Tok::Ident(name) if name == "sqrt" => {
                        let d = self.sqrt_literal()?;
                        let c = Scalar::quad(Rational::zero(), r, d).expect("validated radicand");
                        Ok(LinearTerm::constant(c))
                    }
                    Tok::Ident(name) => {
                        self.bump();
                        Ok(LinearTerm::var(Var::new(name)).scale(&r))
                    }
                    _ => self.error("a variable or sqrt(d) after `*`"),
                }
            }
            _ => self.error("a term"),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0 };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.error("end of input");
    }
    Ok(f)
}

pub fn parse_term(text: &str) -> Result<LinearTerm, ParseError> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0 };
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return p.error("end of input");
    }
    Ok(t)
}

// ---------------------------------------------------------------- printing

struct Mono {
    negative: bool,
    magnitude: Rational,
    what: MonoKind,
}

enum MonoKind {
    Var(Var),
    Const,
    Sqrt(u32),
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.what {
            MonoKind::Var(v) if self.magnitude.is_one() => write!(f, "{v}"),
            MonoKind::Var(v) => {
                fmt_rational(&self.magnitude, f)?;
                write!(f, "*{v}")
            }
            MonoKind::Const => fmt_rational(&self.magnitude, f),
            MonoKind::Sqrt(d) => {
                fmt_rational(&self.magnitude, f)?;
                write!(f, "*sqrt({d})")
            }
        }
    }
}

fn monos(t: &LinearTerm) -> Vec<Mono> {
    let mut out: Vec<Mono> = t
        .coeffs()
        .iter()
        .map(|(v, c)| Mono { negative: c.is_negative(), magnitude: c.abs(), what: MonoKind::Var(v.clone()) })
        .collect();
    let k = t.constant_part();
    if !k.rational_part().is_zero() {
        let r = k.rational_part();
        out.push(Mono { negative: r.is_negative(), magnitude: r.abs(), what: MonoKind::Const });
    }
    if let Some(d) = k.radicand() {
        let i = k.irrational_part();
        out.push(Mono { negative: i.is_negative(), magnitude: i.abs(), what: MonoKind::Sqrt(d) });
    }
    out
}

fn join(ms: &[&Mono]) -> String {
    if ms.is_empty() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (i, m) in ms.iter().enumerate() {
        match (i, m.negative) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push_str(" - "),
            (_, false) => s.push_str(" + "),
        }
        s.push_str(&m.to_string());
    }
    s
}

/// Renders a linear term in the concrete syntax.
pub fn print_term(t: &LinearTerm) -> String {
    let ms = monos(t);
    join(&ms.iter().collect::<Vec<_>>())
}

/// `t ⋈ 0` as `lhs ⋈ rhs`, positive monomials on the left.
fn print_relation(t: &LinearTerm, op: &str) -> String {
    let ms = monos(t);
    let lhs: Vec<&Mono> = ms.iter().filter(|m| !m.negative).collect();
    let rhs: Vec<Mono> = ms
        .iter()
        .filter(|m| m.negative)
        .map(|m| Mono {
            negative: false,
            magnitude: m.magnitude.clone(),
            what: match &m.what {
                MonoKind::Var(v) => MonoKind::Var(v.clone()),
                MonoKind::Const => MonoKind::Const,
                MonoKind::Sqrt(d) => MonoKind::Sqrt(*d),
            },
        })
        .collect();
    format!("{} {op} {}", join(&lhs), join(&rhs.iter().collect::<Vec<_>>()))
}

fn print_atom(a: &Atom) -> String {
    match a {
        Atom::Lt(t) => print_relation(t, "<"),
        Atom::Eq(t) => print_relation(t, "="),
        Atom::Pred(p, t) => format!("{p}({})", print_term(t)),
    }
}

// precedence levels: 0 quantified, 1 implication, 2 disjunction,
// 3 conjunction, 4 negation/atom
fn print_at(f: &Formula, level: u8, out: &mut String) {
    let wrap = |needed: u8, out: &mut String, body: &dyn Fn(&mut String)| {
        if level > needed {
            out.push('(');
            body(out);
            out.push(')');
        } else {
            body(out);
        }
    };
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Atom(a) => out.push_str(&print_atom(a)),
        Formula::Not(g) => {
            out.push('~');
            if let Formula::Atom(a) = &**g {
                out.push('(');
                out.push_str(&print_atom(a));
                out.push(')');
            } else {
                print_at(g, 4, out);
            }
        }
        Formula::And(a, b) => wrap(3, out, &|out| {
            print_at(a, 3, out);
            out.push_str(" & ");
            print_at(b, 4, out);
        }),
        Formula::Or(a, b) => wrap(2, out, &|out| {
            print_at(a, 2, out);
            out.push_str(" | ");
            print_at(b, 3, out);
        }),
        Formula::Implies(a, b) => wrap(1, out, &|out| {
            print_at(a, 2, out);
            out.push_str(" -> ");
            print_at(b, 1, out);
        }),
        Formula::Exists(v, g) | Formula::Forall(v, g) => wrap(0, out, &|out| {
            out.push_str(if matches!(f, Formula::Exists(..)) { "exists " } else { "forall " });
            out.push_str(v.name());
            out.push(' ');
            if matches!(**g, Formula::Exists(..) | Formula::Forall(..)) {
                print_at(g, 0, out);
            } else {
                out.push('(');
                print_at(g, 0, out);
                out.push(')');
            }
        }),
    }
}

/// Renders a formula so that [`parse_formula`] reads it back
/// alpha-equivalently (in fact identically).
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    print_at(f, 0, &mut out);
    out
}

/// Integer from a parsed literal; exposed for structure files.
pub(crate) fn parse_int(text: &str) -> Option<BigInt> {
    text.trim().parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn quantified_example() {
        let f = parse_formula("forall w ((exists s forall v (v < s -> P(v))) -> P(w))").unwrap();
        let expected = Formula::forall(
            "w",
            Formula::exists("s", Formula::forall("v", Formula::lt(Var::new("v"), Var::new("s")).implies(Formula::pred("P", Var::new("v")))))
                .implies(Formula::pred("P", Var::new("w"))),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn single_letter_quantifier() {
        let f = parse_formula("E x (0 < x & x < 1)").unwrap();
        let expected = Formula::exists(
            "x",
            Formula::lt(LinearTerm::zero(), Var::new("x")).and(Formula::lt(Var::new("x"), Scalar::one())),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn term_normalization() {
        let f = parse_formula("x + x < 3/2").unwrap();
        match f {
            Formula::Atom(Atom::Lt(t)) => {
                assert_eq!(t.coeff(&Var::new("x")), rat(2, 1));
                assert_eq!(t.constant_part(), &Scalar::ratio(-3, 2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse_formula("a < 0 | b < 0 & c < 0 -> d < 0 -> e < 0").unwrap();
        let a = Formula::lt(Var::new("a"), LinearTerm::zero());
        let b = Formula::lt(Var::new("b"), LinearTerm::zero());
        let c = Formula::lt(Var::new("c"), LinearTerm::zero());
        let d = Formula::lt(Var::new("d"), LinearTerm::zero());
        let e = Formula::lt(Var::new("e"), LinearTerm::zero());
        assert_eq!(f, a.or(b.and(c)).implies(d.implies(e)));
        let g = parse_formula("~~x < 0").unwrap();
        assert!(matches!(g, Formula::Not(_)));
    }

    #[test]
    fn derived_relations() {
        assert_eq!(parse_formula("x <= y").unwrap(), parse_formula("~(y < x)").unwrap());
        assert_eq!(parse_formula("x >= y").unwrap(), parse_formula("~(x < y)").unwrap());
        assert_eq!(parse_formula("x > y").unwrap(), parse_formula("y < x").unwrap());
        assert_eq!(parse_formula("x != y").unwrap(), parse_formula("~(x = y)").unwrap());
        assert_eq!(parse_formula("x ≤ y ∧ ⊤").unwrap(), parse_formula("x <= y & true").unwrap());
    }

    #[test]
    fn sqrt_literals_and_printing() {
        let f = parse_formula("x < 1/2*sqrt(2) - 3").unwrap();
        assert_eq!(print_formula(&f), "x + 3 < 1/2*sqrt(2)");
        assert_eq!(parse_formula(&print_formula(&f)).unwrap(), f);
        assert!(parse_formula("x < sqrt(2) + sqrt(3)").is_err());
        assert!(parse_formula("x < sqrt(4)").is_err());
    }

    #[test]
    fn printing_basics() {
        assert_eq!(print_formula(&Formula::True), "true");
        let f = parse_formula("forall x (x < 1 -> exists y (x < y))").unwrap();
        assert_eq!(print_formula(&f), "forall x (x < 1 -> (exists y (x < y)))");
        assert_eq!(parse_formula(&print_formula(&f)).unwrap(), f);
        assert_eq!(print_formula(&parse_formula("D(2*x - 1)").unwrap()), "D(2*x - 1)");
        assert_eq!(print_formula(&parse_formula("0 = 0").unwrap()), "0 = 0");
    }

    #[test]
    fn errors_carry_spans() {
        let cases = ["", "x <", "forall (x < 1)", "x < 1 )", "x @ y", "(x < 1", "x < 1/0", "P(x", "x + < 2"];
        for src in cases {
            let err = parse_formula(src).unwrap_err();
            assert!(err.span.start <= err.span.end && err.span.end <= src.len(), "{src}: {err:?}");
        }
        let err = parse_formula("x < 1\n  & y @ 2").unwrap_err();
        assert_eq!((err.span.line, err.span.column), (2, 7));
    }

    #[test]
    fn comments_are_skipped() {
        let f = parse_formula("# a comment\nx < 1 # trailing\n").unwrap();
        assert_eq!(f, parse_formula("x < 1").unwrap());
    }
}

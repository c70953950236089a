//! Exact scalars: arbitrary-precision rationals and elements of a real
//! quadratic extension `Q(sqrt(d))`.
//!
//! Every constant that appears in a term, every interval endpoint and every
//! sample point is a [`Scalar`]. Values are immutable and compared exactly;
//! there is no floating point anywhere on the decision path.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Largest admissible radicand.
pub const MAX_RADICAND: u32 = 97;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("mixed radicands: sqrt({0}) and sqrt({1})")]
    DomainMismatch(u32, u32),
    #[error("radicand {0} is not a square-free integer in 2..={MAX_RADICAND}")]
    BadRadicand(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse scalar `{0}`")]
    Parse(String),
}

/// Checks that `d` is square-free and within `2..=MAX_RADICAND`, so `sqrt(d)`
/// is irrational.
pub fn valid_radicand(d: u64) -> bool {
    if !(2..=MAX_RADICAND as u64).contains(&d) {
        return false;
    }
    let mut p = 2;
    while p * p <= d {
        if d.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `rat_part + irr_part * sqrt(radicand)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadScalar {
    rat_part: Rational,
    irr_part: Rational,
    radicand: u32,
}

impl QuadScalar {
    pub fn new(rat_part: Rational, irr_part: Rational, radicand: u32) -> Result<Self, ScalarError> {
        if !valid_radicand(radicand as u64) {
            return Err(ScalarError::BadRadicand(radicand as u64));
        }
        Ok(QuadScalar { rat_part, irr_part, radicand })
    }

    pub fn rat_part(&self) -> &Rational {
        &self.rat_part
    }

    pub fn irr_part(&self) -> &Rational {
        &self.irr_part
    }

    pub fn radicand(&self) -> u32 {
        self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.irr_part.is_zero()
    }
}

/// Sign of `a + b*sqrt(d)`, exact.
fn quad_sign(a: &Rational, b: &Rational, d: u32) -> Ordering {
    let sa = a.cmp(&Rational::zero());
    let sb = b.cmp(&Rational::zero());
    match (sa, sb) {
        (_, Ordering::Equal) => sa,
        (Ordering::Equal, _) => sb,
        _ if sa == sb => sa,
        _ => {
            // opposite signs: sign(b) * sign(d*b^2 - a^2)
            let db2 = b * b * Rational::from_integer(BigInt::from(d));
            let a2 = a * a;
            match db2.cmp(&a2) {
                Ordering::Greater => sb,
                Ordering::Less => sb.reverse(),
                Ordering::Equal => unreachable!("sqrt of a valid radicand is irrational"),
            }
        }
    }
}

/// An exact scalar. The `Quad` variant always carries a nonzero irrational
/// part, so structural equality is value equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(Rational),
    Quad(QuadScalar),
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Rat(r)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::Rat(rat_int(n))
    }
}

impl From<QuadScalar> for Scalar {
    fn from(q: QuadScalar) -> Self {
        if q.irr_part.is_zero() {
            Scalar::Rat(q.rat_part)
        } else {
            Scalar::Quad(q)
        }
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rat(Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rat(Rational::one())
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::Rat(rat(n, d))
    }

    /// `r + i*sqrt(d)`, collapsing to a rational when `i = 0`.
    pub fn quad(r: Rational, i: Rational, d: u32) -> Result<Self, ScalarError> {
        Ok(QuadScalar::new(r, i, d)?.into())
    }

    pub fn sqrt(d: u32) -> Result<Self, ScalarError> {
        Scalar::quad(Rational::zero(), Rational::one(), d)
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Scalar::Rat(_))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_zero())
    }

    pub fn rational_part(&self) -> &Rational {
        match self {
            Scalar::Rat(r) => r,
            Scalar::Quad(q) => &q.rat_part,
        }
    }

    pub fn irrational_part(&self) -> Rational {
        match self {
            Scalar::Rat(_) => Rational::zero(),
            Scalar::Quad(q) => q.irr_part.clone(),
        }
    }

    pub fn radicand(&self) -> Option<u32> {
        match self {
            Scalar::Rat(_) => None,
            Scalar::Quad(q) => Some(q.radicand),
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Quad(_) => None,
        }
    }

    fn common_radicand(&self, other: &Scalar) -> Result<Option<u32>, ScalarError> {
        match (self.radicand(), other.radicand()) {
            (Some(a), Some(b)) if a != b => Err(ScalarError::DomainMismatch(a, b)),
            (Some(a), _) | (_, Some(a)) => Ok(Some(a)),
            _ => Ok(None),
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        match self.common_radicand(other)? {
            None => Ok(Scalar::Rat(self.rational_part() + other.rational_part())),
            Some(d) => Ok(Scalar::from(QuadScalar {
                rat_part: self.rational_part() + other.rational_part(),
                irr_part: self.irrational_part() + other.irrational_part(),
                radicand: d,
            })),
        }
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.checked_add(&-other)
    }

    /// Multiplication by a rational; the group is a Q-vector space.
    pub fn mul_rational(&self, k: &Rational) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(r * k),
            Scalar::Quad(q) => Scalar::from(QuadScalar {
                rat_part: &q.rat_part * k,
                irr_part: &q.irr_part * k,
                radicand: q.radicand,
            }),
        }
    }

    /// Division by a nonzero integer (the group is divisible).
    pub fn div_int(&self, n: i64) -> Result<Scalar, ScalarError> {
        if n == 0 {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(self.mul_rational(&rat(1, n)))
    }

    pub fn midpoint(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self.checked_add(other)?.mul_rational(&rat(1, 2)))
    }

    pub fn signum(&self) -> Ordering {
        match self {
            Scalar::Rat(r) => r.cmp(&Rational::zero()),
            Scalar::Quad(q) => quad_sign(&q.rat_part, &q.irr_part, q.radicand),
        }
    }

    /// Exact total-order comparison.
    pub fn compare(&self, other: &Scalar) -> Result<Ordering, ScalarError> {
        self.common_radicand(other)?;
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(a.cmp(b)),
            _ => Ok(self.checked_sub(other)?.signum()),
        }
    }

    /// Greatest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        match self {
            Scalar::Rat(r) => r.floor().to_integer(),
            Scalar::Quad(q) => {
                // Bracket sqrt(d) in (s/2^k, (s+1)/2^k) and refine until no
                // integer separates the two ends.
                let d = BigInt::from(q.radicand);
                let mut k = 0u32;
                loop {
                    let scale = BigInt::one() << (2 * k);
                    let s = (&d * &scale).sqrt();
                    let den = BigInt::one() << k;
                    let lo_root = Rational::new(s.clone(), den.clone());
                    let hi_root = Rational::new(s + 1, den);
                    let (lo, hi) = if q.irr_part.is_positive() {
                        (&q.rat_part + &q.irr_part * lo_root, &q.rat_part + &q.irr_part * hi_root)
                    } else {
                        (&q.rat_part + &q.irr_part * hi_root, &q.rat_part + &q.irr_part * lo_root)
                    };
                    let f = lo.floor().to_integer();
                    if hi.ceil().to_integer() - 1 == f {
                        return f;
                    }
                    k += 1;
                }
            }
        }
    }

    /// A rational strictly between `self` and `hi` (`self < hi` required).
    /// The midpoint is used when it is rational; otherwise the first dyadic
    /// grid point above `self` that still lies below `hi`.
    pub fn rational_between(&self, hi: &Scalar) -> Result<Rational, ScalarError> {
        debug_assert_eq!(self.compare(hi)?, Ordering::Less);
        if let Scalar::Rat(m) = self.midpoint(hi)? {
            return Ok(m);
        }
        let mut k = 0u32;
        loop {
            let den = BigInt::one() << k;
            let scaled = self.mul_rational(&Rational::from_integer(den.clone()));
            let cand = Rational::new(scaled.floor() + 1, den);
            if Scalar::Rat(cand.clone()).compare(hi)? == Ordering::Less {
                return Ok(cand);
            }
            k += 1;
        }
    }

    /// Approximate value for diagnostics and test oracles only.
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        let r = self.rational_part().to_f64().unwrap_or(f64::NAN);
        match self {
            Scalar::Rat(_) => r,
            Scalar::Quad(q) => r + q.irr_part.to_f64().unwrap_or(f64::NAN) * (q.radicand as f64).sqrt(),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Panics on mixed radicands. Values bound to one structure always share a
/// radicand; use [`Scalar::compare`] where that is not guaranteed.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.compare(other).expect("comparison of scalars over different radicands")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.mul_rational(&-Rational::one())
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.checked_add(rhs).expect("addition of scalars over different radicands")
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.checked_sub(rhs).expect("subtraction of scalars over different radicands")
    }
}

pub(crate) fn fmt_rational(r: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_string(r: &Rational) -> String {
    struct R<'a>(&'a Rational);
    impl fmt::Display for R<'_> {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            fmt_rational(self.0, f)
        }
    }
    R(r).to_string()
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => fmt_rational(r, f),
            Scalar::Quad(q) => {
                let mag = q.irr_part.abs();
                if q.rat_part.is_zero() {
                    if q.irr_part.is_negative() {
                        write!(f, "-")?;
                    }
                } else {
                    fmt_rational(&q.rat_part, f)?;
                    write!(f, "{}", if q.irr_part.is_negative() { " - " } else { " + " })?;
                }
                fmt_rational(&mag, f)?;
                write!(f, "*sqrt({})", q.radicand)
            }
        }
    }
}

/// Parses a signed rational literal `p`, `p/q`, `-p/q`.
pub fn parse_rational(s: &str) -> Result<Rational, ScalarError> {
    let s = s.trim();
    let err = || ScalarError::Parse(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err())?;
    if den.starts_with(['+', '-']) {
        return Err(err());
    }
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(ScalarError::DivisionByZero);
    }
    Ok(Rational::new(num, den))
}

fn parse_irrational_mono(s: &str) -> Result<(Rational, u32), ScalarError> {
    let err = || ScalarError::Parse(s.to_string());
    let s = s.trim();
    let (coef, root) = match s.rsplit_once('*') {
        Some((c, r)) => (parse_rational(c)?, r.trim()),
        None => match s.strip_prefix('-') {
            Some(rest) => (-Rational::one(), rest.trim()),
            None => (Rational::one(), s),
        },
    };
    let inner = root
        .strip_prefix("sqrt")
        .map(str::trim)
        .and_then(|r| r.strip_prefix('('))
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(err)?;
    let d: u64 = inner.trim().parse().map_err(|_| err())?;
    if !valid_radicand(d) {
        return Err(ScalarError::BadRadicand(d));
    }
    Ok((coef, d as u32))
}

/// Accepts `p/q`, `r/s*sqrt(d)`, `sqrt(d)` and `p/q + r/s*sqrt(d)` (or `-`).
impl FromStr for Scalar {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if !t.contains("sqrt") {
            return parse_rational(t).map(Scalar::Rat);
        }
        // split at the last top-level binary +/- (not a leading sign or one
        // directly after '*' or '/')
        let bytes = t.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            if bytes[i] == b'+' || bytes[i] == b'-' {
                let prev = t[..i].trim_end();
                if !prev.is_empty() && !prev.ends_with(['*', '/', '+', '-']) {
                    split = Some(i);
                    break;
                }
            }
        }
        let (r, (i, d)) = match split {
            Some(idx) => {
                let (head, tail) = t.split_at(idx);
                let neg = tail.starts_with('-');
                let (c, d) = parse_irrational_mono(&tail[1..])?;
                (parse_rational(head)?, (if neg { -c } else { c }, d))
            }
            None => (Rational::zero(), parse_irrational_mono(t)?),
        };
        Scalar::quad(r, i, d)
    }
}

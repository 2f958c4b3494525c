//! Coefficient arithmetic.
//!
//! Every tensor in the engine is generic over [`Ring`] (or [`Field`] where a
//! division is needed). Two backends ship here:
//!
//! * [`QuadExt`], exact elements `a + b*sqrt(n)` of a quadratic extension of
//!   the rationals, with arbitrary precision numerators and denominators;
//! * `f64`, a float backend whose zero test is `|x| <= 1e-9`.
//!
//! The radicand is carried by each value. Values with no radical part are
//! compatible with every radicand; combining two values with different
//! nonzero radicands is an invariant violation and panics. Input parsing
//! rejects mixed radicands before any arithmetic happens.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Absolute zero threshold of the float backend.
pub const FLOAT_ZERO_TOL: f64 = 1e-9;

/// Commutative ring with unit, the minimum needed by tensor evaluation.
pub trait Ring:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    /// Exact zero test for exact backends, thresholded for floats.
    fn is_zero(&self) -> bool;
    fn from_rational(r: &Rational) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(n.into()))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&Rational::new(num.into(), den.into()))
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_zero()
    }
}

/// A [`Ring`] with division, ordering and roots.
pub trait Field: Ring {
    fn inv(&self) -> Option<Self>;
    /// -1, 0 or 1.
    fn signum(&self) -> i32;
    /// A `k`-th root in the field, if one exists (real root for odd `k`).
    fn nth_root(&self, k: u32) -> Option<Self>;
    fn to_f64(&self) -> f64;

    fn div(&self, other: &Self) -> Result<Self> {
        let inv = other.inv().ok_or(Error::DivisionByZero)?;
        Ok(self.clone() * inv)
    }
}

/// Square-free factorisation `n = s^2 * m`; returns `(s, m)`.
pub fn square_free_part(n: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        while m % (p * p) == 0 {
            m /= p * p;
            s *= p;
        }
        p += 1;
    }
    (s, m)
}

pub fn is_square_free(n: u64) -> bool {
    n > 0 && square_free_part(n).0 == 1
}

fn join_radicand(a: u64, b: u64) -> u64 {
    match (a, b) {
        (0, x) | (x, 0) => x,
        (x, y) if x == y => x,
        (x, y) => panic!("mixed radicands sqrt({x}) and sqrt({y}) in one computation"),
    }
}

/// Exact element `rat + rad * sqrt(radicand)`.
///
/// Canonical form: both parts reduced, and `radicand == 0` whenever
/// `rad == 0`. Derived equality is therefore field equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadExt {
    rat: Rational,
    rad: Rational,
    radicand: u64,
}

impl QuadExt {
    pub fn new(rat: Rational, rad: Rational, radicand: u64) -> Result<Self> {
        if rad.is_zero() {
            return Ok(Self::rational(rat));
        }
        if radicand == 0 {
            return Err(Error::MalformedScalar {
                text: format!("{rat} + {rad}*sqrt(0)"),
                reason: "radicand must be positive".into(),
            });
        }
        let (s, m) = square_free_part(radicand);
        let rad = rad * Rational::from_integer(s.into());
        if m == 1 {
            return Ok(Self::rational(rat + rad));
        }
        Ok(Self {
            rat,
            rad,
            radicand: m,
        })
    }

    /// Builds `rn/rd + (qn/qd)*sqrt(radicand)` from raw integer parts.
    pub fn from_parts(rn: i64, rd: i64, qn: i64, qd: i64, radicand: u64) -> Result<Self> {
        if rd == 0 || qd == 0 {
            return Err(Error::MalformedScalar {
                text: format!("{rn}/{rd} + {qn}/{qd}*sqrt({radicand})"),
                reason: "zero denominator".into(),
            });
        }
        Self::new(
            Rational::new(rn.into(), rd.into()),
            Rational::new(qn.into(), qd.into()),
            radicand,
        )
    }

    pub fn rational(r: Rational) -> Self {
        Self {
            rat: r,
            rad: Rational::zero(),
            radicand: 0,
        }
    }

    pub fn int(n: i64) -> Self {
        Self::rational(Rational::from_integer(n.into()))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::rational(Rational::new(num.into(), den.into()))
    }

    /// `sqrt(n)`, reduced to `s*sqrt(m)` with `m` square-free.
    pub fn sqrt_of(n: u64) -> Self {
        Self::new(Rational::zero(), Rational::one(), n).expect("positive radicand")
    }

    pub fn rat(&self) -> &Rational {
        &self.rat
    }

    pub fn rad(&self) -> &Rational {
        &self.rad
    }

    /// The radicand, or 0 for a rational value.
    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.rad.is_zero()
    }

    /// Canonical form. Values are kept canonical by every constructor and
    /// operation, so this is a re-reduction and is idempotent.
    pub fn normalize(&self) -> Self {
        Self::new(self.rat.clone(), self.rad.clone(), self.radicand).expect("canonical value")
    }

    pub fn conjugate(&self) -> Self {
        Self {
            rat: self.rat.clone(),
            rad: -self.rad.clone(),
            radicand: self.radicand,
        }
    }

    /// Field norm `a^2 - n b^2`.
    pub fn norm(&self) -> Rational {
        &self.rat * &self.rat
            - &self.rad * &self.rad * Rational::from_integer(self.radicand.into())
    }

    pub fn invert(&self) -> Result<Self> {
        if Ring::is_zero(self) {
            return Err(Error::DivisionByZero);
        }
        let norm = self.norm();
        assert!(!norm.is_zero(), "zero norm with square-free radicand");
        Ok(Self {
            rat: &self.rat / &norm,
            rad: -(&self.rad / &norm),
            radicand: self.radicand,
        })
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::int(1);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// Exact `k`-th root in the field, or `None` when there is none (the
    /// caller can then fall back to the float backend).
    pub fn nth_root_exact(&self, k: u32) -> Option<Self> {
        assert!(k >= 1, "root order must be positive");
        if Ring::is_zero(self) {
            return Some(Self::int(0));
        }
        if k == 1 {
            return Some(self.clone());
        }
        if self.is_rational() {
            return rational_root(&self.rat, k).map(Self::rational);
        }
        if self.rat.is_zero() {
            // (y sqrt n)^k = y^k n^((k-1)/2) sqrt n for odd k; a nonzero
            // rational part can never produce a pure radical.
            if k % 2 == 0 {
                return None;
            }
            let n = Rational::from_integer(self.radicand.into());
            let scale = pow_rational(&n, (k - 1) / 2);
            let y = rational_root(&(&self.rad / scale), k)?;
            return Some(Self {
                rat: Rational::zero(),
                rad: y,
                radicand: self.radicand,
            });
        }
        self.mixed_root_search(k)
    }

    // r = x + y sqrt(n) and its conjugate are real k-th roots of q and of
    // conj(q); recover x, y from float estimates and confirm exactly.
    fn mixed_root_search(&self, k: u32) -> Option<Self> {
        // The smaller of q and conj(q) may suffer cancellation, so take it
        // from the exact norm q * conj(q) instead.
        let q = Field::to_f64(self);
        let qc = Field::to_f64(&self.conjugate());
        let norm = f64_real_root(self.norm().to_f64()?, k)?;
        let (r, rc) = if q.abs() >= qc.abs() {
            let r = f64_real_root(q, k)?;
            (r, norm / r)
        } else {
            let rc = f64_real_root(qc, k)?;
            (norm / rc, rc)
        };
        let sq = (self.radicand as f64).sqrt();
        // for even k the root and its conjugate are only fixed up to sign
        let signs: &[f64] = if k % 2 == 0 { &[1.0, -1.0] } else { &[1.0] };
        for &s in signs {
            let rc = s * rc;
            let (Some(x), Some(y)) = (
                approx_rational((r + rc) / 2.0, 1 << 20),
                approx_rational((r - rc) / (2.0 * sq), 1 << 20),
            ) else {
                continue;
            };
            if let Ok(cand) = Self::new(x, y, self.radicand) {
                if cand.pow(k) == *self {
                    return Some(cand);
                }
            }
        }
        None
    }
}

fn pow_rational(r: &Rational, k: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..k {
        acc *= r;
    }
    acc
}

fn int_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() && k % 2 == 0 {
        return None;
    }
    let r = n.nth_root(k);
    (num_traits::pow(r.clone(), k as usize) == *n).then_some(r)
}

fn rational_root(r: &Rational, k: u32) -> Option<Rational> {
    let num = int_root(r.numer(), k)?;
    let den = int_root(r.denom(), k)?;
    Some(Rational::new(num, den))
}

fn f64_real_root(x: f64, k: u32) -> Option<f64> {
    if x < 0.0 {
        if k % 2 == 0 {
            return None;
        }
        return Some(-(-x).powf(1.0 / k as f64));
    }
    Some(x.powf(1.0 / k as f64))
}

/// Best rational approximation with denominator at most `max_den`
/// (continued fractions).
pub fn approx_rational(x: f64, max_den: i64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i128;
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = v - a as f64;
        if frac.abs() < 1e-12 {
            break;
        }
        v = 1.0 / frac;
    }
    if k1 == 0 {
        return None;
    }
    Some(Rational::new(BigInt::from(h1), BigInt::from(k1)))
}

impl Default for QuadExt {
    fn default() -> Self {
        Self::int(0)
    }
}

impl<'a> Add<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn add(self, rhs: &QuadExt) -> QuadExt {
        let radicand = join_radicand(self.radicand, rhs.radicand);
        let rad = &self.rad + &rhs.rad;
        QuadExt {
            rat: &self.rat + &rhs.rat,
            radicand: if rad.is_zero() { 0 } else { radicand },
            rad,
        }
    }
}

impl<'a> Sub<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn sub(self, rhs: &QuadExt) -> QuadExt {
        let radicand = join_radicand(self.radicand, rhs.radicand);
        let rad = &self.rad - &rhs.rad;
        QuadExt {
            rat: &self.rat - &rhs.rat,
            radicand: if rad.is_zero() { 0 } else { radicand },
            rad,
        }
    }
}

impl<'a> Mul<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn mul(self, rhs: &QuadExt) -> QuadExt {
        if self.is_rational() && rhs.is_rational() {
            return QuadExt::rational(&self.rat * &rhs.rat);
        }
        let radicand = join_radicand(self.radicand, rhs.radicand);
        let n = Rational::from_integer(radicand.into());
        let rat = &self.rat * &rhs.rat + &self.rad * &rhs.rad * n;
        let rad = &self.rat * &rhs.rad + &self.rad * &rhs.rat;
        QuadExt {
            rat,
            radicand: if rad.is_zero() { 0 } else { radicand },
            rad,
        }
    }
}

macro_rules! owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                (&self).$method(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Div for QuadExt {
    type Output = QuadExt;
    fn div(self, rhs: QuadExt) -> QuadExt {
        &self * &rhs.invert().expect("division by zero")
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt {
            rat: -self.rat,
            rad: -self.rad,
            radicand: self.radicand,
        }
    }
}

impl Ring for QuadExt {
    fn zero() -> Self {
        Self::int(0)
    }
    fn one() -> Self {
        Self::int(1)
    }
    fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.rad.is_zero()
    }
    fn from_rational(r: &Rational) -> Self {
        Self::rational(r.clone())
    }
}

impl Field for QuadExt {
    fn inv(&self) -> Option<Self> {
        self.invert().ok()
    }

    fn signum(&self) -> i32 {
        let sa = sign_of(&self.rat);
        let sb = sign_of(&self.rad);
        if sb == 0 || sa == sb {
            return if sa == 0 { sb } else { sa };
        }
        if sa == 0 {
            return sb;
        }
        let a2 = &self.rat * &self.rat;
        let nb2 = &self.rad * &self.rad * Rational::from_integer(self.radicand.into());
        if a2 > nb2 {
            sa
        } else {
            sb
        }
    }

    fn nth_root(&self, k: u32) -> Option<Self> {
        self.nth_root_exact(k)
    }

    fn to_f64(&self) -> f64 {
        let a = self.rat.to_f64().unwrap_or(f64::NAN);
        if self.is_rational() {
            return a;
        }
        a + self.rad.to_f64().unwrap_or(f64::NAN) * (self.radicand as f64).sqrt()
    }
}

fn sign_of(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_negative() {
        -1
    } else {
        1
    }
}

fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_radical(r: &Rational, n: u64) -> String {
    if r.is_one() {
        format!("sqrt({n})")
    } else if *r == -Rational::one() {
        format!("-sqrt({n})")
    } else {
        format!("{}*sqrt({n})", fmt_rational(r))
    }
}

/// Renders in the input grammar, e.g. `1/2`, `-1/4*sqrt(2)`,
/// `3/2+sqrt(2)`; the output re-parses to the same value.
impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rat.is_zero(), self.rad.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&self.rat)),
            (true, false) => write!(f, "{}", fmt_radical(&self.rad, self.radicand)),
            (false, false) => {
                let rad = fmt_radical(&self.rad, self.radicand);
                if rad.starts_with('-') {
                    write!(f, "{}{}", fmt_rational(&self.rat), rad)
                } else {
                    write!(f, "{}+{}", fmt_rational(&self.rat), rad)
                }
            }
        }
    }
}

impl fmt::Debug for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for QuadExt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for QuadExt {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_scalar(s, None)
    }
}

/// Parses the scalar literal grammar: terms `INT`, `INT/INT`,
/// `INT*sqrt(N)`, `INT/INT*sqrt(N)` (and bare `sqrt(N)`) joined by `+`/`-`,
/// whitespace-insensitive. With `radicand = Some(n)`, every surd must reduce
/// to a rational multiple of `sqrt(n)`.
pub fn parse_scalar(text: &str, radicand: Option<u64>) -> Result<QuadExt> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let malformed = |reason: &str| Error::MalformedScalar {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    if compact.is_empty() {
        return Err(malformed("empty literal"));
    }
    let mut terms: Vec<(bool, &str)> = Vec::new();
    let bytes = compact.as_bytes();
    let mut start = 0;
    let mut negative = false;
    let mut depth = 0i32;
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 => {
                if i == start {
                    if i == 0 {
                        negative = b == b'-';
                        start = 1;
                        continue;
                    }
                    return Err(malformed("dangling sign"));
                }
                terms.push((negative, &compact[start..i]));
                negative = b == b'-';
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(malformed("unbalanced parentheses"));
    }
    if start >= compact.len() {
        return Err(malformed("missing term"));
    }
    terms.push((negative, &compact[start..]));

    let mut acc = QuadExt::int(0);
    let mut seen_radicand: Option<u64> = radicand;
    for (neg, term) in terms {
        let mut value = parse_term(term).map_err(|r| malformed(&r))?;
        if !value.is_rational() {
            match seen_radicand {
                Some(n) if n != value.radicand => {
                    return Err(Error::MixedRadicand {
                        expected: n,
                        found: value.radicand,
                    })
                }
                _ => seen_radicand = Some(value.radicand),
            }
        }
        if neg {
            value = -value;
        }
        acc = &acc + &value;
    }
    Ok(acc)
}

fn parse_int(s: &str) -> std::result::Result<BigInt, String> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("`{s}` is not an unsigned integer"));
    }
    s.parse::<BigInt>().map_err(|e| e.to_string())
}

fn parse_fraction(s: &str) -> std::result::Result<Rational, String> {
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err("zero denominator".into());
            }
            Ok(Rational::new(parse_int(n)?, d))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

fn parse_sqrt(s: &str) -> std::result::Result<QuadExt, String> {
    let inner = s
        .strip_prefix("sqrt(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| format!("`{s}` is not of the form sqrt(N)"))?;
    let n: u64 = parse_int(inner)?
        .to_u64()
        .ok_or("radicand too large")?;
    if n == 0 {
        return Ok(QuadExt::int(0));
    }
    Ok(QuadExt::sqrt_of(n))
}

fn parse_term(term: &str) -> std::result::Result<QuadExt, String> {
    if term.starts_with("sqrt(") {
        return parse_sqrt(term);
    }
    match term.split_once('*') {
        Some((coeff, surd)) => {
            let c = QuadExt::rational(parse_fraction(coeff)?);
            Ok(&c * &parse_sqrt(surd)?)
        }
        None => Ok(QuadExt::rational(parse_fraction(term)?)),
    }
}

impl Ring for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        self.abs() <= FLOAT_ZERO_TOL
    }
    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }
}

impl Field for f64 {
    fn inv(&self) -> Option<Self> {
        (*self != 0.0).then(|| 1.0 / self)
    }
    fn signum(&self) -> i32 {
        if Ring::is_zero(self) {
            0
        } else if *self < 0.0 {
            -1
        } else {
            1
        }
    }
    fn nth_root(&self, k: u32) -> Option<Self> {
        f64_real_root(*self, k)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

/// Converts an exact value into the float backend.
pub fn to_float(q: &QuadExt) -> f64 {
    Field::to_f64(q)
}

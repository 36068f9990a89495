//! Exact rationals and tagged-precision complex numbers.
//!
//! Every object in this crate is evaluated over one of two coefficient fields:
//! exact rationals ([`ExactScalar`]) or complex floating values carried at a
//! requested precision plus guard bits ([`ApproxScalar`]). [`Scalar`] is the
//! sum of the two and promotes to the approximate field whenever an
//! approximate operand takes part in an operation.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use rug::float::Round;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};
use serde_json::{json, Value};

use crate::error::{QError, Result};

/// Extra bits carried beyond the requested precision in every approximate computation.
pub const GUARD_BITS: u32 = 32;

/// Smallest accepted precision tag.
pub const MIN_PRECISION_BITS: u32 = 53;

/// Arbitrary-precision rational in lowest terms with positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExactScalar(Rational);

impl ExactScalar {
    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(QError::domain("zero denominator"));
        }
        Ok(ExactScalar(Rational::from((numer, denom))))
    }

    pub fn integer(value: i64) -> Self {
        ExactScalar(Rational::from(value))
    }

    pub fn zero() -> Self {
        ExactScalar(Rational::new())
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    pub fn from_rational(value: Rational) -> Self {
        ExactScalar(value)
    }

    pub fn from_integer(value: Integer) -> Self {
        ExactScalar(Rational::from(value))
    }

    pub fn as_rational(&self) -> &Rational {
        &self.0
    }

    pub fn into_rational(self) -> Rational {
        self.0
    }

    pub fn numer(&self) -> &Integer {
        self.0.numer()
    }

    pub fn denom(&self) -> &Integer {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.cmp0() == Ordering::Equal
    }

    pub fn is_integer(&self) -> bool {
        *self.0.denom() == 1
    }

    /// The value as an `i64`, if it is an integer that fits.
    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.0.numer().to_i64()
        } else {
            None
        }
    }

    pub fn signum(&self) -> i32 {
        match self.0.cmp0() {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn abs(&self) -> Self {
        ExactScalar(Rational::from(self.0.abs_ref()))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Integer power; negative exponents invert and fail on zero.
    pub fn pow(&self, exponent: i64) -> Result<Self> {
        if exponent < 0 && self.is_zero() {
            return Err(QError::domain("zero raised to a negative power"));
        }
        let e = i32::try_from(exponent).map_err(|_| QError::domain(format!("exponent {exponent} out of range")))?;
        Ok(ExactScalar(Rational::from((&self.0).pow(e))))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(QError::domain("division by zero"));
        }
        Ok(ExactScalar(Rational::from(&self.0 / &other.0)))
    }

    pub fn recip(&self) -> Result<Self> {
        Self::one().checked_div(self)
    }
}

impl From<i64> for ExactScalar {
    fn from(value: i64) -> Self {
        ExactScalar::integer(value)
    }
}

impl From<Integer> for ExactScalar {
    fn from(value: Integer) -> Self {
        ExactScalar::from_integer(value)
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for ExactScalar {
    type Err = QError;

    /// Accepts `p/q`, plain integers and decimals with an optional exponent.
    /// Decimals are read as exact powers-of-ten rationals.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() {
            return Err(QError::Parse("empty number".into()));
        }
        if let Some((p, q)) = t.split_once('/') {
            let numer = parse_decimal(p)?;
            let denom = parse_decimal(q)?;
            return numer.checked_div(&denom);
        }
        parse_decimal(t)
    }
}

fn parse_decimal(s: &str) -> Result<ExactScalar> {
    let s = s.trim();
    let bad = || QError::Parse(format!("`{s}` is not a rational or decimal number"));
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Integer::from_str_radix(&all_digits, 10).map_err(|_| bad())?;
    if negative {
        value = -value;
    }
    let scale = exponent - frac_part.len() as i64;
    if scale.unsigned_abs() > 100_000 {
        return Err(bad());
    }
    let ten = Rational::from(10);
    let factor = Rational::from((&ten).pow(scale as i32));
    Ok(ExactScalar(Rational::from(value) * factor))
}

macro_rules! exact_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&ExactScalar> for &ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &ExactScalar) -> ExactScalar {
                ExactScalar(Rational::from(&self.0 $op &rhs.0))
            }
        }
        impl $trait for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                ExactScalar(self.0 $op rhs.0)
            }
        }
    };
}

exact_binop!(Add, add, +);
exact_binop!(Sub, sub, -);
exact_binop!(Mul, mul, *);

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar(Rational::from(-&self.0))
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar(-self.0)
    }
}

/// Complex floating value evaluated at `precision_bits + GUARD_BITS` and
/// tagged with the requested `precision_bits`.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxScalar {
    value: Complex,
    precision_bits: u32,
}

impl ApproxScalar {
    /// Wraps a complex value. The value keeps its own (working) precision,
    /// which must not be below the tag.
    pub fn new(value: Complex, precision_bits: u32) -> Result<Self> {
        if precision_bits < MIN_PRECISION_BITS {
            return Err(QError::domain(format!(
                "precision_bits must be at least {MIN_PRECISION_BITS}, got {precision_bits}"
            )));
        }
        let value = if value.prec().0 < precision_bits {
            Complex::with_val(precision_bits + GUARD_BITS, value)
        } else {
            value
        };
        Ok(ApproxScalar { value, precision_bits })
    }

    pub(crate) fn from_complex(value: Complex, precision_bits: u32) -> Self {
        debug_assert!(precision_bits >= MIN_PRECISION_BITS);
        ApproxScalar { value, precision_bits }
    }

    pub fn from_exact(x: &ExactScalar, precision_bits: u32) -> Self {
        let work = precision_bits.max(MIN_PRECISION_BITS) + GUARD_BITS;
        ApproxScalar {
            value: Complex::with_val(work, x.as_rational()),
            precision_bits: precision_bits.max(MIN_PRECISION_BITS),
        }
    }

    pub fn from_parts(re: &ExactScalar, im: &ExactScalar, precision_bits: u32) -> Self {
        let work = precision_bits.max(MIN_PRECISION_BITS) + GUARD_BITS;
        ApproxScalar {
            value: Complex::with_val(work, (re.as_rational(), im.as_rational())),
            precision_bits: precision_bits.max(MIN_PRECISION_BITS),
        }
    }

    pub fn value(&self) -> &Complex {
        &self.value
    }

    pub fn into_value(self) -> Complex {
        self.value
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn working_bits(&self) -> u32 {
        self.value.prec().0.max(self.value.prec().1)
    }

    pub fn is_real(&self) -> bool {
        self.value.imag().is_zero()
    }

    pub fn re_f64(&self) -> f64 {
        self.value.real().to_f64()
    }

    pub fn im_f64(&self) -> f64 {
        self.value.imag().to_f64()
    }

    /// Upper bound for the modulus as an `f64`.
    pub fn abs_upper(&self) -> f64 {
        abs_upper(&self.value)
    }

    /// Lower bound for the modulus as an `f64`.
    pub fn abs_lower(&self) -> f64 {
        abs_lower(&self.value)
    }

    /// Decimal digits printed for this value's precision tag.
    pub fn decimal_digits(&self) -> usize {
        decimal_digits(self.precision_bits)
    }

    pub fn re_string(&self) -> String {
        float_to_decimal(self.value.real(), self.decimal_digits())
    }

    pub fn im_string(&self) -> String {
        float_to_decimal(self.value.imag(), self.decimal_digits())
    }

    /// `re` for real values, otherwise `re+im i` (with `-` for a negative imaginary part).
    pub fn to_cell(&self) -> String {
        if self.is_real() {
            return self.re_string();
        }
        let im = self.im_string();
        match im.strip_prefix('-') {
            Some(mag) => format!("{}-{}i", self.re_string(), mag),
            None => format!("{}+{}i", self.re_string(), im),
        }
    }
}

pub(crate) fn decimal_digits(precision_bits: u32) -> usize {
    (f64::from(precision_bits) * std::f64::consts::LOG10_2).ceil() as usize + 1
}

pub(crate) fn float_to_decimal(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(digits))
}

pub(crate) fn abs_upper(z: &Complex) -> f64 {
    let prec = z.prec().0.max(z.prec().1);
    let m = Float::with_val_round(prec, z.abs_ref(), Round::Up).0;
    m.to_f64_round(Round::Up)
}

pub(crate) fn abs_lower(z: &Complex) -> f64 {
    let prec = z.prec().0.max(z.prec().1);
    let m = Float::with_val_round(prec, z.abs_ref(), Round::Down).0;
    m.to_f64_round(Round::Down)
}

/// A coefficient in either the exact or the approximate field.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(ExactScalar),
    Approx(ApproxScalar),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(ExactScalar::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(ExactScalar::one())
    }

    pub fn integer(value: i64) -> Self {
        Scalar::Exact(ExactScalar::integer(value))
    }

    pub fn ratio(numer: i64, denom: i64) -> Result<Self> {
        ExactScalar::new(numer, denom).map(Scalar::Exact)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&ExactScalar> {
        match self {
            Scalar::Exact(x) => Some(x),
            Scalar::Approx(_) => None,
        }
    }

    pub fn as_approx(&self) -> Option<&ApproxScalar> {
        match self {
            Scalar::Approx(x) => Some(x),
            Scalar::Exact(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(x) => x.is_zero(),
            Scalar::Approx(x) => x.value.real().is_zero() && x.value.imag().is_zero(),
        }
    }

    /// True if the value is real (exact values always are).
    pub fn is_real(&self) -> bool {
        match self {
            Scalar::Exact(_) => true,
            Scalar::Approx(x) => x.is_real(),
        }
    }

    /// The value as a complex float at `work` bits.
    pub fn to_complex(&self, work: u32) -> Complex {
        match self {
            Scalar::Exact(x) => Complex::with_val(work, x.as_rational()),
            Scalar::Approx(x) => Complex::with_val(work, &x.value),
        }
    }

    /// Converts to the approximate field with the given precision tag.
    pub fn to_approx(&self, precision_bits: u32) -> ApproxScalar {
        match self {
            Scalar::Exact(x) => ApproxScalar::from_exact(x, precision_bits),
            Scalar::Approx(x) => {
                let tag = precision_bits.max(x.precision_bits);
                let work = (tag + GUARD_BITS).max(x.working_bits());
                ApproxScalar::from_complex(Complex::with_val(work, &x.value), tag)
            }
        }
    }

    pub fn re_f64(&self) -> f64 {
        match self {
            Scalar::Exact(x) => x.to_f64(),
            Scalar::Approx(x) => x.re_f64(),
        }
    }

    pub fn im_f64(&self) -> f64 {
        match self {
            Scalar::Exact(_) => 0.0,
            Scalar::Approx(x) => x.im_f64(),
        }
    }

    pub fn abs_upper(&self) -> f64 {
        match self {
            Scalar::Exact(x) => {
                let v = x.abs().to_f64();
                v * (1.0 + f64::EPSILON)
            }
            Scalar::Approx(x) => x.abs_upper(),
        }
    }

    pub fn abs_lower(&self) -> f64 {
        match self {
            Scalar::Exact(x) => x.abs().to_f64() * (1.0 - f64::EPSILON),
            Scalar::Approx(x) => x.abs_lower(),
        }
    }

    fn lift_pair(a: &ApproxScalar, b: &Scalar) -> (Complex, u32, u32) {
        match b {
            Scalar::Exact(x) => (
                Complex::with_val(a.working_bits(), x.as_rational()),
                a.working_bits(),
                a.precision_bits,
            ),
            Scalar::Approx(x) => (
                x.value.clone(),
                a.working_bits().max(x.working_bits()),
                a.precision_bits.max(x.precision_bits),
            ),
        }
    }

    fn combine(
        &self,
        other: &Scalar,
        exact: impl FnOnce(&ExactScalar, &ExactScalar) -> ExactScalar,
        approx: impl FnOnce(&Complex, &Complex, u32) -> Complex,
    ) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(exact(a, b)),
            (Scalar::Approx(a), b) => {
                let (bv, work, tag) = Self::lift_pair(a, b);
                Scalar::Approx(ApproxScalar::from_complex(approx(&a.value, &bv, work), tag))
            }
            (Scalar::Exact(a), Scalar::Approx(b)) => {
                let work = b.working_bits();
                let av = Complex::with_val(work, a.as_rational());
                Scalar::Approx(ApproxScalar::from_complex(
                    approx(&av, &b.value, work),
                    b.precision_bits,
                ))
            }
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        self.combine(other, |a, b| a + b, |a, b, w| Complex::with_val(w, a + b))
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.combine(other, |a, b| a - b, |a, b, w| Complex::with_val(w, a - b))
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        self.combine(other, |a, b| a * b, |a, b, w| Complex::with_val(w, a * b))
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(-a),
            Scalar::Approx(a) => Scalar::Approx(ApproxScalar::from_complex(
                Complex::with_val(a.working_bits(), -&a.value),
                a.precision_bits,
            )),
        }
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        if other.is_zero() {
            return Err(QError::domain("division by zero"));
        }
        Ok(self.combine(
            other,
            |a, b| Rational::from(a.as_rational() / b.as_rational()).into(),
            |a, b, w| Complex::with_val(w, a / b),
        ))
    }

    /// Integer power; negative exponents invert.
    pub fn powi(&self, exponent: i64) -> Result<Scalar> {
        match self {
            Scalar::Exact(a) => a.pow(exponent).map(Scalar::Exact),
            Scalar::Approx(a) => {
                if exponent < 0 && self.is_zero() {
                    return Err(QError::domain("zero raised to a negative power"));
                }
                let e =
                    i32::try_from(exponent).map_err(|_| QError::domain(format!("exponent {exponent} out of range")))?;
                let w = a.working_bits();
                Ok(Scalar::Approx(ApproxScalar::from_complex(
                    Complex::with_val(w, (&a.value).pow(e)),
                    a.precision_bits,
                )))
            }
        }
    }

    /// Parses `p/q`, decimals, or complex literals `a+bi` / `bi`.
    /// Real literals are exact; complex literals become approximate at `precision_bits`.
    pub fn parse(s: &str, precision_bits: u32) -> Result<Scalar> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(body) = t.strip_suffix('i') {
            let split = body
                .char_indices()
                .skip(1)
                .filter(|&(i, c)| (c == '+' || c == '-') && !matches!(body.as_bytes()[i - 1], b'e' | b'E'))
                .map(|(i, _)| i)
                .last();
            let (re, im) = match split {
                Some(i) => (parse_decimal(&body[..i])?, imag_coefficient(&body[i..])?),
                None => (ExactScalar::zero(), imag_coefficient(body)?),
            };
            return Ok(Scalar::Approx(ApproxScalar::from_parts(&re, &im, precision_bits)));
        }
        t.parse::<ExactScalar>().map(Scalar::Exact)
    }

    /// JSON form: exact values as `"p/q"`, approximate values as
    /// `{"re": decimal, "im": decimal, "prec_bits": int}`.
    pub fn to_json(&self) -> Value {
        match self {
            Scalar::Exact(x) => Value::String(x.to_string()),
            Scalar::Approx(x) => json!({
                "re": x.re_string(),
                "im": x.im_string(),
                "prec_bits": x.precision_bits,
            }),
        }
    }

    pub fn from_json(value: &Value, default_precision: u32) -> Result<Scalar> {
        match value {
            Value::String(s) => Scalar::parse(s, default_precision),
            Value::Number(n) => Scalar::parse(&n.to_string(), default_precision),
            Value::Object(map) => {
                let prec = map
                    .get("prec_bits")
                    .and_then(Value::as_u64)
                    .map(|p| p as u32)
                    .unwrap_or(default_precision);
                let part = |key: &str| -> Result<Float> {
                    let raw = match map.get(key) {
                        Some(Value::String(s)) => s.clone(),
                        Some(Value::Number(n)) => n.to_string(),
                        None => "0".to_string(),
                        Some(other) => return Err(QError::Parse(format!("bad `{key}` component: {other}"))),
                    };
                    let parsed = Float::parse(raw.trim())
                        .map_err(|e| QError::Parse(format!("bad `{key}` component `{raw}`: {e}")))?;
                    Ok(Float::with_val(prec + GUARD_BITS, parsed))
                };
                let z = Complex::with_val(prec + GUARD_BITS, (part("re")?, part("im")?));
                ApproxScalar::new(z, prec).map(Scalar::Approx)
            }
            other => Err(QError::Parse(format!("not a scalar: {other}"))),
        }
    }

    /// One-cell rendering used by CSV and plain output.
    pub fn to_cell(&self) -> String {
        match self {
            Scalar::Exact(x) => x.to_string(),
            Scalar::Approx(x) => x.to_cell(),
        }
    }
}

fn imag_coefficient(s: &str) -> Result<ExactScalar> {
    match s {
        "" | "+" => Ok(ExactScalar::one()),
        "-" => Ok(ExactScalar::integer(-1)),
        _ => parse_decimal(s),
    }
}

impl From<ExactScalar> for Scalar {
    fn from(x: ExactScalar) -> Self {
        Scalar::Exact(x)
    }
}

impl From<ApproxScalar> for Scalar {
    fn from(x: ApproxScalar) -> Self {
        Scalar::Approx(x)
    }
}

impl From<Rational> for ExactScalar {
    fn from(x: Rational) -> Self {
        ExactScalar(x)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cell())
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar::add(self, rhs)
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar::sub(self, rhs)
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar::mul(self, rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_are_reduced() {
        let x = ExactScalar::new(6, -8).unwrap();
        assert_eq!(x.to_string(), "-3/4");
        assert_eq!(*x.denom(), 4);
    }

    #[test]
    fn parses_fractions_and_decimals_exactly() {
        assert_eq!("-7/12".parse::<ExactScalar>().unwrap().to_string(), "-7/12");
        assert_eq!("0.25".parse::<ExactScalar>().unwrap().to_string(), "1/4");
        assert_eq!("1.5e-2".parse::<ExactScalar>().unwrap().to_string(), "3/200");
        assert_eq!("12".parse::<ExactScalar>().unwrap().to_string(), "12");
        assert!("1/0".parse::<ExactScalar>().is_err());
        assert!("abc".parse::<ExactScalar>().is_err());
        assert!(".".parse::<ExactScalar>().is_err());
    }

    #[test]
    fn parses_complex_literals() {
        let z = Scalar::parse("0.3-0.4i", 64).unwrap();
        let a = z.as_approx().unwrap();
        assert!((a.re_f64() - 0.3).abs() < 1e-15);
        assert!((a.im_f64() + 0.4).abs() < 1e-15);
        let w = Scalar::parse("-i", 64).unwrap();
        assert_eq!(w.im_f64(), -1.0);
        let e = Scalar::parse("1e-1+2e+0i", 64).unwrap();
        assert_eq!(e.im_f64(), 2.0);
    }

    #[test]
    fn mixed_arithmetic_promotes_without_losing_precision() {
        let a = Scalar::parse("0.5+0i", 200).unwrap();
        let b = Scalar::ratio(1, 3).unwrap();
        let c = &a * &b;
        let approx = c.as_approx().unwrap();
        assert_eq!(approx.precision_bits(), 200);
        assert!(approx.working_bits() >= 200 + GUARD_BITS);
        assert!((approx.re_f64() - 1.0 / 6.0).abs() < 1e-16);
    }

    #[test]
    fn precision_floor_enforced() {
        assert!(ApproxScalar::new(Complex::with_val(64, 1), 52).is_err());
    }

    #[test]
    fn json_shapes() {
        let x = Scalar::ratio(-7, 12).unwrap();
        assert_eq!(x.to_json(), Value::String("-7/12".into()));
        let z = Scalar::parse("1+2i", 64).unwrap();
        let j = z.to_json();
        assert_eq!(j["prec_bits"], 64);
        let back = Scalar::from_json(&j, 64).unwrap();
        assert!((back.im_f64() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert!(Scalar::one().checked_div(&Scalar::zero()).is_err());
        assert!(ExactScalar::zero().pow(-1).is_err());
    }
}

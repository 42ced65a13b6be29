//! Exact scalar helpers.
//!
//! [`Rational`] is an arbitrary-precision rational; all bids, lengths,
//! workloads and payments use it. Logarithms never appear as floats: they are
//! kept symbolic and, when a number is needed, enclosed in a [`Interval`] with
//! rational endpoints.

use alloc::format;
use alloc::string::String;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use alloc::string::ToString;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n / d`. Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"`, an integer, or a decimal with a finite expansion such as
/// `"-0.125"` or `"3.5e2"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let err = || Error::Parse(String::from(text));
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| err())?;
        let den: BigInt = den.trim().parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(num, den));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| err())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let all_digits = format!("{whole}{frac}");
    let mut value = Rational::from_integer(all_digits.parse::<BigInt>().map_err(|_| err())?);
    let scale = exponent - frac.len() as i32;
    value *= pow10(scale);
    if negative {
        value = -value;
    }
    Ok(value)
}

fn pow10(exp: i32) -> Rational {
    let p = num_traits::pow(BigInt::from(10), exp.unsigned_abs() as usize);
    if exp >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// `2^exp` for any integer exponent.
pub fn pow2(exp: i64) -> Rational {
    let p = BigInt::one() << exp.unsigned_abs();
    if exp >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// Smallest `e` with `2^e ≥ b`, found by comparing against powers of two.
pub fn ceil_log2(b: &Rational) -> Result<i64> {
    if !b.is_positive() {
        return Err(Error::Domain(format!("ceil_log2 of non-positive {b}")));
    }
    // bit lengths give an estimate within one of the answer
    let estimate = b.numer().bits() as i64 - b.denom().bits() as i64;
    let mut e = estimate;
    while pow2(e) < *b {
        e += 1;
    }
    while pow2(e - 1) >= *b {
        e -= 1;
    }
    Ok(e)
}

/// Rounded speed `2^⌈log₂ b⌉`, the smallest power of two that is at least `b`.
pub fn rounded_speed(b: &Rational) -> Result<Rational> {
    ceil_log2(b).map(pow2)
}

pub fn is_power_of_two(b: &Rational) -> bool {
    b.is_positive() && ceil_log2(b).map(|e| pow2(e) == *b).unwrap_or(false)
}

/// Exact square root when `r` is the square of a rational.
pub fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

pub fn midpoint(lo: &Rational, hi: &Rational) -> Rational {
    (lo + hi) / int(2)
}

/// Closed interval with rational endpoints, used to enclose irrational
/// constants such as `ln(3/2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn point(x: Rational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn scale(&self, c: &Rational) -> Interval {
        let a = &self.lo * c;
        let b = &self.hi * c;
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn shift(&self, c: &Rational) -> Interval {
        Interval { lo: &self.lo + c, hi: &self.hi + c }
    }
}

/// `2·atanh(z) = ln((1+z)/(1-z))` for `0 ≤ z < 1`, enclosed by the partial
/// sum and a geometric bound on the tail.
fn atanh2_enclosure(z: &Rational, tolerance: &Rational) -> Interval {
    let z2 = z * z;
    let tail_factor = int(2) / (int(1) - &z2);
    let mut power = z.clone();
    let mut sum = Rational::zero();
    let mut k: i64 = 0;
    loop {
        let denom = int(2 * k + 1);
        sum += int(2) * &power / &denom;
        power *= &z2;
        k += 1;
        // remaining terms are bounded by 2 z^{2k+1} / ((2k+1)(1-z²))
        let tail = &tail_factor * &power / int(2 * k + 1);
        if tail < *tolerance || power.is_zero() {
            return Interval { lo: sum.clone(), hi: sum + tail };
        }
    }
}

/// Rational enclosure of `ln(a)` of width below `tolerance`.
pub fn ln_enclosure(a: &Rational, tolerance: &Rational) -> Result<Interval> {
    if !a.is_positive() {
        return Err(Error::Domain(format!("ln of non-positive {a}")));
    }
    if !tolerance.is_positive() {
        return Err(Error::Domain(String::from("tolerance must be positive")));
    }
    if a.is_one() {
        return Ok(Interval::point(Rational::zero()));
    }
    // a = 2^e · r with r in [1, 2)
    let e = ceil_log2(a)?;
    let (e, r) = if pow2(e) == *a { (e, int(1)) } else { (e - 1, a / pow2(e - 1)) };
    let parts = e.unsigned_abs() as i64 + 2;
    let sub_tol = tolerance / int(2 * parts);
    // ln 2 = 2·atanh(1/3)
    let ln2 = atanh2_enclosure(&ratio(1, 3), &sub_tol);
    let z = (&r - int(1)) / (&r + int(1));
    let ln_r = if z.is_zero() { Interval::point(Rational::zero()) } else { atanh2_enclosure(&z, &sub_tol) };
    Ok(ln2.scale(&int(e)).add(&ln_r))
}

/// Decimal rendering with `digits` fractional digits (truncated toward zero).
pub fn to_decimal(r: &Rational, digits: usize) -> String {
    let negative = r.is_negative();
    let scaled = r.abs() * Rational::from_integer(num_traits::pow(BigInt::from(10), digits));
    let n = scaled.to_integer();
    let (whole, frac) = n.div_rem(&num_traits::pow(BigInt::from(10), digits));
    let sign = if negative && !n.is_zero() { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{whole}");
    }
    format!("{sign}{whole}.{:0>width$}", frac.to_string(), width = digits)
}

/// Lossy conversion for display and sampling only.
pub fn to_f64(r: &Rational) -> f64 {
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() {
        n / d
    } else {
        // shrink both sides until they fit
        let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
        let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
        let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
        n / d
    }
}

pub(crate) fn sign_of(r: &Rational) -> Sign {
    r.numer().sign()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(q("3/6"), ratio(1, 2));
        assert_eq!(q("0.125"), ratio(1, 8));
        assert_eq!(q("-1.5"), ratio(-3, 2));
        assert_eq!(q("7"), int(7));
        assert_eq!(q("2.5e1"), int(25));
        assert_eq!(q("1e-3"), ratio(1, 1000));
        assert_eq!(q(".5"), ratio(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1.2.3").is_err());
    }

    #[test]
    fn rounded_speed_examples() {
        assert_eq!(rounded_speed(&int(8)).unwrap(), int(8));
        assert_eq!(rounded_speed(&int(3)).unwrap(), int(4));
        assert_eq!(rounded_speed(&ratio(3, 8)).unwrap(), ratio(1, 2));
        assert_eq!(rounded_speed(&ratio(1, 1024)).unwrap(), ratio(1, 1024));
        assert!(rounded_speed(&int(0)).is_err());
        assert!(rounded_speed(&int(-2)).is_err());
    }

    #[test]
    fn power_of_two_detection() {
        assert!(is_power_of_two(&int(16)));
        assert!(is_power_of_two(&ratio(1, 4)));
        assert!(!is_power_of_two(&int(12)));
        assert!(!is_power_of_two(&int(0)));
    }

    #[test]
    fn exact_sqrt_detects_squares() {
        assert_eq!(exact_sqrt(&ratio(9, 4)), Some(ratio(3, 2)));
        assert_eq!(exact_sqrt(&int(2)), None);
        assert_eq!(exact_sqrt(&int(-4)), None);
    }

    #[test]
    fn ln_enclosures_bracket_known_values() {
        let tol = ratio(1, 1_000_000_000);
        // ln(3/2) = 0.405465108108164381978013115464349136571990423462494928...
        let lo = q("0.4054651081081643819");
        let hi = q("0.4054651081081643820");
        let e = ln_enclosure(&ratio(3, 2), &tol).unwrap();
        assert!(e.lo <= hi && lo <= e.hi, "{e:?}");
        assert!(e.width() < tol);
        // ln 10 = 2.302585092994045684017991454684364...
        let e = ln_enclosure(&int(10), &tol).unwrap();
        assert!(e.contains(&q("2.302585092994045684")) || e.width() < tol);
        assert!(e.lo < q("2.3025850930") && e.hi > q("2.3025850929"));
        // ln(1/8) = -3 ln 2
        let e = ln_enclosure(&ratio(1, 8), &tol).unwrap();
        assert!(e.lo < q("-2.0794415416") && e.hi > q("-2.0794415417"));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&ratio(13, 4), 3), "3.250");
        assert_eq!(to_decimal(&ratio(-1, 3), 4), "-0.3333");
        assert_eq!(to_decimal(&int(5), 0), "5");
    }
}

//! Exact rational scalars, their text format, and rational interval bounds
//! on natural logarithms.
//!
//! Every value that enters an engine is an exact rational. Point masses are
//! defined by exact value coincidences, so nothing in this crate is ever
//! keyed by a float; floats appear only in rendered diagnostics.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Parse a value string: a decimal integer (`"42"`, `"-3"`) or a fraction
/// `"p/q"`. Floats, exponents and symbolic constants are rejected so that
/// only exactly representable inputs reach the engines.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty value string".into()));
    }
    let (num_str, den_str) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num_str
        .parse()
        .map_err(|_| Error::Parse(format!("`{t}` is not a decimal integer or p/q fraction")))?;
    let den: BigInt = den_str
        .parse()
        .map_err(|_| Error::Parse(format!("`{t}` has a non-integer denominator")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("`{t}` has a zero denominator")));
    }
    // Ratio::new reduces and moves the sign to the numerator.
    Ok(Rational::new(num, den))
}

pub fn rational_from_i64(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn rational_from_u64(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Nearest f64, for rendered diagnostics only.
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Bounds `2*atanh(y)` for `0 <= y < 1` from below and above, with interval
/// width under `tol`. The series has positive terms, so the partial sum is a
/// lower bound and the geometric tail bound gives the upper one.
fn atanh_times_two_bounds(y: &Rational, tol: &Rational) -> (Rational, Rational) {
    if y.is_zero() {
        return (Rational::zero(), Rational::zero());
    }
    debug_assert!(y.is_positive() && *y < Rational::one());
    let y2 = y * y;
    let one_minus_y2 = Rational::one() - &y2;
    let mut sum = Rational::zero();
    let mut pow = y.clone(); // y^(2j+1)
    let mut j: u64 = 0;
    loop {
        sum += &pow / Rational::from_integer(BigInt::from(2 * j + 1));
        let next_pow = &pow * &y2;
        // tail after term j:  sum_{i>j} y^(2i+1)/(2i+1) <= y^(2j+3)/((2j+3)(1-y^2))
        let rem =
            &next_pow / (Rational::from_integer(BigInt::from(2 * j + 3)) * &one_minus_y2);
        let width = &rem + &rem;
        if width < *tol {
            let lo = &sum + &sum;
            let hi = &lo + &width;
            return (lo, hi);
        }
        pow = next_pow;
        j += 1;
    }
}

/// Rational bounds `(lo, hi)` on `ln n` with `hi - lo < 10^-digits`.
///
/// The argument is reduced to `n = 2^k * m` with `m` in `[1, 2)`, so both
/// series arguments `y = (x-1)/(x+1)` stay at most 1/3 and converge fast.
pub fn ln_bounds(n: u64, digits: u32) -> (Rational, Rational) {
    assert!(n >= 1, "ln_bounds requires n >= 1");
    if n == 1 {
        return (Rational::zero(), Rational::zero());
    }
    let k = n.ilog2() as u64;
    let tol = Rational::new(
        BigInt::one(),
        BigInt::from(10u32).pow(digits) * BigInt::from(2 * (k + 1)),
    );
    let (mut lo, mut hi) = (Rational::zero(), Rational::zero());
    if k > 0 {
        // ln 2 = 2 atanh(1/3)
        let (l, h) = atanh_times_two_bounds(&Rational::new(1.into(), 3.into()), &tol);
        let kk = Rational::from_integer(BigInt::from(k));
        lo = &kk * l;
        hi = &kk * h;
    }
    let p2 = BigInt::one() << k;
    let y = Rational::new(BigInt::from(n) - &p2, BigInt::from(n) + &p2);
    let (ml, mh) = atanh_times_two_bounds(&y, &tol);
    (lo + ml, hi + mh)
}

/// Decide `factor * ln(n) >= rhs` exactly for `factor > 0` and `n >= 2`.
///
/// `ln n` is irrational for every integer `n >= 2`, so refining the interval
/// always terminates with a strict separation from the rational target.
pub fn ln_product_at_least(factor: &Rational, n: u64, rhs: &Rational, start_digits: u32) -> bool {
    assert!(n >= 2, "ln comparison requires n >= 2");
    assert!(factor.is_positive(), "ln comparison requires factor > 0");
    let target = rhs / factor;
    let mut digits = start_digits.max(5);
    loop {
        let (lo, hi) = ln_bounds(n, digits);
        if lo >= target {
            return true;
        }
        if hi < target {
            return false;
        }
        digits = digits.saturating_mul(2);
    }
}

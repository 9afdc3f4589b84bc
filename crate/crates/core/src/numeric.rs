//! Exact rational arithmetic, certified rational intervals and the Cantor
//! pairing bijection.
//!
//! Every value produced by a construction in this crate is a [`Rational`].
//! Square roots only appear in the `omega` family and are carried as
//! [`Bounds`]: a closed rational interval that is degenerate whenever the
//! radicand is the square of a rational.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision fraction in canonical form (positive denominator,
/// reduced).
pub type Rational = BigRational;

/// Builds `num / den`. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exactly `2^-m`.
pub fn dyadic(m: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << m as usize)
}

/// Exactly `2^m`.
pub fn pow2(m: u32) -> Rational {
    Rational::from_integer(BigInt::one() << m as usize)
}

/// `(-1/2)^v`.
pub fn neg_half_pow(v: u32) -> Rational {
    let mag = dyadic(v);
    if v % 2 == 1 {
        -mag
    } else {
        mag
    }
}

/// Cantor pairing `((n+k)^2 + n + 3k) / 2`.
///
/// Equal to `(n+k)(n+k+1)/2 + k`. The code fits in a `u128` whenever
/// `n + k` fits in a `u64`; panics otherwise.
pub fn pair(n: u64, k: u64) -> u128 {
    let s = n.checked_add(k).expect("pairing diagonal n + k exceeds u64") as u128;
    s * (s + 1) / 2 + k as u128
}

/// Inverse of [`pair`]. Panics for codes whose diagonal exceeds `u64`.
pub fn unpair(p: u128) -> (u64, u64) {
    // diagonal d: largest d with d(d+1)/2 <= p
    let pb = BigUint::from(p);
    let mut d = ((&pb * 8u32 + 1u32).sqrt() - 1u32) / 2u32;
    let tri = |d: &BigUint| d * (d + 1u32) / 2u32;
    while tri(&d) > pb {
        d -= 1u32;
    }
    while tri(&(&d + 1u32)) <= pb {
        d += 1u32;
    }
    let k = (&pb - tri(&d)).to_u64().expect("offset fits");
    let d = d.to_u64().expect("diagonal exceeds u64");
    (d - k, k)
}

/// Floor of the square root of a nonnegative rational scaled by `2^bits`,
/// returned as the certified bracket `[lo, hi]` with `hi - lo <= 2^-bits`.
///
/// The bracket is degenerate when `q` is the square of a rational.
pub fn sqrt_bounds(q: &Rational, bits: u32) -> Bounds {
    assert!(!q.is_negative(), "square root of a negative rational");
    if q.is_zero() {
        return Bounds::exact(Rational::zero());
    }
    let num = q.numer().magnitude();
    let den = q.denom().magnitude();
    let (rn, rd) = (num.sqrt(), den.sqrt());
    if &rn * &rn == *num && &rd * &rd == *den {
        return Bounds::exact(Rational::new(BigInt::from(rn), BigInt::from(rd)));
    }
    // sqrt(n/d) = sqrt(n*d)/d; scale by 4^bits so the floor is 2^-bits fine.
    let scaled: BigUint = (num * den) << (2 * bits as usize);
    let root = scaled.sqrt();
    let scale = BigInt::from(den.clone()) << bits as usize;
    let lo = Rational::new(BigInt::from(root.clone()), scale.clone());
    let hi = Rational::new(BigInt::from(root + 1u32), scale);
    Bounds { lo, hi }
}

/// Closed rational interval `[lo, hi]` certified to contain a real value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bounds {
    pub lo: Rational,
    pub hi: Rational,
}

impl Bounds {
    pub fn exact(q: Rational) -> Self {
        Bounds { lo: q.clone(), hi: q }
    }

    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "inverted interval");
        Bounds { lo, hi }
    }

    pub fn zero() -> Self {
        Self::exact(Rational::zero())
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        self.is_exact().then_some(&self.lo)
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn scale(&self, q: &Rational) -> Bounds {
        let (a, b) = (&self.lo * q, &self.hi * q);
        if a <= b {
            Bounds { lo: a, hi: b }
        } else {
            Bounds { lo: b, hi: a }
        }
    }

    pub fn abs_upper(&self) -> Rational {
        self.lo.abs().max(self.hi.abs())
    }

    /// Lossy, for plotting and human-facing output only.
    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64().unwrap_or(f64::NAN)
    }
}

impl Add for &Bounds {
    type Output = Bounds;
    fn add(self, rhs: &Bounds) -> Bounds {
        Bounds { lo: &self.lo + &rhs.lo, hi: &self.hi + &rhs.hi }
    }
}

impl Sub for &Bounds {
    type Output = Bounds;
    fn sub(self, rhs: &Bounds) -> Bounds {
        Bounds { lo: &self.lo - &rhs.hi, hi: &self.hi - &rhs.lo }
    }
}

impl Neg for &Bounds {
    type Output = Bounds;
    fn neg(self) -> Bounds {
        Bounds { lo: -&self.hi, hi: -&self.lo }
    }
}

impl Mul<&Rational> for &Bounds {
    type Output = Bounds;
    fn mul(self, rhs: &Rational) -> Bounds {
        self.scale(rhs)
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{}, {}]", format_decimal(&self.lo, 12), format_decimal(&self.hi, 12))
        }
    }
}

/// Fixed-point rendering with `digits` fractional digits, rounding half away
/// from zero. Locale independent and exact.
pub fn format_decimal(q: &Rational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = q * Rational::from_integer(scale.clone());
    let neg = scaled.is_negative();
    let mag = scaled.abs();
    let (whole, frac) = mag.numer().div_rem(mag.denom());
    let rounded = if frac * 2 >= *mag.denom() { whole + 1 } else { whole };
    let (int_part, frac_part) = rounded.div_rem(&scale);
    let sign = if neg && !rounded.is_zero() { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{int_part}");
    }
    let frac_str = frac_part.to_str_radix(10);
    format!("{sign}{int_part}.{}{frac_str}", "0".repeat(digits as usize - frac_str.len()))
}

/// Parses `"p/q"`, `"p"` or a decimal literal such as `"-0.125"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((w, f)) = s.split_once('.') {
        let neg = w.starts_with('-');
        let w = w.trim_start_matches(['-', '+']);
        if !f.chars().all(|c| c.is_ascii_digit()) || f.is_empty() {
            return None;
        }
        let whole: BigInt = if w.is_empty() { BigInt::zero() } else { w.parse().ok()? };
        let frac: BigInt = f.parse().ok()?;
        let den = BigInt::from(10u32).pow(f.len() as u32);
        let mag = Rational::new(whole * &den + frac, den);
        return Some(if neg { -mag } else { mag });
    }
    s.parse::<BigInt>().ok().map(Rational::from_integer)
}

/// Sign of a rational as -1, 0 or 1.
pub fn signum(q: &Rational) -> i8 {
    match q.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

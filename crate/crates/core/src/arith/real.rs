//! Ball arithmetic on arbitrary-precision fixed-point reals.
//!
//! A [`Real`] is a midpoint `mid * 2^-prec` together with a radius
//! `rad * 2^-prec`; every operation returns a ball that contains all results
//! of the exact operation applied to points of the input balls. Rounding is
//! accounted for by widening the radius, so comparisons made through
//! [`Real::lower`] / [`Real::upper`] are rigorous.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Bits needed for `digits` decimal digits plus guard bits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 32
}

fn ceil_shr(x: &BigUint, bits: u32) -> BigUint {
    if bits == 0 {
        return x.clone();
    }
    let one = BigUint::one();
    (x + ((&one << bits) - &one)) >> bits
}

#[derive(Clone, PartialEq, Eq)]
pub struct Real {
    mid: BigInt,
    rad: BigUint,
    prec: u32,
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {:.3e}", self.to_decimal(20), self.radius_f64())
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((self.prec.saturating_sub(32)) as f64 / std::f64::consts::LOG2_10) as u32;
        write!(f, "{}", self.to_decimal(digits.max(1)))
    }
}

impl Real {
    pub fn zero(prec: u32) -> Self {
        Self { mid: BigInt::zero(), rad: BigUint::zero(), prec }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_int(&BigInt::one(), prec)
    }

    pub fn from_int(n: &BigInt, prec: u32) -> Self {
        Self { mid: n << prec, rad: BigUint::zero(), prec }
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Self::from_int(&BigInt::from(n), prec)
    }

    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let scaled = num << prec;
        let (q, r) = scaled.div_mod_floor(den);
        let rad = if r.is_zero() { BigUint::zero() } else { BigUint::one() };
        Self { mid: q, rad, prec }
    }

    pub fn from_rational(x: &BigRational, prec: u32) -> Self {
        Self::from_ratio(x.numer(), x.denom(), prec)
    }

    /// A ball with the given rational midpoint and rational radius.
    pub fn with_radius(center: &BigRational, radius: &BigRational, prec: u32) -> Self {
        let mut out = Self::from_rational(center, prec);
        out.add_error(radius);
        out
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Widens the radius by `err >= 0`.
    pub fn add_error(&mut self, err: &BigRational) {
        let scaled = err.abs() * BigRational::from_integer(BigInt::one() << self.prec);
        let up = scaled.ceil().to_integer();
        self.rad += up.magnitude();
    }

    pub fn midpoint(&self) -> BigRational {
        BigRational::new(self.mid.clone(), BigInt::one() << self.prec)
    }

    pub fn radius(&self) -> BigRational {
        BigRational::new(BigInt::from(self.rad.clone()), BigInt::one() << self.prec)
    }

    pub fn lower(&self) -> BigRational {
        self.midpoint() - self.radius()
    }

    pub fn upper(&self) -> BigRational {
        self.midpoint() + self.radius()
    }

    pub fn abs_upper(&self) -> BigRational {
        self.midpoint().abs() + self.radius()
    }

    pub fn to_f64(&self) -> f64 {
        big_ratio_to_f64(&self.mid, self.prec)
    }

    pub fn radius_f64(&self) -> f64 {
        big_ratio_to_f64(&BigInt::from(self.rad.clone()), self.prec)
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.magnitude() <= &self.rad
    }

    pub fn is_certainly_positive(&self) -> bool {
        self.mid.sign() == Sign::Plus && self.mid.magnitude() > &self.rad
    }

    pub fn is_certainly_negative(&self) -> bool {
        self.mid.sign() == Sign::Minus && self.mid.magnitude() > &self.rad
    }

    /// Rigorous comparison; `None` when the balls overlap.
    pub fn certified_cmp(&self, other: &Real) -> Option<Ordering> {
        let d = self - other;
        if d.is_certainly_positive() {
            Some(Ordering::Greater)
        } else if d.is_certainly_negative() {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    /// Returns a copy at a different precision (rounding outward).
    pub fn with_prec(&self, prec: u32) -> Self {
        match prec.cmp(&self.prec) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let s = prec - self.prec;
                Self { mid: &self.mid << s, rad: &self.rad << s, prec }
            }
            Ordering::Less => {
                let s = self.prec - prec;
                Self {
                    mid: &self.mid >> s,
                    rad: ceil_shr(&self.rad, s) + 1u32,
                    prec,
                }
            }
        }
    }

    fn aligned(a: &Real, b: &Real) -> (Real, Real) {
        let p = a.prec.max(b.prec);
        (a.with_prec(p), b.with_prec(p))
    }

    pub fn abs(&self) -> Self {
        Self { mid: self.mid.abs(), rad: self.rad.clone(), prec: self.prec }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        Self {
            mid: &self.mid * k,
            rad: &self.rad * k.magnitude(),
            prec: self.prec,
        }
    }

    pub fn div_int(&self, k: &BigInt) -> Self {
        assert!(!k.is_zero(), "division by zero");
        let (q, r) = self.mid.div_mod_floor(k);
        let mut rad = ceil_div(&self.rad, k.magnitude());
        if !r.is_zero() {
            rad += 1u32;
        }
        let mid = if k.is_negative() { q } else { q };
        Self { mid, rad, prec: self.prec }
    }

    /// Quotient, or `None` if the divisor ball contains zero.
    pub fn checked_div(&self, other: &Real) -> Option<Real> {
        if other.contains_zero() {
            return None;
        }
        let (a, b) = Self::aligned(self, other);
        let p = a.prec;
        let m2 = b.mid.magnitude();
        let (q, r) = (&a.mid << p).div_mod_floor(&b.mid);
        // |x/y - m1/m2| <= (r1|m2| + |m1|r2) / ((|m2| - r2)|m2|)
        let num = (&a.rad * m2 + a.mid.magnitude() * &b.rad) << p;
        let den = (m2 - &b.rad) * m2;
        let mut rad = ceil_div(&num, &den);
        if !r.is_zero() {
            rad += 1u32;
        }
        Some(Self { mid: q, rad, prec: p })
    }

    pub fn recip(&self) -> Option<Real> {
        Real::one(self.prec).checked_div(self)
    }

    pub fn pow(&self, mut k: u64) -> Real {
        let mut base = self.clone();
        let mut acc = Real::one(self.prec);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `base^(1/den)` for a positive integer base.
    pub fn integer_root(base: &BigUint, den: u32, prec: u32) -> Real {
        assert!(den >= 1 && !base.is_zero());
        let scaled = base << (prec as u64 * den as u64);
        let r = scaled.nth_root(den);
        // base^(1/den) * 2^prec lies in [r, r + 1).
        Real { mid: BigInt::from(r), rad: BigUint::one(), prec }
    }

    /// `base^exp` for a positive integer base and rational exponent.
    pub fn pow_rational(base: &BigUint, exp: &BigRational, prec: u32) -> Real {
        let floor = exp.floor().to_integer();
        let fracpart = exp - BigRational::from_integer(floor.clone());
        let guard = prec + 32 + bit_len(fracpart.denom().magnitude());
        let mut acc = if fracpart.is_zero() {
            Real::one(guard)
        } else {
            let den = fracpart.denom().to_u32().expect("exponent denominator fits u32");
            let num = fracpart.numer().to_u64().expect("fractional numerator fits u64");
            Real::integer_root(base, den, guard).pow(num)
        };
        let magnitude = floor.magnitude().to_usize().expect("exponent fits usize");
        let whole = BigInt::from(num_traits::pow(base.clone(), magnitude));
        acc = if floor.is_negative() {
            acc.div_int(&whole)
        } else {
            acc.mul_int(&whole)
        };
        acc.with_prec(prec)
    }

    /// Nearest integer to the midpoint and an upper bound for the distance
    /// from any point of the ball to that integer.
    pub fn nearest_integer(&self) -> (BigInt, BigRational) {
        let half = if self.prec == 0 { BigInt::zero() } else { BigInt::one() << (self.prec - 1) };
        let n = (&self.mid + half) >> self.prec;
        let diff = (&self.mid - (&n << self.prec)).abs();
        let residual = BigRational::new(diff + BigInt::from(self.rad.clone()), BigInt::one() << self.prec);
        (n, residual)
    }

    /// Decimal rendering of the midpoint with `digits` fractional digits.
    pub fn to_decimal(&self, digits: u32) -> String {
        let ten = BigInt::from(10u32);
        let scaled = &self.mid * num_traits::pow(ten, digits as usize);
        let half = if self.prec == 0 { BigInt::zero() } else { BigInt::one() << (self.prec - 1) };
        let n = (scaled + half) >> self.prec;
        let neg = n.is_negative();
        let s = n.magnitude().to_string();
        let d = digits as usize;
        let s = if s.len() <= d { format!("{}{}", "0".repeat(d + 1 - s.len()), s) } else { s };
        let (int_part, frac_part) = s.split_at(s.len() - d);
        let sign = if neg { "-" } else { "" };
        if d == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    }

    /// Scientific rendering with `sig` significant digits.
    pub fn to_scientific(&self, sig: usize) -> String {
        if self.mid.is_zero() {
            return "0".into();
        }
        let approx = self.to_f64();
        if approx.is_finite() && approx != 0.0 {
            return format!("{:.*e}", sig.saturating_sub(1), approx);
        }
        self.to_decimal(sig as u32)
    }

    /// `pi` by Machin's formula.
    pub fn pi(prec: u32) -> Real {
        let work = prec + 32;
        let (a, ea) = atan_inv(5, work);
        let (b, eb) = atan_inv(239, work);
        let mid = a * 16 - b * 4;
        let rad = BigUint::from(16 * ea + 4 * eb);
        Real { mid, rad, prec: work }.with_prec(prec)
    }

    /// `(cos 2 pi t, sin 2 pi t)` for rational `t`.
    pub fn cos_sin_two_pi(t: &BigRational, prec: u32) -> (Real, Real) {
        let t = t - t.round();
        if t.is_zero() {
            return (Real::one(prec), Real::zero(prec));
        }
        let work = prec + 40;
        let theta = Real::pi(work).mul_int(&BigInt::from(2)).mul_rational(&t);
        // |theta| <= pi < 3.2; stop once 3.2^j / j! < 2^-work.
        let mut log_term = 0.0f64;
        let mut j = 0u64;
        let target = -(work as f64) * std::f64::consts::LN_2;
        while log_term > target - 2.0 || j < 4 {
            j += 1;
            log_term += (3.2f64).ln() - (j as f64).ln();
        }
        let mut cos = Real::zero(work);
        let mut sin = Real::zero(work);
        let mut term = Real::one(work);
        for k in 0..j {
            match k % 4 {
                0 => cos = &cos + &term,
                1 => sin = &sin + &term,
                2 => cos = &cos - &term,
                _ => sin = &sin - &term,
            }
            term = (&term * &theta).div_int(&BigInt::from(k + 1));
        }
        let remainder = term.abs_upper();
        cos.add_error(&remainder);
        sin.add_error(&remainder);
        (cos.with_prec(prec), sin.with_prec(prec))
    }

    pub fn mul_rational(&self, r: &BigRational) -> Real {
        self.mul_int(r.numer()).div_int(r.denom())
    }
}

fn bit_len(x: &BigUint) -> u32 {
    x.bits() as u32
}

fn ceil_div(a: &BigUint, b: &BigUint) -> BigUint {
    let (q, r) = a.div_rem(b);
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

fn big_ratio_to_f64(mid: &BigInt, prec: u32) -> f64 {
    let bits = mid.bits() as i64;
    if bits <= 1000 {
        mid.to_f64().unwrap_or(f64::NAN) * (2f64).powi(-(prec as i32))
    } else {
        let shift = (bits - 60) as u32;
        let top = (mid >> shift).to_f64().unwrap_or(f64::NAN);
        top * (2f64).powf(shift as f64 - prec as f64)
    }
}

/// `atan(1/k) * 2^work` in fixed point, with an error bound in units.
fn atan_inv(k: u64, work: u32) -> (BigInt, u64) {
    let k2 = BigInt::from(k * k);
    let mut power = (BigInt::one() << work) / BigInt::from(k);
    let mut sum = BigInt::zero();
    let mut n = 0u64;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * n + 1);
        if n % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &k2;
        n += 1;
    }
    (sum, 3 * n + 2)
}

macro_rules! binop {
    ($tr:ident, $f:ident, $body:expr) => {
        impl<'a, 'b> $tr<&'b Real> for &'a Real {
            type Output = Real;
            fn $f(self, rhs: &'b Real) -> Real {
                let (a, b) = Real::aligned(self, rhs);
                $body(a, b)
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $f(self, rhs: Real) -> Real {
                (&self).$f(&rhs)
            }
        }
    };
}

binop!(Add, add, |a: Real, b: Real| Real {
    mid: a.mid + b.mid,
    rad: a.rad + b.rad,
    prec: a.prec
});
binop!(Sub, sub, |a: Real, b: Real| Real {
    mid: a.mid - b.mid,
    rad: a.rad + b.rad,
    prec: a.prec
});
binop!(Mul, mul, |a: Real, b: Real| {
    let p = a.prec;
    let mid = (&a.mid * &b.mid) >> p;
    let err = a.mid.magnitude() * &b.rad + b.mid.magnitude() * &a.rad + &a.rad * &b.rad;
    Real { mid, rad: ceil_shr(&err, p) + 1u32, prec: p }
});

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real { mid: -&self.mid, rad: self.rad.clone(), prec: self.prec }
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        -&self
    }
}

/// Complex ball as a pair of real balls.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        Self { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Self { re: Real::zero(prec), im: Real::zero(prec) }
    }

    pub fn one(prec: u32) -> Self {
        Self { re: Real::one(prec), im: Real::zero(prec) }
    }

    pub fn from_real(re: Real) -> Self {
        let p = re.prec();
        Self { re, im: Real::zero(p) }
    }

    /// `exp(2 pi i t)`.
    pub fn root_of_unity(t: &BigRational, prec: u32) -> Self {
        let (c, s) = Real::cos_sin_two_pi(t, prec);
        Self { re: c, im: s }
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im }
    }

    pub fn scale(&self, k: &Real) -> Self {
        Self { re: &self.re * k, im: &self.im * k }
    }

    pub fn div_int(&self, k: &BigInt) -> Self {
        Self { re: self.re.div_int(k), im: self.im.div_int(k) }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        Self { re: self.re.mul_int(k), im: self.im.mul_int(k) }
    }

    /// Upper bound on `|z|` via `|re| + |im|`.
    pub fn abs_upper(&self) -> BigRational {
        self.re.abs_upper() + self.im.abs_upper()
    }
}

impl Add<&Complex> for &Complex {
    type Output = Complex;
    fn add(self, rhs: &Complex) -> Complex {
        Complex { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub<&Complex> for &Complex {
    type Output = Complex;
    fn sub(self, rhs: &Complex) -> Complex {
        Complex { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul<&Complex> for &Complex {
    type Output = Complex;
    fn mul(self, rhs: &Complex) -> Complex {
        Complex {
            re: &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            im: &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational;

    const P: u32 = 200;

    fn close(x: &Real, v: f64, tol: f64) -> bool {
        (x.to_f64() - v).abs() < tol
    }

    #[test]
    fn ring_operations_enclose() {
        let third = Real::from_rational(&rational(1, 3), P);
        let one = &(&third + &third) + &third;
        assert!(one.lower() <= BigRational::one() && one.upper() >= BigRational::one());
        let x = third.checked_div(&Real::from_i64(7, P)).unwrap();
        let exact = rational(1, 21);
        assert!(x.lower() <= exact && x.upper() >= exact);
        assert!(x.radius() < rational(1, 1) / BigRational::from_integer(BigInt::one() << 190));
        assert!(Real::zero(P).checked_div(&Real::zero(P)).is_none());
    }

    #[test]
    fn pi_and_trig() {
        let pi = Real::pi(P);
        assert_eq!(pi.to_decimal(40), "3.1415926535897932384626433832795028841972");
        let (c, s) = Real::cos_sin_two_pi(&rational(1, 6), P);
        assert!(close(&c, 0.5, 1e-15) && close(&s, 3f64.sqrt() / 2.0, 1e-15));
        assert!(c.radius() < BigRational::new(BigInt::one(), BigInt::one() << 150));
        let (c, s) = Real::cos_sin_two_pi(&rational(3, 4), P);
        assert!(close(&c, 0.0, 1e-15) && close(&s, -1.0, 1e-15));
    }

    #[test]
    fn rational_powers() {
        let r = Real::pow_rational(&BigUint::from(2u32), &rational(-1, 24), P);
        assert!(r.to_decimal(6).starts_with("0.971532"));
        let r = Real::pow_rational(&BigUint::from(5u32), &rational(7, 2), P);
        assert!(close(&r, 5f64.powf(3.5), 1e-9));
        let exact = Real::pow_rational(&BigUint::from(3u32), &rational(4, 1), P);
        assert_eq!(exact.nearest_integer().0, BigInt::from(81));
        // sqrt(2)^2 encloses 2
        let s = Real::integer_root(&BigUint::from(2u32), 2, P);
        let two = &s * &s;
        assert!(two.lower() <= rational(2, 1) && two.upper() >= rational(2, 1));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(Real::from_rational(&rational(-1, 8), P).to_decimal(4), "-0.1250");
        assert_eq!(Real::from_i64(12, P).to_decimal(0), "12");
        let (n, res) = Real::from_rational(&rational(7, 2), P).nearest_integer();
        assert_eq!(n, BigInt::from(4));
        assert_eq!(res, rational(1, 2));
    }

    #[test]
    fn precision_change_is_outward() {
        let x = Real::from_rational(&rational(1, 3), P);
        let y = x.with_prec(40);
        let exact = rational(1, 3);
        assert!(y.lower() <= exact && y.upper() >= exact);
    }
}

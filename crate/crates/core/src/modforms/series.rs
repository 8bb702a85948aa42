//! Truncated Puiseux series in the nome `u` with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{lcm, rational_to_string};
use crate::error::{Error, Result};

/// `sum_e c_e u^{e/N} + O(u^T)`: every exponent below `T` is represented.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PuiseuxSeries {
    den: u64,
    terms: BTreeMap<i64, BigRational>,
    trunc: BigRational,
}

fn to_rational(e: i64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(e), BigInt::from(den))
}

impl PuiseuxSeries {
    pub fn zero(den: u64, trunc: BigRational) -> Self {
        Self { den, terms: BTreeMap::new(), trunc }
    }

    pub fn one(den: u64, trunc: BigRational) -> Self {
        Self::monomial(BigRational::one(), 0, den, trunc)
    }

    /// `c u^{e/den} + O(u^trunc)`; empty if `e/den >= trunc`.
    pub fn monomial(c: BigRational, e: i64, den: u64, trunc: BigRational) -> Self {
        let mut s = Self::zero(den, trunc);
        s.insert(e, c);
        s
    }

    /// Builds from `(numerator, coefficient)` pairs, dropping zeros and
    /// terms at or above the truncation.
    pub fn from_terms(den: u64, trunc: BigRational, terms: impl IntoIterator<Item = (i64, BigRational)>) -> Self {
        let mut s = Self::zero(den, trunc);
        let limit = s.limit();
        for (e, c) in terms {
            s.insert_below(e, c, limit);
        }
        s
    }

    /// Exclusive upper bound on stored numerators.
    fn limit(&self) -> i64 {
        let scaled = &self.trunc * BigRational::from_integer(BigInt::from(self.den));
        scaled.ceil().to_integer().try_into().unwrap_or(i64::MAX)
    }

    fn insert(&mut self, e: i64, c: BigRational) {
        let limit = self.limit();
        self.insert_below(e, c, limit);
    }

    fn insert_below(&mut self, e: i64, c: BigRational, limit: i64) {
        if c.is_zero() || e >= limit {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn trunc(&self) -> &BigRational {
        &self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as `(exponent, coefficient)` in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (BigRational, &BigRational)> + '_ {
        self.terms.iter().map(|(&e, c)| (to_rational(e, self.den), c))
    }

    /// Raw `(numerator over den, coefficient)` pairs.
    pub fn raw_terms(&self) -> impl Iterator<Item = (i64, &BigRational)> + '_ {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn coefficient(&self, exponent: &BigRational) -> BigRational {
        let scaled = exponent * BigRational::from_integer(BigInt::from(self.den));
        if !scaled.is_integer() {
            return BigRational::zero();
        }
        let e: i64 = scaled.to_integer().try_into().expect("exponent fits i64");
        self.terms.get(&e).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<BigRational> {
        self.terms.keys().next().map(|&e| to_rational(e, self.den))
    }

    pub fn leading(&self) -> Option<(BigRational, BigRational)> {
        self.terms.iter().next().map(|(&e, c)| (to_rational(e, self.den), c.clone()))
    }

    /// Same series over a multiple of the current denominator.
    pub fn with_den(&self, den: u64) -> Self {
        assert_eq!(den % self.den, 0, "new denominator must be a multiple");
        let f = (den / self.den) as i64;
        Self {
            den,
            terms: self.terms.iter().map(|(&e, c)| (e * f, c.clone())).collect(),
            trunc: self.trunc.clone(),
        }
    }

    /// Smallest denominator that still expresses every exponent.
    pub fn reduced(&self) -> Self {
        let g = self.terms.keys().fold(self.den as i64, |acc, &e| acc.gcd(&e));
        let g = g.unsigned_abs().max(1);
        Self {
            den: self.den / g,
            terms: self.terms.iter().map(|(&e, c)| (e / g as i64, c.clone())).collect(),
            trunc: self.trunc.clone(),
        }
    }

    /// Lowers the truncation bound, discarding terms at or above it.
    pub fn truncate(&self, trunc: &BigRational) -> Self {
        let trunc = trunc.min(&self.trunc).clone();
        let den = self.den;
        Self {
            den,
            terms: self
                .terms
                .iter()
                .filter(|(&e, _)| to_rational(e, den) < trunc)
                .map(|(&e, c)| (e, c.clone()))
                .collect(),
            trunc,
        }
    }

    /// Substitutes `u -> u^k`.
    pub fn substitute_power(&self, k: u64) -> Self {
        Self {
            den: self.den,
            terms: self.terms.iter().map(|(&e, c)| (e * k as i64, c.clone())).collect(),
            trunc: &self.trunc * BigRational::from_integer(BigInt::from(k)),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.den, self.trunc.clone());
        }
        Self {
            den: self.den,
            terms: self.terms.iter().map(|(&e, x)| (e, x * c)).collect(),
            trunc: self.trunc.clone(),
        }
    }

    /// Multiplies by `u^{shift}`.
    pub fn shift(&self, shift: &BigRational) -> Self {
        let den = lcm(self.den, shift.denom().try_into().expect("denominator fits u64"));
        let base = self.with_den(den);
        let s: i64 = (shift * BigRational::from_integer(BigInt::from(den)))
            .to_integer()
            .try_into()
            .expect("shift fits i64");
        Self {
            den,
            terms: base.terms.into_iter().map(|(e, c)| (e + s, c)).collect(),
            trunc: &self.trunc + shift,
        }
    }

    fn common(x: &Self, y: &Self) -> (Self, Self) {
        let den = lcm(x.den, y.den);
        (x.with_den(den), y.with_den(den))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (x, y) = Self::common(self, other);
        let trunc = x.trunc.clone().min(y.trunc.clone());
        let mut out = Self::zero(x.den, trunc);
        let limit = out.limit();
        for (e, c) in x.terms.into_iter().chain(y.terms) {
            out.insert_below(e, c, limit);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    /// Product; the result is known below
    /// `min(T_x + v(y), T_y + v(x))`.
    pub fn mul(&self, other: &Self) -> Self {
        let (x, y) = Self::common(self, other);
        let trunc = match (x.valuation(), y.valuation()) {
            (Some(vx), Some(vy)) => (&x.trunc + vy).min(&y.trunc + vx),
            (None, Some(vy)) => &x.trunc + vy,
            (Some(vx), None) => &y.trunc + vx,
            (None, None) => &x.trunc + &y.trunc,
        };
        let mut out = Self::zero(x.den, trunc);
        let limit = out.limit();
        for (&ex, cx) in &x.terms {
            for (&ey, cy) in &y.terms {
                if ex + ey >= limit {
                    break;
                }
                out.insert_below(ex + ey, cx * cy, limit);
            }
        }
        out
    }

    /// Reciprocal via the power-series recurrence after factoring out the
    /// leading term `c u^e`; known below `T - 2e`.
    pub fn recip(&self) -> Result<Self> {
        let (&e0, c0) = self.terms.iter().next().ok_or(Error::DivisionByZeroSeries)?;
        let c0inv = c0.recip();
        // normalized tail: b_t for t > 0 (numerators relative to e0)
        let tail: Vec<(i64, BigRational)> =
            self.terms.iter().skip(1).map(|(&e, c)| (e - e0, c * &c0inv)).collect();
        let e0r = to_rational(e0, self.den);
        let rel_trunc = &self.trunc - &e0r;
        let limit = (&rel_trunc * BigRational::from_integer(BigInt::from(self.den))).ceil().to_integer();
        let limit: i64 = limit.try_into().expect("truncation fits i64");
        let step = tail.iter().fold(0i64, |acc, (t, _)| acc.gcd(t)).max(1);
        let count = if limit <= 0 { 0 } else { ((limit - 1) / step + 1) as usize };
        let mut w: Vec<BigRational> = Vec::with_capacity(count);
        for idx in 0..count {
            let t = idx as i64 * step;
            if t == 0 {
                w.push(BigRational::one());
                continue;
            }
            let mut acc = BigRational::zero();
            for (tb, b) in &tail {
                if *tb > t {
                    break;
                }
                let j = ((t - tb) / step) as usize;
                if !w[j].is_zero() {
                    acc -= b * &w[j];
                }
            }
            w.push(acc);
        }
        let out_trunc = &rel_trunc - &e0r;
        let terms = w
            .into_iter()
            .enumerate()
            .map(|(idx, c)| (idx as i64 * step - e0, c * &c0inv));
        Ok(Self::from_terms(self.den, out_trunc, terms))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Largest coefficient magnitude among terms with exponent `>= from`.
    pub fn max_abs_coefficient_from(&self, from: &BigRational) -> BigRational {
        self.terms()
            .filter(|(e, _)| e >= from)
            .map(|(_, c)| c.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    /// One line per term: `e/N<TAB>coefficient`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (&e, c) in &self.terms {
            let _ = writeln!(out, "{}/{}\t{}", e, self.den, rational_to_string(c));
        }
        out
    }
}

/// `eta(l z) = u^{l/24} prod_{j >= 1} (1 - u^{l j})` below `u^trunc`, from
/// the pentagonal number theorem.
pub fn eta_series(l: u64, trunc: &BigRational) -> PuiseuxSeries {
    let den = 24u64;
    let l = l as i64;
    let mut terms = Vec::new();
    let limit = trunc * BigRational::from_integer(BigInt::from(den));
    let fits = |p: i64| BigRational::from_integer(BigInt::from(l + 24 * l * p)) < limit;
    let mut k = 0i64;
    loop {
        let mut any = false;
        for kk in if k == 0 { vec![0] } else { vec![k, -k] } {
            let p = kk * (3 * kk - 1) / 2;
            if fits(p) {
                any = true;
                let sign = if kk.rem_euclid(2) == 0 { 1 } else { -1 };
                terms.push((l + 24 * l * p, BigRational::from_integer(BigInt::from(sign))));
            }
        }
        if !any && k > 0 {
            break;
        }
        if k == 0 && !fits(0) {
            break;
        }
        k += 1;
    }
    PuiseuxSeries::from_terms(den, trunc.clone(), terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational;

    fn int_coeffs(s: &PuiseuxSeries, offset: BigRational) -> Vec<(BigRational, BigRational)> {
        s.terms().map(|(e, c)| (e - &offset, c.clone())).collect()
    }

    /// Direct product expansion of prod_{j>=1} (1 - x^j) up to x^{m-1}.
    fn euler_product(m: usize) -> Vec<i64> {
        let mut p = vec![0i64; m];
        p[0] = 1;
        for j in 1..m {
            for e in (j..m).rev() {
                p[e] -= p[e - j];
            }
        }
        p
    }

    #[test]
    fn eta_matches_product_expansion() {
        let s = eta_series(1, &rational(10, 1));
        let expect = euler_product(10);
        let got = int_coeffs(&s, rational(1, 24));
        let nonzero: Vec<(BigRational, BigRational)> = expect
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(e, &c)| (rational(e as i64, 1), rational(c, 1)))
            .collect();
        assert_eq!(got, nonzero);
        let s2 = eta_series(2, &rational(5, 1));
        let got = int_coeffs(&s2, rational(1, 12));
        assert_eq!(got, vec![(rational(0, 1), rational(1, 1)), (rational(2, 1), rational(-1, 1)), (rational(4, 1), rational(-1, 1))]);
        let lead = eta_series(3, &(rational(3, 24) + rational(1, 1000)));
        assert_eq!(lead.len(), 1);
    }

    #[test]
    fn ring_operations() {
        let t = rational(12, 1);
        let x = eta_series(1, &t);
        assert_eq!(x.mul(&PuiseuxSeries::one(1, t.clone())), x);
        let q = x.div(&x).unwrap();
        assert_eq!(q, PuiseuxSeries::one(24, t.clone() - rational(1, 24)));
        let one_minus_u = PuiseuxSeries::from_terms(1, t.clone(), [(0, rational(1, 1)), (1, rational(-1, 1))]);
        let geo = one_minus_u.recip().unwrap();
        assert!(geo.raw_terms().all(|(_, c)| *c == rational(1, 1)));
        assert_eq!(geo.len(), 12);
        assert_eq!(one_minus_u.mul(&geo), PuiseuxSeries::one(1, t));
        assert!(PuiseuxSeries::zero(1, rational(3, 1)).recip().is_err());
    }

    #[test]
    fn recip_of_eta_counts_partitions() {
        let inv = eta_series(1, &rational(30, 1)).recip().unwrap();
        // 1/prod(1-u^j) generates p(n); leading u^{-1/24}
        let p: Vec<i64> = vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
        for (n, &pn) in p.iter().enumerate() {
            let e = rational(n as i64, 1) - rational(1, 24);
            assert_eq!(inv.coefficient(&e), rational(pn, 1));
        }
        assert!(inv.trunc() < &rational(30, 1));
    }

    #[test]
    fn dump_and_reduce() {
        let s = PuiseuxSeries::from_terms(48, rational(5, 1), [(2, rational(1, 1)), (-4, rational(3, 2))]);
        assert_eq!(s.dump(), "-4/48\t3/2\n2/48\t1\n");
        assert_eq!(s.reduced().den(), 24);
        let shifted = s.shift(&rational(1, 3));
        assert_eq!(shifted.valuation(), Some(rational(-1, 12) + rational(1, 3)));
    }
}

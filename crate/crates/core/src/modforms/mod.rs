//! Eta quotients, lattice theta series and the asymptotic predictions for
//! torsion counts built from them.
//!
//! For a period `a`, the count `j_{q,n,k}(a)` is approximated by
//! `f_n(1/q) q^{(1-a)/24} q^{(1-1/a) n^2}` with
//! `f_n = eta(z) theta_{lambda'_n}(z) / prod_s eta(l_s z)`. Predictions are
//! returned as a mantissa together with the exact rational exponent of `q`,
//! since `q^{n^2}` is far outside any floating-point range.

pub mod lattice;
pub mod series;
pub mod theta;

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::primes::FieldParameter;
use crate::arith::real::bits_for_digits;
use crate::arith::{rational_to_string, Real};
use crate::error::{Error, Result};
use crate::signature::FuchsianSignature;
use crate::torsion::{orbit_structure, sigma_set};

pub use lattice::{build_coset, CongruenceLattice, ShiftedCoset};
pub use series::{eta_series, PuiseuxSeries};
pub use theta::theta_series;

pub const DEFAULT_TRUNC: u64 = 200;
pub const DEFAULT_DIGITS: u32 = 50;

/// `f_n = eta(z) theta(z) / prod_s eta(l_s z)` for the coset of
/// determinant exponent `k`.
pub fn f_n_series(a: u64, field: &FieldParameter, n: u64, k: u64, trunc: &BigRational) -> Result<PuiseuxSeries> {
    let coset = build_coset(a, field, n, k)?;
    f_n_from_coset(&coset, trunc)
}

pub fn f_n_from_coset(coset: &ShiftedCoset, trunc: &BigRational) -> Result<PuiseuxSeries> {
    let th = theta_series(coset, trunc)?;
    let mut den = PuiseuxSeries::one(1, trunc.clone());
    for &l in &coset.lattice.orbits.lengths {
        den = den.mul(&eta_series(l, trunc));
    }
    let f = eta_series(1, trunc).mul(&th).div(&den)?.reduced();
    if !f.is_integral() {
        return Err(Error::AssertionFailure("f_n has a non-integral coefficient".into()));
    }
    Ok(f)
}

/// A series evaluated at `u = 1/q`.
#[derive(Clone, Debug)]
pub struct NomeValue {
    pub value: Real,
    /// Heuristic size of the discarded terms `u^e`, `e >= trunc`.
    pub tail_estimate: f64,
}

/// `sum_e c_e q^{-e}`, with rounding tracked in the ball radius and a
/// geometric estimate of the truncation tail.
pub fn evaluate_at_nome(s: &PuiseuxSeries, q: u64, digits: u32) -> Result<NomeValue> {
    if q < 2 {
        return Err(Error::DomainError(format!("nome 1/{q} needs q >= 2")));
    }
    let s = s.reduced();
    let prec = bits_for_digits(digits) + 64;
    let qb = BigUint::from(q);
    let den = s.den();
    let mut value = Real::zero(prec);
    let mut first: Option<i64> = None;
    let mut prev = 0i64;
    let step = Real::pow_rational(&qb, &BigRational::new(BigInt::from(-1), BigInt::from(den)), prec);
    let mut power = Real::one(prec);
    for (e, c) in s.raw_terms() {
        match first {
            None => {
                first = Some(e);
            }
            Some(_) => {
                power = &power * &step.pow((e - prev) as u64);
            }
        }
        prev = e;
        value = &value + &power.mul_rational(c);
    }
    if let Some(e0) = first {
        let base = Real::pow_rational(&qb, &BigRational::new(BigInt::from(-e0), BigInt::from(den)), prec);
        value = &value * &base;
    }
    let tail_estimate = tail_estimate(&s, q);
    let size = value.to_f64().abs().max(1.0);
    let requested = 10f64.powi(-(digits as i32));
    if tail_estimate > requested * size {
        return Err(Error::PrecisionUnachievable {
            estimate: format!("{tail_estimate:.3e}"),
            requested: format!("{requested:.0e}"),
        });
    }
    Ok(NomeValue { value: value.with_prec(bits_for_digits(digits)), tail_estimate })
}

/// Largest coefficient in the last quarter of the retained range times
/// `q^{-T}`, summed as a geometric series in the exponent step.
fn tail_estimate(s: &PuiseuxSeries, q: u64) -> f64 {
    let Some(v) = s.valuation() else {
        return 0.0;
    };
    let t = s.trunc().clone();
    let from = &v + (&t - &v) * BigRational::new(3.into(), 4.into());
    let c = s.max_abs_coefficient_from(&from);
    let c = if c.is_zero() { BigRational::one() } else { c };
    let log_c = big_log10(&c);
    let lq = (q as f64).log10();
    let step = 1.0 / s.den() as f64;
    let ratio = 1.0 - (q as f64).powf(-step);
    let log_tail = log_c - lattice::to_f64(&t) * lq - ratio.log10();
    10f64.powf(log_tail)
}

fn big_log10(x: &BigRational) -> f64 {
    let n = x.numer().abs();
    let d = x.denom();
    let lg = |v: &BigInt| {
        let bits = v.bits() as i64;
        if bits < 1000 {
            v.to_f64().unwrap().log10()
        } else {
            let shift = (bits - 64) as u32;
            (v >> shift).to_f64().unwrap().log10() + shift as f64 * std::f64::consts::LOG10_2
        }
    };
    lg(&n) - lg(d)
}

/// `value = mantissa * q^exponent`.
#[derive(Clone, Debug)]
pub struct Prediction {
    pub mantissa: Real,
    pub exponent: BigRational,
    pub tail_estimate: f64,
    /// The determinant coset was empty, so the prediction is exactly zero.
    pub empty: bool,
}

impl Prediction {
    /// `exact / (mantissa q^exponent)`, evaluated without forming
    /// `q^exponent` in fixed point.
    pub fn ratio_to(&self, exact: &BigUint, q: u64) -> Option<Real> {
        let prec = self.mantissa.prec();
        let fl = self.exponent.floor().to_integer();
        let fr = &self.exponent - BigRational::from_integer(fl.clone());
        let qb = BigUint::from(q);
        let qpow = BigInt::from(num_traits::pow(qb.clone(), fl.magnitude().to_usize()?));
        let scaled = if fl.is_negative() {
            Real::from_int(&(BigInt::from(exact.clone()) * qpow), prec)
        } else {
            Real::from_ratio(&BigInt::from(exact.clone()), &qpow, prec)
        };
        let frac_pow = Real::pow_rational(&qb, &-fr, prec);
        (&scaled * &frac_pow).checked_div(&self.mantissa)
    }

    pub fn to_report(&self) -> PredictionReport {
        PredictionReport {
            mantissa: self.mantissa.to_decimal(((self.mantissa.prec().saturating_sub(32)) as f64 / 3.33) as u32),
            exponent: rational_to_string(&self.exponent),
            tail_estimate: self.tail_estimate,
            empty: self.empty,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PredictionReport {
    pub mantissa: String,
    pub exponent: String,
    pub tail_estimate: f64,
    pub empty: bool,
}

fn j_exponent(a: u64, n: u64) -> BigRational {
    let n2 = BigRational::from_integer(BigInt::from(n * n));
    BigRational::new(BigInt::from(1 - a as i64), BigInt::from(24))
        + (BigRational::one() - BigRational::new(BigInt::one(), BigInt::from(a))) * n2
}

/// `f_n(1/q)` for one determinant exponent, `None` for an empty coset.
fn f_n_value(a: u64, field: &FieldParameter, n: u64, k: u64, trunc: &BigRational, digits: u32) -> Result<Option<NomeValue>> {
    let coset = build_coset(a, field, n, k)?;
    if coset.is_empty() {
        return Ok(None);
    }
    let f = f_n_from_coset(&coset, trunc)?;
    evaluate_at_nome(&f, field.q, digits).map(Some)
}

/// Prediction for `j_{q,n,k}(a)`.
pub fn predict_j(a: u64, field: &FieldParameter, n: u64, k: u64, trunc: &BigRational, digits: u32) -> Result<Prediction> {
    orbit_structure(a, field)?;
    let prec = bits_for_digits(digits);
    let exponent = j_exponent(a, n);
    Ok(match f_n_value(a, field, n, k, trunc, digits)? {
        None => Prediction { mantissa: Real::zero(prec), exponent, tail_estimate: 0.0, empty: true },
        Some(v) => Prediction { mantissa: v.value, exponent, tail_estimate: v.tail_estimate, empty: false },
    })
}

/// Prediction for `J_{q,n}(a_1, ..., a_r)`: the per-factor mantissas summed
/// over determinant tuples with product one, with the global exponent
/// `(r - sum a_i)/24 + (r - sum 1/a_i) n^2`.
pub fn predict_tuples(periods: &[u64], field: &FieldParameter, n: u64, trunc: &BigRational, digits: u32) -> Result<Prediction> {
    let prec = bits_for_digits(digits);
    if periods.is_empty() {
        return Ok(Prediction { mantissa: Real::one(prec), exponent: BigRational::zero(), tail_estimate: 0.0, empty: false });
    }
    for &a in periods {
        field.require_coprime("tuple prediction", a)?;
    }
    let mut distinct: Vec<u64> = periods.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let jobs: Vec<(u64, u64)> = distinct.iter().flat_map(|&a| (0..a).map(move |k| (a, k))).collect();
    let values: Vec<((u64, u64), Option<NomeValue>)> = jobs
        .par_iter()
        .map(|&(a, k)| f_n_value(a, field, n, k, trunc, digits).map(|v| ((a, k), v)))
        .collect::<Result<_>>()?;
    let table: HashMap<(u64, u64), Option<NomeValue>> = values.into_iter().collect();
    let mut mantissa = Real::zero(prec);
    let mut tail: f64 = 0.0;
    let mut empty = true;
    for ks in sigma_set(periods) {
        let mut term = Real::one(prec);
        let mut zero = false;
        for (&a, &k) in periods.iter().zip(&ks) {
            match &table[&(a, k)] {
                None => {
                    zero = true;
                    break;
                }
                Some(v) => {
                    term = &term * &v.value;
                    tail = tail.max(v.tail_estimate);
                }
            }
        }
        if !zero {
            mantissa = &mantissa + &term;
            empty = false;
        }
    }
    let r = periods.len() as i64;
    let sum_a: u64 = periods.iter().sum();
    let mut exponent = BigRational::new(BigInt::from(r - sum_a as i64), BigInt::from(24));
    let mut coeff = BigRational::from_integer(BigInt::from(r));
    for &a in periods {
        coeff -= BigRational::new(BigInt::one(), BigInt::from(a));
    }
    exponent += coeff * BigRational::from_integer(BigInt::from(n * n));
    Ok(Prediction { mantissa, exponent, tail_estimate: tail, empty })
}

/// Prediction for `|Hom(Gamma, GL_n(q))|` as
/// `(q - 1) J_{q,n} |GL_n(q)|^{2g-1}`, plus the normalization
/// `c_{q,n} q^{(1 - chi) n^2}` and `c_{q,n} = (q - 1) q^e f(1/q)`.
#[derive(Clone, Debug)]
pub struct HomPrediction {
    pub prediction: Prediction,
    /// `c_{q,n}`.
    pub c: Real,
    /// `e = (r - sum a_i + 2g - 1)/24`.
    pub e: BigRational,
    /// `f(1/q) = c / ((q - 1) q^e)`.
    pub f_value: Real,
    pub excluded: bool,
}

pub fn predict_hom_count(sig: &FuchsianSignature, field: &FieldParameter, n: u64, trunc: &BigRational, digits: u32) -> Result<HomPrediction> {
    if !sig.is_hyperbolic() {
        return Err(Error::DomainError(format!("signature {sig} is not hyperbolic")));
    }
    let q = field.q;
    let qb = BigUint::from(q);
    let jp = predict_tuples(sig.periods(), field, n, trunc, digits)?;
    let prec = jp.mantissa.prec();
    // prod_{j<=n} (1 - q^{-j}) exactly
    let mut p = BigRational::one();
    for j in 1..=n {
        let qj = BigInt::from(num_traits::pow(qb.clone(), j as usize));
        p *= BigRational::new(&qj - 1, qj);
    }
    let power = 2 * sig.genus() as i64 - 1;
    let p_pow = if power >= 0 { num_traits::pow(p, power as usize) } else { p.recip() };
    let mantissa = jp.mantissa.mul_rational(&(p_pow * BigRational::from_integer(BigInt::from(q - 1))));
    let exponent = &jp.exponent + BigRational::from_integer(BigInt::from(power * (n * n) as i64));
    let r = sig.r() as i64;
    let sum_a: i64 = sig.periods().iter().map(|&a| a as i64).sum();
    let shift = BigRational::new(BigInt::from(r - sum_a), BigInt::from(24));
    let c = &mantissa * &Real::pow_rational(&qb, &shift, prec);
    let e = BigRational::new(BigInt::from(r - sum_a + power), BigInt::from(24));
    let denom = Real::pow_rational(&qb, &e, prec).mul_int(&BigInt::from(q - 1));
    let f_value = c.checked_div(&denom).expect("q^e (q - 1) is positive");
    Ok(HomPrediction {
        prediction: Prediction { mantissa, exponent, tail_estimate: jp.tail_estimate, empty: jp.empty },
        c,
        e,
        f_value,
        excluded: sig.is_on_excluded_list(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational;
    use crate::torsion::{count_torsion, count_tuples, gl_order};

    fn fp(q: u64) -> FieldParameter {
        FieldParameter::new(q).unwrap()
    }

    #[test]
    fn trivial_period_gives_one() {
        let f = f_n_series(1, &fp(5), 4, 0, &rational(60, 1)).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.coefficient(&rational(0, 1)), rational(1, 1));
        let p = predict_j(1, &fp(5), 4, 0, &rational(60, 1), 30).unwrap();
        assert_eq!(p.exponent, rational(0, 1));
        assert!((p.mantissa.to_f64() - 1.0).abs() < 1e-25);
    }

    #[test]
    fn leading_term_for_involutions() {
        let f = f_n_series(2, &fp(5), 4, 0, &rational(20, 1)).unwrap();
        let (e, c) = f.leading().unwrap();
        assert_eq!(e, rational(-1, 24));
        assert_eq!(c, rational(1, 1));
    }

    #[test]
    fn f_n_is_periodic() {
        let t = rational(25, 1);
        for (a, q, k) in [(2u64, 5u64, 1u64), (3, 7, 0), (4, 5, 0)] {
            for n in [1u64, 2, 3] {
                let x = f_n_series(a, &fp(q), n, k, &t).unwrap();
                let y = f_n_series(a, &fp(q), n + 2 * a, k, &t).unwrap();
                assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn nome_evaluation() {
        let s = eta_series(1, &rational(40, 1)).shift(&rational(-1, 24));
        let v = evaluate_at_nome(&s, 4, 12).unwrap();
        assert!((v.value.to_f64() - 0.688537537).abs() < 1e-6, "{}", v.value.to_f64());
        let one = PuiseuxSeries::one(1, rational(40, 1));
        assert_eq!(evaluate_at_nome(&one, 7, 20).unwrap().value.to_decimal(20), "1.00000000000000000000");
        let root = PuiseuxSeries::monomial(rational(1, 1), 1, 24, rational(80, 1));
        assert!(evaluate_at_nome(&root, 2, 20).unwrap().value.to_decimal(6).starts_with("0.971532"));
        let short = eta_series(1, &rational(3, 1));
        assert!(matches!(evaluate_at_nome(&short, 2, 50), Err(Error::PrecisionUnachievable { .. })));
    }

    #[test]
    fn doubling_truncation_stays_within_tail() {
        let f1 = f_n_series(3, &fp(7), 5, 1, &rational(40, 1)).unwrap();
        let f2 = f_n_series(3, &fp(7), 5, 1, &rational(80, 1)).unwrap();
        let v1 = evaluate_at_nome(&f1, 7, 20).unwrap();
        let v2 = evaluate_at_nome(&f2, 7, 20).unwrap();
        let diff = (&v1.value - &v2.value).abs_upper();
        assert!(crate::modforms::lattice::to_f64(&diff) <= v1.tail_estimate.max(1e-20));
    }

    #[test]
    fn prediction_tracks_exact_counts() {
        let t = rational(DEFAULT_TRUNC as i64, 1);
        let f = fp(5);
        let exact = count_torsion(2, &f, 12, 0).unwrap();
        let p = predict_j(2, &f, 12, 0, &t, 30).unwrap();
        let ratio = p.ratio_to(&exact, 5).unwrap().to_f64();
        assert!((ratio - 1.0).abs() < 1e-3, "ratio {ratio}");
        let empty = predict_j(4, &fp(3), 6, 1, &t, 30).unwrap();
        assert!(empty.empty && empty.mantissa.to_f64() == 0.0);
        let exact = count_tuples(&[2, 2], &f, 8).unwrap();
        let p = predict_tuples(&[2, 2], &f, 8, &t, 30).unwrap();
        let ratio = p.ratio_to(&exact, 5).unwrap().to_f64();
        assert!((ratio - 1.0).abs() < 1e-2, "ratio {ratio}");
    }

    #[test]
    fn gl_order_matches_eta_product() {
        let q = 3u64;
        let n = 6u64;
        let s = eta_series(1, &rational(100, 1));
        let eta = evaluate_at_nome(&s, q, 30).unwrap().value;
        // q^{n^2 + 1/24} eta(1/q) = q^{n^2} prod_{j>=1} (1 - q^{-j})
        let lhs = &eta * &Real::pow_rational(&BigUint::from(q), &rational(1, 24), eta.prec());
        let mut tail = BigRational::one();
        for j in n + 1..=150 {
            let qj = BigInt::from(q).pow(j as u32);
            tail *= BigRational::new(&qj - 1, qj);
        }
        let gl = gl_order(n, q);
        let scaled = BigRational::new(BigInt::from(gl), BigInt::from(q).pow((n * n) as u32)) * tail;
        let diff = &lhs - &Real::from_rational(&scaled, lhs.prec());
        assert!(diff.abs_upper() < rational(1, 10).pow(25));
    }

    #[test]
    fn hom_prediction_exponents() {
        let sig: FuchsianSignature = "0;2,3,7".parse().unwrap();
        let hp = predict_hom_count(&sig, &fp(13), 6, &rational(120, 1), 30).unwrap();
        assert_eq!(hp.prediction.exponent, rational(2043, 56));
        assert!(hp.excluded);
        assert!(hp.prediction.mantissa.to_f64() > 0.0);
        let surface: FuchsianSignature = "2;".parse().unwrap();
        let hp = predict_hom_count(&surface, &fp(3), 5, &rational(50, 1), 30).unwrap();
        assert_eq!(hp.prediction.exponent, rational(75, 1));
        assert_eq!(hp.e, rational(3, 24));
        let exact = BigUint::from(2u32) * num_traits::pow(gl_order(5, 3), 3);
        let ratio = hp.prediction.ratio_to(&exact, 3).unwrap().to_f64();
        assert!((ratio - 1.0).abs() < 1e-20);
    }
}

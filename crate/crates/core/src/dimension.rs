//! Centralizer-dimension minimization, the dimension of representation
//! varieties, `alpha(L)` for split Levi subgroups, and the closed-form
//! character bounds.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::primes::FieldParameter;
use crate::arith::real::bits_for_digits;
use crate::arith::{frac, lcm_all, log2_big, rational, Real};
use crate::error::{Error, Result};
use crate::signature::FuchsianSignature;
use crate::torsion::{count_tuples_big, MultiplicityVector};

/// Partition search cap for `alpha_levi`.
pub const ALPHA_CAP: u64 = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DetConstraint {
    Any,
    Plus,
    Minus,
    /// `det = zeta_a^k`.
    Exponent(u64),
}

impl DetConstraint {
    fn target(self, a: u64) -> Result<Option<u64>> {
        match self {
            DetConstraint::Any => Ok(None),
            DetConstraint::Plus => Ok(Some(0)),
            DetConstraint::Minus if a % 2 == 0 => Ok(Some(a / 2)),
            DetConstraint::Minus => Err(Error::InfeasibleConstraint(format!("-1 is not an {a}-th root of unity"))),
            DetConstraint::Exponent(k) => Ok(Some(k % a)),
        }
    }
}

/// A minimizer of `sum m_i^2` over multiplicity vectors of order `a`
/// elements of `GL_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentralizerProfile {
    pub n: u64,
    pub a: u64,
    /// `m_i` is the multiplicity of `zeta_a^i`, `i = 1..a`.
    pub witness: Vec<u64>,
    pub dimension: u64,
    pub det_exponent: u64,
}

/// `n^2/a + a {n/a} {-n/a}`, asserted integral.
pub fn min_centralizer_formula(n: u64, a: u64) -> u64 {
    let x = rational(n as i64, a as i64);
    let neg = -x.clone();
    let a_r = BigRational::from_integer(BigInt::from(a));
    let v = &x * &x * &a_r + &a_r * frac(&x) * frac(&neg);
    assert!(v.is_integer(), "centralizer formula not integral for n={n} a={a}");
    v.to_integer().to_u64().expect("dimension fits u64")
}

/// Exponent `k` with `det = zeta_a^k` when every multiplicity equals `n/a`.
fn forced_exponent(n: u64, a: u64) -> u64 {
    if a % 2 == 0 && (n / a) % 2 == 1 {
        a / 2
    } else {
        0
    }
}

pub fn min_centralizer_dim(n: u64, a: u64, det: DetConstraint) -> Result<CentralizerProfile> {
    if a < 2 || n == 0 {
        return Err(Error::DomainError(format!("need a >= 2 and n >= 1, got a={a} n={n}")));
    }
    let target = det.target(a)?;
    let (b, c) = (n / a, n % a);
    let mut m = vec![b; a as usize];
    if c == 0 {
        let forced = forced_exponent(n, a);
        if let Some(t) = target.filter(|&t| t != forced) {
            // eps_{delta} = +1, eps_a = -1 shifts the exponent by delta.
            let delta = (t + a - forced) % a;
            m[delta as usize - 1] += 1;
            m[a as usize - 1] -= 1;
        }
    } else {
        // c indices get b + 1; with S a c-subset of {0, ..., a-1} placed at
        // eigenvalue exponents s + 1 the determinant exponent is
        // b a (a + 1) / 2 + c + sum S.
        let lo = c * (c - 1) / 2;
        let extra = match target {
            None => 0,
            Some(t) => {
                let base = (b % a) * ((a * (a + 1) / 2) % a) + c + lo;
                let need = (t + a * a - base % a) % a;
                debug_assert!(need <= c * (a - c));
                need
            }
        };
        let mut remaining = extra;
        for j in (0..c).rev() {
            let d = remaining.min(a - c);
            remaining -= d;
            m[(j + d) as usize] += 1;
        }
    }
    let v = MultiplicityVector { m };
    let dimension = v.m.iter().map(|x| x * x).sum();
    let det_exponent = v.det_exponent();
    let base = min_centralizer_formula(n, a);
    let expected = match target {
        Some(t) if c == 0 && t != forced_exponent(n, a) => base + 2,
        _ => base,
    };
    if dimension != expected || target.is_some_and(|t| t != det_exponent) {
        return Err(Error::AssertionFailure(format!(
            "witness {:?} has dimension {dimension}, det exponent {det_exponent}; expected {expected}",
            v.m
        )));
    }
    Ok(CentralizerProfile { n, a, witness: v.m, dimension, det_exponent })
}

/// Minimum total centralizer dimension of a torsion tuple with determinant
/// product 1, with one witness per period.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimalTuple {
    pub min_sum: u64,
    pub sigma: i64,
    pub witnesses: Vec<Vec<u64>>,
}

pub fn optimal_tuple(sig: &FuchsianSignature, n: u64) -> Result<OptimalTuple> {
    let periods = sig.periods();
    if periods.is_empty() {
        return Err(Error::DomainError("optimal tuple needs at least one period".into()));
    }
    if n == 0 {
        return Err(Error::DomainError("n must be positive".into()));
    }
    let big_a = lcm_all(periods);
    let forced_total: u64 =
        periods.iter().filter(|&&a| n % a == 0).map(|&a| forced_exponent(n, a) * (big_a / a)).sum::<u64>() % big_a;
    let mut dets: Vec<DetConstraint> = periods
        .iter()
        .map(|&a| if n % a == 0 { DetConstraint::Any } else { DetConstraint::Exponent(0) })
        .collect();
    if forced_total != 0 {
        // forced_total = A/2: absorb it in a free even period or pay 2 on a
        // forced one.
        if let Some(i) = periods.iter().position(|&a| n % a != 0 && a % 2 == 0) {
            dets[i] = DetConstraint::Minus;
        } else {
            let i = periods
                .iter()
                .position(|&a| n % a == 0 && forced_exponent(n, a) != 0)
                .expect("nonzero forced determinant has an even source");
            dets[i] = DetConstraint::Plus;
        }
    }
    let profiles: Vec<CentralizerProfile> =
        periods.iter().zip(&dets).map(|(&a, &d)| min_centralizer_dim(n, a, d)).collect::<Result<_>>()?;
    let total_exp: u64 = profiles.iter().map(|p| p.det_exponent * (big_a / p.a)).sum::<u64>() % big_a;
    let min_sum: u64 = profiles.iter().map(|p| p.dimension).sum();
    let sigma = sig.sigma(n);
    let closed: u64 = periods.iter().map(|&a| min_centralizer_formula(n, a)).sum::<u64>();
    let closed = (closed as i64 + 1 - sigma) as u64;
    if total_exp != 0 || min_sum != closed {
        return Err(Error::AssertionFailure(format!(
            "optimal tuple for {sig} n={n}: witness sum {min_sum}, closed form {closed}, det residue {total_exp}"
        )));
    }
    Ok(OptimalTuple { min_sum, sigma, witnesses: profiles.into_iter().map(|p| p.witness).collect() })
}

/// `1 - sigma + sum_i (n^2/a_i + a_i {n/a_i} {-n/a_i})`.
pub fn optimal_tuple_min_sum(sig: &FuchsianSignature, n: u64) -> Result<u64> {
    Ok(optimal_tuple(sig, n)?.min_sum)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomDimension {
    pub signature: String,
    pub n: u64,
    pub dimension: i64,
    pub sigma: i64,
    /// `-1/2 + (1 - chi) n^2 - sum a_i / 4`.
    #[serde(with = "crate::arith::rational_str")]
    pub lower_bound: BigRational,
    pub excluded: bool,
    /// `n < 2A`: the formula is only guaranteed for large `n`.
    pub small_n: bool,
}

/// `sigma + (1 - chi) n^2 - sum_i a_i {n/a_i} {-n/a_i}`.
pub fn hom_variety_dim(sig: &FuchsianSignature, n: u64) -> Result<HomDimension> {
    if !sig.is_hyperbolic() {
        return Err(Error::DomainError(format!("{sig} is not hyperbolic")));
    }
    let n2 = BigRational::from_integer(BigInt::from(n * n));
    let main = (BigRational::one() - sig.euler_characteristic()) * &n2;
    let mut value = main.clone() + BigRational::from_integer(BigInt::from(sig.sigma(n)));
    let mut lower = main - rational(1, 2);
    for &a in sig.periods() {
        let x = rational(n as i64, a as i64);
        let neg = -x.clone();
        value -= BigRational::from_integer(BigInt::from(a)) * frac(&x) * frac(&neg);
        lower -= rational(a as i64, 4);
    }
    if !value.is_integer() {
        return Err(Error::AssertionFailure(format!("dimension {value} is not an integer")));
    }
    Ok(HomDimension {
        signature: sig.to_string(),
        n,
        dimension: value.to_integer().to_i64().expect("dimension fits i64"),
        sigma: sig.sigma(n),
        lower_bound: lower,
        excluded: sig.is_on_excluded_list(),
        small_n: n < 2 * sig.period_lcm(),
    })
}

/// `1 + (2g - 1) n^2 + log_{q^m} J_{q^m,n}` for `m = 1..=m_max`.
pub fn dimension_from_counts(sig: &FuchsianSignature, field: &FieldParameter, n: u64, m_max: u32) -> Result<Vec<f64>> {
    for &a in sig.periods() {
        field.require_coprime("dimension from counts", a)?;
    }
    let base = 1.0 + (2.0 * sig.genus() as f64 - 1.0) * (n * n) as f64;
    let log2_q = (field.q as f64).log2();
    (1..=m_max)
        .map(|m| {
            let qm = BigUint::from(field.q).pow(m);
            let j = count_tuples_big(sig.periods(), &qm, n)?;
            Ok(base + log2_big(&j) / (m as f64 * log2_q))
        })
        .collect()
}

/// Block sizes `m_1, ..., m_t` of `GL_{m_1} x ... x GL_{m_t}` in `GL_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeviShape {
    blocks: Vec<u64>,
}

impl LeviShape {
    pub fn new(blocks: Vec<u64>) -> Result<Self> {
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(Error::DomainError(format!("block sizes must be positive, got {blocks:?}")));
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }

    pub fn n(&self) -> u64 {
        self.blocks.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaResult {
    #[serde(with = "crate::arith::rational_str")]
    pub alpha: BigRational,
    /// One Jordan type per block; empty for a torus.
    pub witness: Vec<Vec<u64>>,
}

/// Partitions of `m` in decreasing lexicographic order.
pub fn partitions(m: u64) -> Vec<Vec<u64>> {
    fn rec(rest: u64, max: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            rec(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, m, &mut Vec::new(), &mut out);
    out
}

pub fn conjugate(lambda: &[u64]) -> Vec<u64> {
    let width = lambda.first().copied().unwrap_or(0);
    (1..=width).map(|j| lambda.iter().filter(|&&p| p >= j).count() as u64).collect()
}

/// Max over non-identity unipotent classes of `dim u^L / dim u^G`.
pub fn alpha_levi(shape: &LeviShape) -> Result<AlphaResult> {
    let n = shape.n();
    if n > ALPHA_CAP {
        return Err(Error::CapExceeded { what: "alpha_levi rank", size: n.to_string(), cap: ALPHA_CAP.to_string() });
    }
    let mut tables: HashMap<u64, Vec<(Vec<u64>, Vec<u64>, u64)>> = HashMap::new();
    for &m in shape.blocks() {
        tables.entry(m).or_insert_with(|| {
            partitions(m)
                .into_iter()
                .map(|p| {
                    let c = conjugate(&p);
                    let sq = c.iter().map(|x| x * x).sum();
                    (p, c, sq)
                })
                .collect()
        });
    }
    let blocks: Vec<&[(Vec<u64>, Vec<u64>, u64)]> = shape.blocks().iter().map(|m| tables[m].as_slice()).collect();
    let mut best: Option<(BigRational, Vec<usize>)> = None;
    let mut choice = vec![0usize; blocks.len()];
    let mut conj = vec![0u64; n as usize];
    search(&blocks, 0, 0, &mut conj, &mut choice, n, &mut best);
    Ok(match best {
        None => AlphaResult { alpha: BigRational::zero(), witness: Vec::new() },
        Some((alpha, idx)) => {
            let witness = idx.iter().zip(&blocks).map(|(&i, t)| t[i].0.clone()).collect();
            let bound = rational(*shape.blocks().iter().max().unwrap() as i64, n as i64);
            if alpha > bound {
                return Err(Error::AssertionFailure(format!("alpha {alpha} exceeds max m_i / n = {bound}")));
            }
            AlphaResult { alpha, witness }
        }
    })
}

fn search(
    blocks: &[&[(Vec<u64>, Vec<u64>, u64)]],
    i: usize,
    num: u64,
    conj: &mut [u64],
    choice: &mut [usize],
    n: u64,
    best: &mut Option<(BigRational, Vec<usize>)>,
) {
    if i == blocks.len() {
        if num == 0 {
            return;
        }
        let den = n * n - conj.iter().map(|x| x * x).sum::<u64>();
        let ratio = rational(num as i64, den as i64);
        if best.as_ref().is_none_or(|(b, _)| &ratio > b) {
            *best = Some((ratio, choice.to_vec()));
        }
        return;
    }
    let m = blocks[i][0].0.iter().sum::<u64>();
    for (k, (_, c, sq)) in blocks[i].iter().enumerate() {
        choice[i] = k;
        for (j, x) in c.iter().enumerate() {
            conj[j] += x;
        }
        search(blocks, i + 1, num + m * m - sq, conj, choice, n, best);
        for (j, x) in c.iter().enumerate() {
            conj[j] -= x;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundMode {
    /// `n^j (j!)^2 q^{4j^2} ((q+1)/(q-1))^{D/2} chi(1)^alpha`
    Hc,
    /// `n^{3j} ((q+1)/(q-1))^{D/2} chi(1)^alpha`
    Levi,
}

#[derive(Clone, Debug)]
pub struct BoundInputs {
    pub n: u64,
    pub q: u64,
    pub j: u64,
    pub d: u64,
    pub alpha: BigRational,
    pub chi1: BigUint,
}

pub fn character_bound(mode: BoundMode, inp: &BoundInputs, digits: u32) -> Result<Real> {
    if inp.q < 2 {
        return Err(Error::DomainError(format!("q must be at least 2, got {}", inp.q)));
    }
    if inp.chi1.is_zero() || inp.alpha < BigRational::zero() {
        return Err(Error::DomainError("need chi(1) >= 1 and alpha >= 0".into()));
    }
    let prec = bits_for_digits(digits) + 32;
    let n = BigUint::from(inp.n);
    let j32 = u32::try_from(inp.j).map_err(|_| Error::DomainError("j too large".into()))?;
    let prefactor = match mode {
        BoundMode::Hc => {
            let fact: BigUint = (1..=inp.j).map(BigUint::from).product();
            n.pow(j32) * &fact * &fact * BigUint::from(inp.q).pow(4 * j32 * j32)
        }
        BoundMode::Levi => n.pow(3 * j32),
    };
    let half_d = rational(inp.d as i64, 2);
    let up = Real::pow_rational(&BigUint::from(inp.q + 1), &half_d, prec);
    let down = Real::pow_rational(&BigUint::from(inp.q - 1), &half_d, prec);
    let ratio = up.checked_div(&down).expect("q - 1 >= 1");
    let chi = Real::pow_rational(&inp.chi1, &inp.alpha, prec);
    Ok((&ratio * &chi).mul_int(&BigInt::from(prefactor)).with_prec(bits_for_digits(digits)))
}

//! Counting semisimple torsion in `GL_n(q)`.
//!
//! An element `t` with `t^a = 1` and `gcd(a, q) = 1` is determined up to
//! conjugacy by the multiplicities `m_1, ..., m_a` of the eigenvalues
//! `zeta^1, ..., zeta^a = 1`, where `zeta` is a primitive `a`-th root of unity
//! in a suitable extension of `F_q`. Rationality forces `m_i = m_j` whenever
//! `i` and `j` lie in the same orbit of multiplication by `q`, and the
//! centralizer of `t` is `prod_s GL_{m_s}(q^{l_s})` over the orbits.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::gf::GaloisField;
use crate::arith::primes::FieldParameter;
use crate::arith::{gcd, gl_order_big, lcm_all};
use crate::error::{Error, Result};

pub const DEFAULT_BRUTE_FORCE_CAP: u64 = 10_000_000;

/// Orbits of `i -> q i (mod a)` on `{1, ..., a}`, residue 0 written as `a`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusOrbitStructure {
    pub a: u64,
    pub q_mod_a: u64,
    /// Orbits in increasing order of their minimal element, each sorted.
    pub orbits: Vec<Vec<u64>>,
    /// Minimal representative of each orbit.
    pub reps: Vec<u64>,
    /// Orbit lengths `l_s`.
    pub lengths: Vec<u64>,
    /// `orbit_of[i - 1]` is the orbit index of residue `i`.
    pub orbit_of: Vec<usize>,
}

impl FrobeniusOrbitStructure {
    pub fn orbit_count(&self) -> usize {
        self.orbits.len()
    }

    /// Sum of the residues in each orbit, reduced mod `a`: the determinant
    /// exponent contributed by one copy of the orbit's eigenvalues.
    pub fn orbit_residue_sums(&self) -> Vec<u64> {
        self.orbits
            .iter()
            .map(|o| o.iter().map(|&i| i % self.a).sum::<u64>() % self.a)
            .collect()
    }

    /// Index of the orbit `{a}` (eigenvalue 1), always a singleton.
    pub fn unit_orbit(&self) -> usize {
        self.orbit_of[self.a as usize - 1]
    }

    /// Whether some integer vector constant on orbits has determinant
    /// exponent `k`, ignoring non-negativity.
    pub fn det_realizable(&self, k: u64) -> bool {
        let g = self.orbit_residue_sums().iter().fold(self.a, |acc, &s| gcd(acc, s));
        k % g == 0
    }
}

pub fn orbit_structure(a: u64, field: &FieldParameter) -> Result<FrobeniusOrbitStructure> {
    if a == 0 {
        return Err(Error::DomainError("period must be positive".into()));
    }
    field.require_coprime("orbit structure", a)?;
    Ok(orbit_structure_mod(a, field.q % a))
}

/// `|GL_n(q)|`.
pub fn gl_order(n: u64, q: u64) -> BigUint {
    gl_order_big(n, &BigUint::from(q))
}

/// Eigenvalue multiplicities `m_1, ..., m_a` of a torsion class.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiplicityVector {
    pub m: Vec<u64>,
}

impl MultiplicityVector {
    /// Expands per-orbit multiplicities to a length-`a` vector.
    pub fn from_orbit_counts(st: &FrobeniusOrbitStructure, counts: &[u64]) -> Self {
        let m = (1..=st.a as usize).map(|i| counts[st.orbit_of[i - 1]]).collect();
        Self { m }
    }

    pub fn n(&self) -> u64 {
        self.m.iter().sum()
    }

    /// `sum_i i m_i mod a`.
    pub fn det_exponent(&self) -> u64 {
        let a = self.m.len() as u64;
        self.m.iter().enumerate().map(|(i, &mi)| (i as u64 + 1) * mi % a).sum::<u64>() % a
    }

    /// Per-orbit multiplicities, or `None` if not constant on orbits.
    pub fn orbit_counts(&self, st: &FrobeniusOrbitStructure) -> Option<Vec<u64>> {
        if self.m.len() as u64 != st.a {
            return None;
        }
        let counts: Vec<u64> = st.reps.iter().map(|&r| self.m[r as usize - 1]).collect();
        let constant = (1..=st.a as usize).all(|i| self.m[i - 1] == counts[st.orbit_of[i - 1]]);
        constant.then_some(counts)
    }
}

/// `|GL_n(q)| / prod_s |GL_{m_s}(q^{l_s})|`.
pub fn class_size(st: &FrobeniusOrbitStructure, v: &MultiplicityVector, q: u64) -> Result<BigUint> {
    let counts = v
        .orbit_counts(st)
        .ok_or(Error::InexactDivision("class size of a vector not constant on orbits"))?;
    let qb = BigUint::from(q);
    let mut cent = BigUint::one();
    for (s, &c) in counts.iter().enumerate() {
        cent *= gl_order_big(c, &num_traits::pow(qb.clone(), st.lengths[s] as usize));
    }
    let (quo, rem) = gl_order_big(v.n(), &qb).div_rem(&cent);
    if !rem.is_zero() {
        return Err(Error::InexactDivision("class size"));
    }
    Ok(quo)
}

/// Visits every non-negative per-orbit count vector with `sum l_s c_s = n`.
pub fn for_each_vector(st: &FrobeniusOrbitStructure, n: u64, mut visit: impl FnMut(&[u64])) {
    let unit = st.unit_orbit();
    let free: Vec<usize> = (0..st.orbit_count()).filter(|&s| s != unit).collect();
    let mut counts = vec![0u64; st.orbit_count()];
    fn rec(
        st: &FrobeniusOrbitStructure,
        free: &[usize],
        unit: usize,
        left: u64,
        counts: &mut [u64],
        visit: &mut dyn FnMut(&[u64]),
    ) {
        match free.split_first() {
            None => {
                counts[unit] = left;
                visit(counts);
            }
            Some((&s, rest)) => {
                let l = st.lengths[s];
                for c in 0..=left / l {
                    counts[s] = c;
                    rec(st, rest, unit, left - c * l, counts, visit);
                }
                counts[s] = 0;
            }
        }
    }
    rec(st, &free, unit, n, &mut counts, &mut visit);
}

/// Precomputed centralizer orders for repeated class-size evaluation.
struct ClassSizer {
    gl_n: BigUint,
    /// `tables[s][c] = |GL_c(q^{l_s})|`.
    tables: Vec<Vec<BigUint>>,
}

impl ClassSizer {
    fn new(st: &FrobeniusOrbitStructure, q: &BigUint, n: u64) -> Self {
        let mut cache: HashMap<u64, Vec<BigUint>> = HashMap::new();
        let tables = st
            .lengths
            .iter()
            .map(|&l| {
                cache
                    .entry(l)
                    .or_insert_with(|| {
                        let ql = num_traits::pow(q.clone(), l as usize);
                        (0..=n / l).map(|c| gl_order_big(c, &ql)).collect()
                    })
                    .clone()
            })
            .collect();
        Self { gl_n: gl_order_big(n, q), tables }
    }

    fn size(&self, counts: &[u64]) -> Result<BigUint> {
        let mut cent = BigUint::one();
        for (s, &c) in counts.iter().enumerate() {
            cent *= &self.tables[s][c as usize];
        }
        let (quo, rem) = self.gl_n.div_rem(&cent);
        if !rem.is_zero() {
            return Err(Error::InexactDivision("class size"));
        }
        Ok(quo)
    }
}

/// `j_{q,n,k}(a)` for every `k in 0..a`, for `q` given as a big integer
/// (used for extension fields `q^m`).
pub fn count_torsion_by_det_big(a: u64, q: &BigUint, n: u64) -> Result<Vec<BigUint>> {
    let q_mod_a = (q % BigUint::from(a)).to_u64().unwrap_or(0);
    if gcd(q_mod_a, a) != 1 && a != 1 {
        return Err(Error::NotCoprime {
            what: "torsion count",
            a,
            q: q.to_u64().unwrap_or(u64::MAX),
            gcd: gcd(q_mod_a, a),
        });
    }
    // Orbits depend only on q mod a.
    let st = orbit_structure_mod(a, q_mod_a);
    let sums = st.orbit_residue_sums();
    let sizer = ClassSizer::new(&st, q, n);
    let mut out = vec![BigUint::zero(); a as usize];
    let mut err = None;
    for_each_vector(&st, n, |counts| {
        let k = counts.iter().zip(&sums).map(|(c, s)| c % a * s % a).sum::<u64>() % a;
        match sizer.size(counts) {
            Ok(sz) => out[k as usize] += sz,
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

fn orbit_structure_mod(a: u64, q_mod_a: u64) -> FrobeniusOrbitStructure {
    let mut orbit_of = vec![usize::MAX; a as usize];
    let mut orbits = Vec::new();
    for start in 1..=a {
        if orbit_of[start as usize - 1] != usize::MAX {
            continue;
        }
        let idx = orbits.len();
        let mut orbit = Vec::new();
        let mut i = start;
        loop {
            orbit_of[i as usize - 1] = idx;
            orbit.push(i);
            i = (i * q_mod_a) % a;
            if i == 0 {
                i = a;
            }
            if i == start {
                break;
            }
        }
        orbit.sort_unstable();
        orbits.push(orbit);
    }
    let reps = orbits.iter().map(|o| o[0]).collect();
    let lengths = orbits.iter().map(|o| o.len() as u64).collect();
    FrobeniusOrbitStructure { a, q_mod_a, orbits, reps, lengths, orbit_of }
}

/// `j_{q,n,k}(a)` for every `k in 0..a`.
pub fn count_torsion_by_det(a: u64, field: &FieldParameter, n: u64) -> Result<Vec<BigUint>> {
    field.require_coprime("torsion count", a)?;
    count_torsion_by_det_big(a, &BigUint::from(field.q), n)
}

/// `j_{q,n,k}(a)`: elements with `t^a = 1` and `det t = zeta_a^k`.
pub fn count_torsion(a: u64, field: &FieldParameter, n: u64, k: u64) -> Result<BigUint> {
    let mut all = count_torsion_by_det(a, field, n)?;
    Ok(std::mem::take(&mut all[(k % a) as usize]))
}

/// `j_{q,n}(a)`: all solutions of `t^a = 1`.
pub fn count_torsion_total(a: u64, field: &FieldParameter, n: u64) -> Result<BigUint> {
    Ok(count_torsion_by_det(a, field, n)?.into_iter().sum())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetCount {
    pub k: u64,
    #[serde(with = "crate::arith::decimal")]
    pub count: BigUint,
    /// No integer vector (even allowing negative entries) has this
    /// determinant exponent, so the count vanishes for every `n`.
    pub empty_coset: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionReport {
    pub a: u64,
    pub q: u64,
    pub n: u64,
    pub per_det: Vec<DetCount>,
    #[serde(with = "crate::arith::decimal")]
    pub total: BigUint,
}

pub fn torsion_report(a: u64, field: &FieldParameter, n: u64) -> Result<TorsionReport> {
    let counts = count_torsion_by_det(a, field, n)?;
    let st = orbit_structure(a, field)?;
    let total = counts.iter().sum();
    let per_det = counts
        .into_iter()
        .enumerate()
        .map(|(k, count)| DetCount { k: k as u64, count, empty_coset: !st.det_realizable(k as u64) })
        .collect();
    Ok(TorsionReport { a, q: field.q, n, per_det, total })
}

/// Tuples `(k_1, ..., k_r)` with `prod zeta_{a_i}^{k_i} = 1`, i.e.
/// `sum k_i A / a_i = 0 (mod A)`.
pub fn sigma_set(periods: &[u64]) -> Vec<Vec<u64>> {
    let big_a = lcm_all(periods);
    let mut out = Vec::new();
    let mut cur = vec![0u64; periods.len()];
    fn rec(periods: &[u64], big_a: u64, i: usize, acc: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if i == periods.len() {
            if acc % big_a == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let step = big_a / periods[i];
        for k in 0..periods[i] {
            cur[i] = k;
            rec(periods, big_a, i + 1, (acc + k * step) % big_a, cur, out);
        }
    }
    rec(periods, big_a, 0, 0, &mut cur, &mut out);
    out
}

/// Per-period determinant counts placed on `Z/A` at `k A / a`.
fn normalized_det_vector(a: u64, big_a: u64, counts: &[BigUint]) -> Vec<BigUint> {
    let mut v = vec![BigUint::zero(); big_a as usize];
    for (k, c) in counts.iter().enumerate() {
        v[(k as u64 * (big_a / a)) as usize] += c;
    }
    v
}

fn cyclic_convolve(x: &[BigUint], y: &[BigUint]) -> Vec<BigUint> {
    let m = x.len();
    let mut out = vec![BigUint::zero(); m];
    for (i, xi) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
        for (j, yj) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            out[(i + j) % m] += xi * yj;
        }
    }
    out
}

/// `J_{q,n}(a_1, ..., a_r)` for `q` given as a big integer.
pub fn count_tuples_big(periods: &[u64], q: &BigUint, n: u64) -> Result<BigUint> {
    if periods.is_empty() {
        return Ok(BigUint::one());
    }
    let big_a = lcm_all(periods);
    let mut per_a: HashMap<u64, Vec<BigUint>> = HashMap::new();
    for &a in periods {
        if !per_a.contains_key(&a) {
            let counts = count_torsion_by_det_big(a, q, n)?;
            per_a.insert(a, normalized_det_vector(a, big_a, &counts));
        }
    }
    let mut acc = per_a[&periods[0]].clone();
    for a in &periods[1..] {
        acc = cyclic_convolve(&acc, &per_a[a]);
    }
    Ok(std::mem::take(&mut acc[0]))
}

/// `J_{q,n}(a_1, ..., a_r)`: torsion tuples whose determinants multiply to 1.
pub fn count_tuples(periods: &[u64], field: &FieldParameter, n: u64) -> Result<BigUint> {
    for &a in periods {
        field.require_coprime("tuple count", a)?;
    }
    count_tuples_big(periods, &BigUint::from(field.q), n)
}

/// Direct enumeration of `GL_n(q)`: counts of `x^a = 1` split by the
/// determinant exponent `k`, with `zeta_a` realized as `gamma^{(q-1)/g}`
/// raised to the unit power, `gamma` the smallest generator of `F_q^*` and
/// `g = gcd(a, q - 1)`. Exponents not divisible by `a / g` are unrealizable
/// over `F_q` and always get count 0.
pub fn brute_force_torsion_by_det(a: u64, field: &FieldParameter, n: u64, cap: u64) -> Result<Vec<BigUint>> {
    field.require_coprime("brute-force torsion", a)?;
    let order = gl_order(n, field.q);
    if order > BigUint::from(cap) {
        return Err(Error::CapExceeded {
            what: "brute-force torsion |GL_n(q)|",
            size: order.to_string(),
            cap: cap.to_string(),
        });
    }
    let gf = GaloisField::new(*field)?;
    let nn = (n * n) as usize;
    let q = field.q;
    let total = q.pow(nn as u32);
    let g = gcd(a, q - 1);
    let step = (q - 1) / g;
    let ident = GaloisField::identity(n as usize);
    let counts = (0..total)
        .into_par_iter()
        .fold(
            || vec![0u64; a as usize],
            |mut acc, idx| {
                let mut x = vec![0u8; nn];
                let mut t = idx;
                for e in x.iter_mut() {
                    *e = (t % q) as u8;
                    t /= q;
                }
                let d = gf.det(&x, n as usize);
                if d == 0 {
                    return acc;
                }
                let mut p = x.clone();
                let mut tmp = vec![0u8; nn];
                for _ in 1..a {
                    gf.mat_mul_into(&p, &x, n as usize, &mut tmp);
                    std::mem::swap(&mut p, &mut tmp);
                }
                if p == ident {
                    let l = gf.log(d) as u64;
                    debug_assert_eq!(l % step, 0, "det of a torsion element is a g-th root of unity");
                    let k = (a / g) * (l / step) % a;
                    acc[k as usize] += 1;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; a as usize],
            |mut x, y| {
                x.iter_mut().zip(y).for_each(|(u, v)| *u += v);
                x
            },
        );
    Ok(counts.into_iter().map(BigUint::from).collect())
}

pub fn brute_force_torsion(a: u64, field: &FieldParameter, n: u64, k: Option<u64>, cap: u64) -> Result<BigUint> {
    let counts = brute_force_torsion_by_det(a, field, n, cap)?;
    Ok(match k {
        Some(k) => counts[(k % a) as usize].clone(),
        None => counts.into_iter().sum(),
    })
}

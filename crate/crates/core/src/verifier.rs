//! Exact-rational branch and bound for the sums `sum_i f_{a_i,x}(delta_i)`.
//!
//! For each period `a` the quantity of interest is
//! `B_a(x) = sup_delta (f_{a,x}(delta) - a delta^2/(a-1)) / x` on `x in (0, 1/2]`.
//! It is dominated by `max(x/a, G_{a,x}, H_{a,x})`, and each of the three
//! terms is monotone in a way that lets a dyadic cell be bounded from its
//! endpoints. Square roots are the only inexact step; they are replaced by
//! one-sided rational bounds from the integer square root.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{rational_str, rational_to_string};
use crate::error::{Error, Result};
use crate::signature::{genus0_hyperbolic, EXCLUDED};

pub const DEFAULT_DEPTH: u32 = 24;
/// Extra bisection levels spent on a failing tuple before it is reported.
pub const RECHECK_EXTRA_DEPTH: u32 = 8;
/// Fractional bits of the rational square-root bounds.
pub const SQRT_BITS: u64 = 32;
/// Largest `c` given an explicit check in the `(2,2,2,c)` family.
pub const QUAD_EXPLICIT_MAX: u64 = 35;

pub fn default_eps() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10_000))
}

fn int(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn ratio(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn max_rat(a: BigRational, b: BigRational) -> BigRational {
    if b > a {
        b
    } else {
        a
    }
}

/// Upper bound of `sqrt(r)` with `SQRT_BITS` fractional bits, `r >= 0`.
pub fn sqrt_upper(r: &BigRational) -> BigRational {
    assert!(!r.is_negative(), "sqrt of a negative rational");
    let scale = BigInt::one() << (2 * SQRT_BITS);
    let scaled = (r * BigRational::from_integer(scale)).ceil().to_integer();
    let mut s = scaled.sqrt();
    if &s * &s < scaled {
        s += 1;
    }
    let out = BigRational::new(s, BigInt::one() << SQRT_BITS);
    assert!(&out * &out >= *r, "sqrt upper bound is not one-sided");
    out
}

/// Lower bound of `sqrt(r)` with `SQRT_BITS` fractional bits, `r >= 0`.
pub fn sqrt_lower(r: &BigRational) -> BigRational {
    assert!(!r.is_negative(), "sqrt of a negative rational");
    let scale = BigInt::one() << (2 * SQRT_BITS);
    let scaled = (r * BigRational::from_integer(scale)).floor().to_integer();
    let out = BigRational::new(scaled.sqrt(), BigInt::one() << SQRT_BITS);
    assert!(&out * &out <= *r, "sqrt lower bound is not one-sided");
    out
}

/// Closed interval with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalInterval {
    #[serde(with = "rational_str")]
    pub lo: BigRational,
    #[serde(with = "rational_str")]
    pub hi: BigRational,
}

impl RationalInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo > hi {
            return Err(Error::DomainError(format!(
                "interval [{}, {}] is empty",
                rational_to_string(&lo),
                rational_to_string(&hi)
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(x: BigRational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    /// Enclosure of `sqrt` over the interval, rounded outward.
    pub fn sqrt(&self) -> Result<Self> {
        if self.lo.is_negative() {
            return Err(Error::DomainError("sqrt of an interval reaching below 0".into()));
        }
        Ok(Self { lo: sqrt_lower(&self.lo), hi: sqrt_upper(&self.hi) })
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn bisect(&self) -> (Self, Self) {
        let m = self.midpoint();
        (
            Self { lo: self.lo.clone(), hi: m.clone() },
            Self { lo: m, hi: self.hi.clone() },
        )
    }
}

impl std::ops::Add for &RationalInterval {
    type Output = RationalInterval;
    fn add(self, rhs: Self) -> RationalInterval {
        RationalInterval { lo: &self.lo + &rhs.lo, hi: &self.hi + &rhs.hi }
    }
}

impl std::ops::Mul for &RationalInterval {
    type Output = RationalInterval;
    fn mul(self, rhs: Self) -> RationalInterval {
        let p = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = p.iter().min().cloned().expect("four products");
        let hi = p.iter().max().cloned().expect("four products");
        RationalInterval { lo, hi }
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", rational_to_string(&self.lo), rational_to_string(&self.hi))
    }
}

/// Which condition switches on the intersection term `H`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gate {
    /// `(a-1)x^2 + 2x >= 1`: the curves `g` and `h` meet.
    #[default]
    Proof,
    /// `(a-1)x^2 + ax >= 1`; the radicand is clamped at 0 where negative.
    Statement,
}

impl std::str::FromStr for Gate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proof" => Ok(Gate::Proof),
            "statement" => Ok(Gate::Statement),
            _ => Err(Error::Parse(format!("unknown gate {s:?}, expected proof or statement"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "endpoint-x/a")]
    EndpointXa,
    #[serde(rename = "G-closed-form")]
    GClosedForm,
    #[serde(rename = "H-closed-form")]
    HClosedForm,
    #[serde(rename = "dumb-2/sqrt(a)")]
    Dumb,
}

fn check_a(a: u64) -> Result<()> {
    if a < 2 {
        return Err(Error::DomainError(format!("period {a} is smaller than 2")));
    }
    Ok(())
}

/// `min((1/a + delta) x, (1/a + a delta^2/(a-1)) / 2)`.
pub fn f_axd(a: u64, x: &BigRational, delta: &BigRational) -> Result<BigRational> {
    check_a(a)?;
    if x.is_negative() || *x > ratio(1, 2) {
        return Err(Error::DomainError(format!("x = {} outside [0, 1/2]", rational_to_string(x))));
    }
    if delta.is_negative() || *delta > ratio(a - 1, a) {
        return Err(Error::DomainError(format!(
            "delta = {} outside [0, 1 - 1/a]",
            rational_to_string(delta)
        )));
    }
    let inv = ratio(1, a);
    let first = (&inv + delta) * x;
    let second = (&inv + ratio(a, a - 1) * delta * delta) / int(2);
    Ok(if first <= second { first } else { second })
}

/// `(f_{a,x}(delta) - a delta^2/(a-1)) / x` for `x > 0`.
pub fn objective(a: u64, x: &BigRational, delta: &BigRational) -> Result<BigRational> {
    if !x.is_positive() {
        return Err(Error::DomainError("objective needs x > 0".into()));
    }
    let f = f_axd(a, x, delta)?;
    Ok((f - ratio(a, a - 1) * delta * delta) / x)
}

/// Per-period constants shared by every cell.
#[derive(Clone, Debug)]
struct Period {
    a: u64,
    gate: Gate,
    inv: BigRational,
    am1: BigRational,
    /// Rational upper bound of the G threshold `(2 sqrt(3a+1) - 4)/(3(a-1))`.
    threshold_up: BigRational,
    dumb_up: BigRational,
}

impl Period {
    fn new(a: u64, gate: Gate) -> Result<Self> {
        check_a(a)?;
        let threshold_up =
            (int(2) * sqrt_upper(&int(3 * a + 1)) - int(4)) / int(3 * (a - 1));
        Ok(Self {
            a,
            gate,
            inv: ratio(1, a),
            am1: int(a - 1),
            threshold_up,
            dumb_up: dumb_upper(a),
        })
    }

    /// `x` lies below the G threshold; decided by squaring.
    fn g_active(&self, x: &BigRational) -> bool {
        let lhs = int(3) * &self.am1 * x + int(4);
        &lhs * &lhs <= int(4 * (3 * self.a + 1))
    }

    fn g_value(&self, x: &BigRational) -> BigRational {
        (&self.am1 * x + int(4)) / int(4 * self.a)
    }

    fn h_gate(&self, x: &BigRational) -> bool {
        let lin = match self.gate {
            Gate::Proof => int(2),
            Gate::Statement => int(self.a),
        };
        &self.am1 * x * x + lin * x >= BigRational::one()
    }

    /// `(a-1)^2 x^2 + 2(a-1)x - (a-1)`, clamped at zero.
    fn radicand(&self, x: &BigRational) -> BigRational {
        let d = &self.am1 * &self.am1 * x * x + int(2) * &self.am1 * x - &self.am1;
        if d.is_negative() {
            BigRational::zero()
        } else {
            d
        }
    }

    fn h_upper(&self, x: &BigRational) -> BigRational {
        sqrt_upper(&self.radicand(x)) * &self.inv - &self.am1 * x * &self.inv
            + (BigRational::one() - x) / (int(self.a) * x)
    }

    fn closed_forms(&self, x: &BigRational) -> ClosedForms {
        ClosedForms {
            endpoint: x * &self.inv,
            g: self.g_active(x).then(|| self.g_value(x)),
            h: self.h_gate(x).then(|| self.h_upper(x)),
        }
    }

    fn cell_bound(&self, lo: &BigRational, hi: &BigRational) -> (BigRational, Method) {
        let mut best = (hi * &self.inv, Method::EndpointXa);
        if self.g_active(lo) {
            let v = if self.g_active(hi) { self.g_value(hi) } else { self.g_value(&self.threshold_up) };
            if v > best.0 {
                best = (v, Method::GClosedForm);
            }
        }
        if self.h_gate(hi) {
            if lo.is_zero() {
                return (self.dumb_up.clone(), Method::Dumb);
            }
            let v = sqrt_upper(&self.radicand(hi)) * &self.inv - &self.am1 * lo * &self.inv
                + (BigRational::one() - lo) / (int(self.a) * lo);
            if v > best.0 {
                best = (v, Method::HClosedForm);
            }
        }
        if self.dumb_up < best.0 {
            return (self.dumb_up.clone(), Method::Dumb);
        }
        best
    }

    /// A value of the objective actually attained at `x`: a lower bound of `B_a(x)`.
    fn attained(&self, x: &BigRational) -> BigRational {
        let top = ratio(self.a - 1, self.a);
        let mut delta = if self.g_active(x) {
            &self.am1 * x / int(2 * self.a)
        } else {
            (&self.am1 * x - sqrt_upper(&self.radicand(x))) * &self.inv
        };
        if delta.is_negative() {
            delta = BigRational::zero();
        }
        if delta > top {
            delta = top;
        }
        objective(self.a, x, &delta).expect("x and delta are in range")
    }
}

/// Upper bound of `2/sqrt(a)`.
pub fn dumb_upper(a: u64) -> BigRational {
    int(2) / sqrt_lower(&int(a))
}

/// Lower bound of `2/sqrt(a)`.
pub fn dumb_lower(a: u64) -> BigRational {
    int(2) / sqrt_upper(&int(a))
}

/// The three terms at one point; `None` marks an inactive branch.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedForms {
    pub endpoint: BigRational,
    pub g: Option<BigRational>,
    pub h: Option<BigRational>,
}

impl ClosedForms {
    pub fn max(&self) -> BigRational {
        let mut m = self.endpoint.clone();
        for v in [&self.g, &self.h].into_iter().flatten() {
            if *v > m {
                m = v.clone();
            }
        }
        m
    }
}

pub fn closed_form_bounds(a: u64, x: &BigRational, gate: Gate) -> Result<ClosedForms> {
    if !x.is_positive() || *x > ratio(1, 2) {
        return Err(Error::DomainError(format!("x = {} outside (0, 1/2]", rational_to_string(x))));
    }
    Ok(Period::new(a, gate)?.closed_forms(x))
}

pub fn sup_bound_on_cell(
    a: u64,
    cell: &RationalInterval,
    gate: Gate,
) -> Result<(BigRational, Method)> {
    if cell.lo.is_negative() || cell.lo >= cell.hi || cell.hi > ratio(1, 2) {
        return Err(Error::DomainError(format!("cell {cell} is not inside [0, 1/2]")));
    }
    Ok(Period::new(a, gate)?.cell_bound(&cell.lo, &cell.hi))
}

/// Dyadic cell `[i w, (i+1) w]` with `w = 2^-(level+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Dyadic {
    level: u32,
    index: u64,
}

impl Dyadic {
    const ROOT: Dyadic = Dyadic { level: 0, index: 0 };

    fn bounds(self) -> (BigRational, BigRational) {
        let den = BigInt::one() << (self.level + 1);
        (
            BigRational::new(BigInt::from(self.index), den.clone()),
            BigRational::new(BigInt::from(self.index + 1), den),
        )
    }

    fn children(self) -> [Dyadic; 2] {
        let level = self.level + 1;
        [
            Dyadic { level, index: 2 * self.index },
            Dyadic { level, index: 2 * self.index + 1 },
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertCell {
    #[serde(with = "rational_str")]
    pub lo: BigRational,
    #[serde(with = "rational_str")]
    pub hi: BigRational,
    #[serde(with = "rational_str")]
    pub bound: BigRational,
    pub method: Method,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertConfig {
    #[serde(with = "rational_str")]
    pub eps_refine: BigRational,
    pub max_depth: u32,
    pub gate: Gate,
}

impl Default for CertConfig {
    fn default() -> Self {
        Self { eps_refine: default_eps(), max_depth: DEFAULT_DEPTH, gate: Gate::Proof }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub a: u64,
    pub config: CertConfig,
    pub cells: Vec<CertCell>,
    #[serde(with = "rational_str")]
    pub global_bound: BigRational,
    /// Largest objective value found; the true supremum lies in between.
    #[serde(with = "rational_str")]
    pub global_lower: BigRational,
    pub depth_exceeded: bool,
}

impl BoundCertificate {
    pub fn breakpoints(&self) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero()];
        out.extend(self.cells.iter().map(|c| c.hi.clone()));
        out
    }

    pub fn bound_at(&self, x: &BigRational) -> Option<&BigRational> {
        self.cells.iter().find(|c| c.lo <= *x && *x <= c.hi).map(|c| &c.bound)
    }

    /// Cells must tile `[0, 1/2]` in order and carry the recorded maximum.
    fn validate(&self) -> Result<()> {
        let mut at = BigRational::zero();
        for c in &self.cells {
            if c.lo != at || c.hi <= c.lo {
                return Err(Error::AssertionFailure(format!("certificate for a = {} has a gap", self.a)));
            }
            at = c.hi.clone();
        }
        let max = self.cells.iter().map(|c| &c.bound).max();
        if at != ratio(1, 2) || max != Some(&self.global_bound) {
            return Err(Error::AssertionFailure(format!(
                "certificate for a = {} does not cover (0, 1/2]",
                self.a
            )));
        }
        Ok(())
    }
}

/// Branch and bound for `sup_x B_a(x)`. A cell is settled once its bound is
/// within `eps_refine` of its own attained value or of the best value seen.
pub fn certify_sup(a: u64, config: &CertConfig) -> Result<BoundCertificate> {
    let p = Period::new(a, config.gate)?;
    let eps = &config.eps_refine;
    let mut best = (1..=32u64)
        .map(|k| p.attained(&ratio(k, 64)))
        .chain(std::iter::once(p.attained(&(p.threshold_up.clone() - ratio(1, 1 << 20)))))
        .max()
        .expect("nonempty sample");
    let mut cells = Vec::new();
    let mut depth_exceeded = false;
    let mut stack = vec![Dyadic::ROOT];
    while let Some(cell) = stack.pop() {
        let (lo, hi) = cell.bounds();
        let (bound, method) = p.cell_bound(&lo, &hi);
        let mut own = p.attained(&hi);
        if lo.is_positive() {
            own = max_rat(own, p.attained(&lo));
        }
        best = max_rat(best, own.clone());
        let settled = bound <= &best + eps || &bound - &own <= *eps;
        if settled || cell.level >= config.max_depth {
            depth_exceeded |= !settled;
            cells.push(CertCell { lo, hi, bound, method });
        } else {
            let [left, right] = cell.children();
            stack.push(right);
            stack.push(left);
        }
    }
    let global_bound = cells.iter().map(|c| c.bound.clone()).max().expect("at least one cell");
    Ok(BoundCertificate {
        a,
        config: config.clone(),
        cells,
        global_bound,
        global_lower: best,
        depth_exceeded,
    })
}

/// Per-period certificates, computed once and shared; optionally persisted
/// as `cert_a<value>.json`.
#[derive(Debug, Default)]
pub struct CertCache {
    dir: Option<PathBuf>,
    config: CertConfig,
    mem: Mutex<HashMap<u64, Arc<BoundCertificate>>>,
}

impl CertCache {
    pub fn new(config: CertConfig) -> Self {
        Self { dir: None, config, mem: Mutex::new(HashMap::new()) }
    }

    pub fn with_dir(config: CertConfig, dir: impl Into<PathBuf>) -> Self {
        Self { dir: Some(dir.into()), ..Self::new(config) }
    }

    pub fn config(&self) -> &CertConfig {
        &self.config
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn path_for(dir: &Path, a: u64) -> PathBuf {
        dir.join(format!("cert_a{a}.json"))
    }

    /// Unreadable, corrupt or mismatched files count as misses.
    fn load(&self, a: u64) -> Option<BoundCertificate> {
        let path = Self::path_for(self.dir.as_deref()?, a);
        let text = fs::read_to_string(path).ok()?;
        let cert: BoundCertificate = serde_json::from_str(&text).ok()?;
        (cert.a == a && cert.config == self.config && cert.validate().is_ok()).then_some(cert)
    }

    fn store(&self, cert: &BoundCertificate) -> Result<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        fs::create_dir_all(dir)?;
        let path = Self::path_for(dir, cert.a);
        let tmp = dir.join(format!(".cert_a{}.{}.tmp", cert.a, std::process::id()));
        fs::write(&tmp, serde_json::to_string(cert)?)?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    pub fn get(&self, a: u64) -> Result<Arc<BoundCertificate>> {
        if let Some(c) = self.mem.lock().expect("cache lock").get(&a) {
            return Ok(Arc::clone(c));
        }
        let cert = match self.load(a) {
            Some(c) => c,
            None => {
                let c = certify_sup(a, &self.config)?;
                self.store(&c)?;
                c
            }
        };
        let cert = Arc::new(cert);
        self.mem.lock().expect("cache lock").entry(a).or_insert_with(|| Arc::clone(&cert));
        Ok(cert)
    }

    pub fn get_range(&self, lo: u64, hi: u64) -> Result<Vec<Arc<BoundCertificate>>> {
        (lo..=hi).into_par_iter().map(|a| self.get(a)).collect()
    }

    /// Deletes every cached certificate file; returns how many were removed.
    pub fn clear(&self) -> Result<usize> {
        self.mem.lock().expect("cache lock").clear();
        let Some(dir) = &self.dir else { return Ok(0) };
        let mut removed = 0;
        if let Ok(entries) = fs::read_dir(dir) {
            for e in entries.flatten() {
                let name = e.file_name().to_string_lossy().into_owned();
                if name.starts_with("cert_a") && name.ends_with(".json") {
                    fs::remove_file(e.path())?;
                    removed += 1;
                }
            }
        }
        Ok(removed)
    }
}

/// The tabulated bound for `B_a`: .555, .399, .318, .2, .02 by range of `a`.
pub fn f_bound_table_value(a: u64) -> BigRational {
    match a {
        0..=2 => ratio(555, 1000),
        3 => ratio(399, 1000),
        4..=99 => ratio(318, 1000),
        100..=9999 => ratio(2, 10),
        _ => ratio(2, 100),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableRow {
    pub a: u64,
    #[serde(with = "rational_str")]
    pub certified: BigRational,
    #[serde(with = "rational_str")]
    pub table_value: BigRational,
    #[serde(with = "rational_str")]
    pub dumb_lower: BigRational,
    pub depth_exceeded: bool,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableReport {
    pub a_max: u64,
    pub config: CertConfig,
    pub rows: Vec<TableRow>,
    pub all_ok: bool,
}

/// Certifies `B_a` for `2 <= a <= a_max` against the table and `2/sqrt(a)`.
pub fn verify_table(a_max: u64, cache: &CertCache) -> Result<TableReport> {
    check_a(a_max)?;
    let certs = cache.get_range(2, a_max)?;
    let rows: Vec<TableRow> = certs
        .iter()
        .map(|c| {
            let table_value = f_bound_table_value(c.a);
            let dumb = dumb_lower(c.a);
            let ok = c.global_bound <= table_value && c.global_bound < dumb;
            TableRow {
                a: c.a,
                certified: c.global_bound.clone(),
                table_value,
                dumb_lower: dumb,
                depth_exceeded: c.depth_exceeded,
                ok,
            }
        })
        .collect();
    let all_ok = rows.iter().all(|r| r.ok);
    Ok(TableReport { a_max, config: cache.config().clone(), rows, all_ok })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DumbBoundReport {
    pub a_max: u64,
    pub checked: usize,
    /// Smallest gap `2/sqrt(a) - B_a` over the certified range and where it occurs.
    pub min_gap_a: u64,
    pub min_gap: f64,
    /// `2/sqrt(10000) = 1/50` exactly, so `2/sqrt(a) <= 1/50` from there on.
    pub analytic_tail_from: u64,
}

pub fn check_dumb_bound(a_max: u64, cache: &CertCache) -> Result<DumbBoundReport> {
    check_a(a_max)?;
    let certs = cache.get_range(2, a_max)?;
    let mut min_gap = (u64::MAX, f64::INFINITY);
    for c in &certs {
        let lower = dumb_lower(c.a);
        if c.global_bound >= lower {
            return Err(Error::AssertionFailure(format!(
                "certified bound {} for a = {} is not below 2/sqrt(a)",
                rational_to_string(&c.global_bound),
                c.a
            )));
        }
        let gap = (&lower - &c.global_bound).to_f64().unwrap_or(0.0);
        if gap < min_gap.1 {
            min_gap = (c.a, gap);
        }
    }
    let tail = dumb_upper(10_000);
    if tail != ratio(1, 50) {
        return Err(Error::AssertionFailure("2/sqrt(10000) is not 1/50".into()));
    }
    Ok(DumbBoundReport {
        a_max,
        checked: certs.len(),
        min_gap_a: min_gap.0,
        min_gap: min_gap.1,
        analytic_tail_from: 10_000,
    })
}

/// Maximum of the objective over a grid, exactly. Points with `x = 0` are skipped.
pub fn oracle_sample_sup(
    a: u64,
    xs: &[BigRational],
    deltas: &[BigRational],
) -> Result<Option<BigRational>> {
    let mut best: Option<BigRational> = None;
    for x in xs.iter().filter(|x| x.is_positive()) {
        for d in deltas {
            let v = objective(a, x, d)?;
            if best.as_ref().map_or(true, |b| v > *b) {
                best = Some(v);
            }
        }
    }
    Ok(best)
}

/// Evenly spaced `n` points `k/n * top` for `k = 1..=n` (or `0..n` with `from_zero`).
pub fn uniform_grid(top: &BigRational, n: u64, from_zero: bool) -> Vec<BigRational> {
    let ks: Box<dyn Iterator<Item = u64>> =
        if from_zero { Box::new(0..n) } else { Box::new(1..=n) };
    let den = if from_zero { n.saturating_sub(1).max(1) } else { n };
    ks.map(|k| top * ratio(k, den)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum TupleOutcome {
    Pass {
        cells: usize,
        /// Smallest `r - 2 - eps - sum` over the partition.
        #[serde(with = "rational_str")]
        min_margin: BigRational,
        rechecked: bool,
    },
    Fail {
        cell: RationalInterval,
        #[serde(with = "rational_str")]
        margin: BigRational,
    },
}

impl TupleOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, TupleOutcome::Pass { .. })
    }
}

fn run_tuple(periods: &[(Period, u64)], target: &BigRational, depth: u32) -> TupleOutcome {
    let mut stack = vec![Dyadic::ROOT];
    let mut cells = 0usize;
    let mut min_margin: Option<BigRational> = None;
    while let Some(cell) = stack.pop() {
        let (lo, hi) = cell.bounds();
        let mut sum = BigRational::zero();
        for (p, mult) in periods {
            sum += p.cell_bound(&lo, &hi).0 * int(*mult);
        }
        let margin = target - &sum;
        if margin.is_positive() {
            cells += 1;
            if min_margin.as_ref().map_or(true, |m| margin < *m) {
                min_margin = Some(margin);
            }
        } else if cell.level >= depth {
            return TupleOutcome::Fail { cell: RationalInterval { lo, hi }, margin };
        } else {
            let [left, right] = cell.children();
            stack.push(right);
            stack.push(left);
        }
    }
    TupleOutcome::Pass {
        cells,
        min_margin: min_margin.expect("at least one cell"),
        rechecked: false,
    }
}

/// Certifies `sum_i B_{a_i}(x) < r - 2 - eps` on a shared dyadic partition.
/// A failure at `depth` is retried at `depth + 8` before it is returned.
pub fn check_tuple(periods: &[u64], eps: &BigRational, depth: u32, gate: Gate) -> Result<TupleOutcome> {
    if periods.len() < 3 || !genus0_hyperbolic(periods) {
        return Err(Error::DomainError(format!("periods {periods:?} are not hyperbolic in genus 0")));
    }
    let mut counts: Vec<(u64, u64)> = Vec::new();
    for &a in periods {
        match counts.iter_mut().find(|(b, _)| *b == a) {
            Some(e) => e.1 += 1,
            None => counts.push((a, 1)),
        }
    }
    let ps = counts
        .into_iter()
        .map(|(a, m)| Ok((Period::new(a, gate)?, m)))
        .collect::<Result<Vec<_>>>()?;
    let target = int(periods.len() as u64 - 2) - eps;
    match run_tuple(&ps, &target, depth) {
        TupleOutcome::Fail { .. } => Ok(match run_tuple(&ps, &target, depth + RECHECK_EXTRA_DEPTH) {
            TupleOutcome::Pass { cells, min_margin, .. } => {
                TupleOutcome::Pass { cells, min_margin, rechecked: true }
            }
            fail => fail,
        }),
        pass => Ok(pass),
    }
}

pub fn check_triple(
    a1: u64,
    a2: u64,
    a3: u64,
    eps: &BigRational,
    depth: u32,
    gate: Gate,
) -> Result<TupleOutcome> {
    if !(2 <= a1 && a1 <= a2 && a2 <= a3) {
        return Err(Error::DomainError(format!("triple ({a1},{a2},{a3}) is not sorted")));
    }
    check_tuple(&[a1, a2, a3], eps, depth, gate)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanFailure {
    pub periods: Vec<u64>,
    pub cell: RationalInterval,
    #[serde(with = "rational_str")]
    pub margin: BigRational,
}

/// An inequality between certified constants, kept with both sides.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Reduction {
    pub family: String,
    #[serde(with = "rational_str")]
    pub lhs: BigRational,
    #[serde(with = "rational_str")]
    pub rhs: BigRational,
    pub holds: bool,
}

impl Reduction {
    fn new(family: &str, lhs: BigRational, rhs: BigRational) -> Self {
        let holds = lhs < rhs;
        Self { family: family.into(), lhs, rhs, holds }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PassSummary {
    /// Triples settled by the sum of global bounds.
    pub by_global_bound: u64,
    /// Triples and quadruples settled cell by cell.
    pub by_cells: u64,
    /// Of those, how many needed the deeper recheck.
    pub rechecked: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PublishedDiff {
    /// Listed signatures inside the scan range that passed.
    pub missing: Vec<Vec<u64>>,
    /// Failures that are not on the list.
    pub extra: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExclusionReport {
    pub family: String,
    pub max_a3: u64,
    #[serde(with = "rational_str")]
    pub eps: BigRational,
    pub depth: u32,
    pub gate: Gate,
    pub triples_scanned: u64,
    pub passes: PassSummary,
    pub failures: Vec<ScanFailure>,
    pub reductions: Vec<Reduction>,
    pub published_diff: PublishedDiff,
    pub matches_published: bool,
}

impl ExclusionReport {
    pub fn failure_set(&self) -> Vec<Vec<u64>> {
        self.failures.iter().map(|f| f.periods.clone()).collect()
    }
}

/// Smallest `c >= a2` with `1/a1 + 1/a2 + 1/c < 1`; none for `(2, 2)`.
fn first_hyperbolic_c(a1: u64, a2: u64) -> Option<u64> {
    if a1 == 2 && a2 == 2 {
        return None;
    }
    (a2..).find(|&c| genus0_hyperbolic(&[a1, a2, c]))
}

struct PairResult {
    by_global: u64,
    by_cells: u64,
    rechecked: u64,
    failures: Vec<ScanFailure>,
}

/// All genus-0 signatures: triples with `a3 <= max_a3` cell by cell, and
/// `r >= 4` through reductions to certified constants.
pub fn scan_genus0(max_a3: u64, eps: &BigRational, depth: u32, cache: &CertCache) -> Result<ExclusionReport> {
    if max_a3 < 7 {
        return Err(Error::DomainError(format!("max_a3 = {max_a3} is below 7")));
    }
    let gate = cache.config().gate;
    // Reductions need every a < 100 certified; 2/sqrt(a) <= 0.2 takes over after.
    let cert_max = max_a3.max(99);
    let certs = cache.get_range(2, cert_max)?;
    let glob = |a: u64| certs[(a - 2) as usize].global_bound.clone();
    let beyond = dumb_upper(cert_max + 1);

    // tail[c] bounds B_{c'} for every c' >= c, including c' > max_a3.
    let mut tail = vec![BigRational::zero(); (cert_max + 2) as usize];
    tail[(cert_max + 1) as usize] = beyond.clone();
    for c in (2..=cert_max).rev() {
        let here = max_rat(glob(c), tail[(c + 1) as usize].clone());
        tail[c as usize] = if dumb_upper(c) < here { dumb_upper(c) } else { here };
    }
    let one_target = BigRational::one() - eps;

    let pairs: Vec<(u64, u64)> = (2..=max_a3)
        .flat_map(|a1| (a1..=max_a3).map(move |a2| (a1, a2)))
        .collect();
    let results = pairs
        .par_iter()
        .map(|&(a1, a2)| -> Result<PairResult> {
            let mut out = PairResult { by_global: 0, by_cells: 0, rechecked: 0, failures: vec![] };
            let base = glob(a1) + glob(a2);
            let Some(mut c) = first_hyperbolic_c(a1, a2) else { return Ok(out) };
            while c <= max_a3 {
                if &base + &tail[c as usize] < one_target {
                    out.by_global += max_a3 - c + 1;
                    break;
                }
                match check_triple(a1, a2, c, eps, depth, gate)? {
                    TupleOutcome::Pass { rechecked, .. } => {
                        out.by_cells += 1;
                        out.rechecked += rechecked as u64;
                    }
                    TupleOutcome::Fail { cell, margin } => {
                        out.failures.push(ScanFailure { periods: vec![a1, a2, c], cell, margin })
                    }
                }
                c += 1;
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut passes = PassSummary::default();
    let mut failures = Vec::new();
    for r in results {
        passes.by_global_bound += r.by_global;
        passes.by_cells += r.by_cells;
        passes.rechecked += r.rechecked;
        failures.extend(r.failures);
    }
    let triples_scanned = passes.by_global_bound + passes.by_cells + failures.len() as u64;

    // Suprema over every a >= 2, >= 3, >= 4 (larger a through 2/sqrt(a)).
    let sup_from = |lo: u64| (lo..=cert_max).map(glob).fold(beyond.clone(), max_rat);
    let (s2, s3, s4) = (sup_from(2), sup_from(3), sup_from(4));
    let two_target = int(2) - eps;
    let mut reductions = vec![
        Reduction::new("r=4, a4>=4", int(3) * &s2 + &s4, two_target.clone()),
        Reduction::new("r=4, a3>=3", int(2) * &s2 + int(2) * &s3, two_target.clone()),
        Reduction::new(
            "r=4, (2,2,2,c) c>35",
            int(3) * glob(2) + dumb_upper(QUAD_EXPLICIT_MAX + 1),
            two_target,
        ),
        // The gap r - 2 - eps - r*s2 grows with r, so r = 5 covers every r >= 5.
        Reduction::new("r>=5", int(5) * &s2, int(3) - eps),
    ];
    if max_a3 >= 9999 {
        reductions.push(Reduction::new("r=3, a3>=10000", &s2 + &s3 + ratio(1, 50), one_target.clone()));
    }
    for c in 3..=QUAD_EXPLICIT_MAX {
        let periods = vec![2, 2, 2, c];
        match check_tuple(&periods, eps, depth, gate)? {
            TupleOutcome::Pass { rechecked, .. } => {
                passes.by_cells += 1;
                passes.rechecked += rechecked as u64;
            }
            TupleOutcome::Fail { cell, margin } => failures.push(ScanFailure { periods, cell, margin }),
        }
    }
    for r in reductions.iter().filter(|r| !r.holds) {
        failures.push(ScanFailure {
            periods: vec![],
            cell: RationalInterval::new(BigRational::zero(), ratio(1, 2))?,
            margin: &r.rhs - &r.lhs,
        });
    }
    failures.sort_by(|x, y| (x.periods.len(), &x.periods).cmp(&(y.periods.len(), &y.periods)));

    let failed: BTreeSet<Vec<u64>> = failures.iter().map(|f| f.periods.clone()).collect();
    let in_range = |p: &[u64]| p.len() > 3 || p[2] <= max_a3;
    let published: BTreeSet<Vec<u64>> =
        EXCLUDED.iter().filter(|p| in_range(p)).map(|p| p.to_vec()).collect();
    let published_diff = PublishedDiff {
        missing: published.difference(&failed).cloned().collect(),
        extra: failed.difference(&published).cloned().collect(),
    };
    let matches_published = published_diff.missing.is_empty() && published_diff.extra.is_empty();
    Ok(ExclusionReport {
        family: "genus 0".into(),
        max_a3,
        eps: eps.clone(),
        depth,
        gate,
        triples_scanned,
        passes,
        failures,
        reductions,
        published_diff,
        matches_published,
    })
}

/// Runs the scan for each `eps` in 1e-3, 1e-4, 1e-5 and returns the largest
/// one that reproduces the list, with its report.
pub fn largest_reproducing_eps(
    max_a3: u64,
    depth: u32,
    cache: &CertCache,
) -> Result<Option<(BigRational, ExclusionReport)>> {
    for k in [1_000u64, 10_000, 100_000] {
        let eps = ratio(1, k);
        let report = scan_genus0(max_a3, &eps, depth, cache)?;
        if report.matches_published {
            return Ok(Some((eps, report)));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GenusRow {
    pub g: u64,
    pub r: u64,
    #[serde(with = "rational_str")]
    pub lhs: BigRational,
    #[serde(with = "rational_str")]
    pub rhs: BigRational,
    #[serde(with = "rational_str")]
    pub margin: BigRational,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PositiveGenusReport {
    #[serde(with = "rational_str")]
    pub certified_sup: BigRational,
    #[serde(with = "rational_str")]
    pub constant: BigRational,
    pub rows: Vec<GenusRow>,
    pub smallest: (u64, u64),
}

/// `0.555 r < 2g + r - 2 - 0.44` for `1 <= g <= 5`, `r <= 10` (`r >= 1` when `g = 1`),
/// after checking that `0.555` dominates every certified `B_a`.
pub fn check_positive_genus(cache: &CertCache) -> Result<PositiveGenusReport> {
    let constant = f_bound_table_value(2);
    // B_2 dominates the table, and a >= 100 is covered by 2/sqrt(a) <= 0.2.
    let certified_sup = cache
        .get_range(2, 99)?
        .iter()
        .map(|c| c.global_bound.clone())
        .fold(dumb_upper(100), max_rat);
    if certified_sup > constant {
        return Err(Error::AssertionFailure(format!(
            "certified sup {} exceeds 0.555",
            rational_to_string(&certified_sup)
        )));
    }
    let mut rows = Vec::new();
    for g in 1..=5u64 {
        for r in (if g == 1 { 1 } else { 0 })..=10u64 {
            let lhs = &constant * int(r);
            let rhs = int(2 * g + r) - int(2) - ratio(44, 100);
            let margin = &rhs - &lhs;
            if !margin.is_positive() {
                return Err(Error::AssertionFailure(format!("positive genus fails at g = {g}, r = {r}")));
            }
            rows.push(GenusRow { g, r, lhs, rhs, margin });
        }
    }
    let smallest = rows
        .iter()
        .min_by(|x, y| x.margin.cmp(&y.margin))
        .map(|row| (row.g, row.r))
        .expect("nonempty grid");
    Ok(PositiveGenusReport { certified_sup, constant, rows, smallest })
}

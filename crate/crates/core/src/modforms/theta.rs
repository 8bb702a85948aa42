//! Theta series of a shifted lattice coset.
//!
//! Coset vectors `shift + sum c_i b_i` are enumerated by a recursive search
//! over the basis coefficients, nested from the last coordinate inwards, with
//! the remaining norm budget propagated through an `R^T D R` factorization of
//! the Gram matrix. Floating point is used only to bound the coefficient
//! ranges (widened by one on each side); every candidate is tested exactly.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::lattice::{orbit_norm, to_f64, ShiftedCoset};
use super::series::PuiseuxSeries;
use crate::arith::lcm;
use crate::error::{Error, Result};

/// Series denominator for exponents coming from a period `a`.
pub fn series_den(a: u64) -> u64 {
    lcm(24, a * a)
}

/// Calls `visit` on every coset vector (orbit coordinates) of norm `< trunc`,
/// passing the exact norm.
pub fn for_each_short_vector(
    coset: &ShiftedCoset,
    trunc: &BigRational,
    mut visit: impl FnMut(&[BigRational], &BigRational),
) -> Result<()> {
    if coset.is_empty() {
        return Err(Error::EmptyCoset);
    }
    let st = &coset.lattice.orbits;
    let basis = &coset.lattice.basis;
    let d = basis.len();
    let s = st.orbit_count();
    let l: Vec<f64> = st.lengths.iter().map(|&x| x as f64).collect();
    let shift_f: Vec<f64> = coset.shift.iter().map(to_f64).collect();
    let gram: Vec<Vec<f64>> = coset.lattice.gram().iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    // h_i = <b_i, shift>
    let h: Vec<f64> = basis
        .iter()
        .map(|b| (0..s).map(|j| b[j] as f64 * l[j] * shift_f[j]).sum())
        .collect();
    let (r, diag) = udu(&gram);
    let center = solve_center(&gram, &h);
    let q_shift: f64 = (0..s).map(|j| l[j] * shift_f[j] * shift_f[j]).sum();
    let q_min = q_shift + h.iter().zip(&center).map(|(hi, zi)| hi * zi).sum::<f64>();
    let budget = (to_f64(trunc) - q_min) * (1.0 + 1e-9) + 1e-7;
    let mut coeffs = vec![0i64; d];
    let mut point = coset.shift.clone();
    let mut rec_state = Search { d, r: &r, diag: &diag, center: &center, coeffs: &mut coeffs };
    rec_state.descend(d, budget, &mut |c: &[i64]| {
        for (j, p) in point.iter_mut().enumerate() {
            let mut v = coset.shift[j].clone();
            for (i, &ci) in c.iter().enumerate() {
                if ci != 0 && basis[i][j] != 0 {
                    v += BigRational::from_integer(BigInt::from(ci as i128 * basis[i][j]));
                }
            }
            *p = v;
        }
        let norm = orbit_norm(st, &point);
        if &norm < trunc {
            visit(&point, &norm);
        }
    });
    Ok(())
}

struct Search<'a> {
    d: usize,
    r: &'a [Vec<f64>],
    diag: &'a [f64],
    center: &'a [f64],
    coeffs: &'a mut Vec<i64>,
}

impl Search<'_> {
    fn descend(&mut self, level: usize, budget: f64, visit: &mut dyn FnMut(&[i64])) {
        if level == 0 {
            visit(self.coeffs);
            return;
        }
        if budget < 0.0 {
            return;
        }
        let i = level - 1;
        let offset: f64 = (i + 1..self.d)
            .map(|j| self.r[i][j] * (self.coeffs[j] as f64 - self.center[j]))
            .sum();
        let mid = self.center[i] - offset;
        let radius = (budget / self.diag[i]).max(0.0).sqrt();
        let lo = (mid - radius).floor() as i64 - 1;
        let hi = (mid + radius).ceil() as i64 + 1;
        for c in lo..=hi {
            let t = c as f64 - mid;
            let rest = budget - self.diag[i] * t * t;
            if rest < -1e-6 * (1.0 + budget.abs()) {
                continue;
            }
            self.coeffs[i] = c;
            self.descend(i, rest.max(0.0) + 1e-7, visit);
        }
        self.coeffs[i] = 0;
    }
}

/// `G = R^T diag(D) R` with `R` unit upper triangular.
fn udu(g: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let d = g.len();
    let mut r = vec![vec![0.0; d]; d];
    let mut diag = vec![0.0; d];
    for i in 0..d {
        let mut s = g[i][i];
        for k in 0..i {
            s -= diag[k] * r[k][i] * r[k][i];
        }
        diag[i] = s;
        r[i][i] = 1.0;
        for j in i + 1..d {
            let mut t = g[i][j];
            for k in 0..i {
                t -= diag[k] * r[k][i] * r[k][j];
            }
            r[i][j] = t / s;
        }
    }
    (r, diag)
}

/// `z = -G^{-1} h` by Gaussian elimination.
fn solve_center(g: &[Vec<f64>], h: &[f64]) -> Vec<f64> {
    let d = g.len();
    let mut m: Vec<Vec<f64>> = g.iter().zip(h).map(|(row, &hi)| {
        let mut r = row.clone();
        r.push(-hi);
        r
    }).collect();
    for col in 0..d {
        let piv = (col..d).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs())).unwrap();
        m.swap(col, piv);
        for row in 0..d {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in col..=d {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    (0..d).map(|i| m[i][d] / m[i][i]).collect()
}

/// `theta_{shift}(z) = sum_{lambda in shift + Lambda} u^{lambda . lambda}`
/// below `u^trunc`.
pub fn theta_series(coset: &ShiftedCoset, trunc: &BigRational) -> Result<PuiseuxSeries> {
    let den = series_den(coset.lattice.a);
    let den_r = BigRational::from_integer(BigInt::from(den));
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    for_each_short_vector(coset, trunc, |_, norm| {
        let e = norm * &den_r;
        debug_assert!(e.is_integer());
        let e = e.to_integer().to_i64().expect("exponent fits i64");
        *counts.entry(e).or_insert(0) += 1;
    })?;
    Ok(PuiseuxSeries::from_terms(
        den,
        trunc.clone(),
        counts.into_iter().map(|(e, c)| (e, BigRational::from_integer(BigInt::from(c)))),
    ))
}

/// Exhaustive box search used to validate the pruned enumeration.
pub fn theta_series_box(coset: &ShiftedCoset, trunc: &BigRational, radius: i64) -> Result<PuiseuxSeries> {
    if coset.is_empty() {
        return Err(Error::EmptyCoset);
    }
    let st = &coset.lattice.orbits;
    let basis = &coset.lattice.basis;
    let d = basis.len();
    let den = series_den(coset.lattice.a);
    let den_r = BigRational::from_integer(BigInt::from(den));
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    let mut c = vec![-radius; d];
    loop {
        let point: Vec<BigRational> = (0..st.orbit_count())
            .map(|j| {
                let mut v = coset.shift[j].clone();
                for i in 0..d {
                    v += BigRational::from_integer(BigInt::from(c[i] as i128 * basis[i][j]));
                }
                v
            })
            .collect();
        let norm = orbit_norm(st, &point);
        if &norm < trunc {
            let e = (norm * &den_r).to_integer().to_i64().unwrap();
            *counts.entry(e).or_insert(0) += 1;
        }
        let mut i = 0;
        while i < d && c[i] == radius {
            c[i] = -radius;
            i += 1;
        }
        if i == d {
            break;
        }
        c[i] += 1;
    }
    Ok(PuiseuxSeries::from_terms(
        den,
        trunc.clone(),
        counts.into_iter().map(|(e, c)| (e, BigRational::from_integer(BigInt::from(c)))),
    ))
}

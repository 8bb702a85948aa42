//! The lattice of admissible multiplicity differences and its cosets.
//!
//! Vectors constant on Frobenius orbits are written in orbit coordinates
//! `y_s`; the ambient norm `sum_i v_i^2` becomes `sum_s l_s y_s^2`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::hnf::{column_hnf, row_hnf, IntMatrix};
use crate::arith::primes::FieldParameter;
use crate::error::Result;
use crate::torsion::{orbit_structure, FrobeniusOrbitStructure};

/// `Lambda`: integer vectors constant on orbits with coordinate sum 0 and
/// `sum_i i v_i = 0 (mod a)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceLattice {
    pub a: u64,
    pub orbits: FrobeniusOrbitStructure,
    /// Canonical basis rows in orbit coordinates (row Hermite form).
    pub basis: IntMatrix,
    pub pivots: Vec<usize>,
}

impl CongruenceLattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Basis vectors expanded to `Z^a`.
    pub fn ambient_basis(&self) -> Vec<Vec<i128>> {
        self.basis.iter().map(|b| expand(&self.orbits, b)).collect()
    }

    /// Gram matrix `B diag(l) B^T` in orbit coordinates.
    pub fn gram(&self) -> IntMatrix {
        let l = &self.orbits.lengths;
        self.basis
            .iter()
            .map(|bi| {
                self.basis
                    .iter()
                    .map(|bj| bi.iter().zip(bj).zip(l).map(|((x, y), &ls)| x * y * ls as i128).sum())
                    .collect()
            })
            .collect()
    }

    /// Reduces an orbit-coordinate rational vector to its canonical coset
    /// representative: pivot coordinates land in `[0, pivot)`.
    pub fn reduce(&self, v: &[BigRational]) -> Vec<BigRational> {
        let mut v = v.to_vec();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            let piv = BigRational::from_integer(BigInt::from(b[p]));
            let f = (&v[p] / &piv).floor();
            if !f.is_zero() {
                for (x, &bx) in v.iter_mut().zip(b) {
                    *x -= &f * BigRational::from_integer(BigInt::from(bx));
                }
            }
        }
        v
    }
}

fn expand(st: &FrobeniusOrbitStructure, y: &[i128]) -> Vec<i128> {
    (0..st.a as usize).map(|i| y[st.orbit_of[i]]).collect()
}

/// Constraint matrix `[[l_s, 0], [sigma_s, -a]]` on `(y, t)`.
fn constraints(st: &FrobeniusOrbitStructure) -> IntMatrix {
    let sums = st.orbit_residue_sums();
    let mut top: Vec<i128> = st.lengths.iter().map(|&l| l as i128).collect();
    top.push(0);
    let mut bottom: Vec<i128> = sums.iter().map(|&s| s as i128).collect();
    bottom.push(-(st.a as i128));
    vec![top, bottom]
}

pub fn congruence_lattice(st: &FrobeniusOrbitStructure) -> CongruenceLattice {
    let s = st.orbit_count();
    let h = column_hnf(&constraints(st));
    let kernel: Vec<Vec<i128>> = h.kernel().into_iter().map(|v| v[..s].to_vec()).collect();
    let (basis, pivots) = row_hnf(&kernel, s);
    CongruenceLattice { a: st.a, orbits: st.clone(), basis, pivots }
}

/// `lambda'_n + Lambda` for determinant exponent `k`, or empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftedCoset {
    pub lattice: CongruenceLattice,
    pub n: u64,
    pub k: u64,
    /// Integer solution `lambda_n` in orbit coordinates (entries may be
    /// negative); `None` when the congruence system has no solution.
    pub lambda: Option<Vec<i128>>,
    /// Canonical representative of `lambda_n - (n/a, ..., n/a)` in orbit
    /// coordinates.
    #[serde(with = "rational_vec")]
    pub shift: Vec<BigRational>,
}

impl ShiftedCoset {
    pub fn is_empty(&self) -> bool {
        self.lambda.is_none()
    }

    /// Shift expanded to `Q^a`.
    pub fn ambient_shift(&self) -> Vec<BigRational> {
        let st = &self.lattice.orbits;
        (0..st.a as usize).map(|i| self.shift[st.orbit_of[i]].clone()).collect()
    }
}

mod rational_vec {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(crate::arith::rational_to_string).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| crate::arith::parse_rational(s).ok_or_else(|| serde::de::Error::custom("bad rational")))
            .collect()
    }
}

pub fn build_coset_for(st: &FrobeniusOrbitStructure, n: u64, k: u64) -> ShiftedCoset {
    let lattice = congruence_lattice(st);
    let s = st.orbit_count();
    let h = column_hnf(&constraints(st));
    let lambda = h.solve(&[n as i128, (k % st.a) as i128]).map(|x| x[..s].to_vec());
    let shift = match &lambda {
        Some(y) => {
            let offset = BigRational::new(BigInt::from(n), BigInt::from(st.a));
            let raw: Vec<BigRational> =
                y.iter().map(|&v| BigRational::from_integer(BigInt::from(v)) - &offset).collect();
            lattice.reduce(&raw)
        }
        None => Vec::new(),
    };
    ShiftedCoset { lattice, n, k: k % st.a, lambda, shift }
}

pub fn build_coset(a: u64, field: &FieldParameter, n: u64, k: u64) -> Result<ShiftedCoset> {
    let st = orbit_structure(a, field)?;
    Ok(build_coset_for(&st, n, k))
}

/// Norm `sum_s l_s y_s^2` of an orbit-coordinate vector.
pub fn orbit_norm(st: &FrobeniusOrbitStructure, y: &[BigRational]) -> BigRational {
    y.iter()
        .zip(&st.lengths)
        .map(|(v, &l)| v * v * BigRational::from_integer(BigInt::from(l)))
        .sum()
}

pub(crate) fn to_f64(x: &BigRational) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

//! Character tables: computation from an explicit group, JSON ingestion and
//! validation.
//!
//! Tables are computed over `F_p` with `p = 1 (mod exponent)` and
//! `p > 2 sqrt|G|`: common eigenvectors of the class multiplication matrices
//! give the central characters, the degrees follow from the norm relation,
//! and each value is lifted to `C` by recovering eigenvalue multiplicities
//! through the power maps.

use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::group::{ExplicitGroup, DEFAULT_GROUP_CAP};
use crate::arith::primes::{pow_mod, prime_congruent_one, primitive_root};
use crate::arith::real::bits_for_digits;
use crate::arith::{parse_rational, rational, Complex, Real};
use crate::error::{Error, Result};

pub const DEFAULT_DIGITS: u32 = 50;
pub const DEFAULT_CLASS_CAP: usize = 300;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassInfo {
    pub label: String,
    pub size: BigUint,
    pub element_order: u64,
}

#[derive(Clone, Debug)]
pub struct CharacterTable {
    pub group_order: BigUint,
    pub classes: Vec<ClassInfo>,
    /// `values[chi][class]`.
    pub values: Vec<Vec<Complex>>,
    pub precision_digits: u32,
    degrees: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    group_order: String,
    classes: Vec<ClassJson>,
    characters: Vec<Vec<ValueJson>>,
    precision_digits: u32,
}

#[derive(Serialize, Deserialize)]
struct ClassJson {
    label: String,
    size: String,
    element_order: u64,
}

#[derive(Serialize, Deserialize)]
struct ValueJson {
    re: String,
    im: String,
}

impl CharacterTable {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn prec(&self) -> u32 {
        bits_for_digits(self.precision_digits)
    }

    /// Relative tolerance for the validation checks.
    pub fn tolerance(&self) -> BigRational {
        let e = self.precision_digits.saturating_sub(5).clamp(6, 20);
        BigRational::new(BigInt::one(), BigInt::from(10u32).pow(e))
    }

    /// Builds a table and checks every invariant.
    pub fn new(
        group_order: BigUint,
        classes: Vec<ClassInfo>,
        values: Vec<Vec<Complex>>,
        precision_digits: u32,
    ) -> Result<Self> {
        let mut t = CharacterTable { group_order, classes, values, precision_digits, degrees: Vec::new() };
        t.validate()?;
        Ok(t)
    }

    fn validate(&mut self) -> Result<()> {
        let k = self.classes.len();
        if k == 0 || self.values.len() != k || self.values.iter().any(|row| row.len() != k) {
            return Err(Error::Parse(format!("table must be square with {k} classes")));
        }
        let sum: BigUint = self.classes.iter().map(|c| &c.size).sum();
        if sum != self.group_order {
            return Err(Error::SizeMismatch { sum: sum.to_string(), order: self.group_order.to_string() });
        }
        if !self.classes[0].size.is_one() || self.classes[0].element_order != 1 {
            return Err(Error::Parse("first class must be the identity".into()));
        }
        let tol = self.tolerance();
        let one = Complex::one(self.prec());
        let close = |x: &Complex, y: &Complex| (x - y).abs_upper() < tol;
        if !self.values[0].iter().all(|v| close(v, &one)) {
            return Err(Error::OrthogonalityViolation { row_a: 0, row_b: 0, residual: "first row is not trivial".into() });
        }
        let mut degrees = Vec::with_capacity(k);
        for (i, row) in self.values.iter().enumerate() {
            let (d, residual) = row[0].re.nearest_integer();
            let d = d.to_u64().filter(|&d| d >= 1);
            match d {
                Some(d) if residual < tol && row[0].im.abs_upper() < tol => degrees.push(d),
                _ => {
                    return Err(Error::OrthogonalityViolation {
                        row_a: i,
                        row_b: i,
                        residual: format!("degree {} is not a positive integer", row[0].re.to_decimal(8)),
                    })
                }
            }
        }
        let square_sum: BigUint = degrees.iter().map(|&d| BigUint::from(d * d)).sum();
        if square_sum != self.group_order {
            return Err(Error::OrthogonalityViolation {
                row_a: 0,
                row_b: 0,
                residual: format!("sum of squared degrees {square_sum} differs from the group order"),
            });
        }
        let order = BigInt::from(self.group_order.clone());
        let sizes: Vec<BigInt> = self.classes.iter().map(|c| BigInt::from(c.size.clone())).collect();
        let weighted: Vec<Vec<Complex>> = self
            .values
            .iter()
            .map(|row| row.iter().zip(&sizes).map(|(v, s)| v.conj().mul_int(s)).collect())
            .collect();
        for a in 0..k {
            for b in a..k {
                let mut acc = Complex::zero(self.prec());
                for c in 0..k {
                    acc = &acc + &(&self.values[a][c] * &weighted[b][c]);
                }
                let mut acc = acc.div_int(&order);
                if a == b {
                    acc = &acc - &one;
                }
                let residual = acc.abs_upper();
                if residual >= tol {
                    return Err(Error::OrthogonalityViolation {
                        row_a: a,
                        row_b: b,
                        residual: format!("{:.3e}", residual.to_f64().unwrap_or(f64::NAN)),
                    });
                }
            }
        }
        self.degrees = degrees;
        Ok(())
    }

    /// Indices of the degree-one characters.
    pub fn linear_rows(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&i| self.degrees[i] == 1).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = TableJson {
            group_order: self.group_order.to_string(),
            classes: self
                .classes
                .iter()
                .map(|c| ClassJson { label: c.label.clone(), size: c.size.to_string(), element_order: c.element_order })
                .collect(),
            characters: self
                .values
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|v| ValueJson {
                            re: v.re.to_decimal(self.precision_digits),
                            im: v.im.to_decimal(self.precision_digits),
                        })
                        .collect()
                })
                .collect(),
            precision_digits: self.precision_digits,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TableJson = serde_json::from_str(text)?;
        let parse_uint = |s: &str, what: &str| -> Result<BigUint> {
            s.trim().parse::<BigUint>().map_err(|_| Error::Parse(format!("{what} {s:?} is not a non-negative integer")))
        };
        let group_order = parse_uint(&doc.group_order, "group order")?;
        let classes = doc
            .classes
            .iter()
            .map(|c| {
                Ok(ClassInfo { label: c.label.clone(), size: parse_uint(&c.size, "class size")?, element_order: c.element_order })
            })
            .collect::<Result<Vec<_>>>()?;
        let digits = doc.precision_digits.max(1);
        let prec = bits_for_digits(digits);
        let radius = BigRational::new(BigInt::one(), BigInt::from(10u32).pow(digits));
        let parse_real = |s: &str| -> Result<Real> {
            let x = parse_rational(s).ok_or_else(|| Error::Parse(format!("bad decimal {s:?}")))?;
            Ok(Real::with_radius(&x, &radius, prec))
        };
        let values = doc
            .characters
            .iter()
            .map(|row| row.iter().map(|v| Ok(Complex::new(parse_real(&v.re)?, parse_real(&v.im)?))).collect())
            .collect::<Result<Vec<Vec<Complex>>>>()?;
        Self::new(group_order, classes, values, digits)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// Caps for [`compute_character_table`].
#[derive(Clone, Copy, Debug)]
pub struct TableCaps {
    pub max_order: u64,
    pub max_classes: usize,
}

impl Default for TableCaps {
    fn default() -> Self {
        Self { max_order: DEFAULT_GROUP_CAP, max_classes: DEFAULT_CLASS_CAP }
    }
}

pub fn compute_character_table(g: &ExplicitGroup, digits: u32, caps: TableCaps) -> Result<CharacterTable> {
    let order = g.order() as u64;
    if order > caps.max_order {
        return Err(Error::CapExceeded { what: "group order", size: order.to_string(), cap: caps.max_order.to_string() });
    }
    let k = g.classes().len();
    if k > caps.max_classes {
        return Err(Error::CapExceeded { what: "class count", size: k.to_string(), cap: caps.max_classes.to_string() });
    }
    let e = g.exponent();
    let p = prime_congruent_one(e, 2 * order.sqrt() + 2);
    let f = Fp(p);
    let omegas = central_characters(g, f)?;
    let sizes: Vec<u64> = g.classes().iter().map(|c| c.size as u64).collect();
    let inv_class: Vec<usize> = g.classes().iter().map(|c| g.class_of(g.inverse(c.rep))).collect();
    let powers = g.power_maps();
    let z = primitive_root(p);
    let prec = bits_for_digits(digits);
    let mut rows: Vec<(u64, Vec<Vec<u64>>)> = Vec::with_capacity(k);
    for (idx, w) in omegas.iter().enumerate() {
        // sum_j w_j w_{j*} / |C_j| = |G| / chi(1)^2
        let norm = (0..k).fold(0, |acc, j| f.add(acc, f.mul(f.mul(w[j], w[inv_class[j]]), f.inv(sizes[j] % p))));
        if norm == 0 {
            return Err(Error::EigenFailure(idx));
        }
        let d2 = f.mul(order % p, f.inv(norm));
        let degree = (1..=order.sqrt()).find(|&d| (d * d) % p == d2).ok_or(Error::EigenFailure(idx))?;
        let chi: Vec<u64> = (0..k).map(|j| f.mul(degree % p, f.mul(w[j], f.inv(sizes[j] % p)))).collect();
        let mut mults = Vec::with_capacity(k);
        for (j, c) in g.classes().iter().enumerate() {
            let o = c.element_order as u64;
            let zeta = pow_mod(z, (p - 1) / o, p);
            let o_inv = f.inv(o % p);
            let m: Vec<u64> = (0..o)
                .map(|t| {
                    let mut acc = 0;
                    for l in 0..o {
                        let root = pow_mod(zeta, (o - (t * l) % o) % o, p);
                        acc = f.add(acc, f.mul(chi[powers[j][l as usize]], root));
                    }
                    f.mul(acc, o_inv)
                })
                .collect();
            if m.iter().any(|&x| x > degree) || m.iter().sum::<u64>() != degree {
                return Err(Error::EigenFailure(idx));
            }
            mults.push(m);
        }
        rows.push((degree, mults));
    }
    rows.sort_by(|x, y| {
        let trivial = |r: &(u64, Vec<Vec<u64>>)| r.1.iter().all(|m| m[0] == 1);
        (x.0, !trivial(x), &x.1).cmp(&(y.0, !trivial(y), &y.1))
    });
    let mut roots: std::collections::HashMap<(u64, u64), Complex> = std::collections::HashMap::new();
    let mut root = |t: u64, o: u64| {
        roots.entry((t, o)).or_insert_with(|| Complex::root_of_unity(&rational(t as i64, o as i64), prec + 16)).clone()
    };
    let values: Vec<Vec<Complex>> = rows
        .iter()
        .map(|(_, mults)| {
            mults
                .iter()
                .zip(g.classes())
                .map(|(m, c)| {
                    let mut acc = Complex::zero(prec + 16);
                    for (t, &mt) in m.iter().enumerate() {
                        if mt != 0 {
                            acc = &acc + &root(t as u64, c.element_order as u64).mul_int(&BigInt::from(mt));
                        }
                    }
                    Complex::new(acc.re.with_prec(prec), acc.im.with_prec(prec))
                })
                .collect()
        })
        .collect();
    let classes = g
        .classes()
        .iter()
        .map(|c| ClassInfo { label: c.label.clone(), size: BigUint::from(c.size), element_order: c.element_order as u64 })
        .collect();
    CharacterTable::new(BigUint::from(order), classes, values, digits)
}

#[derive(Clone, Copy)]
struct Fp(u64);

impl Fp {
    #[inline]
    fn add(self, x: u64, y: u64) -> u64 {
        (x + y) % self.0
    }
    #[inline]
    fn sub(self, x: u64, y: u64) -> u64 {
        (x + self.0 - y) % self.0
    }
    #[inline]
    fn mul(self, x: u64, y: u64) -> u64 {
        ((x as u128 * y as u128) % self.0 as u128) as u64
    }
    fn inv(self, x: u64) -> u64 {
        pow_mod(x, self.0 - 2, self.0)
    }
}

/// `omega_chi(C_j) = |C_j| chi(g_j) / chi(1)` mod `p` for every irreducible
/// `chi`, one vector per character.
fn central_characters(g: &ExplicitGroup, f: Fp) -> Result<Vec<Vec<u64>>> {
    let k = g.classes().len();
    let reps: Vec<u32> = g.classes().iter().map(|c| c.rep).collect();
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); k];
    for x in 0..g.order() as u32 {
        members[g.class_of(x)].push(x);
    }
    // (M)_{j,l} = sum_i weight_i #{x in C_i : class(x^-1 z_l) = j}
    let class_matrix = |weights: &dyn Fn(usize) -> u64, only: Option<usize>| -> Vec<Vec<u64>> {
        let mut m = vec![vec![0u64; k]; k];
        let sources: Vec<usize> = match only {
            Some(i) => vec![i],
            None => (0..k).collect(),
        };
        for i in sources {
            let w = weights(i) % f.0;
            if w == 0 {
                continue;
            }
            for &x in &members[i] {
                let xi = g.inverse(x);
                for (l, &z) in reps.iter().enumerate() {
                    let j = g.class_of(g.mul(xi, z));
                    m[j][l] = f.add(m[j][l], w);
                }
            }
        }
        m
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let coeffs: Vec<u64> = (0..k).map(|_| rng.gen_range(1..f.0)).collect();
    let mut pending: Vec<Vec<Vec<u64>>> = vec![(0..k).map(|i| unit(k, i)).collect()];
    let mut done: Vec<Vec<u64>> = Vec::new();
    let mut attempt = 0usize;
    while !pending.is_empty() {
        let (matrix, tag) = if attempt == 0 {
            (class_matrix(&|i| coeffs[i], None), 0)
        } else if attempt < k {
            (class_matrix(&|_| 1, Some(attempt)), attempt)
        } else {
            return Err(Error::EigenFailure(k - 1));
        };
        attempt += 1;
        let mut next = Vec::new();
        for space in pending {
            for part in split(&space, &matrix, f).ok_or(Error::EigenFailure(tag))? {
                if part.len() == 1 {
                    done.push(part.into_iter().next().unwrap());
                } else {
                    next.push(part);
                }
            }
        }
        pending = next;
    }
    if done.len() != k {
        return Err(Error::EigenFailure(0));
    }
    Ok(done
        .into_iter()
        .map(|v| {
            let s = f.inv(v[0]);
            v.into_iter().map(|x| f.mul(x, s)).collect()
        })
        .collect())
}

fn unit(k: usize, i: usize) -> Vec<u64> {
    let mut v = vec![0; k];
    v[i] = 1;
    v
}

/// Splits an invariant subspace (basis in reduced echelon form) into the
/// eigenspaces of `m`; `None` if they do not span it.
fn split(basis: &[Vec<u64>], m: &[Vec<u64>], f: Fp) -> Option<Vec<Vec<Vec<u64>>>> {
    let d = basis.len();
    if d == 1 {
        return Some(vec![basis.to_vec()]);
    }
    let pivots: Vec<usize> = basis.iter().map(|b| b.iter().position(|&x| x != 0).unwrap()).collect();
    let k = m.len();
    // restricted[t][s]: coordinate t of M b_s
    let mut restricted = vec![vec![0u64; d]; d];
    for (s, b) in basis.iter().enumerate() {
        for (t, &pv) in pivots.iter().enumerate() {
            restricted[t][s] = (0..k).fold(0, |acc, l| f.add(acc, f.mul(m[pv][l], b[l])));
        }
    }
    let poly = charpoly(restricted.clone(), f);
    let roots: Vec<u64> = (0..f.0).filter(|&x| eval(&poly, x, f) == 0).collect();
    if roots.len() == 1 {
        return Some(vec![basis.to_vec()]);
    }
    let mut parts = Vec::new();
    let mut total = 0;
    for lambda in roots {
        let mut shifted = restricted.clone();
        for (i, row) in shifted.iter_mut().enumerate() {
            row[i] = f.sub(row[i], lambda);
        }
        let kernel = kernel(shifted, f);
        total += kernel.len();
        let vectors: Vec<Vec<u64>> = kernel
            .iter()
            .map(|c| (0..k).map(|l| (0..d).fold(0, |acc, s| f.add(acc, f.mul(c[s], basis[s][l])))).collect())
            .collect();
        parts.push(rref(vectors, f));
    }
    (total == d).then_some(parts)
}

fn eval(poly: &[u64], x: u64, f: Fp) -> u64 {
    poly.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
}

/// Characteristic polynomial (low degree first) via Hessenberg reduction.
fn charpoly(mut h: Vec<Vec<u64>>, f: Fp) -> Vec<u64> {
    let d = h.len();
    for col in 0..d.saturating_sub(2) {
        let Some(piv) = (col + 1..d).find(|&i| h[i][col] != 0) else { continue };
        if piv != col + 1 {
            h.swap(piv, col + 1);
            for row in h.iter_mut() {
                row.swap(piv, col + 1);
            }
        }
        let inv = f.inv(h[col + 1][col]);
        for i in col + 2..d {
            let t = f.mul(h[i][col], inv);
            if t == 0 {
                continue;
            }
            for j in 0..d {
                let v = f.mul(t, h[col + 1][j]);
                h[i][j] = f.sub(h[i][j], v);
            }
            for row in h.iter_mut() {
                let v = f.mul(t, row[i]);
                row[col + 1] = f.add(row[col + 1], v);
            }
        }
    }
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for m in 1..=d {
        let prev = &polys[m - 1];
        let mut next = vec![0u64; m + 1];
        for (i, &c) in prev.iter().enumerate() {
            next[i + 1] = f.add(next[i + 1], c);
            next[i] = f.sub(next[i], f.mul(h[m - 1][m - 1], c));
        }
        let mut prod = 1u64;
        for i in (1..m).rev() {
            prod = f.mul(prod, h[i][i - 1]);
            let coef = f.mul(h[i - 1][m - 1], prod);
            if coef != 0 {
                for (t, &c) in polys[i - 1].iter().enumerate() {
                    next[t] = f.sub(next[t], f.mul(coef, c));
                }
            }
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

/// Reduced row echelon form, dropping zero rows.
fn rref(mut rows: Vec<Vec<u64>>, f: Fp) -> Vec<Vec<u64>> {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, piv);
        let inv = f.inv(rows[r][c]);
        for x in rows[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let t = rows[i][c];
                for j in 0..cols {
                    let v = f.mul(t, rows[r][j]);
                    rows[i][j] = f.sub(rows[i][j], v);
                }
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows
}

/// Basis of `{c : A c = 0}`.
fn kernel(a: Vec<Vec<u64>>, f: Fp) -> Vec<Vec<u64>> {
    let d = a.first().map_or(0, |r| r.len());
    let reduced = rref(a, f);
    let pivots: Vec<usize> = reduced.iter().map(|r| r.iter().position(|&x| x != 0).unwrap()).collect();
    (0..d)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![0u64; d];
            v[free] = 1;
            for (row, &pc) in reduced.iter().zip(&pivots) {
                v[pc] = f.sub(0, row[free]);
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(g: &ExplicitGroup) -> CharacterTable {
        compute_character_table(g, 40, TableCaps::default()).unwrap()
    }

    #[test]
    fn classical_degrees() {
        let t = table(&ExplicitGroup::symmetric(3).unwrap());
        assert_eq!(t.degrees(), &[1, 1, 2]);
        let t = table(&ExplicitGroup::general_linear(2, 2, DEFAULT_GROUP_CAP).unwrap());
        assert_eq!(t.degrees(), &[1, 1, 2]);
        let t = table(&ExplicitGroup::general_linear(2, 3, DEFAULT_GROUP_CAP).unwrap());
        assert_eq!(t.degrees(), &[1, 1, 2, 2, 2, 3, 3, 4]);
        let t = table(&ExplicitGroup::general_linear(3, 2, DEFAULT_GROUP_CAP).unwrap());
        assert_eq!(t.degrees(), &[1, 3, 3, 6, 7, 8]);
        let t = table(&ExplicitGroup::cyclic(1).unwrap());
        assert_eq!(t.degrees(), &[1]);
        assert_eq!(t.values[0][0].re.to_decimal(5), "1.00000");
    }

    #[test]
    fn symmetric_five_values() {
        let t = table(&ExplicitGroup::symmetric(5).unwrap());
        assert_eq!(t.degrees(), &[1, 1, 4, 4, 5, 5, 6]);
        let row: Vec<String> = t.values[6].iter().map(|v| v.re.to_decimal(3)).collect();
        // degree 6 character: 6 on 1, -2 on (2,2), 0 on transpositions and
        // 3-cycles, 1 on 5-cycles, 0 on the rest.
        let sum: f64 = row.iter().map(|s| s.parse::<f64>().unwrap().abs()).sum();
        assert!((sum - 9.0).abs() < 1e-9, "{row:?}");
    }

    #[test]
    fn json_round_trip_and_rejections() {
        let t = table(&ExplicitGroup::symmetric(3).unwrap());
        let text = t.to_json().unwrap();
        let back = CharacterTable::from_json(&text).unwrap();
        assert_eq!(back.degrees(), t.degrees());
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        doc["classes"][1]["size"] = "4".into();
        assert!(matches!(CharacterTable::from_json(&doc.to_string()), Err(Error::SizeMismatch { .. })));
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        doc["characters"][2][1]["re"] = "0.01".into();
        assert!(matches!(CharacterTable::from_json(&doc.to_string()), Err(Error::OrthogonalityViolation { .. })));
        assert!(matches!(CharacterTable::from_json("{"), Err(Error::Json(_))));
    }

    #[test]
    fn caps_are_enforced() {
        let g = ExplicitGroup::symmetric(4).unwrap();
        let caps = TableCaps { max_order: 10, max_classes: 300 };
        assert!(matches!(compute_character_table(&g, 30, caps), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn charpoly_of_companion() {
        let f = Fp(101);
        // companion matrix of x^3 - 2x^2 - 5x + 6 = (x-1)(x+2)(x-3)
        let m = vec![vec![0, 0, 101 - 6], vec![1, 0, 5], vec![0, 1, 2]];
        assert_eq!(charpoly(m, f), vec![6, 101 - 5, 101 - 2, 1]);
    }
}

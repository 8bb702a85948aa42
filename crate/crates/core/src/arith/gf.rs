//! Table-driven arithmetic in a small finite field `F_{p^e}`.
//!
//! Elements are indices `0..q`; index `c_0 + c_1 p + ... + c_{e-1} p^{e-1}`
//! stands for the residue of `c_0 + c_1 t + ...` modulo the
//! lexicographically smallest monic irreducible polynomial of degree `e`.
//! Only the brute-force oracles and explicit matrix groups use this type, so
//! the field is capped at `q <= 256`.

use super::primes::FieldParameter;
use crate::error::{Error, Result};

pub const MAX_TABLE_FIELD: u64 = 256;

#[derive(Clone, Debug)]
pub struct GaloisField {
    pub p: u32,
    pub e: u32,
    pub q: u32,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    /// Smallest index generating the multiplicative group.
    pub generator: u8,
    /// `log[x]` is the discrete log of `x != 0` base `generator`.
    log: Vec<u32>,
    /// Coefficients (low degree first) of the defining polynomial.
    pub modulus: Vec<u32>,
}

fn digits(mut x: u32, p: u32, e: u32) -> Vec<u32> {
    (0..e)
        .map(|_| {
            let d = x % p;
            x /= p;
            d
        })
        .collect()
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Reduces a coefficient vector modulo the monic `modulus` over `F_p`.
fn poly_rem(mut a: Vec<u32>, modulus: &[u32], p: u32) -> Vec<u32> {
    let deg = modulus.len() - 1;
    while a.len() > deg {
        let lead = a.pop().unwrap();
        if lead != 0 {
            let shift = a.len() - deg;
            for (i, &c) in modulus[..deg].iter().enumerate() {
                a[shift + i] = (a[shift + i] + p - (lead * c) % p) % p;
            }
        }
    }
    a.resize(deg, 0);
    a
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut out = vec![0; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    out
}

/// A monic polynomial of degree `e` is irreducible iff it has no monic factor
/// of degree `1..=e/2`; fields here are tiny, so trial division suffices.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let e = f.len() - 1;
    for d in 1..=e / 2 {
        for low in 0..p.pow(d as u32) {
            let mut g = digits(low, p, d as u32);
            g.push(1);
            if poly_rem(f.to_vec(), &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, e: u32) -> Vec<u32> {
    if e == 1 {
        return vec![0, 1];
    }
    (0..p.pow(e))
        .map(|low| {
            let mut f = digits(low, p, e);
            f.push(1);
            f
        })
        .find(|f| is_irreducible(f, p))
        .expect("irreducible polynomials exist in every degree")
}

impl GaloisField {
    pub fn new(field: FieldParameter) -> Result<Self> {
        if field.q > MAX_TABLE_FIELD {
            return Err(Error::CapExceeded {
                what: "table field size",
                size: field.q.to_string(),
                cap: MAX_TABLE_FIELD.to_string(),
            });
        }
        let (p, e, q) = (field.p as u32, field.e, field.q as u32);
        let modulus = smallest_irreducible(p, e);
        let qs = q as usize;
        let mut add = vec![0u8; qs * qs];
        let mut mul = vec![0u8; qs * qs];
        for x in 0..q {
            let dx = digits(x, p, e);
            for y in 0..q {
                let dy = digits(y, p, e);
                let sum: Vec<u32> = dx.iter().zip(&dy).map(|(a, b)| (a + b) % p).collect();
                add[(x * q + y) as usize] = undigits(&sum, p) as u8;
                let prod = if e == 1 {
                    vec![(x * y) % p]
                } else {
                    poly_rem(poly_mul(&dx, &dy, p), &modulus, p)
                };
                mul[(x * q + y) as usize] = undigits(&prod, p) as u8;
            }
        }
        let mut neg = vec![0u8; qs];
        let mut inv = vec![0u8; qs];
        for x in 0..qs {
            for y in 0..qs {
                if add[x * qs + y] == 0 {
                    neg[x] = y as u8;
                }
                if mul[x * qs + y] == 1 {
                    inv[x] = y as u8;
                }
            }
        }
        let order_of = |g: usize| -> u32 {
            let mut acc = g;
            let mut k = 1;
            while acc != 1 {
                acc = mul[acc * qs + g] as usize;
                k += 1;
            }
            k
        };
        let generator = (1..qs)
            .find(|&g| order_of(g) == q - 1)
            .expect("multiplicative group of a finite field is cyclic") as u8;
        let mut log = vec![u32::MAX; qs];
        let mut acc = 1usize;
        for k in 0..q - 1 {
            log[acc] = k;
            acc = mul[acc * qs + generator as usize] as usize;
        }
        Ok(Self { p, e, q, add, mul, neg, inv, generator, log, modulus })
    }

    #[inline]
    pub fn add(&self, x: u8, y: u8) -> u8 {
        self.add[x as usize * self.q as usize + y as usize]
    }

    #[inline]
    pub fn mul(&self, x: u8, y: u8) -> u8 {
        self.mul[x as usize * self.q as usize + y as usize]
    }

    #[inline]
    pub fn sub(&self, x: u8, y: u8) -> u8 {
        self.add(x, self.neg[y as usize])
    }

    #[inline]
    pub fn neg(&self, x: u8) -> u8 {
        self.neg[x as usize]
    }

    /// Multiplicative inverse; `x` must be nonzero.
    #[inline]
    pub fn inv(&self, x: u8) -> u8 {
        debug_assert!(x != 0);
        self.inv[x as usize]
    }

    /// Discrete logarithm base [`Self::generator`]; `x` must be nonzero.
    #[inline]
    pub fn log(&self, x: u8) -> u32 {
        self.log[x as usize]
    }

    pub fn pow(&self, x: u8, mut k: u64) -> u8 {
        let mut base = x;
        let mut acc = 1u8;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }
}

/// Dense `n x n` matrices over a [`GaloisField`], stored row-major.
impl GaloisField {
    pub fn mat_mul_into(&self, x: &[u8], y: &[u8], n: usize, out: &mut [u8]) {
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0u8;
                for k in 0..n {
                    acc = self.add(acc, self.mul(x[i * n + k], y[k * n + j]));
                }
                out[i * n + j] = acc;
            }
        }
    }

    pub fn mat_mul(&self, x: &[u8], y: &[u8], n: usize) -> Vec<u8> {
        let mut out = vec![0u8; n * n];
        self.mat_mul_into(x, y, n, &mut out);
        out
    }

    pub fn identity(n: usize) -> Vec<u8> {
        let mut out = vec![0u8; n * n];
        for i in 0..n {
            out[i * n + i] = 1;
        }
        out
    }

    /// Determinant by Gaussian elimination.
    pub fn det(&self, m: &[u8], n: usize) -> u8 {
        let mut a = m.to_vec();
        let mut det = 1u8;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| a[r * n + col] != 0) else {
                return 0;
            };
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                }
                det = self.neg(det);
            }
            let p = a[col * n + col];
            det = self.mul(det, p);
            let pinv = self.inv(p);
            for r in col + 1..n {
                let f = self.mul(a[r * n + col], pinv);
                if f != 0 {
                    for j in col..n {
                        let v = self.mul(f, a[col * n + j]);
                        a[r * n + j] = self.sub(a[r * n + j], v);
                    }
                }
            }
        }
        det
    }
}

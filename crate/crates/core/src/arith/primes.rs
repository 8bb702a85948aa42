//! Primality, prime-power recognition and primitive roots for word-sized
//! integers.

use crate::error::{Error, Result};

const TRIAL_LIMIT: u64 = 1_000_000;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the fixed base set is exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn integer_root(n: u64, k: u32) -> u64 {
    let mut r = (n as f64).powf(1.0 / k as f64).round() as u64;
    let pow = |b: u64| -> Option<u64> { b.checked_pow(k) };
    while r > 0 && pow(r).is_none_or(|v| v > n) {
        r -= 1;
    }
    while pow(r + 1).is_some_and(|v| v <= n) {
        r += 1;
    }
    r
}

/// Returns `(p, e)` with `q = p^e`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p <= TRIAL_LIMIT && p * p <= q {
        if q % p == 0 {
            let mut rest = q;
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            return (rest == 1).then_some((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if is_prime(q) {
        return Some((q, 1));
    }
    // Every prime factor exceeds the trial limit, so q = p^e with small e.
    for e in 2..64 {
        let r = integer_root(q, e);
        if r < 2 {
            break;
        }
        if r.checked_pow(e) == Some(q) && is_prime(r) {
            return Some((r, e));
        }
    }
    None
}

/// Distinct prime factors of `n` by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Smallest generator of `(Z/pZ)^*`.
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let factors = prime_factors(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|&f| pow_mod(g, (p - 1) / f, p) != 1))
        .expect("a prime has a primitive root")
}

/// Smallest prime `p > lower` with `p ≡ 1 (mod m)`.
pub fn prime_congruent_one(m: u64, lower: u64) -> u64 {
    let mut p = (lower / m) * m + 1;
    if p <= lower {
        p += m;
    }
    while !is_prime(p) {
        p += m;
    }
    p
}

/// A validated prime power `q = p^e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldParameter {
    pub q: u64,
    pub p: u64,
    pub e: u32,
}

impl FieldParameter {
    pub fn new(q: u64) -> Result<Self> {
        let (p, e) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Ok(Self { q, p, e })
    }

    /// Checks `gcd(a, q) = 1`, the standing hypothesis for semisimple torsion.
    pub fn require_coprime(&self, what: &'static str, a: u64) -> Result<()> {
        let g = super::gcd(a, self.q);
        if g != 1 {
            return Err(Error::NotCoprime { what, a, q: self.q, gcd: g });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_powers() {
        assert!(is_prime(2) && is_prime(337) && is_prime(1_000_000_007));
        assert!(!is_prime(1) && !is_prime(561) && !is_prime(3_215_031_751));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(64), Some((2, 6)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
        // (10^6 + 3)^2 has no factor below the trial limit.
        assert_eq!(prime_power(1_000_003 * 1_000_003), Some((1_000_003, 2)));
        assert_eq!(prime_power(1_000_003 * 1_000_033), None);
    }

    #[test]
    fn roots_and_congruent_primes() {
        assert_eq!(primitive_root(7), 3);
        assert_eq!(primitive_root(337), 10);
        assert_eq!(prime_congruent_one(84, 336), 337);
        assert_eq!(prime_congruent_one(6, 12), 13);
    }

    #[test]
    fn field_parameter_rejects() {
        assert!(FieldParameter::new(6).is_err());
        let f = FieldParameter::new(9).unwrap();
        assert!(f.require_coprime("t", 4).is_ok());
        assert!(matches!(f.require_coprime("t", 6), Err(Error::NotCoprime { gcd: 3, .. })));
    }
}

// Independent oracles shared by the integration tests. None of these reuse
// the library's closed forms.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use fgc_core::dimension::{conjugate, partitions};

/// `best[e]` = min `sum m_i^2` over `(m_1..m_a)` with `sum m_i = n` and
/// `sum i m_i = e (mod a)`; exhaustive dynamic programming over the parts.
pub fn centralizer_by_det(n: u64, a: u64) -> Vec<Option<u64>> {
    let (n, a) = (n as usize, a as usize);
    // dp[s][e]: best cost using the parts processed so far, total s, residue e
    let mut dp = vec![vec![None::<u64>; a]; n + 1];
    dp[0][0] = Some(0);
    for i in 1..=a {
        let mut next = vec![vec![None::<u64>; a]; n + 1];
        for s in 0..=n {
            for e in 0..a {
                let Some(c) = dp[s][e] else { continue };
                for m in 0..=(n - s) {
                    let e2 = (e + i * m) % a;
                    let c2 = c + (m * m) as u64;
                    let slot = &mut next[s + m][e2];
                    if slot.map_or(true, |v| c2 < v) {
                        *slot = Some(c2);
                    }
                }
            }
        }
        dp = next;
    }
    dp[n].clone()
}

fn lcm(a: u64, b: u64) -> u64 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

/// Min of `sum_i dim C(z_i)` over torsion tuples whose determinants multiply to 1.
pub fn tuple_min_sum(periods: &[u64], n: u64) -> u64 {
    let l = periods.iter().fold(1, |acc, &a| lcm(acc, a));
    let mut dp = vec![None::<u64>; l as usize];
    dp[0] = Some(0);
    for &a in periods {
        let table = centralizer_by_det(n, a);
        let mut next = vec![None::<u64>; l as usize];
        for (r, c) in dp.iter().enumerate() {
            let Some(c) = c else { continue };
            for (e, v) in table.iter().enumerate() {
                let Some(v) = v else { continue };
                let r2 = (r as u64 + e as u64 * (l / a)) % l;
                let slot = &mut next[r2 as usize];
                if slot.map_or(true, |x| c + v < x) {
                    *slot = Some(c + v);
                }
            }
        }
        dp = next;
    }
    dp[0].expect("the identity tuple is always available")
}

/// `dim C(u)` for a unipotent of Jordan type `lambda`: `sum_{i,j} min(lambda_i, lambda_j)`.
pub fn unipotent_centralizer(lambda: &[u64]) -> u64 {
    lambda.iter().map(|&x| lambda.iter().map(|&y| x.min(y)).sum::<u64>()).sum()
}

/// `alpha(L)` by listing every tuple of Jordan types, one per block.
pub fn alpha_oracle(blocks: &[u64]) -> BigRational {
    let n: u64 = blocks.iter().sum();
    let choices: Vec<Vec<Vec<u64>>> = blocks.iter().map(|&m| partitions(m)).collect();
    let mut best = BigRational::zero();
    let mut idx = vec![0usize; blocks.len()];
    loop {
        let tuple: Vec<&Vec<u64>> = idx.iter().zip(&choices).map(|(&i, c)| &c[i]).collect();
        let trivial = tuple.iter().all(|p| p.iter().all(|&x| x == 1));
        if !trivial {
            let dim_l: u64 = tuple
                .iter()
                .zip(blocks)
                .map(|(p, &m)| m * m - unipotent_centralizer(p))
                .sum();
            let mut merged: Vec<u64> = tuple.iter().flat_map(|p| p.iter().copied()).collect();
            merged.sort_unstable_by(|x, y| y.cmp(x));
            let dim_g = n * n - unipotent_centralizer(&merged);
            let v = BigRational::new(BigInt::from(dim_l), BigInt::from(dim_g));
            if v > best {
                best = v;
            }
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return best;
            }
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Sanity link between the two centralizer descriptions.
pub fn centralizer_via_conjugate(lambda: &[u64]) -> u64 {
    conjugate(lambda).iter().map(|c| c * c).sum()
}

/// Multisets of size `r` drawn from `lo..=hi`, sorted.
pub fn multisets(r: usize, lo: u64, hi: u64) -> Vec<Vec<u64>> {
    if r == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in lo..=hi {
        for mut rest in multisets(r - 1, first, hi) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Smallest prime power `q >= 3` coprime to every period.
pub fn smallest_coprime_q(periods: &[u64]) -> u64 {
    [3u64, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23]
        .into_iter()
        .find(|&q| periods.iter().all(|&a| gcd(a, q) == 1))
        .expect("a listed prime power is coprime")
}

pub fn gcd(mut x: u64, mut y: u64) -> u64 {
    while y != 0 {
        (x, y) = (y, x % y);
    }
    x
}

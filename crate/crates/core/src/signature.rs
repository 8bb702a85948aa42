//! Signatures `(g; a_1, ..., a_r)` of cocompact oriented Fuchsian groups.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::lcm_all;
use crate::error::{Error, Result};

/// Genus plus a sorted list of periods, each at least 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FuchsianSignature {
    genus: u64,
    periods: Vec<u64>,
}

impl FuchsianSignature {
    pub fn new(genus: u64, mut periods: Vec<u64>) -> Result<Self> {
        if let Some(&bad) = periods.iter().find(|&&a| a < 2) {
            return Err(Error::DomainError(format!("period {bad} is smaller than 2")));
        }
        periods.sort_unstable();
        Ok(Self { genus, periods })
    }

    pub fn genus(&self) -> u64 {
        self.genus
    }

    pub fn periods(&self) -> &[u64] {
        &self.periods
    }

    pub fn r(&self) -> usize {
        self.periods.len()
    }

    /// `2 - 2g - sum (1 - 1/a_i)`.
    pub fn euler_characteristic(&self) -> BigRational {
        let mut chi = BigRational::from_integer(BigInt::from(2) - BigInt::from(2 * self.genus));
        for &a in &self.periods {
            chi -= BigRational::one() - BigRational::new(BigInt::one(), BigInt::from(a));
        }
        chi
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.euler_characteristic().is_negative()
    }

    /// Least common multiple of the periods, 1 when there are none.
    pub fn period_lcm(&self) -> u64 {
        lcm_all(&self.periods)
    }

    /// The parity sign: `-1` exactly when every even period divides `n` and
    /// the quotients `n / a_i` over even periods have odd sum.
    pub fn sigma(&self, n: u64) -> i64 {
        let mut total = 0u64;
        for &a in self.periods.iter().filter(|&&a| a % 2 == 0) {
            if n % a != 0 {
                return 1;
            }
            total += n / a;
        }
        if total % 2 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn is_on_excluded_list(&self) -> bool {
        self.genus == 0 && EXCLUDED.iter().any(|e| *e == self.periods.as_slice())
    }

    /// Hypothesis of the positive-genus estimate: genus 1 needs a period.
    pub fn satisfies_positive_genus_hypothesis(&self) -> bool {
        match self.genus {
            0 => false,
            1 => !self.periods.is_empty(),
            _ => true,
        }
    }
}

impl fmt::Display for FuchsianSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let periods: Vec<String> = self.periods.iter().map(u64::to_string).collect();
        write!(f, "{};{}", self.genus, periods.join(","))
    }
}

impl FromStr for FuchsianSignature {
    type Err = Error;

    /// Parses `g;a1,a2,...`; the period list may be empty (`2;`) and the
    /// semicolon may be omitted for `r = 0`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (g, rest) = s.split_once(';').unwrap_or((s, ""));
        let genus = g
            .trim()
            .parse::<u64>()
            .map_err(|_| Error::Parse(format!("bad genus in signature {s:?}")))?;
        let periods = rest
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty() && *t != "-")
            .map(|t| {
                t.parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad period {t:?} in signature {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(genus, periods)
    }
}

macro_rules! excluded_list {
    ($($t:expr),* $(,)?) => { &[$(&$t),*] };
}

/// Genus-0 period multisets on which the inequality method fails: 31
/// triangle groups and one quadrilateral group.
pub const EXCLUDED: &[&[u64]] = excluded_list![
    [2, 3, 7], [2, 3, 8], [2, 3, 9], [2, 3, 10], [2, 3, 11], [2, 3, 12],
    [2, 3, 13], [2, 3, 14], [2, 3, 15], [2, 3, 16], [2, 3, 17], [2, 3, 18],
    [2, 3, 19], [2, 3, 20], [2, 3, 21], [2, 3, 22], [2, 3, 23], [2, 3, 24],
    [2, 4, 5], [2, 4, 6], [2, 4, 7], [2, 4, 8], [2, 4, 9],
    [2, 5, 5], [2, 5, 6], [2, 5, 7],
    [2, 6, 6],
    [3, 3, 4], [3, 3, 5], [3, 3, 6],
    [3, 4, 4],
    [2, 2, 2, 3],
];

/// The longer list from the hand argument that avoids machine-certified
/// bounds, kept for comparison only: `(a, b, c_min, c_max)` ranges of
/// triples plus sporadic triples and the two quadrilateral exceptions.
pub const EARLIER_TRIPLE_RANGES: &[(u64, u64, u64, u64)] = &[
    (2, 3, 7, 295),
    (2, 4, 5, 26),
    (2, 5, 5, 15),
    (2, 6, 6, 11),
    (3, 3, 4, 11),
];
pub const EARLIER_SPORADIC: &[[u64; 3]] = &[
    [2, 7, 7], [2, 7, 8], [2, 7, 9], [2, 7, 10], [2, 8, 8],
    [3, 4, 4], [3, 4, 5], [3, 4, 6], [3, 4, 7], [3, 5, 5], [4, 4, 4],
];
pub const EARLIER_QUADRUPLES: &[[u64; 4]] = &[[2, 2, 2, 3], [2, 2, 2, 4]];

/// Every period multiset on the earlier hand-argument list.
pub fn earlier_excluded() -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = EARLIER_TRIPLE_RANGES
        .iter()
        .flat_map(|&(a, b, lo, hi)| (lo..=hi).map(move |c| vec![a, b, c]))
        .collect();
    out.extend(EARLIER_SPORADIC.iter().map(|t| t.to_vec()));
    out.extend(EARLIER_QUADRUPLES.iter().map(|t| t.to_vec()));
    out
}

/// Signatures on the excluded list as values.
pub fn excluded_signatures() -> Vec<FuchsianSignature> {
    EXCLUDED
        .iter()
        .map(|p| FuchsianSignature::new(0, p.to_vec()).expect("list entries are valid"))
        .collect()
}

/// `true` when `chi < 0` for the given periods in genus 0, exactly.
pub fn genus0_hyperbolic(periods: &[u64]) -> bool {
    let mut s = BigRational::zero();
    for &a in periods {
        s += BigRational::new(BigInt::one(), BigInt::from(a));
    }
    s < BigRational::from_integer(BigInt::from(periods.len() as i64 - 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational;
    use proptest::prelude::*;

    fn sig(s: &str) -> FuchsianSignature {
        s.parse().unwrap()
    }

    #[test]
    fn euler_characteristics() {
        assert_eq!(sig("0;2,3,7").euler_characteristic(), rational(-1, 42));
        assert_eq!(sig("2;").euler_characteristic(), rational(-2, 1));
        assert_eq!(sig("0;2,2,2,3").euler_characteristic(), rational(-1, 6));
        assert!(!sig("0;2,3,6").is_hyperbolic());
    }

    #[test]
    fn lcm_and_sigma() {
        assert_eq!(sig("0;2,3,7").period_lcm(), 42);
        assert_eq!(sig("2").period_lcm(), 1);
        assert_eq!(sig("0;6,2,4").period_lcm(), 12);
        assert_eq!(sig("0;2,4,6").sigma(12), -1);
        assert_eq!(sig("0;2,4,6").sigma(13), 1);
        assert_eq!(sig("0;3,3,5").sigma(30), 1);
    }

    #[test]
    fn excluded_list_shape() {
        let triples = EXCLUDED.iter().filter(|p| p.len() == 3).count();
        let quads = EXCLUDED.iter().filter(|p| p.len() == 4).count();
        assert_eq!((triples, quads), (31, 1));
        assert!(sig("0;7,3,2").is_on_excluded_list());
        assert!(!sig("0;2,3,25").is_on_excluded_list());
        assert!(sig("0;2,2,2,3").is_on_excluded_list());
        assert!(!sig("1;2,3,7").is_on_excluded_list());
        assert!(excluded_signatures().iter().all(|s| s.is_hyperbolic()));
        let earlier = earlier_excluded();
        assert!(EXCLUDED.iter().all(|p| earlier.iter().any(|e| e == p)));
    }

    #[test]
    fn parsing() {
        assert_eq!(sig(" 1 ; 7 ").periods(), &[7]);
        assert_eq!(sig("0;2,3,7").to_string(), "0;2,3,7");
        assert!("0;1,3".parse::<FuchsianSignature>().is_err());
        assert!("x;2".parse::<FuchsianSignature>().is_err());
    }

    proptest! {
        #[test]
        fn chi_decreases_with_periods(g in 0u64..4, ps in prop::collection::vec(2u64..30, 0..5), i in 0usize..5) {
            let s = FuchsianSignature::new(g, ps.clone()).unwrap();
            let chi = s.euler_characteristic();
            let mut bumped = ps.clone();
            if !bumped.is_empty() {
                let j = i % bumped.len();
                bumped[j] += 1;
                prop_assert!(FuchsianSignature::new(g, bumped).unwrap().euler_characteristic() < chi.clone());
            }
            prop_assert!(FuchsianSignature::new(g + 1, ps).unwrap().euler_characteristic() < chi);
        }

        #[test]
        fn sigma_has_period_two_a(ps in prop::collection::vec(2u64..9, 0..4), n in 1u64..200) {
            let s = FuchsianSignature::new(0, ps).unwrap();
            prop_assert_eq!(s.sigma(n), s.sigma(n + 2 * s.period_lcm()));
        }
    }
}

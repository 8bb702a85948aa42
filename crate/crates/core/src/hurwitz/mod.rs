//! Homomorphism counts `|Hom(Gamma, G)|` for explicit finite groups, by
//! character sums and by direct enumeration.

pub mod group;
pub mod table;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

pub use group::{ExplicitGroup, DEFAULT_GROUP_CAP};
pub use table::{compute_character_table, CharacterTable, ClassInfo, TableCaps};

use crate::arith::primes::FieldParameter;
use crate::arith::{rational, Complex};
use crate::error::{Error, Result};
use crate::signature::FuchsianSignature;
use crate::torsion::{count_tuples, gl_order};

/// Default work cap for [`brute_force_hom_count`].
pub const DEFAULT_WORK_CAP: u64 = 1_000_000_000;
/// Largest group enumerated for genus at least 2.
pub const HIGH_GENUS_ORDER_CAP: usize = 200;

fn residual_tolerance() -> BigRational {
    rational(1, 1_000_000)
}

/// `|G|^{2g-1} |C_1|...|C_r| sum_chi chi(C_1)...chi(C_r) / chi(1)^{2g+r-2}`.
pub fn hurwitz_class_count(t: &CharacterTable, genus: u64, classes: &[usize]) -> Result<BigUint> {
    if let Some(&bad) = classes.iter().find(|&&c| c >= t.class_count()) {
        return Err(Error::DomainError(format!("class index {bad} out of range")));
    }
    let value = character_sum(t, genus, classes);
    round_count(&value)
}

fn character_sum(t: &CharacterTable, genus: u64, classes: &[usize]) -> Complex {
    let prec = t.prec();
    let power = 2 * genus as i64 + classes.len() as i64 - 2;
    let mut acc = Complex::zero(prec);
    for (row, &degree) in t.values.iter().zip(t.degrees()) {
        let mut term = Complex::one(prec);
        for &c in classes {
            term = &term * &row[c];
        }
        let d = BigInt::from(degree).pow(power.unsigned_abs() as u32);
        term = if power >= 0 { term.div_int(&d) } else { term.mul_int(&d) };
        acc = &acc + &term;
    }
    let mut scale = BigRational::one();
    for &c in classes {
        scale *= BigRational::from_integer(BigInt::from(t.classes[c].size.clone()));
    }
    let order = BigRational::from_integer(BigInt::from(t.group_order.clone()));
    let mut g_power = BigRational::one();
    for _ in 0..(2 * genus as i64 - 1).unsigned_abs() {
        g_power *= &order;
    }
    scale = if genus == 0 { scale / g_power } else { scale * g_power };
    Complex::new(acc.re.mul_rational(&scale), acc.im.mul_rational(&scale))
}

fn round_count(value: &Complex) -> Result<BigUint> {
    let (n, residual) = value.re.nearest_integer();
    let tol = residual_tolerance();
    let im = value.im.abs_upper();
    if residual >= tol || im >= tol || n.is_negative() {
        return Err(Error::NonIntegralResult {
            residual: format!("{:.3e} (imaginary part {:.3e})", residual.to_f64().unwrap_or(f64::NAN), im.to_f64().unwrap_or(f64::NAN)),
        });
    }
    Ok(n.magnitude().clone())
}

/// Indicator `(1/m) sum_lambda prod_i lambda(C_i)` over the `m` linear
/// characters; for `GL_n(q)` with `q > 2` or `n != 2` it is 1 exactly when
/// the determinants of the classes multiply to 1.
fn det_indicator(t: &CharacterTable, linear: &[usize], classes: &[usize]) -> Result<bool> {
    let prec = t.prec();
    let mut acc = Complex::zero(prec);
    for &l in linear {
        let mut term = Complex::one(prec);
        for &c in classes {
            term = &term * &t.values[l][c];
        }
        acc = &acc + &term;
    }
    let m = BigInt::from(linear.len());
    let ind = acc.div_int(&m);
    let tol = t.tolerance();
    let one = Complex::one(prec);
    if ind.abs_upper() < tol {
        Ok(false)
    } else if (&ind - &one).abs_upper() < tol {
        Ok(true)
    } else {
        Err(Error::AssertionFailure("linear-character indicator is neither 0 nor 1".into()))
    }
}

/// Sum of [`hurwitz_class_count`] over class tuples whose element orders
/// divide the periods. With `det_filter`, tuples whose linear-character
/// indicator vanishes are skipped.
pub fn total_hom_count(t: &CharacterTable, sig: &FuchsianSignature, det_filter: bool) -> Result<BigUint> {
    let candidates: Vec<Vec<usize>> = sig
        .periods()
        .iter()
        .map(|&a| (0..t.class_count()).filter(|&c| a % t.classes[c].element_order == 0).collect())
        .collect();
    let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
    for cands in &candidates {
        tuples = tuples
            .into_iter()
            .flat_map(|prefix| {
                cands.iter().map(move |&c| {
                    let mut v = prefix.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    let linear = t.linear_rows();
    let counts: Vec<BigUint> = tuples
        .par_iter()
        .map(|tuple| {
            if det_filter && !det_indicator(t, &linear, tuple)? {
                return Ok(BigUint::zero());
            }
            hurwitz_class_count(t, sig.genus(), tuple)
        })
        .collect::<Result<_>>()?;
    Ok(counts.into_iter().sum())
}

/// `(q - 1) J_{q,n}(a_1, ..., a_r) |GL_n(q)|^{2g-1}`, exact (a proper
/// fraction is possible in genus 0).
pub fn linear_contribution(sig: &FuchsianSignature, field: &FieldParameter, n: u64) -> Result<BigRational> {
    let j = count_tuples(sig.periods(), field, n)?;
    let order = BigRational::from_integer(BigInt::from(gl_order(n, field.q)));
    let mut out = BigRational::from_integer(BigInt::from(j * BigUint::from(field.q - 1)));
    if sig.genus() == 0 {
        out /= order;
    } else {
        for _ in 0..2 * sig.genus() - 1 {
            out *= &order;
        }
    }
    Ok(out)
}

/// Counts tuples `(x_1, y_1, ..., x_g, y_g, z_1, ..., z_r)` with
/// `z_i^{a_i} = 1` and `[x_1,y_1]...[x_g,y_g] z_1...z_r = 1`; `z_r` is
/// forced and only its order is checked.
pub fn brute_force_hom_count(g: &ExplicitGroup, sig: &FuchsianSignature, cap: u64) -> Result<BigUint> {
    let order = g.order();
    if sig.genus() >= 2 && order > HIGH_GENUS_ORDER_CAP {
        return Err(Error::CapExceeded {
            what: "group order for genus >= 2",
            size: order.to_string(),
            cap: HIGH_GENUS_ORDER_CAP.to_string(),
        });
    }
    let periods = sig.periods();
    let solutions: Vec<Vec<u32>> = periods
        .iter()
        .map(|&a| (0..order as u32).filter(|&x| a % g.element_order(x) as u64 == 0).collect())
        .collect();
    let mut work = BigUint::from(order).pow(2 * sig.genus() as u32);
    if let Some((_, head)) = solutions.split_last() {
        for s in head {
            work *= s.len();
        }
    }
    if work > BigUint::from(cap) {
        return Err(Error::CapExceeded { what: "brute-force work", size: work.to_string(), cap: cap.to_string() });
    }
    let genus = sig.genus() as usize;
    let count_from = |relator: u32| -> u64 { count_tail(g, &solutions, periods, relator, 0) };
    let total: u64 = if genus == 0 {
        count_from(g.identity())
    } else {
        (0..order as u32)
            .into_par_iter()
            .map(|x1| {
                let mut acc = 0u64;
                let mut stack = vec![0u32; 2 * genus];
                stack[0] = x1;
                commutator_tuples(g, &mut stack, 1, &mut |rel| acc += count_from(rel));
                acc
            })
            .sum()
    };
    Ok(BigUint::from(total))
}

/// Visits the relator `[x_1,y_1]...[x_g,y_g]` of every tuple extending the
/// first `filled` entries.
fn commutator_tuples(g: &ExplicitGroup, xs: &mut [u32], filled: usize, visit: &mut dyn FnMut(u32)) {
    if filled == xs.len() {
        let mut rel = g.identity();
        for pair in xs.chunks(2) {
            let (x, y) = (pair[0], pair[1]);
            let c = g.mul(g.mul(x, y), g.mul(g.inverse(x), g.inverse(y)));
            rel = g.mul(rel, c);
        }
        visit(rel);
        return;
    }
    for v in 0..g.order() as u32 {
        xs[filled] = v;
        commutator_tuples(g, xs, filled + 1, visit);
    }
}

fn count_tail(g: &ExplicitGroup, solutions: &[Vec<u32>], periods: &[u64], prefix: u32, i: usize) -> u64 {
    let r = periods.len();
    if r == 0 {
        return u64::from(prefix == g.identity());
    }
    if i == r - 1 {
        let z = g.inverse(prefix);
        return u64::from(periods[i] % g.element_order(z) as u64 == 0);
    }
    solutions[i].iter().map(|&z| count_tail(g, solutions, periods, g.mul(prefix, z), i + 1)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(s: &str) -> FuchsianSignature {
        s.parse().unwrap()
    }

    fn s3() -> (ExplicitGroup, CharacterTable) {
        let g = ExplicitGroup::symmetric(3).unwrap();
        let t = compute_character_table(&g, 50, TableCaps::default()).unwrap();
        (g, t)
    }

    #[test]
    fn symmetric_three_counts() {
        let (g, t) = s3();
        // a product of three transpositions is odd, so never trivial
        assert_eq!(hurwitz_class_count(&t, 0, &[1, 1, 1]).unwrap(), BigUint::zero());
        assert_eq!(hurwitz_class_count(&t, 0, &[1, 1, 2]).unwrap(), BigUint::from(6u32));
        for classes in [[1, 1, 1], [1, 1, 2], [2, 2, 2], [1, 2, 2]] {
            let mut direct = 0u32;
            for x in 0..6 {
                for y in 0..6 {
                    let z = g.inverse(g.mul(x, y));
                    direct += u32::from([x, y, z].iter().zip(&classes).all(|(&e, &c)| g.class_of(e) == c));
                }
            }
            assert_eq!(hurwitz_class_count(&t, 0, &classes).unwrap(), BigUint::from(direct), "{classes:?}");
        }
        assert_eq!(hurwitz_class_count(&t, 0, &[0]).unwrap(), BigUint::one());
        assert_eq!(hurwitz_class_count(&t, 1, &[]).unwrap(), BigUint::from(18u32));
        assert_eq!(total_hom_count(&t, &sig("0;2,2,2"), false).unwrap(), BigUint::from(10u32));
        assert_eq!(total_hom_count(&t, &sig("1;2"), false).unwrap(), BigUint::from(18u32));
        assert_eq!(total_hom_count(&t, &sig("1"), false).unwrap(), BigUint::from(18u32));
        assert_eq!(brute_force_hom_count(&g, &sig("0;2,2,2"), DEFAULT_WORK_CAP).unwrap(), BigUint::from(10u32));
        assert_eq!(brute_force_hom_count(&g, &sig("1;2"), DEFAULT_WORK_CAP).unwrap(), BigUint::from(18u32));
    }

    #[test]
    fn linear_contributions() {
        let f = |q| FieldParameter::new(q).unwrap();
        assert_eq!(linear_contribution(&sig("0;2,2,2"), &f(3), 1).unwrap(), rational(4, 1));
        assert_eq!(linear_contribution(&sig("1;2"), &f(5), 1).unwrap(), rational(16, 1));
        assert_eq!(linear_contribution(&sig("2"), &f(3), 2).unwrap(), rational(221184, 1));
    }

    #[test]
    fn general_linear_agreement() {
        let g = ExplicitGroup::general_linear(2, 3, DEFAULT_GROUP_CAP).unwrap();
        let t = compute_character_table(&g, 50, TableCaps::default()).unwrap();
        for s in ["0;2,2,2", "0;2,4,4", "1;2", "0;3,3,4"] {
            let s = sig(s);
            let chars = total_hom_count(&t, &s, false).unwrap();
            assert_eq!(chars, brute_force_hom_count(&g, &s, DEFAULT_WORK_CAP).unwrap(), "{s}");
            assert_eq!(chars, total_hom_count(&t, &s, true).unwrap(), "{s}");
        }
    }

    #[test]
    fn caps_and_errors() {
        let (g, t) = s3();
        assert!(matches!(brute_force_hom_count(&g, &sig("1;2"), 10), Err(Error::CapExceeded { .. })));
        let big = ExplicitGroup::general_linear(2, 5, DEFAULT_GROUP_CAP).unwrap();
        assert!(matches!(brute_force_hom_count(&big, &sig("2"), DEFAULT_WORK_CAP), Err(Error::CapExceeded { .. })));
        assert!(hurwitz_class_count(&t, 0, &[7]).is_err());
        let mut low = t.clone();
        low.precision_digits = 8;
        let coarse = CharacterTable::from_json(&low.to_json().unwrap()).unwrap();
        assert!(matches!(hurwitz_class_count(&coarse, 3, &[1]), Err(Error::NonIntegralResult { .. })));
    }

    #[test]
    fn class_count_is_symmetric() {
        let g = ExplicitGroup::general_linear(3, 2, DEFAULT_GROUP_CAP).unwrap();
        let t = compute_character_table(&g, 50, TableCaps::default()).unwrap();
        let a = hurwitz_class_count(&t, 0, &[1, 2, 4]).unwrap();
        let b = hurwitz_class_count(&t, 0, &[4, 1, 2]).unwrap();
        let c = hurwitz_class_count(&t, 0, &[2, 4, 1]).unwrap();
        assert_eq!((&a, &a), (&b, &c));
        assert!(!a.is_zero());
    }
}

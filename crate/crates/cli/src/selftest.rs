//! Oracle-equivalence suites: each check compares a fast path with an
//! independent slow one on small inputs.

use std::time::Instant;

use serde::Serialize;

use fgc_core::arith::primes::FieldParameter;
use fgc_core::dimension::{hom_variety_dim, optimal_tuple};
use fgc_core::hurwitz::{
    brute_force_hom_count, compute_character_table, total_hom_count, ExplicitGroup, TableCaps, DEFAULT_GROUP_CAP,
    DEFAULT_WORK_CAP,
};
use fgc_core::signature::{genus0_hyperbolic, EXCLUDED};
use fgc_core::torsion::{brute_force_torsion_by_det, count_torsion_by_det, DEFAULT_BRUTE_FORCE_CAP};
use fgc_core::verifier::{check_triple, default_eps, Gate, DEFAULT_DEPTH};
use fgc_core::FuchsianSignature;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Serialize)]
pub struct SelftestReport {
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut lines: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                format!("{tag} {} ({} cases, {:.2}s) {}", c.name, c.cases, c.seconds, c.detail)
            })
            .collect();
        lines.push(if self.all_passed() { "all checks passed".into() } else { "some checks FAILED".into() });
        lines.join("\n")
    }
}

type Check = Result<(usize, String), String>;

fn timed(name: &str, f: impl FnOnce() -> Check) -> CheckResult {
    let start = Instant::now();
    let (passed, cases, detail) = match f() {
        Ok((cases, detail)) => (true, cases, detail),
        Err(detail) => (false, 0, detail),
    };
    CheckResult { name: name.into(), passed, cases, detail, seconds: start.elapsed().as_secs_f64() }
}

fn err(e: fgc_core::Error) -> String {
    e.to_string()
}

fn torsion_vs_brute(level: Level) -> Check {
    let cap = match level {
        Level::Quick => DEFAULT_BRUTE_FORCE_CAP / 10,
        Level::Full => DEFAULT_BRUTE_FORCE_CAP,
    };
    let cases: &[(u64, u64, u64)] = match level {
        Level::Quick => &[(2, 3, 2), (3, 2, 2), (4, 3, 2), (3, 4, 2), (2, 5, 2), (3, 2, 3)],
        Level::Full => &[(2, 3, 2), (3, 2, 2), (4, 3, 2), (3, 4, 2), (2, 5, 2), (3, 2, 3), (5, 4, 2), (6, 5, 2), (2, 3, 3), (3, 4, 3)],
    };
    for &(a, q, n) in cases {
        let f = FieldParameter::new(q).map_err(err)?;
        let fast = count_torsion_by_det(a, &f, n).map_err(err)?;
        let slow = brute_force_torsion_by_det(a, &f, n, cap).map_err(err)?;
        if fast != slow {
            return Err(format!("a={a} q={q} n={n}: formula {fast:?}, enumeration {slow:?}"));
        }
    }
    Ok((cases.len(), "per-determinant counts agree".into()))
}

fn hurwitz_vs_brute(level: Level) -> Check {
    let mut groups = vec![ExplicitGroup::symmetric(3).map_err(err)?, ExplicitGroup::cyclic(6).map_err(err)?];
    if level == Level::Full {
        groups.push(ExplicitGroup::general_linear(2, 3, DEFAULT_GROUP_CAP).map_err(err)?);
    }
    let cap = match level {
        Level::Quick => DEFAULT_WORK_CAP / 10,
        Level::Full => DEFAULT_WORK_CAP,
    };
    let sigs = ["0;2,3", "0;2,2,3", "0;2,3,3", "1;2", "1;", "0;3,3,3", "0;2,2,2,2"];
    let mut cases = 0;
    for g in &groups {
        let table = compute_character_table(g, 30, TableCaps::default()).map_err(err)?;
        for s in sigs {
            let sig: FuchsianSignature = s.parse().map_err(err)?;
            let fast = total_hom_count(&table, &sig, false).map_err(err)?;
            let slow = brute_force_hom_count(g, &sig, cap).map_err(err)?;
            if fast != slow {
                return Err(format!("{} {s}: character sum {fast}, enumeration {slow}", g.name));
            }
            cases += 1;
        }
    }
    Ok((cases, format!("{} groups", groups.len())))
}

fn dimension_vs_tuples(level: Level) -> Check {
    let n_max = match level {
        Level::Quick => 12,
        Level::Full => 30,
    };
    let sigs = ["0;2,3,7", "0;2,4,5", "0;3,3,4", "0;2,2,2,3", "1;2", "2;", "0;2,3,8", "1;3,3"];
    let mut cases = 0;
    for s in sigs {
        let sig: FuchsianSignature = s.parse().map_err(err)?;
        let (g, r) = (sig.genus() as i64, sig.r() as i64);
        for n in 1..=n_max {
            if sig.periods().is_empty() {
                continue;
            }
            let d = hom_variety_dim(&sig, n).map_err(err)?.dimension;
            let t = optimal_tuple(&sig, n).map_err(err)?;
            let via = 1 + (2 * g - 1 + r) * (n * n) as i64 - t.min_sum as i64;
            if d != via {
                return Err(format!("{s} n={n}: formula {d}, optimal tuples {via}"));
            }
            cases += 1;
        }
    }
    Ok((cases, format!("n <= {n_max}")))
}

fn triples_vs_list(level: Level) -> Check {
    let top = match level {
        Level::Quick => 10,
        Level::Full => 16,
    };
    let eps = default_eps();
    let mut cases = 0;
    for a1 in 2..=top {
        for a2 in a1..=top {
            for a3 in a2..=top {
                if !genus0_hyperbolic(&[a1, a2, a3]) {
                    continue;
                }
                let listed = EXCLUDED.iter().any(|t| t[..] == [a1, a2, a3]);
                let passed = check_triple(a1, a2, a3, &eps, DEFAULT_DEPTH, Gate::Proof).map_err(err)?.passed();
                if passed == listed {
                    return Err(format!("({a1},{a2},{a3}): listed {listed}, verifier passed {passed}"));
                }
                cases += 1;
            }
        }
    }
    Ok((cases, format!("a3 <= {top}")))
}

pub fn run(level: Level) -> SelftestReport {
    let checks = vec![
        timed("torsion counts vs enumeration", || torsion_vs_brute(level)),
        timed("character sums vs enumeration", || hurwitz_vs_brute(level)),
        timed("dimension formula vs optimal tuples", || dimension_vs_tuples(level)),
        timed("triple verifier vs exceptional list", || triples_vs_list(level)),
    ];
    SelftestReport { checks }
}

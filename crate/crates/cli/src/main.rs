//! `fgc`: command-line front end for fgc-core.
//!
//! Exit codes: 0 on success, 1 when a computation fails, 2 on usage errors.

mod config;
mod selftest;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use fgc_core::arith::primes::FieldParameter;
use fgc_core::arith::{parse_rational, rational_to_string};
use fgc_core::dimension::{alpha_levi, hom_variety_dim, optimal_tuple, LeviShape};
use fgc_core::hurwitz::table::CharacterTable;
use fgc_core::hurwitz::{
    brute_force_hom_count, compute_character_table, hurwitz_class_count, total_hom_count, ExplicitGroup,
    TableCaps, DEFAULT_GROUP_CAP, DEFAULT_WORK_CAP,
};
use fgc_core::modforms::{predict_hom_count, predict_j, predict_tuples, Prediction};
use fgc_core::torsion::{count_torsion, count_tuples, orbit_structure, torsion_report};
use fgc_core::verifier::{
    check_positive_genus, scan_genus0, verify_table, CertCache, CertConfig, Gate, DEFAULT_DEPTH,
};
use fgc_core::{Error, FuchsianSignature};

use config::{ConfigError, Format, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "fgc", version, about = "Torsion and Fuchsian-group representation counts in GL_n(q)")]
struct Cli {
    /// Flat key=value file (cache_dir, digits, trunc, jobs, format).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Cache directory; FGC_CACHE is used when absent.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Decimal digits for real-valued results.
    #[arg(long, global = true)]
    digits: Option<u32>,
    /// Series truncation in exponent units.
    #[arg(long, global = true)]
    trunc: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Frobenius orbits of i -> qi on residues mod a.
    Orbits(AQ),
    /// j_{q,n,k}(a): elements with x^a = 1 and det = zeta_a^k (all k when omitted).
    #[command(name = "count-j")]
    CountJ {
        #[command(flatten)]
        aq: AQ,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: Option<u64>,
    },
    /// J_{q,n}(a_1..a_r): torsion tuples with determinant product 1.
    #[command(name = "count-J")]
    CountBigJ {
        #[arg(long, value_delimiter = ',', required = true)]
        periods: Vec<u64>,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u64,
    },
    /// Modular-form prediction for j (with --a, --k) or J (with --periods).
    Predict {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u64,
    },
    /// Exact count against prediction for n = 1..n-max, as CSV.
    Compare {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n_max: u64,
    },
    /// Predicted |Hom(Gamma, GL_n(q))|.
    #[command(name = "hom-predict")]
    HomPredict {
        #[arg(long, value_parser = parse_sig)]
        sig: FuchsianSignature,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u64,
    },
    /// Dimension of Hom(Gamma, GL_n).
    Dim {
        #[arg(long, value_parser = parse_sig)]
        sig: FuchsianSignature,
        #[arg(long)]
        n: u64,
        /// Also compute the optimal-tuple route and compare.
        #[arg(long)]
        oracle: bool,
    },
    /// alpha(L) for the Levi subgroup with the given block sizes.
    Alpha {
        #[arg(long, value_delimiter = ',', required = true)]
        shape: Vec<u64>,
    },
    /// Homomorphism counts from character tables.
    Hurwitz(HurwitzArgs),
    /// Certified inequality checks.
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
    /// Oracle-equivalence suites.
    Selftest {
        #[arg(long, default_value = "quick")]
        level: selftest::Level,
    },
    /// Inspect or clear the cache directory.
    Cache {
        #[arg(long)]
        clear: bool,
    },
}

#[derive(Args)]
struct AQ {
    #[arg(long)]
    a: u64,
    #[arg(long)]
    q: u64,
}

#[derive(Args)]
#[group(required = true, multiple = true)]
struct Target {
    #[arg(long, conflicts_with = "periods")]
    a: Option<u64>,
    #[arg(long, requires = "a")]
    k: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    periods: Option<Vec<u64>>,
}

#[derive(Args)]
struct HurwitzArgs {
    #[arg(long, value_parser = parse_sig)]
    sig: FuchsianSignature,
    /// Character table JSON file.
    #[arg(long, conflicts_with = "group")]
    table: Option<PathBuf>,
    /// gl, sym or cyclic.
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    q: Option<u64>,
    /// Restrict to one class per period, by label (e.g. 2a,2a,3a).
    #[arg(long, value_delimiter = ',')]
    classes: Option<Vec<String>>,
    /// Keep only class tuples the degree-one characters allow.
    #[arg(long)]
    det_filter: bool,
    /// Also count by direct enumeration (needs --group).
    #[arg(long)]
    brute: bool,
    /// Save the table used.
    #[arg(long)]
    save_table: Option<PathBuf>,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Certified sup bounds for 2 <= a <= a-max against the table.
    Table {
        #[arg(long, default_value_t = 100)]
        a_max: u64,
        #[command(flatten)]
        cert: CertArgs,
    },
    /// Genus-0 scan over triples up to max-a3 plus the r >= 4 reductions.
    Triples {
        #[arg(long, default_value_t = 10_000)]
        max_a3: u64,
        #[arg(long, default_value = "1e-4", value_parser = parse_eps)]
        eps: BigRational,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: u32,
        #[command(flatten)]
        cert: CertArgs,
    },
    /// The positive-genus inequality on g <= 5, r <= 10.
    PositiveGenus {
        #[command(flatten)]
        cert: CertArgs,
    },
}

#[derive(Args)]
struct CertArgs {
    /// H gate: proof or statement.
    #[arg(long, default_value = "proof")]
    gate: Gate,
    /// Refinement tolerance of per-period certificates.
    #[arg(long, default_value = "1e-4", value_parser = parse_eps)]
    eps_refine: BigRational,
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    cert_depth: u32,
}

fn parse_sig(s: &str) -> Result<FuchsianSignature, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_eps(s: &str) -> Result<BigRational, String> {
    let x = parse_rational(s)
        .or_else(|| s.parse::<f64>().ok().and_then(BigRational::from_float))
        .ok_or_else(|| format!("bad number {s:?}"))?;
    if x <= BigRational::from_integer(0.into()) || x >= BigRational::one() {
        return Err(format!("{s} is not in (0, 1)"));
    }
    Ok(x)
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

fn json<T: Serialize>(v: &T) -> Outcome {
    serde_json::to_string_pretty(v).map_err(|e| Failure::Compute(e.to_string()))
}

fn field(q: u64) -> Result<FieldParameter, Failure> {
    Ok(FieldParameter::new(q)?)
}

struct Ctx {
    cfg: RunConfig,
}

impl Ctx {
    fn trunc(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.cfg.trunc))
    }

    fn cert_cache(&self, c: &CertArgs) -> CertCache {
        let config = CertConfig { eps_refine: c.eps_refine.clone(), max_depth: c.cert_depth, gate: c.gate };
        match &self.cfg.cache_dir {
            Some(dir) => CertCache::with_dir(config, dir.join("certs")),
            None => CertCache::new(config),
        }
    }

    fn text(&self) -> bool {
        self.cfg.format_or(Format::Text) != Format::Json
    }
}

#[derive(Serialize)]
struct PredictionOut {
    target: String,
    q: u64,
    n: u64,
    mantissa: String,
    exponent: String,
    tail_estimate: f64,
    empty: bool,
}

fn prediction_for(ctx: &Ctx, t: &Target, f: &FieldParameter, n: u64) -> Result<(String, Prediction, BigUint), Failure> {
    let trunc = ctx.trunc();
    let d = ctx.cfg.digits;
    match (&t.a, &t.periods) {
        (Some(a), None) => {
            let k = t.k.unwrap_or(0);
            let p = predict_j(*a, f, n, k, &trunc, d)?;
            Ok((format!("j(a={a},k={k})"), p, count_torsion(*a, f, n, k)?))
        }
        (None, Some(ps)) => {
            let p = predict_tuples(ps, f, n, &trunc, d)?;
            Ok((format!("J({})", join(ps)), p, count_tuples(ps, f, n)?))
        }
        _ => Err(Failure::Usage("give either --a [--k] or --periods".into())),
    }
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn run(ctx: &Ctx, cmd: Command) -> Outcome {
    let text = ctx.text();
    match cmd {
        Command::Orbits(AQ { a, q }) => {
            let st = orbit_structure(a, &field(q)?)?;
            if !text {
                return json(&st);
            }
            let orbits: Vec<String> = st.orbits.iter().map(|o| format!("{{{}}}", join(o))).collect();
            Ok(orbits.join(" "))
        }
        Command::CountJ { aq, n, k } => {
            let f = field(aq.q)?;
            match k {
                Some(k) if text => Ok(count_torsion(aq.a, &f, n, k)?.to_string()),
                _ => {
                    let rep = torsion_report(aq.a, &f, n)?;
                    if !text {
                        return json(&rep);
                    }
                    let mut lines: Vec<String> = rep.per_det.iter().map(|d| format!("k={} {}", d.k, d.count)).collect();
                    lines.push(format!("total {}", rep.total));
                    Ok(lines.join("\n"))
                }
            }
        }
        Command::CountBigJ { periods, q, n } => {
            let c = count_tuples(&periods, &field(q)?, n)?;
            if text {
                Ok(c.to_string())
            } else {
                json(&serde_json::json!({ "periods": periods, "q": q, "n": n, "count": c.to_string() }))
            }
        }
        Command::Predict { target, q, n } => {
            let f = field(q)?;
            let (label, p, _) = prediction_for(ctx, &target, &f, n)?;
            let r = p.to_report();
            let out = PredictionOut {
                target: label,
                q,
                n,
                mantissa: r.mantissa,
                exponent: r.exponent,
                tail_estimate: r.tail_estimate,
                empty: r.empty,
            };
            if text {
                Ok(format!("{} * {}^({})", out.mantissa, q, out.exponent))
            } else {
                json(&out)
            }
        }
        Command::Compare { target, q, n_max } => {
            let f = field(q)?;
            let mut rows = vec!["n,exact_count,predicted_mantissa,predicted_exponent,ratio,ratio_minus_one".to_string()];
            let digits = ctx.cfg.digits.min(30);
            for n in 1..=n_max {
                let (_, p, exact) = prediction_for(ctx, &target, &f, n)?;
                let (ratio, minus) = match p.ratio_to(&exact, q) {
                    Some(r) => {
                        let m = &r - &fgc_core::arith::Real::one(r.prec());
                        (r.to_decimal(digits), m.to_scientific(6))
                    }
                    None => ("nan".into(), "nan".into()),
                };
                rows.push(format!(
                    "{n},{exact},{},{},{ratio},{minus}",
                    p.mantissa.to_scientific(digits as usize),
                    rational_to_string(&p.exponent)
                ));
            }
            Ok(rows.join("\n"))
        }
        Command::HomPredict { sig, q, n } => {
            let f = field(q)?;
            let h = predict_hom_count(&sig, &f, n, &ctx.trunc(), ctx.cfg.digits)?;
            let d = ctx.cfg.digits;
            let out = serde_json::json!({
                "signature": sig.to_string(),
                "q": q,
                "n": n,
                "mantissa": h.prediction.mantissa.to_decimal(d),
                "exponent": rational_to_string(&h.prediction.exponent),
                "c": h.c.to_decimal(d),
                "e": rational_to_string(&h.e),
                "f_value": h.f_value.to_decimal(d),
                "excluded": h.excluded,
            });
            if text {
                let flag = if h.excluded { " (on the exceptional list)" } else { "" };
                Ok(format!(
                    "{} * {}^({}){flag}",
                    h.prediction.mantissa.to_decimal(d),
                    q,
                    rational_to_string(&h.prediction.exponent)
                ))
            } else {
                json(&out)
            }
        }
        Command::Dim { sig, n, oracle } => {
            let d = hom_variety_dim(&sig, n)?;
            let route = if oracle {
                let t = optimal_tuple(&sig, n)?;
                let g = sig.genus() as i64;
                let r = sig.r() as i64;
                let via = 1 + (2 * g - 1 + r) * (n * n) as i64 - t.min_sum as i64;
                if via != d.dimension {
                    return Err(Failure::Compute(format!("formula {} but optimal tuples give {via}", d.dimension)));
                }
                Some(t)
            } else {
                None
            };
            if text {
                if d.small_n {
                    eprintln!("note: n < 2A, outside the large-n guarantee");
                }
                let mut s = d.dimension.to_string();
                if let Some(t) = route {
                    s += &format!("\noptimal tuples: min sum {}, witnesses {:?}", t.min_sum, t.witnesses);
                }
                Ok(s)
            } else {
                json(&serde_json::json!({ "dimension": d, "optimal_tuple": route }))
            }
        }
        Command::Alpha { shape } => {
            let res = alpha_levi(&LeviShape::new(shape)?)?;
            if text {
                Ok(format!("{} witness {:?}", rational_to_string(&res.alpha), res.witness))
            } else {
                json(&res)
            }
        }
        Command::Hurwitz(h) => hurwitz(ctx, h),
        Command::Verify { what } => verify(ctx, what),
        Command::Selftest { level } => {
            let rep = selftest::run(level);
            let body = if text { rep.to_text() } else { json(&rep)? };
            if rep.all_passed() {
                Ok(body)
            } else {
                Err(Failure::Compute(body))
            }
        }
        Command::Cache { clear } => {
            let Some(dir) = &ctx.cfg.cache_dir else {
                return Ok("no cache directory configured (set --cache-dir or FGC_CACHE)".into());
            };
            if clear {
                let certs = ctx.cert_cache(&CertArgs {
                    gate: Gate::Proof,
                    eps_refine: fgc_core::verifier::default_eps(),
                    cert_depth: DEFAULT_DEPTH,
                });
                let n = certs.clear()? + clear_dir(&dir.join("tables"))?;
                return Ok(format!("removed {n} cached files from {}", dir.display()));
            }
            let mut lines = Vec::new();
            for sub in ["certs", "tables"] {
                let count = std::fs::read_dir(dir.join(sub)).map(|d| d.count()).unwrap_or(0);
                lines.push(format!("{sub}: {count} files"));
            }
            Ok(format!("{}\n{}", dir.display(), lines.join("\n")))
        }
    }
}

fn clear_dir(dir: &Path) -> Result<usize, Failure> {
    let mut n = 0;
    if let Ok(entries) = std::fs::read_dir(dir) {
        for e in entries.flatten() {
            std::fs::remove_file(e.path())?;
            n += 1;
        }
    }
    Ok(n)
}

fn build_group(h: &HurwitzArgs) -> Result<ExplicitGroup, Failure> {
    let need = |v: Option<usize>, what: &str| v.ok_or_else(|| Failure::Usage(format!("--group needs --{what}")));
    match h.group.as_deref() {
        Some("gl") => {
            let q = h.q.ok_or_else(|| Failure::Usage("--group gl needs --q".into()))?;
            Ok(ExplicitGroup::general_linear(need(h.n, "n")?, q, DEFAULT_GROUP_CAP as u64)?)
        }
        Some("sym") => Ok(ExplicitGroup::symmetric(need(h.n, "n")?)?),
        Some("cyclic") => Ok(ExplicitGroup::cyclic(need(h.n, "n")?)?),
        Some(other) => Err(Failure::Usage(format!("unknown group {other:?}, expected gl, sym or cyclic"))),
        None => Err(Failure::Usage("give --table or --group".into())),
    }
}

/// Tables computed from a named group are cached by name and precision;
/// unreadable or invalid files are recomputed.
fn cached_table(ctx: &Ctx, g: &ExplicitGroup) -> Result<CharacterTable, Failure> {
    let digits = ctx.cfg.digits;
    let path = ctx.cfg.cache_dir.as_ref().map(|d| {
        let key: String = g.name.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
        d.join("tables").join(format!("{key}_d{digits}.json"))
    });
    if let Some(t) = path.as_deref().and_then(|p| CharacterTable::load(p).ok()) {
        if t.precision_digits == digits {
            return Ok(t);
        }
    }
    let t = compute_character_table(g, digits, TableCaps::default())?;
    if let Some(p) = path {
        let dir = p.parent().expect("cache file has a parent");
        std::fs::create_dir_all(dir)?;
        let tmp = dir.join(format!(".tmp-{}", std::process::id()));
        t.save(&tmp)?;
        std::fs::rename(tmp, p)?;
    }
    Ok(t)
}

fn hurwitz(ctx: &Ctx, h: HurwitzArgs) -> Outcome {
    let group = match &h.table {
        Some(_) => None,
        None => Some(build_group(&h)?),
    };
    let table = match (&h.table, &group) {
        (Some(path), _) => CharacterTable::load(path)?,
        (None, Some(g)) => cached_table(ctx, g)?,
        _ => unreachable!("group is built when no table is given"),
    };
    if let Some(p) = &h.save_table {
        table.save(p)?;
    }
    let count = match &h.classes {
        Some(labels) => {
            let idx = labels
                .iter()
                .map(|l| {
                    table
                        .classes
                        .iter()
                        .position(|c| &c.label == l)
                        .ok_or_else(|| Failure::Usage(format!("no class labelled {l:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            hurwitz_class_count(&table, h.sig.genus(), &idx)?
        }
        None => total_hom_count(&table, &h.sig, h.det_filter)?,
    };
    let brute = if h.brute {
        let g = group.as_ref().ok_or_else(|| Failure::Usage("--brute needs --group".into()))?;
        let b = brute_force_hom_count(g, &h.sig, DEFAULT_WORK_CAP)?;
        if h.classes.is_none() && !h.det_filter && b != count {
            return Err(Failure::Compute(format!("character sum {count} but enumeration gives {b}")));
        }
        Some(b)
    } else {
        None
    };
    if ctx.text() {
        Ok(match brute {
            Some(b) => format!("{count}\nbrute force {b}"),
            None => count.to_string(),
        })
    } else {
        json(&serde_json::json!({
            "signature": h.sig.to_string(),
            "group_order": table.group_order.to_string(),
            "classes": table.classes.iter().map(|c| &c.label).collect::<Vec<_>>(),
            "count": count.to_string(),
            "brute_force": brute.map(|b| b.to_string()),
        }))
    }
}

fn f64_of(x: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::NAN)
}

fn verify(ctx: &Ctx, what: VerifyCmd) -> Outcome {
    let text = ctx.text();
    match what {
        VerifyCmd::Table { a_max, cert } => {
            let rep = verify_table(a_max, &ctx.cert_cache(&cert))?;
            let body = if text {
                let mut lines: Vec<String> = rep
                    .rows
                    .iter()
                    .map(|r| {
                        format!(
                            "a={} B_a<={:.6} table {} {}",
                            r.a,
                            f64_of(&r.certified),
                            rational_to_string(&r.table_value),
                            if r.ok { "ok" } else { "FAIL" }
                        )
                    })
                    .collect();
                lines.push(format!("all within table and below 2/sqrt(a): {}", rep.all_ok));
                lines.join("\n")
            } else {
                json(&rep)?
            };
            if rep.all_ok {
                Ok(body)
            } else {
                Err(Failure::Compute(body))
            }
        }
        VerifyCmd::Triples { max_a3, eps, depth, cert } => {
            let rep = scan_genus0(max_a3, &eps, depth, &ctx.cert_cache(&cert))?;
            if !text {
                return json(&rep);
            }
            let mut lines = vec![format!(
                "scanned {} triples with a3 <= {max_a3} (eps {}, depth {})",
                rep.triples_scanned,
                rational_to_string(&rep.eps),
                rep.depth
            )];
            lines.push(format!(
                "passed: {} by global bounds, {} cell by cell ({} after deeper recheck)",
                rep.passes.by_global_bound, rep.passes.by_cells, rep.passes.rechecked
            ));
            for r in &rep.reductions {
                lines.push(format!("reduction {}: {:.6} < {:.6} {}", r.family, f64_of(&r.lhs), f64_of(&r.rhs), r.holds));
            }
            for f in &rep.failures {
                lines.push(format!("fail {:?} on {} margin {:.3e}", f.periods, f.cell, f64_of(&f.margin)));
            }
            lines.push(format!(
                "matches the published list: {} (missing {:?}, extra {:?})",
                rep.matches_published, rep.published_diff.missing, rep.published_diff.extra
            ));
            Ok(lines.join("\n"))
        }
        VerifyCmd::PositiveGenus { cert } => {
            let rep = check_positive_genus(&ctx.cert_cache(&cert))?;
            if !text {
                return json(&rep);
            }
            let mut lines = vec![format!(
                "certified sup {:.6} <= {}",
                f64_of(&rep.certified_sup),
                rational_to_string(&rep.constant)
            )];
            for r in &rep.rows {
                lines.push(format!("g={} r={} margin {}", r.g, r.r, rational_to_string(&r.margin)));
            }
            lines.push(format!("smallest margin at (g, r) = {:?}", rep.smallest));
            Ok(lines.join("\n"))
        }
    }
}

fn emit(out: Option<&Path>, body: &str) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, format!("{body}\n")),
        None => writeln!(std::io::stdout().lock(), "{body}"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let overrides = Overrides {
        cache_dir: cli.cache_dir,
        digits: cli.digits,
        trunc: cli.trunc,
        jobs: cli.jobs,
        format: cli.format,
    };
    let cfg = match RunConfig::load(cli.config.as_deref(), std::env::var("FGC_CACHE").ok(), overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    // A second initialisation only happens in tests; the first pool wins.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build_global();
    let ctx = Ctx { cfg };
    let result = run(&ctx, cli.command);
    let (body, code) = match result {
        Ok(body) => (Some(body), 0),
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            (None, 2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            (None, 1)
        }
    };
    if let Some(body) = body {
        if let Err(e) = emit(cli.out.as_deref(), &body) {
            eprintln!("error: cannot write output: {e}");
            return ExitCode::from(1);
        }
    }
    ExitCode::from(code)
}

use std::ops::Range;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use fieldpsi::arith;
use fieldpsi::character::{Angle, CharacterDesc};
use fieldpsi::dfi::{self as sweep, DfiConfig, SweepReport};
use fieldpsi::expsum::{self, Axiom3Config, BoxCountConfig, LaurentMode, LaurentPoly, WeilRecord};
use fieldpsi::field::{build_extension, ExtFieldDesc, FieldOps};
use fieldpsi::measure::{self, SkippedPrime, ValueTable, FOURIER_BUDGET};
use fieldpsi::mpoly::{MPoly, System};
use fieldpsi::numfield::{self, LatticeBasis, NFElem, NumberFieldDesc};
use fieldpsi::parse::{parse_many, parse_polynomial, parse_polynomial_with_vars};
use fieldpsi::points::DEFAULT_BUDGET;
use fieldpsi::stats::CompensatedSum;
use fieldpsi::term::{self, ClosureConfig, PsiSymTerm};
use fieldpsi::Error;
use num::complex::{Complex, Complex64};
use num::{BigInt, BigRational, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::{num, RunReport, Table, SCHEMA};
use crate::{CliError, Global};

type Res<T> = Result<T, CliError>;

pub struct Outcome {
    pub report: RunReport,
    pub table: Table,
    pub summary: String,
    pub check_failed: bool,
}

struct Parts<R, A> {
    records: R,
    aggregate: A,
    skipped: Vec<SkippedPrime>,
    table: Table,
    summary: String,
    failed: bool,
}

fn finish<P: Serialize, R: Serialize, A: Serialize>(
    command: &'static str,
    g: &Global,
    args: &P,
    parts: Parts<R, A>,
) -> Res<Outcome> {
    let report = RunReport {
        schema: SCHEMA,
        command,
        version: env!("CARGO_PKG_VERSION"),
        params: json!({ "global": g, "args": args }),
        records: serde_json::to_value(parts.records)?,
        aggregate: serde_json::to_value(parts.aggregate)?,
        skipped: parts.skipped,
        seed: g.seed,
    };
    Ok(Outcome { report, table: parts.table, summary: parts.summary, check_failed: parts.failed })
}

pub fn validate_global(g: &Global) -> Res<()> {
    if let Some(x) = g.xlimit {
        if x < 2 {
            return Err(CliError::usage(format!("--xlimit must be at least 2, got {x}")));
        }
    }
    if let Some(p) = g.prime {
        if !arith::is_prime(p) {
            return Err(CliError::usage(format!("--prime {p} is not prime")));
        }
    }
    if g.modulus == Some(0) {
        return Err(CliError::usage("--mod must be positive"));
    }
    if let Some(t) = g.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::usage(format!("--tol must be a positive finite number, got {t}")));
        }
    }
    if g.budget == Some(0) {
        return Err(CliError::usage("--budget must be positive"));
    }
    Ok(())
}

fn congruence(g: &Global) -> Option<(u64, u64)> {
    g.modulus.zip(g.res)
}

fn budget(g: &Global) -> u128 {
    g.budget.unwrap_or(DEFAULT_BUDGET)
}

fn prime_list(g: &Global, default_xlimit: u64) -> Res<Vec<u64>> {
    if let Some(p) = g.prime {
        if let Some((m, r)) = congruence(g) {
            if p % m != r % m {
                return Err(CliError::usage(format!("--prime {p} is not ≡ {r} (mod {m})")));
            }
        }
        return Ok(vec![p]);
    }
    Ok(arith::primes_in(g.xlimit.unwrap_or(default_xlimit), congruence(g))?)
}

fn single_prime(g: &Global, cmd: &str) -> Res<u64> {
    g.prime.ok_or_else(|| CliError::usage(format!("{cmd} needs --prime")))
}

fn no_prime(g: &Global, cmd: &str) -> Res<()> {
    if g.prime.is_some() {
        return Err(CliError::usage(format!("{cmd} sweeps primes; use --xlimit instead of --prime")));
    }
    Ok(())
}

fn univariate(text: &str) -> Res<MPoly> {
    let e = parse_polynomial(text)?;
    match e.vars.len() {
        0 => Ok(e.poly.remap(1, &[])),
        1 => Ok(e.poly),
        _ => Err(CliError::usage(format!("expected a univariate polynomial, found variables {}", e.vars.join(", ")))),
    }
}

fn split_names(vars: &str) -> Vec<&str> {
    vars.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

/// Parses equations (and trailing extra expressions) over one variable table.
fn system_with(eqs: &[String], extra: &[&str], vars: Option<&str>) -> Res<(System, Vec<MPoly>, Vec<String>)> {
    let texts: Vec<&str> = eqs.iter().map(String::as_str).chain(extra.iter().copied()).collect();
    let declared = vars.map(split_names);
    let (mut polys, names) = parse_many(&texts, declared.as_deref())?;
    if names.is_empty() {
        return Err(CliError::usage("no variables: name them with --vars"));
    }
    let rest = polys.split_off(eqs.len());
    Ok((System::new(names.len(), polys)?, rest, names))
}

fn int_list(text: &str) -> Res<Vec<i64>> {
    split_names(text)
        .into_iter()
        .map(|s| s.parse::<i64>().map_err(|_| CliError::usage(format!("'{s}' is not an integer"))))
        .collect()
}

fn complex_json(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn skippable(e: &Error) -> bool {
    matches!(
        e,
        Error::WildDegree { .. } | Error::Degenerate(_) | Error::BadPrime(_) | Error::NoPoints | Error::BudgetExceeded { .. }
    )
}

fn skip(p: u64, e: &Error) -> SkippedPrime {
    SkippedPrime { p, reason: e.to_string() }
}

// ---------------------------------------------------------------- weil

#[derive(Debug, Args, Serialize)]
pub struct WeilArgs {
    /// f: univariate, or in the curve's variables with --curve
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
    /// Check a seeded corpus of this many random integer polynomials instead
    #[arg(long, conflicts_with = "poly")]
    corpus: Option<usize>,
    #[arg(long, default_value_t = 2)]
    min_degree: u32,
    #[arg(long, default_value_t = 6)]
    max_degree: u32,
    /// Extension degree e of F_q, q = p^e
    #[arg(long, default_value_t = 1)]
    ext: u32,
    /// Curve equation (repeatable); the sum then runs over the curve's points
    #[arg(long = "curve", allow_hyphen_values = true)]
    curve: Vec<String>,
    /// Comma-separated variable order for --curve
    #[arg(long)]
    vars: Option<String>,
    /// Bound constant b for curves; default (deg C + deg f)^2
    #[arg(long)]
    constant: Option<f64>,
}

#[derive(Serialize)]
struct CorpusSummary {
    index: usize,
    poly: String,
    degree: usize,
    checked: usize,
    skipped: usize,
    violations: usize,
    max_normalized: f64,
}

/// Random integer polynomial `i` of the corpus: degree in
/// `[min, max]`, coefficients in `[-9, 9]`, nonzero leading coefficient.
fn corpus_poly(seed: u64, i: usize, min: u32, max: u32) -> Vec<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let d = rng.gen_range(min..=max) as usize;
    let mut c: Vec<i64> = (0..=d).map(|_| rng.gen_range(-9..=9)).collect();
    while c[d] == 0 {
        c[d] = rng.gen_range(-9..=9);
    }
    c
}

fn weil_row(t: &mut Table, r: &WeilRecord) {
    t.push(vec![r.p.to_string(), r.degree.to_string(), num(r.magnitude), num(r.bound), r.pass.to_string()]);
}

pub fn weil(g: &Global, a: &WeilArgs) -> Res<Outcome> {
    if a.ext == 0 {
        return Err(CliError::usage("--ext must be at least 1"));
    }
    let primes = prime_list(g, 100)?;
    let chars: Vec<CharacterDesc> = primes
        .iter()
        .map(|&p| build_extension(p, a.ext as usize).map(CharacterDesc::standard))
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&["p", "degree", "magnitude", "bound", "pass"]);

    if let Some(n) = a.corpus {
        if a.min_degree < 1 || a.min_degree > a.max_degree {
            return Err(CliError::usage("need 1 <= --min-degree <= --max-degree"));
        }
        let mut summaries = Vec::with_capacity(n);
        let (mut checks, mut violations, mut worst) = (0usize, 0usize, 0f64);
        for i in 0..n {
            let coeffs = corpus_poly(g.seed, i, a.min_degree, a.max_degree);
            let f = MPoly::univariate(&coeffs);
            let results: Vec<Result<WeilRecord, SkippedPrime>> = chars
                .par_iter()
                .map(|chr| match expsum::weil_check(&f, chr) {
                    Ok(r) => Ok(Ok(r)),
                    Err(e) if skippable(&e) => Ok(Err(skip(chr.field().p(), &e))),
                    Err(e) => Err(e),
                })
                .collect::<Result<_, Error>>()?;
            let mut s = CorpusSummary {
                index: i,
                poly: numfield::format_poly(&f.univariate_coeffs()?, "x"),
                degree: coeffs.len() - 1,
                checked: 0,
                skipped: 0,
                violations: 0,
                max_normalized: 0.0,
            };
            for r in results {
                match r {
                    Ok(rec) => {
                        s.checked += 1;
                        s.violations += usize::from(!rec.pass);
                        s.max_normalized = s.max_normalized.max(rec.normalized);
                        weil_row(&mut table, &rec);
                    }
                    Err(_) => s.skipped += 1,
                }
            }
            checks += s.checked;
            violations += s.violations;
            worst = worst.max(s.max_normalized);
            summaries.push(s);
        }
        let summary = format!("weil: {n} polynomials, {checks} checks, {violations} violations, max |S|/√q = {}", num(worst));
        return finish(
            "weil",
            g,
            a,
            Parts {
                records: summaries,
                aggregate: json!({ "polynomials": n, "checks": checks, "violations": violations, "max_normalized": worst }),
                skipped: Vec::new(),
                table,
                summary,
                failed: violations > 0,
            },
        );
    }

    let text = a.poly.as_deref().ok_or_else(|| CliError::usage("weil needs --poly or --corpus"))?;
    let results: Vec<Result<WeilRecord, SkippedPrime>> = if a.curve.is_empty() {
        let f = univariate(text)?;
        chars
            .par_iter()
            .map(|chr| match expsum::weil_check(&f, chr) {
                Ok(r) => Ok(Ok(r)),
                Err(e) if skippable(&e) => Ok(Err(skip(chr.field().p(), &e))),
                Err(e) => Err(e),
            })
            .collect::<Result<_, Error>>()?
    } else {
        let (curve, rest, _) = system_with(&a.curve, &[text], a.vars.as_deref())?;
        let f = &rest[0];
        let b = budget(g);
        chars
            .par_iter()
            .map(|chr| match expsum::weil_check_curve(&curve, f, chr, a.constant, b) {
                Ok(r) => Ok(Ok(r)),
                Err(e) if skippable(&e) => Ok(Err(skip(chr.field().p(), &e))),
                Err(e) => Err(e),
            })
            .collect::<Result<_, Error>>()?
    };
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for r in results {
        match r {
            Ok(rec) => {
                weil_row(&mut table, &rec);
                records.push(rec);
            }
            Err(s) => skipped.push(s),
        }
    }
    let violations = records.iter().filter(|r| !r.pass).count();
    let worst = records.iter().map(|r| r.normalized).fold(0.0, f64::max);
    let summary = format!("weil: {} checks, {violations} violations, max |S|/√q = {}", records.len(), num(worst));
    finish(
        "weil",
        g,
        a,
        Parts {
            aggregate: json!({ "checks": records.len(), "violations": violations, "max_normalized": worst }),
            records,
            skipped,
            table,
            summary,
            failed: violations > 0,
        },
    )
}

// -------------------------------------------------------------- axiom3

#[derive(Debug, Args, Serialize)]
pub struct Axiom3Args {
    /// Curve equation (repeatable)
    #[arg(long = "eq", required = true, allow_hyphen_values = true)]
    eqs: Vec<String>,
    #[arg(long)]
    vars: Option<String>,
    /// Series term EXPONENTS:RE[:IM], e.g. 1,0:1 for z1 (repeatable)
    #[arg(long = "term", required = true, allow_hyphen_values = true)]
    terms: Vec<String>,
    /// Multiplier on Σ|c_m| in the tolerance
    #[arg(long, default_value_t = 1.0)]
    weil_constant: f64,
}

fn parse_laurent_term(s: &str, nvars: usize) -> Res<(Vec<i64>, Complex<BigRational>)> {
    let bad = || CliError::usage(format!("term '{s}': expected EXPONENTS:RE[:IM]"));
    let mut parts = s.split(':');
    let exps = int_list(parts.next().ok_or_else(bad)?)?;
    if exps.len() != nvars {
        return Err(CliError::usage(format!("term '{s}': {} exponents for {nvars} variables", exps.len())));
    }
    let rat = |t: &str| BigRational::from_str(t.trim()).map_err(|_| bad());
    let re = rat(parts.next().ok_or_else(bad)?)?;
    let im = parts.next().map(rat).transpose()?.unwrap_or_else(BigRational::zero);
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok((exps, Complex::new(re, im)))
}

pub fn axiom3(g: &Global, a: &Axiom3Args) -> Res<Outcome> {
    let (curve, _, names) = system_with(&a.eqs, &[], a.vars.as_deref())?;
    let terms = a.terms.iter().map(|t| parse_laurent_term(t, names.len())).collect::<Res<Vec<_>>>()?;
    let h = LaurentPoly::new(names.len(), terms, LaurentMode::STRICT)?;
    let cfg = Axiom3Config { weil_constant: a.weil_constant, budget: budget(g) };
    let primes = prime_list(g, 50)?;
    let results: Vec<Result<expsum::Axiom3Result, SkippedPrime>> = primes
        .par_iter()
        .map(|&p| match expsum::axiom3_sup(&curve, &h, p, &cfg) {
            Ok(r) => Ok(Ok(r)),
            Err(e) if skippable(&e) => Ok(Err(skip(p, &e))),
            Err(e) => Err(e),
        })
        .collect::<Result<_, Error>>()?;
    let mut table = Table::new(&["p", "points", "sup", "tol", "pass"]);
    let (mut records, mut skipped) = (Vec::new(), Vec::new());
    for r in results {
        match r {
            Ok(rec) => {
                table.push(vec![rec.p.to_string(), rec.points.to_string(), num(rec.sup), num(rec.tol), rec.pass.to_string()]);
                records.push(rec);
            }
            Err(s) => skipped.push(s),
        }
    }
    let failures = records.iter().filter(|r| !r.pass).count();
    let summary = format!("axiom3: {} primes, {failures} below -tol", records.len());
    finish(
        "axiom3",
        g,
        a,
        Parts {
            aggregate: json!({ "primes": records.len(), "failures": failures, "vars": names }),
            records,
            skipped,
            table,
            summary,
            failed: failures > 0,
        },
    )
}

// -------------------------------------------------------------- psisym

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum PsiOp {
    Conj,
    Add,
    Mul,
}

#[derive(Debug, Args, Serialize)]
pub struct PsisymArgs {
    /// Coefficients c1,…,cn of x^n + c1 x^(n-1) + … + cn, as integers
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,
    /// Second term for --op add and --op mul
    #[arg(long, allow_hyphen_values = true)]
    with: Option<String>,
    /// Show both sides of a closure identity
    #[arg(long, value_enum)]
    op: Option<PsiOp>,
    #[arg(long, default_value_t = 1)]
    ext: u32,
    /// Run the closure identities on seeded random instances over F_p, p <= xlimit (default 499)
    #[arg(long, conflicts_with = "coeffs")]
    verify: bool,
    #[arg(long, default_value_t = 1000)]
    instances: usize,
    #[arg(long, default_value_t = 4)]
    max_degree: usize,
}

fn residue_term(desc: &ExtFieldDesc, coeffs: &[i64]) -> PsiSymTerm {
    let p = desc.p();
    let r: Vec<u64> = coeffs.iter().map(|&c| arith::reduce_i64(c, p)).collect();
    PsiSymTerm::from_residues(desc, &r)
}

pub fn psisym(g: &Global, a: &PsisymArgs) -> Res<Outcome> {
    if a.verify {
        let cfg = ClosureConfig {
            instances: a.instances,
            max_degree: a.max_degree,
            max_prime: g.xlimit.unwrap_or(499),
            seed: g.seed,
        };
        let reports = term::closure_suite(&cfg)?;
        let mut table = Table::new(&["identity", "instances", "failures", "max_error"]);
        for r in &reports {
            table.push(vec![r.identity.into(), r.instances.to_string(), r.failures.to_string(), num(r.max_error)]);
        }
        let failures: usize = reports.iter().map(|r| r.failures).sum();
        let worst = reports.iter().map(|r| r.max_error).fold(0.0, f64::max);
        let summary = format!("psisym: {} identities × {} instances, {failures} failures, max error {}", reports.len(), a.instances, num(worst));
        return finish(
            "psisym",
            g,
            a,
            Parts {
                records: reports,
                aggregate: json!({ "failures": failures, "max_error": worst, "tol": term::CLOSURE_TOL }),
                skipped: Vec::new(),
                table,
                summary,
                failed: failures > 0,
            },
        );
    }
    let c1 = int_list(a.coeffs.as_deref().ok_or_else(|| CliError::usage("psisym needs --coeffs or --verify"))?)?;
    let c2 = a.with.as_deref().map(int_list).transpose()?;
    if matches!(a.op, Some(PsiOp::Add | PsiOp::Mul)) && c2.is_none() {
        return Err(CliError::usage("--op add/mul needs --with"));
    }
    let tol = g.tol.unwrap_or(term::CLOSURE_TOL);
    let primes = prime_list(g, 50)?;
    let mut records = Vec::new();
    let mut table = Table::new(&["p", "re", "im"]);
    let mut failed = false;
    for p in primes {
        let desc = build_extension(p, a.ext as usize)?;
        let chr = CharacterDesc::standard(desc.clone());
        let t1 = residue_term(&desc, &c1);
        let value = term::psisym_eval(&t1, &chr);
        let roots: Vec<Vec<u64>> = t1.rational_roots(&desc).iter().map(|r| r.coeffs().to_vec()).collect();
        let mut rec = json!({ "p": p, "q": desc.order(), "roots": roots, "value": complex_json(value) });
        if let Some(op) = a.op {
            let (lhs, rhs) = match op {
                PsiOp::Conj => (term::psisym_eval(&term::psisym_conj(&t1, &desc), &chr), value.conj()),
                PsiOp::Add | PsiOp::Mul => {
                    let t2 = residue_term(&desc, c2.as_deref().unwrap_or_default());
                    let v2 = term::psisym_eval(&t2, &chr);
                    if matches!(op, PsiOp::Add) {
                        (term::psisym_eval(&term::psisym_add(&t1, &t2, &desc), &chr), value + v2)
                    } else {
                        (term::psisym_eval(&term::psisym_mul(&t1, &t2, &chr), &chr), value * v2)
                    }
                }
            };
            let err = (lhs - rhs).norm();
            failed |= !(err <= tol);
            rec["lhs"] = json!(complex_json(lhs));
            rec["rhs"] = json!(complex_json(rhs));
            rec["error"] = json!(err);
        }
        table.push(vec![p.to_string(), num(value.re), num(value.im)]);
        records.push(rec);
    }
    let summary = format!("psisym: evaluated at {} primes", records.len());
    finish("psisym", g, a, Parts { records, aggregate: json!({}), skipped: Vec::new(), table, summary, failed })
}

// --------------------------------------------------------------- kappa

#[derive(Debug, Args, Serialize)]
pub struct KappaArgs {
    /// P(u…, x)
    #[arg(long = "p-poly", allow_hyphen_values = true)]
    p_poly: String,
    /// Q(u…, x)
    #[arg(long = "q-poly", allow_hyphen_values = true)]
    q_poly: String,
    /// Parameter values b, comma-separated integers, in parameter order
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    params: String,
    /// The root variable
    #[arg(long, default_value = "x")]
    var: String,
    /// Comma-separated parameter names (default: all other names, in natural order)
    #[arg(long)]
    vars: Option<String>,
    #[arg(long, default_value_t = 1)]
    ext: u32,
}

pub fn kappa(g: &Global, a: &KappaArgs) -> Res<Outcome> {
    let texts = [a.p_poly.as_str(), a.q_poly.as_str()];
    let mut names: Vec<String> = match &a.vars {
        Some(v) => split_names(v).into_iter().map(String::from).collect(),
        None => parse_many(&texts, None)?.1.into_iter().filter(|n| *n != a.var).collect(),
    };
    names.push(a.var.clone());
    let declared: Vec<&str> = names.iter().map(String::as_str).collect();
    let (polys, _) = parse_many(&texts, Some(&declared))?;
    let params = int_list(&a.params)?;
    if params.len() != names.len() - 1 {
        return Err(CliError::usage(format!("{} parameter values for parameters [{}]", params.len(), names[..names.len() - 1].join(", "))));
    }
    let primes = prime_list(g, 50)?;
    let mut table = Table::new(&["p", "value"]);
    let (mut records, mut skipped) = (Vec::new(), Vec::new());
    for p in primes {
        let desc = build_extension(p, a.ext as usize)?;
        let b: Vec<_> = params.iter().map(|&v| desc.from_residue(arith::reduce_i64(v, p))).collect();
        match term::kappa_eval(&polys[0], &polys[1], &b, &desc) {
            Ok(v) => {
                table.push(vec![p.to_string(), v.coeffs().iter().map(u64::to_string).collect::<Vec<_>>().join(" ")]);
                records.push(json!({ "p": p, "value": v.coeffs() }));
            }
            Err(e) if skippable(&e) => skipped.push(skip(p, &e)),
            Err(e) => return Err(e.into()),
        }
    }
    let summary = format!("kappa: evaluated at {} primes", records.len());
    finish(
        "kappa",
        g,
        a,
        Parts { records, aggregate: json!({ "vars": names }), skipped, table, summary, failed: false },
    )
}

// ------------------------------------------------------------ boxcount

#[derive(Debug, Args, Serialize)]
pub struct BoxArgs {
    /// Equation (repeatable)
    #[arg(long = "eq", required = true, allow_hyphen_values = true)]
    eqs: Vec<String>,
    #[arg(long)]
    vars: Option<String>,
    /// Half-open representative ranges lo..hi per coordinate, comma-separated; "half" means [0, (p+1)/2) everywhere
    #[arg(long = "box", default_value = "half")]
    bounds: String,
    /// Declared dimension (default: variables minus equations)
    #[arg(long)]
    dim: Option<u32>,
    /// Height for the hyperplane test; 0 skips it
    #[arg(long, default_value_t = 20)]
    height: u64,
}

fn parse_box(text: &str, n: usize, p: u64) -> Res<Vec<Range<u64>>> {
    if text.trim() == "half" {
        return Ok(vec![0..(p + 1) / 2; n]);
    }
    let ranges: Vec<Range<u64>> = text
        .split(',')
        .map(|r| {
            let (lo, hi) = r.trim().split_once("..").ok_or_else(|| CliError::usage(format!("bad range '{r}', expected lo..hi")))?;
            let parse = |s: &str| s.trim().parse::<u64>().map_err(|_| CliError::usage(format!("bad range bound '{s}'")));
            Ok(parse(lo)?..parse(hi)?)
        })
        .collect::<Res<_>>()?;
    if ranges.len() != n {
        return Err(CliError::usage(format!("{} ranges for {n} coordinates", ranges.len())));
    }
    if let Some(r) = ranges.iter().find(|r| r.start > r.end || r.end > p) {
        return Err(CliError::usage(format!("range {}..{} does not fit in 0..{p}", r.start, r.end)));
    }
    Ok(ranges)
}

pub fn boxcount(g: &Global, a: &BoxArgs) -> Res<Outcome> {
    let (system, _, names) = system_with(&a.eqs, &[], a.vars.as_deref())?;
    let n = names.len();
    let dim = a.dim.unwrap_or(n.saturating_sub(a.eqs.len()) as u32);
    let mut cfg = BoxCountConfig {
        budget: budget(g),
        hyperplane_height: (a.height > 0).then_some(a.height),
        ..BoxCountConfig::default()
    };
    cfg.height.seed = g.seed;
    let primes = prime_list(g, 100)?;
    let mut table = Table::new(&["p", "count", "fraction", "expected_fraction", "hyperplane_contained"]);
    let (mut records, mut skipped) = (Vec::new(), Vec::new());
    for p in primes {
        let bounds = parse_box(&a.bounds, n, p)?;
        match expsum::box_count(&system, &build_extension(p, 1)?, &bounds, dim, &cfg) {
            Ok(r) => {
                table.push(vec![
                    p.to_string(),
                    r.count.to_string(),
                    num(r.fraction),
                    num(r.expected_fraction),
                    r.hyperplane_contained().to_string(),
                ]);
                records.push(r);
            }
            Err(e) if skippable(&e) || matches!(e, Error::InsufficientSamples(_)) => skipped.push(skip(p, &e)),
            Err(e) => return Err(e.into()),
        }
    }
    let contained = records.iter().any(|r| r.hyperplane_contained());
    if contained {
        eprintln!("warning: the variety lies in a low-height hyperplane; the box heuristic does not apply");
    }
    let summary = format!("boxcount: {} primes, hyperplane-contained: {contained}", records.len());
    finish(
        "boxcount",
        g,
        a,
        Parts {
            aggregate: json!({ "declared_dim": dim, "vars": names, "hyperplane_contained": contained }),
            records,
            skipped,
            table,
            summary,
            failed: false,
        },
    )
}

// ------------------------------------------------------------ mu0, mu1

#[derive(Debug, Args, Serialize)]
pub struct Mu0Args {
    /// Equation (repeatable; none means affine space)
    #[arg(long = "eq", allow_hyphen_values = true)]
    eqs: Vec<String>,
    #[arg(long)]
    vars: Option<String>,
    #[arg(long)]
    dim: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct Mu1Args {
    /// Equation of X (repeatable)
    #[arg(long = "eq", allow_hyphen_values = true)]
    eqs: Vec<String>,
    #[arg(long)]
    vars: Option<String>,
    /// Equation of the reference X' (repeatable; none means affine space)
    #[arg(long = "ref-eq", allow_hyphen_values = true)]
    ref_eqs: Vec<String>,
    #[arg(long)]
    ref_vars: Option<String>,
    #[arg(long)]
    dim: u32,
    /// Fail if some |μ1(p)| exceeds this
    #[arg(long)]
    bound: Option<f64>,
}

fn series_outcome<A: Serialize>(
    command: &'static str,
    g: &Global,
    a: &A,
    series: measure::MeasureSeries,
    with_ref: bool,
    bound: Option<f64>,
) -> Res<Outcome> {
    let mut table =
        Table::new(if with_ref { &["p", "count", "count_ref", "value"] } else { &["p", "count", "value"] });
    for r in &series.records {
        let mut row = vec![r.p.to_string(), r.count.to_string()];
        if with_ref {
            row.push(r.count_ref.map_or(String::new(), |c| c.to_string()));
        }
        row.push(num(r.value));
        table.push(row);
    }
    if let Some(w) = &series.dim_warning {
        eprintln!("warning: {w}");
    }
    let max_abs = series.records.iter().map(|r| r.value.abs()).fold(0.0, f64::max);
    let failed = bound.is_some_and(|b| max_abs > b);
    let summary = format!("{command}: {} primes, max |value| = {}", series.records.len(), num(max_abs));
    finish(
        command,
        g,
        a,
        Parts {
            aggregate: json!({
                "declared_dim": series.declared_dim,
                "fitted_dim": series.fitted_dim,
                "dim_warning": series.dim_warning,
                "max_abs": max_abs,
            }),
            records: series.records,
            skipped: series.skipped,
            table,
            summary,
            failed,
        },
    )
}

pub fn mu0(g: &Global, a: &Mu0Args) -> Res<Outcome> {
    let (system, _, _) = system_with(&a.eqs, &[], a.vars.as_deref())?;
    let primes = prime_list(g, 200)?;
    let series = measure::mu0_sweep(&system, a.dim, &primes, budget(g))?;
    series_outcome("mu0", g, a, series, false, None)
}

pub fn mu1(g: &Global, a: &Mu1Args) -> Res<Outcome> {
    let (x, _, _) = system_with(&a.eqs, &[], a.vars.as_deref())?;
    let (x_ref, _, _) = system_with(&a.ref_eqs, &[], a.ref_vars.as_deref())?;
    let primes = prime_list(g, 200)?;
    let series = measure::mu1_sweep(&x, &x_ref, a.dim, &primes, budget(g))?;
    series_outcome("mu1", g, a, series, true, a.bound)
}

// ------------------------------------------------------------- fourier

#[derive(Debug, Args, Serialize)]
pub struct FourierArgs {
    /// Number of seeded random tables
    #[arg(long, default_value_t = 100)]
    tables: usize,
    /// Fixed dimension n (default: random in 1..=max-dim)
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    /// Transform the indicator of this variety instead (repeatable; needs --prime); CSV: z,re,im
    #[arg(long = "eq", allow_hyphen_values = true)]
    eqs: Vec<String>,
    #[arg(long)]
    vars: Option<String>,
}

#[derive(Serialize)]
struct FourierRecord {
    index: usize,
    p: u64,
    n: usize,
    table_seed: u64,
    /// |Σ|Fφ|² − p^{-n} Σ|φ|²| relative to the right side.
    plancherel_error: f64,
    /// max_z |p^n F(Fφ)(z) − φ(−z)|.
    inversion_error: f64,
    /// max_z |F(1)(z) − δ_0(z)|.
    delta_error: f64,
}

fn norm_sqr_sum(t: &ValueTable) -> f64 {
    t.entries().iter().map(|z| Complex64::new(z.norm_sqr(), 0.0)).collect::<CompensatedSum>().value().re
}

fn fourier_identities(index: usize, p: u64, n: usize, table_seed: u64, budget: u128) -> Res<FourierRecord> {
    let phi = ValueTable::random(p, n, table_seed)?;
    let f = measure::fourier_table(&phi, budget)?;
    let lhs = norm_sqr_sum(&f);
    let rhs = norm_sqr_sum(&phi) / (p as f64).powi(n as i32);
    let ff = measure::fourier_table(&f, budget)?;
    let scale = (p as f64).powi(n as i32);
    let inversion_error = (0..ff.entries().len())
        .map(|i| {
            let neg: Vec<u64> = ff.point_of(i).iter().map(|&v| (p - v) % p).collect();
            (ff.entries()[i] * scale - phi.get(&neg)).norm()
        })
        .fold(0.0, f64::max);
    let one = ValueTable::from_fn(p, n, budget, |_| Complex64::new(1.0, 0.0))?;
    let delta = measure::fourier_table(&one, budget)?;
    let delta_error = delta
        .entries()
        .iter()
        .enumerate()
        .map(|(i, z)| (z - Complex64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0)).norm())
        .fold(0.0, f64::max);
    Ok(FourierRecord { index, p, n, table_seed, plancherel_error: (lhs - rhs).abs() / rhs.max(f64::MIN_POSITIVE), inversion_error, delta_error })
}

pub fn fourier(g: &Global, a: &FourierArgs) -> Res<Outcome> {
    let budget = g.budget.unwrap_or(FOURIER_BUDGET);
    if !a.eqs.is_empty() {
        let p = single_prime(g, "fourier --eq")?;
        let (system, _, names) = system_with(&a.eqs, &[], a.vars.as_deref())?;
        let f = measure::fourier_table(&ValueTable::indicator(&system, p, budget)?, budget)?;
        let mut table = Table::new(&["z", "re", "im"]);
        let mut records = Vec::with_capacity(f.entries().len());
        for (i, v) in f.entries().iter().enumerate() {
            let z = f.point_of(i);
            table.push(vec![z.iter().map(u64::to_string).collect::<Vec<_>>().join(" "), num(v.re), num(v.im)]);
            records.push(json!({ "z": z, "value": complex_json(*v) }));
        }
        let summary = format!("fourier: transformed the indicator of a variety in F_{p}^{}", names.len());
        return finish(
            "fourier",
            g,
            a,
            Parts { records, aggregate: json!({ "p": p, "vars": names }), skipped: Vec::new(), table, summary, failed: false },
        );
    }
    if a.max_dim == 0 || a.dim == Some(0) {
        return Err(CliError::usage("dimension must be at least 1"));
    }
    let primes = match g.prime {
        Some(p) => vec![p],
        None => arith::primes_in(g.xlimit.unwrap_or(997), None)?,
    };
    let specs: Vec<(usize, u64, usize, u64)> = (0..a.tables)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(g.seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let p = primes[rng.gen_range(0..primes.len())];
            let n = a.dim.unwrap_or_else(|| rng.gen_range(1..=a.max_dim));
            (i, p, n, rng.gen())
        })
        .collect();
    let records = specs
        .par_iter()
        .map(|&(i, p, n, s)| fourier_identities(i, p, n, s, budget))
        .collect::<Res<Vec<_>>>()?;
    let tol = g.tol.unwrap_or(1e-9);
    let worst = |f: fn(&FourierRecord) -> f64| records.iter().map(f).fold(0.0, f64::max);
    let (pl, inv, del) = (worst(|r| r.plancherel_error), worst(|r| r.inversion_error), worst(|r| r.delta_error));
    let failed = !(pl <= tol && inv <= tol && del <= tol);
    let mut table = Table::new(&["index", "p", "n", "plancherel_error", "inversion_error", "delta_error"]);
    for r in &records {
        table.push(vec![r.index.to_string(), r.p.to_string(), r.n.to_string(), num(r.plancherel_error), num(r.inversion_error), num(r.delta_error)]);
    }
    let summary = format!("fourier: {} tables, max errors: plancherel {}, inversion {}, delta {}", records.len(), num(pl), num(inv), num(del));
    finish(
        "fourier",
        g,
        a,
        Parts {
            records,
            aggregate: json!({ "tol": tol, "max_plancherel_error": pl, "max_inversion_error": inv, "max_delta_error": del }),
            skipped: Vec::new(),
            table,
            summary,
            failed,
        },
    )
}

// --------------------------------------------------------- pushforward

#[derive(Debug, Args, Serialize)]
pub struct PushforwardArgs {
    /// Equation (repeatable)
    #[arg(long = "eq", allow_hyphen_values = true)]
    eqs: Vec<String>,
    #[arg(long)]
    vars: Option<String>,
    /// Moment bound M: all 0 < ‖m‖∞ <= M
    #[arg(long, default_value_t = 2)]
    moments: u32,
}

pub fn pushforward(g: &Global, a: &PushforwardArgs) -> Res<Outcome> {
    let p = single_prime(g, "pushforward")?;
    let (system, _, names) = system_with(&a.eqs, &[], a.vars.as_deref())?;
    let pf = measure::pushforward_weyl(&system, p, a.moments, budget(g))?;
    let mut table = Table::new(&["m", "re", "im", "abs"]);
    for m in &pf.moments {
        table.push(vec![m.m.iter().map(i64::to_string).collect::<Vec<_>>().join(" "), num(m.re), num(m.im), num(m.abs)]);
    }
    let max_nontrivial = pf.moments.iter().skip(1).map(|m| m.abs).fold(0.0, f64::max);
    let summary = format!("pushforward: {} points, max |W_m| (m ≠ 0) = {}", pf.points, num(max_nontrivial));
    finish(
        "pushforward",
        g,
        a,
        Parts {
            aggregate: json!({ "p": pf.p, "points": pf.points, "vars": names, "max_nontrivial": max_nontrivial }),
            records: pf.moments,
            skipped: Vec::new(),
            table,
            summary,
            failed: false,
        },
    )
}

// ------------------------------------------------------ dfi and friends

#[derive(Debug, Args, Serialize)]
pub struct DfiOpts {
    /// Keep only primes where f splits completely
    #[arg(long)]
    split_only: bool,
    /// Report Weyl sums W_1..W_H
    #[arg(long, default_value_t = 5)]
    weyl_depth: u32,
    #[arg(long)]
    hist_bins: Option<usize>,
    /// Include every sample in the JSON records
    #[arg(long)]
    dump_samples: bool,
    /// Record whether KS stays at or below this (an observation, not a check)
    #[arg(long)]
    ks_tol: Option<f64>,
    /// Record whether every |W_h| stays at or below this (an observation)
    #[arg(long)]
    weyl_tol: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct DfiArgs {
    /// Irreducible integer polynomial f
    #[arg(long, allow_hyphen_values = true)]
    poly: String,
    #[command(flatten)]
    opts: DfiOpts,
}

#[derive(Debug, Args, Serialize)]
pub struct DfiExtArgs {
    #[arg(long, allow_hyphen_values = true)]
    poly: String,
    /// Rational polynomial g with g(a) irrational
    #[arg(long, allow_hyphen_values = true)]
    g: String,
    #[command(flatten)]
    opts: DfiOpts,
}

fn dfi_config(g: &Global, o: &DfiOpts) -> Res<DfiConfig> {
    no_prime(g, "this sweep")?;
    Ok(DfiConfig {
        xlimit: g.xlimit.unwrap_or(1000),
        congruence: congruence(g),
        weyl_depth: o.weyl_depth,
        hist_bins: o.hist_bins,
        split_only: o.split_only,
    })
}

fn sweep_outcome<A: Serialize>(command: &'static str, g: &Global, a: &A, o: &DfiOpts, rep: SweepReport) -> Res<Outcome> {
    let mut table = Table::new(&["p", "root", "angle_num", "angle_den"]);
    for s in &rep.samples {
        table.push(vec![s.p.to_string(), s.root.to_string(), s.angle.num().to_string(), s.angle.den().to_string()]);
    }
    let max_w = rep.weyl.iter().map(|w| w.abs).fold(0.0, f64::max);
    let mut aggregate = serde_json::to_value(&rep)?;
    if o.ks_tol.is_some() || o.weyl_tol.is_some() {
        aggregate["observations"] = json!({
            "ks_tol": o.ks_tol,
            "ks_within": o.ks_tol.map(|t| rep.ks.is_some_and(|k| k <= t)),
            "weyl_tol": o.weyl_tol,
            "weyl_within": o.weyl_tol.map(|t| !rep.empty && max_w <= t),
            "note": "empirical tolerances; recorded, not enforced",
        });
    }
    if rep.empty {
        eprintln!("warning: no samples in range");
    }
    let summary = match rep.ks {
        Some(ks) => format!(
            "{command}: {} samples from {} primes, KS = {}, max |W_h| = {}",
            rep.sample_count,
            rep.primes_used,
            num(ks),
            num(max_w)
        ),
        None => format!("{command}: no samples"),
    };
    let records: Value = if o.dump_samples { serde_json::to_value(&rep.samples)? } else { json!([]) };
    finish(command, g, a, Parts { records, aggregate, skipped: rep.skipped, table, summary, failed: false })
}

pub fn dfi(g: &Global, a: &DfiArgs) -> Res<Outcome> {
    let cfg = dfi_config(g, &a.opts)?;
    let rep = sweep::dfi_sweep(&univariate(&a.poly)?, &cfg)?;
    sweep_outcome("dfi", g, a, &a.opts, rep)
}

pub fn dfiext(g: &Global, a: &DfiExtArgs) -> Res<Outcome> {
    let cfg = dfi_config(g, &a.opts)?;
    let rep = sweep::dfi_extended_sweep(&univariate(&a.poly)?, &univariate(&a.g)?, &cfg)?;
    sweep_outcome("dfiext", g, a, &a.opts, rep)
}

#[derive(Debug, Args, Serialize)]
pub struct MultiWeylArgs {
    #[arg(long, allow_hyphen_values = true)]
    poly: String,
    /// h = (h_1, …, h_{d-1}), comma-separated (repeatable)
    #[arg(long = "h", allow_hyphen_values = true)]
    h: Vec<String>,
    /// Also draw this many seeded random nonzero h-vectors
    #[arg(long, default_value_t = 0)]
    random_h: usize,
    /// Entries of random h-vectors lie in [-R, R]
    #[arg(long, default_value_t = 5)]
    h_range: i64,
}

#[derive(Serialize)]
struct MultiWeylRecord {
    h: Vec<i64>,
    re: f64,
    im: f64,
    abs: f64,
    ext_re: f64,
    ext_im: f64,
    diff: f64,
    samples: u64,
}

pub fn multiweyl(g: &Global, a: &MultiWeylArgs) -> Res<Outcome> {
    let cfg = dfi_config(g, &DfiOpts {
        split_only: false,
        weyl_depth: 1,
        hist_bins: None,
        dump_samples: false,
        ks_tol: None,
        weyl_tol: None,
    })?;
    let f = univariate(&a.poly)?;
    let d = f.univariate_coeffs()?.len().saturating_sub(1);
    let mut hs: Vec<Vec<i64>> = a.h.iter().map(|s| int_list(s)).collect::<Res<_>>()?;
    if a.random_h > 0 {
        if d < 2 || a.h_range < 1 {
            return Err(CliError::usage("random h-vectors need degree >= 2 and --h-range >= 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
        while hs.len() < a.h.len() + a.random_h {
            let h: Vec<i64> = (0..d - 1).map(|_| rng.gen_range(-a.h_range..=a.h_range)).collect();
            if h.iter().any(|&v| v != 0) {
                hs.push(h);
            }
        }
    }
    if hs.is_empty() {
        return Err(CliError::usage("give --h or --random-h"));
    }
    let tol = g.tol.unwrap_or(1e-12);
    let mut records = Vec::with_capacity(hs.len());
    let mut skipped = Vec::new();
    for h in &hs {
        let mw = sweep::multi_weyl(&f, h, &cfg)?;
        let ext = sweep::dfi_extended_sweep(&f, &sweep::weyl_polynomial(h), &cfg)?;
        let w1 = ext.weyl_h(1).copied().ok_or_else(|| CliError::usage("no samples in range"))?;
        let diff = Complex64::new(mw.w.re - w1.re, mw.w.im - w1.im).norm();
        if skipped.is_empty() {
            skipped = mw.skipped.clone();
        }
        records.push(MultiWeylRecord { h: h.clone(), re: mw.w.re, im: mw.w.im, abs: mw.w.abs, ext_re: w1.re, ext_im: w1.im, diff, samples: mw.sample_count });
    }
    let worst = records.iter().map(|r| r.diff).fold(0.0, f64::max);
    let mut table = Table::new(&["h", "re", "im", "abs", "ext_re", "ext_im", "diff"]);
    for r in &records {
        table.push(vec![
            r.h.iter().map(i64::to_string).collect::<Vec<_>>().join(" "),
            num(r.re),
            num(r.im),
            num(r.abs),
            num(r.ext_re),
            num(r.ext_im),
            num(r.diff),
        ]);
    }
    let summary = format!("multiweyl: {} h-vectors, max |W_h − W_1(g)| = {}", records.len(), num(worst));
    finish(
        "multiweyl",
        g,
        a,
        Parts { records, aggregate: json!({ "tol": tol, "max_diff": worst }), skipped, table, summary, failed: !(worst <= tol) },
    )
}

// ------------------------------------------------------------- spcheck

#[derive(Debug, Args, Serialize)]
pub struct SpArgs {
    #[arg(long)]
    n: u64,
    /// Check every n' in n..=n_max
    #[arg(long)]
    n_max: Option<u64>,
}

#[derive(Serialize)]
struct SpRow<'a> {
    n: u64,
    #[serde(flatten)]
    rec: &'a sweep::SpRecord,
}

fn angle_str(a: &Angle) -> String {
    format!("{}/{}", a.num(), a.den())
}

pub fn spcheck(g: &Global, a: &SpArgs) -> Res<Outcome> {
    no_prime(g, "spcheck")?;
    let xlimit = g.xlimit.unwrap_or(1000);
    let hi = a.n_max.unwrap_or(a.n);
    if a.n == 0 || hi < a.n {
        return Err(CliError::usage("need 1 <= --n <= --n-max"));
    }
    let reports = (a.n..=hi).map(|n| sweep::sp_check(n, xlimit)).collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["n", "p", "k", "m", "angle", "nearest", "distance", "closed_form", "pairing"]);
    let mut rows = Vec::new();
    for r in &reports {
        for x in &r.records {
            table.push(vec![
                r.n.to_string(),
                x.p.to_string(),
                x.k.to_string(),
                x.m.to_string(),
                angle_str(&x.angle),
                angle_str(&x.nearest),
                format!("{}/{}", x.distance.num, x.distance.den),
                x.closed_form.to_string(),
                x.pairing.to_string(),
            ]);
            rows.push(SpRow { n: r.n, rec: x });
        }
    }
    let all_hold = reports.iter().all(|r| r.all_hold);
    let per_n: Vec<Value> = reports.iter().map(|r| json!({ "n": r.n, "primes": r.records.len(), "all_hold": r.all_hold })).collect();
    let summary = format!("spcheck: {} records, law holds: {all_hold}", rows.len());
    finish(
        "spcheck",
        g,
        a,
        Parts { records: rows, aggregate: json!({ "all_hold": all_hold, "per_n": per_n }), skipped: Vec::new(), table, summary, failed: !all_hold },
    )
}

// ---------------------------------------------------- latbasis, valueset

#[derive(Debug, Args, Serialize)]
pub struct LatArgs {
    /// Monic integer defining polynomial; its variable names the generator (default x: the field Q)
    #[arg(long, default_value = "x", allow_hyphen_values = true)]
    field: String,
    /// Element as a polynomial in the generator (repeatable)
    #[arg(long = "elem", allow_hyphen_values = true)]
    elems: Vec<String>,
    /// Check round trip and double membership on this many seeded random instances instead
    #[arg(long, conflicts_with = "elems")]
    random: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct ValueSetArgs {
    #[arg(long, default_value = "x", allow_hyphen_values = true)]
    field: String,
    #[arg(long = "elem", required = true, allow_hyphen_values = true)]
    elems: Vec<String>,
    /// Restrict rational generators by the congruence laws for ψ(1/n)
    #[arg(long)]
    sp_mode: bool,
}

fn number_field(text: &str) -> Res<(NumberFieldDesc, String)> {
    let e = parse_polynomial(text)?;
    let var = match e.vars.as_slice() {
        [v] => v.clone(),
        _ => return Err(CliError::usage(format!("field polynomial '{text}' must be univariate and nonconstant"))),
    };
    let ints = e.poly.univariate_int_coeffs().map_err(|_| CliError::usage("field polynomial needs integer coefficients"))?;
    if !ints.last().is_some_and(One::is_one) {
        return Err(CliError::usage("field polynomial must be monic"));
    }
    Ok((numfield::nf_build(&ints)?, var))
}

fn parse_elems(nf: &NumberFieldDesc, var: &str, texts: &[String]) -> Res<Vec<NFElem>> {
    texts
        .iter()
        .map(|t| Ok(NFElem::from_poly(nf, &parse_polynomial_with_vars(t, &[var])?.poly)?))
        .collect()
}

/// Every input equals `Σ expression[i][j]·basis_j`, and every basis element
/// is an integer combination of the inputs.
fn lattice_checks(nf: &NumberFieldDesc, elems: &[NFElem], lb: &LatticeBasis) -> (bool, bool) {
    let round_trip = elems.len() == lb.expression.len()
        && elems.iter().zip(&lb.expression).all(|(e, coords)| {
            let sum = lb
                .basis
                .iter()
                .zip(coords)
                .fold(NFElem::from_rational(nf, BigRational::zero()), |acc, (b, c)| acc.add(&b.scale(&BigRational::from_integer(c.clone()))));
            &sum == e
        });
    (round_trip, numfield::basis_in_terms_of_inputs(elems, &lb.basis).is_some())
}

fn random_elems(nf: &NumberFieldDesc, rng: &mut ChaCha8Rng) -> Vec<NFElem> {
    let d = nf.degree();
    let k = rng.gen_range(1..=4);
    let mut out: Vec<NFElem> = (0..k)
        .map(|_| {
            let coeffs = (0..d).map(|_| BigRational::new(rng.gen_range(-20i64..=20).into(), rng.gen_range(1i64..=6).into())).collect();
            NFElem::new(nf, coeffs).expect("d coordinates")
        })
        .collect();
    // a dependent element exercises the reduction path
    if rng.gen_bool(0.5) {
        let dep = out.iter().fold(NFElem::from_rational(nf, BigRational::zero()), |acc, e| {
            acc.add(&e.scale(&BigRational::from_integer(rng.gen_range(-3i64..=3).into())))
        });
        out.push(dep);
    }
    out
}

fn int_strings(rows: &[Vec<BigInt>]) -> Vec<Vec<String>> {
    rows.iter().map(|r| r.iter().map(BigInt::to_string).collect()).collect()
}

pub fn latbasis(g: &Global, a: &LatArgs) -> Res<Outcome> {
    let (nf, var) = number_field(&a.field)?;
    if let Some(count) = a.random {
        let records: Vec<Value> = (0..count)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(g.seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
                let elems = random_elems(&nf, &mut rng);
                let lb = numfield::lattice_basis(&elems)?;
                let (rt, dm) = lattice_checks(&nf, &elems, &lb);
                Ok(json!({
                    "index": i,
                    "inputs": elems.iter().map(|e| e.display(&var)).collect::<Vec<_>>(),
                    "basis": lb.basis.iter().map(|e| e.display(&var)).collect::<Vec<_>>(),
                    "round_trip": rt,
                    "double_membership": dm,
                }))
            })
            .collect::<Result<_, Error>>()?;
        let bad = records.iter().filter(|r| r["round_trip"] != true || r["double_membership"] != true).count();
        let mut table = Table::new(&["index", "inputs", "basis", "round_trip", "double_membership"]);
        for r in &records {
            let join = |k: &str| r[k].as_array().map_or(String::new(), |v| v.iter().filter_map(Value::as_str).collect::<Vec<_>>().join("; "));
            table.push(vec![r["index"].to_string(), join("inputs"), join("basis"), r["round_trip"].to_string(), r["double_membership"].to_string()]);
        }
        let summary = format!("latbasis: {count} instances, {bad} failures");
        return finish(
            "latbasis",
            g,
            a,
            Parts {
                records,
                aggregate: json!({ "instances": count, "failures": bad, "certificate": nf.certificate() }),
                skipped: Vec::new(),
                table,
                summary,
                failed: bad > 0,
            },
        );
    }
    if a.elems.is_empty() {
        return Err(CliError::usage("give --elem (repeatable) or --random"));
    }
    let elems = parse_elems(&nf, &var, &a.elems)?;
    let lb = numfield::lattice_basis(&elems)?;
    let (rt, dm) = lattice_checks(&nf, &elems, &lb);
    let mut table = Table::new(&["index", "basis"]);
    let basis: Vec<String> = lb.basis.iter().map(|e| e.display(&var)).collect();
    for (i, b) in basis.iter().enumerate() {
        table.push(vec![i.to_string(), b.clone()]);
    }
    let summary = format!("latbasis: rank {}, basis [{}]", basis.len(), basis.join(", "));
    finish(
        "latbasis",
        g,
        a,
        Parts {
            records: basis,
            aggregate: json!({
                "expression": int_strings(&lb.expression),
                "round_trip": rt,
                "double_membership": dm,
                "certificate": nf.certificate(),
            }),
            skipped: Vec::new(),
            table,
            summary,
            failed: !(rt && dm),
        },
    )
}

pub fn valueset(g: &Global, a: &ValueSetArgs) -> Res<Outcome> {
    let (nf, var) = number_field(&a.field)?;
    let elems = parse_elems(&nf, &var, &a.elems)?;
    let vs = numfield::value_set(&elems, a.sp_mode)?;
    let description = vs.describe();
    let mut table = Table::new(&["index", "element", "coordinates"]);
    let records: Vec<Value> = elems
        .iter()
        .zip(vs.exponents())
        .enumerate()
        .map(|(i, (e, row))| {
            let exps: Vec<String> = row.iter().map(BigInt::to_string).collect();
            table.push(vec![i.to_string(), e.display(&var), exps.join(" ")]);
            json!({ "index": i, "element": e.display(&var), "exponents": exps })
        })
        .collect();
    let summary = format!("valueset: {description}");
    finish(
        "valueset",
        g,
        a,
        Parts {
            records,
            aggregate: json!({
                "description": description,
                "basis": vs.lattice.basis.iter().map(|e| e.display(&var)).collect::<Vec<_>>(),
                "annotations": vs.annotations,
                "sp_mode": vs.sp_mode,
            }),
            skipped: Vec::new(),
            table,
            summary,
            failed: false,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laurent_terms() {
        let (e, c) = parse_laurent_term("1,-1:1/2:3", 2).unwrap();
        assert_eq!(e, vec![1, -1]);
        assert_eq!(c, Complex::new(BigRational::new(1.into(), 2.into()), BigRational::from_integer(3.into())));
        assert!(parse_laurent_term("1:1", 2).is_err());
        assert!(parse_laurent_term("1,0", 2).is_err());
    }

    #[test]
    fn boxes() {
        assert_eq!(parse_box("half", 2, 7).unwrap(), vec![0..4, 0..4]);
        assert_eq!(parse_box("0..3, 2..7", 2, 7).unwrap(), vec![0..3, 2..7]);
        assert!(parse_box("0..8,0..1", 2, 7).is_err());
        assert!(parse_box("0..3", 2, 7).is_err());
    }

    #[test]
    fn corpus_is_reproducible() {
        let a = corpus_poly(0, 17, 2, 6);
        assert_eq!(a, corpus_poly(0, 17, 2, 6));
        assert!((3..=7).contains(&a.len()));
        assert_ne!(*a.last().unwrap(), 0);
    }

    #[test]
    fn angle_of_character() {
        assert_eq!(angle_str(&Angle::new(10, 4)), "1/2");
    }
}

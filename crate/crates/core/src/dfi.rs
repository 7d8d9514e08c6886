//! Equidistribution of polynomial roots modulo primes: sweeps over primes
//! collecting the angles `ν/p` (or `g(ν)/p`), their Kolmogorov-Smirnov
//! distance and Weyl sums, joint Weyl sums of powers, and the exact
//! congruence law for `ψ_p(n^{-1})`.

use num::{BigInt, BigRational, Integer, Signed, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::arith;
use crate::character::Angle;
use crate::error::{Error, Result};
use crate::measure::SkippedPrime;
use crate::mpoly::{reduce_rational, MPoly};
use crate::numfield::{self, NFElem};
use crate::stats;
use crate::upoly;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DfiConfig {
    pub xlimit: u64,
    /// Keep only `p ≡ res (mod modulus)`, as `(modulus, res)`.
    pub congruence: Option<(u64, u64)>,
    /// Weyl sums `W_1..W_H`.
    pub weyl_depth: u32,
    pub hist_bins: Option<usize>,
    /// Keep only primes where `f` splits completely.
    pub split_only: bool,
}

impl Default for DfiConfig {
    fn default() -> Self {
        DfiConfig { xlimit: 1000, congruence: None, weyl_depth: 5, hist_bins: None, split_only: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Sample {
    pub p: u64,
    pub root: u64,
    pub angle: Angle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylEntry {
    pub h: i64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

impl WeylEntry {
    fn new(h: i64, w: num::complex::Complex64) -> Self {
        WeylEntry { h, re: w.re, im: w.im, abs: w.norm() }
    }
}

pub const SPLIT_FILTER_NOTE: &str =
    "complete splitting modulo p stands in for the splitting-degree condition; this is an approximation";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub poly: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    pub xlimit: u64,
    pub congruence: Option<(u64, u64)>,
    pub split_only: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
    /// Primes that contributed at least one sample.
    pub primes_used: u64,
    pub sample_count: u64,
    pub empty: bool,
    pub ks: Option<f64>,
    pub weyl: Vec<WeylEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub histogram: Option<Vec<u64>>,
    pub skipped: Vec<SkippedPrime>,
    /// Samples in ascending `p`, then ascending root.
    #[serde(skip)]
    pub samples: Vec<Sample>,
}

impl SweepReport {
    pub fn weyl_h(&self, h: i64) -> Option<&WeylEntry> {
        self.weyl.iter().find(|w| w.h == h)
    }
}

/// A univariate polynomial with its integer form and bad-prime data.
struct Prepared {
    ints: Vec<BigInt>,
    degree: usize,
    lc: BigInt,
    disc: BigInt,
}

fn prepare(f: &MPoly) -> Result<Prepared> {
    let cs = f.univariate_coeffs()?;
    if cs.len() < 3 {
        return Err(Error::Degenerate("degree < 2: a single forced root".into()));
    }
    let den = f.denominator_lcm();
    let ints: Vec<BigInt> = cs.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
    numfield::nf_build_from_poly(f)?;
    let degree = ints.len() - 1;
    let lc = ints[degree].clone();
    let disc = numfield::discriminant(&ints);
    Ok(Prepared { ints, degree, lc, disc })
}

fn bad_reason(prep: &Prepared, extra: &[&BigInt], p: u64) -> Option<String> {
    let pb = BigInt::from(p);
    if (&prep.lc % &pb).is_zero() {
        return Some(format!("{p} divides the leading coefficient"));
    }
    if (&prep.disc % &pb).is_zero() {
        return Some(format!("{p} divides the discriminant"));
    }
    if extra.iter().any(|d| (*d % &pb).is_zero()) {
        return Some(format!("{p} divides a denominator"));
    }
    None
}

enum PerPrime {
    Skipped(SkippedPrime),
    Roots(u64, Vec<u64>),
}

/// Roots of `f mod p` for every admissible prime, in ascending order of `p`.
fn root_table(prep: &Prepared, extra: &[&BigInt], cfg: &DfiConfig) -> Result<Vec<PerPrime>> {
    let primes = arith::primes_in(cfg.xlimit, cfg.congruence)?;
    primes
        .par_iter()
        .map(|&p| {
            if let Some(reason) = bad_reason(prep, extra, p) {
                return Ok(PerPrime::Skipped(SkippedPrime { p, reason }));
            }
            let fm: Vec<u64> = prep.ints.iter().map(|c| numfield::bigint_mod(c, p)).collect();
            let mut roots = upoly::prime_distinct_roots(p, &fm)?;
            if cfg.split_only && roots.len() != prep.degree {
                roots.clear();
            }
            Ok(PerPrime::Roots(p, roots))
        })
        .collect()
}

fn build_report(
    poly: String,
    g: Option<String>,
    cfg: &DfiConfig,
    table: Vec<PerPrime>,
    angle_of: impl Fn(u64, u64) -> Angle + Sync,
) -> Result<SweepReport> {
    let mut skipped = Vec::new();
    let mut samples = Vec::new();
    let mut primes_used = 0;
    for entry in table {
        match entry {
            PerPrime::Skipped(s) => skipped.push(s),
            PerPrime::Roots(p, roots) => {
                if !roots.is_empty() {
                    primes_used += 1;
                }
                samples.extend(roots.into_iter().map(|b| Sample { p, root: b, angle: angle_of(p, b) }));
            }
        }
    }
    let angles: Vec<Angle> = samples.iter().map(|s| s.angle).collect();
    let (ks, weyl) = if angles.is_empty() {
        (None, Vec::new())
    } else {
        let ks = stats::ks_statistic_angles(&angles)?;
        let weyl = (1..=cfg.weyl_depth as i64)
            .into_par_iter()
            .map(|h| stats::weyl_sum(&angles, h).map(|w| WeylEntry::new(h, w)))
            .collect::<Result<Vec<_>>>()?;
        (Some(ks), weyl)
    };
    Ok(SweepReport {
        poly,
        g,
        xlimit: cfg.xlimit,
        congruence: cfg.congruence,
        split_only: cfg.split_only,
        note: cfg.split_only.then_some(SPLIT_FILTER_NOTE),
        primes_used,
        sample_count: samples.len() as u64,
        empty: samples.is_empty(),
        ks,
        weyl,
        histogram: cfg.hist_bins.map(|b| stats::histogram(&angles, b)),
        skipped,
        samples,
    })
}

fn poly_string(f: &MPoly) -> Result<String> {
    Ok(numfield::format_poly(&f.univariate_coeffs()?, "X"))
}

/// Angles `ν/p` over all roots `ν` of `f mod p`, for admissible primes up to
/// `xlimit`. Primes dividing the leading coefficient or the discriminant are
/// skipped and listed.
pub fn dfi_sweep(f: &MPoly, cfg: &DfiConfig) -> Result<SweepReport> {
    let prep = prepare(f)?;
    let table = root_table(&prep, &[], cfg)?;
    build_report(poly_string(f)?, None, cfg, table, |p, b| Angle::new(b, p))
}

/// As [`dfi_sweep`], with samples `g(ν)/p`. Requires `g(a) ∉ Q` for a root
/// `a` of `f`.
pub fn dfi_extended_sweep(f: &MPoly, g: &MPoly, cfg: &DfiConfig) -> Result<SweepReport> {
    let prep = prepare(f)?;
    let (nf, lead) = numfield::nf_build_from_poly(f)?;
    // the field is generated by β = lead·a, so g(a) = g(β / lead)
    let gc = g.univariate_coeffs()?;
    let lead_q = BigRational::from_integer(lead);
    let shifted: Vec<BigRational> = gc.iter().enumerate().map(|(i, c)| c / num::pow(lead_q.clone(), i)).collect();
    let ga = NFElem::from_poly(&nf, &MPoly::from_terms(1, shifted.into_iter().enumerate().map(|(i, c)| (vec![i as u32], c))))?;
    if ga.is_rational() {
        return Err(Error::RationalElement);
    }
    let dens: Vec<BigInt> = gc.iter().map(|c| c.denom().clone()).filter(|d| d.abs() > BigInt::from(1)).collect();
    let dens_ref: Vec<&BigInt> = dens.iter().collect();
    let table = root_table(&prep, &dens_ref, cfg)?;
    let gr: Vec<BigRational> = gc;
    build_report(poly_string(f)?, Some(poly_string(g)?), cfg, table, |p, b| {
        let v = gr.iter().rev().fold(0u64, |acc, c| {
            arith::add_mod(arith::mul_mod(acc, b, p), reduce_rational(c, p).expect("denominators are prime to p"), p)
        });
        Angle::new(v, p)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiWeyl {
    pub h: Vec<i64>,
    pub w: WeylEntry,
    pub sample_count: u64,
    pub skipped: Vec<SkippedPrime>,
}

/// `W_h`: the average of `ψ_p(Σ_i h_i b^i)` over roots `b` of `f mod p`,
/// `h = (h_1, …, h_{d-1})`, computed by adding the exact angles `b^i/p`.
pub fn multi_weyl(f: &MPoly, h: &[i64], cfg: &DfiConfig) -> Result<MultiWeyl> {
    let prep = prepare(f)?;
    if h.len() != prep.degree - 1 {
        return Err(Error::InvalidArgument(format!(
            "h needs {} entries for a degree-{} polynomial",
            prep.degree - 1,
            prep.degree
        )));
    }
    if h.iter().all(|&v| v == 0) {
        return Err(Error::InvalidArgument("h = 0 gives the trivial sum; W_0 = 1".into()));
    }
    let table = root_table(&prep, &[], cfg)?;
    let mut skipped = Vec::new();
    let mut angles = Vec::new();
    for entry in table {
        match entry {
            PerPrime::Skipped(s) => skipped.push(s),
            PerPrime::Roots(p, roots) => {
                for b in roots {
                    let mut power = 1u64;
                    let mut acc = Angle::ZERO;
                    for &hi in h {
                        power = arith::mul_mod(power, b, p);
                        acc = acc + Angle::new(power, p).scale(hi);
                    }
                    angles.push(acc);
                }
            }
        }
    }
    let w = stats::weyl_sum(&angles, 1).map_err(|_| Error::InvalidArgument("no samples in range".into()))?;
    Ok(MultiWeyl { h: h.to_vec(), w: WeylEntry::new(1, w), sample_count: angles.len() as u64, skipped })
}

/// The polynomial `Σ h_i X^i`.
pub fn weyl_polynomial(h: &[i64]) -> MPoly {
    let mut coeffs = vec![0i64];
    coeffs.extend_from_slice(h);
    MPoly::univariate(&coeffs)
}

/// A fraction `num/den`, serialized as `"num/den"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fraction {
    pub num: u128,
    pub den: u128,
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", self.num, self.den))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpRecord {
    pub p: u64,
    /// `p mod n`.
    pub k: u64,
    /// `n^{-1} mod p`.
    pub m: u64,
    pub angle: Angle,
    /// Nearest multiple `t/n` of `1/n` to `m/p`.
    pub nearest: Angle,
    pub distance: Fraction,
    /// `distance == 1/(np)`.
    pub closed_form: bool,
    /// `t·k ≡ -1 (mod n)` and `t` is a unit modulo `n`.
    pub pairing: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpReport {
    pub n: u64,
    pub xlimit: u64,
    pub records: Vec<SpRecord>,
    pub all_hold: bool,
}

/// For each prime `p <= xlimit` not dividing `n`: the exact distance from
/// `ψ_p(n^{-1})` to the nearest `n`-th root of unity, checked against
/// `1/(np)`, and the class pairing of that root with `p mod n`.
pub fn sp_check(n: u64, xlimit: u64) -> Result<SpReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let primes = arith::primes_in(xlimit, None)?;
    let records: Vec<SpRecord> = primes
        .par_iter()
        .filter(|&&p| n % p != 0)
        .map(|&p| {
            let m = arith::inv_mod(n % p, p).expect("p does not divide n");
            let (n128, p128, m128) = (n as u128, p as u128, m as u128);
            // t = round(m n / p), halves rounded down; a tie needs p = 2
            let t = (2 * m128 * n128 + p128 - 1) / (2 * p128);
            let diff = (m128 * n128).abs_diff(t * p128);
            let den = n128 * p128;
            let g = diff.gcd(&den).max(1);
            let distance = Fraction { num: diff / g, den: den / g };
            let t_mod = (t % n128) as u64;
            let k = p % n;
            let pairing = n == 1
                || (arith::mul_mod(t_mod, k, n) == n - 1 && arith::gcd(t_mod, n) == 1);
            SpRecord {
                p,
                k,
                m,
                angle: Angle::new(m, p),
                nearest: Angle::new(t_mod, n),
                distance,
                closed_form: diff == 1,
                pairing,
            }
        })
        .collect();
    let all_hold = records.iter().all(|r| r.closed_form && r.pairing);
    Ok(SpReport { n, xlimit, records, all_hold })
}

/// `1/(np)` as a reduced fraction, for comparisons.
pub fn sp_expected(n: u64, p: u64) -> Fraction {
    Fraction { num: 1, den: n as u128 * p as u128 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x2p1() -> MPoly {
        MPoly::univariate(&[1, 0, 1])
    }

    fn cfg(xlimit: u64) -> DfiConfig {
        DfiConfig { xlimit, ..DfiConfig::default() }
    }

    #[test]
    fn prime_five_contributes_two_fifths_and_three_fifths() {
        let r = dfi_sweep(&x2p1(), &cfg(10)).unwrap();
        let at5: Vec<Angle> = r.samples.iter().filter(|s| s.p == 5).map(|s| s.angle).collect();
        assert_eq!(at5, vec![Angle::new(2, 5), Angle::new(3, 5)]);
        // disc = -4: p = 2 is skipped
        assert_eq!(r.skipped.iter().map(|s| s.p).collect::<Vec<_>>(), vec![2]);
        assert_eq!(r.weyl.len(), 5);
    }

    #[test]
    fn samples_match_exhaustive_scan() {
        for coeffs in [vec![1i64, 0, 1], vec![-2, 0, 0, 1], vec![-1, -1, 0, 0, 0, 1], vec![3, 0, 2]] {
            let f = MPoly::univariate(&coeffs);
            let r = dfi_sweep(&f, &cfg(1000)).unwrap();
            let skipped: Vec<u64> = r.skipped.iter().map(|s| s.p).collect();
            for p in arith::primes_in(1000, None).unwrap() {
                if skipped.contains(&p) {
                    continue;
                }
                let expect: Vec<Angle> = (0..p)
                    .filter(|&v| {
                        coeffs.iter().rev().fold(0i128, |acc, &c| (acc * v as i128 + c as i128).rem_euclid(p as i128)) == 0
                    })
                    .map(|v| Angle::new(v, p))
                    .collect();
                let got: Vec<Angle> = r.samples.iter().filter(|s| s.p == p).map(|s| s.angle).collect();
                assert_eq!(got, expect, "f = {coeffs:?}, p = {p}");
            }
        }
    }

    #[test]
    fn congruence_class_without_roots_is_empty() {
        let c = DfiConfig { congruence: Some((4, 3)), ..cfg(2000) };
        let r = dfi_sweep(&x2p1(), &c).unwrap();
        assert!(r.empty);
        assert_eq!(r.sample_count, 0);
        assert_eq!(r.ks, None);
    }

    #[test]
    fn sweep_errors() {
        assert!(matches!(dfi_sweep(&MPoly::univariate(&[1, 1]), &cfg(100)), Err(Error::Degenerate(_))));
        assert!(matches!(dfi_sweep(&MPoly::univariate(&[-1, 0, 1]), &cfg(100)), Err(Error::Reducible { .. })));
        let c = DfiConfig { congruence: Some((4, 2)), ..cfg(100) };
        assert!(matches!(dfi_sweep(&x2p1(), &c), Err(Error::EmptyCongruenceClass { .. })));
    }

    #[test]
    fn extended_examples() {
        let f = MPoly::univariate(&[-2, 0, 1]);
        let at7 = |r: &SweepReport| r.samples.iter().filter(|s| s.p == 7).map(|s| s.angle).collect::<Vec<_>>();
        let id = dfi_extended_sweep(&f, &MPoly::univariate(&[0, 1]), &cfg(500)).unwrap();
        assert_eq!(at7(&id), vec![Angle::new(3, 7), Angle::new(4, 7)]);
        let plain = dfi_sweep(&f, &cfg(500)).unwrap();
        assert_eq!(id.samples, plain.samples);
        assert_eq!(id.weyl, plain.weyl);
        assert_eq!(id.ks, plain.ks);
        let shifted = dfi_extended_sweep(&f, &MPoly::univariate(&[1, 1]), &cfg(500)).unwrap();
        assert_eq!(at7(&shifted), vec![Angle::new(4, 7), Angle::new(5, 7)]);
        // g = X^2 is 2 in the field
        assert_eq!(dfi_extended_sweep(&f, &MPoly::univariate(&[0, 0, 1]), &cfg(100)), Err(Error::RationalElement));
    }

    #[test]
    fn split_only_keeps_fully_split_primes() {
        let f = MPoly::univariate(&[-2, 0, 0, 1]);
        let c = DfiConfig { split_only: true, ..cfg(2000) };
        let r = dfi_sweep(&f, &c).unwrap();
        assert!(r.note.is_some());
        let mut per_p = std::collections::BTreeMap::new();
        for s in &r.samples {
            *per_p.entry(s.p).or_insert(0) += 1;
        }
        assert!(per_p.values().all(|&k| k == 3));
        assert!(per_p.keys().all(|&p| p % 3 == 1));
    }

    #[test]
    fn multi_weyl_equals_extended_sweep() {
        let f = MPoly::univariate(&[-2, 0, 0, 1]);
        for h in [[1i64, 0], [0, 1], [2, -3], [-1, 5]] {
            let mw = multi_weyl(&f, &h, &cfg(3000)).unwrap();
            let ext = dfi_extended_sweep(&f, &weyl_polynomial(&h), &cfg(3000)).unwrap();
            let w1 = ext.weyl_h(1).unwrap();
            assert_eq!((mw.w.re, mw.w.im), (w1.re, w1.im));
            assert_eq!(mw.sample_count, ext.sample_count);
        }
        assert!(multi_weyl(&f, &[0, 0], &cfg(100)).is_err());
        assert!(multi_weyl(&f, &[1], &cfg(100)).is_err());
    }

    #[test]
    fn weyl_sums_are_conjugate_symmetric() {
        let r = dfi_sweep(&MPoly::univariate(&[-2, 0, 0, 1]), &cfg(2000)).unwrap();
        let angles: Vec<Angle> = r.samples.iter().map(|s| s.angle).collect();
        for h in 1..4 {
            assert_eq!(stats::weyl_sum(&angles, -h).unwrap(), stats::weyl_sum(&angles, h).unwrap().conj());
        }
    }

    #[test]
    fn sp_examples() {
        let r = sp_check(3, 10).unwrap();
        let r7 = r.records.iter().find(|x| x.p == 7).unwrap();
        assert_eq!(r7.m, 5);
        assert_eq!(r7.nearest, Angle::new(2, 3));
        assert_eq!(r7.distance, Fraction { num: 1, den: 21 });
        assert!(r.records.iter().all(|x| x.p != 3));
        for x in sp_check(2, 200).unwrap().records {
            assert_eq!(x.m, (x.p + 1) / 2);
            assert_eq!(x.distance, sp_expected(2, x.p));
        }
        for x in sp_check(1, 100).unwrap().records {
            assert_eq!(x.angle, Angle::new(1, x.p));
            assert_eq!(x.nearest, Angle::ZERO);
            assert_eq!(x.distance, Fraction { num: 1, den: x.p as u128 });
        }
    }

    #[test]
    fn sp_law_holds_exactly() {
        for n in 1..=12 {
            let r = sp_check(n, 3000).unwrap();
            assert!(r.all_hold, "n = {n}");
            for x in &r.records {
                let e = sp_expected(n, x.p);
                // compare as exact rationals
                assert_eq!(x.distance.num * e.den, e.num * x.distance.den);
                let (num, den) = x.angle.circle_distance(&x.nearest);
                assert_eq!((num, den), (e.num, e.den));
            }
        }
    }
}

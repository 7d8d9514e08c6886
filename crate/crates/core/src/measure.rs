//! Normalized counting measures across primes, the Fourier transform on
//! `F_p^n`, and moments of pushforwards to the torus.

use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::character::{angle_to_complex, Angle};
use crate::error::{Error, Result};
use crate::mpoly::System;
use crate::points;
use crate::stats::CompensatedSum;

/// A prime left out of a sweep, with the reason.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedPrime {
    pub p: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureRecord {
    pub p: u64,
    /// `|X(F_p)|`.
    pub count: u64,
    /// `|X'(F_p)|` for next-to-leading-order series.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count_ref: Option<u64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureSeries {
    pub declared_dim: u32,
    /// Ascending in `p`.
    pub records: Vec<MeasureRecord>,
    pub skipped: Vec<SkippedPrime>,
    /// Least-squares slope of `log count` against `log p`.
    pub fitted_dim: Option<f64>,
    pub dim_warning: Option<String>,
}

/// Mismatch between fitted and declared dimension that triggers a warning.
pub const DIM_WARN_THRESHOLD: f64 = 0.25;

fn loglog_slope(records: &[MeasureRecord]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        records.iter().filter(|r| r.count > 0).map(|r| ((r.p as f64).ln(), (r.count as f64).ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|t| t.0).sum::<f64>() / n;
    let my = pts.iter().map(|t| t.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|t| (t.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|t| (t.0 - mx) * (t.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn skip_reason(e: &Error) -> Option<String> {
    match e {
        Error::BudgetExceeded { .. } | Error::BadPrime(_) => Some(e.to_string()),
        _ => None,
    }
}

fn finish(declared_dim: u32, results: Vec<(u64, Result<MeasureRecord>)>) -> Result<MeasureSeries> {
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (p, r) in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => match skip_reason(&e) {
                Some(reason) => skipped.push(SkippedPrime { p, reason }),
                None => return Err(e),
            },
        }
    }
    let fitted_dim = loglog_slope(&records);
    let dim_warning = fitted_dim.filter(|s| (s - declared_dim as f64).abs() >= DIM_WARN_THRESHOLD).map(|s| {
        format!("point counts grow like p^{s:.3}, but the declared dimension is {declared_dim}")
    });
    Ok(MeasureSeries { declared_dim, records, skipped, fitted_dim, dim_warning })
}

fn sorted_primes(primes: &[u64]) -> Result<Vec<u64>> {
    let mut ps = primes.to_vec();
    ps.sort_unstable();
    ps.dedup();
    if let Some(&bad) = ps.iter().find(|&&p| !crate::arith::is_prime(p)) {
        return Err(Error::NotPrime(bad));
    }
    Ok(ps)
}

/// `|D(F_p)| / p^dim` for each prime. Primes over budget or with a
/// denominator vanishing mod `p` are listed as skipped.
pub fn mu0_sweep(system: &System, declared_dim: u32, primes: &[u64], budget: u128) -> Result<MeasureSeries> {
    let ps = sorted_primes(primes)?;
    let results: Vec<(u64, Result<MeasureRecord>)> = ps
        .par_iter()
        .map(|&p| {
            let r = points::count_points_prime(system, p, None, budget).map(|count| MeasureRecord {
                p,
                count,
                count_ref: None,
                value: count as f64 / (p as f64).powi(declared_dim as i32),
            });
            (p, r)
        })
        .collect();
    finish(declared_dim, results)
}

/// `p^{1/2 - dim} (|X(F_p)| - |X'(F_p)|)` for each prime. The two systems
/// may live in different ambient spaces.
pub fn mu1_sweep(x: &System, x_ref: &System, declared_dim: u32, primes: &[u64], budget: u128) -> Result<MeasureSeries> {
    let ps = sorted_primes(primes)?;
    let results: Vec<(u64, Result<MeasureRecord>)> = ps
        .par_iter()
        .map(|&p| {
            let r = points::count_points_prime(x, p, None, budget).and_then(|count| {
                let count_ref = points::count_points_prime(x_ref, p, None, budget)?;
                let diff = count as f64 - count_ref as f64;
                Ok(MeasureRecord {
                    p,
                    count,
                    count_ref: Some(count_ref),
                    value: (p as f64).powf(0.5 - declared_dim as f64) * diff,
                })
            });
            (p, r)
        })
        .collect();
    finish(declared_dim, results)
}

pub const FOURIER_BUDGET: u128 = 1 << 24;

/// A complex-valued function on `F_p^n`, stored in lexicographic order of
/// representative tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    p: u64,
    n: usize,
    entries: Vec<Complex64>,
}

impl ValueTable {
    pub fn new(p: u64, n: usize, entries: Vec<Complex64>) -> Result<Self> {
        crate::field::PrimeField::new(p)?;
        let size = (p as u128).checked_pow(n as u32);
        if size != Some(entries.len() as u128) {
            return Err(Error::InvalidArgument(format!("table for F_{p}^{n} needs p^n entries, got {}", entries.len())));
        }
        Ok(ValueTable { p, n, entries })
    }

    pub fn from_fn(p: u64, n: usize, budget: u128, f: impl Fn(&[u64]) -> Complex64 + Sync) -> Result<Self> {
        crate::field::PrimeField::new(p)?;
        let size = table_size(p, n, budget)?;
        let entries = (0..size)
            .into_par_iter()
            .map_init(|| vec![0u64; n], |pt, i| {
                unrank(i as u128, p, pt);
                f(pt)
            })
            .collect();
        Ok(ValueTable { p, n, entries })
    }

    /// Independent uniform entries in the unit square, from a seeded stream.
    pub fn random(p: u64, n: usize, seed: u64) -> Result<Self> {
        crate::field::PrimeField::new(p)?;
        let size = table_size(p, n, FOURIER_BUDGET)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let entries = (0..size).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        Ok(ValueTable { p, n, entries })
    }

    /// Indicator function of the points of `system`.
    pub fn indicator(system: &System, p: u64, budget: u128) -> Result<Self> {
        crate::field::PrimeField::new(p)?;
        let n = system.nvars();
        let size = table_size(p, n, budget)?;
        let mut entries = vec![Complex64::new(0.0, 0.0); size];
        let polys = system.reduce(p)?;
        points::for_each_point_prime(&polys, n, p, None, |pt| entries[rank(pt, p)] = Complex64::new(1.0, 0.0))?;
        Ok(ValueTable { p, n, entries })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, point: &[u64]) -> Complex64 {
        self.entries[rank(point, self.p)]
    }

    /// Representative tuple of the `i`-th entry.
    pub fn point_of(&self, i: usize) -> Vec<u64> {
        let mut pt = vec![0; self.n];
        unrank(i as u128, self.p, &mut pt);
        pt
    }
}

fn table_size(p: u64, n: usize, budget: u128) -> Result<usize> {
    let needed = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, cap: budget });
    }
    Ok(needed as usize)
}

fn rank(pt: &[u64], p: u64) -> usize {
    pt.iter().fold(0usize, |acc, &x| acc * p as usize + x as usize)
}

fn unrank(mut i: u128, p: u64, out: &mut [u64]) {
    for slot in out.iter_mut().rev() {
        *slot = (i % p as u128) as u64;
        i /= p as u128;
    }
}

/// `F(φ)(y) = p^{-n} Σ_x ψ_p(x·y) φ(x)`, computed one axis at a time.
pub fn fourier_table(phi: &ValueTable, budget: u128) -> Result<ValueTable> {
    let (p, n) = (phi.p, phi.n);
    table_size(p, n, budget)?;
    let len = p as usize;
    // ψ_p(t) = exp(+2πi t/p) is the kernel of the unnormalized inverse DFT
    let fft = FftPlanner::<f64>::new().plan_fft_inverse(len);
    let scratch_len = fft.get_inplace_scratch_len();
    let scale = 1.0 / p as f64;
    let mut data = phi.entries.clone();
    let rows = data.len() / len;
    for _ in 0..n {
        data.par_chunks_mut(len).for_each_init(
            || vec![Complex64::new(0.0, 0.0); scratch_len],
            |scratch, line| {
                fft.process_with_scratch(line, scratch);
                for z in line.iter_mut() {
                    *z *= scale;
                }
            },
        );
        // rotate axes so the next one becomes contiguous
        let mut rotated = vec![Complex64::new(0.0, 0.0); data.len()];
        rotated.par_chunks_mut(rows).enumerate().for_each(|(c, out)| {
            for (r, slot) in out.iter_mut().enumerate() {
                *slot = data[r * len + c];
            }
        });
        data = rotated;
    }
    Ok(ValueTable { p, n, entries: data })
}

/// Direct `O(p^{2n})` evaluation of the same transform.
pub fn fourier_table_naive(phi: &ValueTable, budget: u128) -> Result<ValueTable> {
    let (p, n) = (phi.p, phi.n);
    let size = table_size(p, n, budget)?;
    let norm = (p as f64).powi(n as i32);
    let entries = (0..size)
        .into_par_iter()
        .map(|yi| {
            let mut y = vec![0; n];
            unrank(yi as u128, p, &mut y);
            let mut x = vec![0; n];
            let mut s = CompensatedSum::new();
            for (xi, v) in phi.entries.iter().enumerate() {
                unrank(xi as u128, p, &mut x);
                let dot = x.iter().zip(&y).fold(0u128, |acc, (&a, &b)| (acc + a as u128 * b as u128) % p as u128);
                s.add(angle_to_complex(Angle::new(dot as u64, p)) * v);
            }
            s.value() / norm
        })
        .collect();
    Ok(ValueTable { p, n, entries })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Moment {
    pub m: Vec<i64>,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pushforward {
    pub p: u64,
    pub points: u64,
    /// `W_0` first, then `0 < ‖m‖∞ <= M` in lexicographic order.
    pub moments: Vec<Moment>,
}

/// Moments `W_m = |D|^{-1} Σ_{x∈D} ψ_p(m·x)` of the image of `D(F_p)` on
/// the torus.
pub fn pushforward_weyl(system: &System, p: u64, max_m: u32, budget: u128) -> Result<Pushforward> {
    let pts = points::enumerate_points_prime(system, p, None, budget)?;
    if pts.is_empty() {
        return Err(Error::NoPoints);
    }
    let n = system.nvars();
    let side = 2 * max_m as u64 + 1;
    let total = side.checked_pow(n as u32).ok_or_else(|| Error::InvalidArgument("moment range too large".into()))?;
    let ms: Vec<Vec<i64>> = (0..total)
        .map(|mut i| {
            let mut m = vec![0i64; n];
            for slot in m.iter_mut().rev() {
                *slot = (i % side) as i64 - max_m as i64;
                i /= side;
            }
            m
        })
        .filter(|m| m.iter().any(|&v| v != 0))
        .collect();
    let count = pts.len() as f64;
    let mut moments = vec![Moment { m: vec![0; n], re: 1.0, im: 0.0, abs: 1.0 }];
    moments.par_extend(ms.into_par_iter().map(|m| {
        let s: CompensatedSum = pts
            .iter()
            .map(|x| {
                let t: i128 = m.iter().zip(x).map(|(&a, &b)| a as i128 * b as i128).sum();
                angle_to_complex(Angle::from_signed(t, p))
            })
            .collect();
        let w = s.value() / count;
        Moment { m, re: w.re, im: w.im, abs: w.norm() }
    }));
    Ok(Pushforward { p, points: pts.len() as u64, moments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpoly::MPoly;
    use num::BigRational;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn mu0_of_affine_space_is_one() {
        let primes = crate::arith::primes_in(60, None).unwrap();
        for k in 1..=2 {
            let s = mu0_sweep(&System::affine_space(k), k as u32, &primes, points::DEFAULT_BUDGET).unwrap();
            assert!(s.records.iter().all(|r| r.value == 1.0));
            assert!(s.dim_warning.is_none());
            assert!((s.fitted_dim.unwrap() - k as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn mu0_elliptic_curve_within_hasse() {
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let e = System::new(2, vec![y.pow(2).sub(&x.pow(3)).sub(&x)]).unwrap();
        let primes = crate::arith::primes_in(500, None).unwrap();
        let s = mu0_sweep(&e, 1, &primes, points::DEFAULT_BUDGET).unwrap();
        for r in &s.records {
            assert!((r.value - 1.0).abs() <= 2.0 / (r.p as f64).sqrt() + 1e-12, "p = {}", r.p);
        }
        let wrong = mu0_sweep(&e, 2, &primes, points::DEFAULT_BUDGET).unwrap();
        assert!(wrong.dim_warning.is_some());
    }

    #[test]
    fn skipped_primes_are_recorded() {
        let x = MPoly::var(1, 0);
        let third = MPoly::constant(1, BigRational::new(1.into(), 3.into()));
        let sys = System::new(1, vec![x.sub(&third)]).unwrap();
        let s = mu0_sweep(&sys, 0, &[2, 3, 5, 7], points::DEFAULT_BUDGET).unwrap();
        assert_eq!(s.records.iter().map(|r| r.p).collect::<Vec<_>>(), vec![2, 5, 7]);
        assert_eq!(s.skipped.len(), 1);
        assert_eq!(s.skipped[0].p, 3);
        let over = mu0_sweep(&System::affine_space(3), 3, &[2, 101], 1000).unwrap();
        assert_eq!(over.records.len(), 1);
        assert_eq!(over.skipped[0].p, 101);
    }

    #[test]
    fn mu1_examples() {
        let primes = crate::arith::primes_in(300, None).unwrap();
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let e = System::new(2, vec![y.pow(2).sub(&x.pow(3)).sub(&x)]).unwrap();
        let same = mu1_sweep(&e, &e, 1, &primes, points::DEFAULT_BUDGET).unwrap();
        assert!(same.records.iter().all(|r| r.value == 0.0));
        let vs_line = mu1_sweep(&e, &System::affine_space(1), 1, &primes, points::DEFAULT_BUDGET).unwrap();
        assert!(vs_line.records.iter().all(|r| r.value.abs() <= 2.0 + 1e-9));
    }

    #[test]
    fn fourier_examples() {
        let p = 11;
        let one = ValueTable::from_fn(p, 1, FOURIER_BUDGET, |_| c(1.0)).unwrap();
        let f = fourier_table(&one, FOURIER_BUDGET).unwrap();
        for (i, v) in f.entries().iter().enumerate() {
            let expect = if i == 0 { 1.0 } else { 0.0 };
            assert!((v - c(expect)).norm() < 1e-9);
        }
        let cc = 4;
        let chr = ValueTable::from_fn(p, 1, FOURIER_BUDGET, |x| angle_to_complex(Angle::new(cc * x[0], p))).unwrap();
        let f = fourier_table(&chr, FOURIER_BUDGET).unwrap();
        for (i, v) in f.entries().iter().enumerate() {
            let expect = if i as u64 == p - cc { 1.0 } else { 0.0 };
            assert!((v - c(expect)).norm() < 1e-9);
        }
    }

    #[test]
    fn fft_matches_naive_transform() {
        for (p, n) in [(2u64, 1usize), (3, 2), (7, 2), (5, 3), (31, 1)] {
            let phi = ValueTable::random(p, n, p * 10 + n as u64).unwrap();
            let fast = fourier_table(&phi, FOURIER_BUDGET).unwrap();
            let slow = fourier_table_naive(&phi, FOURIER_BUDGET).unwrap();
            for (a, b) in fast.entries().iter().zip(slow.entries()) {
                assert!((a - b).norm() < 1e-12, "p = {p}, n = {n}");
            }
        }
    }

    #[test]
    fn fourier_budget_and_shape_errors() {
        let phi = ValueTable::random(101, 2, 0).unwrap();
        assert!(matches!(fourier_table(&phi, 1000), Err(Error::BudgetExceeded { .. })));
        assert!(ValueTable::new(5, 2, vec![c(0.0); 24]).is_err());
    }

    #[test]
    fn indexing_round_trips() {
        let t = ValueTable::random(7, 3, 1).unwrap();
        for i in [0usize, 1, 48, 342] {
            assert_eq!(t.get(&t.point_of(i)), t.entries()[i]);
        }
    }

    #[test]
    fn pushforward_examples() {
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let diag = System::new(2, vec![x.sub(&y)]).unwrap();
        let w = pushforward_weyl(&diag, 31, 1, points::DEFAULT_BUDGET).unwrap();
        assert_eq!(w.moments[0].m, vec![0, 0]);
        assert_eq!(w.moments[0].re, 1.0);
        let anti = w.moments.iter().find(|m| m.m == vec![1, -1]).unwrap();
        assert_eq!((anti.re, anti.im), (1.0, 0.0));
        assert_eq!(w.moments.len(), 9);

        let p = 10007;
        let parabola = System::new(2, vec![y.sub(&x.pow(2))]).unwrap();
        let w = pushforward_weyl(&parabola, p, 3, points::DEFAULT_BUDGET).unwrap();
        for m in &w.moments[1..] {
            let l1: i64 = m.m.iter().map(|v| v.abs()).sum();
            assert!(m.abs <= 2.0 * (l1 + 1) as f64 / (p as f64).sqrt(), "{:?}", m.m);
        }
        for m in &w.moments {
            let neg: Vec<i64> = m.m.iter().map(|v| -v).collect();
            let other = w.moments.iter().find(|k| k.m == neg).unwrap();
            assert_eq!((other.re, other.im), (m.re, -m.im));
        }
        let empty = System::new(1, vec![MPoly::univariate(&[1, 0, 1])]).unwrap();
        assert_eq!(pushforward_weyl(&empty, 3, 1, points::DEFAULT_BUDGET), Err(Error::NoPoints));
    }
}

//! Summation and uniformity statistics on the circle.

use num::complex::Complex64;

use crate::character::{angle_to_complex, Angle};
use crate::error::{Error, Result};

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    re: f64,
    im: f64,
    c_re: f64,
    c_im: f64,
}

#[inline]
fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, &mut self.c_re, z.re);
        neumaier(&mut self.im, &mut self.c_im, z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re + self.c_re, self.im + self.c_im)
    }
}

impl FromIterator<Complex64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for z in iter {
            s.add(z);
        }
        s
    }
}

/// Kolmogorov-Smirnov distance between the empirical distribution of
/// `samples` (values in `[0, 1)`) and the uniform distribution.
pub fn ks_statistic(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let above = (i + 1) as f64 / n - x;
            let below = x - i as f64 / n;
            above.max(below)
        })
        .fold(0.0f64, f64::max);
    Ok(d.clamp(0.0, 1.0))
}

/// KS distance for exact angles.
pub fn ks_statistic_angles(samples: &[Angle]) -> Result<f64> {
    let xs: Vec<f64> = samples.iter().map(Angle::to_f64).collect();
    ks_statistic(&xs)
}

/// `W_h = (1/N) Σ exp(2πi h θ)` over the samples, in sample order.
pub fn weyl_sum(samples: &[Angle], h: i64) -> Result<Complex64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let s: CompensatedSum = samples.iter().map(|a| angle_to_complex(a.scale(h))).collect();
    Ok(s.value() / samples.len() as f64)
}

/// Counts of samples in `bins` equal subintervals of `[0, 1)`, computed
/// exactly from the fractions.
pub fn histogram(samples: &[Angle], bins: usize) -> Vec<u64> {
    let mut out = vec![0u64; bins];
    if bins == 0 {
        return out;
    }
    for a in samples {
        let idx = (a.num() as u128 * bins as u128 / a.den() as u128) as usize;
        out[idx] += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_examples() {
        for n in 1..50u64 {
            let grid: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
            assert!(ks_statistic(&grid).unwrap() <= 1.0 / n as f64 + 1e-15);
        }
        assert_eq!(ks_statistic(&[0.5]).unwrap(), 0.5);
        assert_eq!(ks_statistic(&[]), Err(Error::EmptyInput));
    }

    #[test]
    fn ks_matches_direct_cdf_comparison() {
        // sup over a fine grid of |F_n(x) - x|, approached from both sides
        let xs = [0.1, 0.15, 0.4, 0.41, 0.9, 0.92, 0.93];
        let n = xs.len() as f64;
        let mut best = 0.0f64;
        for &x in &xs {
            let le = xs.iter().filter(|&&y| y <= x).count() as f64 / n;
            let lt = xs.iter().filter(|&&y| y < x).count() as f64 / n;
            best = best.max((le - x).abs()).max((x - lt).abs());
        }
        assert!((ks_statistic(&xs).unwrap() - best).abs() < 1e-15);
    }

    #[test]
    fn weyl_conjugate_symmetry_is_exact() {
        let samples: Vec<Angle> = (1..40u64).map(|k| Angle::new(k * k % 41, 41)).collect();
        for h in 1..6 {
            assert_eq!(weyl_sum(&samples, -h).unwrap(), weyl_sum(&samples, h).unwrap().conj());
        }
        assert_eq!(weyl_sum(&samples, 0).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut s = CompensatedSum::new();
        s.add(Complex64::new(1e16, 0.0));
        for _ in 0..1000 {
            s.add(Complex64::new(1.0, 0.0));
        }
        s.add(Complex64::new(-1e16, 0.0));
        assert_eq!(s.value().re, 1000.0);
    }

    #[test]
    fn histogram_bins() {
        let a = [Angle::new(0, 1), Angle::new(1, 4), Angle::new(1, 2), Angle::new(99, 100)];
        assert_eq!(histogram(&a, 4), vec![1, 1, 1, 1]);
        assert_eq!(histogram(&a, 2), vec![2, 2]);
    }
}

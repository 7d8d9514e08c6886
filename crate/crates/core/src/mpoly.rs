//! Multivariate polynomials with rational coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::field::FieldOps;

/// Exponent vector, ordered graded-lexicographically (total degree first,
/// then lexicographic on exponents).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree().cmp(&other.total_degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

pub fn reduce_rational(c: &BigRational, p: u64) -> Result<u64> {
    let pb = BigInt::from(p);
    let den = (c.denom() % &pb + &pb) % &pb;
    let num = (c.numer() % &pb + &pb) % &pb;
    let den = den.to_u64().unwrap();
    let inv = arith::inv_mod(den, p).ok_or(Error::BadPrime(p))?;
    Ok(arith::mul_mod(num.to_u64().unwrap(), inv, p))
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut m = MPoly::zero(nvars);
        m.add_term(vec![0; nvars], c);
        m
    }

    /// The variable `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut m = MPoly::zero(nvars);
        m.add_term(e, BigRational::one());
        m
    }

    /// Univariate polynomial from little-endian integer coefficients.
    pub fn univariate(coeffs: &[i64]) -> Self {
        let mut m = MPoly::zero(1);
        for (i, &c) in coeffs.iter().enumerate() {
            m.add_term(vec![i as u32], BigRational::from_integer(c.into()));
        }
        m
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, BigRational)>) -> Self {
        let mut m = MPoly::zero(nvars);
        for (e, c) in terms {
            m.add_term(e, c);
        }
        m
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: BigRational) {
        assert_eq!(exps.len(), self.nvars, "exponent vector length");
        if c.is_zero() {
            return;
        }
        let key = Monomial(exps);
        let sum = self.terms.get(&key).cloned().unwrap_or_else(BigRational::zero) + c;
        if sum.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, sum);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.0.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> MPoly {
        MPoly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = MPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let e = ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> MPoly {
        let mut acc = MPoly::constant(self.nvars, BigRational::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Re-embeds into `nvars` variables, sending variable `i` to `map[i]`.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> MPoly {
        let mut out = MPoly::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0; nvars];
            for (i, &k) in m.0.iter().enumerate() {
                e[map[i]] += k;
            }
            out.add_term(e, c.clone());
        }
        out
    }

    /// Little-endian coefficients of a univariate polynomial.
    pub fn univariate_coeffs(&self) -> Result<Vec<BigRational>> {
        if self.nvars != 1 {
            return Err(Error::InvalidArgument(format!("expected a univariate polynomial, got {} variables", self.nvars)));
        }
        let deg = self.degree_in(0) as usize;
        let mut out = vec![BigRational::zero(); if self.is_zero() { 0 } else { deg + 1 }];
        for (m, c) in &self.terms {
            out[m.0[0] as usize] = c.clone();
        }
        Ok(out)
    }

    /// Integer coefficients of a univariate polynomial; fails on fractions.
    pub fn univariate_int_coeffs(&self) -> Result<Vec<BigInt>> {
        self.univariate_coeffs()?
            .into_iter()
            .map(|c| {
                if c.is_integer() {
                    Ok(c.to_integer())
                } else {
                    Err(Error::InvalidArgument("expected integer coefficients".into()))
                }
            })
            .collect()
    }

    /// Least common multiple of coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        use num::Integer;
        self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    pub fn max_abs_coeff(&self) -> BigRational {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(BigRational::zero)
    }

    /// Reduction modulo `p`; fails with `BadPrime` if `p` divides a denominator.
    pub fn reduce(&self, p: u64) -> Result<ReducedPoly> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let r = reduce_rational(c, p)?;
            if r != 0 {
                terms.push((r, m.0.clone()));
            }
        }
        Ok(ReducedPoly { p, nvars: self.nvars, terms })
    }
}

/// A polynomial reduced modulo `p`, ready for evaluation over any field of
/// characteristic `p`.
#[derive(Debug, Clone)]
pub struct ReducedPoly {
    p: u64,
    nvars: usize,
    terms: Vec<(u64, Vec<u32>)>,
}

impl ReducedPoly {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(u64, Vec<u32>)] {
        &self.terms
    }

    /// Degree in the last variable after reduction.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|(_, e)| e[var]).max().unwrap_or(0)
    }

    pub fn eval<F: FieldOps>(&self, field: &F, point: &[F::Elem]) -> F::Elem {
        let mut acc = field.zero();
        for (c, e) in &self.terms {
            let mut t = field.from_residue(*c);
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t = field.mul(&t, &field.pow(x, k as u128));
                }
            }
            acc = field.add(&acc, &t);
        }
        acc
    }

    pub fn eval_prime(&self, point: &[u64]) -> u64 {
        let p = self.p;
        let mut acc = 0;
        for (c, e) in &self.terms {
            let mut t = *c;
            for (&x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t = arith::mul_mod(t, arith::pow_mod(x, k as u64, p), p);
                }
            }
            acc = arith::add_mod(acc, t, p);
        }
        acc
    }

    /// Substitutes the first `n - 1` coordinates and returns the univariate
    /// polynomial in the last variable (little-endian, trimmed).
    pub fn specialize_last<F: FieldOps>(&self, field: &F, prefix: &[F::Elem]) -> Vec<F::Elem> {
        let last = self.nvars - 1;
        let deg = self.degree_in(last) as usize;
        let mut out = vec![field.zero(); deg + 1];
        for (c, e) in &self.terms {
            let mut t = field.from_residue(*c);
            for (x, &k) in prefix.iter().zip(&e[..last]) {
                if k > 0 {
                    t = field.mul(&t, &field.pow(x, k as u128));
                }
            }
            let slot = e[last] as usize;
            out[slot] = field.add(&out[slot], &t);
        }
        crate::upoly::trim(field, &mut out);
        out
    }

    pub fn specialize_last_prime(&self, prefix: &[u64]) -> Vec<u64> {
        let p = self.p;
        let last = self.nvars - 1;
        let deg = self.degree_in(last) as usize;
        let mut out = vec![0u64; deg + 1];
        for (c, e) in &self.terms {
            let mut t = *c;
            for (&x, &k) in prefix.iter().zip(&e[..last]) {
                if k > 0 {
                    t = arith::mul_mod(t, arith::pow_mod(x, k as u64, p), p);
                }
            }
            let slot = e[last] as usize;
            out[slot] = arith::add_mod(out[slot], t, p);
        }
        while out.last() == Some(&0) {
            out.pop();
        }
        out
    }
}

/// A system of polynomial equations in a fixed ambient space `A^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct System {
    nvars: usize,
    polys: Vec<MPoly>,
}

impl System {
    pub fn new(nvars: usize, polys: Vec<MPoly>) -> Result<Self> {
        if nvars == 0 {
            return Err(Error::InvalidArgument("a system needs at least one variable".into()));
        }
        if let Some(bad) = polys.iter().find(|f| f.nvars() != nvars) {
            return Err(Error::InvalidArgument(format!(
                "polynomial has {} variables, system has {nvars}",
                bad.nvars()
            )));
        }
        Ok(System { nvars, polys })
    }

    /// All of `A^n`.
    pub fn affine_space(nvars: usize) -> Self {
        System { nvars, polys: Vec::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn polys(&self) -> &[MPoly] {
        &self.polys
    }

    pub fn total_degree(&self) -> u64 {
        self.polys.iter().map(MPoly::total_degree).max().unwrap_or(0)
    }

    pub fn reduce(&self, p: u64) -> Result<Vec<ReducedPoly>> {
        self.polys.iter().map(|f| f.reduce(p)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn graded_lex_order() {
        let a = Monomial(vec![2, 0]);
        let b = Monomial(vec![0, 3]);
        let c = Monomial(vec![1, 1]);
        assert!(a < b);
        assert!(c < a);
    }

    #[test]
    fn cancellation_removes_terms() {
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let f = x.add(&y).sub(&x);
        assert_eq!(f, y);
        assert_eq!(x.sub(&x).num_terms(), 0);
    }

    #[test]
    fn reduction_handles_denominators() {
        let f = MPoly::constant(1, q(1, 2));
        assert_eq!(f.reduce(5).unwrap().eval_prime(&[0]), 3);
        assert_eq!(MPoly::constant(1, q(1, 5)).reduce(5).unwrap_err(), Error::BadPrime(5));
        assert_eq!(MPoly::constant(1, q(-3, 1)).reduce(7).unwrap().eval_prime(&[0]), 4);
    }

    #[test]
    fn specialization_matches_evaluation() {
        // y^2 - x^3 - x
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let f = y.pow(2).sub(&x.pow(3)).sub(&x);
        let r = f.reduce(11).unwrap();
        for a in 0..11 {
            let u = r.specialize_last_prime(&[a]);
            for b in 0..11 {
                let via_u = u.iter().rev().fold(0, |acc, &c| arith::add_mod(arith::mul_mod(acc, b, 11), c, 11));
                assert_eq!(via_u, r.eval_prime(&[a, b]));
            }
        }
    }
}

//! Prime fields `F_p` and extension fields `F_{p^e} = F_p[t]/(m(t))`.

use std::fmt;
use std::hash::Hash;

use rand::Rng;
use serde::Serialize;

use crate::arith::{self, PrimeDesc};
use crate::error::{Error, Result};
use crate::upoly;

/// Arithmetic of a finite field, shared by the prime and extension cases so
/// polynomial code and root finding are written once.
pub trait FieldOps: Sync {
    type Elem: Clone + Eq + Ord + Hash + fmt::Debug + Send + Sync;

    fn characteristic(&self) -> u64;
    /// Extension degree over the prime field.
    fn degree(&self) -> usize;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    /// Image of a prime-field residue.
    fn from_residue(&self, a: u64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// The `index`-th element in canonical (coefficient-lexicographic) order.
    fn element_at(&self, index: u128) -> Self::Elem;
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    /// Field order `q = p^e`, or `None` if it does not fit in a `u128`.
    fn order(&self) -> Option<u128> {
        (self.characteristic() as u128).checked_pow(self.degree() as u32)
    }

    fn pow(&self, a: &Self::Elem, mut exp: u128) -> Self::Elem {
        let mut acc = self.one();
        let mut base = a.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        acc
    }

    /// Iterates every element in canonical order.
    fn elements(&self) -> Box<dyn Iterator<Item = Self::Elem> + '_> {
        let q = self.order().expect("field too large to enumerate");
        Box::new((0..q).map(move |i| self.element_at(i)))
    }
}

/// The prime field `F_p` with residues `0..p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        Ok(PrimeField { p: PrimeDesc::new(p)?.get() })
    }

    /// Skips the primality check; callers must already hold a prime.
    pub(crate) fn new_unchecked(p: u64) -> Self {
        PrimeField { p }
    }

    pub fn p(&self) -> u64 {
        self.p
    }
}

impl FieldOps for PrimeField {
    type Elem = u64;

    fn characteristic(&self) -> u64 {
        self.p
    }
    fn degree(&self) -> usize {
        1
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn from_residue(&self, a: u64) -> u64 {
        a % self.p
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        arith::add_mod(*a, *b, self.p)
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        arith::sub_mod(*a, *b, self.p)
    }
    fn neg(&self, a: &u64) -> u64 {
        arith::neg_mod(*a, self.p)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        arith::mul_mod(*a, *b, self.p)
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        arith::inv_mod(*a, self.p)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn element_at(&self, index: u128) -> u64 {
        index as u64
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.p)
    }
}

/// Element of `F_{p^e}`: `e` residues, little-endian in the power basis of
/// the modulus root `t`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FqElem {
    coeffs: Vec<u64>,
}

impl FqElem {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.len() == 1 {
            return write!(f, "{}", self.coeffs[0]);
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "t")?,
                (1, c) => write!(f, "{c}*t")?,
                (i, 1) => write!(f, "t^{i}")?,
                (i, c) => write!(f, "{c}*t^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `F_{p^e}` described by a monic irreducible modulus of degree `e`.
/// For `e = 1` the modulus is `t` and elements are plain residues.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtFieldDesc {
    p: u64,
    e: usize,
    /// Little-endian, monic, length `e + 1`.
    modulus: Vec<u64>,
}

impl ExtFieldDesc {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> usize {
        self.e
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn prime_field(&self) -> PrimeField {
        PrimeField::new_unchecked(self.p)
    }

    /// Validates a user-supplied modulus (monic, degree `e`, irreducible).
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self> {
        let fp = PrimeField::new(p)?;
        let mut m: Vec<u64> = modulus.into_iter().map(|c| c % p).collect();
        upoly::trim(&fp, &mut m);
        if m.len() < 2 || *m.last().unwrap() != 1 {
            return Err(Error::InvalidArgument("modulus must be monic of degree >= 1".into()));
        }
        let e = m.len() - 1;
        if e > 1 && !is_irreducible(&fp, &m) {
            return Err(Error::InvalidArgument("modulus is not irreducible".into()));
        }
        if e == 1 && m != [0, 1] {
            return Err(Error::InvalidArgument("degree-1 modulus must be t".into()));
        }
        Ok(ExtFieldDesc { p, e, modulus: m })
    }

    pub fn elem(&self, coeffs: Vec<u64>) -> Result<FqElem> {
        if coeffs.len() != self.e {
            return Err(Error::InvalidArgument(format!(
                "element needs {} coefficients, got {}",
                self.e,
                coeffs.len()
            )));
        }
        if let Some(&c) = coeffs.iter().find(|&&c| c >= self.p) {
            return Err(Error::OutOfRange { value: c, modulus: self.p });
        }
        Ok(FqElem { coeffs })
    }

    /// The class of `t`; equals 0 when `e = 1`.
    pub fn generator(&self) -> FqElem {
        let mut c = vec![0; self.e];
        if self.e > 1 {
            c[1] = 1;
        }
        FqElem { coeffs: c }
    }

    /// Embeds a polynomial in `t` (little-endian residues), reducing by the modulus.
    pub fn from_poly(&self, poly: &[u64]) -> FqElem {
        let fp = self.prime_field();
        let mut v: Vec<u64> = poly.iter().map(|&c| c % self.p).collect();
        upoly::trim(&fp, &mut v);
        let r = if v.len() > self.e { upoly::rem(&fp, &v, &self.modulus) } else { v };
        let mut coeffs = r;
        coeffs.resize(self.e, 0);
        FqElem { coeffs }
    }

    pub fn frobenius(&self, x: &FqElem) -> FqElem {
        self.pow(x, self.p as u128)
    }

    pub fn is_valid(&self, x: &FqElem) -> bool {
        x.coeffs.len() == self.e && x.coeffs.iter().all(|&c| c < self.p)
    }

    /// Residue of a prime-subfield element, if `x` lies in it.
    pub fn as_residue(&self, x: &FqElem) -> Option<u64> {
        if x.coeffs[1..].iter().all(|&c| c == 0) {
            Some(x.coeffs[0])
        } else {
            None
        }
    }
}

impl FieldOps for ExtFieldDesc {
    type Elem = FqElem;

    fn characteristic(&self) -> u64 {
        self.p
    }
    fn degree(&self) -> usize {
        self.e
    }
    fn zero(&self) -> FqElem {
        FqElem { coeffs: vec![0; self.e] }
    }
    fn one(&self) -> FqElem {
        let mut c = vec![0; self.e];
        c[0] = 1 % self.p;
        FqElem { coeffs: c }
    }
    fn from_residue(&self, a: u64) -> FqElem {
        let mut c = vec![0; self.e];
        c[0] = a % self.p;
        FqElem { coeffs: c }
    }
    fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let p = self.p;
        FqElem {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| arith::add_mod(x, y, p)).collect(),
        }
    }
    fn sub(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let p = self.p;
        FqElem {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| arith::sub_mod(x, y, p)).collect(),
        }
    }
    fn neg(&self, a: &FqElem) -> FqElem {
        let p = self.p;
        FqElem { coeffs: a.coeffs.iter().map(|&x| arith::neg_mod(x, p)).collect() }
    }
    fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        if self.e == 1 {
            return FqElem { coeffs: vec![arith::mul_mod(a.coeffs[0], b.coeffs[0], self.p)] };
        }
        let p = self.p as u128;
        let e = self.e;
        let mut prod = vec![0u128; 2 * e - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u128 * y as u128) % p;
            }
        }
        // reduce using t^e = -(m_0 + ... + m_{e-1} t^{e-1})
        for k in (e..2 * e - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..e {
                let m = self.modulus[i] as u128;
                if m != 0 {
                    prod[k - e + i] = (prod[k - e + i] + (p - c) * m) % p;
                }
            }
        }
        FqElem { coeffs: prod[..e].iter().map(|&c| c as u64).collect() }
    }
    fn inv(&self, a: &FqElem) -> Option<FqElem> {
        if self.is_zero(a) {
            return None;
        }
        if self.e == 1 {
            return arith::inv_mod(a.coeffs[0], self.p).map(|c| FqElem { coeffs: vec![c] });
        }
        // a^(q-2)
        let q = self.order()?;
        Some(self.pow(a, q - 2))
    }
    fn is_zero(&self, a: &FqElem) -> bool {
        a.coeffs.iter().all(|&c| c == 0)
    }
    fn element_at(&self, mut index: u128) -> FqElem {
        let mut coeffs = vec![0; self.e];
        for slot in coeffs.iter_mut().rev() {
            *slot = (index % self.p as u128) as u64;
            index /= self.p as u128;
        }
        FqElem { coeffs }
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FqElem {
        FqElem { coeffs: (0..self.e).map(|_| rng.gen_range(0..self.p)).collect() }
    }
}

/// Irreducibility over `F_p` of a monic polynomial of degree `d`: no factor
/// of `x^{p^i} - x` for `1 <= i <= d/2`.
pub fn is_irreducible(fp: &PrimeField, f: &[u64]) -> bool {
    let d = f.len() - 1;
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    let x = vec![0, 1];
    let mut xp = x.clone();
    for _ in 1..=d / 2 {
        xp = upoly::pow_mod(fp, &xp, fp.p() as u128, f);
        let diff = upoly::sub(fp, &xp, &x);
        let g = upoly::gcd(fp, f, &diff);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// `F_{p^e}` with the smallest monic irreducible modulus of degree `e`,
/// comparing coefficient sequences from `t^{e-1}` down to `t^0`.
pub fn build_extension(p: u64, e: usize) -> Result<ExtFieldDesc> {
    let fp = PrimeField::new(p)?;
    if e == 0 {
        return Err(Error::InvalidArgument("extension degree must be >= 1".into()));
    }
    if e == 1 {
        return Ok(ExtFieldDesc { p, e, modulus: vec![0, 1] });
    }
    let total = (p as u128)
        .checked_pow(e as u32)
        .ok_or_else(|| Error::InvalidArgument("extension too large".into()))?;
    for index in 0..total {
        // digit j (least significant first) is the coefficient of t^j
        let mut m = Vec::with_capacity(e + 1);
        let mut rest = index;
        for _ in 0..e {
            m.push((rest % p as u128) as u64);
            rest /= p as u128;
        }
        m.push(1);
        if m[0] == 0 {
            continue;
        }
        if is_irreducible(&fp, &m) {
            return Ok(ExtFieldDesc { p, e, modulus: m });
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Absolute trace `Σ_{i<e} x^{p^i}`, returned as a prime-field residue.
pub fn fq_trace(x: &FqElem, desc: &ExtFieldDesc) -> u64 {
    let mut acc = x.clone();
    let mut cur = x.clone();
    for _ in 1..desc.e {
        cur = desc.frobenius(&cur);
        acc = desc.add(&acc, &cur);
    }
    debug_assert!(desc.as_residue(&acc).is_some(), "trace left the prime subfield");
    acc.coeffs[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn roots_by_scan(p: u64, f: &[u64]) -> usize {
        (0..p)
            .filter(|&x| f.iter().rev().fold(0, |acc, &c| arith::add_mod(arith::mul_mod(acc, x, p), c, p)) == 0)
            .count()
    }

    #[test]
    fn f4_modulus_is_unique_irreducible_quadratic() {
        // t^2, t^2+1, t^2+t are reducible over F_2; only t^2+t+1 survives
        let irreducible: Vec<Vec<u64>> = (0..4u64)
            .map(|i| vec![i & 1, i >> 1, 1])
            .filter(|m| roots_by_scan(2, m) == 0)
            .collect();
        assert_eq!(irreducible, vec![vec![1, 1, 1]]);
        assert_eq!(build_extension(2, 2).unwrap().modulus(), &[1, 1, 1]);
    }

    #[test]
    fn small_extension_moduli() {
        let f5 = build_extension(5, 1).unwrap();
        assert_eq!(f5.modulus(), &[0, 1]);
        let f25 = build_extension(5, 2).unwrap();
        assert_eq!(roots_by_scan(5, f25.modulus()), 0);
        assert_eq!(f25.modulus(), &[2, 0, 1]);
        assert_eq!(build_extension(3, 2).unwrap().modulus(), &[1, 0, 1]);
        assert!(matches!(build_extension(4, 2), Err(Error::NotPrime(4))));
    }

    #[test]
    fn trace_examples() {
        let f4 = build_extension(2, 2).unwrap();
        assert_eq!(fq_trace(&f4.generator(), &f4), 1);
        assert_eq!(fq_trace(&f4.zero(), &f4), 0);
        let f343 = build_extension(7, 3).unwrap();
        for a in 0..7 {
            assert_eq!(fq_trace(&f343.from_residue(a), &f343), (3 * a) % 7);
        }
    }

    #[test]
    fn field_laws_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(p, e) in &[(2u64, 3usize), (3, 2), (5, 3), (97, 2), (97, 3), (89, 1)] {
            let f = build_extension(p, e).unwrap();
            for _ in 0..1000 / 6 + 1 {
                let (a, b, c) = (f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
                assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
                assert_eq!(f.add(&f.add(&a, &b), &c), f.add(&a, &f.add(&b, &c)));
                assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
                if !f.is_zero(&a) {
                    assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), f.one());
                }
                assert!(f.is_zero(&f.add(&a, &f.neg(&a))));
            }
        }
    }

    #[test]
    fn frobenius_fixes_exactly_prime_subfield() {
        for &(p, e) in &[(2u64, 2usize), (2, 3), (3, 2), (3, 3), (5, 2), (7, 2), (7, 3)] {
            let f = build_extension(p, e).unwrap();
            let elems: Vec<_> = f.elements().collect();
            for x in &elems {
                for y in elems.iter().step_by(3) {
                    assert_eq!(f.frobenius(&f.add(x, y)), f.add(&f.frobenius(x), &f.frobenius(y)));
                }
                let fixed = f.frobenius(x) == *x;
                assert_eq!(fixed, f.as_residue(x).is_some());
            }
        }
    }

    #[test]
    fn trace_additive_and_surjective() {
        for &(p, e) in &[(2u64, 2usize), (2, 4), (3, 3), (5, 2), (7, 3)] {
            let f = build_extension(p, e).unwrap();
            let elems: Vec<_> = f.elements().collect();
            let mut hit = vec![false; p as usize];
            for x in &elems {
                let tx = fq_trace(x, &f);
                hit[tx as usize] = true;
                for y in elems.iter().step_by(5) {
                    let lhs = fq_trace(&f.add(x, y), &f);
                    assert_eq!(lhs, arith::add_mod(tx, fq_trace(y, &f), p));
                }
            }
            assert!(hit.iter().all(|&h| h));
        }
    }

    #[test]
    fn canonical_order_is_lexicographic() {
        let f = build_extension(3, 2).unwrap();
        let elems: Vec<_> = f.elements().collect();
        let mut sorted = elems.clone();
        sorted.sort();
        assert_eq!(elems, sorted);
        assert_eq!(elems.len(), 9);
    }
}

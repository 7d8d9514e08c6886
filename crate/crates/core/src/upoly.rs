//! Dense univariate polynomials over a [`FieldOps`] field, stored
//! little-endian with no trailing zeros (the zero polynomial is empty).
//!
//! Root finding scans the field when it is small and otherwise extracts the
//! split part with `gcd(f, x^q - x)` and separates it by equal-degree
//! splitting. The splitting randomness is seeded from the polynomial itself,
//! so the result never depends on call order or thread count.

use std::hash::{Hash, Hasher};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith;
use crate::error::{Error, Result};
use crate::field::{ExtFieldDesc, FieldOps, FqElem, PrimeField};

/// Fields up to this size are searched exhaustively.
pub const SCAN_LIMIT: u128 = 1 << 10;

pub fn trim<F: FieldOps>(field: &F, v: &mut Vec<F::Elem>) {
    while v.last().is_some_and(|c| field.is_zero(c)) {
        v.pop();
    }
}

pub fn degree<E>(v: &[E]) -> Option<usize> {
    v.len().checked_sub(1)
}

pub fn add<F: FieldOps>(field: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let n = a.len().max(b.len());
    let zero = field.zero();
    let mut out: Vec<F::Elem> =
        (0..n).map(|i| field.add(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero))).collect();
    trim(field, &mut out);
    out
}

pub fn sub<F: FieldOps>(field: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let n = a.len().max(b.len());
    let zero = field.zero();
    let mut out: Vec<F::Elem> =
        (0..n).map(|i| field.sub(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero))).collect();
    trim(field, &mut out);
    out
}

pub fn scale<F: FieldOps>(field: &F, a: &[F::Elem], c: &F::Elem) -> Vec<F::Elem> {
    let mut out: Vec<F::Elem> = a.iter().map(|x| field.mul(x, c)).collect();
    trim(field, &mut out);
    out
}

pub fn mul<F: FieldOps>(field: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![field.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if field.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = field.add(&out[i + j], &field.mul(x, y));
        }
    }
    trim(field, &mut out);
    out
}

/// Quotient and remainder. Panics if `b` is zero.
pub fn divrem<F: FieldOps>(field: &F, a: &[F::Elem], b: &[F::Elem]) -> (Vec<F::Elem>, Vec<F::Elem>) {
    assert!(!b.is_empty(), "division by the zero polynomial");
    if a.len() < b.len() {
        return (Vec::new(), a.to_vec());
    }
    let lead_inv = field.inv(b.last().unwrap()).expect("nonzero leading coefficient");
    let mut r = a.to_vec();
    let mut q = vec![field.zero(); a.len() - b.len() + 1];
    let db = b.len() - 1;
    for k in (0..q.len()).rev() {
        let c = field.mul(&r[k + db], &lead_inv);
        if field.is_zero(&c) {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[k + j] = field.sub(&r[k + j], &field.mul(&c, bj));
        }
        q[k] = c;
    }
    trim(field, &mut q);
    r.truncate(db);
    trim(field, &mut r);
    (q, r)
}

pub fn rem<F: FieldOps>(field: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    divrem(field, a, b).1
}

pub fn monic<F: FieldOps>(field: &F, a: &[F::Elem]) -> Vec<F::Elem> {
    match a.last() {
        None => Vec::new(),
        Some(lc) => scale(field, a, &field.inv(lc).expect("nonzero leading coefficient")),
    }
}

/// Monic gcd; `gcd(0, 0) = 0`.
pub fn gcd<F: FieldOps>(field: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(field, &mut x);
    trim(field, &mut y);
    while !y.is_empty() {
        let r = rem(field, &x, &y);
        x = y;
        y = r;
    }
    monic(field, &x)
}

pub fn mul_mod<F: FieldOps>(field: &F, a: &[F::Elem], b: &[F::Elem], m: &[F::Elem]) -> Vec<F::Elem> {
    rem(field, &mul(field, a, b), m)
}

pub fn pow_mod<F: FieldOps>(field: &F, base: &[F::Elem], mut exp: u128, m: &[F::Elem]) -> Vec<F::Elem> {
    let mut acc = rem(field, &[field.one()], m);
    let mut b = rem(field, base, m);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(field, &acc, &b, m);
        }
        exp >>= 1;
        if exp > 0 {
            b = mul_mod(field, &b, &b, m);
        }
    }
    acc
}

pub fn eval<F: FieldOps>(field: &F, f: &[F::Elem], x: &F::Elem) -> F::Elem {
    f.iter().rev().fold(field.zero(), |acc, c| field.add(&field.mul(&acc, x), c))
}

/// `x^q mod f` computed as `e` successive `p`-th powers.
fn x_to_q_mod<F: FieldOps>(field: &F, f: &[F::Elem]) -> Vec<F::Elem> {
    let mut xq = rem(field, &[field.zero(), field.one()], f);
    for _ in 0..field.degree() {
        xq = pow_mod(field, &xq, field.characteristic() as u128, f);
    }
    xq
}

/// FNV-1a, used only to derive reproducible splitting seeds.
struct Fnv(u64);

impl Hasher for Fnv {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x100000001b3);
        }
    }
}

fn splitting_seed<F: FieldOps>(field: &F, f: &[F::Elem], seed: u64) -> u64 {
    let mut h = Fnv(0xcbf29ce484222325);
    seed.hash(&mut h);
    field.characteristic().hash(&mut h);
    f.hash(&mut h);
    h.finish()
}

/// Splits a monic squarefree product of distinct linear factors.
fn equal_degree_split<F: FieldOps>(field: &F, g: &[F::Elem], rng: &mut ChaCha8Rng, out: &mut Vec<F::Elem>) {
    match g.len() {
        0 | 1 => return,
        2 => {
            out.push(field.neg(&g[0]));
            return;
        }
        _ => {}
    }
    let q = field.order().expect("field order fits u128");
    let p = field.characteristic();
    loop {
        let delta = field.random(rng);
        let candidate = if p == 2 {
            // absolute trace of delta*x, computed modulo g
            let mut t = rem(field, &[field.zero(), delta], g);
            let mut acc = t.clone();
            for _ in 1..field.degree() {
                t = mul_mod(field, &t, &t, g);
                acc = add(field, &acc, &t);
            }
            acc
        } else {
            let h = pow_mod(field, &[delta, field.one()], (q - 1) / 2, g);
            sub(field, &h, &[field.one()])
        };
        let d = gcd(field, g, &candidate);
        if d.len() > 1 && d.len() < g.len() {
            let (other, _) = divrem(field, g, &d);
            equal_degree_split(field, &d, rng, out);
            equal_degree_split(field, &other, rng, out);
            return;
        }
    }
}

/// Distinct roots in the field, sorted canonically.
pub fn distinct_roots<F: FieldOps>(field: &F, f: &[F::Elem], seed: u64) -> Result<Vec<F::Elem>> {
    let mut f = f.to_vec();
    trim(field, &mut f);
    if f.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    let f = monic(field, &f);
    let mut roots = match f.len() {
        1 => Vec::new(),
        2 => vec![field.neg(&f[0])],
        _ => match field.order() {
            Some(q) if q <= SCAN_LIMIT => field.elements().filter(|x| field.is_zero(&eval(field, &f, x))).collect(),
            _ => {
                let xq = x_to_q_mod(field, &f);
                let split = gcd(field, &f, &sub(field, &xq, &[field.zero(), field.one()]));
                let mut rng = ChaCha8Rng::seed_from_u64(splitting_seed(field, &f, seed));
                let mut out = Vec::new();
                equal_degree_split(field, &split, &mut rng, &mut out);
                out
            }
        },
    };
    roots.sort();
    Ok(roots)
}

/// Number of distinct roots, i.e. `deg gcd(f, x^q - x)`.
pub fn count_distinct_roots<F: FieldOps>(field: &F, f: &[F::Elem]) -> Result<usize> {
    let mut f = f.to_vec();
    trim(field, &mut f);
    if f.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    if f.len() <= 2 {
        return Ok(f.len() - 1);
    }
    let f = monic(field, &f);
    let xq = x_to_q_mod(field, &f);
    let g = gcd(field, &f, &sub(field, &xq, &[field.zero(), field.one()]));
    Ok(g.len() - 1)
}

/// Roots with multiplicity, sorted canonically.
pub fn roots<F: FieldOps>(field: &F, f: &[F::Elem], seed: u64) -> Result<Vec<F::Elem>> {
    let distinct = distinct_roots(field, f, seed)?;
    let mut rest = f.to_vec();
    trim(field, &mut rest);
    let mut out = Vec::new();
    for r in distinct {
        let lin = [field.neg(&r), field.one()];
        loop {
            let (q, rm) = divrem(field, &rest, &lin);
            if !rm.is_empty() {
                break;
            }
            out.push(r.clone());
            rest = q;
        }
    }
    Ok(out)
}

/// Distinct roots of a polynomial over `F_p` with closed forms for degree
/// at most two; used by the point enumerator's inner loop.
pub fn prime_distinct_roots(p: u64, f: &[u64]) -> Result<Vec<u64>> {
    let fp = PrimeField::new_unchecked(p);
    let mut f = f.to_vec();
    trim(&fp, &mut f);
    match f.len() {
        0 => Err(Error::ZeroPolynomial),
        1 => Ok(Vec::new()),
        2 => {
            let inv = arith::inv_mod(f[1], p).expect("prime modulus");
            Ok(vec![arith::mul_mod(arith::neg_mod(f[0], p), inv, p)])
        }
        3 if p != 2 => {
            let (c, b, a) = (f[0], f[1], f[2]);
            let disc = arith::sub_mod(arith::mul_mod(b, b, p), arith::mul_mod(4 % p, arith::mul_mod(a, c, p), p), p);
            let inv2a = arith::inv_mod(arith::mul_mod(2, a, p), p).expect("prime modulus");
            let minus_b = arith::neg_mod(b, p);
            match arith::sqrt_mod(disc, p) {
                None => Ok(Vec::new()),
                Some(0) => Ok(vec![arith::mul_mod(minus_b, inv2a, p)]),
                Some(s) => {
                    let mut r = vec![
                        arith::mul_mod(arith::add_mod(minus_b, s, p), inv2a, p),
                        arith::mul_mod(arith::sub_mod(minus_b, s, p), inv2a, p),
                    ];
                    r.sort();
                    Ok(r)
                }
            }
        }
        _ => distinct_roots(&fp, &f, 0),
    }
}

/// Number of distinct roots over `F_p`, without extracting them.
pub fn prime_count_distinct_roots(p: u64, f: &[u64]) -> Result<usize> {
    let fp = PrimeField::new_unchecked(p);
    let mut f = f.to_vec();
    trim(&fp, &mut f);
    match f.len() {
        0 => Err(Error::ZeroPolynomial),
        1 => Ok(0),
        2 => Ok(1),
        3 if p != 2 => {
            let (c, b, a) = (f[0], f[1], f[2]);
            let disc = arith::sub_mod(arith::mul_mod(b, b, p), arith::mul_mod(4 % p, arith::mul_mod(a, c, p), p), p);
            Ok(match arith::legendre(disc, p) {
                0 => 1,
                1 => 2,
                _ => 0,
            })
        }
        _ => count_distinct_roots(&fp, &f),
    }
}

/// Roots in `F_q` of `f` (coefficients little-endian in `F_q`), with
/// multiplicity, sorted by the canonical element order.
pub fn poly_roots_fq(f: &[FqElem], desc: &ExtFieldDesc) -> Result<Vec<FqElem>> {
    roots(desc, f, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_extension;

    fn brute_roots<F: FieldOps>(field: &F, f: &[F::Elem]) -> Vec<F::Elem> {
        // multiplicity via repeated derivative-free division by scanning
        let mut out = Vec::new();
        for x in field.elements() {
            let mut g = f.to_vec();
            loop {
                if g.is_empty() || !field.is_zero(&eval(field, &g, &x)) {
                    break;
                }
                out.push(x.clone());
                g = divrem(field, &g, &[field.neg(&x), field.one()]).0;
            }
        }
        out
    }

    #[test]
    fn roots_examples() {
        let f5 = build_extension(5, 1).unwrap();
        let r = |v: u64| f5.from_residue(v);
        // x^2 - 1 over F_5
        assert_eq!(poly_roots_fq(&[r(4), r(0), r(1)], &f5).unwrap(), vec![r(1), r(4)]);
        // x^2 + x + 1 over F_5
        assert!(poly_roots_fq(&[r(1), r(1), r(1)], &f5).unwrap().is_empty());
        // (x - 2)^2 over F_7
        let f7 = build_extension(7, 1).unwrap();
        let s = |v: u64| f7.from_residue(v);
        assert_eq!(poly_roots_fq(&[s(4), s(3), s(1)], &f7).unwrap(), vec![s(2), s(2)]);
        assert_eq!(poly_roots_fq(&[], &f7), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn roots_match_scan_for_all_small_cubics() {
        for &(p, e) in &[(2u64, 1usize), (3, 1), (5, 1), (7, 1), (2, 2), (3, 2), (2, 3), (5, 2), (7, 2)] {
            let field = build_extension(p, e).unwrap();
            let q = field.order().unwrap();
            let elems: Vec<_> = field.elements().collect();
            for deg in 1..=3usize {
                // all monic polynomials when small, a fixed stride otherwise
                let total = q.pow(deg as u32);
                let step = (total / 400).max(1);
                let mut idx = 0u128;
                while idx < total {
                    let mut f: Vec<FqElem> = Vec::with_capacity(deg + 1);
                    let mut rest = idx;
                    for _ in 0..deg {
                        f.push(elems[(rest % q) as usize].clone());
                        rest /= q;
                    }
                    f.push(field.one());
                    assert_eq!(poly_roots_fq(&f, &field).unwrap(), brute_roots(&field, &f));
                    idx += step;
                }
            }
        }
    }

    #[test]
    fn splitting_path_matches_scan_on_large_fields() {
        // q > SCAN_LIMIT exercises gcd(x^q - x) and equal-degree splitting
        for &(p, e) in &[(1031u64, 1usize), (2, 11), (37, 2), (11, 3)] {
            let field = build_extension(p, e).unwrap();
            assert!(field.order().unwrap() > SCAN_LIMIT);
            let mut rng = ChaCha8Rng::seed_from_u64(p);
            for _ in 0..20 {
                let a = field.random(&mut rng);
                let b = field.random(&mut rng);
                let c = field.random(&mut rng);
                // (x - a)^2 (x - b) (x^2 + c x + 1)
                let lin = |r: &FqElem| vec![field.neg(r), field.one()];
                let f = mul(&field, &mul(&field, &mul(&field, &lin(&a), &lin(&a)), &lin(&b)), &[field.one(), c, field.one()]);
                let got = poly_roots_fq(&f, &field).unwrap();
                for r in &got {
                    assert!(field.is_zero(&eval(&field, &f, r)));
                }
                let mut expect = vec![a.clone(), a.clone(), b.clone()];
                for r in &got {
                    if *r != a && *r != b {
                        expect.push(r.clone());
                    }
                }
                expect.sort();
                assert_eq!(got, expect);
            }
        }
    }

    #[test]
    fn prime_fast_paths_agree() {
        for &p in &[2u64, 3, 5, 13, 101, 2003] {
            let fp = PrimeField::new(p).unwrap();
            for a in 1..6u64 {
                for b in 0..7u64 {
                    for c in 0..7u64 {
                        let f = vec![c % p, b % p, a % p];
                        let mut g = f.clone();
                        trim(&fp, &mut g);
                        if g.is_empty() {
                            continue;
                        }
                        let slow = distinct_roots(&fp, &g, 0).unwrap();
                        assert_eq!(prime_distinct_roots(p, &g).unwrap(), slow);
                        assert_eq!(prime_count_distinct_roots(p, &g).unwrap(), slow.len());
                    }
                }
            }
        }
    }
}

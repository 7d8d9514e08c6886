//! Number fields `Q[X]/(f)`: irreducibility certificates, element
//! arithmetic in the power basis, reduction at primes, and lattice bases of
//! finitely generated additive subgroups.

use std::fmt;

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith;
use crate::character::Angle;
use crate::error::{Error, Result};
use crate::field::{self, PrimeField};
use crate::mpoly::{reduce_rational, MPoly};
use crate::upoly;

/// Why a defining polynomial is known to be irreducible over `Q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Linear,
    /// Degree at most 3 and no rational root.
    NoRationalRoot,
    /// Irreducible modulo this prime.
    IrreducibleModP { p: u64 },
    /// The factor degrees modulo these primes admit no common proper
    /// sub-sum, so no factorization over `Q` exists.
    DegreePatterns { primes: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumberFieldDesc {
    /// Monic, little-endian integer coefficients.
    f: Vec<BigInt>,
    disc: BigInt,
    certificate: Certificate,
}

impl NumberFieldDesc {
    pub fn poly(&self) -> &[BigInt] {
        &self.f
    }

    pub fn degree(&self) -> usize {
        self.f.len() - 1
    }

    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    /// `f mod p`, little-endian.
    pub fn poly_mod(&self, p: u64) -> Vec<u64> {
        self.f.iter().map(|c| bigint_mod(c, p)).collect()
    }
}

pub(crate) fn bigint_mod(c: &BigInt, p: u64) -> u64 {
    c.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits u64")
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Resultant of two integer polynomials via the Sylvester determinant.
pub fn resultant(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let (da, db) = (a.len() - 1, b.len() - 1);
    let n = da + db;
    if n == 0 {
        return BigInt::one();
    }
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for i in 0..db {
        for (j, c) in a.iter().rev().enumerate() {
            m[i][i + j] = c.clone();
        }
    }
    for i in 0..da {
        for (j, c) in b.iter().rev().enumerate() {
            m[db + i][i + j] = c.clone();
        }
    }
    bareiss_det(m)
}

/// Discriminant of a polynomial of degree `>= 1`.
pub fn discriminant(f: &[BigInt]) -> BigInt {
    let d = f.len() - 1;
    if d == 1 {
        return BigInt::one();
    }
    let df: Vec<BigInt> = f.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
    let r = resultant(f, &df) / &f[d];
    if (d * (d - 1) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

fn eval_int(f: &[BigInt], x: &BigInt) -> BigInt {
    f.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

fn to_rational(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

fn trim_q(v: &mut Vec<BigRational>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

/// `(quotient, remainder)` over `Q`.
fn divrem_q(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    trim_q(&mut r);
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    let lead = &b[db];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / lead;
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] = &r[shift + i] - &c * bc;
        }
        q[shift] = c;
        trim_q(&mut r);
    }
    (q, r)
}

fn gcd_q(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    trim_q(&mut x);
    trim_q(&mut y);
    while !y.is_empty() {
        let (_, r) = divrem_q(&x, &y);
        x = y;
        y = r;
    }
    let lead = x.last().cloned().unwrap_or_else(BigRational::one);
    x.iter().map(|c| c / &lead).collect()
}

/// `X^2 - 2` style rendering, highest degree first.
pub fn format_poly(coeffs: &[BigRational], var: &str) -> String {
    let mut out = String::new();
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        if mono.is_empty() {
            out.push_str(&a.to_string());
        } else if a.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{a}*{mono}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Divisors of `|n|` when small enough to enumerate.
fn small_divisors(n: &BigInt) -> Option<Vec<u64>> {
    let n = n.abs().to_u64()?;
    if n > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut k = 1u64;
    while k * k <= n {
        if n % k == 0 {
            out.push(k);
            if k * k != n {
                out.push(n / k);
            }
        }
        k += 1;
    }
    Some(out)
}

/// Degrees of the irreducible factors of a squarefree monic `f` over `F_p`.
fn factor_degrees_mod_p(fp: &PrimeField, f: &[u64]) -> Vec<usize> {
    let p = fp.p() as u128;
    let x = vec![0u64, 1];
    let mut g = f.to_vec();
    let mut h = upoly::rem(fp, &x, &g);
    let mut out = Vec::new();
    let mut i = 1;
    while g.len() - 1 >= 2 * i {
        h = upoly::pow_mod(fp, &h, p, &g);
        let d = upoly::gcd(fp, &g, &upoly::sub(fp, &h, &x));
        let dd = d.len() - 1;
        if dd > 0 {
            out.extend(std::iter::repeat(i).take(dd / i));
            g = upoly::divrem(fp, &g, &d).0;
            h = upoly::rem(fp, &h, &g);
        }
        i += 1;
    }
    if g.len() > 1 {
        out.push(g.len() - 1);
    }
    out
}

const CERT_PRIMES: usize = 25;

/// Validates a monic integer polynomial (little-endian) and certifies its
/// irreducibility over `Q`.
pub fn nf_build(f: &[BigInt]) -> Result<NumberFieldDesc> {
    let mut f = f.to_vec();
    while f.last().is_some_and(Zero::is_zero) {
        f.pop();
    }
    if f.len() < 2 {
        return Err(Error::InvalidArgument("defining polynomial must have degree >= 1".into()));
    }
    if !f.last().unwrap().is_one() {
        return Err(Error::InvalidArgument("defining polynomial must be monic; use nf_build_from_poly".into()));
    }
    let d = f.len() - 1;
    let disc = discriminant(&f);
    if d == 1 {
        return Ok(NumberFieldDesc { f, disc, certificate: Certificate::Linear });
    }
    let fq = to_rational(&f);
    if disc.is_zero() {
        let df: Vec<BigRational> = fq.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(i.into())).collect();
        return Err(Error::Reducible { factor: format_poly(&gcd_q(&fq, &df), "X") });
    }
    if f[0].is_zero() {
        return Err(Error::Reducible { factor: "X".into() });
    }
    let mut root_test_done = false;
    if let Some(divs) = small_divisors(&f[0]) {
        for r in divs {
            for cand in [BigInt::from(r), -BigInt::from(r)] {
                if eval_int(&f, &cand).is_zero() {
                    let factor = [-BigRational::from_integer(cand), BigRational::one()];
                    return Err(Error::Reducible { factor: format_poly(&factor, "X") });
                }
            }
        }
        root_test_done = true;
    }
    if root_test_done && d <= 3 {
        return Ok(NumberFieldDesc { f, disc, certificate: Certificate::NoRationalRoot });
    }
    // proper factor degrees still possible over Q
    let mut possible = vec![true; d + 1];
    possible[0] = false;
    possible[d] = false;
    let mut used = Vec::new();
    let mut p = 1u64;
    let mut tried = 0;
    while tried < CERT_PRIMES {
        p = arith::next_prime(p + 1);
        if (&disc % BigInt::from(p)).is_zero() {
            continue;
        }
        tried += 1;
        let fp = PrimeField::new(p)?;
        let fm: Vec<u64> = f.iter().map(|c| bigint_mod(c, p)).collect();
        if field::is_irreducible(&fp, &fm) {
            return Ok(NumberFieldDesc { f, disc, certificate: Certificate::IrreducibleModP { p } });
        }
        let degs = factor_degrees_mod_p(&fp, &fm);
        let mut sums = vec![false; d + 1];
        sums[0] = true;
        for &k in &degs {
            for s in (k..=d).rev() {
                if sums[s - k] {
                    sums[s] = true;
                }
            }
        }
        used.push(p);
        for (s, ok) in possible.iter_mut().enumerate() {
            *ok &= sums[s];
        }
        if !possible.iter().any(|&b| b) {
            return Ok(NumberFieldDesc { f, disc, certificate: Certificate::DegreePatterns { primes: used } });
        }
    }
    Err(Error::CertificateNotFound)
}

/// Accepts any nonconstant univariate rational polynomial `g`: clears
/// denominators and passes to the monic `a^{d-1} g(X/a)`, `a` the leading
/// coefficient. Returns the field and `a`; the root of `g` is `X/a`.
pub fn nf_build_from_poly(g: &MPoly) -> Result<(NumberFieldDesc, BigInt)> {
    let cs = g.univariate_coeffs()?;
    if cs.len() < 2 {
        return Err(Error::InvalidArgument("defining polynomial must have degree >= 1".into()));
    }
    let den = g.denominator_lcm();
    let ints: Vec<BigInt> = cs.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
    let d = ints.len() - 1;
    let mut a = ints[d].clone();
    let flip = a.is_negative();
    if flip {
        a = -a;
    }
    let monic: Vec<BigInt> = ints
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let c = if flip { -c } else { c.clone() };
            if i == d {
                BigInt::one()
            } else {
                c * num::pow(a.clone(), d - 1 - i)
            }
        })
        .collect();
    Ok((nf_build(&monic)?, a))
}

/// An element `Σ c_i a^i` of a number field, `i < d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NFElem {
    coeffs: Vec<BigRational>,
}

impl NFElem {
    pub fn new(nf: &NumberFieldDesc, mut coeffs: Vec<BigRational>) -> Result<Self> {
        if coeffs.len() > nf.degree() {
            return Err(Error::InvalidArgument(format!(
                "{} coordinates for a degree-{} field",
                coeffs.len(),
                nf.degree()
            )));
        }
        coeffs.resize(nf.degree(), BigRational::zero());
        Ok(NFElem { coeffs })
    }

    pub fn from_rational(nf: &NumberFieldDesc, c: BigRational) -> Self {
        let mut coeffs = vec![BigRational::zero(); nf.degree()];
        coeffs[0] = c;
        NFElem { coeffs }
    }

    /// The class of a univariate rational polynomial `g(a)`.
    pub fn from_poly(nf: &NumberFieldDesc, g: &MPoly) -> Result<Self> {
        let cs = g.univariate_coeffs()?;
        Ok(Self::reduce_coeffs(nf, &cs))
    }

    fn reduce_coeffs(nf: &NumberFieldDesc, cs: &[BigRational]) -> Self {
        let (_, mut r) = divrem_q(cs, &to_rational(&nf.f));
        r.resize(nf.degree(), BigRational::zero());
        NFElem { coeffs: r }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Lies in `Q`.
    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().skip(1).all(Zero::is_zero)
    }

    pub fn add(&self, other: &NFElem) -> NFElem {
        NFElem { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &NFElem) -> NFElem {
        NFElem { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self) -> NFElem {
        NFElem { coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, c: &BigRational) -> NFElem {
        NFElem { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn mul(&self, other: &NFElem, nf: &NumberFieldDesc) -> NFElem {
        let d = self.coeffs.len();
        let mut prod = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                prod[i + j] = &prod[i + j] + a * b;
            }
        }
        Self::reduce_coeffs(nf, &prod)
    }

    /// Least common multiple of the coordinate denominators.
    pub fn denominator(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Rendering as a polynomial in `var`.
    pub fn display(&self, var: &str) -> String {
        format_poly(&self.coeffs, var)
    }
}

impl fmt::Display for NFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display("a"))
    }
}

/// Image of `x` under `a ↦ b` in `F_p`, where `f(b) ≡ 0 (mod p)`.
pub fn nf_reduce(x: &NFElem, nf: &NumberFieldDesc, p: u64, b: u64) -> Result<u64> {
    PrimeField::new(p)?;
    let b = b % p;
    let fm = nf.poly_mod(p);
    let fb = fm.iter().rev().fold(0, |acc, &c| arith::add_mod(arith::mul_mod(acc, b, p), c, p));
    if fb != 0 {
        return Err(Error::InvalidArgument(format!("{b} is not a root of the defining polynomial modulo {p}")));
    }
    let mut acc = 0u64;
    for c in x.coeffs.iter().rev() {
        acc = arith::add_mod(arith::mul_mod(acc, b, p), reduce_rational(c, p)?, p);
    }
    Ok(acc)
}

/// A basis of the subgroup generated by some elements, with integer
/// coordinates of every input in that basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBasis {
    pub basis: Vec<NFElem>,
    /// Row `i` expresses input `i`: `input_i = Σ_j expression[i][j]·basis_j`.
    pub expression: Vec<Vec<BigInt>>,
}

/// Row Hermite normal form of `m`, columns taken in `order`; returns
/// `(H, U)` with `U` unimodular and `U·m = H`.
fn hnf_with_transform(m: &[Vec<BigInt>], order: &[usize]) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let k = m.len();
    let mut h = m.to_vec();
    let mut u: Vec<Vec<BigInt>> =
        (0..k).map(|i| (0..k).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    let combine = |rows: &mut Vec<Vec<BigInt>>, i: usize, j: usize, x: &BigInt, y: &BigInt, s: &BigInt, t: &BigInt| {
        // row_i <- x row_i + y row_j ; row_j <- s row_i + t row_j
        let (ri, rj) = (rows[i].clone(), rows[j].clone());
        rows[i] = ri.iter().zip(&rj).map(|(a, b)| x * a + y * b).collect();
        rows[j] = ri.iter().zip(&rj).map(|(a, b)| s * a + t * b).collect();
    };
    let mut row = 0;
    for &col in order {
        if row == k {
            break;
        }
        for j in row + 1..k {
            if h[j][col].is_zero() {
                continue;
            }
            let (a, b) = (h[row][col].clone(), h[j][col].clone());
            let e = a.extended_gcd(&b);
            let (x, y, g) = (e.x, e.y, e.gcd);
            let s = -(&b / &g);
            let t = &a / &g;
            combine(&mut h, row, j, &x, &y, &s, &t);
            combine(&mut u, row, j, &x, &y, &s, &t);
        }
        if h[row][col].is_zero() {
            continue;
        }
        if h[row][col].is_negative() {
            h[row] = h[row].iter().map(|v| -v).collect();
            u[row] = u[row].iter().map(|v| -v).collect();
        }
        let piv = h[row][col].clone();
        for r in 0..row {
            let q = h[r][col].div_floor(&piv);
            if !q.is_zero() {
                let (hr, ur) = (h[row].clone(), u[row].clone());
                h[r] = h[r].iter().zip(&hr).map(|(a, b)| a - &q * b).collect();
                u[r] = u[r].iter().zip(&ur).map(|(a, b)| a - &q * b).collect();
            }
        }
        row += 1;
    }
    (h, u)
}

fn int_rows(elems: &[NFElem]) -> (Vec<Vec<BigInt>>, BigInt) {
    let den = elems.iter().fold(BigInt::one(), |acc, e| acc.lcm(&e.denominator()));
    let scale = BigRational::from_integer(den.clone());
    let rows = elems.iter().map(|e| e.coeffs.iter().map(|c| (c * &scale).to_integer()).collect()).collect();
    (rows, den)
}

/// Exact rank over `Q`.
fn rank_q(rows: &[Vec<BigInt>]) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let order: Vec<usize> = (0..ncols).collect();
    let (h, _) = hnf_with_transform(rows, &order);
    h.iter().filter(|r| r.iter().any(|v| !v.is_zero())).count()
}

/// A basis of `Σ Z·elems`. Independent inputs are returned unchanged with
/// the identity expression; otherwise the basis is the Hermite normal form
/// of the scaled coordinate matrix, with the rational coordinate last so
/// that a generator of the rational part appears as a basis element.
pub fn lattice_basis(elems: &[NFElem]) -> Result<LatticeBasis> {
    let k = elems.len();
    if k == 0 {
        return Err(Error::EmptyInput);
    }
    let d = elems[0].coeffs.len();
    if elems.iter().any(|e| e.coeffs.len() != d) {
        return Err(Error::InvalidArgument("elements from different fields".into()));
    }
    let (rows, den) = int_rows(elems);
    if rank_q(&rows) == k {
        let expression =
            (0..k).map(|i| (0..k).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
        return Ok(LatticeBasis { basis: elems.to_vec(), expression });
    }
    let order: Vec<usize> = (0..d).rev().collect();
    let (h, _) = hnf_with_transform(&rows, &order);
    let scale = BigRational::from_integer(den);
    let basis_rows: Vec<Vec<BigInt>> = h.into_iter().filter(|r| r.iter().any(|v| !v.is_zero())).collect();
    let basis: Vec<NFElem> = basis_rows
        .iter()
        .map(|r| NFElem { coeffs: r.iter().map(|v| BigRational::from_integer(v.clone()) / &scale).collect() })
        .collect();
    // the basis is in echelon form: back-substitute along pivot columns
    let pivots: Vec<usize> =
        basis_rows.iter().map(|r| *order.iter().find(|&&c| !r[c].is_zero()).expect("nonzero row")).collect();
    let mut expression = Vec::with_capacity(k);
    for row in &rows {
        let mut rest = row.clone();
        let mut coords = vec![BigInt::zero(); basis_rows.len()];
        for (j, (b, &pc)) in basis_rows.iter().zip(&pivots).enumerate() {
            let (q, r) = rest[pc].div_rem(&b[pc]);
            debug_assert!(r.is_zero(), "input lies in the lattice");
            if !q.is_zero() {
                for (x, y) in rest.iter_mut().zip(b) {
                    *x -= &q * y;
                }
            }
            coords[j] = q;
        }
        debug_assert!(rest.iter().all(Zero::is_zero));
        expression.push(coords);
    }
    Ok(LatticeBasis { basis, expression })
}

/// Integer coordinates of each basis element in terms of the inputs, found
/// by exact solving; `None` if some basis element is not in `Σ Z·inputs`.
pub fn basis_in_terms_of_inputs(elems: &[NFElem], basis: &[NFElem]) -> Option<Vec<Vec<BigInt>>> {
    let (rows, _) = int_rows(&[elems, basis].concat());
    let (inputs, targets) = rows.split_at(elems.len());
    let d = rows.first().map_or(0, Vec::len);
    let order: Vec<usize> = (0..d).collect();
    let (h, u) = hnf_with_transform(inputs, &order);
    let nonzero: Vec<usize> = (0..h.len()).filter(|&i| h[i].iter().any(|v| !v.is_zero())).collect();
    let pivots: Vec<usize> = nonzero.iter().map(|&i| *order.iter().find(|&&c| !h[i][c].is_zero()).unwrap()).collect();
    let mut out = Vec::new();
    for t in targets {
        let mut rest = t.clone();
        let mut combo = vec![BigInt::zero(); elems.len()];
        for (&i, &pc) in nonzero.iter().zip(&pivots) {
            let (q, r) = rest[pc].div_rem(&h[i][pc]);
            if !r.is_zero() {
                return None;
            }
            for (x, y) in rest.iter_mut().zip(&h[i]) {
                *x -= &q * y;
            }
            for (c, y) in combo.iter_mut().zip(&u[i]) {
                *c += &q * y;
            }
        }
        if rest.iter().any(|v| !v.is_zero()) {
            return None;
        }
        out.push(combo);
    }
    Some(out)
}

/// Basis of `{λ ∈ Q^k : Σ λ_i e_i = 0}` as primitive integer vectors.
pub fn qlin_relations(elems: &[NFElem]) -> Vec<Vec<BigInt>> {
    let k = elems.len();
    if k == 0 {
        return Vec::new();
    }
    let d = elems[0].coeffs.len();
    // columns are the elements: solve M λ = 0 with M = (d × k)
    let mut m: Vec<Vec<BigRational>> = (0..d).map(|r| elems.iter().map(|e| e.coeffs[r].clone()).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..k {
        let Some(pr) = (row..d).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(row, pr);
        let inv = m[row][col].recip();
        m[row] = m[row].iter().map(|v| v * &inv).collect();
        for r in 0..d {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[row].clone();
                m[r] = m[r].iter().zip(&pivot_row).map(|(a, b)| a - &f * b).collect();
            }
        }
        pivots.push(col);
        row += 1;
        if row == d {
            break;
        }
    }
    let mut out = Vec::new();
    for free in (0..k).filter(|c| !pivots.contains(c)) {
        let mut v = vec![BigRational::zero(); k];
        v[free] = BigRational::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[r][free].clone();
        }
        out.push(primitive(&v));
    }
    out
}

fn primitive(v: &[BigRational]) -> Vec<BigInt> {
    let den = v.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = v.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let mut out: Vec<BigInt> = ints.iter().map(|c| c / &g).collect();
    if out.iter().rev().find(|c| !c.is_zero()).is_some_and(Signed::is_negative) {
        out = out.iter().map(|c| -c).collect();
    }
    out
}

/// Values of `ψ(r)` for a rational basis element `r = a/n` allowed by the
/// congruence axioms: for each class `k` of `p mod n`, `ψ(1/n) = e(j/n)` with
/// `j ≡ -k^{-1} (mod n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalAnnotation {
    pub basis_index: usize,
    #[serde(serialize_with = "serialize_display")]
    pub value: BigRational,
    pub denominator: u64,
    /// `(k, angle of ψ(r))` for every unit `k` modulo `n`.
    pub by_class: Vec<(u64, Angle)>,
    /// Distinct possible angles, sorted.
    pub values: Vec<Angle>,
}

fn serialize_display<T: fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// The set `{z^E : z ∈ T^l}` of possible character tuples, where `l` is
/// the basis size and `(z^E)_i = Π_j z_j^{E_ij}`; in congruence mode the
/// coordinates of rational basis elements are restricted as annotated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueSet {
    pub lattice: LatticeBasis,
    pub annotations: Vec<RationalAnnotation>,
    pub sp_mode: bool,
}

impl ValueSet {
    pub fn exponents(&self) -> &[Vec<BigInt>] {
        &self.lattice.expression
    }

    /// `(z^{E_1}, …)` rendered with `z1, z2, …` (or `z` for one generator).
    pub fn describe(&self) -> String {
        let l = self.lattice.basis.len();
        let name = |j: usize| if l == 1 { "z".to_string() } else { format!("z{}", j + 1) };
        let coords: Vec<String> = self
            .lattice
            .expression
            .iter()
            .map(|row| {
                let parts: Vec<String> = row
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| !e.is_zero())
                    .map(|(j, e)| if e.is_one() { name(j) } else { format!("{}^{}", name(j), e) })
                    .collect();
                if parts.is_empty() {
                    "1".into()
                } else {
                    parts.join("*")
                }
            })
            .collect();
        let ranges: Vec<String> = (0..l)
            .map(|j| match self.annotations.iter().find(|a| a.basis_index == j) {
                Some(a) => {
                    let vals: Vec<String> = a.values.iter().map(|v| format!("e(2πi·{v})")).collect();
                    format!("{} ∈ {{{}}}", name(j), vals.join(", "))
                }
                None => format!("{} ∈ T", name(j)),
            })
            .collect();
        if l == 0 {
            return format!("{{({})}}", coords.join(", "));
        }
        format!("{{({}) : {}}}", coords.join(", "), ranges.join(", "))
    }
}

/// Possible tuples `(ψ(e_1), …, ψ(e_k))`: the basis coordinates range
/// independently over the torus, except that in congruence mode a rational
/// basis element `a/n` takes only the values fixed by the class of `p`
/// modulo `n`.
pub fn value_set(elems: &[NFElem], sp_mode: bool) -> Result<ValueSet> {
    let lattice = lattice_basis(elems)?;
    let mut annotations = Vec::new();
    if sp_mode {
        for (idx, b) in lattice.basis.iter().enumerate() {
            if !b.is_rational() || b.is_zero() {
                continue;
            }
            let r = b.coeffs[0].clone();
            let n = r.denom().to_u64().ok_or_else(|| Error::InvalidArgument("denominator too large".into()))?;
            let a = r.numer().mod_floor(&BigInt::from(n)).to_u64().unwrap();
            let mut by_class = Vec::new();
            for k in (1..=n).filter(|&k| arith::gcd(k % n, n) == 1) {
                let k = k % n;
                let j = if n == 1 { 0 } else { arith::neg_mod(arith::inv_mod(k, n).unwrap(), n) };
                by_class.push((k, Angle::new(arith::mul_mod(a, j, n), n)));
            }
            by_class.sort();
            let mut values: Vec<Angle> = by_class.iter().map(|t| t.1).collect();
            values.sort();
            values.dedup();
            annotations.push(RationalAnnotation { basis_index: idx, value: r, denominator: n, by_class, values });
        }
    }
    Ok(ValueSet { lattice, annotations, sp_mode })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn elem(nf: &NumberFieldDesc, cs: &[(i64, i64)]) -> NFElem {
        NFElem::new(nf, cs.iter().map(|&(n, d)| q(n, d)).collect()).unwrap()
    }

    #[test]
    fn discriminants() {
        assert_eq!(discriminant(&ints(&[-2, 0, 1])), BigInt::from(8));
        assert_eq!(discriminant(&ints(&[-2, 0, 0, 1])), BigInt::from(-108));
        assert_eq!(discriminant(&ints(&[1, 0, 0, 0, 1])), BigInt::from(256));
        // x^3 + x + 1: -4 - 27
        assert_eq!(discriminant(&ints(&[1, 1, 0, 1])), BigInt::from(-31));
    }

    #[test]
    fn build_examples() {
        let nf = nf_build(&ints(&[-2, 0, 1])).unwrap();
        assert_eq!(nf.degree(), 2);
        assert!(matches!(nf.certificate(), Certificate::NoRationalRoot));
        assert_eq!(nf_build(&ints(&[-1, 0, 1])), Err(Error::Reducible { factor: "X - 1".into() }));
        assert!(nf_build(&ints(&[-2, 0, 0, 1])).is_ok());
        assert_eq!(nf_build(&ints(&[0, 1, 1])), Err(Error::Reducible { factor: "X".into() }));
        assert_eq!(nf_build(&ints(&[1, 2, 1])), Err(Error::Reducible { factor: "X + 1".into() }));
        assert!(nf_build(&ints(&[-2, 1])).is_ok());
        assert!(nf_build(&ints(&[1, 0, 2])).is_err());
    }

    #[test]
    fn higher_degree_certificates() {
        // x^4 + 8x + 12 has no 4-cycle: patterns 1+3 and 2+2 combine
        let c = nf_build(&ints(&[12, 8, 0, 0, 1])).unwrap();
        assert!(matches!(c.certificate(), Certificate::DegreePatterns { .. }));
        // x^4 + 1 splits as 2+2 or finer modulo every good prime
        assert_eq!(nf_build(&ints(&[1, 0, 0, 0, 1])), Err(Error::CertificateNotFound));
        let c = nf_build(&ints(&[-2, 0, 0, 0, 0, 1])).unwrap();
        assert!(matches!(c.certificate(), Certificate::IrreducibleModP { .. }));
        // (x^2 + 1)(x^2 + 2) has no rational root and is never certified
        assert_eq!(nf_build(&ints(&[2, 0, 3, 0, 1])), Err(Error::CertificateNotFound));
    }

    #[test]
    fn certificate_primes_really_certify() {
        let c = nf_build(&ints(&[3, 1, 0, 0, 0, 1])).unwrap();
        if let Certificate::IrreducibleModP { p } = c.certificate() {
            let fp = PrimeField::new(*p).unwrap();
            assert!(field::is_irreducible(&fp, &c.poly_mod(*p)));
        }
    }

    #[test]
    fn non_monic_input_is_normalized() {
        // 2x^2 - 1 -> x^2 - 2 with root 2·(1/√2)
        let g = MPoly::univariate(&[-1, 0, 2]);
        let (nf, a) = nf_build_from_poly(&g).unwrap();
        assert_eq!(nf.poly(), ints(&[-2, 0, 1]).as_slice());
        assert_eq!(a, BigInt::from(2));
    }

    #[test]
    fn arithmetic_in_q_sqrt2() {
        let nf = nf_build(&ints(&[-2, 0, 1])).unwrap();
        let a = elem(&nf, &[(0, 1), (1, 1)]);
        let two = a.mul(&a, &nf);
        assert_eq!(two, NFElem::from_rational(&nf, q(2, 1)));
        assert!(two.is_rational() && !a.is_rational());
        let g = MPoly::univariate(&[1, 0, 0, 1]); // a^3 + 1 = 2a + 1
        assert_eq!(NFElem::from_poly(&nf, &g).unwrap(), elem(&nf, &[(1, 1), (2, 1)]));
    }

    #[test]
    fn reduce_examples() {
        let nf = nf_build(&ints(&[-2, 0, 1])).unwrap();
        // 3^2 = 9 ≡ 2 mod 7
        assert_eq!(nf_reduce(&elem(&nf, &[(1, 2)]), &nf, 7, 3).unwrap(), 4);
        let nf_q = nf_build(&ints(&[0, 1])).unwrap();
        assert_eq!(nf_reduce(&NFElem::from_rational(&nf_q, q(1, 2)), &nf_q, 5, 0).unwrap(), 3);
        assert_eq!(nf_reduce(&NFElem::from_rational(&nf_q, q(1, 5)), &nf_q, 5, 0), Err(Error::BadPrime(5)));
        assert_eq!(nf_reduce(&elem(&nf, &[(0, 1), (1, 1)]), &nf, 7, 3).unwrap(), 3);
        assert!(nf_reduce(&elem(&nf, &[(0, 1), (1, 1)]), &nf, 7, 2).is_err());
    }

    #[test]
    fn reduction_is_a_ring_homomorphism() {
        for f in [ints(&[-2, 0, 1]), ints(&[-2, 0, 0, 1])] {
            let nf = nf_build(&f).unwrap();
            let d = nf.degree();
            for p in arith::primes_in(200, None).unwrap().into_iter().skip(2) {
                let fm = nf.poly_mod(p);
                let roots = upoly::prime_distinct_roots(p, &fm).unwrap();
                for &b in &roots {
                    for s in 0..5i64 {
                        let x = NFElem::new(&nf, (0..d).map(|i| q(s * 3 + i as i64 - 4, 1 + i as i64)).collect()).unwrap();
                        let y = NFElem::new(&nf, (0..d).map(|i| q(7 - s * (i as i64), 1)).collect()).unwrap();
                        let (rx, ry) = (nf_reduce(&x, &nf, p, b).unwrap(), nf_reduce(&y, &nf, p, b).unwrap());
                        assert_eq!(nf_reduce(&x.add(&y), &nf, p, b).unwrap(), arith::add_mod(rx, ry, p));
                        assert_eq!(nf_reduce(&x.mul(&y, &nf), &nf, p, b).unwrap(), arith::mul_mod(rx, ry, p));
                    }
                }
            }
        }
    }

    #[test]
    fn lattice_examples() {
        let nf_q = nf_build(&ints(&[0, 1])).unwrap();
        let e: Vec<NFElem> = [(1, 2), (1, 3), (5, 6)].iter().map(|&(n, d)| NFElem::from_rational(&nf_q, q(n, d))).collect();
        let lb = lattice_basis(&e).unwrap();
        assert_eq!(lb.basis, vec![NFElem::from_rational(&nf_q, q(1, 6))]);
        assert_eq!(lb.expression, vec![ints(&[3]), ints(&[2]), ints(&[5])]);

        let nf = nf_build(&ints(&[-2, 0, 1])).unwrap();
        let indep = vec![elem(&nf, &[(1, 1)]), elem(&nf, &[(0, 1), (1, 1)])];
        let lb = lattice_basis(&indep).unwrap();
        assert_eq!(lb.basis, indep);
        assert_eq!(lb.expression, vec![ints(&[1, 0]), ints(&[0, 1])]);

        let dep = vec![elem(&nf, &[(0, 1), (1, 1)]), elem(&nf, &[(0, 1), (2, 1)])];
        let lb = lattice_basis(&dep).unwrap();
        assert_eq!(lb.basis, vec![elem(&nf, &[(0, 1), (1, 1)])]);
        assert_eq!(lb.expression, vec![ints(&[1]), ints(&[2])]);

        let zero = lattice_basis(&[NFElem::from_rational(&nf_q, q(0, 1))]).unwrap();
        assert!(zero.basis.is_empty());
        assert_eq!(zero.expression, vec![Vec::<BigInt>::new()]);
    }

    #[test]
    fn lattice_round_trip_and_membership() {
        let nf = nf_build(&ints(&[-2, 0, 0, 1])).unwrap();
        let e = vec![
            elem(&nf, &[(1, 2), (1, 3), (0, 1)]),
            elem(&nf, &[(1, 4), (0, 1), (2, 5)]),
            elem(&nf, &[(3, 4), (2, 3), (2, 5)]),
            elem(&nf, &[(1, 1), (0, 1), (0, 1)]),
        ];
        let lb = lattice_basis(&e).unwrap();
        for (x, row) in e.iter().zip(&lb.expression) {
            let mut acc = NFElem::from_rational(&nf, q(0, 1));
            for (c, b) in row.iter().zip(&lb.basis) {
                acc = acc.add(&b.scale(&BigRational::from_integer(c.clone())));
            }
            assert_eq!(&acc, x);
        }
        let back = basis_in_terms_of_inputs(&e, &lb.basis).unwrap();
        for (b, combo) in lb.basis.iter().zip(&back) {
            let mut acc = NFElem::from_rational(&nf, q(0, 1));
            for (c, x) in combo.iter().zip(&e) {
                acc = acc.add(&x.scale(&BigRational::from_integer(c.clone())));
            }
            assert_eq!(&acc, b);
        }
        // the rational part of the lattice shows up as a rational basis element
        assert!(lb.basis.iter().any(NFElem::is_rational));
    }

    #[test]
    fn relations() {
        let nf_q = nf_build(&ints(&[0, 1])).unwrap();
        let e: Vec<NFElem> = [(1, 2), (1, 3), (5, 6)].iter().map(|&(n, d)| NFElem::from_rational(&nf_q, q(n, d))).collect();
        let rel = qlin_relations(&e);
        assert_eq!(rel.len(), 2);
        for r in &rel {
            let s: BigRational = r.iter().zip(&e).map(|(c, x)| BigRational::from_integer(c.clone()) * &x.coeffs[0]).sum();
            assert!(s.is_zero());
        }
        // (1, 1, -1) lies in the span: solve with the two basis vectors
        let target = ints(&[1, 1, -1]);
        let (a, b) = (&rel[0], &rel[1]);
        let det = &a[0] * &b[1] - &a[1] * &b[0];
        let s = BigRational::new(&target[0] * &b[1] - &target[1] * &b[0], det.clone());
        let t = BigRational::new(&a[0] * &target[1] - &a[1] * &target[0], det);
        for i in 0..3 {
            let v = &s * BigRational::from_integer(a[i].clone()) + &t * BigRational::from_integer(b[i].clone());
            assert_eq!(v, BigRational::from_integer(target[i].clone()));
        }
        let nf = nf_build(&ints(&[-2, 0, 1])).unwrap();
        assert!(qlin_relations(&[elem(&nf, &[(1, 1)]), elem(&nf, &[(0, 1), (1, 1)])]).is_empty());
        assert_eq!(qlin_relations(&[NFElem::from_rational(&nf_q, q(0, 1))]), vec![ints(&[1])]);
    }

    #[test]
    fn value_set_examples() {
        let nf_q = nf_build(&ints(&[0, 1])).unwrap();
        let e: Vec<NFElem> = [(1, 2), (1, 3), (5, 6)].iter().map(|&(n, d)| NFElem::from_rational(&nf_q, q(n, d))).collect();
        let vs = value_set(&e, false).unwrap();
        assert_eq!(vs.exponents(), &[ints(&[3]), ints(&[2]), ints(&[5])]);
        assert_eq!(vs.describe(), "{(z^3, z^2, z^5) : z ∈ T}");
        let third = value_set(&[NFElem::from_rational(&nf_q, q(1, 3))], true).unwrap();
        assert_eq!(third.annotations.len(), 1);
        assert_eq!(third.annotations[0].values, vec![Angle::new(1, 3), Angle::new(2, 3)]);
        // p ≡ 1 mod 3 gives e(2/3), p ≡ 2 mod 3 gives e(1/3)
        assert_eq!(third.annotations[0].by_class, vec![(1, Angle::new(2, 3)), (2, Angle::new(1, 3))]);
        let nf = nf_build(&ints(&[-2, 0, 1])).unwrap();
        let indep = value_set(&[elem(&nf, &[(1, 3)]), elem(&nf, &[(0, 1), (1, 1)])], false).unwrap();
        assert_eq!(indep.exponents(), &[ints(&[1, 0]), ints(&[0, 1])]);
    }

    #[test]
    fn sp_classes_match_actual_primes() {
        // ψ_p(n^{-1} mod p) is close to the annotated value for p's class
        let nf_q = nf_build(&ints(&[0, 1])).unwrap();
        for n in 2..10u64 {
            let vs = value_set(&[NFElem::from_rational(&nf_q, q(1, n as i64))], true).unwrap();
            let ann = &vs.annotations[0];
            for p in arith::primes_in(3000, None).unwrap().into_iter().filter(|&p| p > 1000 && p % n != 0) {
                let m = arith::inv_mod(n % p, p).unwrap();
                let (_, predicted) = ann.by_class.iter().find(|(k, _)| *k == p % n).unwrap();
                let (num, den) = Angle::new(m, p).circle_distance(predicted);
                assert!((num as f64 / den as f64) < 1.0 / p as f64 + 1e-15);
            }
        }
    }
}

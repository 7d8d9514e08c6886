//! Symmetric character sums over roots, and the algebraic functions κ.
//!
//! A [`PsiSymTerm`] with coefficients `(c_1, …, c_n)` stands for the monic
//! polynomial `x^n + c_1 x^{n-1} + … + c_n`; its value is the sum of the
//! character over the roots that lie in the field, counted with
//! multiplicity. Roots outside the field contribute nothing.

use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::character::{angle_to_complex, psi_q, CharacterDesc};
use crate::error::{Error, Result};
use crate::field::{ExtFieldDesc, FieldOps, FqElem};
use crate::mpoly::MPoly;
use crate::upoly;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiSymTerm {
    coeffs: Vec<FqElem>,
}

impl PsiSymTerm {
    pub fn new(desc: &ExtFieldDesc, coeffs: Vec<FqElem>) -> Result<Self> {
        if coeffs.iter().any(|c| !desc.is_valid(c)) {
            return Err(Error::InvalidArgument("coefficient is not an element of the field".into()));
        }
        Ok(PsiSymTerm { coeffs })
    }

    /// Convenience constructor over a prime field from residues.
    pub fn from_residues(desc: &ExtFieldDesc, coeffs: &[u64]) -> Self {
        PsiSymTerm { coeffs: coeffs.iter().map(|&c| desc.from_residue(c)).collect() }
    }

    /// The term whose polynomial is `Π (x - r)`.
    pub fn from_roots(desc: &ExtFieldDesc, roots: &[FqElem]) -> Self {
        let mut poly = vec![desc.one()];
        for r in roots {
            poly = upoly::mul(desc, &poly, &[desc.neg(r), desc.one()]);
        }
        Self::from_monic(&poly)
    }

    /// Degree-0 term; its value is 0.
    pub fn empty() -> Self {
        PsiSymTerm { coeffs: Vec::new() }
    }

    fn from_monic(poly: &[FqElem]) -> Self {
        // little-endian monic [c_n, …, c_1, 1] -> (c_1, …, c_n)
        let n = poly.len() - 1;
        PsiSymTerm { coeffs: (0..n).map(|i| poly[n - 1 - i].clone()).collect() }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    /// Little-endian monic polynomial.
    pub fn poly(&self, desc: &ExtFieldDesc) -> Vec<FqElem> {
        let mut out: Vec<FqElem> = self.coeffs.iter().rev().cloned().collect();
        out.push(desc.one());
        out
    }

    /// Field-rational roots with multiplicity.
    pub fn rational_roots(&self, desc: &ExtFieldDesc) -> Vec<FqElem> {
        if self.coeffs.is_empty() {
            return Vec::new();
        }
        upoly::roots(desc, &self.poly(desc), 0).expect("monic polynomial is nonzero")
    }
}

pub fn psisym_eval(term: &PsiSymTerm, chr: &CharacterDesc) -> Complex64 {
    term.rational_roots(chr.field()).iter().map(|r| angle_to_complex(psi_q(r, chr))).sum()
}

/// `(c_1, …, c_n) ↦ (-c_1, c_2, …, (-1)^n c_n)`; evaluates to the complex
/// conjugate.
pub fn psisym_conj(term: &PsiSymTerm, desc: &ExtFieldDesc) -> PsiSymTerm {
    let coeffs = term
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| if i % 2 == 0 { desc.neg(c) } else { c.clone() })
        .collect();
    PsiSymTerm { coeffs }
}

/// Product of the two polynomials; evaluates to the sum of the values.
pub fn psisym_add(t1: &PsiSymTerm, t2: &PsiSymTerm, desc: &ExtFieldDesc) -> PsiSymTerm {
    let prod = upoly::mul(desc, &t1.poly(desc), &t2.poly(desc));
    PsiSymTerm::from_monic(&prod)
}

/// `Π_{α∈A, β∈B} (x - (α + β))` over the rational root multisets `A`, `B`;
/// evaluates to the product of the values.
pub fn psisym_mul(t1: &PsiSymTerm, t2: &PsiSymTerm, chr: &CharacterDesc) -> PsiSymTerm {
    let desc = chr.field();
    let a = t1.rational_roots(desc);
    let b = t2.rational_roots(desc);
    let sums: Vec<FqElem> = a.iter().flat_map(|x| b.iter().map(move |y| desc.add(x, y))).collect();
    PsiSymTerm::from_roots(desc, &sums)
}

/// `κ_{P,Q}(b)`: with `x` the last variable of `P` and `Q`, returns the
/// common value of `Q(b, d)` over the roots `d ∈ F_q` of `P(b, x)`, or 0 when
/// there is no root or the values differ.
pub fn kappa_eval(p_poly: &MPoly, q_poly: &MPoly, params: &[FqElem], desc: &ExtFieldDesc) -> Result<FqElem> {
    let n = params.len() + 1;
    if p_poly.nvars() != n || q_poly.nvars() != n {
        return Err(Error::InvalidArgument(format!(
            "P and Q must have {n} variables (parameters then x)"
        )));
    }
    if params.iter().any(|b| !desc.is_valid(b)) {
        return Err(Error::InvalidArgument("parameter is not an element of the field".into()));
    }
    let p = desc.p();
    let pr = p_poly.reduce(p)?;
    let qr = q_poly.reduce(p)?;
    let pb = pr.specialize_last(desc, params);
    let qb = qr.specialize_last(desc, params);
    if pb.is_empty() {
        // every element is a root: Q(b, ·) must be constant as a function on F_q
        let q = desc.order().ok_or_else(|| Error::InvalidArgument("field too large".into()))?;
        let mut folded = vec![desc.zero(); qb.len().min(q as usize).max(1)];
        for (k, c) in qb.iter().enumerate() {
            let slot = if (k as u128) < q { k } else { (((k as u128 - 1) % (q - 1)) + 1) as usize };
            folded[slot] = desc.add(&folded[slot], c);
        }
        if folded[1..].iter().all(|c| desc.is_zero(c)) {
            return Ok(folded[0].clone());
        }
        return Ok(desc.zero());
    }
    let roots = upoly::distinct_roots(desc, &pb, 0)?;
    let mut values = roots.iter().map(|d| upoly::eval(desc, &qb, d));
    let Some(first) = values.next() else {
        return Ok(desc.zero());
    };
    if values.all(|v| v == first) {
        Ok(first)
    } else {
        Ok(desc.zero())
    }
}

/// Value of a term by scanning every field element and dividing out each
/// root to find its multiplicity; independent of the root finder.
pub fn psisym_eval_brute(term: &PsiSymTerm, chr: &CharacterDesc) -> Complex64 {
    let desc = chr.field();
    let mut total = Complex64::new(0.0, 0.0);
    if term.coeffs.is_empty() {
        return total;
    }
    for x in desc.elements() {
        let mut f = term.poly(desc);
        let mut mult = 0;
        while f.len() > 1 && desc.is_zero(&upoly::eval(desc, &f, &x)) {
            f = upoly::divrem(desc, &f, &[desc.neg(&x), desc.one()]).0;
            mult += 1;
        }
        total += angle_to_complex(psi_q(&x, chr)) * mult as f64;
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosureConfig {
    pub instances: usize,
    pub max_degree: usize,
    pub max_prime: u64,
    pub seed: u64,
}

impl Default for ClosureConfig {
    fn default() -> Self {
        ClosureConfig { instances: 1000, max_degree: 4, max_prime: 499, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity: &'static str,
    pub instances: usize,
    pub failures: usize,
    pub max_error: f64,
    /// First failing instance as (p, t1 coefficients, t2 coefficients).
    pub first_failure: Option<(u64, Vec<u64>, Vec<u64>)>,
}

pub const CLOSURE_TOL: f64 = 1e-9;

pub const IDENTITIES: [&str; 4] = ["linear", "conjugation", "addition", "multiplication"];

/// Random instances of the closure identities over prime fields `F_p`,
/// `p <= max_prime`: `Ψ¹(−c) = Ψ(c)`, conjugation, addition and
/// multiplication. Each side is compared with brute-force evaluation of
/// the inputs. Instance `i` draws from its own stream `seed ⊕ i`, so the
/// result does not depend on scheduling.
pub fn closure_suite(cfg: &ClosureConfig) -> Result<Vec<IdentityReport>> {
    if cfg.max_degree == 0 {
        return Err(Error::InvalidArgument("max degree must be >= 1".into()));
    }
    let primes = crate::arith::primes_in(cfg.max_prime, None)?;
    IDENTITIES
        .iter()
        .enumerate()
        .map(|(which, &identity)| {
            let results: Vec<(f64, u64, Vec<u64>, Vec<u64>)> = (0..cfg.instances)
                .into_par_iter()
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ ((which as u64) << 56) ^ i as u64);
                    let p = primes[rng.gen_range(0..primes.len())];
                    let desc = crate::field::build_extension(p, 1).expect("sieved prime");
                    let chr = CharacterDesc::standard(desc.clone());
                    let draw = |rng: &mut ChaCha8Rng| -> Vec<u64> {
                        let d = rng.gen_range(1..=cfg.max_degree);
                        (0..d).map(|_| rng.gen_range(0..p)).collect()
                    };
                    let (c1, c2) = if which == 0 { (vec![rng.gen_range(0..p)], Vec::new()) } else { (draw(&mut rng), draw(&mut rng)) };
                    let t1 = PsiSymTerm::from_residues(&desc, &c1);
                    let t2 = PsiSymTerm::from_residues(&desc, &c2);
                    let b1 = psisym_eval_brute(&t1, &chr);
                    let b2 = psisym_eval_brute(&t2, &chr);
                    let err = match which {
                        0 => {
                            let c = desc.from_residue(crate::arith::neg_mod(c1[0], p));
                            (psisym_eval(&t1, &chr) - angle_to_complex(psi_q(&c, &chr))).norm()
                        }
                        1 => (psisym_eval(&psisym_conj(&t1, &desc), &chr) - b1.conj()).norm(),
                        2 => (psisym_eval(&psisym_add(&t1, &t2, &desc), &chr) - (b1 + b2)).norm(),
                        _ => (psisym_eval(&psisym_mul(&t1, &t2, &chr), &chr) - b1 * b2).norm(),
                    };
                    // the evaluator itself against the scan
                    let err = err.max((psisym_eval(&t1, &chr) - b1).norm());
                    (err, p, c1, c2)
                })
                .collect();
            let failing = results.iter().filter(|r| !(r.0 <= CLOSURE_TOL)).count();
            Ok(IdentityReport {
                identity,
                instances: cfg.instances,
                failures: failing,
                max_error: results.iter().map(|r| r.0).fold(0.0, f64::max),
                first_failure: results.into_iter().find(|r| !(r.0 <= CLOSURE_TOL)).map(|r| (r.1, r.2, r.3)),
            })
        })
        .collect()
}

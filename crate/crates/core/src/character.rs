//! Additive characters with exact values.
//!
//! A character value `exp(2πi·a/b)` is kept as the reduced fraction `a/b`
//! in `[0, 1)`; floating point appears only when values are summed.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num::complex::Complex64;
use serde::{Serialize, Serializer};

use crate::arith;
use crate::error::{Error, Result};
use crate::field::{fq_trace, ExtFieldDesc, FieldOps, FqElem};

/// A point of the circle group `R/Z`, as a reduced fraction `num/den`
/// with `0 <= num < den`. Zero is `0/1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Angle {
    num: u64,
    den: u64,
}

impl Angle {
    pub const ZERO: Angle = Angle { num: 0, den: 1 };

    /// `num/den mod 1`, reduced. Panics if `den == 0`.
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "angle denominator must be positive");
        let num = num % den;
        let g = arith::gcd(num, den);
        Angle { num: num / g, den: den / g }
    }

    pub fn from_signed(num: i128, den: u64) -> Self {
        let r = num.rem_euclid(den as i128) as u64;
        Angle::new(r, den)
    }

    fn from_u128(num: u128, den: u128) -> Self {
        let num = num % den;
        let mut a = num;
        let mut b = den;
        while b != 0 {
            (a, b) = (b, a % b);
        }
        let g = a.max(1);
        let (n, d) = (num / g, den / g);
        Angle {
            num: u64::try_from(n).expect("angle numerator overflow"),
            den: u64::try_from(d).expect("angle denominator overflow"),
        }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `k · self` for any integer `k`.
    pub fn scale(&self, k: i64) -> Angle {
        let m = (k as i128).rem_euclid(self.den as i128) as u128;
        Angle::from_u128(m * self.num as u128, self.den as u128)
    }

    /// Distance on the circle `R/Z` as an exact fraction in `[0, 1/2]`,
    /// returned as (numerator, denominator) reduced.
    pub fn circle_distance(&self, other: &Angle) -> (u128, u128) {
        let d = *self - *other;
        let (n, den) = (d.num as u128, d.den as u128);
        let n = n.min(den - n);
        let mut a = n;
        let mut b = den;
        while b != 0 {
            (a, b) = (b, a % b);
        }
        if n == 0 {
            (0, 1)
        } else {
            (n / a, den / a)
        }
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        let g = arith::gcd(self.den, rhs.den) as u128;
        let lcm = self.den as u128 / g * rhs.den as u128;
        let a = self.num as u128 * (lcm / self.den as u128);
        let b = rhs.num as u128 * (lcm / rhs.den as u128);
        Angle::from_u128(a + b, lcm)
    }
}

impl Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        if self.num == 0 {
            self
        } else {
            Angle { num: self.den - self.num, den: self.den }
        }
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, rhs: Angle) -> Angle {
        self + (-rhs)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `(cos, sin)` of `2π·t` for `t = num/den ∈ [0, 1/4]`.
fn first_quadrant(num: u128, den: u128) -> (f64, f64) {
    if 8 * num > den {
        // use the complement 1/4 - t for accuracy near the axis
        let c = (den - 4 * num) as f64 / (4 * den) as f64;
        let (s, co) = (2.0 * std::f64::consts::PI * c).sin_cos();
        (s, co)
    } else {
        let t = num as f64 / den as f64;
        let (s, c) = (2.0 * std::f64::consts::PI * t).sin_cos();
        (c, s)
    }
}

/// `exp(2πi·a)` in double precision. Exact at multiples of 1/4, and
/// `angle_to_complex(-a)` is bitwise the conjugate of `angle_to_complex(a)`.
pub fn angle_to_complex(a: Angle) -> Complex64 {
    let (num, den) = (a.num as u128, a.den as u128);
    if 2 * num > den {
        return angle_to_complex(-a).conj();
    }
    // t in [0, 1/2]
    let (re, im) = if 4 * num <= den {
        first_quadrant(num, den)
    } else {
        // t = 1/2 - s with s in [0, 1/4): cos flips sign, sin is kept
        let (c, s) = first_quadrant(den - 2 * num, 2 * den);
        (-c, s)
    };
    Complex64::new(re, im)
}

/// The standard character of `F_p`: `n ↦ n/p`.
pub fn psi_p(a: u64, p: u64) -> Result<Angle> {
    if a >= p {
        return Err(Error::OutOfRange { value: a, modulus: p });
    }
    Ok(Angle::new(a, p))
}

/// The character `x ↦ Ψ_q(c·x)` on `F_q`, where `Ψ_q = Ψ_p ∘ Tr`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterDesc {
    field: ExtFieldDesc,
    twist: FqElem,
}

impl CharacterDesc {
    /// `Ψ_q` itself (twist 1).
    pub fn standard(field: ExtFieldDesc) -> Self {
        let twist = field.one();
        CharacterDesc { field, twist }
    }

    /// `x ↦ Ψ_q(c·x)`; `c` must be nonzero.
    pub fn twisted(field: ExtFieldDesc, twist: FqElem) -> Result<Self> {
        if !field.is_valid(&twist) {
            return Err(Error::InvalidArgument("twist is not an element of the field".into()));
        }
        if field.is_zero(&twist) {
            return Err(Error::InvalidArgument("twist 0 gives the trivial character; use CharacterDesc::trivial".into()));
        }
        Ok(CharacterDesc { field, twist })
    }

    /// The trivial character, `x ↦ 1`.
    pub fn trivial(field: ExtFieldDesc) -> Self {
        let twist = field.zero();
        CharacterDesc { field, twist }
    }

    pub fn field(&self) -> &ExtFieldDesc {
        &self.field
    }

    pub fn twist(&self) -> &FqElem {
        &self.twist
    }

    pub fn is_trivial(&self) -> bool {
        self.field.is_zero(&self.twist)
    }

    pub fn psi(&self, x: &FqElem) -> Angle {
        psi_q(x, self)
    }

    /// Character value on a prime-subfield residue.
    pub fn psi_residue(&self, a: u64) -> Angle {
        psi_q(&self.field.from_residue(a), self)
    }
}

pub fn psi_q(x: &FqElem, chr: &CharacterDesc) -> Angle {
    let f = &chr.field;
    let tr = fq_trace(&f.mul(&chr.twist, x), f);
    Angle::new(tr, f.p())
}

/// Table of `exp(2πi k/p)` for `k in 0..p`.
pub fn unit_roots(p: u64) -> Vec<Complex64> {
    (0..p).map(|k| angle_to_complex(Angle::new(k, p))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_extension;

    #[test]
    fn psi_p_examples() {
        assert_eq!(psi_p(0, 7).unwrap(), Angle::ZERO);
        assert_eq!(psi_p(1, 7).unwrap().to_string(), "1/7");
        let half = psi_p(3, 5).unwrap();
        assert_eq!(half.to_string(), "3/5");
        assert_eq!(half.circle_distance(&Angle::new(1, 2)), (1, 10));
        assert!(psi_p(7, 7).is_err());
    }

    #[test]
    fn psi_q_examples() {
        let f4 = build_extension(2, 2).unwrap();
        let chr = CharacterDesc::standard(f4.clone());
        assert_eq!(psi_q(&f4.generator(), &chr), Angle::new(1, 2));
        assert_eq!(psi_q(&f4.zero(), &chr), Angle::ZERO);
        let f9 = build_extension(3, 2).unwrap();
        assert_eq!(f9.modulus(), &[1, 0, 1]);
        assert_eq!(psi_q(&f9.generator(), &CharacterDesc::standard(f9.clone())), Angle::ZERO);
    }

    #[test]
    fn complex_values() {
        assert_eq!(angle_to_complex(Angle::ZERO), Complex64::new(1.0, 0.0));
        assert_eq!(angle_to_complex(Angle::new(1, 2)), Complex64::new(-1.0, 0.0));
        assert_eq!(angle_to_complex(Angle::new(1, 4)), Complex64::new(0.0, 1.0));
        assert_eq!(angle_to_complex(Angle::new(3, 4)), Complex64::new(0.0, -1.0));
        let z = angle_to_complex(Angle::new(1, 8));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((z.re - h).abs() < 1e-15 && (z.im - h).abs() < 1e-15);
    }

    #[test]
    fn complex_accuracy_and_conjugate_symmetry() {
        for den in 1..200u64 {
            for num in 0..den {
                let a = Angle::new(num, den);
                let z = angle_to_complex(a);
                let t = 2.0 * std::f64::consts::PI * num as f64 / den as f64;
                assert!((z.re - t.cos()).abs() <= 8.0 * f64::EPSILON);
                assert!((z.im - t.sin()).abs() <= 8.0 * f64::EPSILON);
                assert_eq!(angle_to_complex(-a), z.conj());
            }
        }
    }

    #[test]
    fn angle_arithmetic() {
        assert_eq!(Angle::new(5, 7) - Angle::new(2, 3), Angle::new(1, 21));
        assert_eq!(Angle::new(1, 2) + Angle::new(1, 2), Angle::ZERO);
        assert_eq!(Angle::new(2, 6), Angle::new(1, 3));
        assert_eq!(Angle::new(1, 3).scale(-1), Angle::new(2, 3));
        assert_eq!(Angle::new(3, 7).scale(5), Angle::new(1, 7));
    }

    fn fields() -> Vec<ExtFieldDesc> {
        [(2u64, 1usize), (2, 3), (2, 4), (3, 2), (3, 5), (5, 2), (7, 3), (7, 1), (31, 1)]
            .iter()
            .map(|&(p, e)| build_extension(p, e).unwrap())
            .collect()
    }

    #[test]
    fn character_is_a_homomorphism() {
        for f in fields() {
            let chr = CharacterDesc::standard(f.clone());
            let elems: Vec<_> = f.elements().collect();
            for x in &elems {
                for y in elems.iter().step_by(7) {
                    assert_eq!(psi_q(&f.add(x, y), &chr), psi_q(x, &chr) + psi_q(y, &chr));
                }
            }
        }
    }

    #[test]
    fn orthogonality_for_every_nontrivial_twist() {
        for f in fields() {
            let elems: Vec<_> = f.elements().collect();
            for c in elems.iter().filter(|c| !f.is_zero(c)).step_by(3) {
                let chr = CharacterDesc::twisted(f.clone(), c.clone()).unwrap();
                let s: Complex64 = elems.iter().map(|x| angle_to_complex(psi_q(x, &chr))).sum();
                assert!(s.norm() < 1e-9, "q = {}^{}", f.p(), f.e());
            }
            let triv = CharacterDesc::trivial(f.clone());
            assert!(triv.is_trivial());
            assert!(CharacterDesc::twisted(f.clone(), f.zero()).is_err());
        }
    }

    #[test]
    fn twists_give_distinct_characters() {
        for &(p, e) in &[(2u64, 2usize), (3, 2), (7, 2), (5, 2), (2, 5), (47, 1)] {
            let f = build_extension(p, e).unwrap();
            let elems: Vec<_> = f.elements().collect();
            let mut tables: Vec<Vec<Angle>> = elems
                .iter()
                .map(|c| {
                    let chr = CharacterDesc { field: f.clone(), twist: c.clone() };
                    elems.iter().map(|x| psi_q(x, &chr)).collect()
                })
                .collect();
            tables.sort();
            tables.dedup();
            assert_eq!(tables.len(), elems.len());
        }
    }
}

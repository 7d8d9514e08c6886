//! Exponential sums over varieties, Weil-bound checks, the sup test for
//! mean-zero trigonometric polynomials on curves, rational hyperplane
//! detection, and box counts.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use num::complex::{Complex, Complex64};
use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith;
use crate::character::{angle_to_complex, unit_roots, Angle, CharacterDesc};
use crate::error::{Error, Result};
use crate::field::{ExtFieldDesc, FieldOps, FqElem};
use crate::mpoly::{MPoly, ReducedPoly, System};
use crate::points;
use crate::stats::CompensatedSum;
use crate::upoly;

/// Where the points of an exponential sum come from.
#[derive(Debug, Clone, Copy)]
pub enum PointSource<'a> {
    /// An explicit point list over the character's field.
    Points(&'a [Vec<FqElem>]),
    /// All points of a system, enumerated within `budget`.
    Variety { system: &'a System, budget: u128 },
}

/// `Σ_{x∈X} ψ(f(x))`.
pub fn exp_sum(source: PointSource<'_>, f: &MPoly, chr: &CharacterDesc) -> Result<Complex64> {
    let desc = chr.field();
    let fr = f.reduce(desc.p())?;
    match source {
        PointSource::Points(pts) => {
            if let Some(pt) = pts.iter().find(|pt| pt.len() != f.nvars()) {
                return Err(Error::InvalidArgument(format!(
                    "point has {} coordinates, map has {} variables",
                    pt.len(),
                    f.nvars()
                )));
            }
            let s: CompensatedSum = pts.iter().map(|pt| angle_to_complex(chr.psi(&fr.eval(desc, pt)))).collect();
            Ok(s.value())
        }
        PointSource::Variety { system, budget } => {
            if system.nvars() != f.nvars() {
                return Err(Error::InvalidArgument("map and variety live in different ambient spaces".into()));
            }
            if desc.e() == 1 {
                let p = desc.p();
                let twist = desc.as_residue(chr.twist()).expect("prime field");
                if system.nvars() == 1 && system.polys().iter().all(MPoly::is_zero) {
                    let coeffs = univariate_residues(&fr);
                    return Ok(exp_sum_univariate(&coeffs, p, twist));
                }
                let roots = unit_roots(p);
                let polys = system.reduce(p)?;
                if (p as u128).checked_pow(system.nvars() as u32).map_or(true, |n| n > budget) {
                    return Err(Error::BudgetExceeded {
                        needed: (p as u128).checked_pow(system.nvars() as u32).unwrap_or(u128::MAX),
                        cap: budget,
                    });
                }
                let mut s = CompensatedSum::new();
                points::for_each_point_prime(&polys, system.nvars(), p, None, |pt| {
                    let v = arith::mul_mod(fr.eval_prime(pt), twist, p);
                    s.add(roots[v as usize]);
                })?;
                return Ok(s.value());
            }
            let pts = points::enumerate_points(system, desc, None, budget)?;
            exp_sum(PointSource::Points(&pts), f, chr)
        }
    }
}

fn univariate_residues(f: &ReducedPoly) -> Vec<u64> {
    let deg = f.degree_in(0) as usize;
    let mut out = vec![0u64; if f.is_zero() { 0 } else { deg + 1 }];
    for (c, e) in f.terms() {
        out[e[0] as usize] = *c;
    }
    out
}

/// `Σ_{x∈F_p} e(twist·f(x)/p)` for `f` given by little-endian residues,
/// via a histogram of the values of `f`.
pub fn exp_sum_univariate(f: &[u64], p: u64, twist: u64) -> Complex64 {
    let mut hist = vec![0u64; p as usize];
    if p < (1 << 32) {
        for x in 0..p {
            let v = f.iter().rev().fold(0u64, |acc, &c| (acc * x + c) % p);
            hist[v as usize] += 1;
        }
    } else {
        for x in 0..p {
            let v = f.iter().rev().fold(0u64, |acc, &c| arith::add_mod(arith::mul_mod(acc, x, p), c, p));
            hist[v as usize] += 1;
        }
    }
    let mut s = CompensatedSum::new();
    for (v, &count) in hist.iter().enumerate() {
        if count > 0 {
            let a = Angle::new(arith::mul_mod(v as u64, twist, p), p);
            s.add(angle_to_complex(a) * count as f64);
        }
    }
    s.value()
}

fn serialize_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeilRecord {
    pub p: u64,
    pub q: u128,
    pub degree: u64,
    #[serde(serialize_with = "serialize_complex")]
    pub sum: Complex64,
    pub magnitude: f64,
    pub bound: f64,
    /// `magnitude / √q`.
    pub normalized: f64,
    pub pass: bool,
    /// The bound constant is a configured guess rather than a theorem.
    pub heuristic: bool,
}

impl WeilRecord {
    fn new(p: u64, q: u128, degree: u64, sum: Complex64, bound: f64, heuristic: bool) -> Self {
        let magnitude = sum.norm();
        WeilRecord {
            p,
            q,
            degree,
            sum,
            magnitude,
            bound,
            normalized: magnitude / (q as f64).sqrt(),
            pass: magnitude <= bound + 1e-6,
            heuristic,
        }
    }
}

/// Checks `|Σ_{x∈F_q} ψ(f(x))| <= (d - 1)√q` for a univariate `f`.
pub fn weil_check(f: &MPoly, chr: &CharacterDesc) -> Result<WeilRecord> {
    let desc = chr.field();
    let p = desc.p();
    let q = desc.order().ok_or_else(|| Error::InvalidArgument("field too large".into()))?;
    if f.nvars() != 1 {
        return Err(Error::InvalidArgument("weil_check needs a univariate polynomial".into()));
    }
    let fr = f.reduce(p)?;
    let d = if fr.is_zero() { 0 } else { fr.degree_in(0) as u64 };
    if d == 0 {
        return Err(Error::Degenerate(format!("polynomial is constant modulo {p}")));
    }
    if d % p == 0 {
        return Err(Error::WildDegree { degree: d, p });
    }
    let sum = exp_sum(PointSource::Variety { system: &System::affine_space(1), budget: u128::MAX }, f, chr)?;
    let bound = (d - 1) as f64 * (q as f64).sqrt();
    Ok(WeilRecord::new(p, q, d, sum, bound, false))
}

/// Sum over the `F_q`-points of a curve with a configurable bound constant
/// `b` (default `(deg C + deg f)^2`); the result is always flagged as
/// heuristic.
pub fn weil_check_curve(
    curve: &System,
    f: &MPoly,
    chr: &CharacterDesc,
    constant: Option<f64>,
    budget: u128,
) -> Result<WeilRecord> {
    let desc = chr.field();
    let q = desc.order().ok_or_else(|| Error::InvalidArgument("field too large".into()))?;
    let fr = f.reduce(desc.p())?;
    if fr.terms().iter().all(|(_, e)| e.iter().all(|&k| k == 0)) {
        return Err(Error::Degenerate(format!("map is constant modulo {}", desc.p())));
    }
    let sum = exp_sum(PointSource::Variety { system: curve, budget }, f, chr)?;
    let b = constant.unwrap_or(((curve.total_degree() + f.total_degree()) as f64).powi(2));
    Ok(WeilRecord::new(desc.p(), q, f.total_degree(), sum, b * (q as f64).sqrt(), true))
}

/// A finite Fourier series `Σ c_m z^m` on the torus `T^n`, with
/// complex-rational coefficients and exponents in `Z^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Vec<i64>, Complex<BigRational>>,
}

/// Validation applied by [`LaurentPoly::new`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LaurentMode {
    /// `c_{-m} = conj(c_m)` for every `m`, so the series is real-valued.
    pub real: bool,
    /// No coefficient at `m = 0`.
    pub no_constant: bool,
}

impl LaurentMode {
    pub const STRICT: LaurentMode = LaurentMode { real: true, no_constant: true };
}

impl LaurentPoly {
    pub fn new(
        nvars: usize,
        terms: impl IntoIterator<Item = (Vec<i64>, Complex<BigRational>)>,
        mode: LaurentMode,
    ) -> Result<Self> {
        let mut map: BTreeMap<Vec<i64>, Complex<BigRational>> = BTreeMap::new();
        for (m, c) in terms {
            if m.len() != nvars {
                return Err(Error::InvalidLaurent(format!("exponent {m:?} has the wrong length for {nvars} variables")));
            }
            let entry = map.entry(m).or_insert_with(Complex::zero);
            *entry = &*entry + c;
        }
        map.retain(|_, c| !c.is_zero());
        let h = LaurentPoly { nvars, terms: map };
        if mode.real && !h.is_real() {
            return Err(Error::InvalidLaurent("coefficients at m and -m are not conjugate".into()));
        }
        if mode.no_constant && h.constant_term().is_some() {
            return Err(Error::InvalidLaurent("constant term present".into()));
        }
        Ok(h)
    }

    pub fn zero(nvars: usize) -> Self {
        LaurentPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, Complex<BigRational>> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `max ‖m‖∞` over the support.
    pub fn degree_bound(&self) -> u64 {
        self.terms.keys().flat_map(|m| m.iter().map(|e| e.unsigned_abs())).max().unwrap_or(0)
    }

    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(m, c)| {
            let neg: Vec<i64> = m.iter().map(|e| -e).collect();
            self.terms.get(&neg).is_some_and(|d| *d == c.conj())
        })
    }

    pub fn constant_term(&self) -> Option<&Complex<BigRational>> {
        self.terms.get(&vec![0; self.nvars])
    }

    /// `Σ |c_m|`.
    pub fn abs_coeff_sum(&self) -> f64 {
        self.terms.values().map(|c| complex_to_f64(c).norm()).sum()
    }

    /// Value at `(e(θ_1), …, e(θ_n))` for exact angles with common
    /// denominator `den`; `nums` are the numerators.
    pub fn eval_at_residues(&self, nums: &[u64], den: u64) -> Complex64 {
        let mut s = CompensatedSum::new();
        for (m, c) in &self.terms {
            let t: i128 = m.iter().zip(nums).map(|(&e, &x)| e as i128 * x as i128).sum();
            s.add(complex_to_f64(c) * angle_to_complex(Angle::from_signed(t.rem_euclid(den as i128), den)));
        }
        s.value()
    }
}

fn complex_to_f64(c: &Complex<BigRational>) -> Complex64 {
    Complex64::new(c.re.to_f64().unwrap_or(f64::NAN), c.im.to_f64().unwrap_or(f64::NAN))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axiom3Config {
    /// Multiplier on `Σ|c_m|` in the tolerance.
    pub weil_constant: f64,
    pub budget: u128,
}

impl Default for Axiom3Config {
    fn default() -> Self {
        Axiom3Config { weil_constant: 1.0, budget: points::DEFAULT_BUDGET }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axiom3Result {
    pub p: u64,
    pub sup: f64,
    /// First point (lexicographically) where the sup is attained.
    pub argmax: Vec<u64>,
    pub points: u64,
    /// `b'·√p / |C(F_p)|`.
    pub tol: f64,
    pub pass: bool,
}

/// `sup { h(ψ(x_1), …, ψ(x_n)) : x ∈ C(F_p) }`, passing when it is at least
/// `-tol`.
pub fn axiom3_sup(curve: &System, h: &LaurentPoly, p: u64, cfg: &Axiom3Config) -> Result<Axiom3Result> {
    if h.nvars() != curve.nvars() {
        return Err(Error::InvalidLaurent(format!(
            "series has {} variables, curve has {}",
            h.nvars(),
            curve.nvars()
        )));
    }
    if !h.is_real() {
        return Err(Error::InvalidLaurent("coefficients at m and -m are not conjugate".into()));
    }
    if h.constant_term().is_some() {
        return Err(Error::InvalidLaurent("constant term present".into()));
    }
    crate::field::PrimeField::new(p)?;
    let polys = curve.reduce(p)?;
    if (p as u128).checked_pow(curve.nvars() as u32).map_or(true, |n| n > cfg.budget) {
        return Err(Error::BudgetExceeded {
            needed: (p as u128).checked_pow(curve.nvars() as u32).unwrap_or(u128::MAX),
            cap: cfg.budget,
        });
    }
    let mut sup = f64::NEG_INFINITY;
    let mut argmax = Vec::new();
    let mut count = 0u64;
    points::for_each_point_prime(&polys, curve.nvars(), p, None, |pt| {
        count += 1;
        let v = h.eval_at_residues(pt, p).re;
        if v > sup {
            sup = v;
            argmax = pt.to_vec();
        }
    })?;
    if count == 0 {
        return Err(Error::NoPoints);
    }
    let tol = cfg.weil_constant * h.abs_coeff_sum() * (p as f64).sqrt() / count as f64;
    Ok(Axiom3Result { p, sup, argmax, points: count, tol, pass: sup >= -tol })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightTestConfig {
    /// Largest height the search accepts.
    pub cap: u64,
    /// Sampling primes; chosen from the ambient dimension when `None`.
    pub primes: Option<Vec<u64>>,
    pub seed: u64,
    /// Sampling rounds per prime before giving up.
    pub max_attempts: usize,
}

impl Default for HeightTestConfig {
    fn default() -> Self {
        HeightTestConfig { cap: 20, primes: None, seed: 0, max_attempts: 400 }
    }
}

/// `Σ A_i x_i = b` holds at every sampled point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HyperplaneRelation {
    pub coeffs: Vec<i64>,
    pub height: u64,
    /// `b` recovered by rational reconstruction, if successful.
    #[serde(serialize_with = "serialize_opt_rational")]
    pub constant: Option<BigRational>,
    /// `(p, b mod p)` for each sampling prime.
    pub residues: Vec<(u64, u64)>,
    /// Evidence is sampling-based.
    pub probabilistic: bool,
}

fn serialize_opt_rational<S: serde::Serializer>(v: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_some(&r.to_string()),
        None => s.serialize_none(),
    }
}

fn default_height_primes(nvars: usize) -> Vec<u64> {
    // the n - 2 middle coordinates are enumerated, so keep p^{n-2} moderate
    let start = if nvars <= 2 { 1_000_000 } else { (20_000f64.powf(1.0 / (nvars - 2) as f64) as u64).max(101) };
    let mut out = Vec::new();
    let mut k = start;
    while out.len() < 3 {
        k = arith::next_prime(k + 1);
        out.push(k);
    }
    out
}

/// Distinct points of the curve over `F_p`, found by fixing one coordinate
/// at random, enumerating all but one of the rest and solving for the last.
fn sample_points(curve: &System, p: u64, want: usize, cfg: &HeightTestConfig) -> Result<Vec<Vec<u64>>> {
    let n = curve.nvars();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ p);
    let mut found: BTreeSet<Vec<u64>> = BTreeSet::new();
    // per choice of the random coordinate, polynomials with variables permuted
    // to (random, middle..., solved)
    let mut layouts = Vec::new();
    for free in 0..n {
        let solve = if n == 1 { 0 } else if free == n - 1 { n - 2 } else { n - 1 };
        let mut order: Vec<usize> = Vec::with_capacity(n);
        if n > 1 {
            order.push(free);
        }
        order.extend((0..n).filter(|&i| i != free && i != solve));
        order.push(solve);
        let mut to_pos = vec![0; n];
        for (pos, &var) in order.iter().enumerate() {
            to_pos[var] = pos;
        }
        let polys: Vec<ReducedPoly> =
            curve.polys().iter().map(|f| f.remap(n, &to_pos).reduce(p)).collect::<Result<_>>()?;
        layouts.push((order, polys));
    }
    for attempt in 0..cfg.max_attempts {
        if found.len() >= want {
            break;
        }
        let (order, polys) = &layouts[attempt % n];
        let mut prefix = vec![0u64; n - 1];
        if n > 1 {
            prefix[0] = rng.gen_range(0..p);
        }
        let middle = n.saturating_sub(2);
        let mut idx = vec![0u64; middle];
        loop {
            prefix[1..1 + middle].copy_from_slice(&idx);
            let specialized: Vec<Vec<u64>> = polys.iter().map(|f| f.specialize_last_prime(&prefix)).collect();
            let values: Vec<u64> = match specialized.iter().position(|u| !u.is_empty()) {
                None => vec![rng.gen_range(0..p)],
                Some(i) => upoly::prime_distinct_roots(p, &specialized[i])?
                    .into_iter()
                    .filter(|&v| {
                        specialized[i + 1..].iter().all(|u| {
                            u.iter().rev().fold(0, |acc, &c| arith::add_mod(arith::mul_mod(acc, v, p), c, p)) == 0
                        })
                    })
                    .collect(),
            };
            for v in values {
                let mut pt = vec![0u64; n];
                for (pos, &var) in order.iter().enumerate() {
                    pt[var] = if pos < n - 1 { prefix[pos] } else { v };
                }
                found.insert(pt);
            }
            // odometer over the middle coordinates
            let mut k = middle;
            let mut done = true;
            while k > 0 {
                k -= 1;
                idx[k] += 1;
                if idx[k] < p {
                    done = false;
                    break;
                }
                idx[k] = 0;
            }
            if done {
                break;
            }
        }
    }
    if found.len() < want {
        return Err(Error::InsufficientSamples(format!(
            "found {} of {want} distinct points modulo {p}",
            found.len()
        )));
    }
    Ok(found.into_iter().collect())
}

/// Dimension of `{A : M A = 0}` over `F_p`.
fn nullity_mod_p(rows: &[Vec<u64>], ncols: usize, p: u64) -> usize {
    let mut m: Vec<Vec<u64>> = rows.to_vec();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][col] != 0) else { continue };
        m.swap(rank, piv);
        let inv = arith::inv_mod(m[rank][col], p).expect("prime modulus");
        for c in 0..ncols {
            m[rank][c] = arith::mul_mod(m[rank][c], inv, p);
        }
        for r in 0..m.len() {
            if r != rank && m[r][col] != 0 {
                let factor = m[r][col];
                for c in 0..ncols {
                    let sub = arith::mul_mod(factor, m[rank][c], p);
                    m[r][c] = arith::sub_mod(m[r][c], sub, p);
                }
            }
        }
        rank += 1;
    }
    ncols - rank
}

fn dot_mod(a: &[i64], x: &[u64], p: u64) -> u64 {
    a.iter().zip(x).fold(0u64, |acc, (&ai, &xi)| arith::add_mod(acc, arith::mul_mod(arith::reduce_i64(ai, p), xi, p), p))
}

/// Vectors with `‖A‖∞ = h`, primitive, last nonzero entry positive, in
/// lexicographic order.
fn height_shell(n: usize, h: i64, mut visit: impl FnMut(&[i64]) -> bool) -> bool {
    let mut a = vec![-h; n];
    loop {
        let top = a.iter().map(|v| v.abs()).max().unwrap_or(0);
        let last_nz = a.iter().rev().find(|&&v| v != 0).copied().unwrap_or(0);
        if top == h && last_nz > 0 && a.iter().fold(0i64, |g, &v| g.gcd(&v)) == 1 && visit(&a) {
            return true;
        }
        let mut k = n;
        loop {
            if k == 0 {
                return false;
            }
            k -= 1;
            a[k] += 1;
            if a[k] <= h {
                break;
            }
            a[k] = -h;
        }
    }
}

fn crt_rational(residues: &[(u64, u64)]) -> Option<BigRational> {
    let mut n = BigInt::one();
    let mut x = BigInt::zero();
    for &(p, r) in residues {
        let pb = BigInt::from(p);
        // x + n*t ≡ r (mod p)
        let n_mod = (&n % &pb).to_u64().unwrap();
        let x_mod = (&x % &pb).to_u64().unwrap();
        let t = arith::mul_mod(arith::sub_mod(r, x_mod, p), arith::inv_mod(n_mod, p)?, p);
        x += &n * BigInt::from(t);
        n *= pb;
    }
    rational_reconstruction(&x, &n)
}

/// `r/s ≡ u (mod n)` with `|r|, s <= sqrt(n/2)`, if one exists.
pub fn rational_reconstruction(u: &BigInt, n: &BigInt) -> Option<BigRational> {
    let bound = (n / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (n.clone(), u.mod_floor(n));
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let s2 = &s0 - &q * &s1;
        (r0, r1) = (r1, r2);
        (s0, s1) = (s1, s2);
    }
    if s1.is_zero() || s1.abs() > bound || !r1.gcd(&s1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, s1))
}

/// Looks for an integer vector `A`, `0 < ‖A‖∞ <= m`, with `A·x` constant on
/// the curve. Evidence: points sampled over three primes; a relation must
/// hold at every sample. `Ok(None)` means none was found.
pub fn hyperplane_height_test(curve: &System, m: u64, cfg: &HeightTestConfig) -> Result<Option<HyperplaneRelation>> {
    if m > cfg.cap {
        return Err(Error::InvalidArgument(format!("height {m} exceeds the cap {}", cfg.cap)));
    }
    if m == 0 {
        return Ok(None);
    }
    let n = curve.nvars();
    let primes = cfg.primes.clone().unwrap_or_else(|| default_height_primes(n));
    if let Some(&bad) = primes.iter().find(|&&p| !arith::is_prime(p)) {
        return Err(Error::NotPrime(bad));
    }
    let want = (2 * curve.total_degree().max(1) as usize + 2).max(n + 2);
    let mut samples = Vec::with_capacity(primes.len());
    for &p in &primes {
        samples.push((p, sample_points(curve, p, want, cfg)?));
    }
    let diffs = |p: u64, pts: &[Vec<u64>]| -> Vec<Vec<u64>> {
        pts[1..].iter().map(|pt| pt.iter().zip(&pts[0]).map(|(&a, &b)| arith::sub_mod(a, b, p)).collect()).collect()
    };
    let matrices: Vec<(u64, Vec<Vec<u64>>)> = samples.iter().map(|(p, pts)| (*p, diffs(*p, pts))).collect();
    if matrices.iter().any(|(p, rows)| nullity_mod_p(rows, n, *p) == 0) {
        return Ok(None);
    }
    let mut found = None;
    for h in 1..=m as i64 {
        let hit = height_shell(n, h, |a| {
            let ok = matrices.iter().all(|(p, rows)| rows.iter().all(|row| dot_mod(a, row, *p) == 0));
            if ok {
                found = Some(a.to_vec());
            }
            ok
        });
        if hit {
            break;
        }
    }
    let Some(coeffs) = found else { return Ok(None) };
    let residues: Vec<(u64, u64)> = samples.iter().map(|(p, pts)| (*p, dot_mod(&coeffs, &pts[0], *p))).collect();
    let height = coeffs.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
    Ok(Some(HyperplaneRelation { constant: crt_rational(&residues), coeffs, height, residues, probabilistic: true }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxCountConfig {
    pub budget: u128,
    /// Run the hyperplane test with this height; `None` skips it.
    pub hyperplane_height: Option<u64>,
    pub height: HeightTestConfig,
}

impl Default for BoxCountConfig {
    fn default() -> Self {
        BoxCountConfig { budget: points::DEFAULT_BUDGET, hyperplane_height: Some(20), height: HeightTestConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxCount {
    pub p: u64,
    pub count: u64,
    pub declared_dim: u32,
    /// `count / p^dim`.
    pub fraction: f64,
    /// Product of the box side fractions.
    pub expected_fraction: f64,
    /// `p^dim · expected_fraction`.
    pub expected: f64,
    /// A low-height rational hyperplane containing the variety, if found;
    /// the heuristic count does not apply then.
    pub hyperplane: Option<HyperplaneRelation>,
}

impl BoxCount {
    pub fn hyperplane_contained(&self) -> bool {
        self.hyperplane.is_some()
    }
}

/// Number of points with every coordinate representative in the box.
pub fn box_count(
    system: &System,
    desc: &ExtFieldDesc,
    bounds: &[Range<u64>],
    declared_dim: u32,
    cfg: &BoxCountConfig,
) -> Result<BoxCount> {
    if desc.e() != 1 {
        return Err(Error::BoxRequiresPrimeField);
    }
    let p = desc.p();
    let count = points::count_points_prime(system, p, Some(bounds), cfg.budget)?;
    let scale = (p as f64).powi(declared_dim as i32);
    let expected_fraction: f64 = bounds.iter().map(|r| (r.end - r.start) as f64 / p as f64).product();
    let hyperplane = match cfg.hyperplane_height {
        Some(m) if system.nvars() >= 2 => hyperplane_height_test(system, m, &cfg.height)?,
        _ => None,
    };
    Ok(BoxCount {
        p,
        count,
        declared_dim,
        fraction: count as f64 / scale,
        expected_fraction,
        expected: scale * expected_fraction,
        hyperplane,
    })
}

//! Brute-force point enumeration for affine varieties over finite fields.
//!
//! The first `n - 1` coordinates are enumerated in lexicographic order; for
//! each prefix the last coordinate is found as the common roots of the
//! specialized univariate polynomials. The candidate budget is still charged
//! as `q^n`.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::field::{ExtFieldDesc, FieldOps, FqElem, PrimeField};
use crate::mpoly::{ReducedPoly, System};
use crate::upoly;

pub const DEFAULT_BUDGET: u128 = 1_000_000_000;

fn check_budget(q: u128, n: usize, budget: u128) -> Result<()> {
    let needed = q.checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, cap: budget });
    }
    Ok(())
}

fn full_ranges(p: u64, n: usize, bounds: Option<&[Range<u64>]>) -> Result<Vec<Range<u64>>> {
    match bounds {
        None => Ok(vec![0..p; n]),
        Some(b) => {
            if b.len() != n {
                return Err(Error::InvalidArgument(format!("box has {} ranges for {n} coordinates", b.len())));
            }
            for r in b {
                if r.start > r.end || r.end > p {
                    return Err(Error::InvalidArgument(format!("box range {}..{} outside 0..{p}", r.start, r.end)));
                }
            }
            Ok(b.to_vec())
        }
    }
}

/// Calls `visit` on every point of the system over `F_p` inside `bounds`,
/// in lexicographic order.
pub fn for_each_point_prime(
    polys: &[ReducedPoly],
    nvars: usize,
    p: u64,
    bounds: Option<&[Range<u64>]>,
    mut visit: impl FnMut(&[u64]),
) -> Result<()> {
    let ranges = full_ranges(p, nvars, bounds)?;
    if ranges.iter().any(|r| r.is_empty()) {
        return Ok(());
    }
    let last = nvars - 1;
    let mut point: Vec<u64> = ranges.iter().map(|r| r.start).collect();
    let mut specialized: Vec<Vec<u64>> = Vec::with_capacity(polys.len());
    loop {
        specialized.clear();
        specialized.extend(polys.iter().map(|f| f.specialize_last_prime(&point[..last])));
        let pivot = specialized.iter().position(|u| !u.is_empty());
        match pivot {
            None => {
                for v in ranges[last].clone() {
                    point[last] = v;
                    visit(&point);
                }
            }
            Some(i) => {
                for v in upoly::prime_distinct_roots(p, &specialized[i])? {
                    if !ranges[last].contains(&v) {
                        continue;
                    }
                    let ok = specialized.iter().skip(i + 1).all(|u| {
                        u.iter().rev().fold(0, |acc, &c| crate::arith::add_mod(crate::arith::mul_mod(acc, v, p), c, p)) == 0
                    });
                    if ok {
                        point[last] = v;
                        visit(&point);
                    }
                }
            }
        }
        // advance the prefix odometer, most significant coordinate first
        let mut k = last;
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            point[k] += 1;
            if point[k] < ranges[k].end {
                break;
            }
            point[k] = ranges[k].start;
        }
    }
}

/// All points of `system` over `F_p` (optionally inside a half-open box of
/// representatives), in lexicographic order.
pub fn enumerate_points_prime(
    system: &System,
    p: u64,
    bounds: Option<&[Range<u64>]>,
    budget: u128,
) -> Result<Vec<Vec<u64>>> {
    PrimeField::new(p)?;
    check_budget(p as u128, system.nvars(), budget)?;
    let polys = system.reduce(p)?;
    let mut out = Vec::new();
    for_each_point_prime(&polys, system.nvars(), p, bounds, |pt| out.push(pt.to_vec()))?;
    Ok(out)
}

/// Number of points of `system` over `F_p` inside `bounds`.
pub fn count_points_prime(system: &System, p: u64, bounds: Option<&[Range<u64>]>, budget: u128) -> Result<u64> {
    PrimeField::new(p)?;
    check_budget(p as u128, system.nvars(), budget)?;
    let polys = system.reduce(p)?;
    let nvars = system.nvars();
    let last_full = bounds.map_or(true, |b| b.last().is_some_and(|r| r.start == 0 && r.end == p));
    let nonzero: Vec<&ReducedPoly> = polys.iter().filter(|f| !f.is_zero()).collect();
    if nonzero.len() == 1 && last_full {
        // single equation: count roots in the last variable without extracting them
        let f = nonzero[0];
        let ranges = full_ranges(p, nvars, bounds)?;
        let mut total = 0u64;
        let last = nvars - 1;
        let mut prefix: Vec<u64> = ranges[..last].iter().map(|r| r.start).collect();
        if ranges[..last].iter().any(|r| r.is_empty()) {
            return Ok(0);
        }
        loop {
            let u = f.specialize_last_prime(&prefix);
            total += if u.is_empty() { p } else { upoly::prime_count_distinct_roots(p, &u)? as u64 };
            let mut k = last;
            loop {
                if k == 0 {
                    return Ok(total);
                }
                k -= 1;
                prefix[k] += 1;
                if prefix[k] < ranges[k].end {
                    break;
                }
                prefix[k] = ranges[k].start;
            }
        }
    }
    let mut count = 0u64;
    for_each_point_prime(&polys, nvars, p, bounds, |_| count += 1)?;
    Ok(count)
}

/// Points over an arbitrary finite field, in canonical lexicographic order.
pub fn enumerate_points_field<F: FieldOps>(system: &System, field: &F, budget: u128) -> Result<Vec<Vec<F::Elem>>> {
    let q = field.order().unwrap_or(u128::MAX);
    check_budget(q, system.nvars(), budget)?;
    let polys = system.reduce(field.characteristic())?;
    let n = system.nvars();
    let last = n - 1;
    let mut out = Vec::new();
    let mut idx = vec![0u128; last];
    loop {
        let prefix: Vec<F::Elem> = idx.iter().map(|&i| field.element_at(i)).collect();
        let specialized: Vec<Vec<F::Elem>> = polys.iter().map(|f| f.specialize_last(field, &prefix)).collect();
        let candidates: Vec<F::Elem> = match specialized.iter().position(|u| !u.is_empty()) {
            None => field.elements().collect(),
            Some(i) => upoly::distinct_roots(field, &specialized[i], 0)?
                .into_iter()
                .filter(|v| specialized[i + 1..].iter().all(|u| field.is_zero(&upoly::eval(field, u, v))))
                .collect(),
        };
        for v in candidates {
            let mut pt = prefix.clone();
            pt.push(v);
            out.push(pt);
        }
        let mut k = last;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < q {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Common zeros of `system` in `F_q^n`. A box is only meaningful over a
/// prime field, where it restricts representatives to half-open ranges.
pub fn enumerate_points(
    system: &System,
    desc: &ExtFieldDesc,
    bounds: Option<&[Range<u64>]>,
    budget: u128,
) -> Result<Vec<Vec<FqElem>>> {
    if desc.e() == 1 {
        let pts = enumerate_points_prime(system, desc.p(), bounds, budget)?;
        return Ok(pts.into_iter().map(|pt| pt.into_iter().map(|v| desc.from_residue(v)).collect()).collect());
    }
    if bounds.is_some() {
        return Err(Error::BoxRequiresPrimeField);
    }
    enumerate_points_field(system, desc, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_extension;
    use crate::mpoly::MPoly;
    use num::BigRational;

    fn xy() -> (MPoly, MPoly) {
        (MPoly::var(2, 0), MPoly::var(2, 1))
    }

    fn brute(system: &System, p: u64) -> Vec<Vec<u64>> {
        let polys = system.reduce(p).unwrap();
        let n = system.nvars();
        let total = p.pow(n as u32);
        (0..total)
            .map(|mut i| {
                let mut pt = vec![0; n];
                for slot in pt.iter_mut().rev() {
                    *slot = i % p;
                    i /= p;
                }
                pt
            })
            .filter(|pt| polys.iter().all(|f| f.eval_prime(pt) == 0))
            .collect()
    }

    #[test]
    fn graph_of_squaring_has_p_points() {
        let (x, y) = xy();
        let sys = System::new(2, vec![y.sub(&x.pow(2))]).unwrap();
        let f5 = build_extension(5, 1).unwrap();
        assert_eq!(enumerate_points(&sys, &f5, None, DEFAULT_BUDGET).unwrap().len(), 5);
    }

    #[test]
    fn unit_circle_over_f3() {
        let (x, y) = xy();
        let one = MPoly::constant(2, BigRational::from_integer(1.into()));
        let sys = System::new(2, vec![x.pow(2).add(&y.pow(2)).sub(&one)]).unwrap();
        let pts = enumerate_points_prime(&sys, 3, None, DEFAULT_BUDGET).unwrap();
        assert_eq!(pts, vec![vec![0, 1], vec![0, 2], vec![1, 0], vec![2, 0]]);
        assert_eq!(pts, brute(&sys, 3));
    }

    #[test]
    fn empty_system_is_whole_space() {
        let sys = System::affine_space(1);
        let f7 = build_extension(7, 1).unwrap();
        assert_eq!(enumerate_points(&sys, &f7, None, DEFAULT_BUDGET).unwrap().len(), 7);
    }

    #[test]
    fn matches_brute_force_and_counts() {
        let (x, y) = xy();
        let systems = vec![
            System::new(2, vec![y.pow(2).sub(&x.pow(3)).sub(&x)]).unwrap(),
            System::new(2, vec![x.mul(&y).sub(&MPoly::constant(2, BigRational::from_integer(1.into())))]).unwrap(),
            System::new(2, vec![x.pow(3).sub(&y.pow(3)), x.sub(&y)]).unwrap(),
            System::new(2, vec![x.clone()]).unwrap(),
            System::new(2, vec![y.pow(4).add(&x.pow(2)).mul(&x)]).unwrap(),
        ];
        for sys in &systems {
            for &p in &[2u64, 3, 5, 7, 13, 31] {
                let expect = brute(sys, p);
                assert_eq!(enumerate_points_prime(sys, p, None, DEFAULT_BUDGET).unwrap(), expect);
                assert_eq!(count_points_prime(sys, p, None, DEFAULT_BUDGET).unwrap(), expect.len() as u64);
                let b = [0..p / 2 + 1, 1..p];
                let in_box = expect.iter().filter(|pt| b[0].contains(&pt[0]) && b[1].contains(&pt[1])).count();
                assert_eq!(count_points_prime(sys, p, Some(&b), DEFAULT_BUDGET).unwrap(), in_box as u64);
            }
        }
    }

    #[test]
    fn budget_and_box_errors() {
        let sys = System::affine_space(3);
        assert!(matches!(
            enumerate_points_prime(&sys, 101, None, 1000),
            Err(Error::BudgetExceeded { cap: 1000, .. })
        ));
        let f9 = build_extension(3, 2).unwrap();
        let b = [0..2];
        assert_eq!(
            enumerate_points(&System::affine_space(1), &f9, Some(&b), DEFAULT_BUDGET),
            Err(Error::BoxRequiresPrimeField)
        );
    }

    #[test]
    fn extension_field_points() {
        // x^2 + 1 = 0 has two points over F_9 and none over F_3
        let x = MPoly::var(1, 0);
        let sys = System::new(1, vec![x.pow(2).add(&MPoly::constant(1, BigRational::from_integer(1.into())))]).unwrap();
        let f9 = build_extension(3, 2).unwrap();
        let pts = enumerate_points(&sys, &f9, None, DEFAULT_BUDGET).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(enumerate_points_prime(&sys, 3, None, DEFAULT_BUDGET).unwrap().is_empty());
    }
}

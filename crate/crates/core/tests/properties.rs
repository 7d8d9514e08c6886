use fieldpsi::character::{angle_to_complex, Angle, CharacterDesc};
use fieldpsi::dfi;
use fieldpsi::field::{build_extension, fq_trace, FieldOps};
use fieldpsi::measure::{fourier_table, ValueTable, FOURIER_BUDGET};
use fieldpsi::numfield::{basis_in_terms_of_inputs, lattice_basis, nf_build, NFElem};
use fieldpsi::stats;
use fieldpsi::upoly;
use num::{BigInt, BigRational};
use proptest::prelude::*;

const SMALL: [(u64, usize); 8] = [(2, 1), (2, 3), (3, 2), (5, 1), (5, 2), (7, 2), (13, 1), (2, 4)];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(k in 0..SMALL.len(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (p, e) = SMALL[k];
        let f = build_extension(p, e).unwrap();
        let q = f.order().unwrap();
        let [x, y, z] = [a, b, c].map(|v| f.element_at(v as u128 % q));
        prop_assert_eq!(f.add(&x, &y), f.add(&y, &x));
        prop_assert_eq!(f.mul(&f.mul(&x, &y), &z), f.mul(&x, &f.mul(&y, &z)));
        prop_assert_eq!(f.mul(&x, &f.add(&y, &z)), f.add(&f.mul(&x, &y), &f.mul(&x, &z)));
        prop_assert_eq!(f.sub(&f.add(&x, &y), &y), x.clone());
        if let Some(inv) = f.inv(&x) {
            prop_assert_eq!(f.mul(&x, &inv), f.one());
        } else {
            prop_assert!(f.is_zero(&x));
        }
        // Fermat: x^q = x
        prop_assert_eq!(f.pow(&x, q), x);
    }

    #[test]
    fn trace_and_character_are_additive(k in 0..SMALL.len(), a in any::<u64>(), b in any::<u64>()) {
        let (p, e) = SMALL[k];
        let f = build_extension(p, e).unwrap();
        let q = f.order().unwrap();
        let (x, y) = (f.element_at(a as u128 % q), f.element_at(b as u128 % q));
        prop_assert_eq!(fq_trace(&f.add(&x, &y), &f), (fq_trace(&x, &f) + fq_trace(&y, &f)) % p);
        prop_assert_eq!(fq_trace(&f.frobenius(&x), &f), fq_trace(&x, &f));
        let chr = CharacterDesc::standard(f.clone());
        prop_assert_eq!(chr.psi(&f.add(&x, &y)), chr.psi(&x) + chr.psi(&y));
    }

    #[test]
    fn roots_match_exhaustive_scan(k in 0..SMALL.len(), coeffs in prop::collection::vec(any::<u64>(), 2..6)) {
        let (p, e) = SMALL[k];
        let f = build_extension(p, e).unwrap();
        let q = f.order().unwrap();
        let mut poly: Vec<_> = coeffs.iter().map(|&c| f.element_at(c as u128 % q)).collect();
        *poly.last_mut().unwrap() = f.one();
        let got = upoly::distinct_roots(&f, &poly, 7).unwrap();
        let expect: Vec<_> = f.elements().filter(|x| f.is_zero(&upoly::eval(&f, &poly, x))).collect();
        prop_assert_eq!(got, expect);
    }

    #[test]
    fn angle_arithmetic(a in 0u64..1000, b in 0u64..1000, den in 1u64..1000, k in -50i64..50) {
        let (x, y) = (Angle::new(a, den), Angle::new(b, den));
        prop_assert_eq!(x + y - y, x);
        prop_assert_eq!((x + y).scale(k), x.scale(k) + y.scale(k));
        prop_assert_eq!(angle_to_complex(-x), angle_to_complex(x).conj());
        let (num, d) = x.circle_distance(&y);
        prop_assert!(2 * num <= d);
    }

    #[test]
    fn ks_statistic_bounds(v in prop::collection::vec(0.0f64..1.0, 1..200)) {
        let d = stats::ks_statistic(&v).unwrap();
        prop_assert!((1.0 / (2.0 * v.len() as f64) - 1e-12..=1.0).contains(&d));
        let mut rev = v.clone();
        rev.reverse();
        prop_assert_eq!(stats::ks_statistic(&rev).unwrap(), d);
    }

    #[test]
    fn sp_law(n in 1u64..40, xlimit in 2u64..3000) {
        let r = dfi::sp_check(n, xlimit).unwrap();
        prop_assert!(r.all_hold);
        for rec in &r.records {
            prop_assert_eq!(rec.distance, dfi::sp_expected(n, rec.p));
        }
    }

    #[test]
    fn plancherel_and_inversion(pi in 0usize..4, n in 1usize..3, seed in any::<u64>()) {
        let p = [2u64, 3, 5, 11][pi];
        let phi = ValueTable::random(p, n, seed).unwrap();
        let f = fourier_table(&phi, FOURIER_BUDGET).unwrap();
        let lhs: f64 = f.entries().iter().map(|z| z.norm_sqr()).sum();
        let rhs: f64 = phi.entries().iter().map(|z| z.norm_sqr()).sum::<f64>() / (p as f64).powi(n as i32);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.max(1.0));
        let ff = fourier_table(&f, FOURIER_BUDGET).unwrap();
        let scale = (p as f64).powi(-(n as i32));
        for i in 0..ff.entries().len() {
            let z = ff.point_of(i);
            let neg: Vec<u64> = z.iter().map(|&v| (p - v) % p).collect();
            prop_assert!((ff.entries()[i] - phi.get(&neg) * scale).norm() <= 1e-9);
        }
    }

    #[test]
    fn lattice_round_trip(field in 0usize..3, rows in prop::collection::vec(prop::collection::vec(-30i64..30, 3), 1..5), den in 1i64..7) {
        let f: Vec<BigInt> = [vec![0, 1], vec![-2, 0, 1], vec![-2, 0, 0, 1]][field].iter().map(|&c| BigInt::from(c)).collect();
        let nf = nf_build(&f).unwrap();
        let elems: Vec<NFElem> = rows
            .iter()
            .map(|r| NFElem::new(&nf, r[..nf.degree()].iter().map(|&c| BigRational::new(c.into(), den.into())).collect()).unwrap())
            .collect();
        let lb = lattice_basis(&elems).unwrap();
        for (e, coords) in elems.iter().zip(&lb.expression) {
            let mut acc = NFElem::from_rational(&nf, BigRational::from_integer(0.into()));
            for (b, c) in lb.basis.iter().zip(coords) {
                acc = acc.add(&b.scale(&BigRational::from_integer(c.clone())));
            }
            prop_assert_eq!(&acc, e);
        }
        prop_assert!(basis_in_terms_of_inputs(&elems, &lb.basis).is_some());
    }
}

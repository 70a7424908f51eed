use birkhoff_core::{eigen_data, mat_pow, BigRat, IntMat2, Interval, QuadExt};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn hyperbolic() -> Vec<IntMat2> {
    vec![
        IntMat2::new(2, 1, 1, 1),
        IntMat2::new(1, 1, 1, 0),
        IntMat2::new(3, 1, 2, 1),
        IntMat2::new(2, 1, 3, 2),
        IntMat2::new(5, 2, 2, 1),
        IntMat2::new(0, 1, 1, 3),
        IntMat2::new(-2, 1, 1, -1),
    ]
}

fn rat() -> impl Strategy<Value = BigRat> {
    (-50i64..50, 1i64..30).prop_map(|(n, d)| BigRat::new(n.into(), d.into()))
}

fn quad(d: u64) -> impl Strategy<Value = QuadExt> {
    (rat(), rat()).prop_map(move |(a, b)| QuadExt::new(a, b, d))
}

fn field() -> impl Strategy<Value = (QuadExt, QuadExt, QuadExt)> {
    prop::sample::select(vec![2u64, 3, 5, 13, 21])
        .prop_flat_map(|d| (quad(d), quad(d), quad(d)))
}

proptest! {
    #[test]
    fn field_axioms((x, y, z) in field()) {
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x * &y, &y * &x);
        if !x.is_zero() {
            let inv = x.checked_inv().unwrap();
            prop_assert_eq!(&x * &inv, QuadExt::one());
        } else {
            prop_assert!(x.checked_inv().is_none());
        }
    }

    #[test]
    fn conjugate_product_is_the_norm(a in rat(), b in rat(), d in prop::sample::select(vec![2u64, 5, 7, 10])) {
        let x = QuadExt::new(a.clone(), b.clone(), d);
        let prod = &x * &x.conjugate();
        prop_assert!(prod.irr_part().is_zero());
        prop_assert_eq!(prod.rat_part(), &(&a * &a - BigRat::from_integer(d.into()) * &b * &b));
        prop_assert_eq!(x.norm(), prod.rat_part().clone());
    }

    #[test]
    fn powers_add(i in 0usize..7, m in -20i64..=20, n in -20i64..=20) {
        let a = &hyperbolic()[i];
        let lhs = mat_pow(a, m).unwrap() * mat_pow(a, n).unwrap();
        prop_assert_eq!(lhs, mat_pow(a, m + n).unwrap());
    }

    #[test]
    fn enclosure_shrinks_with_precision(x in quad(5), p in 8u32..200) {
        let coarse = x.enclose(p);
        let fine = x.enclose(2 * p);
        prop_assert!(fine.subset_of(&coarse));
        // the exact value sits on the right side of every rational bracket
        prop_assert!((&x - &QuadExt::rational(fine.lo_rational())).signum() >= 0);
        prop_assert!((&x - &QuadExt::rational(fine.hi_rational())).signum() <= 0);
    }

    #[test]
    fn interval_ops_contain_exact_results(a in rat(), b in rat(), p in 4u32..100) {
        let (ia, ib) = (Interval::from_rational(&a, p), Interval::from_rational(&b, p));
        prop_assert!((&ia + &ib).contains_rational(&(&a + &b)));
        prop_assert!((&ia - &ib).contains_rational(&(&a - &b)));
        prop_assert!((&ia * &ib).contains_rational(&(&a * &b)));
        if !ib.contains_zero() {
            prop_assert!(ia.checked_div(&ib).unwrap().contains_rational(&(&a / &b)));
        }
    }
}

#[test]
fn eigen_residuals_vanish_exactly() {
    for a in hyperbolic() {
        let e = eigen_data(&a).unwrap();
        for (lam, v) in [(&e.lambda_u, &e.v_u), (&e.lambda_s, &e.v_s)] {
            let av = a.apply(v);
            assert!((&av[0] - &(lam * &v[0])).is_zero(), "{}", a);
            assert!((&av[1] - &(lam * &v[1])).is_zero(), "{}", a);
        }
        assert!(e.lambda < 1.0 && e.lambda_u_lo > 1.0);
    }
}

#[test]
fn sqrt5_matches_bisection() {
    // bisection on x^2 = 5 over rationals, 100 steps
    let (mut lo, mut hi) = (BigRat::from_integer(2.into()), BigRat::from_integer(3.into()));
    let five = BigRat::from_integer(5.into());
    for _ in 0..100 {
        let mid = (&lo + &hi) / BigRat::from_integer(2.into());
        if &mid * &mid < five {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = QuadExt::new(BigRat::zero(), BigRat::one(), 5).enclose(90);
    assert!(s.lo_rational() <= hi && s.hi_rational() >= lo);
    assert!(s.width_f64() < 1e-25);
}

#[test]
fn non_hyperbolic_matrices_are_rejected() {
    assert!(eigen_data(&IntMat2::new(1, 1, 0, 1)).is_err());
    assert!(eigen_data(&IntMat2::new(0, -1, 1, 0)).is_err());
    assert!(eigen_data(&IntMat2::new(2, 0, 0, 3)).is_err());
}

use std::collections::BTreeSet;

use birkhoff_core::torus::{apply, enumerate_periodic, fixed_point_count, minimal_period, TorusPoint};
use birkhoff_core::{mat_pow, IntMat2};
use num_traits::Signed;

fn matrices() -> Vec<IntMat2> {
    vec![
        IntMat2::new(2, 1, 1, 1),
        IntMat2::new(1, 1, 1, 0),
        IntMat2::new(3, 1, 2, 1),
        IntMat2::new(0, 1, 1, 3),
        IntMat2::new(-2, 1, 1, -1),
    ]
}

#[test]
fn counts_match_the_determinant() {
    for a in matrices() {
        for n in 1..=6u64 {
            let set = enumerate_periodic(&a, n, 1_000_000).unwrap();
            let expect = (mat_pow(&a, n as i64).unwrap().sub_identity().det()).abs();
            assert_eq!(num_bigint::BigInt::from(set.point_count()), expect, "{} n={}", a, n);
            assert_eq!(fixed_point_count(&a, n as u32), expect);
        }
    }
}

#[test]
fn points_are_periodic_and_permuted() {
    for a in matrices() {
        for n in 1..=5u64 {
            let set = enumerate_periodic(&a, n, 1_000_000).unwrap();
            let pts: BTreeSet<TorusPoint> = set.points().cloned().collect();
            assert_eq!(pts.len() as u64, set.point_count());
            let m = mat_pow(&a, n as i64).unwrap().sub_identity();
            for p in &pts {
                let r = p.to_rationals().unwrap();
                let w = m.apply_rat(&r);
                assert!(w[0].is_integer() && w[1].is_integer());
                assert_eq!(n % minimal_period(&a, p, n).unwrap(), 0);
            }
            let image: BTreeSet<TorusPoint> = pts.iter().map(|p| apply(&a, p)).collect();
            assert_eq!(image, pts);
        }
    }
}

#[test]
fn brute_force_grid_agrees() {
    // every fixed point of A^n - I has denominator dividing |det(A^n - I)|
    let a = IntMat2::new(2, 1, 1, 1);
    for n in 1..=4u64 {
        let m = mat_pow(&a, n as i64).unwrap().sub_identity();
        let d: i64 = m.det().abs().try_into().unwrap();
        let mut brute = BTreeSet::new();
        for i in 0..d {
            for j in 0..d {
                let p = TorusPoint::from_fractions(i, d, j, d);
                let w = m.apply_rat(&p.to_rationals().unwrap());
                if w[0].is_integer() && w[1].is_integer() {
                    brute.insert(p);
                }
            }
        }
        let set = enumerate_periodic(&a, n, 1_000_000).unwrap();
        let ours: BTreeSet<TorusPoint> = set.points().cloned().collect();
        assert_eq!(ours, brute, "n = {}", n);
    }
}

#[test]
fn enumeration_respects_the_cap() {
    let a = IntMat2::new(2, 1, 1, 1);
    assert!(enumerate_periodic(&a, 12, 1000).is_err());
}

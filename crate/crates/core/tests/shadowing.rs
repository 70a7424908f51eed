use birkhoff_core::heteroclinic::{hetero_pair, HeteroclinicPair};
use birkhoff_core::shadowing::{build_pseudo_orbit, is_periodic, shadow_periodic, verify_shadow, within_segments_exact};
use birkhoff_core::torus::{PeriodicPoint, System, TorusPoint};
use birkhoff_core::{Error, Interval};
use rand::{Rng, SeedableRng};

fn golden_pair(sys: &System) -> HeteroclinicPair {
    let p = PeriodicPoint::new(&sys.matrix, TorusPoint::from_fractions(2, 5, 4, 5), 10).unwrap();
    let q = PeriodicPoint::new(&sys.matrix, TorusPoint::from_fractions(1, 5, 2, 5), 10).unwrap();
    hetero_pair(sys, &p, &q, 2).unwrap()
}

#[test]
fn random_pseudo_orbits_shadow_exactly() {
    let sys = System::cat_map();
    let pair = golden_pair(&sys);
    let mut rng = rand::rngs::StdRng::seed_from_u64(3);
    for _ in 0..10 {
        let lengths = [0; 4].map(|_| 2 * rng.gen_range(4u64..=32));
        let po = build_pseudo_orbit(&sys, &pair, lengths).unwrap();
        assert!(within_segments_exact(&sys, &po));
        assert!(po.seams.iter().filter(|s| !s.is_zero()).count() <= 3);
        let cert = shadow_periodic(&sys, &po, 128).unwrap();
        assert!(cert.z.point().is_rational() && cert.z_start.is_rational());
        assert!(is_periodic(&sys.matrix, &cert.z_start, po.total_len()).unwrap());
        let bound = &Interval::from_f64(cert.mu) * &po.delta;
        assert!(cert.max_dist.hi_rational() <= bound.hi_rational());
        let replay = verify_shadow(&sys, &cert, &po, 256).unwrap();
        assert!(replay.intersects(&cert.max_dist));
    }
}

#[test]
fn lengths_must_be_period_multiples() {
    let sys = System::cat_map();
    let pair = golden_pair(&sys);
    assert!(matches!(build_pseudo_orbit(&sys, &pair, [3, 4, 4, 4]), Err(Error::BadMultiples)));
    assert!(matches!(build_pseudo_orbit(&sys, &pair, [0, 4, 4, 4]), Err(Error::BadMultiples)));
    assert!(matches!(build_pseudo_orbit(&sys, &pair, [4000, 4, 4, 4000]), Err(Error::LengthCapExceeded(_))));
}

#[test]
fn true_orbits_need_no_correction() {
    let sys = System::cat_map();
    for (a, b, c, d) in [(0, 1, 0, 1), (1, 5, 2, 5), (1, 2, 0, 1)] {
        let p = PeriodicPoint::new(&sys.matrix, TorusPoint::from_fractions(a, b, c, d), 10).unwrap();
        let per = p.min_period();
        let pair = HeteroclinicPair::degenerate(&sys, &p);
        let po = build_pseudo_orbit(&sys, &pair, [per, 2 * per, per, 3 * per]).unwrap();
        assert!(po.seams.iter().all(|s| s.is_zero()));
        let cert = shadow_periodic(&sys, &po, 128).unwrap();
        assert!(cert.correction.iter().all(|c| c.is_zero()));
        assert!(cert.max_dist.is_zero());
        assert!(cert.z.same_orbit(&p));
    }
}

#[test]
fn seam_errors_decay_with_length() {
    let sys = System::cat_map();
    let pair = golden_pair(&sys);
    let d: Vec<f64> = [8u64, 16, 32]
        .iter()
        .map(|&l| {
            let po = build_pseudo_orbit(&sys, &pair, [l; 4]).unwrap();
            assert!(po.delta.hi_rational() <= po.delta_bound.hi_rational());
            po.delta.hi_f64()
        })
        .collect();
    assert!(d[1] < d[0] * 1e-3 && d[2] < d[1] * 1e-3, "{:?}", d);
}

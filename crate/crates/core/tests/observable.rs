use birkhoff_core::observable::{birkhoff_sum, eval, holder_constant, TrigPolynomial};
use birkhoff_core::torus::{enumerate_periodic, torus_distance, System, TorusPoint};
use birkhoff_core::BigRat;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};

fn r(n: i64, d: i64) -> BigRat {
    BigRat::new(n.into(), d.into())
}

fn random_poly(rng: &mut impl Rng, terms: usize) -> TrigPolynomial {
    let mut p = TrigPolynomial::zero();
    for _ in 0..terms {
        let k = [rng.gen_range(-2i64..=2).into(), rng.gen_range(-2i64..=2).into()];
        let c = r(rng.gen_range(-9..=9), rng.gen_range(1..=10));
        if rng.gen_bool(0.5) {
            p.add_cos(k, c);
        } else {
            p.add_sin(k, c);
        }
    }
    p
}

#[test]
fn sums_ignore_the_starting_point() {
    let sys = System::cat_map();
    let phi: TrigPolynomial = "cos 1 0 1; sin 1 2 1/3".parse().unwrap();
    for orbit in enumerate_periodic(&sys.matrix, 5, 10_000).unwrap().primitive() {
        let base = birkhoff_sum(&phi, orbit, 128).interval;
        for k in 1..orbit.min_period() as usize {
            assert!(birkhoff_sum(&phi, &orbit.shifted(k), 128).interval.intersects(&base));
        }
    }
}

#[test]
fn coboundaries_sum_to_the_constant() {
    let sys = System::cat_map();
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for _ in 0..5 {
        let psi = random_poly(&mut rng, 3);
        let c = r(rng.gen_range(-5..=5), rng.gen_range(1..=4));
        let phi = psi.compose(&sys.matrix).sub(&psi).add(&TrigPolynomial::constant(c.clone()));
        for n in 1..=4u64 {
            for orbit in enumerate_periodic(&sys.matrix, n, 10_000).unwrap().primitive() {
                let s = birkhoff_sum(&phi, orbit, 128).interval;
                assert!(s.contains_rational(&(&c * BigRat::from_integer(n.into()))));
                assert!(s.width_f64() < 1e-20);
            }
        }
    }
}

#[test]
fn lipschitz_bound_holds_on_random_pairs() {
    let phi: TrigPolynomial = "cos 1 0 1; sin 2 -1 1/2; cos 0 3 -1/4".parse().unwrap();
    let c = holder_constant(&phi).c;
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    for _ in 0..10_000 {
        let mut pt = || TorusPoint::from_fractions(rng.gen_range(0..10_000), 10_000, rng.gen_range(0..10_000), 10_000);
        let (x, y) = (pt(), pt());
        let diff = (&eval(&phi, &x, 64) - &eval(&phi, &y, 64)).abs();
        let d = torus_distance(&x, &y, 64);
        assert!(diff.lo_f64() <= c * d.hi_f64() * (1.0 + 1e-12) + 1e-15);
    }
}

#[test]
fn doubling_precision_halves_widths() {
    let phi: TrigPolynomial = "cos 1 0 1; sin 1 1 2/3".parse().unwrap();
    let pt = TorusPoint::from_fractions(3, 7, 5, 11);
    for p in [32u32, 64, 128, 256] {
        let w1 = eval(&phi, &pt, p).width_f64();
        let w2 = eval(&phi, &pt, 2 * p).width_f64();
        assert!(w2 <= w1 / 2.0, "{} -> {} at {}", w1, w2, p);
    }
}

#[test]
fn cosine_matches_float_oracle() {
    let sys = System::cat_map();
    let phi = TrigPolynomial::cos(1, 0, r(1, 1));
    for orbit in enumerate_periodic(&sys.matrix, 6, 10_000).unwrap().primitive() {
        let s = birkhoff_sum(&phi, orbit, 128).interval;
        let f: f64 = orbit
            .orbit()
            .iter()
            .map(|p| (2.0 * std::f64::consts::PI * p.to_rationals().unwrap()[0].to_f64().unwrap()).cos())
            .sum();
        assert!((s.mid_f64() - f).abs() < 1e-12);
    }
}

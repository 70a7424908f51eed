use birkhoff_core::algebra::{int_vec, vec_add};
use birkhoff_core::heteroclinic::{hetero_pair, invariant_line, Stability};
use birkhoff_core::torus::{PeriodicPoint, System, TorusPoint};
use birkhoff_core::IntMat2;

fn anchors(sys: &System) -> Vec<PeriodicPoint> {
    [(0, 1, 0, 1), (1, 5, 2, 5), (2, 5, 4, 5), (1, 2, 0, 1)]
        .iter()
        .map(|&(a, b, c, d)| PeriodicPoint::new(&sys.matrix, TorusPoint::from_fractions(a, b, c, d), 50).unwrap())
        .collect()
}

#[test]
fn intersections_lie_on_both_lines_exactly() {
    for sys in [System::cat_map(), System::new(IntMat2::new(3, 1, 2, 1)).unwrap()] {
        let pts = anchors(&sys);
        for p in &pts {
            for q in &pts {
                let pair = hetero_pair(&sys, p, q, 2).unwrap();
                for (x, s, u) in [(&pair.x, p, q), (&pair.y, q, p)] {
                    let stable = invariant_line(&sys, s, Stability::Stable);
                    let unstable = invariant_line(&sys, u, Stability::Unstable);
                    let lhs = stable.at(&x.t).x;
                    let t = int_vec(&x.translate);
                    let rhs = vec_add(&unstable.at(&x.u).x, &t);
                    assert_eq!(lhs, rhs);
                    assert_eq!(lhs, x.lifted.x);
                }
            }
        }
    }
}

#[test]
fn stable_offsets_contract_exactly() {
    let sys = System::cat_map();
    for p in anchors(&sys) {
        let q = &anchors(&sys)[1];
        let pair = hetero_pair(&sys, &p, q, 2).unwrap();
        let line = invariant_line(&sys, &p, Stability::Stable);
        let per = p.min_period() as u32;
        let offset = |pt: &[birkhoff_core::QuadExt; 2]| {
            [&pt[0] - &line.base.x[0], &pt[1] - &line.base.x[1]]
        };
        let a = sys.matrix.pow(per);
        let moved = offset(&a.apply(&pair.x.lifted.x));
        let before = offset(&pair.x.lifted.x);
        // the anchor is fixed by A^per, so the offset scales by lambda_s^per
        let shift = offset(&a.apply(&line.base.x));
        let lam = sys.eigen.lambda_s.pow(per);
        assert_eq!(&moved[0] - &shift[0], &lam * &before[0]);
        assert_eq!(&moved[1] - &shift[1], &lam * &before[1]);
    }
}

#[test]
fn delta0_weakly_decreases_with_radius() {
    let sys = System::cat_map();
    let pts = anchors(&sys);
    for p in &pts {
        for q in &pts {
            let d: Vec<f64> = (1..=3).map(|r| hetero_pair(&sys, p, q, r).unwrap().delta0).collect();
            assert!(d[1] <= d[0] && d[2] <= d[1], "{:?}", d);
        }
    }
}

//! Stable and unstable lines through periodic points and their exact
//! intersections.

use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::algebra::{dot, mat_pow, solve2, vec_add, vec_scale, Interval, QuadExt};
use crate::torus::{lifted_distance, torus_distance, LiftedPoint, PeriodicPoint, System, TorusPoint};
use crate::{Error, Result};

/// Search radius for integer translates when looking for intersections.
pub const DEFAULT_SEARCH_RADIUS: u32 = 2;

const DIST_PREC: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
}

/// `base + s * direction` for real `s`.
#[derive(Clone, Debug)]
pub struct InvariantLine {
    pub base: LiftedPoint,
    pub direction: [QuadExt; 2],
    pub stability: Stability,
}

impl InvariantLine {
    pub fn at(&self, s: &QuadExt) -> LiftedPoint {
        LiftedPoint {
            x: vec_add(&self.base.x, &vec_scale(&self.direction, s)),
        }
    }
}

/// Line through the canonical lift of `p` along the stable or unstable direction.
pub fn invariant_line(sys: &System, p: &PeriodicPoint, which: Stability) -> InvariantLine {
    let direction = match which {
        Stability::Stable => sys.eigen.v_s.clone(),
        Stability::Unstable => sys.eigen.v_u.clone(),
    };
    InvariantLine {
        base: p.point().lift(),
        direction,
        stability: which,
    }
}

/// `stable.at(t) = unstable.at(u) + translate`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Intersection {
    pub point: TorusPoint,
    /// The lift on the stable line.
    pub lifted: LiftedPoint,
    pub t: QuadExt,
    pub u: QuadExt,
    pub translate: [BigInt; 2],
    /// `|t v_s|^2`, the squared offset from the stable line's base.
    pub stable_offset_sq: QuadExt,
    /// `|u v_u|^2`, the squared offset from the unstable line's base.
    pub unstable_offset_sq: QuadExt,
}

impl Intersection {
    pub fn max_offset_sq(&self) -> &QuadExt {
        if self.stable_offset_sq >= self.unstable_offset_sq {
            &self.stable_offset_sq
        } else {
            &self.unstable_offset_sq
        }
    }

    /// Upper bound on the larger of the two line offsets.
    pub fn max_offset_hi(&self) -> f64 {
        self.max_offset_sq().enclose_relative(40).sqrt().hi_f64()
    }
}

/// All intersections of the stable line with integer translates (sup-norm at
/// most `search_radius`) of the unstable line, nearest first.
pub fn intersect_lines(stable: &InvariantLine, unstable: &InvariantLine, search_radius: u32) -> Vec<Intersection> {
    let vs = &stable.direction;
    let vu = &unstable.direction;
    let m = [[vs[0].clone(), -&vu[0]], [vs[1].clone(), -&vu[1]]];
    let vs2 = dot(vs, vs);
    let vu2 = dot(vu, vu);
    let r = search_radius as i64;
    let mut out: Vec<Intersection> = Vec::new();
    for i in -r..=r {
        for j in -r..=r {
            let shift = [QuadExt::from_int(i), QuadExt::from_int(j)];
            let target = vec_add(&unstable.base.x, &shift);
            let rhs = [&target[0] - &stable.base.x[0], &target[1] - &stable.base.x[1]];
            let Some([t, u]) = solve2(&m, &rhs) else { continue };
            let lifted = stable.at(&t);
            let point = lifted.project();
            let stable_offset_sq = &(&t * &t) * &vs2;
            let unstable_offset_sq = &(&u * &u) * &vu2;
            out.push(Intersection {
                point,
                lifted,
                t,
                u,
                translate: [BigInt::from(i), BigInt::from(j)],
                stable_offset_sq,
                unstable_offset_sq,
            });
        }
    }
    out.sort_by(|a, b| {
        a.max_offset_sq()
            .cmp(b.max_offset_sq())
            .then_with(|| a.t.cmp(&b.t))
            .then_with(|| a.u.cmp(&b.u))
    });
    out.dedup_by(|a, b| a.point == b.point);
    out
}

/// `x` in `W^s(p) & W^u(q)` and `y` in `W^s(q) & W^u(p)`.
#[derive(Clone, Debug)]
pub struct HeteroclinicPair {
    pub p: PeriodicPoint,
    pub q: PeriodicPoint,
    pub x: Intersection,
    pub y: Intersection,
    /// Upper bound on every line offset of `x` and `y`, hence on their
    /// distances to `p` and `q`.
    pub delta0: f64,
    pub h: f64,
    pub lam: f64,
}

impl HeteroclinicPair {
    /// The zero-size pair `x = y = p = q` for a periodic point `p`.
    pub fn degenerate(sys: &System, p: &PeriodicPoint) -> Self {
        let trivial = Intersection {
            point: p.point().clone(),
            lifted: p.point().lift(),
            t: QuadExt::zero(),
            u: QuadExt::zero(),
            translate: [BigInt::from(0), BigInt::from(0)],
            stable_offset_sq: QuadExt::zero(),
            unstable_offset_sq: QuadExt::zero(),
        };
        HeteroclinicPair {
            p: p.clone(),
            q: p.clone(),
            x: trivial.clone(),
            y: trivial,
            delta0: 0.0,
            h: sys.eigen.basis_cond,
            lam: sys.eigen.lambda,
        }
    }

    pub fn x(&self) -> &TorusPoint {
        &self.x.point
    }

    pub fn y(&self) -> &TorusPoint {
        &self.y.point
    }
}

fn nearest_transverse(stable: &InvariantLine, unstable: &InvariantLine, radius: u32) -> Result<Intersection> {
    intersect_lines(stable, unstable, radius)
        .into_iter()
        .find(|i| !i.t.is_zero() && !i.u.is_zero())
        .ok_or_else(|| Error::InvalidInput("no transverse intersection within the search radius".into()))
}

/// Picks the nearest transverse intersections for both heteroclinic points.
pub fn hetero_pair(sys: &System, p: &PeriodicPoint, q: &PeriodicPoint, search_radius: u32) -> Result<HeteroclinicPair> {
    let radius = search_radius.max(1);
    let x = nearest_transverse(
        &invariant_line(sys, p, Stability::Stable),
        &invariant_line(sys, q, Stability::Unstable),
        radius,
    )?;
    let y = nearest_transverse(
        &invariant_line(sys, q, Stability::Stable),
        &invariant_line(sys, p, Stability::Unstable),
        radius,
    )?;
    let delta0 = x.max_offset_hi().max(y.max_offset_hi());
    Ok(HeteroclinicPair {
        p: p.clone(),
        q: q.clone(),
        x,
        y,
        delta0,
        h: sys.eigen.basis_cond,
        lam: sys.eigen.lambda,
    })
}

/// Enclosures of `d(f^n x, f^n p)`, `d(f^-n x, f^-n q)`, `d(f^n y, f^n q)`
/// and `d(f^-n y, f^-n p)`.
#[derive(Clone, Debug)]
pub struct DecayReport {
    pub forward_x: Interval,
    pub backward_x: Interval,
    pub forward_y: Interval,
    pub backward_y: Interval,
}

/// Checks the four decay inequalities at step `n` against `H lam^n` times the
/// line offsets.
pub fn decay_check(sys: &System, pair: &HeteroclinicPair, n: u32) -> Result<DecayReport> {
    let a = &sys.matrix;
    let fwd = mat_pow(a, n as i64)?;
    let bwd = mat_pow(a, -(n as i64))?;
    let image = |m: &crate::algebra::IntMat2, pt: &LiftedPoint| LiftedPoint { x: m.apply(&pt.x) }.project();
    // the unstable line of x passes through q + translate
    let shift = |i: &Intersection| [QuadExt::from_int(i.translate[0].clone()), QuadExt::from_int(i.translate[1].clone())];
    let q_hat = LiftedPoint {
        x: vec_add(&pair.q.point().lift().x, &shift(&pair.x)),
    };
    let p_hat = LiftedPoint {
        x: vec_add(&pair.p.point().lift().x, &shift(&pair.y)),
    };
    let d = |u: &TorusPoint, v: &TorusPoint| torus_distance(u, v, DIST_PREC);
    let report = DecayReport {
        forward_x: d(&image(&fwd, &pair.x.lifted), &image(&fwd, &pair.p.point().lift())),
        backward_x: d(&image(&bwd, &pair.x.lifted), &image(&bwd, &q_hat)),
        forward_y: d(&image(&fwd, &pair.y.lifted), &image(&fwd, &pair.q.point().lift())),
        backward_y: d(&image(&bwd, &pair.y.lifted), &image(&bwd, &p_hat)),
    };
    let scale = &Interval::from_f64(pair.h) * &Interval::from_f64(pair.lam).powi(n);
    let bound = |off: &QuadExt| (&scale * &off.enclose_relative(40).sqrt()).hi_f64();
    let checks = [
        (&report.forward_x, &pair.x.stable_offset_sq, "forward x"),
        (&report.backward_x, &pair.x.unstable_offset_sq, "backward x"),
        (&report.forward_y, &pair.y.stable_offset_sq, "forward y"),
        (&report.backward_y, &pair.y.unstable_offset_sq, "backward y"),
    ];
    for (dist, off, which) in checks {
        if dist.lo_f64() > bound(off) {
            return Err(Error::DecayViolated { n: n as u64, which });
        }
    }
    Ok(report)
}

/// Lifted distance from the stable-line point at parameter `t` after `n`
/// steps: exactly `|lambda_s|^n` times the initial offset.
pub fn stable_line_distance(sys: &System, line: &InvariantLine, t: &QuadExt, n: u32) -> Interval {
    let a = sys.matrix.pow(n);
    let moved = LiftedPoint { x: a.apply(&line.at(t).x) };
    let base = LiftedPoint { x: a.apply(&line.base.x) };
    lifted_distance(&moved, &base, DIST_PREC)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::vec_sub;
    use num_rational::BigRational;

    fn periodic(sys: &System, n1: i64, d1: i64, n2: i64, d2: i64) -> PeriodicPoint {
        PeriodicPoint::new(&sys.matrix, TorusPoint::from_fractions(n1, d1, n2, d2), 100).unwrap()
    }

    #[test]
    fn lines_through_origin() {
        let sys = System::cat_map();
        let o = periodic(&sys, 0, 1, 0, 1);
        let lu = invariant_line(&sys, &o, Stability::Unstable);
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(lu.direction[1], QuadExt::new(-half.clone(), half.clone(), 5));
        let ls = invariant_line(&sys, &o, Stability::Stable);
        assert_eq!(ls.direction[1], QuadExt::new(-half.clone(), -half, 5));
        let hits = intersect_lines(&ls, &lu, 1);
        assert!(hits[0].t.is_zero() && hits[0].u.is_zero());
        assert!(hits.len() <= 9);
    }

    #[test]
    fn intersections_lie_on_both_lines() {
        let sys = System::cat_map();
        let o = periodic(&sys, 0, 1, 0, 1);
        let q = periodic(&sys, 1, 5, 2, 5);
        let ls = invariant_line(&sys, &o, Stability::Stable);
        let lu = invariant_line(&sys, &q, Stability::Unstable);
        for hit in intersect_lines(&ls, &lu, 1) {
            let on_u = vec_add(&lu.at(&hit.u).x, &[QuadExt::from_int(hit.translate[0].clone()), QuadExt::from_int(hit.translate[1].clone())]);
            let r = vec_sub(&ls.at(&hit.t).x, &on_u);
            assert!(r[0].is_zero() && r[1].is_zero());
        }
    }

    #[test]
    fn homoclinic_pair_at_origin() {
        let sys = System::cat_map();
        let o = periodic(&sys, 0, 1, 0, 1);
        let pair = hetero_pair(&sys, &o, &o, 2).unwrap();
        assert_eq!(pair.x(), pair.y());
        assert!(pair.delta0 > 0.0);
        assert!(pair.delta0 <= core::f64::consts::FRAC_1_SQRT_2 * 5.0);
        let wide = hetero_pair(&sys, &o, &o, 3).unwrap();
        assert!(wide.delta0 <= pair.delta0);
    }

    #[test]
    fn swapping_swaps_roles() {
        let sys = System::cat_map();
        let p = periodic(&sys, 2, 5, 4, 5);
        let q = periodic(&sys, 1, 5, 2, 5);
        let a = hetero_pair(&sys, &p, &q, 2).unwrap();
        let b = hetero_pair(&sys, &q, &p, 2).unwrap();
        assert_eq!(a.x(), b.y());
        assert_eq!(a.y(), b.x());
    }

    #[test]
    fn decay_holds() {
        let sys = System::cat_map();
        let p = periodic(&sys, 2, 5, 4, 5);
        let q = periodic(&sys, 1, 5, 2, 5);
        let pair = hetero_pair(&sys, &p, &q, 2).unwrap();
        for n in [0, 1, 5, 20] {
            decay_check(&sys, &pair, n).unwrap();
        }
        let r = decay_check(&sys, &pair, 20).unwrap();
        let d0 = pair.x.stable_offset_sq.enclose_relative(30).sqrt().hi_f64();
        assert!(r.forward_x.hi_f64() < 1e-8 * d0);
    }

    #[test]
    fn stable_decay_is_exactly_geometric() {
        let sys = System::cat_map();
        let o = periodic(&sys, 0, 1, 0, 1);
        let ls = invariant_line(&sys, &o, Stability::Stable);
        let t = QuadExt::from_int(1);
        let d0 = stable_line_distance(&sys, &ls, &t, 0);
        let d10 = stable_line_distance(&sys, &ls, &t, 10);
        let ratio = d10.mid_f64() / d0.mid_f64();
        assert!((ratio - 0.3819660112501051f64.powi(10)).abs() < 1e-15);
    }
}

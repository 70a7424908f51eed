//! The four-segment periodic pseudo-orbit through a heteroclinic pair and its
//! exact periodic shadow.
//!
//! Lifted positions `X_0 .. X_{L-1}` are laid out as
//! `f^-L1 y .. f^(L2-1) y, f^-L3 x .. f^(L4-1) x`, so `y` sits at index `L1`.
//! The step errors `e_n = X_{n+1} - A X_n - k_n` (with `X_L = X_0` and `k_n`
//! the nearest integer vector) vanish inside each segment. The shadow orbit
//! `Z_{n+1} = A Z_n + k_n` with `Z_L = Z_0` is then the unique solution of a
//! 2x2 linear system and is rational.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::algebra::{int_vec, is_zero_vec, mat_pow, vec_add, vec_sub, IntMat2, Interval, QuadExt};
use crate::heteroclinic::HeteroclinicPair;
use crate::torus::{apply, distance_from_sq, nearest_difference, PeriodicPoint, System, TorusPoint};
use crate::{Error, Result};

/// Hard cap on the total pseudo-orbit length.
pub const DEFAULT_LENGTH_CAP: u64 = 5000;

const SEAM_PREC: u32 = 64;

/// Error at one segment boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Seam {
    /// `e_n` couples `X_n` to `X_{n+1}` (indices mod `L`).
    pub index: usize,
    pub jump: [BigInt; 2],
    pub error: [QuadExt; 2],
}

impl Seam {
    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.error)
    }

    pub fn norm(&self, precision_bits: u32) -> Interval {
        let sq = &self.error[0] * &self.error[0] + &self.error[1] * &self.error[1];
        distance_from_sq(&sq, precision_bits)
    }
}

#[derive(Clone, Debug)]
pub struct PseudoOrbit {
    /// `[L1, L2, L3, L4]`.
    pub lengths: [u64; 4],
    pub points: Vec<[QuadExt; 2]>,
    /// One entry per segment boundary, in index order; the last one wraps.
    pub seams: Vec<Seam>,
    /// Enclosure of the largest Euclidean seam error.
    pub delta: Interval,
    /// Rounded-up `2 H lam^L0 delta0`.
    pub delta_bound: Interval,
    /// `L0 / max(L_i)`.
    pub alpha: BigRational,
}

impl PseudoOrbit {
    pub fn total_len(&self) -> u64 {
        self.lengths.iter().sum()
    }

    pub fn min_len(&self) -> u64 {
        *self.lengths.iter().min().expect("four lengths")
    }

    /// Index of `y` in the pseudo-orbit.
    pub fn y_index(&self) -> usize {
        self.lengths[0] as usize
    }

    pub fn projected(&self, n: usize) -> TorusPoint {
        TorusPoint::new(self.points[n][0].clone(), self.points[n][1].clone())
    }

    /// Integer jump `k_n` for every step (zero inside segments).
    pub fn jump_at(&self, n: usize) -> Option<&[BigInt; 2]> {
        self.seams.iter().find(|s| s.index == n).map(|s| &s.jump)
    }
}

fn seam_at(a: &IntMat2, from: &[QuadExt; 2], to: &[QuadExt; 2], index: usize) -> Seam {
    let d = vec_sub(to, &a.apply(from));
    let jump = [d[0].round(), d[1].round()];
    let error = vec_sub(&d, &int_vec(&jump));
    Seam { index, jump, error }
}

/// Builds the pseudo-orbit with segment lengths `[L1, L2, L3, L4]`.
pub fn build_pseudo_orbit(sys: &System, pair: &HeteroclinicPair, lengths: [u64; 4]) -> Result<PseudoOrbit> {
    build_pseudo_orbit_capped(sys, pair, lengths, DEFAULT_LENGTH_CAP)
}

pub fn build_pseudo_orbit_capped(
    sys: &System,
    pair: &HeteroclinicPair,
    lengths: [u64; 4],
    length_cap: u64,
) -> Result<PseudoOrbit> {
    let [l1, l2, l3, l4] = lengths;
    let pp = pair.p.min_period();
    let pq = pair.q.min_period();
    if lengths.contains(&0) || l1 % pp != 0 || l4 % pp != 0 || l2 % pq != 0 || l3 % pq != 0 {
        return Err(Error::BadMultiples);
    }
    let total = l1 + l2 + l3 + l4;
    if total > length_cap {
        return Err(Error::LengthCapExceeded(total));
    }
    let a = &sys.matrix;
    let too_long = |_| Error::LengthCapExceeded(total);
    let mut points = Vec::with_capacity(total as usize);
    let mut cur = mat_pow(a, -i64::try_from(l1).map_err(too_long)?)?.apply(&pair.y.lifted.x);
    for _ in 0..l1 + l2 {
        let next = a.apply(&cur);
        points.push(cur);
        cur = next;
    }
    let mut cur = mat_pow(a, -i64::try_from(l3).map_err(too_long)?)?.apply(&pair.x.lifted.x);
    for _ in 0..l3 + l4 {
        let next = a.apply(&cur);
        points.push(cur);
        cur = next;
    }
    let n = total as usize;
    let boundaries = [l1 as usize - 1, (l1 + l2) as usize - 1, (l1 + l2 + l3) as usize - 1, n - 1];
    let seams: Vec<Seam> = boundaries
        .iter()
        .map(|&i| seam_at(a, &points[i], &points[(i + 1) % n], i))
        .collect();
    let delta = seams
        .iter()
        .map(|s| s.norm(SEAM_PREC))
        .fold(Interval::zero(), |m, x| m.max_with(&x));

    let l0 = *lengths.iter().min().expect("four lengths");
    let l0_u32 = u32::try_from(l0).map_err(too_long)?;
    let delta_bound = (&Interval::from_f64(2.0 * pair.h) * &Interval::from_f64(pair.lam).powi(l0_u32))
        * Interval::from_f64(pair.delta0);
    if delta.lo_rational() > delta_bound.hi_rational() {
        return Err(Error::DecayViolated { n: l0, which: "seam error" });
    }
    let lmax = *lengths.iter().max().expect("four lengths");
    Ok(PseudoOrbit {
        lengths,
        points,
        seams,
        delta,
        delta_bound,
        alpha: BigRational::new(l0.into(), lmax.into()),
    })
}

/// Rounded-up `H (1/(1 - |lambda_s|) + 1/(|lambda_u| - 1))`.
pub fn mu_constant(sys: &System) -> f64 {
    let e = &sys.eigen;
    let one = Interval::from_int(1);
    let a = one.checked_div(&(&one - &Interval::from_f64(e.lambda)));
    let b = one.checked_div(&(&Interval::from_f64(e.lambda_u_lo) - &one));
    match (a, b) {
        (Some(a), Some(b)) => (&Interval::from_f64(e.basis_cond) * &(&a + &b)).hi_f64().max(1.0),
        _ => f64::INFINITY,
    }
}

#[derive(Clone, Debug)]
pub struct ShadowCertificate {
    /// The shadow point at the position of `y`, with its exact orbit.
    pub z: PeriodicPoint,
    /// The shadow point at index 0.
    pub z_start: TorusPoint,
    /// Exact correction `Z_0 - X_0`.
    pub correction: [QuadExt; 2],
    pub period: u64,
    pub max_dist: Interval,
    pub delta: Interval,
    pub mu: f64,
    pub a_posteriori_ratio: f64,
}

fn solve_shifted(m: &IntMat2, rhs: &[QuadExt; 2]) -> Result<[QuadExt; 2]> {
    let det = m.det();
    if det.is_zero() {
        return Err(Error::NotHyperbolic);
    }
    let inv = BigRational::new(1.into(), det);
    let [u, v] = m.adjugate().apply(rhs);
    Ok([u.scale(&inv), v.scale(&inv)])
}

/// `(I - A^L)^-1 sum_j A^(L-1-j) k_j`, the start of the shadow orbit in
/// rational arithmetic only.
pub fn shadow_start_from_jumps(sys: &System, po: &PseudoOrbit) -> Result<[BigRational; 2]> {
    let a = &sys.matrix;
    let l = po.total_len() as i64;
    let mut acc = [BigInt::zero(), BigInt::zero()];
    for s in &po.seams {
        let p = mat_pow(a, l - 1 - s.index as i64)?.apply_int(&s.jump);
        acc = [&acc[0] + &p[0], &acc[1] + &p[1]];
    }
    let m = mat_pow(a, l)?.sub_identity();
    let neg = m.scale(&BigInt::from(-1));
    let [u, v] = solve_shifted(&neg, &int_vec(&acc))?;
    Ok([
        u.to_rational().ok_or(Error::IrrationalResidue)?,
        v.to_rational().ok_or(Error::IrrationalResidue)?,
    ])
}

/// Exact periodic shadow of `po`.
pub fn shadow_periodic(sys: &System, po: &PseudoOrbit, precision_bits: u32) -> Result<ShadowCertificate> {
    let a = &sys.matrix;
    let l = po.total_len() as i64;
    let mut acc = [QuadExt::zero(), QuadExt::zero()];
    for s in po.seams.iter().filter(|s| !s.is_zero()) {
        let p = mat_pow(a, l - 1 - s.index as i64)?.apply(&s.error);
        acc = vec_add(&acc, &p);
    }
    let m = mat_pow(a, l)?.sub_identity();
    let correction = solve_shifted(&m, &acc)?;
    let z0 = vec_add(&po.points[0], &correction);
    if !z0[0].is_rational() || !z0[1].is_rational() {
        return Err(Error::IrrationalResidue);
    }
    let z_start = TorusPoint::new(z0[0].clone(), z0[1].clone());
    let check = shadow_start_from_jumps(sys, po)?;
    if TorusPoint::from_rationals(check[0].clone(), check[1].clone()) != z_start {
        return Err(Error::IrrationalResidue);
    }
    if !is_periodic(a, &z_start, po.total_len())? {
        return Err(Error::IrrationalResidue);
    }
    let mut z_at_y = z_start.clone();
    for _ in 0..po.y_index() {
        z_at_y = apply(a, &z_at_y);
    }
    let z = PeriodicPoint::new(a, z_at_y, po.total_len())?;
    let mu = mu_constant(sys);
    let max_dist = shadow_distance(sys, &z_start, po, precision_bits);
    let ratio = if po.delta.is_zero() {
        0.0
    } else {
        max_dist.checked_div(&po.delta).map(|r| r.hi_f64()).unwrap_or(f64::INFINITY)
    };
    let cert = ShadowCertificate {
        z,
        z_start,
        correction,
        period: po.total_len(),
        max_dist,
        delta: po.delta.clone(),
        mu,
        a_posteriori_ratio: ratio,
    };
    check_bound(&cert)?;
    Ok(cert)
}

/// `(A^L - I) z` is an integer vector.
pub fn is_periodic(a: &IntMat2, z: &TorusPoint, l: u64) -> Result<bool> {
    let Some(r) = z.to_rationals() else { return Ok(false) };
    let m = mat_pow(a, l as i64)?.sub_identity();
    let w = m.apply_rat(&r);
    Ok(w[0].is_integer() && w[1].is_integer())
}

/// Largest distance between the orbit of `z_start` and the pseudo-orbit.
pub fn shadow_distance(sys: &System, z_start: &TorusPoint, po: &PseudoOrbit, precision_bits: u32) -> Interval {
    let mut z = z_start.clone();
    let mut worst = Interval::zero();
    for x in &po.points {
        let [w1, w2] = nearest_difference(z.coords(), x);
        let d = distance_from_sq(&(&w1 * &w1 + &w2 * &w2), precision_bits);
        worst = worst.max_with(&d);
        z = apply(&sys.matrix, &z);
    }
    worst
}

fn check_bound(cert: &ShadowCertificate) -> Result<()> {
    let bound = &Interval::from_f64(cert.mu) * &cert.delta;
    if cert.max_dist.hi_rational() > bound.hi_rational() {
        return Err(Error::ShadowBoundViolated);
    }
    Ok(())
}

/// Replays the shadowing claim from scratch and returns the maximal distance.
pub fn verify_shadow(sys: &System, cert: &ShadowCertificate, po: &PseudoOrbit, precision_bits: u32) -> Result<Interval> {
    if !is_periodic(&sys.matrix, &cert.z_start, po.total_len())? {
        return Err(Error::ShadowBoundViolated);
    }
    let max_dist = shadow_distance(sys, &cert.z_start, po, precision_bits);
    let bound = &Interval::from_f64(mu_constant(sys)) * &po.delta;
    if max_dist.hi_rational() > bound.hi_rational() {
        return Err(Error::ShadowBoundViolated);
    }
    Ok(max_dist)
}

/// Whether every step inside the four segments is an exact orbit step.
pub fn within_segments_exact(sys: &System, po: &PseudoOrbit) -> bool {
    let n = po.points.len();
    (0..n).all(|i| {
        if po.seams.iter().any(|s| s.index == i) {
            return true;
        }
        seam_at(&sys.matrix, &po.points[i], &po.points[(i + 1) % n], i).is_zero()
            && po.points[(i + 1) % n] == sys.matrix.apply(&po.points[i])
    })
}

/// Largest sup-norm among seam errors, rounded up.
pub fn max_seam_sup_norm(po: &PseudoOrbit) -> f64 {
    po.seams
        .iter()
        .flat_map(|s| s.error.iter())
        .map(|c| c.abs().enclose(SEAM_PREC).hi_f64())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heteroclinic::hetero_pair;
    use crate::torus::enumerate_periodic;

    fn periodic(sys: &System, n1: i64, d1: i64, n2: i64, d2: i64) -> PeriodicPoint {
        PeriodicPoint::new(&sys.matrix, TorusPoint::from_fractions(n1, d1, n2, d2), 100).unwrap()
    }

    #[test]
    fn degenerate_pair_has_no_seams() {
        let sys = System::cat_map();
        let p = periodic(&sys, 1, 5, 2, 5);
        let pair = HeteroclinicPair::degenerate(&sys, &p);
        let po = build_pseudo_orbit(&sys, &pair, [2, 2, 2, 2]).unwrap();
        assert!(po.seams.iter().all(Seam::is_zero));
        let cert = shadow_periodic(&sys, &po, 64).unwrap();
        assert!(cert.correction.iter().all(QuadExt::is_zero));
        assert!(cert.max_dist.is_zero());
        assert!(cert.z.same_orbit(&p));
    }

    #[test]
    fn homoclinic_seams_are_small() {
        let sys = System::cat_map();
        let o = periodic(&sys, 0, 1, 0, 1);
        let pair = hetero_pair(&sys, &o, &o, 2).unwrap();
        let po = build_pseudo_orbit(&sys, &pair, [10, 10, 10, 10]).unwrap();
        assert_eq!(po.seams.len(), 4);
        assert!(po.seams[0].is_zero() && po.seams[2].is_zero());
        assert!(within_segments_exact(&sys, &po));
        let bound = 2.0 * pair.h * 0.3819660112501051f64.powi(10) * pair.delta0;
        assert!(max_seam_sup_norm(&po) <= bound * (1.0 + 1e-12));
        let cert = shadow_periodic(&sys, &po, 64).unwrap();
        assert!(cert.a_posteriori_ratio <= cert.mu);
        verify_shadow(&sys, &cert, &po, 96).unwrap();
    }

    #[test]
    fn shadow_is_a_listed_periodic_point() {
        let sys = System::cat_map();
        let p = periodic(&sys, 2, 5, 4, 5);
        let q = periodic(&sys, 1, 5, 2, 5);
        let pair = hetero_pair(&sys, &p, &q, 2).unwrap();
        let po = build_pseudo_orbit(&sys, &pair, [2, 2, 2, 2]).unwrap();
        let cert = shadow_periodic(&sys, &po, 64).unwrap();
        let set = enumerate_periodic(&sys.matrix, 8, 10_000).unwrap();
        assert!(set.points().any(|pt| pt == cert.z.point()));
        assert_eq!(8 % cert.z.min_period(), 0);
    }

    #[test]
    fn lengths_must_respect_periods() {
        let sys = System::cat_map();
        let p = periodic(&sys, 2, 5, 4, 5);
        let q = periodic(&sys, 1, 5, 2, 5);
        let pair = hetero_pair(&sys, &p, &q, 2).unwrap();
        assert!(matches!(build_pseudo_orbit(&sys, &pair, [3, 2, 2, 2]), Err(Error::BadMultiples)));
        assert!(matches!(
            build_pseudo_orbit(&sys, &pair, [4000, 1000, 2, 2]),
            Err(Error::LengthCapExceeded(5004))
        ));
    }

    #[test]
    fn mu_examples() {
        let cat = mu_constant(&System::cat_map());
        assert!((cat - 5f64.sqrt()).abs() < 1e-9);
        let other = System::new(IntMat2::new(3, 1, 2, 1)).unwrap();
        assert!(mu_constant(&other) >= 1.0);
        let lu = other.eigen.lambda_u_lo;
        assert!(1.0 / (lu - 1.0) < 1.0 / (2.618 - 1.0));
    }
}

//! The map `f = A mod Z^2` on the 2-torus: points, lifts, the flat metric,
//! orbits and exact enumeration of periodic points.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{eigen_data, mat_pow, EigenData, IntMat2, Interval, QuadExt};
use crate::{Error, Result};

/// Default bound on the number of fixed points of `f^n` enumerated at once.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// A hyperbolic unimodular matrix together with its eigen data.
#[derive(Clone, Debug)]
pub struct System {
    pub matrix: IntMat2,
    pub eigen: EigenData,
}

impl System {
    pub fn new(matrix: IntMat2) -> Result<Self> {
        let eigen = eigen_data(&matrix)?;
        Ok(System { matrix, eigen })
    }

    /// The cat map `[[2,1],[1,1]]`.
    pub fn cat_map() -> Self {
        System::new(IntMat2::new(2, 1, 1, 1)).expect("cat map is hyperbolic")
    }

    pub fn discriminant(&self) -> u64 {
        self.eigen.discriminant
    }
}

/// A point of `R^2`, not reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedPoint {
    pub x: [QuadExt; 2],
}

impl LiftedPoint {
    pub fn new(x1: QuadExt, x2: QuadExt) -> Self {
        LiftedPoint { x: [x1, x2] }
    }

    pub fn project(&self) -> TorusPoint {
        TorusPoint::new(self.x[0].clone(), self.x[1].clone())
    }
}

/// A point of the torus with both coordinates in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TorusPoint {
    x: [QuadExt; 2],
}

impl TorusPoint {
    /// Reduces both coordinates mod 1.
    pub fn new(x1: QuadExt, x2: QuadExt) -> Self {
        TorusPoint {
            x: [x1.fract(), x2.fract()],
        }
    }

    pub fn from_rationals(x1: BigRational, x2: BigRational) -> Self {
        TorusPoint::new(QuadExt::rational(x1), QuadExt::rational(x2))
    }

    /// `(n1/d1, n2/d2)` from small integers.
    pub fn from_fractions(n1: i64, d1: i64, n2: i64, d2: i64) -> Self {
        TorusPoint::from_rationals(
            BigRational::new(n1.into(), d1.into()),
            BigRational::new(n2.into(), d2.into()),
        )
    }

    pub fn origin() -> Self {
        TorusPoint::new(QuadExt::zero(), QuadExt::zero())
    }

    pub fn coords(&self) -> &[QuadExt; 2] {
        &self.x
    }

    pub fn is_rational(&self) -> bool {
        self.x[0].is_rational() && self.x[1].is_rational()
    }

    pub fn to_rationals(&self) -> Option<[BigRational; 2]> {
        Some([self.x[0].to_rational()?, self.x[1].to_rational()?])
    }

    /// The canonical lift in `[0, 1)^2`.
    pub fn lift(&self) -> LiftedPoint {
        LiftedPoint { x: self.x.clone() }
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x[0], self.x[1])
    }
}

/// Exact image `A * pt mod Z^2`.
pub fn apply(a: &IntMat2, pt: &TorusPoint) -> TorusPoint {
    let [y1, y2] = a.apply(&pt.x);
    TorusPoint::new(y1, y2)
}

/// Difference `a - b` moved to the nearest integer translate, each component
/// in `[-1/2, 1/2]`.
pub fn nearest_difference(a: &[QuadExt; 2], b: &[QuadExt; 2]) -> [QuadExt; 2] {
    let wrap = |d: QuadExt| {
        let k = d.round();
        &d - &QuadExt::from_int(k)
    };
    [wrap(&a[0] - &b[0]), wrap(&a[1] - &b[1])]
}

/// Exact squared quotient distance.
pub fn torus_distance_sq(a: &TorusPoint, b: &TorusPoint) -> QuadExt {
    let [w1, w2] = nearest_difference(&a.x, &b.x);
    &w1 * &w1 + &w2 * &w2
}

/// Rigorous enclosure of the flat quotient distance, with relative accuracy
/// about `2^-precision_bits`.
pub fn torus_distance(a: &TorusPoint, b: &TorusPoint, precision_bits: u32) -> Interval {
    distance_from_sq(&torus_distance_sq(a, b), precision_bits)
}

/// Euclidean distance between two lifted points (no reduction).
pub fn lifted_distance(a: &LiftedPoint, b: &LiftedPoint, precision_bits: u32) -> Interval {
    let d1 = &a.x[0] - &b.x[0];
    let d2 = &a.x[1] - &b.x[1];
    distance_from_sq(&(&d1 * &d1 + &d2 * &d2), precision_bits)
}

pub(crate) fn distance_from_sq(sq: &QuadExt, precision_bits: u32) -> Interval {
    sq.enclose_relative(precision_bits.max(8) + 2).sqrt()
}

/// A rational point with its exact minimal period and orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicPoint {
    point: TorusPoint,
    min_period: u64,
    orbit: Vec<TorusPoint>,
}

impl PeriodicPoint {
    /// Computes the minimal period (at most `n_max`) and the orbit of `pt`.
    pub fn new(a: &IntMat2, pt: TorusPoint, n_max: u64) -> Result<Self> {
        let period = minimal_period(a, &pt, n_max)?;
        let mut orbit = Vec::with_capacity(period as usize);
        let mut cur = pt.clone();
        for _ in 0..period {
            let next = apply(a, &cur);
            orbit.push(cur);
            cur = next;
        }
        Ok(PeriodicPoint {
            point: pt,
            min_period: period,
            orbit,
        })
    }

    pub fn point(&self) -> &TorusPoint {
        &self.point
    }

    pub fn min_period(&self) -> u64 {
        self.min_period
    }

    pub fn orbit(&self) -> &[TorusPoint] {
        &self.orbit
    }

    /// Same orbit, started at position `k`.
    pub fn shifted(&self, k: usize) -> PeriodicPoint {
        let n = self.orbit.len();
        let orbit: Vec<_> = (0..n).map(|i| self.orbit[(i + k) % n].clone()).collect();
        PeriodicPoint {
            point: orbit[0].clone(),
            min_period: self.min_period,
            orbit,
        }
    }

    /// Whether `other` lies on the same orbit.
    pub fn same_orbit(&self, other: &PeriodicPoint) -> bool {
        self.min_period == other.min_period && self.orbit.contains(&other.point)
    }
}

/// Rational coordinates as integer numerators over a common denominator.
fn common_denominator(pt: &TorusPoint) -> Option<([BigInt; 2], BigInt)> {
    let [r1, r2] = pt.to_rationals()?;
    let den = r1.denom().lcm(r2.denom());
    let u1 = r1.numer() * (&den / r1.denom());
    let u2 = r2.numer() * (&den / r2.denom());
    Some(([u1, u2], den))
}

fn step_mod(a: &IntMat2, u: &[BigInt; 2], den: &BigInt) -> [BigInt; 2] {
    let [v1, v2] = a.apply_int(u);
    [v1.mod_floor(den), v2.mod_floor(den)]
}

/// Least `n <= n_max` with `f^n(pt) = pt`.
pub fn minimal_period(a: &IntMat2, pt: &TorusPoint, n_max: u64) -> Result<u64> {
    let (start, den) = common_denominator(pt)
        .ok_or_else(|| Error::InvalidInput("minimal period needs a rational point".into()))?;
    let mut u = start.clone();
    for n in 1..=n_max {
        u = step_mod(a, &u, &den);
        if u == start {
            return Ok(n);
        }
    }
    Err(Error::NotPeriodicWithin(n_max))
}

/// Exact iterates `A^i * pt` for `i` in `from..=to`.
pub fn orbit_segment(a: &IntMat2, pt: &LiftedPoint, from: i64, to: i64) -> Result<Vec<LiftedPoint>> {
    if from > to {
        return Err(Error::InvalidInput("empty orbit segment".into()));
    }
    let start = mat_pow(a, from)?.apply(&pt.x);
    let mut out = Vec::with_capacity((to - from + 1) as usize);
    let mut cur = start;
    for i in from..=to {
        let next = if i < to { Some(a.apply(&cur)) } else { None };
        out.push(LiftedPoint { x: cur });
        match next {
            Some(n) => cur = n,
            None => break,
        }
    }
    Ok(out)
}

/// All fixed points of `f^n`, grouped into orbits.
#[derive(Clone, Debug)]
pub struct PeriodicSet {
    pub n: u64,
    /// One entry per orbit, represented by its smallest point.
    pub orbits: Vec<PeriodicPoint>,
}

impl PeriodicSet {
    pub fn point_count(&self) -> u64 {
        self.orbits.iter().map(|o| o.min_period).sum()
    }

    pub fn points(&self) -> impl Iterator<Item = &TorusPoint> {
        self.orbits.iter().flat_map(|o| o.orbit.iter())
    }

    /// Orbits whose minimal period is exactly `n`.
    pub fn primitive(&self) -> impl Iterator<Item = &PeriodicPoint> {
        self.orbits.iter().filter(move |o| o.min_period == self.n)
    }
}

/// Column Hermite form of `m`: `(a, b, c)` with `m Z^2 = span{(a, b), (0, c)}`,
/// `a, c > 0` and `0 <= b < c`.
fn column_hermite(m: &IntMat2) -> (BigInt, BigInt, BigInt) {
    let [[m11, m12], [m21, m22]] = &m.m;
    let e = m11.extended_gcd(m12);
    let (mut g, mut s, mut t) = (e.gcd, e.x, e.y);
    if g.is_negative() {
        g = -g;
        s = -s;
        t = -t;
    }
    let mut b = &s * m21 + &t * m22;
    let c = (m.det() / &g).abs();
    b = b.mod_floor(&c);
    (g, b, c)
}

/// `|det(A^n - I)|`, the number of fixed points of `f^n`.
pub fn fixed_point_count(a: &IntMat2, n: u32) -> BigInt {
    a.pow(n).sub_identity().det().abs()
}

/// Exact enumeration of the solutions of `(A^n - I) z = 0 mod Z^2`.
pub fn enumerate_periodic(a: &IntMat2, n: u64, cap: u64) -> Result<PeriodicSet> {
    let e = u32::try_from(n).map_err(|_| Error::InvalidInput("period too large".into()))?;
    if n == 0 {
        return Err(Error::InvalidInput("period must be positive".into()));
    }
    let m = a.pow(e).sub_identity();
    let det = m.det();
    let count = det.abs();
    if count.is_zero() {
        return Err(Error::NotHyperbolic);
    }
    if count > BigInt::from(cap) {
        return Err(Error::CapExceeded {
            count: alloc::format!("{}", count),
            cap,
        });
    }
    let (ha, _, hc) = column_hermite(&m);
    debug_assert_eq!(&ha * &hc, count);
    let adj = m.adjugate();
    let sign = if det.is_negative() { BigInt::from(-1) } else { BigInt::one() };
    let ia = ha.to_u64().expect("bounded by cap");
    let ic = hc.to_u64().expect("bounded by cap");

    // z = M^-1 w = adj(M) w / det, stored as numerators over |det|
    let mut all = BTreeSet::new();
    for i in 0..ia {
        for j in 0..ic {
            let w = [BigInt::from(i), BigInt::from(j)];
            let [u1, u2] = adj.apply_int(&w);
            all.insert([(u1 * &sign).mod_floor(&count), (u2 * &sign).mod_floor(&count)]);
        }
    }
    debug_assert_eq!(BigInt::from(all.len()), count);

    let to_point = |u: &[BigInt; 2]| {
        TorusPoint::from_rationals(
            BigRational::new(u[0].clone(), count.clone()),
            BigRational::new(u[1].clone(), count.clone()),
        )
    };
    let mut seen = BTreeSet::new();
    let mut orbits = Vec::new();
    for u in &all {
        if seen.contains(u) {
            continue;
        }
        let mut orbit = Vec::new();
        let mut cur = u.clone();
        loop {
            seen.insert(cur.clone());
            orbit.push(to_point(&cur));
            cur = step_mod(a, &cur, &count);
            if &cur == u {
                break;
            }
        }
        orbits.push(PeriodicPoint {
            point: orbit[0].clone(),
            min_period: orbit.len() as u64,
            orbit,
        });
    }
    Ok(PeriodicSet { n, orbits })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat() -> IntMat2 {
        IntMat2::new(2, 1, 1, 1)
    }

    #[test]
    fn apply_examples() {
        let a = cat();
        assert_eq!(apply(&a, &TorusPoint::origin()), TorusPoint::origin());
        assert_eq!(apply(&a, &TorusPoint::from_fractions(1, 5, 2, 5)), TorusPoint::from_fractions(4, 5, 3, 5));
        assert_eq!(apply(&a, &TorusPoint::from_fractions(2, 5, 4, 5)), TorusPoint::from_fractions(3, 5, 1, 5));
    }

    #[test]
    fn distance_examples() {
        let o = TorusPoint::origin();
        assert!(torus_distance(&o, &o, 53).is_zero());
        let p = TorusPoint::from_fractions(4, 5, 3, 5);
        let d = torus_distance(&o, &p, 53);
        let expect = 5f64.sqrt() / 5.0;
        assert!(d.lo_f64() <= expect && expect <= d.hi_f64());
        assert!(d.width_f64() < 1e-15);
        assert_eq!(torus_distance_sq(&o, &p), torus_distance_sq(&p, &o));
    }

    #[test]
    fn periods() {
        let a = cat();
        assert_eq!(minimal_period(&a, &TorusPoint::origin(), 10).unwrap(), 1);
        assert_eq!(minimal_period(&a, &TorusPoint::from_fractions(1, 5, 2, 5), 10).unwrap(), 2);
        assert_eq!(minimal_period(&a, &TorusPoint::from_fractions(1, 3, 1, 3), 10).unwrap(), 4);
        assert!(matches!(
            minimal_period(&a, &TorusPoint::from_fractions(1, 3, 1, 3), 3),
            Err(Error::NotPeriodicWithin(3))
        ));
    }

    #[test]
    fn segments() {
        let a = cat();
        let pt = LiftedPoint::new(QuadExt::one(), QuadExt::zero());
        let seg = orbit_segment(&a, &pt, 0, 2).unwrap();
        let got: Vec<_> = seg.iter().map(|p| p.x.clone()).collect();
        let v = |x: i64, y: i64| [QuadExt::from_int(x), QuadExt::from_int(y)];
        assert_eq!(got, alloc::vec![v(1, 0), v(2, 1), v(5, 3)]);
        let back = orbit_segment(&a, &pt, -2, 0).unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!(back[2].x, v(1, 0));
    }

    #[test]
    fn enumeration_counts() {
        let a = cat();
        let one = enumerate_periodic(&a, 1, 100).unwrap();
        assert_eq!(one.point_count(), 1);
        let two = enumerate_periodic(&a, 2, 100).unwrap();
        assert_eq!(two.point_count(), 5);
        assert_eq!(two.orbits.len(), 3);
        let pts: BTreeSet<_> = two.points().cloned().collect();
        assert!(pts.contains(&TorusPoint::from_fractions(3, 5, 1, 5)));
        assert_eq!(enumerate_periodic(&a, 5, 1000).unwrap().point_count(), 121);
        assert!(matches!(enumerate_periodic(&a, 10, 1000), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn hermite_form_spans_lattice() {
        let m = cat().pow(3).sub_identity();
        let (ha, hb, hc) = column_hermite(&m);
        assert_eq!(&ha * &hc, m.det().abs());
        assert!(hb < hc);
    }
}

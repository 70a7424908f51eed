//! Dyadic interval arithmetic with directed rounding.
//!
//! An [`Interval`] is a pair of integers `lo <= hi` with a shared scale
//! `2^-prec`. All operations round the lower end down and the upper end up,
//! so the true value of any expression stays inside the computed interval.

use core::cmp::Ordering;
use core::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

pub(crate) fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

pub(crate) fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

fn shr_floor(a: &BigInt, k: u32) -> BigInt {
    if k == 0 {
        return a.clone();
    }
    // BigInt >> rounds toward negative infinity.
    a >> k as usize
}

fn shr_ceil(a: &BigInt, k: u32) -> BigInt {
    -shr_floor(&-a, k)
}

impl Interval {
    /// Builds `[lo, hi] * 2^-prec`. Panics if `lo > hi`.
    pub fn from_parts(lo: BigInt, hi: BigInt, prec: u32) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi, prec }
    }

    pub fn zero() -> Self {
        Interval::from_parts(BigInt::zero(), BigInt::zero(), 0)
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        let n = n.into();
        Interval::from_parts(n.clone(), n, 0)
    }

    /// Degenerate interval at the dyadic `m * 2^-prec`.
    pub fn point(m: BigInt, prec: u32) -> Self {
        Interval::from_parts(m.clone(), m, prec)
    }

    /// Tightest enclosure of `r` at scale `2^-prec`.
    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        let num = r.numer() << prec as usize;
        let den = r.denom();
        Interval::from_parts(floor_div(&num, den), ceil_div(&num, den), prec)
    }

    /// The exact value of a finite `f64`.
    pub fn from_f64(x: f64) -> Self {
        let (m, e) = f64_to_dyadic(x);
        if e >= 0 {
            Interval::point(m << e as usize, 0)
        } else {
            Interval::point(m, (-e) as u32)
        }
    }

    pub fn lo_raw(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi_raw(&self) -> &BigInt {
        &self.hi
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Rescales to `prec`, widening outward if precision is dropped.
    pub fn with_prec(&self, prec: u32) -> Self {
        match prec.cmp(&self.prec) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let k = (prec - self.prec) as usize;
                Interval::from_parts(&self.lo << k, &self.hi << k, prec)
            }
            Ordering::Less => {
                let k = self.prec - prec;
                Interval::from_parts(shr_floor(&self.lo, k), shr_ceil(&self.hi, k), prec)
            }
        }
    }

    fn aligned(&self, other: &Interval) -> (Interval, Interval) {
        let p = self.prec.max(other.prec);
        (self.with_prec(p), other.with_prec(p))
    }

    pub fn lo_rational(&self) -> BigRational {
        BigRational::new(self.lo.clone(), BigInt::one() << self.prec as usize)
    }

    pub fn hi_rational(&self) -> BigRational {
        BigRational::new(self.hi.clone(), BigInt::one() << self.prec as usize)
    }

    /// Largest `f64` not above the lower end.
    pub fn lo_f64(&self) -> f64 {
        dyadic_to_f64(&self.lo, -(self.prec as i64), Round::Down)
    }

    /// Smallest `f64` not below the upper end.
    pub fn hi_f64(&self) -> f64 {
        dyadic_to_f64(&self.hi, -(self.prec as i64), Round::Up)
    }

    /// Nearest-ish `f64` to the midpoint, for display and planning only.
    pub fn mid_f64(&self) -> f64 {
        let m: BigInt = (&self.lo + &self.hi) >> 1usize;
        dyadic_to_f64(&m, -(self.prec as i64), Round::Down)
    }

    /// Upper bound on `hi - lo`.
    pub fn width_f64(&self) -> f64 {
        dyadic_to_f64(&(&self.hi - &self.lo), -(self.prec as i64), Round::Up)
    }

    /// Upper bound on `max(|lo|, |hi|)`.
    pub fn mag_f64(&self) -> f64 {
        let m = self.lo.abs().max(self.hi.abs());
        dyadic_to_f64(&m, -(self.prec as i64), Round::Up)
    }

    /// Width as an exact dyadic.
    pub fn width(&self) -> Interval {
        Interval::point(&self.hi - &self.lo, self.prec)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        &self.lo_rational() <= r && r <= &self.hi_rational()
    }

    /// Both ends strictly inside the open interval `(lo, hi)`.
    pub fn strictly_inside(&self, lo: &BigRational, hi: &BigRational) -> bool {
        &self.lo_rational() > lo && &self.hi_rational() < hi
    }

    /// Both ends strictly outside the open interval `(lo, hi)` on the same side,
    /// or the interval lies entirely at or beyond one end.
    pub fn misses_open(&self, lo: &BigRational, hi: &BigRational) -> bool {
        &self.hi_rational() <= lo || &self.lo_rational() >= hi
    }

    /// `self` is a sub-interval of `other`.
    pub fn subset_of(&self, other: &Interval) -> bool {
        let (a, b) = self.aligned(other);
        a.lo >= b.lo && a.hi <= b.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        let (a, b) = self.aligned(other);
        a.lo <= b.hi && b.lo <= a.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        let (a, b) = self.aligned(other);
        Interval::from_parts(a.lo.min(b.lo), a.hi.max(b.hi), a.prec)
    }

    pub fn abs(&self) -> Interval {
        if self.lo.is_negative() && self.hi.is_positive() {
            let m = (-&self.lo).max(self.hi.clone());
            Interval::from_parts(BigInt::zero(), m, self.prec)
        } else if self.hi.is_negative() || (self.hi.is_zero() && self.lo.is_negative()) {
            Interval::from_parts(-&self.hi, -&self.lo, self.prec)
        } else {
            self.clone()
        }
    }

    pub fn max_with(&self, other: &Interval) -> Interval {
        let (a, b) = self.aligned(other);
        Interval::from_parts(a.lo.max(b.lo), a.hi.max(b.hi), a.prec)
    }

    /// Adds `[-r, r]` where `r = rad * 2^-prec` (rad >= 0).
    pub fn widen(&self, rad: &BigInt, prec: u32) -> Interval {
        let r = Interval::from_parts(-rad, rad.clone(), prec);
        self + &r
    }

    pub fn mul_int(&self, k: &BigInt) -> Interval {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if k.is_negative() {
            Interval::from_parts(b, a, self.prec)
        } else {
            Interval::from_parts(a, b, self.prec)
        }
    }

    /// Division by a nonzero integer.
    pub fn div_int(&self, k: &BigInt) -> Interval {
        assert!(!k.is_zero(), "interval division by zero");
        let (lo, hi) = if k.is_negative() {
            (-&self.hi, -&self.lo)
        } else {
            (self.lo.clone(), self.hi.clone())
        };
        let k = k.abs();
        Interval::from_parts(floor_div(&lo, &k), ceil_div(&hi, &k), self.prec)
    }

    /// Multiplies by `2^k` exactly.
    pub fn shl(&self, k: u32) -> Interval {
        Interval::from_parts(&self.lo << k as usize, &self.hi << k as usize, self.prec)
    }

    /// Interval division; `None` if the divisor contains zero.
    pub fn checked_div(&self, other: &Interval) -> Option<Interval> {
        if other.contains_zero() {
            return None;
        }
        let (a, b) = self.aligned(other);
        let p = a.prec as usize;
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for x in [&a.lo, &a.hi] {
            for y in [&b.lo, &b.hi] {
                let num = x << p;
                let f = floor_div(&num, y);
                let c = ceil_div(&num, y);
                lo = Some(match lo {
                    Some(l) if l <= f => l,
                    _ => f,
                });
                hi = Some(match hi {
                    Some(h) if h >= c => h,
                    _ => c,
                });
            }
        }
        Some(Interval::from_parts(lo.unwrap(), hi.unwrap(), a.prec))
    }

    /// Square root of the non-negative part. Panics if `hi < 0`.
    pub fn sqrt(&self) -> Interval {
        assert!(!self.hi.is_negative(), "sqrt of a negative interval");
        // value * 2^prec -> sqrt(value) * 2^prec = sqrt(n * 2^prec)
        let p = self.prec as usize;
        let lo = if self.lo.is_positive() {
            (&self.lo << p).sqrt()
        } else {
            BigInt::zero()
        };
        let hn = &self.hi << p;
        let mut hi = hn.sqrt();
        if &hi * &hi < hn {
            hi += 1;
        }
        Interval::from_parts(lo, hi, self.prec)
    }

    pub fn powi(&self, n: u32) -> Interval {
        let mut acc = Interval::from_int(1).with_prec(self.prec);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Sum of intervals (empty sum is zero).
    pub fn sum<'a>(items: impl IntoIterator<Item = &'a Interval>) -> Interval {
        items
            .into_iter()
            .fold(Interval::zero(), |acc, x| &acc + x)
    }

    /// Midpoint (rounded down to the grid) and radius, both in units of `2^-prec`.
    pub(crate) fn mid_rad(&self) -> (BigInt, BigInt) {
        let m: BigInt = (&self.lo + &self.hi) >> 1usize;
        let r = (&self.hi - &m).max(&m - &self.lo);
        (m, r)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo_f64(), self.hi_f64())
    }
}

impl<'a> core::ops::Add<&'a Interval> for &'a Interval {
    type Output = Interval;
    fn add(self, rhs: &'a Interval) -> Interval {
        let (a, b) = self.aligned(rhs);
        Interval::from_parts(a.lo + b.lo, a.hi + b.hi, a.prec)
    }
}

impl<'a> core::ops::Sub<&'a Interval> for &'a Interval {
    type Output = Interval;
    fn sub(self, rhs: &'a Interval) -> Interval {
        let (a, b) = self.aligned(rhs);
        Interval::from_parts(a.lo - b.hi, a.hi - b.lo, a.prec)
    }
}

impl core::ops::Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::from_parts(-&self.hi, -&self.lo, self.prec)
    }
}

impl core::ops::Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        -&self
    }
}

impl<'a> core::ops::Mul<&'a Interval> for &'a Interval {
    type Output = Interval;
    fn mul(self, rhs: &'a Interval) -> Interval {
        // Exact products live at scale 2^-(pa+pb); round back to max(pa, pb).
        let shift = self.prec.min(rhs.prec);
        let prec = self.prec.max(rhs.prec);
        let products = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let mut lo = products[0].clone();
        let mut hi = products[0].clone();
        for p in &products[1..] {
            if *p < lo {
                lo = p.clone();
            }
            if *p > hi {
                hi = p.clone();
            }
        }
        Interval::from_parts(shr_floor(&lo, shift), shr_ceil(&hi, shift), prec)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl core::ops::$tr<Interval> for Interval {
            type Output = Interval;
            fn $m(self, rhs: Interval) -> Interval {
                (&self).$m(&rhs)
            }
        }
        impl<'a> core::ops::$tr<&'a Interval> for Interval {
            type Output = Interval;
            fn $m(self, rhs: &'a Interval) -> Interval {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Exact decomposition `x = m * 2^e` of a finite double.
pub fn f64_to_dyadic(x: f64) -> (BigInt, i64) {
    assert!(x.is_finite(), "non-finite value");
    if x == 0.0 {
        return (BigInt::zero(), 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    };
    let tz = mant.trailing_zeros() as i64;
    (BigInt::from(sign) * BigInt::from(mant >> tz), exp + tz)
}

fn pow2(k: i64) -> f64 {
    if k >= -1022 {
        assert!(k <= 1023);
        f64::from_bits(((k + 1023) as u64) << 52)
    } else {
        assert!(k >= -1074);
        f64::from_bits(1u64 << (k + 1074))
    }
}

/// Rounds `n * 2^exp` to a double in the requested direction.
pub fn dyadic_to_f64(n: &BigInt, exp: i64, dir: Round) -> f64 {
    if n.is_zero() {
        return 0.0;
    }
    let negative = n.sign() == Sign::Minus;
    let m = n.magnitude();
    // Rounding the magnitude away from zero is "up" for positives and
    // "down" for negatives.
    let away = matches!((dir, negative), (Round::Up, false) | (Round::Down, true));
    let bits = m.bits() as i64;
    let top = bits - 1 + exp;
    let (mut mant, scale) = if top > 1023 {
        let v = if away { f64::INFINITY } else { f64::MAX };
        return if negative { -v } else { v };
    } else if top >= -1022 {
        let shift = bits - 53;
        (shift_round(m, shift, away), exp + shift)
    } else {
        let shift = -1074 - exp;
        (shift_round(m, shift, away), -1074)
    };
    let mut scale = scale;
    if mant == 1u64 << 53 {
        mant >>= 1;
        scale += 1;
        if scale + 52 > 1023 {
            let v = if away { f64::INFINITY } else { f64::MAX };
            return if negative { -v } else { v };
        }
    }
    let v = if mant == 0 {
        0.0
    } else {
        // mant < 2^53 and the product is representable, so this is exact.
        (mant as f64) * pow2(scale.max(-1074))
    };
    if negative {
        -v
    } else {
        v
    }
}

fn shift_round(m: &num_bigint::BigUint, shift: i64, away: bool) -> u64 {
    use num_traits::ToPrimitive;
    if shift <= 0 {
        return (m << (-shift) as usize).to_u64().expect("mantissa fits");
    }
    let q = m >> shift as usize;
    let exact = &(&q << shift as usize) == m;
    let q = q.to_u64().expect("mantissa fits");
    if !exact && away {
        q + 1
    } else {
        q
    }
}

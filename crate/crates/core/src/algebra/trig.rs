//! Rigorous `cos(2*pi*t)` and `sin(2*pi*t)` on dyadic intervals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::interval::Interval;

const GUARD_BITS: u32 = 16;

/// `atan(1/x) * 2^w` by the alternating series, with an error bound in units.
fn atan_inv(x: u32, w: u32) -> (BigInt, BigInt) {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power: BigInt = (BigInt::one() << w as usize).div_floor(&x);
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    let mut terms: u64 = 0;
    while !power.is_zero() {
        let term = power.div_floor(&BigInt::from(2 * k + 1));
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power = power.div_floor(&x2);
        k += 1;
        terms += 1;
    }
    // each truncated term is off by < 3 units; the omitted tail is < 2 units
    (sum, BigInt::from(3 * terms + 2))
}

/// Enclosure of pi at scale `2^-w`.
pub fn pi_interval(w: u32) -> Interval {
    let (a, ea) = atan_inv(5, w);
    let (b, eb) = atan_inv(239, w);
    let mid = a * 16 - b * 4;
    let err = ea * 16 + eb * 4;
    Interval::from_parts(&mid - &err, &mid + &err, w)
}

/// Cached constants for trigonometric evaluation at a fixed working precision.
#[derive(Clone, Debug)]
pub struct TrigContext {
    prec: u32,
    pi: Interval,
}

impl TrigContext {
    /// `prec` is the target absolute precision of results in bits.
    pub fn new(prec: u32) -> Self {
        let prec = prec.max(8);
        let w = prec + GUARD_BITS;
        TrigContext {
            prec,
            pi: pi_interval(w + 8),
        }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn work_prec(&self) -> u32 {
        self.prec + GUARD_BITS
    }

    pub fn pi(&self) -> &Interval {
        &self.pi
    }

    /// `(cos(2 pi t), sin(2 pi t))` for every `t` in the interval.
    pub fn cos_sin_2pi(&self, t: &Interval) -> (Interval, Interval) {
        let w = self.work_prec();
        let t = if t.prec() > w { t.with_prec(w) } else { t.with_prec(t.prec().max(4)) };
        let p = t.prec();
        let (mid, rad) = t.mid_rad();
        let unit = BigInt::one() << p as usize;
        let m = mid.mod_floor(&unit);
        // nearest quarter turn
        let q: BigInt = ((&m << 2usize) + (&unit >> 1usize)) >> p as usize;
        let r = &m - (&q << (p - 2) as usize);
        let quadrant = (q % 4u32).to_u32().unwrap_or(0);
        let r = Interval::point(r << 1usize, p);
        let theta = (&self.pi * &r).with_prec(w.max(p));
        let (c, s) = cos_sin_small(&theta);
        let (c, s) = match quadrant {
            0 => (c, s),
            1 => (-s, c),
            2 => (-c, -s),
            _ => (s, -c),
        };
        if rad.is_zero() {
            return (c, s);
        }
        // |d/dt cos(2 pi t)| <= 2 pi < 7
        let slack = rad * 7u32;
        (c.widen(&slack, p), s.widen(&slack, p))
    }

    /// `(cos(2 pi r), sin(2 pi r))` for an exact rational `r`.
    pub fn cos_sin_2pi_rational(&self, r: &BigRational) -> (Interval, Interval) {
        let frac = r - BigRational::from_integer(r.floor().to_integer());
        let t = Interval::from_rational(&frac, self.work_prec());
        self.cos_sin_2pi(&t)
    }
}

/// Taylor series for |theta| <= pi/4 + tiny, with alternating-series remainder.
fn cos_sin_small(theta: &Interval) -> (Interval, Interval) {
    let w = theta.prec();
    let one = Interval::from_int(1).with_prec(w);
    let theta2 = theta * theta;
    let eps = Interval::point(BigInt::one(), w);

    let series = |first: Interval, offset: u64| -> Interval {
        let mut term = first;
        let mut sum = Interval::zero().with_prec(w);
        let mut k: u64 = 0;
        loop {
            if k.is_multiple_of(2) {
                sum = &sum + &term;
            } else {
                sum = &sum - &term;
            }
            let d = BigInt::from((2 * k + 1 + offset) * (2 * k + 2 + offset));
            term = (&term * &theta2).div_int(&d);
            k += 1;
            if term.abs().subset_of(&Interval::from_parts(-eps.hi_raw(), eps.hi_raw().clone(), w)) {
                break;
            }
        }
        // first omitted term bounds the remainder
        let bound = term.abs().hi_raw() + BigInt::one();
        sum.widen(&bound, w)
    };
    let c = series(one, 0);
    let s = series(theta.clone(), 1);
    // clamp to [-1, 1]
    let clamp = |x: Interval| {
        let u = BigInt::one() << w as usize;
        let lo = x.lo_raw().clone().max(-&u);
        let hi = x.hi_raw().clone().min(u.clone());
        if lo <= hi {
            Interval::from_parts(lo, hi, w)
        } else {
            x
        }
    };
    (clamp(c), clamp(s))
}

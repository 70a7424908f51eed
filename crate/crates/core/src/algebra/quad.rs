//! Elements `a + b*sqrt(D)` of a real quadratic field.

use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::interval::{ceil_div, floor_div, Interval};

/// `rat + irr * sqrt(d)` with `d` square-free.
///
/// Rational values may carry `d = 0`; binary operations adopt the
/// discriminant of whichever operand has one.
#[derive(Clone, Debug)]
pub struct QuadExt {
    rat: BigRational,
    irr: BigRational,
    d: u64,
}

impl QuadExt {
    pub fn new(rat: BigRational, irr: BigRational, d: u64) -> Self {
        debug_assert!(irr.is_zero() || d >= 2, "irrational part needs a discriminant");
        QuadExt { rat, irr, d }
    }

    pub fn rational(r: BigRational) -> Self {
        QuadExt {
            rat: r,
            irr: BigRational::zero(),
            d: 0,
        }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        QuadExt::rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        QuadExt::from_int(0)
    }

    pub fn one() -> Self {
        QuadExt::from_int(1)
    }

    /// `sqrt(d)` itself.
    pub fn sqrt_d(d: u64) -> Self {
        QuadExt::new(BigRational::zero(), BigRational::one(), d)
    }

    pub fn rat_part(&self) -> &BigRational {
        &self.rat
    }

    pub fn irr_part(&self) -> &BigRational {
        &self.irr
    }

    pub fn discriminant(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.irr.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.irr.is_zero()
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.rat.clone())
    }

    fn join_d(&self, other: &QuadExt) -> u64 {
        if self.d == 0 || self.irr.is_zero() && other.d != 0 {
            other.d
        } else {
            debug_assert!(
                other.d == 0 || other.irr.is_zero() || other.d == self.d,
                "mixing quadratic fields"
            );
            self.d
        }
    }

    pub fn conjugate(&self) -> QuadExt {
        QuadExt::new(self.rat.clone(), -&self.irr, self.d)
    }

    /// Field norm `rat^2 - d * irr^2`.
    pub fn norm(&self) -> BigRational {
        &self.rat * &self.rat - &self.irr * &self.irr * BigRational::from_integer(self.d.into())
    }

    pub fn checked_inv(&self) -> Option<QuadExt> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(QuadExt::new(&self.rat / &n, -(&self.irr / &n), self.d))
    }

    pub fn scale(&self, k: &BigRational) -> QuadExt {
        QuadExt::new(&self.rat * k, &self.irr * k, self.d)
    }

    pub fn scale_int(&self, k: &BigInt) -> QuadExt {
        let k = BigRational::from_integer(k.clone());
        self.scale(&k)
    }

    pub fn square(&self) -> QuadExt {
        self * self
    }

    pub fn pow(&self, n: u32) -> QuadExt {
        let mut acc = QuadExt::one();
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

    /// `(x, y, den)` with `self = (x + y*sqrt(d)) / den` and `den > 0`.
    fn integer_form(&self) -> (BigInt, BigInt, BigInt) {
        let (an, ad) = (self.rat.numer(), self.rat.denom());
        let (bn, bd) = (self.irr.numer(), self.irr.denom());
        (an * bd, bn * ad, ad * bd)
    }

    /// Exact sign.
    pub fn signum(&self) -> i8 {
        let sa = sign_of(&self.rat);
        let sb = sign_of(&self.irr);
        if sb == 0 || sa == sb {
            return if sa != 0 { sa } else { sb };
        }
        if sa == 0 {
            return sb;
        }
        let a2 = &self.rat * &self.rat;
        let b2d = &self.irr * &self.irr * BigRational::from_integer(self.d.into());
        if a2 > b2d {
            sa
        } else {
            sb
        }
    }

    pub fn abs(&self) -> QuadExt {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Exact floor.
    pub fn floor(&self) -> BigInt {
        let (x, y, den) = self.integer_form();
        floor_div(&(x + floor_sqrt_mul(&y, self.d)), &den)
    }

    /// Nearest integer, ties rounded up.
    pub fn round(&self) -> BigInt {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        QuadExt::new(&self.rat + half, self.irr.clone(), self.d).floor()
    }

    /// `self - floor(self)`, in `[0, 1)`.
    pub fn fract(&self) -> QuadExt {
        let f = self.floor();
        QuadExt::new(&self.rat - BigRational::from_integer(f), self.irr.clone(), self.d)
    }

    /// Rigorous enclosure with `hi - lo <= 2^(1 - precision_bits)`.
    ///
    /// The square root is rounded through an exact integer square root, so
    /// cancellation between large rational and irrational parts is harmless.
    pub fn enclose(&self, precision_bits: u32) -> Interval {
        let p = precision_bits.max(8) + 2;
        let (x, y, den) = self.integer_form();
        let x = x << p as usize;
        if y.is_zero() {
            return Interval::from_parts(floor_div(&x, &den), ceil_div(&x, &den), p);
        }
        let y = y << p as usize;
        // x + y*sqrt(d) lies strictly between f and f + 1
        let f = x + floor_sqrt_mul(&y, self.d);
        let lo = floor_div(&f, &den);
        let hi = ceil_div(&(f + 1), &den);
        Interval::from_parts(lo, hi, p)
    }

    /// Enclosure whose width is at most `2^-rel_bits` times its magnitude, or
    /// an exact zero. Precision grows until the relative target is met.
    pub fn enclose_relative(&self, rel_bits: u32) -> Interval {
        if self.is_zero() {
            return Interval::zero();
        }
        let mut p = rel_bits.max(32) + 8;
        loop {
            let iv = self.enclose(p);
            if !iv.contains_zero() {
                let mag = iv.lo_raw().abs().min(iv.hi_raw().abs());
                let width = iv.hi_raw() - iv.lo_raw();
                if (width << rel_bits as usize) <= mag {
                    return iv;
                }
            }
            p = p.saturating_mul(2);
        }
    }
}

fn sign_of(r: &BigRational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

/// `floor(y * sqrt(d))` for square-free `d >= 2` (or `y = 0`).
fn floor_sqrt_mul(y: &BigInt, d: u64) -> BigInt {
    if y.is_zero() {
        return BigInt::zero();
    }
    let s = (y * y * BigInt::from(d)).sqrt();
    // y*sqrt(d) is irrational, so it is never an integer
    if y.is_positive() {
        s
    } else {
        -s - 1
    }
}

impl PartialEq for QuadExt {
    fn eq(&self, other: &Self) -> bool {
        self.rat == other.rat
            && self.irr == other.irr
            && (self.irr.is_zero() || self.d == other.d)
    }
}

impl Eq for QuadExt {}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadExt {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl<'a> Add<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn add(self, rhs: &'a QuadExt) -> QuadExt {
        let d = self.join_d(rhs);
        QuadExt::new(&self.rat + &rhs.rat, &self.irr + &rhs.irr, d)
    }
}

impl<'a> Sub<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn sub(self, rhs: &'a QuadExt) -> QuadExt {
        let d = self.join_d(rhs);
        QuadExt::new(&self.rat - &rhs.rat, &self.irr - &rhs.irr, d)
    }
}

impl<'a> Mul<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn mul(self, rhs: &'a QuadExt) -> QuadExt {
        let d = self.join_d(rhs);
        let dd = BigRational::from_integer(d.into());
        let rat = &self.rat * &rhs.rat + &self.irr * &rhs.irr * dd;
        let irr = &self.rat * &rhs.irr + &self.irr * &rhs.rat;
        QuadExt::new(rat, irr, d)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl<'a> Div<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn div(self, rhs: &'a QuadExt) -> QuadExt {
        let inv = rhs.checked_inv().expect("division by zero in QuadExt");
        self * &inv
    }
}

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt::new(-&self.rat, -&self.irr, self.d)
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $m(self, rhs: QuadExt) -> QuadExt {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $m(self, rhs: &'a QuadExt) -> QuadExt {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<QuadExt> for &'a QuadExt {
            type Output = QuadExt;
            fn $m(self, rhs: QuadExt) -> QuadExt {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl From<BigRational> for QuadExt {
    fn from(r: BigRational) -> Self {
        QuadExt::rational(r)
    }
}

impl From<i64> for QuadExt {
    fn from(n: i64) -> Self {
        QuadExt::from_int(n)
    }
}

/// Writes `"p/q"`, always with an explicit denominator.
pub fn format_rational(r: &BigRational) -> String {
    alloc::format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"p/q"`, `"p"` or a plain decimal such as `"-0.125"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let mut all = String::from(int_part);
    all.push_str(frac_part);
    let n = BigInt::from_str(if all.is_empty() { "0" } else { &all }).ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(n, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Some(r)
}

impl fmt::Display for QuadExt {
    /// `"p/q + r/s*sqrt(D)"`, or just `"p/q"` for rational values.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.irr.is_zero() {
            write!(f, "{}", format_rational(&self.rat))
        } else {
            write!(
                f,
                "{} + {}*sqrt({})",
                format_rational(&self.rat),
                format_rational(&self.irr),
                self.d
            )
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseQuadError(pub String);

impl fmt::Display for ParseQuadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot parse quadratic value: {}", self.0)
    }
}

impl FromStr for QuadExt {
    type Err = ParseQuadError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseQuadError(s.to_string());
        let s = s.trim();
        match s.split_once('+').filter(|(_, tail)| tail.contains("sqrt(")) {
            None => parse_rational(s).map(QuadExt::rational).ok_or_else(err),
            Some((head, tail)) => {
                let rat = parse_rational(head).ok_or_else(err)?;
                let (coef, rest) = tail.split_once("*sqrt(").ok_or_else(err)?;
                let irr = parse_rational(coef).ok_or_else(err)?;
                let d: u64 = rest.trim().strip_suffix(')').ok_or_else(err)?.trim().parse().map_err(|_| err())?;
                if d < 2 {
                    return Err(err());
                }
                Ok(QuadExt::new(rat, irr, d))
            }
        }
    }
}

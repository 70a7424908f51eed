//! Trigonometric-polynomial observables, their Lipschitz/Holder data and
//! rigorous Birkhoff sums.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::algebra::{format_rational, parse_rational, pi_interval, IntMat2, Interval, QuadExt, TrigContext};
use crate::torus::{PeriodicPoint, TorusPoint};

/// One frequency of a trigonometric polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub k: [BigInt; 2],
    pub cos: BigRational,
    pub sin: BigRational,
}

/// `c0 + sum_k a_k cos(2 pi k.x) + b_k sin(2 pi k.x)`.
///
/// Frequencies are stored with their first nonzero component positive, so
/// each frequency appears at most once.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrigPolynomial {
    constant: BigRational,
    terms: BTreeMap<[BigInt; 2], (BigRational, BigRational)>,
}

fn canonical(k: [BigInt; 2]) -> ([BigInt; 2], bool) {
    let flip = k[0].is_negative() || (k[0].is_zero() && k[1].is_negative());
    if flip {
        ([-&k[0], -&k[1]], true)
    } else {
        (k, false)
    }
}

impl TrigPolynomial {
    pub fn constant(c: BigRational) -> Self {
        TrigPolynomial {
            constant: c,
            terms: BTreeMap::new(),
        }
    }

    pub fn zero() -> Self {
        TrigPolynomial::default()
    }

    /// `coef * cos(2 pi (k1 x1 + k2 x2))`.
    pub fn cos(k1: i64, k2: i64, coef: BigRational) -> Self {
        let mut p = TrigPolynomial::zero();
        p.add_cos([k1.into(), k2.into()], coef);
        p
    }

    /// `coef * sin(2 pi (k1 x1 + k2 x2))`.
    pub fn sin(k1: i64, k2: i64, coef: BigRational) -> Self {
        let mut p = TrigPolynomial::zero();
        p.add_sin([k1.into(), k2.into()], coef);
        p
    }

    pub fn add_constant(&mut self, c: BigRational) {
        self.constant += c;
    }

    pub fn add_cos(&mut self, k: [BigInt; 2], coef: BigRational) {
        let (k, _) = canonical(k);
        if k[0].is_zero() && k[1].is_zero() {
            self.constant += coef;
            return;
        }
        self.merge(k, coef, BigRational::zero());
    }

    pub fn add_sin(&mut self, k: [BigInt; 2], coef: BigRational) {
        let (k, flipped) = canonical(k);
        if k[0].is_zero() && k[1].is_zero() {
            return;
        }
        let coef = if flipped { -coef } else { coef };
        self.merge(k, BigRational::zero(), coef);
    }

    fn merge(&mut self, k: [BigInt; 2], a: BigRational, b: BigRational) {
        let entry = self
            .terms
            .entry(k.clone())
            .or_insert_with(|| (BigRational::zero(), BigRational::zero()));
        entry.0 += a;
        entry.1 += b;
        if entry.0.is_zero() && entry.1.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn constant_term(&self) -> &BigRational {
        &self.constant
    }

    pub fn terms(&self) -> impl Iterator<Item = Term> + '_ {
        self.terms.iter().map(|(k, (a, b))| Term {
            k: k.clone(),
            cos: a.clone(),
            sin: b.clone(),
        })
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    /// `sum_k |a_k| + |b_k|`.
    pub fn coefficient_mass(&self) -> BigRational {
        self.terms
            .values()
            .fold(BigRational::zero(), |acc, (a, b)| acc + a.abs() + b.abs())
    }

    pub fn scale(&self, s: &BigRational) -> TrigPolynomial {
        let mut out = TrigPolynomial::constant(&self.constant * s);
        for (k, (a, b)) in &self.terms {
            out.merge(k.clone(), a * s, b * s);
        }
        out
    }

    pub fn add(&self, other: &TrigPolynomial) -> TrigPolynomial {
        let mut out = self.clone();
        out.constant += &other.constant;
        for (k, (a, b)) in &other.terms {
            out.merge(k.clone(), a.clone(), b.clone());
        }
        out
    }

    pub fn sub(&self, other: &TrigPolynomial) -> TrigPolynomial {
        self.add(&other.scale(&-BigRational::from_integer(1.into())))
    }

    /// `self o A`: frequency `k` becomes `A^T k`.
    pub fn compose(&self, a: &IntMat2) -> TrigPolynomial {
        let at = a.transpose();
        let mut out = TrigPolynomial::constant(self.constant.clone());
        for (k, (ca, cb)) in &self.terms {
            let k2 = at.apply_int(k);
            out.add_cos(k2.clone(), ca.clone());
            out.add_sin(k2, cb.clone());
        }
        out
    }
}

impl fmt::Display for TrigPolynomial {
    /// One term per line in the `cos k1 k2 p/q` text format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.constant.is_zero() || self.terms.is_empty() {
            writeln!(f, "const {}", format_rational(&self.constant))?;
        }
        for (k, (a, b)) in &self.terms {
            if !a.is_zero() {
                writeln!(f, "cos {} {} {}", k[0], k[1], format_rational(a))?;
            }
            if !b.is_zero() {
                writeln!(f, "sin {} {} {}", k[0], k[1], format_rational(b))?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseObservableError(pub String);

impl fmt::Display for ParseObservableError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot parse observable term: {}", self.0)
    }
}

impl FromStr for TrigPolynomial {
    type Err = ParseObservableError;

    /// Terms `cos k1 k2 c`, `sin k1 k2 c` or `const c`, separated by newlines
    /// or `;`. Text after `#` is ignored. Repeated frequencies add up.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut phi = TrigPolynomial::zero();
        let terms = s.lines().map(|l| l.split('#').next().unwrap_or("")).flat_map(|l| l.split(';'));
        for term in terms {
            let words: Vec<&str> = term.split_whitespace().collect();
            if words.is_empty() {
                continue;
            }
            let err = || ParseObservableError(term.trim().to_string());
            let int = |w: &str| BigInt::from_str(w).map_err(|_| err());
            let coef = |w: &str| parse_rational(w).ok_or_else(err);
            match words.as_slice() {
                ["const", c] => phi.add_constant(coef(c)?),
                ["cos", k1, k2, c] => phi.add_cos([int(k1)?, int(k2)?], coef(c)?),
                ["sin", k1, k2, c] => phi.add_sin([int(k1)?, int(k2)?], coef(c)?),
                _ => return Err(err()),
            }
        }
        Ok(phi)
    }
}

/// Holder exponent and constant: `|phi(x) - phi(y)| <= C d(x, y)^theta`.
#[derive(Clone, Debug, PartialEq)]
pub struct HolderData {
    pub theta: BigRational,
    pub c: f64,
}

impl HolderData {
    pub fn theta_f64(&self) -> f64 {
        rational_to_f64(&self.theta)
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    Interval::from_rational(r, 64).mid_f64()
}

/// Next representable double above `x` (for `x >= 0`).
pub(crate) fn next_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    if x == 0.0 {
        return f64::from_bits(1);
    }
    if x > 0.0 {
        f64::from_bits(x.to_bits() + 1)
    } else {
        f64::from_bits(x.to_bits() - 1)
    }
}

/// Lipschitz data: `theta = 1`, `C = 2 pi sum |k| (|a_k| + |b_k|)` rounded up.
pub fn holder_constant(phi: &TrigPolynomial) -> HolderData {
    let prec = 64;
    let mut total = Interval::zero();
    for (k, (a, b)) in &phi.terms {
        let norm_sq = BigRational::from_integer(&k[0] * &k[0] + &k[1] * &k[1]);
        let norm = Interval::from_rational(&norm_sq, prec).sqrt();
        let mass = Interval::from_rational(&(a.abs() + b.abs()), prec);
        total = &total + &(&norm * &mass);
    }
    let c = (&pi_interval(prec).shl(1) * &total).hi_f64();
    HolderData {
        theta: BigRational::from_integer(1.into()),
        c,
    }
}

/// Holder data with exponent `theta` in `(0, 1]`, using the torus diameter
/// `sqrt(2)/2`.
pub fn holder_constant_with_theta(phi: &TrigPolynomial, theta: BigRational) -> HolderData {
    let base = holder_constant(phi);
    let t = rational_to_f64(&theta);
    let diam = next_up(core::f64::consts::FRAC_1_SQRT_2);
    // pow may be off by an ulp or two; pad upward
    let factor = next_up(next_up(libm::pow(diam, 1.0 - t)));
    HolderData {
        theta,
        c: next_up(next_up(base.c * factor)),
    }
}

/// Reusable evaluator at a fixed precision.
#[derive(Clone, Debug)]
pub struct Evaluator {
    ctx: TrigContext,
}

impl Evaluator {
    pub fn new(precision_bits: u32) -> Self {
        Evaluator {
            ctx: TrigContext::new(precision_bits),
        }
    }

    pub fn precision(&self) -> u32 {
        self.ctx.prec()
    }

    fn phase(&self, k: &[BigInt; 2], x: &[QuadExt; 2]) -> Interval {
        let kx = &x[0].scale_int(&k[0]) + &x[1].scale_int(&k[1]);
        kx.fract().enclose(self.ctx.work_prec())
    }

    /// Rigorous enclosure of `phi` at a point with exact coordinates.
    pub fn eval_coords(&self, phi: &TrigPolynomial, x: &[QuadExt; 2]) -> Interval {
        let w = self.ctx.work_prec();
        let rational = match (x[0].to_rational(), x[1].to_rational()) {
            (Some(a), Some(b)) => Some([a, b]),
            _ => None,
        };
        let mut acc = Interval::from_rational(&phi.constant, w);
        for (k, (a, b)) in &phi.terms {
            let (c, s) = match &rational {
                Some([r1, r2]) => {
                    let r = BigRational::from_integer(k[0].clone()) * r1 + BigRational::from_integer(k[1].clone()) * r2;
                    self.ctx.cos_sin_2pi_rational(&r)
                }
                None => self.ctx.cos_sin_2pi(&self.phase(k, x)),
            };
            if !a.is_zero() {
                acc = &acc + &(&Interval::from_rational(a, w) * &c);
            }
            if !b.is_zero() {
                acc = &acc + &(&Interval::from_rational(b, w) * &s);
            }
        }
        acc
    }

    pub fn eval(&self, phi: &TrigPolynomial, pt: &TorusPoint) -> Interval {
        self.eval_coords(phi, pt.coords())
    }

    /// Sum of `phi` over the given points.
    pub fn sum<'a>(&self, phi: &TrigPolynomial, points: impl IntoIterator<Item = &'a TorusPoint>) -> SumEnclosure {
        let mut total = Interval::zero();
        let mut n = 0u64;
        for p in points {
            total = &total + &self.eval(phi, p);
            n += 1;
        }
        SumEnclosure {
            interval: total,
            term_count: n,
        }
    }

    /// Birkhoff sum over one minimal period.
    pub fn birkhoff_sum(&self, phi: &TrigPolynomial, z: &PeriodicPoint) -> SumEnclosure {
        self.sum(phi, z.orbit())
    }
}

/// Rigorous enclosure of `phi(pt)`.
pub fn eval(phi: &TrigPolynomial, pt: &TorusPoint, precision_bits: u32) -> Interval {
    Evaluator::new(precision_bits).eval(phi, pt)
}

/// Rigorous enclosure of the Birkhoff sum of `phi` over the orbit of `z`.
pub fn birkhoff_sum(phi: &TrigPolynomial, z: &PeriodicPoint, precision_bits: u32) -> SumEnclosure {
    Evaluator::new(precision_bits).birkhoff_sum(phi, z)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumEnclosure {
    pub interval: Interval,
    pub term_count: u64,
}

impl SumEnclosure {
    pub fn lo(&self) -> f64 {
        self.interval.lo_f64()
    }

    pub fn hi(&self) -> f64 {
        self.interval.hi_f64()
    }

    pub fn width(&self) -> f64 {
        self.interval.width_f64()
    }
}

/// The plain Birkhoff sum along an exact list of lifted coordinates.
pub fn sum_coords<'a>(ev: &Evaluator, phi: &TrigPolynomial, pts: impl IntoIterator<Item = &'a [QuadExt; 2]>) -> Interval {
    let v: Vec<Interval> = pts.into_iter().map(|x| ev.eval_coords(phi, x)).collect();
    Interval::sum(&v)
}

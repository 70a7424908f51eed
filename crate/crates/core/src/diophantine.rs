//! Integer combinations `m a + n b` of a negative and a positive real: lattice
//! gaps, Bezout families, the window search and lattice detection.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::algebra::{ceil_div, lowest_terms, Enclose, Interval};
use crate::{Error, Result};

/// Default bound on continued-fraction denominators.
pub const DEFAULT_SEARCH_BOUND: u64 = 1_000_000_000_000;

/// Least positive element of `{k a + l b : k, l in Z}` for rational `a / b`.
pub fn gap(a: &BigRational, b: &BigRational) -> Result<BigRational> {
    let (_, k) = lowest_terms(a, b)?;
    Ok((b / BigRational::from_integer(k)).abs())
}

/// `(m0, n0)` with `m0 l + n0 k = sign` and both at least 1.
///
/// `l` and `k` must be coprime with opposite signs, so that the family
/// `(m0 + k i, n0 - l i)` grows in both components.
pub fn bezout_combo(l: &BigInt, k: &BigInt, sign: i8) -> Result<(BigInt, BigInt)> {
    if !l.gcd(k).is_one() {
        return Err(Error::NotCoprime);
    }
    if l.signum() == k.signum() {
        return Err(Error::InvalidInput("bezout_combo needs l and k of opposite signs".into()));
    }
    let e = l.extended_gcd(k);
    // e.x * l + e.y * k = gcd = +-1
    let s = BigInt::from(sign) * &e.gcd;
    let (m, n) = (e.x * &s, e.y * &s);
    let (kk, ll) = (k.abs(), l.abs());
    let one = BigInt::one();
    // both components move by (|k|, |l|) per family step
    let need_m = ceil_div(&(&one - &m), &kk);
    let need_n = ceil_div(&(&one - &n), &ll);
    let i = need_m.max(need_n);
    let dir = if k.is_positive() { BigInt::one() } else { -BigInt::one() };
    Ok(ari_family(&m, &n, l, k, &(i * dir)))
}

/// The `i0`-th member `(m0 + k i0, n0 - l i0)` of the Bezout family.
pub fn ari_family(m0: &BigInt, n0: &BigInt, l: &BigInt, k: &BigInt, i0: &BigInt) -> (BigInt, BigInt) {
    (m0 + k * i0, n0 - l * i0)
}

/// Parameters of a window search.
#[derive(Clone, Debug)]
pub struct ComboQuery {
    /// Window centre.
    pub center: BigRational,
    /// Window half-width (the window is open).
    pub half_width: BigRational,
    pub k_min: u64,
    pub search_bound: u64,
    /// Starting precision for the enclosures of `a` and `b`.
    pub precision_bits: u32,
    pub precision_ceiling: u32,
}

impl ComboQuery {
    pub fn new(center: BigRational, half_width: BigRational, k_min: u64) -> Self {
        ComboQuery {
            center,
            half_width,
            k_min,
            search_bound: DEFAULT_SEARCH_BOUND,
            precision_bits: 128,
            precision_ceiling: 4096,
        }
    }

    fn lo(&self) -> BigRational {
        &self.center - &self.half_width
    }

    fn hi(&self) -> BigRational {
        &self.center + &self.half_width
    }
}

/// One tried combination.
#[derive(Clone, Debug, PartialEq)]
pub struct NearMiss {
    pub m: BigInt,
    pub n: BigInt,
    pub value: f64,
}

/// Why no combination reached the window.
#[derive(Clone, Debug, PartialEq)]
pub struct Obstruction {
    pub best_gap: f64,
    /// `Some(c)` when the inputs looked commensurable with step `c`.
    pub lattice: Option<f64>,
    pub evidence: Vec<NearMiss>,
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "smallest positive combination {:.6e}", self.best_gap)?;
        if let Some(c) = self.lattice {
            write!(f, ", values lie on the lattice {:.9}Z", c)?;
        }
        write!(f, " ({} near misses)", self.evidence.len())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ComboResult {
    Found {
        m: BigInt,
        n: BigInt,
        value: Interval,
        precision_bits: u32,
    },
    Obstructed(Obstruction),
}

fn interval_mid(iv: &Interval) -> BigRational {
    (iv.lo_rational() + iv.hi_rational()) / BigRational::from_integer(2.into())
}

fn rational_to_f64(r: &BigRational) -> f64 {
    Interval::from_rational(r, 64).mid_f64()
}

/// Convergents `p/q` of a positive rational, in order.
fn convergents(x: &BigRational, bound: &BigInt) -> Vec<(BigInt, BigInt)> {
    let mut out = Vec::new();
    let (mut num, mut den) = (x.numer().clone(), x.denom().clone());
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    while !den.is_zero() {
        let (a, r) = num.div_mod_floor(&den);
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if &q2 > bound {
            break;
        }
        out.push((p2.clone(), q2.clone()));
        p0 = core::mem::replace(&mut p1, p2);
        q0 = core::mem::replace(&mut q1, q2);
        num = core::mem::replace(&mut den, r);
    }
    out
}

enum Verdict {
    Inside(Interval),
    Outside(f64),
    Undecided,
}

struct Searcher<'a> {
    a: &'a dyn Enclose,
    b: &'a dyn Enclose,
    query: &'a ComboQuery,
    lo: BigRational,
    hi: BigRational,
    undecided: bool,
}

impl Searcher<'_> {
    /// Rigorous check of `m a + n b`, refining precision while undecided.
    fn check(&mut self, m: &BigInt, n: &BigInt, start_prec: u32) -> (Verdict, u32) {
        let mut prec = start_prec;
        loop {
            let v = &self.a.enclose(prec).mul_int(m) + &self.b.enclose(prec).mul_int(n);
            if v.strictly_inside(&self.lo, &self.hi) {
                return (Verdict::Inside(v), prec);
            }
            if v.misses_open(&self.lo, &self.hi) {
                return (Verdict::Outside(v.mid_f64()), prec);
            }
            if prec >= self.query.precision_ceiling {
                self.undecided = true;
                return (Verdict::Undecided, prec);
            }
            prec = (prec * 2).min(self.query.precision_ceiling);
        }
    }
}

/// Number of multipliers `m` tried directly before the continued-fraction walk.
const SCAN_LIMIT: u64 = 4096;

/// Finds `m, n >= k_min` with `m a + n b` strictly inside the open window,
/// for `a < 0 < b` given as rigorous enclosures.
pub fn search_combo(query: &ComboQuery, a: &dyn Enclose, b: &dyn Enclose) -> Result<ComboResult> {
    let prec = query.precision_bits.max(16);
    let a0 = a.enclose(prec);
    let b0 = b.enclose(prec);
    if !a0.is_negative() || !b0.is_positive() {
        return Err(Error::InvalidInput("search_combo needs a < 0 < b".into()));
    }
    if !query.half_width.is_positive() {
        return Err(Error::InvalidInput("window half-width must be positive".into()));
    }
    let mut s = Searcher {
        a,
        b,
        query,
        lo: query.lo(),
        hi: query.hi(),
        undecided: false,
    };
    let am = -interval_mid(&a0);
    let bm = interval_mid(&b0);
    let t = query.center.clone();
    let k_min = BigInt::from(query.k_min.max(1));
    let bound = BigInt::from(query.search_bound.max(1));
    let value_of = |m: &BigInt, n: &BigInt| {
        BigRational::from_integer(n.clone()) * &bm - BigRational::from_integer(m.clone()) * &am
    };

    // small multipliers first: for each m the least admissible n above the window floor
    for i in 0..SCAN_LIMIT {
        let m = &k_min + BigInt::from(i);
        if m > bound {
            break;
        }
        let mr = BigRational::from_integer(m.clone());
        let n: BigInt = ((&s.lo + &mr * &am) / &bm).floor().to_integer() + 1;
        let n = n.max(k_min.clone());
        if n > bound || value_of(&m, &n) >= s.hi {
            continue;
        }
        if let (Verdict::Inside(value), precision_bits) = s.check(&m, &n, prec) {
            return Ok(ComboResult::Found {
                m,
                n,
                value,
                precision_bits,
            });
        }
    }

    let mut best_gap: Option<BigRational> = None;
    let mut lattice: Option<BigRational> = None;
    let mut evidence = Vec::new();

    // greedy walk over generators of decreasing size, keeping the residual's sign
    let mut generators = alloc::vec![(BigInt::zero(), BigInt::one()), (BigInt::one(), BigInt::zero())];
    generators.extend(convergents(&(&am / &bm), &bound).into_iter().map(|(p, q)| (q, p)));
    let (mut m, mut n) = (k_min.clone(), k_min.clone());
    let mut residual = &t - value_of(&m, &n);
    for (gm, gn) in generators {
        let g_iv = &a0.mul_int(&gm) + &b0.mul_int(&gn);
        if g_iv.contains_zero() {
            let step = &bm / BigRational::from_integer(gm.clone());
            if best_gap.as_ref().is_none_or(|g| &step < g) {
                best_gap = Some(step.clone());
            }
            lattice = Some(step.clone());
            if let Some(found) = lattice_place(&mut s, &gn, &gm, &step, &k_min, (&am, &bm), prec, &mut evidence)? {
                return Ok(found);
            }
            break;
        }
        let g = value_of(&gm, &gn);
        if best_gap.as_ref().is_none_or(|b| &g.abs() < b) {
            best_gap = Some(g.abs());
        }
        if residual.is_zero() || residual.is_positive() != g.is_positive() {
            continue;
        }
        let h = (&residual / &g).floor().to_integer();
        for dh in [0i64, 1] {
            let hh = &h + dh;
            let (cm, cn) = (&m + &hh * &gm, &n + &hh * &gn);
            if cm > bound || cn > bound {
                continue;
            }
            let r = &t - value_of(&cm, &cn);
            if r.abs() >= query.half_width {
                continue;
            }
            match s.check(&cm, &cn, prec) {
                (Verdict::Inside(value), precision_bits) => {
                    return Ok(ComboResult::Found {
                        m: cm,
                        n: cn,
                        value,
                        precision_bits,
                    })
                }
                (Verdict::Outside(v), _) => evidence.push(NearMiss { m: cm, n: cn, value: v }),
                (Verdict::Undecided, _) => {}
            }
        }
        m += &h * &gm;
        n += &h * &gn;
        residual = &t - value_of(&m, &n);
        if m > bound || n > bound {
            break;
        }
    }
    if evidence.is_empty() {
        let v = value_of(&m, &n);
        evidence.push(NearMiss { m, n, value: rational_to_f64(&v) });
    }
    if s.undecided {
        return Err(Error::PrecisionExhausted(query.precision_ceiling));
    }
    evidence.sort_by(|x, y| {
        let t = rational_to_f64(&t);
        (x.value - t).abs().total_cmp(&(y.value - t).abs())
    });
    evidence.truncate(8);
    Ok(ComboResult::Obstructed(Obstruction {
        best_gap: best_gap.as_ref().map_or(f64::INFINITY, rational_to_f64),
        lattice: lattice.as_ref().map(rational_to_f64),
        evidence,
    }))
}

/// Placement when `q a + p b` is indistinguishable from zero: the reachable
/// values are then the multiples of `b / q`. `am`, `bm` are midpoints of `-a`
/// and `b`, used to skip candidates on or outside the window edges.
#[allow(clippy::too_many_arguments)]
fn lattice_place(
    s: &mut Searcher<'_>,
    p: &BigInt,
    q: &BigInt,
    step: &BigRational,
    k_min: &BigInt,
    (am, bm): (&BigRational, &BigRational),
    prec: u32,
    evidence: &mut Vec<NearMiss>,
) -> Result<Option<ComboResult>> {
    let (m0, n0) = bezout_combo(&-p, q, 1)?;
    let t = &s.query.center;
    let j0 = (t / step).round().to_integer();
    for dj in [0i64, -1, 1] {
        let j = &j0 + dj;
        let jm = &j * &m0;
        let jn = &j * &n0;
        // add the null combination (q, p) until both are at least k_min
        let i = ceil_div(&(k_min - &jm), q).max(ceil_div(&(k_min - &jn), p));
        let m = &jm + &i * q;
        let n = &jn + &i * p;
        let approx = BigRational::from_integer(n.clone()) * bm - BigRational::from_integer(m.clone()) * am;
        let bound = BigInt::from(s.query.search_bound.max(1));
        if approx <= s.lo || approx >= s.hi || m > bound || n > bound {
            evidence.push(NearMiss {
                m,
                n,
                value: rational_to_f64(&approx),
            });
            continue;
        }
        match s.check(&m, &n, prec) {
            (Verdict::Inside(value), precision_bits) => {
                return Ok(Some(ComboResult::Found {
                    m,
                    n,
                    value,
                    precision_bits,
                }))
            }
            (Verdict::Outside(v), _) => evidence.push(NearMiss { m, n, value: v }),
            (Verdict::Undecided, _) => {}
        }
    }
    Ok(None)
}

/// Outcome of [`detect_lattice`].
#[derive(Clone, Debug, PartialEq)]
pub enum LatticeDetection {
    /// Every value lies within the tolerance of `c Z`.
    Lattice(f64),
    NoLattice,
    /// Every value is within the tolerance of zero.
    AllVanish,
}

impl LatticeDetection {
    pub fn step(&self) -> Option<f64> {
        match self {
            LatticeDetection::Lattice(c) => Some(*c),
            _ => None,
        }
    }
}

/// Smallest step of a common real lattice, by a tolerant Euclidean algorithm.
///
/// Steps below `16 * tol` are rejected: every value is trivially close to
/// such a fine lattice.
pub fn detect_lattice(values: &[Interval], tol: f64) -> LatticeDetection {
    let mut mags: Vec<f64> = values
        .iter()
        .map(|v| v.mid_f64().abs())
        .filter(|v| *v > tol)
        .collect();
    if mags.is_empty() {
        return LatticeDetection::AllVanish;
    }
    mags.sort_by(|x, y| y.total_cmp(x));
    let mut c = mags[0];
    for &v in &mags[1..] {
        let (mut x, mut y) = (c.max(v), c.min(v));
        while y > tol {
            let r = x % y;
            let r = if y - r <= tol { 0.0 } else { r };
            x = y;
            y = r;
        }
        c = x;
        if c <= 16.0 * tol {
            return LatticeDetection::NoLattice;
        }
    }
    let fits = values.iter().all(|v| {
        let x = v.mid_f64();
        (x - c * libm::round(x / c)).abs() <= tol
    });
    if fits {
        LatticeDetection::Lattice(c)
    } else {
        LatticeDetection::NoLattice
    }
}

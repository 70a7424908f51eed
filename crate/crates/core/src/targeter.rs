//! Certified target hitting: a periodic orbit whose Birkhoff sum lands in a
//! prescribed open window, together with a replayable certificate.
//!
//! The sum along the four-segment pseudo-orbit splits as
//! `2 m S(p) + 2 n S(q) + K` up to four series tails, so the window search runs
//! on `m (2 S(p)) + n (2 S(q))` around `K0 - K`. The error `eps` is split into
//! four series slots of `eps/9`, a shadow slot of `4 eps/9` and a window slot of
//! `eps/9`.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::algebra::{mat_pow, EncloseFn, IntMat2, Interval};
use crate::diophantine::{
    detect_lattice, search_combo, ComboQuery, ComboResult, LatticeDetection, NearMiss, Obstruction,
    DEFAULT_SEARCH_BOUND,
};
use crate::heteroclinic::{hetero_pair, HeteroclinicPair, DEFAULT_SEARCH_RADIUS};
use crate::observable::{holder_constant, next_up, Evaluator, HolderData, TrigPolynomial};
use crate::shadowing::{
    build_pseudo_orbit_capped, is_periodic, mu_constant, shadow_distance, shadow_periodic, ShadowCertificate,
    DEFAULT_LENGTH_CAP,
};
use crate::torus::{apply, enumerate_periodic, PeriodicPoint, System, TorusPoint, DEFAULT_ENUMERATION_CAP};
use crate::{Error, Result};

/// K enclosures use tails this many times smaller than the truncation target.
const K_TAIL_DIVISOR: u64 = 1024;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn down_f64(r: &BigRational) -> f64 {
    Interval::from_rational(r, 64).lo_f64()
}

fn exact(x: f64) -> BigRational {
    Interval::from_f64(x).lo_rational()
}

/// `x^theta` rounded up, for `x >= 0`.
fn pow_up(x: f64, theta: f64) -> f64 {
    if theta == 1.0 {
        x
    } else {
        next_up(next_up(libm::pow(x, theta)))
    }
}

/// Split of the tolerance `eps` and what each part actually used.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorBudget {
    pub eps: BigRational,
    /// Tail plus enclosure radius of each series constant.
    pub series_used: [f64; 4],
    /// A posteriori `L C max_dist^theta`.
    pub shadow_used: f64,
    /// A priori `L C (mu delta)^theta`.
    pub shadow_a_priori: f64,
    /// Distance of the combination value from the window centre.
    pub window_used: f64,
}

impl ErrorBudget {
    pub fn new(eps: BigRational) -> Self {
        ErrorBudget {
            eps,
            series_used: [0.0; 4],
            shadow_used: 0.0,
            shadow_a_priori: 0.0,
            window_used: 0.0,
        }
    }

    pub fn series_slot(&self) -> BigRational {
        &self.eps * rat(1, 9)
    }

    pub fn shadow_slot(&self) -> BigRational {
        &self.eps * rat(4, 9)
    }

    pub fn window_slot(&self) -> BigRational {
        &self.eps * rat(1, 9)
    }

    pub fn slots(&self) -> [BigRational; 6] {
        let s = self.series_slot();
        [s.clone(), s.clone(), s.clone(), s, self.shadow_slot(), self.window_slot()]
    }

    /// Every slot holds its consumption and the total stays below `eps`.
    pub fn closes(&self) -> bool {
        let series = down_f64(&self.series_slot());
        let total: f64 = self.series_used.iter().sum::<f64>() + self.shadow_used + self.window_used;
        self.series_used.iter().all(|u| *u <= series)
            && self.shadow_used <= down_f64(&self.shadow_slot())
            && self.window_used <= down_f64(&self.window_slot())
            && total <= down_f64(&self.eps)
    }
}

/// Geometric tail data for the four series.
#[derive(Clone, Debug, PartialEq)]
pub struct TailBound {
    /// `C (H delta0)^theta`.
    pub scale: f64,
    /// `lambda^theta`.
    pub ratio: f64,
}

impl TailBound {
    pub fn new(pair: &HeteroclinicPair, holder: &HolderData) -> Self {
        let theta = holder.theta_f64();
        let hd = (&Interval::from_f64(pair.h) * &Interval::from_f64(pair.delta0)).hi_f64();
        let scale = (&Interval::from_f64(holder.c) * &Interval::from_f64(pow_up(hd, theta))).hi_f64();
        TailBound {
            scale,
            ratio: pow_up(pair.lam, theta).min(1.0),
        }
    }

    /// Upper bound on the sum of all terms with index `>= n`.
    pub fn at(&self, n: u64) -> f64 {
        if self.scale == 0.0 {
            return 0.0;
        }
        let one = Interval::from_int(1);
        let r = Interval::from_f64(self.ratio);
        let Some(geo) = one.checked_div(&(&one - &r)) else { return f64::INFINITY };
        let Ok(n) = u32::try_from(n) else { return 0.0 };
        (&(&Interval::from_f64(self.scale) * &r.powi(n)) * &geo).hi_f64()
    }

    /// Least `n` with `at(n) <= target`.
    pub fn first_below(&self, target: f64) -> Option<u64> {
        if self.scale == 0.0 {
            return Some(0);
        }
        if self.ratio.is_nan() || self.ratio >= 1.0 || target <= 0.0 {
            return None;
        }
        let guess = libm::log(target / self.at(0)) / libm::log(self.ratio);
        let mut n = if guess.is_finite() && guess > 0.0 { guess as u64 } else { 0 };
        while n > 0 && self.at(n - 1) <= target {
            n -= 1;
        }
        for _ in 0..100_000 {
            if self.at(n) <= target {
                return Some(n);
            }
            n += 1;
        }
        None
    }
}

/// The four series constants and their sum.
#[derive(Clone, Debug)]
pub struct KConstants {
    pub k: [Interval; 4],
    pub total: Interval,
    /// Terms summed for each enclosure.
    pub terms: [u64; 4],
    /// Tail bound folded into each enclosure.
    pub tails: [f64; 4],
    /// Least segment length whose tail fits half a series slot.
    pub truncation: [u64; 4],
    pub tail: TailBound,
}

/// Encloses the four series
///
/// * `K1 = sum_{n>=1} phi(f^-n y) - phi(f^-n p)`
/// * `K2 = sum_{n>=0} phi(f^n y) - phi(f^n q)`
/// * `K3 = sum_{n>=1} phi(f^-n x) - phi(f^-n q)`
/// * `K4 = sum_{n>=0} phi(f^n x) - phi(f^n p)`
pub fn k_constants(
    sys: &System,
    pair: &HeteroclinicPair,
    phi: &TrigPolynomial,
    holder: &HolderData,
    budget: &ErrorBudget,
    precision_bits: u32,
) -> Result<KConstants> {
    let tail = TailBound::new(pair, holder);
    let slot = down_f64(&budget.series_slot());
    let trunc = tail.first_below(slot / 2.0).ok_or(Error::PrecisionExhausted(precision_bits))?;
    let fine = tail
        .first_below(slot / K_TAIL_DIVISOR as f64)
        .ok_or(Error::PrecisionExhausted(precision_bits))?;
    let inv = sys.matrix.inverse()?;
    let ev = Evaluator::new(precision_bits);

    let series = |start: &TorusPoint, anchor: &PeriodicPoint, forward: bool| -> (Interval, u64) {
        let first = if forward { 0 } else { 1 };
        let end = fine.max(first);
        let map = if forward { &sys.matrix } else { &inv };
        let orbit = anchor.orbit();
        let per = orbit.len() as u64;
        let mut pt = start.clone();
        if !forward {
            pt = apply(map, &pt);
        }
        let mut acc = Interval::zero();
        for n in first..end {
            let idx = if forward { n % per } else { (per - n % per) % per };
            let term = &ev.eval(phi, &pt) - &ev.eval(phi, &orbit[idx as usize]);
            acc = &acc + &term;
            pt = apply(map, &pt);
        }
        (acc, end - first)
    };
    let parts = [
        series(pair.y(), &pair.p, false),
        series(pair.y(), &pair.q, true),
        series(pair.x(), &pair.q, false),
        series(pair.x(), &pair.p, true),
    ];
    let t = tail.at(fine);
    let t_iv = Interval::from_f64(t);
    let widen = |iv: &Interval| {
        if t == 0.0 {
            iv.clone()
        } else {
            iv + &(&t_iv - &t_iv.shl(1))
        }
    };
    let k = [widen(&parts[0].0), widen(&parts[1].0), widen(&parts[2].0), widen(&parts[3].0)];
    let total = Interval::sum(k.iter());
    Ok(KConstants {
        total,
        terms: [parts[0].1, parts[1].1, parts[2].1, parts[3].1],
        tails: [t; 4],
        truncation: [trunc.max(1), trunc.max(1), trunc.max(1), trunc.max(1)],
        k,
        tail,
    })
}

/// Segment lengths for the multipliers `(m, n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthPlan {
    pub m: BigInt,
    pub n: BigInt,
    /// `[L1, L2, L3, L4]` with `L1 = L4 = m pi(p)` and `L2 = L3 = n pi(q)`.
    pub lengths: [u64; 4],
    pub total: u64,
    /// `min L_i / max L_i`.
    pub alpha: BigRational,
}

impl LengthPlan {
    pub fn min_len(&self) -> u64 {
        *self.lengths.iter().min().expect("four lengths")
    }
}

pub fn plan_lengths(m: &BigInt, n: &BigInt, period_p: u64, period_q: u64) -> Result<LengthPlan> {
    if !m.is_positive() || !n.is_positive() {
        return Err(Error::InvalidInput("multipliers must be positive".into()));
    }
    let too_long = || Error::LengthCapExceeded(u64::MAX);
    let lp = (m * period_p).to_u64().ok_or_else(too_long)?;
    let lq = (n * period_q).to_u64().ok_or_else(too_long)?;
    let total = lp.checked_mul(2).and_then(|a| a.checked_add(lq.checked_mul(2)?)).ok_or_else(too_long)?;
    Ok(LengthPlan {
        m: m.clone(),
        n: n.clone(),
        lengths: [lp, lq, lq, lp],
        total,
        alpha: BigRational::new(lp.min(lq).into(), lp.max(lq).into()),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TargetConfig {
    pub precision_bits: u32,
    pub precision_ceiling: u32,
    pub search_radius: u32,
    pub search_bound: u64,
    pub length_cap: u64,
    pub max_rounds: u32,
    /// Retry with other negative-sum anchors when the pair looks commensurable.
    pub rescan: bool,
    /// Period range for anchor rescans and the lattice diagnostic.
    pub rescan_period_max: u64,
    pub enumeration_cap: u64,
    pub lattice_tol: f64,
}

impl Default for TargetConfig {
    fn default() -> Self {
        TargetConfig {
            precision_bits: 128,
            precision_ceiling: 4096,
            search_radius: DEFAULT_SEARCH_RADIUS,
            search_bound: DEFAULT_SEARCH_BOUND,
            length_cap: DEFAULT_LENGTH_CAP,
            max_rounds: 16,
            rescan: true,
            rescan_period_max: 8,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            lattice_tol: 1e-9,
        }
    }
}

/// One escalation round.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundTrace {
    pub k: u64,
    pub m: BigInt,
    pub n: BigInt,
    pub total_len: u64,
    /// Rounded-up `2 H lam^L0 delta0`.
    pub delta_bound: f64,
    pub shadow_a_priori: f64,
    pub accepted: bool,
}

#[derive(Clone, Debug)]
pub struct TargetCertificate {
    pub matrix: IntMat2,
    pub phi: TrigPolynomial,
    pub k0: BigRational,
    pub eps: BigRational,
    pub search_radius: u32,
    pub pair: HeteroclinicPair,
    /// `S(p)` and `S(q)`.
    pub anchor_sums: [Interval; 2],
    pub holder: HolderData,
    pub plan: LengthPlan,
    pub window_center: BigRational,
    pub window_half_width: BigRational,
    /// `m (2 S(p)) + n (2 S(q))`.
    pub combo_value: Interval,
    pub k_constants: KConstants,
    pub shadow: ShadowCertificate,
    /// Sum over the `L` points of the shadow orbit.
    pub sum: Interval,
    pub sum_precision: u32,
    /// Sum over the minimal period, when it is shorter than `L`.
    pub minimal_sum: Option<Interval>,
    pub budget: ErrorBudget,
    pub rounds: Vec<RoundTrace>,
    pub notes: Vec<String>,
}

impl TargetCertificate {
    pub fn window(&self) -> (BigRational, BigRational) {
        (&self.k0 - &self.eps, &self.k0 + &self.eps)
    }

    /// The inputs needed to re-check the claim from scratch.
    pub fn replay(&self) -> Replay {
        Replay {
            matrix: self.matrix.clone(),
            phi: self.phi.clone(),
            p: self.pair.p.point().clone(),
            q: self.pair.q.point().clone(),
            k0: self.k0.clone(),
            eps: self.eps.clone(),
            search_radius: self.search_radius,
            lengths: self.plan.lengths,
            z: self.shadow.z.point().clone(),
        }
    }
}

fn scaled_sum(ev: &Evaluator, phi: &TrigPolynomial, z: &PeriodicPoint, len: u64) -> Interval {
    let reps = len / z.min_period();
    ev.birkhoff_sum(phi, z).interval.mul_int(&BigInt::from(reps))
}

/// Sum over `len` points of the orbit of `z`, refined until it decides
/// membership in the open window. Returns `(sum, precision, inside)`.
fn decide_sum(
    phi: &TrigPolynomial,
    z: &PeriodicPoint,
    len: u64,
    lo: &BigRational,
    hi: &BigRational,
    mut prec: u32,
    ceiling: u32,
) -> Result<(Interval, u32, bool)> {
    loop {
        let s = scaled_sum(&Evaluator::new(prec), phi, z, len);
        if s.strictly_inside(lo, hi) {
            return Ok((s, prec, true));
        }
        if s.misses_open(lo, hi) {
            return Ok((s, prec, false));
        }
        if prec >= ceiling {
            return Err(Error::PrecisionExhausted(ceiling));
        }
        prec = (prec * 2).min(ceiling);
    }
}

fn anchor_sums(phi: &TrigPolynomial, p: &PeriodicPoint, q: &PeriodicPoint, prec: u32) -> [Interval; 2] {
    let ev = Evaluator::new(prec);
    [ev.birkhoff_sum(phi, p).interval, ev.birkhoff_sum(phi, q).interval]
}

/// Produces a certified periodic point `z` with the sum over its pseudo-orbit
/// period strictly inside `(k0 - eps, k0 + eps)`.
///
/// When `S(p) < 0 < S(q)` fails, the periodic sums up to the rescan period are
/// tested for a common lattice `c Z`; if the window misses it the result is
/// [`Error::Obstructed`] with `best_gap = c` and the two lattice values around
/// `k0` as evidence (`m` is the multiple of `c`).
pub fn hit_target(
    sys: &System,
    phi: &TrigPolynomial,
    p: &PeriodicPoint,
    q: &PeriodicPoint,
    k0: &BigRational,
    eps: &BigRational,
    config: &TargetConfig,
) -> Result<TargetCertificate> {
    if !eps.is_positive() {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    let prec = config.precision_bits.max(32);
    let sums = anchor_sums(phi, p, q, prec);
    if !(sums[0].is_negative() && sums[1].is_positive()) {
        return Err(hypothesis_failure(sys, phi, k0, eps, config));
    }
    match hit_with_anchors(sys, phi, p, q, sums.clone(), k0, eps, config) {
        Err(Error::Obstructed(ob)) if config.rescan && ob.lattice.is_some() => {
            rescan(sys, phi, p, q, k0, eps, config).ok_or(Error::Obstructed(ob))
        }
        other => other,
    }
}

/// Retries with other negative-sum periodic anchors in place of `p`.
fn rescan(
    sys: &System,
    phi: &TrigPolynomial,
    p: &PeriodicPoint,
    q: &PeriodicPoint,
    k0: &BigRational,
    eps: &BigRational,
    config: &TargetConfig,
) -> Option<TargetCertificate> {
    let prec = config.precision_bits.max(32);
    let ev = Evaluator::new(prec);
    for period in 1..=config.rescan_period_max {
        let set = enumerate_periodic(&sys.matrix, period, config.enumeration_cap).ok()?;
        for cand in set.primitive() {
            if cand.same_orbit(p) || cand.same_orbit(q) || !ev.birkhoff_sum(phi, cand).interval.is_negative() {
                continue;
            }
            let sums = anchor_sums(phi, cand, q, prec);
            if let Ok(mut cert) = hit_with_anchors(sys, phi, cand, q, sums, k0, eps, config) {
                cert.notes.push(format!("anchor p replaced by {} after a commensurable search", cand.point()));
                return Some(cert);
            }
        }
    }
    None
}

fn hypothesis_failure(
    sys: &System,
    phi: &TrigPolynomial,
    k0: &BigRational,
    eps: &BigRational,
    config: &TargetConfig,
) -> Error {
    let Ok(scan) = scan_density(
        sys,
        phi,
        config.rescan_period_max,
        (0.0, 0.0),
        0,
        config.precision_bits,
        config.enumeration_cap,
    ) else {
        return Error::HypothesisViolated;
    };
    let values: Vec<Interval> = scan.orbits.iter().map(|o| o.sum.clone()).collect();
    let LatticeDetection::Lattice(c) = detect_lattice(&values, config.lattice_tol) else {
        return Error::HypothesisViolated;
    };
    let cq = exact(c);
    let tol = exact(config.lattice_tol);
    let j = (k0 / &cq).floor().to_integer();
    let below = &cq * BigRational::from_integer(j.clone());
    let above = &below + &cq;
    let reachable = |v: &BigRational| (v - k0).abs() < eps + &tol;
    if reachable(&below) || reachable(&above) {
        return Error::HypothesisViolated;
    }
    let to_f = |r: &BigRational| Interval::from_rational(r, 64).mid_f64();
    Error::Obstructed(Box::new(Obstruction {
        best_gap: c,
        lattice: Some(c),
        evidence: alloc::vec![
            NearMiss {
                m: j.clone(),
                n: BigInt::zero(),
                value: to_f(&below),
            },
            NearMiss {
                m: j + 1,
                n: BigInt::zero(),
                value: to_f(&above),
            },
        ],
    }))
}

#[allow(clippy::too_many_arguments)]
fn hit_with_anchors(
    sys: &System,
    phi: &TrigPolynomial,
    p: &PeriodicPoint,
    q: &PeriodicPoint,
    sums: [Interval; 2],
    k0: &BigRational,
    eps: &BigRational,
    config: &TargetConfig,
) -> Result<TargetCertificate> {
    let prec = config.precision_bits.max(32);
    let pair = hetero_pair(sys, p, q, config.search_radius)?;
    let holder = holder_constant(phi);
    let theta = holder.theta_f64();
    let mut budget = ErrorBudget::new(eps.clone());
    let kc = k_constants(sys, &pair, phi, &holder, &budget, prec)?;

    let k_lo = kc.total.lo_rational();
    let k_hi = kc.total.hi_rational();
    let k_mid = (&k_lo + &k_hi) * rat(1, 2);
    let k_rad = (&k_hi - &k_lo) * rat(1, 2);
    let center = k0 - &k_mid;
    let half_width = budget.window_slot() - &k_rad;
    if !half_width.is_positive() {
        return Err(Error::PrecisionExhausted(prec));
    }

    let (pp, pq) = (p.min_period(), q.min_period());
    let per = [pp, pq, pq, pp];
    let mut k = (0..4).map(|i| kc.truncation[i].div_ceil(per[i])).max().unwrap_or(1).max(1);
    let mu = mu_constant(sys);
    let shadow_slot = down_f64(&budget.shadow_slot());
    let a_enc = EncloseFn(|w: u32| Evaluator::new(w).birkhoff_sum(phi, p).interval.shl(1));
    let b_enc = EncloseFn(|w: u32| Evaluator::new(w).birkhoff_sum(phi, q).interval.shl(1));
    let (win_lo, win_hi) = (k0 - eps, k0 + eps);
    let mut rounds = Vec::new();
    let mut notes = Vec::new();

    for _ in 0..config.max_rounds.max(1) {
        let mut query = ComboQuery::new(center.clone(), half_width.clone(), k);
        query.search_bound = config.search_bound;
        query.precision_bits = prec;
        query.precision_ceiling = config.precision_ceiling;
        let (m, n, combo_value) = match search_combo(&query, &a_enc, &b_enc)? {
            ComboResult::Found { m, n, value, .. } => (m, n, value),
            ComboResult::Obstructed(ob) => return Err(Error::Obstructed(Box::new(ob))),
        };
        let plan = plan_lengths(&m, &n, pp, pq)?;
        if plan.total > config.length_cap {
            return Err(Error::LengthCapExceeded(plan.total));
        }
        let l0 = plan.min_len();
        let delta_bound = (&(&Interval::from_f64(2.0 * pair.h)
            * &Interval::from_f64(pair.lam).powi(u32::try_from(l0).unwrap_or(u32::MAX)))
            * &Interval::from_f64(pair.delta0))
            .hi_f64();
        let mu_delta = (&Interval::from_f64(mu) * &Interval::from_f64(delta_bound)).hi_f64();
        let a_priori = (&Interval::from_f64(holder.c).mul_int(&BigInt::from(plan.total))
            * &Interval::from_f64(pow_up(mu_delta, theta)))
            .hi_f64();
        let mut trace = RoundTrace {
            k,
            m: m.clone(),
            n: n.clone(),
            total_len: plan.total,
            delta_bound,
            shadow_a_priori: a_priori,
            accepted: false,
        };
        let next_k = (2 * k).max(l0 / pp.min(pq) + 1);
        if a_priori > shadow_slot {
            rounds.push(trace);
            k = next_k;
            continue;
        }

        let po = build_pseudo_orbit_capped(sys, &pair, plan.lengths, config.length_cap)?;
        let shadow = shadow_periodic(sys, &po, prec)?;
        let (sum, sum_precision, inside) =
            decide_sum(phi, &shadow.z, plan.total, &win_lo, &win_hi, prec, config.precision_ceiling)?;
        if !inside {
            notes.push(format!("round k = {}: sum left the window, escalating", k));
            rounds.push(trace);
            k = next_k;
            continue;
        }
        trace.accepted = true;
        rounds.push(trace);

        for i in 0..4 {
            let rad = (&kc.k[i].hi_rational() - &kc.k[i].lo_rational()) * rat(1, 2);
            budget.series_used[i] = (&Interval::from_f64(kc.tail.at(plan.lengths[i]))
                + &Interval::from_rational(&rad, 64))
                .hi_f64();
        }
        budget.shadow_a_priori = a_priori;
        budget.shadow_used = (&Interval::from_f64(holder.c).mul_int(&BigInt::from(plan.total))
            * &Interval::from_f64(pow_up(shadow.max_dist.hi_f64(), theta)))
            .hi_f64();
        budget.window_used = (&combo_value - &Interval::from_rational(&center, prec)).abs().hi_f64();

        let minimal_sum = if shadow.z.min_period() < plan.total {
            notes.push(format!(
                "minimal period {} is shorter than the pseudo-orbit length {}",
                shadow.z.min_period(),
                plan.total
            ));
            Some(Evaluator::new(sum_precision).birkhoff_sum(phi, &shadow.z).interval)
        } else {
            None
        };
        if !budget.closes() {
            notes.push("error budget does not close; membership rests on the enclosure alone".into());
        }
        return Ok(TargetCertificate {
            matrix: sys.matrix.clone(),
            phi: phi.clone(),
            k0: k0.clone(),
            eps: eps.clone(),
            search_radius: config.search_radius,
            pair,
            anchor_sums: sums,
            holder,
            plan,
            window_center: center,
            window_half_width: half_width,
            combo_value,
            k_constants: kc,
            shadow,
            sum,
            sum_precision,
            minimal_sum,
            budget,
            rounds,
            notes,
        });
    }
    Err(Error::LengthCapExceeded(rounds.last().map_or(0, |r| r.total_len)))
}

/// Everything a replay needs: the system, the request, the anchors, the
/// segment lengths and the claimed periodic point.
#[derive(Clone, Debug, PartialEq)]
pub struct Replay {
    pub matrix: IntMat2,
    pub phi: TrigPolynomial,
    pub p: TorusPoint,
    pub q: TorusPoint,
    pub k0: BigRational,
    pub eps: BigRational,
    pub search_radius: u32,
    pub lengths: [u64; 4],
    pub z: TorusPoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    System,
    Hypothesis,
    Pair,
    Periodicity,
    Shadow,
    Sum,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::System => "system",
            Check::Hypothesis => "hypothesis",
            Check::Pair => "pair",
            Check::Periodicity => "periodicity",
            Check::Shadow => "shadow",
            Check::Sum => "sum",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyFailure {
    pub check: Check,
    pub detail: String,
}

impl core::fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{} check failed: {}", self.check.name(), self.detail)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub anchor_sums: [Interval; 2],
    pub period: u64,
    pub min_period: u64,
    pub max_dist: Interval,
    pub delta: Interval,
    pub mu: f64,
    pub sum: Interval,
    pub precision_bits: u32,
}

/// Re-runs every check of a certificate at `precision_bits`: anchor sums,
/// heteroclinic pair, exact periodicity of `z`, shadow distance and the
/// window membership of the sum.
pub fn verify_certificate(replay: &Replay, precision_bits: u32) -> core::result::Result<VerifyReport, VerifyFailure> {
    let fail = |check: Check, detail: String| VerifyFailure { check, detail };
    let prec = precision_bits.max(32);
    let sys = System::new(replay.matrix.clone()).map_err(|e| fail(Check::System, format!("{}", e)))?;
    let a = &sys.matrix;
    let total: u64 = replay.lengths.iter().sum();
    let cap = DEFAULT_ENUMERATION_CAP;
    let p = PeriodicPoint::new(a, replay.p.clone(), cap).map_err(|e| fail(Check::Hypothesis, format!("p: {}", e)))?;
    let q = PeriodicPoint::new(a, replay.q.clone(), cap).map_err(|e| fail(Check::Hypothesis, format!("q: {}", e)))?;
    let sums = anchor_sums(&replay.phi, &p, &q, prec);
    if !(sums[0].is_negative() && sums[1].is_positive()) {
        return Err(fail(Check::Hypothesis, "S(p) < 0 < S(q) is not certified".into()));
    }
    let pair = hetero_pair(&sys, &p, &q, replay.search_radius).map_err(|e| fail(Check::Pair, format!("{}", e)))?;

    match is_periodic(a, &replay.z, total) {
        Ok(true) => {}
        Ok(false) => return Err(fail(Check::Periodicity, format!("(A^{} - I) z is not integral", total))),
        Err(e) => return Err(fail(Check::Periodicity, format!("{}", e))),
    }
    let z = PeriodicPoint::new(a, replay.z.clone(), total).map_err(|e| fail(Check::Periodicity, format!("{}", e)))?;

    let po = build_pseudo_orbit_capped(&sys, &pair, replay.lengths, u64::MAX)
        .map_err(|e| fail(Check::Shadow, format!("{}", e)))?;
    let back = mat_pow(a, -(replay.lengths[0] as i64)).map_err(|e| fail(Check::Shadow, format!("{}", e)))?;
    let z_start = apply(&back, &replay.z);
    let max_dist = shadow_distance(&sys, &z_start, &po, prec);
    let mu = mu_constant(&sys);
    let bound = &Interval::from_f64(mu) * &po.delta;
    if max_dist.hi_rational() > bound.hi_rational() {
        return Err(fail(
            Check::Shadow,
            format!("distance {:e} exceeds mu * delta = {:e}", max_dist.hi_f64(), bound.hi_f64()),
        ));
    }

    let (lo, hi) = (&replay.k0 - &replay.eps, &replay.k0 + &replay.eps);
    let (sum, used, inside) = decide_sum(&replay.phi, &z, total, &lo, &hi, prec, prec.saturating_mul(8))
        .map_err(|e| fail(Check::Sum, format!("{}", e)))?;
    if !inside {
        return Err(fail(
            Check::Sum,
            format!("sum [{:e}, {:e}] is outside the window", sum.lo_f64(), sum.hi_f64()),
        ));
    }
    Ok(VerifyReport {
        anchor_sums: sums,
        period: total,
        min_period: z.min_period(),
        max_dist,
        delta: po.delta,
        mu,
        sum,
        precision_bits: used,
    })
}

/// Minimal-period Birkhoff sum of one orbit.
#[derive(Clone, Debug)]
pub struct OrbitSum {
    pub period: u64,
    pub representative: TorusPoint,
    pub sum: Interval,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: u64,
}

#[derive(Clone, Debug)]
pub struct DensityScan {
    pub period_max: u64,
    /// Ordered by period, then by representative.
    pub orbits: Vec<OrbitSum>,
    pub window: (f64, f64),
    pub histogram: Vec<HistogramBin>,
}

impl DensityScan {
    /// Largest gap between consecutive distinct sums inside the window.
    pub fn max_gap(&self) -> Option<f64> {
        self.max_gap_within(self.window, self.period_max)
    }

    /// Largest gap among orbits of period at most `period_max`; sums whose
    /// enclosures overlap count once.
    pub fn max_gap_within(&self, window: (f64, f64), period_max: u64) -> Option<f64> {
        let (lo, hi) = window;
        let mut inside: Vec<&Interval> = self
            .orbits
            .iter()
            .filter(|o| o.period <= period_max)
            .map(|o| &o.sum)
            .filter(|s| s.lo_f64() >= lo && s.hi_f64() <= hi)
            .collect();
        inside.sort_by(|x, y| x.mid_f64().total_cmp(&y.mid_f64()));
        let mut distinct: Vec<&Interval> = Vec::new();
        for s in inside {
            match distinct.last() {
                Some(last) if last.intersects(s) => {}
                _ => distinct.push(s),
            }
        }
        distinct.windows(2).map(|w| w[1].mid_f64() - w[0].mid_f64()).reduce(f64::max)
    }
}

/// Birkhoff sums of every orbit with minimal period up to `period_max`, with a
/// histogram of those inside `window`.
pub fn scan_density(
    sys: &System,
    phi: &TrigPolynomial,
    period_max: u64,
    window: (f64, f64),
    bins: usize,
    precision_bits: u32,
    enumeration_cap: u64,
) -> Result<DensityScan> {
    let ev = Evaluator::new(precision_bits);
    let mut orbits = Vec::new();
    for n in 1..=period_max {
        let set = enumerate_periodic(&sys.matrix, n, enumeration_cap)?;
        for o in set.primitive() {
            orbits.push(OrbitSum {
                period: n,
                representative: o.point().clone(),
                sum: ev.birkhoff_sum(phi, o).interval,
            });
        }
    }
    let (lo, hi) = window;
    let mut histogram = Vec::new();
    if bins > 0 && lo < hi {
        let width = (hi - lo) / bins as f64;
        histogram = (0..bins)
            .map(|i| HistogramBin {
                lo: lo + width * i as f64,
                hi: if i + 1 == bins { hi } else { lo + width * (i + 1) as f64 },
                count: 0,
            })
            .collect();
        for o in &orbits {
            let x = o.sum.mid_f64();
            if x < lo || x > hi {
                continue;
            }
            let i = (((x - lo) / width) as usize).min(bins - 1);
            histogram[i].count += 1;
        }
    }
    Ok(DensityScan {
        period_max,
        orbits,
        window,
        histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::TorusPoint;

    fn golden() -> (System, TrigPolynomial, PeriodicPoint, PeriodicPoint) {
        let sys = System::cat_map();
        let phi = TrigPolynomial::cos(1, 0, rat(1, 1));
        let p = PeriodicPoint::new(&sys.matrix, TorusPoint::from_fractions(2, 5, 4, 5), 10).unwrap();
        let q = PeriodicPoint::new(&sys.matrix, TorusPoint::from_fractions(1, 5, 2, 5), 10).unwrap();
        (sys, phi, p, q)
    }

    #[test]
    fn budget_slots_sum_to_eps() {
        let b = ErrorBudget::new(rat(1, 10));
        let total: BigRational = b.slots().iter().sum();
        assert_eq!(total, rat(1, 10));
        assert!(b.closes());
    }

    #[test]
    fn plan_examples() {
        let plan = plan_lengths(&3.into(), &8.into(), 2, 2).unwrap();
        assert_eq!(plan.lengths, [6, 16, 16, 6]);
        assert_eq!(plan.total, 44);
        assert_eq!(plan.alpha, rat(3, 8));
        assert_eq!(plan_lengths(&4.into(), &4.into(), 3, 3).unwrap().alpha, rat(1, 1));
        assert!(plan_lengths(&0.into(), &1.into(), 1, 1).is_err());
    }

    #[test]
    fn degenerate_and_constant_constants_vanish() {
        let (sys, phi, p, q) = golden();
        let budget = ErrorBudget::new(rat(1, 10));
        let origin = PeriodicPoint::new(&sys.matrix, TorusPoint::origin(), 1).unwrap();
        let pair = HeteroclinicPair::degenerate(&sys, &origin);
        let kc = k_constants(&sys, &pair, &phi, &holder_constant(&phi), &budget, 128).unwrap();
        assert!(kc.k.iter().all(|k| k.is_zero()));

        let c = TrigPolynomial::constant(rat(3, 2));
        let pair = hetero_pair(&sys, &p, &q, 2).unwrap();
        let kc = k_constants(&sys, &pair, &c, &holder_constant(&c), &budget, 128).unwrap();
        assert!(kc.k.iter().all(|k| k.contains_rational(&BigRational::zero())));
    }

    #[test]
    fn homoclinic_constants_are_tight() {
        let sys = System::cat_map();
        let phi = TrigPolynomial::cos(1, 0, rat(1, 1));
        let origin = PeriodicPoint::new(&sys.matrix, TorusPoint::origin(), 1).unwrap();
        let pair = hetero_pair(&sys, &origin, &origin, 2).unwrap();
        let budget = ErrorBudget::new(rat(1, 10_000));
        let kc = k_constants(&sys, &pair, &phi, &holder_constant(&phi), &budget, 128).unwrap();
        assert!(kc.total.width_f64() < 1e-6);
        assert!(kc.truncation.iter().all(|&t| (5..80).contains(&t)));
    }

    #[test]
    fn golden_hit_at_zero() {
        let (sys, phi, p, q) = golden();
        let cert = hit_target(&sys, &phi, &p, &q, &rat(0, 1), &rat(1, 10), &TargetConfig::default()).unwrap();
        assert!(cert.sum.strictly_inside(&rat(-1, 10), &rat(1, 10)));
        assert!(cert.budget.closes());
        let report = verify_certificate(&cert.replay(), 256).unwrap();
        assert!(report.sum.strictly_inside(&rat(-1, 10), &rat(1, 10)));
    }

    #[test]
    fn constant_observable_violates_hypothesis() {
        let (sys, _, p, q) = golden();
        let phi = TrigPolynomial::constant(rat(1, 1));
        let r = hit_target(&sys, &phi, &p, &q, &rat(0, 1), &rat(1, 10), &TargetConfig::default());
        assert!(matches!(r, Err(Error::HypothesisViolated)));
    }

    #[test]
    fn scan_period_two() {
        let (sys, phi, _, _) = golden();
        let scan = scan_density(&sys, &phi, 2, (-2.0, 2.0), 4, 128, 1000).unwrap();
        let mut sums: Vec<f64> = scan.orbits.iter().map(|o| o.sum.mid_f64()).collect();
        sums.sort_by(f64::total_cmp);
        let phi_g = (1.0 + 5f64.sqrt()) / 2.0;
        assert_eq!(sums.len(), 3);
        assert!((sums[0] + phi_g).abs() < 1e-12);
        assert!((sums[1] - (phi_g - 1.0)).abs() < 1e-12);
        assert!((sums[2] - 1.0).abs() < 1e-12);
        assert_eq!(scan.histogram.iter().map(|b| b.count).sum::<u64>(), 3);
    }
}

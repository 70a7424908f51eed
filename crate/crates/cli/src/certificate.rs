//! JSON form of a target certificate. Exact values are `"p/q"` strings and
//! enclosures are `[lo, hi]` pairs of hex floats rounded outward.

use birkhoff_core::algebra::{format_rational, QuadExt};
use birkhoff_core::observable::TrigPolynomial;
use birkhoff_core::targeter::{Replay, TargetCertificate};
use birkhoff_core::torus::TorusPoint;
use birkhoff_core::Interval;
use serde::{Deserialize, Serialize};

use crate::config::{parse_exact, parse_matrix, parse_observable};
use crate::{hexfloat, CliError};

pub type HexInterval = [String; 2];

fn iv(x: &Interval) -> HexInterval {
    [hexfloat::format(x.lo_f64()), hexfloat::format(x.hi_f64())]
}

fn up(x: f64) -> String {
    hexfloat::format(x)
}

fn point(p: &TorusPoint) -> [String; 2] {
    let [a, b] = p.coords();
    [a.to_string(), b.to_string()]
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SystemJson {
    pub matrix: [[String; 2]; 2],
    /// One observable term per entry.
    pub observable: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RequestJson {
    pub target: String,
    pub eps: String,
    pub window: [String; 2],
    pub precision_bits: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PairJson {
    pub p: [String; 2],
    pub q: [String; 2],
    pub period_p: u64,
    pub period_q: u64,
    pub sum_p: HexInterval,
    pub sum_q: HexInterval,
    pub x: [String; 2],
    pub y: [String; 2],
    pub search_radius: u32,
    /// Upper bounds.
    pub delta0: String,
    pub h: String,
    pub lambda: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RoundJson {
    pub k: u64,
    pub m: String,
    pub n: String,
    pub length: u64,
    pub delta_bound: String,
    pub shadow_a_priori: String,
    pub accepted: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PlanJson {
    pub m: String,
    pub n: String,
    pub lengths: [u64; 4],
    pub length: u64,
    pub alpha: String,
    pub window_center: String,
    pub window_half_width: String,
    pub combination: HexInterval,
    pub rounds: Vec<RoundJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct KJson {
    pub k1: HexInterval,
    pub k2: HexInterval,
    pub k3: HexInterval,
    pub k4: HexInterval,
    pub total: HexInterval,
    pub terms: [u64; 4],
    pub truncation: [u64; 4],
    pub tail: String,
    pub holder_theta: String,
    pub holder_c: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ShadowJson {
    /// The periodic point at the position of `y`.
    pub z: [String; 2],
    pub z_start: [String; 2],
    pub period: u64,
    pub min_period: u64,
    pub max_dist: HexInterval,
    pub delta: HexInterval,
    pub delta_bound: String,
    pub mu: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SumJson {
    pub over_length: HexInterval,
    pub precision_bits: u32,
    pub over_min_period: Option<HexInterval>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BudgetJson {
    pub series: [String; 4],
    pub shadow: String,
    pub shadow_a_priori: String,
    pub window: String,
    pub closes: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VerdictJson {
    pub status: String,
    pub budget: BudgetJson,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CertificateJson {
    pub system: SystemJson,
    pub request: RequestJson,
    pub pair: PairJson,
    pub plan: PlanJson,
    pub k_constants: KJson,
    pub shadow: ShadowJson,
    pub sum: SumJson,
    pub verdict: VerdictJson,
}

fn observable_lines(phi: &TrigPolynomial) -> Vec<String> {
    phi.to_string().lines().map(str::to_string).collect()
}

impl CertificateJson {
    pub fn from_certificate(c: &TargetCertificate, precision_bits: u32) -> Self {
        let m = &c.matrix.m;
        let (lo, hi) = c.window();
        let kc = &c.k_constants;
        let b = &c.budget;
        CertificateJson {
            system: SystemJson {
                matrix: [
                    [m[0][0].to_string(), m[0][1].to_string()],
                    [m[1][0].to_string(), m[1][1].to_string()],
                ],
                observable: observable_lines(&c.phi),
            },
            request: RequestJson {
                target: format_rational(&c.k0),
                eps: format_rational(&c.eps),
                window: [format_rational(&lo), format_rational(&hi)],
                precision_bits,
            },
            pair: PairJson {
                p: point(c.pair.p.point()),
                q: point(c.pair.q.point()),
                period_p: c.pair.p.min_period(),
                period_q: c.pair.q.min_period(),
                sum_p: iv(&c.anchor_sums[0]),
                sum_q: iv(&c.anchor_sums[1]),
                x: point(c.pair.x()),
                y: point(c.pair.y()),
                search_radius: c.search_radius,
                delta0: up(c.pair.delta0),
                h: up(c.pair.h),
                lambda: up(c.pair.lam),
            },
            plan: PlanJson {
                m: c.plan.m.to_string(),
                n: c.plan.n.to_string(),
                lengths: c.plan.lengths,
                length: c.plan.total,
                alpha: format_rational(&c.plan.alpha),
                window_center: format_rational(&c.window_center),
                window_half_width: format_rational(&c.window_half_width),
                combination: iv(&c.combo_value),
                rounds: c
                    .rounds
                    .iter()
                    .map(|r| RoundJson {
                        k: r.k,
                        m: r.m.to_string(),
                        n: r.n.to_string(),
                        length: r.total_len,
                        delta_bound: up(r.delta_bound),
                        shadow_a_priori: up(r.shadow_a_priori),
                        accepted: r.accepted,
                    })
                    .collect(),
            },
            k_constants: KJson {
                k1: iv(&kc.k[0]),
                k2: iv(&kc.k[1]),
                k3: iv(&kc.k[2]),
                k4: iv(&kc.k[3]),
                total: iv(&kc.total),
                terms: kc.terms,
                truncation: kc.truncation,
                tail: up(kc.tails[0]),
                holder_theta: format_rational(&c.holder.theta),
                holder_c: up(c.holder.c),
            },
            shadow: ShadowJson {
                z: point(c.shadow.z.point()),
                z_start: point(&c.shadow.z_start),
                period: c.shadow.period,
                min_period: c.shadow.z.min_period(),
                max_dist: iv(&c.shadow.max_dist),
                delta: iv(&c.shadow.delta),
                delta_bound: up(c.rounds.last().map_or(0.0, |r| r.delta_bound)),
                mu: up(c.shadow.mu),
            },
            sum: SumJson {
                over_length: iv(&c.sum),
                precision_bits: c.sum_precision,
                over_min_period: c.minimal_sum.as_ref().map(iv),
            },
            verdict: VerdictJson {
                status: "success".into(),
                budget: BudgetJson {
                    series: [up(b.series_used[0]), up(b.series_used[1]), up(b.series_used[2]), up(b.series_used[3])],
                    shadow: up(b.shadow_used),
                    shadow_a_priori: up(b.shadow_a_priori),
                    window: up(b.window_used),
                    closes: b.closes(),
                },
                notes: c.notes.clone(),
            },
        }
    }

    /// The inputs the replay needs, parsed back into exact values.
    pub fn replay(&self) -> Result<Replay, CliError> {
        let m = &self.system.matrix;
        let matrix = parse_matrix(&format!("{} {} {} {}", m[0][0], m[0][1], m[1][0], m[1][1]))?;
        let phi = parse_observable(&self.system.observable.join("\n"))?;
        let pt = |what: &str, c: &[String; 2]| -> Result<TorusPoint, CliError> {
            let q = |s: &String| {
                s.parse::<QuadExt>()
                    .map_err(|e| CliError::Config(format!("{what}: {e}")))
            };
            Ok(TorusPoint::new(q(&c[0])?, q(&c[1])?))
        };
        Ok(Replay {
            matrix,
            phi,
            p: pt("pair.p", &self.pair.p)?,
            q: pt("pair.q", &self.pair.q)?,
            k0: parse_exact("request.target", &self.request.target)?,
            eps: parse_exact("request.eps", &self.request.eps)?,
            search_radius: self.pair.search_radius,
            lengths: self.plan.lengths,
            z: pt("shadow.z", &self.shadow.z)?,
        })
    }
}

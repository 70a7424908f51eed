//! Plain-text `key = value` system configuration.

use std::str::FromStr;

use birkhoff_core::observable::TrigPolynomial;
use birkhoff_core::targeter::TargetConfig;
use birkhoff_core::torus::{System, TorusPoint, DEFAULT_ENUMERATION_CAP};
use birkhoff_core::{algebra::parse_rational, BigRat, IntMat2};
use num_bigint::BigInt;

use crate::CliError;

#[derive(Clone, Debug)]
pub struct SystemConfig {
    pub matrix: IntMat2,
    pub observable: Option<TrigPolynomial>,
    pub precision_bits: u32,
    pub period_max: u64,
    pub target: TargetConfig,
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            matrix: System::cat_map().matrix,
            observable: None,
            precision_bits: 128,
            period_max: 8,
            target: TargetConfig::default(),
        }
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn number<T: FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.trim().parse().map_err(|_| bad(format!("{key}: cannot parse {v:?}")))
}

/// Four integers `a b c d` (spaces or commas) for `[[a, b], [c, d]]`.
pub fn parse_matrix(s: &str) -> Result<IntMat2, CliError> {
    let entries = s
        .split(|c: char| c.is_whitespace() || c == ',' || c == '[' || c == ']')
        .filter(|w| !w.is_empty())
        .map(|w| BigInt::from_str(w).map_err(|_| bad(format!("matrix entry {w:?} is not an integer"))))
        .collect::<Result<Vec<_>, _>>()?;
    let [a, b, c, d]: [BigInt; 4] = entries
        .try_into()
        .map_err(|_| bad("matrix needs exactly four integers"))?;
    Ok(IntMat2::new(a, b, c, d))
}

pub fn parse_observable(s: &str) -> Result<TrigPolynomial, CliError> {
    s.parse().map_err(|e| bad(format!("{e}")))
}

pub fn parse_exact(what: &str, s: &str) -> Result<BigRat, CliError> {
    parse_rational(s).ok_or_else(|| bad(format!("{what}: {s:?} is not a rational number")))
}

/// `"x1,x2"` with exact rational coordinates.
pub fn parse_point(what: &str, s: &str) -> Result<TorusPoint, CliError> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| bad(format!("{what}: expected \"x1,x2\", got {s:?}")))?;
    Ok(TorusPoint::from_rationals(parse_exact(what, a)?, parse_exact(what, b)?))
}

/// `"lo..hi"`.
pub fn parse_window(s: &str) -> Result<(f64, f64), CliError> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| bad(format!("window: expected \"lo..hi\", got {s:?}")))?;
    Ok((number("window", a)?, number("window", b)?))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, CliError> {
    match v.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(bad(format!("{key}: expected true or false, got {v:?}"))),
    }
}

impl SystemConfig {
    /// Reads `key = value` lines; `#` starts a comment. Repeated `observable`
    /// lines add their terms.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = SystemConfig::default();
        let mut terms: Vec<String> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("line {}: expected key = value", i + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "matrix" => cfg.matrix = parse_matrix(value)?,
                "observable" => terms.push(value.to_string()),
                "precision_bits" => cfg.set_precision(number(key, value)?),
                "period_max" => cfg.period_max = number(key, value)?,
                "l_max" => cfg.target.length_cap = number(key, value)?,
                "search_bound" => cfg.target.search_bound = number(key, value)?,
                "search_radius" => cfg.target.search_radius = number(key, value)?,
                "enumeration_cap" => cfg.target.enumeration_cap = number(key, value)?,
                "max_rounds" => cfg.target.max_rounds = number(key, value)?,
                "rescan" => cfg.target.rescan = parse_bool(key, value)?,
                "rescan_period_max" => cfg.target.rescan_period_max = number(key, value)?,
                "lattice_tol" => cfg.target.lattice_tol = number(key, value)?,
                _ => return Err(bad(format!("line {}: unknown key {key:?}", i + 1))),
            }
        }
        if !terms.is_empty() {
            cfg.observable = Some(parse_observable(&terms.join(";"))?);
        }
        Ok(cfg)
    }

    pub fn set_precision(&mut self, bits: u32) {
        self.precision_bits = bits;
        self.target.precision_bits = bits;
    }

    pub fn system(&self) -> Result<System, CliError> {
        System::new(self.matrix.clone()).map_err(|e| bad(format!("matrix {}: {e}", self.matrix)))
    }

    pub fn observable(&self) -> Result<&TrigPolynomial, CliError> {
        self.observable
            .as_ref()
            .ok_or_else(|| bad("no observable given (use --observable or an observable = ... line)"))
    }

    pub fn enumeration_cap(&self) -> u64 {
        if self.target.enumeration_cap == 0 {
            DEFAULT_ENUMERATION_CAP
        } else {
            self.target.enumeration_cap
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_config_file() {
        let cfg = SystemConfig::parse(
            "# cat map\nmatrix = 2 1 1 1\nobservable = cos 1 0 1\nobservable = const 1/2\nprecision_bits = 256\nl_max = 800\n",
        )
        .unwrap();
        assert_eq!(cfg.precision_bits, 256);
        assert_eq!(cfg.target.precision_bits, 256);
        assert_eq!(cfg.target.length_cap, 800);
        assert_eq!(cfg.observable().unwrap().term_count(), 1);
        assert!(SystemConfig::parse("colour = blue").is_err());
        assert!(SystemConfig::parse("matrix = 1 2 3").is_err());
    }

    #[test]
    fn parses_points_and_windows() {
        assert_eq!(parse_point("p", "2/5, 4/5").unwrap(), TorusPoint::from_fractions(2, 5, 4, 5));
        assert!(parse_point("p", "2/5;4/5").is_err());
        assert_eq!(parse_window("-5..5").unwrap(), (-5.0, 5.0));
        assert!(parse_window("-5,5").is_err());
    }
}

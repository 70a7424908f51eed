//! Batch front end for `birkhoff-core`: density scans, target hits, lattice
//! diagnostics and certificate replay.

pub mod certificate;
pub mod config;
pub mod hexfloat;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use birkhoff_core::diophantine::{detect_lattice, LatticeDetection};
use birkhoff_core::targeter::{hit_target, scan_density, verify_certificate};
use birkhoff_core::torus::PeriodicPoint;
use birkhoff_core::Error;
use clap::{Parser, Subcommand};

use certificate::CertificateJson;
use config::{parse_exact, parse_matrix, parse_observable, parse_point, parse_window, SystemConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cap exceeded: {0}")]
    Cap(String),
    #[error("obstructed: {0}")]
    Obstructed(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Cap(_) => 2,
            CliError::Obstructed(_) => 3,
            CliError::Hypothesis(_) => 4,
            CliError::Verify(_) => 5,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match &e {
            Error::CapExceeded { .. } | Error::LengthCapExceeded(_) | Error::PrecisionExhausted(_) => {
                CliError::Cap(e.to_string())
            }
            Error::Obstructed(ob) => {
                let mut msg = format!("best_gap = {}", ob.best_gap);
                if let Some(c) = ob.lattice {
                    msg.push_str(&format!(", lattice step c = {c}"));
                }
                for miss in &ob.evidence {
                    msg.push_str(&format!("\n  m = {}, n = {}: {}", miss.m, miss.n, miss.value));
                }
                CliError::Obstructed(msg)
            }
            Error::HypothesisViolated => CliError::Hypothesis(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "birkhoff", version, about = "Birkhoff sums of periodic orbits of hyperbolic toral automorphisms")]
pub struct Cli {
    /// `key = value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Matrix entries `a b c d` for `[[a, b], [c, d]]`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub matrix: Option<String>,
    /// Observable terms such as `cos 1 0 1; const 1/2`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub observable: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Birkhoff sums of every orbit up to a period, with a histogram.
    Scan {
        #[arg(long)]
        period_max: u64,
        /// `lo..hi`.
        #[arg(long, allow_hyphen_values = true, default_value = "-5..5")]
        window: String,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        /// Orbit CSV.
        #[arg(long)]
        out: PathBuf,
        /// Histogram CSV; defaults to the orbit CSV with a `.hist.csv` suffix.
        #[arg(long)]
        histogram: Option<PathBuf>,
    },
    /// Certified periodic point whose sum lies in `(target - eps, target + eps)`.
    Hit {
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        #[arg(long)]
        eps: String,
        /// Anchor with negative sum, `x1,x2`.
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        /// Anchor with positive sum, `x1,x2`.
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Looks for a common lattice `c Z` containing every periodic sum.
    Lattice {
        #[arg(long)]
        period_max: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Replays a certificate.
    Verify {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long, default_value_t = 256)]
        precision: u32,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).map_err(io_err(&tmp))?;
    f.write_all(bytes).map_err(io_err(&tmp))?;
    f.sync_all().map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Config(e.to_string());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| CliError::Config(e.to_string()))
}

impl Cli {
    pub fn load_config(&self) -> Result<SystemConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => SystemConfig::parse(&fs::read_to_string(path).map_err(io_err(path))?)?,
            None => SystemConfig::default(),
        };
        if let Some(m) = &self.matrix {
            cfg.matrix = parse_matrix(m)?;
        }
        if let Some(o) = &self.observable {
            cfg.observable = Some(parse_observable(o)?);
        }
        Ok(cfg)
    }
}

/// Runs one command, writing human-readable output to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let say = |out: &mut dyn Write, s: String| {
        let _ = writeln!(out, "{s}");
    };
    if let Command::Verify { cert, precision } = &cli.command {
        let text = fs::read_to_string(cert).map_err(io_err(cert))?;
        let json: CertificateJson =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", cert.display())))?;
        let replay = json.replay()?;
        let report = verify_certificate(&replay, *precision).map_err(|f| CliError::Verify(f.to_string()))?;
        say(out, "verdict: verified".into());
        say(out, format!("z = {} (period {}, minimal {})", replay.z, report.period, report.min_period));
        say(out, format!("max shadow distance <= {:e}", report.max_dist.hi_f64()));
        say(
            out,
            format!(
                "sum in [{}, {}] at {} bits",
                hexfloat::format(report.sum.lo_f64()),
                hexfloat::format(report.sum.hi_f64()),
                report.precision_bits
            ),
        );
        return Ok(());
    }

    let mut cfg = cli.load_config()?;
    let sys = cfg.system()?;
    let phi = cfg.observable()?.clone();
    match &cli.command {
        Command::Scan {
            period_max,
            window,
            bins,
            out: path,
            histogram,
        } => {
            let window = parse_window(window)?;
            let scan = scan_density(&sys, &phi, *period_max, window, *bins, cfg.precision_bits, cfg.enumeration_cap())?;
            let rows = scan.orbits.iter().map(|o| {
                let [x1, x2] = o.representative.coords();
                vec![
                    o.period.to_string(),
                    x1.to_string(),
                    x2.to_string(),
                    o.sum.lo_f64().to_string(),
                    o.sum.hi_f64().to_string(),
                ]
            });
            write_atomic(path, &csv_bytes(&["period", "x1", "x2", "sum_lo", "sum_hi"], rows)?)?;
            let hist_path = histogram.clone().unwrap_or_else(|| path.with_extension("hist.csv"));
            let rows = scan
                .histogram
                .iter()
                .map(|b| vec![b.lo.to_string(), b.hi.to_string(), b.count.to_string()]);
            write_atomic(&hist_path, &csv_bytes(&["bin_lo", "bin_hi", "count"], rows)?)?;
            say(out, format!("orbits: {}", scan.orbits.len()));
            match scan.max_gap() {
                Some(g) => say(out, format!("max_gap: {g}")),
                None => say(out, "max_gap: none (fewer than two distinct sums in the window)".into()),
            }
        }
        Command::Hit {
            target,
            eps,
            p,
            q,
            cert,
            precision,
        } => {
            if let Some(bits) = precision {
                cfg.set_precision(*bits);
            }
            let k0 = parse_exact("target", target)?;
            let eps = parse_exact("eps", eps)?;
            let cap = cfg.enumeration_cap();
            let p = PeriodicPoint::new(&sys.matrix, parse_point("p", p)?, cap)?;
            let q = PeriodicPoint::new(&sys.matrix, parse_point("q", q)?, cap)?;
            let c = hit_target(&sys, &phi, &p, &q, &k0, &eps, &cfg.target)?;
            let json = CertificateJson::from_certificate(&c, cfg.precision_bits);
            let mut text = serde_json::to_string_pretty(&json).map_err(|e| CliError::Config(e.to_string()))?;
            text.push('\n');
            write_atomic(cert, text.as_bytes())?;
            say(out, "verdict: success".into());
            say(out, format!("z = {}", c.shadow.z.point()));
            say(out, format!("L = {} (m = {}, n = {})", c.plan.total, c.plan.m, c.plan.n));
            say(out, format!("sum in [{:.12}, {:.12}]", c.sum.lo_f64(), c.sum.hi_f64()));
            for note in &c.notes {
                say(out, format!("note: {note}"));
            }
        }
        Command::Lattice { period_max, tol } => {
            let scan = scan_density(&sys, &phi, *period_max, (0.0, 0.0), 0, cfg.precision_bits, cfg.enumeration_cap())?;
            let sums: Vec<_> = scan.orbits.iter().map(|o| o.sum.clone()).collect();
            match detect_lattice(&sums, *tol) {
                LatticeDetection::Lattice(c) => say(out, format!("lattice step c = {c}")),
                LatticeDetection::NoLattice => say(out, format!("no lattice structure detected at tol {tol}")),
                LatticeDetection::AllVanish => say(out, format!("all sums vanish at tol {tol}")),
            }
        }
        Command::Verify { .. } => unreachable!("handled above"),
    }
    Ok(())
}

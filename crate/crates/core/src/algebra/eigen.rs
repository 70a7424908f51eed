//! Exact eigen-geometry of a hyperbolic 2x2 integer matrix.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::interval::Interval;
use super::matrix::{dot, IntMat2};
use super::quad::QuadExt;
use crate::{Error, Result};

const COND_PREC: u32 = 96;

#[derive(Clone, Debug)]
pub struct EigenData {
    pub lambda_u: QuadExt,
    pub lambda_s: QuadExt,
    /// Unstable direction, first component 1.
    pub v_u: [QuadExt; 2],
    /// Stable direction, first component 1.
    pub v_s: [QuadExt; 2],
    /// Upper bound on `|P| |P^-1|` for the unit eigenvector basis `P`.
    pub basis_cond: f64,
    /// Upper bound on `|lambda_s|`.
    pub lambda: f64,
    /// Lower bound on `|lambda_u|`.
    pub lambda_u_lo: f64,
    pub discriminant: u64,
}

/// Splits `n = s^2 * d` with `d` square-free; returns `(s, d)`.
fn square_free_split(mut n: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut d = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            d *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (s, d * n)
}

fn eigenvector(a: &IntMat2, lambda: &QuadExt) -> [QuadExt; 2] {
    let [[a11, a12], [a21, a22]] = &a.m;
    if !a12.is_zero() {
        let second = (lambda - &QuadExt::from_int(a11.clone())).scale(&BigRational::new(BigInt::one(), a12.clone()));
        [QuadExt::one(), second]
    } else {
        // lower-triangular: (lambda - a22, a21), scaled to first component 1
        let first = lambda - &QuadExt::from_int(a22.clone());
        let second = QuadExt::from_int(a21.clone());
        [QuadExt::one(), &second / &first]
    }
}

/// Upper bound on the condition number of `[v_u/|v_u|, v_s/|v_s|]`.
fn basis_condition(v_u: &[QuadExt; 2], v_s: &[QuadExt; 2]) -> f64 {
    let uu = dot(v_u, v_u);
    let ss = dot(v_s, v_s);
    let us = dot(v_u, v_s);
    let cos2 = &(&us * &us) / &(&uu * &ss);
    let c = cos2.enclose(COND_PREC).sqrt();
    let one = Interval::from_int(1);
    let ratio = (&one + &c).checked_div(&(&one - &c));
    match ratio {
        Some(r) if r.is_positive() => r.sqrt().hi_f64().max(1.0),
        _ => f64::INFINITY,
    }
}

/// Eigenvalues, eigenvectors and hyperbolicity constants of `a`.
pub fn eigen_data(a: &IntMat2) -> Result<EigenData> {
    let det = a.det();
    let tr = a.trace();
    let hyperbolic = if det.is_one() {
        tr.abs() > BigInt::from(2)
    } else if det == BigInt::from(-1) {
        !tr.is_zero()
    } else {
        return Err(Error::NotUnimodular(alloc::format!("det = {}", det)));
    };
    if !hyperbolic {
        return Err(Error::NotHyperbolic);
    }
    let disc = &tr * &tr - &det * BigInt::from(4);
    let disc = disc
        .to_u64()
        .ok_or_else(|| Error::InvalidInput("discriminant out of range".into()))?;
    let (s, d) = square_free_split(disc);
    if d == 1 {
        return Err(Error::RationalSpectrum);
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mid = BigRational::from_integer(tr.clone()) * &half;
    let off = BigRational::from_integer(BigInt::from(s)) * &half;
    let plus = QuadExt::new(mid.clone(), off.clone(), d);
    let minus = QuadExt::new(mid, -off, d);
    let (lambda_u, lambda_s) = if tr.is_positive() { (plus, minus) } else { (minus, plus) };

    let v_u = eigenvector(a, &lambda_u);
    let v_s = eigenvector(a, &lambda_s);
    let basis_cond = basis_condition(&v_u, &v_s);
    let lambda = lambda_s.abs().enclose(COND_PREC).hi_f64();
    let lambda_u_lo = lambda_u.abs().enclose(COND_PREC).lo_f64();
    Ok(EigenData {
        lambda_u,
        lambda_s,
        v_u,
        v_s,
        basis_cond,
        lambda,
        lambda_u_lo,
        discriminant: d,
    })
}

//! Exact rationals, quadratic-field elements, integer matrices and rigorous
//! interval enclosures.

mod eigen;
mod interval;
mod matrix;
mod quad;
mod trig;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

pub use eigen::{eigen_data, EigenData};
pub use interval::{dyadic_to_f64, f64_to_dyadic, Interval, Round};
pub use matrix::{dot, int_vec, is_zero_vec, mat_pow, solve2, vec_add, vec_scale, vec_sub, zero_vec, IntMat2};
pub use quad::{format_rational, parse_rational, ParseQuadError, QuadExt};
pub use trig::{pi_interval, TrigContext};

pub(crate) use interval::ceil_div;

use crate::{Error, Result};

/// Exact rational number, always in lowest terms with positive denominator.
pub type BigRat = BigRational;

/// `(l, k)` with `a / b = l / k`, `gcd(l, k) = 1` and `k > 0`.
pub fn lowest_terms(a: &BigRat, b: &BigRat) -> Result<(BigInt, BigInt)> {
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let r = a / b;
    let (n, d) = (r.numer().clone(), r.denom().clone());
    debug_assert!(n.gcd(&d) == BigInt::from(1) || n.is_zero());
    Ok((n, d))
}

/// Anything that can be enclosed in a dyadic interval at a requested precision.
pub trait Enclose {
    fn enclose(&self, precision_bits: u32) -> Interval;
}

impl Enclose for BigRational {
    fn enclose(&self, precision_bits: u32) -> Interval {
        Interval::from_rational(self, precision_bits)
    }
}

impl Enclose for QuadExt {
    fn enclose(&self, precision_bits: u32) -> Interval {
        QuadExt::enclose(self, precision_bits)
    }
}

impl Enclose for Interval {
    fn enclose(&self, _precision_bits: u32) -> Interval {
        self.clone()
    }
}

/// Adapts a closure `precision -> Interval` to [`Enclose`].
pub struct EncloseFn<F>(pub F);

impl<F: Fn(u32) -> Interval> Enclose for EncloseFn<F> {
    fn enclose(&self, precision_bits: u32) -> Interval {
        (self.0)(precision_bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRat {
        BigRat::new(n.into(), d.into())
    }

    #[test]
    fn lowest_terms_examples() {
        assert_eq!(lowest_terms(&r(-3, 4), &r(1, 2)).unwrap(), ((-3).into(), 2.into()));
        assert_eq!(lowest_terms(&r(0, 1), &r(7, 1)).unwrap(), (0.into(), 1.into()));
        assert_eq!(lowest_terms(&r(6, 5), &r(2, 5)).unwrap(), (3.into(), 1.into()));
        assert_eq!(lowest_terms(&r(1, 2), &r(-3, 1)).unwrap(), ((-1).into(), 6.into()));
        assert!(matches!(lowest_terms(&r(1, 2), &r(0, 1)), Err(Error::DivisionByZero)));
    }
}

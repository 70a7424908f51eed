//! 2x2 integer matrices and their action on exact vectors.

use core::fmt;
use core::ops::Mul;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use super::quad::QuadExt;
use crate::{Error, Result};

/// Row-major `[[a, b], [c, d]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMat2 {
    pub m: [[BigInt; 2]; 2],
}

impl IntMat2 {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        IntMat2 {
            m: [[a.into(), b.into()], [c.into(), d.into()]],
        }
    }

    pub fn identity() -> Self {
        IntMat2::new(1, 0, 0, 1)
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.m[i][j]
    }

    pub fn det(&self) -> BigInt {
        &self.m[0][0] * &self.m[1][1] - &self.m[0][1] * &self.m[1][0]
    }

    pub fn trace(&self) -> BigInt {
        &self.m[0][0] + &self.m[1][1]
    }

    pub fn transpose(&self) -> IntMat2 {
        let [[a, b], [c, d]] = self.m.clone();
        IntMat2 { m: [[a, c], [b, d]] }
    }

    /// Adjugate, so that `A * adj(A) = det(A) * I`.
    pub fn adjugate(&self) -> IntMat2 {
        let [[a, b], [c, d]] = self.m.clone();
        IntMat2 { m: [[d, -b], [-c, a]] }
    }

    pub fn sub_identity(&self) -> IntMat2 {
        let mut r = self.clone();
        r.m[0][0] -= 1;
        r.m[1][1] -= 1;
        r
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    /// Integral inverse of a unimodular matrix.
    pub fn inverse(&self) -> Result<IntMat2> {
        let det = self.det();
        if !det.abs().is_one() {
            return Err(Error::NotUnimodular(alloc::format!("det = {}", det)));
        }
        let adj = self.adjugate();
        Ok(if det.is_negative() { adj.scale(&BigInt::from(-1)) } else { adj })
    }

    pub fn scale(&self, k: &BigInt) -> IntMat2 {
        let [[a, b], [c, d]] = &self.m;
        IntMat2 {
            m: [[a * k, b * k], [c * k, d * k]],
        }
    }

    pub fn pow(&self, n: u32) -> IntMat2 {
        let mut acc = IntMat2::identity();
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

    pub fn apply_int(&self, v: &[BigInt; 2]) -> [BigInt; 2] {
        [
            &self.m[0][0] * &v[0] + &self.m[0][1] * &v[1],
            &self.m[1][0] * &v[0] + &self.m[1][1] * &v[1],
        ]
    }

    pub fn apply_rat(&self, v: &[BigRational; 2]) -> [BigRational; 2] {
        let e = |i: usize, j: usize| BigRational::from_integer(self.m[i][j].clone());
        [
            e(0, 0) * &v[0] + e(0, 1) * &v[1],
            e(1, 0) * &v[0] + e(1, 1) * &v[1],
        ]
    }

    pub fn apply(&self, v: &[QuadExt; 2]) -> [QuadExt; 2] {
        let e = |i: usize, j: usize| &self.m[i][j];
        [
            v[0].scale_int(e(0, 0)) + v[1].scale_int(e(0, 1)),
            v[0].scale_int(e(1, 0)) + v[1].scale_int(e(1, 1)),
        ]
    }
}

impl<'a> Mul<&'a IntMat2> for &'a IntMat2 {
    type Output = IntMat2;
    fn mul(self, rhs: &'a IntMat2) -> IntMat2 {
        let a = &self.m;
        let b = &rhs.m;
        let cell = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
        IntMat2 {
            m: [[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]],
        }
    }
}

impl Mul for IntMat2 {
    type Output = IntMat2;
    fn mul(self, rhs: IntMat2) -> IntMat2 {
        &self * &rhs
    }
}

impl fmt::Display for IntMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = &self.m;
        write!(f, "[[{},{}],[{},{}]]", a, b, c, d)
    }
}

/// Exact `A^n` for signed `n`; negative powers need `|det A| = 1`.
pub fn mat_pow(a: &IntMat2, n: i64) -> Result<IntMat2> {
    let e = u32::try_from(n.unsigned_abs()).map_err(|_| Error::InvalidInput("exponent too large".into()))?;
    if n >= 0 {
        Ok(a.pow(e))
    } else {
        Ok(a.inverse()?.pow(e))
    }
}

/// Solves `M x = rhs` over the quadratic field by Cramer's rule.
pub fn solve2(m: &[[QuadExt; 2]; 2], rhs: &[QuadExt; 2]) -> Option<[QuadExt; 2]> {
    let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
    if det.is_zero() {
        return None;
    }
    let x0 = &rhs[0] * &m[1][1] - &m[0][1] * &rhs[1];
    let x1 = &m[0][0] * &rhs[1] - &rhs[0] * &m[1][0];
    Some([&x0 / &det, &x1 / &det])
}

pub fn zero_vec() -> [QuadExt; 2] {
    [QuadExt::zero(), QuadExt::zero()]
}

pub fn int_vec(v: &[BigInt; 2]) -> [QuadExt; 2] {
    [QuadExt::from_int(v[0].clone()), QuadExt::from_int(v[1].clone())]
}

pub fn vec_add(a: &[QuadExt; 2], b: &[QuadExt; 2]) -> [QuadExt; 2] {
    [&a[0] + &b[0], &a[1] + &b[1]]
}

pub fn vec_sub(a: &[QuadExt; 2], b: &[QuadExt; 2]) -> [QuadExt; 2] {
    [&a[0] - &b[0], &a[1] - &b[1]]
}

pub fn vec_scale(a: &[QuadExt; 2], k: &QuadExt) -> [QuadExt; 2] {
    [&a[0] * k, &a[1] * k]
}

pub fn dot(a: &[QuadExt; 2], b: &[QuadExt; 2]) -> QuadExt {
    &a[0] * &b[0] + &a[1] * &b[1]
}

pub fn is_zero_vec(a: &[QuadExt; 2]) -> bool {
    a[0].is_zero() && a[1].is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat() -> IntMat2 {
        IntMat2::new(2, 1, 1, 1)
    }

    #[test]
    fn powers() {
        assert_eq!(mat_pow(&cat(), 2).unwrap(), IntMat2::new(5, 3, 3, 2));
        assert_eq!(mat_pow(&cat(), 0).unwrap(), IntMat2::identity());
        assert_eq!(mat_pow(&cat(), -1).unwrap(), IntMat2::new(1, -1, -1, 2));
        let flip = IntMat2::new(1, 1, 1, 0);
        assert_eq!(&mat_pow(&flip, -3).unwrap() * &mat_pow(&flip, 3).unwrap(), IntMat2::identity());
        assert!(mat_pow(&IntMat2::new(2, 0, 0, 1), -1).is_err());
    }

    #[test]
    fn cramer_solves() {
        let m = [
            [QuadExt::from_int(2), QuadExt::from_int(1)],
            [QuadExt::from_int(1), QuadExt::from_int(1)],
        ];
        let x = solve2(&m, &[QuadExt::from_int(3), QuadExt::from_int(2)]).unwrap();
        assert_eq!(x, [QuadExt::from_int(1), QuadExt::from_int(1)]);
    }
}

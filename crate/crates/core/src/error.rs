use alloc::string::String;

use crate::diophantine::Obstruction;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("matrix is not hyperbolic: an eigenvalue has modulus 1")]
    NotHyperbolic,
    #[error("characteristic polynomial has rational roots")]
    RationalSpectrum,
    #[error("matrix determinant must be +1 or -1, got {0}")]
    NotUnimodular(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("count {count} exceeds the configured cap {cap}")]
    CapExceeded { count: String, cap: u64 },
    #[error("point is not periodic within {0} iterates")]
    NotPeriodicWithin(u64),
    #[error("decay bound violated at n = {n} ({which})")]
    DecayViolated { n: u64, which: &'static str },
    #[error("segment lengths are not multiples of the anchor periods")]
    BadMultiples,
    #[error("shadow point has a nonzero irrational part")]
    IrrationalResidue,
    #[error("verified shadow distance exceeds mu * delta")]
    ShadowBoundViolated,
    #[error("inputs are not coprime")]
    NotCoprime,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("required precision exceeds the ceiling of {0} bits")]
    PrecisionExhausted(u32),
    #[error("hypothesis S(p) < 0 < S(q) does not hold")]
    HypothesisViolated,
    #[error("no combination reaches the window: {0}")]
    Obstructed(alloc::boxed::Box<Obstruction>),
    #[error("pseudo-orbit length {0} exceeds the configured cap")]
    LengthCapExceeded(u64),
}

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular-matrix")]
    SingularMatrix,
    #[error("pole-guard-exhausted: no admissible sample after {0} rejections")]
    PoleGuardExhausted(usize),
    #[error("pole: argument within {delta} of a pole")]
    Pole { delta: f64 },
    #[error("not-coprime: gcd({a}, {c}) != 1")]
    NotCoprime { a: String, c: String },
    #[error("bad-modulus: {0}")]
    BadModulus(String),
    #[error("bad-divisor: {0} does not divide {1}")]
    BadDivisor(i64, i64),
    #[error("not-div-circ: divisor has a fiber of nonzero degree")]
    NotDivCirc,
    #[error("not-in-group: {0}")]
    NotInGroup(String),
    #[error("bad-delta: {0}")]
    BadDelta(String),
    #[error("not-real-quadratic: {0}")]
    NotRealQuadratic(i64),
    #[error("bad-discriminant: {0} is not fundamental")]
    BadDiscriminant(i64),
    #[error("bad-level: {p} divides {level}")]
    BadLevel { p: u64, level: u64 },
    #[error("coset-match-failure")]
    CosetMatchFailure,
    #[error("tau-too-thin: Im(tau) = {0} < 0.05")]
    TauTooThin(f64),
    #[error("pole-at-cusp: {a} = 0 mod {level}")]
    PoleAtCusp { a: i64, level: i64 },
    #[error("insufficient-precision: {equations} equations for {unknowns} unknowns")]
    InsufficientPrecision { equations: usize, unknowns: usize },
    #[error("det-cap-exceeded: |det| = {det} > {cap}")]
    DetCapExceeded { det: String, cap: u64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("bad-precision: {0}")]
    BadPrecision(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

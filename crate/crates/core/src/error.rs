use core::fmt;

use crate::algebra::Regime;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A model parameter violates its admissible range.
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// Integrator or sweep configuration rejected before any computation.
    InvalidConfig(&'static str),
    /// Polynomial with every coefficient (below the constant) equal to zero.
    AllCoefficientsZero,
    NotAFixedPoint {
        z: f64,
        residual: f64,
    },
    /// The requested analysis needs a parameter regime the inputs are not in.
    RegimeMismatch {
        regime: Regime,
    },
    StepSizeUnderflow {
        t: f64,
        step: f64,
    },
    NonFiniteState {
        t: f64,
    },
    /// Trajectory does not reach past the transient horizon.
    TooShort {
        span: f64,
        required: f64,
    },
    /// Argument outside the domain of a nullcline expression.
    DomainError {
        z: f64,
    },
    NoFold,
    /// The slow-branch integrand is singular: a branch touches the s-nullcline.
    QuadratureDivergence,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter {
                name,
                value,
                expected,
            } => write!(f, "invalid parameter {name} = {value}: expected {expected}"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::AllCoefficientsZero => f.write_str("all polynomial coefficients are zero"),
            Error::NotAFixedPoint { z, residual } => {
                write!(f, "z = {z} is not a fixed point (residual {residual:e})")
            }
            Error::RegimeMismatch { regime } => {
                write!(
                    f,
                    "parameters are in regime {regime}, analysis not applicable"
                )
            }
            Error::StepSizeUnderflow { t, step } => {
                write!(f, "step size underflow at t = {t} (h = {step:e})")
            }
            Error::NonFiniteState { t } => write!(f, "non-finite state at t = {t}"),
            Error::TooShort { span, required } => write!(
                f,
                "trajectory spans {span} time units, at least {required} required"
            ),
            Error::DomainError { z } => {
                write!(f, "z = {z} outside the nullcline domain 0 < |z| < 1/d")
            }
            Error::NoFold => f.write_str("z-nullcline has no fold pair"),
            Error::QuadratureDivergence => {
                f.write_str("slow-branch integrand is singular (branch meets the s-nullcline)")
            }
        }
    }
}

impl core::error::Error for Error {}

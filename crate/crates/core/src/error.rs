use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    InvalidDimension(usize),
    NonPositiveSize,
    DomainMismatch,
    LengthMismatch { expected: usize, found: usize },
    NonFiniteValue { cell: usize },
    InvalidBall,
    EmptyBall,
    Syntax { offset: usize, message: &'static str },
    UnknownIdentifier { offset: usize, name: String },
    EvaluationDomain(&'static str),
    NonFiniteResult,
    VariableOutOfRange { index: usize, dim: usize },
    Sample { cell: usize, source: Box<Error> },
    ExponentOutOfRange { cell: usize, value: f64 },
    ConjugateOfOne { cell: usize },
    Overflow,
    NonPositiveWeight { cell: usize },
    DivisionByZero,
    ZeroFunction,
    NonPositiveRho { cell: usize },
    CenterOutsideDomain,
    PotentialIdenticallyZero,
    ZeroMassBall { ball: usize },
    HypothesisViolation { radius: f64, rho_center: f64, beta: f64 },
    GridTooCoarse { delta0: f64, spacing: f64 },
    AllBallsEmpty { cell: usize },
    EmptySweep,
    EmptyFamily,
    NoSubcriticalBalls,
    EmptyCellSet,
    RegionOutsideDomain,
    InvalidParameter(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Error::*;
        match self {
            InvalidDimension(d) => write!(f, "invalid dimension {d} (expected 1, 2 or 3)"),
            NonPositiveSize => f.write_str("domain half-width must be positive and cells per axis at least 2"),
            DomainMismatch => f.write_str("grid functions live on different domains"),
            LengthMismatch { expected, found } => {
                write!(f, "expected {expected} samples, found {found}")
            }
            NonFiniteValue { cell } => write!(f, "non-finite value at cell {cell}"),
            InvalidBall => f.write_str("ball radius must be positive and finite"),
            EmptyBall => f.write_str("no cell center lies inside the ball"),
            Syntax { offset, message } => write!(f, "syntax error at offset {offset}: {message}"),
            UnknownIdentifier { offset, name } => {
                write!(f, "unknown identifier `{name}` at offset {offset}")
            }
            EvaluationDomain(what) => write!(f, "evaluation outside the domain of {what}"),
            NonFiniteResult => f.write_str("expression evaluated to a non-finite value"),
            VariableOutOfRange { index, dim } => {
                write!(f, "variable x{index} used on a {dim}-dimensional point")
            }
            Sample { cell, source } => write!(f, "at cell {cell}: {source}"),
            ExponentOutOfRange { cell, value } => {
                write!(f, "exponent value {value} at cell {cell} is out of range [1, inf)")
            }
            ConjugateOfOne { cell } => {
                write!(f, "exponent equals 1 at cell {cell}; its conjugate is infinite")
            }
            Overflow => f.write_str("modular is not finite at the initial bracket"),
            NonPositiveWeight { cell } => write!(f, "weight is not positive at cell {cell}"),
            DivisionByZero => f.write_str("a norm in the denominator vanishes"),
            ZeroFunction => f.write_str("function is identically zero"),
            NonPositiveRho { cell } => write!(f, "critical radius is not positive at cell {cell}"),
            CenterOutsideDomain => f.write_str("ball center lies outside the domain"),
            PotentialIdenticallyZero => f.write_str("potential is identically zero"),
            ZeroMassBall { ball } => write!(f, "potential has zero mass on ball {ball}"),
            HypothesisViolation { radius, rho_center, beta } => write!(
                f,
                "radius {radius} is outside (rho(x0), beta*rho(x0)] = ({rho_center}, {}]",
                beta * rho_center
            ),
            GridTooCoarse { delta0, spacing } => write!(
                f,
                "separation delta0/8 = {} is below the cell spacing {spacing}",
                delta0 / 8.0
            ),
            AllBallsEmpty { cell } => write!(f, "every ball around cell {cell} is empty"),
            EmptySweep => f.write_str("ball sweep is empty"),
            EmptyFamily => f.write_str("family is empty"),
            NoSubcriticalBalls => f.write_str("no ball of the family is sub-critical"),
            EmptyCellSet => f.write_str("cell set is empty"),
            RegionOutsideDomain => f.write_str("region is not contained in the domain"),
            InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
        }
    }
}

impl core::error::Error for Error {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            Error::Sample { source, .. } => Some(source.as_ref()),
            _ => None,
        }
    }
}

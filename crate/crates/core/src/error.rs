use thiserror::Error;

use crate::exprparse::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("radius {r} outside [{lo}, {hi}]")]
    RadiusOutOfRange { r: f64, lo: f64, hi: f64 },
    #[error("point {re}{im:+}i outside the validity disk of the map (radius {radius})")]
    OutsideMapDomain { re: f64, im: f64, radius: f64 },
    #[error("expression `{source_text}`: {err}")]
    Parse { source_text: String, err: ParseError },
    #[error("evaluating `{source_text}`: {err}")]
    Eval { source_text: String, err: EvalError },
    #[error("coefficient q fails the smoothness probe: {0}")]
    NotSmooth(String),
    #[error("singular linear system (pivot {pivot:e} at row {row}, condition estimate {cond:e})")]
    Singular { row: usize, pivot: f64, cond: f64 },
    #[error("H vanishes at r = {0}")]
    VanishingH(f64),
    #[error("no trusted decade: {0}")]
    NoTrustedDecade(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("non-convergent sequence: {0}")]
    NonConvergent(String),
    #[error("root find failed to bracket at x1 = {x1}")]
    NoBracket { x1: f64 },
    #[error("trajectory left B_1/2 at ({x1}, {x2})")]
    LeftDomain { x1: f64, x2: f64 },
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the failure comes from bad input rather than from the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidGrid(_)
                | Error::InvalidInput(_)
                | Error::RadiusOutOfRange { .. }
                | Error::OutsideMapDomain { .. }
                | Error::Parse { .. }
                | Error::Eval { .. }
                | Error::NotSmooth(_)
                | Error::Config(_)
                | Error::Json(_)
        )
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        if self.is_validation() {
            2
        } else {
            3
        }
    }
}

use thiserror::Error;

/// Parameter that failed validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    Gamma,
    S,
    GammaPlusTwoS,
    Eps,
    LandauGamma,
    LambdaLandau,
    CB,
}

impl std::fmt::Display for Constraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Constraint::Gamma => "gamma: need -3 < gamma <= 0",
            Constraint::S => "s: need 1/2 < s < 1",
            Constraint::GammaPlusTwoS => "gamma + 2s: need > -1",
            Constraint::Eps => "eps: need 0 < eps <= 1/2",
            Constraint::LandauGamma => "gamma: Landau path needs gamma >= -2",
            Constraint::LambdaLandau => "lambda_landau: need > 0",
            Constraint::CB => "c_b: need > 0",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("constraint violated: {0}")]
    ConstraintViolation(Constraint),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("basis degree {k} too low (need >= {need})")]
    DegreeTooLow { k: usize, need: usize },
    #[error("quadrature divergence: {0}")]
    QuadratureDivergence(String),
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("quadrature node coincides with evaluation point")]
    SingularNode,
    #[error("cancellation check: RHS {rhs:e} is numerically zero")]
    RhsNearZero { rhs: f64 },
    #[error("cube grid too small: {0}")]
    GridTooSmall(String),
    #[error("band truncation: discarded relative mass {0:e}")]
    BandTruncation(f64),
    #[error("Gram matrix indefinite: repair mass {0:e}")]
    IndefiniteGram(f64),
    #[error("eigensolver failure: {0}")]
    EigFailure(String),
    #[error("step control failure at t = {t}: step {h:e}")]
    StepControlFailure { t: f64, h: f64 },
    #[error("fit window too short: {0}")]
    WindowTooShort(String),
    #[error("calibration unstable: per-pair spread {spread:.3e}")]
    CalibrationUnstable { spread: f64, values: Vec<f64> },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

use crate::model::ValidationReport;

#[derive(Debug, Error)]
pub enum RotorError {
    #[error("invalid rotor model:\n{0}")]
    InvalidModel(ValidationReport),

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("every lateral degree of freedom is constrained")]
    NoActiveDofs,

    #[error("degree of freedom {0} is constrained or does not exist")]
    InactiveDof(String),

    #[error("mass matrix is not positive definite")]
    MassNotPositiveDefinite,

    #[error("eigen iteration failed to converge (residual {residual:.3e})")]
    EigenFailure { residual: f64 },

    #[error("eigenvector check failed for mode {mode}: relative residual {residual:.3e}")]
    EigenResidual { mode: usize, residual: f64 },

    #[error("defective or mismatched pair at mode {mode} (s = {s_re:.6e}{s_im:+.6e}i)")]
    DefectivePair { mode: usize, s_re: f64, s_im: f64 },

    #[error("modal solution is not bi-orthogonally normalized")]
    NotNormalized,

    #[error("zero-frequency mode {0} cannot be used without normalization")]
    ZeroModeNotNormalized(usize),

    #[error("dynamic stiffness is singular at {frequency_hz} Hz")]
    SingularDynamicStiffness { frequency_hz: f64 },

    #[error("eigensolve failed at spin speed {speed_rad_s} rad/s: {source}")]
    SweepFailure {
        speed_rad_s: f64,
        #[source]
        source: Box<RotorError>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, RotorError>;

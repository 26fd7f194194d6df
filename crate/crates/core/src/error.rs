use thiserror::Error;

/// Errors produced by the spin-statistics numerics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The two-particle geometry does not determine a bisector or a y-axis.
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    /// Two state vectors were expected to lie on the same ray but do not.
    #[error("not a ray: relative residual {residual:.3e} after best-fit phase")]
    NotARay { residual: f64 },
    /// The directly measured exchange phase disagrees with the ratio of
    /// single-particle phase factors.
    #[error("exchange phase {direct} disagrees with single-particle ratio {ratio}")]
    RatioMismatch { direct: num_complex::Complex64, ratio: num_complex::Complex64 },
    /// Text could not be parsed into a spin value.
    #[error("cannot parse spin {0:?}")]
    ParseSpin(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Failure modes of the laboratory operations.
///
/// Variants are grouped by how a caller should react: bad input data,
/// bad parameters, numerical guards that refuse to report an unreliable
/// result, and undefined quantities.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("quadratic form is not positive definite (term {term})")]
    NotPositiveDefinite { term: usize },

    #[error("boundary energy fraction {fraction:e} exceeds tolerance {tolerance:e}")]
    BoundaryEnergy { fraction: f64, tolerance: f64 },

    #[error(
        "aliasing guard: shifted spectrum leaks {fraction:e} of the energy past Nyquist \
         (offending |ξ| up to {xi_extent})"
    )]
    Aliasing { fraction: f64, xi_extent: f64 },

    #[error("CFL condition violated: Courant number {courant} > 1")]
    Cfl { courant: f64 },

    #[error("quadrature under-resolved: {0}")]
    QuadratureResolution(String),

    #[error("restricted norm vanishes; ratio undefined")]
    ZeroRestrictedNorm,

    #[error("set is not thick for any δ: {0}")]
    EmptyAdmissibleRegion(String),

    #[error("measure condition fails at m = {m}: 3|E∩(l_(m+1), l_m)| = {lhs} < {rhs}")]
    MeasureCondition { m: usize, lhs: f64, rhs: f64 },

    #[error("grid too large: {0}")]
    GridTooLarge(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// True for the numerical guards (boundary energy, aliasing, CFL,
    /// quadrature resolution) as opposed to configuration mistakes.
    pub fn is_numerical_guard(&self) -> bool {
        matches!(
            self,
            Error::BoundaryEnergy { .. }
                | Error::Aliasing { .. }
                | Error::Cfl { .. }
                | Error::QuadratureResolution(_)
                | Error::GridTooLarge(_)
        )
    }
}

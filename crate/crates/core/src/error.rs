use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid `{key}`: {constraint}")]
    InvalidParameter {
        key: &'static str,
        constraint: &'static str,
    },

    #[error("cell ({n}, {m}) outside the {nx}x{ny} lattice")]
    CellOutOfRange {
        n: usize,
        m: usize,
        nx: usize,
        ny: usize,
    },

    #[error("{what}: expected length {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("eigendecomposition did not converge")]
    EigenConvergence,

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("resolvent solve residual {residual:e} exceeds tolerance")]
    SingularResolvent { residual: f64 },

    #[error("energy grid is empty")]
    EmptyGrid,

    #[error("energy grid is not strictly increasing")]
    GridNotIncreasing,

    #[error("need at least 2 eigenvalues, got {0}")]
    TooFewEigenvalues(usize),

    #[error("lattice {nx}x{ny} too small for separated corner fragments (need N, M ≥ 4)")]
    LatticeTooSmall { nx: usize, ny: usize },

    #[error("unknown figure id `{0}`")]
    UnknownFigure(String),

    #[error("at J = {nnn}: {source}")]
    AtCoupling { nnn: f64, source: Box<Error> },
}

impl Error {
    pub(crate) fn invalid(key: &'static str, constraint: &'static str) -> Self {
        Error::InvalidParameter { key, constraint }
    }

    /// True for failures of the numerical kernels, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::EigenConvergence | Error::NonFinite | Error::SingularResolvent { .. } => true,
            Error::AtCoupling { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong in the numerical core.
///
/// Variants fall into two groups: malformed input (shape, arity, parameters)
/// and violated mathematical preconditions (spectral gaps, rank mismatches,
/// defects too large for a corrector). The CLI maps the first group to exit
/// code 1 and the second to exit code 2, see [`Error::is_precondition`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("arity mismatch: expected {expected} arguments, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("matrix is not Hermitian: ‖A − A*‖ = {defect:.3e}")]
    Symmetry { defect: f64 },
    #[error("eigenvalue {eigenvalue} lies outside the function's domain")]
    Domain { eigenvalue: f64 },
    #[error("spectral gap violated: eigenvalue {eigenvalue} in the forbidden band")]
    SpectralGap { eigenvalue: f64 },
    #[error("rank deficient: smallest singular value {sigma_min:.3e}")]
    RankDeficient { sigma_min: f64 },
    #[error("rank mismatch: source rank {source_rank}, range rank {range_rank}")]
    RankMismatch { source_rank: usize, range_rank: usize },
    #[error("input defect too large: corrected output misses the relation by {defect:.3e}")]
    DeltaTooLarge { defect: f64 },
    #[error("not a projection: defect {defect:.3e}")]
    NotProjection { defect: f64 },
    #[error("inputs do not commute or are not normal: defect {defect:.3e}")]
    Commutation { defect: f64 },
    #[error("not a Cauchy array at rows ({n}, {m}), index {index}: distance {distance:.3e} > {bound:.3e}")]
    NonCauchy {
        n: usize,
        m: usize,
        index: usize,
        distance: f64,
        bound: f64,
    },
    #[error("inconsistent inclusion for block {block}: multiplicities give dimension {found}, block has {expected}")]
    Bratteli {
        block: usize,
        expected: usize,
        found: usize,
    },
    #[error("trace quantization infeasible: {0}; use a larger ambient dimension")]
    Resolution(String),
    #[error("degenerate compression: rank {rank} expected, {kept} singular values above cutoff")]
    DegenerateCompression { rank: usize, kept: usize },
    #[error("ensemble calibration failed: target defect {target:.3e}, measured {measured:.3e}")]
    Calibration { target: f64, measured: f64 },
    #[error("at index {index}: {source}")]
    AtIndex { index: usize, source: Box<Error> },
    #[error("at matrix unit ({block}; {row}, {col}): {source}")]
    AtUnit {
        block: usize,
        row: usize,
        col: usize,
        source: Box<Error>,
    },
}

impl Error {
    pub fn at_index(self, index: usize) -> Error {
        Error::AtIndex {
            index,
            source: Box::new(self),
        }
    }

    pub fn at_unit(self, block: usize, row: usize, col: usize) -> Error {
        Error::AtUnit {
            block,
            row,
            col,
            source: Box::new(self),
        }
    }

    /// Innermost error, with index context stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtIndex { source, .. } | Error::AtUnit { source, .. } => source.root(),
            e => e,
        }
    }

    /// Short machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self.root() {
            Error::InvalidInput(_) => "invalid_input",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::Shape { .. } => "shape",
            Error::Arity { .. } => "arity",
            Error::Symmetry { .. } => "symmetry",
            Error::Domain { .. } => "domain",
            Error::SpectralGap { .. } => "spectral_gap",
            Error::RankDeficient { .. } => "rank_deficient",
            Error::RankMismatch { .. } => "rank_mismatch",
            Error::DeltaTooLarge { .. } => "delta_too_large",
            Error::NotProjection { .. } => "not_projection",
            Error::Commutation { .. } => "commutation",
            Error::NonCauchy { .. } => "non_cauchy",
            Error::Bratteli { .. } => "bratteli",
            Error::Resolution(_) => "resolution",
            Error::DegenerateCompression { .. } => "degenerate_compression",
            Error::Calibration { .. } => "calibration",
            Error::AtIndex { .. } | Error::AtUnit { .. } => unreachable!(),
        }
    }

    /// True for violated mathematical preconditions, false for malformed input.
    pub fn is_precondition(&self) -> bool {
        !matches!(
            self.root(),
            Error::InvalidInput(_)
                | Error::InvalidParameter { .. }
                | Error::Shape { .. }
                | Error::Arity { .. }
        )
    }
}

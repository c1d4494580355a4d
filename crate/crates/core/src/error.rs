use alloc::vec::Vec;

/// Errors raised by the solvers and their input validation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("at least two rating factors are required, got {0}")]
    TooFewFactors(usize),
    #[error("axis {axis} has zero length")]
    EmptyAxis { axis: usize },
    #[error("tensor of dims {dims:?} needs {expected} values, got {actual}")]
    LengthMismatch {
        dims: Vec<usize>,
        expected: usize,
        actual: usize,
    },
    #[error("{what}: expected {expected} axis names, got {actual}")]
    AxisNames {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("value at flat index {index} is negative or not finite: {value}")]
    InvalidValue { index: usize, value: f64 },
    #[error("losses have dims {losses:?} but exposures have dims {exposures:?}")]
    DimensionMismatch {
        losses: Vec<usize>,
        exposures: Vec<usize>,
    },
    #[error("cell {cell:?} has loss {loss} but zero exposure (exposure is a necessary condition for loss)")]
    LossWithoutExposure { cell: Vec<usize>, loss: f64 },
    #[error("cell {cell:?} has zero exposure")]
    ZeroExposureCell { cell: Vec<usize> },
    #[error("adjusted exposure of factor {factor}, slice {slice} is zero")]
    ZeroExposure { factor: usize, slice: usize },
    #[error("base slice of factor {factor} carries no loss")]
    ZeroBaseSliceLoss { factor: usize },
    #[error("slice {slice} of factor {factor} carries no loss; its relativity would be 0")]
    ZeroSliceLoss { factor: usize, slice: usize },
    #[error("permissible loss ratio must be positive and finite, got {0}")]
    InvalidPlr(f64),
    #[error("base rate must be positive and finite, got {0}")]
    InvalidBaseRate(f64),
    #[error("factor-weighted exposure sum is zero")]
    ZeroDenominator,
    #[error("factor state does not match the problem: {0}")]
    FactorShape(&'static str),
    #[error("relativity {index} of block {block} must be positive and finite, got {value}")]
    NonPositiveFactor {
        block: usize,
        index: usize,
        value: f64,
    },
    #[error("{0}")]
    InvalidSettings(&'static str),
    #[error("contraction certificates are only available for three factors, got {factors}")]
    Unsupported { factors: usize },
    #[error("matrix is {rows}x{cols}; {what}")]
    MatrixShape {
        rows: usize,
        cols: usize,
        what: &'static str,
    },
    #[error("invalid Leslie-Gower model: {0}")]
    InvalidModel(&'static str),
    #[error("weak competition fails for species {species} (slack {slack})")]
    WeakCompetitionViolated { species: usize, slack: f64 },
    #[error("growth coefficient b[{species}] = {value} is not above 1")]
    GrowthNotAboveOne { species: usize, value: f64 },
    #[error("singular matrix (rank {rank}); system is {}", if *.rank_consistent { "underdetermined" } else { "inconsistent" })]
    SingularMatrix { rank: usize, rank_consistent: bool },
    #[error("initial state must be strictly positive; coordinate {index} is {value}")]
    NonPositiveStart { index: usize, value: f64 },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("non-hermitian parameter set: {0}")]
    NonHermitian(String),

    #[error("system size 2N = {two_n} exceeds the dense limit of {limit}")]
    SizeLimit { two_n: usize, limit: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not hermitian (max |M - M^H| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max |M M^H - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("eigensolver failed: {0}")]
    EigenFailure(String),

    #[error("residual {residual:e} exceeds tolerance {tolerance:e}")]
    NotConverged { residual: f64, tolerance: f64 },

    #[error("crossing parameter must satisfy sinh(eta) != 0")]
    SingularCrossing,

    #[error("finite-difference derivative unstable: step and half-step disagree by {disagreement:e}")]
    FiniteDifference { disagreement: f64 },

    #[error("state is not an eigenvector of the transfer matrix (residual {residual:e})")]
    NotTransferEigenstate { residual: f64 },

    #[error("sample matrix ill-conditioned (condition number {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("zero root {root} lies within {distance:e} of a pole")]
    RootAtPole { root: String, distance: f64 },

    #[error("logarithm argument at a branch point for root {root}")]
    BranchPoint { root: String },

    #[error("residual overflow in equation {equation}")]
    Overflow { equation: usize },

    #[error("Newton iteration diverged at eps = {eps}: residual {residual:e}")]
    NewtonDiverged { eps: f64, residual: f64 },

    #[error("roots {first} and {second} collided during continuation at eps = {eps}")]
    RootCollision { first: usize, second: usize, eps: f64 },

    #[error("seed has {found} roots, expected {expected}")]
    SeedSize { expected: usize, found: usize },

    #[error("series tail bound {bound:e} exceeds tolerance {tolerance:e} at omega_max = {omega_max}")]
    SeriesNotConverged { omega_max: usize, bound: f64, tolerance: f64 },

    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    #[error("b grid too coarse to bracket pi/4: {0}")]
    GridTooCoarse(String),

    #[error("scaling fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),

    #[error("scaling fit requires positive data, found {value} at x = {x}")]
    NonPositiveData { x: f64, value: f64 },

    #[error("{quantity} has imaginary residue {residue:e}")]
    ImaginaryResidue { quantity: &'static str, residue: f64 },

    #[error("no state matching {0} found")]
    StateNotFound(String),
}

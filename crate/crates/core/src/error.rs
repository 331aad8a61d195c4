use crate::helmholtz::SolveDiagnostics;

/// Errors raised by the numerical core.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension {0} is not supported (expected 2 or 3)")]
    BadDimension(usize),

    #[error("invalid grid: {0}")]
    BadGrid(String),

    #[error("frequency box too small: dxi*N/2 = {nyquist} must exceed 3/2")]
    NyquistTooSmall { nyquist: f64 },

    #[error("field side mismatch: expected {expected:?}, found {found:?}")]
    SideMismatch {
        expected: crate::lattice::Side,
        found: crate::lattice::Side,
    },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("invalid exponent p = {0} (need p >= 1)")]
    BadExponent(f64),

    #[error("invalid quadrature resolution {0} (need M >= 8)")]
    BadResolution(usize),

    #[error("sphere of radius {radius} leaves the frequency box (nyquist {nyquist})")]
    SphereOutsideBox { radius: f64, nyquist: f64 },

    #[error("symbol is unbounded at |xi| = {xi_abs} without regularization")]
    UnregularizedSingularity { xi_abs: f64 },

    #[error("invalid multiplier: {0}")]
    InvalidMultiplier(String),

    #[error("epsilon ladder needs at least 3 strictly decreasing positive rungs, got {0}")]
    LadderTooShort(usize),

    #[error("epsilon ladder is not strictly decreasing and positive")]
    BadLadder,

    #[error("solution norms diverge along the epsilon ladder (growth exponent {growth_exponent:.3})")]
    NoConvergence {
        growth_exponent: f64,
        diagnostics: Box<SolveDiagnostics>,
    },

    #[error("data is not in X0: fredholm defect {defect:.3e} exceeds threshold {threshold:.1e}")]
    NotInX0 { defect: f64, threshold: f64 },

    #[error("Neumann iteration stopped contracting after {iterations} iterations")]
    NoContraction { iterations: usize },

    #[error("Neumann iteration did not reach tolerance in {iterations} iterations")]
    IterationLimit { iterations: usize },

    #[error("slab width delta = {delta} is not resolvable: dxi = {dxi} exceeds delta^2/4")]
    DeltaUnresolvable { delta: f64, dxi: f64 },

    #[error("alpha = {0} outside the open interval (1/2, 3/2)")]
    AlphaOutOfRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dual computations disagree: {0}")]
    Disagreement(String),

    #[error("malformed field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

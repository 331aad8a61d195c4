//! Slope-fitting experiments: Knapp scans, ε-scans with their compensator,
//! one-sided remainders, `L^p → L^q` ratios and kernel decay.

mod eps;
mod fit;
mod kernel;
mod knapp;
mod lq;

pub use eps::{
    annulus_integrals, c_alpha, c_alpha_closed, c_alpha_quadrature, eps_scan, one_sided_remainder_scan, Annulus,
    EpsScan, EpsScanConfig, RemainderScan, VolumeRule, BOUNDED_CHANGE, C_ALPHA_AGREEMENT,
};
pub use fit::{fit_loglog, slope_tolerance, Criterion, LogLogFit, ReportSummary, ScanReport, EXCLUSION_RESIDUAL, MIN_FIT_POINTS};
pub use kernel::{decay_radii, kernel_decay_scan};
pub use knapp::{
    bump, inside_multiplier, knapp_field, knapp_norms, knapp_ratio_scan, knapp_scan, KnappNorms, KnappParams,
};
pub use lq::{lp_lq_scan, lq_exponents, BOUNDED_SLOPE};

/// Default δ ladder in two dimensions.
pub const DELTAS_2D: [f64; 5] = [1.0 / 8.0, 1.0 / 12.0, 1.0 / 16.0, 1.0 / 24.0, 1.0 / 32.0];

/// Default δ ladder in three dimensions. The adapted lattice has no
/// resolvability limit, and larger δ leave the scaling regime.
pub const DELTAS_3D: [f64; 5] = DELTAS_2D;

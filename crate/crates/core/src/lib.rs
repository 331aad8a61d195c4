//! Pseudo-spectral machinery for the Helmholtz equation `(-Δ - 1)u = f` with
//! `L^p` data whose Fourier transform vanishes on the unit sphere, together
//! with Bochner-Riesz multipliers of positive, negative and complex order.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`]: periodic grids, fields, the continuum-calibrated DFT and
//!   Riemann-sum norms.
//! * [`sphere`]: surface quadrature, off-lattice evaluation of `f̂`, and the
//!   restriction profile `F(r) = ‖f̂‖²_{L²(rS^{n-1})}`.
//! * [`multipliers`]: the Bochner-Riesz symbol bank and the cutoff-split
//!   Helmholtz symbol.
//! * [`helmholtz`]: free and perturbed solvers, the sphere annihilator and
//!   the Fredholm-defect membership test.
//! * [`experiments`]: Knapp sharpness scans, ε-asymptotics, and exponent
//!   checks that produce [`experiments::ScanReport`]s.

pub mod error;
pub mod experiments;
pub mod helmholtz;
pub mod lattice;
pub mod multipliers;
pub mod quadrature;
pub mod special;
pub mod sphere;

pub use error::{Error, Result};
pub use lattice::{Field, Grid, GridPreset, Side};

/// Complex scalar used for every field value.
pub type C64 = num_complex::Complex64;

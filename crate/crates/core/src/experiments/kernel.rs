//! Decay of Bochner-Riesz kernels away from the origin.

use std::f64::consts::PI;

use super::fit::{Criterion, ScanReport};
use crate::lattice::Grid;
use crate::multipliers::{kernel_profile, MultiplierSpec, Sidedness, KERNEL_BIN_WIDTH};
use crate::{Error, Result, C64};

/// Bin starts `a = 5, 5 + 2π, …` with the bin `[a, a + 2π)` inside
/// `|x| < L/4`; returns the bin centres.
pub fn decay_radii(grid: &Grid) -> Vec<f64> {
    let limit = grid.length() / 4.0;
    let mut out = Vec::new();
    let mut a = 5.0;
    while a + KERNEL_BIN_WIDTH <= limit {
        out.push(a + PI);
        a += KERNEL_BIN_WIDTH;
    }
    out
}

/// Envelope decay of the kernel of `S̃^z` (Γ-normalized classical symbol of
/// order `z`) against the predicted exponent `-(n+1)/2 - Re z`, accepted
/// within 10%.
pub fn kernel_decay_scan(z: C64, grid: &Grid) -> Result<ScanReport> {
    let radii = decay_radii(grid);
    if radii.len() < 4 {
        return Err(Error::InvalidParameter("box too small for a kernel decay fit".into()));
    }
    let spec = MultiplierSpec::new(z, Sidedness::Classical, 0.0).with_gamma_normalization();
    let profile = kernel_profile(&spec, &radii, grid)?;
    let rows = profile.iter().map(|&(r, a)| vec![r, a]).collect();
    let predicted = -(grid.dim() as f64 + 1.0) / 2.0 - z.re;
    ScanReport::build(
        "kernel_decay",
        &["r", "amplitude"],
        rows,
        1,
        predicted,
        Criterion::Within(0.1 * predicted.abs()),
    )
}

//! Convolution kernels of Bochner-Riesz symbols on the lattice.

use std::f64::consts::PI;

use super::{apply_multiplier, MultiplierSpec};
use crate::lattice::{Field, Grid};
use crate::{Error, Result};

/// Width of the radial bins used to estimate the oscillation envelope: one
/// full period of `cos(|x| + phase)`.
pub const KERNEL_BIN_WIDTH: f64 = 2.0 * PI;

/// The symbol applied to the discrete delta, i.e. the lattice kernel `K`
/// with `h^n Σ K(x_j) e^{-iξ_k·x_j} = m(ξ_k)`.
pub fn kernel_field(spec: &MultiplierSpec, grid: &Grid) -> Result<Field> {
    if spec.order_re <= -1.0 && !spec.gamma_normalized {
        return Err(Error::InvalidMultiplier(
            "kernel needs Re(order) > -1 or Γ-normalization".into(),
        ));
    }
    apply_multiplier(&Field::delta(*grid), spec)
}

/// Envelope samples `(r, A(r))` of the kernel, where `A(r)` is the RMS of
/// `|K|` over lattice nodes with `|x| ∈ [r - π, r + π)`, times `√2` so that a
/// pure cosine of amplitude `A` reports `A`.
pub fn kernel_profile(spec: &MultiplierSpec, radii: &[f64], grid: &Grid) -> Result<Vec<(f64, f64)>> {
    let half_box = grid.length() / 2.0;
    if let Some(&r) = radii.iter().find(|&&r| !(r > 0.0 && r < half_box)) {
        return Err(Error::InvalidParameter(format!(
            "kernel radius {r} must lie in (0, L/2 = {half_box})"
        )));
    }
    let kernel = kernel_field(spec, grid)?;
    Ok(envelope(&kernel, radii))
}

pub(crate) fn envelope(kernel: &Field, radii: &[f64]) -> Vec<(f64, f64)> {
    let grid = *kernel.grid();
    let half = KERNEL_BIN_WIDTH / 2.0;
    let mut sums = vec![0.0; radii.len()];
    let mut counts = vec![0usize; radii.len()];
    for (i, v) in kernel.values().iter().enumerate() {
        let x = grid.x_abs(i);
        for (b, &r) in radii.iter().enumerate() {
            if x >= r - half && x < r + half {
                sums[b] += v.norm_sqr();
                counts[b] += 1;
            }
        }
    }
    radii
        .iter()
        .zip(sums.iter().zip(&counts))
        .map(|(&r, (&s, &c))| {
            let amp = if c == 0 { 0.0 } else { (2.0 * s / c as f64).sqrt() };
            (r, amp)
        })
        .collect()
}

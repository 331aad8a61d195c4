//! Lattice Lebesgue and weighted norms.

use super::{ordered_sum, Field, Side};
use crate::{Error, Result};

/// `‖f‖_p` with the lattice measure of the field's side (`h^n` in space,
/// `dxi^n` in frequency). `p = ∞` gives the maximum modulus.
pub fn lp_norm(f: &Field, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::BadExponent(p));
    }
    let values = f.values();
    if p.is_infinite() {
        return Ok(values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let measure = match f.side() {
        Side::Space => f.grid().cell_volume(),
        Side::Frequency => f.grid().freq_cell_volume(),
    };
    // Rescale by the maximum so large p cannot overflow.
    let top = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(0.0);
    }
    let sum = if p == 2.0 {
        ordered_sum(values, |_, v| (v / top).norm_sqr())
    } else {
        ordered_sum(values, |_, v| (v.norm() / top).powf(p))
    };
    Ok(top * (sum * measure).powf(1.0 / p))
}

/// `‖(1+|x|)^β f‖_2` on the space side.
pub fn weighted_l2_norm(f: &Field, beta: f64) -> Result<f64> {
    f.expect_side(Side::Space)?;
    let grid = *f.grid();
    let sum = ordered_sum(f.values(), |i, v| {
        let x = grid.x_abs(i);
        (1.0 + x).powf(2.0 * beta) * v.norm_sqr()
    });
    Ok((sum * grid.cell_volume()).sqrt())
}

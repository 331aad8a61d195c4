//! Perturbed Helmholtz equation `(-Δ + V - 1)u = f` through the
//! factorization `-Δ + V - 1 = (I + V R₀)(-Δ - 1)`: solve
//! `(I + V R₀) g = f` by Neumann iteration and set `u = R₀ g`.

use super::{fredholm_defect, EpsLadder, FreeResolvent, DEFECT_THRESHOLD};
use crate::lattice::{lp_norm, Field, Grid, Side};
use crate::multipliers::CutoffSpec;
use crate::{Error, Result, C64};

/// Number of consecutive growing steps that stops the iteration.
const GROWTH_PATIENCE: usize = 5;

/// Real potential on a grid with its `L^{(n+1)/2}` norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    grid: Grid,
    values: Vec<f64>,
    lr_norm: f64,
}

impl Potential {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Potential> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "potential has {} values, grid needs {}",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("potential must be finite".into()));
        }
        let field = Field::from_values(grid, Side::Space, values.iter().map(|&v| C64::new(v, 0.0)).collect())?;
        let lr_norm = lp_norm(&field, Potential::exponent(&grid))?;
        Ok(Potential { grid, values, lr_norm })
    }

    pub fn from_fn<F: Fn(&[f64]) -> f64>(grid: Grid, v: F) -> Result<Potential> {
        let n = grid.dim();
        let values = (0..grid.len()).map(|i| v(&grid.point(i)[..n])).collect();
        Potential::new(grid, values)
    }

    pub fn zero(grid: Grid) -> Potential {
        Potential {
            grid,
            values: vec![0.0; grid.len()],
            lr_norm: 0.0,
        }
    }

    /// `(n+1)/2`.
    pub fn exponent(grid: &Grid) -> f64 {
        (grid.dim() as f64 + 1.0) / 2.0
    }

    /// Same shape rescaled to the given `L^{(n+1)/2}` norm.
    pub fn scaled_to(&self, norm: f64) -> Result<Potential> {
        if self.lr_norm == 0.0 {
            return Err(Error::InvalidParameter("cannot rescale a zero potential".into()));
        }
        let c = norm / self.lr_norm;
        Potential::new(self.grid, self.values.iter().map(|v| v * c).collect())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn lr_norm(&self) -> f64 {
        self.lr_norm
    }

    /// Pointwise product `V·u` of a space-side field.
    pub fn multiply(&self, u: &Field) -> Result<Field> {
        u.expect_side(Side::Space)?;
        Ok(u.map_indexed(|i, v| v * self.values[i]))
    }
}

/// Result of [`solve_perturbed`].
#[derive(Debug, Clone)]
pub struct PerturbedSolution {
    pub u: Field,
    /// Preimage `g` with `(I + V R₀) g = f`.
    pub preimage: Field,
    pub iterations: usize,
    /// `‖(-Δ + V - 1)u - f‖₂ / ‖f‖₂`.
    pub residual: f64,
    /// Fredholm defect of the preimage.
    pub preimage_defect: f64,
}

/// Lebesgue exponent of the data space, `max(1, (2n+2)/(n+5))`.
pub fn data_exponent(grid: &Grid) -> f64 {
    let n = grid.dim() as f64;
    ((2.0 * n + 2.0) / (n + 5.0)).max(1.0)
}

/// Neumann iteration `g_{k+1} = f - V R₀ g_k` from `g_0 = f`, stopped when
/// `‖g_{k+1} - g_k‖_p ≤ tol·‖f‖_p` with `p = max(1, (2n+2)/(n+5))`.
///
/// Solvability requires `f` in the range `(I + V R₀) X₀`, which is checked
/// after convergence by requiring the preimage `g` to pass the
/// [`DEFECT_THRESHOLD`] test. Iterates growing for 5 consecutive steps raise
/// [`Error::NoContraction`].
pub fn solve_perturbed(
    f: &Field,
    potential: &Potential,
    tol: f64,
    max_iter: usize,
    ladder: &EpsLadder,
    cutoff: &CutoffSpec,
) -> Result<PerturbedSolution> {
    let grid = *f.grid();
    if *potential.grid() != grid {
        return Err(Error::GridMismatch);
    }
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::InvalidParameter("need tol > 0 and max_iter >= 1".into()));
    }
    let p = data_exponent(&grid);
    let f = f.to_space();
    let f_norm = lp_norm(&f, p)?;
    let resolvent = FreeResolvent::new(grid, ladder, cutoff);

    let mut g = f.clone();
    let mut last_distance = f64::INFINITY;
    let mut growing = 0;
    let mut iterations = 0;
    let converged = loop {
        if iterations == max_iter {
            break false;
        }
        iterations += 1;
        let vr = potential.multiply(&resolvent.apply(&g)?)?;
        let next = f.sub(&vr)?;
        let distance = lp_norm(&next.sub(&g)?, p)?;
        g = next;
        if distance <= tol * f_norm {
            break true;
        }
        if distance > last_distance {
            growing += 1;
            if growing >= GROWTH_PATIENCE {
                return Err(Error::NoContraction { iterations });
            }
        } else {
            growing = 0;
        }
        last_distance = distance;
    };
    if !converged {
        return Err(Error::IterationLimit { iterations });
    }
    let preimage_defect = fredholm_defect(&g, None)?;
    if preimage_defect >= DEFECT_THRESHOLD {
        return Err(Error::NotInX0 {
            defect: preimage_defect,
            threshold: DEFECT_THRESHOLD,
        });
    }
    let u = resolvent.apply(&g)?;
    let residual = perturbed_residual(&u, &f, potential)?;
    Ok(PerturbedSolution {
        u,
        preimage: g,
        iterations,
        residual,
        preimage_defect,
    })
}

/// `‖(-Δ + V - 1)u - f‖₂ / ‖f‖₂` with the exact lattice Laplacian symbol.
pub fn perturbed_residual(u: &Field, f: &Field, potential: &Potential) -> Result<f64> {
    let grid = *u.grid();
    let u = u.to_space();
    let lap = u.to_frequency().map_indexed(|i, v| {
        let r = grid.xi_abs(i);
        v * (r * r - 1.0)
    });
    let lhs = lap.to_space().add(&potential.multiply(&u)?)?;
    let f = f.to_space();
    let num = lp_norm(&lhs.sub(&f)?, 2.0)?;
    let denom = lp_norm(&f, 2.0)?;
    Ok(if denom == 0.0 { num } else { num / denom })
}

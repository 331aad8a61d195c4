//! Free and perturbed Helmholtz solvers, the sphere annihilator and the
//! Fredholm-defect membership test.
//!
//! The free solver regularizes `1/(|ξ|² - 1)` near the sphere by the odd
//! symbol `s/(s² + ε²)` (see [`helmholtz_symbol`]), evaluates it on a
//! geometric ε-ladder and extrapolates each node to `ε = 0` with rational
//! extrapolation in `t = ε²`.

mod agmon;
mod extrapolate;
mod perturbed;

pub use agmon::{agmon_compare, AgmonRecord};
pub use extrapolate::rational_diagonal;
pub use perturbed::{data_exponent, perturbed_residual, solve_perturbed, PerturbedSolution, Potential};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lattice::{lp_norm, Field, Grid};
use crate::multipliers::{helmholtz_symbol, CutoffSpec};
use crate::sphere::{f_profile_with, PaddedEvaluator};
use crate::{Error, Result, C64};

/// Default X₀ membership threshold for [`fredholm_defect`].
pub const DEFECT_THRESHOLD: f64 = 1e-6;

/// Relative L² change between the last two extrapolants below which the
/// extrapolated field counts as converged.
pub const EXTRAPOLANT_TOL: f64 = 1e-7;

/// Largest ratio `|N_K - N_{K-1}| / |N_{K-1} - N_{K-2}|` of successive rung
/// norm differences accepted as a Cauchy tail. Norms growing like `ε^{-1/2}`
/// give `√2`; convergent data gives about `1/2`.
pub const CAUCHY_RATIO: f64 = 0.8;

/// Radii at which [`fredholm_defect`] samples `F(r)`: 21 points on
/// `[1/2, 3/2]`, including `r = 1`.
pub fn defect_radii() -> Vec<f64> {
    (0..=20).map(|i| 0.5 + i as f64 / 20.0).collect()
}

/// Strictly decreasing positive regularization values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct EpsLadder(Vec<f64>);

impl EpsLadder {
    pub fn new(rungs: Vec<f64>) -> Result<EpsLadder> {
        if rungs.len() < 3 {
            return Err(Error::LadderTooShort(rungs.len()));
        }
        let ok = rungs.iter().all(|&e| e.is_finite() && e > 0.0)
            && rungs.windows(2).all(|w| w[1] < w[0]);
        if !ok {
            return Err(Error::BadLadder);
        }
        Ok(EpsLadder(rungs))
    }

    /// `ε_k = ε₀ 2^{-k}`, `k = 0..count`.
    pub fn geometric(eps0: f64, count: usize) -> Result<EpsLadder> {
        EpsLadder::new((0..count).map(|k| eps0 * 0.5f64.powi(k as i32)).collect())
    }

    pub fn rungs(&self) -> &[f64] {
        &self.0
    }
}

impl Default for EpsLadder {
    fn default() -> Self {
        EpsLadder::geometric(0.25, 6).expect("default ladder is valid")
    }
}

impl TryFrom<Vec<f64>> for EpsLadder {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        EpsLadder::new(v)
    }
}

impl From<EpsLadder> for Vec<f64> {
    fn from(l: EpsLadder) -> Vec<f64> {
        l.0
    }
}

/// Per-solve record of the ε-limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub eps_ladder: Vec<f64>,
    /// `‖u_ε‖₂` per rung.
    pub l2_norms: Vec<f64>,
    /// `‖u‖₂` of the extrapolated solution; present only when converged.
    pub extrapolated_norm: Option<f64>,
    /// Relative L² change between the last two extrapolants.
    pub extrapolant_change: f64,
    /// Least-squares slope of `log ‖u_ε‖₂` against `log ε`.
    pub growth_exponent: f64,
    /// `‖(-Δ-1)u - f‖₂ / ‖f‖₂`, computed with the exact lattice symbol.
    pub residual: f64,
    pub fredholm_defect: f64,
    pub converged: bool,
}

/// Returns `f` with `f̂(ξ) = (|ξ|² - 1) ĝ(ξ)`, on the same side as `g`.
pub fn annihilate(g: &Field) -> Field {
    let grid = *g.grid();
    let out = g.to_frequency().map_indexed(|i, v| {
        let r = grid.xi_abs(i);
        v * (r * r - 1.0)
    });
    out.to_side(g.side())
}

/// `F(1) / max F(r)` over [`defect_radii`], evaluated with the padded
/// evaluator. Zero data has defect 0.
pub fn fredholm_defect(f: &Field, resolution: Option<usize>) -> Result<f64> {
    let eval = PaddedEvaluator::new(f, 1.5)?;
    let profile = f_profile_with(&eval, &defect_radii(), resolution)?;
    let at_one = profile[10].1;
    let max = profile.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(if max == 0.0 { 0.0 } else { at_one / max })
}

/// The extrapolation diagonal of the regularized symbol at `|ξ| = xi_abs`.
fn symbol_diagonal(xi_abs: f64, ladder: &EpsLadder, cutoff: &CutoffSpec, ts: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let rungs: Vec<f64> = ladder
        .rungs()
        .iter()
        .map(|&e| helmholtz_symbol(xi_abs, cutoff, e))
        .collect();
    let diag = rational_diagonal(ts, &rungs);
    (rungs, diag)
}

/// The ε → 0 extrapolated free resolvent symbol on a grid, reusable across
/// many applications.
#[derive(Debug, Clone)]
pub struct FreeResolvent {
    grid: Grid,
    symbol: Vec<f64>,
}

impl FreeResolvent {
    pub fn new(grid: Grid, ladder: &EpsLadder, cutoff: &CutoffSpec) -> FreeResolvent {
        let ts: Vec<f64> = ladder.rungs().iter().map(|e| e * e).collect();
        let symbol = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let (_, diag) = symbol_diagonal(grid.xi_abs(i), ladder, cutoff, &ts);
                *diag.last().unwrap()
            })
            .collect();
        FreeResolvent { grid, symbol }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `R₀g` on the space side.
    pub fn apply(&self, g: &Field) -> Result<Field> {
        if *g.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        let ghat = g.to_frequency();
        Ok(ghat.map_indexed(|i, v| v * self.symbol[i]).to_space())
    }
}

/// Accumulates per-rung sums over fixed chunks, combined in index order.
fn rung_sums<F>(len: usize, width: usize, term: F) -> Vec<f64>
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    const CHUNK: usize = 4096;
    let partials: Vec<Vec<f64>> = (0..len.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![0.0; width];
            for i in c * CHUNK..((c + 1) * CHUNK).min(len) {
                term(i, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; width];
    for p in &partials {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    total
}

/// `‖(-Δ-1)u - f‖₂ / ‖f‖₂` using the exact lattice symbol `|ξ_k|² - 1`.
pub fn spectral_residual(u: &Field, f: &Field) -> Result<f64> {
    if u.grid() != f.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = *u.grid();
    let uhat = u.to_frequency();
    let fhat = f.to_frequency();
    let r = uhat.map_indexed(|i, v| {
        let x = grid.xi_abs(i);
        v * (x * x - 1.0) - fhat.values()[i]
    });
    let denom = lp_norm(&fhat, 2.0)?;
    let num = lp_norm(&r, 2.0)?;
    Ok(if denom == 0.0 { num } else { num / denom })
}

fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    if ys.iter().any(|&y| !(y > 0.0)) {
        return 0.0;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Solves `(-Δ-1)u = f` as the ε → 0 limit of the regularized symbol.
///
/// Convergence requires the last two extrapolants to agree to
/// [`EXTRAPOLANT_TOL`] and the rung norms to form a Cauchy tail (ratio of
/// the last two norm differences at most [`CAUCHY_RATIO`], or a negligible
/// last difference). Otherwise [`Error::NoConvergence`] carries the
/// diagnostics, which is the expected outcome for data outside X₀.
pub fn solve_free(f: &Field, ladder: &EpsLadder, cutoff: &CutoffSpec) -> Result<(Field, SolveDiagnostics)> {
    let grid = *f.grid();
    let fhat = f.to_frequency();
    let eps = ladder.rungs();
    let k = eps.len();
    let ts: Vec<f64> = eps.iter().map(|e| e * e).collect();
    let resolvent = FreeResolvent::new(grid, ladder, cutoff);

    // Layout of the accumulator: [rung², diag², (diag_k - diag_{k-1})²].
    let sums = rung_sums(grid.len(), 3 * k, |i, acc| {
        let w = fhat.values()[i].norm_sqr();
        if w == 0.0 {
            return;
        }
        let (rungs, diag) = symbol_diagonal(grid.xi_abs(i), ladder, cutoff, &ts);
        for j in 0..k {
            acc[j] += rungs[j] * rungs[j] * w;
            acc[k + j] += diag[j] * diag[j] * w;
            if j > 0 {
                let d = diag[j] - diag[j - 1];
                acc[2 * k + j] += d * d * w;
            }
        }
    });
    let scale = grid.freq_cell_volume() / (2.0 * std::f64::consts::PI).powi(grid.dim() as i32);
    let l2_norms: Vec<f64> = sums[..k].iter().map(|s| (s * scale).sqrt()).collect();
    let last_diag = sums[2 * k - 1];
    let extrapolant_change = if last_diag == 0.0 {
        0.0
    } else {
        (sums[3 * k - 1] / last_diag).sqrt()
    };

    let u = resolvent.apply(&fhat)?;
    let residual = spectral_residual(&u, &fhat)?;
    let defect = fredholm_defect(&fhat, None)?;
    let growth_exponent = log_slope(eps, &l2_norms);

    let d_last = (l2_norms[k - 1] - l2_norms[k - 2]).abs();
    let d_prev = (l2_norms[k - 2] - l2_norms[k - 3]).abs();
    let cauchy = d_last <= 1e-12 * l2_norms[k - 1] || d_last <= CAUCHY_RATIO * d_prev;
    let converged = cauchy && extrapolant_change < EXTRAPOLANT_TOL;
    let diagnostics = SolveDiagnostics {
        eps_ladder: eps.to_vec(),
        l2_norms,
        extrapolated_norm: if converged { Some(lp_norm(&u, 2.0)?) } else { None },
        extrapolant_change,
        growth_exponent,
        residual,
        fredholm_defect: defect,
        converged,
    };
    if !converged {
        return Err(Error::NoConvergence {
            growth_exponent,
            diagnostics: Box::new(diagnostics),
        });
    }
    Ok((u, diagnostics))
}

/// Frequency-side copy of `f` with `f̂` zeroed outside `|ξ| ≤ max_xi`.
pub fn band_limit(f: &Field, max_xi: f64) -> Field {
    let grid = *f.grid();
    f.to_frequency().map_indexed(|i, v| {
        if grid.xi_abs(i) <= max_xi {
            v
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

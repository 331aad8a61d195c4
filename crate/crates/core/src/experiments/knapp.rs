//! Knapp examples: smooth bumps on `δ × δ²` slabs just inside the unit
//! sphere.
//!
//! The slab is `{|ξ'| ≤ δ, 1 - 2δ² ≤ ξ_n ≤ 1 - δ²}` and the bump is
//! `b(η) = φ(|η'|) φ(η_n)` with `φ(t) = exp(-1/(1 - t²))` in the adapted
//! coordinates `ξ' = δη'`, `ξ_n = c + (δ²/2)η_n`, `c = 1 - (3/2)δ²`.
//!
//! A physical lattice resolves the slab only when `dxi ≤ δ²/4`, which at
//! desk-scale grids limits `δ` to about `1/4`. The scans therefore work on
//! a lattice in the adapted variables: with `J = δ^{n+1}/2` the Jacobian,
//! `f(x) = J e^{icx_n} B(δx', δ²x_n/2)` where `B` is the inverse transform of
//! `b`, so `‖f‖_p = J^{1-1/p} ‖B‖_p` exactly, and multipliers act on `b`
//! through `m(ξ(η))`.

use serde::{Deserialize, Serialize};

use super::fit::{slope_tolerance, Criterion, ScanReport};
use crate::lattice::{lp_norm, Field, Grid};
use crate::multipliers::{br_symbol, MultiplierSpec, Sidedness};
use crate::{Error, Result, C64};

/// Slab parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnappParams {
    pub n: usize,
    pub delta: f64,
    /// Axis normal to the slab.
    pub axis: usize,
    /// Multiply `f̂` by `|ξ|² - 1` so the data lies in X₀ with vanishing
    /// sphere trace to first order.
    #[serde(default)]
    pub annihilated: bool,
}

impl KnappParams {
    pub fn new(n: usize, delta: f64) -> KnappParams {
        KnappParams {
            n,
            delta,
            axis: n - 1,
            annihilated: false,
        }
    }

    pub fn annihilated(mut self) -> KnappParams {
        self.annihilated = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n != 2 && self.n != 3 {
            return Err(Error::BadDimension(self.n));
        }
        if !(self.delta > 0.0 && self.delta <= 0.25) {
            return Err(Error::InvalidParameter(format!("delta = {} must lie in (0, 1/4]", self.delta)));
        }
        if self.axis >= self.n {
            return Err(Error::InvalidParameter(format!("slab axis {} out of range", self.axis)));
        }
        Ok(())
    }

    /// Slab centre `c = 1 - (3/2)δ²` along the normal axis.
    pub fn center(&self) -> f64 {
        1.0 - 1.5 * self.delta * self.delta
    }

    /// `J = δ^{n+1}/2`.
    pub fn jacobian(&self) -> f64 {
        self.delta.powi(self.n as i32 + 1) / 2.0
    }

    /// Physical frequency of adapted coordinates `η`.
    pub fn xi_of_eta(&self, eta: &[f64]) -> [f64; 3] {
        let mut xi = [0.0; 3];
        for a in 0..self.n {
            xi[a] = if a == self.axis {
                self.center() + 0.5 * self.delta * self.delta * eta[a]
            } else {
                self.delta * eta[a]
            };
        }
        xi
    }

    fn amplitude(&self, eta: &[f64]) -> f64 {
        let mut t2 = 0.0;
        for (a, e) in eta.iter().enumerate().take(self.n) {
            if a != self.axis {
                t2 += e * e;
            }
        }
        let b = bump(t2.sqrt()) * bump(eta[self.axis]);
        if self.annihilated && b != 0.0 {
            let xi = self.xi_of_eta(eta);
            let r2: f64 = xi.iter().map(|v| v * v).sum();
            b * (r2 - 1.0)
        } else {
            b
        }
    }
}

/// `exp(-1/(1 - t²))` on `|t| < 1`, zero elsewhere.
pub fn bump(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

/// The Knapp example sampled on a physical lattice (space side).
pub fn knapp_field(params: &KnappParams, grid: &Grid) -> Result<Field> {
    params.validate()?;
    if grid.dim() != params.n {
        return Err(Error::BadDimension(grid.dim()));
    }
    let dxi = grid.freq_spacing();
    if dxi > params.delta * params.delta / 4.0 {
        return Err(Error::DeltaUnresolvable {
            delta: params.delta,
            dxi,
        });
    }
    let p = *params;
    let d2 = 0.5 * p.delta * p.delta;
    let fhat = Field::from_frequency_fn(*grid, move |xi| {
        let mut eta = [0.0; 3];
        for a in 0..p.n {
            eta[a] = if a == p.axis { (xi[a] - p.center()) / d2 } else { xi[a] / p.delta };
        }
        C64::new(p.amplitude(&eta), 0.0)
    });
    Ok(fhat.to_space())
}

/// Norms of one slab example computed on an adapted lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnappNorms {
    pub delta: f64,
    /// `‖f‖_p`
    pub data_norm: f64,
    /// `‖m(D) f‖_q`, when a multiplier was requested.
    pub multiplier_norm: Option<f64>,
}

/// Computes `‖f‖_p` and optionally `‖m(D)f‖_q` for the slab example, using
/// `scaled` as the lattice in the adapted variables `η`.
pub fn knapp_norms(
    params: &KnappParams,
    scaled: &Grid,
    p: f64,
    multiplier: Option<(&MultiplierSpec, f64)>,
) -> Result<KnappNorms> {
    params.validate()?;
    if scaled.dim() != params.n {
        return Err(Error::BadDimension(scaled.dim()));
    }
    if scaled.nyquist() <= 1.0 {
        return Err(Error::InvalidParameter("adapted lattice must contain the unit cube".into()));
    }
    let j = params.jacobian();
    let p_ = *params;
    let bhat = Field::from_frequency_fn(*scaled, move |eta| C64::new(p_.amplitude(eta), 0.0));
    let data_norm = j.powf(1.0 - 1.0 / p) * lp_norm(&bhat.to_space(), p)?;
    let multiplier_norm = match multiplier {
        None => None,
        Some((spec, q)) => {
            spec.validate()?;
            let grid = *scaled;
            let out = bhat.map_indexed(|i, v| {
                if v == C64::new(0.0, 0.0) {
                    return v;
                }
                let eta = grid.wavevector(i);
                let xi = p_.xi_of_eta(&eta[..p_.n]);
                let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
                // Slab nodes stay strictly inside the ball, where the symbols
                // in use are finite.
                v * br_symbol(r, spec).unwrap_or(C64::new(f64::NAN, 0.0))
            });
            if out.values().iter().any(|v| !v.re.is_finite()) {
                return Err(Error::UnregularizedSingularity { xi_abs: 1.0 });
            }
            Some(j.powf(1.0 - 1.0 / q) * lp_norm(&out.to_space(), q)?)
        }
    };
    Ok(KnappNorms {
        delta: params.delta,
        data_norm,
        multiplier_norm,
    })
}

/// `S^{-α}` restricted to the inside of the ball (exact there at `ε = 0`).
pub fn inside_multiplier(alpha: f64) -> MultiplierSpec {
    MultiplierSpec::new(C64::new(-alpha, 0.0), Sidedness::OneSidedInside, 0.0)
}

fn check_deltas(deltas: &[f64]) -> Result<()> {
    if deltas.len() < 4 {
        return Err(Error::InvalidParameter("a delta scan needs at least 4 values".into()));
    }
    Ok(())
}

/// Slope scans of `‖f_δ‖_p` (predicted `(n+1)(1-1/p)`) and `‖S^{-α}f_δ‖₂`
/// (predicted `(n+1)/2 - 2α`) against `δ`.
pub fn knapp_scan(deltas: &[f64], p: f64, alpha: f64, scaled: &Grid) -> Result<(ScanReport, ScanReport)> {
    check_deltas(deltas)?;
    let n = scaled.dim() as f64;
    let spec = inside_multiplier(alpha);
    let mut lp_rows = Vec::new();
    let mut s_rows = Vec::new();
    for &delta in deltas {
        let norms = knapp_norms(&KnappParams::new(scaled.dim(), delta), scaled, p, Some((&spec, 2.0)))?;
        lp_rows.push(vec![delta, norms.data_norm]);
        s_rows.push(vec![delta, norms.multiplier_norm.unwrap()]);
    }
    let pred_lp = (n + 1.0) * (1.0 - 1.0 / p);
    let pred_s = (n + 1.0) / 2.0 - 2.0 * alpha;
    let lp = ScanReport::build(
        "knapp_lp",
        &["delta", "lp_norm"],
        lp_rows,
        1,
        pred_lp,
        Criterion::Within(slope_tolerance(pred_lp)),
    )?;
    let s = ScanReport::build(
        "knapp_multiplier",
        &["delta", "l2_norm"],
        s_rows,
        1,
        pred_s,
        Criterion::Within(slope_tolerance(pred_s)),
    )?;
    Ok((lp, s))
}

/// Slope of `‖S^{-α}f_δ‖_q / ‖f_δ‖_p` against `δ`, with the verdict given by
/// `criterion`. The predicted slope is `(n+1)(1/p - 1/q) - 2α`.
pub fn knapp_ratio_scan(
    deltas: &[f64],
    p: f64,
    q: f64,
    alpha: f64,
    annihilated: bool,
    scaled: &Grid,
    criterion: Criterion,
) -> Result<ScanReport> {
    check_deltas(deltas)?;
    let n = scaled.dim() as f64;
    let spec = inside_multiplier(alpha);
    let mut rows = Vec::new();
    for &delta in deltas {
        let mut params = KnappParams::new(scaled.dim(), delta);
        params.annihilated = annihilated;
        let norms = knapp_norms(&params, scaled, p, Some((&spec, q)))?;
        let m = norms.multiplier_norm.unwrap();
        rows.push(vec![delta, norms.data_norm, m, m / norms.data_norm]);
    }
    let predicted = (n + 1.0) * (1.0 / p - 1.0 / q) - 2.0 * alpha;
    ScanReport::build(
        "knapp_ratio",
        &["delta", "lp_norm", "lq_norm", "ratio"],
        rows,
        3,
        predicted,
        criterion,
    )
}

//! ε-scans of the regularized annulus integral
//! `I(ε) = ∫_{annulus} |f̂(ξ)|² ((1-|ξ|²)² + ε²)^{-α} dξ`
//! against its leading singular part `C_α ε^{1-2α} F(1)`.

use serde::{Deserialize, Serialize};

use super::fit::{slope_tolerance, Criterion, ScanReport};
use crate::lattice::{Field, ANNULUS_OUTER};
use crate::quadrature::{graded_rule, integrate_adaptive};
use crate::special::gamma_real;
use crate::sphere::{f_profile_with, PaddedEvaluator};
use crate::{Error, Result};

/// Largest allowed disagreement between the two `C_α` routes.
pub const C_ALPHA_AGREEMENT: f64 = 1e-6;

/// Relative change over the last two rungs below which `I(ε)` counts as
/// converged.
pub const BOUNDED_CHANGE: f64 = 1e-3;

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.5 && alpha < 1.5 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}

/// `(√π/2) Γ(α-1/2)/Γ(α)`.
pub fn c_alpha_closed(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(0.5 * std::f64::consts::PI.sqrt() * gamma_real(alpha - 0.5) / gamma_real(alpha))
}

/// `∫_0^∞ (1+v²)^{-α} dv` by adaptive quadrature, with the tail `v > 1`
/// mapped onto `(0, 1]` through `v = y^{-1/(2α-1)}`, which turns it into
/// `∫_0^1 k (1 + y^{2k})^{-α} dy`, `k = 1/(2α-1)`.
pub fn c_alpha_quadrature(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let head = integrate_adaptive(|v| (1.0 + v * v).powf(-alpha), 0.0, 1.0, 1e-14, 1e-13);
    let k = 1.0 / (2.0 * alpha - 1.0);
    let tail = integrate_adaptive(|y| k * (1.0 + y.powf(2.0 * k)).powf(-alpha), 0.0, 1.0, 1e-14, 1e-13);
    Ok(head + tail)
}

/// `C_α = lim ε^{2α-1} ∫_{1/2}^{3/2} ((1-r²)²+ε²)^{-α} dr`, computed in closed
/// form and by quadrature; the two must agree to [`C_ALPHA_AGREEMENT`].
pub fn c_alpha(alpha: f64) -> Result<f64> {
    let closed = c_alpha_closed(alpha)?;
    let quad = c_alpha_quadrature(alpha)?;
    let diff = (closed - quad).abs() / closed;
    if diff > C_ALPHA_AGREEMENT {
        return Err(Error::Disagreement(format!("c_alpha({alpha}): relative difference {diff:.3e}")));
    }
    Ok(closed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Annulus {
    /// `1/2 ≤ |ξ| ≤ 3/2`
    Full,
    /// `1/2 ≤ |ξ| < 1`
    Inner,
    /// `1 < |ξ| ≤ 3/2`
    Outer,
}

impl Annulus {
    pub fn bounds(self) -> (f64, f64) {
        match self {
            Annulus::Full => (0.5, ANNULUS_OUTER),
            Annulus::Inner => (0.5, 1.0),
            Annulus::Outer => (1.0, ANNULUS_OUTER),
        }
    }

    fn contains(self, r: f64) -> bool {
        match self {
            Annulus::Full => (0.5..=ANNULUS_OUTER).contains(&r),
            Annulus::Inner => (0.5..1.0).contains(&r),
            Annulus::Outer => r > 1.0 && r <= ANNULUS_OUTER,
        }
    }

    /// Share of the singular part carried by this annulus.
    fn compensator_share(self) -> f64 {
        match self {
            Annulus::Full => 1.0,
            Annulus::Inner | Annulus::Outer => 0.5,
        }
    }
}

/// How the volume integral is discretized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum VolumeRule {
    /// `∫ F(r) w_ε(r) dr` on Gauss panels graded toward `r = 1`, finest
    /// panel `ε_min/8`; resolves the peak at every rung.
    Radial { per_panel: usize },
    /// Direct sum over lattice frequency nodes. Only meaningful while `ε`
    /// stays well above the frequency spacing.
    Lattice,
}

impl Default for VolumeRule {
    fn default() -> Self {
        VolumeRule::Radial { per_panel: 12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsScanConfig {
    pub alpha: f64,
    /// Strictly decreasing, at least 4 rungs.
    pub ladder: Vec<f64>,
    pub annulus: Annulus,
    #[serde(default)]
    pub rule: VolumeRule,
    /// Sphere rule resolution; `None` picks the default per radius.
    #[serde(default)]
    pub resolution: Option<usize>,
}

impl EpsScanConfig {
    /// `α` with the ladder `1/4·2^{-k}`, `k = 0..6`, on the full annulus.
    pub fn new(alpha: f64) -> EpsScanConfig {
        EpsScanConfig {
            alpha,
            ladder: (0..=6).map(|k| 0.25 * 0.5f64.powi(k)).collect(),
            annulus: Annulus::Full,
            rule: VolumeRule::default(),
            resolution: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if self.ladder.len() < 4 {
            return Err(Error::LadderTooShort(self.ladder.len()));
        }
        if self.ladder.iter().any(|e| !(e.is_finite() && *e > 0.0))
            || self.ladder.windows(2).any(|w| w[1] >= w[0])
        {
            return Err(Error::BadLadder);
        }
        if let VolumeRule::Radial { per_panel } = self.rule {
            if per_panel == 0 {
                return Err(Error::BadResolution(0));
            }
        }
        Ok(())
    }
}

/// Output of [`eps_scan`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsScan {
    /// Columns `eps, I, compensator, difference, ratio`; `ratio` is
    /// `I/compensator` (NaN when `F(1) = 0`).
    pub report: ScanReport,
    pub f_at_one: f64,
    pub c_alpha: f64,
    /// Relative change of `I` over the last two rungs.
    pub last_change: f64,
}

fn weight(r: f64, eps: f64, alpha: f64) -> f64 {
    let d = 1.0 - r * r;
    (d * d + eps * eps).powf(-alpha)
}

/// `I(ε)` at every rung of the ladder.
pub fn annulus_integrals(f: &Field, cfg: &EpsScanConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let (lo, hi) = cfg.annulus.bounds();
    match cfg.rule {
        VolumeRule::Radial { per_panel } => {
            let eps_min = *cfg.ladder.last().unwrap();
            let (nodes, weights) = graded_rule(1.0, lo, hi, eps_min / 8.0, per_panel);
            let eval = PaddedEvaluator::new(f, hi)?;
            let profile = f_profile_with(&eval, &nodes, cfg.resolution)?;
            Ok(cfg
                .ladder
                .iter()
                .map(|&eps| {
                    profile
                        .iter()
                        .zip(&weights)
                        .map(|(&(r, fr), w)| w * fr * weight(r, eps, cfg.alpha))
                        .sum()
                })
                .collect())
        }
        VolumeRule::Lattice => {
            let fhat = f.to_frequency();
            let grid = *f.grid();
            let samples: Vec<(f64, f64)> = fhat
                .values()
                .iter()
                .enumerate()
                .filter_map(|(i, v)| {
                    let r = grid.xi_abs(i);
                    cfg.annulus.contains(r).then(|| (r, v.norm_sqr()))
                })
                .collect();
            let dv = grid.freq_cell_volume();
            Ok(cfg
                .ladder
                .iter()
                .map(|&eps| samples.iter().map(|&(r, a)| a * weight(r, eps, cfg.alpha)).sum::<f64>() * dv)
                .collect())
        }
    }
}

fn f_at_one(f: &Field, resolution: Option<usize>) -> Result<f64> {
    let eval = PaddedEvaluator::new(f, 1.0)?;
    Ok(f_profile_with(&eval, &[1.0], resolution)?[0].1)
}

fn relative_change(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        if a == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        ((b - a) / b).abs()
    }
}

/// Tabulates `I(ε)`, the compensator `share·C_α ε^{1-2α} F(1)` (share 1 on
/// the full annulus, 1/2 on either half), their difference and ratio. The
/// fitted slope of `log I` against `log ε` is compared with `1 - 2α` when
/// `F(1) > 0` and with 0 otherwise.
pub fn eps_scan(f: &Field, cfg: &EpsScanConfig) -> Result<EpsScan> {
    let integrals = annulus_integrals(f, cfg)?;
    let c = c_alpha(cfg.alpha)?;
    let f1 = f_at_one(f, cfg.resolution)?;
    let share = cfg.annulus.compensator_share();
    let rows: Vec<Vec<f64>> = cfg
        .ladder
        .iter()
        .zip(&integrals)
        .map(|(&eps, &i)| {
            let comp = share * c * eps.powf(1.0 - 2.0 * cfg.alpha) * f1;
            let ratio = if comp == 0.0 { f64::NAN } else { i / comp };
            vec![eps, i, comp, i - comp, ratio]
        })
        .collect();
    let k = integrals.len();
    let last_change = relative_change(integrals[k - 2], integrals[k - 1]);
    let predicted = if f1 > 0.0 { 1.0 - 2.0 * cfg.alpha } else { 0.0 };
    let name = match cfg.annulus {
        Annulus::Full => "eps_scan",
        Annulus::Inner => "eps_scan_inner",
        Annulus::Outer => "eps_scan_outer",
    };
    let report = if integrals.iter().all(|&i| i == 0.0) {
        // Zero data: nothing to fit, trivially bounded.
        ScanReport {
            name: name.to_string(),
            columns: ["eps", "I", "compensator", "difference", "ratio"].map(String::from).to_vec(),
            rows,
            fit_column: 1,
            predicted_slope: 0.0,
            fitted_slope: 0.0,
            fit_residual: 0.0,
            criterion: Criterion::Within(slope_tolerance(0.0)),
            excluded: Vec::new(),
            verdict: true,
        }
    } else {
        ScanReport::build(
            name,
            &["eps", "I", "compensator", "difference", "ratio"],
            rows,
            1,
            predicted,
            Criterion::Within(slope_tolerance(predicted)),
        )?
    };
    Ok(EpsScan {
        report,
        f_at_one: f1,
        c_alpha: c,
        last_change,
    })
}

/// Output of [`one_sided_remainder_scan`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemainderScan {
    /// Columns `eps, I, half_compensator, remainder, increment` for the
    /// inner half; the exponent is fitted on `|increment|`.
    pub inner: ScanReport,
    pub outer: ScanReport,
    /// `I_full - C_α ε^{1-2α} F(1)` per rung.
    pub full_difference: Vec<f64>,
    /// Relative change of the full difference over the last two rungs.
    pub full_last_change: f64,
    /// `|D_K - D_{K-1}| / |D_{K-1} - D_{K-2}|` for the full difference `D`;
    /// below 1 when the difference settles.
    pub full_increment_ratio: f64,
    pub full_bounded: bool,
    /// Remainder coefficients `B` in `R(ε) ≈ A + B ε^γ`, `γ` the fitted
    /// exponent of each half.
    pub inner_coefficient: f64,
    pub outer_coefficient: f64,
    pub opposite_signs: bool,
    pub f_at_one: f64,
}

fn half_report(name: &str, cfg: &EpsScanConfig, integrals: &[f64], half_comp: &[f64], predicted: f64) -> Result<(ScanReport, f64)> {
    let remainders: Vec<f64> = integrals.iter().zip(half_comp).map(|(i, c)| i - c).collect();
    let rows: Vec<Vec<f64>> = (1..integrals.len())
        .map(|k| {
            vec![
                cfg.ladder[k],
                integrals[k],
                half_comp[k],
                remainders[k],
                remainders[k] - remainders[k - 1],
            ]
        })
        .collect();
    let report = ScanReport::build(
        name,
        &["eps", "I", "half_compensator", "remainder", "increment"],
        rows,
        4,
        predicted,
        Criterion::Within(0.1 * predicted.abs()),
    )?;
    // Coefficient B from the last increment: ΔR = B (ε_K^γ - ε_{K-1}^γ).
    let k = integrals.len() - 1;
    let g = report.fitted_slope;
    let denom = cfg.ladder[k].powf(g) - cfg.ladder[k - 1].powf(g);
    let coefficient = (remainders[k] - remainders[k - 1]) / denom;
    Ok((report, coefficient))
}

/// Splits the annulus at `|ξ| = 1` for `1 < α < 3/2`. Each half minus its
/// half-compensator `(C_α/2) ε^{1-2α} F(1)` leaves a remainder
/// `R(ε) ≈ A + B ε^{2-2α}`; the exponent is fitted from successive
/// increments `|R(ε_k) - R(ε_{k-1})|`, which scale like `ε_k^{2-2α}`. The
/// two coefficients should have opposite signs and the full-annulus
/// difference should converge.
pub fn one_sided_remainder_scan(f: &Field, alpha: f64, ladder: &[f64]) -> Result<RemainderScan> {
    if !(alpha > 1.0 && alpha < 1.5) {
        return Err(Error::InvalidParameter(format!("remainder scan needs 1 < alpha < 3/2, got {alpha}")));
    }
    if ladder.len() < 5 {
        return Err(Error::LadderTooShort(ladder.len()));
    }
    let mut cfg = EpsScanConfig::new(alpha);
    cfg.ladder = ladder.to_vec();
    let c = c_alpha(alpha)?;
    let f1 = f_at_one(f, None)?;
    let comp: Vec<f64> = ladder.iter().map(|e| c * e.powf(1.0 - 2.0 * alpha) * f1).collect();
    let half: Vec<f64> = comp.iter().map(|v| 0.5 * v).collect();
    let predicted = 2.0 - 2.0 * alpha;

    cfg.annulus = Annulus::Inner;
    let inner_i = annulus_integrals(f, &cfg)?;
    cfg.annulus = Annulus::Outer;
    let outer_i = annulus_integrals(f, &cfg)?;
    cfg.annulus = Annulus::Full;
    let full_i = annulus_integrals(f, &cfg)?;

    let (inner, inner_coefficient) = half_report("remainder_inner", &cfg, &inner_i, &half, predicted)?;
    let (outer, outer_coefficient) = half_report("remainder_outer", &cfg, &outer_i, &half, predicted)?;
    let full_difference: Vec<f64> = full_i.iter().zip(&comp).map(|(i, c)| i - c).collect();
    let k = full_difference.len();
    let full_last_change = relative_change(full_difference[k - 2], full_difference[k - 1]);
    let full_increment_ratio = ((full_difference[k - 1] - full_difference[k - 2])
        / (full_difference[k - 2] - full_difference[k - 3]))
        .abs();
    Ok(RemainderScan {
        full_increment_ratio,
        inner,
        outer,
        full_bounded: full_last_change < BOUNDED_CHANGE,
        full_difference,
        full_last_change,
        opposite_signs: inner_coefficient * outer_coefficient < 0.0,
        inner_coefficient,
        outer_coefficient,
        f_at_one: f1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::helmholtz::annihilate;
    use crate::lattice::{GridPreset, Side};
    use crate::C64;
    use std::f64::consts::PI;

    #[test]
    fn c_alpha_routes_agree() {
        for a in [0.6, 0.75, 1.0, 1.25, 1.4] {
            let closed = c_alpha_closed(a).unwrap();
            let quad = c_alpha_quadrature(a).unwrap();
            assert!((closed - quad).abs() < 1e-9 * closed, "α={a}: {closed} vs {quad}");
        }
        assert!((c_alpha(1.0).unwrap() - PI / 2.0).abs() < 1e-12);
        assert!(matches!(c_alpha(0.5), Err(Error::AlphaOutOfRange(_))));
        assert!(matches!(c_alpha(1.5), Err(Error::AlphaOutOfRange(_))));
    }

    #[test]
    fn defining_limit_approaches_c_alpha() {
        // ε^{2α-1} ∫_{1/2}^{3/2} ((1-r²)²+ε²)^{-α} dr → C_α with an O(ε^{2-2α}) error.
        let alpha = 0.75;
        let eps: f64 = 1e-6;
        let (x, w) = graded_rule(1.0, 0.5, 1.5, eps / 8.0, 16);
        let i: f64 = x.iter().zip(&w).map(|(r, w)| w * weight(*r, eps, alpha)).sum();
        let scaled = eps.powf(2.0 * alpha - 1.0) * i;
        assert!((scaled / c_alpha(alpha).unwrap() - 1.0).abs() < 1e-2);
    }

    #[test]
    fn zero_field_is_trivially_bounded() {
        let g = GridPreset::Small.grid();
        let scan = eps_scan(&Field::zeros(g, Side::Space), &EpsScanConfig::new(1.0)).unwrap();
        assert!(scan.report.column(1).iter().all(|&v| v == 0.0));
        assert!(scan.report.verdict);
    }

    #[test]
    fn radial_and_lattice_rules_agree_at_large_eps() {
        // Radial bump vanishing smoothly at both annulus edges.
        let g = GridPreset::Small.grid();
        let f = Field::from_frequency_fn(g, |xi| {
            let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
            C64::new(super::super::bump((r - 1.0) / 0.45), 0.0)
        });
        let mut cfg = EpsScanConfig::new(1.0);
        cfg.ladder = vec![1.0, 0.8, 0.6, 0.5];
        let radial = annulus_integrals(&f, &cfg).unwrap();
        cfg.rule = VolumeRule::Lattice;
        let lattice = annulus_integrals(&f, &cfg).unwrap();
        for (a, b) in radial.iter().zip(&lattice) {
            assert!((a / b - 1.0).abs() < 1e-3, "{a} vs {b}");
        }
    }

    #[test]
    fn annihilated_data_has_no_singular_part() {
        let g = GridPreset::Small.grid();
        let core = Field::from_space_fn(g, |x| C64::new((-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp(), 0.0));
        let scan = eps_scan(&annihilate(&core), &EpsScanConfig::new(1.0)).unwrap();
        assert!(scan.f_at_one < 1e-10);
        // F(r) ~ (r-1)² near the sphere, so I(ε) approaches its limit at
        // rate O(ε): increments halve along the ladder.
        let i = scan.report.column(1);
        assert!(i.windows(2).all(|w| w[1] >= w[0]));
        let d: Vec<f64> = i.windows(2).map(|w| w[1] - w[0]).collect();
        let last = d[d.len() - 1] / d[d.len() - 2];
        assert!((last - 0.5).abs() < 0.05, "{last}");
    }
}

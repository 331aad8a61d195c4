//! Log-log slope fits and tabulated scan reports.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Minimum number of points a slope fit may use.
pub const MIN_FIT_POINTS: usize = 4;

/// Fit residual above which the extreme parameter values are dropped.
pub const EXCLUSION_RESIDUAL: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// `max |y/ŷ - 1|` over the fitted points.
    pub residual: f64,
}

/// Least-squares fit of `log y = intercept + slope·log x`.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<LogLogFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidParameter("slope fit needs matching inputs of length >= 2".into()));
    }
    if xs.iter().chain(ys).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidParameter("log-log fit needs positive finite data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("slope fit needs distinct abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| ((y - intercept - slope * x).exp() - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(LogLogFit {
        slope,
        intercept,
        residual,
    })
}

/// Acceptance band around a predicted slope: 5% of the prediction, but never
/// narrower than 0.025 so that zero predictions remain testable.
pub fn slope_tolerance(predicted: f64) -> f64 {
    (0.05 * predicted.abs()).max(0.025)
}

/// How a report's verdict compares the fitted slope with its prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Criterion {
    /// `|fitted - predicted| ≤ tolerance`.
    Within(f64),
    /// `fitted ≥ bound`.
    AtLeast(f64),
    /// `fitted ≤ bound`.
    AtMost(f64),
}

/// Tabulated scan with a fitted log-log slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub name: String,
    /// Column headers; the first column is the scan parameter.
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Column index whose values are fitted against the parameter.
    pub fit_column: usize,
    pub predicted_slope: f64,
    pub fitted_slope: f64,
    pub fit_residual: f64,
    pub criterion: Criterion,
    /// Parameter values dropped from the fit.
    pub excluded: Vec<f64>,
    pub verdict: bool,
}

/// The JSON summary written next to each report's CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub name: String,
    pub predicted_slope: f64,
    pub fitted_slope: f64,
    pub fit_residual: f64,
    pub criterion: Criterion,
    pub excluded: Vec<f64>,
    pub verdict: String,
}

impl ScanReport {
    /// Fits column `fit_column` against column 0. When the residual exceeds
    /// [`EXCLUSION_RESIDUAL`] and at least [`MIN_FIT_POINTS`] points would
    /// remain, the largest and smallest parameters are dropped and refit;
    /// the exclusion is recorded.
    pub fn build(
        name: &str,
        columns: &[&str],
        rows: Vec<Vec<f64>>,
        fit_column: usize,
        predicted_slope: f64,
        criterion: Criterion,
    ) -> Result<ScanReport> {
        if rows.len() < MIN_FIT_POINTS {
            return Err(Error::InvalidParameter(format!(
                "scan needs at least {MIN_FIT_POINTS} points, got {}",
                rows.len()
            )));
        }
        let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r[fit_column].abs()).collect();
        let mut fit = fit_loglog(&xs, &ys)?;
        let mut excluded = Vec::new();
        if fit.residual > EXCLUSION_RESIDUAL && rows.len() >= MIN_FIT_POINTS + 2 {
            let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let (kx, ky): (Vec<f64>, Vec<f64>) = xs
                .iter()
                .zip(&ys)
                .filter(|(x, _)| **x != lo && **x != hi)
                .map(|(x, y)| (*x, *y))
                .unzip();
            fit = fit_loglog(&kx, &ky)?;
            excluded = vec![hi, lo];
        }
        let verdict = match criterion {
            Criterion::Within(tol) => (fit.slope - predicted_slope).abs() <= tol,
            Criterion::AtLeast(b) => fit.slope >= b,
            Criterion::AtMost(b) => fit.slope <= b,
        };
        Ok(ScanReport {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
            fit_column,
            predicted_slope,
            fitted_slope: fit.slope,
            fit_residual: fit.residual,
            criterion,
            excluded,
            verdict,
        })
    }

    pub fn summary(&self) -> ReportSummary {
        ReportSummary {
            name: self.name.clone(),
            predicted_slope: self.predicted_slope,
            fitted_slope: self.fitted_slope,
            fit_residual: self.fit_residual,
            criterion: self.criterion,
            excluded: self.excluded.clone(),
            verdict: if self.verdict { "pass" } else { "fail" }.to_string(),
        }
    }

    pub fn column(&self, index: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[index]).collect()
    }

    /// Rows as CSV with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let xs = [0.125, 0.0625, 0.03125, 0.015625];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-0.5)).collect();
        let fit = fit_loglog(&xs, &ys).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn tolerance_floor() {
        assert_eq!(slope_tolerance(0.0), 0.025);
        assert!((slope_tolerance(1.5) - 0.075).abs() < 1e-15);
    }

    #[test]
    fn report_excludes_extremes_when_residual_is_large() {
        let xs = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0];
        let rows: Vec<Vec<f64>> = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let bump = if i == 0 || i == 5 { 1.5 } else { 1.0 };
                vec![x, x * bump]
            })
            .collect();
        let r = ScanReport::build("t", &["x", "y"], rows, 1, 1.0, Criterion::Within(0.05)).unwrap();
        assert_eq!(r.excluded, vec![32.0, 1.0]);
        assert!((r.fitted_slope - 1.0).abs() < 1e-12 && r.verdict);
        assert_eq!(r.summary().verdict, "pass");
        assert!(r.to_csv().starts_with("x,y\n1.0000000000000000e0,"));
    }

    #[test]
    fn too_few_points() {
        let rows = vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]];
        assert!(ScanReport::build("t", &["x", "y"], rows, 1, 1.0, Criterion::AtLeast(0.0)).is_err());
    }
}

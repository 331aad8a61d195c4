//! `L^p → L^q` bounds for `S^{-α}` probed with the Knapp family.

use super::fit::{Criterion, ScanReport};
use super::knapp::knapp_ratio_scan;
use crate::lattice::Grid;
use crate::{Error, Result};

/// Lower bound on the ratio slope that counts as bounded.
pub const BOUNDED_SLOPE: f64 = -0.05;

/// `(p, q) = ((2n+2)/(n+1+4β), (2n+2)/(n+1-4(α-β)))`.
pub fn lq_exponents(n: usize, beta: f64, alpha: f64) -> Result<(f64, f64)> {
    let nf = n as f64;
    if !(beta > 0.5 && beta < 1.5) || beta > (nf + 1.0) / 4.0 {
        return Err(Error::InvalidParameter(format!(
            "beta = {beta} must lie in (1/2, 3/2) and not exceed (n+1)/4"
        )));
    }
    if !(alpha >= beta && alpha <= 2.0 * beta && alpha < 2.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must lie in [beta, 2 beta] and below 2")));
    }
    let denom = nf + 1.0 - 4.0 * (alpha - beta);
    if denom <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "alpha - beta = {} leaves no finite target exponent",
            alpha - beta
        )));
    }
    Ok(((2.0 * nf + 2.0) / (nf + 1.0 + 4.0 * beta), (2.0 * nf + 2.0) / denom))
}

/// Slope of `‖S^{-α}f_δ‖_q / ‖f_δ‖_p` over the Knapp family (support inside
/// the ball, so the one-sided symbol at `ε = 0` is exact); passes when the
/// slope is at least [`BOUNDED_SLOPE`].
pub fn lp_lq_scan(beta: f64, alpha: f64, deltas: &[f64], scaled: &Grid) -> Result<ScanReport> {
    let (p, q) = lq_exponents(scaled.dim(), beta, alpha)?;
    let mut report = knapp_ratio_scan(deltas, p, q, alpha, false, scaled, Criterion::AtLeast(BOUNDED_SLOPE))?;
    report.name = "lp_lq_ratio".to_string();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponents() {
        let (p, q) = lq_exponents(2, 0.6, 0.9).unwrap();
        assert!((q - 10.0 / 3.0).abs() < 1e-12);
        assert!((p - 6.0 / 5.4).abs() < 1e-12);
        let (_, q) = lq_exponents(2, 0.7, 0.7).unwrap();
        assert!((q - 2.0).abs() < 1e-12);
        assert!(lq_exponents(2, 0.8, 0.9).is_err());
        assert!(lq_exponents(2, 0.6, 0.5).is_err());
    }

    #[test]
    fn q_increases_with_alpha() {
        for beta in [0.55, 0.6, 0.7, 0.75] {
            let mut last = 0.0;
            let mut alpha = beta;
            while alpha <= 2.0 * beta {
                if let Ok((_, q)) = lq_exponents(2, beta, alpha) {
                    assert!(q > last);
                    last = q;
                }
                alpha += 0.05;
            }
        }
    }
}

//! Smooth radial cutoff `χ` and the split Helmholtz symbol.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutoffProfile {
    /// `1 - (10t³ - 15t⁴ + 6t⁵)` on the transition band, `C²` at the seams.
    QuinticSmoothstep,
}

/// Radial cutoff equal to 1 on `|ξ| ≤ inner` and 0 on `|ξ| ≥ outer`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub inner: f64,
    pub outer: f64,
    pub profile: CutoffProfile,
}

impl Default for CutoffSpec {
    fn default() -> Self {
        CutoffSpec {
            inner: 1.25,
            outer: 1.5,
            profile: CutoffProfile::QuinticSmoothstep,
        }
    }
}

impl CutoffSpec {
    pub fn chi(&self, xi_abs: f64) -> f64 {
        if xi_abs <= self.inner {
            return 1.0;
        }
        if xi_abs >= self.outer {
            return 0.0;
        }
        let t = (xi_abs - self.inner) / (self.outer - self.inner);
        match self.profile {
            CutoffProfile::QuinticSmoothstep => 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t),
        }
    }
}

/// `χ·s/(s² + ε²) + (1 - χ)/s` with `s = |ξ|² - 1`.
///
/// At `ε = 0` the near-sphere term is the principal value `1/s`, taken as 0
/// exactly on the sphere.
pub fn helmholtz_symbol(xi_abs: f64, cutoff: &CutoffSpec, eps: f64) -> f64 {
    let s = xi_abs * xi_abs - 1.0;
    let chi = cutoff.chi(xi_abs);
    let near = if chi == 0.0 {
        0.0
    } else if eps == 0.0 {
        if s == 0.0 {
            0.0
        } else {
            chi / s
        }
    } else {
        chi * s / (s * s + eps * eps)
    };
    let tail = if chi == 1.0 { 0.0 } else { (1.0 - chi) / s };
    near + tail
}

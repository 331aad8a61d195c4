//! Bochner-Riesz symbols of real and complex order, their one- and
//! two-sided ε-regularizations, and the cutoff-split Helmholtz symbol.
//!
//! For an order `a` the symbol families are
//!
//! * `Classical`: `(1 - r²)₊^a`,
//! * `TwoSided`: `((1 - r²)² + ε²)^{a/2}`,
//! * `OneSidedInside` / `OneSidedOutside`: the two-sided symbol restricted
//!   to `r < 1` / `r > 1`.
//!
//! With `a = -α` the squared modulus of the two-sided symbol is the weight
//! `((1 - r²)² + ε²)^{-α}`. Negative orders of the classical family are the
//! pointwise (positivity) definition; setting `gamma_normalized` divides by
//! `Γ(a + 1)`, which vanishes identically at `a = -1, -2, …`.

mod cutoff;
mod kernel;

pub use cutoff::{helmholtz_symbol, CutoffProfile, CutoffSpec};
pub use kernel::{kernel_field, kernel_profile, KERNEL_BIN_WIDTH};

use serde::{Deserialize, Serialize};

use crate::lattice::{Field, Side};
use crate::special::recip_gamma;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sidedness {
    OneSidedInside,
    OneSidedOutside,
    TwoSided,
    Classical,
}

/// A Bochner-Riesz symbol: complex order, sidedness, regularization and
/// optional Γ-normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplierSpec {
    pub order_re: f64,
    #[serde(default)]
    pub order_im: f64,
    pub side: Sidedness,
    #[serde(default)]
    pub eps: f64,
    #[serde(default)]
    pub gamma_normalized: bool,
}

impl MultiplierSpec {
    pub fn new(order: C64, side: Sidedness, eps: f64) -> MultiplierSpec {
        MultiplierSpec {
            order_re: order.re,
            order_im: order.im,
            side,
            eps,
            gamma_normalized: false,
        }
    }

    /// `(1 - r²)₊^a` for real `a`.
    pub fn classical(a: f64) -> MultiplierSpec {
        MultiplierSpec::new(C64::new(a, 0.0), Sidedness::Classical, 0.0)
    }

    pub fn two_sided(a: f64, eps: f64) -> MultiplierSpec {
        MultiplierSpec::new(C64::new(a, 0.0), Sidedness::TwoSided, eps)
    }

    pub fn with_gamma_normalization(mut self) -> MultiplierSpec {
        self.gamma_normalized = true;
        self
    }

    pub fn order(&self) -> C64 {
        C64::new(self.order_re, self.order_im)
    }

    /// Checks the parameter combination once, before per-node evaluation.
    pub fn validate(&self) -> Result<()> {
        if !(self.order_re.is_finite() && self.order_im.is_finite()) {
            return Err(Error::InvalidMultiplier("order must be finite".into()));
        }
        if !(self.eps.is_finite() && self.eps >= 0.0) {
            return Err(Error::InvalidMultiplier(format!("eps = {} must be >= 0", self.eps)));
        }
        match self.side {
            Sidedness::Classical => {
                if self.eps != 0.0 {
                    return Err(Error::InvalidMultiplier(
                        "Classical symbols take no regularization; use OneSidedInside".into(),
                    ));
                }
                if self.order_re <= -1.0 && !self.gamma_normalized {
                    return Err(Error::InvalidMultiplier(format!(
                        "Classical order {} is not locally integrable; need Re(order) > -1 or Γ-normalization",
                        self.order_re
                    )));
                }
            }
            Sidedness::TwoSided => {
                if self.eps == 0.0 && self.order_re < 0.0 {
                    return Err(Error::UnregularizedSingularity { xi_abs: 1.0 });
                }
            }
            Sidedness::OneSidedInside | Sidedness::OneSidedOutside => {}
        }
        Ok(())
    }
}

/// `base^a` for `base ≥ 0` with `0^a = 0` for `Re a > 0` and `0^0 = 1`.
fn power(base: f64, a: C64, xi_abs: f64) -> Result<C64> {
    if base > 0.0 {
        return Ok((a * base.ln()).exp());
    }
    if a.re > 0.0 {
        Ok(C64::new(0.0, 0.0))
    } else if a == C64::new(0.0, 0.0) {
        Ok(C64::new(1.0, 0.0))
    } else {
        Err(Error::UnregularizedSingularity { xi_abs })
    }
}

/// Symbol value at `|ξ| = xi_abs`. Does not re-run [`MultiplierSpec::validate`].
pub fn br_symbol(xi_abs: f64, spec: &MultiplierSpec) -> Result<C64> {
    let a = spec.order();
    let s = 1.0 - xi_abs * xi_abs;
    let raw = match spec.side {
        Sidedness::Classical => {
            if s < 0.0 {
                C64::new(0.0, 0.0)
            } else {
                power(s, a, xi_abs)?
            }
        }
        Sidedness::TwoSided => two_sided(s, spec.eps, a, xi_abs)?,
        Sidedness::OneSidedInside => {
            if s > 0.0 {
                two_sided(s, spec.eps, a, xi_abs)?
            } else {
                C64::new(0.0, 0.0)
            }
        }
        Sidedness::OneSidedOutside => {
            if s < 0.0 {
                two_sided(s, spec.eps, a, xi_abs)?
            } else {
                C64::new(0.0, 0.0)
            }
        }
    };
    if spec.gamma_normalized {
        Ok(raw * recip_gamma(a + 1.0))
    } else {
        Ok(raw)
    }
}

fn two_sided(s: f64, eps: f64, a: C64, xi_abs: f64) -> Result<C64> {
    if eps == 0.0 {
        return power(s.abs(), a, xi_abs);
    }
    let base = s * s + eps * eps;
    Ok((0.5 * a * base.ln()).exp())
}

/// Multiplies `f̂` by the symbol at every frequency node. The output is on
/// the same side as the input.
pub fn apply_multiplier(f: &Field, spec: &MultiplierSpec) -> Result<Field> {
    spec.validate()?;
    let side = f.side();
    let out = f.to_frequency().mul_radial_symbol(|r| br_symbol(r, spec))?;
    Ok(match side {
        Side::Frequency => out,
        Side::Space => out.to_space(),
    })
}

//! Side-by-side weighted (Agmon-type) and unweighted norms of a free
//! solution.

use serde::{Deserialize, Serialize};

use super::perturbed::data_exponent;
use super::{fredholm_defect, solve_free, EpsLadder, DEFECT_THRESHOLD};
use crate::lattice::{lp_norm, weighted_l2_norm, Field};
use crate::multipliers::CutoffSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgmonRecord {
    /// `‖(1+|x|)^β f‖₂`
    pub weighted_in: f64,
    /// `‖(1+|x|)^{β-1} u‖₂`
    pub weighted_out: f64,
    /// `‖f‖_p`, `p = max(1, (2n+2)/(n+5))`
    pub lp_in: f64,
    /// `‖u‖₂`
    pub l2_out: f64,
}

pub fn agmon_compare(f: &Field, beta: f64, ladder: &EpsLadder, cutoff: &CutoffSpec) -> Result<AgmonRecord> {
    if !(beta > 0.5) {
        return Err(Error::InvalidParameter(format!("weight exponent beta = {beta} must exceed 1/2")));
    }
    let f = f.to_space();
    let defect = fredholm_defect(&f, None)?;
    if defect >= DEFECT_THRESHOLD {
        return Err(Error::NotInX0 {
            defect,
            threshold: DEFECT_THRESHOLD,
        });
    }
    let (u, _) = solve_free(&f, ladder, cutoff)?;
    Ok(AgmonRecord {
        weighted_in: weighted_l2_norm(&f, beta)?,
        weighted_out: weighted_l2_norm(&u, beta - 1.0)?,
        lp_in: lp_norm(&f, data_exponent(f.grid()))?,
        l2_out: lp_norm(&u, 2.0)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::helmholtz::annihilate;
    use crate::lattice::{GridPreset, Side};
    use crate::C64;

    #[test]
    fn zero_and_gaussian_records() {
        let g = GridPreset::Small.grid();
        let ladder = EpsLadder::default();
        let cutoff = CutoffSpec::default();
        let zero = agmon_compare(&Field::zeros(g, Side::Space), 1.0, &ladder, &cutoff).unwrap();
        assert_eq!(zero, AgmonRecord { weighted_in: 0.0, weighted_out: 0.0, lp_in: 0.0, l2_out: 0.0 });
        let core = Field::from_space_fn(g, |x| C64::new((-0.5 * (x[0] * x[0] + x[1] * x[1])).exp(), 0.0));
        let rec = agmon_compare(&annihilate(&core), 1.0, &ladder, &cutoff).unwrap();
        for v in [rec.weighted_in, rec.weighted_out, rec.lp_in, rec.l2_out] {
            assert!(v.is_finite() && v > 0.0);
        }
        assert!(matches!(
            agmon_compare(&annihilate(&core), 0.4, &ladder, &cutoff),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            agmon_compare(&Field::delta(g), 1.0, &ladder, &cutoff),
            Err(Error::NotInX0 { .. })
        ));
    }
}

//! Reduced-size invariant suite. Every check records its measured value and
//! threshold; the run fails if any check does.

use std::f64::consts::PI;

use helmholtz_lp::experiments::{c_alpha_closed, c_alpha_quadrature, knapp_scan, DELTAS_2D};
use helmholtz_lp::helmholtz::{
    annihilate, fredholm_defect, solve_free, solve_perturbed, EpsLadder, Potential, DEFECT_THRESHOLD,
};
use helmholtz_lp::lattice::lp_norm;
use helmholtz_lp::multipliers::{apply_multiplier, CutoffSpec, MultiplierSpec, Sidedness};
use helmholtz_lp::{Field, Grid, GridPreset, Side, C64};
use serde::Serialize;

use crate::artifacts::Artifacts;
use crate::config::gaussian;
use crate::error::CliError;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Pass when `value <= threshold` (or `>=` for lower bounds).
    pub threshold: f64,
    pub lower_bound: bool,
    pub pass: bool,
}

#[derive(Debug, Default, Serialize)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl SelftestReport {
    fn at_most(&mut self, name: &str, value: f64, threshold: f64) {
        self.push(name, value, threshold, false);
    }

    fn at_least(&mut self, name: &str, value: f64, threshold: f64) {
        self.push(name, value, threshold, true);
    }

    fn push(&mut self, name: &str, value: f64, threshold: f64, lower_bound: bool) {
        let pass = if lower_bound { value >= threshold } else { value <= threshold };
        self.checks.push(Check {
            name: name.to_string(),
            value,
            threshold,
            lower_bound,
            pass,
        });
    }
}

fn rel_l2(a: &Field, b: &Field) -> helmholtz_lp::Result<f64> {
    Ok(lp_norm(&a.sub(b)?, 2.0)? / lp_norm(b, 2.0)?)
}

fn run_checks(seed: u64, report: &mut SelftestReport) -> helmholtz_lp::Result<()> {
    let tiny = Grid::new(2, 64, 8.0 * PI)?;
    let f = Field::random(tiny, Side::Space, seed);
    let fhat = f.dft()?;
    let plancherel = lp_norm(&fhat, 2.0)? / (2.0 * PI * lp_norm(&f, 2.0)?);
    report.at_most("plancherel", (plancherel - 1.0).abs(), 1e-12);
    let back = fhat.idft()?;
    let trip = back.values().iter().zip(f.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    report.at_most("round_trip", trip, 1e-12);

    let mut worst: f64 = 0.0;
    for alpha in [0.6, 1.0, 1.4] {
        let closed = c_alpha_closed(alpha)?;
        worst = worst.max((c_alpha_quadrature(alpha)? - closed).abs() / closed);
    }
    report.at_most("c_alpha_routes", worst, 1e-6);

    let two = apply_multiplier(&apply_multiplier(&f, &MultiplierSpec::classical(0.5))?, &MultiplierSpec::classical(0.7))?;
    let one = apply_multiplier(&f, &MultiplierSpec::classical(1.2))?;
    report.at_most("classical_semigroup", rel_l2(&two, &one)?, 1e-12);
    let iso = apply_multiplier(&f, &MultiplierSpec::new(C64::new(0.0, 1.5), Sidedness::TwoSided, 0.1))?;
    report.at_most("imaginary_isometry", (lp_norm(&iso, 2.0)? / lp_norm(&f, 2.0)? - 1.0).abs(), 1e-12);

    let small = GridPreset::Small.grid();
    let core = gaussian(small);
    let data = annihilate(&core);
    report.at_least("defect_of_plain_data", fredholm_defect(&core, None)?, 1e-3);
    report.at_most("defect_of_annihilated_data", fredholm_defect(&data, None)?, DEFECT_THRESHOLD);

    let ladder = EpsLadder::default();
    let cutoff = CutoffSpec::default();
    let (u, diag) = solve_free(&data, &ladder, &cutoff)?;
    report.at_most("free_solve_residual", diag.residual, 1e-8);
    let zero = Potential::zero(small);
    let sol = solve_perturbed(&data, &zero, 1e-10, 10, &ladder, &cutoff)?;
    let identical = sol.iterations == 1 && sol.u.to_space().values() == u.to_space().values();
    report.at_least("zero_potential_matches_free_solve", f64::from(u8::from(identical)), 1.0);

    let (lp, s) = knapp_scan(&DELTAS_2D, 1.2, 0.6, &small)?;
    report.at_most("knapp_lp_slope", (lp.fitted_slope - lp.predicted_slope).abs(), 0.05 * lp.predicted_slope.abs());
    report.at_most(
        "knapp_multiplier_slope",
        (s.fitted_slope - s.predicted_slope).abs(),
        (0.05 * s.predicted_slope.abs()).max(0.025),
    );
    Ok(())
}

pub fn run(seed: u64, out: &mut Artifacts) -> Result<serde_json::Value, CliError> {
    let mut report = SelftestReport::default();
    run_checks(seed, &mut report)?;
    report.passed = report.checks.iter().all(|c| c.pass);
    out.write_json("selftest.json", &report)?;
    if !report.passed {
        let failed = report.checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect();
        return Err(CliError::Selftest(failed));
    }
    Ok(serde_json::to_value(&report).expect("report serializes"))
}

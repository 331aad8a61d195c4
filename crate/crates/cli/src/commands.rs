//! One function per subcommand. Each writes its artifacts and returns the
//! `results` object of `summary.json`.

use helmholtz_lp::experiments::{
    c_alpha_closed, eps_scan, knapp_ratio_scan, knapp_scan, lp_lq_scan, lq_exponents, one_sided_remainder_scan,
    Criterion, ScanReport, BOUNDED_SLOPE,
};
use helmholtz_lp::helmholtz::{fredholm_defect, solve_free, solve_perturbed, FreeResolvent, Potential};
use helmholtz_lp::lattice::lp_norm;
use helmholtz_lp::multipliers::{kernel_profile, MultiplierSpec, Sidedness};
use helmholtz_lp::sphere::{f_profile_with, profile_csv, PaddedEvaluator};
use helmholtz_lp::{Error, Field, Grid, C64};
use serde_json::{json, Value};

use crate::artifacts::Artifacts;
use crate::config::{
    load_data, DefectParams, EpsScanParams, KernelParams, KnappScanParams, LqParams, PerturbedParams,
    RemainderParams, SolveParams,
};
use crate::error::CliError;

/// Input field for a command: the file already read during resolution, or
/// synthesized data.
pub struct Input {
    pub grid: Grid,
    pub field: Option<Field>,
    pub seed: u64,
}

impl Input {
    fn take(&mut self, data: crate::config::DataKind) -> Result<Field, CliError> {
        match self.field.take() {
            Some(f) => Ok(f),
            None => load_data(data, None, self.grid, self.seed),
        }
    }
}

pub fn solve(p: &SolveParams, mut input: Input, out: &mut Artifacts) -> Result<Value, CliError> {
    let f = input.take(p.data)?;
    out.write_field("f.fld", &f)?;
    match solve_free(&f, &p.ladder, &p.cutoff) {
        Ok((u, diagnostics)) => {
            out.write_field("u.fld", &u.to_space())?;
            out.write_json("diagnostics.json", &diagnostics)?;
            Ok(serde_json::to_value(&diagnostics).expect("diagnostics serialize"))
        }
        Err(Error::NoConvergence {
            growth_exponent,
            diagnostics,
        }) => {
            // The record is the useful output of a failed solve.
            out.write_json("diagnostics.json", &diagnostics)?;
            Err(Error::NoConvergence {
                growth_exponent,
                diagnostics,
            }
            .into())
        }
        Err(e) => Err(e.into()),
    }
}

pub fn perturbed_solve(p: &PerturbedParams, mut input: Input, out: &mut Artifacts) -> Result<Value, CliError> {
    let from_file = input.field.is_some();
    let data = input.take(p.data)?;
    let grid = *data.grid();
    if !(p.potential_scale > 0.0) {
        return Err(CliError::Config("potential_scale must be positive".into()));
    }
    let s2 = p.potential_scale * p.potential_scale;
    let shape = Potential::from_fn(grid, |x| (-x.iter().map(|v| v * v).sum::<f64>() / s2).exp())?;
    let potential = shape.scaled_to(p.potential_strength)?;
    let f = if p.data_is_preimage && !from_file {
        let r0 = FreeResolvent::new(grid, &p.ladder, &p.cutoff);
        data.add(&potential.multiply(&r0.apply(&data)?)?)?.to_space()
    } else {
        data
    };
    out.write_field("f.fld", &f)?;
    let sol = solve_perturbed(&f, &potential, p.tol, p.max_iter, &p.ladder, &p.cutoff)?;
    out.write_field("u.fld", &sol.u.to_space())?;
    out.write_field("preimage.fld", &sol.preimage.to_space())?;
    let results = json!({
        "iterations": sol.iterations,
        "residual": sol.residual,
        "preimage_defect": sol.preimage_defect,
        "potential_exponent": Potential::exponent(&grid),
        "potential_norm": potential.lr_norm(),
        "u_l2_norm": lp_norm(&sol.u, 2.0)?,
    });
    out.write_json("perturbed.json", &results)?;
    Ok(results)
}

fn verdicts(reports: &[&ScanReport]) -> Value {
    reports
        .iter()
        .map(|r| (r.name.clone(), json!(r.summary())))
        .collect::<serde_json::Map<_, _>>()
        .into()
}

pub fn knapp(p: &KnappScanParams, grid: Grid, out: &mut Artifacts) -> Result<Value, CliError> {
    let (lp, s) = knapp_scan(&p.deltas, p.p, p.alpha, &grid)?;
    let criterion = if p.annihilated {
        Criterion::AtLeast(BOUNDED_SLOPE)
    } else {
        Criterion::AtMost(BOUNDED_SLOPE)
    };
    let mut ratio = knapp_ratio_scan(&p.deltas, p.p, p.q, p.alpha, p.annihilated, &grid, criterion)?;
    ratio.name = "knapp_ratio".to_string();
    for r in [&lp, &s, &ratio] {
        out.write_report(r)?;
    }
    Ok(verdicts(&[&lp, &s, &ratio]))
}

pub fn eps(p: &EpsScanParams, mut input: Input, out: &mut Artifacts) -> Result<Value, CliError> {
    let f = input.take(p.data)?;
    let scan = eps_scan(&f, &p.scan_config())?;
    out.write_report(&scan.report)?;
    let closed = c_alpha_closed(p.alpha)?;
    // I(ε) against C_α ε^{1-2α} F(1) at the finest rung.
    let compensator_ratio = scan.report.column(4).last().copied().unwrap_or(f64::NAN);
    let results = json!({
        "f_at_one": scan.f_at_one,
        "c_alpha": scan.c_alpha,
        "c_alpha_closed": closed,
        "compensator_ratio": compensator_ratio,
        "last_change": scan.last_change,
        "slope": scan.report.summary(),
    });
    out.write_json("eps_scan_summary.json", &results)?;
    Ok(results)
}

pub fn remainder(p: &RemainderParams, mut input: Input, out: &mut Artifacts) -> Result<Value, CliError> {
    let f = input.take(p.data)?;
    let scan = one_sided_remainder_scan(&f, p.alpha, &p.ladder)?;
    out.write_report(&scan.inner)?;
    out.write_report(&scan.outer)?;
    let results = json!({
        "f_at_one": scan.f_at_one,
        "inner_coefficient": scan.inner_coefficient,
        "outer_coefficient": scan.outer_coefficient,
        "opposite_signs": scan.opposite_signs,
        "full_difference": scan.full_difference,
        "full_last_change": scan.full_last_change,
        "full_increment_ratio": scan.full_increment_ratio,
        "full_bounded": scan.full_bounded,
        "inner": scan.inner.summary(),
        "outer": scan.outer.summary(),
    });
    out.write_json("remainder.json", &results)?;
    Ok(results)
}

pub fn lq(p: &LqParams, grid: Grid, out: &mut Artifacts) -> Result<Value, CliError> {
    let (lp, lq) = lq_exponents(grid.dim(), p.beta, p.alpha)?;
    let report = lp_lq_scan(p.beta, p.alpha, &p.deltas, &grid)?;
    out.write_report(&report)?;
    Ok(json!({ "p": lp, "q": lq, "ratio": report.summary() }))
}

pub fn kernel(p: &KernelParams, grid: Grid, out: &mut Artifacts) -> Result<Value, CliError> {
    let mut spec = MultiplierSpec::new(C64::new(p.order_re, p.order_im), p.side, p.eps);
    if p.gamma_normalized {
        spec = spec.with_gamma_normalization();
    }
    let profile = kernel_profile(&spec, &p.radii, &grid)?;
    let mut csv = String::from("r,amplitude\n");
    for (r, a) in &profile {
        csv.push_str(&format!("{r:.16e},{a:.16e}\n"));
    }
    out.write_bytes("kernel_profile.csv", csv.as_bytes())?;
    let mut results = json!({ "points": profile.len() });
    // The envelope exponent is only predicted for the classical family.
    if p.side == Sidedness::Classical && profile.len() >= 4 {
        let predicted = -(grid.dim() as f64 + 1.0) / 2.0 - p.order_re;
        let rows = profile.iter().map(|&(r, a)| vec![r, a]).collect();
        let report = ScanReport::build(
            "kernel_decay",
            &["r", "amplitude"],
            rows,
            1,
            predicted,
            Criterion::Within(0.1 * predicted.abs()),
        )?;
        out.write_report(&report)?;
        results["decay"] = json!(report.summary());
    }
    Ok(results)
}

pub fn defect(p: &DefectParams, mut input: Input, out: &mut Artifacts) -> Result<Value, CliError> {
    if !(p.threshold > 0.0) {
        return Err(CliError::Config("threshold must be positive".into()));
    }
    let f = input.take(p.data)?;
    let value = fredholm_defect(&f, p.resolution)?;
    let r_max = p.radii.iter().copied().fold(0.0, f64::max);
    let eval = PaddedEvaluator::new(&f, r_max)?;
    let profile = f_profile_with(&eval, &p.radii, p.resolution)?;
    out.write_bytes("profile.csv", profile_csv(&profile).as_bytes())?;
    let results = json!({
        "fredholm_defect": value,
        "threshold": p.threshold,
        "in_X0": value < p.threshold,
    });
    out.write_json("defect.json", &results)?;
    Ok(results)
}

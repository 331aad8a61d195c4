use std::f64::consts::PI;

use helmholtz_lp::experiments::{
    eps_scan, knapp_norms, knapp_scan, lp_lq_scan, EpsScanConfig, KnappParams, DELTAS_2D, DELTAS_3D,
};
use helmholtz_lp::lattice::lp_norm;
use helmholtz_lp::{Field, Grid, GridPreset};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn gaussian(g: Grid) -> Field {
    Field::from_space_fn(g, |x| C64::new((-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp(), 0.0))
}

#[test]
fn scans_are_bitwise_reproducible() {
    let g = GridPreset::Small.grid();
    let a = knapp_scan(&DELTAS_2D, 10.0 / 9.0, 0.6, &g).unwrap();
    let b = knapp_scan(&DELTAS_2D, 10.0 / 9.0, 0.6, &g).unwrap();
    assert_eq!(a, b);
    let cfg = EpsScanConfig::new(1.0);
    let f = gaussian(g);
    assert_eq!(eps_scan(&f, &cfg).unwrap(), eps_scan(&f, &cfg).unwrap());
}

#[test]
fn compensated_difference_does_not_grow_under_refinement() {
    // sup over the ladder of |I - C_α ε^{1-2α} F(1)| / ‖f‖_p², p = 1.
    let cfg = EpsScanConfig::new(1.0);
    let sup = |g: Grid| {
        let f = gaussian(g);
        let scan = eps_scan(&f, &cfg).unwrap();
        let norm = lp_norm(&f, 1.0).unwrap();
        scan.report.column(3).iter().map(|d| d.abs()).fold(0.0, f64::max) / (norm * norm)
    };
    let coarse = sup(GridPreset::Small.grid());
    let fine = sup(Grid::new(2, 512, 64.0 * PI).unwrap());
    assert!(fine <= coarse * (1.0 + 1e-6), "{coarse} -> {fine}");
}

#[test]
fn knapp_slopes_in_three_dimensions() {
    let g = GridPreset::Paper3d.grid();
    let (lp, s) = knapp_scan(&DELTAS_3D, 1.2, 0.75, &g).unwrap();
    assert!(lp.verdict, "{:?}", lp.summary());
    assert!(s.verdict, "{:?}", s.summary());
}

#[test]
fn lq_scan_at_the_sharp_pair() {
    let g = GridPreset::Paper2d.grid();
    let r = lp_lq_scan(0.6, 0.9, &DELTAS_2D, &g).unwrap();
    assert!(r.verdict, "{:?}", r.summary());
    // α = β is the L² target.
    let r = lp_lq_scan(0.7, 0.7, &DELTAS_2D, &g).unwrap();
    assert!(r.verdict, "{:?}", r.summary());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// `‖f_δ‖_p / δ^{(n+1)(1-1/p)}` does not depend on `δ`.
    #[test]
    fn knapp_norm_scaling_is_exact(delta in 0.01f64..0.25, p in 1.0f64..3.0) {
        let g = GridPreset::Small.grid();
        let reference = knapp_norms(&KnappParams::new(2, 0.25), &g, p, None).unwrap().data_norm;
        let got = knapp_norms(&KnappParams::new(2, delta), &g, p, None).unwrap().data_norm;
        let e = 3.0 * (1.0 - 1.0 / p);
        let scaled = got / delta.powf(e);
        let ref_scaled = reference / 0.25f64.powf(e);
        prop_assert!((scaled / ref_scaled - 1.0).abs() < 1e-12);
    }
}

use std::f64::consts::PI;

use helmholtz_lp::lattice::lp_norm;
use helmholtz_lp::{Field, Grid, Side};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn small_grid(dim: usize) -> Grid {
    if dim == 2 {
        Grid::new(2, 16, 4.0 * PI).unwrap()
    } else {
        Grid::new(3, 16, 4.0 * PI).unwrap()
    }
}

fn field_from(grid: Grid, re: &[f64], im: &[f64]) -> Field {
    let values = re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect();
    Field::from_values(grid, Side::Space, values).unwrap()
}

fn values(len: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec(-10.0f64..10.0, len),
        prop::collection::vec(-10.0f64..10.0, len),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn round_trip_and_plancherel((re, im) in values(256)) {
        let g = small_grid(2);
        let f = field_from(g, &re, &im);
        let fhat = f.dft().unwrap();
        let back = fhat.idft().unwrap();
        let scale = f.values().iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
        for (a, b) in back.values().iter().zip(f.values()) {
            prop_assert!((a - b).norm() <= 1e-12 * scale);
        }
        let l2 = lp_norm(&f, 2.0).unwrap();
        if l2 > 0.0 {
            let ratio = lp_norm(&fhat, 2.0).unwrap() / (2.0 * PI * l2);
            prop_assert!((ratio - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn plancherel_in_three_dimensions((re, im) in values(4096)) {
        let g = small_grid(3);
        let f = field_from(g, &re, &im);
        let l2 = lp_norm(&f, 2.0).unwrap();
        prop_assume!(l2 > 0.0);
        let ratio = lp_norm(&f.dft().unwrap(), 2.0).unwrap() / ((2.0 * PI).powf(1.5) * l2);
        prop_assert!((ratio - 1.0).abs() <= 1e-12);
    }

    /// Shifting by a lattice vector `m h` multiplies `f̂` by `e^{-iξ·mh}`.
    #[test]
    fn translation_covariance((re, im) in values(256), m0 in 0usize..16, m1 in 0usize..16) {
        let g = small_grid(2);
        let f = field_from(g, &re, &im);
        let n = g.points();
        let shifted_values: Vec<C64> = (0..g.len())
            .map(|flat| {
                let idx = g.unflatten(flat);
                let src = [(idx[0] + n - m0) % n, (idx[1] + n - m1) % n];
                f.values()[g.flatten(&src)]
            })
            .collect();
        let shifted = Field::from_values(g, Side::Space, shifted_values).unwrap();
        let a = shifted.dft().unwrap();
        let b = f.dft().unwrap();
        let h = g.spacing();
        let scale = b.values().iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
        for k in 0..g.len() {
            let xi = g.wavevector(k);
            let phase = C64::from_polar(1.0, -(xi[0] * m0 as f64 + xi[1] * m1 as f64) * h);
            prop_assert!((a.values()[k] - phase * b.values()[k]).norm() <= 1e-11 * scale);
        }
    }

    /// `log ‖f‖_p` is convex in `1/p` (Hölder interpolation).
    #[test]
    fn holder_interpolation((re, im) in values(256), p in 1.0f64..4.0, r in 4.0f64..12.0, theta in 0.0f64..1.0) {
        let g = small_grid(2);
        let f = field_from(g, &re, &im);
        let q = 1.0 / (theta / p + (1.0 - theta) / r);
        let np = lp_norm(&f, p).unwrap();
        let nr = lp_norm(&f, r).unwrap();
        let nq = lp_norm(&f, q).unwrap();
        prop_assert!(nq <= np.powf(theta) * nr.powf(1.0 - theta) * (1.0 + 1e-12));
    }

    /// With unit cell measure, `‖f‖_p` is nonincreasing in `p`.
    #[test]
    fn unit_measure_monotonicity((re, im) in values(256), p in 1.0f64..6.0, dp in 0.0f64..6.0) {
        // h = 1: N = 16, L = 16.
        let g = Grid::new(2, 16, 16.0).unwrap();
        let f = field_from(g, &re, &im);
        let a = lp_norm(&f, p).unwrap();
        let b = lp_norm(&f, p + dp).unwrap();
        prop_assert!(b <= a * (1.0 + 1e-12));
        prop_assert!(lp_norm(&f, f64::INFINITY).unwrap() <= b * (1.0 + 1e-12));
    }
}

#[test]
fn side_round_trip_is_idempotent() {
    let g = small_grid(2);
    let f = Field::random(g, Side::Space, 7);
    let twice = f.to_frequency().to_frequency();
    assert_eq!(twice.side(), Side::Frequency);
    assert_eq!(twice.values(), f.to_frequency().values());
    assert!(f.idft().is_err());
}

//! One-dimensional quadrature: Gauss-Legendre rules, adaptive
//! Gauss-Kronrod, and panels graded toward an interior point.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the three-term recurrence.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m > 0, "rule needs at least one node");
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Legendre rule mapped to `[a, b]`, appended to `nodes`/`weights`.
pub fn push_mapped(
    a: f64,
    b: f64,
    rule: &(Vec<f64>, Vec<f64>),
    nodes: &mut Vec<f64>,
    weights: &mut Vec<f64>,
) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    for (x, w) in rule.0.iter().zip(&rule.1) {
        nodes.push(mid + half * x);
        weights.push(half * w);
    }
}

/// Composite Gauss-Legendre rule on `[lo, hi]` whose panels double in width
/// away from `center`, starting at `finest`.
pub fn graded_rule(center: f64, lo: f64, hi: f64, finest: f64, per_panel: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = gauss_legendre(per_panel);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut breaks_left = vec![center];
    let mut d = finest;
    while center - d > lo {
        breaks_left.push(center - d);
        d *= 2.0;
    }
    if lo < center {
        breaks_left.push(lo);
    }
    for w in breaks_left.windows(2).rev() {
        push_mapped(w[1], w[0], &rule, &mut nodes, &mut weights);
    }
    let mut prev = center;
    let mut d = finest;
    while center + d < hi {
        push_mapped(prev, center + d, &rule, &mut nodes, &mut weights);
        prev = center + d;
        d *= 2.0;
    }
    if prev < hi {
        push_mapped(prev, hi, &rule, &mut nodes, &mut weights);
    }
    (nodes, weights)
}

const KRONROD_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_W: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GAUSS7_W: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = KRONROD_W[7] * fc;
    let mut gauss = GAUSS7_W[3] * fc;
    for i in 0..7 {
        let dx = h * KRONROD_X[i];
        let s = f(c - dx) + f(c + dx);
        kron += KRONROD_W[i] * s;
        if i % 2 == 1 {
            gauss += GAUSS7_W[i / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod (7/15) integration of `f` over `[a, b]` to the
/// given absolute or relative tolerance.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    let mut panels = vec![(a, b, gk15(&f, a, b))];
    for _ in 0..2000 {
        let total: f64 = panels.iter().map(|p| p.2 .0).sum();
        let err: f64 = panels.iter().map(|p| p.2 .1).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        panels.push((lo, mid, gk15(&f, lo, mid)));
        panels.push((mid, hi, gk15(&f, mid, hi)));
    }
    panels.iter().map(|p| p.2 .0).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_to_degree_2m_minus_1() {
        for m in [1, 2, 5, 12, 33] {
            let (x, w) = gauss_legendre(m);
            for deg in 0..2 * m {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - exact).abs() < 1e-13, "m={m} deg={deg}");
            }
        }
    }

    #[test]
    fn graded_rule_covers_interval() {
        let (_, w) = graded_rule(1.0, 0.5, 1.0, 1e-3, 4);
        assert!((w.iter().sum::<f64>() - 0.5).abs() < 1e-14);
        let (x, _) = graded_rule(1.0, 1.0, 1.5, 1e-3, 4);
        assert!(x.iter().all(|&r| r > 1.0));
        let (x, w) = graded_rule(1.0, 0.5, 1.5, 1e-4, 8);
        let len: f64 = w.iter().sum();
        assert!((len - 1.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        // Integrable kink singularity at the center.
        let got: f64 = x.iter().zip(&w).map(|(x, w)| w * (x - 1.0).abs().sqrt()).sum();
        let exact = 2.0 * (2.0 / 3.0) * 0.5f64.powf(1.5);
        assert!((got - exact).abs() < 1e-6);
    }

    #[test]
    fn adaptive_handles_peaks() {
        let got = integrate_adaptive(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-12, 1e-12);
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((got - exact).abs() < 1e-9 * exact);
    }
}

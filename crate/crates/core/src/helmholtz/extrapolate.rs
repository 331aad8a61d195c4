//! Bulirsch-Stoer rational extrapolation to `t = 0`.
//!
//! Given samples `y_i = y(t_i)` with `t_0 > t_1 > … > 0`, builds the tableau
//!
//! ```text
//! T[i][k] = T[i][k-1] + d / ((t[i-k]/t[i]) (1 - d/(T[i][k-1] - T[i-1][k-2])) - 1),
//! d = T[i][k-1] - T[i-1][k-1],  T[i][-1] = 0.
//! ```
//!
//! The scheme is homogeneous of degree one in `y` and reproduces rational
//! functions of matching degree exactly. Polynomial Richardson does not
//! converge for symbols like `s/(s² + t)` once `t` is comparable to `s²`.

/// Diagonal `T[k][k]`, `k = 0..m`, of the rational tableau. Degenerate
/// updates (zero differences, vanishing or non-finite denominators) leave
/// the entry unchanged.
pub fn rational_diagonal(ts: &[f64], ys: &[f64]) -> Vec<f64> {
    let m = ts.len();
    debug_assert_eq!(m, ys.len());
    // prev2 = column k-2, prev = column k-1, both indexed by row i.
    let mut prev2 = vec![0.0; m];
    let mut prev: Vec<f64> = ys.to_vec();
    let mut diag = Vec::with_capacity(m);
    diag.push(prev[0]);
    for k in 1..m {
        let mut cur = vec![0.0; m];
        for i in k..m {
            let a = prev[i];
            let d = a - prev[i - 1];
            cur[i] = if d == 0.0 {
                a
            } else {
                let back = if k >= 2 { prev2[i - 1] } else { 0.0 };
                let b = (ts[i - k] / ts[i]) * (1.0 - d / (a - back)) - 1.0;
                let step = d / b;
                if step.is_finite() {
                    a + step
                } else {
                    a
                }
            };
        }
        diag.push(cur[k]);
        prev2 = prev;
        prev = cur;
    }
    diag
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ladder(e0: f64, m: usize) -> Vec<f64> {
        (0..m).map(|k| (e0 * 0.5f64.powi(k as i32)).powi(2)).collect()
    }

    #[test]
    fn reproduces_regularized_reciprocal() {
        let ts = ladder(0.25, 6);
        for s in [-1.0, -0.3, 1e-3, 0.02, 0.9] {
            let ys: Vec<f64> = ts.iter().map(|t| s / (s * s + t)).collect();
            let last = *rational_diagonal(&ts, &ys).last().unwrap();
            assert!((last - 1.0 / s).abs() <= 1e-12 * (1.0 / s).abs(), "s = {s}: {last}");
        }
    }

    #[test]
    fn constant_data_is_fixed() {
        let ts = ladder(0.25, 6);
        let diag = rational_diagonal(&ts, &[2.5; 6]);
        assert!(diag.iter().all(|&v| v == 2.5));
        let zero = rational_diagonal(&ts, &[0.0; 6]);
        assert!(zero.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn smooth_functions_converge() {
        let ts = ladder(0.25, 6);
        let ys: Vec<f64> = ts.iter().map(|t| (1.0 + t).exp()).collect();
        let last = *rational_diagonal(&ts, &ys).last().unwrap();
        assert!((last - 1f64.exp()).abs() < 1e-12);
    }
}

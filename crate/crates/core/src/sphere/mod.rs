//! Surface quadrature on spheres `rS^{n-1}`, off-lattice evaluation of `f̂`,
//! the trace map and the restriction profile `F(r) = ‖f̂‖²_{L²(rS^{n-1})}`.

mod eval;

pub use eval::{DirectEvaluator, Evaluator, PaddedEvaluator, PAD_FACTOR};

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::lattice::{Field, Grid};
use crate::quadrature::gauss_legendre;
use crate::{Error, Result, C64};

/// Nodes and positive weights approximating surface measure on `rS^{n-1}`.
///
/// For `n = 2` the rule uses `M` equispaced angles and integrates
/// trigonometric polynomials of degree `< M` exactly. For `n = 3` it is the
/// product of `M`-point Gauss-Legendre in `cos θ` with `2M` equispaced
/// azimuths, exact for polynomials of degree `≤ 2M - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereQuadrature {
    dim: usize,
    radius: f64,
    resolution: usize,
    nodes: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl SphereQuadrature {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn nodes(&self) -> &[[f64; 3]] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_i g(node_i)`.
    pub fn integrate<F: Fn(&[f64; 3]) -> C64>(&self, g: F) -> C64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, &w)| g(x) * w)
            .sum()
    }
}

/// Samples of `f̂` at the nodes of a sphere quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSamples {
    pub quadrature: SphereQuadrature,
    pub values: Vec<C64>,
}

impl TraceSamples {
    /// `Σ w_i |v_i|²`.
    pub fn norm_sq(&self) -> f64 {
        self.values
            .iter()
            .zip(self.quadrature.weights())
            .map(|(v, w)| w * v.norm_sqr())
            .sum()
    }
}

pub fn sphere_quadrature(dim: usize, radius: f64, resolution: usize) -> Result<SphereQuadrature> {
    if dim != 2 && dim != 3 {
        return Err(Error::BadDimension(dim));
    }
    if resolution < 8 {
        return Err(Error::BadResolution(resolution));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidParameter(format!("sphere radius {radius} must be positive")));
    }
    let (nodes, weights) = if dim == 2 {
        let w = 2.0 * PI * radius / resolution as f64;
        let nodes = (0..resolution)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / resolution as f64;
                [radius * t.cos(), radius * t.sin(), 0.0]
            })
            .collect();
        (nodes, vec![w; resolution])
    } else {
        let (cs, ws) = gauss_legendre(resolution);
        let azimuths = 2 * resolution;
        let dphi = 2.0 * PI / azimuths as f64;
        let mut nodes = Vec::with_capacity(resolution * azimuths);
        let mut weights = Vec::with_capacity(resolution * azimuths);
        for (c, w) in cs.iter().zip(&ws) {
            let s = (1.0 - c * c).sqrt();
            for k in 0..azimuths {
                let phi = k as f64 * dphi;
                nodes.push([radius * s * phi.cos(), radius * s * phi.sin(), radius * c]);
                weights.push(w * dphi * radius * radius);
            }
        }
        (nodes, weights)
    };
    Ok(SphereQuadrature {
        dim,
        radius,
        resolution,
        nodes,
        weights,
    })
}

/// Resolution at which the sphere rule integrates `|f̂|²` exactly for any
/// field supported in the box: the trace of such a field on `rS^{n-1}` has
/// angular bandwidth at most `r·L·√n/2`.
pub fn default_resolution(grid: &Grid, radius: f64) -> usize {
    let band = radius * grid.length() * (grid.dim() as f64).sqrt() / 2.0;
    let m = if grid.dim() == 2 { 2.0 * band + 1.0 } else { band + 1.0 };
    (m.ceil() as usize).max(8)
}

fn check_inside(grid: &Grid, radius: f64) -> Result<()> {
    let nyquist = grid.nyquist();
    if radius >= nyquist {
        return Err(Error::SphereOutsideBox { radius, nyquist });
    }
    Ok(())
}

/// Samples `f̂` on the sphere by direct nonuniform summation, which is the
/// exact trigonometric interpolant of the lattice data.
pub fn trace(fhat: &Field, q: &SphereQuadrature) -> Result<TraceSamples> {
    trace_with(&DirectEvaluator::new(fhat)?, q)
}

/// Samples `f̂` on the sphere with a prepared evaluator.
pub fn trace_with<E: Evaluator>(eval: &E, q: &SphereQuadrature) -> Result<TraceSamples> {
    let grid = eval.grid();
    if q.dim() != grid.dim() {
        return Err(Error::BadDimension(q.dim()));
    }
    check_inside(grid, q.radius())?;
    eval.check_radius(q.radius())?;
    let values = q.nodes().par_iter().map(|x| eval.eval(x)).collect();
    Ok(TraceSamples {
        quadrature: q.clone(),
        values,
    })
}

/// `F(r)` approximated by the sphere rule of resolution `M`.
pub fn restriction_norm_sq(fhat: &Field, radius: f64, resolution: usize) -> Result<f64> {
    let q = sphere_quadrature(fhat.grid().dim(), radius, resolution)?;
    Ok(trace(fhat, &q)?.norm_sq())
}

/// `F(r)` at each radius using a prepared evaluator. `resolution = None`
/// picks [`default_resolution`] per radius.
pub fn f_profile_with<E: Evaluator>(
    eval: &E,
    radii: &[f64],
    resolution: Option<usize>,
) -> Result<Vec<(f64, f64)>> {
    let grid = *eval.grid();
    radii
        .iter()
        .map(|&r| {
            let m = resolution.unwrap_or_else(|| default_resolution(&grid, r));
            let q = sphere_quadrature(grid.dim(), r, m)?;
            Ok((r, trace_with(eval, &q)?.norm_sq()))
        })
        .collect()
}

/// `F(r)` at each radius by direct summation.
pub fn f_profile(fhat: &Field, radii: &[f64], resolution: Option<usize>) -> Result<Vec<(f64, f64)>> {
    f_profile_with(&DirectEvaluator::new(fhat)?, radii, resolution)
}

/// Trapezoid approximation of `∫ F(r)/(r²-1)² dr` over the sampled radii.
/// A sample exactly at `r = 1` takes the mean of its neighbours' integrand.
pub fn profile_integral(profile: &[(f64, f64)]) -> f64 {
    let integrand: Vec<f64> = profile
        .iter()
        .map(|&(r, f)| {
            let d = r * r - 1.0;
            if d == 0.0 {
                f64::NAN
            } else {
                f / (d * d)
            }
        })
        .collect();
    let filled: Vec<f64> = (0..integrand.len())
        .map(|i| {
            if integrand[i].is_nan() {
                let left = if i > 0 { Some(integrand[i - 1]) } else { None };
                let right = integrand.get(i + 1).copied();
                match (left, right) {
                    (Some(a), Some(b)) => 0.5 * (a + b),
                    (Some(a), None) | (None, Some(a)) => a,
                    (None, None) => 0.0,
                }
            } else {
                integrand[i]
            }
        })
        .collect();
    profile
        .windows(2)
        .zip(filled.windows(2))
        .map(|(p, v)| 0.5 * (p[1].0 - p[0].0) * (v[0] + v[1]))
        .sum()
}

/// CSV with header `r,F_r` and 17 significant digits.
pub fn profile_csv(profile: &[(f64, f64)]) -> String {
    let mut out = String::from("r,F_r\n");
    for (r, f) in profile {
        out.push_str(&format!("{r:.16e},{f:.16e}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{GridPreset, Side};

    fn radial_gaussian(grid: Grid) -> Field {
        Field::from_frequency_fn(grid, |xi| {
            let r2: f64 = xi.iter().map(|v| v * v).sum();
            C64::new((-r2).exp(), 0.0)
        })
    }

    #[test]
    fn circle_rule_basics() {
        let q = sphere_quadrature(2, 1.0, 64).unwrap();
        assert_eq!(q.len(), 64);
        assert!(q.weights().iter().all(|&w| (w - 2.0 * PI / 64.0).abs() < 1e-15));
        let z = q.integrate(|x| C64::from_polar(1.0, 3.0 * x[1].atan2(x[0])));
        assert!(z.norm() < 1e-12);
        assert!(matches!(sphere_quadrature(2, 1.0, 7), Err(Error::BadResolution(7))));
    }

    #[test]
    fn sphere_rule_integrates_monomials() {
        let q = sphere_quadrature(3, 1.0, 16).unwrap();
        let total: f64 = q.weights().iter().sum();
        assert!((total - 4.0 * PI).abs() < 1e-12);
        // ∫ z² dσ = 4π/3, ∫ x²y²z² dσ = 4π/105, odd moments vanish.
        let z2 = q.integrate(|x| C64::new(x[2] * x[2], 0.0)).re;
        assert!((z2 - 4.0 * PI / 3.0).abs() < 1e-12);
        let m = q.integrate(|x| C64::new((x[0] * x[1] * x[2]).powi(2), 0.0)).re;
        assert!((m - 4.0 * PI / 105.0).abs() < 1e-12);
        let odd = q.integrate(|x| C64::new(x[0] * x[1] * x[1] + x[2].powi(5), 0.0));
        assert!(odd.norm() < 1e-12);
        let q2 = sphere_quadrature(3, 2.0, 8).unwrap();
        let area: f64 = q2.weights().iter().sum();
        assert!((area - 16.0 * PI).abs() < 1e-11);
    }

    #[test]
    fn constant_symbol_traces_to_one() {
        let g = GridPreset::Small.grid();
        let one = Field::delta(g).dft().unwrap();
        let q = sphere_quadrature(2, 1.0, 64).unwrap();
        let t = trace(&one, &q).unwrap();
        assert!(t.values.iter().all(|v| (v - C64::new(1.0, 0.0)).norm() < 1e-12));
        let f = restriction_norm_sq(&one, 1.0, 64).unwrap();
        assert!((f - 2.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn radial_gaussian_trace_and_profile() {
        let g = GridPreset::Small.grid();
        let fhat = radial_gaussian(g);
        let q = sphere_quadrature(2, 1.0, 64).unwrap();
        let t = trace(&fhat, &q).unwrap();
        for v in &t.values {
            assert!((v.re - (-1.0f64).exp()).abs() < 1e-8 && v.im.abs() < 1e-8);
        }
        let f1 = restriction_norm_sq(&fhat, 1.0, 64).unwrap();
        assert!((f1 - 2.0 * PI * (-2.0f64).exp()).abs() < 1e-7);
        let radii = [0.5, 0.9, 1.0, 1.2, 1.45];
        for (r, f) in f_profile(&fhat, &radii, Some(64)).unwrap() {
            let exact = 2.0 * PI * r * (-2.0 * r * r).exp();
            assert!((f - exact).abs() < 1e-6 * exact.max(1e-3));
        }
    }

    #[test]
    fn zero_field_profile() {
        let g = GridPreset::Small.grid();
        let z = Field::zeros(g, Side::Frequency);
        assert_eq!(restriction_norm_sq(&z, 1.0, 16).unwrap(), 0.0);
        assert!(f_profile(&z, &[0.7, 1.3], Some(16))
            .unwrap()
            .iter()
            .all(|p| p.1 == 0.0));
    }

    #[test]
    fn rejects_spheres_outside_the_box() {
        let g = Grid::new(2, 16, 10.0).unwrap();
        let one = Field::delta(g).dft().unwrap();
        let err = restriction_norm_sq(&one, 6.0, 16).unwrap_err();
        assert!(matches!(err, Error::SphereOutsideBox { .. }));
    }

    #[test]
    fn profile_integral_of_known_integrand() {
        // F(r) = (r²-1)² gives the interval length.
        let prof: Vec<(f64, f64)> = (0..=100)
            .map(|i| {
                let r = 0.5 + i as f64 / 100.0;
                (r, (r * r - 1.0).powi(2))
            })
            .collect();
        assert!((profile_integral(&prof) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_has_seventeen_digits() {
        let csv = profile_csv(&[(1.0, 2.0 / 3.0)]);
        assert_eq!(csv, "r,F_r\n1.0000000000000000e0,6.6666666666666663e-1\n");
    }
}

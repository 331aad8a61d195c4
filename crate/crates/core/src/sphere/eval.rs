//! Off-lattice evaluation of `f̂(ξ) = h^n Σ_j f(x_j) e^{-iξ·x_j}`.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::lattice::{Field, Grid};
use crate::{Error, Result, C64};

/// Oversampling factor of the padded evaluator.
pub const PAD_FACTOR: usize = 4;

/// Interpolation stencil width of the padded evaluator (quintic Lagrange).
const STENCIL: usize = 6;

pub trait Evaluator: Sync {
    fn grid(&self) -> &Grid;

    /// Errors when `radius` lies outside the region this evaluator covers.
    fn check_radius(&self, radius: f64) -> Result<()>;

    /// `f̂` at an arbitrary frequency (unused trailing coordinates are 0).
    fn eval(&self, xi: &[f64; 3]) -> C64;
}

/// Exact nonuniform summation from the space-side samples, `O(N^n)` per
/// point.
#[derive(Debug, Clone)]
pub struct DirectEvaluator {
    grid: Grid,
    values: Vec<C64>,
}

impl DirectEvaluator {
    pub fn new(field: &Field) -> Result<DirectEvaluator> {
        Ok(DirectEvaluator {
            grid: *field.grid(),
            values: field.to_space().into_values(),
        })
    }

    fn phases(&self, xi: f64) -> Vec<C64> {
        let h = self.grid.spacing();
        (0..self.grid.points())
            .map(|j| C64::from_polar(h, -xi * self.grid.position(j)))
            .collect()
    }
}

impl Evaluator for DirectEvaluator {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn check_radius(&self, _radius: f64) -> Result<()> {
        Ok(())
    }

    fn eval(&self, xi: &[f64; 3]) -> C64 {
        let n = self.grid.points();
        let p0 = self.phases(xi[0]);
        let p1 = self.phases(xi[1]);
        let dot = |row: &[C64], p: &[C64]| -> C64 { row.iter().zip(p).map(|(a, b)| a * b).sum() };
        if self.grid.dim() == 2 {
            self.values
                .chunks_exact(n)
                .zip(&p0)
                .map(|(row, a)| a * dot(row, &p1))
                .sum()
        } else {
            let p2 = self.phases(xi[2]);
            self.values
                .chunks_exact(n * n)
                .zip(&p0)
                .map(|(plane, a)| {
                    let inner: C64 = plane
                        .chunks_exact(n)
                        .zip(&p1)
                        .map(|(row, b)| b * dot(row, &p2))
                        .sum();
                    a * inner
                })
                .sum()
        }
    }
}

/// Samples of `f̂` on a `PAD_FACTOR`-times finer frequency lattice, taken
/// from a zero-padded FFT but kept only in the window `|ξ_a| ≤ r_max` (plus
/// a stencil margin), followed by tensor quintic Lagrange interpolation.
///
/// The interpolation error scales like `(R·dxi/PAD_FACTOR)^6` where `R` is
/// the spatial radius containing the field; fields supported in
/// `|x| ≤ L/8` are reproduced to about `1e-6` relative to `max |f̂|`.
#[derive(Debug, Clone)]
pub struct PaddedEvaluator {
    grid: Grid,
    r_max: f64,
    fine: f64,
    half: usize,
    width: usize,
    window: Vec<C64>,
}

impl PaddedEvaluator {
    pub fn new(field: &Field, r_max: f64) -> Result<PaddedEvaluator> {
        let grid = *field.grid();
        if !(r_max > 0.0) || r_max >= grid.nyquist() {
            return Err(Error::SphereOutsideBox {
                radius: r_max,
                nyquist: grid.nyquist(),
            });
        }
        let fine = grid.freq_spacing() / PAD_FACTOR as f64;
        let half = (r_max / fine).ceil() as usize + STENCIL;
        let width = 2 * half + 1;
        let window = padded_window(&grid, field.to_space().values(), half);
        Ok(PaddedEvaluator {
            grid,
            r_max,
            fine,
            half,
            width,
            window,
        })
    }
}

/// Lagrange weights for nodes `-2..=3` at offset `u ∈ [0, 1)`.
fn lagrange6(u: f64) -> [f64; STENCIL] {
    let mut w = [0.0; STENCIL];
    for (i, wi) in w.iter_mut().enumerate() {
        let xi = i as f64 - 2.0;
        let mut acc = 1.0;
        for j in 0..STENCIL {
            if j != i {
                let xj = j as f64 - 2.0;
                acc *= (u - xj) / (xi - xj);
            }
        }
        *wi = acc;
    }
    w
}

impl Evaluator for PaddedEvaluator {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn check_radius(&self, radius: f64) -> Result<()> {
        if radius > self.r_max {
            return Err(Error::SphereOutsideBox {
                radius,
                nyquist: self.r_max,
            });
        }
        Ok(())
    }

    fn eval(&self, xi: &[f64; 3]) -> C64 {
        let dim = self.grid.dim();
        let mut base = [0usize; 3];
        let mut weights = [[0.0; STENCIL]; 3];
        for a in 0..dim {
            let t = xi[a] / self.fine + self.half as f64;
            let fl = t.floor();
            base[a] = fl as usize - 2;
            weights[a] = lagrange6(t - fl);
        }
        let w = self.width;
        let mut acc = C64::new(0.0, 0.0);
        if dim == 2 {
            for (i, wi) in weights[0].iter().enumerate() {
                let row = (base[0] + i) * w + base[1];
                let inner: C64 = (0..STENCIL).map(|j| self.window[row + j] * weights[1][j]).sum();
                acc += inner * wi;
            }
        } else {
            for (i, wi) in weights[0].iter().enumerate() {
                let mut plane_acc = C64::new(0.0, 0.0);
                for (j, wj) in weights[1].iter().enumerate() {
                    let row = ((base[0] + i) * w + base[1] + j) * w + base[2];
                    let inner: C64 = (0..STENCIL).map(|k| self.window[row + k] * weights[2][k]).sum();
                    plane_acc += inner * wj;
                }
                acc += plane_acc * wi;
            }
        }
        acc
    }
}

/// Computes `f̂(m·dxi/PAD_FACTOR)` for `|m_a| ≤ half` on every axis.
///
/// Each pass transforms the last (contiguous) axis with a zero-padded FFT,
/// keeps the window, and rotates that axis to the front, so after `n` passes
/// the axes are back in their original order.
fn padded_window(grid: &Grid, space: &[C64], half: usize) -> Vec<C64> {
    let n = grid.points();
    let padded = PAD_FACTOR * n;
    let width = 2 * half + 1;
    let h = grid.spacing();
    let fft = FftPlanner::new().plan_fft_forward(padded);
    // Phase from x_0 = -L/2: e^{iξL/2} = e^{iπ m / PAD_FACTOR}, times h.
    let phase: Vec<C64> = (0..width)
        .map(|i| {
            let m = i as f64 - half as f64;
            C64::from_polar(h, PI * m / PAD_FACTOR as f64)
        })
        .collect();
    let mut data = space.to_vec();
    let mut line_len = n;
    for _ in 0..grid.dim() {
        let lines = data.len() / line_len;
        let mut out = vec![C64::new(0.0, 0.0); lines * width];
        out.par_chunks_mut(width).enumerate().for_each_init(
            || {
                (
                    vec![C64::new(0.0, 0.0); padded],
                    vec![C64::new(0.0, 0.0); fft.get_inplace_scratch_len()],
                )
            },
            |(buf, scratch), (line, dst)| {
                buf.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
                buf[..line_len].copy_from_slice(&data[line * line_len..(line + 1) * line_len]);
                fft.process_with_scratch(buf, scratch);
                for (i, d) in dst.iter_mut().enumerate() {
                    let m = i as i64 - half as i64;
                    *d = buf[m.rem_euclid(padded as i64) as usize] * phase[i];
                }
            },
        );
        // Rotate: (lines, width) -> (width, lines).
        let mut rotated = vec![C64::new(0.0, 0.0); out.len()];
        rotated.par_chunks_mut(lines).enumerate().for_each(|(i, dst)| {
            for (l, d) in dst.iter_mut().enumerate() {
                *d = out[l * width + i];
            }
        });
        data = rotated;
        // The next pass transforms what is now the last axis, which still
        // has its original length unless every axis has been done.
        line_len = n;
    }
    data
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{GridPreset, Side};
    use crate::sphere::{sphere_quadrature, trace_with};

    fn blob(grid: Grid, seed: u64) -> Field {
        // Random smooth field well inside |x| ≤ L/8.
        let r = Field::random(grid, Side::Space, seed);
        let l8 = grid.length() / 8.0;
        r.map_indexed(|i, v| {
            let x = grid.x_abs(i);
            v * (-(x / (0.4 * l8)).powi(2)).exp()
        })
    }

    #[test]
    fn padded_matches_direct_2d() {
        let g = GridPreset::Small.grid();
        let f = blob(g, 1);
        let direct = DirectEvaluator::new(&f).unwrap();
        let padded = PaddedEvaluator::new(&f, 1.5).unwrap();
        let q = sphere_quadrature(2, 1.13, 64).unwrap();
        let a = trace_with(&direct, &q).unwrap();
        let b = trace_with(&padded, &q).unwrap();
        let scale = a.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).norm() < 1e-6 * scale);
        }
    }

    #[test]
    fn padded_matches_direct_3d() {
        let g = Grid::new(3, 32, 12.0 * PI).unwrap();
        let f = blob(g, 2);
        let direct = DirectEvaluator::new(&f).unwrap();
        let padded = PaddedEvaluator::new(&f, 1.4).unwrap();
        let q = sphere_quadrature(3, 0.8, 8).unwrap();
        let a = trace_with(&direct, &q).unwrap();
        let b = trace_with(&padded, &q).unwrap();
        let scale = a.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).norm() < 1e-6 * scale);
        }
    }

    #[test]
    fn padded_reproduces_lattice_values() {
        let g = GridPreset::Small.grid();
        let f = blob(g, 3);
        let fhat = f.dft().unwrap();
        let padded = PaddedEvaluator::new(&f, 1.5).unwrap();
        for flat in [0usize, 5, 256 * 3 + 7, 256 * 250 + 20] {
            let xi = g.wavevector(flat);
            if xi[0].abs() < 1.4 && xi[1].abs() < 1.4 {
                let got = padded.eval(&xi);
                assert!((got - fhat.values()[flat]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn lagrange_weights_partition_unity() {
        for u in [0.0, 0.25, 0.7] {
            let w = lagrange6(u);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
        assert_eq!(lagrange6(0.0)[2], 1.0);
    }
}

//! Continuum-calibrated n-dimensional FFT.
//!
//! The spatial origin sits at index `N/2`, so the phase `e^{-iξ_k x_0}` with
//! `x_0 = -L/2` reduces to `(-1)^{k}` per axis. Scaling by `h^n` on the way
//! forward and `1/L^n` on the way back makes the pair an exact inverse and
//! gives the Plancherel identity `‖f̂‖ = (2π)^{n/2} ‖f‖` with the lattice
//! measures `h^n` and `dxi^n`.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::Grid;
use crate::C64;

pub(crate) fn forward(grid: &Grid, values: &mut [C64]) {
    fft_all_axes(grid, values, FftDirection::Forward);
    let scale = grid.cell_volume();
    apply_checkerboard(grid, values, scale);
}

pub(crate) fn inverse(grid: &Grid, values: &mut [C64]) {
    let scale = 1.0 / grid.length().powi(grid.dim() as i32);
    apply_checkerboard(grid, values, scale);
    fft_all_axes(grid, values, FftDirection::Inverse);
}

/// Multiplies node `k` by `scale * (-1)^{k_1 + … + k_n}`.
fn apply_checkerboard(grid: &Grid, values: &mut [C64], scale: f64) {
    let n = grid.points();
    let dim = grid.dim();
    values.par_chunks_mut(n).enumerate().for_each(|(row, chunk)| {
        // Parity of all indices except the last, read off the row number.
        let mut parity = 0usize;
        let mut r = row;
        for _ in 0..dim - 1 {
            parity += r % n;
            r /= n;
        }
        for (k, v) in chunk.iter_mut().enumerate() {
            let s = if (parity + k).is_multiple_of(2) { scale } else { -scale };
            *v *= s;
        }
    });
}

fn fft_all_axes(grid: &Grid, values: &mut [C64], direction: FftDirection) {
    let n = grid.points();
    let dim = grid.dim();
    let fft = FftPlanner::new().plan_fft(n, direction);
    for axis in 0..dim {
        let inner = n.pow((dim - 1 - axis) as u32);
        if inner == 1 {
            fft_rows(&fft, values, n);
        } else {
            fft_strided(&fft, values, n, inner);
        }
    }
}

fn fft_rows(fft: &Arc<dyn Fft<f64>>, values: &mut [C64], n: usize) {
    values.par_chunks_mut(n * 16).for_each_init(
        || vec![C64::new(0.0, 0.0); fft.get_inplace_scratch_len()],
        |scratch, block| fft.process_with_scratch(block, scratch),
    );
}

/// FFT along an axis with stride `inner`: the array is viewed as
/// `[outer][n][inner]`. Lines are gathered into a contiguous buffer laid out
/// as `[outer][inner][n]`, transformed, and scattered back.
fn fft_strided(fft: &Arc<dyn Fft<f64>>, values: &mut [C64], n: usize, inner: usize) {
    let block = n * inner;
    let mut lines = vec![C64::new(0.0, 0.0); values.len()];
    {
        let src: &[C64] = values;
        lines.par_chunks_mut(n).enumerate().for_each_init(
            || vec![C64::new(0.0, 0.0); fft.get_inplace_scratch_len()],
            |scratch, (line, buf)| {
                let outer = line / inner;
                let col = line % inner;
                let base = outer * block + col;
                for (m, b) in buf.iter_mut().enumerate() {
                    *b = src[base + m * inner];
                }
                fft.process_with_scratch(buf, scratch);
            },
        );
    }
    let lines = &lines;
    values.par_chunks_mut(inner).enumerate().for_each(|(row, out)| {
        let outer = row / n;
        let m = row % n;
        let base = outer * block;
        for (col, o) in out.iter_mut().enumerate() {
            *o = lines[base + col * n + m];
        }
    });
}

#[cfg(test)]
mod tests {
    use super::super::{Field, Grid, Side};
    use crate::C64;
    use std::f64::consts::PI;

    /// Direct O(N^{2n}) evaluation of the defining sum.
    fn naive_dft(f: &Field) -> Vec<C64> {
        let g = f.grid();
        let h_n = g.cell_volume();
        let dim = g.dim();
        (0..g.len())
            .map(|k| {
                let xi = g.wavevector(k);
                let mut acc = C64::new(0.0, 0.0);
                for (j, &v) in f.values().iter().enumerate() {
                    let x = g.point(j);
                    let phase: f64 = (0..dim).map(|a| xi[a] * x[a]).sum();
                    acc += v * C64::from_polar(1.0, -phase);
                }
                acc * h_n
            })
            .collect()
    }

    #[test]
    fn matches_defining_sum_2d_and_3d() {
        for (dim, n, len) in [(2, 16, 8.0 * PI), (3, 16, 6.0 * PI)] {
            let g = Grid::new(dim, n, len).unwrap();
            let f = Field::random(g, Side::Space, 11);
            let fast = f.dft().unwrap();
            let slow = naive_dft(&f);
            let scale = slow.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for (a, b) in fast.values().iter().zip(&slow) {
                assert!((a - b).norm() < 1e-11 * scale);
            }
        }
    }

    #[test]
    fn delta_transforms_to_one() {
        let g = Grid::new(3, 16, 6.0 * PI).unwrap();
        let f = Field::delta(g).dft().unwrap();
        for v in f.values() {
            assert!((v - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn gaussian_matches_continuum_transform() {
        let g = Grid::new(2, 256, 32.0 * PI).unwrap();
        let f = Field::from_space_fn(g, |x| C64::new((-0.5 * (x[0] * x[0] + x[1] * x[1])).exp(), 0.0));
        let fh = f.dft().unwrap();
        for (k, v) in fh.values().iter().enumerate() {
            let r2 = g.xi_abs(k).powi(2);
            let exact = 2.0 * PI * (-0.5 * r2).exp();
            assert!((v.re - exact).abs() < 1e-12 && v.im.abs() < 1e-12);
        }
    }
}

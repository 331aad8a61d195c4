//! Periodic lattice discretization of `R^n` (n = 2 or 3).
//!
//! Spatial nodes sit at `x_j = -L/2 + j h` on every axis, so the origin is
//! the node with index `N/2`. Frequency nodes are `ξ_k = dxi * k` with the
//! signed index `k ∈ {-N/2, …, N/2 - 1}`, stored in natural FFT order:
//! storage slot `k` holds signed index `k` for `k < N/2` and `k - N` after.
//!
//! All arrays are row-major with axis 0 slowest.

mod io;
mod norms;
mod transform;

pub use io::{read_fld, read_fld_from, write_fld, write_fld_to, FLD_MAGIC, FLD_VERSION};
pub use norms::{lp_norm, weighted_l2_norm};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Radius of the annulus that must fit inside the frequency box.
pub const ANNULUS_OUTER: f64 = 1.5;

/// A periodic box `[-L/2, L/2)^n` sampled with `N` points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    points: usize,
    length: f64,
}

/// Named grids used throughout the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridPreset {
    /// `(2, 256, 32π)`
    Small,
    /// `(2, 1024, 64π)`
    Paper2d,
    /// `(3, 128, 32π)`
    Paper3d,
}

impl GridPreset {
    pub fn grid(self) -> Grid {
        use std::f64::consts::PI;
        let (n, points, length) = match self {
            GridPreset::Small => (2, 256, 32.0 * PI),
            GridPreset::Paper2d => (2, 1024, 64.0 * PI),
            GridPreset::Paper3d => (3, 128, 32.0 * PI),
        };
        Grid::new(n, points, length).expect("presets satisfy the grid invariants")
    }
}

impl std::str::FromStr for GridPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small" => Ok(GridPreset::Small),
            "paper2d" => Ok(GridPreset::Paper2d),
            "paper3d" => Ok(GridPreset::Paper3d),
            other => Err(Error::InvalidParameter(format!("unknown grid preset {other:?}"))),
        }
    }
}

impl Grid {
    /// Builds a grid after checking the dimension, the power-of-two size and
    /// that the annulus `{|ξ| < 3/2}` sits strictly inside the frequency box.
    pub fn new(dim: usize, points: usize, length: f64) -> Result<Grid> {
        if dim != 2 && dim != 3 {
            return Err(Error::BadDimension(dim));
        }
        if points < 16 || !points.is_power_of_two() {
            return Err(Error::BadGrid(format!(
                "N = {points} must be a power of two >= 16"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::BadGrid(format!("L = {length} must be positive")));
        }
        let grid = Grid {
            dim,
            points,
            length,
        };
        let nyquist = grid.nyquist();
        if nyquist <= ANNULUS_OUTER {
            return Err(Error::NyquistTooSmall { nyquist });
        }
        Ok(grid)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis, `N`.
    pub fn points(&self) -> usize {
        self.points
    }

    /// Box side length, `L`.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Spatial spacing `h = L/N`.
    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    /// Frequency spacing `dxi = 2π/L`.
    pub fn freq_spacing(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.length
    }

    /// Largest resolved frequency along an axis, `dxi * N/2`.
    pub fn nyquist(&self) -> f64 {
        self.freq_spacing() * (self.points / 2) as f64
    }

    /// Total number of nodes, `N^n`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spatial cell volume `h^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Frequency cell volume `dxi^n`.
    pub fn freq_cell_volume(&self) -> f64 {
        self.freq_spacing().powi(self.dim as i32)
    }

    /// Signed frequency index stored in slot `k`.
    pub fn signed_index(&self, k: usize) -> i64 {
        let half = self.points / 2;
        if k < half {
            k as i64
        } else {
            k as i64 - self.points as i64
        }
    }

    /// Storage slot of a signed frequency index.
    pub fn slot_of_signed(&self, k: i64) -> usize {
        k.rem_euclid(self.points as i64) as usize
    }

    /// Spatial coordinate of index `j` along one axis.
    pub fn position(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.spacing()
    }

    /// Frequency coordinate of storage slot `k` along one axis.
    pub fn frequency(&self, k: usize) -> f64 {
        self.signed_index(k) as f64 * self.freq_spacing()
    }

    /// Per-axis indices of a flat row-major index.
    pub fn unflatten(&self, flat: usize) -> [usize; 3] {
        let n = self.points;
        match self.dim {
            2 => [flat / n, flat % n, 0],
            _ => [flat / (n * n), (flat / n) % n, flat % n],
        }
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter()
            .take(self.dim)
            .fold(0, |acc, &i| acc * self.points + i)
    }

    /// Spatial coordinates of a flat index.
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let idx = self.unflatten(flat);
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = self.position(idx[a]);
        }
        x
    }

    /// Frequency coordinates of a flat index.
    pub fn wavevector(&self, flat: usize) -> [f64; 3] {
        let idx = self.unflatten(flat);
        let mut xi = [0.0; 3];
        for a in 0..self.dim {
            xi[a] = self.frequency(idx[a]);
        }
        xi
    }

    pub fn xi_abs(&self, flat: usize) -> f64 {
        norm3(&self.wavevector(flat))
    }

    pub fn x_abs(&self, flat: usize) -> f64 {
        norm3(&self.point(flat))
    }

    /// Flat index of the spatial origin.
    pub fn origin(&self) -> usize {
        let half = self.points / 2;
        self.flatten(&[half, half, half])
    }
}

fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Which side of the transform a field's values live on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Space,
    Frequency,
}

/// Complex lattice function tagged with its transform side.
///
/// Values are immutable after construction; the side tag only changes
/// through [`Field::dft`] and [`Field::idft`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    side: Side,
    values: Vec<C64>,
}

impl Field {
    pub fn zeros(grid: Grid, side: Side) -> Field {
        Field {
            grid,
            side,
            values: vec![C64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_values(grid: Grid, side: Side, values: Vec<C64>) -> Result<Field> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Field { grid, side, values })
    }

    /// Samples `f(x)` at every spatial node.
    pub fn from_space_fn<F>(grid: Grid, f: F) -> Field
    where
        F: Fn(&[f64]) -> C64 + Sync,
    {
        let n = grid.dim();
        let values = (0..grid.len())
            .into_par_iter()
            .map(|i| f(&grid.point(i)[..n]))
            .collect();
        Field {
            grid,
            side: Side::Space,
            values,
        }
    }

    /// Samples `g(ξ)` at every frequency node.
    pub fn from_frequency_fn<F>(grid: Grid, g: F) -> Field
    where
        F: Fn(&[f64]) -> C64 + Sync,
    {
        let n = grid.dim();
        let values = (0..grid.len())
            .into_par_iter()
            .map(|i| g(&grid.wavevector(i)[..n]))
            .collect();
        Field {
            grid,
            side: Side::Frequency,
            values,
        }
    }

    /// Unit-amplitude single-cell indicator at the origin (space side).
    pub fn cell_indicator(grid: Grid) -> Field {
        let mut f = Field::zeros(grid, Side::Space);
        f.values[grid.origin()] = C64::new(1.0, 0.0);
        f
    }

    /// Discrete delta at the origin, normalized so that its transform is ≡ 1.
    pub fn delta(grid: Grid) -> Field {
        let mut f = Field::zeros(grid, Side::Space);
        f.values[grid.origin()] = C64::new(1.0 / grid.cell_volume(), 0.0);
        f
    }

    /// Field with independent standard complex Gaussian values, reproducible
    /// from `seed`.
    pub fn random(grid: Grid, side: Side, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..grid.len())
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                C64::new(re, im)
            })
            .collect();
        Field { grid, side, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    /// Forward transform `f̂(ξ_k) = h^n Σ_j f(x_j) e^{-iξ_k·x_j}`.
    pub fn dft(&self) -> Result<Field> {
        self.expect_side(Side::Space)?;
        let mut values = self.values.clone();
        transform::forward(&self.grid, &mut values);
        Ok(Field {
            grid: self.grid,
            side: Side::Frequency,
            values,
        })
    }

    /// Exact discrete inverse of [`Field::dft`].
    pub fn idft(&self) -> Result<Field> {
        self.expect_side(Side::Frequency)?;
        let mut values = self.values.clone();
        transform::inverse(&self.grid, &mut values);
        Ok(Field {
            grid: self.grid,
            side: Side::Space,
            values,
        })
    }

    /// Frequency-side copy of this field, transforming if needed.
    pub fn to_frequency(&self) -> Field {
        match self.side {
            Side::Frequency => self.clone(),
            Side::Space => self.dft().expect("side checked"),
        }
    }

    /// Space-side copy of this field, transforming if needed.
    pub fn to_space(&self) -> Field {
        match self.side {
            Side::Space => self.clone(),
            Side::Frequency => self.idft().expect("side checked"),
        }
    }

    /// Transforms to `side` if the field is not already there.
    pub fn to_side(&self, side: Side) -> Field {
        match side {
            Side::Space => self.to_space(),
            Side::Frequency => self.to_frequency(),
        }
    }

    pub fn expect_side(&self, side: Side) -> Result<()> {
        if self.side == side {
            Ok(())
        } else {
            Err(Error::SideMismatch {
                expected: side,
                found: self.side,
            })
        }
    }

    /// New field on the same grid and side with values `op(i, v_i)`.
    pub fn map_indexed<F>(&self, op: F) -> Field
    where
        F: Fn(usize, C64) -> C64 + Sync,
    {
        let values = self
            .values
            .par_iter()
            .enumerate()
            .map(|(i, &v)| op(i, v))
            .collect();
        Field {
            grid: self.grid,
            side: self.side,
            values,
        }
    }

    /// Frequency-pointwise product with `symbol(|ξ_k|)`, returned on the
    /// frequency side. Nodes where the field vanishes are not evaluated.
    pub fn mul_radial_symbol<F>(&self, symbol: F) -> Result<Field>
    where
        F: Fn(f64) -> Result<C64> + Sync,
    {
        self.expect_side(Side::Frequency)?;
        let grid = self.grid;
        let values = self
            .values
            .par_iter()
            .enumerate()
            .map(|(i, &v)| {
                if v == C64::new(0.0, 0.0) {
                    Ok(v)
                } else {
                    symbol(grid.xi_abs(i)).map(|m| m * v)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Field {
            grid,
            side: Side::Frequency,
            values,
        })
    }

    /// `self - other`, which must share grid and side.
    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.check_compatible(other)?;
        Ok(self.map_indexed(|i, v| v - other.values[i]))
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.check_compatible(other)?;
        Ok(self.map_indexed(|i, v| v + other.values[i]))
    }

    pub fn scale(&self, c: C64) -> Field {
        self.map_indexed(|_, v| v * c)
    }

    fn check_compatible(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        other.expect_side(self.side)
    }
}

/// Box-Muller standard normal sampler; avoids pulling in `rand_distr` for a
/// single distribution.
struct StandardNormal;

impl rand::distr::Distribution<f64> for StandardNormal {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u1: f64 = 1.0 - rng.random::<f64>();
        let u2: f64 = rng.random::<f64>();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

/// Deterministic parallel sum: fixed-size chunks are reduced in parallel and
/// the partial sums are combined in index order.
pub(crate) fn ordered_sum<T, F>(items: &[T], term: F) -> f64
where
    T: Sync,
    F: Fn(usize, &T) -> f64 + Sync,
{
    const CHUNK: usize = 4096;
    let partials: Vec<f64> = items
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(c, chunk)| {
            chunk
                .iter()
                .enumerate()
                .map(|(i, v)| term(c * CHUNK + i, v))
                .sum::<f64>()
        })
        .collect();
    partials.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn nyquist_boundary_is_rejected() {
        let err = Grid::new(2, 16, 16.0 * PI).unwrap_err();
        assert!(matches!(err, Error::NyquistTooSmall { nyquist } if (nyquist - 1.0).abs() < 1e-15));
    }

    #[test]
    fn paper2d_arithmetic() {
        let g = Grid::new(2, 512, 64.0 * PI).unwrap();
        assert!((g.freq_spacing() - 1.0 / 32.0).abs() < 1e-15);
        assert!((g.spacing() - PI / 8.0).abs() < 1e-15);
        let g3 = Grid::new(3, 128, 32.0 * PI).unwrap();
        assert!((g3.freq_spacing() - 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(Grid::new(4, 64, 10.0), Err(Error::BadDimension(4))));
        assert!(matches!(Grid::new(2, 48, 10.0), Err(Error::BadGrid(_))));
        assert!(matches!(Grid::new(2, 8, 1.0), Err(Error::BadGrid(_))));
        assert!(matches!(Grid::new(2, 64, -1.0), Err(Error::BadGrid(_))));
    }

    #[test]
    fn index_maps_are_consistent() {
        let g = GridPreset::Small.grid();
        assert_eq!(g.signed_index(0), 0);
        assert_eq!(g.signed_index(127), 127);
        assert_eq!(g.signed_index(128), -128);
        assert_eq!(g.signed_index(255), -1);
        for k in [-128i64, -1, 0, 5, 127] {
            assert_eq!(g.signed_index(g.slot_of_signed(k)), k);
        }
        assert_eq!(g.point(g.origin()), [0.0, 0.0, 0.0]);
        let flat = g.flatten(&[3, 7]);
        assert_eq!(&g.unflatten(flat)[..2], &[3, 7]);
    }

    #[test]
    fn side_tags_are_enforced() {
        let g = GridPreset::Small.grid();
        let f = Field::zeros(g, Side::Frequency);
        assert!(matches!(f.dft(), Err(Error::SideMismatch { .. })));
        let s = Field::zeros(g, Side::Space);
        assert!(matches!(s.idft(), Err(Error::SideMismatch { .. })));
    }

    #[test]
    fn random_fields_are_reproducible() {
        let g = GridPreset::Small.grid();
        let a = Field::random(g, Side::Space, 7);
        let b = Field::random(g, Side::Space, 7);
        assert_eq!(a, b);
        assert_ne!(a, Field::random(g, Side::Space, 8));
    }
}

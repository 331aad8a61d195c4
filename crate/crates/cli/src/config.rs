//! Run configuration. A config fully determines a run: every default is
//! filled in before execution and the resolved config is what gets hashed.

use std::path::PathBuf;

use helmholtz_lp::experiments::{Annulus, EpsScanConfig, VolumeRule, DELTAS_2D};
use helmholtz_lp::helmholtz::{defect_radii, EpsLadder, DEFECT_THRESHOLD};
use helmholtz_lp::lattice::read_fld;
use helmholtz_lp::multipliers::{CutoffSpec, Sidedness};
use helmholtz_lp::{Field, Grid, GridPreset};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

pub fn default_output_dir() -> PathBuf {
    PathBuf::from("hlp-output")
}

/// Either a preset, explicit `{n, N, L}`, or a preset with some fields
/// overridden. Resolution always ends with all three explicit and no preset.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<GridPreset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
}

impl GridSpec {
    pub fn explicit(grid: &Grid) -> GridSpec {
        GridSpec {
            preset: None,
            n: Some(grid.dim()),
            points: Some(grid.points()),
            length: Some(grid.length()),
        }
    }

    pub fn build(&self, fallback: GridPreset) -> Result<Grid, CliError> {
        let base = self.preset.unwrap_or(fallback).grid();
        let n = self.n.unwrap_or(base.dim());
        let points = self.points.unwrap_or(base.points());
        let length = self.length.unwrap_or(base.length());
        Ok(Grid::new(n, points, length)?)
    }
}

/// Synthesized input data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DataKind {
    /// Lattice delta at the origin; its transform is identically 1.
    Delta,
    /// `e^{-|x|²/2}`.
    Gaussian,
    /// The Gaussian with `f̂` multiplied by `|ξ|² - 1`.
    AnnihilatedGaussian,
    /// Seeded complex Gaussian noise.
    Random,
}

impl DataKind {
    pub fn field(self, grid: Grid, seed: u64) -> Field {
        match self {
            DataKind::Delta => Field::delta(grid),
            DataKind::Gaussian => gaussian(grid),
            DataKind::AnnihilatedGaussian => helmholtz_lp::helmholtz::annihilate(&gaussian(grid)),
            DataKind::Random => Field::random(grid, helmholtz_lp::Side::Space, seed),
        }
    }
}

pub fn gaussian(grid: Grid) -> Field {
    Field::from_space_fn(grid, |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        helmholtz_lp::C64::new((-r2 / 2.0).exp(), 0.0)
    })
}

/// Reads `input` when set, otherwise synthesizes `data`.
pub fn load_data(data: DataKind, input: Option<&PathBuf>, grid: Grid, seed: u64) -> Result<Field, CliError> {
    match input {
        Some(path) => Ok(read_fld(path)?.to_space()),
        None => Ok(data.field(grid, seed)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    Solve(SolveParams),
    PerturbedSolve(PerturbedParams),
    KnappScan(KnappScanParams),
    EpsScan(EpsScanParams),
    RemainderScan(RemainderParams),
    LqScan(LqParams),
    KernelProfile(KernelParams),
    Defect(DefectParams),
    Selftest(SelftestParams),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve(_) => "solve",
            Command::PerturbedSolve(_) => "perturbed-solve",
            Command::KnappScan(_) => "knapp-scan",
            Command::EpsScan(_) => "eps-scan",
            Command::RemainderScan(_) => "remainder-scan",
            Command::LqScan(_) => "lq-scan",
            Command::KernelProfile(_) => "kernel-profile",
            Command::Defect(_) => "defect",
            Command::Selftest(_) => "selftest",
        }
    }

    /// Grid used when the config names none.
    pub fn default_preset(&self) -> GridPreset {
        match self {
            Command::PerturbedSolve(_) | Command::Defect(_) | Command::Selftest(_) => GridPreset::Small,
            _ => GridPreset::Paper2d,
        }
    }

    /// Data kind and input path of commands that take a field.
    pub fn source(&self) -> Option<(DataKind, Option<&PathBuf>)> {
        match self {
            Command::Solve(p) => Some((p.data, p.input.as_ref())),
            Command::PerturbedSolve(p) => Some((p.data, p.input.as_ref())),
            Command::EpsScan(p) => Some((p.data, p.input.as_ref())),
            Command::RemainderScan(p) => Some((p.data, p.input.as_ref())),
            Command::Defect(p) => Some((p.data, p.input.as_ref())),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveParams {
    pub data: DataKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    pub ladder: EpsLadder,
    pub cutoff: CutoffSpec,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams {
            data: DataKind::AnnihilatedGaussian,
            input: None,
            ladder: EpsLadder::default(),
            cutoff: CutoffSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbedParams {
    pub data: DataKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// `V(x) = e^{-|x|²/s²}` rescaled so that `‖V‖_r` equals this value.
    pub potential_strength: f64,
    pub potential_scale: f64,
    /// Treat synthesized data as the preimage `g` and solve for
    /// `f = g + V R₀ g`, which is in the range by construction.
    pub data_is_preimage: bool,
    pub tol: f64,
    pub max_iter: usize,
    pub ladder: EpsLadder,
    pub cutoff: CutoffSpec,
}

impl Default for PerturbedParams {
    fn default() -> Self {
        PerturbedParams {
            data: DataKind::AnnihilatedGaussian,
            input: None,
            potential_strength: 0.05,
            potential_scale: 2.0,
            data_is_preimage: true,
            tol: 1e-10,
            max_iter: 200,
            ladder: EpsLadder::default(),
            cutoff: CutoffSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KnappScanParams {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    /// Whether the ratio scan uses data annihilated on the sphere.
    pub annihilated: bool,
    pub deltas: Vec<f64>,
}

impl Default for KnappScanParams {
    fn default() -> Self {
        KnappScanParams {
            p: 10.0 / 9.0,
            q: 2.0,
            alpha: 0.6,
            annihilated: true,
            deltas: DELTAS_2D.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EpsScanParams {
    pub data: DataKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    pub alpha: f64,
    pub ladder: Vec<f64>,
    pub annulus: Annulus,
    pub rule: VolumeRule,
    pub resolution: Option<usize>,
}

impl Default for EpsScanParams {
    fn default() -> Self {
        let cfg = EpsScanConfig::new(1.0);
        EpsScanParams {
            data: DataKind::Delta,
            input: None,
            alpha: cfg.alpha,
            ladder: cfg.ladder,
            annulus: cfg.annulus,
            rule: cfg.rule,
            resolution: cfg.resolution,
        }
    }
}

impl EpsScanParams {
    pub fn scan_config(&self) -> EpsScanConfig {
        EpsScanConfig {
            alpha: self.alpha,
            ladder: self.ladder.clone(),
            annulus: self.annulus,
            rule: self.rule,
            resolution: self.resolution,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RemainderParams {
    pub data: DataKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    pub alpha: f64,
    pub ladder: Vec<f64>,
}

impl Default for RemainderParams {
    fn default() -> Self {
        RemainderParams {
            data: DataKind::Gaussian,
            input: None,
            alpha: 1.25,
            ladder: EpsScanConfig::new(1.25).ladder,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LqParams {
    pub beta: f64,
    pub alpha: f64,
    pub deltas: Vec<f64>,
}

impl Default for LqParams {
    fn default() -> Self {
        LqParams {
            beta: 0.6,
            alpha: 0.9,
            deltas: DELTAS_2D.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelParams {
    pub order_re: f64,
    pub order_im: f64,
    pub side: Sidedness,
    pub eps: f64,
    pub gamma_normalized: bool,
    /// Bin centres; empty means the decay bins for the grid.
    pub radii: Vec<f64>,
}

impl Default for KernelParams {
    fn default() -> Self {
        KernelParams {
            order_re: 0.0,
            order_im: 0.0,
            side: Sidedness::Classical,
            eps: 0.0,
            gamma_normalized: true,
            radii: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DefectParams {
    pub data: DataKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    pub threshold: f64,
    pub resolution: Option<usize>,
    pub radii: Vec<f64>,
}

impl Default for DefectParams {
    fn default() -> Self {
        DefectParams {
            data: DataKind::AnnihilatedGaussian,
            input: None,
            threshold: DEFECT_THRESHOLD,
            resolution: None,
            radii: defect_radii(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelftestParams {}

impl RunConfig {
    /// Fills in the grid (from the input file when there is one) and every
    /// grid-dependent default. Returns the grid and, if read, the input field.
    pub fn resolve(&mut self) -> Result<(Grid, Option<Field>), CliError> {
        let fallback = self.command.default_preset();
        let mut grid = self.grid.build(fallback)?;
        let mut input = None;
        if let Some((data, Some(path))) = self.command.source() {
            let f = load_data(data, Some(path), grid, self.seed)?;
            grid = *f.grid();
            input = Some(f);
        }
        if let Command::KernelProfile(p) = &mut self.command {
            if p.radii.is_empty() {
                p.radii = helmholtz_lp::experiments::decay_radii(&grid);
            }
        }
        self.grid = GridSpec::explicit(&grid);
        Ok((grid, input))
    }
}

//! Finite-band Kramers–Kronig transform from absorption to refractive index.
//!
//! With α the intensity absorption coefficient and ν the wavenumber (both
//! cm⁻¹):
//!
//! n(ν) − 1 = baseline + 1/(2π²) · PV ∫ α(ν′) / (ν′² − ν²) dν′
//!
//! The principal value is taken with the alternating-point rule: on a
//! uniform grid of step h, only samples whose index differs from the output
//! index by an odd number contribute, each with weight 2h. The singular
//! point is never sampled. Contributions from outside the grid are assumed
//! to be folded into `baseline`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::spectrum::{interp_linear, uniform_grid};

pub const MIN_POINTS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct IndexSpectrum {
    /// cm⁻¹, uniform
    pub grid: Vec<f64>,
    /// total n − 1, baseline included
    pub n_minus_1: Vec<f64>,
    pub baseline: f64,
}

impl IndexSpectrum {
    /// Resonant part, n − 1 − baseline.
    pub fn resonant(&self) -> Vec<f64> {
        self.n_minus_1.iter().map(|v| v - self.baseline).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KkOutput {
    pub spectrum: IndexSpectrum,
    pub warnings: Vec<String>,
}

/// Checks the grid is uniform and returns its step.
pub fn uniform_step(grid: &[f64]) -> Result<f64> {
    if grid.len() < MIN_POINTS {
        return Err(Error::Grid(format!(
            "KK needs at least {MIN_POINTS} points, got {}",
            grid.len()
        )));
    }
    let h = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    if !(h > 0.0) {
        return Err(Error::Grid("grid must be strictly increasing".into()));
    }
    for (i, w) in grid.windows(2).enumerate() {
        if ((w[1] - w[0]) - h).abs() > 1e-6 * h {
            return Err(Error::Grid(format!(
                "grid is not uniform at index {i}: step {} vs mean {h}",
                w[1] - w[0]
            )));
        }
    }
    Ok(h)
}

pub fn kk_index_from_absorption(alpha: &[f64], grid: &[f64], baseline: f64) -> Result<KkOutput> {
    kk_index_from_absorption_with(alpha, grid, baseline, Execution::default())
}

pub fn kk_index_from_absorption_with(
    alpha: &[f64],
    grid: &[f64],
    baseline: f64,
    exec: Execution,
) -> Result<KkOutput> {
    if alpha.len() != grid.len() {
        return Err(Error::Grid(format!(
            "absorption has {} samples, grid {}",
            alpha.len(),
            grid.len()
        )));
    }
    let h = uniform_step(grid)?;
    let mut warnings = Vec::new();
    if let Some(i) = alpha.iter().position(|&a| a < 0.0) {
        warnings.push(format!("negative absorption {} at {} cm⁻¹", alpha[i], grid[i]));
    }
    let peak = alpha.iter().fold(0.0f64, |m, &a| m.max(a.abs()));
    let edge = alpha[0].abs().max(alpha[alpha.len() - 1].abs());
    if peak > 0.0 && edge > 0.01 * peak {
        warnings.push(format!(
            "absorption at the band edge is {:.1}% of peak; truncation error likely",
            100.0 * edge / peak
        ));
    }
    let scale = 2.0 * h / (2.0 * PI * PI);
    let n = grid.len();
    let values = exec.map_range(n, |i| {
        let nu2 = grid[i] * grid[i];
        let start = if i % 2 == 0 { 1 } else { 0 };
        let mut acc = 0.0;
        let mut j = start;
        while j < n {
            acc += alpha[j] / (grid[j] * grid[j] - nu2);
            j += 2;
        }
        baseline + scale * acc
    });
    Ok(KkOutput {
        spectrum: IndexSpectrum {
            grid: grid.to_vec(),
            n_minus_1: values,
            baseline,
        },
        warnings,
    })
}

/// KK for absorption sampled on an increasing but non-uniform grid (e.g. a
/// retrieval's idler axis): linear resampling onto a uniform grid with the
/// same number of points, transform, and interpolation back.
pub fn kk_resampled(alpha: &[f64], grid: &[f64], baseline: f64, exec: Execution) -> Result<KkOutput> {
    if alpha.len() != grid.len() || grid.len() < MIN_POINTS {
        return Err(Error::Grid(format!(
            "need ≥ {MIN_POINTS} matching samples (got {} and {})",
            alpha.len(),
            grid.len()
        )));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Grid("grid must be strictly increasing".into()));
    }
    let n = grid.len();
    let step = (grid[n - 1] - grid[0]) / (n - 1) as f64;
    let mut uniform = uniform_grid(grid[0], step, n);
    uniform[n - 1] = grid[n - 1];
    let resampled: Vec<f64> = uniform
        .iter()
        .map(|&x| interp_linear(grid, alpha, x).expect("inside source grid"))
        .collect();
    let out = kk_index_from_absorption_with(&resampled, &uniform, baseline, exec)?;
    let back: Vec<f64> = grid
        .iter()
        .map(|&x| interp_linear(&uniform, &out.spectrum.n_minus_1, x).expect("inside grid"))
        .collect();
    Ok(KkOutput {
        spectrum: IndexSpectrum {
            grid: grid.to_vec(),
            n_minus_1: back,
            baseline,
        },
        warnings: out.warnings,
    })
}

//! Inverse pipeline: fringe visibility, Levenberg–Marquardt fits of the
//! absorbing-gap model per wavelength column, and assembly of the idler
//! index and absorption spectra against a vacuum reference map.

mod fit;
mod lm;
mod spectrum;
mod visibility;

pub use fit::{fit_cross_section, fringe_shift_to_index, FitResult, MIN_PHASE_VISIBILITY, TAU_FLOOR};
pub use lm::{levenberg_marquardt, LmOptions, LmResult};
pub use spectrum::{BandSummary, RetrievedSpectrum};
pub use visibility::{alpha_from_visibility, polynomial_envelope, visibility, ENVELOPE_DEGREE};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::interferometer::{idler_wavelength, CrossSectionModel, InterferogramMap, InterferometerConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetrievalOptions {
    /// Columns whose reference mean is below this fraction of the brightest
    /// column are skipped.
    pub min_envelope: f64,
    /// Columns whose reference fringe contrast is below this are skipped.
    pub min_reference_visibility: f64,
    /// Fit every `column_stride`-th column.
    pub column_stride: usize,
    pub lm: LmOptions,
    pub exec: Execution,
}

impl Default for RetrievalOptions {
    fn default() -> Self {
        Self {
            min_envelope: 0.2,
            min_reference_visibility: 0.3,
            column_stride: 1,
            lm: LmOptions::default(),
            exec: Execution::default(),
        }
    }
}

/// Per-column outcome of the sample and reference fits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnFit {
    pub column: usize,
    pub signal_nm: f64,
    pub sample: FitResult,
    pub reference: FitResult,
    /// Fringe shift φ_ref − φ_sample on axis (radians).
    pub fringe_shift: f64,
    /// The shift sits within 2σ of the single-fringe window edge.
    pub near_unwrap_edge: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedColumn {
    pub column: usize,
    pub signal_nm: f64,
    pub reason: String,
}

enum Outcome {
    Fit(Box<ColumnFit>),
    Skip(SkippedColumn),
}

/// Recovers (n, α) of the idler gap gas for every usable column.
///
/// Both maps are fitted with the same model; the reference assumes an
/// evacuated gap. The gas's visible index `visible_index` enters the
/// sample model for pump and signal. n = 1 + Δφ·λ_i/(2πL_m) with Δφ the
/// fitted fringe shift between reference and sample, α = α_sample −
/// α_reference, and the σ's of both fits add in quadrature.
pub fn retrieve_spectrum(
    sample: &InterferogramMap,
    reference: &InterferogramMap,
    config: &InterferometerConfig,
    visible_index: f64,
    opts: &RetrievalOptions,
) -> Result<RetrievedSpectrum> {
    if !sample.same_axes(reference) {
        return Err(Error::Incompatible("sample and reference maps have different axes".into()));
    }
    if opts.column_stride == 0 {
        return Err(invalid("column stride must be at least 1"));
    }
    if !(visible_index >= 1.0) {
        return Err(invalid(format!("visible gap index {visible_index} must be >= 1")));
    }
    let angles = &sample.angle_rad;
    let gap_mm = config.geometry.gap_mm;
    let col_means: Vec<f64> = (0..reference.cols())
        .map(|j| reference.intensity.column(j).mean().unwrap_or(0.0))
        .collect();
    let brightest = col_means.iter().cloned().fold(0.0f64, f64::max);
    if !(brightest > 0.0) {
        return Err(Error::Incompatible("reference map is dark".into()));
    }
    let columns: Vec<usize> = (0..sample.cols()).step_by(opts.column_stride).collect();

    let outcomes = opts.exec.try_map_range(columns.len(), |k| -> Result<Outcome> {
        let j = columns[k];
        let signal_nm = sample.wavelength_nm[j];
        let skip = |reason: String| Ok(Outcome::Skip(SkippedColumn { column: j, signal_nm, reason }));
        if col_means[j] < opts.min_envelope * brightest {
            return skip(format!(
                "reference level {:.3} of the brightest column",
                col_means[j] / brightest
            ));
        }
        let ref_model = CrossSectionModel::new(config, signal_nm, angles, 1.0)?;
        let ref_fit = fit_cross_section(&reference.column(j), &ref_model, 1.0, &opts.lm)?;
        let v_ref = (-ref_fit.alpha * gap_mm * 0.1).exp();
        if ref_fit.n_indeterminate || v_ref < opts.min_reference_visibility {
            return skip(format!("reference visibility {v_ref:.3} below threshold"));
        }
        let model = CrossSectionModel::new(config, signal_nm, angles, visible_index)?;
        let fit = fit_cross_section(&sample.column(j), &model, ref_fit.n, &opts.lm)?;
        let lambda_i = model.lambda_i;
        let phase_per_index = 2.0 * PI * gap_mm * 1e6 / lambda_i;
        let shift = (fit.n - ref_fit.n) * phase_per_index;
        let sigma_shift = fit.sigma_n().hypot(ref_fit.sigma_n()) * phase_per_index;
        let (_, near_edge) = fringe_shift_to_index(shift, sigma_shift, lambda_i, gap_mm, 1.0)?;
        Ok(Outcome::Fit(Box::new(ColumnFit {
            column: j,
            signal_nm,
            sample: fit,
            reference: ref_fit,
            fringe_shift: shift,
            near_unwrap_edge: near_edge,
        })))
    })?;

    let lambda_p = config.pump.wavelength_nm;
    let mut fits = Vec::new();
    let mut skipped = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Fit(f) => fits.push(*f),
            Outcome::Skip(s) => skipped.push(s),
        }
    }
    for s in &skipped {
        log::info!("column {} ({:.3} nm) skipped: {}", s.column, s.signal_nm, s.reason);
    }
    // ascending idler wavelength = descending signal wavelength
    fits.reverse();
    let mut out = RetrievedSpectrum::default();
    for f in &fits {
        let lambda_i = idler_wavelength(lambda_p, f.signal_nm)?;
        let (n, _) = fringe_shift_to_index(f.fringe_shift, 0.0, lambda_i, gap_mm, 1.0)?;
        let indeterminate = f.sample.n_indeterminate;
        out.idler_nm.push(lambda_i);
        out.n.push(if indeterminate { f64::NAN } else { n });
        out.sigma_n.push(f.sample.sigma_n().hypot(f.reference.sigma_n()));
        out.alpha.push(f.sample.alpha - f.reference.alpha);
        out.sigma_alpha.push(f.sample.sigma_alpha().hypot(f.reference.sigma_alpha()));
        out.converged.push(f.sample.converged && f.reference.converged);
    }
    out.diagnostics = fits;
    out.skipped = skipped;
    Ok(out)
}

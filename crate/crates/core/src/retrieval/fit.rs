use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2};
use serde::{Deserialize, Serialize};

use super::lm::{levenberg_marquardt, LmOptions};
use crate::error::{invalid, Error, Result};
use crate::interferometer::CrossSectionModel;

/// Fringe contrast below which the phase (and so n) is not trusted.
pub const MIN_PHASE_VISIBILITY: f64 = 0.02;
/// τ floor used to cap α when no fringes survive.
pub const TAU_FLOOR: f64 = 1e-4;
/// The index parameter is fitted as (n − n_init)·1e6.
const INDEX_SCALE: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Idler gap index.
    pub n: f64,
    /// cm⁻¹
    pub alpha: f64,
    /// Nuisance intensity scale.
    pub amplitude: f64,
    /// Covariance of (n, α).
    pub covariance: [[f64; 2]; 2],
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub confidence_level: f64,
    /// Confidence half-widths of (n, α) at `confidence_level`.
    pub half_widths: [f64; 2],
    /// Fringe contrast too low to fix the phase; n is not meaningful.
    pub n_indeterminate: bool,
    pub warnings: Vec<String>,
}

impl FitResult {
    pub fn sigma_n(&self) -> f64 {
        if self.n_indeterminate {
            f64::INFINITY
        } else {
            self.covariance[0][0].max(0.0).sqrt()
        }
    }

    pub fn sigma_alpha(&self) -> f64 {
        self.covariance[1][1].max(0.0).sqrt()
    }
}

/// Linear least-squares fit of A·e + B·e·cos φ₀ + C·e·sin φ₀, with e the
/// envelope and φ₀ the model phase at index `n0`. Returns (A, τ, Δ) where
/// the data's phase is φ₀ + Δ, and the 3×3 covariance of (A, B, C).
fn quadrature_fit(data: &[f64], model: &CrossSectionModel, n0: f64) -> Result<(f64, f64, f64, DMatrix<f64>)> {
    let env = model.envelope();
    let phase = model.phase(n0 - 1.0);
    let m = data.len();
    let a = DMatrix::from_fn(m, 3, |i, j| match j {
        0 => env[i],
        1 => env[i] * phase[i].cos(),
        _ => env[i] * phase[i].sin(),
    });
    let b = DVector::from_column_slice(data);
    let ata = a.transpose() * &a;
    let inv = ata
        .try_inverse()
        .ok_or_else(|| invalid("cross-section does not constrain the fringe quadratures"))?;
    let coef = &inv * a.transpose() * &b;
    let resid = &a * &coef - b;
    let s2 = resid.norm_squared() / (m as f64 - 3.0);
    let (amp, bc, cs) = (coef[0], coef[1], coef[2]);
    if !(amp > 0.0) {
        return Err(invalid("cross-section has no positive signal"));
    }
    let tau = bc.hypot(cs) / amp;
    let delta = (-cs).atan2(bc);
    Ok((amp, tau, delta, inv * s2))
}

/// Fits the absorbing-gap model to one angular cross-section. Free
/// parameters: idler index n, absorption α (cm⁻¹) and an amplitude scale.
///
/// `n0` is the reference index defining the single-fringe window. The start
/// point takes its phase from a quadrature fit inside that window and its α
/// from the fringe contrast. When the contrast is below 2% the index is
/// flagged indeterminate and α comes from the quadrature contrast, capped
/// at −ln(10⁻⁴)/L_m.
pub fn fit_cross_section(
    data: &[f64],
    model: &CrossSectionModel,
    n0: f64,
    opts: &LmOptions,
) -> Result<FitResult> {
    if data.len() != model.len() {
        return Err(Error::Incompatible(format!(
            "cross-section has {} samples, model {}",
            data.len(),
            model.len()
        )));
    }
    let gap_cm = model.gap_mm() * 0.1;
    let alpha_cap = -TAU_FLOOR.ln() / gap_cm;
    let (amp0, tau0, delta, qcov) = quadrature_fit(data, model, n0)?;

    if tau0 < MIN_PHASE_VISIBILITY {
        let alpha = if tau0 <= TAU_FLOOR { alpha_cap } else { (-tau0.ln() / gap_cm).min(alpha_cap) };
        // σ_τ from the (A, B, C) covariance, projected on the fringe amplitude
        let (b, c) = (tau0 * amp0 * delta.cos(), -tau0 * amp0 * delta.sin());
        let r = b.hypot(c).max(f64::MIN_POSITIVE);
        let grad = DVector::from_vec(vec![-tau0 / amp0, b / (r * amp0), c / (r * amp0)]);
        let var_tau = (grad.transpose() * &qcov * &grad)[(0, 0)].max(0.0);
        let sigma_alpha = var_tau.sqrt() / (tau0.max(TAU_FLOOR) * gap_cm);
        return Ok(FitResult {
            n: n0,
            alpha,
            amplitude: amp0,
            covariance: [[f64::INFINITY, 0.0], [0.0, sigma_alpha * sigma_alpha]],
            residual_norm: f64::NAN,
            iterations: 0,
            converged: true,
            confidence_level: opts.confidence_level,
            half_widths: [f64::INFINITY, f64::NAN],
            n_indeterminate: true,
            warnings: vec![format!("fringe contrast {tau0:.4} too low to fix the phase")],
        });
    }

    let n_init = n0 - delta * model.lambda_i / (2.0 * PI * model.gap_mm() * 1e6);
    let alpha_init = (-tau0.min(1.0).ln() / gap_cm).max(0.0);
    let m = data.len();
    let residual = |p: &[f64], r: &mut [f64]| {
        model.eval_into((n_init - 1.0) + p[0] / INDEX_SCALE, p[1], r);
        let scale = amp0 * p[2];
        for (ri, di) in r.iter_mut().zip(data) {
            *ri = scale * *ri - di;
        }
    };
    let lm = levenberg_marquardt(residual, &[0.0, alpha_init, 1.0], m, opts)?;
    let c = &lm.covariance;
    let cov = Matrix2::new(
        c[(0, 0)] / (INDEX_SCALE * INDEX_SCALE),
        c[(0, 1)] / INDEX_SCALE,
        c[(1, 0)] / INDEX_SCALE,
        c[(1, 1)],
    );
    Ok(FitResult {
        n: n_init + lm.params[0] / INDEX_SCALE,
        alpha: lm.params[1],
        amplitude: amp0 * lm.params[2],
        covariance: [[cov[(0, 0)], cov[(0, 1)]], [cov[(1, 0)], cov[(1, 1)]]],
        residual_norm: lm.residual_norm,
        iterations: lm.iterations,
        converged: lm.converged,
        confidence_level: lm.confidence_level,
        half_widths: [lm.half_widths[0] / INDEX_SCALE, lm.half_widths[1]],
        n_indeterminate: false,
        warnings: lm.warnings,
    })
}

/// Index from a fringe shift Δφ = φ_reference − φ_sample (radians):
/// n = n_ref + Δφ·λ_i/(2π·L_m). Also reports whether Δφ ± 2σ reaches the
/// ±π edge of the single-fringe window.
pub fn fringe_shift_to_index(
    delta_phi: f64,
    sigma_phi: f64,
    lambda_i_nm: f64,
    gap_mm: f64,
    n_ref: f64,
) -> Result<(f64, bool)> {
    if !(lambda_i_nm > 0.0 && gap_mm > 0.0) || !delta_phi.is_finite() {
        return Err(invalid("fringe shift needs finite Δφ, λ_i > 0 and L_m > 0"));
    }
    let n = n_ref + delta_phi * lambda_i_nm / (2.0 * PI * gap_mm * 1e6);
    let near_edge = delta_phi.abs() + 2.0 * sigma_phi.abs() >= PI;
    Ok((n, near_edge))
}

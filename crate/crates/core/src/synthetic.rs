//! Synthetic CO₂-like absorber for round-trip runs: a rigid-rotor
//! parallel band (P and R branches, even J only) with Boltzmann line
//! intensities.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::interferometer::{idler_wavelength, GasState, InterferometerConfig, TabulatedGas};
use crate::lineshape::{AbsorptionOptions, LineList, SpectralLine};
use crate::spectrum::uniform_grid;
use crate::units::{nm_to_wavenumber, C2, T_REF_HITRAN};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSpec {
    /// Band origin (cm⁻¹).
    pub nu0: f64,
    /// Rotational constant (cm⁻¹).
    pub b_rot: f64,
    /// Sum of all line intensities at 296 K (cm⁻¹/(molecule·cm⁻²)).
    pub band_strength: f64,
    pub j_max: u32,
    pub gamma_air: f64,
    pub gamma_self: f64,
    pub n_exp: f64,
    pub molar_mass: f64,
}

impl Default for BandSpec {
    /// Roughly the 4.3 µm band of ¹²C¹⁶O₂.
    fn default() -> Self {
        Self {
            nu0: 2349.14,
            b_rot: 0.3902,
            band_strength: 9.5e-17,
            j_max: 100,
            gamma_air: 0.07,
            gamma_self: 0.09,
            n_exp: 0.75,
            molar_mass: 44.0,
        }
    }
}

/// Line list of the band: R(J) at ν₀ + 2B(J+1) and P(J) at ν₀ − 2BJ with
/// weights (J+1) and J times exp(−c₂·BJ(J+1)/296 K), normalized to the band
/// strength.
pub fn co2_like_band(spec: &BandSpec) -> Result<LineList> {
    if !(spec.nu0 > 0.0 && spec.b_rot > 0.0 && spec.band_strength > 0.0) {
        return Err(invalid("band origin, rotational constant and strength must be positive"));
    }
    let mut raw = Vec::new();
    for j in (0..=spec.j_max).step_by(2) {
        let jf = j as f64;
        let e = spec.b_rot * jf * (jf + 1.0);
        let pop = (-C2 * e / T_REF_HITRAN).exp();
        raw.push((spec.nu0 + 2.0 * spec.b_rot * (jf + 1.0), (jf + 1.0) * pop, e));
        if j > 0 {
            raw.push((spec.nu0 - 2.0 * spec.b_rot * jf, jf * pop, e));
        }
    }
    let total: f64 = raw.iter().map(|r| r.1).sum();
    let lines = raw
        .into_iter()
        .map(|(nu0, w, e)| SpectralLine {
            nu0,
            intensity: spec.band_strength * w / total,
            gamma_self: spec.gamma_self,
            gamma_air: spec.gamma_air,
            n_exp: spec.n_exp,
            e_lower: e,
        })
        .collect();
    LineList::new("CO2-like", spec.molar_mass, lines)
}

/// Spectral resolution FWHM in idler wavenumber (cm⁻¹) for a resolution of
/// `fwhm_nm` in signal wavelength at `signal_nm`: Δν = Δλ·10⁷/λ².
pub fn signal_resolution_to_wavenumber(fwhm_nm: f64, signal_nm: f64) -> f64 {
    fwhm_nm * 1e7 / (signal_nm * signal_nm)
}

/// Tabulates `gas` over the idler band of `config` plus `padding_cm1` on
/// each side, on a uniform grid of `step_cm1`, as seen through the
/// detector's spectral resolution.
pub fn gas_for_detector(
    gas: &GasState,
    config: &InterferometerConfig,
    padding_cm1: f64,
    step_cm1: f64,
) -> Result<TabulatedGas> {
    if !(padding_cm1 >= 0.0 && step_cm1 > 0.0) {
        return Err(invalid("padding must be >= 0 and step > 0"));
    }
    let lp = config.pump.wavelength_nm;
    let (lo, hi) = config.detector.wavelength_span_nm;
    let nu_a = nm_to_wavenumber(idler_wavelength(lp, hi)?);
    let nu_b = nm_to_wavenumber(idler_wavelength(lp, lo)?);
    let start = nu_a.min(nu_b) - padding_cm1;
    let count = ((nu_a.max(nu_b) + padding_cm1 - start) / step_cm1).ceil() as usize + 1;
    let grid = uniform_grid(start, step_cm1, count);
    let fwhm = signal_resolution_to_wavenumber(config.detector.resolution_fwhm_nm, 0.5 * (lo + hi));
    gas.tabulate(&grid, &AbsorptionOptions::with_resolution(fwhm))
}

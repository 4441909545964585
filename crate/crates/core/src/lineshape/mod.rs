//! Gas absorption from a line list: Doppler and collisional widths, Voigt
//! profiles, line-by-line absorption spectra, and line-list readers.

mod hitran;
mod linecsv;
mod voigt;

pub use hitran::{format_hitran_record, parse_hitran_file, parse_hitran_record, HitranRecord};
pub use linecsv::{parse_line_csv, write_line_csv};
pub use voigt::{faddeeva, voigt_profile, VoigtProfile};

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::units::{self, ATM_TORR, C2, T_REF_HITRAN};

/// One absorption line, HITRAN conventions at 296 K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralLine {
    /// cm⁻¹
    pub nu0: f64,
    /// cm⁻¹/(molecule·cm⁻²)
    pub intensity: f64,
    /// cm⁻¹/atm HWHM
    pub gamma_self: f64,
    /// cm⁻¹/atm HWHM
    pub gamma_air: f64,
    pub n_exp: f64,
    /// cm⁻¹
    pub e_lower: f64,
}

impl SpectralLine {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu0 > 0.0) {
            return Err(invalid(format!("line center {} must be positive", self.nu0)));
        }
        if !(self.intensity >= 0.0 && self.gamma_self >= 0.0 && self.gamma_air >= 0.0) {
            return Err(invalid(format!(
                "line at {} cm⁻¹: intensity and widths must be non-negative",
                self.nu0
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineList {
    pub molecule: String,
    /// g/mol
    pub molar_mass: f64,
    lines: Vec<SpectralLine>,
}

impl LineList {
    /// Validates every line and sorts by center.
    pub fn new(molecule: impl Into<String>, molar_mass: f64, mut lines: Vec<SpectralLine>) -> Result<Self> {
        if !(molar_mass > 0.0) {
            return Err(invalid(format!("molar mass {molar_mass} must be positive")));
        }
        for l in &lines {
            l.validate()?;
        }
        lines.sort_by(|a, b| a.nu0.total_cmp(&b.nu0));
        Ok(Self {
            molecule: molecule.into(),
            molar_mass,
            lines,
        })
    }

    pub fn empty(molecule: impl Into<String>, molar_mass: f64) -> Self {
        Self::new(molecule, molar_mass, Vec::new()).expect("empty list is valid")
    }

    pub fn lines(&self) -> &[SpectralLine] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Concatenation of two lists (same molecule assumed), re-sorted.
    pub fn concat(&self, other: &LineList) -> LineList {
        let mut lines = self.lines.clone();
        lines.extend_from_slice(&other.lines);
        LineList::new(self.molecule.clone(), self.molar_mass, lines).expect("inputs already valid")
    }
}

/// Doppler HWHM in cm⁻¹: (ν₀/c)·√(2 ln2 · k_B T / m).
pub fn doppler_halfwidth(nu0: f64, temperature_k: f64, molar_mass: f64) -> Result<f64> {
    if !(nu0 > 0.0 && temperature_k > 0.0 && molar_mass > 0.0) {
        return Err(invalid(format!(
            "Doppler width needs positive ν₀, T, M (got {nu0}, {temperature_k}, {molar_mass})"
        )));
    }
    let m = molar_mass * units::ATOMIC_MASS_UNIT;
    Ok(nu0 / units::SPEED_OF_LIGHT * (2.0 * LN_2 * units::BOLTZMANN * temperature_k / m).sqrt())
}

/// Collisional HWHM in cm⁻¹ at pressure `pressure_torr` with self mole
/// fraction `x_self`.
pub fn lorentz_halfwidth(line: &SpectralLine, pressure_torr: f64, x_self: f64, temperature_k: f64) -> Result<f64> {
    if pressure_torr < 0.0 || !(0.0..=1.0).contains(&x_self) || !(temperature_k > 0.0) {
        return Err(invalid(format!(
            "Lorentz width needs P >= 0, x in [0,1], T > 0 (got {pressure_torr}, {x_self}, {temperature_k})"
        )));
    }
    let gamma = x_self * line.gamma_self + (1.0 - x_self) * line.gamma_air;
    Ok(pressure_torr / ATM_TORR * (T_REF_HITRAN / temperature_k).powf(line.n_exp) * gamma)
}

/// Line intensity at temperature `t` from its 296 K value. `q_ratio` is
/// Q(296 K)/Q(T); 1 is exact only at 296 K.
pub fn intensity_at(line: &SpectralLine, t: f64, q_ratio: f64) -> f64 {
    let tr = T_REF_HITRAN;
    let boltzmann = (-C2 * line.e_lower / t).exp() / (-C2 * line.e_lower / tr).exp();
    let stimulated = (1.0 - (-C2 * line.nu0 / t).exp()) / (1.0 - (-C2 * line.nu0 / tr).exp());
    line.intensity * q_ratio * boltzmann * stimulated
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorptionOptions {
    /// Profiles are summed only within this distance of each center (cm⁻¹).
    pub wing_cutoff: f64,
    /// Mole fraction of the absorber.
    pub mole_fraction: f64,
    /// Q(296 K)/Q(T)
    pub partition_ratio: f64,
    /// Extra Gaussian HWHM (cm⁻¹) added in quadrature to every Doppler width.
    /// Convolving a Voigt with a Gaussian is again a Voigt, so this yields
    /// the spectrum seen through a Gaussian spectral resolution exactly.
    pub resolution_hwhm: f64,
    pub exec: Execution,
}

impl Default for AbsorptionOptions {
    fn default() -> Self {
        Self {
            wing_cutoff: 25.0,
            mole_fraction: 1.0,
            partition_ratio: 1.0,
            resolution_hwhm: 0.0,
            exec: Execution::default(),
        }
    }
}

impl AbsorptionOptions {
    /// Options for a spectrum seen at Gaussian resolution `fwhm` (cm⁻¹).
    /// The wing cutoff grows so the widened Gaussian core is never clipped.
    pub fn with_resolution(fwhm: f64) -> Self {
        let hwhm = fwhm / 2.0;
        Self {
            resolution_hwhm: hwhm,
            wing_cutoff: 25.0 + 5.0 * fwhm,
            ..Self::default()
        }
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Grid("wavenumber grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Absorption coefficient α(ν) in cm⁻¹ (Bouguer, intensity convention) on
/// `grid` (cm⁻¹): α = N·Σⱼ Sⱼ(T)·φⱼ(ν).
pub fn absorption_spectrum(
    list: &LineList,
    grid: &[f64],
    pressure_torr: f64,
    temperature_k: f64,
    opts: &AbsorptionOptions,
) -> Result<Vec<f64>> {
    check_grid(grid)?;
    if pressure_torr < 0.0 {
        return Err(invalid(format!("negative pressure {pressure_torr} Torr")));
    }
    if !(temperature_k > 0.0) {
        return Err(invalid(format!("temperature {temperature_k} K must be positive")));
    }
    let mut alpha = vec![0.0; grid.len()];
    if list.is_empty() || grid.is_empty() || pressure_torr == 0.0 {
        return Ok(alpha);
    }
    let density = units::number_density(pressure_torr * opts.mole_fraction, temperature_k);
    let lines = list.lines();
    let contributions = opts.exec.try_map_range(lines.len(), |j| -> Result<(usize, Vec<f64>)> {
        let line = &lines[j];
        let lo = grid.partition_point(|&v| v < line.nu0 - opts.wing_cutoff);
        let hi = grid.partition_point(|&v| v <= line.nu0 + opts.wing_cutoff);
        if lo >= hi {
            return Ok((lo, Vec::new()));
        }
        let gd = doppler_halfwidth(line.nu0, temperature_k, list.molar_mass)?;
        let gd = (gd * gd + opts.resolution_hwhm * opts.resolution_hwhm).sqrt();
        let gl = lorentz_halfwidth(line, pressure_torr, opts.mole_fraction, temperature_k)?;
        let profile = VoigtProfile::new(gd, gl)?;
        let s = density * intensity_at(line, temperature_k, opts.partition_ratio);
        Ok((lo, grid[lo..hi].iter().map(|&v| s * profile.eval(v - line.nu0)).collect()))
    })?;
    for (start, values) in contributions {
        for (a, v) in alpha[start..].iter_mut().zip(values) {
            *a += v;
        }
    }
    Ok(alpha)
}

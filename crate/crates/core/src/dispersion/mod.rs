//! Refractive-index models: Sellmeier-type crystal dispersion, the
//! uniaxial extraordinary index, the gas pressure law, and wavevectors.

mod coeffs;

pub use coeffs::{parse_crystal_file, parse_model_file, CrystalFile};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Functional form of a dispersion model, λ in µm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DispersionForm {
    /// n² = a + Σ bₖ·λ²/(λ² − cₖ)
    Sellmeier { a: f64, terms: Vec<[f64; 2]> },
    /// n² = a + Σ bₖ/(λ² − cₖ) − d·λ²
    Pole { a: f64, terms: Vec<[f64; 2]>, d: f64 },
    /// Wavelength-independent index. Used for test fixtures.
    Constant { n: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SellmeierModel {
    pub form: DispersionForm,
    /// Validity range in µm, inclusive.
    pub valid_um: (f64, f64),
}

impl SellmeierModel {
    pub fn new(form: DispersionForm, valid_um: (f64, f64)) -> Result<Self> {
        if !(valid_um.0 > 0.0 && valid_um.1 > valid_um.0) {
            return Err(invalid(format!(
                "validity range {valid_um:?} must be increasing and positive"
            )));
        }
        if let DispersionForm::Constant { n } = form {
            if !(n > 1.0) {
                return Err(invalid(format!("constant index {n} must exceed 1")));
            }
        }
        Ok(Self { form, valid_um })
    }

    pub fn constant(n: f64, valid_um: (f64, f64)) -> Result<Self> {
        Self::new(DispersionForm::Constant { n }, valid_um)
    }

    pub fn contains(&self, wavelength_um: f64) -> bool {
        wavelength_um >= self.valid_um.0 && wavelength_um <= self.valid_um.1
    }

    /// Refractive index at `wavelength_um`. Never extrapolates.
    pub fn index(&self, wavelength_um: f64) -> Result<f64> {
        if !self.contains(wavelength_um) {
            return Err(Error::OutOfRange {
                wavelength_um,
                min_um: self.valid_um.0,
                max_um: self.valid_um.1,
            });
        }
        let l2 = wavelength_um * wavelength_um;
        let n2 = match &self.form {
            DispersionForm::Sellmeier { a, terms } => {
                a + terms.iter().map(|[b, c]| b * l2 / (l2 - c)).sum::<f64>()
            }
            DispersionForm::Pole { a, terms, d } => {
                a + terms.iter().map(|[b, c]| b / (l2 - c)).sum::<f64>() - d * l2
            }
            DispersionForm::Constant { n } => return Ok(*n),
        };
        if !(n2 > 1.0) {
            return Err(Error::Coefficients(format!(
                "model yields n² = {n2} at {wavelength_um} µm"
            )));
        }
        Ok(n2.sqrt())
    }
}

/// Uniaxial crystal: ordinary and extraordinary models plus the optic-axis
/// cut angle (radians, in (0, π/2]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniaxialCrystalIndex {
    pub ordinary: SellmeierModel,
    pub extraordinary: SellmeierModel,
    pub cut_angle: f64,
}

impl UniaxialCrystalIndex {
    pub fn new(
        ordinary: SellmeierModel,
        extraordinary: SellmeierModel,
        cut_angle: f64,
    ) -> Result<Self> {
        if !(cut_angle > 0.0 && cut_angle <= PI / 2.0) {
            return Err(invalid(format!(
                "cut angle {cut_angle} rad outside (0, π/2]"
            )));
        }
        Ok(Self {
            ordinary,
            extraordinary,
            cut_angle,
        })
    }

    pub fn ordinary_index(&self, wavelength_um: f64) -> Result<f64> {
        self.ordinary.index(wavelength_um)
    }
}

/// Extraordinary-wave index for propagation at `axis_angle` to the optic
/// axis: 1/n² = cos²θ/n_o² + sin²θ/n_e².
pub fn uniaxial_index(
    crystal: &UniaxialCrystalIndex,
    wavelength_um: f64,
    axis_angle: f64,
) -> Result<f64> {
    let no = crystal.ordinary.index(wavelength_um)?;
    let ne = crystal.extraordinary.index(wavelength_um)?;
    let (s, c) = axis_angle.sin_cos();
    Ok(1.0 / (c * c / (no * no) + s * s / (ne * ne)).sqrt())
}

/// Bundled 5% MgO:LiNbO₃ coefficients (TOML text).
pub const MGO_LINBO3_TOML: &str = include_str!("../../data/mgo_linbo3.toml");

/// The bundled MgO:LiNbO₃ model with optic-axis cut `cut_angle` (radians).
pub fn mgo_linbo3(cut_angle: f64) -> Result<UniaxialCrystalIndex> {
    let file = parse_crystal_file(MGO_LINBO3_TOML)?;
    UniaxialCrystalIndex::new(file.ordinary, file.extraordinary, cut_angle)
}

/// Gas index at a reference state; scaled linearly in number density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasIndexModel {
    pub n0: f64,
    pub p0_torr: f64,
    pub t0_k: f64,
}

impl GasIndexModel {
    pub fn new(n0: f64, p0_torr: f64, t0_k: f64) -> Result<Self> {
        if !(n0 > 1.0 && p0_torr > 0.0 && t0_k > 0.0) {
            return Err(invalid(format!(
                "gas index model needs n0 > 1, P0 > 0, T0 > 0 (got {n0}, {p0_torr}, {t0_k})"
            )));
        }
        Ok(Self { n0, p0_torr, t0_k })
    }
}

/// n(P, T) = 1 + P(n₀ − 1) / (P₀(1 + (T − T₀)/T₀)).
pub fn gas_index(model: &GasIndexModel, pressure_torr: f64, temperature_k: f64) -> Result<f64> {
    if pressure_torr < 0.0 || !pressure_torr.is_finite() {
        return Err(invalid(format!("negative pressure {pressure_torr} Torr")));
    }
    if !(temperature_k > 0.0) {
        return Err(invalid(format!("temperature {temperature_k} K must be positive")));
    }
    let t_factor = 1.0 + (temperature_k - model.t0_k) / model.t0_k;
    Ok(1.0 + pressure_torr * (model.n0 - 1.0) / (model.p0_torr * t_factor))
}

/// k = 2πn/λ, in inverse units of `wavelength`.
pub fn wavevector(n: f64, wavelength: f64) -> Result<f64> {
    if !(n >= 1.0) || !(wavelength > 0.0) {
        return Err(invalid(format!(
            "wavevector needs n >= 1 and λ > 0 (got n = {n}, λ = {wavelength})"
        )));
    }
    Ok(2.0 * PI * n / wavelength)
}

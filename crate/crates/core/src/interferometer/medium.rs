//! What fills the gap between the crystals.

use serde::Serialize;
use serde_json::json;

use crate::dispersion::{gas_index, GasIndexModel};
use crate::error::{invalid, Error, Result};
use crate::kk::kk_index_from_absorption_with;
use crate::lineshape::{absorption_spectrum, AbsorptionOptions, LineList};
use crate::spectrum::interp_linear;
use crate::units::nm_to_wavenumber;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdlerProperties {
    pub n: f64,
    pub alpha_cm1: f64,
}

/// Gap contents as seen by the three beams. The visible index applies to
/// both pump and signal.
pub trait GapMedium: Sync {
    fn idler(&self, lambda_i_nm: f64) -> Result<IdlerProperties>;
    fn visible_index(&self) -> f64;
    /// Short record stored in map metadata.
    fn describe(&self) -> serde_json::Value;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Vacuum;

impl GapMedium for Vacuum {
    fn idler(&self, _: f64) -> Result<IdlerProperties> {
        Ok(IdlerProperties { n: 1.0, alpha_cm1: 0.0 })
    }

    fn visible_index(&self) -> f64 {
        1.0
    }

    fn describe(&self) -> serde_json::Value {
        json!({ "kind": "vacuum" })
    }
}

/// Wavelength-independent idler index and absorption.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformMedium {
    pub idler_index: f64,
    pub alpha_cm1: f64,
    pub visible_index: f64,
}

impl UniformMedium {
    pub fn new(idler_index: f64, alpha_cm1: f64, visible_index: f64) -> Result<Self> {
        if !(idler_index >= 1.0 && visible_index >= 1.0) {
            return Err(invalid("gap indices must be >= 1"));
        }
        if !(alpha_cm1 >= 0.0) {
            return Err(invalid(format!("absorption {alpha_cm1} cm⁻¹ must be non-negative")));
        }
        Ok(Self {
            idler_index,
            alpha_cm1,
            visible_index,
        })
    }
}

impl GapMedium for UniformMedium {
    fn idler(&self, _: f64) -> Result<IdlerProperties> {
        Ok(IdlerProperties {
            n: self.idler_index,
            alpha_cm1: self.alpha_cm1,
        })
    }

    fn visible_index(&self) -> f64 {
        self.visible_index
    }

    fn describe(&self) -> serde_json::Value {
        json!({ "kind": "uniform", "idler_index": self.idler_index,
                "alpha_cm1": self.alpha_cm1, "visible_index": self.visible_index })
    }
}

/// Idler index and absorption tabulated on an increasing wavenumber grid,
/// linearly interpolated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TabulatedGas {
    pub wavenumber_cm1: Vec<f64>,
    pub n_minus_1: Vec<f64>,
    pub alpha_cm1: Vec<f64>,
    pub visible_index: f64,
    pub label: serde_json::Value,
}

impl TabulatedGas {
    pub fn new(
        wavenumber_cm1: Vec<f64>,
        n_minus_1: Vec<f64>,
        alpha_cm1: Vec<f64>,
        visible_index: f64,
    ) -> Result<Self> {
        let m = wavenumber_cm1.len();
        if m < 2 || n_minus_1.len() != m || alpha_cm1.len() != m {
            return Err(Error::Grid(format!(
                "gas table needs >= 2 points and equal lengths (got {m}, {}, {})",
                n_minus_1.len(),
                alpha_cm1.len()
            )));
        }
        if wavenumber_cm1.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Grid("gas table wavenumbers must increase".into()));
        }
        if !(visible_index >= 1.0) {
            return Err(invalid("visible gap index must be >= 1"));
        }
        Ok(Self {
            wavenumber_cm1,
            n_minus_1,
            alpha_cm1,
            visible_index,
            label: json!({ "kind": "tabulated" }),
        })
    }
}

impl GapMedium for TabulatedGas {
    fn idler(&self, lambda_i_nm: f64) -> Result<IdlerProperties> {
        let nu = nm_to_wavenumber(lambda_i_nm);
        let undefined = || {
            invalid(format!(
                "gas table [{}, {}] cm⁻¹ does not cover idler {nu:.4} cm⁻¹",
                self.wavenumber_cm1[0],
                self.wavenumber_cm1[self.wavenumber_cm1.len() - 1]
            ))
        };
        let nm1 = interp_linear(&self.wavenumber_cm1, &self.n_minus_1, nu).ok_or_else(undefined)?;
        let alpha = interp_linear(&self.wavenumber_cm1, &self.alpha_cm1, nu).ok_or_else(undefined)?;
        Ok(IdlerProperties {
            n: 1.0 + nm1,
            alpha_cm1: alpha.max(0.0),
        })
    }

    fn visible_index(&self) -> f64 {
        self.visible_index
    }

    fn describe(&self) -> serde_json::Value {
        self.label.clone()
    }
}

/// A line-list gas at a given pressure and temperature.
#[derive(Debug, Clone)]
pub struct GasState {
    pub lines: LineList,
    pub pressure_torr: f64,
    pub temperature_k: f64,
    /// Non-resonant index; sets the visible gap index and the idler
    /// baseline under the absorption band.
    pub index_model: GasIndexModel,
}

impl GasState {
    /// α from the line list on the uniform `grid` (cm⁻¹) and n − 1 as the
    /// non-resonant baseline plus the KK transform of α.
    pub fn tabulate(&self, grid: &[f64], opts: &AbsorptionOptions) -> Result<TabulatedGas> {
        let alpha = absorption_spectrum(&self.lines, grid, self.pressure_torr, self.temperature_k, opts)?;
        let n = gas_index(&self.index_model, self.pressure_torr, self.temperature_k)?;
        let kk = kk_index_from_absorption_with(&alpha, grid, n - 1.0, opts.exec)?;
        for w in &kk.warnings {
            log::warn!("gas table: {w}");
        }
        let mut gas = TabulatedGas::new(grid.to_vec(), kk.spectrum.n_minus_1, alpha, n)?;
        gas.label = json!({
            "kind": "line_list",
            "molecule": self.lines.molecule,
            "lines": self.lines.len(),
            "pressure_torr": self.pressure_torr,
            "temperature_k": self.temperature_k,
            "resolution_hwhm_cm1": opts.resolution_hwhm,
            "grid_cm1": [grid[0], grid[grid.len() - 1], grid.len()],
        });
        Ok(gas)
    }
}

//! Run configuration (TOML). Every physical key carries its unit in the
//! name; unknown keys are rejected. Relative paths are resolved against
//! the config file's directory.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use nlinterf::dispersion::{
    gas_index, mgo_linbo3, parse_crystal_file, GasIndexModel, UniaxialCrystalIndex,
};
use nlinterf::interferometer::{
    phase_matching_angle, DetectorSpec, GasState, Geometry, InterferometerConfig, NoiseModel, PumpSpec,
};
use nlinterf::lineshape::{parse_hitran_file, parse_line_csv, LineList};
use nlinterf::synthetic::{co2_like_band, BandSpec};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub pump: PumpSection,
    pub crystal: CrystalSection,
    pub geometry: GeometrySection,
    pub detector: DetectorSection,
    pub gas: Option<GasSection>,
    #[serde(skip)]
    base_dir: PathBuf,
}

fn default_seed() -> u64 {
    1
}

fn default_output_dir() -> PathBuf {
    PathBuf::from(".")
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSection {
    pub wavelength_nm: f64,
    pub waist_mm: f64,
    /// Pump angle to the optic axis. When absent it is phase-matched for
    /// `phase_match_idler_nm`.
    pub axis_angle_deg: Option<f64>,
    pub phase_match_idler_nm: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalSection {
    pub cut_angle_deg: f64,
    /// Crystal coefficient file; the bundled MgO:LiNbO₃ model when absent.
    pub coefficients_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub crystal_length_mm: f64,
    pub gap_length_mm: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSection {
    pub focal_length_mm: f64,
    pub pixel_pitch_um: f64,
    pub angle_pixels: usize,
    pub wavelength_pixels: usize,
    pub wavelength_min_nm: f64,
    pub wavelength_max_nm: f64,
    pub resolution_fwhm_nm: f64,
    pub mean_counts: f64,
    #[serde(default)]
    pub read_noise_counts: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineSource {
    /// `line_list` names a HITRAN `.par` or CSV file.
    File,
    /// Built-in CO₂-like 4.3 µm band.
    Co2Like,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasSection {
    pub source: LineSource,
    pub line_list: Option<PathBuf>,
    pub pressure_torr: f64,
    pub temperature_k: f64,
    /// Visible-range index n₀ at the reference state below.
    pub index_at_reference: f64,
    pub reference_pressure_torr: f64,
    pub reference_temperature_k: f64,
    #[serde(default = "default_padding")]
    pub grid_padding_cm1: f64,
    #[serde(default = "default_step")]
    pub grid_step_cm1: f64,
}

fn default_padding() -> f64 {
    150.0
}

fn default_step() -> f64 {
    0.05
}

fn positive(key: &str, v: f64) -> CliResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{key}: must be positive, got {v}")))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        let mut cfg = Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.output_dir)
    }

    fn validate(&self) -> CliResult<()> {
        let p = &self.pump;
        positive("pump.wavelength_nm", p.wavelength_nm)?;
        positive("pump.waist_mm", p.waist_mm)?;
        match (p.axis_angle_deg, p.phase_match_idler_nm) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "pump: give either axis_angle_deg or phase_match_idler_nm, not both".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Config(
                    "pump: one of axis_angle_deg or phase_match_idler_nm is required".into(),
                ))
            }
            (Some(a), None) if !(0.0..=90.0).contains(&a) => {
                return Err(CliError::Config(format!("pump.axis_angle_deg: {a} outside [0, 90]")))
            }
            (None, Some(l)) => positive("pump.phase_match_idler_nm", l)?,
            _ => {}
        }
        let c = self.crystal.cut_angle_deg;
        if !(c > 0.0 && c <= 90.0) {
            return Err(CliError::Config(format!("crystal.cut_angle_deg: {c} outside (0, 90]")));
        }
        positive("geometry.crystal_length_mm", self.geometry.crystal_length_mm)?;
        positive("geometry.gap_length_mm", self.geometry.gap_length_mm)?;
        let d = &self.detector;
        positive("detector.focal_length_mm", d.focal_length_mm)?;
        positive("detector.pixel_pitch_um", d.pixel_pitch_um)?;
        positive("detector.wavelength_min_nm", d.wavelength_min_nm)?;
        positive("detector.mean_counts", d.mean_counts)?;
        if d.angle_pixels < 2 || d.wavelength_pixels < 1 {
            return Err(CliError::Config("detector: need at least 2 angle pixels and 1 wavelength pixel".into()));
        }
        if !(d.wavelength_max_nm >= d.wavelength_min_nm) {
            return Err(CliError::Config("detector.wavelength_max_nm: below wavelength_min_nm".into()));
        }
        if !(d.resolution_fwhm_nm >= 0.0) {
            return Err(CliError::Config("detector.resolution_fwhm_nm: must be >= 0".into()));
        }
        if !(d.read_noise_counts >= 0.0) {
            return Err(CliError::Config("detector.read_noise_counts: must be >= 0".into()));
        }
        if let Some(g) = &self.gas {
            if !(g.pressure_torr >= 0.0) {
                return Err(CliError::Config(format!("gas.pressure_torr: {} must be >= 0", g.pressure_torr)));
            }
            positive("gas.temperature_k", g.temperature_k)?;
            positive("gas.reference_pressure_torr", g.reference_pressure_torr)?;
            positive("gas.reference_temperature_k", g.reference_temperature_k)?;
            positive("gas.grid_step_cm1", g.grid_step_cm1)?;
            if !(g.grid_padding_cm1 >= 0.0) {
                return Err(CliError::Config("gas.grid_padding_cm1: must be >= 0".into()));
            }
            if !(g.index_at_reference >= 1.0) {
                return Err(CliError::Config("gas.index_at_reference: must be >= 1".into()));
            }
            match (g.source, &g.line_list) {
                (LineSource::File, None) => {
                    return Err(CliError::Config("gas.line_list: required when source = \"file\"".into()))
                }
                (LineSource::Co2Like, Some(_)) => {
                    return Err(CliError::Config("gas.line_list: not used with source = \"co2-like\"".into()))
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn crystal_model(&self) -> CliResult<UniaxialCrystalIndex> {
        let cut = self.crystal.cut_angle_deg.to_radians();
        match &self.crystal.coefficients_file {
            None => mgo_linbo3(cut).map_err(CliError::compute("crystal")),
            Some(f) => {
                let path = self.resolve(f);
                let text = std::fs::read_to_string(&path).map_err(CliError::io(&path))?;
                let file = parse_crystal_file(&text)
                    .map_err(|e| CliError::Config(format!("crystal.coefficients_file {}: {e}", path.display())))?;
                UniaxialCrystalIndex::new(file.ordinary, file.extraordinary, cut).map_err(CliError::compute("crystal"))
            }
        }
    }

    pub fn interferometer(&self) -> CliResult<InterferometerConfig> {
        let crystal = self.crystal_model()?;
        let p = &self.pump;
        let axis = match (p.axis_angle_deg, p.phase_match_idler_nm) {
            (Some(a), _) => a.to_radians(),
            (None, Some(li)) => phase_matching_angle(&crystal, p.wavelength_nm, li)
                .map_err(CliError::compute("pump.phase_match_idler_nm"))?,
            (None, None) => unreachable!("validated"),
        };
        let d = &self.detector;
        let config = InterferometerConfig {
            pump: PumpSpec::new(p.wavelength_nm, p.waist_mm, axis).map_err(CliError::compute("pump"))?,
            crystal,
            geometry: Geometry::new(self.geometry.crystal_length_mm, self.geometry.gap_length_mm)
                .map_err(CliError::compute("geometry"))?,
            detector: DetectorSpec {
                focal_mm: d.focal_length_mm,
                pitch_um: d.pixel_pitch_um,
                angle_pixels: d.angle_pixels,
                wavelength_pixels: d.wavelength_pixels,
                wavelength_span_nm: (d.wavelength_min_nm, d.wavelength_max_nm),
                resolution_fwhm_nm: d.resolution_fwhm_nm,
                noise: NoiseModel { mean_counts: d.mean_counts, read_noise: d.read_noise_counts },
            },
        };
        config.validate().map_err(CliError::compute("config"))?;
        Ok(config)
    }

    pub fn gas_section(&self) -> CliResult<&GasSection> {
        self.gas.as_ref().ok_or_else(|| CliError::Config("[gas] section is required for this run".into()))
    }

    pub fn gas(&self) -> CliResult<GasState> {
        let g = self.gas_section()?;
        let lines = match g.source {
            LineSource::Co2Like => co2_like_band(&BandSpec::default()).map_err(CliError::compute("gas"))?,
            LineSource::File => load_lines(&self.resolve(g.line_list.as_ref().expect("validated")))?,
        };
        Ok(GasState {
            lines,
            pressure_torr: g.pressure_torr,
            temperature_k: g.temperature_k,
            index_model: self.index_model(g)?,
        })
    }

    fn index_model(&self, g: &GasSection) -> CliResult<GasIndexModel> {
        GasIndexModel::new(g.index_at_reference, g.reference_pressure_torr, g.reference_temperature_k)
            .map_err(CliError::compute("gas"))
    }

    /// Visible-range index of the gap gas, 1 without a `[gas]` section.
    pub fn visible_index(&self) -> CliResult<f64> {
        match &self.gas {
            None => Ok(1.0),
            Some(g) => gas_index(&self.index_model(g)?, g.pressure_torr, g.temperature_k)
                .map_err(CliError::compute("gas")),
        }
    }
}

/// HITRAN `.par` by extension, CSV otherwise. Parse warnings go to the log.
pub fn load_lines(path: &Path) -> CliResult<LineList> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    let is_par = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("par"));
    let (list, warnings) =
        if is_par { parse_hitran_file(&text) } else { parse_line_csv(&text) }.map_err(CliError::data(path))?;
    for w in warnings {
        log::warn!("{}: {w}", path.display());
    }
    Ok(list)
}

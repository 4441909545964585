#![allow(dead_code)]

use nlinterf::dispersion::{mgo_linbo3, GasIndexModel};
use nlinterf::interferometer::{
    phase_matching_angle, DetectorSpec, GasState, Geometry, InterferometerConfig, NoiseModel, PumpSpec,
};
use nlinterf::synthetic::{co2_like_band, BandSpec};

/// Detector resolution used for the synthetic CO₂ runs (signal nm FWHM).
pub const RESOLUTION_NM: f64 = 0.75;

/// Methods geometry: 532 nm pump, 2 mm waist, 0.5 mm crystals 25 mm apart,
/// 50° cut, f = 500 mm, 13 µm pixels.
pub fn reference_config(angle_pixels: usize, wavelength_pixels: usize, counts: f64) -> InterferometerConfig {
    let crystal = mgo_linbo3(50f64.to_radians()).unwrap();
    let axis = phase_matching_angle(&crystal, 532.0, 4260.0).unwrap();
    InterferometerConfig {
        pump: PumpSpec::new(532.0, 2.0, axis).unwrap(),
        crystal,
        geometry: Geometry::new(0.5, 25.0).unwrap(),
        detector: DetectorSpec {
            focal_mm: 500.0,
            pitch_um: 13.0,
            angle_pixels,
            wavelength_pixels,
            wavelength_span_nm: (602.0, 612.0),
            resolution_fwhm_nm: RESOLUTION_NM,
            noise: NoiseModel { mean_counts: counts, read_noise: 0.0 },
        },
    }
}

/// CO₂-like band in pure gas at `pressure_torr`, 296 K.
pub fn co2(pressure_torr: f64) -> GasState {
    GasState {
        lines: co2_like_band(&BandSpec::default()).unwrap(),
        pressure_torr,
        temperature_k: 296.0,
        index_model: GasIndexModel::new(1.000449, 760.0, 296.0).unwrap(),
    }
}

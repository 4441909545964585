//! Forward model of the signal-photon angle/wavelength intensity map.
//!
//! Angles are external (detector side, after the lens) unless named
//! `*_int`. Wavelengths are in nm, lengths in mm, α in cm⁻¹. The pump is
//! collinear and extraordinary; signal and idler are ordinary (type I).
//! Transverse momentum q = 2πθ/λ_s is conserved across every interface,
//! and the idler carries −q, so in a medium of wavevector k each photon
//! travels at q/k to the axis.

mod instrument;
mod mapfile;
mod medium;
mod noise;

pub use instrument::apply_instrument;
pub use mapfile::{InterferogramMap, MapMetadata, PgmScale};
pub use medium::{GapMedium, GasState, IdlerProperties, TabulatedGas, UniformMedium, Vacuum};
pub use noise::add_noise;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dispersion::{uniaxial_index, UniaxialCrystalIndex};
use crate::error::{invalid, Result};
use crate::exec::Execution;
use crate::units::NM_PER_MM;

/// Largest |θ| (radians) accepted as paraxial.
pub const PARAXIAL_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpSpec {
    pub wavelength_nm: f64,
    /// Beam waist a (mm).
    pub waist_mm: f64,
    /// Propagation angle to the optic axis (radians).
    pub axis_angle: f64,
}

impl PumpSpec {
    pub fn new(wavelength_nm: f64, waist_mm: f64, axis_angle: f64) -> Result<Self> {
        if !(wavelength_nm > 0.0 && waist_mm > 0.0) {
            return Err(invalid(format!(
                "pump wavelength and waist must be positive (got {wavelength_nm} nm, {waist_mm} mm)"
            )));
        }
        if !(axis_angle > 0.0 && axis_angle <= PI / 2.0) {
            return Err(invalid(format!("pump axis angle {axis_angle} rad outside (0, π/2]")));
        }
        Ok(Self {
            wavelength_nm,
            waist_mm,
            axis_angle,
        })
    }

    /// a ≥ 10·L_m·θ_max, the working form of a ≫ L_m·max(θ_s, θ_i).
    pub fn quasi_collinear(&self, geometry: &Geometry, theta_max: f64) -> bool {
        self.waist_mm >= 10.0 * geometry.gap_mm * theta_max.abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    /// Crystal thickness L (mm).
    pub crystal_mm: f64,
    /// Gap length L_m (mm).
    pub gap_mm: f64,
}

impl Geometry {
    pub fn new(crystal_mm: f64, gap_mm: f64) -> Result<Self> {
        if !(crystal_mm > 0.0 && gap_mm > 0.0) {
            return Err(invalid(format!(
                "crystal thickness and gap must be positive (got {crystal_mm} mm, {gap_mm} mm)"
            )));
        }
        Ok(Self { crystal_mm, gap_mm })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Mean photon counts for unit intensity.
    pub mean_counts: f64,
    /// Gaussian read-noise σ in counts.
    pub read_noise: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorSpec {
    pub focal_mm: f64,
    pub pitch_um: f64,
    pub angle_pixels: usize,
    pub wavelength_pixels: usize,
    /// Signal wavelength of the first and last column (nm).
    pub wavelength_span_nm: (f64, f64),
    /// Spectral resolution FWHM in signal wavelength (nm).
    pub resolution_fwhm_nm: f64,
    pub noise: NoiseModel,
}

impl DetectorSpec {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.wavelength_span_nm;
        if !(self.focal_mm > 0.0 && self.pitch_um > 0.0) {
            return Err(invalid("focal length and pixel pitch must be positive"));
        }
        if self.angle_pixels < 2 || self.wavelength_pixels < 2 {
            return Err(invalid("detector needs at least 2 pixels per axis"));
        }
        if !(lo > 0.0 && hi > lo) {
            return Err(invalid(format!("wavelength span ({lo}, {hi}) nm must be increasing and positive")));
        }
        if !(self.resolution_fwhm_nm >= 0.0) {
            return Err(invalid("resolution FWHM must be non-negative"));
        }
        if !(self.noise.mean_counts > 0.0 && self.noise.read_noise >= 0.0) {
            return Err(invalid("noise model needs mean counts > 0 and read noise >= 0"));
        }
        Ok(())
    }

    /// External angle of every angle-axis pixel.
    pub fn angle_axis(&self) -> Vec<f64> {
        (0..self.angle_pixels).map(|i| self.angle_of(i as f64)).collect()
    }

    /// Signal wavelength of every column, evenly spaced over the span.
    pub fn wavelength_axis(&self) -> Vec<f64> {
        let (lo, hi) = self.wavelength_span_nm;
        let step = (hi - lo) / (self.wavelength_pixels - 1) as f64;
        (0..self.wavelength_pixels).map(|j| lo + step * j as f64).collect()
    }

    fn angle_of(&self, index: f64) -> f64 {
        let center = (self.angle_pixels / 2) as f64;
        (index - center) * self.pitch_um * 1e-3 / self.focal_mm
    }
}

/// θ = (index − N/2)·pitch/f.
pub fn pixel_to_angle(index: usize, detector: &DetectorSpec) -> Result<f64> {
    if index >= detector.angle_pixels {
        return Err(invalid(format!(
            "pixel {index} outside sensor of {} pixels",
            detector.angle_pixels
        )));
    }
    Ok(detector.angle_of(index as f64))
}

/// Everything that fixes the map except the gas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterferometerConfig {
    pub pump: PumpSpec,
    pub crystal: UniaxialCrystalIndex,
    pub geometry: Geometry,
    pub detector: DetectorSpec,
}

impl InterferometerConfig {
    pub fn validate(&self) -> Result<()> {
        PumpSpec::new(self.pump.wavelength_nm, self.pump.waist_mm, self.pump.axis_angle)?;
        Geometry::new(self.geometry.crystal_mm, self.geometry.gap_mm)?;
        self.detector.validate()?;
        let lp = self.pump.wavelength_nm;
        let (lo, hi) = self.detector.wavelength_span_nm;
        if !(lo > lp) {
            return Err(invalid(format!(
                "signal span starts at {lo} nm, not above the pump at {lp} nm"
            )));
        }
        idler_wavelength(lp, lo)?;
        idler_wavelength(lp, hi)?;
        Ok(())
    }
}

/// 1/λ_s = 1/λ_p − 1/λ_i.
pub fn signal_wavelength(lambda_p: f64, lambda_i: f64) -> Result<f64> {
    if !(lambda_p > 0.0 && lambda_i > lambda_p) {
        return Err(invalid(format!(
            "idler {lambda_i} nm must be longer than the pump {lambda_p} nm"
        )));
    }
    Ok(1.0 / (1.0 / lambda_p - 1.0 / lambda_i))
}

/// 1/λ_i = 1/λ_p − 1/λ_s.
pub fn idler_wavelength(lambda_p: f64, lambda_s: f64) -> Result<f64> {
    if !(lambda_p > 0.0 && lambda_s > lambda_p) {
        return Err(invalid(format!(
            "signal {lambda_s} nm must be longer than the pump {lambda_p} nm"
        )));
    }
    Ok(1.0 / (1.0 / lambda_p - 1.0 / lambda_s))
}

/// Idler angle from paraxial transverse-momentum balance k_s·θ_s = k_i·θ_i.
pub fn conjugate_angle(k_s: f64, theta_s: f64, k_i: f64) -> Result<f64> {
    if !(theta_s.abs() < PARAXIAL_LIMIT) {
        return Err(invalid(format!(
            "angle {theta_s} rad is not paraxial (|θ| < {PARAXIAL_LIMIT})"
        )));
    }
    if !(k_s > 0.0 && k_i > 0.0) {
        return Err(invalid("wavevectors must be positive"));
    }
    Ok(k_s * theta_s / k_i)
}

/// Refractive indices of pump, signal and idler in one region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Indices {
    pub pump: f64,
    pub signal: f64,
    pub idler: f64,
}

impl Indices {
    pub const VACUUM: Indices = Indices {
        pump: 1.0,
        signal: 1.0,
        idler: 1.0,
    };
}

/// Pump, signal and idler indices inside the crystal at signal λ_s.
pub fn crystal_indices(
    lambda_s: f64,
    crystal: &UniaxialCrystalIndex,
    pump: &PumpSpec,
) -> Result<Indices> {
    let lambda_i = idler_wavelength(pump.wavelength_nm, lambda_s)?;
    Ok(Indices {
        pump: uniaxial_index(crystal, pump.wavelength_nm * 1e-3, pump.axis_angle)?,
        signal: crystal.ordinary_index(lambda_s * 1e-3)?,
        idler: crystal.ordinary_index(lambda_i * 1e-3)?,
    })
}

/// Wavevectors in nm⁻¹ for one region; λ_i follows from energy conservation.
#[derive(Debug, Clone, Copy)]
struct Wavevectors {
    lambda_p: f64,
    lambda_s: f64,
    lambda_i: f64,
    k_s: f64,
    k_i: f64,
}

impl Wavevectors {
    fn new(lambda_p: f64, lambda_s: f64, n: &Indices) -> Result<Self> {
        let lambda_i = idler_wavelength(lambda_p, lambda_s)?;
        if !(n.pump >= 1.0 && n.signal >= 1.0 && n.idler >= 1.0) {
            return Err(invalid(format!("indices must be >= 1 (got {n:?})")));
        }
        Ok(Self {
            lambda_p,
            lambda_s,
            lambda_i,
            k_s: 2.0 * PI * n.signal / lambda_s,
            k_i: 2.0 * PI * n.idler / lambda_i,
        })
    }

    /// (k_p − k_s − k_i) per nm. With energy conservation the vacuum parts
    /// cancel identically, so only the index excesses remain.
    fn collinear(&self, n: &Indices) -> f64 {
        2.0 * PI
            * ((n.pump - 1.0) / self.lambda_p
                - (n.signal - 1.0) / self.lambda_s
                - (n.idler - 1.0) / self.lambda_i)
    }

    /// k_s(1 − cos θ_s) + k_i(1 − cos θ_i) per nm, θ = q/k.
    fn transverse(&self, q: f64) -> f64 {
        obliquity(self.k_s, q) + obliquity(self.k_i, q)
    }
}

/// k(1 − cos(q/k)) = 2k·sin²(q/2k), free of cancellation at small q.
fn obliquity(k: f64, q: f64) -> f64 {
    let s = (q / (2.0 * k)).sin();
    2.0 * k * s * s
}

fn transverse_momentum(lambda_s: f64, theta_s: f64) -> Result<f64> {
    if !(theta_s.abs() < PARAXIAL_LIMIT) {
        return Err(invalid(format!(
            "angle {theta_s} rad is not paraxial (|θ| < {PARAXIAL_LIMIT})"
        )));
    }
    Ok(2.0 * PI * theta_s / lambda_s)
}

/// δ = (k_p − k_s·cos θ_s − k_i·cos θ_i)·L inside the crystal (radians).
pub fn phase_mismatch_crystal(
    lambda_s: f64,
    theta_s: f64,
    crystal: &UniaxialCrystalIndex,
    pump: &PumpSpec,
    geometry: &Geometry,
) -> Result<f64> {
    let n = crystal_indices(lambda_s, crystal, pump)?;
    longitudinal(pump.wavelength_nm, lambda_s, theta_s, &n, geometry.crystal_mm)
}

/// δᵐ over the gap with gas indices `n` (radians).
pub fn phase_gap(
    lambda_p: f64,
    lambda_s: f64,
    theta_s: f64,
    n: &Indices,
    geometry: &Geometry,
) -> Result<f64> {
    longitudinal(lambda_p, lambda_s, theta_s, n, geometry.gap_mm)
}

fn longitudinal(lambda_p: f64, lambda_s: f64, theta_s: f64, n: &Indices, length_mm: f64) -> Result<f64> {
    let k = Wavevectors::new(lambda_p, lambda_s, n)?;
    let q = transverse_momentum(lambda_s, theta_s)?;
    Ok((k.collinear(n) + k.transverse(q)) * length_mm * NM_PER_MM)
}

/// Pump axis angle that zeroes the collinear crystal mismatch for idler
/// λ_i (nm).
pub fn phase_matching_angle(
    crystal: &UniaxialCrystalIndex,
    lambda_p: f64,
    lambda_i: f64,
) -> Result<f64> {
    let lambda_s = signal_wavelength(lambda_p, lambda_i)?;
    let ns = crystal.ordinary_index(lambda_s * 1e-3)?;
    let ni = crystal.ordinary_index(lambda_i * 1e-3)?;
    let n_needed = lambda_p * (ns / lambda_s + ni / lambda_i);
    let no = crystal.ordinary.index(lambda_p * 1e-3)?;
    let ne = crystal.extraordinary.index(lambda_p * 1e-3)?;
    let s2 = (1.0 / (n_needed * n_needed) - 1.0 / (no * no)) / (1.0 / (ne * ne) - 1.0 / (no * no));
    if !(0.0..=1.0).contains(&s2) {
        return Err(invalid(format!(
            "no type-I phase matching for idler {lambda_i} nm (needs pump index {n_needed:.6})"
        )));
    }
    Ok(s2.sqrt().asin())
}

/// sin(x)/x
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Angular cross-section at one signal wavelength with everything but the
/// idler's gap index and absorption precomputed. The forward map and the
/// retrieval fit both evaluate through this type.
#[derive(Debug, Clone)]
pub struct CrossSectionModel {
    pub lambda_s: f64,
    pub lambda_i: f64,
    gap_nm: f64,
    k_i_vacuum: f64,
    q: Vec<f64>,
    /// ½·sinc²(δ/2)
    envelope: Vec<f64>,
    /// δ plus the pump and signal parts of δᵐ.
    phase_base: Vec<f64>,
}

impl CrossSectionModel {
    /// `gas_visible` is the gap index seen by pump and signal.
    pub fn new(
        config: &InterferometerConfig,
        lambda_s: f64,
        angles: &[f64],
        gas_visible: f64,
    ) -> Result<Self> {
        let lambda_p = config.pump.wavelength_nm;
        let nc = crystal_indices(lambda_s, &config.crystal, &config.pump)?;
        let kc = Wavevectors::new(lambda_p, lambda_s, &nc)?;
        let gap = Indices {
            pump: gas_visible,
            signal: gas_visible,
            idler: 1.0,
        };
        let kg = Wavevectors::new(lambda_p, lambda_s, &gap)?;
        let crystal_nm = config.geometry.crystal_mm * NM_PER_MM;
        let gap_nm = config.geometry.gap_mm * NM_PER_MM;
        let gap_visible = 2.0 * PI * ((gap.pump - 1.0) / lambda_p - (gap.signal - 1.0) / lambda_s);

        let mut q = Vec::with_capacity(angles.len());
        let mut envelope = Vec::with_capacity(angles.len());
        let mut phase_base = Vec::with_capacity(angles.len());
        for &theta in angles {
            let qj = transverse_momentum(lambda_s, theta)?;
            let delta = (kc.collinear(&nc) + kc.transverse(qj)) * crystal_nm;
            let s = sinc(delta / 2.0);
            q.push(qj);
            envelope.push(0.5 * s * s);
            phase_base.push(delta + (gap_visible + obliquity(kg.k_s, qj)) * gap_nm);
        }
        Ok(Self {
            lambda_s,
            lambda_i: kc.lambda_i,
            gap_nm,
            k_i_vacuum: 2.0 * PI / kc.lambda_i,
            q,
            envelope,
            phase_base,
        })
    }

    pub fn gap_mm(&self) -> f64 {
        self.gap_nm / NM_PER_MM
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// ½·sinc²(δ/2) at every angle.
    pub fn envelope(&self) -> &[f64] {
        &self.envelope
    }

    /// Total phase δ + δᵐ at every angle for idler gap index 1 + `n_minus_1`.
    pub fn phase(&self, n_minus_1: f64) -> Vec<f64> {
        (0..self.len()).map(|j| self.phase_at(j, n_minus_1)).collect()
    }

    #[inline]
    fn phase_at(&self, j: usize, n_minus_1: f64) -> f64 {
        let k_i = self.k_i_vacuum * (1.0 + n_minus_1);
        let idler = -2.0 * PI * n_minus_1 / self.lambda_i + obliquity(k_i, self.q[j]);
        self.phase_base[j] + idler * self.gap_nm
    }

    /// ½·sinc²(δ/2)·(1 + τ·cos(δ + δᵐ)), τ = exp(−α·L_m), into `out`.
    pub fn eval_into(&self, n_minus_1: f64, alpha_cm1: f64, out: &mut [f64]) {
        let tau = (-alpha_cm1 * self.gap_nm * 1e-7).exp();
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.envelope[j] * (1.0 + tau * self.phase_at(j, n_minus_1).cos());
        }
    }

    pub fn eval(&self, n_minus_1: f64, alpha_cm1: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(n_minus_1, alpha_cm1, &mut out);
        out
    }

    /// The transparent-gap form ½·sinc²(δ/2)·(1 + cos(δ + δᵐ)).
    pub fn eval_transparent(&self, n_minus_1: f64) -> Vec<f64> {
        (0..self.len())
            .map(|j| self.envelope[j] * (1.0 + self.phase_at(j, n_minus_1).cos()))
            .collect()
    }
}

fn assemble(
    config: &InterferometerConfig,
    exec: Execution,
    column: impl Fn(f64, &[f64]) -> Result<Vec<f64>> + Sync + Send,
) -> Result<(Vec<f64>, Vec<f64>, ndarray::Array2<f64>)> {
    config.validate()?;
    let angles = config.detector.angle_axis();
    let waves = config.detector.wavelength_axis();
    let columns = exec.try_map_range(waves.len(), |j| column(waves[j], &angles))?;
    let mut intensity = ndarray::Array2::zeros((angles.len(), waves.len()));
    for (j, col) in columns.iter().enumerate() {
        intensity.column_mut(j).assign(&ndarray::ArrayView1::from(col));
    }
    Ok((waves, angles, intensity))
}

fn metadata(config: &InterferometerConfig, model: &str, gas: serde_json::Value) -> MapMetadata {
    let angles = config.detector.angle_axis();
    let theta_s = angles.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let (_, hi) = config.detector.wavelength_span_nm;
    // widest gap-side idler angle: q/k_i in vacuum
    let theta_i = idler_wavelength(config.pump.wavelength_nm, hi)
        .map(|li| theta_s * li / hi)
        .unwrap_or(f64::NAN);
    MapMetadata {
        config: Some(config.clone()),
        model: model.to_string(),
        gas,
        quasi_collinear: Some(config.pump.quasi_collinear(&config.geometry, theta_s.max(theta_i))),
        ..MapMetadata::default()
    }
}

/// Noiseless, un-blurred map ½·sinc²(δ/2)·(1 + τ·cos(δ + δᵐ)) through `gas`.
pub fn intensity_map(
    config: &InterferometerConfig,
    gas: &dyn GapMedium,
    exec: Execution,
) -> Result<InterferogramMap> {
    let lambda_p = config.pump.wavelength_nm;
    let visible = gas.visible_index();
    let (waves, angles, intensity) = assemble(config, exec, |lambda_s, angles| {
        let idler = gas.idler(idler_wavelength(lambda_p, lambda_s)?)?;
        let model = CrossSectionModel::new(config, lambda_s, angles, visible)?;
        Ok(model.eval(idler.n - 1.0, idler.alpha_cm1))
    })?;
    let meta = metadata(config, "absorbing", gas.describe());
    InterferogramMap::new(intensity, waves, angles, meta)
}

/// Noiseless map for a transparent, index-1 gap: ½·sinc²(δ/2)·(1 + cos(δ + δᵐ)).
pub fn intensity_map_vacuum(config: &InterferometerConfig, exec: Execution) -> Result<InterferogramMap> {
    let (waves, angles, intensity) = assemble(config, exec, |lambda_s, angles| {
        Ok(CrossSectionModel::new(config, lambda_s, angles, 1.0)?.eval_transparent(0.0))
    })?;
    let meta = metadata(config, "transparent", Vacuum.describe());
    InterferogramMap::new(intensity, waves, angles, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::SellmeierModel;

    fn constant_crystal(no: f64, ne: f64) -> UniaxialCrystalIndex {
        UniaxialCrystalIndex::new(
            SellmeierModel::constant(no, (0.3, 6.0)).unwrap(),
            SellmeierModel::constant(ne, (0.3, 6.0)).unwrap(),
            0.9,
        )
        .unwrap()
    }

    fn geometry() -> Geometry {
        Geometry::new(0.5, 25.0).unwrap()
    }

    #[test]
    fn signal_wavelength_examples() {
        let ls = signal_wavelength(532.0, 4300.0).unwrap();
        assert!((ls - 607.1).abs() < 0.05, "{ls}");
        assert!((signal_wavelength(532.0, 1e12).unwrap() - 532.0).abs() < 1e-6);
        let li = idler_wavelength(532.0, ls).unwrap();
        assert!((li - 4300.0).abs() < 1e-9);
        assert!(signal_wavelength(532.0, 532.0).is_err());
        assert!(signal_wavelength(532.0, 400.0).is_err());
    }

    #[test]
    fn conjugate_angle_examples() {
        assert_eq!(conjugate_angle(3.0, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(conjugate_angle(2.0, 0.004, 2.0).unwrap(), 0.004);
        assert!((conjugate_angle(2.0, 1e-3, 1.0).unwrap() - 2e-3).abs() < 1e-18);
        assert!(conjugate_angle(1.0, 0.2, 1.0).is_err());
    }

    #[test]
    fn pixel_angles() {
        let det = detector(1024, 16);
        assert_eq!(pixel_to_angle(512, &det).unwrap(), 0.0);
        assert!((pixel_to_angle(513, &det).unwrap() - 2.6e-5).abs() < 1e-18);
        assert!((pixel_to_angle(612, &det).unwrap() - 2.6e-3).abs() < 1e-15);
        assert!(pixel_to_angle(1024, &det).is_err());
    }

    fn detector(angles: usize, waves: usize) -> DetectorSpec {
        DetectorSpec {
            focal_mm: 500.0,
            pitch_um: 13.0,
            angle_pixels: angles,
            wavelength_pixels: waves,
            wavelength_span_nm: (603.0, 611.0),
            resolution_fwhm_nm: 0.0,
            noise: NoiseModel {
                mean_counts: 1e4,
                read_noise: 0.0,
            },
        }
    }

    /// Constant-index crystal whose extraordinary index phase-matches the
    /// collinear 532 → 4300 nm process exactly.
    fn matched_fixture() -> (UniaxialCrystalIndex, PumpSpec) {
        let lp = 532.0;
        let li = 4300.0;
        let ls = signal_wavelength(lp, li).unwrap();
        let (ns, ni) = (2.2, 2.2);
        let np = lp * (ns / ls + ni / li);
        let crystal = UniaxialCrystalIndex::new(
            SellmeierModel::constant(ns, (0.3, 6.0)).unwrap(),
            SellmeierModel::constant(np, (0.3, 6.0)).unwrap(),
            0.9,
        )
        .unwrap();
        // sin θ = 1 selects n_e exactly
        let pump = PumpSpec::new(lp, 2.0, PI / 2.0).unwrap();
        (crystal, pump)
    }

    #[test]
    fn matched_crystal_has_zero_mismatch_on_axis() {
        let (crystal, pump) = matched_fixture();
        let ls = signal_wavelength(532.0, 4300.0).unwrap();
        let d = phase_mismatch_crystal(ls, 0.0, &crystal, &pump, &geometry()).unwrap();
        assert!(d.abs() < 1e-9, "{d}");
    }

    #[test]
    fn crystal_mismatch_is_upward_parabola() {
        let (crystal, pump) = matched_fixture();
        let ls = signal_wavelength(532.0, 4300.0).unwrap();
        let g = geometry();
        let f = |t: f64| phase_mismatch_crystal(ls, t, &crystal, &pump, &g).unwrap();
        // least-squares parabola over ±5 mrad
        let ts: Vec<f64> = (-50..=50).map(|i| i as f64 * 1e-4).collect();
        let (mut s4, mut s2y) = (0.0, 0.0);
        for &t in &ts {
            let y = f(t) - f(0.0);
            s4 += t.powi(4);
            s2y += t * t * y;
        }
        let a_fit = s2y / s4;
        let h = 1e-4;
        let a_fd = (f(h) - 2.0 * f(0.0) + f(-h)) / (2.0 * h * h);
        // k·cos θ < k, so the oblique terms add to k_p − k_s − k_i
        assert!(a_fit > 0.0);
        assert!(f(2e-3) > 0.0);
        assert!(((a_fit - a_fd) / a_fd).abs() < 1e-2, "{a_fit} vs {a_fd}");
    }

    #[test]
    fn crystal_mismatch_matches_hand_evaluation() {
        let crystal = constant_crystal(2.0, 2.2);
        let pump = PumpSpec::new(532.0, 2.0, PI / 2.0).unwrap();
        let (ls, theta) = (607.0, 3e-3);
        let li = 1.0 / (1.0 / 532.0 - 1.0 / 607.0);
        let kp = 2.0 * PI * 2.2 / 532.0;
        let ks = 2.0 * PI * 2.0 / ls;
        let ki = 2.0 * PI * 2.0 / li;
        let q = 2.0 * PI * theta / ls;
        let want = (kp - ks * (q / ks).cos() - ki * (q / ki).cos()) * 0.5e6;
        let got = phase_mismatch_crystal(ls, theta, &crystal, &pump, &geometry()).unwrap();
        assert!(((got - want) / want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn crystal_mismatch_rejects_opaque_wavelengths() {
        let crystal = crate::dispersion::mgo_linbo3(50f64.to_radians()).unwrap();
        let pump = PumpSpec::new(532.0, 2.0, 0.83).unwrap();
        // idler beyond 5 µm
        let ls = signal_wavelength(532.0, 5200.0).unwrap();
        assert!(phase_mismatch_crystal(ls, 0.0, &crystal, &pump, &geometry()).is_err());
    }

    #[test]
    fn gap_phase_examples() {
        let g = geometry();
        let ls = signal_wavelength(532.0, 4300.0).unwrap();
        assert_eq!(phase_gap(532.0, ls, 0.0, &Indices::VACUUM, &g).unwrap(), 0.0);
        let n = Indices {
            idler: 1.0 + 1e-5,
            ..Indices::VACUUM
        };
        let d = phase_gap(532.0, ls, 0.0, &n, &g).unwrap();
        let want = -2.0 * PI * 1e-5 * 25e6 / 4300.0;
        assert!((d - want).abs() < 1e-9, "{d} vs {want}");
        assert!((want + 0.365).abs() < 1e-3);
        let g2 = Geometry::new(0.5, 50.0).unwrap();
        for t in [0.0, 1e-3, 5e-3] {
            let a = phase_gap(532.0, ls, t, &n, &g).unwrap();
            let b = phase_gap(532.0, ls, t, &n, &g2).unwrap();
            assert!((b - 2.0 * a).abs() < 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn phase_matching_angle_zeroes_mismatch() {
        let crystal = crate::dispersion::mgo_linbo3(50f64.to_radians()).unwrap();
        let theta = phase_matching_angle(&crystal, 532.0, 4260.0).unwrap();
        assert!((theta.to_degrees() - 47.437).abs() < 0.01, "{}", theta.to_degrees());
        let pump = PumpSpec::new(532.0, 2.0, theta).unwrap();
        let ls = signal_wavelength(532.0, 4260.0).unwrap();
        let d = phase_mismatch_crystal(ls, 0.0, &crystal, &pump, &geometry()).unwrap();
        assert!(d.abs() < 1e-6, "{d}");
    }

    #[test]
    fn model_matches_direct_phases() {
        let crystal = crate::dispersion::mgo_linbo3(50f64.to_radians()).unwrap();
        let pump = PumpSpec::new(532.0, 2.0, 0.828).unwrap();
        let config = InterferometerConfig {
            pump,
            crystal: crystal.clone(),
            geometry: geometry(),
            detector: detector(64, 4),
        };
        let angles = config.detector.angle_axis();
        let ls = 607.3;
        let nv = 1.0 + 4e-6;
        let nm1 = 7e-6;
        let model = CrossSectionModel::new(&config, ls, &angles, nv).unwrap();
        let phase = model.phase(nm1);
        let gas = Indices {
            pump: nv,
            signal: nv,
            idler: 1.0 + nm1,
        };
        for (j, &t) in angles.iter().enumerate() {
            let d = phase_mismatch_crystal(ls, t, &crystal, &pump, &config.geometry).unwrap();
            let dm = phase_gap(532.0, ls, t, &gas, &config.geometry).unwrap();
            assert!((phase[j] - (d + dm)).abs() < 1e-8, "{} vs {}", phase[j], d + dm);
            let env = 0.5 * sinc(d / 2.0).powi(2);
            assert!((model.envelope()[j] - env).abs() < 1e-14);
        }
    }

    fn demo_config(angles: usize, waves: usize) -> InterferometerConfig {
        let crystal = crate::dispersion::mgo_linbo3(50f64.to_radians()).unwrap();
        let axis = phase_matching_angle(&crystal, 532.0, 4260.0).unwrap();
        InterferometerConfig {
            pump: PumpSpec::new(532.0, 2.0, axis).unwrap(),
            crystal,
            geometry: geometry(),
            detector: detector(angles, waves),
        }
    }

    #[test]
    fn transparent_gap_maps_agree_bitwise() {
        let config = demo_config(96, 24);
        let a = intensity_map(&config, &Vacuum, Execution::default()).unwrap();
        let b = intensity_map_vacuum(&config, Execution::Sequential).unwrap();
        assert_eq!(a.intensity, b.intensity);
        let peak = a.intensity.iter().cloned().fold(0.0, f64::max);
        assert!(peak <= 1.0 && peak > 0.5, "{peak}");
    }

    #[test]
    fn opaque_gap_leaves_bare_envelope() {
        let config = demo_config(64, 6);
        let gas = UniformMedium::new(1.00001, 1e6, 1.0).unwrap();
        let map = intensity_map(&config, &gas, Execution::default()).unwrap();
        let angles = config.detector.angle_axis();
        for (j, &ls) in map.wavelength_nm.iter().enumerate() {
            let env = CrossSectionModel::new(&config, ls, &angles, 1.0).unwrap();
            for i in 0..angles.len() {
                assert_eq!(map.intensity[[i, j]], env.envelope()[i]);
            }
        }
    }

    #[test]
    fn map_metadata_records_geometry() {
        let config = demo_config(1024, 4);
        let map = intensity_map_vacuum(&config, Execution::default()).unwrap();
        assert_eq!(map.metadata.config.as_ref(), Some(&config));
        assert_eq!(map.metadata.angle_convention, "external");
        // ±13 mrad is far outside a = 2 mm, L_m = 25 mm quasi-collinear range
        assert_eq!(map.metadata.quasi_collinear, Some(false));
    }

    proptest::proptest! {
        #[test]
        fn intensity_non_negative(nm1 in 0.0f64..1e-4, alpha in 0.0f64..2.0, ls in 603.0f64..611.0) {
            let config = demo_config(128, 2);
            let angles = config.detector.angle_axis();
            let model = CrossSectionModel::new(&config, ls, &angles, 1.0 + 3e-6).unwrap();
            for v in model.eval(nm1, alpha) {
                proptest::prop_assert!(v >= 0.0);
            }
        }

        #[test]
        fn idler_index_shifts_on_axis_phase(dn in -5e-5f64..5e-5, ls in 603.0f64..611.0) {
            let config = demo_config(2, 2);
            let model = CrossSectionModel::new(&config, ls, &[0.0], 1.0).unwrap();
            let li = model.lambda_i;
            let shift = model.phase(1e-5 + dn)[0] - model.phase(1e-5)[0];
            let want = -2.0 * PI * dn * config.geometry.gap_mm * 1e6 / li;
            proptest::prop_assert!((shift - want).abs() < 1e-9);
        }
    }

    #[test]
    fn quasi_collinear_flag() {
        let p = PumpSpec::new(532.0, 2.0, 0.8).unwrap();
        assert!(p.quasi_collinear(&geometry(), 8e-3));
        assert!(!p.quasi_collinear(&geometry(), 9e-3));
    }
}

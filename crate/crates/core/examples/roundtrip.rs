//! Synthetic CO₂-like round trip: simulate sample and reference maps with
//! shot noise, retrieve (n, α) and compare with the generating gas.

use std::time::Instant;

use nlinterf::dispersion::{mgo_linbo3, GasIndexModel};
use nlinterf::interferometer::{
    add_noise, intensity_map, phase_matching_angle, DetectorSpec, GapMedium, GasState, Geometry,
    InterferometerConfig, NoiseModel, PumpSpec, Vacuum,
};
use nlinterf::retrieval::{retrieve_spectrum, RetrievalOptions};
use nlinterf::synthetic::{co2_like_band, gas_for_detector, BandSpec};
use nlinterf::Execution;

fn main() -> nlinterf::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse().unwrap()).collect();
    let pressure = args.first().copied().unwrap_or(10.5);
    let counts = args.get(1).copied().unwrap_or(1e4);
    let res_nm = args.get(2).copied().unwrap_or(0.75);
    let crystal = mgo_linbo3(50f64.to_radians())?;
    let axis = phase_matching_angle(&crystal, 532.0, 4260.0)?;
    let config = InterferometerConfig {
        pump: PumpSpec::new(532.0, 2.0, axis)?,
        crystal,
        geometry: Geometry::new(0.5, 25.0)?,
        detector: DetectorSpec {
            focal_mm: 500.0,
            pitch_um: 13.0,
            angle_pixels: 1024,
            wavelength_pixels: 1024,
            wavelength_span_nm: (602.0, 612.0),
            resolution_fwhm_nm: res_nm,
            noise: NoiseModel { mean_counts: counts, read_noise: 0.0 },
        },
    };
    let t = Instant::now();
    let gas = GasState {
        lines: co2_like_band(&BandSpec::default())?,
        pressure_torr: pressure,
        temperature_k: 296.0,
        index_model: GasIndexModel::new(1.000449, 760.0, 296.0)?,
    };
    let table = gas_for_detector(&gas, &config, 150.0, 0.05)?;
    println!("gas table {} pts in {:?}", table.wavenumber_cm1.len(), t.elapsed());
    let t = Instant::now();
    let exec = Execution::default();
    let sample = intensity_map(&config, &table, exec)?;
    let reference = intensity_map(&config, &Vacuum, exec)?;
    let noise = config.detector.noise;
    let sample = add_noise(&sample, &noise, 1, exec)?;
    let reference = add_noise(&reference, &noise, 2, exec)?;
    println!("maps in {:?}", t.elapsed());
    let t = Instant::now();
    let spec = retrieve_spectrum(&sample, &reference, &config, table.visible_index, &RetrievalOptions::default())?;
    println!("retrieval of {} columns in {:?} ({} skipped)", spec.len(), t.elapsed(), spec.skipped.len());
    let (mut en, mut ea, mut k, mut in1) = (0.0, 0.0, 0, 0);
    let (mut zn, mut za) = (0.0, 0.0);
    let mut peak: f64 = 0.0;
    for i in 0..spec.len() {
        let truth = table.idler(spec.idler_nm[i])?;
        peak = peak.max(truth.alpha_cm1);
        let dn = spec.n[i] - truth.n;
        let da = spec.alpha[i] - truth.alpha_cm1;
        en += dn * dn;
        ea += da * da;
        zn += (dn / spec.sigma_n[i]).powi(2);
        za += (da / spec.sigma_alpha[i]).powi(2);
        if dn.abs() < spec.sigma_n[i] {
            in1 += 1;
        }
        k += 1;
    }
    let k = k as f64;
    println!("peak alpha {peak:.4}; rms dn {:.3e}, rms dalpha {:.3e}; chi n {:.3} chi a {:.3}; within 1σ {:.3}",
        (en / k).sqrt(), (ea / k).sqrt(), (zn / k).sqrt(), (za / k).sqrt(), in1 as f64 / k);
    println!("idler span {:.1}-{:.1}", spec.idler_nm[0], spec.idler_nm[spec.len() - 1]);
    if let Some(s) = spec.summary() {
        println!("{s}");
    }
    Ok(())
}

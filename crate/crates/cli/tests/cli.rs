use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nlinterf::interferometer::{CrossSectionModel, InterferogramMap};
use nlinterf::retrieval::{visibility, RetrievedSpectrum};
use nlinterf::spectrum::Spectrum;
use tempfile::TempDir;

const DEFAULTS: &str = include_str!("../configs/default-run.toml");

fn nlinterf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlinterf")).args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// The shipped config with some `key = value` lines replaced.
fn config_with(dir: &Path, overrides: &[(&str, &str)]) -> PathBuf {
    let mut text = String::new();
    for line in DEFAULTS.lines() {
        let key = line.split('=').next().unwrap_or("").trim();
        match overrides.iter().find(|(k, _)| *k == key) {
            Some((k, v)) => text.push_str(&format!("{k} = {v}\n")),
            None => {
                text.push_str(line);
                text.push('\n');
            }
        }
    }
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path
}

/// 512 × 64 detector: fast, ~15 fringes per column.
fn small_config(dir: &Path) -> PathBuf {
    config_with(dir, &[("angle_pixels", "512"), ("wavelength_pixels", "64")])
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn simulate(cfg: &Path, out: &Path, extra: &[&str]) {
    let mut args = vec!["simulate", "--config", s(cfg), "--output", s(out)];
    args.extend_from_slice(extra);
    let o = nlinterf(&args);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn shipped_config_parses_and_help_works() {
    let dir = TempDir::new().unwrap();
    let cfg = config_with(dir.path(), &[("angle_pixels", "64"), ("wavelength_pixels", "4")]);
    let out = dir.path().join("m.nlmap");
    simulate(&cfg, &out, &["--no-noise"]);
    for cmd in ["simulate", "retrieve", "absorption", "kk"] {
        let o = nlinterf(&[cmd, "--help"]);
        assert!(o.status.success());
        assert!(String::from_utf8_lossy(&o.stdout).contains("Usage"));
    }
}

#[test]
fn vacuum_map_has_full_visibility() {
    let dir = TempDir::new().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("vac.nlmap");
    simulate(&cfg, &out, &["--vacuum", "--no-noise"]);
    let map = InterferogramMap::load(&out).unwrap();
    assert!(out.with_extension("pgm").exists() && out.with_extension("pgm.json").exists());
    let config = map.metadata.config.clone().expect("config recorded");
    for j in [0, 31, 63] {
        let model = CrossSectionModel::new(&config, map.wavelength_nm[j], &map.angle_rad, 1.0).unwrap();
        let v = visibility(&map.column(j), Some(model.envelope())).unwrap();
        assert!((v - 1.0).abs() < 2e-3, "column {j}: V = {v}");
    }
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = small_config(dir.path());
    let (a, b, c) = (dir.path().join("a.nlmap"), dir.path().join("b.nlmap"), dir.path().join("c.nlmap"));
    simulate(&cfg, &a, &["--vacuum", "--seed", "9"]);
    simulate(&cfg, &b, &["--vacuum", "--seed", "9"]);
    simulate(&cfg, &c, &["--vacuum", "--seed", "10"]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn gas_run_round_trip() {
    let dir = TempDir::new().unwrap();
    let cfg = config_with(
        dir.path(),
        &[("angle_pixels", "512"), ("wavelength_pixels", "128"), ("pressure_torr", "7.7")],
    );
    let (sample, vac) = (dir.path().join("gas.nlmap"), dir.path().join("vac.nlmap"));
    simulate(&cfg, &sample, &[]);
    simulate(&cfg, &vac, &["--vacuum", "--seed", "2"]);
    let csv = dir.path().join("spec.csv");
    let o = nlinterf(&[
        "retrieve", "--config", s(&cfg), "--sample", s(&sample), "--reference", s(&vac), "--output", s(&csv),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let spec = RetrievedSpectrum::from_csv(&fs::read_to_string(&csv).unwrap()).unwrap();
    // absorption and a fringe shift near 4.3 µm, nothing far from the band
    let near = (0..spec.len()).min_by(|&a, &b| (spec.idler_nm[a] - 4250.0).abs().total_cmp(&(spec.idler_nm[b] - 4250.0).abs())).unwrap();
    assert!(spec.alpha[near] > 20.0 * spec.sigma_alpha[near], "{} ± {}", spec.alpha[near], spec.sigma_alpha[near]);
    assert!((spec.n[near] - 1.0).abs() > 10.0 * spec.sigma_n[near]);
    assert!(spec.alpha[0].abs() < 5.0 * spec.sigma_alpha[0] + 1e-3);
    // CSV written by the tool re-reads and re-writes identically
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(RetrievedSpectrum::from_csv(&text).unwrap().to_csv(), text);
    let summary = fs::read_to_string(csv.with_extension("summary.txt")).unwrap();
    assert!(summary.contains("peak alpha") && summary.contains("FWHM"), "{summary}");
}

#[test]
fn default_resolution_gives_band_width_of_order_140_nm() {
    let dir = TempDir::new().unwrap();
    let cfg = config_with(dir.path(), &[("angle_pixels", "512"), ("wavelength_pixels", "256")]);
    let (sample, vac) = (dir.path().join("gas.nlmap"), dir.path().join("vac.nlmap"));
    simulate(&cfg, &sample, &["--no-noise"]);
    simulate(&cfg, &vac, &["--vacuum", "--no-noise"]);
    let csv = dir.path().join("spec.csv");
    let o = nlinterf(&[
        "retrieve", "--config", s(&cfg), "--sample", s(&sample), "--reference", s(&vac), "--output", s(&csv),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let spec = RetrievedSpectrum::from_csv(&fs::read_to_string(&csv).unwrap()).unwrap();
    let fwhm = spec.summary().unwrap().fwhm_nm;
    assert!((70.0..280.0).contains(&fwhm), "FWHM {fwhm} nm");
}

#[test]
fn identical_maps_give_no_absorption() {
    let dir = TempDir::new().unwrap();
    let cfg = small_config(dir.path());
    let m = dir.path().join("m.nlmap");
    simulate(&cfg, &m, &["--vacuum"]);
    let csv = dir.path().join("spec.csv");
    let o = nlinterf(&["retrieve", "--config", s(&cfg), "--sample", s(&m), "--reference", s(&m), "--output", s(&csv)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let spec = RetrievedSpectrum::from_csv(&fs::read_to_string(&csv).unwrap()).unwrap();
    assert!(!spec.is_empty());
    // the sample side sees the gas's visible index, so n shifts by that much;
    // α stays far inside its error bar
    for i in 0..spec.len() {
        assert!(spec.alpha[i].abs() < 0.05 * spec.sigma_alpha[i], "{} ± {}", spec.alpha[i], spec.sigma_alpha[i]);
    }
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let cfg = small_config(dir.path());
    let a = dir.path().join("a.nlmap");
    simulate(&cfg, &a, &["--vacuum", "--no-noise"]);

    // different axes → 3
    let other_cfg_dir = TempDir::new().unwrap();
    let other_cfg = config_with(other_cfg_dir.path(), &[("angle_pixels", "256"), ("wavelength_pixels", "64")]);
    let b = dir.path().join("b.nlmap");
    simulate(&other_cfg, &b, &["--vacuum", "--no-noise"]);
    let o = nlinterf(&["retrieve", "--config", s(&cfg), "--sample", s(&a), "--reference", s(&b)]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));

    // corrupted header → 1
    let mut bytes = fs::read(&a).unwrap();
    bytes[12] = b'#';
    let bad = dir.path().join("bad.nlmap");
    fs::write(&bad, bytes).unwrap();
    let o = nlinterf(&["retrieve", "--config", s(&cfg), "--sample", s(&bad), "--reference", s(&a)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("header"), "{}", stderr(&o));

    // missing file → 1
    let o = nlinterf(&["simulate", "--config", s(&dir.path().join("nope.toml"))]);
    assert_eq!(o.status.code(), Some(1));

    // unknown key and bad value → 2, naming the key
    let text = fs::read_to_string(&cfg).unwrap();
    let typo = dir.path().join("typo.toml");
    fs::write(&typo, text.replace("focal_length_mm", "focal_mm")).unwrap();
    let o = nlinterf(&["simulate", "--config", s(&typo)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("focal_mm"), "{}", stderr(&o));
    let neg = dir.path().join("neg.toml");
    fs::write(&neg, text.replace("pixel_pitch_um = 13.0", "pixel_pitch_um = -13.0")).unwrap();
    let o = nlinterf(&["simulate", "--config", s(&neg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("detector.pixel_pitch_um"), "{}", stderr(&o));
}

fn write_line_csv(dir: &Path, rows: &[&str]) -> PathBuf {
    let path = dir.join("lines.csv");
    let mut text = String::from("# molecule = CO2\n# molar_mass_g_per_mol = 43.98983\nwavenumber_cm1,intensity,gamma_air,gamma_self,n_air,e_lower\n");
    for r in rows {
        text.push_str(r);
        text.push('\n');
    }
    fs::write(&path, text).unwrap();
    path
}

fn absorption(lines: &Path, p: &str, out: &Path) -> Spectrum {
    let o = nlinterf(&[
        "absorption", "--lines", s(lines), "--pressure-torr", p, "--start-cm1", "2300", "--stop-cm1", "2400",
        "--step-cm1", "0.01", "--output", s(out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    Spectrum::from_csv(&fs::read_to_string(out).unwrap()).unwrap()
}

#[test]
fn absorption_command() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("a.csv");
    let empty = absorption(&write_line_csv(dir.path(), &[]), "10", &out);
    assert_eq!(empty.x.len(), 10001);
    assert!(empty.y.iter().all(|&v| v == 0.0));
    let lines = write_line_csv(dir.path(), &["2350.0,1e-18,0.07,0.09,0.75,0.0"]);
    let one = absorption(&lines, "10", &out);
    let peak = (0..one.y.len()).max_by(|&a, &b| one.y[a].total_cmp(&one.y[b])).unwrap();
    assert!((one.x[peak] - 2350.0).abs() < 1e-9);
    // far wing: α ≈ N·S·γ_L/(πΔ²) with both N and γ_L ∝ P
    let two = absorption(&lines, "20", &out);
    let k = one.x.iter().position(|&x| (x - 2370.0).abs() < 1e-9).unwrap();
    let ratio = two.y[k] / one.y[k];
    assert!((ratio - 4.0).abs() < 0.01, "{ratio}");
    // Doppler-limited line center: α ∝ P
    let lo = absorption(&lines, "0.01", &out);
    let lo2 = absorption(&lines, "0.02", &out);
    let c = one.x.iter().position(|&x| (x - 2350.0).abs() < 1e-9).unwrap();
    assert!((lo2.y[c] / lo.y[c] - 2.0).abs() < 0.01);
    // bad record reports its row
    let bad = write_line_csv(dir.path(), &["2350.0,1e-18,0.07,0.09,0.75,0.0", "2351.0,oops,0.07,0.09,0.75,0.0"]);
    let o = nlinterf(&[
        "absorption", "--lines", s(&bad), "--pressure-torr", "1", "--start-cm1", "2300", "--stop-cm1", "2400",
        "--step-cm1", "1", "--output", s(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("row"), "{}", stderr(&o));
}

#[test]
fn kk_command() {
    let dir = TempDir::new().unwrap();
    let alpha_csv = dir.path().join("alpha.csv");
    let n_csv = dir.path().join("n.csv");
    let kk = |baseline: &str| {
        let o = nlinterf(&["kk", "--input", s(&alpha_csv), "--baseline", baseline, "--output", s(&n_csv)]);
        assert!(o.status.success(), "{}", stderr(&o));
        Spectrum::from_csv(&fs::read_to_string(&n_csv).unwrap()).unwrap()
    };
    // zero absorption → the baseline
    let grid: Vec<f64> = (0..2001).map(|i| 2250.0 + 0.1 * i as f64).collect();
    let zero = Spectrum::new("wavenumber_cm1", "alpha_cm1", grid.clone(), vec![0.0; grid.len()]).unwrap();
    fs::write(&alpha_csv, zero.to_csv()).unwrap();
    assert!(kk("-3e-6").y.iter().all(|&v| v == -3e-6));

    // Lorentzian → analytic dispersion within 1% of peak
    let (a, nu0, g) = (0.3, 2350.0, 1.5);
    let y: Vec<f64> = grid.iter().map(|&x| a * g * g / ((x - nu0).powi(2) + g * g)).collect();
    fs::write(&alpha_csv, Spectrum::new("wavenumber_cm1", "alpha_cm1", grid.clone(), y).unwrap().to_csv()).unwrap();
    let n = kk("0");
    let analytic = |x: f64| a * g * (nu0 - x) / (4.0 * std::f64::consts::PI * x * ((x - nu0).powi(2) + g * g));
    let peak = analytic(nu0 - g);
    for (i, &x) in grid.iter().enumerate().filter(|(_, &x)| (2270.0..2430.0).contains(&x)) {
        assert!((n.y[i] - analytic(x)).abs() < 0.01 * peak, "{x}");
    }

    // absorption → kk: the resonant part crosses zero at the line centre
    let lines = write_line_csv(dir.path(), &["2350.0,1e-18,0.07,0.09,0.75,0.0"]);
    absorption(&lines, "10", &alpha_csv);
    let n = kk("0");
    let cross = (1..n.y.len()).find(|&i| n.y[i - 1] > 0.0 && n.y[i] <= 0.0).unwrap();
    assert!((n.x[cross] - 2350.0).abs() <= 0.01 + 1e-9, "{}", n.x[cross]);

    // non-uniform grid → 3
    fs::write(&alpha_csv, "wavenumber_cm1,alpha_cm1\n1,0\n2,0\n4,0\n5,0\n6,0\n7,0\n8,0\n9,0\n10,0\n").unwrap();
    let o = nlinterf(&["kk", "--input", s(&alpha_csv), "--output", s(&n_csv)]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

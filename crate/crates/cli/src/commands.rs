use std::path::{Path, PathBuf};

use nlinterf::interferometer::{add_noise, intensity_map, InterferogramMap, Vacuum};
use nlinterf::kk::kk_index_from_absorption;
use nlinterf::lineshape::{absorption_spectrum, AbsorptionOptions};
use nlinterf::retrieval::{retrieve_spectrum, RetrievalOptions};
use nlinterf::spectrum::{uniform_grid, Spectrum};
use nlinterf::synthetic::gas_for_detector;
use nlinterf::Execution;

use crate::config::{load_lines, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::write_atomic;

pub struct SimulateArgs {
    pub config: PathBuf,
    pub vacuum: bool,
    pub seed: Option<u64>,
    pub no_noise: bool,
    pub output: Option<PathBuf>,
}

/// Writes the map and a 16-bit PGM preview with its scale as JSON. Returns
/// the map path.
pub fn simulate(args: &SimulateArgs) -> CliResult<PathBuf> {
    let run = RunConfig::load(&args.config)?;
    let config = run.interferometer()?;
    let exec = Execution::default();
    let map = if args.vacuum {
        intensity_map(&config, &Vacuum, exec)
    } else {
        let g = run.gas_section()?;
        let table = gas_for_detector(&run.gas()?, &config, g.grid_padding_cm1, g.grid_step_cm1)
            .map_err(CliError::compute("gas"))?;
        intensity_map(&config, &table, exec)
    }
    .map_err(CliError::compute("simulate"))?;
    let map = if args.no_noise {
        map
    } else {
        let seed = args.seed.unwrap_or(run.seed);
        add_noise(&map, &config.detector.noise, seed, exec).map_err(CliError::compute("noise"))?
    };
    let path = args.output.clone().unwrap_or_else(|| {
        run.output_dir().join(if args.vacuum { "vacuum.nlmap" } else { "sample.nlmap" })
    });
    write_atomic(&path, &map.to_bytes())?;
    let (pgm, scale) = map.to_pgm();
    write_atomic(&path.with_extension("pgm"), &pgm)?;
    let scale = serde_json::to_vec_pretty(&scale).expect("PGM scale serializes");
    write_atomic(&path.with_extension("pgm.json"), &scale)?;
    Ok(path)
}

fn load_map(path: &Path) -> CliResult<InterferogramMap> {
    let file = std::fs::File::open(path).map_err(CliError::io(path))?;
    InterferogramMap::read_from(std::io::BufReader::new(file)).map_err(CliError::data(path))
}

pub struct RetrieveArgs {
    pub config: PathBuf,
    pub sample: PathBuf,
    pub reference: PathBuf,
    pub output: Option<PathBuf>,
    pub stride: usize,
}

/// Writes the spectrum CSV and a summary next to it. Returns (CSV path,
/// summary text).
pub fn retrieve(args: &RetrieveArgs) -> CliResult<(PathBuf, String)> {
    let run = RunConfig::load(&args.config)?;
    let config = run.interferometer()?;
    let sample = load_map(&args.sample)?;
    let reference = load_map(&args.reference)?;
    if !sample.same_axes(&reference) {
        return Err(CliError::Incompatible(format!(
            "{} and {} have different axes",
            args.sample.display(),
            args.reference.display()
        )));
    }
    if args.stride == 0 {
        return Err(CliError::Config("--stride must be at least 1".into()));
    }
    let opts = RetrievalOptions { column_stride: args.stride, ..RetrievalOptions::default() };
    let spectrum = retrieve_spectrum(&sample, &reference, &config, run.visible_index()?, &opts)
        .map_err(CliError::compute("retrieve"))?;
    let path = args.output.clone().unwrap_or_else(|| run.output_dir().join("spectrum.csv"));
    write_atomic(&path, spectrum.to_csv().as_bytes())?;
    let mut summary = match spectrum.summary() {
        Some(s) => s.to_string(),
        None => "points: 0".into(),
    };
    summary.push_str(&format!("\nskipped columns: {}\n", spectrum.skipped.len()));
    write_atomic(&path.with_extension("summary.txt"), summary.as_bytes())?;
    Ok((path, summary))
}

pub struct AbsorptionArgs {
    pub lines: PathBuf,
    pub pressure_torr: f64,
    pub temperature_k: f64,
    pub start_cm1: f64,
    pub stop_cm1: f64,
    pub step_cm1: f64,
    pub resolution_fwhm_cm1: f64,
    pub output: PathBuf,
}

pub fn absorption(args: &AbsorptionArgs) -> CliResult<()> {
    if !(args.step_cm1 > 0.0 && args.stop_cm1 >= args.start_cm1) {
        return Err(CliError::Config("grid: need step > 0 and stop >= start".into()));
    }
    if !(args.resolution_fwhm_cm1 >= 0.0) {
        return Err(CliError::Config("--resolution-fwhm-cm1 must be >= 0".into()));
    }
    let list = load_lines(&args.lines)?;
    let count = ((args.stop_cm1 - args.start_cm1) / args.step_cm1 + 1e-9).floor() as usize + 1;
    let grid = uniform_grid(args.start_cm1, args.step_cm1, count);
    let opts = if args.resolution_fwhm_cm1 > 0.0 {
        AbsorptionOptions::with_resolution(args.resolution_fwhm_cm1)
    } else {
        AbsorptionOptions::default()
    };
    let alpha = absorption_spectrum(&list, &grid, args.pressure_torr, args.temperature_k, &opts)
        .map_err(CliError::compute("absorption"))?;
    let spec = Spectrum::new("wavenumber_cm1", "alpha_cm1", grid, alpha).expect("equal lengths");
    write_atomic(&args.output, spec.to_csv().as_bytes())
}

pub struct KkArgs {
    pub input: PathBuf,
    pub baseline: f64,
    pub output: PathBuf,
}

pub fn kk(args: &KkArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&args.input).map_err(CliError::io(&args.input))?;
    let alpha = Spectrum::from_csv(&text).map_err(CliError::data(&args.input))?;
    let out = kk_index_from_absorption(&alpha.y, &alpha.x, args.baseline)
        .map_err(|e| CliError::Incompatible(format!("{}: {e}", args.input.display())))?;
    for w in &out.warnings {
        log::warn!("{}: {w}", args.input.display());
    }
    let spec = Spectrum::new(&alpha.x_label, "n_minus_1", out.spectrum.grid, out.spectrum.n_minus_1)
        .expect("equal lengths");
    write_atomic(&args.output, spec.to_csv().as_bytes())
}

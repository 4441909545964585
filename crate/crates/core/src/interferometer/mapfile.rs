//! Map container and its file forms.
//!
//! Binary layout: the line `NLIMAP1`, one line of compact JSON (format,
//! version, rows, cols, both axes, metadata), then rows·cols little-endian
//! f64 intensities in row-major order (rows = angles, columns = signal
//! wavelengths).

use std::io::{BufRead, BufReader, Read, Write};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{InterferometerConfig, NoiseModel};
use crate::error::{Error, Result};

const MAGIC: &str = "NLIMAP1";
const FORMAT: &str = "nlinterf-map";
const VERSION: u32 = 1;
/// Upper bound on the header line, to fail fast on binary garbage.
const MAX_HEADER: u64 = 1 << 28;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapMetadata {
    pub config: Option<InterferometerConfig>,
    /// "absorbing" or "transparent"
    pub model: String,
    pub gas: serde_json::Value,
    pub seed: Option<u64>,
    pub noise: Option<NoiseModel>,
    /// Total Gaussian blur applied after generation.
    pub instrument_fwhm_nm: f64,
    pub angle_convention: String,
    pub quasi_collinear: Option<bool>,
}

impl Default for MapMetadata {
    fn default() -> Self {
        Self {
            config: None,
            model: String::new(),
            gas: serde_json::Value::Null,
            seed: None,
            noise: None,
            instrument_fwhm_nm: 0.0,
            angle_convention: "external".into(),
            quasi_collinear: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterferogramMap {
    /// rows = angles, columns = wavelengths
    pub intensity: Array2<f64>,
    pub wavelength_nm: Vec<f64>,
    pub angle_rad: Vec<f64>,
    pub metadata: MapMetadata,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    format: String,
    version: u32,
    rows: usize,
    cols: usize,
    wavelength_nm: Vec<f64>,
    angle_rad: Vec<f64>,
    metadata: MapMetadata,
}

/// Linear scale of a 16-bit PGM preview: intensity = value·scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PgmScale {
    pub scale: f64,
    pub rows: usize,
    pub cols: usize,
    pub wavelength_nm: (f64, f64),
    pub angle_rad: (f64, f64),
}

fn increasing(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() || v.iter().any(|x| !x.is_finite()) || v.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::MapFormat(format!("{name} axis must be finite and strictly increasing")));
    }
    Ok(())
}

impl InterferogramMap {
    pub fn new(
        intensity: Array2<f64>,
        wavelength_nm: Vec<f64>,
        angle_rad: Vec<f64>,
        metadata: MapMetadata,
    ) -> Result<Self> {
        increasing("wavelength", &wavelength_nm)?;
        increasing("angle", &angle_rad)?;
        if intensity.dim() != (angle_rad.len(), wavelength_nm.len()) {
            return Err(Error::MapFormat(format!(
                "intensity is {:?} but axes are {} angles × {} wavelengths",
                intensity.dim(),
                angle_rad.len(),
                wavelength_nm.len()
            )));
        }
        if intensity.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::MapFormat("intensity must be finite and non-negative".into()));
        }
        Ok(Self {
            intensity,
            wavelength_nm,
            angle_rad,
            metadata,
        })
    }

    pub fn rows(&self) -> usize {
        self.angle_rad.len()
    }

    pub fn cols(&self) -> usize {
        self.wavelength_nm.len()
    }

    /// Angular cross-section at column `j`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.intensity.column(j).to_vec()
    }

    /// True when both maps have identical axes.
    pub fn same_axes(&self, other: &InterferogramMap) -> bool {
        self.wavelength_nm == other.wavelength_nm && self.angle_rad == other.angle_rad
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let header = Header {
            format: FORMAT.into(),
            version: VERSION,
            rows: self.rows(),
            cols: self.cols(),
            wavelength_nm: self.wavelength_nm.clone(),
            angle_rad: self.angle_rad.clone(),
            metadata: self.metadata.clone(),
        };
        writeln!(w, "{MAGIC}")?;
        serde_json::to_writer(&mut w, &header)?;
        w.write_all(b"\n")?;
        let mut buf = Vec::with_capacity(8 * self.intensity.len());
        for v in self.intensity.iter() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let mut r = BufReader::new(r);
        let mut magic = String::new();
        (&mut r).take(64).read_line(&mut magic)?;
        if magic.trim_end() != MAGIC {
            return Err(Error::MapFormat(format!(
                "missing `{MAGIC}` signature (found {:?})",
                magic.trim_end()
            )));
        }
        let mut line = Vec::new();
        (&mut r).take(MAX_HEADER).read_until(b'\n', &mut line)?;
        let header: Header = serde_json::from_slice(&line)
            .map_err(|e| Error::MapFormat(format!("header JSON: {e}")))?;
        if header.format != FORMAT || header.version != VERSION {
            return Err(Error::MapFormat(format!(
                "unsupported format {} version {}",
                header.format, header.version
            )));
        }
        if header.wavelength_nm.len() != header.cols || header.angle_rad.len() != header.rows {
            return Err(Error::MapFormat(format!(
                "header declares {}×{} but axes have {}×{} entries",
                header.rows,
                header.cols,
                header.angle_rad.len(),
                header.wavelength_nm.len()
            )));
        }
        let n = header.rows * header.cols;
        let mut payload = Vec::with_capacity(8 * n);
        r.read_to_end(&mut payload)?;
        if payload.len() != 8 * n {
            return Err(Error::MapFormat(format!(
                "payload has {} bytes, expected {} for {}×{} float64",
                payload.len(),
                8 * n,
                header.rows,
                header.cols
            )));
        }
        let values: Vec<f64> = payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        let intensity = Array2::from_shape_vec((header.rows, header.cols), values)
            .map_err(|e| Error::MapFormat(e.to_string()))?;
        Self::new(intensity, header.wavelength_nm, header.angle_rad, header.metadata)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::read_from(std::fs::File::open(path)?)
    }

    /// First row holds the wavelengths, first column the angles. Values
    /// use the shortest round-trip decimal form, so nothing is lost.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("angle_rad\\wavelength_nm");
        for w in &self.wavelength_nm {
            s.push_str(&format!(",{w}"));
        }
        s.push('\n');
        for (i, a) in self.angle_rad.iter().enumerate() {
            s.push_str(&a.to_string());
            for v in self.intensity.row(i) {
                s.push_str(&format!(",{v}"));
            }
            s.push('\n');
        }
        s
    }

    /// Inverse of [`InterferogramMap::to_csv`]; metadata is left default.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(text.as_bytes());
        let mut records = rdr.records();
        let num = |s: &str, row: usize| -> Result<f64> {
            s.trim()
                .parse()
                .map_err(|_| Error::MapFormat(format!("CSV row {row}: cannot parse {s:?}")))
        };
        let head = records
            .next()
            .ok_or_else(|| Error::MapFormat("empty CSV".into()))??;
        let waves = head.iter().skip(1).map(|s| num(s, 1)).collect::<Result<Vec<_>>>()?;
        let mut angles = Vec::new();
        let mut values = Vec::new();
        for (k, rec) in records.enumerate() {
            let rec = rec?;
            let row = k + 2;
            if rec.len() != waves.len() + 1 {
                return Err(Error::MapFormat(format!(
                    "CSV row {row} has {} fields, expected {}",
                    rec.len(),
                    waves.len() + 1
                )));
            }
            angles.push(num(&rec[0], row)?);
            for s in rec.iter().skip(1) {
                values.push(num(s, row)?);
            }
        }
        let intensity = Array2::from_shape_vec((angles.len(), waves.len()), values)
            .map_err(|e| Error::MapFormat(e.to_string()))?;
        Self::new(intensity, waves, angles, MapMetadata::default())
    }

    /// 16-bit binary PGM preview (rows = angles) and its linear scale.
    pub fn to_pgm(&self) -> (Vec<u8>, PgmScale) {
        let max = self.intensity.iter().cloned().fold(0.0f64, f64::max);
        let scale = if max > 0.0 { max / 65535.0 } else { 1.0 };
        let mut out = format!("P5\n{} {}\n65535\n", self.cols(), self.rows()).into_bytes();
        for v in self.intensity.iter() {
            let q = (v / scale).round().clamp(0.0, 65535.0) as u16;
            out.extend_from_slice(&q.to_be_bytes());
        }
        let meta = PgmScale {
            scale,
            rows: self.rows(),
            cols: self.cols(),
            wavelength_nm: (self.wavelength_nm[0], self.wavelength_nm[self.cols() - 1]),
            angle_rad: (self.angle_rad[0], self.angle_rad[self.rows() - 1]),
        };
        (out, meta)
    }
}

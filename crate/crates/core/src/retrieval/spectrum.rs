use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ColumnFit, SkippedColumn};
use crate::error::{Error, Result};

const CSV_HEADER: [&str; 6] = ["idler_nm", "n", "sigma_n", "alpha_cm1", "sigma_alpha_cm1", "converged"];

/// Idler-side spectra on ascending idler wavelength. n is NaN where the
/// fringe contrast was too low to fix the phase.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RetrievedSpectrum {
    pub idler_nm: Vec<f64>,
    pub n: Vec<f64>,
    pub alpha: Vec<f64>,
    pub sigma_n: Vec<f64>,
    pub sigma_alpha: Vec<f64>,
    pub converged: Vec<bool>,
    /// Per-point fits, same order as the arrays (empty after CSV import).
    pub diagnostics: Vec<ColumnFit>,
    pub skipped: Vec<SkippedColumn>,
}

/// Peak and width of the retrieved absorption band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandSummary {
    pub points: usize,
    pub peak_alpha_cm1: f64,
    pub peak_idler_nm: f64,
    /// Full width at half of the peak α, by linear interpolation; NaN when
    /// the band runs off either end.
    pub fwhm_nm: f64,
}

impl fmt::Display for BandSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "points: {}", self.points)?;
        writeln!(f, "peak alpha: {:.6} cm^-1", self.peak_alpha_cm1)?;
        writeln!(f, "peak position: {:.2} nm", self.peak_idler_nm)?;
        write!(f, "FWHM: {:.1} nm", self.fwhm_nm)
    }
}

impl RetrievedSpectrum {
    pub fn len(&self) -> usize {
        self.idler_nm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idler_nm.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut s = CSV_HEADER.join(",");
        s.push('\n');
        for i in 0..self.len() {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.idler_nm[i],
                self.n[i],
                self.sigma_n[i],
                self.alpha[i],
                self.sigma_alpha[i],
                self.converged[i]
            ));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        if header != CSV_HEADER {
            return Err(Error::Grid(format!("unexpected spectrum columns {header:?}")));
        }
        let mut out = RetrievedSpectrum::default();
        for (k, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let row = k + 2;
            let num = |i: usize| -> Result<f64> {
                rec[i].trim().parse().map_err(|_| {
                    Error::Grid(format!("row {row}, column {}: cannot parse {:?}", CSV_HEADER[i], &rec[i]))
                })
            };
            out.idler_nm.push(num(0)?);
            out.n.push(num(1)?);
            out.sigma_n.push(num(2)?);
            out.alpha.push(num(3)?);
            out.sigma_alpha.push(num(4)?);
            out.converged.push(match rec[5].trim() {
                "true" => true,
                "false" => false,
                other => return Err(Error::Grid(format!("row {row}: converged flag {other:?}"))),
            });
        }
        Ok(out)
    }

    pub fn summary(&self) -> Option<BandSummary> {
        let (ip, &peak) = self
            .alpha
            .iter()
            .enumerate()
            .filter(|(_, a)| a.is_finite())
            .max_by(|a, b| a.1.total_cmp(b.1))?;
        let half = peak / 2.0;
        let x = &self.idler_nm;
        let a = &self.alpha;
        let left = (1..=ip).rev().find(|&i| a[i - 1] < half).map(|i| {
            x[i - 1] + (half - a[i - 1]) * (x[i] - x[i - 1]) / (a[i] - a[i - 1])
        });
        let right = (ip..a.len() - 1).find(|&i| a[i + 1] < half).map(|i| {
            x[i] + (a[i] - half) * (x[i + 1] - x[i]) / (a[i] - a[i + 1])
        });
        let fwhm = match (left, right) {
            (Some(l), Some(r)) => r - l,
            _ => f64::NAN,
        };
        Some(BandSummary {
            points: self.len(),
            peak_alpha_cm1: peak,
            peak_idler_nm: x[ip],
            fwhm_nm: fwhm,
        })
    }
}

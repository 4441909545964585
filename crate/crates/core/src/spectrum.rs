//! Two-column spectrum CSV: a header row naming both columns, then one
//! `x,y` pair per line. Values are written in shortest round-trip form.

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub x_label: String,
    pub y_label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Spectrum {
    pub fn new(x_label: &str, y_label: &str, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidInput(format!(
                "spectrum columns differ in length ({} vs {})",
                x.len(),
                y.len()
            )));
        }
        Ok(Self {
            x_label: x_label.into(),
            y_label: y_label.into(),
            x,
            y,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{},{}\n", self.x_label, self.y_label);
        for (x, y) in self.x.iter().zip(&self.y) {
            writeln!(out, "{x},{y}").unwrap();
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader.headers()?.clone();
        if headers.len() != 2 {
            return Err(Error::InvalidInput(format!(
                "spectrum CSV needs exactly 2 columns, header has {}",
                headers.len()
            )));
        }
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for record in reader.records() {
            let record = record?;
            let row = record.position().map(|p| p.line() as usize).unwrap_or(0);
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| Error::LineListRow {
                    row,
                    message: format!("cannot parse {s:?}"),
                })
            };
            x.push(parse(&record[0])?);
            y.push(parse(&record[1])?);
        }
        Self::new(&headers[0], &headers[1], x, y)
    }
}

/// Uniform grid `start + i·step`, `count` points.
pub fn uniform_grid(start: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| start + i as f64 * step).collect()
}

/// Piecewise-linear interpolation of `(xs, ys)` at `x`; `xs` increasing.
/// Returns `None` outside `[xs[0], xs[last]]`.
pub fn interp_linear(xs: &[f64], ys: &[f64], x: f64) -> Option<f64> {
    let n = xs.len();
    if n == 0 || x < xs[0] || x > xs[n - 1] || x.is_nan() {
        return None;
    }
    if n == 1 {
        return Some(ys[0]);
    }
    let i = xs.partition_point(|&v| v <= x).clamp(1, n - 1);
    let (x0, x1) = (xs[i - 1], xs[i]);
    let t = (x - x0) / (x1 - x0);
    Some(ys[i - 1] + t * (ys[i] - ys[i - 1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn interp() {
        let xs = [0.0, 1.0, 3.0];
        let ys = [0.0, 2.0, 6.0];
        assert_eq!(interp_linear(&xs, &ys, 2.0), Some(4.0));
        assert_eq!(interp_linear(&xs, &ys, 3.0), Some(6.0));
        assert_eq!(interp_linear(&xs, &ys, 0.0), Some(0.0));
        assert_eq!(interp_linear(&xs, &ys, 3.1), None);
    }

    #[test]
    fn rejects_wrong_width() {
        assert!(Spectrum::from_csv("a,b,c\n1,2,3\n").is_err());
    }

    proptest! {
        #[test]
        fn csv_round_trip(v in proptest::collection::vec((-1e30f64..1e30, -1e-3f64..1e3), 0..50)) {
            let (x, y): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
            let s = Spectrum::new("wavenumber_cm1", "alpha_cm1", x, y).unwrap();
            prop_assert_eq!(Spectrum::from_csv(&s.to_csv()).unwrap(), s);
        }
    }
}

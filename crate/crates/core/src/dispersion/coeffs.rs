//! Coefficient files. TOML, wavelengths in µm, each model declaring its
//! own `form`:
//!
//! ```toml
//! name = "MgO:LiNbO3"
//! reference = "free text"
//!
//! [ordinary]
//! form = "sellmeier"          # n² = a + Σ b·λ²/(λ² − c)
//! valid_um = [0.45, 5.0]
//! a = 1.0
//! terms = [[2.4272, 0.01478], [1.4617, 0.05612]]
//!
//! [extraordinary]
//! form = "pole"               # n² = a + Σ b/(λ² − c) − d·λ²
//! valid_um = [0.45, 5.0]
//! a = 4.9
//! terms = [[0.11, 0.04]]
//! d = 0.027
//! ```
//!
//! `form = "constant"` takes a single key `n`. Unknown keys are errors.

use serde::Deserialize;

use super::{DispersionForm, SellmeierModel};
use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelEntry {
    form: String,
    valid_um: [f64; 2],
    a: Option<f64>,
    terms: Option<Vec<[f64; 2]>>,
    d: Option<f64>,
    n: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CrystalEntry {
    name: String,
    reference: Option<String>,
    ordinary: ModelEntry,
    extraordinary: ModelEntry,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrystalFile {
    pub name: String,
    pub reference: Option<String>,
    pub ordinary: SellmeierModel,
    pub extraordinary: SellmeierModel,
}

fn build(entry: ModelEntry, section: &str) -> Result<SellmeierModel> {
    let missing = |key: &str| Error::Coefficients(format!("[{section}] form `{}` requires `{key}`", entry.form));
    let unexpected = |key: &str| Error::Coefficients(format!("[{section}] form `{}` does not take `{key}`", entry.form));
    let form = match entry.form.as_str() {
        "sellmeier" => {
            if entry.d.is_some() {
                return Err(unexpected("d"));
            }
            if entry.n.is_some() {
                return Err(unexpected("n"));
            }
            DispersionForm::Sellmeier {
                a: entry.a.ok_or_else(|| missing("a"))?,
                terms: entry.terms.clone().ok_or_else(|| missing("terms"))?,
            }
        }
        "pole" => {
            if entry.n.is_some() {
                return Err(unexpected("n"));
            }
            DispersionForm::Pole {
                a: entry.a.ok_or_else(|| missing("a"))?,
                terms: entry.terms.clone().ok_or_else(|| missing("terms"))?,
                d: entry.d.unwrap_or(0.0),
            }
        }
        "constant" => {
            for (key, present) in [("a", entry.a.is_some()), ("terms", entry.terms.is_some()), ("d", entry.d.is_some())] {
                if present {
                    return Err(unexpected(key));
                }
            }
            DispersionForm::Constant {
                n: entry.n.ok_or_else(|| missing("n"))?,
            }
        }
        other => {
            return Err(Error::Coefficients(format!(
                "[{section}] unknown form `{other}` (expected sellmeier, pole or constant)"
            )))
        }
    };
    SellmeierModel::new(form, (entry.valid_um[0], entry.valid_um[1]))
        .map_err(|e| Error::Coefficients(format!("[{section}] {e}")))
}

/// Parses a crystal file with `[ordinary]` and `[extraordinary]` tables.
pub fn parse_crystal_file(text: &str) -> Result<CrystalFile> {
    let entry: CrystalEntry =
        toml::from_str(text).map_err(|e| Error::Coefficients(e.to_string()))?;
    Ok(CrystalFile {
        name: entry.name,
        reference: entry.reference,
        ordinary: build(entry.ordinary, "ordinary")?,
        extraordinary: build(entry.extraordinary, "extraordinary")?,
    })
}

/// Parses a single-model file (top-level `form`, `valid_um`, ...).
pub fn parse_model_file(text: &str) -> Result<SellmeierModel> {
    let entry: ModelEntry =
        toml::from_str(text).map_err(|e| Error::Coefficients(e.to_string()))?;
    build(entry, "model")
}

#[cfg(test)]
mod tests {
    use super::*;

    const SHIPPED: &str = include_str!("../../data/mgo_linbo3.toml");

    #[test]
    fn shipped_file_matches_independent_tabulation() {
        // Cross-check against a second, independently fitted dispersion
        // formula for 5 mol% MgO:LiNbO3 (Gayer et al. 2008, 24.5 °C),
        // evaluated offline: n_o, n_e at 0.6328 and 1.064 µm.
        let c = parse_crystal_file(SHIPPED).unwrap();
        let checks = [
            (0.6328, 2.283_313, 2.193_895),
            (1.064, 2.229_571, 2.148_154),
        ];
        for (l, no, ne) in checks {
            let o = c.ordinary.index(l).unwrap();
            let e = c.extraordinary.index(l).unwrap();
            assert!((o - no).abs() < 1.5e-3, "n_o({l}) = {o}");
            assert!((e - ne).abs() < 1.5e-3, "n_e({l}) = {e}");
        }
        // frozen values of the shipped coefficients themselves
        assert!((c.ordinary.index(0.6328).unwrap() - 2.282_485_1).abs() < 1e-7);
        assert!((c.extraordinary.index(4.3).unwrap() - 2.035_560_6).abs() < 1e-7);
    }

    #[test]
    fn rejects_unknown_keys_and_forms() {
        let bad = "form = \"sellmeier\"\nvalid_um = [0.5, 2.0]\na = 1.0\nterms = []\ncolour = 3\n";
        assert!(parse_model_file(bad).is_err());
        let bad = "form = \"cauchy\"\nvalid_um = [0.5, 2.0]\n";
        assert!(parse_model_file(bad).unwrap_err().to_string().contains("unknown form"));
        let bad = "form = \"constant\"\nvalid_um = [0.5, 2.0]\n";
        assert!(parse_model_file(bad).unwrap_err().to_string().contains("requires `n`"));
    }

    #[test]
    fn constant_form() {
        let m = parse_model_file("form = \"constant\"\nvalid_um = [0.4, 5.0]\nn = 2.2\n").unwrap();
        assert_eq!(m.index(1.0).unwrap(), 2.2);
        assert!(m.index(5.1).is_err());
    }
}

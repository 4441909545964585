//! HITRAN 2004+ `.par` records: 160 fixed-width ASCII columns.
//!
//! | columns | field                | Fortran |
//! |---------|----------------------|---------|
//! | 1–2     | molecule id          | I2      |
//! | 3       | isotopologue id      | I1/A1   |
//! | 4–15    | ν (cm⁻¹)             | F12.6   |
//! | 16–25   | S (cm⁻¹/(molec·cm⁻²))| E10.3   |
//! | 26–35   | Einstein A (s⁻¹)     | E10.3   |
//! | 36–40   | γ_air (cm⁻¹/atm)     | F5.4    |
//! | 41–45   | γ_self (cm⁻¹/atm)    | F5.3    |
//! | 46–55   | E″ (cm⁻¹)            | F10.4   |
//! | 56–59   | n_air                | F4.2    |
//! | 60–67   | δ_air (cm⁻¹/atm)     | F8.6    |
//! | 68–160  | quanta, errors, refs, g′, g″ (kept verbatim) | |

use std::ops::Range;

use super::{LineList, SpectralLine};
use crate::error::{Error, Result};

pub const RECORD_LEN: usize = 160;

const MOLECULE: Range<usize> = 0..2;
const ISOTOPE: Range<usize> = 2..3;
const NU: Range<usize> = 3..15;
const INTENSITY: Range<usize> = 15..25;
const EINSTEIN_A: Range<usize> = 25..35;
const GAMMA_AIR: Range<usize> = 35..40;
const GAMMA_SELF: Range<usize> = 40..45;
const E_LOWER: Range<usize> = 45..55;
const N_AIR: Range<usize> = 55..59;
const DELTA_AIR: Range<usize> = 59..67;
const TAIL: Range<usize> = 67..160;

#[derive(Debug, Clone, PartialEq)]
pub struct HitranRecord {
    pub molecule_id: u8,
    pub isotope: char,
    pub line: SpectralLine,
    pub einstein_a: f64,
    pub delta_air: f64,
    /// Columns 68–160, untouched.
    pub tail: String,
    /// Optional numeric fields that were blank and defaulted to zero.
    pub blank_fields: Vec<&'static str>,
}

impl HitranRecord {
    pub fn gamma_self_defaulted(&self) -> bool {
        self.blank_fields.contains(&"gamma_self")
    }
}

fn number(rec: &str, field: &'static str, cols: Range<usize>) -> Result<Option<f64>> {
    let raw = &rec[cols.clone()];
    let text = raw.trim();
    if text.is_empty() {
        return Ok(None);
    }
    let normalized: String = text
        .chars()
        .map(|c| if c == 'D' || c == 'd' { 'E' } else { c })
        .collect();
    normalized
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(Some)
        .ok_or_else(|| Error::RecordField {
            field,
            columns: cols,
            text: raw.to_string(),
        })
}

fn required(rec: &str, field: &'static str, cols: Range<usize>) -> Result<f64> {
    number(rec, field, cols.clone())?.ok_or_else(|| Error::RecordField {
        field,
        columns: cols.clone(),
        text: rec[cols].to_string(),
    })
}

/// Decodes one 160-character record.
pub fn parse_hitran_record(record: &str) -> Result<HitranRecord> {
    let n = record.chars().count();
    if n != RECORD_LEN {
        return Err(Error::RecordLength(n));
    }
    if !record.is_ascii() {
        return Err(Error::RecordField {
            field: "record",
            columns: 0..RECORD_LEN,
            text: record.to_string(),
        });
    }
    let molecule_id = record[MOLECULE]
        .trim()
        .parse::<u8>()
        .map_err(|_| Error::RecordField {
            field: "molecule_id",
            columns: MOLECULE,
            text: record[MOLECULE].to_string(),
        })?;
    let isotope = record[ISOTOPE].chars().next().unwrap_or(' ');
    let mut blank_fields = Vec::new();
    let mut optional = |field: &'static str, cols: Range<usize>| -> Result<f64> {
        Ok(number(record, field, cols)?.unwrap_or_else(|| {
            blank_fields.push(field);
            0.0
        }))
    };
    let einstein_a = optional("einstein_a", EINSTEIN_A)?;
    let gamma_air = optional("gamma_air", GAMMA_AIR)?;
    let gamma_self = optional("gamma_self", GAMMA_SELF)?;
    let e_lower = optional("e_lower", E_LOWER)?;
    let n_exp = optional("n_air", N_AIR)?;
    let delta_air = optional("delta_air", DELTA_AIR)?;
    let line = SpectralLine {
        nu0: required(record, "nu", NU)?,
        intensity: required(record, "intensity", INTENSITY)?,
        gamma_self,
        gamma_air,
        n_exp,
        e_lower,
    };
    Ok(HitranRecord {
        molecule_id,
        isotope,
        line,
        einstein_a,
        delta_air,
        tail: record[TAIL].to_string(),
        blank_fields,
    })
}

/// Fortran Fw.d: fixed decimals, leading zero dropped if that is needed
/// to fit the width (`.0734`, `-.001234`).
fn fixed(value: f64, width: usize, decimals: usize, field: &'static str, cols: Range<usize>) -> Result<String> {
    let mut s = format!("{value:.decimals$}");
    if s.len() > width {
        if let Some(rest) = s.strip_prefix("0.") {
            s = format!(".{rest}");
        } else if let Some(rest) = s.strip_prefix("-0.") {
            s = format!("-.{rest}");
        }
    }
    if s.len() > width || !value.is_finite() {
        return Err(Error::RecordField { field, columns: cols, text: s });
    }
    Ok(format!("{s:>width$}"))
}

/// Fortran E10.3 with a signed, at-least-two-digit exponent: `3.541E-18`.
fn exponent(value: f64, field: &'static str, cols: Range<usize>) -> Result<String> {
    let s = format!("{value:.3e}");
    let (mantissa, exp) = s.split_once('e').expect("LowerExp always has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    let s = format!("{mantissa}E{sign}{:02}", exp.abs());
    if s.len() > 10 || !value.is_finite() {
        return Err(Error::RecordField { field, columns: cols, text: s });
    }
    Ok(format!("{s:>10}"))
}

/// Encodes a record into the 160-column layout. Values that do not fit
/// their column are errors.
pub fn format_hitran_record(rec: &HitranRecord) -> Result<String> {
    if rec.molecule_id > 99 || !rec.isotope.is_ascii() || rec.isotope.is_ascii_control() {
        return Err(Error::RecordField {
            field: "molecule_id",
            columns: MOLECULE,
            text: format!("{}{}", rec.molecule_id, rec.isotope),
        });
    }
    let tail_len = TAIL.end - TAIL.start;
    if rec.tail.len() != tail_len || !rec.tail.is_ascii() {
        return Err(Error::RecordField {
            field: "tail",
            columns: TAIL,
            text: rec.tail.clone(),
        });
    }
    let l = &rec.line;
    let out = [
        format!("{:>2}", rec.molecule_id),
        rec.isotope.to_string(),
        fixed(l.nu0, 12, 6, "nu", NU)?,
        exponent(l.intensity, "intensity", INTENSITY)?,
        exponent(rec.einstein_a, "einstein_a", EINSTEIN_A)?,
        fixed(l.gamma_air, 5, 4, "gamma_air", GAMMA_AIR)?,
        fixed(l.gamma_self, 5, 3, "gamma_self", GAMMA_SELF)?,
        fixed(l.e_lower, 10, 4, "e_lower", E_LOWER)?,
        fixed(l.n_exp, 4, 2, "n_air", N_AIR)?,
        fixed(rec.delta_air, 8, 6, "delta_air", DELTA_AIR)?,
        rec.tail.clone(),
    ]
    .concat();
    debug_assert_eq!(out.len(), RECORD_LEN);
    Ok(out)
}

/// Approximate molar mass (g/mol) of the principal isotopologue for
/// common HITRAN molecule ids.
pub fn molar_mass_for(molecule_id: u8) -> Option<(&'static str, f64)> {
    Some(match molecule_id {
        1 => ("H2O", 18.010_565),
        2 => ("CO2", 43.989_830),
        3 => ("O3", 47.984_745),
        4 => ("N2O", 44.001_062),
        5 => ("CO", 27.994_915),
        6 => ("CH4", 16.031_300),
        7 => ("O2", 31.989_830),
        _ => return None,
    })
}

/// Parses a `.par` file. Errors name the 1-based record number. Records
/// for other molecules than the first one are rejected.
pub fn parse_hitran_file(text: &str) -> Result<(LineList, Vec<String>)> {
    let mut lines = Vec::new();
    let mut warnings = Vec::new();
    let mut molecule: Option<u8> = None;
    for (i, raw) in text.lines().enumerate() {
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() {
            continue;
        }
        let rec = parse_hitran_record(raw).map_err(|e| Error::LineListRow {
            row: i + 1,
            message: e.to_string(),
        })?;
        match molecule {
            None => molecule = Some(rec.molecule_id),
            Some(m) if m != rec.molecule_id => {
                return Err(Error::LineListRow {
                    row: i + 1,
                    message: format!("molecule id {} differs from {m}", rec.molecule_id),
                })
            }
            _ => {}
        }
        if !rec.blank_fields.is_empty() {
            warnings.push(format!(
                "record {}: blank {} defaulted to 0",
                i + 1,
                rec.blank_fields.join(", ")
            ));
        }
        lines.push(rec.line);
    }
    let (name, mass) = match molecule.and_then(molar_mass_for) {
        Some(v) => v,
        None => {
            if let Some(m) = molecule {
                warnings.push(format!("unknown molecule id {m}; assuming molar mass 44"));
            }
            ("unknown", 44.0)
        }
    };
    Ok((LineList::new(name, mass, lines)?, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Hand-built record, columns laid out one field at a time.
    fn fixture() -> String {
        let mut s = String::new();
        s.push_str(" 2"); // 1-2
        s.push('1'); // 3
        s.push_str(" 2349.143100"); // 4-15
        s.push_str(" 3.541E-18"); // 16-25
        s.push_str(" 2.117E+02"); // 26-35
        s.push_str(".0734"); // 36-40
        s.push_str("0.093"); // 41-45
        s.push_str("  667.3800"); // 46-55
        s.push_str("0.75"); // 56-59
        s.push_str("-.002700"); // 60-67
        s.push_str(&"x".repeat(93)); // 68-160
        assert_eq!(s.len(), 160);
        s
    }

    #[test]
    fn column_spans() {
        let r = parse_hitran_record(&fixture()).unwrap();
        assert_eq!(r.molecule_id, 2);
        assert_eq!(r.isotope, '1');
        assert_eq!(r.line.nu0, 2349.1431);
        assert_eq!(r.line.intensity, 3.541e-18);
        assert_eq!(r.einstein_a, 211.7);
        assert_eq!(r.line.gamma_air, 0.0734);
        assert_eq!(r.line.gamma_self, 0.093);
        assert_eq!(r.line.e_lower, 667.38);
        assert_eq!(r.line.n_exp, 0.75);
        assert_eq!(r.delta_air, -0.0027);
        assert!(r.blank_fields.is_empty());
        assert_eq!(format_hitran_record(&r).unwrap(), fixture());
    }

    #[test]
    fn fortran_d_exponent() {
        let rec = fixture().replacen(" 3.541E-18", " 3.541D-18", 1);
        assert_eq!(parse_hitran_record(&rec).unwrap().line.intensity, 3.541e-18);
    }

    #[test]
    fn wrong_length() {
        let rec = &fixture()[..159];
        assert!(matches!(parse_hitran_record(rec), Err(Error::RecordLength(159))));
    }

    #[test]
    fn blank_gamma_self_defaults_with_flag() {
        let mut rec = fixture();
        rec.replace_range(40..45, "     ");
        let r = parse_hitran_record(&rec).unwrap();
        assert_eq!(r.line.gamma_self, 0.0);
        assert!(r.gamma_self_defaulted());
    }

    #[test]
    fn bad_field_names_its_columns() {
        let mut rec = fixture();
        rec.replace_range(15..25, " 3.54?E-18");
        let err = parse_hitran_record(&rec).unwrap_err().to_string();
        assert!(err.contains("16-25"), "{err}");
        assert!(err.contains("intensity"), "{err}");
    }

    #[test]
    fn file_reports_record_number() {
        let good = fixture();
        let text = format!("{good}\n{}\n", &good[..150]);
        let err = parse_hitran_file(&text).unwrap_err().to_string();
        assert!(err.contains("row 2"), "{err}");
        let (list, warnings) = parse_hitran_file(&format!("{good}\n{good}\n")).unwrap();
        assert_eq!(list.len(), 2);
        assert_eq!(list.molecule, "CO2");
        assert!(warnings.is_empty());
    }
}

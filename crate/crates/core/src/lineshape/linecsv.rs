//! CSV line lists.
//!
//! ```text
//! # molecule = CO2
//! # molar_mass_g_per_mol = 43.98983
//! wavenumber_cm1,intensity,gamma_air,gamma_self,n_air,e_lower
//! 2349.1431,3.541e-18,0.0734,0.093,0.75,0.0
//! ```
//!
//! `wavenumber_cm1` (alias `nu0`) and `intensity` (alias `s`) are
//! mandatory. Missing optional columns default to γ = 0, n_air = 0.75,
//! E″ = 0. Unknown columns are ignored with a warning. `#` lines are
//! comments; `# key = value` comments before the header carry metadata.

use std::fmt::Write as _;

use super::{LineList, SpectralLine};
use crate::error::{Error, Result};

const DEFAULT_MOLAR_MASS: f64 = 44.0;

fn column_role(name: &str) -> Option<usize> {
    match name.to_ascii_lowercase().as_str() {
        "wavenumber_cm1" | "nu0" => Some(0),
        "intensity" | "s" => Some(1),
        "gamma_air" => Some(2),
        "gamma_self" => Some(3),
        "n_air" | "n_exp" => Some(4),
        "e_lower" | "elower" => Some(5),
        _ => None,
    }
}

const ROLE_NAMES: [&str; 6] = ["wavenumber_cm1", "intensity", "gamma_air", "gamma_self", "n_air", "e_lower"];

/// Parses a CSV line list. Returns the list (sorted by center) and any
/// warnings.
pub fn parse_line_csv(text: &str) -> Result<(LineList, Vec<String>)> {
    let mut warnings = Vec::new();
    let mut molecule = String::from("unknown");
    let mut molar_mass = None;
    for line in text.lines() {
        let Some(comment) = line.trim_start().strip_prefix('#') else {
            if line.trim().is_empty() {
                continue;
            }
            break;
        };
        if let Some((k, v)) = comment.split_once('=') {
            match k.trim() {
                "molecule" => molecule = v.trim().to_string(),
                "molar_mass_g_per_mol" => {
                    molar_mass = Some(v.trim().parse::<f64>().map_err(|_| {
                        Error::LineList(format!("bad molar_mass_g_per_mol {:?}", v.trim()))
                    })?)
                }
                _ => {}
            }
        }
    }
    let molar_mass = molar_mass.unwrap_or_else(|| {
        warnings.push(format!("no molar_mass_g_per_mol given; assuming {DEFAULT_MOLAR_MASS}"));
        DEFAULT_MOLAR_MASS
    });

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let mut slots: [Option<usize>; 6] = [None; 6];
    for (i, h) in headers.iter().enumerate() {
        match column_role(h) {
            Some(role) if slots[role].is_none() => slots[role] = Some(i),
            Some(_) => return Err(Error::LineList(format!("duplicate column `{h}`"))),
            None => warnings.push(format!("unknown column `{h}` ignored")),
        }
    }
    for role in 0..2 {
        if slots[role].is_none() {
            return Err(Error::LineList(format!("missing mandatory column `{}`", ROLE_NAMES[role])));
        }
    }

    let mut lines = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let row = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::LineListRow { row, message: e.to_string() }
        })?;
        let row = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let mut values = [0.0, 0.0, 0.0, 0.0, 0.75, 0.0];
        for (role, slot) in slots.iter().enumerate() {
            let Some(col) = slot else { continue };
            let cell = record.get(*col).unwrap_or("");
            values[role] = cell.parse::<f64>().map_err(|_| Error::LineListRow {
                row,
                message: format!("column `{}`: cannot parse {cell:?}", ROLE_NAMES[role]),
            })?;
        }
        let line = SpectralLine {
            nu0: values[0],
            intensity: values[1],
            gamma_air: values[2],
            gamma_self: values[3],
            n_exp: values[4],
            e_lower: values[5],
        };
        line.validate().map_err(|e| Error::LineListRow { row, message: e.to_string() })?;
        lines.push(line);
    }
    Ok((LineList::new(molecule, molar_mass, lines)?, warnings))
}

/// Writes a list in the format read by [`parse_line_csv`]. Values are
/// written in shortest round-trip form, so reading back is lossless.
pub fn write_line_csv(list: &LineList) -> String {
    let mut out = String::new();
    writeln!(out, "# molecule = {}", list.molecule).unwrap();
    writeln!(out, "# molar_mass_g_per_mol = {}", list.molar_mass).unwrap();
    out.push_str(&ROLE_NAMES.join(","));
    out.push('\n');
    for l in list.lines() {
        writeln!(
            out,
            "{},{:e},{},{},{},{}",
            l.nu0, l.intensity, l.gamma_air, l.gamma_self, l.n_exp, l.e_lower
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_rows_sorted() {
        let text = "# molar_mass_g_per_mol = 44.0\nwavenumber_cm1,intensity\n2360.0,1e-19\n2340.0,2e-19\n";
        let (list, warnings) = parse_line_csv(text).unwrap();
        assert_eq!(list.len(), 2);
        assert_eq!(list.lines()[0].nu0, 2340.0);
        assert_eq!(list.lines()[1].intensity, 1e-19);
        assert_eq!(list.lines()[0].n_exp, 0.75);
        assert!(warnings.is_empty());
    }

    #[test]
    fn extra_columns_warn() {
        let text = "# molar_mass_g_per_mol = 44.0\nnu0,s,comment_id\n2349.0,1e-19,7\n";
        let (list, warnings) = parse_line_csv(text).unwrap();
        assert_eq!(list.len(), 1);
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("comment_id"));
    }

    #[test]
    fn missing_mandatory_column() {
        let err = parse_line_csv("wavenumber_cm1,gamma_air\n2349,0.07\n").unwrap_err();
        assert!(err.to_string().contains("intensity"));
    }

    #[test]
    fn malformed_row_reports_line() {
        let text = "# molar_mass_g_per_mol = 44.0\nnu0,s\n2349.0,1e-19\n2350.0,abc\n";
        match parse_line_csv(text).unwrap_err() {
            Error::LineListRow { row, .. } => assert_eq!(row, 4),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn empty_body_is_empty_list() {
        let (list, _) = parse_line_csv("nu0,s\n").unwrap();
        assert!(list.is_empty());
    }

    #[test]
    fn write_then_read() {
        let text = "# molecule = CO2\n# molar_mass_g_per_mol = 43.98983\nnu0,s,gamma_air,gamma_self,n_air,e_lower\n2349.1431,3.541e-18,0.0734,0.093,0.75,12.5\n";
        let (list, _) = parse_line_csv(text).unwrap();
        let (back, warnings) = parse_line_csv(&write_line_csv(&list)).unwrap();
        assert_eq!(back, list);
        assert!(warnings.is_empty());
    }
}

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Degree of the fallback envelope polynomial.
pub const ENVELOPE_DEGREE: usize = 4;

/// Fringe visibility (I_max − I_min)/(I_max + I_min) of an angular
/// cross-section after dividing out its envelope.
///
/// With `envelope` given, the data are divided by it directly (any
/// constant factor cancels). Otherwise a degree-4 polynomial in the sample
/// index is fitted to the data and used as the envelope. Extrema are taken
/// one per half-fringe, between crossings of the mean level, and refined by
/// a parabola through the extreme sample and its neighbours. The medians of
/// the maxima and of the minima are used, so a lone turning point where the
/// phase itself is stationary (θ = 0) does not bias the result.
pub fn visibility(cross_section: &[f64], envelope: Option<&[f64]>) -> Result<f64> {
    if cross_section.iter().any(|v| !v.is_finite()) {
        return Err(Error::Visibility("non-finite sample".into()));
    }
    if cross_section.iter().all(|&v| v == 0.0) {
        return Err(Error::Visibility("all-zero cross-section".into()));
    }
    let env = match envelope {
        Some(e) => {
            if e.len() != cross_section.len() {
                return Err(Error::Visibility(format!(
                    "envelope has {} samples, data {}",
                    e.len(),
                    cross_section.len()
                )));
            }
            e.to_vec()
        }
        None => polynomial_envelope(cross_section, ENVELOPE_DEGREE)?,
    };
    let emax = env.iter().cloned().fold(0.0f64, f64::max);
    if !(emax > 0.0) {
        return Err(Error::Visibility("envelope is not positive".into()));
    }
    let y: Vec<Option<f64>> = cross_section
        .iter()
        .zip(&env)
        .map(|(&d, &e)| (e > 1e-6 * emax).then(|| d / e))
        .collect();
    let valid: Vec<f64> = y.iter().flatten().cloned().collect();
    let mean = valid.iter().sum::<f64>() / valid.len() as f64;
    let (lo, hi) = valid
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if hi - lo <= 1e-12 * mean.abs() {
        return Ok(0.0);
    }
    let (maxima, minima) = half_fringe_extrema(&y, mean, 0.1 * (hi - lo) / 2.0);
    if maxima.len() + minima.len() < 4 || maxima.is_empty() || minima.is_empty() {
        return Err(Error::Visibility(format!(
            "fewer than 2 fringe periods ({} maxima, {} minima)",
            maxima.len(),
            minima.len()
        )));
    }
    let imax = median(maxima);
    let imin = median(minima);
    Ok(((imax - imin) / (imax + imin)).max(0.0))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Splits the samples into runs above `level + band` and below
/// `level − band` and returns the refined extreme value of every run that
/// is bounded by crossings on both sides.
fn half_fringe_extrema(y: &[Option<f64>], level: f64, band: f64) -> (Vec<f64>, Vec<f64>) {
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    // (sign, index of the extreme sample so far)
    let mut current: Option<(i8, usize)> = None;
    let mut bounded_left = false;
    for i in 0..y.len() {
        let Some(v) = y[i] else {
            current = None;
            bounded_left = false;
            continue;
        };
        let side = if v > level + band {
            1
        } else if v < level - band {
            -1
        } else {
            0
        };
        match current {
            Some((s, k)) if side == 0 || side == s => {
                let better = (s == 1 && v > y[k].unwrap()) || (s == -1 && v < y[k].unwrap());
                if side == s && better {
                    current = Some((s, i));
                }
            }
            Some((s, k)) => {
                if bounded_left {
                    let e = refine(y, k);
                    if s == 1 { maxima.push(e) } else { minima.push(e) }
                }
                bounded_left = true;
                current = Some((side, i));
            }
            None => {
                if side != 0 {
                    current = Some((side, i));
                }
            }
        }
    }
    (maxima, minima)
}

/// Vertex value of the parabola through samples k−1, k, k+1.
fn refine(y: &[Option<f64>], k: usize) -> f64 {
    let y0 = y[k].unwrap();
    let (Some(Some(ym)), Some(Some(yp))) = (k.checked_sub(1).map(|i| y[i]), y.get(k + 1)) else {
        return y0;
    };
    let curv = ym - 2.0 * y0 + yp;
    if curv == 0.0 {
        return y0;
    }
    y0 - (yp - ym).powi(2) / (8.0 * curv)
}

/// Least-squares polynomial of `degree` in the scaled sample index.
pub fn polynomial_envelope(data: &[f64], degree: usize) -> Result<Vec<f64>> {
    let m = data.len();
    if m <= degree {
        return Err(Error::Visibility(format!("{m} samples cannot fit a degree-{degree} envelope")));
    }
    let x: Vec<f64> = (0..m).map(|i| 2.0 * i as f64 / (m - 1) as f64 - 1.0).collect();
    let a = DMatrix::from_fn(m, degree + 1, |i, j| x[i].powi(j as i32));
    let b = DVector::from_column_slice(data);
    let coef = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::Visibility(e.to_string()))?;
    Ok((a * coef).iter().cloned().collect())
}

/// α = −ln(V/V_ref)/L_m in cm⁻¹ for a gap of `gap_mm`. V = 0 gives +∞.
pub fn alpha_from_visibility(v: f64, v_ref: f64, gap_mm: f64) -> Result<f64> {
    if !(v_ref > 0.0 && v_ref <= 1.0) {
        return Err(Error::Visibility(format!("reference visibility {v_ref} outside (0, 1]")));
    }
    if !(gap_mm > 0.0) {
        return Err(Error::Visibility(format!("gap length {gap_mm} mm must be positive")));
    }
    if !(v >= 0.0) {
        return Err(Error::Visibility(format!("visibility {v} must be non-negative")));
    }
    if v > v_ref {
        return Err(Error::Visibility(format!(
            "negative-absorption anomaly: V = {v} exceeds the reference {v_ref}"
        )));
    }
    if v == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-(v / v_ref).ln() / (gap_mm * 0.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn fringes(v: f64, samples_per_period: f64, periods: f64) -> Vec<f64> {
        let n = (samples_per_period * periods) as usize;
        (0..n)
            .map(|i| 1.0 + v * (2.0 * PI * i as f64 / samples_per_period + 0.3).cos())
            .collect()
    }

    #[test]
    fn flat_envelope_examples() {
        let ones = vec![1.0; 384];
        let v = visibility(&fringes(1.0, 64.0, 6.0), Some(&ones)).unwrap();
        assert!((v - 1.0).abs() < 1e-3, "{v}");
        assert_eq!(visibility(&vec![3.0; 100], None).unwrap(), 0.0);
        assert_eq!(visibility(&vec![3.0; 100], Some(&vec![1.0; 100])).unwrap(), 0.0);
        let v = visibility(&fringes(0.5, 60.0, 5.0), Some(&vec![1.0; 300])).unwrap();
        assert!((v - 0.5).abs() < 1e-3, "{v}");
    }

    #[test]
    fn polynomial_envelope_is_divided_out() {
        let n = 2000;
        let data: Vec<f64> = (0..n)
            .map(|i| {
                let x = i as f64 / n as f64 - 0.5;
                let env = 1.0 - 0.8 * x * x;
                env * (1.0 + 0.6 * (2.0 * PI * i as f64 / 80.0).cos())
            })
            .collect();
        let v = visibility(&data, None).unwrap();
        assert!((v - 0.6).abs() < 2e-3, "{v}");
    }

    #[test]
    fn visibility_errors() {
        assert!(visibility(&vec![0.0; 50], None).is_err());
        let short = fringes(0.5, 50.0, 1.5);
        assert!(matches!(
            visibility(&short, Some(&vec![1.0; short.len()])),
            Err(Error::Visibility(_))
        ));
    }

    #[test]
    fn fine_sampling_is_accurate() {
        for v in [0.95, 0.6, 0.1] {
            let got = visibility(&fringes(v, 200.0, 4.0), Some(&vec![2.0; 800])).unwrap();
            assert!((got - v).abs() < 1e-6, "{got} vs {v}");
        }
    }

    #[test]
    fn stationary_phase_bump_is_ignored() {
        // φ = φ₀ + cθ² turns around at θ = 0 without reaching ±1
        let data: Vec<f64> = (0..4001)
            .map(|i| {
                let t = (i as f64 - 2000.0) / 2000.0;
                1.0 + 0.7 * (0.9 + 40.0 * t * t).cos()
            })
            .collect();
        let v = visibility(&data, Some(&vec![1.0; 4001])).unwrap();
        assert!((v - 0.7).abs() < 1e-6, "{v}");
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_from_visibility(0.8, 0.8, 25.0).unwrap(), 0.0);
        let a = alpha_from_visibility((-1.0f64).exp() * 0.9, 0.9, 25.0).unwrap();
        assert!((a - 0.4).abs() < 1e-12);
        let a = alpha_from_visibility(0.9048, 1.0, 25.0).unwrap();
        assert!((a - 0.04).abs() < 1e-4, "{a}");
        assert_eq!(alpha_from_visibility(0.0, 1.0, 25.0).unwrap(), f64::INFINITY);
        assert!(alpha_from_visibility(0.95, 0.9, 25.0).is_err());
        assert!(alpha_from_visibility(0.5, 1.2, 25.0).is_err());
    }
}

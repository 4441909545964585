use ndarray::Array2;

use super::InterferogramMap;
use crate::error::{invalid, Result};
use crate::units::fwhm_to_sigma;

/// Kernel support in standard deviations.
const KERNEL_SIGMAS: f64 = 6.0;

/// Convolves every angular row along wavelength with a Gaussian of
/// `fwhm_nm`. Near the edges the truncated kernel is renormalized.
pub fn apply_instrument(map: &InterferogramMap, fwhm_nm: f64) -> Result<InterferogramMap> {
    if !(fwhm_nm >= 0.0) {
        return Err(invalid(format!("resolution FWHM {fwhm_nm} nm must be non-negative")));
    }
    let mut out = map.clone();
    if fwhm_nm == 0.0 {
        return Ok(out);
    }
    let sigma = fwhm_to_sigma(fwhm_nm);
    let x = &map.wavelength_nm;
    let reach = KERNEL_SIGMAS * sigma;
    // per output column: first contributing column and its weights
    let kernels: Vec<(usize, Vec<f64>)> = x
        .iter()
        .map(|&xc| {
            let lo = x.partition_point(|&v| v < xc - reach);
            let hi = x.partition_point(|&v| v <= xc + reach);
            let w: Vec<f64> = x[lo..hi]
                .iter()
                .map(|&v| (-0.5 * ((v - xc) / sigma).powi(2)).exp())
                .collect();
            let total: f64 = w.iter().sum();
            (lo, w.into_iter().map(|v| v / total).collect())
        })
        .collect();
    let src = &map.intensity;
    let mut dst = Array2::zeros(src.raw_dim());
    for (row_in, mut row_out) in src.rows().into_iter().zip(dst.rows_mut()) {
        for (j, (lo, w)) in kernels.iter().enumerate() {
            row_out[j] = w.iter().enumerate().map(|(k, wk)| wk * row_in[lo + k]).sum();
        }
    }
    out.intensity = dst;
    out.metadata.instrument_fwhm_nm += fwhm_nm;
    Ok(out)
}

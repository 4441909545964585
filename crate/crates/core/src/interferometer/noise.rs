use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

use super::{InterferogramMap, NoiseModel};
use crate::error::{invalid, Result};
use crate::exec::Execution;

/// Counts = Poisson(I·mean_counts) + N(0, read_noise²), clamped at zero.
/// Each row draws from its own ChaCha8 stream of `seed`, so the result
/// does not depend on execution order.
pub fn add_noise(
    map: &InterferogramMap,
    noise: &NoiseModel,
    seed: u64,
    exec: Execution,
) -> Result<InterferogramMap> {
    if !(noise.mean_counts > 0.0 && noise.read_noise >= 0.0) {
        return Err(invalid("noise model needs mean counts > 0 and read noise >= 0"));
    }
    let read = Normal::new(0.0, noise.read_noise).map_err(|e| invalid(e.to_string()))?;
    let src = &map.intensity;
    let rows = exec.try_map_range(src.nrows(), |i| -> Result<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        src.row(i)
            .iter()
            .map(|&v| {
                let mean = v * noise.mean_counts;
                let shot = if mean > 0.0 {
                    Poisson::new(mean)
                        .map_err(|e| invalid(format!("Poisson mean {mean}: {e}")))?
                        .sample(&mut rng)
                } else {
                    0.0
                };
                let extra = if noise.read_noise > 0.0 { read.sample(&mut rng) } else { 0.0 };
                Ok((shot + extra).max(0.0))
            })
            .collect()
    })?;
    let mut out = map.clone();
    for (i, r) in rows.into_iter().enumerate() {
        out.intensity.row_mut(i).assign(&ndarray::Array1::from(r));
    }
    out.metadata.seed = Some(seed);
    out.metadata.noise = Some(*noise);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interferometer::MapMetadata;
    use ndarray::Array2;

    fn flat(v: f64) -> InterferogramMap {
        InterferogramMap::new(
            Array2::from_elem((40, 50), v),
            (0..50).map(|j| 600.0 + j as f64).collect(),
            (0..40).map(|i| i as f64).collect(),
            MapMetadata::default(),
        )
        .unwrap()
    }

    #[test]
    fn high_counts_converge() {
        let m = flat(0.7);
        let n = NoiseModel { mean_counts: 1e6, read_noise: 0.0 };
        let out = add_noise(&m, &n, 3, Execution::default()).unwrap();
        for v in out.intensity.iter() {
            let rel = (v / 1e6 - 0.7).abs() / 0.7;
            assert!(rel < 0.01, "{rel}");
        }
    }

    #[test]
    fn deterministic_for_seed_and_execution() {
        let m = flat(0.5);
        let n = NoiseModel { mean_counts: 100.0, read_noise: 2.0 };
        let a = add_noise(&m, &n, 11, Execution::Sequential).unwrap();
        let b = add_noise(&m, &n, 11, Execution::default()).unwrap();
        let c = add_noise(&m, &n, 12, Execution::Sequential).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.intensity, c.intensity);
        assert_eq!(a.metadata.seed, Some(11));
    }

    #[test]
    fn dark_pixel_stays_dark() {
        let m = flat(0.0);
        let n = NoiseModel { mean_counts: 1e4, read_noise: 0.0 };
        let out = add_noise(&m, &n, 1, Execution::Sequential).unwrap();
        assert!(out.intensity.iter().all(|&v| v == 0.0));
    }
}

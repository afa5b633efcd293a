use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::NumericTable;

/// Spec for a generated table: `n_valid` structured columns driven by a
/// shared 3-factor latent model plus `n_noise` independent noise columns.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SyntheticSpec {
    pub n_samples: usize,
    pub n_valid: usize,
    pub n_noise: usize,
    pub seed: u64,
}

const N_FACTORS: usize = 3;
const PERTURBATION_STD: f64 = 0.1;

impl SyntheticSpec {
    pub fn new(n_samples: usize, n_valid: usize, n_noise: usize, seed: u64) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::InvalidSpec("n_samples must be positive".into()));
        }
        if n_valid == 0 {
            return Err(Error::InvalidSpec(
                "need at least 1 valid (structured) feature".into(),
            ));
        }
        if n_valid + n_noise < 2 {
            return Err(Error::InvalidSpec("need at least 2 columns total".into()));
        }
        Ok(Self {
            n_samples,
            n_valid,
            n_noise,
            seed,
        })
    }
}

fn sample_normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Generate a fully observed table. Valid columns are linear mixes of three
/// latent factors (so inter-attribute correlation exists); noise columns are
/// independent uniform draws.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<NumericTable> {
    let spec = SyntheticSpec::new(spec.n_samples, spec.n_valid, spec.n_noise, spec.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let s = spec.n_valid + spec.n_noise;
    let n = spec.n_samples;

    // Mixing coefficients: magnitude in [0.4, 1.0], random sign.
    let mut mixing = vec![[0.0; N_FACTORS]; spec.n_valid];
    for coeffs in mixing.iter_mut() {
        for c in coeffs.iter_mut() {
            let mag = rng.gen_range(0.4..1.0);
            *c = if rng.gen_bool(0.5) { mag } else { -mag };
        }
    }

    let mut values = Matrix::zeros(n, s);
    for i in 0..n {
        let z: [f64; N_FACTORS] = std::array::from_fn(|_| sample_normal(&mut rng));
        for (j, coeffs) in mixing.iter().enumerate() {
            let mixed: f64 = coeffs.iter().zip(z.iter()).map(|(a, f)| a * f).sum();
            *values.at_mut(i, j) = mixed + PERTURBATION_STD * sample_normal(&mut rng);
        }
        for j in spec.n_valid..s {
            *values.at_mut(i, j) = rng.gen_range(0.0..1.0);
        }
    }

    let names = (0..s)
        .map(|j| {
            if j < spec.n_valid {
                format!("valid{j}")
            } else {
                format!("noise{}", j - spec.n_valid)
            }
        })
        .collect();
    Ok(NumericTable::complete(values, names))
}

#[cfg(test)]
pub(crate) fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    cov / (va.sqrt() * vb.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn column(t: &NumericTable, j: usize) -> Vec<f64> {
        (0..t.n_rows()).map(|i| t.values.at(i, j)).collect()
    }

    #[test]
    fn valid_columns_are_correlated() {
        let t = generate_synthetic(&SyntheticSpec::new(1000, 10, 0, 42).unwrap()).unwrap();
        let mut total = 0.0;
        let mut count = 0;
        for a in 0..10 {
            for b in (a + 1)..10 {
                total += pearson(&column(&t, a), &column(&t, b)).abs();
                count += 1;
            }
        }
        assert!(total / count as f64 > 0.2, "mean |corr| = {}", total / count as f64);
    }

    #[test]
    fn noise_columns_are_uncorrelated_with_valid() {
        let mut total = 0.0;
        let mut count = 0;
        for seed in 0..5u64 {
            let t = generate_synthetic(&SyntheticSpec::new(1000, 3, 7, seed).unwrap()).unwrap();
            for v in 0..3 {
                for z in 3..10 {
                    total += pearson(&column(&t, v), &column(&t, z)).abs();
                    count += 1;
                }
            }
        }
        assert!(total / (count as f64) < 0.1, "mean |corr| = {}", total / count as f64);
    }

    #[test]
    fn zero_valid_features_is_an_error() {
        assert!(SyntheticSpec::new(100, 0, 5, 0).is_err());
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let spec = SyntheticSpec::new(50, 3, 2, 9).unwrap();
        let a = generate_synthetic(&spec).unwrap();
        let b = generate_synthetic(&spec).unwrap();
        assert_eq!(a.values, b.values);
    }
}

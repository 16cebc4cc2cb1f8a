//! Moment-matched gamma sampling and quantile labelling utilities.

use crate::error::{Error, Result};
use crate::space::ModelDistParams;
use rand::Rng;
use rand_distr::{Distribution, Gamma};

/// Converts a (mean, std) pair into gamma shape/rate parameters.
///
/// `alpha = mu^2 / sigma^2`, `beta = mu / sigma^2` (rate), so the resulting
/// Gamma(alpha, rate beta) has mean `mu` and standard deviation `sigma`.
pub fn gamma_from_moments(mu: f64, sigma: f64) -> Result<(f64, f64)> {
    if !(mu > 0.0) || !(sigma > 0.0) {
        return Err(Error::domain(format!(
            "gamma moments must be positive, got mu={mu}, sigma={sigma}"
        )));
    }
    Ok((mu * mu / (sigma * sigma), mu / (sigma * sigma)))
}

/// Draws one dynamics-parameter vector, each component independently from the
/// moment-matched gamma distribution. All draws are strictly positive.
pub fn sample_model_params(psi: &ModelDistParams, rng: &mut impl Rng) -> Vec<f64> {
    psi.entries
        .iter()
        .map(|&(mu, sigma)| {
            let (alpha, beta) = gamma_from_moments(mu, sigma).expect("psi validated on construction");
            // rand_distr parameterises by shape and scale = 1/rate.
            let dist = Gamma::new(alpha, 1.0 / beta).expect("positive shape and scale");
            dist.sample(rng)
        })
        .collect()
}

/// Threshold such that the top `gamma` fraction of `values` satisfies
/// `v >= tau`: the empirical `(1 - gamma)`-quantile with linear interpolation.
pub fn empirical_quantile(values: &[f64], gamma: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::domain("empirical_quantile of empty input"));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::domain(format!("gamma must be in (0,1), got {gamma}")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-NaN values"));
    let q = 1.0 - gamma;
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let frac = h - lo as f64;
    Ok(sorted[lo] + frac * (sorted[hi] - sorted[lo]))
}

/// Binary labels `z_k = 1 iff values_k >= tau`; ties at the threshold are positive.
pub fn assign_labels(values: &[f64], tau: f64) -> Vec<u8> {
    values.iter().map(|&v| u8::from(v >= tau)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_moments_examples() {
        let (a, b) = gamma_from_moments(1.0, 0.1).unwrap();
        assert_relative_eq!(a, 100.0, max_relative = 1e-12);
        assert_relative_eq!(b, 100.0, max_relative = 1e-12);
        let (a, b) = gamma_from_moments(2.0, 1.0).unwrap();
        assert_relative_eq!(a, 4.0, max_relative = 1e-12);
        assert_relative_eq!(b, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn gamma_moments_roundtrip() {
        for &(mu, sigma) in &[(0.3, 0.02), (1.0, 0.1), (7.5, 3.0), (42.0, 0.5)] {
            let (a, b) = gamma_from_moments(mu, sigma).unwrap();
            assert_relative_eq!(a / b, mu, max_relative = 1e-12);
            assert_relative_eq!(a / (b * b), sigma * sigma, max_relative = 1e-12);
        }
    }

    #[test]
    fn gamma_moments_rejects_nonpositive() {
        assert!(gamma_from_moments(0.0, 1.0).is_err());
        assert!(gamma_from_moments(1.0, 0.0).is_err());
        assert!(gamma_from_moments(-1.0, 1.0).is_err());
    }

    #[test]
    fn sampler_matches_moments() {
        let psi = ModelDistParams::new(vec![(1.0, 0.1)]).unwrap();
        let mut rng = RngStream::new(11, 0).rng();
        let n = 100_000usize;
        let draws: Vec<f64> = (0..n).map(|_| sample_model_params(&psi, &mut rng)[0]).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        // law-of-large-numbers bound: 3 sigma / sqrt(n)
        assert!((mean - 1.0).abs() < 3.0 * 0.1 / (n as f64).sqrt());
        assert!(draws.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn sampler_concentrates_for_small_sigma() {
        let psi = ModelDistParams::new(vec![(2.0, 1e-6)]).unwrap();
        let mut rng = RngStream::new(5, 0).rng();
        for _ in 0..100 {
            let theta = sample_model_params(&psi, &mut rng);
            assert!((theta[0] - 2.0).abs() < 1e-4);
        }
    }

    #[test]
    fn sampler_is_deterministic() {
        let psi = ModelDistParams::new(vec![(1.0, 0.2), (3.0, 0.5)]).unwrap();
        let a: Vec<Vec<f64>> = {
            let mut rng = RngStream::new(9, 3).rng();
            (0..10).map(|_| sample_model_params(&psi, &mut rng)).collect()
        };
        let b: Vec<Vec<f64>> = {
            let mut rng = RngStream::new(9, 3).rng();
            (0..10).map(|_| sample_model_params(&psi, &mut rng)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn quantile_top_fraction() {
        let values: Vec<f64> = (1..=10).map(f64::from).collect();
        let tau = empirical_quantile(&values, 0.3).unwrap();
        let above: Vec<f64> = values.iter().copied().filter(|&v| v >= tau).collect();
        assert_eq!(above, vec![8.0, 9.0, 10.0]);
    }

    #[test]
    fn quantile_constant_vector() {
        let values = vec![3.0; 7];
        assert_eq!(empirical_quantile(&values, 0.4).unwrap(), 3.0);
    }

    #[test]
    fn quantile_two_values_splits() {
        let values = vec![1.0, 2.0];
        let tau = empirical_quantile(&values, 0.5).unwrap();
        let z = assign_labels(&values, tau);
        assert_eq!(z.iter().map(|&v| v as usize).sum::<usize>(), 1);
    }

    #[test]
    fn quantile_rejects_empty() {
        assert!(empirical_quantile(&[], 0.5).is_err());
    }

    #[test]
    fn labels_definition_and_boundaries() {
        let values = vec![1.0, 2.0, 3.0, 4.0];
        assert_eq!(assign_labels(&values, 3.0), vec![0, 0, 1, 1]);
        assert_eq!(assign_labels(&values, 1.0), vec![1, 1, 1, 1]);
        assert_eq!(assign_labels(&values, 5.0), vec![0, 0, 0, 0]);
    }
}

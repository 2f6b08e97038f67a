//! Categorical sampling from an explicit probability vector.

use crate::error::{Error, Result};
use crate::numeric::rng::RngStream;

/// How far a probability vector's sum may drift from 1.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Precomputed cumulative weights for repeated categorical draws.
/// Each draw is one uniform plus a binary search.
#[derive(Debug, Clone)]
pub struct CumulativeSampler {
    cumulative: Vec<f64>,
}

impl CumulativeSampler {
    pub fn new(weights: &[f64]) -> Result<Self> {
        validate_weights(weights)?;
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for &w in weights {
            acc += w;
            cumulative.push(acc);
        }
        Ok(Self { cumulative })
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    /// Draw index i with probability weights[i].
    pub fn sample(&self, rng: &mut RngStream) -> usize {
        let total = *self.cumulative.last().expect("sampler is non-empty");
        let u = rng.uniform() * total;
        // First cumulative value strictly above u; rounding can push u past
        // the last entry, so clamp.
        let idx = self.cumulative.partition_point(|&c| c <= u);
        idx.min(self.cumulative.len() - 1)
    }
}

fn validate_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidWeights("empty weight vector".into()));
    }
    for (i, &w) in weights.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidWeights(format!("weight[{i}] = {w}")));
        }
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(Error::InvalidWeights(format!(
            "weights sum to {sum}, expected 1 within {WEIGHT_SUM_TOLERANCE:e}"
        )));
    }
    Ok(())
}

/// One-shot categorical draw: index i with probability weights[i].
/// For repeated draws from the same vector build a [`CumulativeSampler`].
pub fn sample_index(weights: &[f64], rng: &mut RngStream) -> Result<usize> {
    Ok(CumulativeSampler::new(weights)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zipf(d: usize) -> Vec<f64> {
        let h: f64 = (1..=d).map(|i| 1.0 / i as f64).sum();
        (1..=d).map(|i| (1.0 / i as f64) / h).collect()
    }

    #[test]
    fn degenerate_distribution_always_hits_its_atom() {
        let mut rng = RngStream::new(1);
        for _ in 0..1000 {
            assert_eq!(sample_index(&[1.0, 0.0, 0.0], &mut rng).unwrap(), 0);
        }
    }

    #[test]
    fn rejects_negative_weight_and_bad_normalization() {
        let mut rng = RngStream::new(1);
        assert!(matches!(
            sample_index(&[0.5, -0.1, 0.6], &mut rng),
            Err(Error::InvalidWeights(_))
        ));
        assert!(matches!(
            sample_index(&[0.5, 0.4], &mut rng),
            Err(Error::InvalidWeights(_))
        ));
        assert!(matches!(
            sample_index(&[], &mut rng),
            Err(Error::InvalidWeights(_))
        ));
    }

    #[test]
    fn uniform_frequencies_within_three_sigma() {
        let mut rng = RngStream::new(2);
        let weights = [0.25; 4];
        let sampler = CumulativeSampler::new(&weights).unwrap();
        let n = 100_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            counts[sampler.sample(&mut rng)] += 1;
        }
        let sigma = (n as f64 * 0.25 * 0.75).sqrt();
        for &c in &counts {
            assert!(
                (c as f64 - 25_000.0).abs() < 3.0 * sigma,
                "counts {counts:?}"
            );
        }
    }

    #[test]
    fn zipf_d3_frequencies_within_three_sigma() {
        // H_3 = 11/6, so the weights are (6/11, 3/11, 2/11).
        let weights = zipf(3);
        assert!((weights[0] - 6.0 / 11.0).abs() < 1e-15);
        assert!((weights[1] - 3.0 / 11.0).abs() < 1e-15);
        assert!((weights[2] - 2.0 / 11.0).abs() < 1e-15);

        let mut rng = RngStream::new(4);
        let sampler = CumulativeSampler::new(&weights).unwrap();
        let n = 100_000usize;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            counts[sampler.sample(&mut rng)] += 1;
        }
        for (i, &c) in counts.iter().enumerate() {
            let p = weights[i];
            let sigma = (n as f64 * p * (1.0 - p)).sqrt();
            assert!(
                (c as f64 - n as f64 * p).abs() < 3.0 * sigma,
                "bin {i}: {c} vs {}",
                n as f64 * p
            );
        }
    }

    // Chi-squared goodness of fit at significance 0.001. Critical values:
    // df=1 -> 10.828, df=9 -> 27.877; df=999 -> ~1143 (Wilson-Hilferty).
    fn chi_squared(counts: &[usize], weights: &[f64], n: usize) -> f64 {
        counts
            .iter()
            .zip(weights)
            .map(|(&c, &p)| {
                let expected = n as f64 * p;
                (c as f64 - expected).powi(2) / expected
            })
            .sum()
    }

    #[test]
    fn chi_squared_gof_uniform_and_zipf() {
        let cases: [(usize, f64); 3] = [(2, 10.828), (10, 27.877), (1000, 1143.0)];
        for (seed_offset, (d, critical)) in cases.into_iter().enumerate() {
            for (law_offset, weights) in [vec![1.0 / d as f64; d], zipf(d)].into_iter().enumerate()
            {
                let mut rng = RngStream::new(100 + (seed_offset * 2 + law_offset) as u64);
                let sampler = CumulativeSampler::new(&weights).unwrap();
                let n = 100_000;
                let mut counts = vec![0usize; d];
                for _ in 0..n {
                    counts[sampler.sample(&mut rng)] += 1;
                }
                let chi2 = chi_squared(&counts, &weights, n);
                assert!(
                    chi2 < critical,
                    "d={d} law={} chi2={chi2} critical={critical}",
                    if law_offset == 0 { "uniform" } else { "zipf" }
                );
            }
        }
    }
}

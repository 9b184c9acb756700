//! Inverted dropout: kept units are rescaled by 1/(1-p) at train time so
//! evaluation is a plain pass-through.

use rand::Rng;
use rand::RngCore;

use crate::error::{Error, Result};

/// A sampled mask; entries are 0 or 1/(1-p).
#[derive(Debug, Clone, PartialEq)]
pub struct DropoutMask {
    factors: Vec<f64>,
}

impl DropoutMask {
    /// Mask that keeps everything (evaluation mode / p = 0).
    pub fn identity(len: usize) -> Self {
        DropoutMask {
            factors: vec![1.0; len],
        }
    }

    pub fn factors(&self) -> &[f64] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Elementwise multiply the mask into `x`.
    pub fn apply(&self, x: &mut [f64]) {
        debug_assert_eq!(x.len(), self.factors.len());
        for (xi, f) in x.iter_mut().zip(&self.factors) {
            *xi *= f;
        }
    }
}

/// Sample a mask of length `len` with drop probability `p`.
pub fn sample_dropout(len: usize, p: f64, rng: &mut dyn RngCore) -> Result<DropoutMask> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::Domain(format!(
            "dropout probability must satisfy 0 <= p < 1, got {p}"
        )));
    }
    if p == 0.0 {
        return Ok(DropoutMask::identity(len));
    }
    let keep_scale = 1.0 / (1.0 - p);
    let factors = (0..len)
        .map(|_| {
            if rng.random::<f64>() < p {
                0.0
            } else {
                keep_scale
            }
        })
        .collect();
    Ok(DropoutMask { factors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_probability_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mask = sample_dropout(16, 0.0, &mut rng).unwrap();
        assert_eq!(mask.factors(), vec![1.0; 16].as_slice());
    }

    #[test]
    fn invalid_probability_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_dropout(4, 1.0, &mut rng).is_err());
        assert!(sample_dropout(4, -0.1, &mut rng).is_err());
    }

    #[test]
    fn mask_mean_is_one() {
        // E[factor] = (1-p) * 1/(1-p) = 1; Var[factor] = p/(1-p).
        // Check the empirical mean over 1e5 draws stays within 3 sigma.
        let n = 100_000;
        for &p in &[0.2, 0.5, 0.05] {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            let mask = sample_dropout(n, p, &mut rng).unwrap();
            let mean = mask.factors().iter().sum::<f64>() / n as f64;
            let sigma = (p / (1.0 - p) / n as f64).sqrt();
            assert!(
                (mean - 1.0).abs() < 3.0 * sigma,
                "p={p}: mean {mean} outside 3 sigma ({sigma})"
            );
        }
    }

    #[test]
    fn entries_are_zero_or_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = 0.2;
        let mask = sample_dropout(1000, p, &mut rng).unwrap();
        let scale = 1.0 / (1.0 - p);
        assert!(mask
            .factors()
            .iter()
            .all(|&f| f == 0.0 || (f - scale).abs() < 1e-15));
    }

    #[test]
    fn deterministic_given_seed() {
        let a = sample_dropout(64, 0.3, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample_dropout(64, 0.3, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }
}

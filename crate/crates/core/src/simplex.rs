use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on `|Σ x_i - 1|`.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

/// A probability distribution over `d` arms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SimplexDistribution {
    weights: Vec<f64>,
}

impl TryFrom<Vec<f64>> for SimplexDistribution {
    type Error = Error;

    fn try_from(weights: Vec<f64>) -> Result<Self> {
        SimplexDistribution::new(weights)
    }
}

impl From<SimplexDistribution> for Vec<f64> {
    fn from(x: SimplexDistribution) -> Self {
        x.weights
    }
}

impl SimplexDistribution {
    /// Validates that `weights` is nonnegative and sums to one.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("empty weight vector".into()));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(Error::InvalidDistribution(format!(
                "weight {w} at index {i} is negative or not finite"
            )));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {sum}, not 1"
            )));
        }
        Ok(SimplexDistribution { weights })
    }

    pub fn uniform(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDistribution(
                "dimension must be positive".into(),
            ));
        }
        Ok(SimplexDistribution {
            weights: vec![1.0 / dim as f64; dim],
        })
    }

    /// Divides nonnegative `weights` by their sum.
    pub fn normalize(mut weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution(
                "cannot normalize negative or non-finite weights".into(),
            ));
        }
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::InvalidDistribution(format!(
                "cannot normalize weights with sum {sum}"
            )));
        }
        weights.iter_mut().for_each(|w| *w /= sum);
        SimplexDistribution::new(weights)
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, arm: usize) -> f64 {
        self.weights[arm]
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_sum_within_tolerance() {
        assert!(SimplexDistribution::new(vec![0.5, 0.5 + 5e-10]).is_ok());
        assert!(SimplexDistribution::new(vec![0.5, 0.5 + 5e-9]).is_err());
    }

    #[test]
    fn rejects_negative_and_nan() {
        assert!(SimplexDistribution::new(vec![1.5, -0.5]).is_err());
        assert!(SimplexDistribution::new(vec![f64::NAN, 1.0]).is_err());
        assert!(SimplexDistribution::new(vec![]).is_err());
    }

    #[test]
    fn normalize_rescales() {
        let x = SimplexDistribution::normalize(vec![1.0, 3.0]).unwrap();
        assert_eq!(x.weights(), &[0.25, 0.75]);
        assert!(SimplexDistribution::normalize(vec![0.0, 0.0]).is_err());
    }
}

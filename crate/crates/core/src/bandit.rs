//! Bandit feedback: greedy online mirror descent with the Tsallis potential.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regularizers::{
    bregman_project, tsallis_gradient, tsallis_gradient_inverse, TsallisPotential,
};
use crate::rng::RngStream;
use crate::simplex::SimplexDistribution;

/// Which closed form to use for the step size at a given `q`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BanditEtaRule {
    /// `sqrt(2 d^{1/q} / ((q-1) T s^{1-1/q}))`, which equalizes the two terms
    /// `q d^{1/q} / (η (q-1))` and `q η T s^{1-1/q} / 2` of the regret bound.
    #[default]
    Balanced,
    /// `sqrt(2 s^{1-1/q} / ((q-1) T d^{1/q}))`, the reciprocal arrangement.
    Reciprocal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BanditTuning {
    pub q: f64,
    pub eta: f64,
}

/// Step size for a given `q`.
pub fn bandit_eta(
    q: f64,
    s: usize,
    dim: usize,
    horizon: usize,
    rule: BanditEtaRule,
) -> Result<f64> {
    if !(q > 1.0) || !q.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "q = {q} must be finite and > 1"
        )));
    }
    if s == 0 || dim == 0 || horizon == 0 {
        return Err(Error::InvalidParameter(
            "s, d and T must be positive".into(),
        ));
    }
    let (sf, d, t) = (s as f64, dim as f64, horizon as f64);
    let d_term = (d.ln() / q).exp();
    let s_term = ((1.0 - 1.0 / q) * sf.ln()).exp();
    let eta = match rule {
        BanditEtaRule::Balanced => (2.0 * d_term / ((q - 1.0) * t * s_term)).sqrt(),
        BanditEtaRule::Reciprocal => (2.0 * s_term / ((q - 1.0) * t * d_term)).sqrt(),
    };
    Ok(eta)
}

/// `q = ln(d/s)` with the balanced step size; requires `d/s >= e²`.
pub fn tune_bandit(s: usize, dim: usize, horizon: usize) -> Result<BanditTuning> {
    tune_bandit_with_rule(s, dim, horizon, BanditEtaRule::Balanced)
}

pub fn tune_bandit_with_rule(
    s: usize,
    dim: usize,
    horizon: usize,
    rule: BanditEtaRule,
) -> Result<BanditTuning> {
    if s == 0 || horizon == 0 {
        return Err(Error::InvalidParameter("s and T must be positive".into()));
    }
    let q = tuned_q(dim as f64 / s as f64)?;
    Ok(BanditTuning {
        q,
        eta: bandit_eta(q, s, dim, horizon, rule)?,
    })
}

/// `q = ln(d/s)`, rejecting `d/s < e²`. A ratio equal to `e²` up to rounding
/// gives `q = 2`.
fn tuned_q(ratio: f64) -> Result<f64> {
    let q = ratio.ln();
    if !(q >= 2.0 - 1e-12) {
        return Err(Error::Precondition(format!(
            "Tsallis-INF tuning requires d/s >= e^2 (about 7.389), got d/s = {ratio}"
        )));
    }
    Ok(q.max(2.0))
}

/// `q = 2` when `d/s < e²`, otherwise `q = ln(d/s)`; the balanced step size.
///
/// Used where the learner must run outside the tuned regime (e.g. against
/// the lower-bound adversary at small `d/s`).
pub fn fallback_tuning(
    s: usize,
    dim: usize,
    horizon: usize,
    rule: BanditEtaRule,
) -> Result<BanditTuning> {
    let q = tuned_q(dim as f64 / s as f64).unwrap_or(2.0);
    Ok(BanditTuning {
        q,
        eta: bandit_eta(q, s, dim, horizon, rule)?,
    })
}

/// Draws an arm with probability `x_i` by inverting the CDF.
pub fn sample_arm(x: &SimplexDistribution, rng: &mut RngStream) -> usize {
    let u = rng.unit();
    let mut cum = 0.0;
    let mut last_positive = 0;
    for (i, &w) in x.weights().iter().enumerate() {
        if w > 0.0 {
            cum += w;
            last_positive = i;
            if u < cum {
                return i;
            }
        }
    }
    last_positive
}

/// The importance-weighted estimate `ℓ̂_i = 1{i = arm} ℓ_arm / x_arm`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossEstimate {
    dim: usize,
    arm: usize,
    value: f64,
}

impl LossEstimate {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arm(&self) -> usize {
        self.arm
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn component(&self, i: usize) -> f64 {
        if i == self.arm {
            self.value
        } else {
            0.0
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.component(i)).collect()
    }
}

pub fn estimate_loss(observed: f64, arm: usize, x: &SimplexDistribution) -> Result<LossEstimate> {
    if !(0.0..=1.0).contains(&observed) {
        return Err(Error::InvalidOutcome(format!(
            "observed loss {observed} outside [0, 1]"
        )));
    }
    if arm >= x.dim() {
        return Err(Error::InvalidParameter(format!(
            "arm {arm} out of range for dimension {}",
            x.dim()
        )));
    }
    let p = x.weight(arm);
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "arm {arm} has zero probability and cannot have been sampled"
        )));
    }
    Ok(LossEstimate {
        dim: x.dim(),
        arm,
        value: observed / p,
    })
}

/// A learner that only observes the outcome of the arm it drew.
pub trait BanditLearner {
    fn distribution(&self) -> &SimplexDistribution;

    fn observe(&mut self, arm: usize, observed: f64) -> Result<()>;
}

/// Greedy mirror descent with `F_q` and a Bregman projection:
/// `z = ∇F_q^{-1}(∇F_q(x) - η ℓ̂)`, `x ← argmin_{Δ} D_{F_q}(·, z)`.
#[derive(Debug, Clone)]
pub struct TsallisInf {
    pot: TsallisPotential,
    eta: f64,
    x: SimplexDistribution,
}

impl TsallisInf {
    pub fn new(dim: usize, q: f64, eta: f64) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "eta = {eta} must be positive"
            )));
        }
        Ok(TsallisInf {
            pot: TsallisPotential::new(q)?,
            eta,
            x: SimplexDistribution::uniform(dim)?,
        })
    }

    pub fn tuned(s: usize, dim: usize, horizon: usize) -> Result<Self> {
        let t = tune_bandit(s, dim, horizon)?;
        TsallisInf::new(dim, t.q, t.eta)
    }

    /// Replaces the iterate; every weight must be positive.
    pub fn with_iterate(mut self, x: SimplexDistribution) -> Result<Self> {
        if x.dim() != self.x.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.x.dim(),
                found: x.dim(),
            });
        }
        if !(x.min_weight() > 0.0) {
            return Err(Error::InvalidDistribution(
                "iterate must be strictly positive".into(),
            ));
        }
        self.x = x;
        Ok(self)
    }

    pub fn q(&self) -> f64 {
        self.pot.q()
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn iterate(&self) -> &SimplexDistribution {
        &self.x
    }

    /// One greedy mirror step followed by the projection.
    pub fn step(&mut self, estimate: &LossEstimate) -> Result<()> {
        if estimate.dim() != self.x.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.x.dim(),
                found: estimate.dim(),
            });
        }
        let mut y = tsallis_gradient(self.x.weights(), &self.pot)?;
        y[estimate.arm()] -= self.eta * estimate.value();
        let z = tsallis_gradient_inverse(&y, &self.pot)?;
        self.x = bregman_project(&z, &self.pot)?;
        Ok(())
    }
}

impl BanditLearner for TsallisInf {
    fn distribution(&self) -> &SimplexDistribution {
        &self.x
    }

    fn observe(&mut self, arm: usize, observed: f64) -> Result<()> {
        let estimate = estimate_loss(observed, arm, &self.x)?;
        self.step(&estimate)
    }
}

/// Plays the uniform distribution forever.
#[derive(Debug, Clone)]
pub struct UniformPlay {
    x: SimplexDistribution,
}

impl UniformPlay {
    pub fn new(dim: usize) -> Result<Self> {
        Ok(UniformPlay {
            x: SimplexDistribution::uniform(dim)?,
        })
    }
}

impl BanditLearner for UniformPlay {
    fn distribution(&self) -> &SimplexDistribution {
        &self.x
    }

    fn observe(&mut self, arm: usize, _observed: f64) -> Result<()> {
        if arm >= self.x.dim() {
            return Err(Error::InvalidParameter(format!("arm {arm} out of range")));
        }
        Ok(())
    }
}

/// `e²`, the smallest `d/s` for which the tuned learner is defined.
pub fn min_tuned_ratio() -> f64 {
    E * E
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuning_reference_values() {
        // 30-digit reference: q = ln 16, d^{1/q} = e^{1.5}.
        let t = tune_bandit(4, 64, 40_000).unwrap();
        assert!((t.q - 2.772_588_722_239_781).abs() < 1e-14);
        assert!(((64f64.ln() / t.q).exp() - 4.481_689_070_338_065).abs() < 1e-13);
        assert!((t.eta - 0.007_218_475_677_670_139).abs() < 1e-15);
        let r = tune_bandit_with_rule(4, 64, 40_000, BanditEtaRule::Reciprocal).unwrap();
        assert!((r.eta - 0.003_907_657_801_496_352).abs() < 1e-15);
    }

    #[test]
    fn tuning_boundary_and_scaling() {
        assert!(tune_bandit(2, 8, 100).is_err());
        let err = tune_bandit(2, 8, 100).unwrap_err().to_string();
        assert!(err.contains("e^2"), "{err}");
        let a = tune_bandit(4, 64, 1000).unwrap().eta;
        let b = tune_bandit(4, 64, 4000).unwrap().eta;
        assert!((b - a / 2.0).abs() < 1e-15);
    }

    #[test]
    fn tuning_at_exact_boundary() {
        let q = tuned_q(E * E).unwrap();
        assert!((q - 2.0).abs() < 1e-15);
        assert!(q / (q - 1.0) <= 2.0 + 1e-15);
        assert!(tuned_q(E * E * (1.0 - 1e-9)).is_err());
    }

    #[test]
    fn degenerate_distribution_always_first_arm() {
        let x = SimplexDistribution::new(vec![1.0, 0.0, 0.0]).unwrap();
        let mut rng = RngStream::new(3, 0);
        assert!((0..1000).all(|_| sample_arm(&x, &mut rng) == 0));
        let x = SimplexDistribution::new(vec![0.0, 0.0, 1.0]).unwrap();
        assert!((0..1000).all(|_| sample_arm(&x, &mut rng) == 2));
    }

    #[test]
    fn estimator_values() {
        let x = SimplexDistribution::new(vec![0.25, 0.75]).unwrap();
        let e = estimate_loss(0.5, 0, &x).unwrap();
        assert_eq!(e.value(), 2.0);
        assert_eq!(e.to_dense(), vec![2.0, 0.0]);
        assert_eq!(estimate_loss(0.0, 1, &x).unwrap().value(), 0.0);
        let z = SimplexDistribution::new(vec![1.0, 0.0]).unwrap();
        assert!(estimate_loss(0.5, 1, &z).is_err());
    }

    #[test]
    fn zero_estimate_keeps_iterate() {
        let x0 = SimplexDistribution::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let mut s = TsallisInf::new(4, 2.5, 0.3)
            .unwrap()
            .with_iterate(x0.clone())
            .unwrap();
        s.observe(2, 0.0).unwrap();
        for (a, b) in s.iterate().weights().iter().zip(x0.weights()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn positive_estimate_moves_mass_away() {
        let mut s = TsallisInf::new(5, 2.0, 0.2).unwrap();
        let before = s.iterate().clone();
        s.observe(1, 1.0).unwrap();
        let after = s.iterate();
        assert!(after.weight(1) < before.weight(1));
        for i in [0, 2, 3, 4] {
            assert!(after.weight(i) >= before.weight(i));
        }
    }
}

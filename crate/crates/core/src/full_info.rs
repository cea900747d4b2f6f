//! Full-information learners.
//!
//! Every learner follows the predict-then-observe order: [`FullInfoLearner::step`]
//! returns the distribution computed from outcomes strictly before the current
//! stage, then absorbs the current outcome.

use std::f64::consts::{E, LN_2, SQRT_2};

use crate::error::{Error, Result};
use crate::outcome::{Direction, SparseOutcome};
use crate::regularizers::{logit_map, lp_mirror_map, PNormRegularizer};
use crate::simplex::SimplexDistribution;

/// `2^{3/4} (√2 + 1)^{1/2}`, the constant of the adaptive-losses algorithm.
pub fn adaptive_losses_constant() -> f64 {
    2f64.powf(0.75) * (SQRT_2 + 1.0).sqrt()
}

/// `(e √2 (√2 + 1))^{1/2}`, the constant of the adaptive-gains algorithm.
pub fn adaptive_gains_constant() -> f64 {
    (E * SQRT_2 * (SQRT_2 + 1.0)).sqrt()
}

/// A learner that sees the whole outcome vector after each stage.
pub trait FullInfoLearner {
    fn dim(&self) -> usize;

    fn direction(&self) -> Direction;

    /// Emits `x_t`, then absorbs `outcome`.
    fn step(&mut self, outcome: &SparseOutcome) -> Result<SimplexDistribution>;

    /// Current sparsity regime index, for learners that keep one.
    fn regime(&self) -> Option<u32> {
        None
    }
}

fn check_outcome(outcome: &SparseOutcome, dim: usize, direction: Direction) -> Result<()> {
    if outcome.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: outcome.dim(),
        });
    }
    if outcome.direction() != direction {
        return Err(Error::InvalidOutcome(format!(
            "expected a {direction} vector, got a {}",
            outcome.direction()
        )));
    }
    Ok(())
}

fn accumulate(cumulative: &mut [f64], outcome: &SparseOutcome) {
    for &(i, v) in outcome.entries() {
        cumulative[i] += v;
    }
}

/// Smallest `k` with `2^k >= n`, for `n >= 1`.
pub fn ceil_log2(n: usize) -> u32 {
    assert!(n >= 1, "ceil_log2 of zero");
    usize::BITS - (n - 1).leading_zeros()
}

// ---------------------------------------------------------------------------
// ℓ^p online mirror descent for sparse gains
// ---------------------------------------------------------------------------

/// Tuned exponent and step size for `s`-sparse gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainsTuning {
    pub p: f64,
    pub q: f64,
    pub eta: f64,
}

/// `p = 1 + (2 ln s - 1)^{-1}` for `s >= 3` (so that `q = 2 ln s`), `p = 2`
/// for `s ∈ {1, 2}`; `η = sqrt((p - 1) / (T s^{2/q}))`.
pub fn tune_gains(s: usize, horizon: usize) -> Result<GainsTuning> {
    if s == 0 {
        return Err(Error::InvalidParameter(
            "sparsity s must be at least 1".into(),
        ));
    }
    if horizon == 0 {
        return Err(Error::InvalidParameter(
            "horizon T must be at least 1".into(),
        ));
    }
    let ln_s = (s as f64).ln();
    let p = if s >= 3 {
        1.0 + 1.0 / (2.0 * ln_s - 1.0)
    } else {
        2.0
    };
    let q = 1.0 / (1.0 - 1.0 / p);
    let s_pow = (2.0 / q * ln_s).exp();
    let eta = ((p - 1.0) / (horizon as f64 * s_pow)).sqrt();
    Ok(GainsTuning { p, q, eta })
}

/// Online mirror descent with regularizer `h_p`: `x_t = ∇h_p*(η Σ_{k<t} g_k)`.
#[derive(Debug, Clone)]
pub struct OmdGains {
    reg: PNormRegularizer,
    eta: f64,
    cumulative: Vec<f64>,
}

impl OmdGains {
    pub fn new(dim: usize, p: f64, eta: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "eta = {eta} must be positive"
            )));
        }
        Ok(OmdGains {
            reg: PNormRegularizer::new(p)?,
            eta,
            cumulative: vec![0.0; dim],
        })
    }

    pub fn tuned(dim: usize, s: usize, horizon: usize) -> Result<Self> {
        let t = tune_gains(s, horizon)?;
        OmdGains::new(dim, t.p, t.eta)
    }

    /// Starts from a given cumulative gain vector instead of zero.
    pub fn with_cumulative(mut self, cumulative: Vec<f64>) -> Result<Self> {
        if cumulative.len() != self.cumulative.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cumulative.len(),
                found: cumulative.len(),
            });
        }
        self.cumulative = cumulative;
        Ok(self)
    }

    pub fn p(&self) -> f64 {
        self.reg.p()
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn current(&self) -> Result<SimplexDistribution> {
        let y: Vec<f64> = self.cumulative.iter().map(|c| self.eta * c).collect();
        lp_mirror_map(&y, &self.reg)
    }
}

impl FullInfoLearner for OmdGains {
    fn dim(&self) -> usize {
        self.cumulative.len()
    }

    fn direction(&self) -> Direction {
        Direction::Gain
    }

    fn step(&mut self, outcome: &SparseOutcome) -> Result<SimplexDistribution> {
        check_outcome(outcome, self.dim(), Direction::Gain)?;
        let x = self.current()?;
        accumulate(&mut self.cumulative, outcome);
        Ok(x)
    }
}

// ---------------------------------------------------------------------------
// Exponential weights
// ---------------------------------------------------------------------------

/// `η = ln(1 + sqrt(2 d ln d / (s T)))`, the loss-side tuning for `s`-sparse
/// losses.
pub fn tune_losses(s: usize, dim: usize, horizon: usize) -> Result<f64> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!(
            "tuned exponential weights need d >= 2, got d = {dim}"
        )));
    }
    if s == 0 {
        return Err(Error::InvalidParameter(
            "sparsity s must be at least 1".into(),
        ));
    }
    if horizon == 0 {
        return Err(Error::InvalidParameter(
            "horizon T must be at least 1".into(),
        ));
    }
    let d = dim as f64;
    Ok((2.0 * d * d.ln() / (s as f64 * horizon as f64))
        .sqrt()
        .ln_1p())
}

/// Exponential weights, `x_t ∝ exp(η Σ_{k<t} ω_k)` with `η > 0` on gains and
/// `η < 0` on losses.
#[derive(Debug, Clone)]
pub struct Ewa {
    direction: Direction,
    signed_eta: f64,
    cumulative: Vec<f64>,
}

impl Ewa {
    /// `eta` is the magnitude; its sign follows `direction`.
    pub fn new(dim: usize, direction: Direction, eta: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if !(eta >= 0.0) || !eta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "eta = {eta} must be a finite nonnegative magnitude"
            )));
        }
        let signed_eta = match direction {
            Direction::Gain => eta,
            Direction::Loss => -eta,
        };
        Ok(Ewa {
            direction,
            signed_eta,
            cumulative: vec![0.0; dim],
        })
    }

    pub fn tuned_losses(dim: usize, s: usize, horizon: usize) -> Result<Self> {
        Ewa::new(dim, Direction::Loss, tune_losses(s, dim, horizon)?)
    }

    pub fn with_cumulative(mut self, cumulative: Vec<f64>) -> Result<Self> {
        if cumulative.len() != self.cumulative.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cumulative.len(),
                found: cumulative.len(),
            });
        }
        self.cumulative = cumulative;
        Ok(self)
    }

    pub fn signed_eta(&self) -> f64 {
        self.signed_eta
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn current(&self) -> Result<SimplexDistribution> {
        logit_map(&self.cumulative, self.signed_eta)
    }
}

impl FullInfoLearner for Ewa {
    fn dim(&self) -> usize {
        self.cumulative.len()
    }

    fn direction(&self) -> Direction {
        self.direction
    }

    fn step(&mut self, outcome: &SparseOutcome) -> Result<SimplexDistribution> {
        check_outcome(outcome, self.dim(), self.direction)?;
        let x = self.current()?;
        accumulate(&mut self.cumulative, outcome);
        Ok(x)
    }
}

// ---------------------------------------------------------------------------
// Sparsity-adaptive learners
// ---------------------------------------------------------------------------

/// Exponential weights on losses with an unknown sparsity level.
///
/// Keeps a regime index `m` (initially 1). While `‖ℓ_t‖_0 <= 2^m` the weights
/// are multiplied by `exp(-η(m) ℓ_t)`; the first loss that exceeds the
/// threshold moves to `m = ⌈log2 ‖ℓ_t‖_0⌉`, retunes `η(m)` and resets the
/// weights to uniform. That loss itself is not absorbed.
#[derive(Debug, Clone)]
pub struct AdaptiveLosses {
    horizon: usize,
    constant: f64,
    regime: u32,
    eta: f64,
    /// Losses accumulated since the last reset; the weights are
    /// `exp(-η(m) · regime_cumulative)` up to normalization.
    regime_cumulative: Vec<f64>,
}

impl AdaptiveLosses {
    pub fn new(dim: usize, horizon: usize) -> Result<Self> {
        AdaptiveLosses::with_constant(dim, horizon, adaptive_losses_constant())
    }

    pub fn with_constant(dim: usize, horizon: usize, constant: f64) -> Result<Self> {
        if dim == 0 || horizon == 0 {
            return Err(Error::InvalidParameter("d and T must be positive".into()));
        }
        if !(constant > 0.0) || !constant.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "C = {constant} must be positive"
            )));
        }
        let mut s = AdaptiveLosses {
            horizon,
            constant,
            regime: 1,
            eta: 0.0,
            regime_cumulative: vec![0.0; dim],
        };
        s.eta = s.eta_for(1);
        Ok(s)
    }

    /// `η(m) = ln(1 + C sqrt(d ln d / (2^m T)))`.
    pub fn eta_for(&self, regime: u32) -> f64 {
        let d = self.regime_cumulative.len() as f64;
        let ratio = d * d.ln() / (2f64.powi(regime as i32) * self.horizon as f64);
        (self.constant * ratio.sqrt()).ln_1p()
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn current(&self) -> Result<SimplexDistribution> {
        logit_map(&self.regime_cumulative, -self.eta)
    }
}

impl FullInfoLearner for AdaptiveLosses {
    fn dim(&self) -> usize {
        self.regime_cumulative.len()
    }

    fn direction(&self) -> Direction {
        Direction::Loss
    }

    fn step(&mut self, outcome: &SparseOutcome) -> Result<SimplexDistribution> {
        check_outcome(outcome, self.dim(), Direction::Loss)?;
        let x = self.current()?;
        let n = outcome.sparsity();
        let fits = self.regime >= usize::BITS - 1 || n <= 1usize << self.regime;
        if fits {
            accumulate(&mut self.regime_cumulative, outcome);
        } else {
            self.regime = ceil_log2(n);
            self.eta = self.eta_for(self.regime);
            self.regime_cumulative.iter_mut().for_each(|c| *c = 0.0);
        }
        Ok(x)
    }

    fn regime(&self) -> Option<u32> {
        Some(self.regime)
    }
}

/// Parameters of the gains learner in regime `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeTuning {
    pub p: f64,
    pub q: f64,
    pub eta: f64,
}

/// `ℓ^p` mirror descent on gains with an unknown sparsity level.
///
/// Regime `m` covers gains with `‖g_t‖_0 <= 2^{2^m}` and uses
/// `p(m) = 1 + (ln 2 · 2^{m+1} - 1)^{-1}`,
/// `η(m) = C sqrt((p(m) - 1) / (T 2^{2^{m+1}/q(m)}))`. A gain above the
/// threshold moves to `m = ⌈log2 log2 ‖g_t‖_0⌉` and resets the cumulative
/// vector without absorbing that gain.
#[derive(Debug, Clone)]
pub struct AdaptiveGains {
    horizon: usize,
    constant: f64,
    regime: u32,
    tuning: RegimeTuning,
    reg: PNormRegularizer,
    regime_cumulative: Vec<f64>,
}

impl AdaptiveGains {
    pub fn new(dim: usize, horizon: usize) -> Result<Self> {
        AdaptiveGains::with_constant(dim, horizon, adaptive_gains_constant())
    }

    pub fn with_constant(dim: usize, horizon: usize, constant: f64) -> Result<Self> {
        if dim == 0 || horizon == 0 {
            return Err(Error::InvalidParameter("d and T must be positive".into()));
        }
        if !(constant > 0.0) || !constant.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "C = {constant} must be positive"
            )));
        }
        let tuning = regime_tuning(1, horizon, constant);
        Ok(AdaptiveGains {
            horizon,
            constant,
            regime: 1,
            tuning,
            reg: PNormRegularizer::new(tuning.p)?,
            regime_cumulative: vec![0.0; dim],
        })
    }

    pub fn tuning(&self) -> RegimeTuning {
        self.tuning
    }

    pub fn current(&self) -> Result<SimplexDistribution> {
        let y: Vec<f64> = self
            .regime_cumulative
            .iter()
            .map(|c| self.tuning.eta * c)
            .collect();
        lp_mirror_map(&y, &self.reg)
    }
}

/// `(p(m), q(m), η(m))` for the adaptive gains learner.
pub fn regime_tuning(regime: u32, horizon: usize, constant: f64) -> RegimeTuning {
    let two_m1 = 2f64.powi(regime as i32 + 1);
    let p = 1.0 + 1.0 / (LN_2 * two_m1 - 1.0);
    let q = 1.0 / (1.0 - 1.0 / p);
    let growth = (LN_2 * two_m1 / q).exp();
    let eta = constant * ((p - 1.0) / (horizon as f64 * growth)).sqrt();
    RegimeTuning { p, q, eta }
}

/// Whether `n <= 2^{2^m}`.
fn within_double_exponential(n: usize, regime: u32) -> bool {
    if regime >= 6 {
        return true;
    }
    let exponent = 1u32 << regime;
    exponent >= usize::BITS || n <= 1usize << exponent
}

impl FullInfoLearner for AdaptiveGains {
    fn dim(&self) -> usize {
        self.regime_cumulative.len()
    }

    fn direction(&self) -> Direction {
        Direction::Gain
    }

    fn step(&mut self, outcome: &SparseOutcome) -> Result<SimplexDistribution> {
        check_outcome(outcome, self.dim(), Direction::Gain)?;
        let x = self.current()?;
        let n = outcome.sparsity();
        if within_double_exponential(n, self.regime) {
            accumulate(&mut self.regime_cumulative, outcome);
        } else {
            if n <= 1 {
                return Err(Error::numerical(
                    "adaptive_gains_step",
                    format!("regime change triggered by a gain with support {n}"),
                ));
            }
            self.regime = ceil_log2(ceil_log2(n) as usize);
            self.tuning = regime_tuning(self.regime, self.horizon, self.constant);
            self.reg = PNormRegularizer::new(self.tuning.p)?;
            self.regime_cumulative.iter_mut().for_each(|c| *c = 0.0);
        }
        Ok(x)
    }

    fn regime(&self) -> Option<u32> {
        Some(self.regime)
    }
}

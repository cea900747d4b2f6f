//! Regret accounting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::outcome::{Direction, SparseOutcome};
use crate::simplex::SimplexDistribution;

/// Running totals needed to evaluate the regret after any number of stages.
///
/// The primary statistic is the pseudo-regret, computed from the expected
/// per-stage outcome `<ω_t, x_t>`. When the sampled arm is supplied (bandit
/// runs), the realized outcome is accumulated as well.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretLedger {
    dim: usize,
    direction: Direction,
    per_arm_cumulative: Vec<f64>,
    cumulative_expected: f64,
    cumulative_realized: Option<f64>,
    stage_count: usize,
}

impl RegretLedger {
    pub fn new(dim: usize, direction: Direction) -> Self {
        RegretLedger {
            dim,
            direction,
            per_arm_cumulative: vec![0.0; dim],
            cumulative_expected: 0.0,
            cumulative_realized: None,
            stage_count: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn per_arm_cumulative(&self) -> &[f64] {
        &self.per_arm_cumulative
    }

    pub fn cumulative_expected(&self) -> f64 {
        self.cumulative_expected
    }

    pub fn cumulative_realized(&self) -> Option<f64> {
        self.cumulative_realized
    }

    pub fn stage_count(&self) -> usize {
        self.stage_count
    }

    /// Records one stage: the outcome, the distribution played and, in bandit
    /// runs, the arm that was actually drawn.
    pub fn update(
        &mut self,
        outcome: &SparseOutcome,
        action: &SimplexDistribution,
        realized_arm: Option<usize>,
    ) -> Result<()> {
        if outcome.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: outcome.dim(),
            });
        }
        if action.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: action.dim(),
            });
        }
        if outcome.direction() != self.direction {
            return Err(Error::InvalidOutcome(format!(
                "{} vector recorded in a {} ledger",
                outcome.direction(),
                self.direction
            )));
        }
        if let Some(arm) = realized_arm {
            if arm >= self.dim {
                return Err(Error::InvalidParameter(format!(
                    "realized arm {arm} out of range for dimension {}",
                    self.dim
                )));
            }
        }

        let expected = outcome.dot(action)?;
        for &(i, v) in outcome.entries() {
            self.per_arm_cumulative[i] += v;
        }
        self.cumulative_expected += expected;
        if let Some(arm) = realized_arm {
            *self.cumulative_realized.get_or_insert(0.0) += outcome.value(arm);
        }
        self.stage_count += 1;
        Ok(())
    }

    /// Cumulative outcome of the best fixed arm in hindsight
    /// (`max` for gains, `min` for losses; `L_T*` for losses).
    pub fn best_fixed(&self) -> f64 {
        let it = self.per_arm_cumulative.iter().copied();
        match self.direction {
            Direction::Gain => it.fold(f64::NEG_INFINITY, f64::max),
            Direction::Loss => it.fold(f64::INFINITY, f64::min),
        }
    }

    /// Pseudo-regret `R_T`.
    pub fn regret(&self) -> f64 {
        if self.stage_count == 0 {
            return 0.0;
        }
        self.regret_against(self.cumulative_expected)
    }

    /// Regret measured with the sampled arms' outcomes, if they were recorded.
    pub fn realized_regret(&self) -> Option<f64> {
        self.cumulative_realized.map(|r| self.regret_against(r))
    }

    fn regret_against(&self, collected: f64) -> f64 {
        match self.direction {
            Direction::Gain => self.best_fixed() - collected,
            Direction::Loss => collected - self.best_fixed(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gain(dim: usize, entries: Vec<(usize, f64)>) -> SparseOutcome {
        SparseOutcome::new(dim, entries, Direction::Gain).unwrap()
    }

    #[test]
    fn zero_outcome_only_counts_stage() {
        let mut l = RegretLedger::new(3, Direction::Loss);
        let x = SimplexDistribution::new(vec![0.2, 0.3, 0.5]).unwrap();
        l.update(&SparseOutcome::zero(3, Direction::Loss).unwrap(), &x, None)
            .unwrap();
        assert_eq!(l.stage_count(), 1);
        assert_eq!(l.per_arm_cumulative(), &[0.0; 3]);
        assert_eq!(l.cumulative_expected(), 0.0);
        assert_eq!(l.cumulative_realized(), None);
    }

    #[test]
    fn single_stage_inner_product() {
        let mut l = RegretLedger::new(2, Direction::Gain);
        let x = SimplexDistribution::uniform(2).unwrap();
        l.update(&gain(2, vec![(0, 1.0)]), &x, None).unwrap();
        assert_eq!(l.cumulative_expected(), 0.5);
        assert_eq!(l.per_arm_cumulative(), &[1.0, 0.0]);
    }

    #[test]
    fn three_stage_accumulation_and_regret() {
        for direction in [Direction::Gain, Direction::Loss] {
            let mut l = RegretLedger::new(2, direction);
            let x = SimplexDistribution::uniform(2).unwrap();
            for e in [(0, 1.0), (1, 1.0), (0, 1.0)] {
                let o = SparseOutcome::new(2, vec![e], direction).unwrap();
                l.update(&o, &x, None).unwrap();
            }
            assert_eq!(l.cumulative_expected(), 1.5);
            assert_eq!(l.per_arm_cumulative(), &[2.0, 1.0]);
            // gains: max(2,1) - 1.5; losses: 1.5 - min(2,1)
            assert_eq!(l.regret(), 0.5);
        }
    }

    #[test]
    fn empty_ledger_has_zero_regret() {
        assert_eq!(RegretLedger::new(4, Direction::Gain).regret(), 0.0);
        assert_eq!(RegretLedger::new(4, Direction::Loss).regret(), 0.0);
    }

    #[test]
    fn realized_arm_tracked() {
        let mut l = RegretLedger::new(2, Direction::Loss);
        let x = SimplexDistribution::uniform(2).unwrap();
        let o = SparseOutcome::new(2, vec![(1, 0.8)], Direction::Loss).unwrap();
        l.update(&o, &x, Some(1)).unwrap();
        l.update(&o, &x, Some(0)).unwrap();
        assert_eq!(l.cumulative_realized(), Some(0.8));
        assert!((l.realized_regret().unwrap() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let mut l = RegretLedger::new(3, Direction::Gain);
        let x = SimplexDistribution::uniform(2).unwrap();
        assert!(matches!(
            l.update(&gain(2, vec![]), &x, None),
            Err(Error::DimensionMismatch { .. })
        ));
        let x3 = SimplexDistribution::uniform(3).unwrap();
        assert!(l.update(&gain(2, vec![]), &x3, None).is_err());
        assert!(l.update(&gain(3, vec![]), &x, None).is_err());
        assert_eq!(l.stage_count(), 0);
    }
}

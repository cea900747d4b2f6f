//! Closed-form regret bounds.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which guarantee a bound value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundSetting {
    /// Tuned `ℓ^p` mirror descent on `s`-sparse gains, `s >= 3`:
    /// `sqrt(2 e T ln s)`.
    FullInfoGains,
    /// Same learner with `p = 2` for `s ∈ {1, 2}`: `sqrt(s T)`.
    FullInfoGainsSmall,
    /// Tuned exponential weights on `s`-sparse losses:
    /// `sqrt(2 s T ln d / d) + ln d`.
    FullInfoLosses,
    /// Sparsity-adaptive losses, `s` read as `s*`.
    AdaptiveLosses,
    /// Sparsity-adaptive gains, `s` read as `s*`.
    AdaptiveGains,
    /// Tsallis-INF on `s`-sparse bandit losses, `d/s >= e²`:
    /// `2 sqrt(e) sqrt(T s ln(d/s))`.
    BanditLosses,
    /// Minimax lower bound for bandit losses, `T >= d²/(4s)`: `sqrt(T s)/32`.
    BanditLossesLower,
}

/// How an empirical run is checked against a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// Holds for every outcome sequence: every replication must satisfy it.
    UpperPerSequence,
    /// Holds for the expected (pseudo-)regret: checked on the mean.
    UpperInExpectation,
    /// Lower bound on the expected regret.
    Lower,
}

impl BoundSetting {
    pub fn kind(self) -> BoundKind {
        match self {
            BoundSetting::BanditLosses => BoundKind::UpperInExpectation,
            BoundSetting::BanditLossesLower => BoundKind::Lower,
            _ => BoundKind::UpperPerSequence,
        }
    }
}

impl std::fmt::Display for BoundSetting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            BoundSetting::FullInfoGains => "full-info gains",
            BoundSetting::FullInfoGainsSmall => "full-info gains (s <= 2)",
            BoundSetting::FullInfoLosses => "full-info losses",
            BoundSetting::AdaptiveLosses => "adaptive losses",
            BoundSetting::AdaptiveGains => "adaptive gains",
            BoundSetting::BanditLosses => "bandit losses (upper)",
            BoundSetting::BanditLossesLower => "bandit losses (lower)",
        };
        f.write_str(name)
    }
}

/// Evaluates the bound of `setting` at `(s, d, T)`.
pub fn theoretical_bound(
    setting: BoundSetting,
    s: usize,
    dim: usize,
    horizon: usize,
) -> Result<f64> {
    if s == 0 || dim == 0 || horizon == 0 {
        return Err(Error::Precondition(
            "s, d and T must all be positive".into(),
        ));
    }
    if s > dim {
        return Err(Error::Precondition(format!("s = {s} exceeds d = {dim}")));
    }
    let (sf, d, t) = (s as f64, dim as f64, horizon as f64);
    let need_d2 = || {
        if dim < 2 {
            Err(Error::Precondition(format!(
                "{setting} bound requires d >= 2"
            )))
        } else {
            Ok(())
        }
    };
    let value = match setting {
        BoundSetting::FullInfoGains => {
            if s < 3 {
                return Err(Error::Precondition(format!(
                    "full-info gains bound requires s >= 3, got s = {s}"
                )));
            }
            (2.0 * E * t * sf.ln()).sqrt()
        }
        BoundSetting::FullInfoGainsSmall => {
            if s > 2 {
                return Err(Error::Precondition(format!(
                    "small-sparsity gains bound requires s <= 2, got s = {s}"
                )));
            }
            (sf * t).sqrt()
        }
        BoundSetting::FullInfoLosses => {
            need_d2()?;
            (2.0 * sf * t * d.ln() / d).sqrt() + d.ln()
        }
        BoundSetting::AdaptiveLosses => {
            need_d2()?;
            4.0 * (t * sf * d.ln() / d).sqrt()
                + sf.ln().ceil() * d.ln() / 2.0
                + 5.0 * sf * (d.ln() / (d * t)).sqrt()
        }
        BoundSetting::AdaptiveGains => {
            if s < 2 {
                return Err(Error::Precondition(format!(
                    "adaptive gains bound requires s* >= 2, got s* = {s}"
                )));
            }
            7.0 * (t * sf.ln()).sqrt() + 4.0 * sf / t.sqrt()
        }
        BoundSetting::BanditLosses => {
            if d / sf < E * E {
                return Err(Error::Precondition(format!(
                    "bandit upper bound requires d/s >= e^2, got d/s = {}",
                    d / sf
                )));
            }
            2.0 * E.sqrt() * (t * sf * (d / sf).ln()).sqrt()
        }
        BoundSetting::BanditLossesLower => {
            need_d2()?;
            if 4.0 * sf * t < d * d {
                return Err(Error::Precondition(format!(
                    "bandit lower bound requires T >= d^2/(4s) = {}",
                    d * d / (4.0 * sf)
                )));
            }
            (t * sf).sqrt() / 32.0
        }
    };
    Ok(value)
}

/// The gains bound that applies at sparsity `s`.
pub fn gains_setting(s: usize) -> BoundSetting {
    if s >= 3 {
        BoundSetting::FullInfoGains
    } else {
        BoundSetting::FullInfoGainsSmall
    }
}

/// The four cells of the upper/lower bound summary instantiated at `(d, s, T)`.
///
/// Full-information cells are both upper and (up to constants) lower bounds.
/// A cell is `None` when its precondition does not hold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTable {
    pub dim: usize,
    pub s: usize,
    pub horizon: usize,
    pub full_info_gains: f64,
    pub full_info_losses: Option<f64>,
    pub bandit_losses_upper: Option<f64>,
    pub bandit_losses_lower: Option<f64>,
}

pub fn bound_table(dim: usize, s: usize, horizon: usize) -> Result<BoundTable> {
    let full_info_gains = theoretical_bound(gains_setting(s), s, dim, horizon)?;
    let cell = |setting| theoretical_bound(setting, s, dim, horizon).ok();
    Ok(BoundTable {
        dim,
        s,
        horizon,
        full_info_gains,
        full_info_losses: cell(BoundSetting::FullInfoLosses),
        bandit_losses_upper: cell(BoundSetting::BanditLosses),
        bandit_losses_lower: cell(BoundSetting::BanditLossesLower),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values computed with 30-digit arithmetic.
    #[test]
    fn reference_values() {
        let cases = [
            (
                BoundSetting::FullInfoGains,
                4,
                100,
                10_000,
                274.530_099_287_034_1,
            ),
            (
                BoundSetting::FullInfoLosses,
                5,
                50,
                20_000,
                129.004_356_990_019_64,
            ),
            (
                BoundSetting::BanditLosses,
                4,
                64,
                40_000,
                2_196.240_794_296_272_8,
            ),
            (
                BoundSetting::BanditLossesLower,
                2,
                8,
                10_000,
                4.419_417_382_415_922,
            ),
            (
                BoundSetting::AdaptiveLosses,
                8,
                50,
                20_000,
                453.491_089_452_631_7,
            ),
            (
                BoundSetting::AdaptiveGains,
                8,
                50,
                20_000,
                1_427.760_060_406_312_2,
            ),
        ];
        for (setting, s, d, t, expected) in cases {
            let v = theoretical_bound(setting, s, d, t).unwrap();
            assert!(
                (v - expected).abs() < 1e-9 * expected,
                "{setting}: {v} vs {expected}"
            );
        }
    }

    #[test]
    fn small_sparsity_gains() {
        assert_eq!(
            theoretical_bound(BoundSetting::FullInfoGainsSmall, 1, 10, 100).unwrap(),
            10.0
        );
        let v = theoretical_bound(BoundSetting::FullInfoGainsSmall, 2, 10, 100).unwrap();
        assert!((v - 200f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn preconditions_named() {
        let err = theoretical_bound(BoundSetting::FullInfoGains, 2, 10, 100).unwrap_err();
        assert!(err.to_string().contains("s >= 3"));
        let err = theoretical_bound(BoundSetting::BanditLosses, 2, 8, 100).unwrap_err();
        assert!(err.to_string().contains("e^2"));
        let err = theoretical_bound(BoundSetting::BanditLossesLower, 1, 100, 10).unwrap_err();
        assert!(err.to_string().contains("d^2/(4s)"));
        assert!(theoretical_bound(BoundSetting::FullInfoLosses, 5, 4, 100).is_err());
    }

    #[test]
    fn table_cells() {
        let t = bound_table(64, 4, 40_000).unwrap();
        assert!((t.bandit_losses_upper.unwrap() - 2196.24).abs() < 0.01);
        assert!((t.bandit_losses_lower.unwrap() - 12.5).abs() < 1e-12);
        let t = bound_table(10, 1, 100).unwrap();
        assert_eq!(t.full_info_gains, 10.0);
        assert!(bound_table(3, 4, 100).is_err());
    }
}

//! Seeded algorithm-versus-adversary matches.
//!
//! Replication `r` of a run draws its outcome sequence from stream
//! `(base_seed, r)` and, for bandit learners, its arm draws from stream
//! `(base_seed, SAMPLER_STREAM_OFFSET + r)`. Replications run in parallel on
//! the ambient rayon pool and are collected in replication order, so a result
//! depends only on its configuration.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversaries::{generate, AdversaryKind, AdversarySpec};
use crate::bandit::{
    bandit_eta, sample_arm, tune_bandit_with_rule, BanditEtaRule, BanditLearner, TsallisInf,
    UniformPlay,
};
use crate::bounds::{gains_setting, theoretical_bound, BoundKind, BoundSetting};
use crate::error::{Error, Result};
use crate::full_info::{AdaptiveGains, AdaptiveLosses, Ewa, FullInfoLearner, OmdGains};
use crate::ledger::RegretLedger;
use crate::outcome::{Direction, SparseOutcome};
use crate::rng::RngStream;

pub const SAMPLER_STREAM_OFFSET: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Tuned `ℓ^p` mirror descent on sparse gains.
    OmdGains,
    /// Exponential weights tuned for sparse losses.
    EwaLosses,
    AdaptiveLosses,
    AdaptiveGains,
    /// Tsallis-INF on bandit losses.
    BanditTsallis,
    /// Uniform play with bandit feedback; a non-learning reference.
    UniformRandom,
}

impl Algorithm {
    pub fn direction(self) -> Option<Direction> {
        match self {
            Algorithm::OmdGains | Algorithm::AdaptiveGains => Some(Direction::Gain),
            Algorithm::EwaLosses | Algorithm::AdaptiveLosses | Algorithm::BanditTsallis => {
                Some(Direction::Loss)
            }
            Algorithm::UniformRandom => None,
        }
    }

    pub fn is_bandit(self) -> bool {
        matches!(self, Algorithm::BanditTsallis | Algorithm::UniformRandom)
    }

    pub fn is_adaptive(self) -> bool {
        matches!(self, Algorithm::AdaptiveLosses | Algorithm::AdaptiveGains)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant serializes");
        f.write_str(s.as_str().unwrap_or("?"))
    }
}

/// Step-size options for [`Algorithm::BanditTsallis`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BanditOptions {
    /// Fixed `q`; when absent, `q = ln(d/s)` and `d/s >= e²` is required.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default)]
    pub eta_rule: BanditEtaRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub adversary: AdversaryKind,
    pub dim: usize,
    pub s: usize,
    pub horizon: usize,
    /// Outcome direction; inferred from the algorithm or adversary when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<usize>>,
    pub replications: usize,
    pub base_seed: u64,
    /// Trajectory stride; defaults to `max(T/100, 1)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_trajectory_every: Option<usize>,
    #[serde(default)]
    pub bandit: BanditOptions,
    /// Bound to check; defaults to the one matching the algorithm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<BoundSetting>,
}

impl ExperimentConfig {
    pub fn new(
        algorithm: Algorithm,
        adversary: AdversaryKind,
        dim: usize,
        s: usize,
        horizon: usize,
    ) -> Self {
        ExperimentConfig {
            algorithm,
            adversary,
            dim,
            s,
            horizon,
            direction: None,
            epsilon: None,
            levels: None,
            replications: 1,
            base_seed: 0,
            record_trajectory_every: None,
            bandit: BanditOptions::default(),
            bound: None,
        }
    }

    pub fn replications(mut self, n: usize) -> Self {
        self.replications = n;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.base_seed = seed;
        self
    }

    pub fn stride(mut self, every: usize) -> Self {
        self.record_trajectory_every = Some(every);
        self
    }

    pub fn epsilon(mut self, eps: f64) -> Self {
        self.epsilon = Some(eps);
        self
    }

    pub fn levels(mut self, levels: Vec<usize>) -> Self {
        self.levels = Some(levels);
        self
    }

    pub fn bandit_q(mut self, q: f64) -> Self {
        self.bandit.q = Some(q);
        self
    }

    pub fn direction(&self) -> Direction {
        self.direction
            .or(self.algorithm.direction())
            .or(self.adversary.fixed_direction())
            .unwrap_or(Direction::Loss)
    }

    pub fn stride_or_default(&self) -> usize {
        self.record_trajectory_every
            .unwrap_or((self.horizon / 100).max(1))
    }

    pub fn adversary_spec(&self, replication: usize) -> AdversarySpec {
        AdversarySpec {
            kind: self.adversary,
            dim: self.dim,
            s: self.s,
            horizon: self.horizon,
            direction: self.direction(),
            epsilon: self.epsilon,
            levels: self.levels.clone(),
            seed: self.base_seed,
            stream_id: replication as u64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidParameter(
                "replications must be positive".into(),
            ));
        }
        if self.record_trajectory_every == Some(0) {
            return Err(Error::InvalidParameter(
                "trajectory stride must be positive".into(),
            ));
        }
        let dir = self.direction();
        for required in [self.algorithm.direction(), self.adversary.fixed_direction()]
            .into_iter()
            .flatten()
        {
            if required != dir {
                return Err(Error::InvalidParameter(format!(
                    "{} and {:?} disagree on the outcome direction",
                    self.algorithm, self.adversary
                )));
            }
        }
        self.adversary_spec(0).validate()?;
        // Surfaces tuning preconditions before any work is done.
        if self.horizon > 0 {
            self.full_info_learner().map(|_| ()).or_else(|e| match e {
                Error::InvalidParameter(ref m) if m == NOT_FULL_INFO => {
                    self.bandit_learner().map(|_| ())
                }
                e => Err(e),
            })?;
        }
        Ok(())
    }

    fn full_info_learner(&self) -> Result<Box<dyn FullInfoLearner + Send>> {
        let (d, s, t) = (self.dim, self.s, self.horizon.max(1));
        Ok(match self.algorithm {
            Algorithm::OmdGains => Box::new(OmdGains::tuned(d, s, t)?),
            Algorithm::EwaLosses => Box::new(Ewa::tuned_losses(d, s, t)?),
            Algorithm::AdaptiveLosses => Box::new(AdaptiveLosses::new(d, t)?),
            Algorithm::AdaptiveGains => Box::new(AdaptiveGains::new(d, t)?),
            _ => return Err(Error::InvalidParameter(NOT_FULL_INFO.into())),
        })
    }

    fn bandit_learner(&self) -> Result<Box<dyn BanditLearner + Send>> {
        let (d, s, t) = (self.dim, self.s, self.horizon.max(1));
        Ok(match self.algorithm {
            Algorithm::BanditTsallis => {
                let rule = self.bandit.eta_rule;
                let (q, eta) = match self.bandit.q {
                    Some(q) => (q, bandit_eta(q, s, d, t, rule)?),
                    None => {
                        let tuning = tune_bandit_with_rule(s, d, t, rule)?;
                        (tuning.q, tuning.eta)
                    }
                };
                Box::new(TsallisInf::new(d, q, eta)?)
            }
            Algorithm::UniformRandom => Box::new(UniformPlay::new(d)?),
            _ => return Err(Error::InvalidParameter("not a bandit learner".into())),
        })
    }

    /// The bound this run is checked against, if one applies.
    pub fn bound_setting(&self) -> Option<BoundSetting> {
        if self.bound.is_some() {
            return self.bound;
        }
        if self.adversary == AdversaryKind::BanditLossLb {
            return Some(BoundSetting::BanditLossesLower);
        }
        match self.algorithm {
            Algorithm::OmdGains => Some(gains_setting(self.s)),
            Algorithm::EwaLosses => Some(BoundSetting::FullInfoLosses),
            Algorithm::AdaptiveLosses => Some(BoundSetting::AdaptiveLosses),
            Algorithm::AdaptiveGains => Some(BoundSetting::AdaptiveGains),
            Algorithm::BanditTsallis => Some(BoundSetting::BanditLosses),
            Algorithm::UniformRandom => None,
        }
    }

    fn bound_value(&self) -> Result<Option<BoundValue>> {
        let Some(setting) = self.bound_setting() else {
            return Ok(None);
        };
        match theoretical_bound(setting, self.s, self.dim, self.horizon) {
            Ok(value) => Ok(Some(BoundValue {
                setting,
                kind: setting.kind(),
                value,
            })),
            Err(e) if self.bound.is_some() => Err(e),
            Err(_) => Ok(None),
        }
    }
}

const NOT_FULL_INFO: &str = "not a full-information learner";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub setting: BoundSetting,
    pub kind: BoundKind,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub stage: usize,
    pub expected_regret: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realized_regret: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationResult {
    pub replication: usize,
    pub final_regret: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_realized_regret: Option<f64>,
    /// Largest regime index reached, adaptive learners only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_regime: Option<u32>,
    /// Hidden arm of the bandit lower-bound adversary.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub favored_arm: Option<usize>,
    pub trajectory: Vec<TrajectoryPoint>,
}

/// Mean, spread and extremes over replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator; zero for one value).
    pub std: f64,
    pub stderr: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn from_values(values: &[f64]) -> Result<Summary> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("no values to summarize".into()));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let std = var.sqrt();
        Ok(Summary {
            count: values.len(),
            mean,
            std,
            stderr: std / n.sqrt(),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub config: ExperimentConfig,
    pub summary: Summary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realized_summary: Option<Summary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<BoundValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_ratio: Option<f64>,
    pub replications: Vec<ReplicationResult>,
}

impl RunResult {
    pub fn final_regrets(&self) -> Vec<f64> {
        self.replications.iter().map(|r| r.final_regret).collect()
    }
}

/// Stages at which the trajectory is sampled: `0, k, 2k, ...` and always `T`.
fn is_recorded(stage: usize, stride: usize, horizon: usize) -> bool {
    stage.is_multiple_of(stride) || stage == horizon
}

/// A trajectory together with the final ledger of one replication.
#[derive(Debug, Clone)]
pub struct PlayRecord {
    pub ledger: RegretLedger,
    pub trajectory: Vec<TrajectoryPoint>,
    pub max_regime: Option<u32>,
}

/// Error raised at 1-based `stage` while playing a sequence.
#[derive(Debug)]
pub struct StageError {
    pub stage: usize,
    pub source: Error,
}

/// Feeds every outcome vector in full to the learner.
pub fn play_full_info(
    learner: &mut dyn FullInfoLearner,
    outcomes: &[SparseOutcome],
    stride: usize,
) -> Result<PlayRecord, StageError> {
    let horizon = outcomes.len();
    let mut ledger = RegretLedger::new(learner.dim(), learner.direction());
    let mut trajectory = vec![TrajectoryPoint {
        stage: 0,
        expected_regret: 0.0,
        realized_regret: None,
        regime: learner.regime(),
    }];
    let mut max_regime = learner.regime();
    for (t, outcome) in outcomes.iter().enumerate() {
        let stage = t + 1;
        let fail = |source| StageError { stage, source };
        let x = learner.step(outcome).map_err(fail)?;
        ledger.update(outcome, &x, None).map_err(fail)?;
        max_regime = max_regime.max(learner.regime());
        if is_recorded(stage, stride, horizon) {
            trajectory.push(TrajectoryPoint {
                stage,
                expected_regret: ledger.regret(),
                realized_regret: None,
                regime: learner.regime(),
            });
        }
    }
    Ok(PlayRecord {
        ledger,
        trajectory,
        max_regime,
    })
}

/// Plays with bandit feedback: each stage the learner's distribution is
/// sampled and only the drawn arm's outcome is revealed to it.
pub fn play_bandit(
    learner: &mut dyn BanditLearner,
    outcomes: &[SparseOutcome],
    rng: &mut RngStream,
    stride: usize,
) -> Result<PlayRecord, StageError> {
    let horizon = outcomes.len();
    let dim = learner.distribution().dim();
    let direction = outcomes.first().map_or(Direction::Loss, |o| o.direction());
    let mut ledger = RegretLedger::new(dim, direction);
    let mut trajectory = vec![TrajectoryPoint {
        stage: 0,
        expected_regret: 0.0,
        realized_regret: Some(0.0),
        regime: None,
    }];
    for (t, outcome) in outcomes.iter().enumerate() {
        let stage = t + 1;
        let fail = |source| StageError { stage, source };
        let x = learner.distribution().clone();
        let arm = sample_arm(&x, rng);
        ledger.update(outcome, &x, Some(arm)).map_err(fail)?;
        learner.observe(arm, outcome.value(arm)).map_err(fail)?;
        if is_recorded(stage, stride, horizon) {
            trajectory.push(TrajectoryPoint {
                stage,
                expected_regret: ledger.regret(),
                realized_regret: ledger.realized_regret(),
                regime: None,
            });
        }
    }
    Ok(PlayRecord {
        ledger,
        trajectory,
        max_regime: None,
    })
}

/// Runs replication `replication` of `config` (no validation).
pub fn run_replication(config: &ExperimentConfig, replication: usize) -> Result<ReplicationResult> {
    let stride = config.stride_or_default();
    let seq = generate(&config.adversary_spec(replication))?;
    let played = if config.algorithm.is_bandit() {
        let mut learner = config.bandit_learner()?;
        let mut rng = RngStream::new(config.base_seed, SAMPLER_STREAM_OFFSET + replication as u64);
        play_bandit(learner.as_mut(), &seq.outcomes, &mut rng, stride)
    } else {
        let mut learner = config.full_info_learner()?;
        play_full_info(learner.as_mut(), &seq.outcomes, stride)
    };
    let record = played.map_err(|e| Error::Replication {
        replication,
        stage: e.stage,
        source: Box::new(e.source),
    })?;
    Ok(ReplicationResult {
        replication,
        final_regret: record.ledger.regret(),
        final_realized_regret: record.ledger.realized_regret(),
        max_regime: record.max_regime,
        favored_arm: seq.favored_arm,
        trajectory: record.trajectory,
    })
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<RunResult> {
    config.validate()?;
    let replications = (0..config.replications)
        .into_par_iter()
        .map(|r| run_replication(config, r))
        .collect::<Result<Vec<_>>>()?;
    let finals: Vec<f64> = replications.iter().map(|r| r.final_regret).collect();
    let summary = Summary::from_values(&finals)?;
    let realized_summary = if config.algorithm.is_bandit() {
        let realized: Vec<f64> = replications
            .iter()
            .map(|r| r.final_realized_regret.unwrap_or(0.0))
            .collect();
        Some(Summary::from_values(&realized)?)
    } else {
        None
    };
    let bound = config.bound_value()?;
    let bound_ratio = bound
        .map(|b| summary.mean / b.value)
        .filter(|r| r.is_finite());
    Ok(RunResult {
        config: config.clone(),
        summary,
        realized_summary,
        bound,
        bound_ratio,
        replications,
    })
}

/// Outcome of checking a run against its bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub setting: BoundSetting,
    pub kind: BoundKind,
    pub bound: f64,
    pub summary: Summary,
    pub ratio: f64,
    pub pass: bool,
}

impl BoundReport {
    /// Upper bounds per sequence pass iff the largest replication is within
    /// the bound, upper bounds in expectation iff the mean is; lower bounds
    /// pass iff `mean - 2·stderr >= bound`.
    pub fn evaluate(setting: BoundSetting, kind: BoundKind, bound: f64, summary: Summary) -> Self {
        let pass = match kind {
            BoundKind::UpperPerSequence => summary.max <= bound,
            BoundKind::UpperInExpectation => summary.mean <= bound,
            BoundKind::Lower => summary.mean - 2.0 * summary.stderr >= bound,
        };
        BoundReport {
            setting,
            kind,
            bound,
            summary,
            ratio: summary.mean / bound,
            pass,
        }
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rule = match self.kind {
            BoundKind::UpperPerSequence => "max <= bound",
            BoundKind::UpperInExpectation => "mean <= bound",
            BoundKind::Lower => "mean - 2*stderr >= bound",
        };
        write!(
            f,
            "{}: bound {:.4}, regret mean {:.4} ± {:.4} (stderr {:.4}, min {:.4}, max {:.4}, n = {}), ratio {:.4} [{}] {}",
            self.setting,
            self.bound,
            self.summary.mean,
            self.summary.std,
            self.summary.stderr,
            self.summary.min,
            self.summary.max,
            self.summary.count,
            self.ratio,
            rule,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

pub fn compare_to_bound(result: &RunResult) -> Result<BoundReport> {
    if result.replications.is_empty() {
        return Err(Error::InvalidParameter("result has no replications".into()));
    }
    let bound = result
        .bound
        .ok_or_else(|| Error::InvalidParameter("no bound applies to this run".into()))?;
    Ok(BoundReport::evaluate(
        bound.setting,
        bound.kind,
        bound.value,
        result.summary,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Csv,
    Json,
}

pub const CSV_HEADER: [&str; 5] = [
    "replication",
    "stage",
    "expected_regret",
    "realized_regret",
    "regime_m",
];

/// Writes `result` as a trajectory CSV or as JSON.
///
/// CSV has one row per recorded stage and replication; `realized_regret` is
/// empty for full-information runs and `regime_m` for non-adaptive learners.
pub fn export(result: &RunResult, format: ExportFormat, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    match format {
        ExportFormat::Json => {
            serde_json::to_writer_pretty(&mut w, result).map_err(|e| Error::format(path, e))?;
            w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
        }
        ExportFormat::Csv => {
            let mut csv = csv::Writer::from_writer(&mut w);
            let csv_err = |e: csv::Error| Error::format(path, e);
            csv.write_record(CSV_HEADER).map_err(csv_err)?;
            for rep in &result.replications {
                for pt in &rep.trajectory {
                    csv.write_record([
                        rep.replication.to_string(),
                        pt.stage.to_string(),
                        pt.expected_regret.to_string(),
                        pt.realized_regret
                            .map(|v| v.to_string())
                            .unwrap_or_default(),
                        pt.regime.map(|m| m.to_string()).unwrap_or_default(),
                    ])
                    .map_err(csv_err)?;
                }
            }
            csv.flush().map_err(|e| Error::io(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn import_json(path: &Path) -> Result<RunResult> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::format(path, e))
}

/// Reads a trajectory CSV back as one row list per replication.
pub fn import_csv(path: &Path) -> Result<Vec<(usize, Vec<TrajectoryPoint>)>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::format(path, e))?;
    let header = rdr.headers().map_err(|e| Error::format(path, e))?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::format(path, format!("unexpected header {header:?}")));
    }
    let mut out: Vec<(usize, Vec<TrajectoryPoint>)> = Vec::new();
    for (n, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| Error::format(path, e))?;
        let bad = |what: &str| Error::format(path, format!("row {}: bad {what}", n + 1));
        let rep: usize = row[0].parse().map_err(|_| bad("replication"))?;
        let point = TrajectoryPoint {
            stage: row[1].parse().map_err(|_| bad("stage"))?,
            expected_regret: row[2].parse().map_err(|_| bad("expected_regret"))?,
            realized_regret: match &row[3] {
                "" => None,
                v => Some(v.parse().map_err(|_| bad("realized_regret"))?),
            },
            regime: match &row[4] {
                "" => None,
                v => Some(v.parse().map_err(|_| bad("regime_m"))?),
            },
        };
        match out.last_mut() {
            Some((r, pts)) if *r == rep => pts.push(point),
            _ => out.push((rep, vec![point])),
        }
    }
    Ok(out)
}

/// Summary of final expected regrets recovered from an imported CSV.
pub fn summary_from_csv(rows: &[(usize, Vec<TrajectoryPoint>)]) -> Result<Summary> {
    let finals: Vec<f64> = rows
        .iter()
        .filter_map(|(_, pts)| pts.last().map(|p| p.expected_regret))
        .collect();
    Summary::from_values(&finals)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(mean: f64, stderr: f64, max: f64) -> Summary {
        Summary {
            count: 32,
            mean,
            std: stderr * 32f64.sqrt(),
            stderr,
            min: 0.0,
            max,
        }
    }

    #[test]
    fn upper_bound_report() {
        let r = BoundReport::evaluate(
            BoundSetting::FullInfoGains,
            BoundKind::UpperPerSequence,
            274.53,
            summary(100.0, 2.0, 150.0),
        );
        assert!(r.pass);
        assert!((r.ratio - 0.364_3).abs() < 1e-3);
        let r = BoundReport::evaluate(
            BoundSetting::FullInfoGains,
            BoundKind::UpperPerSequence,
            274.53,
            summary(100.0, 2.0, 300.0),
        );
        assert!(!r.pass);
    }

    #[test]
    fn lower_bound_report() {
        let bound = 20_000f64.sqrt() / 32.0;
        let r = BoundReport::evaluate(
            BoundSetting::BanditLossesLower,
            BoundKind::Lower,
            bound,
            summary(6.0, 0.3, 9.0),
        );
        assert!(r.pass);
        let r = BoundReport::evaluate(
            BoundSetting::BanditLossesLower,
            BoundKind::Lower,
            bound,
            summary(5.0, 0.3, 9.0),
        );
        assert!(!r.pass);
    }

    #[test]
    fn summary_statistics() {
        let s = Summary::from_values(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.mean, 2.5);
        assert!((s.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!((s.min, s.max), (1.0, 4.0));
        assert!(Summary::from_values(&[]).is_err());
        assert_eq!(Summary::from_values(&[3.0]).unwrap().std, 0.0);
    }

    #[test]
    fn recorded_stages() {
        let stages: Vec<usize> = (0..=10_000)
            .filter(|&t| is_recorded(t, 100, 10_000))
            .collect();
        assert_eq!(stages.len(), 101);
        let stages: Vec<usize> = (0..=25).filter(|&t| is_recorded(t, 10, 25)).collect();
        assert_eq!(stages, vec![0, 10, 20, 25]);
    }

    #[test]
    fn direction_mismatch_rejected() {
        let c = ExperimentConfig::new(
            Algorithm::OmdGains,
            AdversaryKind::FullInfoLossLb,
            10,
            3,
            10,
        );
        assert!(c.validate().is_err());
    }

    #[test]
    fn bandit_precondition_surfaces_in_validation() {
        let c = ExperimentConfig::new(
            Algorithm::BanditTsallis,
            AdversaryKind::RandomSparse,
            8,
            2,
            10,
        );
        let err = c.validate().unwrap_err().to_string();
        assert!(err.contains("e^2"), "{err}");
        assert!(c.clone().bandit_q(2.0).validate().is_ok());
    }

    #[test]
    fn default_bounds() {
        let c = ExperimentConfig::new(Algorithm::OmdGains, AdversaryKind::RandomSparse, 10, 2, 10);
        assert_eq!(c.bound_setting(), Some(BoundSetting::FullInfoGainsSmall));
        let c = ExperimentConfig::new(
            Algorithm::UniformRandom,
            AdversaryKind::BanditLossLb,
            8,
            2,
            10,
        );
        assert_eq!(c.bound_setting(), Some(BoundSetting::BanditLossesLower));
        let c = ExperimentConfig::new(
            Algorithm::UniformRandom,
            AdversaryKind::RandomSparse,
            8,
            2,
            10,
        );
        assert_eq!(c.bound_setting(), None);
    }
}

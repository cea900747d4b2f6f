//! Oblivious outcome-sequence generators.
//!
//! Every sequence is materialized up front from `(seed, stream_id)` and never
//! looks at the learner. The lower-bound constructions also return their
//! hidden draws (the favored arm and the per-stage supports) for diagnostics;
//! the harness never hands those to a learner.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::outcome::{Direction, SparseOutcome};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryKind {
    /// Support drawn uniformly among `s`-subsets each stage, values i.i.d.
    /// uniform on `(0, 1]`.
    RandomSparse,
    /// Fair coins on the first `s` coordinates, zero elsewhere.
    FirstSCoordsGains,
    /// Uniform `s`-subset `I_t` each stage; fair coins on `I_t`.
    FullInfoLossLb,
    /// Like [`AdversaryKind::FullInfoLossLb`] but a hidden arm `Z`, drawn once,
    /// has its coin biased to `1/2 - ε d / s`.
    BanditLossLb,
    /// [`AdversaryKind::RandomSparse`] whose support size follows `levels`
    /// over equal consecutive blocks of stages.
    SparsityRamp,
}

impl AdversaryKind {
    /// The direction the construction is tied to, if any.
    pub fn fixed_direction(self) -> Option<Direction> {
        match self {
            AdversaryKind::FirstSCoordsGains => Some(Direction::Gain),
            AdversaryKind::FullInfoLossLb | AdversaryKind::BanditLossLb => Some(Direction::Loss),
            AdversaryKind::RandomSparse | AdversaryKind::SparsityRamp => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversarySpec {
    pub kind: AdversaryKind,
    pub dim: usize,
    pub s: usize,
    pub horizon: usize,
    pub direction: Direction,
    /// Bias of the hidden arm, [`AdversaryKind::BanditLossLb`] only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Support sizes, [`AdversaryKind::SparsityRamp`] only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<usize>>,
    pub seed: u64,
    pub stream_id: u64,
}

impl AdversarySpec {
    pub fn new(
        kind: AdversaryKind,
        dim: usize,
        s: usize,
        horizon: usize,
        direction: Direction,
    ) -> Self {
        AdversarySpec {
            kind,
            dim,
            s,
            horizon,
            direction,
            epsilon: None,
            levels: None,
            seed: 0,
            stream_id: 0,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = Some(epsilon);
        self
    }

    pub fn with_levels(mut self, levels: Vec<usize>) -> Self {
        self.levels = Some(levels);
        self
    }

    pub fn with_stream(mut self, seed: u64, stream_id: u64) -> Self {
        self.seed = seed;
        self.stream_id = stream_id;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.s == 0 || self.s > self.dim {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= s <= d, got s = {}, d = {}",
                self.s, self.dim
            )));
        }
        if let Some(required) = self.kind.fixed_direction() {
            if required != self.direction {
                return Err(Error::InvalidParameter(format!(
                    "{:?} generates {required} vectors, not {}",
                    self.kind, self.direction
                )));
            }
        }
        match self.kind {
            AdversaryKind::BanditLossLb => {
                let eps = self.epsilon.ok_or_else(|| {
                    Error::InvalidParameter("bandit lower-bound adversary needs epsilon".into())
                })?;
                let max = self.s as f64 / (4.0 * self.dim as f64);
                if !(0.0..=max).contains(&eps) {
                    return Err(Error::InvalidParameter(format!(
                        "epsilon = {eps} outside [0, s/(4d)] = [0, {max}]"
                    )));
                }
            }
            AdversaryKind::SparsityRamp => {
                let levels = self.levels.as_deref().unwrap_or_default();
                if levels.is_empty() {
                    return Err(Error::InvalidParameter("sparsity ramp needs levels".into()));
                }
                if let Some(l) = levels.iter().find(|&&l| l == 0 || l > self.s) {
                    return Err(Error::InvalidParameter(format!(
                        "ramp level {l} outside 1..={}",
                        self.s
                    )));
                }
            }
            _ => {}
        }
        if self.epsilon.is_some() && self.kind != AdversaryKind::BanditLossLb {
            return Err(Error::InvalidParameter(
                "epsilon only applies to the bandit lower-bound adversary".into(),
            ));
        }
        if self.levels.is_some() && self.kind != AdversaryKind::SparsityRamp {
            return Err(Error::InvalidParameter(
                "levels only apply to the sparsity ramp".into(),
            ));
        }
        Ok(())
    }
}

/// A generated sequence together with the draws a learner must not see.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedSequence {
    pub outcomes: Vec<SparseOutcome>,
    /// `Z` of the bandit lower-bound construction.
    pub favored_arm: Option<usize>,
    /// `I_t` of the lower-bound constructions, sorted.
    pub supports: Option<Vec<Vec<usize>>>,
}

/// `ε = sqrt(s/T) / 8`.
pub fn default_epsilon(s: usize, horizon: usize) -> f64 {
    (s as f64 / horizon as f64).sqrt() / 8.0
}

/// Partial Fisher-Yates over a persistent permutation buffer.
struct SubsetSampler {
    perm: Vec<usize>,
}

impl SubsetSampler {
    fn new(dim: usize) -> Self {
        SubsetSampler {
            perm: (0..dim).collect(),
        }
    }

    fn draw(&mut self, k: usize, rng: &mut RngStream) -> Vec<usize> {
        let d = self.perm.len();
        for i in 0..k {
            let j = i + rng.below(d - i);
            self.perm.swap(i, j);
        }
        let mut out = self.perm[..k].to_vec();
        out.sort_unstable();
        out
    }
}

pub fn generate(spec: &AdversarySpec) -> Result<GeneratedSequence> {
    spec.validate()?;
    let mut rng = RngStream::new(spec.seed, spec.stream_id);
    let mut sampler = SubsetSampler::new(spec.dim);
    let (d, s, t_max, dir) = (spec.dim, spec.s, spec.horizon, spec.direction);
    let mut outcomes = Vec::with_capacity(t_max);
    let mut favored_arm = None;
    let mut supports = None;

    match spec.kind {
        AdversaryKind::RandomSparse | AdversaryKind::SparsityRamp => {
            let levels = match spec.kind {
                AdversaryKind::SparsityRamp => spec.levels.clone().unwrap_or_default(),
                _ => vec![s],
            };
            for t in 0..t_max {
                let k = levels[t * levels.len() / t_max.max(1)];
                let entries = sampler
                    .draw(k, &mut rng)
                    .into_iter()
                    .map(|i| (i, 1.0 - rng.unit()))
                    .collect();
                outcomes.push(SparseOutcome::new(d, entries, dir)?);
            }
        }
        AdversaryKind::FirstSCoordsGains => {
            for _ in 0..t_max {
                let entries = (0..s)
                    .filter_map(|i| (rng.unit() < 0.5).then_some((i, 1.0)))
                    .collect();
                outcomes.push(SparseOutcome::new(d, entries, dir)?);
            }
        }
        AdversaryKind::FullInfoLossLb | AdversaryKind::BanditLossLb => {
            let (z, biased_p) = if spec.kind == AdversaryKind::BanditLossLb {
                let eps = spec.epsilon.unwrap_or(0.0);
                let z = rng.below(d);
                favored_arm = Some(z);
                (Some(z), 0.5 - eps * d as f64 / s as f64)
            } else {
                (None, 0.5)
            };
            let mut drawn = Vec::with_capacity(t_max);
            for _ in 0..t_max {
                let support = sampler.draw(s, &mut rng);
                let entries = support
                    .iter()
                    .filter_map(|&j| {
                        let p = if Some(j) == z { biased_p } else { 0.5 };
                        (rng.unit() < p).then_some((j, 1.0))
                    })
                    .collect();
                outcomes.push(SparseOutcome::new(d, entries, dir)?);
                drawn.push(support);
            }
            supports = Some(drawn);
        }
    }

    Ok(GeneratedSequence {
        outcomes,
        favored_arm,
        supports,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StageRecord {
    stage: usize,
    dim: usize,
    direction: Direction,
    entries: Vec<(usize, f64)>,
}

/// Writes one JSON object per stage:
/// `{"stage":t,"dim":d,"direction":"loss","entries":[[i,v],...]}`.
pub fn write_jsonl(path: &Path, outcomes: &[SparseOutcome]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for (stage, o) in outcomes.iter().enumerate() {
        let rec = StageRecord {
            stage,
            dim: o.dim(),
            direction: o.direction(),
            entries: o.entries().to_vec(),
        };
        serde_json::to_writer(&mut w, &rec).map_err(|e| Error::format(path, e))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a sequence written by [`write_jsonl`]; stages must be consecutive
/// from zero.
pub fn read_jsonl(path: &Path) -> Result<Vec<SparseOutcome>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: StageRecord = serde_json::from_str(&line)
            .map_err(|e| Error::format(path, format!("line {}: {e}", n + 1)))?;
        if rec.stage != out.len() {
            return Err(Error::format(
                path,
                format!(
                    "line {}: expected stage {}, found {}",
                    n + 1,
                    out.len(),
                    rec.stage
                ),
            ));
        }
        out.push(SparseOutcome::new(rec.dim, rec.entries, rec.direction)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_epsilon_values() {
        assert!((default_epsilon(2, 10_000) - 0.001_767_766_952_966_368_8).abs() < 1e-15);
        assert_eq!(default_epsilon(7, 7), 0.125);
        assert!(default_epsilon(2, 10_000) <= 2.0 / (4.0 * 8.0));
    }

    #[test]
    fn epsilon_range_enforced() {
        let base = AdversarySpec::new(AdversaryKind::BanditLossLb, 8, 2, 10, Direction::Loss);
        assert!(generate(&base).is_err());
        assert!(generate(&base.clone().with_epsilon(0.0625)).is_ok());
        assert!(generate(&base.clone().with_epsilon(0.07)).is_err());
        assert!(generate(&base.clone().with_epsilon(-0.01)).is_err());
    }

    #[test]
    fn direction_tied_kinds() {
        let spec = AdversarySpec::new(AdversaryKind::FullInfoLossLb, 4, 2, 10, Direction::Gain);
        assert!(generate(&spec).is_err());
        let spec = AdversarySpec::new(AdversaryKind::FirstSCoordsGains, 4, 2, 10, Direction::Loss);
        assert!(generate(&spec).is_err());
    }

    #[test]
    fn random_sparse_exact_support() {
        let spec = AdversarySpec::new(AdversaryKind::RandomSparse, 20, 4, 500, Direction::Gain)
            .with_stream(9, 1);
        let seq = generate(&spec).unwrap();
        assert_eq!(seq.outcomes.len(), 500);
        assert!(seq.outcomes.iter().all(|o| o.sparsity() == 4));
    }

    #[test]
    fn first_s_coordinates_only() {
        let spec = AdversarySpec::new(
            AdversaryKind::FirstSCoordsGains,
            10,
            3,
            300,
            Direction::Gain,
        );
        let seq = generate(&spec).unwrap();
        assert!(seq
            .outcomes
            .iter()
            .all(|o| o.entries().iter().all(|&(i, v)| i < 3 && v == 1.0)));
    }

    #[test]
    fn ramp_blocks() {
        let spec = AdversarySpec::new(AdversaryKind::SparsityRamp, 50, 8, 400, Direction::Loss)
            .with_levels(vec![1, 2, 5, 8]);
        let seq = generate(&spec).unwrap();
        let sizes: Vec<usize> = seq.outcomes.iter().map(|o| o.sparsity()).collect();
        assert!(sizes[..100].iter().all(|&k| k == 1));
        assert!(sizes[100..200].iter().all(|&k| k == 2));
        assert!(sizes[200..300].iter().all(|&k| k == 5));
        assert!(sizes[300..].iter().all(|&k| k == 8));
    }

    #[test]
    fn ramp_level_above_s_rejected() {
        let spec = AdversarySpec::new(AdversaryKind::SparsityRamp, 50, 4, 40, Direction::Loss)
            .with_levels(vec![1, 8]);
        assert!(generate(&spec).is_err());
    }

    #[test]
    fn lower_bound_supports_contain_outcomes() {
        let spec = AdversarySpec::new(AdversaryKind::BanditLossLb, 8, 2, 1000, Direction::Loss)
            .with_epsilon(0.05)
            .with_stream(1, 2);
        let seq = generate(&spec).unwrap();
        let z = seq.favored_arm.unwrap();
        assert!(z < 8);
        let supports = seq.supports.unwrap();
        for (o, sup) in seq.outcomes.iter().zip(&supports) {
            assert_eq!(sup.len(), 2);
            assert!(o.entries().iter().all(|(i, _)| sup.contains(i)));
        }
    }

    #[test]
    fn jsonl_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("seq.jsonl");
        let spec = AdversarySpec::new(AdversaryKind::RandomSparse, 6, 2, 25, Direction::Loss)
            .with_stream(4, 4);
        let seq = generate(&spec).unwrap();
        write_jsonl(&path, &seq.outcomes).unwrap();
        assert_eq!(read_jsonl(&path).unwrap(), seq.outcomes);
        let first = std::fs::read_to_string(&path).unwrap();
        assert!(first.starts_with("{\"stage\":0,\"dim\":6,\"direction\":\"loss\",\"entries\":[["));
    }
}

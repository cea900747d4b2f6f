//! Sparse outcome vectors in `[0,1]^d`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::SimplexDistribution;

/// Whether outcomes are gains to maximize or losses to minimize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Gain,
    Loss,
}

impl Direction {
    pub fn flipped(self) -> Self {
        match self {
            Direction::Gain => Direction::Loss,
            Direction::Loss => Direction::Gain,
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Direction::Gain => f.write_str("gain"),
            Direction::Loss => f.write_str("loss"),
        }
    }
}

/// One stage's outcome vector, stored by its support.
///
/// Entries are kept in canonical form: sorted by index, distinct, with every
/// value in `(0, 1]`. Zero-valued entries handed to the constructor are
/// dropped, so [`SparseOutcome::sparsity`] is the entry count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOutcome", into = "RawOutcome")]
pub struct SparseOutcome {
    dim: usize,
    entries: Vec<(usize, f64)>,
    direction: Direction,
}

#[derive(Serialize, Deserialize)]
struct RawOutcome {
    dim: usize,
    direction: Direction,
    entries: Vec<(usize, f64)>,
}

impl TryFrom<RawOutcome> for SparseOutcome {
    type Error = Error;

    fn try_from(raw: RawOutcome) -> Result<Self> {
        SparseOutcome::new(raw.dim, raw.entries, raw.direction)
    }
}

impl From<SparseOutcome> for RawOutcome {
    fn from(o: SparseOutcome) -> Self {
        RawOutcome {
            dim: o.dim,
            direction: o.direction,
            entries: o.entries,
        }
    }
}

impl SparseOutcome {
    /// Validates and canonicalizes `entries`.
    pub fn new(dim: usize, mut entries: Vec<(usize, f64)>, direction: Direction) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidOutcome("dimension must be positive".into()));
        }
        for &(i, v) in &entries {
            if i >= dim {
                return Err(Error::InvalidOutcome(format!(
                    "index {i} out of range for dimension {dim}"
                )));
            }
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidOutcome(format!(
                    "value {v} at index {i} outside [0, 1]"
                )));
            }
        }
        entries.sort_unstable_by_key(|&(i, _)| i);
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidOutcome(format!("duplicate index {}", w[0].0)));
        }
        entries.retain(|&(_, v)| v > 0.0);
        Ok(SparseOutcome {
            dim,
            entries,
            direction,
        })
    }

    pub fn zero(dim: usize, direction: Direction) -> Result<Self> {
        SparseOutcome::new(dim, Vec::new(), direction)
    }

    pub fn from_dense(values: &[f64], direction: Direction) -> Result<Self> {
        let entries = values.iter().copied().enumerate().collect();
        SparseOutcome::new(values.len(), entries, direction)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Nonzero entries, sorted by index.
    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    /// Number of strictly positive components.
    pub fn sparsity(&self) -> usize {
        self.entries.len()
    }

    pub fn value(&self, index: usize) -> f64 {
        match self.entries.binary_search_by_key(&index, |&(i, _)| i) {
            Ok(k) => self.entries[k].1,
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }

    /// `<ω, x>`.
    pub fn dot(&self, x: &SimplexDistribution) -> Result<f64> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.dim(),
            });
        }
        let w = x.weights();
        Ok(self.entries.iter().map(|&(i, v)| v * w[i]).sum())
    }

    /// The dense vector `1 - ω` with the opposite direction.
    pub fn complement(&self) -> SparseOutcome {
        let dense: Vec<f64> = self.to_dense().into_iter().map(|v| 1.0 - v).collect();
        SparseOutcome::from_dense(&dense, self.direction.flipped())
            .expect("complement of a valid outcome is valid")
    }

    /// Relabels arms: component `i` moves to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<SparseOutcome> {
        if perm.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: perm.len(),
            });
        }
        let entries = self.entries.iter().map(|&(i, v)| (perm[i], v)).collect();
        SparseOutcome::new(self.dim, entries, self.direction)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_vector_has_no_support() {
        let o = SparseOutcome::zero(5, Direction::Loss).unwrap();
        assert_eq!(o.sparsity(), 0);
        assert_eq!(o.to_dense(), vec![0.0; 5]);
    }

    #[test]
    fn sparsity_counts_entries() {
        let o = SparseOutcome::new(5, vec![(4, 1.0), (0, 0.3)], Direction::Gain).unwrap();
        assert_eq!(o.sparsity(), 2);
        assert_eq!(o.entries(), &[(0, 0.3), (4, 1.0)]);
    }

    #[test]
    fn zero_valued_entries_are_dropped() {
        let o = SparseOutcome::new(3, vec![(0, 0.0), (1, 0.5)], Direction::Gain).unwrap();
        assert_eq!(o.sparsity(), 1);
        assert_eq!(o.value(0), 0.0);
        assert_eq!(o.value(1), 0.5);
    }

    #[test]
    fn rejects_invalid_entries() {
        assert!(SparseOutcome::new(3, vec![(3, 0.5)], Direction::Gain).is_err());
        assert!(SparseOutcome::new(3, vec![(0, 1.5)], Direction::Gain).is_err());
        assert!(SparseOutcome::new(3, vec![(0, -0.1)], Direction::Gain).is_err());
        assert!(SparseOutcome::new(3, vec![(0, f64::NAN)], Direction::Gain).is_err());
        assert!(SparseOutcome::new(3, vec![(1, 0.2), (1, 0.3)], Direction::Gain).is_err());
        assert!(SparseOutcome::new(0, vec![], Direction::Gain).is_err());
    }

    #[test]
    fn complement_flips_direction_and_densifies() {
        let g = SparseOutcome::new(3, vec![(1, 0.25)], Direction::Gain).unwrap();
        let l = g.complement();
        assert_eq!(l.direction(), Direction::Loss);
        assert_eq!(l.to_dense(), vec![1.0, 0.75, 1.0]);
    }

    #[test]
    fn json_rejects_non_canonical_garbage() {
        let ok: SparseOutcome =
            serde_json::from_str(r#"{"dim":3,"direction":"loss","entries":[[2,0.5],[0,0.0]]}"#)
                .unwrap();
        assert_eq!(ok.entries(), &[(2, 0.5)]);
        let bad = serde_json::from_str::<SparseOutcome>(
            r#"{"dim":3,"direction":"loss","entries":[[7,0.5]]}"#,
        );
        assert!(bad.is_err());
    }
}

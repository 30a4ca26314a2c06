//! Lagrangian cycles of `Gr(1, n)` obtained by lifting real loci of the
//! reduced space `M_{n-k}` through the level set `μ̃ = c`.
//!
//! The real locus of a descriptor with pairs `(i, j)` consists of bases with
//! `l₀` real, unpaired `s` real and `s_j = conj(s_i)` for each pair. It is the
//! fixed set of the involution "conjugate, then swap `z_i ↔ z_j` for every
//! pair", and its preimage in the level set is a Lagrangian of dimension
//! `2(n − 1)`.

mod chart;
mod verify;

pub use chart::{lift_cycle_sample, membership_residual, nonstandard_involution, sample_base_cycle, CycleChart, CycleSamplePoint};
pub use verify::{
    max_normalized_pairing, normalized_singular_values, tangent_frame, verify_lagrangian, FrameVariant, LagrangianReport,
    SampleOutcome, VerifyOptions, FRAME_STEP_RANGE,
};

use serde::{Deserialize, Serialize};

use crate::moment::MomentVector;
use crate::{Error, Result};

/// A cycle family: the torus rank `k`, the conjugate pairs among the marked
/// points, and the moment targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleDescriptor {
    n: usize,
    k: usize,
    pairs: Vec<(usize, usize)>,
    c: MomentVector,
}

impl CycleDescriptor {
    pub fn new(n: usize, k: usize, pairs: Vec<(usize, usize)>, c: MomentVector) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidDescriptor(msg));
        if n < 2 {
            return bad(format!("n must be at least 2, got {n}"));
        }
        if k + 1 > n {
            return bad(format!("k must lie in [0, n − 1], got k = {k}, n = {n}"));
        }
        if c.len() != k {
            return bad(format!("expected {k} moment targets, got {}", c.len()));
        }
        if !c.is_admissible_target() {
            return bad(format!("targets {:?} need c_i > 0 and Σ c_i < 1", c.values()));
        }
        let mut used = vec![false; k];
        let mut pairs = pairs;
        for pair in pairs.iter_mut() {
            if pair.0 > pair.1 {
                *pair = (pair.1, pair.0);
            }
            let (i, j) = *pair;
            if i == j || j >= k {
                return bad(format!("pair ({i}, {j}) must join two distinct indices below k = {k}"));
            }
            if used[i] || used[j] {
                return bad(format!("pair ({i}, {j}) overlaps another pair"));
            }
            used[i] = true;
            used[j] = true;
        }
        pairs.sort_unstable();
        if !pairs.is_empty() {
            let first = c.values()[0];
            if c.values().iter().any(|&x| (x - first).abs() > 1e-12) {
                return bad("conjugate pairs require all moment targets to be equal".into());
            }
        }
        Ok(Self { n, k, pairs, c })
    }

    /// Descriptor with the targets `c_i = 1/(2k)`.
    pub fn with_default_targets(n: usize, k: usize, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let c = MomentVector::target(vec![0.5 / k.max(1) as f64; k])?;
        Self::new(n, k, pairs, c)
    }

    /// Pairs `(0, 1), (2, 3), …` of length `m`.
    pub fn leading_pairs(m: usize) -> Vec<(usize, usize)> {
        (0..m).map(|p| (2 * p, 2 * p + 1)).collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn m(&self) -> usize {
        self.pairs.len()
    }

    pub fn c(&self) -> &MomentVector {
        &self.c
    }

    /// Partner of `j` if it belongs to a pair.
    pub fn partner(&self, j: usize) -> Option<usize> {
        self.pairs.iter().find_map(|&(a, b)| match j {
            _ if j == a => Some(b),
            _ if j == b => Some(a),
            _ => None,
        })
    }

    /// Real coordinates of the real Grassmannian of `l₀`: `2(n − k − 1)`.
    pub fn grassmann_dim(&self) -> usize {
        2 * (self.n - self.k - 1)
    }

    /// Real coordinates of the marked points: one per unpaired point and
    /// two per pair, `k` in total.
    pub fn marked_dim(&self) -> usize {
        (self.k - 2 * self.m()) + 2 * self.m()
    }

    pub fn base_dim(&self) -> usize {
        self.grassmann_dim() + self.marked_dim()
    }

    /// `2(n − 1)`, half the real dimension of `Gr(1, n)`.
    pub fn dimension(&self) -> usize {
        self.base_dim() + self.k
    }
}

/// A cycle type label `(k, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CycleType {
    pub k: usize,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeCensus {
    pub n: u64,
    pub types: Vec<CycleType>,
    pub total: u64,
    /// `n + ⌊n/2⌋·⌊(n−1)/2⌋`.
    pub formula: u64,
}

impl TypeCensus {
    pub fn matches_formula(&self) -> bool {
        self.total == self.formula
    }
}

/// `n + ⌊n/2⌋·⌊(n−1)/2⌋`.
pub fn census_formula(n: u64) -> u64 {
    n + (n / 2) * ((n - 1) / 2)
}

/// Enumerates the labels `(k, m)`, `0 ≤ k ≤ n − 1`, `0 ≤ m ≤ ⌊k/2⌋`.
pub fn count_types(n: u64) -> Result<TypeCensus> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("count_types needs n ≥ 2, got {n}")));
    }
    let types: Vec<CycleType> = (0..n as usize).flat_map(|k| (0..=k / 2).map(move |m| CycleType { k, m })).collect();
    Ok(TypeCensus { n, total: types.len() as u64, formula: census_formula(n), types })
}

#[cfg(test)]
mod tests;

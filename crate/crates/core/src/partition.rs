//! Block assignments and the balance constraint they are measured against.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, Weight};

/// Assignment of every node to one of `k` blocks, with cached block weights.
///
/// Block ids live in `[0, block_count)`. Blocks may be empty (a graph with
/// fewer nodes than blocks cannot fill all of them).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<u32>,
    block_weights: Vec<Weight>,
}

impl Partition {
    /// Builds a partition from explicit labels, validating them against `k`
    /// and computing block weights from the graph.
    pub fn from_assignment(g: &Graph, assignment: Vec<u32>, k: usize) -> Result<Partition> {
        if assignment.len() != g.node_count() {
            return Err(Error::LengthMismatch {
                file: "partition assignment".into(),
                expected: g.node_count(),
                found: assignment.len(),
            });
        }
        let mut block_weights = vec![0 as Weight; k];
        for (v, &b) in assignment.iter().enumerate() {
            if b as usize >= k {
                return Err(Error::NodeOutOfRange {
                    node: b as u64,
                    count: k,
                });
            }
            block_weights[b as usize] += g.node_weight(v as NodeId);
        }
        Ok(Partition {
            assignment,
            block_weights,
        })
    }

    /// All nodes in block 0.
    pub fn trivial(g: &Graph, k: usize) -> Partition {
        let mut block_weights = vec![0 as Weight; k.max(1)];
        block_weights[0] = g.total_node_weight();
        Partition {
            assignment: vec![0; g.node_count()],
            block_weights,
        }
    }

    pub(crate) fn from_parts_unchecked(
        assignment: Vec<u32>,
        block_weights: Vec<Weight>,
    ) -> Partition {
        Partition {
            assignment,
            block_weights,
        }
    }

    pub fn block_count(&self) -> usize {
        self.block_weights.len()
    }

    pub fn block_of(&self, v: NodeId) -> u32 {
        self.assignment[v as usize]
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    pub fn block_weights(&self) -> &[Weight] {
        &self.block_weights
    }

    pub fn block_weight(&self, b: u32) -> Weight {
        self.block_weights[b as usize]
    }

    pub fn max_block_weight(&self) -> Weight {
        self.block_weights.iter().copied().max().unwrap_or(0)
    }

    pub(crate) fn move_node(&mut self, g: &Graph, v: NodeId, to: u32) {
        let from = self.assignment[v as usize];
        let c = g.node_weight(v);
        self.block_weights[from as usize] -= c;
        self.block_weights[to as usize] += c;
        self.assignment[v as usize] = to;
    }

    /// Structural consistency check for tests.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.assignment.len() != g.node_count() {
            return Err(Error::LengthMismatch {
                file: "partition assignment".into(),
                expected: g.node_count(),
                found: self.assignment.len(),
            });
        }
        let mut weights = vec![0 as Weight; self.block_count()];
        for (v, &b) in self.assignment.iter().enumerate() {
            if b as usize >= self.block_count() {
                return Err(Error::NodeOutOfRange {
                    node: b as u64,
                    count: self.block_count(),
                });
            }
            weights[b as usize] += g.node_weight(v as NodeId);
        }
        if weights != self.block_weights {
            return Err(Error::InvalidParameter("stale block weights".into()));
        }
        Ok(())
    }
}

/// The balance constraint: `k` blocks, none heavier than
/// `(1 + epsilon) * ceil(total_weight / k)`.
#[derive(Debug, Clone, Serialize)]
pub struct BalanceSpec {
    pub k: usize,
    pub epsilon: f64,
    pub total_weight: Weight,
    /// `(1 + epsilon) * ceil(total_weight / k)`, kept as a real number;
    /// integer comparisons go through [`BalanceSpec::weight_cap`].
    pub max_block_weight: f64,
}

impl BalanceSpec {
    pub fn new(k: usize, epsilon: f64, total_weight: Weight) -> BalanceSpec {
        assert!(k >= 1, "block count must be positive");
        assert!(epsilon >= 0.0, "imbalance tolerance must be nonnegative");
        let perfect = div_ceil_weight(total_weight, k as Weight);
        BalanceSpec {
            k,
            epsilon,
            total_weight,
            max_block_weight: (1.0 + epsilon) * perfect as f64,
        }
    }

    /// Perfectly balanced block weight, `ceil(total / k)`.
    pub fn perfect_block_weight(&self) -> Weight {
        div_ceil_weight(self.total_weight, self.k as Weight)
    }

    /// Largest integer block weight the constraint admits.
    pub fn weight_cap(&self) -> Weight {
        // The nudge keeps mathematically integral products like 1.03 * 100
        // from truncating one short.
        (self.max_block_weight + 1e-9).floor() as Weight
    }

    pub fn is_feasible_weight(&self, block_weight: Weight) -> bool {
        block_weight <= self.weight_cap()
    }

    /// Ratio of the heaviest block to the perfectly balanced weight.
    pub fn imbalance_ratio(&self, max_block_weight: Weight) -> f64 {
        max_block_weight as f64 / self.perfect_block_weight() as f64
    }
}

fn div_ceil_weight(a: Weight, b: Weight) -> Weight {
    (a + b - 1) / b
}

//! Seeded random graph generators for benchmarks and tests.
//!
//! Both families draw every candidate node pair independently, but skip over
//! absent edges geometrically instead of flipping one coin per pair, so
//! generation runs in time proportional to the output (plus one geometric
//! draw per adjacency row). All graphs have unit node and edge weights.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::rng::{derive_seed, seeded_rng};

/// Generated graphs may not exceed this many expected edges unless the
/// caller raises the budget explicitly.
pub const DEFAULT_EDGE_BUDGET: u64 = 1 << 28;

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    /// Every pair {u, v} is an edge independently with probability `probability`.
    ErdosRenyi {
        nodes: usize,
        probability: f64,
        seed: u64,
    },
    /// Nodes are assigned to `blocks` ground-truth blocks as `id % blocks`;
    /// pairs inside a block are edges with probability `intra_probability`,
    /// pairs across blocks with `inter_probability`.
    PlantedPartition {
        nodes: usize,
        blocks: usize,
        intra_probability: f64,
        inter_probability: f64,
        seed: u64,
    },
}

impl GeneratorSpec {
    pub fn erdos_renyi(nodes: usize, probability: f64, seed: u64) -> Self {
        GeneratorSpec::ErdosRenyi {
            nodes,
            probability,
            seed,
        }
    }

    /// Erdos-Renyi spec whose edge probability is chosen so the expected
    /// edge count equals `target_edges`.
    pub fn erdos_renyi_with_edge_target(
        nodes: usize,
        target_edges: u64,
        seed: u64,
    ) -> Result<Self> {
        let pairs = pair_count(nodes);
        if pairs == 0.0 && target_edges > 0 {
            return Err(Error::InvalidParameter(
                "target edge count positive but the graph has no node pairs".into(),
            ));
        }
        let probability = if target_edges == 0 {
            0.0
        } else {
            target_edges as f64 / pairs
        };
        if probability > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "target edge count {target_edges} exceeds the {pairs:.0} available pairs"
            )));
        }
        Ok(GeneratorSpec::ErdosRenyi {
            nodes,
            probability,
            seed,
        })
    }

    pub fn planted_partition(
        nodes: usize,
        blocks: usize,
        intra_probability: f64,
        inter_probability: f64,
        seed: u64,
    ) -> Self {
        GeneratorSpec::PlantedPartition {
            nodes,
            blocks,
            intra_probability,
            inter_probability,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check_p = |p: f64| {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                Err(Error::InvalidProbability { value: p })
            } else {
                Ok(())
            }
        };
        match *self {
            GeneratorSpec::ErdosRenyi { probability, .. } => check_p(probability),
            GeneratorSpec::PlantedPartition {
                blocks,
                intra_probability,
                inter_probability,
                ..
            } => {
                check_p(intra_probability)?;
                check_p(inter_probability)?;
                if blocks == 0 {
                    return Err(Error::InvalidParameter(
                        "block count must be positive".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Expected number of edges under this spec.
    pub fn expected_edges(&self) -> f64 {
        match *self {
            GeneratorSpec::ErdosRenyi {
                nodes, probability, ..
            } => pair_count(nodes) * probability,
            GeneratorSpec::PlantedPartition {
                nodes,
                blocks,
                intra_probability,
                inter_probability,
                ..
            } => {
                let intra_pairs = intra_pair_count(nodes, blocks);
                let inter_pairs = pair_count(nodes) - intra_pairs;
                intra_pairs * intra_probability + inter_pairs * inter_probability
            }
        }
    }

    /// Ground-truth block of every node for the planted family.
    pub fn ground_truth(&self) -> Option<Vec<u32>> {
        match *self {
            GeneratorSpec::ErdosRenyi { .. } => None,
            GeneratorSpec::PlantedPartition { nodes, blocks, .. } => {
                Some((0..nodes).map(|v| (v % blocks) as u32).collect())
            }
        }
    }
}

fn pair_count(n: usize) -> f64 {
    let n = n as f64;
    n * (n - 1.0) / 2.0
}

fn intra_pair_count(n: usize, blocks: usize) -> f64 {
    let mut total = 0.0;
    for g in 0..blocks.min(n) {
        let members = (n - g).div_ceil(blocks) as f64;
        total += members * (members - 1.0) / 2.0;
    }
    total
}

pub fn generate(spec: &GeneratorSpec) -> Result<Graph> {
    generate_with_budget(spec, DEFAULT_EDGE_BUDGET)
}

pub fn generate_with_budget(spec: &GeneratorSpec, budget: u64) -> Result<Graph> {
    spec.validate()?;
    let expected = spec.expected_edges();
    if expected > budget as f64 {
        return Err(Error::EdgeBudgetExceeded { expected, budget });
    }
    match *spec {
        GeneratorSpec::ErdosRenyi {
            nodes,
            probability,
            seed,
        } => {
            let mut edges = Vec::with_capacity((expected * 1.05) as usize + 16);
            let mut rng = seeded_rng(derive_seed(seed, 0));
            for u in 0..nodes {
                let row = nodes - u - 1; // candidates v in u+1..nodes
                sample_row(&mut rng, probability, row, |j| {
                    edges.push((u as NodeId, (u + 1 + j) as NodeId, 1));
                });
            }
            Graph::build(nodes, &edges, None)
        }
        GeneratorSpec::PlantedPartition {
            nodes,
            blocks,
            intra_probability,
            inter_probability,
            seed,
        } => {
            let mut edges = Vec::with_capacity((expected * 1.05) as usize + 16);
            // Pass 1: cross-block pairs. Sweep the full pair space at the
            // inter probability and keep only pairs whose endpoints differ
            // in ground-truth block; same-block hits are discarded, which
            // leaves every cross pair present independently with the inter
            // probability.
            let mut rng = seeded_rng(derive_seed(seed, 1));
            for u in 0..nodes {
                let row = nodes - u - 1;
                sample_row(&mut rng, inter_probability, row, |j| {
                    let v = u + 1 + j;
                    if u % blocks != v % blocks {
                        edges.push((u as NodeId, v as NodeId, 1));
                    }
                });
            }
            // Pass 2: same-block pairs, per ground-truth block.
            let mut rng = seeded_rng(derive_seed(seed, 2));
            for g in 0..blocks.min(nodes) {
                let members: Vec<usize> = (g..nodes).step_by(blocks).collect();
                for i in 0..members.len() {
                    let row = members.len() - i - 1;
                    sample_row(&mut rng, intra_probability, row, |j| {
                        edges.push((members[i] as NodeId, members[i + 1 + j] as NodeId, 1));
                    });
                }
            }
            Graph::build(nodes, &edges, None)
        }
    }
}

/// Calls `emit(j)` for each j in `0..row_len` independently with probability
/// `p`, skipping over the gaps with geometric jumps.
fn sample_row(rng: &mut ChaCha8Rng, p: f64, row_len: usize, mut emit: impl FnMut(usize)) {
    if p <= 0.0 || row_len == 0 {
        return;
    }
    if p >= 1.0 {
        for j in 0..row_len {
            emit(j);
        }
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut j = 0usize;
    loop {
        // Geometric number of misses before the next hit:
        // P(skip = k) = (1 - p)^k * p.
        let u: f64 = rng.gen::<f64>();
        let skip = ((1.0 - u).ln() / log_q).floor();
        if !skip.is_finite() || skip >= (row_len - j) as f64 {
            return;
        }
        j += skip as usize;
        emit(j);
        j += 1;
        if j >= row_len {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_probability_gives_empty_graph() {
        let g = generate(&GeneratorSpec::erdos_renyi(100, 0.0, 1)).unwrap();
        assert_eq!(g.node_count(), 100);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn unit_probability_gives_complete_graph() {
        let g = generate(&GeneratorSpec::erdos_renyi(40, 1.0, 1)).unwrap();
        assert_eq!(g.edge_count(), 40 * 39 / 2);
        g.validate().unwrap();
    }

    #[test]
    fn generation_is_seed_deterministic() {
        let spec = GeneratorSpec::erdos_renyi(500, 0.01, 77);
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a, b);
        let c = generate(&GeneratorSpec::erdos_renyi(500, 0.01, 78)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn erdos_renyi_edge_count_matches_binomial_moments() {
        // Mean of 50 samples of Binomial(C(n,2), p). The sample mean must
        // land within 3 standard errors of the expectation.
        let n = 10_000usize;
        let p = 0.001f64;
        let pairs = pair_count(n);
        let expect = pairs * p;
        let sigma = (pairs * p * (1.0 - p)).sqrt();
        let seeds = 50;
        let mut total = 0.0f64;
        for seed in 0..seeds {
            let g = generate(&GeneratorSpec::erdos_renyi(n, p, seed)).unwrap();
            total += g.edge_count() as f64;
        }
        let mean = total / seeds as f64;
        let tolerance = 3.0 * sigma / (seeds as f64).sqrt();
        assert!(
            (mean - expect).abs() <= tolerance,
            "mean {mean} vs expected {expect} (tolerance {tolerance})"
        );
    }

    #[test]
    fn edge_target_spec_hits_expected_count() {
        let spec = GeneratorSpec::erdos_renyi_with_edge_target(2000, 5000, 3).unwrap();
        assert!((spec.expected_edges() - 5000.0).abs() < 1e-6);
        let g = generate(&spec).unwrap();
        // Allow 4 sigma of slack for a single sample.
        let sigma = 5000f64.sqrt();
        assert!((g.edge_count() as f64 - 5000.0).abs() < 4.0 * sigma);
    }

    #[test]
    fn planted_partition_respects_block_probabilities() {
        let spec = GeneratorSpec::planted_partition(400, 4, 0.2, 0.01, 5);
        let truth = spec.ground_truth().unwrap();
        let g = generate(&spec).unwrap();
        g.validate().unwrap();
        let mut intra = 0usize;
        let mut inter = 0usize;
        for (_, u, v, _) in g.edges() {
            if truth[u as usize] == truth[v as usize] {
                intra += 1;
            } else {
                inter += 1;
            }
        }
        let intra_pairs = intra_pair_count(400, 4);
        let inter_pairs = pair_count(400) - intra_pairs;
        let intra_expect = intra_pairs * 0.2;
        let inter_expect = inter_pairs * 0.01;
        let intra_sigma = (intra_pairs * 0.2 * 0.8).sqrt();
        let inter_sigma = (inter_pairs * 0.01 * 0.99).sqrt();
        assert!((intra as f64 - intra_expect).abs() < 4.0 * intra_sigma);
        assert!((inter as f64 - inter_expect).abs() < 4.0 * inter_sigma);
    }

    #[test]
    fn ground_truth_is_id_mod_blocks() {
        let spec = GeneratorSpec::planted_partition(10, 3, 0.5, 0.1, 1);
        assert_eq!(
            spec.ground_truth().unwrap(),
            vec![0, 1, 2, 0, 1, 2, 0, 1, 2, 0]
        );
    }

    #[test]
    fn budget_is_enforced() {
        let spec = GeneratorSpec::erdos_renyi(100_000, 0.5, 1);
        let err = generate(&spec).unwrap_err();
        assert!(matches!(err, Error::EdgeBudgetExceeded { .. }));
    }

    #[test]
    fn invalid_probability_rejected() {
        assert!(generate(&GeneratorSpec::erdos_renyi(10, 1.5, 1)).is_err());
        assert!(generate(&GeneratorSpec::erdos_renyi(10, -0.1, 1)).is_err());
        assert!(generate(&GeneratorSpec::planted_partition(10, 0, 0.5, 0.1, 1)).is_err());
    }
}

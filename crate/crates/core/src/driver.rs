//! The multilevel pipeline: coarsen with optional edge sampling, partition
//! the coarsest graph, then project and refine back up.
//!
//! The weight limit for clusters is fixed once from the input graph as
//! `U = c(V) / (target_factor * k)` (contraction conserves total node
//! weight, so the value stays right on every level). Coarsening stops when
//! the node count falls to `target_factor * k` or the shrink factor decays
//! below `min_shrink`; the per-step shrink cap keeps the node reduction
//! geometric rather than collapsing, which bounds total work by a geometric
//! series over levels.

use std::time::Instant;

use serde::Serialize;

use crate::analysis;
use crate::clustering::{coarsening_clustering, ClusteringParams};
use crate::contraction::contract;
use crate::error::{Error, Result};
use crate::graph::{Graph, Weight};
use crate::initial::recursive_bipartition;
use crate::partition::{BalanceSpec, Partition};
use crate::refinement::{lp_refine, project};
use crate::rng::derive_seed;
use crate::sparsification::{sparsify_if_beneficial, SparsifyConfig, SparsifyStats};

/// All knobs of the partitioner. `Default` mirrors the command-line
/// defaults (including weighted threshold sampling).
#[derive(Debug, Clone, Serialize)]
pub struct PartitionerConfig {
    pub k: usize,
    /// Allowed relative block overweight; the cap is
    /// `(1 + epsilon) * ceil(c(V) / k)`.
    pub epsilon: f64,
    /// Edge sampling setup. Its `seed` field is ignored here: the driver
    /// salts `seed` below into every level's sampling.
    pub sparsify: SparsifyConfig,
    /// Label propagation rounds per coarsening step.
    pub cluster_rounds: usize,
    /// Refinement rounds per uncoarsening step.
    pub refine_rounds: usize,
    /// Coarsening aims at `target_factor * k` nodes; the cluster weight
    /// limit is derived from it.
    pub coarsening_target_factor: usize,
    /// Twice the target factor: above this node count the clustering
    /// guarantees a fixed geometric shrink (tests pin behavior to it).
    pub coarsest_stop_factor: usize,
    /// Largest allowed per-step node reduction.
    pub shrink_cap: f64,
    /// Coarsening stops once a step shrinks by less than this factor.
    pub min_shrink: f64,
    pub seed: u64,
}

impl Default for PartitionerConfig {
    fn default() -> PartitionerConfig {
        PartitionerConfig {
            k: 2,
            epsilon: 0.03,
            sparsify: SparsifyConfig::with_method(
                crate::sparsification::Sparsifier::ThresholdWeight,
            ),
            cluster_rounds: 5,
            refine_rounds: 5,
            coarsening_target_factor: 160,
            coarsest_stop_factor: 320,
            shrink_cap: 2.5,
            min_shrink: 1.05,
            seed: 1,
        }
    }
}

impl PartitionerConfig {
    pub fn new(k: usize) -> PartitionerConfig {
        PartitionerConfig {
            k,
            ..PartitionerConfig::default()
        }
    }

    // Negated float comparisons are deliberate: a NaN parameter must fail.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be finite and non-negative, got {}",
                self.epsilon
            )));
        }
        if self.cluster_rounds < 1 || self.refine_rounds < 1 {
            return Err(Error::InvalidParameter(
                "round counts must be at least 1".into(),
            ));
        }
        if self.coarsening_target_factor < 1 {
            return Err(Error::InvalidParameter(
                "coarsening target factor must be at least 1".into(),
            ));
        }
        if !(self.shrink_cap > 1.0) {
            return Err(Error::InvalidParameter("shrink cap must exceed 1".into()));
        }
        if !(self.min_shrink > 1.0) {
            return Err(Error::InvalidParameter("min shrink must exceed 1".into()));
        }
        if self.sparsify.method != crate::sparsification::Sparsifier::None {
            self.sparsify.validate()?;
        }
        Ok(())
    }

    fn threshold(&self) -> usize {
        self.coarsening_target_factor * self.k
    }

    fn cluster_weight_limit(&self, total_weight: Weight) -> Weight {
        (total_weight / self.threshold() as Weight).max(1)
    }
}

/// One coarsening level.
#[derive(Debug, Clone)]
pub struct Level {
    pub graph: Graph,
    /// Mapping from the previous (finer) level's nodes to this level's;
    /// `None` on the input level.
    pub fine_to_coarse: Option<Vec<u32>>,
    pub sparsified: bool,
    /// Edge count before sampling; equals the graph's when not sampled.
    pub pre_sparsify_edges: usize,
    /// The unsampled contraction, kept so projection exactness stays
    /// checkable against the full coarse cut. `None` when not sampled.
    pub unsparsified: Option<Graph>,
    pub sparsify: Option<SparsifyStats>,
}

/// Coarsening hierarchy; `levels[0]` is the input graph.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    pub levels: Vec<Level>,
}

impl Hierarchy {
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn coarsest(&self) -> &Level {
        self.levels.last().expect("hierarchy is never empty")
    }

    /// Total size footprint, the linear-work witness.
    pub fn total_size(&self) -> usize {
        self.levels
            .iter()
            .map(|l| l.graph.node_count() + l.graph.edge_count())
            .sum()
    }
}

/// Builds the coarsening hierarchy (without partitioning anything).
pub fn build_hierarchy(g: &Graph, cfg: &PartitionerConfig) -> Result<Hierarchy> {
    cfg.validate()?;
    let (h, _, _) = build_hierarchy_timed(g, cfg)?;
    Ok(h)
}

fn build_hierarchy_timed(g: &Graph, cfg: &PartitionerConfig) -> Result<(Hierarchy, f64, f64)> {
    let mut coarsen_s = 0.0f64;
    let mut sparsify_s = 0.0f64;
    let u_limit = cfg.cluster_weight_limit(g.total_node_weight());
    let mut levels = vec![Level {
        graph: g.clone(),
        fine_to_coarse: None,
        sparsified: false,
        pre_sparsify_edges: g.edge_count(),
        unsparsified: None,
        sparsify: None,
    }];
    let mut last_shrink = f64::INFINITY;

    while levels.last().unwrap().graph.node_count() > cfg.threshold()
        && last_shrink >= cfg.min_shrink
    {
        let index = levels.len() as u64;
        let level = {
            let fine = &levels.last().unwrap().graph;
            let fine_nodes = fine.node_count();
            let fine_edges = fine.edge_count();

            let t = Instant::now();
            let params = ClusteringParams {
                max_cluster_weight: u_limit,
                max_rounds: cfg.cluster_rounds,
                shrink_cap: Some(cfg.shrink_cap),
                seed: derive_seed(derive_seed(cfg.seed, 1), index),
            };
            let clustering = coarsening_clustering(fine, &params);
            let contraction = contract(fine, &clustering);
            coarsen_s += t.elapsed().as_secs_f64();

            let t = Instant::now();
            let sp_cfg = SparsifyConfig {
                seed: derive_seed(derive_seed(cfg.seed, 2), index),
                ..cfg.sparsify.clone()
            };
            let sampled =
                sparsify_if_beneficial(&contraction.coarse, fine_edges, fine_nodes, &sp_cfg)?;
            sparsify_s += t.elapsed().as_secs_f64();

            last_shrink = fine_nodes as f64 / contraction.coarse.node_count() as f64;
            match sampled {
                Some((sampled_graph, stats)) => Level {
                    graph: sampled_graph,
                    fine_to_coarse: Some(contraction.fine_to_coarse),
                    sparsified: true,
                    pre_sparsify_edges: contraction.coarse.edge_count(),
                    unsparsified: Some(contraction.coarse),
                    sparsify: Some(stats),
                },
                None => {
                    let coarse_edges = contraction.coarse.edge_count();
                    Level {
                        graph: contraction.coarse,
                        fine_to_coarse: Some(contraction.fine_to_coarse),
                        sparsified: false,
                        pre_sparsify_edges: coarse_edges,
                        unsparsified: None,
                        sparsify: None,
                    }
                }
            }
        };
        levels.push(level);
    }
    Ok((Hierarchy { levels }, coarsen_s, sparsify_s))
}

/// Per-level size record in [`RunStats`].
#[derive(Debug, Clone, Serialize)]
pub struct LevelStats {
    pub nodes: usize,
    pub edges: usize,
    pub sparsified: bool,
    pub pre_sparsify_edges: usize,
    pub sparsify_target: Option<usize>,
    /// Standard deviation of the sampler's kept-edge count, when sampled.
    pub sparsify_kept_std: Option<f64>,
}

/// Wall-clock seconds per phase.
#[derive(Debug, Clone, Serialize)]
pub struct PhaseTimings {
    pub coarsening_seconds: f64,
    pub sparsification_seconds: f64,
    pub initial_seconds: f64,
    pub refinement_seconds: f64,
    pub total_seconds: f64,
}

/// Everything a run reports besides the partition itself. Serializes to a
/// single JSON document. `timings` is the only non-deterministic part;
/// strip it (set to `None`) where byte-stable output matters.
#[derive(Debug, Clone, Serialize)]
pub struct RunStats {
    pub config: PartitionerConfig,
    pub levels: Vec<LevelStats>,
    pub cut: Weight,
    pub max_block_weight: Weight,
    pub imbalance: f64,
    pub feasible: bool,
    pub timings: Option<PhaseTimings>,
}

/// Partitions `g` into `cfg.k` blocks.
///
/// An infeasible balance (forced by heavy nodes, never by negligence) is
/// reported through `feasible = false` rather than an error; the partition
/// is still returned.
pub fn partition(g: &Graph, cfg: &PartitionerConfig) -> Result<(Partition, RunStats)> {
    cfg.validate()?;
    let t_total = Instant::now();
    let (hierarchy, coarsening_seconds, sparsification_seconds) = build_hierarchy_timed(g, cfg)?;

    let spec = BalanceSpec::new(cfg.k, cfg.epsilon, g.total_node_weight());
    let t = Instant::now();
    let mut p = recursive_bipartition(
        &hierarchy.coarsest().graph,
        &spec,
        cfg.refine_rounds,
        derive_seed(cfg.seed, 4),
    );
    let initial_seconds = t.elapsed().as_secs_f64();

    let t = Instant::now();
    for fine_index in (0..hierarchy.levels.len().saturating_sub(1)).rev() {
        let coarse_level = &hierarchy.levels[fine_index + 1];
        let fine_graph = &hierarchy.levels[fine_index].graph;
        let map = coarse_level
            .fine_to_coarse
            .as_ref()
            .expect("non-input levels carry their mapping");

        // Projection is exact against the full contraction: same cut, same
        // block weights. (The stored graph may be sampled; the cut
        // reference is the unsampled one.)
        #[cfg(debug_assertions)]
        let coarse_cut = analysis::cut(
            coarse_level
                .unsparsified
                .as_ref()
                .unwrap_or(&coarse_level.graph),
            &p,
        );
        #[cfg(debug_assertions)]
        let coarse_weights = p.block_weights().to_vec();

        p = project(fine_graph, map, &p)?;

        #[cfg(debug_assertions)]
        {
            debug_assert_eq!(analysis::cut(fine_graph, &p), coarse_cut);
            debug_assert_eq!(p.block_weights(), &coarse_weights[..]);
        }

        #[cfg(debug_assertions)]
        let before = analysis::cut(fine_graph, &p);
        lp_refine(
            fine_graph,
            &mut p,
            &spec,
            cfg.refine_rounds,
            derive_seed(derive_seed(cfg.seed, 3), fine_index as u64),
        );
        #[cfg(debug_assertions)]
        debug_assert!(analysis::cut(fine_graph, &p) <= before);
    }
    let refinement_seconds = t.elapsed().as_secs_f64();

    let cut = analysis::cut(g, &p);
    let max_block_weight = p.max_block_weight();
    let stats = RunStats {
        config: cfg.clone(),
        levels: hierarchy
            .levels
            .iter()
            .map(|l| LevelStats {
                nodes: l.graph.node_count(),
                edges: l.graph.edge_count(),
                sparsified: l.sparsified,
                pre_sparsify_edges: l.pre_sparsify_edges,
                sparsify_target: l.sparsify.as_ref().map(|s| s.target),
                sparsify_kept_std: l.sparsify.as_ref().map(|s| s.expected_kept_std),
            })
            .collect(),
        cut,
        max_block_weight,
        imbalance: spec.imbalance_ratio(max_block_weight),
        feasible: max_block_weight <= spec.weight_cap(),
        timings: Some(PhaseTimings {
            coarsening_seconds,
            sparsification_seconds,
            initial_seconds,
            refinement_seconds,
            total_seconds: t_total.elapsed().as_secs_f64(),
        }),
    };
    Ok((p, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GeneratorSpec};
    use crate::graph::NodeId;
    use crate::sparsification::Sparsifier;

    /// Two disjoint cliques of `size` nodes each.
    fn two_cliques(size: usize) -> Graph {
        let mut edges = Vec::new();
        for base in [0, size] {
            for i in 0..size {
                for j in (i + 1)..size {
                    edges.push(((base + i) as NodeId, (base + j) as NodeId, 1));
                }
            }
        }
        Graph::build(2 * size, &edges, None).unwrap()
    }

    fn path(n: usize) -> Graph {
        let edges: Vec<(NodeId, NodeId, Weight)> = (0..n - 1)
            .map(|v| (v as NodeId, v as NodeId + 1, 1))
            .collect();
        Graph::build(n, &edges, None).unwrap()
    }

    #[test]
    fn small_graph_yields_single_level() {
        let g = generate(&GeneratorSpec::erdos_renyi(100, 0.05, 1)).unwrap();
        let h = build_hierarchy(&g, &PartitionerConfig::new(2)).unwrap();
        assert_eq!(h.level_count(), 1);
        assert_eq!(h.levels[0].graph, g);
    }

    #[test]
    fn two_cliques_split_with_zero_cut() {
        let g = two_cliques(8);
        let (p, stats) = partition(&g, &PartitionerConfig::new(2)).unwrap();
        assert_eq!(stats.cut, 0);
        assert_eq!(analysis::cut(&g, &p), 0);
        assert!(stats.feasible);
        assert!((stats.imbalance - 1.0).abs() < 1e-12);
        assert_eq!(p.block_weights(), &[8, 8]);
    }

    #[test]
    fn single_block_is_trivially_feasible() {
        let g = generate(&GeneratorSpec::erdos_renyi(500, 0.01, 2)).unwrap();
        let (p, stats) = partition(&g, &PartitionerConfig::new(1)).unwrap();
        assert_eq!(stats.cut, 0);
        assert!(stats.feasible);
        assert_eq!(p.block_count(), 1);
    }

    #[test]
    fn end_to_end_deterministic() {
        let g = generate(&GeneratorSpec::erdos_renyi(2000, 0.004, 3)).unwrap();
        let cfg = PartitionerConfig {
            k: 4,
            seed: 9,
            ..PartitionerConfig::default()
        };
        let (p1, mut s1) = partition(&g, &cfg).unwrap();
        let (p2, mut s2) = partition(&g, &cfg).unwrap();
        assert_eq!(p1.assignment(), p2.assignment());
        s1.timings = None;
        s2.timings = None;
        assert_eq!(
            serde_json::to_string(&s1).unwrap(),
            serde_json::to_string(&s2).unwrap()
        );
    }

    #[test]
    fn hierarchy_shrinks_within_bounds() {
        // 4000 nodes, k=2: threshold 320, so several levels form. Each step
        // shrinks by at most the cap (2.5) and, while above twice the
        // threshold, at least geometrically per the clustering guarantee.
        let g = generate(&GeneratorSpec::erdos_renyi(4000, 0.0015, 4)).unwrap();
        let cfg = PartitionerConfig::new(2);
        let h = build_hierarchy(&g, &cfg).unwrap();
        assert!(h.level_count() > 1);
        for w in h.levels.windows(2) {
            let n_fine = w[0].graph.node_count();
            let n_coarse = w[1].graph.node_count();
            assert!(n_coarse < n_fine);
            assert!(
                n_coarse as f64 >= n_fine as f64 / cfg.shrink_cap - 1.0,
                "step shrank too fast: {n_fine} -> {n_coarse}"
            );
            if n_fine > cfg.coarsest_stop_factor * cfg.k {
                let bound = 0.51 * n_fine as f64 + (cfg.coarsening_target_factor * cfg.k) as f64;
                assert!(
                    (n_coarse as f64) <= bound,
                    "geometric regime violated: {n_fine} -> {n_coarse} (bound {bound})"
                );
            }
            w[1].graph.validate().unwrap();
        }
    }

    #[test]
    fn paths_never_trigger_sampling() {
        // Contraction alone halves a path's edges; the density target is
        // never exceeded.
        let g = path(100_000);
        let h = build_hierarchy(&g, &PartitionerConfig::new(2)).unwrap();
        assert!(h.level_count() > 1);
        assert!(h.levels.iter().all(|l| !l.sparsified));
        assert!(h.levels.iter().all(|l| l.unsparsified.is_none()));
    }

    /// `groups` triangles glued by weight-100 edges plus `extra` weight-1
    /// edges between distinct group pairs. Clustering contracts each
    /// triangle to one node while every inter-group edge survives (distinct
    /// pairs cannot merge), so the coarse graph keeps ~`extra` edges — far
    /// above its density budget of half the input degree.
    fn clustered_dense(groups: usize, extra: usize, seed: u64) -> Graph {
        use rand::Rng;
        let mut edges = Vec::new();
        for i in 0..groups as NodeId {
            let b = 3 * i;
            edges.push((b, b + 1, 100));
            edges.push((b + 1, b + 2, 100));
            edges.push((b, b + 2, 100));
        }
        let mut rng = crate::rng::seeded_rng(seed);
        let mut seen = std::collections::HashSet::new();
        while seen.len() < extra {
            let a = rng.gen_range(0..groups);
            let b = rng.gen_range(0..groups);
            if a == b {
                continue;
            }
            if seen.insert((a.min(b), a.max(b))) {
                edges.push((3 * a.min(b) as NodeId, 3 * a.max(b) as NodeId + 1, 1));
            }
        }
        Graph::build(3 * groups, &edges, None).unwrap()
    }

    #[test]
    fn dense_graph_triggers_sampling() {
        let g = clustered_dense(1000, 45_000, 5);
        let cfg = PartitionerConfig::new(2);
        let h = build_hierarchy(&g, &cfg).unwrap();
        let sampled: Vec<&Level> = h.levels.iter().filter(|l| l.sparsified).collect();
        assert!(!sampled.is_empty(), "expected at least one sampled level");
        for l in &sampled {
            assert!(l.graph.edge_count() <= l.pre_sparsify_edges);
            let stats = l.sparsify.as_ref().unwrap();
            assert_eq!(stats.kept, l.graph.edge_count());
            assert!(stats.target > 0);
            let full = l.unsparsified.as_ref().unwrap();
            assert_eq!(full.edge_count(), l.pre_sparsify_edges);
        }
        // The run completes and reports the sampling in its stats.
        let (_, stats) = partition(&g, &cfg).unwrap();
        assert!(stats.levels.iter().any(|l| l.sparsified));
        let s = stats.levels.iter().find(|l| l.sparsified).unwrap();
        assert!(s.sparsify_target.is_some() && s.sparsify_kept_std.is_some());
    }

    #[test]
    fn forced_imbalance_is_flagged_not_fatal() {
        // One node heavier than any feasible block: the run completes with
        // feasible = false.
        let mut weights = vec![1 as Weight; 50];
        weights[0] = 100;
        let edges: Vec<(NodeId, NodeId, Weight)> =
            (0..49).map(|v| (v as NodeId, v as NodeId + 1, 1)).collect();
        let g = Graph::build(50, &edges, Some(weights)).unwrap();
        let (p, stats) = partition(&g, &PartitionerConfig::new(2)).unwrap();
        assert!(!stats.feasible);
        assert!(stats.max_block_weight >= 100);
        p.validate(&g).unwrap();
    }

    #[test]
    fn hierarchy_size_is_linear_in_input() {
        for (spec, k) in [
            (GeneratorSpec::erdos_renyi(5000, 0.002, 6), 2usize),
            (
                GeneratorSpec::planted_partition(4096, 4, 0.01, 0.0005, 7),
                4,
            ),
        ] {
            let g = generate(&spec).unwrap();
            let cfg = PartitionerConfig::new(k);
            let h = build_hierarchy(&g, &cfg).unwrap();
            let input = g.node_count() + g.edge_count();
            assert!(
                h.total_size() <= 8 * input,
                "hierarchy footprint {} above 8x input {input}",
                h.total_size()
            );
        }
    }

    #[test]
    fn run_stats_serialize_to_json() {
        let g = two_cliques(8);
        let (_, stats) = partition(&g, &PartitionerConfig::new(2)).unwrap();
        let json = serde_json::to_string_pretty(&stats).unwrap();
        assert!(json.contains("\"cut\""));
        assert!(json.contains("\"levels\""));
        assert!(json.contains("\"feasible\""));
    }

    #[test]
    fn invalid_config_rejected() {
        let g = two_cliques(4);
        assert!(partition(&g, &PartitionerConfig::new(0)).is_err());
        let bad = PartitionerConfig {
            epsilon: f64::NAN,
            ..PartitionerConfig::new(2)
        };
        assert!(partition(&g, &bad).is_err());
        let bad_sparsify = PartitionerConfig {
            sparsify: SparsifyConfig {
                method: Sparsifier::Uniform,
                edge_fraction: 0.0,
                ..SparsifyConfig::default()
            },
            ..PartitionerConfig::new(2)
        };
        assert!(partition(&g, &bad_sparsify).is_err());
    }
}

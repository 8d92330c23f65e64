//! Edge sampling between coarsening steps.
//!
//! Contraction shrinks nodes geometrically, but edge counts can stall on
//! dense instances. When a contracted graph keeps too many edges relative to
//! a density-derived target, a sampler thins it before the next step:
//!
//! * `uniform`: keep every edge independently with probability `target / m`.
//! * `t-weight`: keep the `target` heaviest edges (ties randomized).
//! * `t-ff` / `t-wff`: keep the `target` edges most burnt by repeated
//!   forest-fire traversals, unweighted or weight-biased.
//!
//! Threshold methods select the cutoff score with an order-statistics pass;
//! edges strictly above it always survive, edges strictly below never do,
//! and ties survive independently with the probability that makes the
//! expected kept count exactly the target.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, Weight};
use crate::rng::{derive_seed, edge_coin, seeded_rng};

/// Edge sampling strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sparsifier {
    #[serde(rename = "none")]
    None,
    #[serde(rename = "uniform")]
    Uniform,
    #[serde(rename = "t-weight")]
    ThresholdWeight,
    #[serde(rename = "t-ff")]
    ThresholdForestFire,
    #[serde(rename = "t-wff")]
    ThresholdWeightedForestFire,
}

impl fmt::Display for Sparsifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Sparsifier::None => "none",
            Sparsifier::Uniform => "uniform",
            Sparsifier::ThresholdWeight => "t-weight",
            Sparsifier::ThresholdForestFire => "t-ff",
            Sparsifier::ThresholdWeightedForestFire => "t-wff",
        };
        f.write_str(name)
    }
}

impl FromStr for Sparsifier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Sparsifier> {
        match s {
            "none" => Ok(Sparsifier::None),
            "uniform" => Ok(Sparsifier::Uniform),
            "t-weight" => Ok(Sparsifier::ThresholdWeight),
            "t-ff" => Ok(Sparsifier::ThresholdForestFire),
            "t-wff" => Ok(Sparsifier::ThresholdWeightedForestFire),
            other => Err(Error::InvalidParameter(format!(
                "unknown sparsifier {other:?} (expected none, uniform, t-weight, t-ff, t-wff)"
            ))),
        }
    }
}

/// Sampler parameters. The defaults mirror the partitioner defaults.
#[derive(Debug, Clone, Serialize)]
pub struct SparsifyConfig {
    pub method: Sparsifier,
    /// Target cap as a fraction of the pre-contraction edge count.
    pub edge_fraction: f64,
    /// Target cap as a fraction of pre-contraction density times the
    /// contracted node count.
    pub density_fraction: f64,
    /// Sampling triggers only when the contracted edge count exceeds
    /// `min_reduction` times the target, so near-misses are left alone.
    pub min_reduction: f64,
    /// Probability that a forest fire stops expanding a node after each
    /// burnt neighbor.
    pub fire_stop_probability: f64,
    /// Forest fires stop launching once total burns exceed this fraction of
    /// the edge count.
    pub burn_ratio: f64,
    pub seed: u64,
}

impl Default for SparsifyConfig {
    fn default() -> SparsifyConfig {
        SparsifyConfig {
            method: Sparsifier::None,
            edge_fraction: 0.5,
            density_fraction: 0.5,
            min_reduction: 4.0,
            fire_stop_probability: 0.6,
            burn_ratio: 0.5,
            seed: 1,
        }
    }
}

impl SparsifyConfig {
    pub fn with_method(method: Sparsifier) -> SparsifyConfig {
        SparsifyConfig {
            method,
            ..SparsifyConfig::default()
        }
    }

    // Negated float comparisons are deliberate: a NaN parameter must fail.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("edge_fraction", self.edge_fraction),
            ("density_fraction", self.density_fraction),
            ("fire_stop_probability", self.fire_stop_probability),
            ("burn_ratio", self.burn_ratio),
        ] {
            if !(value > 0.0 && value <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in (0, 1], got {value}"
                )));
            }
        }
        if !(self.min_reduction >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "min_reduction must be at least 1, got {}",
                self.min_reduction
            )));
        }
        Ok(())
    }
}

/// Edge budget for the next level, computed from the pre-contraction graph
/// (`fine_edges`, `fine_nodes`) and the contracted node count. The budget is
/// the smaller of an edge-fraction cap and a density cap that allots the
/// contracted graph the fine graph's average density, floored at one edge.
pub fn target_edge_count(
    fine_edges: usize,
    fine_nodes: usize,
    coarse_nodes: usize,
    cfg: &SparsifyConfig,
) -> usize {
    if fine_edges == 0 || fine_nodes == 0 {
        return 0;
    }
    let m = fine_edges as f64;
    let by_edges = cfg.edge_fraction * m;
    let by_density = cfg.density_fraction * (m / fine_nodes as f64) * coarse_nodes as f64;
    let target = by_edges.min(by_density).floor() as usize;
    target.max(1)
}

/// Whether the contracted edge count misses the target badly enough to pay
/// for a sampling pass (strict inequality).
pub fn should_sparsify(coarse_edges: usize, target: usize, cfg: &SparsifyConfig) -> bool {
    target > 0 && (coarse_edges as f64) > cfg.min_reduction * target as f64
}

/// Cutoff produced by [`threshold_select`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdSelection {
    /// Score of the `target`-th largest entry.
    pub threshold: f64,
    pub below: usize,
    pub equal: usize,
    pub above: usize,
    /// Survival probability for entries equal to the threshold; chosen so
    /// the expected kept count is exactly the target.
    pub keep_probability: f64,
}

impl ThresholdSelection {
    /// Standard deviation of the kept count (binomial over the ties).
    pub fn kept_std(&self) -> f64 {
        let p = self.keep_probability;
        (self.equal as f64 * p * (1.0 - p)).sqrt()
    }
}

/// Finds the `target`-th largest score and the counts around it.
///
/// Guarantees `above < target <= above + equal`, hence
/// `keep_probability` lies in `(0, 1]`.
pub fn threshold_select(scores: &[f64], target: usize) -> ThresholdSelection {
    assert!(target >= 1, "target must be positive");
    assert!(target <= scores.len(), "target exceeds entry count");
    let mut buf = scores.to_vec();
    // The target-th largest sits at ascending rank len - target.
    let rank = buf.len() - target;
    let (_, pivot, _) = buf.select_nth_unstable_by(rank, f64::total_cmp);
    let threshold = *pivot;
    let mut below = 0usize;
    let mut equal = 0usize;
    let mut above = 0usize;
    for &s in scores {
        match s.total_cmp(&threshold) {
            std::cmp::Ordering::Less => below += 1,
            std::cmp::Ordering::Equal => equal += 1,
            std::cmp::Ordering::Greater => above += 1,
        }
    }
    debug_assert!(above < target && target <= above + equal);
    let keep_probability = (target - above) as f64 / equal as f64;
    ThresholdSelection {
        threshold,
        below,
        equal,
        above,
        keep_probability,
    }
}

/// Keeps every edge independently with probability `target / m`. The coin
/// for edge (u, v) depends only on the seed and the endpoints.
pub fn uniform_sample(g: &Graph, target: usize, seed: u64) -> Graph {
    let m = g.edge_count();
    if m == 0 {
        return g.clone();
    }
    let q = (target as f64 / m as f64).min(1.0);
    g.filter_edges(|_, u, v, _| edge_coin(seed, u, v) < q)
}

/// Keeps edges by score threshold: strictly above the cutoff always, ties
/// with the selection's keep probability, strictly below never. `scores` is
/// indexed by canonical edge id.
pub fn threshold_sample(
    g: &Graph,
    scores: &[f64],
    target: usize,
    seed: u64,
) -> Result<(Graph, ThresholdSelection)> {
    if scores.len() != g.edge_count() {
        return Err(Error::ScoreLengthMismatch {
            scores: scores.len(),
            edges: g.edge_count(),
        });
    }
    let sel = threshold_select(scores, target);
    let kept = g.filter_edges(|i, u, v, _| match scores[i].total_cmp(&sel.threshold) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Equal => edge_coin(seed, u, v) < sel.keep_probability,
        std::cmp::Ordering::Less => false,
    });
    Ok((kept, sel))
}

/// Burn counts from repeated forest fires, one per canonical edge.
///
/// Fires start at random non-isolated nodes. A burning node samples its
/// unvisited neighbors one by one — uniformly, or proportionally to edge
/// weight when `weighted` — crediting each traversed edge, and stops
/// expanding after each sample with the configured probability. New fires
/// launch until total burns exceed `burn_ratio` times the edge count; the
/// fire in flight always finishes.
pub fn forest_fire_scores(g: &Graph, cfg: &SparsifyConfig, weighted: bool, seed: u64) -> Vec<f64> {
    let m = g.edge_count();
    let mut scores = vec![0.0f64; m];
    if m == 0 {
        return scores;
    }
    let edge_ids = g.undirected_edge_ids();
    let n = g.node_count();
    let mut rng = seeded_rng(seed);
    let burn_limit = cfg.burn_ratio * m as f64;
    let mut burnt = 0usize;

    // Per-fire visited marks via fire-stamp, so resets are O(1).
    let mut stamp = vec![0u64; n];
    let mut fire = 0u64;
    let mut queue = std::collections::VecDeque::new();
    let mut candidates: Vec<(u32, NodeId, Weight)> = Vec::new();

    while (burnt as f64) <= burn_limit {
        fire += 1;
        // A graph with edges always has a non-isolated node to start from.
        let start = loop {
            let v = rng.gen_range(0..n as NodeId);
            if !g.is_isolated(v) {
                break v;
            }
        };
        stamp[start as usize] = fire;
        queue.clear();
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            candidates.clear();
            for (slot, t, w) in g.neighbor_slots(u) {
                if stamp[t as usize] != fire {
                    candidates.push((edge_ids[slot], t, w));
                }
            }
            while !candidates.is_empty() {
                let pick = if weighted {
                    let total: Weight = candidates.iter().map(|&(_, _, w)| w).sum();
                    let mut r = rng.gen_range(0..total);
                    let mut idx = 0;
                    while r >= candidates[idx].2 {
                        r -= candidates[idx].2;
                        idx += 1;
                    }
                    idx
                } else {
                    rng.gen_range(0..candidates.len())
                };
                let (edge, t, _) = candidates.swap_remove(pick);
                stamp[t as usize] = fire;
                scores[edge as usize] += 1.0;
                burnt += 1;
                queue.push_back(t);
                if rng.gen::<f64>() < cfg.fire_stop_probability {
                    break;
                }
            }
        }
    }
    scores
}

/// What one sampling pass did, kept for diagnostics and tests.
#[derive(Debug, Clone, Serialize)]
pub struct SparsifyStats {
    pub method: Sparsifier,
    /// Edge count before sampling.
    pub input_edges: usize,
    pub target: usize,
    pub kept: usize,
    /// Standard deviation of the kept count under the sampler's law.
    pub expected_kept_std: f64,
    pub threshold: Option<ThresholdSelection>,
}

/// Applies the configured sampler to a contracted graph if the trigger
/// fires. `fine_edges` / `fine_nodes` describe the pre-contraction graph.
/// Returns `None` when sampling is disabled or not worthwhile.
pub fn sparsify_if_beneficial(
    coarse: &Graph,
    fine_edges: usize,
    fine_nodes: usize,
    cfg: &SparsifyConfig,
) -> Result<Option<(Graph, SparsifyStats)>> {
    if cfg.method == Sparsifier::None {
        return Ok(None);
    }
    cfg.validate()?;
    let target = target_edge_count(fine_edges, fine_nodes, coarse.node_count(), cfg);
    if !should_sparsify(coarse.edge_count(), target, cfg) {
        return Ok(None);
    }
    let m = coarse.edge_count();
    let (kept, expected_kept_std, threshold) = match cfg.method {
        Sparsifier::None => unreachable!(),
        Sparsifier::Uniform => {
            let q = target as f64 / m as f64;
            let std = (m as f64 * q * (1.0 - q)).sqrt();
            (
                uniform_sample(coarse, target, derive_seed(cfg.seed, 1)),
                std,
                None,
            )
        }
        Sparsifier::ThresholdWeight => {
            let scores: Vec<f64> = coarse.edges().map(|(_, _, _, w)| w as f64).collect();
            let (g, sel) = threshold_sample(coarse, &scores, target, derive_seed(cfg.seed, 3))?;
            (g, sel.kept_std(), Some(sel))
        }
        Sparsifier::ThresholdForestFire | Sparsifier::ThresholdWeightedForestFire => {
            let weighted = cfg.method == Sparsifier::ThresholdWeightedForestFire;
            let scores = forest_fire_scores(coarse, cfg, weighted, derive_seed(cfg.seed, 2));
            let (g, sel) = threshold_sample(coarse, &scores, target, derive_seed(cfg.seed, 3))?;
            (g, sel.kept_std(), Some(sel))
        }
    };
    let stats = SparsifyStats {
        method: cfg.method,
        input_edges: m,
        target,
        kept: kept.edge_count(),
        expected_kept_std,
        threshold,
    };
    Ok(Some((kept, stats)))
}

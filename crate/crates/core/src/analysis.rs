//! Quality metrics: cut, balance, clustering modularity, and performance
//! profiles for comparing algorithms across instance sets.

use serde::Serialize;

use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::graph::{Graph, Weight};
use crate::partition::{BalanceSpec, Partition};

/// Total weight of edges crossing block boundaries.
pub fn cut(g: &Graph, p: &Partition) -> Weight {
    let assignment = p.assignment();
    let mut total = 0;
    for (_, u, v, w) in g.edges() {
        if assignment[u as usize] != assignment[v as usize] {
            total += w;
        }
    }
    total
}

/// Balance summary of a partition against its feasibility spec.
#[derive(Debug, Clone, Serialize)]
pub struct ImbalanceReport {
    pub block_weights: Vec<Weight>,
    pub max_block_weight: Weight,
    /// Ideal block weight `ceil(c(V) / k)`.
    pub perfect_block_weight: Weight,
    /// Largest feasible block weight.
    pub weight_cap: Weight,
    /// `max_block_weight / perfect_block_weight`.
    pub imbalance: f64,
    pub feasible: bool,
}

pub fn imbalance_report(p: &Partition, spec: &BalanceSpec) -> ImbalanceReport {
    let max_block_weight = p.max_block_weight();
    ImbalanceReport {
        block_weights: p.block_weights().to_vec(),
        max_block_weight,
        perfect_block_weight: spec.perfect_block_weight(),
        weight_cap: spec.weight_cap(),
        imbalance: spec.imbalance_ratio(max_block_weight),
        feasible: max_block_weight <= spec.weight_cap(),
    }
}

/// Modularity of a clustering, with the quantities that make it predictive
/// for contraction.
///
/// With `e_ii` the fraction of edge mass inside cluster `i` and `a_i` its
/// volume fraction, modularity is `Q = sum_i (e_ii - a_i^2)`. Since
/// `sum_i a_i^2 <= max_i a_i`, the intra fraction squeezes into
/// `[Q, Q + max_volume_fraction]` — so a high Q certifies that contraction
/// will remove most edge mass, and `1 - Q` upper-bounds what can remain.
#[derive(Debug, Clone, Serialize)]
pub struct ModularityReport {
    pub cluster_count: usize,
    pub modularity: f64,
    /// Largest per-cluster volume fraction `a_i`.
    pub max_volume_fraction: f64,
    /// Fraction of edge mass with both endpoints in one cluster.
    pub intra_fraction: f64,
    /// Complement of `intra_fraction`: mass crossing cluster boundaries.
    pub inter_fraction: f64,
    /// Fraction of edges (by count) that cross clusters but vanish into a
    /// parallel bundle when contracted.
    pub parallel_fraction: f64,
    /// Distinct cluster-pair edges after contraction, over the edge count.
    /// Always `inter-count-fraction - parallel_fraction`.
    pub coarse_edge_fraction: f64,
}

/// Unweighted modularity: every edge counts 1, volumes are plain degrees.
pub fn modularity_report(g: &Graph, c: &Clustering) -> Result<ModularityReport> {
    modularity_impl(g, c, false)
}

/// Weighted modularity: edge weights as multiplicities in `e_ij` and `a_i`.
/// The two structural fractions (parallel, coarse) stay count-based.
pub fn weighted_modularity_report(g: &Graph, c: &Clustering) -> Result<ModularityReport> {
    modularity_impl(g, c, true)
}

fn modularity_impl(g: &Graph, c: &Clustering, weighted: bool) -> Result<ModularityReport> {
    let (intra, volume, total) = cluster_edge_mass(g, c, weighted);
    if g.edge_count() == 0 {
        return Err(Error::EdgelessGraph);
    }
    let m = total as f64;
    let mut modularity = 0.0;
    let mut intra_fraction = 0.0;
    let mut max_volume_fraction: f64 = 0.0;
    for (&e, &vol) in intra.iter().zip(&volume) {
        let a = vol as f64 / (2.0 * m);
        modularity += e as f64 / m - a * a;
        intra_fraction += e as f64 / m;
        max_volume_fraction = max_volume_fraction.max(a);
    }
    // Count-based contraction effect: how many crossing edges collapse into
    // parallel bundles, and how many distinct coarse edges remain.
    let mut crossing = 0usize;
    let mut pairs: Vec<u64> = Vec::new();
    for (_, u, v, _) in g.edges() {
        let (cu, cv) = (c.cluster_of(u), c.cluster_of(v));
        if cu != cv {
            crossing += 1;
            let key = ((cu.min(cv) as u64) << 32) | cu.max(cv) as u64;
            pairs.push(key);
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    let edges = g.edge_count() as f64;
    let coarse_edge_fraction = pairs.len() as f64 / edges;
    let parallel_fraction = (crossing - pairs.len()) as f64 / edges;
    Ok(ModularityReport {
        cluster_count: c.cluster_count(),
        modularity,
        max_volume_fraction,
        intra_fraction,
        inter_fraction: 1.0 - intra_fraction,
        parallel_fraction,
        coarse_edge_fraction,
    })
}

/// Effect of one coarsening step on edge mass and count, next to the
/// modularity of the clustering that drove it. The remaining edge fraction
/// never exceeds `1 - Q` of the clustering (its inter fraction is at most
/// that, and contraction can only merge crossing edges further).
#[derive(Debug, Clone, Serialize)]
pub struct ReductionStudy {
    pub cluster_count: usize,
    /// Contracted total edge weight over the input total edge weight.
    pub remaining_weight_fraction: f64,
    /// Contracted edge count over the input edge count.
    pub remaining_edge_fraction: f64,
    pub modularity: f64,
    /// `1 - modularity`: upper bound on `remaining_edge_fraction`.
    pub modularity_complement: f64,
}

/// Runs one clustering + contraction step and measures the reduction.
pub fn edge_reduction_study(
    g: &Graph,
    params: &crate::clustering::ClusteringParams,
) -> Result<ReductionStudy> {
    let c = crate::clustering::coarsening_clustering(g, params);
    let report = modularity_report(g, &c)?;
    let contracted = crate::contraction::contract(g, &c);
    Ok(ReductionStudy {
        cluster_count: c.cluster_count(),
        remaining_weight_fraction: contracted.coarse.total_edge_weight() as f64
            / g.total_edge_weight() as f64,
        remaining_edge_fraction: contracted.coarse.edge_count() as f64 / g.edge_count() as f64,
        modularity: report.modularity,
        modularity_complement: 1.0 - report.modularity,
    })
}

/// Per-cluster intra-cluster edge mass and volumes, plus total edge mass.
/// Exact integer quantities; the basis for both the float report and the
/// overflow-free bound check below.
pub fn cluster_edge_mass(
    g: &Graph,
    c: &Clustering,
    weighted: bool,
) -> (Vec<Weight>, Vec<Weight>, Weight) {
    let b = c.cluster_count();
    let mut intra = vec![0 as Weight; b];
    let mut volume = vec![0 as Weight; b];
    let mut total: Weight = 0;
    for (_, u, v, w) in g.edges() {
        let mass = if weighted { w } else { 1 };
        total += mass;
        let (cu, cv) = (c.cluster_of(u), c.cluster_of(v));
        volume[cu as usize] += mass;
        volume[cv as usize] += mass;
        if cu == cv {
            intra[cu as usize] += mass;
        }
    }
    (intra, volume, total)
}

/// Exact check that coverage lies in `[Q, Q + max_volume_fraction]`.
///
/// The gap `coverage - Q` equals `sum_i a_i^2`; the claim reduces to
/// `sum_i vol_i^2 <= (max_i vol_i) * 2W`, verified here in 128-bit integers
/// with no rounding anywhere.
pub fn modularity_sandwich_exact(g: &Graph, c: &Clustering, weighted: bool) -> bool {
    let (_, volume, total) = cluster_edge_mass(g, c, weighted);
    if total == 0 {
        return true;
    }
    let sum_sq: i128 = volume.iter().map(|&v| (v as i128) * (v as i128)).sum();
    let max_vol = volume.iter().copied().max().unwrap_or(0) as i128;
    sum_sq <= max_vol * 2 * total as i128
}

/// One measurement: `algorithm` scored `value` on `instance` (lower is
/// better, e.g. cut weight).
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileEntry {
    pub algorithm: String,
    pub instance: String,
    pub value: f64,
}

/// Step curve of one algorithm: fraction of instances (y) whose ratio to the
/// per-instance best is at most tau (x). Points are the breakpoints of the
/// step function, ascending in tau.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileCurve {
    pub algorithm: String,
    pub points: Vec<(f64, f64)>,
}

/// Performance profiles over a complete measurement table.
///
/// Every algorithm must score every instance exactly once. Instances where
/// the best value is 0 but some algorithm scored nonzero have no finite
/// ratios; they are dropped with a warning. Instances where everyone scored
/// 0 count as ratio 1 for all.
pub fn performance_profile(entries: &[ProfileEntry]) -> Result<(Vec<ProfileCurve>, Vec<String>)> {
    if entries.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut algorithms: Vec<&str> = Vec::new();
    let mut instances: Vec<&str> = Vec::new();
    for e in entries {
        if e.value < 0.0 || !e.value.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "value for {} on {} must be finite and non-negative, got {}",
                e.algorithm, e.instance, e.value
            )));
        }
        if !algorithms.contains(&e.algorithm.as_str()) {
            algorithms.push(&e.algorithm);
        }
        if !instances.contains(&e.instance.as_str()) {
            instances.push(&e.instance);
        }
    }
    let mut table = std::collections::HashMap::new();
    for e in entries {
        if table
            .insert((e.algorithm.as_str(), e.instance.as_str()), e.value)
            .is_some()
        {
            return Err(Error::DuplicateEntry {
                algorithm: e.algorithm.clone(),
                instance: e.instance.clone(),
            });
        }
    }
    for &a in &algorithms {
        for &i in &instances {
            if !table.contains_key(&(a, i)) {
                return Err(Error::IncompleteTable {
                    algorithm: a.to_string(),
                    instance: i.to_string(),
                });
            }
        }
    }

    let mut warnings = Vec::new();
    let mut ratios: Vec<Vec<f64>> = vec![Vec::new(); algorithms.len()];
    let mut counted = 0usize;
    for &inst in &instances {
        let best = algorithms
            .iter()
            .map(|&a| table[&(a, inst)])
            .fold(f64::INFINITY, f64::min);
        if best == 0.0 {
            if algorithms.iter().any(|&a| table[&(a, inst)] > 0.0) {
                warnings.push(format!(
                    "instance {inst:?} dropped: best value is 0, ratios undefined"
                ));
                continue;
            }
            // Everyone optimal: ratio 1 across the board.
            for r in ratios.iter_mut() {
                r.push(1.0);
            }
        } else {
            for (ai, &a) in algorithms.iter().enumerate() {
                ratios[ai].push(table[&(a, inst)] / best);
            }
        }
        counted += 1;
    }
    if counted == 0 {
        return Err(Error::EmptyTable);
    }

    let mut curves = Vec::with_capacity(algorithms.len());
    for (ai, a) in algorithms.iter().enumerate() {
        let rs = &mut ratios[ai];
        rs.sort_by(f64::total_cmp);
        let mut points: Vec<(f64, f64)> = Vec::new();
        for (i, &r) in rs.iter().enumerate() {
            let fraction = (i + 1) as f64 / counted as f64;
            match points.last_mut() {
                Some(last) if last.0 == r => last.1 = fraction,
                _ => points.push((r, fraction)),
            }
        }
        curves.push(ProfileCurve {
            algorithm: a.to_string(),
            points,
        });
    }
    Ok((curves, warnings))
}

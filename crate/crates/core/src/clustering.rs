//! Size-constrained clustering for coarsening.
//!
//! Three cooperating passes produce the clustering that one coarsening step
//! contracts:
//!
//! 1. [`lp_cluster`]: round-based label propagation. Every node starts as a
//!    singleton; on each visit a node joins the adjacent cluster with the
//!    heaviest connection to it, provided the move keeps that cluster within
//!    the weight limit. Run to convergence this guarantees that no remaining
//!    non-isolated singleton has any adjacent cluster it could join.
//! 2. [`two_hop_cluster`]: leftover singletons that share a "favorite"
//!    adjacent cluster are merged with each other (not with the favorite),
//!    which bounds the final cluster count even on star-like graphs where
//!    label propagation alone stalls.
//! 3. [`cluster_isolated`]: isolated nodes are packed into filler clusters.
//!
//! With limit `U >= 2 c(V) / |V|`, no isolated nodes, and no shrink cap, the
//! composed pass leaves at most `|V| / 2 + c(V) / U` clusters.

use crate::graph::{Graph, NodeId, Weight};
use crate::rng::seeded_permutation;

/// Dense clustering of a graph: every node carries a cluster id in
/// `[0, cluster_count)`, and per-cluster node weights are cached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    assignment: Vec<u32>,
    cluster_weights: Vec<Weight>,
}

impl Clustering {
    /// Every node in its own cluster.
    pub fn singletons(g: &Graph) -> Clustering {
        Clustering {
            assignment: (0..g.node_count() as u32).collect(),
            cluster_weights: g.node_weights().to_vec(),
        }
    }

    /// Builds a clustering from arbitrary labels, renumbering them densely
    /// in order of first appearance.
    pub fn from_assignment(g: &Graph, labels: &[u32]) -> Clustering {
        assert_eq!(labels.len(), g.node_count(), "one label per node required");
        let mut remap = std::collections::HashMap::new();
        let mut assignment = Vec::with_capacity(labels.len());
        let mut cluster_weights: Vec<Weight> = Vec::new();
        for (v, &label) in labels.iter().enumerate() {
            let next = cluster_weights.len() as u32;
            let id = *remap.entry(label).or_insert(next);
            if id == next {
                cluster_weights.push(0);
            }
            cluster_weights[id as usize] += g.node_weight(v as NodeId);
            assignment.push(id);
        }
        Clustering {
            assignment,
            cluster_weights,
        }
    }

    pub fn cluster_count(&self) -> usize {
        self.cluster_weights.len()
    }

    pub fn cluster_of(&self, v: NodeId) -> u32 {
        self.assignment[v as usize]
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    pub fn cluster_weight(&self, c: u32) -> Weight {
        self.cluster_weights[c as usize]
    }

    pub fn cluster_weights(&self) -> &[Weight] {
        &self.cluster_weights
    }

    /// Number of nodes per cluster.
    pub fn cluster_sizes(&self) -> Vec<u32> {
        let mut sizes = vec![0u32; self.cluster_count()];
        for &c in &self.assignment {
            sizes[c as usize] += 1;
        }
        sizes
    }

    /// Consistency check for tests: dense ids, correct cached weights.
    pub fn validate(&self, g: &Graph) -> crate::error::Result<()> {
        use crate::error::Error;
        if self.assignment.len() != g.node_count() {
            return Err(Error::LengthMismatch {
                file: "clustering assignment".into(),
                expected: g.node_count(),
                found: self.assignment.len(),
            });
        }
        let b = self.cluster_count();
        let mut weights = vec![0 as Weight; b];
        let mut seen = vec![false; b];
        for (v, &c) in self.assignment.iter().enumerate() {
            if c as usize >= b {
                return Err(Error::NodeOutOfRange {
                    node: c as u64,
                    count: b,
                });
            }
            weights[c as usize] += g.node_weight(v as NodeId);
            seen[c as usize] = true;
        }
        if weights != self.cluster_weights {
            return Err(Error::InvalidParameter("stale cluster weights".into()));
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::InvalidParameter("empty cluster id".into()));
        }
        Ok(())
    }
}

/// Parameters shared by the clustering passes.
#[derive(Debug, Clone)]
pub struct ClusteringParams {
    /// Upper bound `U` on the node weight of any cluster formed by merging.
    /// Nodes heavier than `U` stay singletons, which is legal.
    pub max_cluster_weight: Weight,
    /// Label propagation round limit; rounds also stop at the first round
    /// without any move.
    pub max_rounds: usize,
    /// When set, merging stops once the live cluster count would drop below
    /// `ceil(node_count / shrink_cap)`, capping the per-step node reduction.
    pub shrink_cap: Option<f64>,
    pub seed: u64,
}

impl ClusteringParams {
    pub fn new(max_cluster_weight: Weight, max_rounds: usize, seed: u64) -> ClusteringParams {
        assert!(max_cluster_weight >= 1);
        assert!(max_rounds >= 1);
        ClusteringParams {
            max_cluster_weight,
            max_rounds,
            shrink_cap: None,
            seed,
        }
    }

    pub fn with_shrink_cap(mut self, cap: f64) -> ClusteringParams {
        assert!(cap > 1.0, "shrink cap must exceed 1");
        self.shrink_cap = Some(cap);
        self
    }

    fn min_clusters(&self, node_count: usize) -> usize {
        match self.shrink_cap {
            None => 0,
            Some(cap) => (node_count as f64 / cap).ceil() as usize,
        }
    }
}

/// Size-constrained label propagation.
///
/// Nodes are visited in a seed-derived random order, fixed once and reused
/// by every round. A node moves to the adjacent cluster with the heaviest
/// total connecting edge weight among those that can still absorb it
/// (`c(K) + c(u) <= U`), but only if that strictly beats its connection to
/// its current cluster; ties prefer the lowest cluster id. Cluster weights
/// update immediately, so later visits in the same round see earlier moves.
pub fn lp_cluster(g: &Graph, params: &ClusteringParams) -> Clustering {
    let n = g.node_count();
    let u_limit = params.max_cluster_weight;
    let mut label: Vec<u32> = (0..n as u32).collect();
    let mut weight: Vec<Weight> = g.node_weights().to_vec();
    let mut live = n;
    let floor = params.min_clusters(n);
    let mut merges_suppressed = live <= floor;

    let order = seeded_permutation(n, params.seed);
    let mut conn: Vec<Weight> = vec![0; n];
    let mut touched: Vec<u32> = Vec::new();

    for _ in 0..params.max_rounds {
        let mut moved = 0usize;
        for &v in &order {
            let vu = v as usize;
            if g.degree(v) == 0 {
                continue;
            }
            touched.clear();
            for (t, w) in g.neighbors(v) {
                let k = label[t as usize];
                if conn[k as usize] == 0 {
                    touched.push(k);
                }
                conn[k as usize] += w;
            }
            let current = label[vu];
            let current_conn = conn[current as usize];
            let c_v = g.node_weight(v);

            let mut best: Option<(Weight, u32)> = None;
            for &k in &touched {
                if k == current {
                    continue;
                }
                if weight[k as usize] + c_v > u_limit {
                    continue;
                }
                let cand = (conn[k as usize], k);
                best = Some(match best {
                    None => cand,
                    Some(b) => {
                        if cand.0 > b.0 || (cand.0 == b.0 && cand.1 < b.1) {
                            cand
                        } else {
                            b
                        }
                    }
                });
            }
            for &k in &touched {
                conn[k as usize] = 0;
            }

            if let Some((best_conn, target)) = best {
                if best_conn > current_conn {
                    let kills = weight[current as usize] == c_v;
                    if kills {
                        if merges_suppressed || live - 1 < floor {
                            merges_suppressed = true;
                            continue;
                        }
                        live -= 1;
                        if live <= floor {
                            merges_suppressed = true;
                        }
                    }
                    weight[current as usize] -= c_v;
                    weight[target as usize] += c_v;
                    label[vu] = target;
                    moved += 1;
                }
            }
        }
        if moved == 0 {
            break;
        }
    }

    Clustering::from_labels_bounded(g, &label)
}

/// Merges leftover singletons that share a favorite cluster.
///
/// For every non-isolated singleton, its favorite is the adjacent cluster
/// with the heaviest connection (ties: lowest cluster id). Singletons are
/// grouped by favorite and packed first-fit in node id order into joint
/// clusters of weight at most `U`. Nodes whose group offers no fitting
/// partner stay singletons; existing clusters are never modified.
pub fn two_hop_cluster(g: &Graph, c: &Clustering, params: &ClusteringParams) -> Clustering {
    let n = g.node_count();
    let b = c.cluster_count();
    let u_limit = params.max_cluster_weight;
    let sizes = c.cluster_sizes();

    // Favorite cluster per singleton, collected in node id order.
    let mut conn: Vec<Weight> = vec![0; b];
    let mut touched: Vec<u32> = Vec::new();
    let mut grouped: Vec<(u32, NodeId)> = Vec::new(); // (favorite, node)
    for v in 0..n as NodeId {
        let cl = c.cluster_of(v);
        if sizes[cl as usize] != 1 || g.degree(v) == 0 {
            continue;
        }
        touched.clear();
        let mut favorite: Option<(Weight, u32)> = None;
        for (t, w) in g.neighbors(v) {
            let k = c.cluster_of(t);
            if conn[k as usize] == 0 {
                touched.push(k);
            }
            conn[k as usize] += w;
        }
        for &k in &touched {
            let cand = (conn[k as usize], k);
            favorite = Some(match favorite {
                None => cand,
                Some(f) => {
                    if cand.0 > f.0 || (cand.0 == f.0 && cand.1 < f.1) {
                        cand
                    } else {
                        f
                    }
                }
            });
            conn[k as usize] = 0;
        }
        // A non-isolated singleton always has at least one adjacent cluster,
        // and it is never its own (no self-loops).
        let (_, fav) = favorite.expect("non-isolated singleton without neighbors");
        debug_assert_ne!(fav, cl);
        grouped.push((fav, v));
    }

    // Group by favorite with a counting sort; node id order is preserved
    // within each group.
    let mut group_sizes = vec![0usize; b];
    for &(fav, _) in &grouped {
        group_sizes[fav as usize] += 1;
    }
    let mut group_starts = vec![0usize; b + 1];
    for i in 0..b {
        group_starts[i + 1] = group_starts[i] + group_sizes[i];
    }
    let mut by_group: Vec<NodeId> = vec![0; grouped.len()];
    let mut cursor = group_starts.clone();
    for &(fav, v) in &grouped {
        by_group[cursor[fav as usize]] = v;
        cursor[fav as usize] += 1;
    }

    let mut label = c.assignment().to_vec();
    let mut live = b;
    let floor = params.min_clusters(n);
    let mut done = live <= floor;

    let mut bins: Vec<(Weight, u32)> = Vec::new(); // (weight, representative cluster id)
    'groups: for f in 0..b {
        if done {
            break;
        }
        let members = &by_group[group_starts[f]..group_starts[f + 1]];
        if members.len() < 2 {
            continue;
        }
        bins.clear();
        let mut frontier = 0usize;
        for &v in members {
            let c_v = g.node_weight(v);
            while frontier < bins.len() && bins[frontier].0 >= u_limit {
                frontier += 1;
            }
            let mut placed = false;
            for bin in bins[frontier..].iter_mut() {
                if bin.0 + c_v <= u_limit {
                    if live - 1 < floor {
                        done = true;
                        continue 'groups;
                    }
                    label[v as usize] = bin.1;
                    bin.0 += c_v;
                    live -= 1;
                    if live <= floor {
                        done = true;
                    }
                    placed = true;
                    break;
                }
            }
            if !placed {
                bins.push((c_v, c.cluster_of(v)));
            }
            if done {
                break 'groups;
            }
        }
    }

    Clustering::from_labels_bounded(g, &label)
}

/// Packs isolated nodes first-fit in node id order into clusters of weight
/// at most `U`. Non-isolated nodes are untouched.
pub fn cluster_isolated(g: &Graph, c: &Clustering, params: &ClusteringParams) -> Clustering {
    let n = g.node_count();
    let u_limit = params.max_cluster_weight;
    let mut label = c.assignment().to_vec();
    let mut live = c.cluster_count();
    let floor = params.min_clusters(n);

    let mut bins: Vec<(Weight, u32)> = Vec::new();
    let mut frontier = 0usize;
    for v in 0..n as NodeId {
        if g.degree(v) != 0 {
            continue;
        }
        if live <= floor {
            break;
        }
        let c_v = g.node_weight(v);
        while frontier < bins.len() && bins[frontier].0 >= u_limit {
            frontier += 1;
        }
        let mut placed = false;
        for bin in bins[frontier..].iter_mut() {
            if bin.0 + c_v <= u_limit {
                label[v as usize] = bin.1;
                bin.0 += c_v;
                live -= 1;
                placed = true;
                break;
            }
        }
        if !placed {
            // The node keeps its own cluster and becomes a bin others may
            // join. Nodes heavier than U form full bins immediately.
            bins.push((c_v, c.cluster_of(v)));
        }
    }

    Clustering::from_labels_bounded(g, &label)
}

/// The full coarsening clustering: label propagation, then two-hop merging
/// of leftover singletons, then isolated node packing.
pub fn coarsening_clustering(g: &Graph, params: &ClusteringParams) -> Clustering {
    let c = lp_cluster(g, params);
    let c = two_hop_cluster(g, &c, params);
    cluster_isolated(g, &c, params)
}

impl Clustering {
    /// Compacts labels known to be bounded by the node count (internal
    /// passes only produce such labels).
    fn from_labels_bounded(g: &Graph, labels: &[u32]) -> Clustering {
        let n = g.node_count();
        let mut remap = vec![u32::MAX; n];
        let mut assignment = Vec::with_capacity(n);
        let mut cluster_weights: Vec<Weight> = Vec::new();
        for (v, &label) in labels.iter().enumerate() {
            let slot = &mut remap[label as usize];
            if *slot == u32::MAX {
                *slot = cluster_weights.len() as u32;
                cluster_weights.push(0);
            }
            let id = *slot;
            cluster_weights[id as usize] += g.node_weight(v as NodeId);
            assignment.push(id);
        }
        Clustering {
            assignment,
            cluster_weights,
        }
    }
}

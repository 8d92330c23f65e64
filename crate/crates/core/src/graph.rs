//! Immutable undirected graph with integer node and edge weights.
//!
//! The adjacency is stored in compressed form: one offset array plus flat
//! neighbor/weight arrays, with each node's neighbor list sorted by node id.
//! Graphs are simple (no self-loops, no parallel edges) and symmetric; both
//! directions of every edge are stored. Node ids are dense and 0-based.
//!
//! Canonical edge order: edges enumerated as (u, v) with u < v, ascending.
//! Everything that refers to "edge index i" (samplers, per-edge scores) means
//! position i in this enumeration.

use crate::error::{Error, Result};

pub type NodeId = u32;
pub type Weight = i64;

/// What to do with self-loops handed to the builder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelfLoops {
    Reject,
    Drop,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    weights: Vec<Weight>,
    node_weights: Vec<Weight>,
    total_node_weight: Weight,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from an undirected edge list.
    ///
    /// Duplicate edges (in either orientation) are merged by summing their
    /// weights. Self-loops are rejected. Node weights default to 1.
    pub fn build(
        node_count: usize,
        edges: &[(NodeId, NodeId, Weight)],
        node_weights: Option<Vec<Weight>>,
    ) -> Result<Graph> {
        Self::build_with(node_count, edges, node_weights, SelfLoops::Reject)
    }

    /// As [`Graph::build`], with an explicit self-loop policy.
    pub fn build_with(
        node_count: usize,
        edges: &[(NodeId, NodeId, Weight)],
        node_weights: Option<Vec<Weight>>,
        self_loops: SelfLoops,
    ) -> Result<Graph> {
        if node_count > u32::MAX as usize {
            return Err(Error::TooManyNodes { count: node_count });
        }
        let node_weights = match node_weights {
            Some(w) => {
                if w.len() != node_count {
                    return Err(Error::LengthMismatch {
                        file: "node weights".to_string(),
                        expected: node_count,
                        found: w.len(),
                    });
                }
                for (i, &c) in w.iter().enumerate() {
                    if c <= 0 {
                        return Err(Error::NonPositiveWeight {
                            what: format!("node {i}"),
                            weight: c,
                        });
                    }
                }
                w
            }
            None => vec![1; node_count],
        };

        let mut degrees = vec![0usize; node_count];
        let mut kept = 0usize;
        for &(u, v, w) in edges {
            if (u as usize) >= node_count {
                return Err(Error::NodeOutOfRange {
                    node: u as u64,
                    count: node_count,
                });
            }
            if (v as usize) >= node_count {
                return Err(Error::NodeOutOfRange {
                    node: v as u64,
                    count: node_count,
                });
            }
            if u == v {
                match self_loops {
                    SelfLoops::Reject => return Err(Error::SelfLoop { node: u }),
                    SelfLoops::Drop => continue,
                }
            }
            if w <= 0 {
                return Err(Error::NonPositiveWeight {
                    what: format!("edge ({u}, {v})"),
                    weight: w,
                });
            }
            degrees[u as usize] += 1;
            degrees[v as usize] += 1;
            kept += 1;
        }
        let _ = kept;

        // Scatter both directions, then sort each list and merge duplicates.
        let mut offsets = vec![0usize; node_count + 1];
        for v in 0..node_count {
            offsets[v + 1] = offsets[v] + degrees[v];
        }
        let total = offsets[node_count];
        let mut targets = vec![0 as NodeId; total];
        let mut weights = vec![0 as Weight; total];
        let mut cursor = offsets.clone();
        for &(u, v, w) in edges {
            if u == v {
                continue; // only reachable under SelfLoops::Drop
            }
            targets[cursor[u as usize]] = v;
            weights[cursor[u as usize]] = w;
            cursor[u as usize] += 1;
            targets[cursor[v as usize]] = u;
            weights[cursor[v as usize]] = w;
            cursor[v as usize] += 1;
        }

        let mut merged_targets = Vec::with_capacity(total);
        let mut merged_weights = Vec::with_capacity(total);
        let mut merged_offsets = vec![0usize; node_count + 1];
        let mut entries: Vec<(NodeId, Weight)> = Vec::new();
        for v in 0..node_count {
            entries.clear();
            entries.extend(
                targets[offsets[v]..offsets[v + 1]]
                    .iter()
                    .copied()
                    .zip(weights[offsets[v]..offsets[v + 1]].iter().copied()),
            );
            entries.sort_unstable_by_key(|&(t, _)| t);
            let mut i = 0;
            while i < entries.len() {
                let (t, mut w) = entries[i];
                let mut j = i + 1;
                while j < entries.len() && entries[j].0 == t {
                    w += entries[j].1;
                    j += 1;
                }
                merged_targets.push(t);
                merged_weights.push(w);
                i = j;
            }
            merged_offsets[v + 1] = merged_targets.len();
        }

        let edge_count = merged_targets.len() / 2;
        let total_node_weight = node_weights.iter().sum();
        Ok(Graph {
            offsets: merged_offsets,
            targets: merged_targets,
            weights: merged_weights,
            node_weights,
            total_node_weight,
            edge_count,
        })
    }

    /// Internal constructor for callers that already hold a valid compressed
    /// adjacency (contraction, sparsification). Invariants are checked only
    /// under debug assertions.
    pub(crate) fn from_sorted_adjacency(
        offsets: Vec<usize>,
        targets: Vec<NodeId>,
        weights: Vec<Weight>,
        node_weights: Vec<Weight>,
    ) -> Graph {
        let edge_count = targets.len() / 2;
        let total_node_weight = node_weights.iter().sum();
        let g = Graph {
            offsets,
            targets,
            weights,
            node_weights,
            total_node_weight,
            edge_count,
        };
        debug_assert!(g.validate().is_ok(), "internal adjacency invalid");
        g
    }

    /// Constructor for parsed input: runs the full validation pass and
    /// reports the first violation instead of asserting.
    pub(crate) fn from_parts_for_read(
        offsets: Vec<usize>,
        targets: Vec<NodeId>,
        weights: Vec<Weight>,
        node_weights: Vec<Weight>,
    ) -> Result<Graph> {
        let edge_count = targets.len() / 2;
        let total_node_weight = node_weights.iter().sum();
        let g = Graph {
            offsets,
            targets,
            weights,
            node_weights,
            total_node_weight,
            edge_count,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.node_weights.len()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn node_weight(&self, v: NodeId) -> Weight {
        self.node_weights[v as usize]
    }

    pub fn node_weights(&self) -> &[Weight] {
        &self.node_weights
    }

    pub fn total_node_weight(&self) -> Weight {
        self.total_node_weight
    }

    /// Sum of all undirected edge weights.
    pub fn total_edge_weight(&self) -> Weight {
        self.weights.iter().sum::<Weight>() / 2
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    /// Sum of edge weights incident to `v`.
    pub fn weighted_degree(&self, v: NodeId) -> Weight {
        let (lo, hi) = (self.offsets[v as usize], self.offsets[v as usize + 1]);
        self.weights[lo..hi].iter().sum()
    }

    pub fn is_isolated(&self, v: NodeId) -> bool {
        self.degree(v) == 0
    }

    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = (NodeId, Weight)> + '_ {
        let (lo, hi) = (self.offsets[v as usize], self.offsets[v as usize + 1]);
        self.targets[lo..hi]
            .iter()
            .copied()
            .zip(self.weights[lo..hi].iter().copied())
    }

    /// Neighbors of `v` with their directed adjacency slot, for callers that
    /// index per-edge data via [`Graph::undirected_edge_ids`].
    pub(crate) fn neighbor_slots(
        &self,
        v: NodeId,
    ) -> impl Iterator<Item = (usize, NodeId, Weight)> + '_ {
        let (lo, hi) = (self.offsets[v as usize], self.offsets[v as usize + 1]);
        (lo..hi).map(move |s| (s, self.targets[s], self.weights[s]))
    }

    /// Canonical undirected edge enumeration: (index, u, v, weight) with
    /// u < v, ascending by (u, v).
    pub fn edges(&self) -> EdgeIter<'_> {
        EdgeIter {
            graph: self,
            node: 0,
            slot: if self.node_count() == 0 {
                0
            } else {
                self.offsets[0]
            },
            index: 0,
        }
    }

    /// Maps each directed adjacency slot to its canonical undirected edge
    /// index. Both orientations of an edge share one index.
    pub fn undirected_edge_ids(&self) -> Vec<u32> {
        let n = self.node_count();
        let mut ids = vec![u32::MAX; self.targets.len()];
        // Positions of the next unmatched back-edge per node. Back edges
        // (v, u) with u < v appear in v's list in ascending u, which matches
        // the sweep order over u below.
        let mut back_cursor: Vec<usize> = (0..n).map(|v| self.offsets[v]).collect();
        let mut next_id = 0u32;
        for u in 0..n {
            for slot in self.offsets[u]..self.offsets[u + 1] {
                let v = self.targets[slot] as usize;
                if v > u {
                    ids[slot] = next_id;
                    // The reverse entry is the next unmatched slot in v's
                    // list whose target is u.
                    let mut c = back_cursor[v];
                    while self.targets[c] as usize != u {
                        c += 1;
                    }
                    ids[c] = next_id;
                    back_cursor[v] = c + 1;
                    next_id += 1;
                }
            }
        }
        debug_assert_eq!(next_id as usize, self.edge_count);
        ids
    }

    /// New graph keeping exactly the edges for which `keep` returns true.
    /// `keep` is called once per canonical edge, in canonical order. Node
    /// weights are preserved; node ids are unchanged.
    pub fn filter_edges(
        &self,
        mut keep: impl FnMut(usize, NodeId, NodeId, Weight) -> bool,
    ) -> Graph {
        let mut keep_edge = vec![false; self.edge_count];
        for (i, u, v, w) in self.edges() {
            keep_edge[i] = keep(i, u, v, w);
        }
        let ids = self.undirected_edge_ids();
        let n = self.node_count();
        let mut offsets = vec![0usize; n + 1];
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        for v in 0..n {
            for slot in self.offsets[v]..self.offsets[v + 1] {
                if keep_edge[ids[slot] as usize] {
                    targets.push(self.targets[slot]);
                    weights.push(self.weights[slot]);
                }
            }
            offsets[v + 1] = targets.len();
        }
        Graph::from_sorted_adjacency(offsets, targets, weights, self.node_weights.clone())
    }

    /// Full structural check: in-range sorted unique neighbors, no
    /// self-loops, positive weights, symmetric adjacency with equal weights,
    /// and consistent totals. Exposed so tests can verify any construction
    /// path.
    pub fn validate(&self) -> Result<()> {
        let n = self.node_count();
        if self.offsets.len() != n + 1 || self.offsets[0] != 0 {
            return Err(Error::InvalidParameter("offset array malformed".into()));
        }
        if *self.offsets.last().unwrap() != self.targets.len()
            || self.targets.len() != self.weights.len()
        {
            return Err(Error::InvalidParameter(
                "adjacency array lengths inconsistent".into(),
            ));
        }
        if self.targets.len() != 2 * self.edge_count {
            return Err(Error::InvalidParameter(
                "edge count does not match adjacency size".into(),
            ));
        }
        for (v, &c) in self.node_weights.iter().enumerate() {
            if c <= 0 {
                return Err(Error::NonPositiveWeight {
                    what: format!("node {v}"),
                    weight: c,
                });
            }
        }
        if self.total_node_weight != self.node_weights.iter().sum::<Weight>() {
            return Err(Error::InvalidParameter("total node weight stale".into()));
        }
        for v in 0..n as NodeId {
            let mut prev: Option<NodeId> = None;
            for (t, w) in self.neighbors(v) {
                if t as usize >= n {
                    return Err(Error::NodeOutOfRange {
                        node: t as u64,
                        count: n,
                    });
                }
                if t == v {
                    return Err(Error::SelfLoop { node: v });
                }
                if w <= 0 {
                    return Err(Error::NonPositiveWeight {
                        what: format!("edge ({v}, {t})"),
                        weight: w,
                    });
                }
                if let Some(p) = prev {
                    if t <= p {
                        return Err(Error::DuplicateNeighbor {
                            node: v,
                            neighbor: t,
                        });
                    }
                }
                prev = Some(t);
                // Symmetric entry with identical weight must exist.
                if self.edge_weight_between(t, v) != Some(w) {
                    return Err(Error::Asymmetric { from: v, to: t });
                }
            }
        }
        Ok(())
    }

    /// Weight of the edge (u, v) if present.
    pub fn edge_weight_between(&self, u: NodeId, v: NodeId) -> Option<Weight> {
        let (lo, hi) = (self.offsets[u as usize], self.offsets[u as usize + 1]);
        let list = &self.targets[lo..hi];
        list.binary_search(&v)
            .ok()
            .map(|pos| self.weights[lo + pos])
    }
}

/// Iterator over canonical undirected edges. See [`Graph::edges`].
pub struct EdgeIter<'a> {
    graph: &'a Graph,
    node: usize,
    slot: usize,
    index: usize,
}

impl Iterator for EdgeIter<'_> {
    type Item = (usize, NodeId, NodeId, Weight);

    fn next(&mut self) -> Option<Self::Item> {
        let g = self.graph;
        let n = g.node_count();
        while self.node < n {
            let end = g.offsets[self.node + 1];
            while self.slot < end {
                let slot = self.slot;
                self.slot += 1;
                let v = g.targets[slot];
                if (v as usize) > self.node {
                    let item = (self.index, self.node as NodeId, v, g.weights[slot]);
                    self.index += 1;
                    return Some(item);
                }
            }
            self.node += 1;
            if self.node < n {
                self.slot = g.offsets[self.node];
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_with_duplicate_merged() {
        // Duplicate (0, 1) edges merge into weight 2; degrees 2, 2, 2.
        let g = Graph::build(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1), (1, 0, 1)], None).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.edge_weight_between(0, 1), Some(2));
        assert_eq!(g.edge_weight_between(1, 0), Some(2));
        assert_eq!(g.edge_weight_between(0, 2), Some(1));
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.degree(1), 2);
        assert_eq!(g.degree(2), 2);
        g.validate().unwrap();
    }

    #[test]
    fn self_loop_rejected_by_default() {
        let err = Graph::build(2, &[(0, 0, 1)], None).unwrap_err();
        assert!(matches!(err, Error::SelfLoop { node: 0 }));
    }

    #[test]
    fn self_loop_dropped_on_request() {
        let g = Graph::build_with(2, &[(0, 0, 1), (0, 1, 3)], None, SelfLoops::Drop).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge_weight_between(0, 1), Some(3));
    }

    #[test]
    fn isolated_nodes_are_legal() {
        let g = Graph::build(4, &[(0, 1, 1)], None).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 1);
        assert!(g.is_isolated(2));
        assert!(g.is_isolated(3));
        assert_eq!(g.total_node_weight(), 4);
        g.validate().unwrap();
    }

    #[test]
    fn out_of_range_node_rejected() {
        let err = Graph::build(2, &[(0, 2, 1)], None).unwrap_err();
        assert!(matches!(err, Error::NodeOutOfRange { node: 2, count: 2 }));
    }

    #[test]
    fn non_positive_weights_rejected() {
        assert!(Graph::build(2, &[(0, 1, 0)], None).is_err());
        assert!(Graph::build(2, &[(0, 1, -3)], None).is_err());
        assert!(Graph::build(2, &[(0, 1, 1)], Some(vec![1, 0])).is_err());
    }

    #[test]
    fn node_weights_and_totals() {
        let g = Graph::build(3, &[(0, 1, 2), (1, 2, 5)], Some(vec![3, 4, 5])).unwrap();
        assert_eq!(g.total_node_weight(), 12);
        assert_eq!(g.total_edge_weight(), 7);
        assert_eq!(g.weighted_degree(1), 7);
        assert_eq!(g.node_weight(2), 5);
    }

    #[test]
    fn canonical_edge_enumeration() {
        let g = Graph::build(4, &[(2, 3, 7), (0, 1, 1), (0, 2, 2)], None).unwrap();
        let edges: Vec<_> = g.edges().collect();
        assert_eq!(edges, vec![(0, 0, 1, 1), (1, 0, 2, 2), (2, 2, 3, 7)]);
    }

    #[test]
    fn undirected_edge_ids_match_enumeration() {
        let g = Graph::build(
            5,
            &[(0, 1, 1), (0, 2, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1)],
            None,
        )
        .unwrap();
        let ids = g.undirected_edge_ids();
        for (i, u, v, _) in g.edges() {
            // Both directed slots of edge i carry id i.
            let slot_uv = (g.offsets[u as usize]..g.offsets[u as usize + 1])
                .find(|&s| g.targets[s] == v)
                .unwrap();
            let slot_vu = (g.offsets[v as usize]..g.offsets[v as usize + 1])
                .find(|&s| g.targets[s] == u)
                .unwrap();
            assert_eq!(ids[slot_uv] as usize, i);
            assert_eq!(ids[slot_vu] as usize, i);
        }
    }

    #[test]
    fn filter_edges_keeps_subset_and_weights() {
        let g = Graph::build(4, &[(0, 1, 1), (1, 2, 2), (2, 3, 3), (0, 3, 4)], None).unwrap();
        let f = g.filter_edges(|_, _, _, w| w >= 3);
        f.validate().unwrap();
        assert_eq!(f.node_count(), 4);
        assert_eq!(f.edge_count(), 2);
        assert_eq!(f.edge_weight_between(2, 3), Some(3));
        assert_eq!(f.edge_weight_between(0, 3), Some(4));
        assert_eq!(f.edge_weight_between(0, 1), None);
        assert_eq!(f.node_weights(), g.node_weights());
    }

    #[test]
    fn empty_graph() {
        let g = Graph::build(0, &[], None).unwrap();
        assert_eq!(g.node_count(), 0);
        assert_eq!(g.edge_count(), 0);
        g.validate().unwrap();
    }
}

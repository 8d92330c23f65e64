//! Graph contraction: collapse each cluster into one coarse node.
//!
//! Coarse node weights are the summed member weights; parallel edges between
//! cluster pairs merge by edge weight summation; intra-cluster edges vanish.
//! Any partition of the coarse graph therefore induces a partition of the
//! fine graph with identical cut value and block weights.

use crate::clustering::Clustering;
use crate::graph::{Graph, NodeId, Weight};

/// A contracted graph plus the fine-to-coarse node mapping that produced it.
#[derive(Debug, Clone)]
pub struct ContractionResult {
    pub coarse: Graph,
    pub fine_to_coarse: Vec<u32>,
}

/// Contracts `g` along `c`. Cluster ids become coarse node ids unchanged,
/// so `c.cluster_weights()` are exactly the coarse node weights.
pub fn contract(g: &Graph, c: &Clustering) -> ContractionResult {
    let b = c.cluster_count();
    let fine_to_coarse = c.assignment().to_vec();

    // Bucket fine nodes by cluster so each coarse node's adjacency is
    // accumulated in one linear sweep.
    let mut counts = vec![0usize; b + 1];
    for &cl in &fine_to_coarse {
        counts[cl as usize + 1] += 1;
    }
    for i in 0..b {
        counts[i + 1] += counts[i];
    }
    let starts = counts;
    let mut members: Vec<NodeId> = vec![0; g.node_count()];
    let mut cursor = starts.clone();
    for (v, &cl) in fine_to_coarse.iter().enumerate() {
        members[cursor[cl as usize]] = v as NodeId;
        cursor[cl as usize] += 1;
    }

    // Scratch accumulator indexed by coarse target; `touched` remembers the
    // slots to reset so the sweep stays linear in fine edges.
    let mut acc: Vec<Weight> = vec![0; b];
    let mut touched: Vec<u32> = Vec::new();
    let mut offsets = Vec::with_capacity(b + 1);
    let mut targets: Vec<NodeId> = Vec::new();
    let mut weights: Vec<Weight> = Vec::new();
    offsets.push(0usize);

    for cl in 0..b {
        touched.clear();
        for &v in &members[starts[cl]..starts[cl + 1]] {
            for (t, w) in g.neighbors(v) {
                let ct = fine_to_coarse[t as usize];
                if ct as usize == cl {
                    continue; // intra-cluster edge disappears
                }
                if acc[ct as usize] == 0 {
                    touched.push(ct);
                }
                acc[ct as usize] += w;
            }
        }
        touched.sort_unstable();
        for &ct in &touched {
            targets.push(ct);
            weights.push(acc[ct as usize]);
            acc[ct as usize] = 0;
        }
        offsets.push(targets.len());
    }

    let coarse =
        Graph::from_sorted_adjacency(offsets, targets, weights, c.cluster_weights().to_vec());
    ContractionResult {
        coarse,
        fine_to_coarse,
    }
}

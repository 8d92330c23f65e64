//! Initial partitioning of the coarsest graph.
//!
//! A `k`-way partition is built by recursive bisection. Each bisection runs
//! several seeded attempts of greedy region growing — pull the node with the
//! highest attraction to the grown side until that side reaches its target
//! weight — followed by refinement, and keeps the best attempt by
//! feasibility, then cut, then balance.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::{Graph, NodeId, Weight};
use crate::partition::{BalanceSpec, Partition};
use crate::refinement::lp_refine_with_caps;
use crate::rng::{derive_seed, seeded_permutation};

/// Attempts per bisection.
const ATTEMPTS: u64 = 4;

/// Bisects `g` into blocks 0 and 1 aiming at `perfect` side weights under
/// per-side `caps`. Runs [`ATTEMPTS`] seeded attempts and returns the best.
///
/// Growing never absorbs the last node, so block 1 stays nonempty unless
/// refinement can legally drain it — impossible whenever `caps.0` is below
/// the total weight. Side weights can exceed the caps only when the
/// instance forces it (e.g. one node heavier than its cap); callers decide
/// whether that is fatal.
pub fn bipartition(
    g: &Graph,
    perfect: (Weight, Weight),
    caps: (Weight, Weight),
    rounds: usize,
    seed: u64,
) -> Partition {
    let mut best: Option<(bool, Weight, Weight, Partition)> = None;
    for attempt in 0..ATTEMPTS {
        let attempt_seed = derive_seed(seed, attempt);
        let mut p = grow_bipartition(g, perfect.0, caps.0, attempt_seed);
        lp_refine_with_caps(
            g,
            &mut p,
            &[caps.0, caps.1],
            rounds,
            derive_seed(attempt_seed, u64::MAX),
        );
        let cut = crate::analysis::cut(g, &p);
        let over = (p.block_weight(0) - caps.0)
            .max(p.block_weight(1) - caps.1)
            .max(0);
        let infeasible = over > 0;
        let better = match &best {
            None => true,
            Some((b_inf, b_cut, b_over, _)) => (infeasible, cut, over) < (*b_inf, *b_cut, *b_over),
        };
        if better {
            best = Some((infeasible, cut, over, p));
        }
    }
    best.expect("at least one attempt").3
}

/// One greedy growing attempt: block 0 grows node by node, preferring the
/// unassigned node with the largest gain `2 * conn_to_block0 - degree`
/// (edges saved from the cut minus edges newly exposed). Exhausted
/// frontiers restart from the next unassigned node in a seeded order; the
/// last node is never absorbed, keeping block 1 nonempty for n >= 2.
fn grow_bipartition(g: &Graph, target: Weight, cap: Weight, seed: u64) -> Partition {
    let n = g.node_count();
    let mut in_block0 = vec![false; n];
    let mut unfit = vec![false; n];
    let mut gain: Vec<Weight> = (0..n as NodeId).map(|v| -g.weighted_degree(v)).collect();
    let mut heap: BinaryHeap<(Weight, Reverse<NodeId>)> = BinaryHeap::new();
    let order = seeded_permutation(n, seed);
    let mut cursor = 0usize;
    let mut grown: Weight = 0;
    let mut assigned = 0usize;

    while grown < target && n >= 2 && assigned < n - 1 {
        // Next candidate: best valid frontier node, else a restart node.
        let mut candidate: Option<NodeId> = None;
        while let Some((entry_gain, Reverse(v))) = heap.pop() {
            let vu = v as usize;
            if in_block0[vu] || unfit[vu] || entry_gain != gain[vu] {
                continue; // assigned, hopeless, or superseded by a newer entry
            }
            if grown + g.node_weight(v) > cap {
                unfit[vu] = true; // block 0 only grows; v will never fit
                continue;
            }
            candidate = Some(v);
            break;
        }
        if candidate.is_none() {
            while cursor < order.len() {
                let v = order[cursor];
                cursor += 1;
                let vu = v as usize;
                if in_block0[vu] || unfit[vu] {
                    continue;
                }
                if grown + g.node_weight(v) > cap {
                    unfit[vu] = true;
                    continue;
                }
                candidate = Some(v);
                break;
            }
        }
        let Some(v) = candidate else {
            break; // nothing fits under the cap any more
        };
        in_block0[v as usize] = true;
        grown += g.node_weight(v);
        assigned += 1;
        for (t, w) in g.neighbors(v) {
            let tu = t as usize;
            if !in_block0[tu] {
                gain[tu] += 2 * w;
                heap.push((gain[tu], Reverse(t)));
            }
        }
    }

    let mut weights = [0 as Weight; 2];
    let assignment: Vec<u32> = (0..n)
        .map(|v| {
            let b = if in_block0[v] { 0u32 } else { 1u32 };
            weights[b as usize] += g.node_weight(v as NodeId);
            b
        })
        .collect();
    Partition::from_parts_unchecked(assignment, weights.to_vec())
}

/// `ceil(total * num / den)` without intermediate overflow.
fn ceil_share(total: Weight, num: usize, den: usize) -> Weight {
    let t = total as i128 * num as i128;
    ((t + den as i128 - 1) / den as i128) as Weight
}

/// Weight cap for a bisection side that stands in for `k_side` of the
/// final blocks (its parent subproblem stands for `k_parent`).
///
/// A side that is itself a final block gets exactly the global block cap.
/// An internal side gets the slice of the tolerance budget its own splits
/// will not need: multipliers of `(1 + eps)^(depth consumed / total depth)`
/// telescope to at most `1 + eps` along every root-to-leaf path, so no
/// block can exceed the global cap through compounding.
fn side_cap(k_parent: usize, k_side: usize, perfect: Weight, spec: &BalanceSpec) -> Weight {
    debug_assert!(k_side >= 1 && k_side < k_parent);
    if k_side == 1 {
        return spec.weight_cap();
    }
    let total_depth = (spec.k as f64).log2().ceil().max(1.0);
    let consumed = (k_parent as f64).log2().ceil() - (k_side as f64).log2().ceil();
    let factor = (1.0 + spec.epsilon).powf(consumed / total_depth);
    (factor * perfect as f64 + 1e-9).floor() as Weight
}

/// Recursive bisection into `spec.k` blocks, ids `0..k`. Subproblem side
/// targets are proportional to the block counts each side will receive.
pub fn recursive_bipartition(g: &Graph, spec: &BalanceSpec, rounds: usize, seed: u64) -> Partition {
    let mut assignment = vec![0u32; g.node_count()];
    if spec.k > 1 {
        let ids: Vec<NodeId> = (0..g.node_count() as NodeId).collect();
        recurse(g, &ids, spec.k, 0, spec, rounds, seed, &mut assignment);
    }
    Partition::from_assignment(g, assignment, spec.k).expect("assignment is in range")
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    sub: &Graph,
    orig: &[NodeId],
    k: usize,
    offset: u32,
    spec: &BalanceSpec,
    rounds: usize,
    seed: u64,
    out: &mut [u32],
) {
    if k == 1 {
        for &o in orig {
            out[o as usize] = offset;
        }
        return;
    }
    let k_l = k.div_ceil(2);
    let k_r = k / 2;
    let total = sub.total_node_weight();
    let perfect = (ceil_share(total, k_l, k), ceil_share(total, k_r, k));
    let caps = (
        side_cap(k, k_l, perfect.0, spec),
        side_cap(k, k_r, perfect.1, spec),
    );
    let p = bipartition(sub, perfect, caps, rounds, derive_seed(seed, 0));

    let mut left: Vec<NodeId> = Vec::new();
    let mut right: Vec<NodeId> = Vec::new();
    for v in 0..sub.node_count() as NodeId {
        if p.block_of(v) == 0 {
            left.push(v);
        } else {
            right.push(v);
        }
    }
    for (side, sub_k, sub_offset, tag) in [
        (&left, k_l, offset, 1u64),
        (&right, k_r, offset + k_l as u32, 2u64),
    ] {
        let child_seed = derive_seed(seed, tag);
        if sub_k == 1 {
            for &v in side.iter() {
                out[orig[v as usize] as usize] = sub_offset;
            }
        } else {
            let (child, child_orig) = induced(sub, side, orig);
            recurse(
                &child,
                &child_orig,
                sub_k,
                sub_offset,
                spec,
                rounds,
                child_seed,
                out,
            );
        }
    }
}

/// Induced subgraph over `nodes` (ascending ids). Returns the subgraph and
/// the original-graph id of each new node. Relabeling is monotone, so
/// neighbor lists stay sorted.
fn induced(g: &Graph, nodes: &[NodeId], orig: &[NodeId]) -> (Graph, Vec<NodeId>) {
    let mut new_id = vec![u32::MAX; g.node_count()];
    for (i, &v) in nodes.iter().enumerate() {
        new_id[v as usize] = i as u32;
    }
    let mut offsets = Vec::with_capacity(nodes.len() + 1);
    offsets.push(0usize);
    let mut targets = Vec::new();
    let mut weights = Vec::new();
    let mut node_weights = Vec::with_capacity(nodes.len());
    let mut child_orig = Vec::with_capacity(nodes.len());
    for &v in nodes {
        for (t, w) in g.neighbors(v) {
            let nt = new_id[t as usize];
            if nt != u32::MAX {
                targets.push(nt);
                weights.push(w);
            }
        }
        offsets.push(targets.len());
        node_weights.push(g.node_weight(v));
        child_orig.push(orig[v as usize]);
    }
    (
        Graph::from_sorted_adjacency(offsets, targets, weights, node_weights),
        child_orig,
    )
}

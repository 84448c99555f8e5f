use serde::Serialize;

use super::is_subset;
use crate::error::{Error, Result};
use crate::gf2::{kernel_basis_dense, BitVec};
use crate::graph::FactorGraph;

/// Largest kernel dimension the exhaustive method will enumerate.
pub const EXHAUSTIVE_MAX_DIM: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowWeightMethod {
    /// Every kernel vector is enumerated and filtered for minimality.
    Exhaustive,
    /// Simple cycles through degree-2 variables, viewed as edges between
    /// their two checks.
    Cycles,
}

/// Components with at most this many independent cycles are searched for
/// every simple cycle; larger ones only contribute fundamental cycles.
const CYCLE_ENUM_MAX: usize = 16;

/// Minimal nonzero solutions of weight at most `ell` of a 2-core, as sorted
/// supports ordered by (weight, support).
pub fn minimal_low_weight(core: &FactorGraph, ell: usize, method: LowWeightMethod) -> Result<Vec<Vec<usize>>> {
    if let Some(v) = (0..core.num_vars()).find(|&v| core.var_degree(v) < 2) {
        return Err(Error::NotACore(format!(
            "variable {v} has degree {}",
            core.var_degree(v)
        )));
    }
    if ell == 0 {
        return Ok(Vec::new());
    }
    let mut out = match method {
        LowWeightMethod::Exhaustive => exhaustive(core, ell)?,
        LowWeightMethod::Cycles => cycles(core, ell),
    };
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    for v in &out {
        if !core.syndrome(v).is_empty() {
            return Err(Error::InvariantViolation(format!("low-weight vector {v:?} is not a solution")));
        }
    }
    if method == LowWeightMethod::Cycles {
        for (i, a) in out.iter().enumerate() {
            if out[..i].iter().any(|b| b.len() < a.len() && is_subset(b, a)) {
                return Err(Error::InvariantViolation(format!("cycle {a:?} is not minimal")));
            }
        }
    }
    Ok(out)
}

fn exhaustive(core: &FactorGraph, ell: usize) -> Result<Vec<Vec<usize>>> {
    let kb = kernel_basis_dense(&core.to_bitmatrix());
    if kb.dim > EXHAUSTIVE_MAX_DIM {
        return Err(Error::TooLarge(format!(
            "core kernel dimension {} exceeds {EXHAUSTIVE_MAX_DIM}",
            kb.dim
        )));
    }
    let mut candidates: Vec<BitVec> = Vec::new();
    let mut x = BitVec::zeros(core.num_vars());
    for i in 1u64..(1u64 << kb.dim) {
        x.xor_assign(&kb.vectors[i.trailing_zeros() as usize]);
        if x.count_ones() <= ell {
            candidates.push(x.clone());
        }
    }
    candidates.sort_by_key(BitVec::count_ones);
    let mut kept: Vec<BitVec> = Vec::new();
    for c in candidates {
        if !kept.iter().any(|k| k.is_subset_of(&c)) {
            kept.push(c);
        }
    }
    Ok(kept.iter().map(BitVec::support).collect())
}

fn cycles(core: &FactorGraph, ell: usize) -> Vec<Vec<usize>> {
    let m = core.num_checks();
    let mut out = Vec::new();
    // degree-2 variables as edges between checks
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    for v in (0..core.num_vars()).filter(|&v| core.var_degree(v) == 2) {
        let es = core.var_edges(v);
        let (a, b) = (core.edge_check(es[0]), core.edge_check(es[1]));
        if a == b {
            out.push(vec![v]);
        } else {
            edges.push((v, a, b));
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (i, &(_, a, b)) in edges.iter().enumerate() {
        adj[a].push(i);
        adj[b].push(i);
    }

    let mut comp_of = vec![usize::MAX; m];
    for root in 0..m {
        if comp_of[root] != usize::MAX || adj[root].is_empty() {
            continue;
        }
        // BFS spanning tree over this component
        let mut verts = vec![root];
        let mut parent_edge = vec![usize::MAX; 1];
        let mut depth = vec![0usize; 1];
        let mut local = std::collections::HashMap::from([(root, 0usize)]);
        comp_of[root] = root;
        let mut comp_edges = Vec::new();
        let mut head = 0;
        while head < verts.len() {
            let a = verts[head];
            for &i in &adj[a] {
                let (_, x, y) = edges[i];
                let other = if x == a { y } else { x };
                if comp_of[other] == usize::MAX {
                    comp_of[other] = root;
                    local.insert(other, verts.len());
                    verts.push(other);
                    parent_edge.push(i);
                    depth.push(depth[head] + 1);
                }
                if x == a {
                    comp_edges.push(i);
                }
            }
            head += 1;
        }
        let tree: std::collections::HashSet<usize> = parent_edge[1..].iter().copied().collect();
        let nontree: Vec<usize> = comp_edges.iter().copied().filter(|i| !tree.contains(i)).collect();
        if nontree.is_empty() {
            continue;
        }
        let edge_local: std::collections::HashMap<usize, usize> =
            comp_edges.iter().enumerate().map(|(j, &i)| (i, j)).collect();
        let fundamental: Vec<BitVec> = nontree
            .iter()
            .map(|&i| {
                let mut bits = BitVec::zeros(comp_edges.len());
                bits.flip(edge_local[&i]);
                let (_, x, y) = edges[i];
                let (mut p, mut q) = (local[&x], local[&y]);
                while p != q {
                    if depth[p] >= depth[q] {
                        let e = parent_edge[p];
                        bits.flip(edge_local[&e]);
                        let (_, s, t) = edges[e];
                        p = local[&if verts[p] == s { t } else { s }];
                    } else {
                        let e = parent_edge[q];
                        bits.flip(edge_local[&e]);
                        let (_, s, t) = edges[e];
                        q = local[&if verts[q] == s { t } else { s }];
                    }
                }
                bits
            })
            .collect();
        let to_support = |bits: &BitVec| -> Vec<usize> {
            let mut s: Vec<usize> = bits.iter_ones().map(|j| edges[comp_edges[j]].0).collect();
            s.sort_unstable();
            s
        };
        if fundamental.len() <= CYCLE_ENUM_MAX {
            let mut x = BitVec::zeros(comp_edges.len());
            for i in 1u64..(1u64 << fundamental.len()) {
                x.xor_assign(&fundamental[i.trailing_zeros() as usize]);
                if x.count_ones() <= ell && is_simple_cycle(&x, &comp_edges, &edges, &local) {
                    out.push(to_support(&x));
                }
            }
        } else {
            out.extend(fundamental.iter().filter(|c| c.count_ones() <= ell).map(to_support));
        }
    }
    out
}

/// An even edge set is a single simple cycle when every touched vertex has
/// degree exactly 2 and the edges are connected.
fn is_simple_cycle(
    x: &BitVec,
    comp_edges: &[usize],
    edges: &[(usize, usize, usize)],
    local: &std::collections::HashMap<usize, usize>,
) -> bool {
    let chosen: Vec<(usize, usize)> = x
        .iter_ones()
        .map(|j| {
            let (_, a, b) = edges[comp_edges[j]];
            (local[&a], local[&b])
        })
        .collect();
    let mut deg: std::collections::HashMap<usize, Vec<usize>> = std::collections::HashMap::new();
    for (j, &(a, b)) in chosen.iter().enumerate() {
        deg.entry(a).or_default().push(j);
        deg.entry(b).or_default().push(j);
    }
    if deg.values().any(|es| es.len() != 2) {
        return false;
    }
    // walk the cycle from the first edge
    let (start, mut at) = chosen[0];
    let mut prev = 0;
    let mut steps = 1;
    while at != start {
        let es = &deg[&at];
        let next = if es[0] == prev { es[1] } else { es[0] };
        let (a, b) = chosen[next];
        at = if a == at { b } else { a };
        prev = next;
        steps += 1;
    }
    steps == chosen.len()
}

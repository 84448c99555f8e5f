use std::collections::BinaryHeap;

use super::{BasisKind, Certificate, SparseBasis};
use crate::error::{Error, Result};
use crate::graph::collapse;
use crate::graph::FactorGraph;
use crate::peel::peel;

/// Kernel basis of a peelable graph with one vector per free supernode of the
/// collapsed graph. Each vector is obtained by setting its free supernode to
/// one, the other free supernodes to zero, and back-substituting only through
/// the checks it actually reaches, latest peeled first.
pub fn sparse_basis_no_core(g: &FactorGraph) -> Result<SparseBasis> {
    let trace = peel(g);
    if !trace.is_peelable() {
        return Err(Error::HasCore(trace.core_checks().len()));
    }
    let cg = collapse(g);
    let star = peel(&cg.graph);
    if !star.is_peelable() {
        return Err(Error::InvariantViolation("collapsed graph is not peelable".into()));
    }
    let gs = &cg.graph;
    let (ns, ms) = (gs.num_vars(), gs.num_checks());
    let order = star.check_order();
    let mut pos = vec![0usize; ms];
    let mut dep = vec![usize::MAX; ms];
    for (i, (&a, &u)) in order.iter().zip(star.dependent_vars()).enumerate() {
        pos[a] = i;
        dep[a] = u;
    }

    let mut on = vec![false; ns];
    let mut queued = vec![false; ms];
    let mut heap = BinaryHeap::new();
    let mut touched = Vec::new();
    let mut vectors = Vec::with_capacity(star.free_vars().len());
    let enqueue = |x: usize, heap: &mut BinaryHeap<usize>, queued: &mut [bool], touched: &mut Vec<usize>| {
        for &e in gs.var_edges(x) {
            let a = gs.edge_check(e);
            if !queued[a] {
                queued[a] = true;
                touched.push(a);
                heap.push(pos[a]);
            }
        }
    };
    for &w in star.free_vars() {
        let mut support = vec![w];
        on[w] = true;
        enqueue(w, &mut heap, &mut queued, &mut touched);
        while let Some(p) = heap.pop() {
            let a = order[p];
            let u = dep[a];
            let odd = gs.check(a).iter().filter(|&&x| x != u && on[x]).count() % 2 == 1;
            if odd {
                debug_assert!(!on[u]);
                on[u] = true;
                support.push(u);
                enqueue(u, &mut heap, &mut queued, &mut touched);
            }
        }
        for &x in &support {
            on[x] = false;
        }
        for a in touched.drain(..) {
            queued[a] = false;
        }
        let lifted = cg.lift(&support);
        let bad = g.syndrome(&lifted);
        if !bad.is_empty() {
            return Err(Error::InvariantViolation(format!(
                "basis vector for supernode {w} violates check {}",
                bad[0]
            )));
        }
        vectors.push(lifted);
    }
    if vectors.len() + g.num_checks() != g.num_vars() {
        return Err(Error::InvariantViolation(format!(
            "{} basis vectors for {} variables and {} checks",
            vectors.len(),
            g.num_vars(),
            g.num_checks()
        )));
    }
    let mut basis = SparseBasis::new(g.num_vars(), vectors, BasisKind::NoCore);
    basis.certificate = Some(Certificate {
        halting_time: star.halting_time(),
        roots: star.free_vars().to_vec(),
    });
    Ok(basis)
}

/// Ball-mass bound for each vector of a no-core basis of `g`: the number of
/// original variables within the peeling time of the vector's root in the
/// collapsed graph. Also checks that each vector actually fits its bound.
pub fn certificate_bounds(g: &FactorGraph, basis: &SparseBasis) -> Result<Vec<usize>> {
    let cert = basis.certificate.as_ref().ok_or_else(|| {
        Error::InvalidCertificate("basis carries no ball certificate".into())
    })?;
    let cg = collapse(g);
    let mut bounds = Vec::with_capacity(cert.roots.len());
    for (v, &root) in basis.vectors.iter().zip(&cert.roots) {
        let bound = cg.ball_mass(root, cert.halting_time);
        if v.len() > bound {
            return Err(Error::InvalidCertificate(format!(
                "vector rooted at supernode {root} has weight {} above its ball bound {bound}",
                v.len()
            )));
        }
        bounds.push(bound);
    }
    Ok(bounds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{kernel_basis_dense, rank, Echelon};
    use crate::graph::{generate_uniform, Provenance};

    fn graph(n: usize, checks: &[&[usize]]) -> FactorGraph {
        FactorGraph::from_checks(n, checks.iter().map(|c| c.to_vec()).collect(), Provenance::derived())
            .unwrap()
    }

    fn same_span(g: &FactorGraph, basis: &SparseBasis) {
        let dense = kernel_basis_dense(&g.to_bitmatrix());
        let mut ours = Echelon::new(g.num_vars());
        for v in basis.to_bitvecs() {
            assert!(ours.insert(&v), "dependent basis");
        }
        assert_eq!(ours.rank(), dense.dim);
        for v in &dense.vectors {
            assert!(ours.contains(v));
        }
    }

    #[test]
    fn single_check() {
        let g = graph(3, &[&[0, 1, 2]]);
        let b = sparse_basis_no_core(&g).unwrap();
        assert_eq!(b.dim(), 2);
        assert!(b.s <= 2);
        same_span(&g, &b);
    }

    #[test]
    fn degree_two_check_is_collapsed() {
        let g = graph(4, &[&[0, 1], &[0, 2, 3]]);
        let b = sparse_basis_no_core(&g).unwrap();
        assert_eq!(b.dim(), 2);
        same_span(&g, &b);
        for v in &b.vectors {
            assert!(g.satisfies(v));
            assert_eq!(v.contains(&0), v.contains(&1));
        }
        let bounds = certificate_bounds(&g, &b).unwrap();
        assert_eq!(bounds.len(), 2);
    }

    #[test]
    fn core_is_rejected() {
        let g = graph(3, &[&[0, 1, 2], &[0, 1, 2]]);
        assert!(matches!(sparse_basis_no_core(&g), Err(Error::HasCore(2))));
    }

    #[test]
    fn random_peelable_instances_match_dense_kernel() {
        let mut tried = 0;
        for seed in 0..80u64 {
            let n = 30 + (seed as usize % 4) * 10;
            let g = generate_uniform(n, 3, n * 6 / 10, seed).unwrap();
            if !peel(&g).is_peelable() {
                continue;
            }
            tried += 1;
            let b = sparse_basis_no_core(&g).unwrap();
            assert_eq!(b.dim(), n - rank(&g.to_bitmatrix()));
            same_span(&g, &b);
            certificate_bounds(&g, &b).unwrap();
        }
        assert!(tried > 40);
    }

    #[test]
    fn empty_graph_gives_identity() {
        let g = graph(3, &[]);
        let b = sparse_basis_no_core(&g).unwrap();
        assert_eq!(b.vectors, vec![vec![0], vec![1], vec![2]]);
    }
}

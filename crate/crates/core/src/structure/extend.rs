use std::collections::HashMap;
use std::rc::Rc;

use super::{sym_diff, ClusterParams};
use crate::bp::{bp_zero_fixed_point, BpTrace};
use crate::error::{Error, Result};
use crate::graph::FactorGraph;
use crate::peel::Decomposition;

/// Extends core solutions to full solutions by flipping witness sets outside
/// the core. Witnesses are read off the change times of an all-zero BP run:
/// a variable-to-check ★ that appeared at iteration t is explained by ★
/// messages that appeared by t − 1 at each of the variable's other checks.
/// Witnesses are memoised per edge, so one extender serves many core
/// solutions on the same graph.
pub struct Extender<'g> {
    g: &'g FactorGraph,
    in_core_var: Vec<bool>,
    in_core_check: Vec<bool>,
    bp: BpTrace,
    depth: usize,
    memo: HashMap<usize, Rc<Vec<usize>>>,
}

impl<'g> Extender<'g> {
    pub fn new(g: &'g FactorGraph, d: &Decomposition, depth: usize) -> Self {
        let mut in_core_var = vec![false; g.num_vars()];
        for &v in &d.core_vars {
            in_core_var[v] = true;
        }
        let mut in_core_check = vec![false; g.num_checks()];
        for &a in &d.core_checks {
            in_core_check[a] = true;
        }
        Extender { g, in_core_var, in_core_check, bp: bp_zero_fixed_point(g), depth, memo: HashMap::new() }
    }

    /// Full solution agreeing with `x_c` (sorted core variables) on the core.
    pub fn extend(&mut self, x_c: &[usize]) -> Result<Vec<usize>> {
        if let Some(&v) = x_c.iter().find(|&&v| v >= self.g.num_vars() || !self.in_core_var[v]) {
            return Err(Error::InvalidParameters(format!("variable {v} is not in the core")));
        }
        let marked = self.g.syndrome(x_c);
        if let Some(&a) = marked.iter().find(|&&a| self.in_core_check[a]) {
            return Err(Error::InvalidParameters(format!("core check {a} is violated")));
        }
        let mut x = x_c.to_vec();
        for a in marked {
            let e = self
                .g
                .check_edges(a)
                .filter_map(|e| self.bp.nu_change(e).map(|t| (t, e)))
                .filter(|&(t, _)| t <= self.depth)
                .min()
                .map(|(_, e)| e)
                .ok_or(Error::WitnessNotFound { check: a, depth: self.depth })?;
            let w = self.witness(e);
            x = sym_diff(&x, &w);
        }
        let bad = self.g.syndrome(&x);
        if !bad.is_empty() {
            return Err(Error::InvariantViolation(format!("extension violates check {}", bad[0])));
        }
        let core_part: Vec<usize> = x.iter().copied().filter(|&v| self.in_core_var[v]).collect();
        if core_part != x_c {
            return Err(Error::InvariantViolation("extension changed the core assignment".into()));
        }
        Ok(x)
    }

    /// Variables whose joint flip toggles exactly the check of edge `e`.
    fn witness(&mut self, e: usize) -> Rc<Vec<usize>> {
        if let Some(w) = self.memo.get(&e) {
            return Rc::clone(w);
        }
        let g = self.g;
        let t = self.bp.nu_change(e).expect("witness edge carries a star");
        let v = g.edge_var(e);
        let mut out = vec![v];
        for &other in g.var_edges(v).iter().filter(|&&f| f != e) {
            let b = g.edge_check(other);
            let (_, f) = g
                .check_edges(b)
                .filter(|&f| f != other)
                .filter_map(|f| self.bp.nu_change(f).map(|s| (s, f)))
                .filter(|&(s, _)| s < t)
                .min()
                .expect("a star into a variable is backed by an earlier star");
            let sub = self.witness(f);
            out = sym_diff(&out, &sub);
        }
        let out = Rc::new(out);
        self.memo.insert(e, Rc::clone(&out));
        out
    }
}

/// One-off extension of a core solution; see [`Extender`].
pub fn sparse_extension(
    g: &FactorGraph,
    d: &Decomposition,
    x_c: &[usize],
    params: &ClusterParams,
) -> Result<Vec<usize>> {
    Extender::new(g, d, params.witness_depth).extend(x_c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_uniform, Provenance};
    use crate::peel::decompose;
    use crate::structure::{minimal_low_weight, LowWeightMethod};

    fn graph(n: usize, checks: &[&[usize]]) -> FactorGraph {
        FactorGraph::from_checks(n, checks.iter().map(|c| c.to_vec()).collect(), Provenance::derived())
            .unwrap()
    }

    fn params() -> ClusterParams {
        ClusterParams { weight_cutoff: 3, witness_depth: 6, brute_step: None }
    }

    #[test]
    fn zero_extends_to_zero() {
        let g = graph(5, &[&[0, 1, 2], &[0, 1, 2], &[0, 3, 4]]);
        let d = decompose(&g).unwrap();
        assert!(sparse_extension(&g, &d, &[], &params()).unwrap().is_empty());
    }

    #[test]
    fn hand_instance_uses_one_witness() {
        let g = graph(5, &[&[0, 1, 2], &[0, 1, 2], &[0, 3, 4]]);
        let d = decompose(&g).unwrap();
        assert_eq!(d.core_vars, vec![0, 1, 2]);
        let x = sparse_extension(&g, &d, &[0, 1], &params()).unwrap();
        assert_eq!(x.len(), 3);
        assert!(x == vec![0, 1, 3] || x == vec![0, 1, 4]);
        assert!(g.satisfies(&x));
        // 011 does not touch the outside check
        assert_eq!(sparse_extension(&g, &d, &[1, 2], &params()).unwrap(), vec![1, 2]);
    }

    #[test]
    fn bad_inputs() {
        let g = graph(5, &[&[0, 1, 2], &[0, 1, 2], &[0, 3, 4]]);
        let d = decompose(&g).unwrap();
        assert!(matches!(
            sparse_extension(&g, &d, &[3], &params()),
            Err(Error::InvalidParameters(_))
        ));
        assert!(matches!(
            sparse_extension(&g, &d, &[0], &params()),
            Err(Error::InvalidParameters(_))
        ));
    }

    #[test]
    fn depth_limit_reports_missing_witness() {
        // the outside check only sees a long chain of degree-2 variables
        let g = graph(8, &[&[0, 1, 2], &[0, 1, 2], &[0, 3, 4], &[3, 5], &[4, 6], &[5, 6, 7]]);
        let d = decompose(&g).unwrap();
        let shallow = ClusterParams { witness_depth: 1, ..params() };
        match sparse_extension(&g, &d, &[0, 1], &shallow) {
            Err(Error::WitnessNotFound { check: 2, depth: 1 }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let deep = ClusterParams { witness_depth: 3, ..params() };
        assert_eq!(sparse_extension(&g, &d, &[0, 1], &deep).unwrap(), vec![0, 1, 3, 5, 7]);
    }

    #[test]
    fn random_cores_extend() {
        let mut done = 0;
        for seed in 0..30u64 {
            let g = generate_uniform(300, 3, 280, seed).unwrap();
            let d = decompose(&g).unwrap();
            if !d.has_core() {
                continue;
            }
            let core = d.core(&g);
            let lc = minimal_low_weight(&core.graph, 40, LowWeightMethod::Cycles).unwrap();
            let mut ext = Extender::new(&g, &d, 64);
            for v in &lc {
                let x_c = core.lift(v);
                let x = ext.extend(&x_c).unwrap();
                assert!(g.satisfies(&x));
                done += 1;
            }
        }
        assert!(done > 0);
    }
}

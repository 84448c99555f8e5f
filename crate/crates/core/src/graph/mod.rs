//! Factor graphs of XORSAT instances, random ensembles, the collapse
//! operator over degree-2 checks, and the text instance format.

mod collapse;
mod generate;
mod io;

pub use collapse::{collapse, CollapsedGraph};
pub use generate::{
    derive_seed, generate_configuration, generate_degree_constrained, generate_uniform,
};
pub use io::{read_instance, write_instance, XorInstance};

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// Where a graph came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    Uniform,
    DegreeConstrained,
    Configuration,
    File,
    Derived,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub ensemble: Ensemble,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn derived() -> Self {
        Provenance { ensemble: Ensemble::Derived, seed: None }
    }
}

/// Bipartite incidence structure between `n` variables and `m` checks.
///
/// Edges are numbered check by check: edge `e` of check `a` sits at
/// `check_offsets[a] + slot`. Each check's variables are stored sorted, so a
/// variable repeated inside a check (configuration model only) occupies
/// adjacent slots. Parity-check entries are edge multiplicities mod 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorGraph {
    n: usize,
    k: usize,
    check_offsets: Vec<usize>,
    edge_var: Vec<usize>,
    edge_check: Vec<usize>,
    var_offsets: Vec<usize>,
    var_edges: Vec<usize>,
    multigraph: bool,
    provenance: Provenance,
}

impl FactorGraph {
    /// Builds a graph from check neighborhoods. Each check is sorted; repeated
    /// variables inside a check set the multigraph flag.
    pub fn from_checks(n: usize, checks: Vec<Vec<usize>>, provenance: Provenance) -> Result<Self> {
        let mut check_offsets = Vec::with_capacity(checks.len() + 1);
        check_offsets.push(0);
        let mut edge_var = Vec::with_capacity(checks.iter().map(Vec::len).sum());
        let mut edge_check = Vec::with_capacity(edge_var.capacity());
        let mut multigraph = false;
        let mut k = 0;
        for (a, mut c) in checks.into_iter().enumerate() {
            c.sort_unstable();
            if let Some(&v) = c.iter().find(|&&v| v >= n) {
                return Err(Error::InvalidParameters(format!(
                    "check {a} uses variable {v} but n = {n}"
                )));
            }
            multigraph |= c.windows(2).any(|w| w[0] == w[1]);
            k = k.max(c.len());
            edge_check.extend(std::iter::repeat(a).take(c.len()));
            edge_var.extend(c);
            check_offsets.push(edge_var.len());
        }
        let mut var_offsets = vec![0usize; n + 1];
        for &v in &edge_var {
            var_offsets[v + 1] += 1;
        }
        for v in 0..n {
            var_offsets[v + 1] += var_offsets[v];
        }
        let mut fill = var_offsets.clone();
        let mut var_edges = vec![0usize; edge_var.len()];
        for (e, &v) in edge_var.iter().enumerate() {
            var_edges[fill[v]] = e;
            fill[v] += 1;
        }
        Ok(FactorGraph {
            n,
            k,
            check_offsets,
            edge_var,
            edge_check,
            var_offsets,
            var_edges,
            multigraph,
            provenance,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_checks(&self) -> usize {
        self.check_offsets.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.edge_var.len()
    }

    /// Largest check degree (0 for a graph without checks).
    pub fn max_check_degree(&self) -> usize {
        self.k
    }

    pub fn is_multigraph(&self) -> bool {
        self.multigraph
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Sorted variable list of check `a`.
    pub fn check(&self, a: usize) -> &[usize] {
        &self.edge_var[self.check_offsets[a]..self.check_offsets[a + 1]]
    }

    pub fn checks(&self) -> impl Iterator<Item = &[usize]> + '_ {
        (0..self.num_checks()).map(move |a| self.check(a))
    }

    pub fn check_degree(&self, a: usize) -> usize {
        self.check_offsets[a + 1] - self.check_offsets[a]
    }

    /// Edge ids of check `a`, in slot order.
    pub fn check_edges(&self, a: usize) -> std::ops::Range<usize> {
        self.check_offsets[a]..self.check_offsets[a + 1]
    }

    /// Edge ids incident to variable `v`, ascending (hence by check).
    pub fn var_edges(&self, v: usize) -> &[usize] {
        &self.var_edges[self.var_offsets[v]..self.var_offsets[v + 1]]
    }

    pub fn var_degree(&self, v: usize) -> usize {
        self.var_offsets[v + 1] - self.var_offsets[v]
    }

    pub fn edge_var(&self, e: usize) -> usize {
        self.edge_var[e]
    }

    pub fn edge_check(&self, e: usize) -> usize {
        self.edge_check[e]
    }

    pub fn edge_slot(&self, e: usize) -> usize {
        e - self.check_offsets[self.edge_check[e]]
    }

    /// Incident `(check, slot)` pairs of variable `v`.
    pub fn adjacency(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.var_edges(v).iter().map(move |&e| (self.edge_check(e), self.edge_slot(e)))
    }

    /// The parity-check matrix, entries taken mod 2.
    pub fn to_bitmatrix(&self) -> BitMatrix {
        let mut h = BitMatrix::zeros(self.num_checks(), self.n);
        for a in 0..self.num_checks() {
            for &v in self.check(a) {
                h.flip(a, v);
            }
        }
        h
    }

    /// True when `x` (a variable support, any order, no repeats) satisfies
    /// every check.
    pub fn satisfies(&self, support: &[usize]) -> bool {
        let mut mark = vec![false; self.n];
        for &v in support {
            mark[v] ^= true;
        }
        (0..self.num_checks()).all(|a| self.check(a).iter().filter(|&&v| mark[v]).count() % 2 == 0)
    }

    /// Checks violated by the assignment with ones at `support` (sorted,
    /// repeats cancel). Cost is linear in the degrees of the support.
    pub fn syndrome(&self, support: &[usize]) -> Vec<usize> {
        let mut parity: HashMap<usize, bool> = HashMap::new();
        for &v in support {
            for &e in self.var_edges(v) {
                *parity.entry(self.edge_check(e)).or_insert(false) ^= true;
            }
        }
        let mut out: Vec<usize> = parity.into_iter().filter(|&(_, odd)| odd).map(|(a, _)| a).collect();
        out.sort_unstable();
        out
    }

    /// Subgraph keeping the listed checks and variables (both sorted), with
    /// each check cut down to the kept variables.
    pub fn restrict(&self, checks: &[usize], vars: &[usize]) -> Subgraph {
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in vars.iter().enumerate() {
            local[v] = i;
        }
        let lists: Vec<Vec<usize>> = checks
            .iter()
            .map(|&a| {
                self.check(a)
                    .iter()
                    .filter(|&&v| local[v] != usize::MAX)
                    .map(|&v| local[v])
                    .collect()
            })
            .collect();
        let graph = FactorGraph::from_checks(vars.len(), lists, Provenance::derived())
            .expect("restricted indices are in range");
        Subgraph { graph, vars: vars.to_vec(), checks: checks.to_vec() }
    }

    /// Check-induced subgraph: the listed checks and every variable they touch.
    pub fn induced_by_checks(&self, checks: &[usize]) -> Subgraph {
        let mut seen = vec![false; self.n];
        for &a in checks {
            for &v in self.check(a) {
                seen[v] = true;
            }
        }
        let vars: Vec<usize> = (0..self.n).filter(|&v| seen[v]).collect();
        self.restrict(checks, &vars)
    }
}

/// A subgraph together with the maps from its local indices to the parent's.
#[derive(Clone, Debug)]
pub struct Subgraph {
    pub graph: FactorGraph,
    pub vars: Vec<usize>,
    pub checks: Vec<usize>,
}

impl Subgraph {
    /// Maps a local variable support to parent indices.
    pub fn lift(&self, support: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = support.iter().map(|&i| self.vars[i]).collect();
        out.sort_unstable();
        out
    }
}

/// Check-degree counts `counts[l]` for `l = 0..=max degree`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    counts: Vec<usize>,
}

impl DegreeProfile {
    pub fn from_counts(counts: Vec<usize>) -> Result<Self> {
        if counts.iter().sum::<usize>() == 0 {
            return Err(Error::EmptyProfile);
        }
        let mut counts = counts;
        while counts.last() == Some(&0) {
            counts.pop();
        }
        Ok(DegreeProfile { counts })
    }

    /// Scales fractions to `m` checks; every `m * R_l` must be an integer.
    pub fn from_fractions(fractions: &[f64], m: usize) -> Result<Self> {
        let total: f64 = fractions.iter().sum();
        if (total - 1.0).abs() > 1e-12 || fractions.iter().any(|&r| r < 0.0) {
            return Err(Error::InvalidProfile(format!("fractions sum to {total}, not 1")));
        }
        let mut counts = Vec::with_capacity(fractions.len());
        for (l, &r) in fractions.iter().enumerate() {
            let x = r * m as f64;
            let c = x.round();
            if (x - c).abs() > 1e-9 {
                return Err(Error::InvalidProfile(format!("m * R_{l} = {x} is not an integer")));
            }
            counts.push(c as usize);
        }
        if counts.iter().sum::<usize>() != m {
            return Err(Error::InvalidProfile("counts do not add up to m".into()));
        }
        DegreeProfile::from_counts(counts)
    }

    /// The `k`-regular profile with `m` checks.
    pub fn regular(k: usize, m: usize) -> Result<Self> {
        let mut counts = vec![0; k + 1];
        counts[k] = m;
        DegreeProfile::from_counts(counts)
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn num_checks(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn max_degree(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn fraction(&self, l: usize) -> f64 {
        self.counts.get(l).map_or(0.0, |&c| c as f64 / self.num_checks() as f64)
    }

    /// `R_0, ..., R_k`.
    pub fn fractions(&self) -> Vec<f64> {
        (0..self.counts.len()).map(|l| self.fraction(l)).collect()
    }

    /// Degrees in canonical order: all degree-0 checks, then degree-1, ...
    pub(crate) fn degree_sequence(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(l, &c)| std::iter::repeat(l).take(c))
            .collect()
    }
}

pub fn degree_profile_of(g: &FactorGraph) -> Result<DegreeProfile> {
    let mut counts = vec![0usize; g.max_check_degree() + 1];
    for a in 0..g.num_checks() {
        counts[g.check_degree(a)] += 1;
    }
    DegreeProfile::from_counts(counts)
}

/// Variables within distance `t` of `v`, where each traversed check counts
/// one step. Returned sorted.
pub fn ball(g: &FactorGraph, v: usize, t: usize) -> Vec<usize> {
    let mut dist: HashMap<usize, usize> = HashMap::from([(v, 0)]);
    let mut check_seen: HashSet<usize> = HashSet::new();
    let mut queue = VecDeque::from([v]);
    while let Some(u) = queue.pop_front() {
        let du = dist[&u];
        if du == t {
            continue;
        }
        for &e in g.var_edges(u) {
            if !check_seen.insert(g.edge_check(e)) {
                continue;
            }
            for &w in g.check(g.edge_check(e)) {
                if let std::collections::hash_map::Entry::Vacant(slot) = dist.entry(w) {
                    slot.insert(du + 1);
                    queue.push_back(w);
                }
            }
        }
    }
    let mut out: Vec<usize> = dist.into_keys().collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, checks: &[&[usize]]) -> FactorGraph {
        FactorGraph::from_checks(n, checks.iter().map(|c| c.to_vec()).collect(), Provenance::derived())
            .unwrap()
    }

    #[test]
    fn adjacency_is_transpose_of_checks() {
        let g = graph(5, &[&[2, 0, 1], &[2, 3, 4], &[4, 1]]);
        assert_eq!(g.check(0), &[0, 1, 2]);
        for v in 0..5 {
            for (a, slot) in g.adjacency(v) {
                assert_eq!(g.check(a)[slot], v);
            }
        }
        let total: usize = (0..5).map(|v| g.var_degree(v)).sum();
        assert_eq!(total, g.num_edges());
        assert_eq!(g.adjacency(2).collect::<Vec<_>>(), vec![(0, 2), (1, 0)]);
    }

    #[test]
    fn out_of_range_variable_is_rejected() {
        let err = FactorGraph::from_checks(3, vec![vec![0, 3]], Provenance::derived()).unwrap_err();
        assert_eq!(err.tag(), "invalid-parameters");
    }

    #[test]
    fn ball_examples() {
        let g = graph(3, &[&[0, 1, 2]]);
        assert_eq!(ball(&g, 0, 0), vec![0]);
        assert_eq!(ball(&g, 0, 1), vec![0, 1, 2]);
        let g = graph(5, &[&[0, 1, 2], &[2, 3, 4]]);
        assert_eq!(ball(&g, 0, 1), vec![0, 1, 2]);
        assert_eq!(ball(&g, 0, 2), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn profile_of_collapse_example() {
        let g = graph(4, &[&[0, 1], &[0, 2, 3]]);
        let p = degree_profile_of(&g).unwrap();
        assert_eq!(p.fractions(), vec![0.0, 0.0, 0.5, 0.5]);
        let empty = graph(10, &[]);
        assert_eq!(degree_profile_of(&empty).unwrap_err().tag(), "empty-profile");
    }

    #[test]
    fn profile_from_fractions_requires_integral_counts() {
        assert!(DegreeProfile::from_fractions(&[0.0, 0.0, 0.5, 0.5], 100).is_ok());
        let err = DegreeProfile::from_fractions(&[0.0, 0.0, 0.5, 0.5], 3).unwrap_err();
        assert_eq!(err.tag(), "invalid-profile");
    }

    #[test]
    fn restrict_maps_indices() {
        let g = graph(5, &[&[0, 1, 2], &[2, 3, 4]]);
        let sub = g.restrict(&[1], &[2, 3, 4]);
        assert_eq!(sub.graph.check(0), &[0, 1, 2]);
        assert_eq!(sub.lift(&[0, 2]), vec![2, 4]);
        let sub = g.induced_by_checks(&[0]);
        assert_eq!(sub.vars, vec![0, 1, 2]);
    }

    #[test]
    fn bitmatrix_reduces_multiplicities() {
        let g = FactorGraph::from_checks(2, vec![vec![0, 0, 1]], Provenance::derived()).unwrap();
        assert!(g.is_multigraph());
        let h = g.to_bitmatrix();
        assert!(!h.get(0, 0));
        assert!(h.get(0, 1));
    }
}

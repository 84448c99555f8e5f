//! Sparse kernel bases, minimal low-weight core solutions, cluster counting
//! and sparse extensions of core solutions to full solutions.

mod brute;
mod clusters;
mod extend;
mod lowweight;
mod nocore;

pub use brute::{brute_force_clusters, BruteClusters, BRUTE_MAX_DIM};
pub use clusters::{cluster_basis, cluster_partition, ClusterReport};
pub use extend::{sparse_extension, Extender};
pub use lowweight::{minimal_low_weight, LowWeightMethod, EXHAUSTIVE_MAX_DIM};
pub use nocore::{certificate_bounds, sparse_basis_no_core};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::BitVec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    NoCore,
    Periphery,
    Cluster,
}

/// Data for bounding each no-core basis vector by a ball mass in the
/// collapsed graph: vector `i` lies within `halting_time` hops of supernode
/// `roots[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub halting_time: usize,
    pub roots: Vec<usize>,
}

/// Kernel vectors stored as sorted supports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SparseBasis {
    pub n: usize,
    pub vectors: Vec<Vec<usize>>,
    /// Largest support size (0 for an empty basis).
    pub s: usize,
    pub kind: BasisKind,
    /// Number of leading vectors that extend core solutions; only nonzero for
    /// cluster bases.
    pub first_set: usize,
    pub certificate: Option<Certificate>,
}

impl SparseBasis {
    pub fn new(n: usize, vectors: Vec<Vec<usize>>, kind: BasisKind) -> Self {
        let s = vectors.iter().map(Vec::len).max().unwrap_or(0);
        SparseBasis { n, vectors, s, kind, first_set: 0, certificate: None }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn to_bitvecs(&self) -> Vec<BitVec> {
        self.vectors.iter().map(|v| BitVec::from_support(self.n, v)).collect()
    }

    /// One line per vector, sorted 1-indexed support.
    pub fn to_index_lines(&self) -> String {
        let mut out = String::new();
        for v in &self.vectors {
            let line: Vec<String> = v.iter().map(|i| (i + 1).to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Knobs for the cluster constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClusterParams {
    /// Largest weight of a core solution kept as a low-weight generator.
    pub weight_cutoff: usize,
    /// BP iterations allowed when looking for witnesses.
    pub witness_depth: usize,
    /// Hamming step for the brute-force clustering; `None` picks the
    /// sparsity of the cluster basis.
    pub brute_step: Option<usize>,
}

impl ClusterParams {
    /// ℓ = ⌈(log₂ n)²⌉ capped at n, T = ⌈log₂ log₂ n⌉ + 4.
    pub fn for_size(n: usize) -> Self {
        let lg = (n.max(2) as f64).log2();
        let ell = ((lg * lg).ceil() as usize).clamp(1, n.max(1));
        let depth = lg.log2().ceil().max(0.0) as usize + 4;
        ClusterParams { weight_cutoff: ell, witness_depth: depth, brute_step: None }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.weight_cutoff == 0 || self.witness_depth == 0 || self.brute_step == Some(0) {
            return Err(Error::InvalidParameters("cluster parameters must be positive".into()));
        }
        if self.weight_cutoff > n {
            return Err(Error::InvalidParameters(format!(
                "weight cutoff {} exceeds n = {n}",
                self.weight_cutoff
            )));
        }
        Ok(())
    }
}

/// Symmetric difference of two sorted supports.
pub(crate) fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// True when sorted `a` is a subset of sorted `b`.
pub(crate) fn is_subset(a: &[usize], b: &[usize]) -> bool {
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_helpers() {
        assert_eq!(sym_diff(&[1, 3, 5], &[3, 4]), vec![1, 4, 5]);
        assert_eq!(sym_diff(&[], &[2]), vec![2]);
        assert!(is_subset(&[1, 5], &[0, 1, 3, 5]));
        assert!(!is_subset(&[1, 2], &[0, 1, 3, 5]));
        assert!(is_subset(&[], &[0]));
    }

    #[test]
    fn default_params() {
        let p = ClusterParams::for_size(10_000);
        assert_eq!(p.weight_cutoff, 177);
        assert_eq!(p.witness_depth, 8);
        p.validate(10_000).unwrap();
        let small = ClusterParams::for_size(10);
        assert_eq!(small.weight_cutoff, 10);
        small.validate(10).unwrap();
        let bad = ClusterParams { weight_cutoff: 11, ..small };
        assert!(matches!(bad.validate(10), Err(Error::InvalidParameters(_))));
    }

    #[test]
    fn index_lines_are_one_based() {
        let b = SparseBasis::new(4, vec![vec![0, 2], vec![3]], BasisKind::NoCore);
        assert_eq!(b.to_index_lines(), "1 3\n4\n");
        assert_eq!(b.s, 2);
    }
}

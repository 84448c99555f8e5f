use serde::Serialize;

use super::{
    minimal_low_weight, sparse_basis_no_core, sym_diff, BasisKind, ClusterParams, Extender,
    LowWeightMethod, SparseBasis, BRUTE_MAX_DIM, EXHAUSTIVE_MAX_DIM,
};
use crate::error::{Error, Result};
use crate::gf2::{kernel_basis_dense, rank, BitVec, Echelon};
use crate::graph::{FactorGraph, Subgraph};
use crate::peel::{decompose, Decomposition};

/// Cluster count and the data behind it. Supports are in original variable
/// indices.
#[derive(Clone, Debug, Serialize)]
pub struct ClusterReport {
    pub n: usize,
    pub core_vars: usize,
    pub core_checks: usize,
    /// n_C − rank of the core matrix.
    pub core_dim: usize,
    pub method: LowWeightMethod,
    /// Minimal core solutions of weight at most the cutoff.
    pub low_weight: Vec<Vec<usize>>,
    /// Dimension of their span; the number of generators g is 2^g_log2.
    pub g_log2: usize,
    /// log₂ of the cluster count N.
    pub log2_clusters: usize,
    /// log₂N / n.
    pub exponent: f64,
    pub params: ClusterParams,
    /// Minimum distance between distinct clusters, when the full kernel is
    /// small enough to enumerate.
    pub separation: Option<usize>,
    /// Full solutions whose combinations give one representative per
    /// cluster; present when core_dim ≤ 20.
    pub offsets: Option<Vec<Vec<usize>>>,
}

impl ClusterReport {
    /// Representative of the cluster selected by `mask` over `offsets`.
    pub fn representative(&self, mask: u64) -> Option<Vec<usize>> {
        let offsets = self.offsets.as_ref()?;
        let mut x = Vec::new();
        for (i, o) in offsets.iter().enumerate() {
            if mask >> i & 1 == 1 {
                x = sym_diff(&x, o);
            }
        }
        Some(x)
    }

    pub fn num_clusters_f64(&self) -> f64 {
        (self.log2_clusters as f64).exp2()
    }
}

struct CoreAnalysis {
    core: Subgraph,
    core_dim: usize,
    method: LowWeightMethod,
    /// Low-weight solutions in core-local indices.
    local: Vec<Vec<usize>>,
    /// Indices into `local` forming a basis of their span.
    independent: Vec<usize>,
    span: Echelon,
}

fn analyze_core(g: &FactorGraph, d: &Decomposition, params: &ClusterParams) -> Result<CoreAnalysis> {
    params.validate(g.num_vars())?;
    if !d.has_core() {
        return Err(Error::NoClusters("the 2-core is empty".into()));
    }
    let core = d.core(g);
    let nc = core.graph.num_vars();
    let core_dim = nc - rank(&core.graph.to_bitmatrix());
    let method = if core_dim <= EXHAUSTIVE_MAX_DIM {
        LowWeightMethod::Exhaustive
    } else {
        LowWeightMethod::Cycles
    };
    let local = minimal_low_weight(&core.graph, params.weight_cutoff, method)?;
    let mut span = Echelon::new(nc);
    let independent = (0..local.len())
        .filter(|&i| span.insert(&BitVec::from_support(nc, &local[i])))
        .collect();
    Ok(CoreAnalysis { core, core_dim, method, local, independent, span })
}

/// Groups solutions by the core equivalence "differ on the core by a
/// combination of low-weight core solutions" and counts the classes.
pub fn cluster_partition(g: &FactorGraph, params: &ClusterParams) -> Result<ClusterReport> {
    params.validate(g.num_vars())?;
    let d = decompose(g)?;
    let a = analyze_core(g, &d, params)?;
    let n = g.num_vars();
    let g_log2 = a.span.rank();
    let log2_clusters = a.core_dim - g_log2;

    let mut offsets = None;
    let mut separation = None;
    if a.core_dim <= EXHAUSTIVE_MAX_DIM {
        let kernel = kernel_basis_dense(&g.to_bitmatrix());
        let project = |x: &BitVec| {
            BitVec::from_support(a.core.vars.len(), &a.core.vars.iter().enumerate().filter(|&(_, &v)| x.get(v)).map(|(i, _)| i).collect::<Vec<_>>())
        };
        let mut quotient = a.span.clone();
        let mut chosen = Vec::new();
        for x in &kernel.vectors {
            if quotient.insert(&project(x)) {
                chosen.push(x.support());
            }
        }
        if chosen.len() != log2_clusters {
            return Err(Error::InvariantViolation(format!(
                "{} cluster offsets for a quotient of dimension {log2_clusters}",
                chosen.len()
            )));
        }
        offsets = Some(chosen);
        if kernel.dim <= BRUTE_MAX_DIM {
            let mut x = BitVec::zeros(n);
            let mut best: Option<usize> = None;
            for i in 1u64..(1u64 << kernel.dim) {
                x.xor_assign(&kernel.vectors[i.trailing_zeros() as usize]);
                let w = x.count_ones();
                if best.is_some_and(|b| b <= w) {
                    continue;
                }
                if !a.span.contains(&project(&x)) {
                    best = Some(w);
                }
            }
            separation = best;
        }
    }

    Ok(ClusterReport {
        n,
        core_vars: d.core_vars.len(),
        core_checks: d.core_checks.len(),
        core_dim: a.core_dim,
        method: a.method,
        low_weight: a.local.iter().map(|v| a.core.lift(v)).collect(),
        g_log2,
        log2_clusters,
        exponent: log2_clusters as f64 / n as f64,
        params: *params,
        separation,
        offsets,
    })
}

/// Basis of the cluster containing 0: extensions of an independent subset
/// of the low-weight core solutions, followed by a kernel basis of the
/// periphery (zero on the backbone).
pub fn cluster_basis(g: &FactorGraph, d: &Decomposition, params: &ClusterParams) -> Result<SparseBasis> {
    let a = analyze_core(g, d, params)?;
    let mut ext = Extender::new(g, d, params.witness_depth);
    let mut vectors = Vec::with_capacity(a.independent.len());
    for &i in &a.independent {
        vectors.push(ext.extend(&a.core.lift(&a.local[i]))?);
    }
    let first_set = vectors.len();
    let periphery = d.periphery(g);
    if periphery.graph.num_vars() > 0 {
        let pb = sparse_basis_no_core(&periphery.graph).map_err(|e| match e {
            Error::HasCore(c) => Error::InvariantViolation(format!("periphery has a core of {c} checks")),
            other => other,
        })?;
        for v in &pb.vectors {
            let lifted = periphery.lift(v);
            let bad = g.syndrome(&lifted);
            if !bad.is_empty() {
                return Err(Error::InvariantViolation(format!(
                    "periphery vector violates check {}",
                    bad[0]
                )));
            }
            vectors.push(lifted);
        }
    }
    // the cluster of 0 has dimension dim ker H − (core_dim − g_log2)
    let total = g.num_vars() - rank(&g.to_bitmatrix());
    let want = total - (a.core_dim - a.span.rank());
    if vectors.len() != want {
        return Err(Error::InvariantViolation(format!(
            "cluster basis has {} vectors, the cluster has dimension {want}",
            vectors.len()
        )));
    }
    let mut basis = SparseBasis::new(g.num_vars(), vectors, BasisKind::Cluster);
    basis.first_set = first_set;
    Ok(basis)
}

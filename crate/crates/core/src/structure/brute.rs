use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::gf2::{kernel_basis_dense, BitVec, KernelBasis};
use crate::graph::FactorGraph;

/// Largest kernel dimension brute-force clustering will enumerate.
pub const BRUTE_MAX_DIM: usize = 20;

/// Connected components of the graph on all solutions joining pairs within
/// Hamming distance `step`. Solutions are indexed by their coefficient mask
/// over `kernel`.
#[derive(Clone, Debug)]
pub struct BruteClusters {
    pub kernel: KernelBasis,
    pub step: usize,
    /// Component of each solution, numbered by first appearance.
    pub labels: Vec<u32>,
    pub num_components: usize,
}

impl BruteClusters {
    pub fn num_solutions(&self) -> usize {
        self.labels.len()
    }

    pub fn solution(&self, mask: u64) -> BitVec {
        let n = self.kernel.vectors.first().map_or(0, BitVec::len);
        self.kernel.combination(mask, n)
    }

    pub fn component_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_components];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }
}

/// Two solutions are joined when their difference is a solution of weight at
/// most `step`, so the components are the cosets of the span of those
/// low-weight differences.
pub fn brute_force_clusters(g: &FactorGraph, step: usize) -> Result<BruteClusters> {
    let kernel = kernel_basis_dense(&g.to_bitmatrix());
    let d = kernel.dim;
    if d > BRUTE_MAX_DIM {
        return Err(Error::TooLarge(format!("kernel dimension {d} exceeds {BRUTE_MAX_DIM}")));
    }
    let count = 1usize << d;
    // pivot[b] holds a reduced mask whose highest bit is b
    let mut pivot = [0u32; BRUTE_MAX_DIM];
    let reduce = |pivot: &[u32; BRUTE_MAX_DIM], x: u32| {
        let mut x = x;
        for b in (0..d).rev() {
            if x >> b & 1 == 1 && pivot[b] != 0 {
                x ^= pivot[b];
            }
        }
        x
    };
    let mut x = BitVec::zeros(g.num_vars());
    for i in 1..count {
        x.xor_assign(&kernel.vectors[i.trailing_zeros() as usize]);
        let w = x.count_ones();
        if w <= step {
            let mask = (i ^ (i >> 1)) as u32;
            let r = reduce(&pivot, mask);
            if r != 0 {
                pivot[31 - r.leading_zeros() as usize] = r;
            }
        }
    }
    let mut ids: HashMap<u32, u32> = HashMap::new();
    let mut labels = Vec::with_capacity(count);
    for mask in 0..count as u32 {
        let r = reduce(&pivot, mask);
        let next = ids.len() as u32;
        labels.push(*ids.entry(r).or_insert(next));
    }
    Ok(BruteClusters { kernel, step, labels, num_components: ids.len() })
}

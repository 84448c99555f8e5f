//! Conductance of proximity graphs on small solution sets, and the
//! hypercube certificate for sets spanned by a sparse basis.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{rank_of, BitVec, Echelon};
use crate::structure::{BasisKind, SparseBasis};

/// Largest point set the exact method accepts.
pub const EXACT_MAX_POINTS: usize = 20;

/// Points joined when their Hamming distance is at most `ell`.
#[derive(Clone, Debug)]
pub struct ProximityGraph {
    pub points: Vec<BitVec>,
    pub ell: usize,
    pub edges: Vec<(usize, usize)>,
}

impl ProximityGraph {
    pub fn new(points: Vec<BitVec>, ell: usize) -> Self {
        let mut edges = Vec::new();
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i].hamming(&points[j]) <= ell {
                    edges.push((i, j));
                }
            }
        }
        ProximityGraph { points, ell, edges }
    }

    pub fn degree(&self, i: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == i || b == i).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConductanceMethod {
    Exact,
    /// `phi` is a lower bound.
    Certificate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConductanceResult {
    pub phi: f64,
    /// Indices of a minimising side; empty for certificates.
    pub witness_cut: Vec<usize>,
    pub method: ConductanceMethod,
}

/// Minimum over nonempty proper subsets A of cut(A)/min(|A|, |Aᶜ|), by a
/// Gray-code walk over the subsets that leave out the last point.
pub fn conductance_exact(points: &[BitVec], ell: usize) -> Result<ConductanceResult> {
    let k = points.len();
    if k < 2 {
        return Err(Error::Undefined(format!("conductance of a set of {k} points")));
    }
    if k > EXACT_MAX_POINTS {
        return Err(Error::TooLarge(format!("{k} points exceed {EXACT_MAX_POINTS}")));
    }
    let pg = ProximityGraph::new(points.to_vec(), ell);
    let mut adj = vec![0u32; k];
    for &(a, b) in &pg.edges {
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    let mut set = 0u32;
    let mut cut: i64 = 0;
    let mut best = (f64::INFINITY, 0u32);
    for i in 1u32..(1 << (k - 1)) {
        let v = i.trailing_zeros() as usize;
        let inside = (adj[v] & set).count_ones() as i64;
        let outside = adj[v].count_ones() as i64 - inside;
        if set >> v & 1 == 0 {
            cut += outside - inside;
        } else {
            cut -= outside - inside;
        }
        set ^= 1 << v;
        let size = set.count_ones() as usize;
        let phi = cut as f64 / size.min(k - size) as f64;
        if phi < best.0 || (phi == best.0 && set < best.1) {
            best = (phi, set);
        }
    }
    Ok(ConductanceResult {
        phi: best.0,
        witness_cut: (0..k).filter(|&i| best.1 >> i & 1 == 1).collect(),
        method: ConductanceMethod::Exact,
    })
}

/// All 2^d combinations of `basis`.
pub fn span_points(n: usize, basis: &[BitVec]) -> Result<Vec<BitVec>> {
    if basis.len() > EXACT_MAX_POINTS {
        return Err(Error::TooLarge(format!("span of {} vectors", basis.len())));
    }
    let mut x = BitVec::zeros(n);
    let mut out = vec![x.clone()];
    for i in 1u64..(1u64 << basis.len()) {
        x.xor_assign(&basis[i.trailing_zeros() as usize]);
        out.push(x.clone());
    }
    Ok(out)
}

/// Certifies Φ(𝒮; s) ≥ 1/2 for 𝒮 spanned by an independent basis of
/// weight at most s: the basis steps embed a spanning hypercube. When
/// `points` is nonempty it must be exactly the span.
pub fn hypercube_certificate(points: &[BitVec], basis: &SparseBasis) -> Result<ConductanceResult> {
    if basis.vectors.is_empty() {
        return Err(Error::Undefined("an empty basis spans a single point".into()));
    }
    if let Some(v) = basis.vectors.iter().find(|v| v.len() > basis.s) {
        return Err(Error::InvalidCertificate(format!(
            "vector of weight {} exceeds s = {}",
            v.len(),
            basis.s
        )));
    }
    let vecs = basis.to_bitvecs();
    if rank_of(basis.n, &vecs) != vecs.len() {
        return Err(Error::InvalidCertificate("basis vectors are dependent".into()));
    }
    if !points.is_empty() {
        let mut want: Vec<BitVec> = span_points(basis.n, &vecs)?;
        let mut got = points.to_vec();
        want.sort_by(|a, b| a.words().cmp(b.words()));
        got.sort_by(|a, b| a.words().cmp(b.words()));
        if want != got {
            return Err(Error::InvalidCertificate("points are not the span of the basis".into()));
        }
    }
    Ok(ConductanceResult { phi: 0.5, witness_cut: Vec::new(), method: ConductanceMethod::Certificate })
}

/// Minimum Hamming distance between the two lists.
pub fn set_distance(a: &[BitVec], b: &[BitVec]) -> Result<usize> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x.hamming(y)))
        .min()
        .ok_or_else(|| Error::Undefined("distance to an empty set".into()))
}

/// Whether the linear space `points` has a basis of vectors of weight ≤ s.
pub fn admits_sparse_basis(n: usize, points: &[BitVec], s: usize) -> bool {
    let dim = rank_of(n, points);
    let light: Vec<BitVec> = points.iter().filter(|x| (1..=s).contains(&x.count_ones())).cloned().collect();
    rank_of(n, &light) == dim
}

/// Basis of the span of `points` minimising the largest weight: greedy
/// insertion in order of weight.
pub fn lightest_basis(n: usize, points: &[BitVec]) -> SparseBasis {
    let mut sorted: Vec<&BitVec> = points.iter().filter(|x| !x.is_zero()).collect();
    sorted.sort_by(|a, b| a.count_ones().cmp(&b.count_ones()).then_with(|| a.words().cmp(b.words())));
    let mut ech = Echelon::new(n);
    let vectors = sorted.into_iter().filter(|x| ech.insert(x)).map(BitVec::support).collect();
    SparseBasis::new(n, vectors, BasisKind::Cluster)
}

/// Smallest pairwise distance among distinct points.
pub fn min_pairwise_distance(points: &[BitVec]) -> Option<usize> {
    let mut best = None;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = points[i].hamming(&points[j]);
            best = Some(best.map_or(d, |b: usize| b.min(d)));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(bits: &[&str]) -> Vec<BitVec> {
        bits.iter().map(|b| BitVec::from_bits(b)).collect()
    }

    /// Direct evaluation over every subset, no Gray code.
    fn brute_phi(points: &[BitVec], ell: usize) -> f64 {
        let k = points.len();
        let mut best = f64::INFINITY;
        for set in 1u32..(1 << k) - 1 {
            let mut cut = 0;
            for i in 0..k {
                for j in 0..k {
                    if set >> i & 1 == 1 && set >> j & 1 == 0 && points[i].hamming(&points[j]) <= ell {
                        cut += 1;
                    }
                }
            }
            let size = set.count_ones() as usize;
            best = best.min(cut as f64 / size.min(k - size) as f64);
        }
        best
    }

    #[test]
    fn even_weight_words() {
        let s = pts(&["000", "110", "101", "011"]);
        assert_eq!(conductance_exact(&s, 1).unwrap().phi, 0.0);
        let r = conductance_exact(&s, 2).unwrap();
        assert_eq!(r.phi, 2.0);
        assert_eq!(r.witness_cut.len(), 2);
        assert_eq!(conductance_exact(&pts(&["0", "1"]), 1).unwrap().phi, 1.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(conductance_exact(&pts(&["0"]), 1), Err(Error::Undefined(_))));
        let many: Vec<BitVec> = (0..21).map(|i| BitVec::from_support(32, &[i])).collect();
        assert!(matches!(conductance_exact(&many, 1), Err(Error::TooLarge(_))));
        let empty = SparseBasis::new(3, vec![], BasisKind::Cluster);
        assert!(matches!(hypercube_certificate(&[], &empty), Err(Error::Undefined(_))));
        let dep = SparseBasis::new(3, vec![vec![0, 1], vec![0, 1]], BasisKind::Cluster);
        assert!(matches!(hypercube_certificate(&[], &dep), Err(Error::InvalidCertificate(_))));
        let mut heavy = SparseBasis::new(3, vec![vec![0, 1, 2]], BasisKind::Cluster);
        heavy.s = 2;
        assert!(matches!(hypercube_certificate(&[], &heavy), Err(Error::InvalidCertificate(_))));
    }

    #[test]
    fn certificate_for_two_generators() {
        let basis = SparseBasis::new(3, vec![vec![0, 1], vec![0, 2]], BasisKind::Cluster);
        let s = pts(&["000", "110", "101", "011"]);
        let cert = hypercube_certificate(&s, &basis).unwrap();
        assert_eq!(cert.phi, 0.5);
        assert!(cert.phi <= conductance_exact(&s, basis.s).unwrap().phi);
        let wrong = pts(&["000", "110", "101", "111"]);
        assert!(hypercube_certificate(&wrong, &basis).is_err());
    }

    #[test]
    fn gray_walk_matches_direct_evaluation() {
        for seed in 0..30u64 {
            let k = 2 + (seed as usize % 8);
            let points: Vec<BitVec> = (0..k)
                .map(|i| {
                    let x = (seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) >> (i * 5)) & 0x3f;
                    BitVec::from_support(6, &(0..6).filter(|b| x >> b & 1 == 1).collect::<Vec<_>>())
                })
                .collect();
            for ell in 0..=6 {
                let r = conductance_exact(&points, ell).unwrap();
                assert_eq!(r.phi, brute_phi(&points, ell), "seed {seed} ell {ell}");
            }
        }
    }

    #[test]
    fn distances() {
        let a = pts(&["000"]);
        assert_eq!(set_distance(&a, &a).unwrap(), 0);
        assert_eq!(set_distance(&a, &pts(&["011", "110"])).unwrap(), 2);
        assert!(set_distance(&a, &[]).is_err());
        assert_eq!(min_pairwise_distance(&pts(&["000", "011", "111"])), Some(1));
    }

    #[test]
    fn sparse_basis_existence() {
        let s = pts(&["0000", "1100", "0011", "1111"]);
        assert!(admits_sparse_basis(4, &s, 2));
        assert!(!admits_sparse_basis(4, &s, 1));
        let t = pts(&["000", "111"]);
        assert!(!admits_sparse_basis(3, &t, 2));
        let b = lightest_basis(4, &s);
        assert_eq!(b.s, 2);
        assert_eq!(b.vectors, vec![vec![0, 1], vec![2, 3]]);
    }
}

//! Linear algebra over GF(2): packed bit vectors and matrices, rank,
//! dense kernel bases, and back-substitution along a peeling order.

use crate::error::{Error, Result};
use crate::peel::PeelingTrace;

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// Fixed-length packed bit vector. Bits past `len` are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; words_for(len)] }
    }

    /// Vector with ones exactly at `support`. Indices must be `< len`.
    pub fn from_support(len: usize, support: &[usize]) -> Self {
        let mut v = BitVec::zeros(len);
        for &i in support {
            v.set(i, true);
        }
        v
    }

    /// Parses a string of '0'/'1' characters; anything else is skipped.
    pub fn from_bits(bits: &str) -> Self {
        let digits: Vec<bool> = bits
            .chars()
            .filter(|c| *c == '0' || *c == '1')
            .map(|c| c == '1')
            .collect();
        let mut v = BitVec::zeros(digits.len());
        for (i, b) in digits.into_iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "length mismatch");
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    /// Support containment: every one of `self` is a one of `other`.
    pub fn is_subset_of(&self, other: &BitVec) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn hamming(&self, other: &BitVec) -> usize {
        assert_eq!(self.len, other.len, "length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD + bit)
            })
        })
    }

    pub fn support(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }
}

impl std::fmt::Display for BitVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Row-major packed bit matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BitMatrix { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Stacks equal-length vectors as rows.
    pub fn from_rows(cols: usize, rows: &[BitVec]) -> Self {
        let mut m = BitMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row {i} has the wrong length");
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        m
    }

    /// Builds a matrix from rows written as '0'/'1' strings.
    pub fn from_strings(rows: &[&str]) -> Self {
        let vecs: Vec<BitVec> = rows.iter().map(|r| BitVec::from_bits(r)).collect();
        let cols = vecs.first().map_or(0, |v| v.len());
        BitMatrix::from_rows(cols, &vecs)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "entry ({r},{c}) out of range");
        let mask = 1u64 << (c % WORD);
        let w = &mut self.data[r * self.stride + c / WORD];
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        assert!(r < self.rows && c < self.cols, "entry ({r},{c}) out of range");
        self.data[r * self.stride + c / WORD] ^= 1u64 << (c % WORD);
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVec {
        BitVec { len: self.cols, words: self.row_words(r).to_vec() }
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row(r).iter_ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Matrix-vector product mod 2.
    pub fn mul_vec(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.cols, "vector length must equal column count");
        let mut out = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            let ones: u32 = self
                .row_words(r)
                .iter()
                .zip(x.words())
                .map(|(a, b)| (a & b).count_ones())
                .sum();
            if ones & 1 == 1 {
                out.set(r, true);
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let (head, tail) = self.data.split_at_mut(hi * self.stride);
        head[lo * self.stride..(lo + 1) * self.stride].swap_with_slice(&mut tail[..self.stride]);
    }

    /// row[dst] ^= row[src], touching words from `from_word` on.
    fn xor_row_into(&mut self, src: usize, dst: usize, from_word: usize) {
        debug_assert_ne!(src, dst);
        let s = self.stride;
        let (src_slice, dst_slice) = if src < dst {
            let (head, tail) = self.data.split_at_mut(dst * s);
            (&head[src * s..(src + 1) * s], &mut tail[..s])
        } else {
            let (head, tail) = self.data.split_at_mut(src * s);
            (&tail[..s] as &[u64], &mut head[dst * s..(dst + 1) * s])
        };
        for (d, v) in dst_slice[from_word..].iter_mut().zip(&src_slice[from_word..]) {
            *d ^= v;
        }
    }

    /// In-place reduction to reduced row echelon form; returns pivot columns.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.swap_rows(r, p);
            for i in 0..self.rows {
                if i != r && self.get(i, c) {
                    self.xor_row_into(r, i, c / WORD);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }
}

/// GF(2) rank by forward elimination on a copy.
pub fn rank(m: &BitMatrix) -> usize {
    let mut a = m.clone();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let word = c / WORD;
        let mask = 1u64 << (c % WORD);
        let stride = a.stride;
        let Some(p) = (r..a.rows).find(|&i| a.data[i * stride + word] & mask != 0) else {
            continue;
        };
        a.swap_rows(r, p);
        for i in r + 1..a.rows {
            if a.data[i * stride + word] & mask != 0 {
                a.xor_row_into(r, i, word);
            }
        }
        r += 1;
    }
    r
}

/// Rank of a list of equal-length vectors.
pub fn rank_of(len: usize, vectors: &[BitVec]) -> usize {
    rank(&BitMatrix::from_rows(len, vectors))
}

/// Incremental row-echelon basis for span membership and rank queries.
#[derive(Clone, Debug)]
pub struct Echelon {
    len: usize,
    rows: Vec<(usize, BitVec)>,
}

impl Echelon {
    pub fn new(len: usize) -> Self {
        Echelon { len, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the stored rows.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut x = v.clone();
        for (pivot, row) in &self.rows {
            if x.get(*pivot) {
                x.xor_assign(row);
            }
        }
        x
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v`; returns false when it was already in the span.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        assert_eq!(v.len(), self.len, "length mismatch");
        let x = self.reduce(v);
        let pivot = x.iter_ones().next();
        match pivot {
            None => false,
            Some(pivot) => {
                self.rows.push((pivot, x));
                true
            }
        }
    }
}

/// A list of independent kernel vectors of some matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelBasis {
    pub vectors: Vec<BitVec>,
    pub dim: usize,
    pub sparsity: usize,
}

impl KernelBasis {
    pub fn new(vectors: Vec<BitVec>) -> Self {
        let sparsity = vectors.iter().map(BitVec::count_ones).max().unwrap_or(0);
        KernelBasis { dim: vectors.len(), vectors, sparsity }
    }

    /// The element `sum_i coeffs_i * vectors_i`, with `coeffs` read as a bitmask.
    pub fn combination(&self, coeffs: u64, len: usize) -> BitVec {
        let mut x = BitVec::zeros(len);
        for (i, v) in self.vectors.iter().enumerate() {
            if coeffs >> i & 1 == 1 {
                x.xor_assign(v);
            }
        }
        x
    }
}

/// Basis of `{x : Mx = 0}` read off the reduced row echelon form: one vector
/// per free column.
pub fn kernel_basis_dense(m: &BitMatrix) -> KernelBasis {
    let mut a = m.clone();
    let pivots = a.rref();
    let mut is_pivot = vec![false; m.cols()];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut vectors = Vec::with_capacity(m.cols() - pivots.len());
    for f in (0..m.cols()).filter(|&c| !is_pivot[c]) {
        let mut x = BitVec::zeros(m.cols());
        x.set(f, true);
        for (r, &pc) in pivots.iter().enumerate() {
            if a.get(r, f) {
                x.set(pc, true);
            }
        }
        vectors.push(x);
    }
    let basis = KernelBasis::new(vectors);
    debug_assert!(basis.vectors.iter().all(|v| m.mul_vec(v).is_zero()));
    debug_assert_eq!(basis.dim, m.cols() - rank(m));
    basis
}

/// Solves `Mx = 0` with the free variables of `trace` fixed to `free`
/// (listed in the trace's free-variable order), by back-substitution from the
/// last peeled check to the first.
pub fn staircase_solve(trace: &PeelingTrace, m: &BitMatrix, free: &BitVec) -> Result<BitVec> {
    if m.rows() != trace.num_checks() || m.cols() != trace.num_vars() {
        return Err(Error::StructureMismatch(format!(
            "matrix is {}x{} but trace covers {} checks and {} variables",
            m.rows(),
            m.cols(),
            trace.num_checks(),
            trace.num_vars()
        )));
    }
    if !trace.core_checks().is_empty() {
        return Err(Error::StructureMismatch("trace has a nonempty core".into()));
    }
    if free.len() != trace.free_vars().len() {
        return Err(Error::StructureMismatch(format!(
            "expected {} free values, got {}",
            trace.free_vars().len(),
            free.len()
        )));
    }
    let mut x = BitVec::zeros(m.cols());
    for (i, &w) in trace.free_vars().iter().enumerate() {
        x.set(w, free.get(i));
    }
    for (&a, &u) in trace.check_order().iter().zip(trace.dependent_vars()).rev() {
        if !m.get(a, u) {
            return Err(Error::StructureMismatch(format!(
                "dependent variable {u} does not appear in check {a}"
            )));
        }
        let ones: u32 = m
            .row_words(a)
            .iter()
            .zip(x.words())
            .map(|(p, q)| (p & q).count_ones())
            .sum();
        x.set(u, ones & 1 == 1);
    }
    if !m.mul_vec(&x).is_zero() {
        return Err(Error::StructureMismatch("back-substitution did not solve the system".into()));
    }
    Ok(x)
}

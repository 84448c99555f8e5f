//! C ABI over `xorsat-core`. Graphs and bases are opaque heap handles that
//! the caller frees with the matching `_free` function. Every fallible call
//! returns an [`XorsatStatus`]; on failure the message is available from
//! [`xorsat_last_error_message`] until the next failing call on the same
//! thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use xorsat_core::graph::{generate_uniform, FactorGraph, XorInstance};
use xorsat_core::peel::peel;
use xorsat_core::structure::{cluster_partition, sparse_basis_no_core, ClusterParams, SparseBasis};
use xorsat_core::{de, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XorsatStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameters = 2,
    HasCore = 3,
    NoClusters = 4,
    TooLarge = 5,
    Undefined = 6,
    Parse = 7,
    Io = 8,
    OutOfRange = 9,
    Internal = 10,
}

/// Opaque factor graph.
pub struct XorsatGraph(FactorGraph);

/// Opaque sparse kernel basis.
pub struct XorsatBasis(SparseBasis);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct XorsatPeelSummary {
    pub peelable: bool,
    pub halting_time: usize,
    pub core_vars: usize,
    pub core_checks: usize,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct XorsatClusterSummary {
    pub core_vars: usize,
    pub core_checks: usize,
    pub core_dim: usize,
    pub g_log2: usize,
    pub log2_clusters: usize,
    pub exponent: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> XorsatStatus {
    match e {
        Error::InvalidParameters(_) | Error::InvalidProfile(_) | Error::EmptyProfile => XorsatStatus::InvalidParameters,
        Error::HasCore(_) => XorsatStatus::HasCore,
        Error::NoClusters(_) => XorsatStatus::NoClusters,
        Error::TooLarge(_) => XorsatStatus::TooLarge,
        Error::Undefined(_) => XorsatStatus::Undefined,
        Error::Parse { .. } => XorsatStatus::Parse,
        Error::Io(_) => XorsatStatus::Io,
        _ => XorsatStatus::Internal,
    }
}

/// Runs `f`, turning errors and panics into a status plus a stored message.
fn guard(f: impl FnOnce() -> Result<(), (XorsatStatus, String)>) -> XorsatStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => XorsatStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            XorsatStatus::Internal
        }
    }
}

fn lib<T>(r: Result<T, Error>) -> Result<T, (XorsatStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null() -> (XorsatStatus, String) {
    (XorsatStatus::NullPointer, "null pointer argument".into())
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn xorsat_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Samples a uniform instance with `m` checks of width `k` on `n` variables.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn xorsat_graph_generate(
    n: usize,
    k: usize,
    m: usize,
    seed: u64,
    out: *mut *mut XorsatGraph,
) -> XorsatStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let g = lib(generate_uniform(n, k, m, seed))?;
        *out = Box::into_raw(Box::new(XorsatGraph(g)));
        Ok(())
    })
}

/// Reads an instance file in the text format.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn xorsat_graph_read(path: *const c_char, out: *mut *mut XorsatGraph) -> XorsatStatus {
    guard(|| {
        if path.is_null() || out.is_null() {
            return Err(null());
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| (XorsatStatus::InvalidParameters, "path is not UTF-8".to_string()))?;
        let inst = lib(XorInstance::read_file(path))?;
        *out = Box::into_raw(Box::new(XorsatGraph(inst.graph)));
        Ok(())
    })
}

/// # Safety
/// `g` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn xorsat_graph_free(g: *mut XorsatGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn xorsat_graph_num_vars(g: *const XorsatGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.num_vars())
}

/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn xorsat_graph_num_checks(g: *const XorsatGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.num_checks())
}

/// # Safety
/// `g` must be a live graph handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn xorsat_peel(g: *const XorsatGraph, out: *mut XorsatPeelSummary) -> XorsatStatus {
    guard(|| {
        let (Some(g), false) = (g.as_ref(), out.is_null()) else {
            return Err(null());
        };
        let tr = peel(&g.0);
        *out = XorsatPeelSummary {
            peelable: tr.is_peelable(),
            halting_time: tr.halting_time(),
            core_vars: tr.core_vars().len(),
            core_checks: tr.core_checks().len(),
        };
        Ok(())
    })
}

/// Sparse kernel basis of a core-free graph; `HasCore` otherwise.
///
/// # Safety
/// `g` must be a live graph handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn xorsat_basis_no_core(g: *const XorsatGraph, out: *mut *mut XorsatBasis) -> XorsatStatus {
    guard(|| {
        let (Some(g), false) = (g.as_ref(), out.is_null()) else {
            return Err(null());
        };
        let b = lib(sparse_basis_no_core(&g.0))?;
        *out = Box::into_raw(Box::new(XorsatBasis(b)));
        Ok(())
    })
}

/// # Safety
/// `b` must be null or a basis handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn xorsat_basis_free(b: *mut XorsatBasis) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// # Safety
/// `b` must be a live basis handle.
#[no_mangle]
pub unsafe extern "C" fn xorsat_basis_dim(b: *const XorsatBasis) -> usize {
    b.as_ref().map_or(0, |b| b.0.dim())
}

/// Largest support size.
///
/// # Safety
/// `b` must be a live basis handle.
#[no_mangle]
pub unsafe extern "C" fn xorsat_basis_sparsity(b: *const XorsatBasis) -> usize {
    b.as_ref().map_or(0, |b| b.0.s)
}

/// Copies the sorted 0-indexed support of vector `i` into `buf` (capacity
/// `cap`) and stores its length in `len`. When `cap` is too small nothing
/// is copied but `len` is still set, so a first call with `cap = 0` sizes
/// the buffer.
///
/// # Safety
/// `b` must be a live basis handle, `len` valid for one write and `buf`
/// valid for `cap` writes (or null when `cap` is 0).
#[no_mangle]
pub unsafe extern "C" fn xorsat_basis_vector(
    b: *const XorsatBasis,
    i: usize,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> XorsatStatus {
    guard(|| {
        let (Some(b), false) = (b.as_ref(), len.is_null()) else {
            return Err(null());
        };
        let v = b.0.vectors.get(i).ok_or_else(|| {
            (XorsatStatus::OutOfRange, format!("vector {i} of a basis of dimension {}", b.0.dim()))
        })?;
        *len = v.len();
        if v.len() <= cap && !v.is_empty() {
            if buf.is_null() {
                return Err(null());
            }
            std::ptr::copy_nonoverlapping(v.as_ptr(), buf, v.len());
        }
        Ok(())
    })
}

/// Cluster count of a graph with a core. Zero for `weight_cutoff` or
/// `witness_depth` selects the size-dependent default.
///
/// # Safety
/// `g` must be a live graph handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn xorsat_cluster_count(
    g: *const XorsatGraph,
    weight_cutoff: usize,
    witness_depth: usize,
    out: *mut XorsatClusterSummary,
) -> XorsatStatus {
    guard(|| {
        let (Some(g), false) = (g.as_ref(), out.is_null()) else {
            return Err(null());
        };
        let mut params = ClusterParams::for_size(g.0.num_vars());
        if weight_cutoff > 0 {
            params.weight_cutoff = weight_cutoff;
        }
        if witness_depth > 0 {
            params.witness_depth = witness_depth;
        }
        let r = lib(cluster_partition(&g.0, &params))?;
        *out = XorsatClusterSummary {
            core_vars: r.core_vars,
            core_checks: r.core_checks,
            core_dim: r.core_dim,
            g_log2: r.g_log2,
            log2_clusters: r.log2_clusters,
            exponent: r.exponent,
        };
        Ok(())
    })
}

/// Clustering threshold α_d(k).
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn xorsat_alpha_d(k: usize, out: *mut f64) -> XorsatStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = lib(de::alpha_d(k, 1e-9))?;
        Ok(())
    })
}

/// Predicted cluster-count exponent; `NoClusters` below the threshold.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn xorsat_sigma(alpha: f64, k: usize, out: *mut f64) -> XorsatStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        if k < 3 {
            return Err((XorsatStatus::InvalidParameters, format!("k = {k} is below 3")));
        }
        *out = lib(de::sigma(alpha, k))?;
        Ok(())
    })
}

use std::ffi::{CStr, CString};
use std::io::Write;
use std::ptr;

use xorsat_ffi::*;

fn last_error() -> String {
    let p = xorsat_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn generate(n: usize, k: usize, m: usize, seed: u64) -> *mut XorsatGraph {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { xorsat_graph_generate(n, k, m, seed, &mut g) }, XorsatStatus::Ok);
    assert!(!g.is_null());
    g
}

#[test]
fn sparse_instance_round_trip() {
    let g = generate(200, 3, 100, 7);
    unsafe {
        assert_eq!(xorsat_graph_num_vars(g), 200);
        assert_eq!(xorsat_graph_num_checks(g), 100);

        let mut peel = XorsatPeelSummary::default();
        assert_eq!(xorsat_peel(g, &mut peel), XorsatStatus::Ok);
        assert!(peel.peelable);
        assert_eq!((peel.core_vars, peel.core_checks), (0, 0));

        let mut b = ptr::null_mut();
        assert_eq!(xorsat_basis_no_core(g, &mut b), XorsatStatus::Ok);
        let dim = xorsat_basis_dim(b);
        assert_eq!(dim, 100);

        let mut widest = 0;
        for i in 0..dim {
            let mut len = 0;
            assert_eq!(xorsat_basis_vector(b, i, ptr::null_mut(), 0, &mut len), XorsatStatus::Ok);
            let mut buf = vec![0usize; len];
            assert_eq!(xorsat_basis_vector(b, i, buf.as_mut_ptr(), len, &mut len), XorsatStatus::Ok);
            assert!(buf.windows(2).all(|w| w[0] < w[1]));
            assert!(buf.iter().all(|&v| v < 200));
            widest = widest.max(len);
        }
        assert_eq!(widest, xorsat_basis_sparsity(b));

        let mut len = 0;
        assert_eq!(xorsat_basis_vector(b, dim, ptr::null_mut(), 0, &mut len), XorsatStatus::OutOfRange);
        assert!(last_error().contains("dimension"));

        xorsat_basis_free(b);
        xorsat_graph_free(g);
    }
}

#[test]
fn dense_instance_reports_core_and_clusters() {
    let g = generate(400, 3, 360, 11);
    unsafe {
        let mut peel = XorsatPeelSummary::default();
        assert_eq!(xorsat_peel(g, &mut peel), XorsatStatus::Ok);
        assert!(!peel.peelable);

        let mut b = ptr::null_mut();
        assert_eq!(xorsat_basis_no_core(g, &mut b), XorsatStatus::HasCore);
        assert!(b.is_null());
        assert!(!last_error().is_empty());

        let mut c = XorsatClusterSummary::default();
        assert_eq!(xorsat_cluster_count(g, 0, 0, &mut c), XorsatStatus::Ok);
        assert_eq!(c.core_vars, peel.core_vars);
        assert_eq!(c.core_checks, peel.core_checks);
        assert_eq!(c.log2_clusters, c.core_dim - c.g_log2);
        assert!((c.exponent - c.log2_clusters as f64 / 400.0).abs() < 1e-12);
        xorsat_graph_free(g);
    }
}

#[test]
fn thresholds() {
    let mut ad = 0.0;
    assert_eq!(unsafe { xorsat_alpha_d(3, &mut ad) }, XorsatStatus::Ok);
    assert!((ad - 0.8184).abs() < 1e-3, "{ad}");

    let mut s = 0.0;
    assert_eq!(unsafe { xorsat_sigma(0.9, 3, &mut s) }, XorsatStatus::Ok);
    assert!((s - 0.0121).abs() < 5e-4, "{s}");

    assert_eq!(unsafe { xorsat_sigma(0.5, 3, &mut s) }, XorsatStatus::NoClusters);
    assert_eq!(unsafe { xorsat_sigma(0.9, 2, &mut s) }, XorsatStatus::InvalidParameters);
}

#[test]
fn read_file_and_parse_errors() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "p xor 4 2\n1 2 3 0\n2 3 4 0").unwrap();
    let path = CString::new(f.path().to_str().unwrap()).unwrap();
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(xorsat_graph_read(path.as_ptr(), &mut g), XorsatStatus::Ok);
        assert_eq!(xorsat_graph_num_vars(g), 4);
        assert_eq!(xorsat_graph_num_checks(g), 2);
        xorsat_graph_free(g);

        let missing = CString::new("/nonexistent/instance.txt").unwrap();
        let mut g = ptr::null_mut();
        assert_eq!(xorsat_graph_read(missing.as_ptr(), &mut g), XorsatStatus::Io);
        assert!(g.is_null());
    }
}

#[test]
fn null_arguments() {
    unsafe {
        assert_eq!(xorsat_graph_generate(10, 3, 2, 0, ptr::null_mut()), XorsatStatus::NullPointer);
        assert_eq!(last_error(), "null pointer argument");
        let mut p = XorsatPeelSummary::default();
        assert_eq!(xorsat_peel(ptr::null(), &mut p), XorsatStatus::NullPointer);
        assert_eq!(xorsat_graph_num_vars(ptr::null()), 0);
        xorsat_graph_free(ptr::null_mut());
        xorsat_basis_free(ptr::null_mut());
    }
}

#[test]
fn invalid_generation_parameters() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { xorsat_graph_generate(2, 3, 1, 0, &mut g) }, XorsatStatus::InvalidParameters);
    assert!(g.is_null());
}

#[test]
fn header_declares_every_export() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/xorsat.h")).unwrap();
    for name in [
        "xorsat_last_error_message",
        "xorsat_graph_generate",
        "xorsat_graph_read",
        "xorsat_graph_free",
        "xorsat_peel",
        "xorsat_basis_no_core",
        "xorsat_basis_vector",
        "xorsat_basis_free",
        "xorsat_cluster_count",
        "xorsat_alpha_d",
        "xorsat_sigma",
        "XORSAT_STATUS_HAS_CORE",
    ] {
        assert!(h.contains(name), "{name} missing from header");
    }
}

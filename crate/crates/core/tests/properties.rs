//! Randomised invariants across modules.

use proptest::prelude::*;

use xorsat_core::bp::{bp_zero_fixed_point, decompose_from_bp, peeling_rounds_from_bp};
use xorsat_core::conduct::{
    admits_sparse_basis, conductance_exact, hypercube_certificate, lightest_basis, span_points,
};
use xorsat_core::de;
use xorsat_core::gf2::{kernel_basis_dense, rank, BitVec, Echelon};
use xorsat_core::graph::{
    collapse, generate_configuration, generate_uniform, read_instance, write_instance, DegreeProfile,
    FactorGraph, XorInstance,
};
use xorsat_core::peel::{decompose, peel, Part};
use xorsat_core::structure::{
    brute_force_clusters, cluster_basis, cluster_partition, minimal_low_weight, sparse_basis_no_core,
    ClusterParams, LowWeightMethod,
};
use xorsat_core::Error;

fn instance() -> impl Strategy<Value = FactorGraph> {
    (6usize..48, 0.2f64..1.3, any::<u64>())
        .prop_map(|(n, alpha, seed)| generate_uniform(n, 3, (alpha * n as f64).round() as usize, seed).unwrap())
}

fn small_instance() -> impl Strategy<Value = FactorGraph> {
    (6usize..24, 0.5f64..1.1, any::<u64>())
        .prop_map(|(n, alpha, seed)| generate_uniform(n, 3, (alpha * n as f64).round() as usize, seed).unwrap())
}

fn in_span(ech: &Echelon, n: usize, support: &[usize]) -> bool {
    ech.contains(&BitVec::from_support(n, support))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn core_is_a_stopping_set(g in instance()) {
        let tr = peel(&g);
        let mut alive = vec![false; g.num_checks()];
        for &a in tr.core_checks() {
            alive[a] = true;
        }
        for &v in tr.core_vars() {
            let deg = g.var_edges(v).iter().filter(|&&e| alive[g.edge_check(e)]).count();
            prop_assert!(deg >= 2);
        }
        prop_assert_eq!(tr.is_peelable(), tr.core_checks().is_empty());
        prop_assert_eq!(tr.free_vars().len() + tr.dependent_vars().len() + tr.core_vars().len(), g.num_vars());
    }

    #[test]
    fn bp_reproduces_peeling(g in instance()) {
        let tr = peel(&g);
        let bp = bp_zero_fixed_point(&g);
        prop_assert!(bp.converged());
        prop_assert_eq!(decompose_from_bp(&g, &bp.final_state()).unwrap(), decompose(&g).unwrap());
        let (vr, cr) = peeling_rounds_from_bp(&g, &bp);
        for v in 0..g.num_vars() {
            prop_assert_eq!(vr[v], tr.var_round(v));
        }
        for a in 0..g.num_checks() {
            prop_assert_eq!(cr[a], tr.check_round(a));
        }
    }

    #[test]
    fn decomposition_parts_partition_nodes(g in instance()) {
        let d = decompose(&g).unwrap();
        let labels = d.var_labels(g.num_vars());
        prop_assert_eq!(labels.iter().filter(|&&p| p == Part::Core).count(), d.core_vars.len());
        prop_assert_eq!(d.backbone_vars.len() + d.periphery_vars.len(), g.num_vars());
        prop_assert!(peel(&d.periphery(&g).graph).is_peelable());
    }

    #[test]
    fn no_core_basis_spans_the_kernel(g in instance()) {
        match sparse_basis_no_core(&g) {
            Ok(b) => {
                let n = g.num_vars();
                let mut ech = Echelon::new(n);
                for v in &b.vectors {
                    prop_assert!(g.syndrome(v).is_empty());
                    prop_assert!(ech.insert(&BitVec::from_support(n, v)));
                }
                for v in kernel_basis_dense(&g.to_bitmatrix()).vectors {
                    prop_assert!(ech.contains(&v));
                }
                prop_assert_eq!(b.dim(), n - g.num_checks());
            }
            Err(Error::HasCore(c)) => prop_assert_eq!(c, peel(&g).core_checks().len()),
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn collapse_preserves_kernel_dimension(g in instance()) {
        let cg = collapse(&g);
        let dim = g.num_vars() - rank(&g.to_bitmatrix());
        let dim_star = cg.graph.num_vars() - rank(&cg.graph.to_bitmatrix());
        prop_assert_eq!(dim, dim_star);
        let mass: usize = (0..cg.graph.num_vars()).map(|s| cg.size(s)).sum();
        prop_assert_eq!(mass, g.num_vars());
    }

    #[test]
    fn low_weight_solutions_are_minimal(g in instance(), ell in 1usize..12) {
        let d = decompose(&g).unwrap();
        if d.has_core() {
            let core = d.core(&g).graph;
            let cycles = minimal_low_weight(&core, ell, LowWeightMethod::Cycles).unwrap();
            if let Ok(all) = minimal_low_weight(&core, ell, LowWeightMethod::Exhaustive) {
                for v in &all {
                    prop_assert!(v.len() <= ell && core.syndrome(v).is_empty());
                }
                for c in &cycles {
                    prop_assert!(all.contains(c));
                }
            }
        }
    }

    #[test]
    fn cluster_count_matches_quotient(g in small_instance(), ell in 1usize..10) {
        let params = ClusterParams { weight_cutoff: ell.min(g.num_vars()), witness_depth: 64, brute_step: None };
        match cluster_partition(&g, &params) {
            Ok(r) => {
                let n = g.num_vars();
                prop_assert_eq!(r.core_dim, r.g_log2 + r.log2_clusters);
                let d = decompose(&g).unwrap();
                let b = cluster_basis(&g, &d, &params).unwrap();
                let mut ech = Echelon::new(n);
                for v in &b.vectors {
                    prop_assert!(g.syndrome(v).is_empty());
                    prop_assert!(ech.insert(&BitVec::from_support(n, v)));
                }
                // every cluster offset leaves the cluster of 0
                if let Some(offsets) = &r.offsets {
                    for o in offsets {
                        prop_assert!(!in_span(&ech, n, o));
                    }
                }
                // with a step below the separation, brute force sees at least N components
                if let Some(sep) = r.separation {
                    if b.s < sep {
                        let br = brute_force_clusters(&g, b.s.max(1)).unwrap();
                        prop_assert_eq!(br.num_components, 1usize << r.log2_clusters);
                    }
                }
            }
            Err(Error::NoClusters(_)) => prop_assert!(!decompose(&g).unwrap().has_core()),
            Err(Error::TooLarge(_)) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn conductance_grows_with_step(g in small_instance()) {
        let n = g.num_vars();
        let kb = kernel_basis_dense(&g.to_bitmatrix());
        if (1..=4).contains(&kb.dim) {
            let points = span_points(n, &kb.vectors).unwrap();
            let mut prev = 0.0;
            for ell in 0..=n {
                let phi = conductance_exact(&points, ell).unwrap().phi;
                prop_assert!(phi >= prev);
                if phi == 0.0 {
                    prop_assert!(!admits_sparse_basis(n, &points, ell));
                }
                prev = phi;
            }
            let basis = lightest_basis(n, &points);
            let cert = hypercube_certificate(&points, &basis).unwrap();
            prop_assert!(cert.phi <= conductance_exact(&points, basis.s).unwrap().phi);
        }
    }

    #[test]
    fn instance_text_round_trip(g in instance()) {
        let mut buf = Vec::new();
        write_instance(&mut buf, &XorInstance::homogeneous(g.clone())).unwrap();
        let back = read_instance(buf.as_slice()).unwrap();
        prop_assert_eq!(back.graph.num_vars(), g.num_vars());
        let a: Vec<Vec<usize>> = g.checks().map(<[usize]>::to_vec).collect();
        let b: Vec<Vec<usize>> = back.graph.checks().map(<[usize]>::to_vec).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn configuration_model_keeps_its_profile(n in 10usize..60, m in 1usize..40, seed in any::<u64>()) {
        let g = generate_configuration(n, &DegreeProfile::regular(3, m).unwrap(), seed).unwrap();
        prop_assert_eq!(g.num_checks(), m);
        prop_assert!((0..m).all(|a| g.check_degree(a) == 3));
    }

    #[test]
    fn density_evolution_is_monotone(alpha in 0.0f64..3.0, k in 3usize..7) {
        let z = de::de_sequence(alpha, &de::regular(k), 1.0, 400, 1e-12);
        for w in z.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-15);
            prop_assert!((0.0..=1.0).contains(&w[1]));
        }
    }

    #[test]
    fn sigma_identity(alpha in 0.5f64..3.0, k in 3usize..7) {
        let (q, qh) = de::fixed_point_q(alpha, k);
        let kf = k as f64;
        let other = 1.0 - (-alpha * kf * qh).exp() * (1.0 + alpha * kf * qh) - alpha * q.powi(k as i32);
        prop_assert!((de::sigma_value(alpha, k) - other).abs() < 1e-12);
        let p = de::core_predictions(alpha, k);
        prop_assert!((de::sigma_value(alpha, k) - (p.n_c - p.m_c)).abs() < 1e-12);
    }
}

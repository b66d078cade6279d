mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use common::*;
use minlob::digraph::{any_out_branching, contract_branching, has_out_branching, validate_out_branching, Digraph};
use minlob::format::{certify, parse_certificate, parse_cnf, parse_graph, write_cnf, write_graph, Certificate};
use minlob::generate::{random_3cnf, random_digraph};
use minlob::linkage::{solve_cover_linkage, LinkageQuery};
use minlob::reduction::{
    assignment_to_branching, canonical_width1_dpd, decode_assignment, reduce_cnf, repair_to_compatible, Assignment,
};
use minlob::solvers::{check_k_leaves_contraction, min_leaf_brute_force, min_leaf_contraction};
use minlob::width::{
    dpd_to_arboreal, dpw_exact, is_z_normal, validate_arboreal, validate_dagd, validate_dpd, PathDecomposition,
    Violation,
};

fn digraph() -> impl Strategy<Value = Digraph> {
    (1usize..=8, 0.1f64..0.7, any::<u64>()).prop_map(|(n, p, seed)| random_digraph(n, p, seed).unwrap())
}

#[test]
fn existence_matches_enumeration_up_to_four() {
    for n in 1..=4 {
        for d in all_digraphs(n) {
            let exhaustive = !all_out_branchings(&d).is_empty();
            assert_eq!(has_out_branching(&d).unwrap().is_some(), exhaustive, "{d:?}");
        }
    }
}

#[test]
fn brute_force_matches_enumeration_up_to_four() {
    for n in 1..=4 {
        for d in all_digraphs(n) {
            let got = min_leaf_brute_force(&d).unwrap();
            assert_eq!(got.min_leaves(), min_leaves_exhaustive(&d), "{d:?}");
            if let Some(w) = got.witness() {
                assert_eq!(validate_out_branching(&d, w), Ok(got.min_leaves().unwrap()));
            }
        }
    }
}

#[test]
fn leaf_bounds_and_key_vertex_bound() {
    for d in corpus(300, 1..=10, &[0.15, 0.3, 0.5], 11) {
        let Some(t) = any_out_branching(&d).unwrap() else { continue };
        let leaves = validate_out_branching(&d, &t).unwrap();
        assert!(leaves >= 1);
        if d.order() >= 2 {
            assert!(leaves < d.order());
        }
        assert!(t.key_vertices().len() <= 2 * leaves);
        let c = contract_branching(&d, &t).unwrap();
        assert_eq!(c.leaf_count(), leaves);
        assert_eq!(c.contract(), c);
    }
}

#[test]
fn linkage_complete_on_all_four_vertex_digraphs() {
    let n = 4;
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    let mut queries: Vec<Vec<(usize, usize)>> = pairs.iter().map(|&p| vec![p]).collect();
    for &p in &pairs {
        for &q in &pairs {
            queries.push(vec![p, q]);
        }
    }
    for d in all_digraphs(n) {
        for demands in &queries {
            let q = LinkageQuery::new(demands.clone()).unwrap();
            let got = solve_cover_linkage(&d, &q).unwrap();
            assert_eq!(got.is_some(), covering_linkage_exists(&d, demands), "{d:?} {demands:?}");
            if let Some(sol) = got {
                assert_eq!(sol.verify(&d, &q), Ok(()));
            }
        }
    }
}

#[test]
fn linkage_complete_on_five_vertex_sample() {
    let n = 5;
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    for d in corpus(150, 5..=5, &[0.3, 0.45, 0.6], 501) {
        for &p in &pairs {
            for demands in std::iter::once(vec![p]).chain(pairs.iter().map(|&r| vec![p, r])) {
                let q = LinkageQuery::new(demands.clone()).unwrap();
                let got = solve_cover_linkage(&d, &q).unwrap();
                assert_eq!(got.is_some(), covering_linkage_exists(&d, &demands), "{d:?} {demands:?}");
                if let Some(sol) = &got {
                    assert_eq!(sol.verify(&d, &q), Ok(()));
                }
                assert_eq!(got, solve_cover_linkage(&d, &q).unwrap());
            }
        }
    }
}

#[test]
fn contraction_solver_matches_enumeration() {
    for d in corpus(120, 3..=7, &[0.2, 0.35, 0.5], 77) {
        let best = min_leaves_exhaustive(&d);
        for k in 1..=3 {
            let dec = check_k_leaves_contraction(&d, k).unwrap();
            assert_eq!(dec.answer(), best.is_some_and(|m| m <= k), "{d:?} k={k}");
            if let Some(w) = &dec.witness {
                assert!(validate_out_branching(&d, w).unwrap() <= k);
            }
        }
        assert_eq!(min_leaf_contraction(&d).unwrap().min_leaves(), best);
    }
}

#[test]
fn hamiltonian_specialization() {
    for d in corpus(60, 2..=8, &[0.25, 0.4], 5) {
        assert_eq!(check_k_leaves_contraction(&d, 1).unwrap().answer(), has_hamiltonian_path(&d), "{d:?}");
    }
}

#[test]
fn z_normal_matches_path_search() {
    for d in corpus(80, 3..=6, &[0.2, 0.4], 909) {
        let n = d.order();
        for smask in 1u32..1 << n {
            for zmask in 0u32..1 << n {
                if smask & zmask != 0 {
                    continue;
                }
                let s: BTreeSet<usize> = (0..n).filter(|v| smask >> v & 1 == 1).collect();
                let z: BTreeSet<usize> = (0..n).filter(|v| zmask >> v & 1 == 1).collect();
                assert_eq!(is_z_normal(&d, &s, &z).unwrap(), z_normal_by_paths(&d, &s, &z), "{d:?} {s:?} {z:?}");
            }
        }
    }
}

#[test]
fn dpw_zero_iff_acyclic_up_to_five() {
    for n in 1..=4 {
        for d in all_digraphs(n) {
            assert_eq!(dpw_exact(&d).unwrap().0 == 0, d.is_acyclic(), "{d:?}");
        }
    }
    // every fifth five-vertex digraph keeps this under a few seconds in debug builds
    for d in all_digraphs(5).step_by(5) {
        assert_eq!(dpw_exact(&d).unwrap().0 == 0, d.is_acyclic(), "{d:?}");
    }
}

#[test]
fn dpw_witnesses_and_conversions_validate() {
    for d in corpus(150, 1..=8, &[0.2, 0.4, 0.6], 1234) {
        let (w, dec) = dpw_exact(&d).unwrap();
        assert_eq!(validate_dpd(&d, &dec), Ok(w));
        assert_eq!(validate_dagd(&d, &dec.to_dag_decomposition()), Ok(w));
        let arb = dpd_to_arboreal(&d, &dec).unwrap();
        assert!(validate_arboreal(&d, &arb).unwrap() <= w);
    }
}

#[test]
fn rejections_name_the_fault() {
    for d in corpus(60, 2..=7, &[0.3, 0.5], 42) {
        let (_, dec) = dpw_exact(&d).unwrap();
        let v = d.order() - 1;
        let dropped = PathDecomposition::new(
            dec.bags().iter().map(|b| b.iter().copied().filter(|&x| x != v).collect()).collect(),
        );
        assert_eq!(validate_dpd(&d, &dropped), Err(Violation::Uncovered(v)));
        if let Some(&(a, b)) = d.arcs().iter().find(|&&(a, b)| a != b) {
            // a single bag per vertex in an order that puts b strictly before a
            let mut order: Vec<usize> = (0..d.order()).filter(|&x| x != a && x != b).collect();
            order.insert(0, b);
            order.push(a);
            let bad = PathDecomposition::new(order.iter().map(|&x| vec![x]).collect());
            assert!(matches!(validate_dpd(&d, &bad), Err(Violation::ArcNotRespected(..))));
        }
    }
}

#[test]
fn reduction_round_trip_and_repair() {
    for seed in 0..40 {
        let vars = 3 + seed as usize % 3;
        let f = random_3cnf(vars, 1 + seed as usize % 4, seed).unwrap();
        let inst = reduce_cnf(&f);
        let d = inst.digraph();
        assert!(!d.is_acyclic());
        assert_eq!(validate_dpd(d, &canonical_width1_dpd(&inst)), Ok(1));
        for a in Assignment::all(vars).filter(|a| f.is_satisfied_by(a)) {
            let b = assignment_to_branching(&inst, &a).unwrap();
            assert_eq!(validate_out_branching(d, &b), Ok(vars));
            assert!(f.is_satisfied_by(&decode_assignment(&inst, &b).unwrap()));
            let repaired = repair_to_compatible(&inst, &b).unwrap();
            assert_eq!(validate_out_branching(d, &repaired), Ok(vars));
        }
    }
}

#[test]
fn repair_preserves_solver_witnesses() {
    for seed in 0..12 {
        let f = random_3cnf(3, 1 + seed as usize % 2, 100 + seed).unwrap();
        let inst = reduce_cnf(&f);
        let d = inst.digraph();
        let Some(w) = check_k_leaves_contraction(d, 3).unwrap().witness else { continue };
        let before = validate_out_branching(d, &w).unwrap();
        let repaired = repair_to_compatible(&inst, &w).unwrap();
        assert_eq!(validate_out_branching(d, &repaired), Ok(before));
        assert!(f.is_satisfied_by(&decode_assignment(&inst, &repaired).unwrap()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph_file_round_trip(d in digraph()) {
        let text = write_graph(&d);
        let back = parse_graph(&text).unwrap();
        prop_assert_eq!(&back, &d);
        prop_assert_eq!(write_graph(&back), text);
    }

    #[test]
    fn cnf_file_round_trip(vars in 3usize..8, clauses in 1usize..10, seed in any::<u64>()) {
        let f = random_3cnf(vars, clauses, seed).unwrap();
        let text = write_cnf(&f);
        let back = parse_cnf(&text).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(write_cnf(&back), text);
    }

    #[test]
    fn certificate_round_trip(d in digraph()) {
        let mut certs = Vec::new();
        if let Some(t) = any_out_branching(&d).unwrap() {
            certs.push(Certificate::from_tree(&t));
        }
        let (_, dec) = dpw_exact(&d).unwrap();
        certs.push(Certificate::from_path(&dec));
        certs.push(Certificate::from_dag(&dec.to_dag_decomposition()));
        certs.push(Certificate::from_arboreal(&dpd_to_arboreal(&d, &dec).unwrap()));
        for c in certs {
            let text = c.to_text();
            let back = parse_certificate(&text).unwrap();
            prop_assert_eq!(back.to_text(), text);
            // a one-bag DAG decomposition has no index arcs and reads back as a path decomposition
            prop_assert_eq!(certify(&d, &back).map(|a| a.value), certify(&d, &c).map(|a| a.value));
            prop_assert!(certify(&d, &c).is_ok());
        }
    }

    #[test]
    fn generator_is_reproducible(n in 0usize..12, p in 0.0f64..=1.0, seed in any::<u64>()) {
        prop_assert_eq!(write_graph(&random_digraph(n, p, seed).unwrap()), write_graph(&random_digraph(n, p, seed).unwrap()));
    }
}

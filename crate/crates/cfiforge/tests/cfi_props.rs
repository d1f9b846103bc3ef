use std::collections::HashSet;
use std::sync::Arc;

use cfiforge::cfi::{self, apply_flip, build_cfi, cfi_query, CfiNode, Parity};
use cfiforge::f2::BitVec;
use cfiforge::graphs::BaseGraph;
use proptest::prelude::*;

fn base_strategy() -> impl Strategy<Value = Arc<BaseGraph>> {
    prop_oneof![
        (1usize..=3).prop_map(|n| BaseGraph::hypercube(n).unwrap()),
        (3usize..=7).prop_map(|n| BaseGraph::cycle(n).unwrap()),
        (2usize..=7).prop_map(|n| BaseGraph::path(n).unwrap()),
    ]
    .prop_map(Arc::new)
}

fn instance() -> impl Strategy<Value = (Arc<BaseGraph>, Vec<usize>, BitVec)> {
    base_strategy().prop_flat_map(|g| {
        let nv = g.num_vertices();
        let ne = g.num_edges();
        (Just(g), prop::collection::vec(any::<bool>(), nv), prop::collection::vec(any::<bool>(), ne)).prop_map(|(g, s, f)| {
            let odd = (0..s.len()).filter(|&v| s[v]).collect();
            (g, odd, BitVec::from_bools(&f))
        })
    })
}

/// Vertices touched by an odd number of edges of `f`.
fn odd_vertices(g: &BaseGraph, f: &BitVec) -> Vec<usize> {
    let mut deg = vec![0; g.num_vertices()];
    for e in f.iter_ones() {
        let (u, v) = g.edges()[e];
        deg[u] += 1;
        deg[v] += 1;
    }
    (0..deg.len()).filter(|&v| deg[v] % 2 == 1).collect()
}

fn symdiff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let a: HashSet<_> = a.iter().copied().collect();
    let b: HashSet<_> = b.iter().copied().collect();
    let mut out: Vec<usize> = a.symmetric_difference(&b).copied().collect();
    out.sort();
    out
}

fn edge_set(s: &cfi::CfiStructure) -> HashSet<(CfiNode, CfiNode)> {
    let nodes = s.nodes();
    s.adjacency().into_iter().flat_map(|(a, b)| [(nodes[a], nodes[b]), (nodes[b], nodes[a])]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn node_count((g, odd, _) in instance()) {
        let s = build_cfi(g.clone(), &odd).unwrap();
        let gadgets: usize = (0..g.num_vertices()).map(|v| 1usize << (g.degree(v).max(1) - 1)).sum();
        prop_assert_eq!(s.num_nodes(), 2 * g.num_edges() + gadgets);
    }

    #[test]
    fn gadget_masks_have_the_vertex_parity((g, odd, _) in instance()) {
        let s = build_cfi(g.clone(), &odd).unwrap();
        for n in s.nodes() {
            if let CfiNode::Gadget { vertex, mask } = *n {
                prop_assert_eq!(mask.count_ones() % 2 == 1, odd.contains(&vertex));
            }
        }
    }

    #[test]
    fn flips_compose_as_a_group((g, odd, f1) in instance(), f2 in any::<u64>()) {
        let f2 = BitVec::from_mask(g.num_edges(), f2 & ((1u64 << g.num_edges()) - 1));
        let s = build_cfi(g.clone(), &odd).unwrap();
        let f12 = f1.xor(&f2);
        for x in s.nodes() {
            prop_assert_eq!(apply_flip(&g, &f1, &apply_flip(&g, &f2, x)), apply_flip(&g, &f12, x));
            prop_assert_eq!(apply_flip(&g, &f1, &apply_flip(&g, &f1, x)), *x);
        }
    }

    #[test]
    fn flip_moves_the_odd_set_by_its_boundary((g, odd, f) in instance()) {
        let s = build_cfi(g.clone(), &odd).unwrap();
        let target = symdiff(&odd, &odd_vertices(&g, &f));
        let t = build_cfi(g.clone(), &target).unwrap();
        let image = s.apply_flip_structure(&f).unwrap();
        prop_assert_eq!(image.odd_set(), target);
        // ρ_F is an isomorphism 𝔊^S → 𝔊^{S △ T_F}.
        let moved: HashSet<(CfiNode, CfiNode)> =
            edge_set(&s).into_iter().map(|(a, b)| (apply_flip(&g, &f, &a), apply_flip(&g, &f, &b))).collect();
        prop_assert_eq!(moved, edge_set(&t));
    }

    #[test]
    fn query_is_parity_of_the_odd_set((g, odd, _) in instance()) {
        let want = if odd.len() % 2 == 1 { Parity::Odd } else { Parity::Even };
        prop_assert_eq!(cfi_query(&g, &odd).unwrap(), want);
    }

    #[test]
    fn automorphism_flips_are_the_even_degree_sets(g in base_strategy()) {
        let c = cfi::cfi_automorphism_flips(&g);
        let m = g.num_edges();
        let brute: HashSet<Vec<u8>> = (0..1u64 << m)
            .map(|x| BitVec::from_mask(m, x))
            .filter(|f| odd_vertices(&g, f).is_empty())
            .map(|f| f.to_bits())
            .collect();
        let got: HashSet<Vec<u8>> = c.elements().iter().map(BitVec::to_bits).collect();
        prop_assert_eq!(got, brute);
    }
}

#[test]
fn isomorphism_search_follows_parity() {
    for g in [BaseGraph::cycle(4).unwrap(), BaseGraph::hypercube(2).unwrap(), BaseGraph::path(3).unwrap()] {
        let g = Arc::new(g);
        let group = g.automorphisms(1000).unwrap();
        let nv = g.num_vertices();
        for a in 0u64..1 << nv {
            let s: Vec<usize> = (0..nv).filter(|v| a >> v & 1 == 1).collect();
            let t: Vec<usize> = if s.len() % 2 == 0 { vec![] } else { vec![0] };
            let x = build_cfi(g.clone(), &s).unwrap();
            for (r, same) in [(t.clone(), true), (if t.is_empty() { vec![0] } else { vec![] }, false)] {
                let y = build_cfi(g.clone(), &r).unwrap();
                let iso = cfi::find_isomorphism(&x, &y, &group).unwrap();
                assert_eq!(iso.is_some(), same, "{s:?} vs {r:?}");
                if let Some(iso) = iso {
                    let act = cfi::BaseAction::new(&g, &iso.perm).unwrap();
                    assert!(cfi::verify_isomorphism(&x, &y, &act, &iso.flip));
                }
            }
        }
    }
}

#[test]
fn hypercube_automorphism_count() {
    // |Aut(Q_n)| = 2^n · n!
    for (n, want) in [(1, 2), (2, 8), (3, 48), (4, 384)] {
        assert_eq!(BaseGraph::hypercube(n).unwrap().automorphisms(100_000).unwrap().len(), want);
    }
}

#[test]
fn cycle_space_dimension() {
    for g in [BaseGraph::hypercube(3).unwrap(), BaseGraph::cycle(5).unwrap(), BaseGraph::path(4).unwrap()] {
        assert_eq!(g.cycle_space().dim(), g.num_edges() + 1 - g.num_vertices());
    }
}

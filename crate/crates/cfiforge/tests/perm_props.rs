use std::collections::HashSet;

use cfiforge::perm::{self, Partition, Perm, PermGroup};
use cfiforge::sampling;
use proptest::prelude::*;

const CAP: usize = 1_000_000;

/// Closure of the generators under composition, independent of the library's enumerator.
fn closure(g: &PermGroup) -> HashSet<Vec<usize>> {
    let n = g.degree();
    let gens: Vec<Vec<usize>> = g.generators().iter().map(Perm::images).collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::from([(0..n).collect()]);
    let mut frontier: Vec<Vec<usize>> = seen.iter().cloned().collect();
    while let Some(p) = frontier.pop() {
        for s in &gens {
            let q: Vec<usize> = (0..n).map(|i| s[p[i]]).collect();
            if seen.insert(q.clone()) {
                frontier.push(q);
            }
        }
    }
    seen
}

/// The product group for one part is inside `G`: all transpositions of parts of size
/// below five, all 3-cycles of larger parts.
fn part_supported(elems: &HashSet<Vec<usize>>, n: usize, part: &[usize]) -> bool {
    let swap = |a: usize, b: usize| -> Vec<usize> {
        (0..n).map(|i| if i == a { b } else if i == b { a } else { i }).collect()
    };
    let three = |a: usize, b: usize, c: usize| -> Vec<usize> {
        (0..n).map(|i| if i == a { b } else if i == b { c } else if i == c { a } else { i }).collect()
    };
    if part.len() < 5 {
        part.iter().all(|&a| part.iter().all(|&b| a >= b || elems.contains(&swap(a, b))))
    } else {
        part.iter().all(|&a| part.iter().all(|&b| part.iter().all(|&c| a == b || b == c || a == c || elems.contains(&three(a, b, c)))))
    }
}

fn oracle_coarsest(g: &PermGroup) -> Partition {
    let n = g.degree();
    let elems = closure(g);
    let supporting: Vec<Partition> =
        perm::all_partitions(n).into_iter().filter(|p| p.parts().iter().all(|q| part_supported(&elems, n, q))).collect();
    let top = supporting.iter().min_by_key(|p| p.parts().len()).unwrap().clone();
    assert!(supporting.iter().all(|p| p.refines(&top)), "supporting partitions have no common coarsening");
    top
}

fn group_strategy() -> impl Strategy<Value = (PermGroup, Perm)> {
    (3usize..=7, any::<u64>()).prop_map(|(n, seed)| {
        let mut r = sampling::rng(seed);
        let g = sampling::random_subgroup(&mut r, n);
        (g, sampling::random_perm(&mut r, n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn engines_match_the_brute_force_coarsest_partition((g, _) in group_strategy()) {
        let want = oracle_coarsest(&g);
        prop_assert_eq!(perm::coarsest_spa_exhaustive(&g, CAP).unwrap(), want.clone());
        prop_assert_eq!(perm::coarsest_spa_merge(&g, CAP).unwrap(), want.clone());
        let r = perm::coarsest_alt_supporting_partition(&g, CAP).unwrap();
        prop_assert!(r.certified());
        prop_assert_eq!(r.partition, want);
    }

    #[test]
    fn sandwich_and_conjugacy((g, sigma) in group_strategy()) {
        prop_assert!(perm::sandwich_check(&g, CAP).unwrap());
        prop_assert!(perm::conjugate_partition_check(&g, &sigma, CAP).unwrap());
        let p = perm::coarsest_spa_exhaustive(&g, CAP).unwrap();
        let q = perm::coarsest_spa_exhaustive(&g.conjugate(&sigma), CAP).unwrap();
        prop_assert_eq!(p.apply(&sigma), q);
    }

    #[test]
    fn enumeration_matches_generator_closure((g, _) in group_strategy()) {
        let el = g.enumerate(CAP).unwrap();
        let got: HashSet<Vec<usize>> = el.list().iter().map(Perm::images).collect();
        prop_assert_eq!(got, closure(&g));
    }

    #[test]
    fn orbit_stabilizer((g, _) in group_strategy(), x in 0usize..3) {
        let orbit = g.orbit(x, |p, &y| p.apply(y));
        let stab = g.stabilizer(&x, |p, &y| p.apply(y), CAP).unwrap();
        prop_assert_eq!(orbit.len() * stab.order(CAP).unwrap(), g.order(CAP).unwrap());
        prop_assert_eq!(g.index(&stab, CAP).unwrap(), orbit.len());
    }

    #[test]
    fn composition_laws(n in 1usize..=8, s in any::<u64>()) {
        let mut r = sampling::rng(s);
        let a = sampling::random_perm(&mut r, n);
        let b = sampling::random_perm(&mut r, n);
        let c = sampling::random_perm(&mut r, n);
        prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
        prop_assert!(a.compose(&a.inverse()).is_identity());
        for i in 0..n {
            prop_assert_eq!(a.compose(&b).apply(i), a.apply(b.apply(i)));
        }
        prop_assert_eq!(a.compose(&b).is_even(), a.is_even() == b.is_even());
        prop_assert_eq!(Perm::parse_cycles(n, &a.to_cycles()).unwrap(), a);
    }
}

#[test]
fn alternating_orbit_sizes_match_enumeration() {
    for n in 4..=6 {
        for p in perm::all_partitions(n) {
            let (formula, _) = perm::alt_partition_orbit_size(&p).unwrap();
            let alt = PermGroup::alternating(n).enumerate(CAP).unwrap();
            let images: HashSet<Partition> = alt.list().iter().map(|s| p.apply(s)).collect();
            assert_eq!(formula, images.len().into(), "{}", p.to_one_based_string());
        }
    }
}

#[test]
fn partition_counts_are_bell_numbers() {
    let bell = [1, 1, 2, 5, 15, 52, 203, 877];
    for (n, &b) in bell.iter().enumerate().skip(1) {
        assert_eq!(perm::all_partitions(n).len(), b);
    }
}

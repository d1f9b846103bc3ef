//! Seeded random instances: edge subsets and permutation groups.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::f2::BitVec;
use crate::perm::{Perm, PermGroup};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly random subset of `0..m`.
pub fn random_subset(rng: &mut SeededRng, m: usize) -> BitVec {
    BitVec::from_indices(m, (0..m).filter(|_| rng.gen_bool(0.5)))
}

pub fn random_perm(rng: &mut SeededRng, n: usize) -> Perm {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    Perm::from_usize(&v).expect("shuffle is a permutation")
}

/// A random subgroup of `Sym(n)` generated by one to three elements. Generators are
/// drawn from several families (transpositions, 3-cycles, full cycles on a random
/// subset, products of disjoint transpositions, arbitrary permutations of a subset) so
/// that small and intransitive groups appear as often as large ones.
pub fn random_subgroup(rng: &mut SeededRng, n: usize) -> PermGroup {
    let k = rng.gen_range(1..=3);
    let gens = (0..k).map(|_| random_generator(rng, n)).collect();
    PermGroup::new(n, gens).expect("generators have the right degree")
}

fn random_subset_of_size(rng: &mut SeededRng, n: usize, k: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v.truncate(k);
    v
}

fn random_generator(rng: &mut SeededRng, n: usize) -> Perm {
    if n < 2 {
        return Perm::identity(n);
    }
    match rng.gen_range(0..5) {
        0 => {
            let s = random_subset_of_size(rng, n, 2);
            Perm::transposition(n, s[0], s[1])
        }
        1 if n >= 3 => Perm::cycle(n, &random_subset_of_size(rng, n, 3)),
        2 => {
            let k = rng.gen_range(2..=n);
            Perm::cycle(n, &random_subset_of_size(rng, n, k))
        }
        3 => {
            let s = random_subset_of_size(rng, n, n);
            let pairs = rng.gen_range(1..=n / 2);
            s.chunks(2).take(pairs).fold(Perm::identity(n), |acc, c| acc.compose(&Perm::transposition(n, c[0], c[1])))
        }
        _ => {
            let k = rng.gen_range(2..=n);
            let s = random_subset_of_size(rng, n, k);
            let mut t = s.clone();
            t.shuffle(rng);
            let mut img: Vec<usize> = (0..n).collect();
            for (a, b) in s.iter().zip(&t) {
                img[*a] = *b;
            }
            Perm::from_usize(&img).expect("bijection on a subset")
        }
    }
}

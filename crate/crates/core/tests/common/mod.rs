#![allow(dead_code)]

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use udg_core::canonical::canonize;
use udg_core::lattice::enumerate_units;
use udg_core::{GraphMatrix, LatticePoint, ZobristTable};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A connected unit-distance graph on `n` vertices grown by random unit
/// steps, that fits the canonical box.
pub fn random_connected(rng: &mut impl Rng, n: usize) -> GraphMatrix {
    let table = ZobristTable::default();
    loop {
        let mut rows = vec![LatticePoint::ORIGIN];
        while rows.len() < n {
            let from = *rows.choose(rng).unwrap();
            let p = from + *enumerate_units().choose(rng).unwrap();
            if !rows.contains(&p) {
                rows.push(p);
            }
        }
        let g = GraphMatrix::new(rows).unwrap();
        if canonize(&table, &g).is_some() {
            return g;
        }
    }
}

/// A uniformly random permutation of `0..n`.
pub fn permutation(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

pub fn random_point(rng: &mut impl Rng, lo: i32, hi: i32) -> LatticePoint {
    LatticePoint::new(
        rng.random_range(lo..=hi),
        rng.random_range(lo..=hi),
        rng.random_range(lo..=hi),
        rng.random_range(lo..=hi),
    )
}

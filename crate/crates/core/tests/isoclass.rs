mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::Rng;
use udg_core::canonical::canonize;
use udg_core::isoclass::{canonical_label, count_iso_classes, minkowski_sum, to_abstract, AbstractGraph};
use udg_core::{GraphMatrix, LatticePoint, ZobristTable};

fn random_abstract(rng: &mut impl Rng, n: usize, density: f64) -> AbstractGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(density) {
                edges.push((i, j));
            }
        }
    }
    AbstractGraph::from_edges(n, &edges)
}

fn degree_sequence(g: &AbstractGraph) -> Vec<usize> {
    let mut d: Vec<usize> = (0..g.vertex_count()).map(|v| g.degree(v)).collect();
    d.sort_unstable();
    d
}

fn point_set(g: &GraphMatrix) -> BTreeSet<LatticePoint> {
    g.rows().iter().copied().collect()
}

fn small_set(rng: &mut impl Rng) -> Vec<LatticePoint> {
    let n = rng.random_range(1..=4);
    common::random_connected(rng, n).into_rows()
}

#[test]
fn labels_survive_relabeling() {
    let mut rng = common::rng(21);
    for _ in 0..500 {
        let n = rng.random_range(1..=14);
        let density = rng.random_range(0.1..0.9);
        let g = random_abstract(&mut rng, n, density);
        let h = g.relabeled(&common::permutation(&mut rng, n));
        assert_eq!(canonical_label(&g), canonical_label(&h));
    }
}

#[test]
fn labels_separate_distinguishable_graphs() {
    let mut rng = common::rng(22);
    let mut checked = 0;
    while checked < 500 {
        let n = rng.random_range(3..=12);
        let a = random_abstract(&mut rng, n, 0.4);
        let b = random_abstract(&mut rng, n, 0.4);
        if degree_sequence(&a) == degree_sequence(&b) {
            continue;
        }
        assert_ne!(canonical_label(&a), canonical_label(&b));
        checked += 1;
    }
}

#[test]
fn regular_graphs_are_told_apart() {
    // C6 and two triangles share a degree sequence.
    let c6 = AbstractGraph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
    let k3k3 = AbstractGraph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
    assert_ne!(canonical_label(&c6), canonical_label(&k3k3));
    // Prism versus K3,3.
    let prism = AbstractGraph::from_edges(
        6,
        &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)],
    );
    let k33 = AbstractGraph::from_edges(
        6,
        &[(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)],
    );
    assert_ne!(canonical_label(&prism), canonical_label(&k33));
}

#[test]
fn iso_classes_never_exceed_lattice_classes() {
    let table = ZobristTable::default();
    let mut rng = common::rng(23);
    let graphs: Vec<GraphMatrix> = (0..200).map(|_| common::random_connected(&mut rng, 6)).collect();
    let hashes: BTreeSet<u64> = graphs.iter().map(|g| canonize(&table, g).unwrap().hash()).collect();
    let classes = count_iso_classes(graphs.iter());
    assert!(classes <= hashes.len());
    assert!(classes >= 2);
    assert_eq!(count_iso_classes(std::iter::empty()), 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn embedding_moves_keep_the_label(seed in any::<u64>(), n in 1usize..14) {
        let mut rng = common::rng(seed);
        let g = common::random_connected(&mut rng, n);
        let table = ZobristTable::default();
        let c = canonize(&table, &g).unwrap().matrix();
        prop_assert_eq!(canonical_label(&to_abstract(&g)), canonical_label(&to_abstract(&c)));
    }

    #[test]
    fn minkowski_sum_commutes(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (a, b) = (small_set(&mut rng), small_set(&mut rng));
        let ab = minkowski_sum(&a, &b).unwrap();
        let ba = minkowski_sum(&b, &a).unwrap();
        prop_assert_eq!(point_set(&ab.matrix), point_set(&ba.matrix));
        prop_assert_eq!(ab.disjoint, ba.disjoint);
        prop_assert_eq!(ab.disjoint, ab.matrix.len() == a.len() * b.len());
    }

    #[test]
    fn minkowski_sum_associates(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (a, b, c) = (small_set(&mut rng), small_set(&mut rng), small_set(&mut rng));
        let left = minkowski_sum(&minkowski_sum(&a, &b).unwrap().matrix.into_rows(), &c);
        let right = minkowski_sum(&a, &minkowski_sum(&b, &c).unwrap().matrix.into_rows());
        match (left, right) {
            (Ok(l), Ok(r)) => prop_assert_eq!(point_set(&l.matrix), point_set(&r.matrix)),
            (l, r) => prop_assert_eq!(l.is_err(), r.is_err()),
        }
    }
}

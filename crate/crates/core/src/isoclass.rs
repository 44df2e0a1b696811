//! Abstract-graph isomorphism classes and Minkowski sums of point sets.
//!
//! Canonical labels come from colour refinement followed by an
//! individualisation search: each leaf of the search tree is a discrete
//! ordered partition, read as a vertex ordering, and the label is the
//! smallest adjacency bit string over all leaves. Pairs are enumerated
//! column by column (`(0,1), (0,2), (1,2), (0,3), …`), so once the first `k`
//! cells are singletons a prefix of the label is fixed and worse branches can
//! be cut.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::canonical::{CanonError, Canonizer, GraphMatrix, ZobristTable};
use crate::lattice::{is_unit_distance, LatticePoint};

/// A simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbstractGraph {
    adj: Vec<Vec<bool>>,
}

impl AbstractGraph {
    pub fn empty(n: usize) -> Self {
        AbstractGraph {
            adj: vec![vec![false; n]; n],
        }
    }

    /// Panics on self-loops or out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = AbstractGraph::empty(n);
        for &(i, j) in edges {
            assert!(i != j, "self-loop at {i}");
            g.adj[i][j] = true;
            g.adj[j][i] = true;
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.iter().filter(|&&x| x).count()).sum::<usize>() / 2
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i][j]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|&&x| x).count()
    }

    /// The graph with vertex `v` renamed to `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> AbstractGraph {
        let n = self.vertex_count();
        let mut out = AbstractGraph::empty(n);
        for i in 0..n {
            for j in 0..n {
                out.adj[perm[i]][perm[j]] = self.adj[i][j];
            }
        }
        out
    }
}

/// Forget the embedding, keep unit-distance adjacency.
pub fn to_abstract(g: &GraphMatrix) -> AbstractGraph {
    points_to_abstract(g.rows())
}

pub fn points_to_abstract(rows: &[LatticePoint]) -> AbstractGraph {
    let n = rows.len();
    let mut out = AbstractGraph::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            if is_unit_distance(rows[i], rows[j]) {
                out.adj[i][j] = true;
                out.adj[j][i] = true;
            }
        }
    }
    out
}

/// Canonical label: equal for two graphs exactly when they are isomorphic.
///
/// The first bytes hold the vertex count (little-endian `u32`), followed by
/// the packed adjacency bits of the canonical ordering.
pub fn canonical_label(g: &AbstractGraph) -> Vec<u8> {
    let n = g.vertex_count();
    let mut search = LabelSearch {
        g,
        best: None,
        scratch: Vec::new(),
    };
    let cells = refine(g, vec![(0..n).collect()]);
    search.descend(cells);
    let bits = search.best.unwrap_or_default();
    let mut label = Vec::with_capacity(4 + bits.len().div_ceil(8));
    label.extend_from_slice(&(n as u32).to_le_bytes());
    for chunk in bits.chunks(8) {
        let mut byte = 0u8;
        for (k, &b) in chunk.iter().enumerate() {
            byte |= (b as u8) << (7 - k);
        }
        label.push(byte);
    }
    label
}

type Partition = Vec<Vec<usize>>;

/// Split cells by neighbour counts into every cell until stable. Cells are
/// only ever subdivided in place, with sub-cells ordered by their count
/// signature, so the result commutes with relabelling.
fn refine(g: &AbstractGraph, mut cells: Partition) -> Partition {
    let n = g.vertex_count();
    let mut cell_of = vec![0usize; n];
    loop {
        for (c, cell) in cells.iter().enumerate() {
            for &v in cell {
                cell_of[v] = c;
            }
        }
        let k = cells.len();
        let mut next: Partition = Vec::with_capacity(k);
        for cell in &cells {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut keyed: Vec<(Vec<u32>, usize)> = cell
                .iter()
                .map(|&v| {
                    let mut counts = vec![0u32; k];
                    for (w, &e) in g.adj[v].iter().enumerate() {
                        if e {
                            counts[cell_of[w]] += 1;
                        }
                    }
                    (counts, v)
                })
                .collect();
            keyed.sort();
            let mut start = 0;
            for i in 1..=keyed.len() {
                if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                    let mut sub: Vec<usize> = keyed[start..i].iter().map(|x| x.1).collect();
                    sub.sort_unstable();
                    next.push(sub);
                    start = i;
                }
            }
        }
        if next.len() == cells.len() {
            return next;
        }
        cells = next;
    }
}

struct LabelSearch<'g> {
    g: &'g AbstractGraph,
    best: Option<Vec<bool>>,
    scratch: Vec<bool>,
}

impl LabelSearch<'_> {
    /// Adjacency bits among the leading singleton cells, in column order.
    fn prefix(&mut self, cells: &Partition) {
        self.scratch.clear();
        let fixed: Vec<usize> = cells.iter().take_while(|c| c.len() == 1).map(|c| c[0]).collect();
        for j in 1..fixed.len() {
            for i in 0..j {
                self.scratch.push(self.g.has_edge(fixed[i], fixed[j]));
            }
        }
    }

    fn descend(&mut self, cells: Partition) {
        self.prefix(&cells);
        if let Some(best) = &self.best {
            let len = self.scratch.len();
            if self.scratch[..] > best[..len] {
                return;
            }
        }
        let Some(target) = cells.iter().position(|c| c.len() > 1) else {
            if self.best.as_ref().is_none_or(|b| self.scratch < *b) {
                self.best = Some(self.scratch.clone());
            }
            return;
        };
        for &v in &cells[target] {
            let mut split: Partition = Vec::with_capacity(cells.len() + 1);
            split.extend_from_slice(&cells[..target]);
            split.push(vec![v]);
            split.push(cells[target].iter().copied().filter(|&w| w != v).collect());
            split.extend_from_slice(&cells[target + 1..]);
            let refined = refine(self.g, split);
            self.descend(refined);
        }
    }
}

/// Number of distinct abstract isomorphism classes.
pub fn count_iso_classes<'a, I>(graphs: I) -> usize
where
    I: IntoIterator<Item = &'a GraphMatrix>,
{
    graphs
        .into_iter()
        .map(|g| canonical_label(&to_abstract(g)))
        .collect::<BTreeSet<_>>()
        .len()
}

/// The point set `A + B` with a flag for `|A + B| = |A|·|B|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinkowskiSum {
    pub matrix: GraphMatrix,
    pub disjoint: bool,
}

/// Pairwise sums in order of first appearance (`a` outer, `b` inner).
/// Fails when no symmetry image of the sum fits the coefficient box.
pub fn minkowski_sum(a: &[LatticePoint], b: &[LatticePoint]) -> Result<MinkowskiSum, CanonError> {
    let mut rows: Vec<LatticePoint> = Vec::with_capacity(a.len() * b.len());
    let mut seen = BTreeSet::new();
    for &p in a {
        for &q in b {
            let s = p + q;
            if seen.insert(s) {
                rows.push(s);
            }
        }
    }
    let disjoint = rows.len() == a.len() * b.len();
    let matrix = GraphMatrix::new(rows)?;
    if !fits_some_image(&matrix) {
        let (column, value) = widest_column(&matrix);
        return Err(CanonError::OutOfBounds { column, value });
    }
    Ok(MinkowskiSum { matrix, disjoint })
}

fn fits_some_image(g: &GraphMatrix) -> bool {
    // The hash values are irrelevant here; any table answers the question.
    use crate::canonical::SYMMETRIES;
    SYMMETRIES.iter().any(|s| {
        let mut min = [i32::MAX; 4];
        let mut max = [i32::MIN; 4];
        for &p in g.rows() {
            let q = s.apply(p);
            for l in 0..4 {
                min[l] = min[l].min(q.0[l]);
                max[l] = max[l].max(q.0[l]);
            }
        }
        (0..4).all(|l| max[l] - min[l] <= crate::canonical::BOX_MAX)
    })
}

fn widest_column(g: &GraphMatrix) -> (usize, i32) {
    (0..4)
        .map(|l| {
            let lo = g.rows().iter().map(|p| p.0[l]).min().unwrap_or(0);
            let hi = g.rows().iter().map(|p| p.0[l]).max().unwrap_or(0);
            (l, hi - lo)
        })
        .max_by_key(|&(_, w)| w)
        .unwrap_or((0, 0))
}

/// Canonize a Minkowski sum with `table`.
pub fn canonical_minkowski_sum(
    table: &ZobristTable,
    a: &[LatticePoint],
    b: &[LatticePoint],
) -> Result<(crate::canonical::CanonicalGraph, bool), CanonError> {
    let sum = minkowski_sum(a, b)?;
    let canon = Canonizer::new(table)
        .canonize(sum.matrix.rows())
        .expect("sum fits at least one symmetry image");
    Ok((canon, sum.disjoint))
}

//! Canonical forms of lattice-embedded graphs.
//!
//! A graph is identified up to vertex order, translation and the twelve
//! lattice symmetries (six rotations by π/3, each optionally preceded by the
//! reflection that swaps `1 ↔ ω₁ω₃` and `ω₁ ↔ ω₃`). For each symmetry image
//! the columns are shifted so their minimum is zero, every row is encoded as a
//! base-21 integer, and the image's Zobrist hash is the XOR of per-code keys.
//! The image with the largest hash is the canonical representative, rows
//! sorted by code.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::lattice::LatticePoint;

/// Side length of the coefficient box after translation.
pub const BOX_SIZE: i32 = 21;
/// Largest coefficient allowed after translation.
pub const BOX_MAX: i32 = BOX_SIZE - 1;
/// Number of distinct point codes, `21⁴`.
pub const CODE_SPACE: usize = (BOX_SIZE * BOX_SIZE * BOX_SIZE * BOX_SIZE) as usize;

/// Zobrist seed used when none is configured.
pub const DEFAULT_SEED: u64 = 0x5eed_0d06_2024_0001;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CanonError {
    #[error("coefficient {value} in column {column} does not fit the box [0, {BOX_MAX}]")]
    OutOfBounds { column: usize, value: i32 },
    #[error("rows {first} and {second} are the same point")]
    DuplicateRow { first: usize, second: usize },
    #[error("batch of {rows} rows is not a multiple of the vertex count {n}")]
    RaggedBatch { rows: usize, n: usize },
}

/// An ordered list of distinct lattice points: one embedding of a graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GraphMatrix {
    rows: Vec<LatticePoint>,
}

impl GraphMatrix {
    pub fn new(rows: Vec<LatticePoint>) -> Result<Self, CanonError> {
        for (i, p) in rows.iter().enumerate() {
            if let Some(j) = rows[i + 1..].iter().position(|q| q == p) {
                return Err(CanonError::DuplicateRow {
                    first: i,
                    second: i + 1 + j,
                });
            }
        }
        Ok(GraphMatrix { rows })
    }

    /// Caller guarantees the rows are pairwise distinct.
    pub(crate) fn from_distinct(rows: Vec<LatticePoint>) -> Self {
        debug_assert!(GraphMatrix::new(rows.clone()).is_ok());
        GraphMatrix { rows }
    }

    pub fn from_coords(rows: &[[i32; 4]]) -> Result<Self, CanonError> {
        GraphMatrix::new(rows.iter().copied().map(LatticePoint).collect())
    }

    /// The Moser spindle: 7 vertices, 11 edges.
    pub fn moser_spindle() -> Self {
        GraphMatrix::from_distinct(
            [
                [0, 0, 0, 0],
                [1, 0, 0, 0],
                [0, 1, 0, 0],
                [0, 0, 1, 0],
                [0, 0, 0, 1],
                [1, 1, 0, 0],
                [0, 0, 1, 1],
            ]
            .into_iter()
            .map(LatticePoint)
            .collect(),
        )
    }

    #[inline]
    pub fn rows(&self) -> &[LatticePoint] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<LatticePoint> {
        self.rows
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn translated(&self, by: LatticePoint) -> GraphMatrix {
        GraphMatrix {
            rows: self.rows.iter().map(|&p| p + by).collect(),
        }
    }

    /// Rows reordered so that row `i` of the result is row `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> GraphMatrix {
        assert_eq!(order.len(), self.rows.len());
        GraphMatrix {
            rows: order.iter().map(|&i| self.rows[i]).collect(),
        }
    }

    pub fn contains(&self, p: &LatticePoint) -> bool {
        self.rows.contains(p)
    }
}

/// A 4×4 integer matrix acting on row vectors of lattice coefficients.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symmetry(pub [[i32; 4]; 4]);

impl Symmetry {
    pub const IDENTITY: Symmetry = Symmetry([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);

    /// Rotation by π/3: multiplication by `ω₁`.
    pub const ROTATION: Symmetry = Symmetry([[0, 1, 0, 0], [-1, 1, 0, 0], [0, 0, 0, 1], [0, 0, -1, 1]]);

    /// Reflection `z ↦ ω₁ω₃·z̄`, swapping `1 ↔ ω₁ω₃` and `ω₁ ↔ ω₃`.
    pub const REFLECTION: Symmetry = Symmetry([[0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]);

    /// `p · M` for a row vector `p`.
    #[inline]
    pub const fn apply(&self, p: LatticePoint) -> LatticePoint {
        let m = &self.0;
        let v = p.0;
        let mut out = [0i32; 4];
        let mut l = 0;
        while l < 4 {
            out[l] = v[0] * m[0][l] + v[1] * m[1][l] + v[2] * m[2][l] + v[3] * m[3][l];
            l += 1;
        }
        LatticePoint(out)
    }

    /// Matrix product `self · rhs` (apply `self` first, then `rhs`).
    pub const fn then(&self, rhs: &Symmetry) -> Symmetry {
        let mut out = [[0i32; 4]; 4];
        let mut r = 0;
        while r < 4 {
            out[r] = rhs.apply(LatticePoint(self.0[r])).0;
            r += 1;
        }
        Symmetry(out)
    }
}

/// `[I, Ro, …, Ro⁵, Re, Re·Ro, …, Re·Ro⁵]`.
pub const SYMMETRIES: [Symmetry; 12] = build_symmetries();

const fn build_symmetries() -> [Symmetry; 12] {
    let mut out = [Symmetry::IDENTITY; 12];
    let mut k = 1;
    while k < 6 {
        out[k] = out[k - 1].then(&Symmetry::ROTATION);
        k += 1;
    }
    out[6] = Symmetry::REFLECTION;
    k = 7;
    while k < 12 {
        out[k] = out[k - 1].then(&Symmetry::ROTATION);
        k += 1;
    }
    out
}

/// Index of `Ro` in [`SYMMETRIES`].
pub const ROTATION_INDEX: usize = 1;
/// Index of `Re` in [`SYMMETRIES`].
pub const REFLECTION_INDEX: usize = 6;

/// `g · SYMMETRIES[t]`, row by row.
pub fn apply_symmetry(g: &GraphMatrix, t: usize) -> GraphMatrix {
    let sym = &SYMMETRIES[t];
    GraphMatrix {
        rows: g.rows.iter().map(|&p| sym.apply(p)).collect(),
    }
}

fn column_min(rows: &[LatticePoint]) -> [i32; 4] {
    let mut min = [i32::MAX; 4];
    for p in rows {
        for (m, &x) in min.iter_mut().zip(p.0.iter()) {
            *m = (*m).min(x);
        }
    }
    min
}

/// Shift every column so its minimum is zero.
pub fn normalize_translation(g: &GraphMatrix) -> Result<GraphMatrix, CanonError> {
    if g.is_empty() {
        return Ok(g.clone());
    }
    let min = column_min(&g.rows);
    let rows: Vec<LatticePoint> = g.rows.iter().map(|&p| p - LatticePoint(min)).collect();
    for p in &rows {
        for (column, &value) in p.0.iter().enumerate() {
            if value > BOX_MAX {
                return Err(CanonError::OutOfBounds { column, value });
            }
        }
    }
    Ok(GraphMatrix { rows })
}

/// Base-21 code of a point in the box, `a + 21b + 21²c + 21³d`.
#[inline]
pub fn point_code(p: LatticePoint) -> u32 {
    let [a, b, c, d] = p.0;
    assert!(
        p.0.iter().all(|x| (0..=BOX_MAX).contains(x)),
        "point {:?} outside the encoding box",
        p.0
    );
    (a + BOX_SIZE * (b + BOX_SIZE * (c + BOX_SIZE * d))) as u32
}

#[inline]
pub fn decode_point(code: u32) -> LatticePoint {
    debug_assert!((code as usize) < CODE_SPACE);
    let s = BOX_SIZE as u32;
    let a = code % s;
    let b = (code / s) % s;
    let c = (code / (s * s)) % s;
    let d = code / (s * s * s);
    LatticePoint([a as i32, b as i32, c as i32, d as i32])
}

/// One pseudo-random 64-bit key per point code.
pub struct ZobristTable {
    keys: Box<[u64]>,
    seed: u64,
}

impl ZobristTable {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let keys = (0..CODE_SPACE).map(|_| rng.next_u64()).collect();
        ZobristTable { keys, seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn key(&self, code: u32) -> u64 {
        self.keys[code as usize]
    }

    pub fn keys(&self) -> &[u64] {
        &self.keys
    }
}

impl fmt::Debug for ZobristTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ZobristTable")
            .field("seed", &self.seed)
            .finish_non_exhaustive()
    }
}

impl Default for ZobristTable {
    fn default() -> Self {
        ZobristTable::new(DEFAULT_SEED)
    }
}

/// XOR of the keys of all rows. Rows must already lie in the box.
pub fn zobrist_hash(table: &ZobristTable, g: &GraphMatrix) -> u64 {
    g.rows.iter().fold(0, |h, &p| h ^ table.key(point_code(p)))
}

/// A graph in canonical form: point codes sorted ascending, plus its hash.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalGraph {
    codes: Box<[u32]>,
    hash: u64,
}

impl CanonicalGraph {
    /// Rebuild from stored parts; checks that codes are sorted, distinct and
    /// in range and that the hash matches `table`.
    pub fn from_parts(codes: Vec<u32>, hash: u64, table: &ZobristTable) -> Option<Self> {
        let sorted = codes.windows(2).all(|w| w[0] < w[1]);
        let in_range = codes.iter().all(|&c| (c as usize) < CODE_SPACE);
        if !sorted || !in_range {
            return None;
        }
        let expected = codes.iter().fold(0, |h, &c| h ^ table.key(c));
        (expected == hash).then(|| CanonicalGraph {
            codes: codes.into_boxed_slice(),
            hash,
        })
    }

    #[inline]
    pub fn hash(&self) -> u64 {
        self.hash
    }

    #[inline]
    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.codes.len()
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = LatticePoint> + '_ {
        self.codes.iter().map(|&c| decode_point(c))
    }

    pub fn matrix(&self) -> GraphMatrix {
        GraphMatrix::from_distinct(self.rows().collect())
    }
}

/// Reusable scratch space for canonizing many graphs against one table.
pub struct Canonizer<'t> {
    table: &'t ZobristTable,
    image: Vec<LatticePoint>,
}

impl<'t> Canonizer<'t> {
    pub fn new(table: &'t ZobristTable) -> Self {
        Canonizer {
            table,
            image: Vec::new(),
        }
    }

    pub fn table(&self) -> &'t ZobristTable {
        self.table
    }

    /// Canonical form of a set of distinct points, or `None` when no symmetry
    /// image fits the box.
    pub fn canonize(&mut self, rows: &[LatticePoint]) -> Option<CanonicalGraph> {
        let keys = &self.table.keys;
        let mut best: Option<(u64, usize, [i32; 4])> = None;
        for (t, sym) in SYMMETRIES.iter().enumerate() {
            self.image.clear();
            let mut min = [i32::MAX; 4];
            let mut max = [i32::MIN; 4];
            for &p in rows {
                let q = sym.apply(p);
                for l in 0..4 {
                    min[l] = min[l].min(q.0[l]);
                    max[l] = max[l].max(q.0[l]);
                }
                self.image.push(q);
            }
            if (0..4).any(|l| max[l] - min[l] > BOX_MAX) {
                continue;
            }
            let hash = self
                .image
                .iter()
                .fold(0, |h, &q| h ^ keys[shifted_code(q, &min) as usize]);
            // Strict comparison: the lowest symmetry index wins ties.
            if best.is_none_or(|(h, _, _)| hash > h) {
                best = Some((hash, t, min));
            }
        }
        let (hash, t, min) = best?;
        let sym = &SYMMETRIES[t];
        let mut codes: Vec<u32> = rows.iter().map(|&p| shifted_code(sym.apply(p), &min)).collect();
        codes.sort_unstable();
        Some(CanonicalGraph {
            codes: codes.into_boxed_slice(),
            hash,
        })
    }
}

#[inline]
fn shifted_code(q: LatticePoint, min: &[i32; 4]) -> u32 {
    let a = q.0[0] - min[0];
    let b = q.0[1] - min[1];
    let c = q.0[2] - min[2];
    let d = q.0[3] - min[3];
    (a + BOX_SIZE * (b + BOX_SIZE * (c + BOX_SIZE * d))) as u32
}

/// Canonize one graph.
pub fn canonize(table: &ZobristTable, g: &GraphMatrix) -> Option<CanonicalGraph> {
    Canonizer::new(table).canonize(&g.rows)
}

/// `m` graphs of `n` vertices each, stored row-major as one dense `m × n × 4`
/// block.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphBatch {
    n: usize,
    rows: Vec<LatticePoint>,
}

impl GraphBatch {
    pub fn new(n: usize) -> Self {
        GraphBatch { n, rows: Vec::new() }
    }

    pub fn from_rows(n: usize, rows: Vec<LatticePoint>) -> Result<Self, CanonError> {
        if rows.len().checked_rem(n).unwrap_or(rows.len()) != 0 {
            return Err(CanonError::RaggedBatch { rows: rows.len(), n });
        }
        Ok(GraphBatch { n, rows })
    }

    /// Panics if `g` does not have the batch's vertex count.
    pub fn push(&mut self, g: &GraphMatrix) {
        assert_eq!(g.len(), self.n, "graph vertex count differs from batch");
        self.rows.extend_from_slice(&g.rows);
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.rows.len().checked_div(self.n).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn graph(&self, i: usize) -> &[LatticePoint] {
        &self.rows[i * self.n..(i + 1) * self.n]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[LatticePoint]> + '_ {
        (0..self.len()).map(move |i| self.graph(i))
    }
}

impl FromIterator<GraphMatrix> for GraphBatch {
    /// Panics on mixed vertex counts.
    fn from_iter<I: IntoIterator<Item = GraphMatrix>>(iter: I) -> Self {
        let mut iter = iter.into_iter().peekable();
        let n = iter.peek().map_or(0, |g| g.len());
        let mut batch = GraphBatch::new(n);
        for g in iter {
            batch.push(&g);
        }
        batch
    }
}

/// Result of canonizing a batch. `dropped` lists input indices for which no
/// symmetry image fit the box.
#[derive(Clone, Debug, Default)]
pub struct CanonizedBatch {
    pub graphs: Vec<CanonicalGraph>,
    pub dropped: Vec<usize>,
}

pub fn canonize_batch(table: &ZobristTable, batch: &GraphBatch) -> CanonizedBatch {
    let mut canonizer = Canonizer::new(table);
    let mut out = CanonizedBatch::default();
    for (i, rows) in batch.iter().enumerate() {
        match canonizer.canonize(rows) {
            Some(c) => out.graphs.push(c),
            None => out.dropped.push(i),
        }
    }
    out
}

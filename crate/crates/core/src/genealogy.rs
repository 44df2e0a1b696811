//! Children (one vertex added) and parents (one vertex removed) of graphs.
//!
//! New vertices come from three operations applied to every graph of a batch:
//!
//! 1. a vertex plus one of the eight offsets `±1, ±ω₁, ±ω₃, ±ω₁ω₃`;
//! 2. triangle completion `u + (v − u)·Ro` for every ordered edge `(u, v)`,
//!    where `Ro` is the rotation by π/3;
//! 3. parallelogram completion `u + w − v` for every vertex `v` with distinct
//!    neighbours `u`, `w`.
//!
//! Every new vertex is at unit distance from an existing one, so children of
//! connected graphs are connected.

use alloc::vec::Vec;

use hashbrown::HashSet;

use crate::canonical::{CanonicalGraph, Canonizer, GraphBatch, GraphMatrix, Symmetry, ZobristTable};
use crate::lattice::{is_unit_distance, LatticePoint, GENERATOR_OFFSETS};

/// Unit-distance pairs `(i, j)`, `i < j`, of a point list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeSet {
    pairs: Vec<(u32, u32)>,
}

impl EdgeSet {
    pub fn of(rows: &[LatticePoint]) -> Self {
        let mut pairs = Vec::new();
        for (i, &p) in rows.iter().enumerate() {
            for (j, &q) in rows.iter().enumerate().skip(i + 1) {
                if is_unit_distance(p, q) {
                    pairs.push((i as u32, j as u32));
                }
            }
        }
        EdgeSet { pairs }
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.pairs.contains(&(i as u32, j as u32))
    }
}

/// Number of unordered pairs at exact unit distance.
pub fn edge_count(g: &GraphMatrix) -> usize {
    count_edges(g.rows())
}

pub fn count_edges(rows: &[LatticePoint]) -> usize {
    let mut count = 0;
    for (i, &p) in rows.iter().enumerate() {
        count += rows[i + 1..].iter().filter(|&&q| is_unit_distance(p, q)).count();
    }
    count
}

/// Number of points of `rows` at unit distance from `p`.
#[inline]
pub fn degree_of(rows: &[LatticePoint], p: LatticePoint) -> usize {
    rows.iter().filter(|&&q| is_unit_distance(p, q)).count()
}

/// Neighbour lists of a point list.
#[derive(Clone, Debug, Default)]
pub struct Adjacency {
    neighbours: Vec<Vec<u32>>,
    edges: usize,
}

impl Adjacency {
    pub fn of(rows: &[LatticePoint]) -> Self {
        let mut neighbours = alloc::vec![Vec::new(); rows.len()];
        let mut edges = 0;
        for (i, &p) in rows.iter().enumerate() {
            for (j, &q) in rows.iter().enumerate().skip(i + 1) {
                if is_unit_distance(p, q) {
                    neighbours[i].push(j as u32);
                    neighbours[j].push(i as u32);
                    edges += 1;
                }
            }
        }
        Adjacency { neighbours, edges }
    }

    pub fn neighbours(&self, v: usize) -> &[u32] {
        &self.neighbours[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbours[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.neighbours.len()
    }

    /// Whether the graph stays connected after deleting `removed`
    /// (pass `usize::MAX` to delete nothing).
    pub fn is_connected_without(&self, removed: usize) -> bool {
        let n = self.neighbours.len();
        let remaining = if removed < n { n - 1 } else { n };
        if remaining <= 1 {
            return true;
        }
        let start = if removed == 0 { 1 } else { 0 };
        let mut seen = alloc::vec![false; n];
        if removed < n {
            seen[removed] = true;
        }
        seen[start] = true;
        let mut stack = alloc::vec![start];
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.neighbours[v] {
                let w = w as usize;
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        reached == remaining
    }

    pub fn is_connected(&self) -> bool {
        self.is_connected_without(usize::MAX)
    }
}

/// Which child operations to apply.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct ChildOps {
    pub offsets: bool,
    pub triangles: bool,
    pub parallelograms: bool,
}

impl Default for ChildOps {
    fn default() -> Self {
        ChildOps {
            offsets: true,
            triangles: true,
            parallelograms: true,
        }
    }
}

/// Operation 1 candidates for one graph: `v + offset`, excluding existing vertices.
pub fn offset_points(rows: &[LatticePoint], out: &mut Vec<LatticePoint>) {
    for &v in rows {
        for &g in &GENERATOR_OFFSETS {
            let p = v + g;
            if !rows.contains(&p) {
                out.push(p);
            }
        }
    }
}

/// Operation 2 candidates: both apexes of the equilateral triangle on each edge.
pub fn triangle_points(rows: &[LatticePoint], adj: &Adjacency, out: &mut Vec<LatticePoint>) {
    for (u, &pu) in rows.iter().enumerate() {
        for &v in adj.neighbours(u) {
            let apex = pu + Symmetry::ROTATION.apply(rows[v as usize] - pu);
            if !rows.contains(&apex) {
                out.push(apex);
            }
        }
    }
}

/// Operation 3 candidates: `u + w − v` for each vertex `v` and neighbour pair `u ≠ w`.
pub fn parallelogram_points(rows: &[LatticePoint], adj: &Adjacency, out: &mut Vec<LatticePoint>) {
    for (v, &pv) in rows.iter().enumerate() {
        let ns = adj.neighbours(v);
        for (k, &u) in ns.iter().enumerate() {
            for &w in &ns[k + 1..] {
                let p = rows[u as usize] + rows[w as usize] - pv;
                if !rows.contains(&p) {
                    out.push(p);
                }
            }
        }
    }
}

fn extend_each(batch: &GraphBatch, mut points: impl FnMut(&[LatticePoint], &mut Vec<LatticePoint>)) -> GraphBatch {
    let mut out = GraphBatch::new(batch.vertex_count() + 1);
    let mut pts = Vec::new();
    let mut child = Vec::with_capacity(batch.vertex_count() + 1);
    for rows in batch.iter() {
        pts.clear();
        points(rows, &mut pts);
        for &p in &pts {
            child.clear();
            child.extend_from_slice(rows);
            child.push(p);
            out.push(&GraphMatrix::from_distinct(child.clone()));
        }
    }
    out
}

/// Raw operation 1 candidates for a batch (not canonized, not deduplicated).
pub fn children_op1(batch: &GraphBatch) -> GraphBatch {
    extend_each(batch, offset_points)
}

/// Raw operation 2 candidates for a batch.
pub fn children_op2(batch: &GraphBatch) -> GraphBatch {
    extend_each(batch, |rows, pts| triangle_points(rows, &Adjacency::of(rows), pts))
}

/// Raw operation 3 candidates for a batch.
pub fn children_op3(batch: &GraphBatch) -> GraphBatch {
    extend_each(batch, |rows, pts| parallelogram_points(rows, &Adjacency::of(rows), pts))
}

/// A deduplicated set of canonical graphs with their edge counts.
#[derive(Clone, Debug, Default)]
pub struct Family {
    pub graphs: Vec<CanonicalGraph>,
    pub edges: Vec<u32>,
    /// Candidates discarded because no symmetry image fit the box.
    pub dropped_oob: usize,
    /// Parents discarded because removing the vertex disconnected the graph.
    pub disconnected: usize,
    seen: HashSet<u64>,
}

impl Family {
    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    /// Insert unless a graph with the same hash is already present.
    pub fn insert(&mut self, graph: CanonicalGraph, edges: u32) -> bool {
        if self.seen.insert(graph.hash()) {
            self.graphs.push(graph);
            self.edges.push(edges);
            true
        } else {
            false
        }
    }

    pub fn contains(&self, hash: u64) -> bool {
        self.seen.contains(&hash)
    }

    /// Append another family, keeping first occurrences.
    pub fn absorb(&mut self, other: Family) {
        self.dropped_oob += other.dropped_oob;
        self.disconnected += other.disconnected;
        for (g, e) in other.graphs.into_iter().zip(other.edges) {
            self.insert(g, e);
        }
    }

    pub fn max_edges(&self) -> Option<u32> {
        self.edges.iter().copied().max()
    }
}

/// All distinct canonical children of a set of canonical graphs.
pub fn children(table: &ZobristTable, parents: &[CanonicalGraph], ops: ChildOps) -> Family {
    let mut canonizer = Canonizer::new(table);
    let mut family = Family::default();
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for parent in parents {
        rows.clear();
        rows.extend(parent.rows());
        let adj = Adjacency::of(&rows);
        points.clear();
        if ops.offsets {
            offset_points(&rows, &mut points);
        }
        if ops.triangles {
            triangle_points(&rows, &adj, &mut points);
        }
        if ops.parallelograms {
            parallelogram_points(&rows, &adj, &mut points);
        }
        points.sort_unstable();
        points.dedup();
        let base_edges = adj.edge_count();
        for &p in &points {
            let degree = degree_of(&rows, p);
            rows.push(p);
            match canonizer.canonize(&rows) {
                Some(child) => {
                    family.insert(child, (base_edges + degree) as u32);
                }
                None => family.dropped_oob += 1,
            }
            rows.pop();
        }
    }
    family
}

/// All distinct connected canonical parents of a set of canonical graphs.
pub fn parents(table: &ZobristTable, graphs: &[CanonicalGraph]) -> Family {
    let mut canonizer = Canonizer::new(table);
    let mut family = Family::default();
    let mut rows = Vec::new();
    let mut sub = Vec::new();
    for g in graphs {
        rows.clear();
        rows.extend(g.rows());
        if rows.len() < 2 {
            continue;
        }
        let adj = Adjacency::of(&rows);
        for v in 0..rows.len() {
            if !adj.is_connected_without(v) {
                family.disconnected += 1;
                continue;
            }
            sub.clear();
            sub.extend(rows.iter().enumerate().filter(|&(i, _)| i != v).map(|(_, &p)| p));
            let edges = adj.edge_count() - adj.degree(v);
            match canonizer.canonize(&sub) {
                Some(parent) => {
                    family.insert(parent, edges as u32);
                }
                None => family.dropped_oob += 1,
            }
        }
    }
    family
}

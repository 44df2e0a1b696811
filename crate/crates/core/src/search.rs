//! Diverse backtracking beam search.
//!
//! A run starts from one graph (the Moser spindle by default) and grows it a
//! vertex at a time. Each step canonizes and deduplicates all children,
//! scores them as `edges − visits`, keeps the best `width`, and bumps the
//! visitation counter of every graph it keeps. Counters persist across runs,
//! so later runs are pushed away from subtrees that earlier runs explored.
//!
//! When a forward step keeps a never-seen graph that ties the best edge
//! count at its size, the backward procedure walks up through parent levels
//! while their leaders are still new and still optimal, then walks back down,
//! merging regenerated children into each stored level. A dense descendant
//! found on the way down triggers the same procedure recursively.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Reverse;

use hashbrown::HashMap;

use crate::canonical::{CanonicalGraph, Canonizer, GraphMatrix, ZobristTable, DEFAULT_SEED};
use crate::genealogy::{self, count_edges, ChildOps, Family};

/// Visit penalty: `edges − visits`.
#[inline]
pub fn score(edges: u32, visits: u32) -> i64 {
    edges as i64 - visits as i64
}

/// Visitation counters indexed by the top `head_bits` bits of a graph hash.
///
/// Only nonzero counters are stored. Graphs whose hashes share a head share
/// a counter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VisitationStore {
    head_bits: u32,
    counts: HashMap<u32, u32>,
}

impl VisitationStore {
    pub const DEFAULT_HEAD_BITS: u32 = 28;

    pub fn new() -> Self {
        VisitationStore::with_head_bits(Self::DEFAULT_HEAD_BITS)
    }

    pub fn with_head_bits(head_bits: u32) -> Self {
        assert!((1..=32).contains(&head_bits), "head_bits must be in 1..=32");
        VisitationStore {
            head_bits,
            counts: HashMap::new(),
        }
    }

    pub fn head_bits(&self) -> u32 {
        self.head_bits
    }

    #[inline]
    pub fn index(&self, hash: u64) -> u32 {
        (hash >> (64 - self.head_bits)) as u32
    }

    #[inline]
    pub fn get(&self, hash: u64) -> u32 {
        self.counts.get(&self.index(hash)).copied().unwrap_or(0)
    }

    /// Saturating increment.
    pub fn increment(&mut self, hash: u64) {
        let slot = self.counts.entry(self.index(hash)).or_insert(0);
        *slot = slot.saturating_add(1);
    }

    /// Nonzero counters as `(index, count)`, sorted by index.
    pub fn entries(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<_> = self.counts.iter().map(|(&i, &c)| (i, c)).collect();
        out.sort_unstable();
        out
    }

    /// Rebuild from `(index, count)` pairs; later duplicates overwrite.
    pub fn from_entries(head_bits: u32, entries: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut store = VisitationStore::with_head_bits(head_bits);
        let limit = if head_bits == 32 { u64::MAX } else { 1u64 << head_bits };
        for (i, c) in entries {
            if c > 0 && (i as u64) < limit {
                store.counts.insert(i, c);
            }
        }
        store
    }

    /// Number of nonzero counters.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn clear(&mut self) {
        self.counts.clear();
    }
}

impl Default for VisitationStore {
    fn default() -> Self {
        VisitationStore::new()
    }
}

/// Highest edge count seen at each vertex count. Entries never decrease.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BestTable {
    entries: BTreeMap<usize, u32>,
}

impl BestTable {
    pub fn new() -> Self {
        BestTable::default()
    }

    pub fn get(&self, n: usize) -> Option<u32> {
        self.entries.get(&n).copied()
    }

    /// Raise the entry for `n` to `edges`; returns whether it grew.
    pub fn update(&mut self, n: usize, edges: u32) -> bool {
        match self.entries.get_mut(&n) {
            Some(e) if *e >= edges => false,
            Some(e) => {
                *e = edges;
                true
            }
            None => {
                self.entries.insert(n, edges);
                true
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.entries.iter().map(|(&n, &e)| (n, e))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl FromIterator<(usize, u32)> for BestTable {
    fn from_iter<I: IntoIterator<Item = (usize, u32)>>(iter: I) -> Self {
        let mut t = BestTable::new();
        for (n, e) in iter {
            t.update(n, e);
        }
        t
    }
}

/// Beam width per vertex count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeamWidths {
    pub default: usize,
    pub overrides: BTreeMap<usize, usize>,
}

impl BeamWidths {
    pub fn constant(width: usize) -> Self {
        BeamWidths {
            default: width,
            overrides: BTreeMap::new(),
        }
    }

    pub fn width(&self, n: usize) -> usize {
        self.overrides.get(&n).copied().unwrap_or(self.default)
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub widths: BeamWidths,
    pub max_vertices: usize,
    pub num_runs: usize,
    /// Chunk size at one vertex; the chunk size at `n` vertices is this divided by `n`.
    pub chunk_limit_base: usize,
    pub zobrist_seed: u64,
    pub start_graph: GraphMatrix,
    /// Run the backward procedure after qualifying forward steps.
    pub backtracking: bool,
    pub ops: ChildOps,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            widths: BeamWidths::constant(100),
            max_vertices: 15,
            num_runs: 1,
            chunk_limit_base: 1 << 18,
            zobrist_seed: DEFAULT_SEED,
            start_graph: GraphMatrix::moser_spindle(),
            backtracking: true,
            ops: ChildOps::default(),
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.max_vertices < 7 {
            return Err(ConfigError::MaxVerticesTooSmall(self.max_vertices));
        }
        if self.widths.default == 0 || self.widths.overrides.values().any(|&w| w == 0) {
            return Err(ConfigError::ZeroWidth);
        }
        if self.chunk_limit_base == 0 {
            return Err(ConfigError::ZeroChunkLimit);
        }
        if self.start_graph.is_empty() {
            return Err(ConfigError::EmptyStart);
        }
        if self.start_graph.len() > self.max_vertices {
            return Err(ConfigError::StartTooLarge {
                start: self.start_graph.len(),
                max: self.max_vertices,
            });
        }
        Ok(())
    }

    /// Chunk size for graphs of `n` vertices.
    pub fn chunk_limit(&self, n: usize) -> usize {
        (self.chunk_limit_base / n.max(1)).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("max_vertices must be at least 7, got {0}")]
    MaxVerticesTooSmall(usize),
    #[error("beam widths must be at least 1")]
    ZeroWidth,
    #[error("chunk limit must be at least 1")]
    ZeroChunkLimit,
    #[error("start graph has no vertices")]
    EmptyStart,
    #[error("start graph has {start} vertices, more than max_vertices = {max}")]
    StartTooLarge { start: usize, max: usize },
}

#[derive(Debug, thiserror::Error)]
pub enum SearchError<E> {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("start graph does not fit the coefficient box under any symmetry")]
    StartOutOfBox,
    #[error("no children at {n} vertices")]
    EmptyFrontier { n: usize },
    #[error("graph sink failed: {0}")]
    Sink(E),
}

/// Receives every graph the search keeps, and best-table improvements.
pub trait GraphSink {
    type Error;

    fn record(&mut self, graph: &CanonicalGraph, edges: u32) -> Result<(), Self::Error>;

    fn best_improved(&mut self, _run: usize, _n: usize, _edges: u32) -> Result<(), Self::Error> {
        Ok(())
    }
}

/// Discards everything.
#[derive(Copy, Clone, Debug, Default)]
pub struct NullSink;

impl GraphSink for NullSink {
    type Error = core::convert::Infallible;

    fn record(&mut self, _: &CanonicalGraph, _: u32) -> Result<(), Self::Error> {
        Ok(())
    }
}

/// Keeps every distinct recorded graph in memory, grouped by vertex count.
#[derive(Clone, Debug, Default)]
pub struct MemorySink {
    shards: BTreeMap<usize, Vec<(CanonicalGraph, u32)>>,
    seen: hashbrown::HashSet<(usize, u64)>,
}

impl MemorySink {
    pub fn new() -> Self {
        MemorySink::default()
    }

    pub fn graphs(&self, n: usize) -> &[(CanonicalGraph, u32)] {
        self.shards.get(&n).map_or(&[], |v| v.as_slice())
    }

    pub fn vertex_counts(&self) -> impl Iterator<Item = usize> + '_ {
        self.shards.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }

    /// Graphs with `n` vertices attaining the largest stored edge count.
    pub fn densest(&self, n: usize) -> Vec<&CanonicalGraph> {
        let graphs = self.graphs(n);
        let Some(max) = graphs.iter().map(|g| g.1).max() else {
            return Vec::new();
        };
        graphs.iter().filter(|g| g.1 == max).map(|g| &g.0).collect()
    }
}

impl GraphSink for MemorySink {
    type Error = core::convert::Infallible;

    fn record(&mut self, graph: &CanonicalGraph, edges: u32) -> Result<(), Self::Error> {
        let n = graph.vertex_count();
        if self.seen.insert((n, graph.hash())) {
            self.shards.entry(n).or_default().push((graph.clone(), edges));
        }
        Ok(())
    }
}

/// Visitation counters and best edge counts; persists across runs.
#[derive(Clone, Debug, Default)]
pub struct SearchState {
    pub visits: VisitationStore,
    pub best: BestTable,
    pub stats: SearchStats,
}

impl SearchState {
    pub fn new() -> Self {
        SearchState::default()
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub runs: usize,
    pub forward_steps: usize,
    pub backward_calls: usize,
    /// Recursive backward calls skipped because the depth bound was reached.
    pub depth_limited: usize,
    pub dropped_oob: usize,
    pub disconnected: usize,
    pub graphs_kept: usize,
}

/// A pruned, same-size set of graphs with edge counts and scores.
///
/// Graphs are ordered by score descending, then hash ascending, so the
/// leaders (maximum score) come first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Beam {
    pub graphs: Vec<CanonicalGraph>,
    pub edges: Vec<u32>,
    pub scores: Vec<i64>,
    /// Visitation count of each graph before this beam was selected.
    pub prior_visits: Vec<u32>,
    pub leaders: Vec<usize>,
}

impl Beam {
    /// Build and order a beam; `prior_visits` defaults to `edges − scores`.
    pub fn new(graphs: Vec<CanonicalGraph>, edges: Vec<u32>, scores: Vec<i64>) -> Self {
        let prior_visits = edges
            .iter()
            .zip(&scores)
            .map(|(&e, &s)| (e as i64 - s).clamp(0, u32::MAX as i64) as u32)
            .collect();
        Beam::with_visits(graphs, edges, scores, prior_visits)
    }

    fn with_visits(graphs: Vec<CanonicalGraph>, edges: Vec<u32>, scores: Vec<i64>, prior_visits: Vec<u32>) -> Self {
        assert!(graphs.len() == edges.len() && edges.len() == scores.len() && scores.len() == prior_visits.len());
        let mut order: Vec<usize> = (0..graphs.len()).collect();
        order.sort_by_key(|&i| (Reverse(scores[i]), graphs[i].hash()));
        let mut slots: Vec<Option<CanonicalGraph>> = graphs.into_iter().map(Some).collect();
        let mut beam = Beam {
            graphs: order.iter().map(|&i| slots[i].take().expect("permutation")).collect(),
            edges: order.iter().map(|&i| edges[i]).collect(),
            scores: order.iter().map(|&i| scores[i]).collect(),
            prior_visits: order.iter().map(|&i| prior_visits[i]).collect(),
            leaders: Vec::new(),
        };
        beam.refresh_leaders();
        beam
    }

    fn refresh_leaders(&mut self) {
        let top = self.scores.first().copied();
        self.leaders = self
            .scores
            .iter()
            .take_while(|&&s| Some(s) == top)
            .enumerate()
            .map(|(i, _)| i)
            .collect();
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    /// Vertex count of the graphs (0 for an empty beam).
    pub fn vertex_count(&self) -> usize {
        self.graphs.first().map_or(0, |g| g.vertex_count())
    }

    pub fn max_score(&self) -> Option<i64> {
        self.scores.first().copied()
    }

    pub fn max_edges(&self) -> Option<u32> {
        self.edges.iter().copied().max()
    }

    /// Keep the `width` best graphs.
    pub fn truncate(&mut self, width: usize) {
        self.graphs.truncate(width);
        self.edges.truncate(width);
        self.scores.truncate(width);
        self.prior_visits.truncate(width);
        self.refresh_leaders();
    }
}

/// The `width` highest-scoring graphs; ties go to the smaller hash.
pub fn prune(beam: Beam, width: usize) -> Beam {
    let mut beam = Beam::with_visits(beam.graphs, beam.edges, beam.scores, beam.prior_visits);
    beam.truncate(width);
    beam
}

/// Apply `op` to consecutive slices of at most `limit` items, concatenating results.
pub fn chunked_map<T, U, E>(
    items: &[T],
    limit: usize,
    mut op: impl FnMut(&[T]) -> Result<Vec<U>, E>,
) -> Result<Vec<U>, E> {
    assert!(limit >= 1, "chunk limit must be positive");
    let mut out = Vec::new();
    for chunk in items.chunks(limit) {
        out.extend(op(chunk)?);
    }
    Ok(out)
}

/// Chunked version of a family-producing batch operation, deduplicating
/// across chunks.
pub fn chunked_family(
    items: &[CanonicalGraph],
    limit: usize,
    mut op: impl FnMut(&[CanonicalGraph]) -> Family,
) -> Family {
    assert!(limit >= 1, "chunk limit must be positive");
    let mut family = Family::default();
    for chunk in items.chunks(limit) {
        family.absorb(op(chunk));
    }
    family
}

/// Outcome of one search invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub runs: usize,
    pub best: BestTable,
    pub stats: SearchStats,
}

/// Run `config.num_runs` searches, reporting kept graphs to `sink`.
pub fn run_search<S: GraphSink>(
    config: &SearchConfig,
    state: &mut SearchState,
    sink: &mut S,
) -> Result<SearchReport, SearchError<S::Error>> {
    config.validate()?;
    let table = ZobristTable::new(config.zobrist_seed);
    let mut searcher = Searcher::new(config, &table, state, sink);
    for run in 0..config.num_runs {
        searcher.run(run)?;
    }
    Ok(SearchReport {
        runs: config.num_runs,
        best: state.best.clone(),
        stats: state.stats,
    })
}

/// Result of a forward step.
#[derive(Clone, Debug)]
pub struct ForwardStep {
    pub beam: Beam,
    /// A kept graph was unvisited and ties the best edge count at its size.
    pub fresh_at_best: bool,
}

/// Stateful driver for one configuration. Exposes the individual steps.
pub struct Searcher<'a, S: GraphSink> {
    config: &'a SearchConfig,
    table: &'a ZobristTable,
    state: &'a mut SearchState,
    sink: &'a mut S,
    run: usize,
}

impl<'a, S: GraphSink> Searcher<'a, S> {
    pub fn new(config: &'a SearchConfig, table: &'a ZobristTable, state: &'a mut SearchState, sink: &'a mut S) -> Self {
        Searcher {
            config,
            table,
            state,
            sink,
            run: 0,
        }
    }

    pub fn state(&self) -> &SearchState {
        self.state
    }

    /// One run: start graph, its ancestors, then forward steps (with
    /// backtracking) up to `max_vertices`.
    pub fn run(&mut self, run: usize) -> Result<(), SearchError<S::Error>> {
        self.run = run;
        let start = self.start_beam()?;

        let mut level = start.clone();
        while level.vertex_count() > 1 {
            level = self.parent_step(&level)?;
            if level.is_empty() {
                break;
            }
        }

        let mut beam = start;
        while beam.vertex_count() < self.config.max_vertices {
            let step = match self.forward_step(&beam) {
                Ok(step) => step,
                Err(SearchError::EmptyFrontier { .. }) => break,
                Err(e) => return Err(e),
            };
            beam = step.beam;
            if self.config.backtracking && step.fresh_at_best {
                beam = self.backward(beam, 0)?;
            }
        }
        self.state.stats.runs += 1;
        Ok(())
    }

    /// The canonized start graph as a one-graph beam.
    pub fn start_beam(&mut self) -> Result<Beam, SearchError<S::Error>> {
        let start = Canonizer::new(self.table)
            .canonize(self.config.start_graph.rows())
            .ok_or(SearchError::StartOutOfBox)?;
        let edges = count_edges(self.config.start_graph.rows()) as u32;
        let mut family = Family::default();
        family.insert(start, edges);
        self.select(family)
    }

    /// Children of `beam`, pruned to the width at `n + 1`.
    pub fn forward_step(&mut self, beam: &Beam) -> Result<ForwardStep, SearchError<S::Error>> {
        self.state.stats.forward_steps += 1;
        let n = beam.vertex_count();
        let next = self.child_step(beam)?;
        if next.is_empty() {
            return Err(SearchError::EmptyFrontier { n: n + 1 });
        }
        let best = self.state.best.get(n + 1);
        let fresh_at_best = (0..next.len()).any(|i| next.prior_visits[i] == 0 && Some(next.edges[i]) == best);
        Ok(ForwardStep {
            beam: next,
            fresh_at_best,
        })
    }

    /// Children of `beam`, scored and pruned; may be empty.
    pub fn child_step(&mut self, beam: &Beam) -> Result<Beam, SearchError<S::Error>> {
        let n = beam.vertex_count();
        let (table, ops) = (self.table, self.config.ops);
        let family = chunked_family(&beam.graphs, self.config.chunk_limit(n), |chunk| {
            genealogy::children(table, chunk, ops)
        });
        self.select(family)
    }

    /// Connected parents of `beam`, scored and pruned; may be empty.
    pub fn parent_step(&mut self, beam: &Beam) -> Result<Beam, SearchError<S::Error>> {
        let n = beam.vertex_count();
        let table = self.table;
        let family = chunked_family(&beam.graphs, self.config.chunk_limit(n), |chunk| {
            genealogy::parents(table, chunk)
        });
        self.select(family)
    }

    /// Score, prune, update the best table, count visits and record.
    fn select(&mut self, family: Family) -> Result<Beam, SearchError<S::Error>> {
        self.state.stats.dropped_oob += family.dropped_oob;
        self.state.stats.disconnected += family.disconnected;
        if family.is_empty() {
            return Ok(Beam::default());
        }
        let n = family.graphs[0].vertex_count();
        if let Some(max) = family.max_edges() {
            if self.state.best.update(n, max) {
                self.sink.best_improved(self.run, n, max).map_err(SearchError::Sink)?;
            }
        }
        let visits: Vec<u32> = family.graphs.iter().map(|g| self.state.visits.get(g.hash())).collect();
        let scores = family.edges.iter().zip(&visits).map(|(&e, &v)| score(e, v)).collect();
        let mut beam = Beam::with_visits(family.graphs, family.edges, scores, visits);
        beam.truncate(self.config.widths.width(n));
        for (g, &e) in beam.graphs.iter().zip(&beam.edges) {
            self.state.visits.increment(g.hash());
            self.sink.record(g, e).map_err(SearchError::Sink)?;
        }
        self.state.stats.graphs_kept += beam.len();
        Ok(beam)
    }

    fn best_at(&self, n: usize) -> Option<i64> {
        self.state.best.get(n).map(i64::from)
    }

    /// Multi-level backtracking from `beam`; returns the updated beam at the
    /// same vertex count.
    pub fn backward(&mut self, beam: Beam, depth: usize) -> Result<Beam, SearchError<S::Error>> {
        self.state.stats.backward_calls += 1;

        // Ascend. levels[0] is the input; each later entry has one vertex fewer.
        let mut levels = alloc::vec![beam];
        loop {
            let top = levels.last().expect("nonempty");
            if top.vertex_count() <= 1 {
                break;
            }
            let parents = self.parent_step(top)?;
            if parents.is_empty() || parents.vertex_count() <= 4 {
                break;
            }
            let n = parents.vertex_count();
            let leader_score = parents.max_score();
            let leaders_seen = parents.leaders.iter().all(|&i| parents.prior_visits[i] != 0);
            levels.push(parents);
            if leader_score < self.best_at(n) {
                break;
            }
            if leaders_seen {
                break;
            }
        }
        if levels.len() == 1 {
            return Ok(levels.pop().expect("nonempty"));
        }

        // Descend, merging regenerated children into each stored level.
        let depth_limit = self.config.max_vertices.saturating_sub(4);
        for i in (0..levels.len() - 1).rev() {
            let children = self.child_step(&levels[i + 1])?;
            let n = children.vertex_count();
            if children.is_empty() || n <= 6 {
                continue;
            }
            let child_top = children.max_score();
            let mut check = child_top > levels[i].max_score();
            if !check && child_top == self.best_at(n) {
                check = children.leaders.iter().any(|&k| children.prior_visits[k] == 0);
            }
            let grand = if check {
                if depth < depth_limit {
                    Some(self.backward(children.clone(), depth + 1)?)
                } else {
                    self.state.stats.depth_limited += 1;
                    None
                }
            } else {
                None
            };
            let current = core::mem::take(&mut levels[i]);
            levels[i] = merge_levels(current, children, grand, self.config.widths.width(n));
        }
        Ok(levels.swap_remove(0))
    }
}

/// Union of up to three same-size beams, keeping every graph whose edge
/// count reaches the `width`-th largest edge count of the union. Later
/// beams override earlier ones on duplicate hashes.
pub fn merge_levels(current: Beam, children: Beam, grand: Option<Beam>, width: usize) -> Beam {
    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut graphs = Vec::new();
    let mut edges = Vec::new();
    let mut scores = Vec::new();
    let mut visits = Vec::new();
    for beam in core::iter::once(current).chain(core::iter::once(children)).chain(grand) {
        for (((g, e), s), v) in beam
            .graphs
            .into_iter()
            .zip(beam.edges)
            .zip(beam.scores)
            .zip(beam.prior_visits)
        {
            match index.get(&g.hash()) {
                Some(&k) => {
                    edges[k] = e;
                    scores[k] = s;
                    visits[k] = v;
                }
                None => {
                    index.insert(g.hash(), graphs.len());
                    graphs.push(g);
                    edges.push(e);
                    scores.push(s);
                    visits.push(v);
                }
            }
        }
    }
    if graphs.is_empty() {
        return Beam::default();
    }
    let mut sorted = edges.clone();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let threshold = sorted[width.clamp(1, sorted.len()) - 1];
    let keep: Vec<bool> = edges.iter().map(|&e| e >= threshold).collect();
    let mut k = 0;
    graphs.retain(|_| {
        k += 1;
        keep[k - 1]
    });
    Beam::with_visits(graphs, kept(edges, &keep), kept(scores, &keep), kept(visits, &keep))
}

fn kept<T>(values: Vec<T>, keep: &[bool]) -> Vec<T> {
    values
        .into_iter()
        .zip(keep)
        .filter(|(_, &k)| k)
        .map(|(x, _)| x)
        .collect()
}

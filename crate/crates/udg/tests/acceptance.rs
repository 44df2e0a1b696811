//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::convert::Infallible;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use udg_core::canonical::{apply_symmetry, canonize, Canonizer, SYMMETRIES};
use udg_core::genealogy::{children, parents, ChildOps, Family};
use udg_core::isoclass::{canonical_label, count_iso_classes, minkowski_sum, to_abstract};
use udg_core::lattice::{enumerate_units, is_unit_distance};
use udg_core::search::{chunked_family, BeamWidths, GraphSink, NullSink, SearchConfig, SearchState, Searcher};
use udg_core::{CanonicalGraph, GraphMatrix, LatticePoint, ZobristTable};

/// Densest known edge counts for 1..=30 vertices.
const KNOWN_EDGES: [u32; 30] = [
    0, 1, 3, 5, 7, 9, 12, 14, 18, 20, 23, 27, 30, 33, 37, 41, 43, 46, 50, 54, 57, 60, 64, 68, 72, 76, 81, 85, 89, 93,
];
/// Known isomorphism-class counts of the densest graphs for 1..=12 vertices.
const KNOWN_CLASSES: [usize; 12] = [1, 1, 1, 1, 1, 4, 1, 3, 1, 1, 2, 1];
/// Sizes where the optimum is proven.
const PROVEN_UP_TO: usize = 8;
/// Float oracle tolerance on |p − q| for the exactness check.
const FLOAT_TOLERANCE: f64 = 1e-8;

const FIGURE_UNITS: [[i32; 4]; 18] = [
    [-2, 1, 2, -1],
    [-1, -1, 1, 1],
    [-1, 0, 0, 0],
    [-1, 1, 0, 0],
    [-1, 2, 1, -2],
    [0, -1, 0, 0],
    [0, 0, -1, 0],
    [0, 0, -1, 1],
    [0, 0, 0, -1],
    [0, 0, 0, 1],
    [0, 0, 1, -1],
    [0, 0, 1, 0],
    [0, 1, 0, 0],
    [1, -2, -1, 2],
    [1, -1, 0, 0],
    [1, 0, 0, 0],
    [1, 1, -1, -1],
    [2, -1, -2, 1],
];

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_connected(rng: &mut impl Rng, table: &ZobristTable, n: usize) -> GraphMatrix {
    loop {
        let mut rows = vec![LatticePoint::ORIGIN];
        while rows.len() < n {
            let p = *rows.choose(rng).unwrap() + *enumerate_units().choose(rng).unwrap();
            if !rows.contains(&p) {
                rows.push(p);
            }
        }
        let g = GraphMatrix::new(rows).unwrap();
        if canonize(table, &g).is_some() {
            return g;
        }
    }
}

fn best_row(state: &SearchState, range: std::ops::RangeInclusive<usize>) -> Vec<u32> {
    range.map(|n| state.best.get(n).unwrap_or(0)).collect()
}

fn search(
    width: usize,
    max_vertices: usize,
    runs: usize,
    backtracking: bool,
    sink: &mut impl GraphSink,
) -> SearchState {
    let config = SearchConfig {
        widths: BeamWidths::constant(width),
        max_vertices,
        num_runs: runs,
        backtracking,
        ..SearchConfig::default()
    };
    let table = ZobristTable::new(config.zobrist_seed);
    let mut state = SearchState::new();
    for run in 0..runs {
        if Searcher::new(&config, &table, &mut state, sink).run(run).is_err() {
            panic!("search run {run} failed");
        }
    }
    state
}

/// Keeps distinct graphs up to a vertex limit.
struct SmallGraphs {
    limit: usize,
    graphs: BTreeMap<usize, BTreeMap<u64, (CanonicalGraph, u32)>>,
}

impl SmallGraphs {
    fn densest(&self, n: usize) -> Vec<GraphMatrix> {
        let Some(gs) = self.graphs.get(&n) else {
            return Vec::new();
        };
        let max = gs.values().map(|g| g.1).max().unwrap_or(0);
        gs.values().filter(|g| g.1 == max).map(|g| g.0.matrix()).collect()
    }
}

impl GraphSink for SmallGraphs {
    type Error = Infallible;

    fn record(&mut self, g: &CanonicalGraph, edges: u32) -> Result<(), Infallible> {
        if g.vertex_count() <= self.limit {
            self.graphs
                .entry(g.vertex_count())
                .or_default()
                .insert(g.hash(), (g.clone(), edges));
        }
        Ok(())
    }
}

fn criterion_1() -> Outcome {
    let ours: BTreeSet<[i32; 4]> = enumerate_units().iter().map(|p| p.0).collect();
    let expected: BTreeSet<[i32; 4]> = FIGURE_UNITS.into_iter().collect();
    if enumerate_units().len() == 18 && ours == expected {
        Ok("18 unit vectors, equal as a set".into())
    } else {
        Err(format!("got {ours:?}"))
    }
}

fn criterion_2() -> Outcome {
    let state = search(100, 15, 3, true, &mut NullSink);
    let got = best_row(&state, 3..=15);
    if got[..] == KNOWN_EDGES[2..15] {
        Ok(format!("V=3..15 edges {got:?}"))
    } else {
        Err(format!("V=3..15 edges {got:?}, expected {:?}", &KNOWN_EDGES[2..15]))
    }
}

fn criterion_3() -> Outcome {
    let with = search(1000, 30, 10, true, &mut NullSink);
    let got = best_row(&with, 16..=30);
    if got[..] != KNOWN_EDGES[15..30] {
        return Err(format!("V=16..30 edges {got:?}, expected {:?}", &KNOWN_EDGES[15..30]));
    }
    let without = search(1000, 30, 10, false, &mut NullSink);
    let at_27 = without.best.get(27).unwrap_or(0);
    if at_27 >= KNOWN_EDGES[26] {
        return Err(format!("without backtracking V=27 still reached {at_27} edges"));
    }
    Ok(format!(
        "V=16..30 edges {got:?}; without backtracking V=27..30 {:?}",
        best_row(&without, 27..=30)
    ))
}

fn criterion_4() -> Outcome {
    let table = ZobristTable::default();
    let mut rng = rng(4);
    let trials = 1000;
    for t in 0..trials {
        let n = rng.random_range(2..=20);
        let g = random_connected(&mut rng, &table, n);
        let c = canonize(&table, &g).unwrap();
        let s = rng.random_range(0..SYMMETRIES.len());
        let shift = LatticePoint::new(
            rng.random_range(-50..=50),
            rng.random_range(-50..=50),
            rng.random_range(-50..=50),
            rng.random_range(-50..=50),
        );
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let h = apply_symmetry(&g, s).translated(shift).permuted(&order);
        if canonize(&table, &h).as_ref() != Some(&c) {
            return Err(format!("trial {t}: canonical form changed"));
        }
    }
    Ok(format!("{trials}/{trials} compositions"))
}

fn criterion_5() -> Outcome {
    let mut rng = rng(5);
    let pairs = 1_000_000;
    let mut units = 0;
    let point = |rng: &mut ChaCha8Rng| {
        LatticePoint::new(
            rng.random_range(0..=20),
            rng.random_range(0..=20),
            rng.random_range(0..=20),
            rng.random_range(0..=20),
        )
    };
    for i in 0..pairs {
        let p = point(&mut rng);
        // Half uniform pairs, half unit steps with a small perturbation.
        let q = if i % 2 == 0 {
            point(&mut rng)
        } else {
            let e = LatticePoint::new(
                rng.random_range(-1..=1),
                rng.random_range(-1..=1),
                rng.random_range(-1..=1),
                rng.random_range(-1..=1),
            );
            p + *enumerate_units().choose(&mut rng).unwrap() + e
        };
        let z = p.embed() - q.embed();
        let d = z.re.hypot(z.im);
        let float = d > 1.0 - FLOAT_TOLERANCE && d < 1.0 + FLOAT_TOLERANCE;
        let exact = is_unit_distance(p, q);
        if exact != float {
            return Err(format!("pair {:?} {:?}: exact {exact}, |d| = {d}", p.0, q.0));
        }
        units += exact as usize;
    }
    Ok(format!("{pairs}/{pairs} pairs agree ({units} unit pairs)"))
}

fn criterion_6() -> Outcome {
    let table = ZobristTable::default();
    let mut rng = rng(6);
    let mut checked = 0;
    for t in 0..200 {
        let n = rng.random_range(5..=12);
        let g = canonize(&table, &random_connected(&mut rng, &table, n)).unwrap();
        for c in &children(&table, std::slice::from_ref(&g), ChildOps::default()).graphs {
            if !parents(&table, std::slice::from_ref(c)).contains(g.hash()) {
                return Err(format!("graph {t}: a child does not list it as a parent"));
            }
            checked += 1;
        }
    }
    Ok(format!("200 graphs, {checked} children, all dual"))
}

fn multiset(f: &Family) -> Vec<(u64, u32)> {
    let mut v: Vec<(u64, u32)> = f.graphs.iter().map(|g| g.hash()).zip(f.edges.iter().copied()).collect();
    v.sort_unstable();
    v
}

fn criterion_7() -> Outcome {
    let table = ZobristTable::default();
    let mut rng = rng(7);
    let raw: Vec<GraphMatrix> = (0..10_000).map(|_| random_connected(&mut rng, &table, 8)).collect();
    let canon_with = |limit: usize| -> Vec<u64> {
        let mut out = Vec::new();
        for chunk in raw.chunks(limit) {
            let mut c = Canonizer::new(&table);
            out.extend(chunk.iter().map(|g| c.canonize(g.rows()).unwrap().hash()));
        }
        out.sort_unstable();
        out
    };
    let graphs: Vec<CanonicalGraph> = raw.iter().map(|g| canonize(&table, g).unwrap()).collect();
    let ops = ChildOps::default();
    let limits = [1usize, 7, 1_000_000];
    let reference = (
        canon_with(limits[2]),
        multiset(&chunked_family(&graphs, limits[2], |c| children(&table, c, ops))),
        multiset(&chunked_family(&graphs, limits[2], |c| parents(&table, c))),
    );
    for &limit in &limits[..2] {
        let got = (
            canon_with(limit),
            multiset(&chunked_family(&graphs, limit, |c| children(&table, c, ops))),
            multiset(&chunked_family(&graphs, limit, |c| parents(&table, c))),
        );
        if got != reference {
            return Err(format!("chunk limit {limit} changed the result"));
        }
    }
    Ok(format!(
        "10000 graphs, {} children, {} parents, identical for limits {limits:?}",
        reference.1.len(),
        reference.2.len()
    ))
}

fn criterion_8(saturated: &SmallGraphs) -> Outcome {
    let table = ZobristTable::default();
    let t1 = [[0, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0]].map(LatticePoint);
    let t2 = [[0, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]].map(LatticePoint);
    let sum = minkowski_sum(&t1, &t2).map_err(|e| e.to_string())?;
    let canon = canonize(&table, &sum.matrix).ok_or("sum does not canonize")?;
    let edges = udg_core::genealogy::edge_count(&canon.matrix());
    if canon.vertex_count() != 9 || edges != 18 || !sum.disjoint {
        return Err(format!(
            "{} vertices, {edges} edges, disjoint {}",
            canon.vertex_count(),
            sum.disjoint
        ));
    }
    let densest = saturated.densest(9);
    let label = canonical_label(&to_abstract(&sum.matrix));
    let classes: BTreeSet<Vec<u8>> = densest.iter().map(|g| canonical_label(&to_abstract(g))).collect();
    if classes.len() != 1 || !classes.contains(&label) {
        return Err(format!(
            "search found {} densest 9-vertex classes, sum among them: {}",
            classes.len(),
            classes.contains(&label)
        ));
    }
    Ok("9 vertices, 18 edges, disjoint, isomorphic to the searched optimum".into())
}

fn criterion_9(saturated: &SmallGraphs) -> Outcome {
    let got: Vec<usize> = (1..=12)
        .map(|n| count_iso_classes(saturated.densest(n).iter()))
        .collect();
    if got[..] == KNOWN_CLASSES {
        return Ok(format!("I for V=1..12 {got:?}"));
    }
    if got[..PROVEN_UP_TO] != KNOWN_CLASSES[..PROVEN_UP_TO] {
        return Err(format!("I for V=1..12 {got:?}, expected {KNOWN_CLASSES:?}"));
    }
    Err(format!(
        "I for V=1..12 {got:?} differs above V={PROVEN_UP_TO} from {KNOWN_CLASSES:?}"
    ))
}

fn shard_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| {
            let name = e.file_name().to_string_lossy().into_owned();
            name.starts_with("udg_") || name == "summary.csv"
        })
        .map(|e| {
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

fn criterion_10() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let dir = tmp.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_udg"))
            .args([
                "search",
                "--max-vertices",
                "15",
                "--beam-width",
                "100",
                "--runs",
                "3",
                "--seed",
                "42",
            ])
            .arg("--out")
            .arg(&dir)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!("search exited with {}", status.status));
        }
        outputs.push(shard_bytes(&dir));
    }
    let files = outputs[0].len();
    if files < 16 {
        return Err(format!("only {files} output files"));
    }
    if outputs[0] != outputs[1] {
        return Err("shards differ between invocations".into());
    }
    let bytes: usize = outputs[0].values().map(Vec::len).sum();
    Ok(format!("{files} files, {bytes} bytes, identical"))
}

fn main() {
    let saturated = std::cell::OnceCell::new();
    let saturate = || {
        let mut sink = SmallGraphs {
            limit: 12,
            graphs: BTreeMap::new(),
        };
        search(1000, 15, 10, true, &mut sink);
        sink
    };
    let criteria: Vec<Criterion> = vec![
        ("unit vectors", Box::new(criterion_1)),
        ("known optima V=3..15", Box::new(criterion_2)),
        ("densest V=16..30 and backtracking differential", Box::new(criterion_3)),
        ("canonization invariance", Box::new(criterion_4)),
        ("exact vs float adjacency", Box::new(criterion_5)),
        ("genealogy duality", Box::new(criterion_6)),
        ("chunking transparency", Box::new(criterion_7)),
        (
            "Minkowski triangle sum",
            Box::new(|| criterion_8(saturated.get_or_init(saturate))),
        ),
        (
            "isomorphism classes V<=12",
            Box::new(|| criterion_9(saturated.get_or_init(saturate))),
        ),
        ("determinism", Box::new(criterion_10)),
    ];
    let filter: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let k = i + 1;
        if !filter.is_empty() && !filter.contains(&k) {
            continue;
        }
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {k} ({name}): PASS [{secs:.1}s] {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {k} ({name}): FAIL [{secs:.1}s] {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

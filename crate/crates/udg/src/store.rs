//! Line-based graph database, sharded by vertex count.
//!
//! A record is a header line `G <n> <m> <hash>` (hash as 16 hex digits),
//! `n` lines of four integers, and a blank line. Shards are named
//! `udg_<n>.txt`.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use udg_core::canonical::{canonize, point_code, BOX_MAX};
use udg_core::genealogy::edge_count;
use udg_core::isoclass::count_iso_classes;
use udg_core::{CanonicalGraph, GraphMatrix, LatticePoint, ZobristTable};

use crate::error::{Error, Result};

pub const SHARD_PREFIX: &str = "udg_";
pub const SHARD_SUFFIX: &str = ".txt";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphRecord {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub hash: u64,
    pub matrix: GraphMatrix,
}

impl GraphRecord {
    pub fn from_canonical(graph: &CanonicalGraph, edges: usize) -> Self {
        GraphRecord {
            vertex_count: graph.vertex_count(),
            edge_count: edges,
            hash: graph.hash(),
            matrix: graph.matrix(),
        }
    }

    /// A record for an arbitrary embedding; the edge count is computed.
    pub fn from_matrix(matrix: GraphMatrix, hash: u64) -> Self {
        GraphRecord {
            vertex_count: matrix.len(),
            edge_count: edge_count(&matrix),
            hash,
            matrix,
        }
    }

    /// Checks the stated sizes against the matrix.
    pub fn check_counts(&self) -> Result<()> {
        if self.matrix.len() != self.vertex_count {
            return Err(self.invalid(format!(
                "header says {} vertices, matrix has {}",
                self.vertex_count,
                self.matrix.len()
            )));
        }
        let edges = edge_count(&self.matrix);
        if edges != self.edge_count {
            return Err(self.invalid(format!("header says {} edges, matrix has {edges}", self.edge_count)));
        }
        Ok(())
    }

    /// Checks counts and the shape of a canonical matrix: every coefficient
    /// in `[0, 20]`, every column touching zero, rows in ascending code order.
    pub fn validate(&self) -> Result<()> {
        self.check_counts()?;
        let rows = self.matrix.rows();
        if rows.iter().any(|p| p.0.iter().any(|x| !(0..=BOX_MAX).contains(x))) {
            return Err(self.invalid("coefficient outside [0, 20]".into()));
        }
        if !rows.is_empty() && (0..4).any(|l| rows.iter().all(|p| p.0[l] != 0)) {
            return Err(self.invalid("matrix is not translated to the origin".into()));
        }
        if !rows.windows(2).all(|w| point_code(w[0]) < point_code(w[1])) {
            return Err(self.invalid("rows are not in canonical order".into()));
        }
        Ok(())
    }

    /// The canonical graph this record stores, if the matrix is canonical and
    /// the hash agrees with `table`.
    pub fn to_canonical(&self, table: &ZobristTable) -> Option<CanonicalGraph> {
        let canon = canonize(table, &self.matrix)?;
        let same = canon.hash() == self.hash && canon.rows().eq(self.matrix.rows().iter().copied());
        same.then_some(canon)
    }

    fn invalid(&self, reason: String) -> Error {
        Error::InvalidRecord {
            hash: self.hash,
            reason,
        }
    }
}

pub fn format_record(record: &GraphRecord) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "G {} {} {:016x}",
        record.vertex_count, record.edge_count, record.hash
    );
    for p in record.matrix.rows() {
        let [a, b, c, d] = p.0;
        let _ = writeln!(out, "{a} {b} {c} {d}");
    }
    out.push('\n');
    out
}

pub fn write_record<W: Write>(w: &mut W, record: &GraphRecord) -> std::io::Result<()> {
    w.write_all(format_record(record).as_bytes())
}

/// Parses records without checking them beyond syntax and distinct rows.
/// Blank lines and lines starting with `#` between records are ignored.
pub fn parse_records(text: &str, path: &Path) -> Result<Vec<GraphRecord>> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut records = Vec::new();
    while let Some((no, line)) = lines.next() {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [tag, n, m, hash] = fields[..] else {
            return Err(err(no, format!("expected `G <n> <m> <hash>`, found `{line}`")));
        };
        if tag != "G" {
            return Err(err(no, format!("expected record header, found `{line}`")));
        }
        let n: usize = n.parse().map_err(|_| err(no, format!("bad vertex count `{n}`")))?;
        let m: usize = m.parse().map_err(|_| err(no, format!("bad edge count `{m}`")))?;
        if hash.len() != 16 {
            return Err(err(no, format!("hash `{hash}` is not 16 hex digits")));
        }
        let hash = u64::from_str_radix(hash, 16).map_err(|_| err(no, format!("bad hash `{hash}`")))?;

        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            let Some((no, line)) = lines.next() else {
                return Err(err(no, format!("record ends after {} of {n} rows", rows.len())));
            };
            let coords: Vec<i32> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| err(no, format!("bad row `{line}`")))?;
            let Ok(coords) = <[i32; 4]>::try_from(coords) else {
                return Err(err(no, format!("row `{line}` does not have 4 entries")));
            };
            rows.push(LatticePoint(coords));
        }
        let matrix = GraphMatrix::new(rows).map_err(|e| err(no, e.to_string()))?;
        records.push(GraphRecord {
            vertex_count: n,
            edge_count: m,
            hash,
            matrix,
        });
    }
    Ok(records)
}

pub fn read_records(path: &Path) -> Result<Vec<GraphRecord>> {
    let text = fs::read_to_string(path).map_err(Error::io(path))?;
    parse_records(&text, path)
}

/// Reads a graph file given as input to a command. Counts must agree with
/// the matrices; the matrices need not be canonical.
pub fn read_graph_file(path: &Path) -> Result<Vec<GraphRecord>> {
    let records = read_records(path)?;
    for r in &records {
        r.check_counts()?;
    }
    Ok(records)
}

pub fn shard_name(n: usize) -> String {
    format!("{SHARD_PREFIX}{n}{SHARD_SUFFIX}")
}

/// Vertex counts with a shard in `dir`, ascending.
pub fn shard_sizes(dir: &Path) -> Result<Vec<usize>> {
    let mut sizes = Vec::new();
    for entry in fs::read_dir(dir).map_err(Error::io(dir))? {
        let entry = entry.map_err(Error::io(dir))?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        let size = name
            .strip_prefix(SHARD_PREFIX)
            .and_then(|s| s.strip_suffix(SHARD_SUFFIX))
            .and_then(|s| s.parse().ok());
        if let Some(n) = size {
            sizes.push(n);
        }
    }
    sizes.sort_unstable();
    Ok(sizes)
}

/// Reads and validates one shard.
pub fn read_shard(dir: &Path, n: usize) -> Result<Vec<GraphRecord>> {
    let path = dir.join(shard_name(n));
    let records = read_records(&path)?;
    for r in &records {
        r.validate()?;
        if r.vertex_count != n {
            return Err(Error::InvalidRecord {
                hash: r.hash,
                reason: format!("{}-vertex record in {}", r.vertex_count, path.display()),
            });
        }
    }
    Ok(records)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct SummaryRow {
    pub vertices: usize,
    pub edges: usize,
    /// Isomorphism classes among the graphs with `edges` edges.
    pub classes: usize,
}

pub fn summarize(records: &[GraphRecord]) -> Vec<SummaryRow> {
    let mut by_size: BTreeMap<usize, Vec<&GraphRecord>> = BTreeMap::new();
    for r in records {
        by_size.entry(r.vertex_count).or_default().push(r);
    }
    by_size
        .into_iter()
        .map(|(n, rs)| {
            let edges = rs.iter().map(|r| r.edge_count).max().unwrap_or(0);
            let densest = rs.iter().filter(|r| r.edge_count == edges).map(|r| &r.matrix);
            SummaryRow {
                vertices: n,
                edges,
                classes: count_iso_classes(densest),
            }
        })
        .collect()
}

/// Summary of every shard in `dir`.
pub fn summary(dir: &Path) -> Result<Vec<SummaryRow>> {
    let mut rows = Vec::new();
    for n in shard_sizes(dir)? {
        rows.extend(summarize(&read_shard(dir, n)?));
    }
    Ok(rows)
}

pub fn format_summary(rows: &[SummaryRow]) -> String {
    let mut out = String::from("V,E,I\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.vertices, r.edges, r.classes);
    }
    out
}

struct Shard {
    seen: HashSet<u64>,
    writer: BufWriter<File>,
}

/// Append-only writer over a database directory. Duplicate hashes within a
/// shard are skipped, including those already on disk.
pub struct Database {
    dir: PathBuf,
    shards: BTreeMap<usize, Shard>,
}

impl Database {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(Error::io(&dir))?;
        Ok(Database {
            dir,
            shards: BTreeMap::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn shard_path(&self, n: usize) -> PathBuf {
        self.dir.join(shard_name(n))
    }

    /// Validates and appends `record`; returns false for a duplicate.
    pub fn append(&mut self, record: &GraphRecord) -> Result<bool> {
        record.validate()?;
        let path = self.shard_path(record.vertex_count);
        let shard = self.shard(record.vertex_count)?;
        if !shard.seen.insert(record.hash) {
            return Ok(false);
        }
        write_record(&mut shard.writer, record).map_err(Error::io(path))?;
        Ok(true)
    }

    pub fn contains(&mut self, n: usize, hash: u64) -> Result<bool> {
        Ok(self.shard(n)?.seen.contains(&hash))
    }

    pub fn flush(&mut self) -> Result<()> {
        for (&n, shard) in &mut self.shards {
            shard.writer.flush().map_err(Error::io(self.dir.join(shard_name(n))))?;
        }
        Ok(())
    }

    /// Flushes pending appends and summarizes the directory.
    pub fn summary(&mut self) -> Result<Vec<SummaryRow>> {
        self.flush()?;
        summary(&self.dir)
    }

    fn shard(&mut self, n: usize) -> Result<&mut Shard> {
        if !self.shards.contains_key(&n) {
            let path = self.shard_path(n);
            let seen = if path.exists() {
                read_shard(&self.dir, n)?.into_iter().map(|r| r.hash).collect()
            } else {
                HashSet::new()
            };
            let file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(&path)
                .map_err(Error::io(&path))?;
            self.shards.insert(
                n,
                Shard {
                    seen,
                    writer: BufWriter::new(file),
                },
            );
        }
        Ok(self.shards.get_mut(&n).expect("inserted above"))
    }
}

impl Drop for Database {
    fn drop(&mut self) {
        let _ = self.flush();
    }
}

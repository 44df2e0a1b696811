use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use udg_core::canonical::{canonize, DEFAULT_SEED};
use udg_core::genealogy::{self, ChildOps, Family};
use udg_core::isoclass::canonical_minkowski_sum;
use udg_core::search::{GraphSink, SearchConfig, SearchError, SearchState, Searcher};
use udg_core::{CanonicalGraph, GraphMatrix, ZobristTable};

use crate::checkpoint;
use crate::config::{load_config, load_width_table, parse_seed};
use crate::error::{Error, Result};
use crate::render::{render_svg, RenderSpec};
use crate::store::{self, format_record, format_summary, read_graph_file, Database, GraphRecord};

pub const SUMMARY_FILE: &str = "summary.csv";
pub const LOG_FILE: &str = "search.log";

#[derive(Debug, Parser)]
#[command(
    name = "udg",
    version,
    about = "Search for edge-dense unit-distance graphs on the Moser lattice"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the beam search and write the graph database.
    Search(SearchArgs),
    /// Draw a graph as SVG.
    Render(RenderArgs),
    /// Print the V,E,I summary of a database directory.
    Stats { dir: PathBuf },
    /// Print the canonized Minkowski sum of the first graphs of two files.
    Minkowski {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_parser = parse_seed, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Print the canonical form of every graph in a file.
    Canon(GraphArgs),
    /// Print the canonized one-vertex extensions of every graph in a file.
    Children(GraphArgs),
    /// Print the connected one-vertex deletions of every graph in a file.
    Parents(GraphArgs),
}

/// Settings are taken from the defaults, then `--config`, then flags.
#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    /// Output directory; resumes from checkpoints found there.
    #[arg(long, env = "UDG_OUT_DIR")]
    pub out: PathBuf,
    #[arg(long)]
    pub max_vertices: Option<usize>,
    #[arg(long)]
    pub beam_width: Option<usize>,
    #[arg(long)]
    pub runs: Option<usize>,
    /// Zobrist seed, decimal or 0x-prefixed hex.
    #[arg(long, value_parser = parse_seed)]
    pub seed: Option<u64>,
    /// Chunk size at one vertex; scaled down by the vertex count.
    #[arg(long)]
    pub chunk_limit: Option<usize>,
    /// File of `key = value` settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Start graph (first record of a graph file); default the Moser spindle.
    #[arg(long)]
    pub start: Option<PathBuf>,
    /// File of `<vertices> <width>` lines overriding the beam width.
    #[arg(long)]
    pub width_table: Option<PathBuf>,
    /// Forward steps only.
    #[arg(long)]
    pub no_backtracking: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    pub file: PathBuf,
    /// Which record of the file to draw.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    /// Write here instead of standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 100.0)]
    pub scale: f64,
    #[arg(long, default_value_t = 4.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 1.0)]
    pub stroke: f64,
    #[arg(long, default_value_t = 10.0)]
    pub margin: f64,
}

#[derive(Debug, Clone, Args)]
pub struct GraphArgs {
    pub file: PathBuf,
    #[arg(long, value_parser = parse_seed, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let stdout = Path::new("<stdout>");
    let text = match cli.command {
        Command::Search(args) => cmd_search(&args)?,
        Command::Render(args) => cmd_render(&args)?,
        Command::Stats { dir } => format_summary(&store::summary(&dir)?),
        Command::Minkowski { a, b, seed } => cmd_minkowski(&a, &b, seed)?,
        Command::Canon(args) => cmd_canon(&args)?,
        Command::Children(args) => cmd_family(&args, |t, g| genealogy::children(t, g, ChildOps::default()))?,
        Command::Parents(args) => cmd_family(&args, genealogy::parents)?,
    };
    out.write_all(text.as_bytes()).map_err(Error::io(stdout))?;
    out.flush().map_err(Error::io(stdout))
}

/// Resolves the search configuration from defaults, config file and flags.
pub fn search_config(args: &SearchArgs) -> Result<SearchConfig> {
    let file = args.config.as_deref().map(load_config).transpose()?.unwrap_or_default();
    let mut config = SearchConfig::default();
    if let Some(w) = args.beam_width.or(file.beam_width) {
        config.widths.default = w;
    }
    if let Some(path) = args.width_table.as_ref().or(file.width_table.as_ref()) {
        config.widths.overrides = load_width_table(path)?;
    }
    config.max_vertices = args.max_vertices.or(file.max_vertices).unwrap_or(config.max_vertices);
    config.num_runs = args.runs.or(file.runs).unwrap_or(config.num_runs);
    config.zobrist_seed = args.seed.or(file.seed).unwrap_or(config.zobrist_seed);
    config.chunk_limit_base = args.chunk_limit.or(file.chunk_limit).unwrap_or(config.chunk_limit_base);
    if let Some(path) = args.start.as_ref().or(file.start.as_ref()) {
        config.start_graph = first_graph(path)?.matrix;
    }
    config.backtracking = !args.no_backtracking;
    config.validate()?;
    Ok(config)
}

/// Writes every kept graph to the database and best-table progress to the log.
pub struct StoreSink {
    db: Database,
    log: BufWriter<File>,
    log_path: PathBuf,
}

impl StoreSink {
    pub fn open(dir: &Path) -> Result<Self> {
        let db = Database::open(dir)?;
        let log_path = dir.join(LOG_FILE);
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&log_path)
            .map_err(Error::io(&log_path))?;
        Ok(StoreSink {
            db,
            log: BufWriter::new(file),
            log_path,
        })
    }

    pub fn log(&mut self, line: &str) -> Result<()> {
        writeln!(self.log, "{line}").map_err(Error::io(&self.log_path))
    }

    pub fn flush(&mut self) -> Result<()> {
        self.db.flush()?;
        self.log.flush().map_err(Error::io(&self.log_path))
    }

    pub fn database(&mut self) -> &mut Database {
        &mut self.db
    }
}

impl GraphSink for StoreSink {
    type Error = Error;

    fn record(&mut self, graph: &CanonicalGraph, edges: u32) -> Result<()> {
        self.db
            .append(&GraphRecord::from_canonical(graph, edges as usize))
            .map(|_| ())
    }

    fn best_improved(&mut self, run: usize, n: usize, edges: u32) -> Result<()> {
        self.log(&format!("run {run} best V={n} E={edges}"))
    }
}

fn search_error(e: SearchError<Error>) -> Error {
    match e {
        SearchError::Config(e) => Error::Config(e),
        SearchError::Sink(e) => e,
        other => Error::Usage(other.to_string()),
    }
}

fn best_line(state: &SearchState) -> String {
    let entries: Vec<String> = state.best.iter().map(|(n, e)| format!("{n}:{e}")).collect();
    entries.join(" ")
}

pub fn cmd_search(args: &SearchArgs) -> Result<String> {
    let config = search_config(args)?;
    let dir = args.out.as_path();
    fs::create_dir_all(dir).map_err(Error::io(dir))?;
    let mut state = checkpoint::load(dir, config.zobrist_seed)?.unwrap_or_default();
    let mut sink = StoreSink::open(dir)?;
    sink.log(&format!(
        "search runs={} max_vertices={} beam_width={} seed={:#x} backtracking={}",
        config.num_runs, config.max_vertices, config.widths.default, config.zobrist_seed, config.backtracking
    ))?;

    let table = ZobristTable::new(config.zobrist_seed);
    let started = Instant::now();
    for run in 0..config.num_runs {
        Searcher::new(&config, &table, &mut state, &mut sink)
            .run(run)
            .map_err(search_error)?;
        sink.log(&format!("run {run} done best {}", best_line(&state)))?;
        sink.flush()?;
        checkpoint::save(dir, &state, config.zobrist_seed)?;
        eprintln!(
            "run {run} finished after {:.1}s: {}",
            started.elapsed().as_secs_f64(),
            best_line(&state)
        );
    }
    sink.flush()?;
    checkpoint::save(dir, &state, config.zobrist_seed)?;
    let summary = format_summary(&sink.database().summary()?);
    let path = dir.join(SUMMARY_FILE);
    fs::write(&path, &summary).map_err(Error::io(&path))?;
    Ok(summary)
}

fn first_graph(path: &Path) -> Result<GraphRecord> {
    read_graph_file(path)?.into_iter().next().ok_or_else(|| Error::Parse {
        path: path.to_path_buf(),
        line: 1,
        message: "no graph records".into(),
    })
}

pub fn cmd_render(args: &RenderArgs) -> Result<String> {
    let spec = RenderSpec {
        scale: args.scale,
        radius: args.radius,
        stroke: args.stroke,
        margin: args.margin,
    };
    if !spec.is_valid() {
        return Err(Error::Usage("scale must be positive and sizes non-negative".into()));
    }
    let records = read_graph_file(&args.file)?;
    let Some(record) = records.get(args.index) else {
        return Err(Error::Usage(format!(
            "{} has {} records, no index {}",
            args.file.display(),
            records.len(),
            args.index
        )));
    };
    let svg = render_svg(&record.matrix, &spec);
    match &args.output {
        Some(path) => {
            fs::write(path, &svg).map_err(Error::io(path))?;
            Ok(String::new())
        }
        None => Ok(svg),
    }
}

fn canonical(table: &ZobristTable, g: &GraphMatrix) -> Result<CanonicalGraph> {
    canonize(table, g).ok_or_else(|| Error::InvalidRecord {
        hash: 0,
        reason: "no symmetry image fits the coefficient box".into(),
    })
}

pub fn cmd_canon(args: &GraphArgs) -> Result<String> {
    let table = ZobristTable::new(args.seed);
    let mut out = String::new();
    for r in read_graph_file(&args.file)? {
        let c = canonical(&table, &r.matrix)?;
        out.push_str(&format_record(&GraphRecord::from_canonical(&c, r.edge_count)));
    }
    Ok(out)
}

pub fn cmd_family(args: &GraphArgs, op: impl Fn(&ZobristTable, &[CanonicalGraph]) -> Family) -> Result<String> {
    let table = ZobristTable::new(args.seed);
    let mut out = String::new();
    for r in read_graph_file(&args.file)? {
        let family = op(&table, &[canonical(&table, &r.matrix)?]);
        for (g, &e) in family.graphs.iter().zip(&family.edges) {
            out.push_str(&format_record(&GraphRecord::from_canonical(g, e as usize)));
        }
    }
    Ok(out)
}

pub fn cmd_minkowski(a: &Path, b: &Path, seed: u64) -> Result<String> {
    let (a, b) = (first_graph(a)?, first_graph(b)?);
    let table = ZobristTable::new(seed);
    let (sum, disjoint) = canonical_minkowski_sum(&table, a.matrix.rows(), b.matrix.rows())?;
    let record = GraphRecord::from_matrix(sum.matrix(), sum.hash());
    let mut out = format_record(&record);
    out.push_str(if disjoint {
        "# disjoint: yes\n"
    } else {
        "# disjoint: no\n"
    });
    Ok(out)
}

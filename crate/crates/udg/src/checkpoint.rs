//! Binary checkpoints for the visitation counters and the best table.
//!
//! Both files start with the magic `UDGV` and a little-endian `u32` version.
//! `visitation.bin` continues with the Zobrist seed (`u64`), the head width
//! in bits (`u32`), an entry count (`u64`) and `(index, count)` pairs of
//! `u32`. `best.bin` continues with an entry count and `(vertices, edges)`
//! pairs of `u32`.

use std::fs;
use std::path::{Path, PathBuf};

use udg_core::search::{BestTable, SearchState, VisitationStore};

use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"UDGV";
pub const VERSION: u32 = 1;
pub const VISITATION_FILE: &str = "visitation.bin";
pub const BEST_FILE: &str = "best.bin";

fn header() -> Vec<u8> {
    let mut out = MAGIC.to_vec();
    out.extend_from_slice(&VERSION.to_le_bytes());
    out
}

pub fn encode_visits(visits: &VisitationStore, seed: u64) -> Vec<u8> {
    let entries = visits.entries();
    let mut out = header();
    out.extend_from_slice(&seed.to_le_bytes());
    out.extend_from_slice(&visits.head_bits().to_le_bytes());
    out.extend_from_slice(&(entries.len() as u64).to_le_bytes());
    for (index, count) in entries {
        out.extend_from_slice(&index.to_le_bytes());
        out.extend_from_slice(&count.to_le_bytes());
    }
    out
}

pub fn encode_best(best: &BestTable) -> Vec<u8> {
    let entries: Vec<(usize, u32)> = best.iter().collect();
    let mut out = header();
    out.extend_from_slice(&(entries.len() as u64).to_le_bytes());
    for (n, edges) in entries {
        out.extend_from_slice(&(n as u32).to_le_bytes());
        out.extend_from_slice(&edges.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    path: &'a Path,
}

impl<'a> Reader<'a> {
    fn fail(&self, message: impl Into<String>) -> Error {
        Error::Checkpoint {
            path: self.path.to_path_buf(),
            message: message.into(),
        }
    }

    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        if self.bytes.len() < N {
            return Err(self.fail("truncated file"));
        }
        let (head, rest) = self.bytes.split_at(N);
        self.bytes = rest;
        Ok(head.try_into().expect("length checked"))
    }

    fn u32(&mut self) -> Result<u32> {
        self.take().map(u32::from_le_bytes)
    }

    fn u64(&mut self) -> Result<u64> {
        self.take().map(u64::from_le_bytes)
    }

    fn header(&mut self) -> Result<()> {
        if self.take::<4>()? != MAGIC {
            return Err(self.fail("bad magic bytes"));
        }
        let version = self.u32()?;
        if version != VERSION {
            return Err(self.fail(format!("unsupported version {version}")));
        }
        Ok(())
    }

    fn pairs(&mut self) -> Result<Vec<(u32, u32)>> {
        let len = self.u64()?;
        if self.bytes.len() as u64 != len.saturating_mul(8) {
            return Err(self.fail(format!("expected {len} entries, found {} bytes", self.bytes.len())));
        }
        (0..len).map(|_| Ok((self.u32()?, self.u32()?))).collect()
    }
}

/// Returns the counters and the seed they were recorded under.
pub fn decode_visits(bytes: &[u8], path: &Path) -> Result<(VisitationStore, u64)> {
    let mut r = Reader { bytes, path };
    r.header()?;
    let seed = r.u64()?;
    let head_bits = r.u32()?;
    if !(1..=32).contains(&head_bits) {
        return Err(r.fail(format!("head width {head_bits} out of range")));
    }
    let entries = r.pairs()?;
    if head_bits < 32 && entries.iter().any(|&(i, _)| i >> head_bits != 0) {
        return Err(r.fail("counter index exceeds head width"));
    }
    Ok((VisitationStore::from_entries(head_bits, entries), seed))
}

pub fn decode_best(bytes: &[u8], path: &Path) -> Result<BestTable> {
    let mut r = Reader { bytes, path };
    r.header()?;
    let entries = r.pairs()?;
    Ok(entries.into_iter().map(|(n, e)| (n as usize, e)).collect())
}

fn write(path: PathBuf, bytes: &[u8]) -> Result<()> {
    // Write-then-rename so an interrupted save leaves the old checkpoint.
    let tmp = path.with_extension("bin.tmp");
    fs::write(&tmp, bytes).map_err(Error::io(&tmp))?;
    fs::rename(&tmp, &path).map_err(Error::io(&path))
}

pub fn save(dir: &Path, state: &SearchState, seed: u64) -> Result<()> {
    write(dir.join(VISITATION_FILE), &encode_visits(&state.visits, seed))?;
    write(dir.join(BEST_FILE), &encode_best(&state.best))
}

/// Loads both checkpoints from `dir`. Returns `None` when neither exists;
/// fails when only one exists or the seed differs from `seed`.
pub fn load(dir: &Path, seed: u64) -> Result<Option<SearchState>> {
    let (vpath, bpath) = (dir.join(VISITATION_FILE), dir.join(BEST_FILE));
    match (vpath.exists(), bpath.exists()) {
        (false, false) => return Ok(None),
        (true, false) => return Err(missing(&bpath)),
        (false, true) => return Err(missing(&vpath)),
        (true, true) => {}
    }
    let (visits, stored) = decode_visits(&fs::read(&vpath).map_err(Error::io(&vpath))?, &vpath)?;
    if stored != seed {
        return Err(Error::Checkpoint {
            path: vpath,
            message: format!("recorded with seed {stored}, not {seed}"),
        });
    }
    let best = decode_best(&fs::read(&bpath).map_err(Error::io(&bpath))?, &bpath)?;
    Ok(Some(SearchState {
        visits,
        best,
        ..SearchState::default()
    }))
}

fn missing(path: &Path) -> Error {
    Error::Checkpoint {
        path: path.to_path_buf(),
        message: "missing; checkpoints are written in pairs".into(),
    }
}

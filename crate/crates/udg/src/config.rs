//! `key = value` search configuration files and per-size width tables.
//!
//! Recognised keys: `beam_width`, `max_vertices`, `runs`, `seed`,
//! `chunk_limit`, `start` and `width_table`. Paths are relative to the file
//! that names them. `#` starts a comment.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConfigFile {
    pub beam_width: Option<usize>,
    pub max_vertices: Option<usize>,
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub chunk_limit: Option<usize>,
    pub start: Option<PathBuf>,
    pub width_table: Option<PathBuf>,
}

/// Decimal, or hexadecimal with a `0x` prefix.
pub fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let s = s.replace('_', "");
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    }
    .map_err(|e| format!("bad seed `{s}`: {e}"))
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

pub fn parse_config(text: &str, path: &Path) -> Result<ConfigFile> {
    let base = path.parent().unwrap_or(Path::new(""));
    let err = |line: usize, message: String| Error::ConfigFile {
        path: path.to_path_buf(),
        line,
        message,
    };
    fn num<T: FromStr>(v: &str) -> std::result::Result<T, String> {
        v.parse().map_err(|_| format!("`{v}` is not a non-negative integer"))
    }
    let mut cfg = ConfigFile::default();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(i + 1, format!("expected `key = value`, found `{line}`")));
        };
        let (key, value) = (key.trim(), value.trim());
        let set = match key {
            "beam_width" => num(value).map(|v| cfg.beam_width = Some(v)),
            "max_vertices" => num(value).map(|v| cfg.max_vertices = Some(v)),
            "runs" => num(value).map(|v| cfg.runs = Some(v)),
            "chunk_limit" => num(value).map(|v| cfg.chunk_limit = Some(v)),
            "seed" => parse_seed(value).map(|v| cfg.seed = Some(v)),
            "start" => {
                cfg.start = Some(base.join(value));
                Ok(())
            }
            "width_table" => {
                cfg.width_table = Some(base.join(value));
                Ok(())
            }
            _ => Err(format!("unknown key `{key}`")),
        };
        set.map_err(|m| err(i + 1, m))?;
    }
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ConfigFile> {
    let text = fs::read_to_string(path).map_err(Error::io(path))?;
    parse_config(&text, path)
}

/// Lines of `<vertices> <width>`.
pub fn parse_width_table(text: &str, path: &Path) -> Result<BTreeMap<usize, usize>> {
    let mut table = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let parsed: Option<(usize, usize)> = match line.split_whitespace().collect::<Vec<_>>()[..] {
            [n, w] => n.parse().ok().zip(w.parse().ok()),
            _ => None,
        };
        let Some((n, w)) = parsed else {
            return Err(Error::ConfigFile {
                path: path.to_path_buf(),
                line: i + 1,
                message: format!("expected `<vertices> <width>`, found `{line}`"),
            });
        };
        table.insert(n, w);
    }
    Ok(table)
}

pub fn load_width_table(path: &Path) -> Result<BTreeMap<usize, usize>> {
    let text = fs::read_to_string(path).map_err(Error::io(path))?;
    parse_width_table(&text, path)
}

//! Sweep result files: `case,q,count,total` rows sorted by `(case, q)`, and a
//! JSON metadata sidecar next to them.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::histogram::{CaseHistograms, Histogram};
use super::SweepConfig;
use crate::error::{Error, Result};
use crate::orderfind::CaseKey;

pub const CSV_HEADER: &str = "case,q,count,total";

pub fn to_csv(hists: &CaseHistograms) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in hists.iter().flat_map(Histogram::csv_rows) {
        writeln!(out, "{row}").unwrap();
    }
    out
}

pub fn write_csv(hists: &CaseHistograms, path: &Path) -> Result<()> {
    fs::write(path, to_csv(hists))?;
    Ok(())
}

pub fn parse_csv(text: &str, path: &Path) -> Result<CaseHistograms> {
    let bad = |line: usize, reason: String| Error::Format {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => return Err(bad(1, format!("expected header `{CSV_HEADER}`"))),
    }
    let mut hists = CaseHistograms::new();
    let mut declared: [Option<u64>; 4] = [None; 4];
    let mut last: Option<(u8, u64)> = None;
    for (i, line) in lines {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [j, q, count, total] = fields[..] else {
            return Err(bad(lineno, "expected 4 fields".into()));
        };
        let num = |s: &str| {
            s.parse::<u64>()
                .map_err(|e| bad(lineno, format!("`{s}`: {e}")))
        };
        let (j, q, count, total) = (num(j)?, num(q)?, num(count)?, num(total)?);
        let case = u8::try_from(j)
            .ok()
            .and_then(CaseKey::from_index)
            .ok_or_else(|| bad(lineno, format!("unknown case {j}")))?;
        if q == 0 || count == 0 {
            return Err(bad(lineno, "q and count must be positive".into()));
        }
        if last.is_some_and(|prev| prev >= (case.j(), q)) {
            return Err(bad(
                lineno,
                "rows must be sorted by (case, q) without repeats".into(),
            ));
        }
        last = Some((case.j(), q));
        match declared[case.slot()] {
            Some(t) if t != total => {
                return Err(bad(
                    lineno,
                    format!("total {total} disagrees with earlier {t}"),
                ))
            }
            _ => declared[case.slot()] = Some(total),
        }
        hists.get_mut(case).add_count(q, count);
    }
    for case in CaseKey::ALL {
        if let Some(t) = declared[case.slot()] {
            if hists.get(case).total() != t {
                return Err(bad(
                    0,
                    format!(
                        "{case}: declared total {t}, rows sum to {}",
                        hists.get(case).total()
                    ),
                ));
            }
        }
    }
    Ok(hists)
}

pub fn read_csv(path: &Path) -> Result<CaseHistograms> {
    parse_csv(&fs::read_to_string(path)?, path)
}

pub fn metadata_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    output.with_file_name(name)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SweepMetadata {
    pub d_min: u64,
    pub d_max: u64,
    pub p_min: u32,
    pub p_max: u32,
    pub workers: usize,
    pub chunk_size: u64,
    pub parallel: bool,
    pub wall_time_secs: f64,
    pub pairs: u64,
    pub code_version: String,
}

impl SweepMetadata {
    pub fn new(config: &SweepConfig, hists: &CaseHistograms, elapsed: Duration) -> Self {
        Self {
            d_min: config.d_min,
            d_max: config.d_max,
            p_min: config.p_min,
            p_max: config.p_max,
            workers: config.workers,
            chunk_size: config.chunk_size,
            parallel: cfg!(feature = "parallel"),
            wall_time_secs: elapsed.as_secs_f64(),
            pairs: hists.pairs(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    /// The common range `m` when `d` and `p` share an upper bound.
    pub fn range(&self) -> u64 {
        self.d_max.max(self.p_max as u64)
    }
}

pub fn write_metadata(meta: &SweepMetadata, output: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(meta).map_err(std::io::Error::other)?;
    fs::write(metadata_path(output), json + "\n")?;
    Ok(())
}

pub fn read_metadata(output: &Path) -> Result<SweepMetadata> {
    let path = metadata_path(output);
    let text = fs::read_to_string(&path)?;
    serde_json::from_str(&text).map_err(|e| Error::Format {
        path,
        line: e.line(),
        reason: e.to_string(),
    })
}

impl Histogram {
    /// Rows for this case only, in the sweep file layout.
    pub fn csv_rows(&self) -> impl Iterator<Item = String> + '_ {
        self.iter()
            .map(move |(q, c)| format!("{},{q},{c},{}", self.case().j(), self.total()))
    }
}

//! Versioned JSON checkpoints: which `d` values are finished plus the
//! partial histograms accumulated over them.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::histogram::{CaseHistograms, Histogram};
use super::SweepConfig;
use crate::error::{Error, Result};
use crate::orderfind::CaseKey;

const SCHEMA: &str = "quadunit-sweep-checkpoint";
const VERSION: u32 = 1;

/// Stable digest over the sweep ranges. Worker count and chunking do not
/// affect the result and are excluded.
pub fn config_digest(config: &SweepConfig) -> String {
    let mut hasher = Sha256::new();
    hasher.update(
        format!(
            "d={}..{};p={}..{}",
            config.d_min, config.d_max, config.p_min, config.p_max
        )
        .as_bytes(),
    );
    hasher.finalize()[..16]
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Sorted, coalesced set of inclusive `d` intervals.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CompletedSet {
    ranges: Vec<(u64, u64)>,
}

impl CompletedSet {
    pub fn ranges(&self) -> &[(u64, u64)] {
        &self.ranges
    }

    pub fn insert(&mut self, lo: u64, hi: u64) {
        debug_assert!(lo <= hi);
        self.ranges.push((lo, hi));
        self.ranges.sort_unstable();
        let mut out: Vec<(u64, u64)> = Vec::with_capacity(self.ranges.len());
        for &(lo, hi) in &self.ranges {
            match out.last_mut() {
                Some(last) if lo <= last.1.saturating_add(1) => last.1 = last.1.max(hi),
                _ => out.push((lo, hi)),
            }
        }
        self.ranges = out;
    }

    pub fn contains(&self, d: u64) -> bool {
        self.ranges.iter().any(|&(lo, hi)| lo <= d && d <= hi)
    }

    /// Sub-intervals of `[lo, hi]` not yet covered.
    pub fn gaps(&self, lo: u64, hi: u64) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        let mut next = lo;
        for &(a, b) in &self.ranges {
            if b < next {
                continue;
            }
            if a > hi {
                break;
            }
            if a > next {
                out.push((next, a - 1));
            }
            next = b.saturating_add(1);
            if next > hi {
                return out;
            }
        }
        if next <= hi {
            out.push((next, hi));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub config_digest: String,
    pub completed_d: CompletedSet,
    pub partial: CaseHistograms,
}

#[derive(Serialize, Deserialize)]
struct RangesRecord {
    d_min: u64,
    d_max: u64,
    p_min: u32,
    p_max: u32,
}

#[derive(Serialize, Deserialize)]
struct HistogramRecord {
    case: u8,
    total: u64,
    counts: Vec<[u64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct CheckpointFile {
    schema: String,
    version: u32,
    digest: String,
    ranges: RangesRecord,
    completed_d: Vec<[u64; 2]>,
    histograms: Vec<HistogramRecord>,
}

impl Checkpoint {
    pub fn new(config: &SweepConfig) -> Self {
        Self {
            config_digest: config_digest(config),
            completed_d: CompletedSet::default(),
            partial: CaseHistograms::new(),
        }
    }

    /// Writes to a sibling temp file and renames over `path`.
    pub fn save(&self, path: &Path, config: &SweepConfig) -> Result<()> {
        let file = CheckpointFile {
            schema: SCHEMA.to_string(),
            version: VERSION,
            digest: self.config_digest.clone(),
            ranges: RangesRecord {
                d_min: config.d_min,
                d_max: config.d_max,
                p_min: config.p_min,
                p_max: config.p_max,
            },
            completed_d: self
                .completed_d
                .ranges()
                .iter()
                .map(|&(a, b)| [a, b])
                .collect(),
            histograms: self
                .partial
                .iter()
                .map(|h| HistogramRecord {
                    case: h.case().j(),
                    total: h.total(),
                    counts: h.iter().map(|(q, c)| [q, c]).collect(),
                })
                .collect(),
        };
        let json = serde_json::to_vec_pretty(&file).map_err(std::io::Error::other)?;
        let tmp = tmp_path(path);
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&json)?;
            f.write_all(b"\n")?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Loads and validates a checkpoint for `config`. Any structural problem
    /// or a digest for different ranges is an error; nothing is partially applied.
    pub fn load(path: &Path, config: &SweepConfig) -> Result<Self> {
        let corrupt = |reason: String| Error::CorruptCheckpoint {
            path: path.to_path_buf(),
            reason,
        };
        let bytes = fs::read(path)?;
        let file: CheckpointFile =
            serde_json::from_slice(&bytes).map_err(|e| corrupt(e.to_string()))?;
        if file.schema != SCHEMA || file.version != VERSION {
            return Err(corrupt(format!(
                "unsupported schema {} v{}",
                file.schema, file.version
            )));
        }
        let expected = config_digest(config);
        if file.digest != expected {
            return Err(Error::CheckpointMismatch {
                path: path.to_path_buf(),
                found: file.digest,
                expected,
            });
        }

        let mut completed = CompletedSet::default();
        for [lo, hi] in file.completed_d {
            if lo > hi || lo < config.d_min || hi > config.d_max {
                return Err(corrupt(format!(
                    "completed range [{lo}, {hi}] outside sweep"
                )));
            }
            completed.insert(lo, hi);
        }

        if file.histograms.len() != 4 {
            return Err(corrupt(format!(
                "expected 4 histograms, found {}",
                file.histograms.len()
            )));
        }
        let mut hists: Vec<Histogram> = Vec::with_capacity(4);
        for (rec, case) in file.histograms.into_iter().zip(CaseKey::ALL) {
            if rec.case != case.j() {
                return Err(corrupt(format!(
                    "histogram slot {case} holds j={}",
                    rec.case
                )));
            }
            let h = Histogram::from_counts(case, rec.counts.into_iter().map(|[q, c]| (q, c)));
            if h.total() != rec.total {
                return Err(corrupt(format!(
                    "{case} total {} does not match its counts ({})",
                    rec.total,
                    h.total()
                )));
            }
            hists.push(h);
        }
        let hists: [Histogram; 4] = hists.try_into().expect("length checked");

        Ok(Self {
            config_digest: expected,
            completed_d: completed,
            partial: CaseHistograms::from_array(hists)?,
        })
    }
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

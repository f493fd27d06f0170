//! Range sweep over `(d, p)` filling the four quotient histograms.
//!
//! Work is split into contiguous `d` chunks. Each chunk expands the continued
//! fraction of every admissible `d` once and reuses it for all primes. Chunks
//! are processed in batches; between batches the partial result is merged
//! and, if configured, checkpointed.

mod checkpoint;
mod histogram;
mod output;

use std::path::PathBuf;
use std::time::{Duration, Instant};

pub use checkpoint::{config_digest, Checkpoint, CompletedSet};
pub use histogram::{merge, CaseHistograms, Histogram};
pub use output::{
    metadata_path, parse_csv, read_csv, read_metadata, to_csv, write_csv, write_metadata,
    SweepMetadata, CSV_HEADER,
};

use crate::arith::{valid_d_mask, PrimeTables};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::orderfind::{order_and_quotient_unchecked, OrderResult};
use crate::pell::{cf_expand, FieldParams};

/// Largest `p_max` accepted; bounds the prime table memory.
pub const MAX_P: u32 = 100_000_000;
pub const DEFAULT_CHUNK_SIZE: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub d_min: u64,
    pub d_max: u64,
    pub p_min: u32,
    pub p_max: u32,
    pub workers: usize,
    pub checkpoint_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    /// `d` values per work unit.
    pub chunk_size: u64,
    /// Chunks per batch between merge/checkpoint barriers. 0 picks a default.
    pub batch_chunks: usize,
    /// Stop (leaving a checkpoint) after this many chunks of the remaining work.
    pub stop_after_chunks: Option<usize>,
}

impl SweepConfig {
    /// `d` in `[2, d_max]`, `p` in `[3, p_max]`, one worker per available core.
    pub fn new(d_max: u64, p_max: u32) -> Self {
        Self {
            d_min: 2,
            d_max,
            p_min: 3,
            p_max,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            checkpoint_path: None,
            output_path: None,
            chunk_size: DEFAULT_CHUNK_SIZE,
            batch_chunks: 0,
            stop_after_chunks: None,
        }
    }

    /// The common case `d, p <= m`.
    pub fn square(m: u64) -> Self {
        Self::new(m, u32::try_from(m).unwrap_or(u32::MAX))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.d_min < 2 {
            return bad(format!("d_min must be >= 2, got {}", self.d_min));
        }
        if self.p_min < 3 {
            return bad(format!("p_min must be >= 3, got {}", self.p_min));
        }
        if self.d_max < self.d_min {
            return bad(format!("d_max {} < d_min {}", self.d_max, self.d_min));
        }
        if self.p_max < self.p_min {
            return bad(format!("p_max {} < p_min {}", self.p_max, self.p_min));
        }
        if self.p_max > MAX_P {
            return bad(format!("p_max {} exceeds {MAX_P}", self.p_max));
        }
        if self.d_max > 1 << 40 {
            return bad(format!("d_max {} is out of range", self.d_max));
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if self.chunk_size == 0 {
            return bad("chunk_size must be at least 1".into());
        }
        Ok(())
    }

    fn batch_len(&self) -> usize {
        if self.batch_chunks > 0 {
            self.batch_chunks
        } else {
            (self.workers * 8).max(16)
        }
    }
}

/// Shared read-only state for one sweep: prime tables, the prime list and the
/// admissibility mask over the `d` range.
pub struct SweepPlan {
    d_min: u64,
    d_max: u64,
    tables: PrimeTables,
    primes: Vec<u32>,
    valid: Vec<bool>,
}

impl SweepPlan {
    pub fn new(config: &SweepConfig) -> Result<Self> {
        config.validate()?;
        // Every q0 is at most p_max + 1.
        let tables = PrimeTables::build(config.p_max + 1)?;
        let primes = tables
            .primes_in(config.p_min, config.p_max)
            .into_iter()
            .filter(|&p| p != 2)
            .collect();
        Ok(Self {
            d_min: config.d_min,
            d_max: config.d_max,
            tables,
            primes,
            valid: valid_d_mask(config.d_min, config.d_max),
        })
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn tables(&self) -> &PrimeTables {
        &self.tables
    }

    pub fn is_valid_d(&self, d: u64) -> bool {
        d >= self.d_min && d <= self.d_max && self.valid[(d - self.d_min) as usize]
    }

    pub fn valid_ds(&self) -> impl Iterator<Item = u64> + '_ {
        (self.d_min..=self.d_max).filter(|&d| self.is_valid_d(d))
    }

    /// Calls `f` with the result for every prime `p` in range with `p` not dividing `d`.
    pub fn for_each_record(&self, d: u64, mut f: impl FnMut(&OrderResult)) -> Result<()> {
        let params = FieldParams::new(d)?;
        let cf = cf_expand(&params);
        for &p in &self.primes {
            if d.is_multiple_of(p as u64) {
                continue;
            }
            let unit = cf.unit_mod_p_unchecked(p);
            f(&order_and_quotient_unchecked(&unit, d, &self.tables)?);
        }
        Ok(())
    }

    pub fn sweep_range(&self, lo: u64, hi: u64) -> Result<CaseHistograms> {
        let mut hists = CaseHistograms::new();
        for d in lo.max(self.d_min)..=hi.min(self.d_max) {
            if self.is_valid_d(d) {
                self.for_each_record(d, |r| hists.record(r))?;
            }
        }
        Ok(hists)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepStatus {
    Complete,
    /// Stopped early on request; the checkpoint (if any) holds the progress.
    Interrupted,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub histograms: CaseHistograms,
    pub status: SweepStatus,
    pub elapsed: Duration,
    pub chunks_processed: usize,
}

/// Splits the `d` intervals still to do into work units of `chunk_size`.
fn pending_chunks(completed: &CompletedSet, config: &SweepConfig) -> Vec<(u64, u64)> {
    let mut chunks = Vec::new();
    for (lo, hi) in completed.gaps(config.d_min, config.d_max) {
        let mut start = lo;
        while start <= hi {
            let end = start.saturating_add(config.chunk_size - 1).min(hi);
            chunks.push((start, end));
            start = end + 1;
        }
    }
    chunks
}

/// Runs (or resumes) a sweep. When `output_path` is set and the sweep
/// completes, the CSV and its metadata sidecar are written.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    let started = Instant::now();
    let plan = SweepPlan::new(config)?;
    let executor = Executor::new(config.workers)?;

    let mut state = match &config.checkpoint_path {
        Some(path) if path.exists() => Checkpoint::load(path, config)?,
        _ => Checkpoint::new(config),
    };

    let pending = pending_chunks(&state.completed_d, config);
    let limit = config
        .stop_after_chunks
        .map_or(pending.len(), |n| n.min(pending.len()));

    for batch in pending[..limit].chunks(config.batch_len()) {
        let partial = executor.map_reduce(
            batch,
            |&(lo, hi)| plan.sweep_range(lo, hi),
            CaseHistograms::merged,
        )?;
        state.partial.merge_from(&partial);
        for &(lo, hi) in batch {
            state.completed_d.insert(lo, hi);
        }
        if let Some(path) = &config.checkpoint_path {
            state.save(path, config)?;
        }
    }

    let status = if limit < pending.len() {
        SweepStatus::Interrupted
    } else {
        SweepStatus::Complete
    };
    let elapsed = started.elapsed();
    if status == SweepStatus::Complete {
        if let Some(out) = &config.output_path {
            write_csv(&state.partial, out)?;
            write_metadata(&SweepMetadata::new(config, &state.partial, elapsed), out)?;
        }
    }
    Ok(SweepOutcome {
        histograms: state.partial,
        status,
        elapsed,
        chunks_processed: limit,
    })
}

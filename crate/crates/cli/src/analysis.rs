//! Streaming histogram construction over corpus files.

use std::path::Path;

use rayon::prelude::*;
use shardbench::{build_histogram_par, load_corpus, Histogram, Rejection, Strategy, Username};

use crate::error::CliError;

/// Names per parallel batch. Only one batch is held in memory at a time.
const BATCH: usize = 1 << 16;

/// Most rejected lines echoed individually.
const MAX_REPORTED_REJECTIONS: usize = 100;

pub const THREADS_ENV: &str = "SHARDBENCH_THREADS";

/// Runs `f` on a pool sized by `SHARDBENCH_THREADS` (0 or unset = one per core).
pub fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v.trim().parse::<usize>().map_err(|_| {
            CliError::usage(format!(
                "{THREADS_ENV} must be a non-negative integer, got {v:?}"
            ))
        })?,
        _ => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::usage(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

pub struct Job {
    pub strategy: Strategy,
    pub histogram: Histogram,
}

pub struct ScanSummary {
    pub rejections: Vec<Rejection>,
}

/// Reads the corpus once, feeding every name to every job.
pub fn scan_corpus(path: &Path, jobs: &mut [Job]) -> Result<ScanSummary, CliError> {
    let mut reader = load_corpus(path)?;
    let mut batch: Vec<Username> = Vec::with_capacity(BATCH);

    let flush = |batch: &mut Vec<Username>, jobs: &mut [Job]| -> Result<(), CliError> {
        jobs.par_iter_mut().try_for_each(|job| {
            let level = job.histogram.moduli().len() - 1;
            let part = build_histogram_par(batch, &job.strategy, level)?;
            job.histogram.merge_from(&part)?;
            Ok::<_, CliError>(())
        })?;
        batch.clear();
        Ok(())
    };

    loop {
        batch.extend(reader.by_ref().take(BATCH));
        if batch.is_empty() {
            break;
        }
        flush(&mut batch, jobs)?;
    }
    if let Some(err) = reader.take_error() {
        return Err(CliError::io(path, err));
    }
    Ok(ScanSummary {
        rejections: reader.rejections().to_vec(),
    })
}

pub fn report_rejections(rejections: &[Rejection]) {
    if rejections.is_empty() {
        return;
    }
    for r in rejections.iter().take(MAX_REPORTED_REJECTIONS) {
        eprintln!("{r}");
    }
    if rejections.len() > MAX_REPORTED_REJECTIONS {
        eprintln!("... {} more", rejections.len() - MAX_REPORTED_REJECTIONS);
    }
    eprintln!("rejected={}", rejections.len());
}

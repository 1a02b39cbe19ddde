//! Bucket histograms and distribution-quality statistics.
//!
//! A histogram at level `k` counts names over the joint bucket space of
//! levels `0..=k`, linearized row-major. The figure of merit is the standard
//! deviation about the *ideal* mean (total / bucket count), taken over every
//! bucket including empty ones, divided by that mean.

use std::borrow::Borrow;
use std::num::NonZeroU64;

use rayon::prelude::*;
use thiserror::Error;

use crate::strategy::{counter_placement, MappingConfig, Strategy};
use crate::username::Username;

/// Largest joint bucket space held as a dense array (covers 64*64*128).
pub const MAX_BUCKETS: u64 = 1 << 21;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("level {level} is out of range for a strategy of depth {depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("joint bucket space of {buckets} exceeds the limit of {MAX_BUCKETS}")]
    TooManyBuckets { buckets: u64 },
    #[error("histogram is empty")]
    EmptyHistogram,
    #[error("cannot merge histograms of shape {left:?} and {right:?}")]
    ShapeMismatch { left: Vec<u32>, right: Vec<u32> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    moduli: Vec<u32>,
    counts: Vec<u64>,
    total: u64,
    skipped: u64,
}

impl Histogram {
    /// An all-zero histogram over the product of `moduli`.
    pub fn zeroed(moduli: Vec<u32>) -> Result<Self, StatsError> {
        let buckets = moduli
            .iter()
            .try_fold(1u64, |acc, &m| acc.checked_mul(u64::from(m)))
            .unwrap_or(u64::MAX);
        if buckets > MAX_BUCKETS {
            return Err(StatsError::TooManyBuckets { buckets });
        }
        Ok(Histogram {
            moduli,
            counts: vec![0; buckets as usize],
            total: 0,
            skipped: 0,
        })
    }

    /// Zeroed histogram shaped for `strategy` at `level`.
    pub fn for_strategy(strategy: &Strategy, level: usize) -> Result<Self, StatsError> {
        let depth = strategy.depth();
        if level >= depth {
            return Err(StatsError::LevelOutOfRange { level, depth });
        }
        let mut moduli = strategy.level_moduli();
        moduli.truncate(level + 1);
        Histogram::zeroed(moduli)
    }

    /// Per-level moduli whose product is the bucket space.
    pub fn moduli(&self) -> &[u32] {
        &self.moduli
    }

    pub fn bucket_count(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Names whose placement was too shallow to reach this level.
    pub fn skipped(&self) -> u64 {
        self.skipped
    }

    pub fn record(&mut self, bucket: u64) {
        self.counts[bucket as usize] += 1;
        self.total += 1;
    }

    pub fn record_skipped(&mut self) {
        self.skipped += 1;
    }

    /// Places `name` with `strategy` and counts it at the histogram's level.
    ///
    /// `strategy` must be the one the histogram was shaped for.
    pub fn add(&mut self, strategy: &Strategy, name: &Username) {
        let level = self.moduli.len() - 1;
        match strategy.place(name).joint_index(level) {
            Some(bucket) => self.record(bucket),
            None => self.record_skipped(),
        }
    }

    /// Element-wise sum.
    pub fn merge(mut self, other: &Histogram) -> Result<Histogram, StatsError> {
        self.merge_from(other)?;
        Ok(self)
    }

    /// In-place [`merge`](Self::merge). `self` is untouched on error.
    pub fn merge_from(&mut self, other: &Histogram) -> Result<(), StatsError> {
        if self.moduli != other.moduli {
            return Err(StatsError::ShapeMismatch {
                left: self.moduli.clone(),
                right: other.moduli.clone(),
            });
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
        self.skipped += other.skipped;
        Ok(())
    }

    pub fn stats(&self) -> Result<DistributionStats, StatsError> {
        compute_stats(self)
    }
}

pub fn merge_histograms(a: &Histogram, b: &Histogram) -> Result<Histogram, StatsError> {
    a.clone().merge(b)
}

/// Single pass over `corpus`.
pub fn build_histogram<I>(
    corpus: I,
    strategy: &Strategy,
    level: usize,
) -> Result<Histogram, StatsError>
where
    I: IntoIterator,
    I::Item: Borrow<Username>,
{
    let mut hist = Histogram::for_strategy(strategy, level)?;
    for name in corpus {
        hist.add(strategy, name.borrow());
    }
    Ok(hist)
}

/// Same result as [`build_histogram`], computed on the current rayon pool.
pub fn build_histogram_par(
    names: &[Username],
    strategy: &Strategy,
    level: usize,
) -> Result<Histogram, StatsError> {
    let empty = Histogram::for_strategy(strategy, level)?;
    let hist = names
        .par_iter()
        .fold(
            || empty.clone(),
            |mut hist, name| {
                hist.add(strategy, name);
                hist
            },
        )
        .reduce(
            || empty.clone(),
            |a, b| a.merge(&b).expect("partial histograms share a shape"),
        );
    Ok(hist)
}

/// Server loads for member IDs `1..=members` under counter mapping.
pub fn mapping_histogram(members: u64, cfg: &MappingConfig) -> Result<Histogram, StatsError> {
    let mut hist = Histogram::zeroed(vec![cfg.num_servers()])?;
    for id in 1..=members {
        let slot = counter_placement(NonZeroU64::new(id).expect("ids start at 1"), cfg);
        hist.record(u64::from(slot.server));
    }
    Ok(hist)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionStats {
    pub bucket_count: usize,
    pub total: u64,
    pub ideal_mean: f64,
    pub std_dev: f64,
    pub deviation_ratio: f64,
}

pub fn compute_stats(hist: &Histogram) -> Result<DistributionStats, StatsError> {
    if hist.total == 0 {
        return Err(StatsError::EmptyHistogram);
    }
    let buckets = hist.counts.len() as f64;
    let ideal_mean = hist.total as f64 / buckets;
    let sum_sq: f64 = hist
        .counts
        .iter()
        .map(|&c| {
            let d = c as f64 - ideal_mean;
            d * d
        })
        .sum();
    let std_dev = (sum_sq / buckets).sqrt();
    Ok(DistributionStats {
        bucket_count: hist.counts.len(),
        total: hist.total,
        ideal_mean,
        std_dev,
        deviation_ratio: std_dev / ideal_mean,
    })
}

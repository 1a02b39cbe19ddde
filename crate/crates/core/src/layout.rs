//! Storage paths and directory fan-out checks.
//!
//! Every path ends in the username itself, so two distinct names never share
//! a final location even when all their bucket directories coincide.

use std::fmt;

use crate::placement::Placement;
use crate::strategy::{md5_placement, Md5Config};
use crate::username::Username;

/// Default per-directory child limit.
pub const DEFAULT_FANOUT_LIMIT: u64 = 64_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StoragePath {
    root: String,
    segments: Vec<String>,
    leaf: Username,
}

impl StoragePath {
    /// Trailing slashes on `root` are dropped; a bare `/` root renders as `/seg/...`.
    pub fn new(root: &str, segments: Vec<String>, leaf: Username) -> Self {
        StoragePath {
            root: root.trim_end_matches('/').to_string(),
            segments,
            leaf,
        }
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn segments(&self) -> &[String] {
        &self.segments
    }

    pub fn leaf(&self) -> &Username {
        &self.leaf
    }
}

impl fmt::Display for StoragePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.root)?;
        for seg in &self.segments {
            write!(f, "/{seg}")?;
        }
        write!(f, "/{}", self.leaf)
    }
}

/// `<root>/f/r/a/n/k/i/frankie`: one directory per leading character.
pub fn letter_path(name: &Username, root: &str, max_depth: usize) -> StoragePath {
    let segments = name
        .as_str()
        .chars()
        .take(max_depth)
        .map(String::from)
        .collect();
    StoragePath::new(root, segments, name.clone())
}

/// Decimal bucket directories followed by the username.
pub fn bucket_path(name: &Username, placement: &Placement, root: &str) -> StoragePath {
    let segments = placement.buckets().map(|b| b.to_string()).collect();
    StoragePath::new(root, segments, name.clone())
}

pub fn md5_path(name: &Username, cfg: &Md5Config, root: &str) -> StoragePath {
    bucket_path(name, &md5_placement(name, cfg), root)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanoutReport {
    /// Children of any one directory at each level.
    pub per_level_dirs: Vec<u64>,
    /// Leaf bucket directories beneath one top-level directory.
    pub dirs_under_one_top: u64,
    pub total_leaf_buckets: u64,
    pub limit: u64,
    pub ok: bool,
}

/// Checks a tree whose level `k` has `moduli[k]` children per directory.
///
/// The limit applies per directory, not to the tree as a whole. Products
/// saturate at `u64::MAX`.
pub fn fanout_report(moduli: &[u32], limit: u64) -> FanoutReport {
    let per_level_dirs: Vec<u64> = moduli.iter().map(|&m| u64::from(m)).collect();
    let product = |levels: &[u64]| levels.iter().fold(1u64, |acc, &m| acc.saturating_mul(m));
    let dirs_under_one_top = product(per_level_dirs.get(1..).unwrap_or(&[]));
    let total_leaf_buckets = product(&per_level_dirs);
    let ok = per_level_dirs.iter().all(|&n| n < limit);
    FanoutReport {
        per_level_dirs,
        dirs_under_one_top,
        total_leaf_buckets,
        limit,
        ok,
    }
}

impl fmt::Display for FanoutReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let levels: Vec<String> = self.per_level_dirs.iter().map(u64::to_string).collect();
        writeln!(f, "per_level_dirs={}", levels.join(","))?;
        writeln!(f, "dirs_under_one_top={}", self.dirs_under_one_top)?;
        writeln!(f, "total_leaf_buckets={}", self.total_leaf_buckets)?;
        writeln!(f, "limit={}", self.limit)?;
        write!(f, "ok={}", self.ok)
    }
}

use std::fmt;

/// One level of a placement: the chosen bucket and the size of the bucket space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Level {
    pub bucket: u32,
    pub modulus: u32,
}

/// Per-level bucket indices produced by a strategy for one username.
///
/// Every level satisfies `bucket < modulus`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Placement {
    levels: Vec<Level>,
}

impl Placement {
    pub(crate) fn with_capacity(depth: usize) -> Self {
        Placement {
            levels: Vec::with_capacity(depth),
        }
    }

    pub(crate) fn push(&mut self, bucket: u32, modulus: u32) {
        debug_assert!(modulus > 0 && bucket < modulus);
        self.levels.push(Level { bucket, modulus });
    }

    /// Builds a placement from `(bucket, modulus)` pairs, or `None` if any
    /// bucket falls outside its modulus.
    pub fn from_pairs(pairs: &[(u32, u32)]) -> Option<Self> {
        let mut placement = Placement::with_capacity(pairs.len());
        for &(bucket, modulus) in pairs {
            if modulus == 0 || bucket >= modulus {
                return None;
            }
            placement.push(bucket, modulus);
        }
        Some(placement)
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn buckets(&self) -> impl Iterator<Item = u32> + '_ {
        self.levels.iter().map(|l| l.bucket)
    }

    /// Row-major index of levels `0..=level` in their joint bucket space, or
    /// `None` when the placement is not that deep.
    pub fn joint_index(&self, level: usize) -> Option<u64> {
        let prefix = self.levels.get(..=level)?;
        Some(prefix.iter().fold(0u64, |acc, l| {
            acc * u64::from(l.modulus) + u64::from(l.bucket)
        }))
    }
}

impl fmt::Display for Placement {
    /// Space-separated bucket indices, e.g. `18 40 72`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, level) in self.levels.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", level.bucket)?;
        }
        Ok(())
    }
}

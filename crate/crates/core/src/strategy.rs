//! Placement strategies.
//!
//! Three strategies key on the username alone:
//!
//! * **letter**: one level per leading character, bucket = alphabet index (mod 37).
//! * **ascii-sum**: level `k` sums the byte values of the name with its first
//!   `k` characters removed, modulo that level's modulus.
//! * **md5**: level `k` reads hex pair `k` of the name's MD5 digest, modulo
//!   that level's modulus.
//!
//! The fourth, counter mapping, keys on a sequential member ID instead and
//! is exposed through [`counter_placement`].

use std::num::NonZeroU64;

use thiserror::Error;

use crate::digest::{md5_hex, HexDigest};
use crate::placement::Placement;
use crate::username::{Username, ALPHABET_SIZE};

/// Deepest letter expansion supported.
pub const MAX_LETTER_LEVELS: u8 = 6;

/// An MD5 digest has 32 hex characters, so 16 pairs.
pub const MAX_MD5_LEVELS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("at least one level modulus is required")]
    NoLevels,
    #[error("modulus {modulus} is outside {min}..={max}")]
    ModulusOutOfRange { modulus: u32, min: u32, max: u32 },
    #[error("{levels} levels requested, at most {max} are supported")]
    TooManyLevels { levels: usize, max: usize },
    #[error("letter expansion depth must be 1..={MAX_LETTER_LEVELS}, got {0}")]
    LetterLevels(u8),
    #[error("bucket size must be at least 1")]
    ZeroBucketSize,
    #[error("server count must be at least 1")]
    ZeroServers,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("dropping {drop} characters from a {len}-character name leaves nothing to sum")]
    NothingToSum { drop: usize, len: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LetterConfig {
    levels: u8,
}

impl LetterConfig {
    pub fn new(levels: u8) -> Result<Self, ConfigError> {
        if !(1..=MAX_LETTER_LEVELS).contains(&levels) {
            return Err(ConfigError::LetterLevels(levels));
        }
        Ok(LetterConfig { levels })
    }

    pub fn levels(&self) -> u8 {
        self.levels
    }

    /// 37 at every level.
    pub fn moduli(&self) -> Vec<u32> {
        vec![ALPHABET_SIZE; usize::from(self.levels)]
    }
}

impl Default for LetterConfig {
    fn default() -> Self {
        LetterConfig {
            levels: MAX_LETTER_LEVELS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsciiSumConfig {
    level_moduli: Vec<u32>,
}

impl AsciiSumConfig {
    /// A modulus of 1 is accepted and sends every name to bucket 0.
    pub fn new(level_moduli: Vec<u32>) -> Result<Self, ConfigError> {
        if level_moduli.is_empty() {
            return Err(ConfigError::NoLevels);
        }
        if let Some(&modulus) = level_moduli.iter().find(|&&m| m == 0) {
            return Err(ConfigError::ModulusOutOfRange {
                modulus,
                min: 1,
                max: u32::MAX,
            });
        }
        Ok(AsciiSumConfig { level_moduli })
    }

    pub fn moduli(&self) -> &[u32] {
        &self.level_moduli
    }
}

impl Default for AsciiSumConfig {
    fn default() -> Self {
        AsciiSumConfig {
            level_moduli: vec![31, 33],
        }
    }
}

/// Which bytes are fed to MD5 for a username.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Md5Input {
    /// The name followed by a single `\n`, i.e. what `echo <name> | md5sum`
    /// hashes. This reproduces the reference digest
    /// `MD5(frank) = d268c8fe7f154537c2c9ed60a0b8f2fd`.
    #[default]
    NewlineTerminated,
    /// The name's bytes only.
    Bare,
}

impl Md5Input {
    pub fn digest(self, name: &Username) -> HexDigest {
        match self {
            Md5Input::Bare => md5_hex(name.as_bytes()),
            Md5Input::NewlineTerminated => {
                let mut line = Vec::with_capacity(name.len() + 1);
                line.extend_from_slice(name.as_bytes());
                line.push(b'\n');
                md5_hex(&line)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Md5Config {
    level_moduli: Vec<u32>,
    input: Md5Input,
}

impl Md5Config {
    pub fn new(level_moduli: Vec<u32>) -> Result<Self, ConfigError> {
        if level_moduli.is_empty() {
            return Err(ConfigError::NoLevels);
        }
        if level_moduli.len() > MAX_MD5_LEVELS {
            return Err(ConfigError::TooManyLevels {
                levels: level_moduli.len(),
                max: MAX_MD5_LEVELS,
            });
        }
        // A hex pair spans 0..=255.
        if let Some(&modulus) = level_moduli.iter().find(|&&m| !(2..=256).contains(&m)) {
            return Err(ConfigError::ModulusOutOfRange {
                modulus,
                min: 2,
                max: 256,
            });
        }
        Ok(Md5Config {
            level_moduli,
            input: Md5Input::default(),
        })
    }

    pub fn with_input(mut self, input: Md5Input) -> Self {
        self.input = input;
        self
    }

    pub fn moduli(&self) -> &[u32] {
        &self.level_moduli
    }

    pub fn input(&self) -> Md5Input {
        self.input
    }
}

impl Default for Md5Config {
    fn default() -> Self {
        Md5Config {
            level_moduli: vec![64, 64, 128],
            input: Md5Input::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MappingConfig {
    bucket_size: u64,
    num_servers: u32,
}

impl MappingConfig {
    pub fn new(bucket_size: u64, num_servers: u32) -> Result<Self, ConfigError> {
        if bucket_size == 0 {
            return Err(ConfigError::ZeroBucketSize);
        }
        if num_servers == 0 {
            return Err(ConfigError::ZeroServers);
        }
        Ok(MappingConfig {
            bucket_size,
            num_servers,
        })
    }

    pub fn bucket_size(&self) -> u64 {
        self.bucket_size
    }

    pub fn num_servers(&self) -> u32 {
        self.num_servers
    }
}

pub fn letter_placement(name: &Username, cfg: &LetterConfig) -> Placement {
    let depth = usize::from(cfg.levels).min(name.len());
    let mut placement = Placement::with_capacity(depth);
    for idx in name.char_indices().take(depth) {
        placement.push(idx.get() % ALPHABET_SIZE, ALPHABET_SIZE);
    }
    placement
}

/// Sum of the byte values of `name` after skipping its first `drop` characters.
pub fn ascii_sum(name: &Username, drop: usize) -> Result<u32, StrategyError> {
    let bytes = name.as_bytes();
    if drop >= bytes.len() {
        return Err(StrategyError::NothingToSum {
            drop,
            len: bytes.len(),
        });
    }
    Ok(bytes[drop..].iter().map(|&b| u32::from(b)).sum())
}

/// Names shorter than the configured depth get a shallower placement, so
/// every level sums at least one character.
pub fn ascii_sum_placement(name: &Username, cfg: &AsciiSumConfig) -> Placement {
    let depth = cfg.level_moduli.len().min(name.len());
    let mut placement = Placement::with_capacity(depth);
    for (drop, &modulus) in cfg.level_moduli.iter().take(depth).enumerate() {
        let sum = ascii_sum(name, drop).expect("depth is bounded by the name length");
        placement.push(sum % modulus, modulus);
    }
    placement
}

/// Digest of `name` under the default [`Md5Input`] framing.
pub fn md5_digest(name: &Username) -> HexDigest {
    Md5Input::default().digest(name)
}

pub fn hex_pair_value(digest: &HexDigest, pair_index: usize) -> u8 {
    digest.pair_value(pair_index)
}

pub fn md5_placement(name: &Username, cfg: &Md5Config) -> Placement {
    let digest = cfg.input.digest(name);
    let mut placement = Placement::with_capacity(cfg.level_moduli.len());
    for (k, &modulus) in cfg.level_moduli.iter().enumerate() {
        placement.push(u32::from(hex_pair_value(&digest, k)) % modulus, modulus);
    }
    placement
}

/// Where a sequentially numbered member lands under counter mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CounterSlot {
    pub bucket: u64,
    pub server: u32,
}

/// IDs are 1-based. Bucket `b` holds IDs `b*S+1 ..= (b+1)*S` and buckets are
/// dealt round-robin over the servers.
pub fn counter_placement(member_id: NonZeroU64, cfg: &MappingConfig) -> CounterSlot {
    let bucket = (member_id.get() - 1) / cfg.bucket_size;
    let server = (bucket % u64::from(cfg.num_servers)) as u32;
    CounterSlot { bucket, server }
}

/// A username-keyed strategy together with its configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    Letter(LetterConfig),
    AsciiSum(AsciiSumConfig),
    Md5(Md5Config),
}

impl Strategy {
    pub fn place(&self, name: &Username) -> Placement {
        match self {
            Strategy::Letter(cfg) => letter_placement(name, cfg),
            Strategy::AsciiSum(cfg) => ascii_sum_placement(name, cfg),
            Strategy::Md5(cfg) => md5_placement(name, cfg),
        }
    }

    /// Modulus of every level the strategy can produce, in order.
    pub fn level_moduli(&self) -> Vec<u32> {
        match self {
            Strategy::Letter(cfg) => cfg.moduli(),
            Strategy::AsciiSum(cfg) => cfg.moduli().to_vec(),
            Strategy::Md5(cfg) => cfg.moduli().to_vec(),
        }
    }

    /// Maximum placement depth; short names may produce less.
    pub fn depth(&self) -> usize {
        match self {
            Strategy::Letter(cfg) => usize::from(cfg.levels()),
            Strategy::AsciiSum(cfg) => cfg.moduli().len(),
            Strategy::Md5(cfg) => cfg.moduli().len(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Letter(_) => "letter",
            Strategy::AsciiSum(_) => "ascii-sum",
            Strategy::Md5(_) => "md5",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::Strategy;
    use super::*;
    use crate::username::normalize_username;
    use proptest::prelude::*;
    use proptest::strategy::Strategy as _;

    fn u(s: &str) -> Username {
        normalize_username(s).unwrap()
    }

    fn pairs(p: &Placement) -> Vec<(u32, u32)> {
        p.levels().iter().map(|l| (l.bucket, l.modulus)).collect()
    }

    #[test]
    fn letter_examples() {
        let three = LetterConfig::new(3).unwrap();
        assert_eq!(
            pairs(&letter_placement(&u("frankie"), &three)),
            [(15, 37), (27, 37), (10, 37)]
        );
        let six = LetterConfig::new(6).unwrap();
        assert_eq!(pairs(&letter_placement(&u("b"), &six)), [(11, 37)]);
        let one = LetterConfig::new(1).unwrap();
        assert_eq!(pairs(&letter_placement(&u("0"), &one)), [(0, 37)]);
    }

    #[test]
    fn letter_config_bounds() {
        assert_eq!(LetterConfig::new(0), Err(ConfigError::LetterLevels(0)));
        assert_eq!(LetterConfig::new(7), Err(ConfigError::LetterLevels(7)));
        assert_eq!(LetterConfig::default().levels(), 6);
    }

    #[test]
    fn ascii_sum_examples() {
        assert_eq!(ascii_sum(&u("bob"), 0), Ok(98 + 111 + 98));
        assert_eq!(ascii_sum(&u("bob"), 0), Ok(307));
        assert_eq!(ascii_sum(&u("bob"), 1), Ok(209));
        assert_eq!(ascii_sum(&u("a"), 0), Ok(97));
        assert_eq!(
            ascii_sum(&u("bob"), 3),
            Err(StrategyError::NothingToSum { drop: 3, len: 3 })
        );
    }

    #[test]
    fn ascii_sum_placement_examples() {
        let cfg = AsciiSumConfig::default();
        assert_eq!(cfg.moduli(), [31, 33]);
        assert_eq!(
            pairs(&ascii_sum_placement(&u("bob"), &cfg)),
            [(28, 31), (11, 33)]
        );
        assert_eq!(pairs(&ascii_sum_placement(&u("a"), &cfg)), [(4, 31)]);
        let one = AsciiSumConfig::new(vec![1]).unwrap();
        assert_eq!(pairs(&ascii_sum_placement(&u("bob"), &one)), [(0, 1)]);
    }

    #[test]
    fn ascii_sum_config_rejects_zero_and_empty() {
        assert_eq!(AsciiSumConfig::new(vec![]), Err(ConfigError::NoLevels));
        assert!(AsciiSumConfig::new(vec![31, 0]).is_err());
    }

    #[test]
    fn ascii_sum_ignores_order() {
        for (a, b) in [("nathan", "thanan"), ("bob", "obb"), ("ethan", "nahte")] {
            assert_eq!(ascii_sum(&u(a), 0), ascii_sum(&u(b), 0));
        }
    }

    #[test]
    fn md5_digest_examples() {
        assert_eq!(
            md5_digest(&u("frank")).as_str(),
            "d268c8fe7f154537c2c9ed60a0b8f2fd"
        );
        assert_eq!(md5_digest(&u("Frank")), md5_digest(&u("frank")));
        assert_eq!(
            Md5Input::Bare.digest(&u("abc")).as_str(),
            "900150983cd24fb0d6963f7d28e17f72"
        );
    }

    #[test]
    fn md5_placement_examples() {
        let frank = u("frank");
        let digest = md5_digest(&frank);
        assert_eq!(hex_pair_value(&digest, 0), 210);
        assert_eq!(hex_pair_value(&digest, 1), 104);

        let cfg = Md5Config::default();
        assert_eq!(
            pairs(&md5_placement(&frank, &cfg)),
            [(18, 64), (40, 64), (72, 128)]
        );
        let whole = Md5Config::new(vec![256]).unwrap();
        assert_eq!(pairs(&md5_placement(&frank, &whole)), [(210, 256)]);
        let nibble = Md5Config::new(vec![16]).unwrap();
        assert_eq!(pairs(&md5_placement(&frank, &nibble)), [(2, 16)]);
    }

    #[test]
    fn md5_bare_framing_differs() {
        let cfg = Md5Config::default().with_input(Md5Input::Bare);
        // 26253c... -> 0x26, 0x25, 0x3c
        assert_eq!(
            pairs(&md5_placement(&u("frank"), &cfg)),
            [(0x26, 64), (0x25, 64), (0x3c, 128)]
        );
    }

    #[test]
    fn md5_config_bounds() {
        assert_eq!(Md5Config::new(vec![]), Err(ConfigError::NoLevels));
        assert!(Md5Config::new(vec![1]).is_err());
        assert!(Md5Config::new(vec![257]).is_err());
        assert!(Md5Config::new(vec![64; 16]).is_ok());
        assert_eq!(
            Md5Config::new(vec![64; 17]),
            Err(ConfigError::TooManyLevels {
                levels: 17,
                max: 16
            })
        );
    }

    #[test]
    fn counter_examples() {
        let id = |n: u64| NonZeroU64::new(n).unwrap();
        let big = MappingConfig::new(50_000, 20).unwrap();
        assert_eq!(
            counter_placement(id(1_000_001), &big),
            CounterSlot {
                bucket: 20,
                server: 0
            }
        );
        assert_eq!(
            counter_placement(id(1_000_000), &big),
            CounterSlot {
                bucket: 19,
                server: 19
            }
        );
        let small = MappingConfig::new(10_000, 20).unwrap();
        assert_eq!(
            counter_placement(id(1), &small),
            CounterSlot {
                bucket: 0,
                server: 0
            }
        );
        assert_eq!(
            counter_placement(id(1_049_999), &small),
            CounterSlot {
                bucket: 104,
                server: 4
            }
        );
        assert_eq!(MappingConfig::new(0, 1), Err(ConfigError::ZeroBucketSize));
        assert_eq!(MappingConfig::new(1, 0), Err(ConfigError::ZeroServers));
    }

    fn server_loads(n: u64, cfg: &MappingConfig) -> Vec<u64> {
        let mut loads = vec![0u64; cfg.num_servers() as usize];
        for id in 1..=n {
            let slot = counter_placement(NonZeroU64::new(id).unwrap(), cfg);
            loads[slot.server as usize] += 1;
        }
        loads
    }

    fn username_strategy() -> impl proptest::strategy::Strategy<Value = Username> {
        "[0-9a-z_]{1,64}".prop_map(|s| u(&s))
    }

    fn any_strategy() -> impl proptest::strategy::Strategy<Value = Strategy> {
        prop_oneof![
            (1u8..=6).prop_map(|l| Strategy::Letter(LetterConfig::new(l).unwrap())),
            prop::collection::vec(1u32..5000, 1..6)
                .prop_map(|m| Strategy::AsciiSum(AsciiSumConfig::new(m).unwrap())),
            prop::collection::vec(2u32..=256, 1..=16)
                .prop_map(|m| Strategy::Md5(Md5Config::new(m).unwrap())),
        ]
    }

    proptest! {
        #[test]
        fn placements_stay_in_range_and_are_deterministic(
            name in username_strategy(),
            strategy in any_strategy(),
        ) {
            let p = strategy.place(&name);
            prop_assert_eq!(&p, &strategy.place(&name));
            prop_assert!(p.depth() <= strategy.depth());
            prop_assert!(p.depth() >= 1);
            for (level, modulus) in p.levels().iter().zip(strategy.level_moduli()) {
                prop_assert_eq!(level.modulus, modulus);
                prop_assert!(level.bucket < level.modulus);
            }
        }

        #[test]
        fn ascii_sum_is_permutation_invariant(name in "[0-9a-z_]{1,30}", seed in any::<u64>()) {
            let mut chars: Vec<char> = name.chars().collect();
            // Cheap deterministic shuffle.
            let mut state = seed | 1;
            for i in (1..chars.len()).rev() {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                chars.swap(i, (state % (i as u64 + 1)) as usize);
            }
            let shuffled: String = chars.into_iter().collect();
            prop_assert_eq!(ascii_sum(&u(&name), 0), ascii_sum(&u(&shuffled), 0));
        }

        #[test]
        fn md5_placement_reads_only_first_three_pairs(
            prefix in "[0-9a-f]{6}",
            tail_a in "[0-9a-f]{26}",
            tail_b in "[0-9a-f]{26}",
        ) {
            let a = HexDigest::parse(&format!("{prefix}{tail_a}")).unwrap();
            let b = HexDigest::parse(&format!("{prefix}{tail_b}")).unwrap();
            for k in 0..3 {
                prop_assert_eq!(hex_pair_value(&a, k), hex_pair_value(&b, k));
            }
        }

        #[test]
        fn counter_load_gap_is_bounded(
            n in 1u64..20_000,
            bucket_size in 1u64..500,
            servers in 1u32..30,
        ) {
            let cfg = MappingConfig::new(bucket_size, servers).unwrap();
            let loads = server_loads(n, &cfg);
            let gap = loads.iter().max().unwrap() - loads.iter().min().unwrap();
            prop_assert!(gap <= bucket_size);
            prop_assert_eq!(loads.iter().sum::<u64>(), n);
        }
    }

    #[test]
    fn counter_gap_boundary_reaches_bucket_size_minus_one() {
        // N = (P*K + 1)*S - 1: one bucket past a full round, one ID short.
        let cfg = MappingConfig::new(100, 7).unwrap();
        for k in 1..4u64 {
            let n = (7 * k + 1) * 100 - 1;
            let loads = server_loads(n, &cfg);
            assert_eq!(
                loads.iter().max().unwrap() - loads.iter().min().unwrap(),
                99
            );
        }
    }
}

//! Username-keyed shard placement.
//!
//! Four ways of spreading a growing member base over a fixed set of
//! resources, plus the tooling to judge them:
//!
//! * [`strategy`]: letter expansion, ASCII-sum modulo, counter mapping and
//!   multi-level MD5 placement.
//! * [`stats`]: joint-bucket histograms and deviation about the ideal mean.
//! * [`corpus`]: corpus files and seeded synthetic name generators.
//! * [`layout`]: injective storage paths and directory fan-out checks.
//!
//! ```
//! use shardbench::{md5_path, normalize_username, Md5Config};
//!
//! let name = normalize_username("Frank").unwrap();
//! let path = md5_path(&name, &Md5Config::default(), "/nas");
//! assert_eq!(path.to_string(), "/nas/18/40/72/frank");
//! ```

pub mod corpus;
pub mod digest;
pub mod layout;
pub mod placement;
pub mod stats;
pub mod strategy;
pub mod username;

pub use corpus::{
    generate_corpus, load_corpus, CorpusError, CorpusReader, CorpusSpec, NameModel, Rejection,
};
pub use digest::HexDigest;
pub use layout::{
    fanout_report, letter_path, md5_path, FanoutReport, StoragePath, DEFAULT_FANOUT_LIMIT,
};
pub use placement::{Level, Placement};
pub use stats::{
    build_histogram, build_histogram_par, compute_stats, merge_histograms, DistributionStats,
    Histogram, StatsError,
};
pub use strategy::{
    ascii_sum, ascii_sum_placement, counter_placement, hex_pair_value, letter_placement,
    md5_digest, md5_placement, AsciiSumConfig, ConfigError, CounterSlot, LetterConfig,
    MappingConfig, Md5Config, Md5Input, Strategy,
};
pub use username::{char_index, normalize_username, CharIndex, Username, UsernameError};

//! Username corpora: newline-delimited files and seeded synthetic generators.
//!
//! Synthetic corpora use `ChaCha8Rng` seeded from the 64-bit seed via
//! `SeedableRng::seed_from_u64`, so a given seed yields the same stream on
//! every platform.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::username::{
    normalize_username, Username, UsernameError, ALPHABET_SIZE, MAX_USERNAME_LEN,
};

const FIRST_LETTER_TABLE: &str = include_str!("../data/first_letters.tsv");

const ALPHABET: &[u8; 37] = b"0123456789abcdefghijklmnopqrstuvwxyz_";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("invalid corpus spec: {0}")]
    InvalidSpec(String),
    #[error("cannot draw {requested} distinct names of length {min_len}..={max_len}; only {capacity} exist")]
    SpaceExhausted {
        requested: u64,
        capacity: u64,
        min_len: usize,
        max_len: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    Invalid(UsernameError),
    NotUtf8,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::Invalid(e) => e.fmt(f),
            RejectReason::NotUtf8 => f.write_str("not valid UTF-8"),
        }
    }
}

/// A corpus line that did not normalize to a username.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    /// 1-based.
    pub line: usize,
    pub reason: RejectReason,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.reason)
    }
}

/// Streams normalized usernames from newline-delimited input.
///
/// Blank lines are ignored. Lines that fail normalization are recorded in
/// [`rejections`](Self::rejections) and skipped. A read error ends the
/// stream and is kept in [`error`](Self::error).
pub struct CorpusReader<R> {
    input: R,
    line_no: usize,
    buf: Vec<u8>,
    rejections: Vec<Rejection>,
    error: Option<io::Error>,
}

impl<R: BufRead> CorpusReader<R> {
    pub fn new(input: R) -> Self {
        CorpusReader {
            input,
            line_no: 0,
            buf: Vec::new(),
            rejections: Vec::new(),
            error: None,
        }
    }

    pub fn rejections(&self) -> &[Rejection] {
        &self.rejections
    }

    pub fn error(&self) -> Option<&io::Error> {
        self.error.as_ref()
    }

    pub fn take_error(&mut self) -> Option<io::Error> {
        self.error.take()
    }
}

impl<R: BufRead> Iterator for CorpusReader<R> {
    type Item = Username;

    fn next(&mut self) -> Option<Username> {
        loop {
            if self.error.is_some() {
                return None;
            }
            self.buf.clear();
            match self.input.read_until(b'\n', &mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
                Err(e) => {
                    self.error = Some(e);
                    return None;
                }
            }
            self.line_no += 1;

            let Ok(line) = std::str::from_utf8(&self.buf) else {
                self.rejections.push(Rejection {
                    line: self.line_no,
                    reason: RejectReason::NotUtf8,
                });
                continue;
            };
            match normalize_username(line) {
                Ok(name) => return Some(name),
                Err(UsernameError::EmptyName) => continue,
                Err(e) => self.rejections.push(Rejection {
                    line: self.line_no,
                    reason: RejectReason::Invalid(e),
                }),
            }
        }
    }
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<CorpusReader<BufReader<File>>, CorpusError> {
    let path = path.as_ref();
    match File::open(path) {
        Ok(file) => Ok(CorpusReader::new(BufReader::new(file))),
        Err(e) if e.kind() == io::ErrorKind::NotFound => {
            Err(CorpusError::FileNotFound(path.to_path_buf()))
        }
        Err(source) => Err(CorpusError::Io {
            path: path.to_path_buf(),
            source,
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NameModel {
    /// Every character i.i.d. over the 37-symbol alphabet.
    Uniform,
    /// Skewed first letter, vowel/consonant alternation afterwards.
    NameLike,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSpec {
    pub model: NameModel,
    pub count: u64,
    pub seed: u64,
    pub min_len: usize,
    pub max_len: usize,
}

impl CorpusSpec {
    pub fn new(model: NameModel, count: u64, seed: u64) -> Self {
        CorpusSpec {
            model,
            count,
            seed,
            min_len: 3,
            max_len: 12,
        }
    }

    pub fn with_lengths(mut self, min_len: usize, max_len: usize) -> Self {
        self.min_len = min_len;
        self.max_len = max_len;
        self
    }

    fn validate(&self) -> Result<(), CorpusError> {
        if self.count == 0 {
            return Err(CorpusError::InvalidSpec("count must be at least 1".into()));
        }
        if self.min_len == 0 {
            return Err(CorpusError::InvalidSpec(
                "min_len must be at least 1".into(),
            ));
        }
        if self.max_len > MAX_USERNAME_LEN {
            return Err(CorpusError::InvalidSpec(format!(
                "max_len must be at most {MAX_USERNAME_LEN}"
            )));
        }
        if self.min_len > self.max_len {
            return Err(CorpusError::InvalidSpec(format!(
                "min_len {} exceeds max_len {}",
                self.min_len, self.max_len
            )));
        }
        let capacity = name_capacity(self.min_len, self.max_len);
        if self.count > capacity {
            return Err(CorpusError::SpaceExhausted {
                requested: self.count,
                capacity,
                min_len: self.min_len,
                max_len: self.max_len,
            });
        }
        Ok(())
    }
}

/// Distinct names with lengths in `min_len..=max_len`, saturating at `u64::MAX`.
pub fn name_capacity(min_len: usize, max_len: usize) -> u64 {
    (min_len..=max_len).fold(0u64, |acc, len| {
        let n = u64::from(ALPHABET_SIZE)
            .checked_pow(len as u32)
            .unwrap_or(u64::MAX);
        acc.saturating_add(n)
    })
}

struct NameLikeTables {
    first: WeightedIndex<u32>,
    after_vowel: WeightedIndex<u32>,
    after_consonant: WeightedIndex<u32>,
}

fn is_vowel(b: u8) -> bool {
    matches!(b, b'a' | b'e' | b'i' | b'o' | b'u' | b'y')
}

// English letter frequency per mille, a..z.
const LETTER_FREQ: [u32; 26] = [
    82, 15, 28, 43, 127, 22, 20, 61, 70, 2, 8, 40, 24, 67, 75, 19, 1, 60, 63, 91, 28, 10, 24, 2,
    20, 1,
];

fn parse_first_letter_table(text: &str) -> [u32; 37] {
    let mut weights = [0u32; 37];
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (Some(ch), Some(weight)) = (fields.next(), fields.next()) else {
            panic!("malformed first-letter table line: {line:?}");
        };
        let idx = ALPHABET
            .iter()
            .position(|&b| ch.as_bytes() == [b])
            .unwrap_or_else(|| panic!("unknown character in first-letter table: {ch:?}"));
        weights[idx] = weight.parse().expect("weight is an integer");
    }
    weights
}

fn name_like_tables() -> &'static NameLikeTables {
    static TABLES: OnceLock<NameLikeTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let first = parse_first_letter_table(FIRST_LETTER_TABLE);

        // Following a vowel, consonants are favoured about 5:1 and vice versa.
        // Digits and '_' keep a small weight so every name stays reachable.
        let follow = |vowel_scale: u32, consonant_scale: u32| -> Vec<u32> {
            ALPHABET
                .iter()
                .map(|&b| match b {
                    b'a'..=b'z' => {
                        let f = LETTER_FREQ[usize::from(b - b'a')];
                        if is_vowel(b) {
                            f * vowel_scale
                        } else {
                            f * consonant_scale
                        }
                    }
                    _ => 10,
                })
                .collect()
        };

        NameLikeTables {
            first: WeightedIndex::new(first).expect("first-letter table has positive weights"),
            after_vowel: WeightedIndex::new(follow(1, 5)).expect("positive weights"),
            after_consonant: WeightedIndex::new(follow(5, 1)).expect("positive weights"),
        }
    })
}

/// Deterministic stream of `count` distinct synthetic usernames.
pub struct CorpusGenerator {
    spec: CorpusSpec,
    rng: ChaCha8Rng,
    seen: HashSet<Username>,
    emitted: u64,
}

pub fn generate_corpus(spec: CorpusSpec) -> Result<CorpusGenerator, CorpusError> {
    spec.validate()?;
    let rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Ok(CorpusGenerator {
        spec,
        rng,
        seen: HashSet::new(),
        emitted: 0,
    })
}

impl CorpusGenerator {
    fn draw(&mut self) -> Username {
        let len = self.rng.random_range(self.spec.min_len..=self.spec.max_len);
        let mut bytes = Vec::with_capacity(len);
        match self.spec.model {
            NameModel::Uniform => {
                for _ in 0..len {
                    bytes.push(ALPHABET[self.rng.random_range(0..ALPHABET.len())]);
                }
            }
            NameModel::NameLike => {
                let tables = name_like_tables();
                bytes.push(ALPHABET[tables.first.sample(&mut self.rng)]);
                while bytes.len() < len {
                    let prev = *bytes.last().expect("first character pushed");
                    let table = if is_vowel(prev) {
                        &tables.after_vowel
                    } else {
                        &tables.after_consonant
                    };
                    bytes.push(ALPHABET[table.sample(&mut self.rng)]);
                }
            }
        }
        let text = String::from_utf8(bytes).expect("alphabet is ASCII");
        normalize_username(&text).expect("generated from the alphabet")
    }
}

impl Iterator for CorpusGenerator {
    type Item = Username;

    fn next(&mut self) -> Option<Username> {
        if self.emitted == self.spec.count {
            return None;
        }
        loop {
            let name = self.draw();
            if self.seen.insert(name.clone()) {
                self.emitted += 1;
                return Some(name);
            }
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.spec.count - self.emitted) as usize;
        (left, Some(left))
    }
}

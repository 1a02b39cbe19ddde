//! Username alphabet, validation and normalization.
//!
//! Usernames are drawn from a 37-symbol alphabet: the digits `0-9`, the
//! lowercase letters `a-z` and the underscore. Input is case-insensitive, so
//! ASCII uppercase folds to lowercase during normalization. Every other
//! character is rejected rather than stripped; stripping would let two
//! different raw names collapse onto the same storage location.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Number of distinct symbols a username may contain.
pub const ALPHABET_SIZE: u32 = 37;

/// Longest accepted username, in characters.
pub const MAX_USERNAME_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UsernameError {
    #[error("username is empty")]
    EmptyName,
    #[error("invalid character {ch:?} at position {position}")]
    InvalidCharacter { ch: char, position: usize },
    #[error("username is {len} characters long, the limit is {MAX_USERNAME_LEN}")]
    TooLong { len: usize },
}

/// Position of a character in the ordering `0-9`, `a-z`, `_`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CharIndex(u8);

impl CharIndex {
    pub fn get(self) -> u32 {
        u32::from(self.0)
    }
}

/// Maps an alphabet character onto its index in `0..37`.
///
/// Only the canonical lowercase form is accepted; callers holding raw input
/// should go through [`normalize_username`] first.
pub fn char_index(c: char) -> Result<CharIndex, UsernameError> {
    let idx = match c {
        '0'..='9' => c as u8 - b'0',
        'a'..='z' => c as u8 - b'a' + 10,
        '_' => 36,
        _ => return Err(UsernameError::InvalidCharacter { ch: c, position: 0 }),
    };
    Ok(CharIndex(idx))
}

/// Inverse of [`char_index`]. Used by tests to check the mapping is a bijection.
#[doc(hidden)]
pub fn index_to_char(index: CharIndex) -> char {
    match index.0 {
        0..=9 => (b'0' + index.0) as char,
        10..=35 => (b'a' + index.0 - 10) as char,
        36 => '_',
        _ => unreachable!("CharIndex is always below 37"),
    }
}

pub(crate) fn is_alphabet_byte(b: u8) -> bool {
    b.is_ascii_digit() || b.is_ascii_lowercase() || b == b'_'
}

/// A validated, lowercase username.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Username(String);

impl Username {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }

    /// Length in characters. All characters are single-byte.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; present for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Alphabet index of every character, in order.
    pub fn char_indices(&self) -> impl Iterator<Item = CharIndex> + '_ {
        self.0
            .bytes()
            .map(|b| char_index(b as char).expect("username holds only alphabet characters"))
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Username {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Username {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl FromStr for Username {
    type Err = UsernameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        normalize_username(s)
    }
}

/// Trims surrounding whitespace, folds ASCII uppercase and validates the result.
///
/// Positions reported by [`UsernameError::InvalidCharacter`] are 0-based
/// character offsets into the trimmed input.
pub fn normalize_username(raw: &str) -> Result<Username, UsernameError> {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return Err(UsernameError::EmptyName);
    }

    let mut value = String::with_capacity(trimmed.len());
    for (position, ch) in trimmed.chars().enumerate() {
        let folded = ch.to_ascii_lowercase();
        if !folded.is_ascii() || !is_alphabet_byte(folded as u8) {
            return Err(UsernameError::InvalidCharacter { ch, position });
        }
        value.push(folded);
    }

    if value.len() > MAX_USERNAME_LEN {
        return Err(UsernameError::TooLong { len: value.len() });
    }
    Ok(Username(value))
}

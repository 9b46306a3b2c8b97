//! Small helpers for binary words.
//!
//! Throughout the crate a binary word of length `m` is a `Vec<u8>` whose
//! entries are `0` or `1`, with index 0 being the leftmost character of the
//! textual form. When a word is read as an integer (for lexicographic
//! enumeration and the decrement/increment loops of the sparse engine),
//! index 0 is the most significant bit, so lexicographic order on words of
//! equal length coincides with numeric order.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("invalid character {0:?} in binary word (expected '0' or '1')")]
    BadChar(char),
    #[error("word length {got} does not match expected length {want}")]
    BadLength { got: usize, want: usize },
    #[error("word length {0} exceeds the {1}-bit limit for packed words")]
    TooLong(usize, u32),
}

/// Parses a textual binary word such as `"0101"`.
pub fn parse_word(s: &str) -> Result<Vec<u8>, WordError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(WordError::BadChar(other)),
        })
        .collect()
}

/// Renders a binary word as text, e.g. `[0,1,0,1]` -> `"0101"`.
pub fn format_word(w: &[u8]) -> String {
    w.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

/// Packs a word into an integer, index 0 most significant. Limited to 128 bits.
pub fn word_to_u128(w: &[u8]) -> Result<u128, WordError> {
    if w.len() > 128 {
        return Err(WordError::TooLong(w.len(), 128));
    }
    let mut v = 0u128;
    for &b in w {
        v = (v << 1) | u128::from(b);
    }
    Ok(v)
}

/// Inverse of [`word_to_u128`] for a fixed length.
pub fn u128_to_word(v: u128, len: usize) -> Vec<u8> {
    (0..len)
        .map(|i| ((v >> (len - 1 - i)) & 1) as u8)
        .collect()
}

/// Number of ones in the word.
pub fn weight(w: &[u8]) -> usize {
    w.iter().filter(|&&b| b == 1).count()
}

/// Hamming distance between equal-length words.
pub fn distance(a: &[u8], b: &[u8]) -> usize {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// XOR of two equal-length words.
pub fn xor(a: &[u8], b: &[u8]) -> Vec<u8> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

/// Treats the word as an integer and subtracts 1 in place.
/// Returns false (leaving the word unchanged) if it is already all zeros.
pub fn decrement(w: &mut [u8]) -> bool {
    for i in (0..w.len()).rev() {
        if w[i] == 1 {
            w[i] = 0;
            for cell in w[i + 1..].iter_mut() {
                *cell = 1;
            }
            return true;
        }
    }
    false
}

/// Treats the word as an integer and adds 1 in place.
/// Returns false (leaving the word unchanged) on overflow past all ones.
pub fn increment(w: &mut [u8]) -> bool {
    for i in (0..w.len()).rev() {
        if w[i] == 0 {
            w[i] = 1;
            for cell in w[i + 1..].iter_mut() {
                *cell = 0;
            }
            return true;
        }
    }
    false
}

/// Iterator over all binary words of length `m` in lexicographic order.
pub fn all_words(m: usize) -> impl Iterator<Item = Vec<u8>> {
    assert!(m <= 30, "exhaustive word enumeration capped at 30 bits");
    (0u64..(1u64 << m)).map(move |v| u128_to_word(v as u128, m))
}

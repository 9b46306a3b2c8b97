//! Catalytic sets: predicates over the initial catalytic-tape content that
//! tell a machine which tapes it must restore.
//!
//! A machine paired with a set `A ⊆ {0,1}^c` promises: for every starting
//! tape `w ∈ A`, the tape is returned to `w` on halting; the *decision* must
//! be correct for every `w`, member or not. The set language below covers the
//! families the engines and the verification harness work with, each with
//! exact membership, exact counting, and lexicographic enumeration.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use thiserror::Error;

use crate::bits::{all_words, format_word, parse_word, WordError};
use crate::codes::{ball_volume, DecodeOutcome, LinearCode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetError {
    #[error("word length {got} does not match set length {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("cannot enumerate a set over {0} bits (limit 24)")]
    TooLargeToEnumerate(usize),
    #[error("ball radius {radius} exceeds the code's unique-decoding radius {max}")]
    RadiusTooLarge { radius: usize, max: usize },
    #[error("set over 0 bits is not supported")]
    ZeroLength,
    #[error("word list must be strictly increasing (violation at entry {at})")]
    NotSorted { at: usize },
    #[error("ball radius {radius} exceeds the word length {len}")]
    RadiusExceedsLength { radius: usize, len: usize },
    #[error(transparent)]
    Word(#[from] WordError),
}

/// A set of candidate catalytic tapes over `{0,1}^len`.
#[derive(Debug, Clone)]
pub enum CatalyticSet {
    /// Every tape: the fully catalytic regime.
    All { len: usize },
    /// No tape needs restoring.
    Empty { len: usize },
    /// Tapes whose number of ones has the given parity.
    Parity { len: usize, odd: bool },
    /// The single all-ones tape.
    AllOnes { len: usize },
    /// Tapes whose first `prefix_len` cells are all zero.
    PrefixZero { len: usize, prefix_len: usize },
    /// An explicit finite list of tapes.
    Explicit {
        len: usize,
        members: BTreeSet<Vec<u8>>,
    },
    /// A strictly increasing word list with positional (rank) access, the
    /// shape the counting-based sparse engine walks through.
    SortedWords { len: usize, members: Vec<Vec<u8>> },
    /// Union of Hamming balls of one radius around explicit centers. The
    /// balls may overlap; lengths are capped at 24 bits so counting by
    /// enumeration stays exact.
    CenteredBalls {
        len: usize,
        centers: Vec<Vec<u8>>,
        radius: usize,
    },
    /// Codewords of a linear code with block length `len`.
    Codewords {
        code: LinearCode,
        members: BTreeSet<Vec<u8>>,
    },
    /// Union of Hamming balls of radius `radius` around every codeword.
    /// The radius is capped at the unique-decoding radius, so the balls are
    /// disjoint and membership reduces to bounded-distance decoding.
    Ball { code: LinearCode, radius: usize },
    /// Everything outside the inner set.
    ComplementOf(Box<CatalyticSet>),
}

impl CatalyticSet {
    pub fn parity_even(len: usize) -> Self {
        CatalyticSet::Parity { len, odd: false }
    }

    pub fn parity_odd(len: usize) -> Self {
        CatalyticSet::Parity { len, odd: true }
    }

    pub fn explicit(len: usize, words: impl IntoIterator<Item = Vec<u8>>) -> Result<Self, SetError> {
        if len == 0 {
            return Err(SetError::ZeroLength);
        }
        let mut members = BTreeSet::new();
        for w in words {
            if w.len() != len {
                return Err(SetError::LengthMismatch {
                    got: w.len(),
                    want: len,
                });
            }
            members.insert(w);
        }
        Ok(CatalyticSet::Explicit { len, members })
    }

    /// Parses one word per non-empty line; `#` starts a comment.
    pub fn explicit_from_lines(len: usize, text: &str) -> Result<Self, SetError> {
        let mut words = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            words.push(parse_word(line)?);
        }
        CatalyticSet::explicit(len, words)
    }

    /// Builds the rank-accessible sorted family, validating that the input
    /// really is strictly increasing (duplicates included in the rejection).
    pub fn sorted_words(len: usize, members: Vec<Vec<u8>>) -> Result<Self, SetError> {
        if len == 0 {
            return Err(SetError::ZeroLength);
        }
        for (i, w) in members.iter().enumerate() {
            if w.len() != len {
                return Err(SetError::LengthMismatch {
                    got: w.len(),
                    want: len,
                });
            }
            if i > 0 && members[i - 1] >= *w {
                return Err(SetError::NotSorted { at: i });
            }
        }
        Ok(CatalyticSet::SortedWords { len, members })
    }

    /// Parses a sorted word list, one word per non-empty line; `#` starts a
    /// comment.
    pub fn sorted_from_lines(len: usize, text: &str) -> Result<Self, SetError> {
        let mut words = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            words.push(parse_word(line)?);
        }
        CatalyticSet::sorted_words(len, words)
    }

    pub fn centered_balls(
        len: usize,
        centers: Vec<Vec<u8>>,
        radius: usize,
    ) -> Result<Self, SetError> {
        if len == 0 {
            return Err(SetError::ZeroLength);
        }
        if len > 24 {
            return Err(SetError::TooLargeToEnumerate(len));
        }
        if radius > len {
            return Err(SetError::RadiusExceedsLength { radius, len });
        }
        for c in &centers {
            if c.len() != len {
                return Err(SetError::LengthMismatch {
                    got: c.len(),
                    want: len,
                });
            }
        }
        Ok(CatalyticSet::CenteredBalls { len, centers, radius })
    }

    pub fn codewords(code: LinearCode) -> Self {
        let members = code.all_codewords().into_iter().collect();
        CatalyticSet::Codewords { code, members }
    }

    pub fn ball(code: LinearCode, radius: usize) -> Result<Self, SetError> {
        if radius > code.radius() {
            return Err(SetError::RadiusTooLarge {
                radius,
                max: code.radius(),
            });
        }
        Ok(CatalyticSet::Ball { code, radius })
    }

    /// Tape length the set ranges over.
    pub fn len_bits(&self) -> usize {
        match self {
            CatalyticSet::All { len }
            | CatalyticSet::Empty { len }
            | CatalyticSet::Parity { len, .. }
            | CatalyticSet::AllOnes { len }
            | CatalyticSet::PrefixZero { len, .. }
            | CatalyticSet::Explicit { len, .. }
            | CatalyticSet::SortedWords { len, .. }
            | CatalyticSet::CenteredBalls { len, .. } => *len,
            CatalyticSet::Codewords { code, .. } | CatalyticSet::Ball { code, .. } => code.n(),
            CatalyticSet::ComplementOf(inner) => inner.len_bits(),
        }
    }

    /// The strictly increasing member list, when this set is the sorted
    /// family (rank access for the counting engine).
    pub fn sorted_members(&self) -> Option<&[Vec<u8>]> {
        match self {
            CatalyticSet::SortedWords { members, .. } => Some(members),
            _ => None,
        }
    }

    /// Exact membership test. Panics if the word length disagrees with the
    /// set length; use [`Self::contains_checked`] at trust boundaries.
    pub fn contains(&self, w: &[u8]) -> bool {
        debug_assert_eq!(w.len(), self.len_bits());
        match self {
            CatalyticSet::All { .. } => true,
            CatalyticSet::Empty { .. } => false,
            CatalyticSet::Parity { odd, .. } => {
                (w.iter().map(|&b| u32::from(b)).sum::<u32>() % 2 == 1) == *odd
            }
            CatalyticSet::AllOnes { .. } => w.iter().all(|&b| b == 1),
            CatalyticSet::PrefixZero { prefix_len, .. } => {
                w[..*prefix_len].iter().all(|&b| b == 0)
            }
            CatalyticSet::Explicit { members, .. } => members.contains(w),
            CatalyticSet::SortedWords { members, .. } => {
                members.binary_search_by(|m| m.as_slice().cmp(w)).is_ok()
            }
            CatalyticSet::CenteredBalls { centers, radius, .. } => centers
                .iter()
                .any(|c| crate::bits::distance(c, w) <= *radius),
            CatalyticSet::Codewords { members, .. } => members.contains(w),
            CatalyticSet::Ball { code, radius } => match code.decode(w) {
                DecodeOutcome::Decoded { errors, .. } => errors.len() <= *radius,
                DecodeOutcome::Failure => false,
            },
            CatalyticSet::ComplementOf(inner) => !inner.contains(w),
        }
    }

    pub fn contains_checked(&self, w: &[u8]) -> Result<bool, SetError> {
        if w.len() != self.len_bits() {
            return Err(SetError::LengthMismatch {
                got: w.len(),
                want: self.len_bits(),
            });
        }
        Ok(self.contains(w))
    }

    /// Exact number of members.
    pub fn count(&self) -> BigUint {
        let two = BigUint::from(2u32);
        match self {
            CatalyticSet::All { len } => two.pow(*len as u32),
            CatalyticSet::Empty { .. } => BigUint::from(0u32),
            CatalyticSet::Parity { len, .. } => two.pow(*len as u32 - 1),
            CatalyticSet::AllOnes { .. } => BigUint::from(1u32),
            CatalyticSet::PrefixZero { len, prefix_len } => {
                two.pow((len - prefix_len) as u32)
            }
            CatalyticSet::Explicit { members, .. } => BigUint::from(members.len()),
            CatalyticSet::SortedWords { members, .. } => BigUint::from(members.len()),
            CatalyticSet::CenteredBalls { .. } => {
                // Overlaps rule out a closed form; lengths are capped at 24,
                // so enumeration is exact and affordable.
                BigUint::from(self.enumerate().expect("length capped in constructor").len())
            }
            CatalyticSet::Codewords { code, .. } => two.pow(code.k() as u32),
            CatalyticSet::Ball { code, radius } => {
                // Balls at the unique-decoding radius are pairwise disjoint.
                two.pow(code.k() as u32) * ball_volume(code.n(), *radius)
            }
            CatalyticSet::ComplementOf(inner) => {
                two.pow(inner.len_bits() as u32) - inner.count()
            }
        }
    }

    /// Exact density as (member count, 2^len).
    pub fn density(&self) -> (BigUint, BigUint) {
        (
            self.count(),
            BigUint::from(2u32).pow(self.len_bits() as u32),
        )
    }

    /// Density as a float, for reports.
    pub fn density_f64(&self) -> f64 {
        let (num, den) = self.density();
        // Lengths are capped well below where this loses the leading bits.
        num.to_string().parse::<f64>().unwrap() / den.to_string().parse::<f64>().unwrap()
    }

    /// All members in lexicographic order. Explicit families are listed
    /// directly; the rest are filtered out of `{0,1}^len`, so enumeration is
    /// capped at 24 bits.
    pub fn enumerate(&self) -> Result<Vec<Vec<u8>>, SetError> {
        match self {
            CatalyticSet::Explicit { members, .. } | CatalyticSet::Codewords { members, .. } => {
                Ok(members.iter().cloned().collect())
            }
            CatalyticSet::SortedWords { members, .. } => Ok(members.clone()),
            CatalyticSet::Ball { code, radius } => {
                let mut out: Vec<Vec<u8>> = Vec::new();
                for cw in code.all_codewords() {
                    out.push(cw.clone());
                    for positions in error_patterns(code.n(), *radius) {
                        if positions.is_empty() {
                            continue;
                        }
                        out.push(crate::codes::flip_positions(&cw, &positions));
                    }
                }
                out.sort();
                out.dedup();
                Ok(out)
            }
            _ => {
                let len = self.len_bits();
                if len > 24 {
                    return Err(SetError::TooLargeToEnumerate(len));
                }
                Ok(all_words(len).filter(|w| self.contains(w)).collect())
            }
        }
    }

    /// One-line description for reports and machine metadata.
    pub fn describe(&self) -> String {
        match self {
            CatalyticSet::All { len } => format!("all tapes of length {len}"),
            CatalyticSet::Empty { len } => format!("no tapes (length {len})"),
            CatalyticSet::Parity { len, odd } => format!(
                "length-{len} tapes with an {} number of ones",
                if *odd { "odd" } else { "even" }
            ),
            CatalyticSet::AllOnes { len } => format!("the all-ones tape of length {len}"),
            CatalyticSet::PrefixZero { len, prefix_len } => {
                format!("length-{len} tapes whose first {prefix_len} cells are zero")
            }
            CatalyticSet::Explicit { len, members } => {
                format!("{} explicitly listed tapes of length {len}", members.len())
            }
            CatalyticSet::SortedWords { len, members } => {
                format!("{} sorted tapes of length {len}", members.len())
            }
            CatalyticSet::CenteredBalls { len, centers, radius } => format!(
                "radius-{radius} balls around {} centers (length {len})",
                centers.len()
            ),
            CatalyticSet::Codewords { code, .. } => format!("codewords of {}", code.name()),
            CatalyticSet::Ball { code, radius } => format!(
                "radius-{radius} balls around the codewords of {}",
                code.name()
            ),
            CatalyticSet::ComplementOf(inner) => format!("complement of: {}", inner.describe()),
        }
    }
}

/// All subsets of `{0..n}` of size at most `radius`, as sorted index lists
/// (including the empty pattern).
pub fn error_patterns(n: usize, radius: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut current: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for pattern in &current {
            let start = pattern.last().map_or(0, |&p| p + 1);
            for j in start..n {
                let mut grown = pattern.clone();
                grown.push(j);
                next.push(grown);
            }
        }
        out.extend(next.iter().cloned());
        current = next;
    }
    out
}

/// Convenience: the lexicographically sorted members formatted as strings,
/// for golden assertions in tests.
pub fn member_strings(set: &CatalyticSet) -> Result<Vec<String>, SetError> {
    Ok(set.enumerate()?.iter().map(|w| format_word(w)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::CodeSpec;

    #[test]
    fn counts_match_enumeration_for_every_family() {
        let code = CodeSpec::Hamming.build().unwrap();
        let sets = vec![
            CatalyticSet::All { len: 6 },
            CatalyticSet::Empty { len: 6 },
            CatalyticSet::parity_even(6),
            CatalyticSet::parity_odd(6),
            CatalyticSet::AllOnes { len: 6 },
            CatalyticSet::PrefixZero { len: 6, prefix_len: 2 },
            CatalyticSet::explicit(6, vec![vec![0, 1, 0, 1, 0, 1], vec![1, 0, 1, 0, 1, 0]])
                .unwrap(),
            CatalyticSet::sorted_words(
                6,
                vec![vec![0, 0, 1, 1, 0, 0], vec![0, 1, 0, 1, 0, 0], vec![1, 0, 0, 0, 0, 0]],
            )
            .unwrap(),
            CatalyticSet::centered_balls(
                6,
                vec![vec![0, 0, 0, 0, 0, 0], vec![0, 0, 0, 1, 1, 0]],
                1,
            )
            .unwrap(),
            CatalyticSet::codewords(code.clone()),
            CatalyticSet::ball(code.clone(), 1).unwrap(),
            CatalyticSet::ComplementOf(Box::new(CatalyticSet::parity_even(6))),
        ];
        for set in sets {
            let members = set.enumerate().unwrap();
            assert_eq!(
                BigUint::from(members.len()),
                set.count(),
                "count mismatch for {}",
                set.describe()
            );
            for w in &members {
                assert!(set.contains(w), "enumerated non-member in {}", set.describe());
            }
            let mut sorted = members.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted, members, "enumeration not sorted for {}", set.describe());
        }
    }

    #[test]
    fn parity_splits_the_cube_in_half() {
        let even = CatalyticSet::parity_even(5);
        let odd = CatalyticSet::parity_odd(5);
        for w in all_words(5) {
            assert_ne!(even.contains(&w), odd.contains(&w));
        }
        assert_eq!(even.count(), BigUint::from(16u32));
    }

    #[test]
    fn ball_membership_matches_distance_to_nearest_codeword() {
        let code = CodeSpec::Hamming.build().unwrap();
        let codewords = code.all_codewords();
        let ball = CatalyticSet::ball(code, 1).unwrap();
        for w in all_words(7) {
            let nearest = codewords
                .iter()
                .map(|cw| crate::bits::distance(cw, &w))
                .min()
                .unwrap();
            assert_eq!(ball.contains(&w), nearest <= 1);
        }
        // The [7,4] code is perfect, so radius-1 balls tile the whole cube.
        assert_eq!(ball.count(), BigUint::from(128u32));
    }

    #[test]
    fn ball_radius_is_capped_at_the_decoding_radius() {
        let code = CodeSpec::Hamming.build().unwrap();
        assert!(matches!(
            CatalyticSet::ball(code, 2),
            Err(SetError::RadiusTooLarge { radius: 2, max: 1 })
        ));
    }

    #[test]
    fn explicit_sets_parse_from_lines_and_reject_bad_lengths() {
        let set = CatalyticSet::explicit_from_lines(4, "0101\n# comment\n1100  # trailing\n\n")
            .unwrap();
        assert!(set.contains(&[0, 1, 0, 1]));
        assert!(set.contains(&[1, 1, 0, 0]));
        assert_eq!(set.count(), BigUint::from(2u32));
        assert!(matches!(
            CatalyticSet::explicit_from_lines(4, "010"),
            Err(SetError::LengthMismatch { got: 3, want: 4 })
        ));
    }

    #[test]
    fn error_patterns_count_ball_volume() {
        // 1 + C(5,1) + C(5,2) = 16 patterns of weight <= 2 over 5 positions.
        assert_eq!(error_patterns(5, 2).len(), 16);
        assert_eq!(error_patterns(5, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn sorted_words_validate_strict_order() {
        assert!(matches!(
            CatalyticSet::sorted_words(3, vec![vec![0, 1, 0], vec![0, 0, 1]]),
            Err(SetError::NotSorted { at: 1 })
        ));
        assert!(matches!(
            CatalyticSet::sorted_words(3, vec![vec![0, 1, 0], vec![0, 1, 0]]),
            Err(SetError::NotSorted { at: 1 })
        ));
        let set = CatalyticSet::sorted_from_lines(4, "0011\n0101\n1000\n").unwrap();
        assert!(set.contains(&[0, 1, 0, 1]));
        assert!(!set.contains(&[0, 1, 1, 1]));
        assert_eq!(set.sorted_members().unwrap().len(), 3);
    }

    #[test]
    fn centered_balls_count_overlaps_once() {
        // Two centers at distance 2: the radius-1 balls share the two
        // midpoints, so the union has 5 + 5 - 2 members.
        let set =
            CatalyticSet::centered_balls(4, vec![vec![0, 0, 0, 0], vec![1, 1, 0, 0]], 1).unwrap();
        assert!(set.contains(&[1, 0, 0, 0]));
        assert!(!set.contains(&[1, 1, 1, 1]));
        assert_eq!(set.count(), BigUint::from(8u32));
    }

    #[test]
    fn complement_partitions_the_cube() {
        let inner = CatalyticSet::PrefixZero { len: 5, prefix_len: 2 };
        let comp = CatalyticSet::ComplementOf(Box::new(inner.clone()));
        assert_eq!(
            inner.count() + comp.count(),
            BigUint::from(32u32)
        );
        for w in all_words(5) {
            assert_ne!(inner.contains(&w), comp.contains(&w));
        }
    }
}

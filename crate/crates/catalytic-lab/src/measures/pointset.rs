//! Dense subsets of `{0,1}^m` and subcubes, the raw material of the
//! combinatorial measures.
//!
//! Points are stored as indices with coordinate `j` in bit `j` (least
//! significant bit first), which makes coordinate extraction, subcube
//! membership, and the fast Walsh–Hadamard transform index arithmetic
//! uniform. Conversions to the word representation used elsewhere in the
//! crate (`Vec<u8>`, leftmost character first) go through
//! [`BitVectorSet::index_of_word`] and [`BitVectorSet::word_of_index`].

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeasureError {
    #[error("dimension {m} too large for {what} (limit {limit})")]
    TooLarge {
        m: usize,
        what: &'static str,
        limit: usize,
    },
    #[error("word length {got} does not match dimension {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("bad mask payload: {0}")]
    BadMask(String),
}

/// Hard cap on the dimension of dense point sets (the mask has `2^m` bits).
pub const MAX_DIMENSION: usize = 24;

/// A subset of `{0,1}^m` backed by a `2^m`-bit membership mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitVectorSet {
    m: usize,
    mask: Vec<u64>,
}

impl BitVectorSet {
    pub fn empty(m: usize) -> Self {
        assert!(m <= MAX_DIMENSION, "dimension above {MAX_DIMENSION}");
        let words = (1usize << m).div_ceil(64).max(1);
        BitVectorSet {
            m,
            mask: vec![0; words],
        }
    }

    pub fn full(m: usize) -> Self {
        let mut set = BitVectorSet::empty(m);
        for idx in 0..1usize << m {
            set.insert(idx);
        }
        set
    }

    pub fn from_indices(m: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = BitVectorSet::empty(m);
        for idx in indices {
            set.insert(idx);
        }
        set
    }

    pub fn from_words<'a>(
        m: usize,
        words: impl IntoIterator<Item = &'a Vec<u8>>,
    ) -> Result<Self, MeasureError> {
        let mut set = BitVectorSet::empty(m);
        for w in words {
            set.insert(Self::index_of_word_checked(m, w)?);
        }
        Ok(set)
    }

    pub fn from_fn(m: usize, f: impl Fn(usize) -> bool) -> Self {
        let mut set = BitVectorSet::empty(m);
        for idx in 0..1usize << m {
            if f(idx) {
                set.insert(idx);
            }
        }
        set
    }

    /// Bridges a catalytic-set descriptor into a dense mask.
    pub fn from_catalytic(set: &crate::setlang::CatalyticSet) -> Result<Self, MeasureError> {
        let m = set.len_bits();
        if m > MAX_DIMENSION {
            return Err(MeasureError::TooLarge {
                m,
                what: "dense membership mask",
                limit: MAX_DIMENSION,
            });
        }
        let words = set.enumerate().map_err(|e| MeasureError::BadMask(e.to_string()))?;
        Self::from_words(m, words.iter())
    }

    /// Parses a hex-encoded membership mask: `2^m` bits, 4 bits per hex
    /// digit, point index 0 in the most significant bit of the first digit.
    pub fn from_hex(m: usize, hex: &str) -> Result<Self, MeasureError> {
        let digits: Vec<u32> = hex
            .trim()
            .chars()
            .map(|c| {
                c.to_digit(16)
                    .ok_or_else(|| MeasureError::BadMask(format!("bad hex digit {c:?}")))
            })
            .collect::<Result<_, _>>()?;
        let need = (1usize << m).div_ceil(4);
        if digits.len() != need {
            return Err(MeasureError::BadMask(format!(
                "expected {need} hex digits for 2^{m} bits, got {}",
                digits.len()
            )));
        }
        let mut set = BitVectorSet::empty(m);
        for idx in 0..1usize << m {
            if (digits[idx / 4] >> (3 - idx % 4)) & 1 == 1 {
                set.insert(idx);
            }
        }
        Ok(set)
    }

    pub fn to_hex(&self) -> String {
        let total = 1usize << self.m;
        (0..total.div_ceil(4))
            .map(|d| {
                let mut v = 0u32;
                for o in 0..4 {
                    let idx = d * 4 + o;
                    if idx < total && self.contains(idx) {
                        v |= 1 << (3 - o);
                    }
                }
                char::from_digit(v, 16).unwrap()
            })
            .collect()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn insert(&mut self, idx: usize) {
        debug_assert!(idx < 1 << self.m);
        self.mask[idx / 64] |= 1 << (idx % 64);
    }

    pub fn remove(&mut self, idx: usize) {
        self.mask[idx / 64] &= !(1 << (idx % 64));
    }

    pub fn contains(&self, idx: usize) -> bool {
        debug_assert!(idx < 1 << self.m);
        (self.mask[idx / 64] >> (idx % 64)) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.mask.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.iter().all(|&w| w == 0)
    }

    /// Member indices in ascending order.
    pub fn points(&self) -> Vec<usize> {
        (0..1usize << self.m).filter(|&i| self.contains(i)).collect()
    }

    pub fn first_point(&self) -> Option<usize> {
        for (wi, &w) in self.mask.iter().enumerate() {
            if w != 0 {
                return Some(wi * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn is_subset_of(&self, other: &BitVectorSet) -> bool {
        self.mask
            .iter()
            .zip(&other.mask)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn union(&self, other: &BitVectorSet) -> BitVectorSet {
        assert_eq!(self.m, other.m);
        BitVectorSet {
            m: self.m,
            mask: self
                .mask
                .iter()
                .zip(&other.mask)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    /// Removes all points of `cube` from the set.
    pub fn remove_subcube(&mut self, cube: &Subcube) {
        for idx in cube.points() {
            self.remove(idx);
        }
    }

    /// The set `{x ⊕ z : x ∈ A}`.
    pub fn xor_shift(&self, z: &[u8]) -> Result<BitVectorSet, MeasureError> {
        let zi = Self::index_of_word_checked(self.m, z)?;
        let mut out = BitVectorSet::empty(self.m);
        for idx in self.points() {
            out.insert(idx ^ zi);
        }
        Ok(out)
    }

    /// Index of a word: coordinate `j` (character `j`, leftmost first) goes
    /// to bit `j` of the index.
    pub fn index_of_word(w: &[u8]) -> usize {
        w.iter()
            .enumerate()
            .fold(0, |acc, (j, &b)| acc | ((b as usize) << j))
    }

    fn index_of_word_checked(m: usize, w: &[u8]) -> Result<usize, MeasureError> {
        if w.len() != m {
            return Err(MeasureError::LengthMismatch { got: w.len(), want: m });
        }
        Ok(Self::index_of_word(w))
    }

    pub fn word_of_index(m: usize, idx: usize) -> Vec<u8> {
        (0..m).map(|j| ((idx >> j) & 1) as u8).collect()
    }
}

/// Hamming ball of the given radius around a center point index.
pub fn ball(m: usize, center: usize, radius: usize) -> BitVectorSet {
    BitVectorSet::from_fn(m, |idx| (idx ^ center).count_ones() as usize <= radius)
}

/// Union of Hamming balls of one radius around several centers (given as
/// words).
pub fn ball_union(
    m: usize,
    centers: &[Vec<u8>],
    radius: usize,
) -> Result<BitVectorSet, MeasureError> {
    let mut out = BitVectorSet::empty(m);
    for c in centers {
        if c.len() != m {
            return Err(MeasureError::LengthMismatch { got: c.len(), want: m });
        }
        out = out.union(&ball(m, BitVectorSet::index_of_word(c), radius));
    }
    Ok(out)
}

/// Points whose number of ones has the given parity.
pub fn parity_set(m: usize, odd: bool) -> BitVectorSet {
    BitVectorSet::from_fn(m, |idx| (idx.count_ones() % 2 == 1) == odd)
}

/// A subcube of `{0,1}^m`: coordinates in `free` range over both values,
/// the rest are pinned to the bits of `fixed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Subcube {
    m: usize,
    free: u32,
    fixed: u32,
}

impl Subcube {
    pub fn new(m: usize, free: u32, fixed: u32) -> Self {
        debug_assert_eq!(fixed & free, 0, "fixed bits must avoid free coordinates");
        debug_assert!(m <= MAX_DIMENSION);
        debug_assert_eq!(u64::from(free | fixed) >> m, 0);
        Subcube { m, free, fixed }
    }

    /// The 0-dimensional cube holding a single point.
    pub fn point(m: usize, idx: usize) -> Self {
        Subcube::new(m, 0, idx as u32)
    }

    /// The whole cube `{0,1}^m`.
    pub fn whole(m: usize) -> Self {
        Subcube::new(m, ((1u64 << m) - 1) as u32, 0)
    }

    /// Smallest subcube containing both points.
    pub fn enclosing(m: usize, p: usize, q: usize) -> Self {
        let free = (p ^ q) as u32;
        Subcube::new(m, free, p as u32 & !free)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn free_mask(&self) -> u32 {
        self.free
    }

    pub fn fixed_bits(&self) -> u32 {
        self.fixed
    }

    pub fn dim(&self) -> usize {
        self.free.count_ones() as usize
    }

    pub fn size(&self) -> usize {
        1 << self.dim()
    }

    pub fn contains(&self, idx: usize) -> bool {
        (idx as u32) & !self.free == self.fixed
    }

    /// All point indices of the cube, ascending.
    pub fn points(&self) -> Vec<usize> {
        // Standard submask walk over the free coordinates.
        let mut out = Vec::with_capacity(self.size());
        let mut sub: u32 = 0;
        loop {
            out.push((self.fixed | sub) as usize);
            if sub == self.free {
                break;
            }
            sub = (sub.wrapping_sub(self.free)) & self.free;
        }
        out.sort_unstable();
        out
    }

    pub fn is_subset_of_set(&self, set: &BitVectorSet) -> bool {
        self.points().iter().all(|&p| set.contains(p))
    }

    /// Fix one free coordinate to a value, halving the cube.
    pub fn split(&self, coord: usize, value: u8) -> Subcube {
        debug_assert!(self.free >> coord & 1 == 1);
        Subcube::new(
            self.m,
            self.free & !(1 << coord),
            self.fixed | (u32::from(value) << coord),
        )
    }

    /// Pattern string with `*` on free coordinates, e.g. `01*1*`
    /// (coordinate 0 leftmost, matching word display order).
    pub fn pattern(&self) -> String {
        (0..self.m)
            .map(|j| {
                if self.free >> j & 1 == 1 {
                    '*'
                } else if self.fixed >> j & 1 == 1 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect()
    }

    /// Translate by XOR with a point index.
    pub fn xor_shift(&self, z: usize) -> Subcube {
        Subcube::new(self.m, self.free, self.fixed ^ (z as u32 & !self.free))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_word_round_trip_is_lsb_first() {
        // Word "0010" has coordinate 2 set, so the index is 2^2 = 4.
        assert_eq!(BitVectorSet::index_of_word(&[0, 0, 1, 0]), 4);
        assert_eq!(BitVectorSet::word_of_index(4, 4), vec![0, 0, 1, 0]);
        for idx in 0..16 {
            let w = BitVectorSet::word_of_index(4, idx);
            assert_eq!(BitVectorSet::index_of_word(&w), idx);
        }
    }

    #[test]
    fn set_construction_and_counting() {
        let set = parity_set(4, true);
        assert_eq!(set.len(), 8);
        assert!(set.contains(BitVectorSet::index_of_word(&[0, 1, 1, 1])));
        assert!(!set.contains(0));
        assert_eq!(BitVectorSet::full(3).len(), 8);
        assert!(BitVectorSet::empty(3).is_empty());
    }

    #[test]
    fn hex_mask_round_trip() {
        let set = parity_set(4, false);
        let hex = set.to_hex();
        assert_eq!(hex.len(), 4);
        assert_eq!(BitVectorSet::from_hex(4, &hex).unwrap(), set);
        assert!(BitVectorSet::from_hex(4, "zz").is_err());
        assert!(BitVectorSet::from_hex(4, "123").is_err());
    }

    #[test]
    fn subcube_points_and_membership() {
        // Pattern 0*1* over m=4: coordinates 1 and 3 free, coord 0 = 0, coord 2 = 1.
        let cube = Subcube::new(4, 0b1010, 0b0100);
        assert_eq!(cube.pattern(), "0*1*");
        assert_eq!(cube.dim(), 2);
        let pts = cube.points();
        assert_eq!(pts.len(), 4);
        for &p in &pts {
            assert!(cube.contains(p));
            assert_eq!(p & 1, 0);
            assert_eq!(p >> 2 & 1, 1);
        }
        assert!(!cube.contains(0));
    }

    #[test]
    fn enclosing_cube_is_minimal() {
        let p = 0b0011;
        let q = 0b0110;
        let cube = Subcube::enclosing(4, p, q);
        assert!(cube.contains(p) && cube.contains(q));
        assert_eq!(cube.dim(), 2);
        // Coordinates 0 and 2 differ (free); coordinate 1 is pinned to 1.
        assert_eq!(cube.pattern(), "*1*0");
    }

    #[test]
    fn split_halves_a_cube() {
        let cube = Subcube::whole(3);
        let half = cube.split(1, 1);
        assert_eq!(half.size(), 4);
        assert!(half.points().iter().all(|&p| p >> 1 & 1 == 1));
    }

    #[test]
    fn ball_and_union_counts() {
        let b = ball(4, 0, 1);
        assert_eq!(b.len(), 5);
        let u = ball_union(4, &[vec![0, 0, 0, 0], vec![1, 1, 1, 1]], 1).unwrap();
        assert_eq!(u.len(), 10);
    }

    #[test]
    fn xor_shift_is_a_bijection_on_sets() {
        let set = parity_set(4, true);
        let shifted = set.xor_shift(&[1, 0, 1, 0]).unwrap();
        assert_eq!(shifted.len(), set.len());
        // Odd parity shifted by an even-weight vector stays odd parity.
        assert_eq!(shifted, set);
        let shifted = set.xor_shift(&[1, 0, 0, 0]).unwrap();
        assert_eq!(shifted, parity_set(4, false));
    }
}

//! The projection measure: how high a dimension can coordinate projections
//! of a set reach while still covering at least half of the target cube.
//!
//! For `A ⊆ {0,1}^m` and a coordinate subset `T` of size `ℓ`, write `A_T`
//! for the projection of `A` onto the coordinates in `T`. Level `ℓ` is
//! *good* when the fraction of size-`ℓ` subsets `T` with `|A_T| ≥ 2^(ℓ-1)`
//! is at least `1 - ε`. The measure is the largest good level.
//!
//! Boundary convention: at `ℓ = m` the only subset is all of `[m]` and the
//! projection is `A` itself; that level counts as good only when `A` is the
//! entire cube. This pins the measure's calibration: the full cube scores
//! `m`, while every proper subset scores at most `m - 1` (in particular the
//! parity set scores exactly `m - 1`, which makes it a maximiser among
//! proper subsets). The comparison at every level is exact integer
//! arithmetic against a rational `ε`.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::pointset::{BitVectorSet, MeasureError};

/// Cap for the exhaustive all-subsets sweep.
pub const MAX_EXHAUSTIVE_PROJECTION_DIMENSION: usize = 20;

/// An exact non-negative rational, used for `ε` and threshold comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

impl Fraction {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "denominator must be positive");
        Fraction { num, den }
    }

    pub fn zero() -> Self {
        Fraction { num: 0, den: 1 }
    }

    /// `2^(-floor(alpha * m))` as an exact fraction.
    pub fn two_to_minus_floor_of(alpha: Fraction, m: usize) -> Self {
        let e = alpha.num as u128 * m as u128 / alpha.den as u128;
        assert!(e <= 62, "epsilon exponent too large");
        Fraction::new(1, 1u64 << e)
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Fraction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (
                a.trim().parse::<u64>().map_err(|e| e.to_string())?,
                b.trim().parse::<u64>().map_err(|e| e.to_string())?,
            ),
            None => (s.trim().parse::<u64>().map_err(|e| e.to_string())?, 1),
        };
        if den == 0 {
            return Err("denominator must be positive".into());
        }
        Ok(Fraction::new(num, den))
    }
}

/// `good/total >= 1 - eps`, compared by cross-multiplication.
fn fraction_meets_bar(good: u64, total: u64, eps: Fraction) -> bool {
    let lhs = good as u128 * eps.den as u128;
    let rhs = total as u128 * (eps.den.saturating_sub(eps.num)) as u128;
    lhs >= rhs
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelStat {
    pub ell: usize,
    /// Subsets of size `ell` whose projection covers at least half the
    /// `ell`-cube (all of it when `ell = m`).
    pub good: u64,
    /// Subsets examined (all of them in exhaustive mode, samples otherwise).
    pub total: u64,
    pub passes: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectionOutcome {
    pub m: usize,
    pub set_size: usize,
    pub epsilon: Fraction,
    pub exhaustive: bool,
    pub levels: Vec<LevelStat>,
    /// Largest passing level (0 when even the empty projection fails, which
    /// happens only for the empty set).
    pub value: usize,
}

/// Walks all `k`-subsets of `0..m` in lexicographic order, calling `visit`
/// with each subset as a slice of ascending coordinates.
fn for_each_combination(m: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > m {
        return;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        visit(&c);
        // Find the rightmost index that can still advance.
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if c[i] != i + m - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        c[i] += 1;
        for j in i + 1..k {
            c[j] = c[j - 1] + 1;
        }
    }
}

/// Tests whether the projection of `points` onto the coordinates `t` covers
/// at least half of the `|t|`-cube, using a stamped scratch table so no
/// clearing is needed between subsets.
fn projection_covers_half(
    points: &[usize],
    t: &[usize],
    stamps: &mut [u32],
    epoch: &mut u32,
    require_full: bool,
) -> bool {
    let ell = t.len();
    let space = 1usize << ell;
    let need = if require_full { space } else { space.div_ceil(2) };
    *epoch += 1;
    let mut seen = 0usize;
    for &p in points {
        let mut key = 0usize;
        for (pos, &coord) in t.iter().enumerate() {
            key |= (p >> coord & 1) << pos;
        }
        if stamps[key] != *epoch {
            stamps[key] = *epoch;
            seen += 1;
            if seen >= need {
                return true;
            }
        }
    }
    false
}

/// Exhaustive projection measure: every subset of every size is examined.
pub fn projection_measure(
    set: &BitVectorSet,
    epsilon: Fraction,
) -> Result<ProjectionOutcome, MeasureError> {
    let m = set.m();
    if m > MAX_EXHAUSTIVE_PROJECTION_DIMENSION {
        return Err(MeasureError::TooLarge {
            m,
            what: "exhaustive projection sweep",
            limit: MAX_EXHAUSTIVE_PROJECTION_DIMENSION,
        });
    }
    let points = set.points();
    let mut stamps = vec![0u32; 1 << m];
    let mut epoch = 0u32;
    let mut levels = Vec::with_capacity(m + 1);
    for ell in 0..=m {
        let mut good = 0u64;
        let mut total = 0u64;
        for_each_combination(m, ell, |t| {
            total += 1;
            if projection_covers_half(&points, t, &mut stamps, &mut epoch, ell == m) {
                good += 1;
            }
        });
        let passes = fraction_meets_bar(good, total, epsilon);
        levels.push(LevelStat { ell, good, total, passes });
    }
    let value = levels.iter().filter(|l| l.passes).map(|l| l.ell).max().unwrap_or(0);
    Ok(ProjectionOutcome {
        m,
        set_size: points.len(),
        epsilon,
        exhaustive: true,
        levels,
        value,
    })
}

/// Sampled projection measure for dimensions where the subset sweep is too
/// wide: draws `samples` subsets per level (with replacement) from a seeded
/// generator. Deterministic for a fixed seed.
pub fn projection_measure_sampled(
    set: &BitVectorSet,
    epsilon: Fraction,
    samples: u64,
    seed: u64,
) -> Result<ProjectionOutcome, MeasureError> {
    assert!(samples > 0, "need at least one sample per level");
    let m = set.m();
    let points = set.points();
    let mut stamps = vec![0u32; 1 << m];
    let mut epoch = 0u32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut levels = Vec::with_capacity(m + 1);
    for ell in 0..=m {
        let mut good = 0u64;
        // Levels 0 and m have a single subset; sampling adds nothing there.
        let total = if ell == 0 || ell == m { 1 } else { samples };
        for _ in 0..total {
            let mut t: Vec<usize> = rand::seq::index::sample(&mut rng, m, ell).into_vec();
            t.sort_unstable();
            if projection_covers_half(&points, &t, &mut stamps, &mut epoch, ell == m) {
                good += 1;
            }
        }
        let passes = fraction_meets_bar(good, total, epsilon);
        levels.push(LevelStat { ell, good, total, passes });
    }
    let value = levels.iter().filter(|l| l.passes).map(|l| l.ell).max().unwrap_or(0);
    Ok(ProjectionOutcome {
        m,
        set_size: points.len(),
        epsilon,
        exhaustive: false,
        levels,
        value,
    })
}

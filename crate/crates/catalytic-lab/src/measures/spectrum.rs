//! Exact Fourier spectra of Boolean functions given as point sets.
//!
//! A set `A ⊆ {0,1}^m` is read as the ±1 function `f(x) = -1` if `x ∈ A`,
//! `+1` otherwise. All coefficients are kept as integer numerators at scale
//! `2^m`: the true coefficient for character `S` is `numerators[S] / 2^m`.
//! Everything downstream (Parseval, degree-1 mass, spectral L1) is exact
//! integer arithmetic; nothing is floated.

use serde::Serialize;

use super::pointset::{BitVectorSet, MeasureError};

/// Dimension cap for spectra (`2^m` i64 numerators).
pub const MAX_SPECTRUM_DIMENSION: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spectrum {
    m: usize,
    /// `numerators[S] = 2^m * f̂(S)`, indexed by the character's coordinate
    /// bitmask (bit `j` = coordinate `j`).
    numerators: Vec<i64>,
}

/// Fast Walsh–Hadamard transform of the set's ±1 indicator.
pub fn wht_spectrum(set: &BitVectorSet) -> Result<Spectrum, MeasureError> {
    let m = set.m();
    if m > MAX_SPECTRUM_DIMENSION {
        return Err(MeasureError::TooLarge {
            m,
            what: "Walsh-Hadamard transform",
            limit: MAX_SPECTRUM_DIMENSION,
        });
    }
    let n = 1usize << m;
    let mut vals: Vec<i64> = (0..n).map(|i| if set.contains(i) { -1 } else { 1 }).collect();
    let mut h = 1;
    while h < n {
        let mut base = 0;
        while base < n {
            for i in base..base + h {
                let (a, b) = (vals[i], vals[i + h]);
                vals[i] = a + b;
                vals[i + h] = a - b;
            }
            base += h * 2;
        }
        h *= 2;
    }
    Ok(Spectrum { m, numerators: vals })
}

/// Textbook-direct transform, quadratic in `2^m`. Kept as an independent
/// cross-check for the butterfly version.
pub fn naive_spectrum(set: &BitVectorSet) -> Result<Spectrum, MeasureError> {
    let m = set.m();
    if m > 14 {
        return Err(MeasureError::TooLarge {
            m,
            what: "quadratic-time transform",
            limit: 14,
        });
    }
    let n = 1usize << m;
    let numerators = (0..n)
        .map(|s| {
            (0..n)
                .map(|x| {
                    let f = if set.contains(x) { -1i64 } else { 1 };
                    let chi = if (x & s).count_ones() % 2 == 1 { -1 } else { 1 };
                    f * chi
                })
                .sum()
        })
        .collect();
    Ok(Spectrum { m, numerators })
}

impl Spectrum {
    pub fn m(&self) -> usize {
        self.m
    }

    /// Numerator of `f̂(S)` at scale `2^m`.
    pub fn numerator(&self, s: usize) -> i64 {
        self.numerators[s]
    }

    pub fn numerators(&self) -> &[i64] {
        &self.numerators
    }

    /// `Σ_S f̂(S)^2 = 1`, i.e. `Σ_S numerator(S)^2 == 4^m`.
    pub fn parseval_holds(&self) -> bool {
        let sum: u128 = self
            .numerators
            .iter()
            .map(|&v| (v as i128 * v as i128) as u128)
            .sum();
        sum == 1u128 << (2 * self.m)
    }

    /// Numerator of `f̂(∅)^2 + Σ_j f̂({j})^2` at scale `4^m`.
    pub fn degree_at_most_one_mass(&self) -> u128 {
        let sq = |v: i64| (v as i128 * v as i128) as u128;
        let mut total = sq(self.numerators[0]);
        for j in 0..self.m {
            total += sq(self.numerators[1 << j]);
        }
        total
    }

    /// Numerator of `Σ_S |f̂(S)|` at scale `2^m`.
    pub fn l1_numerator(&self) -> u128 {
        self.numerators.iter().map(|&v| v.unsigned_abs() as u128).sum()
    }

    /// `Σ_S |f̂(S)|` as a decimal string (the value is a dyadic rational, so
    /// this is exact).
    pub fn l1_display(&self) -> String {
        dyadic_display(self.l1_numerator(), self.m as u32)
    }
}

/// Renders `num / 2^scale` exactly in decimal.
pub fn dyadic_display(num: u128, scale: u32) -> String {
    let int = num >> scale;
    let mut frac = num & ((1u128 << scale) - 1);
    if frac == 0 {
        return int.to_string();
    }
    let mut digits = String::new();
    // Each multiplication by 5 and shift peels off one decimal digit of the
    // fractional part; a dyadic rational terminates after `scale` digits.
    let mut rem_scale = scale;
    while frac != 0 {
        frac *= 5;
        rem_scale -= 1;
        digits.push(char::from_digit((frac >> rem_scale) as u32 % 10, 10).unwrap());
        frac &= (1u128 << rem_scale) - 1;
    }
    format!("{int}.{digits}")
}

/// The threshold set `{x : |x| ≤ k}` (points of Hamming weight at most `k`),
/// i.e. the `-1` side of the threshold function with that cutoff.
pub fn threshold_set(m: usize, k: usize) -> BitVectorSet {
    BitVectorSet::from_fn(m, |idx| (idx.count_ones() as usize) <= k)
}

/// Outcome of the degree-1 mass bound for threshold functions: a threshold
/// function must carry at least half of its Fourier weight on levels 0 and 1.
#[derive(Debug, Clone, Serialize)]
pub struct DegreeOneCertificate {
    pub m: usize,
    pub k: usize,
    /// Numerator of the level-0/1 mass at scale `4^m`.
    pub mass_numerator: u128,
    /// Numerator of the 1/2 bound at the same scale, i.e. `2^(2m-1)`.
    pub bound_numerator: u128,
    pub holds: bool,
}

/// Checks the half-weight bound on levels 0 and 1 for the threshold set
/// `{|x| ≤ k}`, exactly.
pub fn degree_one_mass_bound(m: usize, k: usize) -> Result<DegreeOneCertificate, MeasureError> {
    assert!(k < m, "cutoff must leave both function values attained");
    let spec = wht_spectrum(&threshold_set(m, k))?;
    let mass_numerator = spec.degree_at_most_one_mass();
    let bound_numerator = 1u128 << (2 * m - 1);
    Ok(DegreeOneCertificate {
        m,
        k,
        mass_numerator,
        bound_numerator,
        holds: mass_numerator >= bound_numerator,
    })
}

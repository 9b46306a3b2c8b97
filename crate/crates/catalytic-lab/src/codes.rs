//! Binary linear codes used by the decoding-based restoration engines.
//!
//! The toolkit is deliberately small-block: message lengths stay below ~20
//! bits, so exhaustive certification (minimum distance by enumerating all
//! codewords, covering radius by breadth-first search over the hypercube) is
//! affordable and every decoder can be cross-checked against brute-force
//! nearest-codeword search.
//!
//! All decoding is bounded-distance: a word within Hamming distance
//! `⌊(d−1)/2⌋` of some codeword decodes to it (uniquely, by the distance
//! property); anything farther away reports [`DecodeOutcome::Failure`].

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{distance, format_word, weight};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("bad code parameters: {0}")]
    BadParameters(String),
    #[error("block length {n} too large for {what} (limit {limit})")]
    TooLarge {
        n: usize,
        what: &'static str,
        limit: usize,
    },
    #[error("no random [{n},{k}] code with minimum distance >= 3 found after {attempts} draws")]
    RandomSearchFailed { n: usize, k: usize, attempts: u32 },
}

/// Description of a code family member; buildable into a [`LinearCode`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CodeSpec {
    /// `[n, 1, n]` repetition code, `n >= 3`.
    Repetition { n: usize },
    /// `[7, 4, 3]` Hamming code in systematic form.
    Hamming,
    /// `[8, 4, 4]` extended Hamming code (overall parity bit appended).
    ExtendedHamming,
    /// First-order Reed-Muller code `[2^m, m+1, 2^(m-1)]`, `m >= 3`.
    ReedMuller { m: usize },
    /// Systematic `[n, k]` code with random parity part, redrawn
    /// deterministically from the seed until the minimum distance is at
    /// least 3 (certified exhaustively).
    RandomLinear { n: usize, k: usize, seed: u64 },
}

impl CodeSpec {
    pub fn build(&self) -> Result<LinearCode, CodeError> {
        match *self {
            CodeSpec::Repetition { n } => {
                if n < 3 {
                    return Err(CodeError::BadParameters(
                        "repetition code needs block length >= 3".into(),
                    ));
                }
                if n > 30 {
                    return Err(CodeError::TooLarge {
                        n,
                        what: "repetition code",
                        limit: 30,
                    });
                }
                LinearCode::from_generator(self.clone(), format!("rep({n})"), vec![vec![1; n]])
            }
            CodeSpec::Hamming => LinearCode::from_generator(
                self.clone(),
                "hamming(7,4)".into(),
                hamming_generator(false),
            ),
            CodeSpec::ExtendedHamming => LinearCode::from_generator(
                self.clone(),
                "exthamming(8,4)".into(),
                hamming_generator(true),
            ),
            CodeSpec::ReedMuller { m } => {
                if !(3..=10).contains(&m) {
                    return Err(CodeError::BadParameters(
                        "first-order Reed-Muller supported for 3 <= m <= 10".into(),
                    ));
                }
                let n = 1usize << m;
                let mut rows = vec![vec![1u8; n]];
                for i in 1..=m {
                    rows.push((0..n).map(|j| ((j >> (i - 1)) & 1) as u8).collect());
                }
                LinearCode::from_generator(self.clone(), format!("rm(1,{m})"), rows)
            }
            CodeSpec::RandomLinear { n, k, seed } => {
                if k == 0 || k >= n {
                    return Err(CodeError::BadParameters(
                        "random code needs 0 < k < n".into(),
                    ));
                }
                if n > 30 || k > 20 {
                    return Err(CodeError::TooLarge {
                        n,
                        what: "random code certification",
                        limit: 30,
                    });
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                const MAX_ATTEMPTS: u32 = 1000;
                for _ in 0..MAX_ATTEMPTS {
                    let mut rows = Vec::with_capacity(k);
                    for i in 0..k {
                        let mut row = vec![0u8; n];
                        row[i] = 1;
                        for cell in row.iter_mut().take(n).skip(k) {
                            *cell = rng.gen_range(0..2u8);
                        }
                        rows.push(row);
                    }
                    let code = LinearCode::from_generator(
                        self.clone(),
                        format!("random({n},{k};seed={seed})"),
                        rows,
                    )?;
                    if code.min_distance() >= 3 {
                        return Ok(code);
                    }
                }
                Err(CodeError::RandomSearchFailed {
                    n,
                    k,
                    attempts: MAX_ATTEMPTS,
                })
            }
        }
    }
}

fn hamming_generator(extended: bool) -> Vec<Vec<u8>> {
    // Systematic [7,4] generator; the parity part pairs each message bit
    // with the check equations it participates in.
    let base: [[u8; 7]; 4] = [
        [1, 0, 0, 0, 1, 1, 0],
        [0, 1, 0, 0, 1, 0, 1],
        [0, 0, 1, 0, 0, 1, 1],
        [0, 0, 0, 1, 1, 1, 1],
    ];
    base.iter()
        .map(|row| {
            let mut v = row.to_vec();
            if extended {
                v.push(row.iter().sum::<u8>() % 2);
            }
            v
        })
        .collect()
}

/// Result of bounded-distance decoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeOutcome {
    /// The word lies within the decoding radius of `codeword`.
    Decoded {
        message: Vec<u8>,
        codeword: Vec<u8>,
        /// Positions where the received word differs from the codeword.
        errors: Vec<usize>,
    },
    /// No codeword within the decoding radius.
    Failure,
}

impl DecodeOutcome {
    pub fn is_failure(&self) -> bool {
        matches!(self, DecodeOutcome::Failure)
    }
}

/// A binary linear code with generator matrix in row form, plus exhaustively
/// certified parameters.
#[derive(Debug, Clone)]
pub struct LinearCode {
    spec: CodeSpec,
    name: String,
    n: usize,
    k: usize,
    generator: Vec<Vec<u8>>,
    min_distance: usize,
}

impl LinearCode {
    fn from_generator(
        spec: CodeSpec,
        name: String,
        generator: Vec<Vec<u8>>,
    ) -> Result<Self, CodeError> {
        let k = generator.len();
        let n = generator[0].len();
        if generator.iter().any(|row| row.len() != n) {
            return Err(CodeError::BadParameters("ragged generator matrix".into()));
        }
        if k > 20 {
            return Err(CodeError::TooLarge {
                n,
                what: "codeword enumeration",
                limit: 20,
            });
        }
        let mut code = LinearCode {
            spec,
            name,
            n,
            k,
            generator,
            min_distance: 0,
        };
        let d = (1..1u32 << k)
            .map(|msg| weight(&code.encode_u32(msg)))
            .min()
            .ok_or_else(|| CodeError::BadParameters("empty generator".into()))?;
        if d == 0 {
            return Err(CodeError::BadParameters(
                "generator rows are linearly dependent".into(),
            ));
        }
        code.min_distance = d;
        Ok(code)
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Block length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Message length.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Exhaustively computed minimum distance.
    pub fn min_distance(&self) -> usize {
        self.min_distance
    }

    /// Unique-decoding radius `⌊(d−1)/2⌋`.
    pub fn radius(&self) -> usize {
        (self.min_distance - 1) / 2
    }

    /// Multiplies the message (length `k`) by the generator matrix.
    pub fn encode(&self, message: &[u8]) -> Vec<u8> {
        assert_eq!(message.len(), self.k, "message length must equal k");
        let mut word = vec![0u8; self.n];
        for (bit, row) in message.iter().zip(&self.generator) {
            if *bit == 1 {
                for (w, r) in word.iter_mut().zip(row) {
                    *w ^= r;
                }
            }
        }
        word
    }

    /// Encodes a message packed as an integer, bit `i` = message bit `i`.
    pub fn encode_u32(&self, message: u32) -> Vec<u8> {
        let bits: Vec<u8> = (0..self.k).map(|i| ((message >> i) & 1) as u8).collect();
        self.encode(&bits)
    }

    /// All `2^k` codewords, indexed by message enumeration order.
    pub fn all_codewords(&self) -> Vec<Vec<u8>> {
        (0..1u32 << self.k).map(|m| self.encode_u32(m)).collect()
    }

    /// All `2^k` (message, codeword) pairs.
    pub fn all_pairs(&self) -> Vec<(Vec<u8>, Vec<u8>)> {
        (0..1u32 << self.k)
            .map(|m| {
                let bits: Vec<u8> = (0..self.k).map(|i| ((m >> i) & 1) as u8).collect();
                let word = self.encode(&bits);
                (bits, word)
            })
            .collect()
    }

    /// Bounded-distance decoding by brute-force nearest-codeword search.
    /// Within the decoding radius the nearest codeword is unique, so this is
    /// the reference decoder every specialized route is checked against.
    pub fn decode(&self, word: &[u8]) -> DecodeOutcome {
        assert_eq!(word.len(), self.n, "word length must equal n");
        let mut best: Option<(usize, u32)> = None; // (distance, message)
        for msg in 0..1u32 << self.k {
            let d = distance(&self.encode_u32(msg), word);
            if best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, msg));
            }
        }
        let (d, msg) = best.expect("at least the zero codeword exists");
        if d > self.radius() {
            return DecodeOutcome::Failure;
        }
        let message: Vec<u8> = (0..self.k).map(|i| ((msg >> i) & 1) as u8).collect();
        let codeword = self.encode(&message);
        let errors = (0..self.n).filter(|&j| codeword[j] != word[j]).collect();
        DecodeOutcome::Decoded {
            message,
            codeword,
            errors,
        }
    }

    /// Majority-logic decoding for first-order Reed-Muller codes: each
    /// non-constant message bit is recovered as the majority over `2^(m-1)`
    /// disjoint difference pairs, then the constant bit as the majority of
    /// the residual word. Falls back to [`Self::decode`] for other families.
    pub fn decode_majority(&self, word: &[u8]) -> DecodeOutcome {
        let m = match self.spec {
            CodeSpec::ReedMuller { m } => m,
            _ => return self.decode(word),
        };
        assert_eq!(word.len(), self.n);
        let mut message = vec![0u8; self.k];
        for i in 1..=m {
            let stride = 1usize << (i - 1);
            let mut ones = 0usize;
            for j in 0..self.n {
                if (j >> (i - 1)) & 1 == 0 {
                    ones += usize::from(word[j] ^ word[j + stride]);
                }
            }
            message[i] = u8::from(2 * ones > self.n / 2);
        }
        let partial = self.encode(&message);
        let ones = (0..self.n).filter(|&j| word[j] != partial[j]).count();
        message[0] = u8::from(2 * ones > self.n);
        let codeword = self.encode(&message);
        let errors: Vec<usize> = (0..self.n).filter(|&j| codeword[j] != word[j]).collect();
        if errors.len() > self.radius() {
            DecodeOutcome::Failure
        } else {
            DecodeOutcome::Decoded {
                message,
                codeword,
                errors,
            }
        }
    }

    /// Positions where `word` differs from its decoded codeword, or `None`
    /// when the word is outside the decoding radius.
    pub fn corrupted_indices(&self, word: &[u8]) -> Option<Vec<usize>> {
        match self.decode(word) {
            DecodeOutcome::Decoded { errors, .. } => Some(errors),
            DecodeOutcome::Failure => None,
        }
    }

    /// Covering radius: the largest distance from any word of `{0,1}^n` to
    /// the code, computed by multi-source breadth-first search over the
    /// hypercube. Exact but exponential in `n`; capped at `n <= 24`.
    pub fn covering_radius(&self) -> Result<usize, CodeError> {
        if self.n > 24 {
            return Err(CodeError::TooLarge {
                n: self.n,
                what: "covering-radius search",
                limit: 24,
            });
        }
        let size = 1usize << self.n;
        let mut dist = vec![u8::MAX; size];
        let mut frontier: Vec<usize> = self
            .all_codewords()
            .iter()
            .map(|w| w.iter().enumerate().fold(0usize, |acc, (j, &b)| {
                acc | ((b as usize) << j)
            }))
            .collect();
        for &idx in &frontier {
            dist[idx] = 0;
        }
        let mut radius = 0usize;
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &idx in &frontier {
                let d = dist[idx];
                for j in 0..self.n {
                    let nb = idx ^ (1 << j);
                    if dist[nb] == u8::MAX {
                        dist[nb] = d + 1;
                        radius = radius.max(d as usize + 1);
                        next.push(nb);
                    }
                }
            }
            frontier = next;
        }
        Ok(radius)
    }
}

/// Number of `i`-subsets of an `n`-set, exact.
pub fn binomial(n: usize, i: usize) -> BigUint {
    if i > n {
        return BigUint::from(0u32);
    }
    let mut acc = BigUint::from(1u32);
    for j in 0..i {
        acc = acc * BigUint::from(n - j) / BigUint::from(j + 1);
    }
    acc
}

/// Volume of a Hamming ball of the given radius in `{0,1}^n`.
pub fn ball_volume(n: usize, radius: usize) -> BigUint {
    (0..=radius.min(n)).map(|i| binomial(n, i)).sum()
}

/// Sphere-covering check: balls of radius `r` around all `2^k` codewords can
/// only cover `{0,1}^n` if `2^k * vol(n, r) >= 2^n`. Any reported covering
/// radius must satisfy this lower bound.
pub fn sphere_covering_holds(n: usize, k: usize, r: usize) -> bool {
    BigUint::from(2u32).pow(k as u32) * ball_volume(n, r) >= BigUint::from(2u32).pow(n as u32)
}

/// Human-readable code summary line.
pub fn describe(code: &LinearCode) -> String {
    format!(
        "{}: [n={}, k={}, d={}], decoding radius {}",
        code.name(),
        code.n(),
        code.k(),
        code.min_distance(),
        code.radius()
    )
}

/// Applies bit flips at the given positions, for corrupting test words.
pub fn flip_positions(word: &[u8], positions: &[usize]) -> Vec<u8> {
    let mut out = word.to_vec();
    for &p in positions {
        out[p] ^= 1;
    }
    out
}

/// Formats a decode outcome for logs.
pub fn outcome_summary(outcome: &DecodeOutcome) -> String {
    match outcome {
        DecodeOutcome::Decoded { codeword, errors, .. } => format!(
            "decoded to {} ({} error{})",
            format_word(codeword),
            errors.len(),
            if errors.len() == 1 { "" } else { "s" }
        ),
        DecodeOutcome::Failure => "decode failure (outside radius)".into(),
    }
}

//! The block engine: confine the inner machine to one lightly-corrupted
//! block and undo exactly the right flips afterwards.
//!
//! The tape (length `c = ℓ·b`) is split into `ℓ` blocks of `b` cells. The
//! restoration set is the union of radius-`r` balls around the codewords,
//! `r = ℓ·τ`; by pigeonhole every such tape has a block carrying at most
//! `τ` of its corruptions. The engine:
//!
//! 1. **scans** for the first block whose corruption count (positions where
//!    the tape differs from its decoded codeword) is at most `τ`; if no
//!    block qualifies — possible only outside the restoration set — it
//!    falls back to the last block with an empty corruption memo;
//! 2. **stores** the block's start and end positions and the at most `τ`
//!    block-relative corrupted indices in auxiliary state;
//! 3. **simulates** the inner machine inside that block only;
//! 4. **restores** by re-decoding the scribbled tape (one snapshot step; the
//!    result is within the decoding radius because `r + b` is) and flipping
//!    cell `j` of the block exactly when "corrupted now" differs from
//!    "corrupted at the start" — cells outside the block were never touched.
//!
//! Decoding against the code and the corruption memo both live in bounded
//! auxiliary state, so the working memory beyond the catalytic tape stays
//! logarithmic.

use std::sync::Arc;

use num_bigint::BigUint;

use crate::codes::{DecodeOutcome, LinearCode};
use crate::engines::common::{
    bits_for, check_tape, decision_from_aux, decision_to_aux, HostedTable, InnerOutcome, DEC_NONE,
};
use crate::machine::{
    check_machine_id, CatalyticMachine, Configuration, Decision, MachineError, StepError,
};
use crate::setlang::CatalyticSet;
use crate::table::MachineTable;

const AUX_STATE: usize = 0;
const AUX_DEC: usize = 1;
const AUX_BLOCK: usize = 2;
const AUX_START: usize = 3;
const AUX_END: usize = 4;
const AUX_SNAPSHOT: usize = 5;
/// First of `tau` slots holding sorted block-relative corrupted indices
/// (`-1` marks an unused slot).
const AUX_MEMO: usize = 6;

const PHASE_SCAN: u16 = 0;
const PHASE_STORE: u16 = 1;
const PHASE_SIMULATE: u16 = 2;
const PHASE_SNAPSHOT: u16 = 3;
const PHASE_FLIP: u16 = 4;
const PHASE_DONE: u16 = 5;

pub struct BlockEngine {
    host: HostedTable,
    code: LinearCode,
    id: String,
    block_len: usize,
    blocks: usize,
    tau: usize,
    radius: usize,
    set: CatalyticSet,
}

impl BlockEngine {
    pub fn build(
        code: LinearCode,
        table: Arc<MachineTable>,
        block_len: usize,
        tau: usize,
    ) -> Result<Self, MachineError> {
        let c = code.n();
        if block_len == 0 || c % block_len != 0 {
            return Err(MachineError::ConfigInvalid(format!(
                "block length {block_len} must divide the tape length {c}"
            )));
        }
        if block_len > 62 {
            return Err(MachineError::ConfigInvalid(
                "block length above 62 overflows the snapshot slot".into(),
            ));
        }
        let blocks = c / block_len;
        if tau == 0 || tau > block_len {
            return Err(MachineError::ConfigInvalid(format!(
                "corruption budget {tau} per block must lie in 1..={block_len}"
            )));
        }
        let radius = blocks * tau;
        if radius + block_len > code.radius() {
            return Err(MachineError::ConfigInvalid(format!(
                "ball radius {radius} plus block length {block_len} exceeds the \
                 unique-decoding radius {} of {}",
                code.radius(),
                code.name()
            )));
        }
        let host = HostedTable::new(table, block_len)?;
        let id = check_machine_id(&format!(
            "block({},{},b{block_len},t{tau})",
            code.name(),
            host.table.name()
        ));
        let set = CatalyticSet::ball(code.clone(), radius)
            .map_err(|e| MachineError::ConfigInvalid(e.to_string()))?;
        Ok(BlockEngine {
            host,
            code,
            id,
            block_len,
            blocks,
            tau,
            radius,
            set,
        })
    }

    pub fn ball_radius(&self) -> usize {
        self.radius
    }

    /// Block-relative corrupted positions of the block starting at `start`,
    /// or `None` when the tape is outside the decoding radius.
    fn block_corruptions(&self, tape: &[u8], start: usize) -> Option<Vec<usize>> {
        match self.code.decode_majority(tape) {
            DecodeOutcome::Decoded { errors, .. } => Some(
                errors
                    .iter()
                    .filter(|&&e| e >= start && e < start + self.block_len)
                    .map(|&e| e - start)
                    .collect(),
            ),
            DecodeOutcome::Failure => None,
        }
    }

    fn memo_contains(&self, aux: &[i64], j: usize) -> bool {
        (0..self.tau).any(|s| aux[AUX_MEMO + s] == j as i64)
    }

    /// Fallback when no block qualifies: the last block with an empty memo.
    fn select_fallback(&self, next: &mut Configuration) {
        let start = (self.blocks - 1) * self.block_len;
        next.aux_counters[AUX_BLOCK] = (self.blocks - 1) as i64;
        next.aux_counters[AUX_START] = start as i64;
        next.aux_counters[AUX_END] = (start + self.block_len - 1) as i64;
        for s in 0..self.tau {
            next.aux_counters[AUX_MEMO + s] = -1;
        }
        next.phase = PHASE_SIMULATE;
        next.catalytic_head = start as u32;
        next.work_head = 0;
    }
}

impl CatalyticMachine for BlockEngine {
    fn id(&self) -> &str {
        &self.id
    }

    fn catalytic_length(&self) -> usize {
        self.code.n()
    }

    fn catalytic_alphabet(&self) -> &[char] {
        &['0', '1']
    }

    fn phase_names(&self) -> Vec<String> {
        vec![
            "scan-blocks".into(),
            "store-window".into(),
            "simulate".into(),
            "restore-snapshot".into(),
            "restore-flip".into(),
            "done".into(),
        ]
    }

    fn initial_configuration(
        &self,
        _input: &[u8],
        w0: &[u8],
    ) -> Result<Configuration, MachineError> {
        check_tape(w0, self.code.n(), 2)?;
        let mut aux = vec![0, DEC_NONE, 0, 0, 0, 0];
        aux.extend(std::iter::repeat(-1).take(self.tau));
        Ok(Configuration {
            machine_id: Arc::from(self.id.as_str()),
            phase: PHASE_SCAN,
            input_head: 0,
            work_head: 0,
            catalytic_head: 0,
            work_tape: Vec::new(),
            catalytic_tape: w0.to_vec(),
            aux_counters: aux,
        })
    }

    fn step(&self, input: &[u8], cfg: &Configuration) -> Result<Configuration, StepError> {
        let mut next = cfg.clone();
        match cfg.phase {
            PHASE_SCAN => {
                // One step per block, the head parked on the block start.
                let start = cfg.catalytic_head as usize;
                match self.block_corruptions(&cfg.catalytic_tape, start) {
                    None => self.select_fallback(&mut next),
                    Some(corrupted) if corrupted.len() <= self.tau => {
                        next.phase = PHASE_STORE;
                    }
                    Some(_) => {
                        if start + self.block_len == self.code.n() {
                            self.select_fallback(&mut next);
                        } else {
                            next.catalytic_head += self.block_len as u32;
                        }
                    }
                }
            }
            PHASE_STORE => {
                // The tape is untouched since the scan, so the memo matches
                // what the qualifying scan step saw.
                let start = cfg.catalytic_head as usize;
                let corrupted = self
                    .block_corruptions(&cfg.catalytic_tape, start)
                    .ok_or_else(|| {
                        StepError::InvariantViolation(
                            "block chosen during the scan no longer decodes".into(),
                        )
                    })?;
                next.aux_counters[AUX_BLOCK] = (start / self.block_len) as i64;
                next.aux_counters[AUX_START] = start as i64;
                next.aux_counters[AUX_END] = (start + self.block_len - 1) as i64;
                for s in 0..self.tau {
                    next.aux_counters[AUX_MEMO + s] =
                        corrupted.get(s).map_or(-1, |&j| j as i64);
                }
                next.phase = PHASE_SIMULATE;
                next.work_head = 0;
            }
            PHASE_SIMULATE => {
                let start = cfg.aux_counters[AUX_START] as usize;
                match self.host.inner_step(input, &mut next, AUX_STATE, start)? {
                    InnerOutcome::Stepped => {}
                    InnerOutcome::Halted(d) => {
                        next.aux_counters[AUX_DEC] = decision_to_aux(d);
                        next.phase = PHASE_SNAPSHOT;
                    }
                }
            }
            PHASE_SNAPSHOT => {
                // One step: record which block cells are corrupted *now*,
                // before any flip is applied.
                let start = cfg.aux_counters[AUX_START] as usize;
                match self.block_corruptions(&cfg.catalytic_tape, start) {
                    Some(corrupted) => {
                        let mask = corrupted.iter().fold(0i64, |acc, &j| acc | (1 << j));
                        next.aux_counters[AUX_SNAPSHOT] = mask;
                        next.phase = PHASE_FLIP;
                        next.catalytic_head = start as u32;
                    }
                    None => {
                        // Out of decoding range even after simulation: the
                        // start tape was far outside the restoration set, no
                        // flip can be justified, so none is applied.
                        next.phase = PHASE_DONE;
                    }
                }
            }
            PHASE_FLIP => {
                let start = cfg.aux_counters[AUX_START] as usize;
                let end = cfg.aux_counters[AUX_END] as usize;
                let ch = cfg.catalytic_head as usize;
                let j = ch - start;
                let corrupted_now = cfg.aux_counters[AUX_SNAPSHOT] >> j & 1 == 1;
                let corrupted_at_start = self.memo_contains(&cfg.aux_counters, j);
                if corrupted_now != corrupted_at_start {
                    next.catalytic_tape[ch] ^= 1;
                }
                if ch == end {
                    next.phase = PHASE_DONE;
                } else {
                    next.catalytic_head += 1;
                }
            }
            _ => return Err(StepError::AlreadyHalted),
        }
        Ok(next)
    }

    fn decision(&self, cfg: &Configuration) -> Option<Decision> {
        if cfg.phase == PHASE_DONE {
            decision_from_aux(cfg.aux_counters[AUX_DEC])
        } else {
            None
        }
    }

    fn restores(&self, w: &[u8]) -> bool {
        w.len() == self.code.n() && w.iter().all(|&b| b <= 1) && self.set.contains(w)
    }

    fn restoration_set_description(&self) -> String {
        self.set.describe()
    }

    fn configuration_space_bound(&self, input_len: usize) -> BigUint {
        let c = self.code.n();
        let phases = BigUint::from(6u32);
        let heads = BigUint::from(input_len + 2)
            * BigUint::from(self.block_len + 1)
            * BigUint::from(c + 1);
        let tape = BigUint::from(2u32).pow(c as u32);
        let aux = BigUint::from(self.host.state_count())
            * BigUint::from(3u32)
            * BigUint::from(self.blocks + 1)
            * BigUint::from(c + 1)
            * BigUint::from(c + 1)
            * BigUint::from(2u32).pow(self.block_len as u32)
            * BigUint::from(self.block_len + 1).pow(self.tau as u32);
        phases * heads * tape * aux
    }

    fn aux_state_bits(&self) -> u64 {
        let c = self.code.n() as u64;
        bits_for(self.host.state_count() as u64)
            + bits_for(3)
            + bits_for(self.blocks as u64)
            + 2 * bits_for(c + 1)
            + self.block_len as u64
            + self.tau as u64 * bits_for(self.block_len as u64 + 1)
    }
}

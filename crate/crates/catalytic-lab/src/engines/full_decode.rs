//! The full-decode engine: restore a codeword tape by decoding the whole
//! tape and re-encoding the recovered message.
//!
//! The tape is treated as a (possibly corrupted) codeword of a linear code
//! with minimum distance `d`. The inner machine scribbles only on the first
//! `inner_space ≤ ⌊(d-1)/2⌋` cells, so whenever the tape started as a
//! codeword, it ends the simulation within the unique-decoding radius.
//! Restoration then decodes the whole tape in one host-computed step,
//! stores the recovered message in bounded auxiliary state, and re-encodes
//! it cell by cell. If decoding fails — possible only when the tape did not
//! start as a codeword — the tape is left exactly as the simulation left it.

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
const AUX_FOUND: usize = 2;
const AUX_MESSAGE: usize = 3;

const PHASE_SIMULATE: u16 = 0;
const PHASE_DECODE: u16 = 1;
const PHASE_WRITE: u16 = 2;
const PHASE_DONE: u16 = 3;

pub struct FullDecodeEngine {
    host: HostedTable,
    code: LinearCode,
    id: String,
    inner_space: usize,
    set: CatalyticSet,
    /// Fault injection for harness sensitivity tests: skip the restoration
    /// phases entirely, leaving the inner machine's scribbles in place.
    skip_restore: bool,
}

impl FullDecodeEngine {
    pub fn build(
        code: LinearCode,
        table: Arc<MachineTable>,
        inner_space: usize,
    ) -> Result<Self, MachineError> {
        let radius = code.radius();
        if inner_space == 0 || inner_space > radius {
            return Err(MachineError::ConfigInvalid(format!(
                "inner window of {inner_space} cells must lie in 1..={radius} \
                 (the unique-decoding radius of {})",
                code.name()
            )));
        }
        let host = HostedTable::new(table, inner_space)?;
        let id = check_machine_id(&format!(
            "full-decode({},{},s{})",
            code.name(),
            host.table.name(),
            inner_space
        ));
        Ok(FullDecodeEngine {
            host,
            set: CatalyticSet::codewords(code.clone()),
            code,
            id,
            inner_space,
            skip_restore: false,
        })
    }

    /// Deliberately faulty variant that never restores; the verification
    /// harness must flag it with a concrete witness.
    pub fn with_skipped_restore(mut self) -> Self {
        self.skip_restore = true;
        self.id.insert_str(self.id.len() - 1, ",unrestored");
        self
    }

    pub fn code(&self) -> &LinearCode {
        &self.code
    }
}

impl CatalyticMachine for FullDecodeEngine {
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
            "simulate".into(),
            "restore-decode".into(),
            "restore-write".into(),
            "done".into(),
        ]
    }

    fn initial_configuration(
        &self,
        _input: &[u8],
        w0: &[u8],
    ) -> Result<Configuration, MachineError> {
        check_tape(w0, self.code.n(), 2)?;
        Ok(Configuration {
            machine_id: Arc::from(self.id.as_str()),
            phase: PHASE_SIMULATE,
            input_head: 0,
            work_head: 0,
            catalytic_head: 0,
            work_tape: Vec::new(),
            catalytic_tape: w0.to_vec(),
            aux_counters: vec![0, DEC_NONE, 0, 0],
        })
    }

    fn step(&self, input: &[u8], cfg: &Configuration) -> Result<Configuration, StepError> {
        let mut next = cfg.clone();
        match cfg.phase {
            PHASE_SIMULATE => match self.host.inner_step(input, &mut next, AUX_STATE, 0)? {
                InnerOutcome::Stepped => {}
                InnerOutcome::Halted(d) => {
                    // The decision is on record before any restoration work.
                    next.aux_counters[AUX_DEC] = decision_to_aux(d);
                    next.phase = PHASE_DECODE;
                    next.catalytic_head = 0;
                }
            },
            PHASE_DECODE => {
                if self.skip_restore {
                    next.phase = PHASE_DONE;
                } else {
                    // One host-computed step: bounded-distance decode of the
                    // whole tape into the auxiliary message slot.
                    match self.code.decode_majority(&cfg.catalytic_tape) {
                        DecodeOutcome::Decoded { message, .. } => {
                            let packed = message
                                .iter()
                                .enumerate()
                                .fold(0i64, |acc, (i, &b)| acc | (i64::from(b) << i));
                            next.aux_counters[AUX_FOUND] = 1;
                            next.aux_counters[AUX_MESSAGE] = packed;
                            next.phase = PHASE_WRITE;
                            next.catalytic_head = 0;
                        }
                        DecodeOutcome::Failure => {
                            // Not within any codeword's radius: leave the tape
                            // exactly as the simulation left it.
                            next.aux_counters[AUX_FOUND] = 0;
                            next.phase = PHASE_DONE;
                        }
                    }
                }
            }
            PHASE_WRITE => {
                let codeword = self.code.encode_u32(cfg.aux_counters[AUX_MESSAGE] as u32);
                let ch = cfg.catalytic_head as usize;
                next.catalytic_tape[ch] = codeword[ch];
                if ch + 1 == self.code.n() {
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
        let n = self.code.n();
        let phases = BigUint::from(4u32);
        let heads = BigUint::from(input_len + 2)
            * BigUint::from(self.inner_space + 1)
            * BigUint::from(n + 1);
        let tape = BigUint::from(2u32).pow(n as u32);
        let aux = BigUint::from(self.host.state_count())
            * BigUint::from(3u32)
            * BigUint::from(2u32)
            * BigUint::from(2u32).pow(self.code.k() as u32);
        phases * heads * tape * aux
    }

    fn aux_state_bits(&self) -> u64 {
        bits_for(self.host.state_count() as u64)
            + bits_for(3)
            + 1
            + self.code.k() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{all_words, distance};
    use crate::codes::CodeSpec;
    use crate::fixtures::fixture_table;
    use crate::machine::{audit_aux_state, run, DEFAULT_AUX_MULTIPLIER};
    use crate::table::StandaloneMachine;

    fn rm13() -> LinearCode {
        CodeSpec::ReedMuller { m: 3 }.build().unwrap()
    }

    fn oracle(table: &Arc<MachineTable>, input: &[u8]) -> Decision {
        run(&StandaloneMachine::new(Arc::clone(table)), input, &[], 100_000, false)
            .unwrap()
            .decision
    }

    #[test]
    fn codewords_restore_and_decisions_match_the_oracle() {
        let code = rm13();
        let table = fixture_table("parity-mark").unwrap();
        let engine = FullDecodeEngine::build(code.clone(), Arc::clone(&table), 1).unwrap();
        audit_aux_state(&engine, DEFAULT_AUX_MULTIPLIER).unwrap();
        for input in [vec![], vec![1u8], vec![1, 1], vec![0, 1, 1]] {
            let want = oracle(&table, &input);
            for cw in code.all_codewords() {
                let result = run(&engine, &input, &cw, 100_000, false).unwrap();
                assert_eq!(result.decision, want);
                assert_eq!(result.final_catalytic, cw, "codeword must return exactly");
                assert!(engine.restores(&cw));
            }
        }
    }

    #[test]
    fn far_tapes_still_decide_correctly_without_restoring() {
        let code = rm13();
        let table = fixture_table("parity-mark").unwrap();
        let engine = FullDecodeEngine::build(code.clone(), Arc::clone(&table), 1).unwrap();
        let codewords = code.all_codewords();
        // A tape at distance >= 2 from every codeword decodes to nothing.
        let far = all_words(8)
            .find(|w| codewords.iter().all(|cw| distance(w, cw) >= 2))
            .expect("the covering radius of this code is 2");
        assert!(!engine.restores(&far));
        let input = [1u8];
        let result = run(&engine, &input, &far, 100_000, false).unwrap();
        assert_eq!(result.decision, oracle(&table, &input));
    }

    #[test]
    fn skipped_restore_variant_leaves_scribbles_on_a_codeword() {
        let code = rm13();
        let table = fixture_table("parity-mark").unwrap();
        let engine = FullDecodeEngine::build(code, Arc::clone(&table), 1)
            .unwrap()
            .with_skipped_restore();
        assert!(engine.id().contains("unrestored"));
        let ones = vec![1u8; 8];
        // Even input parity: the inner machine parks a 0 where the tape held 1.
        let result = run(&engine, &[0], &ones, 100_000, false).unwrap();
        assert_eq!(result.decision, Decision::Reject);
        assert_ne!(result.final_catalytic, ones, "scribbles must survive");
        assert!(engine.restores(&ones), "the false claim the harness must refute");
    }

    #[test]
    fn window_must_fit_the_decoding_radius() {
        let table = fixture_table("parity-mark").unwrap();
        assert!(matches!(
            FullDecodeEngine::build(rm13(), table, 2),
            Err(MachineError::ConfigInvalid(_))
        ));
    }
}

//! The spare-symbol engine: a three-letter catalytic alphabet makes *every*
//! binary tape restorable, at a quarter of the tape for actual work.
//!
//! The tape has length `c = 4p` over `{0, 1, ^}` where `^` is a spare
//! symbol no binary tape contains. Two routes:
//!
//! * **Spare symbol present.** The tape is not binary, so nothing needs
//!   restoring: erase everything to `^` (the inner machine's blank) and run
//!   the inner machine directly on the first `p` cells, three symbols and
//!   all. The tape ends as the simulation leaves it.
//!
//! * **Binary tape.** Let `σ` be the majority bit (ties break to `1`), so
//!   at least `2p` cells hold `σ`. Simulate the inner machine on `p`
//!   virtual cells, the `i`-th stored in the `2i`-th and `2i+1`-th cells
//!   holding `σ` or `^` (counted from the left), under the pair code
//!   `0 ↦ σσ`, `1 ↦ σ^`, `blank ↦ ^σ`. Writes only ever exchange `σ` and
//!   `^` inside that cell population, so the population — and with it the
//!   virtual-cell addressing — never moves. Restoration is one sweep
//!   rewriting every `^` back to `σ`: the minority cells were never
//!   touched, so the whole tape returns exactly.
//!
//! The majority bit and the inner control state are the only bookkeeping,
//! so the auxiliary state is logarithmic. Decisions are correct on every
//! route because the inner machine's verdict ignores its scratch content.

use std::sync::Arc;

use num_bigint::BigUint;

use crate::engines::common::{
    bits_for, check_tape, decision_from_aux, decision_to_aux, DEC_NONE,
};
use crate::machine::{
    check_machine_id, CatalyticMachine, Configuration, Decision, MachineError, StepError,
};
use crate::table::{BinaryWorkMap, MachineTable};

/// Catalytic value of the spare symbol.
pub const SPARE: u8 = 2;

const AUX_STATE: usize = 0;
const AUX_DEC: usize = 1;
const AUX_SIGMA: usize = 2;
const AUX_ZEROS: usize = 3;

const PHASE_SCAN_SPARE: u16 = 0;
const PHASE_ERASE: u16 = 1;
const PHASE_SIM_DIRECT: u16 = 2;
const PHASE_SCAN_MAJORITY: u16 = 3;
const PHASE_SIM_ENCODED: u16 = 4;
const PHASE_RESTORE: u16 = 5;
const PHASE_DONE: u16 = 6;

pub struct ExtraSymbolEngine {
    table: Arc<MachineTable>,
    map: BinaryWorkMap,
    id: String,
    p: usize,
    c: usize,
}

impl ExtraSymbolEngine {
    pub fn build(table: Arc<MachineTable>, p: usize) -> Result<Self, MachineError> {
        if p == 0 {
            return Err(MachineError::ConfigInvalid("need a positive inner width".into()));
        }
        if table.space_bound() > p {
            return Err(MachineError::ConfigInvalid(format!(
                "inner machine declares {} work cells but the engine grants only {p}",
                table.space_bound()
            )));
        }
        let map = table.binary_work_map()?;
        let id = check_machine_id(&format!("extra-symbol({},p{})", table.name(), p));
        Ok(ExtraSymbolEngine {
            table,
            map,
            id,
            p,
            c: 4 * p,
        })
    }

    fn sigma(&self, cfg: &Configuration) -> u8 {
        cfg.aux_counters[AUX_SIGMA] as u8
    }

    /// Inner symbol index for a catalytic cell value in the direct route.
    fn sym_of_cell(&self, cell: u8) -> u8 {
        match cell {
            SPARE => self.map.blank,
            bit => self.map.sym_for_bit(bit),
        }
    }

    /// Catalytic cell value for an inner symbol in the direct route.
    fn cell_of_sym(&self, sym: u8) -> u8 {
        if sym == self.map.blank {
            SPARE
        } else {
            self.map.bit_for_sym(sym)
        }
    }

    /// Tape positions of the `2i`-th and `2i+1`-th cells holding `σ` or the
    /// spare symbol, counted from the left.
    fn pair_positions(&self, tape: &[u8], sigma: u8, i: usize) -> Result<(usize, usize), StepError> {
        let mut found = 0usize;
        let mut first = None;
        for (pos, &v) in tape.iter().enumerate() {
            if v == sigma || v == SPARE {
                if found == 2 * i {
                    first = Some(pos);
                } else if found == 2 * i + 1 {
                    return Ok((first.expect("first of the pair seen earlier"), pos));
                }
                found += 1;
            }
        }
        Err(StepError::InvariantViolation(format!(
            "fewer than {} majority-or-spare cells on the tape",
            2 * i + 2
        )))
    }

    /// Pair values encoding an inner symbol.
    fn encode_pair(&self, sym: u8, sigma: u8) -> (u8, u8) {
        if sym == self.map.blank {
            (SPARE, sigma)
        } else if self.map.bit_for_sym(sym) == 1 {
            (sigma, SPARE)
        } else {
            (sigma, sigma)
        }
    }

    /// Inner symbol encoded by a pair of values.
    fn decode_pair(&self, a: u8, b: u8) -> Result<u8, StepError> {
        match (a == SPARE, b == SPARE) {
            (false, false) => Ok(self.map.sym_for_bit(0)),
            (false, true) => Ok(self.map.sym_for_bit(1)),
            (true, false) => Ok(self.map.blank),
            (true, true) => Err(StepError::InvariantViolation(
                "pair of spare symbols encodes nothing".into(),
            )),
        }
    }

    /// One inner step in either simulation route.
    fn inner_step(
        &self,
        input: &[u8],
        next: &mut Configuration,
        encoded: bool,
    ) -> Result<Option<Decision>, StepError> {
        let state = next.aux_counters[AUX_STATE] as u16;
        if let Some(d) = self.table.halting(state) {
            return Ok(Some(d));
        }
        let i = next.work_head as usize;
        if encoded {
            let sigma = self.sigma(next);
            let (pa, pb) = self.pair_positions(&next.catalytic_tape, sigma, i)?;
            let sym = self.decode_pair(next.catalytic_tape[pa], next.catalytic_tape[pb])?;
            let applied = self
                .table
                .resolve(state, input, next.input_head, sym, next.work_head)?;
            let (va, vb) = self.encode_pair(applied.write, sigma);
            next.catalytic_tape[pa] = va;
            next.catalytic_tape[pb] = vb;
            next.aux_counters[AUX_STATE] = i64::from(applied.next_state);
            next.input_head = applied.input_head;
            next.work_head = applied.work_head;
            return Ok(None);
        }
        let sym = self.sym_of_cell(next.catalytic_tape[i]);
        let applied = self
            .table
            .resolve(state, input, next.input_head, sym, next.work_head)?;
        next.catalytic_tape[i] = self.cell_of_sym(applied.write);
        next.aux_counters[AUX_STATE] = i64::from(applied.next_state);
        next.input_head = applied.input_head;
        next.work_head = applied.work_head;
        Ok(None)
    }
}

impl CatalyticMachine for ExtraSymbolEngine {
    fn id(&self) -> &str {
        &self.id
    }

    fn catalytic_length(&self) -> usize {
        self.c
    }

    fn catalytic_alphabet(&self) -> &[char] {
        &['0', '1', '^']
    }

    fn phase_names(&self) -> Vec<String> {
        vec![
            "scan-spare".into(),
            "erase".into(),
            "simulate-direct".into(),
            "scan-majority".into(),
            "simulate-encoded".into(),
            "restore-replace".into(),
            "done".into(),
        ]
    }

    fn initial_configuration(
        &self,
        _input: &[u8],
        w0: &[u8],
    ) -> Result<Configuration, MachineError> {
        check_tape(w0, self.c, 3)?;
        Ok(Configuration {
            machine_id: Arc::from(self.id.as_str()),
            phase: PHASE_SCAN_SPARE,
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
        let ch = cfg.catalytic_head as usize;
        match cfg.phase {
            PHASE_SCAN_SPARE => {
                if cfg.catalytic_tape[ch] == SPARE {
                    next.phase = PHASE_ERASE;
                    next.catalytic_head = 0;
                } else if ch + 1 == self.c {
                    next.phase = PHASE_SCAN_MAJORITY;
                    next.catalytic_head = 0;
                } else {
                    next.catalytic_head += 1;
                }
            }
            PHASE_ERASE => {
                next.catalytic_tape[ch] = SPARE;
                if ch + 1 == self.c {
                    next.phase = PHASE_SIM_DIRECT;
                    next.catalytic_head = 0;
                    next.work_head = 0;
                } else {
                    next.catalytic_head += 1;
                }
            }
            PHASE_SIM_DIRECT => {
                if let Some(d) = self.inner_step(input, &mut next, false)? {
                    next.aux_counters[AUX_DEC] = decision_to_aux(d);
                    // The spare-symbol route restores nothing.
                    next.phase = PHASE_DONE;
                }
            }
            PHASE_SCAN_MAJORITY => {
                if cfg.catalytic_tape[ch] == 0 {
                    next.aux_counters[AUX_ZEROS] += 1;
                }
                if ch + 1 == self.c {
                    let zeros = next.aux_counters[AUX_ZEROS] as usize;
                    next.aux_counters[AUX_SIGMA] = i64::from(2 * zeros <= self.c);
                    next.phase = PHASE_SIM_ENCODED;
                    next.catalytic_head = 0;
                    next.work_head = 0;
                } else {
                    next.catalytic_head += 1;
                }
            }
            PHASE_SIM_ENCODED => {
                if let Some(d) = self.inner_step(input, &mut next, true)? {
                    next.aux_counters[AUX_DEC] = decision_to_aux(d);
                    next.phase = PHASE_RESTORE;
                    next.catalytic_head = 0;
                }
            }
            PHASE_RESTORE => {
                if cfg.catalytic_tape[ch] == SPARE {
                    next.catalytic_tape[ch] = self.sigma(cfg);
                }
                if ch + 1 == self.c {
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
        w.len() == self.c && w.iter().all(|&v| v <= 1)
    }

    fn restoration_set_description(&self) -> String {
        format!("every binary tape of length {} (spare-symbol tapes excluded)", self.c)
    }

    fn configuration_space_bound(&self, input_len: usize) -> BigUint {
        let phases = BigUint::from(7u32);
        let heads = BigUint::from(input_len + 2)
            * BigUint::from(self.p + 1)
            * BigUint::from(self.c + 1);
        let tape = BigUint::from(3u32).pow(self.c as u32);
        let aux = BigUint::from(self.table.state_count())
            * BigUint::from(3u32)
            * BigUint::from(2u32)
            * BigUint::from(self.c + 2);
        phases * heads * tape * aux
    }

    fn aux_state_bits(&self) -> u64 {
        bits_for(self.table.state_count() as u64)
            + bits_for(3)
            + 1
            + bits_for(self.c as u64 + 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::all_words;
    use crate::fixtures::fixture_table;
    use crate::machine::{audit_aux_state, run, DEFAULT_AUX_MULTIPLIER};
    use crate::table::StandaloneMachine;

    fn oracle(table: &Arc<MachineTable>, input: &[u8]) -> Decision {
        run(&StandaloneMachine::new(Arc::clone(table)), input, &[], 100_000, false)
            .unwrap()
            .decision
    }

    #[test]
    fn every_binary_tape_restores_and_decides_correctly() {
        let table = fixture_table("parity-mark").unwrap();
        let engine = ExtraSymbolEngine::build(Arc::clone(&table), 2).unwrap();
        audit_aux_state(&engine, DEFAULT_AUX_MULTIPLIER).unwrap();
        let input = [1u8, 1, 1];
        let want = oracle(&table, &input);
        for w in all_words(8) {
            assert!(engine.restores(&w));
            let result = run(&engine, &input, &w, 100_000, false).unwrap();
            assert_eq!(result.decision, want);
            assert_eq!(result.final_catalytic, w, "binary tape must return exactly");
        }
    }

    #[test]
    fn spare_symbol_tapes_run_direct_without_restoring() {
        let table = fixture_table("parity-mark").unwrap();
        let engine = ExtraSymbolEngine::build(Arc::clone(&table), 2).unwrap();
        let w = vec![0, 1, SPARE, 0, 1, 1, 0, 0];
        assert!(!engine.restores(&w));
        let input = [1u8];
        let result = run(&engine, &input, &w, 100_000, false).unwrap();
        assert_eq!(result.decision, oracle(&table, &input));
        // The direct route erased everything, then the inner machine left
        // its parity bit in cell 0.
        let mut expected = vec![SPARE; 8];
        expected[0] = 1;
        assert_eq!(result.final_catalytic, expected);
    }

    #[test]
    fn a_tied_majority_count_settles_on_one() {
        let table = fixture_table("parity-mark").unwrap();
        let engine = ExtraSymbolEngine::build(Arc::clone(&table), 2).unwrap();
        let w = vec![0u8, 0, 0, 0, 1, 1, 1, 1];
        let input = [1u8];
        let mut cfg = engine.initial_configuration(&input, &w).unwrap();
        while cfg.phase != PHASE_SIM_ENCODED {
            cfg = engine.step(&input, &cfg).unwrap();
        }
        assert_eq!(cfg.aux_counters[AUX_SIGMA], 1, "four zeros of eight tie to one");
    }

    #[test]
    fn inner_wider_than_a_quarter_of_the_tape_is_rejected() {
        let table = fixture_table("four-bit-counter").unwrap(); // four work cells
        assert!(matches!(
            ExtraSymbolEngine::build(table, 3),
            Err(MachineError::ConfigInvalid(_))
        ));
    }
}

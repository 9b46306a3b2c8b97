//! The counting engine for sparse restoration sets: remember *which member*
//! the tape was, not the tape itself.
//!
//! The restoration set is an explicit sorted list `A` (at most polynomially
//! many members). A tape holding a member cannot be stored verbatim in
//! logarithmic memory — but its rank in `A` can:
//!
//! 1. **count down** — walk the tape downwards as a binary number, counting
//!    the members of `A` passed on the way (the starting tape included),
//!    until the all-zero tape is reached;
//! 2. **simulate** — run the inner machine on the zeroed tape;
//! 3. **restore** — clear the inner machine's scribbles back to all-zero,
//!    then walk upwards, counting members down; the count hits zero exactly
//!    at the original member, where the walk stops.
//!
//! A non-member starting tape skips all of this: the inner machine runs in
//! place on it as free scratch and nothing is restored.
//!
//! Each walk iteration (membership test plus one tape increment or
//! decrement) is a single host-computed step; the step count is therefore
//! of the order of the tape's numeric value, which the configuration-space
//! budget accounts for.

use std::sync::Arc;

use num_bigint::BigUint;

use crate::bits::{decrement, increment};
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
const AUX_COUNT: usize = 2;
const AUX_MEMBER: usize = 3;

const PHASE_MEMBERSHIP: u16 = 0;
const PHASE_COUNT_DOWN: u16 = 1;
const PHASE_SIMULATE: u16 = 2;
const PHASE_CLEAR: u16 = 3;
const PHASE_COUNT_UP: u16 = 4;
const PHASE_DONE: u16 = 5;

pub struct SparseEngine {
    host: HostedTable,
    id: String,
    c: usize,
    members: Vec<Vec<u8>>,
    set: CatalyticSet,
}

impl SparseEngine {
    /// `set` must be the sorted family; the member count is capped at
    /// `max_members` (default `c²`) to keep the rank counter logarithmic.
    pub fn build(
        table: Arc<MachineTable>,
        set: CatalyticSet,
        max_members: Option<usize>,
    ) -> Result<Self, MachineError> {
        let c = set.len_bits();
        let members = set
            .sorted_members()
            .ok_or_else(|| {
                MachineError::ConfigInvalid(
                    "the counting engine needs the sorted-words set family".into(),
                )
            })?
            .to_vec();
        let cap = max_members.unwrap_or(c * c);
        if members.len() > cap {
            return Err(MachineError::ConfigInvalid(format!(
                "{} members exceed the sparseness cap of {cap}",
                members.len()
            )));
        }
        let host = HostedTable::new(table, c)?;
        let id = check_machine_id(&format!(
            "sparse({},c{},members{})",
            host.table.name(),
            c,
            members.len()
        ));
        Ok(SparseEngine {
            host,
            id,
            c,
            members,
            set,
        })
    }

    fn is_member(&self, tape: &[u8]) -> bool {
        self.members
            .binary_search_by(|m| m.as_slice().cmp(tape))
            .is_ok()
    }
}

impl CatalyticMachine for SparseEngine {
    fn id(&self) -> &str {
        &self.id
    }

    fn catalytic_length(&self) -> usize {
        self.c
    }

    fn catalytic_alphabet(&self) -> &[char] {
        &['0', '1']
    }

    fn phase_names(&self) -> Vec<String> {
        vec![
            "scan-membership".into(),
            "count-down".into(),
            "simulate".into(),
            "restore-clear".into(),
            "restore-count-up".into(),
            "done".into(),
        ]
    }

    fn initial_configuration(
        &self,
        _input: &[u8],
        w0: &[u8],
    ) -> Result<Configuration, MachineError> {
        check_tape(w0, self.c, 2)?;
        Ok(Configuration {
            machine_id: Arc::from(self.id.as_str()),
            phase: PHASE_MEMBERSHIP,
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
            PHASE_MEMBERSHIP => {
                // One step: membership of the starting tape decides the route.
                if self.is_member(&cfg.catalytic_tape) {
                    next.aux_counters[AUX_MEMBER] = 1;
                    next.phase = PHASE_COUNT_DOWN;
                } else {
                    // Run the inner machine in place on the non-member tape.
                    next.phase = PHASE_SIMULATE;
                }
            }
            PHASE_COUNT_DOWN => {
                // One loop iteration per step: count a member, then move the
                // tape one downwards (or leave the loop at zero).
                if self.is_member(&next.catalytic_tape) {
                    next.aux_counters[AUX_COUNT] += 1;
                }
                if !decrement(&mut next.catalytic_tape) {
                    next.phase = PHASE_SIMULATE;
                }
            }
            PHASE_SIMULATE => match self.host.inner_step(input, &mut next, AUX_STATE, 0)? {
                InnerOutcome::Stepped => {}
                InnerOutcome::Halted(d) => {
                    next.aux_counters[AUX_DEC] = decision_to_aux(d);
                    if cfg.aux_counters[AUX_MEMBER] == 1 {
                        next.phase = PHASE_CLEAR;
                        next.catalytic_head = 0;
                    } else {
                        // Non-member route: the tape stays as the inner
                        // machine left it.
                        next.phase = PHASE_DONE;
                    }
                }
            },
            PHASE_CLEAR => {
                // Re-establish the all-zero tape the upward walk starts from.
                let ch = cfg.catalytic_head as usize;
                next.catalytic_tape[ch] = 0;
                if ch + 1 == self.c {
                    next.phase = PHASE_COUNT_UP;
                } else {
                    next.catalytic_head += 1;
                }
            }
            PHASE_COUNT_UP => {
                if self.is_member(&next.catalytic_tape) {
                    next.aux_counters[AUX_COUNT] -= 1;
                    if next.aux_counters[AUX_COUNT] == 0 {
                        // This member is the starting tape: stop on it.
                        next.phase = PHASE_DONE;
                        return Ok(next);
                    }
                }
                if !increment(&mut next.catalytic_tape) {
                    return Err(StepError::InvariantViolation(
                        "upward walk ran past the all-ones tape".into(),
                    ));
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
        w.len() == self.c && w.iter().all(|&b| b <= 1) && self.is_member(w)
    }

    fn restoration_set_description(&self) -> String {
        self.set.describe()
    }

    fn configuration_space_bound(&self, input_len: usize) -> BigUint {
        let phases = BigUint::from(6u32);
        let heads = BigUint::from(input_len + 2)
            * BigUint::from(self.c + 1)
            * BigUint::from(self.c + 1);
        let tape = BigUint::from(2u32).pow(self.c as u32);
        let aux = BigUint::from(self.host.state_count())
            * BigUint::from(3u32)
            * BigUint::from(self.members.len() + 1)
            * BigUint::from(2u32);
        phases * heads * tape * aux
    }

    fn aux_state_bits(&self) -> u64 {
        bits_for(self.host.state_count() as u64)
            + bits_for(3)
            + bits_for(self.members.len() as u64 + 1)
            + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{all_words, parse_word};
    use crate::fixtures::fixture_table;
    use crate::machine::{audit_aux_state, default_budget, run, DEFAULT_AUX_MULTIPLIER};
    use crate::table::StandaloneMachine;

    fn five_member_set() -> CatalyticSet {
        let members = ["00000011", "00010101", "01000000", "10000001", "11110000"]
            .iter()
            .map(|s| parse_word(s).unwrap())
            .collect();
        CatalyticSet::sorted_words(8, members).unwrap()
    }

    fn oracle(table: &Arc<MachineTable>, input: &[u8]) -> Decision {
        run(&StandaloneMachine::new(Arc::clone(table)), input, &[], 100_000, false)
            .unwrap()
            .decision
    }

    #[test]
    fn members_walk_back_exactly_and_all_decisions_match() {
        let table = fixture_table("parity-mark").unwrap();
        let engine = SparseEngine::build(Arc::clone(&table), five_member_set(), None).unwrap();
        audit_aux_state(&engine, DEFAULT_AUX_MULTIPLIER).unwrap();
        let input = [1u8, 0, 0];
        let want = oracle(&table, &input);
        let budget = default_budget(&engine, input.len());
        let mut member_count = 0;
        for w in all_words(8) {
            let result = run(&engine, &input, &w, budget, false).unwrap();
            assert_eq!(result.decision, want);
            if engine.restores(&w) {
                member_count += 1;
                assert_eq!(result.final_catalytic, w, "member must walk back exactly");
            }
        }
        assert_eq!(member_count, 5);
    }

    #[test]
    fn non_members_serve_as_scratch_in_place() {
        let table = fixture_table("parity-mark").unwrap();
        let engine = SparseEngine::build(Arc::clone(&table), five_member_set(), None).unwrap();
        let w = parse_word("00000001").unwrap();
        assert!(!engine.restores(&w));
        // Odd input parity lands a 1 in cell 0; the rest of the tape stays.
        let result = run(&engine, &[1, 0, 0], &w, 100_000, false).unwrap();
        assert_eq!(result.final_catalytic, parse_word("10000001").unwrap());
    }

    #[test]
    fn member_cap_rejects_dense_families() {
        let words: Vec<Vec<u8>> = all_words(8).take(70).collect();
        let set = CatalyticSet::sorted_words(8, words).unwrap();
        let table = fixture_table("accept-all").unwrap();
        assert!(matches!(
            SparseEngine::build(table, set, None),
            Err(MachineError::ConfigInvalid(_))
        ));
    }

    #[test]
    fn only_sorted_families_are_accepted() {
        let table = fixture_table("accept-all").unwrap();
        let set = CatalyticSet::parity_even(8);
        assert!(matches!(
            SparseEngine::build(table, set, None),
            Err(MachineError::ConfigInvalid(_))
        ));
    }
}

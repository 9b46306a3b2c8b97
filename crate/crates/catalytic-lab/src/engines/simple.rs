//! The overwrite engine: restore by writing a known constant back.
//!
//! Two instantiations share the machinery:
//!
//! * **tally** — the restoration set is the single all-ones tape. The inner
//!   machine gets the whole tape as scratch; afterwards every cell is
//!   overwritten with `1`.
//! * **prefix-zero** — the restoration set is "first `p` cells are zero".
//!   The inner machine is confined to those `p` cells; afterwards they are
//!   overwritten with `0` and the untouched suffix still carries whatever
//!   it held.
//!
//! Decisions are correct for every starting tape because the inner machine's
//! verdict never depends on its scratch content (a property the fixture
//! tables are linted for).

use std::sync::Arc;

use num_bigint::BigUint;

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

const PHASE_SIMULATE: u16 = 0;
const PHASE_RESTORE: u16 = 1;
const PHASE_DONE: u16 = 2;

pub struct OverwriteEngine {
    host: HostedTable,
    id: String,
    c: usize,
    /// Cells `0..window_len` are scratch for the inner machine and get
    /// overwritten during restoration.
    window_len: usize,
    fill: u8,
    set: CatalyticSet,
}

/// Inner machine over the whole tape; restores the all-ones tape.
pub fn build_tally(table: Arc<MachineTable>, c: usize) -> Result<OverwriteEngine, MachineError> {
    if c == 0 {
        return Err(MachineError::ConfigInvalid("tape length must be positive".into()));
    }
    let host = HostedTable::new(table, c)?;
    let id = check_machine_id(&format!("tally({},c{})", host.table.name(), c));
    Ok(OverwriteEngine {
        host,
        id,
        c,
        window_len: c,
        fill: 1,
        set: CatalyticSet::AllOnes { len: c },
    })
}

/// Inner machine over the first `prefix_len` cells; restores them to zero.
pub fn build_prefix_zero(
    table: Arc<MachineTable>,
    c: usize,
    prefix_len: usize,
) -> Result<OverwriteEngine, MachineError> {
    if prefix_len == 0 || prefix_len > c {
        return Err(MachineError::ConfigInvalid(format!(
            "prefix length {prefix_len} must lie in 1..={c}"
        )));
    }
    let host = HostedTable::new(table, prefix_len)?;
    let id = check_machine_id(&format!(
        "prefix-zero({},c{},p{})",
        host.table.name(),
        c,
        prefix_len
    ));
    Ok(OverwriteEngine {
        host,
        id,
        c,
        window_len: prefix_len,
        fill: 0,
        set: CatalyticSet::PrefixZero { len: c, prefix_len },
    })
}

impl CatalyticMachine for OverwriteEngine {
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
        vec!["simulate".into(), "restore-overwrite".into(), "done".into()]
    }

    fn initial_configuration(
        &self,
        _input: &[u8],
        w0: &[u8],
    ) -> Result<Configuration, MachineError> {
        check_tape(w0, self.c, 2)?;
        Ok(Configuration {
            machine_id: Arc::from(self.id.as_str()),
            phase: PHASE_SIMULATE,
            input_head: 0,
            work_head: 0,
            catalytic_head: 0,
            work_tape: Vec::new(),
            catalytic_tape: w0.to_vec(),
            aux_counters: vec![0, DEC_NONE],
        })
    }

    fn step(&self, input: &[u8], cfg: &Configuration) -> Result<Configuration, StepError> {
        let mut next = cfg.clone();
        match cfg.phase {
            PHASE_SIMULATE => {
                match self.host.inner_step(input, &mut next, AUX_STATE, 0)? {
                    InnerOutcome::Stepped => {}
                    InnerOutcome::Halted(d) => {
                        next.aux_counters[AUX_DEC] = decision_to_aux(d);
                        next.phase = PHASE_RESTORE;
                        next.catalytic_head = 0;
                    }
                }
            }
            PHASE_RESTORE => {
                let ch = cfg.catalytic_head as usize;
                next.catalytic_tape[ch] = self.fill;
                if ch + 1 == self.window_len {
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
        w.len() == self.c && w.iter().all(|&b| b <= 1) && self.set.contains(w)
    }

    fn restoration_set_description(&self) -> String {
        self.set.describe()
    }

    fn configuration_space_bound(&self, input_len: usize) -> BigUint {
        let phases = BigUint::from(3u32);
        let heads = BigUint::from(input_len + 2)
            * BigUint::from(self.window_len + 1)
            * BigUint::from(self.c + 1);
        let tape = BigUint::from(2u32).pow(self.c as u32);
        let aux = BigUint::from(self.host.state_count()) * BigUint::from(3u32);
        phases * heads * tape * aux
    }

    fn aux_state_bits(&self) -> u64 {
        bits_for(self.host.state_count() as u64) + bits_for(3)
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
    fn tally_restores_the_all_ones_tape_and_matches_the_oracle() {
        let table = fixture_table("parity-mark").unwrap();
        let engine = build_tally(Arc::clone(&table), 6).unwrap();
        audit_aux_state(&engine, DEFAULT_AUX_MULTIPLIER).unwrap();
        let input = [1u8, 1, 0];
        let want = oracle(&table, &input);
        for w in all_words(6) {
            let result = run(&engine, &input, &w, 100_000, false).unwrap();
            assert_eq!(result.decision, want);
            // The restore sweep overwrites every cell, so every run ends on
            // the all-ones tape; only the all-ones start is thereby restored.
            assert_eq!(result.final_catalytic, vec![1; 6]);
            assert_eq!(engine.restores(&w), w == vec![1; 6]);
        }
    }

    #[test]
    fn prefix_zero_confines_scratch_to_the_prefix() {
        let table = fixture_table("ones-at-least-2").unwrap();
        let engine = build_prefix_zero(Arc::clone(&table), 8, 3).unwrap();
        audit_aux_state(&engine, DEFAULT_AUX_MULTIPLIER).unwrap();
        let input = [1u8, 0, 1];
        let want = oracle(&table, &input);
        for w in all_words(8) {
            let result = run(&engine, &input, &w, 100_000, false).unwrap();
            assert_eq!(result.decision, want);
            assert_eq!(&result.final_catalytic[3..], &w[3..], "suffix is never touched");
            assert_eq!(&result.final_catalytic[..3], &[0, 0, 0]);
            assert_eq!(engine.restores(&w), w[..3] == [0, 0, 0]);
        }
    }

    #[test]
    fn phase_names_tag_simulation_and_restoration() {
        let engine = build_tally(fixture_table("accept-all").unwrap(), 4).unwrap();
        let names = engine.phase_names();
        assert!(names.iter().any(|n| n.contains("simulate")));
        assert!(names.iter().any(|n| n.contains("restore")));
    }
}

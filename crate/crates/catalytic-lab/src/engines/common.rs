//! Shared plumbing for engines that host a table-driven inner machine on a
//! window of the catalytic tape.

use std::sync::Arc;

use crate::machine::{Configuration, Decision, MachineError, StepError};
use crate::table::{BinaryWorkMap, MachineTable};

/// Auxiliary-slot encoding of a not-yet-made decision.
pub(crate) const DEC_NONE: i64 = 0;

pub(crate) fn decision_to_aux(d: Decision) -> i64 {
    match d {
        Decision::Accept => 1,
        Decision::Reject => 2,
    }
}

pub(crate) fn decision_from_aux(v: i64) -> Option<Decision> {
    match v {
        1 => Some(Decision::Accept),
        2 => Some(Decision::Reject),
        _ => None,
    }
}

/// Bits needed to store one of `card` values.
pub(crate) fn bits_for(card: u64) -> u64 {
    if card <= 1 {
        0
    } else {
        64 - (card - 1).leading_zeros() as u64
    }
}

/// Validates an initial catalytic tape against length and alphabet size.
pub(crate) fn check_tape(w0: &[u8], len: usize, alphabet: usize) -> Result<(), MachineError> {
    if w0.len() != len {
        return Err(MachineError::CatalyticLengthMismatch {
            got: w0.len(),
            want: len,
        });
    }
    if let Some(&bad) = w0.iter().find(|&&s| s as usize >= alphabet) {
        return Err(MachineError::BadSymbol(bad));
    }
    Ok(())
}

/// An inner machine table hosted on binary catalytic cells: `'0'`/`'1'` map
/// to the cell bits and writes of the blank are stored as zero.
pub(crate) struct HostedTable {
    pub table: Arc<MachineTable>,
    pub map: BinaryWorkMap,
}

/// What one hosted step did.
pub(crate) enum InnerOutcome {
    /// Applied a transition.
    Stepped,
    /// The inner control state is halting: nothing was applied, the engine
    /// should record the decision and leave the simulation phase.
    Halted(Decision),
}

impl HostedTable {
    /// Checks the inner machine fits in a window of `window_len` binary cells.
    pub fn new(table: Arc<MachineTable>, window_len: usize) -> Result<Self, MachineError> {
        if table.space_bound() > window_len {
            return Err(MachineError::ConfigInvalid(format!(
                "inner machine declares {} work cells but the engine grants only {window_len}",
                table.space_bound()
            )));
        }
        let map = table.binary_work_map()?;
        Ok(HostedTable { table, map })
    }

    /// Runs one inner step in place. The inner machine's control state lives
    /// in `cfg.aux_counters[state_slot]`, its input head in `cfg.input_head`,
    /// and its work head in `cfg.work_head`, relative to the window starting
    /// at catalytic cell `window_start`.
    pub fn inner_step(
        &self,
        input: &[u8],
        cfg: &mut Configuration,
        state_slot: usize,
        window_start: usize,
    ) -> Result<InnerOutcome, StepError> {
        let state = cfg.aux_counters[state_slot] as u16;
        if let Some(d) = self.table.halting(state) {
            return Ok(InnerOutcome::Halted(d));
        }
        let cell = window_start + cfg.work_head as usize;
        let work_sym = self.map.sym_for_bit(cfg.catalytic_tape[cell]);
        let applied = self
            .table
            .resolve(state, input, cfg.input_head, work_sym, cfg.work_head)?;
        cfg.catalytic_tape[cell] = self.map.bit_for_sym(applied.write);
        cfg.aux_counters[state_slot] = i64::from(applied.next_state);
        cfg.input_head = applied.input_head;
        cfg.work_head = applied.work_head;
        Ok(InnerOutcome::Stepped)
    }

    pub fn state_count(&self) -> usize {
        self.table.state_count()
    }
}

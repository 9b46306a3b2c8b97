//! Core machine model: configurations, decisions, the machine trait, and the
//! deterministic run loop.
//!
//! Every machine in this crate — table-driven inner machines as well as the
//! native restoration engines — exposes the same small-step interface: an
//! initial configuration, a pure `step` function from configuration to
//! configuration, and a halting predicate. A configuration is a complete
//! snapshot of machine state; nothing is hidden on the host side, so a run is
//! fully determined by `(input, w0)` and configuration traces from different
//! starting tapes can be compared cell-for-cell.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Accept/reject verdict of a halted machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Accept,
    Reject,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decision::Accept => write!(f, "accept"),
            Decision::Reject => write!(f, "reject"),
        }
    }
}

/// A complete snapshot of a running machine.
///
/// `phase` is an index into the machine's phase-name table: the control state
/// for table machines, or the algorithm phase for native engines. Native
/// engines keep their bounded bookkeeping (loop counters, stored indices,
/// the simulated inner machine's control state) in `aux_counters`; the
/// construction-time audit in [`audit_aux_state`] keeps that bookkeeping
/// logarithmic in the catalytic length.
///
/// Tapes store symbol indices into the owning machine's alphabets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub machine_id: Arc<str>,
    pub phase: u16,
    pub input_head: u32,
    pub work_head: u32,
    pub catalytic_head: u32,
    pub work_tape: Vec<u8>,
    pub catalytic_tape: Vec<u8>,
    pub aux_counters: Vec<i64>,
}

impl Configuration {
    /// Canonical textual serialization: two configurations serialize equal
    /// iff all fields are equal. Field order is fixed; tapes render their
    /// symbol indices as single digits; the separators cannot occur inside
    /// machine identifiers (enforced at machine construction).
    pub fn canonical_string(&self) -> String {
        let tape_digits = |t: &[u8]| -> String {
            t.iter()
                .map(|&s| char::from_digit(u32::from(s), 10).expect("symbol index < 10"))
                .collect()
        };
        let aux = self
            .aux_counters
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "m={};p={};ih={};wh={};ch={};wt={};ct={};aux={}",
            self.machine_id,
            self.phase,
            self.input_head,
            self.work_head,
            self.catalytic_head,
            tape_digits(&self.work_tape),
            tape_digits(&self.catalytic_tape),
            aux
        )
    }
}

/// Result of running a machine to halt.
#[derive(Debug, Clone, Serialize)]
pub struct RunResult {
    pub decision: Decision,
    /// Number of applied steps (the trace, when recorded, has `steps + 1` entries).
    pub steps: u64,
    /// Final catalytic tape content, as symbol indices.
    pub final_catalytic: Vec<u8>,
    /// Canonical serializations of every visited configuration, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<String>>,
}

/// Errors surfaced by a single `step`.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StepError {
    #[error("step applied to a halted configuration")]
    AlreadyHalted,
    #[error("work head moved to cell {position}, beyond the space bound {bound}")]
    WorkSpaceExceeded { position: i64, bound: usize },
    #[error("no transition for state {state:?} reading input {input_symbol:?}, work {work_symbol:?}")]
    UndefinedTransition {
        state: String,
        input_symbol: char,
        work_symbol: char,
    },
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

/// Errors surfaced when building machines or preparing runs.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MachineError {
    #[error("initial catalytic tape has length {got}, machine expects {want}")]
    CatalyticLengthMismatch { got: usize, want: usize },
    #[error("symbol index {0} is not valid for this machine's catalytic alphabet")]
    BadSymbol(u8),
    #[error("engine configuration rejected: {0}")]
    ConfigInvalid(String),
    #[error("auxiliary state needs {bits} bits, exceeding the budget of {budget} bits")]
    AuxStateTooLarge { bits: u64, budget: u64 },
    #[error("instance too large: {0}")]
    TooLarge(String),
}

/// Errors surfaced by a full run.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RunError {
    #[error(transparent)]
    Step(#[from] StepError),
    #[error("machine exceeded the step budget of {budget}")]
    BudgetExceeded { budget: u64 },
    #[error(transparent)]
    Machine(#[from] MachineError),
}

/// Common interface of table machines and native restoration engines.
///
/// `step` must be a pure function of `(input, configuration)`: identical
/// calls yield identical successors, across processes. Head conventions are
/// fixed crate-wide: all heads start at cell 0; moving a head left of cell 0
/// leaves it at cell 0; moving the input head past the end of the input
/// parks it on a virtual end-marker cell; moving the work head past the
/// machine's space bound is a hard [`StepError::WorkSpaceExceeded`].
pub trait CatalyticMachine: Send + Sync {
    /// Stable identifier; appears in every configuration serialization.
    fn id(&self) -> &str;

    /// Length of the catalytic tape this machine runs on.
    fn catalytic_length(&self) -> usize;

    /// Catalytic tape alphabet, as display characters (index = symbol value).
    fn catalytic_alphabet(&self) -> &[char];

    /// Phase names, indexed by `Configuration::phase`.
    fn phase_names(&self) -> Vec<String>;

    /// Builds the starting configuration for `input` and initial tape `w0`.
    fn initial_configuration(
        &self,
        input: &[u8],
        w0: &[u8],
    ) -> Result<Configuration, MachineError>;

    /// Applies one deterministic step.
    fn step(&self, input: &[u8], cfg: &Configuration) -> Result<Configuration, StepError>;

    /// `Some(decision)` iff the configuration is halted.
    fn decision(&self, cfg: &Configuration) -> Option<Decision>;

    /// Membership test of the machine's declared restoration set.
    fn restores(&self, w: &[u8]) -> bool;

    /// Human-readable description of the restoration set.
    fn restoration_set_description(&self) -> String;

    /// Upper bound on the number of distinct configurations reachable on any
    /// input of the given length. Used for the disjointness-sum inequality
    /// and the default step budget.
    fn configuration_space_bound(&self, input_len: usize) -> BigUint;

    /// Total bit-size of the bounded auxiliary state (aux counters plus any
    /// embedded inner control state), for the logarithmic-space audit.
    fn aux_state_bits(&self) -> u64;
}

/// Default budget: ten times the configuration-space bound, saturated to `u64`.
pub fn default_budget(machine: &dyn CatalyticMachine, input_len: usize) -> u64 {
    let bound = machine.configuration_space_bound(input_len) * 10u32;
    u64::try_from(&bound).unwrap_or(u64::MAX)
}

/// Default multiplier for [`audit_aux_state`].
pub const DEFAULT_AUX_MULTIPLIER: u64 = 16;

/// Checks that the machine's auxiliary state stays within
/// `multiplier * log2(catalytic_length)` bits (minimum 1 "log" for tiny tapes).
pub fn audit_aux_state(
    machine: &dyn CatalyticMachine,
    multiplier: u64,
) -> Result<(), MachineError> {
    let c = machine.catalytic_length().max(2) as u64;
    let log = 64 - (c - 1).leading_zeros() as u64; // ceil(log2 c)
    let budget = multiplier * log.max(1);
    let bits = machine.aux_state_bits();
    if bits > budget {
        return Err(MachineError::AuxStateTooLarge { bits, budget });
    }
    Ok(())
}

/// Runs the machine to halt, enforcing the step budget.
pub fn run(
    machine: &dyn CatalyticMachine,
    input: &[u8],
    w0: &[u8],
    budget: u64,
    record_trace: bool,
) -> Result<RunResult, RunError> {
    let mut cfg = machine.initial_configuration(input, w0)?;
    let mut trace = if record_trace {
        Some(vec![cfg.canonical_string()])
    } else {
        None
    };
    let mut steps: u64 = 0;
    loop {
        if let Some(decision) = machine.decision(&cfg) {
            return Ok(RunResult {
                decision,
                steps,
                final_catalytic: cfg.catalytic_tape,
                trace,
            });
        }
        if steps >= budget {
            return Err(RunError::BudgetExceeded { budget });
        }
        cfg = machine.step(input, &cfg)?;
        steps += 1;
        if let Some(t) = trace.as_mut() {
            t.push(cfg.canonical_string());
        }
    }
}

/// Clamps `pos + delta` at 0 on the left (the crate-wide head convention)
/// and at `max` on the right, returning the new position.
pub(crate) fn move_clamped(pos: u32, delta: i8, max: u32) -> u32 {
    let next = i64::from(pos) + i64::from(delta);
    next.clamp(0, i64::from(max)) as u32
}

/// Moves the work head, erroring instead of clamping on the right edge.
pub(crate) fn move_work(pos: u32, delta: i8, bound: usize) -> Result<u32, StepError> {
    let next = i64::from(pos) + i64::from(delta);
    if next >= bound as i64 && delta > 0 {
        return Err(StepError::WorkSpaceExceeded {
            position: next,
            bound,
        });
    }
    Ok(next.max(0) as u32)
}

pub(crate) fn check_machine_id(id: &str) -> String {
    assert!(
        !id.contains(';') && !id.contains('\n') && !id.contains('='),
        "machine id {id:?} must not contain ';', '=' or newlines"
    );
    id.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_cfg() -> Configuration {
        Configuration {
            machine_id: Arc::from("test"),
            phase: 3,
            input_head: 1,
            work_head: 2,
            catalytic_head: 0,
            work_tape: vec![0, 1, 2],
            catalytic_tape: vec![1, 0, 1, 1],
            aux_counters: vec![7, -1],
        }
    }

    #[test]
    fn canonical_string_reflects_every_field() {
        let base = sample_cfg();
        let mut variants: Vec<Configuration> = Vec::new();
        let mut v = base.clone();
        v.phase = 4;
        variants.push(v);
        let mut v = base.clone();
        v.input_head = 2;
        variants.push(v);
        let mut v = base.clone();
        v.work_head = 1;
        variants.push(v);
        let mut v = base.clone();
        v.catalytic_head = 3;
        variants.push(v);
        let mut v = base.clone();
        v.work_tape[0] = 1;
        variants.push(v);
        let mut v = base.clone();
        v.catalytic_tape[3] = 0;
        variants.push(v);
        let mut v = base.clone();
        v.aux_counters[1] = 0;
        variants.push(v);

        let s = base.canonical_string();
        assert_eq!(s, base.clone().canonical_string());
        for variant in variants {
            assert_ne!(s, variant.canonical_string());
        }
    }

    #[test]
    fn head_moves_clamp_left_and_error_right() {
        assert_eq!(move_clamped(0, -1, 5), 0);
        assert_eq!(move_clamped(5, 1, 5), 5);
        assert_eq!(move_clamped(2, 1, 5), 3);
        assert_eq!(move_work(0, -1, 4).unwrap(), 0);
        assert_eq!(move_work(2, 1, 4).unwrap(), 3);
        assert!(matches!(
            move_work(3, 1, 4),
            Err(StepError::WorkSpaceExceeded { position: 4, bound: 4 })
        ));
    }
}

//! Conjugating a machine by a tape involution: run `σ`, the inner machine,
//! then `σ` again.
//!
//! If the inner machine restores every tape in some family `A`, the wrapped
//! machine restores every tape in `B` whenever `σ(B) ⊆ A`: applying the
//! involution carries `w ∈ B` into the inner machine's comfort zone, the
//! inner run returns the masked tape intact, and the closing involution
//! carries it back. Decisions are inherited from the inner machine — still
//! correct on every tape, because the inner machine's verdict never depended
//! on its starting tape.
//!
//! Here `σ` is XOR with a fixed binary mask (every such map is its own
//! inverse). The wrapper checks `σ(B) ⊆ A` exhaustively at construction
//! time, so a wrapped machine that builds at all is sound by audit, not by
//! trust.
//!
//! Wrapper configurations embed inner configurations verbatim: the inner
//! machine's phase is shifted past the wrapper's opening phases and its
//! bookkeeping rides behind two wrapper counters, so traces of the wrapped
//! machine display the inner machine's progress un-obscured.

use std::sync::Arc;

use num_bigint::BigUint;

use crate::bits::{format_word, xor};
use crate::engines::common::{decision_from_aux, decision_to_aux, DEC_NONE};
use crate::machine::{
    check_machine_id, CatalyticMachine, Configuration, Decision, MachineError, StepError,
};
use crate::setlang::CatalyticSet;

/// Longest tape for which the construction-time `σ(B) ⊆ A` audit (an
/// enumeration of `B`) is attempted.
pub const MAX_AUDIT_LENGTH: usize = 20;

const AUX_MEMBER: usize = 0;
const AUX_DEC: usize = 1;

const PHASE_CHECK: u16 = 0;
const PHASE_APPLY: u16 = 1;
const EMBED_BASE: u16 = 2;

pub struct InvolutionEngine {
    inner: Arc<dyn CatalyticMachine>,
    inner_id: Arc<str>,
    inner_phases: u16,
    mask: Vec<u8>,
    set: CatalyticSet,
    id: String,
    c: usize,
}

/// The mask flipping exactly the first tape cell.
pub fn flip_first_bit_mask(len: usize) -> Vec<u8> {
    let mut mask = vec![0u8; len];
    if len > 0 {
        mask[0] = 1;
    }
    mask
}

impl InvolutionEngine {
    /// Wraps `inner`, declaring restoration on `set`. Fails unless the inner
    /// machine is binary, lengths agree, and — checked word by word — the
    /// masked image of `set` lies inside the inner machine's restoration set.
    pub fn build(
        inner: Arc<dyn CatalyticMachine>,
        mask: Vec<u8>,
        set: CatalyticSet,
    ) -> Result<Self, MachineError> {
        let c = inner.catalytic_length();
        if inner.catalytic_alphabet() != ['0', '1'] {
            return Err(MachineError::ConfigInvalid(
                "involution wrapping needs a binary inner machine".into(),
            ));
        }
        if mask.len() != c {
            return Err(MachineError::CatalyticLengthMismatch {
                got: mask.len(),
                want: c,
            });
        }
        if mask.iter().any(|&b| b > 1) {
            return Err(MachineError::ConfigInvalid("mask must be binary".into()));
        }
        if set.len_bits() != c {
            return Err(MachineError::ConfigInvalid(format!(
                "restoration set is over {}-bit tapes, machine tape has {c} cells",
                set.len_bits()
            )));
        }
        if c > MAX_AUDIT_LENGTH {
            return Err(MachineError::ConfigInvalid(format!(
                "tape length {c} exceeds the audit cap of {MAX_AUDIT_LENGTH}"
            )));
        }
        let members = set.enumerate().map_err(|e| {
            MachineError::ConfigInvalid(format!("cannot enumerate the restoration set: {e}"))
        })?;
        for w in &members {
            let image = xor(w, &mask);
            if !inner.restores(&image) {
                return Err(MachineError::ConfigInvalid(format!(
                    "masked image {} of member {} escapes the inner restoration set",
                    format_word(&image),
                    format_word(w)
                )));
            }
        }
        let id = check_machine_id(&format!(
            "involution({},m{})",
            inner.id(),
            format_word(&mask)
        ));
        let inner_id: Arc<str> = Arc::from(inner.id());
        let inner_phases = inner.phase_names().len() as u16;
        Ok(InvolutionEngine {
            inner,
            inner_id,
            inner_phases,
            mask,
            set,
            id,
            c,
        })
    }

    fn phase_restore(&self) -> u16 {
        EMBED_BASE + self.inner_phases
    }

    fn phase_done(&self) -> u16 {
        EMBED_BASE + self.inner_phases + 1
    }

    /// Inner view of an embedded wrapper configuration.
    fn extract_inner(&self, cfg: &Configuration) -> Configuration {
        Configuration {
            machine_id: Arc::clone(&self.inner_id),
            phase: cfg.phase - EMBED_BASE,
            input_head: cfg.input_head,
            work_head: cfg.work_head,
            catalytic_head: cfg.catalytic_head,
            work_tape: cfg.work_tape.clone(),
            catalytic_tape: cfg.catalytic_tape.clone(),
            aux_counters: cfg.aux_counters[2..].to_vec(),
        }
    }

    /// Wraps an inner configuration back into the embedding.
    fn embed_inner(&self, wrapper: &Configuration, inner: Configuration) -> Configuration {
        let mut aux = Vec::with_capacity(2 + inner.aux_counters.len());
        aux.push(wrapper.aux_counters[AUX_MEMBER]);
        aux.push(wrapper.aux_counters[AUX_DEC]);
        aux.extend_from_slice(&inner.aux_counters);
        Configuration {
            machine_id: Arc::from(self.id.as_str()),
            phase: EMBED_BASE + inner.phase,
            input_head: inner.input_head,
            work_head: inner.work_head,
            catalytic_head: inner.catalytic_head,
            work_tape: inner.work_tape,
            catalytic_tape: inner.catalytic_tape,
            aux_counters: aux,
        }
    }

    /// Leaves the embedding for the closing involution sweep.
    fn exit_to_restore(&self, cfg: &Configuration, d: Decision) -> Configuration {
        Configuration {
            machine_id: Arc::from(self.id.as_str()),
            phase: self.phase_restore(),
            input_head: cfg.input_head,
            work_head: 0,
            catalytic_head: 0,
            work_tape: Vec::new(),
            catalytic_tape: cfg.catalytic_tape.clone(),
            aux_counters: vec![cfg.aux_counters[AUX_MEMBER], decision_to_aux(d)],
        }
    }
}

impl CatalyticMachine for InvolutionEngine {
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
        let mut names = vec!["check-membership".to_string(), "apply-involution".to_string()];
        names.extend(
            self.inner
                .phase_names()
                .into_iter()
                .map(|n| format!("inner:{n}")),
        );
        names.push("restore-involution".to_string());
        names.push("done".to_string());
        names
    }

    fn initial_configuration(
        &self,
        _input: &[u8],
        w0: &[u8],
    ) -> Result<Configuration, MachineError> {
        if w0.len() != self.c {
            return Err(MachineError::CatalyticLengthMismatch {
                got: w0.len(),
                want: self.c,
            });
        }
        if let Some(&bad) = w0.iter().find(|&&v| v > 1) {
            return Err(MachineError::BadSymbol(bad));
        }
        Ok(Configuration {
            machine_id: Arc::from(self.id.as_str()),
            phase: PHASE_CHECK,
            input_head: 0,
            work_head: 0,
            catalytic_head: 0,
            work_tape: Vec::new(),
            catalytic_tape: w0.to_vec(),
            aux_counters: vec![0, DEC_NONE],
        })
    }

    fn step(&self, input: &[u8], cfg: &Configuration) -> Result<Configuration, StepError> {
        if cfg.phase == PHASE_CHECK {
            let mut next = cfg.clone();
            next.aux_counters[AUX_MEMBER] = i64::from(self.set.contains(&cfg.catalytic_tape));
            next.phase = PHASE_APPLY;
            next.catalytic_head = 0;
            return Ok(next);
        }
        if cfg.phase == PHASE_APPLY {
            let mut next = cfg.clone();
            let ch = cfg.catalytic_head as usize;
            next.catalytic_tape[ch] ^= self.mask[ch];
            if ch + 1 == self.c {
                let inner_init = self
                    .inner
                    .initial_configuration(input, &next.catalytic_tape)
                    .map_err(|e| {
                        StepError::InvariantViolation(format!(
                            "inner machine rejected the masked tape: {e}"
                        ))
                    })?;
                return Ok(self.embed_inner(&next, inner_init));
            }
            next.catalytic_head += 1;
            return Ok(next);
        }
        if cfg.phase >= EMBED_BASE && cfg.phase < self.phase_restore() {
            let inner_cfg = self.extract_inner(cfg);
            if let Some(d) = self.inner.decision(&inner_cfg) {
                return Ok(self.exit_to_restore(cfg, d));
            }
            let inner_next = self.inner.step(input, &inner_cfg)?;
            return Ok(self.embed_inner(cfg, inner_next));
        }
        if cfg.phase == self.phase_restore() {
            let mut next = cfg.clone();
            let ch = cfg.catalytic_head as usize;
            next.catalytic_tape[ch] ^= self.mask[ch];
            if ch + 1 == self.c {
                next.phase = self.phase_done();
                next.catalytic_head = 0;
            } else {
                next.catalytic_head += 1;
            }
            return Ok(next);
        }
        Err(StepError::AlreadyHalted)
    }

    fn decision(&self, cfg: &Configuration) -> Option<Decision> {
        if cfg.phase == self.phase_done() {
            decision_from_aux(cfg.aux_counters[AUX_DEC])
        } else {
            None
        }
    }

    fn restores(&self, w: &[u8]) -> bool {
        w.len() == self.c && self.set.contains(w)
    }

    fn restoration_set_description(&self) -> String {
        self.set.describe()
    }

    fn configuration_space_bound(&self, input_len: usize) -> BigUint {
        // Embedded configurations inject into inner configurations (doubled
        // by the member flag); the opening check, the two involution sweeps,
        // and the done phase contribute at most 2c + 4 configurations per
        // tape value, and the inner bound — a product over full tape
        // contents for every engine in this crate — dominates the number of
        // tape values. The 6(2c + 3) envelope covers both contributions.
        self.inner.configuration_space_bound(input_len)
            * BigUint::from(6u32)
            * BigUint::from(2 * self.c + 3)
    }

    fn aux_state_bits(&self) -> u64 {
        1 + 2 + self.inner.aux_state_bits()
    }
}

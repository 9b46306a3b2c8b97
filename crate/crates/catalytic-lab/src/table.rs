//! Table-driven machines: the interchange format for inner computations.
//!
//! A [`MachineTable`] describes a deterministic machine with a read-only
//! input tape and a bounded read-write work tape. Restoration engines embed
//! these tables, mapping the work tape onto catalytic cells; the
//! [`StandaloneMachine`] wrapper runs the same table on a private work tape
//! and serves as the reference decision oracle in verification sweeps.
//!
//! The JSON file format:
//!
//! ```json
//! {
//!   "name": "parity-mark",
//!   "states": ["init", "scan", "acc", "rej"],
//!   "input_alphabet": ["0", "1"],
//!   "work_alphabet": ["0", "1", "_"],
//!   "blank": "_",
//!   "accept": "acc",
//!   "reject": "rej",
//!   "space_bound": 1,
//!   "transitions": [
//!     ["init", "0", "_", "scan", "0", 0, 0]
//!   ]
//! }
//! ```
//!
//! Each transition entry reads: in `state`, seeing this input symbol and this
//! work symbol, go to the named state, write the given work symbol, then move
//! the input and work heads by the two signed offsets (-1, 0, or 1). The
//! reserved input symbol `$` matches the virtual end-marker cell past the
//! last input character.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::machine::{
    check_machine_id, move_clamped, move_work, CatalyticMachine, Configuration, Decision,
    MachineError, StepError,
};

/// Reserved input end-marker, usable in transition entries.
pub const END_MARKER: char = '$';

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(char),
    #[error("symbol entry {0:?} must be a single character")]
    BadSymbolEntry(String),
    #[error("head move {0} out of range (expected -1, 0, or 1)")]
    BadMove(i8),
    #[error("duplicate transition for ({state:?}, {input_symbol:?}, {work_symbol:?})")]
    DuplicateTransition {
        state: String,
        input_symbol: char,
        work_symbol: char,
    },
    #[error("missing transition for ({state:?}, {input_symbol:?}, {work_symbol:?})")]
    MissingTransition {
        state: String,
        input_symbol: char,
        work_symbol: char,
    },
    #[error("blank symbol {0:?} must be part of the work alphabet")]
    BlankNotInWorkAlphabet(char),
    #[error("space_bound must be at least 1")]
    SpaceBoundZero,
    #[error("transition defined for halting state {0:?}")]
    TransitionFromHaltingState(String),
    #[error("accept and reject must name distinct states")]
    AcceptRejectSame,
    #[error("malformed machine table JSON: {0}")]
    Json(String),
}

/// Resolved transition: target state, symbol to write, head offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub next: u16,
    pub write: u8,
    pub imove: i8,
    pub wmove: i8,
}

/// Outcome of applying one table transition.
#[derive(Debug, Clone, Copy)]
pub struct Applied {
    pub next_state: u16,
    pub write: u8,
    pub input_head: u32,
    pub work_head: u32,
}

/// Work-alphabet indices of the binary symbols and the blank, for engines
/// that map the work tape onto binary catalytic cells.
#[derive(Debug, Clone, Copy)]
pub struct BinaryWorkMap {
    pub zero: u8,
    pub one: u8,
    pub blank: u8,
}

impl BinaryWorkMap {
    /// Work symbol to store for a catalytic bit.
    pub fn sym_for_bit(&self, bit: u8) -> u8 {
        if bit == 0 {
            self.zero
        } else {
            self.one
        }
    }

    /// Catalytic bit for a written work symbol; the blank is stored as 0.
    pub fn bit_for_sym(&self, sym: u8) -> u8 {
        if sym == self.one {
            1
        } else {
            0
        }
    }
}

/// A validated transition table.
#[derive(Debug, Clone)]
pub struct MachineTable {
    name: String,
    states: Vec<String>,
    input_alphabet: Vec<char>,
    work_alphabet: Vec<char>,
    blank: u8,
    accept: u16,
    reject: u16,
    space_bound: usize,
    /// Dense map: index = (state * (|input|+1) + input_sym) * |work| + work_sym.
    transitions: Vec<Option<Transition>>,
}

/// On-disk representation.
#[derive(Serialize, Deserialize)]
struct TableFile {
    name: String,
    states: Vec<String>,
    input_alphabet: Vec<String>,
    work_alphabet: Vec<String>,
    blank: String,
    accept: String,
    reject: String,
    space_bound: usize,
    transitions: Vec<(String, String, String, String, String, i8, i8)>,
}

fn single_char(s: &str) -> Result<char, TableError> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(TableError::BadSymbolEntry(s.to_string())),
    }
}

impl MachineTable {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn input_alphabet(&self) -> &[char] {
        &self.input_alphabet
    }

    pub fn work_alphabet(&self) -> &[char] {
        &self.work_alphabet
    }

    pub fn blank_sym(&self) -> u8 {
        self.blank
    }

    pub fn space_bound(&self) -> usize {
        self.space_bound
    }

    pub fn accept_state(&self) -> u16 {
        self.accept
    }

    pub fn reject_state(&self) -> u16 {
        self.reject
    }

    /// `Some(decision)` iff `state` is halting.
    pub fn halting(&self, state: u16) -> Option<Decision> {
        if state == self.accept {
            Some(Decision::Accept)
        } else if state == self.reject {
            Some(Decision::Reject)
        } else {
            None
        }
    }

    /// Index of the input end-marker in the extended input alphabet.
    pub fn end_sym(&self) -> u8 {
        self.input_alphabet.len() as u8
    }

    /// Input symbol under the head, with the virtual end marker past the end.
    pub fn input_sym_at(&self, input: &[u8], head: u32) -> u8 {
        input
            .get(head as usize)
            .copied()
            .unwrap_or_else(|| self.end_sym())
    }

    fn slot(&self, state: u16, input_sym: u8, work_sym: u8) -> usize {
        (state as usize * (self.input_alphabet.len() + 1) + input_sym as usize)
            * self.work_alphabet.len()
            + work_sym as usize
    }

    fn input_sym_char(&self, sym: u8) -> char {
        if sym == self.end_sym() {
            END_MARKER
        } else {
            self.input_alphabet[sym as usize]
        }
    }

    pub fn work_sym_char(&self, sym: u8) -> char {
        self.work_alphabet[sym as usize]
    }

    /// Looks up and applies the transition for the given observation,
    /// returning the new control state, symbol to write, and head positions.
    pub fn resolve(
        &self,
        state: u16,
        input: &[u8],
        input_head: u32,
        work_sym: u8,
        work_head: u32,
    ) -> Result<Applied, StepError> {
        let input_sym = self.input_sym_at(input, input_head);
        let t = self.transitions[self.slot(state, input_sym, work_sym)]
            .as_ref()
            .ok_or_else(|| StepError::UndefinedTransition {
                state: self.states[state as usize].clone(),
                input_symbol: self.input_sym_char(input_sym),
                work_symbol: self.work_sym_char(work_sym),
            })?;
        Ok(Applied {
            next_state: t.next,
            write: t.write,
            input_head: move_clamped(input_head, t.imove, input.len() as u32),
            work_head: move_work(work_head, t.wmove, self.space_bound)?,
        })
    }

    /// Indices of `'0'`, `'1'`, and the blank, for engines that host this
    /// table on binary catalytic cells. Fails if the work alphabet contains
    /// anything else.
    pub fn binary_work_map(&self) -> Result<BinaryWorkMap, MachineError> {
        let find = |c: char| self.work_alphabet.iter().position(|&x| x == c);
        let (zero, one) = match (find('0'), find('1')) {
            (Some(z), Some(o)) => (z as u8, o as u8),
            _ => {
                return Err(MachineError::ConfigInvalid(
                    "inner work alphabet must contain '0' and '1'".into(),
                ))
            }
        };
        for (i, &c) in self.work_alphabet.iter().enumerate() {
            if c != '0' && c != '1' && i as u8 != self.blank {
                return Err(MachineError::ConfigInvalid(format!(
                    "inner work alphabet symbol {c:?} is neither binary nor the blank"
                )));
            }
        }
        Ok(BinaryWorkMap {
            zero,
            one,
            blank: self.blank,
        })
    }

    /// Parses an input word such as `"0110"` into symbol indices.
    pub fn parse_input(&self, s: &str) -> Result<Vec<u8>, TableError> {
        s.chars()
            .map(|c| {
                self.input_alphabet
                    .iter()
                    .position(|&x| x == c)
                    .map(|i| i as u8)
                    .ok_or(TableError::UnknownSymbol(c))
            })
            .collect()
    }

    pub fn from_json(json: &str) -> Result<Self, TableError> {
        let file: TableFile =
            serde_json::from_str(json).map_err(|e| TableError::Json(e.to_string()))?;
        let mut builder = MachineTableBuilder::new(&file.name)
            .states(file.states.iter().map(String::as_str))
            .input_alphabet(
                &file
                    .input_alphabet
                    .iter()
                    .map(|s| single_char(s))
                    .collect::<Result<String, _>>()?,
            )
            .work_alphabet(
                &file
                    .work_alphabet
                    .iter()
                    .map(|s| single_char(s))
                    .collect::<Result<String, _>>()?,
                single_char(&file.blank)?,
            )
            .accept(&file.accept)
            .reject(&file.reject)
            .space_bound(file.space_bound);
        for (state, ins, work, next, write, imove, wmove) in &file.transitions {
            builder = builder.rule(
                state,
                &single_char(ins)?.to_string(),
                &single_char(work)?.to_string(),
                next,
                single_char(write)?,
                *imove,
                *wmove,
            );
        }
        builder.finish()
    }

    pub fn to_json(&self) -> String {
        let mut transitions = Vec::new();
        for state in 0..self.states.len() as u16 {
            for input_sym in 0..=self.input_alphabet.len() as u8 {
                for work_sym in 0..self.work_alphabet.len() as u8 {
                    if let Some(t) = &self.transitions[self.slot(state, input_sym, work_sym)] {
                        transitions.push((
                            self.states[state as usize].clone(),
                            self.input_sym_char(input_sym).to_string(),
                            self.work_sym_char(work_sym).to_string(),
                            self.states[t.next as usize].clone(),
                            self.work_sym_char(t.write).to_string(),
                            t.imove,
                            t.wmove,
                        ));
                    }
                }
            }
        }
        let file = TableFile {
            name: self.name.clone(),
            states: self.states.clone(),
            input_alphabet: self.input_alphabet.iter().map(|c| c.to_string()).collect(),
            work_alphabet: self.work_alphabet.iter().map(|c| c.to_string()).collect(),
            blank: self.work_sym_char(self.blank).to_string(),
            accept: self.states[self.accept as usize].clone(),
            reject: self.states[self.reject as usize].clone(),
            space_bound: self.space_bound,
            transitions,
        };
        serde_json::to_string_pretty(&file).expect("table serialization cannot fail")
    }
}

/// Builder for transition tables. `rule` accepts strings of input and work
/// symbols and adds the cross product, which keeps hand-written fixtures
/// compact; `otherwise_reject` completes the table so that transitions are
/// total over non-halting states.
pub struct MachineTableBuilder {
    name: String,
    states: Vec<String>,
    input_alphabet: Vec<char>,
    work_alphabet: Vec<char>,
    blank: Option<char>,
    accept: Option<String>,
    reject: Option<String>,
    space_bound: usize,
    rules: Vec<(String, char, char, String, char, i8, i8)>,
    fill_reject: bool,
}

impl MachineTableBuilder {
    pub fn new(name: &str) -> Self {
        MachineTableBuilder {
            name: name.to_string(),
            states: Vec::new(),
            input_alphabet: vec!['0', '1'],
            work_alphabet: vec!['0', '1', '_'],
            blank: Some('_'),
            accept: None,
            reject: None,
            space_bound: 1,
            rules: Vec::new(),
            fill_reject: false,
        }
    }

    pub fn states<'a>(mut self, names: impl IntoIterator<Item = &'a str>) -> Self {
        self.states = names.into_iter().map(str::to_string).collect();
        self
    }

    pub fn input_alphabet(mut self, symbols: &str) -> Self {
        self.input_alphabet = symbols.chars().collect();
        self
    }

    pub fn work_alphabet(mut self, symbols: &str, blank: char) -> Self {
        self.work_alphabet = symbols.chars().collect();
        self.blank = Some(blank);
        self
    }

    pub fn accept(mut self, state: &str) -> Self {
        self.accept = Some(state.to_string());
        self
    }

    pub fn reject(mut self, state: &str) -> Self {
        self.reject = Some(state.to_string());
        self
    }

    pub fn space_bound(mut self, bound: usize) -> Self {
        self.space_bound = bound;
        self
    }

    /// Adds one transition for every (input symbol, work symbol) pair in the
    /// given strings. Use `"$"` (or include `'$'`) to match the input end
    /// marker, and `"*"` as shorthand for every symbol of the alphabet
    /// (including `'$'` on the input side).
    #[allow(clippy::too_many_arguments)]
    pub fn rule(
        mut self,
        state: &str,
        input_syms: &str,
        work_syms: &str,
        next: &str,
        write: char,
        imove: i8,
        wmove: i8,
    ) -> Self {
        let ins: Vec<char> = if input_syms == "*" {
            let mut all = self.input_alphabet.clone();
            all.push(END_MARKER);
            all
        } else {
            input_syms.chars().collect()
        };
        let works: Vec<char> = if work_syms == "*" {
            self.work_alphabet.clone()
        } else {
            work_syms.chars().collect()
        };
        for &i in &ins {
            for &w in &works {
                self.rules
                    .push((state.to_string(), i, w, next.to_string(), write, imove, wmove));
            }
        }
        self
    }

    /// Completes the table: every unspecified (state, input, work) triple of a
    /// non-halting state becomes a stay-in-place move to the reject state.
    pub fn otherwise_reject(mut self) -> Self {
        self.fill_reject = true;
        self
    }

    pub fn finish(self) -> Result<MachineTable, TableError> {
        if self.space_bound == 0 {
            return Err(TableError::SpaceBoundZero);
        }
        let blank_char = self.blank.expect("builder always sets a blank");
        let blank = self
            .work_alphabet
            .iter()
            .position(|&c| c == blank_char)
            .ok_or(TableError::BlankNotInWorkAlphabet(blank_char))? as u8;
        let state_index: HashMap<String, u16> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u16))
            .collect();
        let lookup_state = |name: &str| -> Result<u16, TableError> {
            state_index
                .get(name)
                .copied()
                .ok_or_else(|| TableError::UnknownState(name.to_string()))
        };
        let accept = lookup_state(self.accept.as_deref().unwrap_or("accept"))?;
        let reject = lookup_state(self.reject.as_deref().unwrap_or("reject"))?;
        if accept == reject {
            return Err(TableError::AcceptRejectSame);
        }

        let in_count = self.input_alphabet.len() + 1;
        let work_count = self.work_alphabet.len();
        let mut table = MachineTable {
            name: self.name,
            states: self.states,
            input_alphabet: self.input_alphabet,
            work_alphabet: self.work_alphabet,
            blank,
            accept,
            reject,
            space_bound: self.space_bound,
            transitions: vec![None; 0],
        };
        table.transitions = vec![None; table.states.len() * in_count * work_count];

        let input_sym_index = |c: char| -> Result<u8, TableError> {
            if c == END_MARKER {
                return Ok(table.input_alphabet.len() as u8);
            }
            table
                .input_alphabet
                .iter()
                .position(|&x| x == c)
                .map(|i| i as u8)
                .ok_or(TableError::UnknownSymbol(c))
        };
        let work_sym_index = |c: char| -> Result<u8, TableError> {
            table
                .work_alphabet
                .iter()
                .position(|&x| x == c)
                .map(|i| i as u8)
                .ok_or(TableError::UnknownSymbol(c))
        };

        for (state, ins, work, next, write, imove, wmove) in &self.rules {
            let state_id = lookup_state(state)?;
            if table.halting(state_id).is_some() {
                return Err(TableError::TransitionFromHaltingState(state.clone()));
            }
            for &m in &[*imove, *wmove] {
                if !(-1..=1).contains(&m) {
                    return Err(TableError::BadMove(m));
                }
            }
            let slot = table.slot(state_id, input_sym_index(*ins)?, work_sym_index(*work)?);
            if table.transitions[slot].is_some() {
                return Err(TableError::DuplicateTransition {
                    state: state.clone(),
                    input_symbol: *ins,
                    work_symbol: *work,
                });
            }
            table.transitions[slot] = Some(Transition {
                next: lookup_state(next)?,
                write: work_sym_index(*write)?,
                imove: *imove,
                wmove: *wmove,
            });
        }

        for state in 0..table.states.len() as u16 {
            if table.halting(state).is_some() {
                continue;
            }
            for input_sym in 0..in_count as u8 {
                for work_sym in 0..work_count as u8 {
                    let slot = table.slot(state, input_sym, work_sym);
                    if table.transitions[slot].is_none() {
                        if self.fill_reject {
                            table.transitions[slot] = Some(Transition {
                                next: reject,
                                write: work_sym,
                                imove: 0,
                                wmove: 0,
                            });
                        } else {
                            return Err(TableError::MissingTransition {
                                state: table.states[state as usize].clone(),
                                input_symbol: table.input_sym_char(input_sym),
                                work_symbol: table.work_sym_char(work_sym),
                            });
                        }
                    }
                }
            }
        }
        Ok(table)
    }
}

/// Runs a table on its own blank-initialized work tape (no catalytic tape).
/// This is the reference oracle for engine decisions.
pub struct StandaloneMachine {
    table: Arc<MachineTable>,
    id: String,
    scratch: Option<Vec<u8>>,
}

impl StandaloneMachine {
    pub fn new(table: Arc<MachineTable>) -> Self {
        let id = check_machine_id(&format!("standalone({})", table.name()));
        StandaloneMachine {
            table,
            id,
            scratch: None,
        }
    }

    /// Overrides the initial work-tape content (used by the scratch-invariance
    /// lint; length must equal the table's space bound).
    pub fn with_scratch(mut self, scratch: Vec<u8>) -> Self {
        assert_eq!(scratch.len(), self.table.space_bound());
        self.scratch = Some(scratch);
        self
    }

    pub fn table(&self) -> &MachineTable {
        &self.table
    }
}

impl CatalyticMachine for StandaloneMachine {
    fn id(&self) -> &str {
        &self.id
    }

    fn catalytic_length(&self) -> usize {
        0
    }

    fn catalytic_alphabet(&self) -> &[char] {
        &['0', '1']
    }

    fn phase_names(&self) -> Vec<String> {
        self.table.states().to_vec()
    }

    fn initial_configuration(
        &self,
        _input: &[u8],
        w0: &[u8],
    ) -> Result<Configuration, MachineError> {
        if !w0.is_empty() {
            return Err(MachineError::CatalyticLengthMismatch {
                got: w0.len(),
                want: 0,
            });
        }
        let work_tape = self
            .scratch
            .clone()
            .unwrap_or_else(|| vec![self.table.blank_sym(); self.table.space_bound()]);
        Ok(Configuration {
            machine_id: Arc::from(self.id.as_str()),
            phase: 0,
            input_head: 0,
            work_head: 0,
            catalytic_head: 0,
            work_tape,
            catalytic_tape: Vec::new(),
            aux_counters: Vec::new(),
        })
    }

    fn step(&self, input: &[u8], cfg: &Configuration) -> Result<Configuration, StepError> {
        if self.decision(cfg).is_some() {
            return Err(StepError::AlreadyHalted);
        }
        let work_sym = cfg.work_tape[cfg.work_head as usize];
        let applied = self
            .table
            .resolve(cfg.phase, input, cfg.input_head, work_sym, cfg.work_head)?;
        let mut next = cfg.clone();
        next.work_tape[cfg.work_head as usize] = applied.write;
        next.phase = applied.next_state;
        next.input_head = applied.input_head;
        next.work_head = applied.work_head;
        Ok(next)
    }

    fn decision(&self, cfg: &Configuration) -> Option<Decision> {
        self.table.halting(cfg.phase)
    }

    fn restores(&self, w: &[u8]) -> bool {
        w.is_empty()
    }

    fn restoration_set_description(&self) -> String {
        "trivial (no catalytic tape)".into()
    }

    fn configuration_space_bound(&self, input_len: usize) -> BigUint {
        let states = BigUint::from(self.table.state_count());
        let heads = BigUint::from(input_len + 2) * BigUint::from(self.table.space_bound());
        let contents = BigUint::from(self.table.work_alphabet().len())
            .pow(self.table.space_bound() as u32);
        states * heads * contents
    }

    fn aux_state_bits(&self) -> u64 {
        0
    }
}

/// Checks that the table's decision on each input does not depend on the
/// initial content of its work tape. Tries the blank tape, all-zeros,
/// all-ones, and either every work-tape content (when the space of contents
/// is small) or `samples` seeded random contents. Returns the offending
/// (input, scratch) pair on failure.
pub fn decision_is_scratch_invariant(
    table: &Arc<MachineTable>,
    inputs: &[Vec<u8>],
    samples: usize,
    budget: u64,
) -> Result<(), (Vec<u8>, Vec<u8>)> {
    use rand::{Rng, SeedableRng};

    let space = table.space_bound();
    let alpha = table.work_alphabet().len() as u64;
    let mut scratches: Vec<Vec<u8>> = vec![
        vec![table.blank_sym(); space],
        vec![0; space],
        vec![1; space],
    ];
    let total = (alpha as f64).powi(space as i32);
    if total <= 4096.0 {
        let mut current = vec![0u8; space];
        loop {
            scratches.push(current.clone());
            let mut i = 0;
            while i < space {
                current[i] += 1;
                if u64::from(current[i]) < alpha {
                    break;
                }
                current[i] = 0;
                i += 1;
            }
            if i == space {
                break;
            }
        }
    } else {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5c7a7c4);
        for _ in 0..samples {
            scratches.push((0..space).map(|_| rng.gen_range(0..alpha) as u8).collect());
        }
    }

    for input in inputs {
        let reference = crate::machine::run(
            &StandaloneMachine::new(Arc::clone(table)),
            input,
            &[],
            budget,
            false,
        );
        for scratch in &scratches {
            let machine = StandaloneMachine::new(Arc::clone(table)).with_scratch(scratch.clone());
            let got = crate::machine::run(&machine, input, &[], budget, false);
            let same = match (&reference, &got) {
                (Ok(a), Ok(b)) => a.decision == b.decision,
                (Err(_), Err(_)) => true,
                _ => false,
            };
            if !same {
                return Err((input.clone(), scratch.clone()));
            }
        }
    }
    Ok(())
}

//! Ready-made machines for tests, demos, and the command line.
//!
//! Two kinds live here. The table fixtures are small inner machines meant to
//! be hosted by restoration engines; each one writes a work cell before ever
//! reading it, so its decision cannot depend on what the engine happened to
//! leave in the window (the scratch-invariance lint in [`crate::table`]
//! checks exactly this). The native fixtures exercise the verification
//! harness: a complementary pair of honest restorers whose restoration sets
//! tile the whole cube, and two deliberately broken machines — one that
//! never halts and one that destroys the tape while claiming to restore
//! everything — for checking that the harness actually catches misbehavior.

use std::sync::Arc;

use num_bigint::BigUint;

use crate::engines::common::{decision_from_aux, decision_to_aux, DEC_NONE};
use crate::machine::{
    check_machine_id, CatalyticMachine, Configuration, Decision, MachineError, StepError,
};
use crate::setlang::CatalyticSet;
use crate::table::{MachineTable, MachineTableBuilder, TableError};

/// Adds, for every work symbol, a rule that writes the symbol back
/// unchanged — the table-language idiom for "leave the cell alone".
fn keep(
    mut b: MachineTableBuilder,
    state: &str,
    input_syms: &str,
    next: &str,
    imove: i8,
    wmove: i8,
) -> MachineTableBuilder {
    for w in ['0', '1', '_'] {
        b = b.rule(state, input_syms, &w.to_string(), next, w, imove, wmove);
    }
    b
}

/// Accepts immediately, touching nothing.
pub fn accept_all() -> Result<MachineTable, TableError> {
    let b = MachineTableBuilder::new("accept-all")
        .states(["go", "acc", "rej"])
        .accept("acc")
        .reject("rej")
        .space_bound(1);
    keep(b, "go", "*", "acc", 0, 0).finish()
}

/// Accepts iff the input has an odd number of ones. Uses one work cell as
/// the running parity bit, zeroing it before the scan.
pub fn parity_mark() -> Result<MachineTable, TableError> {
    let b = MachineTableBuilder::new("parity-mark")
        .states(["init", "scan", "acc", "rej"])
        .accept("acc")
        .reject("rej")
        .space_bound(1)
        .rule("init", "*", "*", "scan", '0', 0, 0)
        .rule("scan", "1", "0", "scan", '1', 1, 0)
        .rule("scan", "1", "1", "scan", '0', 1, 0)
        .rule("scan", "$", "1", "acc", '1', 0, 0)
        .rule("scan", "$", "0", "rej", '0', 0, 0);
    keep(b, "scan", "0", "scan", 1, 0)
        .otherwise_reject() // blank under the head cannot survive `init`
        .finish()
}

/// Accepts iff the input contains at least two ones, leaving a tally mark
/// in a fresh work cell for each one it finds (marks are written, never read).
pub fn ones_at_least_2() -> Result<MachineTable, TableError> {
    let mut b = MachineTableBuilder::new("ones-at-least-2")
        .states(["scan0", "scan1", "scan2", "acc", "rej"])
        .accept("acc")
        .reject("rej")
        .space_bound(3)
        .rule("scan0", "1", "*", "scan1", '1', 1, 1)
        .rule("scan1", "1", "*", "scan2", '1', 1, 1);
    for state in ["scan0", "scan1"] {
        b = keep(b, state, "0", state, 1, 0);
        b = keep(b, state, "$", "rej", 0, 0);
    }
    b = keep(b, "scan2", "0", "scan2", 1, 0);
    b = keep(b, "scan2", "1", "scan2", 1, 0);
    b = keep(b, "scan2", "$", "acc", 0, 0);
    b.finish()
}

/// Accepts iff the input is a three-bit palindrome (first and last bits
/// equal). The first bit is parked in the work cell for the comparison.
pub fn palindrome_3() -> Result<MachineTable, TableError> {
    let mut b = MachineTableBuilder::new("palindrome-3")
        .states(["rd0", "skip1", "cmp2", "end3", "acc", "rej"])
        .accept("acc")
        .reject("rej")
        .space_bound(1)
        .rule("rd0", "0", "*", "skip1", '0', 1, 0)
        .rule("rd0", "1", "*", "skip1", '1', 1, 0)
        .rule("cmp2", "0", "0", "end3", '0', 1, 0)
        .rule("cmp2", "1", "1", "end3", '1', 1, 0);
    b = keep(b, "skip1", "0", "cmp2", 1, 0);
    b = keep(b, "skip1", "1", "cmp2", 1, 0);
    b = keep(b, "end3", "$", "acc", 0, 0);
    b.otherwise_reject().finish()
}

/// Toggles its work cell once (a blank counts as zero), then accepts iff the
/// first input bit is one. The toggle makes the machine genuinely disturb
/// its window without affecting its decision.
pub fn flip_first() -> Result<MachineTable, TableError> {
    let b = MachineTableBuilder::new("flip-first")
        .states(["flip", "dec", "acc", "rej"])
        .accept("acc")
        .reject("rej")
        .space_bound(1)
        .rule("flip", "*", "0", "dec", '1', 0, 0)
        .rule("flip", "*", "1", "dec", '0', 0, 0)
        .rule("flip", "*", "_", "dec", '1', 0, 0)
        .rule("dec", "1", "*", "acc", '1', 0, 0)
        .rule("dec", "0", "*", "rej", '0', 0, 0)
        .rule("dec", "$", "*", "rej", '0', 0, 0);
    b.finish()
}

/// Accepts iff the input length is a multiple of sixteen, counted on four
/// work cells (least-significant at cell 0) with a ripple-carry increment.
/// The counter cells are zeroed before any counting.
pub fn four_bit_counter() -> Result<MachineTable, TableError> {
    let mut b = MachineTableBuilder::new("four-bit-counter")
        .states([
            "z0", "z1", "z2", "z3", "bk2", "bk1", "tick", "inc0", "inc1", "inc2", "inc3",
            "ret2", "ret1", "chk0", "chk1", "chk2", "chk3", "acc", "rej",
        ])
        .accept("acc")
        .reject("rej")
        .space_bound(4)
        // Zero the four counter cells, then walk back to cell 0.
        .rule("z0", "*", "*", "z1", '0', 0, 1)
        .rule("z1", "*", "*", "z2", '0', 0, 1)
        .rule("z2", "*", "*", "z3", '0', 0, 1)
        .rule("z3", "*", "*", "bk2", '0', 0, -1);
    b = keep(b, "bk2", "*", "bk1", 0, -1);
    b = keep(b, "bk1", "*", "tick", 0, -1);
    // One increment per input symbol; at the end marker, check for zero.
    b = keep(b, "tick", "0", "inc0", 1, 0);
    b = keep(b, "tick", "1", "inc0", 1, 0);
    b = keep(b, "tick", "$", "chk0", 0, 0);
    b = b
        .rule("inc0", "*", "0", "tick", '1', 0, 0)
        .rule("inc0", "*", "1", "inc1", '0', 0, 1)
        .rule("inc1", "*", "0", "tick", '1', 0, -1)
        .rule("inc1", "*", "1", "inc2", '0', 0, 1)
        .rule("inc2", "*", "0", "ret1", '1', 0, -1)
        .rule("inc2", "*", "1", "inc3", '0', 0, 1)
        .rule("inc3", "*", "0", "ret2", '1', 0, -1)
        // Overflow wraps: dropping the carry counts modulo sixteen.
        .rule("inc3", "*", "1", "ret2", '0', 0, -1);
    b = keep(b, "ret2", "*", "ret1", 0, -1);
    b = keep(b, "ret1", "*", "tick", 0, -1);
    b = b
        .rule("chk0", "$", "0", "chk1", '0', 0, 1)
        .rule("chk1", "$", "0", "chk2", '0', 0, 1)
        .rule("chk2", "$", "0", "chk3", '0', 0, 1)
        .rule("chk3", "$", "0", "acc", '0', 0, 0)
        .rule("chk0", "$", "1", "rej", '1', 0, 0)
        .rule("chk1", "$", "1", "rej", '1', 0, 0)
        .rule("chk2", "$", "1", "rej", '1', 0, 0)
        .rule("chk3", "$", "1", "rej", '1', 0, 0);
    b.otherwise_reject().finish()
}

/// Names of the bundled table fixtures, as accepted by [`fixture_table`].
pub const FIXTURE_TABLE_NAMES: &[&str] = &[
    "accept-all",
    "parity-mark",
    "ones-at-least-2",
    "palindrome-3",
    "flip-first",
    "four-bit-counter",
];

/// Builds a bundled table fixture by name.
pub fn fixture_table(name: &str) -> Option<Arc<MachineTable>> {
    let table = match name {
        "accept-all" => accept_all(),
        "parity-mark" => parity_mark(),
        "ones-at-least-2" => ones_at_least_2(),
        "palindrome-3" => palindrome_3(),
        "flip-first" => flip_first(),
        "four-bit-counter" => four_bit_counter(),
        _ => return None,
    };
    Some(Arc::new(table.expect("bundled fixture tables are valid")))
}

const AUX_ACC: usize = 0;
const AUX_DEC: usize = 1;

const PR_READ: u16 = 0;
const PR_SCRATCH: u16 = 1;
const PR_SCAN: u16 = 2;
const PR_WRITE: u16 = 3;
const PR_DONE: u16 = 4;

/// Accepts iff the input has odd parity, using catalytic cell 0 as scratch
/// and restoring it from the tape's own parity.
///
/// The even variant restores every even-parity tape, the odd variant every
/// odd-parity tape; together they tile the cube, which makes the pair the
/// standard example for dovetailing two one-sided restorers. Cell 0 is the
/// only cell ever written: after the input scan parks the answer there, the
/// restorer recomputes cell 0 as whatever bit gives the whole tape the
/// variant's parity. Tapes of the right parity come back exactly; tapes of
/// the wrong parity leave with cell 0 flipped.
pub struct ParityRestorer {
    id: String,
    c: usize,
    odd: bool,
    set: CatalyticSet,
}

impl ParityRestorer {
    pub fn new(c: usize, odd: bool) -> Result<Self, MachineError> {
        if c < 2 {
            return Err(MachineError::ConfigInvalid(
                "parity restoration needs at least two cells".into(),
            ));
        }
        let variant = if odd { "odd" } else { "even" };
        let id = check_machine_id(&format!("parity-restorer({variant},c{c})"));
        let set = if odd {
            CatalyticSet::parity_odd(c)
        } else {
            CatalyticSet::parity_even(c)
        };
        Ok(ParityRestorer { id, c, odd, set })
    }
}

impl CatalyticMachine for ParityRestorer {
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
            "read-input".into(),
            "scratch-write".into(),
            "restore-scan".into(),
            "restore-write".into(),
            "done".into(),
        ]
    }

    fn initial_configuration(
        &self,
        _input: &[u8],
        w0: &[u8],
    ) -> Result<Configuration, MachineError> {
        crate::engines::common::check_tape(w0, self.c, 2)?;
        Ok(Configuration {
            machine_id: Arc::from(self.id.as_str()),
            phase: PR_READ,
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
            PR_READ => {
                let ih = cfg.input_head as usize;
                if ih < input.len() {
                    let bit = input[ih];
                    if bit > 1 {
                        return Err(StepError::InvariantViolation(format!(
                            "non-binary input symbol {bit}"
                        )));
                    }
                    next.aux_counters[AUX_ACC] ^= i64::from(bit);
                    next.input_head += 1;
                } else {
                    let d = if cfg.aux_counters[AUX_ACC] == 1 {
                        Decision::Accept
                    } else {
                        Decision::Reject
                    };
                    next.aux_counters[AUX_DEC] = decision_to_aux(d);
                    next.phase = PR_SCRATCH;
                }
            }
            PR_SCRATCH => {
                next.catalytic_tape[0] = cfg.aux_counters[AUX_ACC] as u8;
                next.aux_counters[AUX_ACC] = 0;
                next.catalytic_head = 1;
                next.phase = PR_SCAN;
            }
            PR_SCAN => {
                let ch = cfg.catalytic_head as usize;
                next.aux_counters[AUX_ACC] ^= i64::from(cfg.catalytic_tape[ch]);
                if ch + 1 == self.c {
                    next.phase = PR_WRITE;
                } else {
                    next.catalytic_head += 1;
                }
            }
            PR_WRITE => {
                next.catalytic_tape[0] = (cfg.aux_counters[AUX_ACC] as u8) ^ u8::from(self.odd);
                next.catalytic_head = 0;
                next.phase = PR_DONE;
            }
            _ => return Err(StepError::AlreadyHalted),
        }
        Ok(next)
    }

    fn decision(&self, cfg: &Configuration) -> Option<Decision> {
        if cfg.phase == PR_DONE {
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
        BigUint::from(5u32)
            * BigUint::from(input_len + 2)
            * BigUint::from(self.c + 1)
            * (BigUint::from(1u32) << self.c)
            * BigUint::from(2u32)
            * BigUint::from(3u32)
    }

    fn aux_state_bits(&self) -> u64 {
        1 + 2
    }
}

/// A broken restorer that flips catalytic cell 0 and then spins forever,
/// bouncing its catalytic head between cells 0 and 1. Its configuration
/// space is honestly tiny, so a budgeted run flags it quickly.
pub struct LoopingParityRestorer {
    id: String,
    c: usize,
    set: CatalyticSet,
}

impl LoopingParityRestorer {
    pub fn new(c: usize) -> Result<Self, MachineError> {
        if c < 2 {
            return Err(MachineError::ConfigInvalid(
                "the spin phase needs at least two cells".into(),
            ));
        }
        Ok(LoopingParityRestorer {
            id: check_machine_id(&format!("looping-parity-restorer(c{c})")),
            c,
            set: CatalyticSet::parity_even(c),
        })
    }
}

impl CatalyticMachine for LoopingParityRestorer {
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
        vec!["poison".into(), "spin".into()]
    }

    fn initial_configuration(
        &self,
        _input: &[u8],
        w0: &[u8],
    ) -> Result<Configuration, MachineError> {
        crate::engines::common::check_tape(w0, self.c, 2)?;
        Ok(Configuration {
            machine_id: Arc::from(self.id.as_str()),
            phase: 0,
            input_head: 0,
            work_head: 0,
            catalytic_head: 0,
            work_tape: Vec::new(),
            catalytic_tape: w0.to_vec(),
            aux_counters: Vec::new(),
        })
    }

    fn step(&self, _input: &[u8], cfg: &Configuration) -> Result<Configuration, StepError> {
        let mut next = cfg.clone();
        if cfg.phase == 0 {
            next.catalytic_tape[0] ^= 1;
            next.phase = 1;
        } else {
            next.catalytic_head = (cfg.catalytic_head + 1) % 2;
        }
        Ok(next)
    }

    fn decision(&self, _cfg: &Configuration) -> Option<Decision> {
        None
    }

    fn restores(&self, w: &[u8]) -> bool {
        w.len() == self.c && self.set.contains(w)
    }

    fn restoration_set_description(&self) -> String {
        format!("{} (claimed, never honored: the machine does not halt)", self.set.describe())
    }

    fn configuration_space_bound(&self, _input_len: usize) -> BigUint {
        // Per starting tape: the initial configuration plus two spin
        // positions over the poisoned tape.
        BigUint::from(4u32) * (BigUint::from(1u32) << self.c)
    }

    fn aux_state_bits(&self) -> u64 {
        0
    }
}

/// A broken machine that wipes the whole tape to zeros in one step, accepts,
/// and claims to restore every tape. Restoration sweeps catch the lie on any
/// nonzero tape, and runs from different tapes collide in the wiped
/// configuration, so the disjointness check produces a two-tape witness.
pub struct EraserMachine {
    id: String,
    c: usize,
}

impl EraserMachine {
    pub fn new(c: usize) -> Result<Self, MachineError> {
        if c == 0 {
            return Err(MachineError::ConfigInvalid("need at least one cell".into()));
        }
        Ok(EraserMachine {
            id: check_machine_id(&format!("eraser(c{c})")),
            c,
        })
    }
}

impl CatalyticMachine for EraserMachine {
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
        vec!["erase".into(), "done".into()]
    }

    fn initial_configuration(
        &self,
        _input: &[u8],
        w0: &[u8],
    ) -> Result<Configuration, MachineError> {
        crate::engines::common::check_tape(w0, self.c, 2)?;
        Ok(Configuration {
            machine_id: Arc::from(self.id.as_str()),
            phase: 0,
            input_head: 0,
            work_head: 0,
            catalytic_head: 0,
            work_tape: Vec::new(),
            catalytic_tape: w0.to_vec(),
            aux_counters: Vec::new(),
        })
    }

    fn step(&self, _input: &[u8], cfg: &Configuration) -> Result<Configuration, StepError> {
        if cfg.phase != 0 {
            return Err(StepError::AlreadyHalted);
        }
        let mut next = cfg.clone();
        next.catalytic_tape.iter_mut().for_each(|cell| *cell = 0);
        next.phase = 1;
        Ok(next)
    }

    fn decision(&self, cfg: &Configuration) -> Option<Decision> {
        (cfg.phase == 1).then_some(Decision::Accept)
    }

    fn restores(&self, w: &[u8]) -> bool {
        w.len() == self.c
    }

    fn restoration_set_description(&self) -> String {
        format!("every tape of length {} (claimed, false on every nonzero tape)", self.c)
    }

    fn configuration_space_bound(&self, _input_len: usize) -> BigUint {
        (BigUint::from(1u32) << self.c) + BigUint::from(2u32)
    }

    fn aux_state_bits(&self) -> u64 {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::all_words;
    use crate::machine::{run, RunError};
    use crate::table::{decision_is_scratch_invariant, StandaloneMachine};

    fn sample_inputs() -> Vec<Vec<u8>> {
        let mut inputs: Vec<Vec<u8>> = vec![vec![]];
        for len in 1..=5 {
            inputs.extend(all_words(len));
        }
        inputs
    }

    fn decide(table: &Arc<MachineTable>, input: &[u8]) -> Decision {
        run(&StandaloneMachine::new(Arc::clone(table)), input, &[], 10_000, false)
            .unwrap()
            .decision
    }

    #[test]
    fn every_fixture_table_is_scratch_invariant() {
        for name in FIXTURE_TABLE_NAMES {
            let table = fixture_table(name).unwrap();
            decision_is_scratch_invariant(&table, &sample_inputs(), 16, 10_000)
                .unwrap_or_else(|(input, scratch)| {
                    panic!("{name} peeks at its scratch: input {input:?}, scratch {scratch:?}")
                });
        }
    }

    #[test]
    fn fixture_tables_decide_their_languages() {
        let parity = fixture_table("parity-mark").unwrap();
        let ones2 = fixture_table("ones-at-least-2").unwrap();
        let pal = fixture_table("palindrome-3").unwrap();
        let flip = fixture_table("flip-first").unwrap();
        let all = fixture_table("accept-all").unwrap();
        for input in sample_inputs() {
            let weight: u8 = input.iter().sum();
            assert_eq!(
                decide(&parity, &input) == Decision::Accept,
                weight % 2 == 1,
                "parity-mark on {input:?}"
            );
            assert_eq!(
                decide(&ones2, &input) == Decision::Accept,
                weight >= 2,
                "ones-at-least-2 on {input:?}"
            );
            assert_eq!(
                decide(&pal, &input) == Decision::Accept,
                input.len() == 3 && input[0] == input[2],
                "palindrome-3 on {input:?}"
            );
            assert_eq!(
                decide(&flip, &input) == Decision::Accept,
                input.first() == Some(&1),
                "flip-first on {input:?}"
            );
            assert_eq!(decide(&all, &input), Decision::Accept);
        }
    }

    #[test]
    fn counter_accepts_exactly_multiples_of_sixteen() {
        let counter = fixture_table("four-bit-counter").unwrap();
        for len in 0..=35 {
            let input = vec![1u8; len];
            assert_eq!(
                decide(&counter, &input) == Decision::Accept,
                len % 16 == 0,
                "length {len}"
            );
        }
    }

    #[test]
    fn parity_restorer_restores_its_parity_class_and_decides_input_parity() {
        for odd in [false, true] {
            let m = ParityRestorer::new(6, odd).unwrap();
            for w in all_words(6) {
                let input = [1u8, 0, 1, 1];
                let result = run(&m, &input, &w, 10_000, false).unwrap();
                assert_eq!(result.decision, Decision::Accept, "input parity is odd");
                let w_parity_matches = (w.iter().sum::<u8>() % 2 == 1) == odd;
                assert_eq!(m.restores(&w), w_parity_matches);
                if w_parity_matches {
                    assert_eq!(result.final_catalytic, w, "member tape must return");
                } else {
                    assert_ne!(result.final_catalytic, w, "wrong-parity tape leaves flipped");
                }
                // n + 1 input steps, scratch write, c - 1 scan steps, restore write.
                assert_eq!(result.steps, (input.len() + 1 + 1 + 5 + 1) as u64);
            }
        }
    }

    #[test]
    fn looping_restorer_hits_the_budget() {
        let m = LoopingParityRestorer::new(4).unwrap();
        let budget = crate::machine::default_budget(&m, 0);
        match run(&m, &[], &[0, 1, 1, 0], budget, false) {
            Err(RunError::BudgetExceeded { .. }) => {}
            other => panic!("expected a budget overrun, got {other:?}"),
        }
    }

    #[test]
    fn eraser_wipes_and_accepts() {
        let m = EraserMachine::new(5).unwrap();
        let result = run(&m, &[1], &[1, 0, 1, 1, 0], 10, false).unwrap();
        assert_eq!(result.decision, Decision::Accept);
        assert_eq!(result.final_catalytic, vec![0; 5]);
        assert!(m.restores(&[1, 0, 1, 1, 0]), "the false claim under test");
    }
}

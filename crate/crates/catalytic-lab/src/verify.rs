//! The verification harness: check a machine's promises from the outside.
//!
//! A machine makes three externally checkable claims:
//!
//! 1. **Restoration** — on every tape it claims to restore, the tape is
//!    bit-for-bit intact when it halts.
//! 2. **Decision soundness** — for a fixed input, the verdict is the same
//!    no matter which tape it starts on (and matches a reference decider
//!    when one is supplied).
//! 3. **Configuration accounting** — runs started from distinct members of
//!    the restoration set share no configuration. Since a deterministic
//!    halting run never revisits a configuration either, the runtimes summed
//!    over all members cannot exceed the machine's declared
//!    configuration-space bound; that inequality is what makes "many tapes
//!    restored" imply "fast on average".
//!
//! Everything here treats the machine as a black box through the
//! [`CatalyticMachine`] interface, so the same sweeps run against honest
//! engines and deliberately broken fixtures alike. Failures are reported as
//! concrete witnesses — a tape, an input, and what went wrong — rather than
//! booleans.

use std::collections::HashMap;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::format_word;
use crate::machine::{run, CatalyticMachine, Decision, RunError};
use crate::setlang::{CatalyticSet, SetError};

/// Cap on stored failure witnesses; the full count is always reported.
pub const MAX_RECORDED_FAILURES: usize = 32;

/// Cap on the tape length for exhaustive binary sweeps.
pub const MAX_EXHAUSTIVE_SWEEP_LENGTH: usize = 20;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("tape source needs an explicit restoration set")]
    SourceNeedsSet,
    #[error("cannot enumerate the restoration set: {0}")]
    Enumeration(#[from] SetError),
    #[error("exhaustive sweep over {got} cells exceeds the cap of {cap}")]
    SweepTooLarge { got: usize, cap: usize },
    #[error("tape {tape} does not fit the machine: {reason}")]
    BadTape { tape: String, reason: String },
}

/// Where the sweep's starting tapes come from.
#[derive(Debug, Clone)]
pub enum WSource {
    /// Every binary tape of the machine's length (capped).
    ExhaustiveBinary,
    /// Every member of the supplied restoration set.
    Members,
    /// Seeded uniform samples over the machine's full catalytic alphabet —
    /// for super-binary alphabets this exercises symbols no binary tape has.
    Sample { seed: u64, count: usize },
    /// Caller-supplied tapes.
    Explicit(Vec<Vec<u8>>),
}

/// What went wrong on one (input, tape) case.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FailureKind {
    /// A claimed-restorable tape came back changed.
    RestorationMismatch { final_tape: String },
    /// The verdict differed from the reference (or from other tapes).
    DecisionMismatch { got: String, want: String },
    /// The run died: budget overrun or a step error.
    RunFailed { error: String },
    /// The machine's membership claim disagrees with the declared set.
    MembershipMismatch { claimed: bool, declared: bool },
}

/// One failing case, with everything needed to replay it.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CaseRecord {
    pub input: String,
    pub tape: String,
    #[serde(flatten)]
    pub kind: FailureKind,
}

/// Outcome of a restoration/decision sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub machine_id: String,
    pub restoration_set: String,
    /// Runs executed: one per (input, tape) pair.
    pub cases_run: u64,
    /// Cases whose tape the machine claims to restore.
    pub member_cases: u64,
    /// Member cases whose tape came back bit-for-bit.
    pub restored: u64,
    /// Runs that overran the step budget.
    pub budget_exceeded: u64,
    /// Total failing cases (only the first [`MAX_RECORDED_FAILURES`] are kept).
    pub failure_count: u64,
    pub failures: Vec<CaseRecord>,
    pub overall_pass: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }
}

/// Materializes the sweep's tapes.
fn tapes_for(
    machine: &dyn CatalyticMachine,
    set: Option<&CatalyticSet>,
    source: &WSource,
) -> Result<Vec<Vec<u8>>, VerifyError> {
    let c = machine.catalytic_length();
    match source {
        WSource::ExhaustiveBinary => {
            if c > MAX_EXHAUSTIVE_SWEEP_LENGTH {
                return Err(VerifyError::SweepTooLarge {
                    got: c,
                    cap: MAX_EXHAUSTIVE_SWEEP_LENGTH,
                });
            }
            Ok(crate::bits::all_words(c).collect())
        }
        WSource::Members => {
            let set = set.ok_or(VerifyError::SourceNeedsSet)?;
            Ok(set.enumerate()?)
        }
        WSource::Sample { seed, count } => {
            use rand::{Rng, SeedableRng};
            let alphabet = machine.catalytic_alphabet().len() as u8;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
            Ok((0..*count)
                .map(|_| (0..c).map(|_| rng.gen_range(0..alphabet)).collect())
                .collect())
        }
        WSource::Explicit(tapes) => Ok(tapes.clone()),
    }
}

/// Sweeps the machine over every (input, tape) pair, checking restoration on
/// claimed members, decision agreement (against `expected` when given,
/// against the other tapes of the same input otherwise), and — when a set is
/// supplied — that the machine's membership claims match it.
pub fn verify_restoration(
    machine: &dyn CatalyticMachine,
    set: Option<&CatalyticSet>,
    inputs: &[Vec<u8>],
    source: &WSource,
    expected: Option<&(dyn Fn(&[u8]) -> Decision + Sync)>,
    budget: u64,
) -> Result<VerificationReport, VerifyError> {
    let tapes = tapes_for(machine, set, source)?;

    // Membership cross-check is per tape, independent of inputs.
    let mut failures: Vec<CaseRecord> = Vec::new();
    if let Some(set) = set {
        for tape in &tapes {
            let claimed = machine.restores(tape);
            let declared = tape.len() == set.len_bits()
                && tape.iter().all(|&b| b <= 1)
                && set.contains(tape);
            if claimed != declared {
                failures.push(CaseRecord {
                    input: String::new(),
                    tape: format_word(tape),
                    kind: FailureKind::MembershipMismatch { claimed, declared },
                });
            }
        }
    }

    struct CaseOutcome {
        member: bool,
        restored: bool,
        budget_exceeded: bool,
        decision: Option<Decision>,
        failure: Option<CaseRecord>,
    }

    let run_case = |input: &Vec<u8>, tape: &Vec<u8>| -> CaseOutcome {
        let member = machine.restores(tape);
        match run(machine, input, tape, budget, false) {
            Ok(result) => {
                let restored = result.final_catalytic == *tape;
                let failure = if member && !restored {
                    Some(CaseRecord {
                        input: format_word(input),
                        tape: format_word(tape),
                        kind: FailureKind::RestorationMismatch {
                            final_tape: format_word(&result.final_catalytic),
                        },
                    })
                } else {
                    None
                };
                CaseOutcome {
                    member,
                    restored: member && restored,
                    budget_exceeded: false,
                    decision: Some(result.decision),
                    failure,
                }
            }
            Err(err) => CaseOutcome {
                member,
                restored: false,
                budget_exceeded: matches!(err, RunError::BudgetExceeded { .. }),
                decision: None,
                failure: Some(CaseRecord {
                    input: format_word(input),
                    tape: format_word(tape),
                    kind: FailureKind::RunFailed {
                        error: err.to_string(),
                    },
                }),
            },
        }
    };

    let mut cases_run = 0u64;
    let mut member_cases = 0u64;
    let mut restored = 0u64;
    let mut budget_exceeded = 0u64;

    for input in inputs {
        let outcomes: Vec<CaseOutcome> = tapes
            .par_iter()
            .map(|tape| run_case(input, tape))
            .collect();

        // The reference verdict: the supplied decider, or the first verdict
        // seen for this input.
        let want = expected
            .map(|f| f(input))
            .or_else(|| outcomes.iter().find_map(|o| o.decision));
        for (tape, outcome) in tapes.iter().zip(&outcomes) {
            cases_run += 1;
            member_cases += u64::from(outcome.member);
            restored += u64::from(outcome.restored);
            budget_exceeded += u64::from(outcome.budget_exceeded);
            if let Some(f) = &outcome.failure {
                failures.push(f.clone());
            }
            if let (Some(got), Some(want)) = (outcome.decision, want) {
                if got != want {
                    failures.push(CaseRecord {
                        input: format_word(input),
                        tape: format_word(tape),
                        kind: FailureKind::DecisionMismatch {
                            got: got.to_string(),
                            want: want.to_string(),
                        },
                    });
                }
            }
        }
    }

    let failure_count = failures.len() as u64;
    failures.truncate(MAX_RECORDED_FAILURES);
    Ok(VerificationReport {
        machine_id: machine.id().to_string(),
        restoration_set: machine.restoration_set_description(),
        cases_run,
        member_cases,
        restored,
        budget_exceeded,
        failure_count,
        failures,
        overall_pass: failure_count == 0,
    })
}

/// Two member tapes whose runs met in the same configuration.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CollisionWitness {
    pub tape_a: String,
    pub tape_b: String,
    pub configuration: String,
}

/// Outcome of the configuration-disjointness accounting on one input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DisjointnessReport {
    pub machine_id: String,
    pub input: String,
    /// Member tapes swept.
    pub members: u64,
    /// Runs that overran the budget (their steps are excluded from the sum).
    pub budget_exceeded: u64,
    /// Σ over members of the run length.
    pub total_steps: String,
    /// The machine's declared configuration-space bound for this input length.
    pub configuration_bound: String,
    /// Σ steps ≤ bound — the average-runtime inequality.
    pub sum_within_bound: bool,
    /// First pair of member runs sharing a configuration, if any.
    pub collision: Option<CollisionWitness>,
    pub overall_pass: bool,
}

impl DisjointnessReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }
}

/// Runs the machine on `input` from every member of `set`, recording every
/// visited configuration, and checks that (a) no configuration appears in two
/// different members' runs and (b) the member runtimes sum to at most the
/// declared configuration-space bound.
pub fn check_configuration_disjointness(
    machine: &dyn CatalyticMachine,
    set: &CatalyticSet,
    input: &[u8],
    budget: u64,
) -> Result<DisjointnessReport, VerifyError> {
    let members = set.enumerate()?;

    struct MemberTrace {
        tape: Vec<u8>,
        steps: u64,
        configs: Vec<String>,
        budget_exceeded: bool,
    }

    let traces: Vec<MemberTrace> = members
        .par_iter()
        .map(|tape| match run(machine, input, tape, budget, true) {
            Ok(result) => MemberTrace {
                tape: tape.clone(),
                steps: result.steps,
                configs: result.trace.expect("trace was requested"),
                budget_exceeded: false,
            },
            Err(_) => MemberTrace {
                tape: tape.clone(),
                steps: 0,
                configs: Vec::new(),
                budget_exceeded: true,
            },
        })
        .collect();

    let mut owner: HashMap<&str, usize> = HashMap::new();
    let mut collision = None;
    'outer: for (i, trace) in traces.iter().enumerate() {
        for cfg in &trace.configs {
            match owner.entry(cfg.as_str()) {
                std::collections::hash_map::Entry::Occupied(e) => {
                    let j = *e.get();
                    if j != i {
                        collision = Some(CollisionWitness {
                            tape_a: format_word(&traces[j].tape),
                            tape_b: format_word(&trace.tape),
                            configuration: cfg.clone(),
                        });
                        break 'outer;
                    }
                }
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(i);
                }
            }
        }
    }

    let total_steps: u128 = traces.iter().map(|t| u128::from(t.steps)).sum();
    let budget_exceeded = traces.iter().filter(|t| t.budget_exceeded).count() as u64;
    let bound = machine.configuration_space_bound(input.len());
    let sum_within_bound = BigUint::from(total_steps) <= bound;
    let overall_pass = collision.is_none() && sum_within_bound && budget_exceeded == 0;
    Ok(DisjointnessReport {
        machine_id: machine.id().to_string(),
        input: format_word(input),
        members: members.len() as u64,
        budget_exceeded,
        total_steps: total_steps.to_string(),
        configuration_bound: bound.to_string(),
        sum_within_bound,
        collision,
        overall_pass,
    })
}

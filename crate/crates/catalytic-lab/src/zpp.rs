//! Dovetailing a complementary pair of restorers into a zero-error decider.
//!
//! Take two machines for the same decision problem whose restoration sets
//! tile the cube: every tape is restored by exactly one of them. Running
//! them in lockstep — one step each, round-robin — and answering with
//! whichever halts first gives a decider that is correct on *every* tape and
//! fast *on average*: the run from tape `w` inside machine `i`'s restoration
//! set is charged against machine `i`'s configuration-space bound via the
//! disjointness argument, so the summed (and hence expected) runtime over a
//! uniformly random tape is small even though no single tape carries a
//! worst-case guarantee.
//!
//! [`dovetail`] runs one interleaved race; [`expected_runtime`] sweeps all
//! binary tapes, audits the tiling, the per-race interleaving bound, the
//! decision agreement, and both summed-runtime inequalities, and reports the
//! mean interleaved runtime.

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{all_words, format_word};
use crate::machine::{CatalyticMachine, Configuration, Decision, MachineError, RunError};
use crate::verify::{VerifyError, MAX_EXHAUSTIVE_SWEEP_LENGTH, MAX_RECORDED_FAILURES};

/// Which machine of the pair halted first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Winner {
    One,
    Two,
}

/// Outcome of one interleaved race.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DovetailOutcome {
    pub decision: Decision,
    pub winner: Winner,
    /// Steps the first machine applied before the race ended.
    pub steps_one: u64,
    /// Steps the second machine applied before the race ended.
    pub steps_two: u64,
    /// Total steps applied across both machines.
    pub interleaved_steps: u64,
}

/// Runs the two machines in strict alternation — halt checks first, then one
/// step each, first machine always ahead — until one of them reaches a
/// verdict. Ties go to the first machine. `budget` caps the number of rounds
/// (steps per machine).
pub fn dovetail(
    m1: &dyn CatalyticMachine,
    m2: &dyn CatalyticMachine,
    input: &[u8],
    w0: &[u8],
    budget: u64,
) -> Result<DovetailOutcome, RunError> {
    if m1.catalytic_length() != m2.catalytic_length() {
        return Err(RunError::Machine(MachineError::ConfigInvalid(format!(
            "cannot dovetail machines with catalytic lengths {} and {}",
            m1.catalytic_length(),
            m2.catalytic_length()
        ))));
    }
    let mut cfg1: Configuration = m1.initial_configuration(input, w0)?;
    let mut cfg2: Configuration = m2.initial_configuration(input, w0)?;
    let mut rounds: u64 = 0;
    loop {
        if let Some(decision) = m1.decision(&cfg1) {
            return Ok(DovetailOutcome {
                decision,
                winner: Winner::One,
                steps_one: rounds,
                steps_two: rounds,
                interleaved_steps: 2 * rounds,
            });
        }
        if let Some(decision) = m2.decision(&cfg2) {
            return Ok(DovetailOutcome {
                decision,
                winner: Winner::Two,
                steps_one: rounds,
                steps_two: rounds,
                interleaved_steps: 2 * rounds,
            });
        }
        if rounds >= budget {
            return Err(RunError::BudgetExceeded { budget });
        }
        cfg1 = m1.step(input, &cfg1)?;
        cfg2 = m2.step(input, &cfg2)?;
        rounds += 1;
    }
}

/// A tape restored by both machines or by neither: the tiling is broken.
pub fn complementarity_witness(
    m1: &dyn CatalyticMachine,
    m2: &dyn CatalyticMachine,
) -> Result<Option<Vec<u8>>, VerifyError> {
    let c = m1.catalytic_length();
    if c > MAX_EXHAUSTIVE_SWEEP_LENGTH {
        return Err(VerifyError::SweepTooLarge {
            got: c,
            cap: MAX_EXHAUSTIVE_SWEEP_LENGTH,
        });
    }
    Ok(all_words(c).find(|w| m1.restores(w) == m2.restores(w)))
}

/// Aggregated audit of a dovetailed pair over every binary tape.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZppReport {
    pub machine_one: String,
    pub machine_two: String,
    pub input: String,
    pub tapes: u64,
    /// Every tape is restored by exactly one of the two machines.
    pub complementary: bool,
    /// Both solo runs and the race reach the same verdict on every tape.
    pub decisions_agree: bool,
    /// Race used at most `2 * min(solo runtimes) + 1` steps on every tape.
    pub interleave_bound_holds: bool,
    pub mean_interleaved_steps: f64,
    pub max_interleaved_steps: u64,
    /// Σ of machine one's solo runtime over the tapes it restores.
    pub sum_steps_one_on_its_set: String,
    /// Σ of machine two's solo runtime over the tapes it restores.
    pub sum_steps_two_on_its_set: String,
    pub configuration_bound_one: String,
    pub configuration_bound_two: String,
    /// Both sums sit below the corresponding configuration-space bounds.
    pub sums_within_bounds: bool,
    /// Tapes skipped because a run overran the budget.
    pub budget_exceeded: u64,
    /// Interleaved step counts and how many tapes hit each, ascending.
    pub histogram: Vec<HistogramBar>,
    /// Human-readable witnesses for the first few failures.
    pub failures: Vec<String>,
    pub overall_pass: bool,
}

/// One histogram bucket: how many tapes finished in exactly `steps` steps.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct HistogramBar {
    pub steps: u64,
    pub tapes: u64,
}

impl ZppReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }
}

/// Sweeps every binary tape: races the pair, runs each machine solo, and
/// audits complementarity, decision agreement (against `expected` when
/// given), the interleaving bound, and both summed-runtime inequalities.
pub fn expected_runtime(
    m1: &dyn CatalyticMachine,
    m2: &dyn CatalyticMachine,
    input: &[u8],
    expected: Option<&(dyn Fn(&[u8]) -> Decision + Sync)>,
    budget: u64,
) -> Result<ZppReport, VerifyError> {
    let c = m1.catalytic_length();
    if c > MAX_EXHAUSTIVE_SWEEP_LENGTH {
        return Err(VerifyError::SweepTooLarge {
            got: c,
            cap: MAX_EXHAUSTIVE_SWEEP_LENGTH,
        });
    }
    let tapes: Vec<Vec<u8>> = all_words(c).collect();

    struct TapeAudit {
        complementary: bool,
        decisions_agree: bool,
        interleave_ok: bool,
        interleaved: u64,
        steps_one: u64,
        steps_two: u64,
        one_restores: bool,
        budget_exceeded: bool,
        failure: Option<String>,
    }

    let want = expected.map(|f| f(input));
    let audits: Vec<TapeAudit> = tapes
        .par_iter()
        .map(|w| {
            let one_restores = m1.restores(w);
            let complementary = one_restores != m2.restores(w);
            let solo1 = crate::machine::run(m1, input, w, budget, false);
            let solo2 = crate::machine::run(m2, input, w, budget, false);
            let race = dovetail(m1, m2, input, w, budget);
            match (solo1, solo2, race) {
                (Ok(r1), Ok(r2), Ok(race)) => {
                    let verdicts_equal = r1.decision == r2.decision
                        && r1.decision == race.decision
                        && want.map_or(true, |d| d == race.decision);
                    let interleave_ok =
                        race.interleaved_steps <= 2 * r1.steps.min(r2.steps) + 1;
                    let failure = if !complementary {
                        Some(format!(
                            "tape {} is restored by {} of the machines",
                            format_word(w),
                            if one_restores { "both" } else { "neither" }
                        ))
                    } else if !verdicts_equal {
                        Some(format!(
                            "tape {}: verdicts solo {}-{}, race {}{}",
                            format_word(w),
                            r1.decision,
                            r2.decision,
                            race.decision,
                            want.map_or_else(String::new, |d| format!(", reference {d}"))
                        ))
                    } else if !interleave_ok {
                        Some(format!(
                            "tape {}: race took {} steps, solo minimum is {}",
                            format_word(w),
                            race.interleaved_steps,
                            r1.steps.min(r2.steps)
                        ))
                    } else {
                        None
                    };
                    TapeAudit {
                        complementary,
                        decisions_agree: verdicts_equal,
                        interleave_ok,
                        interleaved: race.interleaved_steps,
                        steps_one: r1.steps,
                        steps_two: r2.steps,
                        one_restores,
                        budget_exceeded: false,
                        failure,
                    }
                }
                (s1, s2, race) => {
                    let err = [
                        s1.err().map(|e| e.to_string()),
                        s2.err().map(|e| e.to_string()),
                        race.err().map(|e| e.to_string()),
                    ]
                    .into_iter()
                    .flatten()
                    .next()
                    .unwrap_or_else(|| "unknown".into());
                    TapeAudit {
                        complementary,
                        decisions_agree: false,
                        interleave_ok: true,
                        interleaved: 0,
                        steps_one: 0,
                        steps_two: 0,
                        one_restores,
                        budget_exceeded: true,
                        failure: Some(format!("tape {}: {err}", format_word(w))),
                    }
                }
            }
        })
        .collect();

    let completed = audits.iter().filter(|a| !a.budget_exceeded);
    let total_interleaved: u128 = completed.clone().map(|a| u128::from(a.interleaved)).sum();
    let completed_count = completed.clone().count();
    let sum_one: u128 = completed
        .clone()
        .filter(|a| a.one_restores)
        .map(|a| u128::from(a.steps_one))
        .sum();
    let sum_two: u128 = completed
        .clone()
        .filter(|a| !a.one_restores)
        .map(|a| u128::from(a.steps_two))
        .sum();
    let bound_one = m1.configuration_space_bound(input.len());
    let bound_two = m2.configuration_space_bound(input.len());
    let sums_within_bounds =
        BigUint::from(sum_one) <= bound_one && BigUint::from(sum_two) <= bound_two;
    let budget_exceeded = audits.iter().filter(|a| a.budget_exceeded).count() as u64;
    let complementary = audits.iter().all(|a| a.complementary);
    let decisions_agree = audits
        .iter()
        .filter(|a| !a.budget_exceeded)
        .all(|a| a.decisions_agree);
    let interleave_bound_holds = audits.iter().all(|a| a.interleave_ok);
    let mut failures: Vec<String> = audits.iter().filter_map(|a| a.failure.clone()).collect();
    let failure_free = failures.is_empty();
    failures.truncate(MAX_RECORDED_FAILURES);

    let mut buckets: std::collections::BTreeMap<u64, u64> = std::collections::BTreeMap::new();
    for audit in audits.iter().filter(|a| !a.budget_exceeded) {
        *buckets.entry(audit.interleaved).or_insert(0) += 1;
    }
    let histogram = buckets
        .into_iter()
        .map(|(steps, tapes)| HistogramBar { steps, tapes })
        .collect();

    Ok(ZppReport {
        machine_one: m1.id().to_string(),
        machine_two: m2.id().to_string(),
        input: format_word(input),
        tapes: tapes.len() as u64,
        complementary,
        decisions_agree,
        interleave_bound_holds,
        mean_interleaved_steps: if completed_count == 0 {
            0.0
        } else {
            total_interleaved as f64 / completed_count as f64
        },
        max_interleaved_steps: audits.iter().map(|a| a.interleaved).max().unwrap_or(0),
        sum_steps_one_on_its_set: sum_one.to_string(),
        sum_steps_two_on_its_set: sum_two.to_string(),
        configuration_bound_one: bound_one.to_string(),
        configuration_bound_two: bound_two.to_string(),
        sums_within_bounds,
        budget_exceeded,
        histogram,
        failures,
        overall_pass: failure_free
            && complementary
            && decisions_agree
            && interleave_bound_holds
            && sums_within_bounds
            && budget_exceeded == 0,
    })
}

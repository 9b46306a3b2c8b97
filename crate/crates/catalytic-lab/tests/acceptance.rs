//! The acceptance suite: fifteen end-to-end checks, one test (and one
//! pass/fail line) each. Every expected value and time limit is pinned here
//! in code; nothing is read from the environment.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use catalytic_lab::bits::format_word;
use catalytic_lab::codes::CodeSpec;
use catalytic_lab::engines::{
    flip_first_bit_mask, BlockEngine, ExtraSymbolEngine, FullDecodeEngine, InvolutionEngine,
    SparseEngine,
};
use catalytic_lab::fixtures::{
    fixture_table, EraserMachine, LoopingParityRestorer, ParityRestorer,
};
use catalytic_lab::machine::{default_budget, run, CatalyticMachine, Decision};
use catalytic_lab::measures::partition::partition_measure;
use catalytic_lab::measures::pointset::{ball, ball_union, parity_set, BitVectorSet};
use catalytic_lab::measures::projection::{projection_measure, Fraction};
use catalytic_lab::measures::spectrum::{threshold_set, wht_spectrum};
use catalytic_lab::setlang::CatalyticSet;
use catalytic_lab::table::{MachineTable, StandaloneMachine};
use catalytic_lab::verify::{
    check_configuration_disjointness, verify_restoration, FailureKind, WSource,
};
use catalytic_lab::zpp::expected_runtime;

/// Runs the hosted table standalone — the decision reference every engine
/// sweep is compared against.
fn standalone_decider(table: Arc<MachineTable>) -> impl Fn(&[u8]) -> Decision + Sync {
    move |input: &[u8]| {
        run(
            &StandaloneMachine::new(Arc::clone(&table)),
            input,
            &[],
            1_000_000,
            false,
        )
        .expect("bundled tables halt on every input")
        .decision
    }
}

fn words(strings: &[&str]) -> Vec<Vec<u8>> {
    strings
        .iter()
        .map(|s| catalytic_lab::bits::parse_word(s).unwrap())
        .collect()
}

fn seeded_binary_tapes(seed: u64, count: usize, len: usize) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..len).map(|_| rng.gen_range(0..2u8)).collect())
        .collect()
}

#[test]
fn a01_closed_form_measures_for_parity_and_prefix_zero() {
    const LIMIT: Duration = Duration::from_secs(60);
    let start = Instant::now();
    for m in 2..=5 {
        let p = partition_measure(&parity_set(m, false)).unwrap().value;
        assert_eq!(p, 1 << (m - 1), "partition of the parity set at m={m}");
    }
    for m in 3..=6 {
        let r = projection_measure(&parity_set(m, false), Fraction::zero())
            .unwrap()
            .value;
        assert_eq!(r, m - 1, "zero-tolerance projection of parity at m={m}");
    }
    for m in [4usize, 8] {
        let set = CatalyticSet::PrefixZero {
            len: m,
            prefix_len: m / 4,
        };
        let p = partition_measure(&BitVectorSet::from_catalytic(&set).unwrap())
            .unwrap()
            .value;
        assert_eq!(p, 1, "a fixed-prefix set is a single subcube (m={m})");
    }
    assert!(start.elapsed() < LIMIT, "took {:?}", start.elapsed());
}

#[test]
fn a02_extended_hamming_projection_certificate() {
    const LIMIT: Duration = Duration::from_secs(1);
    let start = Instant::now();
    let code = CodeSpec::ExtendedHamming.build().unwrap();
    let set = BitVectorSet::from_catalytic(&CatalyticSet::codewords(code)).unwrap();
    let outcome = projection_measure(&set, Fraction::new(1, 256)).unwrap();
    assert!(outcome.value >= 4, "projection value {}", outcome.value);
    let level4 = &outcome.levels[4];
    assert_eq!(level4.total, 70, "C(8,4) coordinate subsets");
    assert_eq!(level4.good, 70, "every size-4 projection covers half");
    assert!(start.elapsed() < LIMIT, "took {:?}", start.elapsed());
}

#[test]
fn a03_codeword_partition_equals_codeword_count() {
    const LIMIT: Duration = Duration::from_secs(60);
    let start = Instant::now();
    for spec in [CodeSpec::Hamming, CodeSpec::ReedMuller { m: 3 }] {
        let code = spec.build().unwrap();
        let name = code.name().to_string();
        let set = BitVectorSet::from_catalytic(&CatalyticSet::codewords(code)).unwrap();
        let p = partition_measure(&set).unwrap().value;
        assert_eq!(p, 16, "minimum distance >= 2 forces singletons for {name}");
    }
    assert!(start.elapsed() < LIMIT, "took {:?}", start.elapsed());
}

#[test]
fn a04_partition_adds_over_distant_balls() {
    let centers = words(&["000000", "111100"]); // distance 4 >= 3
    let h1 = ball(6, 0, 1);
    let h2 = ball(6, BitVectorSet::index_of_word(&centers[1]), 1);
    let union = ball_union(6, &centers, 1).unwrap();
    let p1 = partition_measure(&h1).unwrap().value;
    let p2 = partition_measure(&h2).unwrap().value;
    let pu = partition_measure(&union).unwrap().value;
    assert_eq!(pu, p1 + p2, "separated balls partition independently");
    assert_eq!(pu, 12, "each radius-1 ball at m=6 costs 6 subcubes");
}

#[test]
fn a05_threshold_degree_one_mass_bound() {
    const LIMIT: Duration = Duration::from_secs(30);
    let start = Instant::now();
    for m in 1..=12 {
        for k in 0..m {
            let cert =
                catalytic_lab::measures::spectrum::degree_one_mass_bound(m, k).unwrap();
            assert!(
                cert.holds,
                "levels 0 and 1 must carry half the weight at m={m}, k={k}: \
                 {} < {}",
                cert.mass_numerator, cert.bound_numerator
            );
        }
    }
    assert!(start.elapsed() < LIMIT, "took {:?}", start.elapsed());
}

#[test]
fn a06_ball_partition_beats_root_m_over_two() {
    // Qualifying pairs: k < m/2 and the mean of the indicator's sign form
    // stays strictly below 1/2 in magnitude. The partition values are the
    // binomial coefficients C(m, k).
    const EXPECTED: [(usize, usize, usize); 10] = [
        (1, 0, 1),
        (3, 1, 3),
        (4, 1, 4),
        (5, 2, 10),
        (6, 2, 15),
        (7, 3, 35),
        (8, 3, 56),
        (9, 3, 84),
        (9, 4, 126),
        (10, 4, 210),
    ];
    let mut qualifying = Vec::new();
    for m in 1..=10usize {
        for k in (0..m).filter(|k| 2 * k < m) {
            let spectrum = wht_spectrum(&threshold_set(m, k)).unwrap();
            let empty_coefficient = spectrum.numerator(0).unsigned_abs();
            if empty_coefficient >= 1 << (m - 1) {
                continue;
            }
            let p = partition_measure(&ball(m, 0, k)).unwrap().value;
            assert!(
                4 * p * p >= m,
                "P(ball)={p} misses sqrt({m})/2"
            );
            qualifying.push((m, k, p));
        }
    }
    assert_eq!(qualifying, EXPECTED, "the qualifying (m, k, P) table moved");
}

#[test]
fn a07_full_decode_restores_codewords_and_matches_oracle() {
    const LIMIT: Duration = Duration::from_secs(120);
    const INNER_SPACE: usize = 15;
    let start = Instant::now();
    let inputs = words(&["", "101", "110011"]);
    for fixture in ["parity-mark", "ones-at-least-2"] {
        let code = CodeSpec::ReedMuller { m: 6 }.build().unwrap();
        assert_eq!((code.n(), code.k(), code.min_distance()), (64, 7, 32));
        let table = fixture_table(fixture).unwrap();
        let engine =
            FullDecodeEngine::build(code, Arc::clone(&table), INNER_SPACE).unwrap();
        let set = CatalyticSet::codewords(engine.code().clone());
        let decide = standalone_decider(table);
        let budget = default_budget(&engine, 6);

        // All 128 codewords, three inputs each: bit-exact restoration.
        let report = verify_restoration(
            &engine,
            Some(&set),
            &inputs,
            &WSource::Members,
            Some(&decide),
            budget,
        )
        .unwrap();
        assert!(report.overall_pass, "{fixture}: {}", report.to_json());
        assert_eq!(report.member_cases, 128 * 3);
        assert_eq!(report.restored, 128 * 3);

        // 1000 seeded tapes, codewords or not: decisions match the oracle.
        let sample = WSource::Explicit(seeded_binary_tapes(0xA11CE, 1000, 64));
        let report = verify_restoration(
            &engine,
            Some(&set),
            &inputs,
            &sample,
            Some(&decide),
            budget,
        )
        .unwrap();
        assert!(report.overall_pass, "{fixture}: {}", report.to_json());
        assert_eq!(report.cases_run, 3000);
    }
    assert!(start.elapsed() < LIMIT, "took {:?}", start.elapsed());
}

#[test]
fn a08_block_engine_restores_corrupted_codewords() {
    const LIMIT: Duration = Duration::from_secs(300);
    const BLOCK: usize = 8;
    const TAU: usize = 1;
    let start = Instant::now();
    let code = CodeSpec::ReedMuller { m: 7 }.build().unwrap();
    assert_eq!((code.n(), code.k(), code.min_distance()), (128, 8, 64));
    let codewords = code.all_codewords();
    let table = fixture_table("parity-mark").unwrap();
    let engine = BlockEngine::build(code, Arc::clone(&table), BLOCK, TAU).unwrap();
    let decide = standalone_decider(table);
    let budget = default_budget(&engine, 4);

    // 400 random corruptions of distance <= 16, plus 100 adversarial tapes
    // with exactly one error in every one of the 16 blocks.
    let mut rng = ChaCha8Rng::seed_from_u64(0xB10C);
    let mut members: Vec<Vec<u8>> = codewords.clone();
    for _ in 0..400 {
        let mut w = codewords[rng.gen_range(0..codewords.len())].clone();
        let flips = rng.gen_range(0..=16);
        for position in rand::seq::index::sample(&mut rng, 128, flips) {
            w[position] ^= 1;
        }
        members.push(w);
    }
    for _ in 0..100 {
        let mut w = codewords[rng.gen_range(0..codewords.len())].clone();
        for block in 0..16 {
            w[block * BLOCK + rng.gen_range(0..BLOCK)] ^= 1;
        }
        members.push(w);
    }
    let total = members.len() as u64;
    let report = verify_restoration(
        &engine,
        None,
        &[vec![1u8, 1]],
        &WSource::Explicit(members),
        Some(&decide),
        budget,
    )
    .unwrap();
    assert!(report.overall_pass, "{}", report.to_json());
    assert_eq!(report.member_cases, total, "every tape sits in the ball");
    assert_eq!(report.restored, total);

    // 500 arbitrary tapes: the verdict still matches the oracle.
    let sample = WSource::Explicit(seeded_binary_tapes(0xB10C + 1, 500, 128));
    let report =
        verify_restoration(&engine, None, &[vec![1u8, 1]], &sample, Some(&decide), budget)
            .unwrap();
    assert!(report.overall_pass, "{}", report.to_json());
    assert_eq!(report.cases_run, 500);
    assert!(start.elapsed() < LIMIT, "took {:?}", start.elapsed());
}

#[test]
fn a09_sparse_engine_restores_members_and_decides_all() {
    const LIMIT: Duration = Duration::from_secs(60);
    let start = Instant::now();
    let set = CatalyticSet::sorted_words(
        10,
        words(&[
            "0000000111",
            "0001010101",
            "0100000000",
            "1000000001",
            "1111000000",
        ]),
    )
    .unwrap();
    let table = fixture_table("parity-mark").unwrap();
    let engine = SparseEngine::build(Arc::clone(&table), set.clone(), None).unwrap();
    let decide = standalone_decider(table);
    let budget = default_budget(&engine, 3);
    let report = verify_restoration(
        &engine,
        Some(&set),
        &words(&["", "1", "011"]),
        &WSource::ExhaustiveBinary,
        Some(&decide),
        budget,
    )
    .unwrap();
    assert!(report.overall_pass, "{}", report.to_json());
    assert_eq!(report.cases_run, 3 * 1024, "decisions on every tape");
    assert_eq!(report.member_cases, 3 * 5);
    assert_eq!(report.restored, 3 * 5, "all five members come back intact");
    assert!(start.elapsed() < LIMIT, "took {:?}", start.elapsed());
}

#[test]
fn a10_extra_symbol_restores_all_binary_tapes() {
    const LIMIT: Duration = Duration::from_secs(300);
    const P: usize = 4;
    let start = Instant::now();
    let table = fixture_table("parity-mark").unwrap();
    let engine = ExtraSymbolEngine::build(Arc::clone(&table), P).unwrap();
    assert_eq!(engine.catalytic_length(), 16);
    let decide = standalone_decider(table);
    let budget = default_budget(&engine, 3);

    // Every one of the 65536 binary tapes is claimed and must come back.
    let report = verify_restoration(
        &engine,
        None,
        &words(&["1", "010"]),
        &WSource::ExhaustiveBinary,
        Some(&decide),
        budget,
    )
    .unwrap();
    assert!(report.overall_pass, "{}", report.to_json());
    assert_eq!(report.member_cases, 2 * 65536);
    assert_eq!(report.restored, 2 * 65536);

    // 1000 seeded tapes over the full three-symbol alphabet; the spare
    // symbol must actually occur in the sample.
    let mut rng = ChaCha8Rng::seed_from_u64(0x431A);
    let ternary: Vec<Vec<u8>> = (0..1000)
        .map(|_| (0..16).map(|_| rng.gen_range(0..3u8)).collect())
        .collect();
    assert!(
        ternary.iter().any(|w| w.contains(&2)),
        "the sample must exercise the spare symbol"
    );
    let report = verify_restoration(
        &engine,
        None,
        &words(&["1", "010"]),
        &WSource::Explicit(ternary),
        Some(&decide),
        budget,
    )
    .unwrap();
    assert!(report.overall_pass, "{}", report.to_json());
    assert_eq!(report.cases_run, 2000);
    assert!(start.elapsed() < LIMIT, "took {:?}", start.elapsed());
}

#[test]
fn a11_involution_turns_even_restorer_odd() {
    let c = 10;
    let even = Arc::new(ParityRestorer::new(c, false).unwrap());
    let wrapper =
        InvolutionEngine::build(even, flip_first_bit_mask(c), CatalyticSet::parity_odd(c))
            .unwrap();
    let set = CatalyticSet::parity_odd(c);
    let report = verify_restoration(
        &wrapper,
        Some(&set),
        &words(&["1", "10"]),
        &WSource::ExhaustiveBinary,
        None,
        default_budget(&wrapper, 2),
    )
    .unwrap();
    assert!(report.overall_pass, "{}", report.to_json());
    assert_eq!(report.member_cases, 2 * 512, "all odd tapes are claimed");
    assert_eq!(report.restored, 2 * 512, "and all of them come back");
}

#[test]
fn a12_configuration_disjointness_accounting() {
    const LIMIT: Duration = Duration::from_secs(120);
    let start = Instant::now();
    let input = words(&["101"]).remove(0);

    let code = CodeSpec::ExtendedHamming.build().unwrap();
    let table = fixture_table("parity-mark").unwrap();
    let engine = FullDecodeEngine::build(code, table, 1).unwrap();
    let set = CatalyticSet::codewords(engine.code().clone());
    let report = check_configuration_disjointness(
        &engine,
        &set,
        &input,
        default_budget(&engine, input.len()),
    )
    .unwrap();
    assert!(report.overall_pass, "{}", report.to_json());
    assert_eq!(report.members, 16);
    assert!(report.collision.is_none());
    assert!(report.sum_within_bound);

    for odd in [false, true] {
        let machine = ParityRestorer::new(8, odd).unwrap();
        let set = if odd {
            CatalyticSet::parity_odd(8)
        } else {
            CatalyticSet::parity_even(8)
        };
        let report = check_configuration_disjointness(
            &machine,
            &set,
            &input,
            default_budget(&machine, input.len()),
        )
        .unwrap();
        assert!(report.overall_pass, "{}", report.to_json());
        assert_eq!(report.members, 128);
        assert!(report.sum_within_bound);
    }
    assert!(start.elapsed() < LIMIT, "took {:?}", start.elapsed());
}

#[test]
fn a13_dovetailed_pair_races_within_bounds() {
    const LIMIT: Duration = Duration::from_secs(60);
    let start = Instant::now();
    let even = ParityRestorer::new(8, false).unwrap();
    let odd = ParityRestorer::new(8, true).unwrap();
    let input = words(&["1011"]).remove(0);
    let expect = |input: &[u8]| {
        if input.iter().filter(|&&b| b == 1).count() % 2 == 1 {
            Decision::Accept
        } else {
            Decision::Reject
        }
    };
    let report = expected_runtime(
        &even,
        &odd,
        &input,
        Some(&expect),
        default_budget(&even, input.len()),
    )
    .unwrap();
    assert!(report.overall_pass, "{}", report.to_json());
    assert_eq!(report.tapes, 256);
    assert!(report.decisions_agree, "every race ends in the right verdict");
    assert!(report.interleave_bound_holds);
    assert!(report.sums_within_bounds);
    assert!(start.elapsed() < LIMIT, "took {:?}", start.elapsed());
}

#[test]
fn a14_broken_fixtures_are_flagged_with_witnesses() {
    // A decode engine that skips its restoration phase.
    let code = CodeSpec::ExtendedHamming.build().unwrap();
    let table = fixture_table("parity-mark").unwrap();
    let skipper = FullDecodeEngine::build(code, table, 1)
        .unwrap()
        .with_skipped_restore();
    let set = CatalyticSet::codewords(skipper.code().clone());
    let report = verify_restoration(
        &skipper,
        Some(&set),
        &words(&["1"]),
        &WSource::Members,
        None,
        100_000,
    )
    .unwrap();
    assert!(!report.overall_pass);
    let witness = report
        .failures
        .iter()
        .find(|f| matches!(f.kind, FailureKind::RestorationMismatch { .. }))
        .expect("a skipped restore must leave a changed tape behind");
    assert!(!witness.tape.is_empty());

    // A machine that wipes its catalytic tape.
    let eraser = EraserMachine::new(5).unwrap();
    let all = CatalyticSet::All { len: 5 };
    let report = verify_restoration(
        &eraser,
        Some(&all),
        &[vec![]],
        &WSource::ExhaustiveBinary,
        None,
        1_000,
    )
    .unwrap();
    assert!(!report.overall_pass);
    assert!(report
        .failures
        .iter()
        .any(|f| matches!(f.kind, FailureKind::RestorationMismatch { .. })));
    let disjoint = check_configuration_disjointness(&eraser, &all, &[], 1_000).unwrap();
    let collision = disjoint.collision.expect("wiped tapes share the end state");
    assert_ne!(collision.tape_a, collision.tape_b);
    assert!(!disjoint.overall_pass);

    // A first machine that loops forever instead of halting.
    let looper = LoopingParityRestorer::new(4).unwrap();
    let odd = ParityRestorer::new(4, true).unwrap();
    let report = expected_runtime(
        &looper,
        &odd,
        &words(&["1"]).remove(0),
        None,
        default_budget(&odd, 1).max(100_000),
    )
    .unwrap();
    assert!(!report.overall_pass);
    assert_eq!(
        report.budget_exceeded, 16,
        "the looper exhausts its budget on every tape"
    );
    assert!(
        report.failures.iter().any(|f| f.contains("tape")),
        "the report names the offending tapes"
    );
}

#[test]
fn a15_measures_respect_xor_shift_and_monotonicity() {
    const LIMIT: Duration = Duration::from_secs(60);
    const M: usize = 6;
    let eps = Fraction::new(1, 16);
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5417);

    for trial in 0..100 {
        let mask: u64 = rng.gen();
        let set = BitVectorSet::from_fn(M, |i| mask >> i & 1 == 1);
        let z: Vec<u8> = (0..M).map(|_| rng.gen_range(0..2u8)).collect();
        let shifted = set.xor_shift(&z).unwrap();
        assert_eq!(
            partition_measure(&set).unwrap().value,
            partition_measure(&shifted).unwrap().value,
            "partition moved under a shift (trial {trial}, z={})",
            format_word(&z)
        );
        assert_eq!(
            projection_measure(&set, eps).unwrap().value,
            projection_measure(&shifted, eps).unwrap().value,
            "projection moved under a shift (trial {trial})"
        );
    }

    for trial in 0..100 {
        let big: u64 = rng.gen();
        let small = big & rng.gen::<u64>();
        let a = BitVectorSet::from_fn(M, |i| small >> i & 1 == 1);
        let b = BitVectorSet::from_fn(M, |i| big >> i & 1 == 1);
        let ra = projection_measure(&a, eps).unwrap().value;
        let rb = projection_measure(&b, eps).unwrap().value;
        assert!(
            ra <= rb,
            "a subset scored higher: {ra} > {rb} (trial {trial})"
        );
    }
    assert!(start.elapsed() < LIMIT, "took {:?}", start.elapsed());
}

//! Batch front-end: every library operation as a reproducible subcommand.
//!
//! Results are emitted as JSON (stdout or `--out`); seeded modes are
//! byte-identical across runs and across `--jobs` settings. Exit codes: 0
//! when all checks pass, 1 when a verification fails, 2 on usage errors.

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use catalytic_lab::codes::DecodeOutcome;
use catalytic_lab::descriptor::{load_table, parse_code, parse_engine, parse_point_set, parse_set};
use catalytic_lab::machine::{default_budget, run, CatalyticMachine, RunError};
use catalytic_lab::measures::partition::partition_measure;
use catalytic_lab::measures::projection::{
    projection_measure, projection_measure_sampled, Fraction,
};
use catalytic_lab::measures::spectrum::{
    degree_one_mass_bound, dyadic_display, wht_spectrum,
};
use catalytic_lab::table::MachineTable;
use catalytic_lab::verify::{check_configuration_disjointness, verify_restoration, WSource};
use catalytic_lab::zpp::expected_runtime;

#[derive(Parser)]
#[command(
    name = "catalytic-lab",
    version,
    about = "Simulate, verify, and measure almost-catalytic machines"
)]
struct Cli {
    /// Worker threads for sweeps; results do not depend on this.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the JSON result to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an engine once and print the outcome.
    Run(RunArgs),
    /// Sweep restoration and decision checks over many starting tapes.
    Verify(VerifyArgs),
    /// Check configuration disjointness and the summed-runtime bound.
    Disjoint(DisjointArgs),
    /// Compute combinatorial measures of a point set.
    Measures(MeasuresArgs),
    /// Inspect a linear code.
    Codes(CodesArgs),
    /// Race a complementary machine pair and audit the runtime bounds.
    Zpp(ZppArgs),
    /// Re-render a saved JSON report and exit by its verdict.
    Report(ReportArgs),
}

#[derive(Args)]
struct EngineArgs {
    /// Engine descriptor, e.g. `full-decode:rm(1,6):15` or `tally`.
    #[arg(long)]
    engine: String,
    /// Inner decision table: a fixture name or `@table.json`.
    #[arg(long)]
    inner: Option<String>,
    /// Catalytic length for engines that do not derive it themselves.
    #[arg(long)]
    c: Option<usize>,
}

impl EngineArgs {
    fn build(&self) -> Result<Arc<dyn CatalyticMachine>, String> {
        let inner: Option<Arc<MachineTable>> = match &self.inner {
            Some(spec) => Some(load_table(spec).map_err(|e| e.to_string())?),
            None => None,
        };
        parse_engine(&self.engine, inner.as_ref(), self.c).map_err(|e| e.to_string())
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    engine: EngineArgs,
    /// Input word (binary).
    #[arg(long, default_value = "")]
    input: String,
    /// Starting catalytic tape, over the machine's alphabet.
    #[arg(long)]
    w: String,
    /// Step budget; defaults to 10x the configuration-space bound.
    #[arg(long)]
    budget: Option<u64>,
    /// Record the full configuration trace.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    engine: EngineArgs,
    /// Restoration set to cross-check membership claims against.
    #[arg(long)]
    set: Option<String>,
    /// Inputs: comma-separated words, or `@file` with one per line.
    #[arg(long, default_value = "")]
    inputs: String,
    /// Tape source: `exhaustive`, `members`, or `sample:N`.
    #[arg(long, default_value = "exhaustive")]
    mode: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct DisjointArgs {
    #[command(flatten)]
    engine: EngineArgs,
    /// The restoration set whose members are swept.
    #[arg(long)]
    set: String,
    /// Input word (binary).
    #[arg(long, default_value = "")]
    input: String,
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct MeasuresArgs {
    /// Point set: a set descriptor, or `mask:@file` with hex membership bits.
    #[arg(long)]
    set: Option<String>,
    /// Word length for families that need one.
    #[arg(long)]
    m: Option<usize>,
    /// One of `partition`, `projection`, `spectrum`, `degree-one`.
    #[arg(long)]
    measure: String,
    /// Projection tolerance as a fraction, e.g. `1/256`.
    #[arg(long)]
    epsilon: Option<String>,
    /// Tolerance exponent: epsilon = 2^-floor(alpha*m). Used when --epsilon
    /// is absent.
    #[arg(long, default_value = "1/4")]
    alpha: String,
    /// Threshold cutoff for `degree-one`; omit to sweep every k < m.
    #[arg(long)]
    k: Option<usize>,
    /// Sample this many subsets per level instead of enumerating all.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write a CSV table (projection levels or degree-one sweep).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct CodesArgs {
    /// Code descriptor, e.g. `hamming:7` or `rm:1,6`.
    #[arg(long)]
    code: String,
    /// `summary`, `min-distance`, `covering-radius`, `codewords`,
    /// `encode:<message bits>`, or `decode:<word bits>`.
    #[arg(long, default_value = "summary")]
    op: String,
}

#[derive(Args)]
struct ZppArgs {
    /// First machine of the pair.
    #[arg(long)]
    engine_one: String,
    /// Second machine; must restore the complement of the first one's set.
    #[arg(long)]
    engine_two: String,
    /// Inner table shared by both engines (fixture name or `@file`).
    #[arg(long)]
    inner: Option<String>,
    /// Inner table for the second engine, when it differs.
    #[arg(long)]
    inner_two: Option<String>,
    #[arg(long)]
    c: Option<usize>,
    /// Input word (binary).
    #[arg(long, default_value = "")]
    input: String,
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct ReportArgs {
    /// A JSON report previously written by this tool.
    path: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: cannot size the worker pool: {e}");
            std::process::exit(2);
        }
    }
    match dispatch(&cli) {
        Ok(code) => std::process::exit(code),
        Err(message) => {
            eprintln!("error: {message}");
            std::process::exit(2);
        }
    }
}

/// Errors are usage problems (exit 2); `Ok` carries the pass/fail exit code.
fn dispatch(cli: &Cli) -> Result<i32, String> {
    match &cli.command {
        Command::Run(args) => cmd_run(cli, args),
        Command::Verify(args) => cmd_verify(cli, args),
        Command::Disjoint(args) => cmd_disjoint(cli, args),
        Command::Measures(args) => cmd_measures(cli, args),
        Command::Codes(args) => cmd_codes(cli, args),
        Command::Zpp(args) => cmd_zpp(cli, args),
        Command::Report(args) => cmd_report(cli, args),
    }
}

fn emit(cli: &Cli, json: &str) -> Result<(), String> {
    match &cli.out {
        Some(path) => std::fs::write(path, format!("{json}\n"))
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            use std::io::Write;
            match writeln!(std::io::stdout(), "{json}") {
                // A closed pipe (e.g. `| head`) is not an error worth noise.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
                other => other.map_err(|e| format!("cannot write to stdout: {e}")),
            }
        }
    }
}

fn parse_bits(s: &str) -> Result<Vec<u8>, String> {
    catalytic_lab::bits::parse_word(s.trim()).map_err(|e| e.to_string())
}

/// Parses a tape over an arbitrary machine alphabet by symbol lookup.
fn parse_tape(s: &str, alphabet: &[char]) -> Result<Vec<u8>, String> {
    s.trim()
        .chars()
        .map(|ch| {
            alphabet
                .iter()
                .position(|&a| a == ch)
                .map(|i| i as u8)
                .ok_or_else(|| format!("symbol {ch:?} is not in the alphabet {alphabet:?}"))
        })
        .collect()
}

fn format_tape(tape: &[u8], alphabet: &[char]) -> String {
    tape.iter()
        .map(|&s| alphabet.get(s as usize).copied().unwrap_or('?'))
        .collect()
}

/// `--inputs` argument: `@file` with one word per line, or a comma list.
fn parse_inputs(arg: &str) -> Result<Vec<Vec<u8>>, String> {
    let words: Vec<String> = if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {path}: {e}"))?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(String::from)
            .collect()
    } else if arg.trim().is_empty() {
        vec![String::new()]
    } else {
        arg.split(',').map(|w| w.trim().to_string()).collect()
    };
    words.iter().map(|w| parse_bits(w)).collect()
}

fn parse_fraction(s: &str) -> Result<Fraction, String> {
    let (num, den) = s.split_once('/').unwrap_or((s, "1"));
    let num: u64 = num.trim().parse().map_err(|e| format!("bad fraction {s:?}: {e}"))?;
    let den: u64 = den.trim().parse().map_err(|e| format!("bad fraction {s:?}: {e}"))?;
    if den == 0 {
        return Err(format!("bad fraction {s:?}: zero denominator"));
    }
    Ok(Fraction::new(num, den))
}

fn parse_mode(mode: &str) -> Result<WSource, String> {
    match mode {
        "exhaustive" => Ok(WSource::ExhaustiveBinary),
        "members" => Ok(WSource::Members),
        _ => match mode.strip_prefix("sample:") {
            Some(n) => Ok(WSource::Sample {
                seed: 0,
                count: n.parse().map_err(|e| format!("bad sample count: {e}"))?,
            }),
            None => Err(format!(
                "unknown mode {mode:?}; expected exhaustive, members, or sample:N"
            )),
        },
    }
}

fn cmd_run(cli: &Cli, args: &RunArgs) -> Result<i32, String> {
    let machine = args.engine.build()?;
    let alphabet = machine.catalytic_alphabet();
    let input = parse_bits(&args.input)?;
    let w0 = parse_tape(&args.w, alphabet)?;
    let budget = args
        .budget
        .unwrap_or_else(|| default_budget(machine.as_ref(), input.len()));
    match run(machine.as_ref(), &input, &w0, budget, args.trace) {
        Ok(result) => {
            let restored = result.final_catalytic == w0;
            let value = json!({
                "machine": machine.id(),
                "input": args.input.trim(),
                "w0": format_tape(&w0, alphabet),
                "decision": result.decision.to_string(),
                "steps": result.steps,
                "final_catalytic": format_tape(&result.final_catalytic, alphabet),
                "claims_restoration": machine.restores(&w0),
                "restored": restored,
                "trace": result.trace,
            });
            emit(cli, &serde_json::to_string_pretty(&value).unwrap())?;
            Ok(0)
        }
        Err(err) => {
            let value = json!({
                "machine": machine.id(),
                "input": args.input.trim(),
                "w0": format_tape(&w0, alphabet),
                "error": err.to_string(),
                "budget": matches!(err, RunError::BudgetExceeded { .. }),
            });
            emit(cli, &serde_json::to_string_pretty(&value).unwrap())?;
            Ok(1)
        }
    }
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs) -> Result<i32, String> {
    let machine = args.engine.build()?;
    let set = match &args.set {
        Some(desc) => Some(
            parse_set(desc, Some(machine.catalytic_length())).map_err(|e| e.to_string())?,
        ),
        None => None,
    };
    let inputs = parse_inputs(&args.inputs)?;
    let mut source = parse_mode(&args.mode)?;
    if let WSource::Sample { seed, .. } = &mut source {
        *seed = args.seed;
    }
    let budget = args.budget.unwrap_or_else(|| {
        inputs
            .iter()
            .map(|x| default_budget(machine.as_ref(), x.len()))
            .max()
            .unwrap_or(u64::MAX)
    });
    let report = verify_restoration(
        machine.as_ref(),
        set.as_ref(),
        &inputs,
        &source,
        None,
        budget,
    )
    .map_err(|e| e.to_string())?;
    emit(cli, &report.to_json())?;
    Ok(i32::from(!report.overall_pass))
}

fn cmd_disjoint(cli: &Cli, args: &DisjointArgs) -> Result<i32, String> {
    let machine = args.engine.build()?;
    let set = parse_set(&args.set, Some(machine.catalytic_length())).map_err(|e| e.to_string())?;
    let input = parse_bits(&args.input)?;
    let budget = args
        .budget
        .unwrap_or_else(|| default_budget(machine.as_ref(), input.len()));
    let report = check_configuration_disjointness(machine.as_ref(), &set, &input, budget)
        .map_err(|e| e.to_string())?;
    emit(cli, &report.to_json())?;
    Ok(i32::from(!report.overall_pass))
}

fn write_csv(path: &PathBuf, header: &str, rows: &[String]) -> Result<(), String> {
    let mut text = String::from(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn cmd_measures(cli: &Cli, args: &MeasuresArgs) -> Result<i32, String> {
    if args.measure == "degree-one" {
        return cmd_degree_one(cli, args);
    }
    let desc = args
        .set
        .as_ref()
        .ok_or_else(|| format!("--measure {} needs --set", args.measure))?;
    let set = parse_point_set(desc, args.m).map_err(|e| e.to_string())?;
    let m = set.m();
    match args.measure.as_str() {
        "partition" => {
            let outcome = partition_measure(&set).map_err(|e| e.to_string())?;
            let value = json!({
                "m": m,
                "measure": "partition",
                "set_size": set.len(),
                "value": outcome.value,
                "witness": outcome.witness_patterns(),
            });
            emit(cli, &serde_json::to_string_pretty(&value).unwrap())?;
            Ok(0)
        }
        "projection" => {
            let epsilon = match &args.epsilon {
                Some(e) => parse_fraction(e)?,
                None => Fraction::two_to_minus_floor_of(parse_fraction(&args.alpha)?, m),
            };
            let outcome = match args.samples {
                Some(samples) => projection_measure_sampled(&set, epsilon, samples, args.seed)
                    .map_err(|e| e.to_string())?,
                None => projection_measure(&set, epsilon).map_err(|e| e.to_string())?,
            };
            if let Some(csv) = &args.csv {
                let rows: Vec<String> = outcome
                    .levels
                    .iter()
                    .map(|l| format!("{},{},{},{}", l.ell, l.good, l.total, l.passes))
                    .collect();
                write_csv(csv, "level,good,total,passes", &rows)?;
            }
            let value = json!({
                "m": m,
                "measure": "projection",
                "set_size": set.len(),
                "epsilon": outcome.epsilon,
                "exhaustive": outcome.exhaustive,
                "value": outcome.value,
                "fractions": outcome.levels,
            });
            emit(cli, &serde_json::to_string_pretty(&value).unwrap())?;
            Ok(0)
        }
        "spectrum" => {
            let spectrum = wht_spectrum(&set).map_err(|e| e.to_string())?;
            let coefficients: Vec<serde_json::Value> = spectrum
                .numerators()
                .iter()
                .enumerate()
                .filter(|(_, &n)| n != 0)
                .map(|(s, &n)| {
                    let coords: Vec<usize> = (0..m).filter(|i| s >> i & 1 == 1).collect();
                    json!({
                        "coordinates": coords,
                        "numerator": n,
                        "display": format!(
                            "{}{}",
                            if n < 0 { "-" } else { "" },
                            dyadic_display(n.unsigned_abs().into(), m as u32)
                        ),
                    })
                })
                .collect();
            let parseval = spectrum.parseval_holds();
            let value = json!({
                "m": m,
                "measure": "spectrum",
                "set_size": set.len(),
                "value": spectrum.l1_display(),
                "parseval": parseval,
                "coefficients": coefficients,
            });
            emit(cli, &serde_json::to_string_pretty(&value).unwrap())?;
            Ok(i32::from(!parseval))
        }
        other => Err(format!(
            "unknown measure {other:?}; expected partition, projection, spectrum, or degree-one"
        )),
    }
}

fn cmd_degree_one(cli: &Cli, args: &MeasuresArgs) -> Result<i32, String> {
    let m = args.m.ok_or("--measure degree-one needs --m")?;
    let certs = match args.k {
        Some(k) => vec![degree_one_mass_bound(m, k).map_err(|e| e.to_string())?],
        None => (0..m)
            .map(|k| degree_one_mass_bound(m, k))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?,
    };
    if let Some(csv) = &args.csv {
        let rows: Vec<String> = certs
            .iter()
            .map(|c| {
                format!(
                    "{},{},{},{},{}",
                    c.m, c.k, c.mass_numerator, c.bound_numerator, c.holds
                )
            })
            .collect();
        write_csv(csv, "m,k,mass_numerator,bound_numerator,holds", &rows)?;
    }
    let all_hold = certs.iter().all(|c| c.holds);
    let value = json!({
        "m": m,
        "measure": "degree-one",
        "value": all_hold,
        "rows": certs,
    });
    emit(cli, &serde_json::to_string_pretty(&value).unwrap())?;
    Ok(i32::from(!all_hold))
}

fn cmd_codes(cli: &Cli, args: &CodesArgs) -> Result<i32, String> {
    let code = parse_code(&args.code)
        .map_err(|e| e.to_string())?
        .build()
        .map_err(|e| e.to_string())?;
    let value = match args.op.as_str() {
        "summary" => json!({
            "code": code.name(),
            "op": "summary",
            "n": code.n(),
            "k": code.k(),
            "min_distance": code.min_distance(),
            "radius": code.radius(),
        }),
        "min-distance" => json!({
            "code": code.name(),
            "op": "min-distance",
            "value": code.min_distance(),
        }),
        "covering-radius" => json!({
            "code": code.name(),
            "op": "covering-radius",
            "value": code.covering_radius().map_err(|e| e.to_string())?,
        }),
        "codewords" => {
            let words: Vec<String> = code
                .all_codewords()
                .iter()
                .map(|w| catalytic_lab::bits::format_word(w))
                .collect();
            json!({
                "code": code.name(),
                "op": "codewords",
                "count": words.len(),
                "value": words,
            })
        }
        other => {
            if let Some(msg) = other.strip_prefix("encode:") {
                let message = parse_bits(msg)?;
                if message.len() != code.k() {
                    return Err(format!(
                        "message must have {} bits, got {}",
                        code.k(),
                        message.len()
                    ));
                }
                json!({
                    "code": code.name(),
                    "op": "encode",
                    "message": msg,
                    "value": catalytic_lab::bits::format_word(&code.encode(&message)),
                })
            } else if let Some(word) = other.strip_prefix("decode:") {
                let word = parse_bits(word)?;
                if word.len() != code.n() {
                    return Err(format!(
                        "word must have {} bits, got {}",
                        code.n(),
                        word.len()
                    ));
                }
                match code.decode(&word) {
                    DecodeOutcome::Decoded {
                        message,
                        codeword,
                        errors,
                    } => json!({
                        "code": code.name(),
                        "op": "decode",
                        "decoded": true,
                        "message": catalytic_lab::bits::format_word(&message),
                        "value": catalytic_lab::bits::format_word(&codeword),
                        "errors": errors,
                    }),
                    DecodeOutcome::Failure => json!({
                        "code": code.name(),
                        "op": "decode",
                        "decoded": false,
                    }),
                }
            } else {
                return Err(format!(
                    "unknown op {other:?}; expected summary, min-distance, covering-radius, \
                     codewords, encode:<bits>, or decode:<bits>"
                ));
            }
        }
    };
    emit(cli, &serde_json::to_string_pretty(&value).unwrap())?;
    Ok(0)
}

fn cmd_zpp(cli: &Cli, args: &ZppArgs) -> Result<i32, String> {
    let build = |desc: &str, inner_spec: &Option<String>| -> Result<Arc<dyn CatalyticMachine>, String> {
        let inner = match inner_spec {
            Some(spec) => Some(load_table(spec).map_err(|e| e.to_string())?),
            None => None,
        };
        parse_engine(desc, inner.as_ref(), args.c).map_err(|e| e.to_string())
    };
    let one = build(&args.engine_one, &args.inner)?;
    let inner_two = args.inner_two.clone().or_else(|| args.inner.clone());
    let two = build(&args.engine_two, &inner_two)?;
    let input = parse_bits(&args.input)?;
    let budget = args.budget.unwrap_or_else(|| {
        default_budget(one.as_ref(), input.len()).max(default_budget(two.as_ref(), input.len()))
    });
    let report = expected_runtime(one.as_ref(), two.as_ref(), &input, None, budget)
        .map_err(|e| e.to_string())?;
    emit(cli, &report.to_json())?;
    Ok(i32::from(!report.overall_pass))
}

fn cmd_report(cli: &Cli, args: &ReportArgs) -> Result<i32, String> {
    let text = std::fs::read_to_string(&args.path)
        .map_err(|e| format!("cannot read {}: {e}", args.path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| format!("not a JSON report: {e}"))?;
    let pass = match value.get("overall_pass") {
        Some(serde_json::Value::Bool(b)) => *b,
        Some(_) => return Err("overall_pass is not a boolean".into()),
        // Reports from pure computations carry no verdict.
        None => true,
    };
    emit(cli, &serde_json::to_string_pretty(&value).unwrap())?;
    Ok(i32::from(!pass))
}

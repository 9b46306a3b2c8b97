//! Textual descriptors: the one-line grammar the command line speaks.
//!
//! Sets, codes, engines, inner tables, and dense point-set masks can all be
//! named by short strings so that experiments are reproducible from a shell
//! history. The forms are:
//!
//! * **codes** — `rep:11`, `hamming:7`, `exthamming:8`, `rm:1,6`,
//!   `random:12,4,99`. Parenthesized spellings like `rm(1,6)` are accepted
//!   anywhere a code appears.
//! * **sets** — `all`, `empty`, `parity`, `parity:odd`, `tally`,
//!   `prefix-zero:2`, `codewords:rm(1,3)`, `ball:rm(1,3):1`,
//!   `centers:000000,111100:1`, `explicit:@words.txt`, `sparse:@words.txt`,
//!   `complement:<set>`. Files hold one binary word per line.
//! * **engines** — `tally`, `prefix-zero:2`, `full-decode:rm(1,6):15`,
//!   `block:rm(1,7):b=8,tau=1`, `sparse:@words.txt`, `extra-symbol:p=4`,
//!   `involution:first-bit:<inner-engine>`, plus the bundled native machines
//!   `parity-restorer:even`, `parity-restorer:odd`, `looping-parity`, and
//!   `eraser`.
//! * **tables** — a bundled fixture name such as `parity-mark`, or
//!   `@table.json` for a machine table on disk.
//! * **masks** — a file of hex digits encoding the `2^m` membership bits of
//!   a point set, point 0 in the most significant bit of the first digit;
//!   `m` is inferred from the digit count.
//!
//! A `@` prefix always means "read this file".

use std::sync::Arc;

use thiserror::Error;

use crate::bits::{parse_word, WordError};
use crate::codes::{CodeError, CodeSpec};
use crate::engines::{
    build_prefix_zero, build_tally, flip_first_bit_mask, BlockEngine, ExtraSymbolEngine,
    FullDecodeEngine, InvolutionEngine, SparseEngine,
};
use crate::fixtures::{fixture_table, EraserMachine, LoopingParityRestorer, ParityRestorer};
use crate::machine::{CatalyticMachine, MachineError};
use crate::measures::pointset::{BitVectorSet, MeasureError};
use crate::setlang::{CatalyticSet, SetError};
use crate::table::{MachineTable, TableError};

#[derive(Debug, Error)]
pub enum DescriptorError {
    #[error("unknown descriptor {0:?}")]
    Unknown(String),
    #[error("descriptor {descriptor:?} needs {what}")]
    Missing {
        what: &'static str,
        descriptor: String,
    },
    #[error("bad number in {descriptor:?}: {detail}")]
    BadNumber { descriptor: String, detail: String },
    #[error("cannot read {path:?}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

fn read_file(path: &str) -> Result<String, DescriptorError> {
    std::fs::read_to_string(path).map_err(|source| DescriptorError::Io {
        path: path.to_string(),
        source,
    })
}

/// Interprets `@path` arguments; returns the file contents, or `None` when
/// the argument is not a file reference.
fn file_contents(arg: &str) -> Result<Option<String>, DescriptorError> {
    match arg.strip_prefix('@') {
        Some(path) => read_file(path).map(Some),
        None => Ok(None),
    }
}

fn parse_usize(desc: &str, field: &str) -> Result<usize, DescriptorError> {
    field
        .trim()
        .parse()
        .map_err(|e: std::num::ParseIntError| DescriptorError::BadNumber {
            descriptor: desc.to_string(),
            detail: format!("{field:?}: {e}"),
        })
}

fn parse_u64(desc: &str, field: &str) -> Result<u64, DescriptorError> {
    field
        .trim()
        .parse()
        .map_err(|e: std::num::ParseIntError| DescriptorError::BadNumber {
            descriptor: desc.to_string(),
            detail: format!("{field:?}: {e}"),
        })
}

fn need_len(desc: &str, len: Option<usize>) -> Result<usize, DescriptorError> {
    len.ok_or_else(|| DescriptorError::Missing {
        what: "a length (--len)",
        descriptor: desc.to_string(),
    })
}

/// Parses a code descriptor. Both `rm:1,6` and `rm(1,6)` are accepted.
pub fn parse_code(desc: &str) -> Result<CodeSpec, DescriptorError> {
    let desc = desc.trim();
    // Normalize `name(args)` to `name:args`.
    let (name, args) = if let Some((name, rest)) = desc.split_once('(') {
        match rest.strip_suffix(')') {
            Some(args) => (name, Some(args)),
            None => return Err(DescriptorError::Unknown(desc.to_string())),
        }
    } else {
        match desc.split_once(':') {
            Some((name, args)) => (name, Some(args)),
            None => (desc, None),
        }
    };
    let args = args.unwrap_or("");
    let fields: Vec<&str> = args.split(',').map(str::trim).collect();
    match (name, fields.as_slice()) {
        ("rep", [n]) => Ok(CodeSpec::Repetition {
            n: parse_usize(desc, n)?,
        }),
        ("hamming", ["7"]) | ("hamming", ["7", "4"]) => Ok(CodeSpec::Hamming),
        ("exthamming", ["8"]) | ("exthamming", ["8", "4"]) => Ok(CodeSpec::ExtendedHamming),
        ("rm", [order, m]) if *order == "1" => Ok(CodeSpec::ReedMuller {
            m: parse_usize(desc, m)?,
        }),
        ("rm", [_, _]) => Err(DescriptorError::BadNumber {
            descriptor: desc.to_string(),
            detail: "only first-order codes are supported (rm:1,m)".into(),
        }),
        ("random", [n, k, seed]) => Ok(CodeSpec::RandomLinear {
            n: parse_usize(desc, n)?,
            k: parse_usize(desc, k)?,
            seed: parse_u64(desc, seed)?,
        }),
        _ => Err(DescriptorError::Unknown(desc.to_string())),
    }
}

/// Splits `rest` at its *last* colon, so code descriptors containing colons
/// (`rm:1,3`) survive inside composite forms like `ball:rm:1,3:1`.
fn split_last_colon(rest: &str) -> Option<(&str, &str)> {
    rest.rfind(':').map(|i| (&rest[..i], &rest[i + 1..]))
}

fn words_from_text(text: &str) -> Result<(usize, Vec<Vec<u8>>), DescriptorError> {
    let mut words = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        words.push(parse_word(line)?);
    }
    let len = words.first().map(Vec::len).ok_or_else(|| {
        DescriptorError::BadNumber {
            descriptor: "@file".into(),
            detail: "the file contains no words".into(),
        }
    })?;
    Ok((len, words))
}

/// Parses a set descriptor. `len` supplies the word length for families that
/// do not fix one themselves (files and codes carry their own).
pub fn parse_set(desc: &str, len: Option<usize>) -> Result<CatalyticSet, DescriptorError> {
    let desc = desc.trim();
    let (head, rest) = desc.split_once(':').unwrap_or((desc, ""));
    match head {
        "all" => Ok(CatalyticSet::All {
            len: need_len(desc, len)?,
        }),
        "empty" => Ok(CatalyticSet::Empty {
            len: need_len(desc, len)?,
        }),
        "parity" if rest.is_empty() || rest == "even" => {
            Ok(CatalyticSet::parity_even(need_len(desc, len)?))
        }
        "parity" if rest == "odd" => Ok(CatalyticSet::parity_odd(need_len(desc, len)?)),
        "tally" => Ok(CatalyticSet::AllOnes {
            len: need_len(desc, len)?,
        }),
        "prefix-zero" => {
            let prefix_len = parse_usize(desc, rest)?;
            let len = need_len(desc, len)?;
            if prefix_len > len {
                return Err(DescriptorError::BadNumber {
                    descriptor: desc.to_string(),
                    detail: format!("prefix {prefix_len} exceeds length {len}"),
                });
            }
            Ok(CatalyticSet::PrefixZero { len, prefix_len })
        }
        "codewords" => Ok(CatalyticSet::codewords(parse_code(rest)?.build()?)),
        "ball" => {
            let (code, radius) =
                split_last_colon(rest).ok_or_else(|| DescriptorError::Missing {
                    what: "a radius (ball:<code>:<r>)",
                    descriptor: desc.to_string(),
                })?;
            Ok(CatalyticSet::ball(
                parse_code(code)?.build()?,
                parse_usize(desc, radius)?,
            )?)
        }
        "centers" => {
            let (centers, radius) =
                split_last_colon(rest).ok_or_else(|| DescriptorError::Missing {
                    what: "a radius (centers:<w>,..:<r>)",
                    descriptor: desc.to_string(),
                })?;
            let centers: Vec<Vec<u8>> = centers
                .split(',')
                .map(|w| parse_word(w.trim()))
                .collect::<Result<_, _>>()?;
            let len = centers.first().map(Vec::len).unwrap_or(0);
            Ok(CatalyticSet::centered_balls(
                len,
                centers,
                parse_usize(desc, radius)?,
            )?)
        }
        "explicit" => {
            let text = file_contents(rest)?.ok_or_else(|| DescriptorError::Missing {
                what: "a word file (explicit:@file)",
                descriptor: desc.to_string(),
            })?;
            let (file_len, words) = words_from_text(&text)?;
            Ok(CatalyticSet::explicit(len.unwrap_or(file_len), words)?)
        }
        "sparse" => {
            let text = file_contents(rest)?.ok_or_else(|| DescriptorError::Missing {
                what: "a word file (sparse:@file)",
                descriptor: desc.to_string(),
            })?;
            let (file_len, mut words) = words_from_text(&text)?;
            words.sort();
            Ok(CatalyticSet::sorted_words(len.unwrap_or(file_len), words)?)
        }
        "complement" => Ok(CatalyticSet::ComplementOf(Box::new(parse_set(
            rest, len,
        )?))),
        _ => Err(DescriptorError::Unknown(desc.to_string())),
    }
}

/// Loads an inner machine table: a bundled fixture name, or `@file` with the
/// JSON table format.
pub fn load_table(spec: &str) -> Result<Arc<MachineTable>, DescriptorError> {
    if let Some(text) = file_contents(spec)? {
        return Ok(Arc::new(MachineTable::from_json(&text)?));
    }
    fixture_table(spec).ok_or_else(|| DescriptorError::Unknown(spec.to_string()))
}

fn need_table(
    desc: &str,
    table: Option<&Arc<MachineTable>>,
) -> Result<Arc<MachineTable>, DescriptorError> {
    table.cloned().ok_or_else(|| DescriptorError::Missing {
        what: "an inner table (--inner)",
        descriptor: desc.to_string(),
    })
}

/// Parses an engine descriptor into a runnable machine.
///
/// `inner` supplies the hosted decision table for engines that simulate one;
/// `len` supplies the catalytic length for engines that do not derive it
/// from their own parameters.
pub fn parse_engine(
    desc: &str,
    inner: Option<&Arc<MachineTable>>,
    len: Option<usize>,
) -> Result<Arc<dyn CatalyticMachine>, DescriptorError> {
    let desc = desc.trim();
    let (head, rest) = desc.split_once(':').unwrap_or((desc, ""));
    match head {
        "tally" => Ok(Arc::new(build_tally(
            need_table(desc, inner)?,
            need_len(desc, len)?,
        )?)),
        "prefix-zero" => Ok(Arc::new(build_prefix_zero(
            need_table(desc, inner)?,
            need_len(desc, len)?,
            parse_usize(desc, rest)?,
        )?)),
        "full-decode" => {
            let (code, space) =
                split_last_colon(rest).ok_or_else(|| DescriptorError::Missing {
                    what: "an inner space bound (full-decode:<code>:<s>)",
                    descriptor: desc.to_string(),
                })?;
            Ok(Arc::new(FullDecodeEngine::build(
                parse_code(code)?.build()?,
                need_table(desc, inner)?,
                parse_usize(desc, space)?,
            )?))
        }
        "block" => {
            let (code, params) =
                split_last_colon(rest).ok_or_else(|| DescriptorError::Missing {
                    what: "parameters (block:<code>:b=<b>,tau=<t>)",
                    descriptor: desc.to_string(),
                })?;
            let mut block_len = None;
            let mut tau = None;
            for pair in params.split(',') {
                match pair.trim().split_once('=') {
                    Some(("b", v)) => block_len = Some(parse_usize(desc, v)?),
                    Some(("tau", v)) => tau = Some(parse_usize(desc, v)?),
                    _ => return Err(DescriptorError::Unknown(desc.to_string())),
                }
            }
            let (Some(block_len), Some(tau)) = (block_len, tau) else {
                return Err(DescriptorError::Missing {
                    what: "both b= and tau=",
                    descriptor: desc.to_string(),
                });
            };
            Ok(Arc::new(BlockEngine::build(
                parse_code(code)?.build()?,
                need_table(desc, inner)?,
                block_len,
                tau,
            )?))
        }
        "sparse" => {
            let set = parse_set(desc, len)?;
            Ok(Arc::new(SparseEngine::build(
                need_table(desc, inner)?,
                set,
                None,
            )?))
        }
        "extra-symbol" => {
            let p = match rest.strip_prefix("p=") {
                Some(v) => parse_usize(desc, v)?,
                None => parse_usize(desc, rest)?,
            };
            Ok(Arc::new(ExtraSymbolEngine::build(
                need_table(desc, inner)?,
                p,
            )?))
        }
        "involution" => {
            let (mask_name, inner_desc) =
                split_once_checked(rest, desc, "a mask and an inner engine")?;
            if mask_name != "first-bit" {
                return Err(DescriptorError::Unknown(desc.to_string()));
            }
            let wrapped = parse_engine(inner_desc, inner, len)?;
            let c = wrapped.catalytic_length();
            let mask = flip_first_bit_mask(c);
            // The wrapper's restoration set is the mask-image of everything
            // the inner machine restores.
            let members = crate::bits::all_words(c)
                .filter(|w| wrapped.restores(&crate::bits::xor(w, &mask)));
            let set = CatalyticSet::explicit(c, members)?;
            Ok(Arc::new(InvolutionEngine::build(wrapped, mask, set)?))
        }
        "parity-restorer" => {
            let odd = match rest {
                "even" | "" => false,
                "odd" => true,
                _ => return Err(DescriptorError::Unknown(desc.to_string())),
            };
            Ok(Arc::new(ParityRestorer::new(need_len(desc, len)?, odd)?))
        }
        "looping-parity" => Ok(Arc::new(LoopingParityRestorer::new(need_len(desc, len)?)?)),
        "eraser" => Ok(Arc::new(EraserMachine::new(need_len(desc, len)?)?)),
        _ => Err(DescriptorError::Unknown(desc.to_string())),
    }
}

fn split_once_checked<'a>(
    rest: &'a str,
    desc: &str,
    what: &'static str,
) -> Result<(&'a str, &'a str), DescriptorError> {
    rest.split_once(':').ok_or_else(|| DescriptorError::Missing {
        what,
        descriptor: desc.to_string(),
    })
}

/// Loads a hex mask file into a dense point set; the dimension is inferred
/// from the number of hex digits (`digits * 4 = 2^m`).
pub fn load_mask(path: &str) -> Result<BitVectorSet, DescriptorError> {
    let text = read_file(path)?;
    let hex: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bits = hex
        .len()
        .checked_mul(4)
        .filter(|b| b.is_power_of_two())
        .ok_or_else(|| DescriptorError::BadNumber {
            descriptor: path.to_string(),
            detail: format!("{} hex digits do not cover a power-of-two point count", hex.len()),
        })?;
    Ok(BitVectorSet::from_hex(bits.trailing_zeros() as usize, &hex)?)
}

/// Resolves a point set for the measure commands: `mask:@file` for a raw hex
/// mask, any set descriptor otherwise.
pub fn parse_point_set(desc: &str, len: Option<usize>) -> Result<BitVectorSet, DescriptorError> {
    if let Some(rest) = desc.trim().strip_prefix("mask:") {
        let path = rest.strip_prefix('@').unwrap_or(rest);
        return load_mask(path);
    }
    Ok(BitVectorSet::from_catalytic(&parse_set(desc, len)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    use crate::machine::run;

    #[test]
    fn code_descriptors_cover_both_spellings() {
        assert_eq!(parse_code("rm:1,6").unwrap(), CodeSpec::ReedMuller { m: 6 });
        assert_eq!(parse_code("rm(1,6)").unwrap(), CodeSpec::ReedMuller { m: 6 });
        assert_eq!(parse_code("rep:11").unwrap(), CodeSpec::Repetition { n: 11 });
        assert_eq!(parse_code("hamming:7").unwrap(), CodeSpec::Hamming);
        assert_eq!(parse_code("exthamming:8").unwrap(), CodeSpec::ExtendedHamming);
        assert_eq!(
            parse_code("random:12,4,99").unwrap(),
            CodeSpec::RandomLinear {
                n: 12,
                k: 4,
                seed: 99
            }
        );
        assert!(parse_code("rm:2,4").is_err());
        assert!(parse_code("turbo:9").is_err());
    }

    #[test]
    fn set_descriptors_build_the_right_families() {
        let parity = parse_set("parity", Some(4)).unwrap();
        assert_eq!(parity.count(), 8u32.into());
        assert!(parity.contains(&[0, 0, 0, 0]));
        let odd = parse_set("parity:odd", Some(4)).unwrap();
        assert!(!odd.contains(&[0, 0, 0, 0]));
        assert_eq!(parse_set("tally", Some(3)).unwrap().enumerate().unwrap(), vec![vec![
            1, 1, 1
        ]]);
        let cw = parse_set("codewords:rm(1,3)", None).unwrap();
        assert_eq!(cw.count(), 16u32.into());
        let ball = parse_set("ball:rm:1,3:1", None).unwrap();
        assert_eq!(ball.count(), (16u32 * 9).into());
        let pz = parse_set("prefix-zero:2", Some(6)).unwrap();
        assert!(pz.contains(&[0, 0, 1, 0, 1, 1]));
        assert!(!pz.contains(&[0, 1, 1, 0, 1, 1]));
        let two_balls = parse_set("centers:000000,111100:1", None).unwrap();
        assert_eq!(two_balls.count(), 14u32.into());
        let comp = parse_set("complement:parity", Some(4)).unwrap();
        assert!(!comp.contains(&[0, 0, 0, 0]));
        assert!(parse_set("parity", None).is_err());
        assert!(parse_set("prefix-zero:9", Some(4)).is_err());
    }

    #[test]
    fn word_files_feed_explicit_and_sparse_sets() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# three words\n0101\n1100\n\n0011").unwrap();
        let desc = format!("explicit:@{}", file.path().display());
        let set = parse_set(&desc, None).unwrap();
        assert_eq!(set.count(), 3u32.into());
        let desc = format!("sparse:@{}", file.path().display());
        let set = parse_set(&desc, None).unwrap();
        let members = set.sorted_members().expect("sparse sets expose members");
        assert_eq!(members.len(), 3);
        assert!(members.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn engine_descriptors_build_runnable_machines() {
        let inner = fixture_table("parity-mark").unwrap();
        let tally = parse_engine("tally", Some(&inner), Some(4)).unwrap();
        assert_eq!(tally.catalytic_length(), 4);
        let fd = parse_engine("full-decode:rm(1,3):1", Some(&inner), None).unwrap();
        assert_eq!(fd.catalytic_length(), 8);
        let result = run(fd.as_ref(), &[1], &[0u8; 8], 100_000, false).unwrap();
        assert_eq!(result.final_catalytic, vec![0u8; 8]);
        let block = parse_engine("block:rep:21:b=3,tau=1", Some(&inner), None).unwrap();
        assert_eq!(block.catalytic_length(), 21);
        let xs = parse_engine("extra-symbol:p=2", Some(&inner), None).unwrap();
        assert_eq!(xs.catalytic_length(), 8);
        assert_eq!(xs.catalytic_alphabet().len(), 3);
        assert!(parse_engine("tally", None, Some(4)).is_err());
        assert!(parse_engine("tally", Some(&inner), None).is_err());
        assert!(parse_engine("warp-drive", Some(&inner), None).is_err());
    }

    #[test]
    fn the_involution_descriptor_derives_the_mirrored_set() {
        let wrapped = parse_engine("involution:first-bit:parity-restorer:even", None, Some(6))
            .unwrap();
        // The even restorer's set mirrored through the first-bit flip is the
        // odd-parity set.
        assert!(wrapped.restores(&[1, 0, 0, 0, 0, 0]));
        assert!(!wrapped.restores(&[0, 0, 0, 0, 0, 0]));
        let w = vec![1u8, 1, 1, 0, 0, 0];
        let result = run(wrapped.as_ref(), &[1, 0], &w, 1_000_000, false).unwrap();
        assert_eq!(result.final_catalytic, w);
    }

    #[test]
    fn sparse_engine_descriptors_read_their_member_file() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "00000011\n01000000\n10000001").unwrap();
        let inner = fixture_table("parity-mark").unwrap();
        let desc = format!("sparse:@{}", file.path().display());
        let engine = parse_engine(&desc, Some(&inner), None).unwrap();
        assert_eq!(engine.catalytic_length(), 8);
        assert!(engine.restores(&[0, 1, 0, 0, 0, 0, 0, 0]));
    }

    #[test]
    fn mask_files_round_trip_through_hex() {
        let inside = BitVectorSet::from_indices(4, [0usize, 3, 5, 15]);
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, "{}\n", inside.to_hex()).unwrap();
        let loaded = load_mask(&file.path().display().to_string()).unwrap();
        assert_eq!(loaded.m(), 4);
        assert_eq!(loaded.to_hex(), inside.to_hex());
        let via_desc =
            parse_point_set(&format!("mask:@{}", file.path().display()), None).unwrap();
        assert_eq!(via_desc.to_hex(), inside.to_hex());
        let direct = parse_point_set("parity", Some(3)).unwrap();
        assert_eq!(direct.len(), 4);
    }

    #[test]
    fn tables_load_from_fixture_names_and_files() {
        let fixture = load_table("parity-mark").unwrap();
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, "{}", fixture.to_json()).unwrap();
        let reloaded = load_table(&format!("@{}", file.path().display())).unwrap();
        assert_eq!(reloaded.to_json(), fixture.to_json());
        assert!(load_table("no-such-fixture").is_err());
    }
}

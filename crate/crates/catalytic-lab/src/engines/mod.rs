//! Native restoration engines: small-step machines that run a table-driven
//! inner machine on borrowed catalytic space and put the tape back.
//!
//! Each engine pairs a simulation strategy with the family of tapes it
//! promises to restore, declared through
//! [`CatalyticMachine::restores`](crate::machine::CatalyticMachine::restores)
//! and checked from the outside by the verification harness. Engines share
//! conventions: algorithm phases carry names with findable `simulate` /
//! `restore` tags, all bounded bookkeeping lives in the configuration's
//! auxiliary counters (audited to stay logarithmic in the tape length), and
//! host-computed arithmetic — decoding a codeword, a set-membership test —
//! counts as a single step.

pub(crate) mod common;

pub mod block;
pub mod extra_symbol;
pub mod full_decode;
pub mod involution;
pub mod simple;
pub mod sparse;

pub use block::BlockEngine;
pub use extra_symbol::ExtraSymbolEngine;
pub use full_decode::FullDecodeEngine;
pub use involution::{flip_first_bit_mask, InvolutionEngine};
pub use simple::{build_prefix_zero, build_tally, OverwriteEngine};
pub use sparse::SparseEngine;

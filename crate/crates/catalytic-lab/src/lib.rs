//! Simulator, verification harness, and combinatorial-measure toolkit for
//! almost-catalytic space-bounded computation.
//!
//! The crate models machines that borrow a full tape of someone else's data
//! as extra working space. A machine is paired with a *catalytic set* `A`:
//! tapes in `A` must be restored bit-for-bit by the time the machine halts,
//! while the accept/reject decision must be correct for every starting tape.
//! The pieces:
//!
//! - [`machine`]: configurations, the machine trait, and the step loop.
//! - [`table`]: table-driven inner machines and their JSON interchange format.
//! - [`setlang`]: the language of catalytic sets.
//! - [`codes`]: small binary linear codes with certified parameters, used by
//!   the decoding-based restoration strategies.
//! - [`engines`]: restoration engines that wrap an inner machine and manage
//!   the borrowed tape.
//! - [`measures`]: combinatorial measures of subsets of the cube (subcube
//!   partition complexity, projection statistics, Fourier spectra).
//! - [`verify`]: sweep harnesses checking restoration, decision correctness,
//!   and the configuration-disjointness accounting.
//! - [`zpp`]: dovetailing two one-sided machines into an expected-time
//!   decider.

pub mod bits;
pub mod codes;
pub mod descriptor;
pub mod engines;
pub mod fixtures;
pub mod machine;
pub mod measures;
pub mod setlang;
pub mod table;
pub mod verify;
pub mod zpp;

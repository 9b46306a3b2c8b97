//! Combinatorial complexity measures on subsets of the Boolean cube.
//!
//! Three exact measures, each with a verifiable output:
//!
//! * [`partition::partition_measure`] — the least number of disjoint
//!   subcubes partitioning the set, with a witness partition;
//! * [`projection::projection_measure`] — the highest dimension whose
//!   coordinate projections cover at least half their target cube on all
//!   but an `ε` fraction of coordinate subsets;
//! * [`spectrum::wht_spectrum`] — the exact Fourier spectrum of the set's
//!   ±1 indicator, as integer numerators.
//!
//! Sets are dense bitmask-backed [`pointset::BitVectorSet`]s, convertible
//! from the symbolic [`crate::setlang::CatalyticSet`] descriptions used by
//! the machine layer.

pub mod partition;
pub mod pointset;
pub mod projection;
pub mod spectrum;

pub use partition::{is_valid_partition, partition_measure, PartitionOutcome};
pub use pointset::{ball, ball_union, parity_set, BitVectorSet, MeasureError, Subcube};
pub use projection::{
    projection_measure, projection_measure_sampled, Fraction, LevelStat, ProjectionOutcome,
};
pub use spectrum::{
    degree_one_mass_bound, dyadic_display, naive_spectrum, threshold_set, wht_spectrum,
    DegreeOneCertificate, Spectrum,
};

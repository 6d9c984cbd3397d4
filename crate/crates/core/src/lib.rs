//! Numerical laboratory for Möbius disjointness over tree and graph
//! dynamical systems.
//!
//! The crate combines a segmented Möbius/Liouville sieve with a metric-tree
//! topology core and a catalog of concrete zero-entropy (plus one
//! positive-entropy control) dynamical systems, and computes the weighted
//! averages `S_N(x, φ) = (1/N) Σ_{n≤N} μ(n) φ(fⁿ(x))` whose decay the
//! disjointness property predicts.
//!
//! Layout:
//!
//! * [`arithmetic`] — sieving μ and λ on large ranges, Mertens means,
//!   progression means, multiple autocorrelations, gap-bounded means.
//! * [`topology`] — finite metric trees and graphs, the truncated universal
//!   dendrite of order 3, arcs, distances, point orders, retractions.
//! * [`systems`] — the dynamical-system catalog behind a uniform stepping
//!   interface.
//! * [`analyzer`] — Möbius-weighted averages, test functions, entropy
//!   estimation, pair classification and the bound decompositions used to
//!   cross-check the theory numerically.

pub mod analyzer;
pub mod arithmetic;
mod error;
pub mod rng;
pub mod systems;
pub mod topology;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Absolute tolerance used for point equality on metric models.
///
/// Orbit positions are floating point; two points closer than this are
/// treated as equal wherever a decision has to be made (boundary membership,
/// duplicate detection, degenerate arcs).
pub const POINT_TOLERANCE: f64 = 1e-12;

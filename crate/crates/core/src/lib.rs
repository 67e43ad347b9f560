//! Nilpotent Lie algebras built from finite acyclic quivers.
//!
//! A quiver `Q` without directed cycles has finitely many paths. The span of
//! those paths, with the commutator of concatenation as bracket, is a nilpotent
//! Lie algebra `n_Q` whose step equals the length of the longest path. This
//! crate builds `n_Q` exactly, computes the Ricci curvature of diagonal
//! left-invariant metrics in rational arithmetic, and constructs a metric
//! satisfying `Ric = -id + D` with `D` a diagonal derivation, together with a
//! certificate that checks every claimed identity.
//!
//! Module map:
//!
//! - [`quiver`]: quivers, validation, paths, the starting-set reduction and
//!   arrow automorphisms.
//! - [`dsl`]: the plain-text quiver format, DOT export, JSON certificates.
//! - [`lie`]: the bracket table, grading, central series, derivations.
//! - [`ricci`]: diagonal metrics and exact Ricci curvature.
//! - [`soliton`]: the recursive soliton construction and its certificate.
//! - [`suite`]: the full invariant suite run by `random --verify`.
//! - [`cli`]: the command-line front end.

pub mod cli;
pub mod dsl;
pub mod lie;
pub mod random;
pub mod rational;
pub mod ricci;
pub mod soliton;
pub mod suite;
pub mod quiver;

pub use lie::{build_algebra, DiagonalMap, QuiverLieAlgebra};
pub use quiver::{ArrowPermutation, PathSeq, Quiver, QuiverError};
pub use rational::Rational;
pub use ricci::DiagonalMetric;
pub use soliton::{construct_soliton_metric, verify_certificate, SolitonCertificate};

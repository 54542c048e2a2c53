//! Nets over directed sets and their convergence structures, executable.
//!
//! The centerpiece is the constructive diagonal principle for nets: given a
//! chain of subnet extractions `A_0 <- A_1 <- ...`, the [`diagonal`] module
//! materializes the index set `B` of compatible tuples, its join, and the
//! cofinal/eventual-subnet witness maps, and verifies every claimed law by
//! sampling plus the exhaustive finite-model [`oracle`]. The [`scenarios`]
//! module runs the applications (product compactness, sequential compactness
//! of totally bounded complete metric spaces, the dual-ball extraction, the
//! closedness of un-compact operators, and the subsequence counterexample)
//! at desk scale with machine-readable reports.
//!
//! Directed sets are contracts, never enumerations: a [`directed::DirectedSet`]
//! carries comparison, upper-bound and sampling oracles over canonically
//! encoded [`element::Element`] values. Subnets are cofinal maps whose
//! witnesses are data ([`nets::CofinalMap`]), which is what makes the
//! constructions executable.
//!
//! The sampling harnesses and the finite-model sweep are data-parallel;
//! the `parallel` feature (default) runs them on rayon, and disabling it
//! falls back to identical sequential loops.

pub mod convergence;
pub mod diagonal;
pub mod directed;
pub mod element;
pub mod error;
pub mod extractors;
pub mod nets;
pub mod oracle;
pub mod par;
pub mod report;
pub mod rng;
pub mod scenarios;

pub use directed::{check_laws, naturals, DirectedSet, FiniteDirectedSet, ProductDirectedSet};
pub use element::Element;
pub use error::{Error, Result};
pub use nets::{compose_cofinal, frequent_subnet, subnet, tail_restrict, CofinalMap, Net};

//! Real m-Arf functions on Klein surfaces and the m-fold cover of the
//! isometry group of the hyperbolic plane.
//!
//! - [`topology`]: topological types and their decompositions.
//! - [`arf`]: value sets, validation, Arf invariants.
//! - [`enumeration`]: exhaustive counting against the closed forms.
//! - [`cover`]: covering-group arithmetic and the level function.
//! - [`identities`]: randomized checks of the covering-group identities.
//! - [`cli`]: the `arfspin` command-line front end.

pub mod arf;
pub mod cli;
pub mod cover;
pub mod enumeration;
pub mod error;
pub mod identities;
pub mod topology;

pub use arf::{
    arf_invariant_symmetric, arf_invariant_with_holes, spin_admissible, validate_real_value_set,
    ArfInvariantOutcome, ArfValueSet, RealArfFunction, SpinModulus, ValidationError,
};
pub use cover::{CoverElement, CoverGroup, Ideal, Isometry, Orientation};
pub use enumeration::{
    brute_force_counts, closed_form_count, enumerate_real_arf_functions, verify_range, CountReport,
    Tally,
};
pub use error::{Error, Result};
pub use topology::{
    admissible_n_values, canonical_decomposition, is_valid_topological_type, Decomposition,
    TopologicalType,
};

//! Mealy and time-varying automata over finite alphabets, the groups of
//! rooted-tree automorphisms they generate, and exact procedures for the
//! word problem, element orders and abelian group identification.

pub mod automaton;
pub mod classify;
pub mod cli;
pub mod constructions;
pub mod engine;
pub mod io;
pub mod lattice;

pub use automaton::{Automaton, Letter, Permutation, Schedule, StateId, StepTable};
pub use classify::GroupType;
pub use engine::{AutomatonGroup, Element, Factor, IdentityVerdict, Order, Sign, WreathRecursion};

/// Relation lattice over machine integers; the default for classification.
pub type RelationLattice = classify::RelationLattice<i64>;
/// Relation lattice over arbitrary precision integers.
pub type BigRelationLattice = classify::RelationLattice<num_bigint::BigInt>;
/// Hermite form over machine integers.
pub type HermiteForm = lattice::HermiteForm<i64>;

//! Parametric Linear Dynamic Logic (PLDL) toolkit.
//!
//! The pipeline goes formula -> alternating Büchi automaton -> nondeterministic
//! Büchi automaton, and from there either into a product with a transition
//! system (model checking) or through determinization into a parity game
//! (realizability). [`semantics`] is a slow, direct evaluator used to
//! cross-check every stage.

pub mod formula;
pub mod semantics;
pub mod automata;
pub mod graph;
pub mod nba;
pub mod mc;
pub mod random;
pub mod selftest;
pub mod synthesis;

//! Simulator and analysis toolkit for deterministic distributed algorithms on
//! anonymous networks represented as finite relational structures.
//!
//! The crate is organized around five pieces:
//!
//! - [`structures`]: finite relational models (domain, unary predicates, binary
//!   relations), pointed models, binary words, generators for labelled path and
//!   cycle graphs, structural validators, and a JSON file format.
//! - [`logic`]: modal and first-order formula ASTs, finite-model evaluation,
//!   the standard translation into first-order logic, and a hash-consed table
//!   of modal types obtained by successive neighbourhood refinement.
//! - [`engine`]: synchronous execution of message-passing automata over models,
//!   with per-round traces, accept/reject verdicts, and locality probes.
//! - [`nonlocal`]: the cube-detection automaton over labelled graphs that halts
//!   on every finite network yet cannot be replaced by any constant-round
//!   automaton, plus the two-path separation experiment demonstrating this.
//! - [`cli`]: the command-line front end (`anetsim` binary).

pub mod cli;
pub mod engine;
pub mod logic;
pub mod nonlocal;
pub mod structures;

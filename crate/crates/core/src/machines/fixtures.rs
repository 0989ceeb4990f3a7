//! Small named machines used by examples, tests and the CLI.

use super::MooreMachine;
use crate::words::{Alphabet, Symbol};

/// Σ = {0, 1}, Q = (e, o), q0 = e; `1` toggles, `0` keeps.
pub fn parity() -> MooreMachine {
    let sigma = Alphabet::from_tokens(["0", "1"]).expect("distinct");
    let q = Alphabet::from_tokens(["e", "o"]).expect("distinct");
    MooreMachine::transparent_from_tables(sigma, q, 0, vec![0, 1, 1, 0]).expect("valid")
}

/// Σ = {a, b}, Q = (A, B), q0 = A; `a` resets to A and `b` to B.
pub fn last() -> MooreMachine {
    let sigma = Alphabet::from_tokens(["a", "b"]).expect("distinct");
    let q = Alphabet::from_tokens(["A", "B"]).expect("distinct");
    MooreMachine::transparent_from_tables(sigma, q, 0, vec![0, 1, 0, 1]).expect("valid")
}

/// A single-state machine over {a}.
pub fn trivial() -> MooreMachine {
    let sigma = Alphabet::from_tokens(["a"]).expect("distinct");
    let q = Alphabet::new([Symbol::atom("z")]).expect("distinct");
    MooreMachine::transparent_from_tables(sigma, q, 0, vec![0]).expect("valid")
}

//! The composition IR: a DAG over the generator set with an evaluator,
//! a validator, a serializer and brute-force equivalence checking.

mod equiv;
mod pipeline;
pub mod random;
mod serial;
mod term;

pub use equiv::{equivalent_bruteforce, Equivalence, FnTarget, MooreFn, ReverseFn, WordFunction};
pub use pipeline::{check_final, decompose_stage, expand_machines, full_decompose, Stage};
pub use serial::{deserialize, serialize, serialize_pretty, term_from_json, term_to_json};
pub use term::{accumulate, bit_trunc, rbit_trunc, reverse_accumulate, Node, NodeId, NodeKind, Term, TermBuilder};

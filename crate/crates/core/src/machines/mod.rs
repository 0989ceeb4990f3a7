//! Moore machines, reverse Moore machines, nondeterministic acceptors
//! and relation automata over padded product alphabets.

pub mod fixtures;
pub mod format;
mod moore;
mod nfa;
mod relation;

pub use format::MachineFile;
pub use moore::{classify_actions, ActionKind, Classification, MooreMachine, ReverseMooreMachine};
pub use nfa::Nfa;
pub use relation::{
    characteristic_graph, compose_length_preserving, deterministic_relation, graph_automaton, is_functional_bruteforce,
    reverse_graph_automaton, FunctionalReport, Mode, RelationAutomaton,
};

use crate::error::Result;
use crate::words::Word;

pub fn moore_run(m: &MooreMachine, w: &Word) -> Result<Word> {
    m.run(w)
}

pub fn moore_trunc(m: &MooreMachine, w: &Word) -> Result<Word> {
    m.run_trunc(w)
}

pub fn moore_rest(m: &MooreMachine, w: &Word) -> Result<Word> {
    m.run_rest(w)
}

pub fn rev_moore_run(r: &ReverseMooreMachine, w: &Word) -> Result<Word> {
    r.run(w)
}

pub fn rev_trunc(r: &ReverseMooreMachine, w: &Word) -> Result<Word> {
    r.run_trunc(w)
}

pub fn rev_rest(r: &ReverseMooreMachine, w: &Word) -> Result<Word> {
    r.run_rest(w)
}

pub fn reverse_machine(m: &MooreMachine) -> ReverseMooreMachine {
    m.reverse()
}

pub fn nfa_accepts(a: &Nfa, w: &Word) -> Result<bool> {
    a.accepts(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{rest, rev, words_up_to};

    #[test]
    fn parity_runs() {
        let p = fixtures::parity();
        let w = Word::from_tokens(["0", "1", "1"]);
        assert_eq!(p.run(&w).unwrap(), Word::from_tokens(["e", "e", "o", "e"]));
        assert_eq!(p.run_trunc(&w).unwrap(), Word::from_tokens(["e", "e", "o"]));
        assert_eq!(p.run_rest(&w).unwrap(), Word::from_tokens(["e", "o", "e"]));
        assert_eq!(p.run(&Word::empty()).unwrap(), Word::from_tokens(["e"]));
        let l = fixtures::last();
        assert_eq!(
            l.run_trunc(&Word::from_tokens(["a", "b"])).unwrap(),
            Word::from_tokens(["A", "A"])
        );
    }

    #[test]
    fn reverse_runs() {
        let sigma = crate::words::Alphabet::from_tokens(["a"]).unwrap();
        let q = crate::words::Alphabet::from_tokens(["f"]).unwrap();
        let r = ReverseMooreMachine::transparent_from_tables(sigma, q, 0, vec![0]).unwrap();
        assert_eq!(
            r.run(&Word::from_tokens(["a", "a"])).unwrap(),
            Word::from_tokens(["f", "f", "f"])
        );
        assert_eq!(r.run(&Word::empty()).unwrap(), Word::from_tokens(["f"]));
        let p = fixtures::parity();
        let rp = reverse_machine(&p);
        assert_eq!(rp.reverse(), p);
        for w in words_up_to(p.input(), 6) {
            assert_eq!(rp.run_trunc(&w).unwrap(), rev(&p.run_rest(&rev(&w)).unwrap()));
            assert_eq!(rp.run_rest(&w).unwrap(), rest(&rp.run(&w).unwrap()));
        }
    }

    #[test]
    fn classification() {
        let p = classify_actions(&fixtures::parity());
        assert_eq!(p.actions[0].1, ActionKind::Identity);
        assert_eq!(p.actions[1].1, ActionKind::Permutation);
        assert!(p.is_permutation());
        let l = classify_actions(&fixtures::last());
        assert!(l.is_reset() && !l.is_permutation());
        assert_eq!(ActionKind::of(&[0, 0, 1]), ActionKind::Other);
    }
}

//! Seeded generators. Every generator draws from `ChaCha8Rng` seeded with
//! `seed_from_u64`, so a seed fixes the output on every platform.
//!
//! Symbols: inputs are `a, b, c, …`, states `q0, q1, …`, outputs
//! `x, y, z, …`. Transition targets are uniform; machines start in `q0`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::term::{NodeId, Term, TermBuilder};
use crate::error::Result;
use crate::machines::{
    characteristic_graph, compose_length_preserving, deterministic_relation, graph_automaton, reverse_graph_automaton,
    Mode, MooreMachine, Nfa, RelationAutomaton, ReverseMooreMachine,
};
use crate::perm;
use crate::words::{Alphabet, CharFn, Symbol, Word};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn letters(start: u8, n: usize) -> Alphabet {
    Alphabet::new((0..n).map(|i| Symbol::atom(((start + i as u8) as char).to_string()))).expect("distinct letters")
}

/// `a, b, c, …`.
pub fn input_letters(n: usize) -> Alphabet {
    letters(b'a', n)
}

/// `x, y, z, …`.
pub fn output_letters(n: usize) -> Alphabet {
    letters(b'x', n)
}

pub fn state_names(n: usize) -> Alphabet {
    Alphabet::new((0..n).map(|i| Symbol::atom(format!("q{i}")))).expect("distinct names")
}

fn random_delta(rng: &mut ChaCha8Rng, nq: usize, ns: usize) -> Vec<usize> {
    (0..nq * ns).map(|_| rng.gen_range(0..nq)).collect()
}

/// Transparent machine with uniform transitions.
pub fn random_machine(states: usize, alphabet_size: usize, seed: u64) -> MooreMachine {
    let mut r = rng(seed);
    random_transparent(&mut r, &input_letters(alphabet_size), states)
}

fn random_transparent(r: &mut ChaCha8Rng, input: &Alphabet, states: usize) -> MooreMachine {
    let delta = random_delta(r, states.max(1), input.len());
    MooreMachine::transparent_from_tables(input.clone(), state_names(states.max(1)), 0, delta).expect("valid tables")
}

/// Machine with uniform transitions and outputs.
pub fn random_moore(r: &mut ChaCha8Rng, input: &Alphabet, states: usize, output: &Alphabet) -> MooreMachine {
    let nq = states.max(1);
    let delta = random_delta(r, nq, input.len());
    let eps = (0..nq).map(|_| r.gen_range(0..output.len())).collect();
    MooreMachine::from_tables(input.clone(), state_names(nq), 0, output.clone(), delta, eps).expect("valid tables")
}

/// Transparent reverse machine; the final state is `q0`.
pub fn random_reverse_machine(states: usize, alphabet_size: usize, seed: u64) -> ReverseMooreMachine {
    random_machine(states, alphabet_size, seed).reverse()
}

/// Every symbol acts as a uniform permutation, a reset to a uniform state,
/// or the identity, with equal odds.
pub fn random_perm_reset_machine(states: usize, alphabet_size: usize, seed: u64) -> MooreMachine {
    let mut r = rng(seed);
    let nq = states.max(1);
    let ns = alphabet_size;
    let mut delta = vec![0; nq * ns];
    for a in 0..ns {
        let action: Vec<usize> = match r.gen_range(0..3) {
            0 => {
                let mut p: Vec<usize> = (0..nq).collect();
                p.shuffle(&mut r);
                p
            }
            1 => vec![r.gen_range(0..nq); nq],
            _ => (0..nq).collect(),
        };
        for q in 0..nq {
            delta[q * ns + a] = action[q];
        }
    }
    MooreMachine::transparent_from_tables(input_letters(ns), state_names(nq), 0, delta).expect("valid tables")
}

/// Each triple is present with probability 0.3, each state initial with
/// probability 0.4 (at least one), final with probability 0.4.
pub fn random_nfa(states: usize, alphabet_size: usize, seed: u64) -> Nfa {
    let mut r = rng(seed);
    let nq = states.max(1);
    let mut initial: Vec<usize> = (0..nq).filter(|_| r.gen_bool(0.4)).collect();
    if initial.is_empty() {
        initial.push(r.gen_range(0..nq));
    }
    let finals: Vec<usize> = (0..nq).filter(|_| r.gen_bool(0.4)).collect();
    let mut triples = Vec::new();
    for q in 0..nq {
        for a in 0..alphabet_size {
            for t in 0..nq {
                if r.gen_bool(0.3) {
                    triples.push((q, a, t));
                }
            }
        }
    }
    Nfa::from_indices(input_letters(alphabet_size), state_names(nq), initial, finals, triples).expect("valid tables")
}

/// Size limits for random relations.
#[derive(Clone, Copy, Debug)]
pub struct Caps {
    pub max_states: usize,
    pub alphabet: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_states: 2,
            alphabet: 2,
        }
    }
}

/// Graph of a random length-preserving map: one or two stages, each the
/// truncated or rest run of a Moore machine or the truncated run of a
/// reverse machine, composed through an intermediate alphabet.
pub fn random_length_preserving_relation(seed: u64, caps: Caps) -> Result<RelationAutomaton> {
    let mut r = rng(seed);
    let stages = r.gen_range(1..=2);
    let mut input = input_letters(caps.alphabet.max(1));
    let mut rel: Option<RelationAutomaton> = None;
    for _ in 0..stages {
        let nq = r.gen_range(1..=caps.max_states.max(1));
        let output = output_letters(r.gen_range(1..=2));
        let stage = match r.gen_range(0..3) {
            0 => graph_automaton(&random_moore(&mut r, &input, nq, &output), Mode::Trunc)?,
            1 => graph_automaton(&random_moore(&mut r, &input, nq, &output), Mode::Rest)?,
            _ => {
                let m = random_moore(&mut r, &input, nq, &output);
                reverse_graph_automaton(&m.reverse())?
            }
        };
        rel = Some(match rel {
            None => stage,
            Some(prev) => compose_length_preserving(&prev, &stage)?,
        });
        input = output;
    }
    Ok(rel.expect("at least one stage"))
}

/// `w ↦` the prefix of `w` before the first `stop`.
pub fn prefix_until(sigma: &Alphabet, stop: &Symbol) -> Result<RelationAutomaton> {
    // 0: copying, 1: stopped (only (x, #) from here), 2: input ended, 3: dead
    let names = ["copy", "stopped", "ended", "dead"].map(Symbol::atom).to_vec();
    let stop = stop.clone();
    deterministic_relation(vec![sigma.clone(), sigma.clone()], names, 0, &[0, 1, 2], |s, c| {
        let (a, o) = (&c[0], &c[1]);
        Some(match s {
            0 if a.is_pad() => 3,
            0 if *a == stop => {
                if o.is_pad() {
                    1
                } else {
                    3
                }
            }
            0 if a == o => 0,
            1 if !a.is_pad() && o.is_pad() => 1,
            _ => 3,
        })
    })
}

/// `w ↦ w·u`.
pub fn append_suffix(sigma: &Alphabet, suffix: &Word) -> Result<RelationAutomaton> {
    let k = suffix.len();
    // 0: copying, 1..=k: emitted that many suffix characters, k+1: dead
    let dead = k + 1;
    let names: Vec<Symbol> = (0..=dead).map(|i| Symbol::atom(format!("s{i}"))).collect();
    let mut both = sigma.iter().cloned().collect::<Vec<_>>();
    for s in suffix.iter() {
        if !both.contains(s) {
            both.push(s.clone());
        }
    }
    let out = Alphabet::new(both)?;
    let suffix = suffix.clone();
    deterministic_relation(vec![sigma.clone(), out], names, 0, &[k], move |s, c| {
        let (a, o) = (&c[0], &c[1]);
        Some(if s == dead {
            dead
        } else if s == 0 && !a.is_pad() {
            if a == o {
                0
            } else {
                dead
            }
        } else if a.is_pad() && s < k && *o == suffix.0[s] {
            s + 1
        } else {
            dead
        })
    })
}

/// Binary map with character table `f` over `(Σ ∪ #)²`; the output has
/// the length of the longer input.
pub fn binary_charwise(
    sigma: &Alphabet,
    output: &Alphabet,
    f: impl Fn(&Symbol, &Symbol) -> Symbol,
) -> Result<RelationAutomaton> {
    let names = ["ok", "dead"].map(Symbol::atom).to_vec();
    deterministic_relation(
        vec![sigma.clone(), sigma.clone(), output.clone()],
        names,
        0,
        &[0],
        |s, c| {
            let both_pad = c[0].is_pad() && c[1].is_pad();
            let ok = if both_pad {
                c[2].is_pad()
            } else {
                f(&c[0], &c[1]) == c[2]
            };
            Some(if s == 0 && ok { 0 } else { 1 })
        },
    )
}

/// Xor on `{0,1}` with `#` read as `0`.
pub fn xor_relation() -> Result<RelationAutomaton> {
    let bits = crate::words::binary_alphabet();
    binary_charwise(&bits, &bits, |x, y| {
        let b = |s: &Symbol| s.as_atom() == Some("1");
        Symbol::atom(if b(x) != b(y) { "1" } else { "0" })
    })
}

/// The identity on `Σ*`.
pub fn identity_relation(sigma: &Alphabet) -> Result<RelationAutomaton> {
    let names = ["ok", "dead"].map(Symbol::atom).to_vec();
    deterministic_relation(vec![sigma.clone(), sigma.clone()], names, 0, &[0], |s, c| {
        Some(if s == 0 && !c[0].is_pad() && c[0] == c[1] { 0 } else { 1 })
    })
}

/// The map `w ↦ ε`.
pub fn empty_relation(sigma: &Alphabet) -> Result<RelationAutomaton> {
    let out = output_letters(1);
    let names = ["ok", "dead"].map(Symbol::atom).to_vec();
    deterministic_relation(vec![sigma.clone(), out], names, 0, &[0], |s, c| {
        Some(if s == 0 && !c[0].is_pad() && c[1].is_pad() {
            0
        } else {
            1
        })
    })
}

/// A functional relation from one of several families, picked by the
/// seed: length-preserving compositions, full runs (growing by one),
/// prefixes up to a stop symbol (shrinking), appended suffixes
/// (growing), characteristic functions, a binary character-wise map and
/// the identity.
pub fn random_functional_relation(seed: u64, caps: Caps) -> Result<RelationAutomaton> {
    let mut r = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let sigma = input_letters(caps.alphabet.max(1));
    let nq = r.gen_range(1..=caps.max_states.max(1));
    match seed % 7 {
        0 | 1 => random_length_preserving_relation(seed, caps),
        2 => graph_automaton(&random_moore(&mut r, &sigma, nq, &output_letters(2)), Mode::Full),
        3 => prefix_until(&sigma, sigma.get(sigma.len() - 1)),
        4 => {
            let k = r.gen_range(1..=2);
            let suffix: Word = (0..k).map(|_| sigma.get(r.gen_range(0..sigma.len())).clone()).collect();
            append_suffix(&sigma, &suffix)
        }
        5 => {
            let d = random_transparent(&mut r, &sigma, nq);
            let accepting: Vec<usize> = (0..nq).filter(|_| r.gen_bool(0.5)).collect();
            characteristic_graph(&d, &accepting)
        }
        _ => {
            if r.gen_bool(0.5) {
                xor_relation()
            } else {
                identity_relation(&sigma)
            }
        }
    }
}

/// A random valid term over `{a, b}` (arity 1 or 2) mixing every node
/// kind; symbol sets are tracked so that every table and machine
/// alphabet covers what its child can emit.
pub fn random_term(seed: u64) -> Result<Term> {
    let mut r = rng(seed);
    let sigma = input_letters(2);
    let arity = r.gen_range(1..=2);
    let mut tb = TermBuilder::new(vec![sigma.clone(); arity]);
    let mut pool: Vec<(NodeId, Alphabet)> = (0..arity).map(|i| (tb.input(i), sigma.clone())).collect();
    let steps = r.gen_range(1..=8);
    for _ in 0..steps {
        let (child, set) = pool[r.gen_range(0..pool.len())].clone();
        let made = match r.gen_range(0..12) {
            0 => {
                let w: Word = (0..r.gen_range(0..3))
                    .map(|_| sigma.get(r.gen_range(0..2)).clone())
                    .collect();
                (tb.constant(w), sigma.clone())
            }
            1 => {
                let a = Symbol::atom(["a", "z", "#"][r.gen_range(0..3)]);
                let next = Alphabet::new(set.iter().cloned().chain((!set.contains(&a)).then_some(a.clone())))?;
                (tb.succ(a, child), next)
            }
            2 => (tb.unpad(child), set),
            3 if pool.len() > 1 => {
                let (other, oset) = pool[r.gen_range(0..pool.len())].clone();
                let all_pad = Symbol::tuple([Symbol::pad(), Symbol::pad()]);
                let tuples = Alphabet::padded_product(&[set, oset]);
                let tuples = Alphabet::new(tuples.iter().filter(|s| **s != all_pad).cloned())?;
                (tb.tuplefy(vec![child, other]), tuples)
            }
            4 | 5 => {
                let out = output_letters(r.gen_range(1..=3));
                let table = CharFn::unary(&set, |_| Ok(out.get(r.gen_range(0..out.len())).clone()))?;
                (tb.cw(table, vec![child]), out)
            }
            6 => {
                let nq = r.gen_range(1..=3);
                let m = random_moore(&mut r, &set, nq, &output_letters(2));
                let out = m.output().clone();
                (tb.moore_trunc(m, child), out)
            }
            7 => {
                let nq = r.gen_range(1..=3);
                let m = random_moore(&mut r, &set, nq, &output_letters(2));
                let out = m.output().clone();
                (tb.rev_moore_trunc(m.reverse(), child), out)
            }
            8 | 9 => {
                let n = r.gen_range(1..=3);
                let perms = perm::all_perms(n, perm::Limits::default())?;
                let table = CharFn::unary(&set, |_| Ok(perm::to_symbol(&perms[r.gen_range(0..perms.len())])))?;
                let img = Alphabet::new(table.image())?;
                let g = tb.cw(table, vec![child]);
                let node = if r.gen_bool(0.5) {
                    tb.asn_trunc(n, g)
                } else {
                    tb.rasn_trunc(n, g)
                };
                let group = perm::closure(
                    n,
                    &img.iter()
                        .map(|s| s.as_perm().expect("perm").to_vec())
                        .collect::<Vec<_>>(),
                    perm::Limits::default(),
                    "random term",
                )?;
                (node, Alphabet::new(group.iter().map(|p| perm::to_symbol(p)))?)
            }
            10 => {
                let cmds = crate::krohnrhodes::bit_alphabet();
                let table = CharFn::unary(&set, |_| Ok(cmds.get(r.gen_range(0..3)).clone()))?;
                let c = tb.cw(table, vec![child]);
                let node = if r.gen_bool(0.5) {
                    tb.bit_trunc(c)
                } else {
                    tb.rbit_trunc(c)
                };
                (node, crate::words::binary_alphabet())
            }
            _ => (tb.mask(child), crate::words::binary_alphabet()),
        };
        pool.push(made);
    }
    let root = pool.last().expect("non-empty").0;
    tb.finish(root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::{is_functional_bruteforce, FunctionalReport};

    #[test]
    fn seeds_are_reproducible() {
        assert_eq!(random_machine(3, 2, 7), random_machine(3, 2, 7));
        assert_eq!(random_nfa(3, 2, 7).triples(), random_nfa(3, 2, 7).triples());
        assert_eq!(random_term(5).unwrap(), random_term(5).unwrap());
    }

    #[test]
    fn families_are_functional() {
        for seed in 0..14 {
            let rel = random_functional_relation(seed, Caps::default()).unwrap();
            let report = is_functional_bruteforce(&rel, 3).unwrap();
            assert_eq!(report, FunctionalReport::FunctionalUpTo(3), "seed {seed}");
        }
    }

    #[test]
    fn shrinking_and_growing() {
        let sigma = input_letters(2);
        let p = prefix_until(&sigma, &Symbol::atom("b")).unwrap();
        let w = Word::from_tokens(["a", "a", "b", "a"]);
        assert_eq!(p.unique_output(std::slice::from_ref(&w)).unwrap().to_string(), "a,a");
        let s = append_suffix(&sigma, &Word::from_tokens(["b"])).unwrap();
        assert_eq!(s.unique_output(&[w]).unwrap().to_string(), "a,a,b,a,b");
    }
}

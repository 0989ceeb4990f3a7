use std::collections::HashMap;

use super::{MooreMachine, Nfa, ReverseMooreMachine};
use crate::error::{Error, Result};
use crate::words::{tuplefy, tuples_up_to, Alphabet, Symbol, Word};

/// An automaton over a product alphabet whose accepted words encode the
/// graph of an `n`-ary relation: it accepts `tuplefy(w_0, …, w_{n-1}, v)`.
///
/// When `padded` is false the components are read in lockstep without any
/// padding convention, so `#` may be an ordinary component symbol. That
/// form is used for the length-normalized functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationAutomaton {
    base: Nfa,
    components: Vec<Alphabet>,
    padded: bool,
}

/// The run mode of a machine's graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Trunc,
    Rest,
    Full,
}

impl RelationAutomaton {
    /// Wraps `base`, re-indexing it over the full product alphabet. Base
    /// symbols must be tuples of width `components.len()`.
    pub fn new(base: Nfa, components: Vec<Alphabet>, padded: bool) -> Result<Self> {
        if components.len() < 2 {
            return Err(Error::ZeroArity);
        }
        if padded {
            for c in &components {
                if let Some(s) = c.iter().find(|s| s.is_reserved()) {
                    return Err(Error::ReservedPad(s.clone()));
                }
            }
        }
        let full = if padded {
            Alphabet::padded_product(&components)
        } else {
            Alphabet::product(&components)
        };
        if *base.alphabet() == full {
            return Ok(RelationAutomaton {
                base,
                components,
                padded,
            });
        }
        let mut triples = Vec::new();
        for (q, a, t) in base.triples() {
            let s = base.alphabet().get(a);
            let idx = full.require(s, "relation")?;
            triples.push((q, idx, t));
        }
        let base = Nfa::from_indices(
            full,
            base.states().clone(),
            base.initial().to_vec(),
            base.finals(),
            triples,
        )?;
        Ok(RelationAutomaton {
            base,
            components,
            padded,
        })
    }

    pub fn base(&self) -> &Nfa {
        &self.base
    }

    /// Number of input components.
    pub fn arity(&self) -> usize {
        self.components.len() - 1
    }

    pub fn components(&self) -> &[Alphabet] {
        &self.components
    }

    pub fn input_alphabets(&self) -> &[Alphabet] {
        &self.components[..self.arity()]
    }

    pub fn output_alphabet(&self) -> &Alphabet {
        &self.components[self.arity()]
    }

    pub fn is_padded(&self) -> bool {
        self.padded
    }

    /// The encoded word for a candidate pair, or `None` when the unpadded
    /// encoding does not apply (unequal lengths).
    pub fn encode(&self, inputs: &[Word], output: &Word) -> Result<Option<Word>> {
        let mut all: Vec<Word> = inputs.to_vec();
        all.push(output.clone());
        if self.padded {
            return tuplefy(&all).map(Some);
        }
        let len = all[0].len();
        if all.iter().any(|w| w.len() != len) {
            return Ok(None);
        }
        tuplefy(&all).map(Some)
    }

    pub fn accepts(&self, inputs: &[Word], output: &Word) -> Result<bool> {
        self.check_inputs(inputs)?;
        Ok(match self.encode(inputs, output)? {
            Some(w) => self.base.accepts_lenient(&w),
            None => false,
        })
    }

    fn check_inputs(&self, inputs: &[Word]) -> Result<()> {
        if inputs.len() != self.arity() {
            return Err(Error::LengthMismatch(format!(
                "{} inputs for a relation of arity {}",
                inputs.len(),
                self.arity()
            )));
        }
        for (w, a) in inputs.iter().zip(self.input_alphabets()) {
            w.check_over(a, "relation input")?;
        }
        Ok(())
    }

    /// Output words `v` with `|v| ≤ max|w_j| + extra` related to `inputs`,
    /// at most `limit` of them.
    pub fn outputs(&self, inputs: &[Word], extra: usize, limit: usize) -> Result<Vec<Word>> {
        self.check_inputs(inputs)?;
        let m = inputs.iter().map(Word::len).max().unwrap_or(0);
        let mut found = Vec::new();
        if !self.padded {
            if inputs.iter().any(|w| w.len() != m) {
                return Ok(found);
            }
            self.search(inputs, m, false, limit, &mut found);
            return Ok(found);
        }
        for len in m..=m + extra {
            if found.len() >= limit {
                break;
            }
            self.search(inputs, len, len == m, limit, &mut found);
        }
        Ok(found)
    }

    /// The unique related output, searching lengths up to
    /// `max|w_j| + |states|`.
    pub fn unique_output(&self, inputs: &[Word]) -> Result<Word> {
        let outs = self.outputs(inputs, self.base.num_states(), 2)?;
        match outs.len() {
            1 => Ok(outs.into_iter().next().expect("one")),
            0 => Err(Error::NotFunctional(format!("no output for ({})", show_inputs(inputs)))),
            _ => Err(Error::NotFunctional(format!(
                "outputs {} and {} for ({})",
                outs[0],
                outs[1],
                show_inputs(inputs)
            ))),
        }
    }

    /// Collects accepted outputs whose encoding has exactly `len`
    /// characters. `allow_pad` permits the output to end early.
    fn search(&self, inputs: &[Word], len: usize, allow_pad: bool, limit: usize, found: &mut Vec<Word>) {
        let nfa = &self.base;
        let nq = nfa.num_states();
        let out_alpha = self.output_alphabet();
        let pad_choice = out_alpha.len();
        let nchoice = out_alpha.len() + usize::from(allow_pad && self.padded);
        // chars[i][c]: base index of the character at position i with output choice c
        let chars: Vec<Vec<Option<usize>>> = (0..len)
            .map(|i| {
                let cols: Vec<Symbol> = inputs
                    .iter()
                    .map(|w| w.0.get(i).cloned().unwrap_or_else(Symbol::pad))
                    .collect();
                (0..nchoice)
                    .map(|c| {
                        let o = if c == pad_choice {
                            Symbol::pad()
                        } else {
                            out_alpha.get(c).clone()
                        };
                        let mut t = cols.clone();
                        t.push(o);
                        nfa.alphabet().index_of(&Symbol::tuple(t))
                    })
                    .collect()
            })
            .collect();
        // live[i][q * 2 + ended]: an accepting completion exists
        let mut live = vec![vec![false; nq * 2]; len + 1];
        for q in 0..nq {
            if nfa.is_final(q) {
                live[len][q * 2] = true;
                live[len][q * 2 + 1] = true;
            }
        }
        for i in (0..len).rev() {
            for q in 0..nq {
                for ended in 0..2 {
                    let mut ok = false;
                    for c in 0..nchoice {
                        if ended == 1 && c != pad_choice {
                            continue;
                        }
                        let Some(a) = chars[i][c] else { continue };
                        let e2 = usize::from(ended == 1 || c == pad_choice);
                        if nfa.successors(q, a).iter().any(|&t| live[i + 1][t * 2 + e2]) {
                            ok = true;
                            break;
                        }
                    }
                    live[i][q * 2 + ended] = ok;
                }
            }
        }
        let start: Vec<usize> = nfa.initial().iter().copied().filter(|&q| live[0][q * 2]).collect();
        if start.is_empty() {
            return;
        }
        // depth-first over output choices, smallest symbol first
        let mut stack: Vec<(usize, Vec<usize>, bool, Vec<Symbol>)> = vec![(0, start, false, Vec::new())];
        while let Some((i, set, ended, prefix)) = stack.pop() {
            if found.len() >= limit {
                return;
            }
            if i == len {
                found.push(Word(prefix));
                continue;
            }
            for c in (0..nchoice).rev() {
                if ended && c != pad_choice {
                    continue;
                }
                let Some(a) = chars[i][c] else { continue };
                let e2 = ended || c == pad_choice;
                let next: Vec<usize> = nfa
                    .step_set(&set, a)
                    .into_iter()
                    .filter(|&t| live[i + 1][t * 2 + usize::from(e2)])
                    .collect();
                if next.is_empty() {
                    continue;
                }
                let mut p = prefix.clone();
                if c != pad_choice {
                    p.push(out_alpha.get(c).clone());
                }
                stack.push((i + 1, next, e2, p));
            }
        }
    }
}

fn show_inputs(inputs: &[Word]) -> String {
    inputs.iter().map(|w| format!("\"{w}\"")).collect::<Vec<_>>().join(", ")
}

/// Outcome of the bounded functionality check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctionalReport {
    FunctionalUpTo(usize),
    NotTotal { input: Vec<Word> },
    NotUnique { input: Vec<Word>, outputs: [Word; 2] },
}

impl FunctionalReport {
    pub fn is_functional(&self) -> bool {
        matches!(self, FunctionalReport::FunctionalUpTo(_))
    }
}

/// Checks existence and uniqueness of outputs for every input tuple with
/// components of length at most `maxlen`.
pub fn is_functional_bruteforce(rel: &RelationAutomaton, maxlen: usize) -> Result<FunctionalReport> {
    let extra = rel.base().num_states();
    for input in tuples_up_to(rel.input_alphabets(), maxlen) {
        let outs = rel.outputs(&input, extra, 2)?;
        match outs.len() {
            0 => return Ok(FunctionalReport::NotTotal { input }),
            1 => {}
            _ => {
                let mut it = outs.into_iter();
                let a = it.next().expect("two");
                let b = it.next().expect("two");
                return Ok(FunctionalReport::NotUnique { input, outputs: [a, b] });
            }
        }
    }
    Ok(FunctionalReport::FunctionalUpTo(maxlen))
}

/// Builds a relation automaton from a deterministic step function over
/// the full padded product alphabet. `step` gets the components of a
/// character and returns the next state, `None` meaning reject.
pub fn deterministic_relation(
    components: Vec<Alphabet>,
    states: Vec<Symbol>,
    initial: usize,
    accepting: &[usize],
    mut step: impl FnMut(usize, &[Symbol]) -> Option<usize>,
) -> Result<RelationAutomaton> {
    let alphabet = Alphabet::padded_product(&components);
    let states = Alphabet::new(states)?;
    let mut triples = Vec::new();
    for q in 0..states.len() {
        for (a, s) in alphabet.iter().enumerate() {
            let comps = s.components().expect("product symbols are tuples");
            if let Some(t) = step(q, comps) {
                triples.push((q, a, t));
            }
        }
    }
    let base = Nfa::from_indices(alphabet, states, [initial], accepting.iter().copied(), triples)?;
    RelationAutomaton::new(base, components, true)
}

/// The graph of `M^Trunc`, `M^Rest` or `M` as a deterministic automaton.
///
/// States are `(q, i)` with `i = 0` while the proposed output has been
/// correct so far, plus `done` (full mode, after the final `(#, o)`) and
/// `dead` for malformed padding.
pub fn graph_automaton(m: &MooreMachine, mode: Mode) -> Result<RelationAutomaton> {
    if let Some(s) = m.input().iter().chain(m.output().iter()).find(|s| s.is_reserved()) {
        return Err(Error::ReservedPad(s.clone()));
    }
    let nq = m.num_states();
    let mut names: Vec<Symbol> = Vec::with_capacity(2 * nq + 2);
    for q in m.states().iter() {
        for bit in ["0", "1"] {
            names.push(Symbol::tuple([q.clone(), Symbol::atom(bit)]));
        }
    }
    let done = names.len();
    names.push(Symbol::atom("done"));
    let dead = names.len();
    names.push(Symbol::atom("dead"));
    let accepting: Vec<usize> = match mode {
        Mode::Full => vec![done],
        _ => (0..nq).map(|q| 2 * q).collect(),
    };
    let input = m.input().clone();
    let output = m.output().clone();
    deterministic_relation(
        vec![input.clone(), output.clone()],
        names,
        2 * m.start_index(),
        &accepting,
        |s, c| {
            if s == dead || s == done {
                return Some(dead);
            }
            let (q, i) = (s / 2, s % 2);
            let (a, o) = (&c[0], &c[1]);
            if a.is_pad() {
                if mode == Mode::Full && !o.is_pad() {
                    let ok = i == 0 && output.get(m.eps_index(q)) == o;
                    return Some(if ok { done } else { dead });
                }
                return Some(dead);
            }
            if o.is_pad() {
                return Some(dead);
            }
            let ai = input.index_of(a).expect("product component");
            let next = m.step(q, ai);
            let expected = match mode {
                Mode::Rest => m.eps_index(next),
                _ => m.eps_index(q),
            };
            let ok = i == 0 && output.get(expected) == o;
            Some(2 * next + usize::from(!ok))
        },
    )
}

/// The graph of `R^Trunc` as a forward automaton that guesses the run:
/// initial states are all of `Q`, reading `(a, o)` in state `q` requires
/// `ε(q) = o` and moves to any `q'` with `δ(q', a) = q`, and the only
/// accepting state is `q_f`.
pub fn reverse_graph_automaton(r: &ReverseMooreMachine) -> Result<RelationAutomaton> {
    let components = vec![r.input().clone(), r.output().clone()];
    let alphabet = Alphabet::padded_product(&components);
    let mut triples = Vec::new();
    for (ci, s) in alphabet.iter().enumerate() {
        let c = s.components().expect("tuple");
        if c[0].is_pad() || c[1].is_pad() {
            continue;
        }
        let a = r.input().index_of(&c[0]).expect("component");
        let o = r.output().index_of(&c[1]).expect("component");
        for later in 0..r.num_states() {
            let earlier = r.step(later, a);
            if r.eps_index(earlier) == o {
                triples.push((earlier, ci, later));
            }
        }
    }
    let base = Nfa::from_indices(
        alphabet,
        r.states().clone(),
        0..r.num_states(),
        [r.final_index()],
        triples,
    )?;
    RelationAutomaton::new(base, components, true)
}

/// Graph of `second ∘ first` for unary length-preserving relations,
/// guessing the intermediate character.
pub fn compose_length_preserving(first: &RelationAutomaton, second: &RelationAutomaton) -> Result<RelationAutomaton> {
    if first.arity() != 1 || second.arity() != 1 {
        return Err(Error::InvalidMachine("composition needs unary relations".into()));
    }
    if first.output_alphabet() != &second.components()[0] {
        return Err(Error::InvalidMachine("middle alphabets differ".into()));
    }
    let (fa, sa) = (first.base(), second.base());
    let components = vec![first.components()[0].clone(), second.output_alphabet().clone()];
    let alphabet = Alphabet::padded_product(&components);
    let n2 = sa.num_states();
    let names: Vec<Symbol> = fa
        .states()
        .iter()
        .flat_map(|p| sa.states().iter().map(move |q| Symbol::tuple([p.clone(), q.clone()])))
        .collect();
    let mut triples = Vec::new();
    let first_index: HashMap<(usize, usize), usize> = fa
        .alphabet()
        .iter()
        .enumerate()
        .filter_map(|(i, s)| {
            let c = s.components()?;
            Some((
                (
                    first.components()[0].index_of(&c[0])?,
                    first.output_alphabet().index_of(&c[1])?,
                ),
                i,
            ))
        })
        .collect();
    let second_index: HashMap<(usize, usize), usize> = sa
        .alphabet()
        .iter()
        .enumerate()
        .filter_map(|(i, s)| {
            let c = s.components()?;
            Some((
                (
                    second.components()[0].index_of(&c[0])?,
                    second.output_alphabet().index_of(&c[1])?,
                ),
                i,
            ))
        })
        .collect();
    for (ci, s) in alphabet.iter().enumerate() {
        let c = s.components().expect("tuple");
        let (Some(a), Some(o)) = (components[0].index_of(&c[0]), components[1].index_of(&c[1])) else {
            continue;
        };
        for b in 0..first.output_alphabet().len() {
            let (Some(&x), Some(&y)) = (first_index.get(&(a, b)), second_index.get(&(b, o))) else {
                continue;
            };
            for p in 0..fa.num_states() {
                for &p2 in fa.successors(p, x) {
                    for q in 0..n2 {
                        for &q2 in sa.successors(q, y) {
                            triples.push((p * n2 + q, ci, p2 * n2 + q2));
                        }
                    }
                }
            }
        }
    }
    let initial: Vec<usize> = fa
        .initial()
        .iter()
        .flat_map(|&p| sa.initial().iter().map(move |&q| p * n2 + q))
        .collect();
    let finals: Vec<usize> = fa
        .finals()
        .into_iter()
        .flat_map(|p| sa.finals().into_iter().map(move |q| p * n2 + q))
        .collect();
    let base = Nfa::from_indices(alphabet, Alphabet::new(names)?, initial, finals, triples)?;
    RelationAutomaton::new(base.trim_keep_empty(), components, true)
}

/// Graph of the characteristic function of the language of a complete
/// DFA `d` (a transparent Moore machine plus accepting states): every word
/// maps to the one-character word `1` or `0`.
pub fn characteristic_graph(d: &MooreMachine, accepting: &[usize]) -> Result<RelationAutomaton> {
    let bits = crate::words::binary_alphabet();
    let nq = d.num_states();
    let one = Symbol::atom("1");
    let accept_flag = |q: usize| accepting.contains(&q);
    // state layout: start, (q, bit) pairs, done, dead
    let mut names = vec![Symbol::atom("start")];
    for q in d.states().iter() {
        for b in ["0", "1"] {
            names.push(Symbol::tuple([q.clone(), Symbol::atom(b)]));
        }
    }
    let done = names.len();
    names.push(Symbol::atom("done"));
    let dead = names.len();
    names.push(Symbol::atom("dead"));
    let pair = |q: usize, b: bool| 1 + 2 * q + usize::from(b);
    let accepting_states: Vec<usize> = std::iter::once(done)
        .chain((0..nq).flat_map(|q| [pair(q, false), pair(q, true)]).filter(|&s| {
            let q = (s - 1) / 2;
            let b = (s - 1) % 2 == 1;
            accept_flag(q) == b
        }))
        .collect();
    let input = d.input().clone();
    deterministic_relation(vec![input.clone(), bits], names, 0, &accepting_states, |s, c| {
        let (a, o) = (&c[0], &c[1]);
        if s == 0 {
            if o.is_pad() {
                return Some(dead);
            }
            let b = *o == one;
            if a.is_pad() {
                return Some(if accept_flag(d.start_index()) == b { done } else { dead });
            }
            let ai = input.index_of(a).expect("component");
            return Some(pair(d.step(d.start_index(), ai), b));
        }
        if s == done || s == dead || a.is_pad() || !o.is_pad() {
            return Some(dead);
        }
        let (q, b) = ((s - 1) / 2, (s - 1) % 2 == 1);
        let ai = input.index_of(a).expect("component");
        Some(pair(d.step(q, ai), b))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::fixtures;
    use crate::words::words_up_to;

    #[test]
    fn trunc_graph_matches_run() {
        let p = fixtures::parity();
        let g = graph_automaton(&p, Mode::Trunc).unwrap();
        let w = Word::from_tokens(["0", "1", "1"]);
        assert!(g
            .accepts(std::slice::from_ref(&w), &Word::from_tokens(["e", "e", "o"]))
            .unwrap());
        assert!(!g.accepts(&[w], &Word::from_tokens(["e", "e", "e"])).unwrap());
        assert!(g.accepts(&[Word::empty()], &Word::empty()).unwrap());
        for w in words_up_to(p.input(), 4) {
            assert_eq!(
                g.unique_output(std::slice::from_ref(&w)).unwrap(),
                p.run_trunc(&w).unwrap()
            );
        }
    }

    #[test]
    fn full_and_rest_graphs() {
        let l = fixtures::last();
        let rest = graph_automaton(&l, Mode::Rest).unwrap();
        assert!(rest
            .accepts(&[Word::from_tokens(["a", "b"])], &Word::from_tokens(["A", "B"]))
            .unwrap());
        let full = graph_automaton(&l, Mode::Full).unwrap();
        for w in words_up_to(l.input(), 4) {
            assert_eq!(
                full.unique_output(std::slice::from_ref(&w)).unwrap(),
                l.run(&w).unwrap()
            );
        }
    }

    #[test]
    fn reverse_graph_matches_run() {
        let r = fixtures::parity().reverse();
        let g = reverse_graph_automaton(&r).unwrap();
        for w in words_up_to(r.input(), 4) {
            assert_eq!(
                g.unique_output(std::slice::from_ref(&w)).unwrap(),
                r.run_trunc(&w).unwrap()
            );
        }
    }

    #[test]
    fn functionality_reports() {
        let g = graph_automaton(&fixtures::parity(), Mode::Trunc).unwrap();
        assert_eq!(
            is_functional_bruteforce(&g, 4).unwrap(),
            FunctionalReport::FunctionalUpTo(4)
        );
        let comps = vec![
            Alphabet::from_tokens(["a"]).unwrap(),
            Alphabet::from_tokens(["0", "1"]).unwrap(),
        ];
        let none = deterministic_relation(comps.clone(), vec![Symbol::atom("s")], 0, &[], |_, _| Some(0)).unwrap();
        assert_eq!(
            is_functional_bruteforce(&none, 2).unwrap(),
            FunctionalReport::NotTotal {
                input: vec![Word::empty()]
            }
        );
        // both (w, 0^|w|) and (w, 1^|w|) family accepted
        let two = deterministic_relation(comps, vec![Symbol::atom("s"), Symbol::atom("x")], 0, &[0], |_, c| {
            Some(if c[0].is_pad() || c[1].is_pad() { 1 } else { 0 })
        })
        .unwrap();
        match is_functional_bruteforce(&two, 2).unwrap() {
            FunctionalReport::NotUnique { input, .. } => assert_eq!(input, vec![Word::from_tokens(["a"])]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn characteristic_function_graph() {
        let p = fixtures::parity();
        let g = characteristic_graph(&p, &[1]).unwrap();
        for w in words_up_to(p.input(), 4) {
            let odd = p.run_indices(&w).unwrap().last().copied() == Some(1);
            let expect = Word::from_tokens([if odd { "1" } else { "0" }]);
            assert_eq!(g.unique_output(&[w]).unwrap(), expect);
        }
    }
}

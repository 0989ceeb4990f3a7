use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::words::{Alphabet, Symbol, Word};

/// A nondeterministic acceptor `(Σ, Q, I, δ, F)`.
///
/// `succ[q * |Σ| + a]` holds the sorted successors of `q` on `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    alphabet: Alphabet,
    states: Alphabet,
    initial: Vec<usize>,
    finals: Vec<bool>,
    succ: Vec<Vec<usize>>,
}

impl Nfa {
    pub fn from_indices(
        alphabet: Alphabet,
        states: Alphabet,
        initial: impl IntoIterator<Item = usize>,
        finals: impl IntoIterator<Item = usize>,
        triples: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self> {
        let (nq, ns) = (states.len(), alphabet.len());
        let mut init: Vec<usize> = initial.into_iter().collect();
        init.sort_unstable();
        init.dedup();
        if init.iter().any(|&q| q >= nq) {
            return Err(Error::InvalidMachine("initial state out of range".into()));
        }
        let mut fin = vec![false; nq];
        for q in finals {
            *fin.get_mut(q)
                .ok_or_else(|| Error::InvalidMachine("final state out of range".into()))? = true;
        }
        let mut succ = vec![Vec::new(); nq * ns];
        for (q, a, t) in triples {
            if q >= nq || t >= nq || a >= ns {
                return Err(Error::InvalidMachine("transition out of range".into()));
            }
            succ[q * ns + a].push(t);
        }
        for s in &mut succ {
            s.sort_unstable();
            s.dedup();
        }
        Ok(Nfa {
            alphabet,
            states,
            initial: init,
            finals: fin,
            succ,
        })
    }

    pub fn from_symbols(
        alphabet: Alphabet,
        states: Alphabet,
        initial: &[Symbol],
        finals: &[Symbol],
        triples: &[(Symbol, Symbol, Symbol)],
    ) -> Result<Self> {
        let init = initial
            .iter()
            .map(|q| states.require(q, "state"))
            .collect::<Result<Vec<_>>>()?;
        let fin = finals
            .iter()
            .map(|q| states.require(q, "state"))
            .collect::<Result<Vec<_>>>()?;
        let tri = triples
            .iter()
            .map(|(q, a, t)| {
                Ok((
                    states.require(q, "state")?,
                    alphabet.require(a, "input")?,
                    states.require(t, "state")?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Nfa::from_indices(alphabet, states, init, fin, tri)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn states(&self) -> &Alphabet {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn finals(&self) -> Vec<usize> {
        (0..self.states.len()).filter(|&q| self.finals[q]).collect()
    }

    pub fn successors(&self, q: usize, a: usize) -> &[usize] {
        &self.succ[q * self.alphabet.len() + a]
    }

    pub fn has_transition(&self, q: usize, a: usize, t: usize) -> bool {
        self.successors(q, a).binary_search(&t).is_ok()
    }

    /// All triples in (q, a, q') order.
    pub fn triples(&self) -> Vec<(usize, usize, usize)> {
        let ns = self.alphabet.len();
        let mut out = Vec::new();
        for q in 0..self.states.len() {
            for a in 0..ns {
                for &t in self.successors(q, a) {
                    out.push((q, a, t));
                }
            }
        }
        out
    }

    /// Image of a state set (as a sorted index list) under `a`.
    pub fn step_set(&self, set: &[usize], a: usize) -> Vec<usize> {
        let mut mark = vec![false; self.states.len()];
        for &q in set {
            for &t in self.successors(q, a) {
                mark[t] = true;
            }
        }
        (0..self.states.len()).filter(|&q| mark[q]).collect()
    }

    /// Forward subset simulation.
    pub fn accepts(&self, w: &Word) -> Result<bool> {
        let mut cur = self.initial.clone();
        for s in w.iter() {
            let a = self.alphabet.require(s, "automaton")?;
            cur = self.step_set(&cur, a);
            if cur.is_empty() {
                return Ok(false);
            }
        }
        Ok(cur.iter().any(|&q| self.finals[q]))
    }

    /// Like [`Nfa::accepts`] but characters outside Σ simply reject.
    pub fn accepts_lenient(&self, w: &Word) -> bool {
        let mut cur = self.initial.clone();
        for s in w.iter() {
            let Some(a) = self.alphabet.index_of(s) else {
                return false;
            };
            cur = self.step_set(&cur, a);
            if cur.is_empty() {
                return false;
            }
        }
        cur.iter().any(|&q| self.finals[q])
    }

    /// `|I| = 1` and δ is a total function on Q×Σ.
    pub fn is_deterministic(&self) -> bool {
        self.initial.len() == 1 && self.succ.iter().all(|s| s.len() == 1)
    }

    /// `|F| = 1` and every `(q', a)` has exactly one predecessor.
    pub fn is_reverse_deterministic(&self) -> bool {
        if self.finals.iter().filter(|&&f| f).count() != 1 {
            return false;
        }
        let ns = self.alphabet.len();
        let mut preds = vec![0usize; self.states.len() * ns];
        for (q, a, t) in self.triples() {
            let _ = q;
            preds[t * ns + a] += 1;
        }
        preds.iter().all(|&c| c == 1)
    }

    /// Restriction to states that are reachable from `I` and co-reachable
    /// to `F`. State order is preserved.
    pub fn trim(&self) -> Nfa {
        let nq = self.states.len();
        let ns = self.alphabet.len();
        let mut fwd = vec![false; nq];
        let mut queue: VecDeque<usize> = self.initial.iter().copied().collect();
        for &q in &self.initial {
            fwd[q] = true;
        }
        while let Some(q) = queue.pop_front() {
            for a in 0..ns {
                for &t in self.successors(q, a) {
                    if !fwd[t] {
                        fwd[t] = true;
                        queue.push_back(t);
                    }
                }
            }
        }
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); nq];
        for (q, _, t) in self.triples() {
            preds[t].push(q);
        }
        let mut bwd = vec![false; nq];
        let mut queue: VecDeque<usize> = (0..nq).filter(|&q| self.finals[q]).collect();
        for &q in &queue {
            bwd[q] = true;
        }
        while let Some(t) = queue.pop_front() {
            for &q in &preds[t] {
                if !bwd[q] {
                    bwd[q] = true;
                    queue.push_back(q);
                }
            }
        }
        let keep: Vec<usize> = (0..nq).filter(|&q| fwd[q] && bwd[q]).collect();
        self.restrict(&keep)
    }

    /// [`Nfa::trim`], except that when nothing survives a single
    /// non-accepting state without transitions is kept.
    pub fn trim_keep_empty(&self) -> Nfa {
        let t = self.trim();
        if t.num_states() > 0 || self.num_states() == 0 {
            return t;
        }
        let one = Alphabet::new([self.states.get(0).clone()]).expect("single");
        Nfa::from_indices(self.alphabet.clone(), one, [], [], []).expect("in range")
    }

    /// The minimal equivalent DFA by partition refinement. Requires
    /// [`Nfa::is_deterministic`]. Each class keeps its least reachable
    /// member's name.
    pub fn minimize_dfa(&self) -> Result<Nfa> {
        if !self.is_deterministic() {
            return Err(Error::InvalidMachine("minimization needs a complete DFA".into()));
        }
        let ns = self.alphabet.len();
        let step = |q: usize, a: usize| self.succ[q * ns + a][0];
        let mut seen = vec![false; self.states.len()];
        let mut queue = VecDeque::from([self.initial[0]]);
        seen[self.initial[0]] = true;
        while let Some(q) = queue.pop_front() {
            for a in 0..ns {
                let t = step(q, a);
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        let live: Vec<usize> = (0..self.states.len()).filter(|&q| seen[q]).collect();
        let mut class = vec![0usize; self.states.len()];
        for &q in &live {
            class[q] = usize::from(self.finals[q]);
        }
        let mut count = 0;
        loop {
            let mut ids: std::collections::HashMap<Vec<usize>, usize> = std::collections::HashMap::new();
            let mut next = vec![0usize; self.states.len()];
            for &q in &live {
                let mut sig = Vec::with_capacity(ns + 1);
                sig.push(class[q]);
                sig.extend((0..ns).map(|a| class[step(q, a)]));
                let k = ids.len();
                next[q] = *ids.entry(sig).or_insert(k);
            }
            class = next;
            if ids.len() == count {
                break;
            }
            count = ids.len();
        }
        if count == live.len() && live.len() == self.states.len() {
            return Ok(self.clone());
        }
        let mut rep = vec![usize::MAX; count];
        for &q in &live {
            if rep[class[q]] == usize::MAX {
                rep[class[q]] = q;
            }
        }
        let states = Alphabet::new(rep.iter().map(|&q| self.states.get(q).clone()))?;
        let (class, rep) = (&class, &rep);
        let tri: Vec<(usize, usize, usize)> = (0..count)
            .flat_map(|c| (0..ns).map(move |a| (c, a, class[step(rep[c], a)])))
            .collect();
        Nfa::from_indices(
            self.alphabet.clone(),
            states,
            [class[self.initial[0]]],
            (0..count).filter(|&c| self.finals[rep[c]]),
            tri,
        )
    }

    /// Restriction to the given states (sorted indices).
    pub fn restrict(&self, keep: &[usize]) -> Nfa {
        let mut idx = vec![usize::MAX; self.states.len()];
        for (i, &q) in keep.iter().enumerate() {
            idx[q] = i;
        }
        let states = Alphabet::new(keep.iter().map(|&q| self.states.get(q).clone())).expect("subset of distinct");
        let tri: Vec<(usize, usize, usize)> = self
            .triples()
            .into_iter()
            .filter(|&(q, _, t)| idx[q] != usize::MAX && idx[t] != usize::MAX)
            .map(|(q, a, t)| (idx[q], a, idx[t]))
            .collect();
        Nfa::from_indices(
            self.alphabet.clone(),
            states,
            self.initial.iter().filter(|&&q| idx[q] != usize::MAX).map(|&q| idx[q]),
            keep.iter().enumerate().filter(|(_, &q)| self.finals[q]).map(|(i, _)| i),
            tri,
        )
        .expect("restriction is in range")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> Nfa {
        let sigma = Alphabet::from_tokens(["a"]).unwrap();
        let q = Alphabet::from_tokens(["p", "q"]).unwrap();
        Nfa::from_indices(sigma, q, [0], [1], [(0, 0, 0), (0, 0, 1), (1, 0, 1)]).unwrap()
    }

    #[test]
    fn acceptance_by_subsets() {
        let a = fixture();
        assert!(a.accepts(&Word::from_tokens(["a", "a"])).unwrap());
        assert!(!a.accepts(&Word::empty()).unwrap());
        assert!(!a.is_deterministic());
        assert!(!a.is_reverse_deterministic());
    }

    #[test]
    fn empty_word_depends_on_initial_finals() {
        let sigma = Alphabet::from_tokens(["a"]).unwrap();
        let q = Alphabet::from_tokens(["p"]).unwrap();
        let yes = Nfa::from_indices(sigma.clone(), q.clone(), [0], [0], []).unwrap();
        let no = Nfa::from_indices(sigma, q, [0], [], []).unwrap();
        assert!(yes.accepts(&Word::empty()).unwrap());
        assert!(!no.accepts(&Word::empty()).unwrap());
    }
}

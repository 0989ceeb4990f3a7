use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::words::{rest, rev, trunc, Alphabet, Symbol, Word};

/// A deterministic Moore machine `(Σ, Q, q0, Γ, δ, ε)` with `ε: Q → Γ`.
///
/// Tables are stored by index: `delta[q * |Σ| + a]` and `eps[q]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MooreMachine {
    input: Alphabet,
    states: Alphabet,
    start: usize,
    output: Alphabet,
    delta: Vec<usize>,
    eps: Vec<usize>,
    transparent: bool,
}

impl MooreMachine {
    pub fn from_tables(
        input: Alphabet,
        states: Alphabet,
        start: usize,
        output: Alphabet,
        delta: Vec<usize>,
        eps: Vec<usize>,
    ) -> Result<Self> {
        let (nq, ns) = (states.len(), input.len());
        if nq == 0 {
            return Err(Error::InvalidMachine("empty state set".into()));
        }
        if start >= nq {
            return Err(Error::InvalidMachine("initial state out of range".into()));
        }
        if delta.len() != nq * ns || delta.iter().any(|&q| q >= nq) {
            return Err(Error::InvalidMachine("transition table is not total on Q×Σ".into()));
        }
        if eps.len() != nq || eps.iter().any(|&o| o >= output.len()) {
            return Err(Error::InvalidMachine("output table is not total on Q".into()));
        }
        let transparent = output == states && eps.iter().enumerate().all(|(i, &o)| i == o);
        Ok(MooreMachine {
            input,
            states,
            start,
            output,
            delta,
            eps,
            transparent,
        })
    }

    /// A transparent machine: `Γ = Q` and `ε` is the identity.
    pub fn transparent_from_tables(input: Alphabet, states: Alphabet, start: usize, delta: Vec<usize>) -> Result<Self> {
        let eps = (0..states.len()).collect();
        MooreMachine::from_tables(input, states.clone(), start, states, delta, eps)
    }

    pub fn from_fn(
        input: Alphabet,
        states: Alphabet,
        start: &Symbol,
        output: Alphabet,
        mut delta: impl FnMut(&Symbol, &Symbol) -> Result<Symbol>,
        mut eps: impl FnMut(&Symbol) -> Result<Symbol>,
    ) -> Result<Self> {
        let d = tabulate(&input, &states, &mut delta)?;
        let e = states
            .iter()
            .map(|q| output.require(&eps(q)?, "output"))
            .collect::<Result<Vec<_>>>()?;
        let s = states.require(start, "state")?;
        MooreMachine::from_tables(input, states, s, output, d, e)
    }

    pub fn transparent_from_fn(
        input: Alphabet,
        states: Alphabet,
        start: &Symbol,
        mut delta: impl FnMut(&Symbol, &Symbol) -> Result<Symbol>,
    ) -> Result<Self> {
        let d = tabulate(&input, &states, &mut delta)?;
        let s = states.require(start, "state")?;
        MooreMachine::transparent_from_tables(input, states, s, d)
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn states(&self) -> &Alphabet {
        &self.states
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
    }

    pub fn start_index(&self) -> usize {
        self.start
    }

    pub fn start(&self) -> &Symbol {
        self.states.get(self.start)
    }

    pub fn is_transparent(&self) -> bool {
        self.transparent
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn step(&self, q: usize, a: usize) -> usize {
        self.delta[q * self.input.len() + a]
    }

    pub fn eps_index(&self, q: usize) -> usize {
        self.eps[q]
    }

    pub fn eps_table(&self) -> &[usize] {
        &self.eps
    }

    pub fn delta_table(&self) -> &[usize] {
        &self.delta
    }

    pub fn step_symbol(&self, q: &Symbol, a: &Symbol) -> Result<&Symbol> {
        let qi = self.states.require(q, "state")?;
        let ai = self.input.require(a, "input")?;
        Ok(self.states.get(self.step(qi, ai)))
    }

    /// The state map `δ_a` as an index vector.
    pub fn action(&self, a: usize) -> Vec<usize> {
        (0..self.states.len()).map(|q| self.step(q, a)).collect()
    }

    /// Indices of the run `r` with `r[0] = q0`, `r[i+1] = δ(r[i], w[i])`.
    pub fn run_indices(&self, w: &Word) -> Result<Vec<usize>> {
        let mut q = self.start;
        let mut out = Vec::with_capacity(w.len() + 1);
        out.push(q);
        for s in w.iter() {
            let a = self.input.require(s, "input")?;
            q = self.step(q, a);
            out.push(q);
        }
        Ok(out)
    }

    /// `M(w)`, of length `|w| + 1`.
    pub fn run(&self, w: &Word) -> Result<Word> {
        Ok(self
            .run_indices(w)?
            .into_iter()
            .map(|q| self.output.get(self.eps[q]).clone())
            .collect())
    }

    /// `M^Trunc(w)`: strictly causal and length preserving.
    pub fn run_trunc(&self, w: &Word) -> Result<Word> {
        let mut q = self.start;
        let mut out = Vec::with_capacity(w.len());
        for s in w.iter() {
            out.push(self.output.get(self.eps[q]).clone());
            q = self.step(q, self.input.require(s, "input")?);
        }
        Ok(Word(out))
    }

    /// `M^Rest(w)`: causal and length preserving.
    pub fn run_rest(&self, w: &Word) -> Result<Word> {
        self.run(w).map(|o| rest(&o))
    }

    /// Same Σ, Q, q0, δ with a new output table.
    pub fn with_output(&self, output: Alphabet, eps: Vec<usize>) -> Result<Self> {
        MooreMachine::from_tables(
            self.input.clone(),
            self.states.clone(),
            self.start,
            output,
            self.delta.clone(),
            eps,
        )
    }

    /// The underlying transparent machine (same Σ, Q, q0, δ).
    pub fn transparent_core(&self) -> MooreMachine {
        if self.transparent {
            return self.clone();
        }
        MooreMachine::transparent_from_tables(self.input.clone(), self.states.clone(), self.start, self.delta.clone())
            .expect("tables already validated")
    }

    /// Restriction to the states reachable from `q0`, order preserved.
    pub fn restrict_reachable(&self) -> MooreMachine {
        let ns = self.input.len();
        let mut seen = vec![false; self.states.len()];
        seen[self.start] = true;
        let mut queue = VecDeque::from([self.start]);
        while let Some(q) = queue.pop_front() {
            for a in 0..ns {
                let t = self.step(q, a);
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        if seen.iter().all(|&b| b) {
            return self.clone();
        }
        let kept: Vec<usize> = (0..self.states.len()).filter(|&q| seen[q]).collect();
        let mut new_index = vec![usize::MAX; self.states.len()];
        for (i, &q) in kept.iter().enumerate() {
            new_index[q] = i;
        }
        let states = Alphabet::new(kept.iter().map(|&q| self.states.get(q).clone())).expect("subset of distinct");
        let mut delta = Vec::with_capacity(kept.len() * ns);
        for &q in &kept {
            for a in 0..ns {
                delta.push(new_index[self.step(q, a)]);
            }
        }
        let start = new_index[self.start];
        if self.transparent {
            MooreMachine::transparent_from_tables(self.input.clone(), states, start, delta)
        } else {
            let eps = kept.iter().map(|&q| self.eps[q]).collect();
            MooreMachine::from_tables(self.input.clone(), states, start, self.output.clone(), delta, eps)
        }
        .expect("restriction keeps tables total")
    }

    /// The reachable part with states of equal observable behaviour
    /// merged (Moore partition refinement). Each class keeps the name of
    /// its least member; the machine stays transparent only if it was and
    /// nothing merged.
    pub fn minimize(&self) -> MooreMachine {
        let r = self.restrict_reachable();
        let (nq, ns) = (r.states.len(), r.input.len());
        let mut class: Vec<usize> = r.eps.clone();
        loop {
            let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let next: Vec<usize> = (0..nq)
                .map(|q| {
                    let key = (class[q], (0..ns).map(|a| class[r.step(q, a)]).collect());
                    let k = ids.len();
                    *ids.entry(key).or_insert(k)
                })
                .collect();
            let done = ids.len() == class.iter().collect::<HashSet<_>>().len();
            class = next;
            if done {
                break;
            }
        }
        let count = class.iter().max().map_or(0, |&c| c + 1);
        if count == nq {
            return r;
        }
        let mut rep = vec![usize::MAX; count];
        for q in 0..nq {
            if rep[class[q]] == usize::MAX {
                rep[class[q]] = q;
            }
        }
        let states = Alphabet::new(rep.iter().map(|&q| r.states.get(q).clone())).expect("subset of distinct");
        let delta = rep
            .iter()
            .flat_map(|&q| (0..ns).map(|a| class[r.step(q, a)]).collect::<Vec<_>>())
            .collect();
        let eps = rep.iter().map(|&q| r.eps[q]).collect();
        let output = if r.transparent {
            r.states.clone()
        } else {
            r.output.clone()
        };
        MooreMachine::from_tables(r.input.clone(), states, class[r.start], output, delta, eps)
            .expect("quotient tables are total")
    }

    /// Precomposes the transition table with a map from a new input
    /// alphabet into the old one.
    pub fn recode_input(&self, input: Alphabet, mut f: impl FnMut(&Symbol) -> Result<Symbol>) -> Result<MooreMachine> {
        let old: Vec<usize> = input
            .iter()
            .map(|s| self.input.require(&f(s)?, "input"))
            .collect::<Result<_>>()?;
        let mut delta = Vec::with_capacity(self.states.len() * input.len());
        for q in 0..self.states.len() {
            for &a in &old {
                delta.push(self.step(q, a));
            }
        }
        self.replace_delta(input, delta)
    }

    /// Extends Σ with a fresh symbol acting as the identity on states.
    pub fn with_identity_symbol(&self, fresh: Symbol) -> Result<MooreMachine> {
        if self.input.contains(&fresh) {
            return Err(Error::DuplicateSymbol(fresh));
        }
        let input = Alphabet::new(self.input.iter().cloned().chain(std::iter::once(fresh)))?;
        let ns = self.input.len();
        let mut delta = Vec::with_capacity(self.states.len() * (ns + 1));
        for q in 0..self.states.len() {
            delta.extend_from_slice(&self.delta[q * ns..(q + 1) * ns]);
            delta.push(q);
        }
        self.replace_delta(input, delta)
    }

    fn replace_delta(&self, input: Alphabet, delta: Vec<usize>) -> Result<MooreMachine> {
        if self.transparent {
            MooreMachine::transparent_from_tables(input, self.states.clone(), self.start, delta)
        } else {
            MooreMachine::from_tables(
                input,
                self.states.clone(),
                self.start,
                self.output.clone(),
                delta,
                self.eps.clone(),
            )
        }
    }

    /// Same tables, different initial state.
    pub fn with_start(&self, start: usize) -> Result<MooreMachine> {
        let mut m = self.clone();
        if start >= m.states.len() {
            return Err(Error::InvalidMachine("initial state out of range".into()));
        }
        m.start = start;
        Ok(m)
    }

    /// `Rev(M)`: the same tables read as a reverse machine.
    pub fn reverse(&self) -> ReverseMooreMachine {
        ReverseMooreMachine { tables: self.clone() }
    }
}

fn tabulate(
    input: &Alphabet,
    states: &Alphabet,
    delta: &mut impl FnMut(&Symbol, &Symbol) -> Result<Symbol>,
) -> Result<Vec<usize>> {
    let mut d = Vec::with_capacity(states.len() * input.len());
    for q in states.iter() {
        for a in input.iter() {
            d.push(states.require(&delta(q, a)?, "state")?);
        }
    }
    Ok(d)
}

/// A reverse Moore machine `(Σ, Q, q_f, Γ, δ, ε)`: the run is fixed by
/// `r[|w|] = q_f` and `r[i] = δ(r[i+1], w[i])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReverseMooreMachine {
    tables: MooreMachine,
}

impl ReverseMooreMachine {
    /// Builds from tables, `delta[q' * |Σ| + a]` being the earlier state.
    pub fn from_tables(
        input: Alphabet,
        states: Alphabet,
        final_state: usize,
        output: Alphabet,
        delta: Vec<usize>,
        eps: Vec<usize>,
    ) -> Result<Self> {
        MooreMachine::from_tables(input, states, final_state, output, delta, eps)
            .map(|tables| ReverseMooreMachine { tables })
    }

    pub fn transparent_from_tables(
        input: Alphabet,
        states: Alphabet,
        final_state: usize,
        delta: Vec<usize>,
    ) -> Result<Self> {
        MooreMachine::transparent_from_tables(input, states, final_state, delta)
            .map(|tables| ReverseMooreMachine { tables })
    }

    pub fn transparent_from_fn(
        input: Alphabet,
        states: Alphabet,
        final_state: &Symbol,
        delta: impl FnMut(&Symbol, &Symbol) -> Result<Symbol>,
    ) -> Result<Self> {
        MooreMachine::transparent_from_fn(input, states, final_state, delta)
            .map(|tables| ReverseMooreMachine { tables })
    }

    /// `Rev(R)`: the forward machine with the same tables.
    pub fn reverse(&self) -> MooreMachine {
        self.tables.clone()
    }

    pub fn input(&self) -> &Alphabet {
        self.tables.input()
    }

    pub fn states(&self) -> &Alphabet {
        self.tables.states()
    }

    pub fn output(&self) -> &Alphabet {
        self.tables.output()
    }

    pub fn final_index(&self) -> usize {
        self.tables.start_index()
    }

    pub fn final_state(&self) -> &Symbol {
        self.tables.start()
    }

    pub fn is_transparent(&self) -> bool {
        self.tables.is_transparent()
    }

    pub fn num_states(&self) -> usize {
        self.tables.num_states()
    }

    /// The earlier state given the later state and the character.
    pub fn step(&self, later: usize, a: usize) -> usize {
        self.tables.step(later, a)
    }

    pub fn eps_index(&self, q: usize) -> usize {
        self.tables.eps_index(q)
    }

    pub fn eps_table(&self) -> &[usize] {
        self.tables.eps_table()
    }

    pub fn delta_table(&self) -> &[usize] {
        self.tables.delta_table()
    }

    pub fn run_indices(&self, w: &Word) -> Result<Vec<usize>> {
        let mut r = self.tables.run_indices(&rev(w))?;
        r.reverse();
        Ok(r)
    }

    /// `R(w)`, of length `|w| + 1`.
    pub fn run(&self, w: &Word) -> Result<Word> {
        self.tables.run(&rev(w)).map(|o| rev(&o))
    }

    /// `R^Trunc(w)`: reverse causal and length preserving.
    pub fn run_trunc(&self, w: &Word) -> Result<Word> {
        self.run(w).map(|o| trunc(&o))
    }

    /// `R^Rest(w)`: strictly reverse causal and length preserving.
    pub fn run_rest(&self, w: &Word) -> Result<Word> {
        self.tables.run_trunc(&rev(w)).map(|o| rev(&o))
    }

    pub fn transparent_core(&self) -> ReverseMooreMachine {
        ReverseMooreMachine {
            tables: self.tables.transparent_core(),
        }
    }
}

/// How a single input symbol acts on the states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ActionKind {
    Identity,
    Permutation,
    Reset,
    Other,
}

impl ActionKind {
    pub fn of(action: &[usize]) -> Self {
        if action.iter().enumerate().all(|(i, &q)| q == i) {
            return ActionKind::Identity;
        }
        let mut seen = vec![false; action.len()];
        if action.iter().all(|&q| !std::mem::replace(&mut seen[q], true)) {
            return ActionKind::Permutation;
        }
        if action.iter().all(|&q| q == action[0]) {
            return ActionKind::Reset;
        }
        ActionKind::Other
    }

    pub fn name(self) -> &'static str {
        match self {
            ActionKind::Identity => "identity",
            ActionKind::Permutation => "permutation",
            ActionKind::Reset => "reset",
            ActionKind::Other => "other",
        }
    }
}

/// Per-symbol classification plus the machine-level flags derived from it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub actions: Vec<(Symbol, ActionKind)>,
}

impl Classification {
    /// Every action is a permutation (identity included).
    pub fn is_permutation(&self) -> bool {
        self.actions
            .iter()
            .all(|(_, k)| matches!(k, ActionKind::Identity | ActionKind::Permutation))
    }

    /// Every action is a reset or the identity.
    pub fn is_reset(&self) -> bool {
        self.actions
            .iter()
            .all(|(_, k)| matches!(k, ActionKind::Identity | ActionKind::Reset))
    }

    pub fn is_permutation_reset(&self) -> bool {
        self.actions.iter().all(|(_, k)| *k != ActionKind::Other)
    }
}

pub fn classify_actions(m: &MooreMachine) -> Classification {
    Classification {
        actions: (0..m.input().len())
            .map(|a| (m.input().get(a).clone(), ActionKind::of(&m.action(a))))
            .collect(),
    }
}

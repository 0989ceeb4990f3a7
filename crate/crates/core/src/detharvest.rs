//! Determinization, the harvester, the two-pass decomposition of
//! length-preserving regular functions, and the length normalization that
//! lifts it to arbitrary regular functions.

use std::collections::{HashMap, VecDeque};

use crate::compo::{Term, TermBuilder};
use crate::error::{Error, Result};
use crate::machines::{MooreMachine, Nfa, RelationAutomaton, ReverseMooreMachine};
use crate::words::{trunc, Alphabet, CharFn, Symbol, Word};

/// `det(A)` as a transparent Moore machine over the reachable subsets,
/// with the acceptance flags (subsets meeting `F`) kept alongside.
#[derive(Clone, Debug)]
pub struct Determinization {
    pub machine: MooreMachine,
    pub subsets: Vec<Vec<usize>>,
    pub accepting: Vec<bool>,
}

impl Determinization {
    pub fn accepts(&self, w: &Word) -> Result<bool> {
        let run = self.machine.run_indices(w)?;
        Ok(self.accepting[*run.last().expect("runs are non-empty")])
    }

    pub fn num_states(&self) -> usize {
        self.subsets.len()
    }
}

/// The symbol naming a subset of `a`'s states, e.g. `{p;q}`.
pub fn subset_symbol(states: &Alphabet, set: &[usize]) -> Symbol {
    let names: Vec<String> = set.iter().map(|&q| states.get(q).to_string()).collect();
    Symbol::atom(format!("{{{}}}", names.join(";")))
}

/// Subset construction restricted to subsets reachable from `{I}`, in
/// breadth-first order under the alphabet order.
pub fn determinize(a: &Nfa) -> Determinization {
    let ns = a.alphabet().len();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut subsets: Vec<Vec<usize>> = vec![a.initial().to_vec()];
    index.insert(a.initial().to_vec(), 0);
    let mut delta: Vec<usize> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    let mut rows: Vec<Vec<usize>> = vec![Vec::new()];
    while let Some(k) = queue.pop_front() {
        let mut row = Vec::with_capacity(ns);
        for c in 0..ns {
            let next = a.step_set(&subsets[k], c);
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    let id = subsets.len();
                    index.insert(next.clone(), id);
                    subsets.push(next);
                    rows.push(Vec::new());
                    queue.push_back(id);
                    id
                }
            };
            row.push(id);
        }
        rows[k] = row;
    }
    for row in &rows {
        delta.extend_from_slice(row);
    }
    let names = Alphabet::new(subsets.iter().map(|s| subset_symbol(a.states(), s)))
        .expect("distinct subsets have distinct names");
    let accepting = subsets.iter().map(|s| s.iter().any(|&q| a.is_final(q))).collect();
    let machine =
        MooreMachine::transparent_from_tables(a.alphabet().clone(), names, 0, delta).expect("total by construction");
    Determinization {
        machine,
        subsets,
        accepting,
    }
}

/// `harv(A)` as a transparent reverse Moore machine.
#[derive(Clone, Debug)]
pub struct Harvester {
    pub machine: ReverseMooreMachine,
    /// Index of the dummy final state `q_F` (always the last state).
    pub q_final: usize,
}

fn fresh_name(states: &Alphabet, base: &str) -> Symbol {
    let mut name = base.to_string();
    while states.contains(&Symbol::atom(&name)) {
        name.push('\'');
    }
    Symbol::atom(name)
}

/// The harvester of `a` over `Σ × (subsets realized by det)`. Reading
/// `(c, K)` backwards from a later state `q'` yields the least `q'' ∈ K`
/// with `δ(q'', c, q')`; from `q_F` it first picks the least final `q'`
/// reachable from `K` on `c`. Whenever no candidate exists the earlier
/// state is `q_F`.
pub fn harvester(a: &Nfa, det: &Determinization) -> Harvester {
    let nq = a.num_states();
    let q_f = nq;
    let states = Alphabet::new(
        a.states()
            .iter()
            .cloned()
            .chain(std::iter::once(fresh_name(a.states(), "q_F"))),
    )
    .expect("fresh name");
    let input = Alphabet::product(&[a.alphabet().clone(), det.machine.states().clone()]);
    let finals = a.finals();
    let n_in = input.len();
    let mut delta = vec![q_f; (nq + 1) * n_in];
    for (ci, _) in input.iter().enumerate() {
        let (c, k) = (ci / det.num_states(), ci % det.num_states());
        let set = &det.subsets[k];
        let least_pred = |target: usize| set.iter().copied().find(|&q| a.has_transition(q, c, target));
        for later in 0..nq {
            if let Some(q) = least_pred(later) {
                delta[later * n_in + ci] = q;
            }
        }
        if let Some(q) = finals.iter().find_map(|&f| least_pred(f)) {
            delta[q_f * n_in + ci] = q;
        }
    }
    let machine =
        ReverseMooreMachine::transparent_from_tables(input, states, q_f, delta).expect("total by construction");
    Harvester { machine, q_final: q_f }
}

/// Checks the extension property of the truncated harvester output `h`
/// on an accepted word `w`: `h[0] ∈ I`, consecutive states are joined by
/// transitions on `w`, and the last one steps into `F`. Also checks that
/// `q_F` occurs in the full run only at the end.
pub fn check_harvest(a: &Nfa, det: &Determinization, harv: &Harvester, w: &Word) -> Result<bool> {
    let p = det.machine.run_trunc(w)?;
    let pairs: Word = w
        .iter()
        .zip(p.iter())
        .map(|(c, k)| Symbol::tuple([c.clone(), k.clone()]))
        .collect();
    let run = harv.machine.run_indices(&pairs)?;
    let n = w.len();
    if run[n] != harv.q_final || run[..n].contains(&harv.q_final) {
        return Ok(false);
    }
    if n == 0 {
        return Ok(a.initial().iter().any(|&q| a.is_final(q)));
    }
    let sym = |i: usize| a.alphabet().require(&w.0[i], "automaton");
    if !a.initial().contains(&run[0]) {
        return Ok(false);
    }
    for i in 0..n - 1 {
        if !a.has_transition(run[i], sym(i)?, run[i + 1]) {
            return Ok(false);
        }
    }
    let last = sym(n - 1)?;
    Ok(a.successors(run[n - 1], last).iter().any(|&q| a.is_final(q)))
}

/// The acceptor `B` over Σ with states `Q × Γ`, whose
/// accepting runs project (second component, then truncation) to `f(w)`,
/// together with that projection.
pub fn automatize(rel: &RelationAutomaton) -> Result<(Nfa, CharFn)> {
    if rel.arity() != 1 {
        return Err(Error::InvalidMachine("automatize needs a unary relation".into()));
    }
    let sigma = rel.components()[0].clone();
    let gamma = rel.output_alphabet().clone();
    let a = rel.base();
    let nq = a.num_states();
    let ng = gamma.len();
    let names = Alphabet::new(
        a.states()
            .iter()
            .flat_map(|q| gamma.iter().map(move |o| Symbol::tuple([q.clone(), o.clone()]))),
    )?;
    let mut triples = Vec::new();
    for (si, s) in sigma.iter().enumerate() {
        for (oi, o) in gamma.iter().enumerate() {
            let Some(c) = a.alphabet().index_of(&Symbol::tuple([s.clone(), o.clone()])) else {
                continue;
            };
            for q in 0..nq {
                for &t in a.successors(q, c) {
                    for o2 in 0..ng {
                        triples.push((q * ng + oi, si, t * ng + o2));
                    }
                }
            }
        }
    }
    let initial: Vec<usize> = a
        .initial()
        .iter()
        .flat_map(|&q| (0..ng).map(move |o| q * ng + o))
        .collect();
    let finals: Vec<usize> = a
        .finals()
        .into_iter()
        .flat_map(|q| (0..ng).map(move |o| q * ng + o))
        .collect();
    let b = Nfa::from_indices(sigma, names.clone(), initial, finals, triples)?;
    let proj = CharFn::unary(&names, |s| Ok(s.components().expect("pair state")[1].clone()))?;
    Ok((b, proj))
}

/// The pieces of the two-pass decomposition.
#[derive(Clone, Debug)]
pub struct DetHarvest {
    pub term: Term,
    pub automaton: Nfa,
    pub det: Determinization,
    pub harvester: Harvester,
}

/// `Cw_proj(harv(B)^Trunc(Cw_pair(w, det(B)^Trunc(w))))` for a unary
/// length-preserving function given by `rel`, with `proj` folded into the
/// harvester as its output map. `B` is trimmed first, which keeps every
/// accepting run.
pub fn detharvest_decompose(rel: &RelationAutomaton) -> Result<DetHarvest> {
    let (b, proj) = automatize(rel)?;
    let b = b.trim_keep_empty();
    let det = determinize(&b);
    let harv = harvester(&b, &det);
    let sigma = rel.components()[0].clone();
    let gamma = rel.output_alphabet();
    let fallback = gamma
        .iter()
        .next()
        .cloned()
        .ok_or_else(|| Error::InvalidMachine("empty output alphabet".into()))?;
    let eps = harv
        .machine
        .states()
        .iter()
        .map(|q| {
            let o = proj.get(std::slice::from_ref(q)).unwrap_or(&fallback);
            gamma.require(o, "output")
        })
        .collect::<Result<Vec<_>>>()?;
    let projected = harv.machine.reverse().with_output(gamma.clone(), eps)?.reverse();
    let pair = CharFn::pairing(&[sigma.clone(), det.machine.states().clone()])?;
    let mut tb = TermBuilder::new(vec![sigma]);
    let x = tb.input(0);
    let d = tb.moore_trunc(det.machine.clone(), x);
    let p = tb.cw(pair, vec![x, d]);
    let root = tb.rev_moore_trunc(projected, p);
    Ok(DetHarvest {
        term: tb.finish(root)?,
        automaton: b,
        det,
        harvester: harv,
    })
}

/// `c` such that `|f(w)| ≤ c + max|w_j|`: the number of states of a
/// determinization of the relation automaton.
pub fn length_bound(rel: &RelationAutomaton) -> usize {
    determinize(rel.base()).num_states()
}

/// The alphabet `g` reads: `Σ ∪ {#}` for unary relations and the padded
/// product of the input alphabets otherwise.
pub fn normalized_input_alphabet(rel: &RelationAutomaton) -> Alphabet {
    if rel.arity() == 1 {
        rel.components()[0].with_pad()
    } else {
        Alphabet::padded_product(rel.input_alphabets())
    }
}

/// The graph of the length-preserving `g` with
/// `g(S_#^c(w)) = S_#^d(f(w))`, `d = max|w_j| + c − |f(w)|`.
///
/// States track the determinized state of the relation, a counter of
/// all-`#` input characters (at most `c`), and per-component flags
/// recording that a component has ended. The character that is `#`
/// everywhere acts as the identity on the determinized state.
pub fn length_normalize(rel: &RelationAutomaton, c: usize) -> Result<RelationAutomaton> {
    if !rel.is_padded() {
        return Err(Error::InvalidMachine(
            "length normalization needs a padded relation".into(),
        ));
    }
    let n = rel.arity();
    let det = determinize(rel.base());
    let p_alpha = normalized_input_alphabet(rel);
    let y_alpha = rel.output_alphabet().with_pad();
    let chars = Alphabet::product(&[p_alpha.clone(), y_alpha.clone()]);
    let base_alpha = rel.base().alphabet();
    // state key: (subset, counter, ended flags); index 0 is the dead state
    let mut keys: Vec<Option<(usize, usize, u32)>> = vec![None, Some((0, 0, 0))];
    let mut index: HashMap<(usize, usize, u32), usize> = HashMap::from([((0, 0, 0), 1)]);
    let mut triples = Vec::new();
    let mut queue = VecDeque::from([1usize]);
    let out_bit = 1u32 << n;
    while let Some(s) = queue.pop_front() {
        let (k, counter, flags) = keys[s].expect("live state");
        for (ci, ch) in chars.iter().enumerate() {
            let comps = ch.components().expect("pair");
            let (p, y) = (&comps[0], &comps[1]);
            let inputs: Vec<Symbol> = if n == 1 {
                vec![p.clone()]
            } else {
                p.components().expect("tuple").to_vec()
            };
            let mut new_flags = flags;
            let mut dead = false;
            for (j, x) in inputs.iter().enumerate() {
                let bit = 1u32 << j;
                if x.is_pad() {
                    new_flags |= bit;
                } else if flags & bit != 0 {
                    dead = true;
                }
            }
            if y.is_pad() {
                new_flags |= out_bit;
            } else if flags & out_bit != 0 {
                dead = true;
            }
            let all_pad = inputs.iter().all(Symbol::is_pad);
            let new_counter = counter + usize::from(all_pad);
            if new_counter > c {
                dead = true;
            }
            let target = if dead {
                0
            } else {
                let new_k = if all_pad && y.is_pad() {
                    k
                } else {
                    let mut t = inputs.clone();
                    t.push(y.clone());
                    let a = base_alpha.require(&Symbol::tuple(t), "relation")?;
                    det.machine.step(k, a)
                };
                let key = (new_k, new_counter, new_flags);
                *index.entry(key).or_insert_with(|| {
                    keys.push(Some(key));
                    queue.push_back(keys.len() - 1);
                    keys.len() - 1
                })
            };
            triples.push((s, ci, target));
        }
    }
    for ci in 0..chars.len() {
        triples.push((0, ci, 0));
    }
    let det_names = det.machine.states();
    let names = Alphabet::new(keys.iter().map(|k| match k {
        None => Symbol::atom("dead"),
        Some((k, counter, flags)) => Symbol::tuple([
            det_names.get(*k).clone(),
            Symbol::atom(counter.to_string()),
            Symbol::atom(format!("{flags:b}")),
        ]),
    }))?;
    let accepting: Vec<usize> = keys
        .iter()
        .enumerate()
        .filter_map(|(i, k)| k.filter(|&(k, counter, _)| counter == c && det.accepting[k]).map(|_| i))
        .collect();
    let base = Nfa::from_indices(chars, names, [1], accepting, triples)?.minimize_dfa()?;
    RelationAutomaton::new(base, vec![p_alpha, y_alpha], false)
}

/// `f(w_0, …) = unpad(g(tuplefy(S_#^c(w_0), …)))`, the tuplefy node only
/// present for `n > 1`.
pub fn lift_to_general(g: &Term, c: usize, inputs: &[Alphabet]) -> Result<Term> {
    if inputs.is_empty() {
        return Err(Error::ZeroArity);
    }
    if g.arity() != 1 {
        return Err(Error::InvalidTerm("the normalized function must be unary".into()));
    }
    let mut tb = TermBuilder::new(inputs.to_vec());
    let mut padded = Vec::with_capacity(inputs.len());
    for j in 0..inputs.len() {
        let mut x = tb.input(j);
        for _ in 0..c {
            x = tb.succ(Symbol::pad(), x);
        }
        padded.push(x);
    }
    let arg = if padded.len() == 1 {
        padded[0]
    } else {
        tb.tuplefy(padded)
    };
    let out = tb.embed(g, &[arg])?;
    let root = tb.unpad(out);
    tb.finish(root)
}

/// The truncated projection of an accepting run of `B` equals `f(w)`;
/// returns the projected words of every accepting run on `w` (for tests,
/// small `B` only).
pub fn projected_runs(b: &Nfa, proj: &CharFn, w: &Word) -> Result<Vec<Word>> {
    let mut runs: Vec<Vec<usize>> = b.initial().iter().map(|&q| vec![q]).collect();
    for s in w.iter() {
        let c = b.alphabet().require(s, "automaton")?;
        runs = runs
            .into_iter()
            .flat_map(|r| {
                let last = *r.last().expect("non-empty");
                b.successors(last, c)
                    .iter()
                    .map(|&t| {
                        let mut r = r.clone();
                        r.push(t);
                        r
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    runs.into_iter()
        .filter(|r| b.is_final(*r.last().expect("non-empty")))
        .map(|r| {
            let states: Word = r.iter().map(|&q| b.states().get(q).clone()).collect();
            proj.apply(&[&states]).map(|o| trunc(&o))
        })
        .collect()
}

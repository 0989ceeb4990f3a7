//! The Krohn-Rhodes cascade for transparent Moore machines and the
//! reduction of permutation-reset stages to `AS_n`, `Bit` and
//! character-wise maps.

use std::collections::{HashMap, VecDeque};

use crate::compo::{NodeId, Term, TermBuilder};
use crate::error::{Error, Result};
use crate::machines::{classify_actions, ActionKind, MooreMachine};
use crate::perm::{self, Limits, Perm};
use crate::words::{Alphabet, CharFn, Symbol, Word};

/// Permutation-reset pairing on positions `0..f.len()`: `f` itself when it
/// is a bijection, otherwise the constant map to the least position
/// outside its image.
pub fn perm_reset_map(f: &[usize]) -> Result<Vec<usize>> {
    let n = f.len();
    if f.iter().any(|&y| y >= n) {
        return Err(Error::LengthMismatch(format!(
            "map into a set of size {n} has an image out of range"
        )));
    }
    let mut hit = vec![false; n];
    for &y in f {
        hit[y] = true;
    }
    Ok(match hit.iter().position(|&h| !h) {
        None => f.to_vec(),
        Some(free) => vec![free; n],
    })
}

/// Element in position `i` of `{0..n} ∖ {x}`.
fn skip(i: usize, x: usize) -> usize {
    if i < x {
        i
    } else {
        i + 1
    }
}

/// Position of `y` in `{0..n} ∖ {x}`, `y ≠ x`.
fn position_without(y: usize, x: usize) -> usize {
    debug_assert_ne!(y, x);
    if y < x {
        y
    } else {
        y - 1
    }
}

fn require_transparent(m: &MooreMachine) -> Result<()> {
    if m.is_transparent() {
        Ok(())
    } else {
        Err(Error::WrongClass("transparent Moore machine"))
    }
}

fn complement_delta(m: &MooreMachine) -> Vec<usize> {
    let (nq, ns) = (m.num_states(), m.input().len());
    let mut delta = vec![0; nq * ns];
    for a in 0..ns {
        let g = perm_reset_map(&m.action(a)).expect("actions stay in range");
        for q in 0..nq {
            delta[q * ns + a] = g[q];
        }
    }
    delta
}

/// `M̄`: same states, starts at the least state other than `q0`, and
/// tracks a state `M` is not in.
pub fn complement_machine(m: &MooreMachine) -> Result<MooreMachine> {
    require_transparent(m)?;
    if m.num_states() < 2 {
        return Err(Error::SingleState);
    }
    let start = usize::from(m.start_index() == 0);
    MooreMachine::transparent_from_tables(m.input().clone(), m.states().clone(), start, complement_delta(m))
}

fn index_states(k: usize) -> Alphabet {
    Alphabet::new((0..k).map(|i| Symbol::atom(i.to_string()))).expect("distinct indices")
}

/// `M̂` over `Σ × Q` with states `0..|Q|−2`: position of `M`'s state in
/// `Q ∖ {M̄'s state}`.
pub fn quotient_machine(m: &MooreMachine, mbar: &MooreMachine) -> Result<MooreMachine> {
    require_transparent(m)?;
    let nq = m.num_states();
    if nq < 2 {
        return Err(Error::SingleState);
    }
    let expected = complement_machine(m)?;
    if *mbar != expected {
        return Err(Error::InvalidMachine(
            "the second machine is not the complement of the first".into(),
        ));
    }
    let input = Alphabet::product(&[m.input().clone(), m.states().clone()]);
    let ns = m.input().len();
    let chars: Vec<(usize, usize)> = (0..ns).flat_map(|a| (0..nq).map(move |q| (a, q))).collect();
    let delta = quotient_delta(m, mbar, &chars);
    let start = position_without(m.start_index(), mbar.start_index());
    MooreMachine::transparent_from_tables(input, index_states(nq - 1), start, delta)
}

/// The quotient transition table on the given `(a, q̄)` characters.
fn quotient_delta(m: &MooreMachine, mbar: &MooreMachine, chars: &[(usize, usize)]) -> Vec<usize> {
    let k = m.num_states() - 1;
    let mut delta = vec![0; k * chars.len()];
    for (ci, &(a, qbar)) in chars.iter().enumerate() {
        let next_bar = mbar.step(qbar, a);
        for i in 0..k {
            let q = skip(i, qbar);
            delta[i * chars.len() + ci] = position_without(m.step(q, a), next_bar);
        }
    }
    delta
}

/// `(k_0, …, k_{i−1})` with `i < n` and `k_j < n − j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrdinalRemovalSequence {
    entries: Vec<usize>,
    n: usize,
}

impl OrdinalRemovalSequence {
    pub fn new(entries: Vec<usize>, n: usize) -> Result<Self> {
        if !entries.is_empty() && entries.len() >= n {
            return Err(Error::InvalidRemoval(format!(
                "{} removals from a set of {n}",
                entries.len()
            )));
        }
        if let Some((j, k)) = entries.iter().enumerate().find(|&(j, &k)| k >= n - j) {
            return Err(Error::InvalidRemoval(format!(
                "k_{j} = {k} but only {} elements remain",
                n - j
            )));
        }
        Ok(OrdinalRemovalSequence { entries, n })
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn ground(&self) -> usize {
        self.n
    }

    /// `self ⁀ k`.
    pub fn extend(&self, k: usize) -> Result<Self> {
        let mut e = self.entries.clone();
        e.push(k);
        OrdinalRemovalSequence::new(e, self.n)
    }
}

/// Removes, in turn, the element in position `k_j` of what remains.
pub fn remove<T: Clone>(list: &[T], k: &OrdinalRemovalSequence) -> Result<Vec<T>> {
    if k.ground() != list.len() {
        return Err(Error::InvalidRemoval(format!(
            "sequence for {} applied to {} elements",
            k.ground(),
            list.len()
        )));
    }
    let mut out = list.to_vec();
    for &p in k.entries() {
        out.remove(p);
    }
    Ok(out)
}

/// `M_0, …, M_{n−2}` and the final map. Stage `j ≥ 1` reads the
/// flattened characters `(a, s_0, …, s_{j−1})`; its alphabet holds only
/// the configurations reachable from the start. Stage 0 has the states
/// of `M`, later stages have positions `0, 1, …`.
#[derive(Clone, Debug)]
pub struct Cascade {
    pub input: Alphabet,
    pub machines: Vec<MooreMachine>,
    /// On the stage outputs; unary over the input (a constant) when the
    /// cascade is empty.
    pub final_map: CharFn,
}

impl Cascade {
    /// The stage outputs `w_0, …, w_{n−2}`.
    pub fn stage_runs(&self, w: &Word) -> Result<Vec<Word>> {
        let mut runs: Vec<Word> = Vec::with_capacity(self.machines.len());
        for (j, m) in self.machines.iter().enumerate() {
            let input = if j == 0 {
                w.clone()
            } else {
                (0..w.len())
                    .map(|i| Symbol::tuple(std::iter::once(w.0[i].clone()).chain(runs.iter().map(|r| r.0[i].clone()))))
                    .collect()
            };
            runs.push(m.run_trunc(&input)?);
        }
        Ok(runs)
    }

    /// `Cw_f(w_0, …, w_{n−2})`.
    pub fn eval(&self, w: &Word) -> Result<Word> {
        if self.machines.is_empty() {
            return self.final_map.apply(&[w]);
        }
        let runs = self.stage_runs(w)?;
        let refs: Vec<&Word> = runs.iter().collect();
        self.final_map.apply(&refs)
    }

    pub fn to_term(&self) -> Result<Term> {
        let mut tb = TermBuilder::new(vec![self.input.clone()]);
        let x = tb.input(0);
        let mut outs: Vec<NodeId> = Vec::new();
        for (j, m) in self.machines.iter().enumerate() {
            let arg = if j == 0 {
                x
            } else {
                tb.tuplefy(std::iter::once(x).chain(outs.iter().copied()).collect())
            };
            outs.push(tb.moore_trunc(m.clone(), arg));
        }
        let root = if outs.is_empty() {
            tb.cw(self.final_map.clone(), vec![x])
        } else {
            tb.cw(self.final_map.clone(), outs)
        };
        tb.finish(root)
    }
}

/// Krohn-Rhodes by peeling one state per stage: `M_j` is the complement
/// of the current quotient machine, and the next quotient sees the
/// original input together with every earlier stage's state.
pub fn kr_cascade(m: &MooreMachine) -> Result<Cascade> {
    require_transparent(m)?;
    let n = m.num_states();
    let sigma = m.input().clone();
    let ns = sigma.len();
    if n == 1 {
        return Ok(Cascade {
            input: sigma.clone(),
            machines: Vec::new(),
            final_map: CharFn::constant(&[sigma], m.start().clone())?,
        });
    }
    // stage characters: (input symbol, prefix configuration)
    let mut machines: Vec<MooreMachine> = Vec::new();
    let mut char_index: Vec<HashMap<(usize, Vec<usize>), usize>> = Vec::new();
    let mut current = m.clone();
    let mut chars: Vec<(usize, Vec<usize>)> = (0..ns).map(|a| (a, Vec::new())).collect();
    for j in 0..n - 1 {
        let states = current.states().clone();
        let stage = MooreMachine::transparent_from_tables(
            current.input().clone(),
            states.clone(),
            usize::from(current.start_index() == 0),
            complement_delta(&current),
        )?;
        char_index.push(chars.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect());
        machines.push(stage);
        if j == n - 2 {
            break;
        }
        let configs = reachable_configs(&machines, &char_index, ns);
        let stage = &machines[j];
        let next_chars: Vec<(usize, Vec<usize>)> = configs
            .iter()
            .flat_map(|cfg| (0..ns).map(move |a| (a, cfg.clone())))
            .collect();
        let pairs: Vec<(usize, usize)> = next_chars
            .iter()
            .map(|(a, cfg)| (char_index[j][&(*a, cfg[..j].to_vec())], cfg[j]))
            .collect();
        let delta = quotient_delta(&current, stage, &pairs);
        let input = stage_alphabet(m, &machines, &next_chars);
        let start = position_without(current.start_index(), stage.start_index());
        current = MooreMachine::transparent_from_tables(input, index_states(n - j - 1), start, delta)?;
        chars = next_chars;
    }
    let configs = reachable_configs(&machines, &char_index, ns);
    let q: Vec<usize> = (0..n).collect();
    let mut entries = Vec::with_capacity(configs.len());
    for cfg in &configs {
        let left = remove(&q, &OrdinalRemovalSequence::new(cfg.clone(), n)?)?;
        let key: Vec<Symbol> = cfg
            .iter()
            .enumerate()
            .map(|(j, &s)| machines[j].states().get(s).clone())
            .collect();
        entries.push((key, m.states().get(left[0]).clone()));
    }
    Ok(Cascade {
        input: sigma,
        machines,
        final_map: CharFn::new(n - 1, entries)?,
    })
}

fn stage_alphabet(m: &MooreMachine, machines: &[MooreMachine], chars: &[(usize, Vec<usize>)]) -> Alphabet {
    Alphabet::new(chars.iter().map(|(a, cfg)| {
        Symbol::tuple(
            std::iter::once(m.input().get(*a).clone()).chain(
                cfg.iter()
                    .enumerate()
                    .map(|(j, &s)| machines[j].states().get(s).clone()),
            ),
        )
    }))
    .expect("distinct configurations")
}

/// Joint states of the stages built so far reachable from their starts,
/// in breadth-first order.
fn reachable_configs(
    machines: &[MooreMachine],
    char_index: &[HashMap<(usize, Vec<usize>), usize>],
    ns: usize,
) -> Vec<Vec<usize>> {
    let start: Vec<usize> = machines.iter().map(MooreMachine::start_index).collect();
    let mut seen: HashMap<Vec<usize>, ()> = HashMap::from([(start.clone(), ())]);
    let mut order = vec![start.clone()];
    let mut queue = VecDeque::from([start]);
    while let Some(cfg) = queue.pop_front() {
        for a in 0..ns {
            let next: Vec<usize> = (0..machines.len())
                .map(|k| machines[k].step(cfg[k], char_index[k][&(a, cfg[..k].to_vec())]))
                .collect();
            if seen.insert(next.clone(), ()).is_none() {
                order.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    order
}

/// `M^Trunc(w) = Cw_F(M⃗^Trunc(tuplefy(w, M̃^Trunc(w))), M̃^Trunc(w))`.
#[derive(Clone, Debug)]
pub struct Split {
    /// `M̃` over the group generated by the permutation actions.
    pub perm: MooreMachine,
    /// `M⃗` over `Σ × G` with the states of `M`.
    pub reset: MooreMachine,
    /// `F(q, f) = f(q)`, arguments in the order of the composition.
    pub combine: CharFn,
}

impl Split {
    pub fn eval(&self, w: &Word) -> Result<Word> {
        let p = self.perm.run_trunc(w)?;
        let pairs: Word = w
            .iter()
            .zip(p.iter())
            .map(|(a, f)| Symbol::tuple([a.clone(), f.clone()]))
            .collect();
        let r = self.reset.run_trunc(&pairs)?;
        self.combine.apply(&[&r, &p])
    }
}

pub fn split_perm_reset(m: &MooreMachine, limits: Limits) -> Result<Split> {
    require_transparent(m)?;
    let class = classify_actions(m);
    if !class.is_permutation_reset() {
        return Err(Error::WrongClass("permutation-reset machine"));
    }
    let nq = m.num_states();
    let ns = m.input().len();
    let kinds: Vec<ActionKind> = class.actions.iter().map(|(_, k)| *k).collect();
    let is_perm = |a: usize| matches!(kinds[a], ActionKind::Identity | ActionKind::Permutation);
    let actions: Vec<Perm> = (0..ns)
        .map(|a| m.action(a).into_iter().map(|q| q as u32).collect())
        .collect();
    let gens: Vec<Perm> = (0..ns).filter(|&a| is_perm(a)).map(|a| actions[a].clone()).collect();
    let group = perm::closure(nq, &gens, limits, "permutation split")?;
    let g_index: HashMap<&Perm, usize> = group.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let g_states = Alphabet::new(group.iter().map(|g| perm::to_symbol(g)))?;
    let mut d_perm = Vec::with_capacity(group.len() * ns);
    for f in &group {
        for a in 0..ns {
            d_perm.push(if is_perm(a) {
                g_index[&perm::compose(&actions[a], f)]
            } else {
                g_index[f]
            });
        }
    }
    let perm_m = MooreMachine::transparent_from_tables(m.input().clone(), g_states.clone(), 0, d_perm)?;
    let pair_input = Alphabet::product(&[m.input().clone(), g_states.clone()]);
    let ng = group.len();
    let mut d_reset = Vec::with_capacity(nq * ns * ng);
    for q in 0..nq {
        for a in 0..ns {
            for f in &group {
                d_reset.push(if is_perm(a) {
                    q
                } else {
                    perm::inverse(f)[actions[a][0] as usize] as usize
                });
            }
        }
    }
    let reset_m = MooreMachine::transparent_from_tables(pair_input, m.states().clone(), m.start_index(), d_reset)?;
    let combine = CharFn::from_fn(&[m.states().clone(), g_states], |args| {
        let q = m.states().require(&args[0], "state")?;
        let f = perm::from_symbol(&args[1])?;
        Ok(m.states().get(f[q] as usize).clone())
    })?;
    Ok(Split {
        perm: perm_m,
        reset: reset_m,
        combine,
    })
}

/// `M^Trunc(w) = Cw_relabel(AS_n^Trunc(Cw_g(w)))`.
#[derive(Clone, Debug)]
pub struct Accumulator {
    pub n: usize,
    pub g: CharFn,
    /// Defined on the subgroup the accumulator can reach.
    pub relabel: CharFn,
}

impl Accumulator {
    pub fn eval(&self, w: &Word) -> Result<Word> {
        let run = crate::compo::accumulate(self.n, &self.g.apply(&[w])?)?;
        self.relabel.apply(&[&run])
    }
}

/// `g(a) = δ_a^{-1}` so that the accumulated product is the inverse of
/// the composed actions; the start state is then recovered as
/// `h^{-1}(q0)`. When the states are themselves permutations acted on by
/// left multiplication (the shape `split_perm_reset` produces), their
/// degree is used for `n` and `relabel(h) = h^{-1}`.
pub fn perm_to_accumulator(m: &MooreMachine, limits: Limits) -> Result<Accumulator> {
    require_transparent(m)?;
    if !classify_actions(m).is_permutation() {
        return Err(Error::WrongClass("permutation machine"));
    }
    let ns = m.input().len();
    let states = m.states();
    if let Some(left) = left_multiplication(m) {
        let n = left[0].len();
        let gs: Vec<Perm> = left.iter().map(|p| perm::inverse(p)).collect();
        let group = perm::closure(n, &gs, limits, "accumulator")?;
        let g = CharFn::new(
            1,
            (0..ns).map(|a| (vec![m.input().get(a).clone()], perm::to_symbol(&gs[a]))),
        )?;
        let relabel = CharFn::new(
            1,
            group
                .iter()
                .map(|h| (vec![perm::to_symbol(h)], perm::to_symbol(&perm::inverse(h)))),
        )?;
        return Ok(Accumulator { n, g, relabel });
    }
    let n = m.num_states();
    let gs: Vec<Perm> = (0..ns)
        .map(|a| perm::inverse(&m.action(a).into_iter().map(|q| q as u32).collect::<Vec<_>>()))
        .collect();
    let group = perm::closure(n, &gs, limits, "accumulator")?;
    let g = CharFn::new(
        1,
        (0..ns).map(|a| (vec![m.input().get(a).clone()], perm::to_symbol(&gs[a]))),
    )?;
    let q0 = m.start_index();
    let relabel = CharFn::new(
        1,
        group.iter().map(|h| {
            (
                vec![perm::to_symbol(h)],
                states.get(perm::inverse(h)[q0] as usize).clone(),
            )
        }),
    )?;
    Ok(Accumulator { n, g, relabel })
}

/// The permutations `p_a` with `δ(f, a) = p_a ∘ f` for every state `f`,
/// when the states are permutations of one degree and the start is the
/// identity.
fn left_multiplication(m: &MooreMachine) -> Option<Vec<Perm>> {
    let states: Vec<Perm> = m
        .states()
        .iter()
        .map(|s| s.as_perm().map(<[u32]>::to_vec))
        .collect::<Option<_>>()?;
    let n = states.first()?.len();
    if n == 0 || states.iter().any(|p| p.len() != n || !perm::is_permutation(p)) {
        return None;
    }
    if !perm::is_identity(&states[m.start_index()]) {
        return None;
    }
    let index: HashMap<&Perm, usize> = states.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut out = Vec::with_capacity(m.input().len());
    for a in 0..m.input().len() {
        let p = states[m.step(m.start_index(), a)].clone();
        for (i, f) in states.iter().enumerate() {
            if index.get(&perm::compose(&p, f)) != Some(&m.step(i, a)) {
                return None;
            }
        }
        out.push(p);
    }
    Some(out)
}

/// `Cw_f(Bit^Trunc(Cw_{g_0}(w)), …, Bit^Trunc(Cw_{g_{n−1}}(w)))`.
#[derive(Clone, Debug)]
pub struct Bits {
    pub commands: Vec<CharFn>,
    /// On `{0,1}^n`; unary constant over the input when `n = 0`.
    pub decode: CharFn,
}

impl Bits {
    pub fn width(&self) -> usize {
        self.commands.len()
    }

    pub fn eval(&self, w: &Word) -> Result<Word> {
        if self.commands.is_empty() {
            return self.decode.apply(&[w]);
        }
        let tracks = self
            .commands
            .iter()
            .map(|g| crate::compo::bit_trunc(&g.apply(&[w])?))
            .collect::<Result<Vec<_>>>()?;
        let refs: Vec<&Word> = tracks.iter().collect();
        self.decode.apply(&refs)
    }
}

pub fn bit_alphabet() -> Alphabet {
    Alphabet::from_tokens(["-", "0", "1"]).expect("distinct")
}

/// Codes by state order: `q0` gets all zeros, the others count up from
/// 1 in order; bit `k` is character `k` of the most-significant-first
/// binary string.
pub fn reset_to_bits(m: &MooreMachine) -> Result<Bits> {
    require_transparent(m)?;
    let class = classify_actions(m);
    if !class.is_reset() {
        return Err(Error::WrongClass("reset machine"));
    }
    let nq = m.num_states();
    let width = if nq <= 1 {
        0
    } else {
        (usize::BITS - (nq - 1).leading_zeros()) as usize
    };
    let q0 = m.start_index();
    let mut code = vec![0usize; nq];
    let mut next = 1;
    for (q, c) in code.iter_mut().enumerate() {
        if q != q0 {
            *c = next;
            next += 1;
        }
    }
    let bit = |c: usize, k: usize| (c >> (width - 1 - k)) & 1;
    if width == 0 {
        return Ok(Bits {
            commands: Vec::new(),
            decode: CharFn::constant(&[m.input().clone()], m.start().clone())?,
        });
    }
    let mut commands = Vec::with_capacity(width);
    for k in 0..width {
        let g = CharFn::new(
            1,
            class.actions.iter().enumerate().map(|(a, (s, kind))| {
                let cmd = match kind {
                    ActionKind::Identity => "-".to_string(),
                    _ => bit(code[m.step(0, a)], k).to_string(),
                };
                (vec![s.clone()], Symbol::atom(cmd))
            }),
        )?;
        commands.push(g);
    }
    let binary = Alphabet::from_tokens(["0", "1"]).expect("distinct");
    let by_code: HashMap<usize, usize> = code.iter().enumerate().map(|(q, &c)| (c, q)).collect();
    let decode = CharFn::from_fn(&vec![binary; width], |bits| {
        let c = bits
            .iter()
            .fold(0usize, |acc, b| acc * 2 + usize::from(b.as_atom() == Some("1")));
        Ok(m.states().get(by_code.get(&c).copied().unwrap_or(q0)).clone())
    })?;
    Ok(Bits { commands, decode })
}

/// `AS_n = (S_n, S_n, id, δ_g(h) = h·g)`, states in lexicographic order.
pub fn build_as_n(n: usize, limits: Limits) -> Result<MooreMachine> {
    if n == 0 {
        return Err(Error::InvalidMachine("S_0 has no accumulator".into()));
    }
    let all = perm::all_perms(n, limits)?;
    let index: HashMap<&Perm, usize> = all.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let alphabet = Alphabet::new(all.iter().map(|p| perm::to_symbol(p)))?;
    let delta = all
        .iter()
        .flat_map(|h| all.iter().map(|g| index[&perm::compose(h, g)]))
        .collect();
    MooreMachine::transparent_from_tables(alphabet.clone(), alphabet, 0, delta)
}

/// `Bit = ({-,0,1}, {0,1}, 0, δ)`.
pub fn build_bit() -> MooreMachine {
    let states = Alphabet::from_tokens(["0", "1"]).expect("distinct");
    MooreMachine::transparent_from_tables(bit_alphabet(), states, 0, vec![0, 0, 1, 1, 0, 1]).expect("total")
}

/// `M^Trunc` for any Moore machine, as a term over `AS_n^Trunc`,
/// `Bit^Trunc`, `Cw` and `tuplefy`.
pub fn moore_to_generators(m: &MooreMachine, limits: Limits) -> Result<Term> {
    let r = m.minimize();
    let core = r.transparent_core();
    let cascade = kr_cascade(&core)?;
    let mut tb = TermBuilder::new(vec![m.input().clone()]);
    let x = tb.input(0);
    let mut outs: Vec<NodeId> = Vec::new();
    for (j, stage) in cascade.machines.iter().enumerate() {
        let arg = if j == 0 {
            x
        } else {
            tb.tuplefy(std::iter::once(x).chain(outs.iter().copied()).collect())
        };
        outs.push(stage_generators(&mut tb, stage, arg, limits)?);
    }
    let out_of = |q: &Symbol| -> Result<Symbol> {
        let i = r.states().require(q, "state")?;
        Ok(r.output().get(r.eps_index(i)).clone())
    };
    let entries: Vec<(Vec<Symbol>, Symbol)> = cascade
        .final_map
        .entries()
        .map(|(k, v)| Ok((k.clone(), out_of(v)?)))
        .collect::<Result<_>>()?;
    let last = CharFn::new(cascade.final_map.arity(), entries)?;
    let root = if outs.is_empty() {
        tb.cw(last, vec![x])
    } else {
        tb.cw(last, outs)
    };
    tb.finish(root)
}

/// `stage^Trunc(arg)` for one permutation-reset stage.
pub(crate) fn stage_generators(
    tb: &mut TermBuilder,
    stage: &MooreMachine,
    arg: NodeId,
    limits: Limits,
) -> Result<NodeId> {
    let split = split_perm_reset(stage, limits)?;
    let p = if split.perm.num_states() == 1 {
        let id = split.perm.start().clone();
        tb.cw(CharFn::constant(&[stage.input().clone()], id)?, vec![arg])
    } else {
        let acc = perm_to_accumulator(&split.perm, limits)?;
        let g = tb.cw(acc.g, vec![arg]);
        let run = tb.asn_trunc(acc.n, g);
        tb.cw(acc.relabel, vec![run])
    };
    let pairs = tb.tuplefy(vec![arg, p]);
    let r = reset_generators(tb, &split.reset, pairs)?;
    Ok(tb.cw(split.combine, vec![r, p]))
}

/// `m^Trunc(arg)` for a reset machine via bits.
pub(crate) fn reset_generators(tb: &mut TermBuilder, m: &MooreMachine, arg: NodeId) -> Result<NodeId> {
    let bits = reset_to_bits(m)?;
    if bits.commands.is_empty() {
        return Ok(tb.cw(bits.decode, vec![arg]));
    }
    let tracks: Vec<NodeId> = bits
        .commands
        .into_iter()
        .map(|g| {
            let c = tb.cw(g, vec![arg]);
            tb.bit_trunc(c)
        })
        .collect();
    Ok(tb.cw(bits.decode, tracks))
}

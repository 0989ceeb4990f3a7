//! Conjugation by `Rev`, `M^Rest` and `M(w)` through `M^Trunc`, reverse
//! machines as reverse generators, and removal of `RAS_n` with the mask
//! and broadcast construction.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::compo::{Node, NodeId, Term, TermBuilder};
use crate::error::{Error, Result};
use crate::krohnrhodes::{bit_alphabet, build_as_n, build_bit, moore_to_generators, reset_to_bits};
use crate::machines::{MooreMachine, ReverseMooreMachine};
use crate::perm::{self, Limits, Perm};
use crate::words::{Alphabet, CharFn, Symbol};

/// Largest symbol set tracked when tabulating maps around accumulators.
const SYMBOL_CAP: usize = 1 << 16;

/// Rebuilds the live part of `t` node by node; `f` receives the new ids
/// of the node's children.
fn rebuild(t: &Term, mut f: impl FnMut(&mut TermBuilder, NodeId, &Node, &[NodeId]) -> Result<NodeId>) -> Result<Term> {
    let live = t.live();
    let mut tb = TermBuilder::new(t.alphabets().to_vec());
    let mut map = vec![usize::MAX; t.len()];
    for (id, node) in t.nodes().iter().enumerate() {
        if live[id] {
            let kids: Vec<NodeId> = node.children().iter().map(|&c| map[c]).collect();
            map[id] = f(&mut tb, id, node, &kids)?;
        }
    }
    tb.finish(map[t.root()])
}

fn copy(tb: &mut TermBuilder, node: &Node, kids: &[NodeId]) -> NodeId {
    let mut it = kids.iter().copied();
    let map: HashMap<NodeId, NodeId> = node
        .children()
        .into_iter()
        .map(|c| (c, it.next().expect("same arity")))
        .collect();
    tb.push(node.map_children(|c| map[&c]))
}

fn perms_of(set: &Option<BTreeSet<Symbol>>, n: usize, limits: Limits) -> Result<Vec<Perm>> {
    match set {
        Some(s) => {
            let ps = s.iter().map(perm::from_symbol).collect::<Result<Vec<_>>>()?;
            match ps.iter().find(|p| p.len() != n) {
                Some(p) => Err(Error::InvalidTerm(format!("{} is not in S_{n}", perm::to_symbol(p)))),
                None => Ok(ps),
            }
        }
        None => perm::all_perms(n, limits),
    }
}

fn perm_alphabet(ps: &[Perm]) -> Alphabet {
    Alphabet::new(ps.iter().map(|p| perm::to_symbol(p))).expect("distinct permutations")
}

fn group_of(n: usize, gens: &[Perm], limits: Limits) -> Result<Vec<Perm>> {
    perm::closure(n, gens, limits, "reverse accumulator")
}

/// `(Q, Σ) ↦ f(q, a)` for a table of pairs.
fn state_input_map(states: &Alphabet, input: &Alphabet, mut f: impl FnMut(usize, usize) -> Symbol) -> Result<CharFn> {
    CharFn::from_fn(&[states.clone(), input.clone()], |args| {
        let q = states.require(&args[0], "state")?;
        let a = input.require(&args[1], "input")?;
        Ok(f(q, a))
    })
}

/// `M^Rest(w) = Cw_{ε∘δ}(M^Trunc(w), w)`.
pub fn rest_via_trunc(m: &MooreMachine) -> Result<Term> {
    let mut tb = TermBuilder::new(vec![m.input().clone()]);
    let x = tb.input(0);
    let run = tb.moore_trunc(m.transparent_core(), x);
    let table = state_input_map(m.states(), m.input(), |q, a| {
        m.output().get(m.eps_index(m.step(q, a))).clone()
    })?;
    let root = tb.cw(table, vec![run, x]);
    tb.finish(root)
}

/// `M(w) = M'^Trunc(S_#(w))` with `#` read as the identity.
pub fn run_via_trunc(m: &MooreMachine) -> Result<Term> {
    let augmented = m.with_identity_symbol(Symbol::pad())?;
    let mut tb = TermBuilder::new(vec![m.input().clone()]);
    let x = tb.input(0);
    let s = tb.succ(Symbol::pad(), x);
    let root = tb.moore_trunc(augmented, s);
    tb.finish(root)
}

pub fn build_rbit() -> ReverseMooreMachine {
    build_bit().reverse()
}

pub fn build_ras_n(n: usize, limits: Limits) -> Result<ReverseMooreMachine> {
    Ok(build_as_n(n, limits)?.reverse())
}

/// The machine whose states are `(state before, state after)` of the
/// last character, so that `M^Trunc` is the first component of its Rest.
fn pair_machine(m: &MooreMachine) -> MooreMachine {
    let ns = m.input().len();
    let q0 = m.start_index();
    let mut index: HashMap<(usize, usize), usize> = HashMap::from([((q0, q0), 0)]);
    let mut pairs = vec![(q0, q0)];
    let mut queue = VecDeque::from([0usize]);
    let mut rows: Vec<Vec<usize>> = vec![Vec::new()];
    while let Some(i) = queue.pop_front() {
        let (_, q) = pairs[i];
        let mut row = Vec::with_capacity(ns);
        for a in 0..ns {
            let key = (q, m.step(q, a));
            let id = *index.entry(key).or_insert_with(|| {
                pairs.push(key);
                rows.push(Vec::new());
                queue.push_back(pairs.len() - 1);
                pairs.len() - 1
            });
            row.push(id);
        }
        rows[i] = row;
    }
    let states = Alphabet::new(
        pairs
            .iter()
            .map(|&(p, q)| Symbol::tuple([m.states().get(p).clone(), m.states().get(q).clone()])),
    )
    .expect("distinct pairs");
    MooreMachine::transparent_from_tables(m.input().clone(), states, 0, rows.concat()).expect("total")
}

/// Replaces every node by its conjugate by `Rev`, so that evaluating the
/// result on reversed inputs gives the reversed output. Only
/// length-preserving nodes have conjugates.
pub fn conjugate_term(t: &Term, limits: Limits) -> Result<Term> {
    let possible = t.possible_symbols(SYMBOL_CAP);
    rebuild(t, |tb, _, node, kids| {
        let child_set = |c: NodeId| &possible[c];
        Ok(match node {
            Node::Input(_) | Node::Tuplefy(_) | Node::Cw(..) => copy(tb, node, kids),
            Node::Const(_) => return Err(Error::NoConjugate("const")),
            Node::Succ(..) => return Err(Error::NoConjugate("succ")),
            Node::Unpad(_) => return Err(Error::NoConjugate("unpad")),
            Node::Mask(_) => return Err(Error::NoConjugate("mask")),
            Node::AsnTrunc(n, c) => {
                let gens = perms_of(child_set(*c), *n, limits)?;
                let group = group_of(*n, &gens, limits)?;
                let ras = tb.rasn_trunc(*n, kids[0]);
                let table = CharFn::from_fn(&[perm_alphabet(&group), perm_alphabet(&gens)], |args| {
                    let (r, g) = (perm::from_symbol(&args[0])?, perm::from_symbol(&args[1])?);
                    Ok(perm::to_symbol(&perm::compose(&r, &perm::inverse(&g))))
                })?;
                tb.cw(table, vec![ras, kids[0]])
            }
            Node::RasnTrunc(n, c) => {
                let gens = perms_of(child_set(*c), *n, limits)?;
                let group = group_of(*n, &gens, limits)?;
                let acc = tb.asn_trunc(*n, kids[0]);
                let table = CharFn::from_fn(&[perm_alphabet(&group), perm_alphabet(&gens)], |args| {
                    let (h, g) = (perm::from_symbol(&args[0])?, perm::from_symbol(&args[1])?);
                    Ok(perm::to_symbol(&perm::compose(&h, &g)))
                })?;
                tb.cw(table, vec![acc, kids[0]])
            }
            Node::BitTrunc(_) => conjugate_bit(tb, kids[0])?,
            Node::RbitTrunc(_) => {
                let run = tb.bit_trunc(kids[0]);
                let bits = Alphabet::from_tokens(["0", "1"]).expect("distinct");
                let table = CharFn::from_fn(&[bits, bit_alphabet()], |args| {
                    Ok(if args[1].as_atom() == Some("-") {
                        args[0].clone()
                    } else {
                        args[1].clone()
                    })
                })?;
                tb.cw(table, vec![run, kids[0]])
            }
            Node::MooreTrunc(m, _) => {
                let r = m.restrict_reachable();
                let pm = pair_machine(&r.transparent_core());
                let run = tb.rev_moore_trunc(pm.reverse(), kids[0]);
                let table = CharFn::unary(pm.states(), |s| {
                    let p = r.states().require(&s.components().expect("pair state")[0], "state")?;
                    Ok(r.output().get(r.eps_index(p)).clone())
                })?;
                tb.cw(table, vec![run])
            }
            Node::RevMooreTrunc(r, _) => {
                let m = r.reverse();
                let run = tb.moore_trunc(m.transparent_core(), kids[0]);
                let table = state_input_map(m.states(), m.input(), |q, a| {
                    m.output().get(m.eps_index(m.step(q, a))).clone()
                })?;
                tb.cw(table, vec![run, kids[0]])
            }
        })
    })
}

/// `Rev ∘ Bit^Trunc ∘ Rev` from `RBit^Trunc`: the value at `i` is the
/// leftmost reset strictly after `i`. Resets are split into two tracks by
/// the parity of the number of resets before them (an `AS_2` run); the
/// next reset after a reset lies on the other track, the next reset
/// after a `-` lies on the track of the current parity.
fn conjugate_bit(tb: &mut TermBuilder, w: NodeId) -> Result<NodeId> {
    let swap = perm::to_symbol(&[1, 0]);
    let id = perm::to_symbol(&[0, 1]);
    let parities = Alphabet::new([id.clone(), swap.clone()])?;
    let cmds = bit_alphabet();
    let bits = Alphabet::from_tokens(["0", "1"]).expect("distinct");
    let toggle = CharFn::unary(&cmds, |c| {
        Ok(if c.as_atom() == Some("-") {
            id.clone()
        } else {
            swap.clone()
        })
    })?;
    let t = tb.cw(toggle, vec![w]);
    let parity = tb.asn_trunc(2, t);
    let track = |odd: bool| {
        CharFn::from_fn(&[cmds.clone(), parities.clone()], |args| {
            let on = (args[1] == swap) == odd && args[0].as_atom() != Some("-");
            Ok(if on { args[0].clone() } else { Symbol::atom("-") })
        })
    };
    let even = tb.cw(track(false)?, vec![w, parity]);
    let odd = tb.cw(track(true)?, vec![w, parity]);
    let re = tb.rbit_trunc(even);
    let ro = tb.rbit_trunc(odd);
    let pick = CharFn::from_fn(&[cmds, parities, bits.clone(), bits], |args| {
        let odd_now = args[1] == swap;
        let is_reset = args[0].as_atom() != Some("-");
        let use_odd = odd_now != is_reset;
        Ok(if use_odd { args[3].clone() } else { args[2].clone() })
    })?;
    Ok(tb.cw(pick, vec![w, parity, re, ro]))
}

/// `R^Trunc` for a reverse machine whose forward reading is a reset
/// machine: `Cw_f(RBit^Trunc(Cw_{g_0}(w)), …)` with the codes of
/// `reset_to_bits`.
pub fn rev_reset_to_rbits(r: &ReverseMooreMachine) -> Result<Term> {
    let mut tb = TermBuilder::new(vec![r.input().clone()]);
    let x = tb.input(0);
    let root = rev_reset_generators(&mut tb, r, x)?;
    tb.finish(root)
}

pub(crate) fn rev_reset_generators(tb: &mut TermBuilder, r: &ReverseMooreMachine, arg: NodeId) -> Result<NodeId> {
    let m = r.reverse();
    let bits = reset_to_bits(&m.transparent_core())?;
    let out =
        |q: &Symbol| -> Result<Symbol> { Ok(m.output().get(m.eps_index(m.states().require(q, "state")?)).clone()) };
    let decode = CharFn::new(
        bits.decode.arity(),
        bits.decode
            .entries()
            .map(|(k, v)| Ok((k.clone(), out(v)?)))
            .collect::<Result<Vec<_>>>()?,
    )?;
    if bits.commands.is_empty() {
        return Ok(tb.cw(decode, vec![arg]));
    }
    let tracks: Vec<NodeId> = bits
        .commands
        .into_iter()
        .map(|g| {
            let c = tb.cw(g, vec![arg]);
            tb.rbit_trunc(c)
        })
        .collect();
    Ok(tb.cw(decode, tracks))
}

/// The broadcast machine over `{0,1} × G`: `(1, b)` resets to `b`,
/// `(0, b)` keeps the state; final state the identity.
pub fn broadcast_machine(group: &[Perm]) -> Result<ReverseMooreMachine> {
    let g_alpha = perm_alphabet(group);
    let bits = Alphabet::from_tokens(["0", "1"]).expect("distinct");
    let input = Alphabet::product(&[bits, g_alpha.clone()]);
    let id = g_alpha
        .index_of(&perm::to_symbol(&perm::identity(group[0].len())))
        .ok_or_else(|| Error::InvalidMachine("group without identity".into()))?;
    let ng = group.len();
    let mut delta = Vec::with_capacity(ng * input.len());
    for later in 0..ng {
        for c in 0..input.len() {
            let (bit, b) = (c / ng, c % ng);
            delta.push(if bit == 1 { b } else { later });
        }
    }
    ReverseMooreMachine::transparent_from_tables(input, g_alpha, id, delta)
}

/// Rewrites every `RAS_n^Trunc(v)` through `AS_n`: with `w = Cw_inverse(v)`,
/// the full run of `AS_n` on `w`, its last character broadcast by the
/// reverse reset machine, left multiplication by the inverse of that
/// broadcast, then `(0,a) ↦ a`, `(1,a) ↦ #` and unpad.
pub fn eliminate_ras(t: &Term, limits: Limits) -> Result<Term> {
    let possible = t.possible_symbols(SYMBOL_CAP);
    rebuild(t, |tb, _, node, kids| {
        let Node::RasnTrunc(n, c) = node else {
            return Ok(copy(tb, node, kids));
        };
        let n = *n;
        let vs = perms_of(&possible[*c], n, limits)?;
        let group = group_of(n, &vs, limits)?;
        let g_alpha = perm_alphabet(&group);
        let bits = Alphabet::from_tokens(["0", "1"]).expect("distinct");
        let inv = CharFn::unary(&perm_alphabet(&vs), |s| {
            Ok(perm::to_symbol(&perm::inverse(&perm::from_symbol(s)?)))
        })?;
        let w = tb.cw(inv.clone(), vec![kids[0]]);
        let id = perm::to_symbol(&perm::identity(n));
        let s = tb.succ(id, w);
        let full = tb.asn_trunc(n, s);
        let inv_alpha = Alphabet::new(inv.image())?;
        let zero = tb.cw(CharFn::constant(&[inv_alpha], Symbol::atom("0"))?, vec![w]);
        let mask = tb.succ(Symbol::atom("1"), zero);
        let pair = tb.cw(CharFn::pairing(&[bits.clone(), g_alpha.clone()])?, vec![mask, full]);
        let broadcast = rev_reset_generators(tb, &broadcast_machine(&group)?, pair)?;
        let shift = CharFn::from_fn(&[g_alpha.clone(), g_alpha.clone()], |args| {
            let (b, h) = (perm::from_symbol(&args[0])?, perm::from_symbol(&args[1])?);
            Ok(perm::to_symbol(&perm::compose(&perm::inverse(&b), &h)))
        })?;
        let ras = tb.cw(shift, vec![broadcast, full]);
        let finish = CharFn::from_fn(&[bits, g_alpha], |args| {
            Ok(if args[0].as_atom() == Some("1") {
                Symbol::pad()
            } else {
                args[1].clone()
            })
        })?;
        let marked = tb.cw(finish, vec![mask, ras]);
        Ok(tb.unpad(marked))
    })
}

/// `R^Trunc` over the final generators: the conjugate of
/// `Rev(R)^Rest` written through `moore_to_generators`, then `RAS_n`
/// removed.
pub fn rev_moore_to_generators(r: &ReverseMooreMachine, limits: Limits) -> Result<Term> {
    let m = r.reverse().minimize();
    let core = m.transparent_core();
    let trunc = moore_to_generators(&core, limits)?;
    let mut tb = TermBuilder::new(vec![m.input().clone()]);
    let x = tb.input(0);
    let run = tb.embed(&trunc, &[x])?;
    let table = state_input_map(m.states(), m.input(), |q, a| {
        m.output().get(m.eps_index(m.step(q, a))).clone()
    })?;
    let root = tb.cw(table, vec![run, x]);
    let rest = tb.finish(root)?;
    let conj = conjugate_term(&rest, limits)?;
    eliminate_ras(&conj, limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::fixtures;
    use crate::words::{rev, words_up_to, Word};

    #[test]
    fn rest_of_parity() {
        let p = fixtures::parity();
        let t = rest_via_trunc(&p).unwrap();
        assert_eq!(t.eval(&[Word::from_tokens(["0", "1"])]).unwrap().to_string(), "e,o");
        for w in words_up_to(p.input(), 6) {
            assert_eq!(t.eval(std::slice::from_ref(&w)).unwrap(), p.run_rest(&w).unwrap());
            assert_eq!(
                run_via_trunc(&p).unwrap().eval(std::slice::from_ref(&w)).unwrap(),
                p.run(&w).unwrap()
            );
        }
    }

    #[test]
    fn conjugates_of_generators() {
        let limits = Limits::default();
        let bits = bit_alphabet();
        let mut tb = TermBuilder::new(vec![bits.clone()]);
        let x = tb.input(0);
        let b = tb.bit_trunc(x);
        let t = tb.finish(b).unwrap();
        let c = conjugate_term(&t, limits).unwrap();
        for w in words_up_to(&bits, 6) {
            assert_eq!(
                c.eval(&[rev(&w)]).unwrap(),
                rev(&t.eval(std::slice::from_ref(&w)).unwrap()),
                "{w:?}"
            );
        }
        let cc = conjugate_term(&c, limits).unwrap();
        for w in words_up_to(&bits, 5) {
            assert_eq!(cc.eval(std::slice::from_ref(&w)).unwrap(), t.eval(&[w]).unwrap());
        }
    }

    #[test]
    fn reverse_parity_and_last() {
        let limits = Limits::default();
        for m in [fixtures::parity(), fixtures::last(), fixtures::trivial()] {
            let r = m.reverse();
            let t = rev_moore_to_generators(&r, limits).unwrap();
            assert!(
                t.leaf_census().keys().all(|k| k.is_final_generator()),
                "{:?}",
                t.leaf_census()
            );
            for w in words_up_to(m.input(), 6) {
                assert_eq!(
                    t.eval(std::slice::from_ref(&w)).unwrap(),
                    r.run_trunc(&w).unwrap(),
                    "{w:?}"
                );
            }
        }
    }

    #[test]
    fn ras_elimination_in_s3() {
        let limits = Limits::default();
        let perms = perm::all_perms(3, limits).unwrap();
        let a = perm_alphabet(&perms);
        let mut tb = TermBuilder::new(vec![a.clone()]);
        let x = tb.input(0);
        let r = tb.rasn_trunc(3, x);
        let t = tb.finish(r).unwrap();
        let e = eliminate_ras(&t, limits).unwrap();
        assert!(!e.leaf_census().contains_key(&crate::compo::NodeKind::RasnTrunc));
        for w in words_up_to(&a, 3) {
            assert_eq!(e.eval(std::slice::from_ref(&w)).unwrap(), t.eval(&[w]).unwrap());
        }
    }
}

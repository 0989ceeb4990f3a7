//! The end-to-end decomposition and its stage-bounded variants.

use std::str::FromStr;

use super::term::{Node, NodeKind, Term, TermBuilder};
use crate::detharvest::{detharvest_decompose, length_bound, length_normalize, lift_to_general};
use crate::error::{Error, Result};
use crate::krohnrhodes::{kr_cascade, moore_to_generators};
use crate::machines::{graph_automaton, reverse_graph_automaton, MachineFile, Mode, RelationAutomaton};
use crate::perm::Limits;
use crate::reversal::{eliminate_ras, rev_moore_to_generators};

/// Replaces every machine node by its generator term. Accumulators over
/// reverse runs left in `t` are eliminated as well.
pub fn expand_machines(t: &Term, limits: Limits) -> Result<Term> {
    let mut tb = TermBuilder::new(t.alphabets().to_vec());
    let live = t.live();
    let mut map = vec![usize::MAX; t.len()];
    for (id, node) in t.nodes().iter().enumerate() {
        if !live[id] {
            continue;
        }
        map[id] = match node {
            Node::MooreTrunc(m, c) => tb.embed(&moore_to_generators(m, limits)?, &[map[*c]])?,
            Node::RevMooreTrunc(r, c) => tb.embed(&rev_moore_to_generators(r, limits)?, &[map[*c]])?,
            other => tb.push(other.map_children(|c| map[c])),
        };
    }
    let out = tb.finish(map[t.root()])?;
    if out.leaf_census().contains_key(&NodeKind::RasnTrunc) {
        eliminate_ras(&out, limits)
    } else {
        Ok(out)
    }
}

/// Checks that only final generators occur in `t`.
pub fn check_final(t: &Term) -> Result<()> {
    match t.leaf_census().into_keys().find(|k| !k.is_final_generator()) {
        Some(k) => Err(Error::InvalidTerm(format!("`{}` left after expansion", k.op()))),
        None => Ok(()),
    }
}

/// Normalizes the relation to a length-preserving `g`, splits `g` into a
/// forward and a reverse pass, expands both into generators and lifts the
/// result back to the original arity.
pub fn full_decompose(rel: &RelationAutomaton, limits: Limits) -> Result<Term> {
    let g = detharvest_stage(rel)?;
    let t = expand_machines(&g, limits)?;
    check_final(&t)?;
    Ok(t.compact())
}

/// The lifted two-pass term with its machine nodes intact.
fn detharvest_stage(rel: &RelationAutomaton) -> Result<Term> {
    let c = length_bound(rel);
    let g = length_normalize(rel, c)?;
    let dh = detharvest_decompose(&g)?;
    lift_to_general(&dh.term, c, rel.input_alphabets())
}

/// How far `decompose` goes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    /// The two-pass term over machine nodes.
    Detharvest,
    /// A Moore machine as its cascade of permutation-reset stages.
    Cascade,
    /// Final generators only.
    Generators,
    /// `full_decompose`; relations only.
    Full,
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "detharvest" => Stage::Detharvest,
            "cascade" => Stage::Cascade,
            "generators" => Stage::Generators,
            "full" => Stage::Full,
            other => return Err(Error::InvalidTerm(format!("unknown stage `{other}`"))),
        })
    }
}

/// Runs the pipeline on a machine file up to `stage`. Moore and reverse
/// machines are decomposed as their truncated runs.
pub fn decompose_stage(input: &MachineFile, stage: Stage, limits: Limits) -> Result<Term> {
    match (stage, input) {
        (Stage::Detharvest, MachineFile::Relation(rel)) => detharvest_stage(rel),
        (Stage::Detharvest, MachineFile::Moore(m)) => Ok(detharvest_decompose(&graph_automaton(m, Mode::Trunc)?)?.term),
        (Stage::Detharvest, MachineFile::ReverseMoore(r)) => {
            Ok(detharvest_decompose(&reverse_graph_automaton(r)?)?.term)
        }
        (Stage::Cascade, MachineFile::Moore(m)) => kr_cascade(&m.restrict_reachable())?.to_term(),
        (Stage::Cascade, _) => Err(Error::WrongClass("a Moore machine for the cascade stage")),
        (Stage::Generators, MachineFile::Moore(m)) => moore_to_generators(m, limits),
        (Stage::Generators, MachineFile::ReverseMoore(r)) => rev_moore_to_generators(r, limits),
        (Stage::Generators | Stage::Full, MachineFile::Relation(rel)) => full_decompose(rel, limits),
        (Stage::Full, _) => Err(Error::WrongClass("a relation automaton for the full stage")),
        (_, MachineFile::Nfa(_)) => Err(Error::WrongClass("a machine or relation automaton, not a plain NFA,")),
    }
}

//! The machine file format.
//!
//! ```json
//! {"kind":"moore","input_alphabet":["0","1"],"states":["e","o"],"initial":"e",
//!  "transparent":true,"delta":[["e","0","e"],["e","1","o"],["o","0","o"],["o","1","e"]]}
//! ```
//!
//! Non-transparent machines carry `output_alphabet` and `epsilon` (pairs
//! `[q, o]`). Reverse machines use `"kind":"reverse_moore"` and `final`,
//! with triples `[later, a, earlier]`. Relations use `"kind":"relation"`
//! (`"nfa"` plus `arity` is accepted too) with `component_alphabets` and
//! the nfa fields.

use serde_json::{json, Map, Value};

use super::{MooreMachine, Nfa, RelationAutomaton, ReverseMooreMachine};
use crate::error::{Error, Result};
use crate::json::{
    alphabet_from_json, alphabet_to_json, array, field, object, string, symbol_from_json, symbol_to_json, uint,
};
use crate::words::{Alphabet, Symbol};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MachineFile {
    Moore(MooreMachine),
    ReverseMoore(ReverseMooreMachine),
    Nfa(Nfa),
    Relation(RelationAutomaton),
}

impl MachineFile {
    pub fn to_json(&self) -> Value {
        match self {
            MachineFile::Moore(m) => moore_to_json(m),
            MachineFile::ReverseMoore(r) => reverse_to_json(r),
            MachineFile::Nfa(a) => nfa_to_json(a),
            MachineFile::Relation(r) => relation_to_json(r),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = object(v, "$")?;
        let kind = string(field(obj, "kind", "$")?, "$.kind")?;
        match kind {
            "moore" => moore_from_json(v).map(MachineFile::Moore),
            "reverse_moore" => reverse_from_json(v).map(MachineFile::ReverseMoore),
            "nfa" if obj.contains_key("arity") => relation_from_json(v).map(MachineFile::Relation),
            "nfa" => nfa_from_json(v).map(MachineFile::Nfa),
            "relation" => relation_from_json(v).map(MachineFile::Relation),
            other => Err(Error::format("$.kind", format!("unknown machine kind `{other}`"))),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        MachineFile::from_json(&crate::json::parse(text)?)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MachineFile::Moore(_) => "moore",
            MachineFile::ReverseMoore(_) => "reverse_moore",
            MachineFile::Nfa(_) => "nfa",
            MachineFile::Relation(_) => "relation",
        }
    }
}

fn tables_to_json(
    kind: &str,
    anchor_key: &str,
    input: &Alphabet,
    states: &Alphabet,
    anchor: usize,
    output: &Alphabet,
    delta: &[usize],
    eps: &[usize],
    transparent: bool,
) -> Value {
    let ns = input.len();
    let triples: Vec<Value> = (0..states.len())
        .flat_map(|q| {
            (0..ns).map(move |a| {
                json!([
                    symbol_to_json(states.get(q)),
                    symbol_to_json(input.get(a)),
                    symbol_to_json(states.get(delta[q * ns + a]))
                ])
            })
        })
        .collect();
    let mut obj = Map::new();
    obj.insert("kind".into(), json!(kind));
    obj.insert("input_alphabet".into(), alphabet_to_json(input));
    obj.insert("states".into(), alphabet_to_json(states));
    obj.insert(anchor_key.into(), symbol_to_json(states.get(anchor)));
    obj.insert("delta".into(), Value::Array(triples));
    if transparent {
        obj.insert("transparent".into(), json!(true));
    } else {
        obj.insert("output_alphabet".into(), alphabet_to_json(output));
        obj.insert(
            "epsilon".into(),
            Value::Array(
                (0..states.len())
                    .map(|q| json!([symbol_to_json(states.get(q)), symbol_to_json(output.get(eps[q]))]))
                    .collect(),
            ),
        );
    }
    Value::Object(obj)
}

pub fn moore_to_json(m: &MooreMachine) -> Value {
    tables_to_json(
        "moore",
        "initial",
        m.input(),
        m.states(),
        m.start_index(),
        m.output(),
        m.delta_table(),
        m.eps_table(),
        m.is_transparent(),
    )
}

pub fn reverse_to_json(r: &ReverseMooreMachine) -> Value {
    tables_to_json(
        "reverse_moore",
        "final",
        r.input(),
        r.states(),
        r.final_index(),
        r.output(),
        r.delta_table(),
        r.eps_table(),
        r.is_transparent(),
    )
}

struct Tables {
    input: Alphabet,
    states: Alphabet,
    anchor: usize,
    output: Alphabet,
    delta: Vec<usize>,
    eps: Vec<usize>,
}

fn tables_from_json(v: &Value, anchor_key: &str) -> Result<Tables> {
    let obj = object(v, "$")?;
    let input = alphabet_from_json(field(obj, "input_alphabet", "$")?, "$.input_alphabet")?;
    let states = alphabet_from_json(field(obj, "states", "$")?, "$.states")?;
    if states.is_empty() {
        return Err(Error::format("$.states", "state set is empty"));
    }
    let apath = format!("$.{anchor_key}");
    let anchor_sym = symbol_from_json(field(obj, anchor_key, "$")?, &apath)?;
    let anchor = lookup(&states, &anchor_sym, &apath)?;
    let ns = input.len();
    let mut delta = vec![usize::MAX; states.len() * ns];
    for (i, t) in array(field(obj, "delta", "$")?, "$.delta")?.iter().enumerate() {
        let path = format!("$.delta[{i}]");
        let items = array(t, &path)?;
        if items.len() != 3 {
            return Err(Error::format(path, "expected a [state, symbol, state] triple"));
        }
        let q = lookup(
            &states,
            &symbol_from_json(&items[0], &format!("{path}[0]"))?,
            &format!("{path}[0]"),
        )?;
        let a = lookup(
            &input,
            &symbol_from_json(&items[1], &format!("{path}[1]"))?,
            &format!("{path}[1]"),
        )?;
        let t = lookup(
            &states,
            &symbol_from_json(&items[2], &format!("{path}[2]"))?,
            &format!("{path}[2]"),
        )?;
        let slot = &mut delta[q * ns + a];
        if *slot != usize::MAX && *slot != t {
            return Err(Error::format(path, "conflicting transition"));
        }
        *slot = t;
    }
    if let Some(missing) = delta.iter().position(|&t| t == usize::MAX) {
        return Err(Error::format(
            "$.delta",
            format!(
                "no transition for state `{}` on `{}`",
                states.get(missing / ns),
                input.get(missing % ns)
            ),
        ));
    }
    let transparent = obj.get("transparent").and_then(Value::as_bool).unwrap_or(false);
    let (output, eps) = if transparent {
        (states.clone(), (0..states.len()).collect())
    } else {
        let output = alphabet_from_json(field(obj, "output_alphabet", "$")?, "$.output_alphabet")?;
        let mut eps = vec![usize::MAX; states.len()];
        for (i, p) in array(field(obj, "epsilon", "$")?, "$.epsilon")?.iter().enumerate() {
            let path = format!("$.epsilon[{i}]");
            let items = array(p, &path)?;
            if items.len() != 2 {
                return Err(Error::format(path, "expected a [state, output] pair"));
            }
            let q = lookup(&states, &symbol_from_json(&items[0], &path)?, &format!("{path}[0]"))?;
            let o = lookup(&output, &symbol_from_json(&items[1], &path)?, &format!("{path}[1]"))?;
            eps[q] = o;
        }
        if let Some(q) = eps.iter().position(|&o| o == usize::MAX) {
            return Err(Error::format(
                "$.epsilon",
                format!("no output for state `{}`", states.get(q)),
            ));
        }
        (output, eps)
    };
    Ok(Tables {
        input,
        states,
        anchor,
        output,
        delta,
        eps,
    })
}

fn lookup(a: &Alphabet, s: &Symbol, path: &str) -> Result<usize> {
    a.index_of(s)
        .ok_or_else(|| Error::format(path, format!("`{s}` is not declared")))
}

pub fn moore_from_json(v: &Value) -> Result<MooreMachine> {
    let t = tables_from_json(v, "initial")?;
    MooreMachine::from_tables(t.input, t.states, t.anchor, t.output, t.delta, t.eps)
}

pub fn reverse_from_json(v: &Value) -> Result<ReverseMooreMachine> {
    let t = tables_from_json(v, "final")?;
    ReverseMooreMachine::from_tables(t.input, t.states, t.anchor, t.output, t.delta, t.eps)
}

fn nfa_fields(a: &Nfa, obj: &mut Map<String, Value>) {
    let (q, s) = (a.states(), a.alphabet());
    obj.insert("input_alphabet".into(), alphabet_to_json(s));
    obj.insert("states".into(), alphabet_to_json(q));
    obj.insert(
        "initial".into(),
        Value::Array(a.initial().iter().map(|&i| symbol_to_json(q.get(i))).collect()),
    );
    obj.insert(
        "final".into(),
        Value::Array(a.finals().into_iter().map(|i| symbol_to_json(q.get(i))).collect()),
    );
    obj.insert(
        "delta".into(),
        Value::Array(
            a.triples()
                .into_iter()
                .map(|(x, c, y)| {
                    json!([
                        symbol_to_json(q.get(x)),
                        symbol_to_json(s.get(c)),
                        symbol_to_json(q.get(y))
                    ])
                })
                .collect(),
        ),
    );
}

pub fn nfa_to_json(a: &Nfa) -> Value {
    let mut obj = Map::new();
    obj.insert("kind".into(), json!("nfa"));
    nfa_fields(a, &mut obj);
    Value::Object(obj)
}

fn nfa_body(obj: &Map<String, Value>, alphabet: Option<Alphabet>) -> Result<Nfa> {
    let alphabet = match alphabet {
        Some(a) => a,
        None => alphabet_from_json(field(obj, "input_alphabet", "$")?, "$.input_alphabet")?,
    };
    let states = alphabet_from_json(field(obj, "states", "$")?, "$.states")?;
    let set = |key: &str| -> Result<Vec<usize>> {
        let path = format!("$.{key}");
        array(field(obj, key, "$")?, &path)?
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let p = format!("{path}[{i}]");
                lookup(&states, &symbol_from_json(x, &p)?, &p)
            })
            .collect()
    };
    let initial = set("initial")?;
    let finals = set("final")?;
    let mut triples = Vec::new();
    for (i, t) in array(field(obj, "delta", "$")?, "$.delta")?.iter().enumerate() {
        let path = format!("$.delta[{i}]");
        let items = array(t, &path)?;
        if items.len() != 3 {
            return Err(Error::format(path, "expected a [state, symbol, state] triple"));
        }
        let p0 = format!("{path}[0]");
        let p1 = format!("{path}[1]");
        let p2 = format!("{path}[2]");
        triples.push((
            lookup(&states, &symbol_from_json(&items[0], &p0)?, &p0)?,
            lookup(&alphabet, &symbol_from_json(&items[1], &p1)?, &p1)?,
            lookup(&states, &symbol_from_json(&items[2], &p2)?, &p2)?,
        ));
    }
    Nfa::from_indices(alphabet, states, initial, finals, triples)
}

pub fn nfa_from_json(v: &Value) -> Result<Nfa> {
    nfa_body(object(v, "$")?, None)
}

pub fn relation_to_json(r: &RelationAutomaton) -> Value {
    let mut obj = Map::new();
    obj.insert("kind".into(), json!("relation"));
    obj.insert("arity".into(), json!(r.arity()));
    obj.insert(
        "component_alphabets".into(),
        Value::Array(r.components().iter().map(alphabet_to_json).collect()),
    );
    obj.insert("padded".into(), json!(r.is_padded()));
    nfa_fields(r.base(), &mut obj);
    Value::Object(obj)
}

pub fn relation_from_json(v: &Value) -> Result<RelationAutomaton> {
    let obj = object(v, "$")?;
    let arity = uint(field(obj, "arity", "$")?, "$.arity")?;
    if arity == 0 {
        return Err(Error::format("$.arity", "arity must be positive"));
    }
    let comps = array(field(obj, "component_alphabets", "$")?, "$.component_alphabets")?
        .iter()
        .enumerate()
        .map(|(i, a)| alphabet_from_json(a, &format!("$.component_alphabets[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    if comps.len() != arity + 1 {
        return Err(Error::format(
            "$.component_alphabets",
            format!("expected {} alphabets for arity {arity}", arity + 1),
        ));
    }
    let padded = obj.get("padded").and_then(Value::as_bool).unwrap_or(true);
    let alphabet = match obj.get("input_alphabet") {
        Some(a) => alphabet_from_json(a, "$.input_alphabet")?,
        None if padded => Alphabet::padded_product(&comps),
        None => Alphabet::product(&comps),
    };
    let base = nfa_body(obj, Some(alphabet))?;
    RelationAutomaton::new(base, comps, padded).map_err(|e| Error::format("$", e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::{fixtures, graph_automaton, Mode};

    #[test]
    fn machines_round_trip() {
        let p = fixtures::parity();
        let files = [
            MachineFile::Moore(p.clone()),
            MachineFile::ReverseMoore(p.reverse()),
            MachineFile::Relation(graph_automaton(&p, Mode::Trunc).unwrap()),
        ];
        for f in files {
            let text = f.to_json().to_string();
            let back = MachineFile::parse(&text).unwrap();
            assert_eq!(back, f);
            assert_eq!(back.to_json().to_string(), text);
        }
    }

    #[test]
    fn missing_transition_is_reported() {
        let text = r#"{"kind":"moore","input_alphabet":["a"],"states":["p","q"],"initial":"p","transparent":true,"delta":[["p","a","q"]]}"#;
        let err = MachineFile::parse(text).unwrap_err();
        assert!(err.to_string().contains("$.delta"), "{err}");
    }
}

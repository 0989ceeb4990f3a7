//! Term file format:
//! `{"kind":"comp","arity":n,"alphabets":[...],"root":id,"nodes":{"0":{"op":...},...}}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use super::term::{Node, NodeId, NodeKind, Term};
use crate::error::{Error, Result};
use crate::json::{
    alphabet_from_json, alphabet_to_json, array, field, object, string, symbol_from_json, symbol_to_json, uint,
    word_from_json, word_to_json,
};
use crate::machines::format::{moore_from_json, moore_to_json, reverse_from_json, reverse_to_json};
use crate::words::CharFn;

pub fn term_to_json(t: &Term) -> Value {
    let mut nodes = Map::new();
    for (id, node) in t.nodes().iter().enumerate() {
        nodes.insert(id.to_string(), node_to_json(node));
    }
    json!({
        "kind": "comp",
        "arity": t.arity(),
        "alphabets": t.alphabets().iter().map(alphabet_to_json).collect::<Vec<_>>(),
        "root": t.root(),
        "nodes": Value::Object(nodes),
    })
}

/// Canonical compact text.
pub fn serialize(t: &Term) -> String {
    term_to_json(t).to_string()
}

pub fn serialize_pretty(t: &Term) -> String {
    serde_json::to_string_pretty(&term_to_json(t)).expect("values always serialize")
}

pub fn deserialize(text: &str) -> Result<Term> {
    term_from_json(&crate::json::parse(text)?)
}

fn node_to_json(node: &Node) -> Value {
    let op = node.kind().op();
    let mut obj = Map::new();
    obj.insert("op".into(), json!(op));
    match node {
        Node::Input(i) => {
            obj.insert("index".into(), json!(i));
        }
        Node::Const(w) => {
            obj.insert("word".into(), word_to_json(w));
        }
        Node::Tuplefy(c) => {
            obj.insert("children".into(), json!(c));
        }
        Node::Cw(t, c) => {
            obj.insert("children".into(), json!(c));
            obj.insert(
                "table".into(),
                Value::Array(
                    t.entries()
                        .map(|(k, v)| json!([Value::Array(k.iter().map(symbol_to_json).collect()), symbol_to_json(v)]))
                        .collect(),
                ),
            );
        }
        Node::Succ(a, c) => {
            obj.insert("symbol".into(), symbol_to_json(a));
            obj.insert("child".into(), json!(c));
        }
        Node::MooreTrunc(m, c) => {
            obj.insert("machine".into(), moore_to_json(m));
            obj.insert("child".into(), json!(c));
        }
        Node::RevMooreTrunc(m, c) => {
            obj.insert("machine".into(), reverse_to_json(m));
            obj.insert("child".into(), json!(c));
        }
        Node::AsnTrunc(n, c) | Node::RasnTrunc(n, c) => {
            obj.insert("n".into(), json!(n));
            obj.insert("child".into(), json!(c));
        }
        Node::Unpad(c) | Node::BitTrunc(c) | Node::RbitTrunc(c) | Node::Mask(c) => {
            obj.insert("child".into(), json!(c));
        }
    }
    Value::Object(obj)
}

fn node_from_json(v: &Value, path: &str) -> Result<Node> {
    let obj = object(v, path)?;
    let op = string(field(obj, "op", path)?, &format!("{path}.op"))?;
    let kind = NodeKind::from_op(op)
        .ok_or_else(|| Error::format(format!("{path}.op"), format!("unknown node kind `{op}`")))?;
    let child = || uint(field(obj, "child", path)?, &format!("{path}.child"));
    let children = || -> Result<Vec<NodeId>> {
        let p = format!("{path}.children");
        array(field(obj, "children", path)?, &p)?
            .iter()
            .enumerate()
            .map(|(i, x)| uint(x, &format!("{p}[{i}]")))
            .collect()
    };
    let n = || uint(field(obj, "n", path)?, &format!("{path}.n"));
    Ok(match kind {
        NodeKind::Input => Node::Input(uint(field(obj, "index", path)?, &format!("{path}.index"))?),
        NodeKind::Const => Node::Const(word_from_json(field(obj, "word", path)?, &format!("{path}.word"))?),
        NodeKind::Tuplefy => Node::Tuplefy(children()?),
        NodeKind::Cw => {
            let c = children()?;
            let p = format!("{path}.table");
            let mut entries = Vec::new();
            for (i, e) in array(field(obj, "table", path)?, &p)?.iter().enumerate() {
                let ep = format!("{p}[{i}]");
                let pair = array(e, &ep)?;
                if pair.len() != 2 {
                    return Err(Error::format(ep, "expected [arguments, image]"));
                }
                let args = array(&pair[0], &format!("{ep}[0]"))?
                    .iter()
                    .enumerate()
                    .map(|(j, s)| symbol_from_json(s, &format!("{ep}[0][{j}]")))
                    .collect::<Result<Vec<_>>>()?;
                entries.push((args, symbol_from_json(&pair[1], &format!("{ep}[1]"))?));
            }
            let table = CharFn::new(c.len(), entries).map_err(|e| Error::format(p, e.to_string()))?;
            Node::Cw(table, c)
        }
        NodeKind::Succ => Node::Succ(
            symbol_from_json(field(obj, "symbol", path)?, &format!("{path}.symbol"))?,
            child()?,
        ),
        NodeKind::Unpad => Node::Unpad(child()?),
        NodeKind::MooreTrunc => Node::MooreTrunc(
            Arc::new(moore_from_json(field(obj, "machine", path)?).map_err(|e| nest(e, path))?),
            child()?,
        ),
        NodeKind::RevMooreTrunc => Node::RevMooreTrunc(
            Arc::new(reverse_from_json(field(obj, "machine", path)?).map_err(|e| nest(e, path))?),
            child()?,
        ),
        NodeKind::AsnTrunc => Node::AsnTrunc(n()?, child()?),
        NodeKind::RasnTrunc => Node::RasnTrunc(n()?, child()?),
        NodeKind::BitTrunc => Node::BitTrunc(child()?),
        NodeKind::RbitTrunc => Node::RbitTrunc(child()?),
        NodeKind::Mask => Node::Mask(child()?),
    })
}

/// Prefixes the position of a nested machine document.
fn nest(e: Error, path: &str) -> Error {
    match e {
        Error::Format { path: p, message } => {
            Error::format(format!("{path}.machine{}", p.trim_start_matches('$')), message)
        }
        other => Error::format(format!("{path}.machine"), other.to_string()),
    }
}

pub fn term_from_json(v: &Value) -> Result<Term> {
    let obj = object(v, "$")?;
    let kind = string(field(obj, "kind", "$")?, "$.kind")?;
    if kind != "comp" {
        return Err(Error::format("$.kind", format!("expected `comp`, found `{kind}`")));
    }
    let arity = uint(field(obj, "arity", "$")?, "$.arity")?;
    let alphabets = array(field(obj, "alphabets", "$")?, "$.alphabets")?
        .iter()
        .enumerate()
        .map(|(i, a)| alphabet_from_json(a, &format!("$.alphabets[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    if alphabets.len() != arity {
        return Err(Error::format("$.alphabets", format!("expected {arity} alphabets")));
    }
    let root = uint(field(obj, "root", "$")?, "$.root")?;
    let mut by_id: BTreeMap<usize, Node> = BTreeMap::new();
    for (key, nv) in object(field(obj, "nodes", "$")?, "$.nodes")? {
        let path = format!("$.nodes.{key}");
        let id: usize = key
            .parse()
            .map_err(|_| Error::format(&path, "node ids must be non-negative integers"))?;
        by_id.insert(id, node_from_json(nv, &path)?);
    }
    if !by_id.contains_key(&root) {
        return Err(Error::format("$.root", format!("root {root} is not a node")));
    }
    for (id, node) in &by_id {
        for c in node.children() {
            if !by_id.contains_key(&c) {
                return Err(Error::format(format!("$.nodes.{id}"), format!("dangling child {c}")));
            }
        }
    }
    // topological order, smallest id first among ready nodes
    let ids: Vec<usize> = by_id.keys().copied().collect();
    let mut order: Vec<usize> = Vec::with_capacity(ids.len());
    let mut state: BTreeMap<usize, u8> = BTreeMap::new();
    for &start in &ids {
        if state.get(&start) == Some(&2) {
            continue;
        }
        let mut stack = vec![(start, false)];
        while let Some((id, done)) = stack.pop() {
            if done {
                state.insert(id, 2);
                order.push(id);
                continue;
            }
            match state.get(&id) {
                Some(2) => continue,
                Some(1) => return Err(Error::format(format!("$.nodes.{id}"), "cycle through this node")),
                _ => {}
            }
            state.insert(id, 1);
            stack.push((id, true));
            let mut cs = by_id[&id].children();
            cs.sort_unstable();
            cs.dedup();
            for c in cs.into_iter().rev() {
                match state.get(&c) {
                    Some(2) => {}
                    Some(1) => return Err(Error::format(format!("$.nodes.{c}"), "cycle through this node")),
                    _ => stack.push((c, false)),
                }
            }
        }
    }
    let mut remap: BTreeMap<usize, usize> = BTreeMap::new();
    for (new, &old) in order.iter().enumerate() {
        remap.insert(old, new);
    }
    let nodes: Vec<Node> = order.iter().map(|old| by_id[old].map_children(|c| remap[&c])).collect();
    Term::new(alphabets, nodes, remap[&root]).map_err(|e| Error::format("$", e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{Alphabet, Symbol, Word};

    #[test]
    fn unknown_node_kind_is_rejected() {
        let text =
            r#"{"kind":"comp","arity":1,"alphabets":[["a"]],"root":0,"nodes":{"0":{"op":"frobnicate","child":0}}}"#;
        let err = deserialize(text).unwrap_err();
        assert!(err.to_string().contains("unknown node kind"), "{err}");
    }

    #[test]
    fn cycles_are_rejected() {
        let text = r#"{"kind":"comp","arity":1,"alphabets":[["a"]],"root":0,"nodes":{"0":{"op":"unpad","child":1},"1":{"op":"unpad","child":0}}}"#;
        let err = deserialize(text).unwrap_err();
        assert!(err.to_string().contains("cycle"), "{err}");
    }

    #[test]
    fn round_trip_with_permutations() {
        let a = Alphabet::new([Symbol::perm([1, 0]), Symbol::perm([0, 1])]).unwrap();
        let mut b = super::super::TermBuilder::new(vec![a]);
        let x = b.input(0);
        let acc = b.asn_trunc(2, x);
        let t = b.finish(acc).unwrap();
        let text = serialize(&t);
        assert!(text.contains("[1,0]"));
        let back = deserialize(&text).unwrap();
        assert_eq!(serialize(&back), text);
        let w = Word(vec![Symbol::perm([1, 0])]);
        assert_eq!(back.eval(std::slice::from_ref(&w)).unwrap(), t.eval(&[w]).unwrap());
    }
}

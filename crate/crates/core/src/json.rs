//! Shared JSON helpers. Keys come out sorted (serde_json's default map),
//! which keeps every writer canonical.

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::words::{Alphabet, Symbol, Word};

/// Atoms are strings, permutations are arrays of integers, tuples are
/// arrays of symbols.
pub fn symbol_to_json(s: &Symbol) -> Value {
    match s {
        Symbol::Atom(t) => Value::String(t.to_string()),
        Symbol::Perm(p) => Value::Array(p.iter().map(|&x| Value::from(x)).collect()),
        Symbol::Tuple(c) => Value::Array(c.iter().map(symbol_to_json).collect()),
    }
}

pub fn symbol_from_json(v: &Value, path: &str) -> Result<Symbol> {
    match v {
        Value::String(t) if !t.is_empty() => Ok(Symbol::atom(t)),
        Value::String(_) => Err(Error::format(path, "empty symbol token")),
        Value::Array(items) if items.iter().all(Value::is_u64) => items
            .iter()
            .enumerate()
            .map(|(i, x)| {
                x.as_u64()
                    .and_then(|x| u32::try_from(x).ok())
                    .ok_or_else(|| Error::format(format!("{path}[{i}]"), "permutation image out of range"))
            })
            .collect::<Result<Vec<_>>>()
            .map(Symbol::perm),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .map(|(i, x)| symbol_from_json(x, &format!("{path}[{i}]")))
            .collect::<Result<Vec<_>>>()
            .map(Symbol::tuple),
        _ => Err(Error::format(path, "expected a symbol (string or array)")),
    }
}

pub fn alphabet_to_json(a: &Alphabet) -> Value {
    Value::Array(a.iter().map(symbol_to_json).collect())
}

pub fn alphabet_from_json(v: &Value, path: &str) -> Result<Alphabet> {
    let syms = array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| symbol_from_json(x, &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Alphabet::new(syms).map_err(|e| Error::format(path, e.to_string()))
}

pub fn word_to_json(w: &Word) -> Value {
    Value::Array(w.iter().map(symbol_to_json).collect())
}

pub fn word_from_json(v: &Value, path: &str) -> Result<Word> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| symbol_from_json(x, &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>>>()
        .map(Word)
}

pub fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::format(path, "expected an array"))
}

pub fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::format(path, "expected an object"))
}

pub fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::format(path, format!("missing field `{key}`")))
}

pub fn string<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| Error::format(path, "expected a string"))
}

pub fn uint(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| Error::format(path, "expected a non-negative integer"))
}

/// Parses text, mapping syntax errors to a line/column diagnostic.
pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text)
        .map_err(|e| Error::format(format!("line {} column {}", e.line(), e.column()), e.to_string()))
}

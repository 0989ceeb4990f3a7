use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{Alphabet, Symbol, Word};
use crate::error::{Error, Result};

/// A finite lookup table from symbol tuples to symbols, applied position by
/// position by `Cw`. The key set is the table's declared domain.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CharFn {
    arity: usize,
    table: Arc<BTreeMap<Vec<Symbol>, Symbol>>,
}

impl CharFn {
    pub fn new(arity: usize, entries: impl IntoIterator<Item = (Vec<Symbol>, Symbol)>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::ZeroArity);
        }
        let mut table = BTreeMap::new();
        for (k, v) in entries {
            if k.len() != arity {
                return Err(Error::LengthMismatch(format!(
                    "table key of width {} in a {arity}-ary map",
                    k.len()
                )));
            }
            if let Some(old) = table.insert(k.clone(), v.clone()) {
                if old != v {
                    return Err(Error::InvalidTerm(format!(
                        "table assigns two images to ({})",
                        show_key(&k)
                    )));
                }
            }
        }
        Ok(CharFn {
            arity,
            table: Arc::new(table),
        })
    }

    /// Tabulates `f` over the full product of the given domains.
    pub fn from_fn(domains: &[Alphabet], mut f: impl FnMut(&[Symbol]) -> Result<Symbol>) -> Result<Self> {
        let mut keys: Vec<Vec<Symbol>> = vec![Vec::new()];
        for d in domains {
            keys = keys
                .into_iter()
                .flat_map(|k| {
                    d.iter().map(move |s| {
                        let mut k = k.clone();
                        k.push(s.clone());
                        k
                    })
                })
                .collect();
        }
        let mut entries = Vec::with_capacity(keys.len());
        for k in keys {
            let v = f(&k)?;
            entries.push((k, v));
        }
        CharFn::new(domains.len(), entries)
    }

    pub fn unary(domain: &Alphabet, mut f: impl FnMut(&Symbol) -> Result<Symbol>) -> Result<Self> {
        CharFn::from_fn(std::slice::from_ref(domain), |k| f(&k[0]))
    }

    /// The identity on `domain`.
    pub fn identity(domain: &Alphabet) -> Self {
        CharFn::unary(domain, |s| Ok(s.clone())).expect("identity is well formed")
    }

    /// Constant map on the given product domain.
    pub fn constant(domains: &[Alphabet], value: Symbol) -> Result<Self> {
        CharFn::from_fn(domains, |_| Ok(value.clone()))
    }

    /// Pairs the arguments into a single tuple symbol.
    pub fn pairing(domains: &[Alphabet]) -> Result<Self> {
        CharFn::from_fn(domains, |k| Ok(Symbol::tuple(k.iter().cloned())))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<Symbol>, &Symbol)> {
        self.table.iter()
    }

    pub fn get(&self, args: &[Symbol]) -> Result<&Symbol> {
        self.table.get(args).ok_or_else(|| Error::OutsideDomain(show_key(args)))
    }

    /// Symbols that occur in argument position `j` of the domain.
    pub fn domain_component(&self, j: usize) -> BTreeSet<Symbol> {
        self.table.keys().map(|k| k[j].clone()).collect()
    }

    pub fn image(&self) -> BTreeSet<Symbol> {
        self.table.values().cloned().collect()
    }

    /// `Cw_f(w_0, …, w_{n-1})`.
    pub fn apply(&self, words: &[&Word]) -> Result<Word> {
        if words.len() != self.arity {
            return Err(Error::LengthMismatch(format!(
                "{}-ary map applied to {} words",
                self.arity,
                words.len()
            )));
        }
        let len = words[0].len();
        if let Some(w) = words.iter().find(|w| w.len() != len) {
            return Err(Error::LengthMismatch(format!(
                "character-wise map on words of lengths {len} and {}",
                w.len()
            )));
        }
        let mut key = Vec::with_capacity(self.arity);
        let mut out = Vec::with_capacity(len);
        for i in 0..len {
            key.clear();
            key.extend(words.iter().map(|w| w.0[i].clone()));
            out.push(self.get(&key)?.clone());
        }
        Ok(Word(out))
    }
}

fn show_key(k: &[Symbol]) -> String {
    k.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")
}

/// `Cw_f` as a free function.
pub fn cw_apply(table: &CharFn, words: &[&Word]) -> Result<Word> {
    table.apply(words)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_and_identity() {
        let a = Alphabet::from_tokens(["a", "b", "c", "d"]).unwrap();
        let pair = CharFn::pairing(&[a.clone(), a.clone()]).unwrap();
        let out = pair
            .apply(&[&Word::from_tokens(["a", "b"]), &Word::from_tokens(["c", "d"])])
            .unwrap();
        assert_eq!(out.to_string(), "(a|c),(b|d)");
        let w = Word::from_tokens(["d", "a"]);
        assert_eq!(CharFn::identity(&a).apply(&[&w]).unwrap(), w);
    }

    #[test]
    fn errors_surface() {
        let a = Alphabet::from_tokens(["a"]).unwrap();
        let id = CharFn::identity(&a);
        assert!(matches!(
            id.apply(&[&Word::from_tokens(["z"])]),
            Err(Error::OutsideDomain(_))
        ));
        let pair = CharFn::pairing(&[a.clone(), a]).unwrap();
        assert!(matches!(
            pair.apply(&[&Word::from_tokens(["a"]), &Word::empty()]),
            Err(Error::LengthMismatch(_))
        ));
    }
}

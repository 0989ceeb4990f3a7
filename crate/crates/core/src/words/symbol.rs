use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};

/// The reserved padding token.
pub const PAD: &str = "#";

/// A character of some finite alphabet.
///
/// Atoms are plain tokens, tuples are characters of product alphabets
/// (components may be padding), and permutations are elements of a
/// symmetric group written as their image arrays.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Atom(Arc<str>),
    Tuple(Arc<[Symbol]>),
    Perm(Arc<[u32]>),
}

impl Symbol {
    pub fn atom(token: impl AsRef<str>) -> Self {
        Symbol::Atom(Arc::from(token.as_ref()))
    }

    pub fn tuple(components: impl IntoIterator<Item = Symbol>) -> Self {
        Symbol::Tuple(components.into_iter().collect())
    }

    pub fn perm(images: impl IntoIterator<Item = u32>) -> Self {
        Symbol::Perm(images.into_iter().collect())
    }

    pub fn pad() -> Self {
        static PAD_SYMBOL: OnceLock<Symbol> = OnceLock::new();
        PAD_SYMBOL.get_or_init(|| Symbol::atom(PAD)).clone()
    }

    /// True for `#` and for tuples whose components are all padding.
    pub fn is_pad(&self) -> bool {
        match self {
            Symbol::Atom(t) => &**t == PAD,
            Symbol::Tuple(c) => c.iter().all(Symbol::is_pad),
            Symbol::Perm(_) => false,
        }
    }

    pub fn is_reserved(&self) -> bool {
        matches!(self, Symbol::Atom(t) if &**t == PAD)
    }

    pub fn components(&self) -> Option<&[Symbol]> {
        match self {
            Symbol::Tuple(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_perm(&self) -> Option<&[u32]> {
        match self {
            Symbol::Perm(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Symbol::Atom(t) => Some(t),
            _ => None,
        }
    }

    /// Parses the textual form produced by `Display`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Err(Error::format("symbol", "empty symbol token"));
        }
        if let Some(inner) = strip_delims(text, '(', ')') {
            let parts = split_top_level(inner, '|');
            let comps = parts.into_iter().map(Symbol::parse).collect::<Result<Vec<_>>>()?;
            return Ok(Symbol::tuple(comps));
        }
        if let Some(inner) = strip_delims(text, '[', ']') {
            let images = split_top_level(inner, ',')
                .into_iter()
                .map(|p| {
                    p.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::format("symbol", format!("bad permutation image `{p}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(Symbol::perm(images));
        }
        Ok(Symbol::atom(text))
    }
}

fn strip_delims(text: &str, open: char, close: char) -> Option<&str> {
    if text.starts_with(open) && text.ends_with(close) && text.len() >= 2 {
        Some(&text[open.len_utf8()..text.len() - close.len_utf8()])
    } else {
        None
    }
}

/// Splits on `sep` outside of any bracket pair.
pub(crate) fn split_top_level(text: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push(&text[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Atom(t) => f.write_str(t),
            Symbol::Tuple(c) => {
                f.write_str("(")?;
                for (i, s) in c.iter().enumerate() {
                    if i > 0 {
                        f.write_str("|")?;
                    }
                    write!(f, "{s}")?;
                }
                f.write_str(")")
            }
            Symbol::Perm(p) => {
                f.write_str("[")?;
                for (i, x) in p.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("]")
            }
        }
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::atom(s)
    }
}

/// An ordered finite set of symbols. The construction order is the order
/// used whenever a "least" or "smallest" element is required.
#[derive(Clone)]
pub struct Alphabet {
    symbols: Arc<[Symbol]>,
    index: Arc<HashMap<Symbol, usize>>,
}

impl Alphabet {
    pub fn new(symbols: impl IntoIterator<Item = Symbol>) -> Result<Self> {
        let symbols: Vec<Symbol> = symbols.into_iter().collect();
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::DuplicateSymbol(s.clone()));
            }
        }
        Ok(Alphabet {
            symbols: symbols.into(),
            index: Arc::new(index),
        })
    }

    /// An alphabet supplied by a user as some Σ or Γ: `#` may not occur.
    pub fn user(symbols: impl IntoIterator<Item = Symbol>) -> Result<Self> {
        let a = Alphabet::new(symbols)?;
        if let Some(s) = a.iter().find(|s| s.is_reserved()) {
            return Err(Error::ReservedPad(s.clone()));
        }
        Ok(a)
    }

    pub fn from_tokens<S: AsRef<str>>(tokens: impl IntoIterator<Item = S>) -> Result<Self> {
        Alphabet::new(tokens.into_iter().map(|t| Symbol::atom(t.as_ref())))
    }

    pub fn empty() -> Self {
        Alphabet::new(std::iter::empty()).expect("empty alphabet")
    }

    /// Σ ∪ {#}, with `#` ordered last. Unchanged when `#` is already present.
    pub fn with_pad(&self) -> Self {
        if self.contains(&Symbol::pad()) {
            return self.clone();
        }
        Alphabet::new(self.iter().cloned().chain(std::iter::once(Symbol::pad()))).expect("pad is fresh")
    }

    /// Full product of the given alphabets, ordered lexicographically by
    /// component.
    pub fn product(parts: &[Alphabet]) -> Self {
        let mut out: Vec<Vec<Symbol>> = vec![Vec::new()];
        for part in parts {
            let mut next = Vec::with_capacity(out.len() * part.len());
            for prefix in &out {
                for s in part.iter() {
                    let mut v = prefix.clone();
                    v.push(s.clone());
                    next.push(v);
                }
            }
            out = next;
        }
        Alphabet::new(out.into_iter().map(Symbol::tuple)).expect("product of sets has no duplicates")
    }

    /// Product of `(Σ_j ∪ {#})`.
    pub fn padded_product(parts: &[Alphabet]) -> Self {
        let padded: Vec<Alphabet> = parts.iter().map(Alphabet::with_pad).collect();
        Alphabet::product(&padded)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn get(&self, i: usize) -> &Symbol {
        &self.symbols[i]
    }

    pub fn index_of(&self, s: &Symbol) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.index.contains_key(s)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Symbol> {
        self.symbols.iter()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub(crate) fn require(&self, s: &Symbol, context: &str) -> Result<usize> {
        self.index_of(s).ok_or_else(|| Error::NotInAlphabet {
            symbol: s.clone(),
            context: context.to_string(),
        })
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
    }
}

impl Eq for Alphabet {}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.symbols.iter()).finish()
    }
}

impl<'a> IntoIterator for &'a Alphabet {
    type Item = &'a Symbol;
    type IntoIter = std::slice::Iter<'a, Symbol>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

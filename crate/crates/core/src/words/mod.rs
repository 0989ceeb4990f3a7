//! Words over finite alphabets and the primitive word operations.

mod charfn;
mod symbol;

use std::fmt;

pub use charfn::{cw_apply, CharFn};
pub use symbol::{Alphabet, Symbol, PAD};

pub(crate) use symbol::split_top_level;

use crate::error::{Error, Result};

/// A finite word. Membership in an alphabet is checked by whichever
/// operation consumes the word against an alphabet.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(pub Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(chars: Vec<Symbol>) -> Self {
        Word(chars)
    }

    pub fn from_tokens<S: AsRef<str>>(tokens: impl IntoIterator<Item = S>) -> Self {
        Word(tokens.into_iter().map(|t| Symbol::atom(t.as_ref())).collect())
    }

    /// Parses the CLI form: comma separated symbols, empty text is ε.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Ok(Word::empty());
        }
        split_top_level(text, ',')
            .into_iter()
            .map(Symbol::parse)
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn chars(&self) -> &[Symbol] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Symbol> {
        self.0.iter()
    }

    pub fn check_over(&self, alphabet: &Alphabet, context: &str) -> Result<()> {
        for s in &self.0 {
            alphabet.require(s, context)?;
        }
        Ok(())
    }

    /// Component `j` of every character of a tuple word.
    pub fn project(&self, j: usize) -> Result<Word> {
        self.0
            .iter()
            .map(|s| {
                s.components()
                    .and_then(|c| c.get(j))
                    .cloned()
                    .ok_or_else(|| Error::LengthMismatch(format!("`{s}` has no component {j}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromIterator<Symbol> for Word {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

/// Merges words in parallel, padding the shorter ones with `#`.
pub fn tuplefy(words: &[Word]) -> Result<Word> {
    if words.is_empty() {
        return Err(Error::ZeroArity);
    }
    let len = words.iter().map(Word::len).max().unwrap_or(0);
    Ok((0..len)
        .map(|i| Symbol::tuple(words.iter().map(|w| w.0.get(i).cloned().unwrap_or_else(Symbol::pad))))
        .collect())
}

/// Strips the maximal trailing block of padding characters.
pub fn unpad(w: &Word) -> Word {
    let keep = w.0.iter().rposition(|s| !s.is_pad()).map_or(0, |i| i + 1);
    Word(w.0[..keep].to_vec())
}

/// `S_a`: appends `a`.
pub fn succ(w: &Word, a: &Symbol) -> Word {
    let mut v = w.0.clone();
    v.push(a.clone());
    Word(v)
}

/// `S_a` with a membership check of `a`.
pub fn succ_checked(w: &Word, a: &Symbol, alphabet: &Alphabet) -> Result<Word> {
    alphabet.require(a, "successor")?;
    Ok(succ(w, a))
}

pub fn trunc(w: &Word) -> Word {
    let n = w.len().saturating_sub(1);
    Word(w.0[..n].to_vec())
}

pub fn rest(w: &Word) -> Word {
    Word(w.0.iter().skip(1).cloned().collect())
}

pub fn rev(w: &Word) -> Word {
    Word(w.0.iter().rev().cloned().collect())
}

/// `0^|w| 1`.
pub fn mask(w: &Word) -> Word {
    let zero = Symbol::atom("0");
    let mut v = vec![zero; w.len()];
    v.push(Symbol::atom("1"));
    Word(v)
}

/// The `{0, 1}` alphabet used by masks and bits.
pub fn binary_alphabet() -> Alphabet {
    Alphabet::from_tokens(["0", "1"]).expect("distinct")
}

/// All words of length at most `maxlen`, shortest first then
/// lexicographically under the alphabet order.
pub fn words_up_to(alphabet: &Alphabet, maxlen: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..maxlen {
        let mut next = Vec::with_capacity(layer.len() * alphabet.len());
        for w in &layer {
            for s in alphabet.iter() {
                next.push(succ(w, s));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// All words of length exactly `len`.
pub fn words_of_len(alphabet: &Alphabet, len: usize) -> Vec<Word> {
    let mut layer = vec![Word::empty()];
    for _ in 0..len {
        layer = layer
            .iter()
            .flat_map(|w| alphabet.iter().map(move |s| succ(w, s)))
            .collect();
    }
    layer
}

/// All tuples of words, one per alphabet, each of length at most `maxlen`.
/// Ordered by the longest component, then by total length, then
/// lexicographically component by component.
pub fn tuples_up_to(alphabets: &[Alphabet], maxlen: usize) -> Vec<Vec<Word>> {
    let per: Vec<Vec<Word>> = alphabets.iter().map(|a| words_up_to(a, maxlen)).collect();
    let mut out: Vec<Vec<Word>> = vec![Vec::new()];
    for ws in &per {
        let mut next = Vec::with_capacity(out.len() * ws.len());
        for prefix in &out {
            for w in ws {
                let mut t = prefix.clone();
                t.push(w.clone());
                next.push(t);
            }
        }
        out = next;
    }
    // stable sort keeps the lexicographic order inside each length class
    out.sort_by_key(|t| {
        (
            t.iter().map(Word::len).max().unwrap_or(0),
            t.iter().map(Word::len).sum::<usize>(),
        )
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(text: &str) -> Word {
        Word::from_tokens(text.chars().map(|c| c.to_string()))
    }

    #[test]
    fn tuplefy_example() {
        let t = tuplefy(&[w("abba"), w("ab"), w(""), w("bbb"), w("aaaaa")]).unwrap();
        let shown: Vec<String> = t.iter().map(|s| s.to_string()).collect();
        assert_eq!(
            shown,
            [
                "(a|a|#|b|a)",
                "(b|b|#|b|a)",
                "(b|#|#|b|a)",
                "(a|#|#|#|a)",
                "(#|#|#|#|a)"
            ]
        );
        assert!(tuplefy(&[]).is_err());
        assert!(tuplefy(&[w(""), w("")]).unwrap().is_empty());
    }

    #[test]
    fn unpad_only_trailing() {
        assert_eq!(unpad(&w("ab##")), w("ab"));
        assert_eq!(unpad(&w("####")), w(""));
        assert_eq!(unpad(&w("a#b#")), w("a#b"));
    }

    #[test]
    fn truncation_family() {
        assert_eq!(trunc(&w("abc")), w("ab"));
        assert_eq!(rest(&w("abc")), w("bc"));
        assert_eq!(rev(&w("abc")), w("cba"));
        assert_eq!(trunc(&w("")), w(""));
        assert_eq!(rest(&w("")), w(""));
        assert_eq!(mask(&w("abcde")), w("000001"));
        assert_eq!(mask(&w("")), w("1"));
    }

    #[test]
    fn parse_words() {
        assert_eq!(Word::parse("").unwrap(), Word::empty());
        let t = Word::parse("(a|#),b").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.to_string(), "(a|#),b");
    }

    #[test]
    fn enumeration_order() {
        let a = Alphabet::from_tokens(["x", "y"]).unwrap();
        let ws = words_up_to(&a, 2);
        let shown: Vec<String> = ws.iter().map(|w| w.to_string()).collect();
        assert_eq!(shown, ["", "x", "y", "x,x", "x,y", "y,x", "y,y"]);
        assert_eq!(tuples_up_to(&[a.clone(), a], 1).len(), 9);
    }
}

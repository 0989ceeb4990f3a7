use proptest::prelude::*;
use regfn::words::{cw_apply, mask, rest, rev, succ, trunc, tuplefy, unpad, Alphabet, CharFn, Symbol, Word};

fn w(s: &str) -> Word {
    Word::from_tokens(s.chars().map(|c| c.to_string()))
}

fn word_over(letters: &'static [&'static str], max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(prop::sample::select(letters), 0..=max).prop_map(Word::from_tokens)
}

#[test]
fn tuplefy_columns() {
    let out = tuplefy(&[w("abba"), w("ab"), Word::empty(), w("bbb"), w("aaaaa")]).unwrap();
    let cols = ["aa#ba", "bb#ba", "b##ba", "a###a", "####a"];
    let expected: Word = cols
        .iter()
        .map(|c| Symbol::tuple(c.chars().map(|x| Symbol::atom(x.to_string()))))
        .collect();
    assert_eq!(out, expected);
    assert_eq!(tuplefy(&[Word::empty(), Word::empty()]).unwrap(), Word::empty());
    let eq = tuplefy(&[w("ab"), w("ab")]).unwrap();
    assert!(eq.iter().all(|c| c.components().unwrap().iter().all(|s| !s.is_pad())));
}

#[test]
fn unpad_strips_only_the_trailing_block() {
    assert_eq!(unpad(&w("ab##")), w("ab"));
    assert_eq!(unpad(&w("####")), Word::empty());
    assert_eq!(unpad(&w("a#b#")), w("a#b"));
}

#[test]
fn small_operators() {
    assert_eq!(succ(&w("ab"), &Symbol::atom("b")), w("abb"));
    assert_eq!(succ(&Word::empty(), &Symbol::atom("a")), w("a"));
    assert_eq!(succ(&succ(&w("ab"), &Symbol::pad()), &Symbol::pad()), w("ab##"));
    assert_eq!(trunc(&w("abc")), w("ab"));
    assert_eq!(rest(&w("abc")), w("bc"));
    assert_eq!(rev(&w("abc")), w("cba"));
    assert_eq!(trunc(&Word::empty()), Word::empty());
    assert_eq!(mask(&w("abcde")), w("000001"));
    assert_eq!(mask(&Word::empty()), w("1"));
    assert_eq!(mask(&w("ab")), w("001"));
}

#[test]
fn pairing_map() {
    let sigma = Alphabet::from_tokens(["a", "b", "c", "d"]).unwrap();
    let pair = CharFn::pairing(&[sigma.clone(), sigma]).unwrap();
    let out = cw_apply(&pair, &[&w("ab"), &w("cd")]).unwrap();
    assert_eq!(out.to_string(), "(a|c),(b|d)");
    assert!(cw_apply(&pair, &[&w("ab"), &w("c")]).is_err());
}

#[test]
fn word_text_round_trip() {
    let text = "a,(b|#),[1,0,2]";
    assert_eq!(Word::parse(text).unwrap().to_string(), text);
}

proptest! {
    #[test]
    fn rev_is_an_involution(x in word_over(&["a", "b", "c"], 8)) {
        prop_assert_eq!(rev(&rev(&x)), x);
    }

    #[test]
    fn tuplefy_projects_back(x in word_over(&["a", "b"], 6), y in word_over(&["a", "b"], 6)) {
        let t = tuplefy(&[x.clone(), y.clone()]).unwrap();
        prop_assert_eq!(t.len(), x.len().max(y.len()));
        prop_assert_eq!(unpad(&t.project(0).unwrap()), x);
        prop_assert_eq!(unpad(&t.project(1).unwrap()), y);
    }

    #[test]
    fn succ_pad_then_unpad_cancels(x in word_over(&["a", "b"], 6), k in 0usize..4) {
        let mut p = x.clone();
        for _ in 0..k {
            p = succ(&p, &Symbol::pad());
        }
        prop_assert_eq!(unpad(&p), x);
    }

    #[test]
    fn mask_marks_the_end(x in word_over(&["a", "b"], 8)) {
        let m = mask(&x);
        prop_assert_eq!(m.len(), x.len() + 1);
        prop_assert_eq!(m.iter().filter(|s| s.as_atom() == Some("1")).count(), 1);
        prop_assert_eq!(m.0.last().and_then(|s| s.as_atom()), Some("1"));
    }
}

use proptest::prelude::*;
use regfn::compo::random::{
    append_suffix, empty_relation, identity_relation, input_letters, prefix_until, random_functional_relation,
    random_length_preserving_relation, random_nfa, xor_relation, Caps,
};
use regfn::compo::{equivalent_bruteforce, MooreFn};
use regfn::detharvest::{
    automatize, check_harvest, determinize, detharvest_decompose, harvester, length_bound, length_normalize,
    lift_to_general, projected_runs,
};
use regfn::machines::{fixtures, graph_automaton, Mode};
use regfn::words::{succ, words_up_to, Symbol, Word};

fn w(s: &str) -> Word {
    Word::from_tokens(s.chars().map(|c| c.to_string()))
}

fn pads(x: &Word, k: usize) -> Word {
    (0..k).fold(x.clone(), |acc, _| succ(&acc, &Symbol::pad()))
}

#[test]
fn automatize_identity_runs() {
    let rel = identity_relation(&input_letters(2)).unwrap();
    let (b, proj) = automatize(&rel).unwrap();
    let runs = projected_runs(&b, &proj, &w("ab")).unwrap();
    assert!(!runs.is_empty());
    assert!(runs.iter().all(|r| *r == w("ab")));
    let empty = projected_runs(&b, &proj, &Word::empty()).unwrap();
    assert!(!empty.is_empty() && empty.iter().all(Word::is_empty));
}

#[test]
fn automatize_parity_runs() {
    let rel = graph_automaton(&fixtures::parity(), Mode::Trunc).unwrap();
    let (b, proj) = automatize(&rel).unwrap();
    let runs = projected_runs(&b, &proj, &w("011")).unwrap();
    assert!(!runs.is_empty());
    assert!(runs.iter().all(|r| *r == w("eeo")));
}

#[test]
fn two_pass_examples() {
    let rel = identity_relation(&input_letters(2)).unwrap();
    let t = detharvest_decompose(&rel).unwrap().term;
    assert!(equivalent_bruteforce(&t, &rel, 6, 1).unwrap().is_equal());
    assert_eq!(t.eval(&[Word::empty()]).unwrap(), Word::empty());
    let p = fixtures::parity();
    let t = detharvest_decompose(&graph_automaton(&p, Mode::Trunc).unwrap())
        .unwrap()
        .term;
    assert_eq!(t.eval(&[w("011")]).unwrap(), w("eeo"));
    assert!(equivalent_bruteforce(&t, &MooreFn(&p, Mode::Trunc), 6, 1)
        .unwrap()
        .is_equal());
}

#[test]
fn bound_examples() {
    let sigma = input_letters(2);
    for rel in [
        identity_relation(&sigma).unwrap(),
        empty_relation(&sigma).unwrap(),
        prefix_until(&sigma, &Symbol::atom("b")).unwrap(),
    ] {
        let c = length_bound(&rel);
        for x in words_up_to(&sigma, 5) {
            let out = rel.unique_output(std::slice::from_ref(&x)).unwrap();
            assert!(out.len() <= c + x.len());
        }
    }
}

#[test]
fn normalization_examples() {
    let sigma = input_letters(2);
    let id = identity_relation(&sigma).unwrap();
    let c = length_bound(&id);
    let g = length_normalize(&id, c).unwrap();
    for x in words_up_to(&sigma, 4) {
        assert_eq!(g.unique_output(&[pads(&x, c)]).unwrap(), pads(&x, c));
    }
    let sfx = append_suffix(&sigma, &w("ab")).unwrap();
    let c = length_bound(&sfx);
    let g = length_normalize(&sfx, c).unwrap();
    assert_eq!(g.unique_output(&[pads(&w("b"), c)]).unwrap(), pads(&w("bab"), c - 2));
    let e = empty_relation(&sigma).unwrap();
    let c = length_bound(&e);
    let g = length_normalize(&e, c).unwrap();
    assert_eq!(
        g.unique_output(&[pads(&Word::empty(), c)]).unwrap(),
        pads(&Word::empty(), c)
    );
}

#[test]
fn lifted_binary_map() {
    let rel = xor_relation().unwrap();
    let c = length_bound(&rel);
    let g = length_normalize(&rel, c).unwrap();
    let t = lift_to_general(&detharvest_decompose(&g).unwrap().term, c, rel.input_alphabets()).unwrap();
    assert!(equivalent_bruteforce(&t, &rel, 3, 2).unwrap().is_equal());
    assert_eq!(t.eval(&[Word::empty(), Word::empty()]).unwrap(), Word::empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn determinization_preserves_acceptance(seed in 0u64..10_000, n in 1usize..6, k in 1usize..4) {
        let a = random_nfa(n, k, seed);
        let d = determinize(&a);
        for x in words_up_to(a.alphabet(), 5) {
            prop_assert_eq!(d.accepts(&x).unwrap(), a.accepts(&x).unwrap());
        }
    }

    #[test]
    fn harvests_extend(seed in 0u64..10_000, n in 1usize..6, k in 1usize..4) {
        let a = random_nfa(n, k, seed);
        let d = determinize(&a);
        let h = harvester(&a, &d);
        for x in words_up_to(a.alphabet(), 5) {
            if a.accepts(&x).unwrap() {
                prop_assert!(check_harvest(&a, &d, &h, &x).unwrap());
            }
        }
    }

    #[test]
    fn two_pass_matches_relation(seed in 0u64..10_000) {
        let rel = random_length_preserving_relation(seed, Caps::default()).unwrap();
        let t = detharvest_decompose(&rel).unwrap().term;
        prop_assert!(equivalent_bruteforce(&t, &rel, 4, 1).unwrap().is_equal());
    }

    #[test]
    fn normalized_lift_matches_relation(seed in 0u64..10_000) {
        let rel = random_functional_relation(seed, Caps::default()).unwrap();
        let c = length_bound(&rel);
        let g = length_normalize(&rel, c).unwrap();
        let t = lift_to_general(&detharvest_decompose(&g).unwrap().term, c, rel.input_alphabets()).unwrap();
        prop_assert!(equivalent_bruteforce(&t, &rel, 3, 1).unwrap().is_equal());
    }
}

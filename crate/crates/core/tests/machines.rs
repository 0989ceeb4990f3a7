use proptest::prelude::*;
use regfn::compo::random::{random_machine, random_nfa};
use regfn::machines::{
    classify_actions, fixtures, graph_automaton, is_functional_bruteforce, ActionKind, FunctionalReport, MachineFile,
    Mode, MooreMachine, Nfa, RelationAutomaton, ReverseMooreMachine,
};
use regfn::words::{rest, rev, tuplefy, words_up_to, Alphabet, Symbol, Word};

fn w(s: &str) -> Word {
    Word::from_tokens(s.chars().map(|c| c.to_string()))
}

/// Direct simulation over the symbol tables.
fn simulate(m: &MooreMachine, x: &Word) -> Word {
    let mut q = m.start().clone();
    let mut out = vec![q.clone()];
    for a in x.iter() {
        q = m.step_symbol(&q, a).unwrap().clone();
        out.push(q.clone());
    }
    Word(out)
}

#[test]
fn parity_runs() {
    let p = fixtures::parity();
    assert_eq!(p.run(&w("011")).unwrap(), w("eeoe"));
    assert_eq!(p.run_trunc(&w("011")).unwrap(), w("eeo"));
    assert_eq!(p.run_rest(&w("011")).unwrap(), w("eoe"));
    assert_eq!(p.run(&Word::empty()).unwrap(), w("e"));
}

#[test]
fn last_trunc() {
    assert_eq!(fixtures::last().run_trunc(&w("ab")).unwrap(), w("AA"));
}

#[test]
fn reverse_runs() {
    let sigma = Alphabet::from_tokens(["a"]).unwrap();
    let q = Alphabet::from_tokens(["f"]).unwrap();
    let r = ReverseMooreMachine::transparent_from_tables(sigma, q, 0, vec![0]).unwrap();
    assert_eq!(r.run(&w("aa")).unwrap(), w("fff"));
    assert_eq!(r.run(&Word::empty()).unwrap(), w("f"));
    let rp = fixtures::parity().reverse();
    for x in words_up_to(fixtures::parity().input(), 6) {
        let expected = rev(&fixtures::parity().run_rest(&rev(&x)).unwrap());
        assert_eq!(rp.run_trunc(&x).unwrap(), expected);
    }
    assert_eq!(rp.reverse(), fixtures::parity());
}

#[test]
fn graph_automata() {
    let p = fixtures::parity();
    let g = graph_automaton(&p, Mode::Trunc).unwrap();
    assert!(g.accepts(&[w("011")], &w("eeo")).unwrap());
    assert!(!g.accepts(&[w("011")], &w("eee")).unwrap());
    assert!(g.accepts(&[Word::empty()], &Word::empty()).unwrap());
    for x in words_up_to(p.input(), 4) {
        for mode in [Mode::Trunc, Mode::Rest, Mode::Full] {
            let g = graph_automaton(&p, mode).unwrap();
            let expected = match mode {
                Mode::Trunc => p.run_trunc(&x).unwrap(),
                Mode::Rest => p.run_rest(&x).unwrap(),
                Mode::Full => p.run(&x).unwrap(),
            };
            assert_eq!(g.unique_output(&[x.clone()]).unwrap(), expected);
        }
    }
    let l = graph_automaton(&fixtures::last(), Mode::Rest).unwrap();
    assert!(l.accepts(&[w("ab")], &w("AB")).unwrap());
}

#[test]
fn nfa_acceptance() {
    let sigma = Alphabet::from_tokens(["a"]).unwrap();
    let q = Alphabet::from_tokens(["p", "q"]).unwrap();
    let (p_, q_, a) = (Symbol::atom("p"), Symbol::atom("q"), Symbol::atom("a"));
    let triples = [
        (p_.clone(), a.clone(), p_.clone()),
        (p_.clone(), a.clone(), q_.clone()),
        (q_.clone(), a, q_.clone()),
    ];
    let nfa = Nfa::from_symbols(sigma.clone(), q.clone(), &[p_.clone()], &[q_.clone()], &triples).unwrap();
    assert!(nfa.accepts(&w("aa")).unwrap());
    assert!(!nfa.accepts(&Word::empty()).unwrap());
    let both = Nfa::from_symbols(sigma, q, &[p_.clone()], &[p_], &[]).unwrap();
    assert!(both.accepts(&Word::empty()).unwrap());
}

#[test]
fn classification() {
    let p = classify_actions(&fixtures::parity());
    assert_eq!(p.actions[0].1, ActionKind::Identity);
    assert_eq!(p.actions[1].1, ActionKind::Permutation);
    assert!(p.is_permutation());
    assert!(classify_actions(&fixtures::last()).is_reset());
    let sigma = Alphabet::from_tokens(["a"]).unwrap();
    let q = Alphabet::from_tokens(["0", "1", "2"]).unwrap();
    let squash = MooreMachine::transparent_from_tables(sigma, q, 0, vec![0, 0, 1]).unwrap();
    assert_eq!(classify_actions(&squash).actions[0].1, ActionKind::Other);
    assert!(!classify_actions(&squash).is_permutation_reset());
}

#[test]
fn functionality_reports() {
    let g = graph_automaton(&fixtures::parity(), Mode::Trunc).unwrap();
    assert_eq!(
        is_functional_bruteforce(&g, 4).unwrap(),
        FunctionalReport::FunctionalUpTo(4)
    );

    // accepts (w, 0^|w|) and (w, 1^|w|)
    let bits = Alphabet::from_tokens(["0", "1"]).unwrap();
    let chars = Alphabet::padded_product(&[bits.clone(), bits.clone()]);
    let mut triples = Vec::new();
    for (i, c) in chars.iter().enumerate() {
        let comps = c.components().unwrap();
        if comps.iter().any(Symbol::is_pad) {
            continue;
        }
        let t = if comps[1].as_atom() == Some("0") { 1 } else { 2 };
        triples.push((0, i, t));
        triples.push((t, i, t));
    }
    let ambiguous = Nfa::from_indices(
        chars.clone(),
        Alphabet::from_tokens(["s", "z", "o"]).unwrap(),
        [0],
        [0, 1, 2],
        triples,
    )
    .unwrap();
    let rel = RelationAutomaton::new(ambiguous, vec![bits.clone(), bits.clone()], true).unwrap();
    assert!(matches!(
        is_functional_bruteforce(&rel, 2).unwrap(),
        FunctionalReport::NotUnique { .. }
    ));

    let nothing = Nfa::from_indices(chars, Alphabet::from_tokens(["s"]).unwrap(), [0], [], []).unwrap();
    let rel = RelationAutomaton::new(nothing, vec![bits.clone(), bits], true).unwrap();
    assert_eq!(
        is_functional_bruteforce(&rel, 2).unwrap(),
        FunctionalReport::NotTotal {
            input: vec![Word::empty()]
        }
    );
}

#[test]
fn machine_files_round_trip() {
    for f in [
        MachineFile::Moore(fixtures::parity()),
        MachineFile::ReverseMoore(fixtures::last().reverse()),
        MachineFile::Nfa(random_nfa(3, 2, 4)),
        MachineFile::Relation(graph_automaton(&fixtures::last(), Mode::Full).unwrap()),
    ] {
        let text = f.to_json().to_string();
        assert_eq!(MachineFile::parse(&text).unwrap(), f);
    }
    assert!(MachineFile::parse(r#"{"kind":"moore","states":[]}"#).is_err());
}

/// The acceptor of `m` with the given accepting states.
fn as_dfa(m: &MooreMachine, accepting: impl Fn(usize) -> bool) -> Nfa {
    let k = m.input().len();
    let triples: Vec<(usize, usize, usize)> = m
        .delta_table()
        .iter()
        .enumerate()
        .map(|(i, &t)| (i / k, i % k, t))
        .collect();
    let finals: Vec<usize> = (0..m.num_states()).filter(|&q| accepting(q)).collect();
    Nfa::from_indices(
        m.input().clone(),
        m.states().clone(),
        [m.start_index()],
        finals,
        triples,
    )
    .unwrap()
}

#[test]
fn dfa_minimization() {
    // two copies of parity
    let sigma = Alphabet::from_tokens(["0", "1"]).unwrap();
    let q = Alphabet::from_tokens(["e", "o", "e2", "o2"]).unwrap();
    let m = MooreMachine::transparent_from_tables(sigma, q, 0, vec![2, 1, 1, 2, 0, 3, 3, 0]).unwrap();
    let d = as_dfa(&m, |q| q % 2 == 1);
    let min = d.minimize_dfa().unwrap();
    assert_eq!(min.num_states(), 2);
    assert_eq!(min.states().get(0), &Symbol::atom("e"));
    for x in words_up_to(d.alphabet(), 6) {
        assert_eq!(min.accepts(&x).unwrap(), d.accepts(&x).unwrap());
    }
    let two_starts = Nfa::from_indices(d.alphabet().clone(), d.states().clone(), [0, 1], [], []).unwrap();
    assert!(two_starts.minimize_dfa().is_err());
}

proptest! {
    #[test]
    fn tables_agree_with_simulation(seed in 0u64..500, n in 1usize..5, k in 1usize..4) {
        let m = random_machine(n, k, seed);
        for x in words_up_to(m.input(), 4) {
            prop_assert_eq!(m.run(&x).unwrap(), simulate(&m, &x));
        }
    }

    #[test]
    fn trunc_is_strictly_causal(seed in 0u64..500, n in 1usize..5) {
        let m = random_machine(n, 2, seed);
        let words = words_up_to(m.input(), 4);
        for x in &words {
            for y in words.iter().filter(|y| y.len() == x.len()) {
                let d = x.iter().zip(y.iter()).position(|(a, b)| a != b).unwrap_or(x.len());
                let upto = (d + 1).min(x.len());
                let (ox, oy) = (m.run_trunc(x).unwrap(), m.run_trunc(y).unwrap());
                prop_assert_eq!(ox.len(), x.len());
                prop_assert_eq!(&ox.0[..upto], &oy.0[..upto]);
            }
        }
    }

    #[test]
    fn reversal_identity(seed in 0u64..500, n in 1usize..4) {
        let m = random_machine(n, 2, seed);
        let r = m.reverse();
        for x in words_up_to(m.input(), 5) {
            prop_assert_eq!(r.run_trunc(&x).unwrap(), rev(&m.run_rest(&rev(&x)).unwrap()));
            prop_assert_eq!(m.run_rest(&x).unwrap(), rest(&m.run(&x).unwrap()));
        }
    }

    #[test]
    fn graph_acceptance_matches_runs(seed in 0u64..200, n in 1usize..4) {
        let m = random_machine(n, 2, seed);
        let g = graph_automaton(&m, Mode::Trunc).unwrap();
        for x in words_up_to(m.input(), 3) {
            let out = m.run_trunc(&x).unwrap();
            prop_assert!(g.base().accepts(&tuplefy(&[x.clone(), out]).unwrap()).unwrap());
        }
    }

    #[test]
    fn minimized_dfa_accepts_the_same(seed in 0u64..10_000, n in 1usize..6, k in 1usize..4) {
        let d = as_dfa(&random_machine(n, k, seed), |q| (q as u64 + seed) % 3 == 0);
        let min = d.minimize_dfa().unwrap();
        prop_assert!(min.num_states() <= d.num_states());
        prop_assert!(min.is_deterministic());
        for x in words_up_to(d.alphabet(), 5) {
            prop_assert_eq!(min.accepts(&x).unwrap(), d.accepts(&x).unwrap());
        }
    }
}

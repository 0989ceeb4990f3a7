use proptest::prelude::*;
use regfn::compo::random::{random_machine, random_reverse_machine};
use regfn::compo::{check_final, equivalent_bruteforce, FnTarget, MooreFn, ReverseFn, Term, TermBuilder, WordFunction};
use regfn::krohnrhodes::{build_as_n, build_bit, reset_to_bits};
use regfn::machines::{fixtures, Mode, MooreMachine};
use regfn::perm::{self, Limits};
use regfn::reversal::{
    broadcast_machine, build_ras_n, build_rbit, conjugate_term, eliminate_ras, rest_via_trunc, rev_moore_to_generators,
    rev_reset_to_rbits, run_via_trunc,
};
use regfn::words::{rev, words_up_to, Alphabet, CharFn, Word};

fn w(s: &str) -> Word {
    Word::from_tokens(s.chars().map(|c| c.to_string()))
}

fn perm_word(ps: &[Vec<u32>]) -> Word {
    ps.iter().map(|p| perm::to_symbol(p)).collect()
}

/// `eval(conjugate(t), rev w) = rev(eval(t, w))` on every unary input.
fn conjugation_holds(t: &Term, maxlen: usize) -> bool {
    let c = conjugate_term(t, Limits::default()).unwrap();
    words_up_to(&t.alphabets()[0], maxlen)
        .iter()
        .all(|x| c.eval(&[rev(x)]).unwrap() == rev(&t.eval(std::slice::from_ref(x)).unwrap()))
}

fn machine_term(m: &MooreMachine) -> Term {
    let mut tb = TermBuilder::new(vec![m.input().clone()]);
    let x = tb.input(0);
    let root = tb.moore_trunc(m.clone(), x);
    tb.finish(root).unwrap()
}

#[test]
fn rest_and_full_runs() {
    let p = fixtures::parity();
    let rest = rest_via_trunc(&p).unwrap();
    assert_eq!(rest.eval(&[w("01")]).unwrap(), w("eo"));
    assert_eq!(rest.eval(&[Word::empty()]).unwrap(), Word::empty());
    let l = fixtures::last();
    assert!(
        equivalent_bruteforce(&rest_via_trunc(&l).unwrap(), &MooreFn(&l, Mode::Rest), 6, 1)
            .unwrap()
            .is_equal()
    );
    let full = run_via_trunc(&p).unwrap();
    assert!(equivalent_bruteforce(&full, &MooreFn(&p, Mode::Full), 6, 1)
        .unwrap()
        .is_equal());
    assert_eq!(full.eval(&[Word::empty()]).unwrap(), w("e"));
    let as2 = build_as_n(2, Limits::default()).unwrap();
    assert!(
        equivalent_bruteforce(&run_via_trunc(&as2).unwrap(), &MooreFn(&as2, Mode::Full), 5, 1)
            .unwrap()
            .is_equal()
    );
}

#[test]
fn reverse_generator_machines() {
    assert_eq!(build_rbit().reverse(), build_bit());
    assert_eq!(
        build_ras_n(3, Limits::default()).unwrap().reverse(),
        build_as_n(3, Limits::default()).unwrap()
    );
    let ras1 = build_ras_n(1, Limits::default()).unwrap();
    assert_eq!(ras1.num_states(), 1);
}

#[test]
fn conjugates() {
    let sigma = Alphabet::from_tokens(["a", "b"]).unwrap();
    let mut tb = TermBuilder::new(vec![sigma.clone()]);
    let x = tb.input(0);
    let root = tb.cw(CharFn::identity(&sigma), vec![x]);
    let cw = tb.finish(root).unwrap();
    assert_eq!(conjugate_term(&cw, Limits::default()).unwrap(), cw);
    let pt = machine_term(&fixtures::parity());
    assert!(conjugation_holds(&pt, 6));
    let twice = conjugate_term(&conjugate_term(&pt, Limits::default()).unwrap(), Limits::default()).unwrap();
    assert!(equivalent_bruteforce(&twice, &pt, 5, 1).unwrap().is_equal());
    let bits = Alphabet::from_tokens(["-", "0", "1"]).unwrap();
    let mut tb = TermBuilder::new(vec![bits]);
    let x = tb.input(0);
    let b = tb.bit_trunc(x);
    let rb = tb.rbit_trunc(x);
    let pair = Alphabet::from_tokens(["0", "1"]).unwrap();
    let root = tb.cw(CharFn::pairing(&[pair.clone(), pair]).unwrap(), vec![b, rb]);
    let mixed = tb.finish(root).unwrap();
    assert!(conjugation_holds(&mixed, 6));
    let mut tb = TermBuilder::new(vec![Alphabet::from_tokens(["a"]).unwrap()]);
    let x = tb.input(0);
    let root = tb.unpad(x);
    assert!(conjugate_term(&tb.finish(root).unwrap(), Limits::default()).is_err());
}

#[test]
fn broadcast_decomposes() {
    let group = perm::all_perms(2, Limits::default()).unwrap();
    let r = broadcast_machine(&group).unwrap();
    let t = rev_reset_to_rbits(&r).unwrap();
    assert!(equivalent_bruteforce(&t, &ReverseFn(&r, Mode::Trunc), 4, 1)
        .unwrap()
        .is_equal());
    let single = random_reverse_machine(1, 2, 0);
    let t = rev_reset_to_rbits(&single).unwrap();
    assert!(equivalent_bruteforce(&t, &ReverseFn(&single, Mode::Trunc), 4, 1)
        .unwrap()
        .is_equal());
    let rb = build_rbit();
    let t = rev_reset_to_rbits(&rb).unwrap();
    assert!(equivalent_bruteforce(&t, &ReverseFn(&rb, Mode::Trunc), 6, 1)
        .unwrap()
        .is_equal());
}

#[test]
fn ras_elimination_in_s3() {
    let all = perm::all_perms(3, Limits::default()).unwrap();
    let pa = Alphabet::new(all.iter().map(|p| perm::to_symbol(p))).unwrap();
    let mut tb = TermBuilder::new(vec![pa.clone()]);
    let x = tb.input(0);
    let root = tb.rasn_trunc(3, x);
    let t = tb.finish(root).unwrap();
    let e = eliminate_ras(&t, Limits::default()).unwrap();
    check_final(&e).unwrap();
    assert!(equivalent_bruteforce(&e, &t, 3, 4).unwrap().is_equal());
    // RAS on inverses gives (abcde)^-1, (bcde)^-1, ..., e^-1
    let sample = [
        perm::transposition(3, 0, 1),
        perm::transposition(3, 1, 2),
        vec![1, 2, 0],
        perm::transposition(3, 0, 2),
        vec![2, 0, 1],
    ];
    let inv: Vec<Vec<u32>> = sample.iter().map(|p| perm::inverse(p)).collect();
    let run = build_ras_n(3, Limits::default())
        .unwrap()
        .run_trunc(&perm_word(&inv))
        .unwrap();
    let expected: Vec<Vec<u32>> = (0..5)
        .map(|i| {
            perm::inverse(
                &sample[i..]
                    .iter()
                    .fold(perm::identity(3), |acc, p| perm::compose(&acc, p)),
            )
        })
        .collect();
    assert_eq!(run, perm_word(&expected));
    assert_eq!(e.eval(&[perm_word(&inv)]).unwrap(), run);
}

#[test]
fn trivial_group_elimination() {
    let pa = Alphabet::new([perm::to_symbol(&perm::identity(1))]).unwrap();
    let mut tb = TermBuilder::new(vec![pa.clone()]);
    let x = tb.input(0);
    let root = tb.rasn_trunc(1, x);
    let e = eliminate_ras(&tb.finish(root).unwrap(), Limits::default()).unwrap();
    let id = perm_word(&vec![perm::identity(1); 4]);
    assert_eq!(e.eval(std::slice::from_ref(&id)).unwrap(), id);
}

#[test]
fn reverse_fixtures_to_generators() {
    for m in [fixtures::parity(), fixtures::last(), fixtures::trivial()] {
        let r = m.reverse();
        let t = rev_moore_to_generators(&r, Limits::default()).unwrap();
        check_final(&t).unwrap();
        assert!(equivalent_bruteforce(&t, &ReverseFn(&r, Mode::Trunc), 6, 1)
            .unwrap()
            .is_equal());
    }
}

#[test]
fn bits_of_reset_reversal() {
    let l = fixtures::last();
    assert_eq!(reset_to_bits(&l).unwrap().width(), 1);
    let t = rev_reset_to_rbits(&l.reverse()).unwrap();
    let target = FnTarget {
        alphabets: vec![l.input().clone()],
        f: |x: &[Word]| Ok(rev(&l.run_rest(&rev(&x[0]))?)),
    };
    assert!(equivalent_bruteforce(&t, &target, 6, 1).unwrap().is_equal());
    assert_eq!(target.input_alphabets().len(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn conjugation_of_machine_terms(seed in 0u64..10_000, n in 1usize..4) {
        let m = random_machine(n, 2, seed);
        prop_assert!(conjugation_holds(&machine_term(&m), 5));
        let r = m.reverse();
        let mut tb = TermBuilder::new(vec![r.input().clone()]);
        let x = tb.input(0);
        let root = tb.rev_moore_trunc(r.clone(), x);
        prop_assert!(conjugation_holds(&tb.finish(root).unwrap(), 5));
    }

    #[test]
    fn reverse_machines_to_generators(seed in 0u64..10_000, n in 1usize..4) {
        let r = random_reverse_machine(n, 2, seed);
        let t = rev_moore_to_generators(&r, Limits::default()).unwrap();
        prop_assert!(check_final(&t).is_ok());
        prop_assert!(equivalent_bruteforce(&t, &ReverseFn(&r, Mode::Trunc), 5, 1).unwrap().is_equal());
    }
}

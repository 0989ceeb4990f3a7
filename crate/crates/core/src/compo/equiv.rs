use crate::error::{Error, Result};
use crate::machines::{Mode, MooreMachine, RelationAutomaton, ReverseMooreMachine};
use crate::words::{tuples_up_to, Alphabet, Word};

use super::Term;

/// Anything that maps tuples of words to words.
pub trait WordFunction: Sync {
    fn input_alphabets(&self) -> Vec<Alphabet>;
    fn apply(&self, inputs: &[Word]) -> Result<Word>;
}

impl WordFunction for Term {
    fn input_alphabets(&self) -> Vec<Alphabet> {
        self.alphabets().to_vec()
    }

    fn apply(&self, inputs: &[Word]) -> Result<Word> {
        self.eval(inputs)
    }
}

impl WordFunction for RelationAutomaton {
    fn input_alphabets(&self) -> Vec<Alphabet> {
        RelationAutomaton::input_alphabets(self).to_vec()
    }

    fn apply(&self, inputs: &[Word]) -> Result<Word> {
        self.unique_output(inputs)
    }
}

/// A Moore machine read in one of its run modes.
pub struct MooreFn<'a>(pub &'a MooreMachine, pub Mode);

impl WordFunction for MooreFn<'_> {
    fn input_alphabets(&self) -> Vec<Alphabet> {
        vec![self.0.input().clone()]
    }

    fn apply(&self, inputs: &[Word]) -> Result<Word> {
        let w = single(inputs)?;
        match self.1 {
            Mode::Trunc => self.0.run_trunc(w),
            Mode::Rest => self.0.run_rest(w),
            Mode::Full => self.0.run(w),
        }
    }
}

/// A reverse Moore machine read in one of its run modes.
pub struct ReverseFn<'a>(pub &'a ReverseMooreMachine, pub Mode);

impl WordFunction for ReverseFn<'_> {
    fn input_alphabets(&self) -> Vec<Alphabet> {
        vec![self.0.input().clone()]
    }

    fn apply(&self, inputs: &[Word]) -> Result<Word> {
        let w = single(inputs)?;
        match self.1 {
            Mode::Trunc => self.0.run_trunc(w),
            Mode::Rest => self.0.run_rest(w),
            Mode::Full => self.0.run(w),
        }
    }
}

/// A plain closure with declared input alphabets.
pub struct FnTarget<F> {
    pub alphabets: Vec<Alphabet>,
    pub f: F,
}

impl<F: Fn(&[Word]) -> Result<Word> + Sync> WordFunction for FnTarget<F> {
    fn input_alphabets(&self) -> Vec<Alphabet> {
        self.alphabets.clone()
    }

    fn apply(&self, inputs: &[Word]) -> Result<Word> {
        (self.f)(inputs)
    }
}

fn single(inputs: &[Word]) -> Result<&Word> {
    match inputs {
        [w] => Ok(w),
        _ => Err(Error::LengthMismatch(format!(
            "{} inputs for a unary function",
            inputs.len()
        ))),
    }
}

/// Outcome of a bounded equivalence sweep. Outputs that failed to
/// evaluate are reported by their error text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    EqualUpTo {
        maxlen: usize,
        checked: usize,
    },
    Counterexample {
        inputs: Vec<Word>,
        left: std::result::Result<Word, String>,
        right: std::result::Result<Word, String>,
    },
}

impl Equivalence {
    pub fn is_equal(&self) -> bool {
        matches!(self, Equivalence::EqualUpTo { .. })
    }
}

/// Compares `a` and `b` on every input tuple with components of length at
/// most `maxlen`, in length-then-lexicographic order, and reports the
/// first difference. `jobs > 1` shards the sweep across threads; the
/// reported counterexample is the same either way.
pub fn equivalent_bruteforce(
    a: &dyn WordFunction,
    b: &dyn WordFunction,
    maxlen: usize,
    jobs: usize,
) -> Result<Equivalence> {
    let alphabets = a.input_alphabets();
    if b.input_alphabets().len() != alphabets.len() {
        return Err(Error::LengthMismatch(format!(
            "arities {} and {} differ",
            alphabets.len(),
            b.input_alphabets().len()
        )));
    }
    let tuples = tuples_up_to(&alphabets, maxlen);
    let check = |i: usize| -> Option<Equivalence> {
        let left = a.apply(&tuples[i]).map_err(|e| e.to_string());
        let right = b.apply(&tuples[i]).map_err(|e| e.to_string());
        (left != right).then(|| Equivalence::Counterexample {
            inputs: tuples[i].clone(),
            left,
            right,
        })
    };
    let jobs = jobs.max(1).min(tuples.len().max(1));
    let first = if jobs == 1 {
        (0..tuples.len()).find_map(|i| check(i).map(|c| (i, c)))
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..jobs)
                .map(|j| {
                    let check = &check;
                    let n = tuples.len();
                    s.spawn(move || (j..n).step_by(jobs).find_map(|i| check(i).map(|c| (i, c))))
                })
                .collect();
            handles
                .into_iter()
                .filter_map(|h| h.join().expect("worker panicked"))
                .min_by_key(|(i, _)| *i)
        })
    };
    Ok(match first {
        Some((_, c)) => c,
        None => Equivalence::EqualUpTo {
            maxlen,
            checked: tuples.len(),
        },
    })
}

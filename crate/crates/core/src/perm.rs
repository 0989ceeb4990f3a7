//! Permutations of `{0, …, n-1}` stored as image arrays.
//!
//! Products follow the accumulator convention `(h·g)(i) = h(g(i))`.

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::words::Symbol;

pub type Perm = Vec<u32>;

/// Default bound on the size of any permutation group that gets tabulated.
pub const DEFAULT_MAX_GROUP: usize = 5040;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_group: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_group: DEFAULT_MAX_GROUP,
        }
    }
}

pub fn identity(n: usize) -> Perm {
    (0..n as u32).collect()
}

pub fn is_identity(p: &[u32]) -> bool {
    p.iter().enumerate().all(|(i, &x)| x as usize == i)
}

/// `h·g`.
pub fn compose(h: &[u32], g: &[u32]) -> Perm {
    g.iter().map(|&i| h[i as usize]).collect()
}

pub fn inverse(p: &[u32]) -> Perm {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x as usize] = i as u32;
    }
    inv
}

pub fn is_permutation(p: &[u32]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| {
        let x = x as usize;
        x < seen.len() && !std::mem::replace(&mut seen[x], true)
    })
}

/// The transposition of `i` and `j` in `S_n`.
pub fn transposition(n: usize, i: usize, j: usize) -> Perm {
    let mut p = identity(n);
    p.swap(i, j);
    p
}

pub fn factorial(n: usize) -> Option<usize> {
    (1..=n).try_fold(1usize, |acc, k| acc.checked_mul(k))
}

/// Every permutation of `S_n` in lexicographic order of image arrays.
pub fn all_perms(n: usize, limits: Limits) -> Result<Vec<Perm>> {
    let size = factorial(n).unwrap_or(usize::MAX);
    if size > limits.max_group {
        return Err(Error::CapExceeded {
            stage: "symmetric group",
            size,
            cap: limits.max_group,
        });
    }
    let mut out = Vec::with_capacity(size);
    let mut cur = identity(n);
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    Ok(out)
}

/// The subgroup of `S_n` generated by `gens`, identity first, then in
/// breadth-first order of right multiplication by generators.
pub fn closure(n: usize, gens: &[Perm], limits: Limits, stage: &'static str) -> Result<Vec<Perm>> {
    let id = identity(n);
    let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
    let mut order = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(h) = queue.pop_front() {
        for g in gens {
            let hg = compose(&h, g);
            if seen.insert(hg.clone()) {
                if order.len() >= limits.max_group {
                    return Err(Error::CapExceeded {
                        stage,
                        size: order.len() + 1,
                        cap: limits.max_group,
                    });
                }
                order.push(hg.clone());
                queue.push_back(hg);
            }
        }
    }
    Ok(order)
}

pub fn to_symbol(p: &[u32]) -> Symbol {
    Symbol::perm(p.iter().copied())
}

pub fn from_symbol(s: &Symbol) -> Result<Perm> {
    s.as_perm()
        .map(<[u32]>::to_vec)
        .ok_or_else(|| Error::InvalidTerm(format!("`{s}` is not a permutation")))
}

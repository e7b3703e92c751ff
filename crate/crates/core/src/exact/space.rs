use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::seq::{sorted_of, Sequence};

/// Default limit on the number of enumerated states (7!).
pub const DEFAULT_STATE_CAP: usize = 5040;

/// All distinct arrangements of a multiset, in lexicographic order.
#[derive(Debug, Clone)]
pub struct StateSpace {
    states: Vec<Sequence>,
    index: HashMap<Sequence, usize>,
}

impl StateSpace {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Sequence] {
        &self.states
    }

    pub fn state(&self, idx: usize) -> &Sequence {
        &self.states[idx]
    }

    pub fn index_of(&self, s: &Sequence) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Index of the non-decreasing arrangement (always 0).
    pub fn sorted_index(&self) -> usize {
        0
    }

    /// Index of the non-increasing arrangement (always the last).
    pub fn reversed_index(&self) -> usize {
        self.states.len() - 1
    }

    /// Length of the sequences in the space.
    pub fn seq_len(&self) -> usize {
        self.states[0].len()
    }
}

/// `n! / (m_1! ⋯ m_k!)`, or `None` on overflow.
pub fn multinomial_count(multiset: &Sequence) -> Option<u128> {
    let sorted = sorted_of(multiset);
    let v = sorted.as_slice();
    let mut count: u128 = 1;
    let mut placed: u128 = 0;
    let mut run: u128 = 0;
    for (k, x) in v.iter().enumerate() {
        if k > 0 && x.to_bits() == v[k - 1].to_bits() {
            run += 1;
        } else {
            run = 1;
        }
        placed += 1;
        // count · placed / run stays integral: it is C(placed, run) times the rest
        count = count.checked_mul(placed)? / run;
    }
    Some(count)
}

/// Enumerates every distinct arrangement of `multiset`.
pub fn enumerate_states(multiset: &Sequence, cap: usize) -> Result<StateSpace> {
    let count = multinomial_count(multiset).unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(Error::StateCap { count, cap });
    }
    let mut current = sorted_of(multiset).into_vec();
    let mut states = Vec::with_capacity(count as usize);
    loop {
        states.push(Sequence::from_vec_unchecked(current.clone()));
        if !next_permutation(&mut current) {
            break;
        }
    }
    debug_assert_eq!(states.len() as u128, count);
    let index = states
        .iter()
        .enumerate()
        .map(|(k, s)| (s.clone(), k))
        .collect();
    Ok(StateSpace { states, index })
}

/// Lexicographic successor; duplicates are skipped naturally.
fn next_permutation(v: &mut [f64]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1].total_cmp(&v[i]).is_ge() {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j].total_cmp(&v[i - 1]).is_le() {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

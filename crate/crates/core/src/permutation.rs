//! Permutations in one-line notation and the pattern maps used by the
//! homotopy recursion.
//!
//! Positions and values are 1-based at every public boundary: `get(i)` is
//! π(i) for 1 ≤ i ≤ n.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// A bijection on {1,…,n}. The empty permutation (n = 0) is a valid value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Permutation {
    values: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from its one-line notation, checking bijectivity.
    pub fn new(values: Vec<usize>) -> Result<Self> {
        let n = values.len();
        let mut seen = vec![false; n + 1];
        for &v in &values {
            if v == 0 || v > n {
                return Err(Error::ValueOutOfRange { value: v, n });
            }
            if seen[v] {
                return Err(Error::DuplicateValue(v));
            }
            seen[v] = true;
        }
        Ok(Self { values })
    }

    /// Caller guarantees `values` is a bijection on 1..=len.
    pub(crate) fn from_vec_unchecked(values: Vec<usize>) -> Self {
        debug_assert!(Self::new(values.clone()).is_ok());
        Self { values }
    }

    pub fn empty() -> Self {
        Self { values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self { values: (1..=n).collect() }
    }

    /// The reversal (n, n−1, …, 1); its complex is an antichain.
    pub fn reversal(n: usize) -> Self {
        Self { values: (1..=n).rev().collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// One-line notation; `values()[i - 1]` is π(i).
    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// π(i) for a 1-based position.
    pub fn get(&self, i: usize) -> Result<usize> {
        self.check_position(i)?;
        Ok(self.values[i - 1])
    }

    /// π⁻¹ in one-line notation.
    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (pos, &v) in self.values.iter().enumerate() {
            inv[v - 1] = pos + 1;
        }
        Self { values: inv }
    }

    fn check_position(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.len() {
            Err(Error::IndexOutOfRange { index: i, n: self.len() })
        } else {
            Ok(())
        }
    }

    /// Whether positions `i` and `j` are comparable in ≺_π, i.e. the order of
    /// the positions agrees with the order of their values.
    pub fn comparable(&self, i: usize, j: usize) -> Result<bool> {
        self.check_position(i)?;
        self.check_position(j)?;
        if i == j {
            return Err(Error::SamePosition(i));
        }
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        Ok(self.values[lo - 1] < self.values[hi - 1])
    }

    /// The pattern ψ_A(π): the subsequence at the positions in `positions`
    /// (taken in increasing order) relabelled to 1..=k preserving relative
    /// order.
    pub fn pattern(&self, positions: &[usize]) -> Result<Self> {
        let mut sorted = positions.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for &p in &sorted {
            self.check_position(p)?;
        }
        let sub: Vec<usize> = sorted.iter().map(|&p| self.values[p - 1]).collect();
        Ok(standardize(&sub))
    }

    /// π′_t: the pattern on all positions except `t`.
    pub fn delete_pattern(&self, t: usize) -> Result<Self> {
        self.check_position(t)?;
        let removed = self.values[t - 1];
        let values = self
            .values
            .iter()
            .enumerate()
            .filter(|&(pos, _)| pos + 1 != t)
            .map(|(_, &v)| if v > removed { v - 1 } else { v })
            .collect();
        Ok(Self { values })
    }

    /// π″_t: the pattern on positions t+1..=n. Empty when t = n.
    pub fn suffix_pattern(&self, t: usize) -> Result<Self> {
        self.check_position(t)?;
        Ok(standardize(&self.values[t..]))
    }

    /// Uniform permutation of size `n` by an unbiased Fisher–Yates shuffle.
    pub fn sample_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut values: Vec<usize> = (1..=n).collect();
        values.shuffle(rng);
        Self { values }
    }

    /// Whether X_π is disconnected: some k in 1..n has the last n−k positions
    /// carrying exactly the values 1..=n−k. One right-to-left scan.
    pub fn is_disconnected(&self) -> Result<bool> {
        let n = self.len();
        if n == 0 {
            return Err(Error::EmptyPermutation);
        }
        let mut suffix_max = 0;
        for (len, &v) in self.values[1..].iter().rev().enumerate() {
            suffix_max = suffix_max.max(v);
            if suffix_max == len + 1 {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Relabels distinct values to 1..=k preserving their relative order.
pub(crate) fn standardize(seq: &[usize]) -> Permutation {
    let mut order: Vec<usize> = (0..seq.len()).collect();
    order.sort_unstable_by_key(|&i| seq[i]);
    let mut values = vec![0; seq.len()];
    for (rank, &i) in order.iter().enumerate() {
        values[i] = rank + 1;
    }
    Permutation { values }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Accepts whitespace-separated integers ("3 2 5 4 1 7 6") or, for
    /// n ≤ 9, a single run of digits ("3254176").
    fn from_str(text: &str) -> Result<Self> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let values = match tokens.as_slice() {
            [] => Vec::new(),
            [single] if single.len() > 1 && single.bytes().all(|b| b.is_ascii_digit()) => {
                if single.len() > 9 {
                    return Err(Error::Parse(format!(
                        "compact digit form only supports n <= 9, got {} digits",
                        single.len()
                    )));
                }
                single.bytes().map(|b| (b - b'0') as usize).collect()
            }
            _ => tokens
                .iter()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("invalid token {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?,
        };
        Self::new(values)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.values {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

/// Every permutation of size `n` in lexicographic order.
pub fn all_permutations(n: usize) -> AllPermutations {
    AllPermutations { next: Some((1..=n).collect()) }
}

pub struct AllPermutations {
    next: Option<Vec<usize>>,
}

impl Iterator for AllPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_lexicographic(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation { values: current })
    }
}

fn next_lexicographic(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

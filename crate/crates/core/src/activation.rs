//! Activation sets: which identity ingredients hold at one objective step.
//!
//! Ingredients are addressed by their position in the [`GroundedIdentity`]
//! that produced the set, so a set is only meaningful together with the
//! identity's ingredient count `k`.
//!
//! [`GroundedIdentity`]: crate::identity::GroundedIdentity

use std::fmt;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

/// Fixed-universe bitset over ingredient positions `0..k`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct IngredientSet {
    words: Vec<u64>,
}

impl IngredientSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut set = Self::new();
        for i in indices {
            set.insert(i);
        }
        set
    }

    /// The set `{0, .., k-1}`.
    pub fn full(k: usize) -> Self {
        Self::from_indices(0..k)
    }

    pub fn insert(&mut self, index: usize) {
        let word = index / WORD_BITS;
        if word >= self.words.len() {
            self.words.resize(word + 1, 0);
        }
        self.words[word] |= 1 << (index % WORD_BITS);
    }

    pub fn remove(&mut self, index: usize) {
        let word = index / WORD_BITS;
        if let Some(w) = self.words.get_mut(word) {
            *w &= !(1 << (index % WORD_BITS));
        }
        self.trim();
    }

    pub fn contains(&self, index: usize) -> bool {
        self.words
            .get(index / WORD_BITS)
            .is_some_and(|w| w & (1 << (index % WORD_BITS)) != 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn union_with(&mut self, other: &IngredientSet) {
        if other.words.len() > self.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn is_subset(&self, other: &IngredientSet) -> bool {
        self.words.iter().enumerate().all(|(i, &w)| {
            let o = other.words.get(i).copied().unwrap_or(0);
            w & !o == 0
        })
    }

    pub fn intersection_len(&self, other: &IngredientSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn symmetric_difference_len(&self, other: &IngredientSet) -> usize {
        let n = self.words.len().max(other.words.len());
        (0..n)
            .map(|i| {
                let a = self.words.get(i).copied().unwrap_or(0);
                let b = other.words.get(i).copied().unwrap_or(0);
                (a ^ b).count_ones() as usize
            })
            .sum()
    }

    pub fn symmetric_difference(&self, other: &IngredientSet) -> IngredientSet {
        let n = self.words.len().max(other.words.len());
        let mut words: Vec<u64> = (0..n)
            .map(|i| {
                self.words.get(i).copied().unwrap_or(0) ^ other.words.get(i).copied().unwrap_or(0)
            })
            .collect();
        while words.last() == Some(&0) {
            words.pop();
        }
        IngredientSet { words }
    }

    /// Largest index in the set plus one, or 0 when empty.
    pub fn bound(&self) -> usize {
        self.iter().last().map_or(0, |i| i + 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let tz = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(wi * WORD_BITS + tz)
            })
        })
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

impl fmt::Debug for IngredientSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for IngredientSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::from_indices(iter)
    }
}

/// The feature extractor's output `F(s)` at objective step `step`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActivationSet {
    pub step: usize,
    pub active: IngredientSet,
}

impl ActivationSet {
    pub fn new(step: usize, active: IngredientSet) -> Self {
        Self { step, active }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(step: usize, indices: I) -> Self {
        Self::new(step, IngredientSet::from_indices(indices))
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    /// True when all `k` ingredients are active, i.e. the full conjunction holds.
    pub fn is_full(&self, k: usize) -> bool {
        self.active.len() == k
    }
}

/// Normalised symmetric-difference distance `|a △ b| / k`.
pub fn state_distance(a: &ActivationSet, b: &ActivationSet, k: usize) -> Result<f64> {
    set_distance(&a.active, &b.active, k)
}

pub(crate) fn set_distance(a: &IngredientSet, b: &IngredientSet, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::structural("distance over an empty ingredient universe"));
    }
    if a.bound() > k || b.bound() > k {
        return Err(Error::structural(format!(
            "activation set exceeds ingredient universe of size {k}"
        )));
    }
    Ok(a.symmetric_difference_len(b) as f64 / k as f64)
}

/// Builds activation sets with consecutive step indices from raw index lists.
pub fn sequence_from_indices<I, S>(sets: I) -> Vec<ActivationSet>
where
    I: IntoIterator<Item = S>,
    S: IntoIterator<Item = usize>,
{
    sets.into_iter()
        .enumerate()
        .map(|(u, s)| ActivationSet::from_indices(u, s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(step: usize, ids: &[usize]) -> ActivationSet {
        ActivationSet::from_indices(step, ids.iter().copied())
    }

    #[test]
    fn bitset_basics() {
        let mut s = IngredientSet::from_indices([0, 3, 64, 130]);
        assert_eq!(s.len(), 4);
        assert!(s.contains(64));
        assert!(!s.contains(65));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 3, 64, 130]);
        assert_eq!(s.bound(), 131);
        s.remove(130);
        assert_eq!(s.bound(), 65);
        assert_eq!(IngredientSet::full(3).len(), 3);
    }

    #[test]
    fn distance_of_equal_sets_is_zero() {
        assert_eq!(state_distance(&set(0, &[1, 2]), &set(1, &[1, 2]), 4).unwrap(), 0.0);
    }

    #[test]
    fn distance_fixtures() {
        // |{1,2}| / 2 with zero-based positions 0 and 1.
        assert_eq!(state_distance(&set(0, &[0]), &set(0, &[1]), 2).unwrap(), 1.0);
        // {1,2,3,4} vs {4}: symmetric difference {1,2,3}.
        assert_eq!(
            state_distance(&set(0, &[0, 1, 2, 3]), &set(0, &[3]), 4).unwrap(),
            0.75
        );
    }

    #[test]
    fn zero_universe_is_structural_error() {
        assert!(matches!(
            state_distance(&set(0, &[]), &set(0, &[]), 0),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn distance_is_a_metric_on_small_universes() {
        for k in 1..=4usize {
            let all: Vec<IngredientSet> = (0..(1u32 << k))
                .map(|m| (0..k).filter(|i| m & (1 << i) != 0).collect())
                .collect();
            for a in &all {
                for b in &all {
                    let dab = set_distance(a, b, k).unwrap();
                    let dba = set_distance(b, a, k).unwrap();
                    assert!(dab >= 0.0);
                    assert_eq!(dab, dba);
                    assert_eq!(dab == 0.0, a == b);
                    for c in &all {
                        let dac = set_distance(a, c, k).unwrap();
                        let dcb = set_distance(c, b, k).unwrap();
                        assert!(dab <= dac + dcb + 1e-12);
                    }
                }
            }
        }
    }
}

//! Match lists `L(s,t) = {(i,j) : s_i = t_j}` carrying per-entry values.

use crate::hdr::{HdrScalar, Scalar};
use crate::seq::{build_occurrence_index, SymbolSeq};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchEntry<S = HdrScalar> {
    /// 1-based position in `s`.
    pub i: u32,
    /// 1-based position in `t`.
    pub j: u32,
    pub value: S,
}

/// Entries sorted by `(i, j)` without duplicates.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchList<S = HdrScalar> {
    entries: Vec<MatchEntry<S>>,
}

impl<S: Scalar> MatchList<S> {
    /// Wraps entries that the caller guarantees are sorted by `(i, j)`.
    pub(crate) fn from_sorted(entries: Vec<MatchEntry<S>>) -> Self {
        debug_assert!(entries
            .windows(2)
            .all(|w| (w[0].i, w[0].j) < (w[1].i, w[1].j)));
        MatchList { entries }
    }

    /// Builds the list for `s`, `t` with `value(i, j)` at every match.
    ///
    /// Runs in `O(|s| + |t| + |Σ| + |L|)` using the occurrence index of `t`.
    pub fn build_with(s: &SymbolSeq, t: &SymbolSeq, mut value: impl FnMut(u32, u32) -> S) -> Self {
        let alphabet = s.alphabet_size().max(t.alphabet_size());
        let occurrences = build_occurrence_index(t, alphabet);
        let mut entries = Vec::with_capacity(match_count_with(s, &occurrences));
        for (pos, &c) in s.symbols().iter().enumerate() {
            let i = pos as u32 + 1;
            for &j in &occurrences[c as usize] {
                entries.push(MatchEntry {
                    i,
                    j,
                    value: value(i, j),
                });
            }
        }
        MatchList { entries }
    }

    pub fn entries(&self) -> &[MatchEntry<S>] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<MatchEntry<S>> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn pairs(&self) -> Vec<(u32, u32)> {
        self.entries.iter().map(|e| (e.i, e.j)).collect()
    }

    pub fn get(&self, i: u32, j: u32) -> Option<S> {
        self.entries
            .binary_search_by(|e| (e.i, e.j).cmp(&(i, j)))
            .ok()
            .map(|k| self.entries[k].value)
    }

    pub fn to_hdr(&self) -> MatchList<HdrScalar> {
        MatchList {
            entries: self
                .entries
                .iter()
                .map(|e| MatchEntry {
                    i: e.i,
                    j: e.j,
                    value: e.value.to_hdr(),
                })
                .collect(),
        }
    }
}

fn match_count_with(s: &SymbolSeq, t_occurrences: &[Vec<u32>]) -> usize {
    s.symbols()
        .iter()
        .map(|&c| t_occurrences[c as usize].len())
        .sum()
}

/// `|L(s,t)|` without materialising the list.
pub fn match_count(s: &SymbolSeq, t: &SymbolSeq) -> usize {
    let alphabet = s.alphabet_size().max(t.alphabet_size());
    match_count_with(s, &build_occurrence_index(t, alphabet))
}

/// Match list initialised with the level-1 scaled suffix values `λ^(2-i-j)`.
pub fn build_match_list(s: &SymbolSeq, t: &SymbolSeq, lambda: f64) -> MatchList {
    build_match_list_in::<HdrScalar>(s, t, lambda)
}

pub(crate) fn build_match_list_in<S: Scalar>(s: &SymbolSeq, t: &SymbolSeq, lambda: f64) -> MatchList<S> {
    let powers: Vec<S> = crate::hdr::lambda_powers(lambda, s.len() + t.len(), -1);
    let lambda2 = S::lambda_power(lambda, 2);
    MatchList::build_with(s, t, |i, j| powers[(i + j) as usize] * lambda2)
}

//! Exact kernel by sparse dynamic programming over match lists.
//!
//! Suffix values are stored with the dummy gap weight `λ^(m-i+n-j)`, which
//! turns the suffix recursion into a plain dominance sum:
//! `bar K_q^S(k,l) = Σ_{i<k, j<l} bar K_{q-1}^S(i,j)`. Rows of `s` are swept
//! in order; a [`RangeSumTree`] over the columns of `t` answers the inner
//! sum as a prefix query.

use crate::error::{Result, SskError};
use crate::hdr::{fits_native, lambda_powers, HdrScalar, Scalar};
use crate::matchlist::{MatchEntry, MatchList};
use crate::seq::{KernelParams, KernelVector, SymbolSeq};

/// Implicit binary tree over keys `1..=capacity` supporting point update
/// and prefix sum in `O(log n)`.
///
/// The root is keyed `2^h`; a node keyed `j` covers `[j - span(j) + 1, j]`
/// where `span(j)` is the lowest set bit of `j`. Odd keys are leaves. The
/// prefix sum of `[1, j]` adds `j` and its ancestors keyed below `j`; an
/// update touches `j` and its ancestors keyed above `j`.
#[derive(Clone, Debug)]
pub struct RangeSumTree<S = HdrScalar> {
    capacity: usize,
    nodes: Vec<S>,
}

impl<S: Scalar> RangeSumTree<S> {
    /// A tree accepting keys `1..=capacity`; storage is rounded up to a
    /// power of two.
    pub fn new(capacity: usize) -> Self {
        let size = capacity.max(1).next_power_of_two();
        RangeSumTree {
            capacity,
            nodes: vec![S::zero(); size + 1],
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn height(&self) -> u32 {
        (self.nodes.len() - 1).trailing_zeros()
    }

    pub fn clear(&mut self) {
        self.nodes.fill(S::zero());
    }

    /// Adds `value` at key `j`.
    pub fn update(&mut self, j: usize, value: S) -> Result<()> {
        if j == 0 || j > self.capacity {
            return Err(SskError::KeyOutOfRange {
                key: j,
                capacity: self.capacity,
            });
        }
        if value.is_zero() {
            return Ok(());
        }
        let size = self.nodes.len() - 1;
        let mut key = j;
        while key <= size {
            self.nodes[key] += value;
            key += key & key.wrapping_neg();
        }
        Ok(())
    }

    /// Sum of values with keys in `[1, j]`; `j` is clamped to the capacity.
    pub fn prefix_sum(&self, j: usize) -> S {
        let mut key = j.min(self.capacity);
        let mut total = S::zero();
        while key > 0 {
            total += self.nodes[key];
            key &= key - 1;
        }
        total
    }
}

/// Per-level lists `L_q(i)`: entries of row `i` hold `(j, λ^(m-i+n-j) K_q^S)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelMatchLists<S = HdrScalar> {
    rows: usize,
    entries: MatchList<S>,
}

impl<S: Scalar> LevelMatchLists<S> {
    /// Entries of row `i` (1-based) as `(j, value)` pairs.
    pub fn row(&self, i: usize) -> Vec<(u32, S)> {
        self.entries
            .entries()
            .iter()
            .filter(|e| e.i as usize == i)
            .map(|e| (e.j, e.value))
            .collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &MatchList<S> {
        &self.entries
    }
}

struct SparseRun<S: Scalar> {
    levels: Vec<LevelMatchLists<S>>,
    totals: Vec<S>,
}

fn sparse_run<S: Scalar>(s: &SymbolSeq, t: &SymbolSeq, params: KernelParams, keep_levels: bool) -> SparseRun<S> {
    let lambda = params.lambda();
    let (m, n) = (s.len(), t.len());
    let p = params.p();
    let mut totals = vec![S::zero(); p];
    let mut levels = Vec::new();
    if m == 0 || n == 0 {
        return SparseRun { levels, totals };
    }
    let decay: Vec<S> = lambda_powers(lambda, m + n, 1);
    let undo: Vec<S> = lambda_powers(lambda, m + n, -1);
    let lambda2 = S::lambda_power(lambda, 2);
    let weight = |i: u32, j: u32| m + n - (i + j) as usize;

    let mut current = MatchList::build_with(s, t, |i, j| decay[weight(i, j)] * lambda2);
    let fold = |list: &MatchList<S>| -> S {
        list.entries()
            .iter()
            .fold(S::zero(), |acc, e| acc + e.value * undo[weight(e.i, e.j)])
    };
    totals[0] = fold(&current);
    let mut tree = RangeSumTree::<S>::new(n);
    for total in totals.iter_mut().skip(1) {
        if current.is_empty() {
            break;
        }
        if keep_levels {
            levels.push(LevelMatchLists {
                rows: m,
                entries: current.clone(),
            });
        }
        tree.clear();
        let entries = current.entries();
        let mut next = Vec::new();
        let mut row_start = 0;
        while row_start < entries.len() {
            let i = entries[row_start].i;
            let row_end = row_start + entries[row_start..].partition_point(|e| e.i == i);
            let row = &entries[row_start..row_end];
            // query the rows above before this row's own entries go in
            for e in row {
                let sum = tree.prefix_sum(e.j as usize - 1);
                if !sum.is_zero() {
                    next.push(MatchEntry { i, j: e.j, value: sum });
                }
            }
            for e in row {
                tree.update(e.j as usize, e.value)
                    .expect("match columns lie within the tree");
            }
            row_start = row_end;
        }
        current = MatchList::from_sorted(next);
        *total = fold(&current);
    }
    if keep_levels && levels.len() < p && !current.is_empty() {
        levels.push(LevelMatchLists {
            rows: m,
            entries: current,
        });
    }
    SparseRun { levels, totals }
}

pub fn sparse_ssk(s: &SymbolSeq, t: &SymbolSeq, params: KernelParams) -> KernelVector {
    let values = if fits_native(s.len() + t.len(), params.lambda()) {
        to_hdr(sparse_run::<f64>(s, t, params, false).totals)
    } else {
        sparse_run::<HdrScalar>(s, t, params, false).totals
    };
    KernelVector::from_values(values)
}

/// The nonempty lists `L_1, L_2, ...` built while computing up to level `p`.
pub fn sparse_levels(s: &SymbolSeq, t: &SymbolSeq, params: KernelParams) -> Vec<LevelMatchLists> {
    sparse_run::<HdrScalar>(s, t, params, true).levels
}

fn to_hdr<S: Scalar>(values: Vec<S>) -> Vec<HdrScalar> {
    values.into_iter().map(Scalar::to_hdr).collect()
}

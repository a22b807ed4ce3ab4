//! Layered range sum tree.
//!
//! A static 2-D range tree: a perfectly balanced tree over the points in
//! x order whose internal nodes carry an associated array of their points
//! in y order. Two extensions turn range reporting into range summation in
//! `O(log n)`:
//!
//! * associated arrays hold running prefix sums of the weights, so the sum
//!   of any slot interval is one difference;
//! * fractional cascading: from a parent slot, the *small pointer* gives the
//!   child slot with the least key `>=` the slot key and the *large
//!   pointer* the child slot with the greatest key `<=` it. A y-interval
//!   found once at the top is carried to every canonical node in `O(1)`
//!   per step.
//!
//! Layout: every depth owns one array of `n` slots, and the associated
//! array of node `[lo, hi)` occupies slots `lo..hi` of its depth. Because
//! keys are distinct, each parent slot lands in exactly one child, and the
//! four pointers of slot `k` are all determined by `left_before[k]`, the
//! number of slots before `k` whose point went left: for the left child the
//! small pointer is `left_before[k]` and the large pointer
//! `left_before[k + 1] - 1`; the right child uses `k - left_before[k]` and
//! `k + 1 - left_before[k + 1] - 1`. A `u32` per slot thus stands in for
//! four pointers.
//!
//! Nodes of at most `leaf_size` points are leaves without associated
//! arrays; they are scanned directly.

use std::ops::Range;

use crate::error::{Result, SskError};
use crate::hdr::{HdrScalar, Scalar};
use crate::matchlist::MatchEntry;

use super::composite::{CompositeKey, RangeQuery2D, WeightedPoint};

pub const DEFAULT_LEAF_SIZE: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Node {
    depth: usize,
    lo: usize,
    hi: usize,
}

impl Node {
    fn size(&self) -> usize {
        self.hi - self.lo
    }

    fn mid(&self) -> usize {
        self.lo + self.size() / 2
    }

    fn children(&self) -> (Node, Node) {
        let mid = self.mid();
        (
            Node {
                depth: self.depth + 1,
                lo: self.lo,
                hi: mid,
            },
            Node {
                depth: self.depth + 1,
                lo: mid,
                hi: self.hi,
            },
        )
    }
}

struct Level<S: Scalar> {
    /// Inclusive running sum of weights within each node's associated array.
    prefix: Vec<S::Stored>,
    left_before: Vec<u32>,
}

/// Pieces a query decomposes into.
enum Piece {
    /// Slots `c..d` of an internal node's associated array.
    Assoc { node: Node, c: usize, d: usize },
    /// Points `xs` of a leaf, to be filtered on y rank.
    Leaf { xs: Range<usize> },
}

/// Work done by one query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryTrace {
    /// Nodes visited on the search paths.
    pub path_nodes: usize,
    /// Canonical pieces summed.
    pub pieces: usize,
}

pub struct LayeredRangeSumTree<S: Scalar = HdrScalar> {
    leaf_size: usize,
    x_keys: Vec<(i64, i64)>,
    y_keys: Vec<(i64, i64)>,
    /// y rank of the point at each x position.
    y_rank: Vec<u32>,
    weights: Vec<S::Stored>,
    levels: Vec<Level<S>>,
}

impl<S: Scalar> LayeredRangeSumTree<S> {
    pub fn build(points: Vec<WeightedPoint<S>>) -> Result<Self> {
        Self::build_with_leaf_size(points, DEFAULT_LEAF_SIZE)
    }

    pub fn build_with_leaf_size(mut points: Vec<WeightedPoint<S>>, leaf_size: usize) -> Result<Self> {
        let mut keyed = Vec::with_capacity(points.len());
        for p in points.drain(..) {
            let (Some(x), Some(y)) = (p.x.as_pair(), p.y.as_pair()) else {
                return Err(SskError::SentinelKey);
            };
            keyed.push((x, y, p.weight));
        }
        keyed.sort_unstable_by_key(|&(x, _, _)| x);
        if keyed.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(SskError::DuplicateKey);
        }
        let mut by_y: Vec<u32> = (0..keyed.len() as u32).collect();
        by_y.sort_unstable_by_key(|&k| keyed[k as usize].1);
        if by_y
            .windows(2)
            .any(|w| keyed[w[0] as usize].1 == keyed[w[1] as usize].1)
        {
            return Err(SskError::DuplicateKey);
        }
        let y_keys = by_y.iter().map(|&k| keyed[k as usize].1).collect();
        let x_keys = keyed.iter().map(|&(x, _, _)| x).collect();
        let weights = keyed.iter().map(|&(_, _, w)| w).collect();
        Self::assemble(x_keys, y_keys, by_y, weights, leaf_size)
    }

    /// Builds from match entries sorted by `(i, j)` with `j <= max_j`, using
    /// the points `x = (i | j)`, `y = (j | i)`.
    ///
    /// The y order comes from a stable counting sort on `j`, so the build
    /// is `O(|L| log |L|)` without comparison sorting.
    pub fn from_match_entries(entries: &[MatchEntry<S>], max_j: usize, leaf_size: usize) -> Result<Self> {
        let mut column_start = vec![0u32; max_j + 2];
        for e in entries {
            column_start[e.j as usize + 1] += 1;
        }
        for j in 1..column_start.len() {
            column_start[j] += column_start[j - 1];
        }
        let mut by_y = vec![0u32; entries.len()];
        for (x, e) in entries.iter().enumerate() {
            let slot = &mut column_start[e.j as usize];
            by_y[*slot as usize] = x as u32;
            *slot += 1;
        }
        let x_keys = entries.iter().map(|e| (e.i as i64, e.j as i64)).collect();
        let y_keys = by_y
            .iter()
            .map(|&x| {
                let e = &entries[x as usize];
                (e.j as i64, e.i as i64)
            })
            .collect();
        let weights = entries.iter().map(|e| e.value).collect();
        Self::assemble(x_keys, y_keys, by_y, weights, leaf_size)
    }

    /// `by_y[r]` is the x position of the point with y rank `r`.
    fn assemble(
        x_keys: Vec<(i64, i64)>,
        y_keys: Vec<(i64, i64)>,
        by_y: Vec<u32>,
        weights: Vec<S>,
        leaf_size: usize,
    ) -> Result<Self> {
        let leaf_size = leaf_size.max(1);
        let n = x_keys.len();
        let mut y_rank = vec![0u32; n];
        for (r, &x) in by_y.iter().enumerate() {
            y_rank[x as usize] = r as u32;
        }
        if weights.iter().any(|w| *w < S::zero()) {
            return Err(SskError::NegativeWeight);
        }
        let stored: Vec<S::Stored> = weights
            .iter()
            .map(|w| w.store().ok_or(SskError::WeightRange))
            .collect::<Result<_>>()?;

        let mut levels = Vec::new();
        let mut order = by_y;
        let mut next = vec![0u32; n];
        let mut frontier = if n > leaf_size {
            vec![Node { depth: 0, lo: 0, hi: n }]
        } else {
            Vec::new()
        };
        while !frontier.is_empty() {
            let mut prefix = vec![S::Stored::default(); n];
            let mut left_before = vec![0u32; n];
            let mut children = Vec::with_capacity(frontier.len() * 2);
            for node in &frontier {
                let mid = node.mid();
                let (mut to_left, mut to_right) = (node.lo, mid);
                let mut acc = S::zero();
                for k in node.lo..node.hi {
                    let x = order[k] as usize;
                    acc += weights[x];
                    prefix[k] = acc.store().ok_or(SskError::WeightRange)?;
                    left_before[k] = (to_left - node.lo) as u32;
                    if x < mid {
                        next[to_left] = x as u32;
                        to_left += 1;
                    } else {
                        next[to_right] = x as u32;
                        to_right += 1;
                    }
                }
                let (left, right) = node.children();
                children.extend([left, right].into_iter().filter(|c| c.size() > leaf_size));
            }
            levels.push(Level { prefix, left_before });
            std::mem::swap(&mut order, &mut next);
            frontier = children;
        }
        Ok(LayeredRangeSumTree {
            leaf_size,
            x_keys,
            y_keys,
            y_rank,
            weights: stored,
            levels,
        })
    }

    pub fn len(&self) -> usize {
        self.x_keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_keys.is_empty()
    }

    /// Number of depths carrying associated arrays.
    pub fn levels(&self) -> usize {
        self.levels.len()
    }

    pub fn leaf_size(&self) -> usize {
        self.leaf_size
    }

    /// Associated-array slots over all depths.
    pub fn storage_slots(&self) -> usize {
        self.levels.iter().map(|l| l.prefix.len()).sum()
    }

    /// Rough heap footprint for `points` points.
    pub fn estimated_bytes(points: usize, leaf_size: usize) -> usize {
        let depth = if points > leaf_size.max(1) {
            (points as f64 / leaf_size.max(1) as f64).log2().ceil() as usize
        } else {
            0
        };
        let per_slot = std::mem::size_of::<S::Stored>() + 4;
        let per_point = 2 * 16 + 4 + std::mem::size_of::<S::Stored>() + 8;
        points * (depth * per_slot + per_point)
    }

    fn root(&self) -> Node {
        Node {
            depth: 0,
            lo: 0,
            hi: self.len(),
        }
    }

    fn is_leaf(&self, node: Node) -> bool {
        node.size() <= self.leaf_size
    }

    fn weight(&self, x: usize) -> S {
        S::load(self.weights[x])
    }

    /// Exclusive prefix sum of the first `k` slots of an internal node.
    fn prefix_before(&self, node: Node, k: usize) -> S {
        if k == 0 {
            S::zero()
        } else {
            S::load(self.levels[node.depth].prefix[node.lo + k - 1])
        }
    }

    /// Number of the first `k` slots of an internal node routed left.
    fn left_before(&self, node: Node, k: usize) -> usize {
        if k == node.size() {
            node.mid() - node.lo
        } else {
            self.levels[node.depth].left_before[node.lo + k] as usize
        }
    }

    /// Maps the slot interval `c..d` of an internal node to its children.
    fn cascade(&self, node: Node, c: usize, d: usize) -> ((usize, usize), (usize, usize)) {
        let (lc, ld) = (self.left_before(node, c), self.left_before(node, d));
        ((lc, ld), (c - lc, d - ld))
    }

    /// Small pointer of slot `k` into the left (`right = false`) or right child.
    fn small_pointer(&self, node: Node, k: usize, right: bool) -> Option<usize> {
        let (left, right_child) = node.children();
        let lb = self.left_before(node, k);
        let (target, size) = if right {
            (k - lb, right_child.size())
        } else {
            (lb, left.size())
        };
        (target < size).then_some(target)
    }

    /// Large pointer of slot `k` into the left or right child.
    fn large_pointer(&self, node: Node, k: usize, right: bool) -> Option<usize> {
        let lb = self.left_before(node, k + 1);
        let count = if right { k + 1 - lb } else { lb };
        count.checked_sub(1)
    }

    fn x_range(&self, q: &RangeQuery2D) -> (usize, usize) {
        let lo = self
            .x_keys
            .partition_point(|&k| CompositeKey::cmp_pair(k, &q.x_lo).is_lt());
        let hi = self
            .x_keys
            .partition_point(|&k| CompositeKey::cmp_pair(k, &q.x_hi).is_le());
        (lo, hi)
    }

    fn y_range(&self, q: &RangeQuery2D) -> (usize, usize) {
        let lo = self
            .y_keys
            .partition_point(|&k| CompositeKey::cmp_pair(k, &q.y_lo).is_lt());
        let hi = self
            .y_keys
            .partition_point(|&k| CompositeKey::cmp_pair(k, &q.y_hi).is_le());
        (lo, hi)
    }

    /// Splits the rank rectangle `xs x ys` into canonical pieces.
    fn decompose(&self, xs: Range<usize>, ys: Range<usize>, emit: &mut impl FnMut(Piece)) -> usize {
        let (xa, xb) = (xs.start, xs.end.min(self.len()));
        let mut touched = 0;
        if xa >= xb || ys.start >= ys.end {
            return touched;
        }
        let full = |node: Node, c: usize, d: usize, emit: &mut dyn FnMut(Piece)| {
            if c >= d {
                return;
            }
            if self.is_leaf(node) {
                emit(Piece::Leaf { xs: node.lo..node.hi });
            } else {
                emit(Piece::Assoc { node, c, d });
            }
        };

        // Descend to the split node.
        let mut node = self.root();
        let (mut c, mut d) = (ys.start, ys.end);
        let (left, right, (lc, ld), (rc, rd)) = loop {
            touched += 1;
            if c >= d {
                return touched;
            }
            if xa <= node.lo && node.hi <= xb {
                full(node, c, d, emit);
                return touched;
            }
            if self.is_leaf(node) {
                emit(Piece::Leaf { xs: xa.max(node.lo)..xb.min(node.hi) });
                return touched;
            }
            let mid = node.mid();
            let (l, r) = node.children();
            let (lr, rr) = self.cascade(node, c, d);
            if xb <= mid {
                node = l;
                (c, d) = lr;
            } else if xa >= mid {
                node = r;
                (c, d) = rr;
            } else {
                break (l, r, lr, rr);
            }
        };

        // Left boundary: everything at or right of xa.
        let (mut node, mut c, mut d) = (left, lc, ld);
        loop {
            touched += 1;
            if c >= d {
                break;
            }
            if xa <= node.lo {
                full(node, c, d, emit);
                break;
            }
            if self.is_leaf(node) {
                emit(Piece::Leaf { xs: xa..node.hi });
                break;
            }
            let (l, r) = node.children();
            let (lr, rr) = self.cascade(node, c, d);
            if xa < node.mid() {
                full(r, rr.0, rr.1, emit);
                (node, c, d) = (l, lr.0, lr.1);
            } else {
                (node, c, d) = (r, rr.0, rr.1);
            }
        }

        // Right boundary: everything left of xb.
        let (mut node, mut c, mut d) = (right, rc, rd);
        loop {
            touched += 1;
            if c >= d {
                break;
            }
            if node.hi <= xb {
                full(node, c, d, emit);
                break;
            }
            if self.is_leaf(node) {
                emit(Piece::Leaf { xs: node.lo..xb });
                break;
            }
            let (l, r) = node.children();
            let (lr, rr) = self.cascade(node, c, d);
            if xb > node.mid() {
                full(l, lr.0, lr.1, emit);
                (node, c, d) = (r, rr.0, rr.1);
            } else {
                (node, c, d) = (l, lr.0, lr.1);
            }
        }
        touched
    }

    fn piece_sum(&self, piece: &Piece, ys: &Range<usize>) -> S {
        match piece {
            Piece::Assoc { node, c, d } => {
                let upper = self.prefix_before(*node, *d);
                if *c == 0 {
                    upper
                } else {
                    upper - self.prefix_before(*node, *c)
                }
            }
            Piece::Leaf { xs } => xs
                .clone()
                .filter(|&x| ys.contains(&(self.y_rank[x] as usize)))
                .fold(S::zero(), |acc, x| acc + self.weight(x)),
        }
    }

    fn sum_ranks(&self, xs: Range<usize>, ys: Range<usize>) -> (S, QueryTrace) {
        let mut total = S::zero();
        let mut pieces = 0;
        let path_nodes = self.decompose(xs, ys.clone(), &mut |piece| {
            pieces += 1;
            total += self.piece_sum(&piece, &ys);
        });
        (total, QueryTrace { path_nodes, pieces })
    }

    /// Sum of the weights of all points inside `q`.
    pub fn range_sum(&self, q: &RangeQuery2D) -> S {
        self.range_sum_traced(q).0
    }

    pub fn range_sum_traced(&self, q: &RangeQuery2D) -> (S, QueryTrace) {
        if self.is_empty() {
            return (S::zero(), QueryTrace::default());
        }
        let (xa, xb) = self.x_range(q);
        let (ya, yb) = self.y_range(q);
        self.sum_ranks(xa..xb, ya..yb)
    }

    /// Sum over points with x position `< x_end` and y rank `< y_end`.
    ///
    /// Equivalent to [`range_sum`](Self::range_sum) once the two binary
    /// searches on the query's upper corners have been done by the caller.
    pub fn dominance_sum(&self, x_end: usize, y_end: usize) -> S {
        self.sum_ranks(0..x_end, 0..y_end).0
    }

    fn point(&self, x: usize) -> WeightedPoint<S> {
        let (xi, xj) = self.x_keys[x];
        let (yi, yj) = self.y_keys[self.y_rank[x] as usize];
        WeightedPoint::new(CompositeKey::new(xi, xj), CompositeKey::new(yi, yj), self.weight(x))
    }

    fn report_assoc(&self, node: Node, c: usize, d: usize, ys: &Range<usize>, out: &mut Vec<WeightedPoint<S>>) {
        if c >= d {
            return;
        }
        if self.is_leaf(node) {
            out.extend(
                (node.lo..node.hi)
                    .filter(|&x| ys.contains(&(self.y_rank[x] as usize)))
                    .map(|x| self.point(x)),
            );
            return;
        }
        let (l, r) = node.children();
        let ((lc, ld), (rc, rd)) = self.cascade(node, c, d);
        self.report_assoc(l, lc, ld, ys, out);
        self.report_assoc(r, rc, rd, ys, out);
    }

    /// All points inside `q`, in no particular order.
    pub fn range_report(&self, q: &RangeQuery2D) -> Vec<WeightedPoint<S>> {
        let mut out = Vec::new();
        if self.is_empty() {
            return out;
        }
        let (xa, xb) = self.x_range(q);
        let (ya, yb) = self.y_range(q);
        let ys = ya..yb;
        let mut pieces = Vec::new();
        self.decompose(xa..xb, ys.clone(), &mut |piece| pieces.push(piece));
        for piece in pieces {
            match piece {
                Piece::Assoc { node, c, d } => self.report_assoc(node, c, d, &ys, &mut out),
                Piece::Leaf { xs } => out.extend(
                    xs.filter(|&x| ys.contains(&(self.y_rank[x] as usize)))
                        .map(|x| self.point(x)),
                ),
            }
        }
        out
    }

    /// The x-position ranges of the canonical pieces for an x-range query.
    pub fn canonical_x_ranges(&self, xs: Range<usize>) -> Vec<Range<usize>> {
        let mut ranges = Vec::new();
        let xa = xs.start;
        let xb = xs.end;
        self.decompose(xs, 0..self.len(), &mut |piece| match piece {
            Piece::Assoc { node, .. } => ranges.push(node.lo..node.hi),
            Piece::Leaf { xs } => ranges.push(xs.start.max(xa)..xs.end.min(xb)),
        });
        ranges
    }

    /// Walks every internal node and checks the structural invariants:
    /// canonical subsets, y order of associated arrays, prefix sums, and
    /// that small and large pointers land on the least key `>=` and the
    /// greatest key `<=` the slot key in each child.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.len();
        if n <= self.leaf_size {
            return if self.levels.is_empty() {
                Ok(())
            } else {
                Err("leaf root with associated arrays".into())
            };
        }
        let mut root_slots = vec![0u32; n];
        for x in 0..n {
            root_slots[self.y_rank[x] as usize] = x as u32;
        }
        let mut stack = vec![(self.root(), root_slots)];
        let mut internal = 0;
        while let Some((node, slots)) = stack.pop() {
            if self.is_leaf(node) {
                continue;
            }
            internal += 1;
            let mut members: Vec<u32> = slots.clone();
            members.sort_unstable();
            if members.iter().copied().ne(node.lo as u32..node.hi as u32) {
                return Err(format!("node {node:?}: canonical subset mismatch"));
            }
            if slots
                .windows(2)
                .any(|w| self.y_rank[w[0] as usize] >= self.y_rank[w[1] as usize])
            {
                return Err(format!("node {node:?}: associated array not sorted by y"));
            }
            let mut acc = S::zero();
            for (k, &x) in slots.iter().enumerate() {
                acc += self.weight(x as usize);
                let stored = self.prefix_before(node, k + 1);
                if stored.to_hdr() != acc.to_hdr() {
                    return Err(format!("node {node:?}: prefix sum at slot {k}"));
                }
                if k > 0 && stored < self.prefix_before(node, k) {
                    return Err(format!("node {node:?}: prefix sums decrease at slot {k}"));
                }
            }
            let mid = node.mid() as u32;
            let left: Vec<u32> = slots.iter().copied().filter(|&x| x < mid).collect();
            let right: Vec<u32> = slots.iter().copied().filter(|&x| x >= mid).collect();
            let left_ranks: Vec<u32> = left.iter().map(|&c| self.y_rank[c as usize]).collect();
            let right_ranks: Vec<u32> = right.iter().map(|&c| self.y_rank[c as usize]).collect();
            for (k, &x) in slots.iter().enumerate() {
                let key = self.y_rank[x as usize];
                for (is_right, ranks) in [(false, &left_ranks), (true, &right_ranks)] {
                    let small = ranks.partition_point(|&r| r < key);
                    let small = (small < ranks.len()).then_some(small);
                    let large = ranks.partition_point(|&r| r <= key).checked_sub(1);
                    if self.small_pointer(node, k, is_right) != small {
                        return Err(format!("node {node:?}: small pointer of slot {k}"));
                    }
                    if self.large_pointer(node, k, is_right) != large {
                        return Err(format!("node {node:?}: large pointer of slot {k}"));
                    }
                }
            }
            let (l, r) = node.children();
            stack.push((l, left));
            stack.push((r, right));
        }
        if internal == 0 {
            return Err("no internal nodes above the leaf size".into());
        }
        Ok(())
    }
}

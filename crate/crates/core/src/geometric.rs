//! Exact kernel by 2-D dominance sums over a layered range sum tree.
//!
//! Suffix values are rescaled as `tilde K_q^S(i,j) = λ^-(i+j) K_q^S(i,j)`,
//! so that `tilde K_q^S(k,l) = Σ_{i<k, j<l} tilde K_{q-1}^S(i,j)` for every
//! match `(k,l)`. Each level builds one static tree over the previous
//! level's list and answers one dominance query per surviving match, giving
//! `O(p |L| log |L|)` time independent of the alphabet.

use crate::error::Result;
use crate::geometry::{LayeredRangeSumTree, DEFAULT_LEAF_SIZE};
use crate::hdr::{fits_native, lambda_powers, HdrScalar, Scalar};
use crate::matchlist::{build_match_list_in, MatchEntry, MatchList};
use crate::seq::{KernelParams, KernelVector, SymbolSeq};

struct GeometricRun<S> {
    levels: Vec<MatchList<S>>,
    totals: Vec<S>,
}

/// For each entry of a list sorted by `(i, j)`, the number of entries in
/// earlier rows and the number in earlier columns.
fn dominance_corners<S: Scalar>(entries: &[MatchEntry<S>], n: usize) -> Vec<(usize, usize)> {
    let mut column_start = vec![0usize; n + 2];
    for e in entries {
        column_start[e.j as usize + 1] += 1;
    }
    for j in 1..column_start.len() {
        column_start[j] += column_start[j - 1];
    }
    let mut corners = Vec::with_capacity(entries.len());
    let mut row_start = 0;
    for (k, e) in entries.iter().enumerate() {
        if k > 0 && entries[k - 1].i != e.i {
            row_start = k;
        }
        corners.push((row_start, column_start[e.j as usize]));
    }
    corners
}

fn geometric_run<S: Scalar>(
    s: &SymbolSeq,
    t: &SymbolSeq,
    params: KernelParams,
    leaf_size: usize,
    keep_levels: bool,
) -> Result<GeometricRun<S>> {
    let lambda = params.lambda();
    let (m, n) = (s.len(), t.len());
    let p = params.p();
    let mut totals = vec![S::zero(); p];
    let mut levels = Vec::new();
    if m == 0 || n == 0 {
        return Ok(GeometricRun { levels, totals });
    }
    let undo: Vec<S> = lambda_powers(lambda, m + n, 1);
    let fold = |list: &MatchList<S>| -> S {
        list.entries()
            .iter()
            .fold(S::zero(), |acc, e| acc + e.value * undo[(e.i + e.j) as usize])
    };

    let mut current = build_match_list_in::<S>(s, t, lambda);
    totals[0] = fold(&current);
    for total in totals.iter_mut().skip(1) {
        if current.is_empty() {
            break;
        }
        let entries = current.entries();
        let tree = LayeredRangeSumTree::<S>::from_match_entries(entries, n, leaf_size)?;
        let corners = dominance_corners(entries, n);
        let next: Vec<MatchEntry<S>> = entries
            .iter()
            .zip(&corners)
            .filter_map(|(e, &(x_end, y_end))| {
                let sum = tree.dominance_sum(x_end, y_end);
                (!sum.is_zero()).then_some(MatchEntry { i: e.i, j: e.j, value: sum })
            })
            .collect();
        drop(tree);
        let next = MatchList::from_sorted(next);
        if keep_levels {
            levels.push(std::mem::replace(&mut current, next));
        } else {
            current = next;
        }
        *total = fold(&current);
    }
    if keep_levels && levels.len() < p && !current.is_empty() {
        levels.push(current);
    }
    Ok(GeometricRun { levels, totals })
}

pub fn geometric_ssk(s: &SymbolSeq, t: &SymbolSeq, params: KernelParams) -> Result<KernelVector> {
    geometric_ssk_with_leaf_size(s, t, params, DEFAULT_LEAF_SIZE)
}

pub fn geometric_ssk_with_leaf_size(
    s: &SymbolSeq,
    t: &SymbolSeq,
    params: KernelParams,
    leaf_size: usize,
) -> Result<KernelVector> {
    let values = if fits_native(s.len() + t.len(), params.lambda()) {
        geometric_run::<f64>(s, t, params, leaf_size, false)?
            .totals
            .into_iter()
            .map(Scalar::to_hdr)
            .collect()
    } else {
        geometric_run::<HdrScalar>(s, t, params, leaf_size, false)?.totals
    };
    Ok(KernelVector::from_values(values))
}

/// The nonempty rescaled lists `tilde L_1, tilde L_2, ...` up to level `p`.
pub fn geometric_levels(s: &SymbolSeq, t: &SymbolSeq, params: KernelParams) -> Result<Vec<MatchList>> {
    Ok(geometric_run::<HdrScalar>(s, t, params, DEFAULT_LEAF_SIZE, true)?.levels)
}

/// Approximate peak heap use of [`geometric_ssk`] for a match list of
/// `matches` entries.
pub fn estimated_peak_bytes(matches: usize, native: bool) -> usize {
    let (tree, entry) = if native {
        (
            LayeredRangeSumTree::<f64>::estimated_bytes(matches, DEFAULT_LEAF_SIZE),
            std::mem::size_of::<MatchEntry<f64>>(),
        )
    } else {
        (
            LayeredRangeSumTree::<HdrScalar>::estimated_bytes(matches, DEFAULT_LEAF_SIZE),
            std::mem::size_of::<MatchEntry<HdrScalar>>(),
        )
    };
    tree + matches * (2 * entry + 2 * std::mem::size_of::<usize>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dp::{dp_ssk, dp_tables};
    use crate::geometry::{RangeQuery2D, WeightedPoint};
    use crate::matchlist::build_match_list;
    use crate::seq::encode_pair;
    use crate::sparse::sparse_ssk;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pow(l: f64, k: i64) -> HdrScalar {
        HdrScalar::from_lambda_power(l, k)
    }

    #[test]
    fn worked_dominance_sums() {
        for &l in &[0.5, 0.37] {
            let (s, t) = encode_pair("gatta", "cata");
            let list = build_match_list(&s, &t, l);
            let points = list
                .entries()
                .iter()
                .map(|e| WeightedPoint::from_match(e.i, e.j, e.value))
                .collect();
            let tree = LayeredRangeSumTree::build_with_leaf_size(points, 1).unwrap();
            tree.check_invariants().unwrap();
            let sums: Vec<HdrScalar> = list
                .entries()
                .iter()
                .map(|e| tree.range_sum(&RangeQuery2D::dominated_by(e.i, e.j)))
                .collect();
            let z = HdrScalar::ZERO;
            let want = [z, z, pow(l, -2), pow(l, -2), z, pow(l, -5) + pow(l, -4) + pow(l, -2)];
            for (got, want) in sums.iter().zip(want) {
                assert!(got.relative_difference(want) < 1e-14, "{got} vs {want}");
            }
            let corners = dominance_corners(list.entries(), t.len());
            for (k, &(x_end, y_end)) in corners.iter().enumerate() {
                assert_eq!(tree.dominance_sum(x_end, y_end), sums[k]);
            }
        }
    }

    #[test]
    fn level_two_list() {
        let l = 0.37;
        let (s, t) = encode_pair("gatta", "cata");
        let levels = geometric_levels(&s, &t, KernelParams::new(3, l).unwrap()).unwrap();
        assert_eq!(levels.len(), 3);
        let l2 = &levels[1];
        assert_eq!(l2.pairs(), [(3, 3), (4, 3), (5, 4)]);
        assert!(l2.get(3, 3).unwrap().relative_difference(pow(l, -2)) < 1e-14);
        assert!(l2.get(4, 3).unwrap().relative_difference(pow(l, -2)) < 1e-14);
        let want = pow(l, -5) + pow(l, -4) + pow(l, -2);
        assert!(l2.get(5, 4).unwrap().relative_difference(want) < 1e-14);
        assert_eq!(levels[2].pairs(), [(5, 4)]);
    }

    #[test]
    fn running_example_levels() {
        for &l in &[0.5f64, 0.37] {
            let (s, t) = encode_pair("gatta", "cata");
            let k = geometric_ssk(&s, &t, KernelParams::new(3, l).unwrap()).unwrap();
            let want = [
                6.0 * l * l,
                2.0 * l.powi(4) + 2.0 * l.powi(5) + l.powi(7),
                2.0 * l.powi(7),
            ];
            for q in 1..=3 {
                assert!((k.level(q).to_f64() - want[q - 1]).abs() / want[q - 1] < 1e-12);
            }
        }
    }

    #[test]
    fn rescaled_values_reproduce_suffix_table() {
        let l = 0.6;
        let (s, t) = encode_pair("abracadabra", "cadabrab");
        for q in 1..=4 {
            let params = KernelParams::new(q, l).unwrap();
            let tables = dp_tables(&s, &t, params);
            let levels = geometric_levels(&s, &t, params).unwrap();
            let list = &levels[q - 1];
            for i in 1..=s.len() {
                for j in 1..=t.len() {
                    let want = tables.kps[i][j];
                    match list.get(i as u32, j as u32) {
                        Some(v) => {
                            let got = v * pow(l, (i + j) as i64);
                            assert!(got.relative_difference(want) < 1e-12, "q={q} ({i},{j})");
                        }
                        None => assert!(want.is_zero(), "q={q} ({i},{j})"),
                    }
                }
            }
        }
    }

    #[test]
    fn agrees_with_dp_and_sparse() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for case in 0..150 {
            let sigma = [2u32, 4, 26][case % 3];
            let m = rng.gen_range(0..=64);
            let n = rng.gen_range(0..=64);
            let s = SymbolSeq::new((0..m).map(|_| rng.gen_range(0..sigma)).collect(), sigma as usize).unwrap();
            let t = SymbolSeq::new((0..n).map(|_| rng.gen_range(0..sigma)).collect(), sigma as usize).unwrap();
            let params = KernelParams::new(rng.gen_range(1..=8), rng.gen_range(0.1..=1.0)).unwrap();
            let leaf = [1, 4, DEFAULT_LEAF_SIZE][case % 3];
            let got = geometric_ssk_with_leaf_size(&s, &t, params, leaf).unwrap();
            assert!(got.max_relative_difference(&dp_ssk(&s, &t, params)) < 1e-9, "case {case}");
            assert!(got.max_relative_difference(&sparse_ssk(&s, &t, params)) < 1e-9, "case {case}");
        }
    }

    #[test]
    fn wide_range_path() {
        // a + 3000 gap symbols + b against ab: K_2 = λ^(3002 + 2)
        let mut sym = vec![0u32];
        sym.extend(std::iter::repeat(2).take(3000));
        sym.push(1);
        let s = SymbolSeq::new(sym, 3).unwrap();
        let t = SymbolSeq::new(vec![0, 1], 3).unwrap();
        let k = geometric_ssk(&s, &t, KernelParams::new(2, 0.5).unwrap()).unwrap();
        assert!(k.level(2).relative_difference(pow(0.5, 3004)) < 1e-12);
    }

    proptest! {
        #[test]
        fn equals_dp(
            s in proptest::collection::vec(0u32..3, 0..40),
            t in proptest::collection::vec(0u32..3, 0..40),
            p in 1usize..7,
            lambda in 0.05f64..=1.0,
        ) {
            let s = SymbolSeq::new(s, 3).unwrap();
            let t = SymbolSeq::new(t, 3).unwrap();
            let params = KernelParams::new(p, lambda).unwrap();
            let got = geometric_ssk(&s, &t, params).unwrap();
            prop_assert!(got.max_relative_difference(&dp_ssk(&s, &t, params)) < 1e-9);
        }

        #[test]
        fn symmetric(
            s in proptest::collection::vec(0u32..4, 0..30),
            t in proptest::collection::vec(0u32..4, 0..30),
        ) {
            let s = SymbolSeq::new(s, 4).unwrap();
            let t = SymbolSeq::new(t, 4).unwrap();
            let params = KernelParams::new(4, 0.7).unwrap();
            let st = geometric_ssk(&s, &t, params).unwrap();
            let ts = geometric_ssk(&t, &s, params).unwrap();
            prop_assert!(st.max_relative_difference(&ts) < 1e-12);
        }
    }
}

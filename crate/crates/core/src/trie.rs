//! Gap-capped kernel by depth-first traversal of an implicit trie.
//!
//! Each trie node is a subsequence `u` that occurs in both strings. The node
//! keeps, per string and per gap count `g <= g_max`, the multiset of last
//! match positions of occurrences of `u` with exactly `g` gaps ("alive
//! lists"). A node at depth `q` contributes
//! `(Σ_g λ^(g+q) |A_s(u,g)|) * (Σ_g λ^(g+q) |A_t(u,g)|)` to `K_q`.
//!
//! Occurrences needing more than `g_max` gaps in either string are dropped,
//! so the result is a lower bound that becomes exact once
//! `g_max >= max(|s|,|t|) - q`.

use crate::hdr::HdrScalar;
use crate::seq::{build_occurrence_index, KernelParams, KernelVector, SymbolSeq};

/// Alive lists of one string for one subsequence: `by_gap[g]` holds
/// `(last position, multiplicity)` sorted by position.
#[derive(Clone, Debug, Default, PartialEq)]
struct Alive {
    by_gap: Vec<Vec<(u32, f64)>>,
}

impl Alive {
    fn is_empty(&self) -> bool {
        self.by_gap.iter().all(Vec::is_empty)
    }

    fn weight(&self, depth: usize, powers: &[HdrScalar]) -> HdrScalar {
        self.by_gap
            .iter()
            .enumerate()
            .map(|(g, list)| {
                let count: f64 = list.iter().map(|&(_, mult)| mult).sum();
                powers[g + depth].scale(count)
            })
            .sum()
    }

    fn root(positions: &[u32], g_max: usize) -> Self {
        let mut by_gap = vec![Vec::new(); g_max + 1];
        by_gap[0] = positions.iter().map(|&i| (i, 1.0)).collect();
        Alive { by_gap }
    }

    /// Extends every alive occurrence by one more match of a symbol whose
    /// positions are `occurrences`, keeping only results with at most
    /// `g_max` gaps.
    fn extend(&self, occurrences: &[u32], g_max: usize) -> Self {
        let mut by_gap: Vec<Vec<(u32, f64)>> = vec![Vec::new(); g_max + 1];
        for (g, list) in self.by_gap.iter().enumerate() {
            for &(last, mult) in list {
                let reach = last as usize + 1 + (g_max - g);
                let start = occurrences.partition_point(|&i| i <= last);
                for &next in occurrences[start..].iter().take_while(|&&i| i as usize <= reach) {
                    let gap = g + (next - last - 1) as usize;
                    by_gap[gap].push((next, mult));
                }
            }
        }
        for list in &mut by_gap {
            list.sort_unstable_by_key(|&(i, _)| i);
            list.dedup_by(|later, kept| {
                if later.0 == kept.0 {
                    kept.1 += later.1;
                    true
                } else {
                    false
                }
            });
        }
        Alive { by_gap }
    }

    /// Marks every symbol some alive occurrence can be extended with.
    fn extension_symbols(&self, seq: &[u32], g_max: usize, stamp: &mut [u32], epoch: u32) {
        for (g, list) in self.by_gap.iter().enumerate() {
            for &(last, _) in list {
                let from = last as usize;
                let to = (from + 1 + (g_max - g)).min(seq.len());
                for &c in &seq[from..to] {
                    stamp[c as usize] = epoch;
                }
            }
        }
    }

    fn multisets(&self) -> Vec<Vec<u32>> {
        self.by_gap
            .iter()
            .map(|list| {
                list.iter()
                    .flat_map(|&(i, mult)| std::iter::repeat(i).take(mult as usize))
                    .collect()
            })
            .collect()
    }
}

/// Alive lists of a subsequence in both strings: `s[g]` is the multiset of
/// last positions in `s` of occurrences with exactly `g` gaps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AliveLists {
    pub s: Vec<Vec<u32>>,
    pub t: Vec<Vec<u32>>,
}

struct Walker<'a> {
    s: &'a [u32],
    t: &'a [u32],
    occ_s: Vec<Vec<u32>>,
    occ_t: Vec<Vec<u32>>,
    g_max: usize,
    p: usize,
    powers: Vec<HdrScalar>,
    stamp_s: Vec<u32>,
    stamp_t: Vec<u32>,
    epoch: u32,
    totals: Vec<HdrScalar>,
}

impl Walker<'_> {
    fn visit(&mut self, depth: usize, a_s: &Alive, a_t: &Alive) {
        let contribution = a_s.weight(depth, &self.powers) * a_t.weight(depth, &self.powers);
        self.totals[depth - 1] += contribution;
        if depth == self.p {
            return;
        }
        self.epoch += 1;
        let epoch = self.epoch;
        a_s.extension_symbols(self.s, self.g_max, &mut self.stamp_s, epoch);
        a_t.extension_symbols(self.t, self.g_max, &mut self.stamp_t, epoch);
        let candidates: Vec<usize> = (0..self.stamp_s.len())
            .filter(|&c| self.stamp_s[c] == epoch && self.stamp_t[c] == epoch)
            .collect();
        for c in candidates {
            let next_s = a_s.extend(&self.occ_s[c], self.g_max);
            if next_s.is_empty() {
                continue;
            }
            let next_t = a_t.extend(&self.occ_t[c], self.g_max);
            if next_t.is_empty() {
                continue;
            }
            self.visit(depth + 1, &next_s, &next_t);
        }
    }
}

/// Kernel restricted to occurrences with at most `g_max` gaps in each string.
pub fn trie_ssk(s: &SymbolSeq, t: &SymbolSeq, params: KernelParams, g_max: usize) -> KernelVector {
    let alphabet = s.alphabet_size().max(t.alphabet_size());
    let p = params.p();
    let mut walker = Walker {
        s: s.symbols(),
        t: t.symbols(),
        occ_s: build_occurrence_index(s, alphabet),
        occ_t: build_occurrence_index(t, alphabet),
        g_max,
        p,
        powers: (0..=(g_max + p) as i64)
            .map(|k| HdrScalar::from_lambda_power(params.lambda(), k))
            .collect(),
        stamp_s: vec![0; alphabet],
        stamp_t: vec![0; alphabet],
        epoch: 0,
        totals: vec![HdrScalar::ZERO; p],
    };
    for c in 0..alphabet {
        if walker.occ_s[c].is_empty() || walker.occ_t[c].is_empty() {
            continue;
        }
        let a_s = Alive::root(&walker.occ_s[c], g_max);
        let a_t = Alive::root(&walker.occ_t[c], g_max);
        walker.visit(1, &a_s, &a_t);
    }
    KernelVector::from_values(walker.totals)
}

/// The alive lists of `u` in `s` and `t` for gap counts `0..=g_max`.
pub fn alive_lists_snapshot(s: &SymbolSeq, t: &SymbolSeq, u: &[u32], g_max: usize) -> AliveLists {
    assert!(!u.is_empty(), "alive lists need a nonempty subsequence");
    let alphabet = s
        .alphabet_size()
        .max(t.alphabet_size())
        .max(u.iter().map(|&c| c as usize + 1).max().unwrap_or(0));
    let lists = |seq: &SymbolSeq| {
        let occ = build_occurrence_index(seq, alphabet);
        let mut alive = Alive::root(&occ[u[0] as usize], g_max);
        for &c in &u[1..] {
            alive = alive.extend(&occ[c as usize], g_max);
        }
        alive.multisets()
    };
    AliveLists {
        s: lists(s),
        t: lists(t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dp::dp_ssk;
    use crate::seq::encode_texts;
    use crate::seq::TokenMode;

    fn params(p: usize, lambda: f64) -> KernelParams {
        KernelParams::new(p, lambda).unwrap()
    }

    struct Example {
        s: SymbolSeq,
        t: SymbolSeq,
        code: Box<dyn Fn(&str) -> Vec<u32>>,
    }

    fn gatta_cata() -> Example {
        let (alphabet, mut seqs) = encode_texts(&["gatta", "cata"], TokenMode::Character);
        let t = seqs.pop().unwrap();
        let s = seqs.pop().unwrap();
        Example {
            s,
            t,
            code: Box::new(move |w| w.chars().map(|c| alphabet.id(&c.to_string()).unwrap()).collect()),
        }
    }

    fn rel(a: HdrScalar, b: f64) -> f64 {
        (a.to_f64() - b).abs() / b
    }

    #[test]
    fn level_one_is_gap_independent() {
        let ex = gatta_cata();
        for g_max in 0..4 {
            let k = trie_ssk(&ex.s, &ex.t, params(1, 0.37), g_max);
            assert!(rel(k.level(1), 6.0 * 0.37 * 0.37) < 1e-12);
        }
    }

    #[test]
    fn running_example_levels() {
        let l: f64 = 0.5;
        let ex = gatta_cata();
        let k = trie_ssk(&ex.s, &ex.t, params(3, l), 3);
        assert!(rel(k.level(2), 2.0 * l.powi(4) + 2.0 * l.powi(5) + l.powi(7)) < 1e-12);
        assert!(rel(k.level(3), 2.0 * l.powi(7)) < 1e-12);
    }

    #[test]
    fn contiguous_only() {
        let l: f64 = 0.37;
        let ex = gatta_cata();
        let k = trie_ssk(&ex.s, &ex.t, params(2, l), 0);
        assert!(rel(k.level(2), 2.0 * l.powi(4)) < 1e-12);
    }

    #[test]
    fn alive_list_table() {
        let ex = gatta_cata();
        let a = alive_lists_snapshot(&ex.s, &ex.t, &(ex.code)("a"), 3);
        assert_eq!(a.s, vec![vec![2, 5], vec![], vec![], vec![]]);
        assert_eq!(a.t, vec![vec![2, 4], vec![], vec![], vec![]]);
        let ata = alive_lists_snapshot(&ex.s, &ex.t, &(ex.code)("ata"), 3);
        assert_eq!(ata.s, vec![vec![], vec![5, 5], vec![], vec![]]);
        assert_eq!(ata.t, vec![vec![4], vec![], vec![], vec![]]);
        let aa = alive_lists_snapshot(&ex.s, &ex.t, &(ex.code)("aa"), 3);
        assert_eq!(aa.s[2], vec![5]);
        assert_eq!(aa.t[1], vec![4]);
        let at = alive_lists_snapshot(&ex.s, &ex.t, &(ex.code)("at"), 3);
        assert_eq!(at.s[..2], [vec![3], vec![4]]);
        let ta = alive_lists_snapshot(&ex.s, &ex.t, &(ex.code)("ta"), 3);
        assert_eq!(ta.s[..2], [vec![5], vec![5]]);
        assert_eq!(ta.t[0], vec![4]);
    }

    #[test]
    fn absent_subsequence_has_empty_lists() {
        let ex = gatta_cata();
        let gc = alive_lists_snapshot(&ex.s, &ex.t, &(ex.code)("ag"), 3);
        assert!(gc.s.iter().all(Vec::is_empty));
        let c = alive_lists_snapshot(&ex.s, &ex.t, &(ex.code)("c"), 2);
        assert!(c.s.iter().all(Vec::is_empty));
        assert_eq!(c.t[0], vec![1]);
    }

    #[test]
    fn converges_to_dp() {
        let ex = gatta_cata();
        let par = params(4, 0.7);
        let exact = dp_ssk(&ex.s, &ex.t, par);
        let mut previous = KernelVector::zeros(4);
        for g_max in 0..6 {
            let k = trie_ssk(&ex.s, &ex.t, par, g_max);
            for q in 1..=4 {
                assert!(k.level(q) >= previous.level(q));
                if g_max + q >= 5 {
                    assert!(k.level(q).relative_difference(exact.level(q)) < 1e-12);
                }
            }
            previous = k;
        }
    }
}

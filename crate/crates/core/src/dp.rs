//! Exact kernel by dynamic programming over prefix pairs.
//!
//! For each level `q >= 2` the accumulator
//! `DP_q(k,l) = Σ_{i<=k, j<=l} λ^(k-i+l-j) K_{q-1}^S(i,j)` obeys
//!
//! ```text
//! DP_q(k,l) = K_{q-1}^S(k,l) + λ DP_q(k-1,l) + λ DP_q(k,l-1) - λ² DP_q(k-1,l-1)
//! ```
//!
//! and the suffix kernel follows as `K_q^S(k,l) = [s_k = t_l] λ² DP_q(k-1,l-1)`.
//! [`dp_ssk`] keeps two rows per level; [`dp_tables`] keeps everything.

use crate::hdr::{fits_native, HdrScalar, Scalar};
use crate::seq::{KernelParams, KernelVector, SymbolSeq};

/// Suffix-kernel and accumulator tables at one level, indexed `[i][j]` with
/// row and column 0 as the empty-prefix boundary.
#[derive(Clone, Debug)]
pub struct DpTables {
    pub kps: Vec<Vec<HdrScalar>>,
    pub dp: Vec<Vec<HdrScalar>>,
}

pub fn dp_ssk(s: &SymbolSeq, t: &SymbolSeq, params: KernelParams) -> KernelVector {
    let values = if fits_native(s.len() + t.len(), params.lambda()) {
        dp_levels::<f64>(s, t, params)
    } else {
        dp_levels::<HdrScalar>(s, t, params)
    };
    KernelVector::from_values(values)
}

fn clamp_nonnegative<S: Scalar>(x: S) -> S {
    if x < S::zero() {
        S::zero()
    } else {
        x
    }
}

fn dp_levels<S: Scalar>(s: &SymbolSeq, t: &SymbolSeq, params: KernelParams) -> Vec<HdrScalar> {
    let p = params.p();
    let lambda = params.lambda();
    let (m, n) = (s.len(), t.len());
    let mut totals = vec![S::zero(); p];
    if m == 0 || n == 0 {
        return totals.iter().map(|v| v.to_hdr()).collect();
    }
    let lambda2 = S::lambda_power(lambda, 2);
    let width = n + 1;
    // kps[q-1][j]: K_q^S(i, j) for the current row i.
    let mut kps = vec![S::zero(); p * width];
    // dp rows for levels 2..=p; slot q-2.
    let mut dp_prev = vec![S::zero(); p.saturating_sub(1) * width];
    let mut dp_cur = dp_prev.clone();
    let tsym = t.symbols();

    for &si in s.symbols() {
        for (j, &tj) in tsym.iter().enumerate() {
            kps[j + 1] = if si == tj { lambda2 } else { S::zero() };
        }
        for q in 2..=p {
            let prev = &dp_prev[(q - 2) * width..(q - 1) * width];
            let row = &mut kps[(q - 1) * width..q * width];
            for (j, &tj) in tsym.iter().enumerate() {
                row[j + 1] = if si == tj {
                    prev[j] * lambda2
                } else {
                    S::zero()
                };
            }
        }
        for (q, total) in totals.iter_mut().enumerate() {
            let row = &kps[q * width..(q + 1) * width];
            for &v in &row[1..] {
                *total += v;
            }
        }
        for q in 2..=p {
            let below = &kps[(q - 2) * width..(q - 1) * width];
            let prev = &dp_prev[(q - 2) * width..(q - 1) * width];
            let cur = &mut dp_cur[(q - 2) * width..(q - 1) * width];
            cur[0] = S::zero();
            for j in 1..=n {
                let v = below[j] + (prev[j] + cur[j - 1]).scale(lambda) - prev[j - 1] * lambda2;
                cur[j] = clamp_nonnegative(v);
            }
        }
        std::mem::swap(&mut dp_prev, &mut dp_cur);
    }
    totals.iter().map(|v| v.to_hdr()).collect()
}

/// Full `KPS_p` and `DP_p` tables, filled in place level by level.
///
/// Meant for small inputs. For `p = 1` the accumulator is not defined and
/// the returned `dp` table is all zeros.
pub fn dp_tables(s: &SymbolSeq, t: &SymbolSeq, params: KernelParams) -> DpTables {
    let (m, n) = (s.len(), t.len());
    let lambda = HdrScalar::from_f64(params.lambda());
    let lambda2 = lambda * lambda;
    let mut kps = vec![vec![HdrScalar::ZERO; n + 1]; m + 1];
    let mut dp = vec![vec![HdrScalar::ZERO; n + 1]; m + 1];
    for i in 1..=m {
        for j in 1..=n {
            if s.at(i) == t.at(j) {
                kps[i][j] = lambda2;
            }
        }
    }
    for _ in 2..=params.p() {
        for i in 1..=m {
            for j in 1..=n {
                let v = kps[i][j] + lambda * dp[i - 1][j] + lambda * dp[i][j - 1]
                    - lambda2 * dp[i - 1][j - 1];
                dp[i][j] = clamp_nonnegative(v);
                if s.at(i) == t.at(j) {
                    kps[i][j] = lambda2 * dp[i - 1][j - 1];
                }
            }
        }
    }
    DpTables { kps, dp }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_force_ssk;
    use crate::seq::encode_pair;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(p: usize, lambda: f64) -> KernelParams {
        KernelParams::new(p, lambda).unwrap()
    }

    fn rel(a: HdrScalar, b: f64) -> f64 {
        (a.to_f64() - b).abs() / b.abs()
    }

    #[test]
    fn running_example() {
        for &l in &[0.5f64, 0.37] {
            let (s, t) = encode_pair("gatta", "cata");
            let k = dp_ssk(&s, &t, params(3, l));
            assert!(rel(k.level(1), 6.0 * l * l) < 1e-12);
            assert!(rel(k.level(2), 2.0 * l.powi(4) + 2.0 * l.powi(5) + l.powi(7)) < 1e-12);
            assert!(rel(k.level(3), 2.0 * l.powi(7)) < 1e-12);
        }
    }

    #[test]
    fn table_entries_of_running_example() {
        let l: f64 = 0.37;
        let (s, t) = encode_pair("gatta", "cata");
        let tables = dp_tables(&s, &t, params(2, l));
        assert!(rel(tables.kps[3][3], l.powi(4)) < 1e-12);
        assert!(rel(tables.kps[4][3], l.powi(5)) < 1e-12);
        assert!(rel(tables.kps[5][4], l.powi(4) + l.powi(5) + l.powi(7)) < 1e-12);
        assert!(rel(tables.dp[3][3], l.powi(2) + l.powi(4)) < 1e-12);
        assert!(tables.kps[1][1].is_zero());
        assert!(tables.dp[0].iter().all(|v| v.is_zero()));
        assert!(tables.dp.iter().all(|row| row[0].is_zero()));
    }

    #[test]
    fn no_common_symbol_gives_zeros() {
        let (s, t) = encode_pair("abcab", "xyzzy");
        assert!(dp_ssk(&s, &t, params(4, 0.5)).values().iter().all(|v| v.is_zero()));
        let (s, t) = encode_pair("", "abc");
        assert!(dp_ssk(&s, &t, params(2, 0.5)).values().iter().all(|v| v.is_zero()));
    }

    #[test]
    fn suffix_and_level_sum_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let m = rng.gen_range(1..10);
            let n = rng.gen_range(1..10);
            let s = SymbolSeq::new((0..m).map(|_| rng.gen_range(0..3)).collect(), 3).unwrap();
            let t = SymbolSeq::new((0..n).map(|_| rng.gen_range(0..3)).collect(), 3).unwrap();
            for p in 1..=4 {
                let par = params(p, 0.6);
                let tables = dp_tables(&s, &t, par);
                let level_sum: HdrScalar = tables.kps.iter().flatten().copied().sum();
                let k = dp_ssk(&s, &t, par);
                assert!(level_sum.relative_difference(k.level(p)) < 1e-12);
                if p >= 2 {
                    let l2 = HdrScalar::from_f64(0.36);
                    for i in 1..=m {
                        for j in 1..=n {
                            let want = if s.at(i) == t.at(j) {
                                l2 * tables.dp[i - 1][j - 1]
                            } else {
                                HdrScalar::ZERO
                            };
                            assert!(tables.kps[i][j].relative_difference(want) < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for case in 0..200 {
            let sigma = [2, 4, 26][case % 3];
            let m = rng.gen_range(0..=12);
            let n = rng.gen_range(0..=12);
            let s = SymbolSeq::new((0..m).map(|_| rng.gen_range(0..sigma)).collect(), sigma as usize).unwrap();
            let t = SymbolSeq::new((0..n).map(|_| rng.gen_range(0..sigma)).collect(), sigma as usize).unwrap();
            let par = params(rng.gen_range(1..=4), rng.gen_range(0.05..=1.0));
            let want = brute_force_ssk(&s, &t, par).unwrap();
            let got = dp_ssk(&s, &t, par);
            assert!(got.max_relative_difference(&want) < 1e-9, "case {case}");
        }
    }

    #[test]
    fn long_strings_use_wide_range() {
        // a + 3000 gap symbols + b against ab: K_2 = λ^(3002 + 2)
        let mut sym = vec![0u32];
        sym.extend(std::iter::repeat(2).take(3000));
        sym.push(1);
        let s = SymbolSeq::new(sym, 3).unwrap();
        let t = SymbolSeq::new(vec![0, 1], 3).unwrap();
        let k = dp_ssk(&s, &t, params(2, 0.5));
        let want = HdrScalar::from_lambda_power(0.5, 3004);
        assert!(k.level(2).relative_difference(want) < 1e-12);
        assert!(k.level(2).to_f64() == 0.0, "value is below f64 range");
    }
}

//! Brute-force reference computations and kernel normalisation.
//!
//! These enumerate index tuples directly from the definition of the kernel
//! and are exponential in the string length, so inputs are capped.

use std::collections::BTreeMap;

use crate::error::{Result, SskError};
use crate::hdr::HdrScalar;
use crate::seq::{KernelParams, KernelVector, SymbolSeq};

/// Longest string the enumeration oracles accept by default.
pub const ORACLE_CAP: usize = 14;

/// Largest feature-space dimension `|Σ|^p` the explicit map accepts by default.
pub const FEATURE_SPACE_CAP: usize = 1 << 24;

/// One increasing index tuple: the subsequence it spells and its span `l(I)`.
struct Occurrence {
    symbols: Vec<u32>,
    span: u32,
}

fn check_cap(seq: &SymbolSeq, cap: usize) -> Result<()> {
    if seq.len() > cap {
        return Err(SskError::OracleCapExceeded { len: seq.len(), cap });
    }
    Ok(())
}

/// Every increasing `q`-tuple of positions, optionally forced to end at `|s|`.
fn occurrences(seq: &SymbolSeq, q: usize, suffix_only: bool) -> Vec<Occurrence> {
    let n = seq.len();
    if q == 0 || q > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != q {
            continue;
        }
        if suffix_only && mask & (1 << (n - 1)) == 0 {
            continue;
        }
        let first = mask.trailing_zeros();
        let last = 31 - mask.leading_zeros();
        let symbols = (0..n)
            .filter(|&k| mask & (1 << k) != 0)
            .map(|k| seq.symbols()[k])
            .collect();
        out.push(Occurrence {
            symbols,
            span: last - first + 1,
        });
    }
    out
}

fn pair_sum(a: &[Occurrence], b: &[Occurrence], lambda: f64) -> HdrScalar {
    let mut total = HdrScalar::ZERO;
    for x in a {
        for y in b {
            if x.symbols == y.symbols {
                total += HdrScalar::from_lambda_power(lambda, (x.span + y.span) as i64);
            }
        }
    }
    total
}

/// `K_q(s,t) = Σ_u Σ_{I: u=s(I)} Σ_{J: u=t(J)} λ^(l(I)+l(J))` for `q = 1..=p`.
pub fn brute_force_ssk(s: &SymbolSeq, t: &SymbolSeq, params: KernelParams) -> Result<KernelVector> {
    brute_force_ssk_capped(s, t, params, ORACLE_CAP)
}

pub fn brute_force_ssk_capped(
    s: &SymbolSeq,
    t: &SymbolSeq,
    params: KernelParams,
    cap: usize,
) -> Result<KernelVector> {
    check_cap(s, cap)?;
    check_cap(t, cap)?;
    let values = (1..=params.p())
        .map(|q| {
            pair_sum(
                &occurrences(s, q, false),
                &occurrences(t, q, false),
                params.lambda(),
            )
        })
        .collect();
    Ok(KernelVector::from_values(values))
}

/// The suffix kernel `K_p^S(s,t)`: only tuples ending at the last position
/// of both strings contribute.
pub fn brute_force_suffix(s: &SymbolSeq, t: &SymbolSeq, params: KernelParams) -> Result<HdrScalar> {
    check_cap(s, ORACLE_CAP)?;
    check_cap(t, ORACLE_CAP)?;
    Ok(pair_sum(
        &occurrences(s, params.p(), true),
        &occurrences(t, params.p(), true),
        params.lambda(),
    ))
}

/// Nonzero coordinates `φ_u^p(s) = Σ_{I: u=s(I)} λ^l(I)` of the feature map.
pub fn explicit_feature_map(
    s: &SymbolSeq,
    params: KernelParams,
) -> Result<BTreeMap<Vec<u32>, HdrScalar>> {
    let dimension = (s.alphabet_size() as f64).powi(params.p() as i32);
    if dimension > FEATURE_SPACE_CAP as f64 {
        return Err(SskError::FeatureSpaceTooLarge {
            dimension,
            cap: FEATURE_SPACE_CAP,
        });
    }
    check_cap(s, ORACLE_CAP)?;
    let mut map = BTreeMap::new();
    for occ in occurrences(s, params.p(), false) {
        *map.entry(occ.symbols).or_insert(HdrScalar::ZERO) +=
            HdrScalar::from_lambda_power(params.lambda(), occ.span as i64);
    }
    Ok(map)
}

/// Inner product of two sparse feature maps.
pub fn feature_inner_product(
    a: &BTreeMap<Vec<u32>, HdrScalar>,
    b: &BTreeMap<Vec<u32>, HdrScalar>,
) -> HdrScalar {
    a.iter()
        .filter_map(|(u, x)| b.get(u).map(|y| *x * *y))
        .sum()
}

/// `K(s,t) / sqrt(K(s,s) K(t,t))`, computed in the log domain.
pub fn normalize(k_st: HdrScalar, k_ss: HdrScalar, k_tt: HdrScalar) -> Result<f64> {
    if k_ss.is_zero() || k_tt.is_zero() {
        return Err(SskError::ZeroSelfKernel);
    }
    if k_st.is_zero() {
        return Ok(0.0);
    }
    Ok((k_st.ln() - 0.5 * (k_ss.ln() + k_tt.ln())).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::{encode_pair, encode_texts, TokenMode};

    fn params(p: usize, lambda: f64) -> KernelParams {
        KernelParams::new(p, lambda).unwrap()
    }

    fn close(a: HdrScalar, b: f64) -> bool {
        (a.to_f64() - b).abs() <= 1e-12 * b.abs().max(1e-300)
    }

    #[test]
    fn bar_bat() {
        let l: f64 = 0.5;
        let (s, t) = encode_pair("bar", "bat");
        let k = brute_force_ssk(&s, &t, params(2, l)).unwrap();
        assert!(close(k.level(2), l.powi(4)));
        assert!(brute_force_suffix(&s, &t, params(2, l)).unwrap().is_zero());
    }

    #[test]
    fn suffix_kernel_examples() {
        let l: f64 = 0.37;
        let (s, t) = encode_pair("bat", "cat");
        assert!(close(brute_force_suffix(&s, &t, params(2, l)).unwrap(), l.powi(4)));
        let (s, t) = encode_pair("a", "a");
        assert!(close(brute_force_suffix(&s, &t, params(1, l)).unwrap(), l * l));
    }

    #[test]
    fn running_example_all_levels() {
        for &l in &[0.5f64, 0.37] {
            let (s, t) = encode_pair("gatta", "cata");
            let k = brute_force_ssk(&s, &t, params(3, l)).unwrap();
            assert!(close(k.level(1), 6.0 * l.powi(2)));
            assert!(close(k.level(2), 2.0 * l.powi(4) + 2.0 * l.powi(5) + l.powi(7)));
            assert!(close(k.level(3), 2.0 * l.powi(7)));
        }
        let (s, t) = encode_pair("gatta", "cata");
        let k = brute_force_ssk(&s, &t, params(3, 0.5)).unwrap();
        assert_eq!(k.to_f64(), [1.5, 0.1953125, 0.015625]);
    }

    #[test]
    fn no_common_symbol() {
        let (s, t) = encode_pair("a", "b");
        let k = brute_force_ssk(&s, &t, params(1, 0.5)).unwrap();
        assert!(k.level(1).is_zero());
    }

    #[test]
    fn cap_is_enforced() {
        let (s, t) = encode_pair("abcdefghijklmno", "ab");
        assert!(matches!(
            brute_force_ssk(&s, &t, params(2, 0.5)),
            Err(SskError::OracleCapExceeded { len: 15, cap: 14 })
        ));
    }

    #[test]
    fn feature_map_rows() {
        let l: f64 = 0.5;
        let (alphabet, seqs) = encode_texts(&["bar", "bat", "car", "cat"], TokenMode::Character);
        let code = |w: &str| {
            w.chars()
                .map(|c| alphabet.id(&c.to_string()).unwrap())
                .collect::<Vec<_>>()
        };
        let bar = explicit_feature_map(&seqs[0], params(2, l)).unwrap();
        assert_eq!(bar.len(), 3);
        assert!(close(bar[&code("ar")], l * l));
        assert!(close(bar[&code("ba")], l * l));
        assert!(close(bar[&code("br")], l.powi(3)));
        let cat = explicit_feature_map(&seqs[3], params(2, l)).unwrap();
        assert!(close(cat[&code("at")], l * l));
        assert!(close(cat[&code("ca")], l * l));
        assert!(close(cat[&code("ct")], l.powi(3)));
        let bat = explicit_feature_map(&seqs[1], params(2, l)).unwrap();
        assert!(close(feature_inner_product(&bar, &bat), l.powi(4)));
    }

    #[test]
    fn feature_map_shorter_than_p_is_empty() {
        let (_, seqs) = encode_texts(&["a"], TokenMode::Character);
        assert!(explicit_feature_map(&seqs[0], params(2, 0.5)).unwrap().is_empty());
    }

    #[test]
    fn feature_space_cap() {
        let s = SymbolSeq::new(vec![0, 1], 1000).unwrap();
        assert!(matches!(
            explicit_feature_map(&s, params(3, 0.5)),
            Err(SskError::FeatureSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn normalisation() {
        for &l in &[0.5f64, 0.37] {
            let (s, t) = encode_pair("bar", "bat");
            let p = params(2, l);
            let k_st = brute_force_ssk(&s, &t, p).unwrap().level(2);
            let k_ss = brute_force_ssk(&s, &s, p).unwrap().level(2);
            let k_tt = brute_force_ssk(&t, &t, p).unwrap().level(2);
            let n = normalize(k_st, k_ss, k_tt).unwrap();
            assert!((n - 1.0 / (2.0 + l * l)).abs() < 1e-12);
        }
        let x = HdrScalar::from_f64(0.3);
        assert!((normalize(x, x, x).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(normalize(x, HdrScalar::ZERO, x), Err(SskError::ZeroSelfKernel));
    }
}

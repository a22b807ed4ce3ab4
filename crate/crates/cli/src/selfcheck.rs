//! Fixed worked examples with known closed-form kernel values.

use ssk_core::{
    encode_pair, geometric_levels, normalize, sparse_levels, Algorithm, HdrScalar, KernelParams, KernelVector,
};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &str, deviation: f64, tolerance: f64) -> CheckOutcome {
    CheckOutcome {
        name: name.to_string(),
        passed: deviation <= tolerance,
        detail: format!("max relative deviation {deviation:.2e}"),
    }
}

fn pow(lambda: f64, k: i64) -> HdrScalar {
    HdrScalar::from_lambda_power(lambda, k)
}

/// `K_1..K_3` of gatta/cata: `6λ²`, `2λ⁴ + 2λ⁵ + λ⁷`, `2λ⁷`.
pub fn running_example_expected(lambda: f64) -> KernelVector {
    KernelVector::from_values(vec![
        pow(lambda, 2).scale(6.0),
        pow(lambda, 4).scale(2.0) + pow(lambda, 5).scale(2.0) + pow(lambda, 7),
        pow(lambda, 7).scale(2.0),
    ])
}

pub fn selfcheck() -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let tol = 1e-12;
    for lambda in [0.5, 0.37] {
        let (s, t) = encode_pair("gatta", "cata");
        let params = KernelParams::new(3, lambda).unwrap();
        let want = running_example_expected(lambda);
        for algorithm in [Algorithm::Brute, Algorithm::Dp, Algorithm::Sparse, Algorithm::Geometric] {
            let name = format!("gatta/cata {algorithm} lambda={lambda}");
            out.push(match algorithm.compute(&s, &t, params) {
                Ok(got) => outcome(&name, got.max_relative_difference(&want), tol),
                Err(e) => CheckOutcome {
                    name,
                    passed: false,
                    detail: e.to_string(),
                },
            });
        }

        let (s, t) = encode_pair("bar", "bat");
        let params = KernelParams::new(2, lambda).unwrap();
        let k = |a: &ssk_core::SymbolSeq, b: &ssk_core::SymbolSeq| Algorithm::Dp.compute(a, b, params).unwrap().level(2);
        let k_st = k(&s, &t);
        let normalized = normalize(k_st, k(&s, &s), k(&t, &t)).unwrap_or(f64::NAN);
        let dev = k_st
            .relative_difference(pow(lambda, 4))
            .max((normalized - 1.0 / (2.0 + lambda * lambda)).abs());
        out.push(outcome(&format!("bar/bat lambda={lambda}"), dev, tol));
    }

    let (s, t) = encode_pair("gatta", "cata");
    let params = KernelParams::new(2, 0.5).unwrap();
    let sparse = sparse_levels(&s, &t, params);
    let lists_ok = sparse.len() == 2
        && sparse[0].row(2) == [(2, pow(0.5, 7)), (4, pow(0.5, 5))]
        && sparse[0].row(5) == [(2, pow(0.5, 4)), (4, pow(0.5, 2))]
        && sparse[1].row(5) == [(4, pow(0.5, 7) + pow(0.5, 5) + pow(0.5, 4))];
    out.push(CheckOutcome {
        name: "sparse worked lists".into(),
        passed: lists_ok,
        detail: String::new(),
    });

    let geometric = geometric_levels(&s, &t, params).unwrap_or_default();
    let tilde_ok = geometric.len() == 2
        && geometric[1].pairs() == [(3, 3), (4, 3), (5, 4)]
        && geometric[1].get(5, 4) == Some(pow(0.5, -5) + pow(0.5, -4) + pow(0.5, -2));
    out.push(CheckOutcome {
        name: "geometric level-2 list".into(),
        passed: tilde_ok,
        detail: String::new(),
    });
    out
}

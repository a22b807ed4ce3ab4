//! String subsequence kernels.
//!
//! `K_p(s,t)` sums `λ^(l(I)+l(J))` over all pairs of index tuples spelling
//! the same length-`p` subsequence, where `l` is the span of the tuple.
//! Every algorithm here returns the whole vector `K_1..K_p`.
//!
//! * [`dp_ssk`]: quadratic dynamic programme, `O(p |s| |t|)`.
//! * [`trie_ssk`]: gap-capped approximation by trie traversal.
//! * [`sparse_ssk`]: sparse DP over the match list with a range-sum tree,
//!   `O(p |L| log |t|)`.
//! * [`geometric_ssk`]: dominance sums on a layered range sum tree,
//!   `O(p |L| log |L|)`.
//! * [`brute_force_ssk`]: enumeration, for testing.
//!
//! Values are returned as [`HdrScalar`], which keeps a separate exponent so
//! that `λ^k` for very long strings neither underflows nor overflows.

pub mod dp;
pub mod error;
pub mod geometric;
pub mod geometry;
pub mod hdr;
pub mod matchlist;
pub mod oracle;
pub mod seq;
pub mod sparse;
pub mod trie;

use std::fmt;
use std::str::FromStr;

pub use dp::{dp_ssk, dp_tables, DpTables};
pub use error::{Result, SskError};
pub use geometric::{geometric_levels, geometric_ssk, geometric_ssk_with_leaf_size};
pub use geometry::{CompositeKey, LayeredRangeSumTree, QueryTrace, RangeQuery2D, Tiebreak, WeightedPoint};
pub use hdr::{fits_native, HdrScalar, PackedHdr, Scalar};
pub use matchlist::{build_match_list, match_count, MatchEntry, MatchList};
pub use oracle::{brute_force_ssk, brute_force_suffix, explicit_feature_map, feature_inner_product, normalize};
pub use seq::{
    build_occurrence_index, encode_pair, encode_texts, tokenize, Alphabet, KernelParams, KernelVector, SymbolSeq,
    TokenMode,
};
pub use sparse::{sparse_levels, sparse_ssk, LevelMatchLists, RangeSumTree};
pub use trie::{alive_lists_snapshot, trie_ssk, AliveLists};

/// Gap cap used for the trie algorithm when none is given.
pub const DEFAULT_GAP_CAP: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Brute,
    Dp,
    Trie { g_max: usize },
    Sparse,
    Geometric,
}

impl Algorithm {
    /// The exact algorithms, fastest-to-write first.
    pub const EXACT: [Algorithm; 3] = [Algorithm::Dp, Algorithm::Sparse, Algorithm::Geometric];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Brute => "brute",
            Algorithm::Dp => "dp",
            Algorithm::Trie { .. } => "trie",
            Algorithm::Sparse => "sparse",
            Algorithm::Geometric => "geometric",
        }
    }

    /// Whether the result equals the kernel for every input.
    pub fn is_exact(&self) -> bool {
        !matches!(self, Algorithm::Trie { .. })
    }

    pub fn compute(&self, s: &SymbolSeq, t: &SymbolSeq, params: KernelParams) -> Result<KernelVector> {
        match *self {
            Algorithm::Brute => brute_force_ssk(s, t, params),
            Algorithm::Dp => Ok(dp_ssk(s, t, params)),
            Algorithm::Trie { g_max } => Ok(trie_ssk(s, t, params, g_max)),
            Algorithm::Sparse => Ok(sparse_ssk(s, t, params)),
            Algorithm::Geometric => geometric_ssk(s, t, params),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    /// Accepts `brute`, `dp`, `sparse`, `geometric`, `trie` and `trie:G`.
    fn from_str(text: &str) -> std::result::Result<Self, String> {
        let lower = text.trim().to_ascii_lowercase();
        match lower.as_str() {
            "brute" => Ok(Algorithm::Brute),
            "dp" => Ok(Algorithm::Dp),
            "sparse" => Ok(Algorithm::Sparse),
            "geometric" | "lrst" => Ok(Algorithm::Geometric),
            "trie" => Ok(Algorithm::Trie {
                g_max: DEFAULT_GAP_CAP,
            }),
            other => match other.strip_prefix("trie:") {
                Some(g) => g
                    .parse()
                    .map(|g_max| Algorithm::Trie { g_max })
                    .map_err(|_| format!("bad gap cap in {text:?}")),
                None => Err(format!("unknown algorithm {text:?}")),
            },
        }
    }
}

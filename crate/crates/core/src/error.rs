use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SskError {
    #[error("symbol id {symbol} out of range for alphabet of size {alphabet_size}")]
    SymbolOutOfRange { symbol: u32, alphabet_size: usize },
    #[error("subsequence length p must be at least 1")]
    InvalidLength,
    #[error("decay penalty lambda must lie in (0, 1], got {0}")]
    InvalidLambda(f64),
    #[error("input of length {len} exceeds the brute-force cap of {cap}")]
    OracleCapExceeded { len: usize, cap: usize },
    #[error("feature space of {dimension} coordinates exceeds the cap of {cap}")]
    FeatureSpaceTooLarge { dimension: f64, cap: usize },
    #[error("normalisation needs nonzero self-kernels")]
    ZeroSelfKernel,
    #[error("key {key} outside range-sum tree capacity {capacity}")]
    KeyOutOfRange { key: usize, capacity: usize },
    #[error("point keys must be finite composite numbers")]
    SentinelKey,
    #[error("duplicate composite key in point set")]
    DuplicateKey,
    #[error("weight exponent exceeds the packed storage range")]
    WeightRange,
    #[error("negative weight in range sum tree")]
    NegativeWeight,
}

pub type Result<T> = std::result::Result<T, SskError>;

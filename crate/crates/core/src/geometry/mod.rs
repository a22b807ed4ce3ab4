//! Orthogonal range aggregation over 2-D point sets.

mod composite;
mod lrst;

pub use composite::{CompositeKey, RangeQuery2D, Tiebreak, WeightedPoint};
pub use lrst::{LayeredRangeSumTree, QueryTrace, DEFAULT_LEAF_SIZE};

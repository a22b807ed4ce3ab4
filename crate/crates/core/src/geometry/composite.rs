use std::cmp::Ordering;

/// Second component of a composite key. Variant order gives
/// `NegInf < Finite(_) < PosInf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tiebreak {
    NegInf,
    Finite(i64),
    PosInf,
}

/// Lexicographic pair `(primary | tiebreak)`; makes all point coordinates
/// distinct while keeping the order of the primary coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CompositeKey {
    pub primary: i64,
    pub tiebreak: Tiebreak,
}

impl CompositeKey {
    pub fn new(primary: i64, tiebreak: i64) -> Self {
        CompositeKey {
            primary,
            tiebreak: Tiebreak::Finite(tiebreak),
        }
    }

    /// `(primary | -inf)`, below every finite key with this primary.
    pub fn lower(primary: i64) -> Self {
        CompositeKey {
            primary,
            tiebreak: Tiebreak::NegInf,
        }
    }

    /// `(primary | +inf)`, above every finite key with this primary.
    pub fn upper(primary: i64) -> Self {
        CompositeKey {
            primary,
            tiebreak: Tiebreak::PosInf,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.tiebreak, Tiebreak::Finite(_))
    }

    pub(crate) fn as_pair(&self) -> Option<(i64, i64)> {
        match self.tiebreak {
            Tiebreak::Finite(b) => Some((self.primary, b)),
            _ => None,
        }
    }

    /// Compares a stored finite pair against this key.
    pub(crate) fn cmp_pair(pair: (i64, i64), key: &CompositeKey) -> Ordering {
        CompositeKey::new(pair.0, pair.1).cmp(key)
    }
}

/// A weighted point with composite coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedPoint<S> {
    pub x: CompositeKey,
    pub y: CompositeKey,
    pub weight: S,
}

impl<S> WeightedPoint<S> {
    /// The point of match `(i, j)`: `x = (i | j)`, `y = (j | i)`.
    pub fn from_match(i: u32, j: u32, weight: S) -> Self {
        WeightedPoint {
            x: CompositeKey::new(i as i64, j as i64),
            y: CompositeKey::new(j as i64, i as i64),
            weight,
        }
    }

    pub fn new(x: CompositeKey, y: CompositeKey, weight: S) -> Self {
        WeightedPoint { x, y, weight }
    }
}

/// Closed rectangle `[x_lo : x_hi] x [y_lo : y_hi]` in composite space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RangeQuery2D {
    pub x_lo: CompositeKey,
    pub x_hi: CompositeKey,
    pub y_lo: CompositeKey,
    pub y_hi: CompositeKey,
}

impl RangeQuery2D {
    /// Panics unless `lo <= hi` in both dimensions.
    pub fn new(x_lo: CompositeKey, x_hi: CompositeKey, y_lo: CompositeKey, y_hi: CompositeKey) -> Self {
        assert!(x_lo <= x_hi && y_lo <= y_hi, "empty query rectangle");
        RangeQuery2D {
            x_lo,
            x_hi,
            y_lo,
            y_hi,
        }
    }

    /// `[(x1|-inf) : (x2|+inf)] x [(y1|-inf) : (y2|+inf)]`, the composite
    /// form of the plain rectangle `[x1:x2] x [y1:y2]`.
    pub fn from_plain(x1: i64, x2: i64, y1: i64, y2: i64) -> Self {
        Self::new(
            CompositeKey::lower(x1),
            CompositeKey::upper(x2),
            CompositeKey::lower(y1),
            CompositeKey::upper(y2),
        )
    }

    /// Strict dominance region of match `(i, j)`: every point with
    /// `i' < i` and `j' < j`.
    pub fn dominated_by(i: u32, j: u32) -> Self {
        Self::from_plain(0, i as i64 - 1, 0, j as i64 - 1)
    }

    pub fn contains<S>(&self, point: &WeightedPoint<S>) -> bool {
        self.x_lo <= point.x && point.x <= self.x_hi && self.y_lo <= point.y && point.y <= self.y_hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composite_order() {
        assert!(CompositeKey::new(1, 9) < CompositeKey::new(2, 0));
        assert!(CompositeKey::new(2, 0) < CompositeKey::new(2, 1));
        assert!(CompositeKey::lower(2) < CompositeKey::new(2, i64::MIN));
        assert!(CompositeKey::new(2, i64::MAX) < CompositeKey::upper(2));
        assert!(CompositeKey::upper(1) < CompositeKey::lower(2));
    }

    #[test]
    fn dominance_query() {
        let q = RangeQuery2D::dominated_by(5, 4);
        assert!(q.contains(&WeightedPoint::from_match(4, 3, ())));
        assert!(q.contains(&WeightedPoint::from_match(2, 2, ())));
        assert!(!q.contains(&WeightedPoint::from_match(5, 2, ())));
        assert!(!q.contains(&WeightedPoint::from_match(2, 4, ())));
    }

    #[test]
    #[should_panic(expected = "empty query rectangle")]
    fn inverted_query_panics() {
        RangeQuery2D::from_plain(3, 2, 0, 1);
    }
}

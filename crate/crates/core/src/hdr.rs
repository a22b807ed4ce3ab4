//! High-dynamic-range scalars.
//!
//! Scaled suffix values such as `λ^-(i+j)` leave the `f64` exponent range
//! for strings of a few thousand symbols. [`HdrScalar`] keeps an `f64`
//! mantissa normalised to `[0.5, 1)` next to an `i64` base-2 exponent, so
//! products and sums stay representable for any realistic input.
//!
//! The kernels are written against the [`Scalar`] trait; they run on plain
//! `f64` when the whole computation provably fits (see [`fits_native`]) and
//! on `HdrScalar` otherwise.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub};

const EXP_MASK: u64 = 0x7ff << 52;
const LN_2: f64 = std::f64::consts::LN_2;

/// Largest alignment shift that can still change the larger operand of a sum.
const MAX_ALIGN_SHIFT: i64 = 60;

/// Bound on `(|s| + |t|) * |ln λ|` under which native floats are safe.
pub const NATIVE_LOG_RANGE: f64 = 600.0;

/// `2^k` for `-1022 <= k <= 1023`, built directly from the bit pattern.
#[inline]
fn pow2(k: i64) -> f64 {
    debug_assert!((-1022..=1023).contains(&k));
    f64::from_bits(((k + 1023) as u64) << 52)
}

/// Splits a normal, nonzero float into a mantissa in `±[0.5, 1)` and an exponent.
#[inline]
fn split_normal(x: f64) -> (f64, i64) {
    let bits = x.to_bits();
    let biased = ((bits & EXP_MASK) >> 52) as i64;
    let mantissa = f64::from_bits((bits & !EXP_MASK) | (1022u64 << 52));
    (mantissa, biased - 1022)
}

/// A real number `mantissa * 2^exponent` with `|mantissa|` in `[0.5, 1)` or zero.
///
/// Kernel values are nonnegative; negative values are representable only so
/// that the dynamic-programming recurrence can subtract.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct HdrScalar {
    mantissa: f64,
    exponent: i64,
}

impl HdrScalar {
    pub const ZERO: HdrScalar = HdrScalar {
        mantissa: 0.0,
        exponent: 0,
    };
    pub const ONE: HdrScalar = HdrScalar {
        mantissa: 0.5,
        exponent: 1,
    };

    #[inline]
    fn normalized(mantissa: f64, exponent: i64) -> Self {
        if mantissa == 0.0 {
            return Self::ZERO;
        }
        let (m, e) = split_normal(mantissa);
        HdrScalar {
            mantissa: m,
            exponent: exponent + e,
        }
    }

    /// Converts a finite float. Panics on NaN or infinity.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "HdrScalar::from_f64 on non-finite value {x}");
        if x == 0.0 {
            Self::ZERO
        } else if x.is_normal() {
            Self::normalized(x, 0)
        } else {
            // subnormal: lift into the normal range first
            Self::normalized(x * pow2(64), -64)
        }
    }

    /// Builds `mantissa * 2^exponent` from raw parts, normalising as needed.
    pub fn from_parts(mantissa: f64, exponent: i64) -> Self {
        let lifted = Self::from_f64(mantissa);
        if lifted.is_zero() {
            lifted
        } else {
            HdrScalar {
                mantissa: lifted.mantissa,
                exponent: lifted.exponent + exponent,
            }
        }
    }

    pub fn mantissa(self) -> f64 {
        self.mantissa
    }

    pub fn exponent(self) -> i64 {
        self.exponent
    }

    pub fn is_zero(self) -> bool {
        self.mantissa == 0.0
    }

    pub fn is_sign_negative(self) -> bool {
        self.mantissa < 0.0
    }

    /// `λ^k` for `0 < λ <= 1` and any `k` in the `i64` range whose result
    /// exponent fits an `i64`.
    ///
    /// Powers of two are exact. Other bases carry a relative error of order
    /// `|k| * f64::EPSILON`, as any evaluation at this precision does.
    pub fn from_lambda_power(lambda: f64, k: i64) -> Self {
        assert!(
            lambda > 0.0 && lambda <= 1.0,
            "lambda must lie in (0, 1], got {lambda}"
        );
        if k == 0 || lambda == 1.0 {
            return Self::ONE;
        }
        let (base_mantissa, base_exponent) = split_normal(lambda);
        let mut magnitude = k.unsigned_abs();
        let mut acc = Self::ONE;
        let mut square = HdrScalar {
            mantissa: base_mantissa,
            exponent: 0,
        };
        while magnitude > 0 {
            if magnitude & 1 == 1 {
                acc = acc * square;
            }
            magnitude >>= 1;
            if magnitude > 0 {
                square = square * square;
            }
        }
        let shift = base_exponent * k.abs();
        let positive = HdrScalar {
            mantissa: acc.mantissa,
            exponent: acc.exponent + shift,
        };
        if k > 0 {
            positive
        } else {
            positive.recip()
        }
    }

    /// `1 / self`. Panics on zero.
    pub fn recip(self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Self::normalized(1.0 / self.mantissa, -self.exponent)
    }

    /// Natural logarithm; `-inf` for zero and NaN for negative values.
    pub fn ln(self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else if self.mantissa < 0.0 {
            f64::NAN
        } else {
            self.mantissa.ln() + self.exponent as f64 * LN_2
        }
    }

    /// Nearest `f64`, saturating to infinity or flushing to zero out of range.
    pub fn to_f64(self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if self.exponent > 1025 {
            return self.mantissa.signum() * f64::INFINITY;
        }
        if self.exponent < -1100 {
            return 0.0 * self.mantissa.signum();
        }
        let first = self.exponent / 2;
        self.mantissa * pow2(first) * pow2(self.exponent - first)
    }

    /// Multiplies by a native float without a full normalisation round trip
    /// on the factor.
    #[inline]
    pub fn scale(self, factor: f64) -> Self {
        Self::normalized(self.mantissa * factor, self.exponent)
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Relative difference `|a - b| / max(|a|, |b|)`, zero when both are zero.
    pub fn relative_difference(self, other: Self) -> f64 {
        let (a, b) = (self.abs(), other.abs());
        let big = a.max(b);
        if big.is_zero() {
            return 0.0;
        }
        let diff = (self - other).abs();
        if diff.is_zero() {
            return 0.0;
        }
        (diff.ln() - big.ln()).exp()
    }

    pub fn abs(self) -> Self {
        HdrScalar {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }
}

impl Add for HdrScalar {
    type Output = HdrScalar;

    #[inline]
    fn add(self, rhs: HdrScalar) -> HdrScalar {
        if self.mantissa == 0.0 {
            return rhs;
        }
        if rhs.mantissa == 0.0 {
            return self;
        }
        let (big, small) = if self.exponent >= rhs.exponent {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let shift = big.exponent - small.exponent;
        if shift > MAX_ALIGN_SHIFT {
            return big;
        }
        Self::normalized(big.mantissa + small.mantissa * pow2(-shift), big.exponent)
    }
}

impl AddAssign for HdrScalar {
    #[inline]
    fn add_assign(&mut self, rhs: HdrScalar) {
        *self = *self + rhs;
    }
}

impl Neg for HdrScalar {
    type Output = HdrScalar;

    fn neg(self) -> HdrScalar {
        HdrScalar {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Sub for HdrScalar {
    type Output = HdrScalar;

    #[inline]
    fn sub(self, rhs: HdrScalar) -> HdrScalar {
        self + (-rhs)
    }
}

impl Mul for HdrScalar {
    type Output = HdrScalar;

    #[inline]
    fn mul(self, rhs: HdrScalar) -> HdrScalar {
        if self.mantissa == 0.0 || rhs.mantissa == 0.0 {
            return Self::ZERO;
        }
        Self::normalized(self.mantissa * rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl MulAssign for HdrScalar {
    fn mul_assign(&mut self, rhs: HdrScalar) {
        *self = *self * rhs;
    }
}

impl Sum for HdrScalar {
    fn sum<I: Iterator<Item = HdrScalar>>(iter: I) -> HdrScalar {
        iter.fold(HdrScalar::ZERO, |acc, x| acc + x)
    }
}

impl PartialOrd for HdrScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let sign = |x: &HdrScalar| {
            if x.mantissa > 0.0 {
                1
            } else if x.mantissa < 0.0 {
                -1
            } else {
                0
            }
        };
        let (sa, sb) = (sign(self), sign(other));
        if sa != sb || sa == 0 {
            return Some(sa.cmp(&sb));
        }
        let magnitude = self
            .exponent
            .cmp(&other.exponent)
            .then(self.mantissa.abs().partial_cmp(&other.mantissa.abs())?);
        Some(if sa > 0 {
            magnitude
        } else {
            magnitude.reverse()
        })
    }
}

impl From<f64> for HdrScalar {
    fn from(x: f64) -> Self {
        HdrScalar::from_f64(x)
    }
}

impl fmt::Debug for HdrScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}

impl fmt::Display for HdrScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if (-1000..=1000).contains(&self.exponent) {
            return write!(f, "{:e}", self.to_f64());
        }
        // decimal mantissa/exponent from the log
        let log10 = self.abs().ln() / std::f64::consts::LN_10;
        let exp10 = log10.floor();
        let sign = if self.mantissa < 0.0 { "-" } else { "" };
        write!(f, "{sign}{:.6}e{}", 10f64.powf(log10 - exp10), exp10 as i64)
    }
}

/// Compact storage form of an [`HdrScalar`]: 12 bytes instead of 16.
///
/// Used for the per-level prefix-sum arrays of the layered range sum tree,
/// which dominate its memory footprint.
#[derive(Clone, Copy, Default)]
#[repr(C, packed(4))]
pub struct PackedHdr {
    mantissa: f64,
    exponent: i32,
}

/// Numeric type the kernels compute in.
pub trait Scalar:
    Copy
    + Default
    + PartialOrd
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + AddAssign
    + Sub<Output = Self>
    + Mul<Output = Self>
    + 'static
{
    /// Storage form used inside large tables.
    type Stored: Copy + Default + Send + Sync;

    fn zero() -> Self;
    fn is_zero(self) -> bool;
    fn lambda_power(lambda: f64, k: i64) -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_hdr(self) -> HdrScalar;
    fn scale(self, factor: f64) -> Self;
    /// Returns `None` when the value cannot be stored losslessly.
    fn store(self) -> Option<Self::Stored>;
    fn load(stored: Self::Stored) -> Self;
}

impl Scalar for f64 {
    type Stored = f64;

    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn is_zero(self) -> bool {
        self == 0.0
    }
    fn lambda_power(lambda: f64, k: i64) -> Self {
        HdrScalar::from_lambda_power(lambda, k).to_f64()
    }
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_hdr(self) -> HdrScalar {
        HdrScalar::from_f64(self)
    }
    #[inline]
    fn scale(self, factor: f64) -> Self {
        self * factor
    }
    #[inline]
    fn store(self) -> Option<f64> {
        Some(self)
    }
    #[inline]
    fn load(stored: f64) -> Self {
        stored
    }
}

impl Scalar for HdrScalar {
    type Stored = PackedHdr;

    #[inline]
    fn zero() -> Self {
        HdrScalar::ZERO
    }
    #[inline]
    fn is_zero(self) -> bool {
        HdrScalar::is_zero(self)
    }
    fn lambda_power(lambda: f64, k: i64) -> Self {
        HdrScalar::from_lambda_power(lambda, k)
    }
    fn from_f64(x: f64) -> Self {
        HdrScalar::from_f64(x)
    }
    #[inline]
    fn to_hdr(self) -> HdrScalar {
        self
    }
    #[inline]
    fn scale(self, factor: f64) -> Self {
        HdrScalar::scale(self, factor)
    }
    #[inline]
    fn store(self) -> Option<PackedHdr> {
        Some(PackedHdr {
            mantissa: self.mantissa,
            exponent: i32::try_from(self.exponent).ok()?,
        })
    }
    #[inline]
    fn load(stored: PackedHdr) -> Self {
        HdrScalar {
            mantissa: stored.mantissa,
            exponent: stored.exponent as i64,
        }
    }
}

/// True when every `λ^±k` with `k <= total_len` stays well inside `f64` range.
pub fn fits_native(total_len: usize, lambda: f64) -> bool {
    total_len as f64 * lambda.ln().abs() < NATIVE_LOG_RANGE
}

/// Table of `λ^(sign * k)` for `k = 0..=max_power`.
pub(crate) fn lambda_powers<S: Scalar>(lambda: f64, max_power: usize, sign: i64) -> Vec<S> {
    (0..=max_power as i64)
        .map(|k| S::lambda_power(lambda, sign * k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        if a == b {
            0.0
        } else {
            (a - b).abs() / a.abs().max(b.abs())
        }
    }

    #[test]
    fn half_powers_are_exact() {
        // 0.5^-16000 = 2^16000 = 0.5 * 2^16001
        let x = HdrScalar::from_lambda_power(0.5, -16000);
        assert_eq!(x.mantissa(), 0.5);
        assert_eq!(x.exponent(), 16001);
        assert_eq!(x.ln(), 16000.0 * LN_2);

        let a = HdrScalar::from_lambda_power(0.5, 3);
        let b = HdrScalar::from_lambda_power(0.5, 4);
        assert_eq!(a * b, HdrScalar::from_lambda_power(0.5, 7));
        assert_eq!(HdrScalar::from_lambda_power(0.5, 7).to_f64(), 0.0078125);
    }

    #[test]
    fn add_zero_is_identity() {
        let x = HdrScalar::from_f64(3.75);
        assert_eq!(x + HdrScalar::ZERO, x);
        assert_eq!(HdrScalar::ZERO + x, x);
        assert!(HdrScalar::ZERO.is_zero());
        assert_eq!(HdrScalar::ZERO.ln(), f64::NEG_INFINITY);
    }

    #[test]
    fn huge_exponents_round_trip() {
        let lambda = 0.37;
        let up = HdrScalar::from_lambda_power(lambda, -(1 << 31));
        let down = HdrScalar::from_lambda_power(lambda, 1 << 31);
        let expected = -(2f64.powi(31)) * lambda.ln();
        assert!(rel(up.ln(), expected) < 1e-12);
        // binary exponentiation compounds ~|k| roundings
        let product = up * down;
        assert!(rel(product.to_f64(), 1.0) < 1e-6, "{product:?}");
    }

    #[test]
    fn lambda_power_matches_powi_in_range() {
        for &lambda in &[0.37f64, 0.5, 0.9, 1.0, 1e-3] {
            for k in -40..=40 {
                let want = lambda.powi(k as i32);
                let got = HdrScalar::from_lambda_power(lambda, k).to_f64();
                assert!(rel(got, want) < 1e-13, "λ={lambda} k={k}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn ordering_and_subtraction() {
        let a = HdrScalar::from_f64(2.0);
        let b = HdrScalar::from_f64(3.0);
        assert!(a < b);
        assert!(HdrScalar::ZERO < a);
        assert!(-b < -a);
        assert_eq!((a - b).to_f64(), -1.0);
        assert!((a - a).is_zero());
        let tiny = HdrScalar::from_lambda_power(0.5, 5000);
        assert!(HdrScalar::ZERO < tiny && tiny < a);
        assert_eq!(a + tiny, a);
    }

    #[test]
    fn subnormal_input_is_lifted() {
        let x = HdrScalar::from_f64(f64::MIN_POSITIVE / 8.0);
        assert_eq!(x.to_f64(), f64::MIN_POSITIVE / 8.0);
        assert_eq!(x.mantissa(), 0.5);
    }

    #[test]
    fn packed_storage_round_trips() {
        let x = HdrScalar::from_lambda_power(0.5, -20000);
        assert_eq!(HdrScalar::load(x.store().unwrap()), x);
        let out_of_range = HdrScalar::from_parts(0.75, 1 << 40);
        assert!(out_of_range.store().is_none());
        assert_eq!(std::mem::size_of::<PackedHdr>(), 12);
    }

    #[test]
    fn native_agreement_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let a: f64 = rng.gen::<f64>() * 10f64.powi(rng.gen_range(-150..150));
            let b: f64 = rng.gen::<f64>() * 10f64.powi(rng.gen_range(-150..150));
            let (ha, hb) = (HdrScalar::from_f64(a), HdrScalar::from_f64(b));
            assert!(rel((ha + hb).to_f64(), a + b) <= 1e-12);
            assert!(rel((ha * hb).to_f64(), a * b) <= 1e-12);
        }
    }

    proptest! {
        #[test]
        fn sum_is_commutative_and_ordered(a in 0.0f64..1e6, b in 0.0f64..1e6, e in -3000i64..3000) {
            let x = HdrScalar::from_parts(a, e);
            let y = HdrScalar::from_parts(b, -e);
            prop_assert_eq!(x + y, y + x);
            prop_assert!(x + y >= x.max(y));
        }
    }
}

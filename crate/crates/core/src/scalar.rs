//! Floating point abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar usable by the kernels, operators and transforms: f32 or f64.
///
/// Beyond `num_traits::Float` the trait supplies the gamma function, which
/// `num_traits` does not cover.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    fn gamma(self) -> Self;
    /// Natural log of |Γ(x)|.
    fn ln_gamma(self) -> Self;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("index representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    #[inline]
    fn gamma(self) -> Self {
        libm::tgamma(self)
    }

    #[inline]
    fn ln_gamma(self) -> Self {
        libm::lgamma_r(self).0
    }
}

impl Scalar for f32 {
    #[inline]
    fn gamma(self) -> Self {
        libm::tgammaf(self)
    }

    #[inline]
    fn ln_gamma(self) -> Self {
        libm::lgammaf_r(self).0
    }
}

/// Error-free transformation of `a + b` (Knuth two-sum).
#[inline]
pub(crate) fn two_sum<T: Scalar>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// Compensated accumulator; keeps a running correction term alongside the sum.
#[derive(Clone, Copy, Debug)]
pub(crate) struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Scalar> CompensatedSum<T> {
    pub(crate) fn new() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }

    #[inline]
    pub(crate) fn add(&mut self, x: T) {
        let (s, e) = two_sum(self.sum, x);
        self.sum = s;
        self.comp += e;
    }

    #[inline]
    pub(crate) fn value(&self) -> T {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_matches_factorials() {
        assert_eq!(Scalar::gamma(5.0_f64), 24.0);
        assert!((Scalar::gamma(5.0_f32) - 24.0).abs() < 1e-4);
        assert!((Scalar::ln_gamma(10.0_f64) - 362880.0_f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut acc = CompensatedSum::<f64>::new();
        acc.add(1.0);
        for _ in 0..10 {
            acc.add(1e-17);
        }
        acc.add(-1.0);
        assert!((acc.value() - 1e-16).abs() < 1e-30);
    }
}

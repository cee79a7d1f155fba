//! Double-word arithmetic (an unevaluated sum hi + lo) for series whose
//! terms cancel heavily. Products rely on a fused multiply-add.

use crate::scalar::{two_sum, Scalar};

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Dd<T> {
    pub hi: T,
    pub lo: T,
}

#[inline]
fn quick_two_sum<T: Scalar>(a: T, b: T) -> (T, T) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod<T: Scalar>(a: T, b: T) -> (T, T) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl<T: Scalar> Dd<T> {
    #[inline]
    pub fn new(x: T) -> Self {
        Self { hi: x, lo: T::zero() }
    }

    /// A constant given to more than working precision as an f64 pair.
    pub fn constant(hi: f64, lo: f64) -> Self {
        let h = T::lit(hi);
        let l = T::lit((hi - h.as_f64()) + lo);
        let (hi, lo) = quick_two_sum(h, l);
        Self { hi, lo }
    }

    #[inline]
    pub fn value(self) -> T {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }

    #[inline]
    pub fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn sub(self, b: Self) -> Self {
        self.add(b.neg())
    }

    #[inline]
    pub fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }

    #[inline]
    pub fn mul_t(self, b: T) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Self { hi, lo }
    }

    pub fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self.sub(b.mul_t(q1));
        let q2 = r.hi / b.hi;
        let r = r.sub(b.mul_t(q2));
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo }.add(Self::new(q3))
    }

    /// Multiplication by an exact power of two.
    fn scale(self, e: i32) -> Self {
        let two = T::lit(2.0);
        // split so each factor stays representable
        let (a, b) = (e / 2, e - e / 2);
        let (fa, fb) = (two.powi(a), two.powi(b));
        Self {
            hi: self.hi * fa * fb,
            lo: self.lo * fa * fb,
        }
    }

    #[allow(clippy::approx_constant)] // hi word of a double-word constant
    pub fn exp(self) -> Self {
        if self.hi > T::lit(709.0) {
            return Self::new(T::infinity());
        }
        if self.hi < T::lit(-745.0) {
            return Self::new(T::zero());
        }
        let ln2 = Self::constant(0.6931471805599453, 2.3190468138462996e-17);
        let m = (self.hi / ln2.hi).round();
        let r = self.sub(ln2.mul_t(m));
        const SQUARINGS: i32 = 10;
        let r = r.scale(-SQUARINGS);
        // Taylor series of e^r − 1; |r| < 4e-4 so 10 terms reach 1e-36
        let mut term = r;
        let mut acc = r;
        for i in 2..=10 {
            term = term.mul(r).div(Self::new(T::from_usize_lossy(i)));
            acc = acc.add(term);
        }
        // (1 + a)² − 1 = a(2 + a) keeps the small part exact
        for _ in 0..SQUARINGS {
            acc = acc.mul(acc.add(Self::new(T::lit(2.0))));
        }
        let one = acc.add(Self::new(T::one()));
        one.scale(m.to_i32().unwrap_or(0))
    }

    /// Natural log of a positive value: one Newton step on exp.
    pub fn ln(self) -> Self {
        let y = Self::new(self.hi.ln());
        y.add(self.mul(y.neg().exp())).sub(Self::new(T::one()))
    }
}

/// B_{2j} as numerator/denominator, j = 1..=12.
const BERNOULLI: [(f64, f64); 12] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
];

/// ln Γ(a) for a > 0: upward recurrence to a ≥ 24, then Stirling.
pub(crate) fn ln_gamma<T: Scalar>(a: Dd<T>) -> Dd<T> {
    let shift_to = T::lit(24.0);
    let mut x = a;
    let mut prod = Dd::new(T::one());
    while x.hi < shift_to {
        prod = prod.mul(x);
        x = x.add(Dd::new(T::one()));
    }
    let half = Dd::new(T::lit(0.5));
    let half_ln_2pi = Dd::constant(0.9189385332046728, -3.8782941580672414e-17);
    let mut s = x.sub(half).mul(x.ln()).sub(x).add(half_ln_2pi);
    let inv = Dd::new(T::one()).div(x);
    let inv2 = inv.mul(inv);
    let mut p = inv;
    for (j, (num, den)) in BERNOULLI.iter().enumerate() {
        let jj = 2.0 * (j + 1) as f64;
        let c = Dd::new(T::lit(*num)).div(Dd::new(T::lit(den * jj * (jj - 1.0))));
        s = s.add(c.mul(p));
        p = p.mul(inv2);
    }
    if prod.hi != T::one() || prod.lo != T::zero() {
        s = s.sub(prod.ln());
    }
    s
}

//! Closed-form Laplace and Sumudu transforms of the kernel and operators,
//! numerical transforms, and fixed-Talbot Laplace inversion.
//!
//! Conventions: L[f](u) = ∫₀^∞ e^{−ut} f(t) dt and
//! S[f](u) = u⁻¹ ∫₀^∞ e^{−t/u} f(t) dt = L[f](1/u)/u. Every closed form
//! requires the geometric-series bound |ωk(ku)^{−α/k}| < 1 (Laplace) or
//! |ωk(u/k)^{α/k}| < 1 (Sumudu); violations are errors, never continued.
//! The one exception is the boundary point where the bound equals −1 and
//! the closed form stays finite.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::kspecial::{HilferParams, PrabhakarParams};
use crate::operators::{derivative_order, SampledFunction};
use crate::quadrature::{adaptive_gk, tanh_sinh};
use crate::scalar::{CompensatedSum, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformKind {
    Laplace,
    Sumudu,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformQuery<T> {
    pub variable: T,
    pub kind: TransformKind,
}

impl<T: Scalar> TransformQuery<T> {
    pub fn laplace(u: T) -> Result<Self> {
        Self::new(u, TransformKind::Laplace)
    }

    pub fn sumudu(u: T) -> Result<Self> {
        Self::new(u, TransformKind::Sumudu)
    }

    pub fn new(variable: T, kind: TransformKind) -> Result<Self> {
        if !(variable > T::zero() && variable.is_finite()) {
            return Err(Error::domain("u", format!("must be > 0 (got {variable})")));
        }
        Ok(Self { variable, kind })
    }

    fn expect(&self, kind: TransformKind) -> Result<T> {
        if self.kind != kind {
            return Err(Error::Contract(format!(
                "{:?} formula called with a {:?} query",
                kind, self.kind
            )));
        }
        if !(self.variable > T::zero()) {
            return Err(Error::domain("u", "must be > 0"));
        }
        Ok(self.variable)
    }
}

/// Boundary terms consumed by the derivative formulas.
///
/// `initial_values[n]` is f⁽ⁿ⁾(0⁺). `frozen_integral_terms` holds the limits
/// at 0⁺ of the non-regularized formulas: for the Prabhakar derivative of
/// order m, entry n is k^{m−n−1} (d/dt)^{m−n−1} P^{−γ}_{α,mk−μ} f; for the
/// Hilfer-Prabhakar derivative, the single entry P^{−γ(1−ν)}_{α,(1−ν)(k−μ)} f.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoundaryData<T> {
    pub initial_values: Vec<T>,
    pub frozen_integral_terms: Vec<T>,
}

impl<T> BoundaryData<T> {
    pub fn none() -> Self {
        Self {
            initial_values: Vec::new(),
            frozen_integral_terms: Vec::new(),
        }
    }

    pub fn initial(values: Vec<T>) -> Self {
        Self {
            initial_values: values,
            frozen_integral_terms: Vec::new(),
        }
    }

    pub fn frozen(values: Vec<T>) -> Self {
        Self {
            initial_values: Vec::new(),
            frozen_integral_terms: values,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OperatorKind {
    PIntegral,
    PDeriv,
    RegPDeriv,
    HPDeriv,
    RegHPDeriv,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 5] = [
        OperatorKind::PIntegral,
        OperatorKind::PDeriv,
        OperatorKind::RegPDeriv,
        OperatorKind::HPDeriv,
        OperatorKind::RegHPDeriv,
    ];
}

/// Parameters accepted by the operator formulas. Hilfer kinds need ν;
/// Prabhakar kinds accept either variant and use the base tuple.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OperatorParams<T> {
    Prabhakar(PrabhakarParams<T>),
    Hilfer(HilferParams<T>),
}

impl<T: Scalar> OperatorParams<T> {
    fn base(&self) -> &PrabhakarParams<T> {
        match self {
            OperatorParams::Prabhakar(p) => p,
            OperatorParams::Hilfer(h) => &h.base,
        }
    }

    fn hilfer(&self, op: OperatorKind) -> Result<&HilferParams<T>> {
        match self {
            OperatorParams::Hilfer(h) => {
                h.validate()?;
                Ok(h)
            }
            OperatorParams::Prabhakar(_) => Err(Error::Contract(format!("{op:?} needs Hilfer parameters (nu)"))),
        }
    }
}

impl<T> From<PrabhakarParams<T>> for OperatorParams<T> {
    fn from(p: PrabhakarParams<T>) -> Self {
        OperatorParams::Prabhakar(p)
    }
}

impl<T> From<HilferParams<T>> for OperatorParams<T> {
    fn from(h: HilferParams<T>) -> Self {
        OperatorParams::Hilfer(h)
    }
}

/// |x| < 1, or on the unit circle away from the branch point x = 1, where
/// the closed form is the (finite) continuation of the geometric series.
fn within_bound<T: Scalar>(x: T) -> bool {
    x.abs() < T::one() || x == -T::one()
}

/// 1 − ωk(ku)^{−α/k}, checked against the geometric-series bound.
fn laplace_base<T: Scalar>(u: T, p: &PrabhakarParams<T>) -> Result<T> {
    let x = p.omega * p.k * (p.k * u).powf(-p.alpha / p.k);
    if !within_bound(x) {
        return Err(Error::domain(
            "u",
            format!(
                "violates the convergence condition |omega*k*(k*u)^(-alpha/k)| < 1 (value {})",
                x.abs()
            ),
        ));
    }
    Ok(T::one() - x)
}

/// 1 − ωk(u/k)^{α/k}, checked against the geometric-series bound.
fn sumudu_base<T: Scalar>(u: T, p: &PrabhakarParams<T>) -> Result<T> {
    let x = p.omega * p.k * (u / p.k).powf(p.alpha / p.k);
    if !within_bound(x) {
        return Err(Error::domain(
            "u",
            format!(
                "violates the convergence condition |omega*k*(u/k)^(alpha/k)| < 1 (value {})",
                x.abs()
            ),
        ));
    }
    Ok(T::one() - x)
}

/// L[ε](u) = (ku)^{−μ/k} (1 − ωk(ku)^{−α/k})^{−γ/k}.
pub fn laplace_kernel_closed<T: Scalar>(q: &TransformQuery<T>, p: &PrabhakarParams<T>) -> Result<T> {
    p.validate()?;
    let u = q.expect(TransformKind::Laplace)?;
    let a = laplace_base(u, p)?;
    Ok((p.k * u).powf(-p.mu / p.k) * a.powf(-p.gamma / p.k))
}

/// S[ε](u) = u⁻¹ (u/k)^{μ/k} (1 − ωk(u/k)^{α/k})^{−γ/k}.
pub fn sumudu_kernel_closed<T: Scalar>(q: &TransformQuery<T>, p: &PrabhakarParams<T>) -> Result<T> {
    p.validate()?;
    let u = q.expect(TransformKind::Sumudu)?;
    let b = sumudu_base(u, p)?;
    Ok((u / p.k).powf(p.mu / p.k) * b.powf(-p.gamma / p.k) / u)
}

/// The kernel transform at complex s (principal branches), used on the
/// Talbot contour. The convergence bound is checked at s itself.
pub fn laplace_kernel_complex<T: Scalar>(s: Complex<T>, p: &PrabhakarParams<T>) -> Result<Complex<T>> {
    let ks = s * p.k;
    let x = ks.powf(-p.alpha / p.k) * (p.omega * p.k);
    if !(x.norm() < T::one() || (x.re == -T::one() && x.im == T::zero())) {
        return Err(Error::domain(
            "s",
            format!(
                "violates the convergence condition |omega*k*(k*s)^(-alpha/k)| < 1 at s = {}{:+}i",
                s.re, s.im
            ),
        ));
    }
    let one = Complex::new(T::one(), T::zero());
    Ok(ks.powf(-p.mu / p.k) * (one - x).powf(-p.gamma / p.k))
}

fn check_len<T>(what: &str, v: &[T], want: usize) -> Result<()> {
    if v.len() != want {
        return Err(Error::Contract(format!(
            "{what}: expected {want} entries, got {}",
            v.len()
        )));
    }
    Ok(())
}

/// Laplace transform of an operator applied to f, given F(u) = L[f](u)
/// and the boundary terms the formula consumes.
pub fn laplace_operator_closed<T: Scalar>(
    op: OperatorKind,
    q: &TransformQuery<T>,
    params: &OperatorParams<T>,
    f_of_u: T,
    bd: &BoundaryData<T>,
) -> Result<T> {
    let p = *params.base();
    p.validate()?;
    let u = q.expect(TransformKind::Laplace)?;
    let k = p.k;
    let ku = k * u;
    let a = laplace_base(u, &p)?;
    let apow = |x: T| a.powf(x / k);
    match op {
        OperatorKind::PIntegral => {
            check_len("initial_values", &bd.initial_values, 0)?;
            check_len("frozen_integral_terms", &bd.frozen_integral_terms, 0)?;
            Ok(ku.powf(-p.mu / k) * apow(-p.gamma) * f_of_u)
        }
        OperatorKind::PDeriv => {
            let m = derivative_order(p.mu, k);
            check_len("initial_values", &bd.initial_values, 0)?;
            check_len("frozen_integral_terms", &bd.frozen_integral_terms, m)?;
            let mut acc = CompensatedSum::new();
            acc.add(ku.powf(p.mu / k) * apow(p.gamma) * f_of_u);
            for (n, b) in bd.frozen_integral_terms.iter().enumerate() {
                acc.add(-k * ku.powi(n as i32) * *b);
            }
            Ok(acc.value())
        }
        OperatorKind::RegPDeriv => {
            let m = derivative_order(p.mu, k);
            check_len("initial_values", &bd.initial_values, m)?;
            check_len("frozen_integral_terms", &bd.frozen_integral_terms, 0)?;
            let ag = apow(p.gamma);
            let mut acc = CompensatedSum::new();
            acc.add(ku.powf(p.mu / k) * ag * f_of_u);
            for (n, fn0) in bd.initial_values.iter().enumerate() {
                let n1 = T::from_usize_lossy(n + 1);
                acc.add(-k.powi(n as i32 + 1) * ku.powf((p.mu - n1 * k) / k) * ag * *fn0);
            }
            Ok(acc.value())
        }
        OperatorKind::HPDeriv => {
            let hp = params.hilfer(op)?;
            check_len("initial_values", &bd.initial_values, 0)?;
            check_len("frozen_integral_terms", &bd.frozen_integral_terms, 1)?;
            let nu = hp.nu;
            let main = ku.powf(p.mu / k) * apow(p.gamma) * f_of_u;
            let bnd = k * ku.powf(-nu * (k - p.mu) / k) * apow(p.gamma * nu) * bd.frozen_integral_terms[0];
            Ok(main - bnd)
        }
        OperatorKind::RegHPDeriv => {
            params.hilfer(op)?;
            check_len("initial_values", &bd.initial_values, 1)?;
            check_len("frozen_integral_terms", &bd.frozen_integral_terms, 0)?;
            let ag = apow(p.gamma);
            let main = ku.powf(p.mu / k) * ag * f_of_u;
            let bnd = k * ku.powf(-(k - p.mu) / k) * ag * bd.initial_values[0];
            Ok(main - bnd)
        }
    }
}

/// Sumudu transform of an operator applied to f, given F(u) = S[f](u).
/// Satisfies S(u) = L(1/u)/u with F mapped the same way.
pub fn sumudu_operator_closed<T: Scalar>(
    op: OperatorKind,
    q: &TransformQuery<T>,
    params: &OperatorParams<T>,
    f_of_u: T,
    bd: &BoundaryData<T>,
) -> Result<T> {
    let p = *params.base();
    p.validate()?;
    let u = q.expect(TransformKind::Sumudu)?;
    let k = p.k;
    let uk = u / k;
    let b = sumudu_base(u, &p)?;
    let bpow = |x: T| b.powf(x / k);
    match op {
        OperatorKind::PIntegral => {
            check_len("initial_values", &bd.initial_values, 0)?;
            check_len("frozen_integral_terms", &bd.frozen_integral_terms, 0)?;
            Ok(uk.powf(p.mu / k) * bpow(-p.gamma) * f_of_u)
        }
        OperatorKind::PDeriv => {
            let m = derivative_order(p.mu, k);
            check_len("initial_values", &bd.initial_values, 0)?;
            check_len("frozen_integral_terms", &bd.frozen_integral_terms, m)?;
            let mut acc = CompensatedSum::new();
            acc.add(uk.powf(-p.mu / k) * bpow(p.gamma) * f_of_u);
            for (n, bn) in bd.frozen_integral_terms.iter().enumerate() {
                acc.add(-(k / u).powi(n as i32 + 1) * *bn);
            }
            Ok(acc.value())
        }
        OperatorKind::RegPDeriv => {
            let m = derivative_order(p.mu, k);
            check_len("initial_values", &bd.initial_values, m)?;
            check_len("frozen_integral_terms", &bd.frozen_integral_terms, 0)?;
            let bg = bpow(p.gamma);
            let mut acc = CompensatedSum::new();
            acc.add(uk.powf(-p.mu / k) * bg * f_of_u);
            for (n, fn0) in bd.initial_values.iter().enumerate() {
                let nn = T::from_usize_lossy(n);
                acc.add(-k.powi(n as i32) * uk.powf((nn * k - p.mu) / k) * bg * *fn0);
            }
            Ok(acc.value())
        }
        OperatorKind::HPDeriv => {
            let hp = params.hilfer(op)?;
            check_len("initial_values", &bd.initial_values, 0)?;
            check_len("frozen_integral_terms", &bd.frozen_integral_terms, 1)?;
            let nu = hp.nu;
            let main = uk.powf(-p.mu / k) * bpow(p.gamma) * f_of_u;
            let bnd = uk.powf(nu * (k - p.mu) / k - T::one()) * bpow(p.gamma * nu) * bd.frozen_integral_terms[0];
            Ok(main - bnd)
        }
        OperatorKind::RegHPDeriv => {
            params.hilfer(op)?;
            check_len("initial_values", &bd.initial_values, 1)?;
            check_len("frozen_integral_terms", &bd.frozen_integral_terms, 0)?;
            Ok(uk.powf(-p.mu / k) * bpow(p.gamma) * (f_of_u - bd.initial_values[0]))
        }
    }
}

/// Operand of the numerical transforms.
#[derive(Clone, Copy)]
pub enum LaplaceInput<'a, T> {
    /// Evaluated on demand; may have an integrable singularity at 0.
    Callable(&'a (dyn Fn(T) -> T + Sync)),
    /// Linearly interpolated between nodes; the grid end is the horizon.
    Sampled(&'a SampledFunction<T>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaplaceEstimate<T> {
    pub value: T,
    /// Estimated size of the neglected ∫_T^∞ part.
    pub tail_estimate: T,
    pub horizon: T,
}

/// Largest |f| on [T/2, T]; used to bound the neglected tail.
fn tail_scale<T: Scalar>(f: &dyn Fn(T) -> T, horizon: T) -> T {
    let n = 64;
    (0..=n)
        .map(|i| {
            let t = horizon * (T::lit(0.5) + T::lit(0.5) * T::from_usize_lossy(i) / T::from_usize_lossy(n));
            f(t).abs()
        })
        .fold(T::zero(), |a, b| if b.is_nan() || b > a { b } else { a })
}

/// ∫₀^T e^{−st} f(t) dt. For callables the horizon is chosen (when `None`)
/// so that e^{−sT} max|f| on [T/2, T] stays below tol/10; a tanh-sinh panel
/// handles [0, min(T, 1)] and adaptive Gauss-Kronrod the rest.
pub fn numerical_laplace<T: Scalar>(
    f: LaplaceInput<'_, T>,
    s: T,
    horizon: Option<T>,
    tol: T,
) -> Result<LaplaceEstimate<T>> {
    if !(s > T::zero() && s.is_finite()) {
        return Err(Error::domain("s", format!("must be > 0 (got {s})")));
    }
    if !(tol > T::zero()) {
        return Err(Error::domain("tol", "must be > 0"));
    }
    match f {
        LaplaceInput::Callable(g) => {
            let tail_of = |t_end: T| (-s * t_end).exp() * tail_scale(g, t_end) / s;
            let (t_end, tail) = match horizon {
                Some(t_end) => {
                    if !(t_end > T::zero()) {
                        return Err(Error::domain("horizon", "must be > 0"));
                    }
                    let tail = tail_of(t_end);
                    if !(tail <= tol) {
                        return Err(Error::Horizon(format!(
                            "tail bound {tail} at T = {t_end} exceeds tol {tol}"
                        )));
                    }
                    (t_end, tail)
                }
                None => {
                    let mut t_end = ((T::lit(10.0) / tol).ln() / s).max(T::one() / s);
                    let mut found = None;
                    for _ in 0..60 {
                        let m = tail_scale(g, t_end);
                        if !m.is_finite() {
                            break;
                        }
                        if (-s * t_end).exp() * m < tol / T::lit(10.0) {
                            found = Some((t_end, (-s * t_end).exp() * m / s));
                            break;
                        }
                        t_end *= T::lit(2.0);
                    }
                    found.ok_or_else(|| {
                        Error::Horizon(format!(
                            "no horizon makes e^(-sT)|f| < tol/10 for s = {s}; f grows too fast"
                        ))
                    })?
                }
            };
            let integrand = |t: T| (-s * t).exp() * g(t);
            let split = t_end.min(T::one());
            let half = tol / T::lit(2.0);
            let mut v = tanh_sinh(&integrand, split, half)?;
            if t_end > split {
                v += adaptive_gk(&integrand, split, t_end, half)?;
            }
            Ok(LaplaceEstimate {
                value: v,
                tail_estimate: tail,
                horizon: t_end,
            })
        }
        LaplaceInput::Sampled(fs) => {
            fs.validate()?;
            let g = &fs.grid;
            let h = g.step;
            let x = s * h;
            let one_minus = -(-x).exp_m1();
            // 1 − e^{−x} − x e^{−x}, by series when cancellation would bite
            let second = if x < T::lit(0.1) {
                let mut acc = T::zero();
                let mut pow = x;
                let mut fact = T::one();
                for n in 2..20 {
                    let nn = T::from_usize_lossy(n);
                    pow *= x;
                    fact *= nn;
                    let sign = if n % 2 == 0 { T::one() } else { -T::one() };
                    acc += sign * pow * (nn - T::one()) / fact;
                }
                acc
            } else {
                one_minus - x * (-x).exp()
            };
            let s2 = s * s;
            let mut acc = CompensatedSum::new();
            for i in 0..g.count - 1 {
                let a = g.node(i);
                let ea = (-s * a).exp();
                let fa = fs.values[i];
                let fb = fs.values[i + 1];
                // ∫ e^{−st} [fa + (fb−fa)(t−a)/h] dt over [a, a+h]
                let i0 = ea * one_minus / s;
                let i1 = ea * second / s2;
                acc.add(fa * i0 + (fb - fa) * i1 / h);
            }
            let t_end = g.end();
            let tail = fs.values[g.count - 1].abs() * (-s * t_end).exp() / s;
            let tail = tail.max(T::zero());
            if horizon.is_some_and(|hz| hz != t_end) {
                return Err(Error::Contract("sampled input: the horizon is the grid end".into()));
            }
            if !(tail <= tol) {
                return Err(Error::Horizon(format!(
                    "sampled tail estimate {tail} at T = {t_end} exceeds tol {tol}"
                )));
            }
            Ok(LaplaceEstimate {
                value: acc.value(),
                tail_estimate: tail,
                horizon: t_end,
            })
        }
    }
}

/// S[f](u) = L[f](1/u)/u.
pub fn numerical_sumudu<T: Scalar>(
    f: LaplaceInput<'_, T>,
    u: T,
    horizon: Option<T>,
    tol: T,
) -> Result<LaplaceEstimate<T>> {
    if !(u > T::zero() && u.is_finite()) {
        return Err(Error::domain("u", format!("must be > 0 (got {u})")));
    }
    let e = numerical_laplace(f, T::one() / u, horizon, tol * u)?;
    Ok(LaplaceEstimate {
        value: e.value / u,
        tail_estimate: e.tail_estimate / u,
        horizon: e.horizon,
    })
}

/// Fixed-Talbot inversion f(t) ≈ (r/M)[½F(r)e^{rt} + Σ Re(e^{ts}F(s)(1+iσ))]
/// on s(θ) = rθ(cot θ + i), r = 2M/(5t). About 0.6·M significant digits
/// for well-behaved F, limited by double precision near M ≈ 40.
pub fn inverse_laplace_talbot<T, F>(f: F, t: T, nodes: usize) -> Result<T>
where
    T: Scalar,
    F: Fn(Complex<T>) -> Result<Complex<T>>,
{
    if !(t > T::zero() && t.is_finite()) {
        return Err(Error::domain("t", format!("must be > 0 (got {t})")));
    }
    if nodes < 2 {
        return Err(Error::domain("nodes", "must be >= 2"));
    }
    let m = T::from_usize_lossy(nodes);
    let r = T::lit(2.0) * m / (T::lit(5.0) * t);
    let f0 = f(Complex::new(r, T::zero()))?;
    if !f0.re.is_finite() {
        return Err(Error::Evaluation(format!("F(r) is not finite at r = {r}")));
    }
    let mut acc = CompensatedSum::new();
    acc.add(T::lit(0.5) * f0.re * (r * t).exp());
    for j in 1..nodes {
        let theta = T::from_usize_lossy(j) * T::PI() / m;
        let cot = theta.cos() / theta.sin();
        let s = Complex::new(r * theta * cot, r * theta);
        let sigma = theta + (theta * cot - T::one()) * cot;
        let fs = f(s)?;
        let term = (s * t).exp() * fs * Complex::new(T::one(), sigma);
        if !term.re.is_finite() {
            return Err(Error::Evaluation(format!("non-finite contour evaluation at node {j}")));
        }
        acc.add(term.re);
    }
    Ok(r / m * acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kspecial::{prabhakar_kernel, SeriesControl};
    use crate::operators::Grid1D;

    fn pp(k: f64, a: f64, m: f64, g: f64, w: f64) -> PrabhakarParams<f64> {
        PrabhakarParams::new(k, a, m, g, w).unwrap()
    }

    #[test]
    fn kernel_closed_examples() {
        let q = TransformQuery::laplace(2.0).unwrap();
        let v = laplace_kernel_closed(&q, &pp(1.0, 1.0, 1.0, 1.0, -1.0)).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        let p = pp(1.7, 0.5, 0.9, 2.0, 0.0);
        let v = laplace_kernel_closed(&q, &p).unwrap();
        assert!((v - (1.7f64 * 2.0).powf(-0.9 / 1.7)).abs() < 1e-15);
        let qs = TransformQuery::sumudu(1.0).unwrap();
        let v = sumudu_kernel_closed(&qs, &pp(1.0, 1.0, 1.0, 1.0, -1.0)).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn convergence_condition_is_enforced() {
        let q = TransformQuery::laplace(0.1).unwrap();
        let e = laplace_kernel_closed(&q, &pp(1.0, 1.0, 1.0, 1.0, 0.5)).unwrap_err();
        assert!(e.to_string().contains("convergence condition"));
        let qs = TransformQuery::sumudu(10.0).unwrap();
        assert!(sumudu_kernel_closed(&qs, &pp(1.0, 1.0, 1.0, 1.0, 0.5)).is_err());
        assert!(laplace_kernel_closed(&qs, &pp(1.0, 1.0, 1.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn operator_boundary_lengths_are_checked() {
        let q = TransformQuery::laplace(3.0).unwrap();
        let p: OperatorParams<f64> = pp(1.0, 1.0, 0.5, 0.0, 0.0).into();
        let e = laplace_operator_closed(OperatorKind::RegPDeriv, &q, &p, 1.0, &BoundaryData::none());
        assert!(matches!(e, Err(Error::Contract(_))));
        let e = laplace_operator_closed(OperatorKind::HPDeriv, &q, &p, 1.0, &BoundaryData::frozen(vec![0.0]));
        assert!(matches!(e, Err(Error::Contract(_))));
    }

    #[test]
    fn reg_hilfer_without_initial_value_is_a_multiplier() {
        let base = pp(1.3, 0.8, 0.7, 0.4, 0.2);
        let hp = HilferParams::new(base, 0.3).unwrap();
        let u = 4.0;
        let q = TransformQuery::laplace(u).unwrap();
        let v = laplace_operator_closed(
            OperatorKind::RegHPDeriv,
            &q,
            &hp.into(),
            2.5,
            &BoundaryData::initial(vec![0.0]),
        )
        .unwrap();
        let k = 1.3;
        let a = 1.0 - 0.2 * k * (k * u).powf(-0.8 / k);
        let want = (k * u).powf(0.7 / k) * a.powf(0.4 / k) * 2.5;
        assert!((v - want).abs() < 1e-14 * want.abs());
        let v = laplace_operator_closed(
            OperatorKind::PDeriv,
            &q,
            &base.into(),
            2.5,
            &BoundaryData::frozen(vec![0.0]),
        )
        .unwrap();
        assert!((v - want).abs() < 1e-14 * want.abs());
    }

    #[test]
    fn numerical_laplace_examples() {
        let one = |_: f64| 1.0;
        let v = numerical_laplace(LaplaceInput::Callable(&one), 2.0, None, 1e-10).unwrap();
        assert!((v.value - 0.5).abs() < 1e-10);
        let e = |t: f64| (-t).exp();
        let v = numerical_laplace(LaplaceInput::Callable(&e), 1.0, None, 1e-10).unwrap();
        assert!((v.value - 0.5).abs() < 1e-10);
        let grow = |t: f64| (3.0 * t).exp();
        assert!(matches!(
            numerical_laplace(LaplaceInput::Callable(&grow), 1.0, None, 1e-10),
            Err(Error::Horizon(_))
        ));
    }

    #[test]
    fn numerical_laplace_of_singular_kernel() {
        let p = pp(2.0, 1.0, 1.0, 1.0, 0.1);
        let c = SeriesControl::default();
        let f = |t: f64| prabhakar_kernel(t, &p, &c).unwrap();
        let v = numerical_laplace(LaplaceInput::Callable(&f), 3.0, None, 1e-11).unwrap();
        let want = laplace_kernel_closed(&TransformQuery::laplace(3.0).unwrap(), &p).unwrap();
        assert!((v.value - want).abs() < 1e-8, "{} {}", v.value, want);
        let s = numerical_sumudu(LaplaceInput::Callable(&f), 0.4, None, 1e-11).unwrap();
        let want = sumudu_kernel_closed(&TransformQuery::sumudu(0.4).unwrap(), &p).unwrap();
        assert!((s.value - want).abs() < 1e-8, "{} {}", s.value, want);
    }

    #[test]
    fn numerical_sumudu_examples() {
        let one = |_: f64| 1.0;
        let t = |t: f64| t;
        for u in [0.3, 1.0, 2.0] {
            let v = numerical_sumudu(LaplaceInput::Callable(&one), u, None, 1e-10).unwrap();
            assert!((v.value - 1.0).abs() < 1e-9);
        }
        let v = numerical_sumudu(LaplaceInput::Callable(&t), 3.0, None, 1e-10).unwrap();
        assert!((v.value - 3.0).abs() < 1e-8);
    }

    #[test]
    fn sampled_laplace_is_exact_for_linear_data() {
        let g = Grid1D::uniform(40.0, 400).unwrap();
        let f = SampledFunction::from_fn(g, |t| 2.0 + 0.5 * t);
        let v = numerical_laplace(LaplaceInput::Sampled(&f), 1.5, None, 1e-10).unwrap();
        let want: f64 = 2.0 / 1.5 + 0.5 / 2.25;
        assert!((v.value - want).abs() < 1e-13);
    }

    #[test]
    fn talbot_examples() {
        let inv = |s: Complex<f64>| Ok(s.inv());
        assert!((inverse_laplace_talbot(inv, 1.0, 32).unwrap() - 1.0).abs() < 1e-10);
        let shifted = |s: Complex<f64>| Ok((s + 1.0).inv());
        let v = inverse_laplace_talbot(shifted, 1.0, 32).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-10);
        let p = pp(1.5, 2.0, 1.2, 0.5, 0.3);
        let v = inverse_laplace_talbot(|s| laplace_kernel_complex(s, &p), 0.7, 32).unwrap();
        let want = prabhakar_kernel(0.7, &p, &SeriesControl::default()).unwrap();
        assert!((v - want).abs() < 1e-6, "{v} {want}");
    }
}

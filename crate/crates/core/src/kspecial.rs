//! k-gamma, k-Pochhammer, k-Mittag-Leffler and the Prabhakar kernel.

use std::sync::OnceLock;

use crate::dd::{self, Dd};
use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Scalar};

/// Above this ratio of Σ|terms| to |sum| the series is re-summed in
/// double-word arithmetic; below it the plain sum keeps about 14 digits.
const CANCELLATION_LIMIT: f64 = 8.0;

/// Parameter tuple (k, α, μ, γ, ω) shared by kernels, operators and transforms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrabhakarParams<T> {
    pub k: T,
    pub alpha: T,
    pub mu: T,
    pub gamma: T,
    pub omega: T,
}

impl<T: Scalar> PrabhakarParams<T> {
    pub fn new(k: T, alpha: T, mu: T, gamma: T, omega: T) -> Result<Self> {
        let p = Self {
            k,
            alpha,
            mu,
            gamma,
            omega,
        };
        p.validate()?;
        Ok(p)
    }

    /// Checks the positivity constraints. Fields are public, so operations
    /// call this again before trusting a value.
    pub fn validate(&self) -> Result<()> {
        positive("k", self.k)?;
        positive("alpha", self.alpha)?;
        positive("mu", self.mu)?;
        finite("gamma", self.gamma)?;
        finite("omega", self.omega)
    }

    pub fn with_mu(self, mu: T) -> Self {
        Self { mu, ..self }
    }

    pub fn with_gamma(self, gamma: T) -> Self {
        Self { gamma, ..self }
    }
}

fn positive<T: Scalar>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(name, format!("must be > 0 (got {v})")))
    }
}

fn finite<T: Scalar>(name: &str, v: T) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(name, format!("must be finite (got {v})")))
    }
}

/// Prabhakar parameters plus the Hilfer interpolation weight ν.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HilferParams<T> {
    pub base: PrabhakarParams<T>,
    pub nu: T,
}

impl<T: Scalar> HilferParams<T> {
    pub fn new(base: PrabhakarParams<T>, nu: T) -> Result<Self> {
        let hp = Self { base, nu };
        hp.validate()?;
        Ok(hp)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if !(self.nu >= T::zero() && self.nu <= T::one()) {
            return Err(Error::domain("nu", format!("must be in [0,1] (got {})", self.nu)));
        }
        if self.base.mu >= self.base.k {
            return Err(Error::domain(
                "mu",
                format!("must be < k (got mu={}, k={})", self.base.mu, self.base.k),
            ));
        }
        Ok(())
    }
}

/// Truncation policy for every infinite series in the crate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesControl<T> {
    pub rel_tol: T,
    pub max_terms: usize,
}

impl<T: Scalar> SeriesControl<T> {
    pub fn new(rel_tol: T, max_terms: usize) -> Result<Self> {
        let c = Self { rel_tol, max_terms };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > T::zero() && self.rel_tol < T::one()) {
            return Err(Error::domain(
                "rel_tol",
                format!("must be in (0,1) (got {})", self.rel_tol),
            ));
        }
        if self.max_terms == 0 {
            return Err(Error::domain("max_terms", "must be >= 1"));
        }
        Ok(())
    }
}

impl<T: Scalar> Default for SeriesControl<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-14),
            max_terms: 500,
        }
    }
}

/// Γ_k(z) = k^(z/k − 1) Γ(z/k).
pub fn k_gamma<T: Scalar>(z: T, k: T) -> Result<T> {
    positive("z", z)?;
    positive("k", k)?;
    Ok(k_gamma_unchecked(z, k))
}

#[inline]
pub(crate) fn k_gamma_unchecked<T: Scalar>(z: T, k: T) -> T {
    let a = z / k;
    if k == T::one() {
        return a.gamma();
    }
    k.powf(a - T::one()) * a.gamma()
}

/// 1/Γ_k(z) for any real z, zero at the poles (z/k a nonpositive integer).
pub(crate) fn k_gamma_recip<T: Scalar>(z: T, k: T) -> T {
    let a = z / k;
    if a <= T::zero() && a == a.round() {
        return T::zero();
    }
    let g = a.gamma();
    if g.is_finite() && g != T::zero() {
        k.powf(T::one() - a) / g
    } else {
        let s = if a > T::zero() || (a.floor().to_i64().unwrap_or(0) % 2 == 0) {
            T::one()
        } else {
            -T::one()
        };
        s * ((T::one() - a) * k.ln() - a.ln_gamma()).exp()
    }
}

/// (g)_{n,k} = g (g+k) ... (g+(n−1)k); the empty product for n = 0.
pub fn k_pochhammer<T: Scalar>(g: T, n: usize, k: T) -> T {
    let mut acc = T::one();
    let mut x = g;
    for _ in 0..n {
        acc *= x;
        x += k;
    }
    acc
}

#[derive(Clone, Copy, Debug)]
struct Coef<T> {
    /// c_n when representable as a normal float.
    direct: Option<T>,
    ln_abs: T,
    sign: T,
}

/// Precomputed coefficients c_n = (γ)_{n,k} / (n! Γ_k(αn+μ)) of the
/// k-Mittag-Leffler series; build once, evaluate at many points.
#[derive(Clone, Debug)]
pub struct MittagLefflerK<T> {
    coefs: Vec<Coef<T>>,
    rel_tol: T,
    /// Index past which all coefficients vanish (γ a nonpositive multiple of k).
    terminates_at: Option<usize>,
    /// (k, α, μ, γ) for the double-word coefficients.
    indices: [T; 4],
    /// Double-word c_n, built on first use; `None` where the value is not
    /// a normal float or the Γ argument is not positive.
    wide: OnceLock<Vec<Option<Dd<T>>>>,
}

impl<T: Scalar> MittagLefflerK<T> {
    /// Coefficients of E^γ_{k,α,μ}; only k, α, μ, γ of `p` are used.
    pub fn new(p: &PrabhakarParams<T>, ctrl: &SeriesControl<T>) -> Result<Self> {
        p.validate()?;
        ctrl.validate()?;
        Ok(Self::build(p.k, p.alpha, p.mu, p.gamma, ctrl))
    }

    /// Same series without requiring μ > 0 (allows μ = 0, where c_0 = 0).
    pub(crate) fn build(k: T, alpha: T, mu: T, gamma: T, ctrl: &SeriesControl<T>) -> Self {
        let n_max = ctrl.max_terms;
        let mut coefs = Vec::with_capacity(n_max);
        let ln_k = k.ln();
        // running (γ)_{n,k} / n!, both directly and in log form
        let mut r = T::one();
        let mut ln_r = T::zero();
        let mut sign_r = T::one();
        let mut terminates_at = None;
        for n in 0..n_max {
            let nn = T::from_usize_lossy(n);
            if n > 0 {
                let f = gamma + (nn - T::one()) * k;
                if f == T::zero() {
                    terminates_at = Some(n);
                    break;
                }
                r = r * f / nn;
                ln_r += f.abs().ln() - nn.ln();
                if f < T::zero() {
                    sign_r = -sign_r;
                }
            }
            let arg = alpha * nn + mu;
            let a = arg / k;
            let gam = a.gamma();
            let rg = k_gamma_recip(arg, k);
            let ln_gk = (a - T::one()) * ln_k + a.ln_gamma();
            let (ln_abs, sign) = if rg == T::zero() {
                (T::neg_infinity(), T::zero())
            } else {
                (ln_r - ln_gk, sign_r * rg.signum())
            };
            let direct = if rg == T::zero() {
                Some(T::zero())
            } else if r.is_normal() && gam.is_finite() && gam.is_normal() {
                let c = r * rg;
                c.is_normal().then_some(c)
            } else {
                None
            };
            coefs.push(Coef { direct, ln_abs, sign });
        }
        Self {
            coefs,
            rel_tol: ctrl.rel_tol,
            terminates_at,
            indices: [k, alpha, mu, gamma],
            wide: OnceLock::new(),
        }
    }

    fn wide_coefficients(&self) -> &[Option<Dd<T>>] {
        self.wide.get_or_init(|| {
            let [k, alpha, mu, gamma] = self.indices;
            let kd = Dd::new(k);
            let ln_k = kd.ln();
            let mut ln_r = Dd::new(T::zero());
            let mut sign_r = T::one();
            let mut out = Vec::with_capacity(self.coefs.len());
            for n in 0..self.coefs.len() {
                let nn = T::from_usize_lossy(n);
                if n > 0 {
                    let f = Dd::new(gamma).add(Dd::new(k).mul_t(nn - T::one()));
                    if f.hi < T::zero() {
                        sign_r = -sign_r;
                    }
                    let fa = if f.hi < T::zero() { f.neg() } else { f };
                    ln_r = ln_r.add(fa.ln()).sub(Dd::new(nn).ln());
                }
                let a = Dd::new(alpha).mul_t(nn).add(Dd::new(mu)).div(kd);
                if !(a.hi > T::zero()) {
                    out.push(None);
                    continue;
                }
                let ln_gk = a.sub(Dd::new(T::one())).mul(ln_k).add(dd::ln_gamma(a));
                let c = ln_r.sub(ln_gk).exp();
                out.push(c.hi.is_normal().then(|| if sign_r < T::zero() { c.neg() } else { c }));
            }
            out
        })
    }

    /// Σ c_n w_n zⁿ accumulated in double-word arithmetic.
    fn eval_wide<F: Fn(usize) -> T>(&self, z: T, w: &F, fallback: T) -> T {
        let wide = self.wide_coefficients();
        let ln_z = z.abs().ln();
        let zs = z.signum();
        let mut acc = Dd::new(T::zero());
        let mut zpow = Dd::new(T::one());
        let mut zpow_plain = T::one();
        let mut prev = T::infinity();
        let mut max_term = T::zero();
        let floor_scale = T::epsilon() * T::epsilon();
        for (n, wn) in wide.iter().enumerate().take(self.coefs.len()) {
            if n > 0 {
                zpow = zpow.mul_t(z);
                zpow_plain *= z;
            }
            let term = match *wn {
                Some(c) if zpow.hi.is_normal() => c.mul(zpow).mul_t(w(n)),
                _ => {
                    let zsign = if n % 2 == 1 { zs } else { T::one() };
                    let mag = self.coef_value(n, ln_z * T::from_usize_lossy(n), zpow_plain);
                    Dd::new(mag * zsign * self.coefs[n].sign * w(n))
                }
            };
            acc = acc.add(term);
            let at = term.hi.abs();
            max_term = max_term.max(at);
            if n > 0 {
                let thresh = (self.rel_tol * acc.hi.abs()).max(floor_scale * max_term);
                if at <= thresh && at <= prev {
                    return acc.value();
                }
            }
            prev = at;
        }
        if self.terminates_at.is_some() {
            acc.value()
        } else {
            fallback
        }
    }

    /// Evaluates Σ c_n zⁿ with compensated summation.
    pub fn eval(&self, z: T) -> Result<T> {
        self.eval_weighted(z, |_| T::one())
    }

    /// Evaluates Σ c_n w_n zⁿ; `w` must be bounded so the stopping rule
    /// of the plain series still applies.
    pub fn eval_weighted<F: Fn(usize) -> T>(&self, z: T, w: F) -> Result<T> {
        if z == T::zero() {
            return Ok(self.coefs[0].sign * self.coef_value(0, T::zero(), T::one()) * w(0));
        }
        let ln_z = z.abs().ln();
        let mut acc = CompensatedSum::new();
        let mut zpow = T::one();
        let mut prev = T::infinity();
        let mut max_term = T::zero();
        let floor_scale = T::epsilon() * T::epsilon();
        let zs = z.signum();
        let mut last = T::zero();
        let mut abs_sum = T::zero();
        let limit = T::lit(CANCELLATION_LIMIT);
        for n in 0..self.coefs.len() {
            if n > 0 {
                zpow *= z;
            }
            let zsign = if n % 2 == 1 { zs } else { T::one() };
            let mag = self.coef_value(n, ln_z * T::from_usize_lossy(n), zpow);
            let term = mag * zsign * self.coefs[n].sign * w(n);
            acc.add(term);
            let s = acc.value();
            let at = term.abs();
            abs_sum += at;
            if at > max_term {
                max_term = at;
            }
            last = at;
            if n > 0 {
                let thresh = (self.rel_tol * s.abs()).max(floor_scale * max_term);
                if at <= thresh && at <= prev {
                    if abs_sum > limit * s.abs() {
                        return Ok(self.eval_wide(z, &w, s));
                    }
                    return Ok(s);
                }
            }
            prev = at;
        }
        if self.terminates_at.is_some() {
            let s = acc.value();
            if abs_sum > limit * s.abs() {
                return Ok(self.eval_wide(z, &w, s));
            }
            return Ok(s);
        }
        Err(Error::Truncation {
            terms: self.coefs.len(),
            partial_sum: acc.value().as_f64(),
            last_term: last.as_f64(),
        })
    }

    /// |c_n| |z|ⁿ, using the direct product when it is representable and
    /// the logarithmic form otherwise.
    #[inline]
    fn coef_value(&self, n: usize, n_ln_z: T, zpow: T) -> T {
        let c = &self.coefs[n];
        if let Some(d) = c.direct {
            let v = d.abs() * zpow.abs();
            if v.is_normal() || d == T::zero() {
                return v;
            }
        }
        if c.sign == T::zero() {
            return T::zero();
        }
        (c.ln_abs + n_ln_z).exp()
    }

    /// c_n, exposed for tests and diagnostics.
    pub fn coefficient(&self, n: usize) -> Option<T> {
        if let Some(t) = self.terminates_at {
            if n >= t {
                return Some(T::zero());
            }
        }
        self.coefs
            .get(n)
            .map(|c| c.direct.unwrap_or_else(|| c.sign * c.ln_abs.exp()))
    }
}

/// E^γ_{k,α,μ}(z) = Σ (γ)_{n,k} zⁿ / (Γ_k(αn+μ) n!).
pub fn ml_k<T: Scalar>(z: T, p: &PrabhakarParams<T>, ctrl: &SeriesControl<T>) -> Result<T> {
    if !z.is_finite() {
        return Err(Error::domain("z", "must be finite"));
    }
    MittagLefflerK::new(p, ctrl)?.eval(z)
}

/// Prabhakar kernel evaluator with cached series coefficients.
#[derive(Clone, Debug)]
pub struct PrabhakarKernel<T> {
    pub params: PrabhakarParams<T>,
    series: MittagLefflerK<T>,
}

impl<T: Scalar> PrabhakarKernel<T> {
    pub fn new(p: &PrabhakarParams<T>, ctrl: &SeriesControl<T>) -> Result<Self> {
        Ok(Self {
            params: *p,
            series: MittagLefflerK::new(p, ctrl)?,
        })
    }

    /// ε(t) = t^(μ/k − 1)/k · E^γ_{k,α,μ}(ω t^(α/k)) for t > 0, and 0 otherwise.
    pub fn eval(&self, t: T) -> Result<T> {
        if t <= T::zero() {
            return Ok(T::zero());
        }
        let p = &self.params;
        let e = self.series.eval(p.omega * t.powf(p.alpha / p.k))?;
        Ok(t.powf(p.mu / p.k - T::one()) / p.k * e)
    }

    /// The smooth factor E^γ_{k,α,μ}(ω t^(α/k)).
    pub fn smooth_factor(&self, t: T) -> Result<T> {
        let p = &self.params;
        self.series.eval(p.omega * t.max(T::zero()).powf(p.alpha / p.k))
    }

    pub fn series(&self) -> &MittagLefflerK<T> {
        &self.series
    }
}

pub fn prabhakar_kernel<T: Scalar>(t: T, p: &PrabhakarParams<T>, ctrl: &SeriesControl<T>) -> Result<T> {
    if t <= T::zero() {
        p.validate()?;
        return Ok(T::zero());
    }
    PrabhakarKernel::new(p, ctrl)?.eval(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(k: f64, a: f64, m: f64, g: f64, w: f64) -> PrabhakarParams<f64> {
        PrabhakarParams::new(k, a, m, g, w).unwrap()
    }

    #[test]
    fn k_gamma_examples() {
        for k in [0.3_f64, 1.0, 2.0, 7.5] {
            assert!((k_gamma(k, k).unwrap() - 1.0).abs() < 1e-14);
        }
        assert_eq!(k_gamma(4.0, 1.0).unwrap(), 6.0);
        assert!(k_gamma(0.0, 1.0).is_err());
        assert!(k_gamma(1.0, -2.0).is_err());
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(k_pochhammer(7.3, 0, 2.0), 1.0);
        assert_eq!(k_pochhammer(1.0, 3, 1.0), 6.0);
        assert_eq!(k_pochhammer(3.0, 2, 2.0), 15.0);
    }

    #[test]
    fn ml_k_trivial_cases() {
        let c = SeriesControl::default();
        let p = pp(1.7, 0.9, 2.3, 0.6, 0.4);
        let want = 1.0 / k_gamma(2.3, 1.7).unwrap();
        assert!((ml_k(0.0, &p, &c).unwrap() - want).abs() < 1e-15);
        let p0 = p.with_gamma(0.0);
        for z in [-3.0_f64, 0.5, 4.0] {
            assert!((ml_k(z, &p0, &c).unwrap() - want).abs() < 1e-15);
        }
    }

    #[test]
    fn ml_k_exponential() {
        let c = SeriesControl::default();
        let p = pp(1.0, 1.0, 1.0, 1.0, 0.0);
        let e = ml_k(1.0, &p, &c).unwrap();
        assert!((e - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn truncation_error_reports_partial_sum() {
        let c = SeriesControl::new(1e-14, 5).unwrap();
        let p = pp(1.0, 1.0, 1.0, 1.0, 0.0);
        match ml_k(10.0, &p, &c) {
            Err(Error::Truncation {
                terms,
                partial_sum,
                last_term,
            }) => {
                assert_eq!(terms, 5);
                assert!((partial_sum - (1.0 + 10.0 + 50.0 + 1000.0 / 6.0 + 10000.0 / 24.0)).abs() < 1e-9);
                assert!((last_term - 10000.0 / 24.0).abs() < 1e-9);
            }
            other => panic!("expected truncation, got {other:?}"),
        }
    }

    #[test]
    fn terminating_series_for_negative_integer_ratio() {
        // γ = −2k leaves a quadratic polynomial
        let c = SeriesControl::default();
        let p = pp(1.0, 1.0, 1.0, -2.0, 0.0);
        let z = 3.0;
        let want = 1.0 - 2.0 * z + z * z / 2.0;
        assert!((ml_k(z, &p, &c).unwrap() - want).abs() < 1e-13);
    }

    #[test]
    fn kernel_examples() {
        let c = SeriesControl::default();
        assert_eq!(prabhakar_kernel(-1.0, &pp(1.0, 1.0, 1.0, 1.0, -1.0), &c).unwrap(), 0.0);
        let v = prabhakar_kernel(1.0, &pp(1.0, 1.0, 1.0, 1.0, -1.0), &c).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
        let p = pp(2.5, 1.3, 0.7, 0.4, 0.0);
        let v = prabhakar_kernel(1.0, &p, &c).unwrap();
        assert!((v - 1.0 / (2.5 * k_gamma(0.7, 2.5).unwrap())).abs() < 1e-15);
    }

    #[test]
    fn large_argument_uses_log_coefficients() {
        // k = 4 makes (γ)_{n,k}/n! overflow long before the series is done
        let c = SeriesControl::default();
        let p = pp(4.0, 4.0, 4.0, 4.0, 0.0);
        // E^k_{k,k,k}(z) = E^1_{1,1,1}(z) * k^0 = e^z
        let v = ml_k(30.0, &p, &c).unwrap();
        assert!((v / 30.0f64.exp() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn single_precision_instantiation() {
        let c = SeriesControl::<f32>::default();
        let p = PrabhakarParams::<f32>::new(1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        let e = ml_k(1.0f32, &p, &c).unwrap();
        assert!((e - std::f32::consts::E).abs() < 1e-6);
    }

    #[test]
    fn hilfer_param_checks() {
        let b = pp(1.0, 1.0, 0.5, 0.0, 0.0);
        assert!(HilferParams::new(b, 1.5).is_err());
        assert!(HilferParams::new(b.with_mu(1.0), 0.5).is_err());
        assert!(HilferParams::new(b, 0.0).is_ok());
    }
}

//! Identity suite: every proven equality of the operator calculus, checked
//! numerically with the two sides computed along different code paths.
//!
//! Reports are plain data; failures (including component errors) never
//! propagate as `Err`.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kspecial::{k_gamma, prabhakar_kernel, HilferParams, MittagLefflerK, PrabhakarParams, SeriesControl};
use crate::operators::{
    derivative_order, differentiate, hilfer_prabhakar_derivative, hilfer_stages, k_rl_integral, prabhakar_derivative,
    prabhakar_integral, regularized_hilfer_prabhakar_derivative, regularized_prabhakar_derivative, Grid1D,
    SampledFunction,
};
use crate::transforms::{
    laplace_kernel_closed, laplace_operator_closed, numerical_laplace, numerical_sumudu, sumudu_kernel_closed,
    sumudu_operator_closed, BoundaryData, LaplaceInput, OperatorKind, OperatorParams, TransformQuery,
};

type Params = PrabhakarParams<f64>;
type Hilfer = HilferParams<f64>;
type Control = SeriesControl<f64>;
type Grid = Grid1D<f64>;
type Samples = SampledFunction<f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityId {
    /// P^γ_{α,μ} P^σ_{α,ν} = P^{γ+σ}_{α,μ+ν}
    Composition,
    /// regularized Prabhakar derivative = plain one minus initial-value terms
    RegularizedRelation,
    /// regularized Hilfer-Prabhakar derivative = plain one minus f(0⁺) term
    HilferRegularizedRelation,
    /// γ = 0 gives the k-Hilfer derivative built from k-RL integrals
    ReduceGamma0Hilfer,
    ReduceNu0,
    ReduceNu1,
    ReduceK1Classical,
    LaplacePDeriv,
    LaplaceRegPDeriv,
    LaplaceHPDeriv,
    LaplaceRegHPDeriv,
    SumuduPIntegral,
    SumuduPDeriv,
    SumuduRegPDeriv,
    SumuduHPDeriv,
    SumuduRegHPDeriv,
    Duality,
}

impl IdentityId {
    pub const ALL: [IdentityId; 17] = [
        IdentityId::Composition,
        IdentityId::RegularizedRelation,
        IdentityId::HilferRegularizedRelation,
        IdentityId::ReduceGamma0Hilfer,
        IdentityId::ReduceNu0,
        IdentityId::ReduceNu1,
        IdentityId::ReduceK1Classical,
        IdentityId::LaplacePDeriv,
        IdentityId::LaplaceRegPDeriv,
        IdentityId::LaplaceHPDeriv,
        IdentityId::LaplaceRegHPDeriv,
        IdentityId::SumuduPIntegral,
        IdentityId::SumuduPDeriv,
        IdentityId::SumuduRegPDeriv,
        IdentityId::SumuduHPDeriv,
        IdentityId::SumuduRegHPDeriv,
        IdentityId::Duality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityId::Composition => "composition",
            IdentityId::RegularizedRelation => "regularized_relation",
            IdentityId::HilferRegularizedRelation => "hilfer_regularized_relation",
            IdentityId::ReduceGamma0Hilfer => "reduce_gamma0_hilfer",
            IdentityId::ReduceNu0 => "reduce_nu0",
            IdentityId::ReduceNu1 => "reduce_nu1",
            IdentityId::ReduceK1Classical => "reduce_k1_classical",
            IdentityId::LaplacePDeriv => "laplace_p_deriv",
            IdentityId::LaplaceRegPDeriv => "laplace_reg_p_deriv",
            IdentityId::LaplaceHPDeriv => "laplace_hp_deriv",
            IdentityId::LaplaceRegHPDeriv => "laplace_reg_hp_deriv",
            IdentityId::SumuduPIntegral => "sumudu_p_integral",
            IdentityId::SumuduPDeriv => "sumudu_p_deriv",
            IdentityId::SumuduRegPDeriv => "sumudu_reg_p_deriv",
            IdentityId::SumuduHPDeriv => "sumudu_hp_deriv",
            IdentityId::SumuduRegHPDeriv => "sumudu_reg_hp_deriv",
            IdentityId::Duality => "duality",
        }
    }

    fn transform_op(self) -> Option<(bool, OperatorKind)> {
        use IdentityId::*;
        Some(match self {
            LaplacePDeriv => (true, OperatorKind::PDeriv),
            LaplaceRegPDeriv => (true, OperatorKind::RegPDeriv),
            LaplaceHPDeriv => (true, OperatorKind::HPDeriv),
            LaplaceRegHPDeriv => (true, OperatorKind::RegHPDeriv),
            SumuduPIntegral => (false, OperatorKind::PIntegral),
            SumuduPDeriv => (false, OperatorKind::PDeriv),
            SumuduRegPDeriv => (false, OperatorKind::RegPDeriv),
            SumuduHPDeriv => (false, OperatorKind::HPDeriv),
            SumuduRegHPDeriv => (false, OperatorKind::RegHPDeriv),
            _ => return None,
        })
    }
}

/// Operands with analytic values, derivatives, Taylor data and transforms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFunction {
    One,
    T,
    T2,
    ExpNeg,
    Sin,
    OnePlusT,
    OnePlusTPlusT2,
    TExpNeg,
    /// The Prabhakar kernel itself; only meaningful for kernel-level checks.
    Kernel,
}

impl TestFunction {
    pub fn value(self, t: f64) -> f64 {
        match self {
            TestFunction::One => 1.0,
            TestFunction::T => t,
            TestFunction::T2 => t * t,
            TestFunction::ExpNeg => (-t).exp(),
            TestFunction::Sin => t.sin(),
            TestFunction::OnePlusT => 1.0 + t,
            TestFunction::OnePlusTPlusT2 => 1.0 + t + t * t,
            TestFunction::TExpNeg => t * (-t).exp(),
            TestFunction::Kernel => f64::NAN,
        }
    }

    pub fn derivative(self, t: f64) -> f64 {
        match self {
            TestFunction::One => 0.0,
            TestFunction::T => 1.0,
            TestFunction::T2 => 2.0 * t,
            TestFunction::ExpNeg => -(-t).exp(),
            TestFunction::Sin => t.cos(),
            TestFunction::OnePlusT => 1.0,
            TestFunction::OnePlusTPlusT2 => 1.0 + 2.0 * t,
            TestFunction::TExpNeg => (1.0 - t) * (-t).exp(),
            TestFunction::Kernel => f64::NAN,
        }
    }

    /// f⁽ʲ⁾(0); `None` past the last nonzero term of a polynomial.
    pub fn taylor_derivative(self, j: usize) -> Option<f64> {
        let sign = |n: usize| if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        match self {
            TestFunction::One => (j == 0).then_some(1.0),
            TestFunction::T => (j <= 1).then_some(if j == 1 { 1.0 } else { 0.0 }),
            TestFunction::T2 => (j <= 2).then_some(if j == 2 { 2.0 } else { 0.0 }),
            TestFunction::ExpNeg => Some(sign(j)),
            TestFunction::Sin => Some(if j.is_multiple_of(2) { 0.0 } else { sign(j / 2) }),
            TestFunction::OnePlusT => (j <= 1).then_some(1.0),
            TestFunction::OnePlusTPlusT2 => (j <= 2).then_some(if j == 2 { 2.0 } else { 1.0 }),
            TestFunction::TExpNeg => Some(if j == 0 { 0.0 } else { sign(j - 1) * j as f64 }),
            TestFunction::Kernel => None,
        }
    }

    /// ∫₀^∞ e^{−st} f(t) dt.
    pub fn laplace(self, s: f64) -> f64 {
        match self {
            TestFunction::One => 1.0 / s,
            TestFunction::T => 1.0 / (s * s),
            TestFunction::T2 => 2.0 / (s * s * s),
            TestFunction::ExpNeg => 1.0 / (s + 1.0),
            TestFunction::Sin => 1.0 / (s * s + 1.0),
            TestFunction::OnePlusT => 1.0 / s + 1.0 / (s * s),
            TestFunction::OnePlusTPlusT2 => 1.0 / s + 1.0 / (s * s) + 2.0 / (s * s * s),
            TestFunction::TExpNeg => 1.0 / ((s + 1.0) * (s + 1.0)),
            TestFunction::Kernel => f64::NAN,
        }
    }

    pub fn sumudu(self, u: f64) -> f64 {
        self.laplace(1.0 / u) / u
    }

    pub fn name(self) -> &'static str {
        match self {
            TestFunction::One => "one",
            TestFunction::T => "t",
            TestFunction::T2 => "t2",
            TestFunction::ExpNeg => "exp_neg",
            TestFunction::Sin => "sin",
            TestFunction::OnePlusT => "one_plus_t",
            TestFunction::OnePlusTPlusT2 => "one_plus_t_plus_t2",
            TestFunction::TExpNeg => "t_exp_neg",
            TestFunction::Kernel => "kernel",
        }
    }

    fn sample(self, grid: Grid) -> Samples {
        SampledFunction::from_fn(grid, |t| self.value(t)).with_derivative_fn(|t| self.derivative(t))
    }

    fn sample_values(self, grid: Grid) -> Samples {
        SampledFunction::from_fn(grid, |t| self.value(t))
    }
}

/// Parameter assignment of a case. `sigma`/`mu2` are the second integral's
/// indices (composition); `u` the transform variable; `horizon`, when set,
/// replaces the grid end for transform-level checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseParams {
    pub k: f64,
    pub alpha: f64,
    pub mu: f64,
    pub gamma: f64,
    pub omega: f64,
    pub nu: f64,
    pub sigma: f64,
    pub mu2: f64,
    pub u: f64,
    pub horizon: Option<f64>,
}

impl CaseParams {
    pub fn new(k: f64, alpha: f64, mu: f64, gamma: f64, omega: f64) -> Self {
        Self {
            k,
            alpha,
            mu,
            gamma,
            omega,
            nu: 0.5,
            sigma: 0.0,
            mu2: 0.0,
            u: 1.0,
            horizon: None,
        }
    }

    pub fn nu(mut self, nu: f64) -> Self {
        self.nu = nu;
        self
    }

    pub fn second(mut self, sigma: f64, mu2: f64) -> Self {
        self.sigma = sigma;
        self.mu2 = mu2;
        self
    }

    pub fn at(mut self, u: f64) -> Self {
        self.u = u;
        self
    }

    pub fn horizon(mut self, t: f64) -> Self {
        self.horizon = Some(t);
        self
    }

    pub fn prabhakar(&self) -> Result<Params> {
        PrabhakarParams::new(self.k, self.alpha, self.mu, self.gamma, self.omega)
    }

    pub fn hilfer(&self) -> Result<Hilfer> {
        HilferParams::new(self.prabhakar()?, self.nu)
    }

    fn key(&self) -> [f64; 10] {
        [
            self.k,
            self.alpha,
            self.mu,
            self.gamma,
            self.omega,
            self.nu,
            self.sigma,
            self.mu2,
            self.u,
            self.horizon.unwrap_or(0.0),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCase {
    pub identity_id: IdentityId,
    #[serde(flatten)]
    pub params: CaseParams,
    pub test_function_id: TestFunction,
}

impl IdentityCase {
    pub fn new(identity_id: IdentityId, params: CaseParams, test_function_id: TestFunction) -> Self {
        Self {
            identity_id,
            params,
            test_function_id,
        }
    }

    /// Hypotheses of the identity; violations become failed reports.
    pub fn validate(&self) -> Result<()> {
        use IdentityId::*;
        let p = self.params.prabhakar()?;
        let id = self.identity_id;
        let kernel_ok = matches!(id, ReduceK1Classical | Duality);
        if self.test_function_id == TestFunction::Kernel && !kernel_ok {
            return Err(Error::domain(
                "test_function_id",
                "kernel is only valid for kernel-level identities",
            ));
        }
        match id {
            HilferRegularizedRelation
            | ReduceNu0
            | ReduceNu1
            | LaplaceHPDeriv
            | LaplaceRegHPDeriv
            | SumuduHPDeriv
            | SumuduRegHPDeriv => {
                self.params.hilfer()?;
            }
            ReduceGamma0Hilfer => {
                self.params.hilfer()?;
                if p.gamma != 0.0 {
                    return Err(Error::domain("gamma", "must be 0 for this reduction"));
                }
            }
            ReduceK1Classical => {
                if p.k != 1.0 {
                    return Err(Error::domain("k", "must be 1 for the classical reduction"));
                }
            }
            Composition => {
                PrabhakarParams::new(p.k, p.alpha, self.params.mu2, self.params.sigma, p.omega)?;
            }
            Duality => {
                self.params.hilfer()?;
            }
            _ => {}
        }
        if let Some((_, OperatorKind::PDeriv)) = id.transform_op() {
            if derivative_order(p.mu, p.k) != 1 {
                return Err(Error::domain("mu", "must be < k for transform-level derivative checks"));
            }
        }
        if id.transform_op().is_some() || id == Duality {
            if !(self.params.u > 0.0) {
                return Err(Error::domain("u", "must be > 0"));
            }
            let u = self.params.u;
            match id.transform_op() {
                Some((true, _)) => {
                    laplace_kernel_closed(&TransformQuery::laplace(u)?, &p)?;
                }
                _ => {
                    sumudu_kernel_closed(&TransformQuery::sumudu(u)?, &p)?;
                }
            }
        }
        Ok(())
    }
}

/// Outcome of one case. `passed` requires the error bound and, for
/// discretization-limited identities, a refinement ratio ≤ 0.6 whenever the
/// error at N is above 1e−10.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    #[serde(flatten)]
    pub case: IdentityCase,
    pub grid_size: usize,
    pub max_abs_err: f64,
    pub max_rel_err: f64,
    pub refined_rel_err: Option<f64>,
    pub threshold: f64,
    pub passed: bool,
    pub lhs_path: String,
    pub rhs_path: String,
    pub diagnostic: Option<String>,
}

/// Ratio required between errors at 2N and N.
pub const REFINEMENT_RATIO: f64 = 0.6;
/// Below this error the refinement ratio is not meaningful.
pub const REFINEMENT_FLOOR: f64 = 1e-10;
/// Profiles are compared on x ≥ WINDOW·T, away from endpoint singularities.
pub const WINDOW: f64 = 0.1;

/// Default error bound and whether a refinement check applies.
pub fn threshold(case: &IdentityCase) -> (f64, bool) {
    use IdentityId::*;
    match case.identity_id {
        Composition => (5e-4, true),
        RegularizedRelation | HilferRegularizedRelation => (1e-3, true),
        ReduceGamma0Hilfer => (5e-4, true),
        ReduceNu0 | ReduceNu1 => (1e-10, false),
        ReduceK1Classical if case.test_function_id == TestFunction::Kernel => (1e-12, false),
        ReduceK1Classical => (5e-4, true),
        LaplacePDeriv | LaplaceRegPDeriv | LaplaceHPDeriv | LaplaceRegHPDeriv => (1e-3, true),
        SumuduPIntegral | SumuduPDeriv | SumuduRegPDeriv | SumuduHPDeriv | SumuduRegHPDeriv => (5e-3, true),
        Duality => (1e-12, false),
    }
}

enum Sides {
    /// Profiles on a grid; compared on the window.
    Profiles { lhs: Vec<f64>, rhs: Vec<f64>, grid: Grid },
    /// Independent scalar pairs.
    Scalars { lhs: Vec<f64>, rhs: Vec<f64> },
}

struct Evaluation {
    sides: Sides,
    lhs_path: &'static str,
    rhs_path: &'static str,
}

struct Errors {
    abs: f64,
    rel: f64,
}

fn measure(s: &Sides) -> Errors {
    let (lhs, rhs, from) = match s {
        Sides::Profiles { lhs, rhs, grid } => {
            let from = ((WINDOW * (grid.count - 1) as f64).ceil() as usize).max(1);
            (lhs, rhs, from)
        }
        Sides::Scalars { lhs, rhs } => (lhs, rhs, 0),
    };
    let mut abs = 0.0_f64;
    let mut scale = 0.0_f64;
    for (l, r) in lhs.iter().zip(rhs).skip(from) {
        let d = (l - r).abs();
        // NaN must not be swallowed by max
        abs = if d.is_nan() || d > abs { d } else { abs };
        scale = scale.max(r.abs());
    }
    let rel = if scale > 0.0 {
        abs / scale
    } else if abs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Errors { abs, rel }
}

/// Σ_j f⁽ʲ⁾(0) kʲ x^{μ/k+j} E^γ_{k,α,μ+(j+1)k}(ω x^{α/k}): the Prabhakar
/// integral of a Taylor series, integrated term by term.
pub fn series_integral(f: TestFunction, p: &Params, x: &[f64], ctrl: &Control) -> Result<Vec<f64>> {
    let mut out = vec![0.0; x.len()];
    let mut small = 0;
    for j in 0..200 {
        let Some(dj) = f.taylor_derivative(j) else {
            return Ok(out);
        };
        if dj == 0.0 {
            continue;
        }
        let pj = PrabhakarParams::new(p.k, p.alpha, p.mu + (j as f64 + 1.0) * p.k, p.gamma, p.omega)?;
        let ml = MittagLefflerK::new(&pj, ctrl)?;
        let scale = dj * p.k.powi(j as i32);
        let mut tmax = 0.0_f64;
        let mut smax = 0.0_f64;
        for (o, &xi) in out.iter_mut().zip(x) {
            let t = if xi > 0.0 {
                scale * xi.powf(p.mu / p.k + j as f64) * ml.eval(p.omega * xi.powf(p.alpha / p.k))?
            } else {
                0.0
            };
            *o += t;
            tmax = tmax.max(t.abs());
            smax = smax.max(o.abs());
        }
        if tmax <= 1e-17 * smax {
            small += 1;
            if small >= 2 {
                return Ok(out);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Truncation {
        terms: 200,
        partial_sum: f64::NAN,
        last_term: f64::NAN,
    })
}

/// Classical (k = 1) Prabhakar functions, coded from the textbook series
/// with no shared machinery.
pub mod classical {
    /// E^γ_{α,β}(z) = Σ (γ)ₙ zⁿ / (n! Γ(αn+β)).
    pub fn mittag_leffler(alpha: f64, beta: f64, gamma: f64, z: f64) -> f64 {
        let rgamma = |x: f64| {
            if x <= 0.0 && x == x.floor() {
                0.0
            } else {
                1.0 / libm::tgamma(x)
            }
        };
        let mut sum = 0.0;
        let mut poch = 1.0; // (γ)ₙ zⁿ / n!
        let mut prev = f64::INFINITY;
        for n in 0..1000 {
            let term = poch * rgamma(alpha * n as f64 + beta);
            sum += term;
            if n > 3 && term.abs() <= 1e-17 * sum.abs() && term.abs() <= prev {
                break;
            }
            prev = term.abs();
            poch *= (gamma + n as f64) * z / (n as f64 + 1.0);
            if poch == 0.0 {
                break;
            }
        }
        sum
    }

    /// t^{β−1} E^γ_{α,β}(ω t^α).
    pub fn kernel(alpha: f64, beta: f64, gamma: f64, omega: f64, t: f64) -> f64 {
        t.powf(beta - 1.0) * mittag_leffler(alpha, beta, gamma, omega * t.powf(alpha))
    }

    /// Prabhakar integral of tʲ: j! x^{β+j} E^γ_{α,β+j+1}(ω x^α).
    pub fn integral_of_power(alpha: f64, beta: f64, gamma: f64, omega: f64, j: usize, x: f64) -> f64 {
        let fact: f64 = (1..=j).map(|i| i as f64).product();
        fact * x.powf(beta + j as f64) * mittag_leffler(alpha, beta + j as f64 + 1.0, gamma, omega * x.powf(alpha))
    }
}

fn window_grid(case: &IdentityCase, grid: &Grid) -> Result<Grid> {
    match case.params.horizon {
        Some(t) => Grid1D::uniform(t, grid.count - 1),
        None => Ok(*grid),
    }
}

fn evaluate(case: &IdentityCase, grid: &Grid, ctrl: &Control) -> Result<Evaluation> {
    use IdentityId::*;
    case.validate()?;
    let cp = &case.params;
    let f = case.test_function_id;
    let p = cp.prabhakar()?;
    let x = grid.nodes();
    let profiles = |lhs: Vec<f64>, rhs: Vec<f64>, lp, rp| Evaluation {
        sides: Sides::Profiles { lhs, rhs, grid: *grid },
        lhs_path: lp,
        rhs_path: rp,
    };
    match case.identity_id {
        Composition => {
            let p2 = PrabhakarParams::new(p.k, p.alpha, cp.mu2, cp.sigma, p.omega)?;
            let inner = prabhakar_integral(&f.sample_values(*grid), &p2, ctrl)?;
            let lhs = prabhakar_integral(&inner, &p, ctrl)?.values;
            let joint = PrabhakarParams::new(p.k, p.alpha, p.mu + cp.mu2, p.gamma + cp.sigma, p.omega)?;
            let rhs = series_integral(f, &joint, &x, ctrl)?;
            Ok(profiles(lhs, rhs, "prabhakar_integral twice", "termwise ml_k series"))
        }
        RegularizedRelation => {
            let lhs = regularized_prabhakar_derivative(&f.sample(*grid), &p, ctrl)?.values;
            let mut rhs = prabhakar_derivative(&f.sample_values(*grid), &p, ctrl)?.values;
            let m = derivative_order(p.mu, p.k);
            for n in 0..m {
                let fn0 = f.taylor_derivative(n).unwrap_or(0.0);
                if fn0 == 0.0 {
                    continue;
                }
                let nn = n as f64;
                let ml = MittagLefflerK::build(p.k, p.alpha, (nn + 1.0) * p.k - p.mu, -p.gamma, ctrl);
                for (r, &xi) in rhs.iter_mut().zip(&x).skip(1) {
                    let e = ml.eval(p.omega * xi.powf(p.alpha / p.k))?;
                    *r -= p.k.powi(n as i32) * xi.powf((nn * p.k - p.mu) / p.k) * e * fn0;
                }
            }
            Ok(profiles(
                lhs,
                rhs,
                "regularized_prabhakar_derivative",
                "prabhakar_derivative minus ml_k boundary terms",
            ))
        }
        HilferRegularizedRelation => {
            let hp = cp.hilfer()?;
            let lhs = regularized_hilfer_prabhakar_derivative(&f.sample(*grid), &hp, ctrl)?.values;
            let mut rhs = hilfer_prabhakar_derivative(&f.sample_values(*grid), &hp, ctrl)?.values;
            let f0 = f.value(0.0);
            let ml = MittagLefflerK::build(p.k, p.alpha, p.k - p.mu, -p.gamma, ctrl);
            for (r, &xi) in rhs.iter_mut().zip(&x).skip(1) {
                *r -= xi.powf(-p.mu / p.k) * ml.eval(p.omega * xi.powf(p.alpha / p.k))? * f0;
            }
            Ok(profiles(
                lhs,
                rhs,
                "regularized_hilfer_prabhakar_derivative",
                "hilfer_prabhakar_derivative minus ml_k boundary term",
            ))
        }
        ReduceGamma0Hilfer => {
            let hp = cp.hilfer()?;
            let lhs = hilfer_prabhakar_derivative(&f.sample_values(*grid), &hp, ctrl)?.values;
            // k d/dt I^{k−μ} f = f(0) x^{(k−μ)/k−1}/Γ_k(k−μ) + k I^{ν(k−μ)} I^{(1−ν)(k−μ)} f′
            let rest = p.k - p.mu;
            let mut g = SampledFunction::from_fn(*grid, |t| f.derivative(t));
            for order in [(1.0 - cp.nu) * rest, cp.nu * rest] {
                if order > 0.0 {
                    g = k_rl_integral(&g, order, p.k)?;
                }
            }
            let c = f.value(0.0) / k_gamma(rest, p.k)?;
            let rhs = x
                .iter()
                .zip(&g.values)
                .map(|(&xi, &gi)| {
                    let b = if xi > 0.0 { c * xi.powf(rest / p.k - 1.0) } else { 0.0 };
                    b + p.k * gi
                })
                .collect();
            Ok(profiles(
                lhs,
                rhs,
                "hilfer_prabhakar_derivative(gamma=0)",
                "k_rl_integral composition with boundary term",
            ))
        }
        ReduceNu0 => {
            let hp = HilferParams::new(p, 0.0)?;
            let s = f.sample_values(*grid);
            let lhs = hilfer_prabhakar_derivative(&s, &hp, ctrl)?.values;
            let rhs = prabhakar_derivative(&s, &p, ctrl)?.values;
            Ok(profiles(
                lhs,
                rhs,
                "hilfer_prabhakar_derivative(nu=0)",
                "prabhakar_derivative",
            ))
        }
        ReduceNu1 => {
            let hp = HilferParams::new(p, 1.0)?;
            let lhs = hilfer_prabhakar_derivative(&f.sample_values(*grid), &hp, ctrl)?.values;
            let rhs = regularized_prabhakar_derivative(&f.sample(*grid), &p, ctrl)?.values;
            Ok(profiles(
                lhs,
                rhs,
                "hilfer_prabhakar_derivative(nu=1)",
                "regularized_prabhakar_derivative",
            ))
        }
        ReduceK1Classical if f == TestFunction::Kernel => {
            let n = 64;
            let mut lhs = Vec::with_capacity(n);
            let mut rhs = Vec::with_capacity(n);
            for i in 1..=n {
                let t = 2.0 * i as f64 / n as f64;
                lhs.push(prabhakar_kernel(t, &p, ctrl)?);
                rhs.push(classical::kernel(p.alpha, p.mu, p.gamma, p.omega, t));
            }
            Ok(Evaluation {
                sides: Sides::Scalars { lhs, rhs },
                lhs_path: "prabhakar_kernel(k=1)",
                rhs_path: "classical kernel series",
            })
        }
        ReduceK1Classical => {
            let lhs = prabhakar_integral(&f.sample_values(*grid), &p, ctrl)?.values;
            let rhs = x
                .iter()
                .map(|&xi| {
                    let mut s = 0.0;
                    let mut j = 0;
                    while let Some(d) = f.taylor_derivative(j) {
                        if j > 60 {
                            break;
                        }
                        if d != 0.0 && xi > 0.0 {
                            let fact: f64 = (1..=j).map(|i| i as f64).product();
                            s += d / fact * classical::integral_of_power(p.alpha, p.mu, p.gamma, p.omega, j, xi);
                        }
                        j += 1;
                    }
                    s
                })
                .collect();
            Ok(profiles(lhs, rhs, "prabhakar_integral(k=1)", "classical closed form"))
        }
        Duality => duality(case, ctrl),
        id => {
            let (laplace, op) = id.transform_op().expect("remaining ids are transform identities");
            transform_identity(case, laplace, op, grid, ctrl)
        }
    }
}

/// Operator output on the grid and the boundary data its transform consumes,
/// read off the same discretization.
fn operator_output(
    op: OperatorKind,
    f: TestFunction,
    cp: &CaseParams,
    grid: &Grid,
    ctrl: &Control,
) -> Result<(Samples, BoundaryData<f64>, OperatorParams<f64>)> {
    let p = cp.prabhakar()?;
    let values = f.sample_values(*grid);
    let with_d = f.sample(*grid);
    Ok(match op {
        OperatorKind::PIntegral => (prabhakar_integral(&values, &p, ctrl)?, BoundaryData::none(), p.into()),
        OperatorKind::PDeriv => {
            let m = derivative_order(p.mu, p.k);
            let comp = PrabhakarParams::new(p.k, p.alpha, m as f64 * p.k - p.mu, -p.gamma, p.omega)?;
            let mut g = prabhakar_integral(&values, &comp, ctrl)?.values;
            let mut frozen = vec![0.0; m];
            // entry n needs the (m−n−1)-th derivative
            for order in 0..m {
                frozen[m - order - 1] = p.k.powi(order as i32) * g[0];
                g = differentiate(&g, grid.step);
            }
            (
                prabhakar_derivative(&values, &p, ctrl)?,
                BoundaryData::frozen(frozen),
                p.into(),
            )
        }
        OperatorKind::RegPDeriv => {
            let m = derivative_order(p.mu, p.k);
            let init = (0..m).map(|n| f.taylor_derivative(n).unwrap_or(0.0)).collect();
            (
                regularized_prabhakar_derivative(&with_d, &p, ctrl)?,
                BoundaryData::initial(init),
                p.into(),
            )
        }
        OperatorKind::HPDeriv => {
            let hp = cp.hilfer()?;
            let h0 = match hilfer_stages(&hp)?.0 {
                Some(pin) => prabhakar_integral(&values, &pin, ctrl)?.values[0],
                None => f.value(0.0),
            };
            (
                hilfer_prabhakar_derivative(&values, &hp, ctrl)?,
                BoundaryData::frozen(vec![h0]),
                hp.into(),
            )
        }
        OperatorKind::RegHPDeriv => {
            let hp = cp.hilfer()?;
            (
                regularized_hilfer_prabhakar_derivative(&with_d, &hp, ctrl)?,
                BoundaryData::initial(vec![f.value(0.0)]),
                hp.into(),
            )
        }
    })
}

fn transform_identity(
    case: &IdentityCase,
    laplace: bool,
    op: OperatorKind,
    grid: &Grid,
    ctrl: &Control,
) -> Result<Evaluation> {
    let cp = &case.params;
    let f = case.test_function_id;
    let (out, bd, params) = operator_output(op, f, cp, grid, ctrl)?;
    let tol = 1e-9;
    let (num, closed) = if laplace {
        let num = numerical_laplace(LaplaceInput::Sampled(&out), cp.u, None, tol)?.value;
        let q = TransformQuery::laplace(cp.u)?;
        (num, laplace_operator_closed(op, &q, &params, f.laplace(cp.u), &bd)?)
    } else {
        let num = numerical_sumudu(LaplaceInput::Sampled(&out), cp.u, None, tol)?.value;
        let q = TransformQuery::sumudu(cp.u)?;
        (num, sumudu_operator_closed(op, &q, &params, f.sumudu(cp.u), &bd)?)
    };
    Ok(Evaluation {
        sides: Sides::Scalars {
            lhs: vec![num],
            rhs: vec![closed],
        },
        lhs_path: if laplace {
            "numerical_laplace of operator output"
        } else {
            "numerical_sumudu of operator output"
        },
        rhs_path: if laplace {
            "laplace_operator_closed"
        } else {
            "sumudu_operator_closed"
        },
    })
}

fn duality(case: &IdentityCase, ctrl: &Control) -> Result<Evaluation> {
    let _ = ctrl;
    let cp = &case.params;
    let u = cp.u;
    let p = cp.prabhakar()?;
    let hp = cp.hilfer()?;
    let f = case.test_function_id;
    let mut lhs = vec![sumudu_kernel_closed(&TransformQuery::sumudu(u)?, &p)?];
    let mut rhs = vec![laplace_kernel_closed(&TransformQuery::laplace(1.0 / u)?, &p)? / u];
    if f != TestFunction::Kernel {
        let m = derivative_order(p.mu, p.k);
        let init: Vec<f64> = (0..m).map(|n| f.taylor_derivative(n).unwrap_or(0.0)).collect();
        // arbitrary frozen values: the identity is algebraic in them
        let frozen: Vec<f64> = (0..m).map(|n| 0.25 - 0.5 * n as f64).collect();
        for op in OperatorKind::ALL {
            let (bd, params): (BoundaryData<f64>, OperatorParams<f64>) = match op {
                OperatorKind::PIntegral => (BoundaryData::none(), p.into()),
                OperatorKind::PDeriv => (BoundaryData::frozen(frozen.clone()), p.into()),
                OperatorKind::RegPDeriv => (BoundaryData::initial(init.clone()), p.into()),
                OperatorKind::HPDeriv => (BoundaryData::frozen(vec![0.25]), hp.into()),
                OperatorKind::RegHPDeriv => (BoundaryData::initial(vec![init[0]]), hp.into()),
            };
            lhs.push(sumudu_operator_closed(
                op,
                &TransformQuery::sumudu(u)?,
                &params,
                f.sumudu(u),
                &bd,
            )?);
            rhs.push(
                laplace_operator_closed(op, &TransformQuery::laplace(1.0 / u)?, &params, f.laplace(1.0 / u), &bd)? / u,
            );
        }
    }
    Ok(Evaluation {
        sides: Sides::Scalars { lhs, rhs },
        lhs_path: "sumudu closed forms",
        rhs_path: "laplace closed forms at 1/u",
    })
}

fn failed(case: &IdentityCase, grid_size: usize, threshold: f64, e: Error) -> IdentityReport {
    IdentityReport {
        case: *case,
        grid_size,
        max_abs_err: f64::NAN,
        max_rel_err: f64::NAN,
        refined_rel_err: None,
        threshold,
        passed: false,
        lhs_path: String::new(),
        rhs_path: String::new(),
        diagnostic: Some(e.to_string()),
    }
}

/// Evaluate one identity on `grid` (and on the refined grid when the
/// identity is discretization-limited).
pub fn run_identity(case: &IdentityCase, grid: &Grid, ctrl: &Control) -> IdentityReport {
    let (thr, refine) = threshold(case);
    let grid_size = grid.count - 1;
    let g = match window_grid(case, grid) {
        Ok(g) => g,
        Err(e) => return failed(case, grid_size, thr, e),
    };
    let ev = match evaluate(case, &g, ctrl) {
        Ok(ev) => ev,
        Err(e) => return failed(case, grid_size, thr, e),
    };
    let err = measure(&ev.sides);
    let mut diagnostic = None;
    let refined_rel_err = if refine {
        match evaluate(case, &g.refined(), ctrl) {
            Ok(fine) => Some(measure(&fine.sides).rel),
            Err(e) => {
                diagnostic = Some(format!("refined grid: {e}"));
                None
            }
        }
    } else {
        None
    };
    let mut passed = err.rel <= thr && ev.lhs_path != ev.rhs_path;
    if refine {
        match refined_rel_err {
            Some(fine) if err.rel > REFINEMENT_FLOOR => {
                if !(fine <= REFINEMENT_RATIO * err.rel) {
                    passed = false;
                    diagnostic = Some(format!("error did not shrink under refinement ({} -> {fine})", err.rel));
                }
            }
            Some(_) => {}
            None => passed = false,
        }
    }
    IdentityReport {
        case: *case,
        grid_size,
        max_abs_err: err.abs,
        max_rel_err: err.rel,
        refined_rel_err,
        threshold: thr,
        passed,
        lhs_path: ev.lhs_path.to_string(),
        rhs_path: ev.rhs_path.to_string(),
        diagnostic,
    }
}

fn case_order(a: &IdentityCase, b: &IdentityCase) -> Ordering {
    a.identity_id
        .cmp(&b.identity_id)
        .then(a.test_function_id.cmp(&b.test_function_id))
        .then_with(|| {
            a.params
                .key()
                .iter()
                .zip(b.params.key().iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
}

/// Run every case in parallel; reports come back sorted by identity, test
/// function and parameters, independent of completion order.
pub fn run_suite(cases: &[IdentityCase], grid: &Grid, ctrl: &Control) -> Vec<IdentityReport> {
    let mut reports: Vec<IdentityReport> = cases.par_iter().map(|c| run_identity(c, grid, ctrl)).collect();
    reports.sort_by(|a, b| case_order(&a.case, &b.case));
    reports
}

/// The default suite grid: [0, 2] with 4096 cells.
pub fn default_grid() -> Grid {
    Grid1D::uniform(2.0, 4096).expect("valid grid")
}

/// Every identity over a small parameter grid chosen inside its hypotheses.
pub fn default_suite() -> Vec<IdentityCase> {
    use IdentityId::*;
    use TestFunction::*;
    let a = CaseParams::new(1.5, 0.8, 0.6, 0.4, -0.5);
    let b = CaseParams::new(1.0, 1.0, 0.5, 0.7, 0.6);
    let c = CaseParams::new(2.0, 1.5, 1.2, 0.3, -0.2);
    let m2 = CaseParams::new(1.0, 0.9, 1.4, 0.3, 0.4);
    let tf = CaseParams::new(1.5, 1.2, 0.9, 0.5, 0.05).nu(0.4).horizon(20.0);
    let classical = CaseParams::new(1.0, 0.8, 0.6, 0.4, -0.5);
    let classical2 = CaseParams::new(1.0, 1.5, 1.3, 2.0, 0.7);

    let mut v = Vec::new();
    let mut add = |id, p: CaseParams, fs: &[TestFunction]| {
        for &f in fs {
            v.push(IdentityCase::new(id, p, f));
        }
    };
    add(Composition, a.second(0.3, 0.9), &[One, T, Sin]);
    add(Composition, c.second(0.5, 0.4), &[ExpNeg]);
    add(RegularizedRelation, a, &[OnePlusTPlusT2, ExpNeg]);
    add(RegularizedRelation, c, &[OnePlusTPlusT2]);
    add(RegularizedRelation, m2, &[OnePlusTPlusT2]);
    add(HilferRegularizedRelation, a.nu(0.4), &[OnePlusTPlusT2]);
    add(HilferRegularizedRelation, c.nu(0.7), &[OnePlusTPlusT2, Sin]);
    add(
        ReduceGamma0Hilfer,
        CaseParams { gamma: 0.0, ..a }.nu(0.4),
        &[OnePlusT, ExpNeg],
    );
    add(ReduceGamma0Hilfer, CaseParams { gamma: 0.0, ..c }.nu(0.7), &[Sin]);
    add(ReduceNu0, a, &[OnePlusTPlusT2, ExpNeg]);
    add(ReduceNu0, c, &[Sin]);
    add(ReduceNu1, a, &[OnePlusT]);
    add(ReduceNu1, c, &[OnePlusT]);
    add(ReduceNu1, b, &[OnePlusT]);
    add(ReduceK1Classical, classical, &[Kernel, One, T2]);
    add(ReduceK1Classical, classical2, &[Kernel]);
    add(ReduceK1Classical, b, &[Kernel, OnePlusT]);
    for id in [LaplacePDeriv, LaplaceHPDeriv] {
        add(id, tf.at(1.5), &[TExpNeg]);
    }
    for id in [LaplaceRegPDeriv, LaplaceRegHPDeriv] {
        add(id, tf.at(1.5), &[TExpNeg, ExpNeg]);
    }
    for id in [SumuduPIntegral, SumuduPDeriv, SumuduHPDeriv] {
        add(id, tf.at(0.6), &[TExpNeg]);
    }
    for id in [SumuduRegPDeriv, SumuduRegHPDeriv] {
        add(id, tf.at(0.6), &[TExpNeg, ExpNeg]);
    }
    for u in [0.2, 0.5, 1.0, 2.0] {
        add(Duality, a.nu(0.4).at(u), &[ExpNeg]);
    }
    add(Duality, a.nu(0.4).at(0.7), &[Kernel]);
    add(Duality, c.nu(0.7).at(0.5), &[OnePlusTPlusT2]);
    v
}

/// Reports as a pretty-printed JSON array.
pub fn reports_to_json(reports: &[IdentityReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

//! Series solutions of the relaxation-type Cauchy problem
//! D^{γ,ν}_{α,μ,ω} y = λ P^δ_{α,μ,ω} y + f with frozen datum K, and of the
//! time-fractional diffusion problem with a regularized Hilfer-Prabhakar
//! time derivative, together with residual checks for both.

use std::f64::consts::PI;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kspecial::{HilferParams, MittagLefflerK, PrabhakarParams, SeriesControl};
use crate::operators::{
    hilfer_prabhakar_derivative, hilfer_prabhakar_derivative_weighted, hilfer_stages, prabhakar_integral,
    prabhakar_integral_weighted, Grid1D, PowerWeighted, SampledFunction, WeightedIntegralPlan,
};
use crate::scalar::{CompensatedSum, Scalar};

/// Fraction of the interval excluded from residual maxima near t = 0, where
/// the solution or its derivative is singular and finite differences are
/// not meaningful.
pub const RESIDUAL_WINDOW: f64 = 0.1;

#[derive(Clone, Debug, PartialEq)]
pub struct RelaxationProblem<T> {
    pub hp: HilferParams<T>,
    pub lambda: T,
    pub delta: T,
    pub k_init: T,
    /// `None` means f ≡ 0.
    pub forcing: Option<SampledFunction<T>>,
}

impl<T: Scalar> RelaxationProblem<T> {
    pub fn validate(&self) -> Result<()> {
        self.hp.validate()?;
        if !(self.delta >= T::zero()) {
            return Err(Error::domain("delta", "must be >= 0"));
        }
        if !(self.hp.base.gamma >= T::zero()) {
            return Err(Error::domain("gamma", "must be >= 0"));
        }
        if !(self.k_init >= T::zero()) {
            return Err(Error::domain("k_init", "must be >= 0"));
        }
        if !self.lambda.is_finite() {
            return Err(Error::domain("lambda", "must be finite"));
        }
        if let Some(f) = &self.forcing {
            f.validate()?;
        }
        Ok(())
    }

    /// Exponent q of the singular factor: y ~ K xᵠ/Γ_k(ν(k−μ)+μ) near 0.
    pub fn leading_power(&self) -> T {
        let b = &self.hp.base;
        (self.hp.nu * (b.k - b.mu) + b.mu) / b.k - T::one()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiffusionProblem<T> {
    /// ν does not enter the regularized derivative; kept for the record.
    pub hp: HilferParams<T>,
    pub k_diff: T,
    pub initial_profile: SampledFunction<T>,
    pub time_points: Vec<T>,
}

impl<T: Scalar> DiffusionProblem<T> {
    pub fn validate(&self) -> Result<()> {
        self.hp.validate()?;
        if !(self.k_diff > T::zero()) {
            return Err(Error::domain("k_diff", "must be > 0"));
        }
        let g = &self.initial_profile;
        g.validate()?;
        let peak = g.values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let edge = g.values[0].abs().max(g.values[g.len() - 1].abs());
        if edge > T::lit(1e-8) * peak {
            return Err(Error::domain(
                "initial_profile",
                format!("must decay toward the grid edges (|g| at edge {edge}, max {peak})"),
            ));
        }
        if self.time_points.iter().any(|t| !(*t > T::zero() && t.is_finite())) {
            return Err(Error::domain("time_points", "must all be > 0"));
        }
        Ok(())
    }

    /// Symmetric wavenumber grid with step 2π/L, L the periodic length of the
    /// spatial grid, reaching at least `p_max`. With this step the discrete
    /// transform pair is exact and mass is conserved to rounding.
    pub fn matched_p_grid(&self, p_max: T) -> Result<Grid1D<T>> {
        let g = &self.initial_profile.grid;
        let dp = T::TAU() / (g.step * T::from_usize_lossy(g.count));
        let m = (p_max / dp).ceil().to_usize().unwrap_or(0).max(1);
        Grid1D::new(-dp * T::from_usize_lossy(m), dp, 2 * m + 1)
    }
}

/// A truncated solution series.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesSolution<T> {
    pub values: SampledFunction<T>,
    pub terms_used: usize,
    pub tail_estimate: T,
    pub detail: SolutionDetail<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolutionDetail<T> {
    /// y = xᵠ φ + (forced part); the split lets residuals treat the
    /// singular factor exactly.
    Relaxation {
        singular: PowerWeighted<T>,
        forced: Option<Vec<T>>,
    },
    Diffusion {
        time: T,
    },
}

struct SeriesSum<T> {
    sum: T,
    terms: usize,
    max_term: T,
    last: T,
}

/// Σ_{n≥0} term(n) with the crate's stopping rule.
fn sum_terms<T: Scalar>(ctrl: &SeriesControl<T>, mut term: impl FnMut(usize) -> Result<T>) -> Result<SeriesSum<T>> {
    let mut acc = CompensatedSum::new();
    let mut prev = T::infinity();
    let mut max_term = T::zero();
    let mut last = T::zero();
    for n in 0..ctrl.max_terms {
        let t = term(n)?;
        if !t.is_finite() {
            return Err(Error::Evaluation(format!("non-finite series term {n}")));
        }
        acc.add(t);
        let s = acc.value();
        let at = t.abs();
        max_term = max_term.max(at);
        last = at;
        if n > 0 {
            let thresh = (ctrl.rel_tol * s.abs()).max(T::epsilon() * T::epsilon() * max_term);
            if at <= thresh && at <= prev {
                return Ok(SeriesSum {
                    sum: s,
                    terms: n + 1,
                    max_term,
                    last: at,
                });
            }
        }
        prev = at;
    }
    Err(Error::Truncation {
        terms: ctrl.max_terms,
        partial_sum: acc.value().as_f64(),
        last_term: last.as_f64(),
    })
}

fn max_abs_from<T: Scalar>(v: &[T], from: usize) -> T {
    v.iter().skip(from).fold(T::zero(), |m, x| m.max(x.abs()))
}

/// y(x) = K Σ λⁿ x^{βₙ/k−1} E^{gₙ}_{k,α,βₙ}(ω x^{α/k}) + Σ λⁿ P^{γ+n(δ+γ)}_{α,μ(1+2n)} f,
/// βₙ = ν(k−μ)+μ(1+2n), gₙ = n(δ+γ)+γ(1−ν). Both sums share one truncation
/// index, chosen from the grid max-norm of the newest term (nodes ≥ 1).
pub fn solve_relaxation<T: Scalar>(
    prob: &RelaxationProblem<T>,
    grid: &Grid1D<T>,
    ctrl: &SeriesControl<T>,
) -> Result<SeriesSolution<T>> {
    prob.validate()?;
    ctrl.validate()?;
    grid.validate()?;
    if grid.origin != T::zero() {
        return Err(Error::domain("grid", "origin must be 0"));
    }
    if let Some(f) = &prob.forcing {
        if f.grid != *grid {
            return Err(Error::Contract("forcing must live on the solution grid".into()));
        }
    }
    let b = prob.hp.base;
    let (k, mu, nu) = (b.k, b.mu, prob.hp.nu);
    let q = prob.leading_power();
    let x = grid.nodes();
    let n_nodes = grid.count;
    let xq: Vec<T> = x
        .iter()
        .map(|&xi| if xi > T::zero() { xi.powf(q) } else { T::zero() })
        .collect();
    let xa: Vec<T> = x.iter().map(|&xi| b.omega * xi.powf(b.alpha / k)).collect();
    let x2mu: Vec<T> = x.iter().map(|&xi| xi.powf(T::lit(2.0) * mu / k)).collect();

    let mut phi = vec![T::zero(); n_nodes];
    let mut forced = prob.forcing.as_ref().map(|_| vec![T::zero(); n_nodes]);
    let mut phi_pow = vec![T::one(); n_nodes]; // x^{2nμ/k}
    let mut lam_n = T::one();
    let mut prev_norm = T::infinity();
    let mut growth = 0;
    let mut first_norm = T::one();
    let two = T::lit(2.0);
    for n in 0..ctrl.max_terms {
        let nn = T::from_usize_lossy(n);
        let mut term_y = vec![T::zero(); n_nodes];
        if lam_n != T::zero() && prob.k_init != T::zero() {
            let beta_n = nu * (k - mu) + mu * (T::one() + two * nn);
            let g_n = nn * (prob.delta + b.gamma) + b.gamma * (T::one() - nu);
            let ser = MittagLefflerK::new(&PrabhakarParams::new(k, b.alpha, beta_n, g_n, b.omega)?, ctrl)?;
            let scale = prob.k_init * lam_n;
            let tphi: Vec<T> = (0..n_nodes)
                .into_par_iter()
                .map(|i| Ok(scale * phi_pow[i] * ser.eval(xa[i])?))
                .collect::<Result<_>>()?;
            for i in 0..n_nodes {
                phi[i] += tphi[i];
                term_y[i] += xq[i] * tphi[i];
            }
        }
        if let (Some(f), Some(acc)) = (&prob.forcing, forced.as_mut()) {
            if lam_n != T::zero() {
                let pn = PrabhakarParams::new(
                    k,
                    b.alpha,
                    mu * (T::one() + two * nn),
                    b.gamma + nn * (prob.delta + b.gamma),
                    b.omega,
                )?;
                let tf = prabhakar_integral(f, &pn, ctrl)?;
                for i in 0..n_nodes {
                    acc[i] += lam_n * tf.values[i];
                    term_y[i] += lam_n * tf.values[i];
                }
            }
        }
        let norm = max_abs_from(&term_y, 1);
        if !norm.is_finite() {
            return Err(Error::Divergence(format!("term {n} is not finite")));
        }
        let y_norm = (1..n_nodes)
            .map(|i| (xq[i] * phi[i] + forced.as_ref().map_or(T::zero(), |f| f[i])).abs())
            .fold(T::zero(), T::max);
        if n > 0 && norm <= ctrl.rel_tol * y_norm {
            return Ok(assemble(grid, q, phi, forced, n + 1, norm));
        }
        if n == 0 {
            first_norm = norm.max(T::min_positive_value());
        }
        // Transient growth is normal for entire series; it only becomes an
        // error once rounding in the sum can no longer be trusted.
        if n > 0 && norm > prev_norm {
            growth += 1;
            if growth >= 3 && norm > divergence_limit::<T>() * first_norm {
                return Err(Error::Divergence(format!(
                    "solution terms grew for {growth} consecutive orders (term {n} has max-norm {norm})"
                )));
            }
        } else {
            growth = 0;
        }
        prev_norm = norm;
        lam_n *= prob.lambda;
        for (p, &x2) in phi_pow.iter_mut().zip(&x2mu) {
            *p *= x2;
        }
    }
    Err(Error::Truncation {
        terms: ctrl.max_terms,
        partial_sum: f64::NAN,
        last_term: prev_norm.as_f64(),
    })
}

fn assemble<T: Scalar>(
    grid: &Grid1D<T>,
    q: T,
    phi: Vec<T>,
    forced: Option<Vec<T>>,
    terms: usize,
    tail: T,
) -> SeriesSolution<T> {
    let singular = PowerWeighted {
        power: q,
        regular: SampledFunction {
            grid: *grid,
            values: phi,
            derivative_values: None,
        },
    };
    let mut values = singular.values();
    if let Some(f) = &forced {
        for (v, fv) in values.iter_mut().zip(f) {
            *v += *fv;
        }
    }
    SeriesSolution {
        values: SampledFunction {
            grid: *grid,
            values,
            derivative_values: None,
        },
        terms_used: terms,
        tail_estimate: tail,
        detail: SolutionDetail::Relaxation { singular, forced },
    }
}

fn relaxation_parts<T: Scalar>(y: &SeriesSolution<T>) -> Result<(&PowerWeighted<T>, Option<&Vec<T>>)> {
    match &y.detail {
        SolutionDetail::Relaxation { singular, forced } => Ok((singular, forced.as_ref())),
        SolutionDetail::Diffusion { .. } => Err(Error::Contract("expected a relaxation solution".into())),
    }
}

/// max over nodes x ≥ 0.1·T of |D^{γ,ν} y − λ P^δ y − f|. The singular part
/// of y goes through the weighted operators; the window skips the boundary
/// layer where finite differences of a singular profile mean nothing.
pub fn relaxation_residual<T: Scalar>(
    prob: &RelaxationProblem<T>,
    y: &SeriesSolution<T>,
    ctrl: &SeriesControl<T>,
) -> Result<T> {
    prob.validate()?;
    let (singular, forced) = relaxation_parts(y)?;
    let grid = singular.regular.grid;
    let b = prob.hp.base;
    let pd = PrabhakarParams::new(b.k, b.alpha, b.mu, prob.delta, b.omega)?;

    let mut lhs = if prob.k_init != T::zero() {
        let d = hilfer_prabhakar_derivative_weighted(singular, &prob.hp, ctrl)?.values;
        let i = prabhakar_integral_weighted(singular, &pd, ctrl)?.values;
        d.iter().zip(&i).map(|(a, c)| *a - prob.lambda * *c).collect()
    } else {
        vec![T::zero(); grid.count]
    };
    if let (Some(fv), Some(f)) = (forced, &prob.forcing) {
        let fs = SampledFunction::new(grid, fv.clone())?;
        let d = hilfer_prabhakar_derivative(&fs, &prob.hp, ctrl)?.values;
        let i = prabhakar_integral(&fs, &pd, ctrl)?.values;
        for n in 0..grid.count {
            lhs[n] += d[n] - prob.lambda * i[n] - f.values[n];
        }
    }
    let from = window_start(&grid);
    Ok(max_abs_from(&lhs, from))
}

fn window_start<T: Scalar>(g: &Grid1D<T>) -> usize {
    let cells = g.count - 1;
    ((T::lit(RESIDUAL_WINDOW) * T::from_usize_lossy(cells))
        .ceil()
        .to_usize()
        .unwrap_or(1))
    .max(1)
}

/// Estimate of lim_{x→0⁺} P^{−γ(1−ν)}_{α,(1−ν)(k−μ)} y, which should equal K.
/// Linear extrapolation from nodes 1 and 2.
pub fn frozen_datum_estimate<T: Scalar>(
    prob: &RelaxationProblem<T>,
    y: &SeriesSolution<T>,
    ctrl: &SeriesControl<T>,
) -> Result<T> {
    let (singular, forced) = relaxation_parts(y)?;
    let grid = singular.regular.grid;
    if grid.count < 3 {
        return Err(Error::domain("grid", "needs at least 3 nodes"));
    }
    let (inner, _) = hilfer_stages(&prob.hp)?;
    let mut h = match inner {
        Some(pin) => {
            let plan = WeightedIntegralPlan::new(&pin, ctrl, &grid, singular.power)?;
            let v = &singular.regular.values;
            [plan.apply_at(v, 1), plan.apply_at(v, 2)]
        }
        None => {
            let v = singular.values();
            [v[1], v[2]]
        }
    };
    if let Some(fv) = forced {
        match inner {
            Some(pin) => {
                let fs = SampledFunction::new(grid, fv.clone())?;
                let r = prabhakar_integral(&fs, &pin, ctrl)?;
                h[0] += r.values[1];
                h[1] += r.values[2];
            }
            None => {
                h[0] += fv[1];
                h[1] += fv[2];
            }
        }
    }
    Ok(T::lit(2.0) * h[0] - h[1])
}

/// ĝ(p) = Σ h g(xⱼ) e^{−ipxⱼ} (trapezoid; the profile vanishes at the edges).
fn fourier_coefficients<T: Scalar>(g: &SampledFunction<T>, p: &[T]) -> Vec<Complex<T>> {
    let x = g.grid.nodes();
    p.par_iter()
        .map(|&pm| {
            let mut re = CompensatedSum::new();
            let mut im = CompensatedSum::new();
            for (xj, gj) in x.iter().zip(&g.values) {
                let (s, c) = (pm * *xj).sin_cos();
                re.add(*gj * c);
                im.add(-*gj * s);
            }
            Complex::new(re.value() * g.grid.step, im.value() * g.grid.step)
        })
        .collect()
}

fn trapezoid_weights<T: Scalar>(g: &Grid1D<T>) -> Vec<T> {
    let mut w = vec![g.step; g.count];
    w[0] = g.step / T::lit(2.0);
    w[g.count - 1] = g.step / T::lit(2.0);
    w
}

/// Per-order Mittag-Leffler series shared by every mode.
struct ModeSeries<T> {
    /// E^{nγ}_{k,α,nμ+k}
    multiplier: Vec<MittagLefflerK<T>>,
    /// E^{nγ}_{k,α,nμ}, n ≥ 1 (index 0 unused)
    derivative: Vec<Option<MittagLefflerK<T>>>,
}

impl<T: Scalar> ModeSeries<T> {
    fn new(p: &PrabhakarParams<T>, ctrl: &SeriesControl<T>) -> Self {
        let n_max = ctrl.max_terms.min(400);
        let sctrl = *ctrl;
        let multiplier = (0..n_max)
            .into_par_iter()
            .map(|n| {
                let nn = T::from_usize_lossy(n);
                MittagLefflerK::build(p.k, p.alpha, nn * p.mu + p.k, nn * p.gamma, &sctrl)
            })
            .collect();
        let derivative = (0..n_max)
            .into_par_iter()
            .map(|n| {
                (n > 0).then(|| {
                    let nn = T::from_usize_lossy(n);
                    MittagLefflerK::build(p.k, p.alpha, nn * p.mu, nn * p.gamma, &sctrl)
                })
            })
            .collect();
        Self { multiplier, derivative }
    }

    fn ctrl(&self, ctrl: &SeriesControl<T>) -> SeriesControl<T> {
        SeriesControl {
            rel_tol: ctrl.rel_tol,
            max_terms: self.multiplier.len(),
        }
    }
}

/// Largest admissible term magnitude of a mode series; beyond it rounding
/// in the alternating sum exceeds 1e−8 of the O(1) result.
fn divergence_limit<T: Scalar>() -> T {
    T::lit(1e-8) / T::epsilon()
}

/// M(p,t) = Σ (−K)ⁿ p²ⁿ t^{nμ/k} E^{nγ}_{k,α,nμ+k}(ω t^{α/k}).
fn multiplier<T: Scalar>(
    ms: &ModeSeries<T>,
    p: &PrabhakarParams<T>,
    k_diff: T,
    wave: T,
    t: T,
    ctrl: &SeriesControl<T>,
) -> Result<SeriesSum<T>> {
    let z = p.omega * t.powf(p.alpha / p.k);
    let x = -k_diff * wave * wave * t.powf(p.mu / p.k);
    let mut xn = T::one();
    let r = sum_terms(&ms.ctrl(ctrl), |n| {
        let v = xn * ms.multiplier[n].eval(z)?;
        xn *= x;
        Ok(v)
    })
    .map_err(|e| mode_error(e, wave, t))?;
    if r.max_term > divergence_limit() {
        return Err(mode_error(
            Error::Divergence(format!("term magnitude {}", r.max_term)),
            wave,
            t,
        ));
    }
    Ok(r)
}

/// ψ(p,t) with ∂ₜM = t^{μ/k−1} ψ:
/// ψ = Σ_{n≥1} (−Kp²)ⁿ t^{(n−1)μ/k} E^{nγ}_{k,α,nμ}(ω t^{α/k}) / k.
fn multiplier_rate<T: Scalar>(
    ms: &ModeSeries<T>,
    p: &PrabhakarParams<T>,
    k_diff: T,
    wave: T,
    t: T,
    ctrl: &SeriesControl<T>,
) -> Result<T> {
    let z = p.omega * t.powf(p.alpha / p.k);
    let c = -k_diff * wave * wave;
    if c == T::zero() {
        return Ok(T::zero());
    }
    let x = c * t.powf(p.mu / p.k);
    let mut xn = c;
    let mut sctrl = ms.ctrl(ctrl);
    sctrl.max_terms -= 1;
    let r = sum_terms(&sctrl, |n| {
        let v = xn * ms.derivative[n + 1].as_ref().expect("n+1 >= 1").eval(z)?;
        xn *= x;
        Ok(v)
    })
    .map_err(|e| mode_error(e, wave, t))?;
    Ok(r.sum / p.k)
}

fn mode_error(e: Error, wave: impl Scalar, t: impl Scalar) -> Error {
    Error::Divergence(format!(
        "mode p = {wave} at t = {t} does not converge ({e}); shrink the p-range"
    ))
}

/// u(x,t) = (1/2π) Σ w_m ĝ(p_m) M(p_m,t) e^{i p_m x} for every time point.
pub fn solve_diffusion<T: Scalar>(
    prob: &DiffusionProblem<T>,
    p_grid: &Grid1D<T>,
    ctrl: &SeriesControl<T>,
) -> Result<Vec<SeriesSolution<T>>> {
    prob.validate()?;
    ctrl.validate()?;
    p_grid.validate()?;
    let p = prob.hp.base;
    let waves = p_grid.nodes();
    let w = trapezoid_weights(p_grid);
    let ghat = fourier_coefficients(&prob.initial_profile, &waves);
    let ms = ModeSeries::new(&p, ctrl);
    let xg = prob.initial_profile.grid;
    let x = xg.nodes();
    let inv_2pi = T::one() / T::lit(2.0 * PI);

    prob.time_points
        .iter()
        .map(|&t| {
            let modes: Vec<SeriesSum<T>> = waves
                .par_iter()
                .map(|&pm| multiplier(&ms, &p, prob.k_diff, pm, t, ctrl))
                .collect::<Result<_>>()?;
            let coef: Vec<Complex<T>> = modes
                .iter()
                .zip(&ghat)
                .zip(&w)
                .map(|((m, g), wm)| *g * (m.sum * *wm * inv_2pi))
                .collect();
            let values = synthesize(&coef, &waves, &x);
            let terms = modes.iter().map(|m| m.terms).max().unwrap_or(0);
            let tail = modes
                .iter()
                .zip(&coef)
                .map(|(m, c)| m.last * c.norm() / m.sum.abs().max(T::min_positive_value()))
                .fold(T::zero(), |a, b| a + b);
            Ok(SeriesSolution {
                values: SampledFunction::new(xg, values)?,
                terms_used: terms,
                tail_estimate: tail,
                detail: SolutionDetail::Diffusion { time: t },
            })
        })
        .collect()
}

fn synthesize<T: Scalar>(coef: &[Complex<T>], waves: &[T], x: &[T]) -> Vec<T> {
    x.par_iter()
        .map(|&xj| {
            let mut acc = CompensatedSum::new();
            for (c, &pm) in coef.iter().zip(waves) {
                let (s, co) = (pm * xj).sin_cos();
                acc.add(c.re * co - c.im * s);
            }
            acc.value()
        })
        .collect()
}

/// max over time points and interior spatial nodes of
/// |k P^{−γ}_{α,k−μ}[∂ₜu](x,t) − K ∂²u/∂x²(x,t)|.
///
/// ∂ₜu = t^{μ/k−1} ψ is synthesized from the termwise time derivative of the
/// multiplier and integrated with the weighted product rule on a grid of
/// `time_cells` cells over [0, t]; ∂²/∂x² uses centered differences.
pub fn diffusion_residual<T: Scalar>(
    prob: &DiffusionProblem<T>,
    p_grid: &Grid1D<T>,
    solutions: &[SeriesSolution<T>],
    ctrl: &SeriesControl<T>,
    time_cells: usize,
) -> Result<T> {
    prob.validate()?;
    if time_cells < 4 {
        return Err(Error::domain("time_cells", "must be >= 4"));
    }
    let p = prob.hp.base;
    let waves = p_grid.nodes();
    let w = trapezoid_weights(p_grid);
    let ghat = fourier_coefficients(&prob.initial_profile, &waves);
    let ms = ModeSeries::new(&p, ctrl);
    let xg = prob.initial_profile.grid;
    let x = xg.nodes();
    let inv_2pi = T::one() / T::lit(2.0 * PI);
    let reg = PrabhakarParams::new(p.k, p.alpha, p.k - p.mu, -p.gamma, p.omega)?;
    let q = p.mu / p.k - T::one();

    let mut worst = T::zero();
    for sol in solutions {
        let t = match sol.detail {
            SolutionDetail::Diffusion { time } => time,
            _ => return Err(Error::Contract("expected diffusion solutions".into())),
        };
        if sol.values.grid != xg {
            return Err(Error::Contract("solution grid differs from the profile grid".into()));
        }
        let tg = Grid1D::uniform(t, time_cells)?;
        let taus = tg.nodes();
        // ψ(p_m, τ_i), row-major by mode
        let rates: Vec<Vec<T>> = waves
            .par_iter()
            .map(|&pm| {
                taus.iter()
                    .map(|&tau| multiplier_rate(&ms, &p, prob.k_diff, pm, tau, ctrl))
                    .collect::<Result<Vec<T>>>()
            })
            .collect::<Result<_>>()?;
        let coef: Vec<Complex<T>> = ghat.iter().zip(&w).map(|(g, wm)| *g * (*wm * inv_2pi)).collect();
        let plan = WeightedIntegralPlan::new(&reg, ctrl, &tg, q)?;
        let last = tg.count - 1;
        let lhs: Vec<T> = x
            .par_iter()
            .map(|&xj| {
                let rot: Vec<Complex<T>> = coef
                    .iter()
                    .zip(&waves)
                    .map(|(c, &pm)| {
                        let (s, co) = (pm * xj).sin_cos();
                        *c * Complex::new(co, s)
                    })
                    .collect();
                let phi: Vec<T> = (0..tg.count)
                    .map(|i| {
                        let mut acc = CompensatedSum::new();
                        for (r, row) in rot.iter().zip(&rates) {
                            acc.add(r.re * row[i]);
                        }
                        acc.value()
                    })
                    .collect();
                p.k * plan.apply_at(&phi, last)
            })
            .collect();
        let u = &sol.values.values;
        let h2 = xg.step * xg.step;
        for j in 1..x.len() - 1 {
            let uxx = (u[j + 1] - T::lit(2.0) * u[j] + u[j - 1]) / h2;
            worst = worst.max((lhs[j] - prob.k_diff * uxx).abs());
        }
    }
    Ok(worst)
}

/// The multiplier M(p,t) on its own, for inspection and cross-checks.
pub fn diffusion_multiplier<T: Scalar>(
    hp: &HilferParams<T>,
    k_diff: T,
    wave: T,
    t: T,
    ctrl: &SeriesControl<T>,
) -> Result<T> {
    hp.validate()?;
    let ms = ModeSeries::new(&hp.base, ctrl);
    Ok(multiplier(&ms, &hp.base, k_diff, wave, t, ctrl)?.sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kspecial::k_gamma;

    fn hp(k: f64, a: f64, m: f64, g: f64, w: f64, nu: f64) -> HilferParams<f64> {
        HilferParams::new(PrabhakarParams::new(k, a, m, g, w).unwrap(), nu).unwrap()
    }

    #[test]
    fn single_term_when_lambda_vanishes() {
        let h = hp(1.3, 1.0, 0.6, 0.2, 0.3, 0.4);
        let prob = RelaxationProblem {
            hp: h,
            lambda: 0.0,
            delta: 0.1,
            k_init: 2.0,
            forcing: None,
        };
        let g = Grid1D::uniform(1.0, 64).unwrap();
        let c = SeriesControl::default();
        let y = solve_relaxation(&prob, &g, &c).unwrap();
        assert_eq!(y.terms_used, 2);
        let b0 = 0.4 * (1.3 - 0.6) + 0.6;
        let p0 = PrabhakarParams::new(1.3, 1.0, b0, 0.2 * 0.6, 0.3).unwrap();
        for i in [1, 10, 64] {
            let x = g.node(i);
            let want = 2.0 * x.powf(b0 / 1.3 - 1.0) * crate::kspecial::ml_k(0.3 * x.powf(1.0 / 1.3), &p0, &c).unwrap();
            assert!((y.values.values[i] - want).abs() < 1e-13 * want.abs());
        }
        assert!(y.values.values[0].is_infinite());
        let _ = k_gamma(1.0, 1.0);
    }

    #[test]
    fn zero_problem_has_zero_solution() {
        let prob = RelaxationProblem {
            hp: hp(1.0, 1.0, 0.5, 0.0, 0.0, 0.5),
            lambda: 0.7,
            delta: 0.0,
            k_init: 0.0,
            forcing: None,
        };
        let g = Grid1D::uniform(1.0, 32).unwrap();
        let c = SeriesControl::default();
        let y = solve_relaxation(&prob, &g, &c).unwrap();
        assert!(y.values.values.iter().all(|v| *v == 0.0));
        assert_eq!(relaxation_residual(&prob, &y, &c).unwrap(), 0.0);
    }

    #[test]
    fn classical_relaxation_reduction() {
        // k = 1, γ = δ = 0, ν = 1: y = K E_{2μ}(λ x^{2μ})
        let mu = 0.35;
        let lambda = -1.2;
        let prob = RelaxationProblem {
            hp: hp(1.0, 0.8, mu, 0.0, 0.4, 1.0),
            lambda,
            delta: 0.0,
            k_init: 1.5,
            forcing: None,
        };
        let g = Grid1D::uniform(2.0, 16).unwrap();
        let y = solve_relaxation(&prob, &g, &SeriesControl::default()).unwrap();
        for (i, x) in g.nodes().into_iter().enumerate() {
            let z = lambda * x.powf(2.0 * mu);
            let mut s = 0.0;
            let mut zn = 1.0;
            for n in 0..200 {
                s += zn / libm::tgamma(1.0 + 2.0 * mu * n as f64);
                zn *= z;
            }
            assert!((y.values.values[i] - 1.5 * s).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn divergence_is_reported() {
        let prob = RelaxationProblem {
            hp: hp(1.0, 1.0, 0.5, 0.0, 0.0, 1.0),
            lambda: 1e6,
            delta: 0.0,
            k_init: 1.0,
            forcing: None,
        };
        let g = Grid1D::uniform(4.0, 8).unwrap();
        let r = solve_relaxation(&prob, &g, &SeriesControl::default());
        assert!(matches!(r, Err(Error::Divergence(_))), "{r:?}");
    }

    #[test]
    fn multiplier_reductions() {
        let c = SeriesControl::default();
        let h = hp(2.0, 1.5, 1.2, 0.3, -0.2, 0.5);
        assert!((diffusion_multiplier(&h, 1.0, 0.0, 0.7, &c).unwrap() - 1.0).abs() < 1e-15);
        // k = 1, γ = 0: E_μ(−K p² t^μ)
        let h = hp(1.0, 0.7, 0.6, 0.0, 0.3, 0.5);
        let (kd, p, t) = (0.8, 1.3, 0.9_f64);
        let z = -kd * p * p * t.powf(0.6);
        let mut s = 0.0;
        let mut zn = 1.0;
        for n in 0..150 {
            s += zn / libm::tgamma(0.6 * n as f64 + 1.0);
            zn *= z;
        }
        assert!((diffusion_multiplier(&h, kd, p, t, &c).unwrap() - s).abs() < 1e-12);
    }

    #[test]
    fn profile_must_decay() {
        let g = Grid1D::new(-5.0, 0.1, 101).unwrap();
        let prob = DiffusionProblem {
            hp: hp(1.0, 1.0, 0.5, 0.0, 0.0, 0.5),
            k_diff: 1.0,
            initial_profile: SampledFunction::from_fn(g, |x: f64| (-x * x / 8.0).exp()),
            time_points: vec![0.5],
        };
        assert!(matches!(prob.validate(), Err(Error::Domain { .. })));
    }
}

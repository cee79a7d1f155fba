//! k-fractional integrals and derivatives of functions sampled on a uniform grid.
//!
//! Integrals use product integration: on every subinterval the operand is
//! interpolated linearly and integrated against the Prabhakar kernel with
//! weights that treat the kernel exactly (series moments on the singular
//! cell, 8-point Gauss-Legendre elsewhere). The scheme is exact for
//! piecewise-linear operands and second order for smooth ones.
//!
//! Operands of the form tᵠ φ(t) with a singular power q ∈ (−1, 0) go through
//! [`WeightedIntegralPlan`], which integrates the power exactly.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kspecial::{k_gamma_unchecked, HilferParams, PrabhakarKernel, PrabhakarParams, SeriesControl};
use crate::quadrature::{beta, jacobi_unit, legendre_unit, UnitRule};
use crate::scalar::Scalar;

const GL_POINTS: usize = 8;

/// Uniform grid `origin + i·step`, `i = 0..count`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D<T> {
    pub origin: T,
    pub step: T,
    pub count: usize,
}

impl<T: Scalar> Grid1D<T> {
    pub fn new(origin: T, step: T, count: usize) -> Result<Self> {
        let g = Self { origin, step, count };
        g.validate()?;
        Ok(g)
    }

    /// Grid on [0, end] with `intervals` cells.
    pub fn uniform(end: T, intervals: usize) -> Result<Self> {
        if !(end > T::zero()) {
            return Err(Error::domain("end", "must be > 0"));
        }
        Self::new(T::zero(), end / T::from_usize_lossy(intervals.max(1)), intervals + 1)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > T::zero() && self.step.is_finite()) {
            return Err(Error::domain("step", "must be > 0"));
        }
        if self.count < 2 {
            return Err(Error::domain("count", "must be >= 2"));
        }
        if !self.origin.is_finite() {
            return Err(Error::domain("origin", "must be finite"));
        }
        Ok(())
    }

    #[inline]
    pub fn node(&self, i: usize) -> T {
        self.origin + self.step * T::from_usize_lossy(i)
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.count).map(|i| self.node(i)).collect()
    }

    pub fn end(&self) -> T {
        self.node(self.count - 1)
    }

    /// Same interval with twice as many cells.
    pub fn refined(&self) -> Self {
        Self {
            origin: self.origin,
            step: self.step / T::lit(2.0),
            count: 2 * (self.count - 1) + 1,
        }
    }
}

/// Values of a function at every node of a grid, optionally with first
/// derivative samples. Membership in L¹ or AC¹ is the caller's business.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction<T> {
    pub grid: Grid1D<T>,
    pub values: Vec<T>,
    pub derivative_values: Option<Vec<T>>,
}

impl<T: Scalar> SampledFunction<T> {
    pub fn new(grid: Grid1D<T>, values: Vec<T>) -> Result<Self> {
        let f = Self {
            grid,
            values,
            derivative_values: None,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn from_fn(grid: Grid1D<T>, f: impl Fn(T) -> T) -> Self {
        let values = grid.nodes().into_iter().map(f).collect();
        Self {
            grid,
            values,
            derivative_values: None,
        }
    }

    pub fn with_derivative(mut self, d: Vec<T>) -> Result<Self> {
        self.derivative_values = Some(d);
        self.validate()?;
        Ok(self)
    }

    pub fn with_derivative_fn(mut self, d: impl Fn(T) -> T) -> Self {
        self.derivative_values = Some(self.grid.nodes().into_iter().map(d).collect());
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.values.len() != self.grid.count {
            return Err(Error::Contract(format!(
                "{} values for a grid of {} nodes",
                self.values.len(),
                self.grid.count
            )));
        }
        if let Some(d) = &self.derivative_values {
            if d.len() != self.grid.count {
                return Err(Error::Contract(format!(
                    "{} derivative values for a grid of {} nodes",
                    d.len(),
                    self.grid.count
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// f(t) = tᵠ φ(t) with φ sampled; lets integrals keep a singular power exact.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerWeighted<T> {
    pub power: T,
    pub regular: SampledFunction<T>,
}

impl<T: Scalar> PowerWeighted<T> {
    pub fn new(power: T, regular: SampledFunction<T>) -> Result<Self> {
        if !(power > -T::one()) {
            return Err(Error::domain("power", format!("must be > -1 (got {power})")));
        }
        regular.validate()?;
        Ok(Self { power, regular })
    }

    /// Samples of f itself; node 0 is infinite when the power is negative.
    pub fn values(&self) -> Vec<T> {
        let g = &self.regular.grid;
        self.regular
            .values
            .iter()
            .enumerate()
            .map(|(i, &phi)| power_times(g.node(i), self.power, phi))
            .collect()
    }
}

fn power_times<T: Scalar>(t: T, q: T, phi: T) -> T {
    if t == T::zero() {
        if q == T::zero() {
            phi
        } else if q > T::zero() || phi == T::zero() {
            T::zero()
        } else {
            T::infinity() * phi.signum()
        }
    } else {
        t.powf(q) * phi
    }
}

fn require_origin_zero<T: Scalar>(g: &Grid1D<T>) -> Result<()> {
    g.validate()?;
    if g.origin != T::zero() {
        return Err(Error::domain("grid", format!("origin must be 0 (got {})", g.origin)));
    }
    Ok(())
}

/// m = ⌊μ/k⌋ + 1.
pub fn derivative_order<T: Scalar>(mu: T, k: T) -> usize {
    (mu / k).floor().to_usize().unwrap_or(0) + 1
}

/// Second-order first derivative of uniformly spaced samples: centered in
/// the interior, three-point one-sided at both ends. Needs ≥ 3 samples.
pub fn differentiate<T: Scalar>(values: &[T], h: T) -> Vec<T> {
    let n = values.len();
    assert!(n >= 3, "differentiate needs at least 3 samples");
    let two_h = T::lit(2.0) * h;
    let mut out = Vec::with_capacity(n);
    out.push((T::lit(-3.0) * values[0] + T::lit(4.0) * values[1] - values[2]) / two_h);
    for i in 1..n - 1 {
        out.push((values[i + 1] - values[i - 1]) / two_h);
    }
    out.push((T::lit(3.0) * values[n - 1] - T::lit(4.0) * values[n - 2] + values[n - 3]) / two_h);
    out
}

/// Cell weights of the Prabhakar convolution on a fixed grid. With
/// `out_i = Σ_{d<i} (A_d f_{i−1−d} + B_d f_{i−d})` the product-integration
/// rule becomes a discrete convolution.
#[derive(Clone, Debug)]
pub struct ConvolutionPlan<T> {
    grid: Grid1D<T>,
    a: Vec<T>,
    b: Vec<T>,
}

/// Moments of ε on the singular cell [0, h]:
/// (∫ ε(s) s/h ds, ∫ ε(s) (h−s)/h ds), by integrating the series termwise.
fn singular_cell_moments<T: Scalar>(kernel: &PrabhakarKernel<T>, h: T) -> Result<(T, T)> {
    let p = &kernel.params;
    let z = p.omega * h.powf(p.alpha / p.k);
    let an = |n: usize| (p.alpha * T::from_usize_lossy(n) + p.mu) / p.k;
    let scale = h.powf(p.mu / p.k) / p.k;
    let a = kernel.series().eval_weighted(z, |n| T::one() / (an(n) + T::one()))?;
    let b = kernel
        .series()
        .eval_weighted(z, |n| T::one() / (an(n) * (an(n) + T::one())))?;
    Ok((scale * a, scale * b))
}

impl<T: Scalar> ConvolutionPlan<T> {
    pub fn new(p: &PrabhakarParams<T>, ctrl: &SeriesControl<T>, grid: &Grid1D<T>) -> Result<Self> {
        require_origin_zero(grid)?;
        let kernel = PrabhakarKernel::new(p, ctrl)?;
        let h = grid.step;
        let cells = grid.count - 1;
        let gl: UnitRule<T> = legendre_unit(GL_POINTS);
        let (a0, b0) = singular_cell_moments(&kernel, h)?;
        let rest: Vec<(T, T)> = (1..cells)
            .into_par_iter()
            .map(|d| {
                let base = T::from_usize_lossy(d);
                let mut a = T::zero();
                let mut b = T::zero();
                for (&tau, &w) in gl.nodes.iter().zip(&gl.weights) {
                    let e = kernel.eval((base + tau) * h)? * w;
                    a += e * tau;
                    b += e * (T::one() - tau);
                }
                Ok((a * h, b * h))
            })
            .collect::<Result<_>>()?;
        let mut a = Vec::with_capacity(cells);
        let mut b = Vec::with_capacity(cells);
        a.push(a0);
        b.push(b0);
        for (x, y) in rest {
            a.push(x);
            b.push(y);
        }
        Ok(Self { grid: *grid, a, b })
    }

    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    /// Integral at node `i` of the operand samples `f`.
    pub fn apply_at(&self, f: &[T], i: usize) -> T {
        let mut s = T::zero();
        for d in 0..i {
            s += self.a[d] * f[i - 1 - d] + self.b[d] * f[i - d];
        }
        s
    }

    pub fn apply(&self, f: &[T]) -> Result<Vec<T>> {
        if f.len() != self.grid.count {
            return Err(Error::Contract(format!(
                "{} samples for a plan over {} nodes",
                f.len(),
                self.grid.count
            )));
        }
        Ok((0..f.len()).into_par_iter().map(|i| self.apply_at(f, i)).collect())
    }
}

/// Product-integration plan for operands tᵠ φ(t). The power is integrated
/// exactly (Gauss-Jacobi on the first cell, Gauss-Legendre with the exact
/// power elsewhere, a Beta-function series on the doubly singular corner).
/// On the cell ending at the output node tᵠ is interpolated linearly against
/// the exact kernel moments, plus a Gauss-Jacobi correction for its
/// curvature. Work is O(N²) per application.
#[derive(Clone, Debug)]
pub struct WeightedIntegralPlan<T> {
    grid: Grid1D<T>,
    q: T,
    a0: T,
    b0: T,
    gl: UnitRule<T>,
    gj: UnitRule<T>,
    /// ε((d+1−τ_g)h) for d ≥ 1, row-major by d.
    kern: Vec<T>,
    /// (j+τ_g)ᵠ hᵠ for j ≥ 1.
    pow: Vec<T>,
    /// ε((i−v_g)h) for i ≥ 2 at Gauss-Jacobi nodes.
    first_cell: Vec<T>,
    /// σ_g and w_g·h^{μ/k}·E(ω(hσ_g)^{α/k})/k for ∫₀ʰ ε(s) g(s) ds ≈ Σ w̃_g g(hσ_g).
    last_nodes: Vec<T>,
    last_weights: Vec<T>,
    corner: (T, T),
    node0: Node0<T>,
}

#[derive(Clone, Copy, Debug)]
enum Node0<T> {
    Zero,
    Finite(T),
    Infinite,
}

impl<T: Scalar> WeightedIntegralPlan<T> {
    pub fn new(p: &PrabhakarParams<T>, ctrl: &SeriesControl<T>, grid: &Grid1D<T>, power: T) -> Result<Self> {
        require_origin_zero(grid)?;
        if !(power > -T::one()) {
            return Err(Error::domain("power", format!("must be > -1 (got {power})")));
        }
        let kernel = PrabhakarKernel::new(p, ctrl)?;
        let h = grid.step;
        let cells = grid.count - 1;
        let g = GL_POINTS;
        let gl: UnitRule<T> = legendre_unit(g);
        let gj: UnitRule<T> = jacobi_unit(g, power.as_f64())?;
        let (a0, b0) = singular_cell_moments(&kernel, h)?;

        let kern: Vec<T> = (1..cells.max(1))
            .into_par_iter()
            .map(|d| {
                let base = T::from_usize_lossy(d + 1);
                gl.nodes
                    .iter()
                    .map(|&tau| kernel.eval((base - tau) * h))
                    .collect::<Result<Vec<T>>>()
            })
            .collect::<Result<Vec<_>>>()?
            .concat();
        let hq = h.powf(power);
        let pow: Vec<T> = (1..cells.max(1))
            .flat_map(|j| {
                let base = T::from_usize_lossy(j);
                gl.nodes
                    .iter()
                    .map(move |&tau| (base + tau).powf(power) * hq)
                    .collect::<Vec<_>>()
            })
            .collect();
        let first_cell: Vec<T> = (2..=cells)
            .into_par_iter()
            .map(|i| {
                let base = T::from_usize_lossy(i);
                gj.nodes
                    .iter()
                    .map(|&v| kernel.eval((base - v) * h))
                    .collect::<Result<Vec<T>>>()
            })
            .collect::<Result<Vec<_>>>()?
            .concat();

        let lj: UnitRule<T> = jacobi_unit(g, (p.mu / p.k - T::one()).as_f64())?;
        let hm = h.powf(p.mu / p.k) / p.k;
        let last_weights = lj
            .nodes
            .iter()
            .zip(&lj.weights)
            .map(|(&v, &w)| Ok(w * hm * kernel.smooth_factor(v * h)?))
            .collect::<Result<Vec<T>>>()?;

        // ∫₀ʰ ε(h−t) tᵠ [φ₀(1−t/h) + φ₁ t/h] dt, termwise
        let z = p.omega * h.powf(p.alpha / p.k);
        let an = |n: usize| (p.alpha * T::from_usize_lossy(n) + p.mu) / p.k;
        let scale = h.powf(p.mu / p.k + power) / p.k;
        let c0 = kernel
            .series()
            .eval_weighted(z, |n| beta(an(n) + T::one(), power + T::one()))?;
        let c1 = kernel.series().eval_weighted(z, |n| beta(an(n), power + T::lit(2.0)))?;

        let e = power + p.mu / p.k;
        let tiny = T::lit(1e-12);
        let node0 = if e > tiny {
            Node0::Zero
        } else if e.abs() <= tiny {
            let kq = p.k * (power + T::one());
            Node0::Finite(k_gamma_unchecked(kq, p.k) / k_gamma_unchecked(p.mu + kq, p.k))
        } else {
            Node0::Infinite
        };

        Ok(Self {
            grid: *grid,
            q: power,
            a0,
            b0,
            gl,
            gj,
            kern,
            pow,
            first_cell,
            last_nodes: lj.nodes,
            last_weights,
            corner: (scale * c0, scale * c1),
            node0,
        })
    }

    pub fn power(&self) -> T {
        self.q
    }

    /// Integral at node `i` of tᵠ φ(t), given φ samples.
    pub fn apply_at(&self, phi: &[T], i: usize) -> T {
        if i == 0 {
            return match self.node0 {
                Node0::Zero => T::zero(),
                Node0::Finite(c) => c * phi[0],
                Node0::Infinite if phi[0] == T::zero() => T::zero(),
                Node0::Infinite => T::infinity() * phi[0].signum(),
            };
        }
        if i == 1 {
            return self.corner.0 * phi[0] + self.corner.1 * phi[1];
        }
        let g = self.gl.nodes.len();
        let h = self.grid.step;
        let mut s = T::zero();

        // first cell, power singularity at t = 0
        let row = &self.first_cell[(i - 2) * g..(i - 1) * g];
        let mut c = T::zero();
        for ((&v, &w), &e) in self.gj.nodes.iter().zip(&self.gj.weights).zip(row) {
            c += w * e * (phi[0] * (T::one() - v) + phi[1] * v);
        }
        s += c * h.powf(self.q + T::one());

        // regular cells
        let mut c = T::zero();
        for j in 1..i - 1 {
            let d = i - 1 - j;
            let kr = &self.kern[(d - 1) * g..d * g];
            let pr = &self.pow[(j - 1) * g..j * g];
            let (p0, p1) = (phi[j], phi[j + 1]);
            for gi in 0..g {
                let tau = self.gl.nodes[gi];
                c += self.gl.weights[gi] * kr[gi] * pr[gi] * (p0 + (p1 - p0) * tau);
            }
        }
        s += c * h;

        // last cell, kernel singularity
        let t0 = self.grid.node(i - 1);
        let t1 = self.grid.node(i);
        let (q0, q1) = (t0.powf(self.q), t1.powf(self.q));
        s += self.a0 * q0 * phi[i - 1] + self.b0 * q1 * phi[i];
        if self.q != T::zero() {
            // tᵠ minus its chord, with s = tᵢ − t measured from the node
            let mut c = T::zero();
            for (&sg, &w) in self.last_nodes.iter().zip(&self.last_weights) {
                let t = t1 - sg * h;
                let chord = q1 + (q0 - q1) * sg;
                c += w * (t.powf(self.q) - chord) * (phi[i] + (phi[i - 1] - phi[i]) * sg);
            }
            s += c;
        }
        s
    }

    pub fn apply(&self, phi: &[T]) -> Result<Vec<T>> {
        if phi.len() != self.grid.count {
            return Err(Error::Contract(format!(
                "{} samples for a plan over {} nodes",
                phi.len(),
                self.grid.count
            )));
        }
        Ok((0..phi.len()).into_par_iter().map(|i| self.apply_at(phi, i)).collect())
    }
}

fn integral_values<T: Scalar>(
    f: &[T],
    p: &PrabhakarParams<T>,
    ctrl: &SeriesControl<T>,
    grid: &Grid1D<T>,
) -> Result<Vec<T>> {
    ConvolutionPlan::new(p, ctrl, grid)?.apply(f)
}

/// k-Prabhakar integral (ε * f)(xᵢ) at every node; node 0 is 0.
pub fn prabhakar_integral<T: Scalar>(
    f: &SampledFunction<T>,
    p: &PrabhakarParams<T>,
    ctrl: &SeriesControl<T>,
) -> Result<SampledFunction<T>> {
    f.validate()?;
    require_origin_zero(&f.grid)?;
    let values = integral_values(&f.values, p, ctrl, &f.grid)?;
    SampledFunction::new(f.grid, values)
}

/// k-Prabhakar integral of tᵠ φ(t). Node 0 follows the exact limit: 0,
/// finite when q + μ/k = 0, infinite below that.
pub fn prabhakar_integral_weighted<T: Scalar>(
    f: &PowerWeighted<T>,
    p: &PrabhakarParams<T>,
    ctrl: &SeriesControl<T>,
) -> Result<SampledFunction<T>> {
    let plan = WeightedIntegralPlan::new(p, ctrl, &f.regular.grid, f.power)?;
    SampledFunction::new(f.regular.grid, plan.apply(&f.regular.values)?)
}

/// k-Riemann-Liouville integral of order μ (the γ = 0 Prabhakar integral).
pub fn k_rl_integral<T: Scalar>(f: &SampledFunction<T>, mu: T, k: T) -> Result<SampledFunction<T>> {
    let p = PrabhakarParams::new(k, T::one(), mu, T::zero(), T::zero())?;
    prabhakar_integral(f, &p, &SeriesControl::default())
}

fn check_fd_grid<T: Scalar>(g: &Grid1D<T>, m: usize) -> Result<()> {
    if g.count < 2 * m + 2 {
        return Err(Error::domain(
            "grid",
            format!(
                "too coarse for {m}-fold differentiation ({} nodes, need {})",
                g.count,
                2 * m + 2
            ),
        ));
    }
    Ok(())
}

fn complementary<T: Scalar>(p: &PrabhakarParams<T>, m: usize) -> Result<PrabhakarParams<T>> {
    PrabhakarParams::new(p.k, p.alpha, T::from_usize_lossy(m) * p.k - p.mu, -p.gamma, p.omega)
}

/// k-Prabhakar derivative (d/dt)^m [kᵐ P^{−γ}_{α,mk−μ} f] with m = ⌊μ/k⌋+1.
/// Node 0 comes from the one-sided stencil and is boundary quality only.
pub fn prabhakar_derivative<T: Scalar>(
    f: &SampledFunction<T>,
    p: &PrabhakarParams<T>,
    ctrl: &SeriesControl<T>,
) -> Result<SampledFunction<T>> {
    f.validate()?;
    require_origin_zero(&f.grid)?;
    p.validate()?;
    let m = derivative_order(p.mu, p.k);
    check_fd_grid(&f.grid, m)?;
    let q = complementary(p, m)?;
    let km = p.k.powi(m as i32);
    let mut g: Vec<T> = integral_values(&f.values, &q, ctrl, &f.grid)?
        .into_iter()
        .map(|v| v * km)
        .collect();
    for _ in 0..m {
        g = differentiate(&g, f.grid.step);
    }
    SampledFunction::new(f.grid, g)
}

/// m-th derivative samples: analytic first derivative when supplied,
/// finite differences for the rest.
fn nth_derivative<T: Scalar>(f: &SampledFunction<T>, m: usize) -> Result<Vec<T>> {
    let (mut d, remaining) = match &f.derivative_values {
        Some(d1) => (d1.clone(), m - 1),
        None => (f.values.clone(), m),
    };
    if remaining > 0 {
        check_fd_grid(&f.grid, remaining)?;
    }
    for _ in 0..remaining {
        d = differentiate(&d, f.grid.step);
    }
    Ok(d)
}

/// Regularized k-Prabhakar derivative kᵐ P^{−γ}_{α,mk−μ} f⁽ᵐ⁾.
pub fn regularized_prabhakar_derivative<T: Scalar>(
    f: &SampledFunction<T>,
    p: &PrabhakarParams<T>,
    ctrl: &SeriesControl<T>,
) -> Result<SampledFunction<T>> {
    f.validate()?;
    require_origin_zero(&f.grid)?;
    p.validate()?;
    let m = derivative_order(p.mu, p.k);
    let dm = nth_derivative(f, m)?;
    let q = complementary(p, m)?;
    let km = p.k.powi(m as i32);
    let values = integral_values(&dm, &q, ctrl, &f.grid)?
        .into_iter()
        .map(|v| v * km)
        .collect();
    SampledFunction::new(f.grid, values)
}

pub type HilferStages<T> = (Option<PrabhakarParams<T>>, Option<PrabhakarParams<T>>);

/// Inner and outer integral parameters of the Hilfer-Prabhakar derivative;
/// `None` where ν = 1 or ν = 0 makes that order vanish.
pub fn hilfer_stages<T: Scalar>(hp: &HilferParams<T>) -> Result<HilferStages<T>> {
    hp.validate()?;
    let b = &hp.base;
    let one = T::one();
    let rest = b.k - b.mu;
    let inner = if hp.nu < one {
        Some(PrabhakarParams::new(
            b.k,
            b.alpha,
            (one - hp.nu) * rest,
            -b.gamma * (one - hp.nu),
            b.omega,
        )?)
    } else {
        None
    };
    let outer = if hp.nu > T::zero() {
        Some(PrabhakarParams::new(
            b.k,
            b.alpha,
            hp.nu * rest,
            -b.gamma * hp.nu,
            b.omega,
        )?)
    } else {
        None
    };
    Ok((inner, outer))
}

/// k-Hilfer-Prabhakar derivative k P^{−γν}_{α,ν(k−μ)} d/dt P^{−γ(1−ν)}_{α,(1−ν)(k−μ)} f.
///
/// Evaluated as k d/dt [P_out P_in f] (exact for bounded f, where the inner
/// integral vanishes at 0). The ν = 0 case differentiates P_in f directly;
/// ν = 1 integrates the finite-difference derivative of f.
pub fn hilfer_prabhakar_derivative<T: Scalar>(
    f: &SampledFunction<T>,
    hp: &HilferParams<T>,
    ctrl: &SeriesControl<T>,
) -> Result<SampledFunction<T>> {
    f.validate()?;
    require_origin_zero(&f.grid)?;
    check_fd_grid(&f.grid, 1)?;
    let (inner, outer) = hilfer_stages(hp)?;
    let k = hp.base.k;
    let h = f.grid.step;
    let values = match (inner, outer) {
        (Some(pin), None) => differentiate(&integral_values(&f.values, &pin, ctrl, &f.grid)?, h),
        (None, Some(pout)) => integral_values(&differentiate(&f.values, h), &pout, ctrl, &f.grid)?,
        (Some(pin), Some(pout)) => {
            let inner_vals = integral_values(&f.values, &pin, ctrl, &f.grid)?;
            differentiate(&integral_values(&inner_vals, &pout, ctrl, &f.grid)?, h)
        }
        (None, None) => unreachable!("mu < k keeps one stage alive"),
    };
    SampledFunction::new(f.grid, values.into_iter().map(|v| v * k).collect())
}

/// Hilfer-Prabhakar derivative of tᵠ φ(t). The inner integral may stay
/// finite and nonzero at 0 (the frozen datum H₀); then
/// P_out[H′] = d/dt P_out H − ε_out(t) H₀. Node 0 is linearly extrapolated.
pub fn hilfer_prabhakar_derivative_weighted<T: Scalar>(
    f: &PowerWeighted<T>,
    hp: &HilferParams<T>,
    ctrl: &SeriesControl<T>,
) -> Result<SampledFunction<T>> {
    let grid = f.regular.grid;
    require_origin_zero(&grid)?;
    if f.power == T::zero() {
        return hilfer_prabhakar_derivative(&f.regular, hp, ctrl);
    }
    check_fd_grid(&grid, 1)?;
    let (inner, outer) = hilfer_stages(hp)?;
    let k = hp.base.k;
    let h = grid.step;
    let phi = &f.regular.values;

    let (g, h0) = match (inner, outer) {
        (Some(pin), None) => {
            let hv = WeightedIntegralPlan::new(&pin, ctrl, &grid, f.power)?.apply(phi)?;
            (hv, T::zero())
        }
        (inner, Some(pout)) => {
            let (g, h0) = match inner {
                Some(pin) => {
                    let hv = WeightedIntegralPlan::new(&pin, ctrl, &grid, f.power)?.apply(phi)?;
                    let h0 = hv[0];
                    (ConvolutionPlan::new(&pout, ctrl, &grid)?.apply(&hv)?, h0)
                }
                None => {
                    let h0 = power_times(T::zero(), f.power, phi[0]);
                    let g = WeightedIntegralPlan::new(&pout, ctrl, &grid, f.power)?.apply(phi)?;
                    (g, h0)
                }
            };
            (g, h0)
        }
        (None, None) => unreachable!("mu < k keeps one stage alive"),
    };
    if !h0.is_finite() {
        return Err(Error::domain(
            "power",
            "inner integral is unbounded at 0; the derivative does not exist",
        ));
    }
    let g0 = g[0];
    if !g0.is_finite() {
        return Err(Error::domain(
            "power",
            "integral is unbounded at 0; the derivative does not exist",
        ));
    }
    let mut d = differentiate(&g, h);
    if h0 != T::zero() {
        let pout = outer.expect("h0 is nonzero only with an outer stage");
        let kern = PrabhakarKernel::new(&pout, ctrl)?;
        for (i, v) in d.iter_mut().enumerate().skip(1) {
            *v -= kern.eval(grid.node(i))? * h0;
        }
        d[0] = T::lit(2.0) * d[1] - d[2];
    }
    SampledFunction::new(grid, d.into_iter().map(|v| v * k).collect())
}

/// Regularized k-Hilfer-Prabhakar derivative k P^{−γ}_{α,k−μ} f′; independent of ν.
pub fn regularized_hilfer_prabhakar_derivative<T: Scalar>(
    f: &SampledFunction<T>,
    hp: &HilferParams<T>,
    ctrl: &SeriesControl<T>,
) -> Result<SampledFunction<T>> {
    f.validate()?;
    require_origin_zero(&f.grid)?;
    hp.validate()?;
    let d1 = nth_derivative(f, 1)?;
    let b = &hp.base;
    let q = PrabhakarParams::new(b.k, b.alpha, b.k - b.mu, -b.gamma, b.omega)?;
    let values = integral_values(&d1, &q, ctrl, &f.grid)?
        .into_iter()
        .map(|v| v * b.k)
        .collect();
    SampledFunction::new(f.grid, values)
}

use kprab::kspecial::{k_gamma, ml_k, HilferParams, PrabhakarParams, SeriesControl};
use kprab::operators::{
    hilfer_prabhakar_derivative, k_rl_integral, prabhakar_derivative, prabhakar_integral,
    regularized_hilfer_prabhakar_derivative, regularized_prabhakar_derivative, Grid1D, SampledFunction,
};
use kprab::verify::{series_integral, TestFunction};
use kprab::{Grid, Params, Samples};
use proptest::prelude::*;

fn ctrl() -> SeriesControl<f64> {
    SeriesControl::default()
}

fn pp(k: f64, a: f64, m: f64, g: f64, w: f64) -> Params {
    PrabhakarParams::new(k, a, m, g, w).unwrap()
}

fn kg(z: f64, k: f64) -> f64 {
    k_gamma(z, k).unwrap()
}

fn sample(grid: Grid, f: impl Fn(f64) -> f64, d: impl Fn(f64) -> f64) -> Samples {
    SampledFunction::from_fn(grid, f).with_derivative_fn(d)
}

/// Max |got − want| over nodes with x ≥ 0.1·T, relative to max |want| there.
fn window_err(got: &Samples, want: impl Fn(f64) -> f64) -> f64 {
    let g = got.grid;
    let from = (g.count - 1) / 10;
    let mut err = 0.0_f64;
    let mut scale = 0.0_f64;
    for i in from.max(1)..g.count {
        let w = want(g.node(i));
        err = err.max((got.values[i] - w).abs());
        scale = scale.max(w.abs());
    }
    err / scale
}

#[test]
fn integral_of_one_is_exact() {
    let grid = Grid1D::uniform(2.0, 64).unwrap();
    let one = SampledFunction::from_fn(grid, |_| 1.0);
    for (k, m) in [(1.0, 0.5), (1.5, 0.6), (2.0, 3.0)] {
        for w in [-0.7, 0.0, 0.4] {
            let got = prabhakar_integral(&one, &pp(k, 0.8, m, 0.0, w), &ctrl()).unwrap();
            let e = window_err(&got, |x: f64| x.powf(m / k) / kg(m + k, k));
            assert!(e < 1e-13, "k={k} μ={m} ω={w}: {e:e}");
        }
    }
    // k = μ = 2, γ = 0: constant kernel 1/2
    let got = prabhakar_integral(&one, &pp(2.0, 1.3, 2.0, 0.0, 0.5), &ctrl()).unwrap();
    assert!(window_err(&got, |x| x / 2.0) < 1e-14);
    assert_eq!(got.values[0], 0.0);
}

#[test]
fn rl_integral_examples() {
    let grid = Grid1D::uniform(1.5, 200).unwrap();
    let one = SampledFunction::from_fn(grid, |_| 1.0);
    let t = SampledFunction::from_fn(grid, |t| t);
    assert!(window_err(&k_rl_integral(&one, 1.0, 1.0).unwrap(), |x| x) < 1e-14);
    assert!(window_err(&k_rl_integral(&t, 1.0, 1.0).unwrap(), |x| x * x / 2.0) < 1e-14);
    let want = |x: f64| x.powf(1.5) / (2f64.powf(1.5) * libm_gamma_2_5());
    assert!(window_err(&k_rl_integral(&one, 3.0, 2.0).unwrap(), want) < 1e-13);
}

/// Γ(5/2) = 3√π/4.
fn libm_gamma_2_5() -> f64 {
    0.75 * std::f64::consts::PI.sqrt()
}

#[test]
fn gamma_zero_collapses_to_rl() {
    let grid = Grid1D::uniform(2.0, 512).unwrap();
    let f = SampledFunction::from_fn(grid, |t: f64| (3.0 * t).sin() + t * t);
    for (k, m, w) in [(1.0, 0.4, -1.0), (1.7, 2.2, 0.8), (0.6, 0.9, 0.0)] {
        let a = prabhakar_integral(&f, &pp(k, 1.1, m, 0.0, w), &ctrl()).unwrap();
        let b = k_rl_integral(&f, m, k).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() <= 1e-13 * y.abs().max(1e-300), "{x} {y}");
        }
    }
}

#[test]
fn second_order_for_smooth_data() {
    // error at x = 1 against the term-by-term series, halving h
    let p = pp(1.5, 0.8, 0.6, 0.4, -0.5);
    let err = |n: usize| {
        let grid = Grid1D::uniform(1.0, n).unwrap();
        let f = SampledFunction::from_fn(grid, |t: f64| t.sin());
        let got = prabhakar_integral(&f, &p, &ctrl()).unwrap().values[n];
        let want = series_integral(TestFunction::Sin, &p, &[1.0], &ctrl()).unwrap()[0];
        (got - want).abs()
    };
    let (e1, e2, e3) = (err(32), err(64), err(128));
    assert!(e1 / e2 >= 3.5 && e2 / e3 >= 3.5, "{e1:e} {e2:e} {e3:e}");
}

#[test]
fn rl_derivative_examples() {
    let grid = Grid1D::uniform(1.0, 2048).unwrap();
    let p = pp(1.0, 1.0, 0.5, 0.0, 0.3);
    let one = sample(grid, |_| 1.0, |_| 0.0);
    let d = prabhakar_derivative(&one, &p, &ctrl()).unwrap();
    let rpi = std::f64::consts::PI.sqrt();
    assert!(window_err(&d, |x: f64| 1.0 / (x.sqrt() * rpi)) < 1e-4);
    let t = sample(grid, |t| t, |_| 1.0);
    let d = prabhakar_derivative(&t, &p, &ctrl()).unwrap();
    assert!(window_err(&d, |x: f64| x.sqrt() / (0.5 * rpi)) < 1e-4);
}

#[test]
fn derivative_inverts_integral() {
    let grid = Grid1D::uniform(2.0, 4096).unwrap();
    let f = SampledFunction::from_fn(grid, |t: f64| (2.0 * t).cos() + t);
    for p in [pp(1.5, 0.8, 0.6, 0.4, -0.5), pp(1.0, 1.2, 1.4, 0.3, 0.4)] {
        let back = prabhakar_derivative(&prabhakar_integral(&f, &p, &ctrl()).unwrap(), &p, &ctrl()).unwrap();
        assert!(window_err(&back, |t: f64| (2.0 * t).cos() + t) < 1e-3, "{p:?}");
    }
}

#[test]
fn regularized_derivative_examples() {
    let grid = Grid1D::uniform(2.0, 1024).unwrap();
    let p = pp(1.5, 0.8, 0.6, 0.4, -0.5);
    let c = sample(grid, |_| 3.0, |_| 0.0);
    assert!(regularized_prabhakar_derivative(&c, &p, &ctrl())
        .unwrap()
        .values
        .iter()
        .all(|v| *v == 0.0));
    let t = sample(grid, |t| t, |_| 1.0);
    let got = regularized_prabhakar_derivative(&t, &p, &ctrl()).unwrap();
    let q = pp(p.k, p.alpha, 2.0 * p.k - p.mu, -p.gamma, p.omega);
    let want = |x: f64| p.k * x.powf((p.k - p.mu) / p.k) * ml_k(p.omega * x.powf(p.alpha / p.k), &q, &ctrl()).unwrap();
    assert!(window_err(&got, want) < 1e-12);

    let hp = HilferParams::new(p, 0.3).unwrap();
    assert!(regularized_hilfer_prabhakar_derivative(&c, &hp, &ctrl())
        .unwrap()
        .values
        .iter()
        .all(|v| *v == 0.0));
}

#[test]
fn hilfer_endpoints_reduce() {
    let grid = Grid1D::uniform(2.0, 2048).unwrap();
    let p = pp(1.5, 0.8, 0.6, 0.4, -0.5);
    let f = sample(grid, |t: f64| 1.0 + t.sin(), |t: f64| t.cos());
    let h0 = hilfer_prabhakar_derivative(&f, &HilferParams::new(p, 0.0).unwrap(), &ctrl()).unwrap();
    let pd = prabhakar_derivative(&f, &p, &ctrl()).unwrap();
    let h1 = hilfer_prabhakar_derivative(&f, &HilferParams::new(p, 1.0).unwrap(), &ctrl()).unwrap();
    let rd = regularized_prabhakar_derivative(&f, &p, &ctrl()).unwrap();
    let from = 205;
    for i in from..grid.count {
        assert!((h0.values[i] - pd.values[i]).abs() < 1e-10 * pd.values[i].abs().max(1.0));
        assert!((h1.values[i] - rd.values[i]).abs() < 1e-3 * rd.values[i].abs().max(1.0));
    }
}

#[test]
fn regularized_hilfer_ignores_nu() {
    let grid = Grid1D::uniform(2.0, 1024).unwrap();
    let p = pp(1.3, 0.9, 0.7, 0.5, 0.3);
    let f = sample(grid, |t: f64| (t * 1.5).sin() + 2.0, |t: f64| 1.5 * (t * 1.5).cos());
    let a = regularized_hilfer_prabhakar_derivative(&f, &HilferParams::new(p, 0.2).unwrap(), &ctrl()).unwrap();
    let b = regularized_hilfer_prabhakar_derivative(&f, &HilferParams::new(p, 0.8).unwrap(), &ctrl()).unwrap();
    assert_eq!(a.values, b.values);
}

#[test]
fn coarse_grids_are_rejected() {
    let grid = Grid1D::uniform(1.0, 2).unwrap();
    let f = SampledFunction::from_fn(grid, |t| t);
    assert!(prabhakar_derivative(&f, &pp(1.0, 1.0, 0.5, 0.2, 0.0), &ctrl()).is_err());
}

fn op_params() -> impl Strategy<Value = (Params, f64)> {
    (
        0.5f64..2.5,
        0.5f64..1.5,
        0.05f64..0.95,
        -0.8f64..0.8,
        -0.8f64..0.8,
        0.0f64..=1.0,
    )
        .prop_map(|(k, a, mf, g, w, nu)| (pp(k, a, mf * k, g, w), nu))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn operators_are_linear(
        (p, nu) in op_params(),
        c1 in -3.0f64..3.0,
        c2 in -3.0f64..3.0,
        s in 0.5f64..3.0,
    ) {
        let grid = Grid1D::uniform(1.0, 96).unwrap();
        let f = sample(grid, |t: f64| (s * t).sin(), |t: f64| s * (s * t).cos());
        let g = sample(grid, |t: f64| 1.0 + t * t, |t| 2.0 * t);
        let comb = sample(
            grid,
            |t: f64| c1 * (s * t).sin() + c2 * (1.0 + t * t),
            |t: f64| c1 * s * (s * t).cos() + c2 * 2.0 * t,
        );
        let hp = HilferParams::new(p, nu).unwrap();
        type Op = Box<dyn Fn(&Samples) -> Samples>;
        let ops: Vec<Op> = vec![
            Box::new(move |f| prabhakar_integral(f, &p, &ctrl()).unwrap()),
            Box::new(move |f| prabhakar_derivative(f, &p, &ctrl()).unwrap()),
            Box::new(move |f| regularized_prabhakar_derivative(f, &p, &ctrl()).unwrap()),
            Box::new(move |f| hilfer_prabhakar_derivative(f, &hp, &ctrl()).unwrap()),
            Box::new(move |f| regularized_hilfer_prabhakar_derivative(f, &hp, &ctrl()).unwrap()),
        ];
        for op in &ops {
            let (a, b, c) = (op(&f), op(&g), op(&comb));
            let scale = a.values.iter().chain(&b.values).fold(0.0_f64, |m, v| m.max(v.abs())) * (c1.abs() + c2.abs()) + 1e-300;
            for i in 1..grid.count {
                let lin = c1 * a.values[i] + c2 * b.values[i];
                prop_assert!((c.values[i] - lin).abs() <= 1e-12 * scale, "node {}: {} vs {}", i, c.values[i], lin);
            }
        }
    }

    #[test]
    fn gamma_zero_collapse((p, _nu) in op_params(), s in 0.2f64..4.0) {
        let grid = Grid1D::uniform(1.5, 64).unwrap();
        let f = SampledFunction::from_fn(grid, |t: f64| (s * t).cos() + t);
        let a = prabhakar_integral(&f, &p.with_gamma(0.0), &ctrl()).unwrap();
        let b = k_rl_integral(&f, p.mu, p.k).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x - y).abs() <= 1e-13 * y.abs().max(1e-300));
        }
    }
}

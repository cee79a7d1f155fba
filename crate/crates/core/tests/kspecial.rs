use kprab::kspecial::{
    k_gamma as k_gamma_generic, k_pochhammer, ml_k, prabhakar_kernel, MittagLefflerK, PrabhakarParams, SeriesControl,
};
use kprab::verify::classical;
use proptest::prelude::*;

fn k_gamma(z: f64, k: f64) -> kprab::Result<f64> {
    k_gamma_generic(z, k)
}

fn ctrl() -> SeriesControl<f64> {
    SeriesControl::default()
}

fn pp(k: f64, a: f64, m: f64, g: f64, w: f64) -> PrabhakarParams<f64> {
    PrabhakarParams::new(k, a, m, g, w).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Rows (k, α, μ, γ, z, E) of a 60-digit reference table.
fn reference(name: &str) -> Vec<[f64; 6]> {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            [v[0], v[1], v[2], v[3], v[4], v[5]]
        })
        .collect()
}

#[test]
fn k_gamma_examples() {
    for k in [0.3, 1.0, 2.0, 7.5] {
        assert!((k_gamma(k, k).unwrap() - 1.0).abs() < 1e-15);
    }
    assert!((k_gamma(4.0, 1.0).unwrap() - 6.0).abs() < 1e-13);
    // ∫₀^∞ e^{−t²/2} dt = √(π/2)
    assert!(rel(k_gamma(1.0, 2.0).unwrap(), (std::f64::consts::PI / 2.0).sqrt()) < 1e-14);
    assert!(k_gamma(-1.0, 1.0).is_err());
    assert!(k_gamma(1.0, 0.0).is_err());
}

#[test]
fn k_gamma_recurrence() {
    for z in [0.3, 1.1, 2.5] {
        for k in [0.5, 1.0, 2.0] {
            let lhs = k_gamma(z + k, k).unwrap();
            let rhs = z * k_gamma(z, k).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * lhs, "z={z} k={k}");
        }
    }
}

#[test]
fn pochhammer_examples() {
    assert_eq!(k_pochhammer(7.3, 0, 2.0), 1.0);
    assert_eq!(k_pochhammer(1.0, 3, 1.0), 6.0);
    assert_eq!(k_pochhammer(3.0, 2, 2.0), 15.0);
}

#[test]
fn ml_examples() {
    let p = pp(1.7, 0.9, 1.3, 0.6, 0.0);
    let at0 = 1.0 / k_gamma(1.3, 1.7).unwrap();
    assert!(rel(ml_k(0.0, &p, &ctrl()).unwrap(), at0) < 1e-15);
    assert!(
        rel(
            ml_k(1.0, &pp(1.0, 1.0, 1.0, 1.0, 0.0), &ctrl()).unwrap(),
            std::f64::consts::E
        ) < 1e-15
    );
    for z in [-4.0, 0.5, 3.0] {
        assert!(rel(ml_k(z, &p.with_gamma(0.0), &ctrl()).unwrap(), at0) < 1e-15);
    }
}

#[test]
fn ml_matches_extended_precision_reference() {
    let mut worst = 0.0_f64;
    for [k, a, m, g, z, want] in reference("ml_reference.csv") {
        let got = ml_k(z, &pp(k, a, m, g, 0.0), &ctrl()).unwrap();
        let e = rel(got, want);
        assert!(e <= 1e-12, "k={k} α={a} μ={m} γ={g} z={z}: {got} vs {want} ({e:.1e})");
        worst = worst.max(e);
    }
    assert!(worst > 0.0);
}

#[test]
fn exponential_to_twelve_digits() {
    let p = pp(1.0, 1.0, 1.0, 1.0, 0.0);
    for i in 0..=40 {
        let z = -5.0 + 0.25 * i as f64;
        assert!(rel(ml_k(z, &p, &ctrl()).unwrap(), z.exp()) <= 1e-12, "z={z}");
    }
}

/// When Σ|terms| exceeds |E| by ~1e21 even double-word summation loses
/// digits; the error stays bounded by the summation precision.
#[test]
fn heavy_cancellation_limit() {
    for [k, a, m, g, z, want] in reference("ml_stress.csv") {
        let got = ml_k(z, &pp(k, a, m, g, 0.0), &ctrl()).unwrap();
        let bound = if z >= -4.5 { 1e-12 } else { 1e-8 };
        assert!(rel(got, want) <= bound, "z={z}: {got} vs {want}");
    }
}

#[test]
fn k1_matches_classical_series() {
    for &(a, m, g) in &[(1.0, 1.0, 1.0), (0.8, 0.6, 0.4), (1.5, 1.3, 2.0), (0.5, 2.0, -0.7)] {
        let p = pp(1.0, a, m, g, 0.0);
        for i in 0..=24 {
            let z = -3.0 + 0.25 * i as f64;
            let want = classical::mittag_leffler(a, m, g, z);
            assert!(
                rel(ml_k(z, &p, &ctrl()).unwrap(), want) <= 1e-12,
                "α={a} β={m} γ={g} z={z}"
            );
        }
    }
}

#[test]
fn kernel_examples() {
    let p = pp(1.3, 0.7, 0.9, 0.4, 0.2);
    assert_eq!(prabhakar_kernel(-1.0, &p, &ctrl()).unwrap(), 0.0);
    let e = prabhakar_kernel(1.0, &pp(1.0, 1.0, 1.0, 1.0, -1.0), &ctrl()).unwrap();
    assert!(rel(e, (-1.0f64).exp()) < 1e-15);
    let flat = prabhakar_kernel(1.0, &PrabhakarParams { omega: 0.0, ..p }, &ctrl()).unwrap();
    assert!(rel(flat, 1.0 / (1.3 * k_gamma(0.9, 1.3).unwrap())) < 1e-15);
}

#[test]
fn truncation_is_an_error_not_a_value() {
    let tight = SeriesControl::new(1e-14, 5).unwrap();
    assert!(ml_k(3.0, &pp(1.0, 1.0, 1.0, 1.0, 0.0), &tight).is_err());
}

fn params() -> impl Strategy<Value = PrabhakarParams<f64>> {
    (0.3f64..3.0, 0.5f64..2.5, 0.1f64..4.0, -2.0f64..3.0).prop_map(|(k, a, m, g)| pp(k, a, m, g, 0.0))
}

proptest! {
    #[test]
    fn recurrence_holds_everywhere(z in 0.05f64..8.0, k in 0.2f64..4.0) {
        let lhs = k_gamma(z + k, k).unwrap();
        let rhs = z * k_gamma(z, k).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs);
    }

    #[test]
    fn coefficients_match_naive_terms(p in params()) {
        let ml = MittagLefflerK::new(&p, &ctrl()).unwrap();
        for n in 0..=50usize {
            let fact: f64 = (1..=n).map(|i| i as f64).product();
            let naive = k_pochhammer(p.gamma, n, p.k) / (fact * k_gamma(p.alpha * n as f64 + p.mu, p.k).unwrap());
            let got = ml.coefficient(n).unwrap();
            // the naive form overflows long before the coefficients do
            if naive.is_normal() {
                prop_assert!(rel(got, naive) <= 1e-12, "n={} {} vs {}", n, got, naive);
            } else if k_pochhammer(p.gamma, n, p.k) == 0.0 {
                prop_assert_eq!(got, 0.0);
            }
        }
    }

    #[test]
    fn kernel_positive_for_nonnegative_indices(
        k in 0.3f64..3.0, a in 0.3f64..2.5, m in 0.1f64..4.0, g in 0.0f64..3.0, w in 0.0f64..2.0, t in 1e-6f64..0.2,
    ) {
        prop_assume!(a / k >= 0.4 && w * t.powf(a / k) < 1.0);
        let v = prabhakar_kernel(t, &pp(k, a, m, g, w), &ctrl()).unwrap();
        prop_assert!(v > 0.0);
    }

    #[test]
    fn k1_reduction(a in 0.5f64..2.0, m in 0.2f64..3.0, g in 0.0f64..2.5, z in -3.0f64..3.0) {
        let got = ml_k(z, &pp(1.0, a, m, g, 0.0), &ctrl()).unwrap();
        let want = classical::mittag_leffler(a, m, g, z);
        // γ ≥ 0: Σ|terms| = E(|z|), which bounds the plain-sum oracle's own error
        let cond = classical::mittag_leffler(a, m, g, z.abs()) / want.abs();
        prop_assert!(rel(got, want) <= 1e-12f64.max(32.0 * f64::EPSILON * cond), "{} vs {}", got, want);
    }
}

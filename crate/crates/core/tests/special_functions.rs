use heatasym::specfun::{erfc_half, gaussian_halfline_moment, hermite_sum, SignMode};
use proptest::prelude::*;

/// Physicists' Hermite polynomial by the three-term recurrence.
fn hermite_h(m: usize, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, 2.0 * x);
    if m == 0 {
        return a;
    }
    for k in 1..m {
        let next = 2.0 * x * b - 2.0 * k as f64 * a;
        a = b;
        b = next;
    }
    b
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

proptest! {
    #[test]
    fn erfc_half_matches_reference(x in -6.0f64..6.0) {
        let want = 0.5 * statrs::function::erf::erfc(x);
        // The reference itself is only good to ~1e-10 relative.
        prop_assert!((erfc_half(x) - want).abs() <= 1e-9 * want.abs());
    }

    #[test]
    fn erfc_half_reflection(x in -8.0f64..8.0) {
        prop_assert!((erfc_half(x) + erfc_half(-x) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn halfline_moments_reproduce_heat_polynomials(eta in -5.0f64..5.0) {
        // x = 2√t [G_1(η) - G_1(-η)] and x² + 2t = 4t [G_2(η) + G_2(-η)].
        let g1 = gaussian_halfline_moment(1, eta) - gaussian_halfline_moment(1, -eta);
        prop_assert!((g1 - eta).abs() < 1e-13 * (1.0 + eta.abs()));
        let g2 = gaussian_halfline_moment(2, eta) + gaussian_halfline_moment(2, -eta);
        prop_assert!((g2 - eta * eta - 0.5).abs() < 1e-13 * (1.0 + eta * eta));
    }

    #[test]
    fn alternating_sum_is_a_hermite_function(n in 1usize..12, eta in -4.0f64..4.0) {
        let m = n - 1;
        let want = (-eta * eta).exp() * hermite_h(m, eta) / (2f64.powi(m as i32) * factorial(m));
        let got = hermite_sum(n, eta, SignMode::Alternating).unwrap();
        prop_assert!((got - want).abs() < 1e-13 * (1.0 + want.abs()), "{got} vs {want}");
    }
}

#[test]
fn literal_and_alternating_agree_below_third_order() {
    for eta in [-2.0, -0.3, 0.0, 0.8, 2.5] {
        for n in 1..=2 {
            let a = hermite_sum(n, eta, SignMode::Alternating).unwrap();
            let b = hermite_sum(n, eta, SignMode::PaperLiteral).unwrap();
            assert_eq!(a, b);
        }
        let diff =
            hermite_sum(3, eta, SignMode::PaperLiteral).unwrap() - hermite_sum(3, eta, SignMode::Alternating).unwrap();
        assert!((diff - 0.5 * (-eta * eta).exp()).abs() < 1e-15);
    }
}

#[test]
fn halfline_moment_against_quadrature() {
    for eta in [-6.0, -2.0, -0.5, 0.0, 1.5] {
        for p in 0..=6 {
            let f = |v: f64| v.powi(p as i32) * (-(v - eta) * (v - eta)).exp() / std::f64::consts::PI.sqrt();
            let pts = heatasym::quad::partition(0.0, eta.max(0.0) + 40.0, [eta.max(0.0) + 1.0]);
            let q = heatasym::quad::integrate(&f, &pts, 1e-15, heatasym::quad::DEFAULT_BUDGET).unwrap();
            let got = gaussian_halfline_moment(p, eta);
            assert!((got - q.value).abs() < 1e-12 * q.value.abs() + 1e-15, "p={p} eta={eta}: {got} vs {}", q.value);
        }
    }
}

#[test]
fn erfc_half_against_tabulated_values() {
    // erfc to 20 digits.
    let table = [
        (-1.0, 1.842_700_792_949_714_8),
        (0.5, 0.479_500_122_186_953_5),
        (1.0, 0.157_299_207_050_285_13),
        (2.0, 4.677_734_981_047_266e-3),
        (3.0, 2.209_049_699_858_544e-5),
        (5.0, 1.537_459_794_428_035e-12),
    ];
    for (x, erfc) in table {
        let got = erfc_half(x);
        assert!((got - 0.5 * erfc).abs() <= 4e-16 * erfc, "{x}: {got}");
    }
}

/// Composite Simpson rule with `panels` (even) subintervals.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let inner: f64 = (1..panels).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

#[test]
fn j_integral_against_simpson() {
    use heatasym::specfun::j_integral;
    for n in [1, 2, 4, 7] {
        for eta in [-3.0, -0.5, 0.0, 1.0, 3.0] {
            let f = |z: f64| z.powi(-n) * (-(z - eta) * (z - eta)).exp();
            let want = simpson(f, 1.0, f64::max(eta, 1.0) + 12.0, 200_000);
            let got = j_integral(n as usize, eta, 1e-13).unwrap();
            assert!((got - want).abs() < 1e-12, "n={n} eta={eta}: {got} vs {want}");
        }
    }
}

/// `K_n(η) = e^{-η²} Σ_{r≥n} c_r(η)/(r-n+1)` with `c_r = H_r(η)/r!`, the
/// Taylor coefficients of `exp(2zη - z²)`, integrated term by term.
#[test]
fn k_integral_against_termwise_series() {
    use heatasym::specfun::k_integral;
    for n in [1usize, 2, 3, 5, 8] {
        for eta in [-3.0, -1.0, 0.0, 0.5, 2.0] {
            let mut sum = 0.0;
            for r in n..n + 80 {
                sum += hermite_h(r, eta) / factorial(r) / (r - n + 1) as f64;
            }
            let want = (-eta * eta).exp() * sum;
            let got = k_integral(n, eta, 1e-13).unwrap();
            assert!((got - want).abs() < 1e-11 * (1.0 + want.abs()), "n={n} eta={eta}: {got} vs {want}");
        }
    }
}

#[test]
fn alternating_kernels_solve_the_heat_recurrence() {
    use heatasym::verify::heat_operator;
    for n in 1..=6 {
        let f = |eta: f64| hermite_sum(n, eta, SignMode::Alternating);
        for i in 0..=60 {
            let eta = -3.0 + 0.1 * i as f64;
            let r = heat_operator(&f, n, eta, 1e-3).unwrap();
            assert!(r.abs() < 1e-8, "n={n} eta={eta}: {r}");
        }
    }
}

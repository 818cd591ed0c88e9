use std::f64::consts::PI;

use plcrf_core::special::adaptive::{integrate_pieces, Tolerance};
use plcrf_core::special::meijer::{ber_meijer_integral, gamma_log1p_expectation, oracle};
use plcrf_core::special::quadrature::{cached_rule, monomial_exactness_error, MAX_ORDER};
use plcrf_core::special::{
    full_hermite_rule, gamma_fn, half_range_hermite_rule, meijer_ber_term, meijer_cap_term, reg_lower_gamma,
    reg_upper_gamma, std_normal_cdf, std_normal_quantile, upper_gamma, RuleKind,
};
use plcrf_core::Error;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn normal_cdf_examples() {
    assert_eq!(std_normal_cdf(0.0), 0.5);
    assert!((std_normal_cdf(1.959964) - 0.975).abs() < 1e-6);
    assert_eq!(std_normal_cdf(f64::NEG_INFINITY), 0.0);
    // reference values from an independent implementation
    assert!(rel(std_normal_cdf(-3.0), 0.001_349_898_031_630_093_3) < 1e-13);
    assert!(rel(std_normal_cdf(-10.0), 7.619_853_024_160_47e-24) < 1e-12);
}

#[test]
fn upper_gamma_examples() {
    for x in [0.0, 0.01, 1.0, 7.5, 40.0] {
        assert!(rel(upper_gamma(1.0, x).unwrap(), (-x).exp()) < 1e-12, "x = {x}");
    }
    for s in [0.5, 1.0, 3.3, 18.0] {
        assert_eq!(reg_upper_gamma(s, 0.0).unwrap(), 1.0);
        assert!(rel(upper_gamma(s, 0.0).unwrap(), gamma_fn(s)) < 1e-14);
    }
    assert!((reg_upper_gamma(18.0, 18.0).unwrap() - 0.4695).abs() < 1e-3);
    // reference values from an independent implementation
    for (s, x, q) in [
        (18.0, 18.0, 0.468_647_669_555_336_43),
        (0.5, 2.0, 0.045_500_263_896_358_57),
        (6.0, 3.5, 0.857_613_553_095_778_2),
        (2.5, 10.0, 0.001_249_730_563_031_377_3),
    ] {
        assert!(rel(reg_upper_gamma(s, x).unwrap(), q) < 1e-12, "Q({s}, {x})");
    }
}

#[test]
fn upper_gamma_matches_defining_integral() {
    let tol = Tolerance::new(0.0, 1e-13);
    for (s, x) in [(18.0, 18.0), (3.0, 0.5), (0.7, 4.0)] {
        let integral = integrate_pieces(
            |t: f64| if t == 0.0 { 0.0 } else { ((s - 1.0) * t.ln() - t).exp() },
            &[x, x + 10.0, x + 60.0, f64::INFINITY],
            tol,
        )
        .unwrap()
        .value;
        assert!(rel(upper_gamma(s, x).unwrap(), integral) < 1e-10, "Γ({s}, {x})");
    }
}

#[test]
fn nonpositive_shape_rejected() {
    assert!(matches!(reg_upper_gamma(0.0, 1.0), Err(Error::InvalidParameter { .. })));
    assert!(matches!(upper_gamma(-1.0, 1.0), Err(Error::InvalidParameter { .. })));
}

#[test]
fn half_range_rule_examples() {
    let rule = half_range_hermite_rule(30).unwrap();
    assert!(rel(rule.integrate(|_| 1.0), PI.sqrt() / 2.0) < 1e-13);
    assert!(rel(rule.integrate(|y| y), 0.5) < 1e-13);
    assert!(rel(rule.integrate(|y| y * y), PI.sqrt() / 4.0) < 1e-13);
}

#[test]
fn full_range_rule_examples() {
    let rule = full_hermite_rule(40).unwrap();
    assert!(rel(rule.integrate(|_| 1.0), PI.sqrt()) < 1e-13);
    assert!(rule.integrate(|x| x).abs() < 1e-13);
    assert!(rel(rule.integrate(|x| x * x), PI.sqrt() / 2.0) < 1e-13);
}

#[test]
fn rules_are_exact_to_degree_2n_minus_1() {
    for kind in [RuleKind::HalfRangeHermite, RuleKind::FullHermite] {
        for order in 1..=MAX_ORDER {
            let rule = cached_rule(kind, order).unwrap();
            let err = monomial_exactness_error(&rule);
            assert!(err <= 1e-10, "{kind:?} order {order}: {err:e}");
        }
    }
}

#[test]
fn rule_structure() {
    for order in [1, 2, 5, 30, 40, 64] {
        for rule in [half_range_hermite_rule(order).unwrap(), full_hermite_rule(order).unwrap()] {
            assert_eq!(rule.order(), order);
            assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
            assert!(rule.weights().iter().all(|&w| w > 0.0));
            let mass: f64 = rule.weights().iter().sum();
            assert!((mass - rule.kind().total_mass()).abs() < 1e-12);
        }
        assert!(half_range_hermite_rule(order).unwrap().nodes()[0] > 0.0);
    }
}

#[test]
fn unsupported_orders_rejected() {
    assert!(matches!(half_range_hermite_rule(0), Err(Error::UnsupportedOrder { .. })));
    assert!(matches!(full_hermite_rule(MAX_ORDER + 1), Err(Error::UnsupportedOrder { .. })));
}

#[test]
fn meijer_instances_match_oracles_on_grid() {
    for a in [1.0, 6.0, 18.0] {
        for z in [1e-3, 1e-1, 1.0, 10.0] {
            for p in [0.5, 1.0] {
                let g = ber_meijer_integral(p, a, z).unwrap();
                let o = oracle::ber_meijer_integral(p, a, z).unwrap();
                assert!(rel(g, o) <= 1e-8, "BER instance A={a} z={z} p={p}: {g} vs {o}");
            }
            let g = gamma_log1p_expectation(a, 1.0 / z).unwrap();
            let o = oracle::gamma_log1p_expectation(a, 1.0 / z).unwrap();
            assert!(rel(g, o) <= 1e-8, "capacity instance A={a} z={z}: {g} vs {o}");
        }
    }
}

#[test]
fn ber_term_matches_p_e2_integral() {
    // P_e2 = ∫ x^{p-1} e^{-qx} Q(A, αx/ρ) dx at (p, q, A, α/ρ) = (0.5, 1, 18, 1e-2)
    let (p, q, a, ratio) = (0.5, 1.0, 18.0f64, 1e-2);
    let z = ratio / q;
    let direct = oracle::ber_meijer_integral(p, a, z).unwrap() / q.powf(p);
    let via_g = meijer_ber_term(p, a, z).unwrap() / (q.powf(p) * gamma_fn(a));
    assert!(rel(via_g, direct) < 1e-8);
}

#[test]
fn ber_term_limits() {
    let small = meijer_ber_term(0.5, 6.0, 1e-12).unwrap();
    assert!(rel(small, gamma_fn(0.5) * gamma_fn(6.0)) < 1e-8);
    let large = meijer_ber_term(0.5, 6.0, 1e8).unwrap();
    assert!(large < 1e-3 * small);
}

#[test]
fn capacity_term_examples() {
    // A = 1, ρ/α = 1: e·E₁(1)
    let c = gamma_log1p_expectation(1.0, 1.0).unwrap();
    assert!((c - 0.596_347_362_323_194_6).abs() < 1e-12);
    let z = 1.0f64;
    let via_g = z.powf(1.0) / gamma_fn(1.0) * meijer_cap_term(1.0, z).unwrap();
    assert!(rel(via_g, c) < 1e-12);
    assert!(gamma_log1p_expectation(18.0, 1e-9).unwrap() < 1e-7);
}

proptest! {
    #[test]
    fn regularized_gamma_is_a_decreasing_probability(s in 0.1f64..40.0, x in 0.0f64..80.0, dx in 0.01f64..5.0) {
        let q1 = reg_upper_gamma(s, x).unwrap();
        let q2 = reg_upper_gamma(s, x + dx).unwrap();
        prop_assert!((0.0..=1.0).contains(&q1));
        prop_assert!(q2 <= q1);
        prop_assert!(upper_gamma(s, x + dx).unwrap() <= upper_gamma(s, x).unwrap());
        let p = reg_lower_gamma(s, x).unwrap();
        prop_assert!((p + q1 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn normal_cdf_symmetry_and_quantile(x in -8.0f64..8.0) {
        prop_assert!((std_normal_cdf(-x) - (1.0 - std_normal_cdf(x))).abs() < 1e-15);
        // the round trip is only well conditioned where p is not rounded toward 1
        let lower = -x.abs();
        let p = std_normal_cdf(lower);
        prop_assert!((std_normal_quantile(p) - lower).abs() < 1e-8 * (1.0 + x.abs()));
    }

    #[test]
    fn half_range_rule_integrates_gamma_tails(a in 1.0f64..20.0, c in 0.05f64..5.0) {
        // ∫₀^∞ e^{-y²} Q(a, c y²) dy by the rule and adaptively
        let rule = half_range_hermite_rule(64).unwrap();
        let g = |y: f64| reg_upper_gamma(a, c * y * y).unwrap();
        let by_rule = rule.integrate(g);
        let adaptive = integrate_pieces(
            |y: f64| (-y * y).exp() * g(y),
            &[0.0, 0.5, 1.0, 2.0, 4.0, 8.0, f64::INFINITY],
            Tolerance::new(1e-16, 1e-12),
        )
        .unwrap()
        .value;
        prop_assert!(rel(by_rule, adaptive) < 1e-6, "{} vs {}", by_rule, adaptive);
    }
}

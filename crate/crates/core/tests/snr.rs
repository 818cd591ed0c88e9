mod common;

use common::{ks_distance, log_space, rel};
use plcrf_core::lognormal_sum::fit_lognormal_sum;
use plcrf_core::montecarlo::{draw_samples, CascadeSimConfig, PlcSimConfig, RfSimConfig, SimPlan};
use plcrf_core::snr::{
    e2e_cdf, e2e_pdf, mimo_cdf, mimo_pdf, relay_cdf, relay_pdf, EndToEndDistribution, PlcHopDistribution,
    RfHopDistribution,
};
use plcrf_core::special::adaptive::{integrate_pieces, Tolerance};
use plcrf_core::Error;

const MU: f64 = 0.0;
const SIGMA: f64 = 12.0;
const DRAWS: u64 = 1_000_000;

fn plc(branches: u32, relays: u32, gbar0: f64) -> PlcHopDistribution {
    PlcHopDistribution::new(fit_lognormal_sum(MU, SIGMA, branches).unwrap(), gbar0, relays).unwrap()
}

fn rf(rho: f64) -> RfHopDistribution {
    RfHopDistribution::new(18.0, 3.0, rho).unwrap()
}

fn rf_sim(rho: f64) -> RfSimConfig {
    RfSimConfig { m: 3.0, omega: 1.0, n_r: 3, n_d: 2, rho }
}

fn plc_sim(branches: u32, relays: u32, gbar0: f64) -> PlcSimConfig {
    PlcSimConfig { gbar0, mu_db: MU, sigma_db: SIGMA, branches, relays }
}

/// Central difference of `cdf`, or of `sf` when the CDF is above one half.
fn derivative<C: Fn(f64) -> f64, S: Fn(f64) -> f64>(cdf: C, sf: S, x: f64) -> f64 {
    let h = 1e-5 * x;
    if cdf(x) < 0.5 {
        (cdf(x + h) - cdf(x - h)) / (2.0 * h)
    } else {
        (sf(x - h) - sf(x + h)) / (2.0 * h)
    }
}

#[test]
fn relay_cdf_examples() {
    let one = plc(2, 1, 10.0);
    let fit = one.fit;
    for x in [0.1, 3.0, 50.0] {
        assert!(rel(relay_cdf(&one, x).unwrap(), fit.cdf_ratio(x / 10.0)) < 1e-14);
        assert!(rel(relay_pdf(&one, x).unwrap(), fit.pdf_ratio(x / 10.0) / 10.0) < 1e-14);
    }
    let two = plc(2, 2, 10.0);
    let median = 10.0 * (fit.a1 / fit.a0).powf(fit.lambda / fit.a2);
    assert!((relay_cdf(&two, median).unwrap() - 0.25).abs() < 1e-9);
    assert!(matches!(relay_cdf(&two, 0.0), Err(Error::InvalidParameter { .. })));
}

#[test]
fn relay_cdf_matches_simulated_selection() {
    for (l, m, seed) in [(1, 1, 1), (2, 2, 2), (3, 2, 3)] {
        let dist = plc(l, m, 5.0);
        let mut draws = draw_samples(&SimPlan::new(DRAWS, seed), &plc_sim(l, m, 5.0)).unwrap();
        let d = ks_distance(&mut draws, |x| dist.cdf_at(x));
        assert!(d <= 0.01, "L = {l} M = {m}: Kolmogorov distance {d}");
    }
}

#[test]
fn relay_pdf_matches_derivative_and_integrates() {
    for (l, m) in [(1, 1), (2, 3), (4, 2)] {
        let d = plc(l, m, 4.0);
        for x in log_space(4e-3, 4e3, 50) {
            let fd = derivative(|x| d.cdf_at(x), |x| d.complement_at(x), x);
            assert!(rel(fd, relay_pdf(&d, x).unwrap()) < 1e-5, "L = {l} M = {m} x = {x}");
        }
        let breaks: Vec<f64> = (0..=140).map(|i| -70.0 + i as f64).collect();
        let mass = integrate_pieces(|t: f64| d.pdf_at(t.exp()) * t.exp(), &breaks, Tolerance::new(1e-14, 1e-12))
            .unwrap()
            .value;
        assert!((mass - d.fit.ceiling().powi(m as i32)).abs() < 1e-4, "L = {l} M = {m}: {mass}");
    }
}

#[test]
fn more_relays_lower_the_cdf() {
    for x in log_space(1e-3, 1e3, 60) {
        let f: Vec<f64> = (1..=4).map(|m| plc(2, m, 1.0).cdf_at(x)).collect();
        assert!(f.windows(2).all(|w| w[1] <= w[0]), "x = {x}: {f:?}");
    }
}

#[test]
fn mimo_examples() {
    let d = rf(100.0);
    assert_eq!(mimo_cdf(&d, 0.0).unwrap(), 0.0);
    assert!((d.mean() - 18.0 * 100.0 / 3.0).abs() < 1e-9);
    assert!((d.variance() - 18.0 * 100.0f64.powi(2) / 9.0).abs() < 1e-6);
    let exp = RfHopDistribution::new(1.0, 2.0, 5.0).unwrap();
    for x in [0.0, 0.3, 2.0, 11.0] {
        assert!((mimo_cdf(&exp, x).unwrap() - (1.0 - (-2.0 * x / 5.0f64).exp())).abs() < 1e-15);
    }
    assert!(matches!(mimo_pdf(&d, -1.0), Err(Error::InvalidParameter { .. })));
}

#[test]
fn mimo_matches_simulated_nakagami_sums() {
    let rho = 40.0;
    let d = rf(rho);
    let mut draws = draw_samples(&SimPlan::new(DRAWS, 11), &rf_sim(rho)).unwrap();
    let n = draws.len() as f64;
    let mean = draws.iter().sum::<f64>() / n;
    let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    assert!((mean - d.mean()).abs() <= 3.0 * (var / n).sqrt(), "mean {mean} vs {}", d.mean());
    // standard error of the sample variance from the fourth central moment
    let m4 = draws.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    let se_var = ((m4 - var * var) / n).sqrt();
    assert!((var - d.variance()).abs() <= 3.0 * se_var, "variance {var} vs {}", d.variance());
    let ks = ks_distance(&mut draws, |x| d.cdf_at(x));
    assert!(ks <= 0.005, "Kolmogorov distance {ks}");
}

#[test]
fn rayleigh_entries_are_exponential() {
    // m = 1: each entry power is exponential with mean Ω
    let cfg = RfSimConfig { m: 1.0, omega: 2.0, n_r: 1, n_d: 1, rho: 1.0 };
    let mut draws = draw_samples(&SimPlan::new(200_000, 5), &cfg).unwrap();
    let ks = ks_distance(&mut draws, |x| 1.0 - (-x / 2.0f64).exp());
    assert!(ks < 0.005, "{ks}");
}

#[test]
fn mimo_pdf_matches_derivative() {
    let d = rf(20.0);
    for x in log_space(1.0, 1e3, 50) {
        let fd = derivative(|x| d.cdf_at(x), |x| d.complement_at(x), x);
        assert!(rel(fd, mimo_pdf(&d, x).unwrap()) < 1e-5, "x = {x}");
    }
}

#[test]
fn e2e_identities() {
    let e = EndToEndDistribution::new(plc(2, 2, 30.0), rf(100.0));
    for x in log_space(30.0 * 1e-4, 30.0 * 1e4, 200) {
        let (f_r, f_d) = (relay_cdf(&e.plc, x).unwrap(), mimo_cdf(&e.rf, x).unwrap());
        let f = e2e_cdf(&e, x).unwrap();
        assert!(((1.0 - f) - (1.0 - f_r) * (1.0 - f_d)).abs() < 1e-15, "survival at x = {x}");
        assert!(f >= f_r.max(f_d) - 1e-16);
    }
    // equal hop CDFs give 2F − F²
    let (f_r, f_d) = (e.plc.cdf_at(400.0), e.rf.cdf_at(400.0));
    let g = f_r + f_d - f_r * f_d;
    assert!((e.cdf_at(400.0) - g).abs() < 1e-15);
    assert!(e2e_cdf(&e, 1e-300).unwrap() < 1e-12);
    assert!(matches!(e2e_pdf(&e, 0.0), Err(Error::InvalidParameter { .. })));
}

#[test]
fn cdfs_are_nondecreasing() {
    let e = EndToEndDistribution::new(plc(3, 2, 10.0), rf(30.0));
    let xs = log_space(1e-3, 1e5, 200);
    for w in xs.windows(2) {
        assert!(e.plc.cdf_at(w[0]) <= e.plc.cdf_at(w[1]));
        assert!(e.rf.cdf_at(w[0]) <= e.rf.cdf_at(w[1]));
        assert!(e.cdf_at(w[0]) <= e.cdf_at(w[1]));
    }
}

#[test]
fn e2e_pdf_matches_derivative_and_integral() {
    let e = EndToEndDistribution::new(plc(2, 1, 50.0), rf(15.0));
    for x in log_space(0.05, 5e3, 50) {
        let fd = derivative(|x| e.cdf_at(x), |x| e.complement_at(x), x);
        assert!(rel(fd, e2e_pdf(&e, x).unwrap()) < 1e-5, "x = {x}");
    }
    // 0.999 quantile by bisection in ln x
    let (mut lo, mut hi) = (-30.0f64, 30.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if e.cdf_at(mid.exp()) < 0.999 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let top = hi;
    let breaks: Vec<f64> = (0..=300).map(|i| -60.0 + (top + 60.0) * i as f64 / 300.0).collect();
    let mass = integrate_pieces(|t: f64| e.pdf_at(t.exp()) * t.exp(), &breaks, Tolerance::new(1e-15, 1e-12))
        .unwrap()
        .value;
    let below = e.cdf_at((-60f64).exp());
    assert!((mass + below - e.cdf_at(top.exp())).abs() < 1e-5);
}

#[test]
fn degenerate_relay_hop_reduces_to_mimo() {
    // γ̄₀ so large that F_R is 0 to machine precision over the probe range
    let e = EndToEndDistribution::new(plc(1, 1, 1e200), rf(10.0));
    for x in log_space(1.0, 1e3, 20) {
        assert_eq!(e.plc.cdf_at(x), 0.0);
        assert!(rel(e.pdf_at(x), e.rf.pdf_at(x)) < 1e-15);
    }
}

#[test]
fn e2e_matches_simulated_minimum() {
    let e = EndToEndDistribution::new(plc(2, 2, 20.0), rf(10.0));
    let sim = CascadeSimConfig { plc: plc_sim(2, 2, 20.0), rf: rf_sim(10.0) };
    let mut draws = draw_samples(&SimPlan::new(DRAWS, 21), &sim).unwrap();
    let d = ks_distance(&mut draws, |x| e.cdf_at(x));
    assert!(d <= 0.01, "Kolmogorov distance {d}");
}

//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are expected to fail: the capacity
//! closed form evaluates its C2 term with a full-range Hermite sum that cannot
//! resolve the integrand. They still print FAIL. The process exits with
//! status 1 when any other criterion fails or a known failure starts passing.

mod common;

use std::path::Path;
use std::time::Instant;

use common::{ks_distance, log_space, rel};
use plcrf_core::harness::config::{LinkKind, Variant};
use plcrf_core::harness::experiment::{point_seed, point_setup};
use plcrf_core::harness::output::write_csv;
use plcrf_core::harness::{parse_config, run_experiment, ExperimentSpec, MetricCurve, Overrides, Preset};
use plcrf_core::lognormal_sum::{fit_lognormal_sum, simulate_sums, single_branch_cdf};
use plcrf_core::metrics::{self, conditional_ber, direct, Modulation};
use plcrf_core::montecarlo::{draw_samples, CascadeSimConfig, PlcSimConfig, RfSimConfig, SimPlan};
use plcrf_core::snr::{EndToEndDistribution, PlcHopDistribution, RfHopDistribution};
use plcrf_core::special::meijer::{self, oracle};
use plcrf_core::special::quadrature::{cached_rule, monomial_exactness_error, MAX_ORDER};
use plcrf_core::special::{upper_gamma, RuleKind};
use plcrf_core::Result;

const KNOWN_FAILURES: [&str; 2] = ["1", "2c"];

const MU: f64 = 0.0;
const SIGMA: f64 = 12.0;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome { passed, detail: detail.into() }
    }
}

fn preset(p: Preset) -> ExperimentSpec {
    parse_config("", Path::new(p.name()), &Overrides { preset: Some(p), ..Default::default() }).unwrap()
}

fn variant(l: u32, m: u32) -> Variant {
    Variant {
        label: format!("L={l} M={m}"),
        branches: l,
        relays: m,
        modulation: Modulation::BPSK,
        n_pl: None,
        link: LinkKind::Cascaded,
    }
}

fn curve<'a>(curves: &'a [MetricCurve], label: &str) -> &'a MetricCurve {
    curves.iter().find(|c| c.label == label).unwrap()
}

fn info(line: String) {
    println!("    info: {line}");
}

/// Worst z-scores of (outage, BER, capacity) and worst direct-integration gaps
/// (outage abs, BER abs, capacity rel) for one variant on the paper-iv sweep.
/// For a single branch the outage z-score against the exact log-normal CDF is
/// also returned, separating fit bias from sampling noise.
fn triple_agreement(spec: &ExperimentSpec, v: usize) -> Result<([f64; 3], [f64; 3], f64)> {
    let mut z = [0.0f64; 3];
    let mut gap = [0.0f64; 3];
    let mut z_exact = 0.0f64;
    for (i, x) in spec.sweep.values().into_iter().enumerate() {
        let setup = point_setup(spec, &spec.variants[v], x)?;
        let q = setup.query().unwrap();
        let closed = [
            metrics::outage_probability(&q)?,
            metrics::average_ber(&q)?,
            metrics::average_capacity(&q)?,
        ];
        let sim = setup.simulate(&SimPlan::new(1_000_000, point_seed(7, v, i)))?;
        for (k, est) in [sim.outage, sim.ber, sim.capacity].iter().enumerate() {
            let se = est.std_error.max(1e-300);
            z[k] = z[k].max((closed[k] - est.mean).abs() / se);
        }
        if spec.variants[v].branches == 1 && spec.variants[v].relays == 1 {
            let f_r = single_branch_cdf(MU, SIGMA, q.gamma_th / q.e2e.plc.gbar0);
            let f_d = q.e2e.rf.cdf_at(q.gamma_th);
            z_exact = z_exact.max((f_r + f_d - f_r * f_d - sim.outage.mean).abs() / sim.outage.std_error);
        }
        gap[0] = gap[0].max((closed[0] - direct::outage(&q)?).abs());
        gap[1] = gap[1].max((closed[1] - direct::ber(&q)?).abs());
        gap[2] = gap[2].max(rel(closed[2], direct::capacity(&q)?));
    }
    Ok((z, gap, z_exact))
}

fn criterion_1() -> Result<Outcome> {
    let mut spec = preset(Preset::PaperIv);
    spec.variants = vec![variant(1, 1), variant(1, 2), variant(2, 1), variant(2, 2)];
    assert_eq!(spec.sweep.values().len(), 12);
    let (z, gap, z_exact) = triple_agreement(&spec, 0)?;
    info(format!("L=1 M=1 outage max |z| against the exact log-normal CDF: {z_exact:.2}"));
    let checks = [
        ("outage MC", z[0], 3.0),
        ("BER MC", z[1], 3.0),
        ("capacity MC", z[2], 3.0),
        ("outage direct", gap[0], 1e-6),
        ("BER direct", gap[1], 1e-6),
        ("capacity direct", gap[2], 1e-4),
    ];
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, worst, limit) in checks {
        passed &= worst <= limit;
        parts.push(format!("{name} {worst:.3e}/{limit:.0e}"));
    }
    for v in 1..spec.variants.len() {
        let (z, gap, _) = triple_agreement(&spec, v)?;
        info(format!(
            "{}: max |z| outage {:.2} BER {:.2} capacity {:.2}; direct gaps {:.2e} {:.2e} {:.2e}",
            spec.variants[v].label, z[0], z[1], z[2], gap[0], gap[1], gap[2]
        ));
    }
    // capacity with the quadrature-free C2 term
    let mut worst = 0.0f64;
    for x in spec.sweep.values() {
        let q = point_setup(&spec, &spec.variants[0], x)?.query().unwrap();
        let r = metrics::capacity_report(&q)?;
        worst = worst.max(rel(r.c1 + r.c2_adaptive - r.c3, direct::capacity(&q)?));
    }
    info(format!("L=1 M=1 capacity with adaptive C2 vs direct: {worst:.2e}"));
    Ok(Outcome::new(passed, format!("L=1 M=1, 12 points, 1e6 trials: {}", parts.join(", "))))
}

fn criterion_2a() -> Result<Outcome> {
    let curves = run_experiment(&preset(Preset::PaperFig2a))?;
    let (cas, wl) = (curve(&curves, "cascaded NLoS"), curve(&curves, "wireless-only NLoS"));
    let gap: Vec<f64> = wl.analytic.iter().zip(&cas.analytic).map(|(w, c)| w - c).collect();
    // d* is the first grid distance after which the cascade stays ahead
    let start = (0..gap.len()).rev().take_while(|&i| gap[i] > 0.0).last();
    let Some(start) = start else {
        return Ok(Outcome::new(false, "cascaded outage never falls below wireless-only"));
    };
    let monotone = gap[start..].windows(2).all(|w| w[1] > w[0]);
    let d = &cas.values;
    info(format!(
        "at {} m: cascaded {:.3e}, wireless-only {:.3e}",
        d[d.len() - 1],
        cas.analytic[d.len() - 1],
        wl.analytic[d.len() - 1]
    ));
    Ok(Outcome::new(
        monotone && d[start] < 30.0,
        format!("crossover d* = {} m, gap increasing from d* to {} m: {monotone}", d[start], d[d.len() - 1]),
    ))
}

fn criterion_2b() -> Result<Outcome> {
    let curves = run_experiment(&preset(Preset::PaperFig3b))?;
    let ber = |l: &str| &curve(&curves, l).analytic;
    let monotone = curves.iter().all(|c| c.analytic.windows(2).all(|w| w[1] <= w[0]));
    let pairs = [("L=1 M=1", "L=2 M=1"), ("L=1 M=2", "L=2 M=2"), ("L=1 M=1", "L=1 M=2"), ("L=2 M=1", "L=2 M=2")];
    let mut violations = 0;
    for (worse, better) in pairs {
        violations += ber(worse).iter().zip(ber(better)).filter(|(w, b)| !(b < w)).count();
    }
    Ok(Outcome::new(
        monotone && violations == 0,
        format!("nonincreasing in gbar0: {monotone}; ordering violations by L or M: {violations}"),
    ))
}

fn criterion_2c() -> Result<Outcome> {
    let spec = preset(Preset::PaperFig3c);
    let curves = run_experiment(&spec)?;
    let pick = |l: &str, adaptive: bool| -> Vec<f64> {
        let c = curve(&curves, l);
        if !adaptive {
            return c.analytic.clone();
        }
        let idx = |n: &str| c.component_names.iter().position(|x| x == n).unwrap();
        let (c1, c2, c3) = (idx("c1"), idx("c2_adaptive"), idx("c3"));
        c.components.iter().map(|k| k[c1] + k[c2] - k[c3]).collect()
    };
    let judge = |adaptive: bool| -> (usize, usize) {
        let (c11, c12, c21, c22) =
            (pick("L=1 M=1", adaptive), pick("L=1 M=2", adaptive), pick("L=2 M=1", adaptive), pick("L=2 M=2", adaptive));
        let mut order = 0;
        let mut gain = 0;
        for i in 0..c11.len() {
            order += [c12[i] > c11[i], c21[i] > c11[i], c22[i] > c12[i], c22[i] > c21[i]]
                .iter()
                .filter(|ok| !**ok)
                .count();
            if !(c21[i] - c11[i] > c12[i] - c11[i]) {
                gain += 1;
            }
        }
        (order, gain)
    };
    let (order, gain) = judge(false);
    let (order_a, gain_a) = judge(true);
    info(format!("with adaptive C2: ordering violations {order_a}, gain-inequality violations {gain_a}"));
    Ok(Outcome::new(
        order == 0 && gain == 0,
        format!("{} points: ordering violations {order}, gain-inequality violations {gain}", spec.sweep.points),
    ))
}

fn criterion_3() -> Result<Outcome> {
    let mut quad = 0.0f64;
    for kind in [RuleKind::HalfRangeHermite, RuleKind::FullHermite] {
        for order in 1..=MAX_ORDER {
            quad = quad.max(monomial_exactness_error(&*cached_rule(kind, order)?));
        }
    }
    let mut meijer_worst = 0.0f64;
    for a in [1.0, 6.0, 18.0] {
        for z in [1e-3, 1e-1, 1.0, 10.0] {
            for p in [0.5, 1.0] {
                let got = meijer::ber_meijer_integral(p, a, z)?;
                meijer_worst = meijer_worst.max(rel(got, oracle::ber_meijer_integral(p, a, z)?));
            }
            let got = meijer::gamma_log1p_expectation(a, 1.0 / z)?;
            meijer_worst = meijer_worst.max(rel(got, oracle::gamma_log1p_expectation(a, 1.0 / z)?));
        }
    }
    let mut ident = 0.0f64;
    for x in [0.0, 1e-6, 1e-3, 0.5, 1.0, 5.0, 30.0, 200.0] {
        ident = ident.max(rel(upper_gamma(1.0, x)?, (-x).exp()));
    }
    for g in [0.0, 1e-6, 1e-2, 0.5, 1.0, 4.0, 20.0, 100.0] {
        ident = ident.max(rel(conditional_ber(&Modulation::BPSK, g)?, 0.5 * libm::erfc(g.sqrt())));
    }
    Ok(Outcome::new(
        quad <= 1e-10 && meijer_worst <= 1e-8 && ident <= 1e-12,
        format!(
            "quadrature exactness {quad:.2e}/1e-10, Meijer-G vs oracles {meijer_worst:.2e}/1e-8, identities {ident:.2e}/1e-12"
        ),
    ))
}

fn criterion_4() -> Result<Outcome> {
    let fit = fit_lognormal_sum(MU, SIGMA, 1)?;
    let single = log_space(1e-8, 1e8, 4001)
        .into_iter()
        .map(|r| (fit.cdf_ratio(r) - single_branch_cdf(MU, SIGMA, r)).abs())
        .fold(0.0, f64::max);
    let mut passed = single <= 0.01;
    let mut parts = vec![format!("L=1 {single:.4}/0.01")];
    for l in 2..=4u32 {
        let fit = fit_lognormal_sum(MU, SIGMA, l)?;
        let mut oracle = simulate_sums(MU, SIGMA, l, 10_000_000, 0x5eed_0000 + l as u64);
        let d = ks_distance(&mut oracle, |r| fit.cdf_ratio(r));
        passed &= d <= 0.015;
        parts.push(format!("L={l} {d:.4}/0.015"));
    }
    Ok(Outcome::new(passed, parts.join(", ")))
}

/// Central difference of `cdf`, or of `sf` above the median.
fn derivative(cdf: impl Fn(f64) -> f64, sf: impl Fn(f64) -> f64, x: f64) -> f64 {
    let h = 1e-5 * x;
    if cdf(x) < 0.5 {
        (cdf(x + h) - cdf(x - h)) / (2.0 * h)
    } else {
        (sf(x - h) - sf(x + h)) / (2.0 * h)
    }
}

fn criterion_5() -> Result<Outcome> {
    let (gbar0, rho) = (100.0, 100.0);
    let e = EndToEndDistribution::new(
        PlcHopDistribution::new(fit_lognormal_sum(MU, SIGMA, 2)?, gbar0, 2)?,
        RfHopDistribution::new(18.0, 3.0, rho)?,
    );
    let mut survival = 0.0f64;
    for x in log_space(1e-2, 1e6, 200) {
        survival = survival.max((e.complement_at(x) - e.plc.complement_at(x) * e.rf.complement_at(x)).abs());
    }

    let mut fd = 0.0f64;
    for x in log_space(0.5, 5e4, 60) {
        fd = fd.max(rel(derivative(|x| e.plc.cdf_at(x), |x| e.plc.complement_at(x), x), e.plc.pdf_at(x)));
        fd = fd.max(rel(derivative(|x| e.rf.cdf_at(x), |x| e.rf.complement_at(x), x), e.rf.pdf_at(x)));
        fd = fd.max(rel(derivative(|x| e.cdf_at(x), |x| e.complement_at(x), x), e.pdf_at(x)));
    }

    let plan = SimPlan::new(1_000_000, 2024);
    let plc = PlcSimConfig { gbar0, mu_db: MU, sigma_db: SIGMA, branches: 2, relays: 2 };
    let rf = RfSimConfig { m: 3.0, omega: 1.0, n_r: 3, n_d: 2, rho };
    let mut ks = 0.0f64;
    let mut draws = draw_samples(&plan, &plc)?;
    ks = ks.max(ks_distance(&mut draws, |x| e.plc.cdf_at(x)));
    let mut draws = draw_samples(&plan, &rf)?;
    ks = ks.max(ks_distance(&mut draws, |x| e.rf.cdf_at(x)));
    let mut draws = draw_samples(&plan, &CascadeSimConfig { plc, rf })?;
    ks = ks.max(ks_distance(&mut draws, |x| e.cdf_at(x)));

    Ok(Outcome::new(
        survival == 0.0 && fd <= 1e-5 && ks <= 0.01,
        format!("survival factorization max diff {survival:.1e} at 200 probes, finite differences {fd:.2e}/1e-5, Kolmogorov {ks:.4}/0.01"),
    ))
}

fn criterion_6() -> Result<Outcome> {
    let text = "preset = \"paper-fig3b\"\n[sim]\ntrials = 20000\nseed = 11\n";
    let mut outputs = Vec::new();
    for workers in [1, 4, 8] {
        let o = Overrides { workers: Some(workers), ..Default::default() };
        let spec = parse_config(text, Path::new("criterion-6"), &o)?;
        let mut buf = Vec::new();
        write_csv(&run_experiment(&spec)?, &mut buf, Path::new("memory"))?;
        outputs.push(buf);
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    Ok(Outcome::new(same, format!("fig3b with 2e4 trials per point, {} bytes, workers 1/4/8 identical: {same}", outputs[0].len())))
}

fn main() {
    let criteria: [(&str, &str, fn() -> Result<Outcome>); 8] = [
        ("1", "closed form vs Monte Carlo vs direct integration", criterion_1),
        ("2a", "outage crossover against the wireless-only link", criterion_2a),
        ("2b", "BER monotone and ordered by L and M", criterion_2b),
        ("2c", "capacity ordered, branch gain exceeds relay gain", criterion_2c),
        ("3", "special functions and quadrature", criterion_3),
        ("4", "log-normal sum fit accuracy", criterion_4),
        ("5", "distributional identities", criterion_5),
        ("6", "reproducibility across worker counts", criterion_6),
    ];
    let started = Instant::now();
    let mut failures = 0;
    let mut unexpected = Vec::new();
    for (id, title, run) in criteria {
        let t = Instant::now();
        let (passed, detail) = match run() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!passed);
        let known = KNOWN_FAILURES.contains(&id);
        let verdict = match (passed, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        if passed == known {
            unexpected.push(id);
        }
        println!("{verdict} criterion {id} ({title}): {detail} [{:.1} s]", t.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of 8 criteria passed in {:.1} s", 8 - failures, started.elapsed().as_secs_f64());
    if !unexpected.is_empty() {
        println!("acceptance: unexpected outcome for criteria {}", unexpected.join(", "));
        std::process::exit(1);
    }
}

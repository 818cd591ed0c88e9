//! Cross-checks of every closed form against its independent oracle.

use std::path::Path;

use super::config::{parse_config, LinkKind, MetricKind, Overrides, Variant};
use super::experiment::point_setup;
use super::presets::Preset;
use crate::error::Result;
use crate::metrics::{self, conditional_ber, direct, Modulation};
use crate::special::meijer::{self, oracle};
use crate::special::quadrature::{
    cached_rule, half_range_recurrence_discretized, half_range_recurrence_embedded, monomial_exactness_error,
    MAX_ORDER,
};
use crate::special::{upper_gamma, RuleKind};

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, worst: f64, limit: f64, what: &str) -> Self {
        Check {
            name: name.into(),
            passed: worst <= limit,
            detail: format!("worst {what} {worst:.3e} (limit {limit:.0e})"),
        }
    }

    fn failed(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed: false, detail: detail.into() }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

fn quadrature_checks(out: &mut Vec<Check>) -> Result<()> {
    for kind in [RuleKind::HalfRangeHermite, RuleKind::FullHermite] {
        let mut worst: f64 = 0.0;
        for order in 1..=MAX_ORDER {
            worst = worst.max(monomial_exactness_error(&*cached_rule(kind, order)?));
        }
        out.push(Check::new(format!("{kind:?} exactness, orders 1..{MAX_ORDER}"), worst, 1e-10, "relative error"));
    }
    let fresh = half_range_recurrence_discretized(MAX_ORDER)?;
    let embedded = half_range_recurrence_embedded(MAX_ORDER)?;
    let worst = fresh
        .alpha
        .iter()
        .zip(&embedded.alpha)
        .chain(fresh.beta.iter().zip(&embedded.beta))
        .map(|(a, b)| rel(*a, *b))
        .fold(0.0, f64::max);
    out.push(Check::new("embedded half-range table vs regeneration", worst, 1e-10, "relative difference"));
    Ok(())
}

fn special_checks(out: &mut Vec<Check>) -> Result<()> {
    let (mut ber, mut cap) = (0.0f64, 0.0f64);
    for a in [1.0, 6.0, 18.0] {
        for z in [1e-3, 1e-1, 1.0, 10.0] {
            for p in [0.5, 1.0] {
                ber = ber.max(rel(meijer::ber_meijer_integral(p, a, z)?, oracle::ber_meijer_integral(p, a, z)?));
            }
            cap = cap.max(rel(
                meijer::gamma_log1p_expectation(a, 1.0 / z)?,
                oracle::gamma_log1p_expectation(a, 1.0 / z)?,
            ));
        }
    }
    out.push(Check::new("BER Meijer-G vs double-exponential oracle", ber, 1e-8, "relative error"));
    out.push(Check::new("capacity Meijer-G vs double-exponential oracle", cap, 1e-8, "relative error"));

    let mut worst = 0.0f64;
    for x in [0.0, 1e-3, 0.5, 1.0, 5.0, 30.0] {
        worst = worst.max(rel(upper_gamma(1.0, x)?, (-x).exp()));
    }
    out.push(Check::new("upper gamma at s = 1 equals exp(-x)", worst, 1e-12, "relative error"));
    let mut worst = 0.0f64;
    for g in [1e-4, 0.1, 1.0, 4.0, 20.0] {
        worst = worst.max(rel(conditional_ber(&Modulation::BPSK, g)?, 0.5 * libm::erfc(g.sqrt())));
    }
    out.push(Check::new("BPSK conditional BER equals Q(sqrt(2 snr))", worst, 1e-12, "relative error"));
    Ok(())
}

/// Closed forms against direct integration of the end-to-end density on
/// the paper-iv sweep, for every combination of 1 or 2 branches and relays.
fn metric_checks(out: &mut Vec<Check>) -> Result<()> {
    let mut spec = parse_config("", Path::new("selftest"), &Overrides { preset: Some(Preset::PaperIv), ..Default::default() })?;
    spec.variants = Vec::new();
    for (l, m) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        spec.variants.push(Variant {
            label: format!("L={l} M={m}"),
            branches: l,
            relays: m,
            modulation: Modulation::BPSK,
            n_pl: None,
            link: LinkKind::Cascaded,
        });
    }
    for metric in [MetricKind::Outage, MetricKind::Ber, MetricKind::Capacity] {
        let (limit, what) = match metric {
            MetricKind::Capacity => (1e-4, "relative error"),
            _ => (1e-6, "absolute error"),
        };
        let mut worst = 0.0f64;
        let mut failure = None;
        for variant in &spec.variants {
            for x in spec.sweep.values() {
                let setup = point_setup(&spec, variant, x)?;
                let query = setup.query().expect("cascaded");
                let gap = match metric {
                    MetricKind::Outage => metrics::outage_probability(&query).and_then(|v| Ok((v - direct::outage(&query)?).abs())),
                    MetricKind::Ber => metrics::average_ber(&query).and_then(|v| Ok((v - direct::ber(&query)?).abs())),
                    MetricKind::Capacity => {
                        metrics::average_capacity(&query).and_then(|v| Ok(rel(v, direct::capacity(&query)?)))
                    }
                };
                match gap {
                    Ok(g) => worst = worst.max(g),
                    Err(e) => {
                        failure.get_or_insert(format!("{} at gbar0 = {x} dB: {e}", variant.label));
                    }
                }
            }
        }
        let name = format!("{metric:?} closed form vs direct integration");
        out.push(match failure {
            Some(f) => Check::failed(name, f),
            None => Check::new(name, worst, limit, what),
        });
    }
    Ok(())
}

/// Runs every check; an `Err` means a check could not be carried out at all.
pub fn run_selftest() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    quadrature_checks(&mut out)?;
    special_checks(&mut out)?;
    metric_checks(&mut out)?;
    Ok(out)
}

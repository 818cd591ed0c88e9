//! Closed-form outage probability, average BER and ergodic capacity, plus
//! the direct-integration oracles they are checked against.
//!
//! Average BER is split as `q^p/(2Γ(p))·(P_e1 − P_e2 + P_e3)` and capacity
//! as `C̄₁ + C̄₂ − C̄₃`; every report keeps its components.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::snr::{EndToEndDistribution, RfHopDistribution};
use crate::special::adaptive::{integrate_pieces, Tolerance};
use crate::special::meijer::{ber_meijer_integral, gamma_log1p_expectation};
use crate::special::quadrature::{cached_rule, MAX_ORDER};
use crate::special::{ln_gamma, meijer_cap_term, reg_upper_gamma, RuleKind};

/// Largest tolerated gap between the half-range sum for `P_e3` and its
/// adaptive evaluation.
pub const P_E3_TOLERANCE: f64 = 1e-6;

/// Binary modulation family with conditional BER `Γ(p, qγ)/(2Γ(p))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulation {
    pub name: &'static str,
    pub p: f64,
    pub q: f64,
}

impl Modulation {
    pub const BFSK: Modulation = Modulation { name: "BFSK", p: 0.5, q: 0.5 };
    pub const BPSK: Modulation = Modulation { name: "BPSK", p: 0.5, q: 1.0 };
    pub const DPSK: Modulation = Modulation { name: "DPSK", p: 1.0, q: 1.0 };
    pub const NCFSK: Modulation = Modulation { name: "NCFSK", p: 1.0, q: 0.5 };

    pub const PRESETS: [Modulation; 4] = [Self::BFSK, Self::BPSK, Self::DPSK, Self::NCFSK];

    pub fn custom(p: f64, q: f64) -> Result<Self> {
        let m = Modulation { name: "custom", p, q };
        m.validate()?;
        Ok(m)
    }

    /// Case-insensitive preset lookup.
    pub fn from_name(name: &str) -> Option<Self> {
        Self::PRESETS.iter().copied().find(|m| m.name.eq_ignore_ascii_case(name))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p.is_finite()) {
            return Err(Error::invalid("modulation.p", format!("must be > 0, got {}", self.p)));
        }
        if !(self.q > 0.0 && self.q.is_finite()) {
            return Err(Error::invalid("modulation.q", format!("must be > 0, got {}", self.q)));
        }
        Ok(())
    }
}

/// Everything a metric evaluation needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricQuery {
    pub e2e: EndToEndDistribution,
    pub gamma_th: f64,
    pub modulation: Modulation,
    pub half_order: usize,
    pub full_order: usize,
}

impl MetricQuery {
    pub const DEFAULT_HALF_ORDER: usize = 64;
    pub const DEFAULT_FULL_ORDER: usize = 40;

    pub fn new(e2e: EndToEndDistribution, gamma_th: f64, modulation: Modulation) -> Self {
        MetricQuery {
            e2e,
            gamma_th,
            modulation,
            half_order: Self::DEFAULT_HALF_ORDER,
            full_order: Self::DEFAULT_FULL_ORDER,
        }
    }

    pub fn with_orders(mut self, half_order: usize, full_order: usize) -> Self {
        self.half_order = half_order;
        self.full_order = full_order;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_th > 0.0 && self.gamma_th.is_finite()) {
            return Err(Error::invalid("gamma_th", format!("must be > 0, got {}", self.gamma_th)));
        }
        self.modulation.validate()?;
        for order in [self.half_order, self.full_order] {
            if order == 0 || order > MAX_ORDER {
                return Err(Error::UnsupportedOrder { order, max: MAX_ORDER });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageReport {
    pub value: f64,
    /// `1 + (F_R − 1)·Q(𝒜, αγ_th/ρ)`, grouped as `P + F_R·Q`.
    pub gamma_form: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerReport {
    pub value: f64,
    pub p_e1: f64,
    pub p_e2: f64,
    pub p_e3: f64,
    pub p_e3_adaptive: f64,
    pub half_order: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityReport {
    /// nats/s/Hz.
    pub value: f64,
    pub c1: f64,
    pub c1_meijer: f64,
    pub c2: f64,
    /// Adaptive evaluation of the same `C̄₂` integral, for comparison.
    pub c2_adaptive: f64,
    pub c3: f64,
    /// Full-range nodes that fell beyond the saturation level of the fit.
    pub guarded_nodes: usize,
    pub half_order: usize,
    pub full_order: usize,
}

/// `Γ(p, qγ)/(2Γ(p))`.
pub fn conditional_ber(modulation: &Modulation, snr: f64) -> Result<f64> {
    modulation.validate()?;
    if !(snr >= 0.0) {
        return Err(Error::invalid("snr", format!("must be >= 0, got {snr}")));
    }
    Ok(0.5 * reg_upper_gamma(modulation.p, modulation.q * snr)?)
}

/// Outage at `γ_th`, evaluated in both algebraic groupings.
pub fn outage_report(query: &MetricQuery) -> Result<OutageReport> {
    query.validate()?;
    let e2e = &query.e2e;
    let x = query.gamma_th;
    let value = e2e.cdf_at(x);
    let gamma_form = e2e.rf.cdf_at(x) + e2e.plc.cdf_at(x) * e2e.rf.complement_at(x);
    Ok(OutageReport { value, gamma_form })
}

pub fn outage_probability(query: &MetricQuery) -> Result<f64> {
    Ok(outage_report(query)?.value)
}

/// Outage of a radio-only link spanning the full distance.
pub fn wireless_only_outage(rf_full_path: &RfHopDistribution, gamma_th: f64) -> Result<f64> {
    if !(gamma_th >= 0.0) {
        return Err(Error::invalid("gamma_th", format!("must be >= 0, got {gamma_th}")));
    }
    Ok(rf_full_path.cdf_at(gamma_th))
}

/// Average BER of a radio-only link: the cascade expression without the
/// relay term, so `p_e3` is zero.
pub fn wireless_only_ber_report(rf_full_path: &RfHopDistribution, modulation: &Modulation) -> Result<BerReport> {
    modulation.validate()?;
    let Modulation { p, q, .. } = *modulation;
    let rf = rf_full_path;
    let gamma_p = ln_gamma(p).exp();
    let p_e1 = gamma_p / q.powf(p);
    let p_e2 = ber_meijer_integral(p, rf.shape_a, rf.alpha_g / (q * rf.rho))? / q.powf(p);
    let value = q.powf(p) / (2.0 * gamma_p) * (p_e1 - p_e2);
    Ok(BerReport { value, p_e1, p_e2, p_e3: 0.0, p_e3_adaptive: 0.0, half_order: 0 })
}

/// Ergodic capacity of a radio-only link in nats/s/Hz; only `c1` is nonzero.
pub fn wireless_only_capacity_report(rf_full_path: &RfHopDistribution) -> Result<CapacityReport> {
    let rf = rf_full_path;
    let c1 = gamma_log1p_expectation(rf.shape_a, rf.scale())?;
    let z = rf.alpha_g / rf.rho;
    let c1_meijer = (rf.shape_a * z.ln() - ln_gamma(rf.shape_a)).exp() * meijer_cap_term(rf.shape_a, z)?;
    Ok(CapacityReport {
        value: c1,
        c1,
        c1_meijer,
        c2: 0.0,
        c2_adaptive: 0.0,
        c3: 0.0,
        guarded_nodes: 0,
        half_order: 0,
        full_order: 0,
    })
}

const ORACLE_TOL: Tolerance = Tolerance::new(1e-15, 1e-11);

/// `∫_0^∞ e^{−y²} g(y) dy` by adaptive Gauss-Kronrod with breakpoints
/// suited to the half-range weight.
fn half_range_adaptive<F: FnMut(f64) -> f64>(mut g: F) -> Result<f64> {
    let breaks = [0.0, 1e-6, 1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 9.0, 30.0];
    Ok(integrate_pieces(|y| (-y * y).exp() * g(y), &breaks, ORACLE_TOL)?.value)
}

/// Integrand of `P_e3` after `qx = y²`, without the `e^{−y²}` weight.
fn p_e3_integrand(query: &MetricQuery) -> impl Fn(f64) -> f64 + '_ {
    let Modulation { p, q, .. } = query.modulation;
    let e2e = &query.e2e;
    move |y: f64| {
        if y <= 0.0 {
            return 0.0;
        }
        let x = y * y / q;
        let f_r = e2e.plc.cdf_at(x);
        if f_r == 0.0 {
            return 0.0;
        }
        2.0 * y.powf(2.0 * p - 1.0) * q.powf(-p) * e2e.rf.complement_at(x) * f_r
    }
}

/// Average BER in closed form. Fails with
/// [`Error::QuadratureInsufficient`] when the half-range sum for `P_e3`
/// strays from its adaptive evaluation by more than [`P_E3_TOLERANCE`].
pub fn ber_report(query: &MetricQuery) -> Result<BerReport> {
    query.validate()?;
    let Modulation { p, q, .. } = query.modulation;
    let rf = &query.e2e.rf;
    let gamma_p = ln_gamma(p).exp();

    let p_e1 = gamma_p / q.powf(p);
    let z = rf.alpha_g / (q * rf.rho);
    // meijer_ber_term/(q^p Γ(𝒜)) without forming Γ(𝒜)
    let p_e2 = ber_meijer_integral(p, rf.shape_a, z)? / q.powf(p);

    let rule = cached_rule(RuleKind::HalfRangeHermite, query.half_order)?;
    let g = p_e3_integrand(query);
    let p_e3 = rule.integrate(&g);
    let p_e3_adaptive = half_range_adaptive(&g)?;
    if !p_e3.is_finite() || (p_e3 - p_e3_adaptive).abs() > P_E3_TOLERANCE {
        return Err(Error::QuadratureInsufficient {
            term: "P_e3",
            order: query.half_order,
            rule: p_e3,
            adaptive: p_e3_adaptive,
        });
    }
    let value = q.powf(p) / (2.0 * gamma_p) * (p_e1 - p_e2 + p_e3);
    Ok(BerReport { value, p_e1, p_e2, p_e3, p_e3_adaptive, half_order: query.half_order })
}

pub fn average_ber(query: &MetricQuery) -> Result<f64> {
    Ok(ber_report(query)?.value)
}

/// `C̄₂` as a full-range Hermite sum over `z = arg/√2`.
fn capacity_c2(query: &MetricQuery) -> Result<(f64, usize)> {
    let e2e = &query.e2e;
    let fit = &e2e.plc.fit;
    let m = e2e.plc.relays as f64;
    let rule = cached_rule(RuleKind::FullHermite, query.full_order)?;
    let mut guarded = 0;
    let mut sum = 0.0;
    for (z, w) in rule.iter() {
        let t = SQRT_2 * z;
        let Some(r) = fit.ratio_at_argument(t) else {
            // beyond Φ(a₀): mass at most 1 − Φ(a₀)
            guarded += 1;
            continue;
        };
        let x = e2e.plc.gbar0 * r;
        if !x.is_finite() {
            guarded += 1;
            continue;
        }
        let sel = if e2e.plc.relays == 1 {
            1.0
        } else {
            m * ((m - 1.0) * crate::special::ln_std_normal_cdf(t)).exp()
        };
        sum += w * sel / PI.sqrt() * x.ln_1p() * e2e.rf.complement_at(x);
    }
    Ok((sum, guarded))
}

/// `C̄₃` as a half-range sum after `αx/ρ = y²`.
fn capacity_c3(query: &MetricQuery) -> Result<f64> {
    let rule = cached_rule(RuleKind::HalfRangeHermite, query.half_order)?;
    Ok(rule.integrate(c3_integrand(query)))
}

fn c3_integrand(query: &MetricQuery) -> impl Fn(f64) -> f64 + '_ {
    let e2e = &query.e2e;
    let rf = &e2e.rf;
    let a = rf.shape_a;
    let ln_norm = ln_gamma(a);
    move |y: f64| {
        if y <= 0.0 {
            return 0.0;
        }
        let x = rf.scale() * y * y;
        let ln_f_r = e2e.plc.ln_cdf_at(x);
        let ln_pre = std::f64::consts::LN_2 + (2.0 * a - 1.0) * y.ln() - ln_norm + ln_f_r;
        ln_pre.exp() * x.ln_1p()
    }
}

/// Ergodic capacity in nats/s/Hz.
pub fn capacity_report(query: &MetricQuery) -> Result<CapacityReport> {
    query.validate()?;
    let rf = &query.e2e.rf;
    let c1 = gamma_log1p_expectation(rf.shape_a, rf.scale())?;
    let z = rf.alpha_g / rf.rho;
    let c1_meijer = (rf.shape_a * z.ln() - ln_gamma(rf.shape_a)).exp() * meijer_cap_term(rf.shape_a, z)?;
    let (c2, guarded_nodes) = capacity_c2(query)?;
    let c2_adaptive = direct::c2(query)?;
    let c3 = capacity_c3(query)?;
    let value = c1 + c2 - c3;
    if !value.is_finite() {
        return Err(Error::numerical("average_capacity", format!("non-finite result ({c1}, {c2}, {c3})")));
    }
    Ok(CapacityReport {
        value,
        c1,
        c1_meijer,
        c2,
        c2_adaptive,
        c3,
        guarded_nodes,
        half_order: query.half_order,
        full_order: query.full_order,
    })
}

pub fn average_capacity(query: &MetricQuery) -> Result<f64> {
    Ok(capacity_report(query)?.value)
}

/// Oracles that integrate the end-to-end PDF directly, sharing nothing with
/// the closed forms beyond the distribution functions themselves.
pub mod direct {
    use super::*;

    /// `ln x` limits outside of which the end-to-end density is negligible.
    fn log_range(e2e: &EndToEndDistribution) -> (f64, f64) {
        let fit = &e2e.plc.fit;
        let ln_g = e2e.plc.gbar0.ln();
        let ln_r = |t: f64| fit.ratio_at_argument(t).map(f64::ln);
        let r_lo = ln_r(-10.0).unwrap_or(-700.0) + ln_g;
        let r_hi = ln_r(9f64.min(fit.a0 - 1e-3)).unwrap_or(700.0) + ln_g;
        let rf = &e2e.rf;
        let a = rf.shape_a;
        let d_lo = rf.scale().ln() + ((1e-17f64).ln() + ln_gamma(a + 1.0)) / a;
        let d_hi = (rf.scale() * (a + 12.0 * a.sqrt() + 45.0)).ln();
        (r_lo.min(d_lo).max(-700.0), r_hi.min(d_hi).min(700.0))
    }

    fn integrate_log<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<f64> {
        if !(hi > lo) {
            return Ok(0.0);
        }
        let pieces = ((hi - lo) / 0.5).ceil().max(1.0) as usize;
        let breaks: Vec<f64> = (0..=pieces).map(|i| lo + (hi - lo) * i as f64 / pieces as f64).collect();
        let g = |t: f64| {
            let x = t.exp();
            f(x) * x
        };
        Ok(integrate_pieces(g, &breaks, ORACLE_TOL)?.value)
    }

    /// `∫_0^{γ_th} f_eq(x) dx`.
    pub fn outage(query: &MetricQuery) -> Result<f64> {
        query.validate()?;
        let (lo, hi) = log_range(&query.e2e);
        let upper = query.gamma_th.ln().min(hi);
        integrate_log(|x| query.e2e.pdf_at(x), lo, upper)
    }

    /// `∫ Γ(p, qx)/(2Γ(p)) f_eq(x) dx`.
    pub fn ber(query: &MetricQuery) -> Result<f64> {
        query.validate()?;
        let (lo, hi) = log_range(&query.e2e);
        let Modulation { p, q, .. } = query.modulation;
        integrate_log(
            |x| 0.5 * reg_upper_gamma(p, q * x).unwrap_or(f64::NAN) * query.e2e.pdf_at(x),
            lo,
            hi,
        )
    }

    /// `∫ ln(1+x) f_eq(x) dx`.
    pub fn capacity(query: &MetricQuery) -> Result<f64> {
        query.validate()?;
        let (lo, hi) = log_range(&query.e2e);
        integrate_log(|x| x.ln_1p() * query.e2e.pdf_at(x), lo, hi)
    }

    /// Adaptive evaluation of the `P_e3` integral.
    pub fn p_e3(query: &MetricQuery) -> Result<f64> {
        query.validate()?;
        half_range_adaptive(p_e3_integrand(query))
    }

    /// `∫ ln(1+x) f_R(x) (1 − F_D(x)) dx`, the term the full-range sum approximates.
    pub fn c2(query: &MetricQuery) -> Result<f64> {
        query.validate()?;
        let (lo, hi) = log_range(&query.e2e);
        let e2e = &query.e2e;
        integrate_log(|x| x.ln_1p() * e2e.plc.pdf_at(x) * e2e.rf.complement_at(x), lo, hi)
    }

    /// Adaptive evaluation of the `C̄₃` integral.
    pub fn c3(query: &MetricQuery) -> Result<f64> {
        query.validate()?;
        half_range_adaptive(c3_integrand(query))
    }
}

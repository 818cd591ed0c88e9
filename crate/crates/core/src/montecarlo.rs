//! Monte-Carlo oracle for the hop and end-to-end SNRs.
//!
//! Trials are grouped into fixed-size blocks. Block `k` draws from a ChaCha8
//! stream keyed by `(seed, k)`, blocks run on a rayon pool of `workers`
//! threads, and block results are merged in block order. Estimates are
//! therefore bit-identical for any worker count.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lognormal_sum::LAMBDA;
use crate::metrics::Modulation;
use crate::special::{reg_upper_gamma, std_normal_quantile};

/// Trials per random stream.
pub const BLOCK_TRIALS: u64 = 4096;

/// Smallest accepted trial count.
pub const MIN_TRIALS: u64 = 1000;

/// Below this many events a proportion is flagged as unreliable.
pub const MIN_EVENTS: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimPlan {
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    /// Two-sided level of the reported half-widths.
    pub confidence: f64,
}

impl SimPlan {
    pub fn new(trials: u64, seed: u64) -> Self {
        SimPlan { trials, seed, workers: 1, confidence: 0.99 }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < MIN_TRIALS {
            return Err(Error::TooFewTrials { trials: self.trials, min: MIN_TRIALS });
        }
        if self.workers < 1 {
            return Err(Error::invalid("sim.workers", "need at least one worker"));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::invalid(
                "sim.confidence",
                format!("must lie in (0, 1), got {}", self.confidence),
            ));
        }
        Ok(())
    }

    fn z_score(&self) -> f64 {
        std_normal_quantile(0.5 + 0.5 * self.confidence)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub mean: f64,
    /// Half-width of the normal-approximation interval at the plan's confidence.
    pub half_width: f64,
    pub std_error: f64,
    pub trials: u64,
    /// Set for proportions with fewer than [`MIN_EVENTS`] events; the
    /// half-width is then floored at that of `MIN_EVENTS` events.
    pub insufficient_events: bool,
}

/// Source of i.i.d. SNR draws.
pub trait SnrSampler: Sync {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;
}

/// Best-of-M relay with L-branch MRC over log-normal PLC gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlcSimConfig {
    pub gbar0: f64,
    pub mu_db: f64,
    pub sigma_db: f64,
    pub branches: u32,
    pub relays: u32,
}

impl PlcSimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gbar0 > 0.0 && self.gbar0.is_finite()) {
            return Err(Error::invalid("gbar0", format!("must be > 0, got {}", self.gbar0)));
        }
        if !(self.sigma_db > 0.0) || !self.mu_db.is_finite() {
            return Err(Error::invalid("plc.sigma_db", "log-normal moments must be finite with sigma > 0"));
        }
        if self.branches < 1 || self.relays < 1 {
            return Err(Error::invalid("plc.branches", "branch and relay counts must be >= 1"));
        }
        Ok(())
    }
}

/// Nakagami-m MIMO link after OSTBC combining.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfSimConfig {
    pub m: f64,
    pub omega: f64,
    pub n_r: u32,
    pub n_d: u32,
    pub rho: f64,
}

impl RfSimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.m >= 0.5) || !(self.omega > 0.0) {
            return Err(Error::invalid("rf.m", "need m >= 0.5 and omega > 0"));
        }
        if self.n_r < 1 || self.n_d < 1 {
            return Err(Error::invalid("rf.n_r", "antenna counts must be >= 1"));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::invalid("rho", format!("must be > 0, got {}", self.rho)));
        }
        Ok(())
    }

    fn gain(&self) -> Gamma<f64> {
        Gamma::new(self.m, self.omega / self.m).expect("validated Nakagami parameters")
    }
}

/// One PLC-hop draw: `max over M of Σ_L γ̄₀ h²`.
pub fn sample_plc_snr<R: Rng + ?Sized>(cfg: &PlcSimConfig, rng: &mut R) -> f64 {
    let (m2, s2) = (2.0 * LAMBDA * cfg.mu_db, 2.0 * LAMBDA * cfg.sigma_db);
    let mut best = 0.0f64;
    for _ in 0..cfg.relays {
        let mut sum = 0.0;
        for _ in 0..cfg.branches {
            let z: f64 = StandardNormal.sample(rng);
            sum += (m2 + s2 * z).exp();
        }
        best = best.max(sum);
    }
    cfg.gbar0 * best
}

/// One RF-hop draw: `ρ Σ |h_ij|²` with Gamma(m, Ω/m) entry powers.
pub fn sample_mimo_snr<R: Rng + ?Sized>(cfg: &RfSimConfig, rng: &mut R) -> f64 {
    let gain = cfg.gain();
    let entries = cfg.n_r * cfg.n_d;
    cfg.rho * (0..entries).map(|_| gain.sample(rng)).sum::<f64>()
}

impl SnrSampler for PlcSimConfig {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        sample_plc_snr(self, rng)
    }
}

impl SnrSampler for RfSimConfig {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        sample_mimo_snr(self, rng)
    }
}

/// Decode-and-forward cascade, `min(γ_R, γ_D)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeSimConfig {
    pub plc: PlcSimConfig,
    pub rf: RfSimConfig,
}

impl CascadeSimConfig {
    pub fn validate(&self) -> Result<()> {
        self.plc.validate()?;
        self.rf.validate()
    }
}

impl SnrSampler for CascadeSimConfig {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let r = sample_plc_snr(&self.plc, rng);
        let d = sample_mimo_snr(&self.rf, rng);
        r.min(d)
    }
}

/// Every draw equals `snr`; useful for checking estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMass(pub f64);

impl SnrSampler for PointMass {
    fn sample<R: Rng + ?Sized>(&self, _rng: &mut R) -> f64 {
        self.0
    }
}

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

fn block_sizes(trials: u64) -> impl Iterator<Item = (u64, u64)> + Clone {
    let blocks = trials.div_ceil(BLOCK_TRIALS);
    (0..blocks).map(move |k| (k, BLOCK_TRIALS.min(trials - k * BLOCK_TRIALS)))
}

/// Runs `f` over every block and returns the block results in block order.
fn run_blocks<T, F>(plan: &SimPlan, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    plan.validate()?;
    let blocks: Vec<(u64, u64)> = block_sizes(plan.trials).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.workers)
        .build()
        .map_err(|e| Error::numerical("simulation", format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| {
        blocks
            .par_iter()
            .map(|&(k, n)| f(&mut block_rng(plan.seed, k), n))
            .collect()
    }))
}

/// Raw draws in trial order.
pub fn draw_samples<S: SnrSampler>(plan: &SimPlan, sampler: &S) -> Result<Vec<f64>> {
    let blocks = run_blocks(plan, |rng, n| (0..n).map(|_| sampler.sample(rng)).collect::<Vec<_>>())?;
    Ok(blocks.concat())
}

/// Paired `(γ_R, γ_D)` draws of a cascade, in trial order.
pub fn draw_hop_pairs(plan: &SimPlan, cfg: &CascadeSimConfig) -> Result<Vec<(f64, f64)>> {
    cfg.validate()?;
    let blocks = run_blocks(plan, |rng, n| {
        (0..n)
            .map(|_| (sample_plc_snr(&cfg.plc, rng), sample_mimo_snr(&cfg.rf, rng)))
            .collect::<Vec<_>>()
    })?;
    Ok(blocks.concat())
}

/// Running mean and centred second moment (Welford, Chan et al. for merges).
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
    events: u64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.n += 1;
        let delta = v - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (v - self.mean);
        if v != 0.0 {
            self.events += 1;
        }
    }

    fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = (self.n + other.n) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * (other.n as f64 / n);
        self.m2 += other.m2 + delta * delta * (self.n as f64 * other.n as f64 / n);
        self.n += other.n;
        self.events += other.events;
    }

    fn estimate(&self, plan: &SimPlan, proportion: bool) -> SimEstimate {
        let n = self.n as f64;
        let mean = self.mean;
        let var = (self.m2 / (n - 1.0)).max(0.0);
        let std_error = (var / n).sqrt();
        let z = plan.z_score();
        let mut half_width = z * std_error;
        let mut insufficient_events = false;
        if proportion {
            if self.events < MIN_EVENTS {
                insufficient_events = true;
                let floor_p = MIN_EVENTS as f64 / n;
                half_width = half_width.max(z * (floor_p * (1.0 - floor_p) / n).sqrt());
            }
        }
        SimEstimate { mean, half_width, std_error, trials: self.n, insufficient_events }
    }
}

/// Per-trial statistics accumulated in one pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimMetrics {
    pub outage: SimEstimate,
    pub ber: SimEstimate,
    pub capacity: SimEstimate,
}

/// Outage, average conditional BER and capacity from a single set of draws.
pub fn mc_all<S: SnrSampler>(
    plan: &SimPlan,
    sampler: &S,
    gamma_th: f64,
    modulation: &Modulation,
) -> Result<SimMetrics> {
    modulation.validate()?;
    if !(gamma_th >= 0.0) {
        return Err(Error::invalid("gamma_th", format!("must be >= 0, got {gamma_th}")));
    }
    let Modulation { p, q, .. } = *modulation;
    let blocks = run_blocks(plan, |rng, n| {
        let mut acc = [Moments::default(); 3];
        for _ in 0..n {
            let g = sampler.sample(rng);
            acc[0].push(if g < gamma_th { 1.0 } else { 0.0 });
            acc[1].push(0.5 * reg_upper_gamma(p, q * g).unwrap_or(f64::NAN));
            acc[2].push(g.ln_1p());
        }
        acc
    })?;
    let mut total = [Moments::default(); 3];
    for b in &blocks {
        for (t, m) in total.iter_mut().zip(b) {
            t.merge(m);
        }
    }
    let ber = total[1].estimate(plan, false);
    if !ber.mean.is_finite() {
        return Err(Error::numerical("mc_ber", "conditional BER evaluation failed on a draw"));
    }
    Ok(SimMetrics {
        outage: total[0].estimate(plan, true),
        ber,
        capacity: total[2].estimate(plan, false),
    })
}

pub fn mc_outage<S: SnrSampler>(plan: &SimPlan, sampler: &S, gamma_th: f64) -> Result<SimEstimate> {
    if !(gamma_th >= 0.0) {
        return Err(Error::invalid("gamma_th", format!("must be >= 0, got {gamma_th}")));
    }
    let blocks = run_blocks(plan, |rng, n| {
        let mut acc = Moments::default();
        for _ in 0..n {
            acc.push(if sampler.sample(rng) < gamma_th { 1.0 } else { 0.0 });
        }
        acc
    })?;
    Ok(merge(&blocks).estimate(plan, true))
}

/// Average of the conditional BER `Γ(p, qγ)/(2Γ(p))` over draws.
pub fn mc_ber<S: SnrSampler>(plan: &SimPlan, sampler: &S, modulation: &Modulation) -> Result<SimEstimate> {
    modulation.validate()?;
    let Modulation { p, q, .. } = *modulation;
    let blocks = run_blocks(plan, |rng, n| {
        let mut acc = Moments::default();
        for _ in 0..n {
            acc.push(0.5 * reg_upper_gamma(p, q * sampler.sample(rng)).unwrap_or(f64::NAN));
        }
        acc
    })?;
    let est = merge(&blocks).estimate(plan, false);
    if !est.mean.is_finite() {
        return Err(Error::numerical("mc_ber", "conditional BER evaluation failed on a draw"));
    }
    Ok(est)
}

/// Average of `ln(1 + γ)` in nats/s/Hz.
pub fn mc_capacity<S: SnrSampler>(plan: &SimPlan, sampler: &S) -> Result<SimEstimate> {
    let blocks = run_blocks(plan, |rng, n| {
        let mut acc = Moments::default();
        for _ in 0..n {
            acc.push(sampler.sample(rng).ln_1p());
        }
        acc
    })?;
    Ok(merge(&blocks).estimate(plan, false))
}

/// BPSK with explicit symbols and Gaussian noise; counts bit errors.
pub fn mc_ber_bpsk_bitflip<S: SnrSampler>(plan: &SimPlan, sampler: &S) -> Result<SimEstimate> {
    let blocks = run_blocks(plan, |rng, n| {
        let mut acc = Moments::default();
        for _ in 0..n {
            let g = sampler.sample(rng);
            let bit = rng.gen::<bool>();
            let symbol = if bit { 1.0 } else { -1.0 };
            let noise: f64 = StandardNormal.sample(rng);
            // unit-variance noise per real dimension, amplitude √(2γ)
            let received = symbol * (2.0 * g).sqrt() + noise;
            acc.push(if (received > 0.0) != bit { 1.0 } else { 0.0 });
        }
        acc
    })?;
    Ok(merge(&blocks).estimate(plan, true))
}

fn merge(blocks: &[Moments]) -> Moments {
    let mut total = Moments::default();
    for b in blocks {
        total.merge(b);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::conditional_ber;

    fn cascade() -> CascadeSimConfig {
        CascadeSimConfig {
            plc: PlcSimConfig { gbar0: 10.0, mu_db: 0.0, sigma_db: 12.0, branches: 2, relays: 2 },
            rf: RfSimConfig { m: 3.0, omega: 1.0, n_r: 3, n_d: 2, rho: 10.0 },
        }
    }

    #[test]
    fn point_mass_ber_is_exact() {
        let plan = SimPlan::new(5000, 1);
        let est = mc_ber(&plan, &PointMass(1.7), &Modulation::BPSK).unwrap();
        assert_eq!(est.mean, conditional_ber(&Modulation::BPSK, 1.7).unwrap());
        assert_eq!(est.half_width, 0.0);
    }

    #[test]
    fn zero_events_are_flagged() {
        let plan = SimPlan::new(20_000, 3);
        let est = mc_outage(&plan, &cascade(), 1e-12).unwrap();
        assert_eq!(est.mean, 0.0);
        assert!(est.insufficient_events);
        assert!(est.half_width > 0.0);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let cfg = cascade();
        let base = mc_all(&SimPlan::new(50_000, 9), &cfg, 5.0, &Modulation::BPSK).unwrap();
        for w in [2, 3, 8] {
            let other = mc_all(&SimPlan::new(50_000, 9).with_workers(w), &cfg, 5.0, &Modulation::BPSK).unwrap();
            assert_eq!(base, other);
        }
        let different = mc_all(&SimPlan::new(50_000, 10), &cfg, 5.0, &Modulation::BPSK).unwrap();
        assert_ne!(base.capacity.mean, different.capacity.mean);
    }

    #[test]
    fn plan_validation() {
        assert!(matches!(SimPlan::new(999, 0).validate(), Err(Error::TooFewTrials { .. })));
        assert!(SimPlan::new(1000, 0).with_workers(0).validate().is_err());
    }

    #[test]
    fn sample_counts_and_order() {
        let plan = SimPlan::new(10_000, 4);
        let a = draw_samples(&plan, &cascade().rf).unwrap();
        let b = draw_samples(&plan.with_workers(4), &cascade().rf).unwrap();
        assert_eq!(a.len(), 10_000);
        assert_eq!(a, b);
    }
}

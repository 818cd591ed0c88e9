//! Three-parameter approximation to the CDF of a sum of squared log-normal
//! gains, `F(x) = Φ(a₀ − a₁ (x/γ̄₀)^(−a₂/λ))`, and its least-squares fit.
//!
//! Internally the power law is carried as `b = a₂/λ` and evaluated as
//! `(a₀ − a₁) − a₁·expm1(−b ln r)`, which stays accurate when `b` is tiny and
//! `a₀`, `a₁` are correspondingly huge (the single-branch case).

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::special::{ln_std_normal_cdf, std_normal_cdf, std_normal_pdf, std_normal_quantile};

/// `λ = ln(10)/10`, the dB-to-neper factor for power quantities.
pub const LAMBDA: f64 = std::f64::consts::LN_10 / 10.0;

/// Lower bound on the saturation level `Φ(a₀)` accepted from a fit.
pub const MIN_CEILING: f64 = 0.999;

/// Fitted constants together with the statistics they were fitted for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LognormalSumFit {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub lambda: f64,
    pub mu_db: f64,
    pub sigma_db: f64,
    pub branches: u32,
}

impl LognormalSumFit {
    /// Builds a fit from explicit constants, checking the model invariants.
    pub fn new(a0: f64, a1: f64, a2: f64, mu_db: f64, sigma_db: f64, branches: u32) -> Result<Self> {
        let fit = LognormalSumFit { a0, a1, a2, lambda: LAMBDA, mu_db, sigma_db, branches };
        fit.validate()?;
        Ok(fit)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a1 > 0.0 && self.a1.is_finite()) {
            return Err(Error::invalid("a1", format!("must be positive, got {}", self.a1)));
        }
        if !(self.a2 > 0.0 && self.a2.is_finite()) {
            return Err(Error::invalid("a2", format!("must be positive, got {}", self.a2)));
        }
        if !self.a0.is_finite() || std_normal_cdf(self.a0) < MIN_CEILING {
            return Err(Error::invalid(
                "a0",
                format!("saturation level Φ(a0) = {} is below {MIN_CEILING}", std_normal_cdf(self.a0)),
            ));
        }
        if self.branches < 1 {
            return Err(Error::invalid("branches", "need at least one branch"));
        }
        Ok(())
    }

    /// Power-law exponent `b = a₂/λ`.
    pub fn exponent(&self) -> f64 {
        self.a2 / self.lambda
    }

    /// Argument of Φ at the normalised SNR `r = x/γ̄₀`.
    pub fn argument(&self, r: f64) -> f64 {
        let b = self.exponent();
        (self.a0 - self.a1) - self.a1 * (-b * r.ln()).exp_m1()
    }

    /// Saturation level `Φ(a₀)` reached as `x → ∞`.
    pub fn ceiling(&self) -> f64 {
        std_normal_cdf(self.a0)
    }

    pub fn cdf_ratio(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        std_normal_cdf(self.argument(r))
    }

    /// `1 − F` without cancellation when `F` is close to 1.
    pub fn complement_ratio(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 1.0;
        }
        std_normal_cdf(-self.argument(r))
    }

    pub fn ln_cdf_ratio(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return f64::NEG_INFINITY;
        }
        ln_std_normal_cdf(self.argument(r))
    }

    /// Density with respect to `r`.
    pub fn pdf_ratio(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let b = self.exponent();
        let slope = self.a1 * b * (-b * r.ln()).exp() / r;
        std_normal_pdf(self.argument(r)) * slope
    }

    /// Inverse of [`argument`](Self::argument): the ratio `r` with
    /// `argument(r) = t`, or `None` when `t ≥ a₀` (beyond the saturation level).
    pub fn ratio_at_argument(&self, t: f64) -> Option<f64> {
        if !(t < self.a0) {
            return None;
        }
        let b = self.exponent();
        // a1·(1 + expm1(−b ln r)) = a0 − t
        let ln_r = -((self.a0 - t) / self.a1).ln() / b;
        let r = ln_r.exp();
        (r > 0.0 && r.is_finite()).then_some(r)
    }
}

fn check_point(x: f64, gbar0: f64) -> Result<()> {
    if !(x > 0.0) {
        return Err(Error::invalid("x", format!("SNR argument must be > 0, got {x}")));
    }
    if !(gbar0 > 0.0 && gbar0.is_finite()) {
        return Err(Error::invalid("gbar0", format!("must be > 0, got {gbar0}")));
    }
    Ok(())
}

/// Approximate CDF of the per-relay MRC SNR.
pub fn lnsum_cdf(fit: &LognormalSumFit, x: f64, gbar0: f64) -> Result<f64> {
    check_point(x, gbar0)?;
    Ok(fit.cdf_ratio(x / gbar0))
}

/// Approximate PDF of the per-relay MRC SNR, per unit of linear SNR.
pub fn lnsum_pdf(fit: &LognormalSumFit, x: f64, gbar0: f64) -> Result<f64> {
    check_point(x, gbar0)?;
    Ok(fit.pdf_ratio(x / gbar0) / gbar0)
}

/// Exact CDF of one squared log-normal gain `h²` (dB moments of `h`) at `r`.
pub fn single_branch_cdf(mu_db: f64, sigma_db: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    std_normal_cdf((r.ln() - 2.0 * LAMBDA * mu_db) / (2.0 * LAMBDA * sigma_db))
}

/// Residual weights of the probit-scale least-squares problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitWeighting {
    Uniform,
    /// `φ(z)² / (F(1 − F))`, the inverse asymptotic variance of the probit
    /// of an empirical quantile.
    InverseVariance,
}

/// Knobs of the fitting procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FitOptions {
    pub samples: usize,
    pub quantiles: usize,
    /// Quantile levels are restricted to `[tail, 1 − tail]`.
    pub tail_millionths: u32,
    pub seed: u64,
    pub weighting: FitWeighting,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            samples: 4_000_000,
            quantiles: 200,
            tail_millionths: 100,
            seed: 0x5eed_1091_0000_0001,
            weighting: FitWeighting::InverseVariance,
        }
    }
}

impl FitOptions {
    pub fn tail(&self) -> f64 {
        self.tail_millionths as f64 * 1e-6
    }
}

/// Draws `n` sums of `branches` squared log-normal gains, normalised by γ̄₀.
pub fn simulate_sums(mu_db: f64, sigma_db: f64, branches: u32, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (m2, s2) = (2.0 * LAMBDA * mu_db, 2.0 * LAMBDA * sigma_db);
    (0..n)
        .map(|_| {
            (0..branches)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    (m2 + s2 * z).exp()
                })
                .sum()
        })
        .collect()
}

struct Profile {
    rss: f64,
    c0: f64,
    c1: f64,
}

/// Weighted linear least squares for `z ≈ c0 − c1·u(b)`, `u = expm1(−b ln s)/b`.
fn profile(ln_s: &[f64], z: &[f64], w: &[f64], b: f64) -> Profile {
    let u: Vec<f64> = ln_s.iter().map(|&l| (-b * l).exp_m1() / b).collect();
    let sw: f64 = w.iter().sum();
    let mu = u.iter().zip(w).map(|(u, w)| u * w).sum::<f64>() / sw;
    let mz = z.iter().zip(w).map(|(z, w)| z * w).sum::<f64>() / sw;
    let (mut suu, mut suz) = (0.0, 0.0);
    for ((&ui, &zi), &wi) in u.iter().zip(z).zip(w) {
        suu += wi * (ui - mu) * (ui - mu);
        suz += wi * (ui - mu) * (zi - mz);
    }
    let c1 = -suz / suu;
    let c0 = mz + c1 * mu;
    let rss = u.iter().zip(z).zip(w).map(|((&ui, &zi), &wi)| wi * (zi - c0 + c1 * ui).powi(2)).sum();
    Profile { rss, c0, c1 }
}

const LN_B_MIN: f64 = -11.512925464970229; // ln 1e-5
const LN_B_MAX: f64 = 2.302585092994046; // ln 10

/// Fits `(a₀, a₁, a₂)` to simulated sums, with the default options.
pub fn fit_lognormal_sum(mu_db: f64, sigma_db: f64, branches: u32) -> Result<LognormalSumFit> {
    FitCache::global().get_or_fit(mu_db, sigma_db, branches, FitOptions::default())
}

/// Fits `(a₀, a₁, a₂)` by least squares on probit-transformed empirical
/// quantiles, profiling out `(a₀, a₁)` for each trial exponent.
pub fn fit_lognormal_sum_with(
    mu_db: f64,
    sigma_db: f64,
    branches: u32,
    opts: FitOptions,
) -> Result<LognormalSumFit> {
    if !mu_db.is_finite() {
        return Err(Error::invalid("mu_db", "must be finite"));
    }
    if !(sigma_db > 0.0 && sigma_db.is_finite()) {
        return Err(Error::invalid("sigma_db", format!("must be > 0, got {sigma_db}")));
    }
    if branches < 1 {
        return Err(Error::invalid("branches", "need at least one branch"));
    }
    if opts.quantiles < 10 || opts.samples < 100 * opts.quantiles {
        return Err(Error::invalid("fit.samples", "too few samples or quantile points"));
    }
    let tail = opts.tail();
    if !(tail > 0.0 && tail < 0.1) {
        return Err(Error::invalid("fit.tail", format!("must lie in (0, 0.1), got {tail}")));
    }
    let failure = |reason: String| Error::FitFailure { mu_db, sigma_db, branches, reason };

    let mut sums = simulate_sums(mu_db, sigma_db, branches, opts.samples, opts.seed);
    sums.sort_unstable_by(f64::total_cmp);

    // Quantile levels equally spaced on the probit scale.
    let (z_lo, z_hi) = (std_normal_quantile(tail), std_normal_quantile(1.0 - tail));
    let nq = opts.quantiles;
    let n = sums.len() as f64;
    let mut ln_s = Vec::with_capacity(nq);
    let mut z = Vec::with_capacity(nq);
    let mut w = Vec::with_capacity(nq);
    for j in 0..nq {
        let target = z_lo + (z_hi - z_lo) * j as f64 / (nq - 1) as f64;
        let idx = ((std_normal_cdf(target) * n).floor() as usize).min(sums.len() - 1);
        // Probit of the empirical CDF at the order statistic.
        let level = (idx as f64 + 0.5) / n;
        let zj = std_normal_quantile(level);
        z.push(zj);
        ln_s.push(sums[idx].ln());
        w.push(match opts.weighting {
            FitWeighting::Uniform => 1.0,
            FitWeighting::InverseVariance => std_normal_pdf(zj).powi(2) / (level * (1.0 - level)),
        });
    }

    let grid = 160;
    let mut best = (f64::INFINITY, LN_B_MIN);
    for i in 0..=grid {
        let t = LN_B_MIN + (LN_B_MAX - LN_B_MIN) * i as f64 / grid as f64;
        let rss = profile(&ln_s, &z, &w, t.exp()).rss;
        if rss < best.0 {
            best = (rss, t);
        }
    }
    let step = (LN_B_MAX - LN_B_MIN) / grid as f64;
    let (mut lo, mut hi) = ((best.1 - step).max(LN_B_MIN), (best.1 + step).min(LN_B_MAX));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut f1, mut f2) = (profile(&ln_s, &z, &w, x1.exp()).rss, profile(&ln_s, &z, &w, x2.exp()).rss);
    for _ in 0..80 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = profile(&ln_s, &z, &w, x1.exp()).rss;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = profile(&ln_s, &z, &w, x2.exp()).rss;
        }
    }
    let b = (0.5 * (lo + hi)).exp();
    let p = profile(&ln_s, &z, &w, b);
    if !(p.rss.is_finite() && p.c1.is_finite()) {
        return Err(failure("least-squares residual is not finite".into()));
    }
    if p.c1 <= 0.0 {
        return Err(failure(format!("fitted slope is not positive ({})", p.c1)));
    }
    let a1 = p.c1 / b;
    let a0 = p.c0 + a1;
    LognormalSumFit::new(a0, a1, b * LAMBDA, mu_db, sigma_db, branches)
        .map_err(|e| failure(format!("fitted constants violate the model: {e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct CacheKey {
    mu_bits: u64,
    sigma_bits: u64,
    branches: u32,
    opts: FitOptions,
}

/// Thread-safe memo of completed fits keyed by `(μ, σ, L, options)`.
#[derive(Debug, Default)]
pub struct FitCache {
    fits: RwLock<HashMap<CacheKey, Arc<LognormalSumFit>>>,
}

impl FitCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn global() -> &'static FitCache {
        static CACHE: OnceLock<FitCache> = OnceLock::new();
        CACHE.get_or_init(FitCache::new)
    }

    pub fn get_or_fit(&self, mu_db: f64, sigma_db: f64, branches: u32, opts: FitOptions) -> Result<LognormalSumFit> {
        let key = CacheKey { mu_bits: mu_db.to_bits(), sigma_bits: sigma_db.to_bits(), branches, opts };
        if let Some(fit) = self.fits.read().expect("fit cache poisoned").get(&key) {
            return Ok(**fit);
        }
        let fit = fit_lognormal_sum_with(mu_db, sigma_db, branches, opts)?;
        // A concurrent caller may have inserted the same deterministic fit.
        let mut map = self.fits.write().expect("fit cache poisoned");
        Ok(**map.entry(key).or_insert_with(|| Arc::new(fit)))
    }

    pub fn len(&self) -> usize {
        self.fits.read().expect("fit cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> FitOptions {
        FitOptions { samples: 200_000, ..FitOptions::default() }
    }

    #[test]
    fn single_branch_fit_is_close_to_exact() {
        let fit = fit_lognormal_sum_with(0.0, 12.0, 1, small()).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..=2000 {
            let t = -8.0 + 16.0 * i as f64 / 2000.0;
            let r = (2.0 * LAMBDA * 12.0 * t).exp();
            worst = worst.max((fit.cdf_ratio(r) - single_branch_cdf(0.0, 12.0, r)).abs());
        }
        assert!(worst < 0.01, "sup error {worst}");
    }

    #[test]
    fn cdf_limits_and_median() {
        let fit = LognormalSumFit::new(3.5, 2.0, 0.3, 0.0, 12.0, 2).unwrap();
        assert!(lnsum_cdf(&fit, 1e-300, 1.0).unwrap() < 1e-300);
        assert!((lnsum_cdf(&fit, 1e300, 1.0).unwrap() - fit.ceiling()).abs() < 1e-15);
        let gbar = 7.0;
        let x = gbar * (fit.a1 / fit.a0).powf(LAMBDA / fit.a2);
        assert!((lnsum_cdf(&fit, x, gbar).unwrap() - 0.5).abs() < 1e-13);
        assert!(lnsum_cdf(&fit, 0.0, 1.0).is_err());
        assert!(lnsum_pdf(&fit, -1.0, 1.0).is_err());
    }

    #[test]
    fn pdf_matches_finite_difference() {
        let fit = LognormalSumFit::new(3.5, 2.0, 0.3, 0.0, 12.0, 2).unwrap();
        let gbar = 3.0;
        for i in 0..40 {
            let x = gbar * 10f64.powf(-3.0 + 6.0 * i as f64 / 39.0);
            let h = x * 1e-5;
            let (r1, r2) = ((x - h) / gbar, (x + h) / gbar);
            let fd = if fit.cdf_ratio(x / gbar) < 0.5 {
                (fit.cdf_ratio(r2) - fit.cdf_ratio(r1)) / (2.0 * h)
            } else {
                (fit.complement_ratio(r1) - fit.complement_ratio(r2)) / (2.0 * h)
            };
            let pdf = lnsum_pdf(&fit, x, gbar).unwrap();
            if pdf > 1e-12 {
                assert!(((fd - pdf) / pdf).abs() < 1e-5, "x={x} fd={fd} pdf={pdf}");
            }
        }
    }

    #[test]
    fn argument_inverse_round_trips() {
        let fit = LognormalSumFit::new(3.5, 2.0, 0.3, 0.0, 12.0, 2).unwrap();
        for &t in &[-5.0, -1.0, 0.0, 2.0, 3.4] {
            let r = fit.ratio_at_argument(t).unwrap();
            assert!((fit.argument(r) - t).abs() < 1e-10);
        }
        assert!(fit.ratio_at_argument(3.5).is_none());
        assert!(fit.ratio_at_argument(9.0).is_none());
    }

    #[test]
    fn invalid_constants_rejected() {
        assert!(LognormalSumFit::new(3.5, -1.0, 0.3, 0.0, 12.0, 2).is_err());
        assert!(LognormalSumFit::new(3.5, 1.0, 0.0, 0.0, 12.0, 2).is_err());
        assert!(LognormalSumFit::new(2.0, 1.0, 0.3, 0.0, 12.0, 2).is_err());
        assert!(matches!(
            fit_lognormal_sum_with(0.0, -1.0, 2, small()),
            Err(Error::InvalidParameter { field: "sigma_db", .. })
        ));
    }

    #[test]
    fn cache_reuses_fits() {
        let cache = FitCache::new();
        let a = cache.get_or_fit(0.0, 12.0, 2, small()).unwrap();
        let b = cache.get_or_fit(0.0, 12.0, 2, small()).unwrap();
        assert_eq!(a, b);
        assert_eq!(cache.len(), 1);
    }
}

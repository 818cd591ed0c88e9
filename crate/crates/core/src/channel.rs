//! Link configurations and the scalar channel quantities derived from them.
//!
//! Units: PLC carrier frequency in MHz, distances in metres, powers and
//! noise variances in watts. dB values are converted only through
//! [`db_to_linear`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `10^(x/10)`, for power ratios and SNRs.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

fn non_negative(field: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite and >= 0, got {v}")))
    }
}

fn strictly_positive(field: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite and > 0, got {v}")))
    }
}

/// Physical parameters of the multiwire PLC hop (source to each relay).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlcLinkConfig {
    /// Attenuation constant α₁ (1/m).
    pub alpha1: f64,
    /// Frequency-dependent attenuation constant α₂ (1/m per MHz^k).
    pub alpha2: f64,
    /// Attenuation exponent k.
    pub k: f64,
    /// Carrier frequency (MHz).
    pub freq: f64,
    /// Cable length (m).
    pub dist: f64,
    /// Log-normal gain mean μ (dB).
    pub mu_db: f64,
    /// Log-normal gain standard deviation σ (dB).
    pub sigma_db: f64,
    /// Impulsive-noise arrival probability.
    pub p_imp: f64,
    /// Background AWGN power σ_g² (W).
    pub var_bg: f64,
    /// Impulsive-noise power σ_i² (W).
    pub var_imp: f64,
    /// MRC branches per relay, L.
    pub branches: u32,
    /// Candidate relays, M.
    pub relays: u32,
    /// Transmit power P₀ (W).
    pub power: f64,
}

impl PlcLinkConfig {
    pub fn validate(&self) -> Result<()> {
        non_negative("plc.alpha1", self.alpha1)?;
        non_negative("plc.alpha2", self.alpha2)?;
        non_negative("plc.k", self.k)?;
        strictly_positive("plc.freq", self.freq)?;
        non_negative("plc.dist", self.dist)?;
        if !self.mu_db.is_finite() {
            return Err(Error::invalid("plc.mu_db", "must be finite"));
        }
        strictly_positive("plc.sigma_db", self.sigma_db)?;
        if !(0.0..=1.0).contains(&self.p_imp) {
            return Err(Error::invalid(
                "plc.p_imp",
                format!("must lie in [0, 1], got {}", self.p_imp),
            ));
        }
        non_negative("plc.var_bg", self.var_bg)?;
        non_negative("plc.var_imp", self.var_imp)?;
        if self.branches < 1 {
            return Err(Error::invalid("plc.branches", "need at least one branch"));
        }
        if self.relays < 1 {
            return Err(Error::invalid("plc.relays", "need at least one relay"));
        }
        non_negative("plc.power", self.power)?;
        Ok(())
    }
}

/// Parameters of the MIMO-OSTBC radio hop (selected relay to destination).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfLinkConfig {
    /// Nakagami shape m.
    pub m: f64,
    /// Nakagami spread Ω.
    pub omega: f64,
    /// Transmit antennas N_R.
    pub n_r: u32,
    /// Receive antennas N_D.
    pub n_d: u32,
    /// OSTBC code rate R_c.
    pub rate: f64,
    /// Antenna-related path-loss constant c.
    pub c: f64,
    /// Path-loss exponent n.
    pub n_pl: f64,
    /// Link distance (m).
    pub dist: f64,
    /// Transmit power P₁ (W).
    pub power: f64,
    /// Receiver noise variance σ₁² (W).
    pub var_noise: f64,
}

impl RfLinkConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.m >= 0.5) || !self.m.is_finite() {
            return Err(Error::invalid("rf.m", format!("Nakagami m must be >= 0.5, got {}", self.m)));
        }
        strictly_positive("rf.omega", self.omega)?;
        if self.n_r < 1 {
            return Err(Error::invalid("rf.n_r", "need at least one transmit antenna"));
        }
        if self.n_d < 1 {
            return Err(Error::invalid("rf.n_d", "need at least one receive antenna"));
        }
        if !(self.rate > 0.0 && self.rate <= 1.0) {
            return Err(Error::invalid(
                "rf.rate",
                format!("code rate must lie in (0, 1], got {}", self.rate),
            ));
        }
        strictly_positive("rf.c", self.c)?;
        non_negative("rf.n_pl", self.n_pl)?;
        strictly_positive("rf.dist", self.dist)?;
        non_negative("rf.power", self.power)?;
        strictly_positive("rf.var_noise", self.var_noise)?;
        Ok(())
    }
}

/// `𝓛₀ = exp(-2(α₁ + α₂ f^k) d)`.
pub fn plc_attenuation(cfg: &PlcLinkConfig) -> Result<f64> {
    cfg.validate()?;
    let per_metre = cfg.alpha1 + cfg.alpha2 * cfg.freq.powf(cfg.k);
    Ok((-2.0 * per_metre * cfg.dist).exp())
}

/// Total PLC noise power, background plus Bernoulli-gated impulsive part.
pub fn plc_noise_variance(cfg: &PlcLinkConfig) -> Result<f64> {
    cfg.validate()?;
    Ok((1.0 - cfg.p_imp) * cfg.var_bg + cfg.p_imp * (cfg.var_bg + cfg.var_imp))
}

/// `γ̄₀ = P₀ 𝓛₀ / σ₀²`.
pub fn plc_avg_snr(cfg: &PlcLinkConfig) -> Result<f64> {
    let var0 = plc_noise_variance(cfg)?;
    if var0 <= 0.0 {
        return Err(Error::invalid("plc.var_bg", "total PLC noise variance is zero"));
    }
    Ok(cfg.power * plc_attenuation(cfg)? / var0)
}

/// `𝓛₁ = c / dⁿ`.
pub fn rf_path_loss(cfg: &RfLinkConfig) -> Result<f64> {
    cfg.validate()?;
    Ok(cfg.c / cfg.dist.powf(cfg.n_pl))
}

/// `ρ = P₁ 𝓛₁ / (R_c N_R σ₁²)`.
pub fn rf_snr_scale(cfg: &RfLinkConfig) -> Result<f64> {
    let l1 = rf_path_loss(cfg)?;
    Ok(cfg.power * l1 / (cfg.rate * cfg.n_r as f64 * cfg.var_noise))
}

/// Gamma shape `𝒜 = m N_R N_D` and rate factor `α = m / Ω`.
pub fn ostbc_shape(cfg: &RfLinkConfig) -> Result<(f64, f64)> {
    cfg.validate()?;
    Ok((cfg.m * cfg.n_r as f64 * cfg.n_d as f64, cfg.m / cfg.omega))
}

/// Every scalar the statistical modules need, computed once per configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScales {
    pub l0: f64,
    pub var0: f64,
    pub gbar0: f64,
    pub l1: f64,
    pub rho: f64,
    pub shape_a: f64,
    pub alpha_g: f64,
}

impl DerivedScales {
    pub fn new(plc: &PlcLinkConfig, rf: &RfLinkConfig) -> Result<Self> {
        let gbar0 = plc_avg_snr(plc)?;
        let rho = rf_snr_scale(rf)?;
        strictly_positive("plc.power", gbar0)?;
        strictly_positive("rf.power", rho)?;
        let (shape_a, alpha_g) = ostbc_shape(rf)?;
        Ok(DerivedScales {
            l0: plc_attenuation(plc)?,
            var0: plc_noise_variance(plc)?,
            gbar0,
            l1: rf_path_loss(rf)?,
            rho,
            shape_a,
            alpha_g,
        })
    }
}

//! Per-hop and end-to-end SNR distributions.
//!
//! All functions take linear SNR values. Distribution functions are defined
//! for `x > 0`; the `*_at` methods return the `x → 0` limits instead of errors
//! so that quadrature loops can call them without branching.

use crate::channel::DerivedScales;
use crate::error::{Error, Result};
use crate::lognormal_sum::LognormalSumFit;
use crate::special::{ln_gamma, reg_gamma_pair};

/// Best-of-M relay selection over i.i.d. MRC log-normal-sum SNRs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlcHopDistribution {
    pub fit: LognormalSumFit,
    pub gbar0: f64,
    pub relays: u32,
}

impl PlcHopDistribution {
    pub fn new(fit: LognormalSumFit, gbar0: f64, relays: u32) -> Result<Self> {
        fit.validate()?;
        if !(gbar0 > 0.0 && gbar0.is_finite()) {
            return Err(Error::invalid("gbar0", format!("must be > 0, got {gbar0}")));
        }
        if relays < 1 {
            return Err(Error::invalid("relays", "need at least one relay"));
        }
        Ok(PlcHopDistribution { fit, gbar0, relays })
    }

    /// `ln F_R(x) = M ln Φ(arg)`.
    pub fn ln_cdf_at(&self, x: f64) -> f64 {
        self.relays as f64 * self.fit.ln_cdf_ratio(x / self.gbar0)
    }

    pub fn cdf_at(&self, x: f64) -> f64 {
        self.ln_cdf_at(x).exp()
    }

    /// `1 − F_R(x)`, accurate in both tails.
    pub fn complement_at(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        if self.relays == 1 {
            return self.fit.complement_ratio(x / self.gbar0);
        }
        -self.ln_cdf_at(x).exp_m1()
    }

    /// `M Φ(arg)^(M−1) φ(arg) d arg/dx`.
    pub fn pdf_at(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let r = x / self.gbar0;
        let base = self.fit.pdf_ratio(r) / self.gbar0;
        if self.relays == 1 || base == 0.0 {
            return base;
        }
        let m = self.relays as f64;
        m * base * ((m - 1.0) * self.fit.ln_cdf_ratio(r)).exp()
    }
}

/// Gamma-distributed MIMO-OSTBC SNR with shape `𝒜` and scale `ρ/α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfHopDistribution {
    pub shape_a: f64,
    pub alpha_g: f64,
    pub rho: f64,
}

impl RfHopDistribution {
    pub fn new(shape_a: f64, alpha_g: f64, rho: f64) -> Result<Self> {
        for (field, v) in [("shape_a", shape_a), ("alpha_g", alpha_g), ("rho", rho)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(field, format!("must be > 0, got {v}")));
            }
        }
        Ok(RfHopDistribution { shape_a, alpha_g, rho })
    }

    pub fn scale(&self) -> f64 {
        self.rho / self.alpha_g
    }

    pub fn mean(&self) -> f64 {
        self.shape_a * self.scale()
    }

    pub fn variance(&self) -> f64 {
        self.shape_a * self.scale() * self.scale()
    }

    fn pair(&self, x: f64) -> (f64, f64) {
        if x <= 0.0 {
            return (0.0, 1.0);
        }
        reg_gamma_pair(self.shape_a, self.alpha_g * x / self.rho)
            .expect("shape and argument validated at construction")
    }

    pub fn cdf_at(&self, x: f64) -> f64 {
        self.pair(x).0
    }

    pub fn complement_at(&self, x: f64) -> f64 {
        self.pair(x).1
    }

    pub fn ln_pdf_at(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return match self.shape_a {
                a if a < 1.0 => f64::INFINITY,
                a if a == 1.0 => -self.scale().ln(),
                _ => f64::NEG_INFINITY,
            };
        }
        let t = self.alpha_g * x / self.rho;
        (self.shape_a - 1.0) * t.ln() - t - ln_gamma(self.shape_a) - self.scale().ln()
    }

    pub fn pdf_at(&self, x: f64) -> f64 {
        self.ln_pdf_at(x).exp()
    }
}

/// Decode-and-forward end-to-end SNR `min(γ_R, γ_D)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndToEndDistribution {
    pub plc: PlcHopDistribution,
    pub rf: RfHopDistribution,
}

impl EndToEndDistribution {
    pub fn new(plc: PlcHopDistribution, rf: RfHopDistribution) -> Self {
        EndToEndDistribution { plc, rf }
    }

    /// Assembles the distribution from channel-derived scales and a fit.
    pub fn from_scales(scales: &DerivedScales, fit: LognormalSumFit, relays: u32) -> Result<Self> {
        Ok(EndToEndDistribution {
            plc: PlcHopDistribution::new(fit, scales.gbar0, relays)?,
            rf: RfHopDistribution::new(scales.shape_a, scales.alpha_g, scales.rho)?,
        })
    }

    /// `F_R + F_D (1 − F_R)`, a sum of non-negative terms.
    pub fn cdf_at(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let f_r = self.plc.cdf_at(x);
        let (f_d, _) = self.rf.pair(x);
        f_r + f_d * self.plc.complement_at(x)
    }

    /// `(1 − F_R)(1 − F_D)`.
    pub fn complement_at(&self, x: f64) -> f64 {
        self.plc.complement_at(x) * self.rf.complement_at(x)
    }

    pub fn pdf_at(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.plc.pdf_at(x) * self.rf.complement_at(x) + self.rf.pdf_at(x) * self.plc.complement_at(x)
    }
}

fn positive(x: f64) -> Result<()> {
    if x > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("x", format!("SNR argument must be > 0, got {x}")))
    }
}

pub fn relay_cdf(plc: &PlcHopDistribution, x: f64) -> Result<f64> {
    positive(x)?;
    Ok(plc.cdf_at(x))
}

pub fn relay_pdf(plc: &PlcHopDistribution, x: f64) -> Result<f64> {
    positive(x)?;
    Ok(plc.pdf_at(x))
}

pub fn mimo_cdf(rf: &RfHopDistribution, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::invalid("x", format!("SNR argument must be >= 0, got {x}")));
    }
    Ok(rf.cdf_at(x))
}

pub fn mimo_pdf(rf: &RfHopDistribution, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::invalid("x", format!("SNR argument must be >= 0, got {x}")));
    }
    Ok(rf.pdf_at(x))
}

pub fn e2e_cdf(e2e: &EndToEndDistribution, x: f64) -> Result<f64> {
    positive(x)?;
    Ok(e2e.cdf_at(x))
}

pub fn e2e_pdf(e2e: &EndToEndDistribution, x: f64) -> Result<f64> {
    positive(x)?;
    Ok(e2e.pdf_at(x))
}

//! The two Meijer G-function instances that appear in the BER and capacity
//! closed forms, evaluated through their defining real integrals.
//!
//! * `G^{2,1}_{2,2}(z | 1-p, 1 ; 0, A) = ∫_0^∞ u^{p-1} e^{-u} Γ(A, z u) du`
//! * `G^{3,1}_{2,3}(z | -A, 1-A ; 0, -A, -A) = ∫_0^∞ ln(1+x) x^{A-1} e^{-z x} dx`
//!
//! Both integrands are smooth and positive, so a tight adaptive
//! Gauss-Kronrod pass is enough. `special::double_exp` supplies the
//! independent check used in tests and `selftest`.

use super::adaptive::{integrate_pieces, positive_axis_breaks, Tolerance};
use super::gamma::{ln_gamma, reg_upper_gamma};
use crate::error::{Error, Result};

const TOL: Tolerance = Tolerance {
    abs: 0.0,
    rel: 1e-13,
    max_intervals: 4000,
};

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be positive and finite, got {v}")))
    }
}

/// `∫_0^∞ u^{p-1} e^{-u} Q(A, z u) du`, i.e. the G-value divided by `Γ(A)`.
pub fn ber_meijer_integral(p: f64, shape_a: f64, z: f64) -> Result<f64> {
    positive("p", p)?;
    positive("shape_a", shape_a)?;
    positive("z", z)?;
    // u = w^{1/p} removes the u^{p-1} endpoint singularity:
    // ∫ u^{p-1} e^{-u} g(u) du = (1/p) ∫ e^{-w^{1/p}} g(w^{1/p}) dw
    let inv_p = 1.0 / p;
    let mut failure = None;
    let integrand = |w: f64| {
        let u = w.powf(inv_p);
        match reg_upper_gamma(shape_a, z * u) {
            Ok(q) => inv_p * (-u).exp() * q,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    // bulk of e^{-u} sits at u ~ p, the gamma step at u ~ A/z
    let mut breaks = vec![0.0];
    let mut marks = vec![p.min(1.0), (p + 1.0).max(1.0), shape_a / z, 4.0 * (p + 1.0), 40.0 + p];
    marks.sort_by(|a, b| a.total_cmp(b));
    for m in marks {
        let w = m.powf(p);
        if w > *breaks.last().unwrap() && w.is_finite() {
            breaks.push(w);
        }
    }
    breaks.push(f64::INFINITY);
    let r = integrate_pieces(integrand, &breaks, TOL)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(r.value)
}

/// `G^{2,1}_{2,2}(z | 1-p, 1 ; 0, A)`.
///
/// With `z = α/(qρ)` this is `q^p Γ(A)` times the BER component
/// `∫ x^{p-1} e^{-qx} Γ(A, αx/ρ)/Γ(A) dx`.
pub fn meijer_ber_term(p: f64, shape_a: f64, z: f64) -> Result<f64> {
    let scaled = ber_meijer_integral(p, shape_a, z)?;
    finite("meijer_ber_term", scaled * ln_gamma(shape_a).exp())
}

/// `E[ln(1 + X)]` for `X ~ Gamma(shape A, scale θ)`.
pub fn gamma_log1p_expectation(shape_a: f64, scale: f64) -> Result<f64> {
    positive("shape_a", shape_a)?;
    positive("scale", scale)?;
    let ln_norm = ln_gamma(shape_a) + shape_a * scale.ln();
    let pdf_ln1p = |x: f64| {
        if x == 0.0 {
            return 0.0;
        }
        let ln_pdf = (shape_a - 1.0) * x.ln() - x / scale - ln_norm;
        x.ln_1p() * ln_pdf.exp()
    };
    let mean = shape_a * scale;
    let sd = shape_a.sqrt() * scale;
    let r = integrate_pieces(pdf_ln1p, &positive_axis_breaks(mean, sd), TOL)?;
    Ok(r.value)
}

/// `G^{3,1}_{2,3}(z | -A, 1-A ; 0, -A, -A)`.
///
/// With `z = α/ρ`, `z^A/Γ(A)` times this value is the ergodic capacity of
/// a Gamma(A, ρ/α) SNR.
pub fn meijer_cap_term(shape_a: f64, z: f64) -> Result<f64> {
    positive("z", z)?;
    let expectation = gamma_log1p_expectation(shape_a, 1.0 / z)?;
    let ln_factor = ln_gamma(shape_a) - shape_a * z.ln();
    finite("meijer_cap_term", expectation * ln_factor.exp())
}

fn finite(context: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::numerical(context, format!("result overflows ({v})")))
    }
}

/// Double-exponential evaluations of the same integrals, sharing nothing
/// with the Gauss-Kronrod path beyond the gamma functions.
pub mod oracle {
    use super::super::double_exp::exp_sinh;
    use super::*;

    const REL: f64 = 1e-13;

    /// Same quantity as [`ber_meijer_integral`].
    pub fn ber_meijer_integral(p: f64, shape_a: f64, z: f64) -> Result<f64> {
        positive("p", p)?;
        positive("shape_a", shape_a)?;
        positive("z", z)?;
        let mut failure = None;
        let f = |u: f64| {
            let ln_w = (p - 1.0) * u.ln() - u;
            match reg_upper_gamma(shape_a, z * u) {
                Ok(q) => ln_w.exp() * q,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        };
        let v = exp_sinh(f, 0.0, p.min(shape_a / z), REL)?;
        match failure {
            Some(e) => Err(e),
            None => Ok(v),
        }
    }

    /// Same quantity as [`gamma_log1p_expectation`].
    pub fn gamma_log1p_expectation(shape_a: f64, scale: f64) -> Result<f64> {
        positive("shape_a", shape_a)?;
        positive("scale", scale)?;
        // in units of the scale: E ln(1 + θ Y), Y ~ Gamma(A, 1)
        let ln_norm = ln_gamma(shape_a);
        let f = |y: f64| ((shape_a - 1.0) * y.ln() - y - ln_norm).exp() * (scale * y).ln_1p();
        exp_sinh(f, 0.0, shape_a, REL)
    }
}

//! Gaussian quadrature for the weight `exp(-x^2)`.
//!
//! Two rules are provided: the classical Gauss-Hermite rule on the whole
//! real line and the half-range rule on `[0, inf)`. Both are built the same
//! way from three-term recurrence coefficients: eigenvalues of the Jacobi
//! matrix give starting nodes, a Newton polish on the monic recurrence
//! sharpens them, and weights come from the Christoffel function so that
//! tiny tail weights keep full relative accuracy.
//!
//! The half-range coefficients have no closed form. They are embedded from
//! a high-precision computation and can be recomputed in double precision
//! with [`half_range_recurrence_discretized`].

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;

use super::half_range_table::{HALF_RANGE_ALPHA, HALF_RANGE_BETA};
use crate::error::{Error, Result};

/// Largest order available for either rule.
pub const MAX_ORDER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    /// `∫_{-∞}^{∞} e^{-x²} f(x) dx`
    FullHermite,
    /// `∫_0^{∞} e^{-x²} f(x) dx`
    HalfRangeHermite,
}

impl RuleKind {
    /// Integral of the bare weight over the rule's domain.
    pub fn total_mass(self) -> f64 {
        match self {
            RuleKind::FullHermite => PI.sqrt(),
            RuleKind::HalfRangeHermite => 0.5 * PI.sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    kind: RuleKind,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Abscissae in strictly increasing order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// `Σ wᵢ f(xᵢ)`, approximating `∫ e^{-x²} f(x) dx` over the rule's domain.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// Three-term recurrence `π_{k+1}(x) = (x - α_k) π_k(x) - β_k π_{k-1}(x)`,
/// with `β_0` holding the total mass of the weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Recurrence {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl Recurrence {
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    fn hermite(n: usize) -> Self {
        let alpha = vec![0.0; n];
        let beta = (0..n)
            .map(|k| if k == 0 { PI.sqrt() } else { k as f64 / 2.0 })
            .collect();
        Recurrence { alpha, beta }
    }

    fn half_range_embedded(n: usize) -> Self {
        Recurrence {
            alpha: HALF_RANGE_ALPHA[..n].to_vec(),
            beta: HALF_RANGE_BETA[..n].to_vec(),
        }
    }
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::UnsupportedOrder {
            order,
            max: MAX_ORDER,
        });
    }
    Ok(())
}

/// Gauss-Hermite rule of the given order on `(-∞, ∞)`.
pub fn full_hermite_rule(order: usize) -> Result<QuadratureRule> {
    check_order(order)?;
    gauss_rule(RuleKind::FullHermite, &Recurrence::hermite(order))
}

/// Half-range Gauss-Hermite rule of the given order on `[0, ∞)`.
pub fn half_range_hermite_rule(order: usize) -> Result<QuadratureRule> {
    check_order(order)?;
    gauss_rule(
        RuleKind::HalfRangeHermite,
        &Recurrence::half_range_embedded(order),
    )
}

/// Shared, lazily built rule; repeated metric evaluations reuse it.
pub fn cached_rule(kind: RuleKind, order: usize) -> Result<Arc<QuadratureRule>> {
    check_order(order)?;
    static FULL: OnceLock<Vec<OnceLock<Arc<QuadratureRule>>>> = OnceLock::new();
    static HALF: OnceLock<Vec<OnceLock<Arc<QuadratureRule>>>> = OnceLock::new();
    let table = match kind {
        RuleKind::FullHermite => &FULL,
        RuleKind::HalfRangeHermite => &HALF,
    };
    let slots = table.get_or_init(|| (0..MAX_ORDER).map(|_| OnceLock::new()).collect());
    let slot = &slots[order - 1];
    if let Some(rule) = slot.get() {
        return Ok(rule.clone());
    }
    let rule = Arc::new(match kind {
        RuleKind::FullHermite => full_hermite_rule(order)?,
        RuleKind::HalfRangeHermite => half_range_hermite_rule(order)?,
    });
    Ok(slot.get_or_init(|| rule).clone())
}

/// Golub-Welsch with Newton polish and Christoffel weights.
pub fn gauss_rule(kind: RuleKind, rec: &Recurrence) -> Result<QuadratureRule> {
    let n = rec.len();
    if n == 0 {
        return Err(Error::UnsupportedOrder {
            order: 0,
            max: MAX_ORDER,
        });
    }
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jacobi[(k, k)] = rec.alpha[k];
        if k + 1 < n {
            let off = rec.beta[k + 1].sqrt();
            jacobi[(k, k + 1)] = off;
            jacobi[(k + 1, k)] = off;
        }
    }
    let mut nodes: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    nodes.sort_by(|a, b| a.total_cmp(b));

    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = monic_value_and_derivative(rec, *x);
            if dp == 0.0 || !p.is_finite() || !dp.is_finite() {
                break;
            }
            let step = p / dp;
            if step.abs() > 1e-6 * (1.0 + x.abs()) {
                break;
            }
            *x -= step;
            if step.abs() <= f64::EPSILON * (1.0 + x.abs()) {
                break;
            }
        }
    }

    let weights: Vec<f64> = nodes.iter().map(|&x| christoffel_weight(rec, x)).collect();

    let ordered = nodes.windows(2).all(|w| w[0] < w[1]);
    let positive = weights.iter().all(|&w| w > 0.0 && w.is_finite());
    if !ordered || !positive {
        return Err(Error::numerical(
            "gauss rule",
            format!("degenerate rule of order {n} (ordered={ordered}, positive={positive})"),
        ));
    }
    Ok(QuadratureRule {
        kind,
        nodes,
        weights,
    })
}

/// Monic `π_n(x)` and its derivative.
fn monic_value_and_derivative(rec: &Recurrence, x: f64) -> (f64, f64) {
    let (mut p_prev, mut p) = (0.0, 1.0);
    let (mut d_prev, mut d) = (0.0, 0.0);
    for k in 0..rec.len() {
        let b = if k == 0 { 0.0 } else { rec.beta[k] };
        let p_next = (x - rec.alpha[k]) * p - b * p_prev;
        let d_next = (x - rec.alpha[k]) * d + p - b * d_prev;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d)
}

/// `1 / Σ_{k<n} p_k(x)²` with `p_k` orthonormal.
fn christoffel_weight(rec: &Recurrence, x: f64) -> f64 {
    let n = rec.len();
    let mut p_prev = 0.0;
    let mut p = 1.0 / rec.beta[0].sqrt();
    let mut sum = p * p;
    for k in 0..n - 1 {
        let sb_k = if k == 0 { 0.0 } else { rec.beta[k].sqrt() };
        let p_next = ((x - rec.alpha[k]) * p - sb_k * p_prev) / rec.beta[k + 1].sqrt();
        p_prev = p;
        p = p_next;
        sum += p * p;
    }
    1.0 / sum
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Recurrence coefficients for `exp(-x²)` on `[0, ∞)` from a discretized
/// Stieltjes procedure.
///
/// The weight is replaced by a composite Gauss-Legendre measure on `[0, 20]`
/// (80 panels of 32 points) and the orthonormal polynomials are built by a
/// Lanczos sweep with full reorthogonalization.
pub fn half_range_recurrence_discretized(n: usize) -> Result<Recurrence> {
    check_order(n)?;
    let (gl_x, gl_w) = gauss_legendre(32);
    let panels = 80;
    let width = 20.0 / panels as f64;
    let mut t = Vec::with_capacity(panels * gl_x.len());
    let mut v = Vec::with_capacity(panels * gl_x.len());
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * width;
        for (x, w) in gl_x.iter().zip(&gl_w) {
            let node = mid + 0.5 * width * x;
            t.push(node);
            v.push(0.5 * width * w * (-node * node).exp());
        }
    }
    let inner = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .zip(&v)
            .map(|((x, y), w)| x * y * w)
            .sum::<f64>()
    };

    let mass: f64 = v.iter().sum();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    basis.push(vec![1.0 / mass.sqrt(); t.len()]);
    let mut alpha = Vec::with_capacity(n);
    let mut beta = vec![mass];
    for k in 0..n {
        let q = &basis[k];
        let tq: Vec<f64> = t.iter().zip(q).map(|(x, y)| x * y).collect();
        let a = inner(&tq, q);
        alpha.push(a);
        if k + 1 == n {
            break;
        }
        let mut r: Vec<f64> = tq.iter().zip(q).map(|(x, y)| x - a * y).collect();
        if k > 0 {
            let sb = beta[k].sqrt();
            for (ri, qi) in r.iter_mut().zip(&basis[k - 1]) {
                *ri -= sb * qi;
            }
        }
        for _ in 0..2 {
            for prev in &basis {
                let c = inner(&r, prev);
                for (ri, pi) in r.iter_mut().zip(prev) {
                    *ri -= c * pi;
                }
            }
        }
        let b = inner(&r, &r);
        if !(b > 0.0) {
            return Err(Error::numerical(
                "half-range recurrence",
                format!("breakdown at degree {}", k + 1),
            ));
        }
        let norm = b.sqrt();
        beta.push(b);
        basis.push(r.into_iter().map(|x| x / norm).collect());
    }
    Ok(Recurrence { alpha, beta })
}

/// Embedded half-range recurrence truncated to `n` terms.
pub fn half_range_recurrence_embedded(n: usize) -> Result<Recurrence> {
    check_order(n)?;
    Ok(Recurrence::half_range_embedded(n))
}

/// Rust source for the embedded coefficient table.
pub fn render_half_range_table(rec: &Recurrence) -> String {
    let mut out = String::new();
    out.push_str("/// Recurrence coefficients `alpha_k` of the monic polynomials orthogonal for\n");
    out.push_str("/// `exp(-x^2)` on `[0, inf)`.\n");
    out.push_str(&format!(
        "pub(crate) const HALF_RANGE_ALPHA: [f64; {}] = [\n",
        rec.len()
    ));
    for a in &rec.alpha {
        out.push_str(&format!("    {a:?},\n"));
    }
    out.push_str("];\n\n");
    out.push_str("/// Recurrence coefficients `beta_k`; `beta_0` is the total mass `sqrt(pi)/2`.\n");
    out.push_str(&format!(
        "pub(crate) const HALF_RANGE_BETA: [f64; {}] = [\n",
        rec.len()
    ));
    for b in &rec.beta {
        out.push_str(&format!("    {b:?},\n"));
    }
    out.push_str("];\n");
    out
}

/// `∫ x^j e^{-x²} dx` over the rule's domain (odd moments vanish on the full line).
pub fn exact_monomial_moment(kind: RuleKind, j: u32) -> f64 {
    let half = super::gamma::gamma((j as f64 + 1.0) / 2.0) / 2.0;
    match kind {
        RuleKind::HalfRangeHermite => half,
        RuleKind::FullHermite => {
            if j % 2 == 0 {
                2.0 * half
            } else {
                0.0
            }
        }
    }
}

/// Largest relative error of the rule over monomials of degree `< 2·order`.
///
/// For odd moments on the full line the error is scaled by `∫|x|^j e^{-x²}`.
pub fn monomial_exactness_error(rule: &QuadratureRule) -> f64 {
    let max_degree = 2 * rule.order() as u32;
    (0..max_degree)
        .map(|j| {
            let approx = rule.integrate(|x| x.powi(j as i32));
            let exact = exact_monomial_moment(rule.kind, j);
            let scale = exact_monomial_moment(RuleKind::HalfRangeHermite, j)
                * if rule.kind == RuleKind::FullHermite { 2.0 } else { 1.0 };
            (approx - exact).abs() / scale
        })
        .fold(0.0, f64::max)
}

//! Special functions and quadrature used by the closed-form metrics.

pub mod adaptive;
pub mod double_exp;
pub mod gamma;
mod half_range_table;
pub mod meijer;
pub mod normal;
pub mod quadrature;

pub use gamma::{gamma as gamma_fn, ln_gamma, reg_gamma_pair, reg_lower_gamma, reg_upper_gamma, upper_gamma};
pub use meijer::{meijer_ber_term, meijer_cap_term};
pub use normal::{ln_std_normal_cdf, std_normal_cdf, std_normal_pdf, std_normal_quantile};
pub use quadrature::{full_hermite_rule, half_range_hermite_rule, QuadratureRule, RuleKind};

pub mod channel;
pub mod error;
pub mod harness;
pub mod lognormal_sum;
pub mod metrics;
pub mod montecarlo;
pub mod snr;
pub mod special;

pub use error::{Error, Result};

//! Built-in configurations for the published operating points.
//!
//! Each preset is a TOML fragment; a user file is merged on top of it.
//! Noise powers are normalised to 1 W background and 10 W impulsive, and
//! transmit powers follow from `tx_snr_db`, so the absolute noise values
//! cancel out of every SNR.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    PaperIv,
    PaperFig2a,
    PaperFig3b,
    PaperFig3c,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::PaperIv, Preset::PaperFig2a, Preset::PaperFig3b, Preset::PaperFig3c];

    pub fn name(self) -> &'static str {
        match self {
            Preset::PaperIv => "paper-iv",
            Preset::PaperFig2a => "paper-fig2a",
            Preset::PaperFig3b => "paper-fig3b",
            Preset::PaperFig3c => "paper-fig3c",
        }
    }

    /// Preset fragments, most general first.
    pub(crate) fn layers(self) -> Vec<&'static str> {
        match self {
            Preset::PaperIv => vec![BASE, DIRECT_SNR],
            Preset::PaperFig2a => vec![BASE, FIG2A],
            Preset::PaperFig3b => vec![BASE, DIRECT_SNR, FIG3B],
            Preset::PaperFig3c => vec![BASE, DIRECT_SNR, FIG3C],
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| Error::Schema {
            field: "preset".into(),
            reason: format!(
                "unknown preset `{s}` (expected one of {})",
                Preset::ALL.map(Preset::name).join(", ")
            ),
        })
    }
}

const BASE: &str = r#"
schema_version = 1

[plc]
mu_db = 0.0
sigma_db = 12.0
p_imp = 0.05
var_bg = 1.0
var_imp = 10.0
branches = 1
relays = 1

[rf]
m = 3.0
omega = 1.0
n_r = 3
n_d = 2
rate = 0.85
c = 1.0

[experiment]
scenario = "ber_vs_snr"
variable = "gbar0_db"
start = 0.0
stop = 40.0
points = 12
spacing = "linear"
gamma_th_db = 10.0
modulation = "BPSK"
"#;

/// Average SNRs given directly rather than through link budgets.
const DIRECT_SNR: &str = r#"
[plc]
gbar0_db = 20.0

[rf]
rho_db = 20.0
"#;

const FIG2A: &str = r#"
[plc]
branches = 2
relays = 2
alpha1 = 0.00933
alpha2 = 0.0051
k = 0.7
freq_mhz = 20.0
dist_m = 10.0

[rf]
n_pl = 3.2
dist_m = 2.0
var_noise = 1.0

[power]
tx_snr_db = 25.0
plc_fraction = 0.5

[experiment]
scenario = "outage_vs_distance"
variable = "distance"
start = 1.0
stop = 30.0
points = 30
gamma_th_db = -17.5
variants = [
    { label = "cascaded NLoS", link = "cascaded", n_pl = 3.2 },
    { label = "wireless-only NLoS", link = "wireless_only", n_pl = 3.2 },
    { label = "cascaded LoS", link = "cascaded", n_pl = 2.8 },
    { label = "wireless-only LoS", link = "wireless_only", n_pl = 2.8 },
]
"#;

const FIG3B: &str = r#"
[experiment]
scenario = "ber_vs_snr"
points = 41
variants = [
    { label = "L=1 M=1", branches = 1, relays = 1 },
    { label = "L=1 M=2", branches = 1, relays = 2 },
    { label = "L=2 M=1", branches = 2, relays = 1 },
    { label = "L=2 M=2", branches = 2, relays = 2 },
]
"#;

const FIG3C: &str = r#"
[experiment]
scenario = "capacity_vs_snr"
points = 41
variants = [
    { label = "L=1 M=1", branches = 1, relays = 1 },
    { label = "L=1 M=2", branches = 1, relays = 2 },
    { label = "L=2 M=1", branches = 2, relays = 1 },
    { label = "L=2 M=2", branches = 2, relays = 2 },
]
"#;

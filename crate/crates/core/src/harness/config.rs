//! Experiment configuration files.
//!
//! A configuration is a TOML document with a `schema_version`, an optional
//! `preset`, and the sections `[plc]`, `[rf]`, `[power]`, `[fit]`,
//! `[quadrature]`, `[experiment]`, `[sim]` and `[output]`. Values are layered
//! as preset, then file, then command-line overrides.
//!
//! Units: `freq_mhz` in MHz, `dist_m` in metres, `power_w`, `var_*` and
//! `var_noise` in watts, every `*_db` field in dB (power ratio).
//!
//! Failures are reported in three distinct kinds: [`Error::ConfigParse`] for
//! malformed TOML, [`Error::Schema`] for unknown, missing or mistyped fields,
//! and [`Error::InvalidParameter`] for values that break a model invariant.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;
use toml::{Table, Value};

use super::presets::Preset;
use crate::channel::{PlcLinkConfig, RfLinkConfig};
use crate::error::{Error, Result};
use crate::lognormal_sum::{FitOptions, FitWeighting};
use crate::metrics::{MetricQuery, Modulation};
use crate::montecarlo::SimPlan;
use crate::special::quadrature::MAX_ORDER;

pub const SCHEMA_VERSION: i64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    OutageVsDistance,
    BerVsSnr,
    CapacityVsSnr,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Outage,
    Ber,
    Capacity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// Tx-Rx distance in metres: the PLC cable length of a cascade and the
    /// radio distance of a wireless-only link.
    Distance,
    Gbar0Db,
    RhoDb,
    GammaThDb,
    TxSnrDb,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Distance => "distance",
            SweepVariable::Gbar0Db => "gbar0_db",
            SweepVariable::RhoDb => "rho_db",
            SweepVariable::GammaThDb => "gamma_th_db",
            SweepVariable::TxSnrDb => "tx_snr_db",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.start + (self.stop - self.start) * t,
                    Spacing::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * t).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    Cascaded,
    WirelessOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub label: String,
    pub branches: u32,
    pub relays: u32,
    pub modulation: Modulation,
    /// Path-loss exponent override for this variant.
    pub n_pl: Option<f64>,
    pub link: LinkKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapacityUnit {
    Nats,
    Bits,
}

/// Transmit SNR budget and its split between the two hops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    /// Per-link transmit SNR `P/σ²` at an equal split (dB).
    pub tx_snr_db: f64,
    /// Share of the two-link budget given to the PLC hop.
    pub plc_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlcGeometry {
    pub alpha1: f64,
    pub alpha2: f64,
    pub k: f64,
    pub freq_mhz: f64,
    pub dist_m: f64,
    pub power_w: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlcParams {
    pub mu_db: f64,
    pub sigma_db: f64,
    pub p_imp: f64,
    pub var_bg: f64,
    pub var_imp: f64,
    pub branches: u32,
    pub relays: u32,
    /// Average PLC SNR given directly; takes precedence over `geometry`.
    pub gbar0_db: Option<f64>,
    pub geometry: Option<PlcGeometry>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfGeometry {
    pub c: f64,
    pub n_pl: f64,
    pub dist_m: f64,
    pub power_w: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfParams {
    pub m: f64,
    pub omega: f64,
    pub n_r: u32,
    pub n_d: u32,
    pub rate: f64,
    pub var_noise: f64,
    /// `ρ` given directly; takes precedence over `geometry`.
    pub rho_db: Option<f64>,
    pub geometry: Option<RfGeometry>,
}

/// A fully resolved and validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub preset: Option<Preset>,
    pub plc: PlcParams,
    pub rf: RfParams,
    pub power: Option<PowerSplit>,
    pub fit: FitOptions,
    pub half_order: usize,
    pub full_order: usize,
    pub scenario: Scenario,
    pub metric: MetricKind,
    pub sweep: Sweep,
    pub gamma_th_db: f64,
    pub variants: Vec<Variant>,
    pub capacity_unit: CapacityUnit,
    pub sim: Option<SimPlan>,
    /// Threads used for grid evaluation.
    pub workers: usize,
    pub output: Option<PathBuf>,
}

/// Command-line values that replace file values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub preset: Option<Preset>,
    pub sim_trials: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: Option<i64>,
    preset: Option<String>,
    plc: Option<RawPlc>,
    rf: Option<RawRf>,
    power: Option<RawPower>,
    fit: Option<RawFit>,
    quadrature: Option<RawQuadrature>,
    experiment: Option<RawExperiment>,
    sim: Option<RawSim>,
    output: Option<RawOutput>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlc {
    mu_db: Option<f64>,
    sigma_db: Option<f64>,
    p_imp: Option<f64>,
    var_bg: Option<f64>,
    var_imp: Option<f64>,
    branches: Option<i64>,
    relays: Option<i64>,
    gbar0_db: Option<f64>,
    alpha1: Option<f64>,
    alpha2: Option<f64>,
    k: Option<f64>,
    freq_mhz: Option<f64>,
    dist_m: Option<f64>,
    power_w: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRf {
    m: Option<f64>,
    omega: Option<f64>,
    n_r: Option<i64>,
    n_d: Option<i64>,
    rate: Option<f64>,
    var_noise: Option<f64>,
    rho_db: Option<f64>,
    c: Option<f64>,
    n_pl: Option<f64>,
    dist_m: Option<f64>,
    power_w: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPower {
    tx_snr_db: Option<f64>,
    plc_fraction: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFit {
    samples: Option<i64>,
    quantiles: Option<i64>,
    seed: Option<i64>,
    weighting: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuadrature {
    half_order: Option<i64>,
    full_order: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    scenario: Option<String>,
    metric: Option<String>,
    variable: Option<String>,
    start: Option<f64>,
    stop: Option<f64>,
    points: Option<i64>,
    spacing: Option<String>,
    gamma_th_db: Option<f64>,
    modulation: Option<String>,
    capacity_unit: Option<String>,
    variants: Option<Vec<RawVariant>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVariant {
    label: Option<String>,
    branches: Option<i64>,
    relays: Option<i64>,
    modulation: Option<String>,
    n_pl: Option<f64>,
    link: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSim {
    trials: Option<i64>,
    seed: Option<i64>,
    workers: Option<i64>,
    confidence: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<String>,
}

fn schema(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Schema { field: field.into(), reason: reason.into() }
}

fn required<T>(v: Option<T>, field: &str) -> Result<T> {
    v.ok_or_else(|| schema(field, "required field is missing"))
}

fn count(v: i64, field: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| schema(field, format!("must be a non-negative integer, got {v}")))
}

fn keyword<T>(v: &str, field: &str, options: &[(&str, T)]) -> Result<T>
where
    T: Copy,
{
    options.iter().find(|(k, _)| *k == v).map(|(_, t)| *t).ok_or_else(|| {
        let names: Vec<&str> = options.iter().map(|(k, _)| *k).collect();
        schema(field, format!("unknown value `{v}` (expected one of {})", names.join(", ")))
    })
}

fn modulation(name: &str, field: &str) -> Result<Modulation> {
    Modulation::from_name(name).ok_or_else(|| {
        schema(field, format!("unknown modulation `{name}` (expected BFSK, BPSK, DPSK or NCFSK)"))
    })
}

/// Recursively overlays `top` onto `base`; tables merge, everything else replaces.
fn merge(base: &mut Table, top: Table) {
    for (key, value) in top {
        match (base.get_mut(&key), value) {
            (Some(Value::Table(b)), Value::Table(t)) => merge(b, t),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

fn parse_table(text: &str, path: &Path) -> Result<Table> {
    text.parse::<Table>()
        .map_err(|e| Error::ConfigParse { path: path.to_path_buf(), message: e.to_string() })
}

/// Reads, layers and validates a configuration file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentSpec> {
    load_config_with(path, &Overrides::default())
}

pub fn load_config_with(path: impl AsRef<Path>, overrides: &Overrides) -> Result<ExperimentSpec> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_config(&text, path, overrides)
}

/// Resolves a configuration given as text; `origin` only labels errors.
pub fn parse_config(text: &str, origin: &Path, overrides: &Overrides) -> Result<ExperimentSpec> {
    let file = parse_table(text, origin)?;
    let preset = match (overrides.preset, file.get("preset")) {
        (Some(p), _) => Some(p),
        (None, Some(Value::String(name))) => Some(Preset::from_str(name)?),
        (None, Some(_)) => return Err(schema("preset", "must be a string")),
        (None, None) => None,
    };
    let mut table = Table::new();
    if let Some(p) = preset {
        for layer in p.layers() {
            merge(&mut table, parse_table(layer, Path::new(p.name()))?);
        }
    }
    merge(&mut table, file);
    let raw: RawConfig = serde_path_to_error::deserialize(Value::Table(table)).map_err(|e| {
        let field = e.path().to_string();
        schema(field, e.into_inner().message().trim().to_string())
    })?;
    let mut spec = resolve(raw, preset)?;
    apply_overrides(&mut spec, overrides)?;
    validate(&spec)?;
    Ok(spec)
}

fn resolve(raw: RawConfig, preset: Option<Preset>) -> Result<ExperimentSpec> {
    let version = required(raw.schema_version, "schema_version")?;
    if version != SCHEMA_VERSION {
        return Err(schema("schema_version", format!("unsupported version {version} (expected {SCHEMA_VERSION})")));
    }
    let _ = raw.preset;

    let p = raw.plc.unwrap_or_default();
    let plc_geometry = match (p.alpha1, p.alpha2, p.k, p.freq_mhz, p.dist_m) {
        (None, None, None, None, None) => None,
        (a1, a2, k, f, d) => Some(PlcGeometry {
            alpha1: required(a1, "plc.alpha1")?,
            alpha2: required(a2, "plc.alpha2")?,
            k: required(k, "plc.k")?,
            freq_mhz: required(f, "plc.freq_mhz")?,
            dist_m: required(d, "plc.dist_m")?,
            power_w: p.power_w,
        }),
    };
    if p.gbar0_db.is_none() && plc_geometry.is_none() {
        return Err(schema("plc.gbar0_db", "give either gbar0_db or the cable parameters (alpha1, alpha2, k, freq_mhz, dist_m)"));
    }
    let plc = PlcParams {
        mu_db: required(p.mu_db, "plc.mu_db")?,
        sigma_db: required(p.sigma_db, "plc.sigma_db")?,
        p_imp: required(p.p_imp, "plc.p_imp")?,
        var_bg: required(p.var_bg, "plc.var_bg")?,
        var_imp: required(p.var_imp, "plc.var_imp")?,
        branches: count(required(p.branches, "plc.branches")?, "plc.branches")?,
        relays: count(required(p.relays, "plc.relays")?, "plc.relays")?,
        gbar0_db: p.gbar0_db,
        geometry: plc_geometry,
    };

    let r = raw.rf.unwrap_or_default();
    let rf_geometry = match (r.n_pl, r.dist_m) {
        (None, None) => None,
        (n, d) => Some(RfGeometry {
            c: required(r.c, "rf.c")?,
            n_pl: required(n, "rf.n_pl")?,
            dist_m: required(d, "rf.dist_m")?,
            power_w: r.power_w,
        }),
    };
    if r.rho_db.is_none() && rf_geometry.is_none() {
        return Err(schema("rf.rho_db", "give either rho_db or the link parameters (c, n_pl, dist_m)"));
    }
    let rf = RfParams {
        m: required(r.m, "rf.m")?,
        omega: required(r.omega, "rf.omega")?,
        n_r: count(required(r.n_r, "rf.n_r")?, "rf.n_r")?,
        n_d: count(required(r.n_d, "rf.n_d")?, "rf.n_d")?,
        rate: required(r.rate, "rf.rate")?,
        var_noise: r.var_noise.unwrap_or(1.0),
        rho_db: r.rho_db,
        geometry: rf_geometry,
    };

    let power = match raw.power {
        None => None,
        Some(pw) => Some(PowerSplit {
            tx_snr_db: required(pw.tx_snr_db, "power.tx_snr_db")?,
            plc_fraction: pw.plc_fraction.unwrap_or(0.5),
        }),
    };

    let mut fit = FitOptions::default();
    if let Some(f) = raw.fit {
        if let Some(n) = f.samples {
            fit.samples = usize::try_from(n).map_err(|_| schema("fit.samples", "must be a non-negative integer"))?;
        }
        if let Some(n) = f.quantiles {
            fit.quantiles = usize::try_from(n).map_err(|_| schema("fit.quantiles", "must be a non-negative integer"))?;
        }
        if let Some(s) = f.seed {
            fit.seed = s as u64;
        }
        if let Some(w) = f.weighting {
            fit.weighting = keyword(
                &w,
                "fit.weighting",
                &[("inverse_variance", FitWeighting::InverseVariance), ("uniform", FitWeighting::Uniform)],
            )?;
        }
    }

    let (mut half_order, mut full_order) = (MetricQuery::DEFAULT_HALF_ORDER, MetricQuery::DEFAULT_FULL_ORDER);
    if let Some(q) = raw.quadrature {
        if let Some(n) = q.half_order {
            half_order = usize::try_from(n).map_err(|_| schema("quadrature.half_order", "must be a non-negative integer"))?;
        }
        if let Some(n) = q.full_order {
            full_order = usize::try_from(n).map_err(|_| schema("quadrature.full_order", "must be a non-negative integer"))?;
        }
    }

    let e = required(raw.experiment, "experiment")?;
    let scenario = keyword(
        &required(e.scenario, "experiment.scenario")?,
        "experiment.scenario",
        &[
            ("outage_vs_distance", Scenario::OutageVsDistance),
            ("ber_vs_snr", Scenario::BerVsSnr),
            ("capacity_vs_snr", Scenario::CapacityVsSnr),
            ("custom", Scenario::Custom),
        ],
    )?;
    let metrics = [("outage", MetricKind::Outage), ("ber", MetricKind::Ber), ("capacity", MetricKind::Capacity)];
    let metric = match (scenario, e.metric) {
        (Scenario::Custom, m) => keyword(&required(m, "experiment.metric")?, "experiment.metric", &metrics)?,
        (s, m) => {
            let implied = match s {
                Scenario::OutageVsDistance => MetricKind::Outage,
                Scenario::BerVsSnr => MetricKind::Ber,
                _ => MetricKind::Capacity,
            };
            if let Some(m) = m {
                if keyword(&m, "experiment.metric", &metrics)? != implied {
                    return Err(schema("experiment.metric", "conflicts with the scenario; use scenario = \"custom\""));
                }
            }
            implied
        }
    };
    let variable = keyword(
        &required(e.variable, "experiment.variable")?,
        "experiment.variable",
        &[
            ("distance", SweepVariable::Distance),
            ("gbar0_db", SweepVariable::Gbar0Db),
            ("rho_db", SweepVariable::RhoDb),
            ("gamma_th_db", SweepVariable::GammaThDb),
            ("tx_snr_db", SweepVariable::TxSnrDb),
        ],
    )?;
    let spacing = match e.spacing {
        None => Spacing::Linear,
        Some(s) => keyword(&s, "experiment.spacing", &[("linear", Spacing::Linear), ("log", Spacing::Log)])?,
    };
    let points = required(e.points, "experiment.points")?;
    let sweep = Sweep {
        variable,
        start: required(e.start, "experiment.start")?,
        stop: required(e.stop, "experiment.stop")?,
        points: usize::try_from(points).map_err(|_| schema("experiment.points", "must be a non-negative integer"))?,
        spacing,
    };
    let default_mod = match e.modulation {
        None => Modulation::BPSK,
        Some(m) => modulation(&m, "experiment.modulation")?,
    };
    let capacity_unit = match e.capacity_unit {
        None => CapacityUnit::Nats,
        Some(u) => keyword(&u, "experiment.capacity_unit", &[("nats", CapacityUnit::Nats), ("bits", CapacityUnit::Bits)])?,
    };
    let variants = match e.variants {
        None => vec![Variant {
            label: format!("L={} M={}", plc.branches, plc.relays),
            branches: plc.branches,
            relays: plc.relays,
            modulation: default_mod,
            n_pl: None,
            link: LinkKind::Cascaded,
        }],
        Some(list) => list
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                let field = |name: &str| format!("experiment.variants[{i}].{name}");
                let branches = match v.branches {
                    Some(b) => count(b, &field("branches"))?,
                    None => plc.branches,
                };
                let relays = match v.relays {
                    Some(m) => count(m, &field("relays"))?,
                    None => plc.relays,
                };
                let link = match v.link {
                    None => LinkKind::Cascaded,
                    Some(l) => keyword(
                        &l,
                        &field("link"),
                        &[("cascaded", LinkKind::Cascaded), ("wireless_only", LinkKind::WirelessOnly)],
                    )?,
                };
                let modulation = match v.modulation {
                    None => default_mod,
                    Some(m) => modulation(&m, &field("modulation"))?,
                };
                Ok(Variant {
                    label: v.label.unwrap_or_else(|| format!("variant {i}")),
                    branches,
                    relays,
                    modulation,
                    n_pl: v.n_pl,
                    link,
                })
            })
            .collect::<Result<Vec<_>>>()?,
    };

    let sim = match raw.sim {
        None => None,
        Some(s) => {
            let mut plan = SimPlan::new(1_000_000, 1);
            if let Some(t) = s.trials {
                plan.trials = u64::try_from(t).map_err(|_| schema("sim.trials", "must be a non-negative integer"))?;
            }
            if let Some(seed) = s.seed {
                plan.seed = seed as u64;
            }
            if let Some(w) = s.workers {
                plan.workers = usize::try_from(w).map_err(|_| schema("sim.workers", "must be a non-negative integer"))?;
            }
            if let Some(c) = s.confidence {
                plan.confidence = c;
            }
            Some(plan)
        }
    };
    let workers = sim.map_or(1, |s| s.workers);

    Ok(ExperimentSpec {
        preset,
        plc,
        rf,
        power,
        fit,
        half_order,
        full_order,
        scenario,
        metric,
        sweep,
        gamma_th_db: required(e.gamma_th_db, "experiment.gamma_th_db")?,
        variants,
        capacity_unit,
        sim,
        workers,
        output: raw.output.and_then(|o| o.path).map(PathBuf::from),
    })
}

fn apply_overrides(spec: &mut ExperimentSpec, o: &Overrides) -> Result<()> {
    if o.sim_trials.is_some() || o.seed.is_some() {
        let plan = spec.sim.get_or_insert(SimPlan::new(1_000_000, 1).with_workers(spec.workers));
        if let Some(t) = o.sim_trials {
            plan.trials = t;
        }
        if let Some(s) = o.seed {
            plan.seed = s;
        }
    }
    if let Some(w) = o.workers {
        spec.workers = w;
        if let Some(plan) = spec.sim.as_mut() {
            plan.workers = w;
        }
    }
    if let Some(out) = &o.out {
        spec.output = Some(out.clone());
    }
    Ok(())
}

impl ExperimentSpec {
    /// PLC link at the given cable length with the configured power.
    pub fn plc_link(&self, branches: u32, relays: u32, dist_m: f64, tx_snr_db: Option<f64>) -> Result<PlcLinkConfig> {
        let g = self
            .plc
            .geometry
            .ok_or_else(|| schema("plc.dist_m", "cable parameters are needed for this experiment"))?;
        let mut link = PlcLinkConfig {
            alpha1: g.alpha1,
            alpha2: g.alpha2,
            k: g.k,
            freq: g.freq_mhz,
            dist: dist_m,
            mu_db: self.plc.mu_db,
            sigma_db: self.plc.sigma_db,
            p_imp: self.plc.p_imp,
            var_bg: self.plc.var_bg,
            var_imp: self.plc.var_imp,
            branches,
            relays,
            power: 0.0,
        };
        link.power = match (g.power_w, tx_snr_db, self.power) {
            (Some(p), None, _) => p,
            (_, t, Some(split)) => {
                let t = crate::channel::db_to_linear(t.unwrap_or(split.tx_snr_db));
                2.0 * split.plc_fraction * t * crate::channel::plc_noise_variance(&link)?
            }
            (Some(p), Some(_), None) => p,
            (None, _, None) => return Err(schema("plc.power_w", "give power_w or a [power] section")),
        };
        link.validate()?;
        Ok(link)
    }

    /// Radio link over `dist_m` with path-loss exponent `n_pl`.
    /// `share` is the fraction of the two-link budget it receives.
    pub fn rf_link(&self, n_pl: Option<f64>, dist_m: f64, share: f64, tx_snr_db: Option<f64>) -> Result<RfLinkConfig> {
        let g = self
            .rf
            .geometry
            .ok_or_else(|| schema("rf.dist_m", "radio link parameters are needed for this experiment"))?;
        let power = match (g.power_w, tx_snr_db, self.power) {
            (Some(p), None, _) => p,
            (_, t, Some(split)) => {
                let t = crate::channel::db_to_linear(t.unwrap_or(split.tx_snr_db));
                2.0 * share * t * self.rf.var_noise
            }
            (Some(p), Some(_), None) => p,
            (None, _, None) => return Err(schema("rf.power_w", "give power_w or a [power] section")),
        };
        let link = RfLinkConfig {
            m: self.rf.m,
            omega: self.rf.omega,
            n_r: self.rf.n_r,
            n_d: self.rf.n_d,
            rate: self.rf.rate,
            c: g.c,
            n_pl: n_pl.unwrap_or(g.n_pl),
            dist: dist_m,
            power,
            var_noise: self.rf.var_noise,
        };
        link.validate()?;
        Ok(link)
    }
}

fn validate(spec: &ExperimentSpec) -> Result<()> {
    let plc = &spec.plc;
    if !plc.mu_db.is_finite() {
        return Err(Error::invalid("plc.mu_db", "must be finite"));
    }
    if !(plc.sigma_db > 0.0 && plc.sigma_db.is_finite()) {
        return Err(Error::invalid("plc.sigma_db", format!("must be > 0, got {}", plc.sigma_db)));
    }
    if !(0.0..=1.0).contains(&plc.p_imp) {
        return Err(Error::invalid("plc.p_imp", format!("must lie in [0, 1], got {}", plc.p_imp)));
    }
    if !(plc.var_bg >= 0.0 && plc.var_imp >= 0.0) {
        return Err(Error::invalid("plc.var_bg", "noise powers must be >= 0"));
    }
    if plc.branches < 1 {
        return Err(Error::invalid("plc.branches", "need at least one branch"));
    }
    if plc.relays < 1 {
        return Err(Error::invalid("plc.relays", "need at least one relay"));
    }
    if let Some(db) = plc.gbar0_db {
        if !db.is_finite() {
            return Err(Error::invalid("plc.gbar0_db", "must be finite"));
        }
    }
    let rf = &spec.rf;
    if let Some(db) = rf.rho_db {
        if !db.is_finite() {
            return Err(Error::invalid("rf.rho_db", "must be finite"));
        }
    }
    if !(rf.var_noise > 0.0) {
        return Err(Error::invalid("rf.var_noise", "must be > 0"));
    }
    if let Some(split) = spec.power {
        if !split.tx_snr_db.is_finite() {
            return Err(Error::invalid("power.tx_snr_db", "must be finite"));
        }
        if !(split.plc_fraction > 0.0 && split.plc_fraction < 1.0) {
            return Err(Error::invalid("power.plc_fraction", format!("must lie in (0, 1), got {}", split.plc_fraction)));
        }
    }
    // Link invariants, checked on the nominal operating point.
    if plc.geometry.is_some() && (spec.power.is_some() || plc.geometry.and_then(|g| g.power_w).is_some()) {
        spec.plc_link(plc.branches, plc.relays, plc.geometry.unwrap().dist_m, None)?;
    }
    let rf_probe = crate::channel::RfLinkConfig {
        m: rf.m,
        omega: rf.omega,
        n_r: rf.n_r,
        n_d: rf.n_d,
        rate: rf.rate,
        c: rf.geometry.map_or(1.0, |g| g.c),
        n_pl: rf.geometry.map_or(2.0, |g| g.n_pl),
        dist: rf.geometry.map_or(1.0, |g| g.dist_m),
        power: rf.geometry.and_then(|g| g.power_w).unwrap_or(1.0),
        var_noise: rf.var_noise,
    };
    rf_probe.validate()?;

    for order in [spec.half_order, spec.full_order] {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::UnsupportedOrder { order, max: MAX_ORDER });
        }
    }
    let sweep = &spec.sweep;
    if sweep.points < 2 {
        return Err(Error::invalid("experiment.points", format!("need at least 2 points, got {}", sweep.points)));
    }
    if !(sweep.start.is_finite() && sweep.stop.is_finite()) {
        return Err(Error::invalid("experiment.start", "sweep bounds must be finite"));
    }
    if sweep.variable == SweepVariable::Distance && !(sweep.start > 0.0 && sweep.stop > 0.0) {
        return Err(Error::invalid("experiment.start", "distances must be > 0"));
    }
    if sweep.spacing == Spacing::Log && !(sweep.start > 0.0 && sweep.stop > 0.0) {
        return Err(Error::invalid("experiment.spacing", "log spacing needs positive bounds"));
    }
    if !spec.gamma_th_db.is_finite() {
        return Err(Error::invalid("experiment.gamma_th_db", "must be finite"));
    }
    if spec.variants.is_empty() {
        return Err(Error::invalid("experiment.variants", "need at least one variant"));
    }
    for v in &spec.variants {
        if v.branches < 1 {
            return Err(Error::invalid("experiment.variants.branches", format!("`{}` needs at least one branch", v.label)));
        }
        if v.relays < 1 {
            return Err(Error::invalid("experiment.variants.relays", format!("`{}` needs at least one relay", v.label)));
        }
        if let Some(n) = v.n_pl {
            if !(n >= 0.0 && n.is_finite()) {
                return Err(Error::invalid("experiment.variants.n_pl", format!("`{}`: must be >= 0", v.label)));
            }
        }
        if v.link == LinkKind::WirelessOnly && rf.geometry.is_none() {
            return Err(schema("rf.dist_m", format!("wireless-only variant `{}` needs radio link parameters", v.label)));
        }
    }
    if let Some(plan) = &spec.sim {
        plan.validate()?;
    }
    if spec.workers < 1 {
        return Err(Error::invalid("sim.workers", "need at least one worker"));
    }
    Ok(())
}

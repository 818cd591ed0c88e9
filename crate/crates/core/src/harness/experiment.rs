//! Sweeps a metric over one configuration variable for every variant.

use rayon::prelude::*;

use super::config::{CapacityUnit, ExperimentSpec, LinkKind, MetricKind, SweepVariable, Variant};
use crate::channel::{db_to_linear, ostbc_shape, plc_avg_snr, rf_snr_scale, RfLinkConfig};
use crate::error::{Error, Result};
use crate::lognormal_sum::FitCache;
use crate::metrics::{
    self, wireless_only_ber_report, wireless_only_capacity_report, BerReport, CapacityReport, MetricQuery,
    Modulation,
};
use crate::montecarlo::{mc_all, CascadeSimConfig, PlcSimConfig, RfSimConfig, SimEstimate, SimMetrics, SimPlan};
use crate::snr::{EndToEndDistribution, PlcHopDistribution, RfHopDistribution};

/// The system seen at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointModel {
    Cascaded { e2e: EndToEndDistribution, sim: CascadeSimConfig },
    WirelessOnly { rf: RfHopDistribution, sim: RfSimConfig },
}

/// Everything needed to evaluate the metrics at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSetup {
    pub model: PointModel,
    /// Linear threshold SNR.
    pub gamma_th: f64,
    pub modulation: Modulation,
    pub half_order: usize,
    pub full_order: usize,
}

/// Analytic value, its components and an optional simulation estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub analytic: f64,
    pub components: Vec<f64>,
    pub mc: Option<SimEstimate>,
}

/// One curve of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricCurve {
    pub label: String,
    pub variable: String,
    pub values: Vec<f64>,
    pub analytic: Vec<f64>,
    pub mc_mean: Option<Vec<f64>>,
    pub mc_halfwidth: Option<Vec<f64>>,
    pub component_names: Vec<String>,
    /// `components[i][j]` is component `j` at point `i`.
    pub components: Vec<Vec<f64>>,
}

/// Diagnostic columns reported for each metric.
pub fn component_names(metric: MetricKind) -> &'static [&'static str] {
    match metric {
        MetricKind::Outage => &["gamma_form", "relay_cdf", "mimo_cdf"],
        MetricKind::Ber => &["p_e1", "p_e2", "p_e3", "p_e3_adaptive"],
        MetricKind::Capacity => &["c1", "c1_meijer", "c2", "c2_adaptive", "c3", "guarded_nodes"],
    }
}

fn rf_template(spec: &ExperimentSpec) -> RfLinkConfig {
    RfLinkConfig {
        m: spec.rf.m,
        omega: spec.rf.omega,
        n_r: spec.rf.n_r,
        n_d: spec.rf.n_d,
        rate: spec.rf.rate,
        c: 1.0,
        n_pl: 0.0,
        dist: 1.0,
        power: 1.0,
        var_noise: spec.rf.var_noise,
    }
}

/// Resolves the system for `variant` at sweep value `x`.
pub fn point_setup(spec: &ExperimentSpec, variant: &Variant, x: f64) -> Result<PointSetup> {
    let var = spec.sweep.variable;
    let tx = (var == SweepVariable::TxSnrDb).then_some(x);
    let distance = || -> Result<f64> {
        match (var, spec.plc.geometry) {
            (SweepVariable::Distance, _) => Ok(x),
            (_, Some(g)) => Ok(g.dist_m),
            (_, None) => Err(Error::Schema {
                field: "plc.dist_m".into(),
                reason: "a distance is needed for this experiment".into(),
            }),
        }
    };
    let gamma_th = db_to_linear(if var == SweepVariable::GammaThDb { x } else { spec.gamma_th_db });
    let (shape_a, alpha_g) = ostbc_shape(&rf_template(spec))?;
    let rf_sim = |rho: f64| RfSimConfig { m: spec.rf.m, omega: spec.rf.omega, n_r: spec.rf.n_r, n_d: spec.rf.n_d, rho };

    let model = match variant.link {
        LinkKind::Cascaded => {
            let gbar0 = match (var, spec.plc.gbar0_db) {
                (SweepVariable::Gbar0Db, _) => db_to_linear(x),
                (_, Some(db)) => db_to_linear(db),
                _ => plc_avg_snr(&spec.plc_link(variant.branches, variant.relays, distance()?, tx)?)?,
            };
            let rho = match (var, spec.rf.rho_db) {
                (SweepVariable::RhoDb, _) => db_to_linear(x),
                (_, Some(db)) => db_to_linear(db),
                _ => {
                    let hop = spec.rf.geometry.map_or(1.0, |g| g.dist_m);
                    let share = 1.0 - spec.power.map_or(0.5, |p| p.plc_fraction);
                    rf_snr_scale(&spec.rf_link(variant.n_pl, hop, share, tx)?)?
                }
            };
            let fit = FitCache::global().get_or_fit(spec.plc.mu_db, spec.plc.sigma_db, variant.branches, spec.fit)?;
            let e2e = EndToEndDistribution::new(
                PlcHopDistribution::new(fit, gbar0, variant.relays)?,
                RfHopDistribution::new(shape_a, alpha_g, rho)?,
            );
            let plc = PlcSimConfig {
                gbar0,
                mu_db: spec.plc.mu_db,
                sigma_db: spec.plc.sigma_db,
                branches: variant.branches,
                relays: variant.relays,
            };
            PointModel::Cascaded { e2e, sim: CascadeSimConfig { plc, rf: rf_sim(rho) } }
        }
        LinkKind::WirelessOnly => {
            let rho = match var {
                SweepVariable::RhoDb => db_to_linear(x),
                _ => rf_snr_scale(&spec.rf_link(variant.n_pl, distance()?, 0.5, tx)?)?,
            };
            PointModel::WirelessOnly { rf: RfHopDistribution::new(shape_a, alpha_g, rho)?, sim: rf_sim(rho) }
        }
    };
    Ok(PointSetup {
        model,
        gamma_th,
        modulation: variant.modulation,
        half_order: spec.half_order,
        full_order: spec.full_order,
    })
}

impl PointSetup {
    pub fn query(&self) -> Option<MetricQuery> {
        match self.model {
            PointModel::Cascaded { e2e, .. } => Some(
                MetricQuery::new(e2e, self.gamma_th, self.modulation).with_orders(self.half_order, self.full_order),
            ),
            PointModel::WirelessOnly { .. } => None,
        }
    }

    /// Closed-form value of `metric` and its components, in nats for capacity.
    pub fn analytic(&self, metric: MetricKind) -> Result<(f64, Vec<f64>)> {
        let ber_parts = |r: BerReport| (r.value, vec![r.p_e1, r.p_e2, r.p_e3, r.p_e3_adaptive]);
        let cap_parts = |r: CapacityReport| {
            (r.value, vec![r.c1, r.c1_meijer, r.c2, r.c2_adaptive, r.c3, r.guarded_nodes as f64])
        };
        match (self.model, metric) {
            (PointModel::Cascaded { e2e, .. }, MetricKind::Outage) => {
                let r = metrics::outage_report(&self.query().expect("cascaded"))?;
                Ok((r.value, vec![r.gamma_form, e2e.plc.cdf_at(self.gamma_th), e2e.rf.cdf_at(self.gamma_th)]))
            }
            (PointModel::Cascaded { .. }, MetricKind::Ber) => {
                Ok(ber_parts(metrics::ber_report(&self.query().expect("cascaded"))?))
            }
            (PointModel::Cascaded { .. }, MetricKind::Capacity) => {
                Ok(cap_parts(metrics::capacity_report(&self.query().expect("cascaded"))?))
            }
            (PointModel::WirelessOnly { rf, .. }, MetricKind::Outage) => {
                let v = metrics::wireless_only_outage(&rf, self.gamma_th)?;
                Ok((v, vec![v, 0.0, v]))
            }
            (PointModel::WirelessOnly { rf, .. }, MetricKind::Ber) => {
                Ok(ber_parts(wireless_only_ber_report(&rf, &self.modulation)?))
            }
            (PointModel::WirelessOnly { rf, .. }, MetricKind::Capacity) => {
                Ok(cap_parts(wireless_only_capacity_report(&rf)?))
            }
        }
    }

    pub fn simulate(&self, plan: &SimPlan) -> Result<SimMetrics> {
        match &self.model {
            PointModel::Cascaded { sim, .. } => mc_all(plan, sim, self.gamma_th, &self.modulation),
            PointModel::WirelessOnly { sim, .. } => mc_all(plan, sim, self.gamma_th, &self.modulation),
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the simulation at grid point `point` of variant `variant`.
pub fn point_seed(seed: u64, variant: usize, point: usize) -> u64 {
    splitmix(splitmix(seed ^ splitmix(variant as u64)) ^ point as u64)
}

fn grid_error(spec: &ExperimentSpec, index: usize, value: f64, e: Error) -> Error {
    Error::GridPoint { index, variable: spec.sweep.variable.name().to_string(), value, source: Box::new(e) }
}

/// Evaluates a single grid point exactly as [`run_experiment`] does.
pub fn evaluate_point(spec: &ExperimentSpec, variant: usize, point: usize) -> Result<PointResult> {
    let x = spec.sweep.values()[point];
    let setup = point_setup(spec, &spec.variants[variant], x)?;
    let (analytic, components) = setup.analytic(spec.metric)?;
    let mc = match &spec.sim {
        None => None,
        Some(plan) => {
            let plan = SimPlan { seed: point_seed(plan.seed, variant, point), ..*plan };
            let m = setup.simulate(&plan)?;
            Some(match spec.metric {
                MetricKind::Outage => m.outage,
                MetricKind::Ber => m.ber,
                MetricKind::Capacity => m.capacity,
            })
        }
    };
    Ok(PointResult { analytic, components, mc })
}

/// Runs every variant over the sweep. The result does not depend on the
/// number of workers.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<MetricCurve>> {
    let values = spec.sweep.values();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| Error::numerical("run_experiment", e.to_string()))?;

    // Fit each branch count once up front so workers never race on a cache miss.
    for v in spec.variants.iter().filter(|v| v.link == LinkKind::Cascaded) {
        FitCache::global().get_or_fit(spec.plc.mu_db, spec.plc.sigma_db, v.branches, spec.fit)?;
    }
    let jobs: Vec<(usize, usize)> =
        (0..spec.variants.len()).flat_map(|v| (0..values.len()).map(move |i| (v, i))).collect();
    let setups: Vec<Result<(PointSetup, f64, Vec<f64>)>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(v, i)| {
                let x = values[i];
                let run = || -> Result<_> {
                    let setup = point_setup(spec, &spec.variants[v], x)?;
                    let (a, c) = setup.analytic(spec.metric)?;
                    Ok((setup, a, c))
                };
                run().map_err(|e| grid_error(spec, i, x, e))
            })
            .collect()
    });

    let scale = match (spec.metric, spec.capacity_unit) {
        (MetricKind::Capacity, CapacityUnit::Bits) => std::f64::consts::LN_2.recip(),
        _ => 1.0,
    };
    let names: Vec<String> = component_names(spec.metric)
        .iter()
        .map(|n| match (scale != 1.0, *n) {
            (true, "guarded_nodes") | (false, _) => n.to_string(),
            (true, n) => format!("{n}_bits"),
        })
        .collect();

    let mut setups = setups.into_iter();
    let mut curves = Vec::with_capacity(spec.variants.len());
    for (v, variant) in spec.variants.iter().enumerate() {
        let mut curve = MetricCurve {
            label: variant.label.clone(),
            variable: spec.sweep.variable.name().to_string(),
            values: values.clone(),
            analytic: Vec::with_capacity(values.len()),
            mc_mean: spec.sim.map(|_| Vec::with_capacity(values.len())),
            mc_halfwidth: spec.sim.map(|_| Vec::with_capacity(values.len())),
            component_names: names.clone(),
            components: Vec::with_capacity(values.len()),
        };
        for (i, &x) in values.iter().enumerate() {
            let (setup, a, mut c) = setups.next().expect("one result per job")?;
            curve.analytic.push(a * scale);
            for (name, value) in component_names(spec.metric).iter().zip(c.iter_mut()) {
                if *name != "guarded_nodes" {
                    *value *= scale;
                }
            }
            curve.components.push(c);
            if let Some(plan) = &spec.sim {
                let plan = SimPlan { seed: point_seed(plan.seed, v, i), ..*plan };
                let m = setup.simulate(&plan).map_err(|e| grid_error(spec, i, x, e))?;
                let est = match spec.metric {
                    MetricKind::Outage => m.outage,
                    MetricKind::Ber => m.ber,
                    MetricKind::Capacity => m.capacity,
                };
                curve.mc_mean.as_mut().expect("sim").push(est.mean * scale);
                curve.mc_halfwidth.as_mut().expect("sim").push(est.half_width * scale);
            }
        }
        curves.push(curve);
    }
    Ok(curves)
}

use aoi_core::analytic::Evaluator;
use aoi_core::optimizer::{sweep_row, Optimizer};
use aoi_core::sim::{simulate, SimConfig};
use aoi_core::{Error, Protocol, ProtocolParams, TimingModel};
use serde::Serialize;

use crate::error::Result;
use crate::output::Row;
use crate::spec::ExperimentSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub protocol: Protocol,
    pub n: u32,
    pub k: u32,
    pub access_prob: f64,
    pub load: f64,
    pub avg_aoi: f64,
    pub avg_power: f64,
}

impl Row for ReportRow {
    const SCHEMA: &'static str = "report/v1";
    const COLUMNS: &'static [&'static str] = &["protocol", "n", "k", "access_prob", "load", "avg_aoi", "avg_power"];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub protocol: Protocol,
    pub n: u32,
    pub k: u32,
    pub access_prob: f64,
    pub load: f64,
    pub avg_aoi: f64,
    pub avg_power: f64,
}

impl Row for SweepRecord {
    const SCHEMA: &'static str = "sweep/v1";
    const COLUMNS: &'static [&'static str] = &["protocol", "n", "k", "access_prob", "load", "avg_aoi", "avg_power"];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontierRecord {
    pub protocol: Protocol,
    pub n: u32,
    pub k: u32,
    pub power_budget: f64,
    pub best_prob: f64,
    pub min_aoi: f64,
    pub binding: bool,
}

impl Row for FrontierRecord {
    const SCHEMA: &'static str = "frontier/v1";
    const COLUMNS: &'static [&'static str] = &["protocol", "n", "k", "power_budget", "best_prob", "min_aoi", "binding"];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimRecord {
    pub protocol: Protocol,
    pub n: u32,
    pub k: u32,
    pub access_prob: f64,
    pub seed: u64,
    pub rounds: u64,
    pub status: &'static str,
    pub n_updates: u64,
    pub mean_aoi: Option<f64>,
    pub aoi_ci_halfwidth: Option<f64>,
    pub mean_power: Option<f64>,
    pub power_ci_halfwidth: Option<f64>,
    pub mean_round_duration: f64,
}

impl Row for SimRecord {
    const SCHEMA: &'static str = "simulate/v1";
    const COLUMNS: &'static [&'static str] = &[
        "protocol",
        "n",
        "k",
        "access_prob",
        "seed",
        "rounds",
        "status",
        "n_updates",
        "mean_aoi",
        "aoi_ci_halfwidth",
        "mean_power",
        "power_ci_halfwidth",
        "mean_round_duration",
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidateRecord {
    pub protocol: Protocol,
    pub n: u32,
    pub k: u32,
    pub access_prob: f64,
    pub seed: u64,
    pub rounds: u64,
    pub status: &'static str,
    pub analytic_aoi: Option<f64>,
    pub sim_aoi: Option<f64>,
    pub aoi_ci_halfwidth: Option<f64>,
    pub analytic_power: Option<f64>,
    pub sim_power: Option<f64>,
    pub power_ci_halfwidth: Option<f64>,
    pub pass: bool,
}

impl Row for ValidateRecord {
    const SCHEMA: &'static str = "validate/v1";
    const COLUMNS: &'static [&'static str] = &[
        "protocol",
        "n",
        "k",
        "access_prob",
        "seed",
        "rounds",
        "status",
        "analytic_aoi",
        "sim_aoi",
        "aoi_ci_halfwidth",
        "analytic_power",
        "sim_power",
        "power_ci_halfwidth",
        "pass",
    ];
}

/// Acceptance band for a simulated mean.
pub fn agrees(sim: f64, analytic: f64, ci_halfwidth: f64) -> bool {
    (sim - analytic).abs() <= 4.0 * ci_halfwidth
}

pub(crate) fn evaluator(spec: &ExperimentSpec, protocol: Protocol, n: u32, timing: TimingModel) -> Result<Evaluator> {
    Ok(Evaluator::new(protocol, n, spec.k, timing, spec.tx_power)?)
}

/// The configured access probability, or the AoI-optimal one.
fn operating_point(spec: &ExperimentSpec, eval: &Evaluator) -> Result<f64> {
    match spec.access_prob {
        Some(p) => Ok(p),
        None => Ok(Optimizer::new(eval.clone())?.min_aoi_unconstrained().best_prob),
    }
}

fn cells(spec: &ExperimentSpec) -> impl Iterator<Item = (Protocol, u32)> + '_ {
    spec.protocols
        .iter()
        .flat_map(move |&p| spec.n.iter().map(move |&n| (p, n)))
}

pub fn report(spec: &ExperimentSpec) -> Result<Vec<ReportRow>> {
    let timing = spec.timing()?;
    cells(spec)
        .map(|(protocol, n)| {
            let eval = evaluator(spec, protocol, n, timing)?;
            let p = operating_point(spec, &eval)?;
            let r = eval.report(p)?;
            Ok(ReportRow {
                protocol,
                n,
                k: eval.k(),
                access_prob: p,
                load: r.load,
                avg_aoi: r.avg_aoi,
                avg_power: r.avg_power,
            })
        })
        .collect()
}

pub fn default_prob_grid() -> Vec<f64> {
    (1..100).map(|i| f64::from(i) / 100.0).collect()
}

pub fn default_budgets() -> Vec<f64> {
    (1..=100).map(|i| f64::from(i) * 0.005).collect()
}

pub fn sweep(spec: &ExperimentSpec) -> Result<Vec<SweepRecord>> {
    let timing = spec.timing()?;
    let grid = spec.prob_grid.clone().unwrap_or_else(default_prob_grid);
    let mut rows = Vec::new();
    for (protocol, n) in cells(spec) {
        let eval = evaluator(spec, protocol, n, timing)?;
        for &p in &grid {
            let r = sweep_row(&eval, p)?;
            rows.push(SweepRecord {
                protocol,
                n,
                k: eval.k(),
                access_prob: p,
                load: r.load,
                avg_aoi: r.avg_aoi,
                avg_power: r.avg_power,
            });
        }
    }
    Ok(rows)
}

pub fn frontier(spec: &ExperimentSpec) -> Result<Vec<FrontierRecord>> {
    let timing = spec.timing()?;
    let budgets = spec.budgets.clone().unwrap_or_else(default_budgets);
    let mut rows = Vec::new();
    for (protocol, n) in cells(spec) {
        let opt = Optimizer::new(evaluator(spec, protocol, n, timing)?)?;
        for p in opt.frontier(&budgets)? {
            rows.push(FrontierRecord {
                protocol,
                n,
                k: opt.evaluator().k(),
                power_budget: p.power_budget,
                best_prob: p.best_prob,
                min_aoi: p.min_aoi,
                binding: p.binding,
            });
        }
    }
    Ok(rows)
}

fn sim_config(spec: &ExperimentSpec, params: ProtocolParams, timing: TimingModel) -> SimConfig {
    let mut cfg = SimConfig::new(params, timing, spec.rounds, spec.seed);
    if let Some(w) = spec.warmup {
        cfg.warmup_rounds = w;
    }
    cfg.tracked_sensor = spec.tracked_sensor;
    cfg
}

pub fn simulate_rows(spec: &ExperimentSpec) -> Result<Vec<SimRecord>> {
    let timing = spec.timing()?;
    let mut rows = Vec::new();
    for (protocol, n) in cells(spec) {
        let eval = evaluator(spec, protocol, n, timing)?;
        let p = operating_point(spec, &eval)?;
        let params = ProtocolParams::new(protocol, n, p, spec.k)?.with_tx_power(spec.tx_power)?;
        let mut row = SimRecord {
            protocol,
            n,
            k: params.k,
            access_prob: p,
            seed: spec.seed,
            rounds: spec.rounds,
            status: "ok",
            n_updates: 0,
            mean_aoi: None,
            aoi_ci_halfwidth: None,
            mean_power: None,
            power_ci_halfwidth: None,
            mean_round_duration: 0.0,
        };
        match simulate(&sim_config(spec, params, timing)) {
            Ok(s) => {
                row.n_updates = s.n_updates;
                row.mean_aoi = Some(s.mean_aoi);
                row.aoi_ci_halfwidth = Some(s.aoi_ci_halfwidth);
                row.mean_power = Some(s.mean_power);
                row.power_ci_halfwidth = Some(s.power_ci_halfwidth);
                row.mean_round_duration = s.mean_round_duration;
            }
            Err(Error::NoUpdates { partial }) => {
                row.status = "no_updates";
                row.n_updates = partial.n_updates;
                row.mean_round_duration = partial.mean_round_duration;
            }
            Err(e) => return Err(e.into()),
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn validate(spec: &ExperimentSpec) -> Result<Vec<ValidateRecord>> {
    let timing = spec.timing()?;
    let sims = simulate_rows(spec)?;
    sims.into_iter()
        .map(|s| {
            let eval = evaluator(spec, s.protocol, s.n, timing)?;
            // an infinite analytic age has nothing to compare against
            let a = match eval.report(s.access_prob) {
                Ok(r) => Some(r),
                Err(Error::InfiniteAoi(_)) => None,
                Err(e) => return Err(e.into()),
            };
            let pass = match (a, s.mean_aoi, s.aoi_ci_halfwidth, s.mean_power, s.power_ci_halfwidth) {
                (Some(a), Some(aoi), Some(aci), Some(pw), Some(pci)) => {
                    agrees(aoi, a.avg_aoi, aci) && agrees(pw, a.avg_power, pci)
                }
                _ => false,
            };
            Ok(ValidateRecord {
                protocol: s.protocol,
                n: s.n,
                k: s.k,
                access_prob: s.access_prob,
                seed: s.seed,
                rounds: s.rounds,
                status: s.status,
                analytic_aoi: a.map(|r| r.avg_aoi),
                sim_aoi: s.mean_aoi,
                aoi_ci_halfwidth: s.aoi_ci_halfwidth,
                analytic_power: a.map(|r| r.avg_power),
                sim_power: s.mean_power,
                power_ci_halfwidth: s.power_ci_halfwidth,
                pass,
            })
        })
        .collect()
}

//! Named presets producing the data behind each standard figure.

use aoi_core::optimizer::{sweep_row, Optimizer};
use aoi_core::sim::{simulate, SimConfig};
use aoi_core::{Error, Protocol, ProtocolParams, TimingModel};
use serde::Serialize;

use crate::commands::{evaluator, FrontierRecord, SweepRecord};
use crate::error::Result;
use crate::output::{artifact, Artifact, Row};
use crate::spec::{ExperimentSpec, FigureName};

const N: u32 = 10;
const K: u32 = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AoiPoint {
    pub protocol: Protocol,
    pub source: &'static str,
    pub access_prob: f64,
    pub load: f64,
    pub avg_aoi: f64,
    pub ci_halfwidth: Option<f64>,
}

impl Row for AoiPoint {
    const SCHEMA: &'static str = "fig7-aoi/v1";
    const COLUMNS: &'static [&'static str] = &["protocol", "source", "access_prob", "load", "avg_aoi", "ci_halfwidth"];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerPoint {
    pub protocol: Protocol,
    pub source: &'static str,
    pub access_prob: f64,
    pub load: f64,
    pub avg_power: f64,
    pub ci_halfwidth: Option<f64>,
}

impl Row for PowerPoint {
    const SCHEMA: &'static str = "fig7-power/v1";
    const COLUMNS: &'static [&'static str] = &["protocol", "source", "access_prob", "load", "avg_power", "ci_halfwidth"];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PayloadFrontierRecord {
    pub payload_bytes: u32,
    pub t_pk: f64,
    pub t_r: f64,
    pub protocol: Protocol,
    pub n: u32,
    pub k: u32,
    pub power_budget: f64,
    pub best_prob: f64,
    pub min_aoi: f64,
    pub binding: bool,
}

impl Row for PayloadFrontierRecord {
    const SCHEMA: &'static str = "payload-frontier/v1";
    const COLUMNS: &'static [&'static str] = &[
        "payload_bytes",
        "t_pk",
        "t_r",
        "protocol",
        "n",
        "k",
        "power_budget",
        "best_prob",
        "min_aoi",
        "binding",
    ];
}

fn steps(step: f64, count: u32) -> Vec<f64> {
    (1..=count).map(|i| f64::from(i) * step).collect()
}

/// Preset parameters with everything but the PHY and run controls fixed.
fn preset(spec: &ExperimentSpec, protocols: &[Protocol]) -> ExperimentSpec {
    ExperimentSpec {
        protocols: protocols.to_vec(),
        n: vec![N],
        k: K,
        t_pk: None,
        t_r: None,
        access_prob: None,
        ..spec.clone()
    }
}

fn analytic_sweep(spec: &ExperimentSpec, timing: TimingModel, grid: &[f64]) -> Result<Vec<SweepRecord>> {
    let mut rows = Vec::new();
    for &protocol in &spec.protocols {
        let eval = evaluator(spec, protocol, N, timing)?;
        // SA with every sensor always sending never delivers
        for &p in grid.iter().filter(|&&p| !(protocol == Protocol::Sa && p >= 1.0)) {
            let r = sweep_row(&eval, p)?;
            rows.push(SweepRecord {
                protocol,
                n: N,
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

fn frontier_rows(
    spec: &ExperimentSpec,
    protocol: Protocol,
    n: u32,
    timing: TimingModel,
    budgets: &[f64],
) -> Result<Vec<FrontierRecord>> {
    let opt = Optimizer::new(evaluator(spec, protocol, n, timing)?)?;
    Ok(opt
        .frontier(budgets)?
        .into_iter()
        .map(|p| FrontierRecord {
            protocol,
            n,
            k: opt.evaluator().k(),
            power_budget: p.power_budget,
            best_prob: p.best_prob,
            min_aoi: p.min_aoi,
            binding: p.binding,
        })
        .collect())
}

fn fig4a(spec: &ExperimentSpec) -> Result<Vec<Artifact>> {
    let s = preset(spec, &[Protocol::Sa, Protocol::Fsa]);
    let rows = analytic_sweep(&s, TimingModel::normalized(), &steps(0.005, 200))?;
    Ok(vec![artifact("fig4a", &rows, "slot", spec.format)?])
}

fn fig4b(spec: &ExperimentSpec) -> Result<Vec<Artifact>> {
    let s = preset(spec, &[Protocol::Sa, Protocol::Fsa]);
    let budgets = steps(0.002, 100);
    let mut rows = Vec::new();
    for &protocol in &s.protocols {
        rows.extend(frontier_rows(&s, protocol, N, TimingModel::normalized(), &budgets)?);
    }
    Ok(vec![artifact("fig4b", &rows, "slot", spec.format)?])
}

fn sim_probs(protocol: Protocol) -> Vec<f64> {
    match protocol {
        Protocol::Sa => vec![0.02, 0.05, 0.1, 0.15, 0.2, 0.3],
        _ => steps(0.1, 10),
    }
}

fn fig7(spec: &ExperimentSpec) -> Result<Vec<Artifact>> {
    let s = preset(spec, &Protocol::ALL);
    let timing = TimingModel::from_phy(128, &s.phy)?;
    let mut aoi = Vec::new();
    let mut power = Vec::new();
    for r in analytic_sweep(&s, timing, &steps(0.005, 200))? {
        aoi.push(AoiPoint {
            protocol: r.protocol,
            source: "analytic",
            access_prob: r.access_prob,
            load: r.load,
            avg_aoi: r.avg_aoi,
            ci_halfwidth: None,
        });
        power.push(PowerPoint {
            protocol: r.protocol,
            source: "analytic",
            access_prob: r.access_prob,
            load: r.load,
            avg_power: r.avg_power,
            ci_halfwidth: None,
        });
    }
    let mut seed = s.seed;
    for &protocol in &s.protocols {
        let eval = evaluator(&s, protocol, N, timing)?;
        for p in sim_probs(protocol) {
            let params = ProtocolParams::new(protocol, N, p, K)?.with_tx_power(s.tx_power)?;
            let mut cfg = SimConfig::new(params, timing, s.rounds, seed);
            if let Some(w) = s.warmup {
                cfg.warmup_rounds = w;
            }
            seed = seed.wrapping_add(1);
            let load = eval.report(p)?.load;
            match simulate(&cfg) {
                Ok(st) => {
                    aoi.push(AoiPoint {
                        protocol,
                        source: "sim",
                        access_prob: p,
                        load,
                        avg_aoi: st.mean_aoi,
                        ci_halfwidth: Some(st.aoi_ci_halfwidth),
                    });
                    power.push(PowerPoint {
                        protocol,
                        source: "sim",
                        access_prob: p,
                        load,
                        avg_power: st.mean_power,
                        ci_halfwidth: Some(st.power_ci_halfwidth),
                    });
                }
                // too few deliveries to estimate: leave the marker out
                Err(Error::NoUpdates { .. }) => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(vec![
        artifact("fig7_aoi", &aoi, "us", spec.format)?,
        artifact("fig7_power", &power, "us", spec.format)?,
    ])
}

fn fig8(spec: &ExperimentSpec) -> Result<Vec<Artifact>> {
    let s = preset(spec, &Protocol::ALL);
    let timing = TimingModel::from_phy(128, &s.phy)?;
    let budgets = steps(0.002, 150);
    let mut rows = Vec::new();
    for &protocol in &s.protocols {
        rows.extend(frontier_rows(&s, protocol, N, timing, &budgets)?);
    }
    let mut inset = Vec::new();
    for k in [3, 5, 7, 9] {
        let sk = ExperimentSpec { k, ..s.clone() };
        inset.extend(frontier_rows(&sk, Protocol::Rta, N, timing, &budgets)?);
    }
    Ok(vec![
        artifact("fig8", &rows, "us", spec.format)?,
        artifact("fig8_k", &inset, "us", spec.format)?,
    ])
}

fn fig9(spec: &ExperimentSpec) -> Result<Vec<Artifact>> {
    let s = preset(spec, &Protocol::ALL);
    let timing = TimingModel::from_phy(128, &s.phy)?;
    let mut rows = Vec::new();
    for &protocol in &s.protocols {
        for n in 5..=30 {
            rows.extend(frontier_rows(&s, protocol, n, timing, &[0.03, 0.1])?);
        }
    }
    Ok(vec![artifact("fig9", &rows, "us", spec.format)?])
}

fn fig10(spec: &ExperimentSpec) -> Result<Vec<Artifact>> {
    let s = preset(spec, &Protocol::ALL);
    let budgets = steps(0.002, 150);
    let mut rows = Vec::new();
    for payload in [16, 64, 128] {
        let timing = TimingModel::from_phy(payload, &s.phy)?;
        for &protocol in &s.protocols {
            for p in frontier_rows(&s, protocol, N, timing, &budgets)? {
                rows.push(PayloadFrontierRecord {
                    payload_bytes: payload,
                    t_pk: timing.t_pk,
                    t_r: timing.t_r,
                    protocol,
                    n: p.n,
                    k: p.k,
                    power_budget: p.power_budget,
                    best_prob: p.best_prob,
                    min_aoi: p.min_aoi,
                    binding: p.binding,
                });
            }
        }
    }
    Ok(vec![artifact("fig10", &rows, "us", spec.format)?])
}

pub fn render(spec: &ExperimentSpec, name: FigureName) -> Result<Vec<Artifact>> {
    match name {
        FigureName::Fig4a => fig4a(spec),
        FigureName::Fig4b => fig4b(spec),
        FigureName::Fig7 => fig7(spec),
        FigureName::Fig8 => fig8(spec),
        FigureName::Fig9 => fig9(spec),
        FigureName::Fig10 => fig10(spec),
    }
}

//! Seeded Monte Carlo simulation under the collision model, and exact
//! enumeration of the RTA request phase for small networks.
//!
//! The simulator advances round by round. Only the tracked sensor's age is
//! integrated: it restarts from `t_pk` at the end of each of its delivered
//! packets (generate-at-will), so every renewal interval `Z` between two
//! deliveries contributes an area of `t_pk Z + Z²/2`.

mod enumerate;
mod round;
pub mod rng;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

pub use enumerate::{enumerate_occupancy, enumerate_request_phase, RequestCondition, ENUMERATION_LIMIT};
pub use round::{simulate_rta_round, RoundOutcome, RoundState};

use crate::error::{Error, Result};
use crate::model::{ProtocolParams, TimingModel};

pub const DEFAULT_BATCHES: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub params: ProtocolParams,
    pub timing: TimingModel,
    /// Total rounds simulated, warmup included.
    pub horizon_rounds: u64,
    pub warmup_rounds: u64,
    pub seed: u64,
    pub tracked_sensor: u32,
    /// Number of batch means behind the confidence intervals.
    pub batches: u32,
}

impl SimConfig {
    pub fn new(params: ProtocolParams, timing: TimingModel, horizon_rounds: u64, seed: u64) -> Self {
        SimConfig {
            params,
            timing,
            horizon_rounds,
            warmup_rounds: horizon_rounds / 100,
            seed,
            tracked_sensor: 0,
            batches: DEFAULT_BATCHES,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.horizon_rounds <= self.warmup_rounds {
            return Err(Error::InvalidConfig(
                "horizon_rounds must exceed warmup_rounds".into(),
            ));
        }
        if self.tracked_sensor >= self.params.n_sensors {
            return Err(Error::InvalidConfig(format!(
                "tracked sensor {} does not exist among {} sensors",
                self.tracked_sensor, self.params.n_sensors
            )));
        }
        if self.batches < 2 {
            return Err(Error::InvalidConfig("at least two batches are required".into()));
        }
        if self.params.access_prob == 0.0 {
            return Err(Error::InfiniteAoi("access probability is zero"));
        }
        Ok(())
    }
}

/// Time averages over the observed renewal intervals. Confidence half-widths
/// are 95% Student-t intervals over non-overlapping batch means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AoIStats {
    pub mean_aoi: f64,
    pub aoi_ci_halfwidth: f64,
    pub mean_power: f64,
    pub power_ci_halfwidth: f64,
    /// Mean renewal interval `E[Z]`.
    pub mean_interval: f64,
    pub interval_ci_halfwidth: f64,
    /// Deliveries of the tracked sensor after warmup.
    pub n_updates: u64,
    pub batches: u32,
    pub mean_round_duration: f64,
    pub elapsed_sim_time: f64,
}

/// Whatever could be measured when too few updates were seen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartialStats {
    pub n_updates: u64,
    pub rounds: u64,
    pub mean_round_duration: f64,
    pub elapsed_sim_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Renewal {
    interval: f64,
    area: f64,
    energy: f64,
}

/// Exact area accounting for a saw-tooth age process that drops to `t_pk` at each update.
#[derive(Debug, Clone)]
pub struct AoiIntegrator {
    t_pk: f64,
    last_update: Option<f64>,
    energy: f64,
    renewals: Vec<Renewal>,
}

impl AoiIntegrator {
    pub fn new(t_pk: f64) -> Self {
        AoiIntegrator {
            t_pk,
            last_update: None,
            energy: 0.0,
            renewals: Vec::new(),
        }
    }

    /// Energy spent before the first update is discarded.
    pub fn add_energy(&mut self, energy: f64) {
        if self.last_update.is_some() {
            self.energy += energy;
        }
    }

    pub fn record_update(&mut self, at: f64) {
        if let Some(prev) = self.last_update {
            let z = at - prev;
            self.renewals.push(Renewal {
                interval: z,
                area: self.t_pk * z + 0.5 * z * z,
                energy: self.energy,
            });
        }
        self.last_update = Some(at);
        self.energy = 0.0;
    }

    pub fn renewals(&self) -> usize {
        self.renewals.len()
    }

    /// Integral of the age between the first and the last update.
    pub fn area(&self) -> f64 {
        self.renewals.iter().map(|r| r.area).sum()
    }

    pub fn observed_time(&self) -> f64 {
        self.renewals.iter().map(|r| r.interval).sum()
    }
}

/// Half-width of the 95% interval for the mean of `values`.
fn ci_halfwidth(values: &[f64]) -> f64 {
    let b = values.len() as f64;
    let mean = values.iter().sum::<f64>() / b;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b - 1.0);
    let t = StudentsT::new(0.0, 1.0, b - 1.0)
        .expect("at least two batches")
        .inverse_cdf(0.975);
    t * (var / b).sqrt()
}

pub fn simulate(config: &SimConfig) -> Result<AoIStats> {
    config.validate()?;
    let mut state = RoundState::new(
        config.params,
        config.timing,
        config.seed,
        config.tracked_sensor as usize,
    );
    let mut integrator = AoiIntegrator::new(config.timing.t_pk);
    let mut now = 0.0;
    let mut measured_time = 0.0;
    let mut n_updates = 0u64;
    let power = config.params.tx_power;

    for round in 0..config.horizon_rounds {
        let out = state.simulate_round();
        if round >= config.warmup_rounds {
            // the tracked sensor transmits nothing after its own packet, so the
            // whole round's energy belongs to the interval it closes
            integrator.add_energy(out.tracked_airtime * power);
            if let Some(offset) = out.tracked_update_at {
                integrator.record_update(now + offset);
                n_updates += 1;
            }
            measured_time += out.duration;
        }
        now += out.duration;
    }

    let rounds = config.horizon_rounds - config.warmup_rounds;
    let mean_round_duration = measured_time / rounds as f64;
    let n = integrator.renewals.len();
    if n < 2 {
        return Err(Error::NoUpdates {
            partial: Box::new(PartialStats {
                n_updates,
                rounds,
                mean_round_duration,
                elapsed_sim_time: measured_time,
            }),
        });
    }

    let batches = (config.batches as usize).min(n);
    let mut aoi = Vec::with_capacity(batches);
    let mut pow = Vec::with_capacity(batches);
    let mut interval = Vec::with_capacity(batches);
    for b in 0..batches {
        let chunk = &integrator.renewals[b * n / batches..(b + 1) * n / batches];
        let time: f64 = chunk.iter().map(|r| r.interval).sum();
        aoi.push(chunk.iter().map(|r| r.area).sum::<f64>() / time);
        pow.push(chunk.iter().map(|r| r.energy).sum::<f64>() / time);
        interval.push(time / chunk.len() as f64);
    }

    let total_time = integrator.observed_time();
    let total_energy: f64 = integrator.renewals.iter().map(|r| r.energy).sum();
    Ok(AoIStats {
        mean_aoi: integrator.area() / total_time,
        aoi_ci_halfwidth: ci_halfwidth(&aoi),
        mean_power: total_energy / total_time,
        power_ci_halfwidth: ci_halfwidth(&pow),
        mean_interval: total_time / n as f64,
        interval_ci_halfwidth: ci_halfwidth(&interval),
        n_updates,
        batches: batches as u32,
        mean_round_duration,
        elapsed_sim_time: measured_time,
    })
}

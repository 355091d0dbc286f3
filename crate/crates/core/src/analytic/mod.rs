//! Closed-form average AoI, average transmit power and system load.
//!
//! Every protocol is analysed through the renewal intervals `Z` between two
//! consecutive successful updates of one tagged sensor `u`. With the area
//! under the saw-tooth age curve over an interval equal to `t_pk Z + Z²/2`,
//! the time-average age is `t_pk + E[Z²] / (2 E[Z])`.

mod occupancy;
mod pmf;
mod rta;

use serde::Serialize;

pub use occupancy::{
    occupancy_exactly_one, occupancy_exactly_one_exact, singleton_box_count, OccupancyTable,
};
pub use pmf::{binomial_pmf, Pmf};
pub use rta::{
    rta_d_pmf, rta_mf_pmf, rta_mf_pmf_unconditioned, rta_moments, rta_ms_pmf, rta_report,
    RtaModel, RtaMoments,
};

use crate::error::{check_positive, check_prob, Error, Result};
use crate::model::{Protocol, ProtocolParams, TimingModel};

/// Mean AoI (µs), mean transmit power (units of `P`) and load (packets or requests per µs).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtocolReport {
    pub avg_aoi: f64,
    pub avg_power: f64,
    pub load: f64,
}

/// First two moments of the renewal interval `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RenewalMoments {
    pub mean: f64,
    pub second_moment: f64,
}

impl RenewalMoments {
    pub fn avg_aoi(&self, t_pk: f64) -> f64 {
        t_pk + self.second_moment / (2.0 * self.mean)
    }
}

/// Mean and second moment of a geometric variable on `1, 2, ...` with success probability `p`.
pub fn geometric_moments(p: f64) -> Result<(f64, f64)> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain {
            name: "success probability",
            value: p,
            expected: "0 < p <= 1",
        });
    }
    Ok((1.0 / p, (2.0 - p) / (p * p)))
}

fn success_or_infinite(p: f64) -> Result<f64> {
    if p > 0.0 {
        Ok(p)
    } else {
        Err(Error::InfiniteAoi("the tagged sensor never succeeds"))
    }
}

/// Slotted Aloha with per-slot transmit probability `q`.
pub fn sa_report(q: f64, n: u32, t_pk: f64, power: f64) -> Result<ProtocolReport> {
    check_prob("q", q)?;
    check_sizes(n, 1)?;
    check_positive("t_pk", t_pk)?;
    check_positive("power", power)?;
    if q == 0.0 {
        return Err(Error::InfiniteAoi("q = 0: no sensor ever transmits"));
    }
    let success = success_or_infinite(q * (1.0 - q).powi(n as i32 - 1))?;
    Ok(ProtocolReport {
        avg_aoi: (0.5 + 1.0 / success) * t_pk,
        avg_power: q * power,
        load: q * f64::from(n) / t_pk,
    })
}

/// Probability that the tagged sensor transmits in a frame and nobody else picks its slot.
pub fn fsa_success_prob(omega: f64, n: u32, k: u32) -> Result<f64> {
    check_prob("omega", omega)?;
    check_sizes(n, k)?;
    Ok(omega * (1.0 - omega / f64::from(k)).powi(n as i32 - 1))
}

/// Frame slotted Aloha: each frame has `k` slots of length `t_pk`, and every
/// sensor sends once per frame with probability `omega` in a uniform slot.
pub fn fsa_report(omega: f64, n: u32, k: u32, t_pk: f64, power: f64) -> Result<ProtocolReport> {
    check_positive("t_pk", t_pk)?;
    check_positive("power", power)?;
    let p = fsa_success_prob(omega, n, k)?;
    if omega == 0.0 {
        return Err(Error::InfiniteAoi("omega = 0: no sensor ever transmits"));
    }
    let p = success_or_infinite(p)?;
    let kf = f64::from(k);
    let avg_aoi = t_pk + kf * t_pk * (2.0 - p) / (2.0 * p) + t_pk * p * (kf * kf - 1.0) / (12.0 * kf);
    Ok(ProtocolReport {
        avg_aoi,
        avg_power: omega * power / kf,
        load: omega * f64::from(n) / (kf * t_pk),
    })
}

/// Mean and second moment of the tagged sensor's slot index, uniform on `1..=k`.
fn uniform_slot_moments(k: u32) -> (f64, f64) {
    let kf = f64::from(k);
    ((kf + 1.0) / 2.0, (kf + 1.0) * (2.0 * kf + 1.0) / 6.0)
}

/// Renewal-interval moments `E[Z]`, `E[Z²]` for any protocol.
pub fn renewal_moments(params: &ProtocolParams, timing: &TimingModel) -> Result<RenewalMoments> {
    params.validate()?;
    let ProtocolParams {
        protocol,
        n_sensors: n,
        access_prob: prob,
        k,
        ..
    } = *params;
    if prob == 0.0 {
        return Err(Error::InfiniteAoi("access probability is zero"));
    }
    let t = timing.t_pk;
    match protocol {
        Protocol::Sa | Protocol::Fsa => {
            let (ex, ex2) = geometric_moments(success_or_infinite(fsa_success_prob(prob, n, k)?)?)?;
            let (ed, ed2) = uniform_slot_moments(k);
            let frame = f64::from(k) * t;
            Ok(RenewalMoments {
                mean: frame * ex,
                second_moment: frame * frame * ex2 + 2.0 * (ed2 - ed * ed) * t * t,
            })
        }
        Protocol::Rta => Ok(RtaModel::new(n, k)?.moments(prob, timing)?.renewal()),
    }
}

fn check_sizes(n: u32, k: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidConfig("at least one sensor is required".into()));
    }
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    Ok(())
}

/// Analytic evaluation of one protocol at varying access probability, with
/// any probability-independent tables computed once.
#[derive(Debug, Clone)]
pub struct Evaluator {
    protocol: Protocol,
    n: u32,
    k: u32,
    timing: TimingModel,
    power: f64,
    rta: Option<RtaModel>,
}

impl Evaluator {
    pub fn new(protocol: Protocol, n: u32, k: u32, timing: TimingModel, power: f64) -> Result<Self> {
        let k = protocol.effective_k(k);
        check_sizes(n, k)?;
        check_positive("power", power)?;
        let rta = match protocol {
            Protocol::Rta => Some(RtaModel::new(n, k)?),
            _ => None,
        };
        Ok(Evaluator {
            protocol,
            n,
            k,
            timing,
            power,
            rta,
        })
    }

    pub fn protocol(&self) -> Protocol {
        self.protocol
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn timing(&self) -> TimingModel {
        self.timing
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn report(&self, prob: f64) -> Result<ProtocolReport> {
        let t = self.timing.t_pk;
        match (self.protocol, &self.rta) {
            (Protocol::Sa, _) => sa_report(prob, self.n, t, self.power),
            (Protocol::Fsa, _) => fsa_report(prob, self.n, self.k, t, self.power),
            (Protocol::Rta, Some(model)) => model.report(prob, &self.timing, self.power),
            (Protocol::Rta, None) => unreachable!("RTA evaluator always carries its model"),
        }
    }

    pub fn renewal(&self, prob: f64) -> Result<RenewalMoments> {
        match &self.rta {
            Some(model) => Ok(model.moments(prob, &self.timing)?.renewal()),
            None => renewal_moments(
                &ProtocolParams::new(self.protocol, self.n, prob, self.k)?,
                &self.timing,
            ),
        }
    }
}

/// Analytic report for one operating point.
pub fn report(params: &ProtocolParams, timing: &TimingModel) -> Result<ProtocolReport> {
    params.validate()?;
    Evaluator::new(params.protocol, params.n_sensors, params.k, *timing, params.tx_power)?
        .report(params.access_prob)
}

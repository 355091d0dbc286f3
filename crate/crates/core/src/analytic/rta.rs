//! Request-then-access.
//!
//! A round is `k` request slots of length `t_r`, then one packet slot of
//! length `t_pk` for every sensor whose request landed alone in its slot, in
//! random order. From the tagged sensor `u`'s point of view a round either
//! fails (`Θ_F = k t_r + M_F t_pk`) or succeeds (`Θ_S = k t_r + M_S t_pk`),
//! with `u` sending at position `D` of the access phase.

use serde::Serialize;

use super::occupancy::OccupancyTable;
use super::pmf::{binomial_pmf, ln_factorials, ln_pow, Pmf};
use super::{geometric_moments, ProtocolReport, RenewalMoments};
use crate::error::{check_positive, check_prob, Error, Result};
use crate::model::TimingModel;

/// Moments of the round durations, of the number of rounds `X` between updates
/// and of the tagged sensor's access position `D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RtaMoments {
    pub e_theta_f: f64,
    pub e_theta_f2: f64,
    pub e_theta_s: f64,
    pub e_theta_s2: f64,
    pub e_x: f64,
    pub e_x2: f64,
    pub e_d: f64,
    pub e_d2: f64,
    pub p_success: f64,
    pub t_pk: f64,
}

impl RtaMoments {
    /// `E[Z]` and `E[Z²]` for `Z = Θ_F¹ + … + Θ_F^{X-1} + Θ_S + (Dʲ − Dʲ⁻¹) t_pk`,
    /// with all the summands taken as independent.
    pub fn renewal(&self) -> RenewalMoments {
        let fails = self.e_x - 1.0;
        let mean = fails * self.e_theta_f + self.e_theta_s;
        let second_moment = fails * self.e_theta_f2
            + (self.e_x2 - 3.0 * self.e_x + 2.0) * self.e_theta_f.powi(2)
            + self.e_theta_s2
            + 2.0 * fails * self.e_theta_f * self.e_theta_s
            + 2.0 * (self.e_d2 - self.e_d.powi(2)) * self.t_pk.powi(2);
        RenewalMoments {
            mean,
            second_moment,
        }
    }
}

/// Probability-independent state for one `(N, k)`: the occupancy tables over
/// `k` and `k - 1` boxes for up to `N - 1` other sensors.
#[derive(Debug, Clone)]
pub struct RtaModel {
    n: u32,
    k: u32,
    over_k: OccupancyTable,
    over_k_minus_1: OccupancyTable,
    ln_fact: Vec<f64>,
}

impl RtaModel {
    pub fn new(n: u32, k: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("at least one sensor is required".into()));
        }
        if k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        let others = n - 1;
        Ok(RtaModel {
            n,
            k,
            over_k: OccupancyTable::new(k, others),
            over_k_minus_1: OccupancyTable::new(k - 1, others),
            ln_fact: ln_factorials(others as usize),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    fn others(&self) -> usize {
        (self.n - 1) as usize
    }

    fn kf(&self) -> f64 {
        f64::from(self.k)
    }

    fn ln_choose(&self, n: usize, r: usize) -> f64 {
        self.ln_fact[n] - self.ln_fact[r] - self.ln_fact[n - r]
    }

    /// `(1 - π/k)^(N-1)`: nobody else picks `u`'s request slot.
    fn alone_prob(&self, pi: f64) -> f64 {
        (1.0 - pi / self.kf()).powi(self.others() as i32)
    }

    /// `Pr(S) = π (1 - π/k)^(N-1)`.
    pub fn success_prob(&self, pi: f64) -> Result<f64> {
        check_prob("pi", pi)?;
        Ok(pi * self.alone_prob(pi))
    }

    /// `Pr(A = α) · Π(m, α, k)` summed over α: singletons among the others
    /// when `u` stays silent, not yet weighted by `Pr(u silent)`.
    fn silent_branch(&self, pi: f64, m: usize) -> f64 {
        binomial_pmf(self.others() as u32, pi)
            .iter()
            .enumerate()
            .map(|(a, w)| w * self.over_k.get(m, a))
            .sum()
    }

    /// PMF of the number of admitted sensors `M_F` in a round where `u` does
    /// not get through, conditioned on that failure.
    ///
    /// The failure is either `u` staying silent (every other sensor then
    /// spreads over all `k` slots) or `u` requesting alongside at least one
    /// other sensor in the same slot (the `Φ` sensors elsewhere spread over
    /// `k - 1` slots).
    pub fn mf_pmf(&self, pi: f64) -> Result<Pmf> {
        check_prob("pi", pi)?;
        let p_fail = 1.0 - self.success_prob(pi)?;
        if p_fail <= 0.0 {
            return Err(Error::NullEvent("the tagged sensor always succeeds"));
        }
        let r = self.others();
        if r == 0 {
            return Ok(Pmf::point_mass(0));
        }
        let kf = self.kf();
        // each other sensor: silent 1-π, in u's slot π/k, elsewhere π(1-1/k)
        let elsewhere = pi * (1.0 - 1.0 / kf);
        let collide_weights: Vec<f64> = (0..=r)
            .map(|phi| {
                let rest = r - phi;
                if rest == 0 {
                    return 0.0;
                }
                // Pr(rest are silent or in u's slot, not all silent)
                let ln_tail = if pi >= 1.0 {
                    rest as f64 * (1.0 / kf).ln()
                } else {
                    let x = (pi / kf) / (1.0 - pi);
                    rest as f64 * (-pi).ln_1p() + (rest as f64 * x.ln_1p()).exp_m1().ln()
                };
                (self.ln_choose(r, phi) + ln_pow(elsewhere, phi) + ln_tail).exp()
            })
            .collect();

        let top = (self.k as usize).min(r);
        let probs = (0..=top)
            .map(|m| {
                let silent = (1.0 - pi) * self.silent_branch(pi, m);
                let collided: f64 = collide_weights
                    .iter()
                    .enumerate()
                    .map(|(phi, w)| w * self.over_k_minus_1.get(m, phi))
                    .sum();
                (silent + pi * collided) / p_fail
            })
            .collect();
        Pmf::new(0, probs)
    }

    /// The two-branch mixture for `M_F` weighted by the unconditional
    /// `Pr(u silent)` and `Pr(u requests)`, with `Φ_α ~ Binomial(α, 1 - 1/k)`
    /// unrestricted.
    ///
    /// This is the distribution of the number of *other* admitted sensors with
    /// no conditioning on `u`'s outcome; it equals
    /// `Pr(S̄)·Pr(M_F = m) + Pr(S)·Pr(M_S = m + 1)`. Kept for comparison with
    /// [`RtaModel::mf_pmf`].
    pub fn mf_pmf_unconditioned(&self, pi: f64) -> Result<Pmf> {
        check_prob("pi", pi)?;
        let r = self.others();
        let requests = binomial_pmf(r as u32, pi);
        let top = (self.k as usize).min(r);
        let avoid = 1.0 - 1.0 / self.kf();
        let spread: Vec<Vec<f64>> = (0..=r).map(|a| binomial_pmf(a as u32, avoid)).collect();
        let probs = (0..=top)
            .map(|m| {
                let silent = (1.0 - pi) * self.silent_branch(pi, m);
                let sent: f64 = (m..=r)
                    .map(|a| {
                        let inner: f64 = (m..=a)
                            .map(|phi| self.over_k_minus_1.get(m, phi) * spread[a][phi])
                            .sum();
                        inner * requests[a]
                    })
                    .sum();
                silent + pi * sent
            })
            .collect();
        Pmf::new(0, probs)
    }

    /// PMF of the number of admitted sensors `M_S` in a round where `u` gets
    /// through. Support `1 ..= 1 + min(k - 1, N - 1)`.
    pub fn ms_pmf(&self, pi: f64) -> Result<Pmf> {
        check_prob("pi", pi)?;
        let p_success = self.success_prob(pi)?;
        if p_success <= 0.0 {
            return Err(Error::NullEvent("the tagged sensor never succeeds"));
        }
        let r = self.others();
        let kf = self.kf();
        // Pr(A = α | S) ∝ (1 - 1/k)^α C(r, α) π^α (1-π)^(r-α); normalised by
        // Pr(S)/π this is Binomial(r, π(1 - 1/k) / (1 - π/k)).
        let q = if r == 0 { 0.0 } else { pi * (1.0 - 1.0 / kf) / (1.0 - pi / kf) };
        let admitted_others = binomial_pmf(r as u32, q);
        let top = (self.k as usize - 1).min(r);
        let probs = (0..=top)
            .map(|m| {
                admitted_others
                    .iter()
                    .enumerate()
                    .map(|(a, w)| w * self.over_k_minus_1.get(m, a))
                    .sum()
            })
            .collect();
        Pmf::new(1, probs)
    }

    /// PMF of `u`'s position `D` in the access phase of a successful round.
    pub fn d_pmf(&self, pi: f64) -> Result<Pmf> {
        let ms = self.ms_pmf(pi)?;
        let top = ms.max_value();
        let probs = (1..=top)
            .map(|d| (d..=top).map(|m| ms.prob(m) / m as f64).sum())
            .collect();
        Pmf::new(1, probs)
    }

    pub fn moments(&self, pi: f64, timing: &TimingModel) -> Result<RtaMoments> {
        check_prob("pi", pi)?;
        let p_success = self.success_prob(pi)?;
        if p_success <= 0.0 {
            return Err(Error::InfiniteAoi("the tagged sensor never succeeds"));
        }
        let (e_x, e_x2) = geometric_moments(p_success)?;
        // with Pr(S) = 1 there are no failed rounds and Θ_F carries no weight
        let mf = if p_success < 1.0 {
            self.mf_pmf(pi)?
        } else {
            Pmf::point_mass(0)
        };
        let ms = self.ms_pmf(pi)?;
        let d = self.d_pmf(pi)?;
        let request_phase = self.kf() * timing.t_r;
        let t = timing.t_pk;
        let (e_theta_f, e_theta_f2) = round_moments(request_phase, t, &mf);
        let (e_theta_s, e_theta_s2) = round_moments(request_phase, t, &ms);
        Ok(RtaMoments {
            e_theta_f,
            e_theta_f2,
            e_theta_s,
            e_theta_s2,
            e_x,
            e_x2,
            e_d: d.mean(),
            e_d2: d.second_moment(),
            p_success,
            t_pk: t,
        })
    }

    pub fn report(&self, pi: f64, timing: &TimingModel, power: f64) -> Result<ProtocolReport> {
        check_positive("power", power)?;
        if pi == 0.0 {
            return Err(Error::InfiniteAoi("pi = 0: no sensor ever requests"));
        }
        let m = self.moments(pi, timing)?;
        let z = m.renewal();
        let fails = m.e_x - 1.0;
        // a request is sent in a failed round with probability Pr(Ω | S̄)
        let request_given_fail = if fails > 0.0 {
            let s = self.alone_prob(pi);
            (pi - pi * s) / (1.0 - pi * s)
        } else {
            0.0
        };
        let energy = request_given_fail * fails * timing.t_r + (timing.t_r + timing.t_pk);
        let round = m.e_theta_s * m.p_success + m.e_theta_f * (1.0 - m.p_success);
        Ok(ProtocolReport {
            avg_aoi: z.avg_aoi(timing.t_pk),
            avg_power: energy / z.mean * power,
            load: f64::from(self.n) * pi / round,
        })
    }
}

/// `E[c + M t]` and `E[(c + M t)²]`.
fn round_moments(request_phase: f64, t_pk: f64, admitted: &Pmf) -> (f64, f64) {
    let em = admitted.mean();
    let em2 = admitted.second_moment();
    (
        request_phase + em * t_pk,
        request_phase.powi(2) + t_pk.powi(2) * em2 + 2.0 * request_phase * t_pk * em,
    )
}

pub fn rta_mf_pmf(pi: f64, n: u32, k: u32) -> Result<Pmf> {
    RtaModel::new(n, k)?.mf_pmf(pi)
}

pub fn rta_mf_pmf_unconditioned(pi: f64, n: u32, k: u32) -> Result<Pmf> {
    RtaModel::new(n, k)?.mf_pmf_unconditioned(pi)
}

pub fn rta_ms_pmf(pi: f64, n: u32, k: u32) -> Result<Pmf> {
    RtaModel::new(n, k)?.ms_pmf(pi)
}

pub fn rta_d_pmf(pi: f64, n: u32, k: u32) -> Result<Pmf> {
    RtaModel::new(n, k)?.d_pmf(pi)
}

pub fn rta_moments(pi: f64, n: u32, k: u32, timing: &TimingModel) -> Result<RtaMoments> {
    RtaModel::new(n, k)?.moments(pi, timing)
}

pub fn rta_report(pi: f64, n: u32, k: u32, timing: &TimingModel, power: f64) -> Result<ProtocolReport> {
    RtaModel::new(n, k)?.report(pi, timing, power)
}

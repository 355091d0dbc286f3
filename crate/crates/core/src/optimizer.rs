//! Access probabilities minimising the analytic average AoI, with and without
//! a cap on the average transmit power.
//!
//! Every search starts from a dense uniform grid over `(0, 1]` (cached per
//! optimizer) and refines the best candidates: golden-section search around
//! interior minima and bisection on the edges of the feasible set. The grid
//! scan means no unimodality or monotonicity of the power curve is assumed.

use serde::Serialize;

use crate::analytic::{Evaluator, ProtocolReport};
use crate::error::{Error, Result};
use crate::model::{Protocol, TimingModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSettings {
    pub grid_points: usize,
    /// Width of the final refinement bracket, in probability.
    pub tol: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings {
            grid_points: 10_000,
            tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Optimum {
    pub best_prob: f64,
    pub min_aoi: f64,
    pub avg_power: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontierPoint {
    pub power_budget: f64,
    pub best_prob: f64,
    pub min_aoi: f64,
    /// True when the budget excludes the unconstrained optimum.
    pub binding: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub access_prob: f64,
    pub load: f64,
    pub avg_aoi: f64,
    pub avg_power: f64,
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    prob: f64,
    aoi: f64,
    power: f64,
}

#[derive(Debug, Clone)]
pub struct Optimizer {
    eval: Evaluator,
    settings: OptimizerSettings,
    grid: Vec<Sample>,
    unconstrained: Optimum,
}

impl Optimizer {
    pub fn new(eval: Evaluator) -> Result<Self> {
        Self::with_settings(eval, OptimizerSettings::default())
    }

    pub fn with_settings(eval: Evaluator, settings: OptimizerSettings) -> Result<Self> {
        if settings.grid_points < 2 || settings.tol.is_nan() || settings.tol <= 0.0 {
            return Err(Error::InvalidConfig(
                "optimizer needs at least two grid points and a positive tolerance".into(),
            ));
        }
        let g = settings.grid_points;
        let mut opt = Optimizer {
            eval,
            settings,
            grid: Vec::with_capacity(g),
            unconstrained: Optimum {
                best_prob: 1.0,
                min_aoi: f64::INFINITY,
                avg_power: 0.0,
            },
        };
        opt.grid = (1..=g).map(|i| opt.sample(i as f64 / g as f64)).collect();
        opt.unconstrained = opt.search_unconstrained();
        Ok(opt)
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.eval
    }

    /// Points where the average age is infinite evaluate to `+inf`.
    fn sample(&self, prob: f64) -> Sample {
        match self.eval.report(prob) {
            Ok(r) => Sample {
                prob,
                aoi: r.avg_aoi,
                power: r.avg_power,
            },
            Err(_) => Sample {
                prob,
                aoi: f64::INFINITY,
                power: f64::INFINITY,
            },
        }
    }

    /// Golden-section search for a minimum inside `(lo, hi)`; equal values keep the left part.
    fn golden(&self, mut lo: f64, mut hi: f64, feasible: impl Fn(&Sample) -> bool) -> Option<Sample> {
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        let objective = |s: &Sample| if feasible(s) { s.aoi } else { f64::INFINITY };
        let mut c = self.sample(hi - INV_PHI * (hi - lo));
        let mut d = self.sample(lo + INV_PHI * (hi - lo));
        while hi - lo > self.settings.tol {
            if objective(&c) <= objective(&d) {
                hi = d.prob;
                d = c;
                c = self.sample(hi - INV_PHI * (hi - lo));
            } else {
                lo = c.prob;
                c = d;
                d = self.sample(lo + INV_PHI * (hi - lo));
            }
        }
        let best = if objective(&c) <= objective(&d) { c } else { d };
        objective(&best).is_finite().then_some(best)
    }

    fn neighbours(&self, i: usize) -> (f64, f64) {
        let lo = if i == 0 { 0.0 } else { self.grid[i - 1].prob };
        let hi = self.grid.get(i + 1).map_or(1.0, |s| s.prob);
        (lo, hi)
    }

    fn search_unconstrained(&self) -> Optimum {
        let mut best = self.grid[0];
        let mut best_i = 0;
        for (i, s) in self.grid.iter().enumerate() {
            if s.aoi < best.aoi {
                best = *s;
                best_i = i;
            }
        }
        let (lo, hi) = self.neighbours(best_i);
        if let Some(refined) = self.golden(lo, hi, |_| true) {
            if refined.aoi < best.aoi {
                best = refined;
            }
        }
        Optimum {
            best_prob: best.prob,
            min_aoi: best.aoi,
            avg_power: best.power,
        }
    }

    pub fn min_aoi_unconstrained(&self) -> Optimum {
        self.unconstrained
    }

    /// Largest probability in `(lo, hi)` within the budget, given `lo` feasible and `hi` not.
    fn boundary(&self, budget: f64, mut lo: f64, mut hi: f64) -> Option<Sample> {
        if self.eval.protocol() != Protocol::Rta {
            // power is linear in the access probability
            let slope = self.eval.power() / f64::from(self.eval.k());
            let cap = (budget / slope).min(1.0);
            let s = self.sample(cap);
            return (s.power <= budget).then_some(s);
        }
        while hi - lo > 1e-15 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sample(mid).power <= budget {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo > 0.0).then(|| self.sample(lo))
    }

    pub fn min_aoi_given_power(&self, budget: f64) -> Result<FrontierPoint> {
        if budget.is_nan() || budget <= 0.0 || budget.is_infinite() {
            return Err(Error::Infeasible { budget });
        }
        let free = self.unconstrained;
        if free.avg_power <= budget {
            return Ok(FrontierPoint {
                power_budget: budget,
                best_prob: free.best_prob,
                min_aoi: free.min_aoi,
                binding: false,
            });
        }

        let ok = |s: &Sample| s.power <= budget;
        let mut candidates: Vec<Sample> = Vec::new();
        let mut best_grid: Option<usize> = None;
        // probability 0 spends nothing, so the scan starts feasible
        let mut prev_ok = true;
        let mut prev_prob = 0.0;
        for (i, s) in self.grid.iter().enumerate() {
            let now_ok = ok(s);
            if now_ok {
                if best_grid.is_none_or(|b| s.aoi < self.grid[b].aoi) {
                    best_grid = Some(i);
                }
            } else if prev_ok {
                candidates.extend(self.boundary(budget, prev_prob, s.prob));
            }
            prev_ok = now_ok;
            prev_prob = s.prob;
        }
        if let Some(i) = best_grid {
            candidates.push(self.grid[i]);
            let (lo, hi) = self.neighbours(i);
            candidates.extend(self.golden(lo, hi, ok));
        }

        let mut best: Option<Sample> = None;
        for c in candidates.into_iter().filter(|c| ok(c) && c.aoi.is_finite()) {
            let better = match best {
                None => true,
                Some(b) => c.aoi < b.aoi || (c.aoi == b.aoi && c.prob < b.prob),
            };
            if better {
                best = Some(c);
            }
        }
        let best = best.ok_or(Error::Infeasible { budget })?;
        Ok(FrontierPoint {
            power_budget: budget,
            best_prob: best.prob,
            min_aoi: best.aoi,
            binding: true,
        })
    }

    /// One point per budget. Budgets must be positive and ascending; the
    /// minimum age is carried forward so the curve never rises.
    pub fn frontier(&self, budgets: &[f64]) -> Result<Vec<FrontierPoint>> {
        if budgets.iter().any(|b| b.is_nan()) || budgets.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidConfig("power budgets must be ascending".into()));
        }
        let mut out: Vec<FrontierPoint> = Vec::with_capacity(budgets.len());
        for &b in budgets {
            let mut point = self.min_aoi_given_power(b)?;
            if let Some(prev) = out.last() {
                if point.min_aoi > prev.min_aoi {
                    debug_assert!(
                        point.min_aoi <= prev.min_aoi * (1.0 + 1e-9),
                        "frontier rose from {} to {}",
                        prev.min_aoi,
                        point.min_aoi
                    );
                    point.best_prob = prev.best_prob;
                    point.min_aoi = prev.min_aoi;
                }
            }
            out.push(point);
        }
        Ok(out)
    }
}

pub fn sweep_row(eval: &Evaluator, prob: f64) -> Result<SweepRow> {
    if !(prob > 0.0 && prob <= 1.0) {
        return Err(Error::Domain {
            name: "access_prob",
            value: prob,
            expected: "0 < p <= 1",
        });
    }
    let ProtocolReport {
        avg_aoi,
        avg_power,
        load,
    } = eval.report(prob)?;
    Ok(SweepRow {
        access_prob: prob,
        load,
        avg_aoi,
        avg_power,
    })
}

pub fn sweep(eval: &Evaluator, grid: &[f64]) -> Result<Vec<SweepRow>> {
    grid.iter().map(|&p| sweep_row(eval, p)).collect()
}

pub fn min_aoi_unconstrained(
    protocol: Protocol,
    n: u32,
    k: u32,
    timing: TimingModel,
    power: f64,
) -> Result<Optimum> {
    Ok(Optimizer::new(Evaluator::new(protocol, n, k, timing, power)?)?.min_aoi_unconstrained())
}

pub fn min_aoi_given_power(
    protocol: Protocol,
    n: u32,
    k: u32,
    timing: TimingModel,
    power: f64,
    budget: f64,
) -> Result<FrontierPoint> {
    Optimizer::new(Evaluator::new(protocol, n, k, timing, power)?)?.min_aoi_given_power(budget)
}

pub fn frontier(
    protocol: Protocol,
    n: u32,
    k: u32,
    timing: TimingModel,
    power: f64,
    budgets: &[f64],
) -> Result<Vec<FrontierPoint>> {
    Optimizer::new(Evaluator::new(protocol, n, k, timing, power)?)?.frontier(budgets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn opt(protocol: Protocol, n: u32, k: u32) -> Optimizer {
        Optimizer::new(Evaluator::new(protocol, n, k, TimingModel::normalized(), 1.0).unwrap()).unwrap()
    }

    #[test]
    fn sa_optimum_is_one_over_n() {
        let o = opt(Protocol::Sa, 10, 1).min_aoi_unconstrained();
        assert!((o.best_prob - 0.1).abs() < 1e-6, "{}", o.best_prob);
        assert_relative_eq!(o.min_aoi, 26.3117, epsilon = 1e-4);
    }

    #[test]
    fn lone_sensor_always_transmits() {
        let o = opt(Protocol::Sa, 1, 1).min_aoi_unconstrained();
        assert_eq!(o.best_prob, 1.0);
        assert_eq!(o.min_aoi, 1.5);
    }

    #[test]
    fn fsa_optimum_loads_one_packet_per_slot() {
        let o = opt(Protocol::Fsa, 10, 5).min_aoi_unconstrained();
        let load = o.best_prob * 10.0 / 5.0;
        assert!((load - 1.0).abs() < 0.1, "load {load}");
    }

    #[test]
    fn fsa_beats_sa_by_about_eight_percent() {
        let sa = opt(Protocol::Sa, 10, 1).min_aoi_given_power(0.1).unwrap();
        let fsa = opt(Protocol::Fsa, 10, 5).min_aoi_given_power(0.1).unwrap();
        let gap = 1.0 - fsa.min_aoi / sa.min_aoi;
        assert!((gap - 0.08).abs() < 0.03, "gap {gap}");
        // both unconstrained optima spend exactly 0.1
        assert!(!fsa.binding && !sa.binding);
        assert!(fsa.best_prob <= 0.5 + 1e-12);
    }

    #[test]
    fn slack_budget_returns_unconstrained() {
        let o = opt(Protocol::Rta, 10, 5);
        let free = o.min_aoi_unconstrained();
        let p = o.min_aoi_given_power(1.0).unwrap();
        assert!(!p.binding);
        assert_eq!(p.min_aoi, free.min_aoi);
        assert_eq!(p.best_prob, free.best_prob);
    }

    #[test]
    fn budget_is_respected() {
        let timing = TimingModel::new(237.67, 52.67).unwrap();
        let o = Optimizer::new(Evaluator::new(Protocol::Rta, 10, 5, timing, 1.0).unwrap()).unwrap();
        for b in [0.001, 0.01, 0.03, 0.05, 0.1] {
            let p = o.min_aoi_given_power(b).unwrap();
            let power = o.evaluator().report(p.best_prob).unwrap().avg_power;
            assert!(power <= b + 1e-9, "{power} > {b}");
        }
    }

    #[test]
    fn rejects_empty_budget() {
        let o = opt(Protocol::Fsa, 10, 5);
        assert!(matches!(o.min_aoi_given_power(0.0), Err(Error::Infeasible { .. })));
        assert!(matches!(o.min_aoi_given_power(-1.0), Err(Error::Infeasible { .. })));
        assert!(o.frontier(&[0.2, 0.1]).is_err());
    }

    #[test]
    fn frontier_is_monotone_with_constant_tail() {
        let o = opt(Protocol::Rta, 8, 4);
        let budgets: Vec<f64> = (1..=60).map(|i| i as f64 * 0.01).collect();
        let f = o.frontier(&budgets).unwrap();
        assert!(f.windows(2).all(|w| w[1].min_aoi <= w[0].min_aoi));
        let tail = f.last().unwrap();
        assert!(!tail.binding);
        assert_eq!(tail.min_aoi, o.min_aoi_unconstrained().min_aoi);
    }

    #[test]
    fn grid_doubling_is_stable() {
        for (protocol, n, k) in [(Protocol::Sa, 10, 1), (Protocol::Fsa, 10, 5), (Protocol::Rta, 10, 5)] {
            let eval = Evaluator::new(protocol, n, k, TimingModel::new(237.67, 52.67).unwrap(), 1.0).unwrap();
            let coarse = Optimizer::new(eval.clone()).unwrap();
            let fine = Optimizer::with_settings(
                eval,
                OptimizerSettings {
                    grid_points: 20_000,
                    ..Default::default()
                },
            )
            .unwrap();
            for b in [0.02, 0.1, 1.0] {
                let a = coarse.min_aoi_given_power(b).unwrap().min_aoi;
                let c = fine.min_aoi_given_power(b).unwrap().min_aoi;
                assert!(((a - c) / a).abs() < 1e-6, "{protocol} {b}: {a} vs {c}");
            }
        }
    }

    #[test]
    fn sweep_rows_and_minimum() {
        let eval = Evaluator::new(Protocol::Sa, 10, 1, TimingModel::normalized(), 1.0).unwrap();
        assert!(sweep(&eval, &[]).unwrap().is_empty());
        let grid: Vec<f64> = (1..=50).map(|i| i as f64 / 100.0).collect();
        let rows = sweep(&eval, &grid).unwrap();
        let best = rows.iter().min_by(|a, b| a.avg_aoi.total_cmp(&b.avg_aoi)).unwrap();
        assert_eq!(best.access_prob, 0.1);
        assert_relative_eq!(best.load, 1.0, epsilon = 1e-12);
        assert!(sweep(&eval, &[0.0]).is_err());
    }

    /// Per-slot FSA throughput peaks at one packet per slot; at finite N the
    /// peak is `(1 - 1/N)^(N-1)`, which tends to `1/e`.
    #[test]
    fn fsa_throughput_peak() {
        let throughput = |omega: f64, n: u32, k: u32| {
            omega * (1.0 - omega / f64::from(k)).powi(n as i32 - 1) * f64::from(n) / f64::from(k)
        };
        let n = 10;
        let k = 5;
        let (best_omega, best) = (1..=1000)
            .map(|i| i as f64 / 1000.0)
            .map(|w| (w, throughput(w, n, k)))
            .fold((0.0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        assert!((best_omega * f64::from(n) / f64::from(k) - 1.0).abs() < 1e-3);
        assert_relative_eq!(best, 0.9f64.powi(9), epsilon = 1e-9);
        let big = 10_000u32;
        let peak = throughput(f64::from(k) / f64::from(big), big, k);
        assert!((peak - (-1.0f64).exp()).abs() / (-1.0f64).exp() < 1e-4);
    }
}

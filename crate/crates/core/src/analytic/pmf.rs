use serde::Serialize;

use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-9;

/// A finite distribution on `offset, offset + 1, ..., offset + probs.len() - 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pmf {
    offset: usize,
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(offset: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidConfig("empty pmf".into()));
        }
        if let Some(&bad) = probs
            .iter()
            .find(|p| !p.is_finite() || **p < -SUM_TOL || **p > 1.0 + SUM_TOL)
        {
            return Err(Error::Domain {
                name: "pmf entry",
                value: bad,
                expected: "0 <= p <= 1",
            });
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::Domain {
                name: "pmf total",
                value: total,
                expected: "sums to 1",
            });
        }
        // clamp round-off dust such as -1e-17 and restore the unit total
        let probs = probs.into_iter().map(|p| p.clamp(0.0, 1.0) / total).collect();
        Ok(Pmf { offset, probs })
    }

    pub fn point_mass(value: usize) -> Self {
        Pmf {
            offset: value,
            probs: vec![1.0],
        }
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn max_value(&self) -> usize {
        self.offset + self.probs.len() - 1
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, value: usize) -> f64 {
        value
            .checked_sub(self.offset)
            .and_then(|i| self.probs.get(i))
            .copied()
            .unwrap_or(0.0)
    }

    /// `(value, probability)` pairs over the whole support.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (self.offset + i, p))
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(v, p)| v as f64 * p).sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.iter().map(|(v, p)| (v as f64).powi(2) * p).sum()
    }

    pub fn variance(&self) -> f64 {
        (self.second_moment() - self.mean().powi(2)).max(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Largest absolute pointwise difference, treating values outside a support as zero.
    pub fn max_abs_diff(&self, other: &Pmf) -> f64 {
        let lo = self.offset.min(other.offset);
        let hi = self.max_value().max(other.max_value());
        (lo..=hi)
            .map(|v| (self.prob(v) - other.prob(v)).abs())
            .fold(0.0, f64::max)
    }
}

/// Binomial(n, p) probabilities for 0..=n, evaluated in log space so large `n` cannot overflow.
pub fn binomial_pmf(n: u32, p: f64) -> Vec<f64> {
    let n = n as usize;
    if p <= 0.0 {
        let mut v = vec![0.0; n + 1];
        v[0] = 1.0;
        return v;
    }
    if p >= 1.0 {
        let mut v = vec![0.0; n + 1];
        v[n] = 1.0;
        return v;
    }
    let ln_fact = ln_factorials(n);
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    (0..=n)
        .map(|a| {
            let ln_c = ln_fact[n] - ln_fact[a] - ln_fact[n - a];
            (ln_c + a as f64 * lp + (n - a) as f64 * lq).exp()
        })
        .collect()
}

/// `ln(i!)` for `i` in `0..=n`.
pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..=n {
        acc += (i as f64).ln();
        out.push(acc);
    }
    out
}

/// `x^e` with the convention `0^0 = 1`, as a logarithm.
pub(crate) fn ln_pow(x: f64, e: usize) -> f64 {
    if e == 0 {
        0.0
    } else {
        e as f64 * x.ln()
    }
}

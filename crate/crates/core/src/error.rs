use thiserror::Error;

use crate::sim::PartialStats;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{name} = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// The tracked sensor never completes an update, so the age grows without bound.
    #[error("average age is infinite: {0}")]
    InfiniteAoi(&'static str),

    #[error("cannot condition on an event of probability zero: {0}")]
    NullEvent(&'static str),

    #[error("enumeration would visit {states} outcomes (limit {limit})")]
    StateSpaceTooLarge { states: u128, limit: u128 },

    #[error("simulation observed fewer than two updates of the tracked sensor ({} after warmup)", .partial.n_updates)]
    NoUpdates { partial: Box<PartialStats> },

    #[error("power budget {budget} admits no access probability")]
    Infeasible { budget: f64 },

    #[error("failed to read configuration: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_prob(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "0 <= p <= 1",
        })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "finite and > 0",
        })
    }
}

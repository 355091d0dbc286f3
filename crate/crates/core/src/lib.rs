//! Age of information (AoI) and transmit power of three random-access MAC
//! protocols feeding a single access point:
//!
//! * slotted Aloha (SA): every sensor sends its packet in each slot with probability `q`;
//! * frame slotted Aloha (FSA): once per frame of `k` slots, with probability `ω`,
//!   into a uniformly chosen slot;
//! * request-then-access (RTA): a contention phase of `k` short request slots,
//!   followed by a collision-free TDMA phase for the sensors whose request did
//!   not collide.
//!
//! The crate is split into
//! * [`model`]: protocol parameters and 802.11-style PHY timing,
//! * [`analytic`]: closed-form mean AoI, power and load,
//! * [`sim`]: a seeded round-level Monte Carlo simulator and exact enumeration oracles,
//! * [`optimizer`]: AoI-minimising access probabilities, with and without a power budget.

pub mod analytic;
pub mod error;
pub mod model;
pub mod optimizer;
pub mod sim;

pub use error::{Error, Result};
pub use model::{PhyConfig, Protocol, ProtocolParams, TimingModel};

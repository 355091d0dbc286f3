use rand_chacha::ChaCha8Rng;

use super::rng::{self, SHUFFLE_STREAM};
use crate::model::{Protocol, ProtocolParams, TimingModel};

const SILENT: u32 = u32::MAX;

/// What one round (an SA slot, an FSA frame, or an RTA request + access cycle) produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundOutcome {
    pub duration: f64,
    /// Sensors that delivered a packet this round.
    pub delivered: u32,
    /// Offset from the round start at which the tracked sensor's packet ended, if delivered.
    pub tracked_update_at: Option<f64>,
    /// Time the tracked sensor spent transmitting this round.
    pub tracked_airtime: f64,
}

/// Per-run mutable state: one random stream per sensor plus scratch buffers.
#[derive(Debug, Clone)]
pub struct RoundState {
    params: ProtocolParams,
    timing: TimingModel,
    tracked: usize,
    sensors: Vec<ChaCha8Rng>,
    order: ChaCha8Rng,
    choice: Vec<u32>,
    slot_load: Vec<u32>,
    admitted: Vec<u32>,
}

impl RoundState {
    pub fn new(params: ProtocolParams, timing: TimingModel, seed: u64, tracked: usize) -> Self {
        let n = params.n_sensors as usize;
        RoundState {
            params,
            timing,
            tracked,
            sensors: (0..n as u64).map(|i| rng::stream(seed, i)).collect(),
            order: rng::stream(seed, SHUFFLE_STREAM),
            choice: vec![SILENT; n],
            slot_load: vec![0; params.k as usize],
            admitted: Vec::with_capacity(n),
        }
    }

    pub fn params(&self) -> &ProtocolParams {
        &self.params
    }

    /// Every sensor independently picks a uniform slot with probability `p`.
    fn contend(&mut self) {
        let k = self.params.k as usize;
        let p = self.params.access_prob;
        self.slot_load.iter_mut().for_each(|c| *c = 0);
        for (rng, choice) in self.sensors.iter_mut().zip(self.choice.iter_mut()) {
            *choice = if rng::bernoulli(rng, p) {
                let slot = if k == 1 { 0 } else { rng::index(rng, k) };
                self.slot_load[slot] += 1;
                slot as u32
            } else {
                SILENT
            };
        }
    }

    fn alone(&self, sensor: usize) -> bool {
        let c = self.choice[sensor];
        c != SILENT && self.slot_load[c as usize] == 1
    }

    pub fn simulate_round(&mut self) -> RoundOutcome {
        match self.params.protocol {
            Protocol::Sa | Protocol::Fsa => simulate_frame(self),
            Protocol::Rta => simulate_rta_round(self),
        }
    }
}

/// SA (one slot) or FSA (`k` slots): each packet slot lasts `t_pk`.
fn simulate_frame(state: &mut RoundState) -> RoundOutcome {
    state.contend();
    let t = state.timing.t_pk;
    let delivered = state.slot_load.iter().filter(|&&c| c == 1).count() as u32;
    let own = state.choice[state.tracked];
    RoundOutcome {
        duration: f64::from(state.params.k) * t,
        delivered,
        tracked_update_at: state
            .alone(state.tracked)
            .then(|| f64::from(own + 1) * t),
        tracked_airtime: if own == SILENT { 0.0 } else { t },
    }
}

/// Request phase over `k` slots of `t_r`; sensors alone in their request slot
/// then send, in a fresh uniformly random order, one `t_pk` packet each.
pub fn simulate_rta_round(state: &mut RoundState) -> RoundOutcome {
    state.contend();
    state.admitted.clear();
    for sensor in 0..state.choice.len() {
        if state.alone(sensor) {
            state.admitted.push(sensor as u32);
        }
    }
    rng::shuffle(&mut state.order, &mut state.admitted);

    let TimingModel { t_pk, t_r } = state.timing;
    let request_phase = f64::from(state.params.k) * t_r;
    let m = state.admitted.len() as u32;
    let position = state
        .admitted
        .iter()
        .position(|&s| s as usize == state.tracked);
    let requested = state.choice[state.tracked] != SILENT;
    RoundOutcome {
        duration: request_phase + f64::from(m) * t_pk,
        delivered: m,
        tracked_update_at: position.map(|d| request_phase + (d + 1) as f64 * t_pk),
        tracked_airtime: if requested { t_r } else { 0.0 } + if position.is_some() { t_pk } else { 0.0 },
    }
}

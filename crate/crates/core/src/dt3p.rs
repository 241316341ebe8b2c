//! The dynamic phase-plan decision kernel.
//!
//! A decision runs in three stages: every signalized lane gets a load score,
//! the next green pair is picked on the conflict graph among the movements
//! that cross the current greens, and the phase time is a share of the full
//! cycle proportional to the chosen movements' queues relative to the queues
//! they compete with.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::controller::{Controller, PhaseContext};
use crate::domain::{
    LaneArray, LaneState, MovementId, MovementPair, PhasePlan, SigGraph, Snapshot, DETECTION_CAPACITY,
};

pub const DEFAULT_FULL_CYCLE_S: f64 = 120.0;
pub const DEFAULT_MIN_GREEN_S: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecisionError {
    #[error("current greens {0} and {1} do not form a valid phase")]
    InvalidCurrentGreens(MovementId, MovementId),
    #[error("no candidate pair for current greens {0}")]
    NoCandidates(MovementPair),
    #[error("invalid load weights: {0}")]
    InvalidWeights(String),
}

/// Weights of the five factors combined into a lane load.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LoadWeights {
    pub occupancy: f64,
    pub wait: f64,
    pub priority: f64,
    pub back_road: f64,
    pub next_road: f64,
    /// Head wait at which the wait factor saturates.
    pub wait_norm_s: f64,
}

impl Default for LoadWeights {
    fn default() -> Self {
        LoadWeights {
            occupancy: 0.40,
            wait: 0.30,
            priority: 0.20,
            back_road: 0.05,
            next_road: 0.05,
            wait_norm_s: 300.0,
        }
    }
}

impl LoadWeights {
    pub fn validate(&self) -> Result<(), DecisionError> {
        let w = [self.occupancy, self.wait, self.priority, self.back_road, self.next_road];
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(DecisionError::InvalidWeights("weights must be finite and >= 0".into()));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(DecisionError::InvalidWeights(format!("weights sum to {sum}, expected 1")));
        }
        if !(self.wait_norm_s > 0.0 && self.wait_norm_s.is_finite()) {
            return Err(DecisionError::InvalidWeights("wait_norm_s must be > 0".into()));
        }
        Ok(())
    }
}

/// Load of each signalized movement, indexed by [`MovementId::ordinal`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LoadVector(pub [f64; 8]);

impl LoadVector {
    pub fn get(&self, m: MovementId) -> f64 {
        self.0[m.ordinal()]
    }

    pub fn set(&mut self, m: MovementId, load: f64) {
        self.0[m.ordinal()] = load;
    }

    pub fn pair_score(&self, pair: MovementPair) -> f64 {
        self.get(pair.first()) + self.get(pair.second())
    }
}

/// Lane load in `[0, 1]`; zero unless the first arrival has been confirmed.
pub fn compute_lane_load(lane: &LaneState, weights: &LoadWeights) -> f64 {
    if !lane.arrival_confirmed {
        return 0.0;
    }
    let occupancy = (lane.occupancy_pct / 100.0).clamp(0.0, 1.0);
    let wait = (lane.head_wait_s / weights.wait_norm_s).clamp(0.0, 1.0);
    let special = if lane.on_duty { lane.priority.clamp(0.0, 1.0) } else { 0.0 };
    let back = (f64::from(lane.back_road_queue) / f64::from(DETECTION_CAPACITY)).min(1.0);
    let next = ((100.0 - lane.next_road_occupancy_pct) / 100.0).clamp(0.0, 1.0);
    weights.occupancy * occupancy
        + weights.wait * wait
        + weights.priority * special
        + weights.back_road * back
        + weights.next_road * next
}

pub fn compute_loads(snapshot: &Snapshot, weights: &LoadWeights) -> LoadVector {
    let mut loads = LoadVector::default();
    for m in MovementId::ALL {
        loads.set(m, compute_lane_load(snapshot.movement(m), weights));
    }
    loads
}

/// Pairs formed by one movement crossing `g1` and one crossing `g2`, with
/// self-pairs, conflicting pairs and duplicates removed. Sorted by lane
/// index.
pub fn candidate_pairs(g1: MovementId, g2: MovementId, sig: &SigGraph) -> Result<Vec<MovementPair>, DecisionError> {
    if g1 == g2 || sig.conflicts_with(g1, g2) {
        return Err(DecisionError::InvalidCurrentGreens(g1, g2));
    }
    let mut out: Vec<MovementPair> = Vec::with_capacity(16);
    for &x in sig.conflicts_of(g1) {
        for &y in sig.conflicts_of(g2) {
            if x == y || sig.conflicts_with(x, y) {
                continue;
            }
            out.push(MovementPair::new_unchecked(x, y));
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Highest-scoring candidate pair, where a pair scores the sum of its two
/// movement loads. Ties go to the lowest lane indices.
pub fn select_next_greens(
    loads: &LoadVector,
    g1: MovementId,
    g2: MovementId,
    sig: &SigGraph,
) -> Result<MovementPair, DecisionError> {
    let candidates = candidate_pairs(g1, g2, sig)?;
    let mut best: Option<(MovementPair, f64)> = None;
    for pair in candidates {
        let score = loads.pair_score(pair);
        match best {
            Some((_, s)) if score <= s => {}
            _ => best = Some((pair, score)),
        }
    }
    best.map(|(p, _)| p).ok_or(DecisionError::NoCandidates(MovementPair::new_unchecked(g1, g2)))
}

/// Queues whose first vehicle has been confirmed at the stop line; zero
/// elsewhere.
pub fn confirmed_queues(v_c: &[u32], c_fva: &[bool]) -> Vec<u32> {
    debug_assert_eq!(v_c.len(), c_fva.len());
    v_c.iter().zip(c_fva).map(|(&q, &confirmed)| if confirmed { q } else { 0 }).collect()
}

/// Parameters bounding the phase time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimeBounds {
    pub full_cycle_s: f64,
    pub min_green_s: f64,
}

impl Default for PhaseTimeBounds {
    fn default() -> Self {
        PhaseTimeBounds { full_cycle_s: DEFAULT_FULL_CYCLE_S, min_green_s: DEFAULT_MIN_GREEN_S }
    }
}

/// Green share a single next-green movement asks for, before averaging.
///
/// The competitor sum covers confirmed queues of the movements crossing
/// `next` that are not green right now. The numerator is the movement's raw
/// detected queue.
pub fn requested_green_s(
    v_c: &LaneArray<u32>,
    c_fva: &LaneArray<bool>,
    current: MovementPair,
    next: MovementId,
    full_cycle_s: f64,
    sig: &SigGraph,
) -> f64 {
    let competing: u64 = MovementId::ALL
        .into_iter()
        .filter(|&i| sig.conflicts_with(next, i) && !current.contains(i))
        .map(|i| if *c_fva.movement(i) { u64::from(*v_c.movement(i)) } else { 0 })
        .sum();
    let ratio = if competing == 0 { 1.0 } else { f64::from(*v_c.movement(next)) / competing as f64 };
    ratio * full_cycle_s
}

/// Phase time for `next`: the mean of both movements' requested greens,
/// clamped to `[min_green_s, full_cycle_s]`.
pub fn compute_phase_time(
    v_c: &LaneArray<u32>,
    c_fva: &LaneArray<bool>,
    current: MovementPair,
    next: MovementPair,
    bounds: PhaseTimeBounds,
    sig: &SigGraph,
) -> f64 {
    let t1 = requested_green_s(v_c, c_fva, current, next.first(), bounds.full_cycle_s, sig);
    let t2 = requested_green_s(v_c, c_fva, current, next.second(), bounds.full_cycle_s, sig);
    ((t1 + t2) / 2.0).clamp(bounds.min_green_s, bounds.full_cycle_s)
}

/// Full decision: loads, next greens, phase time.
pub fn dt3p_decide(
    snapshot: &Snapshot,
    current: &PhasePlan,
    weights: &LoadWeights,
    bounds: PhaseTimeBounds,
    sig: &SigGraph,
) -> Result<PhasePlan, DecisionError> {
    let loads = compute_loads(snapshot, weights);
    let greens = select_next_greens(&loads, current.greens.first(), current.greens.second(), sig)?;
    let v_c = LaneArray(snapshot.0.map(|l| l.detected_queue_veh));
    let c_fva = LaneArray(snapshot.0.map(|l| l.arrival_confirmed));
    let duration_s = compute_phase_time(&v_c, &c_fva, current.greens, greens, bounds, sig);
    Ok(PhasePlan { greens, duration_s })
}

/// Controller that replans with [`dt3p_decide`] whenever a phase runs out.
#[derive(Debug, Clone)]
pub struct Dt3pController {
    pub weights: LoadWeights,
    pub bounds: PhaseTimeBounds,
    sig: SigGraph,
}

impl Dt3pController {
    pub fn new(weights: LoadWeights, bounds: PhaseTimeBounds) -> Self {
        Dt3pController { weights, bounds, sig: SigGraph::standard() }
    }
}

impl Default for Dt3pController {
    fn default() -> Self {
        Self::new(LoadWeights::default(), PhaseTimeBounds::default())
    }
}

impl Controller for Dt3pController {
    fn name(&self) -> &str {
        "DT3P"
    }

    fn initial_plan(&mut self) -> PhasePlan {
        PhasePlan {
            greens: MovementPair::new_unchecked(MovementId::A, MovementId::B),
            duration_s: self.bounds.min_green_s,
        }
    }

    fn next_plan(&mut self, snapshot: &Snapshot, current: &PhasePlan, _ctx: &PhaseContext) -> PhasePlan {
        dt3p_decide(snapshot, current, &self.weights, self.bounds, &self.sig)
            .expect("current greens always form a valid pair")
    }
}

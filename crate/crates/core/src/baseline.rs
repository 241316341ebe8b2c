//! Benchmark controllers: pre-timed (BM1) and fully-actuated (BM2).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::controller::{Controller, PhaseContext};
use crate::domain::{MovementId, MovementPair, PhasePlan, Snapshot};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BaselineError {
    #[error("fixed plan needs as many durations as phases ({phases} phases, {durations} durations)")]
    LengthMismatch { phases: usize, durations: usize },
    #[error("fixed plan is empty")]
    Empty,
    #[error("phase duration {0} s must be positive")]
    NonPositiveDuration(f64),
    #[error("actuated parameters need 0 < min_green <= max_green and extension > 0")]
    InvalidActuated,
}

/// The standard split of the eight movements into four compatible phases.
pub fn default_phase_sequence() -> Vec<MovementPair> {
    use MovementId::*;
    [(A, B), (C, D), (E, F), (G, H)].into_iter().map(|(a, b)| MovementPair::new_unchecked(a, b)).collect()
}

/// A cyclic sequence of phases with fixed durations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedTimePlan {
    pub phase_sequence: Vec<MovementPair>,
    pub durations_s: Vec<f64>,
}

impl Default for FixedTimePlan {
    /// 120 s cycle split into four 30 s phases.
    fn default() -> Self {
        FixedTimePlan { phase_sequence: default_phase_sequence(), durations_s: vec![30.0; 4] }
    }
}

impl FixedTimePlan {
    pub fn with_durations(durations_s: Vec<f64>) -> Result<Self, BaselineError> {
        let plan = FixedTimePlan { phase_sequence: default_phase_sequence(), durations_s };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<(), BaselineError> {
        if self.phase_sequence.is_empty() {
            return Err(BaselineError::Empty);
        }
        if self.phase_sequence.len() != self.durations_s.len() {
            return Err(BaselineError::LengthMismatch {
                phases: self.phase_sequence.len(),
                durations: self.durations_s.len(),
            });
        }
        if let Some(&d) = self.durations_s.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
            return Err(BaselineError::NonPositiveDuration(d));
        }
        Ok(())
    }

    pub fn cycle_s(&self) -> f64 {
        self.durations_s.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.phase_sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phase_sequence.is_empty()
    }

    pub fn phase(&self, index: usize) -> PhasePlan {
        let i = index % self.len();
        PhasePlan { greens: self.phase_sequence[i], duration_s: self.durations_s[i] }
    }
}

/// The phase after `current_phase_index`, wrapping at the end of the
/// sequence. Returns the new index with its plan.
pub fn fixed_next(current_phase_index: usize, plan: &FixedTimePlan) -> (usize, PhasePlan) {
    let next = (current_phase_index + 1) % plan.len();
    (next, plan.phase(next))
}

/// Pre-timed controller.
#[derive(Debug, Clone, Default)]
pub struct Bm1Controller {
    plan: FixedTimePlan,
    index: usize,
}

impl Bm1Controller {
    pub fn new(plan: FixedTimePlan) -> Self {
        Bm1Controller { plan, index: 0 }
    }

    pub fn phase_index(&self) -> usize {
        self.index
    }
}

impl Controller for Bm1Controller {
    fn name(&self) -> &str {
        "BM1"
    }

    fn initial_plan(&mut self) -> PhasePlan {
        self.index = 0;
        self.plan.phase(0)
    }

    fn next_plan(&mut self, _snapshot: &Snapshot, _current: &PhasePlan, _ctx: &PhaseContext) -> PhasePlan {
        let (index, plan) = fixed_next(self.index, &self.plan);
        self.index = index;
        plan
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ActuatedParams {
    pub min_green_s: f64,
    /// Allowed gap between actuations before the phase gaps out.
    pub extension_s: f64,
    pub max_green_s: f64,
    pub skip_empty_phases: bool,
}

impl Default for ActuatedParams {
    fn default() -> Self {
        ActuatedParams { min_green_s: 10.0, extension_s: 3.0, max_green_s: 60.0, skip_empty_phases: true }
    }
}

impl ActuatedParams {
    pub fn validate(&self) -> Result<(), BaselineError> {
        if self.min_green_s > 0.0 && self.min_green_s <= self.max_green_s && self.extension_s > 0.0 {
            Ok(())
        } else {
            Err(BaselineError::InvalidActuated)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActuatedDecision {
    Continue,
    Terminate,
}

/// Max-out or gap-out check for the running phase.
pub fn actuated_step(phase_elapsed_s: f64, since_last_actuation_s: f64, params: &ActuatedParams) -> ActuatedDecision {
    let max_out = phase_elapsed_s >= params.max_green_s;
    let gap_out = phase_elapsed_s >= params.min_green_s && since_last_actuation_s > params.extension_s;
    if max_out || gap_out {
        ActuatedDecision::Terminate
    } else {
        ActuatedDecision::Continue
    }
}

/// Fully-actuated controller cycling through the same phases as BM1.
#[derive(Debug, Clone)]
pub struct Bm2Controller {
    params: ActuatedParams,
    sequence: Vec<MovementPair>,
    index: usize,
}

impl Default for Bm2Controller {
    fn default() -> Self {
        Self::new(ActuatedParams::default())
    }
}

impl Bm2Controller {
    pub fn new(params: ActuatedParams) -> Self {
        Bm2Controller { params, sequence: default_phase_sequence(), index: 0 }
    }

    fn has_demand(snapshot: &Snapshot, pair: MovementPair) -> bool {
        pair.iter().any(|m| snapshot.movement(m).arrival_confirmed)
    }

    /// Next phase in cyclic order; phases without confirmed demand are
    /// skipped unless every phase is empty.
    pub fn next_index(&self, snapshot: &Snapshot) -> usize {
        let n = self.sequence.len();
        if self.params.skip_empty_phases {
            for step in 1..=n {
                let i = (self.index + step) % n;
                if Self::has_demand(snapshot, self.sequence[i]) {
                    return i;
                }
            }
        }
        (self.index + 1) % n
    }
}

impl Controller for Bm2Controller {
    fn name(&self) -> &str {
        "BM2"
    }

    fn initial_plan(&mut self) -> PhasePlan {
        self.index = 0;
        PhasePlan { greens: self.sequence[0], duration_s: self.params.max_green_s }
    }

    fn next_plan(&mut self, snapshot: &Snapshot, _current: &PhasePlan, _ctx: &PhaseContext) -> PhasePlan {
        self.index = self.next_index(snapshot);
        PhasePlan { greens: self.sequence[self.index], duration_s: self.params.max_green_s }
    }

    fn should_terminate(&mut self, _snapshot: &Snapshot, _current: &PhasePlan, ctx: &PhaseContext) -> bool {
        actuated_step(ctx.phase_elapsed_s, ctx.since_last_actuation_s, &self.params) == ActuatedDecision::Terminate
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::SigGraph;
    use MovementId::*;

    fn pair(a: MovementId, b: MovementId) -> MovementPair {
        MovementPair::new(a, b, &SigGraph::standard()).unwrap()
    }

    #[test]
    fn fixed_next_examples() {
        let plan = FixedTimePlan::default();
        assert_eq!(plan.cycle_s(), 120.0);
        assert_eq!(fixed_next(0, &plan), (1, PhasePlan { greens: pair(C, D), duration_s: 30.0 }));
        assert_eq!(fixed_next(3, &plan), (0, PhasePlan { greens: pair(A, B), duration_s: 30.0 }));
        let custom = FixedTimePlan::with_durations(vec![40.0, 20.0, 40.0, 20.0]).unwrap();
        assert_eq!(fixed_next(1, &custom), (2, PhasePlan { greens: pair(E, F), duration_s: 40.0 }));
    }

    #[test]
    fn fixed_plan_validation() {
        assert!(FixedTimePlan::with_durations(vec![30.0; 3]).is_err());
        assert!(FixedTimePlan::with_durations(vec![30.0, 0.0, 30.0, 30.0]).is_err());
    }

    #[test]
    fn actuated_examples() {
        let p = ActuatedParams::default();
        assert_eq!(actuated_step(60.0, 0.0, &p), ActuatedDecision::Terminate);
        assert_eq!(actuated_step(12.0, 4.0, &p), ActuatedDecision::Terminate);
        assert_eq!(actuated_step(5.0, 100.0, &p), ActuatedDecision::Continue);
        assert_eq!(actuated_step(12.0, 3.0, &p), ActuatedDecision::Continue);
    }

    #[test]
    fn bm2_skips_empty_phases_and_falls_back() {
        let mut c = Bm2Controller::default();
        let first = c.initial_plan();
        let empty = Snapshot::default();
        // nothing waiting: plain cyclic order
        assert_eq!(c.next_plan(&empty, &first, &PhaseContext::default()).greens, pair(C, D));
        let mut snap = Snapshot::default();
        snap.movement_mut(G).arrival_confirmed = true;
        snap.movement_mut(G).true_queue_veh = 1;
        let plan = c.next_plan(&snap, &PhasePlan { greens: pair(C, D), duration_s: 60.0 }, &PhaseContext::default());
        assert_eq!(plan.greens, pair(G, H));
    }

    #[test]
    fn bm1_green_share_over_a_cycle() {
        let mut c = Bm1Controller::new(FixedTimePlan::with_durations(vec![40.0, 20.0, 40.0, 20.0]).unwrap());
        let mut plan = c.initial_plan();
        let mut green = [0.0; 8];
        for _ in 0..4 {
            for m in plan.greens.iter() {
                green[m.ordinal()] += plan.duration_s;
            }
            plan = c.next_plan(&Snapshot::default(), &plan, &PhaseContext::default());
        }
        assert_eq!(green, [40.0, 40.0, 20.0, 20.0, 40.0, 40.0, 20.0, 20.0]);
    }
}

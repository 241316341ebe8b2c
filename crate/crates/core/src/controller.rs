//! The interface every signal controller implements.

use serde::{Deserialize, Serialize};

use crate::domain::{PhasePlan, Snapshot};

/// Timing of the phase in progress, as seen at the end of a step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseContext {
    pub clock_s: f64,
    pub phase_elapsed_s: f64,
    /// Seconds since a detector on a green lane last registered a vehicle.
    pub since_last_actuation_s: f64,
}

/// A traffic light controller.
///
/// The simulator asks for a new plan whenever the current plan's duration
/// has run out or [`Controller::should_terminate`] returns true. Controllers
/// only ever see the detected snapshot.
pub trait Controller: Send {
    fn name(&self) -> &str;

    /// Plan in force at time zero.
    fn initial_plan(&mut self) -> PhasePlan;

    fn next_plan(&mut self, snapshot: &Snapshot, current: &PhasePlan, ctx: &PhaseContext) -> PhasePlan;

    /// Early termination of the current phase. Fixed-length controllers keep
    /// the default.
    fn should_terminate(&mut self, _snapshot: &Snapshot, _current: &PhasePlan, _ctx: &PhaseContext) -> bool {
        false
    }
}

impl<C: Controller + ?Sized> Controller for Box<C> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn initial_plan(&mut self) -> PhasePlan {
        (**self).initial_plan()
    }

    fn next_plan(&mut self, snapshot: &Snapshot, current: &PhasePlan, ctx: &PhaseContext) -> PhasePlan {
        (**self).next_plan(snapshot, current, ctx)
    }

    fn should_terminate(&mut self, snapshot: &Snapshot, current: &PhasePlan, ctx: &PhaseContext) -> bool {
        (**self).should_terminate(snapshot, current, ctx)
    }
}

/// Controllers that can be named in a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControllerKind {
    Bm1,
    Bm2,
    Dt3p,
}

impl ControllerKind {
    pub const ALL: [ControllerKind; 3] = [ControllerKind::Bm1, ControllerKind::Bm2, ControllerKind::Dt3p];

    pub fn label(self) -> &'static str {
        match self {
            ControllerKind::Bm1 => "BM1",
            ControllerKind::Bm2 => "BM2",
            ControllerKind::Dt3p => "DT3P",
        }
    }
}

impl std::fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for ControllerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bm1" => Ok(ControllerKind::Bm1),
            "bm2" => Ok(ControllerKind::Bm2),
            "dt3p" => Ok(ControllerKind::Dt3p),
            _ => Err(format!("unknown controller '{s}'")),
        }
    }
}

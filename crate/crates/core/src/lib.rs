//! Single-intersection traffic signal microsimulation.
//!
//! The crate models a four-leg signalized intersection with eight controlled
//! movements and ships three signal controllers behind one [`Controller`]
//! trait:
//!
//! * [`dt3p::Dt3pController`], the dynamic phase-plan controller: lane
//!   loads, next-green selection on the conflict graph and a queue-ratio
//!   phase time;
//! * [`baseline::Bm1Controller`], pre-timed;
//! * [`baseline::Bm2Controller`], fully-actuated with gap-out and max-out.
//!
//! [`rsdc`] turns ground-truth queues into what the roadside sensor belts
//! report, [`sim`] runs the deterministic 1 s step simulation, and
//! [`experiments`] replicates runs over demand levels and ranks the
//! controllers.

pub mod baseline;
pub mod cli;
pub mod controller;
pub mod domain;
pub mod dt3p;
pub mod experiments;
pub mod report;
pub mod rsdc;
pub mod sim;

pub use controller::{Controller, ControllerKind, PhaseContext};
pub use domain::{MovementId, MovementPair, PhasePlan, SigGraph};
pub use sim::{run, MetricsRecord, SimConfig};

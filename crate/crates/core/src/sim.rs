//! Deterministic discrete-time simulation of the intersection.
//!
//! Queues are point queues: vehicles stack at the stop line without taking
//! up road length, so the true queue can grow past what the sensor belts
//! cover. Every step runs, in order:
//!
//! 1. Poisson arrivals on each signalized lane, reported to the collector;
//! 2. saturation-flow discharge on green lanes, reported to the collector;
//! 3. metric accumulation for the step just simulated;
//! 4. a replan request when the phase has run out or the controller ends it.
//!
//! There is no intergreen: the next plan's greens start on the following
//! step.

use std::collections::VecDeque;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baseline::{ActuatedParams, Bm1Controller, Bm2Controller, FixedTimePlan};
use crate::controller::{Controller, ControllerKind, PhaseContext};
use crate::domain::{is_slip_lane, LaneState, MovementId, PhasePlan, SigGraph, Snapshot, LANE_COUNT};
use crate::dt3p::{Dt3pController, LoadWeights, PhaseTimeBounds, DEFAULT_MIN_GREEN_S};
use crate::experiments::{observe_stability, StabilityThresholds};
use crate::report::fmt_num;
use crate::rsdc::{DetectionTrace, Rsdc};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("trace output failed: {0}")]
    Trace(#[from] std::io::Error),
}

/// Controller selection plus its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ControllerSpec {
    Bm1 {
        #[serde(default = "default_bm1_durations")]
        durations_s: Vec<f64>,
    },
    Bm2 {
        #[serde(default)]
        actuated: ActuatedParams,
    },
    Dt3p {
        #[serde(default)]
        weights: LoadWeights,
        #[serde(default = "default_min_green")]
        min_green_s: f64,
    },
}

fn default_bm1_durations() -> Vec<f64> {
    vec![30.0; 4]
}

fn default_min_green() -> f64 {
    DEFAULT_MIN_GREEN_S
}

impl ControllerSpec {
    pub fn default_for(kind: ControllerKind) -> Self {
        match kind {
            ControllerKind::Bm1 => ControllerSpec::Bm1 { durations_s: default_bm1_durations() },
            ControllerKind::Bm2 => ControllerSpec::Bm2 { actuated: ActuatedParams::default() },
            ControllerKind::Dt3p => {
                ControllerSpec::Dt3p { weights: LoadWeights::default(), min_green_s: DEFAULT_MIN_GREEN_S }
            }
        }
    }

    pub fn kind(&self) -> ControllerKind {
        match self {
            ControllerSpec::Bm1 { .. } => ControllerKind::Bm1,
            ControllerSpec::Bm2 { .. } => ControllerKind::Bm2,
            ControllerSpec::Dt3p { .. } => ControllerKind::Dt3p,
        }
    }

    pub fn validate(&self, full_cycle_s: f64) -> Result<(), SimError> {
        let cfg = |e: &dyn std::fmt::Display| SimError::Config(e.to_string());
        match self {
            ControllerSpec::Bm1 { durations_s } => {
                FixedTimePlan::with_durations(durations_s.clone()).map_err(|e| cfg(&e))?;
            }
            ControllerSpec::Bm2 { actuated } => {
                actuated.validate().map_err(|e| cfg(&e))?;
                if actuated.max_green_s > full_cycle_s {
                    return Err(SimError::Config("BM2 max_green_s exceeds the full cycle".into()));
                }
            }
            ControllerSpec::Dt3p { weights, min_green_s } => {
                weights.validate().map_err(|e| cfg(&e))?;
                if !(*min_green_s > 0.0 && *min_green_s <= full_cycle_s) {
                    return Err(SimError::Config("DT3P min_green_s must be in (0, full_cycle_s]".into()));
                }
            }
        }
        Ok(())
    }

    pub fn build(&self, full_cycle_s: f64) -> Result<Box<dyn Controller>, SimError> {
        self.validate(full_cycle_s)?;
        Ok(match self {
            ControllerSpec::Bm1 { durations_s } => {
                Box::new(Bm1Controller::new(FixedTimePlan::with_durations(durations_s.clone()).expect("validated")))
            }
            ControllerSpec::Bm2 { actuated } => Box::new(Bm2Controller::new(*actuated)),
            ControllerSpec::Dt3p { weights, min_green_s } => {
                Box::new(Dt3pController::new(*weights, PhaseTimeBounds { full_cycle_s, min_green_s: *min_green_s }))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub duration_s: u32,
    #[serde(default = "default_step")]
    pub step_s: f64,
    pub demand_veh_per_hour_per_lane: f64,
    pub seed: u64,
    #[serde(default = "default_headway")]
    pub saturation_headway_s: f64,
    #[serde(default = "default_lost_time")]
    pub startup_lost_time_s: f64,
    pub controller: ControllerSpec,
    #[serde(default = "default_cycle")]
    pub full_cycle_s: f64,
    /// Queue at upstream signals, reported to every lane.
    #[serde(default)]
    pub back_road_queue: u32,
    /// Occupancy of the receiving roads, percent.
    #[serde(default)]
    pub next_road_occupancy_pct: f64,
}

fn default_step() -> f64 {
    1.0
}
fn default_headway() -> f64 {
    2.0
}
fn default_lost_time() -> f64 {
    2.0
}
fn default_cycle() -> f64 {
    120.0
}

impl SimConfig {
    pub fn new(kind: ControllerKind, demand_veh_per_hour_per_lane: f64, seed: u64) -> Self {
        SimConfig {
            duration_s: 3600,
            step_s: default_step(),
            demand_veh_per_hour_per_lane,
            seed,
            saturation_headway_s: default_headway(),
            startup_lost_time_s: default_lost_time(),
            controller: ControllerSpec::default_for(kind),
            full_cycle_s: default_cycle(),
            back_road_queue: 0,
            next_road_occupancy_pct: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: &str| Err(SimError::Config(msg.to_string()));
        if self.duration_s == 0 {
            return bad("duration_s must be > 0");
        }
        if !(self.step_s > 0.0 && self.step_s.is_finite()) {
            return bad("step_s must be > 0");
        }
        if !(self.demand_veh_per_hour_per_lane >= 0.0 && self.demand_veh_per_hour_per_lane.is_finite()) {
            return bad("demand must be >= 0");
        }
        if !(self.saturation_headway_s > 0.0 && self.saturation_headway_s.is_finite()) {
            return bad("saturation_headway_s must be > 0");
        }
        if !(self.startup_lost_time_s >= 0.0 && self.startup_lost_time_s.is_finite()) {
            return bad("startup_lost_time_s must be >= 0");
        }
        if !(self.full_cycle_s > 0.0 && self.full_cycle_s.is_finite()) {
            return bad("full_cycle_s must be > 0");
        }
        if !(0.0..=100.0).contains(&self.next_road_occupancy_pct) {
            return bad("next_road_occupancy_pct must be within [0, 100]");
        }
        self.controller.validate(self.full_cycle_s)
    }

    pub fn steps(&self) -> u64 {
        (f64::from(self.duration_s) / self.step_s).round() as u64
    }
}

/// The seven evaluation factors of one run (or their replication means).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub departure_arrival_pct: f64,
    pub avg_queue_veh: f64,
    pub max_queue_veh: f64,
    pub avg_wait_s: f64,
    pub max_wait_s: f64,
    pub green_time_utilization: f64,
    pub stability: u8,
}

impl MetricsRecord {
    pub const CSV_HEADER: &'static str =
        "departure_arrival_pct,avg_queue_veh,max_queue_veh,avg_wait_s,max_wait_s,green_time_utilization,stability";

    pub fn csv_fields(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            fmt_num(self.departure_arrival_pct),
            fmt_num(self.avg_queue_veh),
            fmt_num(self.max_queue_veh),
            fmt_num(self.avg_wait_s),
            fmt_num(self.max_wait_s),
            fmt_num(self.green_time_utilization),
            self.stability
        )
    }
}

/// Header of the per-run metrics CSV.
pub fn run_csv_header() -> String {
    format!("controller,demand,seed,{}", MetricsRecord::CSV_HEADER)
}

/// One per-run metrics CSV row.
pub fn run_csv_row(controller: &str, demand: f64, seed: u64, m: &MetricsRecord) -> String {
    format!("{},{},{},{}", controller, fmt_num(demand), seed, m.csv_fields())
}

/// Draws this step's arrivals for one lane.
pub fn spawn_arrivals<R: rand::Rng + ?Sized>(rng: &mut R, rate_veh_per_s: f64, step_s: f64) -> u32 {
    let mean = rate_veh_per_s * step_s;
    if mean <= 0.0 {
        return 0;
    }
    let poisson = Poisson::new(mean).expect("finite positive mean");
    let draw: f64 = poisson.sample(rng);
    draw as u32
}

/// The arrival stream of one lane: seeded from the run seed and the lane
/// index only, so lanes never share random numbers.
pub fn lane_rng(seed: u64, lane: u8) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(lane));
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DischargeParams {
    pub saturation_headway_s: f64,
    pub startup_lost_time_s: f64,
}

/// Saturation-flow discharge with fractional carry-over between steps.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Discharger {
    credit: f64,
}

impl Discharger {
    /// Vehicles leaving a queue of `queue` during one step that starts
    /// `time_into_green_s` after green onset.
    pub fn discharge(
        &mut self,
        queue: u32,
        is_green: bool,
        time_into_green_s: f64,
        step_s: f64,
        params: &DischargeParams,
    ) -> u32 {
        if !is_green {
            self.credit = 0.0;
            return 0;
        }
        if time_into_green_s < params.startup_lost_time_s {
            return 0;
        }
        self.credit += step_s / params.saturation_headway_s;
        let leaving = (self.credit.floor() as u32).min(queue);
        self.credit -= f64::from(leaving);
        if leaving == queue {
            // an empty stop line banks at most one vehicle's worth of green
            self.credit = self.credit.min(1.0);
        }
        leaving
    }
}

#[derive(Debug, Clone)]
struct LaneSim {
    lane: u8,
    /// Join times of queued vehicles, front = next to leave.
    queue: VecDeque<f64>,
    arrivals: u64,
    departures: u64,
    discharger: Discharger,
    green_since: Option<f64>,
    /// Start of the current wait at a red light, if a queue is waiting.
    red_wait_since: Option<f64>,
    rng: ChaCha8Rng,
    rate_veh_per_s: f64,
    green_s: f64,
    used_green_s: f64,
}

/// Results of invariant checks performed on every step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SafetyAudit {
    pub steps_checked: u64,
    pub conservation_violations: u64,
    pub conflicting_green_steps: u64,
    pub detection_mismatches: u64,
}

impl SafetyAudit {
    pub fn is_clean(&self) -> bool {
        self.conservation_violations == 0 && self.conflicting_green_steps == 0 && self.detection_mismatches == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub metrics: MetricsRecord,
    pub audit: SafetyAudit,
    pub arrivals: u64,
    pub departures: u64,
    pub phases: u64,
    /// Mean and longest time a queue waited at a red light before its next
    /// green; waits still running at the end are counted up to the end.
    pub red_wait_mean_s: f64,
    pub red_wait_max_s: f64,
}

#[derive(Debug, Clone, Default)]
struct Accumulator {
    steps: u64,
    queue_sum: f64,
    queue_max: u32,
    total_queue_series: Vec<f64>,
    wait_sum: f64,
    wait_max: f64,
    waits: u64,
    red_wait_sum: f64,
    red_wait_max: f64,
    red_waits: u64,
}

/// A running simulation driven by any [`Controller`].
pub struct Simulation<C: Controller> {
    cfg: SimConfig,
    controller: C,
    rsdc: Rsdc,
    lanes: Vec<LaneSim>,
    sig: SigGraph,
    plan: PhasePlan,
    clock_s: f64,
    phase_started_s: f64,
    last_actuation_s: f64,
    phases: u64,
    acc: Accumulator,
    audit: SafetyAudit,
}

impl<C: Controller> Simulation<C> {
    pub fn new(cfg: SimConfig, mut controller: C) -> Result<Self, SimError> {
        cfg.validate()?;
        let plan = controller.initial_plan();
        let rate = cfg.demand_veh_per_hour_per_lane / 3600.0;
        let lanes = (1..=LANE_COUNT as u8)
            .map(|lane| LaneSim {
                lane,
                queue: VecDeque::new(),
                arrivals: 0,
                departures: 0,
                discharger: Discharger::default(),
                green_since: if is_slip_lane(lane) || plan.greens.iter().any(|m| m.lane_index() == lane) {
                    Some(0.0)
                } else {
                    None
                },
                red_wait_since: None,
                rng: lane_rng(cfg.seed, lane),
                rate_veh_per_s: if is_slip_lane(lane) { 0.0 } else { rate },
                green_s: 0.0,
                used_green_s: 0.0,
            })
            .collect();
        let steps = cfg.steps() as usize;
        Ok(Simulation {
            cfg,
            controller,
            rsdc: Rsdc::default(),
            lanes,
            sig: SigGraph::standard(),
            plan,
            clock_s: 0.0,
            phase_started_s: 0.0,
            last_actuation_s: 0.0,
            phases: 1,
            acc: Accumulator { total_queue_series: Vec::with_capacity(steps), ..Accumulator::default() },
            audit: SafetyAudit::default(),
        })
    }

    pub fn clock_s(&self) -> f64 {
        self.clock_s
    }

    pub fn plan(&self) -> &PhasePlan {
        &self.plan
    }

    pub fn queue(&self, m: MovementId) -> u32 {
        self.lanes[usize::from(m.lane_index()) - 1].queue.len() as u32
    }

    /// True queue on any lane, slip lanes included.
    pub fn lane_queue(&self, lane: u8) -> u32 {
        self.lanes[usize::from(lane) - 1].queue.len() as u32
    }

    pub fn rsdc(&self) -> &Rsdc {
        &self.rsdc
    }

    pub fn controller(&self) -> &C {
        &self.controller
    }

    /// Cumulative (arrivals, departures) of a lane.
    pub fn lane_counts(&self, lane: u8) -> (u64, u64) {
        let l = &self.lanes[usize::from(lane) - 1];
        (l.arrivals, l.departures)
    }

    /// Places one vehicle at the back of a movement's queue at the current
    /// clock, as if it had just crossed the arrival belt.
    pub fn inject_arrival(&mut self, m: MovementId) {
        let t = self.clock_s;
        let lane = &mut self.lanes[usize::from(m.lane_index()) - 1];
        lane.queue.push_back(t);
        lane.arrivals += 1;
        self.rsdc.on_arrival_belt(m.lane_index(), t);
        if self.plan.greens.contains(m) {
            self.last_actuation_s = t;
        }
    }

    /// Detected view handed to controllers.
    pub fn snapshot(&self) -> Snapshot {
        let detected = self.rsdc.detected_snapshot(self.clock_s);
        let mut snap = Snapshot::default();
        for (i, (state, det)) in snap.0.iter_mut().zip(detected.0.iter()).enumerate() {
            *state = LaneState {
                true_queue_veh: self.lanes[i].queue.len() as u32,
                detected_queue_veh: det.v_c,
                head_wait_s: det.head_wait_s,
                arrival_confirmed: det.c_fva,
                occupancy_pct: det.occupancy_pct,
                priority: 0.0,
                on_duty: false,
                back_road_queue: self.cfg.back_road_queue,
                next_road_occupancy_pct: self.cfg.next_road_occupancy_pct,
            };
        }
        snap
    }

    fn is_green(&self, lane: u8) -> bool {
        is_slip_lane(lane) || self.plan.greens.iter().any(|m| m.lane_index() == lane)
    }

    /// Advances the simulation by one step.
    pub fn step(&mut self) {
        let t = self.clock_s;
        let dt = self.cfg.step_s;
        let params = DischargeParams {
            saturation_headway_s: self.cfg.saturation_headway_s,
            startup_lost_time_s: self.cfg.startup_lost_time_s,
        };

        for i in 0..LANE_COUNT {
            let lane_id = i as u8 + 1;
            let green = self.is_green(lane_id);
            let lane = &mut self.lanes[i];

            let arriving = spawn_arrivals(&mut lane.rng, lane.rate_veh_per_s, dt);
            for _ in 0..arriving {
                lane.queue.push_back(t);
                lane.arrivals += 1;
                self.rsdc.on_arrival_belt(lane_id, t);
            }
            let queued_at_start = lane.queue.len();

            let into_green = lane.green_since.map_or(0.0, |g| t - g);
            let leaving = lane.discharger.discharge(lane.queue.len() as u32, green, into_green, dt, &params);
            for _ in 0..leaving {
                let joined = lane.queue.pop_front().expect("discharge never exceeds the queue");
                lane.departures += 1;
                self.rsdc.on_departure_belt(lane_id, t);
                if !is_slip_lane(lane_id) {
                    let wait = t - joined;
                    self.acc.wait_sum += wait;
                    self.acc.wait_max = self.acc.wait_max.max(wait);
                    self.acc.waits += 1;
                }
            }
            if !green && !lane.queue.is_empty() && lane.red_wait_since.is_none() {
                lane.red_wait_since = Some(t);
            }
            if green && (arriving > 0 || leaving > 0) {
                self.last_actuation_s = t;
            }
            if green && !is_slip_lane(lane_id) {
                lane.green_s += dt;
                if queued_at_start > 0 || leaving > 0 {
                    lane.used_green_s += dt;
                }
            }
        }

        self.clock_s = t + dt;
        self.accumulate();

        let ctx = PhaseContext {
            clock_s: self.clock_s,
            phase_elapsed_s: self.clock_s - self.phase_started_s,
            since_last_actuation_s: self.clock_s - self.last_actuation_s.max(self.phase_started_s),
        };
        let timed_out = ctx.phase_elapsed_s >= self.plan.duration_s - 1e-9;
        let snapshot = self.snapshot();
        if timed_out || self.controller.should_terminate(&snapshot, &self.plan, &ctx) {
            let next = self.controller.next_plan(&snapshot, &self.plan, &ctx);
            self.switch_to(next);
        }
    }

    fn switch_to(&mut self, next: PhasePlan) {
        let now = self.clock_s;
        for lane in self.lanes.iter_mut().filter(|l| !is_slip_lane(l.lane)) {
            let was = self.plan.greens.iter().any(|m| m.lane_index() == lane.lane);
            let will = next.greens.iter().any(|m| m.lane_index() == lane.lane);
            match (was, will) {
                (false, true) => {
                    lane.green_since = Some(now);
                    if let Some(since) = lane.red_wait_since.take() {
                        let wait = now - since;
                        self.acc.red_wait_sum += wait;
                        self.acc.red_wait_max = self.acc.red_wait_max.max(wait);
                        self.acc.red_waits += 1;
                    }
                }
                (true, false) => lane.green_since = None,
                _ => {}
            }
        }
        self.plan = next;
        self.phase_started_s = now;
        self.phases += 1;
    }

    fn accumulate(&mut self) {
        let mut total = 0u64;
        let detected = self.rsdc.detected_snapshot(self.clock_s);
        for lane in self.lanes.iter().filter(|l| !is_slip_lane(l.lane)) {
            let q = lane.queue.len() as u32;
            total += u64::from(q);
            self.acc.queue_sum += f64::from(q);
            self.acc.queue_max = self.acc.queue_max.max(q);
            if lane.arrivals != lane.departures + u64::from(q)
                || self.rsdc.arrivals(lane.lane) != lane.arrivals
                || self.rsdc.departures(lane.lane) != lane.departures
            {
                self.audit.conservation_violations += 1;
            }
            if detected.lane(lane.lane).v_c != q.min(crate::domain::DETECTION_CAPACITY) {
                self.audit.detection_mismatches += 1;
            }
        }
        if self.sig.conflicts_with(self.plan.greens.first(), self.plan.greens.second()) {
            self.audit.conflicting_green_steps += 1;
        }
        self.audit.steps_checked += 1;
        self.acc.steps += 1;
        self.acc.total_queue_series.push(total as f64);
    }

    /// Writes the detection trace rows for the current clock.
    pub fn write_trace<W: Write>(&self, trace: &mut DetectionTrace<W>) -> std::io::Result<()> {
        let detected = self.rsdc.detected_snapshot(self.clock_s);
        for m in MovementId::ALL {
            trace.record(self.clock_s, m.lane_index(), detected.movement(m))?;
        }
        Ok(())
    }

    pub fn is_finished(&self) -> bool {
        self.acc.steps >= self.cfg.steps()
    }

    /// Per-step total queue over the signalized lanes.
    pub fn total_queue_series(&self) -> &[f64] {
        &self.acc.total_queue_series
    }

    /// (mean, max) red-light wait, open waits counted up to the clock.
    pub fn red_wait_stats(&self) -> (f64, f64) {
        let (mut sum, mut max, mut n) = (self.acc.red_wait_sum, self.acc.red_wait_max, self.acc.red_waits);
        for since in self.lanes.iter().filter_map(|l| l.red_wait_since) {
            let wait = self.clock_s - since;
            sum += wait;
            max = max.max(wait);
            n += 1;
        }
        if n == 0 {
            (0.0, 0.0)
        } else {
            (sum / n as f64, max)
        }
    }

    /// Metrics for everything simulated so far.
    pub fn metrics(&self) -> MetricsRecord {
        let signalized = self.lanes.iter().filter(|l| !is_slip_lane(l.lane));
        let (arrivals, departures) =
            signalized.clone().fold((0u64, 0u64), |(a, d), l| (a + l.arrivals, d + l.departures));
        let departure_arrival_pct = if arrivals == 0 { 100.0 } else { 100.0 * departures as f64 / arrivals as f64 };
        let lane_steps = (self.acc.steps * MovementId::ALL.len() as u64) as f64;
        let avg_queue_veh = if lane_steps > 0.0 { self.acc.queue_sum / lane_steps } else { 0.0 };
        let avg_wait_s = if self.acc.waits > 0 { self.acc.wait_sum / self.acc.waits as f64 } else { 0.0 };
        let shares: Vec<f64> = signalized.filter(|l| l.green_s > 0.0).map(|l| l.used_green_s / l.green_s).collect();
        let green_time_utilization =
            if shares.is_empty() { 0.0 } else { shares.iter().sum::<f64>() / shares.len() as f64 };
        let stability = observe_stability(
            &self.acc.total_queue_series,
            self.cfg.step_s,
            avg_wait_s,
            &StabilityThresholds::for_cycle(self.cfg.full_cycle_s),
        );
        MetricsRecord {
            departure_arrival_pct,
            avg_queue_veh,
            max_queue_veh: f64::from(self.acc.queue_max),
            avg_wait_s,
            max_wait_s: self.acc.wait_max,
            green_time_utilization,
            stability,
        }
    }

    pub fn outcome(&self) -> RunOutcome {
        let (arrivals, departures) = self
            .lanes
            .iter()
            .filter(|l| !is_slip_lane(l.lane))
            .fold((0, 0), |(a, d), l| (a + l.arrivals, d + l.departures));
        let (red_wait_mean_s, red_wait_max_s) = self.red_wait_stats();
        RunOutcome {
            metrics: self.metrics(),
            audit: self.audit,
            arrivals,
            departures,
            phases: self.phases,
            red_wait_mean_s,
            red_wait_max_s,
        }
    }

    pub fn run_to_end(mut self) -> RunOutcome {
        while !self.is_finished() {
            self.step();
        }
        self.outcome()
    }
}

/// Runs a configured simulation with any controller.
pub fn run_with_controller<C: Controller>(config: &SimConfig, controller: C) -> Result<RunOutcome, SimError> {
    Ok(Simulation::new(config.clone(), controller)?.run_to_end())
}

/// Runs a configured simulation and writes the per-step detection trace.
pub fn run_traced<W: Write>(config: &SimConfig, out: W) -> Result<RunOutcome, SimError> {
    let controller = config.controller.build(config.full_cycle_s)?;
    let mut sim = Simulation::new(config.clone(), controller)?;
    let mut trace = DetectionTrace::new(out)?;
    while !sim.is_finished() {
        sim.step();
        sim.write_trace(&mut trace)?;
    }
    trace.into_inner().flush()?;
    Ok(sim.outcome())
}

pub fn run_detailed(config: &SimConfig) -> Result<RunOutcome, SimError> {
    let controller = config.controller.build(config.full_cycle_s)?;
    run_with_controller(config, controller)
}

/// Runs one simulation and returns its metrics.
pub fn run(config: &SimConfig) -> Result<MetricsRecord, SimError> {
    run_detailed(config).map(|o| o.metrics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn params() -> DischargeParams {
        DischargeParams { saturation_headway_s: 2.0, startup_lost_time_s: 2.0 }
    }

    #[test]
    fn discharge_examples() {
        let mut d = Discharger::default();
        assert_eq!(d.discharge(10, false, 5.0, 1.0, &params()), 0);

        // step-by-step accumulation over a 22 s green
        let mut d = Discharger::default();
        let mut queue = 10;
        for t in 0..22 {
            queue -= d.discharge(queue, true, f64::from(t), 1.0, &params());
        }
        assert_eq!(queue, 0);
        let mut d = Discharger::default();
        let mut queue = 10;
        for t in 0..21 {
            queue -= d.discharge(queue, true, f64::from(t), 1.0, &params());
        }
        assert_eq!(queue, 1);

        let mut d = Discharger::default();
        let mut queue = 3;
        let mut total = 0;
        for t in 0..60 {
            let n = d.discharge(queue, true, f64::from(t), 1.0, &params());
            queue -= n;
            total += n;
        }
        assert_eq!(total, 3);
    }

    #[test]
    fn zero_rate_never_arrives() {
        let mut rng = lane_rng(7, 1);
        assert!((0..10_000).all(|_| spawn_arrivals(&mut rng, 0.0, 1.0) == 0));
    }

    #[test]
    fn lane_streams_are_seeded_per_lane() {
        let a: Vec<u32> = (0..50).map(|_| lane_rng(3, 1).random()).collect();
        let b: Vec<u32> = (0..50).map(|_| lane_rng(3, 1).random()).collect();
        assert_eq!(a, b);
        let mut r1 = lane_rng(3, 1);
        let mut r2 = lane_rng(3, 2);
        let s1: Vec<u32> = (0..8).map(|_| r1.random()).collect();
        let s2: Vec<u32> = (0..8).map(|_| r2.random()).collect();
        assert_ne!(s1, s2);
    }

    #[test]
    fn config_validation() {
        let mut cfg = SimConfig::new(ControllerKind::Dt3p, 250.0, 1);
        assert!(cfg.validate().is_ok());
        cfg.demand_veh_per_hour_per_lane = -1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = SimConfig::new(ControllerKind::Bm1, 250.0, 1);
        cfg.duration_s = 0;
        assert!(matches!(run(&cfg), Err(SimError::Config(_))));
        let mut cfg = SimConfig::new(ControllerKind::Bm2, 250.0, 1);
        cfg.controller = ControllerSpec::Bm2 {
            actuated: ActuatedParams { min_green_s: 20.0, max_green_s: 10.0, ..ActuatedParams::default() },
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn controller_spec_json() {
        let spec: ControllerSpec = serde_json::from_str(r#"{"kind":"bm1","durations_s":[40,20,40,20]}"#).unwrap();
        assert_eq!(spec, ControllerSpec::Bm1 { durations_s: vec![40.0, 20.0, 40.0, 20.0] });
        let spec: ControllerSpec = serde_json::from_str(r#"{"kind":"dt3p"}"#).unwrap();
        assert_eq!(spec, ControllerSpec::default_for(ControllerKind::Dt3p));
        assert!(serde_json::from_str::<ControllerSpec>(r#"{"kind":"nm1"}"#).is_err());
    }
}

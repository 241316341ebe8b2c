//! Road status data collection.
//!
//! Every lane has three queue-detecting sensor belt segments of 150 m, each
//! watched by one roadside unit (RSE), plus two stop-line belts: an arrival
//! belt a few metres upstream of the stop line and a departure belt on it.
//! RSE-3 sits nearest the stop line. When a lane's queue fills a segment the
//! responsibility for measuring it is handed to the next RSE upstream, and
//! handed back once the queue shrinks below that segment again.
//!
//! Belt events are delivered instantly and without loss.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::domain::{LaneArray, LANE_COUNT};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeltLayout {
    pub segment_length_m: f64,
    pub veh_per_segment: u32,
    pub rse_count: u8,
    /// Distance between the arrival and departure belts at the stop line.
    pub stopline_belt_gap_m: f64,
}

impl Default for BeltLayout {
    fn default() -> Self {
        BeltLayout { segment_length_m: 150.0, veh_per_segment: 25, rse_count: 3, stopline_belt_gap_m: 8.0 }
    }
}

impl BeltLayout {
    pub fn detection_capacity(&self) -> u32 {
        self.veh_per_segment * u32::from(self.rse_count)
    }
}

/// Which RSE currently measures a lane's queue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponsibilityState {
    pub responsible_rse: u8,
    /// The queue has filled every segment; the true queue may be longer than
    /// what the belts can see.
    pub saturated: bool,
}

impl ResponsibilityState {
    /// Responsibility for a queue of `queue` vehicles.
    pub fn for_queue(queue: u32, layout: &BeltLayout) -> Self {
        let filled = (queue / layout.veh_per_segment).min(u32::from(layout.rse_count)) as u8;
        ResponsibilityState {
            responsible_rse: layout.rse_count - filled.min(layout.rse_count - 1),
            saturated: filled >= layout.rse_count,
        }
    }

    /// Number of segments filled, `0..=rse_count`.
    pub fn level(&self, layout: &BeltLayout) -> u8 {
        layout.rse_count - self.responsible_rse + u8::from(self.saturated)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HandoverEvent {
    /// Queue reached a segment boundary; the upstream RSE takes over.
    Handover {
        from: u8,
        to: u8,
    },
    /// Queue fell back below a segment boundary.
    Handback {
        from: u8,
        to: u8,
    },
    CoverageSaturated,
    CoverageRestored,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepartureOutcome {
    Decremented,
    /// The departing vehicle was the last one queued.
    Emptied,
    /// Departure seen with nothing queued: counted, queue left at zero.
    UnderflowIgnored,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct LaneDetector {
    tracked: u32,
    arrival_confirmed: bool,
    wait_start_s: Option<f64>,
    arrivals: u64,
    departures: u64,
    responsibility: ResponsibilityState,
    handovers: u64,
}

/// What the collector reports for one lane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct LaneDetection {
    pub v_c: u32,
    pub c_fva: bool,
    pub occupancy_pct: f64,
    pub head_wait_s: f64,
    pub responsible_rse: u8,
}

pub type DetectedSnapshot = LaneArray<LaneDetection>;

/// Detection state for all twelve lanes of the intersection.
#[derive(Debug, Clone)]
pub struct Rsdc {
    layout: BeltLayout,
    lanes: [LaneDetector; LANE_COUNT],
}

impl Default for Rsdc {
    fn default() -> Self {
        Self::new(BeltLayout::default())
    }
}

impl Rsdc {
    pub fn new(layout: BeltLayout) -> Self {
        let idle = LaneDetector {
            tracked: 0,
            arrival_confirmed: false,
            wait_start_s: None,
            arrivals: 0,
            departures: 0,
            responsibility: ResponsibilityState::for_queue(0, &layout),
            handovers: 0,
        };
        Rsdc { layout, lanes: [idle; LANE_COUNT] }
    }

    pub fn layout(&self) -> &BeltLayout {
        &self.layout
    }

    fn lane_mut(&mut self, lane: u8) -> &mut LaneDetector {
        &mut self.lanes[usize::from(lane) - 1]
    }

    fn lane(&self, lane: u8) -> &LaneDetector {
        &self.lanes[usize::from(lane) - 1]
    }

    /// A vehicle crossed the arrival belt and joined the lane's queue.
    pub fn on_arrival_belt(&mut self, lane: u8, t: f64) -> Option<HandoverEvent> {
        let det = self.lane_mut(lane);
        if det.tracked == 0 && det.wait_start_s.is_none() {
            det.wait_start_s = Some(t);
        }
        det.arrival_confirmed = true;
        det.tracked += 1;
        det.arrivals += 1;
        let queue = det.tracked;
        self.handover_evaluate(lane, queue)
    }

    /// A vehicle crossed the stop line.
    pub fn on_departure_belt(&mut self, lane: u8, _t: f64) -> (DepartureOutcome, Option<HandoverEvent>) {
        let det = self.lane_mut(lane);
        det.departures += 1;
        let outcome = match det.tracked {
            0 => DepartureOutcome::UnderflowIgnored,
            1 => {
                det.tracked = 0;
                det.arrival_confirmed = false;
                det.wait_start_s = None;
                DepartureOutcome::Emptied
            }
            _ => {
                det.tracked -= 1;
                DepartureOutcome::Decremented
            }
        };
        let queue = det.tracked;
        (outcome, self.handover_evaluate(lane, queue))
    }

    /// Moves responsibility for `lane` to match a queue of `true_queue`.
    pub fn handover_evaluate(&mut self, lane: u8, true_queue: u32) -> Option<HandoverEvent> {
        let layout = self.layout;
        let det = self.lane_mut(lane);
        let before = det.responsibility;
        let after = ResponsibilityState::for_queue(true_queue, &layout);
        det.responsibility = after;
        if before == after {
            return None;
        }
        det.handovers += 1;
        let event = match (before.saturated, after.saturated) {
            (false, true) => HandoverEvent::CoverageSaturated,
            (true, false) => HandoverEvent::CoverageRestored,
            _ if after.responsible_rse < before.responsible_rse => {
                HandoverEvent::Handover { from: before.responsible_rse, to: after.responsible_rse }
            }
            _ => HandoverEvent::Handback { from: before.responsible_rse, to: after.responsible_rse },
        };
        Some(event)
    }

    pub fn responsibility(&self, lane: u8) -> ResponsibilityState {
        self.lane(lane).responsibility
    }

    pub fn departures(&self, lane: u8) -> u64 {
        self.lane(lane).departures
    }

    pub fn arrivals(&self, lane: u8) -> u64 {
        self.lane(lane).arrivals
    }

    pub fn lane_detection(&self, lane: u8, t: f64) -> LaneDetection {
        let det = self.lane(lane);
        let per_segment = self.layout.veh_per_segment;
        LaneDetection {
            v_c: det.tracked.min(self.layout.detection_capacity()),
            c_fva: det.arrival_confirmed,
            occupancy_pct: 100.0 * f64::from(det.tracked.min(per_segment)) / f64::from(per_segment),
            head_wait_s: det.wait_start_s.map_or(0.0, |s| (t - s).max(0.0)),
            responsible_rse: det.responsibility.responsible_rse,
        }
    }

    /// The latest detected view of every lane.
    pub fn detected_snapshot(&self, t: f64) -> DetectedSnapshot {
        LaneArray(std::array::from_fn(|i| self.lane_detection(i as u8 + 1, t)))
    }
}

/// CSV writer for the per-step detection trace.
pub struct DetectionTrace<W: Write> {
    out: W,
}

impl<W: Write> DetectionTrace<W> {
    pub fn new(mut out: W) -> io::Result<Self> {
        writeln!(out, "t,lane,V_C,C_FVA,V_C%,L_W,responsible_rse")?;
        Ok(DetectionTrace { out })
    }

    pub fn record(&mut self, t: f64, lane: u8, d: &LaneDetection) -> io::Result<()> {
        writeln!(
            self.out,
            "{},{},{},{},{},{},{}",
            crate::report::fmt_num(t),
            lane,
            d.v_c,
            u8::from(d.c_fva),
            crate::report::fmt_num(d.occupancy_pct),
            crate::report::fmt_num(d.head_wait_s),
            d.responsible_rse
        )
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_arrival_starts_wait_timer() {
        let mut r = Rsdc::default();
        r.on_arrival_belt(1, 10.0);
        let d = r.lane_detection(1, 10.0);
        assert!(d.c_fva);
        assert_eq!(d.head_wait_s, 0.0);
        r.on_arrival_belt(1, 14.0);
        let d = r.lane_detection(1, 20.0);
        assert!(d.c_fva);
        assert_eq!(d.head_wait_s, 10.0);
    }

    #[test]
    fn free_flow_vehicle_pulses_flag() {
        let mut r = Rsdc::default();
        r.on_arrival_belt(2, 5.0);
        assert!(r.lane_detection(2, 5.0).c_fva);
        let (outcome, _) = r.on_departure_belt(2, 5.0);
        assert_eq!(outcome, DepartureOutcome::Emptied);
        let d = r.lane_detection(2, 5.0);
        assert!(!d.c_fva);
        assert_eq!(d.head_wait_s, 0.0);
    }

    #[test]
    fn departures_decrement_and_clear() {
        let mut r = Rsdc::default();
        for _ in 0..5 {
            r.on_arrival_belt(4, 0.0);
        }
        assert_eq!(r.on_departure_belt(4, 1.0).0, DepartureOutcome::Decremented);
        assert_eq!(r.lane_detection(4, 1.0).v_c, 4);
        assert!(r.lane_detection(4, 1.0).c_fva);

        let mut r = Rsdc::default();
        for _ in 0..10 {
            r.on_arrival_belt(5, 0.0);
        }
        for t in 0..10 {
            r.on_departure_belt(5, f64::from(t));
        }
        assert_eq!(r.departures(5), 10);
        assert_eq!(r.lane_detection(5, 10.0).v_c, 0);
    }

    #[test]
    fn underflow_is_counted_but_ignored() {
        let mut r = Rsdc::default();
        assert_eq!(r.on_departure_belt(7, 0.0).0, DepartureOutcome::UnderflowIgnored);
        assert_eq!(r.departures(7), 1);
        assert_eq!(r.lane_detection(7, 0.0).v_c, 0);
    }

    #[test]
    fn handover_thresholds() {
        let layout = BeltLayout::default();
        assert_eq!(ResponsibilityState::for_queue(24, &layout).responsible_rse, 3);
        assert_eq!(ResponsibilityState::for_queue(25, &layout).responsible_rse, 2);
        assert_eq!(ResponsibilityState::for_queue(50, &layout).responsible_rse, 1);
        assert!(!ResponsibilityState::for_queue(74, &layout).saturated);
        assert!(ResponsibilityState::for_queue(75, &layout).saturated);

        let mut r = Rsdc::default();
        assert_eq!(r.handover_evaluate(8, 25), Some(HandoverEvent::Handover { from: 3, to: 2 }));
        assert_eq!(r.handover_evaluate(8, 24), Some(HandoverEvent::Handback { from: 2, to: 3 }));
        assert_eq!(r.handover_evaluate(8, 10), None);
    }

    #[test]
    fn snapshot_examples() {
        let mut r = Rsdc::default();
        for _ in 0..100 {
            r.on_arrival_belt(10, 0.0);
        }
        for _ in 0..10 {
            r.on_arrival_belt(11, 0.0);
        }
        let s = r.detected_snapshot(0.0);
        assert_eq!(s.lane(10).v_c, 75);
        assert_eq!(s.lane(10).occupancy_pct, 100.0);
        assert_eq!(s.lane(11).v_c, 10);
        assert_eq!(s.lane(11).occupancy_pct, 40.0);
        let empty = s.lane(1);
        assert_eq!((empty.v_c, empty.c_fva, empty.occupancy_pct, empty.head_wait_s), (0, false, 0.0, 0.0));
    }

    #[test]
    fn trace_format() {
        let r = Rsdc::default();
        let mut trace = DetectionTrace::new(Vec::new()).unwrap();
        trace.record(3.0, 1, &r.lane_detection(1, 3.0)).unwrap();
        let text = String::from_utf8(trace.into_inner()).unwrap();
        assert_eq!(text, "t,lane,V_C,C_FVA,V_C%,L_W,responsible_rse\n3,1,0,0,0,0,3\n");
    }
}

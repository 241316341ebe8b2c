//! Intersection vocabulary: movements, the conflict graph, phase plans and
//! per-lane state.
//!
//! The intersection is a standard four-leg layout with twelve lanes indexed
//! `1..=12`. Eight of them carry the signalized movements `A`..`H`; lanes 3,
//! 6, 9 and 12 are uncontrolled slip lanes that never take part in a control
//! decision.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of lanes in the four-leg layout.
pub const LANE_COUNT: usize = 12;

/// Queue positions covered by the sensor belts of one lane (3 segments of 25).
pub const DETECTION_CAPACITY: u32 = 75;

/// Lanes that are not signalized.
pub const SLIP_LANES: [u8; 4] = [3, 6, 9, 12];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("unknown movement '{0}'")]
    UnknownMovement(String),
    #[error("lane {0} carries no signalized movement")]
    NotSignalized(u8),
    #[error("movements {0} and {1} conflict")]
    Conflicting(MovementId, MovementId),
    #[error("a phase needs two distinct movements, got {0} twice")]
    Repeated(MovementId),
    #[error("phase duration {duration_s} s outside (0, {full_cycle_s}]")]
    Duration { duration_s: f64, full_cycle_s: f64 },
}

/// One of the eight signalized movements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MovementId {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
}

impl MovementId {
    /// All movements in lane-index order.
    pub const ALL: [MovementId; 8] = [
        MovementId::A,
        MovementId::B,
        MovementId::C,
        MovementId::D,
        MovementId::E,
        MovementId::F,
        MovementId::G,
        MovementId::H,
    ];

    /// Lane carrying this movement.
    pub const fn lane_index(self) -> u8 {
        match self {
            MovementId::A => 1,
            MovementId::B => 2,
            MovementId::C => 4,
            MovementId::D => 5,
            MovementId::E => 7,
            MovementId::F => 8,
            MovementId::G => 10,
            MovementId::H => 11,
        }
    }

    pub fn from_lane_index(lane: u8) -> Result<Self, DomainError> {
        Self::ALL.into_iter().find(|m| m.lane_index() == lane).ok_or(DomainError::NotSignalized(lane))
    }

    /// Position in [`MovementId::ALL`], handy for dense arrays.
    pub const fn ordinal(self) -> usize {
        self as usize
    }

    pub const fn letter(self) -> char {
        (b'A' + self as u8) as char
    }
}

impl fmt::Display for MovementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for MovementId {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.trim().chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Self::ALL
                .into_iter()
                .find(|m| m.letter() == c.to_ascii_uppercase())
                .ok_or_else(|| DomainError::UnknownMovement(s.to_string())),
            _ => Err(DomainError::UnknownMovement(s.to_string())),
        }
    }
}

/// The signalized intersection graph: every movement crosses exactly four
/// others.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigGraph {
    conflicts: [[MovementId; 4]; 8],
}

impl Default for SigGraph {
    fn default() -> Self {
        Self::standard()
    }
}

impl SigGraph {
    /// The fixed four-leg conflict table.
    pub const fn standard() -> Self {
        use MovementId::*;
        SigGraph {
            conflicts: [
                [C, F, G, H], // A
                [C, D, E, H], // B
                [A, B, E, H], // C
                [B, E, F, G], // D
                [B, C, D, G], // E
                [A, D, G, H], // F
                [A, D, E, F], // G
                [A, B, C, F], // H
            ],
        }
    }

    pub fn conflicts_of(&self, m: MovementId) -> &[MovementId; 4] {
        &self.conflicts[m.ordinal()]
    }

    pub fn conflicts_with(&self, a: MovementId, b: MovementId) -> bool {
        self.conflicts[a.ordinal()].contains(&b)
    }

    /// Every unordered pair of distinct, non-conflicting movements, in
    /// lexicographic lane order.
    pub fn compatible_pairs(&self) -> Vec<MovementPair> {
        let mut out = Vec::new();
        for (i, &a) in MovementId::ALL.iter().enumerate() {
            for &b in &MovementId::ALL[i + 1..] {
                if !self.conflicts_with(a, b) {
                    out.push(MovementPair::new_unchecked(a, b));
                }
            }
        }
        out
    }
}

/// Free-function form of [`SigGraph::conflicts_with`] on the standard table.
pub fn conflicts_with(a: MovementId, b: MovementId) -> bool {
    SigGraph::standard().conflicts_with(a, b)
}

/// Free-function form of [`SigGraph::compatible_pairs`] on the standard table.
pub fn compatible_pairs() -> Vec<MovementPair> {
    SigGraph::standard().compatible_pairs()
}

/// Unordered pair of movements, stored with the lower lane index first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MovementPair(MovementId, MovementId);

impl MovementPair {
    /// Builds a pair of distinct, compatible movements.
    pub fn new(a: MovementId, b: MovementId, sig: &SigGraph) -> Result<Self, DomainError> {
        if a == b {
            return Err(DomainError::Repeated(a));
        }
        if sig.conflicts_with(a, b) {
            return Err(DomainError::Conflicting(a, b));
        }
        Ok(Self::new_unchecked(a, b))
    }

    pub(crate) fn new_unchecked(a: MovementId, b: MovementId) -> Self {
        if a <= b {
            MovementPair(a, b)
        } else {
            MovementPair(b, a)
        }
    }

    pub fn first(self) -> MovementId {
        self.0
    }

    pub fn second(self) -> MovementId {
        self.1
    }

    pub fn contains(self, m: MovementId) -> bool {
        self.0 == m || self.1 == m
    }

    pub fn iter(self) -> impl Iterator<Item = MovementId> {
        [self.0, self.1].into_iter()
    }

    pub fn lane_indices(self) -> (u8, u8) {
        (self.0.lane_index(), self.1.lane_index())
    }
}

impl fmt::Display for MovementPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0, self.1)
    }
}

impl FromStr for MovementPair {
    type Err = DomainError;

    /// Parses `"AB"` style pairs.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let mut chars = s.chars();
        match (chars.next(), chars.next(), chars.next()) {
            (Some(a), Some(b), None) => {
                MovementPair::new(a.to_string().parse()?, b.to_string().parse()?, &SigGraph::standard())
            }
            _ => Err(DomainError::UnknownMovement(s.to_string())),
        }
    }
}

impl Serialize for MovementPair {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MovementPair {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A pair of green movements and how long they stay green.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePlan {
    pub greens: MovementPair,
    pub duration_s: f64,
}

impl PhasePlan {
    pub fn new(greens: MovementPair, duration_s: f64, full_cycle_s: f64) -> Result<Self, DomainError> {
        if !(duration_s > 0.0 && duration_s <= full_cycle_s) {
            return Err(DomainError::Duration { duration_s, full_cycle_s });
        }
        Ok(PhasePlan { greens, duration_s })
    }
}

/// Everything known about one lane at one instant.
///
/// The simulator fills `true_queue_veh`; every other field is what the road
/// status collector reports, plus the integration inputs that default to
/// constants.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LaneState {
    pub true_queue_veh: u32,
    pub detected_queue_veh: u32,
    /// Seconds the head of the queue has been waiting.
    pub head_wait_s: f64,
    pub arrival_confirmed: bool,
    /// Occupancy of the first queuing segment, percent.
    pub occupancy_pct: f64,
    /// Priority of a special vehicle in the lane, `[0, 1]`.
    pub priority: f64,
    pub on_duty: bool,
    /// Vehicles queued at upstream signals feeding this lane.
    pub back_road_queue: u32,
    /// Occupancy of the receiving road, percent.
    pub next_road_occupancy_pct: f64,
}

impl LaneState {
    pub fn is_consistent(&self) -> bool {
        self.detected_queue_veh <= self.true_queue_veh
            && self.detected_queue_veh <= DETECTION_CAPACITY
            && (!self.arrival_confirmed || self.true_queue_veh >= 1)
            && self.head_wait_s >= 0.0
            && (0.0..=100.0).contains(&self.occupancy_pct)
            && (0.0..=1.0).contains(&self.priority)
            && (0.0..=100.0).contains(&self.next_road_occupancy_pct)
    }
}

/// Lane states indexed by lane number `1..=12`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LaneArray<T>(pub [T; LANE_COUNT]);

impl<T> LaneArray<T> {
    pub fn lane(&self, lane: u8) -> &T {
        &self.0[usize::from(lane) - 1]
    }

    pub fn lane_mut(&mut self, lane: u8) -> &mut T {
        &mut self.0[usize::from(lane) - 1]
    }

    pub fn movement(&self, m: MovementId) -> &T {
        self.lane(m.lane_index())
    }

    pub fn movement_mut(&mut self, m: MovementId) -> &mut T {
        self.lane_mut(m.lane_index())
    }
}

pub type Snapshot = LaneArray<LaneState>;

/// Ground-truth state of the whole intersection.
#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionState {
    pub clock_s: f64,
    pub lanes: Snapshot,
    pub current_greens: MovementPair,
    pub phase_elapsed_s: f64,
}

pub fn is_slip_lane(lane: u8) -> bool {
    SLIP_LANES.contains(&lane)
}

#[cfg(test)]
mod tests {
    use super::*;
    use MovementId::*;

    #[test]
    fn lane_mapping_is_bijective() {
        let lanes: Vec<u8> = MovementId::ALL.iter().map(|m| m.lane_index()).collect();
        assert_eq!(lanes, vec![1, 2, 4, 5, 7, 8, 10, 11]);
        for m in MovementId::ALL {
            assert_eq!(MovementId::from_lane_index(m.lane_index()).unwrap(), m);
        }
        for lane in SLIP_LANES {
            assert!(MovementId::from_lane_index(lane).is_err());
        }
    }

    #[test]
    fn conflict_examples() {
        assert!(conflicts_with(A, C));
        assert!(!conflicts_with(A, A));
        assert!(!conflicts_with(A, B));
    }

    #[test]
    fn conflict_relation_is_symmetric_and_irreflexive() {
        let sig = SigGraph::standard();
        for a in MovementId::ALL {
            assert!(!sig.conflicts_with(a, a));
            let peers = MovementId::ALL.iter().filter(|&&b| b != a && !sig.conflicts_with(a, b)).count();
            assert_eq!(peers, 3, "{a} should have 3 compatible peers");
            for b in MovementId::ALL {
                assert_eq!(sig.conflicts_with(a, b), sig.conflicts_with(b, a), "{a}-{b}");
            }
        }
    }

    #[test]
    fn compatible_pairs_by_enumeration() {
        let sig = SigGraph::standard();
        let pairs = compatible_pairs();
        // brute force over all 28 unordered pairs
        let mut expected = Vec::new();
        for a in MovementId::ALL {
            for b in MovementId::ALL {
                if a < b && !sig.conflicts_of(a).contains(&b) {
                    expected.push((a, b));
                }
            }
        }
        assert_eq!(pairs.len(), 12);
        assert_eq!(pairs.iter().map(|p| (p.first(), p.second())).collect::<Vec<_>>(), expected);
        assert!(pairs.contains(&MovementPair::new_unchecked(A, B)));
        assert!(!pairs.contains(&MovementPair::new_unchecked(C, H)));
    }

    #[test]
    fn default_partition_is_compatible() {
        let sig = SigGraph::standard();
        let mut seen = Vec::new();
        for (a, b) in [(A, B), (C, D), (E, F), (G, H)] {
            MovementPair::new(a, b, &sig).unwrap();
            seen.extend([a, b]);
        }
        seen.sort();
        assert_eq!(seen, MovementId::ALL.to_vec());
    }

    #[test]
    fn pair_parsing_and_validation() {
        assert_eq!("ba".parse::<MovementPair>().unwrap().to_string(), "AB");
        assert!(matches!("AC".parse::<MovementPair>(), Err(DomainError::Conflicting(A, C))));
        assert!(matches!("AA".parse::<MovementPair>(), Err(DomainError::Repeated(A))));
        assert!("ABC".parse::<MovementPair>().is_err());
    }

    #[test]
    fn phase_plan_duration_bounds() {
        let ab = MovementPair::new_unchecked(A, B);
        assert!(PhasePlan::new(ab, 0.0, 120.0).is_err());
        assert!(PhasePlan::new(ab, 120.5, 120.0).is_err());
        assert!(PhasePlan::new(ab, 120.0, 120.0).is_ok());
    }
}

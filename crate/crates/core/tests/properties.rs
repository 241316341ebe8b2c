use crossflow::domain::{LaneArray, MovementId, SigGraph, LANE_COUNT};
use crossflow::dt3p::{compute_phase_time, select_next_greens, LoadVector, PhaseTimeBounds};
use crossflow::experiments::aggregate;
use crossflow::rsdc::Rsdc;
use crossflow::sim::{run_detailed, ControllerSpec, MetricsRecord, SimConfig};
use crossflow::ControllerKind;
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = ControllerKind> {
    prop::sample::select(ControllerKind::ALL.to_vec())
}

proptest! {
    #[test]
    fn selection_ignores_positive_scaling(loads in prop::array::uniform8(0.0..1.0f64), k in 1u32..1000, p in 0usize..12) {
        let sig = SigGraph::standard();
        let current = sig.compatible_pairs()[p];
        let scaled = LoadVector(loads.map(|l| l * f64::from(k)));
        let a = select_next_greens(&LoadVector(loads), current.first(), current.second(), &sig).unwrap();
        let b = select_next_greens(&scaled, current.first(), current.second(), &sig).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!(!sig.conflicts_with(a.first(), a.second()));
    }

    #[test]
    fn phase_time_stays_in_bounds(
        v in prop::array::uniform12(0u32..200),
        c in prop::array::uniform12(any::<bool>()),
        cur in 0usize..12,
        next in 0usize..12,
    ) {
        let sig = SigGraph::standard();
        let pairs = sig.compatible_pairs();
        let t = compute_phase_time(&LaneArray(v), &LaneArray(c), pairs[cur], pairs[next], PhaseTimeBounds::default(), &sig);
        prop_assert!((5.0..=120.0).contains(&t));
    }

    #[test]
    fn detected_queue_saturates_at_capacity(steps in prop::collection::vec(any::<bool>(), 1..400)) {
        let lane = MovementId::E.lane_index();
        let mut rsdc = Rsdc::default();
        let mut q = 0u32;
        for arrive in steps {
            if arrive {
                rsdc.on_arrival_belt(lane, 0.0);
                q += 1;
            } else if q > 0 {
                rsdc.on_departure_belt(lane, 0.0);
                q -= 1;
            }
            let d = rsdc.lane_detection(lane, 0.0);
            prop_assert_eq!(d.v_c, q.min(75));
            prop_assert_eq!(d.c_fva, q > 0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn runs_conserve_vehicles(k in kind(), demand in 0.0..1500.0f64, seed in 0u64..1000) {
        let mut cfg = SimConfig::new(k, demand, seed);
        cfg.duration_s = 900;
        let out = run_detailed(&cfg).unwrap();
        prop_assert!(out.audit.is_clean());
        prop_assert_eq!(out.audit.steps_checked, 900);
        prop_assert!(out.departures <= out.arrivals);
        let m = out.metrics;
        prop_assert!((0.0..=100.0).contains(&m.departure_arrival_pct));
        prop_assert!(m.max_queue_veh >= m.avg_queue_veh && m.max_wait_s >= m.avg_wait_s);
        prop_assert!((0.0..=1.0).contains(&m.green_time_utilization));
    }

    #[test]
    fn means_lie_within_replications(seeds in prop::collection::vec(0u64..10_000, 1..5), demand in 100.0..800.0f64) {
        let records: Vec<MetricsRecord> = seeds
            .iter()
            .map(|&s| {
                let mut cfg = SimConfig::new(ControllerKind::Bm2, demand, s);
                cfg.controller = ControllerSpec::default_for(ControllerKind::Bm2);
                cfg.duration_s = 600;
                crossflow::run(&cfg).unwrap()
            })
            .collect();
        let mean = aggregate(&records);
        let fields = |m: &MetricsRecord| [m.departure_arrival_pct, m.avg_queue_veh, m.max_queue_veh, m.avg_wait_s, m.max_wait_s, m.green_time_utilization];
        let mf = fields(&mean);
        for (i, &mean_value) in mf.iter().enumerate() {
            let lo = records.iter().map(|r| fields(r)[i]).fold(f64::INFINITY, f64::min);
            let hi = records.iter().map(|r| fields(r)[i]).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(mean_value >= lo - 1e-9 && mean_value <= hi + 1e-9);
        }
        prop_assert_eq!(mean.stability, u8::from(records.iter().all(|r| r.stability == 1)));
    }
}

#[test]
fn lane_count_is_twelve() {
    assert_eq!(LANE_COUNT, 12);
}

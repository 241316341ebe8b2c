//! One DT3P decision on a hand-built snapshot: per-movement loads, the
//! candidate pairs after AB, the winner and its phase time.

use crossflow::domain::{MovementId, PhasePlan, SigGraph, Snapshot};
use crossflow::dt3p::{candidate_pairs, compute_loads, dt3p_decide, LoadWeights, PhaseTimeBounds};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    use MovementId::*;
    let sig = SigGraph::standard();
    let weights = LoadWeights::default();

    let mut snap = Snapshot::default();
    for (m, queue, wait) in [(C, 12, 40.0), (D, 18, 75.0), (E, 6, 20.0), (G, 22, 95.0), (H, 3, 5.0)] {
        let lane = snap.movement_mut(m);
        lane.true_queue_veh = queue;
        lane.detected_queue_veh = queue;
        lane.arrival_confirmed = true;
        lane.occupancy_pct = 100.0 * f64::from(queue.min(25)) / 25.0;
        lane.head_wait_s = wait;
    }

    let loads = compute_loads(&snap, &weights);
    for m in MovementId::ALL {
        println!("load {}: {:.4}", m.letter(), loads.get(m));
    }
    println!("candidates after AB:");
    for p in candidate_pairs(A, B, &sig)? {
        println!("  {p}  score {:.4}", loads.pair_score(p));
    }

    let current = PhasePlan { greens: "AB".parse()?, duration_s: 30.0 };
    let plan = dt3p_decide(&snap, &current, &weights, PhaseTimeBounds::default(), &sig)?;
    println!("next plan: {} for {:.1} s", plan.greens, plan.duration_s);
    Ok(())
}

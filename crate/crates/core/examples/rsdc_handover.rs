//! Fills one lane to 80 vehicles and drains it again, printing every
//! responsibility change and the detected queue at that moment.

use crossflow::domain::MovementId;
use crossflow::rsdc::Rsdc;

fn main() {
    let lane = MovementId::C.lane_index();
    let mut rsdc = Rsdc::default();
    let mut t = 0.0;
    for q in 1..=80u32 {
        t += 2.0;
        if let Some(event) = rsdc.on_arrival_belt(lane, t) {
            let d = rsdc.lane_detection(lane, t);
            println!("t={t:>5} queue {q:>2} -> {event:?}, V_C {}, RSE-{}", d.v_c, d.responsible_rse);
        }
    }
    for q in (0..80u32).rev() {
        t += 2.0;
        let (outcome, event) = rsdc.on_departure_belt(lane, t);
        if let Some(event) = event {
            let d = rsdc.lane_detection(lane, t);
            println!("t={t:>5} queue {q:>2} -> {event:?}, V_C {}, RSE-{}", d.v_c, d.responsible_rse);
        }
        if q == 0 {
            println!("t={t:>5} lane {outcome:?}");
        }
    }
}

//! Drives the pre-timed and actuated controllers through a short run and
//! prints each phase they chose with its start time.

use crossflow::baseline::{Bm1Controller, Bm2Controller};
use crossflow::controller::{Controller, ControllerKind};
use crossflow::sim::{SimConfig, Simulation};

fn trace<C: Controller>(kind: ControllerKind, controller: C) -> Result<(), Box<dyn std::error::Error>> {
    let mut config = SimConfig::new(kind, 300.0, 5);
    config.duration_s = 600;
    let mut sim = Simulation::new(config, controller)?;
    println!("{kind}:");
    let mut last = None;
    while !sim.is_finished() {
        let greens = sim.plan().greens;
        if last != Some(greens) {
            println!("  t={:>4} {greens}", sim.clock_s());
            last = Some(greens);
        }
        sim.step();
    }
    let m = sim.metrics();
    println!("  avg queue {:.2} veh, utilization {:.3}", m.avg_queue_veh, m.green_time_utilization);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    trace(ControllerKind::Bm1, Bm1Controller::default())?;
    trace(ControllerKind::Bm2, Bm2Controller::default())?;
    Ok(())
}

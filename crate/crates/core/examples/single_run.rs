//! One simulated hour under a chosen controller and demand.
//!
//! ```text
//! cargo run --release --example single_run -- dt3p 375 1
//! ```

use crossflow::controller::ControllerKind;
use crossflow::sim::{run_detailed, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let kind: ControllerKind = args.next().unwrap_or_else(|| "dt3p".into()).parse()?;
    let demand: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(375.0);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);

    let config = SimConfig::new(kind, demand, seed);
    let outcome = run_detailed(&config)?;
    let m = &outcome.metrics;
    println!("{kind} at {demand} veh/h/lane, seed {seed}");
    println!("  arrivals / departures   {} / {}", outcome.arrivals, outcome.departures);
    println!("  phases served           {}", outcome.phases);
    println!("  departure/arrival       {:.2} %", m.departure_arrival_pct);
    println!("  queue avg / max         {:.2} / {} veh", m.avg_queue_veh, m.max_queue_veh);
    println!("  wait avg / max          {:.1} / {:.1} s", m.avg_wait_s, m.max_wait_s);
    println!("  red-light wait avg/max  {:.1} / {:.1} s", outcome.red_wait_mean_s, outcome.red_wait_max_s);
    println!("  green time utilization  {:.4}", m.green_time_utilization);
    println!("  stable                  {}", m.stability == 1);
    Ok(())
}

//! Runs the desk-scale grid (every controller, five demand levels, 20
//! replications of one simulated hour) and prints the per-level tables and
//! overall scores.
//!
//! ```text
//! cargo run --release --example desk_grid -- [replications] [jobs]
//! ```

use crossflow::experiments::{run_grid, GridConfig, Replications};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let reps: u32 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);
    let jobs: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(4);

    let mut config = GridConfig::desk_scale(1);
    config.replications = Replications::Fixed(reps);
    let report = run_grid(&config, jobs)?;

    for level in &report.levels {
        println!("== {} ({} veh/h/lane)", level.level, level.demand_veh_per_hour_per_lane);
        print!("{}", report.level_table_csv(level));
    }
    println!("== overall scores");
    print!("{}", report.summary());
    println!("audit: {:?}", report.audit);
    Ok(())
}

//! Replication counts per demand level and a points-order ranking of five
//! made-up methods, one of them unstable.

use crossflow::experiments::{rank_methods, sample_size, ConfidenceParams, DemandLevel, MEASURED_FACTORS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = ConfidenceParams::default();
    for level in DemandLevel::ALL {
        println!("{:>10}: {} replications", level.name(), sample_size(u64::from(level.rate()), &p));
    }
    println!("{:>10}: {:.0} replications", "unbounded", p.unbounded_sample_size().round());

    let methods = ["M1", "M2", "M3", "M4", "M5"];
    let matrix = vec![
        vec![98.0, 97.5, 99.1, 60.0, 97.5],
        vec![4.1, 6.3, 2.2, 300.0, 5.0],
        vec![15.0, 19.0, 11.0, 600.0, 16.0],
        vec![40.0, 52.0, 35.0, 2400.0, 44.0],
        vec![90.0, 110.0, 85.0, 3500.0, 95.0],
        vec![0.61, 0.55, 0.82, 0.99, 0.70],
    ];
    let directions: Vec<_> = MEASURED_FACTORS.iter().map(|(_, d)| *d).collect();
    let stability = [1, 1, 1, 0, 1];
    let table = rank_methods(&matrix, &directions, &stability)?;
    let header: String = methods.iter().map(|m| format!("{m:<6}")).collect();
    println!("\n{:<24}{header}", "factor");
    for ((name, _), row) in MEASURED_FACTORS.iter().zip(&table.points) {
        let cells: Vec<String> = row.iter().map(|p| format!("{p:<6}")).collect();
        println!("{name:<24}{}", cells.join(""));
    }
    let overall: Vec<String> = table.overall.iter().map(|p| format!("{p:<6}")).collect();
    println!("{:<24}{}", "overall", overall.join(""));
    Ok(())
}

//! Prints the movement conflict table, the twelve compatible pairs and the
//! lane each movement runs on.

use crossflow::domain::{MovementId, SigGraph};

fn main() {
    let sig = SigGraph::standard();
    println!("movement  lane  conflicts");
    for m in MovementId::ALL {
        let conflicts: String = sig.conflicts_of(m).iter().map(|c| c.letter()).collect();
        println!("{:>8}  {:>4}  {conflicts}", m.letter(), m.lane_index());
    }
    let pairs = sig.compatible_pairs();
    println!("\n{} compatible pairs:", pairs.len());
    for p in &pairs {
        let (a, b) = p.lane_indices();
        println!("  {p}  (lanes {a} and {b})");
    }
}

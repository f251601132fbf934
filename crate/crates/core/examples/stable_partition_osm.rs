//! Compute a stable partition and its induced ordinally stable matching.
//!
//!     cargo run --example stable_partition_osm

use fracstable::fixtures;
use fracstable::matching::{mass, serialize_matching};
use fracstable::partition::{
    compute_osm_alg1_with_partition, compute_stable_partition, irving_phase1, TieBreakPolicy,
};
use fracstable::rational::format_rat;

fn main() {
    let inst = fixtures::fig1();

    let phase1 = irving_phase1(&inst).unwrap();
    let singles: Vec<&str> = phase1.singletons.iter().map(|&v| inst.label(v)).collect();
    println!("phase-1 singletons: {singles:?}");

    let partition = compute_stable_partition(&inst).unwrap();
    println!("stable partition: {}", partition.display(&inst));

    let (m, _) = compute_osm_alg1_with_partition(&inst, TieBreakPolicy::index_order()).unwrap();
    for v in inst.agents() {
        println!("  mass({}) = {}", inst.label(v), format_rat(&mass(&m, v)));
    }
    println!("{}", serialize_matching(&inst, &m));
}

//! Parse an instance file, derive the preference lists, and print them.
//!
//!     cargo run --example parse_and_inspect

use fracstable::model::{derive_preferences, parse_instance, serialize_instance};

fn main() {
    let text = include_str!("../tests/data/fig1.json");
    let inst = parse_instance(text).expect("valid instance file");
    println!(
        "{} agents, {} edges",
        inst.n(),
        inst.edges().len()
    );

    let prefs = derive_preferences(&inst);
    println!(
        "ties: {}, bipartite: {}",
        prefs.has_ties(),
        prefs.is_bipartite()
    );
    for v in inst.agents() {
        let list: Vec<&str> = prefs.list(v).iter().map(|&u| inst.label(u)).collect();
        println!("  {}: {}", inst.label(v), list.join(" > "));
    }

    // Instances round-trip through their canonical serialization.
    let again = parse_instance(&serialize_instance(&inst)).unwrap();
    assert_eq!(inst, again);
}

//! The stable-partition matching 2-approximates the maximum number of
//! fully matched agents under cardinal and ordinal stability, ties
//! included.
//!
//!     cargo run --release --example approximation_bench

use fracstable::gen::{random_instance, seeded_rng, GenConfig};
use fracstable::matching::num_fully;
use fracstable::milp::{milp_solve, MilpOptions, Objective, OptProblem};
use fracstable::partition::{compute_osm_alg1, TieBreakPolicy};
use fracstable::rational::{format_rat, rat, Rat};
use fracstable::stability::StabilityConcept;

fn main() {
    let mut rng = seeded_rng(42);
    println!("n,m,alg_fully,cardinal_opt,ratio");
    for i in 0..8u64 {
        let cfg = GenConfig {
            edge_prob: 0.35,
            ..GenConfig::roommates(5 + (i as usize % 4))
        };
        let inst = random_instance(&mut rng, &cfg);
        let alg = compute_osm_alg1(&inst, TieBreakPolicy::seeded(i)).unwrap();
        let fully = num_fully(&inst, &alg);
        let mut options = MilpOptions::bnb();
        options.warm_start = Some(alg.clone());
        let sol = milp_solve(
            &inst,
            &OptProblem::optimize(StabilityConcept::Cardinal, Objective::MaxFull),
            &options,
        )
        .unwrap();
        let ratio: Rat = if fully == 0 {
            rat(1)
        } else {
            sol.value.clone() / rat(fully as i64)
        };
        assert!(ratio <= rat(2));
        println!(
            "{},{},{fully},{},{}",
            inst.n(),
            inst.edges().len(),
            format_rat(&sol.value),
            format_rat(&ratio)
        );
    }
}

//! Exact optimization over the three stability concepts: exhaustive binary
//! enumeration, branch and bound, and the pure LP for linear stability.
//!
//!     cargo run --release --example milp_solving

use fracstable::fixtures;
use fracstable::milp::{lsm_optimize, milp_solve, MilpOptions, Objective, OptProblem};
use fracstable::rational::{format_rat, rat};
use fracstable::stability::StabilityConcept;

fn main() {
    let inst = fixtures::fig1();

    // Max-welfare under cardinal stability: the welfare-11 matching.
    let p = OptProblem::optimize(StabilityConcept::Cardinal, Objective::MaxWelfare);
    let sol = milp_solve(&inst, &p, &MilpOptions::default()).unwrap();
    println!("cardinal max-welfare: {}", format_rat(&sol.value));

    // Under ordinal stability the optimum drops to 10.
    let p = OptProblem::optimize(StabilityConcept::Ordinal, Objective::MaxWelfare);
    let sol = milp_solve(&inst, &p, &MilpOptions::bnb()).unwrap();
    println!("ordinal max-welfare: {}", format_rat(&sol.value));

    // Decision mode: is welfare 12 reachable? (No.)
    let p = OptProblem::decide(StabilityConcept::Cardinal, Objective::MaxWelfare, rat(12));
    let sol = milp_solve(&inst, &p, &MilpOptions::bnb()).unwrap();
    println!("cardinal welfare >= 12: {:?}", sol.status);

    // Linear stability is a pure LP.
    let (_, value) = lsm_optimize(&inst, Objective::MaxWelfare).unwrap();
    println!("linear max-welfare: {}", format_rat(&value));
    let (_, mass) = lsm_optimize(&inst, Objective::MaxMass).unwrap();
    println!("linear max-mass: {}", format_rat(&mass));
}

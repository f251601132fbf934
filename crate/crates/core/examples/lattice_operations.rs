//! Join, meet, median, and U-domination of fractional matchings.
//!
//!     cargo run --example lattice_operations

use fracstable::fixtures;
use fracstable::lattice::{join, median, meet, u_dominates};
use fracstable::matching::FractionalMatching;
use fracstable::model::Side;
use fracstable::rational::{format_rat, ratio};
use fracstable::stability::{is_stable, StabilityConcept};

fn main() {
    let inst = fixtures::lattice3x3();
    let [n1, n2, _] = fixtures::lattice3x3_stable_integrals();
    let a = FractionalMatching::convex_combination(&[(ratio(3, 4), &n1), (ratio(1, 4), &n2)]);
    let b = FractionalMatching::convex_combination(&[(ratio(1, 4), &n1), (ratio(3, 4), &n2)]);
    for (label, m) in [("A", &a), ("B", &b)] {
        println!(
            "{label} ordinally stable: {}",
            is_stable(&inst, m, StabilityConcept::Ordinal)
        );
    }

    let j = join(&inst, &a, &b, Side::U).unwrap();
    let mt = meet(&inst, &a, &b, Side::U).unwrap();
    let med = median(&inst, &a, &b, &j).unwrap();
    for (label, m) in [("join", &j), ("meet", &mt), ("median(A,B,join)", &med)] {
        println!(
            "{label}: ordinally stable: {}, dominates A: {:?}",
            is_stable(&inst, m, StabilityConcept::Ordinal),
            u_dominates(&inst, m, &a, Side::U).unwrap()
        );
        for (u, v, w) in m.iter() {
            print!("  {}-{}:{}", inst.label(u), inst.label(v), format_rat(w));
        }
        println!();
    }
}

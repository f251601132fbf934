//! Decompose a bipartite fractional matching into a convex combination of
//! integral matchings; for ordinally stable inputs every term is itself a
//! stable matching.
//!
//!     cargo run --example support_decomposition

use fracstable::bipartite::support_decompose;
use fracstable::fixtures;
use fracstable::matching::welfare;
use fracstable::rational::{format_rat, Rat};
use fracstable::stability::{integral_classically_stable, is_stable, StabilityConcept};

fn main() {
    let inst = fixtures::example1();
    let m = fixtures::example1_m1();
    assert!(is_stable(&inst, &m, StabilityConcept::Ordinal));

    let d = support_decompose(&inst, &m).unwrap();
    println!("{} terms:", d.terms.len());
    let mut recombined_welfare = Rat::from_integer(0.into());
    for (coeff, term) in &d.terms {
        println!(
            "  {} x matching with welfare {} (stable: {})",
            format_rat(coeff),
            format_rat(&welfare(&inst, term)),
            integral_classically_stable(&inst, term)
        );
        recombined_welfare += coeff.clone() * welfare(&inst, term);
    }
    assert!(d.reconstructs(&m));
    assert_eq!(recombined_welfare, welfare(&inst, &m));
    println!("reconstruction exact; welfare is linear across the terms");
}

//! Certify matchings under the three stability concepts.
//!
//! The six-agent example has no stable integral matching; the half-integral
//! triangle matching is stable under all three concepts at welfare 10,
//! while the welfare-11 matching is only cardinally stable.
//!
//!     cargo run --example check_stability

use fracstable::fixtures;
use fracstable::matching::welfare;
use fracstable::rational::format_rat;
use fracstable::stability::{blocking_pairs, StabilityConcept};

fn main() {
    let inst = fixtures::fig1();
    for (name, m) in [("green", fixtures::fig1_green()), ("red", fixtures::fig1_red())] {
        println!("{name} matching, welfare {}:", format_rat(&welfare(&inst, &m)));
        for concept in StabilityConcept::ALL {
            let report = blocking_pairs(&inst, &m, concept);
            match report.blockers.first() {
                None => println!("  {:<8} stable", concept.name()),
                Some(b) => println!(
                    "  {:<8} blocked at {{{}, {}}}",
                    concept.name(),
                    inst.label(b.u),
                    inst.label(b.v)
                ),
            }
        }
    }
}

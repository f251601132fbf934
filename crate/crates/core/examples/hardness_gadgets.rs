//! Generate the independent-set hardness constructions, build the forward
//! canonical matchings, and map solutions back to the source graph.
//!
//!     cargo run --release --example hardness_gadgets

use fracstable::matching::{num_fully, welfare};
use fracstable::rational::format_rat;
use fracstable::reductions::{
    canonical_matching_from_is, extract_is, path3, reduce_is_to_full_csm,
    reduce_is_to_welfare_csm, reduce_is_to_welfare_osm_roommates,
};
use fracstable::stability::{is_stable, StabilityConcept};

fn main() {
    let g = path3();
    let set = vec![0, 2]; // the endpoints of the path

    let red = reduce_is_to_welfare_csm(&g, 2).unwrap();
    println!(
        "welfare construction: {} agents, threshold {}",
        red.instance.n(),
        format_rat(&red.threshold)
    );
    let m = canonical_matching_from_is(&red, &set).unwrap();
    println!(
        "  canonical matching: welfare {}, cardinally stable: {}",
        format_rat(&welfare(&red.instance, &m)),
        is_stable(&red.instance, &m, StabilityConcept::Cardinal)
    );
    println!("  extracted independent set: {:?}", extract_is(&red, &m).unwrap());

    let red = reduce_is_to_full_csm(&g, 2).unwrap();
    let m = canonical_matching_from_is(&red, &set).unwrap();
    println!(
        "perfect construction: {} agents, fully matched {}",
        red.instance.n(),
        num_fully(&red.instance, &m)
    );

    let red = reduce_is_to_welfare_osm_roommates(&g, 2).unwrap();
    let m = canonical_matching_from_is(&red, &set).unwrap();
    println!(
        "roommates construction: threshold {}, welfare {}, ordinally stable: {}",
        format_rat(&red.threshold),
        format_rat(&welfare(&red.instance, &m)),
        is_stable(&red.instance, &m, StabilityConcept::Ordinal)
    );
}

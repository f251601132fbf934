//! Polynomial algorithms for strict marriage markets: deferred acceptance,
//! stable matching enumeration via the rotation poset, and the
//! maximum-welfare stable matching by a minimum cut.
//!
//!     cargo run --example bipartite_optimum

use fracstable::bipartite::{
    enumerate_stable_integral, gale_shapley, min_egalitarian_stable,
    optimal_osm_bipartite_strict, BipartiteObjective,
};
use fracstable::fixtures;
use fracstable::matching::{serialize_matching, welfare};
use fracstable::model::Side;
use fracstable::rational::format_rat;

fn main() {
    let inst = fixtures::example1();

    let m0 = gale_shapley(&inst, Side::U).unwrap();
    println!("U-optimal stable matching:\n{}", serialize_matching(&inst, &m0));

    let all = enumerate_stable_integral(&inst, 100).unwrap();
    println!("stable integral matchings: {}", all.len());
    for m in &all {
        println!("  welfare {}", format_rat(&welfare(&inst, m)));
    }

    let (best, value) = min_egalitarian_stable(&inst).unwrap();
    println!("max-welfare stable matching ({}):", format_rat(&value));
    println!("{}", serialize_matching(&inst, &best));

    for objective in [BipartiteObjective::MaxFull, BipartiteObjective::MaxWelfare] {
        let (_, v) = optimal_osm_bipartite_strict(&inst, objective).unwrap();
        println!("optimal ordinally stable value for {objective:?}: {}", format_rat(&v));
    }
}

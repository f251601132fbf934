//! Small built-in instances used across the documentation, examples, and
//! test suites.
//!
//! `fig1` is a six-agent roommates market whose triangle of cyclic
//! preferences rules out every stable integral matching; `example1` and
//! `lattice3x3` are marriage markets with three stable integral matchings
//! each.

use crate::matching::FractionalMatching;
use crate::model::{Instance, Side};
use crate::rational::{parse_rat, rat};

fn build(
    labels: &[&str],
    sides: Option<&[Side]>,
    edges: &[(&str, &str, i64, i64)],
) -> Instance {
    let labels: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
    let idx = |l: &str| labels.iter().position(|x| x == l).unwrap();
    let edge_sats = edges
        .iter()
        .map(|&(u, v, suv, svu)| (idx(u), idx(v), rat(suv), rat(svu)))
        .collect();
    Instance::from_parts(labels, sides.map(|s| s.to_vec()), edge_sats).unwrap()
}

/// Six-agent roommates market: a triangle `a,b,c` with cyclic preferences,
/// a pair `d,e`, and a pendant agent `f`. No integral matching is stable.
pub fn fig1() -> Instance {
    build(
        &["a", "b", "c", "d", "e", "f"],
        None,
        &[
            ("a", "b", 1, 3),
            ("a", "c", 2, 2),
            ("a", "d", 3, 1),
            ("b", "c", 1, 3),
            ("c", "d", 1, 3),
            ("d", "e", 2, 2),
            ("e", "f", 1, 2),
        ],
    )
}

/// The half-integral matching on `fig1` that is stable under all three
/// concepts: triangle halves plus `d-e` integral. Welfare 10.
pub fn fig1_green() -> FractionalMatching {
    matching(
        &fig1(),
        &[
            ("a", "b", "1/2"),
            ("a", "c", "1/2"),
            ("b", "c", "1/2"),
            ("d", "e", "1"),
        ],
    )
}

/// The maximum-welfare matching on `fig1`: the four-cycle `a,b,c,d` in
/// halves plus `e-f` integral. Welfare 11; cardinally stable but blocked
/// ordinally and linearly at `{d,e}`.
pub fn fig1_red() -> FractionalMatching {
    matching(
        &fig1(),
        &[
            ("a", "b", "1/2"),
            ("b", "c", "1/2"),
            ("c", "d", "1/2"),
            ("a", "d", "1/2"),
            ("e", "f", "1"),
        ],
    )
}

/// Ten-agent marriage market with stable integral matchings `N1,N2,N3`;
/// agents `5` and `e` are unmatched in every one of them.
pub fn example1() -> Instance {
    build(
        &["1", "2", "3", "4", "5", "a", "b", "c", "d", "e"],
        Some(&[
            Side::U,
            Side::U,
            Side::U,
            Side::U,
            Side::U,
            Side::W,
            Side::W,
            Side::W,
            Side::W,
            Side::W,
        ]),
        &[
            ("1", "a", 2, 0),
            ("1", "b", 1, 2),
            ("1", "c", 0, 2),
            ("2", "a", 0, 1),
            ("2", "b", 1, 0),
            ("3", "b", 2, 1),
            ("3", "c", 3, 0),
            ("3", "d", 0, 2),
            ("4", "c", 1, 1),
            ("4", "d", 2, 1),
            ("4", "e", 0, 1),
            ("5", "d", 1, 0),
        ],
    )
}

/// The three stable integral matchings of `example1`, in the listed order.
pub fn example1_stable_integrals() -> [FractionalMatching; 3] {
    let inst = example1();
    let n1 = matching(
        &inst,
        &[("1", "a", "1"), ("2", "b", "1"), ("3", "c", "1"), ("4", "d", "1")],
    );
    let n2 = matching(
        &inst,
        &[("1", "b", "1"), ("2", "a", "1"), ("3", "c", "1"), ("4", "d", "1")],
    );
    let n3 = matching(
        &inst,
        &[("1", "b", "1"), ("2", "a", "1"), ("3", "d", "1"), ("4", "c", "1")],
    );
    [n1, n2, n3]
}

/// `M1 = 1/2 N1 + 1/2 N2`: stable under all three concepts.
pub fn example1_m1() -> FractionalMatching {
    let [n1, n2, _] = example1_stable_integrals();
    FractionalMatching::convex_combination(&[(parse_rat("1/2").unwrap(), &n1), (parse_rat("1/2").unwrap(), &n2)])
}

/// `M2 = (1/2 + e) N1 + (1/2 - e) N3` with `e = 1/12`: linearly stable,
/// blocked ordinally and cardinally at `{3,b}`.
pub fn example1_m2() -> FractionalMatching {
    let [n1, _, n3] = example1_stable_integrals();
    FractionalMatching::convex_combination(&[
        (parse_rat("7/12").unwrap(), &n1),
        (parse_rat("5/12").unwrap(), &n3),
    ])
}

/// `M3`: cardinally stable, matches every agent (four of them partially),
/// blocked linearly and ordinally at `{3,d}`.
pub fn example1_m3() -> FractionalMatching {
    matching(
        &example1(),
        &[
            ("1", "b", "1"),
            ("2", "a", "1"),
            ("3", "c", "1/3"),
            ("3", "d", "1/3"),
            ("4", "c", "1/3"),
            ("4", "d", "1/3"),
            ("4", "e", "1/3"),
            ("5", "d", "1/3"),
        ],
    )
}

/// Complete 3x3 marriage market with cyclically shifted preferences; all
/// three integral matchings `N1,N2,N3` are stable and every convex
/// combination of them is ordinally stable.
pub fn lattice3x3() -> Instance {
    build(
        &["1", "2", "3", "a", "b", "c"],
        Some(&[Side::U, Side::U, Side::U, Side::W, Side::W, Side::W]),
        &[
            ("1", "a", 2, 0),
            ("1", "b", 1, 1),
            ("1", "c", 0, 2),
            ("2", "a", 0, 2),
            ("2", "b", 2, 0),
            ("2", "c", 1, 1),
            ("3", "a", 1, 1),
            ("3", "b", 0, 2),
            ("3", "c", 2, 0),
        ],
    )
}

/// The three stable integral matchings of `lattice3x3`.
pub fn lattice3x3_stable_integrals() -> [FractionalMatching; 3] {
    let inst = lattice3x3();
    let n1 = matching(&inst, &[("1", "a", "1"), ("2", "b", "1"), ("3", "c", "1")]);
    let n2 = matching(&inst, &[("1", "b", "1"), ("2", "c", "1"), ("3", "a", "1")]);
    let n3 = matching(&inst, &[("1", "c", "1"), ("2", "a", "1"), ("3", "b", "1")]);
    [n1, n2, n3]
}

/// Triangle with cyclic strict preferences: each agent prefers its
/// successor. The unique stable partition is one odd cycle.
pub fn triangle_cyclic() -> Instance {
    build(
        &["x0", "x1", "x2"],
        None,
        &[("x0", "x1", 2, 1), ("x1", "x2", 2, 1), ("x0", "x2", 1, 2)],
    )
}

/// Five-cycle with rotationally symmetric cyclic preferences.
pub fn five_cycle_cyclic() -> Instance {
    build(
        &["v0", "v1", "v2", "v3", "v4"],
        None,
        &[
            ("v0", "v1", 2, 1),
            ("v1", "v2", 2, 1),
            ("v2", "v3", 2, 1),
            ("v3", "v4", 2, 1),
            ("v0", "v4", 1, 2),
        ],
    )
}

/// Two agents who mutually rank each other first.
pub fn single_edge() -> Instance {
    build(&["u", "v"], None, &[("u", "v", 1, 1)])
}

/// Builds a matching over `inst` from `(label, label, value)` triples.
pub fn matching(inst: &Instance, entries: &[(&str, &str, &str)]) -> FractionalMatching {
    let mut m = FractionalMatching::new();
    for (u, v, val) in entries {
        let ui = inst.index_of(u).unwrap();
        let vi = inst.index_of(v).unwrap();
        m.set(ui, vi, parse_rat(val).unwrap());
    }
    m
}

//! Generators for the independent-set hardness constructions, their
//! forward-direction canonical matchings, and solution extraction.
//!
//! Three constructions are provided, all reducing from Independent Set:
//!
//! * `reduce_is_to_welfare_csm` — bipartite, strict; a welfare threshold
//!   forces an independent set (edge gadgets of six agents per source
//!   edge plus a four-agent vertex gadget per source vertex);
//! * `reduce_is_to_full_csm` — bipartite, strict; a perfect cardinally
//!   stable matching exists iff an independent set of size `k` does
//!   (vertex pairs plus a selector gadget of `4k` agents);
//! * `reduce_is_to_welfare_osm_roommates` — non-bipartite, strict; an
//!   ordinally stable matching of welfare `L(k+1)` with `L = 2n+2m`
//!   exists iff an independent set of size `k` does.
//!
//! Every internal edge of an edge gadget has satisfaction sum `2m^2 + 9`,
//! and the connection stubs satisfy `sat(e_j^i, u_i) = 5` and
//! `sat(e_j^i', u_i') = 7`. Agent labels carry their gadget role (`u3`,
//! `e2^1`, `s1`, ...) so that extraction and debugging can map agents back
//! to the source graph.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::Error;
use crate::matching::{num_fully, welfare, FractionalMatching};
use crate::model::{Instance, Side};
use crate::rational::{rat, ratio, Rat};
use crate::stability::{is_stable, StabilityConcept};

/// Simple undirected source graph for the reductions (0-based vertices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl SourceGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, Error> {
        let mut cleaned = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(Error::Parse(format!("self loop at vertex {}", a + 1)));
            }
            if a >= n || b >= n {
                return Err(Error::Parse(format!(
                    "edge ({}, {}) outside vertex range 1..={n}",
                    a + 1,
                    b + 1
                )));
            }
            cleaned.push(if a < b { (a, b) } else { (b, a) });
        }
        cleaned.sort_unstable();
        cleaned.dedup();
        Ok(SourceGraph { n, edges: cleaned })
    }

    /// Parses one `i j` pair per line, 1-based; the vertex count is the
    /// largest index mentioned. Blank lines and `#` comments are skipped.
    pub fn parse_edge_list(text: &str) -> Result<Self, Error> {
        let mut edges = Vec::new();
        let mut max_v = 0usize;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<usize, Error> {
                let tok = tok.ok_or_else(|| {
                    Error::Parse(format!("line {}: expected two vertex indices", lineno + 1))
                })?;
                let v: usize = tok.parse().map_err(|_| {
                    Error::Parse(format!("line {}: bad vertex index {tok:?}", lineno + 1))
                })?;
                if v == 0 {
                    return Err(Error::Parse(format!(
                        "line {}: vertex indices are 1-based",
                        lineno + 1
                    )));
                }
                Ok(v - 1)
            };
            let a = parse(it.next())?;
            let b = parse(it.next())?;
            if it.next().is_some() {
                return Err(Error::Parse(format!(
                    "line {}: expected exactly two indices",
                    lineno + 1
                )));
            }
            max_v = max_v.max(a + 1).max(b + 1);
            edges.push((a, b));
        }
        if edges.is_empty() {
            return Err(Error::Parse("empty edge list".into()));
        }
        SourceGraph::new(max_v, edges)
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    pub fn is_cubic(&self) -> bool {
        (0..self.n).all(|v| self.degree(v) == 3)
    }

    /// Incident edge indices of `v`, ascending.
    fn incident(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| a == v || b == v)
            .map(|(j, _)| j)
            .collect()
    }

    fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        self.edges
            .iter()
            .all(|&(a, b)| !set.contains(&a) || !set.contains(&b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionKind {
    WelfareCsm,
    FullCsm,
    WelfareOsmRoommates,
}

impl ReductionKind {
    pub fn concept(self) -> StabilityConcept {
        match self {
            ReductionKind::WelfareCsm | ReductionKind::FullCsm => StabilityConcept::Cardinal,
            ReductionKind::WelfareOsmRoommates => StabilityConcept::Ordinal,
        }
    }
}

/// A generated reduction instance with its decision threshold and the
/// source-graph annotations needed to map solutions back.
#[derive(Debug, Clone)]
pub struct ReductionOutput {
    pub kind: ReductionKind,
    pub instance: Instance,
    pub threshold: Rat,
    pub k: usize,
    pub source: SourceGraph,
    pub warnings: Vec<String>,
}

struct Builder {
    labels: Vec<String>,
    sides: Vec<Option<Side>>,
    index: BTreeMap<String, usize>,
    pairs: BTreeMap<(usize, usize), (Rat, Rat)>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            labels: Vec::new(),
            sides: Vec::new(),
            index: BTreeMap::new(),
            pairs: BTreeMap::new(),
        }
    }

    fn agent(&mut self, label: String, side: Option<Side>) -> usize {
        if let Some(&i) = self.index.get(&label) {
            debug_assert_eq!(self.sides[i], side, "side tag mismatch for {label}");
            return i;
        }
        let i = self.labels.len();
        self.index.insert(label.clone(), i);
        self.labels.push(label);
        self.sides.push(side);
        i
    }

    /// Sets `sat(a, b)` and `sat(b, a)`; overwrites existing values.
    fn set_pair(&mut self, a: usize, b: usize, sat_ab: Rat, sat_ba: Rat) {
        let (key, vals) = if a < b {
            ((a, b), (sat_ab, sat_ba))
        } else {
            ((b, a), (sat_ba, sat_ab))
        };
        self.pairs.insert(key, vals);
    }

    /// Overwrites only `sat(a, b)`, keeping the reverse direction.
    fn set_sat_towards(&mut self, a: usize, b: usize, value: Rat) {
        let key = if a < b { (a, b) } else { (b, a) };
        let entry = self
            .pairs
            .entry(key)
            .or_insert_with(|| (Rat::zero(), Rat::zero()));
        if a < b {
            entry.0 = value;
        } else {
            entry.1 = value;
        }
    }

    fn build(self) -> Result<Instance, Error> {
        let tagged = self.sides.iter().all(|s| s.is_some());
        let sides = if tagged {
            Some(self.sides.into_iter().map(|s| s.unwrap()).collect())
        } else {
            None
        };
        let edge_sats = self
            .pairs
            .into_iter()
            .map(|((a, b), (sab, sba))| (a, b, sab, sba))
            .collect();
        Instance::from_parts(self.labels, sides, edge_sats)
    }
}

fn u_label(i: usize) -> String {
    format!("u{}", i + 1)
}
fn w_label(i: usize) -> String {
    format!("w{}", i + 1)
}
fn x_label(i: usize) -> String {
    format!("x{}", i + 1)
}
fn y_label(i: usize) -> String {
    format!("y{}", i + 1)
}
fn edge_agent(role: char, j: usize) -> String {
    format!("{role}{}", j + 1)
}
fn edge_endpoint_agent(j: usize, i: usize) -> String {
    format!("e{}^{}", j + 1, i + 1)
}

/// Adds the six-agent edge gadget for source edge `j = {i, i2}` (`i < i2`)
/// plus the two connection stubs. The satisfactions of `u_i` and `u_i2`
/// towards the endpoint agents are left at a placeholder and must be set
/// by the surrounding construction.
fn add_edge_gadget(b: &mut Builder, j: usize, i: usize, i2: usize, m: usize, tagged: bool) {
    let m2 = rat(2 * (m as i64) * (m as i64));
    let us = if tagged { Some(Side::U) } else { None };
    let ws = if tagged { Some(Side::W) } else { None };
    let ej = b.agent(edge_agent('e', j), us);
    let fj = b.agent(edge_agent('f', j), us);
    let gj = b.agent(edge_agent('g', j), us);
    let hj = b.agent(edge_agent('h', j), ws);
    let ei = b.agent(edge_endpoint_agent(j, i), ws);
    let ei2 = b.agent(edge_endpoint_agent(j, i2), ws);
    let ui = b.agent(u_label(i), us);
    let ui2 = b.agent(u_label(i2), us);

    b.set_pair(ej, hj, m2.clone() + rat(8), rat(1));
    b.set_pair(gj, hj, m2.clone() + rat(5), rat(4));
    b.set_pair(ej, ei, m2.clone() + rat(2), rat(7));
    b.set_pair(gj, ei2, m2.clone() + rat(4), rat(5));
    b.set_pair(ej, ei2, m2.clone(), rat(9));
    b.set_pair(gj, ei, m2.clone() + rat(7), rat(2));
    b.set_pair(fj, ei, m2.clone() + rat(6), rat(3));
    b.set_pair(fj, ei2, m2 + rat(5), rat(4));
    // Connection stubs; the u-side values are construction-specific and
    // initialized to the (distinct, <= m) gadget index.
    b.set_pair(ui, ei, rat(j as i64 + 1), rat(5));
    b.set_pair(ui2, ei2, rat(j as i64 + 1), rat(7));
}

/// Standalone edge gadget as its own instance: the six gadget agents plus
/// the two connection stubs, with the stub satisfactions towards the
/// gadget set to the gadget index.
pub fn gen_edge_gadget(j: usize, i: usize, i2: usize, m: usize) -> Result<Instance, Error> {
    if i >= i2 {
        return Err(Error::Parse("edge gadget endpoints must satisfy i < i2".into()));
    }
    let mut b = Builder::new();
    add_edge_gadget(&mut b, j, i, i2, m, true);
    b.build()
}

/// Per-vertex connection satisfactions: incident edges in ascending index
/// order get `base + d - 1, base + d - 2, ..., base`.
fn patch_connection_sats(b: &mut Builder, g: &SourceGraph, i: usize, base: i64) {
    let incident = g.incident(i);
    let d = incident.len() as i64;
    let ui = b.index[&u_label(i)];
    for (p, &j) in incident.iter().enumerate() {
        let ei = b.index[&edge_endpoint_agent(j, i)];
        b.set_sat_towards(ui, ei, rat(base + d - 1 - p as i64));
    }
}

/// Welfare threshold of the welfare-CSM construction. For cubic graphs
/// this is `(3n+7)n + k + 3m(2m^2+9)`; vertex gadgets of other degrees
/// contribute `3n + max(3, d_i) + 4` each instead of `3n + 7`.
pub fn welfare_csm_threshold(g: &SourceGraph, k: usize) -> Rat {
    let n = g.n as i64;
    let m = g.m() as i64;
    let mut gamma = rat(k as i64) + rat(3 * m) * rat(2 * m * m + 9);
    for i in 0..g.n {
        let d = g.degree(i) as i64;
        gamma += rat(3 * n + d.max(3) + 4);
    }
    gamma
}

fn cubic_warnings(g: &SourceGraph, warnings: &mut Vec<String>) {
    if !g.is_cubic() {
        warnings.push(
            "source graph is not cubic; the construction is emitted anyway (degree-adjusted \
             satisfaction values keep preferences strict)"
                .into(),
        );
    }
    // Tightness of the edge-gadget welfare cap needs m^2/5 - 111/10 > n.
    let m = g.m() as i64;
    let side = ratio(m * m, 5) - ratio(111, 10);
    if side <= rat(g.n as i64) {
        warnings.push(format!(
            "size condition m^2/5 - 11.1 > n fails (m = {}, n = {}); the welfare gap argument \
             is not tight at this scale",
            g.m(),
            g.n
        ));
    }
}

/// Builds the bipartite welfare construction: per source vertex a
/// four-agent gadget (`u_i: w_i > [incident edge agents] > y_i`), per
/// source edge the six-agent gadget, threshold `gamma`.
pub fn reduce_is_to_welfare_csm(g: &SourceGraph, k: usize) -> Result<ReductionOutput, Error> {
    if k > g.n {
        return Err(Error::Parse(format!(
            "k = {k} exceeds the vertex count {}",
            g.n
        )));
    }
    let mut warnings = Vec::new();
    cubic_warnings(g, &mut warnings);
    let n = g.n as i64;
    let mut b = Builder::new();
    for i in 0..g.n {
        let top = 3 * n + (g.degree(i) as i64).max(3);
        let ui = b.agent(u_label(i), Some(Side::U));
        let xi = b.agent(x_label(i), Some(Side::U));
        let wi = b.agent(w_label(i), Some(Side::W));
        let yi = b.agent(y_label(i), Some(Side::W));
        b.set_pair(ui, wi, rat(top), rat(1));
        b.set_pair(ui, yi, rat(1), rat(top + 1));
        b.set_pair(xi, yi, rat(2), rat(1));
        b.set_pair(xi, wi, rat(1), rat(2));
    }
    for (j, &(i, i2)) in g.edges.iter().enumerate() {
        add_edge_gadget(&mut b, j, i, i2, g.m(), true);
    }
    for i in 0..g.n {
        patch_connection_sats(&mut b, g, i, 3 * n);
    }
    let instance = b.build()?;
    Ok(ReductionOutput {
        kind: ReductionKind::WelfareCsm,
        instance,
        threshold: welfare_csm_threshold(g, k),
        k,
        source: g.clone(),
        warnings,
    })
}

/// Builds the perfect-matching construction: one `u_i`/`w_i` pair per
/// vertex, `k` selector quadruples `t_j, c_j, s_j, a_j`, the edge gadgets,
/// and threshold `tau = 6m + 2n + 4k` (every agent fully matched).
pub fn reduce_is_to_full_csm(g: &SourceGraph, k: usize) -> Result<ReductionOutput, Error> {
    if k == 0 || k > g.n {
        return Err(Error::Parse(format!(
            "k = {k} out of range 1..={}",
            g.n
        )));
    }
    let n = g.n as i64;
    let kk = k as i64;
    let two_n2 = 2 * n * n;
    let mut b = Builder::new();
    for i in 0..g.n {
        let d = g.degree(i) as i64;
        let ui = b.agent(u_label(i), Some(Side::U));
        let wi = b.agent(w_label(i), Some(Side::W));
        b.set_pair(ui, wi, rat(two_n2 + d), rat(kk));
    }
    for j in 0..k {
        let tj = b.agent(format!("t{}", j + 1), Some(Side::U));
        let cj = b.agent(format!("c{}", j + 1), Some(Side::U));
        let sj = b.agent(format!("s{}", j + 1), Some(Side::W));
        let aj = b.agent(format!("a{}", j + 1), Some(Side::W));
        b.set_pair(tj, aj, rat(2 * n), rat(0));
        b.set_pair(cj, aj, rat(0), rat(1));
        for i in 0..g.n {
            let ui = b.index[&u_label(i)];
            let wi = b.index[&w_label(i)];
            b.set_pair(ui, sj, rat(j as i64 + 1), rat(i as i64));
            b.set_pair(tj, wi, rat(i as i64), rat(2 * kk + j as i64));
            b.set_pair(cj, wi, rat(i as i64 + 1), rat(j as i64));
        }
    }
    for (j, &(i, i2)) in g.edges.iter().enumerate() {
        add_edge_gadget(&mut b, j, i, i2, g.m(), true);
    }
    for i in 0..g.n {
        patch_connection_sats(&mut b, g, i, two_n2);
    }
    let instance = b.build()?;
    let tau = 6 * g.m() + 2 * g.n + 4 * k;
    debug_assert_eq!(instance.n(), tau);
    Ok(ReductionOutput {
        kind: ReductionKind::FullCsm,
        instance,
        threshold: rat(tau as i64),
        k,
        source: g.clone(),
        warnings: Vec::new(),
    })
}

/// Builds the roommates welfare construction: four agents per source
/// vertex, cross edges between adjacent `u` agents ranked by a fixed
/// ascending-index enumeration, threshold `L(k+1)` with `L = 2n + 2m`.
pub fn reduce_is_to_welfare_osm_roommates(
    g: &SourceGraph,
    k: usize,
) -> Result<ReductionOutput, Error> {
    if k > g.n {
        return Err(Error::Parse(format!(
            "k = {k} exceeds the vertex count {}",
            g.n
        )));
    }
    let mut warnings = Vec::new();
    if !g.is_cubic() {
        warnings.push("source graph is not cubic; the construction is emitted anyway".into());
    }
    let big_l = 2 * g.n as i64 + 2 * g.m() as i64;
    let mut b = Builder::new();
    for i in 0..g.n {
        let d = g.degree(i) as i64;
        let ui = b.agent(u_label(i), None);
        let wi = b.agent(w_label(i), None);
        let xi = b.agent(x_label(i), None);
        let yi = b.agent(y_label(i), None);
        b.set_pair(ui, wi, rat(d + 1), rat(0));
        b.set_pair(ui, yi, rat(0), rat(1));
        b.set_pair(xi, yi, rat(1), rat(0));
        b.set_pair(xi, wi, rat(0), rat(d + 1 + big_l));
    }
    for &(i, i2) in &g.edges {
        let ui = b.index[&u_label(i)];
        let ui2 = b.index[&u_label(i2)];
        // pi_i ranks the neighbors of v_i in ascending vertex order.
        let rank_in = |of: usize, who: usize| -> i64 {
            let nb = g.neighbors(of);
            nb.iter().position(|&x| x == who).unwrap() as i64 + 1
        };
        b.set_pair(ui, ui2, rat(rank_in(i, i2)), rat(rank_in(i2, i)));
    }
    let instance = b.build()?;
    Ok(ReductionOutput {
        kind: ReductionKind::WelfareOsmRoommates,
        instance,
        threshold: rat(big_l) * rat(k as i64 + 1),
        k,
        source: g.clone(),
        warnings,
    })
}

/// Rank-derived satisfactions for a bipartite preference-list instance
/// (ties allowed): `sat(x, y) = |N(x)| - rank(x, y)`. The derived lists
/// coincide with the input lists, and for complete profiles the welfare
/// and egalitarian cost of every perfect integral matching sum to `2|E|`.
pub fn translate_smti(inst: &Instance) -> Result<Instance, Error> {
    let prefs = crate::model::derive_preferences(inst);
    if !prefs.is_bipartite() {
        return Err(Error::NotBipartite(
            "rank-derived satisfactions are defined for marriage instances".into(),
        ));
    }
    let labels: Vec<String> = inst.agents().map(|v| inst.label(v).to_string()).collect();
    let sides = inst
        .declared_sides()
        .map(|s| s.to_vec())
        .or_else(|| prefs.bipartition().map(|s| s.to_vec()));
    let edge_sats = inst
        .edges()
        .iter()
        .map(|&(u, v)| {
            let su = inst.neighbors(u).len() - prefs.rank(u, v).unwrap();
            let sv = inst.neighbors(v).len() - prefs.rank(v, u).unwrap();
            (u, v, rat(su as i64), rat(sv as i64))
        })
        .collect();
    Instance::from_parts(labels, sides, edge_sats)
}

/// The forward-direction matching of a reduction for an independent set
/// `set` of size `k`: the proof's explicit assignment, checked here to
/// meet the threshold exactly and to satisfy the construction's stability
/// concept.
pub fn canonical_matching_from_is(
    red: &ReductionOutput,
    set: &[usize],
) -> Result<FractionalMatching, Error> {
    let g = &red.source;
    if !g.is_independent(set) {
        return Err(Error::Parse("the given set is not independent".into()));
    }
    if set.len() != red.k {
        return Err(Error::Parse(format!(
            "independent set has {} vertices, construction expects {}",
            set.len(),
            red.k
        )));
    }
    if set.iter().any(|&v| v >= g.n) {
        return Err(Error::Parse("vertex index out of range".into()));
    }
    let inst = &red.instance;
    let idx = |label: String| inst.index_of(&label).expect("construction label");
    let mut m = FractionalMatching::new();
    let in_set = |i: usize| set.contains(&i);

    match red.kind {
        ReductionKind::WelfareCsm | ReductionKind::WelfareOsmRoommates => {
            for i in 0..g.n {
                let (ui, wi) = (idx(u_label(i)), idx(w_label(i)));
                let (xi, yi) = (idx(x_label(i)), idx(y_label(i)));
                if in_set(i) {
                    m.set(ui, yi, rat(1));
                    m.set(xi, wi, rat(1));
                } else {
                    m.set(ui, wi, rat(1));
                    m.set(xi, yi, rat(1));
                }
            }
        }
        ReductionKind::FullCsm => {
            let mut sorted = set.to_vec();
            sorted.sort_unstable();
            for (j, &l) in sorted.iter().enumerate() {
                let u = idx(u_label(l));
                let w = idx(w_label(l));
                let s = idx(format!("s{}", j + 1));
                let c = idx(format!("c{}", j + 1));
                let a = idx(format!("a{}", j + 1));
                let t = idx(format!("t{}", j + 1));
                m.set(u, s, rat(1));
                let half = ratio(1, 2);
                m.set(w, c, half.clone());
                m.set(c, a, half.clone());
                m.set(a, t, half.clone());
                m.set(t, w, half);
            }
            for i in 0..g.n {
                if !in_set(i) {
                    m.set(idx(u_label(i)), idx(w_label(i)), rat(1));
                }
            }
        }
    }
    if matches!(red.kind, ReductionKind::WelfareCsm | ReductionKind::FullCsm) {
        for (j, &(i, i2)) in g.edges.iter().enumerate() {
            let ej = idx(edge_agent('e', j));
            let fj = idx(edge_agent('f', j));
            let gj = idx(edge_agent('g', j));
            let hj = idx(edge_agent('h', j));
            let ei = idx(edge_endpoint_agent(j, i));
            let ei2 = idx(edge_endpoint_agent(j, i2));
            if in_set(i) {
                m.set(ej, ei, rat(1));
                m.set(fj, ei2, rat(1));
                m.set(gj, hj, rat(1));
            } else {
                m.set(ej, hj, ratio(3, 10));
                m.set(ej, ei, ratio(1, 10));
                m.set(ej, ei2, ratio(6, 10));
                m.set(fj, ei, ratio(8, 10));
                m.set(fj, ei2, ratio(2, 10));
                m.set(gj, ei, ratio(1, 10));
                m.set(gj, hj, ratio(7, 10));
                m.set(gj, ei2, ratio(2, 10));
            }
        }
    }

    // Self-check: threshold met exactly, concept satisfied.
    match red.kind {
        ReductionKind::FullCsm => {
            if rat(num_fully(inst, &m) as i64) != red.threshold {
                return Err(Error::Unsupported(
                    "internal: canonical matching is not perfect".into(),
                ));
            }
        }
        _ => {
            if welfare(inst, &m) != red.threshold {
                return Err(Error::Unsupported(format!(
                    "internal: canonical matching welfare {} differs from the threshold {}",
                    welfare(inst, &m),
                    red.threshold
                )));
            }
        }
    }
    if !is_stable(inst, &m, red.kind.concept()) {
        return Err(Error::Unsupported(
            "internal: canonical matching fails its stability concept".into(),
        ));
    }
    Ok(m)
}

/// Maps a threshold-meeting stable matching back to an independent set of
/// the source graph. Refuses matchings below the threshold; the returned
/// set is certified independent and of size at least `k`.
pub fn extract_is(red: &ReductionOutput, m: &FractionalMatching) -> Result<Vec<usize>, Error> {
    let inst = &red.instance;
    let attained = match red.kind {
        ReductionKind::FullCsm => rat(num_fully(inst, m) as i64),
        _ => welfare(inst, m),
    };
    if attained < red.threshold {
        return Err(Error::Unsupported(format!(
            "matching attains {attained}, below the threshold {}",
            red.threshold
        )));
    }
    let g = &red.source;
    let idx = |label: String| inst.index_of(&label).expect("construction label");
    let one_over_n = ratio(1, g.n as i64);
    let mut set = Vec::new();
    for i in 0..g.n {
        let ui = idx(u_label(i));
        let selected = match red.kind {
            ReductionKind::WelfareCsm => m.get(ui, idx(y_label(i))) >= one_over_n,
            ReductionKind::WelfareOsmRoommates => !m.get(ui, idx(y_label(i))).is_zero(),
            ReductionKind::FullCsm => {
                let mut total = Rat::zero();
                for j in 0..red.k {
                    total += m.get(ui, idx(format!("s{}", j + 1)));
                }
                total >= one_over_n
            }
        };
        if selected {
            set.push(i);
        }
    }
    if !g.is_independent(&set) {
        return Err(Error::Unsupported(
            "internal: extracted set is not independent".into(),
        ));
    }
    if set.len() < red.k {
        return Err(Error::Unsupported(format!(
            "internal: extracted set has {} vertices, expected at least {}",
            set.len(),
            red.k
        )));
    }
    Ok(set)
}

pub fn k4() -> SourceGraph {
    SourceGraph::new(4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
}

pub fn path3() -> SourceGraph {
    SourceGraph::new(3, vec![(0, 1), (1, 2)]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::utility;
    use crate::model::derive_preferences;

    #[test]
    fn edge_gadget_sums_to_2m2_plus_9() {
        let g = k4();
        let m = g.m();
        for (j, &(i, i2)) in g.edges.iter().enumerate() {
            let inst = gen_edge_gadget(j, i, i2, m).unwrap();
            let internal = ["e", "f", "g"].map(|r| format!("{r}{}", j + 1));
            let sum = rat(2 * (m as i64) * (m as i64) + 9);
            for &(a, b) in inst.edges() {
                let la = inst.label(a);
                let lb = inst.label(b);
                let is_stub = la.starts_with('u') || lb.starts_with('u');
                if is_stub {
                    continue;
                }
                assert!(
                    internal.iter().any(|l| l == la || l == lb),
                    "unexpected edge {la}-{lb}"
                );
                assert_eq!(inst.edge_weight(a, b), sum, "edge {la}-{lb}");
            }
        }
    }

    #[test]
    fn edge_gadget_preference_lists() {
        let inst = gen_edge_gadget(2, 0, 1, 6).unwrap();
        let prefs = derive_preferences(&inst);
        assert!(!prefs.has_ties());
        let idx = |l: &str| inst.index_of(l).unwrap();
        // e3^2: e3 > u2 > g3 > f3 (1-based labels for j = 2, i2 = 1).
        let list = prefs.list(idx("e3^2"));
        let names: Vec<&str> = list.iter().map(|&v| inst.label(v)).collect();
        assert_eq!(names, vec!["e3", "u2", "g3", "f3"]);
        // Connection stub satisfactions.
        assert_eq!(inst.sat(idx("e3^1"), idx("u1")), &rat(5));
        assert_eq!(inst.sat(idx("e3^2"), idx("u2")), &rat(7));
    }

    #[test]
    fn welfare_csm_k4_threshold() {
        let red = reduce_is_to_welfare_csm(&k4(), 1).unwrap();
        // (3n+7)n + k + 3m(2m^2+9) = 19*4 + 1 + 18*81 = 1535.
        assert_eq!(red.threshold, rat(1535));
        assert!(red.warnings.iter().any(|w| w.contains("size condition")));
        assert!(!red.warnings.iter().any(|w| w.contains("not cubic")));
        let prefs = derive_preferences(&red.instance);
        assert!(prefs.is_bipartite());
        assert!(!prefs.has_ties());
        assert_eq!(red.instance.n(), 6 * 6 + 4 * 4);
    }

    #[test]
    fn welfare_csm_vertex_gadget_sats() {
        let red = reduce_is_to_welfare_csm(&k4(), 1).unwrap();
        let inst = &red.instance;
        let idx = |l: &str| inst.index_of(l).unwrap();
        let n = 4i64;
        assert_eq!(inst.sat(idx("u1"), idx("w1")), &rat(3 * n + 3));
        assert_eq!(inst.sat(idx("y1"), idx("u1")), &rat(3 * n + 4));
        // u1's list: w1 > incident edge agents (ascending edge index) > y1.
        let prefs = derive_preferences(inst);
        let names: Vec<String> = prefs
            .list(idx("u1"))
            .iter()
            .map(|&v| inst.label(v).to_string())
            .collect();
        assert_eq!(names, vec!["w1", "e1^1", "e2^1", "e3^1", "y1"]);
    }

    #[test]
    fn full_csm_path3_tau_and_sats() {
        let g = path3();
        let red = reduce_is_to_full_csm(&g, 1).unwrap();
        assert_eq!(red.threshold, rat(22));
        assert_eq!(red.instance.n(), 22);
        let inst = &red.instance;
        let idx = |l: &str| inst.index_of(l).unwrap();
        assert_eq!(inst.sat(idx("t1"), idx("a1")), &rat(6));
        assert_eq!(inst.sat(idx("a1"), idx("t1")), &rat(0));
        // sat(u_i, w_i) = 2n^2 + d_i.
        assert_eq!(inst.sat(idx("u1"), idx("w1")), &rat(19));
        assert_eq!(inst.sat(idx("u2"), idx("w2")), &rat(20));
        let prefs = derive_preferences(inst);
        assert!(prefs.is_bipartite());
        assert!(!prefs.has_ties());
    }

    #[test]
    fn full_csm_rejects_k_out_of_range() {
        let g = path3();
        assert!(reduce_is_to_full_csm(&g, 0).is_err());
        assert!(reduce_is_to_full_csm(&g, 4).is_err());
    }

    #[test]
    fn osm_roommates_k4_threshold_and_sats() {
        let g = k4();
        let red = reduce_is_to_welfare_osm_roommates(&g, 1).unwrap();
        // L = 2n + 2m = 20; threshold 40.
        assert_eq!(red.threshold, rat(40));
        let inst = &red.instance;
        let idx = |l: &str| inst.index_of(l).unwrap();
        assert_eq!(inst.sat(idx("x1"), idx("w1")), &rat(0));
        assert_eq!(inst.sat(idx("w1"), idx("x1")), &rat(4 + 20));
        let prefs = derive_preferences(inst);
        assert!(!prefs.has_ties());
        assert!(!prefs.is_bipartite());
        // Every agent accepts at most five others in the cubic case.
        for v in inst.agents() {
            assert!(inst.neighbors(v).len() <= 5);
        }
    }

    #[test]
    fn canonical_matching_welfare_csm_k4() {
        let g = k4();
        let red = reduce_is_to_welfare_csm(&g, 1).unwrap();
        let m = canonical_matching_from_is(&red, &[0]).unwrap();
        assert_eq!(welfare(&red.instance, &m), red.threshold);
        assert!(is_stable(&red.instance, &m, StabilityConcept::Cardinal));
    }

    #[test]
    fn canonical_case1_gadget_utilities() {
        // With the fractional case-(1) weights the gadget utilities are
        // 2m^2 + 2.6, 2m^2 + 5.8, 2m^2 + 5, 7.2, 3.1.
        let g = k4();
        let red = reduce_is_to_welfare_csm(&g, 1).unwrap();
        let inst = &red.instance;
        let m = canonical_matching_from_is(&red, &[3]).unwrap();
        // Source edge 0 = {v1, v2}: neither endpoint is in the set.
        let idx = |l: &str| inst.index_of(l).unwrap();
        let m2 = rat(2 * 36);
        assert_eq!(utility(inst, &m, idx("e1")), m2.clone() + ratio(13, 5));
        assert_eq!(utility(inst, &m, idx("f1")), m2.clone() + ratio(29, 5));
        assert_eq!(utility(inst, &m, idx("g1")), m2.clone() + rat(5));
        assert_eq!(utility(inst, &m, idx("e1^2")), ratio(36, 5));
        assert_eq!(utility(inst, &m, idx("h1")), ratio(31, 10));
    }

    #[test]
    fn canonical_case2_gadget_utilities() {
        let g = k4();
        let red = reduce_is_to_welfare_csm(&g, 1).unwrap();
        let inst = &red.instance;
        // Source edge 0 = {v1, v2} with v1 in the set: integral case.
        let m = canonical_matching_from_is(&red, &[0]).unwrap();
        let idx = |l: &str| inst.index_of(l).unwrap();
        let m2 = rat(2 * 36);
        assert_eq!(utility(inst, &m, idx("e1")), m2.clone() + rat(2));
        assert_eq!(utility(inst, &m, idx("h1")), rat(4));
        assert_eq!(utility(inst, &m, idx("e1^1")), rat(7));
        assert_eq!(utility(inst, &m, idx("f1")), m2 + rat(5));
    }

    #[test]
    fn canonical_matching_full_csm_path3() {
        let g = path3();
        let red = reduce_is_to_full_csm(&g, 1).unwrap();
        for v in 0..3 {
            let m = canonical_matching_from_is(&red, &[v]).unwrap();
            assert_eq!(num_fully(&red.instance, &m), red.instance.n());
            assert!(is_stable(&red.instance, &m, StabilityConcept::Cardinal));
        }
    }

    #[test]
    fn canonical_matching_osm_roommates_k4() {
        let g = k4();
        let red = reduce_is_to_welfare_osm_roommates(&g, 1).unwrap();
        let m = canonical_matching_from_is(&red, &[2]).unwrap();
        assert_eq!(welfare(&red.instance, &m), rat(40));
        assert!(is_stable(&red.instance, &m, StabilityConcept::Ordinal));
        // Per-gadget welfare of a selected vertex is d + 2 + L.
        let inst = &red.instance;
        let idx = |l: &str| inst.index_of(l).unwrap();
        let gadget: Rat = [
            inst.edge_weight(idx("u3"), idx("y3")) * m.get(idx("u3"), idx("y3")),
            inst.edge_weight(idx("x3"), idx("w3")) * m.get(idx("x3"), idx("w3")),
        ]
        .into_iter()
        .sum();
        assert_eq!(gadget, rat(3 + 2 + 20));
    }

    #[test]
    fn canonical_rejects_dependent_sets() {
        let g = k4();
        let red = reduce_is_to_welfare_csm(&g, 2).unwrap();
        assert!(canonical_matching_from_is(&red, &[0, 1]).is_err());
    }

    #[test]
    fn extract_recovers_the_set() {
        let g = path3();
        for k in 1..=2 {
            let red = reduce_is_to_welfare_csm(&g, k).unwrap();
            let set: Vec<usize> = if k == 1 { vec![1] } else { vec![0, 2] };
            let m = canonical_matching_from_is(&red, &set).unwrap();
            let got = extract_is(&red, &m).unwrap();
            assert_eq!(got, set);
        }
    }

    #[test]
    fn extract_refuses_below_threshold() {
        let g = path3();
        let red = reduce_is_to_welfare_csm(&g, 1).unwrap();
        let empty = FractionalMatching::new();
        assert!(extract_is(&red, &empty).is_err());
    }

    #[test]
    fn translate_smti_rank_arithmetic() {
        // An agent with three neighbors: top gets 3, bottom gets 1.
        let inst = Instance::from_parts(
            vec!["u".into(), "a".into(), "b".into(), "c".into()],
            Some(vec![Side::U, Side::W, Side::W, Side::W]),
            vec![
                (0, 1, rat(9), rat(1)),
                (0, 2, rat(5), rat(1)),
                (0, 3, rat(2), rat(1)),
            ],
        )
        .unwrap();
        let t = translate_smti(&inst).unwrap();
        let idx = |l: &str| t.index_of(l).unwrap();
        assert_eq!(t.sat(idx("u"), idx("a")), &rat(3));
        assert_eq!(t.sat(idx("u"), idx("b")), &rat(2));
        assert_eq!(t.sat(idx("u"), idx("c")), &rat(1));
        // Preference relation preserved.
        let before = derive_preferences(&inst);
        let after = derive_preferences(&t);
        for v in inst.agents() {
            assert_eq!(before.groups(v), after.groups(v));
        }
    }

    #[test]
    fn translate_smti_duality_on_complete_3x3() {
        // For rank-derived satisfactions on a complete profile, every
        // perfect integral matching N satisfies egal(N) + welfare(N) = 2|E|.
        let mut rng = crate::gen::seeded_rng(5);
        for _ in 0..5 {
            let inst = crate::gen::random_instance(
                &mut rng,
                &crate::gen::GenConfig {
                    n: 6,
                    edge_prob: 1.0,
                    max_sat: 4,
                    allow_ties: true,
                    zero_side_prob: 0.0,
                    bipartite: true,
                },
            );
            let t = translate_smti(&inst).unwrap();
            // All perfect integral matchings of the 3x3 complete graph.
            let us: Vec<usize> = (0..3).collect();
            let ws: Vec<usize> = (3..6).collect();
            let mut perm = ws.clone();
            permute(&mut perm, 0, &mut |p| {
                let mut n = FractionalMatching::new();
                for (i, &u) in us.iter().enumerate() {
                    n.set(u, p[i], rat(1));
                }
                let egal = crate::bipartite::egal_cost(&t, &n);
                let wel = welfare(&t, &n);
                assert_eq!(egal + wel, rat(2 * t.edges().len() as i64));
            });
        }
    }

    fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == p.len() {
            f(p);
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            permute(p, k + 1, f);
            p.swap(k, i);
        }
    }

    #[test]
    fn parse_edge_list_roundtrip() {
        let g = SourceGraph::parse_edge_list("1 2\n2 3\n# comment\n\n3 4\n").unwrap();
        assert_eq!(g.n, 4);
        assert_eq!(g.edges, vec![(0, 1), (1, 2), (2, 3)]);
        assert!(SourceGraph::parse_edge_list("1 1\n").is_err());
        assert!(SourceGraph::parse_edge_list("0 2\n").is_err());
        assert!(SourceGraph::parse_edge_list("").is_err());
    }
}

//! Fractional matchings and their aggregate quantities.
//!
//! A fractional matching assigns a nonnegative weight to each edge so that
//! every agent's incident weights sum to at most one. Only positive weights
//! are stored; gadget instances have large zero regions.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::Instance;
use crate::rational::{format_rat, parse_rat, Rat};

/// Sparse edge-weight map keyed by `(u, v)` with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FractionalMatching {
    weights: BTreeMap<(usize, usize), Rat>,
}

impl FractionalMatching {
    pub fn new() -> Self {
        Self::default()
    }

    fn key(u: usize, v: usize) -> (usize, usize) {
        if u < v {
            (u, v)
        } else {
            (v, u)
        }
    }

    /// Sets the weight of `{u,v}`; zero weights are removed from storage.
    pub fn set(&mut self, u: usize, v: usize, w: Rat) {
        assert_ne!(u, v, "matching weight on a self pair");
        if w.is_zero() {
            self.weights.remove(&Self::key(u, v));
        } else {
            self.weights.insert(Self::key(u, v), w);
        }
    }

    pub fn get(&self, u: usize, v: usize) -> Rat {
        self.weights
            .get(&Self::key(u, v))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    /// Positive-weight edges in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Rat)> {
        self.weights.iter().map(|(&(u, v), w)| (u, v, w))
    }

    pub fn support_size(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `sum x_j * M_j` over the given terms.
    pub fn convex_combination(terms: &[(Rat, &FractionalMatching)]) -> FractionalMatching {
        let mut out = FractionalMatching::new();
        for (coeff, m) in terms {
            for (u, v, w) in m.iter() {
                let cur = out.get(u, v);
                out.set(u, v, cur + coeff.clone() * w.clone());
            }
        }
        out
    }
}

/// Total weight incident to `v`.
pub fn mass(m: &FractionalMatching, v: usize) -> Rat {
    let mut total = Rat::zero();
    for (a, b, w) in m.iter() {
        if a == v || b == v {
            total += w.clone();
        }
    }
    total
}

/// Checks the two matching invariants; the report names the first
/// offending edge or agent in lexicographic order.
pub fn validate_matching(inst: &Instance, m: &FractionalMatching) -> Result<(), Error> {
    for (u, v, w) in m.iter() {
        if v >= inst.n() {
            return Err(Error::InvalidMatching(format!(
                "edge ({u}, {v}) references agent index out of range"
            )));
        }
        if !inst.has_edge(u, v) {
            return Err(Error::InvalidMatching(format!(
                "edge {:?}-{:?} is not in the acceptability graph",
                inst.label(u),
                inst.label(v)
            )));
        }
        if w < &Rat::zero() {
            return Err(Error::InvalidMatching(format!(
                "negative weight on edge {:?}-{:?}",
                inst.label(u),
                inst.label(v)
            )));
        }
    }
    for v in inst.agents() {
        let mv = mass(m, v);
        if mv > Rat::one() {
            return Err(Error::InvalidMatching(format!(
                "agent {:?} has mass {} > 1",
                inst.label(v),
                format_rat(&mv)
            )));
        }
    }
    Ok(())
}

/// Sum of `M(x, y')` over the neighbors `y'` that `x` weakly
/// (`strict = false`) or strictly (`strict = true`) prefers to `y`.
pub fn mass_above(
    inst: &Instance,
    m: &FractionalMatching,
    x: usize,
    y: usize,
    strict: bool,
) -> Result<Rat, Error> {
    if !inst.has_edge(x, y) {
        return Err(Error::InvalidMatching(format!(
            "{:?} is not acceptable to {:?}",
            inst.label(y),
            inst.label(x)
        )));
    }
    let threshold = inst.sat(x, y);
    let mut total = Rat::zero();
    for &yp in inst.neighbors(x) {
        let s = inst.sat(x, yp);
        let include = if strict { s > threshold } else { s >= threshold };
        if include {
            total += m.get(x, yp);
        }
    }
    Ok(total)
}

/// `U(v) = sum sat(v,u) * M(v,u)` over v's neighbors.
pub fn utility(inst: &Instance, m: &FractionalMatching, v: usize) -> Rat {
    let mut total = Rat::zero();
    for &u in inst.neighbors(v) {
        total += inst.sat(v, u) * m.get(v, u);
    }
    total
}

/// Sum of all agents' utilities; equals
/// `sum over edges of (sat(u,v) + sat(v,u)) * M(u,v)`.
pub fn welfare(inst: &Instance, m: &FractionalMatching) -> Rat {
    let mut total = Rat::zero();
    for (u, v, w) in m.iter() {
        total += inst.edge_weight(u, v) * w.clone();
    }
    total
}

/// Number of agents whose incident weights sum to exactly one.
pub fn num_fully(inst: &Instance, m: &FractionalMatching) -> usize {
    inst.agents().filter(|&v| mass(m, v).is_one()).count()
}

/// Number of agents with positive incident weight.
pub fn num_matched(inst: &Instance, m: &FractionalMatching) -> usize {
    inst.agents().filter(|&v| mass(m, v) > Rat::zero()).count()
}

/// Total weight over all edges.
pub fn total_mass(m: &FractionalMatching) -> Rat {
    let mut total = Rat::zero();
    for (_, _, w) in m.iter() {
        total += w.clone();
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Integrality {
    Integral,
    HalfIntegral,
    General,
}

/// Aggregate quantities and classification of a matching.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchingStats {
    pub welfare: Rat,
    pub num_fully: usize,
    pub total_mass: Rat,
    pub integrality: Integrality,
    /// True iff every agent is fully matched.
    pub perfect: bool,
}

/// Classifies a valid matching. Integral means all weights in `{0,1}`,
/// half-integral all weights in `{0, 1/2, 1}`; perfect means every agent
/// is fully matched (exact equality, no epsilon).
pub fn classify_matching(inst: &Instance, m: &FractionalMatching) -> MatchingStats {
    let half = Rat::new(1.into(), 2.into());
    let mut integral = true;
    let mut half_integral = true;
    for (_, _, w) in m.iter() {
        if !w.is_one() {
            integral = false;
            if *w != half {
                half_integral = false;
            }
        }
    }
    let integrality = if integral {
        Integrality::Integral
    } else if half_integral {
        Integrality::HalfIntegral
    } else {
        Integrality::General
    };
    let nf = num_fully(inst, m);
    MatchingStats {
        welfare: welfare(inst, m),
        num_fully: nf,
        total_mass: total_mass(m),
        integrality,
        perfect: nf == inst.n(),
    }
}

// ---------------------------------------------------------------------------
// Matching file format (JSON, against a named instance).
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MatchingEdgeEntry {
    u: String,
    v: String,
    value: String,
}

#[derive(Serialize, Deserialize)]
struct MatchingFile {
    edges: Vec<MatchingEdgeEntry>,
}

/// Parses a matching file and validates it against the instance.
pub fn parse_matching(inst: &Instance, text: &str) -> Result<FractionalMatching, Error> {
    let file: MatchingFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("malformed matching: {e}")))?;
    let mut m = FractionalMatching::new();
    for e in &file.edges {
        let u = inst
            .index_of(&e.u)
            .ok_or_else(|| Error::Parse(format!("matching references unknown agent {:?}", e.u)))?;
        let v = inst
            .index_of(&e.v)
            .ok_or_else(|| Error::Parse(format!("matching references unknown agent {:?}", e.v)))?;
        if u == v {
            return Err(Error::Parse(format!("matching pairs {:?} with itself", e.u)));
        }
        let w = parse_rat(&e.value)?;
        if w < Rat::zero() {
            return Err(Error::InvalidMatching(format!(
                "negative weight on edge {:?}-{:?}",
                e.u, e.v
            )));
        }
        m.set(u, v, w);
    }
    validate_matching(inst, &m)?;
    Ok(m)
}

pub fn serialize_matching(inst: &Instance, m: &FractionalMatching) -> String {
    let edges = m
        .iter()
        .map(|(u, v, w)| MatchingEdgeEntry {
            u: inst.label(u).to_string(),
            v: inst.label(v).to_string(),
            value: format_rat(w),
        })
        .collect();
    serde_json::to_string_pretty(&MatchingFile { edges })
        .expect("matching serialization cannot fail")
}

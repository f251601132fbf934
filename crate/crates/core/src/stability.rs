//! Blocking-pair detection and stability certification.
//!
//! Three stability concepts for fractional matchings. An edge `{u,v}` is
//!
//! * cardinally blocking if `U(u) < sat(u,v)` and `U(v) < sat(v,u)`,
//! * ordinally blocking if `M(u,>=v) < 1` and `M(v,>=u) < 1`,
//! * linearly blocking if `M(u,>=v) + M(v,>=u) - M(u,v) < 1`,
//!
//! and a matching is cardinally/ordinally/linearly stable iff no edge of
//! the respective kind exists. On integral matchings all three coincide
//! with classical (weak) stability.

use num_traits::One;
use serde::Serialize;

use crate::matching::{mass_above, utility, FractionalMatching};
use crate::model::Instance;
use crate::rational::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StabilityConcept {
    Cardinal,
    Ordinal,
    Linear,
}

impl StabilityConcept {
    pub const ALL: [StabilityConcept; 3] = [
        StabilityConcept::Cardinal,
        StabilityConcept::Ordinal,
        StabilityConcept::Linear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StabilityConcept::Cardinal => "cardinal",
            StabilityConcept::Ordinal => "ordinal",
            StabilityConcept::Linear => "linear",
        }
    }
}

/// Witness values for one blocking edge.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockingWitness {
    /// The two utilities, each below the partner's satisfaction.
    Cardinal { utility_u: Rat, utility_v: Rat },
    /// The two weakly-preferred mass sums, each below one.
    Ordinal { mass_u: Rat, mass_v: Rat },
    /// `M(u,>=v) + M(v,>=u) - M(u,v)`, below one.
    Linear { joint: Rat },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockingEdge {
    pub u: usize,
    pub v: usize,
    pub witness: BlockingWitness,
}

/// Exhaustive list of blocking edges for one concept, in lexicographic
/// edge order.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockingReport {
    pub concept: StabilityConcept,
    pub blockers: Vec<BlockingEdge>,
}

impl BlockingReport {
    pub fn is_stable(&self) -> bool {
        self.blockers.is_empty()
    }

    pub fn involves(&self, agent: usize) -> bool {
        self.blockers.iter().any(|b| b.u == agent || b.v == agent)
    }

    pub fn contains_edge(&self, x: usize, y: usize) -> bool {
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        self.blockers.iter().any(|e| e.u == a && e.v == b)
    }
}

/// Scans every edge of the instance and reports all blockers with their
/// witness values. The scan order (and hence the report) is lexicographic.
pub fn blocking_pairs(
    inst: &Instance,
    m: &FractionalMatching,
    concept: StabilityConcept,
) -> BlockingReport {
    let one = Rat::one();
    let mut blockers = Vec::new();
    for &(u, v) in inst.edges() {
        match concept {
            StabilityConcept::Cardinal => {
                let uu = utility(inst, m, u);
                let uv = utility(inst, m, v);
                if uu < *inst.sat(u, v) && uv < *inst.sat(v, u) {
                    blockers.push(BlockingEdge {
                        u,
                        v,
                        witness: BlockingWitness::Cardinal {
                            utility_u: uu,
                            utility_v: uv,
                        },
                    });
                }
            }
            StabilityConcept::Ordinal => {
                let mu = mass_above(inst, m, u, v, false).expect("edge in instance");
                let mv = mass_above(inst, m, v, u, false).expect("edge in instance");
                if mu < one && mv < one {
                    blockers.push(BlockingEdge {
                        u,
                        v,
                        witness: BlockingWitness::Ordinal {
                            mass_u: mu,
                            mass_v: mv,
                        },
                    });
                }
            }
            StabilityConcept::Linear => {
                let mu = mass_above(inst, m, u, v, false).expect("edge in instance");
                let mv = mass_above(inst, m, v, u, false).expect("edge in instance");
                let joint = mu + mv - m.get(u, v);
                if joint < one {
                    blockers.push(BlockingEdge {
                        u,
                        v,
                        witness: BlockingWitness::Linear { joint },
                    });
                }
            }
        }
    }
    BlockingReport { concept, blockers }
}

/// True iff `blocking_pairs(inst, m, concept)` is empty.
pub fn is_stable(inst: &Instance, m: &FractionalMatching, concept: StabilityConcept) -> bool {
    blocking_pairs(inst, m, concept).is_stable()
}

/// Classical (weak) stability test for integral matchings: a pair blocks
/// iff both endpoints strictly prefer each other to their current
/// assignment (being unmatched is worse than any acceptable partner).
/// Used as the independent reference point for the integral case.
pub fn integral_classically_stable(inst: &Instance, m: &FractionalMatching) -> bool {
    let partner = |x: usize| -> Option<usize> {
        inst.neighbors(x).iter().copied().find(|&y| m.get(x, y).is_one())
    };
    for &(u, v) in inst.edges() {
        let prefers = |x: usize, y: usize| -> bool {
            match partner(x) {
                None => true,
                Some(p) => inst.sat(x, y) > inst.sat(x, p),
            }
        };
        if prefers(u, v) && prefers(v, u) {
            return false;
        }
    }
    true
}

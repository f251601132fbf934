//! Instance representation: agents, pairwise satisfactions, and the
//! preference lists derived from them.
//!
//! An instance is an undirected acceptability graph together with a
//! satisfaction function `sat: V x V -> Q>=0`. An edge `{u,v}` exists iff
//! `sat(u,v) > 0` or `sat(v,u) > 0`, satisfactions to oneself are zero, and
//! no agent is isolated. Preference lists (with possible ties) are derived
//! by sorting each neighborhood by descending satisfaction.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rational::{format_rat, is_nonneg, parse_rat, Rat};

/// Bipartition tag for an agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    U,
    W,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::U => Side::W,
            Side::W => Side::U,
        }
    }
}

/// An agent handle: dense index plus display label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentId {
    pub index: usize,
    pub label: String,
}

/// An instance: agents, exact-rational satisfactions, and the induced
/// acceptability graph. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    labels: Vec<String>,
    declared_sides: Option<Vec<Side>>,
    sat: Vec<Vec<Rat>>,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Instance {
    /// Builds an instance from agent labels, optional bipartition tags, and
    /// edge entries `(u, v, sat_uv, sat_vu)` given by agent index.
    pub fn from_parts(
        labels: Vec<String>,
        declared_sides: Option<Vec<Side>>,
        edge_sats: Vec<(usize, usize, Rat, Rat)>,
    ) -> Result<Self, Error> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidInstance("no agents".into()));
        }
        {
            let mut seen = BTreeMap::new();
            for (i, l) in labels.iter().enumerate() {
                if l.is_empty() {
                    return Err(Error::InvalidInstance(format!("agent {i} has empty label")));
                }
                if let Some(j) = seen.insert(l.clone(), i) {
                    return Err(Error::InvalidInstance(format!(
                        "duplicate agent label {l:?} (agents {j} and {i})"
                    )));
                }
            }
        }
        if let Some(sides) = &declared_sides {
            if sides.len() != n {
                return Err(Error::InvalidInstance(
                    "bipartition tags must cover all agents or none".into(),
                ));
            }
        }

        let mut sat = vec![vec![Rat::zero(); n]; n];
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut edges = Vec::new();
        for (u, v, suv, svu) in edge_sats {
            if u >= n || v >= n {
                return Err(Error::InvalidInstance(format!(
                    "edge references agent index out of range ({u}, {v})"
                )));
            }
            if u == v {
                if suv.is_zero() && svu.is_zero() {
                    return Err(Error::InvalidInstance(format!(
                        "self edge on agent {:?}",
                        labels[u]
                    )));
                }
                return Err(Error::InvalidInstance(format!(
                    "self-satisfaction nonzero for agent {:?}",
                    labels[u]
                )));
            }
            if !is_nonneg(&suv) || !is_nonneg(&svu) {
                return Err(Error::InvalidInstance(format!(
                    "negative satisfaction on edge {:?}-{:?}",
                    labels[u], labels[v]
                )));
            }
            if suv.is_zero() && svu.is_zero() {
                return Err(Error::InvalidInstance(format!(
                    "edge {:?}-{:?} declared but both satisfactions are zero",
                    labels[u], labels[v]
                )));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            if adj[u].contains(&v) {
                return Err(Error::InvalidInstance(format!(
                    "duplicate edge {:?}-{:?}",
                    labels[a], labels[b]
                )));
            }
            if let Some(sides) = &declared_sides {
                if sides[u] == sides[v] {
                    return Err(Error::InvalidInstance(format!(
                        "edge {:?}-{:?} does not cross the declared bipartition",
                        labels[a], labels[b]
                    )));
                }
            }
            sat[u][v] = suv;
            sat[v][u] = svu;
            adj[u].push(v);
            adj[v].push(u);
            edges.push((a, b));
        }
        for (i, nb) in adj.iter_mut().enumerate() {
            if nb.is_empty() {
                return Err(Error::InvalidInstance(format!(
                    "agent {:?} is isolated",
                    labels[i]
                )));
            }
            nb.sort_unstable();
        }
        edges.sort_unstable();
        Ok(Instance {
            labels,
            declared_sides,
            sat,
            adj,
            edges,
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn agents(&self) -> impl Iterator<Item = usize> {
        0..self.n()
    }

    pub fn agent(&self, index: usize) -> AgentId {
        AgentId {
            index,
            label: self.labels[index].clone(),
        }
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.adj[u].binary_search(&v).is_ok()
    }

    /// Neighbors of `v` in ascending index order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn sat(&self, u: usize, v: usize) -> &Rat {
        &self.sat[u][v]
    }

    /// Declared bipartition tags, if the instance file carried them.
    pub fn declared_sides(&self) -> Option<&[Side]> {
        self.declared_sides.as_deref()
    }

    /// `sat(u,v) + sat(v,u)`, the welfare weight of an edge.
    pub fn edge_weight(&self, u: usize, v: usize) -> Rat {
        self.sat(u, v) + self.sat(v, u)
    }
}

/// Preference profile derived from an instance: per-agent tie groups in
/// descending satisfaction order, ranks, and structural flags.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceProfile {
    /// Per agent: groups of tied neighbors, most preferred group first;
    /// within a group, ascending agent index.
    groups: Vec<Vec<Vec<usize>>>,
    /// `rank[x][y]` = number of neighbors `x` strictly prefers to `y`
    /// (`usize::MAX` when `y` is not acceptable to `x`).
    rank: Vec<Vec<usize>>,
    has_ties: bool,
    /// Resolved bipartition (declared, or auto-detected by 2-coloring);
    /// `None` when the graph is not bipartite.
    bipartition: Option<Vec<Side>>,
}

impl PreferenceProfile {
    pub fn groups(&self, v: usize) -> &[Vec<usize>] {
        &self.groups[v]
    }

    /// Flattened preference list of `v` (descending satisfaction; ties in
    /// ascending index order).
    pub fn list(&self, v: usize) -> Vec<usize> {
        self.groups[v].iter().flatten().copied().collect()
    }

    /// `|{y' : y' is strictly preferred to y by x}|`. Tied neighbors share
    /// a rank; every most-preferred neighbor has rank 0.
    pub fn rank(&self, x: usize, y: usize) -> Option<usize> {
        match self.rank[x][y] {
            usize::MAX => None,
            r => Some(r),
        }
    }

    pub fn has_ties(&self) -> bool {
        self.has_ties
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartition.is_some()
    }

    pub fn bipartition(&self) -> Option<&[Side]> {
        self.bipartition.as_deref()
    }

    /// Agents on the given side of the resolved bipartition.
    pub fn side_agents(&self, side: Side) -> Vec<usize> {
        match &self.bipartition {
            Some(sides) => sides
                .iter()
                .enumerate()
                .filter(|(_, s)| **s == side)
                .map(|(i, _)| i)
                .collect(),
            None => Vec::new(),
        }
    }
}

/// Derives the preference profile of an instance. Total on valid instances;
/// ties are preserved, never broken here.
pub fn derive_preferences(inst: &Instance) -> PreferenceProfile {
    let n = inst.n();
    let mut groups = Vec::with_capacity(n);
    let mut rank = vec![vec![usize::MAX; n]; n];
    let mut has_ties = false;
    for v in 0..n {
        let mut nb: Vec<usize> = inst.neighbors(v).to_vec();
        // Descending satisfaction, ascending index within equal values.
        nb.sort_by(|a, b| {
            inst.sat(v, *b)
                .cmp(inst.sat(v, *a))
                .then_with(|| a.cmp(b))
        });
        let mut gs: Vec<Vec<usize>> = Vec::new();
        let mut counted = 0usize;
        for x in nb {
            let tied = gs
                .last()
                .map(|g| inst.sat(v, g[0]) == inst.sat(v, x))
                .unwrap_or(false);
            if tied {
                has_ties = true;
                gs.last_mut().unwrap().push(x);
            } else {
                counted += gs.last().map(|g| g.len()).unwrap_or(0);
                gs.push(vec![x]);
            }
            rank[v][x] = counted;
        }
        groups.push(gs);
    }
    let bipartition = match inst.declared_sides() {
        Some(sides) => Some(sides.to_vec()),
        None => two_color(inst),
    };
    PreferenceProfile {
        groups,
        rank,
        has_ties,
        bipartition,
    }
}

/// BFS 2-coloring; the smallest-index agent of each component goes to `U`.
fn two_color(inst: &Instance) -> Option<Vec<Side>> {
    let n = inst.n();
    let mut color: Vec<Option<Side>> = vec![None; n];
    for root in 0..n {
        if color[root].is_some() {
            continue;
        }
        color[root] = Some(Side::U);
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let cv = color[v].unwrap();
            for &u in inst.neighbors(v) {
                match color[u] {
                    None => {
                        color[u] = Some(cv.flip());
                        queue.push_back(u);
                    }
                    Some(cu) if cu == cv => return None,
                    Some(_) => {}
                }
            }
        }
    }
    Some(color.into_iter().map(|c| c.unwrap()).collect())
}

// ---------------------------------------------------------------------------
// Instance file format (UTF-8 JSON).
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct AgentEntry {
    label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    side: Option<Side>,
}

#[derive(Serialize, Deserialize)]
struct EdgeEntry {
    u: String,
    v: String,
    sat_uv: String,
    sat_vu: String,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    agents: Vec<AgentEntry>,
    edges: Vec<EdgeEntry>,
}

/// Parses an instance from its JSON wire format. Unlisted pairs have
/// satisfaction zero both ways.
pub fn parse_instance(text: &str) -> Result<Instance, Error> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("malformed instance: {e}")))?;
    let labels: Vec<String> = file.agents.iter().map(|a| a.label.clone()).collect();
    let tags: Vec<Option<Side>> = file.agents.iter().map(|a| a.side).collect();
    let tagged = tags.iter().filter(|t| t.is_some()).count();
    let sides = if tagged == 0 {
        None
    } else if tagged == labels.len() {
        Some(tags.into_iter().map(|t| t.unwrap()).collect())
    } else {
        return Err(Error::InvalidInstance(
            "bipartition tags must cover all agents or none".into(),
        ));
    };
    let index_of = |label: &str| -> Result<usize, Error> {
        labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Parse(format!("edge references unknown agent {label:?}")))
    };
    let mut edge_sats = Vec::with_capacity(file.edges.len());
    for e in &file.edges {
        edge_sats.push((
            index_of(&e.u)?,
            index_of(&e.v)?,
            parse_rat(&e.sat_uv)?,
            parse_rat(&e.sat_vu)?,
        ));
    }
    Instance::from_parts(labels, sides, edge_sats)
}

/// Serializes an instance to its canonical JSON wire format.
pub fn serialize_instance(inst: &Instance) -> String {
    let agents = inst
        .agents()
        .map(|i| AgentEntry {
            label: inst.label(i).to_string(),
            side: inst.declared_sides().map(|s| s[i]),
        })
        .collect();
    let edges = inst
        .edges()
        .iter()
        .map(|&(u, v)| EdgeEntry {
            u: inst.label(u).to_string(),
            v: inst.label(v).to_string(),
            sat_uv: format_rat(inst.sat(u, v)),
            sat_vu: format_rat(inst.sat(v, u)),
        })
        .collect();
    let file = InstanceFile { agents, edges };
    serde_json::to_string_pretty(&file).expect("instance serialization cannot fail")
}

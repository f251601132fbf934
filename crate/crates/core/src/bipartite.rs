//! Polynomial algorithms for strict bipartite instances: deferred
//! acceptance, the rotation poset of stable integral matchings, stable
//! matching enumeration, maximum-welfare (minimum-egalitarian) stable
//! matchings via a minimum cut, and the support decomposition of a
//! fractional matching into integral matchings.
//!
//! On bipartite instances without ties every ordinally stable matching is
//! a convex combination of stable integral matchings, so these routines
//! also realize the optimal ordinally stable matching for both objectives.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::flow::FlowNetwork;
use crate::matching::{mass, num_fully, validate_matching, welfare, FractionalMatching};
use crate::model::{derive_preferences, Instance, Side};
use crate::partition::{StrictLists, Table};
use crate::rational::{rat, Rat};

/// Resolved bipartition of an instance together with strict lists.
pub(crate) struct BipartiteStrict {
    pub prefs: StrictLists,
    pub side_of: Vec<Side>,
    pub u_side: Vec<usize>,
}

pub(crate) fn bipartite_strict(inst: &Instance) -> Result<BipartiteStrict, Error> {
    let profile = derive_preferences(inst);
    let Some(sides) = profile.bipartition() else {
        return Err(Error::NotBipartite(
            "operation requires a bipartite instance".into(),
        ));
    };
    let side_of = sides.to_vec();
    if profile.has_ties() {
        return Err(Error::TiesPresent(
            "operation requires strict preferences".into(),
        ));
    }
    let prefs = StrictLists::from_strict_instance(inst)?;
    let u_side = inst.agents().filter(|&v| side_of[v] == Side::U).collect();
    Ok(BipartiteStrict {
        prefs,
        side_of,
        u_side,
    })
}

/// Deferred acceptance with the given proposing side. The result is the
/// proposer-optimal stable integral matching; unmatched agents stay out.
pub fn gale_shapley(inst: &Instance, proposing: Side) -> Result<FractionalMatching, Error> {
    let bp = bipartite_strict(inst)?;
    let proposers: Vec<usize> = inst
        .agents()
        .filter(|&v| bp.side_of[v] == proposing)
        .collect();
    let mut next_choice = vec![0usize; inst.n()];
    let mut held: Vec<Option<usize>> = vec![None; inst.n()];
    let mut queue: Vec<usize> = proposers;
    while let Some(p) = queue.pop() {
        let list = &bp.prefs.lists[p];
        while next_choice[p] < list.len() {
            let r = list[next_choice[p]];
            match held[r] {
                None => {
                    held[r] = Some(p);
                    break;
                }
                Some(q) => {
                    if bp.prefs.prefers(r, p, q) {
                        held[r] = Some(p);
                        next_choice[q] += 1;
                        queue.push(q);
                        break;
                    }
                    next_choice[p] += 1;
                }
            }
        }
    }
    let mut m = FractionalMatching::new();
    for (r, p) in held.iter().enumerate() {
        if let Some(p) = p {
            m.set(*p, r, Rat::one());
        }
    }
    Ok(m)
}

/// One rotation: the matched pairs `(u, w)` at exposure time and the
/// partner each `u` moves to when the rotation is eliminated.
#[derive(Debug, Clone)]
pub struct Rotation {
    pub pairs: Vec<(usize, usize)>,
    pub moves_to: Vec<usize>,
    /// Change in welfare caused by eliminating this rotation.
    pub welfare_delta: Rat,
}

/// The rotation poset of a strict bipartite instance. Stable integral
/// matchings correspond one-to-one to predecessor-closed subsets of the
/// rotations; the empty set is the U-optimal matching.
pub struct RotationPoset {
    /// U-side partner map of the U-optimal stable matching.
    m0: BTreeMap<usize, usize>,
    /// Rotations in elimination (topological) order.
    pub rotations: Vec<Rotation>,
    /// Direct predecessor indices per rotation.
    pub preds: Vec<Vec<usize>>,
}

impl RotationPoset {
    pub fn build(inst: &Instance) -> Result<Self, Error> {
        let bp = bipartite_strict(inst)?;
        let mut table = Table::new(&bp.prefs);
        let mut queue: std::collections::VecDeque<usize> = inst.agents().collect();
        table.stabilize(&mut queue);

        let mut m0 = BTreeMap::new();
        for &u in &bp.u_side {
            if let Some(w) = table.first(u) {
                m0.insert(u, w);
            }
        }

        // Eliminate rotations down to the U-pessimal matching, labeling every
        // pair deleted along the way with the rotation that removed it.
        let mut rotations: Vec<Rotation> = Vec::new();
        let mut produced_by: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut deleted_by: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut preds: Vec<Vec<usize>> = Vec::new();
        loop {
            let Some(&start) = bp.u_side.iter().find(|&&u| table.len[u] >= 2) else {
                break;
            };
            let mut seq: Vec<usize> = Vec::new();
            let mut seen_at = vec![usize::MAX; inst.n()];
            let mut a = start;
            let cycle = loop {
                if seen_at[a] != usize::MAX {
                    break seq.split_off(seen_at[a]);
                }
                seen_at[a] = seq.len();
                seq.push(a);
                let b = table.second(a).ok_or_else(|| {
                    Error::Unsupported("internal: rotation walk hit a short list".into())
                })?;
                a = table.last(b).ok_or_else(|| {
                    Error::Unsupported("internal: rotation walk hit an empty list".into())
                })?;
            };
            let r = cycle.len();
            let pairs: Vec<(usize, usize)> = cycle
                .iter()
                .map(|&u| (u, table.first(u).expect("rotation member has a partner")))
                .collect();
            let moves_to: Vec<usize> = (0..r).map(|i| pairs[(i + 1) % r].1).collect();
            let mut delta = Rat::zero();
            for (i, &(u, w)) in pairs.iter().enumerate() {
                delta += inst.edge_weight(u, moves_to[i]) - inst.edge_weight(u, w);
            }

            let idx = rotations.len();
            let mut direct = Vec::new();
            for (i, &(u, w)) in pairs.iter().enumerate() {
                // The rotation that produced the pair (u, w), if any.
                if let Some(&p) = produced_by.get(&(u, w)) {
                    direct.push(p);
                }
                // Rotations that deleted the pairs strictly between w and
                // the move target on u's list.
                let w_next = moves_to[i];
                for &mid in &bp.prefs.lists[u] {
                    if bp.prefs.prefers(u, w, mid) && bp.prefs.prefers(u, mid, w_next) {
                        if let Some(&p) = deleted_by.get(&(u, mid)) {
                            direct.push(p);
                        }
                    }
                }
            }
            direct.sort_unstable();
            direct.dedup();

            let log_mark = table.log.len();
            for &(u, w) in &pairs {
                table.delete_pair(u, w);
                queue.push_back(u);
                queue.push_back(w);
            }
            table.stabilize(&mut queue);
            for k in log_mark..table.log.len() {
                let (x, y) = table.log[k];
                let key = if bp.side_of[x] == Side::U { (x, y) } else { (y, x) };
                deleted_by.entry(key).or_insert(idx);
            }
            for (i, &(u, _)) in pairs.iter().enumerate() {
                produced_by.insert((u, moves_to[i]), idx);
            }
            rotations.push(Rotation {
                pairs,
                moves_to,
                welfare_delta: delta,
            });
            preds.push(direct);
        }
        Ok(RotationPoset {
            m0,
            rotations,
            preds,
        })
    }

    /// The U-optimal stable matching (the empty closed subset).
    pub fn u_optimal(&self) -> FractionalMatching {
        self.matching_for(&vec![false; self.rotations.len()])
    }

    /// Materializes the stable matching of a predecessor-closed subset.
    pub fn matching_for(&self, include: &[bool]) -> FractionalMatching {
        let mut partner = self.m0.clone();
        for (i, rot) in self.rotations.iter().enumerate() {
            if include[i] {
                for (k, &(u, _)) in rot.pairs.iter().enumerate() {
                    partner.insert(u, rot.moves_to[k]);
                }
            }
        }
        let mut m = FractionalMatching::new();
        for (&u, &w) in &partner {
            m.set(u, w, Rat::one());
        }
        m
    }

    /// Enumerates every predecessor-closed subset, calling `f` on each.
    /// Stops with an error once `cap` subsets have been emitted.
    pub fn for_each_closed_subset(
        &self,
        cap: usize,
        mut f: impl FnMut(&[bool]),
    ) -> Result<usize, Error> {
        let q = self.rotations.len();
        let mut include = vec![false; q];
        let mut count = 0usize;
        fn rec(
            poset: &RotationPoset,
            i: usize,
            include: &mut Vec<bool>,
            count: &mut usize,
            cap: usize,
            f: &mut impl FnMut(&[bool]),
        ) -> Result<(), Error> {
            if i == poset.rotations.len() {
                *count += 1;
                if *count > cap {
                    return Err(Error::BudgetExceeded(format!(
                        "more than {cap} stable matchings"
                    )));
                }
                f(include);
                return Ok(());
            }
            include[i] = false;
            rec(poset, i + 1, include, count, cap, f)?;
            if poset.preds[i].iter().all(|&p| include[p]) {
                include[i] = true;
                rec(poset, i + 1, include, count, cap, f)?;
                include[i] = false;
            }
            Ok(())
        }
        rec(self, 0, &mut include, &mut count, cap, &mut f)?;
        Ok(count)
    }

    /// Maximum-weight predecessor-closed subset with rotation weights
    /// `welfare_delta`, by the standard minimum-cut selection.
    pub fn max_welfare_closed_subset(&self) -> Vec<bool> {
        let q = self.rotations.len();
        if q == 0 {
            return Vec::new();
        }
        // Source/sink network: positive-weight rotations hang off the
        // source, negative ones feed the sink, and each rotation points at
        // its direct predecessors with infinite capacity.
        let mut net = FlowNetwork::new(q + 2);
        let (s, t) = (q, q + 1);
        let infinite: Rat = self
            .rotations
            .iter()
            .map(|r| {
                let d = r.welfare_delta.clone();
                if d.is_negative() {
                    -d
                } else {
                    d
                }
            })
            .sum::<Rat>()
            + Rat::one();
        for (i, rot) in self.rotations.iter().enumerate() {
            let d = &rot.welfare_delta;
            if d > &Rat::zero() {
                net.add_edge(s, i, d.clone());
            } else if d < &Rat::zero() {
                net.add_edge(i, t, -d.clone());
            }
            for &p in &self.preds[i] {
                net.add_edge(i, p, infinite.clone());
            }
        }
        net.max_flow(s, t);
        let side = net.min_cut_source_side(s);
        (0..q).map(|i| side[i]).collect()
    }
}

/// All classically stable integral matchings, via closed-subset
/// enumeration of the rotation poset. Errors out if more than `cap`
/// matchings exist.
pub fn enumerate_stable_integral(
    inst: &Instance,
    cap: usize,
) -> Result<Vec<FractionalMatching>, Error> {
    let poset = RotationPoset::build(inst)?;
    let mut out = Vec::new();
    poset.for_each_closed_subset(cap, |inc| out.push(poset.matching_for(inc)))?;
    out.sort_by(|a, b| {
        let ea: Vec<_> = a.iter().map(|(u, v, _)| (u, v)).collect();
        let eb: Vec<_> = b.iter().map(|(u, v, _)| (u, v)).collect();
        ea.cmp(&eb)
    });
    out.dedup();
    Ok(out)
}

/// The stable integral matching with maximum welfare, found as a
/// minimum-weight cut over the rotation poset. For satisfaction values
/// derived from ranks this is exactly the minimum-egalitarian-cost stable
/// matching.
pub fn min_egalitarian_stable(inst: &Instance) -> Result<(FractionalMatching, Rat), Error> {
    let poset = RotationPoset::build(inst)?;
    let include = poset.max_welfare_closed_subset();
    let m = poset.matching_for(&include);
    let value = welfare(inst, &m);
    Ok((m, value))
}

/// Egalitarian cost of an integral matching: the sum over matched agents
/// of the rank of their partner.
pub fn egal_cost(inst: &Instance, m: &FractionalMatching) -> Rat {
    let prefs = derive_preferences(inst);
    let mut total = 0usize;
    for (u, v, w) in m.iter() {
        if w.is_one() {
            total += prefs.rank(u, v).expect("matched pair is acceptable");
            total += prefs.rank(v, u).expect("matched pair is acceptable");
        }
    }
    rat(total as i64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BipartiteObjective {
    MaxFull,
    MaxWelfare,
}

/// Optimal ordinally stable matching of a strict bipartite instance, for
/// either objective. Every stable integral matching matches the same set
/// of agents, so deferred acceptance already maximizes the number of fully
/// matched agents; the welfare objective reduces to the maximum-welfare
/// stable integral matching. The returned value is globally optimal over
/// all ordinally stable fractional matchings.
pub fn optimal_osm_bipartite_strict(
    inst: &Instance,
    objective: BipartiteObjective,
) -> Result<(FractionalMatching, Rat), Error> {
    match objective {
        BipartiteObjective::MaxFull => {
            let m = gale_shapley(inst, Side::U)?;
            let value = rat(num_fully(inst, &m) as i64);
            Ok((m, value))
        }
        BipartiteObjective::MaxWelfare => min_egalitarian_stable(inst),
    }
}

/// One convex-combination decomposition of a bipartite fractional
/// matching: positive coefficients summing to one, each with an integral
/// matching, reconstructing every edge weight exactly.
#[derive(Debug, Clone)]
pub struct SupportDecomposition {
    pub terms: Vec<(Rat, FractionalMatching)>,
}

impl SupportDecomposition {
    /// Exact reconstruction check against `m`.
    pub fn reconstructs(&self, m: &FractionalMatching) -> bool {
        let refs: Vec<(Rat, &FractionalMatching)> = self
            .terms
            .iter()
            .map(|(c, t)| (c.clone(), t))
            .collect();
        &FractionalMatching::convex_combination(&refs) == m
    }
}

/// Decomposes a valid bipartite fractional matching into a convex
/// combination of integral matchings by peeling: at each step a covering
/// integral matching on the positive support is extracted (every agent
/// whose remaining slack is exhausted must be covered) and the largest
/// feasible coefficient is subtracted. The peeled matching is chosen
/// lexicographically smallest, so the decomposition is deterministic.
pub fn support_decompose(
    inst: &Instance,
    m: &FractionalMatching,
) -> Result<SupportDecomposition, Error> {
    validate_matching(inst, m)?;
    let profile = derive_preferences(inst);
    let Some(sides) = profile.bipartition() else {
        return Err(Error::NotBipartite(
            "support decomposition requires a bipartite instance".into(),
        ));
    };
    let side_of = sides.to_vec();

    let mut residual = m.clone();
    let mut budget = Rat::one();
    let mut terms: Vec<(Rat, FractionalMatching)> = Vec::new();
    while budget > Rat::zero() {
        let support: Vec<(usize, usize)> = residual.iter().map(|(u, v, _)| (u, v)).collect();
        let required: Vec<usize> = inst
            .agents()
            .filter(|&v| mass(&residual, v) == budget)
            .collect();
        let matching = lex_min_covering_matching(inst, &side_of, &support, &required)?;

        // Largest coefficient that keeps every uncovered agent's remaining
        // mass within the shrunken budget.
        let mut delta = budget.clone();
        let mut covered = vec![false; inst.n()];
        for &(u, w) in &matching {
            covered[u] = true;
            covered[w] = true;
            delta = delta.min(residual.get(u, w));
        }
        for v in inst.agents() {
            if !covered[v] {
                let slack = budget.clone() - mass(&residual, v);
                delta = delta.min(slack);
            }
        }
        debug_assert!(delta > Rat::zero());
        let mut term = FractionalMatching::new();
        for &(u, w) in &matching {
            term.set(u, w, Rat::one());
            let left = residual.get(u, w) - delta.clone();
            residual.set(u, w, left);
        }
        terms.push((delta.clone(), term));
        budget -= delta;
    }
    if !residual.is_empty() {
        return Err(Error::Unsupported(
            "internal: support peeling left residual mass".into(),
        ));
    }
    Ok(SupportDecomposition { terms })
}

/// Lexicographically smallest integral matching inside `support` covering
/// all `required` agents. Greedy over edges in lexicographic order, each
/// tentatively fixed and kept iff a covering completion still exists.
fn lex_min_covering_matching(
    inst: &Instance,
    side_of: &[Side],
    support: &[(usize, usize)],
    required: &[usize],
) -> Result<Vec<(usize, usize)>, Error> {
    let mut fixed: Vec<(usize, usize)> = Vec::new();
    let mut used = vec![false; inst.n()];
    if !covering_exists(inst, side_of, support, required, &used) {
        return Err(Error::Unsupported(
            "internal: no covering matching on the support".into(),
        ));
    }
    let mut edges = support.to_vec();
    edges.sort_unstable();
    for &(u, w) in &edges {
        if used[u] || used[w] {
            continue;
        }
        fixed.push((u, w));
        used[u] = true;
        used[w] = true;
        if !covering_exists(inst, side_of, support, required, &used) {
            fixed.pop();
            used[u] = false;
            used[w] = false;
        }
    }
    Ok(fixed)
}

/// Does a matching within `support` exist that covers every `required`
/// agent, given the already-fixed pairs?
fn covering_exists(
    inst: &Instance,
    side_of: &[Side],
    support: &[(usize, usize)],
    required: &[usize],
    used: &[bool],
) -> bool {
    let missing: Vec<usize> = required.iter().copied().filter(|&v| !used[v]).collect();
    if missing.is_empty() {
        return true;
    }
    // Unit-capacity flow with lower bound one on the required agents'
    // terminal edges, via the usual excess/deficit transformation.
    let n = inst.n();
    let s = n;
    let t = n + 1;
    let ss = n + 2;
    let tt = n + 3;
    let mut net = FlowNetwork::new(n + 4);
    let mut lb_edges = 0usize;
    for &v in inst.agents().collect::<Vec<_>>().iter() {
        if used[v] {
            continue;
        }
        let req = required.contains(&v);
        let (from, to) = if side_of[v] == Side::U { (s, v) } else { (v, t) };
        if req {
            // lower bound 1, capacity 1: residual capacity 0 plus
            // excess/deficit bookkeeping.
            net.add_edge(ss, to, Rat::one());
            net.add_edge(from, tt, Rat::one());
            lb_edges += 1;
        } else {
            net.add_edge(from, to, Rat::one());
        }
    }
    for &(u, w) in support {
        if used[u] || used[w] {
            continue;
        }
        let (a, b) = if side_of[u] == Side::U { (u, w) } else { (w, u) };
        net.add_edge(a, b, Rat::one());
    }
    net.add_edge(t, s, rat(n as i64));
    let need = rat(lb_edges as i64);
    net.max_flow(ss, tt) == need
}

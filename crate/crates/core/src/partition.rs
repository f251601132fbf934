//! Stable partitions for strict preferences, the induced half-integral
//! matching, and the tie-breaking wrapper that produces an ordinally
//! stable matching for any instance in `O(n^2)`.
//!
//! A stable partition is a permutation `pi` on the agents such that for
//! every agent `v`:
//!
//! 1. if `pi(v) != pi^-1(v)` then both `{v, pi(v)}` and `{v, pi^-1(v)}`
//!    are edges and `sat(v, pi(v)) > sat(v, pi^-1(v))`;
//! 2. for every neighbor `u` of `v`, if `pi(v) = v` or
//!    `sat(v,u) > sat(v, pi^-1(v))`, then `sat(u, pi^-1(u)) > sat(u, v)`.
//!
//! The permutation decomposes into singletons, transpositions, and cycles.
//! Transpositions contribute weight 1 and cycle edges weight 1/2 to the
//! induced matching, which matches every non-singleton fully.
//!
//! The computation runs Irving's phase-1 deletions to a reduced table and
//! then eliminates rotations, retaining each odd party it encounters as a
//! cycle. The result is re-verified against the definition before it is
//! returned, and the singleton set is cross-checked against the phase-1
//! empty lists.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::matching::FractionalMatching;
use crate::model::{derive_preferences, Instance, PreferenceProfile};
use crate::rational::{ratio, Rat};
use crate::stability::{is_stable, StabilityConcept};

/// Deterministic tie-breaking policy for Algorithm-1 style runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TieBreakPolicy {
    pub seed: u64,
    pub mode: TieBreakMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreakMode {
    /// Within a tie group, earlier agent index is preferred.
    IndexOrder,
    /// Each tie group is shuffled by a seeded generator.
    SeededShuffle,
}

impl TieBreakPolicy {
    pub fn index_order() -> Self {
        TieBreakPolicy {
            seed: 0,
            mode: TieBreakMode::IndexOrder,
        }
    }

    pub fn seeded(seed: u64) -> Self {
        TieBreakPolicy {
            seed,
            mode: TieBreakMode::SeededShuffle,
        }
    }
}

/// Strict preference lists with rank lookups; either derived from a strict
/// instance or obtained by breaking ties under a policy.
#[derive(Debug, Clone)]
pub struct StrictLists {
    /// Per agent: neighbors in strictly descending preference.
    pub lists: Vec<Vec<usize>>,
    /// `rank[x][y]`: position of `y` in `x`'s list (`usize::MAX` if absent).
    rank: Vec<Vec<usize>>,
}

impl StrictLists {
    fn from_lists(n: usize, lists: Vec<Vec<usize>>) -> Self {
        let mut rank = vec![vec![usize::MAX; n]; n];
        for (x, list) in lists.iter().enumerate() {
            for (i, &y) in list.iter().enumerate() {
                rank[x][y] = i;
            }
        }
        StrictLists { lists, rank }
    }

    /// Strict lists of a tie-free instance.
    pub fn from_strict_instance(inst: &Instance) -> Result<Self, Error> {
        let prefs = derive_preferences(inst);
        Self::from_strict_profile(inst, &prefs)
    }

    fn from_strict_profile(inst: &Instance, prefs: &PreferenceProfile) -> Result<Self, Error> {
        if prefs.has_ties() {
            return Err(Error::TiesPresent(
                "strict preferences required; break ties first".into(),
            ));
        }
        let lists = inst.agents().map(|v| prefs.list(v)).collect();
        Ok(Self::from_lists(inst.n(), lists))
    }

    /// Breaks ties under the policy; within a group `IndexOrder` keeps
    /// ascending index, `SeededShuffle` permutes it reproducibly.
    pub fn tie_broken(inst: &Instance, policy: TieBreakPolicy) -> Self {
        let prefs = derive_preferences(inst);
        let mut lists = Vec::with_capacity(inst.n());
        let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
        for v in inst.agents() {
            let mut list = Vec::new();
            for group in prefs.groups(v) {
                let mut g = group.clone();
                if policy.mode == TieBreakMode::SeededShuffle {
                    g.shuffle(&mut rng);
                }
                list.extend(g);
            }
            lists.push(list);
        }
        Self::from_lists(inst.n(), lists)
    }

    /// True iff `x` strictly prefers `a` to `b` (both acceptable).
    pub fn prefers(&self, x: usize, a: usize, b: usize) -> bool {
        self.rank[x][a] < self.rank[x][b]
    }

    pub fn is_acceptable(&self, x: usize, y: usize) -> bool {
        self.rank[x][y] != usize::MAX
    }

    pub fn n(&self) -> usize {
        self.lists.len()
    }
}

/// Preference table with pair deletions; supports the phase-1 fixpoint and
/// rotation elimination. Every deletion is appended to `log`.
pub(crate) struct Table {
    lists: Vec<Vec<usize>>,
    pos: Vec<Vec<usize>>,
    alive: Vec<Vec<bool>>,
    head: Vec<usize>,
    tail: Vec<usize>,
    pub(crate) len: Vec<usize>,
    pub(crate) log: Vec<(usize, usize)>,
}

impl Table {
    pub(crate) fn new(prefs: &StrictLists) -> Self {
        let n = prefs.n();
        let lists = prefs.lists.clone();
        let mut pos = vec![vec![usize::MAX; n]; n];
        for (x, list) in lists.iter().enumerate() {
            for (i, &y) in list.iter().enumerate() {
                pos[x][y] = i;
            }
        }
        let alive = lists.iter().map(|l| vec![true; l.len()]).collect();
        let head = vec![0; n];
        let tail = lists.iter().map(|l| l.len().wrapping_sub(1)).collect();
        let len = lists.iter().map(|l| l.len()).collect();
        Table {
            lists,
            pos,
            alive,
            head,
            tail,
            len,
            log: Vec::new(),
        }
    }

    pub(crate) fn first(&mut self, x: usize) -> Option<usize> {
        if self.len[x] == 0 {
            return None;
        }
        while !self.alive[x][self.head[x]] {
            self.head[x] += 1;
        }
        Some(self.lists[x][self.head[x]])
    }

    pub(crate) fn last(&mut self, x: usize) -> Option<usize> {
        if self.len[x] == 0 {
            return None;
        }
        while !self.alive[x][self.tail[x]] {
            self.tail[x] -= 1;
        }
        Some(self.lists[x][self.tail[x]])
    }

    pub(crate) fn second(&mut self, x: usize) -> Option<usize> {
        if self.len[x] < 2 {
            return None;
        }
        self.first(x)?;
        let mut i = self.head[x] + 1;
        while i < self.lists[x].len() {
            if self.alive[x][i] {
                return Some(self.lists[x][i]);
            }
            i += 1;
        }
        None
    }

    /// Deletes the pair `{x, y}` in both directions. No-op if already gone.
    pub(crate) fn delete_pair(&mut self, x: usize, y: usize) -> bool {
        let i = self.pos[x][y];
        if i == usize::MAX || !self.alive[x][i] {
            return false;
        }
        self.alive[x][i] = false;
        self.len[x] -= 1;
        let j = self.pos[y][x];
        self.alive[y][j] = false;
        self.len[y] -= 1;
        self.log.push((x, y));
        true
    }

    /// Entries of `x`'s list strictly below `y` (alive only).
    fn alive_below(&self, x: usize, y: usize) -> Vec<usize> {
        let from = self.pos[x][y] + 1;
        (from..self.lists[x].len())
            .filter(|&i| self.alive[x][i])
            .map(|i| self.lists[x][i])
            .collect()
    }

    pub(crate) fn alive_list(&self, x: usize) -> Vec<usize> {
        self.lists[x]
            .iter()
            .enumerate()
            .filter(|(i, _)| self.alive[x][*i])
            .map(|(_, &y)| y)
            .collect()
    }

    /// Phase-1 fixpoint: repeatedly, for a queued agent `y` with first
    /// choice `x`, delete every pair `{x, z}` with `z` ranked strictly
    /// below `y`. At the fixpoint `last(first(y)) = y` for every agent
    /// with a non-empty list.
    pub(crate) fn stabilize(&mut self, queue: &mut VecDeque<usize>) {
        while let Some(y) = queue.pop_front() {
            let Some(x) = self.first(y) else { continue };
            if self.last(x) == Some(y) {
                continue;
            }
            for z in self.alive_below(x, y) {
                self.delete_pair(x, z);
                queue.push_back(z);
            }
        }
    }
}

/// A stable partition: the permutation plus its decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StablePartition {
    pi: Vec<usize>,
    pub singletons: Vec<usize>,
    pub transpositions: Vec<(usize, usize)>,
    /// Cycles of length >= 3, each listed from its smallest agent in the
    /// direction of `pi`.
    pub cycles: Vec<Vec<usize>>,
}

impl StablePartition {
    pub fn pi(&self, v: usize) -> usize {
        self.pi[v]
    }

    pub fn pi_inv(&self, v: usize) -> usize {
        self.pi.iter().position(|&w| w == v).unwrap()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.pi
    }

    pub fn is_singleton(&self, v: usize) -> bool {
        self.pi[v] == v
    }

    fn from_permutation(pi: Vec<usize>) -> Self {
        let n = pi.len();
        let mut seen = vec![false; n];
        let mut singletons = Vec::new();
        let mut transpositions = Vec::new();
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut cur = pi[start];
            while cur != start {
                seen[cur] = true;
                cyc.push(cur);
                cur = pi[cur];
            }
            match cyc.len() {
                1 => singletons.push(start),
                2 => transpositions.push((cyc[0], cyc[1])),
                _ => cycles.push(cyc),
            }
        }
        StablePartition {
            pi,
            singletons,
            transpositions,
            cycles,
        }
    }

    /// Displays the decomposition with instance labels.
    pub fn display(&self, inst: &Instance) -> String {
        let mut parts = Vec::new();
        for c in &self.cycles {
            let names: Vec<&str> = c.iter().map(|&v| inst.label(v)).collect();
            parts.push(format!("({})", names.join(" ")));
        }
        for &(a, b) in &self.transpositions {
            parts.push(format!("({} {})", inst.label(a), inst.label(b)));
        }
        for &s in &self.singletons {
            parts.push(format!("({})", inst.label(s)));
        }
        parts.join(" ")
    }
}

/// Outcome of the phase-1 deletions: the reduced lists and the agents left
/// with empty lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phase1Result {
    /// Per agent, the surviving preference list in preference order.
    pub reduced_lists: Vec<Vec<usize>>,
    /// Agents whose lists were exhausted; these are exactly the singleton
    /// agents of every stable partition.
    pub singletons: Vec<usize>,
}

/// Runs the phase-1 deletion loop on a strict instance.
pub fn irving_phase1(inst: &Instance) -> Result<Phase1Result, Error> {
    let prefs = StrictLists::from_strict_instance(inst)?;
    Ok(phase1_on(&prefs))
}

fn phase1_on(prefs: &StrictLists) -> Phase1Result {
    let n = prefs.n();
    let mut table = Table::new(prefs);
    let mut queue: VecDeque<usize> = (0..n).collect();
    table.stabilize(&mut queue);
    let reduced_lists: Vec<Vec<usize>> = (0..n).map(|x| table.alive_list(x)).collect();
    let singletons = (0..n).filter(|&x| table.len[x] == 0).collect();
    Phase1Result {
        reduced_lists,
        singletons,
    }
}

/// Computes a stable partition of a strict instance. The output is checked
/// against the definition and against the phase-1 singleton set before it
/// is returned.
pub fn compute_stable_partition(inst: &Instance) -> Result<StablePartition, Error> {
    compute_stable_partition_seeded(inst, None)
}

/// Same computation with a seeded internal processing order: the proposal
/// queue and the rotation start choices are permuted. Every run must agree
/// on the singleton set (they all produce valid stable partitions of the
/// same instance).
pub fn compute_stable_partition_seeded(
    inst: &Instance,
    seed: Option<u64>,
) -> Result<StablePartition, Error> {
    let prefs = StrictLists::from_strict_instance(inst)?;
    let order: Vec<usize> = match seed {
        None => (0..inst.n()).collect(),
        Some(s) => {
            let mut order: Vec<usize> = (0..inst.n()).collect();
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(s));
            order
        }
    };
    let partition = stable_partition_on(&prefs, &order)?;
    verify_stable_partition_lists(&prefs, &partition).map_err(|v| {
        Error::Unsupported(format!("internal: produced partition fails verification: {v}"))
    })?;
    Ok(partition)
}

fn stable_partition_on(prefs: &StrictLists, order: &[usize]) -> Result<StablePartition, Error> {
    let n = prefs.n();
    let mut table = Table::new(prefs);
    let mut queue: VecDeque<usize> = order.iter().copied().collect();
    table.stabilize(&mut queue);
    let phase1_singletons: Vec<usize> = (0..n).filter(|&x| table.len[x] == 0).collect();

    let mut recorded_cycles: Vec<Vec<usize>> = Vec::new();
    loop {
        let Some(start) = order.iter().copied().find(|&x| table.len[x] >= 2) else {
            break;
        };
        // Walk the exposed rotation: b_{i+1} = second(a_i),
        // a_{i+1} = last(b_{i+1}). Walked agents keep lists of length two
        // or more.
        let mut seq = Vec::new();
        let mut seen_at = vec![usize::MAX; n];
        let mut a = start;
        let rotation = loop {
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
        let firsts: Vec<usize> = rotation
            .iter()
            .map(|&ai| table.first(ai).expect("rotation member has entries"))
            .collect();
        let is_odd_party = rotation.iter().any(|ai| firsts.contains(ai));
        if is_odd_party {
            // Odd party: the first-choice pointers permute the party
            // members in one odd cycle, each member preferring its
            // successor (its current first) to its predecessor (its
            // current last).
            let mut party: Vec<usize> = rotation.clone();
            party.sort_unstable();
            let mut cyc = vec![rotation[0]];
            loop {
                let nxt = table
                    .first(*cyc.last().unwrap())
                    .expect("party member has entries");
                if nxt == cyc[0] {
                    break;
                }
                cyc.push(nxt);
                if cyc.len() > rotation.len() {
                    break;
                }
            }
            let mut cyc_sorted = cyc.clone();
            cyc_sorted.sort_unstable();
            if cyc_sorted != party || cyc.len() % 2 == 0 {
                return Err(Error::Unsupported(
                    "internal: malformed odd party in rotation elimination".into(),
                ));
            }
            for &ai in &cyc {
                for z in table.alive_list(ai) {
                    table.delete_pair(ai, z);
                    queue.push_back(z);
                }
            }
            recorded_cycles.push(cyc);
        } else {
            for (i, &ai) in rotation.iter().enumerate() {
                table.delete_pair(ai, firsts[i]);
                queue.push_back(ai);
                queue.push_back(firsts[i]);
            }
        }
        table.stabilize(&mut queue);
    }

    // Assemble the permutation: recorded cycles, then mutual single-entry
    // lists as transpositions, empty lists as singletons.
    let mut pi: Vec<usize> = (0..n).collect();
    let mut placed = vec![false; n];
    for cyc in &recorded_cycles {
        for i in 0..cyc.len() {
            pi[cyc[i]] = cyc[(i + 1) % cyc.len()];
            placed[cyc[i]] = true;
        }
    }
    for x in 0..n {
        if placed[x] || table.len[x] == 0 {
            continue;
        }
        if table.len[x] != 1 {
            return Err(Error::Unsupported(
                "internal: non-singleton list survived rotation elimination".into(),
            ));
        }
        let y = table.first(x).unwrap();
        if table.len[y] != 1 || table.first(y) != Some(x) {
            return Err(Error::Unsupported(
                "internal: unmatched semi-engagement after elimination".into(),
            ));
        }
        pi[x] = y;
        pi[y] = x;
        placed[x] = true;
        placed[y] = true;
    }
    let partition = StablePartition::from_permutation(pi);
    let mut singles = partition.singletons.clone();
    singles.sort_unstable();
    if singles != phase1_singletons {
        return Err(Error::Unsupported(
            "internal: singleton set deviates from phase-1 empty lists".into(),
        ));
    }
    Ok(partition)
}

/// A violated condition of the stable-partition definition, with witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionViolation {
    pub condition: u8,
    pub v: usize,
    pub u: usize,
    pub detail: String,
}

impl std::fmt::Display for PartitionViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "condition ({}) violated at agents ({}, {}): {}",
            self.condition, self.v, self.u, self.detail
        )
    }
}

/// Checks both conditions of the definition for every agent and neighbor
/// of a strict instance.
pub fn verify_stable_partition(
    inst: &Instance,
    pi: &[usize],
) -> Result<Result<(), PartitionViolation>, Error> {
    let prefs = StrictLists::from_strict_instance(inst)?;
    let partition = permutation_to_partition(inst.n(), pi)?;
    Ok(verify_stable_partition_lists(&prefs, &partition))
}

fn permutation_to_partition(n: usize, pi: &[usize]) -> Result<StablePartition, Error> {
    if pi.len() != n {
        return Err(Error::InvalidInstance(format!(
            "permutation has {} entries for {} agents",
            pi.len(),
            n
        )));
    }
    let mut seen = vec![false; n];
    for &img in pi {
        if img >= n || seen[img] {
            return Err(Error::InvalidInstance("not a permutation".into()));
        }
        seen[img] = true;
    }
    Ok(StablePartition::from_permutation(pi.to_vec()))
}

fn verify_stable_partition_lists(
    prefs: &StrictLists,
    p: &StablePartition,
) -> Result<(), PartitionViolation> {
    let n = prefs.n();
    let mut pi_inv = vec![0usize; n];
    for v in 0..n {
        pi_inv[p.pi(v)] = v;
    }
    for v in 0..n {
        let succ = p.pi(v);
        let pred = pi_inv[v];
        if succ == pred && succ != v && !prefs.is_acceptable(v, succ) {
            return Err(PartitionViolation {
                condition: 1,
                v,
                u: succ,
                detail: "transposition partner is not an acceptable partner".into(),
            });
        }
        if succ != pred {
            if !prefs.is_acceptable(v, succ) || !prefs.is_acceptable(v, pred) {
                return Err(PartitionViolation {
                    condition: 1,
                    v,
                    u: if prefs.is_acceptable(v, succ) { pred } else { succ },
                    detail: "cycle neighbor is not an acceptable partner".into(),
                });
            }
            if !prefs.prefers(v, succ, pred) {
                return Err(PartitionViolation {
                    condition: 1,
                    v,
                    u: succ,
                    detail: "agent does not strictly prefer its successor to its predecessor"
                        .into(),
                });
            }
        }
        // An agent "wants" a neighbor if it is a singleton or strictly
        // prefers the neighbor to its predecessor. Condition (2) forbids
        // mutual wanting; note that one's own successor is wanted but its
        // predecessor-side satisfaction is tied, never strictly better.
        let wants = |x: usize, y: usize| -> bool {
            p.is_singleton(x) || prefs.prefers(x, y, pi_inv[x])
        };
        for &u in &prefs.lists[v] {
            if wants(v, u) && wants(u, v) {
                return Err(PartitionViolation {
                    condition: 2,
                    v,
                    u,
                    detail: "both endpoints strictly gain over their predecessors".into(),
                });
            }
        }
    }
    Ok(())
}

/// Builds the half-integral matching induced by a partition: weight 1 on
/// transpositions, 1/2 on consecutive cycle pairs, 0 elsewhere. Every
/// matched agent ends up fully matched.
pub fn matching_from_partition(p: &StablePartition) -> FractionalMatching {
    let mut m = FractionalMatching::new();
    let half = ratio(1, 2);
    for &(a, b) in &p.transpositions {
        m.set(a, b, Rat::from_integer(1.into()));
    }
    for cyc in &p.cycles {
        for i in 0..cyc.len() {
            let a = cyc[i];
            let b = cyc[(i + 1) % cyc.len()];
            m.set(a, b, half.clone());
        }
    }
    m
}

/// Computes an ordinally stable matching for an arbitrary instance: break
/// ties under the policy, compute a stable partition of the tie-broken
/// lists, and return its induced matching. Ordinal stability against the
/// original (possibly tied) instance is re-checked before returning.
pub fn compute_osm_alg1(
    inst: &Instance,
    policy: TieBreakPolicy,
) -> Result<FractionalMatching, Error> {
    let (m, _) = compute_osm_alg1_with_partition(inst, policy)?;
    Ok(m)
}

/// Same as [`compute_osm_alg1`], also returning the tie-broken partition.
pub fn compute_osm_alg1_with_partition(
    inst: &Instance,
    policy: TieBreakPolicy,
) -> Result<(FractionalMatching, StablePartition), Error> {
    let prefs = StrictLists::tie_broken(inst, policy);
    let order: Vec<usize> = (0..inst.n()).collect();
    let partition = stable_partition_on(&prefs, &order)?;
    verify_stable_partition_lists(&prefs, &partition).map_err(|v| {
        Error::Unsupported(format!(
            "internal: tie-broken partition fails verification: {v}"
        ))
    })?;
    let m = matching_from_partition(&partition);
    if !is_stable(inst, &m, StabilityConcept::Ordinal) {
        return Err(Error::Unsupported(
            "internal: induced matching is not ordinally stable on the original instance".into(),
        ));
    }
    Ok((m, partition))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::matching::{classify_matching, mass, num_fully, Integrality};
    use crate::model::Instance;
    use crate::rational::rat;

    fn idx(inst: &Instance, l: &str) -> usize {
        inst.index_of(l).unwrap()
    }

    #[test]
    fn fig1_phase1_singleton_is_f() {
        let inst = fixtures::fig1();
        let res = irving_phase1(&inst).unwrap();
        assert_eq!(res.singletons, vec![idx(&inst, "f")]);
    }

    #[test]
    fn two_agent_instance_no_deletions() {
        let inst = fixtures::single_edge();
        let res = irving_phase1(&inst).unwrap();
        assert!(res.singletons.is_empty());
        assert_eq!(res.reduced_lists, vec![vec![1], vec![0]]);
    }

    #[test]
    fn cyclic_triangle_phase1_no_singletons() {
        let inst = fixtures::triangle_cyclic();
        let res = irving_phase1(&inst).unwrap();
        assert!(res.singletons.is_empty());
    }

    #[test]
    fn phase1_rejects_ties() {
        let inst = Instance::from_parts(
            vec!["x".into(), "y".into(), "z".into()],
            None,
            vec![(0, 1, rat(5), rat(1)), (0, 2, rat(5), rat(1))],
        )
        .unwrap();
        assert!(matches!(irving_phase1(&inst), Err(Error::TiesPresent(_))));
    }

    #[test]
    fn fig1_stable_partition_structure() {
        let inst = fixtures::fig1();
        let p = compute_stable_partition(&inst).unwrap();
        assert_eq!(p.singletons, vec![idx(&inst, "f")]);
        assert_eq!(p.transpositions, vec![(idx(&inst, "d"), idx(&inst, "e"))]);
        assert_eq!(p.cycles.len(), 1);
        let mut cyc = p.cycles[0].clone();
        cyc.sort_unstable();
        assert_eq!(cyc, vec![idx(&inst, "a"), idx(&inst, "b"), idx(&inst, "c")]);
    }

    #[test]
    fn fig1_partition_matching_is_green() {
        let inst = fixtures::fig1();
        let p = compute_stable_partition(&inst).unwrap();
        assert_eq!(matching_from_partition(&p), fixtures::fig1_green());
    }

    #[test]
    fn two_mutually_top_agents_form_transposition() {
        let inst = fixtures::single_edge();
        let p = compute_stable_partition(&inst).unwrap();
        assert_eq!(p.transpositions, vec![(0, 1)]);
        let m = matching_from_partition(&p);
        assert_eq!(
            classify_matching(&inst, &m).integrality,
            Integrality::Integral
        );
        assert_eq!(m.get(0, 1), rat(1));
    }

    #[test]
    fn triangle_partition_is_one_odd_cycle() {
        let inst = fixtures::triangle_cyclic();
        let p = compute_stable_partition(&inst).unwrap();
        assert_eq!(p.cycles.len(), 1);
        assert_eq!(p.cycles[0].len(), 3);
        let m = matching_from_partition(&p);
        for v in inst.agents() {
            assert_eq!(mass(&m, v), rat(1));
        }
    }

    /// Brute-force oracle: enumerate all permutations of the 5-cycle and
    /// collect those satisfying both conditions; the computed partition
    /// must be among them and every valid one must be a single 5-cycle.
    #[test]
    fn five_cycle_partition_matches_brute_force() {
        let inst = fixtures::five_cycle_cyclic();
        let n = inst.n();
        let mut valid = Vec::new();
        let mut perm: Vec<usize> = (0..n).collect();
        permute_all(&mut perm, 0, &mut |p| {
            if verify_stable_partition(&inst, p).unwrap().is_ok() {
                valid.push(p.to_vec());
            }
        });
        assert!(!valid.is_empty());
        for p in &valid {
            let sp = permutation_to_partition(n, p).unwrap();
            assert_eq!(sp.cycles.len(), 1, "stable partitions here are 5-cycles");
            assert_eq!(sp.cycles[0].len(), 5);
        }
        let computed = compute_stable_partition(&inst).unwrap();
        assert!(valid.contains(&computed.permutation().to_vec()));
    }

    fn permute_all(perm: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == perm.len() {
            f(perm);
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            permute_all(perm, k + 1, f);
            perm.swap(k, i);
        }
    }

    #[test]
    fn identity_permutation_fails_condition_two() {
        let inst = fixtures::fig1();
        let pi: Vec<usize> = (0..inst.n()).collect();
        let violation = verify_stable_partition(&inst, &pi).unwrap().unwrap_err();
        assert_eq!(violation.condition, 2);
    }

    #[test]
    fn transposition_on_two_agents_verifies() {
        let inst = fixtures::single_edge();
        assert!(verify_stable_partition(&inst, &[1, 0]).unwrap().is_ok());
    }

    #[test]
    fn fig1_partition_verifies() {
        let inst = fixtures::fig1();
        let p = compute_stable_partition(&inst).unwrap();
        assert!(verify_stable_partition(&inst, p.permutation())
            .unwrap()
            .is_ok());
    }

    #[test]
    fn alg1_on_fig1_gives_green_matching() {
        let inst = fixtures::fig1();
        let m = compute_osm_alg1(&inst, TieBreakPolicy::index_order()).unwrap();
        assert_eq!(m, fixtures::fig1_green());
    }

    #[test]
    fn alg1_with_ties_is_ordinal_for_every_order() {
        // One agent ties two partners; the output must be ordinally stable
        // against the tied instance whichever way ties are broken.
        let inst = Instance::from_parts(
            vec!["p".into(), "q".into(), "r".into()],
            None,
            vec![
                (0, 1, rat(5), rat(2)),
                (0, 2, rat(5), rat(1)),
                (1, 2, rat(1), rat(3)),
            ],
        )
        .unwrap();
        for policy in [
            TieBreakPolicy::index_order(),
            TieBreakPolicy::seeded(1),
            TieBreakPolicy::seeded(2),
            TieBreakPolicy::seeded(99),
        ] {
            let m = compute_osm_alg1(&inst, policy).unwrap();
            assert!(is_stable(&inst, &m, StabilityConcept::Ordinal));
        }
    }

    #[test]
    fn alg1_single_edge_matches_integrally() {
        let inst = fixtures::single_edge();
        let m = compute_osm_alg1(&inst, TieBreakPolicy::index_order()).unwrap();
        assert_eq!(m.get(0, 1), rat(1));
    }

    #[test]
    fn alg1_matched_agents_are_fully_matched() {
        let inst = fixtures::fig1();
        let (m, p) =
            compute_osm_alg1_with_partition(&inst, TieBreakPolicy::index_order()).unwrap();
        for v in inst.agents() {
            let mv = mass(&m, v);
            if p.is_singleton(v) {
                assert_eq!(mv, rat(0));
            } else {
                assert_eq!(mv, rat(1));
            }
        }
        assert_eq!(num_fully(&inst, &m), 5);
    }
}

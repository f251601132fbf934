//! Seeded random instance generation for property tests and the bench
//! subcommand.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Instance, Side};
use crate::rational::{rat, Rat};

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub n: usize,
    /// Probability of including each candidate pair.
    pub edge_prob: f64,
    /// With ties allowed, satisfactions are sampled from `1..=max_sat`;
    /// small values make ties frequent.
    pub max_sat: u64,
    pub allow_ties: bool,
    /// Probability that an edge is one-sided (one satisfaction zero).
    pub zero_side_prob: f64,
    pub bipartite: bool,
}

impl GenConfig {
    pub fn roommates(n: usize) -> Self {
        GenConfig {
            n,
            edge_prob: 0.5,
            max_sat: 3,
            allow_ties: true,
            zero_side_prob: 0.15,
            bipartite: false,
        }
    }

    pub fn strict(mut self) -> Self {
        self.allow_ties = false;
        self
    }

    pub fn bipartite(mut self) -> Self {
        self.bipartite = true;
        self
    }

    pub fn with_edge_prob(mut self, p: f64) -> Self {
        self.edge_prob = p;
        self
    }
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws a valid random instance: candidate pairs are sampled, isolated
/// agents are patched with one extra edge, and satisfactions are assigned
/// per agent (distinct values when ties are disallowed, at most one zero
/// per agent, never both sides zero).
pub fn random_instance(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> Instance {
    assert!(cfg.n >= 2, "instances need at least two agents");
    let n = cfg.n;
    let (labels, sides): (Vec<String>, Option<Vec<Side>>) = if cfg.bipartite {
        let half = n / 2;
        let mut labels = Vec::new();
        let mut sides = Vec::new();
        for i in 0..half.max(1) {
            labels.push(format!("u{i}"));
            sides.push(Side::U);
        }
        for i in 0..n - half.max(1) {
            labels.push(format!("w{i}"));
            sides.push(Side::W);
        }
        (labels, Some(sides))
    } else {
        ((0..n).map(|i| format!("p{i}")).collect(), None)
    };
    let n = labels.len();
    let cross_ok = |a: usize, b: usize| match &sides {
        Some(s) => s[a] != s[b],
        None => true,
    };

    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if cross_ok(a, b) && rng.gen_bool(cfg.edge_prob) {
                edges.push((a, b));
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
    }
    for a in 0..n {
        if adjacency[a].is_empty() {
            let candidates: Vec<usize> = (0..n).filter(|&b| b != a && cross_ok(a, b)).collect();
            let &b = candidates
                .choose(rng)
                .expect("bipartite generator keeps both sides inhabited");
            let key = if a < b { (a, b) } else { (b, a) };
            edges.push(key);
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
    }
    edges.sort_unstable();
    edges.dedup();

    // Per-agent satisfaction values towards each neighbor.
    let mut sat_of: Vec<std::collections::BTreeMap<usize, Rat>> = vec![Default::default(); n];
    for a in 0..n {
        let neigh: Vec<usize> = edges
            .iter()
            .filter_map(|&(x, y)| {
                if x == a {
                    Some(y)
                } else if y == a {
                    Some(x)
                } else {
                    None
                }
            })
            .collect();
        if cfg.allow_ties {
            for &b in &neigh {
                let v = rng.gen_range(1..=cfg.max_sat) as i64;
                sat_of[a].insert(b, rat(v));
            }
        } else {
            let mut pool: Vec<i64> = (1..=neigh.len() as i64 * 2).collect();
            pool.shuffle(rng);
            for (i, &b) in neigh.iter().enumerate() {
                sat_of[a].insert(b, rat(pool[i]));
            }
        }
    }
    // One-sided edges: zero out one endpoint occasionally, at most one
    // zero per agent so strict instances stay strict.
    let mut has_zero = vec![false; n];
    for &(a, b) in &edges {
        if rng.gen_bool(cfg.zero_side_prob) {
            let (za, zb) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
            if !has_zero[za] {
                sat_of[za].insert(zb, rat(0));
                has_zero[za] = true;
            }
        }
    }

    let edge_sats = edges
        .iter()
        .map(|&(a, b)| {
            (
                a,
                b,
                sat_of[a].get(&b).unwrap().clone(),
                sat_of[b].get(&a).unwrap().clone(),
            )
        })
        .collect();
    Instance::from_parts(labels, sides, edge_sats).expect("generator output is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::derive_preferences;

    #[test]
    fn generated_instances_are_valid_and_reproducible() {
        let cfg = GenConfig::roommates(9);
        let mut r1 = seeded_rng(7);
        let mut r2 = seeded_rng(7);
        let a = random_instance(&mut r1, &cfg);
        let b = random_instance(&mut r2, &cfg);
        assert_eq!(a, b);
        assert!(a.edges().len() >= a.n() / 2);
    }

    #[test]
    fn strict_mode_has_no_ties() {
        let cfg = GenConfig::roommates(10).strict();
        let mut rng = seeded_rng(11);
        for _ in 0..25 {
            let inst = random_instance(&mut rng, &cfg);
            assert!(!derive_preferences(&inst).has_ties());
        }
    }

    #[test]
    fn bipartite_mode_is_bipartite() {
        let cfg = GenConfig::roommates(9).strict().bipartite();
        let mut rng = seeded_rng(13);
        for _ in 0..25 {
            let inst = random_instance(&mut rng, &cfg);
            let prefs = derive_preferences(&inst);
            assert!(prefs.is_bipartite());
        }
    }

    #[test]
    fn tied_mode_often_has_ties() {
        let cfg = GenConfig::roommates(10);
        let mut rng = seeded_rng(17);
        let tied = (0..20)
            .filter(|_| derive_preferences(&random_instance(&mut rng, &cfg)).has_ties())
            .count();
        assert!(tied >= 10, "only {tied} of 20 instances had ties");
    }
}

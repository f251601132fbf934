//! Independent brute-force verifiers.
//!
//! `brute_force_optimum` enumerates every assignment of the binary
//! decisions directly from the stability definitions — which endpoint of
//! each edge is satisfied, which agents count as fully matched — and
//! solves one LP per assignment. It shares only the LP kernel with the
//! branch-and-bound solver; all orchestration here is separate, which is
//! the point of an oracle. Budgets are enforced before any enumeration.

use num_traits::{One, Zero};

use crate::error::Error;
use crate::lp::{solve_exact_lp, Cmp, LinearProgram, LpOutcome};
use crate::matching::{mass, FractionalMatching};
use crate::milp::{Mode, Objective, OptProblem};
use crate::model::Instance;
use crate::rational::{rat, Rat};
use crate::stability::{integral_classically_stable, is_stable, StabilityConcept};

/// Hard enumeration caps, checked before any work starts.
#[derive(Debug, Clone, Copy)]
pub struct OracleBudget {
    pub max_agents: usize,
    pub max_edges: usize,
    pub max_enum: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_agents: 12,
            max_edges: 16,
            max_enum: 1 << 22,
        }
    }
}

/// Exact optimum by full enumeration over the binary choices, each solved
/// with one exact LP. Returns the optimum value and a witness matching.
pub fn brute_force_optimum(
    inst: &Instance,
    problem: &OptProblem,
    budget: OracleBudget,
) -> Result<(Rat, FractionalMatching), Error> {
    let m_edges = inst.edges().len();
    if m_edges > budget.max_edges {
        return Err(Error::BudgetExceeded(format!(
            "{m_edges} edges exceed the oracle budget of {}",
            budget.max_edges
        )));
    }
    if inst.n() > budget.max_agents {
        return Err(Error::BudgetExceeded(format!(
            "{} agents exceed the oracle budget of {}",
            inst.n(),
            budget.max_agents
        )));
    }
    let combos: u64 = 1 << m_edges;
    if combos > budget.max_enum {
        return Err(Error::BudgetExceeded(
            "edge-assignment enumeration exceeds the budget".into(),
        ));
    }

    let mut best: Option<(Rat, FractionalMatching)> = None;
    for code in 0..combos {
        let side_u: Vec<bool> = (0..m_edges).map(|i| code >> i & 1 == 1).collect();
        match problem.objective {
            Objective::MaxWelfare | Objective::MaxMass => {
                let lp = assignment_lp(inst, problem, &side_u, &[]);
                if let LpOutcome::Optimal { x, value } = solve_exact_lp(&lp)? {
                    let m = matching_of(inst, &x);
                    if !is_stable(inst, &m, problem.concept) {
                        continue;
                    }
                    if best.as_ref().map(|(b, _)| value > *b).unwrap_or(true) {
                        best = Some((value, m));
                    }
                }
            }
            Objective::MaxFull => {
                // Enumerate the counted agent sets by descending size with
                // monotone pruning: subsets of an infeasible requirement
                // set stay feasible, supersets do not.
                let incumbent = best.as_ref().map(|(b, _)| b.clone());
                let relax = assignment_lp(inst, problem, &side_u, &[]);
                let LpOutcome::Optimal { .. } = solve_exact_lp(&relax)? else {
                    continue;
                };
                if let Some((k, m)) = best_full_for_assignment(inst, problem, &side_u, incumbent)?
                {
                    if best.as_ref().map(|(b, _)| rat(k as i64) > *b).unwrap_or(true) {
                        best = Some((rat(k as i64), m));
                    }
                }
            }
        }
        if let (Some((v, _)), Mode::Decision(t)) = (&best, &problem.mode) {
            if v >= t {
                break;
            }
        }
    }
    let (value, m) = best.ok_or_else(|| {
        Error::Unsupported("internal: no stable assignment found by the oracle".into())
    })?;
    Ok((value, m))
}

/// Largest set of agents that can be simultaneously fully matched under
/// the fixed side assignment; sets are tried in decreasing size.
fn best_full_for_assignment(
    inst: &Instance,
    problem: &OptProblem,
    side_u: &[bool],
    incumbent: Option<Rat>,
) -> Result<Option<(usize, FractionalMatching)>, Error> {
    let n = inst.n();
    let floor = incumbent
        .map(|r| {
            let f = r.floor();
            f.numer().try_into().unwrap_or(0usize)
        })
        .unwrap_or(0);
    for k in (floor.saturating_add(1)..=n).rev() {
        let mut subset: Vec<usize> = (0..k).collect();
        loop {
            let lp = assignment_lp(inst, problem, side_u, &subset);
            if let LpOutcome::Optimal { x, .. } = solve_exact_lp(&lp)? {
                let m = matching_of(inst, &x);
                if is_stable(inst, &m, problem.concept) {
                    return Ok(Some((k, m)));
                }
            }
            if !next_combination(&mut subset, n) {
                break;
            }
        }
    }
    Ok(None)
}

/// Advances to the next k-subset of `0..n` in lexicographic order.
fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < i + n - k {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// The LP for one full assignment: mass rows, the chosen side row per
/// edge, joint rows for the linear concept, full-mass rows for the
/// required agents, and the objective.
fn assignment_lp(
    inst: &Instance,
    problem: &OptProblem,
    side_u: &[bool],
    fully: &[usize],
) -> LinearProgram {
    let m_edges = inst.edges().len();
    let eidx: std::collections::BTreeMap<(usize, usize), usize> = inst
        .edges()
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, i))
        .collect();
    let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
    let mut lp = LinearProgram::new(m_edges, true);
    for v in inst.agents() {
        let coeffs: Vec<(usize, Rat)> = inst
            .neighbors(v)
            .iter()
            .map(|&w| (eidx[&key(v, w)], Rat::one()))
            .collect();
        lp.add_row(coeffs.clone(), Cmp::Le, Rat::one());
        if fully.contains(&v) {
            lp.add_row(coeffs, Cmp::Ge, Rat::one());
        }
    }
    for (i, &(u, v)) in inst.edges().iter().enumerate() {
        match problem.concept {
            StabilityConcept::Linear => {
                let mut acc: std::collections::BTreeMap<usize, Rat> =
                    std::collections::BTreeMap::new();
                for &w in inst.neighbors(u) {
                    if inst.sat(u, w) >= inst.sat(u, v) {
                        *acc.entry(eidx[&key(u, w)]).or_insert_with(Rat::zero) += Rat::one();
                    }
                }
                for &w in inst.neighbors(v) {
                    if inst.sat(v, w) >= inst.sat(v, u) {
                        *acc.entry(eidx[&key(v, w)]).or_insert_with(Rat::zero) += Rat::one();
                    }
                }
                *acc.entry(i).or_insert_with(Rat::zero) -= Rat::one();
                lp.add_row(acc.into_iter().collect(), Cmp::Ge, Rat::one());
            }
            StabilityConcept::Cardinal => {
                let (x, other) = if side_u[i] { (u, v) } else { (v, u) };
                if inst.sat(x, other).is_zero() {
                    continue;
                }
                let coeffs: Vec<(usize, Rat)> = inst
                    .neighbors(x)
                    .iter()
                    .map(|&w| (eidx[&key(x, w)], inst.sat(x, w).clone()))
                    .collect();
                lp.add_row(coeffs, Cmp::Ge, inst.sat(x, other).clone());
            }
            StabilityConcept::Ordinal => {
                let (x, other) = if side_u[i] { (u, v) } else { (v, u) };
                let coeffs: Vec<(usize, Rat)> = inst
                    .neighbors(x)
                    .iter()
                    .filter(|&&w| inst.sat(x, w) >= inst.sat(x, other))
                    .map(|&w| (eidx[&key(x, w)], Rat::one()))
                    .collect();
                lp.add_row(coeffs, Cmp::Ge, Rat::one());
            }
        }
    }
    let objective = match problem.objective {
        Objective::MaxWelfare => inst
            .edges()
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| (i, inst.edge_weight(u, v)))
            .collect(),
        Objective::MaxMass | Objective::MaxFull => {
            (0..m_edges).map(|i| (i, Rat::one())).collect()
        }
    };
    lp.set_objective(objective);
    lp
}

fn matching_of(inst: &Instance, x: &[Rat]) -> FractionalMatching {
    let mut m = FractionalMatching::new();
    for (i, &(u, v)) in inst.edges().iter().enumerate() {
        m.set(u, v, x[i].clone());
    }
    m
}

/// Enumerates all integral matchings and filters them by the classical
/// blocking-pair test.
pub fn brute_force_stable_integral(
    inst: &Instance,
    budget: OracleBudget,
) -> Result<Vec<FractionalMatching>, Error> {
    if inst.n() > budget.max_agents.min(10) {
        return Err(Error::BudgetExceeded(format!(
            "{} agents exceed the enumeration budget",
            inst.n()
        )));
    }
    let edges = inst.edges().to_vec();
    let mut out = Vec::new();
    let mut stack = vec![(0usize, FractionalMatching::new())];
    while let Some((i, m)) = stack.pop() {
        if i == edges.len() {
            if integral_classically_stable(inst, &m) {
                out.push(m);
            }
            continue;
        }
        let (u, v) = edges[i];
        stack.push((i + 1, m.clone()));
        if mass(&m, u).is_zero() && mass(&m, v).is_zero() {
            let mut m2 = m;
            m2.set(u, v, Rat::one());
            stack.push((i + 1, m2));
        }
    }
    out.sort_by(|a, b| {
        let ea: Vec<_> = a.iter().map(|(u, v, _)| (u, v)).collect();
        let eb: Vec<_> = b.iter().map(|(u, v, _)| (u, v)).collect();
        ea.cmp(&eb)
    });
    Ok(out)
}

/// Maximum independent set size of a small source graph (0-based edges),
/// by subset enumeration.
pub fn max_independent_set(n: usize, edges: &[(usize, usize)], max_n: usize) -> Result<usize, Error> {
    if n > max_n || n >= 26 {
        return Err(Error::BudgetExceeded(format!(
            "{n} vertices exceed the independent-set enumeration budget"
        )));
    }
    let mut best = 0usize;
    for code in 0u32..(1 << n) {
        let size = code.count_ones() as usize;
        if size <= best {
            continue;
        }
        let ok = edges
            .iter()
            .all(|&(a, b)| code >> a & 1 == 0 || code >> b & 1 == 0);
        if ok {
            best = size;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::milp::{milp_solve, MilpOptions};

    #[test]
    fn fig1_cardinal_welfare_oracle() {
        let inst = fixtures::fig1();
        let problem = OptProblem::optimize(StabilityConcept::Cardinal, Objective::MaxWelfare);
        let (value, m) = brute_force_optimum(&inst, &problem, OracleBudget::default()).unwrap();
        assert_eq!(value, rat(11));
        assert!(is_stable(&inst, &m, StabilityConcept::Cardinal));
    }

    #[test]
    fn fig1_ordinal_welfare_oracle() {
        let inst = fixtures::fig1();
        let problem = OptProblem::optimize(StabilityConcept::Ordinal, Objective::MaxWelfare);
        let (value, _) = brute_force_optimum(&inst, &problem, OracleBudget::default()).unwrap();
        assert_eq!(value, rat(10));
    }

    #[test]
    fn single_edge_max_full_is_2() {
        let inst = fixtures::single_edge();
        for concept in StabilityConcept::ALL {
            let problem = OptProblem::optimize(concept, Objective::MaxFull);
            let (value, _) =
                brute_force_optimum(&inst, &problem, OracleBudget::default()).unwrap();
            assert_eq!(value, rat(2), "{concept:?}");
        }
    }

    #[test]
    fn oracle_equals_milp_on_fig1() {
        let inst = fixtures::fig1();
        for concept in [StabilityConcept::Cardinal, StabilityConcept::Ordinal] {
            for objective in [Objective::MaxWelfare, Objective::MaxFull] {
                let problem = OptProblem::optimize(concept, objective);
                let (oracle_value, _) =
                    brute_force_optimum(&inst, &problem, OracleBudget::default()).unwrap();
                let sol = milp_solve(
                    &inst,
                    &problem,
                    &MilpOptions::bnb(),
                )
                .unwrap();
                assert_eq!(oracle_value, sol.value, "{concept:?} {objective:?}");
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let inst = fixtures::example1();
        let problem = OptProblem::optimize(StabilityConcept::Cardinal, Objective::MaxWelfare);
        let err = brute_force_optimum(
            &inst,
            &problem,
            OracleBudget {
                max_edges: 4,
                ..Default::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded(_)));
    }

    #[test]
    fn stable_integral_enumeration_example1() {
        let inst = fixtures::example1();
        let got = brute_force_stable_integral(&inst, OracleBudget::default()).unwrap();
        assert_eq!(got.len(), 3);
        for m in fixtures::example1_stable_integrals() {
            assert!(got.contains(&m));
        }
    }

    #[test]
    fn stable_integral_enumeration_fig1_empty() {
        let inst = fixtures::fig1();
        let got = brute_force_stable_integral(&inst, OracleBudget::default()).unwrap();
        assert!(got.is_empty(), "cyclic triangle rules out stability");
    }

    #[test]
    fn stable_integral_enumeration_lattice3x3() {
        let inst = fixtures::lattice3x3();
        let got = brute_force_stable_integral(&inst, OracleBudget::default()).unwrap();
        assert_eq!(got.len(), 3);
    }

    #[test]
    fn independent_set_sizes() {
        // K4, P3, C5.
        assert_eq!(
            max_independent_set(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], 10).unwrap(),
            1
        );
        assert_eq!(max_independent_set(3, &[(0, 1), (1, 2)], 10).unwrap(), 2);
        assert_eq!(
            max_independent_set(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)], 10).unwrap(),
            2
        );
    }
}

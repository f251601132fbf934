//! Mixed-integer solving for optimal stable fractional matchings.
//!
//! The formulations follow the standard encoding: one fractional variable
//! per edge with per-agent mass rows, one binary `y` per edge choosing
//! which endpoint is satisfied (cardinal: utility at least the partner's
//! satisfaction; ordinal: weakly-preferred mass at least one), binaries
//! `z` per agent counting the fully matched, and a welfare row for
//! threshold queries. Linear stability needs no binaries at all.
//!
//! Two solving modes share the exact LP kernel:
//!
//! * exhaustive enumeration of all binary assignments (the default, capped)
//!   - literally "guess the integer variables, solve the LP";
//! * best-bound branch and bound over the same decisions, whose relaxation
//!   replaces each undecided `y` with the projected row obtained by
//!   eliminating it (for ordinal instances the joint-mass rows of linear
//!   stability are added as valid cuts, since ordinal stability implies
//!   linear stability).
//!
//! Every returned matching is re-certified against the original stability
//! definitions before it is handed back.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::Error;
use crate::lp::{solve_exact_lp, Cmp, LinearProgram, LinearRow, LpOutcome};
use crate::matching::{mass, num_fully, welfare, FractionalMatching};
use crate::model::Instance;
use crate::rational::{rat, Rat};
use crate::stability::{blocking_pairs, is_stable, StabilityConcept};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    MaxFull,
    MaxWelfare,
    MaxMass,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    Optimize,
    /// Decide whether the objective can reach the threshold.
    Decision(Rat),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptProblem {
    pub concept: StabilityConcept,
    pub objective: Objective,
    pub mode: Mode,
}

impl OptProblem {
    pub fn optimize(concept: StabilityConcept, objective: Objective) -> Self {
        OptProblem {
            concept,
            objective,
            mode: Mode::Optimize,
        }
    }

    pub fn decide(concept: StabilityConcept, objective: Objective, threshold: Rat) -> Self {
        OptProblem {
            concept,
            objective,
            mode: Mode::Decision(threshold),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    ThresholdMet,
    ThresholdUnmet,
}

#[derive(Debug, Clone)]
pub struct MilpSolution {
    pub matching: FractionalMatching,
    /// Resolved edge binaries: `true` means the first endpoint's side row
    /// holds (the pair cannot block through it).
    pub y: BTreeMap<(usize, usize), bool>,
    /// Resolved fully-matched binaries (present for `MaxFull`).
    pub z: BTreeMap<usize, bool>,
    pub value: Rat,
    pub status: SolveStatus,
}

#[derive(Debug, Clone, Default)]
pub struct MilpOptions {
    /// Maximum number of binaries for exhaustive mode (default 24).
    pub exhaustive_cap: Option<u32>,
    /// Branch and bound instead of exhaustive enumeration.
    pub branch_and_bound: bool,
    /// Optional starting incumbent; re-certified before use.
    pub warm_start: Option<FractionalMatching>,
}

impl MilpOptions {
    pub fn bnb() -> Self {
        MilpOptions {
            branch_and_bound: true,
            ..Default::default()
        }
    }

    pub fn cap(&self) -> u32 {
        self.exhaustive_cap.unwrap_or(24)
    }
}

/// One per-edge stability disjunction: the pair must be non-blocking via
/// its first or its second endpoint. `None` rows are vacuously satisfied
/// (a zero-satisfaction side can never participate in a cardinal block).
#[derive(Debug, Clone)]
pub struct EdgeDisjunction {
    pub edge: (usize, usize),
    pub row_u: Option<LinearRow>,
    pub row_v: Option<LinearRow>,
    /// The `y`-free projection of the pair of rows; `None` when the edge
    /// can never block.
    pub projected: Option<LinearRow>,
}

/// Instantiated constraint templates for one instance and concept.
pub struct MilpConstraints {
    /// Per-agent mass rows (the fractional-matching polytope).
    pub mass_rows: Vec<LinearRow>,
    /// Stability disjunctions, one per edge that could block.
    pub disjunctions: Vec<EdgeDisjunction>,
    /// Joint weak-mass rows (linear stability); hard rows for the linear
    /// concept and valid cuts for the ordinal one.
    pub lsm_rows: Vec<LinearRow>,
    /// Edges carrying a binary `y` variable.
    pub y_edges: Vec<(usize, usize)>,
}

impl MilpConstraints {
    /// Total stability row count of the binary formulation (two rows per
    /// disjunction for cardinal/ordinal, one joint row per edge for
    /// linear).
    pub fn stability_row_count(&self, concept: StabilityConcept) -> usize {
        match concept {
            StabilityConcept::Linear => self.lsm_rows.len(),
            _ => 2 * self.disjunctions.len(),
        }
    }
}

fn edge_index_map(inst: &Instance) -> BTreeMap<(usize, usize), usize> {
    inst.edges()
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, i))
        .collect()
}

/// Side row: the endpoint `x` of `edge` is satisfied with respect to it.
fn side_row(
    inst: &Instance,
    eidx: &BTreeMap<(usize, usize), usize>,
    x: usize,
    other: usize,
    concept: StabilityConcept,
) -> Option<LinearRow> {
    let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
    match concept {
        StabilityConcept::Cardinal => {
            // U(x) >= sat(x, other); vacuous when that satisfaction is 0.
            if inst.sat(x, other).is_zero() {
                return None;
            }
            let coeffs = inst
                .neighbors(x)
                .iter()
                .filter(|&&w| !inst.sat(x, w).is_zero())
                .map(|&w| (eidx[&key(x, w)], inst.sat(x, w).clone()))
                .collect();
            Some(LinearRow {
                coeffs,
                cmp: Cmp::Ge,
                rhs: inst.sat(x, other).clone(),
            })
        }
        StabilityConcept::Ordinal => {
            // M(x, >= other) >= 1.
            let threshold = inst.sat(x, other);
            let coeffs = inst
                .neighbors(x)
                .iter()
                .filter(|&&w| inst.sat(x, w) >= threshold)
                .map(|&w| (eidx[&key(x, w)], Rat::one()))
                .collect();
            Some(LinearRow {
                coeffs,
                cmp: Cmp::Ge,
                rhs: Rat::one(),
            })
        }
        StabilityConcept::Linear => None,
    }
}

fn lsm_row(
    inst: &Instance,
    eidx: &BTreeMap<(usize, usize), usize>,
    u: usize,
    v: usize,
) -> LinearRow {
    // M(u,>=v) + M(v,>=u) - M(u,v) >= 1; the pair's own variable appears
    // in both cumulative sums, so its net coefficient is one.
    let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
    let mut acc: BTreeMap<usize, Rat> = BTreeMap::new();
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
    *acc.entry(eidx[&(u, v)]).or_insert_with(Rat::zero) -= Rat::one();
    LinearRow {
        coeffs: acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .collect(),
        cmp: Cmp::Ge,
        rhs: Rat::one(),
    }
}

/// Builds the constraint templates of the chosen concept: mass rows are
/// always included; cardinal and ordinal get one binary per edge with the
/// two coupled rows, linear gets one joint row per edge and no binaries.
pub fn build_constraints(inst: &Instance, concept: StabilityConcept) -> MilpConstraints {
    let eidx = edge_index_map(inst);
    let mut mass_rows = Vec::new();
    for v in inst.agents() {
        let coeffs = inst
            .neighbors(v)
            .iter()
            .map(|&w| {
                let key = if v < w { (v, w) } else { (w, v) };
                (eidx[&key], Rat::one())
            })
            .collect();
        mass_rows.push(LinearRow {
            coeffs,
            cmp: Cmp::Le,
            rhs: Rat::one(),
        });
    }
    let mut disjunctions = Vec::new();
    let mut lsm_rows = Vec::new();
    let mut y_edges = Vec::new();
    for &(u, v) in inst.edges() {
        lsm_rows.push(lsm_row(inst, &eidx, u, v));
        if concept == StabilityConcept::Linear {
            continue;
        }
        let row_u = side_row(inst, &eidx, u, v, concept);
        let row_v = side_row(inst, &eidx, v, u, concept);
        let projected = match concept {
            StabilityConcept::Cardinal => {
                match (&row_u, &row_v) {
                    (Some(ru), Some(rv)) => {
                        // sat(v,u) * U(u) + sat(u,v) * U(v)
                        //   >= sat(u,v) * sat(v,u).
                        let a = inst.sat(u, v).clone();
                        let b = inst.sat(v, u).clone();
                        let mut acc: BTreeMap<usize, Rat> = BTreeMap::new();
                        for (j, c) in &ru.coeffs {
                            *acc.entry(*j).or_insert_with(Rat::zero) += b.clone() * c.clone();
                        }
                        for (j, c) in &rv.coeffs {
                            *acc.entry(*j).or_insert_with(Rat::zero) += a.clone() * c.clone();
                        }
                        Some(LinearRow {
                            coeffs: acc.into_iter().collect(),
                            cmp: Cmp::Ge,
                            rhs: a * b,
                        })
                    }
                    // A vacuous side means the edge can never block.
                    _ => None,
                }
            }
            StabilityConcept::Ordinal => {
                let (Some(ru), Some(rv)) = (&row_u, &row_v) else {
                    unreachable!("ordinal side rows always exist")
                };
                let mut acc: BTreeMap<usize, Rat> = BTreeMap::new();
                for (j, c) in ru.coeffs.iter().chain(rv.coeffs.iter()) {
                    *acc.entry(*j).or_insert_with(Rat::zero) += c.clone();
                }
                Some(LinearRow {
                    coeffs: acc.into_iter().collect(),
                    cmp: Cmp::Ge,
                    rhs: Rat::one(),
                })
            }
            StabilityConcept::Linear => unreachable!(),
        };
        if projected.is_some() {
            y_edges.push((u, v));
            disjunctions.push(EdgeDisjunction {
                edge: (u, v),
                row_u,
                row_v,
                projected,
            });
        }
    }
    MilpConstraints {
        mass_rows,
        disjunctions,
        lsm_rows,
        y_edges,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum YChoice {
    Open,
    SideU,
    SideV,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ZChoice {
    Open,
    One,
    Zero,
}

struct SearchContext<'a> {
    inst: &'a Instance,
    cons: MilpConstraints,
    problem: &'a OptProblem,
    num_x: usize,
    /// Variable count including `z` columns for `MaxFull`.
    num_vars: usize,
}

impl<'a> SearchContext<'a> {
    fn new(inst: &'a Instance, problem: &'a OptProblem) -> Self {
        let cons = build_constraints(inst, problem.concept);
        let num_x = inst.edges().len();
        let num_vars = match problem.objective {
            Objective::MaxFull => num_x + inst.n(),
            _ => num_x,
        };
        SearchContext {
            inst,
            cons,
            problem,
            num_x,
            num_vars,
        }
    }

    fn z_col(&self, agent: usize) -> usize {
        self.num_x + agent
    }

    fn objective_coeffs(&self) -> Vec<(usize, Rat)> {
        match self.problem.objective {
            Objective::MaxFull => self
                .inst
                .agents()
                .map(|v| (self.z_col(v), Rat::one()))
                .collect(),
            Objective::MaxWelfare => self
                .inst
                .edges()
                .iter()
                .enumerate()
                .map(|(i, &(u, v))| (i, self.inst.edge_weight(u, v)))
                .collect(),
            Objective::MaxMass => (0..self.num_x).map(|i| (i, Rat::one())).collect(),
        }
    }

    /// Relaxation (or fully resolved) LP for the given choices.
    fn build_lp(&self, ys: &[YChoice], zs: &[ZChoice]) -> LinearProgram {
        let mut lp = LinearProgram::new(self.num_vars, true);
        for row in &self.cons.mass_rows {
            lp.rows.push(row.clone());
        }
        if self.problem.concept == StabilityConcept::Linear
            || self.problem.concept == StabilityConcept::Ordinal
        {
            for row in &self.cons.lsm_rows {
                lp.rows.push(row.clone());
            }
        }
        for (d, choice) in self.cons.disjunctions.iter().zip(ys) {
            let row = match choice {
                YChoice::Open => &d.projected,
                YChoice::SideU => &d.row_u,
                YChoice::SideV => &d.row_v,
            };
            if let Some(row) = row {
                lp.rows.push(row.clone());
            }
        }
        if self.problem.objective == Objective::MaxFull {
            for v in self.inst.agents() {
                let zc = self.z_col(v);
                match zs[v] {
                    ZChoice::Open => {
                        lp.add_row(vec![(zc, Rat::one())], Cmp::Le, Rat::one());
                        // z_v <= mass(v)
                        let mut coeffs = vec![(zc, Rat::one())];
                        for &(j, _) in &self.cons.mass_rows[v].coeffs {
                            coeffs.push((j, -Rat::one()));
                        }
                        lp.add_row(coeffs, Cmp::Le, Rat::zero());
                    }
                    ZChoice::One => {
                        lp.add_row(vec![(zc, Rat::one())], Cmp::Eq, Rat::one());
                        lp.rows.push(LinearRow {
                            coeffs: self.cons.mass_rows[v].coeffs.clone(),
                            cmp: Cmp::Ge,
                            rhs: Rat::one(),
                        });
                    }
                    ZChoice::Zero => {
                        lp.add_row(vec![(zc, Rat::one())], Cmp::Eq, Rat::zero());
                    }
                }
            }
        }
        lp.set_objective(self.objective_coeffs());
        lp
    }

    fn matching_of(&self, x: &[Rat]) -> FractionalMatching {
        let mut m = FractionalMatching::new();
        for (i, &(u, v)) in self.inst.edges().iter().enumerate() {
            m.set(u, v, x[i].clone());
        }
        m
    }

    /// True objective value attained by a stability-certified matching.
    fn attained_value(&self, m: &FractionalMatching) -> Rat {
        match self.problem.objective {
            Objective::MaxFull => rat(num_fully(self.inst, m) as i64),
            Objective::MaxWelfare => welfare(self.inst, m),
            Objective::MaxMass => crate::matching::total_mass(m),
        }
    }

    fn resolved_y(&self, m: &FractionalMatching, ys: &[YChoice]) -> BTreeMap<(usize, usize), bool> {
        let mut out = BTreeMap::new();
        for (d, choice) in self.cons.disjunctions.iter().zip(ys) {
            let bit = match choice {
                YChoice::SideU => true,
                YChoice::SideV => false,
                YChoice::Open => {
                    // Prefer the zero assignment when the second endpoint's
                    // side holds.
                    let (u, v) = d.edge;
                    !side_holds(self.inst, m, v, u, self.problem.concept)
                }
            };
            out.insert(d.edge, bit);
        }
        out
    }
}

/// Does the endpoint `x` of `{x, other}` satisfy its side condition?
fn side_holds(
    inst: &Instance,
    m: &FractionalMatching,
    x: usize,
    other: usize,
    concept: StabilityConcept,
) -> bool {
    match concept {
        StabilityConcept::Cardinal => {
            crate::matching::utility(inst, m, x) >= *inst.sat(x, other)
        }
        StabilityConcept::Ordinal => {
            crate::matching::mass_above(inst, m, x, other, false).expect("edge exists")
                >= Rat::one()
        }
        StabilityConcept::Linear => true,
    }
}

/// How badly an edge blocks the matching: the sum of the two sides'
/// normalized shortfalls. Used only to pick branching edges.
fn violation(ctx: &SearchContext, m: &FractionalMatching, edge: (usize, usize)) -> Rat {
    let (u, v) = edge;
    let inst = ctx.inst;
    match ctx.problem.concept {
        StabilityConcept::Cardinal => {
            let du = (inst.sat(u, v) - crate::matching::utility(inst, m, u))
                / inst.sat(u, v).clone();
            let dv = (inst.sat(v, u) - crate::matching::utility(inst, m, v))
                / inst.sat(v, u).clone();
            du + dv
        }
        StabilityConcept::Ordinal => {
            let mu = crate::matching::mass_above(inst, m, u, v, false).expect("edge exists");
            let mv = crate::matching::mass_above(inst, m, v, u, false).expect("edge exists");
            (Rat::one() - mu) + (Rat::one() - mv)
        }
        StabilityConcept::Linear => Rat::zero(),
    }
}

/// Exact optimum (or decision answer) for the problem. Exhaustive binary
/// enumeration by default, branch and bound behind the flag.
pub fn milp_solve(
    inst: &Instance,
    problem: &OptProblem,
    options: &MilpOptions,
) -> Result<MilpSolution, Error> {
    let ctx = SearchContext::new(inst, problem);
    let warm = match &options.warm_start {
        Some(m) => {
            crate::matching::validate_matching(inst, m)?;
            if !is_stable(inst, m, problem.concept) {
                return Err(Error::InvalidMatching(
                    "warm start is not stable under the requested concept".into(),
                ));
            }
            let open = vec![YChoice::Open; ctx.cons.disjunctions.len()];
            let y = ctx.resolved_y(m, &open);
            let z = inst.agents().map(|v| (v, mass(m, v).is_one())).collect();
            Some(MilpSolution {
                matching: m.clone(),
                y,
                z,
                value: ctx.attained_value(m),
                status: SolveStatus::Optimal,
            })
        }
        None => None,
    };
    let solution = if options.branch_and_bound {
        branch_and_bound(&ctx, warm)?
    } else {
        let num_binaries = ctx.cons.y_edges.len()
            + if problem.objective == Objective::MaxFull {
                inst.n()
            } else {
                0
            };
        if num_binaries as u32 > options.cap() {
            return Err(Error::BudgetExceeded(format!(
                "{num_binaries} binaries exceed the exhaustive cap {}; enable branch and bound",
                options.cap()
            )));
        }
        exhaustive(&ctx, warm)?
    };
    if let Some(sol) = &solution {
        if !is_stable(inst, &sol.matching, problem.concept) {
            return Err(Error::Unsupported(
                "internal: solver returned a matching that fails re-certification".into(),
            ));
        }
    }
    finalize(inst, problem, solution)
}

fn finalize(
    _inst: &Instance,
    problem: &OptProblem,
    best: Option<MilpSolution>,
) -> Result<MilpSolution, Error> {
    match best {
        None => Ok(MilpSolution {
            matching: FractionalMatching::new(),
            y: BTreeMap::new(),
            z: BTreeMap::new(),
            value: Rat::zero(),
            status: match problem.mode {
                Mode::Optimize => SolveStatus::Infeasible,
                Mode::Decision(_) => SolveStatus::ThresholdUnmet,
            },
        }),
        Some(mut sol) => {
            sol.status = match &problem.mode {
                Mode::Optimize => SolveStatus::Optimal,
                Mode::Decision(t) => {
                    if sol.value >= *t {
                        SolveStatus::ThresholdMet
                    } else {
                        SolveStatus::ThresholdUnmet
                    }
                }
            };
            Ok(sol)
        }
    }
}

fn threshold(problem: &OptProblem) -> Option<&Rat> {
    match &problem.mode {
        Mode::Decision(t) => Some(t),
        Mode::Optimize => None,
    }
}

/// Enumerates every assignment of the binaries in lexicographic order
/// (zero first), solving one LP each; the paper's NP-containment argument
/// run literally.
fn exhaustive(
    ctx: &SearchContext,
    warm: Option<MilpSolution>,
) -> Result<Option<MilpSolution>, Error> {
    let ny = ctx.cons.disjunctions.len();
    let nz = if ctx.problem.objective == Objective::MaxFull {
        ctx.inst.n()
    } else {
        0
    };
    let mut best: Option<MilpSolution> = warm;
    if let (Some(b), Some(t)) = (&best, threshold(ctx.problem)) {
        if b.value >= *t {
            return Ok(best);
        }
    }
    let total_bits = ny + nz;
    let combos: u64 = 1u64 << total_bits;
    for code in 0..combos {
        let ys: Vec<YChoice> = (0..ny)
            .map(|i| {
                if code >> i & 1 == 1 {
                    YChoice::SideU
                } else {
                    YChoice::SideV
                }
            })
            .collect();
        let zs: Vec<ZChoice> = (0..nz)
            .map(|i| {
                if code >> (ny + i) & 1 == 1 {
                    ZChoice::One
                } else {
                    ZChoice::Zero
                }
            })
            .collect();
        // For the counting objective the value is fixed by the z bits;
        // skip assignments that cannot improve the incumbent or that miss
        // a decision threshold outright.
        if ctx.problem.objective == Objective::MaxFull {
            let zcount = zs.iter().filter(|z| **z == ZChoice::One).count();
            if let Some(b) = &best {
                if rat(zcount as i64) <= b.value {
                    continue;
                }
            }
            if let Some(t) = threshold(ctx.problem) {
                if rat(zcount as i64) < *t {
                    continue;
                }
            }
        }
        let zs_full = if nz == 0 {
            vec![ZChoice::Zero; ctx.inst.n()]
        } else {
            zs
        };
        let lp = ctx.build_lp(&ys, &zs_full);
        match solve_exact_lp(&lp)? {
            LpOutcome::Optimal { x, value } => {
                let m = ctx.matching_of(&x);
                if !is_stable(ctx.inst, &m, ctx.problem.concept) {
                    // The fixed-side rows guarantee stability; this branch
                    // is unreachable but kept as a defensive skip.
                    continue;
                }
                let val = match ctx.problem.objective {
                    Objective::MaxFull => ctx.attained_value(&m).max(value),
                    _ => value,
                };
                let better = match &best {
                    None => true,
                    Some(b) => val > b.value,
                };
                if better {
                    let y = ctx.resolved_y(&m, &ys);
                    let z = ctx
                        .inst
                        .agents()
                        .map(|v| (v, mass(&m, v).is_one()))
                        .collect();
                    best = Some(MilpSolution {
                        matching: m,
                        y,
                        z,
                        value: val,
                        status: SolveStatus::Optimal,
                    });
                    if let Some(t) = threshold(ctx.problem) {
                        if best.as_ref().unwrap().value >= *t {
                            return Ok(best);
                        }
                    }
                }
            }
            LpOutcome::Infeasible => continue,
            LpOutcome::Unbounded => {
                return Err(Error::Lp("matching polytope cannot be unbounded".into()))
            }
        }
    }
    Ok(best)
}

struct Node {
    ys: Vec<YChoice>,
    zs: Vec<ZChoice>,
    bound: Rat,
    id: u64,
}

/// Best-bound branch and bound over the stability disjunctions and the
/// fully-matched counters.
fn branch_and_bound(
    ctx: &SearchContext,
    warm: Option<MilpSolution>,
) -> Result<Option<MilpSolution>, Error> {
    let ny = ctx.cons.disjunctions.len();
    let nz = ctx.inst.n();
    let mut best: Option<MilpSolution> = warm;
    if let (Some(b), Some(t)) = (&best, threshold(ctx.problem)) {
        if b.value >= *t {
            return Ok(best);
        }
    }
    let mut next_id = 0u64;
    // Max-heap on (bound, older id first).
    let mut heap: std::collections::BinaryHeap<HeapEntry> = std::collections::BinaryHeap::new();
    // Deciding whether every agent can be fully matched fixes all the
    // counters up front: the threshold needs all of them.
    let perfect_decision = ctx.problem.objective == Objective::MaxFull
        && matches!(&ctx.problem.mode, Mode::Decision(t) if *t == rat(nz as i64));
    let root_z = if ctx.problem.objective != Objective::MaxFull {
        ZChoice::Zero
    } else if perfect_decision {
        ZChoice::One
    } else {
        ZChoice::Open
    };
    let root = Node {
        ys: vec![YChoice::Open; ny],
        zs: vec![root_z; nz],
        bound: Rat::zero(),
        id: next_id,
    };
    next_id += 1;

    let process = |node: Node,
                       heap: &mut std::collections::BinaryHeap<HeapEntry>,
                       best: &mut Option<MilpSolution>,
                       next_id: &mut u64|
     -> Result<bool, Error> {
        let lp = ctx.build_lp(&node.ys, &node.zs);
        let (x, bound) = match solve_exact_lp(&lp)? {
            LpOutcome::Optimal { x, value } => (x, value),
            LpOutcome::Infeasible => return Ok(false),
            LpOutcome::Unbounded => {
                return Err(Error::Lp("matching polytope cannot be unbounded".into()))
            }
        };
        if !improves(ctx, &bound, best) {
            return Ok(false);
        }
        let m = ctx.matching_of(&x);
        let stable = is_stable(ctx.inst, &m, ctx.problem.concept);
        if stable {
            let val = ctx.attained_value(&m);
            let better = match &*best {
                None => true,
                Some(b) => val > b.value,
            };
            if better {
                let y = ctx.resolved_y(&m, &node.ys);
                let z = ctx
                    .inst
                    .agents()
                    .map(|v| (v, mass(&m, v).is_one()))
                    .collect();
                *best = Some(MilpSolution {
                    matching: m.clone(),
                    y,
                    z,
                    value: val.clone(),
                    status: SolveStatus::Optimal,
                });
                if let Some(t) = threshold(ctx.problem) {
                    if val >= *t {
                        return Ok(true);
                    }
                }
            }
            if val == bound {
                return Ok(false);
            }
        }
        // Branch: an open blocking edge if unstable, otherwise (counting
        // objective) the open agent with the largest fractional count.
        if !stable {
            let report = blocking_pairs(ctx.inst, &m, ctx.problem.concept);
            let open_block = ctx
                .cons
                .disjunctions
                .iter()
                .enumerate()
                .filter(|(i, d)| {
                    node.ys[*i] == YChoice::Open && report.contains_edge(d.edge.0, d.edge.1)
                })
                .max_by(|(ia, a), (ib, b)| {
                    violation(ctx, &m, a.edge)
                        .cmp(&violation(ctx, &m, b.edge))
                        .then_with(|| ib.cmp(ia))
                })
                .map(|(i, _)| i);
            let Some(i) = open_block else {
                return Err(Error::Unsupported(
                    "internal: unstable relaxation without an open blocking edge".into(),
                ));
            };
            for side in [YChoice::SideU, YChoice::SideV] {
                let mut ys = node.ys.clone();
                ys[i] = side;
                heap.push(HeapEntry(Node {
                    ys,
                    zs: node.zs.clone(),
                    bound: bound.clone(),
                    id: *next_id,
                }));
                *next_id += 1;
            }
            return Ok(false);
        }
        // Stable with a gap: tighten a fractional counter.
        let frac = ctx
            .inst
            .agents()
            .filter(|&v| node.zs[v] == ZChoice::Open)
            .map(|v| (v, mass(&m, v)))
            .filter(|(_, mv)| !mv.is_one())
            .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)));
        let Some((v, _)) = frac else {
            return Ok(false);
        };
        for choice in [ZChoice::One, ZChoice::Zero] {
            let mut zs = node.zs.clone();
            zs[v] = choice;
            heap.push(HeapEntry(Node {
                ys: node.ys.clone(),
                zs,
                bound: bound.clone(),
                id: *next_id,
            }));
            *next_id += 1;
        }
        Ok(false)
    };

    heap.push(HeapEntry(root));
    while let Some(HeapEntry(node)) = heap.pop() {
        if node.id != 0 && !improves(ctx, &node.bound, &best) {
            continue;
        }
        let stop = process(node, &mut heap, &mut best, &mut next_id)?;
        if stop {
            break;
        }
    }
    Ok(best)
}

/// Can a node with this relaxation bound still matter? It must beat the
/// incumbent and, in decision mode, still be able to reach the threshold.
/// The counting objective prunes on the integer floor of the bound.
fn improves(ctx: &SearchContext, bound: &Rat, best: &Option<MilpSolution>) -> bool {
    let effective = match ctx.problem.objective {
        Objective::MaxFull => bound.floor(),
        _ => bound.clone(),
    };
    if let Some(t) = threshold(ctx.problem) {
        if effective < *t {
            return false;
        }
    }
    match best {
        None => true,
        Some(b) => effective > b.value,
    }
}

struct HeapEntry(Node);

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.0.bound == other.0.bound && self.0.id == other.0.id
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .bound
            .cmp(&other.0.bound)
            .then_with(|| other.0.id.cmp(&self.0.id))
    }
}

/// Pure-LP optimization under linear stability: the joint-mass rows are
/// ordinary linear constraints, so no search is needed. A linearly stable
/// matching always exists, hence so does the optimum.
pub fn lsm_optimize(
    inst: &Instance,
    objective: Objective,
) -> Result<(FractionalMatching, Rat), Error> {
    if objective == Objective::MaxFull {
        return Err(Error::Unsupported(
            "the fully-matched count is not a linear objective; use milp_solve".into(),
        ));
    }
    let problem = OptProblem::optimize(StabilityConcept::Linear, objective);
    let ctx = SearchContext::new(inst, &problem);
    let lp = ctx.build_lp(&[], &vec![ZChoice::Zero; inst.n()]);
    match solve_exact_lp(&lp)? {
        LpOutcome::Optimal { x, value } => {
            let m = ctx.matching_of(&x);
            if !is_stable(inst, &m, StabilityConcept::Linear) {
                return Err(Error::Unsupported(
                    "internal: LP optimum fails linear stability".into(),
                ));
            }
            Ok((m, value))
        }
        LpOutcome::Infeasible => Err(Error::Lp(
            "internal: linear stability region cannot be empty".into(),
        )),
        LpOutcome::Unbounded => Err(Error::Lp("matching polytope cannot be unbounded".into())),
    }
}

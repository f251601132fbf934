//! Exact-rational linear programming.
//!
//! The public interface speaks arbitrary-precision rationals; internally
//! the solver runs a fraction-free (integer-tableau) primal simplex with a
//! symbolic big-M treatment of infeasibility. Every row is scaled to
//! integers, the tableau stores integer entries with one common
//! denominator, and each pivot uses the two-term Bareiss update, so no
//! gcd reductions happen inside the hot loop. Degeneracy falls back to
//! Bland's rule, which rules out cycling, so the solver terminates on
//! every input. Before an optimum is returned it is substituted back into
//! every row as a feasibility certificate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::rational::Rat;

/// Cumulative solver counters, for performance probes.
pub static LP_SOLVES: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);
pub static LP_PIVOTS: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);
pub static LP_MAX_BITS: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

/// One constraint row: `sum coeffs . x  (cmp)  rhs`.
#[derive(Debug, Clone)]
pub struct LinearRow {
    pub coeffs: Vec<(usize, Rat)>,
    pub cmp: Cmp,
    pub rhs: Rat,
}

/// A linear program over nonnegative variables.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub maximize: bool,
    /// Sparse objective coefficients.
    pub objective: Vec<(usize, Rat)>,
    pub rows: Vec<LinearRow>,
}

impl LinearProgram {
    pub fn new(num_vars: usize, maximize: bool) -> Self {
        LinearProgram {
            num_vars,
            maximize,
            objective: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn set_objective(&mut self, coeffs: Vec<(usize, Rat)>) {
        self.objective = coeffs;
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, Rat)>, cmp: Cmp, rhs: Rat) {
        self.rows.push(LinearRow { coeffs, cmp, rhs });
    }

    fn check_dims(&self) -> Result<(), Error> {
        for (j, _) in &self.objective {
            if *j >= self.num_vars {
                return Err(Error::Lp(format!(
                    "objective references variable {j} of {}",
                    self.num_vars
                )));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            for (j, _) in &row.coeffs {
                if *j >= self.num_vars {
                    return Err(Error::Lp(format!(
                        "row {i} references variable {j} of {}",
                        self.num_vars
                    )));
                }
            }
        }
        Ok(())
    }

    /// Evaluates the objective at a point.
    pub fn objective_value(&self, x: &[Rat]) -> Rat {
        self.objective
            .iter()
            .map(|(j, c)| c.clone() * x[*j].clone())
            .sum()
    }

    /// Exact feasibility check of a point against all rows and bounds.
    pub fn is_feasible(&self, x: &[Rat]) -> bool {
        if x.len() != self.num_vars || x.iter().any(|v| v.is_negative()) {
            return false;
        }
        self.rows.iter().all(|row| {
            let lhs: Rat = row
                .coeffs
                .iter()
                .map(|(j, c)| c.clone() * x[*j].clone())
                .sum();
            match row.cmp {
                Cmp::Le => lhs <= row.rhs,
                Cmp::Ge => lhs >= row.rhs,
                Cmp::Eq => lhs == row.rhs,
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rat>, value: Rat },
    Infeasible,
    Unbounded,
}

/// Scales a rational row to integer coefficients (including the rhs).
fn scale_to_integers(coeffs: &[(usize, Rat)], rhs: &Rat) -> (Vec<(usize, BigInt)>, BigInt) {
    let mut lcm = rhs.denom().clone();
    for (_, c) in coeffs {
        lcm = lcm.lcm(c.denom());
    }
    let scaled = coeffs
        .iter()
        .map(|(j, c)| (*j, c.numer() * (&lcm / c.denom())))
        .collect();
    let srhs = rhs.numer() * (&lcm / rhs.denom());
    (scaled, srhs)
}

struct Tableau {
    /// Constraint rows followed by the big-M cost row and the unit cost
    /// row; the last column is the rhs.
    t: Vec<Vec<BigInt>>,
    /// Common denominator (the previous pivot); always positive.
    denom: BigInt,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    cols: usize,
    rows: usize,
    first_artificial: usize,
}

impl Tableau {
    fn exact_div(num: BigInt, den: &BigInt) -> Result<BigInt, Error> {
        let (q, r) = num.div_rem(den);
        if !r.is_zero() {
            return Err(Error::Lp(
                "internal: fraction-free update lost exact divisibility".into(),
            ));
        }
        Ok(q)
    }

    /// Two-term Bareiss pivot at constraint row `r`, column `c`; the pivot
    /// entry must be positive, which keeps the denominator positive.
    fn pivot(&mut self, r: usize, c: usize) -> Result<(), Error> {
        let piv = self.t[r][c].clone();
        debug_assert!(piv.is_positive());
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let fac = row[c].clone();
            if fac.is_zero() {
                for (x, _) in row.iter_mut().zip(pivot_row.iter()) {
                    if !x.is_zero() {
                        *x = Self::exact_div(&*x * &piv, &self.denom)?;
                    }
                }
            } else {
                for (x, p) in row.iter_mut().zip(pivot_row.iter()) {
                    let updated = &*x * &piv - &fac * p;
                    *x = Self::exact_div(updated, &self.denom)?;
                }
            }
        }
        self.in_basis[self.basis[r]] = false;
        self.in_basis[c] = true;
        self.basis[r] = c;
        self.denom = piv;
        Ok(())
    }

    /// Lexicographic (M-part, unit-part) reduced cost of a column.
    fn red(&self, j: usize) -> (&BigInt, &BigInt) {
        (&self.t[self.rows][j], &self.t[self.rows + 1][j])
    }

    fn red_is_negative(&self, j: usize) -> bool {
        let (m, c) = self.red(j);
        m.is_negative() || (m.is_zero() && c.is_negative())
    }

    fn red_less(&self, a: usize, b: usize) -> bool {
        let (ma, ca) = self.red(a);
        let (mb, cb) = self.red(b);
        (ma, ca) < (mb, cb)
    }

    /// Runs the primal simplex to lexicographic optimality.
    fn optimize(&mut self) -> Result<(), Error> {
        let mut degenerate_streak = 0usize;
        loop {
            let bland = degenerate_streak >= 24;
            let mut entering: Option<usize> = None;
            for j in 0..self.cols {
                if j >= self.first_artificial || self.in_basis[j] || !self.red_is_negative(j) {
                    continue;
                }
                match entering {
                    None => entering = Some(j),
                    Some(e) => {
                        if !bland && self.red_less(j, e) {
                            entering = Some(j);
                        }
                    }
                }
                if bland {
                    break;
                }
            }
            let Some(col) = entering else {
                return Ok(());
            };
            // Ratio test over constraint rows; ties by smallest basis
            // variable (Bland-compatible).
            let rhs = self.cols;
            let mut leave: Option<usize> = None;
            for i in 0..self.rows {
                if !self.t[i][col].is_positive() {
                    continue;
                }
                match leave {
                    None => leave = Some(i),
                    Some(li) => {
                        // t[i][rhs]/t[i][col] < t[li][rhs]/t[li][col]?
                        let lhs = &self.t[i][rhs] * &self.t[li][col];
                        let rhsv = &self.t[li][rhs] * &self.t[i][col];
                        if lhs < rhsv || (lhs == rhsv && self.basis[i] < self.basis[li]) {
                            leave = Some(i);
                        }
                    }
                }
            }
            let Some(row) = leave else {
                if self.t[self.rows][col].is_negative() {
                    return Err(Error::Lp(
                        "internal: unbounded ray through an infeasibility column".into(),
                    ));
                }
                return Err(Error::Lp("unbounded".into()));
            };
            if self.t[row][rhs].is_zero() {
                degenerate_streak += 1;
            } else {
                degenerate_streak = 0;
            }
            LP_PIVOTS.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            self.pivot(row, col)?;
            let bits = self.t[row].iter().map(|x| x.bits()).max().unwrap_or(0);
            LP_MAX_BITS.fetch_max(bits, std::sync::atomic::Ordering::Relaxed);
        }
    }
}

/// Solves the program exactly. The returned basic solution satisfies every
/// row with exact rational arithmetic (re-checked by substitution).
pub fn solve_exact_lp(lp: &LinearProgram) -> Result<LpOutcome, Error> {
    LP_SOLVES.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
    lp.check_dims()?;
    let n = lp.num_vars;
    let m = lp.rows.len();

    // Integer-scaled rows in standard equality form. Column layout:
    // structural variables, slacks, artificials, rhs.
    let mut num_slack = 0usize;
    for row in &lp.rows {
        if matches!(row.cmp, Cmp::Le | Cmp::Ge) {
            num_slack += 1;
        }
    }
    let first_artificial = n + num_slack;
    let cols = first_artificial + m; // artificial space, assigned lazily
    let rhs_col = cols;

    let mut t: Vec<Vec<BigInt>> = Vec::with_capacity(m + 2);
    let mut basis = vec![usize::MAX; m];
    let mut next_slack = n;
    let mut next_artificial = first_artificial;
    for (i, row) in lp.rows.iter().enumerate() {
        let (coeffs, srhs) = scale_to_integers(&row.coeffs, &row.rhs);
        let mut r = vec![BigInt::zero(); cols + 1];
        for (j, c) in coeffs {
            r[j] += c;
        }
        r[rhs_col] = srhs;
        let slack = match row.cmp {
            Cmp::Le => {
                r[next_slack] = BigInt::one();
                next_slack += 1;
                Some(next_slack - 1)
            }
            Cmp::Ge => {
                r[next_slack] = -BigInt::one();
                next_slack += 1;
                Some(next_slack - 1)
            }
            Cmp::Eq => None,
        };
        if r[rhs_col].is_negative() {
            for x in r.iter_mut() {
                *x = -x.clone();
            }
        }
        if let Some(s) = slack {
            if r[s].is_one() {
                basis[i] = s;
            }
        }
        if basis[i] == usize::MAX {
            r[next_artificial] = BigInt::one();
            basis[i] = next_artificial;
            next_artificial += 1;
        }
        t.push(r);
    }

    // Big-M cost row: unit cost one on artificials, reduced by the basic
    // artificial rows. Unit cost row: the (scaled, negated-for-max)
    // objective, reduced by nothing since structural columns start
    // nonbasic and slack basics have zero cost.
    let mut m_row = vec![BigInt::zero(); cols + 1];
    for j in first_artificial..next_artificial {
        m_row[j] = BigInt::one();
    }
    for (i, &b) in basis.iter().enumerate() {
        if b >= first_artificial {
            for j in 0..=cols {
                if !t[i][j].is_zero() {
                    let sub = t[i][j].clone();
                    m_row[j] -= sub;
                }
            }
        }
    }
    let (mut obj_coeffs, _) = scale_to_integers(&lp.objective, &Rat::zero());
    if lp.maximize {
        for (_, c) in obj_coeffs.iter_mut() {
            *c = -c.clone();
        }
    }
    let mut c_row = vec![BigInt::zero(); cols + 1];
    for (j, c) in obj_coeffs {
        c_row[j] = c;
    }
    t.push(m_row);
    t.push(c_row);

    let mut in_basis = vec![false; cols];
    for &b in &basis {
        in_basis[b] = true;
    }
    let mut tab = Tableau {
        t,
        denom: BigInt::one(),
        basis,
        in_basis,
        cols,
        rows: m,
        first_artificial,
    };

    match tab.optimize() {
        Err(Error::Lp(msg)) if msg == "unbounded" => return Ok(LpOutcome::Unbounded),
        Err(e) => return Err(e),
        Ok(()) => {}
    }
    // Positive infeasibility cost means no artificial-free solution.
    if !tab.t[m][rhs_col].is_zero() {
        return Ok(LpOutcome::Infeasible);
    }
    let mut x = vec![Rat::zero(); n];
    let denom = Rat::from_integer(tab.denom.clone());
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = Rat::from_integer(tab.t[i][rhs_col].clone()) / denom.clone();
        }
    }
    if !lp.is_feasible(&x) {
        return Err(Error::Lp(
            "internal: optimum failed the substitution certificate".into(),
        ));
    }
    let value = lp.objective_value(&x);
    Ok(LpOutcome::Optimal { x, value })
}

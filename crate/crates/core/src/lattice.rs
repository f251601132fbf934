//! Join, meet, median, and domination over fractional matchings.
//!
//! For a bipartite instance with strict preferences and two matchings
//! `M1, M2`, the join assigns each pair `{x,y}` with `x` on the `U` side
//!
//! ```text
//! (M1 v M2)(x,y) = max(M1(x,>=y), M2(x,>=y)) - max(M1(x,>y), M2(x,>y))
//! ```
//!
//! and the meet uses `min` in place of `max`. On ordinally (or linearly)
//! stable inputs these are again stable and the set of stable matchings
//! forms a distributive lattice under weak U-domination; the operations
//! themselves are total on valid matchings and the result is re-validated.
//!
//! The median applies the same construction with the componentwise median
//! of three cumulative masses and is defined for roommates instances too.

use num_traits::Zero;

use crate::error::Error;
use crate::matching::{mass_above, validate_matching, FractionalMatching};
use crate::model::{derive_preferences, Instance, Side};
use crate::rational::Rat;

fn require_strict(inst: &Instance) -> Result<(), Error> {
    if derive_preferences(inst).has_ties() {
        return Err(Error::TiesPresent(
            "lattice operations require strict preferences".into(),
        ));
    }
    Ok(())
}

/// Agents on the chosen "proposing" side of the bipartition.
fn oriented_u_side(inst: &Instance, u_side: Side) -> Result<Vec<usize>, Error> {
    let profile = derive_preferences(inst);
    let Some(sides) = profile.bipartition() else {
        return Err(Error::NotBipartite(
            "join/meet/domination require a bipartite instance".into(),
        ));
    };
    Ok(inst.agents().filter(|&v| sides[v] == u_side).collect())
}

fn combine2(
    inst: &Instance,
    m1: &FractionalMatching,
    m2: &FractionalMatching,
    u_side: Side,
    pick: fn(Rat, Rat) -> Rat,
) -> Result<FractionalMatching, Error> {
    require_strict(inst)?;
    validate_matching(inst, m1)?;
    validate_matching(inst, m2)?;
    let us = oriented_u_side(inst, u_side)?;
    let mut out = FractionalMatching::new();
    for &x in &us {
        for &y in inst.neighbors(x) {
            let w1 = mass_above(inst, m1, x, y, false)?;
            let w2 = mass_above(inst, m2, x, y, false)?;
            let s1 = mass_above(inst, m1, x, y, true)?;
            let s2 = mass_above(inst, m2, x, y, true)?;
            let v = pick(w1, w2) - pick(s1, s2);
            if !v.is_zero() {
                out.set(x, y, v);
            }
        }
    }
    validate_matching(inst, &out)?;
    Ok(out)
}

/// Pointwise-maximum lattice join, oriented at `u_side`.
pub fn join(
    inst: &Instance,
    m1: &FractionalMatching,
    m2: &FractionalMatching,
    u_side: Side,
) -> Result<FractionalMatching, Error> {
    combine2(inst, m1, m2, u_side, |a, b| a.max(b))
}

/// Pointwise-minimum lattice meet, oriented at `u_side`.
pub fn meet(
    inst: &Instance,
    m1: &FractionalMatching,
    m2: &FractionalMatching,
    u_side: Side,
) -> Result<FractionalMatching, Error> {
    combine2(inst, m1, m2, u_side, |a, b| a.min(b))
}

fn med3(a: Rat, b: Rat, c: Rat) -> Rat {
    // Second largest of three.
    let hi = a.clone().max(b.clone()).max(c.clone());
    let lo = a.clone().min(b.clone()).min(c.clone());
    a + b + c - hi - lo
}

/// Componentwise median of three matchings. Works on roommates instances;
/// each pair is evaluated from its lower-indexed endpoint (the `U` side on
/// declared bipartitions), and the two perspectives agree whenever the
/// inputs are stable.
pub fn median(
    inst: &Instance,
    m1: &FractionalMatching,
    m2: &FractionalMatching,
    m3: &FractionalMatching,
) -> Result<FractionalMatching, Error> {
    require_strict(inst)?;
    for m in [m1, m2, m3] {
        validate_matching(inst, m)?;
    }
    let profile = derive_preferences(inst);
    let from_u = |x: usize, y: usize| -> bool {
        match profile.bipartition() {
            Some(sides) => sides[x] == Side::U,
            None => x < y,
        }
    };
    let mut out = FractionalMatching::new();
    for &(a, b) in inst.edges() {
        let (x, y) = if from_u(a, b) { (a, b) } else { (b, a) };
        let weak = med3(
            mass_above(inst, m1, x, y, false)?,
            mass_above(inst, m2, x, y, false)?,
            mass_above(inst, m3, x, y, false)?,
        );
        let strict = med3(
            mass_above(inst, m1, x, y, true)?,
            mass_above(inst, m2, x, y, true)?,
            mass_above(inst, m3, x, y, true)?,
        );
        let v = weak - strict;
        if !v.is_zero() {
            out.set(x, y, v);
        }
    }
    validate_matching(inst, &out)?;
    Ok(out)
}

/// Outcome of comparing `m1` against `m2` under weak U-domination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    /// Every cumulative mass strictly larger.
    Strict,
    /// Every cumulative mass at least as large (ties allowed).
    Weak,
    /// `m1` does not weakly U-dominate `m2`.
    Incomparable,
}

/// Compares `M1(x,>=y)` with `M2(x,>=y)` over all acceptable pairs with
/// `x` on the `u_side` of the bipartition.
pub fn u_dominates(
    inst: &Instance,
    m1: &FractionalMatching,
    m2: &FractionalMatching,
    u_side: Side,
) -> Result<Dominance, Error> {
    require_strict(inst)?;
    validate_matching(inst, m1)?;
    validate_matching(inst, m2)?;
    let us = oriented_u_side(inst, u_side)?;
    let mut all_strict = true;
    for &x in &us {
        for &y in inst.neighbors(x) {
            let a = mass_above(inst, m1, x, y, false)?;
            let b = mass_above(inst, m2, x, y, false)?;
            if a < b {
                return Ok(Dominance::Incomparable);
            }
            if a == b {
                all_strict = false;
            }
        }
    }
    Ok(if all_strict {
        Dominance::Strict
    } else {
        Dominance::Weak
    })
}

//! Positive-association machinery: the two-coordinate lattice condition for
//! strictly positive weights on `{0,1}^n`, and the pairwise ratio condition
//! implying stochastic ordering of two such measures.

use super::{ClusterCounter, RcParams, RcWeights};
use crate::error::ExactError;
use crate::lattice::LatticeGraph;

/// Exhaustive checks stop at this many coordinates (`2^16` states times
/// all coordinate pairs).
pub const LATTICE_AUDIT_BUDGET: usize = 16;

/// Result of the lattice-condition audit: either every pair passes, or a
/// concrete witness of failure.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FkgOutcome {
    Pass,
    Violation { state: u64, i: usize, j: usize, lhs: f64, rhs: f64 },
}

impl FkgOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, FkgOutcome::Pass)
    }
}

/// Result of the pairwise ratio (stochastic ordering) audit.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum HolleyOutcome {
    Pass,
    Violation { state: u64, i: usize, lhs: f64, rhs: f64 },
}

impl HolleyOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, HolleyOutcome::Pass)
    }
}

fn check_budget(n: usize) -> Result<(), ExactError> {
    if n > LATTICE_AUDIT_BUDGET {
        return Err(ExactError::EdgeBudget { edges: n, budget: LATTICE_AUDIT_BUDGET });
    }
    Ok(())
}

/// Checks `w(x v y) * w(x ^ y) >= w(x) * w(y)` for all pairs differing in
/// two coordinates: for every state `s` with coordinates `i`, `j` both
/// zero,
/// `w(s + i + j) * w(s) >= w(s + i) * w(s + j)`
/// up to relative tolerance `tol`. This is equivalent to the full lattice
/// condition and implies positive association of increasing events.
///
/// Weights must be strictly positive.
pub fn fkg_lattice_audit(
    n: usize,
    mut weight: impl FnMut(u64) -> f64,
    tol: f64,
) -> Result<FkgOutcome, ExactError> {
    check_budget(n)?;
    let table: alloc::vec::Vec<f64> = (0..1u64 << n).map(&mut weight).collect();
    for &w in &table {
        if !(w > 0.0) || !w.is_finite() {
            return Err(ExactError::InvalidParams("weights must be positive and finite"));
        }
    }
    for s in 0..1u64 << n {
        for i in 0..n {
            if s >> i & 1 == 1 {
                continue;
            }
            for j in i + 1..n {
                if s >> j & 1 == 1 {
                    continue;
                }
                let bi = 1u64 << i;
                let bj = 1u64 << j;
                let lhs = table[(s | bi | bj) as usize] * table[s as usize];
                let rhs = table[(s | bi) as usize] * table[(s | bj) as usize];
                if lhs < rhs * (1.0 - tol) {
                    return Ok(FkgOutcome::Violation { state: s, i, j, lhs, rhs });
                }
            }
        }
    }
    Ok(FkgOutcome::Pass)
}

/// Checks the pairwise ratio condition
/// `w2(s + i) * w1(s) >= w1(s + i) * w2(s)`
/// for every state `s` with coordinate `i` zero, up to relative tolerance
/// `tol`. Together with the lattice condition on either weight this yields
/// stochastic domination of measure 1 by measure 2.
pub fn holley_ordering_audit(
    n: usize,
    mut w1: impl FnMut(u64) -> f64,
    mut w2: impl FnMut(u64) -> f64,
    tol: f64,
) -> Result<HolleyOutcome, ExactError> {
    check_budget(n)?;
    let t1: alloc::vec::Vec<f64> = (0..1u64 << n).map(&mut w1).collect();
    let t2: alloc::vec::Vec<f64> = (0..1u64 << n).map(&mut w2).collect();
    for w in t1.iter().chain(t2.iter()) {
        if !(*w > 0.0) || !w.is_finite() {
            return Err(ExactError::InvalidParams("weights must be positive and finite"));
        }
    }
    for s in 0..1u64 << n {
        for i in 0..n {
            if s >> i & 1 == 1 {
                continue;
            }
            let up = (s | 1 << i) as usize;
            let lhs = t2[up] * t1[s as usize];
            let rhs = t1[up] * t2[s as usize];
            if lhs < rhs * (1.0 - tol) {
                return Ok(HolleyOutcome::Violation { state: s, i, lhs, rhs });
            }
        }
    }
    Ok(HolleyOutcome::Pass)
}

/// Runs the lattice-condition audit on the random-cluster weights of `g`
/// under `params` (boundary condition respected).
pub fn rc_fkg_audit(g: &LatticeGraph, params: &RcParams) -> Result<FkgOutcome, ExactError> {
    params.validate()?;
    if !(params.p > 0.0 && params.p < 1.0) {
        return Err(ExactError::InvalidParams("lattice audit requires 0 < p < 1"));
    }
    check_budget(g.edge_count())?;
    // Within the audit budget the weight tables stay linear.
    let w = RcWeights::new(params.p, params.q, g.edge_count(), g.vertex_count());
    let mut counter = ClusterCounter::new(g, params.bc);
    fkg_lattice_audit(
        g.edge_count(),
        |mask| w.weight(mask.count_ones() as usize, counter.count(mask)),
        1e-12,
    )
}

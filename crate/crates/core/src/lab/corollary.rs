//! Sharp-threshold window audit.
//!
//! For an increasing event `A` and `p1 <= p2`, the probability window
//! bound states
//!
//! `mu_{p1}(A) * (1 - mu_{p2}(A)) <= kappa^{B (p2 - p1)}`
//!
//! with `kappa = 2 sup_{p, e} J_{A,p}(e)` (conditional influences) and
//! `B = inf_p c * xi_p / (p (1 - p))`, where `xi_p` is the smallest edge
//! marginal variance `phi(1_e)(1 - phi(1_e))` and `c > 0` is a supplied
//! constant. Both extrema are evaluated exactly on a `p`-grid; the audit
//! is conditional on the supplied `c` and says so in its inputs.

use alloc::vec;
use alloc::vec::Vec;

use super::BoundReport;
use crate::error::LabError;
use crate::exact::{event_prob, influence_profile, EventSpec, Monotonicity, RcParams};
use crate::lattice::{Bc, LatticeGraph};
use crate::math;

/// Equality-side tolerance: the inequality itself is checked exactly.
pub const COROLLARY_TOL: f64 = 1e-12;

/// Relative variation between adjacent grid points beyond which the grid
/// is flagged too coarse to trust the extrema.
pub const COARSE_GRID_REL: f64 = 0.1;

/// Result of [`corollary_audit`].
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CorollaryAudit {
    /// `lhs = mu_{p1}(A)(1 - mu_{p2}(A))`, `rhs = kappa^{B (p2 - p1)}`.
    pub bound: BoundReport,
    /// Twice the largest conditional influence seen on the grid.
    pub kappa: f64,
    /// Smallest `c * xi_p / (p(1-p))` seen on the grid.
    pub b_const: f64,
    /// The supplied constant the audit is conditional on.
    pub c: f64,
    /// True when `kappa` or `B` integrands vary by more than
    /// [`COARSE_GRID_REL`] between adjacent grid points.
    pub coarse: bool,
}

fn rel_step(a: f64, b: f64) -> f64 {
    let scale = math::abs(a).max(math::abs(b));
    if scale <= 0.0 {
        0.0
    } else {
        math::abs(a - b) / scale
    }
}

/// Audits the window bound for the increasing event `A` on `g` at cluster
/// weight `q` and boundary `bc`, with both extrema evaluated exactly at
/// `grid_points` equally spaced parameters spanning `[p1, p2]`.
#[allow(clippy::too_many_arguments)]
pub fn corollary_audit(
    g: &LatticeGraph,
    event: &EventSpec,
    q: f64,
    bc: Bc,
    p1: f64,
    p2: f64,
    c: f64,
    grid_points: u32,
) -> Result<CorollaryAudit, LabError> {
    if !(p1 > 0.0 && p1 < 1.0 && p2 > 0.0 && p2 < 1.0 && p1 <= p2) {
        return Err(LabError::InvalidParams("audit needs 0 < p1 <= p2 < 1"));
    }
    if !(c > 0.0) {
        return Err(LabError::InvalidParams("the constant c must be positive"));
    }
    if grid_points < 2 {
        return Err(LabError::InvalidParams("grid needs at least two points"));
    }
    if event.monotonicity() != Monotonicity::Increasing {
        return Err(LabError::InvalidParams("audit needs an increasing event"));
    }
    let grid: Vec<f64> = if p1 == p2 {
        vec![p1]
    } else {
        (0..grid_points)
            .map(|i| p1 + (p2 - p1) * i as f64 / (grid_points - 1) as f64)
            .collect()
    };
    let mut kappas = Vec::with_capacity(grid.len());
    let mut bs = Vec::with_capacity(grid.len());
    let mut xi_min = f64::INFINITY;
    for &p in &grid {
        let profile = influence_profile(g, &RcParams::new(p, q, bc)?, event)?;
        let mut xi = f64::INFINITY;
        let mut jmax = 0.0f64;
        for s in 0..profile.edge_count() {
            let m = profile.marginal(s);
            xi = xi.min(m * (1.0 - m));
            jmax = jmax.max(profile.conditional_influence(s)?);
        }
        if profile.edge_count() == 0 {
            xi = 0.0;
        }
        xi_min = xi_min.min(xi);
        kappas.push(2.0 * jmax);
        bs.push(c * xi / (p * (1.0 - p)));
    }
    let kappa = kappas.iter().fold(0.0f64, |a, &b| a.max(b));
    let b_const = bs.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let coarse = kappas
        .windows(2)
        .chain(bs.windows(2))
        .any(|w| rel_step(w[0], w[1]) > COARSE_GRID_REL);
    let mu1 = event_prob(g, &RcParams::new(p1, q, bc)?, event)?;
    let mu2 = event_prob(g, &RcParams::new(p2, q, bc)?, event)?;
    let lhs = mu1 * (1.0 - mu2);
    let rhs = math::powf(kappa, b_const * (p2 - p1));
    let bound = BoundReport::upper(
        lhs,
        rhs,
        COROLLARY_TOL,
        vec![
            ("p1", p1),
            ("p2", p2),
            ("q", q),
            ("c", c),
            ("kappa", kappa),
            ("b_const", b_const),
            ("mu_p1", mu1),
            ("mu_p2", mu2),
            ("xi_min", xi_min),
            ("grid_points", grid.len() as f64),
            ("coarse", if coarse { 1.0 } else { 0.0 }),
        ],
    );
    Ok(CorollaryAudit { bound, kappa, b_const, c, coarse })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::lattice::{Direction, PathMode};

    #[test]
    fn single_edge_hundred_point_grid_holds() {
        let g = corpus::single_edge();
        let ev = EventSpec::EdgeOpen { edge: 0 };
        let out = corollary_audit(&g, &ev, 2.0, Bc::Free, 0.3, 0.7, 0.1, 100).unwrap();
        assert!(out.bound.holds, "{:?}", out.bound);
        // For a single edge the influence is exactly one, so kappa = 2 and
        // the right side exceeds one.
        assert!((out.kappa - 2.0).abs() < 1e-12);
        assert!(out.bound.rhs >= 1.0);
        assert!(!out.coarse, "100 points should resolve a smooth integrand");
        assert_eq!(out.bound.input("grid_points"), Some(100.0));
    }

    #[test]
    fn crossing_event_window_holds() {
        let g = corpus::box_2_1();
        let ev = EventSpec::Crossing {
            direction: Direction::LeftRight,
            mode: PathMode::OpenPath,
        };
        for &q in &[1.0, 1.5, 2.0] {
            let out = corollary_audit(&g, &ev, q, Bc::Free, 0.4, 0.6, 0.1, 50).unwrap();
            assert!(out.bound.holds, "q={q}: {:?}", out.bound);
            assert!(out.b_const > 0.0);
        }
    }

    #[test]
    fn equal_endpoints_give_trivial_bound() {
        let g = corpus::box_2_1();
        let ev = EventSpec::Crossing {
            direction: Direction::LeftRight,
            mode: PathMode::OpenPath,
        };
        let out = corollary_audit(&g, &ev, 2.0, Bc::Free, 0.5, 0.5, 0.1, 10).unwrap();
        assert_eq!(out.bound.rhs, 1.0);
        assert!(out.bound.holds);
        assert!(out.bound.lhs <= 0.25 + 1e-12);
    }

    #[test]
    fn sure_event_gives_zero_both_sides() {
        // The sure event has probability one and no influences: both the
        // window product and kappa collapse to zero.
        let g = corpus::two_edge_path();
        let ev = EventSpec::Mask { fixed: Vec::new() };
        let out = corollary_audit(&g, &ev, 1.5, Bc::Free, 0.3, 0.6, 0.1, 10).unwrap();
        assert_eq!(out.bound.lhs, 0.0);
        assert_eq!(out.bound.rhs, 0.0);
        assert!(out.bound.holds);
    }

    #[test]
    fn rejects_non_increasing_events_and_bad_params() {
        let g = corpus::single_edge();
        let decreasing = EventSpec::Mask { fixed: vec![(0, false)] };
        assert!(matches!(
            corollary_audit(&g, &decreasing, 1.0, Bc::Free, 0.3, 0.7, 0.1, 10),
            Err(LabError::InvalidParams(_))
        ));
        let ev = EventSpec::EdgeOpen { edge: 0 };
        assert!(matches!(
            corollary_audit(&g, &ev, 1.0, Bc::Free, 0.7, 0.3, 0.1, 10),
            Err(LabError::InvalidParams(_))
        ));
        assert!(matches!(
            corollary_audit(&g, &ev, 1.0, Bc::Free, 0.3, 0.7, 0.0, 10),
            Err(LabError::InvalidParams(_))
        ));
        assert!(matches!(
            corollary_audit(&g, &ev, 1.0, Bc::Free, 0.3, 0.7, 0.1, 1),
            Err(LabError::InvalidParams(_))
        ));
    }
}

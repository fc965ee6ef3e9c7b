//! Experiment layer: the quantities entering the sharp-threshold machinery
//! for the planar random-cluster model and its relatives.
//!
//! Closed forms ([`self_dual_point`], [`dual_parameter`], [`rho_nu`],
//! [`ising_xi`]), Monte Carlo radius-tail estimates ([`estimate_eta`]),
//! exact and sampled crossing-duality audits ([`duality_audit`]), the
//! influence upper bound audit ([`audit_lemma1`]), threshold scans with
//! logistic steepness fits ([`threshold_scan`]), and the
//! coarse-graining-free sharp-threshold inequality audit
//! ([`corollary_audit`]).
//!
//! All audits report both sides of their inequality and never clamp: a
//! violated bound is recorded as `holds = false` with negative slack.

mod corollary;
mod duality;
mod lemma;
mod scan;

pub use corollary::{corollary_audit, CorollaryAudit, COARSE_GRID_REL, COROLLARY_TOL};
pub use duality::{duality_audit, AuditMode, DUALITY_EXACT_TOL, DUALITY_MC_SIGMA};
pub use lemma::{audit_lemma1, LemmaAudit, LEMMA_TOL};
pub use scan::{
    logistic_fit, monotone_up_to_3se, scan_monotonicity_report, scan_point, threshold_scan,
    BoxScan, LogisticFit, ScanModel, ScanPoint, ThresholdScan,
};

use alloc::vec::Vec;

use crate::error::LabError;
use crate::exact::{EventSpec, RcParams};
use crate::lattice::{Bc, GraphKind, LatticeGraph, PathMode};
use crate::math;
use crate::sampler::{estimate_event, ChainSpec, Estimate, SampleModel};

/// The point `sqrt(q) / (1 + sqrt(q))` where the edge parameter equals its
/// dual. Callers guarantee `q > 0`; other inputs propagate NaN.
pub fn self_dual_point(q: f64) -> f64 {
    let s = math::sqrt(q);
    s / (1.0 + s)
}

/// The dual edge parameter `p_d` solving
/// `p_d / (1 - p_d) = q (1 - p) / p`. Order-reversing around the self-dual
/// point: `p < self_dual_point(q)` exactly when `p_d` is above it.
pub fn dual_parameter(p: f64, q: f64) -> f64 {
    let r = q * (1.0 - p) / p;
    r / (1.0 + r)
}

/// The pair `(rho, nu) = ((2 q eta / p)^{c/q}, (2 q eta / p_d)^{c/q})`
/// turning a radius-tail value `eta` into the two crossing-probability
/// bound factors (primal and dual form).
pub fn rho_nu(eta: f64, p: f64, q: f64, c: f64) -> (f64, f64) {
    let pd = dual_parameter(p, q);
    let e = c / q;
    (math::powf(2.0 * q * eta / p, e), math::powf(2.0 * q * eta / pd, e))
}

/// Worst-case single-site conditional variance factor for the spin model
/// with coupling `beta >= 0` and field `h` on the square lattice:
/// `x / (1 + x)^2` with `x = exp(2h + 8 beta)`. Evaluated in a form that
/// stays finite for large arguments.
pub fn ising_xi(beta: f64, h: f64) -> f64 {
    // x/(1+x)^2 = y/(1+y)^2 with y = 1/x; evaluate on the small side.
    let t = 2.0 * h + 8.0 * beta;
    let y = math::exp(-math::abs(t));
    y / ((1.0 + y) * (1.0 + y))
}

/// Two sides of an audited relation, with `slack = rhs - lhs` and the
/// verdict at the tolerance the audit pinned. `inputs` carries the named
/// quantities the bound was assembled from, for the JSON report.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    pub tol: f64,
    pub inputs: Vec<(&'static str, f64)>,
}

impl BoundReport {
    /// Audit of an upper bound `lhs <= rhs`, accepted up to `tol`.
    pub fn upper(lhs: f64, rhs: f64, tol: f64, inputs: Vec<(&'static str, f64)>) -> Self {
        Self { lhs, rhs, slack: rhs - lhs, holds: lhs <= rhs + tol, tol, inputs }
    }

    /// Audit of an equality `lhs = rhs`, accepted up to `tol`.
    pub fn equality(lhs: f64, rhs: f64, tol: f64, inputs: Vec<(&'static str, f64)>) -> Self {
        Self { lhs, rhs, slack: rhs - lhs, holds: math::abs(rhs - lhs) <= tol, tol, inputs }
    }

    /// Named input, if recorded.
    pub fn input(&self, name: &str) -> Option<f64> {
        self.inputs.iter().find(|(n, _)| *n == name).map(|&(_, v)| v)
    }
}

/// A radius-tail estimate: the probability that the origin's open cluster
/// reaches sup-norm distance `radius` in a centred box of half-width `n`
/// with free boundary, at the self-dual point.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EtaEstimate {
    pub estimate: Estimate,
    pub k: u32,
    /// `floor(k / 2)`, the distance actually tested.
    pub radius: u32,
    /// Ambient half-width.
    pub n: u32,
    pub p_sd: f64,
    /// Always true: free boundary in finite volume lies stochastically
    /// below the infinite-volume measure for this increasing event, so the
    /// estimate is a lower bound of the infinite-volume tail.
    pub lower_bound: bool,
}

/// Estimates `eta_k`: the probability at the self-dual point, free
/// boundary, that the origin's cluster reaches distance `floor(k/2)` in
/// the centred box of half-width `n` (default `2k`, configurable via
/// `margin`). Requires `q >= 1` and `n >= k`.
pub fn estimate_eta(
    q: f64,
    k: u32,
    margin: Option<u32>,
    spec: &ChainSpec,
) -> Result<EtaEstimate, LabError> {
    if !(q >= 1.0) {
        return Err(LabError::InvalidParams("radius-tail estimate needs q >= 1"));
    }
    let n = margin.unwrap_or(2 * k).max(1);
    if n < k {
        return Err(LabError::MarginTooSmall { need: k, got: n });
    }
    let g = LatticeGraph::build_box(GraphKind::CenteredBox { n })?;
    let origin = g.vertex_at(0, 0).expect("centred box contains the origin");
    let p_sd = self_dual_point(q);
    let params = RcParams::new(p_sd, q, Bc::Free)?;
    let event = EventSpec::Radius { x: origin, r: k / 2, mode: PathMode::OpenPath };
    let estimate = estimate_event(&g, &SampleModel::Rc(params), &event, spec)?;
    Ok(EtaEstimate { estimate, k, radius: k / 2, n, p_sd, lower_bound: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::event_prob;

    #[test]
    fn self_dual_point_closed_forms() {
        assert!((self_dual_point(1.0) - 0.5).abs() < 1e-15);
        assert!((self_dual_point(2.0) - 0.585_786_437_626_904_9).abs() < 1e-12);
        assert!((self_dual_point(4.0) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn dual_parameter_reduction_fixed_point_and_value() {
        // q = 1: complementation.
        for &p in &[0.1, 0.37, 0.5, 0.9] {
            assert!((dual_parameter(p, 1.0) - (1.0 - p)).abs() < 1e-15);
        }
        // Fixed point at the self-dual point.
        for &q in &[1.0, 1.5, 2.0, 4.0] {
            let p = self_dual_point(q);
            assert!((dual_parameter(p, q) - p).abs() < 1e-13, "q={q}");
        }
        // Odds ratio 2 at q = 2, p = 1/2.
        assert!((dual_parameter(0.5, 2.0) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn dual_parameter_order_reversal_grid() {
        // (p - p_sd)(p_d - p_sd) <= 0, equality only at the fixed point.
        for &q in &[1.0, 1.3, 2.0, 3.0, 4.0] {
            let psd = self_dual_point(q);
            for i in 1..40 {
                let p = i as f64 / 40.0;
                let pd = dual_parameter(p, q);
                let prod = (p - psd) * (pd - psd);
                assert!(prod <= 1e-15, "q={q} p={p} prod={prod}");
                if (p - psd).abs() > 1e-9 {
                    assert!(prod < 0.0, "q={q} p={p}");
                }
            }
        }
    }

    #[test]
    fn dual_parameter_is_an_involution() {
        for &q in &[1.0, 1.7, 2.0, 3.5] {
            for i in 1..20 {
                let p = i as f64 / 20.0;
                let back = dual_parameter(dual_parameter(p, q), q);
                assert!((back - p).abs() < 1e-13, "q={q} p={p} back={back}");
            }
        }
    }

    #[test]
    fn rho_nu_values_and_limits() {
        // q = 1, p = 1/2, eta = 0.1, c = 1: 2*1*0.1/0.5 = 0.4.
        let (rho, nu) = rho_nu(0.1, 0.5, 1.0, 1.0);
        assert!((rho - 0.4).abs() < 1e-15);
        assert!((nu - 0.4).abs() < 1e-15);
        // c -> 0 gives exponent 0.
        let (rho0, nu0) = rho_nu(0.1, 0.4, 2.0, 1e-300);
        assert!((rho0 - 1.0).abs() < 1e-12 && (nu0 - 1.0).abs() < 1e-12);
        // eta -> 0 drives rho to 0.
        let (rho_small, _) = rho_nu(1e-280, 0.4, 2.0, 2.0);
        assert!(rho_small < 1e-100);
    }

    #[test]
    fn ising_xi_values_and_monotonicity() {
        assert!((ising_xi(0.0, 0.0) - 0.25).abs() < 1e-15);
        // beta = 1/4, h = 0: e^2 / (1 + e^2)^2.
        let e2 = math::exp(2.0);
        assert!((ising_xi(0.25, 0.0) - e2 / ((1.0 + e2) * (1.0 + e2))).abs() < 1e-15);
        assert!((ising_xi(0.25, 0.0) - 0.104_993_585_403_506_49).abs() < 1e-12);
        // Decreasing in h >= 0.
        let mut last = ising_xi(0.3, 0.0);
        for i in 1..=20 {
            let now = ising_xi(0.3, i as f64 * 0.25);
            assert!(now < last, "h={} rose", i as f64 * 0.25);
            last = now;
        }
        // Large arguments stay finite.
        assert!(ising_xi(200.0, 500.0) >= 0.0);
        assert!(ising_xi(200.0, 500.0).is_finite());
    }

    #[test]
    fn bound_report_slack_and_verdicts() {
        let up = BoundReport::upper(0.3, 0.5, 1e-9, alloc::vec![("p", 0.3)]);
        assert!(up.holds && (up.slack - 0.2).abs() < 1e-15);
        assert_eq!(up.input("p"), Some(0.3));
        assert_eq!(up.input("missing"), None);
        let bad = BoundReport::upper(0.6, 0.5, 1e-9, Vec::new());
        assert!(!bad.holds && bad.slack < 0.0);
        let eq = BoundReport::equality(0.5, 0.5 + 1e-13, 1e-12, Vec::new());
        assert!(eq.holds);
        let neq = BoundReport::equality(0.5, 0.6, 1e-12, Vec::new());
        assert!(!neq.holds);
    }

    #[test]
    fn eta_trivial_small_k_and_margin_error() {
        let spec = ChainSpec::new(11, 1, 4, 32, 1);
        for k in [0u32, 1] {
            let out = estimate_eta(1.5, k, Some(2), &spec).unwrap();
            assert_eq!(out.radius, 0);
            assert!((out.estimate.mean - 1.0).abs() < 1e-15, "k={k}");
            assert!(out.lower_bound);
        }
        match estimate_eta(1.0, 5, Some(3), &spec) {
            Err(LabError::MarginTooSmall { need: 5, got: 3 }) => {}
            other => panic!("expected margin error, got {other:?}"),
        }
        assert!(matches!(
            estimate_eta(0.5, 2, None, &spec),
            Err(LabError::InvalidParams(_))
        ));
    }

    #[test]
    fn eta_matches_independent_closed_form_at_q1() {
        // q = 1: edges are independent, and reaching distance 1 from the
        // origin happens exactly when one of its four incident edges is
        // open: 1 - (1/2)^4 = 15/16 in any ambient box.
        let spec = ChainSpec::new(20260823, 2, 50, 400, 1);
        let out = estimate_eta(1.0, 3, None, &spec).unwrap();
        assert_eq!((out.radius, out.n), (1, 6));
        let se = out.estimate.std_error;
        assert!(se.is_finite() && se > 0.0);
        assert!(
            (out.estimate.mean - 15.0 / 16.0).abs() < 3.0 * se + 1e-9,
            "mean={} se={se}",
            out.estimate.mean
        );
    }

    #[test]
    fn eta_radius_event_estimate_matches_enumeration_at_q2() {
        // The exact same event estimate_eta samples, cross-checked against
        // enumeration on the half-width-1 box (within budget).
        let g = LatticeGraph::build_box(GraphKind::CenteredBox { n: 1 }).unwrap();
        let origin = g.vertex_at(0, 0).unwrap();
        let p_sd = self_dual_point(2.0);
        let params = RcParams::new(p_sd, 2.0, Bc::Free).unwrap();
        let event = EventSpec::Radius { x: origin, r: 1, mode: PathMode::OpenPath };
        let exact = event_prob(&g, &params, &event).unwrap();
        let spec = ChainSpec::new(7, 2, 100, 800, 1);
        let est = estimate_event(&g, &SampleModel::Rc(params), &event, &spec).unwrap();
        assert!(
            (est.mean - exact).abs() < 3.0 * est.std_error + 1e-9,
            "mc={} exact={exact} se={}",
            est.mean,
            est.std_error
        );
    }

    #[test]
    fn eta_decreasing_in_k() {
        // Nested events: larger radius implies smaller probability, up to
        // three pooled standard errors. q = 1 keeps the sweeps cheap.
        let spec = ChainSpec::new(99, 2, 50, 400, 1);
        let outs: Vec<EtaEstimate> = [2u32, 4, 6]
            .iter()
            .map(|&k| estimate_eta(1.0, k, Some(8), &spec).unwrap())
            .collect();
        for w in outs.windows(2) {
            let (a, b) = (&w[0].estimate, &w[1].estimate);
            let pooled = math::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
            assert!(
                b.mean <= a.mean + 3.0 * pooled,
                "eta rose: {} -> {} (pooled {pooled})",
                a.mean,
                b.mean
            );
        }
    }
}

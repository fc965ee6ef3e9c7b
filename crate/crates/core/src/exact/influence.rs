//! Conditional and absolute edge influences, and the exact differential
//! formula that ties the derivative of an event probability to the sum of
//! conditional influences.

use alloc::vec::Vec;

use super::{check_edge_budget, EdgeEventCtx, EventSpec, MassAcc, RcParams, RcWeights};
use crate::error::ExactError;
use crate::lattice::LatticeGraph;

/// One enumeration pass capturing, for every edge `s`: the mass with `s`
/// open, the event mass with `s` open, plus the total and event masses.
/// Everything influence-shaped is derived from these.
pub struct InfluenceProfile {
    z: MassAcc,
    za: MassAcc,
    z_open: Vec<MassAcc>,
    za_open: Vec<MassAcc>,
}

impl InfluenceProfile {
    /// Event probability.
    pub fn prob(&self) -> f64 {
        self.za.ratio(&self.z)
    }

    /// Marginal probability that edge `s` is open.
    pub fn marginal(&self, s: usize) -> f64 {
        self.z_open[s].ratio(&self.z)
    }

    /// Conditional influence of edge `s`:
    /// `P(A | s open) - P(A | s closed)`.
    pub fn conditional_influence(&self, s: usize) -> Result<f64, ExactError> {
        let z = self.z.value();
        let z1 = self.z_open[s].value();
        let za = self.za.value();
        let za1 = self.za_open[s].value();
        let z0 = z - z1;
        let za0 = za - za1;
        if !(z1 > 0.0) || !(z0 > 0.0) {
            return Err(ExactError::DegenerateConditioning);
        }
        Ok(za1 / z1 - za0 / z0)
    }

    pub fn edge_count(&self) -> usize {
        self.z_open.len()
    }

    /// Right-hand side of the derivative formula:
    /// `(1 / (p(1-p))) * sum_s phi(1_s)(1 - phi(1_s)) * J_s`.
    pub fn derivative_from_influences(&self, p: f64) -> Result<f64, ExactError> {
        if !(p > 0.0 && p < 1.0) {
            return Err(ExactError::InvalidParams("derivative requires 0 < p < 1"));
        }
        let mut acc = 0.0;
        for s in 0..self.edge_count() {
            let m = self.marginal(s);
            acc += m * (1.0 - m) * self.conditional_influence(s)?;
        }
        Ok(acc / (p * (1.0 - p)))
    }
}

/// Runs the single enumeration pass behind [`InfluenceProfile`].
pub fn influence_profile(
    g: &LatticeGraph,
    params: &RcParams,
    event: &EventSpec,
) -> Result<InfluenceProfile, ExactError> {
    params.validate()?;
    check_edge_budget(g)?;
    let e_count = g.edge_count();
    let mut ctx = EdgeEventCtx::prepare(g, event)?;
    let mut counter = super::ClusterCounter::new(g, params.bc);
    // Closed-edge masses are formed by subtraction, which needs a common
    // linear scale, so this pass always accumulates plain weights; they
    // stay representable for budget-sized graphs.
    let log_mode = false;
    let mut z = MassAcc::new(log_mode);
    let mut za = MassAcc::new(log_mode);
    let mut z_open: Vec<MassAcc> = (0..e_count).map(|_| MassAcc::new(log_mode)).collect();
    let mut za_open: Vec<MassAcc> = (0..e_count).map(|_| MassAcc::new(log_mode)).collect();
    let lin = RcWeightsLinear::new(params.p, params.q, e_count, g.vertex_count());
    for mask in 0..1u64 << e_count {
        let o = mask.count_ones() as usize;
        let k = counter.count(mask);
        let wt = lin.weight(o, k);
        let in_a = ctx.eval(mask);
        z.push(wt);
        if in_a {
            za.push(wt);
        }
        let mut rem = mask;
        while rem != 0 {
            let i = rem.trailing_zeros() as usize;
            z_open[i].push(wt);
            if in_a {
                za_open[i].push(wt);
            }
            rem &= rem - 1;
        }
    }
    Ok(InfluenceProfile { z, za, z_open, za_open })
}

/// Always-linear weight tables (differences of masses require a common
/// linear scale). Safe within the enumeration budget.
struct RcWeightsLinear {
    pow_p: Vec<f64>,
    pow_1p: Vec<f64>,
    pow_q: Vec<f64>,
    edges: usize,
}

impl RcWeightsLinear {
    fn new(p: f64, q: f64, edges: usize, vertices: usize) -> Self {
        let mut pow_p = Vec::with_capacity(edges + 1);
        let mut pow_1p = Vec::with_capacity(edges + 1);
        let mut pow_q = Vec::with_capacity(vertices + 2);
        let (mut a, mut b, mut c) = (1.0, 1.0, 1.0);
        for _ in 0..=edges {
            pow_p.push(a);
            pow_1p.push(b);
            a *= p;
            b *= 1.0 - p;
        }
        for _ in 0..=vertices + 1 {
            pow_q.push(c);
            c *= q;
        }
        Self { pow_p, pow_1p, pow_q, edges }
    }

    #[inline]
    fn weight(&self, o: usize, k: usize) -> f64 {
        self.pow_p[o] * self.pow_1p[self.edges - o] * self.pow_q[k]
    }
}

/// Conditional influence `J_A(s) = P(A | s open) - P(A | s closed)`.
pub fn conditional_influence(
    g: &LatticeGraph,
    params: &RcParams,
    event: &EventSpec,
    s: usize,
) -> Result<f64, ExactError> {
    if s >= g.edge_count() {
        return Err(ExactError::InvalidParams("edge index out of range"));
    }
    influence_profile(g, params, event)?.conditional_influence(s)
}

/// Absolute influence `I_A(s)`: probability that flipping edge `s` flips
/// the event indicator.
pub fn absolute_influence(
    g: &LatticeGraph,
    params: &RcParams,
    event: &EventSpec,
    s: usize,
) -> Result<f64, ExactError> {
    params.validate()?;
    check_edge_budget(g)?;
    let e_count = g.edge_count();
    if s >= e_count {
        return Err(ExactError::InvalidParams("edge index out of range"));
    }
    let mut ctx = EdgeEventCtx::prepare(g, event)?;
    let w = RcWeights::new(params.p, params.q, e_count, g.vertex_count());
    let mut counter = super::ClusterCounter::new(g, params.bc);
    let mut z = MassAcc::new(w.log_mode());
    let mut pivotal = MassAcc::new(w.log_mode());
    let bit = 1u64 << s;
    for mask in 0..1u64 << e_count {
        let o = mask.count_ones() as usize;
        let k = counter.count(mask);
        let wt = w.weight(o, k);
        z.push(wt);
        // Pivotality depends only on the configuration off s; evaluate the
        // event with s forced both ways.
        let hi = ctx.eval(mask | bit);
        let lo = ctx.eval(mask & !bit);
        if hi != lo {
            pivotal.push(wt);
        }
    }
    Ok(pivotal.ratio(&z))
}

/// Two sides of the exact derivative formula for an event probability,
/// with the left side obtained by a symmetric difference quotient.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DerivativeIdentityReport {
    /// `[P_{p+dp}(A) - P_{p-dp}(A)] / (2 dp)`.
    pub difference_quotient: f64,
    /// `(1/(p(1-p))) sum_s phi(1_s)(1-phi(1_s)) J_s`, exactly enumerated.
    pub influence_sum: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub dp: f64,
}

/// Audits the derivative formula at `params.p` with step `dp`.
pub fn derivative_identity_audit(
    g: &LatticeGraph,
    params: &RcParams,
    event: &EventSpec,
    dp: f64,
) -> Result<DerivativeIdentityReport, ExactError> {
    params.validate()?;
    if !(dp > 0.0) || params.p - dp <= 0.0 || params.p + dp >= 1.0 {
        return Err(ExactError::InvalidParams("dp must keep p +- dp inside (0, 1)"));
    }
    let lo = RcParams { p: params.p - dp, ..*params };
    let hi = RcParams { p: params.p + dp, ..*params };
    let p_lo = super::event_prob(g, &lo, event)?;
    let p_hi = super::event_prob(g, &hi, event)?;
    let dq = (p_hi - p_lo) / (2.0 * dp);
    let profile = influence_profile(g, params, event)?;
    let infl = profile.derivative_from_influences(params.p)?;
    let abs_err = (dq - infl).abs();
    let scale = dq.abs().max(infl.abs()).max(f64::MIN_POSITIVE);
    Ok(DerivativeIdentityReport {
        difference_quotient: dq,
        influence_sum: infl,
        abs_err,
        rel_err: abs_err / scale,
        dp,
    })
}

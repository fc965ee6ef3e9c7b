//! Exact computations on small graphs by complete enumeration.
//!
//! Everything here walks all `2^|E|` edge configurations (or `2^|V|` spin
//! configurations) of a graph, so hard budgets keep runtimes sane:
//! [`EDGE_ENUM_BUDGET`] edges and [`SPIN_ENUM_BUDGET`] vertices. Requests
//! beyond the budget fail loudly rather than silently approximating.
//!
//! Weights are accumulated directly (with compensated summation) for up to
//! 16 edges and in log space beyond that, so large cluster-weight factors
//! cannot overflow and long sums do not lose mass.

mod crcm;
mod fkg;
mod influence;
mod ising;

pub use crcm::{
    cluster_spin_weight, crcm_edge_config_table, crcm_edge_measure, crcm_monotonicity_audit,
    crcm_spin_prob, crcm_spin_table, CrcmParams, CRCM_EDGE_BUDGET, CRCM_SPIN_BUDGET,
};
pub use fkg::{fkg_lattice_audit, holley_ordering_audit, rc_fkg_audit, FkgOutcome, HolleyOutcome};
pub use influence::{
    absolute_influence, conditional_influence, derivative_identity_audit, influence_profile,
    DerivativeIdentityReport, InfluenceProfile,
};
pub use ising::{
    conditional_up_prob, ising_one_point, ising_prob, ising_spin_table, IsingBc, IsingParams,
};


use alloc::vec::Vec;

use crate::error::ExactError;
use crate::lattice::{
    clusters, Bc, Direction, EdgeConfig, LatticeGraph, PathMode, Rect, Side, SpinConfig, UnionFind,
};
use crate::math;

/// Maximum edges for edge-configuration enumeration (`2^24` states).
pub const EDGE_ENUM_BUDGET: usize = 24;
/// Maximum free vertices for spin-configuration enumeration (`2^20` states).
pub const SPIN_ENUM_BUDGET: usize = 20;

/// Random-cluster parameters: edge probability `p`, cluster weight `q`, and
/// the boundary condition used for cluster counting.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RcParams {
    pub p: f64,
    pub q: f64,
    pub bc: Bc,
}

impl RcParams {
    pub fn new(p: f64, q: f64, bc: Bc) -> Result<Self, ExactError> {
        let s = Self { p, q, bc };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ExactError> {
        if !(0.0..=1.0).contains(&self.p) || !self.p.is_finite() {
            return Err(ExactError::InvalidParams("p must lie in [0, 1]"));
        }
        if !(self.q > 0.0) || !self.q.is_finite() {
            return Err(ExactError::InvalidParams("q must be positive"));
        }
        Ok(())
    }
}

/// An event over edge or spin configurations.
///
/// `Mask` fixes the states of listed indices (edge indices under an edge
/// measure, vertex indices under a spin measure); the empty mask is the sure
/// event.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum EventSpec {
    Crossing { direction: Direction, mode: PathMode },
    /// Crossing of a sub-rectangle by a path confined to it.
    RectCrossing { rect: Rect, direction: Direction, mode: PathMode },
    Radius { x: usize, r: u32, mode: PathMode },
    EdgeOpen { edge: usize },
    VertexUp { x: usize },
    Mask { fixed: Vec<(usize, bool)> },
}

/// Monotonicity class of an event, used by the positive-association and
/// sharp-threshold audits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Neither,
}

impl EventSpec {
    /// Whether this event reads an edge configuration, a spin
    /// configuration, or either (mask events follow the measure they are
    /// used under).
    pub fn wants_spins(&self) -> Option<bool> {
        match self {
            EventSpec::Crossing { mode, .. }
            | EventSpec::RectCrossing { mode, .. }
            | EventSpec::Radius { mode, .. } => Some(*mode != PathMode::OpenPath),
            EventSpec::EdgeOpen { .. } => Some(false),
            EventSpec::VertexUp { .. } => Some(true),
            EventSpec::Mask { .. } => None,
        }
    }

    pub fn monotonicity(&self) -> Monotonicity {
        match self {
            EventSpec::Crossing { mode, .. }
            | EventSpec::RectCrossing { mode, .. }
            | EventSpec::Radius { mode, .. } => match mode {
                // Open and plus paths grow with the configuration; a
                // minus-star path grows as spins flip down.
                PathMode::OpenPath | PathMode::PlusPath => Monotonicity::Increasing,
                PathMode::MinusStarPath => Monotonicity::Decreasing,
            },
            EventSpec::EdgeOpen { .. } | EventSpec::VertexUp { .. } => Monotonicity::Increasing,
            EventSpec::Mask { fixed } => {
                if fixed.iter().all(|&(_, v)| v) {
                    Monotonicity::Increasing
                } else if fixed.iter().all(|&(_, v)| !v) {
                    Monotonicity::Decreasing
                } else {
                    Monotonicity::Neither
                }
            }
        }
    }
}

/// Evaluates an event on an explicit edge configuration.
pub fn event_holds_edges(
    g: &LatticeGraph,
    event: &EventSpec,
    cfg: &EdgeConfig,
) -> Result<bool, ExactError> {
    if event.wants_spins() == Some(true) {
        return Err(ExactError::EventKindMismatch);
    }
    g.check_edge_config(cfg)?;
    match event {
        EventSpec::Crossing { direction, mode } => Ok(crate::lattice::has_crossing(
            g,
            crate::lattice::StateRef::Edges(cfg),
            *direction,
            *mode,
        )?),
        EventSpec::RectCrossing { rect, direction, mode } => {
            Ok(crate::lattice::has_rect_crossing(
                g,
                crate::lattice::StateRef::Edges(cfg),
                *rect,
                *direction,
                *mode,
            )?)
        }
        EventSpec::Radius { x, r, mode } => Ok(crate::lattice::radius_reached(
            g,
            crate::lattice::StateRef::Edges(cfg),
            *x,
            *r,
            *mode,
        )?),
        EventSpec::EdgeOpen { edge } => {
            if *edge >= g.edge_count() {
                return Err(ExactError::InvalidParams("edge index out of range"));
            }
            Ok(cfg.is_open(*edge))
        }
        EventSpec::VertexUp { .. } => Err(ExactError::EventKindMismatch),
        EventSpec::Mask { fixed } => {
            for &(i, v) in fixed {
                if i >= g.edge_count() {
                    return Err(ExactError::InvalidParams("mask index out of range"));
                }
                if cfg.is_open(i) != v {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Evaluates an event on an explicit spin configuration.
pub fn event_holds_spins(
    g: &LatticeGraph,
    event: &EventSpec,
    cfg: &SpinConfig,
) -> Result<bool, ExactError> {
    if event.wants_spins() == Some(false) {
        return Err(ExactError::EventKindMismatch);
    }
    g.check_spin_config(cfg)?;
    match event {
        EventSpec::Crossing { direction, mode } => Ok(crate::lattice::has_crossing(
            g,
            crate::lattice::StateRef::Spins(cfg),
            *direction,
            *mode,
        )?),
        EventSpec::RectCrossing { rect, direction, mode } => {
            Ok(crate::lattice::has_rect_crossing(
                g,
                crate::lattice::StateRef::Spins(cfg),
                *rect,
                *direction,
                *mode,
            )?)
        }
        EventSpec::Radius { x, r, mode } => Ok(crate::lattice::radius_reached(
            g,
            crate::lattice::StateRef::Spins(cfg),
            *x,
            *r,
            *mode,
        )?),
        EventSpec::VertexUp { x } => {
            if *x >= g.vertex_count() {
                return Err(ExactError::InvalidParams("vertex index out of range"));
            }
            Ok(cfg.is_up(*x))
        }
        EventSpec::EdgeOpen { .. } => Err(ExactError::EventKindMismatch),
        EventSpec::Mask { fixed } => {
            for &(i, v) in fixed {
                if i >= g.vertex_count() {
                    return Err(ExactError::InvalidParams("mask index out of range"));
                }
                if cfg.is_up(i) != v {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

// ---------------------------------------------------------------------------
// Weight computation and compensated accumulation.
// ---------------------------------------------------------------------------

/// Per-configuration random-cluster weight evaluator. Direct table products
/// up to 16 edges, log space beyond.
pub(crate) struct RcWeights {
    log_mode: bool,
    pow_p: Vec<f64>,
    pow_1p: Vec<f64>,
    pow_q: Vec<f64>,
    ln_p: f64,
    ln_1p: f64,
    ln_q: f64,
    edges: usize,
}

impl RcWeights {
    pub fn new(p: f64, q: f64, edges: usize, vertices: usize) -> Self {
        let log_mode = edges > 16;
        let mut pow_p = Vec::with_capacity(edges + 1);
        let mut pow_1p = Vec::with_capacity(edges + 1);
        let mut pow_q = Vec::with_capacity(vertices + 2);
        let mut a = 1.0;
        let mut b = 1.0;
        for _ in 0..=edges {
            pow_p.push(a);
            pow_1p.push(b);
            a *= p;
            b *= 1.0 - p;
        }
        let mut c = 1.0;
        for _ in 0..=vertices + 1 {
            pow_q.push(c);
            c *= q;
        }
        Self {
            log_mode,
            pow_p,
            pow_1p,
            pow_q,
            ln_p: math::ln(p),
            ln_1p: math::ln(1.0 - p),
            ln_q: math::ln(q),
            edges,
        }
    }

    pub fn log_mode(&self) -> bool {
        self.log_mode
    }

    /// Weight of a configuration with `o` open edges and `k` clusters, in
    /// the active representation (plain weight or log-weight).
    #[inline]
    pub fn weight(&self, o: usize, k: usize) -> f64 {
        if !self.log_mode {
            self.pow_p[o] * self.pow_1p[self.edges - o] * self.pow_q[k]
        } else {
            // Guard 0 * ln(0): a zero count contributes exactly nothing.
            let mut lw = 0.0;
            if o > 0 {
                lw += o as f64 * self.ln_p;
            }
            let c = self.edges - o;
            if c > 0 {
                lw += c as f64 * self.ln_1p;
            }
            if k > 0 {
                lw += k as f64 * self.ln_q;
            }
            lw
        }
    }
}

/// Compensated mass accumulator matching the representation of
/// [`RcWeights`]: Neumaier summation in linear mode, streaming
/// log-sum-exp with Neumaier compensation in log mode.
#[derive(Debug, Clone)]
pub(crate) struct MassAcc {
    log_mode: bool,
    sum: f64,
    comp: f64,
    max: f64,
    any: bool,
}

impl MassAcc {
    pub fn new(log_mode: bool) -> Self {
        Self { log_mode, sum: 0.0, comp: 0.0, max: f64::NEG_INFINITY, any: false }
    }

    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if math::abs(self.sum) >= math::abs(x) {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn push(&mut self, w: f64) {
        if !self.log_mode {
            self.add(w);
            return;
        }
        if w == f64::NEG_INFINITY {
            return; // zero mass
        }
        if !self.any {
            self.any = true;
            self.max = w;
            self.sum = 1.0;
            self.comp = 0.0;
            return;
        }
        if w <= self.max {
            self.add(math::exp(w - self.max));
        } else {
            let scale = math::exp(self.max - w);
            self.sum *= scale;
            self.comp *= scale;
            self.max = w;
            self.add(1.0);
        }
    }

    /// Natural log of the accumulated mass.
    pub fn log_value(&self) -> f64 {
        let s = self.sum + self.comp;
        if !self.log_mode {
            if s > 0.0 {
                math::ln(s)
            } else {
                f64::NEG_INFINITY
            }
        } else if self.any && s > 0.0 {
            self.max + math::ln(s)
        } else {
            f64::NEG_INFINITY
        }
    }

    /// Accumulated mass in linear scale.
    pub fn value(&self) -> f64 {
        if !self.log_mode {
            self.sum + self.comp
        } else if self.any {
            math::exp(self.log_value())
        } else {
            0.0
        }
    }

    /// `self / den`, computed stably in the active representation.
    pub fn ratio(&self, den: &MassAcc) -> f64 {
        if !self.log_mode {
            self.value() / den.value()
        } else {
            let n = self.log_value();
            let d = den.log_value();
            if n == f64::NEG_INFINITY && d == f64::NEG_INFINITY {
                f64::NAN
            } else {
                math::exp(n - d)
            }
        }
    }
}

/// Cluster counting specialised for mask enumeration, with the wired
/// boundary merged before counting when requested.
pub(crate) struct ClusterCounter {
    uf: UnionFind,
    edges: Vec<(u32, u32)>,
    boundary: Vec<u32>,
    wired: bool,
}

impl ClusterCounter {
    pub fn new(g: &LatticeGraph, bc: Bc) -> Self {
        Self {
            uf: UnionFind::new(g.vertex_count()),
            edges: g.edges().iter().map(|e| (e.a as u32, e.b as u32)).collect(),
            boundary: g.boundary_vertices().map(|v| v as u32).collect(),
            wired: bc == Bc::Wired,
        }
    }

    /// Number of clusters of the configuration encoded in `mask`.
    #[inline]
    pub fn count(&mut self, mask: u64) -> usize {
        self.uf.reset();
        if self.wired {
            for w in self.boundary.windows(2) {
                self.uf.union(w[0] as usize, w[1] as usize);
            }
        }
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                self.uf.union(a as usize, b as usize);
            }
        }
        self.uf.count()
    }
}

/// Raw open-edge connectivity oracle (no boundary merging), for evaluating
/// crossing and radius events during enumeration without allocations.
pub(crate) struct EdgeEventCtx {
    kind: EventCtxKind,
    uf: UnionFind,
    edges: Vec<(u32, u32)>,
    /// For rect crossings: (edge index, a, b) of edges inside the rect.
    rect_edges: Vec<(u32, u32, u32)>,
}

enum EventCtxKind {
    Sure,
    Crossing { from: Vec<u32>, to: Vec<u32> },
    RectCrossing { from: Vec<u32>, to: Vec<u32> },
    Radius { x: u32, shell: Vec<u32> },
    EdgeOpen { edge: u32 },
    Mask { fixed: Vec<(u32, bool)> },
}

impl EdgeEventCtx {
    pub fn prepare(g: &LatticeGraph, event: &EventSpec) -> Result<Self, ExactError> {
        if event.wants_spins() == Some(true) {
            return Err(ExactError::EventKindMismatch);
        }
        let mut rect_edges = Vec::new();
        let kind = match event {
            EventSpec::RectCrossing { rect, direction, mode } => {
                if *mode != PathMode::OpenPath {
                    return Err(ExactError::EventKindMismatch);
                }
                if rect.x1 < rect.x0 || rect.y1 < rect.y0 {
                    return Err(ExactError::InvalidParams("empty rectangle"));
                }
                let mut from = Vec::new();
                let mut to = Vec::new();
                for v in 0..g.vertex_count() {
                    let (x, y) = g.coords(v);
                    if !rect.contains(x, y) {
                        continue;
                    }
                    let (on_from, on_to) = match direction {
                        Direction::LeftRight => (x == rect.x0, x == rect.x1),
                        Direction::TopBottom => (y == rect.y1, y == rect.y0),
                    };
                    if on_from {
                        from.push(v as u32);
                    }
                    if on_to {
                        to.push(v as u32);
                    }
                }
                for (i, e) in g.edges().iter().enumerate() {
                    let (ax, ay) = g.coords(e.a);
                    let (bx, by) = g.coords(e.b);
                    if rect.contains(ax, ay) && rect.contains(bx, by) {
                        rect_edges.push((i as u32, e.a as u32, e.b as u32));
                    }
                }
                EventCtxKind::RectCrossing { from, to }
            }
            EventSpec::Crossing { direction, mode } => {
                if *mode != PathMode::OpenPath {
                    return Err(ExactError::EventKindMismatch);
                }
                let (from, to) = match direction {
                    Direction::LeftRight => (Side::Left, Side::Right),
                    Direction::TopBottom => (Side::Top, Side::Bottom),
                };
                EventCtxKind::Crossing {
                    from: g.side(from)?.into_iter().map(|v| v as u32).collect(),
                    to: g.side(to)?.into_iter().map(|v| v as u32).collect(),
                }
            }
            EventSpec::Radius { x, r, mode } => {
                if *mode != PathMode::OpenPath {
                    return Err(ExactError::EventKindMismatch);
                }
                if *x >= g.vertex_count() {
                    return Err(ExactError::InvalidParams("vertex index out of range"));
                }
                if *r == 0 {
                    EventCtxKind::Sure
                } else {
                    let (cx, cy) = g.coords(*x);
                    let shell: Vec<u32> = (0..g.vertex_count())
                        .filter(|&v| {
                            let (vx, vy) = g.coords(v);
                            (vx - cx).abs().max((vy - cy).abs()) == *r as i32
                        })
                        .map(|v| v as u32)
                        .collect();
                    EventCtxKind::Radius { x: *x as u32, shell }
                }
            }
            EventSpec::EdgeOpen { edge } => {
                if *edge >= g.edge_count() {
                    return Err(ExactError::InvalidParams("edge index out of range"));
                }
                EventCtxKind::EdgeOpen { edge: *edge as u32 }
            }
            EventSpec::VertexUp { .. } => return Err(ExactError::EventKindMismatch),
            EventSpec::Mask { fixed } => {
                let mut fx = Vec::with_capacity(fixed.len());
                for &(i, v) in fixed {
                    if i >= g.edge_count() {
                        return Err(ExactError::InvalidParams("mask index out of range"));
                    }
                    fx.push((i as u32, v));
                }
                EventCtxKind::Mask { fixed: fx }
            }
        };
        Ok(Self {
            kind,
            uf: UnionFind::new(g.vertex_count()),
            edges: g.edges().iter().map(|e| (e.a as u32, e.b as u32)).collect(),
            rect_edges,
        })
    }

    #[inline]
    fn connect(&mut self, mask: u64) {
        self.uf.reset();
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                self.uf.union(a as usize, b as usize);
            }
        }
    }

    #[inline]
    fn connect_rect(&mut self, mask: u64) {
        self.uf.reset();
        for i in 0..self.rect_edges.len() {
            let (e, a, b) = self.rect_edges[i];
            if mask >> e & 1 == 1 {
                self.uf.union(a as usize, b as usize);
            }
        }
    }

    #[inline]
    pub fn eval(&mut self, mask: u64) -> bool {
        match &self.kind {
            EventCtxKind::Sure => true,
            EventCtxKind::EdgeOpen { edge } => mask >> *edge & 1 == 1,
            EventCtxKind::Mask { fixed } => {
                fixed.iter().all(|&(i, v)| (mask >> i & 1 == 1) == v)
            }
            EventCtxKind::Crossing { .. } | EventCtxKind::Radius { .. } => {
                self.connect(mask);
                match &self.kind {
                    EventCtxKind::Crossing { from, to } => {
                        for &a in from {
                            for &b in to {
                                if self.uf.same(a as usize, b as usize) {
                                    return true;
                                }
                            }
                        }
                        false
                    }
                    EventCtxKind::Radius { x, shell } => {
                        let x = *x as usize;
                        for &s in shell {
                            if self.uf.same(x, s as usize) {
                                return true;
                            }
                        }
                        false
                    }
                    _ => unreachable!(),
                }
            }
            EventCtxKind::RectCrossing { .. } => {
                self.connect_rect(mask);
                match &self.kind {
                    EventCtxKind::RectCrossing { from, to } => {
                        for &a in from {
                            for &b in to {
                                if self.uf.same(a as usize, b as usize) {
                                    return true;
                                }
                            }
                        }
                        false
                    }
                    _ => unreachable!(),
                }
            }
        }
    }
}

pub(crate) fn check_edge_budget(g: &LatticeGraph) -> Result<(), ExactError> {
    if g.edge_count() > EDGE_ENUM_BUDGET {
        return Err(ExactError::EdgeBudget { edges: g.edge_count(), budget: EDGE_ENUM_BUDGET });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Random-cluster enumeration operations.
// ---------------------------------------------------------------------------

/// Unnormalised random-cluster weight of one configuration:
/// `p^{open} (1-p)^{closed} q^{clusters}` with the cluster count taken under
/// the boundary condition in `params`.
pub fn rc_weight(
    g: &LatticeGraph,
    cfg: &EdgeConfig,
    params: &RcParams,
) -> Result<f64, ExactError> {
    params.validate()?;
    let part = clusters(g, cfg, params.bc)?;
    let o = cfg.count_open();
    let c = g.edge_count() - o;
    Ok(math::powi(params.p, o as i32)
        * math::powi(1.0 - params.p, c as i32)
        * math::powi(params.q, part.cluster_count() as i32))
}

/// Sum of [`rc_weight`] over all configurations.
pub fn partition_function(g: &LatticeGraph, params: &RcParams) -> Result<f64, ExactError> {
    params.validate()?;
    check_edge_budget(g)?;
    let w = RcWeights::new(params.p, params.q, g.edge_count(), g.vertex_count());
    let mut counter = ClusterCounter::new(g, params.bc);
    let mut z = MassAcc::new(w.log_mode());
    for mask in 0..1u64 << g.edge_count() {
        let o = mask.count_ones() as usize;
        let k = counter.count(mask);
        z.push(w.weight(o, k));
    }
    Ok(z.value())
}

/// Probability of `event` under the random-cluster measure on `g`.
pub fn event_prob(
    g: &LatticeGraph,
    params: &RcParams,
    event: &EventSpec,
) -> Result<f64, ExactError> {
    params.validate()?;
    check_edge_budget(g)?;
    let mut ctx = EdgeEventCtx::prepare(g, event)?;
    let w = RcWeights::new(params.p, params.q, g.edge_count(), g.vertex_count());
    let mut counter = ClusterCounter::new(g, params.bc);
    let mut z = MassAcc::new(w.log_mode());
    let mut za = MassAcc::new(w.log_mode());
    for mask in 0..1u64 << g.edge_count() {
        let o = mask.count_ones() as usize;
        let k = counter.count(mask);
        let wt = w.weight(o, k);
        z.push(wt);
        if ctx.eval(mask) {
            za.push(wt);
        }
    }
    Ok(za.ratio(&z))
}

/// Exact marginal `phi(edge open)`.
pub fn edge_marginal(g: &LatticeGraph, params: &RcParams, edge: usize) -> Result<f64, ExactError> {
    event_prob(g, params, &EventSpec::EdgeOpen { edge })
}

/// Outcome of auditing every edge marginal against the bounds
/// `p / (p + q(1-p)) <= phi(edge open) <= p` (valid for `q >= 1`).
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MarginalBoundsReport {
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub marginals: Vec<f64>,
    /// Smallest `marginal - lower_bound` over edges.
    pub min_lower_slack: f64,
    /// Smallest `upper_bound - marginal` over edges.
    pub min_upper_slack: f64,
    pub ok: bool,
}

/// Computes all edge marginals in one pass and audits them against the
/// two-sided bound above. Tolerance `1e-12` absorbs roundoff.
pub fn edge_marginal_bounds_audit(
    g: &LatticeGraph,
    params: &RcParams,
) -> Result<MarginalBoundsReport, ExactError> {
    params.validate()?;
    if params.q < 1.0 {
        return Err(ExactError::InvalidParams("marginal bounds require q >= 1"));
    }
    check_edge_budget(g)?;
    let e_count = g.edge_count();
    let w = RcWeights::new(params.p, params.q, e_count, g.vertex_count());
    let mut counter = ClusterCounter::new(g, params.bc);
    let mut z = MassAcc::new(w.log_mode());
    let mut open: Vec<MassAcc> = (0..e_count).map(|_| MassAcc::new(w.log_mode())).collect();
    for mask in 0..1u64 << e_count {
        let o = mask.count_ones() as usize;
        let k = counter.count(mask);
        let wt = w.weight(o, k);
        z.push(wt);
        let mut rem = mask;
        while rem != 0 {
            let i = rem.trailing_zeros() as usize;
            open[i].push(wt);
            rem &= rem - 1;
        }
    }
    let marginals: Vec<f64> = open.iter().map(|acc| acc.ratio(&z)).collect();
    let p = params.p;
    let lower = p / (p + params.q * (1.0 - p));
    let upper = p;
    let mut min_lo = f64::INFINITY;
    let mut min_hi = f64::INFINITY;
    for &m in &marginals {
        min_lo = min_lo.min(m - lower);
        min_hi = min_hi.min(upper - m);
    }
    let tol = 1e-12;
    Ok(MarginalBoundsReport {
        lower_bound: lower,
        upper_bound: upper,
        marginals,
        min_lower_slack: min_lo,
        min_upper_slack: min_hi,
        ok: min_lo >= -tol && min_hi >= -tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::lattice::GraphKind;

    fn free(p: f64, q: f64) -> RcParams {
        RcParams::new(p, q, Bc::Free).unwrap()
    }

    #[test]
    fn single_edge_weights() {
        let g = corpus::single_edge();
        let params = free(0.5, 2.0);
        let open = EdgeConfig::all_open(1);
        let closed = EdgeConfig::all_closed(1);
        // Open: one cluster. Closed: two singletons.
        assert!((rc_weight(&g, &open, &params).unwrap() - 1.0).abs() < 1e-15);
        assert!((rc_weight(&g, &closed, &params).unwrap() - 2.0).abs() < 1e-15);
        assert!((partition_function(&g, &params).unwrap() - 3.0).abs() < 1e-14);
        let m = edge_marginal(&g, &params, 0).unwrap();
        assert!((m - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn q_one_is_product_measure() {
        let g = corpus::box_2_1();
        let params = free(0.3, 1.0);
        for e in 0..g.edge_count() {
            let m = edge_marginal(&g, &params, e).unwrap();
            assert!((m - 0.3).abs() < 1e-13, "edge {e}: {m}");
        }
    }

    #[test]
    fn wired_changes_weights() {
        // Box(2,1) all-closed: free counts 6 clusters, wired counts 1.
        let g = corpus::box_2_1();
        let closed = EdgeConfig::all_closed(7);
        let wf = rc_weight(&g, &closed, &free(0.5, 2.0)).unwrap();
        let ww =
            rc_weight(&g, &closed, &RcParams::new(0.5, 2.0, Bc::Wired).unwrap()).unwrap();
        assert!((wf - 2.0f64.powi(6) * 0.5f64.powi(7)).abs() < 1e-15);
        assert!((ww - 2.0 * 0.5f64.powi(7)).abs() < 1e-15);
    }

    #[test]
    fn marginal_bounds_hold_on_corpus() {
        for (name, g) in corpus::all() {
            for &(p, q) in &[(0.3, 1.0), (0.5, 2.0), (0.7, 4.0)] {
                let rep = edge_marginal_bounds_audit(&g, &free(p, q)).unwrap();
                assert!(rep.ok, "{name} p={p} q={q}: {rep:?}");
            }
        }
    }

    #[test]
    fn marginal_bounds_reject_small_q() {
        let g = corpus::single_edge();
        assert!(edge_marginal_bounds_audit(&g, &free(0.5, 0.5)).is_err());
    }

    #[test]
    fn crossing_prob_at_self_dual_point_q1() {
        // Configuration-level self-duality forces exactly one half.
        for k in 1..=3u32 {
            let g = LatticeGraph::build_box(GraphKind::Box { k, m: k - 1 }).unwrap();
            let p = event_prob(
                &g,
                &free(0.5, 1.0),
                &EventSpec::Crossing {
                    direction: Direction::LeftRight,
                    mode: PathMode::OpenPath,
                },
            )
            .unwrap();
            assert!((p - 0.5).abs() < 1e-12, "k={k}: {p}");
        }
    }

    #[test]
    fn budget_rejected() {
        let g = LatticeGraph::build_box(GraphKind::CenteredBox { n: 2 }).unwrap();
        assert_eq!(g.edge_count(), 40);
        assert!(matches!(
            partition_function(&g, &free(0.5, 2.0)),
            Err(ExactError::EdgeBudget { .. })
        ));
    }

    #[test]
    fn mass_acc_log_and_linear_agree() {
        let mut lin = MassAcc::new(false);
        let mut log = MassAcc::new(true);
        let values = [1.0e-3, 2.5, 1.0e3, 7.0e-2, 42.0, 1.0e-6];
        for &v in &values {
            lin.push(v);
            log.push(math::ln(v));
        }
        let direct: f64 = values.iter().sum();
        assert!((lin.value() - direct).abs() < 1e-12);
        assert!((log.value() - direct).abs() / direct < 1e-14);
    }

    #[test]
    fn event_prob_sure_event_is_one() {
        let g = corpus::unit_square();
        let p = event_prob(&g, &free(0.4, 1.7), &EventSpec::Mask { fixed: Vec::new() }).unwrap();
        assert!((p - 1.0).abs() < 1e-14);
    }

    #[test]
    fn radius_event_prob() {
        let g = LatticeGraph::build_box(GraphKind::CenteredBox { n: 1 }).unwrap();
        let origin = g.vertex_at(0, 0).unwrap();
        let params = free(0.5, 1.0);
        let p0 = event_prob(
            &g,
            &params,
            &EventSpec::Radius { x: origin, r: 0, mode: PathMode::OpenPath },
        )
        .unwrap();
        assert!((p0 - 1.0).abs() < 1e-14);
        let p1 = event_prob(
            &g,
            &params,
            &EventSpec::Radius { x: origin, r: 1, mode: PathMode::OpenPath },
        )
        .unwrap();
        // Origin reaches distance one unless all four incident edges are
        // closed: 1 - (1/2)^4.
        assert!((p1 - (1.0 - 0.0625)).abs() < 1e-13);
    }

    #[test]
    fn event_kind_mismatch() {
        let g = corpus::box_2_1();
        let err = event_prob(&g, &free(0.5, 2.0), &EventSpec::VertexUp { x: 0 }).unwrap_err();
        assert_eq!(err, ExactError::EventKindMismatch);
    }
}

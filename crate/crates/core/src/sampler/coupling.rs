//! Exact sequential couplings of conditioned measures.
//!
//! Both couplings reveal edges one at a time with a shared uniform per
//! step, computing each chain's conditional open probability by exact
//! subset sums over the unrevealed edges. The reveal order is adaptive:
//! first the edges touching the upper chain's growing cluster of the
//! distinguished edge/vertex, then (once that cluster is closed off) the
//! remainder, where the two conditional probabilities provably coincide.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{ExactError, SampleError};
use crate::exact::{cluster_spin_weight, ClusterCounter, CrcmParams, RcParams};
use crate::lattice::{clusters, Bc, EdgeConfig, LatticeGraph, SpinConfig};
use crate::math;

/// Edge budget for coupling weight tables (two `2^edges` arrays).
pub const COUPLING_EDGE_BUDGET: usize = 16;

/// Tolerance on per-step conditional probabilities: the lower chain's
/// open probability may exceed the upper chain's by at most this much,
/// and after the upper cluster is closed off the two must agree to it.
const STEP_TOL: f64 = 1e-9;

/// Per-draw self-checks. `ok()` holds on every draw when the coupling's
/// premises are met; any `false`/large field is a counterexample to the
/// ordering or agreement claims.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingAudit {
    /// Every adaptive step had lower conditional <= upper conditional.
    pub conditional_order_ok: bool,
    /// Largest |upper - lower| conditional gap after the frontier died.
    pub tail_gap: f64,
    /// Final configurations satisfy lower <= upper edgewise.
    pub ordered: bool,
    /// Configurations (and colours, where present) agree off the upper
    /// chain's distinguished cluster.
    pub agree_off_cluster: bool,
}

impl CouplingAudit {
    fn new() -> Self {
        Self { conditional_order_ok: true, tail_gap: 0.0, ordered: true, agree_off_cluster: true }
    }

    pub fn ok(&self) -> bool {
        self.conditional_order_ok && self.tail_gap <= STEP_TOL && self.ordered && self.agree_off_cluster
    }
}

fn check_budgets(g: &LatticeGraph) -> Result<(), SampleError> {
    if g.edge_count() > COUPLING_EDGE_BUDGET {
        return Err(SampleError::Exact(ExactError::EdgeBudget {
            edges: g.edge_count(),
            budget: COUPLING_EDGE_BUDGET,
        }));
    }
    if g.vertex_count() > 64 {
        return Err(SampleError::Exact(ExactError::VertexBudget {
            vertices: g.vertex_count(),
            budget: 64,
        }));
    }
    Ok(())
}

/// P(edge `f` open | revealed bits `val` on `revealed`) under the mass
/// table `w`, by summing `w` over all completions of the unrevealed edges.
fn cond_open_prob(w: &[f64], full: u64, revealed: u64, val: u64, f: usize) -> f64 {
    let free = full & !revealed & !(1 << f);
    let mut open = 0.0;
    let mut closed = 0.0;
    let mut s = free;
    loop {
        let base = (val | s) as usize;
        open += w[base | 1 << f];
        closed += w[base & !(1 << f)];
        if s == 0 {
            break;
        }
        s = (s - 1) & free;
    }
    open / (open + closed)
}

/// State shared by both couplings: reveals edges against two mass tables
/// with a common uniform per step, growing the upper chain's cluster from
/// a seed vertex set.
struct Reveal {
    full: u64,
    revealed: u64,
    lo: u64,
    hi: u64,
    cluster: u64,
    queued: u64,
    queue: VecDeque<usize>,
    audit: CouplingAudit,
}

impl Reveal {
    fn new(ne: usize) -> Self {
        Self {
            full: if ne == 64 { u64::MAX } else { (1u64 << ne) - 1 },
            revealed: 0,
            lo: 0,
            hi: 0,
            cluster: 0,
            queued: 0,
            queue: VecDeque::new(),
            audit: CouplingAudit::new(),
        }
    }

    fn absorb(&mut self, g: &LatticeGraph, v: usize) {
        if self.cluster >> v & 1 == 1 {
            return;
        }
        self.cluster |= 1 << v;
        for &(_, e) in g.adjacency(v) {
            if self.revealed >> e & 1 == 0 && self.queued >> e & 1 == 0 {
                self.queued |= 1 << e;
                self.queue.push_back(e);
            }
        }
    }

    fn run<R: Rng>(&mut self, g: &LatticeGraph, w_lo: &[f64], w_hi: &[f64], rng: &mut R) {
        // Phase 1: edges on the upper cluster's frontier.
        while let Some(f) = self.queue.pop_front() {
            if self.revealed >> f & 1 == 1 {
                continue;
            }
            let p_hi = cond_open_prob(w_hi, self.full, self.revealed, self.hi, f);
            let p_lo = cond_open_prob(w_lo, self.full, self.revealed, self.lo, f);
            if p_lo > p_hi + STEP_TOL {
                self.audit.conditional_order_ok = false;
            }
            let u: f64 = rng.gen();
            self.revealed |= 1 << f;
            if u < p_hi {
                self.hi |= 1 << f;
                let e = g.edges()[f];
                self.absorb(g, e.a);
                self.absorb(g, e.b);
            }
            if u < p_lo {
                self.lo |= 1 << f;
            }
        }
        // Phase 2: the upper cluster is surrounded by closed edges, so the
        // two conditional laws on the rest coincide; sample once.
        for f in 0..g.edge_count() {
            if self.revealed >> f & 1 == 1 {
                continue;
            }
            let p_hi = cond_open_prob(w_hi, self.full, self.revealed, self.hi, f);
            let p_lo = cond_open_prob(w_lo, self.full, self.revealed, self.lo, f);
            let gap = (p_hi - p_lo).abs();
            if gap > self.audit.tail_gap {
                self.audit.tail_gap = gap;
            }
            let u: f64 = rng.gen();
            self.revealed |= 1 << f;
            if u < p_hi {
                self.hi |= 1 << f;
                self.lo |= 1 << f;
            }
        }
        if self.lo & !self.hi != 0 {
            self.audit.ordered = false;
        }
        for (f, e) in g.edges().iter().enumerate() {
            let touches = self.cluster >> e.a & 1 == 1 || self.cluster >> e.b & 1 == 1;
            let in_cluster = self.cluster >> e.a & 1 == 1 && self.cluster >> e.b & 1 == 1;
            if !in_cluster && (self.lo ^ self.hi) >> f & 1 == 1 {
                self.audit.agree_off_cluster = false;
            }
            // An edge touching the upper cluster with one foot outside
            // must be closed in the upper configuration.
            if touches && !in_cluster && self.hi >> f & 1 == 1 {
                self.audit.agree_off_cluster = false;
            }
        }
    }
}

/// Monotone coupling of the random-cluster measure conditioned on a fixed
/// edge being closed (lower) versus open (upper). Requires `q >= 1` and
/// `p` strictly inside (0,1).
pub struct MuECoupling {
    w: Vec<f64>,
    edge: usize,
    ne: usize,
    a: usize,
    b: usize,
}

impl MuECoupling {
    pub fn new(g: &LatticeGraph, params: &RcParams, edge: usize) -> Result<Self, SampleError> {
        params.validate().map_err(SampleError::Exact)?;
        check_budgets(g)?;
        if edge >= g.edge_count() {
            return Err(SampleError::Exact(ExactError::InvalidParams("edge index out of range")));
        }
        if params.q < 1.0 || params.p <= 0.0 || params.p >= 1.0 {
            return Err(SampleError::UnsupportedParams(
                "coupling needs q >= 1 and p strictly inside (0, 1)",
            ));
        }
        let ne = g.edge_count();
        let mut counter = ClusterCounter::new(g, params.bc);
        let mut w = vec![0.0f64; 1 << ne];
        for (m, slot) in w.iter_mut().enumerate() {
            let o = (m as u64).count_ones() as i32;
            let k = counter.count(m as u64) as i32;
            *slot = math::powi(params.p, o)
                * math::powi(1.0 - params.p, ne as i32 - o)
                * math::powi(params.q, k);
        }
        let e = g.edges()[edge];
        Ok(Self { w, edge, ne, a: e.a, b: e.b })
    }

    /// One coupled draw `(lower, upper, audit)` from a shared randomness
    /// stream: lower ~ conditioned-closed, upper ~ conditioned-open.
    pub fn draw<R: Rng>(
        &self,
        g: &LatticeGraph,
        rng: &mut R,
    ) -> (EdgeConfig, EdgeConfig, CouplingAudit) {
        let mut rv = Reveal::new(self.ne);
        rv.revealed = 1 << self.edge;
        rv.hi = 1 << self.edge;
        rv.absorb(g, self.a);
        rv.absorb(g, self.b);
        rv.run(g, &self.w, &self.w, rng);
        (
            EdgeConfig::from_mask(rv.lo, self.ne),
            EdgeConfig::from_mask(rv.hi, self.ne),
            rv.audit,
        )
    }
}

/// Convenience single draw of [`MuECoupling`].
pub fn coupling_mu_e<R: Rng>(
    g: &LatticeGraph,
    params: &RcParams,
    edge: usize,
    rng: &mut R,
) -> Result<(EdgeConfig, EdgeConfig, CouplingAudit), SampleError> {
    let c = MuECoupling::new(g, params, edge)?;
    Ok(c.draw(g, rng))
}

/// One coupled draw of the coloured model conditioned on the spin at the
/// distinguished vertex: the `down` pair conditions it down, `up` up.
#[derive(Debug, Clone)]
pub struct Kappa01Draw {
    pub edges_down: EdgeConfig,
    pub spins_down: SpinConfig,
    pub edges_up: EdgeConfig,
    pub spins_up: SpinConfig,
    pub audit: CouplingAudit,
}

/// Monotone coupling of the coloured model's edge-and-spin law given the
/// spin at a fixed vertex `x`. In the monotone regime the chain whose
/// conditioning is favoured by the field (up when `h >= 0`) dominates the
/// other; colours off its `x`-cluster are drawn with shared uniforms in
/// canonical root order, so the two spin configurations agree there.
pub struct Kappa01Coupling {
    w_down: Vec<f64>,
    w_up: Vec<f64>,
    x: usize,
    ne: usize,
    alpha: f64,
    h: f64,
    up_is_upper: bool,
}

impl Kappa01Coupling {
    pub fn new(g: &LatticeGraph, params: &CrcmParams, x: usize) -> Result<Self, SampleError> {
        params.validate().map_err(SampleError::Exact)?;
        check_budgets(g)?;
        if x >= g.vertex_count() {
            return Err(SampleError::Exact(ExactError::InvalidParams("vertex index out of range")));
        }
        if !params.in_monotone_regime() || params.p <= 0.0 || params.p >= 1.0 {
            return Err(SampleError::UnsupportedParams(
                "coupling needs the monotone regime and p strictly inside (0, 1)",
            ));
        }
        let ne = g.edge_count();
        let mut w_down = vec![0.0f64; 1 << ne];
        let mut w_up = vec![0.0f64; 1 << ne];
        for m in 0..1u64 << ne {
            let cfg = EdgeConfig::from_mask(m, ne);
            let part = clusters(g, &cfg, Bc::Free).expect("validated config");
            let o = m.count_ones() as i32;
            let mut base = math::powi(params.p, o)
                * math::powi(1.0 - params.p, ne as i32 - o)
                * math::powi(params.q, part.cluster_count() as i32);
            let x_root = part.label(x);
            for r in part.roots() {
                if r != x_root {
                    base *= cluster_spin_weight(params.alpha, params.h, part.cluster_size(r));
                }
            }
            let sx = part.cluster_size(x);
            w_up[m as usize] = base * params.alpha * math::exp(params.h * sx as f64);
            w_down[m as usize] = base * (1.0 - params.alpha);
        }
        Ok(Self {
            w_down,
            w_up,
            x,
            ne,
            alpha: params.alpha,
            h: params.h,
            up_is_upper: params.h >= 0.0,
        })
    }

    pub fn draw<R: Rng>(&self, g: &LatticeGraph, rng: &mut R) -> Kappa01Draw {
        let (w_lo, w_hi) = if self.up_is_upper {
            (&self.w_down, &self.w_up)
        } else {
            (&self.w_up, &self.w_down)
        };
        let mut rv = Reveal::new(self.ne);
        rv.absorb(g, self.x);
        rv.run(g, w_lo, w_hi, rng);
        let (m_down, m_up) = if self.up_is_upper { (rv.lo, rv.hi) } else { (rv.hi, rv.lo) };
        let mut audit = rv.audit;

        let edges_down = EdgeConfig::from_mask(m_down, self.ne);
        let edges_up = EdgeConfig::from_mask(m_up, self.ne);
        let part_down = clusters(g, &edges_down, Bc::Free).expect("validated config");
        let part_up = clusters(g, &edges_up, Bc::Free).expect("validated config");
        let part_upper = if self.up_is_upper { &part_up } else { &part_down };
        let upper_x_root = part_upper.label(self.x);

        let nv = g.vertex_count();
        let mut spins_down = SpinConfig::all_down(nv);
        let mut spins_up = SpinConfig::all_up(nv);
        // Shared draw per cluster of the upper configuration, canonical
        // root order; both chains see identical clusters off the upper
        // x-cluster, so they receive identical colours there.
        for r in part_upper.roots() {
            if r == upper_x_root {
                continue;
            }
            let s = part_upper.cluster_size(r);
            let p_up = self.alpha * math::exp(self.h * s as f64)
                / cluster_spin_weight(self.alpha, self.h, s);
            let colour = rng.gen::<f64>() < p_up;
            for v in 0..nv {
                if part_upper.label(v) == r {
                    spins_down.set(v, colour);
                    spins_up.set(v, colour);
                }
            }
        }
        // The conditioned vertex's cluster in each chain.
        let (lower_spins, part_lower, lower_cond) = if self.up_is_upper {
            for v in 0..nv {
                if part_up.label(v) == part_up.label(self.x) {
                    spins_up.set(v, true);
                }
            }
            (&mut spins_down, &part_down, false)
        } else {
            for v in 0..nv {
                if part_down.label(v) == part_down.label(self.x) {
                    spins_down.set(v, false);
                }
            }
            (&mut spins_up, &part_up, true)
        };
        // Lower chain inside the upper x-cluster: its own x-cluster takes
        // the conditioned colour; other sub-clusters get fresh uniforms.
        let lower_x_root = part_lower.label(self.x);
        for r in part_lower.roots() {
            if part_upper.label(r) != upper_x_root {
                continue; // outside: already coloured via the shared draw
            }
            let colour = if r == lower_x_root {
                lower_cond
            } else {
                let s = part_lower.cluster_size(r);
                let p_up = self.alpha * math::exp(self.h * s as f64)
                    / cluster_spin_weight(self.alpha, self.h, s);
                rng.gen::<f64>() < p_up
            };
            for v in 0..nv {
                if part_lower.label(v) == r {
                    lower_spins.set(v, colour);
                }
            }
        }
        for v in 0..nv {
            if part_upper.label(v) != upper_x_root && spins_down.is_up(v) != spins_up.is_up(v) {
                audit.agree_off_cluster = false;
            }
        }
        for (f, e) in g.edges().iter().enumerate() {
            let inside = part_upper.label(e.a) == upper_x_root && part_upper.label(e.b) == upper_x_root;
            if !inside && edges_down.is_open(f) != edges_up.is_open(f) {
                audit.agree_off_cluster = false;
            }
        }
        Kappa01Draw { edges_down, spins_down, edges_up, spins_up, audit }
    }
}

/// Convenience single draw of [`Kappa01Coupling`].
pub fn coupling_kappa01<R: Rng>(
    g: &LatticeGraph,
    params: &CrcmParams,
    x: usize,
    rng: &mut R,
) -> Result<Kappa01Draw, SampleError> {
    let c = Kappa01Coupling::new(g, params, x)?;
    Ok(c.draw(g, rng))
}

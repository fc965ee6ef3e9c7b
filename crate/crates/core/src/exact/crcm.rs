//! Coloured random-cluster model with a one-sided field: exact weights,
//! spin marginals, and the monotonicity boundary in `(q, alpha)`.
//!
//! The edge marginal weights each configuration by the plain
//! random-cluster weight (free counting) times a per-cluster factor
//! `alpha * exp(h * |C|) + (1 - alpha)`. The spin marginal over up-sets
//! `A` factors as
//! `exp(h|A|) (1-p)^{|boundary A|} Z_A(q alpha) Z_{A^c}(q(1-alpha))`
//! where `Z_B` is the random-cluster partition function of the induced
//! subgraph.

use alloc::vec::Vec;

use super::{fkg_lattice_audit, FkgOutcome, MassAcc};
use crate::error::ExactError;
use crate::lattice::{clusters, Bc, LatticeGraph, UnionFind};
use crate::math;

/// Spin tables and lattice audits enumerate `2^|V|` up-sets.
pub const CRCM_SPIN_BUDGET: usize = 16;
/// Edge-configuration tables enumerate `2^|E|` states.
pub const CRCM_EDGE_BUDGET: usize = 20;

/// Coloured random-cluster parameters: edge probability `p`, cluster
/// weight `q`, colour bias `alpha`, field `h` acting on up-coloured
/// vertices.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CrcmParams {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub h: f64,
}

impl CrcmParams {
    pub fn new(p: f64, q: f64, alpha: f64, h: f64) -> Result<Self, ExactError> {
        let s = Self { p, q, alpha, h };
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
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ExactError::InvalidParams("alpha must lie in (0, 1)"));
        }
        if !self.h.is_finite() {
            return Err(ExactError::InvalidParams("h must be finite"));
        }
        Ok(())
    }

    /// Whether the parameters sit in the regime where the spin marginal is
    /// monotone (satisfies the lattice condition on every graph).
    pub fn in_monotone_regime(&self) -> bool {
        self.q * self.alpha >= 1.0 && self.q * (1.0 - self.alpha) >= 1.0
    }
}

/// Per-cluster colour factor `alpha * exp(h * size) + (1 - alpha)`.
pub fn cluster_spin_weight(alpha: f64, h: f64, size: usize) -> f64 {
    alpha * math::exp(h * size as f64) + (1.0 - alpha)
}

/// Unnormalised edge-marginal weight of one configuration: free
/// random-cluster weight times the product of cluster colour factors.
pub fn crcm_edge_measure(
    g: &LatticeGraph,
    cfg: &crate::lattice::EdgeConfig,
    params: &CrcmParams,
) -> Result<f64, ExactError> {
    params.validate()?;
    let part = clusters(g, cfg, Bc::Free)?;
    let o = cfg.count_open();
    let c = g.edge_count() - o;
    let mut w = math::powi(params.p, o as i32)
        * math::powi(1.0 - params.p, c as i32)
        * math::powi(params.q, part.cluster_count() as i32);
    for root in part.roots() {
        w *= cluster_spin_weight(params.alpha, params.h, part.cluster_size(root));
    }
    Ok(w)
}

/// Normalised distribution over all `2^|E|` edge configurations.
pub fn crcm_edge_config_table(
    g: &LatticeGraph,
    params: &CrcmParams,
) -> Result<Vec<f64>, ExactError> {
    params.validate()?;
    if g.edge_count() > CRCM_EDGE_BUDGET {
        return Err(ExactError::EdgeBudget { edges: g.edge_count(), budget: CRCM_EDGE_BUDGET });
    }
    let n = 1usize << g.edge_count();
    let mut table = Vec::with_capacity(n);
    let mut z = MassAcc::new(false);
    for mask in 0..n as u64 {
        let cfg = crate::lattice::EdgeConfig::from_mask(mask, g.edge_count());
        let w = crcm_edge_measure(g, &cfg, params)?;
        z.push(w);
        table.push(w);
    }
    let z = z.value();
    for w in &mut table {
        *w /= z;
    }
    Ok(table)
}

/// Random-cluster partition function of the subgraph induced by the
/// vertex set `vmask`, with edge probability `p` and cluster weight
/// `q_eff`. Isolated selected vertices count as clusters.
fn induced_partition_function(g: &LatticeGraph, vmask: u64, p: f64, q_eff: f64) -> f64 {
    let mut local = [usize::MAX; 64];
    let mut nv = 0usize;
    for v in 0..g.vertex_count() {
        if vmask >> v & 1 == 1 {
            local[v] = nv;
            nv += 1;
        }
    }
    let mut inner: Vec<(u32, u32)> = Vec::new();
    for e in g.edges() {
        if vmask >> e.a & 1 == 1 && vmask >> e.b & 1 == 1 {
            inner.push((local[e.a] as u32, local[e.b] as u32));
        }
    }
    if nv == 0 {
        return 1.0;
    }
    let ne = inner.len();
    let mut uf = UnionFind::new(nv);
    let mut z = MassAcc::new(false);
    for mask in 0..1u64 << ne {
        uf.reset();
        let mut o = 0usize;
        for (i, &(a, b)) in inner.iter().enumerate() {
            if mask >> i & 1 == 1 {
                uf.union(a as usize, b as usize);
                o += 1;
            }
        }
        z.push(
            math::powi(p, o as i32)
                * math::powi(1.0 - p, (ne - o) as i32)
                * math::powi(q_eff, uf.count() as i32),
        );
    }
    z.value()
}

/// Unnormalised spin-marginal weight of the up-set encoded in `vmask`.
fn spin_weight(g: &LatticeGraph, vmask: u64, params: &CrcmParams) -> f64 {
    let full = (1u64 << g.vertex_count()) - 1;
    let cross = g
        .edges()
        .iter()
        .filter(|e| (vmask >> e.a & 1) != (vmask >> e.b & 1))
        .count();
    let up = vmask.count_ones() as f64;
    math::exp(params.h * up)
        * math::powi(1.0 - params.p, cross as i32)
        * induced_partition_function(g, vmask, params.p, params.q * params.alpha)
        * induced_partition_function(g, full & !vmask, params.p, params.q * (1.0 - params.alpha))
}

/// Normalised spin marginal over all `2^|V|` up-sets, indexed by vertex
/// mask (bit `v` set means vertex `v` is up).
pub fn crcm_spin_table(g: &LatticeGraph, params: &CrcmParams) -> Result<Vec<f64>, ExactError> {
    params.validate()?;
    if g.vertex_count() > CRCM_SPIN_BUDGET {
        return Err(ExactError::VertexBudget {
            vertices: g.vertex_count(),
            budget: CRCM_SPIN_BUDGET,
        });
    }
    if g.edge_count() > CRCM_EDGE_BUDGET {
        return Err(ExactError::EdgeBudget { edges: g.edge_count(), budget: CRCM_EDGE_BUDGET });
    }
    let n = 1usize << g.vertex_count();
    let mut table = Vec::with_capacity(n);
    let mut z = MassAcc::new(false);
    for mask in 0..n as u64 {
        let w = spin_weight(g, mask, params);
        z.push(w);
        table.push(w);
    }
    let z = z.value();
    for w in &mut table {
        *w /= z;
    }
    Ok(table)
}

/// Probability of one spin configuration under the spin marginal.
pub fn crcm_spin_prob(
    g: &LatticeGraph,
    params: &CrcmParams,
    spins: &crate::lattice::SpinConfig,
) -> Result<f64, ExactError> {
    g.check_spin_config(spins)?;
    let mut mask = 0u64;
    for v in 0..g.vertex_count() {
        if spins.is_up(v) {
            mask |= 1 << v;
        }
    }
    Ok(crcm_spin_table(g, params)?[mask as usize])
}

/// Audits the two-coordinate lattice condition on the spin marginal.
/// Passes exactly when `q * alpha >= 1` and `q * (1 - alpha) >= 1`; other
/// parameters admit violating graphs.
pub fn crcm_monotonicity_audit(
    g: &LatticeGraph,
    params: &CrcmParams,
) -> Result<FkgOutcome, ExactError> {
    params.validate()?;
    if !(params.p < 1.0) {
        return Err(ExactError::InvalidParams("lattice audit requires p < 1"));
    }
    if g.vertex_count() > CRCM_SPIN_BUDGET {
        return Err(ExactError::VertexBudget {
            vertices: g.vertex_count(),
            budget: CRCM_SPIN_BUDGET,
        });
    }
    if g.edge_count() > CRCM_EDGE_BUDGET {
        return Err(ExactError::EdgeBudget { edges: g.edge_count(), budget: CRCM_EDGE_BUDGET });
    }
    let mut weights = Vec::with_capacity(1usize << g.vertex_count());
    for mask in 0..1u64 << g.vertex_count() {
        weights.push(spin_weight(g, mask, params));
    }
    fkg_lattice_audit(g.vertex_count(), |s| weights[s as usize], 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::exact::{ising_spin_table, IsingBc, IsingParams, RcParams};
    use crate::lattice::EdgeConfig;

    fn single_vertex() -> LatticeGraph {
        LatticeGraph::arbitrary(alloc::vec![(0, 0)], &[], &[]).unwrap()
    }

    #[test]
    fn single_vertex_up_probability() {
        let g = single_vertex();
        let params = CrcmParams::new(0.0, 2.0, 0.3, 0.7).unwrap();
        let table = crcm_spin_table(&g, &params).unwrap();
        let expect = 0.3 * 0.7f64.exp() / (0.3 * 0.7f64.exp() + 0.7);
        assert!((table[1] - expect).abs() < 1e-14);
        assert!((table[0] + table[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn single_edge_measure_weights() {
        let g = corpus::single_edge();
        let params = CrcmParams::new(0.4, 2.0, 0.3, 0.5).unwrap();
        let open = crcm_edge_measure(&g, &EdgeConfig::all_open(1), &params).unwrap();
        let expect_open = 0.4 * 2.0 * (0.3 * 1.0f64.exp() + 0.7);
        assert!((open - expect_open).abs() < 1e-14, "{open} vs {expect_open}");
        let closed = crcm_edge_measure(&g, &EdgeConfig::all_closed(1), &params).unwrap();
        let f1 = 0.3 * 0.5f64.exp() + 0.7;
        let expect_closed = 0.6 * 4.0 * f1 * f1;
        assert!((closed - expect_closed).abs() < 1e-14);
    }

    #[test]
    fn zero_field_reduces_to_random_cluster() {
        // At h = 0 each cluster factor is alpha + (1 - alpha) = 1.
        let g = corpus::four_cycle();
        let params = CrcmParams::new(0.35, 1.7, 0.42, 0.0).unwrap();
        let rc = RcParams::new(0.35, 1.7, Bc::Free).unwrap();
        for mask in 0..1u64 << g.edge_count() {
            let cfg = EdgeConfig::from_mask(mask, g.edge_count());
            let a = crcm_edge_measure(&g, &cfg, &params).unwrap();
            let b = crate::exact::rc_weight(&g, &cfg, &rc).unwrap();
            assert!((a - b).abs() < 1e-14 * b.max(1.0));
        }
    }

    #[test]
    fn spin_marginal_matches_joint_colouring_sum() {
        // Independent route: sum the joint law over edge configurations,
        // colouring whole clusters and keeping only configurations whose
        // clusters are monochromatic for the target up-set.
        let g = corpus::box_2_1();
        let params = CrcmParams::new(0.45, 2.5, 0.35, 0.4).unwrap();
        let nv = g.vertex_count();
        let ne = g.edge_count();
        let mut joint = alloc::vec![0.0f64; 1 << nv];
        for emask in 0..1u64 << ne {
            let cfg = EdgeConfig::from_mask(emask, ne);
            let part = clusters(&g, &cfg, Bc::Free).unwrap();
            let o = emask.count_ones() as i32;
            let base = params.p.powi(o)
                * (1.0 - params.p).powi(ne as i32 - o)
                * params.q.powi(part.cluster_count() as i32);
            let roots = part.roots();
            // Each cluster independently coloured up (weight
            // alpha*e^{h|C|}) or down (weight 1-alpha).
            for colouring in 0..1u64 << roots.len() {
                let mut w = base;
                let mut vmask = 0u64;
                for (ci, &root) in roots.iter().enumerate() {
                    if colouring >> ci & 1 == 1 {
                        w *= params.alpha
                            * math::exp(params.h * part.cluster_size(root) as f64);
                        for v in 0..nv {
                            if part.label(v) == root {
                                vmask |= 1 << v;
                            }
                        }
                    } else {
                        w *= 1.0 - params.alpha;
                    }
                }
                joint[vmask as usize] += w;
            }
        }
        let total: f64 = joint.iter().sum();
        let table = crcm_spin_table(&g, &params).unwrap();
        for (mask, &p_joint) in joint.iter().enumerate() {
            let a = p_joint / total;
            let b = table[mask];
            assert!((a - b).abs() < 1e-12, "mask {mask}: {a} vs {b}");
        }
    }

    #[test]
    fn edge_table_normalised() {
        let g = corpus::four_cycle_chord();
        let params = CrcmParams::new(0.5, 2.0, 0.5, 0.3).unwrap();
        let table = crcm_edge_config_table(&g, &params).unwrap();
        let s: f64 = table.iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_regime_boundary() {
        let g = corpus::four_cycle();
        // q*alpha = 1 and q*(1-alpha) >= 1: monotone.
        for &(q, alpha) in &[(2.0, 0.5), (3.0, 1.0 / 3.0), (4.0, 0.25)] {
            let params = CrcmParams::new(0.5, q, alpha, 0.6).unwrap();
            assert!(params.in_monotone_regime());
            let out = crcm_monotonicity_audit(&g, &params).unwrap();
            assert!(out.passed(), "q={q} alpha={alpha}: {out:?}");
        }
        // q*alpha < 1 <= q*(1-alpha): a violating pair exists on the
        // four-cycle.
        let params = CrcmParams::new(0.5, 2.0, 0.3, 0.0).unwrap();
        assert!(!params.in_monotone_regime());
        let out = crcm_monotonicity_audit(&g, &params).unwrap();
        assert!(!out.passed(), "expected violation: {out:?}");
    }

    #[test]
    fn ising_equivalence_at_q2_symmetric() {
        // q = 2, alpha = 1/2, p = 1 - e^{-2 beta}, field doubled: the spin
        // marginal coincides with the spin model with coupling beta and
        // field h.
        let g = corpus::unit_square();
        for &(beta, h) in &[(0.3f64, 0.0), (0.4, 0.25), (0.6, -0.2)] {
            let p = 1.0 - (-2.0 * beta).exp();
            let crcm = CrcmParams::new(p, 2.0, 0.5, 2.0 * h).unwrap();
            let ct = crcm_spin_table(&g, &crcm).unwrap();
            let ip = IsingParams::new(beta, h, IsingBc::Free).unwrap();
            let it = ising_spin_table(&g, &ip).unwrap();
            let tv: f64 =
                ct.iter().zip(it.iter()).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0;
            assert!(tv < 1e-12, "beta={beta} h={h}: tv={tv}");
        }
    }
}

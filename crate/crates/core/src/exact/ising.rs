//! Exact Ising computations: spin tables, event probabilities, one-point
//! functions, and the single-site conditional law shared with the Glauber
//! sampler.

use alloc::vec::Vec;

use super::{event_holds_spins, EventSpec, SPIN_ENUM_BUDGET};
use crate::error::ExactError;
use crate::lattice::{LatticeGraph, SpinConfig};
use crate::math;

/// Boundary condition for the spin model: all spins free, or boundary
/// spins clamped up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum IsingBc {
    Free,
    Plus,
}

/// Ferromagnetic spin-model parameters: coupling `beta >= 0`, external
/// field `h`, boundary condition.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IsingParams {
    pub beta: f64,
    pub h: f64,
    pub bc: IsingBc,
}

impl IsingParams {
    pub fn new(beta: f64, h: f64, bc: IsingBc) -> Result<Self, ExactError> {
        let s = Self { beta, h, bc };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ExactError> {
        if !(self.beta >= 0.0) || !self.beta.is_finite() {
            return Err(ExactError::InvalidParams("beta must be nonnegative"));
        }
        if !self.h.is_finite() {
            return Err(ExactError::InvalidParams("h must be finite"));
        }
        Ok(())
    }
}

/// Conditional probability that a site is up given the signed sum `s` of
/// its neighbours: `1 / (1 + exp(-2(beta * s + h)))`.
pub fn conditional_up_prob(beta: f64, h: f64, neighbour_sum: i32) -> f64 {
    1.0 / (1.0 + math::exp(-2.0 * (beta * neighbour_sum as f64 + h)))
}

fn free_vertices(g: &LatticeGraph, bc: IsingBc) -> Vec<usize> {
    match bc {
        IsingBc::Free => (0..g.vertex_count()).collect(),
        IsingBc::Plus => (0..g.vertex_count()).filter(|&v| !g.is_boundary(v)).collect(),
    }
}

fn check_budget(free: usize) -> Result<(), ExactError> {
    if free > SPIN_ENUM_BUDGET {
        return Err(ExactError::VertexBudget { vertices: free, budget: SPIN_ENUM_BUDGET });
    }
    Ok(())
}

/// Log-weight `beta * sum_edges sigma_a sigma_b + h * sum_v sigma_v`.
fn log_weight(g: &LatticeGraph, params: &IsingParams, mask: u64) -> f64 {
    let mut pair = 0i32;
    for e in g.edges() {
        let sa = (mask >> e.a & 1) as i32 * 2 - 1;
        let sb = (mask >> e.b & 1) as i32 * 2 - 1;
        pair += sa * sb;
    }
    let ups = mask.count_ones() as i32;
    let downs = g.vertex_count() as i32 - ups;
    params.beta * pair as f64 + params.h * (ups - downs) as f64
}

/// Iterates admissible full spin masks (free vertices vary, clamped
/// boundary stays up) and their log-weights.
fn for_each_state(
    g: &LatticeGraph,
    params: &IsingParams,
    mut f: impl FnMut(u64, f64),
) -> Result<(), ExactError> {
    params.validate()?;
    let free = free_vertices(g, params.bc);
    check_budget(free.len())?;
    if g.vertex_count() > 64 {
        return Err(ExactError::VertexBudget { vertices: g.vertex_count(), budget: 64 });
    }
    let mut base = 0u64;
    if params.bc == IsingBc::Plus {
        for v in 0..g.vertex_count() {
            if g.is_boundary(v) {
                base |= 1 << v;
            }
        }
    }
    for fmask in 0..1u64 << free.len() {
        let mut mask = base;
        for (i, &v) in free.iter().enumerate() {
            if fmask >> i & 1 == 1 {
                mask |= 1 << v;
            }
        }
        f(mask, log_weight(g, params, mask));
    }
    Ok(())
}

/// Normalised distribution over all `2^|V|` spin configurations, indexed
/// by vertex mask (bit set = spin up). Under the plus boundary condition
/// states with a down boundary spin carry probability zero.
pub fn ising_spin_table(g: &LatticeGraph, params: &IsingParams) -> Result<Vec<f64>, ExactError> {
    // The table is indexed by the full vertex mask, so the budget applies
    // to all vertices here, not just the free ones.
    if g.vertex_count() > SPIN_ENUM_BUDGET {
        return Err(ExactError::VertexBudget {
            vertices: g.vertex_count(),
            budget: SPIN_ENUM_BUDGET,
        });
    }
    let mut table = alloc::vec![0.0f64; 1usize << g.vertex_count()];
    let mut max_lw = f64::NEG_INFINITY;
    for_each_state(g, params, |_, lw| {
        if lw > max_lw {
            max_lw = lw;
        }
    })?;
    let mut z = 0.0f64;
    let mut states: Vec<(u64, f64)> = Vec::new();
    for_each_state(g, params, |mask, lw| {
        let w = math::exp(lw - max_lw);
        z += w;
        states.push((mask, w));
    })?;
    for (mask, w) in states {
        table[mask as usize] = w / z;
    }
    Ok(table)
}

/// Probability of a spin event under the spin model.
pub fn ising_prob(
    g: &LatticeGraph,
    params: &IsingParams,
    event: &EventSpec,
) -> Result<f64, ExactError> {
    if event.wants_spins() == Some(false) {
        return Err(ExactError::EventKindMismatch);
    }
    let mut max_lw = f64::NEG_INFINITY;
    for_each_state(g, params, |_, lw| {
        if lw > max_lw {
            max_lw = lw;
        }
    })?;
    let mut z = 0.0f64;
    let mut za = 0.0f64;
    let mut err: Option<ExactError> = None;
    for_each_state(g, params, |mask, lw| {
        if err.is_some() {
            return;
        }
        let w = math::exp(lw - max_lw);
        z += w;
        let cfg = SpinConfig::from_mask(mask, g.vertex_count());
        match event_holds_spins(g, event, &cfg) {
            Ok(true) => za += w,
            Ok(false) => {}
            Err(e) => err = Some(e),
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(za / z)
}

/// One-point function `P(sigma_x = +1)`.
pub fn ising_one_point(
    g: &LatticeGraph,
    params: &IsingParams,
    x: usize,
) -> Result<f64, ExactError> {
    if x >= g.vertex_count() {
        return Err(ExactError::InvalidParams("vertex index out of range"));
    }
    ising_prob(g, params, &EventSpec::VertexUp { x })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::lattice::{Direction, PathMode};

    #[test]
    fn single_vertex_field_only() {
        let g = LatticeGraph::arbitrary(alloc::vec![(0, 0)], &[], &[]).unwrap();
        let params = IsingParams::new(0.7, 0.4, IsingBc::Free).unwrap();
        let p = ising_one_point(&g, &params, 0).unwrap();
        let expect = 1.0 / (1.0 + (-0.8f64).exp());
        assert!((p - expect).abs() < 1e-14);
    }

    #[test]
    fn single_edge_pair() {
        // Two spins, one bond: P(sigma_0 = +) =
        // (e^{b+2h} + e^{-b}) / (e^{b+2h} + 2 e^{-b} + e^{b-2h}).
        let g = corpus::single_edge();
        let (b, h) = (0.5, 0.3);
        let params = IsingParams::new(b, h, IsingBc::Free).unwrap();
        let p = ising_one_point(&g, &params, 0).unwrap();
        let num = (b + 2.0 * h).exp() + (-b).exp();
        let den = (b + 2.0 * h).exp() + 2.0 * (-b).exp() + (b - 2.0 * h).exp();
        assert!((p - num / den).abs() < 1e-14);
    }

    #[test]
    fn zero_field_symmetry() {
        let g = corpus::box_2_1();
        let params = IsingParams::new(0.4, 0.0, IsingBc::Free).unwrap();
        for v in 0..g.vertex_count() {
            let p = ising_one_point(&g, &params, v).unwrap();
            assert!((p - 0.5).abs() < 1e-13, "v={v}: {p}");
        }
    }

    #[test]
    fn plus_bc_clamps_boundary() {
        // Every vertex of Box(2,1) is on the frame, so the plus state is
        // the only admissible one.
        let g = corpus::box_2_1();
        let params = IsingParams::new(0.3, 0.0, IsingBc::Plus).unwrap();
        let table = ising_spin_table(&g, &params).unwrap();
        let full = (1usize << g.vertex_count()) - 1;
        assert!((table[full] - 1.0).abs() < 1e-14);
        assert!(table[..full].iter().all(|&w| w == 0.0));
    }

    #[test]
    fn plus_bc_biases_interior_up() {
        let g = LatticeGraph::build_box(crate::lattice::GraphKind::Box { k: 2, m: 2 }).unwrap();
        let centre = g.vertex_at(1, 1).unwrap();
        let params = IsingParams::new(0.4, 0.0, IsingBc::Plus).unwrap();
        let p = ising_one_point(&g, &params, centre).unwrap();
        assert!(p > 0.5, "{p}");
    }

    #[test]
    fn field_monotonicity_of_one_point() {
        let g = corpus::unit_square();
        let mut last = 0.0;
        for &h in &[-0.5, 0.0, 0.5, 1.0] {
            let params = IsingParams::new(0.35, h, IsingBc::Free).unwrap();
            let p = ising_one_point(&g, &params, 0).unwrap();
            assert!(p > last, "h={h}");
            last = p;
        }
    }

    #[test]
    fn spin_crossing_event_prob() {
        // 1x1 box, strong field up: a plus crossing is near-certain.
        let g = corpus::unit_square();
        let params = IsingParams::new(0.2, 3.0, IsingBc::Free).unwrap();
        let p = ising_prob(
            &g,
            &params,
            &EventSpec::Crossing { direction: Direction::LeftRight, mode: PathMode::PlusPath },
        )
        .unwrap();
        assert!(p > 0.99, "{p}");
    }

    #[test]
    fn conditional_law_matches_table() {
        // Check the single-site conditional against the exact table on the
        // unit square: P(sigma_0 = + | rest) for one fixed rest-state.
        let g = corpus::unit_square();
        let (b, h) = (0.45, 0.2);
        let params = IsingParams::new(b, h, IsingBc::Free).unwrap();
        let table = ising_spin_table(&g, &params).unwrap();
        // Rest state: vertex 1 up, vertices 2, 3 down (unit square edges:
        // 0-1, 2-3 horizontals; 0-2, 1-3 verticals).
        let up = table[0b0011];
        let down = table[0b0010];
        let cond = up / (up + down);
        // Neighbours of 0: vertex 1 (up) and vertex 2 (down): sum 0.
        let expect = conditional_up_prob(b, h, 0);
        assert!((cond - expect).abs() < 1e-13, "{cond} vs {expect}");
    }

    #[test]
    fn budget_enforced() {
        let g = LatticeGraph::build_box(crate::lattice::GraphKind::CenteredBox { n: 2 }).unwrap();
        let params = IsingParams::new(0.3, 0.0, IsingBc::Free).unwrap();
        assert!(matches!(
            ising_spin_table(&g, &params),
            Err(ExactError::VertexBudget { .. })
        ));
    }
}

//! Single-step Monte Carlo dynamics: random-cluster and coloured-model
//! single-edge heat baths, spin-model single-site heat bath, and the
//! alternating bond/colour cluster sweep.
//!
//! Heat-bath sweeps draw exactly one uniform per visited element in fixed
//! order, so two chains driven by the same RNG stream consume identical
//! randomness regardless of state; this is what makes shared-randomness
//! monotone coupling arguments checkable.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::scratch::ConnScratch;
use crate::error::SampleError;
use crate::exact::{cluster_spin_weight, conditional_up_prob, CrcmParams, IsingBc, IsingParams, RcParams};
use crate::lattice::{clusters, Bc, EdgeConfig, LatticeGraph, SpinConfig};

/// One random-cluster heat-bath sweep: visits each edge once in index
/// order; an edge becomes open with probability `p` when its endpoints are
/// connected off the edge (boundary identified under the wired condition),
/// and with probability `p / (p + (1-p) q)` otherwise.
pub fn rc_heat_bath_sweep(
    g: &LatticeGraph,
    cfg: &mut EdgeConfig,
    params: &RcParams,
    rng: &mut impl Rng,
) -> Result<(), SampleError> {
    params.validate().map_err(SampleError::Exact)?;
    g.check_edge_config(cfg).map_err(SampleError::Graph)?;
    let mut scratch = ConnScratch::new(g.vertex_count());
    let p = params.p;
    let p_split = p / (p + (1.0 - p) * params.q);
    for e in 0..g.edge_count() {
        let u: f64 = rng.gen();
        // q = 1 needs no connectivity query: both acceptance odds equal p.
        let open_prob = if params.q == 1.0 {
            p
        } else {
            let (a, b) = {
                let ed = &g.edges()[e];
                (ed.a, ed.b)
            };
            if scratch.connected_off_edge(g, cfg, a, b, e, params.bc) {
                p
            } else {
                p_split
            }
        };
        cfg.set(e, u < open_prob);
    }
    Ok(())
}

/// One coloured-model heat-bath sweep targeting the edge marginal with
/// cluster colour factors. The acceptance odds are local: when opening `e`
/// merges clusters of sizes `s_a`, `s_b`, the open:closed weight ratio is
/// `p f(s_a+s_b) : (1-p) q f(s_a) f(s_b)`; when the endpoints are already
/// connected it is `p : (1-p)`.
pub fn crcm_heat_bath_sweep(
    g: &LatticeGraph,
    cfg: &mut EdgeConfig,
    params: &CrcmParams,
    rng: &mut impl Rng,
) -> Result<(), SampleError> {
    params.validate().map_err(SampleError::Exact)?;
    g.check_edge_config(cfg).map_err(SampleError::Graph)?;
    let mut scratch = ConnScratch::new(g.vertex_count());
    let p = params.p;
    for e in 0..g.edge_count() {
        let u: f64 = rng.gen();
        let (a, b) = {
            let ed = &g.edges()[e];
            (ed.a, ed.b)
        };
        // Free counting: no boundary identification in the coloured model.
        let open_prob = if scratch.connected_off_edge(g, cfg, a, b, e, Bc::Free) {
            p
        } else {
            let sa = scratch.last_component_size();
            let sb = scratch.component_size_off_edge(g, cfg, b, e);
            let fa = cluster_spin_weight(params.alpha, params.h, sa);
            let fb = cluster_spin_weight(params.alpha, params.h, sb);
            let fab = cluster_spin_weight(params.alpha, params.h, sa + sb);
            let r = p * fab / ((1.0 - p) * params.q * fa * fb);
            r / (1.0 + r)
        };
        cfg.set(e, u < open_prob);
    }
    Ok(())
}

/// One spin-model heat-bath sweep: visits each vertex once in index order;
/// a free site is set up with probability
/// `1 / (1 + exp(-2(beta * S + h)))` where `S` sums neighbour signs.
/// Under the plus boundary condition boundary sites stay clamped up (their
/// uniform is still drawn, keeping the randomness stream state-independent).
pub fn ising_glauber_sweep(
    g: &LatticeGraph,
    spins: &mut SpinConfig,
    params: &IsingParams,
    rng: &mut impl Rng,
) -> Result<(), SampleError> {
    params.validate().map_err(SampleError::Exact)?;
    g.check_spin_config(spins).map_err(SampleError::Graph)?;
    for v in 0..g.vertex_count() {
        let u: f64 = rng.gen();
        if params.bc == IsingBc::Plus && g.is_boundary(v) {
            spins.set(v, true);
            continue;
        }
        let mut s = 0i32;
        for &(w, _) in g.adjacency(v) {
            s += spins.sigma(w);
        }
        spins.set(v, u < conditional_up_prob(params.beta, params.h, s));
    }
    Ok(())
}

/// Potts colouring state for the alternating cluster dynamics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PottsState {
    colours: Vec<u8>,
}

impl PottsState {
    /// All-zero colouring (the colour fixed on the boundary under the
    /// wired condition).
    pub fn uniform_zero(vertices: usize) -> Self {
        Self { colours: vec![0; vertices] }
    }

    pub fn colours(&self) -> &[u8] {
        &self.colours
    }

    pub fn colour(&self, v: usize) -> u8 {
        self.colours[v]
    }

    /// Up-set view (colour 0 mapped to up) for crossing events in tests.
    pub fn indicator(&self, colour: u8) -> SpinConfig {
        SpinConfig::from_bits(self.colours.iter().map(|&c| c == colour).collect())
    }
}

/// One alternating bond/colour sweep for the integer-`q` colouring model:
/// opens each same-colour edge with probability `p`, then recolours every
/// bond cluster uniformly. Under the wired condition the boundary acts as
/// one vertex whose colour stays `0`. Returns the bond configuration
/// generated during the sweep (its stationary law is the random-cluster
/// measure under the matching boundary condition).
pub fn swendsen_wang_sweep(
    g: &LatticeGraph,
    state: &mut PottsState,
    p: f64,
    q: u32,
    bc: Bc,
    rng: &mut impl Rng,
) -> Result<EdgeConfig, SampleError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(SampleError::Exact(crate::error::ExactError::InvalidParams(
            "p must lie in [0, 1]",
        )));
    }
    if q < 1 || q > 255 {
        return Err(SampleError::UnsupportedParams("colour count must lie in 1..=255"));
    }
    if state.colours.len() != g.vertex_count() {
        return Err(SampleError::Graph(crate::error::GraphError::ConfigLengthMismatch {
            expected: g.vertex_count(),
            got: state.colours.len(),
        }));
    }
    if bc == Bc::Wired {
        // The boundary must be monochromatic for the wired dynamics to be
        // well defined; it stays at colour zero throughout.
        for v in g.boundary_vertices() {
            if state.colours[v] != 0 {
                return Err(SampleError::UnsupportedParams(
                    "wired sweep needs the boundary at colour zero",
                ));
            }
        }
    }
    // Bond step: same-colour edges open independently with probability p;
    // under the wired condition all boundary vertices share colour 0.
    let mut bonds = EdgeConfig::all_closed(g.edge_count());
    for (i, e) in g.edges().iter().enumerate() {
        if state.colours[e.a] == state.colours[e.b] {
            let u: f64 = rng.gen();
            bonds.set(i, u < p);
        }
    }
    // Colour step: uniform colour per bond cluster; the boundary cluster
    // keeps colour 0 under the wired condition.
    let part = clusters(g, &bonds, bc).map_err(SampleError::Graph)?;
    let boundary_root = if bc == Bc::Wired {
        g.boundary_vertices().next().map(|v| part.label(v))
    } else {
        None
    };
    let mut colour_of_root: Vec<Option<u8>> = vec![None; g.vertex_count()];
    for v in 0..g.vertex_count() {
        let root = part.label(v);
        let c = match colour_of_root[root] {
            Some(c) => c,
            None => {
                let c = if Some(root) == boundary_root {
                    0
                } else {
                    rng.gen_range(0..q) as u8
                };
                colour_of_root[root] = Some(c);
                c
            }
        };
        state.colours[v] = c;
    }
    Ok(bonds)
}

/// Colours the clusters of an edge configuration under the coloured
/// model's conditional law: cluster `C` is up with probability
/// `alpha e^{h|C|} / (alpha e^{h|C|} + 1 - alpha)`, independently, one
/// uniform per cluster in canonical root order.
pub fn crcm_sample(
    g: &LatticeGraph,
    params: &CrcmParams,
    rng: &mut impl Rng,
    cfg: &EdgeConfig,
) -> Result<SpinConfig, SampleError> {
    params.validate().map_err(SampleError::Exact)?;
    let part = clusters(g, cfg, Bc::Free).map_err(SampleError::Graph)?;
    let mut up_of_root: Vec<bool> = vec![false; g.vertex_count()];
    for root in part.roots() {
        let size = part.cluster_size(root);
        let fw = cluster_spin_weight(params.alpha, params.h, size);
        let p_up = params.alpha * crate::math::exp(params.h * size as f64) / fw;
        let u: f64 = rng.gen();
        up_of_root[root] = u < p_up;
    }
    let up = (0..g.vertex_count()).map(|v| up_of_root[part.label(v)]).collect();
    Ok(SpinConfig::from_bits(up))
}

/// Exact one-edge heat-bath transition probabilities (no randomness), for
/// desk-scale stationarity checks: probability that edge `e` ends open
/// given the rest of `cfg`.
pub fn rc_heat_bath_open_prob(
    g: &LatticeGraph,
    cfg: &EdgeConfig,
    params: &RcParams,
    e: usize,
) -> Result<f64, SampleError> {
    params.validate().map_err(SampleError::Exact)?;
    let mut scratch = ConnScratch::new(g.vertex_count());
    let ed = &g.edges()[e];
    Ok(if params.q == 1.0 || scratch.connected_off_edge(g, cfg, ed.a, ed.b, e, params.bc) {
        params.p
    } else {
        params.p / (params.p + (1.0 - params.p) * params.q)
    })
}

/// Coloured-model analogue of [`rc_heat_bath_open_prob`].
pub fn crcm_heat_bath_open_prob(
    g: &LatticeGraph,
    cfg: &EdgeConfig,
    params: &CrcmParams,
    e: usize,
) -> Result<f64, SampleError> {
    params.validate().map_err(SampleError::Exact)?;
    let mut scratch = ConnScratch::new(g.vertex_count());
    let ed = &g.edges()[e];
    let p = params.p;
    Ok(if scratch.connected_off_edge(g, cfg, ed.a, ed.b, e, Bc::Free) {
        p
    } else {
        let sa = scratch.last_component_size();
        let sb = scratch.component_size_off_edge(g, cfg, ed.b, e);
        let fa = cluster_spin_weight(params.alpha, params.h, sa);
        let fb = cluster_spin_weight(params.alpha, params.h, sb);
        let fab = cluster_spin_weight(params.alpha, params.h, sa + sb);
        let r = p * fab / ((1.0 - p) * params.q * fa * fb);
        r / (1.0 + r)
    })
}

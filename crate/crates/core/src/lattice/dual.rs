//! The dual box for the crossing problem.
//!
//! The dual of `Box(k, m)` is materialised as the concrete box
//! `[0, k-1] x [0, m+1]` (integer coordinates, no half-integer shifts): its
//! vertices stand for the faces of the primal picture, including one row of
//! outer faces below the box and one above. Each primal horizontal edge is
//! paired with the dual vertical edge crossing it, and each primal interior
//! vertical edge with the dual horizontal edge crossing it.
//!
//! The left- and right-column primal verticals are irrelevant to left-right
//! crossings, and the bottom- and top-row dual horizontals are irrelevant to
//! top-bottom dual crossings. When `m = k - 1` (the square-ish self-dual
//! shape) the two leftover families have equal size and are paired off too,
//! giving a total bijection; otherwise those edges stay unpaired and
//! `dual_config` leaves the unpaired dual edges closed.
//!
//! In all cases, a configuration has a left-right open crossing exactly when
//! its dual has no top-bottom open crossing.

use alloc::vec;
use alloc::vec::Vec;

use super::{EdgeConfig, GraphKind, LatticeGraph};
use crate::error::GraphError;

/// Pairing between primal and dual edge indices. Total when the primal box
/// has the self-dual shape `m = k - 1`.
#[derive(Debug, Clone)]
pub struct DualPairing {
    to_dual: Vec<Option<u32>>,
    to_primal: Vec<Option<u32>>,
}

impl DualPairing {
    /// Dual partner of a primal edge.
    pub fn dual_of(&self, primal_edge: usize) -> Option<usize> {
        self.to_dual[primal_edge].map(|e| e as usize)
    }

    /// Primal partner of a dual edge.
    pub fn primal_of(&self, dual_edge: usize) -> Option<usize> {
        self.to_primal[dual_edge].map(|e| e as usize)
    }

    pub fn primal_edge_count(&self) -> usize {
        self.to_dual.len()
    }

    pub fn dual_edge_count(&self) -> usize {
        self.to_primal.len()
    }

    /// True when every edge on both sides has a partner.
    pub fn is_total(&self) -> bool {
        self.to_dual.iter().all(Option::is_some) && self.to_primal.iter().all(Option::is_some)
    }
}

/// Builds the dual box of a `Box(k, m)` graph together with the edge pairing.
pub fn dual_box(g: &LatticeGraph) -> Result<(LatticeGraph, DualPairing), GraphError> {
    let (k, m) = match g.kind() {
        GraphKind::Box { k, m } => (k, m),
        _ => return Err(GraphError::NotABox),
    };
    if k < 1 {
        return Err(GraphError::DualOfDegenerateBox);
    }
    let d = LatticeGraph::build_box(GraphKind::DualBox { k, m })?;
    let mut to_dual = vec![None; g.edge_count()];
    let mut to_primal = vec![None; d.edge_count()];
    let mut pair = |pe: usize, de: usize| {
        debug_assert!(to_dual[pe].is_none() && to_primal[de].is_none());
        to_dual[pe] = Some(de as u32);
        to_primal[de] = Some(pe as u32);
    };

    let pedge = |x1: i32, y1: i32, x2: i32, y2: i32| -> usize {
        g.edge_between(g.vertex_at(x1, y1).unwrap(), g.vertex_at(x2, y2).unwrap()).unwrap()
    };
    let dedge = |x1: i32, y1: i32, x2: i32, y2: i32| -> usize {
        d.edge_between(d.vertex_at(x1, y1).unwrap(), d.vertex_at(x2, y2).unwrap()).unwrap()
    };

    // Primal horizontal (x, y)-(x+1, y) is crossed by dual vertical
    // (x, y)-(x, y+1); this covers every dual vertical.
    for y in 0..=m as i32 {
        for x in 0..k as i32 {
            pair(pedge(x, y, x + 1, y), dedge(x, y, x, y + 1));
        }
    }
    // Primal interior vertical (x, y)-(x, y+1), 1 <= x <= k-1, is crossed by
    // dual horizontal (x-1, y+1)-(x, y+1); this covers dual rows 1..=m.
    for y in 0..m as i32 {
        for x in 1..k as i32 {
            pair(pedge(x, y, x, y + 1), dedge(x - 1, y + 1, x, y + 1));
        }
    }
    // Self-dual shape: pair the crossing-irrelevant leftovers so the
    // bijection is total. Left-column primal verticals go to the bottom dual
    // row, right-column ones to the top dual row.
    if m == k - 1 {
        for y in 0..m as i32 {
            pair(pedge(0, y, 0, y + 1), dedge(y, 0, y + 1, 0));
            pair(pedge(k as i32, y, k as i32, y + 1), dedge(y, m as i32 + 1, y + 1, m as i32 + 1));
        }
    }
    Ok((d, DualPairing { to_dual, to_primal }))
}

/// Maps a primal configuration to its dual: each paired dual edge is open
/// exactly when its primal partner is closed; unpaired dual edges are closed.
pub fn dual_config(cfg: &EdgeConfig, pairing: &DualPairing) -> Result<EdgeConfig, GraphError> {
    if cfg.len() != pairing.primal_edge_count() {
        return Err(GraphError::ConfigLengthMismatch {
            expected: pairing.primal_edge_count(),
            got: cfg.len(),
        });
    }
    let mut out = EdgeConfig::all_closed(pairing.dual_edge_count());
    for de in 0..pairing.dual_edge_count() {
        if let Some(pe) = pairing.primal_of(de) {
            out.set(de, !cfg.is_open(pe));
        }
    }
    Ok(out)
}

/// Axis sanity used by tests: paired edges always cross, i.e. horizontal
/// pairs with vertical and vice versa.
#[cfg(test)]
pub fn pairing_crosses_axes(
    g: &LatticeGraph,
    d: &LatticeGraph,
    pairing: &DualPairing,
) -> bool {
    use super::Axis;
    (0..g.edge_count()).all(|pe| match pairing.dual_of(pe) {
        None => true,
        Some(de) => {
            let pa = g.edges()[pe].axis;
            let da = d.edges()[de].axis;
            matches!(
                (pa, da),
                (Axis::Horizontal, Axis::Vertical) | (Axis::Vertical, Axis::Horizontal)
            )
        }
    })
}

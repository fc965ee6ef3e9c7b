//! Finite pieces of the square lattice and the states that live on them.
//!
//! Vertices are indexed row-major (bottom row first, left to right), and
//! edges are listed horizontals-first then verticals, each row-major, so
//! every graph has a deterministic vertex and edge ordering.

mod cluster;
mod crossing;
mod dual;

pub use cluster::{clusters, ClusterPartition, UnionFind};
pub use crossing::{
    has_crossing, has_rect_crossing, radius_reached, Direction, PathMode, Rect, StateRef,
};
pub use dual::{dual_box, dual_config, DualPairing};

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::GraphError;

/// Default construction budget: vertices plus edges.
pub const DEFAULT_GRAPH_BUDGET: usize = 1 << 22;

/// Orientation tag carried by each edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Axis {
    Horizontal,
    Vertical,
    /// Arbitrary-graph edges that are not axis-aligned.
    Other,
}

/// Boundary condition used when counting clusters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Bc {
    /// Every cluster of the graph counts.
    #[default]
    Free,
    /// All boundary vertices are merged into one super-vertex before
    /// counting, so clusters touching the boundary count once in total.
    Wired,
}

/// What a graph is: a plain box, a centered box, the dual of a box, or an
/// arbitrary finite graph supplied by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum GraphKind {
    /// `[0, k] x [0, m]`: `(k+1)(m+1)` vertices.
    Box { k: u32, m: u32 },
    /// `[-n, n]^2`: `(2n+1)^2` vertices.
    CenteredBox { n: u32 },
    /// Dual of `Box { k, m }` for the crossing problem; spans
    /// `[0, k-1] x [0, m+1]` in its own coordinates.
    DualBox { k: u32, m: u32 },
    Arbitrary,
}

/// An undirected edge between vertex indices `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub axis: Axis,
}

/// A finite graph with integer plane coordinates, a distinguished boundary
/// set, and (for box-like kinds) named sides for crossing events.
#[derive(Debug, Clone)]
pub struct LatticeGraph {
    kind: GraphKind,
    coords: Vec<(i32, i32)>,
    edges: Vec<Edge>,
    /// Per-vertex adjacency as `(neighbour, edge index)` pairs.
    adjacency: Vec<Vec<(usize, usize)>>,
    boundary: Vec<bool>,
    /// Coordinate lookup; exact bounds for box kinds, map for arbitrary.
    lookup: Lookup,
}

#[derive(Debug, Clone)]
enum Lookup {
    /// Rectangle `[x0, x0+w] x [y0, y0+h]`, row-major.
    Rect { x0: i32, y0: i32, w: u32, h: u32 },
    Map(BTreeMap<(i32, i32), usize>),
}

impl LatticeGraph {
    /// Builds a box-like graph with the default budget.
    pub fn build_box(kind: GraphKind) -> Result<Self, GraphError> {
        Self::build_box_with_budget(kind, DEFAULT_GRAPH_BUDGET)
    }

    /// Builds a box-like graph, rejecting anything whose vertex plus edge
    /// count exceeds `budget`.
    pub fn build_box_with_budget(kind: GraphKind, budget: usize) -> Result<Self, GraphError> {
        let (x0, y0, w, h) = match kind {
            GraphKind::Box { k, m } => (0, 0, k, m),
            GraphKind::CenteredBox { n } => (-(n as i32), -(n as i32), 2 * n, 2 * n),
            GraphKind::DualBox { k, m } => {
                if k < 1 {
                    return Err(GraphError::DualOfDegenerateBox);
                }
                (0, 0, k - 1, m + 1)
            }
            GraphKind::Arbitrary => return Err(GraphError::NotABox),
        };
        let vertices = (w as usize + 1) * (h as usize + 1);
        let edges = (w as usize) * (h as usize + 1) + (h as usize) * (w as usize + 1);
        if vertices + edges > budget {
            return Err(GraphError::BudgetExceeded { vertices, edges, budget });
        }
        if vertices == 0 {
            return Err(GraphError::InvalidDimensions);
        }

        let cols = w as usize + 1;
        let rows = h as usize + 1;
        let mut coords = Vec::with_capacity(vertices);
        for y in 0..rows {
            for x in 0..cols {
                coords.push((x0 + x as i32, y0 + y as i32));
            }
        }
        let mut edge_list = Vec::with_capacity(edges);
        for y in 0..rows {
            for x in 0..cols - 1 {
                let a = y * cols + x;
                edge_list.push(Edge { a, b: a + 1, axis: Axis::Horizontal });
            }
        }
        for y in 0..rows - 1 {
            for x in 0..cols {
                let a = y * cols + x;
                edge_list.push(Edge { a, b: a + cols, axis: Axis::Vertical });
            }
        }
        let boundary = coords
            .iter()
            .map(|&(x, y)| {
                x == x0 || x == x0 + w as i32 || y == y0 || y == y0 + h as i32
            })
            .collect();
        Ok(Self::assemble(kind, coords, edge_list, boundary, Lookup::Rect { x0, y0, w, h }))
    }

    /// Builds an arbitrary graph from explicit coordinates, an edge list, and
    /// a boundary vertex set. Edges are tagged by axis when axis-aligned.
    pub fn arbitrary(
        coords: Vec<(i32, i32)>,
        edge_pairs: &[(usize, usize)],
        boundary_vertices: &[usize],
    ) -> Result<Self, GraphError> {
        let n = coords.len();
        if n == 0 {
            return Err(GraphError::InvalidDimensions);
        }
        let mut seen = BTreeMap::new();
        let mut edge_list = Vec::with_capacity(edge_pairs.len());
        for &(u, v) in edge_pairs {
            if u >= n {
                return Err(GraphError::VertexOutOfRange { v: u, len: n });
            }
            if v >= n {
                return Err(GraphError::VertexOutOfRange { v, len: n });
            }
            if u == v {
                return Err(GraphError::SelfLoop { v });
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            if seen.insert((a, b), ()).is_some() {
                return Err(GraphError::DuplicateEdge { a, b });
            }
            let (ax, ay) = coords[a];
            let (bx, by) = coords[b];
            let axis = if ay == by {
                Axis::Horizontal
            } else if ax == bx {
                Axis::Vertical
            } else {
                Axis::Other
            };
            edge_list.push(Edge { a, b, axis });
        }
        let mut boundary = vec![false; n];
        for &v in boundary_vertices {
            if v >= n {
                return Err(GraphError::VertexOutOfRange { v, len: n });
            }
            boundary[v] = true;
        }
        let map = coords.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        Ok(Self::assemble(GraphKind::Arbitrary, coords, edge_list, boundary, Lookup::Map(map)))
    }

    fn assemble(
        kind: GraphKind,
        coords: Vec<(i32, i32)>,
        edges: Vec<Edge>,
        boundary: Vec<bool>,
        lookup: Lookup,
    ) -> Self {
        let mut adjacency = vec![Vec::new(); coords.len()];
        for (i, e) in edges.iter().enumerate() {
            adjacency[e.a].push((e.b, i));
            adjacency[e.b].push((e.a, i));
        }
        Self { kind, coords, edges, adjacency, boundary, lookup }
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn vertex_count(&self) -> usize {
        self.coords.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn coords(&self, v: usize) -> (i32, i32) {
        self.coords[v]
    }

    pub fn adjacency(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    /// Boundary vertices in index order.
    pub fn boundary_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertex_count()).filter(|&v| self.boundary[v])
    }

    /// Vertex index at plane coordinates, if present.
    pub fn vertex_at(&self, x: i32, y: i32) -> Option<usize> {
        match &self.lookup {
            Lookup::Rect { x0, y0, w, h } => {
                if x < *x0 || y < *y0 || x > x0 + *w as i32 || y > y0 + *h as i32 {
                    return None;
                }
                let cols = *w as usize + 1;
                Some((y - y0) as usize * cols + (x - x0) as usize)
            }
            Lookup::Map(map) => map.get(&(x, y)).copied(),
        }
    }

    /// Edge joining `u` and `v`, if present.
    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        self.adjacency
            .get(u)?
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, e)| e)
    }

    /// Width and height spanned, for box-like kinds.
    pub fn spans(&self) -> Option<(u32, u32)> {
        match &self.lookup {
            Lookup::Rect { w, h, .. } => Some((*w, *h)),
            Lookup::Map(_) => None,
        }
    }

    /// Vertices on the named side of a box-like graph, in index order.
    pub(crate) fn side(&self, which: Side) -> Result<Vec<usize>, GraphError> {
        let (x0, y0, w, h) = match &self.lookup {
            Lookup::Rect { x0, y0, w, h } => (*x0, *y0, *w, *h),
            Lookup::Map(_) => return Err(GraphError::NoSides),
        };
        let mut out = Vec::new();
        match which {
            Side::Left => {
                for y in 0..=h as i32 {
                    out.push(self.vertex_at(x0, y0 + y).unwrap());
                }
            }
            Side::Right => {
                for y in 0..=h as i32 {
                    out.push(self.vertex_at(x0 + w as i32, y0 + y).unwrap());
                }
            }
            Side::Bottom => {
                for x in 0..=w as i32 {
                    out.push(self.vertex_at(x0 + x, y0).unwrap());
                }
            }
            Side::Top => {
                for x in 0..=w as i32 {
                    out.push(self.vertex_at(x0 + x, y0 + h as i32).unwrap());
                }
            }
        }
        Ok(out)
    }

    /// Checks that an edge configuration matches this graph.
    pub fn check_edge_config(&self, cfg: &EdgeConfig) -> Result<(), GraphError> {
        if cfg.len() != self.edge_count() {
            return Err(GraphError::ConfigLengthMismatch {
                expected: self.edge_count(),
                got: cfg.len(),
            });
        }
        Ok(())
    }

    /// Checks that a spin configuration matches this graph.
    pub fn check_spin_config(&self, cfg: &SpinConfig) -> Result<(), GraphError> {
        if cfg.len() != self.vertex_count() {
            return Err(GraphError::ConfigLengthMismatch {
                expected: self.vertex_count(),
                got: cfg.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Side {
    Left,
    Right,
    Top,
    Bottom,
}

/// Open/closed state per edge.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EdgeConfig {
    bits: Vec<bool>,
}

impl EdgeConfig {
    pub fn all_closed(edges: usize) -> Self {
        Self { bits: vec![false; edges] }
    }

    pub fn all_open(edges: usize) -> Self {
        Self { bits: vec![true; edges] }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Low bit of `mask` is edge 0.
    pub fn from_mask(mask: u64, edges: usize) -> Self {
        Self { bits: (0..edges).map(|i| mask >> i & 1 == 1).collect() }
    }

    pub fn to_mask(&self) -> Option<u64> {
        if self.bits.len() > 64 {
            return None;
        }
        Some(
            self.bits
                .iter()
                .enumerate()
                .fold(0u64, |m, (i, &b)| if b { m | 1 << i } else { m }),
        )
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_open(&self, e: usize) -> bool {
        self.bits[e]
    }

    pub fn set(&mut self, e: usize, open: bool) {
        self.bits[e] = open;
    }

    pub fn count_open(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Pointwise `<=` (every open edge of `self` is open in `other`).
    pub fn le(&self, other: &Self) -> bool {
        self.bits.len() == other.bits.len()
            && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }
}

/// Up/down (plus/minus, or colour-1/colour-0) state per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpinConfig {
    up: Vec<bool>,
}

impl SpinConfig {
    pub fn all_down(vertices: usize) -> Self {
        Self { up: vec![false; vertices] }
    }

    pub fn all_up(vertices: usize) -> Self {
        Self { up: vec![true; vertices] }
    }

    pub fn from_bits(up: Vec<bool>) -> Self {
        Self { up }
    }

    /// Low bit of `mask` is vertex 0.
    pub fn from_mask(mask: u64, vertices: usize) -> Self {
        Self { up: (0..vertices).map(|i| mask >> i & 1 == 1).collect() }
    }

    pub fn len(&self) -> usize {
        self.up.len()
    }

    pub fn is_empty(&self) -> bool {
        self.up.is_empty()
    }

    pub fn is_up(&self, v: usize) -> bool {
        self.up[v]
    }

    pub fn set(&mut self, v: usize, up: bool) {
        self.up[v] = up;
    }

    pub fn count_up(&self) -> usize {
        self.up.iter().filter(|&&b| b).count()
    }

    /// Spin value as `+1` / `-1`.
    pub fn sigma(&self, v: usize) -> i32 {
        if self.up[v] {
            1
        } else {
            -1
        }
    }

    pub fn le(&self, other: &Self) -> bool {
        self.up.len() == other.up.len()
            && self.up.iter().zip(&other.up).all(|(&a, &b)| !a || b)
    }
}

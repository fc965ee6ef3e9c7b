//! A fixed corpus of small graphs used by the monotonicity and
//! positive-association audits, and as shared fixtures in tests.
//!
//! All graphs have at most 10 edges so exhaustive enumeration is cheap.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::lattice::{GraphKind, LatticeGraph};

/// One edge joining two vertices.
pub fn single_edge() -> LatticeGraph {
    LatticeGraph::build_box(GraphKind::Box { k: 1, m: 0 }).unwrap()
}

/// A path of three vertices, two edges.
pub fn two_edge_path() -> LatticeGraph {
    LatticeGraph::build_box(GraphKind::Box { k: 2, m: 0 }).unwrap()
}

/// A path of four vertices, three edges.
pub fn three_edge_path() -> LatticeGraph {
    LatticeGraph::build_box(GraphKind::Box { k: 3, m: 0 }).unwrap()
}

/// The four-cycle `u, x, v, y` with edges `ux, xv, vy, yu`. Vertex order is
/// `u = 0, x = 1, v = 2, y = 3`, so `u` and `v` are opposite corners.
pub fn four_cycle() -> LatticeGraph {
    LatticeGraph::arbitrary(
        vec![(0, 0), (1, 0), (1, 1), (0, 1)],
        &[(0, 1), (1, 2), (2, 3), (3, 0)],
        &[],
    )
    .unwrap()
}

/// Four-cycle plus one diagonal chord.
pub fn four_cycle_chord() -> LatticeGraph {
    LatticeGraph::arbitrary(
        vec![(0, 0), (1, 0), (1, 1), (0, 1)],
        &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)],
        &[],
    )
    .unwrap()
}

/// A star with three leaves around vertex 0.
pub fn star3() -> LatticeGraph {
    LatticeGraph::arbitrary(
        vec![(0, 0), (1, 0), (0, 1), (-1, 0)],
        &[(0, 1), (0, 2), (0, 3)],
        &[],
    )
    .unwrap()
}

/// Two disjoint edges.
pub fn two_disjoint_edges() -> LatticeGraph {
    LatticeGraph::arbitrary(vec![(0, 0), (1, 0), (0, 2), (1, 2)], &[(0, 1), (2, 3)], &[]).unwrap()
}

/// The unit square `Box(1, 1)`: four vertices, four edges.
pub fn unit_square() -> LatticeGraph {
    LatticeGraph::build_box(GraphKind::Box { k: 1, m: 1 }).unwrap()
}

/// `Box(2, 1)`: six vertices, seven edges.
pub fn box_2_1() -> LatticeGraph {
    LatticeGraph::build_box(GraphKind::Box { k: 2, m: 1 }).unwrap()
}

/// The ladder `Box(3, 1)`: eight vertices, ten edges — the largest corpus
/// member, right at the ten-edge budget.
pub fn ladder() -> LatticeGraph {
    LatticeGraph::build_box(GraphKind::Box { k: 3, m: 1 }).unwrap()
}

/// Every corpus graph with a short name, for audit reports.
pub fn all() -> Vec<(String, LatticeGraph)> {
    vec![
        (String::from("single-edge"), single_edge()),
        (String::from("two-edge-path"), two_edge_path()),
        (String::from("three-edge-path"), three_edge_path()),
        (String::from("four-cycle"), four_cycle()),
        (String::from("four-cycle-chord"), four_cycle_chord()),
        (String::from("star3"), star3()),
        (String::from("two-disjoint-edges"), two_disjoint_edges()),
        (String::from("unit-square"), unit_square()),
        (String::from("box-2-1"), box_2_1()),
        (String::from("ladder"), ladder()),
    ]
}

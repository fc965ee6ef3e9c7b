//! Crossing and radius events for edge and spin configurations.
//!
//! Three path modes are supported: open paths through open edges,
//! plus-paths through spin-up vertices using nearest-neighbour adjacency,
//! and minus-star-paths through spin-down vertices using the eight-vertex
//! star adjacency (nearest neighbours plus diagonals).

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::{EdgeConfig, LatticeGraph, Side, SpinConfig};
use crate::error::GraphError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Direction {
    LeftRight,
    TopBottom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PathMode {
    /// Paths through open edges of an edge configuration.
    OpenPath,
    /// Nearest-neighbour paths through spin-up vertices.
    PlusPath,
    /// Star-adjacency (8-neighbour) paths through spin-down vertices.
    MinusStarPath,
}

/// A borrowed state of either kind, for the unified crossing interface.
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Edges(&'a EdgeConfig),
    Spins(&'a SpinConfig),
}

/// An axis-aligned closed rectangle in vertex coordinates, for crossing
/// events of a sub-box of a larger graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Rect {
    pub x0: i32,
    pub y0: i32,
    pub x1: i32,
    pub y1: i32,
}

impl Rect {
    pub fn contains(&self, x: i32, y: i32) -> bool {
        self.x0 <= x && x <= self.x1 && self.y0 <= y && y <= self.y1
    }
}

/// Does a path in the given mode join the two named sides of `g`?
pub fn has_crossing(
    g: &LatticeGraph,
    state: StateRef<'_>,
    direction: Direction,
    mode: PathMode,
) -> Result<bool, GraphError> {
    let (from, to) = match direction {
        Direction::LeftRight => (Side::Left, Side::Right),
        Direction::TopBottom => (Side::Top, Side::Bottom),
    };
    let sources = g.side(from)?;
    let targets = g.side(to)?;
    let mut is_target = vec![false; g.vertex_count()];
    for &v in &targets {
        is_target[v] = true;
    }
    match (state, mode) {
        (StateRef::Edges(cfg), PathMode::OpenPath) => {
            g.check_edge_config(cfg)?;
            Ok(open_path_search(g, cfg, &sources, |v| is_target[v], |_| true))
        }
        (StateRef::Spins(cfg), PathMode::PlusPath) => {
            g.check_spin_config(cfg)?;
            Ok(spin_path_search(g, cfg, true, false, &sources, |v| is_target[v], |_| true))
        }
        (StateRef::Spins(cfg), PathMode::MinusStarPath) => {
            g.check_spin_config(cfg)?;
            Ok(spin_path_search(g, cfg, false, true, &sources, |v| is_target[v], |_| true))
        }
        _ => Err(GraphError::ModeStateMismatch),
    }
}

/// Does a path in the given mode, staying inside `rect`, join the two
/// facing sides of `rect`? Vertices of `g` outside `rect` never appear on
/// the path. If a side of `rect` contains no vertex of `g` the answer is
/// false.
pub fn has_rect_crossing(
    g: &LatticeGraph,
    state: StateRef<'_>,
    rect: Rect,
    direction: Direction,
    mode: PathMode,
) -> Result<bool, GraphError> {
    if rect.x1 < rect.x0 || rect.y1 < rect.y0 {
        return Err(GraphError::InvalidDimensions);
    }
    let mut sources = Vec::new();
    for v in 0..g.vertex_count() {
        let (x, y) = g.coords(v);
        if !rect.contains(x, y) {
            continue;
        }
        let on_source = match direction {
            Direction::LeftRight => x == rect.x0,
            Direction::TopBottom => y == rect.y1,
        };
        if on_source {
            sources.push(v);
        }
    }
    let is_target = |v: usize| -> bool {
        let (x, y) = g.coords(v);
        match direction {
            Direction::LeftRight => x == rect.x1,
            Direction::TopBottom => y == rect.y0,
        }
    };
    let allowed = |v: usize| -> bool {
        let (x, y) = g.coords(v);
        rect.contains(x, y)
    };
    match (state, mode) {
        (StateRef::Edges(cfg), PathMode::OpenPath) => {
            g.check_edge_config(cfg)?;
            Ok(open_path_search(g, cfg, &sources, is_target, allowed))
        }
        (StateRef::Spins(cfg), PathMode::PlusPath) => {
            g.check_spin_config(cfg)?;
            Ok(spin_path_search(g, cfg, true, false, &sources, is_target, allowed))
        }
        (StateRef::Spins(cfg), PathMode::MinusStarPath) => {
            g.check_spin_config(cfg)?;
            Ok(spin_path_search(g, cfg, false, true, &sources, is_target, allowed))
        }
        _ => Err(GraphError::ModeStateMismatch),
    }
}

/// Does the cluster of `x` (in the given mode) meet the shell of vertices at
/// L-infinity distance exactly `r` from `x`, clipped to `g`? With `r = 0`
/// the shell is `x` itself, so the answer is always true.
pub fn radius_reached(
    g: &LatticeGraph,
    state: StateRef<'_>,
    x: usize,
    r: u32,
    mode: PathMode,
) -> Result<bool, GraphError> {
    if x >= g.vertex_count() {
        return Err(GraphError::VertexOutOfRange { v: x, len: g.vertex_count() });
    }
    if r == 0 {
        // Validate the state anyway so mismatches are still reported.
        match (state, mode) {
            (StateRef::Edges(cfg), PathMode::OpenPath) => g.check_edge_config(cfg)?,
            (StateRef::Spins(cfg), PathMode::PlusPath | PathMode::MinusStarPath) => {
                g.check_spin_config(cfg)?
            }
            _ => return Err(GraphError::ModeStateMismatch),
        }
        return Ok(true);
    }
    let (cx, cy) = g.coords(x);
    let at_shell = |g: &LatticeGraph, v: usize| -> bool {
        let (vx, vy) = g.coords(v);
        let d = (vx - cx).abs().max((vy - cy).abs());
        d == r as i32
    };
    match (state, mode) {
        (StateRef::Edges(cfg), PathMode::OpenPath) => {
            g.check_edge_config(cfg)?;
            Ok(open_path_search(g, cfg, &[x], |v| at_shell(g, v), |_| true))
        }
        (StateRef::Spins(cfg), PathMode::PlusPath) => {
            g.check_spin_config(cfg)?;
            Ok(spin_path_search(g, cfg, true, false, &[x], |v| at_shell(g, v), |_| true))
        }
        (StateRef::Spins(cfg), PathMode::MinusStarPath) => {
            g.check_spin_config(cfg)?;
            Ok(spin_path_search(g, cfg, false, true, &[x], |v| at_shell(g, v), |_| true))
        }
        _ => Err(GraphError::ModeStateMismatch),
    }
}

/// BFS through open edges from the seed set; true if `target` is hit.
/// Vertices failing `allowed` are never entered.
fn open_path_search<F: Fn(usize) -> bool, G: Fn(usize) -> bool>(
    g: &LatticeGraph,
    cfg: &EdgeConfig,
    seeds: &[usize],
    target: F,
    allowed: G,
) -> bool {
    let mut seen = vec![false; g.vertex_count()];
    let mut queue = VecDeque::new();
    for &s in seeds {
        if !seen[s] && allowed(s) {
            if target(s) {
                return true;
            }
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &(w, e) in g.adjacency(v) {
            if cfg.is_open(e) && !seen[w] && allowed(w) {
                if target(w) {
                    return true;
                }
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    false
}

/// BFS through vertices of the required spin. `star` adds the diagonal
/// neighbours. Seeds of the wrong spin are skipped; vertices failing
/// `allowed` are never entered.
fn spin_path_search<F: Fn(usize) -> bool, G: Fn(usize) -> bool>(
    g: &LatticeGraph,
    cfg: &SpinConfig,
    want_up: bool,
    star: bool,
    seeds: &[usize],
    target: F,
    allowed: G,
) -> bool {
    let mut seen = vec![false; g.vertex_count()];
    let mut queue = VecDeque::new();
    for &s in seeds {
        if cfg.is_up(s) == want_up && !seen[s] && allowed(s) {
            if target(s) {
                return true;
            }
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        let visit = |w: usize, seen: &mut Vec<bool>, queue: &mut VecDeque<usize>| -> bool {
            if cfg.is_up(w) == want_up && !seen[w] && allowed(w) {
                if target(w) {
                    return true;
                }
                seen[w] = true;
                queue.push_back(w);
            }
            false
        };
        for &(w, _) in g.adjacency(v) {
            if visit(w, &mut seen, &mut queue) {
                return true;
            }
        }
        if star {
            let (x, y) = g.coords(v);
            for (dx, dy) in [(-1, -1), (1, -1), (-1, 1), (1, 1)] {
                if let Some(w) = g.vertex_at(x + dx, y + dy) {
                    if visit(w, &mut seen, &mut queue) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::GraphKind;

    fn boxg(k: u32, m: u32) -> LatticeGraph {
        LatticeGraph::build_box(GraphKind::Box { k, m }).unwrap()
    }

    #[test]
    fn bottom_row_crosses() {
        let g = boxg(2, 1);
        let mut cfg = EdgeConfig::all_closed(7);
        cfg.set(0, true); // (0,0)-(1,0)
        cfg.set(1, true); // (1,0)-(2,0)
        assert!(has_crossing(&g, StateRef::Edges(&cfg), Direction::LeftRight, PathMode::OpenPath)
            .unwrap());
        assert!(!has_crossing(&g, StateRef::Edges(&cfg), Direction::TopBottom, PathMode::OpenPath)
            .unwrap());
    }

    #[test]
    fn single_column_crosses_tb() {
        let g = boxg(2, 1);
        let mut cfg = EdgeConfig::all_closed(7);
        cfg.set(4, true); // (0,0)-(0,1)
        assert!(has_crossing(&g, StateRef::Edges(&cfg), Direction::TopBottom, PathMode::OpenPath)
            .unwrap());
        assert!(!has_crossing(&g, StateRef::Edges(&cfg), Direction::LeftRight, PathMode::OpenPath)
            .unwrap());
    }

    #[test]
    fn all_closed_no_crossing() {
        let g = boxg(2, 1);
        let cfg = EdgeConfig::all_closed(7);
        for dir in [Direction::LeftRight, Direction::TopBottom] {
            assert!(!has_crossing(&g, StateRef::Edges(&cfg), dir, PathMode::OpenPath).unwrap());
        }
    }

    #[test]
    fn mode_mismatch_rejected() {
        let g = boxg(2, 1);
        let cfg = EdgeConfig::all_closed(7);
        let err = has_crossing(&g, StateRef::Edges(&cfg), Direction::LeftRight, PathMode::PlusPath)
            .unwrap_err();
        assert_eq!(err, GraphError::ModeStateMismatch);
    }

    #[test]
    fn plus_and_minus_star_paths() {
        let g = boxg(2, 1);
        // Plus spins along the bottom row.
        let mut s = SpinConfig::all_down(6);
        s.set(0, true);
        s.set(1, true);
        s.set(2, true);
        assert!(has_crossing(&g, StateRef::Spins(&s), Direction::LeftRight, PathMode::PlusPath)
            .unwrap());
        // The complementary minus set is the top row: a minus-star TB path
        // does not exist because the bottom row is all plus.
        assert!(!has_crossing(
            &g,
            StateRef::Spins(&s),
            Direction::TopBottom,
            PathMode::MinusStarPath
        )
        .unwrap());
        // A plus diagonal does not block a minus-star path.
        let mut d = SpinConfig::all_down(6);
        d.set(0, true); // (0,0) plus
        d.set(4, true); // (1,1) plus
        // Minus TB path down the right column (2,1)-(2,0).
        assert!(has_crossing(
            &g,
            StateRef::Spins(&d),
            Direction::TopBottom,
            PathMode::MinusStarPath
        )
        .unwrap());
        // The two isolated plus vertices are not nearest-neighbour adjacent.
        let plus_lr = has_crossing(
            &g,
            StateRef::Spins(&d),
            Direction::LeftRight,
            PathMode::PlusPath,
        )
        .unwrap();
        assert!(!plus_lr);
    }

    #[test]
    fn rect_crossing_confined_to_rect() {
        // CenteredBox(1) with the sub-box [0,1]x[0,1] in its corner.
        let g = LatticeGraph::build_box(GraphKind::CenteredBox { n: 1 }).unwrap();
        let rect = Rect { x0: 0, y0: 0, x1: 1, y1: 1 };
        let a = g.vertex_at(0, 0).unwrap();
        let b = g.vertex_at(1, 0).unwrap();
        let mut cfg = EdgeConfig::all_closed(g.edge_count());
        cfg.set(g.edge_between(a, b).unwrap(), true);
        assert!(has_rect_crossing(
            &g,
            StateRef::Edges(&cfg),
            rect,
            Direction::LeftRight,
            PathMode::OpenPath
        )
        .unwrap());
        assert!(!has_rect_crossing(
            &g,
            StateRef::Edges(&cfg),
            rect,
            Direction::TopBottom,
            PathMode::OpenPath
        )
        .unwrap());
        // A detour through (0,-1), outside the rect, must not count.
        let below = g.vertex_at(0, -1).unwrap();
        let right_below = g.vertex_at(1, -1).unwrap();
        let mut detour = EdgeConfig::all_closed(g.edge_count());
        detour.set(g.edge_between(a, below).unwrap(), true);
        detour.set(g.edge_between(below, right_below).unwrap(), true);
        detour.set(g.edge_between(right_below, b).unwrap(), true);
        assert!(!has_rect_crossing(
            &g,
            StateRef::Edges(&detour),
            rect,
            Direction::LeftRight,
            PathMode::OpenPath
        )
        .unwrap());
        // The same detour crosses the rect that contains it.
        let wide = Rect { x0: 0, y0: -1, x1: 1, y1: 1 };
        assert!(has_rect_crossing(
            &g,
            StateRef::Edges(&detour),
            wide,
            Direction::LeftRight,
            PathMode::OpenPath
        )
        .unwrap());
    }

    #[test]
    fn rect_crossing_matches_whole_box() {
        // The rect spanning the whole box agrees with has_crossing.
        let g = boxg(2, 1);
        let rect = Rect { x0: 0, y0: 0, x1: 2, y1: 1 };
        for mask in 0..1u64 << 7 {
            let cfg = EdgeConfig::from_mask(mask, 7);
            for dir in [Direction::LeftRight, Direction::TopBottom] {
                let whole =
                    has_crossing(&g, StateRef::Edges(&cfg), dir, PathMode::OpenPath).unwrap();
                let rected =
                    has_rect_crossing(&g, StateRef::Edges(&cfg), rect, dir, PathMode::OpenPath)
                        .unwrap();
                assert_eq!(whole, rected, "mask {mask} dir {dir:?}");
            }
        }
    }

    #[test]
    fn radius_zero_always_true() {
        let g = LatticeGraph::build_box(GraphKind::CenteredBox { n: 1 }).unwrap();
        let origin = g.vertex_at(0, 0).unwrap();
        let cfg = EdgeConfig::all_closed(g.edge_count());
        assert!(radius_reached(&g, StateRef::Edges(&cfg), origin, 0, PathMode::OpenPath).unwrap());
        assert!(!radius_reached(&g, StateRef::Edges(&cfg), origin, 1, PathMode::OpenPath).unwrap());
    }

    #[test]
    fn radius_one_via_open_edge() {
        let g = LatticeGraph::build_box(GraphKind::CenteredBox { n: 1 }).unwrap();
        let origin = g.vertex_at(0, 0).unwrap();
        let right = g.vertex_at(1, 0).unwrap();
        let mut cfg = EdgeConfig::all_closed(g.edge_count());
        let e = g.edge_between(origin, right).unwrap();
        cfg.set(e, true);
        assert!(radius_reached(&g, StateRef::Edges(&cfg), origin, 1, PathMode::OpenPath).unwrap());
    }

    #[test]
    fn minus_seed_cannot_start_plus_cluster() {
        let g = LatticeGraph::build_box(GraphKind::CenteredBox { n: 1 }).unwrap();
        let origin = g.vertex_at(0, 0).unwrap();
        let s = SpinConfig::all_up(9);
        let mut t = s.clone();
        t.set(origin, false);
        // Minus origin: plus cluster of the origin is empty, radius 1 fails.
        assert!(!radius_reached(&g, StateRef::Spins(&t), origin, 1, PathMode::PlusPath).unwrap());
        // But radius 0 is still trivially true.
        assert!(radius_reached(&g, StateRef::Spins(&t), origin, 0, PathMode::PlusPath).unwrap());
        assert!(radius_reached(&g, StateRef::Spins(&s), origin, 1, PathMode::PlusPath).unwrap());
    }
}
